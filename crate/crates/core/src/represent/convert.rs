use num_traits::Signed;

use super::{OpenR2, OpenR3, OpenR4, CERTIFY_STAGES};
use crate::enumerate::{nth_rational, unpair};
use crate::interval::{FinOpen, OpenUnion, RatInterval};
use crate::rational::{clamp_unit, int, grid_floor_strict, min_rat, one, tol, zero, Rational};
use crate::real::{real_cmp, CauchyReal, RealOrdering};
use crate::Search;

/// Searches the stream for an entry certified to contain `x`. Each probe
/// costs one unit of fuel. Rational inputs are decided exactly entry by
/// entry; other reals dovetail entries against comparison stages.
pub fn member_semidecide(u: &OpenR4, x: &CauchyReal, fuel: u64) -> Search<usize> {
    if let Some(q) = x.exact() {
        return (0..fuel as usize).find(|&n| u.entry(n).contains(q)).into();
    }
    for t in 0..fuel {
        let (n, k) = unpair(t);
        let e = u.entry(n as usize);
        if e.is_empty() {
            continue;
        }
        let lo = CauchyReal::constant(e.lo.clone());
        let hi = CauchyReal::constant(e.hi.clone());
        let k = k.min(u32::MAX as u64 - 4) as u32;
        if real_cmp(&lo, x, k) == RealOrdering::Less && real_cmp(x, &hi, k) == RealOrdering::Less {
            return Search::Found(n as usize);
        }
    }
    Search::Exhausted
}

/// A certified positive lower bound of `Y(x)`, found by raising the stage
/// until the approximation clears twice its tolerance, so the bound is at
/// least half the approximation. `fuel` bounds the stage.
pub fn inner_radius(y: &OpenR2, x: &CauchyReal, fuel: u32) -> Search<Rational> {
    for s in 0..fuel {
        let v = y.value(x, s);
        if v > tol(s) * int(2) {
            return Search::Found(v - tol(s));
        }
    }
    Search::Exhausted
}

/// Precision used for the `n`-th entry of [`r3_to_r4`]: `⌈log2(n + 2)⌉ + 3`.
pub fn stage_of_entry(n: usize) -> u32 {
    let m = (n as u64) + 2;
    64 - (m - 1).leading_zeros() + 3
}

/// Entry `n` is the ball around the `n`-th enumerated rational `q` with
/// radius a certified lower bound of `dist(q)` at stage
/// [`stage_of_entry`]`(n)`, or empty when no positive bound is certified.
pub fn r3_to_r4(d: &OpenR3) -> OpenR4 {
    let d = d.clone();
    OpenR4::from_fn(move |n| {
        let q = nth_rational(n as u64);
        let m = stage_of_entry(n);
        let l = d.dist_at(&q, m) - tol(m);
        if l.is_positive() {
            RatInterval::ball(&q, &l)
        } else {
            RatInterval::open(q.clone(), q)
        }
    })
}

/// Exact distance presentation of a finite union.
pub fn r4_to_r3_fin(u: &FinOpen) -> OpenR3 {
    let full = u.is_full();
    let gaps = u.complement();
    OpenR3::from_fn(full, move |x, k| {
        let q = match x.exact() {
            Some(q) => clamp_unit(q),
            None => clamp_unit(&x.approx(k + 1)),
        };
        gaps.distance(&q).unwrap_or_else(one)
    })
}

/// The largest `r ∈ 2^{-k}ℤ`, capped at 1, such that the first `m` stream
/// entries cover `[x̃ - r, x̃ + r] ∩ [0, 1]`, where `x̃` is the stage `k + 3`
/// approximation of `x`. Non-decreasing in `m`.
pub fn r4_to_r3_stage(u: &OpenR4, x: &CauchyReal, k: u32, m: usize) -> Rational {
    let xt = clamp_unit(&x.approx(k + 3));
    let union = OpenUnion::from_intervals(&u.prefix(m));
    let Some((lo, hi)) = union.component_of(&xt) else {
        return zero();
    };
    let mut bound: Option<Rational> = None;
    if !lo.is_negative() {
        bound = Some(&xt - lo);
    }
    if *hi <= one() {
        let right = hi - &xt;
        bound = Some(match bound {
            Some(b) => min_rat(b, right),
            None => right,
        });
    }
    match bound {
        None => one(),
        Some(b) => min_rat(grid_floor_strict(&b, k).max(zero()), one()),
    }
}

/// Maximal open intervals of a finite union. Touching intervals stay
/// separate because the shared endpoint belongs to neither.
pub fn components(u: &FinOpen) -> Vec<RatInterval> {
    u.pieces().to_vec()
}

/// Maximal intervals of the union of the first `m` stream entries.
pub fn components_staged(u: &OpenR4, m: usize) -> Vec<RatInterval> {
    FinOpen::new(u.prefix(m)).pieces().to_vec()
}

/// Probes the first `budget` enumerated rationals and keeps the balls whose
/// radius can be certified. Always a subset of the set; nothing more is
/// promised.
pub fn r2_probe_r4(y: &OpenR2, budget: usize) -> FinOpen {
    let mut balls = Vec::new();
    for n in 0..budget {
        let q = nth_rational(n as u64);
        if let Search::Found(l) = inner_radius(y, &CauchyReal::constant(q.clone()), CERTIFY_STAGES) {
            balls.push(RatInterval::ball(&q, &l));
        }
    }
    FinOpen::new(balls)
}
