//! Separating functions for disjoint closed sets, extension of functions
//! from a closed set to `[0, 1]`, and the distance computations behind them.
//! Everything is piecewise linear with rational breakpoints, so every claim
//! about the output can be checked exactly.

use num_traits::Signed;
use serde::ser::{SerializeSeq, Serializer};
use serde::Serialize;

use crate::error::Error;
use crate::interval::FinClosed;
use crate::rational::{fmt_rat, half, max_rat, one, zero, Rational};
use crate::real::CauchyReal;

/// A continuous piecewise linear function: linear between consecutive
/// breakpoints, constant beyond the first and last.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PLFunction {
    points: Vec<(Rational, Rational)>,
}

impl PLFunction {
    /// Breakpoints must be non-empty with strictly increasing abscissae.
    pub fn new(points: Vec<(Rational, Rational)>) -> Result<Self, Error> {
        if points.is_empty() {
            return Err(Error::Invariant("a piecewise linear function needs a breakpoint".into()));
        }
        if points.windows(2).any(|w| w[0].0 >= w[1].0) {
            return Err(Error::Invariant("breakpoints must be strictly increasing".into()));
        }
        Ok(PLFunction { points })
    }

    pub fn constant(c: Rational) -> Self {
        PLFunction { points: vec![(zero(), c)] }
    }

    pub fn breakpoints(&self) -> &[(Rational, Rational)] {
        &self.points
    }

    pub fn eval(&self, x: &Rational) -> Rational {
        let i = self.points.partition_point(|(bx, _)| bx <= x);
        if i == 0 {
            return self.points[0].1.clone();
        }
        if i == self.points.len() {
            return self.points[i - 1].1.clone();
        }
        let (x0, v0) = &self.points[i - 1];
        let (x1, v1) = &self.points[i];
        v0 + (v1 - v0) * (x - x0) / (x1 - x0)
    }

    /// Least and greatest value. Attained at breakpoints.
    pub fn range(&self) -> (Rational, Rational) {
        let vs = self.points.iter().map(|(_, v)| v);
        (vs.clone().min().unwrap().clone(), vs.max().unwrap().clone())
    }

    /// `sup |f|`.
    pub fn sup_abs(&self) -> Rational {
        self.points.iter().map(|(_, v)| v.abs()).max().unwrap()
    }

    /// `1 - f`.
    pub fn complement(&self) -> PLFunction {
        PLFunction { points: self.points.iter().map(|(x, v)| (x.clone(), one() - v)).collect() }
    }
}

impl Serialize for PLFunction {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(self.points.len()))?;
        for (x, v) in &self.points {
            seq.serialize_element(&[fmt_rat(x), fmt_rat(v)])?;
        }
        seq.end()
    }
}

/// `d(x, C)` to within `2^{-k}`, from the stage `k + 3` approximation of `x`.
pub fn distance_closed(c: &FinClosed, x: &CauchyReal, k: u32) -> Result<Rational, Error> {
    c.distance(&x.approx(k + 3)).ok_or(Error::EmptySet)
}

/// `inf |x - y|` over `x ∈ C0`, `y ∈ C1`; `None` (an infinite gap) when
/// either set is empty.
pub fn separation_gap(c0: &FinClosed, c1: &FinClosed) -> Option<Rational> {
    c0.pieces()
        .iter()
        .flat_map(|a| {
            c1.pieces().iter().map(move |b| {
                max_rat(max_rat(&b.lo - &a.hi, &a.lo - &b.hi), zero())
            })
        })
        .min()
}

fn labelled(c0: &FinClosed, c1: &FinClosed) -> Result<Vec<(Rational, Rational, Rational)>, Error> {
    if let Some(p) = c0.common_point(c1) {
        return Err(Error::NotDisjoint(fmt_rat(&p)));
    }
    let mut pieces: Vec<(Rational, Rational, Rational)> = c0
        .pieces()
        .iter()
        .map(|p| (p.lo.clone(), p.hi.clone(), zero()))
        .chain(c1.pieces().iter().map(|p| (p.lo.clone(), p.hi.clone(), one())))
        .collect();
    pieces.sort();
    Ok(pieces)
}

fn push_piece(points: &mut Vec<(Rational, Rational)>, lo: &Rational, hi: &Rational, v: &Rational) {
    points.push((lo.clone(), v.clone()));
    if lo < hi {
        points.push((hi.clone(), v.clone()));
    }
}

/// The separating function: `i` on each piece of `C_i`, the straight line
/// across each gap between pieces, and constant beyond the outermost pieces.
/// Gaps between pieces of the same set therefore carry that set's constant.
/// Both sets empty gives `0`.
pub fn urysohn(c0: &FinClosed, c1: &FinClosed) -> Result<PLFunction, Error> {
    let pieces = labelled(c0, c1)?;
    if pieces.is_empty() {
        return Ok(PLFunction::constant(zero()));
    }
    let mut points = Vec::new();
    for (lo, hi, v) in &pieces {
        push_piece(&mut points, lo, hi, v);
    }
    PLFunction::new(points)
}

/// A separating function with `g(x) = i` exactly when `x ∈ C_i`: gaps
/// between pieces of the same set get a tent to `1/2` at their midpoint, and
/// the stretches between `0` or `1` and the outermost pieces run from `1/2`.
/// Both sets empty gives the constant `1/2`.
pub fn urysohn_strict(c0: &FinClosed, c1: &FinClosed) -> Result<PLFunction, Error> {
    let pieces = labelled(c0, c1)?;
    if pieces.is_empty() {
        return Ok(PLFunction::constant(half()));
    }
    let mut points = Vec::new();
    if pieces[0].0 > zero() {
        points.push((zero(), half()));
    }
    for (j, (lo, hi, v)) in pieces.iter().enumerate() {
        if j > 0 {
            let (_, prev_hi, prev_v) = &pieces[j - 1];
            if prev_v == v {
                points.push(((prev_hi + lo) * half(), half()));
            }
        }
        push_piece(&mut points, lo, hi, v);
    }
    if pieces[pieces.len() - 1].1 < one() {
        points.push((one(), half()));
    }
    PLFunction::new(points)
}

/// Extends `f` from `D` to `[0, 1]`: `f`'s breakpoints inside `D` and `D`'s
/// endpoints are kept, gaps of `D` are bridged by straight lines, and the
/// ends are constant. The sup of `|g|` equals the sup of `|f|` over `D`.
pub fn tietze_extend(d: &FinClosed, f: &PLFunction) -> Result<PLFunction, Error> {
    if d.is_empty() {
        return Err(Error::EmptySet);
    }
    let mut xs: Vec<Rational> = f
        .breakpoints()
        .iter()
        .map(|(x, _)| x.clone())
        .filter(|x| d.contains(x))
        .chain(d.pieces().iter().flat_map(|p| [p.lo.clone(), p.hi.clone()]))
        .collect();
    xs.sort();
    xs.dedup();
    PLFunction::new(xs.into_iter().map(|x| {
        let v = f.eval(&x);
        (x, v)
    }).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::interval::RatInterval;
    use crate::rational::{abs_diff, rat, tol};
    use proptest::prelude::*;

    fn cl(pieces: &[(i64, i64, i64, i64)]) -> FinClosed {
        FinClosed::new(pieces.iter().map(|&(a, b, c, d)| RatInterval::closed(rat(a, b), rat(c, d))))
    }

    #[test]
    fn distance_examples() {
        let c = cl(&[(1, 3, 2, 3), (3, 4, 3, 4)]);
        let d = distance_closed(&c, &CauchyReal::constant(zero()), 10).unwrap();
        assert!(abs_diff(&d, &rat(1, 3)) <= tol(10));
        let unit = FinClosed::unit();
        assert_eq!(distance_closed(&unit, &CauchyReal::sqrt_half(), 10), Ok(zero()));
        assert_eq!(
            distance_closed(&FinClosed::empty(), &CauchyReal::constant(zero()), 3),
            Err(Error::EmptySet)
        );
        let d = distance_closed(&cl(&[(0, 1, 1, 2)]), &CauchyReal::sqrt_half(), 12).unwrap();
        // Oracle: sqrt(1/2) - 1/2 lies in (0.2071, 0.2072).
        assert!(d > rat(2071, 10_000) - tol(12) && d < rat(2072, 10_000) + tol(12));
    }

    #[test]
    fn gap_examples() {
        assert_eq!(separation_gap(&cl(&[(0, 1, 1, 4)]), &cl(&[(3, 4, 1, 1)])), Some(rat(1, 2)));
        assert_eq!(separation_gap(&FinClosed::unit(), &FinClosed::unit()), Some(zero()));
        assert_eq!(separation_gap(&cl(&[(0, 1, 1, 3)]), &cl(&[(1, 3, 1, 1)])), Some(zero()));
        assert_eq!(separation_gap(&FinClosed::empty(), &FinClosed::unit()), None);
    }

    #[test]
    fn urysohn_examples() {
        let g = urysohn(&cl(&[(0, 1, 1, 4)]), &cl(&[(3, 4, 1, 1)])).unwrap();
        assert_eq!(g.eval(&rat(1, 4)), zero());
        assert_eq!(g.eval(&rat(3, 4)), one());
        assert_eq!(g.eval(&rat(1, 2)), rat(1, 2));
        assert_eq!(g.eval(&rat(3, 8)), rat(1, 4));
        let g = urysohn(&FinClosed::empty(), &FinClosed::empty()).unwrap();
        assert_eq!(g.eval(&rat(1, 3)), zero());
        let g = urysohn(&cl(&[(1, 2, 1, 2)]), &FinClosed::empty()).unwrap();
        for j in 0..=8 {
            assert_eq!(g.eval(&rat(j, 8)), zero());
        }
        assert!(matches!(
            urysohn(&cl(&[(0, 1, 1, 2)]), &cl(&[(1, 2, 1, 1)])),
            Err(Error::NotDisjoint(_))
        ));
    }

    #[test]
    fn strict_separation_is_exact() {
        let c0 = cl(&[(0, 1, 1, 8), (1, 4, 1, 4)]);
        let c1 = cl(&[(1, 2, 5, 8)]);
        let g = urysohn_strict(&c0, &c1).unwrap();
        for j in 0..=1000 {
            let x = rat(j, 1000);
            assert_eq!(g.eval(&x) == zero(), c0.contains(&x), "at {x}");
            assert_eq!(g.eval(&x) == one(), c1.contains(&x), "at {x}");
        }
        let g = urysohn_strict(&cl(&[(1, 2, 1, 2)]), &FinClosed::empty()).unwrap();
        assert_eq!(g.eval(&zero()), half());
        assert_eq!(g.eval(&rat(1, 2)), zero());
    }

    #[test]
    fn tietze_examples() {
        let d = cl(&[(0, 1, 1, 4), (3, 4, 1, 1)]);
        // 0 on the first piece, 1 on the second.
        let f = PLFunction::new(vec![
            (zero(), zero()),
            (rat(1, 4), zero()),
            (rat(3, 4), one()),
            (one(), one()),
        ])
        .unwrap();
        let g = tietze_extend(&d, &f).unwrap();
        assert_eq!(g.eval(&rat(1, 2)), rat(1, 2));
        let c = PLFunction::constant(rat(-2, 3));
        let g = tietze_extend(&d, &c).unwrap();
        for j in 0..=16 {
            assert_eq!(g.eval(&rat(j, 16)), rat(-2, 3));
        }
        let f = PLFunction::new(vec![(zero(), one()), (rat(1, 3), rat(-1, 2)), (one(), rat(1, 5))]).unwrap();
        let g = tietze_extend(&FinClosed::unit(), &f).unwrap();
        for j in 0..=30 {
            assert_eq!(g.eval(&rat(j, 30)), f.eval(&rat(j, 30)));
        }
        assert_eq!(tietze_extend(&FinClosed::empty(), &f), Err(Error::EmptySet));
    }

    fn arb_pair() -> impl Strategy<Value = (FinClosed, FinClosed)> {
        // Pieces on a 1/64 grid, each assigned to one side; consecutive
        // pieces are separated by at least one grid step.
        prop::collection::vec((1i64..6, 0i64..4, any::<bool>()), 1..6).prop_map(|v| {
            let (mut a, mut b) = (Vec::new(), Vec::new());
            let mut at = 0i64;
            for (gap, w, side) in v {
                let lo = at + gap - 1;
                let hi = lo + w;
                if hi > 64 {
                    break;
                }
                let piece = RatInterval::closed(rat(lo, 64), rat(hi, 64));
                if side { a.push(piece) } else { b.push(piece) }
                at = hi + 1;
            }
            (FinClosed::new(a), FinClosed::new(b))
        })
    }

    proptest! {
        #[test]
        fn separation_properties((c0, c1) in arb_pair()) {
            let g = urysohn(&c0, &c1).unwrap();
            let (lo, hi) = g.range();
            prop_assert!(lo >= zero() && hi <= one());
            for j in 0..=256 {
                let x = rat(j, 256);
                if c0.contains(&x) { prop_assert_eq!(g.eval(&x), zero()); }
                if c1.contains(&x) { prop_assert_eq!(g.eval(&x), one()); }
            }
            if !(c0.is_empty() && c1.is_empty()) {
                let h = urysohn(&c1, &c0).unwrap();
                for (x, _) in g.breakpoints().iter().chain(h.breakpoints()) {
                    prop_assert_eq!(h.eval(x), one() - g.eval(x));
                }
            }
            let s = urysohn_strict(&c0, &c1).unwrap();
            for j in 0..=256 {
                let x = rat(j, 256);
                prop_assert_eq!(s.eval(&x) == zero(), c0.contains(&x));
                prop_assert_eq!(s.eval(&x) == one(), c1.contains(&x));
            }
            if let Some(gap) = separation_gap(&c0, &c1) {
                prop_assert!(gap > zero());
            }
        }

        #[test]
        fn tietze_keeps_values_and_bound((c0, c1) in arb_pair(), vs in prop::collection::vec(-8i64..8, 2..6)) {
            let d = c0.union(&c1);
            prop_assume!(!d.is_empty());
            let n = vs.len() as i64 - 1;
            let f = PLFunction::new(vs.iter().enumerate().map(|(i, v)| (rat(i as i64, n), rat(*v, 4))).collect()).unwrap();
            let g = tietze_extend(&d, &f).unwrap();
            for j in 0..=128 {
                let x = rat(j, 128);
                if d.contains(&x) { prop_assert_eq!(g.eval(&x), f.eval(&x)); }
            }
            let on_d = f.breakpoints().iter().map(|(x, _)| x.clone()).filter(|x| d.contains(x))
                .chain(d.pieces().iter().flat_map(|p| [p.lo.clone(), p.hi.clone()]))
                .map(|x| f.eval(&x).abs())
                .max()
                .unwrap();
            prop_assert_eq!(g.sup_abs(), on_d);
        }
    }
}
