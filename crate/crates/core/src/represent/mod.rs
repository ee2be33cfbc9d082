//! The four presentations of an open set `O ⊆ [0, 1]` and the conversions
//! between them.
//!
//! * [`OpenR1`]: a value oracle `Y` with `O = {x : Y(x) > 0}`.
//! * [`OpenR2`]: the same, plus the radius promise that
//!   `(x - Y(x), x + Y(x)) ∩ [0, 1] ⊆ O` whenever `Y(x) > 0`.
//! * [`OpenR3`]: the distance to `[0, 1] \ O`, or the constant 1 when `O` is
//!   all of `[0, 1]`.
//! * [`OpenR4`]: an index-addressable stream of rational intervals whose
//!   union is `O`.

use std::fmt;
use std::sync::Arc;

use crate::interval::{FinClosed, FinOpen, OpenUnion, RatInterval};
use crate::rational::{clamp_unit, int, max_rat, min_rat, one, rat, tol, zero, Rational};
use crate::real::CauchyReal;

mod convert;
mod cover;
mod pincherle;

pub use convert::{
    components, components_staged, inner_radius, member_semidecide, r2_probe_r4, r3_to_r4,
    r4_to_r3_fin, r4_to_r3_stage, stage_of_entry,
};
pub use cover::{certified_r4, cover_search, Ball, CoverOracle, GreedyCover};
pub use pincherle::{
    delta, is_full, pincherle_profile, psi, ConstantPincherle, ExactPincherle, Fullness,
    PincherleOracle, SetKnowledgePincherle, DELTA_DEPTH,
};

/// Stage budget used wherever a radius has to be certified positive.
pub const CERTIFY_STAGES: u32 = 64;

type ValueFn = dyn Fn(&CauchyReal, u32) -> Rational + Send + Sync;
type EntryFn = dyn Fn(usize) -> RatInterval + Send + Sync;

/// A bare value oracle: `value(x, k)` is within `2^{-k}` of `Y(x)`.
#[derive(Clone)]
pub struct OpenR1 {
    value: Arc<ValueFn>,
}

impl OpenR1 {
    pub fn from_fn(f: impl Fn(&CauchyReal, u32) -> Rational + Send + Sync + 'static) -> Self {
        OpenR1 { value: Arc::new(f) }
    }

    pub fn value(&self, x: &CauchyReal, k: u32) -> Rational {
        (self.value)(x, k)
    }
}

impl fmt::Debug for OpenR1 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("OpenR1(..)")
    }
}

/// What is known about the set an [`OpenR2`] presents.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Backing {
    pub set: FinOpen,
    /// The oracle is exactly `min(d(x, [0,1] \ set), 1)`, or `1` when the set
    /// is everything.
    pub canonical: bool,
}

/// A radius oracle.
#[derive(Clone)]
pub struct OpenR2 {
    value: Arc<ValueFn>,
    backing: Option<Backing>,
    fill: Option<Rational>,
}

impl OpenR2 {
    /// An opaque oracle. The caller vouches for the radius promise.
    pub fn from_fn(f: impl Fn(&CauchyReal, u32) -> Rational + Send + Sync + 'static) -> Self {
        OpenR2 { value: Arc::new(f), backing: None, fill: None }
    }

    /// An oracle for a known set whose radii are not the canonical ones.
    pub fn with_backing(
        set: FinOpen,
        f: impl Fn(&CauchyReal, u32) -> Rational + Send + Sync + 'static,
    ) -> Self {
        OpenR2 {
            value: Arc::new(f),
            backing: Some(Backing { set, canonical: false }),
            fill: None,
        }
    }

    /// The distance presentation of `set`: `Y(x) = d(x, [0,1] \ set)`, and
    /// `Y ≡ 1` when `set` covers `[0, 1]`.
    pub fn canonical(set: FinOpen) -> Self {
        let full = set.is_full();
        let gaps = Arc::new(set.complement());
        let value = move |x: &CauchyReal, k: u32| -> Rational {
            if full {
                return one();
            }
            let q = match x.exact() {
                Some(q) => clamp_unit(q),
                None => clamp_unit(&x.approx(k + 1)),
            };
            min_rat(gaps.distance(&q).unwrap_or_else(one), one())
        };
        OpenR2 {
            value: Arc::new(value),
            backing: Some(Backing { set, canonical: true }),
            fill: None,
        }
    }

    pub fn full() -> Self {
        OpenR2::canonical(FinOpen::full())
    }

    pub fn empty() -> Self {
        OpenR2::canonical(FinOpen::empty())
    }

    /// `[0, 1] \ {p}` with `Y(x) = |x - p|`.
    pub fn punctured(p: Rational) -> Self {
        OpenR2::canonical(FinOpen::punctured(&[p]))
    }

    pub fn value(&self, x: &CauchyReal, k: u32) -> Rational {
        (self.value)(x, k)
    }

    pub fn value_at(&self, q: &Rational, k: u32) -> Rational {
        self.value(&CauchyReal::constant(q.clone()), k)
    }

    pub fn backing(&self) -> Option<&Backing> {
        self.backing.as_ref()
    }

    /// The constant `2^{-j}` substituted where the base oracle vanishes, when
    /// this oracle is such a gadget.
    pub fn fill(&self) -> Option<&Rational> {
        self.fill.as_ref()
    }

    pub fn to_r1(&self) -> OpenR1 {
        OpenR1 { value: self.value.clone() }
    }

    /// `Y_j(x) = Y(x)` where `Y(x) > 0`, and `2^{-j}` elsewhere.
    ///
    /// Deciding `Y(x) > 0` is not finitary in general. On a backed oracle at
    /// a rational point it is decided exactly by membership; otherwise the
    /// stage-`k` surrogate "the approximation clears its own tolerance" is
    /// used.
    pub fn gadget_fill(&self, j: u32) -> OpenR2 {
        let base = self.clone();
        let floor = tol(j);
        let fill = floor.clone();
        let value = move |x: &CauchyReal, k: u32| -> Rational {
            if let (Some(b), Some(q)) = (&base.backing, x.exact()) {
                return if b.set.contains(&clamp_unit(q)) { base.value(x, k) } else { floor.clone() };
            }
            let v = base.value(x, k + 1);
            if v > tol(k + 1) {
                v
            } else {
                floor.clone()
            }
        };
        OpenR2 {
            value: Arc::new(value),
            backing: self.backing.clone(),
            fill: Some(fill),
        }
    }

    /// A presentation of `O ∪ {y : |x - y| > r}`.
    pub fn gadget_hole(&self, x: &Rational, r: &Rational) -> OpenR2 {
        let far = [
            RatInterval::open(int(-1), x - r),
            RatInterval::open(x + r, int(2)),
        ];
        match &self.backing {
            Some(b) if b.canonical => {
                let set = FinOpen::new(b.set.pieces().iter().cloned().chain(far));
                OpenR2::canonical(set)
            }
            _ => {
                let base = self.clone();
                let (centre, radius) = (x.clone(), r.clone());
                let value = move |y: &CauchyReal, k: u32| -> Rational {
                    let v = base.value(y, k);
                    let p = match y.exact() {
                        Some(q) => q.clone(),
                        None => y.approx(k + 1),
                    };
                    let reach = crate::rational::abs_diff(&centre, &p) - &radius;
                    max_rat(v, max_rat(reach, zero()))
                };
                OpenR2 {
                    value: Arc::new(value),
                    backing: self.backing.as_ref().map(|b| Backing {
                        set: FinOpen::new(b.set.pieces().iter().cloned().chain(far)),
                        canonical: false,
                    }),
                    fill: None,
                }
            }
        }
    }

    /// Pointwise minimum with `|x - p|`: the same presentation with `p`
    /// removed from the set.
    pub fn without_point(&self, p: &Rational) -> OpenR2 {
        let base = self.clone();
        let hole = p.clone();
        let value = move |y: &CauchyReal, k: u32| -> Rational {
            let v = base.value(y, k);
            let q = match y.exact() {
                Some(q) => q.clone(),
                None => y.approx(k + 1),
            };
            min_rat(v, crate::rational::abs_diff(&q, &hole))
        };
        let backing = self.backing.as_ref().map(|b| {
            let cut = FinOpen::punctured(std::slice::from_ref(p));
            let mut pieces = Vec::new();
            for a in b.set.pieces() {
                for c in cut.pieces() {
                    let lo = max_rat(a.lo.clone(), c.lo.clone());
                    let hi = min_rat(a.hi.clone(), c.hi.clone());
                    pieces.push(RatInterval::open(lo, hi));
                }
            }
            Backing { set: FinOpen::new(pieces), canonical: b.canonical }
        });
        OpenR2 { value: Arc::new(value), backing, fill: None }
    }
}

impl fmt::Debug for OpenR2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("OpenR2")
            .field("backing", &self.backing)
            .field("fill", &self.fill)
            .finish_non_exhaustive()
    }
}

/// A distance-to-complement oracle.
#[derive(Clone)]
pub struct OpenR3 {
    dist: Arc<ValueFn>,
    full: bool,
}

impl OpenR3 {
    pub fn from_fn(
        full: bool,
        f: impl Fn(&CauchyReal, u32) -> Rational + Send + Sync + 'static,
    ) -> Self {
        OpenR3 { dist: Arc::new(f), full }
    }

    pub fn full() -> Self {
        OpenR3::from_fn(true, |_, _| one())
    }

    pub fn dist(&self, x: &CauchyReal, k: u32) -> Rational {
        if self.full {
            one()
        } else {
            (self.dist)(x, k)
        }
    }

    pub fn dist_at(&self, q: &Rational, k: u32) -> Rational {
        self.dist(&CauchyReal::constant(q.clone()), k)
    }

    pub fn is_full(&self) -> bool {
        self.full
    }
}

impl fmt::Debug for OpenR3 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("OpenR3").field("full", &self.full).finish_non_exhaustive()
    }
}

/// An index-addressable stream of open rational intervals. Entries may be
/// empty.
#[derive(Clone)]
pub struct OpenR4 {
    entry: Arc<EntryFn>,
}

impl OpenR4 {
    pub fn from_fn(f: impl Fn(usize) -> RatInterval + Send + Sync + 'static) -> Self {
        OpenR4 { entry: Arc::new(f) }
    }

    /// The given pieces followed by empty entries.
    pub fn from_pieces(pieces: Vec<RatInterval>) -> Self {
        OpenR4::from_fn(move |n| pieces.get(n).cloned().unwrap_or_else(RatInterval::empty))
    }

    /// The given pieces repeated forever.
    pub fn cycle(pieces: Vec<RatInterval>) -> Self {
        if pieces.is_empty() {
            return OpenR4::from_pieces(pieces);
        }
        OpenR4::from_fn(move |n| pieces[n % pieces.len()].clone())
    }

    pub fn constant(piece: RatInterval) -> Self {
        OpenR4::cycle(vec![piece])
    }

    pub fn from_fin_open(set: &FinOpen) -> Self {
        OpenR4::from_pieces(set.pieces().to_vec())
    }

    /// `(1/(n+2), 1)` for `n = 0, 1, 2, …`.
    pub fn tail_cover() -> Self {
        OpenR4::from_fn(|n| RatInterval::open(rat(1, n as i64 + 2), one()))
    }

    pub fn entry(&self, n: usize) -> RatInterval {
        (self.entry)(n)
    }

    /// Entries `0..m`.
    pub fn prefix(&self, m: usize) -> Vec<RatInterval> {
        (0..m).map(|n| self.entry(n)).collect()
    }
}

impl fmt::Debug for OpenR4 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("OpenR4(..)")
    }
}

/// A closed set given by a stream enumerating its complement.
#[derive(Clone, Debug)]
pub struct ClosedRM {
    complement: OpenR4,
}

impl ClosedRM {
    pub fn new(complement: OpenR4) -> Self {
        ClosedRM { complement }
    }

    /// The complement pieces of `set` (with `-1`/`2` sentinels), then empty
    /// entries. For `[1/3, 2/3]` the stream is `(-1, 1/3), (2/3, 2), ∅, …`.
    pub fn from_fin_closed(set: &FinClosed) -> Self {
        ClosedRM::new(OpenR4::from_pieces(set.complement_pieces()))
    }

    pub fn complement(&self) -> &OpenR4 {
        &self.complement
    }

    /// `[0, 1]` minus the first `m` complement entries: a closed superset of
    /// the set that shrinks to it as `m` grows.
    pub fn outer(&self, m: usize) -> FinClosed {
        let removed = OpenUnion::from_intervals(&self.complement.prefix(m));
        FinClosed::unit().minus_open(&removed)
    }
}
