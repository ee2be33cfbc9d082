use num_traits::Zero;

use super::{r3_to_r4, OpenR2, OpenR3, OpenR4};
use crate::error::Error;
use crate::rational::{clamp_unit, half, one, tol, zero, Rational};
use crate::real::CauchyReal;

/// Depth of the fullness test run inside [`delta`].
pub const DELTA_DEPTH: u32 = 6;

/// A Pincherle oracle: given a presentation `Y` that is positive on all of
/// `[0, 1]`, a positive lower bound for `Y`. `None` means the oracle declines.
pub trait PincherleOracle {
    fn bound(&self, y: &OpenR2) -> Option<Rational>;
}

/// Exact answers for canonical (distance) presentations of finite unions:
/// `1` when the set is everything, the substituted constant on a fill
/// gadget, and nothing otherwise.
#[derive(Debug, Clone, Copy, Default)]
pub struct ExactPincherle;

impl PincherleOracle for ExactPincherle {
    fn bound(&self, y: &OpenR2) -> Option<Rational> {
        let b = y.backing().filter(|b| b.canonical)?;
        set_bound(&b.set, y)
    }
}

/// Answers from knowledge of the set alone, for any backed presentation.
/// This is the idealised honest oracle used when radii are not canonical.
#[derive(Debug, Clone, Copy, Default)]
pub struct SetKnowledgePincherle;

impl PincherleOracle for SetKnowledgePincherle {
    fn bound(&self, y: &OpenR2) -> Option<Rational> {
        let b = y.backing()?;
        set_bound(&b.set, y)
    }
}

fn set_bound(set: &crate::interval::FinOpen, y: &OpenR2) -> Option<Rational> {
    if set.is_full() {
        Some(one())
    } else {
        y.fill().cloned()
    }
}

/// Always answers the same constant.
#[derive(Debug, Clone)]
pub struct ConstantPincherle(pub Rational);

impl PincherleOracle for ConstantPincherle {
    fn bound(&self, _y: &OpenR2) -> Option<Rational> {
        Some(self.0.clone())
    }
}

impl<P: PincherleOracle + ?Sized> PincherleOracle for &P {
    fn bound(&self, y: &OpenR2) -> Option<Rational> {
        (**self).bound(y)
    }
}

/// Three-valued answer of [`is_full`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Fullness {
    Full,
    NotFull,
    Undetermined,
}

/// `mu(Y_j)` for `j = 0..=n`, where `Y_j` is the fill gadget of `Y`.
pub fn pincherle_profile(y: &OpenR2, mu: &dyn PincherleOracle, n: u32) -> Vec<Option<Rational>> {
    (0..=n).map(|j| mu.bound(&y.gadget_fill(j))).collect()
}

/// Decides whether `Y` presents all of `[0, 1]` by watching the oracle on
/// the fill gadgets `Y_0, …, Y_n`. On a full set the gadgets coincide with
/// `Y`, so an honest oracle gives one answer throughout; otherwise the
/// gadget dips to `2^{-j}` and `mu(Y_n) ≤ 2^{-n}`.
pub fn is_full(y: &OpenR2, mu: &dyn PincherleOracle, n: u32) -> Fullness {
    let profile = pincherle_profile(y, mu, n);
    let Some(values) = profile.into_iter().collect::<Option<Vec<_>>>() else {
        return Fullness::Undetermined;
    };
    if values.iter().any(|v| v <= &zero()) {
        return Fullness::Undetermined;
    }
    let last = &values[values.len() - 1];
    if values.iter().all(|v| v == last) {
        if *last > tol(n) {
            Fullness::Full
        } else {
            Fullness::Undetermined
        }
    } else if *last <= tol(n) {
        Fullness::NotFull
    } else {
        Fullness::Undetermined
    }
}

/// A `2^{-k}`-approximation of `d(x, [0,1] \ O)`, or `1` when `O` is
/// everything, by bisection on `r` with the fullness test applied to
/// `O ∪ {y : |x - y| > r}`.
pub fn delta(y: &OpenR2, mu: &dyn PincherleOracle, x: &CauchyReal, k: u32) -> Result<Rational, Error> {
    match is_full(y, mu, DELTA_DEPTH) {
        Fullness::Full => return Ok(one()),
        Fullness::Undetermined => return Err(Error::Undetermined { depth: DELTA_DEPTH }),
        Fullness::NotFull => {}
    }
    let xt = clamp_unit(&x.approx(k + 3));
    let probe = |r: &Rational| is_full(&y.gadget_hole(&xt, r), mu, DELTA_DEPTH);
    let mut lo = zero();
    let mut hi = one();
    if probe(&hi) == Fullness::Full {
        return Err(Error::OracleUnsound(
            "the set is not full but a ball covering [0, 1] was added and it became full".into(),
        ));
    }
    let slack = tol(k + 2);
    while &hi - &lo > slack {
        let mid = (&lo + &hi) * half();
        match probe(&mid) {
            Fullness::Full => lo = mid,
            Fullness::NotFull => hi = mid,
            Fullness::Undetermined => return Err(Error::Undetermined { depth: DELTA_DEPTH }),
        }
    }
    Ok((lo + hi) * half())
}

/// The stream presentation obtained by packaging [`delta`] as a distance
/// oracle and enumerating certified balls. Faults detected up front are
/// reported; a fault deeper in the stream yields empty entries.
pub fn psi(y: &OpenR2, mu: impl PincherleOracle + Clone + Send + Sync + 'static) -> Result<OpenR4, Error> {
    match is_full(y, &mu, DELTA_DEPTH) {
        Fullness::Full => return Ok(r3_to_r4(&OpenR3::full())),
        Fullness::Undetermined => return Err(Error::Undetermined { depth: DELTA_DEPTH }),
        Fullness::NotFull => {}
    }
    delta(y, &mu, &CauchyReal::constant(half()), 0)?;
    let y = y.clone();
    let dist = OpenR3::from_fn(false, move |x, k| {
        delta(&y, &mu, x, k).unwrap_or_else(|_| Rational::zero())
    });
    Ok(r3_to_r4(&dist))
}
