//! Real numbers as fast-converging rational approximation oracles.
//!
//! A [`CauchyReal`] answers stage `n` with a rational `q_n` such that
//! `|q_n - q_{n+i}| <= 2^{-n}` for every `i`; the value it denotes is
//! therefore within `2^{-n}` of every stage-`n` answer.

use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::rational::{fmt_rat, tol, Rational};

type ApproxFn = dyn Fn(u32) -> Rational + Send + Sync;

#[derive(Clone)]
pub struct CauchyReal {
    approx: Arc<ApproxFn>,
    exact: Option<Rational>,
}

impl CauchyReal {
    /// The constant sequence at `q`.
    pub fn constant(q: Rational) -> Self {
        let value = q.clone();
        CauchyReal {
            approx: Arc::new(move |_| value.clone()),
            exact: Some(q),
        }
    }

    /// Wraps a stage oracle. The caller guarantees the modulus and that the
    /// oracle is deterministic.
    pub fn from_fn(f: impl Fn(u32) -> Rational + Send + Sync + 'static) -> Self {
        CauchyReal {
            approx: Arc::new(f),
            exact: None,
        }
    }

    /// `sqrt(2)/2` by dyadic truncation: stage `n` is `floor(2^n sqrt(1/2)) / 2^n`.
    pub fn sqrt_half() -> Self {
        CauchyReal::from_fn(|n| {
            if n == 0 {
                return Rational::zero();
            }
            let radicand = BigInt::one() << (2 * n - 1) as usize;
            Rational::new(radicand.sqrt(), BigInt::one() << n as usize)
        })
    }

    pub fn approx(&self, n: u32) -> Rational {
        match &self.exact {
            Some(q) => q.clone(),
            None => (self.approx)(n),
        }
    }

    /// The exact value when this real was built from a rational.
    pub fn exact(&self) -> Option<&Rational> {
        self.exact.as_ref()
    }
}

impl From<Rational> for CauchyReal {
    fn from(q: Rational) -> Self {
        CauchyReal::constant(q)
    }
}

impl fmt::Debug for CauchyReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.exact {
            Some(q) => write!(f, "CauchyReal({})", fmt_rat(q)),
            None => write!(f, "CauchyReal(~{})", fmt_rat(&self.approx(16))),
        }
    }
}

/// Stage-`n` approximation, within `2^{-n}` of the true value.
pub fn real_approx(x: &CauchyReal, n: u32) -> Rational {
    x.approx(n)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RealOrdering {
    Less,
    Greater,
    /// `|x - y| <= 2^{-k+2}`; the comparison could not separate them.
    Within,
}

/// Compares two reals using only their stage `k + 3` approximations.
pub fn real_cmp(x: &CauchyReal, y: &CauchyReal, k: u32) -> RealOrdering {
    let a = x.approx(k + 3);
    let b = y.approx(k + 3);
    let slack = tol(k + 2);
    let d = b - a;
    if d > slack {
        RealOrdering::Less
    } else if -d > slack {
        RealOrdering::Greater
    } else {
        RealOrdering::Within
    }
}
