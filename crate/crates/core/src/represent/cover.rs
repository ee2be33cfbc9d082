use serde::Serialize;

use super::{inner_radius, OpenR2, OpenR4, CERTIFY_STAGES};
use crate::enumerate::{nth_rational, unpair};
use crate::interval::{covers, FinClosed, RatInterval};
use crate::rational::{half, max_rat, min_rat, one, serde_rat, tol, zero, Rational};
use crate::real::CauchyReal;
use crate::Search;

/// A certified ball `(centre - radius, centre + radius)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Ball {
    #[serde(with = "serde_rat")]
    pub centre: Rational,
    #[serde(with = "serde_rat")]
    pub radius: Rational,
}

impl Ball {
    pub fn interval(&self) -> RatInterval {
        RatInterval::ball(&self.centre, &self.radius)
    }
}

/// `[q - 2^{-n}, q + 2^{-n}] ∩ [0, 1]`.
fn target(q: &Rational, n: u32) -> (Rational, Rational) {
    let w = tol(n);
    (max_rat(q - &w, zero()), min_rat(q + &w, one()))
}

/// Marches left to right across `[q - 2^{-n}, q + 2^{-n}] ∩ [0, 1]`,
/// certifying a radius at each frontier point and stepping half of it.
/// `None` when the fuel runs out or a frontier point has no certificate.
pub fn cover_search(y: &OpenR2, q: &Rational, n: u32, fuel: u64) -> Option<Vec<Ball>> {
    let (a, b) = target(q, n);
    let mut p = a;
    let mut balls = Vec::new();
    for _ in 0..fuel {
        let Search::Found(r) = inner_radius(y, &CauchyReal::constant(p.clone()), CERTIFY_STAGES)
        else {
            return None;
        };
        let reach = &p + &r;
        balls.push(Ball { centre: p.clone(), radius: r.clone() });
        if reach > b {
            return Some(balls);
        }
        p = &p + r * half();
    }
    None
}

/// Finds finitely many certified balls covering a closed rational ball.
pub trait CoverOracle {
    fn cover(&self, y: &OpenR2, q: &Rational, n: u32) -> Option<Vec<Ball>>;
}

/// [`cover_search`] with a fixed fuel per query.
#[derive(Debug, Clone, Copy)]
pub struct GreedyCover {
    pub fuel: u64,
}

impl Default for GreedyCover {
    fn default() -> Self {
        GreedyCover { fuel: 1000 }
    }
}

impl CoverOracle for GreedyCover {
    fn cover(&self, y: &OpenR2, q: &Rational, n: u32) -> Option<Vec<Ball>> {
        cover_search(y, q, n, self.fuel)
    }
}

/// Entry `t = pair(i, n)` is `(q_i - 2^{-n}, q_i + 2^{-n})` when the oracle's
/// witness for that closed ball passes the exact cover check, and empty
/// otherwise.
pub fn certified_r4<C>(y: &OpenR2, oracle: C) -> OpenR4
where
    C: CoverOracle + Send + Sync + 'static,
{
    let y = y.clone();
    OpenR4::from_fn(move |t| {
        let (i, n) = unpair(t as u64);
        let q = nth_rational(i);
        let n = n.min(u32::MAX as u64) as u32;
        let empty = RatInterval::open(q.clone(), q.clone());
        let Some(balls) = oracle.cover(&y, &q, n) else {
            return empty;
        };
        let (a, b) = target(&q, n);
        let pieces: Vec<RatInterval> = balls.iter().map(Ball::interval).collect();
        if covers(&FinClosed::new([RatInterval::closed(a, b)]), &pieces) {
            RatInterval::ball(&q, &tol(n))
        } else {
            empty
        }
    })
}
