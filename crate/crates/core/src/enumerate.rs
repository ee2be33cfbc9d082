//! The pinned enumeration of `Q ∩ [0, 1]` and the Cantor pairing used for
//! every dovetailed search.
//!
//! Order: by denominator, then by numerator, skipping non-reduced fractions:
//! `0, 1, 1/2, 1/3, 2/3, 1/4, 3/4, 1/5, 2/5, …`. This is the order in which
//! the Stern–Brocot tree produces the Farey sequences, flattened level by
//! denominator. Every rational of `[0, 1]` appears exactly once, and an
//! interval of width `w` is hit by a fraction of denominator at most about
//! `1/w`, so interval searches stay short even next to simple rationals.

use std::sync::OnceLock;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::rational::Rational;

fn totient(d: u64) -> u64 {
    let mut n = d;
    let mut phi = d;
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            while n % p == 0 {
                n /= p;
            }
            phi -= phi / p;
        }
        p += 1;
    }
    if n > 1 {
        phi -= phi / n;
    }
    phi
}

/// Number of enumerated rationals with denominator `d` (two for `d = 1`).
fn count_at(d: u64) -> u64 {
    if d == 1 {
        2
    } else {
        totient(d)
    }
}

const TABLE_DENOMS: usize = 1 << 16;

/// `starts[d]` is the index of the first rational with denominator `d`.
fn starts() -> &'static [u64] {
    static STARTS: OnceLock<Vec<u64>> = OnceLock::new();
    STARTS.get_or_init(|| {
        let mut phi: Vec<u64> = (0..=TABLE_DENOMS as u64).collect();
        for p in 2..=TABLE_DENOMS {
            if phi[p] == p as u64 {
                for m in (p..=TABLE_DENOMS).step_by(p) {
                    phi[m] -= phi[m] / p as u64;
                }
            }
        }
        let mut starts = vec![0u64; TABLE_DENOMS + 2];
        starts[2] = 2;
        for d in 2..=TABLE_DENOMS {
            starts[d + 1] = starts[d] + phi[d];
        }
        starts
    })
}

fn first_index_of_denom(d: u64) -> u64 {
    let table = starts();
    if (d as usize) < table.len() {
        return table[d as usize];
    }
    let mut idx = table[table.len() - 1];
    for e in (table.len() as u64 - 1)..d {
        idx += count_at(e);
    }
    idx
}

/// The `n`-th rational of the pinned enumeration.
pub fn nth_rational(n: u64) -> Rational {
    if n < 2 {
        return Rational::from_integer(BigInt::from(n));
    }
    let table = starts();
    let (d, mut rest) = if n < table[table.len() - 1] {
        let d = table.partition_point(|&s| s <= n) - 1;
        (d as u64, n - table[d])
    } else {
        let mut d = table.len() as u64 - 1;
        let mut rest = n - table[table.len() - 1];
        while rest >= count_at(d) {
            rest -= count_at(d);
            d += 1;
        }
        (d, rest)
    };
    let mut p = 0u64;
    loop {
        p += 1;
        if p.gcd(&d) == 1 {
            if rest == 0 {
                return Rational::new(BigInt::from(p), BigInt::from(d));
            }
            rest -= 1;
        }
    }
}

/// Index of `q` in [`nth_rational`] order, for `q ∈ [0, 1]`.
pub fn rational_index(q: &Rational) -> Option<u64> {
    if q.is_negative() || *q > Rational::one() {
        return None;
    }
    let d = q.denom().to_u64()?;
    let p = q.numer().to_u64()?;
    if d == 1 {
        return Some(p);
    }
    let before = first_index_of_denom(d);
    let rank = (1..p).filter(|a| a.gcd(&d) == 1).count() as u64;
    Some(before + rank)
}

/// The enumeration as an iterator, in amortised constant time per element.
pub fn rationals() -> impl Iterator<Item = Rational> {
    let mut d = 1u64;
    let mut p = 0u64;
    std::iter::from_fn(move || loop {
        if d == 1 {
            if p <= 1 {
                p += 1;
                return Some(Rational::from_integer(BigInt::from(p - 1)));
            }
            d = 2;
            p = 0;
        }
        p += 1;
        if p >= d {
            d += 1;
            p = 0;
            continue;
        }
        if p.gcd(&d) == 1 {
            return Some(Rational::new(BigInt::from(p), BigInt::from(d)));
        }
    })
}

/// Cantor pairing.
pub fn pair(a: u64, b: u64) -> u64 {
    (a + b) * (a + b + 1) / 2 + b
}

/// Inverse of [`pair`].
pub fn unpair(t: u64) -> (u64, u64) {
    let mut w = (((8.0 * t as f64 + 1.0).sqrt() - 1.0) / 2.0) as u64;
    // The float estimate can be off by one either way for large inputs.
    while (w + 1) * (w + 2) / 2 <= t {
        w += 1;
    }
    while w * (w + 1) / 2 > t {
        w -= 1;
    }
    let b = t - w * (w + 1) / 2;
    (w - b, b)
}

/// Outcome of scanning the enumeration inside an interval.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ScanResult {
    Found(Rational),
    /// The fuel ran out; the number of candidates examined is reported.
    Exhausted { examined: u64 },
}

/// First rational, in enumeration order, inside the open interval
/// `(lo, hi)` that satisfies `accept`. Denominators are visited in order and
/// only numerators landing inside the interval are generated. Each
/// candidate, and each denominator with no candidate, costs one unit of
/// `fuel`.
pub fn first_in_open(
    lo: &Rational,
    hi: &Rational,
    fuel: u64,
    mut accept: impl FnMut(&Rational) -> bool,
) -> ScanResult {
    let mut spent = 0u64;
    let zero = Rational::zero();
    let one = Rational::one();
    let lo = if *lo < zero { Rational::from_integer(BigInt::from(-1)) } else { lo.clone() };
    let hi = if *hi > one { Rational::from_integer(BigInt::from(2)) } else { hi.clone() };
    if lo >= hi {
        return ScanResult::Exhausted { examined: 0 };
    }
    let mut d = 1u64;
    loop {
        if spent >= fuel {
            return ScanResult::Exhausted { examined: spent };
        }
        let dd = BigInt::from(d);
        // Smallest p with p/d > lo and largest with p/d < hi, kept in [0, d].
        let p_min: BigInt = (&lo * Rational::from_integer(dd.clone())).floor().to_integer() + 1;
        let p_max: BigInt = (&hi * Rational::from_integer(dd.clone())).ceil().to_integer() - 1;
        let p_min = p_min.max(BigInt::zero()).to_u64().unwrap_or(u64::MAX);
        let p_max = p_max.min(dd.clone()).to_i64().unwrap_or(-1);
        let mut any = false;
        if p_max >= 0 {
            let (from, to) = if d == 1 {
                (p_min, (p_max as u64).min(1))
            } else {
                (p_min.max(1), (p_max as u64).min(d - 1))
            };
            let mut p = from;
            while p <= to {
                if d == 1 || p.gcd(&d) == 1 {
                    if spent >= fuel {
                        return ScanResult::Exhausted { examined: spent };
                    }
                    spent += 1;
                    any = true;
                    let q = Rational::new(BigInt::from(p), dd.clone());
                    if accept(&q) {
                        return ScanResult::Found(q);
                    }
                }
                p += 1;
            }
        }
        if !any {
            spent += 1;
        }
        d += 1;
    }
}
