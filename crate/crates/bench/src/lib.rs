//! Inputs shared by the benchmarks.

use opensets::enumerate::nth_rational;
use opensets::rational::rat;
use opensets::{FinClosed, FinOpen, OpenR2, RatInterval};

/// `n` open intervals of width `1/(4n)` spread over `[0, 1]`, in a
/// scrambled order.
pub fn scattered_pieces(n: usize) -> Vec<RatInterval> {
    let n = n.max(1) as i64;
    (0..n)
        .map(|i| (i * 7919) % n)
        .map(|j| RatInterval::open(rat(4 * j, 4 * n), rat(4 * j + 1, 4 * n)))
        .collect()
}

pub fn middle_third() -> FinClosed {
    FinClosed::new([RatInterval::closed(rat(1, 3), rat(2, 3))])
}

pub fn punctured_half() -> OpenR2 {
    OpenR2::punctured(rat(1, 2))
}

/// `[0, 1] \ {q_n}`.
pub fn rational_complement(n: usize) -> OpenR2 {
    OpenR2::punctured(nth_rational(n as u64))
}

pub fn two_gaps() -> FinOpen {
    FinOpen::new([
        RatInterval::open(rat(-1, 1), rat(1, 5)),
        RatInterval::open(rat(1, 4), rat(3, 5)),
        RatInterval::open(rat(2, 3), rat(2, 1)),
    ])
}
