//! Finite sub-covers of countable covers.
//!
//! "`C` lies inside finitely many cover pieces" is only semi-decidable when
//! `C` is given by an enumeration of its complement. At stage `m` the search
//! asks instead whether `[0, 1]` is covered by the first cover pieces
//! together with the first complement pieces; that question is decided
//! exactly by the sweep, it is sound, and it eventually succeeds whenever a
//! finite sub-cover exists.

use serde::Serialize;

use crate::enumerate::{pair, unpair};
use crate::error::Error;
use crate::interval::{covers, measure, FinClosed, OpenUnion, RatInterval};
use crate::rational::{serde_rat, tol, Rational};
use crate::real::CauchyReal;
use crate::represent::{psi, ClosedRM, OpenR2, OpenR4, PincherleOracle};
use crate::Search;

/// A verified finite sub-cover.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SubcoverCertificate {
    /// Cover entries `0..=n0` suffice.
    pub n0: usize,
    /// The non-empty cover entries among `0..=n0`.
    pub used_pieces: Vec<RatInterval>,
    /// The complement entries that discharge the rest of `[0, 1]`.
    pub complement_pieces: Vec<RatInterval>,
    pub verified: bool,
}

impl SubcoverCertificate {
    /// Re-runs the exact cover check from the recorded pieces.
    pub fn check(&self) -> bool {
        let all: Vec<RatInterval> =
            self.used_pieces.iter().chain(&self.complement_pieces).cloned().collect();
        covers(&FinClosed::unit(), &all)
    }
}

fn non_empty(pieces: impl IntoIterator<Item = RatInterval>) -> Vec<RatInterval> {
    pieces.into_iter().filter(|p| !p.is_empty_in_unit()).collect()
}

/// Searches stages `m = 0, 1, …` below `fuel` for the first one at which
/// cover entries `0..=m` and complement entries `0..=m` cover `[0, 1]`, then
/// reports the least `n0 ≤ m` that still works with those complement entries.
pub fn hbc_rm(c: &ClosedRM, cover: &OpenR4, fuel: u64) -> Search<SubcoverCertificate> {
    let mut next = |n: usize| Ok::<_, Error>(cover.entry(n));
    match hbc_core(c.complement(), &mut next, fuel) {
        Ok(s) => s,
        Err(_) => unreachable!("infallible cover stream"),
    }
}

fn hbc_core(
    complement: &OpenR4,
    cover: &mut dyn FnMut(usize) -> Result<RatInterval, Error>,
    fuel: u64,
) -> Result<Search<SubcoverCertificate>, Error> {
    let mut seen = Vec::new();
    let mut comp = Vec::new();
    let mut union = OpenUnion::new();
    for m in 0..fuel as usize {
        let piece = cover(m)?;
        union.insert(&piece);
        seen.push(piece);
        let gap = complement.entry(m);
        union.insert(&gap);
        comp.push(gap);
        if !union.covers_unit() {
            continue;
        }
        let complement_pieces = non_empty(comp.iter().cloned());
        let mut base = OpenUnion::from_intervals(&complement_pieces);
        let mut n0 = m;
        for (n, p) in seen.iter().enumerate() {
            base.insert(p);
            if base.covers_unit() {
                n0 = n;
                break;
            }
        }
        let mut cert = SubcoverCertificate {
            n0,
            used_pieces: non_empty(seen[..=n0].iter().cloned()),
            complement_pieces,
            verified: false,
        };
        cert.verified = cert.check();
        if !cert.verified {
            return Err(Error::Invariant("sub-cover certificate failed its re-check".into()));
        }
        return Ok(Search::Found(cert));
    }
    Ok(Search::Exhausted)
}

/// Answer of [`hbc_r2`] and [`hbc_seq`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SetsCover {
    /// Sets `0..=k` cover `[0, 1]`.
    pub k: usize,
    /// Pieces drawn from those sets, with the index of the set each came from.
    pub pieces: Vec<(usize, RatInterval)>,
    pub verified: bool,
}

/// Least `k` such that pieces from sets `0..=k` in `pieces` cover `[0, 1]`.
fn least_sets(pieces: &[(usize, RatInterval)]) -> Option<SetsCover> {
    let top = pieces.iter().map(|(i, _)| *i).max()?;
    for k in 0..=top {
        let chosen: Vec<(usize, RatInterval)> =
            pieces.iter().filter(|(i, _)| *i <= k).cloned().collect();
        let plain: Vec<RatInterval> = chosen.iter().map(|(_, p)| p.clone()).collect();
        if covers(&FinClosed::unit(), &plain) {
            return Some(SetsCover { k, pieces: chosen, verified: true });
        }
    }
    None
}

/// Converts each set through [`psi`], interleaves the streams by the Cantor
/// pairing (flat entry `pair(i, e)` is entry `e` of set `i`), searches for a
/// finite sub-cover of `[0, 1]`, and reports the least set index `k` whose
/// pieces already suffice.
pub fn hbc_r2<M>(
    sets: &dyn Fn(usize) -> OpenR2,
    mu: M,
    fuel: u64,
) -> Result<Search<SetsCover>, Error>
where
    M: PincherleOracle + Clone + Send + Sync + 'static,
{
    let mut streams: Vec<OpenR4> = Vec::new();
    let mut pieces: Vec<(usize, RatInterval)> = Vec::new();
    let mut next = |t: usize| -> Result<RatInterval, Error> {
        let (i, e) = unpair(t as u64);
        let i = i as usize;
        while streams.len() <= i {
            streams.push(psi(&sets(streams.len()), mu.clone())?);
        }
        let p = streams[i].entry(e as usize);
        if !p.is_empty_in_unit() {
            pieces.push((i, p.clone()));
        }
        Ok(p)
    };
    let found = hbc_core(&OpenR4::from_pieces(Vec::new()), &mut next, fuel)?;
    Ok(match found {
        Search::Found(_) => least_sets(&pieces).into(),
        Search::Exhausted => Search::Exhausted,
    })
}

/// Dovetails the streams (`t = pair(n, i)` draws entry `i` of set `n`) until
/// the pieces drawn cover `[0, 1]`, then reports the least `k` such that the
/// drawn pieces of sets `0..=k` cover.
pub fn hbc_seq(sets: &dyn Fn(usize) -> OpenR4, fuel: u64) -> Search<SetsCover> {
    let mut streams: Vec<OpenR4> = Vec::new();
    let mut pieces = Vec::new();
    let mut union = OpenUnion::new();
    for t in 0..fuel {
        let (n, i) = unpair(t);
        let n = n as usize;
        while streams.len() <= n {
            streams.push(sets(streams.len()));
        }
        let p = streams[n].entry(i as usize);
        if p.is_empty_in_unit() {
            continue;
        }
        union.insert(&p);
        pieces.push((n, p));
        if union.covers_unit() {
            return least_sets(&pieces).into();
        }
    }
    Search::Exhausted
}

/// Answer of [`whbc`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct WhbcCertificate {
    pub n0: usize,
    pub patches: Vec<RatInterval>,
    /// Total length of the patches, below the budget.
    #[serde(with = "serde_rat")]
    pub patch_length: Rational,
    /// The closed superset of `C` that was certified covered.
    pub covered: FinClosed,
    pub verified: bool,
}

/// Search over `t = pair(n, d)`: take cover entries `0..=n` and complement
/// entries `0..=t`, pad every piece of the uncovered remainder by `2^{-d}`,
/// and accept when the padding's total length is below `epsilon`.
pub fn whbc(
    c: &ClosedRM,
    cover: &OpenR4,
    epsilon: &Rational,
    fuel: u64,
) -> Search<WhbcCertificate> {
    for t in 0..fuel {
        let (n, d) = unpair(t);
        let (n, d) = (n as usize, d.min(u32::MAX as u64) as u32);
        let outer = c.outer(t as usize + 1);
        let cover_pieces = cover.prefix(n + 1);
        let remainder = outer.minus_open(&OpenUnion::from_intervals(&cover_pieces));
        let pad = tol(d);
        let patches = merge_padded(remainder.pieces(), &pad);
        let patch_length: Rational = patches.iter().map(RatInterval::width).sum();
        if patch_length >= *epsilon {
            continue;
        }
        let all: Vec<RatInterval> =
            cover_pieces.iter().chain(&patches).cloned().collect();
        let verified = covers(&outer, &all);
        if !verified {
            continue;
        }
        return Search::Found(WhbcCertificate {
            n0: n,
            patches,
            patch_length,
            covered: outer,
            verified,
        });
    }
    Search::Exhausted
}

/// Pads each (sorted, disjoint) piece by `pad` on both sides and merges
/// overlaps, keeping the raw endpoints.
fn merge_padded(pieces: &[RatInterval], pad: &Rational) -> Vec<RatInterval> {
    let mut out: Vec<RatInterval> = Vec::new();
    for p in pieces {
        let (lo, hi) = (&p.lo - pad, &p.hi + pad);
        match out.last_mut() {
            Some(last) if lo < last.hi => last.hi = hi,
            _ => out.push(RatInterval::open(lo, hi)),
        }
    }
    out
}

/// The rational interval `(lo~ + 2^{-k}, hi~ - 2^{-k})` built from stage-`k`
/// approximations: contained in `(lo, hi)`.
pub fn rational_surrogate(lo: &CauchyReal, hi: &CauchyReal, k: u32) -> RatInterval {
    let pad = tol(k);
    RatInterval::open(lo.approx(k) + &pad, hi.approx(k) - &pad)
}

/// A rational cover for a cover with real endpoints: entry `pair(n, k)` is
/// the stage-`k` surrogate of interval `n`. Its union is the union of the
/// original intervals.
pub fn surrogate_cover(
    intervals: impl Fn(usize) -> (CauchyReal, CauchyReal) + Send + Sync + 'static,
) -> OpenR4 {
    OpenR4::from_fn(move |t| {
        let (n, k) = unpair(t as u64);
        let (lo, hi) = intervals(n as usize);
        rational_surrogate(&lo, &hi, k.min(u32::MAX as u64 - 1) as u32)
    })
}

/// Flat index of entry `e` of set `i` in the interleaving used by [`hbc_r2`].
pub fn interleaved_index(i: usize, e: usize) -> usize {
    pair(i as u64, e as u64) as usize
}

/// Measure of the patches of a [`WhbcCertificate`], clipped to `[0, 1]`.
pub fn patch_measure(cert: &WhbcCertificate) -> Rational {
    measure(&cert.patches)
}
