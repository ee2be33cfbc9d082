//! Rational intervals, exactly presented finite unions, and the sweep kernel
//! that decides cover containment and computes measures without
//! approximation.
//!
//! All set semantics are relative to `[0, 1]`: an open interval `(a, b)`
//! stands for `(a, b) ∩ [0, 1]`, so `(-1, 1/2)` contains `0`.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{Signed, Zero};
use serde::Serialize;

use crate::rational::{fmt_rat, int, max_rat, min_rat, one, zero, Rational};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum IntervalKind {
    Open,
    Closed,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct RatInterval {
    #[serde(with = "crate::rational::serde_rat")]
    pub lo: Rational,
    #[serde(with = "crate::rational::serde_rat")]
    pub hi: Rational,
    pub kind: IntervalKind,
}

impl RatInterval {
    pub fn open(lo: Rational, hi: Rational) -> Self {
        RatInterval { lo, hi, kind: IntervalKind::Open }
    }

    pub fn closed(lo: Rational, hi: Rational) -> Self {
        RatInterval { lo, hi, kind: IntervalKind::Closed }
    }

    /// The canonical empty open interval `(0, 0)`.
    pub fn empty() -> Self {
        RatInterval::open(zero(), zero())
    }

    /// Open ball `(c - r, c + r)`.
    pub fn ball(c: &Rational, r: &Rational) -> Self {
        RatInterval::open(c - r, c + r)
    }

    pub fn is_open(&self) -> bool {
        self.kind == IntervalKind::Open
    }

    /// Empty as a subset of the real line.
    pub fn is_empty(&self) -> bool {
        match self.kind {
            IntervalKind::Open => self.lo >= self.hi,
            IntervalKind::Closed => self.lo > self.hi,
        }
    }

    /// Empty once intersected with `[0, 1]`.
    pub fn is_empty_in_unit(&self) -> bool {
        if self.is_empty() {
            return true;
        }
        match self.kind {
            IntervalKind::Open => self.hi <= zero() || self.lo >= one(),
            IntervalKind::Closed => self.hi < zero() || self.lo > one(),
        }
    }

    /// Membership of a point of `[0, 1]`.
    pub fn contains(&self, q: &Rational) -> bool {
        if q.is_negative() || *q > one() {
            return false;
        }
        match self.kind {
            IntervalKind::Open => self.lo < *q && *q < self.hi,
            IntervalKind::Closed => self.lo <= *q && *q <= self.hi,
        }
    }

    /// Endpoints clipped to `[0, 1]`, or `None` when the intersection is empty.
    pub fn clipped(&self) -> Option<(Rational, Rational)> {
        if self.is_empty_in_unit() {
            return None;
        }
        Some((max_rat(self.lo.clone(), zero()), min_rat(self.hi.clone(), one())))
    }

    pub fn width(&self) -> Rational {
        if self.is_empty() {
            zero()
        } else {
            &self.hi - &self.lo
        }
    }
}

impl fmt::Display for RatInterval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (l, r) = match self.kind {
            IntervalKind::Open => ('(', ')'),
            IntervalKind::Closed => ('[', ']'),
        };
        write!(f, "{l}{}, {}{r}", fmt_rat(&self.lo), fmt_rat(&self.hi))
    }
}

/// Incrementally maintained union of open intervals: disjoint components
/// keyed by left endpoint. Overlapping intervals merge; touching ones do not,
/// since the shared endpoint lies in neither.
#[derive(Debug, Clone, Default)]
pub struct OpenUnion {
    comps: BTreeMap<Rational, Rational>,
}

impl OpenUnion {
    pub fn new() -> Self {
        OpenUnion::default()
    }

    pub fn from_intervals<'a>(pieces: impl IntoIterator<Item = &'a RatInterval>) -> Self {
        let mut u = OpenUnion::new();
        for p in pieces {
            u.insert(p);
        }
        u
    }

    /// Adds an interval. Closed intervals contribute their interior only.
    pub fn insert(&mut self, piece: &RatInterval) {
        self.insert_open(piece.lo.clone(), piece.hi.clone());
    }

    pub fn insert_open(&mut self, mut lo: Rational, mut hi: Rational) {
        if lo >= hi {
            return;
        }
        let overlapping: Vec<Rational> = self
            .comps
            .range(..hi.clone())
            .rev()
            .take_while(|(_, chi)| **chi > lo)
            .map(|(clo, _)| clo.clone())
            .collect();
        for clo in overlapping {
            let chi = self.comps.remove(&clo).expect("component present");
            if clo < lo {
                lo = clo;
            }
            if chi > hi {
                hi = chi;
            }
        }
        self.comps.insert(lo, hi);
    }

    /// The component containing `q` on the real line.
    pub fn component_of(&self, q: &Rational) -> Option<(&Rational, &Rational)> {
        self.comps
            .range(..q.clone())
            .next_back()
            .filter(|(_, hi)| *hi > q)
    }

    pub fn contains(&self, q: &Rational) -> bool {
        !q.is_negative() && *q <= one() && self.component_of(q).is_some()
    }

    /// Whether the closed interval `[a, b]` (with `a <= b`) lies inside the union.
    pub fn covers_segment(&self, a: &Rational, b: &Rational) -> bool {
        match self.component_of(a) {
            Some((_, hi)) => hi > b,
            None => false,
        }
    }

    pub fn covers_closed(&self, target: &FinClosed) -> bool {
        target.pieces().iter().all(|p| self.covers_segment(&p.lo, &p.hi))
    }

    pub fn covers_unit(&self) -> bool {
        self.covers_segment(&zero(), &one())
    }

    pub fn components(&self) -> impl Iterator<Item = (&Rational, &Rational)> {
        self.comps.iter()
    }

    pub fn len(&self) -> usize {
        self.comps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.comps.is_empty()
    }

    pub fn to_fin_open(&self) -> FinOpen {
        FinOpen::new(self.comps.iter().map(|(l, h)| RatInterval::open(l.clone(), h.clone())))
    }
}

/// Finite union of open intervals in normal form: pairwise disjoint,
/// non-empty within `[0, 1]`, sorted, with endpoints outside `[0, 1]`
/// pinned to `-1` and `2` so that equal sets have equal normal forms.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default, Serialize)]
#[serde(transparent)]
pub struct FinOpen {
    pieces: Vec<RatInterval>,
}

impl FinOpen {
    pub fn new(pieces: impl IntoIterator<Item = RatInterval>) -> Self {
        let mut u = OpenUnion::new();
        for p in pieces {
            if !p.is_empty_in_unit() {
                let lo = if p.lo.is_negative() { int(-1) } else { p.lo };
                let hi = if p.hi > one() { int(2) } else { p.hi };
                u.insert_open(lo, hi);
            }
        }
        FinOpen {
            pieces: u
                .comps
                .into_iter()
                .map(|(lo, hi)| RatInterval::open(lo, hi))
                .collect(),
        }
    }

    pub fn empty() -> Self {
        FinOpen::default()
    }

    pub fn full() -> Self {
        FinOpen::new([RatInterval::open(int(-1), int(2))])
    }

    /// `[0, 1]` without the given points.
    pub fn punctured(points: &[Rational]) -> Self {
        let mut cuts: Vec<Rational> = points.to_vec();
        cuts.sort();
        let mut pieces = Vec::new();
        let mut lo = int(-1);
        for c in cuts {
            pieces.push(RatInterval::open(lo, c.clone()));
            lo = c;
        }
        pieces.push(RatInterval::open(lo, int(2)));
        FinOpen::new(pieces)
    }

    pub fn pieces(&self) -> &[RatInterval] {
        &self.pieces
    }

    pub fn is_empty(&self) -> bool {
        self.pieces.is_empty()
    }

    pub fn is_full(&self) -> bool {
        self.to_union().covers_unit()
    }

    pub fn contains(&self, q: &Rational) -> bool {
        self.pieces.iter().any(|p| p.contains(q))
    }

    pub fn to_union(&self) -> OpenUnion {
        OpenUnion::from_intervals(&self.pieces)
    }

    pub fn union(&self, other: &FinOpen) -> FinOpen {
        FinOpen::new(self.pieces.iter().chain(other.pieces.iter()).cloned())
    }

    /// `[0, 1]` minus this set.
    pub fn complement(&self) -> FinClosed {
        let mut gaps = Vec::new();
        let mut cursor = zero();
        for p in &self.pieces {
            if p.lo >= cursor {
                gaps.push(RatInterval::closed(cursor.clone(), p.lo.clone()));
            }
            if p.hi > cursor {
                cursor = p.hi.clone();
            }
        }
        if cursor <= one() {
            gaps.push(RatInterval::closed(cursor, one()));
        }
        FinClosed::new(gaps)
    }

    /// Exact distance from `q` (clamped into `[0, 1]`) to the complement;
    /// `None` when the set is all of `[0, 1]`.
    pub fn dist_to_complement(&self, q: &Rational) -> Option<Rational> {
        self.complement().distance(q)
    }

    pub fn measure(&self) -> Rational {
        measure(&self.pieces)
    }
}

impl fmt::Display for FinOpen {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_pieces(f, &self.pieces)
    }
}

fn write_pieces(f: &mut fmt::Formatter<'_>, pieces: &[RatInterval]) -> fmt::Result {
    if pieces.is_empty() {
        return write!(f, "∅");
    }
    for (i, p) in pieces.iter().enumerate() {
        if i > 0 {
            write!(f, " ∪ ")?;
        }
        write!(f, "{p}")?;
    }
    Ok(())
}

/// Finite union of closed intervals, clipped to `[0, 1]`, disjoint and sorted.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default, Serialize)]
#[serde(transparent)]
pub struct FinClosed {
    pieces: Vec<RatInterval>,
}

impl FinClosed {
    pub fn new(pieces: impl IntoIterator<Item = RatInterval>) -> Self {
        let mut clipped: Vec<(Rational, Rational)> = pieces
            .into_iter()
            .filter_map(|p| RatInterval::closed(p.lo, p.hi).clipped())
            .collect();
        clipped.sort();
        let mut out: Vec<RatInterval> = Vec::new();
        for (lo, hi) in clipped {
            match out.last_mut() {
                Some(last) if lo <= last.hi => {
                    if hi > last.hi {
                        last.hi = hi;
                    }
                }
                _ => out.push(RatInterval::closed(lo, hi)),
            }
        }
        FinClosed { pieces: out }
    }

    pub fn empty() -> Self {
        FinClosed::default()
    }

    pub fn unit() -> Self {
        FinClosed::new([RatInterval::closed(zero(), one())])
    }

    pub fn points(points: &[Rational]) -> Self {
        FinClosed::new(points.iter().map(|p| RatInterval::closed(p.clone(), p.clone())))
    }

    pub fn pieces(&self) -> &[RatInterval] {
        &self.pieces
    }

    pub fn is_empty(&self) -> bool {
        self.pieces.is_empty()
    }

    pub fn contains(&self, q: &Rational) -> bool {
        self.pieces.iter().any(|p| p.contains(q))
    }

    pub fn union(&self, other: &FinClosed) -> FinClosed {
        FinClosed::new(self.pieces.iter().chain(other.pieces.iter()).cloned())
    }

    /// `[0, 1]` minus this set, as open intervals with `-1`/`2` sentinels.
    pub fn complement(&self) -> FinOpen {
        FinOpen::new(self.complement_pieces())
    }

    /// The complement's pieces in order, before normalisation. For
    /// `[1/3, 2/3]` this is `(-1, 1/3), (2/3, 2)`.
    pub fn complement_pieces(&self) -> Vec<RatInterval> {
        let mut out = Vec::new();
        let mut prev = int(-1);
        for p in &self.pieces {
            let gap = RatInterval::open(prev, p.lo.clone());
            if !gap.is_empty_in_unit() {
                out.push(gap);
            }
            prev = p.hi.clone();
        }
        let tail = RatInterval::open(prev, int(2));
        if !tail.is_empty_in_unit() {
            out.push(tail);
        }
        out
    }

    /// Exact distance from `q` to the set; `None` when the set is empty.
    pub fn distance(&self, q: &Rational) -> Option<Rational> {
        self.pieces
            .iter()
            .map(|p| {
                if *q < p.lo {
                    &p.lo - q
                } else if *q > p.hi {
                    q - &p.hi
                } else {
                    zero()
                }
            })
            .min()
    }

    /// The part of this set not covered by `cover`.
    pub fn minus_open(&self, cover: &OpenUnion) -> FinClosed {
        let mut out = Vec::new();
        for p in &self.pieces {
            let mut cursor = p.lo.clone();
            let mut done = false;
            let start = cover
                .component_of(&p.lo)
                .map(|(l, _)| l.clone())
                .unwrap_or_else(|| p.lo.clone());
            for (l, h) in cover.comps.range(start..) {
                if *l > p.hi {
                    break;
                }
                if *h <= cursor {
                    continue;
                }
                if *l >= cursor {
                    out.push(RatInterval::closed(cursor.clone(), l.clone()));
                }
                if *h > p.hi {
                    done = true;
                    break;
                }
                cursor = h.clone();
            }
            if !done {
                out.push(RatInterval::closed(cursor, p.hi.clone()));
            }
        }
        FinClosed::new(out)
    }

    /// A common point of the two sets, if any.
    pub fn common_point(&self, other: &FinClosed) -> Option<Rational> {
        for a in &self.pieces {
            for b in &other.pieces {
                let lo = max_rat(a.lo.clone(), b.lo.clone());
                let hi = min_rat(a.hi.clone(), b.hi.clone());
                if lo <= hi {
                    return Some(lo);
                }
            }
        }
        None
    }

    pub fn measure(&self) -> Rational {
        measure(&self.pieces)
    }
}

impl fmt::Display for FinClosed {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_pieces(f, &self.pieces)
    }
}

/// Whether every point of `target` lies in the union of the open `pieces`.
/// Closed entries of `pieces` contribute only their interiors.
pub fn covers(target: &FinClosed, pieces: &[RatInterval]) -> bool {
    OpenUnion::from_intervals(pieces).covers_closed(target)
}

/// Exact Lebesgue measure of the union of `pieces` within `[0, 1]`.
pub fn measure(pieces: &[RatInterval]) -> Rational {
    let mut clipped: Vec<(Rational, Rational)> = pieces.iter().filter_map(|p| p.clipped()).collect();
    clipped.sort();
    let mut total = zero();
    let mut current: Option<(Rational, Rational)> = None;
    for (lo, hi) in clipped {
        current = match current {
            Some((cl, ch)) if lo <= ch => Some((cl, max_rat(ch, hi))),
            Some((cl, ch)) => {
                total += ch - cl;
                Some((lo, hi))
            }
            None => Some((lo, hi)),
        };
    }
    if let Some((cl, ch)) = current {
        total += ch - cl;
    }
    debug_assert!(!total.is_negative() && total <= one() || total.is_zero());
    total
}
