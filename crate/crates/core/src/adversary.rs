//! Adversarial oracles that refute candidate realisers.
//!
//! A realiser that only ever sees finitely many oracle answers can be fed a
//! second input that agrees with the first on every point it looked at but
//! differs somewhere else. If its answer does not change, that answer is
//! wrong for one of the two inputs. The harnesses here run that argument and
//! emit a checked witness.

use std::cell::RefCell;
use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, Mutex};

use serde::Serialize;

use crate::heine_borel::{hbc_r2, hbc_rm};
use crate::interval::{FinClosed, FinOpen, OpenUnion, RatInterval};
use crate::rational::{half, max_rat, one, rat, serde_rat, tol, zero, Rational};
use crate::real::CauchyReal;
use crate::represent::{inner_radius, ClosedRM, OpenR2, OpenR4, SetKnowledgePincherle};
use crate::Search;

/// Stage at which real queries are snapshotted.
pub const SNAPSHOT_STAGE: u32 = 20;

/// Two snapshots closer than `2^{-IDENTITY_BITS}` are the same query.
pub const IDENTITY_BITS: u32 = 18;

/// Distinct queried points, each with the index of its first arrival.
#[derive(Debug, Clone, Default)]
pub struct ProbeLog {
    by_point: BTreeMap<Rational, usize>,
    exact: HashMap<Rational, usize>,
    order: Vec<Rational>,
}

impl ProbeLog {
    pub fn new() -> Self {
        ProbeLog::default()
    }

    fn snapshot(x: &CauchyReal) -> Rational {
        match x.exact() {
            Some(q) => q.clone(),
            None => x.approx(SNAPSHOT_STAGE),
        }
    }

    /// The index of an earlier query within the identity window, if any.
    pub fn lookup(&self, q: &Rational) -> Option<usize> {
        let w = tol(IDENTITY_BITS);
        let lo = q - &w;
        let hi = q + &w;
        self.by_point
            .range(lo.clone()..)
            .take_while(|(p, _)| **p < hi)
            .find(|(p, _)| **p > lo)
            .map(|(_, &e)| e)
    }

    /// Index for the query `x`, assigning the next one on first sight.
    pub fn index_of(&mut self, x: &CauchyReal) -> usize {
        let q = ProbeLog::snapshot(x);
        if let Some(&e) = self.exact.get(&q) {
            return e;
        }
        if let Some(e) = self.lookup(&q) {
            self.exact.insert(q, e);
            return e;
        }
        let e = self.order.len();
        self.exact.insert(q.clone(), e);
        self.by_point.insert(q.clone(), e);
        self.order.push(q);
        e
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    /// Queried points in arrival order.
    pub fn points(&self) -> &[Rational] {
        &self.order
    }

    /// The ball `(q_e - 2^{-(e+3)}, q_e + 2^{-(e+3)})` handed out for each
    /// query.
    pub fn balls(&self) -> Vec<RatInterval> {
        self.order.iter().enumerate().map(|(e, q)| RatInterval::ball(q, &radius(e))).collect()
    }
}

fn radius(e: usize) -> Rational {
    tol(e as u32 + 3)
}

pub type SharedLog = Arc<Mutex<ProbeLog>>;

/// A presentation of all of `[0, 1]` whose `e`-th distinct query point gets
/// the value `2^{-(e+3)}`. Any finite set of queries certifies balls of
/// total length at most `1/2`.
pub fn adversary_r2_full() -> (OpenR2, SharedLog) {
    let log: SharedLog = Arc::default();
    (adversary_on(&log), log)
}

fn adversary_on(log: &SharedLog) -> OpenR2 {
    let log = log.clone();
    OpenR2::with_backing(FinOpen::full(), move |x, _k| {
        let e = log.lock().expect("probe log poisoned").index_of(x);
        radius(e)
    })
}

/// A checked counterexample: `point` is in the set but outside the answer
/// the realiser gave.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RefutationWitness {
    #[serde(with = "serde_rat")]
    pub point: Rational,
    pub k: usize,
    /// Oracle queries made over both runs.
    pub probes: usize,
    pub verified: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum Verdict {
    Refuted(RefutationWitness),
    Survived { reason: String },
}

impl Verdict {
    pub fn is_refuted(&self) -> bool {
        matches!(self, Verdict::Refuted(_))
    }
}

/// A closed set seen through a logged membership oracle, with its
/// complement code available on request.
#[derive(Debug)]
pub struct ProbedClosed {
    set: FinClosed,
    probes: RefCell<Vec<(Rational, bool)>>,
}

impl ProbedClosed {
    pub fn new(set: FinClosed) -> Self {
        ProbedClosed { set, probes: RefCell::new(Vec::new()) }
    }

    pub fn member(&self, q: &Rational) -> bool {
        let a = self.set.contains(q);
        self.probes.borrow_mut().push((q.clone(), a));
        a
    }

    /// The complement enumeration. Using it is information beyond
    /// membership.
    pub fn rm_code(&self) -> ClosedRM {
        ClosedRM::from_fin_closed(&self.set)
    }

    pub fn probes(&self) -> Vec<(Rational, bool)> {
        self.probes.borrow().clone()
    }
}

/// A candidate finite-sub-cover realiser: given a closed set and a cover of
/// it, the `k` such that cover entries `0..=k` cover the set.
pub trait HbcRealiser {
    fn name(&self) -> String;
    fn answer(&self, c: &ProbedClosed, cover: &OpenR4) -> Option<usize>;
}

/// Probes the grid `j / 2^bits` and answers the least `k` whose prefix
/// covers every grid point found in the set.
#[derive(Debug, Clone, Copy)]
pub struct NaiveGridHbc {
    pub bits: u32,
}

impl HbcRealiser for NaiveGridHbc {
    fn name(&self) -> String {
        format!("naive-grid-{}", self.bits)
    }

    fn answer(&self, c: &ProbedClosed, cover: &OpenR4) -> Option<usize> {
        let n = 1i64 << self.bits;
        let inside: Vec<Rational> = (0..=n).map(|j| rat(j, n)).filter(|q| c.member(q)).collect();
        let mut union = OpenUnion::new();
        for k in 0..100_000 {
            union.insert(&cover.entry(k));
            if inside.iter().all(|q| union.contains(q)) {
                return Some(k);
            }
        }
        None
    }
}

/// Answers a fixed `k` without looking.
#[derive(Debug, Clone, Copy)]
pub struct ConstantHbc(pub usize);

impl HbcRealiser for ConstantHbc {
    fn name(&self) -> String {
        format!("constant-{}", self.0)
    }

    fn answer(&self, _c: &ProbedClosed, _cover: &OpenR4) -> Option<usize> {
        Some(self.0)
    }
}

/// Never answers.
#[derive(Debug, Clone, Copy)]
pub struct RefusingHbc;

impl HbcRealiser for RefusingHbc {
    fn name(&self) -> String {
        "refuse".into()
    }

    fn answer(&self, _c: &ProbedClosed, _cover: &OpenR4) -> Option<usize> {
        None
    }
}

/// Reads the complement code and runs the sub-cover search on it.
#[derive(Debug, Clone, Copy)]
pub struct RmCodeHbc {
    pub fuel: u64,
}

impl HbcRealiser for RmCodeHbc {
    fn name(&self) -> String {
        "rm-code".into()
    }

    fn answer(&self, c: &ProbedClosed, cover: &OpenR4) -> Option<usize> {
        hbc_rm(&c.rm_code(), cover, self.fuel).found().map(|cert| cert.n0)
    }
}

/// Whether some entry among `0..=k` contains `x`.
fn prefix_contains(cover: &OpenR4, k: usize, x: &Rational) -> bool {
    (0..=k).any(|n| cover.entry(n).contains(x))
}

/// Runs `beta` on `[1/3, 2/3]` with the cover `(1/(n+2), 1)`, picks an
/// unprobed rational `x` in `(0, 1/(k+2))`, and runs `beta` again on the
/// set with `x` added. Membership answers on the first run's probes are
/// unchanged. If the second answer leaves `x` uncovered it is refuted.
pub fn adversary_hbc(beta: &dyn HbcRealiser) -> Verdict {
    let d = FinClosed::new([RatInterval::closed(rat(1, 3), rat(2, 3))]);
    let cover = OpenR4::tail_cover();
    let first = ProbedClosed::new(d.clone());
    let Some(k) = beta.answer(&first, &cover) else {
        return Verdict::Survived { reason: "no answer".into() };
    };
    let probed: Vec<Rational> = first.probes().into_iter().map(|(q, _)| q).collect();
    let x = (0u64..)
        .map(|j| Rational::new(1.into(), (k as u64 + 3 + j).into()))
        .find(|q| !probed.contains(q))
        .expect("only finitely many probes");
    let widened = d.union(&FinClosed::points(std::slice::from_ref(&x)));
    let second = ProbedClosed::new(widened.clone());
    let again = beta.answer(&second, &cover);
    let replay = second.probes();
    let probes = probed.len() + replay.len();
    if replay.iter().any(|(q, _)| *q == x) {
        return Verdict::Survived { reason: "probed the new point".into() };
    }
    let Some(k2) = again else {
        return Verdict::Survived { reason: "no answer on the second run".into() };
    };
    if prefix_contains(&cover, k2, &x) {
        return Verdict::Survived { reason: format!("answer changed to {k2}") };
    }
    let verified = widened.contains(&x) && !prefix_contains(&cover, k2, &x);
    Verdict::Refuted(RefutationWitness { point: x, k: k2, probes, verified })
}

/// A candidate realiser for covers of `[0, 1]` by radius-presented sets:
/// the `k` such that sets `0..=k` cover.
pub trait R2CoverRealiser {
    fn name(&self) -> String;
    fn answer(&self, sets: &dyn Fn(usize) -> OpenR2) -> Option<usize>;
}

/// Queries the grid `j / 2^bits` in each set in turn and answers the first
/// set reporting a positive value at every grid point.
#[derive(Debug, Clone, Copy)]
pub struct NaiveGridCover {
    pub bits: u32,
    pub max_sets: usize,
}

impl R2CoverRealiser for NaiveGridCover {
    fn name(&self) -> String {
        format!("naive-grid-{}", self.bits)
    }

    fn answer(&self, sets: &dyn Fn(usize) -> OpenR2) -> Option<usize> {
        let n = 1i64 << self.bits;
        (0..self.max_sets).find(|&i| {
            let y = sets(i);
            (0..=n).all(|j| y.value_at(&rat(j, n), 0) > zero())
        })
    }
}

/// Queries the grid and answers the first `k` whose certified balls, over
/// sets `0..=k`, cover `[0, 1]`.
#[derive(Debug, Clone, Copy)]
pub struct CertifiedGridCover {
    pub bits: u32,
    pub max_sets: usize,
}

impl R2CoverRealiser for CertifiedGridCover {
    fn name(&self) -> String {
        format!("certified-grid-{}", self.bits)
    }

    fn answer(&self, sets: &dyn Fn(usize) -> OpenR2) -> Option<usize> {
        let n = 1i64 << self.bits;
        let mut union = OpenUnion::new();
        for i in 0..self.max_sets {
            let y = sets(i);
            for j in 0..=n {
                let q = rat(j, n);
                if let Search::Found(l) = inner_radius(&y, &CauchyReal::constant(q.clone()), 64) {
                    union.insert(&RatInterval::ball(&q, &l));
                }
            }
            if union.covers_unit() {
                return Some(i);
            }
        }
        None
    }
}

/// Converts every set to a stream with the set-knowledge Pincherle oracle and
/// runs the interleaved sub-cover search.
#[derive(Debug, Clone, Copy)]
pub struct PsiPipelineCover {
    pub fuel: u64,
}

impl R2CoverRealiser for PsiPipelineCover {
    fn name(&self) -> String {
        "psi-pipeline".into()
    }

    fn answer(&self, sets: &dyn Fn(usize) -> OpenR2) -> Option<usize> {
        match hbc_r2(sets, SetKnowledgePincherle, self.fuel) {
            Ok(Search::Found(c)) => Some(c.k),
            _ => None,
        }
    }
}

/// Never answers.
#[derive(Debug, Clone, Copy)]
pub struct RefusingCover;

impl R2CoverRealiser for RefusingCover {
    fn name(&self) -> String {
        "refuse".into()
    }

    fn answer(&self, _sets: &dyn Fn(usize) -> OpenR2) -> Option<usize> {
        None
    }
}

/// Midpoint of the longest stretch of `[0, 1]` outside every ball handed
/// out, with balls padded to the query identity window.
fn unprobed_point(log: &ProbeLog) -> Rational {
    let pad = tol(IDENTITY_BITS - 1);
    let balls: Vec<RatInterval> = log
        .balls()
        .into_iter()
        .map(|b| {
            let c = (&b.lo + &b.hi) * half();
            let r = max_rat(&b.hi - &c, pad.clone());
            RatInterval::ball(&c, &r)
        })
        .collect();
    let rest = FinClosed::unit().minus_open(&OpenUnion::from_intervals(&balls));
    rest.pieces()
        .iter()
        .max_by(|a, b| a.width().cmp(&b.width()))
        .map(|p| (&p.lo + &p.hi) * half())
        .unwrap_or_else(half)
}

/// Feeds `beta` the constant family of [`adversary_r2_full`] oracles on one
/// shared log. On an answer `k`, picks a point `p` outside every ball handed
/// out, removes it from sets `0..=k+1`, and replays on the same log, so every
/// earlier query gets the same answer. If `beta` answers some `k' ≤ k + 1`
/// again, `p` is uncovered.
pub fn adversary_r2_cover(beta: &dyn R2CoverRealiser) -> Verdict {
    let log: SharedLog = Arc::default();
    let base = adversary_on(&log);
    let plain = |_: usize| base.clone();
    let Some(k) = beta.answer(&plain) else {
        return Verdict::Survived { reason: "no answer".into() };
    };
    let p = unprobed_point(&log.lock().expect("probe log poisoned"));
    let holed = base.without_point(&p);
    let modified = |i: usize| if i <= k + 1 { holed.clone() } else { base.clone() };
    let before = log.lock().expect("probe log poisoned").len();
    let again = beta.answer(&modified);
    let probes = log.lock().expect("probe log poisoned").len().max(before);
    let Some(k2) = again else {
        return Verdict::Survived { reason: "no answer on the second run".into() };
    };
    if k2 > k + 1 {
        return Verdict::Survived { reason: format!("answer changed to {k2}") };
    }
    let verified = (0..=k2).all(|i| {
        let y = modified(i);
        !y.backing().expect("adversary sets are backed").set.contains(&p)
    }) && FinOpen::full().contains(&p);
    Verdict::Refuted(RefutationWitness { point: p, k: k2, probes, verified })
}

/// Total length, within `[0, 1]`, of the balls handed out so far.
pub fn handed_out_measure(log: &ProbeLog) -> Rational {
    crate::interval::measure(&log.balls())
}

/// Upper bound on [`handed_out_measure`] after `n` distinct queries.
pub fn measure_ceiling(n: usize) -> Rational {
    half() * (one() - tol(n.min(u32::MAX as usize) as u32))
}
