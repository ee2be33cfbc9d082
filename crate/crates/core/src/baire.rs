//! Points in countable intersections of dense open sets.
//!
//! [`baire_point`] is the direct nested-interval search. The rest of the
//! module simulates, one finite step at a time, the inductive machine that
//! grows a totally ordered family of attempts (nested chains of tags) and
//! backs off by halving a radius whenever the limit of the current attempt
//! is found outside one of the sets.

use std::fmt;
use std::io::Write;

use serde::Serialize;

use crate::enumerate::{first_in_open, ScanResult};
use crate::rational::{fmt_rat, half, max_rat, min_rat, one, serde_rat, tol, zero, Rational};
use crate::real::CauchyReal;
use crate::represent::{inner_radius, OpenR2, CERTIFY_STAGES};
use crate::Search;

/// A centre and a radius.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct Tag {
    #[serde(with = "serde_rat")]
    pub r: Rational,
    #[serde(with = "serde_rat")]
    pub eps: Rational,
}

impl Tag {
    pub fn new(r: Rational, eps: Rational) -> Self {
        Tag { r, eps }
    }

    pub fn lo(&self) -> Rational {
        &self.r - &self.eps
    }

    pub fn hi(&self) -> Rational {
        &self.r + &self.eps
    }

    /// `[r - eps, r + eps] ⊆ (outer.r - outer.eps, outer.r + outer.eps)`.
    pub fn closed_inside_open(&self, outer: &Tag) -> bool {
        self.lo() > outer.lo() && self.hi() < outer.hi()
    }
}

impl fmt::Display for Tag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", fmt_rat(&self.r), fmt_rat(&self.eps))
    }
}

/// `t1 ≺ t2`: same centre and `t1.eps ≥ 2 t2.eps`.
pub fn tag_prec(t1: &Tag, t2: &Tag) -> bool {
    t1.r == t2.r && t1.eps >= &t2.eps + &t2.eps
}

/// A non-empty chain of tags, each closed tag inside the previous open one
/// with at most half its radius.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
#[serde(transparent)]
pub struct Attempt {
    pub tags: Vec<Tag>,
}

impl Attempt {
    pub fn new(tags: Vec<Tag>) -> Self {
        Attempt { tags }
    }

    pub fn len(&self) -> usize {
        self.tags.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tags.is_empty()
    }

    pub fn last(&self) -> Option<&Tag> {
        self.tags.last()
    }

    /// Index of the first link breaking nesting or halving, if any.
    pub fn violation(&self) -> Option<usize> {
        if self.tags.is_empty() {
            return Some(0);
        }
        self.tags
            .windows(2)
            .position(|w| !w[1].closed_inside_open(&w[0]) || w[0].eps < &w[1].eps + &w[1].eps)
            .map(|i| i + 1)
    }

    pub fn is_valid(&self) -> bool {
        self.violation().is_none() && self.tags.iter().all(|t| t.eps > zero())
    }
}

impl fmt::Display for Attempt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("[")?;
        for (i, t) in self.tags.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{t}")?;
        }
        f.write_str("]")
    }
}

/// `s ◁ t`: `s` is a proper initial segment of `t`, or at the first index
/// where they differ the tag of `s` is `≺` the tag of `t`.
pub fn attempt_before(s: &Attempt, t: &Attempt) -> bool {
    for (a, b) in s.tags.iter().zip(&t.tags) {
        if a != b {
            return tag_prec(a, b);
        }
    }
    s.len() < t.len()
}

/// The real `x` with `x.approx(n)` the centre of the first tag whose radius
/// is at most `2^{-n-1}`, or the last centre when the chain is too short.
pub fn chain_limit(chain: &[Tag]) -> CauchyReal {
    let tags = chain.to_vec();
    CauchyReal::from_fn(move |n| {
        let bound = tol(n + 1);
        tags.iter()
            .find(|t| t.eps <= bound)
            .or(tags.last())
            .map(|t| t.r.clone())
            .unwrap_or_else(zero)
    })
}

#[derive(Debug, Clone)]
pub enum Audit {
    Pass(CauchyReal),
    /// The least index whose membership did not certify.
    Fail(usize),
}

/// Certifies membership of the chain's limit in `sets(0..=depth)`, each with
/// a stage budget of `fuel`.
pub fn limit_audit(chain: &[Tag], sets: &dyn Fn(usize) -> OpenR2, depth: usize, fuel: u32) -> Audit {
    let x = chain_limit(chain);
    for i in 0..=depth {
        if !inner_radius(&sets(i), &x, fuel).is_found() {
            return Audit::Fail(i);
        }
    }
    Audit::Pass(x)
}

/// Whether `[r - eps, r + eps] ∩ [0, 1]` lies inside `(r - y, r + y)`.
fn inside_certified(r: &Rational, eps: &Rational, y: &Rational) -> bool {
    let lo = max_rat(r - eps, zero());
    let hi = min_rat(r + eps, one());
    lo > r - y && hi < r + y
}

/// The largest `2^{-j}`, `j` scanning upward from 0, such that the tag at `r`
/// is nested in `outer` with at most half its radius and, when `y` is
/// given, sits in the certified ball of radius `y`.
fn choose_eps(r: &Rational, outer: Option<&Tag>, y: Option<&Rational>, max_j: u32) -> Option<Rational> {
    for j in 0..=max_j {
        let eps = tol(j);
        let tag = Tag::new(r.clone(), eps.clone());
        let nested = outer.map_or(true, |o| &eps + &eps <= o.eps && tag.closed_inside_open(o));
        let certified = y.map_or(true, |y| inside_certified(r, &eps, y));
        if nested && certified {
            return Some(eps);
        }
    }
    None
}

/// A finite piece of the nested-interval construction.
#[derive(Debug, Clone)]
pub struct BairePoint {
    pub x: CauchyReal,
    pub nest: Vec<Tag>,
    /// The certified radius of `sets(m)` at the `m`-th centre.
    pub radii: Vec<Rational>,
}

/// Tag `m` is centred at the first enumerated rational in the previous open
/// tag (in `[0, 1]` for `m = 0`) with a certified radius in `sets(m)`; its
/// radius is the largest dyadic keeping it nested, halving, and inside that
/// certified ball. Stops once the radius is at most `2^{-k-1}` and at least
/// `k + 2` sets have been visited. `fuel` bounds each rational search.
pub fn baire_point(sets: &dyn Fn(usize) -> OpenR2, k: u32, fuel: u64) -> Search<BairePoint> {
    let target = tol(k + 1);
    let mut nest: Vec<Tag> = Vec::new();
    let mut radii = Vec::new();
    for m in 0.. {
        let y = sets(m);
        let (lo, hi) = match nest.last() {
            Some(t) => (t.lo(), t.hi()),
            None => (-one(), one() + one()),
        };
        let mut radius = None;
        let found = first_in_open(&lo, &hi, fuel, |q| {
            match inner_radius(&y, &CauchyReal::constant(q.clone()), CERTIFY_STAGES) {
                Search::Found(l) => {
                    radius = Some(l);
                    true
                }
                Search::Exhausted => false,
            }
        });
        let ScanResult::Found(r) = found else {
            return Search::Exhausted;
        };
        let l = radius.expect("accepted candidates carry a radius");
        let Some(eps) = choose_eps(&r, nest.last(), Some(&l), CERTIFY_STAGES + k + 8) else {
            return Search::Exhausted;
        };
        let done = eps <= target && m > k as usize;
        nest.push(Tag::new(r, eps));
        radii.push(l);
        if done {
            break;
        }
    }
    let x = chain_limit(&nest);
    Search::Found(BairePoint { x, nest, radii })
}

/// Checks a nest returned by [`baire_point`] against its sets: nesting,
/// halving, positive radii, and each closed tag inside the certified ball.
pub fn check_nest(point: &BairePoint) -> Result<(), String> {
    for (m, (t, y)) in point.nest.iter().zip(&point.radii).enumerate() {
        if t.eps <= zero() {
            return Err(format!("tag {m} has non-positive radius"));
        }
        if !inside_certified(&t.r, &t.eps, y) {
            return Err(format!("tag {m} leaves its certified ball"));
        }
    }
    match Attempt::new(point.nest.clone()).violation() {
        Some(m) => Err(format!("tag {m} breaks nesting or halving")),
        None => Ok(()),
    }
}

/// Budgets of the machine simulation.
#[derive(Debug, Clone)]
pub struct MachineConfig {
    /// Fuel of each rational search, and the per-length attempt count above
    /// which the "infinitely many attempts" case is reported.
    pub fuel: u64,
    /// Stage budget for certifying membership.
    pub certify_stages: u32,
    /// Audit the maximal attempt every time it gains this many tags.
    pub audit_every: usize,
    /// Also keep each new closed tag inside the certified ball of its set.
    /// Off is the literal machine, which relies on audits and halving.
    pub certified_radius: bool,
}

impl Default for MachineConfig {
    fn default() -> Self {
        MachineConfig { fuel: 100_000, certify_stages: CERTIFY_STAGES, audit_every: 8, certified_radius: false }
    }
}

#[derive(Debug, Clone)]
pub enum Status {
    Running,
    Fixed(CauchyReal),
    Stuck(String),
}

/// The attempts produced so far, in insertion order.
#[derive(Debug, Clone)]
pub struct MachineState {
    pub attempts: Vec<Attempt>,
    pub status: Status,
    /// Length at which the maximal attempt is next audited.
    pub next_audit: usize,
}

impl MachineState {
    pub fn new(audit_every: usize) -> Self {
        MachineState { attempts: Vec::new(), status: Status::Running, next_audit: audit_every.max(1) }
    }

    pub fn is_running(&self) -> bool {
        matches!(self.status, Status::Running)
    }
}

/// What one step did.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "case", rename_all = "snake_case")]
pub enum Case {
    /// o) the attempts are not totally ordered.
    NotOrdered,
    /// i) the first attempt.
    Seed,
    /// ii) the maximal attempt gained a tag.
    Extend,
    /// iii) more than `fuel` attempts of one length.
    TooMany { len: usize },
    /// iv).2 the limit left set `k`; tag `k` had its radius halved.
    Halve { k: usize },
    /// A search ran out of fuel.
    Exhausted,
    /// Nothing to do: the state is no longer running.
    Idle,
}

impl Case {
    pub fn label(&self) -> &'static str {
        match self {
            Case::NotOrdered => "o",
            Case::Seed => "i",
            Case::Extend => "ii",
            Case::TooMany { .. } => "iii",
            Case::Halve { .. } => "iv.2",
            Case::Exhausted => "exhausted",
            Case::Idle => "idle",
        }
    }
}

/// The ◁-maximal attempt, or `None` when the attempts are not totally ordered.
fn maximal(attempts: &[Attempt]) -> Option<usize> {
    if attempts.windows(2).all(|w| attempt_before(&w[0], &w[1])) {
        return attempts.len().checked_sub(1);
    }
    for (i, a) in attempts.iter().enumerate() {
        for b in &attempts[i + 1..] {
            if a == b || !(attempt_before(a, b) || attempt_before(b, a)) {
                return None;
            }
        }
    }
    (0..attempts.len()).find(|&i| {
        attempts.iter().enumerate().all(|(j, b)| i == j || attempt_before(b, &attempts[i]))
    })
}

fn first_certified(
    y: &OpenR2,
    lo: &Rational,
    hi: &Rational,
    cfg: &MachineConfig,
) -> Option<(Rational, Rational)> {
    let mut radius = None;
    match first_in_open(lo, hi, cfg.fuel, |q| {
        match inner_radius(y, &CauchyReal::constant(q.clone()), cfg.certify_stages) {
            Search::Found(l) => {
                radius = Some(l);
                true
            }
            Search::Exhausted => false,
        }
    }) {
        ScanResult::Found(r) => Some((r, radius.expect("accepted candidates carry a radius"))),
        ScanResult::Exhausted { .. } => None,
    }
}

/// One application of the operator. Tag `i` (counting from 1) is drawn from
/// `sets(i)`; `sets(0)` is never consulted.
pub fn gamma_step(
    state: &MachineState,
    sets: &dyn Fn(usize) -> OpenR2,
    cfg: &MachineConfig,
) -> (MachineState, Case) {
    let mut next = state.clone();
    if !state.is_running() {
        return (next, Case::Idle);
    }
    if state.attempts.is_empty() {
        return match first_certified(&sets(1), &-one(), &(one() + one()), cfg) {
            Some((r, _)) => {
                next.attempts.push(Attempt::new(vec![Tag::new(r, one())]));
                (next, Case::Seed)
            }
            None => {
                next.status = Status::Stuck("frontier search exhausted".into());
                (next, Case::Exhausted)
            }
        };
    }
    let Some(top) = maximal(&state.attempts) else {
        next.status = Status::Stuck("not totally ordered".into());
        return (next, Case::NotOrdered);
    };
    let mut per_len = std::collections::HashMap::new();
    for a in &state.attempts {
        *per_len.entry(a.len()).or_insert(0u64) += 1;
    }
    if let Some((&len, _)) = per_len.iter().filter(|(_, &c)| c > cfg.fuel).min_by_key(|(l, _)| **l) {
        next.status = Status::Stuck(format!("more than {} attempts of length {len}", cfg.fuel));
        return (next, Case::TooMany { len });
    }
    let current = &state.attempts[top];
    if current.len() >= state.next_audit {
        let shifted = |i: usize| sets(i + 1);
        match limit_audit(&current.tags, &shifted, current.len() - 1, cfg.certify_stages) {
            Audit::Fail(i) => {
                let k = i + 1;
                let mut tags = current.tags[..k].to_vec();
                let last = tags.last_mut().expect("k >= 1");
                last.eps = &last.eps * half();
                next.attempts.push(Attempt::new(tags));
                return (next, Case::Halve { k });
            }
            Audit::Pass(_) => next.next_audit = current.len() + cfg.audit_every.max(1),
        }
    }
    let last = current.last().expect("attempts are non-empty");
    let y = sets(current.len() + 1);
    let Some((r, l)) = first_certified(&y, &last.lo(), &last.hi(), cfg) else {
        next.status = Status::Stuck("frontier search exhausted".into());
        return (next, Case::Exhausted);
    };
    let certified = cfg.certified_radius.then_some(&l);
    let max_j = cfg.certify_stages + current.len() as u32 + 8;
    let Some(eps) = choose_eps(&r, Some(last), certified, max_j) else {
        next.status = Status::Stuck("no admissible radius".into());
        return (next, Case::Exhausted);
    };
    let mut tags = current.tags.clone();
    tags.push(Tag::new(r, eps));
    next.attempts.push(Attempt::new(tags));
    (next, Case::Extend)
}

/// Outcome of [`run_machine`].
#[derive(Debug, Clone)]
pub struct MachineRun {
    pub state: MachineState,
    pub cases: Vec<Case>,
}

/// Runs `steps` applications of [`gamma_step`] from the empty state, writing
/// `step<TAB>case<TAB>attempt` per step to `trace`. A final audit of the
/// maximal attempt to `final_depth` sets the status to `Fixed` on success.
pub fn run_machine(
    sets: &dyn Fn(usize) -> OpenR2,
    cfg: &MachineConfig,
    steps: usize,
    final_depth: usize,
    mut trace: Option<&mut dyn Write>,
) -> std::io::Result<MachineRun> {
    let mut state = MachineState::new(cfg.audit_every);
    let mut cases = Vec::new();
    for step in 0..steps {
        let (next, case) = gamma_step(&state, sets, cfg);
        state = next;
        if let Some(w) = trace.as_deref_mut() {
            let shown = state.attempts.last().map(|a| a.to_string()).unwrap_or_default();
            writeln!(w, "{step}\t{}\t{shown}", case.label())?;
        }
        let stop = !state.is_running();
        cases.push(case);
        if stop {
            break;
        }
    }
    if state.is_running() {
        if let Some(top) = maximal(&state.attempts) {
            let chain = state.attempts[top].tags.clone();
            let depth = final_depth.min(chain.len().saturating_sub(1));
            let shifted = |i: usize| sets(i + 1);
            if let Audit::Pass(x) = limit_audit(&chain, &shifted, depth, cfg.certify_stages) {
                state.status = Status::Fixed(x);
            }
        }
    }
    Ok(MachineRun { state, cases })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::enumerate::nth_rational;
    use crate::rational::{abs_diff, rat};

    fn t(r: Rational, e: Rational) -> Tag {
        Tag::new(r, e)
    }

    fn punctured(n: usize) -> OpenR2 {
        OpenR2::punctured(nth_rational(n as u64))
    }

    #[test]
    fn tag_order_examples() {
        assert!(tag_prec(&t(rat(1, 2), one()), &t(rat(1, 2), rat(1, 2))));
        assert!(!tag_prec(&t(rat(1, 2), one()), &t(rat(1, 3), rat(1, 2))));
        assert!(!tag_prec(&t(rat(1, 2), one()), &t(rat(1, 2), rat(2, 3))));
    }

    #[test]
    fn attempt_order_examples() {
        let s = Attempt::new(vec![t(rat(1, 2), one())]);
        let u = Attempt::new(vec![t(rat(1, 2), one()), t(rat(1, 2), rat(1, 4))]);
        assert!(attempt_before(&s, &u));
        assert!(!attempt_before(&u, &s));
        let v = Attempt::new(vec![t(rat(1, 2), rat(1, 2))]);
        assert!(attempt_before(&s, &v));
        assert!(!attempt_before(&s, &s));
    }

    #[test]
    fn seed_and_extend() {
        let cfg = MachineConfig { certified_radius: true, ..MachineConfig::default() };
        let sets = |i: usize| if i == 2 { OpenR2::punctured(zero()) } else { OpenR2::full() };
        let (s1, c1) = gamma_step(&MachineState::new(8), &sets, &cfg);
        assert_eq!(c1, Case::Seed);
        assert_eq!(s1.attempts, vec![Attempt::new(vec![t(zero(), one())])]);
        let (s2, c2) = gamma_step(&s1, &sets, &cfg);
        assert_eq!(c2, Case::Extend);
        let top = s2.attempts.last().unwrap();
        assert!(top.is_valid());
        let tag = &top.tags[1];
        assert!(tag.lo() > -one() && tag.hi() < one());
        assert!(tag.lo() > zero() || tag.hi() < zero());
        assert!(&tag.eps + &tag.eps <= one());
    }

    #[test]
    fn unordered_state_is_stuck() {
        let mut state = MachineState::new(8);
        state.attempts = vec![
            Attempt::new(vec![t(zero(), one())]),
            Attempt::new(vec![t(rat(1, 2), one())]),
        ];
        let sets = |_: usize| OpenR2::full();
        let (next, case) = gamma_step(&state, &sets, &MachineConfig::default());
        assert_eq!(case, Case::NotOrdered);
        assert_eq!(next.attempts, state.attempts);
        assert!(matches!(next.status, Status::Stuck(_)));
    }

    #[test]
    fn too_many_attempts_of_one_length() {
        let mut state = MachineState::new(8);
        state.attempts = (0..4).map(|j| Attempt::new(vec![t(zero(), tol(2 * j))])).collect();
        let sets = |_: usize| OpenR2::full();
        let cfg = MachineConfig { fuel: 3, ..MachineConfig::default() };
        let (_, case) = gamma_step(&state, &sets, &cfg);
        assert_eq!(case, Case::TooMany { len: 1 });
    }

    #[test]
    fn audit_examples() {
        let full = |_: usize| OpenR2::full();
        let chain: Vec<Tag> = (0..10).map(|j| t(zero(), tol(j + 1))).collect();
        match limit_audit(&chain, &full, 8, 64) {
            Audit::Pass(x) => assert_eq!(x.approx(5), zero()),
            Audit::Fail(k) => panic!("failed at {k}"),
        }
        let towards_half: Vec<Tag> = (0..12).map(|j| t(rat(1, 2), tol(j + 1))).collect();
        let sets = |i: usize| if i == 3 { OpenR2::punctured(rat(1, 2)) } else { OpenR2::full() };
        assert!(matches!(limit_audit(&towards_half, &sets, 8, 64), Audit::Fail(3)));
        assert!(matches!(limit_audit(&chain[..1], &full, 0, 64), Audit::Pass(_)));
    }

    #[test]
    fn literal_machine_halves_after_a_bad_limit() {
        let sets = |i: usize| match i {
            1 => OpenR2::punctured(rat(1, 2)),
            2 => OpenR2::punctured(zero()),
            _ => OpenR2::full(),
        };
        let cfg = MachineConfig { audit_every: 6, ..MachineConfig::default() };
        let run = run_machine(&sets, &cfg, 12, 10, None).unwrap();
        assert_eq!(run.cases[0], Case::Seed);
        let halve = run.cases.iter().position(|c| *c == Case::Halve { k: 1 }).expect("a halving");
        assert!(run.cases[1..halve].iter().all(|c| *c == Case::Extend));
        let halved = &run.state.attempts[halve];
        assert_eq!(halved.tags, vec![t(zero(), rat(1, 2))]);
        for a in &run.state.attempts {
            assert!(a.is_valid(), "{a}");
        }
        match &run.state.status {
            Status::Fixed(x) => assert!(abs_diff(&x.approx(4), &rat(1, 2)) > tol(3)),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn machine_trace_lines() {
        let sets = |_: usize| OpenR2::full();
        let mut out = Vec::new();
        run_machine(&sets, &MachineConfig::default(), 3, 2, Some(&mut out)).unwrap();
        let text = String::from_utf8(out).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "0\ti\t[(0, 1)]");
        assert!(lines[1].starts_with("1\tii\t[(0, 1), (0, 1/2)"));
        assert_eq!(lines.len(), 3);
    }

    #[test]
    fn baire_point_on_rational_complements() {
        let got = baire_point(&punctured, 10, 100_000).unwrap();
        assert!(got.nest.len() >= 12, "{}", got.nest.len());
        check_nest(&got).unwrap();
        assert!(got.nest.last().unwrap().eps <= tol(11));
        for n in 0..got.nest.len() {
            assert!(inner_radius(&punctured(n), &got.x, 64).is_found(), "set {n}");
        }
        for n in 0..12 {
            for i in 0..6 {
                assert!(abs_diff(&got.x.approx(n), &got.x.approx(n + i)) <= tol(n));
            }
        }
    }

    #[test]
    fn baire_point_on_full_sets() {
        let full = |_: usize| OpenR2::full();
        let got = baire_point(&full, 4, 1000).unwrap();
        assert!(got.nest.iter().all(|t| t.r == zero()));
        for w in got.nest.windows(2) {
            assert_eq!(&w[1].eps * rat(2, 1), w[0].eps);
        }
        assert_eq!(got.x.approx(3), zero());
    }

    #[test]
    fn baire_point_on_empty_set() {
        let empty = |_: usize| OpenR2::empty();
        assert!(!baire_point(&empty, 4, 1000).is_found());
    }
}
