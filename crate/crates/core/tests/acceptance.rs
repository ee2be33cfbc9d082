//! End-to-end acceptance run. Prints one PASS/FAIL line per criterion and
//! exits non-zero if any fails.

use std::panic::{self, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use opensets::adversary::{
    adversary_hbc, adversary_r2_cover, adversary_r2_full, handed_out_measure, measure_ceiling,
    NaiveGridCover, NaiveGridHbc, PsiPipelineCover, Verdict,
};
use opensets::baire::{
    baire_point, check_nest, limit_audit, run_machine, Audit, Case, MachineConfig,
};
use opensets::enumerate::nth_rational;
use opensets::heine_borel::{hbc_rm, whbc};
use opensets::rational::{abs_diff, half, one, rat, tol, zero};
use opensets::represent::{
    delta, is_full, pincherle_profile, r2_probe_r4, r3_to_r4, r4_to_r3_fin, ExactPincherle,
    Fullness,
};
use opensets::urysohn::{tietze_extend, urysohn, PLFunction};
use opensets::{
    covers, CauchyReal, ClosedRM, FinClosed, FinOpen, OpenR2, OpenR4, OpenUnion, RatInterval,
    Rational, Search,
};

type Check = fn() -> Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn middle_third() -> FinClosed {
    FinClosed::new([RatInterval::closed(rat(1, 3), rat(2, 3))])
}

fn within(start: Instant, limit: Duration) -> Result<(), String> {
    let spent = start.elapsed();
    if spent > limit {
        return Err(format!("took {spent:?}, limit {limit:?}"));
    }
    Ok(())
}

fn hbc_fixture() -> Result<String, String> {
    let start = Instant::now();
    let cover = OpenR4::tail_cover();
    let c = ClosedRM::from_fin_closed(&middle_third());
    let Search::Found(cert) = hbc_rm(&c, &cover, 1000) else {
        return Err("search exhausted".into());
    };
    ensure!(cert.n0 == 2, "n0 = {}", cert.n0);
    ensure!(cert.verified && cert.check(), "certificate does not re-check");
    ensure!(covers(&middle_third(), &cover.prefix(3)), "entries 0..=2 do not cover");
    ensure!(!covers(&middle_third(), &cover.prefix(2)), "entries 0..=1 already cover");
    // 1/3 is the witness: entry 1 is (1/3, 1).
    ensure!(!cover.prefix(2).iter().any(|p| p.contains(&rat(1, 3))), "1/3 covered by 0..=1");
    within(start, Duration::from_secs(1))?;
    Ok("n0 = 2 verified, n0 = 1 misses 1/3".into())
}

fn random_fin_open(rng: &mut ChaCha8Rng) -> FinOpen {
    let pieces = rng.gen_range(0..5);
    FinOpen::new((0..pieces).map(|_| {
        let a = rng.gen_range(-2..34i64);
        let b = rng.gen_range(a..35i64);
        RatInterval::open(rat(a, 32), rat(b, 32))
    }))
}

fn round_trip() -> Result<String, String> {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let sets: Vec<FinOpen> = (0..50).map(|_| random_fin_open(&mut rng)).collect();
    for (i, set) in sets.iter().enumerate() {
        let back = r3_to_r4(&r4_to_r3_fin(set));
        let union = OpenUnion::from_intervals(&back.prefix(6000));
        for j in 0..=128 {
            let q = rat(j, 128);
            ensure!(
                union.contains(&q) == set.contains(&q),
                "set {i} ({set}) differs at {q}"
            );
        }
    }
    within(start, Duration::from_secs(5))?;
    Ok(format!("50 sets x 129 points in {:?}", start.elapsed()))
}

fn delta_correctness() -> Result<String, String> {
    let mut calls = 0;
    for p in [rat(1, 3), rat(1, 2), rat(2, 3)] {
        let y = OpenR2::punctured(p.clone());
        for n in 1..=12 {
            ensure!(
                is_full(&y, &ExactPincherle, n) == Fullness::NotFull,
                "p = {p}: is_full at depth {n} is not NotFull"
            );
            let last = pincherle_profile(&y, &ExactPincherle, n)[n as usize].clone();
            ensure!(
                matches!(&last, Some(m) if *m > zero() && *m <= tol(n)),
                "p = {p}: mu(Y_{n}) = {last:?}"
            );
        }
        for j in 0..=64 {
            let x = rat(j, 64);
            let truth = abs_diff(&x, &p);
            for k in 0..=16 {
                let got = delta(&y, &ExactPincherle, &CauchyReal::constant(x.clone()), k)
                    .map_err(|e| format!("p = {p}, x = {x}, k = {k}: {e}"))?;
                calls += 1;
                ensure!(
                    abs_diff(&got, &truth) <= tol(k),
                    "p = {p}, x = {x}, k = {k}: {got} vs {truth}"
                );
            }
        }
    }
    Ok(format!("{calls} delta calls within tolerance"))
}

fn rational_complements(n: usize) -> OpenR2 {
    OpenR2::punctured(nth_rational(n as u64))
}

fn baire_realiser() -> Result<String, String> {
    let start = Instant::now();
    let Search::Found(point) = baire_point(&rational_complements, 20, 100_000) else {
        return Err("search exhausted".into());
    };
    check_nest(&point)?;
    for w in point.nest.windows(2) {
        ensure!(&w[1].eps * rat(2, 1) <= w[0].eps, "radius not halved");
        ensure!(w[1].closed_inside_open(&w[0]), "tags not nested");
    }
    let last = point.nest.last().expect("non-empty nest");
    ensure!(last.eps <= tol(21), "final radius {}", last.eps);
    match limit_audit(&point.nest, &rational_complements, 32, 64) {
        Audit::Pass(_) => {}
        Audit::Fail(i) => return Err(format!("audit failed at set {i}")),
    }
    within(start, Duration::from_secs(10))?;
    Ok(format!("{} tags, x ~ {}", point.nest.len(), point.x.approx(20)))
}

fn gamma_conformance() -> Result<String, String> {
    let sets = |i: usize| rational_complements(i);
    let cfg = MachineConfig::default();
    let run = run_machine(&sets, &cfg, 200, 32, None).map_err(|e| e.to_string())?;
    ensure!(run.cases.len() == 200, "stopped after {} steps", run.cases.len());
    let attempts = &run.state.attempts;
    ensure!(attempts.len() == 200, "{} attempts", attempts.len());
    let mut halvings = 0;
    for (step, case) in run.cases.iter().enumerate() {
        let now = &attempts[step];
        match case {
            Case::Seed => {
                ensure!(step == 0 && now.len() == 1, "seed at step {step}");
            }
            Case::Extend => {
                let before = attempts[..step].last().ok_or("extend with no attempt")?;
                ensure!(now.len() == before.len() + 1, "step {step} did not add one tag");
                ensure!(now.tags[..before.len()] == before.tags[..], "step {step} changed a prefix");
            }
            Case::Halve { k } => {
                halvings += 1;
                let before = attempts[..step].last().ok_or("halve with no attempt")?;
                ensure!(now.len() == *k && *k <= before.len(), "step {step}: bad truncation");
                ensure!(now.tags[..k - 1] == before.tags[..k - 1], "step {step}: prefix changed");
                let (a, b) = (&now.tags[k - 1], &before.tags[k - 1]);
                ensure!(a.r == b.r && a.eps.clone() * rat(2, 1) == b.eps, "step {step}: not halved");
            }
            other => return Err(format!("step {step}: case {}", other.label())),
        }
        ensure!(now.is_valid(), "step {step}: invalid attempt");
    }
    Ok(format!("200 steps, {halvings} halvings, no o) or iii)"))
}

fn disjoint_pair(rng: &mut ChaCha8Rng) -> (FinClosed, FinClosed) {
    // Random cut points on a 1/64 grid, alternating pieces and gaps.
    let mut cuts: Vec<i64> = (0..rng.gen_range(2..9)).map(|_| rng.gen_range(0..=64)).collect();
    cuts.sort();
    cuts.dedup();
    let mut c0 = Vec::new();
    let mut c1 = Vec::new();
    let mut label = rng.gen_bool(0.5);
    for w in cuts.chunks(2) {
        let piece = match w {
            [a, b] => RatInterval::closed(rat(*a, 64), rat(*b, 64)),
            [a] => RatInterval::closed(rat(*a, 64), rat(*a, 64)),
            _ => unreachable!(),
        };
        if label { c1.push(piece) } else { c0.push(piece) }
        label = rng.gen_bool(0.5);
    }
    // Adjacent pieces share no point because chunk endpoints are distinct.
    (FinClosed::new(c0), FinClosed::new(c1))
}

fn urysohn_tietze() -> Result<String, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut done = 0;
    while done < 50 {
        let (c0, c1) = disjoint_pair(&mut rng);
        if c0.is_empty() && c1.is_empty() {
            continue;
        }
        done += 1;
        let g = urysohn(&c0, &c1).map_err(|e| e.to_string())?;
        let h = urysohn(&c1, &c0).map_err(|e| e.to_string())?;
        let (lo, hi) = g.range();
        ensure!(lo >= zero() && hi <= one(), "range [{lo}, {hi}]");
        for (c, v) in [(&c0, zero()), (&c1, one())] {
            for p in c.pieces() {
                let mid = (&p.lo + &p.hi) * half();
                for x in [&p.lo, &mid, &p.hi] {
                    ensure!(g.eval(x) == v, "g({x}) = {} on C{v}", g.eval(x));
                }
                for (x, _) in g.breakpoints().iter().filter(|(x, _)| p.contains(x)) {
                    ensure!(g.eval(x) == v, "g({x}) on C{v}");
                }
            }
        }
        for (x, _) in g.breakpoints().iter().chain(h.breakpoints()) {
            ensure!(h.eval(x) == one() - g.eval(x), "swap fails at {x}");
        }

        let d = c0.union(&c1);
        let vals: Vec<(Rational, Rational)> =
            (0..=4).map(|i| (rat(i, 4), rat(rng.gen_range(-12..=12), 8))).collect();
        let f = PLFunction::new(vals).map_err(|e| e.to_string())?;
        let ext = tietze_extend(&d, &f).map_err(|e| e.to_string())?;
        // |f| on a piece peaks at an endpoint or a breakpoint inside it.
        let mut sup = zero();
        for p in d.pieces() {
            let mut xs = vec![p.lo.clone(), p.hi.clone()];
            xs.extend(f.breakpoints().iter().map(|(x, _)| x.clone()).filter(|x| p.contains(x)));
            for x in xs {
                let v = f.eval(&x);
                let a = if v < zero() { -v } else { v };
                if a > sup {
                    sup = a;
                }
                ensure!(ext.eval(&x) == f.eval(&x), "extension differs at {x}");
            }
        }
        ensure!(ext.sup_abs() == sup, "sup {} vs {}", ext.sup_abs(), sup);
    }
    Ok("50 pairs".into())
}

fn lemma_desk_scale() -> Result<String, String> {
    let (y, log) = adversary_r2_full();
    let got = r2_probe_r4(&y, 10_000);
    let log = log.lock().map_err(|_| "poisoned")?;
    let handed = handed_out_measure(&log);
    ensure!(got.measure() <= half(), "probed union has measure {}", got.measure());
    ensure!(handed <= measure_ceiling(log.len()), "handed out {handed}");
    ensure!(y.backing().is_some_and(|b| b.set.is_full()), "represented set is not [0, 1]");
    Ok(format!(
        "{} distinct queries, union measure ~ {:.6}",
        log.len(),
        num_traits::ToPrimitive::to_f64(&got.measure()).unwrap_or(f64::NAN)
    ))
}

fn refutations() -> Result<String, String> {
    let hbc = adversary_hbc(&NaiveGridHbc { bits: 10 });
    let Verdict::Refuted(w) = &hbc else {
        return Err(format!("hbc adversary: {hbc:?}"));
    };
    ensure!(w.verified, "hbc witness unverified");
    let cover = OpenR4::tail_cover();
    ensure!(
        (0..=w.k).all(|n| !cover.entry(n).contains(&w.point)),
        "hbc witness {} is covered",
        w.point
    );
    ensure!(!(&w.point * rat(1024, 1)).is_integer(), "hbc witness is a grid point");

    let r2 = adversary_r2_cover(&NaiveGridCover { bits: 10, max_sets: 4 });
    let Verdict::Refuted(v) = &r2 else {
        return Err(format!("cover adversary: {r2:?}"));
    };
    ensure!(v.verified, "cover witness unverified");
    let holed = OpenR2::full().without_point(&v.point);
    ensure!(holed.value_at(&v.point, 0) == zero(), "witness value");

    let psi = adversary_r2_cover(&PsiPipelineCover { fuel: 2000 });
    ensure!(!psi.is_refuted(), "psi pipeline refuted: {psi:?}");
    Ok(format!("hbc witness {} (k = {}), cover witness {} (k = {})", w.point, w.k, v.point, v.k))
}

fn whbc_budget() -> Result<String, String> {
    let c = ClosedRM::from_fin_closed(&middle_third());
    let single = OpenR4::constant(RatInterval::open(rat(2, 5), rat(3, 5)));
    let Search::Found(cert) = whbc(&c, &single, &rat(1, 4), 1000) else {
        return Err("epsilon 1/4: exhausted".into());
    };
    ensure!(cert.verified, "certificate unverified");
    ensure!(cert.patch_length < rat(1, 4), "patch measure {}", cert.patch_length);
    let all: Vec<RatInterval> = single.prefix(cert.n0 + 1).into_iter().chain(cert.patches.clone()).collect();
    ensure!(covers(&middle_third(), &all), "patches miss the remainder");

    // The uncovered remainder has measure 2/15 > 1/10.
    let tight = whbc(&c, &single, &rat(1, 10), 2000);
    ensure!(tight == Search::Exhausted, "epsilon 1/10 on one piece: {tight:?}");
    let more = OpenR4::from_pieces(vec![
        RatInterval::open(rat(2, 5), rat(3, 5)),
        RatInterval::open(rat(1, 4), rat(9, 20)),
        RatInterval::open(rat(11, 20), rat(3, 4)),
    ]);
    let Search::Found(wide) = whbc(&c, &more, &rat(1, 10), 2000) else {
        return Err("epsilon 1/10 with more cover: exhausted".into());
    };
    ensure!(wide.n0 > 0 && wide.verified, "n0 = {}", wide.n0);
    ensure!(wide.patch_length < rat(1, 10), "patch measure {}", wide.patch_length);
    Ok(format!(
        "patches {} at 1/4; 1/10 exhausted on one piece, n0 = {} with more",
        cert.patch_length, wide.n0
    ))
}

fn main() -> ExitCode {
    let checks: [(&str, Check); 9] = [
        ("hbc fixture", hbc_fixture),
        ("conversion round trip", round_trip),
        ("delta correctness", delta_correctness),
        ("baire realiser", baire_realiser),
        ("gamma machine conformance", gamma_conformance),
        ("urysohn and tietze", urysohn_tietze),
        ("probing adversary measure", lemma_desk_scale),
        ("adversary refutations", refutations),
        ("whbc budget", whbc_budget),
    ];
    panic::set_hook(Box::new(|_| {}));
    let mut failed = 0;
    for (i, (name, check)) in checks.iter().enumerate() {
        let start = Instant::now();
        let outcome = panic::catch_unwind(AssertUnwindSafe(check))
            .unwrap_or_else(|e| {
                let msg = e
                    .downcast_ref::<String>()
                    .cloned()
                    .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                    .unwrap_or_default();
                Err(format!("panicked: {msg}"))
            });
        let took = start.elapsed();
        match outcome {
            Ok(detail) => println!("PASS {}: {name} ({detail}; {took:.2?})", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL {}: {name} ({why}; {took:.2?})", i + 1);
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
