//! Acceptance suite: eleven criteria, one PASS/FAIL line each.
//!
//! All criteria run inside a single test so that every line is printed even
//! when an earlier criterion fails. Run with `--nocapture` to see the lines.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use gq_core::blocksets::BlockSet;
use gq_core::ghquat::{residual_order, scalar_residual_order, GenQuaternion};
use gq_core::gnum::{GenScalar, Valuation};
use gq_core::ideals::FgIdeal;
use gq_core::oracle::cross_validate_suite;
use gq_core::random;
use gq_core::rational::{q, qf, Q};
use gq_core::GqError;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const ORDER: i64 = 8;
const CRIT2_BUDGET: Duration = Duration::from_secs(10);
const CRIT10_BUDGET: Duration = Duration::from_secs(60);
const POLAR_REL_TOL: f64 = 1e-9;
const MAX_ULPS: u64 = 1;

type Outcome = std::result::Result<String, String>;

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> std::result::Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn ulps(a: f64, b: f64) -> u64 {
    (a.to_bits() as i64 - b.to_bits() as i64).unsigned_abs()
}

fn order() -> Q {
    q(ORDER)
}

fn crit1_sharp_norm_law() -> Outcome {
    // e^{-r} from an independent libm (Python `math.exp`)
    let table: [(Q, f64); 7] = [
        (q(-2), 7.38905609893065),
        (q(-1), 2.718281828459045),
        (q(0), 1.0),
        (qf(1, 2), 0.6065306597126334),
        (q(1), 0.36787944117144233),
        (q(2), 0.1353352832366127),
        (q(5), 0.006737946999085467),
    ];
    for (r, expected) in &table {
        let a = GenScalar::alpha(r.clone());
        let v = a.valuation().map_err(|e| e.to_string())?;
        ensure(v == Valuation::Finite(r.clone()), || format!("V(alpha({r})) = {v}"))?;
        let n = a.sharp_norm().map_err(|e| e.to_string())?;
        ensure(ulps(n, *expected) <= MAX_ULPS, || format!("|alpha({r})| = {n:e}, expected {expected:e}"))?;
    }
    let mut rng = rng(1);
    let mut worst = 0;
    for _ in 0..100 {
        let x = random::nonzero_scalar(&mut rng);
        let r = random::exponent(&mut rng);
        let a = GenScalar::alpha(r.clone());
        let vx = x.valuation().map_err(|e| e.to_string())?;
        let vax = (&a * &x).valuation().map_err(|e| e.to_string())?;
        let sum = match &vx {
            Valuation::Finite(v) => Valuation::Finite(v + &r),
            Valuation::Infinite => Valuation::Infinite,
        };
        ensure(vax == sum, || format!("V(alpha({r})·{x}) = {vax}, expected {sum}"))?;
        let lhs = vax.sharp_norm();
        let rhs = a.sharp_norm().unwrap() * vx.sharp_norm();
        let d = ulps(lhs, rhs);
        worst = worst.max(d);
        ensure(d <= MAX_ULPS, || format!("|alpha({r})·x| = {lhs:e} vs {rhs:e} ({d} ulps) for x = {x}"))?;
    }
    Ok(format!("7 closed forms, 100 products, worst {worst} ulp"))
}

struct Dichotomy {
    units_s: Vec<GenScalar>,
    units_q: Vec<GenQuaternion>,
    elapsed: Duration,
}

fn dichotomy_run() -> std::result::Result<Dichotomy, String> {
    let start = Instant::now();
    let mut rng = rng(2);
    let mut units_s = Vec::new();
    let mut units_q = Vec::new();
    for _ in 0..1000 {
        let x = random::nonzero_scalar(&mut rng);
        let unit = x.is_unit().map_err(|e| e.to_string())?;
        match (unit, x.annihilator_idempotent()) {
            (true, Err(GqError::IsUnit)) => units_s.push(x),
            (false, Ok(e)) => {
                let es = e.to_scalar();
                ensure(!e.is_zero(), || format!("zero witness for {x}"))?;
                ensure(&es * &es == es, || format!("witness not idempotent for {x}"))?;
                ensure(&x * &es == GenScalar::zero(), || format!("x·e != 0 for {x}"))?;
            }
            (u, w) => return Err(format!("scalar {x}: unit = {u}, witness = {w:?}")),
        }
    }
    for _ in 0..500 {
        let x = random::nonzero_quaternion(&mut rng);
        let unit = x.is_unit().map_err(|e| e.to_string())?;
        match (unit, x.zero_divisor_witness()) {
            (true, Err(GqError::IsUnit)) => units_q.push(x),
            (false, Ok(e)) => {
                let es = e.to_scalar();
                let eq = GenQuaternion::embed(es.clone());
                ensure(!e.is_zero(), || format!("zero witness for {x}"))?;
                ensure(&es * &es == es, || format!("witness not idempotent for {x}"))?;
                ensure(&x * &eq == GenQuaternion::zero(), || format!("x·e != 0 for {x}"))?;
                ensure(&eq * &x == GenQuaternion::zero(), || format!("e·x != 0 for {x}"))?;
            }
            (u, w) => return Err(format!("quaternion {x}: unit = {u}, witness = {w:?}")),
        }
    }
    Ok(Dichotomy { units_s, units_q, elapsed: start.elapsed() })
}

fn crit2_dichotomy(d: &Dichotomy) -> Outcome {
    ensure(d.elapsed < CRIT2_BUDGET, || format!("took {:?}", d.elapsed))?;
    Ok(format!(
        "1000 scalars ({} units), 500 quaternions ({} units) in {:.2?}",
        d.units_s.len(),
        d.units_q.len(),
        d.elapsed
    ))
}

fn crit3_inverses(d: &Dichotomy) -> Outcome {
    let n = order();
    for x in &d.units_s {
        let inv = x.invert(&n).map_err(|e| e.to_string())?;
        let res = &(x * &inv) - &GenScalar::one();
        let m = scalar_residual_order(&res);
        ensure(m.as_ref().is_none_or(|m| m > &n), || format!("x = {x}: residual {res}"))?;
    }
    for x in &d.units_q {
        let inv = x.invert(&n).map_err(|e| e.to_string())?;
        for res in [&(x * &inv) - &GenQuaternion::one(), &(&inv * x) - &GenQuaternion::one()] {
            let m = residual_order(&res);
            ensure(m.as_ref().is_none_or(|m| m > &n), || format!("x = {x}: residual {res}"))?;
        }
    }
    Ok(format!("{} scalar and {} quaternion inverses, residual order > {ORDER}", d.units_s.len(), d.units_q.len()))
}

fn crit4_metrics() -> Outcome {
    let mut rng = rng(4);
    for _ in 0..1000 {
        let (x, y, z) = (random::scalar(&mut rng), random::scalar(&mut rng), random::scalar(&mut rng));
        let v = |a: &GenScalar, b: &GenScalar| (a - b).valuation().unwrap();
        ensure(v(&x, &z) >= v(&x, &y).min(v(&y, &z)), || format!("valuation bound fails: {x}, {y}, {z}"))?;
        let (dxz, dxy, dyz) = (x.distance(&z).unwrap(), x.distance(&y).unwrap(), y.distance(&z).unwrap());
        ensure(dxz <= dxy.max(dyz), || format!("d(x,z) = {dxz} > max({dxy}, {dyz})"))?;
    }
    for _ in 0..500 {
        let (x, y) = (random::quaternion(&mut rng), random::quaternion(&mut rng));
        let (d, dpi) = (x.metric_d(&y).unwrap(), x.metric_dpi(&y).unwrap());
        ensure(d == dpi, || format!("d = {d} != dpi = {dpi} for {x}, {y}"))?;
        let vq = (&x - &y).valuation().unwrap();
        ensure((&x - &y).norm_valuation().unwrap() == vq, || format!("valuations differ for {x}, {y}"))?;
    }
    Ok("1000 ultrametric triples, 500 quaternion pairs with d = dpi".into())
}

fn qpositive(rng: &mut ChaCha8Rng) -> GenScalar {
    random::scalar(rng).abs().unwrap()
}

fn crit5_order_convexity() -> Outcome {
    let mut rng = rng(5);
    for _ in 0..300 {
        let (a, b) = (qpositive(&mut rng), qpositive(&mut rng));
        ensure((&a + &b).is_qpositive().unwrap(), || format!("{a} + {b} not q-positive"))?;
        ensure((&a * &b).is_qpositive().unwrap(), || format!("{a} · {b} not q-positive"))?;
        for x in [random::scalar(&mut rng), &a - &a, GenScalar::zero()] {
            if x.is_qpositive().unwrap() && (-&x).is_qpositive().unwrap() {
                ensure(x == GenScalar::zero(), || format!("{x} and its negative are both q-positive"))?;
            }
        }
    }
    let stored = &GenScalar::chi(&BlockSet::evens()) - &GenScalar::chi(&BlockSet::odds());
    ensure(!stored.is_qpositive().unwrap() && !(-&stored).is_qpositive().unwrap(), || "trichotomy".into())?;

    let mut by_rejection = 0;
    for _ in 0..300 {
        let g = random::quaternion(&mut rng);
        let ideal = FgIdeal::quaternion(vec![g.clone()]).unwrap();
        let x = &random::quaternion(&mut rng) * &g;
        let nx = x.normsq();
        let y = loop {
            let cand = random::quaternion(&mut rng);
            if cand.normsq().order_leq(&nx).unwrap() {
                by_rejection += 1;
                break cand;
            }
            // fallback: shrink x by a factor with norm < 1
            let w = GenQuaternion::new(
                GenScalar::alpha(q(1)),
                random::scalar(&mut rng) * GenScalar::alpha(q(4)),
                GenScalar::zero(),
                GenScalar::constant(qf(1, 2)),
            );
            let cand = &w * &x;
            if cand.normsq().order_leq(&nx).unwrap() {
                break cand;
            }
        };
        ensure(ideal.contains_element(&x).unwrap(), || format!("{x} not in <{g}>"))?;
        ensure(ideal.contains_element(&y).unwrap(), || format!("convexity fails: y = {y}, x = {x}, g = {g}"))?;
    }
    Ok(format!("cone closed, antisymmetric; 300 convexity triples ({by_rejection} by rejection sampling)"))
}

fn crit6_exchange() -> Outcome {
    let mut rng = rng(6);
    for _ in 0..500 {
        let x = random::quaternion(&mut rng);
        let e = x.exchange_idempotent().unwrap().to_scalar();
        ensure(&e * &e == e, || format!("e not idempotent for {x}"))?;
        let u = &x + &GenQuaternion::embed(e);
        ensure(u.is_unit().unwrap(), || format!("x + e not a unit for {x}"))?;
    }
    Ok("500 quaternions".into())
}

fn crit7_bezout() -> Outcome {
    let mut rng = rng(7);
    for _ in 0..300 {
        let (a, b) = (random::quaternion(&mut rng), random::quaternion(&mut rng));
        let ideal = FgIdeal::quaternion(vec![a.clone(), b.clone()]).unwrap();
        let cert = ideal.bezout_certificate(&order()).unwrap();
        ensure(cert.verifies(), || format!("certificate fails for <{a}, {b}>: {cert:?}"))?;
        ensure(ideal.generator() == &(&a.normsq() + &b.normsq()), || "generator".into())?;
    }
    Ok("300 generator pairs".into())
}

fn crit8_idempotents() -> Outcome {
    let mut rng = rng(8);
    let mut family: Vec<(GenQuaternion, bool)> = vec![
        (GenQuaternion::zero(), true),
        (GenQuaternion::one(), true),
        (
            GenQuaternion::new(GenScalar::constant(qf(1, 2)), GenScalar::constant(qf(1, 2)), GenScalar::zero(), GenScalar::zero()),
            false,
        ),
    ];
    while family.len() < 200 {
        let a = random::block_set(&mut rng);
        let chi = GenScalar::chi(&a);
        let b = random::splitting_set(&mut rng);
        let small = GenScalar::alpha(random::exponent(&mut rng)).restrict(&b);
        let cand = match rng.gen_range(0..6) {
            0 | 1 => (GenQuaternion::embed(chi), true),
            2 => (GenQuaternion::embed(&chi + &small), false),
            3 => (&GenQuaternion::embed(chi) + &GenQuaternion::basis(rng.gen_range(1..4)).scale(&small), false),
            4 => (GenQuaternion::embed(&chi * &GenScalar::constant(random::coefficient(&mut rng) + q(3))), false),
            _ => (random::nonzero_quaternion(&mut rng), false),
        };
        family.push(cand);
    }
    let tests: Vec<GenQuaternion> = (0..100).map(|_| random::quaternion(&mut rng)).collect();
    let mut accepted = 0;
    for (x, is_chi) in &family {
        let got = x.is_idempotent();
        // a random quaternion or scaled χ can still land on an idempotent
        let truth = *is_chi || (x.as_scalar().and_then(|s| s.is_idempotent()).is_some() && &(x * x) == x);
        ensure(got.is_some() == truth, || format!("{x}: classified {}, expected {truth}", got.is_some()))?;
        if let Some(e) = got {
            accepted += 1;
            ensure(GenQuaternion::embed(e.to_scalar()) == *x, || format!("{x} accepted as {e}"))?;
            for t in &tests {
                ensure(&(x * t) == &(t * x), || format!("{x} does not commute with {t}"))?;
            }
        }
    }
    Ok(format!("200 candidates, {accepted} accepted, all central against 100 quaternions"))
}

fn crit9_essential() -> Outcome {
    let mut rng = rng(9);
    for _ in 0..200 {
        let a = random::splitting_set(&mut rng);
        let count = rng.gen_range(1..=3);
        let gens: Vec<GenQuaternion> = (0..count)
            .map(|_| random::quaternion(&mut rng).scale(&GenScalar::chi(&a)))
            .collect();
        let ideal = FgIdeal::quaternion(gens.clone()).unwrap();
        ensure(ideal.is_proper(), || format!("{ideal} not proper"))?;
        let e = ideal.containing_idempotent().ok_or_else(|| format!("no idempotent for {ideal}"))?;
        let principal = FgIdeal::scalar(vec![e.to_scalar()]).unwrap();
        for g in &gens {
            ensure(principal.contains_element(g).unwrap(), || format!("{g} not in <{e}>"))?;
            ensure(principal.certificate(g, &order()).unwrap().verifies(), || format!("certificate for {g}"))?;
        }
        ensure(!ideal.is_essential(), || format!("{ideal} reported essential"))?;
        ensure(ideal.is_essential() == ideal.norm_ideal().is_essential(), || "norm ideal".into())?;
        let other = FgIdeal::quaternion((0..count).map(|_| random::quaternion(&mut rng)).collect()).unwrap();
        ensure(other.is_essential() == other.norm_ideal().is_essential(), || format!("{other}"))?;
    }
    Ok("200 proper ideals with verified idempotent envelopes".into())
}

fn crit10_oracle() -> Outcome {
    let start = Instant::now();
    let summary = cross_validate_suite(42, 500).map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();
    ensure(summary.mismatches.is_empty(), || format!("{} mismatches: {:?}", summary.mismatches.len(), summary.mismatches.first()))?;
    ensure(elapsed < CRIT10_BUDGET, || format!("took {elapsed:?}"))?;
    Ok(format!(
        "{} checks ({} confirm, {} refute, {} inconclusive), 0 mismatches in {elapsed:.2?}",
        summary.checks, summary.confirmed, summary.refuted, summary.inconclusive
    ))
}

fn numeric_polar_residual(x: &GenQuaternion, p: &gq_core::Polar, eps: f64) -> (f64, f64) {
    let xv = x.eval(eps);
    let tv = p.theta.eval(eps);
    let nv = p.n.eval(eps);
    let xnorm = xv.iter().map(|v| v * v).sum::<f64>().sqrt();
    let diff = tv.iter().zip(xv).map(|(t, x)| (t * nv - x).powi(2)).sum::<f64>().sqrt();
    let tsq = tv.iter().map(|v| v * v).sum::<f64>();
    (diff / xnorm, (tsq - 1.0).abs())
}

fn crit11_polar() -> Outcome {
    let n = order();
    let mut rng = rng(11);
    let mut approx = 0;
    let mut worst: f64 = 0.0;
    for _ in 0..200 {
        let x = random::unit_quaternion(&mut rng);
        let p = x.polar(&n).map_err(|e| format!("{x}: {e}"))?;
        let round_trip = &p.theta.scale(&p.n) - &x;
        let unit_norm = &p.theta.normsq() - &GenScalar::one();
        if p.theta.has_exact_coeffs() && p.n.has_exact_coeffs() {
            ensure(round_trip.vanishes_beyond(&n), || format!("theta·n - x = {round_trip} for {x}"))?;
            ensure(
                scalar_residual_order(&unit_norm).is_none_or(|m| m > n),
                || format!("normsq(theta) - 1 = {unit_norm} for {x}"),
            )?;
        } else {
            approx += 1;
            for k in 20..=25 {
                let eps = 2f64.powi(-k);
                let (rt, un) = numeric_polar_residual(&x, &p, eps);
                worst = worst.max(rt).max(un);
                ensure(rt < POLAR_REL_TOL && un < POLAR_REL_TOL, || {
                    format!("x = {x} at eps = 2^-{k}: round trip {rt:e}, unit norm {un:e}")
                })?;
            }
        }
    }
    Ok(format!("200 unit quaternions, {approx} approximate (worst numeric residual {worst:e})"))
}

fn run(name: &str, f: impl FnOnce() -> Outcome) -> bool {
    let start = Instant::now();
    let outcome = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|p| {
        Err(p.downcast_ref::<String>().cloned().or(p.downcast_ref::<&str>().map(|s| s.to_string())).unwrap_or_default())
    });
    match outcome {
        Ok(detail) => {
            println!("PASS {name}: {detail} [{:.1?}]", start.elapsed());
            true
        }
        Err(why) => {
            println!("FAIL {name}: {why} [{:.1?}]", start.elapsed());
            false
        }
    }
}

#[test]
fn acceptance_criteria() {
    let mut ok = Vec::new();
    ok.push(run("1 sharp-norm law", crit1_sharp_norm_law));
    let d = dichotomy_run();
    ok.push(run("2 fundamental dichotomy", || crit2_dichotomy(d.as_ref().map_err(Clone::clone)?)));
    ok.push(run("3 inverse certificates", || crit3_inverses(d.as_ref().map_err(Clone::clone)?)));
    ok.push(run("4 metric suite", crit4_metrics));
    ok.push(run("5 order and convexity", crit5_order_convexity));
    ok.push(run("6 exchange", crit6_exchange));
    ok.push(run("7 bezout", crit7_bezout));
    ok.push(run("8 idempotent classification", crit8_idempotents));
    ok.push(run("9 essential ideals", crit9_essential));
    ok.push(run("10 oracle concordance", crit10_oracle));
    ok.push(run("11 polar round trip", crit11_polar));
    let failed: Vec<usize> = ok.iter().enumerate().filter(|(_, p)| !**p).map(|(i, _)| i + 1).collect();
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
