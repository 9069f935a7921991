//! Acceptance criteria, one line each: `PASS` or `FAIL`, the measured
//! quantities and the wall time. The process exits non-zero if any
//! criterion fails.

use std::f64::consts::SQRT_2;
use std::time::{Duration, Instant};

use triqap::distill::{ghz_distillable, negativity, negativity_ghz_params};
use triqap::harness::{
    verify_depolarization_monotonicity, verify_theorem1, verify_theorem2, zero_bell_finding, TOL_ALGEBRAIC,
};
use triqap::matcore::{euler_unitary, hadamard, reduced_single, ComplexMatrix, Party};
use triqap::mermin::{mermin_max_general, mermin_max_ghz_params, GeneralBudget};
use triqap::protosim::{estimate_fidelity, BellFrame, ProtocolConfig};
use triqap::rng::derive;
use triqap::states::{from_ghz_params, random_canonical_ghz_params, random_mixed, GhzDiagonalParams, ThreeQubitState};
use triqap::telecap::{capability, f_i_closed, f_i_ghz_params};

const SEED: u64 = 20_240_601;

struct Outcome {
    pass: bool,
    detail: String,
}

fn check(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn within(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol
}

fn c1_counterexample() -> Outcome {
    let st = from_ghz_params(&GhzDiagonalParams::new(0.4, 0.0, [0.1; 3]).unwrap()).unwrap();
    let (npt, n) = ghz_distillable(&st);
    let cap = capability(&st);
    let pass =
        n.n.iter().all(|&x| within(x, 0.1, 1e-9)) && cap.f.iter().all(|&f| within(f, 0.5, 1e-6)) && npt && !cap.useful;
    check(
        pass,
        format!("N={:?} f={:?} npt_all_cuts={npt} useful={}", n.n, cap.f, cap.useful),
    )
}

fn c2_ghz() -> Outcome {
    let st = ThreeQubitState::ghz();
    let cap = capability(&st);
    let n = Party::ALL.map(|p| negativity(&st, p));
    let m = mermin_max_general(&st, &GeneralBudget::default()).value;
    let pass = cap.f.iter().all(|&x| within(x, 1.0, 1e-9))
        && cap.fidelity.iter().all(|&x| within(x, 1.0, 1e-9))
        && n.iter().all(|&x| within(x, 0.5, 1e-9))
        && within(m, 4.0, 1e-6);
    check(
        pass,
        format!("f={:?} F={:?} N={n:?} mermin_general={m:.9}", cap.f, cap.fidelity),
    )
}

fn c3_closed_form() -> Outcome {
    let mut worst: f64 = 0.0;
    let mut failing = 0;
    let mut first = None;
    for k in 0..1000u64 {
        let s = derive(SEED, k);
        let p = random_canonical_ghz_params(s);
        let d = from_ghz_params(&p).unwrap().decompose();
        let expect = f_i_ghz_params(&p).unwrap();
        let dev = Party::ALL
            .iter()
            .map(|&party| (f_i_closed(&d, party).0 - expect[party.index() - 1]).abs())
            .fold(0.0, f64::max);
        worst = worst.max(dev);
        if dev > 1e-9 {
            failing += 1;
            first.get_or_insert((s, p.as_array()));
        }
    }
    let mut detail = format!("max deviation {worst:.3e}, {failing}/1000 states beyond 1e-9");
    if let Some((s, p)) = first {
        detail.push_str(&format!(", first at seed {s} params {p:?}"));
    }
    check(worst <= 1e-9, detail)
}

fn c4_negativity() -> Outcome {
    let mut worst: f64 = 0.0;
    for k in 0..1000u64 {
        let p = random_canonical_ghz_params(derive(SEED ^ 4, k));
        let st = from_ghz_params(&p).unwrap();
        let expect = negativity_ghz_params(&p).unwrap();
        for party in Party::ALL {
            worst = worst.max((negativity(&st, party) - expect[party.index() - 1]).abs());
        }
    }
    check(worst <= 1e-9, format!("max deviation {worst:.3e} over 1000 states"))
}

fn c5_mermin() -> Outcome {
    let mut worst: f64 = 0.0;
    for k in 0..100u64 {
        let p = random_canonical_ghz_params(derive(SEED ^ 5, k));
        let st = from_ghz_params(&p).unwrap();
        let m = mermin_max_general(&st, &GeneralBudget::default()).value;
        worst = worst.max((m - mermin_max_ghz_params(&p).unwrap()).abs());
    }
    check(worst <= 1e-3, format!("max deviation {worst:.3e} over 100 states"))
}

fn c6_theorem1() -> Outcome {
    let r = verify_theorem1(10_000, SEED);
    let slack = r
        .metrics
        .iter()
        .find(|m| m.0 == "worst_fef_negativity_slack")
        .map_or(f64::NAN, |m| m.1);
    check(
        r.violations == 0,
        format!(
            "{} samples, {} violations, {} useful, worst N margin {:.3e}, worst f-vs-N slack {:.3e}",
            r.samples,
            r.violations,
            r.antecedents.unwrap_or(0),
            r.worst_margin,
            slack
        ),
    )
}

fn c7_theorem2() -> Outcome {
    let r = verify_theorem2(10_000, SEED);
    let a = r.antecedents.unwrap_or(0);
    check(
        r.violations == 0 && a >= 100,
        format!(
            "{} samples, {} violations, {a} antecedents, worst min f - 1/2 = {:.3e}",
            r.samples, r.violations, r.worst_margin
        ),
    )
}

fn c8_zero_bell() -> Outcome {
    let st = ThreeQubitState::zero_bell();
    let m = mermin_max_general(&st, &GeneralBudget::default()).value;
    let cap = capability(&st);
    let pass = within(m, 2.0 * SQRT_2, 1e-4)
        && !cap.useful
        && within(cap.f[0], 1.0, 1e-6)
        && within(cap.f[1], 0.5, 1e-6)
        && within(cap.f[2], 0.5, 1e-6);
    check(
        pass,
        format!("mermin_general={m:.9} f={:?} useful={}", cap.f, cap.useful),
    )
}

fn c9_simulation() -> Outcome {
    let mut notes = Vec::new();
    let mut pass = true;

    let cfg = |system, measurement, frame, samples, seed| ProtocolConfig {
        system,
        measurement,
        frame,
        samples,
        seed,
    };
    let ghz = estimate_fidelity(
        &ThreeQubitState::ghz(),
        &cfg(Party::One, hadamard(), BellFrame::Identity, 10_000, SEED),
    )
    .unwrap();
    pass &= within(ghz.mean, 1.0, 1e-12);
    notes.push(format!("GHZ mean {:.15}", ghz.mean));

    let mut worst_z: f64 = 0.0;
    for k in 0..10u64 {
        let s = derive(SEED ^ 9, k);
        let p = random_canonical_ghz_params(s);
        let st = from_ghz_params(&p).unwrap();
        let f1 = f_i_ghz_params(&p).unwrap()[0];
        let est = estimate_fidelity(&st, &cfg(Party::One, hadamard(), BellFrame::Identity, 100_000, s)).unwrap();
        let target = (2.0 * f1 + 1.0) / 3.0;
        let dev = (est.mean - target).abs();
        if dev > 3.0 * est.std_error + TOL_ALGEBRAIC {
            pass = false;
        }
        if est.std_error > 0.0 {
            worst_z = worst_z.max(dev / est.std_error);
        }
    }
    notes.push(format!("GHZ-diagonal worst |z| {worst_z:.2}"));

    let mut worst_excess = f64::NEG_INFINITY;
    for k in 0..10u64 {
        let s = derive(SEED ^ 0x99, k);
        let q: Vec<ComplexMatrix> = (0..3)
            .map(|j| reduced_single(random_mixed(derive(s, j), 2).unwrap().rho(), Party::One).unwrap())
            .collect();
        let st = ThreeQubitState::product([&q[0], &q[1], &q[2]]).unwrap();
        let u = euler_unitary(0.3 * k as f64, 0.5, 1.1);
        let est = estimate_fidelity(&st, &cfg(Party::One, u, BellFrame::Auto, 100_000, s)).unwrap();
        let excess = est.mean - 2.0 / 3.0 - 3.0 * est.std_error;
        worst_excess = worst_excess.max(excess);
        if excess > TOL_ALGEBRAIC {
            pass = false;
        }
    }
    notes.push(format!("product states worst mean - 2/3 - 3se = {worst_excess:.3e}"));
    check(pass, notes.join(", "))
}

fn c10_monotonicity() -> Outcome {
    let r = verify_depolarization_monotonicity(500, SEED);
    check(
        r.violations == 0,
        format!(
            "{} samples, {} violations, worst slack {:.3e}",
            r.samples, r.violations, r.worst_margin
        ),
    )
}

type Criterion = (&'static str, fn() -> Outcome, Duration);

fn main() {
    let criteria: [Criterion; 10] = [
        (
            "1 counterexample reproduction",
            c1_counterexample,
            Duration::from_secs(1),
        ),
        ("2 GHZ golden values", c2_ghz, Duration::from_secs(5)),
        (
            "3 closed form vs l0+ + l_(4-i)",
            c3_closed_form,
            Duration::from_secs(10),
        ),
        ("4 negativity formula", c4_negativity, Duration::from_secs(30)),
        ("5 Mermin maximum formula", c5_mermin, Duration::from_secs(120)),
        ("6 Theorem 1 campaign", c6_theorem1, Duration::from_secs(300)),
        ("7 Theorem 2 campaign", c7_theorem2, Duration::from_secs(600)),
        ("8 |0> x Bell general Mermin", c8_zero_bell, Duration::from_secs(30)),
        ("9 Monte-Carlo achievability", c9_simulation, Duration::from_secs(300)),
        (
            "10 depolarization monotonicity",
            c10_monotonicity,
            Duration::from_secs(300),
        ),
    ];
    let mut failed = Vec::new();
    for (name, run, limit) in criteria {
        let start = Instant::now();
        let out = run();
        let elapsed = start.elapsed();
        let in_time = elapsed <= limit;
        let pass = out.pass && in_time;
        let timing = if in_time {
            format!("{:.2}s", elapsed.as_secs_f64())
        } else {
            format!("{:.2}s, over the {}s limit", elapsed.as_secs_f64(), limit.as_secs())
        };
        println!(
            "[{}] {name}: {} ({timing})",
            if pass { "PASS" } else { "FAIL" },
            out.detail
        );
        if !pass {
            failed.push(name);
        }
    }

    let z = zero_bell_finding();
    println!(
        "[NOTE] |0> x Bell: symmetric Mermin maximum {:.9} (> 2), general {:.9}, f = {:?}",
        z.mermin_symmetric, z.mermin_general, z.f
    );

    if failed.is_empty() {
        println!("all acceptance criteria passed");
    } else {
        println!("{} criteria failed: {}", failed.len(), failed.join("; "));
        std::process::exit(1);
    }
}
