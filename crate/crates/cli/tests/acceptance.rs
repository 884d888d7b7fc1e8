//! Acceptance criteria at the default parameters (N = 3, θ = 6/5, Q = 2).
//!
//! Runs without the libtest harness so that every criterion prints one line
//! with its verdict, elapsed time and limit. Exits non-zero if any criterion
//! fails or overruns.

use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use bdlab_core::exact::{int, ratio};
use bdlab_core::norm::{asymptotic_c0_check, avg_bound_check, build_theta_witness, type_ii_chain_step};
use bdlab_core::sample::{avg_instances, c0_families, coordinate_vectors};
use bdlab_core::subspace::default_schedule;
use bdlab_core::x0::{analysis, build_space, enumerate_level, level_cardinality, recompose_row};
use bdlab_core::{
    build_z, pair_search, quotient_check, row_l1_norm, BlockVector, Pool, Rational, SparseRow, TruncatedSpace,
    Verdict, VerificationReport, X0Params,
};
use num_bigint::BigUint;

type Outcome = Result<String, String>;

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn all_pass(report: &VerificationReport, what: &str) -> Result<(), String> {
    match report.failures().next() {
        None => Ok(()),
        Some(r) => Err(format!("{what}: {}", r.to_line())),
    }
}

fn budget() -> BigUint {
    BigUint::from(100_000u32)
}

fn fixture() -> (Pool, TruncatedSpace) {
    let pool = Pool::exhaustive(X0Params::default(), 2, &budget()).expect("pool through level 2");
    let space = build_space(&pool, 2).expect("space through level 2");
    (pool, space)
}

fn c1_counting() -> Outcome {
    let params = X0Params::default();
    ensure(level_cardinality(0, &params) == BigUint::from(1u32), || "level 0 count is not 1".into())?;
    let mut pool = Pool::new(params.clone());
    let mut lens = Vec::new();
    for q in 1..=2 {
        let listed = enumerate_level(&pool, q, &budget()).map_err(|e| e.to_string())?;
        let expected = level_cardinality(q, &params);
        ensure(BigUint::from(listed.len()) == expected, || format!("q={q}: {} listed, {expected} counted", listed.len()))?;
        lens.push(listed.len());
        pool.enumerate_through(q, &budget()).map_err(|e| e.to_string())?;
    }
    ensure(lens == [2, 172], || format!("lengths {lens:?}"))?;
    Ok(format!("#Δ = 1, {}, {} by enumeration and by count", lens[0], lens[1]))
}

fn c2_operator_norm(space: &TruncatedSpace) -> Outcome {
    let bound = int(5);
    let mut worst = Rational::from_integer(0.into());
    for p in 0..=1 {
        for (id, row) in space.ext(p, 2).rows() {
            let n = row_l1_norm(row);
            ensure(n <= bound, || format!("row {id} of i_{{{p},2}} has ℓ1 norm {n}"))?;
            worst = worst.max(n);
        }
    }
    Ok(format!("max row ℓ1 of i_{{p,2}} = {worst} ≤ 5"))
}

fn c3_duality(space: &TruncatedSpace) -> Outcome {
    let report = space.duality_checks();
    all_pass(&report, "duality")?;
    let bio = report.find("duality_checks.biorthogonal(").count();
    ensure(bio == 175, || format!("{bio} biorthogonality rows"))?;
    let exact = report.find("duality_checks.biorthogonal(").all(|r| r.lhs == "175 pairings exact");
    ensure(exact, || "pairing count differs".into())?;
    let rank = report.find("duality_checks.row_space(q=2)").next().ok_or("no row-space record at q=2")?;
    ensure(rank.lhs == "rank d*=175, rank e*=175, rank joint=175", || rank.lhs.clone())?;
    let spans = report.find("duality_checks.span(").count();
    ensure(spans == 2, || format!("{spans} span records"))?;
    Ok("175² pairings exact, row spaces of rank 175 agree, c_γ* in span".into())
}

fn c4_fdd(space: &TruncatedSpace) -> Outcome {
    let samples = coordinate_vectors(space, 1000, 0);
    let outcome = space.fdd_check(&samples);
    all_pass(&outcome.report, "fdd")?;
    ensure(outcome.max_initial_ratio <= int(5), || format!("initial ratio {}", outcome.max_initial_ratio))?;
    ensure(outcome.max_interval_ratio <= int(10), || format!("interval ratio {}", outcome.max_interval_ratio))?;
    Ok(format!(
        "1000 vectors: max ‖P_[0,p]x‖/‖x‖ = {} ≤ 5, max ‖P_E x‖/‖x‖ = {} ≤ 10",
        outcome.max_initial_ratio, outcome.max_interval_ratio
    ))
}

fn c5_analysis(pool: &Pool, space: &TruncatedSpace) -> Outcome {
    // γ₀ has no extension row, so its analysis is d_γ₀* alone
    let atom = space.dual_triple(pool.gamma0()).map_err(|e| e.to_string())?;
    ensure(atom.d_row == SparseRow::unit(pool.gamma0()), || "d_γ0* differs from e_γ0*".into())?;
    let mut count = 1;
    for id in pool.ids().skip(1) {
        let a = analysis(id, pool).map_err(|e| e.to_string())?;
        all_pass(&a.verify(pool), "analysis invariants")?;
        let row = recompose_row(&a, pool, space).map_err(|e| e.to_string())?;
        ensure(row == SparseRow::unit(id), || format!("analysis of {id} does not recompose"))?;
        count += 1;
    }
    ensure(count == 175, || format!("{count} elements"))?;
    Ok("all 175 e_γ* rows recomposed exactly".into())
}

fn c6_averaging(pool: &Pool) -> Outcome {
    let instances = avg_instances(pool, 100, 0).map_err(|e| e.to_string())?;
    let mut worst = Rational::from_integer(0.into());
    for (i, (blocks, avg)) in instances.iter().enumerate() {
        let report = avg_bound_check(pool, blocks, avg, &i.to_string()).map_err(|e| format!("instance {i}: {e}"))?;
        all_pass(&report, "average")?;
        let value: Rational = bdlab_core::parse_rational(&report.records[0].lhs).map_err(|e| e.to_string())?;
        worst = worst.max(value);
    }
    ensure(instances.len() == 100, || format!("{} instances", instances.len()))?;
    Ok(format!("100 instances, max |average| = {worst} ≤ 20"))
}

fn c7_asymptotic_c0(pool: &Pool) -> Outcome {
    let families = c0_families(pool, 100, 0).map_err(|e| e.to_string())?;
    let k = ratio(230, 3);
    let mut worst = Rational::from_integer(0.into());
    for (i, family) in families.iter().enumerate() {
        let report = asymptotic_c0_check(pool, family, &i.to_string()).map_err(|e| format!("family {i}: {e}"))?;
        all_pass(&report, "c0")?;
        let value = bdlab_core::parse_rational(&report.records[0].lhs).map_err(|e| e.to_string())?;
        ensure(value <= k, || format!("family {i}: {value}"))?;
        worst = worst.max(value);
    }
    ensure(families.len() == 100, || format!("{} families", families.len()))?;
    Ok(format!("100 families, max seminorm = {worst} ≤ 230/3"))
}

fn c8_witness(pool: &Pool) -> Outcome {
    let top = pool.level(2)[0];
    let blocks = [
        BlockVector::basis(pool, pool.gamma0()).map_err(|e| e.to_string())?,
        BlockVector::basis(pool, top).map_err(|e| e.to_string())?,
    ];
    let w = build_theta_witness(pool, &blocks).map_err(|e| e.to_string())?;
    let two_fifths = ratio(2, 5);
    ensure(w.admissible, || "witness tuple is not admissible".into())?;
    ensure(w.achieved == two_fifths && w.predicted == two_fifths, || {
        format!("achieved {} predicted {}", w.achieved, w.predicted)
    })?;
    let step = type_ii_chain_step(pool, top).map_err(|e| e.to_string())?;
    ensure(step.n_floor == BigUint::from(30_625u32), || format!("chain floor {}", step.n_floor))?;
    Ok("achieved = predicted = 2/5, chain floor n ≥ 30625".into())
}

fn c9_subspace(space: &TruncatedSpace) -> Outcome {
    let eps = default_schedule(space);
    let schedule = pair_search(space, &eps).map_err(|e| e.to_string())?;
    let first = schedule.pairs.first().ok_or("no pair found")?;
    let d = first.max_distance();
    ensure(d == ratio(1, 180) && d < eps[0], || format!("first pair distance {d}, ε₁ = {}", eps[0]))?;
    let (z, report) = build_z(space, &schedule).map_err(|e| e.to_string())?;
    all_pass(&report, "build_z")?;
    ensure(report.find("build_z.a(").count() > 0, || "no inequality (a) records".into())?;
    ensure(z.dim(2) == 174, || format!("dim Z_2 = {}", z.dim(2)))?;
    let (_, q) = quotient_check(space, &schedule, &z).map_err(|e| e.to_string())?;
    for item in ["quotient_check.a(", "quotient_check.b(", "quotient_check.c("] {
        ensure(q.find(item).count() > 0 && q.find(item).all(|r| r.verdict == Verdict::Pass), || format!("{item} failed"))?;
    }
    Ok(format!("pair at distance 1/180 < ε₁ = {}, dim Z_2 = 174, quotient items pass", eps[0]))
}

fn c10_negative_controls() -> Outcome {
    let cases = [
        ("extension-row", "framework", "compatibility_check"),
        ("inadmissible-tuple", "x0", "validate_tuple("),
        ("biorthogonal-row", "framework", "duality_checks.biorthogonal("),
    ];
    for (fault, suite, record) in cases {
        let out = Command::new(env!("CARGO_BIN_EXE_bdlab"))
            .args(["verify", suite, "--set", &format!("fault={fault}"), "--set", "fdd_samples=10"])
            .output()
            .map_err(|e| e.to_string())?;
        ensure(out.status.code() == Some(1), || format!("{fault}: exit {:?}", out.status.code()))?;
        let stdout = String::from_utf8_lossy(&out.stdout);
        let named = stdout.lines().any(|l| {
            let f: Vec<&str> = l.split('\t').collect();
            f.len() >= 6 && f[1].starts_with(record) && f[4] == "FAIL" && f[5].starts_with("repro: bdlab verify")
        });
        ensure(named, || format!("{fault}: no failing {record} record"))?;
    }
    Ok("three faults each exit 1 with the expected failing record".into())
}

fn main() -> ExitCode {
    let mut failed = 0;
    let mut run = |n: usize, limit: u64, f: &mut dyn FnMut() -> Outcome| {
        let start = Instant::now();
        let outcome = f();
        let elapsed = start.elapsed();
        let within = elapsed <= Duration::from_secs(limit);
        let (verdict, detail) = match (&outcome, within) {
            (Ok(d), true) => ("PASS", d.clone()),
            (Ok(d), false) => ("FAIL", format!("over time limit; {d}")),
            (Err(e), _) => ("FAIL", e.clone()),
        };
        if verdict == "FAIL" {
            failed += 1;
        }
        println!("criterion {n:>2}  {verdict}  {:>7.2}s / {limit}s  {detail}", elapsed.as_secs_f64());
    };

    run(1, 5, &mut c1_counting);
    let (pool, space) = fixture();
    run(2, 10, &mut || c2_operator_norm(&space));
    run(3, 60, &mut || c3_duality(&space));
    run(4, 30, &mut || c4_fdd(&space));
    run(5, 30, &mut || c5_analysis(&pool, &space));
    run(6, 30, &mut || c6_averaging(&pool));
    run(7, 60, &mut || c7_asymptotic_c0(&pool));
    run(8, 5, &mut || c8_witness(&pool));
    run(9, 30, &mut || c9_subspace(&space));
    run(10, 10, &mut c10_negative_controls);

    if failed == 0 {
        println!("acceptance: 10/10 criteria passed");
        ExitCode::SUCCESS
    } else {
        println!("acceptance: {failed} of 10 criteria failed");
        ExitCode::FAILURE
    }
}
