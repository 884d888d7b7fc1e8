use std::fmt;
use std::str::FromStr;
use std::thread;

use bdlab_core::exact::{int, ratio};
use bdlab_core::norm::{asymptotic_c0_check, avg_bound_check, build_theta_witness, type_ii_chain_step, Evaluator};
use bdlab_core::sample::{avg_instances, c0_families, coordinate_vectors};
use bdlab_core::subspace::default_schedule;
use bdlab_core::x0::{analysis, enumerate_level, level_cardinality, recompose_row, Entry, Sign};
use bdlab_core::{
    build_z, format_rational, functional_distance, norm_interval, op_norm_inf, pair_search, quotient_check,
    row_l1_norm, sup_norm, BlockVector, GammaId, Interval, Pool, Rational, SparseRow, TupleCode,
    VerificationReport,
};
use num_bigint::BigUint;

use crate::{CliError, Context, Fault};

type SuiteResult = Result<VerificationReport, CliError>;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    Framework,
    X0,
    Norms,
    Subspace,
    All,
}

impl FromStr for Suite {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Suite, CliError> {
        match s {
            "framework" => Ok(Suite::Framework),
            "x0" => Ok(Suite::X0),
            "norms" => Ok(Suite::Norms),
            "subspace" => Ok(Suite::Subspace),
            "all" => Ok(Suite::All),
            other => Err(CliError::Config(format!("unknown suite {other:?}"))),
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Suite::Framework => "framework",
            Suite::X0 => "x0",
            Suite::Norms => "norms",
            Suite::Subspace => "subspace",
            Suite::All => "all",
        })
    }
}

/// Runs one suite, or all four in parallel with reports merged in a fixed order.
pub fn run_suite(ctx: &Context, suite: Suite) -> SuiteResult {
    match suite {
        Suite::Framework => framework(ctx),
        Suite::X0 => x0(ctx),
        Suite::Norms => norms(ctx),
        Suite::Subspace => subspace(ctx),
        Suite::All => {
            let parts: Vec<SuiteResult> = thread::scope(|s| {
                let handles = [
                    s.spawn(|| framework(ctx)),
                    s.spawn(|| x0(ctx)),
                    s.spawn(|| norms(ctx)),
                    s.spawn(|| subspace(ctx)),
                ];
                handles.into_iter().map(|h| h.join().expect("suite thread panicked")).collect()
            });
            let mut report = VerificationReport::new();
            for part in parts {
                report.merge(part?);
            }
            Ok(report)
        }
    }
}

fn fmt_ratio(r: &Rational) -> String {
    format_rational(r)
}

fn framework(ctx: &Context) -> SuiteResult {
    const S: &str = "framework";
    let q = ctx.cfg.q;
    let params = ctx.pool.params();
    let c = params.c_const();
    let mut space = ctx.space.clone();
    if ctx.cfg.fault == Some(Fault::ExtensionRow) {
        let target = space.structure().level(q)[0];
        let m = space.ext_mut(0, q);
        let mut row = m.row(target);
        row.add_at(ctx.pool.gamma0(), &ratio(1, 1000));
        m.set_row(target, row);
    }

    let mut report = space.compatibility_check();

    for p in 0..=q {
        let norm = op_norm_inf(space.ext(p, q));
        report.push(S, format!("op_norm(i_{{{p},{q}}})"), fmt_ratio(&norm), format!("≤ {}", fmt_ratio(&c)), norm <= c);
    }
    let cb = space.c_bound().clone();
    report.push(S, "c_bound", fmt_ratio(&cb), format!("≤ {}", fmt_ratio(&c)), cb <= c);

    let samples = coordinate_vectors(&space, ctx.cfg.fdd_samples, ctx.cfg.seed);
    let fdd = space.fdd_check(&samples);
    report.merge(fdd.report);
    let two_c = params.projection_const();
    report.push(
        S,
        "fdd_check.max_initial_ratio",
        fmt_ratio(&fdd.max_initial_ratio),
        format!("≤ {}", fmt_ratio(&c)),
        fdd.max_initial_ratio <= c,
    );
    report.push(
        S,
        "fdd_check.max_interval_ratio",
        fmt_ratio(&fdd.max_interval_ratio),
        format!("≤ {}", fmt_ratio(&two_c)),
        fdd.max_interval_ratio <= two_c,
    );

    // P_{q} d_γ = d_γ exactly when rank γ = q
    let ids = space.structure().all();
    for level in 0..=q {
        let mut bad = 0usize;
        for &id in &ids {
            let d = space.d_vector(id)?;
            let projected = space.bd_projection(Interval::single(level), &d)?;
            let expect = if space.rank(id)? == level { d } else { SparseRow::new() };
            bad += usize::from(projected != expect);
        }
        report.push(S, format!("bd_projection.blocks(q={level})"), format!("{bad} mismatches"), "0", bad == 0);
    }
    let whole = Interval::new(0, q);
    let mut bad = 0usize;
    for x in samples.iter().take(20) {
        bad += usize::from(&space.bd_projection(whole, x)? != x);
    }
    report.push(S, format!("bd_projection.identity([0,{q}])"), format!("{bad} mismatches"), "0", bad == 0);

    let mut triples = space.dual_triples();
    let max_d = triples.values().map(|t| row_l1_norm(&t.d_row)).max().unwrap_or_default();
    let two_cb = &cb * int(2);
    report.push(
        S,
        "dual_rows.max_l1",
        fmt_ratio(&max_d),
        format!("≤ {} (≤ {})", fmt_ratio(&two_cb), fmt_ratio(&two_c)),
        max_d <= two_cb && max_d <= two_c,
    );
    if ctx.cfg.fault == Some(Fault::BiorthogonalRow) {
        let g0 = ctx.pool.gamma0();
        let victim = ids.last().copied().unwrap_or(g0);
        let t = triples.get_mut(&g0).expect("atom present");
        t.d_row.add_at(victim, &ratio(1, 1000));
    }
    report.merge(space.duality_checks_with(&triples));

    let l1 = space.structure().level(1.min(q)).to_vec();
    let mut families: Vec<Vec<(GammaId, Rational)>> = vec![vec![(ctx.pool.gamma0(), int(1))]];
    if q >= 1 && l1.len() >= 2 {
        families.push(vec![(ctx.pool.gamma0(), int(1)), (l1[0], int(1))]);
        families.push(vec![(l1[0], int(1)), (l1[1], int(-1))]);
    }
    for (i, lambda) in families.iter().enumerate() {
        let w = space.ell1_lower_witness(lambda)?;
        let floor = &w.upper_bound / &cb;
        let ok = w.pairing == w.upper_bound && w.witness_norm <= cb && w.lower_bound >= floor;
        report.push(
            S,
            format!("ell1_lower_witness[{i}]"),
            format!("pairing={} witness_norm={} lower={}", fmt_ratio(&w.pairing), fmt_ratio(&w.witness_norm), fmt_ratio(&w.lower_bound)),
            format!("pairing=Σ|λ|={}, lower ≥ {}", fmt_ratio(&w.upper_bound), fmt_ratio(&floor)),
            ok,
        );
    }
    Ok(report)
}

fn x0(ctx: &Context) -> SuiteResult {
    const S: &str = "x0";
    let params = ctx.pool.params();
    let q = ctx.cfg.q;
    let mut report = VerificationReport::new();

    let c0 = level_cardinality(0, params);
    report.push(S, "count.level(q=0)", &c0, 1, c0 == BigUint::from(1u32));
    for level in 1..=q {
        let listed = enumerate_level(&ctx.pool, level, &ctx.cfg.enum_budget)?;
        let expected = level_cardinality(level, params);
        report.push(S, format!("count.level(q={level})"), listed.len(), &expected, BigUint::from(listed.len()) == expected);
        let stored: Vec<&TupleCode> =
            ctx.pool.level(level).iter().map(|&id| ctx.pool.code(id).map(|c| c.expect("tuple"))).collect::<Result<_, _>>()?;
        let same = stored.len() == listed.len() && stored.iter().zip(&listed).all(|(a, b)| *a == b);
        report.push(S, format!("enumerate.canonical(q={level})"), same, true, same);
    }
    report.push(S, format!("count.gamma(q={q})"), ctx.pool.len(), ctx.pool.gamma_count(q), BigUint::from(ctx.pool.len()) == ctx.pool.gamma_count(q));
    report.info(S, format!("count.level(q={})", q + 1), level_cardinality(q + 1, params), "not enumerated");

    let mut pool = ctx.pool.clone();
    if ctx.cfg.fault == Some(Fault::InadmissibleTuple) {
        let bad = TupleCode::type_i(1, 2u32, vec![Entry::new(Sign::Plus, Interval::single(0), pool.gamma0())]);
        pool.insert_unvalidated(bad)?;
    }
    let offenders = pool.revalidate();
    for (id, err) in &offenders {
        report.push(S, format!("validate_tuple({})", pool.digest(*id)?), err, "admissible", false);
    }
    report.push(S, "validate_tuple.all", format!("{} offenders", offenders.len()), "0", offenders.is_empty());

    let mut round_trip_bad = 0usize;
    for id in pool.ids().skip(1) {
        let code = pool.code(id)?.expect("tuple");
        let text = pool.encode(code)?;
        let ok = pool.decode(&text).as_ref() == Ok(code) && pool.by_digest(pool.digest(id)?) == Ok(id);
        round_trip_bad += usize::from(!ok);
    }
    report.push(S, "encode.round_trip", format!("{round_trip_bad} mismatches"), "0", round_trip_bad == 0);

    let mut unfaithful = Vec::new();
    for id in ctx.pool.ids().skip(1) {
        let a = analysis(id, &ctx.pool)?;
        report.merge(a.verify(&ctx.pool));
        if recompose_row(&a, &ctx.pool, &ctx.space)? != SparseRow::unit(id) {
            unfaithful.push(id.to_string());
        }
    }
    report.push(
        S,
        "analysis.faithful",
        if unfaithful.is_empty() { format!("{} rows reproduced", ctx.pool.len() - 1) } else { unfaithful.join(",") },
        "e_γ* rows",
        unfaithful.is_empty(),
    );

    if q >= 2 {
        report.merge(age_chain(&ctx.pool)?);
    }

    report.info(S, "constant.C", fmt_ratio(&params.c_const()), "N/(N-2θ)");
    report.info(S, "constant.projection", fmt_ratio(&params.projection_const()), "2N/(N-2θ)");
    report.info(S, "constant.average", fmt_ratio(&params.average_const()), "4N/(N-2θ)");
    report.info(S, "constant.K", fmt_ratio(&params.k_const()), "K_{N,θ}");
    Ok(report)
}

/// Builds the TypeII chain over `δ⁺` up to age `N` on scratch levels and
/// checks that one more step is refused.
fn age_chain(base_pool: &Pool) -> SuiteResult {
    const S: &str = "x0";
    let mut report = VerificationReport::new();
    let mut pool = base_pool.clone();
    let n = pool.params().n();
    let mut xi = pool.level(1)[0];
    let mut eta = pool.level(2)[0];
    let mut age = 1;
    report.push(S, "age_chain(age=1)", pool.member(xi)?.age, 1, pool.member(xi)?.age == 1);
    loop {
        let rank = pool.rank(eta)? + 1;
        let base_rank = pool.rank(xi)?;
        let floor = pool.gamma_count(base_rank);
        let code = TupleCode::type_ii(rank, xi, &floor * &floor, vec![Entry::new(Sign::Plus, Interval::single(rank - 1), eta)]);
        if age == n {
            let refused = pool.materialize(code);
            let ok = matches!(refused, Err(bdlab_core::Error::AgeExhausted(a)) if a == n);
            let lhs = match &refused {
                Ok(id) => format!("accepted as {id}"),
                Err(e) => e.to_string(),
            };
            report.push(S, "age_chain.exhausted", lhs, format!("refused at age {n}"), ok);
            break;
        }
        xi = pool.materialize(code)?;
        age += 1;
        let got = pool.member(xi)?.age;
        report.push(S, format!("age_chain(age={age})"), got, age, got == age);
        let next = TupleCode::type_i(rank + 1, 1u32, vec![Entry::new(Sign::Plus, Interval::single(rank), xi)]);
        eta = pool.materialize(next)?;
    }
    let top = pool.max_rank();
    let wide = TupleCode::type_i(
        top + 1,
        1_000_000_000u64,
        vec![
            Entry::new(Sign::Plus, Interval::single(0), pool.gamma0()),
            Entry::new(Sign::Minus, Interval::new(1, top), eta),
        ],
    );
    let id = pool.materialize(wide)?;
    report.push(S, format!("materialize.type_i(rank={},k=2)", top + 1), pool.member(id)?.age, 1, pool.member(id)?.age == 1);
    Ok(report)
}

fn norms(ctx: &Context) -> SuiteResult {
    const S: &str = "norms";
    let pool = &ctx.pool;
    let params = pool.params();
    let theta_n = params.theta_over_n();
    let mut report = VerificationReport::new();
    let g0 = pool.gamma0();
    let d0 = BlockVector::basis(pool, g0)?;

    if ctx.cfg.q >= 1 {
        let plus = pool.level(1)[0];
        let dp = BlockVector::basis(pool, plus)?;
        let cases = [("eval(γ0,d_γ0)", g0, &d0, int(1)), ("eval(δ+,d_γ0)", plus, &d0, theta_n.clone()), ("eval(γ0,d_δ+)", g0, &dp, int(0))];
        for (name, id, x, expected) in cases {
            let v = bdlab_core::eval(pool, id, Interval::ALL, x)?;
            report.push(S, name, fmt_ratio(&v), fmt_ratio(&expected), v == expected);
        }
    }

    // the recursion against coordinates computed through the extension operators
    let samples = coordinate_vectors(&ctx.space, 21, ctx.cfg.seed);
    let intervals = bdlab_core::interval::all_subintervals(ctx.cfg.q);
    for (i, coeffs) in samples.iter().enumerate().skip(1) {
        let x = BlockVector::new(pool, coeffs.clone())?;
        let coords = x.coords(&ctx.space)?;
        let mut ev = Evaluator::new(pool, &x);
        let mut bad = 0usize;
        let check_projections = i <= 5;
        for id in pool.ids() {
            bad += usize::from(ev.eval(id, Interval::ALL)? != coords.get(id));
            if check_projections {
                for e in &intervals {
                    let projected = ctx.space.bd_projection(*e, &coords)?;
                    bad += usize::from(ev.eval(id, *e)? != projected.get(id));
                }
            }
        }
        report.push(S, format!("eval.oracle[sample={i}]"), format!("{bad} mismatches"), "0", bad == 0);

        let ni = norm_interval(pool, &x)?;
        let coord_sup = sup_norm(&coords);
        report.push(
            S,
            format!("norm_interval[sample={i}]"),
            ni.to_string(),
            format!("lower = ‖r_Q x‖ = {}, lower ≤ upper", fmt_ratio(&coord_sup)),
            ni.lower == coord_sup && ni.lower <= ni.upper,
        );
    }

    let c = params.c_const();
    let examples = [("d_γ0", d0.clone(), int(1), c.clone()), ("0", BlockVector::zero(), int(0), int(0)), ("(θ/N)d_γ0", d0.scale(&theta_n), theta_n.clone(), &theta_n * &c)];
    for (name, x, lo, hi) in examples {
        let ni = norm_interval(pool, &x)?;
        report.push(S, format!("norm_interval({name})"), ni.to_string(), format!("[{}, {}]", fmt_ratio(&lo), fmt_ratio(&hi)), ni.lower == lo && ni.upper == hi);
    }
    if ctx.cfg.q >= 1 {
        let l1 = pool.level(1);
        let diff = BlockVector::new(pool, SparseRow::from_entries([(l1[0], int(1)), (l1[1], int(-1))]))?;
        report.info(S, "norm_interval(d_δ+ − d_δ−)", norm_interval(pool, &diff)?, "");
    }

    for (i, (blocks, avg)) in avg_instances(pool, ctx.cfg.avg_samples, ctx.cfg.seed)?.iter().enumerate() {
        let tag = format!("sample={i}");
        match avg_bound_check(pool, blocks, avg, &tag) {
            Ok(r) => report.merge(r),
            Err(e) => report.push(S, format!("avg_bound_check[{tag}]"), e, "admissible instance", false),
        }
    }
    for (i, family) in c0_families(pool, ctx.cfg.c0_samples, ctx.cfg.seed)?.iter().enumerate() {
        let tag = format!("sample={i}");
        match asymptotic_c0_check(pool, family, &tag) {
            Ok(r) => report.merge(r),
            Err(e) => report.push(S, format!("asymptotic_c0_check[{tag}]"), e, "admissible family", false),
        }
    }

    if ctx.cfg.q >= 2 {
        let top = pool.level(ctx.cfg.q)[0];
        let w = build_theta_witness(pool, &[d0.clone(), BlockVector::basis(pool, top)?])?;
        report.push(S, "theta_witness.admissible", w.admissible, true, w.admissible);
        report.push(S, "theta_witness.achieved", fmt_ratio(&w.achieved), fmt_ratio(&w.predicted), w.achieved == w.predicted);
        report.push(S, "theta_witness.predicted", fmt_ratio(&w.predicted), fmt_ratio(&theta_n), w.predicted == theta_n);
        report.info(S, "theta_witness.gamma", pool.encode(&w.gamma)?, "");
        report.info(S, format!("theta_witness.chain_floor(rank={})", w.chain.base_rank), &w.chain.n_floor, "");

        let step = type_ii_chain_step(pool, top)?;
        let pool_size = BigUint::from(pool.len());
        let oracle = &pool_size * &pool_size;
        report.push(S, format!("chain_step.n_floor(rank={})", step.base_rank), &step.n_floor, format!("(#Γ_{})² = {oracle}", ctx.cfg.q), step.n_floor == oracle);
    }
    Ok(report)
}

fn subspace(ctx: &Context) -> SuiteResult {
    const S: &str = "subspace";
    let space = &ctx.space;
    let mut report = VerificationReport::new();
    let theta_n = ctx.pool.params().theta_over_n();

    if ctx.cfg.q >= 1 {
        let l1 = ctx.pool.level(1);
        let d = functional_distance(space, l1[0], l1[1], 0)?;
        let expected = &theta_n * int(2);
        report.push(S, "functional_distance(δ+,δ−,p=0)", fmt_ratio(&d), fmt_ratio(&expected), d == expected);
        let same = functional_distance(space, l1[0], l1[0], 0)?;
        report.push(S, "functional_distance(δ+,δ+,p=0)", fmt_ratio(&same), "0", same == int(0));
    }

    let eps = ctx.cfg.eps.clone().unwrap_or_else(|| default_schedule(space));
    let schedule = pair_search(space, &eps)?;
    for c in &schedule.pairs {
        let e = &eps[c.step - 1];
        let d = c.max_distance();
        report.push(
            S,
            format!("pair_search(s={})", c.step),
            format!("{} ({},{}) at level {}", fmt_ratio(&d), ctx.pool.digest(c.gamma1)?, ctx.pool.digest(c.gamma2)?, c.level),
            format!("< {}", fmt_ratio(e)),
            &d < e,
        );
    }
    if let Some(step) = schedule.exhausted_at {
        report.info(S, "pair_search.exhausted_at", step, "no further pair inside the truncation");
    }
    report.merge(schedule.recheck(space)?);

    let (z, z_report) = build_z(space, &schedule)?;
    report.merge(z_report);
    for level in 0..=ctx.cfg.q {
        report.info(S, format!("dim Z_{level}"), z.dim(level), "");
    }
    let (_, q_report) = quotient_check(space, &schedule, &z)?;
    report.merge(q_report);
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Config;

    #[test]
    fn suite_names() {
        for s in ["framework", "x0", "norms", "subspace", "all"] {
            assert_eq!(s.parse::<Suite>().unwrap().to_string(), s);
        }
        assert!("bogus".parse::<Suite>().is_err());
    }

    #[test]
    fn small_truncation_passes() {
        let mut cfg = Config::default();
        cfg.apply_overrides(["Q=1", "fdd_samples=20", "avg_samples=10", "c0_samples=10"]).unwrap();
        let ctx = Context::build(&cfg).unwrap();
        let report = run_suite(&ctx, Suite::All).unwrap();
        assert!(report.passed(), "{report}");
    }
}
