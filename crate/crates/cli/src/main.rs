use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use bdlab_cli::{run_suite, CliError, Config, Context, ReportFile, Suite, EXIT_OK, EXIT_VERIFICATION_FAILED};
use bdlab_core::norm::build_theta_witness;
use bdlab_core::subspace::default_schedule;
use bdlab_core::x0::{level_cardinality, validate_tuple};
use bdlab_core::{format_rational, norm_interval, pair_search, BlockVector, Pool, X0Params};
use clap::{Parser, Subcommand};

#[derive(Parser)]
#[command(name = "bdlab", version, about = "Exact checks on truncated Bourgain-Delbaen spaces")]
struct Cli {
    /// `key = value` config file
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Override one config key, e.g. `--set Q=1`
    #[arg(long = "set", value_name = "KEY=VALUE", global = true)]
    sets: Vec<String>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print `q  #Δ_q  #Γ_q`
    Count { q: u32 },
    /// Write the canonical pool file of Δ_1..Δ_q
    Enumerate {
        q: u32,
        #[arg(long)]
        out: PathBuf,
    },
    /// Validate tuple records against a pool and append them
    Materialize {
        #[arg(long)]
        pool: PathBuf,
        /// Tuple records in pool format
        tuples: Vec<String>,
        /// Where to write the extended pool (defaults to stdout records only)
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Certified norm interval of a vector file (`digest coeff` lines)
    Norm {
        #[arg(long)]
        pool: PathBuf,
        vector: PathBuf,
    },
    /// Run a verification suite: framework, x0, norms, subspace or all
    Verify {
        suite: String,
        /// Also write the report to this file
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Greedy pair schedule on the truncation
    Pairs,
    /// Lower estimate for skipped blocks, one vector file per block
    Witness { blocks: Vec<PathBuf> },
    /// Re-read a report file and exit according to its records
    Report { file: PathBuf },
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::io(path, e))
}

fn write(path: &Path, text: &str) -> Result<(), CliError> {
    fs::write(path, text).map_err(|e| CliError::io(path, e))
}

fn load_config(cli: &Cli) -> Result<Config, CliError> {
    let mut cfg = match &cli.config {
        Some(path) => Config::parse(&read(path)?)?,
        None => Config::default(),
    };
    cfg.apply_overrides(cli.sets.iter().map(String::as_str))?;
    Ok(cfg)
}

fn pool_header(params: &X0Params) -> String {
    format!("# bdlab pool N={} theta={}\n", params.n(), format_rational(params.theta()))
}

fn load_pool(cfg: &Config, path: &Path) -> Result<Pool, CliError> {
    let text = read(path)?;
    let pool = Pool::from_records(cfg.params()?, text.lines())?;
    if pool.len() > cfg.pool_cap {
        return Err(CliError::PoolCap { len: pool.len(), cap: cfg.pool_cap });
    }
    Ok(pool)
}

/// Prints to stdout and returns the exit status.
fn run(cli: Cli) -> Result<u8, CliError> {
    let cfg = load_config(&cli)?;
    let params = cfg.params()?;
    let mut out = String::new();
    let mut status = EXIT_OK;
    match cli.command {
        Command::Count { q } => {
            let mut gamma = num_bigint::BigUint::from(0u32);
            for level in 0..=q {
                gamma += level_cardinality(level, &params);
            }
            out = format!("{q}\t{}\t{gamma}\n", level_cardinality(q, &params));
        }
        Command::Enumerate { q, out: path } => {
            let pool = Pool::exhaustive(params.clone(), q, &cfg.enum_budget)?;
            let mut body = pool_header(&params);
            for line in pool.to_records() {
                body.push_str(&line);
                body.push('\n');
            }
            write(&path, &body)?;
            for level in 0..=q {
                out.push_str(&format!("{level}\t{}\n", pool.level(level).len()));
            }
        }
        Command::Materialize { pool: path, tuples, out: target } => {
            let mut pool = load_pool(&cfg, &path)?;
            for text in &tuples {
                let code = pool.decode(text)?;
                validate_tuple(&code, &pool)?;
                let id = pool.materialize(code)?;
                let m = pool.member(id)?;
                out.push_str(&format!("{}\trank={}\tage={}\n", m.digest, m.rank, m.age));
            }
            if let Some(target) = target {
                let mut body = pool_header(&params);
                for line in pool.to_records() {
                    body.push_str(&line);
                    body.push('\n');
                }
                write(&target, &body)?;
            }
        }
        Command::Norm { pool, vector } => {
            let pool = load_pool(&cfg, &pool)?;
            let text = read(&vector)?;
            let x = BlockVector::from_records(&pool, text.lines())?;
            let ni = norm_interval(&pool, &x)?;
            out = format!(
                "interval\t{}\nlower\t{}\twitness={}\nupper\t{}\tmethod={}\n",
                ni,
                format_rational(&ni.lower),
                pool.digest(ni.lower_witness)?,
                format_rational(&ni.upper),
                ni.upper_method
            );
        }
        Command::Verify { suite, out: target } => {
            let suite: Suite = suite.parse()?;
            let ctx = Context::build(&cfg)?;
            let report = run_suite(&ctx, suite)?;
            if !report.passed() {
                status = EXIT_VERIFICATION_FAILED;
            }
            out = ReportFile::new(&cfg, &suite.to_string(), report).render();
            if let Some(target) = target {
                write(&target, &out)?;
            }
        }
        Command::Pairs => {
            let ctx = Context::build(&cfg)?;
            let eps = cfg.eps.clone().unwrap_or_else(|| default_schedule(&ctx.space));
            let schedule = pair_search(&ctx.space, &eps)?;
            for c in &schedule.pairs {
                out.push_str(&format!(
                    "{}\tlevel={}\t{}\t{}\tdistance={}\teps={}\n",
                    c.step,
                    c.level,
                    ctx.pool.digest(c.gamma1)?,
                    ctx.pool.digest(c.gamma2)?,
                    format_rational(&c.max_distance()),
                    format_rational(&eps[c.step - 1])
                ));
            }
            if let Some(step) = schedule.exhausted_at {
                out.push_str(&format!("{step}\texhausted\n"));
            }
        }
        Command::Witness { blocks } => {
            let ctx = Context::build(&cfg)?;
            let pool = &ctx.pool;
            let vectors = if blocks.is_empty() {
                if cfg.q < 2 {
                    return Err(CliError::Config("the default witness needs Q >= 2".into()));
                }
                vec![BlockVector::basis(pool, pool.gamma0())?, BlockVector::basis(pool, pool.level(cfg.q)[0])?]
            } else {
                blocks
                    .iter()
                    .map(|p| Ok(BlockVector::from_records(pool, read(p)?.lines())?))
                    .collect::<Result<Vec<_>, CliError>>()?
            };
            let w = build_theta_witness(pool, &vectors)?;
            out.push_str(&format!("gamma\t{}\n", pool.encode(&w.gamma)?));
            out.push_str(&format!("admissible\t{}\n", w.admissible));
            out.push_str(&format!("achieved\t{}\n", format_rational(&w.achieved)));
            out.push_str(&format!("predicted\t{}\n", format_rational(&w.predicted)));
            for (i, (delta, window, value)) in w.witnesses.iter().enumerate() {
                out.push_str(&format!(
                    "block {i}\t{}\t[{}, {}]\t{}\n",
                    pool.digest(*delta)?,
                    window.lo,
                    window.hi,
                    format_rational(value)
                ));
            }
            out.push_str(&format!("chain_floor\trank={}\tn>={}\n", w.chain.base_rank, w.chain.n_floor));
            if !w.admissible {
                status = EXIT_VERIFICATION_FAILED;
            }
        }
        Command::Report { file } => {
            let report = ReportFile::parse(&read(&file)?)?;
            if !report.report.passed() {
                status = EXIT_VERIFICATION_FAILED;
                for r in report.report.failures() {
                    out.push_str(&r.to_line());
                    out.push_str(&format!("\trepro: {}\n", report.repro));
                }
            }
            out.push_str(&format!(
                "# summary pass={} fail={} info={}\n",
                report.report.count(bdlab_core::Verdict::Pass),
                report.report.count(bdlab_core::Verdict::Fail),
                report.report.count(bdlab_core::Verdict::Info)
            ));
        }
    }
    io::stdout().lock().write_all(out.as_bytes()).map_err(|e| CliError::io(Path::new("<stdout>"), e))?;
    Ok(status)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("bdlab: {e}");
            e.into()
        }
    }
}
