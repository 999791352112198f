use std::fs;
use std::io::{self, Read, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use num_rational::BigRational;
use serde_json::json;

use respart::dist::{dist_even_even, dist_even_odd, dist_odd_odd, generating_function_audit, limit_dist, LimitKind};
use respart::experiment::{default_poisson_mean, run_experiment, Comparison, Engine, ExperimentConfig};
use respart::fourier::{conflict_bound_check, expected_count};
use respart::gf2::{count_partitions_q2, Q2Condition};
use respart::modq::{exhaustive_lemma_audit, AuditMode};
use respart::partition::{count_good, enumerate_good, parse_multiplicities};
use respart::pmf::{ratio_to_f64, sig15};
use respart::{Graph, PartitionSpec, Probability, RationalPmf};

#[derive(Parser, Debug)]
#[command(name = "respart", version, about = "Residue-constrained vertex partitions of random graphs")]
struct Cli {
    /// Output format; defaults to json for simulate and verify-algebra, table otherwise.
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,

    /// Write output to a file instead of stdout.
    #[arg(long, short, global = true)]
    output: Option<PathBuf>,

    /// Worker thread cap (results do not depend on it).
    #[arg(long, global = true, env = "RESPART_THREADS")]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
    Table,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Count (and optionally list) good partitions of one graph.
    Count(CountArgs),
    /// Exact or limiting distribution of a q = 2 count.
    Dist(DistArgs),
    /// Monte Carlo over G(n, p).
    Simulate(SimulateArgs),
    /// Exact first moment E[X_n] for G(n, 1/2).
    Moment(MomentArgs),
    /// Algebraic audits: sum inequality, generating function, conflict bound.
    VerifyAlgebra(VerifyArgs),
}

#[derive(Args, Debug)]
struct SpecArgs {
    /// Modulus q.
    #[arg(long, requires = "a", conflicts_with = "q2")]
    q: Option<u32>,
    /// Part multiplicities a_0,...,a_{q-1}, summing to q.
    #[arg(long, requires = "q")]
    a: Option<String>,
    /// Shorthand for q = 2: even-even, even-odd or odd-odd.
    #[arg(long)]
    q2: Option<Q2Condition>,
}

impl SpecArgs {
    fn spec(&self) -> Result<PartitionSpec> {
        match (self.q, &self.a, self.q2) {
            (_, _, Some(cond)) => Ok(PartitionSpec::q2(cond)),
            (Some(q), Some(a), None) => Ok(PartitionSpec::new(q, parse_multiplicities(a)?)?),
            _ => bail!("give a partition spec with --q Q --a a0,a1,... or --q2 CONDITION"),
        }
    }
}

#[derive(Args, Debug)]
struct CountArgs {
    /// Edge-list file ("n m" header, then 1-indexed "u v" lines); stdin if absent or "-".
    #[arg(long)]
    edges: Option<PathBuf>,
    #[command(flatten)]
    spec: SpecArgs,
    /// List the canonical partitions as well.
    #[arg(long)]
    enumerate: bool,
    #[arg(long, default_value = "auto")]
    engine: Engine,
}

#[derive(Args, Debug)]
struct DistArgs {
    /// Parity condition for finite n.
    #[arg(long, required_unless_present = "limit")]
    q2: Option<Q2Condition>,
    #[arg(long, required_unless_present = "limit")]
    n: Option<u32>,
    /// Use the n -> infinity law instead.
    #[arg(long)]
    limit: bool,
    /// Limit law: X (even-even, even-odd) or Z (odd-odd); inferred from --q2 when given.
    #[arg(long)]
    kind: Option<LimitKind>,
    /// Largest exponent k in the truncated limit law.
    #[arg(long, default_value_t = 20)]
    kmax: u32,
}

#[derive(Args, Debug)]
struct SimulateArgs {
    #[arg(long)]
    n: usize,
    /// Edge probability as NUM/DEN.
    #[arg(long, default_value = "1/2")]
    p: Probability,
    #[command(flatten)]
    spec: SpecArgs,
    #[arg(long, default_value_t = 10_000)]
    trials: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value = "auto")]
    engine: Engine,
    /// Comparisons: exact, limit, poisson or poisson:LAMBDA (repeatable or comma separated).
    #[arg(long = "compare", value_delimiter = ',')]
    compare: Vec<Comparison>,
}

#[derive(Args, Debug)]
struct MomentArgs {
    #[arg(long)]
    n: usize,
    #[command(flatten)]
    spec: SpecArgs,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    /// Modulus for the sum-inequality audit.
    #[arg(long, requires = "k")]
    q: Option<u32>,
    /// Dimension k of the box [q]^k.
    #[arg(long, requires = "q")]
    k: Option<usize>,
    /// Audit every non-empty subset of [q]^k.
    #[arg(long, conflicts_with = "sampled")]
    exhaustive: bool,
    /// Audit this many random subsets instead.
    #[arg(long)]
    sampled: Option<u64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Check the generating function of the limit law.
    #[arg(long)]
    gf_audit: bool,
    #[arg(long, default_value_t = 60)]
    terms: u32,
    /// Check cos(pi/q) <= exp(-1/q^2).
    #[arg(long)]
    conflict_bound: bool,
    #[arg(long, default_value_t = 64)]
    qmax: u32,
}

struct Output {
    text: String,
    ok: bool,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(out) => {
            let written = match &cli.output {
                Some(path) => fs::write(path, &out.text).with_context(|| format!("writing {}", path.display())),
                None => io::stdout().write_all(out.text.as_bytes()).context("writing stdout"),
            };
            if let Err(e) = written {
                eprintln!("error: {e:#}");
                return ExitCode::from(2);
            }
            if out.ok {
                ExitCode::SUCCESS
            } else {
                eprintln!("verification failed");
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: &Cli) -> Result<Output> {
    if let Some(t) = cli.threads {
        if t == 0 {
            bail!("--threads must be positive");
        }
        rayon::ThreadPoolBuilder::new().num_threads(t).build_global().context("configuring thread pool")?;
    }
    match &cli.command {
        Command::Count(a) => cmd_count(a, cli.format.unwrap_or(Format::Table)),
        Command::Dist(a) => cmd_dist(a, cli.format.unwrap_or(Format::Table)),
        Command::Simulate(a) => cmd_simulate(a, cli.format.unwrap_or(Format::Json)),
        Command::Moment(a) => cmd_moment(a, cli.format.unwrap_or(Format::Table)),
        Command::VerifyAlgebra(a) => cmd_verify(a, cli.format.unwrap_or(Format::Json)),
    }
}

fn ok(text: String) -> Result<Output> {
    Ok(Output { text, ok: true })
}

fn to_json(v: &impl serde::Serialize) -> Result<String> {
    Ok(serde_json::to_string_pretty(v)? + "\n")
}

fn read_graph(path: &Option<PathBuf>) -> Result<Graph> {
    let text = match path {
        Some(p) if p.as_os_str() != "-" => fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?,
        _ => {
            let mut s = String::new();
            io::stdin().read_to_string(&mut s).context("reading stdin")?;
            s
        }
    };
    let source = path.as_ref().map_or("stdin".to_string(), |p| p.display().to_string());
    Graph::parse_edge_list(&text).with_context(|| format!("parsing {source}"))
}

fn cmd_count(a: &CountArgs, format: Format) -> Result<Output> {
    let g = read_graph(&a.edges)?;
    let spec = a.spec.spec()?;
    let use_gf2 = match a.engine {
        Engine::Gf2 if spec.q2_condition().is_none() => bail!("the gf2 engine needs q = 2, but the spec is {spec}"),
        Engine::Gf2 => true,
        Engine::Auto => spec.q2_condition().is_some() && !a.enumerate,
        Engine::BruteForce => false,
    };
    let (count, engine) = match (use_gf2, spec.q2_condition()) {
        (true, Some(cond)) => (count_partitions_q2(&g, cond).to_string(), "gf2"),
        _ => (count_good(&g, &spec)?.to_string(), "bruteforce"),
    };
    let parts: Vec<String> =
        if a.enumerate { enumerate_good(&g, &spec)?.iter().map(ToString::to_string).collect() } else { Vec::new() };
    let text = match format {
        Format::Json => to_json(&json!({
            "n": g.n(),
            "edges": g.edge_count(),
            "spec": spec.to_string(),
            "engine": engine,
            "count": count,
            "partitions": if a.enumerate { Some(&parts) } else { None },
        }))?,
        Format::Csv => {
            if a.enumerate {
                let mut s = String::from("partition\n");
                for p in &parts {
                    s.push_str(&format!("\"{p}\"\n"));
                }
                s
            } else {
                format!("count\n{count}\n")
            }
        }
        Format::Table => {
            let mut s = format!("{count}\n");
            for p in &parts {
                s.push_str(&format!("{p}\n"));
            }
            s
        }
    };
    ok(text)
}

fn pmf_rows(pmf: &RationalPmf) -> Vec<(String, String, f64)> {
    pmf.iter().map(|(v, m)| (v.to_string(), m.to_string(), sig15(ratio_to_f64(m)))).collect()
}

fn render_pmf(pmf: &RationalPmf, tail_bound: Option<f64>, header: &str, format: Format) -> Result<String> {
    Ok(match format {
        Format::Json => {
            let mut v = serde_json::to_value(pmf.to_json())?;
            if let Some(t) = tail_bound {
                v["tail_bound"] = json!(t);
            }
            v["description"] = json!(header);
            to_json(&v)?
        }
        Format::Csv => {
            let mut s = String::from("value,mass_num,mass_den,mass\n");
            for (v, m) in pmf.iter() {
                s.push_str(&format!("{v},{},{},{}\n", m.numer(), m.denom(), sig15(ratio_to_f64(m))));
            }
            s
        }
        Format::Table => {
            let rows = pmf_rows(pmf);
            let wv = rows.iter().map(|r| r.0.len()).max().unwrap_or(0).max(5);
            let wm = rows.iter().map(|r| r.1.len()).max().unwrap_or(0).max(4);
            let mut s = format!("# {header}\n{:>wv$}  {:>wm$}  decimal\n", "value", "mass");
            for (v, m, d) in rows {
                s.push_str(&format!("{v:>wv$}  {m:>wm$}  {d:.15e}\n"));
            }
            if let Some(t) = tail_bound {
                s.push_str(&format!("# omitted mass <= {t:.3e}\n"));
            }
            s
        }
    })
}

fn cmd_dist(a: &DistArgs, format: Format) -> Result<Output> {
    if a.limit {
        let kind = match (a.kind, a.q2) {
            (Some(k), _) => k,
            (None, Some(Q2Condition::OddOdd)) => LimitKind::Z,
            (None, Some(_)) => LimitKind::X,
            (None, None) => bail!("--limit needs --kind X|Z or --q2"),
        };
        let t = limit_dist(kind, a.kmax);
        let header = format!("limit law {kind}, k <= {}", a.kmax);
        return ok(render_pmf(&t.pmf, Some(t.tail_bound), &header, format)?);
    }
    let (Some(cond), Some(n)) = (a.q2, a.n) else {
        bail!("give --q2 and --n, or --limit");
    };
    let pmf = match cond {
        Q2Condition::EvenEven => dist_even_even(n)?,
        Q2Condition::EvenOdd => dist_even_odd(n)?,
        Q2Condition::OddOdd => dist_odd_odd(n)?,
    };
    ok(render_pmf(&pmf, None, &format!("{} count, n = {n}", cond.as_str()), format)?)
}

fn cmd_simulate(a: &SimulateArgs, format: Format) -> Result<Output> {
    let cfg = ExperimentConfig {
        n: a.n,
        p: a.p,
        spec: a.spec.spec()?,
        trials: a.trials,
        seed: a.seed,
        engine: a.engine,
        comparisons: a.compare.clone(),
    };
    let report = run_experiment(&cfg)?;
    for c in &report.comparisons {
        eprintln!("{}: tv = {}", c.name, c.tv);
    }
    ok(match format {
        Format::Json => to_json(&report)?,
        Format::Csv => report.histogram_csv(),
        Format::Table => {
            let mut s = format!("# n = {}, {}, trials = {}, seed = {}\n", a.n, cfg.spec, a.trials, a.seed);
            s.push_str(&format!("{:>12}  {:>10}  frequency\n", "value", "count"));
            for c in &report.histogram {
                s.push_str(&format!("{:>12}  {:>10}  {}\n", c.value, c.count, c.frequency));
            }
            s.push_str(&format!("# mean = {} (se {})\n", report.mean, report.mean_standard_error));
            for c in &report.comparisons {
                s.push_str(&format!("# {}: tv = {}\n", c.name, c.tv));
            }
            s
        }
    })
}

fn cmd_moment(a: &MomentArgs, format: Format) -> Result<Output> {
    let spec = a.spec.spec()?;
    let e = expected_count(a.n, &spec)?;
    let dec = sig15(ratio_to_f64(&e));
    let limit: Option<BigRational> = default_poisson_mean(&spec).ok();
    ok(match format {
        Format::Json => to_json(&json!({
            "n": a.n,
            "spec": spec.to_string(),
            "num": e.numer().to_string(),
            "den": e.denom().to_string(),
            "value": dec,
            "limit_mean": limit.as_ref().map(|l| json!({
                "num": l.numer().to_string(),
                "den": l.denom().to_string(),
                "value": sig15(ratio_to_f64(l)),
            })),
        }))?,
        Format::Csv => format!("n,num,den,value\n{},{},{},{dec}\n", a.n, e.numer(), e.denom()),
        Format::Table => {
            let mut s = format!("{e}\n# ≈ {dec:.15e}\n");
            if let Some(l) = limit {
                s.push_str(&format!("# Poisson limit mean {l} ≈ {:.15e}\n", ratio_to_f64(&l)));
            }
            s
        }
    })
}

fn cmd_verify(a: &VerifyArgs, format: Format) -> Result<Output> {
    let mut sections = serde_json::Map::new();
    let mut table = String::new();
    let mut checks: Vec<(&str, bool)> = Vec::new();

    if let (Some(q), Some(k)) = (a.q, a.k) {
        let mode = match a.sampled {
            Some(count) => AuditMode::Sampled { count, seed: a.seed },
            None => AuditMode::Exhaustive,
        };
        let r = exhaustive_lemma_audit(q, k, mode)?;
        checks.push(("lemma_audit", r.passed()));
        table.push_str(&format!(
            "sum inequality q={q} k={k}: {} sets, {} violations, {} equality cases, {} detected subspaces{}\n",
            r.sets_audited,
            r.violations.len(),
            r.equality_count,
            r.detector_count,
            r.representation_count.map_or(String::new(), |c| format!(", {c} from representations")),
        ));
        sections.insert("lemma_audit".into(), serde_json::to_value(&r)?);
    }
    if a.gf_audit {
        let r = generating_function_audit(a.terms)?;
        checks.push(("generating_function", r.passed()));
        table.push_str(&format!(
            "generating function ({} terms): f(1) = {} (dev {:.3e}), f(1/2) = {} (dev {:.3e}), identity {}\n# {}\n",
            r.terms,
            r.f_at_one,
            r.f_at_one_deviation,
            r.f_at_half,
            r.f_at_half_deviation,
            if r.identity_holds { "holds" } else { "FAILS" },
            r.note
        ));
        sections.insert("generating_function".into(), serde_json::to_value(&r)?);
    }
    if a.conflict_bound {
        let r = conflict_bound_check(a.qmax)?;
        checks.push(("conflict_bound", r.all_hold));
        table.push_str(&format!(
            "conflict bound q=3..{}: {}, slack in [{:.3e}, {:.3e}]\n",
            a.qmax,
            if r.all_hold { "all hold" } else { "VIOLATED" },
            r.min_slack,
            r.max_slack
        ));
        sections.insert("conflict_bound".into(), serde_json::to_value(&r)?);
    }
    if sections.is_empty() {
        bail!("nothing to verify: give --q/--k, --gf-audit or --conflict-bound");
    }
    if a.exhaustive && a.q.is_none() {
        bail!("--exhaustive needs --q and --k");
    }
    let all_ok = checks.iter().all(|c| c.1);
    sections.insert("passed".into(), json!(all_ok));
    let text = match format {
        Format::Json => to_json(&serde_json::Value::Object(sections))?,
        Format::Table => table,
        Format::Csv => {
            let mut s = String::from("check,passed\n");
            for (name, passed) in &checks {
                s.push_str(&format!("{name},{passed}\n"));
            }
            s
        }
    };
    Ok(Output { text, ok: all_ok })
}
