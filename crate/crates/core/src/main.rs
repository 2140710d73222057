use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use dpchroma::blocking::{verify_lemma1, Lemma1Mode};
use dpchroma::bounds::{
    bounds_table, expected_survivors, monte_carlo_bad_prob, monte_carlo_survivors, render_csv,
    render_text, theorem3_m, analytic_upper, chosen_t, bad_prob,
};
use dpchroma::cache::{Cache, DEFAULT_CACHE_FILE};
use dpchroma::certificate::{verify_cover, Certificate, CheckReport};
use dpchroma::construct::{derandomized_cover, extend_to_uncolorable, random_cover, surviving_assignments};
use dpchroma::mu::{mu_exact_resume, mu_greedy, MuResult, MuValue, DEFAULT_NODE_BUDGET};
use dpchroma::solver::{chi_dp_exact, find_coloring, DEFAULT_COVER_BUDGET};
use dpchroma::{Error, Graph, MatchingCover};

const EXIT_USAGE: u8 = 1;
const EXIT_UNVERIFIED: u8 = 2;
const EXIT_BUDGET: u8 = 3;

#[derive(Parser)]
#[command(name = "dpchroma", version, about = "DP-chromatic thresholds of complete bipartite graphs")]
struct Cli {
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Results cache for `mu`.
    #[arg(long, global = true, default_value = DEFAULT_CACHE_FILE)]
    cache: PathBuf,
    /// Do not read or write the cache.
    #[arg(long, global = true)]
    no_cache: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Closed-form bounds; `--k` takes a value or a range such as `1-8`.
    Bounds {
        #[arg(long)]
        k: String,
        #[arg(long)]
        t: Option<usize>,
        #[arg(long)]
        csv: bool,
    },
    /// Compute mu(k) and write a certificate (default `mu-k<K>.json`).
    Mu {
        #[arg(long)]
        k: usize,
        #[arg(long, value_enum, default_value_t = Method::Exact)]
        method: Method,
        #[arg(long, default_value_t = DEFAULT_NODE_BUDGET)]
        budget: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Build an uncolorable cover of K_{k,m} from t random or greedy columns.
    Construct(ConstructArgs),
    /// Re-verify a certificate or cover file.
    Check {
        file: PathBuf,
        #[arg(long, default_value_t = DEFAULT_NODE_BUDGET)]
        budget: u64,
    },
    /// Exact DP-chromatic number of a small connected graph.
    ChiDp {
        graph: PathBuf,
        #[arg(long)]
        max_k: Option<usize>,
        #[arg(long, default_value_t = DEFAULT_COVER_BUDGET)]
        budget: u64,
    },
    /// Monte Carlo check of survivor counts and the blocking probability.
    Estimate {
        #[arg(long)]
        k: usize,
        #[arg(long)]
        t: usize,
        #[arg(long)]
        samples: usize,
        #[arg(long)]
        seed: u64,
    },
    /// Check that every column blocks exactly k! assignments.
    Lemma1 {
        #[arg(long)]
        k: usize,
        #[arg(long, conflicts_with_all = ["samples", "seed"])]
        exhaustive: bool,
        #[arg(long)]
        samples: Option<usize>,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Method {
    Exact,
    Greedy,
}

impl Method {
    fn name(self) -> &'static str {
        match self {
            Method::Exact => "exact",
            Method::Greedy => "greedy",
        }
    }
}

#[derive(Args)]
struct ConstructArgs {
    #[arg(long)]
    k: usize,
    #[arg(long)]
    t: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, conflicts_with = "derandomize")]
    random: bool,
    #[arg(long)]
    derandomize: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

/// A failure with its exit code; the message is printed on one line.
struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::ResourceLimit { .. } => EXIT_BUDGET,
            _ => EXIT_USAGE,
        };
        Failure {
            code,
            message: e.to_string().replace('\n', " "),
        }
    }
}

type CmdResult = Result<u8, Failure>;

fn read(path: &PathBuf) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure {
        code: EXIT_USAGE,
        message: format!("io: {}: {e}", path.display()),
    })
}

fn write(path: &PathBuf, text: &str) -> Result<(), Failure> {
    fs::write(path, text).map_err(|e| Failure {
        code: EXIT_USAGE,
        message: format!("io: {}: {e}", path.display()),
    })
}

fn parse_k_range(spec: &str) -> Result<Vec<usize>, Failure> {
    let bad = || Failure {
        code: EXIT_USAGE,
        message: format!("invalid-parameter: --k expects K or A-B, got {spec:?}"),
    };
    let (a, b) = match spec.split_once('-') {
        Some((a, b)) => (a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?),
        None => {
            let k = spec.trim().parse().map_err(|_| bad())?;
            (k, k)
        }
    };
    if a > b {
        return Err(bad());
    }
    Ok((a..=b).collect())
}

fn cmd_bounds(k: &str, t: Option<usize>, csv: bool) -> CmdResult {
    let ks = parse_k_range(k)?;
    let rows = bounds_table(ks.iter().copied())?;
    if csv {
        print!("{}", render_csv(&rows));
    } else {
        print!("{}", render_text(&rows));
        for &k in &ks {
            println!(
                "k={k}: chosen_t={} bad_prob={:.6} analytic_upper={:.6}",
                chosen_t(k)?,
                bad_prob::<f64>(k),
                analytic_upper::<f64>(k)
            );
            if let Some(t) = t {
                println!(
                    "k={k}: at t={t}: expected_survivors={:.6} theorem3_m={}",
                    expected_survivors::<f64>(k, t),
                    theorem3_m(k, t)?
                );
            }
        }
    }
    let ok = rows.iter().all(|r| r.consistent());
    Ok(if ok { 0 } else { EXIT_UNVERIFIED })
}

fn print_report(report: &CheckReport) {
    for n in &report.notes {
        println!("  {n}");
    }
}

fn print_mu(r: &MuResult, method: Method) {
    println!("k = {}", r.k);
    println!("method = {}", method.name());
    match r.value {
        MuValue::Exact(v) => println!("mu = {v}"),
        MuValue::Bracket { lo, hi } => println!("mu in [{lo}, {hi}]"),
    }
    for rec in &r.log {
        println!(
            "  t={} {:?} nodes={} root_branches={} root_orbits={} counting_cuts={} line_cuts={} gain_cuts={}",
            rec.t,
            rec.outcome,
            rec.nodes,
            rec.root_branches,
            rec.root_orbits,
            rec.counting_cuts,
            rec.line_cuts,
            rec.gain_cuts
        );
    }
    if let Some(f) = &r.frontier {
        println!("frontier: t={} next_branch={}", f.t, f.next_branch);
    }
}

fn cmd_mu(cli: &Cli, k: usize, method: Method, budget: u64, out: Option<&PathBuf>) -> CmdResult {
    let mut cache = (!cli.no_cache).then(|| Cache::open(&cli.cache));
    let cached = cache.as_mut().and_then(|c| c.get(k, method.name(), budget));
    let result = match (cached, method) {
        (Some(r), Method::Greedy) => r,
        (Some(r), Method::Exact) if r.frontier.is_none() => r,
        (_, Method::Greedy) => mu_greedy(k)?,
        (_, Method::Exact) => {
            // an interrupted search continues where the furthest one stopped
            let frontier = cache.as_ref().and_then(|c| c.frontier(k, method.name()));
            mu_exact_resume(k, budget, frontier)?
        }
    };
    print_mu(&result, method);
    let mut cert = Certificate::from_mu_result(&result);
    let report = cert.verify(budget)?;
    print_report(&report);
    cert.verified = report.verified;
    println!("verified = {}", report.verified);
    let path = out.cloned().unwrap_or_else(|| PathBuf::from(format!("mu-k{k}.json")));
    write(&path, &cert.to_json())?;
    println!("certificate = {}", path.display());
    if let Some(c) = cache.as_mut() {
        if report.verified {
            c.put(method.name(), budget, &result);
            c.save()?;
        }
    }
    if !report.verified {
        return Ok(EXIT_UNVERIFIED);
    }
    Ok(match (method, result.value) {
        (Method::Exact, MuValue::Bracket { .. }) => EXIT_BUDGET,
        _ => 0,
    })
}

fn cmd_construct(a: &ConstructArgs) -> CmdResult {
    let t = match a.t {
        Some(t) => t,
        None => chosen_t(a.k)?.max(1),
    };
    let (cover, mode) = if a.random {
        (random_cover(a.k, t, a.seed)?, "random")
    } else {
        (derandomized_cover(a.k, t)?, "derandomized")
    };
    let survivors = surviving_assignments(&cover)?.count();
    let (ext, r) = extend_to_uncolorable(&cover)?;
    let m = t + r;
    let bound = theorem3_m(a.k, t)?;
    println!("k = {}", a.k);
    println!("mode = {mode}");
    println!("t = {t}");
    println!("expected_survivors = {:.6}", expected_survivors::<f64>(a.k, t));
    println!("survivors = {survivors}");
    println!("m = {m} (theorem3_m = {bound}, analytic_upper = {:.6})", analytic_upper::<f64>(a.k));
    let verified = find_coloring(&ext).is_none();
    println!("verified = {verified}");
    if let Some(path) = &a.out {
        write(path, &ext.to_json())?;
    }
    Ok(if verified { 0 } else { EXIT_UNVERIFIED })
}

fn cmd_check(file: &PathBuf, budget: u64) -> CmdResult {
    let text = read(file)?;
    let value: serde_json::Value = serde_json::from_str(&text).map_err(Error::from)?;
    let report = if value.get("claim").is_some() {
        let cert = Certificate::from_json(&text)?;
        println!("certificate: k={} claim={:?} t={}", cert.k, cert.claim, cert.t);
        cert.verify(budget)?
    } else if value.get("matchings").is_some() {
        let cover = MatchingCover::from_json(&text)?;
        println!("cover: k={} vertices={}", cover.fold(), cover.graph().vertex_count());
        verify_cover(&cover)
    } else {
        return Err(Error::MalformedFile("neither a certificate nor a cover".into()).into());
    };
    print_report(&report);
    println!("verified = {}", report.verified);
    if let Some(reason) = &report.failure {
        eprintln!("dpchroma: verification-failed: {reason}");
    }
    Ok(if report.verified { 0 } else { EXIT_UNVERIFIED })
}

fn cmd_chi_dp(path: &PathBuf, max_k: Option<usize>, budget: u64) -> CmdResult {
    let g = Graph::parse_text(&read(path)?)?;
    let max_k = max_k.unwrap_or_else(|| g.smallest_last_order().1);
    let chi = chi_dp_exact(&g, max_k, budget)?;
    if chi > max_k {
        println!("chi_dp > {max_k}");
    } else {
        println!("chi_dp = {chi}");
    }
    Ok(0)
}

fn cmd_estimate(k: usize, t: usize, samples: usize, seed: u64) -> CmdResult {
    let surv = monte_carlo_survivors::<f64>(k, t, samples, seed)?;
    let target = expected_survivors::<f64>(k, t);
    let bad = monte_carlo_bad_prob::<f64>(k, samples, seed)?;
    let p = bad_prob::<f64>(k);
    println!("k = {k}, t = {t}, samples = {samples}, seed = {seed}");
    println!(
        "survivors: mean = {:.6} stderr = {:.6} expected = {:.6} within_3se = {}",
        surv.mean,
        surv.stderr,
        target,
        surv.within(target, 3.0)
    );
    println!(
        "bad_prob: estimate = {:.6} stderr = {:.6} expected = {:.6} within_3se = {}",
        bad.mean,
        bad.stderr,
        p,
        bad.within(p, 3.0)
    );
    Ok(0)
}

fn cmd_lemma1(k: usize, exhaustive: bool, samples: Option<usize>, seed: u64) -> CmdResult {
    let mode = match (exhaustive, samples) {
        (_, Some(samples)) => Lemma1Mode::Sampled { samples, seed },
        _ => Lemma1Mode::Exhaustive,
    };
    let r = verify_lemma1(k, mode)?;
    println!("k = {}", r.k);
    println!("columns = {}", r.columns_checked);
    println!("population: min = {} max = {} (k! = {})", r.min_population, r.max_population, r.bound);
    println!("injective = {}", r.injective);
    println!("membership_consistent = {}", r.membership_consistent);
    println!("verified = {}", r.holds());
    Ok(if r.holds() { 0 } else { EXIT_UNVERIFIED })
}

fn run(cli: &Cli) -> CmdResult {
    match &cli.command {
        Command::Bounds { k, t, csv } => cmd_bounds(k, *t, *csv),
        Command::Mu { k, method, budget, out } => cmd_mu(cli, *k, *method, *budget, out.as_ref()),
        Command::Construct(a) => cmd_construct(a),
        Command::Check { file, budget } => cmd_check(file, *budget),
        Command::ChiDp { graph, max_k, budget } => cmd_chi_dp(graph, *max_k, *budget),
        Command::Estimate { k, t, samples, seed } => cmd_estimate(*k, *t, *samples, *seed),
        Command::Lemma1 { k, exhaustive, samples, seed } => cmd_lemma1(*k, *exhaustive, *samples, *seed),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("dpchroma: error: invalid-parameter: {e}");
            return ExitCode::from(EXIT_USAGE);
        }
    }
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("dpchroma: error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
