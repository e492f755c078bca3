//! `hurwitz`: decide, enumerate and construct branching data.

mod cache;
mod render;
mod selftest;

use std::fmt::Write as _;
use std::ops::RangeInclusive;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{ArgGroup, Args, Parser, Subcommand, ValueEnum};
use hurwitz::criteria::{
    base_datum, decide_all, lift_power, lift_roots_of_unity, verdict_json, Engine, EngineConfig,
    Family, FamilyError, FamilyRange, Status, Trace, LIFT_ASSUMPTION,
};
use hurwitz::datum::{
    enumerate_candidates, parse_partition, parse_partition_list, BranchingDatum, CandidateDatum,
    DatumError,
};
use hurwitz::oracle::{SearchConfig, DEFAULT_BUDGET};
use hurwitz::ratmap::{branching_report, parse_map, power, RatmapError};
use hurwitz::split::DEFAULT_SPLIT_LIMIT;
use serde_json::{json, Value};

use cache::{Cache, Settings};

#[derive(Parser)]
#[command(
    name = "hurwitz",
    version,
    about = "Decide realizability of branching data"
)]
struct Cli {
    #[command(flatten)]
    opts: Options,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Options {
    /// Oracle budget: complete monodromy tuples tested per datum before giving up.
    #[arg(long, global = true, default_value_t = DEFAULT_BUDGET)]
    budget: u64,
    /// Neither read nor write the verdict cache.
    #[arg(long, global = true)]
    no_cache: bool,
    #[arg(
        long,
        global = true,
        env = "HURWITZ_CACHE",
        default_value = "hurwitz-cache.jsonl"
    )]
    cache: PathBuf,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Run the oracle on one thread.
    #[arg(long, global = true)]
    sequential: bool,
    /// Decide top-level data by rules alone.
    #[arg(long, global = true)]
    no_oracle: bool,
    /// Confirm rule-based exceptional verdicts with the oracle up to this degree.
    #[arg(long, global = true, default_value_t = 0)]
    cross_check: u32,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Table,
}

#[derive(Subcommand)]
enum Command {
    /// Decide one datum, e.g. "4:[3,1];[2,2];[2,2]".
    Check {
        datum: String,
        #[arg(long, default_value_t = 2, allow_hyphen_values = true)]
        target_euler: i64,
    },
    /// List candidate data of degree D with N branch values.
    Enumerate {
        degree: u32,
        count: usize,
        #[arg(long, default_value_t = 2, allow_hyphen_values = true)]
        source_euler: i64,
        #[arg(long)]
        decide: bool,
    },
    /// Branching report of an explicit map.
    Analyze {
        map: String,
        /// Analyze the r-th power of the map instead.
        #[arg(long)]
        power: Option<u32>,
    },
    /// Members of a known exceptional family ("all" for every family).
    Families {
        name: String,
        #[arg(long, value_parser = parse_range)]
        k: Option<RangeInclusive<u32>>,
        #[arg(long, value_parser = parse_range)]
        r: Option<RangeInclusive<u32>>,
        #[arg(long, value_parser = parse_range)]
        l: Option<RangeInclusive<u32>>,
        /// Keep members of at most this degree.
        #[arg(long, default_value_t = 12)]
        max_degree: u32,
        #[arg(long)]
        decide: bool,
    },
    /// Lift a realizable base datum and print the construction trace.
    Lift(LiftArgs),
    /// Seeded numeric and lift round-trip checks.
    Selftest {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 100)]
        maps: usize,
        #[arg(long, default_value_t = 50)]
        lifts: usize,
    },
}

#[derive(Args)]
#[group(skip)]
#[command(group(ArgGroup::new("mode").required(true).args(["roots_of_unity", "power"])))]
struct LiftArgs {
    #[arg(long)]
    roots_of_unity: bool,
    #[arg(long)]
    power: bool,
    #[arg(long)]
    r: Option<u32>,
    /// Nontrivial splits of mu1, e.g. "[3];[2,1];[2,1]".
    #[arg(long)]
    splits: Option<String>,
    #[arg(long)]
    x: Option<String>,
    #[arg(long)]
    y: Option<String>,
    #[arg(long)]
    k: Option<u32>,
    /// Which partition of the base (canonical order) becomes the k-fold one.
    #[arg(long, default_value_t = 0)]
    alpha_index: usize,
    /// Base datum for --power.
    datum: Option<String>,
}

fn parse_range(s: &str) -> Result<RangeInclusive<u32>, String> {
    let bad = |_| format!("expected N or A..B, got {s:?}");
    match s.split_once("..") {
        Some((a, b)) => {
            let b = b.strip_prefix('=').unwrap_or(b);
            Ok(a.trim().parse().map_err(bad)?..=b.trim().parse().map_err(bad)?)
        }
        None => {
            let n = s.trim().parse().map_err(bad)?;
            Ok(n..=n)
        }
    }
}

/// Why a command stopped.
enum Failure {
    Input(String),
    Numeric(String),
    Other(anyhow::Error),
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Self::Other(e)
    }
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Self::Input(_) => 2,
            Self::Numeric(_) => 3,
            Self::Other(_) => 1,
        }
    }
}

/// Error text, with a caret under the offending character when a position is known.
fn located(input: &str, position: usize, message: impl std::fmt::Display) -> Failure {
    let col = input
        .char_indices()
        .take_while(|&(i, _)| i < position)
        .count();
    Failure::Input(format!("{message}\n  {input}\n  {}^", " ".repeat(col)))
}

fn datum_failure(input: &str, e: DatumError) -> Failure {
    match &e {
        DatumError::Parse(p) => located(input, p.position, &e),
        _ => Failure::Input(format!("{e}")),
    }
}

fn status_code(status: &str) -> u8 {
    match status {
        "realizable" => 0,
        "exceptional" => 10,
        _ => 20,
    }
}

struct Context {
    engine: Engine,
    cache: Cache,
    format: Format,
}

impl Context {
    /// Verdict JSON for each datum, in order; misses are decided together.
    fn verdicts(&mut self, data: &[CandidateDatum]) -> Vec<Value> {
        let mut out: Vec<Option<Value>> = data
            .iter()
            .map(|d| self.cache.get(&d.to_string(), d.target_euler()))
            .collect();
        let missing: Vec<usize> = (0..data.len()).filter(|&i| out[i].is_none()).collect();
        let todo: Vec<CandidateDatum> = missing.iter().map(|&i| data[i].clone()).collect();
        for (&i, v) in missing.iter().zip(decide_all(&self.engine, &todo)) {
            let json = verdict_json(&data[i], &v);
            self.cache.put(data[i].target_euler(), &json);
            out[i] = Some(json);
        }
        out.into_iter().flatten().collect()
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok((text, code)) => {
            print!("{text}");
            ExitCode::from(code)
        }
        Err(f) => {
            match &f {
                Failure::Input(m) | Failure::Numeric(m) => eprintln!("error: {m}"),
                Failure::Other(e) => eprintln!("error: {e:#}"),
            }
            ExitCode::from(f.code())
        }
    }
}

fn run(cli: Cli) -> Result<(String, u8), Failure> {
    let o = &cli.opts;
    let config = EngineConfig {
        search: SearchConfig {
            budget: o.budget,
            parallel: !o.sequential,
        },
        split_limit: DEFAULT_SPLIT_LIMIT,
        use_oracle: !o.no_oracle,
        cross_check_degree: o.cross_check,
    };
    let settings = Settings::of(&config);
    let cache = if o.no_cache {
        Cache::disabled(settings)
    } else {
        Cache::open(&o.cache, settings)?
    };
    let mut cx = Context {
        engine: Engine::new(config),
        cache,
        format: o.format,
    };
    let result = match cli.command {
        Command::Check {
            datum,
            target_euler,
        } => check(&mut cx, &datum, target_euler),
        Command::Enumerate {
            degree,
            count,
            source_euler,
            decide,
        } => enumerate(&mut cx, degree, count, source_euler, decide),
        Command::Analyze { map, power } => analyze(&cx, &map, power),
        Command::Families {
            name,
            k,
            r,
            l,
            max_degree,
            decide,
        } => families(&mut cx, &name, [k, r, l], max_degree, decide),
        Command::Lift(args) => lift(&cx, &args),
        Command::Selftest { seed, maps, lifts } => Ok(selftest::run(seed, maps, lifts, cx.format)),
    };
    cx.cache.flush()?;
    result
}

fn check(cx: &mut Context, input: &str, target_euler: i64) -> Result<(String, u8), Failure> {
    let datum: BranchingDatum = input.parse().map_err(|e| datum_failure(input, e))?;
    let candidate =
        CandidateDatum::with_target(datum, target_euler).map_err(|e| datum_failure(input, e))?;
    let v = cx.verdicts(std::slice::from_ref(&candidate)).remove(0);
    let status = v["status"].as_str().unwrap_or("unknown").to_string();
    let text = match cx.format {
        Format::Json => format!("{v}\n"),
        Format::Table => render::verdict_row(&v, 0),
    };
    Ok((text, status_code(&status)))
}

fn enumerate(
    cx: &mut Context,
    degree: u32,
    count: usize,
    source_euler: i64,
    decide: bool,
) -> Result<(String, u8), Failure> {
    if degree < 2 {
        return Err(Failure::Input(format!(
            "degree must be at least 2, got {degree}"
        )));
    }
    let data: Vec<CandidateDatum> = enumerate_candidates(degree, count, source_euler).collect();
    let mut out = String::new();
    if decide {
        let verdicts = cx.verdicts(&data);
        let width = data.iter().map(|d| d.to_string().len()).max().unwrap_or(0);
        for v in &verdicts {
            match cx.format {
                Format::Json => {
                    let _ = writeln!(out, "{v}");
                }
                Format::Table => out.push_str(&render::verdict_row(v, width)),
            }
        }
    } else {
        for d in &data {
            match cx.format {
                Format::Json => {
                    let _ = writeln!(out, "{}", json!({ "datum": d.to_string() }));
                }
                Format::Table => {
                    let _ = writeln!(out, "{d}");
                }
            }
        }
    }
    Ok((out, 0))
}

fn analyze(cx: &Context, input: &str, exponent: Option<u32>) -> Result<(String, u8), Failure> {
    let map = parse_map(input).map_err(|e| match e {
        RatmapError::Parse { position, .. } => located(input, position, &e),
        e => Failure::Input(e.to_string()),
    })?;
    let map = match exponent {
        Some(0) => return Err(Failure::Input("--power must be at least 1".into())),
        Some(r) => power(&map, r),
        None => map,
    };
    let report = branching_report(&map).map_err(|e| match e {
        RatmapError::DegreeTooSmall(_) | RatmapError::ConstantMap(_) => {
            Failure::Input(e.to_string())
        }
        e => Failure::Numeric(e.to_string()),
    })?;
    let datum = report
        .datum()
        .map_err(|e| Failure::Numeric(format!("report is not a datum: {e}")))?;
    let text = match cx.format {
        Format::Json => {
            let entries: Vec<Value> = report
                .entries
                .iter()
                .map(|e| {
                    json!({
                        "value": e.value,
                        "partition": e.partition.to_string(),
                        "residual": e.residual,
                    })
                })
                .collect();
            format!(
                "{}\n",
                json!({
                    "degree": report.degree,
                    "entries": entries,
                    "total_branching": report.total_branching,
                    "datum": datum.to_string(),
                })
            )
        }
        Format::Table => render::report_table(&report, &datum),
    };
    Ok((text, 0))
}

fn families(
    cx: &mut Context,
    name: &str,
    [k, r, l]: [Option<RangeInclusive<u32>>; 3],
    max_degree: u32,
    decide: bool,
) -> Result<(String, u8), Failure> {
    let chosen: Vec<Family> = if name.eq_ignore_ascii_case("all") {
        Family::ALL.to_vec()
    } else {
        vec![name
            .parse()
            .map_err(|e: FamilyError| Failure::Input(e.to_string()))?]
    };
    let wide = FamilyRange::up_to_degree(max_degree);
    let range = FamilyRange {
        k: k.unwrap_or(wide.k),
        r: r.unwrap_or(wide.r),
        l: l.unwrap_or(wide.l),
    };
    let instances: Vec<_> = chosen
        .iter()
        .flat_map(|&f| range.instances(f))
        .filter(|i| i.datum.degree() <= max_degree)
        .collect();
    if instances.is_empty() {
        return Err(Failure::Input(format!(
            "no valid {name} members for these parameters up to degree {max_degree}"
        )));
    }
    let data: Vec<CandidateDatum> = instances.iter().map(|i| i.datum.clone()).collect();
    let verdicts = if decide {
        cx.verdicts(&data)
    } else {
        Vec::new()
    };
    let mut out = String::new();
    for (n, inst) in instances.iter().enumerate() {
        let verdict = verdicts.get(n);
        match cx.format {
            Format::Json => {
                let mut row = json!({
                    "family": inst.family.name(),
                    "params": inst.params,
                    "datum": inst.datum.to_string(),
                    "expected": inst.expected.as_str(),
                });
                if let Some(v) = verdict {
                    row["verdict"] = v.clone();
                    row["agrees"] = json!(v["status"] == inst.expected.as_str());
                }
                let _ = writeln!(out, "{row}");
            }
            Format::Table => {
                let _ = write!(
                    out,
                    "{:<4} {:<24} {:<40} expected {}",
                    inst.family.name(),
                    inst.params.to_string(),
                    inst.datum.to_string(),
                    inst.expected.as_str()
                );
                if let Some(v) = verdict {
                    let _ = write!(
                        out,
                        "  got {} ({})",
                        v["status"].as_str().unwrap_or("?"),
                        v["method"].as_str().unwrap_or("?")
                    );
                }
                out.push('\n');
            }
        }
    }
    Ok((out, 0))
}

fn required<'a>(value: &'a Option<String>, flag: &str) -> Result<&'a str, Failure> {
    value
        .as_deref()
        .ok_or_else(|| Failure::Input(format!("{flag} is required")))
}

fn partition_arg(
    value: &Option<String>,
    flag: &str,
) -> Result<hurwitz::partition::Partition, Failure> {
    let text = required(value, flag)?;
    parse_partition(text).map_err(|e| located(text, e.position, format!("{flag}: {e}")))
}

fn lift(cx: &Context, a: &LiftArgs) -> Result<(String, u8), Failure> {
    let input = |e: &dyn std::fmt::Display| Failure::Input(e.to_string());
    let (base, lifted, build): (BranchingDatum, BranchingDatum, Box<dyn Fn(Trace) -> Trace>) =
        if a.roots_of_unity {
            let r =
                a.r.ok_or_else(|| Failure::Input("--r is required".into()))?;
            let text = required(&a.splits, "--splits")?;
            let splits = parse_partition_list(text)
                .map_err(|e| located(text, e.position, format!("--splits: {e}")))?;
            let x = partition_arg(&a.x, "--x")?;
            let y = partition_arg(&a.y, "--y")?;
            let lifted = lift_roots_of_unity(&splits, &x, &y, r).map_err(|e| input(&e))?;
            let base = base_datum(&splits, &x, &y).map_err(|e| input(&e))?;
            let claim = lifted.clone();
            let build = move |b: Trace| Trace::RootsOfUnityLift {
                datum: claim.clone(),
                r,
                splits: splits.clone(),
                x: x.clone(),
                y: y.clone(),
                assumption: LIFT_ASSUMPTION.to_string(),
                base: Box::new(b),
            };
            (base, lifted, Box::new(build))
        } else {
            let k =
                a.k.ok_or_else(|| Failure::Input("--k is required".into()))?;
            let text = required(&a.datum, "base datum")?;
            let base: BranchingDatum = text.parse().map_err(|e| datum_failure(text, e))?;
            let lifted = lift_power(&base, k, a.alpha_index).map_err(|e| input(&e))?;
            let alpha_index = a.alpha_index;
            let claim = lifted.clone();
            let build = move |b: Trace| Trace::PowerLift {
                datum: claim.clone(),
                k,
                alpha_index,
                base: Box::new(b),
            };
            (base, lifted, Box::new(build))
        };
    // A base outside the candidate range still lifts as a formula, but has no verdict.
    let (status, method, trace) = match base.clone().into_candidate() {
        Ok(candidate) => {
            let verdict = cx.engine.decide(&candidate);
            let trace = match (verdict.status, verdict.certificate()) {
                (Status::Realizable, Some(c)) => Some(build(c.clone().into_trace(&base))),
                _ => None,
            };
            (
                verdict.status.as_str().to_string(),
                Ok(verdict.method.as_str()),
                trace,
            )
        }
        Err(e) => ("not_a_candidate".to_string(), Err(e.to_string()), None),
    };
    if let Some(t) = &trace {
        t.replay()
            .map_err(|e| anyhow::anyhow!("constructed trace does not replay: {e}"))?;
    }
    let code = match status.as_str() {
        "not_a_candidate" => 0,
        s => status_code(s),
    };
    let text = match cx.format {
        Format::Json => format!(
            "{}\n",
            json!({
                "datum": lifted.to_string(),
                "base": base.to_string(),
                "base_status": status,
                "base_method": method.as_ref().ok(),
                "base_error": method.as_ref().err(),
                "trace": trace,
            })
        ),
        Format::Table => {
            let mut s = format!("{lifted}\n");
            match &trace {
                Some(t) => s.push_str(&render::trace_tree(t)),
                None => {
                    let why = method.as_deref().unwrap_or_else(|e| e.as_str());
                    let _ = writeln!(s, "  base {base}: {status} ({why}); no construction");
                }
            }
            s
        }
    };
    Ok((text, code))
}
