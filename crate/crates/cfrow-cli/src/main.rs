//! `cfrow` command-line front end.

use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use cfrow::cfe::cfe;
use cfrow::contraction::{contract, seidel_check, seidel_scalars, ContractionPlan};
use cfrow::exact_core::{Int, Quad};
use cfrow::farey_maps::{alpha_expansion, farey_expansion, lehner_expansion, parse_real, rcf_digits};
use cfrow::gcf::{convergents, int_json, GcfDigits};
use cfrow::induced::{induced_orbit, Region};
use cfrow::measure_entropy::{entropy_of, measure_of, monte_carlo_measure, entropy_from_measure, MeasureOptions};
use cfrow::natural_extensions::OmegaPoint;
use cfrow::region_catalog::{build_alpha_region, parse_region, AlphaRegionSpec};
use cfrow::Error;

#[derive(Parser)]
#[command(name = "cfrow", version, about = "Contracted Farey expansions over regions of Ito's natural extension")]
struct Cli {
    /// Worker threads for Monte Carlo runs (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args)]
struct Common {
    /// Region: h1, omega, h:B, v:A, vh:A,B, cell:A,B, alpha:<real>, inline JSON, or a path to a JSON file.
    #[arg(long)]
    region: String,
    /// Starting x, e.g. "sqrt(2)-1", "3/7", "g", "[0;1,2,(3)]".
    #[arg(long)]
    x: String,
    /// Starting y (default 1).
    #[arg(long)]
    y: Option<String>,
    /// Largest number of Farey steps allowed between region visits.
    #[arg(long, default_value_t = 1_000_000)]
    cap: u64,
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    Rcf,
    Farey,
    Lehner,
    Alpha,
}

#[derive(Subcommand)]
enum Cmd {
    /// Expand a real number with a classical algorithm.
    Expand {
        #[arg(long, value_enum)]
        kind: Kind,
        #[arg(long)]
        x: String,
        /// Parameter for --kind alpha.
        #[arg(long)]
        alpha: Option<String>,
        #[arg(long, default_value_t = 20)]
        n: usize,
    },
    /// Contract a GCF along a plan of convergent indices.
    Contract {
        /// GCF as {"alpha": [...], "beta": [...]}, inline or a file path.
        #[arg(long)]
        gcf: String,
        /// Strictly increasing indices, comma separated.
        #[arg(long, value_delimiter = ',')]
        plan: Vec<usize>,
    },
    /// Contracted Farey expansion of a point with respect to a region.
    Cfe {
        #[command(flatten)]
        c: Common,
        #[arg(long, default_value_t = 10)]
        digits: usize,
    },
    /// Induced orbit of a point, one CSV row per visit.
    Orbit {
        #[command(flatten)]
        c: Common,
        #[arg(long, default_value_t = 20)]
        n: usize,
        /// Output file (default stdout).
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Measure of a region and entropy of its induced map.
    Entropy {
        #[arg(long)]
        region: String,
        /// Quadrature tolerance.
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
        /// Monte Carlo samples when quadrature does not apply.
        #[arg(long, default_value_t = 1_000_000)]
        samples: u64,
        /// Seed (default $CFROW_SEED, else 1).
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Describe a parsed region.
    RegionInfo {
        #[arg(long)]
        region: String,
    },
    /// Monte Carlo measure and entropy over a grid of α values, as CSV.
    SweepAlpha {
        #[arg(long, default_value = "0.5")]
        from: String,
        #[arg(long, default_value = "1")]
        to: String,
        #[arg(long, default_value_t = 6)]
        steps: usize,
        #[arg(long, default_value_t = 100_000)]
        samples: u64,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        csv: Option<PathBuf>,
    },
}

fn seed_or_env(seed: Option<u64>) -> Result<u64> {
    match seed {
        Some(s) => Ok(s),
        None => match std::env::var("CFROW_SEED") {
            Ok(v) => v.trim().parse().with_context(|| format!("CFROW_SEED={v:?} is not an integer")),
            Err(_) => Ok(1),
        },
    }
}

fn inline_or_file(text: &str) -> Result<String> {
    let t = text.trim();
    if t.starts_with('{') || t.starts_with('[') {
        return Ok(t.to_string());
    }
    let p = PathBuf::from(t);
    if p.is_file() {
        return fs::read_to_string(&p).with_context(|| format!("reading {}", p.display()));
    }
    Ok(t.to_string())
}

fn region(text: &str) -> Result<Region> {
    Ok(parse_region(&inline_or_file(text)?)?)
}

fn start(c: &Common) -> Result<OmegaPoint> {
    let x = parse_real(&c.x)?;
    Ok(match &c.y {
        None => OmegaPoint::on_top_edge(&x)?,
        Some(y) => OmegaPoint::new(&x, &parse_real(y)?)?,
    })
}

fn pairs_json(v: &[(Int, Int)]) -> Value {
    Value::Array(v.iter().map(|(p, q)| json!([int_json(p), int_json(q)])).collect())
}

fn digits_json(g: &GcfDigits, n: usize) -> Value {
    let v = g.to_vec(n);
    Value::Array(v.iter().map(|(a, b)| json!([int_json(a), int_json(b)])).collect())
}

fn cf_string(a0: &Int, ds: &[Int]) -> String {
    let rest: Vec<String> = ds.iter().map(|d| d.to_string()).collect();
    format!("[{a0};{}]", rest.join(","))
}

fn cmd_expand(kind: Kind, x: &str, alpha: Option<&str>, n: usize) -> Result<Value> {
    let xv = parse_real(x)?;
    Ok(match kind {
        Kind::Rcf => {
            let a0 = xv.floor();
            let frac = xv.add_int(&-a0.clone());
            let ds = rcf_digits(&frac, n)?;
            json!({"kind": "rcf", "x": x, "a0": int_json(&a0), "digits": ds.iter().map(int_json).collect::<Vec<_>>(), "cf": cf_string(&a0, &ds)})
        }
        Kind::Farey => {
            let g = farey_expansion(&xv, n)?;
            json!({"kind": "farey", "x": x, "digits": digits_json(&g, n + 1)})
        }
        Kind::Lehner => {
            let g = lehner_expansion(&xv, n)?;
            json!({"kind": "lehner", "x": x, "digits": digits_json(&g, n + 1)})
        }
        Kind::Alpha => {
            let a = alpha.ok_or_else(|| anyhow::anyhow!("--kind alpha needs --alpha"))?;
            let av = parse_real(a)?;
            let (a0, ds) = alpha_expansion(&av, &xv, n)?;
            json!({
                "kind": "alpha", "alpha": a, "x": x, "a0": int_json(&a0),
                "signs": ds.iter().map(|(s, _)| *s).collect::<Vec<_>>(),
                "digits": ds.iter().map(|(_, d)| int_json(d)).collect::<Vec<_>>(),
            })
        }
    })
}

fn cmd_contract(gcf: &str, plan: Vec<usize>) -> Result<Value> {
    let v: Value = serde_json::from_str(&inline_or_file(gcf)?).map_err(|e| Error::Parse(e.to_string()))?;
    let g = GcfDigits::from_json(&v)?;
    let p = ContractionPlan::new(plan)?;
    let c = contract(&g, &p)?;
    let k = p.len().saturating_sub(1);
    let conv = convergents(&c, k)?;
    Ok(json!({
        "digits": digits_json(&c, p.len()),
        "convergents": pairs_json(&conv[2..]),
        "scalars": seidel_scalars(&g, &p, k)?.iter().map(int_json).collect::<Vec<_>>(),
        "seidel": seidel_check(&g, &p)?,
    }))
}

fn cmd_cfe(c: &Common, n: usize) -> Result<Value> {
    let r = region(&c.region)?;
    let res = cfe(&r, &start(c)?, n, c.cap)?;
    Ok(json!({
        "region": r.describe()["name"],
        "digits": digits_json(&res.digits, n),
        "convergents": pairs_json(&res.convergents),
    }))
}

fn cmd_orbit(c: &Common, n: usize, out: &mut dyn Write) -> Result<()> {
    let r = region(&c.region)?;
    let orbit = induced_orbit(&r, &start(c)?, n, c.cap)?;
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["n", "x_lo", "x_hi", "y_lo", "y_hi", "cell_a", "cell_b"])?;
    for k in 0..n {
        let z = orbit.point(k + 1);
        let (xl, xh) = z.x_value().enclosure(64).to_f64_bounds();
        let (yl, yh) = z.y_value().enclosure(64).to_f64_bounds();
        let cell = z.cell_canonical();
        let s = |v: &Option<Int>| v.as_ref().map_or(String::new(), |i| i.to_string());
        w.write_record([
            orbit.index(k + 1).to_string(),
            format!("{xl:e}"),
            format!("{xh:e}"),
            format!("{yl:e}"),
            format!("{yh:e}"),
            s(&cell.a),
            s(&cell.b),
        ])?;
    }
    w.flush()?;
    Ok(())
}

fn cmd_entropy(region_text: &str, tol: f64, samples: u64, seed: Option<u64>) -> Result<Value> {
    let r = region(region_text)?;
    let opts = MeasureOptions { tol, samples, seed: seed_or_env(seed)? };
    let m = measure_of(&r, &opts)?;
    let e = entropy_of(&r, &opts)?;
    Ok(json!({
        "region": r.describe()["name"],
        "measure": m.value,
        "measure_err": m.error_bound,
        "entropy": e.entropy,
        "entropy_err": e.entropy_err,
        "method": m.method,
    }))
}

fn cmd_sweep(from: &str, to: &str, steps: usize, samples: u64, seed: Option<u64>, out: &mut dyn Write) -> Result<()> {
    let seed = seed_or_env(seed)?;
    let (a, b) = (parse_real(from)?, parse_real(to)?);
    writeln!(out, "# samples={samples} seed={seed}")?;
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["alpha", "measure", "measure_err", "entropy", "entropy_err", "seed"])?;
    let steps = steps.max(1);
    for i in 0..=steps {
        // a + (b − a) i / steps, kept exact
        let t = Quad::rational(cfrow::exact_core::rat(i as i64, steps as i64));
        let alpha = a.checked_add(&b.checked_sub(&a)?.checked_mul(&t)?)?;
        let r = build_alpha_region(&AlphaRegionSpec::new(alpha.clone()))?;
        let m = monte_carlo_measure(&r, samples, seed)?;
        let e = entropy_from_measure(&m);
        w.write_record([
            format!("{:.6}", alpha.to_f64()),
            format!("{:.8}", m.value),
            format!("{:.8}", m.error_bound),
            format!("{:.8}", e.entropy),
            format!("{:.8}", e.entropy_err),
            seed.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

fn writer(path: &Option<PathBuf>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(fs::File::create(p).with_context(|| format!("creating {}", p.display()))?),
        None => Box::new(io::stdout().lock()),
    })
}

fn run(cli: Cli) -> Result<()> {
    if let Some(t) = cli.threads {
        rayon::ThreadPoolBuilder::new().num_threads(t).build_global()?;
    }
    let print = |v: Value| -> Result<()> {
        let mut out = io::stdout().lock();
        writeln!(out, "{}", serde_json::to_string_pretty(&v)?)?;
        Ok(())
    };
    match cli.cmd {
        Cmd::Expand { kind, x, alpha, n } => print(cmd_expand(kind, &x, alpha.as_deref(), n)?)?,
        Cmd::Contract { gcf, plan } => print(cmd_contract(&gcf, plan)?)?,
        Cmd::Cfe { c, digits } => print(cmd_cfe(&c, digits)?)?,
        Cmd::Orbit { c, n, csv } => cmd_orbit(&c, n, &mut writer(&csv)?)?,
        Cmd::Entropy { region, tol, samples, seed } => print(cmd_entropy(&region, tol, samples, seed)?)?,
        Cmd::RegionInfo { region: text } => print(region(&text)?.describe())?,
        Cmd::SweepAlpha { from, to, steps, samples, seed, csv } => {
            cmd_sweep(&from, &to, steps, samples, seed, &mut writer(&csv)?)?
        }
    }
    Ok(())
}

fn broken_pipe(e: &anyhow::Error) -> bool {
    let io_kind = match (e.downcast_ref::<io::Error>(), e.downcast_ref::<csv::Error>()) {
        (Some(e), _) => Some(e.kind()),
        (_, Some(c)) => match c.kind() {
            csv::ErrorKind::Io(e) => Some(e.kind()),
            _ => None,
        },
        _ => None,
    };
    io_kind == Some(io::ErrorKind::BrokenPipe)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) if broken_pipe(&e) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            match e.downcast_ref::<Error>() {
                Some(Error::Internal(_)) | Some(Error::MismatchAt(_)) => ExitCode::from(1),
                Some(_) => ExitCode::from(2),
                None => ExitCode::from(1),
            }
        }
    }
}
