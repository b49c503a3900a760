//! Command-line front end.

use std::fs;
use std::io::{ErrorKind, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::str::FromStr;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand};
use num_bigint::BigInt;
use num_rational::BigRational;
use padic_roots::asymptotics::{
    degree_sum_bound, density_mass_bracket, density_terms, generator_count, ramified_mass,
    unramified_bracket, Regime,
};
use padic_roots::catalog::{
    enumerate_extensions, etale_classes, mass_sides, Catalog, ExtensionField,
};
use padic_roots::census::count_roots;
use padic_roots::density::{rho_at, rho_f2_mass, RationalRepr};
use padic_roots::padic::{default_precision, ExtElement, PadicNumber, PadicPolynomial};
use padic_roots_harness::acceptance::{run_all, AcceptanceConfig};
use padic_roots_harness::config::RunConfig;
use padic_roots_harness::report::{exact_field_mass, run_census, CensusReport};
use padic_roots_harness::{HarnessError, Result};
use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::{json, Value};

#[derive(Parser)]
#[command(
    name = "padic-roots",
    version,
    about = "Roots of random p-adic polynomials"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// List the cataloged extensions of Q_p with their mass checks.
    Catalog {
        #[arg(long)]
        p: u64,
        /// Restrict to one degree.
        #[arg(long)]
        degree: Option<u32>,
    },
    /// Evaluate or integrate root densities.
    Density {
        #[command(subcommand)]
        command: DensityCommand,
    },
    /// Main terms and brackets of the large-q asymptotics.
    Asymptotics {
        #[arg(long)]
        q: u64,
        #[arg(long)]
        r: u32,
        #[arg(long)]
        n: Option<u32>,
    },
    /// Roots of an integer polynomial in a cataloged field.
    Roots {
        #[arg(long)]
        p: u64,
        #[arg(long, default_value = "base")]
        ext: String,
        /// Coefficients from the constant term up, comma separated.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        coeffs: Vec<String>,
        #[arg(long)]
        precision: Option<u32>,
    },
    /// Run the Monte Carlo census and write a JSON report.
    Simulate(SimulateArgs),
    /// Write the histogram grids of a report as CSV files.
    Report {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        out_dir: PathBuf,
    },
    /// Run the acceptance suite; exit status 0 only if every criterion passes.
    Verify {
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        samples: Option<u64>,
        #[arg(long)]
        workers: Option<usize>,
    },
}

#[derive(Subcommand)]
enum DensityCommand {
    /// ρ_n at a point of K given by power-basis coordinates.
    Eval {
        #[arg(long)]
        p: u64,
        #[arg(long, default_value = "base")]
        ext: String,
        #[arg(long)]
        n: u32,
        /// Rational coordinates such as `1,1/2`.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        x: Vec<String>,
        #[arg(long, default_value_t = 4)]
        depth: u32,
        #[arg(long)]
        precision: Option<u32>,
    },
    /// Total mass of ρ_n over K.
    Integrate {
        #[arg(long)]
        p: u64,
        #[arg(long, default_value = "base")]
        ext: String,
        #[arg(long)]
        n: u32,
        /// Also report the mass of the pair density on F².
        #[arg(long)]
        f2: bool,
    },
}

#[derive(Args)]
struct SimulateArgs {
    /// TOML or JSON run configuration; flags override its fields.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    p: Option<u64>,
    /// Degrees, comma separated.
    #[arg(long, value_delimiter = ',')]
    n: Option<Vec<u32>>,
    #[arg(long)]
    samples: Option<u64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    precision: Option<u32>,
    #[arg(long)]
    depth: Option<u32>,
    #[arg(long)]
    workers: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn load<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path)?;
    match path.extension().and_then(|e| e.to_str()) {
        Some("json") => Ok(serde_json::from_str(&text)?),
        _ => toml::from_str(&text).map_err(|e| HarnessError::Config(e.to_string())),
    }
}

fn print_json<T: Serialize>(v: &T) -> Result<()> {
    print_text(&serde_json::to_string_pretty(v)?)
}

fn print_text(text: &str) -> Result<()> {
    match writeln!(std::io::stdout().lock(), "{text}") {
        Err(e) if e.kind() == ErrorKind::BrokenPipe => Ok(()),
        r => Ok(r?),
    }
}

fn repr(r: &BigRational) -> RationalRepr {
    RationalRepr::from(r)
}

fn field(catalog: &Catalog, id: &str) -> Result<Arc<ExtensionField>> {
    if id == "base" {
        return Ok(catalog.base().clone());
    }
    catalog.get(id).cloned().ok_or_else(|| {
        HarnessError::Config(format!(
            "no field {id} in the catalog for p = {}",
            catalog.p()
        ))
    })
}

fn parse_rational(s: &str) -> Result<BigRational> {
    BigRational::from_str(s.trim())
        .map_err(|e| HarnessError::Config(format!("bad rational {s:?}: {e}")))
}

fn catalog_json(p: u64, degree: Option<u32>) -> Result<Value> {
    let catalog = Catalog::new(p)?;
    let degrees: Vec<u32> = match degree {
        Some(r) => vec![r],
        None => (1..=3).collect(),
    };
    let mut fields = Vec::new();
    let mut masses = Vec::new();
    let mut etale = Vec::new();
    for &r in &degrees {
        for k in catalog.of_degree(r) {
            let mut v = serde_json::to_value(k.as_ref())?;
            v["disc_norm"] = serde_json::to_value(repr(&k.disc_norm()))?;
            fields.push(v);
        }
        let list = enumerate_extensions(p, r)?;
        for f in (1..=r).filter(|f| r % f == 0) {
            let (lhs, rhs) = mass_sides(&list.classes, p, r, f);
            masses.push(json!({ "r": r, "f": f, "sum": repr(&lhs), "closed_form": repr(&rhs), "ok": lhs == rhs }));
        }
        let classes: Vec<Value> = etale_classes(&catalog, r)?
            .iter()
            .map(|c| json!({ "label": c.label(), "aut_count": c.aut_count, "split": c.is_split() }))
            .collect();
        etale.push(json!({ "r": r, "embedded_count": list.embedded_count, "classes": classes }));
    }
    Ok(json!({ "p": p, "fields": fields, "mass": masses, "etale": etale }))
}

fn density_eval(
    p: u64,
    ext: &str,
    n: u32,
    x: &[String],
    depth: u32,
    precision: Option<u32>,
) -> Result<Value> {
    let catalog = Catalog::new(p)?;
    let k = field(&catalog, ext)?;
    if x.len() != k.r as usize {
        return Err(HarnessError::Config(format!(
            "{} expects {} coordinates",
            k.id, k.r
        )));
    }
    let prec = precision.unwrap_or_else(|| default_precision(p));
    let coords = x
        .iter()
        .map(|s| Ok(PadicNumber::from_rational(p, &parse_rational(s)?, prec)))
        .collect::<Result<Vec<_>>>()?;
    let value = rho_at(&ExtElement::new(k.clone(), coords)?, n, depth)?;
    Ok(json!({ "field": k.id, "n": n, "x": x, "depth": depth, "value": value }))
}

fn density_integrate(p: u64, ext: &str, n: u32, f2: bool) -> Result<Value> {
    let catalog = Catalog::new(p)?;
    let k = field(&catalog, ext)?;
    let (bracket, source) = density_mass_bracket(&k, n)?;
    let mut out = json!({
        "field": k.id,
        "n": n,
        "exact": exact_field_mass(&k, n).map(|m| repr(&m)),
        "bracket": bracket,
        "bracket_source": source,
    });
    if f2 {
        out["f2_mass"] = serde_json::to_value(repr(&rho_f2_mass(k.q(), n)?))?;
    }
    Ok(out)
}

fn asymptotics_json(q: u64, r: u32, n: Option<u32>) -> Result<Value> {
    let mut terms = Vec::new();
    for f in (1..=r).filter(|f| r % f == 0) {
        terms.push(json!({
            "f": f,
            "generators": generator_count(f, q)?.to_string(),
            "minimal": density_terms(r, f, q, Regime::Minimal)?,
            "stable": density_terms(r, f, q, Regime::Stable)?,
        }));
    }
    let mut out = json!({ "q": q, "r": r, "terms": terms, "degree_sum": degree_sum_bound(r, q)? });
    if r >= 2 {
        out["ramified_mass"] = serde_json::to_value(ramified_mass(r, q)?)?;
    }
    if let Some(n) = n {
        out["n"] = json!(n);
        if n >= r && n < 2 * r {
            out["unramified_bracket"] = serde_json::to_value(unramified_bracket(r, n, q)?)?;
        }
    }
    Ok(out)
}

fn roots_json(p: u64, ext: &str, coeffs: &[String], precision: Option<u32>) -> Result<Value> {
    let catalog = Catalog::new(p)?;
    let k = field(&catalog, ext)?;
    let prec = precision.unwrap_or_else(|| default_precision(p));
    let c = coeffs
        .iter()
        .map(|s| {
            BigInt::from_str(s.trim())
                .map_err(|e| HarnessError::Config(format!("bad coefficient {s:?}: {e}")))
        })
        .collect::<Result<Vec<_>>>()?;
    let roots = count_roots(&PadicPolynomial::from_bigints(p, &c, prec), &k, prec)?;
    Ok(json!({ "field": k.id, "precision": prec, "count": roots.len(), "roots": roots }))
}

fn simulate(args: SimulateArgs) -> Result<()> {
    let mut cfg = match (&args.config, args.p) {
        (Some(path), _) => load::<RunConfig>(path)?,
        (None, Some(p)) => RunConfig::preset(p),
        (None, None) => return Err(HarnessError::Config("give --p or --config".into())),
    };
    if let Some(p) = args.p {
        cfg.p = p;
    }
    if let Some(n) = args.n {
        cfg.degrees = n;
    }
    if let Some(s) = args.samples {
        cfg.samples = s;
    }
    if let Some(s) = args.seed {
        cfg.seed = s;
    }
    cfg.precision = args.precision.or(cfg.precision);
    cfg.depth = args.depth.or(cfg.depth);
    cfg.workers = args.workers.or(cfg.workers);
    cfg.out = args.out.or(cfg.out);
    let report = run_census(&cfg)?;
    let text = serde_json::to_string_pretty(&report)?;
    match &cfg.out {
        Some(path) => {
            fs::write(path, text)?;
            eprintln!("report written to {}", path.display());
        }
        None => print_text(&text)?,
    }
    Ok(())
}

fn write_report(input: &Path, out_dir: &Path) -> Result<()> {
    let report: CensusReport = serde_json::from_str(&fs::read_to_string(input)?)?;
    fs::create_dir_all(out_dir)?;
    let p = report.metadata.p;
    for d in &report.degrees {
        for h in &d.histograms {
            let title = format!(
                "new roots in {} for n = {}, p = {}, coordinates x = a + b·θ",
                h.field, d.n, p
            );
            let path = out_dir.join(format!("histogram_n{}_{}.csv", d.n, h.field));
            fs::write(&path, h.grid.to_csv(&title, "a", "b"))?;
            println!("{}", path.display());
        }
        if let Some(g) = &d.pairs {
            let title = format!("ordered pairs of roots in Z_{p} for n = {}", d.n);
            let path = out_dir.join(format!("pairs_n{}.csv", d.n));
            fs::write(&path, g.to_csv(&title, "x", "y"))?;
            println!("{}", path.display());
        }
    }
    Ok(())
}

fn verify(config: Option<PathBuf>, samples: Option<u64>, workers: Option<usize>) -> Result<bool> {
    let mut cfg = match config {
        Some(path) => load::<AcceptanceConfig>(&path)?,
        None => AcceptanceConfig::default(),
    };
    if let Some(s) = samples {
        cfg.samples = s;
    }
    cfg.workers = workers.or(cfg.workers);
    let verdicts = run_all(&cfg)?;
    for v in &verdicts {
        println!("{v}");
    }
    Ok(verdicts.iter().all(|v| v.pass))
}

fn run(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::Catalog { p, degree } => print_json(&catalog_json(p, degree)?)?,
        Command::Density { command } => match command {
            DensityCommand::Eval {
                p,
                ext,
                n,
                x,
                depth,
                precision,
            } => print_json(&density_eval(p, &ext, n, &x, depth, precision)?)?,
            DensityCommand::Integrate { p, ext, n, f2 } => {
                print_json(&density_integrate(p, &ext, n, f2)?)?
            }
        },
        Command::Asymptotics { q, r, n } => print_json(&asymptotics_json(q, r, n)?)?,
        Command::Roots {
            p,
            ext,
            coeffs,
            precision,
        } => print_json(&roots_json(p, &ext, &coeffs, precision)?)?,
        Command::Simulate(args) => simulate(args)?,
        Command::Report { input, out_dir } => write_report(&input, &out_dir)?,
        Command::Verify {
            config,
            samples,
            workers,
        } => return verify(config, samples, workers),
    }
    Ok(true)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
