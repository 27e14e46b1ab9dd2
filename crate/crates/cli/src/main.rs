use std::fs;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use graphscape::analysis::{fit_tail, landscape_law_check, lowest_positive_decade, scale_grid};
use graphscape::curve::{CountingCurve, CurveKind};
use graphscape::graph::{ball, write_graph, Region};
use graphscape::operator::{assemble, sample_disorder, JacobiOperator};
use graphscape::pipeline::{self, ExperimentConfig, GraphSpec, RunResult, Stages, ENSEMBLE_FILE, GRAPH_FILE};
use graphscape::spectral::{ball_green, band1d_kernel_bounds, dense_spectrum, harmonic_weight_1d, ids_curve};
use graphscape::zoo::Norm;
use serde_json::json;

/// Density of states and landscape counting for disordered Jacobi operators.
#[derive(Parser)]
#[command(name = "graphscape", version)]
struct Cli {
    /// Worker threads; defaults to one per core.
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct ConfigArgs {
    #[arg(long)]
    config: PathBuf,
    /// Overrides the seed in the config.
    #[arg(long)]
    seed: Option<u64>,
    /// Swap in the larger sizes from the config's `paper_scale` table.
    #[arg(long)]
    paper_scale: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum SpecKind {
    Band,
    Sierpinski,
    Penrose,
}

#[derive(Clone, Copy, ValueEnum)]
enum NormArg {
    L1,
    L2,
    Linf,
}

/// Graph parameters for `gen` without a config.
#[derive(Args)]
struct GenArgs {
    #[arg(long)]
    spec: Option<SpecKind>,
    #[arg(long, default_value_t = 5)]
    level: u32,
    #[arg(long, default_value_t = 1)]
    d: usize,
    #[arg(long = "W", default_value_t = 1)]
    w: usize,
    #[arg(long, default_value_t = 50)]
    extent: i64,
    #[arg(long, value_enum, default_value_t = NormArg::L1)]
    norm: NormArg,
    #[arg(long, default_value_t = 6)]
    generations: u32,
    #[arg(long, default_value_t = 20.0)]
    clip_radius: f64,
}

impl GenArgs {
    fn spec(&self) -> Option<GraphSpec> {
        Some(match self.spec? {
            SpecKind::Band => GraphSpec::Band {
                d: self.d,
                w: self.w,
                extent: self.extent,
                norm: match self.norm {
                    NormArg::L1 => Norm::L1,
                    NormArg::L2 => Norm::L2,
                    NormArg::Linf => Norm::LInfinity,
                },
            },
            SpecKind::Sierpinski => GraphSpec::Sierpinski { level: self.level },
            SpecKind::Penrose => GraphSpec::Penrose {
                generations: self.generations,
                clip_radius: self.clip_radius,
            },
        })
    }
}

#[derive(Subcommand)]
enum Command {
    /// Write a graph in the text format, from a config or from flags.
    Gen {
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        paper_scale: bool,
        #[command(flatten)]
        graph: GenArgs,
        /// Output file, or a directory to hold `graph.txt`; stdout if absent.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Full pipeline: both counting functions, comparison, fits, bundle.
    Run {
        #[command(flatten)]
        cfg: ConfigArgs,
        #[arg(long)]
        out: PathBuf,
    },
    /// Only the integrated density of states.
    RunIds {
        #[command(flatten)]
        cfg: ConfigArgs,
        #[arg(long)]
        out: PathBuf,
    },
    /// Only the landscape function and its counting function.
    RunLandscape {
        #[command(flatten)]
        cfg: ConfigArgs,
        #[arg(long)]
        out: PathBuf,
    },
    /// Search for C with N(E) <= N_u(C E) between two tabulated curves.
    Compare {
        /// Bundle directory; reads the ensemble means.
        #[arg(long, conflicts_with_all = ["ids", "landscape"])]
        bundle: Option<PathBuf>,
        /// CSV with `E,value` columns.
        #[arg(long, requires = "landscape")]
        ids: Option<PathBuf>,
        #[arg(long, requires = "ids")]
        landscape: Option<PathBuf>,
        /// JSON report path; stdout if absent.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Fit log N = log m1 + m2 E^{-p} to tabulated curves.
    FitTails {
        #[arg(long, conflicts_with = "input")]
        bundle: Option<PathBuf>,
        #[arg(long)]
        input: Option<PathBuf>,
        #[arg(long, default_value_t = 0.5)]
        exponent: f64,
        /// `lo,hi`; the lowest positive decade if absent.
        #[arg(long, value_parser = parse_window)]
        window: Option<(f64, f64)>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Green's function, Poisson kernel and harmonic weight bounds on 1D band balls.
    VerifyAppendix {
        /// Bandwidths, e.g. `1..3` or `1,2`.
        #[arg(long = "W", default_value = "1..3", value_parser = parse_list)]
        w: List,
        /// Ball radii, e.g. `3,6,10` or `3..20`.
        #[arg(long, default_value = "3,6,10", value_parser = parse_list)]
        r: List,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Eigenvalues (dense) or the IDS (inertia) of one realization.
    Spectrum {
        #[command(flatten)]
        cfg: ConfigArgs,
        #[arg(long, default_value_t = 0)]
        realization: u64,
        /// All eigenvalues from the dense solver instead of the IDS grid.
        #[arg(long)]
        dense: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Green's function matrix of the 1D band ball of radius r as CSV.
    Kernel {
        #[arg(long = "W")]
        w: usize,
        #[arg(long)]
        r: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// Integer list written as `a..b` (inclusive) or `a,b,c`.
#[derive(Clone, Debug)]
struct List(Vec<usize>);

fn parse_list(s: &str) -> Result<List, String> {
    let bad = |_| format!("expected `a..b` or a comma list, got `{s}`");
    if let Some((a, b)) = s.split_once("..") {
        let (a, b): (usize, usize) = (a.trim().parse().map_err(bad)?, b.trim().parse().map_err(bad)?);
        if a > b {
            return Err(format!("empty range `{s}`"));
        }
        return Ok(List((a..=b).collect()));
    }
    s.split(',').map(|t| t.trim().parse().map_err(bad)).collect::<Result<_, _>>().map(List)
}

fn parse_window(s: &str) -> Result<(f64, f64), String> {
    let (a, b) = s.split_once(',').ok_or_else(|| format!("expected `lo,hi`, got `{s}`"))?;
    let parse = |t: &str| t.trim().parse::<f64>().map_err(|e| e.to_string());
    Ok((parse(a)?, parse(b)?))
}

fn load(args: &ConfigArgs) -> Result<ExperimentConfig> {
    let mut cfg = ExperimentConfig::load(&args.config)?;
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    if args.paper_scale {
        cfg = cfg.at_paper_scale()?;
    }
    Ok(cfg)
}

/// Writes to `path`, or to stdout when there is none.
fn sink(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => {
            if let Some(dir) = p.parent().filter(|d| !d.as_os_str().is_empty()) {
                fs::create_dir_all(dir)?;
            }
            Box::new(BufWriter::new(fs::File::create(p).with_context(|| format!("creating {}", p.display()))?))
        }
        None => Box::new(BufWriter::new(io::stdout())),
    })
}

fn emit_json(value: &serde_json::Value, out: Option<&Path>) -> Result<()> {
    let mut w = sink(out)?;
    writeln!(w, "{}", serde_json::to_string_pretty(value)?)?;
    w.flush()?;
    Ok(())
}

fn summarize(res: &RunResult, out: &Path) {
    for c in &res.checks {
        println!("{} {}: {}", if c.passed { "ok  " } else { "FAIL" }, c.name, c.detail);
    }
    for (k, f) in &res.tail_fits {
        println!("fit {k}: m1 = {:.4e}, m2 = {:.4}, R2 = {:.3}", f.m1, f.m2, f.r_squared);
    }
    for (k, e) in &res.tail_errors {
        println!("fit {k}: {e}");
    }
    println!("bundle written to {}", out.display());
}

/// Runs a pipeline variant; on failure the stage is named and the config echoed.
fn run_pipeline(args: &ConfigArgs, out: &Path, stages: Stages) -> Result<bool> {
    let cfg = load(args)?;
    match pipeline::run(&cfg, out, stages) {
        Ok(res) => {
            summarize(&res, out);
            Ok(res.all_checks_pass())
        }
        Err(e) => {
            let echo = cfg.to_toml_string().unwrap_or_default();
            Err(anyhow!("{e}\nconfig {}:\n{echo}", args.config.display()))
        }
    }
}

/// Two-column curve from a CSV with an `E` column and a `value` or `mean`
/// column; `kind` filters on the `kind` column when given.
fn read_curve(path: &Path, kind: Option<&str>, as_kind: CurveKind) -> Result<CountingCurve> {
    let mut rd = csv::Reader::from_path(path).with_context(|| format!("reading {}", path.display()))?;
    let headers = rd.headers()?.clone();
    let col = |name: &str| headers.iter().position(|h| h == name);
    let e_col = col("E").ok_or_else(|| anyhow!("{}: no `E` column", path.display()))?;
    let v_col = col("value")
        .or_else(|| col("mean"))
        .ok_or_else(|| anyhow!("{}: no `value` or `mean` column", path.display()))?;
    let kind_col = col("kind");
    let mut pts = Vec::new();
    for rec in rd.records() {
        let rec = rec?;
        if let (Some(k), Some(c)) = (kind, kind_col) {
            if &rec[c] != k {
                continue;
            }
        }
        pts.push((rec[e_col].parse::<f64>()?, rec[v_col].parse::<f64>()?));
    }
    if pts.is_empty() {
        bail!("{}: no rows{}", path.display(), kind.map(|k| format!(" of kind `{k}`")).unwrap_or_default());
    }
    let (e, v) = pts.into_iter().unzip();
    Ok(CountingCurve::new(e, v, as_kind)?)
}

/// Right-continuous step interpolation of a nondecreasing tabulated curve:
/// zero before the first energy, the last value beyond the grid.
fn step_eval(c: &CountingCurve, e: f64) -> f64 {
    match c.energies.partition_point(|&x| x <= e) {
        0 => 0.0,
        i => c.values[i - 1],
    }
}

fn curves_from(bundle: Option<&Path>, ids: Option<&Path>, landscape: Option<&Path>) -> Result<(CountingCurve, CountingCurve)> {
    match (bundle, ids, landscape) {
        (Some(dir), _, _) => {
            let path = dir.join(ENSEMBLE_FILE);
            Ok((
                read_curve(&path, Some("ids"), CurveKind::Ids)?,
                read_curve(&path, Some("landscape"), CurveKind::Landscape)?,
            ))
        }
        (None, Some(a), Some(b)) => Ok((read_curve(a, None, CurveKind::Ids)?, read_curve(b, None, CurveKind::Landscape)?)),
        _ => bail!("pass --bundle DIR or both --ids and --landscape"),
    }
}

fn operator_for(cfg: &ExperimentConfig, realization: u64) -> Result<(Region, JacobiOperator)> {
    let region = cfg.build_region()?;
    let d = sample_disorder(&region, &cfg.disorder_config(), realization)?;
    let op = assemble(&region, &d, cfg.boundary)?;
    Ok((region, op))
}

fn execute(cmd: Command) -> Result<bool> {
    match cmd {
        Command::Gen {
            config,
            paper_scale,
            graph,
            out,
        } => {
            let g = match (config, graph.spec()) {
                (Some(path), _) => {
                    let mut cfg = ExperimentConfig::load(&path)?;
                    if paper_scale {
                        cfg = cfg.at_paper_scale()?;
                    }
                    cfg.graph.build()?
                }
                (None, Some(spec)) => spec.build()?,
                (None, None) => bail!("pass --config PATH or --spec KIND"),
            };
            let path = out.map(|p| if p.is_dir() { p.join(GRAPH_FILE) } else { p });
            let mut w = sink(path.as_deref())?;
            write_graph(&g, &mut w)?;
            w.flush()?;
            eprintln!("{} vertices, {} edges", g.vertex_count(), g.edge_count());
            Ok(true)
        }
        Command::Run { cfg, out } => run_pipeline(&cfg, &out, Stages::ALL),
        Command::RunIds { cfg, out } => run_pipeline(&cfg, &out, Stages { ids: true, landscape: false }),
        Command::RunLandscape { cfg, out } => run_pipeline(&cfg, &out, Stages { ids: false, landscape: true }),
        Command::Compare {
            bundle,
            ids,
            landscape,
            out,
        } => {
            let (ids, nu) = curves_from(bundle.as_deref(), ids.as_deref(), landscape.as_deref())?;
            let report = landscape_law_check("compare", &ids, &|e| Ok(step_eval(&nu, e)), &scale_grid())?;
            eprintln!("{}", report.status);
            emit_json(&serde_json::to_value(&report)?, out.as_deref())?;
            Ok(report.upper_holds())
        }
        Command::FitTails {
            bundle,
            input,
            exponent,
            window,
            out,
        } => {
            let curves = match (bundle, input) {
                (Some(dir), _) => {
                    let (a, b) = curves_from(Some(&dir), None, None)?;
                    vec![("ids", a), ("landscape", b)]
                }
                (None, Some(p)) => vec![("input", read_curve(&p, None, CurveKind::Ids)?)],
                (None, None) => bail!("pass --bundle DIR or --input CSV"),
            };
            let mut ok = true;
            let mut fits = Vec::new();
            for (name, c) in &curves {
                let w = window.or_else(|| lowest_positive_decade(c));
                let fit = w.ok_or_else(|| anyhow!("{name}: curve vanishes on the grid")).and_then(|w| Ok(fit_tail(c, w, exponent)?));
                match fit {
                    Ok(f) => {
                        eprintln!("{name}: m1 = {:.4e}, m2 = {:.4}, R2 = {:.3}", f.m1, f.m2, f.r_squared);
                        fits.push(json!({"curve": name, "fit": f}));
                    }
                    Err(e) => {
                        ok = false;
                        eprintln!("{name}: {e}");
                        fits.push(json!({"curve": name, "error": e.to_string()}));
                    }
                }
            }
            emit_json(&json!(fits), out.as_deref())?;
            Ok(ok)
        }
        Command::VerifyAppendix { w, r, tol, out } => {
            let mut rows = Vec::new();
            let mut ok = true;
            println!("{:>3} {:>4} {:>12} {:>12} {:>8}", "W", "r", "min slack", "h - floor", "status");
            for &wi in &w.0 {
                for &ri in &r.0 {
                    let b = band1d_kernel_bounds(wi, ri)?;
                    let h = harmonic_weight_1d(wi, ri)?;
                    let gap = h.min_weight() - h.lower_bound();
                    let pass = b.holds(tol) && gap >= -tol;
                    ok &= pass;
                    println!(
                        "{wi:>3} {ri:>4} {:>12.3e} {gap:>12.3e} {:>8}",
                        b.min_slack(),
                        if pass { "ok" } else { "FAIL" }
                    );
                    rows.push(json!({"bounds": b, "harmonic_min": h.min_weight(), "harmonic_floor": h.lower_bound(), "passed": pass}));
                }
            }
            if let Some(p) = out {
                emit_json(&json!(rows), Some(&p))?;
            }
            Ok(ok)
        }
        Command::Spectrum {
            cfg,
            realization,
            dense,
            out,
        } => {
            let config = load(&cfg)?;
            let (_, op) = operator_for(&config, realization)?;
            let mut w = sink(out.as_deref())?;
            if dense {
                writeln!(w, "index,eigenvalue")?;
                for (i, l) in dense_spectrum(&op)?.iter().enumerate() {
                    writeln!(w, "{i},{l}")?;
                }
            } else {
                let c = ids_curve(&op, &config.energy.energies())?;
                writeln!(w, "E,value")?;
                for (e, v) in c.points() {
                    writeln!(w, "{e},{v}")?;
                }
            }
            w.flush()?;
            Ok(true)
        }
        Command::Kernel { w, r, out } => {
            let g = GraphSpec::Band {
                d: 1,
                w,
                extent: ((r + 2) * w) as i64,
                norm: Norm::L1,
            }
            .build()?;
            let center = (0..g.vertex_count())
                .find(|&v| g.coords(v).is_some_and(|c| c[0] == 0.0))
                .ok_or_else(|| anyhow!("no vertex at the origin"))?;
            let b = ball(&g, center, r as f64)?;
            let k = ball_green(&g, &b, center)?;
            let mut out = sink(out.as_deref())?;
            for i in 0..k.green.nrows() {
                let row: Vec<String> = k.green.row(i).iter().map(|x| x.to_string()).collect();
                writeln!(out, "{}", row.join(","))?;
            }
            out.flush()?;
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    match execute(cli.command) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("one or more checks failed");
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
