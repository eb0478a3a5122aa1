use std::f64::consts::PI;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use homsim::coherence::{g2_entangled_map, g2_hom_map, g4_map, CoherenceMap, HomPair, TransverseGrid};
use homsim::config::{MapFormat, RunConfig};
use homsim::exec::Exec;
use homsim::interference::{coincidence_probability, linspace, scan, ScenarioKind, ScenarioSpec};
use homsim::masks::{parse_spec_with_unit, render, taiji, PhaseMapping, PhaseMask};
use homsim::pulses::BesselGaussEnvelope;
use homsim::symmetry::{bell_catalog, classify, Prediction, SymmetryIndex};
use homsim::verify::{self, VerifyOptions};

const EXIT_VERIFY: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_IO: u8 = 3;

#[derive(Parser)]
#[command(name = "homsim", version, about = "HOM interference and coherence maps of structured photon pairs")]
struct Cli {
    /// JSON run configuration; missing keys take their defaults.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Run sweeps on one thread.
    #[arg(long, global = true)]
    sequential: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Coincidence probability against delay, written as CSV.
    Scan(ScanArgs),
    /// Symmetry index and zero-delay coincidence of the sixteen hyperentangled Bell states.
    BellTable(BellArgs),
    /// Second-order coherence map.
    G2(G2Args),
    /// Fourth-order coherence map over the first detector position.
    G4(G4Args),
    /// Run the self-check suite.
    Verify(VerifyArgs),
    /// Render a phase mask (or the Taiji symbol) as an 8-bit PGM.
    RenderMask(RenderArgs),
    /// Print the effective configuration as JSON.
    Config,
}

#[derive(Args)]
struct ScanArgs {
    #[arg(long, value_parser = parse_scenario)]
    scenario: ScenarioKind,
    #[arg(long, default_value_t = 1, allow_negative_numbers = true)]
    m: i32,
    #[arg(long, default_value_t = PI / 4.0, allow_negative_numbers = true)]
    theta: f64,
    #[arg(long, default_value_t = 0.0)]
    phi0: f64,
    /// Masks for the `image-masked` scenario.
    #[command(flatten)]
    masks: MaskArgs,
    /// `start:stop:count` in units of σ_z.
    #[arg(long, default_value = "-4:4:161", allow_hyphen_values = true)]
    z0_range: String,
    /// Output CSV; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct BellArgs {
    #[arg(long, default_value_t = 1)]
    m: i32,
    #[arg(long)]
    json: bool,
    /// Flip the tabulated index of one row (negative control for the comparison).
    #[arg(long, hide = true)]
    inject_sign_flip: Option<usize>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Scheme {
    Hom,
    Entangled,
}

#[derive(Args)]
struct MaskArgs {
    #[arg(long, default_value = "none")]
    mask_a: String,
    #[arg(long, default_value = "none")]
    mask_b: String,
}

#[derive(Args)]
struct MapArgs {
    /// Samples per axis; the configured default when omitted.
    #[arg(long)]
    grid: Option<usize>,
    /// Output file (`.pgm` with a `.json` sidecar, or `.csv`).
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct G2Args {
    #[arg(long, value_enum, default_value = "hom")]
    scheme: Scheme,
    #[command(flatten)]
    masks: MaskArgs,
    /// Azimuth of the fixed detector, at half a main-lobe radius.
    #[arg(long, allow_negative_numbers = true, conflicts_with = "fixed_point")]
    phi_prime: Option<f64>,
    /// Fixed detector `x,y` in units of λ_c.
    #[arg(long, allow_hyphen_values = true)]
    fixed_point: Option<String>,
    #[command(flatten)]
    map: MapArgs,
}

#[derive(Args)]
struct G4Args {
    #[command(flatten)]
    masks: MaskArgs,
    #[arg(long, default_value = "none")]
    mask_c: String,
    #[arg(long, default_value = "none")]
    mask_d: String,
    /// Detectors on C, D and B as `x,y;x,y;x,y` in units of λ_c.
    #[arg(long, allow_hyphen_values = true)]
    fixed_points: Option<String>,
    /// Also imprint the conjugate phases on the V photons.
    #[arg(long)]
    conjugate_v: bool,
    #[command(flatten)]
    map: MapArgs,
}

#[derive(Args)]
struct VerifyArgs {
    /// Smaller samples with a relaxed `1e-4` tolerance.
    #[arg(long)]
    fast: bool,
    /// List every check, not only failures.
    #[arg(long, short)]
    verbose: bool,
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct RenderArgs {
    /// Mask spec (`helical:m`, `sector-a:m`, ...).
    #[arg(long, conflicts_with = "taiji", required_unless_present = "taiji")]
    mask: Option<String>,
    #[arg(long)]
    taiji: bool,
    #[arg(long, default_value_t = 512)]
    size: usize,
    /// Physical width in units of λ_c; defaults to the map window.
    #[arg(long)]
    width: Option<f64>,
    #[arg(long)]
    out: PathBuf,
}

fn parse_scenario(s: &str) -> Result<ScenarioKind, String> {
    s.parse().map_err(|_| {
        let names: Vec<&str> = ScenarioKind::ALL.iter().map(|k| k.name()).collect();
        format!("unknown scenario `{s}` (expected one of: {})", names.join(", "))
    })
}

fn parse_range(s: &str) -> anyhow::Result<(f64, f64, usize)> {
    let parts: Vec<&str> = s.split(':').collect();
    let [a, b, n] = parts.as_slice() else { bail!(usage(format!("range `{s}` is not start:stop:count"))) };
    let parsed = (a.parse::<f64>(), b.parse::<f64>(), n.parse::<usize>());
    match parsed {
        (Ok(a), Ok(b), Ok(n)) if n > 0 => Ok((a, b, n)),
        _ => bail!(usage(format!("range `{s}` is not start:stop:count"))),
    }
}

fn parse_point(s: &str, unit: f64) -> anyhow::Result<(f64, f64)> {
    let xy: Vec<f64> = s.split(',').map(|v| v.trim().parse::<f64>()).collect::<Result<_, _>>()
        .map_err(|_| usage(format!("point `{s}` is not x,y")))?;
    match xy.as_slice() {
        [x, y] => Ok((x * unit, y * unit)),
        _ => bail!(usage(format!("point `{s}` is not x,y"))),
    }
}

/// Marks an error as a usage problem (exit code 2).
#[derive(Debug)]
struct Usage(String);

impl std::fmt::Display for Usage {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for Usage {}

fn usage(msg: String) -> Usage {
    Usage(msg)
}

struct Ctx {
    cfg: RunConfig,
    env: Arc<BesselGaussEnvelope>,
    exec: Exec,
}

impl Ctx {
    fn lambda(&self) -> f64 {
        self.cfg.pulse.lambda_c_m
    }

    fn mask(&self, spec: &str) -> anyhow::Result<PhaseMask> {
        parse_spec_with_unit(spec, self.lambda()).with_context(|| format!("mask `{spec}`"))
    }

    fn grid(&self, size: Option<usize>) -> anyhow::Result<TransverseGrid> {
        Ok(TransverseGrid::around(&self.env, size.unwrap_or(self.cfg.numerics.map_grid))?)
    }

    fn write_map(&self, map: &CoherenceMap, out: &Path) -> anyhow::Result<()> {
        let csv = out.extension().is_some_and(|e| e == "csv") || self.cfg.output.map_format == MapFormat::Csv;
        let out = self.cfg.output.directory.join(out);
        if csv {
            fs::write(&out, map.to_csv()).with_context(|| format!("writing {}", out.display()))?;
        } else {
            map.write_pgm(&out).with_context(|| format!("writing {}", out.display()))?;
        }
        Ok(())
    }
}

fn cmd_scan(ctx: &Ctx, a: &ScanArgs) -> anyhow::Result<u8> {
    let (start, stop, count) = parse_range(&a.z0_range)?;
    let spec = ScenarioSpec::new(a.scenario, ctx.env.clone())
        .with_m(a.m)
        .with_theta(a.theta)
        .with_phi0(a.phi0)
        .with_masks(ctx.mask(&a.masks.mask_a)?, ctx.mask(&a.masks.mask_b)?);
    let sz = ctx.env.sigma_z;
    let result = scan(&spec, &linspace(start * sz, stop * sz, count), ctx.exec)?;
    match &a.out {
        Some(path) => {
            let path = ctx.cfg.output.directory.join(path);
            fs::write(&path, result.to_csv()).with_context(|| format!("writing {}", path.display()))?;
        }
        None => print!("{}", result.to_csv()),
    }
    Ok(0)
}

#[derive(Serialize)]
struct BellRow {
    state: String,
    s: SymmetryIndex,
    tabulated_s: SymmetryIndex,
    prediction: Prediction,
    tabulated_prediction: Prediction,
    p0: f64,
    residual_plus: f64,
    residual_minus: f64,
    matches: bool,
}

fn cmd_bell_table(ctx: &Ctx, a: &BellArgs) -> anyhow::Result<u8> {
    let opts = ctx.cfg.numerics.classify();
    let mut rows = Vec::new();
    for (i, h) in bell_catalog(ctx.env.clone(), a.m)?.into_iter().enumerate() {
        let report = classify(&h.state, &opts)?;
        let p0 = coincidence_probability(&h.state, 0.0)?;
        let mut tabulated_s = h.tabulated_s;
        if a.inject_sign_flip == Some(i) {
            tabulated_s = match tabulated_s {
                SymmetryIndex::Plus => SymmetryIndex::Minus,
                SymmetryIndex::Minus => SymmetryIndex::Plus,
                SymmetryIndex::None => SymmetryIndex::None,
            };
        }
        let consistent = match report.prediction {
            Prediction::Dip => p0 <= 0.01,
            Prediction::Peak => p0 >= 0.99,
            Prediction::None => (p0 - 0.5).abs() <= 0.01,
        };
        rows.push(BellRow {
            state: h.label(),
            s: report.s,
            tabulated_s,
            prediction: report.prediction,
            tabulated_prediction: h.tabulated_outcome,
            p0,
            residual_plus: report.residual_plus,
            residual_minus: report.residual_minus,
            matches: report.s == tabulated_s && report.prediction == h.tabulated_outcome && consistent,
        });
    }
    let matched = rows.iter().filter(|r| r.matches).count();
    if a.json {
        println!("{}", serde_json::to_string_pretty(&rows)?);
    } else {
        println!("{:<8} {:>5} {:>9} {:>6} {:>9} {:>12}  match", "state", "s", "tabulated", "hom", "tabulated", "P(0)");
        for r in &rows {
            println!(
                "{:<8} {:>5} {:>9} {:>6} {:>9} {:>12.4e}  {}",
                r.state,
                r.s.to_string(),
                r.tabulated_s.to_string(),
                r.prediction.to_string(),
                r.tabulated_prediction.to_string(),
                r.p0,
                if r.matches { "yes" } else { "NO" }
            );
        }
        println!("{matched}/{} rows match", rows.len());
    }
    Ok(if matched == rows.len() { 0 } else { EXIT_VERIFY })
}

fn cmd_g2(ctx: &Ctx, a: &G2Args) -> anyhow::Result<u8> {
    let (ma, mb) = (ctx.mask(&a.masks.mask_a)?, ctx.mask(&a.masks.mask_b)?);
    let grid = ctx.grid(a.map.grid)?;
    let rp = match (&a.fixed_point, a.phi_prime) {
        (Some(p), _) => parse_point(p, ctx.lambda())?,
        (None, phi) => {
            let (phi, r) = (phi.unwrap_or(0.0), 0.5 * ctx.env.main_lobe_radius());
            (r * phi.cos(), r * phi.sin())
        }
    };
    let map = match a.scheme {
        Scheme::Hom => g2_hom_map(&HomPair::new(ctx.env.clone(), ma, mb), grid, rp, ctx.exec)?,
        Scheme::Entangled => g2_entangled_map(&ma, &mb, grid, rp, ctx.exec)?,
    };
    ctx.write_map(&map, &a.map.out)?;
    Ok(0)
}

fn cmd_g4(ctx: &Ctx, a: &G4Args) -> anyhow::Result<u8> {
    let masks = [
        ctx.mask(&a.masks.mask_a)?,
        ctx.mask(&a.masks.mask_b)?,
        ctx.mask(&a.mask_c)?,
        ctx.mask(&a.mask_d)?,
    ];
    let fixed = match &a.fixed_points {
        Some(s) => {
            let pts = s.split(';').map(|p| parse_point(p, ctx.lambda())).collect::<anyhow::Result<Vec<_>>>()?;
            let [b, c, d] = pts.as_slice() else { bail!(usage(format!("expected three points, got `{s}`"))) };
            [*b, *c, *d]
        }
        None => {
            let r = 0.5 * ctx.env.main_lobe_radius();
            [(r, 0.0), (0.0, r), (-r, 0.0)]
        }
    };
    let map = g4_map(&masks, ctx.grid(a.map.grid)?, fixed, a.conjugate_v, ctx.exec)?;
    ctx.write_map(&map, &a.map.out)?;
    Ok(0)
}

fn cmd_verify(ctx: &Ctx, a: &VerifyArgs) -> anyhow::Result<u8> {
    let checks = verify::run(VerifyOptions { fast: a.fast, exec: ctx.exec, ..Default::default() })?;
    let failed = checks.iter().filter(|c| !c.passed).count();
    if a.json {
        println!("{}", serde_json::to_string_pretty(&checks)?);
    } else {
        for c in checks.iter().filter(|c| a.verbose || !c.passed) {
            println!(
                "{} [{:>2}] {:<30} residual {:>10.3e}  tol {:>8.1e}  {}",
                if c.passed { "PASS" } else { "FAIL" },
                c.criterion,
                c.name,
                c.residual,
                c.tolerance,
                c.formula
            );
        }
        println!("{}/{} checks passed", checks.len() - failed, checks.len());
    }
    Ok(if failed == 0 { 0 } else { EXIT_VERIFY })
}

fn cmd_render(ctx: &Ctx, a: &RenderArgs) -> anyhow::Result<u8> {
    let out = ctx.cfg.output.directory.join(&a.out);
    let raster = if a.taiji {
        taiji(a.size)
    } else {
        let mask = ctx.mask(a.mask.as_deref().unwrap_or("none"))?;
        let width = a.width.map_or(2.0 * ctx.grid(None)?.half_width, |w| w * ctx.lambda());
        render(&mask, a.size, width, PhaseMapping::default())
    };
    raster.write(&out).with_context(|| format!("writing {}", out.display()))?;
    Ok(0)
}

fn run(cli: Cli) -> anyhow::Result<u8> {
    let cfg = match &cli.config {
        Some(path) => RunConfig::load(path).with_context(|| format!("config {}", path.display()))?,
        None => RunConfig::default(),
    };
    let env = cfg.pulse.envelope()?;
    let exec = if cli.sequential { Exec::Sequential } else { Exec::default() };
    let ctx = Ctx { cfg, env, exec };
    match &cli.command {
        Command::Scan(a) => cmd_scan(&ctx, a),
        Command::BellTable(a) => cmd_bell_table(&ctx, a),
        Command::G2(a) => cmd_g2(&ctx, a),
        Command::G4(a) => cmd_g4(&ctx, a),
        Command::Verify(a) => cmd_verify(&ctx, a),
        Command::RenderMask(a) => cmd_render(&ctx, a),
        Command::Config => {
            println!("{}", ctx.cfg.to_json()?);
            Ok(0)
        }
    }
}

fn exit_code(err: &anyhow::Error) -> u8 {
    for cause in err.chain() {
        if cause.downcast_ref::<std::io::Error>().is_some() {
            return EXIT_IO;
        }
        if let Some(e) = cause.downcast_ref::<homsim::Error>() {
            return match e {
                homsim::Error::Io(_) | homsim::Error::Pgm { .. } => EXIT_IO,
                _ => EXIT_USAGE,
            };
        }
    }
    EXIT_USAGE
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(exit_code(&err))
        }
    }
}
