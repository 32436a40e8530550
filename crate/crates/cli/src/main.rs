//! `rislink`: assemble, optimize and sweep RIS links from a scenario config.

mod caps;
mod manifest;

use anyhow::{anyhow, Context};
use clap::{Args, Parser, Subcommand};
use manifest::Manifest;
use rislink::brcs::{alpha_grid_deg, write_csv, BrcsCurve};
use rislink::ingest::{document_from_matrix, load_scenario, write_touchstone, DataFormat, ScenarioConfig};
use rislink::link::{LinkError, LinkModel};
use serde_json::json;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "rislink", version, about = "Far-field RIS link synthesis, load optimization and BRCS sweeps")]
struct Cli {
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write the assembled Tx + RIS + Rx scatter matrix as Touchstone.
    Synthesize(Common),
    /// Optimize the varactor capacitances for the configured Rx angle.
    Optimize(Common),
    /// Sweep the Rx angle and write the BRCS of the loaded surface.
    Sweep {
        #[command(flatten)]
        common: Common,
        /// Capacitance file from `optimize`; without it only the flat
        /// reflector reference is written.
        #[arg(long)]
        caps: Option<PathBuf>,
    },
}

#[derive(Args)]
struct Common {
    /// Scenario configuration file.
    config: PathBuf,
    /// Override the Rx angle (degrees).
    #[arg(long, allow_hyphen_values = true)]
    alpha: Option<f64>,
    /// Override the Tx angle (degrees).
    #[arg(long, allow_hyphen_values = true)]
    beta: Option<f64>,
    /// Override the optimizer seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Error with the exit code it maps to.
struct Failure {
    code: u8,
    err: anyhow::Error,
}

fn usage(err: impl Into<anyhow::Error>) -> Failure {
    Failure { code: 2, err: err.into() }
}

fn runtime(err: impl Into<anyhow::Error>) -> Failure {
    Failure { code: 1, err: err.into() }
}

fn link_failure(e: LinkError) -> Failure {
    match e {
        LinkError::FarField(_) | LinkError::Optimize(_) => runtime(e),
        _ => usage(e),
    }
}

type Res<T> = Result<T, Failure>;

struct Loaded {
    cfg: ScenarioConfig,
    config_path: PathBuf,
    config_text: String,
    base_dir: PathBuf,
    out_dir: PathBuf,
}

fn load(common: &Common) -> Res<Loaded> {
    let path = &common.config;
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("cannot read config {}", path.display()))
        .map_err(usage)?;
    let mut cfg = load_scenario(&text)
        .with_context(|| format!("{}", path.display()))
        .map_err(usage)?;
    if let Some(a) = common.alpha {
        cfg.scenario = cfg.scenario.with_alpha(a.to_radians()).map_err(usage)?;
    }
    if let Some(b) = common.beta {
        cfg.scenario = cfg.scenario.with_beta(b.to_radians()).map_err(usage)?;
    }
    if let Some(s) = common.seed {
        cfg.optimizer.seed = s;
    }
    let base_dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
    let out_dir = match (&common.out, &cfg.out) {
        (Some(o), _) => o.clone(),
        (None, Some(o)) => base_dir.join(o),
        (None, None) => PathBuf::from("."),
    };
    let short = rislink::farfield::far_field_violations(&cfg.scenario);
    if !short.is_empty() {
        log::warn!(
            "{} element/antenna paths are shorter than the far-field distance {:.3} m",
            short.len(),
            cfg.scenario.far_field_distance()
        );
    }
    std::fs::create_dir_all(&out_dir)
        .with_context(|| format!("cannot create output directory {}", out_dir.display()))
        .map_err(runtime)?;
    Ok(Loaded {
        cfg,
        config_path: path.clone(),
        config_text: text,
        base_dir,
        out_dir,
    })
}

fn manifest_for(cmd: &str, l: &Loaded, common: &Common) -> Manifest {
    let mut m = Manifest::new(cmd, &l.config_path, &l.config_text, &l.cfg);
    m.overrides = json!({
        "alpha_deg": common.alpha,
        "beta_deg": common.beta,
        "seed": common.seed,
        "out": common.out.as_ref().map(|p| p.display().to_string()),
    });
    m
}

fn add_source_inputs(m: &mut Manifest, l: &Loaded) -> Res<()> {
    use rislink::ingest::{PatternSource, RisSource};
    if let Some(RisSource::Touchstone { path, .. }) = &l.cfg.ris {
        m.add_input(&l.base_dir.join(path)).map_err(usage)?;
    }
    if let Some(PatternSource::Table(path)) = &l.cfg.patterns {
        m.add_input(&l.base_dir.join(path)).map_err(usage)?;
    }
    Ok(())
}

fn write_output(m: &mut Manifest, path: &Path, bytes: &[u8]) -> Res<()> {
    std::fs::write(path, bytes)
        .with_context(|| format!("cannot write {}", path.display()))
        .map_err(runtime)?;
    m.add_output(path, bytes);
    Ok(())
}

fn synthesize(common: &Common) -> Res<()> {
    let l = load(common)?;
    let mut m = manifest_for("synthesize", &l, common);
    add_source_inputs(&mut m, &l)?;
    let link = LinkModel::from_config(&l.cfg, &l.base_dir).map_err(link_failure)?;
    let full = link.full_matrix().map_err(runtime)?;
    let doc = document_from_matrix(&full, DataFormat::RI);
    let comment = format!(
        "rislink {} synthesize\nports: 1 = Tx, 2..{} = RIS elements, {} = Rx",
        env!("CARGO_PKG_VERSION"),
        full.dim() - 1,
        full.dim()
    );
    let text = write_touchstone(&doc, Some(&comment));
    let path = l.out_dir.join(format!("full.s{}p", full.dim()));
    write_output(&mut m, &path, text.as_bytes())?;
    m.results = json!({ "ports": full.dim() });
    m.write(&l.out_dir.join("synthesize.manifest.json")).map_err(runtime)?;
    println!("wrote {}", path.display());
    Ok(())
}

fn optimize(common: &Common) -> Res<()> {
    let l = load(common)?;
    let mut m = manifest_for("optimize", &l, common);
    add_source_inputs(&mut m, &l)?;
    let link = LinkModel::from_config(&l.cfg, &l.base_dir).map_err(link_failure)?;
    let res = link.optimize(&l.cfg.optimizer).map_err(link_failure)?;
    let scn = &link.scenario;
    let report = caps::render(
        scn.elements(),
        &res.caps,
        scn.freq_hz(),
        link.ris.z0_ohm(),
        &link.varactor,
    );
    let path = l.out_dir.join("caps.csv");
    write_output(&mut m, &path, report.as_bytes())?;
    m.results = json!({
        "objective": res.objective,
        "objective_db": 10.0 * res.objective.log10(),
        "best_start": res.best_start,
        "starts": res.starts.iter().map(|s| json!({
            "initial_objective": s.initial_objective,
            "final_objective": s.final_objective,
            "evaluations": s.evaluations,
        })).collect::<Vec<_>>(),
    });
    m.write(&l.out_dir.join("optimize.manifest.json")).map_err(runtime)?;
    println!(
        "objective |S21|^2 = {:.6e} ({:.2} dB), wrote {}",
        res.objective,
        10.0 * res.objective.log10(),
        path.display()
    );
    Ok(())
}

fn sweep(common: &Common, caps_path: Option<&Path>) -> Res<()> {
    let l = load(common)?;
    let mut m = manifest_for("sweep", &l, common);
    let g = l.cfg.sweep;
    let alphas = alpha_grid_deg(g.alpha_min_deg, g.alpha_max_deg, g.alpha_step_deg);
    if alphas.is_empty() {
        return Err(usage(anyhow!(
            "empty alpha grid: {} to {} deg in steps of {} deg",
            g.alpha_min_deg,
            g.alpha_max_deg,
            g.alpha_step_deg
        )));
    }
    let mut curves: Vec<BrcsCurve> = Vec::new();
    if let Some(p) = caps_path {
        add_source_inputs(&mut m, &l)?;
        m.add_input(p).map_err(usage)?;
        let link = LinkModel::from_config(&l.cfg, &l.base_dir).map_err(link_failure)?;
        let loads = caps::read(p, link.scenario.elements(), &link.bounds).map_err(usage)?;
        curves.push(link.sweep(&loads, &alphas).map_err(runtime)?);
    }
    let scn = &l.cfg.scenario;
    match scn.board() {
        Some(b) => curves.push(
            rislink::brcs::flat_reflector_reference(
                b.width_m,
                b.height_m,
                scn.wavelength_m(),
                scn.beta_rad(),
                &alphas,
            )
            .map_err(runtime)?,
        ),
        None if curves.is_empty() => {
            return Err(usage(anyhow!(
                "nothing to sweep: pass --caps or set board.width/board.height for the reflector reference"
            )))
        }
        None => log::warn!("no board size configured, reflector column omitted"),
    }
    let mut buf = Vec::new();
    write_csv(&curves, &mut buf).map_err(runtime)?;
    let path = l.out_dir.join("brcs.csv");
    write_output(&mut m, &path, &buf)?;
    let peaks: Vec<_> = curves
        .iter()
        .map(|c| {
            let (a, v) = c.argmax().expect("non-empty grid");
            json!({ "label": c.label, "peak_alpha_deg": a.to_degrees(), "peak_dbsm": v })
        })
        .collect();
    m.results = json!({ "points": alphas.len(), "curves": peaks });
    m.write(&l.out_dir.join("sweep.manifest.json")).map_err(runtime)?;
    println!("wrote {}", path.display());
    Ok(())
}

fn init_threads() -> Res<()> {
    let Ok(v) = std::env::var("RISLINK_THREADS") else {
        return Ok(());
    };
    let n: usize = v
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| usage(anyhow!("RISLINK_THREADS must be a positive integer, got {v:?}")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(runtime)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let result = init_threads().and_then(|()| match &cli.cmd {
        Command::Synthesize(c) => synthesize(c),
        Command::Optimize(c) => optimize(c),
        Command::Sweep { common, caps } => sweep(common, caps.as_deref()),
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {:#}", f.err);
            ExitCode::from(f.code)
        }
    }
}
