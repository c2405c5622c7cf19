use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::str::FromStr;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use log::{info, warn};
use rayon::prelude::*;

use omnitrack_core::dataset::{self, SequenceManifest};
use omnitrack_core::framework::{
    track_sequence, FrameResult, InitTarget, LocalTracker, NccTracker, OracleTracker, SearchPolicy,
};
use omnitrack_core::metrics::{
    build_report, compute_attributes, default_contour_tolerance, AngleMode, EvalConfig, EvaluatedSequence,
    FrameSummary, SequenceEvaluator,
};
use omnitrack_core::remap::extract_region;
use omnitrack_core::synth::{generate_sequence, CapSpec, Trajectory, TrajectoryKind};
use omnitrack_core::{synth, Bfov, ErpSize, LonLat};

/// Omnidirectional tracking geometry and evaluation toolkit.
#[derive(Debug, Parser)]
#[command(name = "omnitrack", version, about)]
struct Cli {
    /// More log output (repeatable).
    #[arg(short, long, action = clap::ArgAction::Count, global = true)]
    verbose: u8,

    /// Only log errors.
    #[arg(short, long, global = true)]
    quiet: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Derive bbox/rbbox/bfov/rbfov ground truth and attributes from masks.
    Convert(ConvertArgs),
    /// Extract the local view of a BFoV region from an ERP image.
    Unwarp(UnwarpArgs),
    /// Run a tracker through the 360 framework and write its results.
    Track(TrackArgs),
    /// Evaluate results against ground truth and write a JSON report.
    Eval(EvalArgs),
    /// Generate a synthetic spherical-cap sequence.
    Synth(SynthArgs),
}

#[derive(Debug, Args)]
struct ConvertArgs {
    /// Sequence directory containing frames/ and mask/.
    seq: PathBuf,
}

#[derive(Debug, Args)]
struct UnwarpArgs {
    /// ERP input image (2:1).
    image: PathBuf,

    /// Region as clon,clat,theta,phi,gamma in degrees.
    #[arg(long, allow_hyphen_values = true)]
    bfov: String,

    /// Output width in pixels.
    #[arg(long, default_value_t = 512)]
    size: usize,

    /// Output height in pixels [default: same as --size].
    #[arg(long)]
    height: Option<usize>,

    /// Output image [default: <image>_local.png].
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum TrackerKind {
    Ncc,
    Oracle,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum InitKind {
    /// Mask when the sequence has masks, BFoV otherwise.
    Auto,
    Mask,
    Bfov,
}

#[derive(Debug, Args)]
struct TrackArgs {
    /// Sequence directories.
    #[arg(required = true)]
    seqs: Vec<PathBuf>,

    #[arg(long, value_enum, default_value_t = TrackerKind::Ncc)]
    tracker: TrackerKind,

    /// Output directory; results go to <out>/<sequence name>/.
    #[arg(long)]
    out: PathBuf,

    #[arg(long, value_enum, default_value_t = InitKind::Auto)]
    init: InitKind,

    /// Search region size as a multiple of the target extent.
    #[arg(long, default_value_t = 2.0)]
    expand: f64,

    /// Smallest search extent in degrees.
    #[arg(long, default_value_t = 30.0)]
    min_fov: f64,

    /// Local image size in pixels.
    #[arg(long, default_value_t = 512)]
    local_size: usize,

    /// Sequences processed in parallel.
    #[arg(long, default_value_t = 1)]
    jobs: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum AngleArg {
    Geodesic,
    Literal,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum NormArg {
    /// Normalize center errors by the ground-truth box size.
    Gt,
}

#[derive(Debug, Args)]
struct EvalArgs {
    /// Ground-truth sequence directories.
    #[arg(required = true)]
    seqs: Vec<PathBuf>,

    /// Result directory: either one sequence's results, or a parent holding
    /// one sub-directory per sequence name.
    #[arg(long)]
    results: PathBuf,

    /// Also score masks (J, F, J_sphere, F_sphere).
    #[arg(long)]
    masks: bool,

    /// Report path; curves are written next to it as curves.csv.
    #[arg(long, default_value = "report.json")]
    out: PathBuf,

    /// Raster used for spherical IoU, as WxH.
    #[arg(long, env = "OMNITRACK_RASTER", default_value = "1920x960")]
    raster: String,

    /// Contour tolerance in pixels [default: 0.8% of the frame diagonal].
    #[arg(long)]
    contour_tol: Option<usize>,

    #[arg(long, value_enum, default_value_t = AngleArg::Geodesic)]
    angle: AngleArg,

    #[arg(long, value_enum, default_value_t = NormArg::Gt)]
    norm: NormArg,

    /// Tracker name recorded in the report.
    #[arg(long, default_value = "tracker")]
    tracker_name: String,

    /// Sequences processed in parallel.
    #[arg(long, default_value_t = 1)]
    jobs: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
#[value(rename_all = "snake_case")]
enum KindArg {
    Static,
    GreatCircle,
    PoleCross,
    BorderCross,
}

impl From<KindArg> for TrajectoryKind {
    fn from(k: KindArg) -> Self {
        match k {
            KindArg::Static => TrajectoryKind::Static,
            KindArg::GreatCircle => TrajectoryKind::GreatCircle,
            KindArg::PoleCross => TrajectoryKind::PoleCross,
            KindArg::BorderCross => TrajectoryKind::BorderCross,
        }
    }
}

#[derive(Debug, Args)]
struct SynthArgs {
    #[arg(long, value_enum)]
    kind: KindArg,

    #[arg(long, default_value_t = 60)]
    frames: usize,

    /// Cap radius in degrees.
    #[arg(long, default_value_t = 10.0)]
    rho: f64,

    /// Frame height in pixels (width is twice this).
    #[arg(long, default_value_t = 960)]
    height: usize,

    /// Background noise seed.
    #[arg(long, default_value_t = 0)]
    seed: u64,

    #[arg(long)]
    out: PathBuf,
}

fn parse_bfov(text: &str) -> Result<Bfov> {
    let v: Vec<f64> = text
        .split(',')
        .map(|s| {
            s.trim()
                .parse::<f64>()
                .with_context(|| format!("bad number {s:?} in --bfov"))
        })
        .collect::<Result<_>>()?;
    if v.len() != 5 {
        bail!("--bfov needs 5 values (clon,clat,theta,phi,gamma), got {}", v.len());
    }
    Ok(Bfov::from_degrees(v[0], v[1], v[2], v[3], v[4])?)
}

/// Runs `f` over `items`, `jobs` at a time. With one job the items run in
/// order on the calling thread and per-frame kernels keep the global pool.
fn for_each_seq<T, R, F>(items: &[T], jobs: usize, f: F) -> Result<Vec<R>>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> Result<R> + Sync + Send,
{
    if jobs <= 1 {
        return items.iter().map(f).collect();
    }
    let pool = rayon::ThreadPoolBuilder::new().num_threads(jobs).build()?;
    pool.install(|| items.par_iter().map(f).collect())
}

fn convert(args: &ConvertArgs) -> Result<()> {
    let m = dataset::load_sequence(&args.seq)?;
    if m.masks.is_none() {
        bail!("{}: no mask/ directory to convert", args.seq.display());
    }
    let mut records = Vec::with_capacity(m.len());
    let mut summaries = Vec::with_capacity(m.len());
    for k in 0..m.len() {
        let mask = m.load_mask(k)?;
        let mut r = synth::annotate(k, mask, m.size).with_context(|| format!("frame {k}"))?;
        summaries.push(FrameSummary::from_record(&r, m.size));
        r.mask = None;
        records.push(r);
    }
    dataset::write_annotations(&records, &args.seq)?;
    let flags = compute_attributes(&summaries, m.size)?;
    let path = args.seq.join(dataset::ATTRIBUTES_FILE);
    let manual = m
        .attributes
        .as_ref()
        .and_then(|p| dataset::read_attributes(p).ok())
        .and_then(|a| a.manual);
    dataset::write_attributes(&path, &flags, manual.as_ref())?;
    info!("{}: converted {} frames", m.name, m.len());
    Ok(())
}

fn unwarp(args: &UnwarpArgs) -> Result<()> {
    let bfov = parse_bfov(&args.bfov)?;
    let img = dataset::read_frame(&args.image)?;
    let (w, h) = (args.size, args.height.unwrap_or(args.size));
    info!("surface branch: {}", bfov.surface_kind().name());
    let local = extract_region(&img, &bfov, w, h)?;
    let out = args.out.clone().unwrap_or_else(|| {
        let stem = args
            .image
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_default();
        args.image.with_file_name(format!("{stem}_local.png"))
    });
    dataset::write_local_image(&local, &out)?;
    info!("wrote {}x{} view to {}", w, h, out.display());
    Ok(())
}

fn track_one(m: &SequenceManifest, args: &TrackArgs, policy: &SearchPolicy) -> Result<Vec<FrameResult>> {
    let use_mask = match args.init {
        InitKind::Auto => m.masks.is_some(),
        InitKind::Mask => true,
        InitKind::Bfov => false,
    };
    let init = if use_mask {
        InitTarget::Mask(m.load_mask(0)?)
    } else {
        let b = m.annotations[0]
            .rbfov
            .or(m.annotations[0].bfov)
            .with_context(|| format!("{}: no BFoV for frame 0", m.name))?;
        InitTarget::Bfov(b)
    };
    let mut tracker: Box<dyn LocalTracker> = match args.tracker {
        TrackerKind::Ncc => Box::new(NccTracker::new()),
        TrackerKind::Oracle => {
            if m.masks.is_none() {
                bail!("{}: the oracle tracker needs ground-truth masks", m.name);
            }
            let seq = m.clone();
            Box::new(OracleTracker::new(move |k| Ok(seq.load_mask(k)?)))
        }
    };
    let frames = (0..m.len()).map(|k| m.load_frame(k).map_err(Into::into));
    Ok(track_sequence(frames, &init, tracker.as_mut(), policy)?)
}

fn track(args: &TrackArgs) -> Result<()> {
    let policy = SearchPolicy {
        expand_factor: args.expand,
        min_fov: args.min_fov.to_radians(),
        local_size: args.local_size,
        ..SearchPolicy::default()
    };
    if !(policy.expand_factor > 0.0) || !(policy.min_fov > 0.0) || policy.local_size < 2 {
        bail!("search policy values must be positive");
    }
    for_each_seq(&args.seqs, args.jobs, |seq| -> Result<()> {
        let m = dataset::load_sequence(seq)?;
        let results = track_one(&m, args, &policy).with_context(|| format!("tracking {}", m.name))?;
        let lost = results.iter().filter(|r| r.confidence == 0.0).count();
        if lost > 0 {
            warn!("{}: target lost in {lost} frames", m.name);
        }
        let out = args.out.join(&m.name);
        dataset::write_results(&results, &out)?;
        info!(
            "{}: {} frames tracked, results in {}",
            m.name,
            results.len(),
            out.display()
        );
        Ok(())
    })?;
    Ok(())
}

fn results_dir(root: &Path, name: &str, single: bool) -> PathBuf {
    let nested = root.join(name);
    if nested.is_dir() || !single {
        nested
    } else {
        root.to_path_buf()
    }
}

fn eval_one(seq: &Path, args: &EvalArgs, cfg: &EvalConfig) -> Result<EvaluatedSequence> {
    let m = dataset::load_sequence(seq)?;
    let dir = results_dir(&args.results, &m.name, args.seqs.len() == 1);
    let results = dataset::load_results(&dir, Some(m.len())).with_context(|| format!("results for {}", m.name))?;
    let mut cfg = cfg.clone();
    cfg.size = m.size;
    cfg.contour_tol = args.contour_tol.unwrap_or_else(|| default_contour_tolerance(m.size));
    let stored = m
        .attributes
        .as_ref()
        .and_then(|p| dataset::read_attributes(p).ok())
        .map(|a| a.computed);
    let mut ev = SequenceEvaluator::new(&cfg);
    let mut summaries = Vec::with_capacity(m.len());
    for k in 0..m.len() {
        let gt = m.record(k, args.masks)?;
        let tr = results.record(k, args.masks)?;
        if stored.is_none() {
            summaries.push(FrameSummary::from_record(&gt, m.size));
        }
        ev.push(&gt, &tr)?;
    }
    let attributes = match stored {
        Some(a) => Some(a),
        None => Some(compute_attributes(&summaries, m.size)?),
    };
    Ok(EvaluatedSequence {
        name: m.name,
        result: ev.finish(),
        attributes,
    })
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map(|x| format!("{x:.4}")).unwrap_or_else(|| "-".into())
}

fn eval(args: &EvalArgs) -> Result<()> {
    let raster = ErpSize::from_str(&args.raster).with_context(|| format!("bad raster {:?}", args.raster))?;
    let NormArg::Gt = args.norm;
    let mut cfg = EvalConfig::new(raster);
    cfg.raster = raster;
    cfg.masks = args.masks;
    cfg.angle_mode = match args.angle {
        AngleArg::Geodesic => AngleMode::Geodesic,
        AngleArg::Literal => AngleMode::Literal,
    };
    let mut seqs = for_each_seq(&args.seqs, args.jobs, |s| {
        eval_one(s, args, &cfg).with_context(|| format!("evaluating {}", s.display()))
    })?;
    seqs.sort_by(|a, b| a.name.cmp(&b.name));
    let report = build_report(&args.tracker_name, &cfg, &seqs);
    if let Some(parent) = args.out.parent().filter(|p| !p.as_os_str().is_empty()) {
        std::fs::create_dir_all(parent).with_context(|| format!("creating {}", parent.display()))?;
    }
    dataset::write_report(&report, &args.out)?;
    let csv = args.out.with_file_name("curves.csv");
    dataset::write_curves_csv(&report, &csv)?;
    let a = &report.aggregate;
    println!(
        "S_dual {}  P_dual@20 {}  Pnorm_dual {}  P_angle@3 {}  S_sphere {}  J {}  F {}  J_sphere {}  F_sphere {}",
        fmt_opt(a.s_dual_auc),
        fmt_opt(a.p_dual_20),
        fmt_opt(a.pnorm_dual_auc),
        fmt_opt(a.p_angle_3),
        fmt_opt(a.s_sphere_auc),
        fmt_opt(a.j),
        fmt_opt(a.f),
        fmt_opt(a.j_sphere),
        fmt_opt(a.f_sphere),
    );
    info!("report written to {} and {}", args.out.display(), csv.display());
    Ok(())
}

fn synth_cmd(args: &SynthArgs) -> Result<()> {
    let size = ErpSize::from_height(args.height)?;
    let t = Trajectory::new(args.kind.into(), args.frames)?;
    let cap = CapSpec::new(LonLat::from_degrees(0.0, 0.0)?, args.rho.to_radians())?;
    let m = generate_sequence(&t, &cap, size, &args.out, args.seed)?;
    info!(
        "{}: wrote {} frames ({}) to {}",
        t.kind,
        m.len(),
        size,
        args.out.display()
    );
    Ok(())
}

fn run(cli: &Cli) -> Result<()> {
    match &cli.command {
        Command::Convert(a) => convert(a),
        Command::Unwarp(a) => unwarp(a),
        Command::Track(a) => track(a),
        Command::Eval(a) => eval(a),
        Command::Synth(a) => synth_cmd(a),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = match (cli.quiet, cli.verbose) {
        (true, _) => "error",
        (false, 0) => "info",
        (false, 1) => "debug",
        _ => "trace",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level))
        .format_timestamp(None)
        .init();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
