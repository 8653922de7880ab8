//! `cqam`: batch front end for constellation construction, shaping, rate
//! evaluation, PAS framing and link reach sweeps.
//!
//! Exit codes: 0 on success, 2 for usage and parameter errors, 3 when a
//! computation or constraint fails.

mod svg;

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use cqam_core::constellation::{
    self as cn, gray_label_star, make_cqam_greedy, make_cqam_hybrid, make_cqam_star,
    make_cqam_two_dist, make_pam, make_square_qam, star_default_gap, stretch, Constellation,
    ConstellationError,
};
use cqam_core::fmt::f64_17;
use cqam_core::linksim::{awgn_transmit, reach_csv, reach_curve, LinkError, LinkModel};
use cqam_core::pas::{
    self, parse_frame, pas_frame, plan_frame, plan_rates, split_for, Layering, PasError,
};
use cqam_core::rates::{rate_curve, Method, Metric, RateError, DEFAULT_ORDER};
use cqam_core::shaping::{
    lambda_for_entropy, mb_weights_with, optimize_lambda_for_mi, ShapingError, ShapingMode,
    ShapingProfile,
};

#[derive(Parser, Debug)]
#[command(name = "cqam", version, about = "Constellation shaping workbench")]
struct Cli {
    /// Seed for every random stream (Monte Carlo, parity, noise, payloads).
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Worker threads; defaults to the number of cores.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Output file; standard output when omitted.
    #[arg(short, long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Build a constellation and write its JSON.
    Construct(ConstructArgs),
    /// Apply Maxwell-Boltzmann shaping to a constellation file.
    Shape(ShapeArgs),
    /// Rate curve CSV (CM, S-CM, B-CM and capacity) over an SNR grid.
    Rates(RatesArgs),
    /// PAS rate plan JSON.
    PasPlan(PasPlanArgs),
    /// Build one binary PAS frame.
    PasFrame(PasFrameArgs),
    /// Send frame or random symbols through the AWGN channel; writes CSV.
    Transmit(TransmitArgs),
    /// Optimum-SNR and rate versus distance for a link model.
    Reach(ReachArgs),
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
enum Kind {
    Pam,
    Qam,
    CqamStar,
    CqamGreedy,
    #[value(name = "cqam-2dist")]
    Cqam2dist,
    CqamHybrid,
}

#[derive(Args, Debug)]
struct ConstructArgs {
    #[arg(value_enum)]
    kind: Kind,
    /// Bits per dimension for PAM, bits per axis for QAM.
    #[arg(long)]
    m: Option<u32>,
    /// Points per shell (and number of shells) for CQAM.
    #[arg(long)]
    q: Option<usize>,
    /// Radial shell spacing for the star family; defaults to the ring chord.
    #[arg(long)]
    gap: Option<f64>,
    #[arg(long, default_value_t = cn::DEFAULT_PHASE_GRID)]
    phase_grid: usize,
    #[arg(long, default_value_t = cn::DEFAULT_RADIUS_STEP)]
    radius_step: f64,
    /// Radial stretch exponent applied after construction.
    #[arg(long)]
    stretch: Option<f64>,
    #[command(flatten)]
    shaping: ShapingFlags,
    /// Also write a scatter plot.
    #[arg(long)]
    svg: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct ShapingFlags {
    /// Maxwell-Boltzmann parameter.
    #[arg(long, conflicts_with_all = ["shape_entropy", "shape_snr"])]
    shape_lambda: Option<f64>,
    /// Target input entropy in bits.
    #[arg(long, conflicts_with = "shape_snr")]
    shape_entropy: Option<f64>,
    /// Choose the parameter maximizing the rate at this SNR (dB).
    #[arg(long)]
    shape_snr: Option<f64>,
    /// Rate maximized with --shape-snr.
    #[arg(long, default_value = "cm")]
    shape_metric: MetricArg,
    /// Weight construction; defaults to per-axis on square grids.
    #[arg(long)]
    shape_mode: Option<ModeArg>,
}

impl ShapingFlags {
    fn requested(&self) -> bool {
        self.shape_lambda.is_some() || self.shape_entropy.is_some() || self.shape_snr.is_some()
    }
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
enum ModeArg {
    Joint,
    PerAxis,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
enum MetricArg {
    Cm,
    Scm,
    Bcm,
}

impl From<MetricArg> for Metric {
    fn from(m: MetricArg) -> Self {
        match m {
            MetricArg::Cm => Metric::Cm,
            MetricArg::Scm => Metric::Scm,
            MetricArg::Bcm => Metric::Bcm,
        }
    }
}

#[derive(Args, Debug)]
struct ShapeArgs {
    /// Constellation JSON.
    input: PathBuf,
    #[command(flatten)]
    shaping: ShapingFlags,
    #[arg(long)]
    svg: Option<PathBuf>,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
enum MethodArg {
    Quad,
    Mc,
}

#[derive(Args, Debug)]
struct RatesArgs {
    /// Constellation JSON.
    input: PathBuf,
    /// SNR grid in dB as start:stop:step, inclusive.
    #[arg(long, default_value = "0:20:1")]
    snr: String,
    /// Comma-separated subset of cm, scm, bcm.
    #[arg(long, default_value = "cm", value_delimiter = ',')]
    metrics: Vec<MetricArg>,
    #[arg(long, value_enum, default_value = "quad")]
    method: MethodArg,
    /// Gauss-Hermite order per dimension.
    #[arg(long, default_value_t = DEFAULT_ORDER)]
    order: usize,
    /// Monte Carlo sample count.
    #[arg(long, default_value_t = 1_000_000)]
    samples: usize,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
enum LayeringArg {
    Circular,
    BinaryPerAxis,
}

#[derive(Args, Debug)]
struct PasPlanArgs {
    /// Region alphabet size.
    #[arg(long, default_value_t = 8)]
    q: usize,
    /// Symbols per fundamental-point label.
    #[arg(long, default_value_t = 1.0)]
    ram: f64,
    /// Matcher rate.
    #[arg(long)]
    rdm: f64,
    /// Split ratio; the code rate follows.
    #[arg(long, conflicts_with = "rc")]
    r: Option<f64>,
    /// Code rate; the split ratio follows.
    #[arg(long)]
    rc: Option<f64>,
    #[arg(long, value_enum, default_value = "circular")]
    layering: LayeringArg,
}

#[derive(Args, Debug)]
struct PasFrameArgs {
    /// Shaped constellation JSON; the amplitude law is taken from it.
    #[arg(long)]
    format: PathBuf,
    /// Points per frame.
    #[arg(long, default_value_t = 1000)]
    n: usize,
    /// Target code rate.
    #[arg(long)]
    rc: f64,
    /// Payload file read MSB first; random bits from --seed when omitted.
    #[arg(long)]
    payload: Option<PathBuf>,
    /// Frame plan JSON; defaults to the output path with `.plan.json`.
    #[arg(long)]
    meta: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct TransmitArgs {
    /// Constellation JSON.
    #[arg(long)]
    format: PathBuf,
    #[arg(long)]
    snr: f64,
    /// Binary frame from `pas-frame`.
    #[arg(long, conflicts_with = "symbols")]
    frame: Option<PathBuf>,
    /// Number of random symbols drawn from the input distribution.
    #[arg(long)]
    symbols: Option<usize>,
}

#[derive(Args, Debug)]
struct ReachArgs {
    /// Link model as `key = value` lines or JSON.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Constellation JSON.
    #[arg(long)]
    format: PathBuf,
    /// Span counts as start:stop:step, inclusive.
    #[arg(long, default_value = "10:60:5")]
    spans: String,
    #[arg(long, default_value = "cm")]
    metric: MetricArg,
    #[arg(long, default_value_t = DEFAULT_ORDER)]
    order: usize,
}

#[derive(Debug)]
enum CliError {
    Usage(String),
    Failure(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Failure(_) => 3,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) | CliError::Failure(m) => f.write_str(m),
        }
    }
}

impl From<ConstellationError> for CliError {
    fn from(e: ConstellationError) -> Self {
        match e {
            ConstellationError::InvalidParameter(_) | ConstellationError::Json(_) => {
                CliError::Usage(e.to_string())
            }
            _ => CliError::Failure(e.to_string()),
        }
    }
}

impl From<RateError> for CliError {
    fn from(e: RateError) -> Self {
        match e {
            RateError::Order(_) | RateError::Samples(_) | RateError::Snr(_) => {
                CliError::Usage(e.to_string())
            }
            _ => CliError::Failure(e.to_string()),
        }
    }
}

impl From<ShapingError> for CliError {
    fn from(e: ShapingError) -> Self {
        match e {
            ShapingError::InvalidParameter(_) => CliError::Usage(e.to_string()),
            ShapingError::Constellation(e) => e.into(),
            ShapingError::Rate(e) => e.into(),
        }
    }
}

impl From<PasError> for CliError {
    fn from(e: PasError) -> Self {
        match e {
            PasError::InvalidParameter(_) | PasError::Format(_) => CliError::Usage(e.to_string()),
            PasError::Constellation(e) => e.into(),
            _ => CliError::Failure(e.to_string()),
        }
    }
}

impl From<LinkError> for CliError {
    fn from(e: LinkError) -> Self {
        match e {
            LinkError::InvalidParameter(_) | LinkError::Config(_) => CliError::Usage(e.to_string()),
            LinkError::Rate(e) => e.into(),
            LinkError::Shaping(e) => e.into(),
            LinkError::Unbounded(_) => CliError::Failure(e.to_string()),
        }
    }
}

type Result<T> = std::result::Result<T, CliError>;

fn usage<T>(msg: impl Into<String>) -> Result<T> {
    Err(CliError::Usage(msg.into()))
}

fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<()> {
    fs::write(path, bytes)
        .map_err(|e| CliError::Usage(format!("cannot write {}: {e}", path.display())))
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(p) => write_file(p, text.as_bytes()),
        None => std::io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| CliError::Failure(format!("cannot write output: {e}"))),
    }
}

fn load_constellation(path: &Path) -> Result<Constellation> {
    Ok(Constellation::from_json(&read_text(path)?)?)
}

/// Path next to `out` with its extension replaced by `ext`.
fn sibling(out: &Path, ext: &str) -> PathBuf {
    out.with_extension(ext)
}

/// Parses `start:stop:step` into an inclusive grid.
fn parse_grid(spec: &str) -> Result<Vec<f64>> {
    let parts: Vec<&str> = spec.split(':').collect();
    let nums = parts
        .iter()
        .map(|p| p.trim().parse::<f64>())
        .collect::<std::result::Result<Vec<_>, _>>()
        .map_err(|_| {
            CliError::Usage(format!(
                "grid {spec:?}: expected numbers as start:stop:step"
            ))
        })?;
    let (start, stop, step) = match nums[..] {
        [x] => (x, x, 1.0),
        [a, b, s] => (a, b, s),
        _ => return usage(format!("grid {spec:?}: expected start:stop:step")),
    };
    if !(start.is_finite() && stop.is_finite() && step > 0.0 && stop >= start) {
        return usage(format!(
            "grid {spec:?}: need finite start <= stop and positive step"
        ));
    }
    let count = ((stop - start) / step + 1e-9).floor() as usize + 1;
    if count > 100_000 {
        return usage(format!("grid {spec:?} has too many points"));
    }
    Ok((0..count).map(|k| start + k as f64 * step).collect())
}

fn apply_shaping(c: &Constellation, flags: &ShapingFlags) -> Result<Option<ShapingProfile>> {
    if let Some(mode) = flags.shape_mode {
        let mode = match mode {
            ModeArg::Joint => ShapingMode::Joint,
            ModeArg::PerAxis => ShapingMode::PerAxis,
        };
        if mode != ShapingMode::default_for(c) && flags.shape_lambda.is_none() {
            return usage(
                "--shape-mode other than the default is only supported with --shape-lambda",
            );
        }
        if let Some(l) = flags.shape_lambda {
            return Ok(Some(mb_weights_with(c, l, mode)?));
        }
    }
    let method = Method::quad();
    Ok(
        match (flags.shape_lambda, flags.shape_entropy, flags.shape_snr) {
            (Some(l), _, _) => Some(mb_weights_with(c, l, ShapingMode::default_for(c))?),
            (_, Some(h), _) => Some(lambda_for_entropy(c, h)?),
            (_, _, Some(s)) => Some(optimize_lambda_for_mi(
                c,
                s,
                flags.shape_metric.into(),
                method,
            )?),
            _ => None,
        },
    )
}

/// Writes the constellation, and the shaping sidecar and plot when present.
fn write_constellation(
    out: Option<&Path>,
    c: &Constellation,
    profile: Option<&ShapingProfile>,
    svg_path: Option<&Path>,
) -> Result<()> {
    emit(out, &c.to_json())?;
    if let Some(p) = profile {
        let sidecar = p.sidecar_json();
        match out {
            Some(o) => write_file(&sibling(o, "shaping.json"), sidecar.as_bytes())?,
            None => eprintln!("{sidecar}"),
        }
    }
    if let Some(s) = svg_path {
        write_file(s, svg::scatter(c).as_bytes())?;
    }
    Ok(())
}

fn cmd_construct(cli: &Cli, a: &ConstructArgs) -> Result<()> {
    let need_q = || {
        a.q.ok_or_else(|| CliError::Usage(format!("{:?} needs --q", a.kind)))
    };
    let need_m = || {
        a.m.ok_or_else(|| CliError::Usage(format!("{:?} needs --m", a.kind)))
    };
    let mut c = match a.kind {
        Kind::Pam => make_pam(need_m()?)?,
        Kind::Qam => make_square_qam(need_m()?)?,
        Kind::CqamStar => {
            let q = need_q()?;
            let gap = match a.gap {
                Some(g) => g,
                None if q >= 2 => star_default_gap(q),
                None => 0.0,
            };
            make_cqam_star(q, gap)?
        }
        Kind::CqamGreedy => make_cqam_greedy(need_q()?, a.phase_grid, a.radius_step)?,
        Kind::Cqam2dist => make_cqam_two_dist(need_q()?)?,
        Kind::CqamHybrid => make_cqam_hybrid(need_q()?)?,
    };
    if c.q() == 8
        && matches!(
            a.kind,
            Kind::CqamStar | Kind::CqamGreedy | Kind::Cqam2dist | Kind::CqamHybrid
        )
    {
        c = gray_label_star(&c)?;
    }
    if let Some(alpha) = a.stretch {
        c = stretch(&c, alpha)?;
    }
    let profile = apply_shaping(&c, &a.shaping)?;
    let c = profile.as_ref().map_or(c, |p| p.constellation.clone());
    write_constellation(cli.out.as_deref(), &c, profile.as_ref(), a.svg.as_deref())
}

fn cmd_shape(cli: &Cli, a: &ShapeArgs) -> Result<()> {
    let c = load_constellation(&a.input)?;
    if !a.shaping.requested() {
        return usage("shape needs one of --shape-lambda, --shape-entropy, --shape-snr");
    }
    let profile = apply_shaping(&c, &a.shaping)?.expect("requested");
    write_constellation(
        cli.out.as_deref(),
        &profile.constellation,
        Some(&profile),
        a.svg.as_deref(),
    )
}

fn cmd_rates(cli: &Cli, a: &RatesArgs) -> Result<()> {
    let c = load_constellation(&a.input)?;
    let grid = parse_grid(&a.snr)?;
    let method = match a.method {
        MethodArg::Quad => Method::Quadrature { order: a.order },
        MethodArg::Mc => Method::MonteCarlo {
            samples: a.samples,
            seed: cli.seed,
        },
    };
    let metrics: Vec<Metric> = a.metrics.iter().map(|&m| m.into()).collect();
    let shaping = if c.probs().iter().all(|p| (p - c.probs()[0]).abs() < 1e-15) {
        "uniform"
    } else {
        "shaped"
    };
    let curve = rate_curve(&c, &grid, &metrics, method, shaping)?;
    emit(cli.out.as_deref(), &curve.to_csv())
}

fn cmd_pas_plan(cli: &Cli, a: &PasPlanArgs) -> Result<()> {
    let layering = match a.layering {
        LayeringArg::Circular => Layering::Circular { q: a.q },
        LayeringArg::BinaryPerAxis => Layering::BinaryPerAxis,
    };
    let plan = match (a.r, a.rc) {
        (_, Some(rc)) => split_for(layering, a.ram, a.rdm, rc)?,
        (r, None) => plan_rates(layering, a.ram, a.rdm, r.unwrap_or(0.0))?,
    };
    let mut text = plan.to_json();
    text.push('\n');
    emit(cli.out.as_deref(), &text)
}

fn read_payload(path: &Path, bits: usize) -> Result<Vec<bool>> {
    let bytes = fs::read(path)
        .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?;
    if bytes.len() * 8 < bits {
        return usage(format!(
            "payload has {} bits, frame needs {bits}",
            bytes.len() * 8
        ));
    }
    Ok((0..bits)
        .map(|i| (bytes[i / 8] >> (7 - i % 8)) & 1 == 1)
        .collect())
}

fn cmd_pas_frame(cli: &Cli, a: &PasFrameArgs) -> Result<()> {
    let Some(out) = cli.out.as_deref() else {
        return usage("pas-frame writes binary output and needs --out");
    };
    let c = load_constellation(&a.format)?;
    let fp = plan_frame(&c, a.n, a.rc)?;
    let payload = match &a.payload {
        Some(p) => read_payload(p, fp.payload_bits)?,
        None => {
            let mut rng = ChaCha8Rng::seed_from_u64(cli.seed);
            (0..fp.payload_bits).map(|_| rng.random()).collect()
        }
    };
    let frame = pas_frame(&payload, &fp, &c, cli.seed)?;
    write_file(out, &frame.to_bytes(&fp))?;
    let meta = a.meta.clone().unwrap_or_else(|| sibling(out, "plan.json"));
    write_file(&meta, fp.to_json().as_bytes())
}

fn cmd_transmit(cli: &Cli, a: &TransmitArgs) -> Result<()> {
    let c = load_constellation(&a.format)?;
    let sent: Vec<Complex64> = match (&a.frame, a.symbols) {
        (Some(path), _) => {
            let bytes = fs::read(path)
                .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?;
            let rec = parse_frame(&bytes)?;
            pas::pas_map(&rec.amplitudes, &rec.regions, &c)?
        }
        (None, Some(n)) => {
            let mut rng = ChaCha8Rng::seed_from_u64(cli.seed);
            let cdf: Vec<f64> = c
                .probs()
                .iter()
                .scan(0.0, |acc, p| {
                    *acc += p;
                    Some(*acc)
                })
                .collect();
            (0..n)
                .map(|_| {
                    let u: f64 = rng.random::<f64>() * cdf[cdf.len() - 1];
                    c.points()[cdf.partition_point(|&v| v <= u).min(cdf.len() - 1)]
                })
                .collect()
        }
        (None, None) => return usage("transmit needs --frame or --symbols"),
    };
    // the noise stream is decorrelated from the symbol stream
    let received = awgn_transmit(&sent, a.snr, cli.seed ^ 0x9e37_79b9_7f4a_7c15);
    let mut csv = String::from("sent_re,sent_im,recv_re,recv_im\n");
    for (x, y) in sent.iter().zip(&received) {
        csv.push_str(&[x.re, x.im, y.re, y.im].map(f64_17).join(","));
        csv.push('\n');
    }
    emit(cli.out.as_deref(), &csv)
}

fn cmd_reach(cli: &Cli, a: &ReachArgs) -> Result<()> {
    let model = match &a.config {
        Some(p) => LinkModel::parse_config(&read_text(p)?)?,
        None => LinkModel::default(),
    };
    let c = load_constellation(&a.format)?;
    let spans = parse_grid(&a.spans)?;
    if spans.iter().any(|s| s.fract() != 0.0 || *s < 1.0) {
        return usage("span counts must be positive integers");
    }
    let spans: Vec<usize> = spans.iter().map(|&s| s as usize).collect();
    let points = reach_curve(
        &c,
        &model,
        &spans,
        a.metric.into(),
        Method::Quadrature { order: a.order },
    )?;
    emit(cli.out.as_deref(), &reach_csv(&points))
}

fn run(cli: &Cli) -> Result<()> {
    if let Some(n) = cli.threads {
        if n == 0 {
            return usage("--threads must be at least 1");
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Failure(format!("thread pool: {e}")))?;
    }
    match &cli.command {
        Command::Construct(a) => cmd_construct(cli, a),
        Command::Shape(a) => cmd_shape(cli, a),
        Command::Rates(a) => cmd_rates(cli, a),
        Command::PasPlan(a) => cmd_pas_plan(cli, a),
        Command::PasFrame(a) => cmd_pas_frame(cli, a),
        Command::Transmit(a) => cmd_transmit(cli, a),
        Command::Reach(a) => cmd_reach(cli, a),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code())
        }
    }
}
