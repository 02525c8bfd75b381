//! Command-line front end. The `rinr` binary only forwards to [`run`].
//!
//! Exit codes: 0 success, 1 usage, 2 data or integrity problem, 3 numeric
//! failure (divergence, non-finite values).

use std::collections::HashMap;
use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::json;

use crate::archive::{stats, DatasetArchive};
use crate::bench::{bench, BenchConfig};
use crate::compress::{dequantize, prune_l1, quantize, PruneSchedule, QuantMode};
use crate::decoder::{decode_batch, OutputSize};
use crate::encoder::{encode_dataset, EncodeConfig, FailurePolicy};
use crate::error::Error;
use crate::image::ImageBuffer;
use crate::metrics::{psnr, psnr_8bit};
use crate::nas::{enumerate, sweep, EnumerateOptions, Shape, SweepAxes};
use crate::net::Architecture;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_DATA: i32 = 2;
pub const EXIT_NUMERIC: i32 = 3;

const IMAGE_EXTENSIONS: [&str; 4] = ["png", "bmp", "jpg", "jpeg"];

#[derive(Debug, Parser)]
#[command(name = "rinr", version, about = "Images as compact sine-activated networks")]
struct Cli {
    /// Emit one JSON object per line instead of text.
    #[arg(long, global = true)]
    json: bool,

    /// TOML file whose values take precedence over command-line flags.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Fit every image in a directory and write a `.rinr` archive.
    Encode(EncodeArgs),
    /// Decode archive records to PNG files.
    Decode(DecodeArgs),
    /// Prune every record to a total ratio (re-quantizing if needed).
    Prune(PruneArgs),
    /// Quantize hidden layers of every record.
    Quantize(QuantizeArgs),
    /// PSNR between two image files.
    Psnr(PsnrArgs),
    /// Enumerate architectures under a byte budget, optionally sweeping hyperparameters.
    Nas(NasArgs),
    /// Decode throughput of an archive.
    Bench(BenchArgs),
    /// Size breakdown of an archive.
    Stats(StatsArgs),
}

#[derive(Debug, Args)]
struct EncodeArgs {
    input: PathBuf,
    #[arg(short, long)]
    output: PathBuf,
    /// Starting recipe: cifar, flowers or imagenet.
    #[arg(long, default_value = "cifar")]
    preset: String,
    /// Weight layers and hidden width, e.g. `3,15`.
    #[arg(long, value_name = "L,H")]
    arch: Option<String>,
    #[arg(long)]
    omega: Option<f64>,
    /// Prune schedule: cifar or large.
    #[arg(long)]
    schedule: Option<String>,
    #[arg(long)]
    skip_round2: bool,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, default_value_t = 0)]
    jobs: usize,
    #[arg(long)]
    steps: Option<usize>,
    #[arg(long)]
    retrain_steps: Option<usize>,
    #[arg(long)]
    lr: Option<f64>,
    #[arg(long)]
    retrain_lr: Option<f64>,
    /// Quantize hidden layers after fitting (8 or 16).
    #[arg(long)]
    bits: Option<u8>,
    /// Keep going when an image fails to fit.
    #[arg(long)]
    skip_failures: bool,
}

#[derive(Debug, Args)]
struct DecodeArgs {
    archive: PathBuf,
    #[arg(short, long)]
    output: PathBuf,
    /// Output size `HxW`; defaults to each image's source size.
    #[arg(long)]
    size: Option<String>,
    /// Only decode these record ids.
    #[arg(long, num_args = 1.., value_delimiter = ',')]
    ids: Vec<String>,
    #[arg(long, default_value_t = 0)]
    jobs: usize,
}

#[derive(Debug, Args)]
struct PruneArgs {
    archive: PathBuf,
    #[arg(short, long)]
    output: PathBuf,
    #[arg(long)]
    ratio: f64,
}

#[derive(Debug, Args)]
struct QuantizeArgs {
    archive: PathBuf,
    #[arg(short, long)]
    output: PathBuf,
    #[arg(long)]
    bits: u8,
}

#[derive(Debug, Args)]
struct PsnrArgs {
    a: PathBuf,
    b: PathBuf,
}

#[derive(Debug, Args)]
struct NasArgs {
    #[arg(long)]
    budget: usize,
    #[arg(long, default_value = "uniform")]
    shape: String,
    #[arg(long, default_value_t = 2)]
    min_depth: usize,
    #[arg(long, default_value_t = 12)]
    max_depth: usize,
    #[arg(long, default_value_t = 512)]
    max_width: usize,
    /// Fit each enumerated architecture on the images in this directory.
    #[arg(long)]
    sweep: Option<PathBuf>,
    #[arg(long, value_delimiter = ',', default_value = "30")]
    omegas: Vec<f64>,
    #[arg(long, value_delimiter = ',', default_value = "0.0005")]
    lrs: Vec<f64>,
    #[arg(long, value_delimiter = ',', default_value = "1000")]
    steps: Vec<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 0)]
    jobs: usize,
    /// Write the sweep table as CSV.
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct BenchArgs {
    archive: PathBuf,
    #[arg(long, default_value_t = 1)]
    batch: usize,
    #[arg(long, default_value_t = 1)]
    jobs: usize,
    #[arg(long)]
    size: Option<String>,
}

#[derive(Debug, Args)]
struct StatsArgs {
    archive: PathBuf,
    #[arg(long)]
    jpeg_dir: Option<PathBuf>,
}

#[derive(Debug)]
enum Failure {
    Usage(String),
    Run(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Run(e)
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Run(e.into())
    }
}

type CliResult<T = ()> = std::result::Result<T, Failure>;

fn usage(msg: impl Into<String>) -> Failure {
    Failure::Usage(msg.into())
}

/// Parses `args` (including the program name) and runs the command,
/// writing results to `out` and diagnostics to `err`. Returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if code == EXIT_OK {
                write!(out, "{text}")
            } else {
                write!(err, "{text}")
            };
            return code;
        }
    };
    let json = cli.json;
    match dispatch(cli, out) {
        Ok(()) => EXIT_OK,
        Err(f) => {
            let (code, msg) = match f {
                Failure::Usage(m) => (EXIT_USAGE, m),
                Failure::Run(e) => (if e.is_numeric() { EXIT_NUMERIC } else { EXIT_DATA }, error_chain(&e)),
            };
            if json {
                let _ = writeln!(err, "{}", json!({ "event": "error", "code": code, "message": msg }));
            } else {
                let _ = writeln!(err, "error: {msg}");
            }
            code
        }
    }
}

fn error_chain(e: &Error) -> String {
    let mut msg = e.to_string();
    let mut src = std::error::Error::source(e);
    while let Some(s) = src {
        let text = s.to_string();
        if !msg.contains(&text) {
            msg.push_str(": ");
            msg.push_str(&text);
        }
        src = s.source();
    }
    msg
}

struct Output<'a> {
    json: bool,
    out: &'a mut dyn Write,
}

impl Output<'_> {
    fn record<S: Serialize>(&mut self, event: &str, value: &S, text: impl FnOnce() -> String) -> CliResult {
        if self.json {
            let mut v = serde_json::to_value(value).map_err(|e| Failure::Run(Error::Io(e.into())))?;
            if let Some(obj) = v.as_object_mut() {
                obj.insert("event".into(), json!(event));
            }
            writeln!(self.out, "{v}")?;
        } else {
            writeln!(self.out, "{}", text())?;
        }
        Ok(())
    }
}

fn load_config(path: Option<&Path>) -> CliResult<toml::Table> {
    match path {
        None => Ok(toml::Table::new()),
        Some(p) => {
            let text = fs::read_to_string(p)?;
            text.parse::<toml::Table>()
                .map_err(|e| usage(format!("config {}: {e}", p.display())))
        }
    }
}

/// Overlays `[section]` of the config file onto `base`.
fn overlay<T>(base: T, config: &toml::Table, section: &str) -> CliResult<T>
where
    T: Serialize + serde::de::DeserializeOwned,
{
    let Some(over) = config.get(section) else {
        return Ok(base);
    };
    let over = over
        .as_table()
        .ok_or_else(|| usage(format!("config section [{section}] must be a table")))?;
    let mut merged = toml::Table::try_from(&base).map_err(|e| usage(e.to_string()))?;
    for (k, v) in over {
        merged.insert(k.clone(), v.clone());
    }
    toml::Value::Table(merged)
        .try_into()
        .map_err(|e| usage(format!("config section [{section}]: {e}")))
}

fn dispatch(cli: Cli, out: &mut dyn Write) -> CliResult {
    let config = load_config(cli.config.as_deref())?;
    let mut o = Output { json: cli.json, out };
    match cli.command {
        Command::Encode(a) => cmd_encode(a, &config, &mut o),
        Command::Decode(a) => cmd_decode(a, &config, &mut o),
        Command::Prune(a) => cmd_prune(a, &mut o),
        Command::Quantize(a) => cmd_quantize(a, &mut o),
        Command::Psnr(a) => cmd_psnr(a, &mut o),
        Command::Nas(a) => cmd_nas(a, &mut o),
        Command::Bench(a) => cmd_bench(a, &config, &mut o),
        Command::Stats(a) => cmd_stats(a, &mut o),
    }
}

fn with_path(path: &Path) -> impl FnOnce(Error) -> Failure + '_ {
    move |e| match e {
        Error::Io(io) => Failure::Run(Error::InvalidInput(format!("{}: {io}", path.display()))),
        Error::Image(img) => Failure::Run(Error::InvalidInput(format!("{}: {img}", path.display()))),
        other => Failure::Run(other),
    }
}

fn load_archive(path: &Path) -> CliResult<DatasetArchive> {
    DatasetArchive::load(path).map_err(with_path(path))
}

fn load_image(path: &Path) -> CliResult<ImageBuffer> {
    ImageBuffer::load(path).map_err(with_path(path))
}

fn parse_size(s: &str) -> CliResult<(usize, usize)> {
    let bad = || usage(format!("size must look like HxW, got '{s}'"));
    let (h, w) = s.split_once(['x', 'X']).ok_or_else(bad)?;
    let h: usize = h.trim().parse().map_err(|_| bad())?;
    let w: usize = w.trim().parse().map_err(|_| bad())?;
    if h == 0 || w == 0 {
        return Err(bad());
    }
    Ok((h, w))
}

fn parse_arch(s: &str, omega: f64) -> CliResult<Architecture> {
    let bad = || usage(format!("--arch must look like LAYERS,HIDDEN, got '{s}'"));
    let (l, h) = s.split_once(',').ok_or_else(bad)?;
    let l: usize = l.trim().parse().map_err(|_| bad())?;
    let h: usize = h.trim().parse().map_err(|_| bad())?;
    Architecture::uniform(l, h, omega).map_err(|e| usage(e.to_string()))
}

fn image_files(dir: &Path) -> CliResult<Vec<PathBuf>> {
    let mut files: Vec<PathBuf> = fs::read_dir(dir)
        .map_err(|e| with_path(dir)(e.into()))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| {
            p.extension()
                .and_then(|e| e.to_str())
                .is_some_and(|e| IMAGE_EXTENSIONS.contains(&e.to_ascii_lowercase().as_str()))
        })
        .collect();
    files.sort();
    if files.is_empty() {
        return Err(Failure::Run(Error::InvalidInput(format!("no images found in {}", dir.display()))));
    }
    Ok(files)
}

fn file_id(p: &Path) -> String {
    p.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default()
}

fn encode_config(a: &EncodeArgs, config: &toml::Table) -> CliResult<EncodeConfig> {
    let mut cfg = match a.preset.as_str() {
        "cifar" => EncodeConfig::cifar(),
        "flowers" => EncodeConfig::flowers(),
        "imagenet" => EncodeConfig::imagenet(),
        other => return Err(usage(format!("unknown preset '{other}'"))),
    };
    let omega = a.omega.unwrap_or(cfg.arch.omega());
    cfg.arch = match &a.arch {
        Some(s) => parse_arch(s, omega)?,
        None => cfg.arch.with_omega(omega).map_err(|e| usage(e.to_string()))?,
    };
    if let Some(s) = &a.schedule {
        cfg.schedule = PruneSchedule::by_name(s).map_err(|e| usage(e.to_string()))?;
    }
    cfg.skip_round2 |= a.skip_round2;
    if let Some(v) = a.seed {
        cfg.seed = v;
    }
    if let Some(v) = a.steps {
        cfg.round1_steps = v;
    }
    if let Some(v) = a.retrain_steps {
        cfg.retrain_steps = v;
    }
    if let Some(v) = a.lr {
        cfg.round1_lr = v;
    }
    if let Some(v) = a.retrain_lr {
        cfg.retrain_lr = v;
    }
    let cfg = overlay(cfg, config, "encode")?;
    cfg.validate().map_err(|e| usage(e.to_string()))?;
    Ok(cfg)
}

fn cmd_encode(a: EncodeArgs, config: &toml::Table, o: &mut Output) -> CliResult {
    let cfg = encode_config(&a, config)?;
    let mode = match a.bits {
        None => QuantMode::None,
        Some(b) => QuantMode::from_bits(b).map_err(|e| usage(e.to_string()))?,
    };
    let files = image_files(&a.input)?;
    let mut images = Vec::with_capacity(files.len());
    for f in &files {
        let img = load_image(f)?;
        images.push((file_id(f), img));
    }
    let originals: HashMap<String, ImageBuffer> = images.iter().cloned().collect();
    let policy = if a.skip_failures {
        FailurePolicy::Skip
    } else {
        FailurePolicy::FailFast
    };
    let (mut archive, report) = encode_dataset(images, &cfg, a.jobs, policy)?;
    if mode != QuantMode::None {
        for r in archive.records_mut() {
            r.model = quantize(&r.model, mode)?;
        }
    }
    let decoded = decode_batch(&archive.models(), OutputSize::Native, a.jobs)?;
    for (img, (id, rep)) in decoded.iter().zip(&report.images) {
        let orig = &originals[id];
        let row = json!({
            "id": id,
            "psnr_db": psnr_value(psnr(img, orig)?.psnr_db),
            "psnr_8bit_db": psnr_value(psnr_8bit(img, orig)?.psnr_db),
            "rounds": rep.psnr_after_round(),
            "prune_ratio": rep.final_prune_ratio,
            "quant": format!("{mode:?}"),
        });
        o.record("image", &row, || {
            format!(
                "{id}: psnr {:.4} dB (8-bit {:.4} dB), pruned {:.1}%",
                psnr(img, orig).map(|p| p.psnr_db).unwrap_or(f64::NAN),
                psnr_8bit(img, orig).map(|p| p.psnr_db).unwrap_or(f64::NAN),
                100.0 * rep.final_prune_ratio
            )
        })?;
    }
    for f in &report.failures {
        o.record("failure", f, || format!("{} failed: {}", f.id, f.error))?;
    }
    let bytes = archive.save(&a.output)?;
    let summary = json!({
        "output": a.output.display().to_string(),
        "records": archive.len(),
        "bytes": bytes,
        "mean_psnr_db": report.mean_psnr,
        "mean_prune_ratio": report.mean_prune_ratio,
        "wall_time_s": report.wall_time,
    });
    o.record("summary", &summary, || {
        format!(
            "wrote {} records ({bytes} bytes) to {}; mean psnr {:.4} dB",
            archive.len(),
            a.output.display(),
            report.mean_psnr
        )
    })
}

fn psnr_value(v: f64) -> serde_json::Value {
    if v.is_infinite() {
        json!("inf")
    } else {
        json!(v)
    }
}

fn cmd_decode(a: DecodeArgs, config: &toml::Table, o: &mut Output) -> CliResult {
    let jobs = config_jobs(config, "decode").unwrap_or(a.jobs);
    let size = match &a.size {
        Some(s) => {
            let (h, w) = parse_size(s)?;
            OutputSize::Fixed { h, w }
        }
        None => OutputSize::Native,
    };
    let archive = load_archive(&a.archive)?;
    let selected: Vec<_> = if a.ids.is_empty() {
        archive.records().iter().collect()
    } else {
        a.ids
            .iter()
            .map(|id| {
                archive
                    .get(id)
                    .ok_or_else(|| Failure::Run(Error::InvalidInput(format!("no record with id '{id}'"))))
            })
            .collect::<CliResult<_>>()?
    };
    let models: Vec<_> = selected.iter().map(|r| r.model.clone()).collect();
    let images = decode_batch(&models, size, jobs)?;
    fs::create_dir_all(&a.output)?;
    for (r, img) in selected.iter().zip(&images) {
        let path = a.output.join(format!("{}.png", r.id));
        img.save(&path)?;
        let row = json!({
            "id": r.id,
            "path": path.display().to_string(),
            "height": img.height(),
            "width": img.width(),
        });
        o.record("decoded", &row, || format!("{} -> {}", r.id, path.display()))?;
    }
    Ok(())
}

fn config_jobs(config: &toml::Table, section: &str) -> Option<usize> {
    config
        .get(section)
        .and_then(|s| s.get("jobs"))
        .and_then(|v| v.as_integer())
        .and_then(|v| usize::try_from(v).ok())
}

fn transform(input: &Path, output: &Path, f: impl Fn(&crate::net::InrModel) -> crate::Result<crate::net::InrModel>) -> CliResult<DatasetArchive> {
    let mut archive = load_archive(input)?;
    for (i, r) in archive.records_mut().iter_mut().enumerate() {
        r.model = f(&r.model).map_err(|e| Error::at(i, e))?;
    }
    archive.save(output)?;
    Ok(archive)
}

fn cmd_prune(a: PruneArgs, o: &mut Output) -> CliResult {
    if !(0.0..1.0).contains(&a.ratio) {
        return Err(usage(format!("--ratio must be in [0, 1), got {}", a.ratio)));
    }
    let archive = transform(&a.archive, &a.output, |m| {
        let mode = m.quant.as_ref().map_or(QuantMode::None, |q| q.mode);
        let pruned = prune_l1(&dequantize(m)?, a.ratio)?;
        match mode {
            QuantMode::None => Ok(pruned),
            mode => quantize(&pruned, mode),
        }
    })?;
    summary(o, "pruned", &archive, &a.output)
}

fn cmd_quantize(a: QuantizeArgs, o: &mut Output) -> CliResult {
    let mode = QuantMode::from_bits(a.bits).map_err(|e| usage(e.to_string()))?;
    if mode == QuantMode::None {
        return Err(usage("--bits must be 8 or 16"));
    }
    let archive = transform(&a.archive, &a.output, |m| quantize(&dequantize(m)?, mode))?;
    summary(o, "quantized", &archive, &a.output)
}

fn summary(o: &mut Output, event: &str, archive: &DatasetArchive, path: &Path) -> CliResult {
    let bytes = fs::metadata(path)?.len();
    let row = json!({ "output": path.display().to_string(), "records": archive.len(), "bytes": bytes });
    o.record(event, &row, || {
        format!("{event} {} records -> {} ({bytes} bytes)", archive.len(), path.display())
    })
}

fn cmd_psnr(a: PsnrArgs, o: &mut Output) -> CliResult {
    let x = load_image(&a.a)?;
    let y = load_image(&a.b)?;
    let r = psnr(&x, &y)?;
    o.record("psnr", &r, || r.to_string())
}

fn cmd_nas(a: NasArgs, o: &mut Output) -> CliResult {
    let shape: Shape = a.shape.parse().map_err(|e: Error| usage(e.to_string()))?;
    if a.min_depth < 2 || a.min_depth > a.max_depth {
        return Err(usage("need 2 <= --min-depth <= --max-depth"));
    }
    let opts = EnumerateOptions {
        depths: a.min_depth..=a.max_depth,
        max_width: a.max_width,
        ..Default::default()
    };
    let archs = enumerate(a.budget, shape, &opts)?;
    for arch in &archs {
        let row = json!({
            "arch": arch.label(),
            "depth": arch.num_layers(),
            "params": arch.param_count(),
            "bytes": arch.dense_bytes(),
        });
        o.record("arch", &row, || {
            format!("{:<40} {:>7} params {:>8} bytes", arch.label(), arch.param_count(), arch.dense_bytes())
        })?;
    }
    let Some(dir) = &a.sweep else {
        return Ok(());
    };
    let images = image_files(dir)?
        .iter()
        .map(|f| load_image(f))
        .collect::<CliResult<Vec<_>>>()?;
    let axes = SweepAxes {
        archs,
        omegas: a.omegas,
        lrs: a.lrs,
        steps: a.steps,
    };
    let table = sweep(&images, &axes, a.seed, a.jobs)?;
    for c in &table.cells {
        o.record("cell", c, || {
            format!(
                "{} omega {} lr {} steps {}: {:.4} dB{}",
                c.arch,
                c.omega,
                c.lr,
                c.steps,
                c.mean_psnr,
                if c.failed { " FAILED" } else { "" }
            )
        })?;
    }
    let best = json!({ "best_omega": table.best_omega });
    o.record("sweep", &best, || format!("best omega: {:?}", table.best_omega))?;
    if let Some(path) = &a.csv {
        table.write_csv(fs::File::create(path)?)?;
    }
    Ok(())
}

fn cmd_bench(a: BenchArgs, config: &toml::Table, o: &mut Output) -> CliResult {
    let size = match &a.size {
        Some(s) => {
            let (h, w) = parse_size(s)?;
            OutputSize::Fixed { h, w }
        }
        None => OutputSize::Native,
    };
    if a.batch == 0 || a.jobs == 0 {
        return Err(usage("--batch and --jobs must be positive"));
    }
    let cfg = BenchConfig {
        batch: a.batch,
        jobs: config_jobs(config, "bench").unwrap_or(a.jobs),
        size,
    };
    let r = bench(&a.archive, &cfg)?;
    o.record("bench", &r, || {
        format!(
            "{} images, batch {}, jobs {}: {:.1} images/s, {:.0} pixels/s\n  load {:.4}s  dequantize {:.4}s  forward {:.4}s  convert {:.4}s\n  digest {:08x}",
            r.images,
            r.batch,
            r.jobs,
            r.images_per_sec,
            r.pixels_per_sec,
            r.stages.load,
            r.stages.dequantize,
            r.stages.forward,
            r.stages.convert,
            r.output_digest
        )
    })
}

fn cmd_stats(a: StatsArgs, o: &mut Output) -> CliResult {
    let archive = load_archive(&a.archive)?;
    let s = stats(&archive, a.jpeg_dir.as_deref())?;
    let row = json!({
        "records": s.records.len(),
        "total_bytes": s.total_bytes,
        "dense_f32_bytes": s.dense_f32_bytes,
        "raw_rgb_bytes": s.raw_rgb_bytes,
        "jpeg_bytes": s.jpeg_bytes,
        "ratio_vs_dense": s.ratio_vs_dense(),
        "ratio_vs_raw": s.ratio_vs_raw(),
        "ratio_vs_jpeg": s.ratio_vs_jpeg(),
        "mean_prune_ratio": s.mean_prune_ratio,
    });
    o.record("stats", &row, || {
        let mut t = format!(
            "{} records, {} bytes\n  vs dense f32: {:.4} ({} bytes)\n  vs raw rgb:   {:.4} ({} bytes)",
            s.records.len(),
            s.total_bytes,
            s.ratio_vs_dense(),
            s.dense_f32_bytes,
            s.ratio_vs_raw(),
            s.raw_rgb_bytes
        );
        if let (Some(r), Some(j)) = (s.ratio_vs_jpeg(), s.jpeg_bytes) {
            t.push_str(&format!("\n  vs jpeg:      {r:.4} ({j} bytes)"));
        }
        t.push_str(&format!("\n  mean prune ratio {:.4}", s.mean_prune_ratio));
        t
    })
}
