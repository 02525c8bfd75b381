//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.

mod common;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::*;
use rinr::archive::record_size;
use rinr::compress::{dynamic_ratio, prune_l1, quantize, QuantMode};
use rinr::decoder::{decode, decode_batch, decode_native, OutputSize};
use rinr::encoder::{fit_round1, refine, EncodeReport};
use rinr::nas::{enumerate, sweep, EnumerateOptions, Shape, SweepAxes};
use rinr::{init, psnr, Architecture, ArchiveRecord, DatasetArchive, EncodeConfig, Error, ImageBuffer, InrModel, PruneSchedule};

type Check = Result<String, String>;

fn ensure(ok: bool, detail: String) -> Check {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

struct Fitted {
    image: ImageBuffer,
    model: InrModel,
    report: EncodeReport,
}

fn fit(image: ImageBuffer) -> Fitted {
    let (model, report) = fit_round1(&image, &EncodeConfig::cifar()).expect("dense fit");
    Fitted { image, model, report }
}

fn ac1() -> Check {
    let t = Instant::now();
    let err = gradient_oracle(20, 1);
    let secs = t.elapsed().as_secs_f64();
    ensure(
        err <= 1e-4 && secs < 5.0,
        format!("20 models, max relative error {err:.2e} (limit 1e-4), {secs:.2}s (limit 5s)"),
    )
}

fn ac2() -> Check {
    let mut worst = 0.0f64;
    let cases: [(PruneSchedule, fn(f64) -> f64, [f64; 2]); 2] = [
        (PruneSchedule::cifar(), cifar_reference, [30.0, 35.0]),
        (PruneSchedule::large(), large_reference, [35.0, 40.0]),
    ];
    for (schedule, reference, knots) in &cases {
        let pts = schedule_grid(knots[0] - 10.0, knots[1] + 10.0, 10_000, knots);
        let below = pts.iter().filter(|&&p| p < knots[0]).count();
        let above = pts.iter().filter(|&&p| p > knots[1]).count();
        if below == 0 || above == 0 {
            return Err("grid misses a saturation branch".into());
        }
        for &p in &pts {
            worst = worst.max((dynamic_ratio(schedule, p) - reference(p)).abs());
        }
        for &k in knots {
            let eps = 1e-9;
            let jump = (dynamic_ratio(schedule, k - eps) - dynamic_ratio(schedule, k + eps)).abs();
            worst = worst.max(jump - 0.05 * 2.0 * eps);
        }
    }
    ensure(
        worst <= 1e-12,
        format!("2 x 10,000 points plus knots, max deviation {worst:.1e} (limit 1e-12)"),
    )
}

fn ac3(trained: &[&Fitted]) -> Check {
    let arch = Architecture::cifar();
    let weights = arch.weight_count();
    let expected = (0.2 * weights as f64).round() as usize;
    let mut models: Vec<InrModel> = (0..10).map(|s| init(&arch, s)).collect();
    models.extend(trained.iter().map(|f| f.model.clone()));
    let mut worst_dyn = 0.0f64;
    for m in &models {
        let p = prune_l1(m, 0.2).map_err(|e| e.to_string())?;
        if p.pruned_count() != expected {
            return Err(format!("round-2 prune zeroed {} entries, expected {expected}", p.pruned_count()));
        }
        if p.layers.iter().zip(&m.layers).any(|(a, b)| a.b != b.b) {
            return Err("biases changed by pruning".into());
        }
        for i in 0..=120 {
            let psnr = 28.0 + 0.1 * i as f64;
            for (schedule, start) in [(PruneSchedule::cifar(), m), (PruneSchedule::large(), &p)] {
                let r = schedule.ratio(psnr);
                let d = prune_l1(start, r).map_err(|e| e.to_string())?;
                worst_dyn = worst_dyn.max((d.prune_ratio() - r).abs());
            }
        }
    }
    let limit = 1.0 / arch.param_count() as f64;
    ensure(
        worst_dyn <= limit,
        format!(
            "{} models: 20% prune zeroes {expected} of {weights} weights; dynamic prune max |zeros - r| {worst_dyn:.2e} (limit {limit:.2e})",
            models.len()
        ),
    )
}

fn ac4(trained: &[&Fitted]) -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut models: Vec<InrModel> = trained.iter().map(|f| f.model.clone()).collect();
    for s in 0..200 {
        let arch = Architecture::uniform(rng.gen_range(3..6), rng.gen_range(2..24), 30.0).unwrap();
        let mut m: InrModel = init(&arch, s);
        if s % 3 == 0 {
            m = prune_l1(&m, 0.3).unwrap();
        }
        models.push(m);
    }
    let mut checked = 0usize;
    let mut worst = 0.0f64;
    for m in &models {
        for mode in [QuantMode::Affine8, QuantMode::Affine16] {
            let q = quantize(m, mode).map_err(|e| e.to_string())?;
            let info = q.quant.as_ref().unwrap();
            for (l, ql) in info.layers.iter().enumerate() {
                let Some(ql) = ql else { continue };
                let half = ql.scale as f64 / 2.0;
                for k in 0..m.layers[l].w.len() {
                    if !m.mask[l][k] {
                        if q.layers[l].w[k] != 0.0 {
                            return Err("pruned entry not zero after quantization".into());
                        }
                        continue;
                    }
                    let exact = ql.scale as f64 * (ql.codes[k] as i64 - ql.zero_point as i64) as f64;
                    if q.layers[l].w[k] != exact as f32 {
                        return Err("stored weight is not the f32 rounding of scale * (q - zp)".into());
                    }
                    let err = (exact - m.layers[l].w[k] as f64).abs();
                    worst = worst.max(err / half);
                    checked += 1;
                }
            }
        }
    }
    // constant hidden layers
    let mut constants = 0;
    for c in [0.0f32, 0.37, -1.25, 1e-7, -3.0e4] {
        let mut m: InrModel = init(&Architecture::cifar(), 9);
        m.layers[1].w.iter_mut().for_each(|v| *v = c);
        for mode in [QuantMode::Affine8, QuantMode::Affine16] {
            let q = quantize(&m, mode).map_err(|e| e.to_string())?;
            if q.layers[1].w.iter().any(|v| v.to_bits() != c.to_bits()) {
                return Err(format!("constant {c} did not round-trip exactly"));
            }
            constants += 1;
        }
    }
    ensure(
        worst <= 1.0,
        format!("{checked} kept hidden weights, max |scale * (q - zp) - w| = {worst:.6} x scale/2, stored f32 is its nearest rounding; {constants} constant layers exact"),
    )
}

fn ac5(smooth: &Fitted, natural: &Fitted) -> Check {
    let s = smooth.report.final_psnr();
    let n = natural.report.final_psnr();
    let slowest = smooth.report.wall_time.max(natural.report.wall_time);
    ensure(
        s >= 35.0 && n >= 25.0 && slowest < 180.0,
        format!("smooth gradient {s:.2} dB (>= 35), chelsea {n:.2} dB (>= 25), slowest fit {slowest:.1}s"),
    )
}

fn pipeline_drop(f: &Fitted) -> Result<(f64, f64, f64, f64), Error> {
    let dense = f.report.final_psnr();
    let (pruned, rep) = refine(f.model.clone(), &f.image, &EncodeConfig::cifar(), f.report.clone())?;
    let q8 = psnr(&decode_native(&quantize(&pruned, QuantMode::Affine8)?)?, &f.image)?.psnr_db;
    let q16 = psnr(&decode_native(&quantize(&pruned, QuantMode::Affine16)?)?, &f.image)?.psnr_db;
    let q16_dense = psnr(&decode_native(&quantize(&f.model, QuantMode::Affine16)?)?, &f.image)?.psnr_db;
    Ok((dense - q8, (dense - q16).max(dense - q16_dense), rep.final_prune_ratio, dense))
}

fn ac6(fits: &[(&str, &Fitted)]) -> Check {
    let mut lines = Vec::new();
    let mut ok = true;
    for (name, f) in fits {
        let (d8, d16, ratio, dense) = pipeline_drop(f).map_err(|e| e.to_string())?;
        ok &= d8 <= 3.0 && d16 <= 0.5;
        lines.push(format!(
            "{name}: dense {dense:.2} dB, pruned {:.0}% + affine8 drop {d8:+.3} dB (<= 3), affine16 drop {d16:+.3} dB (<= 0.5)",
            100.0 * ratio
        ));
    }
    ensure(ok, lines.join("; "))
}

/// Equal up to the sign of zero; a kept weight equal to zero may come back pruned.
fn same_model(a: &InrModel, b: &InrModel) -> bool {
    a.arch == b.arch
        && same_quant(a, b)
        && (a.source_h, a.source_w) == (b.source_h, b.source_w)
        && a.layers.iter().zip(&b.layers).enumerate().all(|(l, (x, y))| {
            x.b == y.b
                && x.w.iter().zip(&y.w).enumerate().all(|(k, (u, v))| {
                    u == v && (*u == 0.0 || a.mask[l][k] == b.mask[l][k])
                })
        })
}

/// Codes are compared only where they encode a nonzero weight: a kept code
/// equal to the zero point reads back as pruned.
fn same_quant(a: &InrModel, b: &InrModel) -> bool {
    match (&a.quant, &b.quant) {
        (None, None) => true,
        (Some(qa), Some(qb)) => {
            qa.mode == qb.mode
                && qa.layers.len() == qb.layers.len()
                && qa.layers.iter().zip(&qb.layers).enumerate().all(|(l, (x, y))| match (x, y) {
                    (None, None) => true,
                    (Some(x), Some(y)) => {
                        let live = |m: &[bool], q: &rinr::compress::AffineLayer, k: usize| {
                            m[k] && q.codes[k] as i64 != q.zero_point as i64
                        };
                        x.bits == y.bits
                            && x.scale.to_bits() == y.scale.to_bits()
                            && x.zero_point == y.zero_point
                            && x.codes.len() == y.codes.len()
                            && (0..x.codes.len()).all(|k| {
                                let (la, lb) = (live(&a.mask[l], x, k), live(&b.mask[l], y, k));
                                la == lb && (!la || x.codes[k] == y.codes[k])
                            })
                    }
                    _ => false,
                })
        }
        _ => false,
    }
}

fn ac7() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut big = DatasetArchive::new();
    let mut corrupt_detected = 0;
    let mut decode_checked = 0;
    for i in 0..1000 {
        let rec = random_record(&mut rng, i);
        let mut one = DatasetArchive::new();
        one.push(rec.clone()).map_err(|e| e.to_string())?;
        let bytes = one.to_bytes().map_err(|e| e.to_string())?;
        let back = DatasetArchive::from_bytes(&bytes).map_err(|e| format!("record {i}: {e}"))?;
        if back.to_bytes().map_err(|e| e.to_string())? != bytes {
            return Err(format!("record {i} is not byte-identical after a round trip"));
        }
        if rec.float_storage == rinr::FloatStorage::F32 {
            if !same_model(&back.records()[0].model, &rec.model) {
                return Err(format!("record {i} changed in a round trip"));
            }
            let a = decode(&rec.model, 7, 9).map_err(|e| e.to_string())?;
            let b = decode(&back.records()[0].model, 7, 9).map_err(|e| e.to_string())?;
            if a != b {
                return Err(format!("record {i} decodes differently after the archive"));
            }
            decode_checked += 1;
        }
        if i < 200 {
            let mut bad = bytes.clone();
            let pos = rng.gen_range(22..bad.len());
            bad[pos] ^= 1 << rng.gen_range(0..8);
            match DatasetArchive::from_bytes(&bad) {
                Err(Error::Integrity { .. }) => corrupt_detected += 1,
                other => return Err(format!("corruption at byte {pos} not detected: {other:?}")),
            }
        }
        big.push(rec).map_err(|e| e.to_string())?;
    }
    let bytes = big.to_bytes().map_err(|e| e.to_string())?;
    let again = DatasetArchive::from_bytes(&bytes).and_then(|a| a.to_bytes()).map_err(|e| e.to_string())?;
    ensure(
        again == bytes,
        format!(
            "1000 random records byte-identical (single and {}-byte combined archive), {decode_checked} f32 decodes bit-exact, {corrupt_detected}/200 corruptions detected",
            bytes.len()
        ),
    )
}

fn ac8(smooth: &Fitted, natural: &Fitted) -> Check {
    let models = vec![smooth.model.clone(), natural.model.clone()];
    for size in [OutputSize::Native, OutputSize::Fixed { h: 64, w: 64 }, OutputSize::Fixed { h: 37, w: 53 }] {
        let serial = decode_batch(&models, size, 1).map_err(|e| e.to_string())?;
        for jobs in [2, 4, 8] {
            if decode_batch(&models, size, jobs).map_err(|e| e.to_string())? != serial {
                return Err(format!("{jobs}-thread decode differs from serial at {size:?}"));
            }
        }
    }
    let big = decode(&smooth.model, 64, 64).map_err(|e| e.to_string())?;
    let valid = big.data().iter().all(|v| (0.0..=1.0).contains(v));
    let native = decode_native(&smooth.model).map_err(|e| e.to_string())?;
    let down = big.downsample_2x2().map_err(|e| e.to_string())?;
    let agree = psnr(&down, &native).map_err(|e| e.to_string())?.psnr_db;
    ensure(
        valid && agree >= 25.0,
        format!("serial == 2/4/8 threads at 3 sizes; 64x64 decode clamped: {valid}, 2x2 average vs native {agree:.2} dB (>= 25)"),
    )
}

fn ac9(natural: &Fitted) -> Check {
    let mut models = vec![natural.model.clone()];
    models.extend((0..20).map(|s| init::<f32>(&Architecture::cifar(), s).with_source(32, 32)));
    let dense = Architecture::cifar().dense_bytes();
    let mut worst_ratio = 0.0f64;
    for m in &models {
        let q = quantize(&prune_l1(m, 0.25).map_err(|e| e.to_string())?, QuantMode::Affine8).map_err(|e| e.to_string())?;
        let rec = ArchiveRecord::new("img", q);
        let actual = record_size(&rec).map_err(|e| e.to_string())?;
        let predicted = closed_form_record_bytes(&rec);
        if actual != predicted {
            return Err(format!("record is {actual} bytes, closed form says {predicted}"));
        }
        worst_ratio = worst_ratio.max(actual as f64 / dense as f64);
    }
    ensure(
        worst_ratio < 0.5,
        format!(
            "{} records match the closed form exactly; worst record / dense f32 = {worst_ratio:.4} (< 0.5, dense {dense} bytes)",
            models.len()
        ),
    )
}

fn ac10() -> Check {
    let mut emitted = 0;
    for budget in [13_500, 29_000] {
        for shape in [Shape::Uniform, Shape::Tapered] {
            for max_width in [8, 64, 512, 4096] {
                for taper_start in [1, 4, 8, 16] {
                    let opts = EnumerateOptions {
                        depths: 2..=16,
                        max_width,
                        taper_start,
                        ..Default::default()
                    };
                    for a in enumerate(budget, shape, &opts).map_err(|e| e.to_string())? {
                        if a.param_count() * 4 > budget {
                            return Err(format!("{} exceeds {budget} bytes", a.label()));
                        }
                        emitted += 1;
                    }
                }
            }
        }
    }

    let chelsea = load("chelsea", 32);
    let omega_axes = SweepAxes {
        archs: vec![Architecture::cifar()],
        omegas: vec![10.0, 30.0, 90.0],
        lrs: vec![5e-4],
        steps: vec![2000],
    };
    let omega = sweep(std::slice::from_ref(&chelsea), &omega_axes, 0, 0).map_err(|e| e.to_string())?;
    let omega_ok = omega.cells.len() == 3 && omega.best_omega.is_some();

    let images: Vec<ImageBuffer> = IMAGES.iter().map(|n| load(n, 32)).collect();
    let lrs = vec![5e-4, 1e-3, 1e-2, 1e-1];
    let lr_axes = SweepAxes {
        archs: vec![Architecture::cifar()],
        omegas: vec![30.0],
        lrs: lrs.clone(),
        steps: vec![2000],
    };
    let lr = sweep(&images, &lr_axes, 0, 0).map_err(|e| e.to_string())?;
    let flagged_high = lr.cells.iter().filter(|c| c.failed && c.lr >= 1e-3).count();
    let flagged_low = lr.cells.iter().filter(|c| c.failed && c.lr < 1e-3).count();
    let onset = lr.cells.iter().filter(|c| c.failed).map(|c| c.lr).fold(f64::INFINITY, f64::min);
    let summary: Vec<String> = lr
        .cells
        .iter()
        .map(|c| format!("{:e}: {:.1} dB (min {:.1}){}", c.lr, c.mean_psnr, c.min_psnr, if c.failed { " FAILED" } else { "" }))
        .collect();
    ensure(
        omega_ok && flagged_high > 0 && flagged_low == 0,
        format!(
            "{emitted} architectures within budget; omega sweep best {:?} of [10, 30, 90]; lr sweep [{}], first failing lr {onset:e}",
            omega.best_omega,
            summary.join(", ")
        ),
    )
}

fn main() {
    let start = Instant::now();
    let mut results: Vec<(usize, &str, Check, f64)> = Vec::new();
    let mut run = |id: usize, name: &'static str, f: &mut dyn FnMut() -> Check| {
        let t = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(|| f())).unwrap_or_else(|p| {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        let secs = t.elapsed().as_secs_f64();
        let (tag, detail) = match &outcome {
            Ok(d) => ("PASS", d),
            Err(d) => ("FAIL", d),
        };
        println!("[{tag}] AC{id:<2} {name}: {detail} ({secs:.1}s)");
        results.push((id, name, outcome, secs));
    };

    run(1, "gradient oracle", &mut ac1);
    run(2, "schedule exactness", &mut ac2);

    let smooth = fit(smooth_gradient());
    let natural = fit(load("chelsea", 32));

    run(3, "prune exactness", &mut || ac3(&[&smooth, &natural]));
    run(4, "quantization bound", &mut || ac4(&[&smooth, &natural]));
    run(5, "encode quality floor", &mut || ac5(&smooth, &natural));
    run(6, "compression pipeline drop", &mut || ac6(&[("smooth", &smooth), ("chelsea", &natural)]));
    run(7, "archive integrity", &mut ac7);
    run(8, "decoder determinism and resolution", &mut || ac8(&smooth, &natural));
    run(9, "size accounting", &mut || ac9(&natural));
    run(10, "nas budget soundness", &mut ac10);

    let failed = results.iter().filter(|r| r.2.is_err()).count();
    println!(
        "acceptance: {} passed, {failed} failed in {:.1}s",
        results.len() - failed,
        start.elapsed().as_secs_f64()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
