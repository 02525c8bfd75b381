#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use rinr::compress::{prune_l1, quantize, QuantMode};
use rinr::net::{loss_and_grad, CoordinateGrid};
use rinr::{init, Architecture, ArchiveRecord, FloatStorage, ImageBuffer, InrModel};

pub const IMAGES: [&str; 5] = ["astronaut", "chelsea", "coffee", "immunohistochemistry", "rocket"];

pub fn data_path(file: &str) -> String {
    format!("{}/data/{file}", env!("CARGO_MANIFEST_DIR"))
}

pub fn load(name: &str, size: usize) -> ImageBuffer {
    ImageBuffer::load(data_path(&format!("{name}_{size}.png"))).expect("test image")
}

/// Smooth synthetic 32x32 test image: three linear ramps.
pub fn smooth_gradient() -> ImageBuffer {
    ImageBuffer::from_fn(32, 32, |x, y| [0.1 + 0.8 * x, 0.2 + 0.6 * y, 0.5 + 0.3 * (x - y)]).unwrap()
}

fn random_dims(rng: &mut ChaCha8Rng, max_hidden: usize, max_width: usize) -> Vec<usize> {
    let hidden = rng.gen_range(0..=max_hidden);
    let mut dims = vec![2];
    dims.extend((0..hidden).map(|_| rng.gen_range(1..=max_width)));
    dims.push(3);
    dims
}

/// Largest relative error `|analytic - numeric| / max(|analytic|, |numeric|)`
/// over `models` random f64 networks, measured per model on the full
/// gradient vector (2-norm) of unmasked parameters.
pub fn gradient_oracle(models: usize, seed: u64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = 0.0f64;
    for _ in 0..models {
        let dims = random_dims(&mut rng, 3, 6);
        let omega = [1.0, 5.0, 30.0][rng.gen_range(0..3)];
        let arch = Architecture::new(dims, omega).unwrap();
        let mut model: InrModel<f64> = init(&arch, rng.gen());
        for l in &mut model.layers {
            for b in &mut l.b {
                *b = rng.gen_range(-0.5..0.5);
            }
        }
        if rng.gen_bool(0.5) && model.weight_count() > 8 {
            if let Ok(p) = prune_l1(&model, 0.2) {
                model = p;
            }
        }
        let (h, w) = (rng.gen_range(1..5), rng.gen_range(1..5));
        let grid = CoordinateGrid::new(h, w);
        let targets: Vec<f64> = (0..grid.len() * 3).map(|_| rng.gen_range(0.0..1.0)).collect();
        let (_, grads) = loss_and_grad(&model, &grid, &targets).unwrap();

        let loss_at = |m: &InrModel<f64>| loss_and_grad(m, &grid, &targets).unwrap().0;
        let step = 1e-6;
        let (mut diff2, mut a2, mut n2) = (0.0, 0.0, 0.0);
        for l in 0..model.layers.len() {
            let nw = model.layers[l].w.len();
            for k in 0..nw + model.layers[l].b.len() {
                if k < nw && !model.mask[l][k] {
                    assert_eq!(grads[l].w[k], 0.0, "masked gradient must be zero");
                    continue;
                }
                let mut plus = model.clone();
                let mut minus = model.clone();
                let (ap, am) = if k < nw {
                    (&mut plus.layers[l].w[k], &mut minus.layers[l].w[k])
                } else {
                    (&mut plus.layers[l].b[k - nw], &mut minus.layers[l].b[k - nw])
                };
                *ap += step;
                *am -= step;
                let numeric = (loss_at(&plus) - loss_at(&minus)) / (2.0 * step);
                let analytic = if k < nw { grads[l].w[k] } else { grads[l].b[k - nw] };
                diff2 += (analytic - numeric).powi(2);
                a2 += analytic * analytic;
                n2 += numeric * numeric;
            }
        }
        let denom = a2.sqrt().max(n2.sqrt());
        if denom > 0.0 {
            worst = worst.max(diff2.sqrt() / denom);
        }
    }
    worst
}

/// Reference for the small-image schedule, written out independently.
pub fn cifar_reference(psnr: f64) -> f64 {
    if psnr < 30.0 {
        0.0
    } else if psnr <= 35.0 {
        0.05 * psnr - 1.5
    } else {
        0.25
    }
}

/// Reference for the large-image schedule.
pub fn large_reference(psnr: f64) -> f64 {
    if psnr < 35.0 {
        0.2
    } else if psnr <= 40.0 {
        0.04 * psnr - 1.2
    } else {
        0.4
    }
}

/// `n` points evenly covering `[lo, hi]`, with the knots inserted exactly.
pub fn schedule_grid(lo: f64, hi: f64, n: usize, knots: &[f64]) -> Vec<f64> {
    let mut pts: Vec<f64> = (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect();
    pts.extend_from_slice(knots);
    pts
}

/// A random model exercising every storage path of the archive format.
pub fn random_record(rng: &mut ChaCha8Rng, index: usize) -> ArchiveRecord {
    let dims = random_dims(rng, 4, 20);
    let omega = rng.gen_range(0.5..100.0);
    let arch = Architecture::new(dims, omega).unwrap();
    let mut model: InrModel = init(&arch, rng.gen());
    for l in &mut model.layers {
        for v in l.w.iter_mut().chain(l.b.iter_mut()) {
            match rng.gen_range(0..20) {
                0 => *v = 0.0,
                1 => *v = -0.0,
                2 => *v = rng.gen_range(-1e-30..1e-30),
                _ => *v = rng.gen_range(-2.0..2.0),
            }
        }
    }
    model = model.with_source(rng.gen_range(1..300), rng.gen_range(1..300));
    let ratio = [0.0, 0.05, 0.25, 0.6][rng.gen_range(0..4)];
    if let Ok(p) = prune_l1(&model, ratio) {
        model = p;
    }
    let mode = [QuantMode::None, QuantMode::Affine8, QuantMode::Affine16][rng.gen_range(0..3)];
    if mode != QuantMode::None {
        model = quantize(&model, mode).unwrap();
    }
    let id = format!("img-{index}-{}", "x".repeat(rng.gen_range(0..12)));
    let storage = if rng.gen_bool(0.2) {
        FloatStorage::F16
    } else {
        FloatStorage::F32
    };
    ArchiveRecord::new(id, model).with_float_storage(storage)
}

/// Record size predicted from the documented layout: header fields, then
/// per layer tag/layout bytes, affine parameters, bitset and kept codes
/// (sparse) or every value (dense), f32 biases, and the trailing checksum.
pub fn closed_form_record_bytes(rec: &ArchiveRecord) -> usize {
    let m = &rec.model;
    let dims = m.arch.dims();
    let float = match rec.float_storage {
        FloatStorage::F32 => 4,
        FloatStorage::F16 => 2,
    };
    let header = 2 + rec.id.len() + 4 + 4 + 8 + 1 + 2 * dims.len() + 1 + 1;
    let mut body = 0;
    for (l, layer) in m.layers.iter().enumerate() {
        let n = layer.w.len();
        let q = m.quant.as_ref().and_then(|q| q.layers[l].as_ref());
        let value_bytes = match q {
            Some(q) if q.bits == 8 => 1,
            Some(_) => 2,
            None => float,
        };
        let kept = m.mask[l].iter().filter(|&&k| k).count();
        let zeros = (0..n)
            .filter(|&k| {
                !m.mask[l][k]
                    || match q {
                        Some(q) => q.codes[k] as i64 == q.zero_point as i64,
                        None => layer.w[k] == 0.0,
                    }
            })
            .count();
        let zp_unusable = q.is_some_and(|q| q.zero_point < 0 || q.zero_point as u32 > q.qmax());
        let sparse = zeros * 8 > n || (zp_unusable && kept < n);
        body += 2;
        if q.is_some() {
            body += 8;
        }
        body += if sparse { n.div_ceil(8) + kept * value_bytes } else { n * value_bytes };
        body += layer.b.len() * float;
    }
    header + body + 4
}
