//! Fit one image with the dense recipe and report PSNR as training goes.
//!
//! cargo run --release --example fit_image -- [image.png] [steps] [lr]

use rinr::encoder::fit_round1;
use rinr::{psnr, EncodeConfig, ImageBuffer};

fn main() -> rinr::Result<()> {
    let mut args = std::env::args().skip(1);
    let path = args
        .next()
        .unwrap_or_else(|| concat!(env!("CARGO_MANIFEST_DIR"), "/data/chelsea_32.png").to_string());
    let steps: usize = args.next().map_or(5000, |s| s.parse().expect("steps"));
    let lr: f64 = args.next().map_or(5e-4, |s| s.parse().expect("lr"));

    let image = ImageBuffer::load(&path)?;
    let cfg = EncodeConfig {
        round1_steps: steps,
        round1_lr: lr,
        loss_sample_every: (steps / 10).max(1),
        ..EncodeConfig::cifar()
    };
    println!(
        "{path}: {}x{}, arch {} ({} params), {steps} steps at lr {lr}",
        image.height(),
        image.width(),
        cfg.arch.label(),
        cfg.arch.param_count()
    );
    let (model, report) = fit_round1(&image, &cfg)?;
    for s in &report.loss_curve {
        println!("  step {:>6}  mse {:.6e}  ~{:.2} dB", s.step, s.loss, -10.0 * s.loss.log10());
    }
    let decoded = rinr::decoder::decode_native(&model)?;
    println!("psnr {} in {:.2}s", psnr(&decoded, &image)?, report.wall_time);
    Ok(())
}
