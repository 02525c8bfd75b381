//! Walk one image through every compression stage and print PSNR and
//! record size after each: dense fit, iterative prune, dynamic prune,
//! affine quantization.
//!
//! cargo run --release --example compress_pipeline -- [image.png] [steps]

use rinr::archive::record_size;
use rinr::compress::{quantize, QuantMode};
use rinr::decoder::decode_native;
use rinr::encoder::{fit_round1, refine};
use rinr::{psnr, ArchiveRecord, EncodeConfig, ImageBuffer, InrModel, PruneSchedule};

fn bytes(model: &InrModel) -> rinr::Result<usize> {
    record_size(&ArchiveRecord::new("x", model.clone()))
}

fn main() -> rinr::Result<()> {
    let mut args = std::env::args().skip(1);
    let path = args
        .next()
        .unwrap_or_else(|| concat!(env!("CARGO_MANIFEST_DIR"), "/data/coffee_32.png").to_string());
    let steps: usize = args.next().map_or(3000, |s| s.parse().expect("steps"));
    let image = ImageBuffer::load(&path)?;
    // Large-image schedule and both pruning rounds, so every stage shows up.
    let cfg = EncodeConfig {
        round1_steps: steps,
        retrain_steps: steps,
        skip_round2: false,
        schedule: PruneSchedule::large(),
        ..EncodeConfig::cifar()
    };
    println!("{path}: arch {}, {steps} steps per round", cfg.arch.label());

    let (dense, report) = fit_round1(&image, &cfg)?;
    let dense_bytes = bytes(&dense)?;
    let (model, report) = refine(dense, &image, &cfg, report)?;
    for r in &report.rounds {
        let masked = r.psnr_after_masking.map_or("-".into(), |p| format!("{p:.2}"));
        println!(
            "{:<10} target {:>5.1}%  pruned {:>5.1}%  masked {masked:>6} dB  retrained {:.2} dB",
            format!("{:?}", r.round),
            100.0 * r.target_ratio,
            100.0 * r.prune_ratio,
            r.psnr_db
        );
    }

    println!("{:<10} {:>6} bytes", "dense", dense_bytes);
    println!("{:<10} {:>6} bytes", "pruned", bytes(&model)?);
    for mode in [QuantMode::Affine16, QuantMode::Affine8] {
        let q = quantize(&model, mode)?;
        let db = psnr(&decode_native(&q)?, &image)?;
        println!("{:<10} {:>6} bytes  {db} dB", format!("{mode:?}"), bytes(&q)?);
    }
    Ok(())
}
