//! Per-layer weight histograms of a fitted network, before and after
//! pruning, printed as text bars with the layer moments.
//!
//! cargo run --release --example weight_distribution -- [image.png] [steps]

use rinr::compress::{prune_l1, weight_histogram, LayerStats};
use rinr::encoder::fit_round1;
use rinr::{EncodeConfig, ImageBuffer, InrModel};

const BINS: usize = 24;

fn show(title: &str, model: &InrModel) -> rinr::Result<()> {
    println!("== {title}");
    for l in 0..model.layers.len() {
        let h = weight_histogram(model, l, BINS)?;
        let s = LayerStats::of(model, l)?;
        println!(
            "layer {l}: [{:+.3}, {:+.3}] mean {:+.4} std {:.4} excess kurtosis {:+.2}",
            h.lo, h.hi, s.mean, s.std, s.excess_kurtosis
        );
        let peak = h.density.iter().cloned().fold(0.0, f64::max);
        for (b, d) in h.density.iter().enumerate() {
            let left = h.lo + b as f64 * h.bin_width();
            let bar = "#".repeat((40.0 * d / peak).round() as usize);
            println!("  {left:+.3} {bar}");
        }
    }
    Ok(())
}

fn main() -> rinr::Result<()> {
    let mut args = std::env::args().skip(1);
    let path = args
        .next()
        .unwrap_or_else(|| concat!(env!("CARGO_MANIFEST_DIR"), "/data/rocket_32.png").to_string());
    let steps: usize = args.next().map_or(3000, |s| s.parse().expect("steps"));
    let image = ImageBuffer::load(&path)?;
    let cfg = EncodeConfig {
        round1_steps: steps,
        ..EncodeConfig::cifar()
    };
    let (model, _) = fit_round1(&image, &cfg)?;
    show("dense", &model)?;
    show("pruned 25%", &prune_l1(&model, 0.25)?)?;
    Ok(())
}
