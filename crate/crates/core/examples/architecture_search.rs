//! Enumerate architectures under a byte budget and run a small dense-fit
//! sweep over a few of them and two frequency scales.
//!
//! cargo run --release --example architecture_search -- [budget_bytes] [steps]

use rinr::nas::{enumerate, sweep, EnumerateOptions, Shape, SweepAxes};
use rinr::ImageBuffer;

fn main() -> rinr::Result<()> {
    let mut args = std::env::args().skip(1);
    let budget: usize = args.next().map_or(1332, |s| s.parse().expect("budget"));
    let steps: usize = args.next().map_or(500, |s| s.parse().expect("steps"));

    let opts = EnumerateOptions {
        depths: 2..=6,
        ..EnumerateOptions::default()
    };
    let mut picks = Vec::new();
    for shape in [Shape::Uniform, Shape::Tapered] {
        let archs = enumerate(budget, shape, &opts)?;
        println!("{shape:?} under {budget} bytes:");
        for a in &archs {
            println!("  {:<24} {:>5} params  {:>6} bytes", a.label(), a.param_count(), 4 * a.param_count());
        }
        picks.extend(archs.into_iter().step_by(2).take(2));
    }
    picks.sort_by_key(|a| a.label());
    picks.dedup();

    let data = concat!(env!("CARGO_MANIFEST_DIR"), "/data");
    let images = ["chelsea", "coffee"]
        .iter()
        .map(|n| ImageBuffer::load(format!("{data}/{n}_32.png")))
        .collect::<rinr::Result<Vec<_>>>()?;
    let axes = SweepAxes {
        archs: picks,
        omegas: vec![10.0, 30.0],
        lrs: vec![5e-4],
        steps: vec![steps],
    };
    let table = sweep(&images, &axes, 0, 1)?;
    table.write_csv(std::io::stdout())?;
    println!("best omega: {:?}", table.best_omega);
    Ok(())
}
