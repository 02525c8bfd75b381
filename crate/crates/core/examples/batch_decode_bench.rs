//! Decode throughput for a synthetic archive of random networks, comparing
//! one worker with several. Outputs are checked to be identical.
//!
//! cargo run --release --example batch_decode_bench -- [records] [jobs] [size]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use rinr::bench::{bench_archive, BenchConfig};
use rinr::compress::{prune_l1, quantize, QuantMode};
use rinr::{init, Architecture, ArchiveRecord, DatasetArchive, OutputSize};

fn main() -> rinr::Result<()> {
    let mut args = std::env::args().skip(1);
    let records: usize = args.next().map_or(64, |s| s.parse().expect("records"));
    let jobs: usize = args.next().map_or(4, |s| s.parse().expect("jobs"));
    let size: usize = args.next().map_or(128, |s| s.parse().expect("size"));

    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let arch = Architecture::cifar();
    let mut archive = DatasetArchive::new();
    for i in 0..records {
        let model = init(&arch, rng.gen()).with_source(32, 32);
        let model = quantize(&prune_l1(&model, 0.25)?, QuantMode::Affine8)?;
        archive.push(ArchiveRecord::new(format!("r{i}"), model))?;
    }

    let cpus = std::thread::available_parallelism().map_or(1, |n| n.get());
    println!("{records} records of {} at {size}x{size}, {cpus} cpu(s)", arch.label());
    let mut baseline = None;
    for jobs in [1, jobs] {
        let cfg = BenchConfig {
            batch: records,
            jobs,
            size: OutputSize::Fixed { h: size, w: size },
        };
        let r = bench_archive(&archive, &cfg)?;
        let base = *baseline.get_or_insert((r.images_per_sec, r.output_digest));
        println!(
            "jobs {jobs:>2}: {:>8.1} images/s  {:>6.2} Mpx/s  speedup {:.2}x  digest {:08x}{}",
            r.images_per_sec,
            r.pixels_per_sec / 1e6,
            r.images_per_sec / base.0,
            r.output_digest,
            if r.output_digest == base.1 { "" } else { "  MISMATCH" }
        );
    }
    Ok(())
}
