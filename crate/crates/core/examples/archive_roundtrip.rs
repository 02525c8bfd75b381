//! Encode a few images into an archive on disk, read single records back
//! through the seekable reader, and flip one byte to see the checksum trip.
//!
//! cargo run --release --example archive_roundtrip -- [steps]

use std::fs;

use rinr::archive::ArchiveReader;
use rinr::encoder::FailurePolicy;
use rinr::{decode, encode_dataset, psnr, DatasetArchive, EncodeConfig, ImageBuffer};

fn main() -> rinr::Result<()> {
    let steps: usize = std::env::args().nth(1).map_or(1000, |s| s.parse().expect("steps"));
    let data = concat!(env!("CARGO_MANIFEST_DIR"), "/data");
    let images = ["astronaut", "chelsea", "rocket"]
        .iter()
        .map(|n| Ok((n.to_string(), ImageBuffer::load(format!("{data}/{n}_32.png"))?)))
        .collect::<rinr::Result<Vec<_>>>()?;
    let cfg = EncodeConfig {
        round1_steps: steps,
        retrain_steps: steps / 2,
        ..EncodeConfig::cifar()
    };
    let (archive, report) = encode_dataset(images.clone(), &cfg, 1, FailurePolicy::FailFast)?;
    println!("encoded {} images, mean {:.2} dB", archive.len(), report.mean_psnr);

    let dir = std::env::temp_dir().join(format!("rinr-example-{}", std::process::id()));
    fs::create_dir_all(&dir)?;
    let path = dir.join("set.rinr");
    archive.save(&path)?;
    println!("{} bytes on disk", fs::metadata(&path)?.len());

    let mut reader = ArchiveReader::open_path(&path)?;
    for (k, entry) in reader.index().to_vec().iter().enumerate() {
        let rec = reader.read_record(k)?;
        let img = decode(&rec.model, 32, 32)?;
        let original = &images.iter().find(|(n, _)| *n == rec.id).expect("known id").1;
        println!(
            "  #{k} {:<10} offset {:>5} len {:>4}  {} dB",
            rec.id,
            entry.offset,
            entry.length,
            psnr(&img, original)?
        );
    }

    let mut bytes = fs::read(&path)?;
    let last = bytes.len() - 10;
    bytes[last] ^= 0x10;
    match DatasetArchive::from_bytes(&bytes) {
        Ok(_) => println!("corruption went unnoticed"),
        Err(e) => println!("flipped one bit: {e}"),
    }
    fs::remove_dir_all(&dir)?;
    Ok(())
}
