//! Decode one fitted network at several resolutions. The network is a
//! continuous function of the coordinates, so any output size works; the
//! 2x render is compared with the native one after 2x2 averaging.
//!
//! cargo run --release --example decode_any_resolution -- [image.png] [steps] [out_dir]

use rinr::encoder::fit_round1;
use rinr::{decode, psnr, EncodeConfig, ImageBuffer};

fn main() -> rinr::Result<()> {
    let mut args = std::env::args().skip(1);
    let path = args
        .next()
        .unwrap_or_else(|| concat!(env!("CARGO_MANIFEST_DIR"), "/data/chelsea_32.png").to_string());
    let steps: usize = args.next().map_or(3000, |s| s.parse().expect("steps"));
    let out_dir = args.next();

    let image = ImageBuffer::load(&path)?;
    let cfg = EncodeConfig {
        round1_steps: steps,
        ..EncodeConfig::cifar()
    };
    let (model, _) = fit_round1(&image, &cfg)?;
    let (h, w) = (image.height(), image.width());
    let native = decode(&model, h, w)?;
    println!("native {h}x{w}: {} dB against the source", psnr(&native, &image)?);

    for (oh, ow) in [(h / 2, w / 2), (2 * h, 2 * w), (3 * h, w), (4 * h, 4 * w)] {
        let img = decode(&model, oh, ow)?;
        let mean = img.data().iter().map(|&v| v as f64).sum::<f64>() / img.data().len() as f64;
        print!("{oh:>4}x{ow:<4} mean intensity {mean:.4}");
        if (oh, ow) == (2 * h, 2 * w) {
            print!("  2x2 average vs native {} dB", psnr(&img.downsample_2x2()?, &native)?);
        }
        println!();
        if let Some(dir) = &out_dir {
            img.save(format!("{dir}/decoded_{oh}x{ow}.png"))?;
        }
    }
    Ok(())
}
