//! Reconstruction quality.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::image::ImageBuffer;

/// Mean squared error and PSNR with peak 1.0. An exact match reports
/// `psnr_db = +inf`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PsnrReport {
    pub mse: f64,
    #[serde(with = "psnr_serde")]
    pub psnr_db: f64,
}

impl PsnrReport {
    pub fn from_mse(mse: f64) -> Self {
        let psnr_db = if mse == 0.0 {
            f64::INFINITY
        } else {
            10.0 * (1.0 / mse).log10()
        };
        Self { mse, psnr_db }
    }

    pub fn is_exact(&self) -> bool {
        self.psnr_db.is_infinite()
    }
}

impl std::fmt::Display for PsnrReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.is_exact() {
            write!(f, "inf")
        } else {
            write!(f, "{:.4}", self.psnr_db)
        }
    }
}

/// PSNR on normalized values, before any 8-bit conversion.
pub fn psnr(a: &ImageBuffer, b: &ImageBuffer) -> Result<PsnrReport> {
    Ok(PsnrReport::from_mse(mse(a, b)?))
}

/// PSNR after rounding both images to 8 bits, i.e. what files on disk give.
pub fn psnr_8bit(a: &ImageBuffer, b: &ImageBuffer) -> Result<PsnrReport> {
    psnr(&a.quantized_8bit(), &b.quantized_8bit())
}

pub fn mse(a: &ImageBuffer, b: &ImageBuffer) -> Result<f64> {
    if a.height() != b.height() || a.width() != b.width() {
        return Err(Error::invalid(format!(
            "image sizes differ: {}x{} vs {}x{}",
            a.height(),
            a.width(),
            b.height(),
            b.width()
        )));
    }
    let sum: f64 = a
        .data()
        .iter()
        .zip(b.data())
        .map(|(&x, &y)| {
            let d = x as f64 - y as f64;
            d * d
        })
        .sum();
    Ok(sum / a.data().len() as f64)
}

// JSON has no infinity; encode it as the string "inf".
mod psnr_serde {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
        if v.is_infinite() {
            s.serialize_str("inf")
        } else {
            s.serialize_f64(*v)
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Num {
            F(f64),
            S(String),
        }
        match Num::deserialize(d)? {
            Num::F(v) => Ok(v),
            Num::S(s) if s == "inf" => Ok(f64::INFINITY),
            Num::S(s) => Err(serde::de::Error::custom(format!("bad psnr value {s}"))),
        }
    }
}
