use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::analytic::gaussian_pdf;
use crate::error::Result;

/// Version of the JSON layout written by [`write_json`].
pub const SCHEMA_VERSION: u32 = 1;

/// Envelope of every JSON artifact: the producing configuration and model
/// hash travel with the payload.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Artifact<T> {
    pub schema_version: u32,
    pub kind: String,
    pub config: serde_json::Value,
    pub model_hash: String,
    pub payload: T,
}

pub fn write_json<W: Write, T: Serialize>(
    out: W,
    kind: &str,
    config: &serde_json::Value,
    model_hash: &str,
    payload: &T,
) -> Result<()> {
    let doc = Artifact {
        schema_version: SCHEMA_VERSION,
        kind: kind.to_string(),
        config: config.clone(),
        model_hash: model_hash.to_string(),
        payload,
    };
    let mut out = out;
    serde_json::to_writer_pretty(&mut out, &doc)?;
    writeln!(out)?;
    Ok(())
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct HistogramBin {
    pub bin_left: f64,
    pub bin_right: f64,
    pub count: usize,
    pub gaussian_pdf_value: f64,
}

/// Unit-width bins centered on the integers between the extreme windings,
/// with the Gaussian density of mean `mean` and variance `√N I₂` at each
/// bin center.
pub fn histogram(windings: &[i64], mean: f64, n: u64, i2: f64) -> Vec<HistogramBin> {
    let (Some(&lo), Some(&hi)) = (windings.iter().min(), windings.iter().max()) else {
        return Vec::new();
    };
    let mut counts = vec![0usize; (hi - lo + 1) as usize];
    for &w in windings {
        counts[(w - lo) as usize] += 1;
    }
    counts
        .into_iter()
        .enumerate()
        .map(|(i, count)| {
            let center = (lo + i as i64) as f64;
            HistogramBin {
                bin_left: center - 0.5,
                bin_right: center + 0.5,
                count,
                gaussian_pdf_value: gaussian_pdf(center, mean, n, i2),
            }
        })
        .collect()
}

/// CSV with header `bin_left,bin_right,count,gaussian_pdf_value`.
pub fn write_histogram_csv<W: Write>(mut out: W, bins: &[HistogramBin]) -> Result<()> {
    writeln!(out, "bin_left,bin_right,count,gaussian_pdf_value")?;
    for b in bins {
        writeln!(out, "{},{},{},{:.12e}", b.bin_left, b.bin_right, b.count, b.gaussian_pdf_value)?;
    }
    Ok(())
}
