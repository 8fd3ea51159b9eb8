//! Complex Ginibre pairs `(K₁, K₂)` and evaluation of `K(p)`, `det K(p)` and
//! the winding-number density `w(p) = tr K(p)⁻¹ K′(p)`.

use std::io::{Read, Write};

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use sha2::{Digest, Sha256};

use crate::coeff_model::CoefficientField;
use crate::error::{Error, Result};
use crate::linalg::{CMatrix, LogDet, Lu};

/// Condition estimate above which `K(p)` counts as singular.
pub const SINGULAR_CONDITION: f64 = 1e12;
/// Offset used when retrying a density evaluation next to a singular point.
pub const RETRY_OFFSET: f64 = 1e-9;

const DUMP_MAGIC: &[u8; 4] = b"CWRL";
const DUMP_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq)]
pub struct Realization {
    pub k1: CMatrix,
    pub k2: CMatrix,
    pub n: usize,
    pub seed: u64,
}

/// Per-realization seed, independent of evaluation order.
pub fn derive_seed(master_seed: u64, index: u64) -> u64 {
    let mut h = Sha256::new();
    h.update(master_seed.to_le_bytes());
    h.update(index.to_le_bytes());
    let d = h.finalize();
    u64::from_le_bytes(d[..8].try_into().expect("digest has 32 bytes"))
}

fn ginibre(n: usize, rng: &mut ChaCha8Rng) -> CMatrix {
    let scale = std::f64::consts::FRAC_1_SQRT_2;
    let entries: Vec<Complex64> = (0..n * n)
        .map(|_| {
            let re: f64 = StandardNormal.sample(rng);
            let im: f64 = StandardNormal.sample(rng);
            Complex64::new(scale * re, scale * im)
        })
        .collect();
    CMatrix::from_row_slice(n, n, &entries)
}

/// Entries with `E K_jl = 0` and `E |K_jl|² = 1`, drawn row by row, `K₁` first.
pub fn sample(n: usize, seed: u64) -> Realization {
    assert!(n >= 1, "matrix dimension must be positive");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let k1 = ginibre(n, &mut rng);
    let k2 = ginibre(n, &mut rng);
    Realization { k1, k2, n, seed }
}

/// `a(p) K₁ + b(p) K₂` for `order = 0`, its derivative for `order = 1`.
pub fn eval_k(real: &Realization, field: &CoefficientField, p: f64, order: u32) -> CMatrix {
    let [a, b] = field.eval(p, order);
    combine(real, a, b)
}

pub(crate) fn combine(real: &Realization, a: Complex64, b: Complex64) -> CMatrix {
    real.k1.zip_map(&real.k2, |x, y| a * x + b * y)
}

pub fn log_det(real: &Realization, field: &CoefficientField, p: f64) -> LogDet {
    Lu::new(eval_k(real, field, p, 0)).log_det()
}

/// `ln det K(p)` together with `w(p)`, sharing one factorization. The density
/// is `None` when `K(p)` is exactly singular.
pub fn log_det_and_density(real: &Realization, field: &CoefficientField, p: f64) -> (LogDet, Option<Complex64>) {
    let lu = Lu::new(eval_k(real, field, p, 0));
    let ld = lu.log_det();
    if lu.is_singular() {
        return (ld, None);
    }
    (ld, Some(lu.solve(&eval_k(real, field, p, 1)).trace()))
}

fn density_once(real: &Realization, field: &CoefficientField, p: f64) -> Result<Complex64> {
    let lu = Lu::new(eval_k(real, field, p, 0));
    let cond = lu.condition_estimate();
    if !(cond <= SINGULAR_CONDITION) {
        return Err(Error::NearSingular { p, cond });
    }
    let x = lu.solve(&eval_k(real, field, p, 1));
    Ok(x.trace())
}

/// `w(p) = d/dp ln det K(p)`. A near-singular `K(p)` is retried at
/// `p ± 1e-9` before giving up.
pub fn winding_density(real: &Realization, field: &CoefficientField, p: f64) -> Result<Complex64> {
    match density_once(real, field, p) {
        Ok(w) => Ok(w),
        Err(first) => density_once(real, field, p + RETRY_OFFSET)
            .or_else(|_| density_once(real, field, p - RETRY_OFFSET))
            .map_err(|_| first),
    }
}

/// Binary layout, little endian: magic `CWRL`, `u32` version, `u64` n,
/// `u64` seed, then `K₁` and `K₂` row-major as `(re, im)` `f64` pairs.
pub fn write_dump<W: Write>(real: &Realization, mut out: W) -> Result<()> {
    out.write_all(DUMP_MAGIC)?;
    out.write_all(&DUMP_VERSION.to_le_bytes())?;
    out.write_all(&(real.n as u64).to_le_bytes())?;
    out.write_all(&real.seed.to_le_bytes())?;
    for m in [&real.k1, &real.k2] {
        for i in 0..real.n {
            for j in 0..real.n {
                out.write_all(&m[(i, j)].re.to_le_bytes())?;
                out.write_all(&m[(i, j)].im.to_le_bytes())?;
            }
        }
    }
    Ok(())
}

pub fn read_dump<R: Read>(mut input: R) -> Result<Realization> {
    let mut magic = [0u8; 4];
    input.read_exact(&mut magic)?;
    if &magic != DUMP_MAGIC {
        return Err(Error::Io("not a realization dump".into()));
    }
    let mut b4 = [0u8; 4];
    input.read_exact(&mut b4)?;
    if u32::from_le_bytes(b4) != DUMP_VERSION {
        return Err(Error::Io("unsupported dump version".into()));
    }
    let mut b8 = [0u8; 8];
    input.read_exact(&mut b8)?;
    let n = u64::from_le_bytes(b8) as usize;
    input.read_exact(&mut b8)?;
    let seed = u64::from_le_bytes(b8);
    let mut read_matrix = || -> Result<CMatrix> {
        let mut entries = Vec::with_capacity(n * n);
        for _ in 0..n * n {
            input.read_exact(&mut b8)?;
            let re = f64::from_le_bytes(b8);
            input.read_exact(&mut b8)?;
            entries.push(Complex64::new(re, f64::from_le_bytes(b8)));
        }
        Ok(CMatrix::from_row_slice(n, n, &entries))
    };
    let k1 = read_matrix()?;
    let k2 = read_matrix()?;
    Ok(Realization { k1, k2, n, seed })
}
