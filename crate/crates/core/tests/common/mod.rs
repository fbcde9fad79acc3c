//! Independent reference implementations shared by the integration tests.
//! Nothing here calls the eigen-decomposition paths of the library.
#![allow(dead_code)]

use ghz_sim::fock::HilbertShape;
use ghz_sim::hamiltonian::SystemParams;
use ghz_sim::{CMatrix, CVector, C64};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub const OMEGA: f64 = 8.95e6;

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// Resonant parameters with ν = 20Ω and ω₀ = 200ν.
pub fn scaled_params(g: f64, eta: f64) -> SystemParams {
    SystemParams::resonant(OMEGA, g, eta, eta, 20.0 * OMEGA, 4000.0 * OMEGA)
}

pub fn shape(v: usize, c: usize) -> HilbertShape {
    HilbertShape::new(v, c).unwrap()
}

pub fn max_abs(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn max_abs_vec(v: &CVector) -> f64 {
    v.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// `exp(A)` by scaling and squaring around a 30-term Taylor series.
pub fn expm(a: &CMatrix) -> CMatrix {
    let n = a.nrows();
    let norm: f64 = (0..n)
        .map(|i| a.row(i).iter().map(|z| z.norm()).sum::<f64>())
        .fold(0.0, f64::max);
    let squarings = if norm > 0.5 {
        (norm / 0.5).log2().ceil() as u32
    } else {
        0
    };
    let scaled = a / c(2f64.powi(squarings as i32), 0.0);
    let mut term = CMatrix::identity(n, n);
    let mut sum = CMatrix::identity(n, n);
    for k in 1..30 {
        term = &term * &scaled / c(k as f64, 0.0);
        sum += &term;
    }
    for _ in 0..squarings {
        sum = &sum * &sum;
    }
    sum
}

/// `exp(−iHt)` for a Hermitian `H`.
pub fn propagator(h: &CMatrix, t: f64) -> CMatrix {
    expm(&(h * c(0.0, -t)))
}

pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}

pub fn lower(dim: usize) -> CMatrix {
    CMatrix::from_fn(dim, dim, |i, j| {
        if j == i + 1 {
            c((j as f64).sqrt(), 0.0)
        } else {
            c(0.0, 0.0)
        }
    })
}

pub fn eye(dim: usize) -> CMatrix {
    CMatrix::identity(dim, dim)
}

/// Ion ⊗ phonon ⊗ photon product, matching the `(s·vib + m)·cav + n` ordering.
pub fn kron3(ion: &CMatrix, vib: &CMatrix, cav: &CMatrix) -> CMatrix {
    kron(&kron(ion, vib), cav)
}

/// ∑ (−η²)^p m!/(p!(p+k)!(m−p)!) · e^{−η²/2}, summed with exact rational
/// coefficients in a different order from the library.
pub fn ok_reference(k: usize, eta: f64, m: usize) -> f64 {
    let fact = |n: usize| (1..=n).map(|i| i as f64).product::<f64>();
    let x = eta * eta;
    (0..=m)
        .rev()
        .map(|p| (-x).powi(p as i32) * fact(m) / (fact(p) * fact(p + k) * fact(m - p)))
        .sum::<f64>()
        * (-x / 2.0).exp()
}

/// The four-state block as a plain matrix with the given couplings.
pub fn block_matrix(upper: f64, lower: f64, side: f64) -> CMatrix {
    let mut h = CMatrix::zeros(4, 4);
    for (i, j, v) in [(0, 1, upper), (2, 3, lower), (0, 3, side)] {
        h[(i, j)] = c(v, 0.0);
        h[(j, i)] = c(v, 0.0);
    }
    h
}

/// Seeded generator; ChaCha keeps streams stable across platforms.
pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}
