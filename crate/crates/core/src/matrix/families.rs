use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::{ComplexMatrix, TransitionMatrix};
use crate::error::{Error, Result};

/// Unitarity tolerance used by the analytic constructors.
fn machine_tolerance(d: usize) -> f64 {
    1e-12 * d as f64
}

fn check_dim(d: usize) -> Result<()> {
    if d == 0 {
        Err(Error::InvalidDimension(d))
    } else {
        Ok(())
    }
}

fn check_finite(name: &str, value: f64) -> Result<()> {
    if value.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!(
            "{name} must be finite, got {value}"
        )))
    }
}

/// The `d x d` identity: the two bases coincide.
pub fn identity(d: usize) -> Result<TransitionMatrix> {
    check_dim(d)?;
    let m = ComplexMatrix::from_fn(d, d, |r, c| {
        Complex64::new(if r == c { 1.0 } else { 0.0 }, 0.0)
    })?;
    TransitionMatrix::new(m, 0.0)
}

/// General qubit transition matrix
///
/// ```text
/// [  e^{i phi1} sin(theta)   -e^{-i phi2} cos(theta) ]
/// [  e^{i phi2} cos(theta)    e^{-i phi1} sin(theta) ]
/// ```
pub fn qubit_rotation(theta: f64, phi1: f64, phi2: f64) -> Result<TransitionMatrix> {
    check_finite("theta", theta)?;
    check_finite("phi1", phi1)?;
    check_finite("phi2", phi2)?;
    let (s, c) = theta.sin_cos();
    let entries = vec![
        Complex64::from_polar(s, phi1),
        -Complex64::from_polar(c, -phi2),
        Complex64::from_polar(c, phi2),
        Complex64::from_polar(s, -phi1),
    ];
    let m = ComplexMatrix::from_row_major(2, 2, entries)?;
    TransitionMatrix::new(m, machine_tolerance(2))
}

/// Real orthogonal 3x3 rotation with a structural zero at (2, 1).
pub fn bronzan_rotation(theta1: f64, theta2: f64) -> Result<TransitionMatrix> {
    check_finite("theta1", theta1)?;
    check_finite("theta2", theta2)?;
    let (s1, c1) = theta1.sin_cos();
    let (s2, c2) = theta2.sin_cos();
    let real = [
        c1 * c2,
        s1,
        c1 * s2, //
        -s1 * c2,
        c1,
        -s1 * s2, //
        -s2,
        0.0,
        c2,
    ];
    let m = ComplexMatrix::from_row_major(
        3,
        3,
        real.iter().map(|&x| Complex64::new(x, 0.0)).collect(),
    )?;
    TransitionMatrix::new(m, machine_tolerance(3))
}

/// Discrete Fourier transform `F_jk = e^{2 pi i jk/d} / sqrt(d)`, `j, k` in `0..d`.
///
/// Entries are read from a table of `d`-th roots indexed by `jk mod d`, so the
/// result is exactly symmetric.
pub fn dft_matrix(d: usize) -> Result<TransitionMatrix> {
    check_dim(d)?;
    let amp = 1.0 / (d as f64).sqrt();
    let roots: Vec<Complex64> = (0..d)
        .map(|k| Complex64::from_polar(amp, 2.0 * PI * k as f64 / d as f64))
        .collect();
    let m = ComplexMatrix::from_fn(d, d, |j, k| roots[(j * k) % d])?;
    TransitionMatrix::new(m, machine_tolerance(d))
}

/// Haar-random unitary from the QR decomposition of a complex Ginibre matrix,
/// with the phases of `R`'s diagonal absorbed into `Q`.
pub fn random_unitary(d: usize, seed: u64) -> Result<TransitionMatrix> {
    check_dim(d)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let scale = std::f64::consts::FRAC_1_SQRT_2;
    let ginibre = DMatrix::from_fn(d, d, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        Complex64::new(re * scale, im * scale)
    });
    let qr = ginibre.qr();
    let r = qr.r();
    let mut q = qr.q();
    for k in 0..d {
        let diag = r[(k, k)];
        let norm = diag.norm();
        if norm > 0.0 {
            let phase = diag / norm;
            q.column_mut(k).iter_mut().for_each(|z| *z *= phase);
        }
    }
    TransitionMatrix::new(ComplexMatrix::from_nalgebra(q)?, machine_tolerance(d))
}
