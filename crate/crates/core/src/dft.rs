//! Closed forms and support bounds for the discrete Fourier transform.
//!
//! With `d'` the largest divisor of `d` not exceeding `sqrt(d)` and
//! `d'' = d / d'`, the DFT pair of bases has incompatibility order `d' + d''`.
//! The comb supported on multiples of `d/d1` attains `n_AB = d1 + d/d1`.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::matrix::{dft_matrix, SubmatrixSelector};
use crate::rank::{extract_submatrix, numerical_rank, DEFAULT_RANK_TOL};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DivisorDecomposition {
    pub d: usize,
    /// All positive divisors, ascending.
    pub divisors: Vec<usize>,
    /// Largest divisor `<= sqrt(d)`.
    pub d_prime: usize,
    /// `d / d_prime`.
    pub d_dprime: usize,
}

/// Positive divisors of `d` in ascending order, by trial division.
pub fn divisors(d: usize) -> Vec<usize> {
    let mut small = Vec::new();
    let mut large = Vec::new();
    let mut q = 1;
    while q * q <= d {
        if d.is_multiple_of(q) {
            small.push(q);
            if q * q != d {
                large.push(d / q);
            }
        }
        q += 1;
    }
    small.extend(large.into_iter().rev());
    small
}

pub fn is_prime(d: usize) -> bool {
    d >= 2 && divisors(d).len() == 2
}

pub fn divisor_decomposition(d: usize) -> Result<DivisorDecomposition> {
    if d == 0 {
        return Err(Error::InvalidDimension(d));
    }
    let divisors = divisors(d);
    let d_prime = divisors
        .iter()
        .copied()
        .take_while(|&q| q * q <= d)
        .last()
        .expect("1 divides d");
    Ok(DivisorDecomposition {
        d,
        d_prime,
        d_dprime: d / d_prime,
        divisors,
    })
}

/// Incompatibility order of the `d`-dimensional DFT: `d' + d/d'`.
pub fn dft_chi(d: usize) -> Result<usize> {
    let dec = divisor_decomposition(d)?;
    Ok(dec.d_prime + dec.d_dprime)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ZetaPoint {
    pub x: f64,
    /// Greatest divisor `<= x`.
    pub d1: usize,
    /// Least divisor `>= x`.
    pub d2: usize,
    pub value: f64,
}

impl ZetaPoint {
    /// Coefficient of `x` in the linear piece through this point.
    pub fn slope(&self, d: usize) -> f64 {
        1.0 - d as f64 / (self.d1 as f64 * self.d2 as f64)
    }
}

/// `zeta_d(x) = d/d1 + d/d2 + (1 - d/(d1 d2)) x` with `d1 <= x <= d2` the
/// bracketing divisors of `d`.
pub fn zeta(d: usize, x: f64) -> Result<ZetaPoint> {
    let divs = divisor_decomposition(d)?.divisors;
    zeta_with_divisors(d, &divs, x)
}

/// [`zeta`] against a precomputed ascending divisor list.
pub fn zeta_with_divisors(d: usize, divs: &[usize], x: f64) -> Result<ZetaPoint> {
    if !(x >= 1.0 && x <= d as f64) {
        return Err(Error::Domain(format!("x = {x} outside [1, {d}]")));
    }
    let below = divs.partition_point(|&q| q as f64 <= x);
    let above = divs.partition_point(|&q| (q as f64) < x);
    let d1 = divs[below - 1];
    let d2 = divs[above];
    let df = d as f64;
    let value = df / d1 as f64 + df / d2 as f64 + (1.0 - df / (d1 as f64 * d2 as f64)) * x;
    Ok(ZetaPoint { x, d1, d2, value })
}

/// Lower bound on `|supp f^|` given `|supp f| = supp_f`, rounded up to an integer:
/// `ceil(d / (d1 d2) * (d1 + d2 - supp_f))` for the divisors `d1 <= supp_f <= d2`.
pub fn meshulam_bound(d: usize, supp_f: usize) -> Result<usize> {
    if d == 0 {
        return Err(Error::InvalidDimension(d));
    }
    if supp_f == 0 || supp_f > d {
        return Err(Error::Domain(format!(
            "support size {supp_f} outside [1, {d}]"
        )));
    }
    let divs = divisors(d);
    let d1 = divs[divs.partition_point(|&q| q <= supp_f) - 1];
    let d2 = divs[divs.partition_point(|&q| q < supp_f)];
    let num = d * (d1 + d2 - supp_f);
    let den = d1 * d2;
    Ok(num.div_ceil(den))
}

fn check_divisor(d: usize, d1: usize) -> Result<()> {
    if d == 0 {
        return Err(Error::InvalidDimension(d));
    }
    if d1 == 0 || !d.is_multiple_of(d1) {
        return Err(Error::Domain(format!("{d1} does not divide {d}")));
    }
    Ok(())
}

/// Unit-norm indicator of `{0, d/d1, 2 d/d1, ...}` (`d1` points).
pub fn extremal_comb(d: usize, d1: usize) -> Result<Vec<Complex64>> {
    check_divisor(d, d1)?;
    let step = d / d1;
    let amp = 1.0 / (d1 as f64).sqrt();
    Ok((0..d)
        .map(|j| {
            if j % step == 0 {
                Complex64::new(amp, 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            }
        })
        .collect())
}

/// Rows `{j0 + j' d2}` (`j' < d1`) and columns `{k0 + k' d1}` (`k' < d2`), `d2 = d/d1`.
pub fn comb_selector(d: usize, d1: usize, j0: usize, k0: usize) -> Result<SubmatrixSelector> {
    check_divisor(d, d1)?;
    let d2 = d / d1;
    if j0 >= d2 {
        return Err(Error::Domain(format!("row offset {j0} outside 0..{d2}")));
    }
    if k0 >= d1 {
        return Err(Error::Domain(format!("column offset {k0} outside 0..{d1}")));
    }
    SubmatrixSelector::new(
        (0..d1).map(|jp| j0 + jp * d2).collect(),
        (0..d2).map(|kp| k0 + kp * d1).collect(),
    )
}

/// Whether the comb-indexed submatrix of the DFT has numerical rank 1.
pub fn comb_submatrix_rank1_check(d: usize, d1: usize, j0: usize, k0: usize) -> Result<bool> {
    let sel = comb_selector(d, d1, j0, k0)?;
    let f = dft_matrix(d)?;
    let sub = extract_submatrix(f.matrix(), &sel)?;
    Ok(numerical_rank(&sub, DEFAULT_RANK_TOL)?.rank == 1)
}
