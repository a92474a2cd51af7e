//! Numerical rank of complex submatrices and kernel witnesses.
//!
//! Rank is the number of singular values above `tol * scale * max(rows, cols)`.
//! [`numerical_rank`] takes `scale` to be the largest singular value of the
//! queried matrix. Searches over the submatrices of a transition matrix pass the
//! norm of the whole matrix instead, so that an entry like `cos(pi/2) ~ 6e-17`
//! counts as zero inside a 1x1 submatrix.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::matrix::{ComplexMatrix, SubmatrixSelector};

pub const DEFAULT_RANK_TOL: f64 = 1e-10;
/// Modulus a unit-normalized coefficient must exceed to count as nonzero.
pub const NONZERO_THRESHOLD: f64 = 1e-8;
pub const WITNESS_TOLERANCE: f64 = 1e-9;
/// Decisions whose `gap_ratio` exceeds this are reported as fragile.
pub const FRAGILE_GAP: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RankConfig {
    pub tol: f64,
    pub nonzero_threshold: f64,
    pub witness_tolerance: f64,
}

impl Default for RankConfig {
    fn default() -> Self {
        Self {
            tol: DEFAULT_RANK_TOL,
            nonzero_threshold: NONZERO_THRESHOLD,
            witness_tolerance: WITNESS_TOLERANCE,
        }
    }
}

impl RankConfig {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("rank tolerance", self.tol),
            ("nonzero threshold", self.nonzero_threshold),
            ("witness tolerance", self.witness_tolerance),
        ] {
            if !(v.is_finite() && v >= 0.0) {
                return Err(Error::InvalidArgument(format!(
                    "{name} must be finite and non-negative, got {v}"
                )));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RankResult {
    pub rank: usize,
    pub smallest_kept_sv: f64,
    pub largest_dropped_sv: f64,
    /// `largest_dropped / smallest_kept`; zero when nothing was dropped or nothing kept.
    pub gap_ratio: f64,
}

impl RankResult {
    pub fn is_fragile(&self) -> bool {
        self.gap_ratio > FRAGILE_GAP
    }

    fn from_singular_values(sv: &[f64], threshold: f64) -> Self {
        let rank = sv.iter().filter(|&&s| s > threshold).count();
        let smallest_kept_sv = sv
            .iter()
            .copied()
            .filter(|&s| s > threshold)
            .fold(f64::INFINITY, f64::min);
        let largest_dropped_sv = sv
            .iter()
            .copied()
            .filter(|&s| s <= threshold)
            .fold(0.0, f64::max);
        let dropped_any = rank < sv.len();
        let (smallest_kept_sv, gap_ratio) = if rank == 0 {
            (0.0, 0.0)
        } else if dropped_any && smallest_kept_sv > 0.0 {
            (smallest_kept_sv, largest_dropped_sv / smallest_kept_sv)
        } else {
            (smallest_kept_sv, 0.0)
        };
        Self {
            rank,
            smallest_kept_sv,
            largest_dropped_sv,
            gap_ratio,
        }
    }
}

/// Which null space a [`KernelWitness`] lives in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    /// `z^T M = 0`: the rows of `M` are dependent.
    Left,
    /// `M z = 0`: the columns of `M` are dependent.
    Right,
}

impl Side {
    pub fn name(self) -> &'static str {
        match self {
            Side::Left => "left",
            Side::Right => "right",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KernelWitness {
    pub side: Side,
    pub coefficients: Vec<Complex64>,
    pub selector: SubmatrixSelector,
    pub all_nonzero: bool,
    /// `|z^T M|` (left) or `|M z|` (right).
    pub residual: f64,
}

pub fn extract_submatrix(m: &ComplexMatrix, sel: &SubmatrixSelector) -> Result<ComplexMatrix> {
    sel.check_bounds(m.rows(), m.cols())?;
    ComplexMatrix::from_fn(sel.rows().len(), sel.cols().len(), |r, c| {
        m.get(sel.rows()[r], sel.cols()[c])
    })
}

/// Singular values in descending order.
pub fn singular_values(m: &ComplexMatrix) -> Vec<f64> {
    let mut sv: Vec<f64> = m
        .as_nalgebra()
        .clone()
        .singular_values()
        .iter()
        .copied()
        .collect();
    sv.sort_by(|a, b| b.total_cmp(a));
    sv
}

pub fn numerical_rank(m: &ComplexMatrix, tol: f64) -> Result<RankResult> {
    check_tol(tol)?;
    let sv = singular_values(m);
    let scale = sv.first().copied().unwrap_or(0.0);
    Ok(rank_with_scale(&sv, tol, scale, m.rows().max(m.cols())))
}

/// Like [`numerical_rank`] but with an explicit reference magnitude in place
/// of the matrix's own largest singular value.
pub fn numerical_rank_scaled(m: &ComplexMatrix, tol: f64, scale: f64) -> Result<RankResult> {
    check_tol(tol)?;
    if !(scale.is_finite() && scale >= 0.0) {
        return Err(Error::InvalidArgument(format!(
            "invalid rank scale {scale}"
        )));
    }
    let sv = singular_values(m);
    Ok(rank_with_scale(&sv, tol, scale, m.rows().max(m.cols())))
}

fn rank_with_scale(sv: &[f64], tol: f64, scale: f64, dim: usize) -> RankResult {
    RankResult::from_singular_values(sv, tol * scale * dim as f64)
}

fn check_tol(tol: f64) -> Result<()> {
    if tol.is_finite() && tol >= 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!(
            "rank tolerance must be finite and non-negative, got {tol}"
        )))
    }
}

pub fn kernel_witness(
    m: &ComplexMatrix,
    side: Side,
    sel: &SubmatrixSelector,
) -> Result<KernelWitness> {
    kernel_witness_with(m, side, sel, &RankConfig::default())
}

/// Unit kernel vector of the selected submatrix on the requested side.
///
/// The rank threshold is scaled by the norm of the full matrix `m`. Among
/// several kernel directions the singular vector of the smallest singular
/// value is returned, rotated so its largest-modulus coefficient is real
/// positive.
pub fn kernel_witness_with(
    m: &ComplexMatrix,
    side: Side,
    sel: &SubmatrixSelector,
    config: &RankConfig,
) -> Result<KernelWitness> {
    config.validate()?;
    let sub = extract_submatrix(m, sel)?;
    let scale = m.spectral_norm();
    // Left kernels of M are right kernels of M^T (plain transpose, no conjugation).
    let a = match side {
        Side::Right => sub.as_nalgebra().clone(),
        Side::Left => sub.as_nalgebra().transpose(),
    };
    let (p, q) = (a.nrows(), a.ncols());
    let threshold = config.tol * scale * p.max(q) as f64;

    // Pad with zero rows so the decomposition returns a full q x q right basis.
    let n = p.max(q);
    let padded = DMatrix::from_fn(n, q, |r, c| {
        if r < p {
            a[(r, c)]
        } else {
            Complex64::new(0.0, 0.0)
        }
    });
    let svd = padded.svd(false, true);
    let v_t = svd
        .v_t
        .ok_or_else(|| Error::Domain("singular value decomposition failed".into()))?;
    let sv: Vec<f64> = svd.singular_values.iter().copied().collect();
    let rank = sv.iter().filter(|&&s| s > threshold).count();
    if rank == q {
        return Err(Error::NoKernel(side.name()));
    }
    // Smallest singular value; ties go to the last index in the decomposition's order.
    let pick = (0..sv.len())
        .rev()
        .min_by(|&i, &j| sv[i].total_cmp(&sv[j]))
        .expect("nonempty spectrum");
    let mut z: Vec<Complex64> = (0..q).map(|c| v_t[(pick, c)].conj()).collect();
    normalize_phase(&mut z);

    let residual = match side {
        Side::Right => norm(&sub.apply(&z)?),
        Side::Left => norm(&sub.transpose().apply(&z)?),
    };
    let all_nonzero = z.iter().all(|c| c.norm() > config.nonzero_threshold);
    Ok(KernelWitness {
        side,
        coefficients: z,
        selector: sel.clone(),
        all_nonzero,
        residual,
    })
}

fn norm(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Scales to unit norm and rotates the first largest-modulus entry onto the positive reals.
pub(crate) fn normalize_phase(z: &mut [Complex64]) {
    let n = norm(z);
    if n == 0.0 {
        return;
    }
    // First index within rounding of the largest modulus, so near-ties do not
    // depend on noise in the last bits.
    let max = z.iter().map(|c| c.norm()).fold(0.0, f64::max);
    let best = z
        .iter()
        .position(|c| c.norm() >= max * (1.0 - 1e-9))
        .unwrap_or(0);
    let pivot = z[best];
    let rot = pivot.conj() / (pivot.norm() * n);
    z.iter_mut().for_each(|c| *c *= rot);
    z[best] = Complex64::new(z[best].norm(), 0.0);
}

/// Outcome of probing one submatrix during an exhaustive search.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Probe {
    /// `min(rows, cols) - rank`.
    pub deficiency: usize,
    pub gap_ratio: f64,
}

/// Reusable scratch space for repeated rank decisions on submatrices of one
/// matrix.
///
/// Before falling back to a full singular value decomposition, the probe tries
/// to certify full rank cheaply: with `G = A A^dagger = L L^dagger` (short side
/// first), `sigma_min(A)^2 >= 1 / |L^{-1}|_F^2`. Certification demands a bound
/// several orders of magnitude above the threshold plus the Cholesky rounding
/// error, so it only ever skips decompositions whose answer is full rank.
pub(crate) struct SubmatrixProbe<'a> {
    m: &'a ComplexMatrix,
    tol: f64,
    scale: f64,
    buf: Vec<Complex64>,
    gram: Vec<Complex64>,
    inv: Vec<Complex64>,
}

impl<'a> SubmatrixProbe<'a> {
    pub fn new(m: &'a ComplexMatrix, tol: f64, scale: f64) -> Self {
        let n = m.rows().max(m.cols());
        Self {
            m,
            tol,
            scale,
            buf: Vec::with_capacity(n * n),
            gram: vec![Complex64::new(0.0, 0.0); n * n],
            inv: vec![Complex64::new(0.0, 0.0); n * n],
        }
    }

    pub fn probe(&mut self, rows: &[usize], cols: &[usize]) -> Probe {
        let (r, c) = (rows.len(), cols.len());
        self.buf.clear();
        for &i in rows {
            for &j in cols {
                self.buf.push(self.m.get(i, j));
            }
        }
        let threshold = self.tol * self.scale * r.max(c) as f64;
        if self.certify_full_rank(r, c, threshold) {
            return Probe {
                deficiency: 0,
                gap_ratio: 0.0,
            };
        }
        let a = DMatrix::from_row_slice(r, c, &self.buf);
        let sv: Vec<f64> = a.singular_values().iter().copied().collect();
        let res = RankResult::from_singular_values(&sv, threshold);
        Probe {
            deficiency: r.min(c) - res.rank,
            gap_ratio: res.gap_ratio,
        }
    }

    fn certify_full_rank(&mut self, r: usize, c: usize, threshold: f64) -> bool {
        let p = r.min(c);
        let q = r.max(c);
        let at = |k: usize, l: usize, buf: &[Complex64]| -> Complex64 {
            // k indexes the short side, l the long side.
            if r <= c {
                buf[k * c + l]
            } else {
                buf[l * c + k]
            }
        };
        // Lower triangle of the Gram matrix on the short side.
        let mut trace = 0.0;
        for i in 0..p {
            for j in 0..=i {
                let mut s = Complex64::new(0.0, 0.0);
                for l in 0..q {
                    s += at(i, l, &self.buf) * at(j, l, &self.buf).conj();
                }
                self.gram[i * p + j] = s;
            }
            trace += self.gram[i * p + i].re;
        }
        if trace == 0.0 {
            return false;
        }
        // In-place Cholesky, lower triangle.
        for j in 0..p {
            let mut diag = self.gram[j * p + j].re;
            for k in 0..j {
                diag -= self.gram[j * p + k].norm_sqr();
            }
            if diag.is_nan() || diag <= 0.0 {
                return false;
            }
            let ljj = diag.sqrt();
            self.gram[j * p + j] = Complex64::new(ljj, 0.0);
            for i in (j + 1)..p {
                let mut s = self.gram[i * p + j];
                for k in 0..j {
                    s -= self.gram[i * p + k] * self.gram[j * p + k].conj();
                }
                self.gram[i * p + j] = s / ljj;
            }
        }
        // Frobenius norm of L^{-1} by forward substitution, column by column.
        let mut inv_frob_sq = 0.0;
        for col in 0..p {
            for i in 0..p {
                let mut s = if i == col {
                    Complex64::new(1.0, 0.0)
                } else {
                    Complex64::new(0.0, 0.0)
                };
                for k in col..i {
                    s -= self.gram[i * p + k] * self.inv[k];
                }
                let x = if i < col {
                    Complex64::new(0.0, 0.0)
                } else {
                    s / self.gram[i * p + i].re
                };
                self.inv[i] = x;
                inv_frob_sq += x.norm_sqr();
            }
        }
        let lower_bound_sq = 1.0 / inv_frob_sq;
        let rounding = 64.0 * (p * q) as f64 * f64::EPSILON * trace;
        let margin = 1e4 * threshold;
        lower_bound_sq * (1.0 - 1e-6) - rounding > margin * margin
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::{bronzan_rotation, dft_matrix, identity, random_unitary};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn sel(rows: &[usize], cols: &[usize]) -> SubmatrixSelector {
        SubmatrixSelector::new(rows.to_vec(), cols.to_vec()).unwrap()
    }

    #[test]
    fn extract_identity_pattern() {
        let i6 = identity(6).unwrap();
        let sub = extract_submatrix(i6.matrix(), &sel(&[0, 2], &[1, 2, 3])).unwrap();
        assert_eq!(
            sub.to_row_major(),
            vec![
                c(0., 0.),
                c(0., 0.),
                c(0., 0.),
                c(0., 0.),
                c(1., 0.),
                c(0., 0.)
            ]
        );
    }

    #[test]
    fn extract_full_and_singleton() {
        let u = random_unitary(4, 3).unwrap();
        let full = extract_submatrix(u.matrix(), &SubmatrixSelector::full(4, 4).unwrap()).unwrap();
        assert_eq!(&full, u.matrix());
        let one = extract_submatrix(u.matrix(), &sel(&[2], &[1])).unwrap();
        assert_eq!(one.get(0, 0), u.get(2, 1));
        assert!(matches!(
            extract_submatrix(u.matrix(), &sel(&[4], &[0])),
            Err(Error::OutOfBounds { index: 4, len: 4 })
        ));
    }

    #[test]
    fn rank_basic_cases() {
        let i3 = identity(3).unwrap();
        assert_eq!(
            numerical_rank(i3.matrix(), DEFAULT_RANK_TOL).unwrap().rank,
            3
        );

        let z = ComplexMatrix::zeros(2, 4).unwrap();
        let r = numerical_rank(&z, DEFAULT_RANK_TOL).unwrap();
        assert_eq!(r.rank, 0);
        assert_eq!(r.gap_ratio, 0.0);

        let b = bronzan_rotation(0.7, 0.4).unwrap();
        let entry = extract_submatrix(b.matrix(), &sel(&[2], &[1])).unwrap();
        assert_eq!(numerical_rank(&entry, DEFAULT_RANK_TOL).unwrap().rank, 0);
        assert!(numerical_rank(&z, -1.0).is_err());
    }

    #[test]
    fn rank_reports_gap() {
        let m = ComplexMatrix::from_row_major(
            2,
            2,
            vec![c(1., 0.), c(1., 0.), c(1., 0.), c(1. + 1e-14, 0.)],
        )
        .unwrap();
        let r = numerical_rank(&m, DEFAULT_RANK_TOL).unwrap();
        assert_eq!(r.rank, 1);
        assert!(r.smallest_kept_sv >= r.largest_dropped_sv);
        assert!(r.gap_ratio > 0.0 && r.gap_ratio < 1e-12);
        assert!(!r.is_fragile());
    }

    #[test]
    fn scaled_rank_treats_rounding_noise_as_zero() {
        let tiny = ComplexMatrix::from_row_major(1, 1, vec![c(6.1e-17, 0.0)]).unwrap();
        assert_eq!(numerical_rank(&tiny, DEFAULT_RANK_TOL).unwrap().rank, 1);
        assert_eq!(
            numerical_rank_scaled(&tiny, DEFAULT_RANK_TOL, 1.0)
                .unwrap()
                .rank,
            0
        );
    }

    #[test]
    fn zero_block_witness() {
        let i6 = identity(6).unwrap();
        let s = sel(&[0, 1], &[2, 3, 4, 5]);
        let w = kernel_witness(i6.matrix(), Side::Left, &s).unwrap();
        assert_eq!(w.coefficients.len(), 2);
        assert!(w.residual <= 1e-12);
        assert!((norm(&w.coefficients) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn rank_one_block_right_witness() {
        let ones = ComplexMatrix::from_row_major(2, 2, vec![c(1., 0.); 4]).unwrap();
        let w =
            kernel_witness(&ones, Side::Right, &SubmatrixSelector::full(2, 2).unwrap()).unwrap();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let z = &w.coefficients;
        assert!((z[0].norm() - h).abs() < 1e-12 && (z[1].norm() - h).abs() < 1e-12);
        assert!((z[0] + z[1]).norm() < 1e-12);
        assert!(w.all_nonzero);
        // Largest-modulus coefficient is real positive (first one on ties).
        assert!(z[0].im.abs() < 1e-15 && z[0].re > 0.0);
    }

    #[test]
    fn witness_needs_a_kernel() {
        let f = dft_matrix(5).unwrap();
        let s = sel(&[0, 1], &[0, 1, 2]);
        assert!(matches!(
            kernel_witness(f.matrix(), Side::Left, &s),
            Err(Error::NoKernel("left"))
        ));
        // Wide matrices always have a right kernel.
        let w = kernel_witness(f.matrix(), Side::Right, &s).unwrap();
        assert!(w.residual < 1e-12);
    }

    #[test]
    fn dft_comb_block_has_all_nonzero_left_witness() {
        // Rows {0, 2} x cols {0, 2} of F_4 is [[1, 1], [1, 1]] / 2.
        let f = dft_matrix(4).unwrap();
        let w = kernel_witness(f.matrix(), Side::Left, &sel(&[0, 2], &[0, 2])).unwrap();
        assert!(w.all_nonzero);
        assert!(w.residual < 1e-12);
    }

    #[test]
    fn probe_matches_svd_rank() {
        let cases = [
            identity(6).unwrap(),
            dft_matrix(6).unwrap(),
            dft_matrix(8).unwrap(),
            random_unitary(6, 2).unwrap(),
            bronzan_rotation(std::f64::consts::FRAC_PI_2, 0.3).unwrap(),
        ];
        let subsets: Vec<Vec<usize>> = (1u32..64)
            .map(|mask| (0..6).filter(|b| mask & (1 << b) != 0).collect())
            .collect();
        for u in &cases {
            let m = u.matrix();
            let d = u.dim();
            let mut probe = SubmatrixProbe::new(m, DEFAULT_RANK_TOL, 1.0);
            for rows in subsets.iter().filter(|s| s.iter().all(|&i| i < d)) {
                for cols in subsets
                    .iter()
                    .step_by(3)
                    .filter(|s| s.iter().all(|&i| i < d))
                {
                    let s = sel(rows, cols);
                    let sub = extract_submatrix(m, &s).unwrap();
                    let want = numerical_rank_scaled(&sub, DEFAULT_RANK_TOL, 1.0).unwrap();
                    let got = probe.probe(rows, cols);
                    assert_eq!(got.deficiency, rows.len().min(cols.len()) - want.rank);
                }
            }
        }
    }
}
