//! Support uncertainty and its minimum over all nonzero states.
//!
//! A state `psi` has A-coordinates `x_j = <a_j|psi>` and B-coordinates
//! `y = U^dagger x`. `n_AB(psi)` counts the nonzero entries of both. The
//! minimum over states is found by searching subset pairs `(S_A, S_B)` with
//! `|S_A| + |S_B| = s` for increasing `s`: the spans intersect nontrivially iff
//! the submatrix of `U` on rows outside `S_A` and columns in `S_B` has
//! dependent columns.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::deficiency::deficiency_profile_with;
use crate::error::{Error, Result};
use crate::matrix::{ComplexMatrix, SubmatrixSelector, TransitionMatrix};
use crate::rank::{
    kernel_witness_with, normalize_phase, numerical_rank_scaled, RankConfig, SubmatrixProbe,
};
use crate::subsets::{complement_into, k_subsets, Combinations};

pub const DEFAULT_ZERO_THRESHOLD: f64 = 1e-8;
/// Largest dimension the subset search accepts unless overridden.
pub const DEFAULT_SUPPORT_CAP: usize = 10;

const BLOCK: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SupportConfig {
    pub rank: RankConfig,
    pub zero_threshold: f64,
    pub max_dim: usize,
}

impl Default for SupportConfig {
    fn default() -> Self {
        Self {
            rank: RankConfig::default(),
            zero_threshold: DEFAULT_ZERO_THRESHOLD,
            max_dim: DEFAULT_SUPPORT_CAP,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SupportCounts {
    pub n_a: usize,
    pub n_b: usize,
    pub n_ab: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SupportWitness {
    /// Unit-norm A-coordinates `<a_j|psi>`.
    pub state_in_a: Vec<Complex64>,
    pub n_a: usize,
    pub n_b: usize,
    pub n_ab: usize,
    pub subset_a: Vec<usize>,
    pub subset_b: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MinSupport {
    pub witness: SupportWitness,
    /// `|S_A| + |S_B|` of the first intersecting pair found.
    pub order: usize,
    pub worst_gap_ratio: f64,
}

impl MinSupport {
    pub fn is_fragile(&self) -> bool {
        self.worst_gap_ratio > crate::rank::FRAGILE_GAP
    }
}

/// B-coordinates `y_k = sum_j conj(U_jk) x_j`.
pub fn to_b_coordinates(psi_in_a: &[Complex64], u: &TransitionMatrix) -> Result<Vec<Complex64>> {
    let d = u.dim();
    if psi_in_a.len() != d {
        return Err(Error::Shape(format!(
            "state of length {} for dimension {d}",
            psi_in_a.len()
        )));
    }
    Ok((0..d)
        .map(|k| (0..d).map(|j| u.get(j, k).conj() * psi_in_a[j]).sum())
        .collect())
}

pub fn support_counts(
    psi_in_a: &[Complex64],
    u: &TransitionMatrix,
    zero_threshold: f64,
) -> Result<SupportCounts> {
    let y = to_b_coordinates(psi_in_a, u)?;
    let norm = psi_in_a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if norm.is_nan() || norm <= zero_threshold {
        return Err(Error::InvalidArgument(format!(
            "state norm {norm:e} does not exceed the zero threshold {zero_threshold:e}"
        )));
    }
    let count = |v: &[Complex64]| v.iter().filter(|z| z.norm() > zero_threshold).count();
    let n_a = count(psi_in_a);
    let n_b = count(&y);
    Ok(SupportCounts {
        n_a,
        n_b,
        n_ab: n_a + n_b,
    })
}

/// Indices of the coordinates above the threshold.
pub fn support_of(v: &[Complex64], zero_threshold: f64) -> Vec<usize> {
    (0..v.len())
        .filter(|&k| v[k].norm() > zero_threshold)
        .collect()
}

pub fn min_support_uncertainty(u: &TransitionMatrix) -> Result<SupportWitness> {
    Ok(min_support_uncertainty_with(u, &SupportConfig::default())?.witness)
}

/// Minimal support uncertainty with an explicit minimizing state.
///
/// Order of the search: `s` ascending, then `|S_B|` ascending, then `S_B` and
/// finally `S_A` in lexicographic order; the first intersecting pair wins.
pub fn min_support_uncertainty_with(
    u: &TransitionMatrix,
    config: &SupportConfig,
) -> Result<MinSupport> {
    config.rank.validate()?;
    let d = u.dim();
    if d > config.max_dim {
        return Err(Error::TooLarge {
            dim: d,
            cap: config.max_dim,
        });
    }
    let scale = u.matrix().spectral_norm();
    let mut worst_gap: f64 = 0.0;
    for s in 2..=d + 1 {
        for b in 1..s.min(d + 1) {
            let a = s - b;
            if a > d {
                continue;
            }
            let outer = k_subsets(d, b);
            for block in outer.chunks(BLOCK) {
                let scans: Vec<(Option<Vec<usize>>, f64)> = block
                    .par_iter()
                    .map_init(
                        || {
                            (
                                SubmatrixProbe::new(u.matrix(), config.rank.tol, scale),
                                Vec::new(),
                            )
                        },
                        |(probe, rows), subset_b| scan_subsets_a(probe, rows, subset_b, a, d),
                    )
                    .collect();
                for (subset_b, (hit, gap)) in block.iter().zip(scans) {
                    worst_gap = worst_gap.max(gap);
                    if let Some(subset_a) = hit {
                        let witness = reconstruct(u, subset_a, subset_b.clone(), config)?;
                        return Ok(MinSupport {
                            witness,
                            order: s,
                            worst_gap_ratio: worst_gap,
                        });
                    }
                }
            }
        }
    }
    // s = d + 1 with S_A = everything always intersects.
    unreachable!("support search exhausted without a hit")
}

fn scan_subsets_a(
    probe: &mut SubmatrixProbe<'_>,
    rows: &mut Vec<usize>,
    subset_b: &[usize],
    a: usize,
    d: usize,
) -> (Option<Vec<usize>>, f64) {
    let mut worst_gap: f64 = 0.0;
    let mut subsets = Combinations::new(d, a);
    while let Some(subset_a) = subsets.next_subset() {
        complement_into(d, subset_a, rows);
        let hit = if rows.len() < subset_b.len() {
            true
        } else {
            let p = probe.probe(rows, subset_b);
            worst_gap = worst_gap.max(p.gap_ratio);
            p.deficiency > 0
        };
        if hit {
            return (Some(subset_a.to_vec()), worst_gap);
        }
    }
    (None, worst_gap)
}

/// Builds `psi = sum_k y_k |b_k>` from a kernel vector `y` over `S_B` of the
/// rows outside `S_A`.
fn reconstruct(
    u: &TransitionMatrix,
    subset_a: Vec<usize>,
    subset_b: Vec<usize>,
    config: &SupportConfig,
) -> Result<SupportWitness> {
    let d = u.dim();
    let outside: Vec<usize> = crate::subsets::complement(d, &subset_a);
    let y: Vec<Complex64> = if outside.is_empty() {
        let mut y = vec![Complex64::new(0.0, 0.0); subset_b.len()];
        y[0] = Complex64::new(1.0, 0.0);
        y
    } else {
        let sel = SubmatrixSelector::new(outside, subset_b.clone())?;
        kernel_witness_with(u.matrix(), crate::rank::Side::Right, &sel, &config.rank)?.coefficients
    };
    let mut state: Vec<Complex64> = (0..d)
        .map(|j| {
            subset_b
                .iter()
                .zip(&y)
                .map(|(&k, &yk)| u.get(j, k) * yk)
                .sum()
        })
        .collect();
    normalize_phase(&mut state);
    let counts = support_counts(&state, u, config.zero_threshold)?;
    Ok(SupportWitness {
        state_in_a: state,
        n_a: counts.n_a,
        n_b: counts.n_b,
        n_ab: counts.n_ab,
        subset_a,
        subset_b,
    })
}

/// Whether `span{a_j : j in S_A}` and `span{b_k : k in S_B}` share a nonzero
/// vector, decided from the rank of `[e_{S_A} | U_{., S_B}]` in A-coordinates.
pub fn spans_intersect(
    u: &TransitionMatrix,
    subset_a: &[usize],
    subset_b: &[usize],
    config: &RankConfig,
) -> Result<bool> {
    let d = u.dim();
    let width = subset_a.len() + subset_b.len();
    if width > d {
        return Ok(true);
    }
    let stacked = ComplexMatrix::from_fn(d, width, |j, c| {
        if c < subset_a.len() {
            Complex64::new(if subset_a[c] == j { 1.0 } else { 0.0 }, 0.0)
        } else {
            u.get(j, subset_b[c - subset_a.len()])
        }
    })?;
    Ok(numerical_rank_scaled(&stacked, config.tol, 1.0)?.rank < width)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RouteComparison {
    pub tau: i64,
    /// `d - tau` from the deficiency profile.
    pub chi: usize,
    pub n_min: usize,
    pub agree: bool,
    /// Some rank decision on either route had a gap ratio above the fragility limit.
    pub fragile: bool,
}

/// Computes `chi = d - tau` from the deficiency profile and `n_AB^min` from
/// the subset search, and compares them.
pub fn verify_theorem2(u: &TransitionMatrix) -> Result<RouteComparison> {
    verify_theorem2_with(u, &SupportConfig::default())
}

pub fn verify_theorem2_with(
    u: &TransitionMatrix,
    config: &SupportConfig,
) -> Result<RouteComparison> {
    let profile = deficiency_profile_with(u, &config.rank)?;
    let min = min_support_uncertainty_with(u, config)?;
    Ok(RouteComparison {
        tau: profile.tau,
        chi: profile.chi,
        n_min: min.witness.n_ab,
        agree: profile.chi == min.witness.n_ab && min.witness.n_ab == min.order,
        fragile: profile.is_fragile() || min.is_fragile(),
    })
}
