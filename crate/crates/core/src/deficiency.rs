//! Rank-deficiency profile of a transition matrix.
//!
//! For `t` in `0..d`, `R_{t,r}(U)` is the largest `m - rank` over all
//! submatrices with `m` rows and `m + t` columns, `R_{t,c}(U)` the same with
//! rows and columns exchanged, and `R_t = max(R_{t,r}, R_{t,c})`. The
//! deficiency index `tau` is one less than the first `t` with `R_t = 0`, and
//! the incompatibility order is `chi = d - tau`.
//!
//! Candidates are visited with `m` ascending, then the short-side index set in
//! lexicographic order, then the long-side index set in lexicographic order.
//! The reported witness for a value is the first candidate in that order
//! achieving it, independent of how many worker threads are used.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::matrix::{SubmatrixSelector, TransitionMatrix};
use crate::rank::{kernel_witness_with, KernelWitness, RankConfig, Side, SubmatrixProbe};
use crate::subsets::{k_subsets, Combinations};

/// Outer subsets handed to the thread pool per round. A hit ends the search at
/// the end of the round that contains it.
const BLOCK: usize = 64;

/// Which index set is the short (`m`) side of a candidate submatrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Orientation {
    /// `m x (m + t)`: the rows are dependent.
    Row,
    /// `(m + t) x m`: the columns are dependent.
    Col,
}

impl Orientation {
    /// The null space that certifies the deficiency.
    pub fn kernel_side(self) -> Side {
        match self {
            Orientation::Row => Side::Left,
            Orientation::Col => Side::Right,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DeficiencyWitness {
    pub orientation: Orientation,
    pub selector: SubmatrixSelector,
    /// `m - rank` of the selected submatrix.
    pub deficiency: usize,
}

impl DeficiencyWitness {
    /// Kernel vector of the witness submatrix on its dependent side.
    pub fn kernel(&self, u: &TransitionMatrix, config: &RankConfig) -> Result<KernelWitness> {
        kernel_witness_with(
            u.matrix(),
            self.orientation.kernel_side(),
            &self.selector,
            config,
        )
    }
}

/// One of `R_{t,r}`, `R_{t,c}` or `R_t` together with its first maximizing selector.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RankDeficiency {
    pub value: usize,
    pub witness: Option<DeficiencyWitness>,
    /// Largest `gap_ratio` among the rank decisions this value depends on.
    pub worst_gap_ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DeficiencyProfile {
    pub dim: usize,
    /// `R_t` for `t = 0..d`.
    pub r_values: Vec<usize>,
    pub r_row_values: Vec<usize>,
    pub r_col_values: Vec<usize>,
    pub tau: i64,
    pub chi: usize,
    /// Maximizing selector for each `t` with `R_t > 0`.
    pub witnesses: Vec<Option<DeficiencyWitness>>,
    pub row_witnesses: Vec<Option<DeficiencyWitness>>,
    pub col_witnesses: Vec<Option<DeficiencyWitness>>,
    pub worst_gap_ratio: f64,
}

/// Clause-by-clause check of the structural properties of a profile.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ProfileChecks {
    /// `R_t >= 0` and `R_t = max(R_{t,r}, R_{t,c})`.
    pub nonnegative: bool,
    /// `0 <= R_t - R_{t+1} <= 1`.
    pub unit_steps: bool,
    /// `R_{d-1} = 0`.
    pub last_zero: bool,
    /// `R_0 = 0` forces every `R_t = 0`.
    pub zero_propagates: bool,
    /// `tau >= 0` implies `R_tau = R_{tau,r} = R_{tau,c} = 1`.
    pub unit_at_tau: bool,
    /// `tau` and `chi` agree with `r_values`.
    pub indices_consistent: bool,
}

impl ProfileChecks {
    pub fn structural(&self) -> bool {
        self.nonnegative && self.unit_steps && self.last_zero && self.zero_propagates
    }

    pub fn all(&self) -> bool {
        self.structural() && self.unit_at_tau && self.indices_consistent
    }
}

impl DeficiencyProfile {
    pub fn checks(&self) -> ProfileChecks {
        let d = self.dim;
        let r = &self.r_values;
        let nonnegative =
            r.len() == d && (0..d).all(|t| r[t] == self.r_row_values[t].max(self.r_col_values[t]));
        let unit_steps = r.windows(2).all(|w| w[0] >= w[1] && w[0] - w[1] <= 1);
        let last_zero = r.last() == Some(&0);
        let zero_propagates = r.first() != Some(&0) || r.iter().all(|&v| v == 0);
        let unit_at_tau = match usize::try_from(self.tau) {
            Ok(t) => r[t] == 1 && self.r_row_values[t] == 1 && self.r_col_values[t] == 1,
            Err(_) => true,
        };
        let first_zero = r.iter().position(|&v| v == 0).unwrap_or(d) as i64;
        let indices_consistent =
            self.tau == first_zero - 1 && self.chi as i64 == d as i64 - self.tau;
        ProfileChecks {
            nonnegative,
            unit_steps,
            last_zero,
            zero_propagates,
            unit_at_tau,
            indices_consistent,
        }
    }

    pub fn is_fragile(&self) -> bool {
        self.worst_gap_ratio > crate::rank::FRAGILE_GAP
    }
}

#[derive(Debug, Clone)]
struct Hit {
    selector: SubmatrixSelector,
    deficiency: usize,
}

#[derive(Debug, Clone, Default)]
struct Scan {
    hit: Option<Hit>,
    worst_gap: f64,
}

/// Exhaustive search over the submatrices of one transition matrix.
pub struct DeficiencySearch<'a> {
    u: &'a TransitionMatrix,
    tol: f64,
    scale: f64,
}

impl<'a> DeficiencySearch<'a> {
    pub fn new(u: &'a TransitionMatrix, config: &RankConfig) -> Result<Self> {
        config.validate()?;
        Ok(Self {
            u,
            tol: config.tol,
            scale: u.matrix().spectral_norm(),
        })
    }

    fn dim(&self) -> usize {
        self.u.dim()
    }

    fn check_t(&self, t: usize) -> Result<()> {
        if t < self.dim() {
            Ok(())
        } else {
            Err(Error::Domain(format!(
                "t = {t} outside 0..={} for d = {}",
                self.dim() - 1,
                self.dim()
            )))
        }
    }

    /// First candidate of the given orientation and offset `t` whose
    /// deficiency is at least `goal` (`goal >= 1`).
    fn first_at_least(&self, orientation: Orientation, t: usize, goal: usize) -> Scan {
        let d = self.dim();
        let mut worst_gap: f64 = 0.0;
        for m in goal.max(1)..=d.saturating_sub(t) {
            let outer = k_subsets(d, m);
            for block in outer.chunks(BLOCK) {
                let scans: Vec<Scan> = block
                    .par_iter()
                    .map_init(
                        || SubmatrixProbe::new(self.u.matrix(), self.tol, self.scale),
                        |probe, short| scan_long_side(probe, orientation, short, m + t, goal, d),
                    )
                    .collect();
                for scan in scans {
                    worst_gap = worst_gap.max(scan.worst_gap);
                    if scan.hit.is_some() {
                        return Scan {
                            hit: scan.hit,
                            worst_gap,
                        };
                    }
                }
            }
        }
        Scan {
            hit: None,
            worst_gap,
        }
    }

    /// Maximum deficiency of one orientation at offset `t`, given a lower bound
    /// and an upper bound on it.
    fn side_value(
        &self,
        orientation: Orientation,
        t: usize,
        lower: usize,
        upper: usize,
    ) -> RankDeficiency {
        let mut worst_gap: f64 = 0.0;
        let mut best: Option<Hit> = None;
        // Climb: each hit raises the target until nothing better exists or
        // the upper bound is met.
        let mut goal = lower + 1;
        while goal <= upper {
            let scan = self.first_at_least(orientation, t, goal);
            worst_gap = worst_gap.max(scan.worst_gap);
            match scan.hit {
                Some(hit) => {
                    goal = hit.deficiency + 1;
                    best = Some(hit);
                }
                None => break,
            }
        }
        // Nothing above the lower bound: locate the first selector achieving it.
        if best.is_none() {
            let mut goal = lower;
            while goal >= 1 && best.is_none() {
                let scan = self.first_at_least(orientation, t, goal);
                worst_gap = worst_gap.max(scan.worst_gap);
                best = scan.hit;
                goal -= 1;
            }
        }
        RankDeficiency {
            value: best.as_ref().map_or(0, |h| h.deficiency),
            witness: best.map(|h| DeficiencyWitness {
                orientation,
                selector: h.selector,
                deficiency: h.deficiency,
            }),
            worst_gap_ratio: worst_gap,
        }
    }

    pub fn r_row(&self, t: usize) -> Result<RankDeficiency> {
        self.check_t(t)?;
        Ok(self.side_value(Orientation::Row, t, 0, usize::MAX))
    }

    pub fn r_col(&self, t: usize) -> Result<RankDeficiency> {
        self.check_t(t)?;
        Ok(self.side_value(Orientation::Col, t, 0, usize::MAX))
    }

    pub fn r_t(&self, t: usize) -> Result<RankDeficiency> {
        let row = self.r_row(t)?;
        let col = self.r_col(t)?;
        Ok(combine(row, col))
    }

    /// Whether any `m x (m + t)` or `(m + t) x m` submatrix is rank deficient.
    fn deficient_at(&self, t: usize) -> (bool, f64) {
        let row = self.first_at_least(Orientation::Row, t, 1);
        if row.hit.is_some() || t == 0 {
            // At t = 0 both orientations enumerate the same square submatrices.
            return (row.hit.is_some(), row.worst_gap);
        }
        let col = self.first_at_least(Orientation::Col, t, 1);
        (col.hit.is_some(), row.worst_gap.max(col.worst_gap))
    }

    /// `tau` via existence checks only, plus the worst gap ratio met.
    ///
    /// Deficiency at `t` implies deficiency at every smaller `t` (drop
    /// columns), so the largest deficient `t` is found by bisection after a
    /// first check at `t = 0`.
    pub fn tau_fast(&self) -> (i64, f64) {
        let d = self.dim();
        let (any, mut worst) = self.deficient_at(0);
        if !any || d < 2 {
            return (-1, worst);
        }
        // Invariant: deficient at `lo`, not deficient at `hi`.
        let (mut lo, mut hi) = (0usize, d - 1);
        while hi - lo > 1 {
            let mid = lo + (hi - lo) / 2;
            let (hit, gap) = self.deficient_at(mid);
            worst = worst.max(gap);
            if hit {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        (lo as i64, worst)
    }

    pub fn profile(&self) -> DeficiencyProfile {
        let d = self.dim();
        let mut rows: Vec<RankDeficiency> = Vec::with_capacity(d);
        let mut cols: Vec<RankDeficiency> = Vec::with_capacity(d);
        let (mut prev_row, mut prev_col) = (0usize, 0usize);
        for t in (0..d).rev() {
            // R_{t+1,s} <= R_{t,s} <= R_{t+1,s} + 1 for each side s.
            let row = self.side_value(Orientation::Row, t, prev_row, prev_row + 1);
            let col = self.side_value(Orientation::Col, t, prev_col, prev_col + 1);
            prev_row = row.value;
            prev_col = col.value;
            rows.push(row);
            cols.push(col);
        }
        rows.reverse();
        cols.reverse();

        let combined: Vec<RankDeficiency> = rows
            .iter()
            .zip(&cols)
            .map(|(r, c)| combine(r.clone(), c.clone()))
            .collect();
        let r_values: Vec<usize> = combined.iter().map(|r| r.value).collect();
        let first_zero = r_values.iter().position(|&v| v == 0).unwrap_or(d) as i64;
        let tau = first_zero - 1;
        let worst_gap_ratio = combined
            .iter()
            .map(|r| r.worst_gap_ratio)
            .fold(0.0, f64::max);
        DeficiencyProfile {
            dim: d,
            r_row_values: rows.iter().map(|r| r.value).collect(),
            r_col_values: cols.iter().map(|r| r.value).collect(),
            witnesses: combined.into_iter().map(|r| r.witness).collect(),
            row_witnesses: rows.into_iter().map(|r| r.witness).collect(),
            col_witnesses: cols.into_iter().map(|r| r.witness).collect(),
            r_values,
            tau,
            chi: (d as i64 - tau) as usize,
            worst_gap_ratio,
        }
    }
}

/// Ties go to the row orientation.
fn combine(row: RankDeficiency, col: RankDeficiency) -> RankDeficiency {
    let worst = row.worst_gap_ratio.max(col.worst_gap_ratio);
    let mut best = if col.value > row.value { col } else { row };
    best.worst_gap_ratio = worst;
    best
}

fn scan_long_side(
    probe: &mut SubmatrixProbe<'_>,
    orientation: Orientation,
    short: &[usize],
    long_len: usize,
    goal: usize,
    d: usize,
) -> Scan {
    let mut worst_gap: f64 = 0.0;
    let mut longs = Combinations::new(d, long_len);
    while let Some(long) = longs.next_subset() {
        let p = match orientation {
            Orientation::Row => probe.probe(short, long),
            Orientation::Col => probe.probe(long, short),
        };
        worst_gap = worst_gap.max(p.gap_ratio);
        if p.deficiency >= goal {
            let (rows, cols) = match orientation {
                Orientation::Row => (short.to_vec(), long.to_vec()),
                Orientation::Col => (long.to_vec(), short.to_vec()),
            };
            return Scan {
                hit: Some(Hit {
                    selector: SubmatrixSelector::new(rows, cols).expect("sorted nonempty subsets"),
                    deficiency: p.deficiency,
                }),
                worst_gap,
            };
        }
    }
    Scan {
        hit: None,
        worst_gap,
    }
}

pub fn r_row(u: &TransitionMatrix, t: usize) -> Result<RankDeficiency> {
    DeficiencySearch::new(u, &RankConfig::default())?.r_row(t)
}

pub fn r_col(u: &TransitionMatrix, t: usize) -> Result<RankDeficiency> {
    DeficiencySearch::new(u, &RankConfig::default())?.r_col(t)
}

pub fn r_t(u: &TransitionMatrix, t: usize) -> Result<RankDeficiency> {
    DeficiencySearch::new(u, &RankConfig::default())?.r_t(t)
}

pub fn deficiency_profile(u: &TransitionMatrix) -> Result<DeficiencyProfile> {
    deficiency_profile_with(u, &RankConfig::default())
}

pub fn deficiency_profile_with(
    u: &TransitionMatrix,
    config: &RankConfig,
) -> Result<DeficiencyProfile> {
    Ok(DeficiencySearch::new(u, config)?.profile())
}

pub fn tau_fast(u: &TransitionMatrix) -> Result<i64> {
    Ok(DeficiencySearch::new(u, &RankConfig::default())?
        .tau_fast()
        .0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::{bronzan_rotation, dft_matrix, identity, qubit_rotation, random_unitary};
    use std::f64::consts::PI;

    #[test]
    fn identity_six_row_values() {
        let i6 = identity(6).unwrap();
        let r4 = r_row(&i6, 4).unwrap();
        assert_eq!(r4.value, 1);
        let w = r4.witness.unwrap();
        assert_eq!(w.selector.rows(), &[0]);
        assert_eq!(w.selector.cols(), &[1, 2, 3, 4, 5]);
        assert_eq!(r_row(&i6, 0).unwrap().value, 3);
    }

    #[test]
    fn identity_six_row_equals_col() {
        let i6 = identity(6).unwrap();
        for t in 0..6 {
            assert_eq!(r_row(&i6, t).unwrap().value, r_col(&i6, t).unwrap().value);
        }
    }

    #[test]
    fn identity_six_r_t() {
        let i6 = identity(6).unwrap();
        assert_eq!(r_t(&i6, 1).unwrap().value, 2);
        assert_eq!(r_t(&i6, 2).unwrap().value, 2);
        assert_eq!(r_t(&i6, 3).unwrap().value, 1);
    }

    #[test]
    fn t_out_of_range() {
        let i3 = identity(3).unwrap();
        assert!(matches!(r_row(&i3, 3), Err(Error::Domain(_))));
        assert!(matches!(r_col(&i3, 7), Err(Error::Domain(_))));
    }

    #[test]
    fn last_offset_is_zero() {
        for u in [
            identity(4).unwrap(),
            dft_matrix(5).unwrap(),
            random_unitary(3, 9).unwrap(),
        ] {
            let d = u.dim();
            assert_eq!(r_col(&u, d - 1).unwrap().value, 0);
            assert_eq!(r_row(&u, d - 1).unwrap().value, 0);
        }
    }

    #[test]
    fn prime_dft_has_no_deficiency() {
        let f5 = dft_matrix(5).unwrap();
        assert_eq!(r_row(&f5, 0).unwrap().value, 0);
        let p = deficiency_profile(&f5).unwrap();
        assert_eq!(p.r_values, vec![0; 5]);
        assert_eq!((p.tau, p.chi), (-1, 6));
    }

    #[test]
    fn identity_six_profile() {
        let p = deficiency_profile(&identity(6).unwrap()).unwrap();
        assert_eq!(p.r_values, vec![3, 2, 2, 1, 1, 0]);
        assert_eq!((p.tau, p.chi), (4, 2));
        assert!(p.checks().all());
        assert!(p.witnesses[..5].iter().all(Option::is_some));
        assert!(p.witnesses[5].is_none());
    }

    #[test]
    fn qubit_and_bronzan_profiles() {
        let p = deficiency_profile(&qubit_rotation(PI / 4.0, 0.0, 0.0).unwrap()).unwrap();
        assert_eq!((p.tau, p.chi), (-1, 3));
        let p = deficiency_profile(&bronzan_rotation(PI / 5.0, PI / 7.0).unwrap()).unwrap();
        assert_eq!((p.tau, p.chi), (0, 3));
        let p = deficiency_profile(&bronzan_rotation(PI / 2.0, PI / 7.0).unwrap()).unwrap();
        assert_eq!((p.tau, p.chi), (1, 2));
    }

    #[test]
    fn dimension_one() {
        let p = deficiency_profile(&identity(1).unwrap()).unwrap();
        assert_eq!(p.r_values, vec![0]);
        assert_eq!((p.tau, p.chi), (-1, 2));
        assert_eq!(tau_fast(&random_unitary(1, 4).unwrap()).unwrap(), -1);
    }

    #[test]
    fn tau_fast_examples() {
        for d in 2..=7 {
            assert_eq!(tau_fast(&identity(d).unwrap()).unwrap(), d as i64 - 2);
        }
        assert_eq!(tau_fast(&dft_matrix(7).unwrap()).unwrap(), -1);
        assert_eq!(tau_fast(&dft_matrix(6).unwrap()).unwrap(), 1);
    }

    #[test]
    fn witness_kernels_at_tau_are_all_nonzero() {
        let config = RankConfig::default();
        for u in [
            identity(5).unwrap(),
            dft_matrix(6).unwrap(),
            bronzan_rotation(0.3, 0.0).unwrap(),
        ] {
            let p = deficiency_profile(&u).unwrap();
            let t = p.tau as usize;
            for w in [&p.row_witnesses[t], &p.col_witnesses[t]] {
                let k = w.as_ref().unwrap().kernel(&u, &config).unwrap();
                assert!(k.all_nonzero, "{k:?}");
                assert!(k.residual <= 1e-9);
            }
        }
    }
}
