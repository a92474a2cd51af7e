use incompat::deficiency::{deficiency_profile, tau_fast};
use incompat::dft::{
    comb_submatrix_rank1_check, dft_chi, divisor_decomposition, divisors, extremal_comb, is_prime,
    meshulam_bound, zeta,
};
use incompat::matrix::{bronzan_rotation, dft_matrix, identity, qubit_rotation, random_unitary};
use incompat::rank::RankConfig;
use incompat::support::{support_counts, support_of, to_b_coordinates, DEFAULT_ZERO_THRESHOLD};
use num_complex::Complex64;
use rand::{seq::index::sample, Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const GRID_DIMS: [usize; 5] = [4, 6, 12, 36, 30];

fn grid(d: usize, n: usize) -> Vec<f64> {
    let step = (d as f64 - 1.0) / (n - 1) as f64;
    (0..n)
        .map(|i| {
            if i + 1 == n {
                d as f64
            } else {
                1.0 + i as f64 * step
            }
        })
        .collect()
}

#[test]
fn combs_attain_divisor_pairs() {
    for d in 1..=16 {
        let f = dft_matrix(d).unwrap();
        for d1 in divisors(d) {
            let c =
                support_counts(&extremal_comb(d, d1).unwrap(), &f, DEFAULT_ZERO_THRESHOLD).unwrap();
            assert_eq!(
                (c.n_a, c.n_b, c.n_ab),
                (d1, d / d1, d1 + d / d1),
                "d={d} d1={d1}"
            );
            assert_eq!(c.n_a * c.n_b, d);
        }
        let dec = divisor_decomposition(d).unwrap();
        let best = support_counts(
            &extremal_comb(d, dec.d_prime).unwrap(),
            &f,
            DEFAULT_ZERO_THRESHOLD,
        )
        .unwrap();
        assert_eq!(best.n_ab, dft_chi(d).unwrap());
    }
}

#[test]
fn comb_blocks_have_rank_one() {
    for d in 1..=16 {
        for d1 in divisors(d) {
            for j0 in 0..d / d1 {
                for k0 in 0..d1 {
                    assert!(
                        comb_submatrix_rank1_check(d, d1, j0, k0).unwrap(),
                        "({d},{d1},{j0},{k0})"
                    );
                }
            }
        }
    }
}

#[test]
fn primes_are_completely_incompatible() {
    for p in (2..=13).filter(|&p| is_prime(p)) {
        assert_eq!(dft_chi(p).unwrap(), p + 1);
        assert_eq!(tau_fast(&dft_matrix(p).unwrap()).unwrap(), -1, "p={p}");
    }
}

#[test]
fn composite_dft_tau_matches_closed_form() {
    for d in [4, 6, 8, 9, 10, 12] {
        let expected = d as i64 - dft_chi(d).unwrap() as i64;
        assert_eq!(
            tau_fast(&dft_matrix(d).unwrap()).unwrap(),
            expected,
            "d={d}"
        );
    }
}

#[test]
fn zeta_shape_on_dense_grid() {
    for d in GRID_DIMS {
        let dec = divisor_decomposition(d).unwrap();
        let floor = (dec.d_prime + dec.d_dprime) as f64;
        let xs = grid(d, 1000);
        let pts: Vec<_> = xs.iter().map(|&x| zeta(d, x).unwrap()).collect();
        for w in pts.windows(3) {
            let (a, b, c) = (w[0], w[1], w[2]);
            // Second divided difference on an uneven last step.
            let s1 = (b.value - a.value) / (b.x - a.x);
            let s2 = (c.value - b.value) / (c.x - b.x);
            assert!(s2 - s1 >= -1e-9, "d={d} x={}", b.x);
        }
        for p in &pts {
            let on_floor = p.x >= dec.d_prime as f64 && p.x <= dec.d_dprime as f64;
            if on_floor {
                assert!((p.value - floor).abs() < 1e-12, "d={d} x={}", p.x);
            } else {
                assert!(p.value > floor + 1e-12, "d={d} x={}", p.x);
            }
            let slope = p.slope(d);
            let is_divisor = d % (p.x.round() as usize) == 0 && (p.x - p.x.round()).abs() == 0.0;
            if is_divisor {
                continue;
            }
            if p.x < dec.d_prime as f64 {
                assert!(slope < 0.0, "d={d} x={}", p.x);
            } else if p.x < dec.d_dprime as f64 {
                assert_eq!(slope, 0.0, "d={d} x={}", p.x);
            } else {
                assert!(slope > 0.0, "d={d} x={}", p.x);
            }
        }
    }
}

#[test]
fn zeta_is_linear_between_divisors() {
    for d in GRID_DIMS {
        let divs = divisors(d);
        for w in divs.windows(2) {
            let (lo, hi) = (w[0] as f64, w[1] as f64);
            let (a, b) = (zeta(d, lo).unwrap().value, zeta(d, hi).unwrap().value);
            for k in 1..10 {
                let x = lo + (hi - lo) * k as f64 / 10.0;
                let lin = a + (b - a) * (x - lo) / (hi - lo);
                assert!(
                    (zeta(d, x).unwrap().value - lin).abs() < 1e-9,
                    "d={d} x={x}"
                );
            }
        }
    }
}

#[test]
fn meshulam_bound_holds_for_random_and_comb_vectors() {
    let d = 12;
    let f = dft_matrix(d).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for s in 1..=d {
        let bound = meshulam_bound(d, s).unwrap();
        for _ in 0..40 {
            let support = sample(&mut rng, d, s);
            let mut x = vec![Complex64::new(0.0, 0.0); d];
            for j in support.iter() {
                x[j] = Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
            }
            let y = to_b_coordinates(&x, &f).unwrap();
            assert!(
                support_of(&y, DEFAULT_ZERO_THRESHOLD).len() >= bound,
                "s={s}"
            );
        }
    }
    // Shifted and modulated combs meet the bound at every divisor.
    for d1 in divisors(d) {
        let comb = extremal_comb(d, d1).unwrap();
        for shift in 0..d {
            for tone in 0..d {
                let x: Vec<Complex64> = (0..d)
                    .map(|j| {
                        comb[(j + d - shift) % d]
                            * Complex64::from_polar(
                                1.0,
                                std::f64::consts::TAU * (tone * j) as f64 / d as f64,
                            )
                    })
                    .collect();
                let c = support_counts(&x, &f, DEFAULT_ZERO_THRESHOLD).unwrap();
                assert_eq!(c.n_a, d1);
                assert_eq!(c.n_b, meshulam_bound(d, d1).unwrap());
            }
        }
    }
    // Sum of two combs: support 2 + 3 - 1 = 4, bound 3 (divisors 4 | 12).
    let a = extremal_comb(d, 2).unwrap();
    let b = extremal_comb(d, 3).unwrap();
    let x: Vec<Complex64> = a.iter().zip(&b).map(|(p, q)| p + q * 2.0).collect();
    let c = support_counts(&x, &f, DEFAULT_ZERO_THRESHOLD).unwrap();
    assert_eq!(c.n_a, 4);
    assert!(c.n_b >= meshulam_bound(d, 4).unwrap());
}

#[test]
fn profile_structure_over_families() {
    let mut corpus = Vec::new();
    for d in 1..=8 {
        corpus.push(identity(d).unwrap());
        corpus.push(dft_matrix(d).unwrap());
    }
    for d in 2..=6 {
        for seed in 0..50 {
            corpus.push(random_unitary(d, 7919 * d as u64 + seed).unwrap());
        }
    }
    let grid: Vec<f64> = (0..=6)
        .map(|k| k as f64 * std::f64::consts::PI / 12.0)
        .collect();
    for &a in &grid {
        for &b in &grid {
            corpus.push(qubit_rotation(a, b, 0.5 * b).unwrap());
            corpus.push(bronzan_rotation(a, b).unwrap());
        }
    }
    let config = RankConfig::default();
    for u in &corpus {
        let p = deficiency_profile(u).unwrap();
        assert!(p.checks().all(), "{:?} {:?}", p.r_values, p.checks());
        if let Ok(t) = usize::try_from(p.tau) {
            for w in [&p.row_witnesses[t], &p.col_witnesses[t]] {
                let k = w.as_ref().unwrap().kernel(u, &config).unwrap();
                assert!(
                    k.all_nonzero && k.residual <= config.witness_tolerance,
                    "{k:?}"
                );
            }
        }
    }
}
