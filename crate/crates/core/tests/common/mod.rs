#![allow(dead_code)]

use incompat::matrix::{
    bronzan_rotation, dft_matrix, identity, qubit_rotation, random_unitary, ComplexMatrix,
    TransitionMatrix,
};
use num_complex::Complex64;
use rand::{seq::SliceRandom, Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn unitary(m: ComplexMatrix) -> TransitionMatrix {
    TransitionMatrix::new(m, 1e-10).expect("unitary")
}

pub fn kron(a: &TransitionMatrix, b: &TransitionMatrix) -> TransitionMatrix {
    let (p, q) = (a.dim(), b.dim());
    unitary(
        ComplexMatrix::from_fn(p * q, p * q, |r, c| {
            a.get(r / q, c / q) * b.get(r % q, c % q)
        })
        .unwrap(),
    )
}

pub fn direct_sum(blocks: &[TransitionMatrix]) -> TransitionMatrix {
    let d: usize = blocks.iter().map(TransitionMatrix::dim).sum();
    let mut offsets = Vec::new();
    let mut acc = 0;
    for b in blocks {
        offsets.push(acc);
        acc += b.dim();
    }
    unitary(
        ComplexMatrix::from_fn(d, d, |r, c| {
            for (b, &o) in blocks.iter().zip(&offsets) {
                if (o..o + b.dim()).contains(&r) && (o..o + b.dim()).contains(&c) {
                    return b.get(r - o, c - o);
                }
            }
            Complex64::new(0.0, 0.0)
        })
        .unwrap(),
    )
}

/// Random row/column permutations and phases applied to `u`.
pub fn scramble(u: &TransitionMatrix, seed: u64) -> TransitionMatrix {
    let d = u.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rp: Vec<usize> = (0..d).collect();
    let mut cp: Vec<usize> = (0..d).collect();
    rp.shuffle(&mut rng);
    cp.shuffle(&mut rng);
    let mut phase = || Complex64::from_polar(1.0, rng.random_range(0.0..std::f64::consts::TAU));
    let rph: Vec<Complex64> = (0..d).map(|_| phase()).collect();
    let cph: Vec<Complex64> = (0..d).map(|_| phase()).collect();
    let m = u
        .matrix()
        .permute_rows(&rp)
        .unwrap()
        .permute_cols(&cp)
        .unwrap()
        .rephase(&rph, &cph)
        .unwrap();
    unitary(m)
}

/// Block-diagonal matrix of Haar-random blocks with the given sizes.
pub fn random_blocks(sizes: &[usize], seed: u64) -> TransitionMatrix {
    let blocks: Vec<TransitionMatrix> = sizes
        .iter()
        .enumerate()
        .map(|(i, &s)| random_unitary(s, seed.wrapping_mul(31).wrapping_add(i as u64)).unwrap())
        .collect();
    direct_sum(&blocks)
}

/// A spread of structured and generic matrices of dimension at most `max_d`.
pub fn zoo(max_d: usize) -> Vec<(String, TransitionMatrix)> {
    let mut out: Vec<(String, TransitionMatrix)> = Vec::new();
    for d in 1..=max_d {
        out.push((format!("identity({d})"), identity(d).unwrap()));
        out.push((format!("dft({d})"), dft_matrix(d).unwrap()));
        out.push((
            format!("random({d})"),
            random_unitary(d, 1000 + d as u64).unwrap(),
        ));
    }
    out.push((
        "qubit(pi/4)".into(),
        qubit_rotation(0.785, 0.3, 1.1).unwrap(),
    ));
    out.push(("qubit(0)".into(), qubit_rotation(0.0, 0.2, 0.0).unwrap()));
    out.push((
        "bronzan(0.3,0.9)".into(),
        bronzan_rotation(0.3, 0.9).unwrap(),
    ));
    out.push(("bronzan(0,0.9)".into(), bronzan_rotation(0.0, 0.9).unwrap()));
    out.push((
        "bronzan(0.3,pi/2)".into(),
        bronzan_rotation(0.3, std::f64::consts::FRAC_PI_2).unwrap(),
    ));
    if max_d >= 4 {
        out.push((
            "kron(dft2,dft2)".into(),
            kron(&dft_matrix(2).unwrap(), &dft_matrix(2).unwrap()),
        ));
        out.push(("blocks[2,2]".into(), random_blocks(&[2, 2], 7)));
        out.push((
            "blocks[1,3]".into(),
            scramble(&random_blocks(&[1, 3], 8), 3),
        ));
    }
    if max_d >= 5 {
        out.push((
            "blocks[2,3]".into(),
            scramble(&random_blocks(&[2, 3], 9), 4),
        ));
        out.push((
            "dft2+bronzan".into(),
            direct_sum(&[dft_matrix(2).unwrap(), bronzan_rotation(0.4, 1.2).unwrap()]),
        ));
    }
    if max_d >= 6 {
        out.push((
            "kron(dft2,dft3)".into(),
            kron(&dft_matrix(2).unwrap(), &dft_matrix(3).unwrap()),
        ));
        out.push((
            "kron(id2,dft3)".into(),
            scramble(&kron(&identity(2).unwrap(), &dft_matrix(3).unwrap()), 5),
        ));
        out.push(("blocks[3,3]".into(), random_blocks(&[3, 3], 10)));
        out.push((
            "blocks[1,2,3]".into(),
            scramble(&random_blocks(&[1, 2, 3], 11), 6),
        ));
    }
    out
}
