#![allow(dead_code)]

use braidmu::linalg::{c64, Mat};
use braidmu::tensor_core::Space;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn gaussian(rng: &mut ChaCha8Rng, r: usize, c: usize) -> Mat {
    Mat::from_fn(r, c, |_, _| c64(rng.sample(StandardNormal), rng.sample(StandardNormal)))
}

/// Haar-ish unitary from modified Gram-Schmidt on a Gaussian matrix.
pub fn random_unitary(rng: &mut ChaCha8Rng, n: usize) -> Mat {
    let mut m = gaussian(rng, n, n);
    for j in 0..n {
        for k in 0..j {
            let proj = m.column(k).dotc(&m.column(j));
            let col_k = m.column(k).into_owned();
            let mut col_j = m.column_mut(j);
            col_j -= col_k * proj;
        }
        let nrm = m.column(j).norm();
        m.column_mut(j).unscale_mut(nrm);
    }
    m
}

/// Unitary preserving the grading of `s` (block diagonal over degrees,
/// compared modulo `modulus` when it is above 1).
pub fn graded_unitary(rng: &mut ChaCha8Rng, s: &Space, modulus: u32) -> Mat {
    let n = s.dim;
    let deg = |i: usize| {
        let g = s.degree(i).unwrap_or(0);
        if modulus > 1 {
            g.rem_euclid(modulus as i64)
        } else {
            g
        }
    };
    let mut out = Mat::zeros(n, n);
    let mut classes: Vec<i64> = (0..n).map(deg).collect();
    classes.sort();
    classes.dedup();
    for cl in classes {
        let idx: Vec<usize> = (0..n).filter(|&i| deg(i) == cl).collect();
        let u = random_unitary(rng, idx.len());
        for (a, &i) in idx.iter().enumerate() {
            for (b, &j) in idx.iter().enumerate() {
                out[(i, j)] = u[(a, b)];
            }
        }
    }
    out
}

/// Exact rank of an integer matrix (rows of equal length) by fraction-free
/// Gaussian elimination.
pub fn exact_rank(mut rows: Vec<Vec<i128>>) -> usize {
    let cols = rows.first().map(|r| r.len()).unwrap_or(0);
    let mut rank = 0;
    let mut prev = 1i128;
    for col in 0..cols {
        let Some(piv) = (rank..rows.len()).find(|&r| rows[r][col] != 0) else { continue };
        rows.swap(rank, piv);
        for r in rank + 1..rows.len() {
            if rows[r][col] == 0 {
                continue;
            }
            for c in col + 1..cols {
                rows[r][c] = (rows[rank][col] * rows[r][c] - rows[r][col] * rows[rank][c]) / prev;
            }
            rows[r][col] = 0;
        }
        prev = rows[rank][col];
        rank += 1;
        if rank == rows.len() {
            break;
        }
    }
    rank
}

/// Integer entries of a matrix whose entries are (numerically) integers.
pub fn integer_entries(m: &Mat) -> Vec<i128> {
    m.iter()
        .map(|z| {
            assert!(z.im.abs() < 1e-12 && (z.re - z.re.round()).abs() < 1e-12, "non-integer entry {z}");
            z.re.round() as i128
        })
        .collect()
}
