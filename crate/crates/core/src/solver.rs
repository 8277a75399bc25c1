//! Numerical search for braided multiplicative unitaries.
//!
//! F = exp(iH) with H Hermitian on L⊗L, restricted to the degree-preserving
//! entries when L is graded. The objective is ‖F₂₃F₁₂ − F₁₂c₁₂F₂₃c⁻¹₁₂F₂₃‖²
//! and is minimised by Levenberg-Marquardt from seeded random starts.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::Serialize;

use crate::braidings::{Braiding, BraidingKind};
use crate::error::{Error, Result};
use crate::linalg::{c64, distance_to_scalar, eye, hs_norm, kron, matmul, Mat, C64};
use crate::mult_unitary::{pentagon_defect, Certificate, MultUnitary};
use crate::tensor_core::Space;

#[derive(Clone, Debug)]
pub struct SearchProblem {
    pub l: Space,
    pub braiding: Braiding,
    pub degree_preserving: bool,
    pub seed: u64,
    pub restarts: usize,
    pub max_iter: usize,
    pub target_residual: f64,
    /// Tolerance handed to the full certificate.
    pub tol: f64,
    /// Standard deviation of the random starting parameters.
    pub init_scale: f64,
}

impl SearchProblem {
    pub fn new(l: Space, braiding: Braiding) -> SearchProblem {
        let degree_preserving = l.grading.is_some();
        SearchProblem {
            l,
            braiding,
            degree_preserving,
            seed: 0,
            restarts: 16,
            max_iter: 200,
            target_residual: 1e-8,
            tol: crate::DEFAULT_TOL,
            init_scale: 1.0,
        }
    }
}

/// Coordinates of Hermitian matrices on L⊗L in an orthonormal basis, with
/// a 0/1 mask selecting the constrained subspace.
///
/// Coordinate (a,a) is H_aa; for a<b, (a,b) and (b,a) carry √2·Re H_ab and
/// √2·Im H_ab.
#[derive(Clone, Debug)]
pub struct Parametrization {
    n: usize,
    mask: Vec<bool>,
}

impl Parametrization {
    pub fn unconstrained(n: usize) -> Parametrization {
        Parametrization { n, mask: vec![true; n * n] }
    }

    pub fn new(l: &Space, braiding: &Braiding, degree_preserving: bool) -> Parametrization {
        let d = l.dim;
        let n = d * d;
        let grading = match (&l.grading, degree_preserving) {
            (Some(g), true) => g.clone(),
            _ => return Parametrization::unconstrained(n),
        };
        let modulus = match braiding.kind {
            BraidingKind::Phase { modulus } if modulus > 1 => Some(modulus as i64),
            _ => None,
        };
        let deg = |a: usize| grading[a / d] + grading[a % d];
        let same = |x: i64, y: i64| match modulus {
            Some(m) => (x - y).rem_euclid(m) == 0,
            None => x == y,
        };
        let mut mask = vec![false; n * n];
        for a in 0..n {
            for b in 0..n {
                mask[a * n + b] = same(deg(a), deg(b));
            }
        }
        Parametrization { n, mask }
    }

    pub fn len(&self) -> usize {
        self.n * self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn free(&self) -> Vec<usize> {
        (0..self.len()).filter(|&k| self.mask[k]).collect()
    }

    pub fn project(&self, p: &[f64]) -> Vec<f64> {
        p.iter().zip(&self.mask).map(|(&x, &m)| if m { x } else { 0.0 }).collect()
    }

    pub fn hermitian(&self, p: &[f64]) -> Mat {
        let n = self.n;
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let p = self.project(p);
        let mut h = Mat::zeros(n, n);
        for a in 0..n {
            h[(a, a)] = c64(p[a * n + a], 0.0);
            for b in a + 1..n {
                let z = c64(p[a * n + b] * s, p[b * n + a] * s);
                h[(a, b)] = z;
                h[(b, a)] = z.conj();
            }
        }
        h
    }

    /// Coordinates of the Hermitian part of `m` (unmasked).
    pub fn coords(&self, m: &Mat) -> Vec<f64> {
        let n = self.n;
        let r2 = std::f64::consts::SQRT_2;
        let mut p = vec![0.0; n * n];
        for a in 0..n {
            p[a * n + a] = m[(a, a)].re;
            for b in a + 1..n {
                let z = (m[(a, b)] + m[(b, a)].conj()) * 0.5;
                p[a * n + b] = r2 * z.re;
                p[b * n + a] = r2 * z.im;
            }
        }
        p
    }

    /// Basis element E_k, ignoring the mask.
    pub fn basis(&self, k: usize) -> Mat {
        let mut e = vec![0.0; self.len()];
        e[k] = 1.0;
        Parametrization::unconstrained(self.n).hermitian(&e)
    }
}

/// exp(iH) with the data needed for its derivative.
struct Exp {
    f: Mat,
    q: Mat,
    /// Divided differences of t ↦ e^{it} at the eigenvalues.
    dd: Mat,
}

fn exp_i(h: &Mat) -> Exp {
    let (f, q, lam) = crate::linalg::expi_hermitian(h);
    let n = lam.len();
    let dd = Mat::from_fn(n, n, |a, b| {
        let half = 0.5 * (lam[a] - lam[b]);
        let sinc = if half.abs() < 1e-8 { 1.0 - half * half / 6.0 } else { half.sin() / half };
        c64(0.0, 1.0) * C64::new(0.0, 0.5 * (lam[a] + lam[b])).exp() * sinc
    });
    Exp { f, q, dd }
}

impl Exp {
    /// Derivative of exp(iH) in the direction dH.
    fn directional(&self, dh: &Mat) -> Mat {
        let inner = self.q.adjoint() * dh * &self.q;
        &self.q * inner.component_mul(&self.dd) * self.q.adjoint()
    }

    /// K with d⟨G, exp(iH)⟩ = ⟨K, dH⟩.
    fn pullback(&self, g: &Mat) -> Mat {
        let inner = self.q.adjoint() * g * &self.q;
        &self.q * inner.component_mul(&self.dd.map(|z| z.conj())) * self.q.adjoint()
    }
}

/// Pentagon objective for a fixed braiding on L⊗L.
pub struct Objective {
    d: usize,
    c: Mat,
    pub param: Parametrization,
}

struct Pieces {
    f12: Mat,
    f23: Mat,
    c12: Mat,
    defect: Mat,
}

fn partial_trace_last(m: &Mat, d: usize) -> Mat {
    let n = m.nrows() / d;
    Mat::from_fn(n, n, |a, b| (0..d).map(|k| m[(a * d + k, b * d + k)]).sum())
}

fn partial_trace_first(m: &Mat, d: usize) -> Mat {
    let n = m.nrows() / d;
    Mat::from_fn(n, n, |a, b| (0..d).map(|k| m[(k * n + a, k * n + b)]).sum())
}

impl Objective {
    pub fn new(problem: &SearchProblem) -> Result<Objective> {
        let c = problem.braiding.braid(&problem.l, &problem.l)?.mat;
        Ok(Objective {
            d: problem.l.dim,
            c,
            param: Parametrization::new(&problem.l, &problem.braiding, problem.degree_preserving),
        })
    }

    pub fn with_parametrization(l: &Space, braiding: &Braiding, param: Parametrization) -> Result<Objective> {
        Ok(Objective { d: l.dim, c: braiding.braid(l, l)?.mat, param })
    }

    pub fn unitary(&self, p: &[f64]) -> Mat {
        exp_i(&self.param.hermitian(p)).f
    }

    fn pieces(&self, f: &Mat) -> Pieces {
        let id = eye(self.d);
        Pieces {
            f12: kron(f, &id),
            f23: kron(&id, f),
            c12: kron(&self.c, &id),
            defect: pentagon_defect(f, &self.c, self.d),
        }
    }

    /// ‖Pentagon defect‖² at parameters p.
    pub fn value(&self, p: &[f64]) -> f64 {
        pentagon_defect(&self.unitary(p), &self.c, self.d).norm_squared()
    }

    /// Gradient of `value` in the constrained coordinates (masked entries 0).
    pub fn gradient(&self, p: &[f64]) -> Vec<f64> {
        let e = exp_i(&self.param.hermitian(p));
        let Pieces { f12, f23, c12, defect: dm } = self.pieces(&e.f);
        let ci12 = c12.adjoint();
        let k1 = matmul(&matmul(&c12, &f23), &matmul(&ci12, &f23));
        let a4 = matmul(&f12, &c12);
        let b4 = matmul(&ci12, &f23);
        let a5 = matmul(&matmul(&a4, &f23), &ci12);
        // dR = 2 Re⟨G₁₂ ⊗ 1 + 1 ⊗ G₂₃, dF⟩ contributions
        let m23 = matmul(&dm, &f12.adjoint())
            - matmul(&matmul(&a4.adjoint(), &dm), &b4.adjoint())
            - matmul(&a5.adjoint(), &dm);
        let m12 = matmul(&f23.adjoint(), &dm) - matmul(&dm, &k1.adjoint());
        let g = partial_trace_last(&m12, self.d) + partial_trace_first(&m23, self.d);
        let k = e.pullback(&g);
        let coords = self.param.coords(&k);
        self.param.project(&coords.iter().map(|x| 2.0 * x).collect::<Vec<_>>())
    }

    /// Real residual vector and its Jacobian in the free coordinates.
    fn jacobian(&self, p: &[f64], free: &[usize]) -> (DVector<f64>, DMatrix<f64>) {
        let e = exp_i(&self.param.hermitian(p));
        let Pieces { f12, f23, c12, defect: dm } = self.pieces(&e.f);
        let ci12 = c12.adjoint();
        let k1 = matmul(&matmul(&c12, &f23), &matmul(&ci12, &f23));
        let a4 = matmul(&f12, &c12);
        let b4 = matmul(&ci12, &f23);
        let a5 = matmul(&matmul(&a4, &f23), &ci12);
        let id = eye(self.d);
        let m = dm.len();
        let unit = Parametrization::unconstrained(self.param.n);
        let mut r = DVector::zeros(2 * m);
        for (i, z) in dm.iter().enumerate() {
            r[i] = z.re;
            r[m + i] = z.im;
        }
        let cols: Vec<Vec<f64>> = free
            .par_iter()
            .map(|&k| {
                let df = e.directional(&unit.basis(k));
                let d12 = kron(&df, &id);
                let d23 = kron(&id, &df);
                let dd = matmul(&d23, &f12) + matmul(&f23, &d12)
                    - matmul(&d12, &k1)
                    - matmul(&matmul(&a4, &d23), &b4)
                    - matmul(&a5, &d23);
                let mut col = vec![0.0; 2 * m];
                for (i, z) in dd.iter().enumerate() {
                    col[i] = z.re;
                    col[m + i] = z.im;
                }
                col
            })
            .collect();
        let mut j = DMatrix::zeros(2 * m, free.len());
        for (c, col) in cols.iter().enumerate() {
            j.set_column(c, &DVector::from_column_slice(col));
        }
        (r, j)
    }

    /// Levenberg-Marquardt from `p0`; returns the final parameters.
    pub fn minimize(&self, p0: &[f64], max_iter: usize) -> Vec<f64> {
        let free = self.param.free();
        let mut p = self.param.project(p0);
        let mut cost = self.value(&p);
        let mut mu = 1e-3;
        let mut stalls = 0;
        for _ in 0..max_iter {
            if cost < 1e-30 {
                break;
            }
            let (r, j) = self.jacobian(&p, &free);
            let jt = j.transpose();
            let g = &jt * &r;
            let a = &jt * &j;
            let mut accepted = false;
            while mu < 1e12 {
                let mut lhs = a.clone();
                for i in 0..lhs.nrows() {
                    lhs[(i, i)] += mu * (1.0 + a[(i, i)]);
                }
                let step = match lhs.cholesky() {
                    Some(ch) => ch.solve(&(-&g)),
                    None => {
                        mu *= 4.0;
                        continue;
                    }
                };
                let mut trial = p.clone();
                for (i, &k) in free.iter().enumerate() {
                    trial[k] += step[i];
                }
                let new_cost = self.value(&trial);
                if new_cost < cost {
                    stalls = if new_cost > cost * (1.0 - 1e-6) { stalls + 1 } else { 0 };
                    p = trial;
                    cost = new_cost;
                    mu = (mu / 3.0).max(1e-15);
                    accepted = true;
                    break;
                }
                mu *= 4.0;
            }
            if !accepted || stalls >= 10 {
                break;
            }
        }
        p
    }

    /// Parameters of a unitary F (principal logarithm through its Schur form).
    pub fn params_of(&self, f: &Mat) -> Result<Vec<f64>> {
        let schur = f.clone().schur();
        let (q, t) = schur.unpack();
        let n = t.nrows();
        let logd = Mat::from_fn(n, n, |a, b| if a == b { c64(t[(a, a)].arg(), 0.0) } else { c64(0.0, 0.0) });
        let h = &q * logd * q.adjoint();
        let p = self.param.coords(&h);
        let back = self.unitary(&p);
        let err = hs_norm(&(back - f));
        if err > 1e-9 {
            return Err(Error::Invalid(format!("no constrained logarithm found (error {err:.3e})")));
        }
        Ok(p)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Found {
    pub restart: usize,
    pub residual: f64,
    pub distance_to_scalar: f64,
    pub trivial: bool,
    #[serde(skip)]
    pub unitary: MultUnitary,
    pub certificate: Certificate,
}

#[derive(Clone, Debug, Serialize)]
pub struct SearchOutcome {
    pub seed: u64,
    pub restarts: usize,
    /// Restarts whose residual reached the target.
    pub converged: usize,
    /// Converged restarts whose full certificate failed.
    pub rejected: usize,
    /// Certified results, deduplicated and ordered by (residual, restart).
    pub results: Vec<Found>,
}

/// Distance below which a found F counts as the trivial solution.
pub const TRIVIAL_DISTANCE: f64 = 1e-6;

fn restart_rng(seed: u64, restart: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(restart as u64);
    rng
}

enum Attempt {
    Miss,
    Rejected,
    Hit(Box<Found>),
}

pub fn search(problem: &SearchProblem) -> Result<SearchOutcome> {
    let obj = Objective::new(problem)?;
    let attempts: Vec<Attempt> = (0..problem.restarts)
        .into_par_iter()
        .map(|i| -> Result<Attempt> {
            let mut rng = restart_rng(problem.seed, i);
            let p0: Vec<f64> =
                (0..obj.param.len()).map(|_| problem.init_scale * rng.sample::<f64, _>(StandardNormal)).collect();
            let p = obj.minimize(&p0, problem.max_iter);
            let f = obj.unitary(&p);
            let mu = match MultUnitary::new(problem.l.clone(), f.clone(), problem.braiding.clone()) {
                Ok(mu) => mu,
                Err(_) => return Ok(Attempt::Miss),
            };
            let residual = mu.pentagon_residual()?;
            if !(residual < problem.target_residual) {
                return Ok(Attempt::Miss);
            }
            let mut certificate = mu.full_certificate(problem.tol)?;
            certificate.strip_timings();
            if !certificate.pass {
                return Ok(Attempt::Rejected);
            }
            let dist = distance_to_scalar(&f);
            Ok(Attempt::Hit(Box::new(Found {
                restart: i,
                residual,
                distance_to_scalar: dist,
                trivial: dist < TRIVIAL_DISTANCE,
                unitary: mu,
                certificate,
            })))
        })
        .collect::<Result<_>>()?;
    let mut converged = 0;
    let mut rejected = 0;
    let mut hits = Vec::new();
    for a in attempts {
        match a {
            Attempt::Miss => {}
            Attempt::Rejected => {
                converged += 1;
                rejected += 1;
            }
            Attempt::Hit(f) => {
                converged += 1;
                hits.push(*f);
            }
        }
    }
    hits.sort_by(|a, b| a.residual.total_cmp(&b.residual).then(a.restart.cmp(&b.restart)));
    let mut results: Vec<Found> = Vec::new();
    for h in hits {
        if results.iter().all(|r| hs_norm(&(&r.unitary.f.mat - &h.unitary.f.mat)) > TRIVIAL_DISTANCE) {
            results.push(h);
        }
    }
    Ok(SearchOutcome { seed: problem.seed, restarts: problem.restarts, converged, rejected, results })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::examples_io::{cyclic_group, kac_takesaki, super_space};

    fn central_difference(obj: &Objective, p: &[f64], k: usize) -> f64 {
        let h = 1e-6;
        let mut a = p.to_vec();
        let mut b = p.to_vec();
        a[k] += h;
        b[k] -= h;
        (obj.value(&a) - obj.value(&b)) / (2.0 * h)
    }

    fn random_point(n: usize, seed: u64) -> Vec<f64> {
        let mut rng = restart_rng(seed, 0);
        (0..n).map(|_| rng.sample::<f64, _>(StandardNormal)).collect()
    }

    #[test]
    fn parametrization_round_trip() {
        let par = Parametrization::unconstrained(3);
        let p = random_point(9, 4);
        assert!(par.coords(&par.hermitian(&p)).iter().zip(&p).all(|(a, b)| (a - b).abs() < 1e-14));
        let e = par.basis(1);
        assert!((e.norm() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn super_constraint_keeps_degree() {
        let l = super_space("L", 1, 1);
        let par = Parametrization::new(&l, &Braiding::phase(2), true);
        // degrees on L⊗L: 0,1,1,2≡0
        assert_eq!(par.free().len(), 8);
        let h = par.hermitian(&random_point(16, 1));
        assert_eq!(h[(0, 1)], c64(0.0, 0.0));
        assert_ne!(h[(0, 3)], c64(0.0, 0.0));
    }

    #[test]
    fn objective_at_known_points() {
        let w = kac_takesaki(&cyclic_group(2));
        let mut pr = SearchProblem::new(w.l.clone(), Braiding::flip());
        pr.degree_preserving = false;
        let obj = Objective::new(&pr).unwrap();
        let p = obj.params_of(&w.f.mat).unwrap();
        assert!(obj.value(&p) < 1e-24);
        assert!(obj.gradient(&p).iter().map(|x| x * x).sum::<f64>().sqrt() < 1e-8);
        assert_eq!(obj.value(&[0.0; 16]), 0.0);
        assert!(obj.value(&random_point(16, 3)) > 1e-3);
    }

    #[test]
    fn gradient_matches_finite_differences() {
        let l = super_space("L", 1, 1);
        let pr = SearchProblem::new(l, Braiding::phase(2));
        let obj = Objective::new(&pr).unwrap();
        let p = obj.param.project(&random_point(16, 9));
        let g = obj.gradient(&p);
        for k in 0..16 {
            let fd = central_difference(&obj, &p, k);
            assert!((g[k] - fd).abs() <= 1e-4 * g[k].abs().max(1e-3), "k={k}: {} vs {fd}", g[k]);
        }
        assert!(obj.param.project(&g) == g);
    }

    #[test]
    fn flip_search_finds_identity_class() {
        let mut pr = SearchProblem::new(Space::new("L", 2), Braiding::flip());
        pr.restarts = 8;
        pr.seed = 11;
        pr.init_scale = 0.05;
        let out = search(&pr).unwrap();
        assert!(out.results.iter().any(|f| f.trivial));
        assert!(out.results.iter().all(|f| f.certificate.pass && f.residual < 1e-8));
    }
}
