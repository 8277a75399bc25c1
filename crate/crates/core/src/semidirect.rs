//! Fixed vectors and the semi-direct product W⋉F.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{eye, hs_norm, kron, null_space, Mat, Vector, C64};
use crate::mult_unitary::MultUnitary;
use crate::spans::OperatorSpan;
use crate::tensor_core::{apply_distant, chain, embed_adjacent, adjoint, LegOperator, LegVector, Route, Space};
use crate::yd::{yd_residual, YdModule};

#[derive(Clone, Debug)]
pub struct FixedVectorSpace {
    pub space: Space,
    pub basis: Vec<LegVector>,
}

impl FixedVectorSpace {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }
}

/// {e : W(e⊗ξ) = e⊗ξ for all ξ}.
pub fn fixed_vectors(w: &MultUnitary) -> FixedVectorSpace {
    let n = w.dim();
    let d = &w.f.mat - eye(n * n);
    // rows (j, output index), columns e
    let mut t = Mat::zeros(n * n * n, n);
    for j in 0..n {
        for e in 0..n {
            let col = e * n + j;
            for r in 0..n * n {
                t[(j * n * n + r, e)] = d[(r, col)];
            }
        }
    }
    let ns = null_space(&t);
    let basis = (0..ns.ncols())
        .map(|k| LegVector { legs: vec![w.l.clone()], entries: ns.column(k).into_owned() })
        .collect();
    FixedVectorSpace { space: w.l.clone(), basis }
}

/// max over basis vectors ξ of ‖W(e⊗ξ) − e⊗ξ‖.
pub fn fixed_vector_defect(x: &Mat, e: &Vector, n: usize) -> f64 {
    let mut worst: f64 = 0.0;
    for j in 0..n {
        let mut xi = Vector::zeros(n);
        xi[j] = C64::new(1.0, 0.0);
        let v = kron(&Mat::from_column_slice(n, 1, e.as_slice()), &Mat::from_column_slice(n, 1, xi.as_slice()));
        worst = worst.max(hs_norm(&(x * &v - &v)));
    }
    worst
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SemidirectInfo {
    /// Routes of the W and F crossings used for the product.
    pub w_route: Route,
    pub f_route: Route,
    pub ambient_pentagon: f64,
    /// ‖W⋉F − (same with both crossings reversed)‖.
    pub route_gap: f64,
}

fn assemble(w: &MultUnitary, module: &YdModule, f: &MultUnitary, w_route: Route, f_route: Route) -> Result<Mat> {
    let k = w.l.clone();
    let lb = f.l.clone();
    let ctx = vec![k.clone(), lb.clone(), k, lb];
    let w13 = apply_distant(&w.f, &ctx, 0, 2, w_route, &w.braiding)?;
    let u23 = embed_adjacent(&module.u, &ctx, 1)?;
    let v34 = embed_adjacent(&module.v, &ctx, 2)?;
    let f24 = apply_distant(&f.f, &ctx, 1, 3, f_route, &w.braiding)?;
    Ok(chain(&[&w13, &u23, &adjoint(&v34), &f24, &v34])?.mat)
}

/// W⋉F on (K⊗L̆)⊗(K⊗L̆): W₁₃·U₂₃·V*₃₄·F₂₄·V₃₄, with W₁₃ crossing over and
/// F₂₄ crossing under the strand in between.
pub fn semidirect_product(w: &MultUnitary, module: &YdModule, f: &MultUnitary, tol: f64) -> Result<(MultUnitary, SemidirectInfo)> {
    let fp = f.pentagon_residual()?;
    if fp >= tol {
        return Err(Error::Residual { name: "pentagon of F in the YD category".into(), value: fp, tol });
    }
    let ydr = yd_residual(module, w)?;
    if ydr >= tol {
        return Err(Error::Residual { name: "yd module".into(), value: ydr, tol });
    }
    let m = assemble(w, module, f, Route::Over, Route::Under)?;
    let alt = assemble(w, module, f, Route::Under, Route::Over)?;
    let route_gap = hs_norm(&(&m - alt));
    let p = Space::product(&[w.l.clone(), f.l.clone()]);
    let prod = MultUnitary::new(p, m, w.braiding.clone())?;
    let pent = prod.pentagon_residual()?;
    if pent >= tol {
        return Err(Error::Residual { name: "ambient pentagon of the semi-direct product".into(), value: pent, tol });
    }
    Ok((prod, SemidirectInfo { w_route: Route::Over, f_route: Route::Under, ambient_pentagon: pent, route_gap }))
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SemidirectReport {
    pub info: SemidirectInfo,
    pub rank_c: usize,
    pub expected_rank: usize,
    pub regular: bool,
    pub fixed_vector_dim: usize,
    /// Projector distance between the compressed C(W⋉F) and C(F).
    pub compression_distance: Option<f64>,
    pub compression_ok: Option<bool>,
}

/// (⟨e|⊗1)X(|e⟩⊗1) for X on K⊗L̆.
pub fn compress(x: &Mat, e: &Vector, dk: usize, dl: usize) -> Mat {
    let mut out = Mat::zeros(dl, dl);
    for a in 0..dk {
        for b in 0..dk {
            let w = e[a].conj() * e[b];
            if w.norm() == 0.0 {
                continue;
            }
            for r in 0..dl {
                for c in 0..dl {
                    out[(r, c)] += w * x[(a * dl + r, b * dl + c)];
                }
            }
        }
    }
    out
}

pub fn semidirect_regularity_check(w: &MultUnitary, module: &YdModule, f: &MultUnitary, tol: f64) -> Result<SemidirectReport> {
    let (prod, info) = semidirect_product(w, module, f, tol)?;
    let cs = prod.c_span()?;
    let expected = prod.dim() * prod.dim();
    let fixed = fixed_vectors(w);
    let (dist, ok) = if let Some(e) = fixed.basis.first() {
        let mats: Vec<Mat> = cs.basis_mats().iter().map(|x| compress(x, &e.entries, w.dim(), f.dim())).collect();
        let legs = [f.l.clone()];
        let compressed = OperatorSpan::from_ops(&legs, &legs, &mats);
        let d = compressed.projector_distance(&f.c_span()?)?;
        (Some(d), Some(d < tol))
    } else {
        (None, None)
    };
    Ok(SemidirectReport {
        info,
        rank_c: cs.rank(),
        expected_rank: expected,
        regular: cs.rank() == expected,
        fixed_vector_dim: fixed.dim(),
        compression_distance: dist,
        compression_ok: ok,
    })
}

/// Relabel an operator on K⊗L̆ legs as a single composite leg.
pub fn as_composite(x: &LegOperator, p: &Space) -> Result<LegOperator> {
    x.relabel(vec![p.clone()], vec![p.clone()])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::braidings::Braiding;
    use crate::examples_io::{cyclic_group, degenerate_braiding, group_yd_module, kac_takesaki, z2_super_module};
    use crate::yd::yd_braiding_provider;

    #[test]
    fn fixed_vectors_of_examples() {
        for n in 2..6 {
            let w = kac_takesaki(&cyclic_group(n));
            let fv = fixed_vectors(&w);
            assert_eq!(fv.dim(), 1);
            let e = &fv.basis[0].entries;
            assert!((e[0].norm() - 1.0).abs() < 1e-12);
            assert!(fixed_vector_defect(&w.f.mat, e, n) < 1e-12);
            // W* fixes e⊗ξ as well
            assert!(fixed_vector_defect(&w.f.mat.adjoint(), e, n) < 1e-12);
        }
        let id = MultUnitary::new(Space::new("L", 3), eye(9), Braiding::flip()).unwrap();
        assert_eq!(fixed_vectors(&id).dim(), 3);
    }

    #[test]
    fn trivial_module_and_identity_f() {
        let w = kac_takesaki(&cyclic_group(2));
        let lb = Space::new("Lb", 2);
        let m = crate::yd::YdModule::trivial(&lb, &w.l);
        let phi = yd_braiding_provider(std::slice::from_ref(&m), &w, 1e-10).unwrap();
        let f = MultUnitary::new(lb.clone(), eye(4), phi).unwrap();
        let (p, info) = semidirect_product(&w, &m, &f, 1e-10).unwrap();
        assert_eq!(info.ambient_pentagon, 0.0);
        let ctx = vec![w.l.clone(), lb.clone(), w.l.clone(), lb];
        let w13 = apply_distant(&w.f, &ctx, 0, 2, Route::Over, &w.braiding).unwrap();
        assert!(hs_norm(&(p.f.mat - w13.mat)) < 1e-15);
    }

    #[test]
    fn identity_w_embeds_f() {
        let k = Space::new("K", 2);
        let idw = MultUnitary::new(k.clone(), eye(4), Braiding::flip()).unwrap();
        let g = kac_takesaki(&cyclic_group(2));
        let lb = Space::new("Lb", 2);
        let m = crate::yd::YdModule::trivial(&lb, &k);
        let phi = yd_braiding_provider(std::slice::from_ref(&m), &idw, 1e-10).unwrap();
        let f = MultUnitary::new(lb.clone(), g.f.mat.clone(), phi).unwrap();
        let (p, info) = semidirect_product(&idw, &m, &f, 1e-10).unwrap();
        assert!(info.ambient_pentagon < 1e-12);
        let ctx = vec![k.clone(), lb.clone(), k, lb];
        let f24 = apply_distant(&f.f, &ctx, 1, 3, Route::Under, &Braiding::flip()).unwrap();
        assert!(hs_norm(&(p.f.mat - f24.mat)) < 1e-15);
    }

    #[test]
    fn super_module_with_identity_is_regular() {
        let (w, m) = z2_super_module();
        let phi = yd_braiding_provider(std::slice::from_ref(&m), &w, 1e-10).unwrap();
        let f = MultUnitary::new(m.h.clone(), eye(4), phi).unwrap();
        let r = semidirect_regularity_check(&w, &m, &f, 1e-10).unwrap();
        assert!(r.info.ambient_pentagon < 1e-10);
        assert!(r.info.route_gap < 1e-12);
        assert_eq!(r.rank_c, 16);
        assert!(r.regular);
        assert_eq!(r.fixed_vector_dim, 1);
        assert!(r.compression_distance.unwrap() < 1e-8);
    }

    #[test]
    fn kac_takesaki_not_a_module_map_breaks_pentagon() {
        let (w, m) = z2_super_module();
        let phi = yd_braiding_provider(std::slice::from_ref(&m), &w, 1e-10).unwrap();
        let kt = kac_takesaki(&cyclic_group(2));
        let f = MultUnitary::new(m.h.clone(), kt.f.mat.clone(), phi).unwrap();
        assert!(semidirect_product(&w, &m, &f, 1e-10).is_err());
    }

    #[test]
    fn degenerate_ambient_gives_non_regular_product() {
        let k = Space::new("K", 2);
        let lb = Space::new("Lb", 2);
        let deg = degenerate_braiding(&[k.clone(), lb.clone()]);
        let w = MultUnitary::new(k.clone(), eye(4), deg).unwrap();
        let m = crate::yd::YdModule::trivial(&lb, &k);
        let phi = yd_braiding_provider(std::slice::from_ref(&m), &w, 1e-10).unwrap();
        let f = MultUnitary::new(lb, eye(4), phi).unwrap();
        let r = semidirect_regularity_check(&w, &m, &f, 1e-10).unwrap();
        assert_eq!(r.rank_c, 1);
        assert!(!r.regular);
    }

    #[test]
    fn product_group_from_trivial_module() {
        let w = kac_takesaki(&cyclic_group(2));
        let g3 = kac_takesaki(&cyclic_group(3));
        let act = vec![eye(3), eye(3)];
        let m = group_yd_module(&cyclic_group(2), &w.l, "Lb", &[0, 0, 0], &act).unwrap();
        let phi = yd_braiding_provider(std::slice::from_ref(&m), &w, 1e-10).unwrap();
        let f = MultUnitary::new(m.h.clone(), g3.f.mat.clone(), phi).unwrap();
        let r = semidirect_regularity_check(&w, &m, &f, 1e-10).unwrap();
        assert_eq!(r.rank_c, 36);
        assert!(r.compression_distance.unwrap() < 1e-8);
    }
}
