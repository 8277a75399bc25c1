//! Corepresentations, representations and Yetter-Drinfeld modules of a
//! braided multiplicative unitary, the V∗U product and the braiding Φ.

use std::collections::BTreeMap;

use crate::braidings::{check_hexagons, regularity_of_crossing, AxiomReport, Braiding, BraidingRegularityReport};
use crate::error::{Error, Result};
use crate::linalg::{hs_norm, is_unitary_mat, matmul, Mat};
use crate::mult_unitary::MultUnitary;
use crate::spans::{span_from_slices, Side};
use crate::tensor_core::{adjoint, apply_distant, chain, compose, embed_adjacent, extract_distant, LegOperator, Route, Space};

/// U on H⊗L.
#[derive(Clone, Debug)]
pub struct Corep {
    pub h: Space,
    pub u: LegOperator,
}

/// V on L⊗H.
#[derive(Clone, Debug)]
pub struct Rep {
    pub h: Space,
    pub v: LegOperator,
}

#[derive(Clone, Debug)]
pub struct YdModule {
    pub h: Space,
    pub u: LegOperator,
    pub v: LegOperator,
}

impl YdModule {
    pub fn corep(&self) -> Corep {
        Corep { h: self.h.clone(), u: self.u.clone() }
    }

    pub fn rep(&self) -> Rep {
        Rep { h: self.h.clone(), v: self.v.clone() }
    }

    pub fn trivial(h: &Space, l: &Space) -> YdModule {
        YdModule {
            h: h.clone(),
            u: LegOperator::identity(&[h.clone(), l.clone()]),
            v: LegOperator::identity(&[l.clone(), h.clone()]),
        }
    }
}

fn diff(a: &LegOperator, b: &LegOperator) -> f64 {
    hs_norm(&(&a.mat - &b.mat))
}

/// ‖F₂₃U₁₂ − U₁₂U₁₃F₂₃‖ on H⊗L⊗L, with U₁₃ routed as given.
pub fn corep_residual_routed(u: &LegOperator, mu: &MultUnitary, route: Route) -> Result<f64> {
    let h = u.dom[0].clone();
    let l = mu.l.clone();
    let ctx = vec![h, l.clone(), l];
    let f23 = embed_adjacent(&mu.f, &ctx, 1)?;
    let u12 = embed_adjacent(u, &ctx, 0)?;
    let u13 = apply_distant(u, &ctx, 0, 2, route, &mu.braiding)?;
    Ok(diff(&compose(&f23, &u12)?, &chain(&[&u12, &u13, &f23])?))
}

pub fn corep_residual(u: &LegOperator, mu: &MultUnitary) -> Result<f64> {
    corep_residual_routed(u, mu, Route::Over)
}

/// ‖V₂₃F₁₂ − F₁₂V₁₃V₂₃‖ on L⊗L⊗H.
pub fn rep_residual_routed(v: &LegOperator, mu: &MultUnitary, route: Route) -> Result<f64> {
    let h = v.dom[1].clone();
    let l = mu.l.clone();
    let ctx = vec![l.clone(), l, h];
    let f12 = embed_adjacent(&mu.f, &ctx, 0)?;
    let v23 = embed_adjacent(v, &ctx, 1)?;
    let v13 = apply_distant(v, &ctx, 0, 2, route, &mu.braiding)?;
    Ok(diff(&compose(&v23, &f12)?, &chain(&[&f12, &v13, &v23])?))
}

pub fn rep_residual(v: &LegOperator, mu: &MultUnitary) -> Result<f64> {
    rep_residual_routed(v, mu, Route::Over)
}

/// ‖V₁₂F₁₃U₂₃ − U₂₃F₁₃V₁₂‖ on L⊗H⊗L; the crossing of F₁₃ passes over the
/// middle strand on the left side and under it on the right side. `swap`
/// exchanges the two.
pub fn yd_residual_routed(m: &YdModule, mu: &MultUnitary, swap: bool) -> Result<f64> {
    let l = mu.l.clone();
    let ctx = vec![l.clone(), m.h.clone(), l];
    let (r1, r2) = if swap { (Route::Under, Route::Over) } else { (Route::Over, Route::Under) };
    let v12 = embed_adjacent(&m.v, &ctx, 0)?;
    let u23 = embed_adjacent(&m.u, &ctx, 1)?;
    let f13a = apply_distant(&mu.f, &ctx, 0, 2, r1, &mu.braiding)?;
    let f13b = apply_distant(&mu.f, &ctx, 0, 2, r2, &mu.braiding)?;
    Ok(diff(&chain(&[&v12, &f13a, &u23])?, &chain(&[&u23, &f13b, &v12])?))
}

pub fn yd_residual(m: &YdModule, mu: &MultUnitary) -> Result<f64> {
    yd_residual_routed(m, mu, false)
}

fn require(name: &str, value: f64, tol: f64) -> Result<()> {
    if value < tol {
        Ok(())
    } else {
        Err(Error::Residual { name: name.into(), value, tol })
    }
}

/// U₁₃U₂₃ on (H1⊗H2)⊗L.
pub fn tensor_corep(u1: &Corep, u2: &Corep, mu: &MultUnitary, tol: f64) -> Result<Corep> {
    require("corep 1", corep_residual(&u1.u, mu)?, tol)?;
    require("corep 2", corep_residual(&u2.u, mu)?, tol)?;
    let u = tensor_corep_raw(&u1.u, &u2.u, mu)?;
    require("tensor corep", corep_residual(&u, mu)?, tol)?;
    Ok(Corep { h: u.dom[0].clone(), u })
}

fn tensor_corep_raw(u1: &LegOperator, u2: &LegOperator, mu: &MultUnitary) -> Result<LegOperator> {
    let (h1, h2) = (u1.dom[0].clone(), u2.dom[0].clone());
    let ctx = vec![h1.clone(), h2.clone(), mu.l.clone()];
    let a = apply_distant(u1, &ctx, 0, 2, Route::Over, &mu.braiding)?;
    let b = embed_adjacent(u2, &ctx, 1)?;
    let h = Space::product(&[h1, h2]);
    compose(&a, &b)?.relabel(vec![h.clone(), mu.l.clone()], vec![h, mu.l.clone()])
}

/// V₁₂V₁₃ on L⊗(H1⊗H2).
pub fn tensor_rep(v1: &Rep, v2: &Rep, mu: &MultUnitary, tol: f64) -> Result<Rep> {
    require("rep 1", rep_residual(&v1.v, mu)?, tol)?;
    require("rep 2", rep_residual(&v2.v, mu)?, tol)?;
    let (h1, h2) = (v1.h.clone(), v2.h.clone());
    let ctx = vec![mu.l.clone(), h1.clone(), h2.clone()];
    let a = embed_adjacent(&v1.v, &ctx, 0)?;
    let b = apply_distant(&v2.v, &ctx, 0, 2, Route::Over, &mu.braiding)?;
    let h = Space::product(&[h1, h2]);
    let v = compose(&a, &b)?.relabel(vec![mu.l.clone(), h.clone()], vec![mu.l.clone(), h.clone()])?;
    require("tensor rep", rep_residual(&v, mu)?, tol)?;
    Ok(Rep { h, v })
}

/// Tensor product of YD modules. The corepresentation part is
/// `tensor_corep`; the representation part is V2₁₃V1₁₂ with the crossing of
/// V2 under the H1 strand.
pub fn tensor_yd(m1: &YdModule, m2: &YdModule, mu: &MultUnitary, tol: f64) -> Result<YdModule> {
    for (k, m) in [m1, m2].iter().enumerate() {
        require(&format!("yd {}", k + 1), yd_residual(m, mu)?, tol)?;
    }
    let u = tensor_corep(&m1.corep(), &m2.corep(), mu, tol)?.u;
    let v = tensor_yd_rep_raw(m1, m2, mu)?;
    let out = YdModule { h: u.dom[0].clone(), u, v };
    require("tensor yd", yd_residual(&out, mu)?, tol)?;
    Ok(out)
}

fn tensor_yd_rep_raw(m1: &YdModule, m2: &YdModule, mu: &MultUnitary) -> Result<LegOperator> {
    let ctx = vec![mu.l.clone(), m1.h.clone(), m2.h.clone()];
    let a = apply_distant(&m2.v, &ctx, 0, 2, Route::Under, &mu.braiding)?;
    let b = embed_adjacent(&m1.v, &ctx, 0)?;
    let h = Space::product(&[m1.h.clone(), m2.h.clone()]);
    compose(&a, &b)?.relabel(vec![mu.l.clone(), h.clone()], vec![mu.l.clone(), h])
}

/// Distance between the two representation formulas on a tensor product of
/// YD modules (the plain one and the one used by `tensor_yd`).
pub fn tensor_rep_orderings_gap(m1: &YdModule, m2: &YdModule, mu: &MultUnitary, tol: f64) -> Result<f64> {
    let plain = tensor_rep(&m1.rep(), &m2.rep(), mu, tol)?.v;
    let yd = tensor_yd_rep_raw(m1, m2, mu)?;
    Ok(diff(&plain, &yd))
}

#[derive(Clone, Debug)]
pub struct VuProduct {
    pub op: LegOperator,
    pub residual: f64,
    pub warning: Option<String>,
}

/// V∗U on H⊗K: the operator whose distant embedding on legs (1,3) of H⊗L⊗K
/// is U*₁₂V₂₃U₁₂V*₂₃.
pub fn vu_product(v: &Rep, u: &Corep, mu: &MultUnitary, tol: f64) -> Result<VuProduct> {
    let ctx = vec![u.h.clone(), mu.l.clone(), v.h.clone()];
    let u12 = embed_adjacent(&u.u, &ctx, 0)?;
    let v23 = embed_adjacent(&v.v, &ctx, 1)?;
    let r = chain(&[&adjoint(&u12), &v23, &u12, &adjoint(&v23)])?;
    let (z, residual) = extract_distant(&r, &ctx, 0, 2, Route::Over, &mu.braiding)?;
    if residual > tol {
        return Err(Error::NotFactorizable(residual));
    }
    let warning = if mu.goodness()? != 1 { Some("multiplicative unitary is not good; V∗U need not be unique".into()) } else { None };
    Ok(VuProduct { op: z, residual, warning })
}

/// Φ_{H,K} = c⁻¹_{K,H}∘(V_K∗U_H) for H = m1, K = m2.
pub fn yd_braiding(m1: &YdModule, m2: &YdModule, mu: &MultUnitary, tol: f64) -> Result<LegOperator> {
    let vu = vu_product(&m2.rep(), &m1.corep(), mu, tol)?;
    let cinv = mu.braiding.braid_inv(&m2.h, &m1.h)?;
    let phi = compose(&cinv, &vu.op)?;
    if !is_unitary_mat(&phi.mat, tol) {
        return Err(Error::NotUnitary(hs_norm(&(phi.mat.adjoint() * &phi.mat - crate::linalg::eye(phi.mat.nrows())))));
    }
    Ok(phi)
}

/// Explicit braiding holding Φ for every ordered pair of the given modules.
pub fn yd_braiding_provider(modules: &[YdModule], mu: &MultUnitary, tol: f64) -> Result<Braiding> {
    let mut table: BTreeMap<(String, String), Mat> = BTreeMap::new();
    for a in modules {
        for b in modules {
            let phi = yd_braiding(a, b, mu, tol)?;
            table.insert((a.h.id.clone(), b.h.id.clone()), phi.mat);
        }
    }
    Ok(Braiding::explicit(table))
}

/// Hexagon residuals of Φ on the given modules, with Φ on tensor products
/// computed directly from the tensor-product modules.
pub fn yd_hexagons(modules: &[YdModule], mu: &MultUnitary, tol: f64) -> Result<AxiomReport> {
    let mut all: Vec<YdModule> = modules.to_vec();
    for a in modules {
        for b in modules {
            all.push(tensor_yd(a, b, mu, tol)?);
        }
    }
    let mut table: BTreeMap<(String, String), Mat> = BTreeMap::new();
    for a in &all {
        for b in &all {
            let singles = |m: &YdModule| modules.iter().any(|x| x.h.id == m.h.id);
            if !(singles(a) || singles(b)) {
                continue;
            }
            table.insert((a.h.id.clone(), b.h.id.clone()), yd_braiding(a, b, mu, tol)?.mat);
        }
    }
    let spaces: Vec<Space> = modules.iter().map(|m| m.h.clone()).collect();
    check_hexagons(&Braiding::explicit(table), &spaces, tol)
}

pub fn yd_braiding_regularity(m1: &YdModule, m2: &YdModule, mu: &MultUnitary, tol: f64) -> Result<BraidingRegularityReport> {
    regularity_of_crossing(&yd_braiding(m1, m2, mu, tol)?)
}

/// Rank of the right slices of c⁻¹_{L,H}∘U; full rank dim H · dim L is the
/// expected value for a corepresentation of a regular unitary.
pub fn corep_slice_rank(u: &Corep, mu: &MultUnitary) -> Result<usize> {
    let cinv = mu.braiding.braid_inv(&mu.l, &u.h)?;
    let x = compose(&cinv, &u.u)?;
    Ok(span_from_slices(&x, Side::Right)?.rank())
}

/// Apply a YD morphism check: T commutes with U and V.
pub fn is_module_morphism(t: &Mat, m: &YdModule, l: &Space, tol: f64) -> bool {
    let id_l = crate::linalg::eye(l.dim);
    let tu = crate::linalg::kron(t, &id_l);
    let tv = crate::linalg::kron(&id_l, t);
    hs_norm(&(matmul(&m.u.mat, &tu) - matmul(&tu, &m.u.mat))) < tol
        && hs_norm(&(matmul(&m.v.mat, &tv) - matmul(&tv, &m.v.mat))) < tol
}
