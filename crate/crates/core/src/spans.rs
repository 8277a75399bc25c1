//! Linear spans of operators: slice spans, algebra certificates, kernels,
//! crossed products and relative multiplier tests.
//!
//! A span stores an orthonormal basis (Hilbert-Schmidt inner product) of
//! row-major vectorized operators as the columns of one matrix.

use serde::{Deserialize, Serialize};

use crate::braidings::Braiding;
use crate::error::{Error, Result};
use crate::linalg::{eye, hs_norm, kron, lstsq, matmul, null_space, orthonormal_basis, rank, stack_columns, unvec_rm, vec_rm, Mat, C64};
use crate::tensor_core::{total_dim, LegOperator, Space};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Right,
    Left,
}

#[derive(Clone, Debug)]
pub struct OperatorSpan {
    pub dom: Vec<Space>,
    pub cod: Vec<Space>,
    q: Mat,
}

impl OperatorSpan {
    pub fn from_ops(dom: &[Space], cod: &[Space], ops: &[Mat]) -> OperatorSpan {
        let len = total_dim(dom) * total_dim(cod);
        let m = stack_columns(ops.iter(), len);
        OperatorSpan { dom: dom.to_vec(), cod: cod.to_vec(), q: orthonormal_basis(&m) }
    }

    pub fn zero(dom: &[Space], cod: &[Space]) -> OperatorSpan {
        let len = total_dim(dom) * total_dim(cod);
        OperatorSpan { dom: dom.to_vec(), cod: cod.to_vec(), q: Mat::zeros(len, 0) }
    }

    /// All operators dom → cod.
    pub fn full(dom: &[Space], cod: &[Space]) -> OperatorSpan {
        let len = total_dim(dom) * total_dim(cod);
        OperatorSpan { dom: dom.to_vec(), cod: cod.to_vec(), q: eye(len) }
    }

    pub fn scalars(legs: &[Space]) -> OperatorSpan {
        let n = total_dim(legs);
        Self::from_ops(legs, legs, &[eye(n)])
    }

    pub fn rank(&self) -> usize {
        self.q.ncols()
    }

    fn shape(&self) -> (usize, usize) {
        (total_dim(&self.cod), total_dim(&self.dom))
    }

    pub fn basis_mats(&self) -> Vec<Mat> {
        let (r, c) = self.shape();
        (0..self.rank()).map(|j| unvec_rm(self.q.column(j).as_slice(), r, c)).collect()
    }

    pub fn basis(&self) -> Vec<LegOperator> {
        self.basis_mats()
            .into_iter()
            .map(|m| LegOperator { dom: self.dom.clone(), cod: self.cod.clone(), mat: m })
            .collect()
    }

    pub fn gram_residual(&self) -> f64 {
        let g = self.q.adjoint() * &self.q;
        hs_norm(&(g - eye(self.rank())))
    }

    fn check_shape(&self, x: &Mat) -> Result<()> {
        if x.shape() != self.shape() {
            return Err(Error::Signature(format!(
                "operator of shape {:?} against span of shape {:?}",
                x.shape(),
                self.shape()
            )));
        }
        Ok(())
    }

    /// Orthogonal projection onto the span.
    pub fn project(&self, x: &Mat) -> Mat {
        let v = vec_rm(x);
        let p = &self.q * (self.q.adjoint() * v);
        let (r, c) = self.shape();
        unvec_rm(p.as_slice(), r, c)
    }

    /// ‖X − P(X)‖ / ‖X‖, zero for X = 0.
    pub fn relative_defect(&self, x: &Mat) -> Result<f64> {
        self.check_shape(x)?;
        let n = hs_norm(x);
        if n == 0.0 {
            return Ok(0.0);
        }
        Ok(hs_norm(&(x - self.project(x))) / n)
    }

    /// ‖X − P(X)‖ < tol·‖X‖.
    pub fn contains(&self, x: &Mat, tol: f64) -> Result<bool> {
        Ok(self.relative_defect(x)? < tol)
    }

    pub fn contains_span(&self, other: &OperatorSpan, tol: f64) -> Result<bool> {
        for b in other.basis_mats() {
            if !self.contains(&b, tol)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Hilbert-Schmidt distance between the two orthogonal projectors.
    pub fn projector_distance(&self, other: &OperatorSpan) -> Result<f64> {
        if self.shape() != other.shape() {
            return Err(Error::Signature("spans of different shape".into()));
        }
        // ‖P₁−P₂‖² = ‖(1−P₂)Q₁‖² + ‖(1−P₁)Q₂‖², evaluated without cancellation
        let overlap = self.q.adjoint() * &other.q;
        let r1 = &self.q - &other.q * overlap.adjoint();
        let r2 = &other.q - &self.q * overlap;
        Ok((r1.norm_squared() + r2.norm_squared()).sqrt())
    }

    pub fn equals(&self, other: &OperatorSpan, tol: f64) -> Result<bool> {
        Ok(self.projector_distance(other)? < tol)
    }
}

fn two_by_two(x: &LegOperator) -> Result<()> {
    if x.dom.len() != 2 || x.cod.len() != 2 {
        return Err(Error::Legs("slices need two domain and two codomain legs".into()));
    }
    Ok(())
}

/// Right slices (id⊗⟨e_i|)X(id⊗|e_j⟩) or left slices (⟨e_i|⊗id)X(|e_j⟩⊗id).
pub fn slices(x: &LegOperator, side: Side) -> Result<Vec<Mat>> {
    two_by_two(x)?;
    let (da, db) = (x.dom[0].dim, x.dom[1].dim);
    let (ca, cb) = (x.cod[0].dim, x.cod[1].dim);
    let mut out = Vec::new();
    match side {
        Side::Right => {
            for i in 0..cb {
                for j in 0..db {
                    out.push(Mat::from_fn(ca, da, |r, c| x.mat[(r * cb + i, c * db + j)]));
                }
            }
        }
        Side::Left => {
            for i in 0..ca {
                for j in 0..da {
                    out.push(Mat::from_fn(cb, db, |r, c| x.mat[(i * cb + r, j * db + c)]));
                }
            }
        }
    }
    Ok(out)
}

pub fn span_from_slices(x: &LegOperator, side: Side) -> Result<OperatorSpan> {
    let s = slices(x, side)?;
    Ok(match side {
        Side::Right => OperatorSpan::from_ops(&x.dom[..1], &x.cod[..1], &s),
        Side::Left => OperatorSpan::from_ops(&x.dom[1..], &x.cod[1..], &s),
    })
}

pub fn product_span(s1: &OperatorSpan, s2: &OperatorSpan) -> Result<OperatorSpan> {
    if s1.dom != s2.cod {
        return Err(Error::Signature("product_span: spans are not composable".into()));
    }
    let b1 = s1.basis_mats();
    let b2 = s2.basis_mats();
    let prods: Vec<Mat> = b1.iter().flat_map(|a| b2.iter().map(move |b| matmul(a, b))).collect();
    Ok(OperatorSpan::from_ops(&s2.dom, &s1.cod, &prods))
}

pub fn adjoint_span(s: &OperatorSpan) -> OperatorSpan {
    let adj: Vec<Mat> = s.basis_mats().iter().map(|m| m.adjoint()).collect();
    OperatorSpan::from_ops(&s.cod, &s.dom, &adj)
}

/// Largest relative distance of a product of basis elements from S.
pub fn algebra_defect(s: &OperatorSpan) -> Result<f64> {
    let b = s.basis_mats();
    let mut worst: f64 = 0.0;
    for x in &b {
        for y in &b {
            worst = worst.max(s.relative_defect(&matmul(x, y))?);
        }
    }
    Ok(worst)
}

pub fn star_defect(s: &OperatorSpan) -> Result<f64> {
    if s.dom != s.cod {
        return Ok(f64::INFINITY);
    }
    let mut worst: f64 = 0.0;
    for x in s.basis_mats() {
        worst = worst.max(s.relative_defect(&x.adjoint())?);
    }
    Ok(worst)
}

pub fn is_algebra(s: &OperatorSpan, tol: f64) -> Result<bool> {
    Ok(algebra_defect(s)? < tol)
}

pub fn is_star_closed(s: &OperatorSpan, tol: f64) -> Result<bool> {
    Ok(star_defect(s)? < tol)
}

/// span{X v} over basis operators X and basis vectors v is the whole space.
pub fn is_nondegenerate(s: &OperatorSpan) -> bool {
    let n = total_dim(&s.cod);
    let b = s.basis_mats();
    if b.is_empty() {
        return false;
    }
    let mut cols = Mat::zeros(n, 0);
    for x in &b {
        let old = cols.ncols();
        cols = cols.insert_columns(old, x.ncols(), C64::new(0.0, 0.0));
        cols.view_mut((0, old), (n, x.ncols())).copy_from(x);
    }
    rank(&cols) == n
}

/// Null space of a linear map given on row-major vectorized operators dom → cod.
pub fn kernel_of_linear_map(t: &Mat, dom: &[Space], cod: &[Space]) -> Result<OperatorSpan> {
    let len = total_dim(dom) * total_dim(cod);
    if t.ncols() != len {
        return Err(Error::Signature(format!("map has {} inputs, operators have {len} entries", t.ncols())));
    }
    let n = if t.nrows() == 0 { eye(len) } else { null_space(t) };
    Ok(OperatorSpan { dom: dom.to_vec(), cod: cod.to_vec(), q: n })
}

/// Which braided tensor product of algebras.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Variant {
    /// α(a) = c_{H2,H1}(1⊗a)c⁻¹, β(b) = 1⊗b.
    Hbt,
    /// α(a) = c⁻¹_{H1,H2}(1⊗a)c, β(b) = 1⊗b.
    Habt,
    /// α(a) = a⊗1, β(b) = c⁻¹_{H1,H2}(b⊗1)c.
    Bt,
}

/// The two embeddings of B(H1) and B(H2) into B(H1⊗H2) for a variant.
#[derive(Clone, Debug)]
pub struct Injections {
    pub h1: Vec<Space>,
    pub h2: Vec<Space>,
    pub variant: Variant,
    c: Mat,
    d1: usize,
    d2: usize,
}

impl Injections {
    pub fn new(h1: &[Space], h2: &[Space], braiding: &Braiding, variant: Variant) -> Result<Injections> {
        let c = match variant {
            Variant::Hbt => braiding.braid_legs(h2, h1)?.mat,
            Variant::Habt | Variant::Bt => braiding.braid_legs(h1, h2)?.mat,
        };
        Ok(Injections {
            h1: h1.to_vec(),
            h2: h2.to_vec(),
            variant,
            c,
            d1: total_dim(h1),
            d2: total_dim(h2),
        })
    }

    pub fn legs(&self) -> Vec<Space> {
        self.h1.iter().chain(self.h2.iter()).cloned().collect()
    }

    pub fn alpha(&self, a: &Mat) -> Mat {
        match self.variant {
            Variant::Hbt => matmul(&matmul(&self.c, &kron(&eye(self.d2), a)), &self.c.adjoint()),
            Variant::Habt => matmul(&matmul(&self.c.adjoint(), &kron(&eye(self.d2), a)), &self.c),
            Variant::Bt => kron(a, &eye(self.d2)),
        }
    }

    pub fn beta(&self, b: &Mat) -> Mat {
        match self.variant {
            Variant::Hbt | Variant::Habt => kron(&eye(self.d1), b),
            Variant::Bt => matmul(&matmul(&self.c.adjoint(), &kron(b, &eye(self.d1))), &self.c),
        }
    }
}

fn endo_legs(s: &OperatorSpan) -> Result<Vec<Space>> {
    if s.dom != s.cod {
        return Err(Error::Signature("crossed products need endomorphism spans".into()));
    }
    Ok(s.dom.clone())
}

/// Span of all α(a)β(b), a and b running over the two bases.
pub fn crossed_product(s1: &OperatorSpan, s2: &OperatorSpan, braiding: &Braiding, variant: Variant) -> Result<OperatorSpan> {
    let inj = Injections::new(&endo_legs(s1)?, &endo_legs(s2)?, braiding, variant)?;
    let alphas: Vec<Mat> = s1.basis_mats().iter().map(|a| inj.alpha(a)).collect();
    let betas: Vec<Mat> = s2.basis_mats().iter().map(|b| inj.beta(b)).collect();
    let prods: Vec<Mat> = alphas.iter().flat_map(|a| betas.iter().map(move |b| matmul(a, b))).collect();
    let legs = inj.legs();
    Ok(OperatorSpan::from_ops(&legs, &legs, &prods))
}

/// [α(A1)β(A2)] = [β(A2)α(A1)].
pub fn crossed_product_commutation_check(
    s1: &OperatorSpan,
    s2: &OperatorSpan,
    braiding: &Braiding,
    variant: Variant,
    tol: f64,
) -> Result<bool> {
    let inj = Injections::new(&endo_legs(s1)?, &endo_legs(s2)?, braiding, variant)?;
    let alphas: Vec<Mat> = s1.basis_mats().iter().map(|a| inj.alpha(a)).collect();
    let betas: Vec<Mat> = s2.basis_mats().iter().map(|b| inj.beta(b)).collect();
    let ab: Vec<Mat> = alphas.iter().flat_map(|a| betas.iter().map(move |b| matmul(a, b))).collect();
    let ba: Vec<Mat> = alphas.iter().flat_map(|a| betas.iter().map(move |b| matmul(b, a))).collect();
    let legs = inj.legs();
    let s_ab = OperatorSpan::from_ops(&legs, &legs, &ab);
    let s_ba = OperatorSpan::from_ops(&legs, &legs, &ba);
    s_ab.equals(&s_ba, tol)
}

/// Largest relative distance of X·b or b·X from S over basis elements b.
pub fn relative_multiplier_defect(s: &OperatorSpan, x: &Mat) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for b in s.basis_mats() {
        worst = worst.max(s.relative_defect(&matmul(x, &b))?);
        worst = worst.max(s.relative_defect(&matmul(&b, x))?);
    }
    Ok(worst)
}

/// X·b ∈ S and b·X ∈ S for every basis element b.
pub fn relative_multiplier_contains(s: &OperatorSpan, x: &Mat, tol: f64) -> Result<bool> {
    Ok(relative_multiplier_defect(s, x)? < tol)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AuxSide {
    Left,
    Right,
}

/// A morphism a ↦ V(id_aux⊗a)V* (aux on the left) or V(a⊗id_aux)V*.
#[derive(Clone, Debug)]
pub struct Conjugator {
    pub v: LegOperator,
    pub aux_dim: usize,
    pub side: AuxSide,
}

impl Conjugator {
    pub fn identity(legs: &[Space]) -> Conjugator {
        Conjugator { v: LegOperator::identity(legs), aux_dim: 1, side: AuxSide::Left }
    }

    pub fn apply(&self, a: &Mat) -> Mat {
        let id = eye(self.aux_dim);
        let inner = match self.side {
            AuxSide::Left => kron(&id, a),
            AuxSide::Right => kron(a, &id),
        };
        matmul(&matmul(&self.v.mat, &inner), &self.v.mat.adjoint())
    }
}

/// Evaluate (f ⊠ g)(x) by writing x = Σ λ_ij α(a_i)β(b_j) and mapping each
/// summand to α'(f(a_i))β'(g(b_j)). The images of null combinations must
/// vanish, otherwise the extension is reported as ill defined.
#[allow(clippy::too_many_arguments)]
pub fn extend_on_crossed_product(
    f: &Conjugator,
    g: &Conjugator,
    s1: &OperatorSpan,
    s2: &OperatorSpan,
    braiding: &Braiding,
    variant: Variant,
    x: &Mat,
    tol: f64,
) -> Result<LegOperator> {
    let src = Injections::new(&endo_legs(s1)?, &endo_legs(s2)?, braiding, variant)?;
    let dst = Injections::new(&f.v.cod, &g.v.cod, braiding, variant)?;
    let a = s1.basis_mats();
    let b = s2.basis_mats();
    let (r1, r2) = (a.len(), b.len());
    let alphas: Vec<Mat> = a.iter().map(|m| src.alpha(m)).collect();
    let betas: Vec<Mat> = b.iter().map(|m| src.beta(m)).collect();
    let prods: Vec<Mat> = alphas.iter().flat_map(|p| betas.iter().map(move |q| matmul(p, q))).collect();
    let n = total_dim(&src.legs());
    let m = stack_columns(prods.iter(), n * n);
    let xv = vec_rm(x);
    let (lam, res) = lstsq(&m, &xv);
    let xn = xv.norm();
    if res > tol * xn.max(1.0) {
        return Err(Error::OutsideSpan(res / xn.max(1e-300)));
    }
    let fa: Vec<Mat> = a.iter().map(|m| dst.alpha(&f.apply(m))).collect();
    let gb: Vec<Mat> = b.iter().map(|m| dst.beta(&g.apply(m))).collect();
    let out_n = total_dim(&dst.legs());
    let assemble = |coef: &[C64]| -> Mat {
        let mut acc = Mat::zeros(out_n, out_n);
        for i in 0..r1 {
            let mut right = Mat::zeros(out_n, out_n);
            let mut any = false;
            for j in 0..r2 {
                let w = coef[i * r2 + j];
                if w.norm() == 0.0 {
                    continue;
                }
                any = true;
                right += &gb[j] * w;
            }
            if any {
                acc += matmul(&fa[i], &right);
            }
        }
        acc
    };
    let y = assemble(lam.as_slice());
    let null = null_space(&m);
    let scale = hs_norm(&y).max(1.0);
    for k in 0..null.ncols() {
        let v: Vec<C64> = null.column(k).iter().cloned().collect();
        let z = hs_norm(&assemble(&v));
        if z > tol * scale {
            return Err(Error::IllDefined(z));
        }
    }
    let legs = dst.legs();
    LegOperator::endo(legs, y)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::examples_io::{cyclic_group, kac_takesaki};
    use crate::linalg::c64;

    fn l2() -> Space {
        Space::new("L", 2)
    }

    fn diag_span() -> OperatorSpan {
        let l = [l2()];
        let e00 = Mat::from_fn(2, 2, |i, j| if i == 0 && j == 0 { c64(1.0, 0.0) } else { c64(0.0, 0.0) });
        let e11 = Mat::from_fn(2, 2, |i, j| if i == 1 && j == 1 { c64(1.0, 0.0) } else { c64(0.0, 0.0) });
        OperatorSpan::from_ops(&l, &l, &[e00, e11])
    }

    fn unit(i: usize, j: usize) -> Mat {
        Mat::from_fn(2, 2, |r, c| if r == i && c == j { c64(1.0, 0.0) } else { c64(0.0, 0.0) })
    }

    #[test]
    fn slices_of_z2_kac_takesaki() {
        let w = kac_takesaki(&cyclic_group(2)).f;
        let right = span_from_slices(&w, Side::Right).unwrap();
        assert_eq!(right.rank(), 2);
        assert!(right.equals(&diag_span(), 1e-12).unwrap());
        let left = span_from_slices(&w, Side::Left).unwrap();
        let shift = unit(0, 1) + unit(1, 0);
        let expected = OperatorSpan::from_ops(&[l2()], &[l2()], &[eye(2), shift]);
        assert_eq!(left.rank(), 2);
        assert!(left.equals(&expected, 1e-12).unwrap());
        let sigma = Braiding::flip().braid(&l2(), &l2()).unwrap();
        assert_eq!(span_from_slices(&sigma, Side::Right).unwrap().rank(), 4);
        assert!(span_from_slices(&LegOperator::identity(&[l2()]), Side::Right).is_err());
    }

    #[test]
    fn span_comparisons() {
        let d = diag_span();
        assert!(d.equals(&d, 1e-12).unwrap());
        assert!(!d.contains(&unit(0, 1), 1e-9).unwrap());
        assert!(d.gram_residual() < 1e-12);
        let w = kac_takesaki(&cyclic_group(2)).f;
        let sigma = Braiding::flip().braid(&l2(), &l2()).unwrap();
        let sw = sigma.compose(&w).unwrap();
        let full = OperatorSpan::full(&[l2()], &[l2()]);
        assert!(span_from_slices(&sw, Side::Right).unwrap().equals(&full, 1e-12).unwrap());
    }

    #[test]
    fn products_and_adjoints() {
        let d = diag_span();
        assert!(product_span(&d, &d).unwrap().equals(&d, 1e-12).unwrap());
        let full = OperatorSpan::full(&[l2()], &[l2()]);
        assert!(adjoint_span(&full).equals(&full, 1e-12).unwrap());
        let scal = OperatorSpan::scalars(&[l2()]);
        assert!(product_span(&scal, &d).unwrap().equals(&d, 1e-12).unwrap());
    }

    #[test]
    fn algebra_flags() {
        let d = diag_span();
        assert!(is_algebra(&d, 1e-9).unwrap());
        assert!(is_star_closed(&d, 1e-9).unwrap());
        assert!(is_nondegenerate(&d));
        let nil = OperatorSpan::from_ops(&[l2()], &[l2()], &[unit(0, 1)]);
        assert!(is_algebra(&nil, 1e-9).unwrap());
        assert!(!is_star_closed(&nil, 1e-9).unwrap());
        assert!(!is_nondegenerate(&OperatorSpan::zero(&[l2()], &[l2()])));
    }

    #[test]
    fn kernels() {
        let l = [l2()];
        assert_eq!(kernel_of_linear_map(&Mat::zeros(4, 4), &l, &l).unwrap().rank(), 4);
        assert_eq!(kernel_of_linear_map(&eye(4), &l, &l).unwrap().rank(), 0);
    }

    #[test]
    fn crossed_products_under_flip() {
        let d = diag_span();
        let flip = Braiding::flip();
        let x = crossed_product(&d, &d, &flip, Variant::Hbt).unwrap();
        assert_eq!(x.rank(), 4);
        let legs = [l2(), l2()];
        let dd: Vec<Mat> = d.basis_mats().iter().flat_map(|a| d.basis_mats().into_iter().map(move |b| kron(a, &b))).collect();
        assert!(x.equals(&OperatorSpan::from_ops(&legs, &legs, &dd), 1e-12).unwrap());
        let full = OperatorSpan::full(&[l2()], &[l2()]);
        let y = crossed_product(&d, &full, &flip, Variant::Hbt).unwrap();
        let dfull: Vec<Mat> = d.basis_mats().iter().flat_map(|a| full.basis_mats().into_iter().map(move |b| kron(a, &b))).collect();
        assert!(y.equals(&OperatorSpan::from_ops(&legs, &legs, &dfull), 1e-12).unwrap());
        let scal = OperatorSpan::scalars(&[l2()]);
        let z = crossed_product(&scal, &d, &flip, Variant::Hbt).unwrap();
        let oned: Vec<Mat> = d.basis_mats().iter().map(|b| kron(&eye(2), b)).collect();
        assert!(z.equals(&OperatorSpan::from_ops(&legs, &legs, &oned), 1e-12).unwrap());
        assert!(crossed_product_commutation_check(&d, &d, &flip, Variant::Hbt, 1e-9).unwrap());
        assert!(crossed_product_commutation_check(&scal, &full, &flip, Variant::Bt, 1e-9).unwrap());
    }

    #[test]
    fn non_commuting_injections_are_reported() {
        // span{E01} against span{E10} under the degenerate braiding c = id:
        // α(a) = a⊗1 and β(b) = b⊗1 stop commuting
        let l = l2();
        let mut t = std::collections::BTreeMap::new();
        t.insert(("L".to_string(), "L".to_string()), eye(4));
        let b = Braiding::explicit(t);
        let s1 = OperatorSpan::from_ops(std::slice::from_ref(&l), std::slice::from_ref(&l), &[unit(0, 1)]);
        let s2 = OperatorSpan::from_ops(std::slice::from_ref(&l), std::slice::from_ref(&l), &[unit(1, 0)]);
        assert!(!crossed_product_commutation_check(&s1, &s2, &b, Variant::Bt, 1e-9).unwrap());
    }

    #[test]
    fn multiplier_membership() {
        let d = diag_span();
        assert!(relative_multiplier_contains(&d, &eye(2), 1e-9).unwrap());
        let u = Mat::from_row_slice(2, 2, &[c64(0.6, 0.0), c64(0.0, 0.8), c64(0.0, 0.8), c64(0.6, 0.0)]);
        assert!(!relative_multiplier_contains(&d, &u, 1e-9).unwrap());
    }

    #[test]
    fn identity_extension_returns_input() {
        let d = diag_span();
        let full = OperatorSpan::full(&[l2()], &[l2()]);
        let flip = Braiding::flip();
        let id = Conjugator::identity(&[l2()]);
        let x = kron(&unit(0, 0), &(unit(0, 1) + unit(1, 1) * c64(0.0, 2.0)));
        let y = extend_on_crossed_product(&id, &id, &d, &full, &flip, Variant::Habt, &x, 1e-9).unwrap();
        assert!(hs_norm(&(y.mat - &x)) < 1e-12);
        let outside = kron(&unit(0, 1), &eye(2));
        assert!(matches!(
            extend_on_crossed_product(&id, &id, &d, &full, &flip, Variant::Habt, &outside, 1e-9),
            Err(Error::OutsideSpan(_))
        ));
    }
}
