//! Braiding providers and checks of the braiding axioms.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{c64, eye, hs_norm, kron, matmul, Mat};
use crate::spans::{span_from_slices, Side};
use crate::tensor_core::{adjoint, compose, embed_adjacent, tensor, total_dim, LegOperator, Space};

#[derive(Clone, Debug)]
pub enum BraidingKind {
    /// Plain swap of tensor factors.
    Flip,
    /// c(h⊗k) = q^{deg h · deg k} k⊗h with q = exp(2πi/m).
    Phase { modulus: u32 },
    /// Stored unitaries keyed by (first, second) space id. Pairs involving
    /// composite spaces without an entry are assembled from the factors.
    Explicit { table: BTreeMap<(String, String), Mat> },
    /// c'_{H,K} = (c_{K,H})⁻¹, the braiding of the reversed category.
    Reversed(Box<Braiding>),
}

#[derive(Clone, Debug)]
pub struct Braiding {
    pub kind: BraidingKind,
}

impl Braiding {
    pub fn flip() -> Braiding {
        Braiding { kind: BraidingKind::Flip }
    }

    pub fn phase(modulus: u32) -> Braiding {
        assert!(modulus >= 1);
        Braiding { kind: BraidingKind::Phase { modulus } }
    }

    pub fn explicit(table: BTreeMap<(String, String), Mat>) -> Braiding {
        Braiding { kind: BraidingKind::Explicit { table } }
    }

    pub fn reversed(&self) -> Braiding {
        match &self.kind {
            BraidingKind::Reversed(base) => (**base).clone(),
            _ => Braiding { kind: BraidingKind::Reversed(Box::new(self.clone())) },
        }
    }

    /// The unitary c_{H,K}: H⊗K → K⊗H.
    pub fn braid(&self, h: &Space, k: &Space) -> Result<LegOperator> {
        let dom = vec![h.clone(), k.clone()];
        let cod = vec![k.clone(), h.clone()];
        match &self.kind {
            BraidingKind::Flip => LegOperator::new(dom, cod, swap_matrix(h.dim, k.dim, |_, _| c64(1.0, 0.0))),
            BraidingKind::Phase { modulus } => {
                let (gh, gk) = match (&h.grading, &k.grading) {
                    (Some(a), Some(b)) => (a, b),
                    _ => return Err(Error::BraidingUnavailable(h.id.clone(), k.id.clone())),
                };
                let m = *modulus as i64;
                let mat = swap_matrix(h.dim, k.dim, |a, b| {
                    let e = (gh[a] * gk[b]).rem_euclid(m);
                    c64(0.0, 2.0 * PI * e as f64 / m as f64).exp()
                });
                LegOperator::new(dom, cod, mat)
            }
            BraidingKind::Explicit { table } => {
                if let Some(m) = table.get(&(h.id.clone(), k.id.clone())) {
                    return LegOperator::new(dom, cod, m.clone());
                }
                if h.is_composite() || k.is_composite() {
                    let hf = if h.is_composite() { h.factors.clone() } else { vec![h.clone()] };
                    let kf = if k.is_composite() { k.factors.clone() } else { vec![k.clone()] };
                    let c = self.braid_legs(&hf, &kf)?;
                    return LegOperator::new(dom, cod, c.mat);
                }
                Err(Error::BraidingUnavailable(h.id.clone(), k.id.clone()))
            }
            BraidingKind::Reversed(base) => {
                let c = base.braid(k, h)?;
                LegOperator::new(dom, cod, c.mat.adjoint())
            }
        }
    }

    /// c⁻¹_{H,K}: K⊗H → H⊗K.
    pub fn braid_inv(&self, h: &Space, k: &Space) -> Result<LegOperator> {
        Ok(adjoint(&self.braid(h, k)?))
    }

    /// Braiding of the leg lists `a` and `b`: a₁…aₘb₁…bₙ → b₁…bₙa₁…aₘ,
    /// built from elementary crossings (last `a` leg moves first).
    pub fn braid_legs(&self, a: &[Space], b: &[Space]) -> Result<LegOperator> {
        let mut legs: Vec<Space> = a.iter().chain(b.iter()).cloned().collect();
        let mut acc = LegOperator::identity(&legs);
        for idx in (0..a.len()).rev() {
            for j in 0..b.len() {
                let p = idx + j;
                let c = self.braid(&legs[p], &legs[p + 1])?;
                let step = embed_adjacent(&c, &legs, p)?;
                acc = compose(&step, &acc)?;
                legs.swap(p, p + 1);
            }
        }
        Ok(acc)
    }
}

/// Matrix of e_a⊗e_b ↦ w(a,b)·e_b⊗e_a.
fn swap_matrix(dh: usize, dk: usize, w: impl Fn(usize, usize) -> crate::linalg::C64) -> Mat {
    let mut m = Mat::zeros(dh * dk, dh * dk);
    for a in 0..dh {
        for b in 0..dk {
            m[(b * dh + a, a * dk + b)] = w(a, b);
        }
    }
    m
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct AxiomReport {
    pub max_residual: f64,
    pub tol: f64,
    pub pass: bool,
}

impl AxiomReport {
    fn new(max_residual: f64, tol: f64) -> AxiomReport {
        AxiomReport { max_residual, tol, pass: max_residual < tol }
    }
}

/// Both hexagon identities over all triples drawn from `spaces`.
pub fn check_hexagons(braiding: &Braiding, spaces: &[Space], tol: f64) -> Result<AxiomReport> {
    let mut worst: f64 = 0.0;
    for u in spaces {
        for v in spaces {
            for w in spaces {
                let vw = Space::product(&[v.clone(), w.clone()]);
                let direct = braiding.braid(u, &vw)?;
                let cuv = braiding.braid(u, v)?;
                let cuw = braiding.braid(u, w)?;
                let idv = eye(v.dim);
                let idw = eye(w.dim);
                let composed = matmul(&kron(&idv, &cuw.mat), &kron(&cuv.mat, &idw));
                worst = worst.max(hs_norm(&(direct.mat - composed)));

                let uv = Space::product(&[u.clone(), v.clone()]);
                let direct2 = braiding.braid(&uv, w)?;
                let cvw = braiding.braid(v, w)?;
                let idu = eye(u.dim);
                let composed2 = matmul(&kron(&cuw.mat, &idv), &kron(&idu, &cvw.mat));
                worst = worst.max(hs_norm(&(direct2.mat - composed2)));
            }
        }
    }
    Ok(AxiomReport::new(worst, tol))
}

/// max ‖c_{H',K'}(f⊗g) − (g⊗f)c_{H,K}‖ over ordered pairs of single-leg morphisms.
pub fn check_naturality(braiding: &Braiding, morphisms: &[LegOperator], tol: f64) -> Result<AxiomReport> {
    let mut worst: f64 = 0.0;
    for f in morphisms {
        for g in morphisms {
            if f.dom.len() != 1 || f.cod.len() != 1 || g.dom.len() != 1 || g.cod.len() != 1 {
                return Err(Error::Legs("naturality check needs single-leg morphisms".into()));
            }
            let c_before = braiding.braid(&f.dom[0], &g.dom[0])?;
            let c_after = braiding.braid(&f.cod[0], &g.cod[0])?;
            let lhs = compose(&c_after, &tensor(f, g))?;
            let rhs = compose(&tensor(g, f), &c_before)?;
            worst = worst.max(hs_norm(&(lhs.mat - rhs.mat)));
        }
    }
    Ok(AxiomReport::new(worst, tol))
}

/// Slice ranks of c_{H,K}.
///
/// At finite dimension the compact operators are all operators, so
/// semi-regular and regular coincide. The left rank is reported without an
/// orientation: left slices of c_{H,K} map K to H.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct BraidingRegularityReport {
    pub right_rank: usize,
    pub left_rank: usize,
    pub full: usize,
    pub semi_regular: bool,
    pub regular: bool,
    pub bi_regular: bool,
}

impl BraidingRegularityReport {
    pub fn from_ranks(right_rank: usize, left_rank: usize, full: usize) -> Self {
        let regular = right_rank == full;
        BraidingRegularityReport {
            right_rank,
            left_rank,
            full,
            semi_regular: regular,
            regular,
            bi_regular: regular && left_rank == full,
        }
    }
}

pub fn braiding_regularity(braiding: &Braiding, h: &Space, k: &Space) -> Result<BraidingRegularityReport> {
    let c = braiding.braid(h, k)?;
    regularity_of_crossing(&c)
}

/// Slice ranks of any two-by-two-leg operator shaped like a braiding.
pub fn regularity_of_crossing(c: &LegOperator) -> Result<BraidingRegularityReport> {
    let right = span_from_slices(c, Side::Right)?.rank();
    let left = span_from_slices(c, Side::Left)?.rank();
    Ok(BraidingRegularityReport::from_ranks(right, left, total_dim(&c.dom)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::is_unitary_mat;

    fn sup() -> Space {
        Space::graded("S", vec![0, 1])
    }

    #[test]
    fn flip_is_swap_permutation() {
        let a = Space::new("A", 2);
        let c = Braiding::flip().braid(&a, &a).unwrap();
        let mut expected = Mat::zeros(4, 4);
        for (r, col) in [(0, 0), (2, 1), (1, 2), (3, 3)] {
            expected[(r, col)] = c64(1.0, 0.0);
        }
        assert_eq!(c.mat, expected);
    }

    #[test]
    fn super_braiding_signs_odd_odd() {
        let c = Braiding::phase(2).braid(&sup(), &sup()).unwrap();
        // basis 00,01,10,11; c(e1⊗e1) = -e1⊗e1, others swapped
        assert!((c.mat[(3, 3)] - c64(-1.0, 0.0)).norm() < 1e-15);
        assert!((c.mat[(2, 1)] - c64(1.0, 0.0)).norm() < 1e-15);
        assert!((c.mat[(1, 2)] - c64(1.0, 0.0)).norm() < 1e-15);
        assert!((c.mat[(0, 0)] - c64(1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn explicit_returns_stored_entry() {
        let a = Space::new("A", 2);
        let m = Mat::from_fn(4, 4, |i, j| c64((i * 4 + j) as f64, 0.0));
        let mut t = BTreeMap::new();
        t.insert(("A".to_string(), "A".to_string()), m.clone());
        let c = Braiding::explicit(t).braid(&a, &a).unwrap();
        assert_eq!(c.mat, m);
        assert!(Braiding::explicit(BTreeMap::new()).braid(&a, &a).is_err());
    }

    #[test]
    fn phase_requires_grading() {
        let a = Space::new("A", 2);
        assert!(Braiding::phase(2).braid(&a, &a).is_err());
    }

    #[test]
    fn hexagons_hold_for_builtin_kinds() {
        let spaces = vec![Space::new("A", 2), Space::new("B", 3)];
        let r = check_hexagons(&Braiding::flip(), &spaces, 1e-13).unwrap();
        assert_eq!(r.max_residual, 0.0);
        let g = vec![Space::graded("X", vec![0, 1, 2, 3]), Space::graded("Y", vec![1, 3]), sup()];
        for m in [2, 3, 4, 5] {
            assert!(check_hexagons(&Braiding::phase(m), &g, 1e-13).unwrap().pass);
        }
    }

    #[test]
    fn corrupted_table_entry_is_reported() {
        let a = Space::new("A", 2);
        let aa = Space::product(&[a.clone(), a.clone()]);
        let flip = Braiding::flip();
        let mut t = BTreeMap::new();
        t.insert(("A".into(), "A".into()), flip.braid(&a, &a).unwrap().mat);
        let mut bad = flip.braid(&a, &aa).unwrap().mat;
        bad[(0, 0)] = c64(-1.0, 0.0);
        t.insert(("A".into(), aa.id.clone()), bad);
        let r = check_hexagons(&Braiding::explicit(t), &[a], 1e-9).unwrap();
        assert!(!r.pass);
        assert!(r.max_residual > 1.0);
    }

    #[test]
    fn naturality_cases() {
        let s = sup();
        let even = LegOperator::endo(vec![s.clone()], Mat::from_diagonal(&nalgebra::DVector::from_vec(vec![c64(0.0, 1.0), c64(2.0, -1.0)]))).unwrap();
        let even2 = LegOperator::endo(vec![s.clone()], Mat::from_diagonal(&nalgebra::DVector::from_vec(vec![c64(3.0, 0.0), c64(0.5, 0.5)]))).unwrap();
        assert!(check_naturality(&Braiding::phase(2), &[even.clone(), even2], 1e-13).unwrap().pass);
        let odd = LegOperator::endo(vec![s.clone()], Mat::from_row_slice(2, 2, &[c64(0.0, 0.0), c64(1.0, 0.0), c64(1.0, 0.0), c64(0.0, 0.0)])).unwrap();
        let r = check_naturality(&Braiding::phase(2), &[even.clone(), odd.clone()], 1e-9).unwrap();
        assert!(!r.pass);
        let a = Space::new("A", 2);
        let arb = LegOperator::endo(vec![a], Mat::from_fn(2, 2, |i, j| c64(i as f64 - j as f64, 1.0 + i as f64))).unwrap();
        assert_eq!(check_naturality(&Braiding::flip(), &[arb], 1e-13).unwrap().max_residual, 0.0);
    }

    #[test]
    fn regularity_of_builtin_and_degenerate() {
        let a = Space::new("A", 2);
        let b = Space::new("B", 3);
        let r = braiding_regularity(&Braiding::flip(), &a, &b).unwrap();
        assert_eq!((r.right_rank, r.left_rank, r.full), (6, 6, 6));
        assert!(r.regular && r.bi_regular && r.semi_regular);
        let r = braiding_regularity(&Braiding::phase(2), &sup(), &sup()).unwrap();
        assert_eq!(r.right_rank, 4);
        let mut t = BTreeMap::new();
        t.insert(("A".into(), "A".into()), eye(4));
        let r = braiding_regularity(&Braiding::explicit(t), &a, &a).unwrap();
        assert_eq!(r.right_rank, 1);
        assert!(!r.regular);
    }

    #[test]
    fn reversed_braiding_inverts() {
        let x = Space::graded("X", vec![0, 1, 2]);
        let y = Space::graded("Y", vec![2, 1]);
        let b = Braiding::phase(3);
        let r = b.reversed();
        let c = r.braid(&x, &y).unwrap();
        assert!(is_unitary_mat(&c.mat, 1e-13));
        assert!(hs_norm(&(c.mat - b.braid(&y, &x).unwrap().mat.adjoint())) < 1e-15);
        let rr = braiding_regularity(&r, &x, &y).unwrap();
        let br = braiding_regularity(&b, &y, &x).unwrap();
        // right slices of c* are adjoints of right slices of c
        assert_eq!((rr.right_rank, rr.left_rank), (br.right_rank, br.left_rank));
    }

    #[test]
    fn braid_legs_respects_hexagon_order() {
        let u = Space::graded("U", vec![0, 1]);
        let v = Space::graded("V", vec![1, 2, 0]);
        let w = Space::graded("W", vec![1, 1]);
        let b = Braiding::phase(3);
        let composite = b.braid_legs(std::slice::from_ref(&u), &[v.clone(), w.clone()]).unwrap();
        let direct = b.braid(&u, &Space::product(&[v, w])).unwrap();
        assert!(hs_norm(&(composite.mat - direct.mat)) < 1e-13);
    }
}
