//! Braided multiplicative unitaries: Pentagon, slice algebras, duals,
//! goodness, regularity and the bialgebra certificates.

use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::braidings::{braiding_regularity, check_hexagons, Braiding, BraidingRegularityReport};
use crate::error::{Error, Result};
use crate::linalg::{eye, hs_norm, kron, matmul, stack_columns, Mat};
use crate::spans::{
    algebra_defect, crossed_product, extend_on_crossed_product, is_nondegenerate, relative_multiplier_defect,
    span_from_slices, star_defect, AuxSide, Conjugator, Injections, OperatorSpan, Side, Variant,
};
use crate::tensor_core::{LegOperator, Space};

#[derive(Clone, Debug)]
pub struct MultUnitary {
    pub l: Space,
    pub f: LegOperator,
    pub braiding: Braiding,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Comult {
    /// F*(1⊗a)F
    Op,
    /// c·F*(1⊗a)F·c⁻¹
    Std,
    /// F(a⊗1)F*
    Right,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct RegularityReport {
    pub rank_c: usize,
    pub rank_d: usize,
    pub full: usize,
    pub good: bool,
    pub semi_regular: bool,
    pub regular: bool,
    pub bi_regular: bool,
    pub dual_consistent: bool,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BialgebraCertificate {
    pub podles_right: bool,
    pub podles_left: bool,
    pub podles_distance: f64,
    pub coassoc_residual: f64,
    pub multiplier_ok: bool,
    pub multiplier_defect: f64,
    pub span_equality_ok: bool,
    pub span_distance: f64,
}

impl MultUnitary {
    pub fn new(l: Space, mat: Mat, braiding: Braiding) -> Result<MultUnitary> {
        let f = LegOperator::endo(vec![l.clone(), l.clone()], mat)?;
        if !crate::linalg::is_unitary_mat(&f.mat, 1e-12) {
            let d = hs_norm(&(f.mat.adjoint() * &f.mat - eye(f.mat.nrows())));
            return Err(Error::NotUnitary(d));
        }
        Ok(MultUnitary { l, f, braiding })
    }

    /// Skips the unitarity gate; for fault injection and raw solver iterates.
    pub fn new_unchecked(l: Space, mat: Mat, braiding: Braiding) -> Result<MultUnitary> {
        let f = LegOperator::endo(vec![l.clone(), l.clone()], mat)?;
        Ok(MultUnitary { l, f, braiding })
    }

    pub fn dim(&self) -> usize {
        self.l.dim
    }

    pub fn c(&self) -> Result<Mat> {
        Ok(self.braiding.braid(&self.l, &self.l)?.mat)
    }

    pub fn unitarity_defect(&self) -> f64 {
        let id = eye(self.f.mat.nrows());
        hs_norm(&(self.f.mat.adjoint() * &self.f.mat - &id)).max(hs_norm(&(&self.f.mat * self.f.mat.adjoint() - &id)))
    }

    /// ‖F₂₃F₁₂ − F₁₂c₁₂F₂₃c⁻¹₁₂F₂₃‖ on L⊗L⊗L.
    pub fn pentagon_residual(&self) -> Result<f64> {
        Ok(pentagon_defect(&self.f.mat, &self.c()?, self.dim()).iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt())
    }

    pub fn hat_a(&self) -> Result<OperatorSpan> {
        span_from_slices(&self.f, Side::Right)
    }

    pub fn a_span(&self) -> Result<OperatorSpan> {
        span_from_slices(&self.f, Side::Left)
    }

    /// Right slices of c⁻¹∘F.
    pub fn c_span(&self) -> Result<OperatorSpan> {
        let x = matmul(&self.c()?.adjoint(), &self.f.mat);
        span_from_slices(&LegOperator::endo(self.f.dom.clone(), x)?, Side::Right)
    }

    /// Left slices of c⁻¹∘F*.
    pub fn d_span(&self) -> Result<OperatorSpan> {
        let x = matmul(&self.c()?.adjoint(), &self.f.mat.adjoint());
        span_from_slices(&LegOperator::endo(self.f.dom.clone(), x)?, Side::Left)
    }

    /// F̂ = c⁻¹F*c in the reversed category.
    pub fn dual(&self) -> Result<MultUnitary> {
        let c = self.c()?;
        let fh = matmul(&matmul(&c.adjoint(), &self.f.mat.adjoint()), &c);
        Ok(MultUnitary { l: self.l.clone(), f: LegOperator::endo(self.f.dom.clone(), fh)?, braiding: self.braiding.reversed() })
    }

    /// Dimension of {a : F(a⊗1)F* = c(a⊗1)c⁻¹}.
    pub fn goodness(&self) -> Result<usize> {
        let n = self.dim();
        let c = self.c()?;
        let id = eye(n);
        let mut cols = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                let mut a = Mat::zeros(n, n);
                a[(i, j)] = crate::linalg::c64(1.0, 0.0);
                let a1 = kron(&a, &id);
                let lhs = matmul(&matmul(&self.f.mat, &a1), &self.f.mat.adjoint());
                let rhs = matmul(&matmul(&c, &a1), &c.adjoint());
                cols.push(lhs - rhs);
            }
        }
        let t = stack_columns(cols.iter(), n.pow(4));
        let legs = [self.l.clone()];
        Ok(crate::spans::kernel_of_linear_map(&t, &legs, &legs)?.rank())
    }

    pub fn regularity_classify(&self) -> Result<RegularityReport> {
        let full = self.dim() * self.dim();
        let rank_c = self.c_span()?.rank();
        let rank_d = self.d_span()?.rank();
        let good = self.goodness()? == 1;
        let regular = rank_c == full;
        let dual_regular = self.dual()?.c_span()?.rank() == full;
        Ok(RegularityReport {
            rank_c,
            rank_d,
            full,
            good,
            semi_regular: regular,
            regular,
            bi_regular: regular && rank_d == full,
            dual_consistent: regular == dual_regular,
        })
    }

    pub fn comult(&self, a: &Mat, variant: Comult) -> Result<Mat> {
        let id = eye(self.dim());
        let f = &self.f.mat;
        Ok(match variant {
            Comult::Op => matmul(&matmul(&f.adjoint(), &kron(&id, a)), f),
            Comult::Std => {
                let c = self.c()?;
                let op = matmul(&matmul(&f.adjoint(), &kron(&id, a)), f);
                matmul(&matmul(&c, &op), &c.adjoint())
            }
            Comult::Right => matmul(&matmul(f, &kron(a, &id)), &f.adjoint()),
        })
    }

    /// Slice algebra, comultiplication and crossed-product variant for a side:
    /// right slices pair with F*(1⊗a)F and the twisted product, left slices
    /// with F(a⊗1)F* and the plain braided product.
    fn bialgebra_data(&self, side: Side) -> Result<(OperatorSpan, Comult, Variant)> {
        Ok(match side {
            Side::Right => (self.hat_a()?, Comult::Op, Variant::Habt),
            Side::Left => (self.a_span()?, Comult::Right, Variant::Bt),
        })
    }

    /// Projector distances of [Δ(S)·α(S)] and [Δ(S)·β(S)] from S ⊠ S.
    pub fn podles_distances(&self, side: Side) -> Result<(f64, f64)> {
        let (s, comult, variant) = self.bialgebra_data(side)?;
        let legs = [self.l.clone()];
        let inj = Injections::new(&legs, &legs, &self.braiding, variant)?;
        let target = crossed_product(&s, &s, &self.braiding, variant)?;
        let basis = s.basis_mats();
        let deltas: Vec<Mat> = basis.iter().map(|a| self.comult(a, comult)).collect::<Result<_>>()?;
        let two = [self.l.clone(), self.l.clone()];
        let mut dists = [0.0; 2];
        for (k, dist) in dists.iter_mut().enumerate() {
            let mut prods = Vec::new();
            for d in &deltas {
                for b in &basis {
                    let inj_b = if k == 0 { inj.alpha(b) } else { inj.beta(b) };
                    prods.push(matmul(d, &inj_b));
                }
            }
            *dist = OperatorSpan::from_ops(&two, &two, &prods).projector_distance(&target)?;
        }
        Ok((dists[0], dists[1]))
    }

    pub fn podles_check(&self, side: Side, tol: f64) -> Result<(bool, bool)> {
        let (a, b) = self.podles_distances(side)?;
        Ok((a < tol, b < tol))
    }

    /// max over basis elements a of ‖(Δ⊠id)(Δ(a)) − (id⊠Δ)(Δ(a))‖, both sides
    /// evaluated through product decomposition.
    pub fn coassoc_check(&self, side: Side, tol: f64) -> Result<f64> {
        let (s, comult, variant) = self.bialgebra_data(side)?;
        let legs = [self.l.clone()];
        let delta = match comult {
            Comult::Op => Conjugator { v: self.f.adjoint(), aux_dim: self.dim(), side: AuxSide::Left },
            _ => Conjugator { v: self.f.clone(), aux_dim: self.dim(), side: AuxSide::Right },
        };
        let id = Conjugator::identity(&legs);
        let mut worst: f64 = 0.0;
        for a in s.basis_mats() {
            let x = self.comult(&a, comult)?;
            let lhs = extend_on_crossed_product(&delta, &id, &s, &s, &self.braiding, variant, &x, tol)?;
            let rhs = extend_on_crossed_product(&id, &delta, &s, &s, &self.braiding, variant, &x, tol)?;
            worst = worst.max(hs_norm(&(lhs.mat - rhs.mat)));
        }
        Ok(worst)
    }

    /// Multiplier membership of F and the sandwich-span equality.
    ///
    /// Right side: Â(F) ⊠̂ Â(F̂) with sandwiches α(a)Fβ(b). Left side:
    /// A(F̂) ⊠ A(F) with the same sandwich shape.
    pub fn multiplier_defects(&self, side: Side) -> Result<(f64, f64)> {
        let dual = self.dual()?;
        let (s1, s2, variant) = match side {
            Side::Right => (self.hat_a()?, dual.hat_a()?, Variant::Hbt),
            Side::Left => (dual.a_span()?, self.a_span()?, Variant::Bt),
        };
        let legs = [self.l.clone()];
        let inj = Injections::new(&legs, &legs, &self.braiding, variant)?;
        let target = crossed_product(&s1, &s2, &self.braiding, variant)?;
        let mult = relative_multiplier_defect(&target, &self.f.mat)?;
        let mut prods = Vec::new();
        for a in s1.basis_mats() {
            let left = matmul(&inj.alpha(&a), &self.f.mat);
            for b in s2.basis_mats() {
                prods.push(matmul(&left, &inj.beta(&b)));
            }
        }
        let two = [self.l.clone(), self.l.clone()];
        let sandwich = OperatorSpan::from_ops(&two, &two, &prods);
        let dist = if sandwich.rank() == target.rank() { sandwich.projector_distance(&target)? } else { f64::INFINITY };
        Ok((mult, dist))
    }

    pub fn multiplier_theorem_check(&self, side: Side, tol: f64) -> Result<(bool, bool)> {
        let (m, d) = self.multiplier_defects(side)?;
        Ok((m < tol, d < tol))
    }

    pub fn bialgebra_certificate(&self, side: Side, tol: f64) -> Result<BialgebraCertificate> {
        let (p1, p2) = self.podles_distances(side)?;
        let coassoc = self.coassoc_check(side, tol)?;
        let (mult, dist) = self.multiplier_defects(side)?;
        Ok(BialgebraCertificate {
            podles_right: p1 < tol,
            podles_left: p2 < tol,
            podles_distance: p1.max(p2),
            coassoc_residual: coassoc,
            multiplier_ok: mult < tol,
            multiplier_defect: mult,
            span_equality_ok: dist < tol,
            span_distance: dist,
        })
    }

    pub fn full_certificate(&self, tol: f64) -> Result<Certificate> {
        Certificate::build(self, tol)
    }
}

/// F₂₃F₁₂ − F₁₂c₁₂F₂₃c⁻¹₁₂F₂₃ as a matrix on L⊗L⊗L.
pub fn pentagon_defect(f: &Mat, c: &Mat, n: usize) -> Mat {
    let id = eye(n);
    let f12 = kron(f, &id);
    let f23 = kron(&id, f);
    let c12 = kron(c, &id);
    let ci12 = kron(&c.adjoint(), &id);
    let lhs = matmul(&f23, &f12);
    let rhs = matmul(&f12, &matmul(&c12, &matmul(&f23, &matmul(&ci12, &f23))));
    lhs - rhs
}

/// One recorded check: `pass` is `value < tol` for residuals and
/// `value == target` for ranks.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub kind: CheckKind,
    pub value: f64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub target: Option<f64>,
    pub tol: f64,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub wall_time_s: Option<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CheckKind {
    Residual,
    Rank,
}

impl Check {
    pub fn residual(name: &str, value: f64, tol: f64) -> Check {
        Check { name: name.into(), kind: CheckKind::Residual, value, target: None, tol, pass: value < tol, wall_time_s: None }
    }

    pub fn rank(name: &str, value: usize, target: usize, tol: f64) -> Check {
        Check {
            name: name.into(),
            kind: CheckKind::Rank,
            value: value as f64,
            target: Some(target as f64),
            tol,
            pass: value == target,
            wall_time_s: None,
        }
    }

    /// Re-derive the pass flag from the recorded numbers.
    pub fn rederive(&self) -> bool {
        match self.kind {
            CheckKind::Residual => self.value < self.tol,
            CheckKind::Rank => Some(self.value) == self.target,
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Certificate {
    pub dim: usize,
    pub tol: f64,
    pub regularity: RegularityReport,
    pub goodness_kernel_dim: usize,
    pub braiding_regularity: BraidingRegularityReport,
    pub hat_bialgebra: BialgebraCertificate,
    pub left_bialgebra: BialgebraCertificate,
    pub checks: Vec<Check>,
    pub pass: bool,
}

impl Certificate {
    fn build(m: &MultUnitary, tol: f64) -> Result<Certificate> {
        let mut checks = Vec::new();
        let mut timed = |f: &mut dyn FnMut() -> Result<Vec<Check>>| -> Result<()> {
            let t = Instant::now();
            let mut cs = f()?;
            let dt = t.elapsed().as_secs_f64();
            for c in cs.iter_mut() {
                c.wall_time_s = Some(dt);
            }
            checks.extend(cs);
            Ok(())
        };
        let n = m.dim();
        let full = n * n;
        timed(&mut || Ok(vec![Check::residual("unitarity", m.unitarity_defect(), tol)]))?;
        timed(&mut || Ok(vec![Check::residual("pentagon", m.pentagon_residual()?, tol)]))?;
        let spaces = [m.l.clone()];
        timed(&mut || Ok(vec![Check::residual("braiding_hexagons", check_hexagons(&m.braiding, &spaces, tol)?.max_residual, tol)]))?;
        let mut breg = None;
        timed(&mut || {
            let r = braiding_regularity(&m.braiding, &m.l, &m.l)?;
            let cs = vec![
                Check::rank("braiding_right_rank", r.right_rank, r.full, tol),
                Check::rank("braiding_left_rank", r.left_rank, r.full, tol),
            ];
            breg = Some(r);
            Ok(cs)
        })?;
        let mut reg = None;
        timed(&mut || {
            let r = m.regularity_classify()?;
            let cs = vec![Check::rank("rank_c", r.rank_c, full, tol), Check::rank("rank_d", r.rank_d, full, tol)];
            reg = Some(r);
            Ok(cs)
        })?;
        let mut good = 0;
        timed(&mut || {
            good = m.goodness()?;
            Ok(vec![Check::rank("goodness_kernel_dim", good, 1, tol)])
        })?;
        timed(&mut || {
            let d = m.dual()?;
            Ok(vec![
                Check::residual("dual_pentagon", d.pentagon_residual()?, tol),
                Check::residual("dual_c_span_distance", d.c_span()?.projector_distance(&crate::spans::adjoint_span(&m.c_span()?))?, tol),
            ])
        })?;
        timed(&mut || {
            let ha = m.hat_a()?;
            Ok(vec![
                Check::residual("hat_a_algebra", algebra_defect(&ha)?, tol),
                Check::residual("hat_a_star", star_defect(&ha)?, tol),
                Check::rank("hat_a_nondegenerate", is_nondegenerate(&ha) as usize, 1, tol),
            ])
        })?;
        let mut certs = Vec::new();
        for (side, tag) in [(Side::Right, "hat"), (Side::Left, "left")] {
            timed(&mut || {
                let b = m.bialgebra_certificate(side, tol)?;
                let cs = vec![
                    Check::residual(&format!("{tag}_podles"), b.podles_distance, tol),
                    Check::residual(&format!("{tag}_coassoc"), b.coassoc_residual, tol),
                    Check::residual(&format!("{tag}_multiplier"), b.multiplier_defect, tol),
                    Check::residual(&format!("{tag}_sandwich_span"), b.span_distance, tol),
                ];
                certs.push(b);
                Ok(cs)
            })?;
        }
        let left_bialgebra = certs.pop().unwrap();
        let hat_bialgebra = certs.pop().unwrap();
        let pass = checks.iter().all(|c| c.pass);
        Ok(Certificate {
            dim: n,
            tol,
            regularity: reg.unwrap(),
            goodness_kernel_dim: good,
            braiding_regularity: breg.unwrap(),
            hat_bialgebra,
            left_bialgebra,
            checks,
            pass,
        })
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn strip_timings(&mut self) {
        for c in self.checks.iter_mut() {
            c.wall_time_s = None;
        }
    }
}
