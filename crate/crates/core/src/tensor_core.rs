//! Dense leg calculus: composition, tensoring, adjoints and placement of
//! operators on adjacent or braided-distant legs.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::braidings::Braiding;
use crate::error::{Error, Result};
use crate::linalg::{eye, hs_norm, is_unitary_mat, kron, matmul, Mat, Vector};

/// A finite-dimensional Hilbert space with an optional integer grading.
///
/// Composite spaces remember their factors so that braidings on them can be
/// assembled from the factor braidings.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Space {
    pub id: String,
    pub dim: usize,
    pub grading: Option<Vec<i64>>,
    pub factors: Vec<Space>,
}

impl Space {
    pub fn new(id: &str, dim: usize) -> Space {
        assert!(dim >= 1, "space dimension must be positive");
        Space { id: id.to_string(), dim, grading: None, factors: Vec::new() }
    }

    pub fn graded(id: &str, grading: Vec<i64>) -> Space {
        assert!(!grading.is_empty(), "space dimension must be positive");
        Space { id: id.to_string(), dim: grading.len(), grading: Some(grading), factors: Vec::new() }
    }

    pub fn try_new(id: &str, dim: usize, grading: Option<Vec<i64>>) -> Result<Space> {
        if dim == 0 {
            return Err(Error::Invalid(format!("space {id} has dimension 0")));
        }
        if let Some(g) = &grading {
            if g.len() != dim {
                return Err(Error::Invalid(format!(
                    "space {id}: grading length {} differs from dim {dim}",
                    g.len()
                )));
            }
        }
        Ok(Space { id: id.to_string(), dim, grading, factors: Vec::new() })
    }

    /// Tensor product space. Degrees add; the id lists the factor ids.
    pub fn product(factors: &[Space]) -> Space {
        let id = format!("({})", factors.iter().map(|s| s.id.as_str()).collect::<Vec<_>>().join(","));
        Self::product_named(&id, factors)
    }

    pub fn product_named(id: &str, factors: &[Space]) -> Space {
        assert!(!factors.is_empty());
        let dim = factors.iter().map(|s| s.dim).product();
        let grading = if factors.iter().all(|s| s.grading.is_some()) {
            let mut g = vec![0i64];
            for f in factors {
                let fg = f.grading.as_ref().unwrap();
                g = g.iter().flat_map(|a| fg.iter().map(move |b| a + b)).collect();
            }
            Some(g)
        } else {
            None
        };
        Space { id: id.to_string(), dim, grading, factors: factors.to_vec() }
    }

    pub fn is_composite(&self) -> bool {
        !self.factors.is_empty()
    }

    pub fn degree(&self, i: usize) -> Option<i64> {
        self.grading.as_ref().map(|g| g[i])
    }
}

impl fmt::Display for Space {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.id)
    }
}

pub fn total_dim(legs: &[Space]) -> usize {
    legs.iter().map(|s| s.dim).product()
}

fn leg_ids(legs: &[Space]) -> String {
    format!("[{}]", legs.iter().map(|s| s.id.as_str()).collect::<Vec<_>>().join(","))
}

/// Crossing convention for a leg that passes a strand in between.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Route {
    Over,
    Under,
}

impl Route {
    pub fn flipped(self) -> Route {
        match self {
            Route::Over => Route::Under,
            Route::Under => Route::Over,
        }
    }
}

/// A vector in the tensor product of the given legs.
#[derive(Clone, Debug)]
pub struct LegVector {
    pub legs: Vec<Space>,
    pub entries: Vector,
}

/// A matrix with ordered domain and codomain legs.
#[derive(Clone, Debug)]
pub struct LegOperator {
    pub dom: Vec<Space>,
    pub cod: Vec<Space>,
    pub mat: Mat,
}

impl LegOperator {
    pub fn new(dom: Vec<Space>, cod: Vec<Space>, mat: Mat) -> Result<LegOperator> {
        let (r, c) = mat.shape();
        if r != total_dim(&cod) || c != total_dim(&dom) {
            return Err(Error::Signature(format!(
                "matrix {r}x{c} does not fit {} -> {}",
                leg_ids(&dom),
                leg_ids(&cod)
            )));
        }
        Ok(LegOperator { dom, cod, mat })
    }

    pub fn endo(legs: Vec<Space>, mat: Mat) -> Result<LegOperator> {
        Self::new(legs.clone(), legs, mat)
    }

    pub fn identity(legs: &[Space]) -> LegOperator {
        let n = total_dim(legs);
        LegOperator { dom: legs.to_vec(), cod: legs.to_vec(), mat: eye(n) }
    }

    pub fn is_endo(&self) -> bool {
        self.dom == self.cod
    }

    /// Same matrix, new leg labels of matching total dimension.
    pub fn relabel(&self, dom: Vec<Space>, cod: Vec<Space>) -> Result<LegOperator> {
        Self::new(dom, cod, self.mat.clone())
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &LegOperator) -> Result<LegOperator> {
        compose(self, other)
    }

    pub fn adjoint(&self) -> LegOperator {
        adjoint(self)
    }
}

/// X·Y, defined when the codomain legs of Y are the domain legs of X.
pub fn compose(x: &LegOperator, y: &LegOperator) -> Result<LegOperator> {
    if y.cod != x.dom {
        return Err(Error::Signature(format!(
            "cannot compose: codomain {} vs domain {}",
            leg_ids(&y.cod),
            leg_ids(&x.dom)
        )));
    }
    Ok(LegOperator { dom: y.dom.clone(), cod: x.cod.clone(), mat: matmul(&x.mat, &y.mat) })
}

/// Compose a list top to bottom: `chain(&[a, b, c]) = a·b·c`.
pub fn chain(ops: &[&LegOperator]) -> Result<LegOperator> {
    let mut it = ops.iter().rev();
    let mut acc = (*it.next().expect("empty chain")).clone();
    for op in it {
        acc = compose(op, &acc)?;
    }
    Ok(acc)
}

pub fn tensor(x: &LegOperator, y: &LegOperator) -> LegOperator {
    let mut dom = x.dom.clone();
    dom.extend(y.dom.iter().cloned());
    let mut cod = x.cod.clone();
    cod.extend(y.cod.iter().cloned());
    LegOperator { dom, cod, mat: kron(&x.mat, &y.mat) }
}

pub fn adjoint(x: &LegOperator) -> LegOperator {
    LegOperator { dom: x.cod.clone(), cod: x.dom.clone(), mat: x.mat.adjoint() }
}

/// id ⊗ X ⊗ id with X placed on the contiguous legs starting at `start` (0-based).
pub fn embed_adjacent(x: &LegOperator, context: &[Space], start: usize) -> Result<LegOperator> {
    let n = x.dom.len();
    if start + n > context.len() {
        return Err(Error::Legs(format!(
            "{n} legs starting at {start} do not fit a context of {} legs",
            context.len()
        )));
    }
    if context[start..start + n] != x.dom[..] {
        return Err(Error::Legs(format!(
            "operator domain {} does not match context legs {}",
            leg_ids(&x.dom),
            leg_ids(&context[start..start + n])
        )));
    }
    let pre = total_dim(&context[..start]);
    let post = total_dim(&context[start + n..]);
    let mat = kron(&kron(&eye(pre), &x.mat), &eye(post));
    let mut cod = context[..start].to_vec();
    cod.extend(x.cod.iter().cloned());
    cod.extend(context[start + n..].iter().cloned());
    Ok(LegOperator { dom: context.to_vec(), cod, mat })
}

/// Braid leg `i` rightwards past legs `i+1..k`, ending just left of leg `k`.
/// Returns the unitary from `context` to the reordered context.
fn shift_right(context: &[Space], i: usize, k: usize, route: Route, braiding: &Braiding) -> Result<LegOperator> {
    let mut legs = context.to_vec();
    let mut acc = LegOperator::identity(context);
    for p in i..k - 1 {
        let a = legs[p].clone();
        let m = legs[p + 1].clone();
        let swap = match route {
            Route::Over => braiding.braid(&a, &m)?,
            Route::Under => adjoint(&braiding.braid(&m, &a)?),
        };
        let step = embed_adjacent(&swap, &legs, p)?;
        acc = compose(&step, &acc)?;
        legs.swap(p, p + 1);
    }
    Ok(acc)
}

/// Place a two-leg operator on legs `i < k` (0-based) of `context`, braiding
/// the first of them past the strands in between.
pub fn apply_distant(
    x: &LegOperator,
    context: &[Space],
    i: usize,
    k: usize,
    route: Route,
    braiding: &Braiding,
) -> Result<LegOperator> {
    if x.dom.len() != 2 || x.cod.len() != 2 {
        return Err(Error::Legs("apply_distant needs a two-leg operator".into()));
    }
    if i >= k || k >= context.len() {
        return Err(Error::Legs(format!("bad positions ({i},{k}) for {} legs", context.len())));
    }
    if context[i] != x.dom[0] || context[k] != x.dom[1] {
        return Err(Error::Legs(format!(
            "operator domain {} does not match legs ({},{})",
            leg_ids(&x.dom),
            context[i],
            context[k]
        )));
    }
    if k == i + 1 {
        return embed_adjacent(x, context, i);
    }
    let s_dom = shift_right(context, i, k, route, braiding)?;
    let mut cod_ctx = context.to_vec();
    cod_ctx[i] = x.cod[0].clone();
    cod_ctx[k] = x.cod[1].clone();
    let s_cod = shift_right(&cod_ctx, i, k, route, braiding)?;
    let inner = embed_adjacent(x, &s_dom.cod, k - 1)?;
    let mid = compose(&inner, &s_dom)?;
    compose(&adjoint(&s_cod), &mid)
}

/// Best Hilbert-Schmidt approximation of `y` by `apply_distant(z, ...)`
/// together with the residual norm.
pub fn extract_distant(
    y: &LegOperator,
    context: &[Space],
    i: usize,
    k: usize,
    route: Route,
    braiding: &Braiding,
) -> Result<(LegOperator, f64)> {
    if y.dom != context || y.cod != context {
        return Err(Error::Legs("extract_distant needs an endomorphism of the context".into()));
    }
    if i >= k || k >= context.len() {
        return Err(Error::Legs(format!("bad positions ({i},{k}) for {} legs", context.len())));
    }
    let s = shift_right(context, i, k, route, braiding)?;
    let t = matmul(&matmul(&s.mat, &y.mat), &s.mat.adjoint());
    let moved = &s.cod;
    let pre = total_dim(&moved[..k - 1]);
    let mid = moved[k - 1].dim * moved[k].dim;
    let post = total_dim(&moved[k + 1..]);
    let mut z = Mat::zeros(mid, mid);
    for a in 0..pre {
        for b in 0..post {
            for r in 0..mid {
                for c in 0..mid {
                    z[(r, c)] += t[((a * mid + r) * post + b, (a * mid + c) * post + b)];
                }
            }
        }
    }
    z /= crate::linalg::c64((pre * post) as f64, 0.0);
    let approx = kron(&kron(&eye(pre), &z), &eye(post));
    let residual = hs_norm(&(t - approx));
    let legs = vec![context[i].clone(), context[k].clone()];
    Ok((LegOperator::endo(legs, z)?, residual))
}

pub fn is_unitary(x: &LegOperator, tol: f64) -> Result<bool> {
    if x.mat.nrows() != x.mat.ncols() {
        return Err(Error::Signature("is_unitary needs a square operator".into()));
    }
    Ok(is_unitary_mat(&x.mat, tol))
}
