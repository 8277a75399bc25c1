//! Example generators (finite groups, graded categories, group YD modules)
//! and the JSON bundle format.

use std::collections::BTreeMap;
use std::io;

use serde::{Deserialize, Serialize};

use crate::braidings::{Braiding, BraidingKind};
use crate::error::{Error, Result};
use crate::linalg::{c64, eye, Mat};
use crate::mult_unitary::MultUnitary;
use crate::tensor_core::{LegOperator, Space};
use crate::yd::{corep_residual, rep_residual, yd_residual, YdModule};

/// A finite group given by its Cayley table.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FiniteGroup {
    pub order: usize,
    pub table: Vec<Vec<usize>>,
    pub identity: usize,
}

impl FiniteGroup {
    pub fn new(table: Vec<Vec<usize>>, identity: usize) -> Result<FiniteGroup> {
        let g = FiniteGroup { order: table.len(), table, identity };
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.order;
        let bad = |m: String| Err(Error::InvalidGroup(m));
        if n == 0 || self.table.len() != n {
            return bad(format!("table has {} rows for order {n}", self.table.len()));
        }
        if self.identity >= n {
            return bad(format!("identity index {} out of range", self.identity));
        }
        for (i, row) in self.table.iter().enumerate() {
            if row.len() != n {
                return bad(format!("row {i} has length {}", row.len()));
            }
            if let Some(&x) = row.iter().find(|&&x| x >= n) {
                return bad(format!("entry {x} in row {i} out of range"));
            }
        }
        for g in 0..n {
            if self.table[self.identity][g] != g || self.table[g][self.identity] != g {
                return bad(format!("identity fails at {g}"));
            }
            if !(0..n).any(|h| self.table[g][h] == self.identity) {
                return bad(format!("{g} has no inverse"));
            }
        }
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    if self.table[self.table[a][b]][c] != self.table[a][self.table[b][c]] {
                        return bad(format!("associativity fails at ({a},{b},{c})"));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn mul(&self, g: usize, h: usize) -> usize {
        self.table[g][h]
    }

    pub fn inv(&self, g: usize) -> usize {
        (0..self.order).find(|&h| self.table[g][h] == self.identity).expect("validated group")
    }
}

pub fn cyclic_group(n: usize) -> FiniteGroup {
    assert!(n >= 1);
    let table = (0..n).map(|a| (0..n).map(|b| (a + b) % n).collect()).collect();
    FiniteGroup { order: n, table, identity: 0 }
}

/// S₃ with elements listed as permutations of {0,1,2} in lexicographic order.
pub fn symmetric_group3() -> FiniteGroup {
    let perms: Vec<[usize; 3]> = vec![[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];
    let index = |p: [usize; 3]| perms.iter().position(|q| *q == p).unwrap();
    let table = perms
        .iter()
        .map(|a| perms.iter().map(|b| index([a[b[0]], a[b[1]], a[b[2]]])).collect())
        .collect();
    FiniteGroup { order: 6, table, identity: 0 }
}

/// W(δ_g⊗δ_h) = δ_g⊗δ_{gh} on ℂ[G]⊗ℂ[G] with the flip braiding.
pub fn kac_takesaki(g: &FiniteGroup) -> MultUnitary {
    kac_takesaki_on(g, &Space::new("L", g.order))
}

pub fn kac_takesaki_on(g: &FiniteGroup, l: &Space) -> MultUnitary {
    let n = g.order;
    assert_eq!(l.dim, n);
    let mut m = Mat::zeros(n * n, n * n);
    for a in 0..n {
        for b in 0..n {
            m[(a * n + g.mul(a, b), a * n + b)] = c64(1.0, 0.0);
        }
    }
    MultUnitary::new(l.clone(), m, Braiding::flip()).expect("permutation matrix is unitary")
}

/// Graded spaces with the phase braiding q = exp(2πi/m); m = 1 is the flip.
pub fn graded_category(modulus: u32, specs: &[(&str, Vec<i64>)]) -> (Vec<Space>, Braiding) {
    let spaces = specs.iter().map(|(id, g)| Space::graded(id, g.clone())).collect();
    let b = if modulus <= 1 { Braiding::flip() } else { Braiding::phase(modulus) };
    (spaces, b)
}

/// ℂ^{p|q}: p even basis vectors followed by q odd ones.
pub fn super_space(id: &str, even: usize, odd: usize) -> Space {
    let mut g = vec![0; even];
    g.extend(std::iter::repeat_n(1, odd));
    Space::graded(id, g)
}

/// Control input: every pair of the given spaces braids by the identity
/// matrix. It is not a braiding; slices of the identity are scalars, so
/// nothing built on it is regular.
pub fn degenerate_braiding(spaces: &[Space]) -> Braiding {
    let mut t = BTreeMap::new();
    for a in spaces {
        for b in spaces {
            t.insert((a.id.clone(), b.id.clone()), eye(a.dim * b.dim));
        }
    }
    Braiding::explicit(t)
}

fn is_monomial_unitary(m: &Mat) -> bool {
    let n = m.nrows();
    if m.ncols() != n {
        return false;
    }
    (0..n).all(|j| {
        let nz: Vec<usize> = (0..n).filter(|&i| m[(i, j)].norm() > 1e-12).collect();
        nz.len() == 1 && (m[(nz[0], j)].norm() - 1.0).abs() < 1e-12
    }) && (0..n).all(|i| (0..n).filter(|&j| m[(i, j)].norm() > 1e-12).count() == 1)
}

/// YD module over the Kac-Takesaki unitary of `g` on the space `l`:
/// U(ξ⊗δ_h) = ξ⊗δ_{gh} for ξ of degree g, V(δ_g⊗ξ) = δ_g⊗(g·ξ).
pub fn group_yd_module(g: &FiniteGroup, l: &Space, h_id: &str, degrees: &[usize], action: &[Mat]) -> Result<YdModule> {
    let n = g.order;
    let d = degrees.len();
    if action.len() != n {
        return Err(Error::Invalid(format!("action lists {} matrices for a group of order {n}", action.len())));
    }
    if let Some(&x) = degrees.iter().find(|&&x| x >= n) {
        return Err(Error::Invalid(format!("degree {x} is not a group element")));
    }
    for (a, m) in action.iter().enumerate() {
        if m.shape() != (d, d) || !is_monomial_unitary(m) {
            return Err(Error::Invalid(format!("action of {a} must permute and phase basis vectors")));
        }
    }
    if crate::linalg::hs_norm(&(&action[g.identity] - eye(d))) > 1e-12 {
        return Err(Error::Invalid("identity must act trivially".into()));
    }
    for a in 0..n {
        for b in 0..n {
            if crate::linalg::hs_norm(&(&action[a] * &action[b] - &action[g.mul(a, b)])) > 1e-12 {
                return Err(Error::Invalid(format!("action is not multiplicative at ({a},{b})")));
            }
        }
    }
    for a in 0..n {
        for i in 0..d {
            let h = degrees[i];
            let target = g.mul(g.mul(a, h), g.inv(a));
            for j in 0..d {
                if action[a][(j, i)].norm() > 1e-12 && degrees[j] != target {
                    return Err(Error::YdCompatibility { g: a, h });
                }
            }
        }
    }
    let hs = Space::graded(h_id, degrees.iter().map(|&x| x as i64).collect());
    let mut u = Mat::zeros(d * n, d * n);
    for i in 0..d {
        for h in 0..n {
            u[(i * n + g.mul(degrees[i], h), i * n + h)] = c64(1.0, 0.0);
        }
    }
    let mut v = Mat::zeros(n * d, n * d);
    for a in 0..n {
        v.view_mut((a * d, a * d), (d, d)).copy_from(&action[a]);
    }
    let m = YdModule {
        h: hs.clone(),
        u: LegOperator::endo(vec![hs.clone(), l.clone()], u)?,
        v: LegOperator::endo(vec![l.clone(), hs], v)?,
    };
    let w = kac_takesaki_on(g, l);
    for (name, r) in [
        ("corep", corep_residual(&m.u, &w)?),
        ("rep", rep_residual(&m.v, &w)?),
        ("yd", yd_residual(&m, &w)?),
    ] {
        if r >= 1e-12 {
            return Err(Error::Residual { name: name.into(), value: r, tol: 1e-12 });
        }
    }
    Ok(m)
}

/// The ℤ₂ Kac-Takesaki unitary and the module ℂ² graded (0,1) on which the
/// generator acts by diag(1,−1).
pub fn z2_super_module() -> (MultUnitary, YdModule) {
    let g = cyclic_group(2);
    let w = kac_takesaki(&g);
    let act = vec![eye(2), Mat::from_diagonal(&nalgebra::DVector::from_vec(vec![c64(1.0, 0.0), c64(-1.0, 0.0)]))];
    let m = group_yd_module(&g, &w.l, "Lb", &[0, 1], &act).expect("valid module");
    (w, m)
}

// ---------------------------------------------------------------------------
// JSON bundles

pub const BUNDLE_VERSION: u64 = 1;

pub type MatrixDef = Vec<Vec<[f64; 2]>>;

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct SpaceDef {
    pub dim: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grading: Option<Vec<i64>>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub factors: Vec<String>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct TableEntry {
    pub first: String,
    pub second: String,
    pub matrix: MatrixDef,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum BraidingDef {
    Flip,
    Phase { modulus: u32 },
    Explicit { table: Vec<TableEntry> },
    Reversed { base: Box<BraidingDef> },
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct OperatorDef {
    pub domain: Vec<String>,
    pub codomain: Vec<String>,
    pub matrix: MatrixDef,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct Bundle {
    pub version: u64,
    pub spaces: BTreeMap<String, SpaceDef>,
    pub braiding: BraidingDef,
    #[serde(default)]
    pub operators: BTreeMap<String, OperatorDef>,
    #[serde(default)]
    pub groups: BTreeMap<String, FiniteGroup>,
}

fn schema(path: &str, msg: impl Into<String>) -> Error {
    Error::Schema { path: path.into(), msg: msg.into() }
}

pub fn matrix_to_def(m: &Mat) -> MatrixDef {
    (0..m.nrows()).map(|i| (0..m.ncols()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect()).collect()
}

fn matrix_from_def(d: &MatrixDef, path: &str) -> Result<Mat> {
    let rows = d.len();
    let cols = d.first().map(|r| r.len()).unwrap_or(0);
    if let Some((i, _)) = d.iter().enumerate().find(|(_, r)| r.len() != cols) {
        return Err(schema(&format!("{path}/{i}"), "ragged matrix row"));
    }
    Ok(Mat::from_fn(rows, cols, |i, j| c64(d[i][j][0], d[i][j][1])))
}

impl Bundle {
    pub fn new(braiding: &Braiding) -> Bundle {
        Bundle {
            version: BUNDLE_VERSION,
            spaces: BTreeMap::new(),
            braiding: braiding_to_def(braiding),
            operators: BTreeMap::new(),
            groups: BTreeMap::new(),
        }
    }

    pub fn add_space(&mut self, s: &Space) {
        for f in &s.factors {
            self.add_space(f);
        }
        let def = SpaceDef {
            dim: s.dim,
            grading: if s.is_composite() { None } else { s.grading.clone() },
            factors: s.factors.iter().map(|f| f.id.clone()).collect(),
        };
        self.spaces.insert(s.id.clone(), def);
    }

    pub fn add_operator(&mut self, name: &str, op: &LegOperator) {
        for s in op.dom.iter().chain(op.cod.iter()) {
            self.add_space(s);
        }
        self.operators.insert(
            name.into(),
            OperatorDef {
                domain: op.dom.iter().map(|s| s.id.clone()).collect(),
                codomain: op.cod.iter().map(|s| s.id.clone()).collect(),
                matrix: matrix_to_def(&op.mat),
            },
        );
    }

    pub fn space(&self, id: &str) -> Result<Space> {
        self.space_at(id, &format!("/spaces/{id}"), 0)
    }

    fn space_at(&self, id: &str, path: &str, depth: usize) -> Result<Space> {
        if depth > 16 {
            return Err(schema(path, "space factors nest too deeply"));
        }
        let def = self.spaces.get(id).ok_or_else(|| schema(path, format!("unknown space {id}")))?;
        if def.factors.is_empty() {
            Space::try_new(id, def.dim, def.grading.clone()).map_err(|e| schema(&format!("/spaces/{id}"), e.to_string()))
        } else {
            let fs = def
                .factors
                .iter()
                .enumerate()
                .map(|(i, f)| self.space_at(f, &format!("/spaces/{id}/factors/{i}"), depth + 1))
                .collect::<Result<Vec<_>>>()?;
            let s = Space::product_named(id, &fs);
            if s.dim != def.dim {
                return Err(schema(&format!("/spaces/{id}/dim"), "dim differs from the product of the factors"));
            }
            Ok(s)
        }
    }

    pub fn braiding(&self) -> Result<Braiding> {
        braiding_from_def(&self.braiding, "/braiding")
    }

    pub fn operator(&self, name: &str) -> Result<LegOperator> {
        let path = format!("/operators/{name}");
        let def = self.operators.get(name).ok_or_else(|| schema(&path, format!("unknown operator {name}")))?;
        let legs = |ids: &[String], key: &str| -> Result<Vec<Space>> {
            ids.iter().enumerate().map(|(i, s)| self.space_at(s, &format!("{path}/{key}/{i}"), 0)).collect()
        };
        let dom = legs(&def.domain, "domain")?;
        let cod = legs(&def.codomain, "codomain")?;
        let mat = matrix_from_def(&def.matrix, &format!("{path}/matrix"))?;
        LegOperator::new(dom, cod, mat).map_err(|e| schema(&format!("{path}/matrix"), e.to_string()))
    }

    /// An operator on X⊗X read as a multiplicative unitary on X.
    pub fn mult_unitary(&self, name: &str) -> Result<MultUnitary> {
        let op = self.operator(name)?;
        if op.dom.len() != 2 || op.dom != op.cod || op.dom[0] != op.dom[1] {
            return Err(schema(&format!("/operators/{name}/domain"), "expected an endomorphism of X⊗X"));
        }
        MultUnitary::new_unchecked(op.dom[0].clone(), op.mat, self.braiding()?)
    }

    pub fn group(&self, name: &str) -> Result<FiniteGroup> {
        let g = self.groups.get(name).ok_or_else(|| schema(&format!("/groups/{name}"), "unknown group"))?;
        g.validate().map_err(|e| schema(&format!("/groups/{name}"), e.to_string()))?;
        Ok(g.clone())
    }

    fn validate(&self) -> Result<()> {
        for id in self.spaces.keys() {
            self.space(id)?;
        }
        self.braiding()?;
        for name in self.operators.keys() {
            self.operator(name)?;
        }
        for name in self.groups.keys() {
            self.group(name)?;
        }
        Ok(())
    }

    pub fn to_json(&self) -> String {
        let mut out = Vec::new();
        let mut ser = serde_json::Serializer::with_formatter(&mut out, CanonicalFormatter::default());
        self.serialize(&mut ser).expect("bundle serializes");
        out.push(b'\n');
        String::from_utf8(out).expect("utf8")
    }

    pub fn from_json(text: &str) -> Result<Bundle> {
        let value: serde_json::Value = serde_json::from_str(text).map_err(|e| schema("", e.to_string()))?;
        match value.get("version") {
            None => return Err(schema("/version", "missing version")),
            Some(v) => match v.as_u64() {
                Some(BUNDLE_VERSION) => {}
                Some(other) => return Err(Error::UnsupportedVersion(other)),
                None => return Err(schema("/version", "version must be an integer")),
            },
        }
        let b: Bundle = serde_path_to_error::deserialize(value).map_err(|e| {
            let pointer = to_pointer(e.path());
            schema(&pointer, e.into_inner().to_string())
        })?;
        b.validate()?;
        Ok(b)
    }
}

fn to_pointer(path: &serde_path_to_error::Path) -> String {
    use serde_path_to_error::Segment;
    let mut s = String::new();
    for seg in path.iter() {
        match seg {
            Segment::Seq { index } => s.push_str(&format!("/{index}")),
            Segment::Map { key } => s.push_str(&format!("/{}", key.replace('~', "~0").replace('/', "~1"))),
            Segment::Enum { variant } => s.push_str(&format!("/{variant}")),
            Segment::Unknown => s.push_str("/?"),
        }
    }
    s
}

pub fn braiding_to_def(b: &Braiding) -> BraidingDef {
    match &b.kind {
        BraidingKind::Flip => BraidingDef::Flip,
        BraidingKind::Phase { modulus } => BraidingDef::Phase { modulus: *modulus },
        BraidingKind::Explicit { table } => BraidingDef::Explicit {
            table: table
                .iter()
                .map(|((a, b), m)| TableEntry { first: a.clone(), second: b.clone(), matrix: matrix_to_def(m) })
                .collect(),
        },
        BraidingKind::Reversed(base) => BraidingDef::Reversed { base: Box::new(braiding_to_def(base)) },
    }
}

fn braiding_from_def(d: &BraidingDef, path: &str) -> Result<Braiding> {
    Ok(match d {
        BraidingDef::Flip => Braiding::flip(),
        BraidingDef::Phase { modulus } => {
            if *modulus == 0 {
                return Err(schema(&format!("{path}/modulus"), "modulus must be positive"));
            }
            Braiding::phase(*modulus)
        }
        BraidingDef::Explicit { table } => {
            let mut t = BTreeMap::new();
            for (i, e) in table.iter().enumerate() {
                t.insert((e.first.clone(), e.second.clone()), matrix_from_def(&e.matrix, &format!("{path}/table/{i}/matrix"))?);
            }
            Braiding::explicit(t)
        }
        BraidingDef::Reversed { base } => braiding_from_def(base, &format!("{path}/base"))?.reversed(),
    })
}

/// Pretty JSON where arrays nested two or more deep (matrix rows, complex
/// pairs, Cayley rows) stay on one line, and floats print with 17
/// significant digits.
#[derive(Default)]
pub struct CanonicalFormatter {
    level: usize,
    arrays: Vec<bool>,
    objects: Vec<bool>,
}

impl CanonicalFormatter {
    fn indent<W: ?Sized + io::Write>(&self, w: &mut W) -> io::Result<()> {
        for _ in 0..self.level {
            w.write_all(b"  ")?;
        }
        Ok(())
    }

    fn compact(&self) -> bool {
        self.arrays.len() >= 2
    }
}

pub fn canonical_float(v: f64) -> String {
    let v = if v == 0.0 { 0.0 } else { v };
    format!("{v:.16e}")
}

impl serde_json::ser::Formatter for CanonicalFormatter {
    fn write_f64<W: ?Sized + io::Write>(&mut self, w: &mut W, value: f64) -> io::Result<()> {
        w.write_all(canonical_float(value).as_bytes())
    }

    fn write_f32<W: ?Sized + io::Write>(&mut self, w: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(w, value as f64)
    }

    fn begin_array<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.arrays.push(false);
        self.level += 1;
        w.write_all(b"[")
    }

    fn end_array<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.level -= 1;
        let compact = self.compact();
        let had = self.arrays.pop().unwrap_or(false);
        if had && !compact {
            w.write_all(b"\n")?;
            self.indent(w)?;
        }
        w.write_all(b"]")
    }

    fn begin_array_value<W: ?Sized + io::Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        if let Some(h) = self.arrays.last_mut() {
            *h = true;
        }
        if self.compact() {
            if !first {
                w.write_all(b",")?;
            }
            Ok(())
        } else {
            w.write_all(if first { b"\n" } else { b",\n" })?;
            self.indent(w)
        }
    }

    fn end_array_value<W: ?Sized + io::Write>(&mut self, _w: &mut W) -> io::Result<()> {
        Ok(())
    }

    fn begin_object<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.objects.push(false);
        self.level += 1;
        w.write_all(b"{")
    }

    fn end_object<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.level -= 1;
        if self.objects.pop().unwrap_or(false) {
            w.write_all(b"\n")?;
            self.indent(w)?;
        }
        w.write_all(b"}")
    }

    fn begin_object_key<W: ?Sized + io::Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        if let Some(h) = self.objects.last_mut() {
            *h = true;
        }
        w.write_all(if first { b"\n" } else { b",\n" })?;
        self.indent(w)
    }

    fn begin_object_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        w.write_all(b": ")
    }

    fn end_object_value<W: ?Sized + io::Write>(&mut self, _w: &mut W) -> io::Result<()> {
        Ok(())
    }
}

/// Serialize any value with the canonical formatter.
pub fn to_canonical_json<T: Serialize>(value: &T) -> String {
    let mut out = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut out, CanonicalFormatter::default());
    value.serialize(&mut ser).expect("value serializes");
    out.push(b'\n');
    String::from_utf8(out).expect("utf8")
}

/// Bundle holding the Kac-Takesaki unitary of `g` as operator "W" and the
/// group itself as "G".
pub fn kac_takesaki_bundle(g: &FiniteGroup) -> Bundle {
    let w = kac_takesaki(g);
    let mut b = Bundle::new(&w.braiding);
    b.add_operator("W", &w.f);
    b.groups.insert("G".into(), g.clone());
    b
}

/// The ℤ₂ Kac-Takesaki unitary "W" with the YD module of `z2_super_module`
/// as "U" (corepresentation) and "V" (representation).
pub fn z2_module_bundle() -> Bundle {
    let (w, m) = z2_super_module();
    let mut b = Bundle::new(&w.braiding);
    b.add_operator("W", &w.f);
    b.add_operator("U", &m.u);
    b.add_operator("V", &m.v);
    b.groups.insert("G".into(), cyclic_group(2));
    b
}

/// Super category ℂ^{p|q} with the identity unitary "F".
pub fn super_bundle(even: usize, odd: usize) -> Bundle {
    let l = super_space("L", even, odd);
    let mut b = Bundle::new(&Braiding::phase(2));
    b.add_operator("F", &LegOperator::identity(&[l.clone(), l]));
    b
}

/// The identity unitary under the degenerate control braiding.
pub fn identity_bundle(dim: usize) -> Bundle {
    let l = Space::new("L", dim);
    let mut b = Bundle::new(&degenerate_braiding(std::slice::from_ref(&l)));
    b.add_operator("F", &LegOperator::identity(&[l.clone(), l]));
    b
}
