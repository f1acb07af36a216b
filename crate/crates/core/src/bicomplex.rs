//! Double and triple complexes, total complexes, Cartan–Eilenberg resolutions and lifts of chain
//! maps to them.
//!
//! A double complex has entries `X^{i,j}` for `i < rows`, `j < cols`, a horizontal differential
//! `d : X^{i,j} → X^{i,j+1}` and a vertical differential `δ : X^{i,j} → X^{i+1,j}` with
//! `dδ = δd`. The first index is the row index. In the total complex the entry `X^{i,j}`
//! contributes `(−1)^i d` and `(−1)^i δ`.

use crate::algebra::{FdAlgebra, FdModule};
use crate::complexes::{CochainComplex, ComplexError, ComplexMap};
use crate::injective::{extend_along_mono, horseshoe, injective_resolution, InjRes, InjResProvider, InjectiveModule, ResolutionError};
use crate::linalg::{solve, FieldSpec, FpMatrix, Subquotient, Subspace};
use std::sync::Arc;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum BicomplexError {
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("differentials fail {0} at ({1}, {2})")]
    NotDoubleComplex(&'static str, usize, usize),
    #[error("map does not commute with {0} at ({1}, {2})")]
    NotMap(&'static str, usize, usize),
    #[error("total differential does not square to zero")]
    SignCheckFailed,
    #[error(transparent)]
    Complex(#[from] ComplexError),
    #[error(transparent)]
    Resolution(#[from] ResolutionError),
    #[error("CE-resolution check failed: {0}")]
    Invalid(String),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DoubleComplex {
    field: FieldSpec,
    rows: usize,
    cols: usize,
    dims: Vec<Vec<usize>>,
    d: Vec<Vec<FpMatrix>>,
    delta: Vec<Vec<FpMatrix>>,
    modules: Option<Vec<Vec<FdModule>>>,
    trusted: Option<i64>,
}

fn sign(k: usize) -> i64 {
    if k.is_multiple_of(2) {
        1
    } else {
        -1
    }
}

impl DoubleComplex {
    /// Builds from closures giving entry dimensions and the two differentials; maps leaving the
    /// window are ignored.
    pub fn from_fn(
        field: FieldSpec,
        rows: usize,
        cols: usize,
        dim: impl Fn(usize, usize) -> usize,
        d: impl Fn(usize, usize) -> FpMatrix,
        delta: impl Fn(usize, usize) -> FpMatrix,
    ) -> Result<Self, BicomplexError> {
        let dims: Vec<Vec<usize>> = (0..rows).map(|i| (0..cols).map(|j| dim(i, j)).collect()).collect();
        let at = |i: usize, j: usize| if i < rows && j < cols { dims[i][j] } else { 0 };
        let mut dd = vec![];
        let mut de = vec![];
        for i in 0..rows {
            let mut rd = vec![];
            let mut rde = vec![];
            for j in 0..cols {
                rd.push(if j + 1 < cols && at(i, j) > 0 && at(i, j + 1) > 0 {
                    d(i, j)
                } else {
                    FpMatrix::zeros(field, at(i, j), at(i, j + 1))
                });
                rde.push(if i + 1 < rows && at(i, j) > 0 && at(i + 1, j) > 0 {
                    delta(i, j)
                } else {
                    FpMatrix::zeros(field, at(i, j), at(i + 1, j))
                });
            }
            dd.push(rd);
            de.push(rde);
        }
        let x = Self { field, rows, cols, dims, d: dd, delta: de, modules: None, trusted: None };
        x.validate()?;
        Ok(x)
    }

    /// Attaches module structures and checks that both differentials are module maps.
    pub fn with_modules(mut self, modules: Vec<Vec<FdModule>>) -> Result<Self, BicomplexError> {
        for i in 0..self.rows {
            for j in 0..self.cols {
                if modules[i][j].dim() != self.dims[i][j] {
                    return Err(BicomplexError::Shape(format!("module at ({i}, {j})")));
                }
            }
        }
        for i in 0..self.rows {
            for j in 0..self.cols {
                if j + 1 < self.cols && !modules[i][j].intertwines(&modules[i][j + 1], &self.d[i][j]) {
                    return Err(BicomplexError::NotDoubleComplex("d linearity", i, j));
                }
                if i + 1 < self.rows && !modules[i][j].intertwines(&modules[i + 1][j], &self.delta[i][j]) {
                    return Err(BicomplexError::NotDoubleComplex("δ linearity", i, j));
                }
            }
        }
        self.modules = Some(modules);
        Ok(self)
    }

    /// Total homology is trusted through degree `t`.
    pub fn with_trusted(mut self, t: Option<i64>) -> Self {
        self.trusted = t;
        self
    }

    pub fn trusted(&self) -> Option<i64> {
        self.trusted
    }

    fn validate(&self) -> Result<(), BicomplexError> {
        for i in 0..self.rows {
            for j in 0..self.cols {
                let (d, de) = (&self.d[i][j], &self.delta[i][j]);
                if d.shape() != (self.dim(i, j), self.dim(i, j + 1)) || de.shape() != (self.dim(i, j), self.dim(i + 1, j)) {
                    return Err(BicomplexError::Shape(format!("differential at ({i}, {j})")));
                }
                if !(d * &self.d(i, j + 1)).is_zero() {
                    return Err(BicomplexError::NotDoubleComplex("dd = 0", i, j));
                }
                if !(de * &self.delta(i + 1, j)).is_zero() {
                    return Err(BicomplexError::NotDoubleComplex("δδ = 0", i, j));
                }
                if d * &self.delta(i, j + 1) != de * &self.d(i + 1, j) {
                    return Err(BicomplexError::NotDoubleComplex("dδ = δd", i, j));
                }
            }
        }
        Ok(())
    }

    pub fn field(&self) -> FieldSpec {
        self.field
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn dim(&self, i: usize, j: usize) -> usize {
        if i < self.rows && j < self.cols {
            self.dims[i][j]
        } else {
            0
        }
    }

    /// `d : X^{i,j} → X^{i,j+1}`.
    pub fn d(&self, i: usize, j: usize) -> FpMatrix {
        if i < self.rows && j < self.cols {
            self.d[i][j].clone()
        } else {
            FpMatrix::zeros(self.field, self.dim(i, j), self.dim(i, j + 1))
        }
    }

    /// `δ : X^{i,j} → X^{i+1,j}`.
    pub fn delta(&self, i: usize, j: usize) -> FpMatrix {
        if i < self.rows && j < self.cols {
            self.delta[i][j].clone()
        } else {
            FpMatrix::zeros(self.field, self.dim(i, j), self.dim(i + 1, j))
        }
    }

    pub fn module(&self, i: usize, j: usize) -> Option<&FdModule> {
        self.modules.as_ref().and_then(|m| m.get(i).and_then(|r| r.get(j)))
    }

    pub fn has_modules(&self) -> bool {
        self.modules.is_some()
    }

    pub fn modules(&self) -> Option<&[Vec<FdModule>]> {
        self.modules.as_deref()
    }

    pub fn algebra(&self) -> Option<Arc<FdAlgebra>> {
        self.modules.as_ref().map(|m| m[0][0].algebra().clone())
    }

    /// Highest total degree with a nonzero position in the window.
    pub fn max_total(&self) -> usize {
        (self.rows + self.cols).saturating_sub(2)
    }

    /// Entries `(i, j, offset)` of `(tX)^n` in increasing `i`.
    pub fn total_layout(&self, n: usize) -> Vec<(usize, usize, usize)> {
        let mut out = vec![];
        let mut off = 0;
        for i in 0..=n.min(self.rows.saturating_sub(1)) {
            let j = n - i;
            if j < self.cols {
                out.push((i, j, off));
                off += self.dims[i][j];
            }
        }
        out
    }

    pub fn total_dim(&self, n: usize) -> usize {
        self.total_layout(n).iter().map(|&(i, j, _)| self.dims[i][j]).sum()
    }

    /// The total complex with the alternating row signs.
    pub fn total(&self) -> Result<CochainComplex, BicomplexError> {
        if self.rows == 0 || self.cols == 0 {
            return Ok(CochainComplex::zero(self.field));
        }
        let top = self.max_total();
        let f = self.field;
        let dims: Vec<usize> = (0..=top).map(|n| self.total_dim(n)).collect();
        let mut diffs = vec![];
        for n in 0..top {
            let mut m = FpMatrix::zeros(f, dims[n], dims[n + 1]);
            let next = self.total_layout(n + 1);
            let off_of = |i: usize, j: usize| next.iter().find(|e| e.0 == i && e.1 == j).map(|e| e.2);
            for &(i, j, off) in &self.total_layout(n) {
                let s = sign(i);
                if let Some(o) = off_of(i, j + 1) {
                    m.set_block(off, o, &self.d[i][j].signed(if s < 0 { 1 } else { 0 }));
                }
                if let Some(o) = off_of(i + 1, j) {
                    m.set_block(off, o, &self.delta[i][j].signed(if s < 0 { 1 } else { 0 }));
                }
            }
            diffs.push(m);
        }
        let x = match &self.modules {
            None => CochainComplex::new(f, 0, dims, diffs),
            Some(ms) => {
                let alg = ms[0][0].algebra().clone();
                let mods = (0..=top)
                    .map(|n| {
                        let parts: Vec<&FdModule> = self.total_layout(n).iter().map(|&(i, j, _)| &ms[i][j]).collect();
                        if parts.is_empty() {
                            FdModule::zero(alg.clone())
                        } else {
                            FdModule::direct_sum(&parts).expect("same algebra")
                        }
                    })
                    .collect();
                CochainComplex::from_modules(0, mods, diffs)
            }
        }
        .map_err(|e| match e {
            ComplexError::NotComplex(_) => BicomplexError::SignCheckFailed,
            other => other.into(),
        })?;
        Ok(x.with_exact_through(self.trusted))
    }

    /// Row `i` as a complex in the second index.
    pub fn row(&self, i: usize) -> CochainComplex {
        let dims = (0..self.cols).map(|j| self.dim(i, j)).collect();
        let diffs = (0..self.cols.saturating_sub(1)).map(|j| self.d(i, j)).collect();
        CochainComplex::new(self.field, 0, dims, diffs).expect("rows of a double complex are complexes")
    }

    /// Column `j` as a complex in the first index.
    pub fn column(&self, j: usize) -> CochainComplex {
        let dims = (0..self.rows).map(|i| self.dim(i, j)).collect();
        let diffs = (0..self.rows.saturating_sub(1)).map(|i| self.delta(i, j)).collect();
        CochainComplex::new(self.field, 0, dims, diffs).expect("columns of a double complex are complexes")
    }

    /// The complex `i ↦ H^ℓ(X^{i,*})` with the maps induced by `δ`.
    pub fn row_homology_complex(&self, l: usize) -> (CochainComplex, Vec<Subquotient>) {
        let hs: Vec<Subquotient> = (0..self.rows).map(|i| self.row(i).homology(l as i64).quotient).collect();
        let dims = hs.iter().map(|h| h.dim()).collect();
        let diffs = (0..self.rows.saturating_sub(1))
            .map(|i| hs[i].induced(&self.delta(i, l), &hs[i + 1]).expect("δ is a map of rows"))
            .collect();
        (CochainComplex::new(self.field, 0, dims, diffs).expect("induced maps compose to zero"), hs)
    }

    /// `Conc₂ U`: `U` as row 0.
    pub fn conc2(u: &CochainComplex) -> Result<Self, BicomplexError> {
        Self::concentrated(u, false)
    }

    /// `Conc₁ U`: `U` as column 0.
    pub fn conc1(u: &CochainComplex) -> Result<Self, BicomplexError> {
        Self::concentrated(u, true)
    }

    fn concentrated(u: &CochainComplex, column: bool) -> Result<Self, BicomplexError> {
        if u.lo() < 0 {
            return Err(BicomplexError::Shape("concentration needs a complex in degrees ≥ 0".into()));
        }
        let n = (u.hi() + 1).max(1) as usize;
        let (rows, cols) = if column { (n, 1) } else { (1, n) };
        let f = u.field();
        let pos = |i: usize, j: usize| if column { i } else { j } as i64;
        let x = Self::from_fn(
            f,
            rows,
            cols,
            |i, j| u.dim(pos(i, j)),
            |i, j| if column { FpMatrix::zeros(f, 0, 0) } else { u.diff(pos(i, j)) },
            |i, j| if column { u.diff(pos(i, j)) } else { FpMatrix::zeros(f, 0, 0) },
        )?;
        let x = match u.modules() {
            None => x,
            Some(_) => {
                let ms = (0..rows).map(|i| (0..cols).map(|j| u.module(pos(i, j)).unwrap().clone()).collect()).collect();
                x.with_modules(ms)?
            }
        };
        Ok(x.with_trusted(u.exact_through()))
    }

    /// The isomorphism `U → t Conc₁ U` with component `(−1)^{n(n−1)/2}` in degree `n`.
    pub fn conc1_sign_iso(u: &CochainComplex) -> Result<ComplexMap, BicomplexError> {
        let t = Self::conc1(u)?.total()?;
        let f = u.field();
        let comps = (0..=u.hi().max(0)).map(|n| FpMatrix::identity(f, u.dim(n)).signed(n * (n - 1) / 2)).collect();
        Ok(ComplexMap::new(Arc::new(u.clone()), Arc::new(t), 0, comps)?)
    }

    /// The window restricted to `i + j ≤ n`, a quotient double complex.
    pub fn truncate_total(&self, n: usize) -> Self {
        let f = self.field;
        let keep = |i: usize, j: usize| i + j <= n;
        let mut x = Self::from_fn(
            f,
            self.rows.min(n + 1),
            self.cols.min(n + 1),
            |i, j| if keep(i, j) { self.dim(i, j) } else { 0 },
            |i, j| self.d(i, j),
            |i, j| self.delta(i, j),
        )
        .expect("quotient of a double complex");
        if let Some(ms) = &self.modules {
            let alg = ms[0][0].algebra().clone();
            let mods = (0..x.rows)
                .map(|i| (0..x.cols).map(|j| if keep(i, j) { ms[i][j].clone() } else { FdModule::zero(alg.clone()) }).collect())
                .collect();
            x = x.with_modules(mods).expect("restriction keeps module maps");
        }
        let t = self.trusted.map_or(n as i64 - 1, |t| t.min(n as i64 - 1));
        x.with_trusted(Some(t))
    }
}

/// A map of double complexes, zero outside the source window.
#[derive(Clone, Debug)]
pub struct DoubleComplexMap {
    pub src: Arc<DoubleComplex>,
    pub tgt: Arc<DoubleComplex>,
    comps: Vec<Vec<FpMatrix>>,
}

impl DoubleComplexMap {
    pub fn from_fn(src: Arc<DoubleComplex>, tgt: Arc<DoubleComplex>, comp: impl Fn(usize, usize) -> FpMatrix) -> Result<Self, BicomplexError> {
        let f = src.field();
        let comps: Vec<Vec<FpMatrix>> = (0..src.rows())
            .map(|i| {
                (0..src.cols())
                    .map(|j| if src.dim(i, j) > 0 && tgt.dim(i, j) > 0 { comp(i, j) } else { FpMatrix::zeros(f, src.dim(i, j), tgt.dim(i, j)) })
                    .collect()
            })
            .collect();
        let m = Self { src, tgt, comps };
        m.validate()?;
        Ok(m)
    }

    pub fn identity(x: Arc<DoubleComplex>) -> Self {
        let f = x.field();
        let comps = (0..x.rows()).map(|i| (0..x.cols()).map(|j| FpMatrix::identity(f, x.dim(i, j))).collect()).collect();
        Self { src: x.clone(), tgt: x, comps }
    }

    fn validate(&self) -> Result<(), BicomplexError> {
        for i in 0..self.src.rows() {
            for j in 0..self.src.cols() {
                let c = &self.comps[i][j];
                if c.shape() != (self.src.dim(i, j), self.tgt.dim(i, j)) {
                    return Err(BicomplexError::Shape(format!("map component at ({i}, {j})")));
                }
                if &self.src.d(i, j) * &self.comp(i, j + 1) != c * &self.tgt.d(i, j) {
                    return Err(BicomplexError::NotMap("d", i, j));
                }
                if &self.src.delta(i, j) * &self.comp(i + 1, j) != c * &self.tgt.delta(i, j) {
                    return Err(BicomplexError::NotMap("δ", i, j));
                }
            }
        }
        Ok(())
    }

    pub fn comp(&self, i: usize, j: usize) -> FpMatrix {
        if i < self.src.rows() && j < self.src.cols() {
            self.comps[i][j].clone()
        } else {
            FpMatrix::zeros(self.src.field(), self.src.dim(i, j), self.tgt.dim(i, j))
        }
    }

    pub fn compose(&self, then: &DoubleComplexMap) -> Result<DoubleComplexMap, BicomplexError> {
        DoubleComplexMap::from_fn(self.src.clone(), then.tgt.clone(), |i, j| &self.comp(i, j) * &then.comp(i, j))
    }

    /// Block-diagonal map of total complexes.
    pub fn total(&self, src_total: Arc<CochainComplex>, tgt_total: Arc<CochainComplex>) -> Result<ComplexMap, BicomplexError> {
        let f = self.src.field();
        let top = self.src.max_total();
        let comps = (0..=top)
            .map(|n| {
                let mut m = FpMatrix::zeros(f, self.src.total_dim(n), self.tgt.total_dim(n));
                let tl = self.tgt.total_layout(n);
                for &(i, j, off) in &self.src.total_layout(n) {
                    if let Some(&(_, _, o)) = tl.iter().find(|e| e.0 == i && e.1 == j) {
                        m.set_block(off, o, &self.comps[i][j]);
                    }
                }
                m
            })
            .collect();
        Ok(ComplexMap::new(src_total, tgt_total, 0, comps)?)
    }
}

/// Entries `Y^{a,b,c}` with three pairwise commuting differentials raising `a`, `b`, `c`.
#[derive(Clone, Debug)]
pub struct TripleComplex {
    field: FieldSpec,
    shape: [usize; 3],
    dims: Vec<Vec<Vec<usize>>>,
    diffs: [Vec<Vec<Vec<FpMatrix>>>; 3],
    modules: Option<Vec<Vec<Vec<FdModule>>>>,
    trusted: Option<i64>,
}

impl TripleComplex {
    /// `diff(axis, a, b, c)` is the differential out of `Y^{a,b,c}` along `axis`.
    pub fn from_fn(
        field: FieldSpec,
        shape: [usize; 3],
        dim: impl Fn(usize, usize, usize) -> usize,
        diff: impl Fn(usize, usize, usize, usize) -> FpMatrix,
    ) -> Result<Self, BicomplexError> {
        let [n1, n2, n3] = shape;
        let dims: Vec<Vec<Vec<usize>>> = (0..n1).map(|a| (0..n2).map(|b| (0..n3).map(|c| dim(a, b, c)).collect()).collect()).collect();
        let at = |p: [usize; 3]| if p[0] < n1 && p[1] < n2 && p[2] < n3 { dims[p[0]][p[1]][p[2]] } else { 0 };
        let build = |axis: usize| -> Vec<Vec<Vec<FpMatrix>>> {
            (0..n1)
                .map(|a| {
                    (0..n2)
                        .map(|b| {
                            (0..n3)
                                .map(|c| {
                                    let mut q = [a, b, c];
                                    q[axis] += 1;
                                    if at([a, b, c]) > 0 && at(q) > 0 {
                                        diff(axis, a, b, c)
                                    } else {
                                        FpMatrix::zeros(field, at([a, b, c]), at(q))
                                    }
                                })
                                .collect()
                        })
                        .collect()
                })
                .collect()
        };
        let diffs = [build(0), build(1), build(2)];
        let y = Self { field, shape, dims, diffs, modules: None, trusted: None };
        y.validate()?;
        Ok(y)
    }

    pub fn with_modules(mut self, modules: Vec<Vec<Vec<FdModule>>>) -> Result<Self, BicomplexError> {
        for a in 0..self.shape[0] {
            for b in 0..self.shape[1] {
                for c in 0..self.shape[2] {
                    if modules[a][b][c].dim() != self.dims[a][b][c] {
                        return Err(BicomplexError::Shape(format!("module at ({a}, {b}, {c})")));
                    }
                }
            }
        }
        self.modules = Some(modules);
        Ok(self)
    }

    pub fn with_trusted(mut self, t: Option<i64>) -> Self {
        self.trusted = t;
        self
    }

    pub fn shape(&self) -> [usize; 3] {
        self.shape
    }

    pub fn dim(&self, a: usize, b: usize, c: usize) -> usize {
        let [n1, n2, n3] = self.shape;
        if a < n1 && b < n2 && c < n3 {
            self.dims[a][b][c]
        } else {
            0
        }
    }

    pub fn diff(&self, axis: usize, a: usize, b: usize, c: usize) -> FpMatrix {
        let [n1, n2, n3] = self.shape;
        if a < n1 && b < n2 && c < n3 {
            self.diffs[axis][a][b][c].clone()
        } else {
            let mut q = [a, b, c];
            q[axis] += 1;
            FpMatrix::zeros(self.field, self.dim(a, b, c), self.dim(q[0], q[1], q[2]))
        }
    }

    fn validate(&self) -> Result<(), BicomplexError> {
        let [n1, n2, n3] = self.shape;
        for a in 0..n1 {
            for b in 0..n2 {
                for c in 0..n3 {
                    let p = [a, b, c];
                    for x in 0..3 {
                        let mut q = p;
                        q[x] += 1;
                        let dx = self.diff(x, a, b, c);
                        if !(&dx * &self.diff(x, q[0], q[1], q[2])).is_zero() {
                            return Err(BicomplexError::NotDoubleComplex("squares to zero", a, b));
                        }
                        for y in x + 1..3 {
                            let mut r = p;
                            r[y] += 1;
                            let dy = self.diff(y, a, b, c);
                            if &dx * &self.diff(y, q[0], q[1], q[2]) != &dy * &self.diff(x, r[0], r[1], r[2]) {
                                return Err(BicomplexError::NotDoubleComplex("pairwise commutation", a, b));
                            }
                        }
                    }
                }
            }
        }
        Ok(())
    }

    /// `(t₁,₂Y)^{k,ℓ} = ⊕_{a+b=k} Y^{a,b,ℓ}` ordered by increasing `a`; the vertical differential
    /// is the total differential of the `(a, b)`-planes, the horizontal one is induced by `d3`.
    pub fn t12(&self) -> Result<DoubleComplex, BicomplexError> {
        let [n1, n2, n3] = self.shape;
        let f = self.field;
        let rows = (n1 + n2).saturating_sub(1);
        let layout = |k: usize| -> Vec<(usize, usize, usize)> {
            let mut out = vec![];
            let mut off = 0;
            for a in 0..=k.min(n1.saturating_sub(1)) {
                let b = k - a;
                if b < n2 {
                    out.push((a, b, off));
                    off += 0;
                }
            }
            out
        };
        let layout_dims = |k: usize, l: usize| -> Vec<(usize, usize, usize)> {
            let mut off = 0;
            layout(k)
                .into_iter()
                .map(|(a, b, _)| {
                    let e = (a, b, off);
                    off += self.dim(a, b, l);
                    e
                })
                .collect()
        };
        let dim = |k: usize, l: usize| layout_dims(k, l).iter().map(|&(a, b, _)| self.dim(a, b, l)).sum();
        let vert = |k: usize, l: usize| {
            let src = layout_dims(k, l);
            let tgt = layout_dims(k + 1, l);
            let mut m = FpMatrix::zeros(f, dim(k, l), dim(k + 1, l));
            for &(a, b, off) in &src {
                let s = if a % 2 == 0 { 0 } else { 1 };
                if let Some(&(_, _, o)) = tgt.iter().find(|e| e.0 == a && e.1 == b + 1) {
                    m.set_block(off, o, &self.diff(1, a, b, l).signed(s));
                }
                if let Some(&(_, _, o)) = tgt.iter().find(|e| e.0 == a + 1 && e.1 == b) {
                    m.set_block(off, o, &self.diff(0, a, b, l).signed(s));
                }
            }
            m
        };
        let horiz = |k: usize, l: usize| {
            let src = layout_dims(k, l);
            let tgt = layout_dims(k, l + 1);
            let mut m = FpMatrix::zeros(f, dim(k, l), dim(k, l + 1));
            for (&(a, b, off), &(_, _, o)) in src.iter().zip(&tgt) {
                m.set_block(off, o, &self.diff(2, a, b, l));
            }
            m
        };
        let x = DoubleComplex::from_fn(f, rows, n3, dim, horiz, vert)?;
        let x = match &self.modules {
            None => x,
            Some(ms) => {
                let alg = ms[0][0][0].algebra().clone();
                let mods = (0..rows)
                    .map(|k| {
                        (0..n3)
                            .map(|l| {
                                let parts: Vec<&FdModule> = layout(k).iter().map(|&(a, b, _)| &ms[a][b][l]).collect();
                                if parts.is_empty() {
                                    FdModule::zero(alg.clone())
                                } else {
                                    FdModule::direct_sum(&parts).expect("same algebra")
                                }
                            })
                            .collect()
                    })
                    .collect();
                x.with_modules(mods)?
            }
        };
        Ok(x.with_trusted(self.trusted))
    }

    /// Offsets of `Y^{a,b,ℓ}` inside `(t₁,₂Y)^{a+b,ℓ}`.
    pub fn t12_offset(&self, a: usize, b: usize, l: usize) -> usize {
        let k = a + b;
        (0..a).filter(|&a2| k - a2 < self.shape[1]).map(|a2| self.dim(a2, k - a2, l)).sum()
    }
}

/// A CE-resolution `J` of a complex `X`: rows are resolution degrees, columns are positions in
/// `X`. Each entry is `I_B^{i,k} ⊕ I_H^{i,k} ⊕ I_B^{i,k+1}`, the horizontal differential is the
/// identity from the last summand to the first summand of the next column, and only entries with
/// `i + k ≤ bound` are kept.
#[derive(Clone, Debug)]
pub struct CEResolution {
    pub carrier: Arc<DoubleComplex>,
    pub resolved: Arc<CochainComplex>,
    /// `X^k → J^{0,k}`.
    pub augmentation: Vec<FpMatrix>,
    pub bound: usize,
    res_b: Vec<InjRes>,
    res_h: Vec<InjRes>,
    columns: Vec<InjRes>,
}

struct ColumnData {
    x: FdModule,
    b: Subspace,
    z: Subspace,
}

impl CEResolution {
    pub fn column(&self, k: usize) -> &InjRes {
        &self.columns[k]
    }

    /// The three summands `(I_B^{i,k}, I_H^{i,k}, I_B^{i,k+1})` of `J^{i,k}`.
    pub fn blocks(&self, i: usize, k: usize) -> [&InjectiveModule; 3] {
        [&self.res_b[k].entries[i], &self.res_h[k].entries[i], &self.res_b[k + 1].entries[i]]
    }

    /// Checks that for every column `ℓ` the rowwise `B^ℓ`, `Z^ℓ`, `H^ℓ` form resolutions of
    /// `B^ℓX`, `Z^ℓX`, `H^ℓX` along the first index, below the truncation.
    pub fn validate(&self) -> Result<(), BicomplexError> {
        let j = &self.carrier;
        let x = &self.resolved;
        for l in 0..=self.bound {
            let last = self.bound - l;
            if last == 0 {
                continue;
            }
            let rows: Vec<usize> = (0..last).collect();
            let bs: Vec<Subspace> = rows
                .iter()
                .map(|&i| if l > 0 { Subspace::from_rows(&j.d(i, l - 1)) } else { Subspace::zero(j.field(), j.dim(i, l)) })
                .collect();
            let zs: Vec<Subspace> = rows.iter().map(|&i| crate::linalg::kernel_basis(&j.d(i, l))).collect();
            let aug = &self.augmentation[l];
            let xb = x.boundaries(l as i64);
            let xz = x.cycles(l as i64);
            check_resolves(&xb, &bs, aug, |i| j.delta(i, l), "B")?;
            check_resolves(&xz, &zs, aug, |i| j.delta(i, l), "Z")?;
            let hx = Subquotient::new(xz.clone(), xb.clone()).map_err(|e| BicomplexError::Invalid(e.to_string()))?;
            let hs: Vec<Subquotient> = (0..last).map(|i| Subquotient::new(zs[i].clone(), bs[i].clone()).expect("B ⊆ Z")).collect();
            let mut prev_map = hx.induced(aug, &hs[0]).map_err(|e| BicomplexError::Invalid(e.to_string()))?;
            if prev_map.rank() != hx.dim() {
                return Err(BicomplexError::Invalid(format!("H augmentation not mono in column {l}")));
            }
            for i in 0..last {
                let next = if i + 1 < last {
                    hs[i].induced(&j.delta(i, l), &hs[i + 1]).map_err(|e| BicomplexError::Invalid(e.to_string()))?
                } else {
                    FpMatrix::zeros(j.field(), hs[i].dim(), 0)
                };
                if i + 1 < last && prev_map.rank() + next.rank() != hs[i].dim() {
                    return Err(BicomplexError::Invalid(format!("rowwise H not exact at ({i}, {l})")));
                }
                if !(&prev_map * &next).is_zero() {
                    return Err(BicomplexError::Invalid(format!("rowwise H not a complex at ({i}, {l})")));
                }
                prev_map = next;
            }
        }
        Ok(())
    }
}

/// `0 → S_X → S_0 → S_1 → …` is exact, where `S_X ⊆ X^ℓ` maps by `aug` and `S_i ⊆ J^{i,ℓ}` by `δ`.
fn check_resolves(
    sx: &Subspace,
    ss: &[Subspace],
    aug: &FpMatrix,
    delta: impl Fn(usize) -> FpMatrix,
    what: &str,
) -> Result<(), BicomplexError> {
    let bad = |s: String| Err(BicomplexError::Invalid(format!("rowwise {what}: {s}")));
    let img = sx.image_under(aug);
    if img.dim() != sx.dim() || !ss[0].contains(&img).unwrap_or(false) {
        return bad("augmentation".into());
    }
    let mut prev = img;
    for (i, s) in ss.iter().enumerate() {
        let dl = delta(i);
        let ker = s.intersect(&crate::linalg::kernel_basis(&dl)).map_err(|e| BicomplexError::Invalid(e.to_string()))?;
        if ker != prev {
            return bad(format!("not exact at row {i}"));
        }
        if i + 1 < ss.len() {
            let im = s.image_under(&dl);
            if !ss[i + 1].contains(&im).unwrap_or(false) {
                return bad(format!("δ does not preserve the rowwise subobject at row {i}"));
            }
            prev = im;
        }
    }
    Ok(())
}

/// Builds a CE-resolution of `x` (a complex of modules in degrees `≥ 0`) with entries `i + k ≤ bound`.
pub fn ce_resolution(x: &CochainComplex, provider: &InjResProvider, bound: usize) -> Result<CEResolution, BicomplexError> {
    if x.lo() < 0 {
        return Err(BicomplexError::Shape("CE-resolution needs a complex in degrees ≥ 0".into()));
    }
    let alg = x
        .modules()
        .and_then(|m| m.first())
        .map(|m| m.algebra().clone())
        .ok_or_else(|| BicomplexError::Shape("CE-resolution needs module entries".into()))?;
    let f = x.field();
    let n = bound;
    let cols: Vec<ColumnData> = (0..=n + 1)
        .map(|k| {
            let k = k as i64;
            ColumnData {
                x: x.module(k).cloned().unwrap_or_else(|| FdModule::zero(alg.clone())),
                b: x.boundaries(k),
                z: x.cycles(k),
            }
        })
        .collect();
    let res_b: Vec<InjRes> = (0..=n + 1)
        .map(|k| {
            let bm = cols[k].x.submodule(&cols[k].b).map_err(ResolutionError::from)?;
            Ok(injective_resolution(&bm, provider, n + 1 - k)?)
        })
        .collect::<Result<_, BicomplexError>>()?;
    let mut res_h = vec![];
    let mut columns = vec![];
    for k in 0..=n {
        let c = &cols[k];
        let zm = c.x.submodule(&c.z).map_err(ResolutionError::from)?;
        let b_in_z = c.z.coordinates(c.b.basis()).map_err(ResolutionError::from)?;
        let (hm, sq) = zm.quotient(&Subspace::from_rows(&b_in_z)).map_err(ResolutionError::from)?;
        let z_to_h = sq.coords_unchecked(&FpMatrix::identity(f, zm.dim()));
        let rh = injective_resolution(&hm, provider, n - k)?;
        let rz = horseshoe(&zm, &b_in_z, &z_to_h, &res_b[k].truncate(n - k), &rh)?;
        let d_onto_b = cols[k + 1].b.coordinates(&x.diff(k as i64)).map_err(ResolutionError::from)?;
        let rx = horseshoe(&c.x, c.z.basis(), &d_onto_b, &rz.middle, &res_b[k + 1].truncate(n - k))?;
        res_h.push(rh);
        columns.push(rx.middle);
    }
    let dim = |i: usize, k: usize| if i + k <= n { columns[k].entries[i].dim() } else { 0 };
    let carrier = DoubleComplex::from_fn(
        f,
        n + 1,
        n + 1,
        dim,
        |i, k| {
            let mut m = FpMatrix::zeros(f, dim(i, k), dim(i, k + 1));
            let r = res_b[k + 1].entries[i].dim();
            m.set_block(dim(i, k) - r, 0, &FpMatrix::identity(f, r));
            m
        },
        |i, k| columns[k].diff(i),
    )?;
    let mods = (0..=n)
        .map(|i| {
            (0..=n).map(|k| if i + k <= n { columns[k].entries[i].module().clone() } else { FdModule::zero(alg.clone()) }).collect()
        })
        .collect();
    let trusted = (n as i64).min(x.exact_through().unwrap_or(i64::MAX)) - 1;
    let carrier = carrier.with_modules(mods)?.with_trusted(Some(trusted));
    let augmentation = (0..=n).map(|k| columns[k].eps[0].clone()).collect();
    Ok(CEResolution { carrier: Arc::new(carrier), resolved: Arc::new(x.clone()), augmentation, bound: n, res_b, res_h, columns })
}

/// A module map `D → inj` restricting to `c` along `eps` and vanishing on the image of `into`.
fn extend_killing_boundaries(
    eps: &FpMatrix,
    into: &FpMatrix,
    c: &FpMatrix,
    dmod: &FdModule,
    inj: &InjectiveModule,
) -> Result<FpMatrix, BicomplexError> {
    let fl = eps.field();
    let v = inj.cogenerator_dim();
    if inj.dim() == 0 {
        return Ok(FpMatrix::zeros(fl, dmod.dim(), 0));
    }
    let lhs = FpMatrix::vstack(fl, dmod.dim(), &[eps, into]);
    let rhs = FpMatrix::vstack(fl, v, &[&(c * &inj.ev()), &FpMatrix::zeros(fl, into.rows(), v)]);
    let pi_t = solve(&lhs.transpose(), &rhs.transpose()).ok_or(ResolutionError::LiftFailed("source row is not a pure extension"))?;
    Ok(inj.lift(dmod, &pi_t.transpose()))
}

/// Lifts a chain map `f : X → X′` to a map of CE-resolutions compatible with the augmentations.
pub fn lift_map_to_ce(f: &ComplexMap, src: &CEResolution, tgt: &CEResolution) -> Result<DoubleComplexMap, BicomplexError> {
    let n = src.bound.min(tgt.bound);
    let fl = src.carrier.field();
    let j = &src.carrier;
    let mut phi: Vec<Vec<FpMatrix>> = vec![];
    for i in 0..=n {
        let width = n - i;
        // c^k : C^{i,k} → J′^{i,k}.
        let cs: Vec<FpMatrix> = (0..=width)
            .map(|k| {
                if i == 0 {
                    &f.component(k as i64) * &tgt.augmentation[k]
                } else {
                    let (s, t) = (&src.columns[k], &tgt.columns[k]);
                    let on_coker = &(&s.reps[i - 1] * &phi[i - 1][k]) * &t.proj[i - 1];
                    &on_coker * &t.eps[i]
                }
            })
            .collect();
        let eps = |k: usize| &src.columns[k].eps[i];
        let dmod = |k: usize| src.columns[k].entries[i].module();
        let split = |k: usize| {
            let [p, q, _] = tgt.blocks(i, k);
            (p.dim(), q.dim())
        };
        let psi: Vec<FpMatrix> = (0..=width)
            .map(|k| {
                let (p, _) = split(k);
                let cp = cs[k].block(0, 0, cs[k].rows(), p);
                extend_along_mono(eps(k), &cp, dmod(k), tgt.blocks(i, k)[0])
            })
            .collect::<Result<_, _>>()?;
        let mut row = vec![];
        for k in 0..=width {
            let (p, q) = split(k);
            let [_, qmod, rmod] = tgt.blocks(i, k);
            let c = &cs[k];
            let cq = c.block(0, p, c.rows(), q);
            let cr = c.block(0, p + q, c.rows(), rmod.dim());
            let dk = dmod(k).dim();
            let into = if k > 0 { j.d(i, k - 1) } else { FpMatrix::zeros(fl, 0, dk) };
            let phi_q = extend_killing_boundaries(eps(k), &into, &cq, dmod(k), qmod)?;
            let phi_r = if k < width { &j.d(i, k) * &psi[k + 1] } else { extend_killing_boundaries(eps(k), &into, &cr, dmod(k), rmod)? };
            let full = FpMatrix::hstack(fl, dk, &[&psi[k], &phi_q, &phi_r]);
            if &(eps(k) * &full) != c {
                return Err(ResolutionError::LiftFailed("lift does not extend the given map").into());
            }
            row.push(full);
        }
        phi.push(row);
    }
    DoubleComplexMap::from_fn(src.carrier.clone(), tgt.carrier.clone(), |i, k| phi[i][k].clone())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{group_algebra, GroupTable};

    fn gf(p: u32) -> FieldSpec {
        FieldSpec::new(p).unwrap()
    }

    #[test]
    fn total_of_small_square() {
        let f = gf(3);
        let one = FpMatrix::identity(f, 1);
        let x = DoubleComplex::from_fn(f, 2, 2, |_, _| 1, |_, _| one.clone(), |_, _| one.clone()).unwrap();
        let t = x.total().unwrap();
        assert_eq!(t.dims(), &[1, 2, 1]);
        assert_eq!(t.diff(0), FpMatrix::from_i64(f, 1, 2, &[1, 1]));
        assert_eq!(t.diff(1), FpMatrix::from_i64(f, 2, 1, &[1, -1]));
    }

    #[test]
    fn concentrations_and_signs() {
        let f = gf(3);
        let u = CochainComplex::new(f, 0, vec![1, 1, 1, 1, 1], vec![FpMatrix::zeros(f, 1, 1); 4]).unwrap();
        assert_eq!(DoubleComplex::conc2(&u).unwrap().total().unwrap(), u);
        let iso = DoubleComplex::conc1_sign_iso(&u).unwrap();
        let signs: Vec<u32> = (0..5).map(|n| iso.component(n).get(0, 0)).collect();
        assert_eq!(signs, vec![1, 1, 2, 2, 1]);
    }

    #[test]
    fn t12_of_plane() {
        let f = gf(2);
        let y = TripleComplex::from_fn(f, [1, 2, 2], |_, _, _| 1, |_, _, _, _| FpMatrix::identity(f, 1)).unwrap();
        let x = y.t12().unwrap();
        assert_eq!((x.rows(), x.cols()), (2, 2));
        assert_eq!(x.delta(0, 0), FpMatrix::identity(f, 1));
    }

    fn c2_setup() -> (Arc<FdAlgebra>, FdModule, FdModule, InjResProvider) {
        let f = gf(2);
        let alg = Arc::new(group_algebra(&GroupTable::cyclic(2), f));
        let triv = FdModule::character(alg.clone(), &[1, 1]).unwrap();
        let reg = FdModule::regular(alg.clone());
        let counit = FpMatrix::from_vec(f, 2, 1, vec![1, 1]);
        let prov = InjResProvider::augmented(&alg, &counit).unwrap();
        (alg, triv, reg, prov)
    }

    #[test]
    fn ce_of_concentrated_module() {
        let (_, triv, _, prov) = c2_setup();
        let x = CochainComplex::conc_module(&triv);
        let ce = ce_resolution(&x, &prov, 4).unwrap();
        ce.validate().unwrap();
        let col: Vec<usize> = (0..5).map(|i| ce.carrier.dim(i, 0)).collect();
        assert_eq!(col, vec![2; 5]);
        assert!((1..5).all(|k| ce.carrier.dim(0, k) == 0));
    }

    #[test]
    fn ce_and_lift_of_two_term_complex() {
        let (_, triv, reg, prov) = c2_setup();
        let f = triv.field();
        // F2 → F2C2 via the norm element, then F2C2 → F2 by augmentation.
        let x = CochainComplex::from_modules(
            0,
            vec![triv.clone(), reg.clone(), triv.clone()],
            vec![FpMatrix::from_i64(f, 1, 2, &[1, 1]), FpMatrix::from_i64(f, 2, 1, &[1, 1])],
        )
        .unwrap();
        let ce = ce_resolution(&x, &prov, 4).unwrap();
        ce.validate().unwrap();
        ce.carrier.total().unwrap();
        let xa = Arc::new(x.clone());
        let id = ComplexMap::identity(xa.clone());
        let ce2 = ce_resolution(&x, &InjResProvider::Coinduced, 4).unwrap();
        ce2.validate().unwrap();
        lift_map_to_ce(&id, &ce, &ce2).unwrap();
        lift_map_to_ce(&id, &ce2, &ce).unwrap();
        let zero = ComplexMap::new(xa.clone(), xa, 0, vec![]).unwrap();
        lift_map_to_ce(&zero, &ce, &ce).unwrap();
    }
}
