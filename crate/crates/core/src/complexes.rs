//! Finite cochain complexes of vector spaces or modules and their homology.
//!
//! A complex stores the objects in degrees `lo..=hi`; everything outside is zero. Complexes cut
//! out of an unbounded one remember the last degree whose homology is still correct.

use crate::algebra::FdModule;
use crate::linalg::{kernel_basis, solve, FieldSpec, FpMatrix, LinalgError, Subquotient, Subspace};
use serde::Serialize;
use std::sync::Arc;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ComplexError {
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("d∘d ≠ 0 at degree {0}")]
    NotComplex(i64),
    #[error("differential at degree {0} is not a module map")]
    NotModuleMap(i64),
    #[error("map does not commute with differentials at degree {0}")]
    NotChainMap(i64),
    #[error("sequence is not short exact at degree {0}")]
    NotShortExact(i64),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CochainComplex {
    field: FieldSpec,
    lo: i64,
    dims: Vec<usize>,
    diffs: Vec<FpMatrix>,
    modules: Option<Vec<FdModule>>,
    exact_through: Option<i64>,
}

/// `Z^k`, `B^k` and `H^k = Z^k / B^k` inside the object in degree `k`.
#[derive(Clone, Debug)]
pub struct Homology {
    pub degree: i64,
    pub cycles: Subspace,
    pub boundaries: Subspace,
    pub quotient: Subquotient,
}

impl Homology {
    pub fn dim(&self) -> usize {
        self.quotient.dim()
    }
}

impl CochainComplex {
    /// `diffs[t]` maps degree `lo + t` to `lo + t + 1`; the last object maps to zero.
    pub fn new(field: FieldSpec, lo: i64, dims: Vec<usize>, diffs: Vec<FpMatrix>) -> Result<Self, ComplexError> {
        let c = Self { field, lo, dims, diffs, modules: None, exact_through: None };
        c.validate()?;
        Ok(c)
    }

    pub fn from_modules(lo: i64, modules: Vec<FdModule>, diffs: Vec<FpMatrix>) -> Result<Self, ComplexError> {
        let field = modules.first().map(|m| m.field()).ok_or_else(|| ComplexError::Shape("no modules".into()))?;
        let dims = modules.iter().map(|m| m.dim()).collect();
        let c = Self { field, lo, dims, diffs, modules: Some(modules), exact_through: None };
        c.validate()?;
        Ok(c)
    }

    pub fn zero(field: FieldSpec) -> Self {
        Self { field, lo: 0, dims: vec![], diffs: vec![], modules: None, exact_through: None }
    }

    /// The object `dim` in degree 0.
    pub fn conc(field: FieldSpec, dim: usize) -> Self {
        Self { field, lo: 0, dims: vec![dim], diffs: vec![], modules: None, exact_through: None }
    }

    pub fn conc_module(m: &FdModule) -> Self {
        Self { field: m.field(), lo: 0, dims: vec![m.dim()], diffs: vec![], modules: Some(vec![m.clone()]), exact_through: None }
    }

    fn validate(&self) -> Result<(), ComplexError> {
        let n = self.dims.len();
        if self.diffs.len() != n.saturating_sub(1) {
            return Err(ComplexError::Shape(format!("{} objects but {} differentials", n, self.diffs.len())));
        }
        for (t, d) in self.diffs.iter().enumerate() {
            if d.shape() != (self.dims[t], self.dims[t + 1]) || d.field() != self.field {
                return Err(ComplexError::Shape(format!("differential at degree {}", self.lo + t as i64)));
            }
        }
        for t in 1..self.diffs.len() {
            if !(&self.diffs[t - 1] * &self.diffs[t]).is_zero() {
                return Err(ComplexError::NotComplex(self.lo + t as i64 - 1));
            }
        }
        if let Some(ms) = &self.modules {
            if ms.len() != n {
                return Err(ComplexError::Shape("module count".into()));
            }
            for (t, d) in self.diffs.iter().enumerate() {
                if !ms[t].same_algebra(&ms[t + 1]) || !ms[t].intertwines(&ms[t + 1], d) {
                    return Err(ComplexError::NotModuleMap(self.lo + t as i64));
                }
            }
        }
        Ok(())
    }

    /// Marks homology above degree `k` as untrusted (the complex was cut off there).
    pub fn with_exact_through(mut self, k: Option<i64>) -> Self {
        self.exact_through = k;
        self
    }

    pub fn exact_through(&self) -> Option<i64> {
        self.exact_through
    }

    pub fn homology_trusted(&self, k: i64) -> bool {
        self.exact_through.is_none_or(|e| k <= e)
    }

    pub fn field(&self) -> FieldSpec {
        self.field
    }

    pub fn lo(&self) -> i64 {
        self.lo
    }

    /// Last stored degree; `lo - 1` for the empty complex.
    pub fn hi(&self) -> i64 {
        self.lo + self.dims.len() as i64 - 1
    }

    pub fn degrees(&self) -> std::ops::RangeInclusive<i64> {
        self.lo..=self.hi()
    }

    fn slot(&self, k: i64) -> Option<usize> {
        (k >= self.lo && k <= self.hi()).then(|| (k - self.lo) as usize)
    }

    pub fn dim(&self, k: i64) -> usize {
        self.slot(k).map_or(0, |t| self.dims[t])
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    /// `d^k : X^k → X^{k+1}`, zero outside the window.
    pub fn diff(&self, k: i64) -> FpMatrix {
        match self.slot(k) {
            Some(t) if t < self.diffs.len() => self.diffs[t].clone(),
            _ => FpMatrix::zeros(self.field, self.dim(k), self.dim(k + 1)),
        }
    }

    pub fn diff_ref(&self, k: i64) -> Option<&FpMatrix> {
        self.slot(k).and_then(|t| self.diffs.get(t))
    }

    pub fn has_modules(&self) -> bool {
        self.modules.is_some()
    }

    pub fn module(&self, k: i64) -> Option<&FdModule> {
        let t = self.slot(k)?;
        self.modules.as_ref().map(|ms| &ms[t])
    }

    pub fn modules(&self) -> Option<&[FdModule]> {
        self.modules.as_deref()
    }

    pub fn cycles(&self, k: i64) -> Subspace {
        kernel_basis(&self.diff(k))
    }

    pub fn boundaries(&self, k: i64) -> Subspace {
        Subspace::from_rows(&self.diff(k - 1))
    }

    pub fn homology(&self, k: i64) -> Homology {
        let cycles = self.cycles(k);
        let boundaries = self.boundaries(k);
        let quotient = Subquotient::new(cycles.clone(), boundaries.clone()).expect("boundaries are cycles");
        Homology { degree: k, cycles, boundaries, quotient }
    }

    pub fn homology_dim(&self, k: i64) -> usize {
        let d_out = self.diff(k).rank();
        let d_in = self.diff(k - 1).rank();
        self.dim(k) - d_out - d_in
    }

    /// Degree `i` holds `x^{i+k}`, differential scaled by `(−1)^k`.
    pub fn shift(&self, k: i64) -> Self {
        Self {
            field: self.field,
            lo: self.lo - k,
            dims: self.dims.clone(),
            diffs: self.diffs.iter().map(|d| d.signed(k)).collect(),
            modules: self.modules.clone(),
            exact_through: self.exact_through.map(|e| e - k),
        }
    }

    /// `Σ (−1)^k dim X^k` over the window.
    pub fn euler_characteristic(&self) -> i64 {
        self.degrees().map(|k| if k.rem_euclid(2) == 0 { 1 } else { -1 } * self.dim(k) as i64).sum()
    }

    pub fn homology_euler_characteristic(&self) -> i64 {
        self.degrees().map(|k| if k.rem_euclid(2) == 0 { 1 } else { -1 } * self.homology_dim(k) as i64).sum()
    }

    pub fn is_acyclic(&self) -> bool {
        self.degrees().all(|k| self.homology_dim(k) == 0)
    }

    /// Over a field every acyclic complex splits.
    pub fn is_split_acyclic(&self) -> bool {
        self.is_acyclic()
    }

    /// The same complex with degrees restricted to `lo..=hi` (a quotient followed by a subobject
    /// only when the cut degrees are already zero; used for windows).
    pub fn window(&self, lo: i64, hi: i64) -> Self {
        let lo = lo.max(self.lo);
        let hi = hi.min(self.hi());
        if hi < lo {
            return Self::zero(self.field);
        }
        let dims = (lo..=hi).map(|k| self.dim(k)).collect();
        let diffs = (lo..hi).map(|k| self.diff(k)).collect();
        let modules = self.modules.as_ref().map(|_| (lo..=hi).map(|k| self.module(k).unwrap().clone()).collect());
        Self { field: self.field, lo, dims, diffs, modules, exact_through: self.exact_through }
    }
}

/// A chain map; `components` covers degrees `lo..` and is zero elsewhere.
#[derive(Clone, Debug)]
pub struct ComplexMap {
    src: Arc<CochainComplex>,
    tgt: Arc<CochainComplex>,
    lo: i64,
    components: Vec<FpMatrix>,
}

impl ComplexMap {
    pub fn new(src: Arc<CochainComplex>, tgt: Arc<CochainComplex>, lo: i64, components: Vec<FpMatrix>) -> Result<Self, ComplexError> {
        for (t, c) in components.iter().enumerate() {
            let k = lo + t as i64;
            if c.shape() != (src.dim(k), tgt.dim(k)) {
                return Err(ComplexError::Shape(format!("chain map component at degree {k}")));
            }
        }
        let m = Self { src, tgt, lo, components };
        let (a, b) = m.span();
        for k in a - 1..=b {
            let left = &m.src.diff(k) * &m.component(k + 1);
            let right = &m.component(k) * &m.tgt.diff(k);
            if left != right {
                return Err(ComplexError::NotChainMap(k));
            }
        }
        Ok(m)
    }

    pub fn identity(x: Arc<CochainComplex>) -> Self {
        let comps = x.degrees().map(|k| FpMatrix::identity(x.field(), x.dim(k))).collect();
        Self { lo: x.lo(), src: x.clone(), tgt: x, components: comps }
    }

    pub fn zero(src: Arc<CochainComplex>, tgt: Arc<CochainComplex>) -> Self {
        Self { lo: 0, src, tgt, components: vec![] }
    }

    fn span(&self) -> (i64, i64) {
        (self.src.lo().min(self.tgt.lo()), self.src.hi().max(self.tgt.hi()))
    }

    pub fn src(&self) -> &Arc<CochainComplex> {
        &self.src
    }

    pub fn tgt(&self) -> &Arc<CochainComplex> {
        &self.tgt
    }

    pub fn component(&self, k: i64) -> FpMatrix {
        let t = k - self.lo;
        if t >= 0 && (t as usize) < self.components.len() {
            self.components[t as usize].clone()
        } else {
            FpMatrix::zeros(self.src.field(), self.src.dim(k), self.tgt.dim(k))
        }
    }

    pub fn compose(&self, then: &ComplexMap) -> Result<ComplexMap, ComplexError> {
        let (a, b) = self.span();
        let comps = (a..=b).map(|k| &self.component(k) * &then.component(k)).collect();
        ComplexMap::new(self.src.clone(), then.tgt.clone(), a, comps)
    }

    /// `H^k(f)` in the quotient coordinates of both homologies.
    pub fn homology_map(&self, k: i64) -> FpMatrix {
        let hs = self.src.homology(k);
        let ht = self.tgt.homology(k);
        hs.quotient.induced(&self.component(k), &ht.quotient).expect("chain maps induce maps on homology")
    }

    pub fn is_quasiiso(&self) -> bool {
        let (a, b) = self.span();
        (a..=b).all(|k| {
            let h = self.homology_map(k);
            h.rows() == h.cols() && h.rank() == h.rows()
        })
    }
}

/// The five equivalent purity conditions for a degreewise short exact sequence `X′ ↣ X ↠ X″`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct PurityReport {
    pub connectors_vanish: bool,
    pub boundaries_short_exact: bool,
    pub cycles_epi: bool,
    pub cokernels_mono: bool,
    pub diagram_exact: bool,
}

impl PurityReport {
    pub fn entries(&self) -> [(&'static str, bool); 5] {
        [
            ("connectors vanish", self.connectors_vanish),
            ("B-sequence short exact", self.boundaries_short_exact),
            ("Z X → Z X'' epi", self.cycles_epi),
            ("Z'X' → Z'X mono", self.cokernels_mono),
            ("3x3 diagram exact", self.diagram_exact),
        ]
    }

    pub fn agree(&self) -> bool {
        let e = self.entries();
        e.iter().all(|x| x.1 == e[0].1)
    }

    pub fn pure(&self) -> bool {
        self.agree() && self.connectors_vanish
    }
}

fn check_short_exact(f: &FpMatrix, g: &FpMatrix, k: i64) -> Result<(), ComplexError> {
    let (a, b) = (f.rows(), g.cols());
    if f.cols() != g.rows() || !(f * g).is_zero() || f.rank() != a || g.rank() != b || a + b != f.cols() {
        return Err(ComplexError::NotShortExact(k));
    }
    Ok(())
}

/// Evaluates each purity condition independently on `X′ →f X →g X″`.
pub fn purity_check(f: &ComplexMap, g: &ComplexMap) -> Result<PurityReport, ComplexError> {
    let (xp, x, xpp) = (f.src().clone(), f.tgt().clone(), g.tgt().clone());
    if **g.src() != *x {
        return Err(ComplexError::Shape("maps are not composable".into()));
    }
    let lo = xp.lo().min(x.lo()).min(xpp.lo());
    let hi = xp.hi().max(x.hi()).max(xpp.hi());
    for k in lo..=hi {
        check_short_exact(&f.component(k), &g.component(k), k)?;
    }
    let mut rep = PurityReport {
        connectors_vanish: true,
        boundaries_short_exact: true,
        cycles_epi: true,
        cokernels_mono: true,
        diagram_exact: true,
    };
    for k in lo - 1..=hi {
        let (fk, gk) = (f.component(k), g.component(k));
        let (hp, h, hpp) = (xp.homology(k), x.homology(k), xpp.homology(k));

        // Connector H^k X″ → H^{k+1} X′.
        let next = xp.homology(k + 1);
        for i in 0..hpp.quotient.dim() {
            let z = hpp.quotient.complement().row_matrix(i);
            let lift = solve(&gk, &z).expect("g is onto");
            let y = &lift * &x.diff(k);
            let pre = solve(&f.component(k + 1), &y).expect("boundary of a lift lies in X′");
            if !next.boundaries.contains_rows(&pre) {
                rep.connectors_vanish = false;
            }
        }

        // B X′ → B X → B X″ is exact in the middle; the outer maps are mono and epi for free.
        let img_f = Subspace::from_rows(&fk);
        let bx_in_f = h.boundaries.intersect(&img_f)?;
        let f_bp = hp.boundaries.image_under(&fk);
        let b_exact = bx_in_f == f_bp;
        rep.boundaries_short_exact &= b_exact;

        let z_epi = h.cycles.image_under(&gk) == hpp.cycles;
        rep.cycles_epi &= z_epi;

        let z_mono = h.boundaries.preimage_under(&fk) == hp.boundaries;
        rep.cokernels_mono &= z_mono;

        // The 3×3 diagram: B and Z columns short exact, and H′ ↣ H ↠ H″ short exact.
        let hf = hp.quotient.induced(&fk, &h.quotient)?;
        let hg = h.quotient.induced(&gk, &hpp.quotient)?;
        let h_ses = hf.rank() == hf.rows() && hg.rank() == hg.cols() && hf.rows() + hg.cols() == h.dim() && (&hf * &hg).is_zero();
        let z_mid = h.cycles.intersect(&img_f)? == hp.cycles.image_under(&fk);
        rep.diagram_exact &= b_exact && z_epi && z_mid && h_ses;
    }
    Ok(rep)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gf(p: u32) -> FieldSpec {
        FieldSpec::new(p).unwrap()
    }

    fn m(f: FieldSpec, r: usize, c: usize, v: &[i64]) -> FpMatrix {
        FpMatrix::from_i64(f, r, c, v)
    }

    #[test]
    fn homology_examples() {
        let f = gf(2);
        let x = CochainComplex::new(f, 0, vec![1, 1], vec![m(f, 1, 1, &[1])]).unwrap();
        assert_eq!((x.homology_dim(0), x.homology_dim(1)), (0, 0));
        let x = CochainComplex::new(f, 0, vec![2, 3], vec![FpMatrix::zeros(f, 2, 3)]).unwrap();
        assert_eq!((x.homology_dim(0), x.homology_dim(1)), (2, 3));
        let x = CochainComplex::new(f, 0, vec![2, 2], vec![m(f, 2, 2, &[1, 0, 0, 0])]).unwrap();
        assert_eq!((x.homology(0).dim(), x.homology(1).dim()), (1, 1));
    }

    #[test]
    fn rejects_non_complex() {
        let f = gf(3);
        let d = m(f, 1, 1, &[1]);
        assert_eq!(CochainComplex::new(f, 0, vec![1, 1, 1], vec![d.clone(), d]), Err(ComplexError::NotComplex(0)));
    }

    #[test]
    fn shift_rules() {
        let f = gf(3);
        let x = CochainComplex::new(f, 0, vec![1, 2, 1], vec![m(f, 1, 2, &[1, 1]), m(f, 2, 1, &[1, 2])]).unwrap();
        assert_eq!(x.shift(0), x);
        assert_eq!(x.shift(1).shift(1), x.shift(2));
        assert_eq!(x.shift(1).shift(-1), x);
        for k in -3..4 {
            assert_eq!(x.shift(1).homology_dim(k), x.homology_dim(k + 1));
        }
    }

    #[test]
    fn conc_and_euler() {
        let f = gf(2);
        let c = CochainComplex::conc(f, 3);
        assert_eq!((c.dim(0), c.dim(1), c.homology_dim(0)), (3, 0, 3));
        assert!(CochainComplex::conc(f, 0).is_acyclic());
        let x = CochainComplex::new(f, -1, vec![2, 2], vec![m(f, 2, 2, &[1, 0, 0, 0])]).unwrap();
        assert_eq!(x.euler_characteristic(), x.homology_euler_characteristic());
    }

    #[test]
    fn quasiiso_and_split() {
        let f = gf(2);
        let t = Arc::new(CochainComplex::new(f, 0, vec![2, 2], vec![FpMatrix::identity(f, 2)]).unwrap());
        assert!(t.is_split_acyclic());
        assert!(ComplexMap::identity(t.clone()).is_quasiiso());
        let zero = Arc::new(CochainComplex::zero(f));
        assert!(ComplexMap::zero(t, zero).is_quasiiso());
    }

    #[test]
    fn direct_sum_sequence_is_pure() {
        let f = gf(2);
        let a = Arc::new(CochainComplex::new(f, 0, vec![1, 1], vec![m(f, 1, 1, &[1])]).unwrap());
        let b = Arc::new(CochainComplex::new(f, 0, vec![1, 1], vec![m(f, 1, 1, &[0])]).unwrap());
        let s = Arc::new(CochainComplex::new(f, 0, vec![2, 2], vec![m(f, 2, 2, &[1, 0, 0, 0])]).unwrap());
        let inc = ComplexMap::new(a, s.clone(), 0, vec![m(f, 1, 2, &[1, 0]), m(f, 1, 2, &[1, 0])]).unwrap();
        let pr = ComplexMap::new(s, b, 0, vec![m(f, 2, 1, &[0, 1]), m(f, 2, 1, &[0, 1])]).unwrap();
        let r = purity_check(&inc, &pr).unwrap();
        assert!(r.pure(), "{r:?}");
    }

    #[test]
    fn nonzero_connector_is_impure_everywhere() {
        // 0 → F2[1] → (F2 → F2) → F2[0] → 0 with identity differential in the middle.
        let f = gf(2);
        let sub = Arc::new(CochainComplex::new(f, 0, vec![0, 1], vec![FpMatrix::zeros(f, 0, 1)]).unwrap());
        let mid = Arc::new(CochainComplex::new(f, 0, vec![1, 1], vec![m(f, 1, 1, &[1])]).unwrap());
        let quo = Arc::new(CochainComplex::new(f, 0, vec![1, 0], vec![FpMatrix::zeros(f, 1, 0)]).unwrap());
        let inc = ComplexMap::new(sub, mid.clone(), 0, vec![FpMatrix::zeros(f, 0, 1), m(f, 1, 1, &[1])]).unwrap();
        let pr = ComplexMap::new(mid, quo, 0, vec![m(f, 1, 1, &[1]), FpMatrix::zeros(f, 1, 0)]).unwrap();
        let r = purity_check(&inc, &pr).unwrap();
        assert!(r.agree() && !r.connectors_vanish, "{r:?}");
    }

    #[test]
    fn not_short_exact_is_rejected() {
        let f = gf(2);
        let a = Arc::new(CochainComplex::conc(f, 1));
        let inc = ComplexMap::new(a.clone(), a.clone(), 0, vec![m(f, 1, 1, &[1])]).unwrap();
        assert!(matches!(purity_check(&inc, &inc), Err(ComplexError::NotShortExact(0))));
    }
}
