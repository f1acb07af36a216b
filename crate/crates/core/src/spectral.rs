//! Filtered complexes, their spectral objects, E-entries and induced maps, classical pages, and
//! the first filtration of a double complex.
//!
//! A filtered complex is stored by its graded pieces `X̄(σ)^i` for `σ` in `[smin, smax]`, ordered
//! by increasing `σ`, with a block lower-triangular differential. Every quotient index reduces to
//! a [`Node`]: the complex `X(top/bottom)` shifted by `degree`. `−∞` clamps to `smin − 1` and
//! `+∞` to `smax`.

use crate::bicomplex::DoubleComplex;
use crate::complexes::CochainComplex;
use crate::linalg::{kernel_basis, FieldSpec, FpMatrix, LinalgError, Subquotient, Subspace};
use serde::Serialize;
use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::sync::Mutex;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SpectralError {
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error("invalid index: {0}")]
    InvalidIndex(String),
    #[error("indices are not comparable: {0}")]
    NotComparable(String),
    #[error("filtered complex is malformed: {0}")]
    Malformed(String),
    #[error("requested degree {requested} lies beyond the trusted degree {trusted}")]
    UntrustedRegionRequested { requested: i64, trusted: i64 },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Val {
    NegInf,
    Fin(i64),
    PosInf,
}

/// `value^{+level}`, ordered lexicographically by `(level, value)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct PosetIndex {
    pub level: i64,
    pub value: Val,
}

impl PosetIndex {
    pub fn fin(v: i64) -> Self {
        Self { level: 0, value: Val::Fin(v) }
    }

    pub fn neg_inf() -> Self {
        Self { level: 0, value: Val::NegInf }
    }

    pub fn pos_inf() -> Self {
        Self { level: 0, value: Val::PosInf }
    }

    pub fn up(self, k: i64) -> Self {
        Self { level: self.level + k, value: self.value }
    }

    pub fn is_infinite(self) -> bool {
        matches!(self.value, Val::NegInf | Val::PosInf)
    }
}

impl fmt::Display for PosetIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.value {
            Val::NegInf => write!(f, "-inf")?,
            Val::PosInf => write!(f, "inf")?,
            Val::Fin(v) => write!(f, "{v}")?,
        }
        if self.level != 0 {
            write!(f, "^{:+}", self.level)?;
        }
        Ok(())
    }
}

/// `a ⋖ b`: `a < b`, or `a = b` infinite.
pub fn dotted_lt(a: PosetIndex, b: PosetIndex) -> bool {
    a < b || (a == b && a.is_infinite())
}

/// `top/bottom` with `top^{−1} ≤ bottom ≤ top ≤ bottom^{+1}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct QuotientIndex {
    pub top: PosetIndex,
    pub bottom: PosetIndex,
}

impl QuotientIndex {
    pub fn new(top: PosetIndex, bottom: PosetIndex) -> Result<Self, SpectralError> {
        if top.up(-1) <= bottom && bottom <= top && top <= bottom.up(1) {
            Ok(Self { top, bottom })
        } else {
            Err(SpectralError::InvalidIndex(format!("{top}/{bottom}")))
        }
    }

    /// `(β/α)^{+1} = α^{+1}/β`, applied `k` times.
    pub fn shift(self, k: i64) -> Self {
        let mut q = self;
        for _ in 0..k.max(0) {
            q = Self { top: q.bottom.up(1), bottom: q.top };
        }
        for _ in 0..(-k).max(0) {
            q = Self { top: q.bottom, bottom: q.top.up(-1) };
        }
        q
    }

    pub fn le(&self, other: &Self) -> bool {
        self.top <= other.top && self.bottom <= other.bottom
    }
}

impl fmt::Display for QuotientIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.top, self.bottom)
    }
}

/// `E(δ/β ≽ γ/α)^{+k}` with `outer = δ/β`, `inner = γ/α`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct EntryIndex {
    pub outer: QuotientIndex,
    pub inner: QuotientIndex,
    pub k: i64,
}

impl EntryIndex {
    /// Requires `δ^{−1} ≤ α ≤ β ≤ γ ≤ δ ≤ α^{+1}`.
    pub fn new(delta: PosetIndex, beta: PosetIndex, gamma: PosetIndex, alpha: PosetIndex, k: i64) -> Result<Self, SpectralError> {
        if !(delta.up(-1) <= alpha && alpha <= beta && beta <= gamma && gamma <= delta && delta <= alpha.up(1)) {
            return Err(SpectralError::InvalidIndex(format!("{delta}/{beta} >= {gamma}/{alpha}")));
        }
        Ok(Self {
            outer: QuotientIndex { top: delta, bottom: beta },
            inner: QuotientIndex { top: gamma, bottom: alpha },
            k,
        })
    }

    pub fn from_ints(delta: i64, beta: i64, gamma: i64, alpha: i64, k: i64) -> Result<Self, SpectralError> {
        Self::new(PosetIndex::fin(delta), PosetIndex::fin(beta), PosetIndex::fin(gamma), PosetIndex::fin(alpha), k)
    }

    /// `E_r^{p,q} = E(−p−1+r / −p−1 ≽ −p / −p−r)^{+p+q}`; `r = None` means `r = ∞`.
    pub fn classical(p: i64, q: i64, r: Option<i64>) -> Self {
        let (delta, alpha) = match r {
            Some(r) => (PosetIndex::fin(-p - 1 + r), PosetIndex::fin(-p - r)),
            None => (PosetIndex::pos_inf(), PosetIndex::neg_inf()),
        };
        Self::new(delta, PosetIndex::fin(-p - 1), PosetIndex::fin(-p), alpha, p + q).expect("classical indices are valid")
    }

    /// `D_r^{i,j} = E(−i/−∞ ≽ −i−r+1/−∞)^{+i+j}`.
    pub fn exact_couple(i: i64, j: i64, r: i64) -> Self {
        let ni = PosetIndex::neg_inf();
        Self::new(PosetIndex::fin(-i), ni, PosetIndex::fin(-i - r + 1), ni, i + j).expect("couple indices are valid")
    }

    /// `δ^{−1} ≤ α ⋖ β ≤ γ ⋖ δ ≤ α^{+1}`.
    pub fn is_dotted(&self) -> bool {
        dotted_lt(self.inner.bottom, self.outer.bottom) && dotted_lt(self.inner.top, self.outer.top)
    }

    pub fn shifted_pairs(&self) -> (QuotientIndex, QuotientIndex) {
        (self.outer.shift(self.k), self.inner.shift(self.k))
    }

    /// The order of `Z̄∞^##` after applying the shifts.
    pub fn le(&self, other: &Self) -> bool {
        let (o1, i1) = self.shifted_pairs();
        let (o2, i2) = other.shifted_pairs();
        o1.le(&o2) && i1.le(&i2)
    }
}

impl fmt::Display for EntryIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "E({} >= {})^{:+}", self.outer, self.inner, self.k)
    }
}

/// The complex `X(top/bottom)` shifted by `degree`; its `H^0` is `H^degree` of `X(top/bottom)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Node {
    pub top: i64,
    pub bottom: i64,
    pub degree: i64,
}

/// A filtered complex by graded pieces; degrees outside `lo..=hi` are zero.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FilteredComplex {
    field: FieldSpec,
    lo: i64,
    smin: i64,
    smax: i64,
    pieces: Vec<Vec<usize>>,
    diffs: Vec<FpMatrix>,
    trusted: Option<i64>,
}

impl FilteredComplex {
    /// `pieces[i][s]` is `dim X̄(smin + s)^{lo + i}`; `diffs[i]` acts on `⊕_σ X̄(σ)` in increasing `σ`.
    pub fn new(field: FieldSpec, lo: i64, smin: i64, pieces: Vec<Vec<usize>>, diffs: Vec<FpMatrix>) -> Result<Self, SpectralError> {
        let width = pieces.first().map_or(0, |p| p.len());
        if width == 0 || pieces.iter().any(|p| p.len() != width) {
            return Err(SpectralError::Malformed("piece table must be rectangular and nonempty".into()));
        }
        let x = Self { field, lo, smin, smax: smin + width as i64 - 1, pieces, diffs, trusted: None };
        x.validate()?;
        Ok(x)
    }

    pub fn with_trusted(mut self, t: Option<i64>) -> Self {
        self.trusted = t;
        self
    }

    pub fn trusted(&self) -> Option<i64> {
        self.trusted
    }

    fn validate(&self) -> Result<(), SpectralError> {
        if self.diffs.len() + 1 != self.pieces.len() {
            return Err(SpectralError::Malformed("differential count".into()));
        }
        for (t, d) in self.diffs.iter().enumerate() {
            let k = self.lo + t as i64;
            if d.shape() != (self.total_dim(k), self.total_dim(k + 1)) {
                return Err(SpectralError::Malformed(format!("differential shape at degree {k}")));
            }
            for s in self.smin..=self.smax {
                for tau in s + 1..=self.smax {
                    let (r0, r1) = self.range(k, s - 1, s);
                    let (c0, c1) = self.range(k + 1, tau - 1, tau);
                    if !d.block(r0, c0, r1 - r0, c1 - c0).is_zero() {
                        return Err(SpectralError::Malformed(format!("block ({s}, {tau}) above the diagonal at degree {k}")));
                    }
                }
            }
            if t + 1 < self.diffs.len() && !(d * &self.diffs[t + 1]).is_zero() {
                return Err(SpectralError::Malformed(format!("d∘d ≠ 0 at degree {k}")));
            }
        }
        Ok(())
    }

    pub fn field(&self) -> FieldSpec {
        self.field
    }

    pub fn lo(&self) -> i64 {
        self.lo
    }

    pub fn hi(&self) -> i64 {
        self.lo + self.pieces.len() as i64 - 1
    }

    pub fn filtration_range(&self) -> (i64, i64) {
        (self.smin, self.smax)
    }

    pub fn piece_dim(&self, k: i64, sigma: i64) -> usize {
        if k < self.lo || k > self.hi() || sigma < self.smin || sigma > self.smax {
            0
        } else {
            self.pieces[(k - self.lo) as usize][(sigma - self.smin) as usize]
        }
    }

    pub fn total_dim(&self, k: i64) -> usize {
        (self.smin..=self.smax).map(|s| self.piece_dim(k, s)).sum()
    }

    /// Coordinates `[start, end)` of the pieces `σ ∈ ]bottom, top]` in degree `k`.
    pub fn range(&self, k: i64, bottom: i64, top: i64) -> (usize, usize) {
        let off = |s: i64| -> usize { (self.smin..s.min(self.smax + 1)).map(|t| self.piece_dim(k, t)).sum() };
        let (a, b) = (off(bottom + 1), off(top + 1));
        (a, b.max(a))
    }

    /// Full differential `d^k`, zero outside the window.
    pub fn diff(&self, k: i64) -> FpMatrix {
        let t = k - self.lo;
        if t >= 0 && (t as usize) < self.diffs.len() {
            self.diffs[t as usize].clone()
        } else {
            FpMatrix::zeros(self.field, self.total_dim(k), self.total_dim(k + 1))
        }
    }

    pub fn clamp(&self, v: Val) -> i64 {
        match v {
            Val::NegInf => self.smin - 1,
            Val::PosInf => self.smax,
            Val::Fin(x) => x.clamp(self.smin - 1, self.smax),
        }
    }

    /// The node of an already shifted quotient index.
    pub fn node(&self, q: &QuotientIndex) -> Node {
        let (a, b) = (q.bottom, q.top);
        if a.level == b.level {
            Node { top: self.clamp(b.value), bottom: self.clamp(a.value), degree: 2 * a.level }
        } else {
            Node { top: self.clamp(a.value), bottom: self.clamp(b.value), degree: 2 * a.level + 1 }
        }
    }

    pub fn entry_nodes(&self, e: &EntryIndex) -> (Node, Node) {
        let (o, i) = e.shifted_pairs();
        (self.node(&i), self.node(&o))
    }

    pub fn node_dim(&self, n: Node) -> usize {
        let (a, b) = self.range(n.degree, n.bottom, n.top);
        b - a
    }

    /// The differential of `X(top/bottom)` out of degree `k`.
    pub fn sub_diff(&self, n: Node, k: i64) -> FpMatrix {
        let (r0, r1) = self.range(k, n.bottom, n.top);
        let (c0, c1) = self.range(k + 1, n.bottom, n.top);
        self.diff(k).block(r0, c0, r1 - r0, c1 - c0)
    }

    /// `X(top/bottom)` as a complex, shifted by the node degree.
    pub fn subquotient_complex(&self, n: Node) -> CochainComplex {
        let dims = (self.lo..=self.hi()).map(|k| self.range(k, n.bottom, n.top)).map(|(a, b)| b - a).collect();
        let diffs = (self.lo..self.hi()).map(|k| self.sub_diff(n, k)).collect();
        CochainComplex::new(self.field, self.lo, dims, diffs).expect("subquotient of a complex").shift(n.degree)
    }

    pub fn cycles(&self, n: Node) -> Subspace {
        kernel_basis(&self.sub_diff(n, n.degree))
    }

    pub fn boundaries(&self, n: Node) -> Subspace {
        Subspace::from_rows(&self.sub_diff(n, n.degree - 1))
    }

    /// The spectral-object map `X(from) → X(to)` in degree `from.degree`: a selection of common
    /// pieces, or a connector made of differential blocks when `to` sits one degree higher.
    pub fn node_map(&self, from: Node, to: Node) -> Result<FpMatrix, SpectralError> {
        let f = self.field;
        let k = from.degree;
        let (r0, r1) = self.range(k, from.bottom, from.top);
        let (c0, c1) = self.range(to.degree, to.bottom, to.top);
        let mut m = FpMatrix::zeros(f, r1 - r0, c1 - c0);
        if to.degree == k {
            if from.bottom > to.bottom || from.top > to.top {
                return Err(SpectralError::NotComparable(format!("{from:?} -> {to:?}")));
            }
            let (a0, a1) = self.range(k, from.bottom.max(to.bottom), from.top.min(to.top));
            for x in a0..a1 {
                m.set(x - r0, x - c0, 1);
            }
            Ok(m)
        } else if to.degree == k + 1 {
            if from.bottom > to.top {
                return Err(SpectralError::NotComparable(format!("{from:?} -> {to:?}")));
            }
            let (s0, s1) = self.range(k, from.bottom.max(to.top), from.top);
            if s1 > s0 && c1 > c0 {
                let blk = self.diff(k).block(s0, c0, s1 - s0, c1 - c0);
                m.set_block(s0 - r0, 0, &blk);
            }
            Ok(m)
        } else {
            Err(SpectralError::NotComparable(format!("{from:?} -> {to:?} spans {} degrees", to.degree - k)))
        }
    }

    /// `E` at the given nodes: the image of `H(X(inner)) → H(X(outer))` inside the outer object.
    pub fn entry_at(&self, inner: Node, outer: Node) -> Result<Subquotient, SpectralError> {
        let z = self.cycles(inner);
        let b = self.boundaries(outer);
        let img = z.basis() * &self.node_map(inner, outer)?;
        let num = Subspace::from_rows(&FpMatrix::vstack(self.field, self.node_dim(outer), &[&img, b.basis()]));
        Ok(Subquotient::new(num, b)?)
    }

    pub fn entry(&self, e: &EntryIndex) -> Result<SpectralEntry, SpectralError> {
        let (inner, outer) = self.entry_nodes(e);
        Ok(SpectralEntry { index: *e, inner, outer, space: self.entry_at(inner, outer)? })
    }

    pub fn entry_trusted(&self, e: &EntryIndex) -> bool {
        let (i, o) = self.entry_nodes(e);
        self.trusted.is_none_or(|t| i.degree.max(o.degree) <= t)
    }

    /// The map `E(e1) → E(e2)` of the spectral sequence for `e1 ≤ e2`.
    pub fn e_map(&self, e1: &EntryIndex, e2: &EntryIndex) -> Result<FpMatrix, SpectralError> {
        if !e1.le(e2) {
            return Err(SpectralError::NotComparable(format!("{e1} -> {e2}")));
        }
        let a = self.entry(e1)?;
        let b = self.entry(e2)?;
        let m = self.node_map(a.outer, b.outer)?;
        Ok(a.space.induced(&m, &b.space)?)
    }

    /// The first filtration `t_I X(α) = t X^{[−α,∗}`: the piece `σ` in degree `k` is `X^{−σ, k+σ}`.
    pub fn first_filtration(x: &DoubleComplex) -> Result<Self, SpectralError> {
        let rows = x.rows() as i64;
        let top = x.max_total() as i64;
        let smin = -(rows - 1);
        let f = x.field();
        let piece = |k: i64, s: i64| -> usize {
            let (i, j) = (-s, k + s);
            if i < 0 || j < 0 {
                0
            } else {
                x.dim(i as usize, j as usize)
            }
        };
        let pieces: Vec<Vec<usize>> = (0..=top).map(|k| (smin..=0).map(|s| piece(k, s)).collect()).collect();
        let offset = |k: i64, s: i64| -> usize { (smin..s).map(|t| piece(k, t)).sum() };
        let total = |k: i64| -> usize { (smin..=0).map(|s| piece(k, s)).sum() };
        let mut diffs = vec![];
        for k in 0..top {
            let mut m = FpMatrix::zeros(f, total(k), total(k + 1));
            for s in smin..=0 {
                let (i, j) = (-s, k + s);
                if j < 0 || piece(k, s) == 0 {
                    continue;
                }
                let (iu, ju) = (i as usize, j as usize);
                let e = if i % 2 == 0 { 0 } else { 1 };
                if piece(k + 1, s) > 0 {
                    m.set_block(offset(k, s), offset(k + 1, s), &x.d(iu, ju).signed(e));
                }
                if s > smin && piece(k + 1, s - 1) > 0 {
                    m.set_block(offset(k, s), offset(k + 1, s - 1), &x.delta(iu, ju).signed(e));
                }
            }
            diffs.push(m);
        }
        Ok(Self::new(f, 0, smin, pieces, diffs)?.with_trusted(x.trusted()))
    }

    /// Coordinates of `X^{i,j}` inside the degree-`(i+j)` object of the first filtration.
    pub fn first_filtration_offset(x: &DoubleComplex, i: usize, j: usize) -> usize {
        let k = (i + j) as i64;
        let rows = x.rows() as i64;
        ((-(rows - 1))..-(i as i64))
            .map(|s| {
                let (ii, jj) = (-s, k + s);
                if jj < 0 {
                    0
                } else {
                    x.dim(ii as usize, jj as usize)
                }
            })
            .sum()
    }
}

#[derive(Clone, Debug)]
pub struct SpectralEntry {
    pub index: EntryIndex,
    pub inner: Node,
    pub outer: Node,
    pub space: Subquotient,
}

impl SpectralEntry {
    pub fn dim(&self) -> usize {
        self.space.dim()
    }
}

/// A filtration-compatible chain map given by full matrices per degree.
#[derive(Clone, Debug)]
pub struct FilteredMap<'a> {
    pub src: &'a FilteredComplex,
    pub tgt: &'a FilteredComplex,
    comps: HashMap<i64, FpMatrix>,
}

impl<'a> FilteredMap<'a> {
    /// Checks shapes, block lower-triangularity and commutation with the differentials.
    pub fn new(src: &'a FilteredComplex, tgt: &'a FilteredComplex, comps: HashMap<i64, FpMatrix>) -> Result<Self, SpectralError> {
        let m = Self { src, tgt, comps };
        let lo = src.lo().min(tgt.lo());
        let hi = src.hi().max(tgt.hi());
        for k in lo..=hi {
            let c = m.comp(k);
            if c.shape() != (src.total_dim(k), tgt.total_dim(k)) {
                return Err(SpectralError::Malformed(format!("map shape at degree {k}")));
            }
            let (smin, smax) = src.filtration_range();
            for s in smin..=smax {
                let (r0, r1) = src.range(k, s - 1, s);
                let (c0, _) = tgt.range(k, s, s);
                let c1 = tgt.total_dim(k);
                if c1 > c0 && r1 > r0 && !c.block(r0, c0, r1 - r0, c1 - c0).is_zero() {
                    return Err(SpectralError::Malformed(format!("map raises filtration at degree {k}")));
                }
            }
            if &src.diff(k) * &m.comp(k + 1) != &c * &tgt.diff(k) {
                return Err(SpectralError::Malformed(format!("not a chain map at degree {k}")));
            }
        }
        Ok(m)
    }

    pub fn comp(&self, k: i64) -> FpMatrix {
        self.comps.get(&k).cloned().unwrap_or_else(|| FpMatrix::zeros(self.src.field(), self.src.total_dim(k), self.tgt.total_dim(k)))
    }

    /// The restriction to `X(node) → Y(node)`.
    pub fn restricted(&self, n: Node) -> FpMatrix {
        let (r0, r1) = self.src.range(n.degree, n.bottom, n.top);
        let (c0, c1) = self.tgt.range(n.degree, n.bottom, n.top);
        self.comp(n.degree).block(r0, c0, r1 - r0, c1 - c0)
    }

    pub fn entry_map_at(&self, inner: Node, outer: Node) -> Result<(FpMatrix, usize, usize), SpectralError> {
        let a = self.src.entry_at(inner, outer)?;
        let b = self.tgt.entry_at(inner, outer)?;
        Ok((a.induced(&self.restricted(outer), &b)?, a.dim(), b.dim()))
    }

    /// `E(f)` at `e`.
    pub fn entry_map(&self, e: &EntryIndex) -> Result<FpMatrix, SpectralError> {
        let (i, o) = self.src.entry_nodes(e);
        Ok(self.entry_map_at(i, o)?.0)
    }
}

/// A filtered map from a map of double complexes, through the first filtrations.
pub fn first_filtration_map<'a>(
    src: &'a FilteredComplex,
    tgt: &'a FilteredComplex,
    x: &DoubleComplex,
    y: &DoubleComplex,
    comp: impl Fn(usize, usize) -> FpMatrix,
) -> Result<FilteredMap<'a>, SpectralError> {
    let f = src.field();
    let mut comps = HashMap::new();
    for k in src.lo()..=src.hi() {
        let mut m = FpMatrix::zeros(f, src.total_dim(k), tgt.total_dim(k));
        for i in 0..=(k as usize).min(x.rows().saturating_sub(1)) {
            let j = k as usize - i;
            if x.dim(i, j) == 0 || y.dim(i, j) == 0 {
                continue;
            }
            let r = FilteredComplex::first_filtration_offset(x, i, j);
            let c = FilteredComplex::first_filtration_offset(y, i, j);
            m.set_block(r, c, &comp(i, j));
        }
        comps.insert(k, m);
    }
    FilteredMap::new(src, tgt, comps)
}

/// Every dotted index with `α` at level 0, deduplicated by clamped nodes, whose degrees lie in
/// `[lo, hi]`.
pub fn dotted_nodes(x: &FilteredComplex, lo: i64, hi: i64) -> Vec<(Node, Node, EntryIndex)> {
    let (smin, smax) = x.filtration_range();
    let mut level0: Vec<PosetIndex> = vec![PosetIndex::neg_inf()];
    level0.extend((smin - 1..=smax).map(PosetIndex::fin));
    level0.push(PosetIndex::pos_inf());
    let mut seen = BTreeSet::new();
    let mut out = vec![];
    for &alpha in &level0 {
        let mut cand: Vec<PosetIndex> = level0.iter().copied().filter(|&b| b >= alpha).collect();
        cand.extend(level0.iter().map(|b| b.up(1)).filter(|&b| b <= alpha.up(1)));
        for (ib, &beta) in cand.iter().enumerate() {
            if !dotted_lt(alpha, beta) {
                continue;
            }
            for (ig, &gamma) in cand.iter().enumerate().skip(ib) {
                for &delta in cand.iter().skip(ig) {
                    if !dotted_lt(gamma, delta) {
                        continue;
                    }
                    let base = EntryIndex::new(delta, beta, gamma, alpha, 0).expect("chain condition holds by construction");
                    let (i0, o0) = x.entry_nodes(&base);
                    for k in lo - 2..=hi {
                        let (i, o) = (Node { degree: i0.degree + k, ..i0 }, Node { degree: o0.degree + k, ..o0 });
                        if i.degree < lo || o.degree > hi || o.degree < lo || i.degree > hi {
                            continue;
                        }
                        if seen.insert((i, o)) {
                            out.push((i, o, EntryIndex { k, ..base }));
                        }
                    }
                }
            }
        }
    }
    out
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct ProperIsoReport {
    pub checked: usize,
    pub failures: Vec<String>,
    pub fast_path_checked: usize,
    pub fast_path_iso: bool,
    pub iso: bool,
    pub agree: bool,
}

/// Checks `Ė(f)` at every dotted entry with degrees in `[lo, hi]`, and separately the sufficient
/// criterion at the entries `E(α+1/α−1 ≽ α/α−2)^{+k}`.
pub fn proper_iso_check(f: &FilteredMap<'_>, lo: i64, hi: i64) -> Result<ProperIsoReport, SpectralError> {
    use rayon::prelude::*;
    let nodes = dotted_nodes(f.src, lo, hi);
    let failures = Mutex::new(vec![]);
    nodes.par_iter().try_for_each(|(i, o, e)| -> Result<(), SpectralError> {
        let (m, a, b) = f.entry_map_at(*i, *o)?;
        if a != b || m.rank() != a {
            failures.lock().unwrap().push(format!("{e} (dims {a} -> {b}, rank {})", m.rank()));
        }
        Ok(())
    })?;
    let failures = failures.into_inner().unwrap();
    let (smin, smax) = f.src.filtration_range();
    let mut fast = 0;
    let mut fast_iso = true;
    for alpha in smin - 1..=smax + 2 {
        for k in lo - 2..=hi {
            let e = EntryIndex::from_ints(alpha + 1, alpha - 1, alpha, alpha - 2, k)?;
            let (i, o) = f.src.entry_nodes(&e);
            if i.degree < lo || o.degree > hi {
                continue;
            }
            fast += 1;
            let (m, a, b) = f.entry_map_at(i, o)?;
            fast_iso &= a == b && m.rank() == a;
        }
    }
    let iso = failures.is_empty();
    Ok(ProperIsoReport { checked: nodes.len(), failures, fast_path_checked: fast, fast_path_iso: fast_iso, iso, agree: iso == fast_iso })
}

#[derive(Clone, Debug, Serialize)]
pub struct PageEntry {
    pub p: i64,
    pub q: i64,
    pub dim: usize,
    /// Rank of `d_r` leaving this entry, when its target is trusted.
    pub d_rank: Option<usize>,
}

#[derive(Clone, Debug, Serialize)]
pub struct Page {
    pub r: Option<i64>,
    pub entries: Vec<PageEntry>,
    pub trusted_through: Option<i64>,
}

impl Page {
    pub fn dim(&self, p: i64, q: i64) -> Option<usize> {
        self.entries.iter().find(|e| e.p == p && e.q == q).map(|e| e.dim)
    }
}

/// `E_r^{p,q}` for `p, q ≥ 0`, `p + q ≤ total`; `r = None` is `E_∞`.
pub fn classical_page(x: &FilteredComplex, r: Option<i64>, total: i64) -> Result<Page, SpectralError> {
    if let Some(t) = x.trusted() {
        if total > t {
            return Err(SpectralError::UntrustedRegionRequested { requested: total, trusted: t });
        }
    }
    let mut entries = vec![];
    for n in 0..=total {
        for p in 0..=n {
            let q = n - p;
            let e = EntryIndex::classical(p, q, r);
            let dim = x.entry(&e)?.dim();
            let d_rank = match r {
                Some(r) if x.trusted().is_none_or(|t| n < t) => Some(d_r(x, p, q, r)?.rank()),
                _ => None,
            };
            entries.push(PageEntry { p, q, dim, d_rank });
        }
    }
    Ok(Page { r, entries, trusted_through: x.trusted() })
}

/// `d_r : E_r^{p,q} → E_r^{p+r, q−r+1}` as the spectral-sequence map between the two entries.
pub fn d_r(x: &FilteredComplex, p: i64, q: i64, r: i64) -> Result<FpMatrix, SpectralError> {
    let src = EntryIndex::classical(p, q, Some(r));
    let tgt = EntryIndex::classical(p + r, q - r + 1, Some(r));
    x.e_map(&src, &tgt)
}

/// Exactness of `A → B → C` given the two maps (rows = source coordinates).
pub fn exact_at(f: &FpMatrix, g: &FpMatrix) -> bool {
    (f * g).is_zero() && f.rank() + g.rank() == f.cols()
}

#[derive(Clone, Debug, Serialize)]
pub struct SesReport {
    pub first: bool,
    pub second: bool,
}

/// Both fundamental short exact sequences for the chain `α ≤ β ≤ γ ≤ δ ≤ ε` at shift `k`.
pub fn fundamental_ses_check(
    x: &FilteredComplex,
    chain: [PosetIndex; 5],
    k: i64,
) -> Result<SesReport, SpectralError> {
    let [a, b, c, d, e] = chain;
    if !(e.up(-1) <= a && a <= b && b <= c && c <= d && d <= e && e <= a.up(1)) {
        return Err(SpectralError::InvalidIndex("chain condition".into()));
    }
    let ses = |i1: EntryIndex, i2: EntryIndex, i3: EntryIndex| -> Result<bool, SpectralError> {
        let f = x.e_map(&i1, &i2)?;
        let g = x.e_map(&i2, &i3)?;
        Ok(f.rank() == f.rows() && g.rank() == g.cols() && exact_at(&f, &g))
    };
    let first = ses(EntryIndex::new(e, b, c, a, k)?, EntryIndex::new(e, b, d, a, k)?, EntryIndex::new(e, c, d, a, k)?)?;
    let second = ses(EntryIndex::new(e, c, d, a, k)?, EntryIndex::new(e, c, d, b, k)?, EntryIndex::new(a.up(1), c, d, b, k)?)?;
    Ok(SesReport { first, second })
}

/// Exactness of `D^{i,j} → D^{i−1,j+1} → E_r^{i+r−2,j−r+2} → D^{i+r−1,j−r+2} → D^{i+r−2,j−r+3}` at
/// its three inner terms.
pub fn exact_couple_check(x: &FilteredComplex, i: i64, j: i64, r: i64) -> Result<bool, SpectralError> {
    let ds = [
        EntryIndex::exact_couple(i, j, r),
        EntryIndex::exact_couple(i - 1, j + 1, r),
        EntryIndex::classical(i + r - 2, j - r + 2, Some(r)),
        EntryIndex::exact_couple(i + r - 1, j - r + 2, r),
        EntryIndex::exact_couple(i + r - 2, j - r + 3, r),
    ];
    let maps: Vec<FpMatrix> = ds.windows(2).map(|w| x.e_map(&w[0], &w[1])).collect::<Result<_, _>>()?;
    Ok(maps.windows(2).all(|m| exact_at(&m[0], &m[1])))
}

/// Canonical identifications of the first spectral sequence of a double complex at `(α, k)`:
/// the `E_1`-type entry is row homology on the nose, and the `E_2`-type entry is identified with
/// vertical homology of row homology by a well-defined invertible map.
pub fn first_filtration_identifications(x: &DoubleComplex, ff: &FilteredComplex, alpha: i64, k: i64) -> Result<(bool, bool), SpectralError> {
    let row = -alpha;
    let col = k + alpha;
    if row < 0 || col < 0 || row as usize >= x.rows() {
        return Err(SpectralError::InvalidIndex(format!("row {row}, column {col}")));
    }
    let (ru, cu) = (row as usize, col as usize);
    let e1 = ff.entry(&EntryIndex::from_ints(alpha, alpha - 1, alpha, alpha - 1, k)?)?;
    let rh = x.row(ru).homology(col);
    let first = e1.space.num() == &rh.cycles && e1.space.den() == &rh.boundaries;

    let e2 = ff.entry(&EntryIndex::from_ints(alpha + 1, alpha - 1, alpha, alpha - 2, k)?)?;
    let f = x.field();
    let z_row = rh.cycles.clone();
    let b_row = rh.boundaries.clone();
    let next_b = x.row(ru + 1).boundaries(col);
    let delta = x.delta(ru, cu);
    let num = z_row.intersect(&next_b.preimage_under(&delta))?;
    let den = if ru == 0 { b_row } else { b_row.sum(&x.row(ru - 1).cycles(col).image_under(&x.delta(ru - 1, cu)))? };
    let vh = Subquotient::new(num, den)?;
    // X^{row, col} is the piece σ = α of the outer node of the E_2-type entry.
    let (o0, _) = ff.range(e2.outer.degree, e2.outer.bottom, e2.outer.top);
    let (p0, p1) = ff.range(e2.outer.degree, alpha - 1, alpha);
    let mut incl = FpMatrix::zeros(f, x.dim(ru, cu), ff.node_dim(e2.outer));
    for t in 0..p1 - p0 {
        incl.set(t, p0 - o0 + t, 1);
    }
    let second = match vh.induced(&incl, &e2.space) {
        Ok(m) => m.rows() == m.cols() && m.rank() == m.rows(),
        Err(_) => false,
    };
    Ok((first, second))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gf(p: u32) -> FieldSpec {
        FieldSpec::new(p).unwrap()
    }

    /// Two pieces in one degree pair: `X̄(0)^0 = F`, `X̄(1)^1 = F` with `d_{1,0}`... arranged so the
    /// connector is the only nonzero block.
    fn two_step() -> FilteredComplex {
        let f = gf(2);
        // degree 0: pieces σ=0: 0, σ=1: 1; degree 1: σ=0: 1, σ=1: 0.
        FilteredComplex::new(f, 0, 0, vec![vec![0, 1], vec![1, 0]], vec![FpMatrix::from_i64(f, 1, 1, &[1])]).unwrap()
    }

    #[test]
    fn index_shifts() {
        let q = QuotientIndex::new(PosetIndex::fin(3), PosetIndex::fin(1)).unwrap();
        assert_eq!(q.shift(1), QuotientIndex { top: PosetIndex::fin(1).up(1), bottom: PosetIndex::fin(3) });
        assert_eq!(q.shift(2), QuotientIndex { top: PosetIndex::fin(3).up(1), bottom: PosetIndex::fin(1).up(1) });
        assert_eq!(q.shift(3).shift(-3), q);
        assert!(QuotientIndex::new(PosetIndex::fin(1), PosetIndex::fin(3)).is_err());
    }

    #[test]
    fn degenerate_entries() {
        let x = two_step();
        let e = EntryIndex::from_ints(0, 0, 0, 0, 0).unwrap();
        assert_eq!(x.entry(&e).unwrap().dim(), 0);
        let full = EntryIndex::new(PosetIndex::pos_inf(), PosetIndex::neg_inf(), PosetIndex::pos_inf(), PosetIndex::neg_inf(), 0).unwrap();
        assert_eq!(x.entry(&full).unwrap().dim(), 0);
        let e1 = EntryIndex::from_ints(1, 0, 1, 0, 0).unwrap();
        assert_eq!(x.entry(&e1).unwrap().dim(), 1);
    }

    #[test]
    fn connector_is_the_off_diagonal_block() {
        let x = two_step();
        let from = Node { top: 1, bottom: 0, degree: 0 };
        let to = Node { top: 0, bottom: -1, degree: 1 };
        assert_eq!(x.node_map(from, to).unwrap(), FpMatrix::from_i64(gf(2), 1, 1, &[1]));
        let d1 = d_r(&x, -1, 1, 1).unwrap();
        assert_eq!(d1.rank(), 1);
    }

    #[test]
    fn classical_index_formula() {
        let e = EntryIndex::classical(1, 0, Some(2));
        assert_eq!(e, EntryIndex::from_ints(0, -2, -1, -3, 1).unwrap());
        assert!(e.is_dotted());
    }

    #[test]
    fn conc2_degenerates_in_row_zero() {
        let f = gf(3);
        let u = CochainComplex::new(f, 0, vec![1, 2, 1], vec![FpMatrix::from_i64(f, 1, 2, &[1, 0]), FpMatrix::from_i64(f, 2, 1, &[0, 1])]).unwrap();
        let x = DoubleComplex::conc2(&u).unwrap();
        let ff = FilteredComplex::first_filtration(&x).unwrap();
        for q in 0..3 {
            let e1 = ff.entry(&EntryIndex::classical(0, q, Some(1))).unwrap().dim();
            let einf = ff.entry(&EntryIndex::classical(0, q, None)).unwrap().dim();
            assert_eq!(e1, u.homology_dim(q));
            assert_eq!(einf, e1);
        }
    }
}
