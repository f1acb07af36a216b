//! Involutive Hopf algebras, normal Hopf subalgebras, quotient Hopf algebras and the module
//! isomorphisms built from them.
//!
//! The coproduct of a basis element is a vector in the tensor basis (index `a * dim + b` for
//! `b_a ⊗ b_b`); every Sweedler-style sum is a contraction over that vector.

use crate::algebra::{
    hom_module_space, tensor_over_field, vectors_to_matrix, AlgebraError, FdAlgebra, FdModule, GroupTable,
};
use crate::linalg::{FieldSpec, FpMatrix, LinalgError, Subquotient, Subspace};
use serde::Serialize;
use std::sync::Arc;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum HopfError {
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error("structure map has the wrong shape: {0}")]
    Shape(&'static str),
    #[error("Hopf structure law fails: {0}")]
    AxiomFailed(&'static str),
    #[error("subalgebra is not stable under comultiplication and antipode")]
    NotHopfSubalgebra,
    #[error("Hopf subalgebra is not normal")]
    NotNormal,
    #[error("HK+ is not a Hopf ideal")]
    NotHopfIdeal,
    #[error("quotient action is not well defined")]
    ActionNotWellDefined,
    #[error("fixed points are not stable under the quotient action")]
    NotStable,
    #[error("mutually inverse check failed: {0}")]
    InverseCheckFailed(&'static str),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HopfAlgebra {
    algebra: Arc<FdAlgebra>,
    counit: FpMatrix,
    comult: FpMatrix,
    antipode: FpMatrix,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct AxiomReport {
    pub counit_algebra_map: bool,
    pub comult_unital: bool,
    pub left_counit: bool,
    pub right_counit: bool,
    pub coassociative: bool,
    pub left_antipode: bool,
    pub right_antipode: bool,
    pub involutive: bool,
}

impl AxiomReport {
    pub fn all(&self) -> bool {
        self.entries().iter().all(|e| e.1)
    }

    pub fn entries(&self) -> Vec<(&'static str, bool)> {
        vec![
            ("counit is an algebra map", self.counit_algebra_map),
            ("comultiplication is unital", self.comult_unital),
            ("left counit law", self.left_counit),
            ("right counit law", self.right_counit),
            ("coassociativity", self.coassociative),
            ("left antipode law", self.left_antipode),
            ("right antipode law", self.right_antipode),
            ("antipode is involutive", self.involutive),
        ]
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct IdentityReport {
    pub comult_multiplicative: bool,
    pub antipode_unit: bool,
    pub antipode_antimultiplicative: bool,
    pub counit_antipode: bool,
    pub antipode_coproduct_flip: bool,
    pub conjugation_left: bool,
    pub conjugation_right: bool,
    pub flipped_left_antipode: bool,
    pub flipped_right_antipode: bool,
}

impl IdentityReport {
    pub fn all(&self) -> bool {
        self.entries().iter().all(|e| e.1)
    }

    pub fn entries(&self) -> Vec<(&'static str, bool)> {
        vec![
            ("comultiplication is multiplicative", self.comult_multiplicative),
            ("antipode fixes the unit", self.antipode_unit),
            ("antipode is antimultiplicative", self.antipode_antimultiplicative),
            ("counit is antipode invariant", self.counit_antipode),
            ("antipode flips the coproduct", self.antipode_coproduct_flip),
            ("left conjugation", self.conjugation_left),
            ("right conjugation", self.conjugation_right),
            ("flipped left antipode law", self.flipped_left_antipode),
            ("flipped right antipode law", self.flipped_right_antipode),
        ]
    }
}

impl HopfAlgebra {
    pub fn new(algebra: Arc<FdAlgebra>, counit: FpMatrix, comult: FpMatrix, antipode: FpMatrix) -> Result<Self, HopfError> {
        let h = Self::new_unchecked(algebra, counit, comult, antipode)?;
        let report = h.check_axioms();
        if let Some((name, _)) = report.entries().into_iter().find(|e| !e.1) {
            return Err(HopfError::AxiomFailed(name));
        }
        Ok(h)
    }

    /// Shape checks only; used to inspect deliberately broken structures.
    pub fn new_unchecked(algebra: Arc<FdAlgebra>, counit: FpMatrix, comult: FpMatrix, antipode: FpMatrix) -> Result<Self, HopfError> {
        let d = algebra.dim();
        if counit.shape() != (d, 1) {
            return Err(HopfError::Shape("counit"));
        }
        if comult.shape() != (d, d * d) {
            return Err(HopfError::Shape("comultiplication"));
        }
        if antipode.shape() != (d, d) {
            return Err(HopfError::Shape("antipode"));
        }
        Ok(Self { algebra, counit, comult, antipode })
    }

    pub fn algebra(&self) -> &Arc<FdAlgebra> {
        &self.algebra
    }

    pub fn field(&self) -> FieldSpec {
        self.algebra.field()
    }

    pub fn dim(&self) -> usize {
        self.algebra.dim()
    }

    pub fn counit(&self) -> &FpMatrix {
        &self.counit
    }

    pub fn comult(&self) -> &FpMatrix {
        &self.comult
    }

    pub fn antipode(&self) -> &FpMatrix {
        &self.antipode
    }

    pub fn eps(&self, x: &[u32]) -> u32 {
        self.counit.apply(x)[0]
    }

    pub fn s(&self, x: &[u32]) -> Vec<u32> {
        self.antipode.apply(x)
    }

    pub fn delta(&self, x: &[u32]) -> Vec<u32> {
        self.comult.apply(x)
    }

    /// Nonzero terms `(a, b, c)` of `Δx = Σ c · b_a ⊗ b_b`.
    pub fn coproduct_terms(&self, x: &[u32]) -> Vec<(usize, usize, u32)> {
        let d = self.dim();
        self.delta(x)
            .into_iter()
            .enumerate()
            .filter(|(_, c)| *c != 0)
            .map(|(k, c)| (k / d, k % d, c))
            .collect()
    }

    fn unit(&self) -> Vec<u32> {
        self.algebra.unit().to_vec()
    }

    fn scaled(&self, v: &[u32], c: u32) -> Vec<u32> {
        let f = self.field();
        v.iter().map(|&x| f.mul(x, c)).collect()
    }

    fn add_into(&self, acc: &mut [u32], v: &[u32], c: u32) {
        let f = self.field();
        for (a, &x) in acc.iter_mut().zip(v) {
            *a = f.add(*a, f.mul(x, c));
        }
    }

    /// `(Δ ⊗ 1)Δx` in the triple tensor basis.
    fn delta_left(&self, x: &[u32]) -> Vec<u32> {
        let d = self.dim();
        let mut acc = vec![0; d * d * d];
        for (a, b, c) in self.coproduct_terms(x) {
            for (a1, a2, c2) in self.coproduct_terms(&self.algebra.basis(a)) {
                let k = (a1 * d + a2) * d + b;
                acc[k] = self.field().add(acc[k], self.field().mul(c, c2));
            }
        }
        acc
    }

    /// `(1 ⊗ Δ)Δx` in the triple tensor basis.
    fn delta_right(&self, x: &[u32]) -> Vec<u32> {
        let d = self.dim();
        let mut acc = vec![0; d * d * d];
        for (a, b, c) in self.coproduct_terms(x) {
            for (b1, b2, c2) in self.coproduct_terms(&self.algebra.basis(b)) {
                let k = (a * d + b1) * d + b2;
                acc[k] = self.field().add(acc[k], self.field().mul(c, c2));
            }
        }
        acc
    }

    fn tensor_mul(&self, s: &[u32], t: &[u32]) -> Vec<u32> {
        let d = self.dim();
        let f = self.field();
        let mut acc = vec![0; d * d];
        for (k, &c) in s.iter().enumerate().filter(|e| *e.1 != 0) {
            for (l, &e) in t.iter().enumerate().filter(|e| *e.1 != 0) {
                let x = self.algebra.mul(&self.algebra.basis(k / d), &self.algebra.basis(l / d));
                let y = self.algebra.mul(&self.algebra.basis(k % d), &self.algebra.basis(l % d));
                let ce = f.mul(c, e);
                for (i, &xi) in x.iter().enumerate().filter(|e| *e.1 != 0) {
                    for (j, &yj) in y.iter().enumerate().filter(|e| *e.1 != 0) {
                        acc[i * d + j] = f.add(acc[i * d + j], f.mul(ce, f.mul(xi, yj)));
                    }
                }
            }
        }
        acc
    }

    pub fn check_axioms(&self) -> AxiomReport {
        let d = self.dim();
        let alg = &self.algebra;
        let mut r = AxiomReport {
            counit_algebra_map: self.eps(alg.unit()) == 1,
            comult_unital: {
                let u = alg.unit();
                let mut uu = vec![0; d * d];
                for (i, &a) in u.iter().enumerate() {
                    for (j, &b) in u.iter().enumerate() {
                        uu[i * d + j] = self.field().mul(a, b);
                    }
                }
                self.delta(u) == uu
            },
            left_counit: true,
            right_counit: true,
            coassociative: true,
            left_antipode: true,
            right_antipode: true,
            involutive: (&self.antipode * &self.antipode).is_identity(),
        };
        for i in 0..d {
            for j in 0..d {
                let prod = alg.mul(&alg.basis(i), &alg.basis(j));
                if self.eps(&prod) != self.field().mul(self.eps(&alg.basis(i)), self.eps(&alg.basis(j))) {
                    r.counit_algebra_map = false;
                }
            }
        }
        for x in 0..d {
            let bx = alg.basis(x);
            let terms = self.coproduct_terms(&bx);
            let mut left = vec![0; d];
            let mut right = vec![0; d];
            let mut anti_l = vec![0; d];
            let mut anti_r = vec![0; d];
            for &(a, b, c) in &terms {
                self.add_into(&mut left, &alg.basis(b), self.field().mul(c, self.eps(&alg.basis(a))));
                self.add_into(&mut right, &alg.basis(a), self.field().mul(c, self.eps(&alg.basis(b))));
                self.add_into(&mut anti_l, &alg.mul(&self.s(&alg.basis(a)), &alg.basis(b)), c);
                self.add_into(&mut anti_r, &alg.mul(&alg.basis(a), &self.s(&alg.basis(b))), c);
            }
            let target = self.scaled(&self.unit(), self.eps(&bx));
            r.left_counit &= left == bx;
            r.right_counit &= right == bx;
            r.left_antipode &= anti_l == target;
            r.right_antipode &= anti_r == target;
            r.coassociative &= self.delta_left(&bx) == self.delta_right(&bx);
        }
        r
    }

    pub fn check_basic_identities(&self) -> IdentityReport {
        let d = self.dim();
        let alg = &self.algebra;
        let f = self.field();
        let mut r = IdentityReport {
            antipode_unit: self.s(alg.unit()) == alg.unit(),
            counit_antipode: (&self.antipode * &self.counit) == self.counit,
            comult_multiplicative: true,
            antipode_antimultiplicative: true,
            antipode_coproduct_flip: true,
            conjugation_left: true,
            conjugation_right: true,
            flipped_left_antipode: true,
            flipped_right_antipode: true,
        };
        for x in 0..d {
            let bx = alg.basis(x);
            let terms = self.coproduct_terms(&bx);
            // (5): Σ S(xu) ⊗ S(xv) = Σ S(x)v ⊗ S(x)u.
            let mut lhs = vec![0; d * d];
            for &(a, b, c) in &terms {
                let (sa, sb) = (self.s(&alg.basis(a)), self.s(&alg.basis(b)));
                for (i, &p) in sa.iter().enumerate().filter(|e| *e.1 != 0) {
                    for (j, &q) in sb.iter().enumerate().filter(|e| *e.1 != 0) {
                        lhs[i * d + j] = f.add(lhs[i * d + j], f.mul(c, f.mul(p, q)));
                    }
                }
            }
            let mut rhs = vec![0; d * d];
            for (a, b, c) in self.coproduct_terms(&self.s(&bx)) {
                rhs[b * d + a] = f.add(rhs[b * d + a], c);
            }
            r.antipode_coproduct_flip &= lhs == rhs;
            let mut s7 = vec![0; d];
            let mut s7p = vec![0; d];
            for &(a, b, c) in &terms {
                self.add_into(&mut s7, &alg.mul(&alg.basis(b), &self.s(&alg.basis(a))), c);
                self.add_into(&mut s7p, &alg.mul(&self.s(&alg.basis(b)), &alg.basis(a)), c);
            }
            let target = self.scaled(&self.unit(), self.eps(&bx));
            r.flipped_left_antipode &= s7 == target;
            r.flipped_right_antipode &= s7p == target;
            let tl = self.delta_left(&bx);
            let tr = self.delta_right(&bx);
            for y in 0..d {
                let by = alg.basis(y);
                let xy = alg.mul(&bx, &by);
                let yx = alg.mul(&by, &bx);
                // (1)
                r.comult_multiplicative &= self.delta(&xy) == self.tensor_mul(&self.delta(&bx), &self.delta(&by));
                // (3)
                r.antipode_antimultiplicative &= self.s(&xy) == alg.mul(&self.s(&by), &self.s(&bx));
                // (6): xy = Σ (xu)u · y · S((xu)v) · xv, using (Δ⊗1)Δx.
                let mut six = vec![0; d];
                for (k, &c) in tl.iter().enumerate().filter(|e| *e.1 != 0) {
                    let (a, b, e) = (k / (d * d), (k / d) % d, k % d);
                    let t = alg.mul(&alg.mul(&alg.mul(&alg.basis(a), &by), &self.s(&alg.basis(b))), &alg.basis(e));
                    self.add_into(&mut six, &t, c);
                }
                r.conjugation_left &= six == xy;
                // (6'): yx = Σ xu · S((xv)u) · y · (xv)v, using (1⊗Δ)Δx.
                let mut sixp = vec![0; d];
                for (k, &c) in tr.iter().enumerate().filter(|e| *e.1 != 0) {
                    let (a, b, e) = (k / (d * d), (k / d) % d, k % d);
                    let t = alg.mul(&alg.mul(&alg.mul(&alg.basis(a), &self.s(&alg.basis(b))), &by), &alg.basis(e));
                    self.add_into(&mut sixp, &t, c);
                }
                r.conjugation_right &= sixp == yx;
            }
        }
        r
    }

    /// The `H`-action on `Hom_k(N, M)` (flattened `dim N × dim M`):
    /// `[n](x·f) = Σ xu · [S(xv)·n]f`.
    pub fn hom_action(&self, n: &FdModule, m: &FdModule, x: &[u32]) -> FpMatrix {
        let f = self.field();
        let mut acc = FpMatrix::zeros(f, n.dim() * m.dim(), n.dim() * m.dim());
        for (a, b, c) in self.coproduct_terms(x) {
            let sb = n.act(&self.s(&self.algebra.basis(b)));
            acc = &acc + &sb.transpose().kron(m.action(a)).scale(c);
        }
        acc
    }

    /// The trivial module `R` via the counit.
    pub fn trivial_module(self: &Arc<Self>) -> FdModule {
        let chi: Vec<u32> = (0..self.dim()).map(|i| self.counit.get(i, 0)).collect();
        FdModule::character(self.algebra.clone(), &chi).expect("counit is a character")
    }
}

/// `GF(p)[G]` with `Δg = g⊗g`, `Sg = g⁻¹`, `εg = 1`.
pub fn group_hopf(g: &GroupTable, field: FieldSpec) -> HopfAlgebra {
    let n = g.order();
    let algebra = Arc::new(crate::algebra::group_algebra(g, field));
    let counit = FpMatrix::from_vec(field, n, 1, vec![1; n]);
    let mut comult = FpMatrix::zeros(field, n, n * n);
    let mut antipode = FpMatrix::zeros(field, n, n);
    for x in 0..n {
        comult.set(x, x * n + x, 1);
        antipode.set(x, g.inv(x), 1);
    }
    HopfAlgebra::new(algebra, counit, comult, antipode).expect("group Hopf algebra")
}

/// A normal Hopf subalgebra `K ⊆ H` with the quotient `H̄ = H/HK⁺`.
#[derive(Clone, Debug)]
pub struct NormalHopfSubalgebra {
    hopf: Arc<HopfAlgebra>,
    k: Subspace,
    k_plus: Subspace,
    ideal: Subspace,
    quotient: Arc<HopfAlgebra>,
    /// `H → H̄`, rows indexed by the basis of `H`.
    projection: FpMatrix,
    /// Representatives in `H` of the basis of `H̄`.
    section: FpMatrix,
}

impl NormalHopfSubalgebra {
    pub fn new(hopf: Arc<HopfAlgebra>, k: Subspace) -> Result<Self, HopfError> {
        let alg = hopf.algebra().clone();
        let d = alg.dim();
        let f = alg.field();
        alg.check_subalgebra(&k)?;
        let kk = Subspace::from_rows(&k.basis().kron(k.basis()));
        for i in 0..k.dim() {
            let a = k.basis().row(i);
            if !kk.contains_vector(&hopf.delta(a)) || !k.contains_vector(&hopf.s(a)) {
                return Err(HopfError::NotHopfSubalgebra);
            }
        }
        for i in 0..k.dim() {
            let a = k.basis().row(i);
            for x in 0..d {
                let terms = hopf.coproduct_terms(&alg.basis(x));
                let mut ad = vec![0; d];
                let mut ad_s = vec![0; d];
                for &(u, v, c) in &terms {
                    let left = alg.mul(&alg.mul(&alg.basis(u), a), &hopf.s(&alg.basis(v)));
                    let right = alg.mul(&alg.mul(&hopf.s(&alg.basis(u)), a), &alg.basis(v));
                    for (t, &s) in ad.iter_mut().zip(&left) {
                        *t = f.add(*t, f.mul(c, s));
                    }
                    for (t, &s) in ad_s.iter_mut().zip(&right) {
                        *t = f.add(*t, f.mul(c, s));
                    }
                }
                if !k.contains_vector(&ad) || !k.contains_vector(&ad_s) {
                    return Err(HopfError::NotNormal);
                }
            }
        }
        let k_plus = k.intersect(&crate::linalg::kernel_basis(hopf.counit()))?;
        let mut rows = vec![];
        for h in 0..d {
            for i in 0..k_plus.dim() {
                rows.push(alg.mul(&alg.basis(h), k_plus.basis().row(i)));
            }
        }
        let ideal = Subspace::from_rows(&vectors_to_matrix(f, d, &rows));
        // HK⁺ = K⁺H and the Hopf ideal conditions.
        let mut right_rows = vec![];
        for h in 0..d {
            for i in 0..k_plus.dim() {
                right_rows.push(alg.mul(k_plus.basis().row(i), &alg.basis(h)));
            }
        }
        let right_ideal = Subspace::from_rows(&vectors_to_matrix(f, d, &right_rows));
        if right_ideal != ideal {
            return Err(HopfError::NotHopfIdeal);
        }
        let full = FpMatrix::identity(f, d);
        let ih_hi = Subspace::from_rows(&FpMatrix::vstack(
            f,
            d * d,
            &[&ideal.basis().kron(&full), &full.kron(ideal.basis())],
        ));
        for i in 0..ideal.dim() {
            let r = ideal.basis().row(i);
            if hopf.eps(r) != 0 || !ideal.contains_vector(&hopf.s(r)) || !ih_hi.contains_vector(&hopf.delta(r)) {
                return Err(HopfError::NotHopfIdeal);
            }
        }
        let sq = Subquotient::new(Subspace::full(f, d), ideal.clone())?;
        let projection = sq.coords_unchecked(&full);
        let section = sq.complement().clone();
        let q = sq.dim();
        let mut products = FpMatrix::zeros(f, q * q, q);
        for i in 0..q {
            for j in 0..q {
                let prod = alg.mul(section.row(i), section.row(j));
                let c = projection.apply(&prod);
                for (t, &v) in c.iter().enumerate() {
                    products.set(i * q + j, t, v);
                }
            }
        }
        let unit = projection.apply(alg.unit());
        let qalg = Arc::new(FdAlgebra::new(f, q, products, unit)?);
        let counit = &section * hopf.counit();
        let comult = &(&section * hopf.comult()) * &projection.kron(&projection);
        let antipode = &(&section * hopf.antipode()) * &projection;
        let quotient = Arc::new(HopfAlgebra::new(qalg, counit, comult, antipode)?);
        Ok(Self { hopf, k, k_plus, ideal, quotient, projection, section })
    }

    /// `K = GF(p)[N]` inside `GF(p)[G]` for a normal subgroup `N`.
    pub fn for_subgroup(hopf: Arc<HopfAlgebra>, g: &GroupTable, n: &[usize]) -> Result<Self, HopfError> {
        if !g.is_subgroup(n) {
            return Err(AlgebraError::NotSubgroup.into());
        }
        let f = hopf.field();
        let rows: Vec<Vec<u32>> = n.iter().map(|&x| crate::algebra::basis_vector(g.order(), x)).collect();
        Self::new(hopf, Subspace::from_rows(&vectors_to_matrix(f, g.order(), &rows)))
    }

    pub fn hopf(&self) -> &Arc<HopfAlgebra> {
        &self.hopf
    }

    pub fn k(&self) -> &Subspace {
        &self.k
    }

    pub fn k_plus(&self) -> &Subspace {
        &self.k_plus
    }

    pub fn ideal(&self) -> &Subspace {
        &self.ideal
    }

    pub fn quotient(&self) -> &Arc<HopfAlgebra> {
        &self.quotient
    }

    pub fn projection(&self) -> &FpMatrix {
        &self.projection
    }

    pub fn section(&self) -> &FpMatrix {
        &self.section
    }

    /// An `H̄`-module viewed as an `H`-module through `H → H̄`.
    pub fn inflate(&self, p: &FdModule) -> FdModule {
        p.pullback(self.hopf.algebra().clone(), &self.projection)
    }

    /// Restriction of an `H`-module to the subalgebra `K`, on `K`'s echelon basis.
    pub fn k_algebra(&self) -> Result<FdAlgebra, HopfError> {
        let alg = self.hopf.algebra();
        let f = alg.field();
        let kd = self.k.dim();
        let mut products = FpMatrix::zeros(f, kd * kd, kd);
        for i in 0..kd {
            for j in 0..kd {
                let prod = alg.mul(self.k.basis().row(i), self.k.basis().row(j));
                let c = self.k.coordinates(&FpMatrix::row_vector(f, &prod))?;
                products.set_block(i * kd + j, 0, &c);
            }
        }
        let unit = self.k.coordinates(&FpMatrix::row_vector(f, alg.unit()))?;
        Ok(FdAlgebra::new(f, kd, products, unit.row(0).to_vec())?)
    }

    /// `x·v` on an `H`-module for the basis element `ȳ_t` of `H̄`, using its representative.
    fn rep_action(&self, m: &FdModule, t: usize) -> FpMatrix {
        m.act(self.section.row(t))
    }
}

/// `Hom_K(N, M)` as an `H̄`-module; elements are flattened `dim N × dim M` matrices.
#[derive(Clone, Debug)]
pub struct HomK {
    pub carrier: Subspace,
    pub module: FdModule,
    pub src_dim: usize,
    pub tgt_dim: usize,
}

impl HomK {
    /// The map with carrier coordinates `c` as a `dim N × dim M` matrix.
    pub fn matrix_of(&self, c: &[u32]) -> FpMatrix {
        let flat = self.carrier.basis().apply(c);
        FpMatrix::from_vec(self.carrier.field(), self.src_dim, self.tgt_dim, flat)
    }

    /// Carrier coordinates of a `K`-linear map.
    pub fn coords_of(&self, m: &FpMatrix) -> Result<Vec<u32>, HopfError> {
        let flat = FpMatrix::row_vector(m.field(), m.data());
        Ok(self.carrier.coordinates(&flat)?.row(0).to_vec())
    }
}

/// `Hom_K(N, M)` with `[n](x̄·f) = Σ xu · [S(xv)·n]f`; `HK⁺` acting trivially is verified.
pub fn hom_k_module(n: &FdModule, m: &FdModule, nk: &NormalHopfSubalgebra) -> Result<HomK, HopfError> {
    let hopf = nk.hopf();
    let carrier = hom_module_space(n, m, nk.k())?;
    for i in 0..nk.ideal().dim() {
        let act = hopf.hom_action(n, m, nk.ideal().basis().row(i));
        if !(carrier.basis() * &act).is_zero() {
            return Err(HopfError::ActionNotWellDefined);
        }
    }
    let q = nk.quotient().dim();
    let mut action = Vec::with_capacity(q);
    for t in 0..q {
        let act = hopf.hom_action(n, m, nk.section().row(t));
        let img = carrier.basis() * &act;
        action.push(carrier.coordinates(&img).map_err(|_| HopfError::ActionNotWellDefined)?);
    }
    let module = FdModule::new(nk.quotient().algebra().clone(), carrier.dim(), action)
        .map_err(|_| HopfError::ActionNotWellDefined)?;
    Ok(HomK { carrier, module, src_dim: n.dim(), tgt_dim: m.dim() })
}

/// The map `Hom_K(N, M) → Hom_K(N', M')`, `f ↦ ν f μ`, in carrier coordinates.
pub fn hom_k_map(src: &HomK, tgt: &HomK, nu: &FpMatrix, mu: &FpMatrix) -> Result<FpMatrix, HopfError> {
    let f = src.carrier.field();
    let mut rows = Vec::with_capacity(src.carrier.dim());
    for i in 0..src.carrier.dim() {
        let fi = FpMatrix::from_vec(f, src.src_dim, src.tgt_dim, src.carrier.basis().row(i).to_vec());
        let g = &(nu * &fi) * mu;
        rows.push(tgt.coords_of(&g)?);
    }
    Ok(vectors_to_matrix(f, tgt.carrier.dim(), &rows))
}

/// `M^K` with the `H̄`-structure `x̄·m = x·m`.
pub fn fixed_point_module(m: &FdModule, nk: &NormalHopfSubalgebra) -> Result<(FdModule, Subspace), HopfError> {
    let fp = crate::algebra::fixed_points(m, nk.k(), nk.hopf().counit());
    for i in 0..nk.ideal().dim() {
        if !(fp.basis() * &m.act(nk.ideal().basis().row(i))).is_zero() {
            return Err(HopfError::NotStable);
        }
    }
    let q = nk.quotient().dim();
    let mut action = Vec::with_capacity(q);
    for t in 0..q {
        let img = fp.basis() * &nk.rep_action(m, t);
        action.push(fp.coordinates(&img).map_err(|_| HopfError::NotStable)?);
    }
    let module = FdModule::new(nk.quotient().algebra().clone(), fp.dim(), action).map_err(|_| HopfError::NotStable)?;
    Ok((module, fp))
}

/// `Hom_R(H̄, M)` with `[x̄](ȳ·g) = g(x̄ȳ)`; elements are flattened `dim H̄ × dim M` matrices.
pub fn hom_from_quotient_module(m: &FdModule, nk: &NormalHopfSubalgebra) -> FdModule {
    let qalg = nk.quotient().algebra().clone();
    let id = FpMatrix::identity(m.field(), m.dim());
    let action = (0..qalg.dim()).map(|y| qalg.right_mult(&qalg.basis(y)).transpose().kron(&id)).collect();
    FdModule::new_unchecked(qalg.clone(), qalg.dim() * m.dim(), action).expect("shapes")
}

/// The mutually inverse `H̄`-isomorphisms between `Hom_K(H, M)` and `Hom_R(H̄, M)`.
#[derive(Clone, Debug)]
pub struct PhiPsi {
    pub domain: HomK,
    pub codomain: FdModule,
    /// Rows indexed by carrier coordinates of `Hom_K(H, M)`.
    pub phi: FpMatrix,
    pub psi: FpMatrix,
}

pub fn phi_psi(m: &FdModule, nk: &NormalHopfSubalgebra) -> Result<PhiPsi, HopfError> {
    let hopf = nk.hopf();
    let alg = hopf.algebra().clone();
    let f = alg.field();
    let d = alg.dim();
    let dm = m.dim();
    let q = nk.quotient().dim();
    let reg = FdModule::regular(alg.clone());
    let domain = hom_k_module(&reg, m, nk)?;
    let codomain = hom_from_quotient_module(m, nk);
    // Φ(F) has row t equal to Σ c_ab (S(b_b)·F) ρ_M(b_a) over Δ(x_t).
    let phi_value = |fm: &FpMatrix, x: &[u32]| -> Vec<u32> {
        let mut acc = vec![0u32; dm];
        for (a, b, c) in hopf.coproduct_terms(x) {
            let v = m.action(a).apply(&fm.apply(&hopf.s(&alg.basis(b))));
            for (t, &s) in acc.iter_mut().zip(&v) {
                *t = f.add(*t, f.mul(c, s));
            }
        }
        acc
    };
    let mut phi_rows = Vec::with_capacity(domain.carrier.dim());
    for i in 0..domain.carrier.dim() {
        let fm = FpMatrix::from_vec(f, d, dm, domain.carrier.basis().row(i).to_vec());
        for r in 0..nk.ideal().dim() {
            if phi_value(&fm, nk.ideal().basis().row(r)).iter().any(|&x| x != 0) {
                return Err(HopfError::InverseCheckFailed("Φ depends on the representative"));
            }
        }
        let mut row = Vec::with_capacity(q * dm);
        for t in 0..q {
            row.extend(phi_value(&fm, nk.section().row(t)));
        }
        phi_rows.push(row);
    }
    let phi = vectors_to_matrix(f, q * dm, &phi_rows);
    // Ψ(G) has row h equal to Σ c_ab (π(S(b_a))·G) ρ_M(b_b) over Δ(b_h).
    let mut psi_rows = Vec::with_capacity(q * dm);
    for e in 0..q * dm {
        let mut g = FpMatrix::zeros(f, q, dm);
        g.set(e / dm, e % dm, 1);
        let mut out = FpMatrix::zeros(f, d, dm);
        for h in 0..d {
            let mut acc = vec![0u32; dm];
            for (a, b, c) in hopf.coproduct_terms(&alg.basis(h)) {
                let bar = nk.projection().apply(&hopf.s(&alg.basis(a)));
                let v = m.action(b).apply(&g.apply(&bar));
                for (t, &s) in acc.iter_mut().zip(&v) {
                    *t = f.add(*t, f.mul(c, s));
                }
            }
            for (j, &v) in acc.iter().enumerate() {
                out.set(h, j, v);
            }
        }
        let coords = domain.coords_of(&out).map_err(|_| HopfError::InverseCheckFailed("Ψ is not K-linear"))?;
        psi_rows.push(coords);
    }
    let psi = vectors_to_matrix(f, domain.carrier.dim(), &psi_rows);
    if !(&phi * &psi).is_identity() || !(&psi * &phi).is_identity() {
        return Err(HopfError::InverseCheckFailed("Φ and Ψ are not mutually inverse"));
    }
    if !domain.module.intertwines(&codomain, &phi) || !codomain.intertwines(&domain.module, &psi) {
        return Err(HopfError::InverseCheckFailed("Φ or Ψ is not H̄-linear"));
    }
    Ok(PhiPsi { domain, codomain, phi, psi })
}

/// The mutually inverse isomorphisms `Hom_H̄(P, Hom_K(Q, M)) ≅ Hom_H(P ⊗ Q, M)`.
#[derive(Clone, Debug)]
pub struct AlphaBeta {
    pub inner: HomK,
    /// `Hom_H̄(P, Hom_K(Q, M))` inside flattened `dim P × dim Hom_K(Q, M)` matrices.
    pub left: Subspace,
    /// `Hom_H(P ⊗ Q, M)` inside flattened `dim P·dim Q × dim M` matrices.
    pub right: Subspace,
    pub tensor: FdModule,
    pub alpha: FpMatrix,
    pub beta: FpMatrix,
    pub p_dim: usize,
}

pub fn adjunction_alpha_beta(p: &FdModule, q: &FdModule, m: &FdModule, nk: &NormalHopfSubalgebra) -> Result<AlphaBeta, HopfError> {
    let hopf = nk.hopf();
    let f = hopf.field();
    let inner = hom_k_module(q, m, nk)?;
    let qfull = Subspace::full(f, nk.quotient().dim());
    let left = hom_module_space(p, &inner.module, &qfull)?;
    let infl = nk.inflate(p);
    let tensor = tensor_over_field(&infl, q, Some(hopf))?;
    let right = hom_module_space(&tensor, m, &Subspace::full(f, hopf.dim()))?;
    let (dp, dq, dm, dc) = (p.dim(), q.dim(), m.dim(), inner.carrier.dim());
    let alpha_of = |fm: &FpMatrix| -> FpMatrix {
        let mut g = FpMatrix::zeros(f, dp * dq, dm);
        for i in 0..dp {
            let block = inner.matrix_of(fm.row(i));
            g.set_block(i * dq, 0, &block);
        }
        g
    };
    let mut alpha_rows = Vec::with_capacity(left.dim());
    for r in 0..left.dim() {
        let fm = FpMatrix::from_vec(f, dp, dc, left.basis().row(r).to_vec());
        let g = alpha_of(&fm);
        let c = right
            .coordinates(&FpMatrix::row_vector(f, g.data()))
            .map_err(|_| HopfError::InverseCheckFailed("α does not land in H-linear maps"))?;
        alpha_rows.push(c.row(0).to_vec());
    }
    let mut beta_rows = Vec::with_capacity(right.dim());
    for r in 0..right.dim() {
        let g = FpMatrix::from_vec(f, dp * dq, dm, right.basis().row(r).to_vec());
        let mut fm = FpMatrix::zeros(f, dp, dc);
        for i in 0..dp {
            let block = g.block(i * dq, 0, dq, dm);
            let c = inner.coords_of(&block).map_err(|_| HopfError::InverseCheckFailed("β does not land in K-linear maps"))?;
            for (k, &v) in c.iter().enumerate() {
                fm.set(i, k, v);
            }
        }
        let c = left
            .coordinates(&FpMatrix::row_vector(f, fm.data()))
            .map_err(|_| HopfError::InverseCheckFailed("β does not land in H̄-linear maps"))?;
        beta_rows.push(c.row(0).to_vec());
    }
    let alpha = vectors_to_matrix(f, right.dim(), &alpha_rows);
    let beta = vectors_to_matrix(f, left.dim(), &beta_rows);
    if !(&alpha * &beta).is_identity() || !(&beta * &alpha).is_identity() {
        return Err(HopfError::InverseCheckFailed("α and β are not mutually inverse"));
    }
    Ok(AlphaBeta { inner, left, right, tensor, alpha, beta, p_dim: dp })
}

/// Checks the naturality square of α for maps `ϖ: P' → P`, `κ: Q' → Q`, `μ: M → M'`
/// between the isomorphisms `src` (for `P, Q, M`) and `tgt` (for `P', Q', M'`).
pub fn alpha_naturality(src: &AlphaBeta, tgt: &AlphaBeta, varpi: &FpMatrix, kappa: &FpMatrix, mu: &FpMatrix) -> Result<bool, HopfError> {
    let (left_ind, right_ind) = alpha_induced(src, tgt, varpi, kappa, mu)?;
    Ok(&src.alpha * &right_ind == &left_ind * &tgt.alpha)
}

/// The maps induced by `ϖ, κ, μ` on the left and right carriers, in carrier coordinates.
pub fn alpha_induced(src: &AlphaBeta, tgt: &AlphaBeta, varpi: &FpMatrix, kappa: &FpMatrix, mu: &FpMatrix) -> Result<(FpMatrix, FpMatrix), HopfError> {
    let f = varpi.field();
    let inner_map = hom_k_map(&src.inner, &tgt.inner, kappa, mu)?;
    // Left side: F ↦ ϖ · F · Hom_K(κ, μ).
    let mut left_rows = Vec::with_capacity(src.left.dim());
    for r in 0..src.left.dim() {
        let fm = FpMatrix::from_vec(f, src.p_dim, src.inner.carrier.dim(), src.left.basis().row(r).to_vec());
        let img = &(varpi * &fm) * &inner_map;
        left_rows.push(tgt.left.coordinates(&FpMatrix::row_vector(f, img.data()))?.row(0).to_vec());
    }
    let left_ind = vectors_to_matrix(f, tgt.left.dim(), &left_rows);
    // Right side: G ↦ (ϖ ⊗ κ) · G · μ.
    let pk = varpi.kron(kappa);
    let (rows_src, cols_src) = (src.tensor.dim(), mu.rows());
    let mut right_rows = Vec::with_capacity(src.right.dim());
    for r in 0..src.right.dim() {
        let g = FpMatrix::from_vec(f, rows_src, cols_src, src.right.basis().row(r).to_vec());
        let img = &(&pk * &g) * mu;
        right_rows.push(tgt.right.coordinates(&FpMatrix::row_vector(f, img.data()))?.row(0).to_vec());
    }
    let right_ind = vectors_to_matrix(f, tgt.right.dim(), &right_rows);
    Ok((left_ind, right_ind))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gf(p: u32) -> FieldSpec {
        FieldSpec::new(p).unwrap()
    }

    #[test]
    fn group_hopf_examples() {
        let c2 = group_hopf(&GroupTable::cyclic(2), gf(2));
        assert!(c2.antipode().is_identity());
        let c4 = group_hopf(&GroupTable::cyclic(4), gf(2));
        assert_eq!(c4.s(&[0, 1, 0, 0]), vec![0, 0, 0, 1]);
        let s3 = group_hopf(&GroupTable::symmetric3(), gf(3));
        assert!(s3.check_axioms().all());
        assert!(s3.check_basic_identities().all());
    }

    #[test]
    fn corrupted_antipode_breaks_flip_identity() {
        let h = group_hopf(&GroupTable::cyclic(4), gf(2));
        let mut s = h.antipode().clone();
        s.set(1, 1, 1);
        let bad = HopfAlgebra::new_unchecked(h.algebra().clone(), h.counit().clone(), h.comult().clone(), s).unwrap();
        assert!(!bad.check_basic_identities().antipode_coproduct_flip);
        assert!(!bad.check_axioms().all());
    }

    #[test]
    fn quotient_of_c4_by_c2() {
        let g = GroupTable::cyclic(4);
        let h = Arc::new(group_hopf(&g, gf(2)));
        let nk = NormalHopfSubalgebra::for_subgroup(h, &g, &[0, 2]).unwrap();
        assert_eq!(nk.quotient().dim(), 2);
        assert_eq!(nk.ideal().dim(), 2);
        let s3 = GroupTable::symmetric3();
        let h3 = Arc::new(group_hopf(&s3, gf(3)));
        assert!(matches!(
            NormalHopfSubalgebra::for_subgroup(h3.clone(), &s3, &[0, 1]),
            Err(HopfError::NotNormal)
        ));
        let a3 = NormalHopfSubalgebra::for_subgroup(h3, &s3, &[0, 3, 4]).unwrap();
        assert_eq!(a3.quotient().dim(), 2);
    }

    #[test]
    fn hom_k_for_scalars_is_conjugation() {
        let g = GroupTable::cyclic(4);
        let h = Arc::new(group_hopf(&g, gf(2)));
        let nk = NormalHopfSubalgebra::for_subgroup(h.clone(), &g, &[0]).unwrap();
        let reg = FdModule::regular(h.algebra().clone());
        let hk = hom_k_module(&reg, &reg, &nk).unwrap();
        assert_eq!(hk.carrier.dim(), 16);
        // g·f = ρ(g⁻¹) f ρ(g) in row convention.
        let f0 = hk.matrix_of(&crate::algebra::basis_vector(16, 5));
        let acted = hk.matrix_of(&hk.module.action(1).apply(&crate::algebra::basis_vector(16, 5)));
        let expect = &(&reg.act(&h.s(&[0, 1, 0, 0])) * &f0) * reg.action(1);
        assert_eq!(acted, expect);
    }

    #[test]
    fn phi_psi_dimensions() {
        let g = GroupTable::cyclic(4);
        let h = Arc::new(group_hopf(&g, gf(2)));
        let nk = NormalHopfSubalgebra::for_subgroup(h.clone(), &g, &[0, 2]).unwrap();
        let pp = phi_psi(&h.trivial_module(), &nk).unwrap();
        assert_eq!(pp.domain.carrier.dim(), 2);
        let s3 = GroupTable::symmetric3();
        let h3 = Arc::new(group_hopf(&s3, gf(3)));
        let a3 = NormalHopfSubalgebra::for_subgroup(h3.clone(), &s3, &[0, 3, 4]).unwrap();
        let pp3 = phi_psi(&h3.trivial_module(), &a3).unwrap();
        assert_eq!(pp3.domain.carrier.dim(), 2);
    }

    #[test]
    fn alpha_beta_trivial_modules() {
        let g = GroupTable::cyclic(4);
        let h = Arc::new(group_hopf(&g, gf(2)));
        let nk = NormalHopfSubalgebra::for_subgroup(h.clone(), &g, &[0, 2]).unwrap();
        let hbar = nk.quotient().clone();
        let p = hbar.trivial_module();
        let t = h.trivial_module();
        let ab = adjunction_alpha_beta(&p, &t, &t, &nk).unwrap();
        assert_eq!((ab.left.dim(), ab.right.dim()), (1, 1));
    }
}
