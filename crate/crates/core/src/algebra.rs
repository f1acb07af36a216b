//! Finite groups, finite-dimensional algebras and their modules.
//!
//! Module elements are row vectors and an algebra element `a` acts by a matrix `ρ(a)`
//! on the right, so `a·m = m ρ(a)` and `ρ(ab) = ρ(b) ρ(a)`.

use crate::hopf::HopfAlgebra;
use crate::linalg::{kernel_basis, FieldSpec, FpMatrix, LinalgError, Subquotient, Subspace};
use std::collections::VecDeque;
use std::sync::Arc;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum AlgebraError {
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error("Cayley table is not a Latin square")]
    NotLatinSquare,
    #[error("group law is not associative at ({0}, {1}, {2})")]
    GroupNotAssociative(usize, usize, usize),
    #[error("Cayley table has no two-sided identity")]
    NoIdentity,
    #[error("structure constants are not associative at basis triple ({0}, {1}, {2})")]
    NotAssociative(usize, usize, usize),
    #[error("unit law fails at basis element {0}")]
    UnitLaw(usize),
    #[error("action matrix for basis element {0} has the wrong shape")]
    ActionShape(usize),
    #[error("action is not multiplicative at basis pair ({0}, {1})")]
    NotMultiplicative(usize, usize),
    #[error("the unit does not act as the identity")]
    NotUnital,
    #[error("matrix does not intertwine the actions")]
    NotIntertwining,
    #[error("spanning set does not contain the unit")]
    SubalgebraNotUnital,
    #[error("spanning set is not closed under multiplication")]
    SubalgebraNotClosed,
    #[error("fixed points are not stable under the quotient action")]
    NotStable,
    #[error("radical spanning set is not nilpotent")]
    NotNilpotent,
    #[error("subspace is not a submodule")]
    NotSubmodule,
    #[error("element list is not a subgroup")]
    NotSubgroup,
    #[error("subgroup is not normal")]
    NotNormal,
    #[error("generators do not generate the algebra")]
    NotGenerating,
    #[error("modules live over different algebras")]
    AlgebraMismatch,
}

/// A finite group given by its Cayley table; `table[a][b]` is the index of `a·b`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroupTable {
    table: Vec<Vec<usize>>,
    identity: usize,
    inverse: Vec<usize>,
}

impl GroupTable {
    pub fn new(table: Vec<Vec<usize>>) -> Result<Self, AlgebraError> {
        let n = table.len();
        if n == 0 {
            return Err(AlgebraError::NotLatinSquare);
        }
        for row in &table {
            if row.len() != n {
                return Err(AlgebraError::NotLatinSquare);
            }
            let mut seen = vec![false; n];
            for &x in row {
                if x >= n || seen[x] {
                    return Err(AlgebraError::NotLatinSquare);
                }
                seen[x] = true;
            }
        }
        for j in 0..n {
            let mut seen = vec![false; n];
            for row in &table {
                if seen[row[j]] {
                    return Err(AlgebraError::NotLatinSquare);
                }
                seen[row[j]] = true;
            }
        }
        let identity = (0..n)
            .find(|&e| (0..n).all(|x| table[e][x] == x && table[x][e] == x))
            .ok_or(AlgebraError::NoIdentity)?;
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    if table[table[a][b]][c] != table[a][table[b][c]] {
                        return Err(AlgebraError::GroupNotAssociative(a, b, c));
                    }
                }
            }
        }
        let inverse = (0..n).map(|a| (0..n).find(|&b| table[a][b] == identity).unwrap()).collect();
        Ok(Self { table, identity, inverse })
    }

    /// Cyclic group of order `n`; element `k` is `g^k`.
    pub fn cyclic(n: usize) -> Self {
        Self::new((0..n).map(|a| (0..n).map(|b| (a + b) % n).collect()).collect()).expect("cyclic table")
    }

    pub fn klein4() -> Self {
        Self::direct_product(&Self::cyclic(2), &Self::cyclic(2))
    }

    /// Elements `±1, ±i, ±j, ±k` in that order.
    pub fn quaternion8() -> Self {
        // unit index u ∈ {1,i,j,k} = 0..4 and sign s; element index 2u + s.
        let unit_mul = |a: usize, b: usize| -> (usize, bool) {
            match (a, b) {
                (0, x) | (x, 0) => (x, false),
                (x, y) if x == y => (0, true),
                (1, 2) => (3, false),
                (2, 1) => (3, true),
                (2, 3) => (1, false),
                (3, 2) => (1, true),
                (3, 1) => (2, false),
                (1, 3) => (2, true),
                _ => unreachable!(),
            }
        };
        let table = (0..8)
            .map(|x| {
                (0..8)
                    .map(|y| {
                        let (u, neg) = unit_mul(x / 2, y / 2);
                        let sign = (x % 2 == 1) ^ (y % 2 == 1) ^ neg;
                        2 * u + sign as usize
                    })
                    .collect()
            })
            .collect();
        Self::new(table).expect("quaternion table")
    }

    /// Permutations of `{0,1,2}` in lexicographic order, composed as `(ab)(x) = a(b(x))`.
    pub fn symmetric3() -> Self {
        let perms: Vec<[usize; 3]> =
            vec![[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];
        let idx = |p: [usize; 3]| perms.iter().position(|&q| q == p).unwrap();
        let table = perms
            .iter()
            .map(|a| perms.iter().map(|b| idx([a[b[0]], a[b[1]], a[b[2]]])).collect())
            .collect();
        Self::new(table).expect("symmetric table")
    }

    /// Element `(a, b)` has index `a * |H| + b`.
    pub fn direct_product(g: &GroupTable, h: &GroupTable) -> Self {
        let (n, m) = (g.order(), h.order());
        let table = (0..n * m)
            .map(|x| (0..n * m).map(|y| g.mul(x / m, y / m) * m + h.mul(x % m, y % m)).collect())
            .collect();
        Self::new(table).expect("product table")
    }

    pub fn order(&self) -> usize {
        self.table.len()
    }

    pub fn identity(&self) -> usize {
        self.identity
    }

    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.table[a][b]
    }

    pub fn inv(&self, a: usize) -> usize {
        self.inverse[a]
    }

    pub fn table(&self) -> &[Vec<usize>] {
        &self.table
    }

    /// Subgroup generated by `gens`, sorted.
    pub fn closure(&self, gens: &[usize]) -> Vec<usize> {
        let mut inside = vec![false; self.order()];
        inside[self.identity] = true;
        let mut queue: VecDeque<usize> = VecDeque::from([self.identity]);
        while let Some(x) = queue.pop_front() {
            for &g in gens {
                let y = self.mul(x, g);
                if !inside[y] {
                    inside[y] = true;
                    queue.push_back(y);
                }
            }
        }
        (0..self.order()).filter(|&x| inside[x]).collect()
    }

    /// A small generating set found greedily in index order.
    pub fn generators(&self) -> Vec<usize> {
        let mut gens = Vec::new();
        let mut span = self.closure(&gens);
        for x in 0..self.order() {
            if span.len() == self.order() {
                break;
            }
            if !span.contains(&x) {
                gens.push(x);
                span = self.closure(&gens);
            }
        }
        gens
    }

    pub fn is_subgroup(&self, elems: &[usize]) -> bool {
        let mut sorted = elems.to_vec();
        sorted.sort_unstable();
        sorted.dedup();
        sorted.len() == elems.len()
            && sorted.iter().all(|&x| x < self.order())
            && self.closure(&sorted) == sorted
    }

    pub fn is_normal(&self, elems: &[usize]) -> bool {
        self.is_subgroup(elems)
            && (0..self.order())
                .all(|g| elems.iter().all(|&n| elems.contains(&self.mul(self.mul(g, n), self.inv(g)))))
    }

    /// Quotient by a normal subgroup, with cosets numbered by smallest representative,
    /// and the coset index of every element.
    pub fn quotient(&self, normal: &[usize]) -> Result<(GroupTable, Vec<usize>), AlgebraError> {
        if !self.is_subgroup(normal) {
            return Err(AlgebraError::NotSubgroup);
        }
        if !self.is_normal(normal) {
            return Err(AlgebraError::NotNormal);
        }
        let n = self.order();
        let mut coset = vec![usize::MAX; n];
        let mut reps = Vec::new();
        for g in 0..n {
            if coset[g] == usize::MAX {
                for &k in normal {
                    coset[self.mul(g, k)] = reps.len();
                }
                reps.push(g);
            }
        }
        let table = reps.iter().map(|&a| reps.iter().map(|&b| coset[self.mul(a, b)]).collect()).collect();
        Ok((GroupTable::new(table)?, coset))
    }
}

/// A finite-dimensional associative unital algebra given by structure constants.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FdAlgebra {
    field: FieldSpec,
    dim: usize,
    /// Row `i * dim + j` holds `b_i · b_j`.
    products: FpMatrix,
    unit: Vec<u32>,
    generators: Vec<Vec<u32>>,
}

impl FdAlgebra {
    pub fn new(field: FieldSpec, dim: usize, products: FpMatrix, unit: Vec<u32>) -> Result<Self, AlgebraError> {
        if products.shape() != (dim * dim, dim) || unit.len() != dim {
            return Err(LinalgError::DimensionMismatch("structure constants".into()).into());
        }
        let generators = (0..dim).map(|i| basis_vector(dim, i)).collect();
        let alg = Self { field, dim, products, unit, generators };
        for i in 0..dim {
            let bi = basis_vector(dim, i);
            if alg.mul(&alg.unit, &bi) != bi || alg.mul(&bi, &alg.unit) != bi {
                return Err(AlgebraError::UnitLaw(i));
            }
        }
        for i in 0..dim {
            for j in 0..dim {
                let ij = alg.products.row(i * dim + j).to_vec();
                for k in 0..dim {
                    let jk = alg.products.row(j * dim + k).to_vec();
                    if alg.mul(&ij, &basis_vector(dim, k)) != alg.mul(&basis_vector(dim, i), &jk) {
                        return Err(AlgebraError::NotAssociative(i, j, k));
                    }
                }
            }
        }
        Ok(alg)
    }

    /// The base field as a one-dimensional algebra.
    pub fn ground(field: FieldSpec) -> Self {
        Self::new(field, 1, FpMatrix::identity(field, 1), vec![1]).expect("ground field")
    }

    /// Replaces the generating set used for intertwining checks; generation is verified.
    pub fn with_generators(mut self, gens: Vec<Vec<u32>>) -> Result<Self, AlgebraError> {
        let mut span = Subspace::from_rows(&FpMatrix::row_vector(self.field, &self.unit));
        loop {
            let mut rows = vec![];
            for i in 0..span.dim() {
                for g in &gens {
                    rows.push(self.mul(span.basis().row(i), g));
                }
            }
            let more = Subspace::from_rows(&vectors_to_matrix(self.field, self.dim, &rows));
            let next = span.sum(&more)?;
            if next.dim() == span.dim() {
                break;
            }
            span = next;
        }
        if span.dim() != self.dim {
            return Err(AlgebraError::NotGenerating);
        }
        self.generators = gens;
        Ok(self)
    }

    pub fn field(&self) -> FieldSpec {
        self.field
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn unit(&self) -> &[u32] {
        &self.unit
    }

    pub fn generators(&self) -> &[Vec<u32>] {
        &self.generators
    }

    pub fn products(&self) -> &FpMatrix {
        &self.products
    }

    pub fn basis(&self, i: usize) -> Vec<u32> {
        basis_vector(self.dim, i)
    }

    pub fn mul(&self, x: &[u32], y: &[u32]) -> Vec<u32> {
        let f = self.field;
        let mut acc = vec![0u32; self.dim];
        for (i, &a) in x.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &b) in y.iter().enumerate() {
                if b == 0 {
                    continue;
                }
                let c = f.mul(a, b);
                for (t, &s) in acc.iter_mut().zip(self.products.row(i * self.dim + j)) {
                    if s != 0 {
                        *t = f.add(*t, f.mul(c, s));
                    }
                }
            }
        }
        acc
    }

    /// Matrix of `y ↦ x·y`.
    pub fn left_mult(&self, x: &[u32]) -> FpMatrix {
        let rows: Vec<Vec<u32>> = (0..self.dim).map(|j| self.mul(x, &self.basis(j))).collect();
        vectors_to_matrix(self.field, self.dim, &rows)
    }

    /// Matrix of `y ↦ y·x`.
    pub fn right_mult(&self, x: &[u32]) -> FpMatrix {
        let rows: Vec<Vec<u32>> = (0..self.dim).map(|j| self.mul(&self.basis(j), x)).collect();
        vectors_to_matrix(self.field, self.dim, &rows)
    }

    /// Verifies that `span` is a unital subalgebra.
    pub fn check_subalgebra(&self, span: &Subspace) -> Result<(), AlgebraError> {
        if !span.contains_vector(&self.unit) {
            return Err(AlgebraError::SubalgebraNotUnital);
        }
        let b = span.basis();
        for i in 0..b.rows() {
            for j in 0..b.rows() {
                if !span.contains_vector(&self.mul(b.row(i), b.row(j))) {
                    return Err(AlgebraError::SubalgebraNotClosed);
                }
            }
        }
        Ok(())
    }

    /// Two-sided ideal generated by `span`.
    pub fn ideal_generated(&self, span: &Subspace) -> Subspace {
        let mut cur = span.clone();
        loop {
            let mut rows = vec![];
            for i in 0..cur.dim() {
                let v = cur.basis().row(i);
                for j in 0..self.dim {
                    let bj = self.basis(j);
                    rows.push(self.mul(&bj, v));
                    rows.push(self.mul(v, &bj));
                }
            }
            let next = cur.sum(&Subspace::from_rows(&vectors_to_matrix(self.field, self.dim, &rows))).unwrap();
            if next.dim() == cur.dim() {
                return cur;
            }
            cur = next;
        }
    }
}

pub fn basis_vector(n: usize, i: usize) -> Vec<u32> {
    let mut v = vec![0; n];
    v[i] = 1;
    v
}

pub fn vectors_to_matrix(field: FieldSpec, cols: usize, rows: &[Vec<u32>]) -> FpMatrix {
    let mut data = Vec::with_capacity(rows.len() * cols);
    for r in rows {
        assert_eq!(r.len(), cols, "vector length mismatch");
        data.extend_from_slice(r);
    }
    FpMatrix::from_vec(field, rows.len(), cols, data)
}

/// The group algebra `GF(p)[G]` with basis indexed by group elements.
pub fn group_algebra(g: &GroupTable, field: FieldSpec) -> FdAlgebra {
    let n = g.order();
    let mut products = FpMatrix::zeros(field, n * n, n);
    for a in 0..n {
        for b in 0..n {
            products.set(a * n + b, g.mul(a, b), 1);
        }
    }
    let alg = FdAlgebra::new(field, n, products, basis_vector(n, g.identity())).expect("group algebra");
    let gens = g.generators().into_iter().map(|x| basis_vector(n, x)).collect();
    alg.with_generators(gens).expect("group generators generate")
}

/// A left module over `algebra` given by one action matrix per basis element.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FdModule {
    algebra: Arc<FdAlgebra>,
    dim: usize,
    action: Vec<FpMatrix>,
}

impl FdModule {
    pub fn new(algebra: Arc<FdAlgebra>, dim: usize, action: Vec<FpMatrix>) -> Result<Self, AlgebraError> {
        let m = Self::new_unchecked(algebra, dim, action)?;
        m.validate()?;
        Ok(m)
    }

    /// Shape checks only.
    pub fn new_unchecked(algebra: Arc<FdAlgebra>, dim: usize, action: Vec<FpMatrix>) -> Result<Self, AlgebraError> {
        if action.len() != algebra.dim() {
            return Err(AlgebraError::ActionShape(action.len()));
        }
        for (i, a) in action.iter().enumerate() {
            if a.shape() != (dim, dim) || a.field() != algebra.field() {
                return Err(AlgebraError::ActionShape(i));
            }
        }
        Ok(Self { algebra, dim, action })
    }

    pub fn validate(&self) -> Result<(), AlgebraError> {
        let a = &self.algebra;
        if !self.act(a.unit()).is_identity() {
            return Err(AlgebraError::NotUnital);
        }
        for i in 0..a.dim() {
            for j in 0..a.dim() {
                let prod = self.act(a.products().row(i * a.dim() + j));
                if prod != &self.action[j] * &self.action[i] {
                    return Err(AlgebraError::NotMultiplicative(i, j));
                }
            }
        }
        Ok(())
    }

    pub fn regular(algebra: Arc<FdAlgebra>) -> Self {
        let action = (0..algebra.dim()).map(|i| algebra.left_mult(&algebra.basis(i))).collect();
        Self { dim: algebra.dim(), algebra, action }
    }

    /// One-dimensional module on which `b_i` acts by `chi[i]`; `chi` must be multiplicative.
    pub fn character(algebra: Arc<FdAlgebra>, chi: &[u32]) -> Result<Self, AlgebraError> {
        let f = algebra.field();
        let action = chi.iter().map(|&c| FpMatrix::scalar(f, 1, c)).collect();
        Self::new(algebra, 1, action)
    }

    /// Direct sum of `n` copies of the trivial character given by `chi`.
    pub fn scalar_action(algebra: Arc<FdAlgebra>, chi: &[u32], n: usize) -> Result<Self, AlgebraError> {
        let f = algebra.field();
        let action = chi.iter().map(|&c| FpMatrix::scalar(f, n, c)).collect();
        Self::new(algebra, n, action)
    }

    pub fn zero(algebra: Arc<FdAlgebra>) -> Self {
        let f = algebra.field();
        let action = (0..algebra.dim()).map(|_| FpMatrix::zeros(f, 0, 0)).collect();
        Self { algebra, dim: 0, action }
    }

    pub fn algebra(&self) -> &Arc<FdAlgebra> {
        &self.algebra
    }

    pub fn field(&self) -> FieldSpec {
        self.algebra.field()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn action(&self, i: usize) -> &FpMatrix {
        &self.action[i]
    }

    pub fn actions(&self) -> &[FpMatrix] {
        &self.action
    }

    /// `ρ(x)` for an algebra element `x` in coordinates.
    pub fn act(&self, x: &[u32]) -> FpMatrix {
        let f = self.field();
        let mut out = FpMatrix::zeros(f, self.dim, self.dim);
        for (i, &c) in x.iter().enumerate() {
            if c != 0 {
                out = &out + &self.action[i].scale(c);
            }
        }
        out
    }

    pub fn same_algebra(&self, other: &FdModule) -> bool {
        Arc::ptr_eq(&self.algebra, &other.algebra) || self.algebra == other.algebra
    }

    pub fn direct_sum(parts: &[&FdModule]) -> Result<FdModule, AlgebraError> {
        let first = parts.first().expect("direct sum of at least one module");
        if parts.iter().any(|m| !m.same_algebra(first)) {
            return Err(AlgebraError::AlgebraMismatch);
        }
        let f = first.field();
        let dim = parts.iter().map(|m| m.dim).sum();
        let action = (0..first.algebra.dim())
            .map(|i| {
                let blocks: Vec<&FpMatrix> = parts.iter().map(|m| &m.action[i]).collect();
                FpMatrix::block_diag(f, &blocks)
            })
            .collect();
        Ok(FdModule { algebra: first.algebra.clone(), dim, action })
    }

    /// Pullback along an algebra map `phi: other → algebra` given by the images of `other`'s basis.
    pub fn pullback(&self, other: Arc<FdAlgebra>, phi: &FpMatrix) -> FdModule {
        let action = (0..other.dim()).map(|i| self.act(phi.row(i))).collect();
        FdModule { algebra: other, dim: self.dim, action }
    }

    pub fn is_submodule(&self, s: &Subspace) -> bool {
        self.algebra.generators().iter().all(|g| s.contains_rows(&(s.basis() * &self.act(g))))
    }

    /// The submodule on the echelon basis of `s`.
    pub fn submodule(&self, s: &Subspace) -> Result<FdModule, AlgebraError> {
        if !self.is_submodule(s) {
            return Err(AlgebraError::NotSubmodule);
        }
        let action = self.action.iter().map(|a| s.coordinates(&(s.basis() * a))).collect::<Result<_, _>>()?;
        Ok(FdModule { algebra: self.algebra.clone(), dim: s.dim(), action })
    }

    /// The quotient by `s` on the deterministic complement basis.
    pub fn quotient(&self, s: &Subspace) -> Result<(FdModule, Subquotient), AlgebraError> {
        if !self.is_submodule(s) {
            return Err(AlgebraError::NotSubmodule);
        }
        let sq = Subquotient::new(Subspace::full(self.field(), self.dim), s.clone())?;
        let action = self.action.iter().map(|a| sq.coords_unchecked(&(sq.complement() * a))).collect();
        Ok((FdModule { algebra: self.algebra.clone(), dim: sq.dim(), action }, sq))
    }

    /// Subquotient module `num/den` for submodules `den ⊆ num`.
    pub fn subquotient(&self, sq: &Subquotient) -> Result<FdModule, AlgebraError> {
        if !self.is_submodule(sq.num()) || !self.is_submodule(sq.den()) {
            return Err(AlgebraError::NotSubmodule);
        }
        let action = self.action.iter().map(|a| sq.coords_unchecked(&(sq.complement() * a))).collect();
        Ok(FdModule { algebra: self.algebra.clone(), dim: sq.dim(), action })
    }

    /// Checks that `f` (rows indexed by `self`) intertwines with `tgt`.
    pub fn intertwines(&self, tgt: &FdModule, f: &FpMatrix) -> bool {
        f.shape() == (self.dim, tgt.dim)
            && self.algebra.generators().iter().all(|g| &self.act(g) * f == f * &tgt.act(g))
    }
}

/// An algebra-linear map between modules over the same algebra.
#[derive(Clone, Debug)]
pub struct ModuleMap {
    pub src: Arc<FdModule>,
    pub tgt: Arc<FdModule>,
    pub matrix: FpMatrix,
}

impl ModuleMap {
    pub fn new(src: Arc<FdModule>, tgt: Arc<FdModule>, matrix: FpMatrix) -> Result<Self, AlgebraError> {
        if !src.same_algebra(&tgt) {
            return Err(AlgebraError::AlgebraMismatch);
        }
        if !src.intertwines(&tgt, &matrix) {
            return Err(AlgebraError::NotIntertwining);
        }
        Ok(Self { src, tgt, matrix })
    }

    pub fn identity(m: Arc<FdModule>) -> Self {
        let matrix = FpMatrix::identity(m.field(), m.dim());
        Self { src: m.clone(), tgt: m, matrix }
    }

    pub fn compose(&self, then: &ModuleMap) -> Result<ModuleMap, AlgebraError> {
        ModuleMap::new(self.src.clone(), then.tgt.clone(), &self.matrix * &then.matrix)
    }
}

/// The subspace of `Hom_k(m, n)` (row-major flattened `dim m × dim n` matrices) of maps commuting
/// with every element of the unital subalgebra spanned by `over`.
pub fn hom_module_space(m: &FdModule, n: &FdModule, over: &Subspace) -> Result<Subspace, AlgebraError> {
    if !m.same_algebra(n) {
        return Err(AlgebraError::AlgebraMismatch);
    }
    let alg = m.algebra();
    alg.check_subalgebra(over)?;
    let elems: Vec<Vec<u32>> = if over.dim() == alg.dim() {
        alg.generators().to_vec()
    } else {
        (0..over.dim()).map(|i| over.basis().row(i).to_vec()).collect()
    };
    Ok(intertwiner_space(m, n, &elems))
}

/// Classes of basis indices linked by a nonzero entry of some matrix in `acts`.
fn linked_components(n: usize, acts: &[FpMatrix]) -> Vec<Vec<usize>> {
    let mut parent: Vec<usize> = (0..n).collect();
    fn root(p: &mut [usize], mut x: usize) -> usize {
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    for a in acts {
        for i in 0..n {
            for (j, &v) in a.row(i).iter().enumerate() {
                if v != 0 && i != j {
                    let (ri, rj) = (root(&mut parent, i), root(&mut parent, j));
                    if ri != rj {
                        parent[ri.max(rj)] = ri.min(rj);
                    }
                }
            }
        }
    }
    let mut classes: Vec<Vec<usize>> = vec![];
    let mut slot = vec![usize::MAX; n];
    for i in 0..n {
        let r = root(&mut parent, i);
        if slot[r] == usize::MAX {
            slot[r] = classes.len();
            classes.push(vec![]);
        }
        classes[slot[r]].push(i);
    }
    classes
}

fn intertwiners_dense(f: FieldSpec, am: &[FpMatrix], an: &[FpMatrix], dm: usize, dn: usize) -> FpMatrix {
    let mut basis = FpMatrix::identity(f, dm * dn);
    for (a, b) in am.iter().zip(an) {
        if basis.rows() == 0 {
            break;
        }
        let lhs = a.transpose().kron(&FpMatrix::identity(f, dn));
        let rhs = FpMatrix::identity(f, dm).kron(b);
        let eq = &basis * &(&lhs - &rhs);
        let k = kernel_basis(&eq);
        basis = k.basis() * &basis;
    }
    basis
}

/// Maps `F` with `ρ_m(a) F = F ρ_n(a)` for every `a` in `elems`.
///
/// The equations split along the linked components of both actions; each block is solved alone.
pub fn intertwiner_space(m: &FdModule, n: &FdModule, elems: &[Vec<u32>]) -> Subspace {
    let f = m.field();
    let (dm, dn) = (m.dim(), n.dim());
    let am: Vec<FpMatrix> = elems.iter().map(|a| m.act(a)).collect();
    let an: Vec<FpMatrix> = elems.iter().map(|a| n.act(a)).collect();
    let rc = linked_components(dm, &am);
    let cc = linked_components(dn, &an);
    let mut rows: Vec<Vec<u32>> = vec![];
    for r in &rc {
        let sub_m: Vec<FpMatrix> = am.iter().map(|a| a.select_rows(r).select_cols(r)).collect();
        for c in &cc {
            let sub_n: Vec<FpMatrix> = an.iter().map(|a| a.select_rows(c).select_cols(c)).collect();
            let b = intertwiners_dense(f, &sub_m, &sub_n, r.len(), c.len());
            for k in 0..b.rows() {
                let mut v = vec![0u32; dm * dn];
                for (i, &ri) in r.iter().enumerate() {
                    for (j, &cj) in c.iter().enumerate() {
                        v[ri * dn + cj] = b.get(k, i * c.len() + j);
                    }
                }
                rows.push(v);
            }
        }
    }
    Subspace::from_rows(&FpMatrix::from_vec(f, rows.len(), dm * dn, rows.concat()))
}

/// Tensor product over the field. With a Hopf structure the action is diagonal through the
/// comultiplication; without one the result is a plain vector space over the ground field.
pub fn tensor_over_field(m: &FdModule, n: &FdModule, hopf: Option<&HopfAlgebra>) -> Result<FdModule, AlgebraError> {
    let f = m.field();
    match hopf {
        None => {
            let ground = Arc::new(FdAlgebra::ground(f));
            let d = m.dim() * n.dim();
            Ok(FdModule { algebra: ground, dim: d, action: vec![FpMatrix::identity(f, d)] })
        }
        Some(h) => {
            if !m.same_algebra(n) || **m.algebra() != *h.algebra().as_ref() {
                return Err(AlgebraError::AlgebraMismatch);
            }
            let dim = h.algebra().dim();
            let action = (0..dim)
                .map(|x| {
                    let mut acc = FpMatrix::zeros(f, m.dim() * n.dim(), m.dim() * n.dim());
                    for (a, b, c) in h.coproduct_terms(&h.algebra().basis(x)) {
                        acc = &acc + &m.action(a).kron(n.action(b)).scale(c);
                    }
                    acc
                })
                .collect();
            Ok(FdModule { algebra: h.algebra().clone(), dim: m.dim() * n.dim(), action })
        }
    }
}

/// `{m : a·m = ε(a) m}` for `a` ranging over `span`.
pub fn fixed_points(m: &FdModule, span: &Subspace, counit: &FpMatrix) -> Subspace {
    let f = m.field();
    let parts: Vec<FpMatrix> = (0..span.dim())
        .map(|i| {
            let a = span.basis().row(i);
            let eps = counit.apply(a)[0];
            &m.act(a) - &FpMatrix::scalar(f, m.dim(), eps)
        })
        .collect();
    let refs: Vec<&FpMatrix> = parts.iter().collect();
    kernel_basis(&FpMatrix::hstack(f, m.dim(), &refs))
}

/// The coinduced module `Hom_k(A, m)` with `[a'](x·φ) = [a'·x]φ`, flattened with index
/// `a * dim m + j`, and the embedding `m → Hom_k(A, m)`, `v ↦ (a ↦ a·v)`.
pub fn coinduced(m: &FdModule) -> (FdModule, FpMatrix) {
    let alg = m.algebra();
    let f = m.field();
    let d = m.dim();
    let id = FpMatrix::identity(f, d);
    let action = (0..alg.dim()).map(|x| alg.right_mult(&alg.basis(x)).transpose().kron(&id)).collect();
    let mut emb = FpMatrix::zeros(f, d, alg.dim() * d);
    for a in 0..alg.dim() {
        emb.set_block(0, a * d, m.action(a));
    }
    (FdModule { algebra: alg.clone(), dim: alg.dim() * d, action }, emb)
}

fn check_nilpotent(alg: &FdAlgebra, rad: &Subspace) -> Result<(), AlgebraError> {
    let mut power = rad.clone();
    for _ in 0..=alg.dim() {
        if power.dim() == 0 {
            return Ok(());
        }
        let mut rows = vec![];
        for i in 0..power.dim() {
            for j in 0..rad.dim() {
                rows.push(alg.mul(power.basis().row(i), rad.basis().row(j)));
            }
        }
        power = Subspace::from_rows(&vectors_to_matrix(alg.field(), alg.dim(), &rows));
    }
    Err(AlgebraError::NotNilpotent)
}

/// Joint kernel of the radical's action, after verifying that `rad` spans a nilpotent set.
pub fn socle(m: &FdModule, rad: &Subspace) -> Result<Subspace, AlgebraError> {
    check_nilpotent(m.algebra(), rad)?;
    let f = m.field();
    let parts: Vec<FpMatrix> = (0..rad.dim()).map(|i| m.act(rad.basis().row(i))).collect();
    let refs: Vec<&FpMatrix> = parts.iter().collect();
    Ok(kernel_basis(&FpMatrix::hstack(f, m.dim(), &refs)))
}

/// `rad·m`, the span of all `r·v`.
pub fn radical(m: &FdModule, rad: &Subspace) -> Result<Subspace, AlgebraError> {
    check_nilpotent(m.algebra(), rad)?;
    let f = m.field();
    let parts: Vec<FpMatrix> = (0..rad.dim()).map(|i| m.act(rad.basis().row(i))).collect();
    let refs: Vec<&FpMatrix> = parts.iter().collect();
    Ok(Subspace::from_rows(&FpMatrix::vstack(f, m.dim(), &refs)))
}

/// `m / rad·m`.
pub fn top(m: &FdModule, rad: &Subspace) -> Result<Subquotient, AlgebraError> {
    let r = radical(m, rad)?;
    Ok(Subquotient::new(Subspace::full(m.field(), m.dim()), r)?)
}

/// The kernel of the augmentation `ε` (a `dim × 1` column).
pub fn augmentation_ideal(counit: &FpMatrix) -> Subspace {
    kernel_basis(counit)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gf(p: u32) -> FieldSpec {
        FieldSpec::new(p).unwrap()
    }

    fn trivial(alg: &Arc<FdAlgebra>) -> FdModule {
        FdModule::character(alg.clone(), &vec![1; alg.dim()]).unwrap()
    }

    fn aug_counit(alg: &FdAlgebra) -> FpMatrix {
        FpMatrix::from_vec(alg.field(), alg.dim(), 1, vec![1; alg.dim()])
    }

    #[test]
    fn group_tables_validate() {
        for g in [GroupTable::cyclic(5), GroupTable::klein4(), GroupTable::quaternion8(), GroupTable::symmetric3()] {
            assert!(GroupTable::new(g.table().to_vec()).is_ok());
        }
        assert_eq!(GroupTable::new(vec![vec![0, 1], vec![0, 1]]), Err(AlgebraError::NotLatinSquare));
        let q8 = GroupTable::quaternion8();
        assert!(q8.is_normal(&[0, 1]));
        let s3 = GroupTable::symmetric3();
        assert!(s3.is_normal(&[0, 3, 4]));
        assert!(!s3.is_normal(&[0, 1]));
        let (q, _) = GroupTable::cyclic(4).quotient(&[0, 2]).unwrap();
        assert_eq!(q.order(), 2);
    }

    #[test]
    fn c2_augmentation_squares_to_zero() {
        let a = group_algebra(&GroupTable::cyclic(2), gf(2));
        let s = vec![1, 1];
        assert_eq!(a.mul(&s, &s), vec![0, 0]);
        let triv = group_algebra(&GroupTable::cyclic(1), gf(5));
        assert_eq!(triv.dim(), 1);
        let c4 = group_algebra(&GroupTable::cyclic(4), gf(2));
        for i in 0..4 {
            for j in 0..4 {
                assert_eq!(c4.mul(&c4.basis(i), &c4.basis(j)), c4.mul(&c4.basis(j), &c4.basis(i)));
            }
        }
    }

    #[test]
    fn hom_space_examples() {
        let a = Arc::new(group_algebra(&GroupTable::cyclic(2), gf(2)));
        let reg = FdModule::regular(a.clone());
        let t = trivial(&a);
        let full = Subspace::full(a.field(), 2);
        assert_eq!(hom_module_space(&reg, &t, &full).unwrap().dim(), 1);
        assert_eq!(hom_module_space(&reg, &reg, &full).unwrap().dim(), 2);
        let scalars = Subspace::from_rows(&FpMatrix::row_vector(a.field(), a.unit()));
        assert_eq!(hom_module_space(&reg, &reg, &scalars).unwrap().dim(), 4);
        let not_unital = Subspace::from_rows(&FpMatrix::row_vector(a.field(), &[1, 1]));
        assert_eq!(hom_module_space(&reg, &t, &not_unital), Err(AlgebraError::SubalgebraNotUnital));
    }

    #[test]
    fn fixed_points_and_socles() {
        let a = Arc::new(group_algebra(&GroupTable::cyclic(2), gf(2)));
        let reg = FdModule::regular(a.clone());
        let full = Subspace::full(a.field(), 2);
        let fp = fixed_points(&reg, &full, &aug_counit(&a));
        assert_eq!(fp.basis(), &FpMatrix::from_rows(a.field(), 2, &[vec![1, 1]]));
        let rad = augmentation_ideal(&aug_counit(&a));
        assert_eq!(socle(&reg, &rad).unwrap(), fp);
        assert_eq!(socle(&trivial(&a), &rad).unwrap().dim(), 1);
        let c4 = Arc::new(group_algebra(&GroupTable::cyclic(4), gf(2)));
        let rad4 = augmentation_ideal(&aug_counit(&c4));
        assert_eq!(socle(&FdModule::regular(c4.clone()), &rad4).unwrap().dim(), 1);
        assert_eq!(top(&FdModule::regular(c4.clone()), &rad4).unwrap().dim(), 1);
        let c3 = Arc::new(group_algebra(&GroupTable::cyclic(3), gf(2)));
        let rad3 = augmentation_ideal(&aug_counit(&c3));
        assert_eq!(socle(&FdModule::regular(c3), &rad3), Err(AlgebraError::NotNilpotent));
    }

    #[test]
    fn coinduced_trivial_is_regular() {
        let a = Arc::new(group_algebra(&GroupTable::cyclic(2), gf(2)));
        let (co, emb) = coinduced(&trivial(&a));
        co.validate().unwrap();
        assert_eq!(co.dim(), 2);
        assert!(trivial(&a).intertwines(&co, &emb));
        // For C2 the basis swap g ↦ g is already an isomorphism with the regular module.
        let reg = FdModule::regular(a.clone());
        let iso = hom_module_space(&co, &reg, &Subspace::full(a.field(), 2)).unwrap();
        let found = (0..(1 << iso.dim())).any(|mask: usize| {
            let mut v = vec![0u32; 4];
            for k in 0..iso.dim() {
                if mask >> k & 1 == 1 {
                    for (x, &y) in v.iter_mut().zip(iso.basis().row(k)) {
                        *x ^= y;
                    }
                }
            }
            FpMatrix::from_vec(a.field(), 2, 2, v).is_invertible()
        });
        assert!(found);
    }

    #[test]
    fn submodule_and_quotient() {
        let a = Arc::new(group_algebra(&GroupTable::cyclic(4), gf(2)));
        let reg = FdModule::regular(a.clone());
        let rad = augmentation_ideal(&aug_counit(&a));
        let r = radical(&reg, &rad).unwrap();
        let sub = reg.submodule(&r).unwrap();
        sub.validate().unwrap();
        let (q, _) = reg.quotient(&r).unwrap();
        q.validate().unwrap();
        assert_eq!((sub.dim(), q.dim()), (3, 1));
    }
}
