//! Additive functors between module categories, acyclic resolutions, derived functors and the
//! Grothendieck spectral sequence `Ė_I(G J_X)` of a composite `G ∘ F`.
//!
//! A morphism `x → y` of the source category is a matrix in the row-vector convention. For a
//! contravariant functor the source category is the opposite of a module category, so a morphism
//! `x → y` is a module map `y → x`.

use crate::algebra::{hom_module_space, tensor_over_field, AlgebraError, FdAlgebra, FdModule};
use crate::bicomplex::{ce_resolution, BicomplexError, CEResolution, DoubleComplex, DoubleComplexMap};
use crate::complexes::{CochainComplex, ComplexError};
use crate::hopf::{fixed_point_module, hom_k_module, HopfAlgebra, HopfError, NormalHopfSubalgebra};
use crate::injective::{injective_resolution, projective_resolution, InjResProvider, ProjCover, ResolutionError};
use crate::linalg::{kernel_basis, FieldSpec, FpMatrix, LinalgError, Subquotient, Subspace};
use crate::spectral::{EntryIndex, FilteredComplex, PosetIndex, SpectralError};
use rayon::prelude::*;
use serde::Serialize;
use std::sync::Arc;

#[derive(Debug, thiserror::Error)]
pub enum GrothendieckError {
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    Hopf(#[from] HopfError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    Complex(#[from] ComplexError),
    #[error(transparent)]
    Bicomplex(#[from] BicomplexError),
    #[error(transparent)]
    Resolution(#[from] ResolutionError),
    #[error(transparent)]
    Spectral(#[from] SpectralError),
    #[error("variance mismatch: {0}")]
    Variance(String),
    #[error("hypothesis fails: {0}")]
    HypothesisFailed(String),
}

/// `F(x)` as a module together with its carrier inside the ambient space in which morphisms act.
#[derive(Clone, Debug)]
pub struct Applied {
    pub module: FdModule,
    pub carrier: Subspace,
}

impl Applied {
    pub fn dim(&self) -> usize {
        self.module.dim()
    }
}

pub trait Functor: Send + Sync {
    fn name(&self) -> String;

    fn contravariant(&self) -> bool {
        false
    }

    fn left_exact(&self) -> bool {
        true
    }

    fn apply(&self, x: &FdModule) -> Result<Applied, GrothendieckError>;

    /// The ambient matrix of `F(f)` for a morphism `f : x → y`.
    fn ambient(&self, x: &FdModule, y: &FdModule, f: &FpMatrix) -> Result<FpMatrix, GrothendieckError>;
}

/// `F(f) : F(x) → F(y)` in carrier coordinates.
pub fn fmap(func: &dyn Functor, x: &FdModule, fx: &Applied, y: &FdModule, fy: &Applied, f: &FpMatrix) -> Result<FpMatrix, GrothendieckError> {
    let img = fx.carrier.basis() * &func.ambient(x, y, f)?;
    Ok(fy.carrier.coordinates(&img)?)
}

/// A functor of two variables; `variance()` flags the contravariant slots.
pub trait Bifunctor: Send + Sync {
    fn name(&self) -> String;

    fn variance(&self) -> (bool, bool);

    fn apply(&self, x: &FdModule, y: &FdModule) -> Result<Applied, GrothendieckError>;

    /// The ambient matrix of `F(f, g)` for `f : x → x2`, `g : y → y2`.
    fn ambient(&self, x: (&FdModule, &FdModule, &FpMatrix), y: (&FdModule, &FdModule, &FpMatrix)) -> Result<FpMatrix, GrothendieckError>;
}

pub fn bimap(
    bf: &dyn Bifunctor,
    x: (&FdModule, &FdModule, &FpMatrix),
    y: (&FdModule, &FdModule, &FpMatrix),
    src: &Applied,
    tgt: &Applied,
) -> Result<FpMatrix, GrothendieckError> {
    let img = src.carrier.basis() * &bf.ambient(x, y)?;
    Ok(tgt.carrier.coordinates(&img)?)
}

/// The module map realising the morphism `f : x → y` of the source category of a functor.
fn module_map_shape(contra: bool, x: &FdModule, y: &FdModule) -> (usize, usize) {
    if contra {
        (y.dim(), x.dim())
    } else {
        (x.dim(), y.dim())
    }
}

pub fn ground_module(field: FieldSpec, dim: usize) -> FdModule {
    let ground = Arc::new(FdAlgebra::ground(field));
    FdModule::new(ground, dim, vec![FpMatrix::identity(field, dim)]).expect("identity action")
}

#[derive(Clone, Debug, Default)]
pub struct Identity;

impl Functor for Identity {
    fn name(&self) -> String {
        "identity".into()
    }

    fn apply(&self, x: &FdModule) -> Result<Applied, GrothendieckError> {
        Ok(Applied { module: x.clone(), carrier: Subspace::full(x.field(), x.dim()) })
    }

    fn ambient(&self, _: &FdModule, _: &FdModule, f: &FpMatrix) -> Result<FpMatrix, GrothendieckError> {
        Ok(f.clone())
    }
}

/// `x ↦ x^K` as a module over `H̄ = H / HK⁺`.
#[derive(Clone, Debug)]
pub struct FixedPoints {
    pub nk: Arc<NormalHopfSubalgebra>,
}

impl Functor for FixedPoints {
    fn name(&self) -> String {
        format!("fixed_points(dim K = {})", self.nk.k().dim())
    }

    fn apply(&self, x: &FdModule) -> Result<Applied, GrothendieckError> {
        let (module, carrier) = fixed_point_module(x, &self.nk)?;
        Ok(Applied { module, carrier })
    }

    fn ambient(&self, _: &FdModule, _: &FdModule, f: &FpMatrix) -> Result<FpMatrix, GrothendieckError> {
        Ok(f.clone())
    }
}

/// `x ↦ {v : a·v = ε(a) v}` as a vector space.
#[derive(Clone, Debug)]
pub struct Invariants {
    pub counit: FpMatrix,
}

impl Functor for Invariants {
    fn name(&self) -> String {
        "invariants".into()
    }

    fn apply(&self, x: &FdModule) -> Result<Applied, GrothendieckError> {
        let span = Subspace::full(x.field(), x.algebra().dim());
        let carrier = crate::algebra::fixed_points(x, &span, &self.counit);
        Ok(Applied { module: ground_module(x.field(), carrier.dim()), carrier })
    }

    fn ambient(&self, _: &FdModule, _: &FdModule, f: &FpMatrix) -> Result<FpMatrix, GrothendieckError> {
        Ok(f.clone())
    }
}

/// `x ↦ n ⊗ x` over the field, diagonal through the comultiplication when a Hopf structure is given.
#[derive(Clone, Debug)]
pub struct Tensor {
    pub n: FdModule,
    pub hopf: Option<Arc<HopfAlgebra>>,
}

impl Functor for Tensor {
    fn name(&self) -> String {
        format!("tensor(dim {})", self.n.dim())
    }

    fn left_exact(&self) -> bool {
        true
    }

    fn apply(&self, x: &FdModule) -> Result<Applied, GrothendieckError> {
        let module = tensor_over_field(&self.n, x, self.hopf.as_deref())?;
        Ok(Applied { carrier: Subspace::full(x.field(), module.dim()), module })
    }

    fn ambient(&self, _: &FdModule, _: &FdModule, f: &FpMatrix) -> Result<FpMatrix, GrothendieckError> {
        Ok(FpMatrix::identity(f.field(), self.n.dim()).kron(f))
    }
}

/// `G ∘ F`.
pub struct Compose {
    pub first: Arc<dyn Functor>,
    pub then: Arc<dyn Functor>,
}

impl Functor for Compose {
    fn name(&self) -> String {
        format!("{} . {}", self.then.name(), self.first.name())
    }

    fn contravariant(&self) -> bool {
        self.first.contravariant()
    }

    fn apply(&self, x: &FdModule) -> Result<Applied, GrothendieckError> {
        let fx = self.first.apply(x)?;
        self.then.apply(&fx.module)
    }

    fn ambient(&self, x: &FdModule, y: &FdModule, f: &FpMatrix) -> Result<FpMatrix, GrothendieckError> {
        let (fx, fy) = (self.first.apply(x)?, self.first.apply(y)?);
        if self.then.contravariant() {
            return Err(GrothendieckError::Variance(format!("{} must be covariant in a composite", self.then.name())));
        }
        let ff = fmap(self.first.as_ref(), x, &fx, y, &fy, f)?;
        self.then.ambient(&fx.module, &fy.module, &ff)
    }
}

/// `Hom_K(x, y)` as an `H̄`-module, contravariant in `x`.
#[derive(Clone, Debug)]
pub struct HomK {
    pub nk: Arc<NormalHopfSubalgebra>,
}

impl Bifunctor for HomK {
    fn name(&self) -> String {
        "hom_K".into()
    }

    fn variance(&self) -> (bool, bool) {
        (true, false)
    }

    fn apply(&self, x: &FdModule, y: &FdModule) -> Result<Applied, GrothendieckError> {
        let h = hom_k_module(x, y, &self.nk)?;
        Ok(Applied { module: h.module, carrier: h.carrier })
    }

    fn ambient(&self, x: (&FdModule, &FdModule, &FpMatrix), y: (&FdModule, &FdModule, &FpMatrix)) -> Result<FpMatrix, GrothendieckError> {
        Ok(x.2.transpose().kron(y.2))
    }
}

/// `Hom_A(x, y)` over the full algebra, as a vector space; contravariant in `x`.
#[derive(Clone, Debug, Default)]
pub struct HomOver;

impl Bifunctor for HomOver {
    fn name(&self) -> String {
        "hom".into()
    }

    fn variance(&self) -> (bool, bool) {
        (true, false)
    }

    fn apply(&self, x: &FdModule, y: &FdModule) -> Result<Applied, GrothendieckError> {
        let full = Subspace::full(x.field(), x.algebra().dim());
        let carrier = hom_module_space(x, y, &full)?;
        Ok(Applied { module: ground_module(x.field(), carrier.dim()), carrier })
    }

    fn ambient(&self, x: (&FdModule, &FdModule, &FpMatrix), y: (&FdModule, &FdModule, &FpMatrix)) -> Result<FpMatrix, GrothendieckError> {
        Ok(x.2.transpose().kron(y.2))
    }
}

/// `F(x, −)`.
pub struct FirstFixed {
    pub bf: Arc<dyn Bifunctor>,
    pub x: FdModule,
}

impl Functor for FirstFixed {
    fn name(&self) -> String {
        format!("{}(X, -)", self.bf.name())
    }

    fn contravariant(&self) -> bool {
        self.bf.variance().1
    }

    fn apply(&self, y: &FdModule) -> Result<Applied, GrothendieckError> {
        self.bf.apply(&self.x, y)
    }

    fn ambient(&self, y: &FdModule, y2: &FdModule, g: &FpMatrix) -> Result<FpMatrix, GrothendieckError> {
        let id = FpMatrix::identity(self.x.field(), self.x.dim());
        self.bf.ambient((&self.x, &self.x, &id), (y, y2, g))
    }
}

/// `F(−, y)`.
pub struct SecondFixed {
    pub bf: Arc<dyn Bifunctor>,
    pub y: FdModule,
}

impl Functor for SecondFixed {
    fn name(&self) -> String {
        format!("{}(-, Y)", self.bf.name())
    }

    fn contravariant(&self) -> bool {
        self.bf.variance().0
    }

    fn apply(&self, x: &FdModule) -> Result<Applied, GrothendieckError> {
        self.bf.apply(x, &self.y)
    }

    fn ambient(&self, x: &FdModule, x2: &FdModule, f: &FpMatrix) -> Result<FpMatrix, GrothendieckError> {
        let id = FpMatrix::identity(self.y.field(), self.y.dim());
        self.bf.ambient((x, x2, f), (&self.y, &self.y, &id))
    }
}

/// Identity, composition and additivity of `func` on the sampled maps `f : x → y`, `g : y → z`.
pub fn functor_laws_hold(func: &dyn Functor, x: &FdModule, y: &FdModule, z: &FdModule, f: &FpMatrix, g: &FpMatrix) -> Result<bool, GrothendieckError> {
    let (fx, fy, fz) = (func.apply(x)?, func.apply(y)?, func.apply(z)?);
    let id = FpMatrix::identity(x.field(), x.dim());
    let ident = fmap(func, x, &fx, x, &fx, &id)?.is_identity();
    let gf = if func.contravariant() { g * f } else { f * g };
    let composite = fmap(func, x, &fx, z, &fz, &gf)?;
    let (ff, fg) = (fmap(func, x, &fx, y, &fy, f)?, fmap(func, y, &fy, z, &fz, g)?);
    let comp = composite == &ff * &fg;
    let sum = FdModule::direct_sum(&[x, y])?;
    let additive = func.apply(&sum)?.dim() == fx.dim() + fy.dim();
    Ok(ident && comp && additive)
}

/// `0 → X → A^0 → A^1 → …` in the source category of a functor. For an `opposite` resolution the
/// entries are projective modules and `maps[i] : A^{i+1} → A^i`, `aug : A^0 → X` are module maps.
#[derive(Clone, Debug)]
pub struct Resolution {
    pub object: FdModule,
    pub terms: Vec<FdModule>,
    pub maps: Vec<FpMatrix>,
    pub aug: FpMatrix,
    pub opposite: bool,
    /// No further terms are needed.
    pub complete: bool,
    pub label: String,
    /// The injective resolution this was built from, kept for lifting maps.
    pub injective: Option<crate::injective::InjRes>,
}

impl Resolution {
    pub fn length(&self) -> usize {
        self.terms.len() - 1
    }

    pub fn dims(&self) -> Vec<usize> {
        self.terms.iter().map(|t| t.dim()).collect()
    }

    /// `Conc X`, the resolution of an object by itself.
    pub fn conc(x: &FdModule, opposite: bool) -> Self {
        let id = FpMatrix::identity(x.field(), x.dim());
        Self { object: x.clone(), terms: vec![x.clone()], maps: vec![], aug: id, opposite, complete: true, label: "conc".into(), injective: None }
    }

    pub fn from_injective(r: &crate::injective::InjRes, label: &str) -> Self {
        let l = r.length();
        let terms = r.entries.iter().map(|e| e.module().clone()).collect();
        let maps = (0..l).map(|n| r.diff(n)).collect();
        let next = r.entries[l].dim() - r.cokernels[l].dim();
        Self { object: r.module.clone(), terms, maps, aug: r.augmentation().clone(), opposite: false, complete: next == 0, label: label.into(), injective: Some(r.clone()) }
    }

    pub fn from_projective(r: &crate::injective::ProjRes, label: &str) -> Self {
        let last = r.boundary.last().unwrap_or(&r.aug);
        let complete = kernel_basis(last).dim() == 0;
        Self {
            object: r.module.clone(),
            terms: r.entries.clone(),
            maps: r.boundary.clone(),
            aug: r.aug.clone(),
            opposite: true,
            complete,
            label: label.into(),
            injective: None,
        }
    }

    /// Module maps, `d d = 0` and exactness of the augmented complex below the top term.
    pub fn validate(&self) -> Result<(), GrothendieckError> {
        let bad = |s: String| Err(GrothendieckError::HypothesisFailed(s));
        let l = self.length();
        let (aug_src, aug_tgt) = if self.opposite { (&self.terms[0], &self.object) } else { (&self.object, &self.terms[0]) };
        if !aug_src.intertwines(aug_tgt, &self.aug) {
            return bad("augmentation is not a module map".into());
        }
        for i in 0..l {
            let (s, t) = if self.opposite { (&self.terms[i + 1], &self.terms[i]) } else { (&self.terms[i], &self.terms[i + 1]) };
            if !s.intertwines(t, &self.maps[i]) {
                return bad(format!("resolution map {i} is not a module map"));
            }
        }
        let mut prev = self.aug.clone();
        for i in 0..l {
            let m = &self.maps[i];
            let ok = if self.opposite {
                (m * &prev).is_zero() && Subspace::from_rows(m) == kernel_basis(&prev)
            } else {
                (&prev * m).is_zero() && kernel_basis(m) == Subspace::from_rows(&prev)
            };
            if !ok {
                return bad(format!("resolution is not exact at term {i}"));
            }
            prev = m.clone();
        }
        if self.aug.rank() != self.object.dim() {
            return bad("augmentation has the wrong rank".into());
        }
        Ok(())
    }
}

/// How objects of a source category are resolved.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Resolver {
    Injective(InjResProvider),
    /// Projective resolutions, i.e. injective resolutions in the opposite category.
    Projective(ProjCover),
}

impl Resolver {
    pub fn opposite(&self) -> bool {
        matches!(self, Self::Projective(_))
    }

    pub fn name(&self) -> String {
        match self {
            Self::Injective(p) => format!("injective/{}", p.name()),
            Self::Projective(ProjCover::Free) => "projective/free".into(),
            Self::Projective(ProjCover::Minimal { .. }) => "projective/minimal".into(),
        }
    }

    pub fn resolve(&self, x: &FdModule, length: usize) -> Result<Resolution, GrothendieckError> {
        let label = self.name();
        Ok(match self {
            Self::Injective(p) => Resolution::from_injective(&injective_resolution(x, p, length)?, &label),
            Self::Projective(c) => Resolution::from_projective(&projective_resolution(x, c, length)?, &label),
        })
    }

    /// The minimal resolver for an augmented local algebra.
    pub fn minimal(algebra: &FdAlgebra, counit: &FpMatrix, opposite: bool) -> Result<Self, GrothendieckError> {
        Ok(if opposite {
            Self::Projective(ProjCover::Minimal { radical: kernel_basis(counit) })
        } else {
            Self::Injective(InjResProvider::augmented(algebra, counit)?)
        })
    }
}

fn check_variance(func: &dyn Functor, res: &Resolution) -> Result<(), GrothendieckError> {
    if func.contravariant() != res.opposite {
        return Err(GrothendieckError::Variance(format!("{} applied to a {} resolution", func.name(), res.label)));
    }
    Ok(())
}

/// `F(A)` with the applied entries; homology is trusted below the top term unless the resolution
/// is complete.
pub fn apply_to_resolution(func: &dyn Functor, res: &Resolution) -> Result<(CochainComplex, Vec<Applied>), GrothendieckError> {
    check_variance(func, res)?;
    let applied: Vec<Applied> = res.terms.par_iter().map(|t| func.apply(t)).collect::<Result<_, _>>()?;
    let diffs = (0..res.length())
        .into_par_iter()
        .map(|i| fmap(func, &res.terms[i], &applied[i], &res.terms[i + 1], &applied[i + 1], &res.maps[i]))
        .collect::<Result<Vec<_>, _>>()?;
    let modules = applied.iter().map(|a| a.module.clone()).collect();
    let exact = if res.complete { None } else { Some(res.length() as i64 - 1) };
    let c = CochainComplex::from_modules(0, modules, diffs)?.with_exact_through(exact);
    Ok((c, applied))
}

/// `F(f) : F(X) → F(A^0)` induced by the augmentation.
pub fn apply_to_augmentation(func: &dyn Functor, res: &Resolution, fx: &Applied, fa0: &Applied) -> Result<FpMatrix, GrothendieckError> {
    check_variance(func, res)?;
    fmap(func, &res.object, fx, &res.terms[0], fa0, &res.aug)
}

/// Applies `func` entrywise to a double complex of modules.
pub fn apply_to_double(func: &dyn Functor, x: &DoubleComplex) -> Result<(DoubleComplex, Vec<Vec<Applied>>), GrothendieckError> {
    if func.contravariant() {
        return Err(GrothendieckError::Variance(format!("{} on a double complex of objects", func.name())));
    }
    let mods = x.modules().ok_or_else(|| GrothendieckError::Variance("double complex without modules".into()))?;
    let (rows, cols) = (x.rows(), x.cols());
    let cells: Vec<(usize, usize)> = (0..rows).flat_map(|i| (0..cols).map(move |j| (i, j))).collect();
    let applied: Vec<Applied> = cells.par_iter().map(|&(i, j)| func.apply(&mods[i][j])).collect::<Result<_, _>>()?;
    let grid: Vec<Vec<Applied>> = (0..rows).map(|i| applied[i * cols..(i + 1) * cols].to_vec()).collect();
    let at = |i: usize, j: usize| &grid[i][j];
    let maps: Vec<(FpMatrix, FpMatrix)> = cells
        .par_iter()
        .map(|&(i, j)| -> Result<_, GrothendieckError> {
            let f = x.field();
            let d = if j + 1 < cols {
                fmap(func, &mods[i][j], at(i, j), &mods[i][j + 1], at(i, j + 1), &x.d(i, j))?
            } else {
                FpMatrix::zeros(f, at(i, j).dim(), 0)
            };
            let de = if i + 1 < rows {
                fmap(func, &mods[i][j], at(i, j), &mods[i + 1][j], at(i + 1, j), &x.delta(i, j))?
            } else {
                FpMatrix::zeros(f, at(i, j).dim(), 0)
            };
            Ok((d, de))
        })
        .collect::<Result<_, _>>()?;
    let y = DoubleComplex::from_fn(x.field(), rows, cols, |i, j| grid[i][j].dim(), |i, j| maps[i * cols + j].0.clone(), |i, j| maps[i * cols + j].1.clone())?;
    let out_mods = grid.iter().map(|r| r.iter().map(|a| a.module.clone()).collect()).collect();
    Ok((y.with_modules(out_mods)?.with_trusted(x.trusted()), grid))
}

#[derive(Clone, Debug)]
pub struct DerivedValue {
    pub degree: usize,
    pub dim: usize,
    pub module: FdModule,
    pub homology: Subquotient,
}

/// `R^i F(x) = H^i F(A)` for a resolution `A` of `x` of length `i + 1`.
pub fn derived_functor(func: &dyn Functor, x: &FdModule, i: usize, resolver: &Resolver) -> Result<DerivedValue, GrothendieckError> {
    let res = resolver.resolve(x, i + 1)?;
    derived_from_resolution(func, &res, i)
}

pub fn derived_from_resolution(func: &dyn Functor, res: &Resolution, i: usize) -> Result<DerivedValue, GrothendieckError> {
    let (c, _) = apply_to_resolution(func, res)?;
    let h = c.homology(i as i64);
    let module = c.module(i as i64).expect("applied entries carry modules").subquotient(&h.quotient)?;
    Ok(DerivedValue { degree: i, dim: h.dim(), module, homology: h.quotient })
}

/// `dim R^i F(x)` for `i = 0..=top`, from one resolution.
pub fn derived_dims(func: &dyn Functor, x: &FdModule, top: usize, resolver: &Resolver) -> Result<Vec<usize>, GrothendieckError> {
    let res = resolver.resolve(x, top + 1)?;
    let (c, _) = apply_to_resolution(func, &res)?;
    Ok((0..=top).map(|i| c.homology_dim(i as i64)).collect())
}

#[derive(Clone, Debug, Serialize)]
pub struct AcyclicityReport {
    /// `(A 1)`: the entries are `F`-acyclic.
    pub f_acyclic: bool,
    /// `(A 2)`: the entries are `G ∘ F`-acyclic.
    pub gf_acyclic: bool,
    /// `(A 3)`: the images `F(A^i)` are `G`-acyclic.
    pub images_g_acyclic: bool,
    /// `(A 1)` and `(A 3)` held and `(A 2)` followed.
    pub implication_consistent: bool,
    pub depth: usize,
    pub failures: Vec<String>,
}

impl AcyclicityReport {
    pub fn passed(&self) -> bool {
        self.f_acyclic && self.gf_acyclic && self.images_g_acyclic
    }
}

/// Evaluates the three acyclicity conditions on every term of `a` up to degree `depth`.
pub fn check_acyclic_resolution(
    a: &Resolution,
    f: Arc<dyn Functor>,
    g: Arc<dyn Functor>,
    resolver_a: &Resolver,
    resolver_b: &Resolver,
    depth: usize,
) -> Result<AcyclicityReport, GrothendieckError> {
    a.validate()?;
    let gf = Compose { first: f.clone(), then: g.clone() };
    let vanish = |dims: &[usize]| dims.iter().skip(1).all(|&d| d == 0);
    let mut failures = vec![];
    let (mut a1, mut a2, mut a3) = (true, true, true);
    for (i, t) in a.terms.iter().enumerate() {
        if t.dim() == 0 {
            continue;
        }
        if !vanish(&derived_dims(f.as_ref(), t, depth, resolver_a)?) {
            a1 = false;
            failures.push(format!("term {i} is not {}-acyclic", f.name()));
        }
        if !vanish(&derived_dims(&gf, t, depth, resolver_a)?) {
            a2 = false;
            failures.push(format!("term {i} is not {}-acyclic", gf.name()));
        }
        let ft = f.apply(t)?.module;
        if ft.dim() > 0 && !vanish(&derived_dims(g.as_ref(), &ft, depth, resolver_b)?) {
            a3 = false;
            failures.push(format!("image of term {i} is not {}-acyclic", g.name()));
        }
    }
    Ok(AcyclicityReport { f_acyclic: a1, gf_acyclic: a2, images_g_acyclic: a3, implication_consistent: !(a1 && a3) || a2, depth, failures })
}

#[derive(Clone, Debug, Serialize)]
pub struct Provenance {
    pub resolution: String,
    pub resolution_dims: Vec<usize>,
    pub provider: String,
    pub ce_bound: usize,
    pub hypotheses_checked: bool,
}

/// `Ė_I(G J_X)` with the intermediate data.
pub struct GssResult {
    pub window: usize,
    pub resolution: Resolution,
    pub fa: Arc<CochainComplex>,
    pub ce: CEResolution,
    pub gj: Arc<DoubleComplex>,
    pub gj_applied: Vec<Vec<Applied>>,
    pub filtered: FilteredComplex,
    pub acyclicity: Option<AcyclicityReport>,
    pub provenance: Provenance,
}

/// Resolution length and CE bound so that every entry of degree `≤ window` and the differentials
/// leaving it are trusted.
pub fn default_lengths(window: usize) -> (usize, usize) {
    (window + 3, window + 2)
}

/// The Grothendieck spectral sequence of `G ∘ F` at `x`. With `check` set, the acyclicity
/// conditions are verified first and a failure aborts the run.
pub fn grothendieck_ss(
    x: &FdModule,
    f: Arc<dyn Functor>,
    g: Arc<dyn Functor>,
    resolver_a: &Resolver,
    provider_b: &InjResProvider,
    window: usize,
    check: bool,
) -> Result<GssResult, GrothendieckError> {
    let (len, _) = default_lengths(window);
    let res = resolver_a.resolve(x, len)?;
    gss_from_resolution(res, f, g, resolver_a, provider_b, window, check)
}

pub fn gss_from_resolution(
    res: Resolution,
    f: Arc<dyn Functor>,
    g: Arc<dyn Functor>,
    resolver_a: &Resolver,
    provider_b: &InjResProvider,
    window: usize,
    check: bool,
) -> Result<GssResult, GrothendieckError> {
    if g.contravariant() {
        return Err(GrothendieckError::Variance(format!("{} must be covariant", g.name())));
    }
    let (_, bound) = default_lengths(window);
    let acyclicity = if check {
        let rep = check_acyclic_resolution(&res, f.clone(), g.clone(), resolver_a, &Resolver::Injective(provider_b.clone()), window.min(2))?;
        if !rep.passed() {
            return Err(GrothendieckError::HypothesisFailed(rep.failures.join("; ")));
        }
        Some(rep)
    } else {
        None
    };
    let (fa, _) = apply_to_resolution(f.as_ref(), &res)?;
    let ce = ce_resolution(&fa, provider_b, bound)?;
    let (gj, gj_applied) = apply_to_double(g.as_ref(), &ce.carrier)?;
    let filtered = FilteredComplex::first_filtration(&gj)?;
    let provenance = Provenance {
        resolution: res.label.clone(),
        resolution_dims: res.dims(),
        provider: provider_b.name().into(),
        ce_bound: bound,
        hypotheses_checked: check,
    };
    Ok(GssResult { window, resolution: res, fa: Arc::new(fa), ce, gj: Arc::new(gj), gj_applied, filtered, acyclicity, provenance })
}

/// The dotted entry `E(−k+1/−k−1 ≽ −k/−k−2)^{+k+ℓ}` carrying `(R^k G)(R^ℓ F)(X)`.
pub fn e2_index(k: i64, l: i64) -> EntryIndex {
    EntryIndex::from_ints(-k + 1, -k - 1, -k, -k - 2, k + l).expect("page-two indices are valid")
}

/// The dotted entry `E(∞/−∞ ≽ ∞/−∞)^{+n}` carrying `R^n (G ∘ F)(X)`.
pub fn abutment_index(n: i64) -> EntryIndex {
    let (p, m) = (PosetIndex::pos_inf(), PosetIndex::neg_inf());
    EntryIndex::new(p, m, p, m, n).expect("abutment indices are valid")
}

#[derive(Clone, Debug, Serialize)]
pub struct E2Record {
    pub k: usize,
    pub l: usize,
    pub entry: usize,
    pub independent: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct AbutmentRecord {
    pub n: usize,
    pub entry: usize,
    pub independent: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct IdentificationReport {
    pub e2: Vec<E2Record>,
    pub abutment: Vec<AbutmentRecord>,
    pub agree: bool,
}

/// Compares page-two and abutment entries of `r` with `(R^k G)(R^ℓ F)(X)` and `R^n(G ∘ F)(X)`
/// computed from fresh resolutions.
pub fn identify_e2_and_abutment(
    r: &GssResult,
    f: Arc<dyn Functor>,
    g: Arc<dyn Functor>,
    x: &FdModule,
    resolver_a: &Resolver,
    provider_b: &InjResProvider,
) -> Result<IdentificationReport, GrothendieckError> {
    let t = r.window;
    let rb = Resolver::Injective(provider_b.clone());
    let rf: Vec<DerivedValue> = (0..=t).map(|l| derived_functor(f.as_ref(), x, l, resolver_a)).collect::<Result<_, _>>()?;
    let mut e2 = vec![];
    for (l, v) in rf.iter().enumerate() {
        let dims = derived_dims(g.as_ref(), &v.module, t - l, &rb)?;
        for (k, &independent) in dims.iter().enumerate() {
            let entry = r.filtered.entry(&e2_index(k as i64, l as i64))?.dim();
            e2.push(E2Record { k, l, entry, independent });
        }
    }
    e2.sort_by_key(|e| (e.k + e.l, e.k));
    let gf = Compose { first: f, then: g };
    let total = derived_dims(&gf, x, t, resolver_a)?;
    let abutment: Vec<AbutmentRecord> = total
        .iter()
        .enumerate()
        .map(|(n, &independent)| Ok(AbutmentRecord { n, entry: r.filtered.entry(&abutment_index(n as i64))?.dim(), independent }))
        .collect::<Result<_, GrothendieckError>>()?;
    let agree = e2.iter().all(|e| e.entry == e.independent) && abutment.iter().all(|a| a.entry == a.independent);
    Ok(IdentificationReport { e2, abutment, agree })
}

/// `G` applied to a map of double complexes whose entries were already sent through `G`.
pub fn apply_to_double_map(
    func: &dyn Functor,
    src: &DoubleComplex,
    tgt: &DoubleComplex,
    src_applied: (&Arc<DoubleComplex>, &[Vec<Applied>]),
    tgt_applied: (&Arc<DoubleComplex>, &[Vec<Applied>]),
    phi: &DoubleComplexMap,
) -> Result<DoubleComplexMap, GrothendieckError> {
    let (sm, tm) = (src.modules().expect("modules"), tgt.modules().expect("modules"));
    let (rows, cols) = (src.rows(), src.cols());
    let cells: Vec<(usize, usize)> = (0..rows).flat_map(|i| (0..cols).map(move |j| (i, j))).collect();
    let comps: Vec<FpMatrix> = cells
        .par_iter()
        .map(|&(i, j)| {
            if i >= tgt.rows() || j >= tgt.cols() || src.dim(i, j) == 0 || tgt.dim(i, j) == 0 {
                return Ok(FpMatrix::zeros(src.field(), src_applied.0.dim(i, j), tgt_applied.0.dim(i, j)));
            }
            fmap(func, &sm[i][j], &src_applied.1[i][j], &tm[i][j], &tgt_applied.1[i][j], &phi.comp(i, j))
        })
        .collect::<Result<_, GrothendieckError>>()?;
    Ok(DoubleComplexMap::from_fn(src_applied.0.clone(), tgt_applied.0.clone(), |i, j| comps[i * cols + j].clone())?)
}

/// Shape check for a morphism of the source category of `func`.
pub fn morphism_fits(func: &dyn Functor, x: &FdModule, y: &FdModule, f: &FpMatrix) -> bool {
    f.shape() == module_map_shape(func.contravariant(), x, y)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::GroupTable;
    use crate::hopf::group_hopf;

    fn c4_setup() -> (Arc<HopfAlgebra>, Arc<NormalHopfSubalgebra>, FdModule) {
        let f = FieldSpec::new(2).unwrap();
        let g = GroupTable::cyclic(4);
        let h = Arc::new(group_hopf(&g, f));
        let nk = Arc::new(NormalHopfSubalgebra::for_subgroup(h.clone(), &g, &[0, 2]).unwrap());
        let triv = h.trivial_module();
        (h, nk, triv)
    }

    #[test]
    fn fixed_points_of_c2_have_periodic_derived_functors() {
        let f = FieldSpec::new(2).unwrap();
        let g = GroupTable::cyclic(2);
        let h = Arc::new(group_hopf(&g, f));
        let triv = h.trivial_module();
        let inv = Invariants { counit: h.counit().clone() };
        let r = Resolver::minimal(h.algebra(), h.counit(), false).unwrap();
        assert_eq!(derived_dims(&inv, &triv, 4, &r).unwrap(), vec![1; 5]);
        let d0 = derived_functor(&inv, &triv, 0, &r).unwrap();
        assert_eq!(d0.dim, inv.apply(&triv).unwrap().dim());
    }

    #[test]
    fn fixed_points_agree_with_hom_from_trivial() {
        let (h, nk, triv) = c4_setup();
        let fp = FixedPoints { nk: nk.clone() };
        let hk = FirstFixed { bf: Arc::new(HomK { nk }), x: triv.clone() };
        let reg = FdModule::regular(h.algebra().clone());
        let a = fp.apply(&reg).unwrap();
        let b = hk.apply(&reg).unwrap();
        assert_eq!(a.carrier, b.carrier);
        assert_eq!(a.module, b.module);
    }

    #[test]
    fn exact_functor_has_no_higher_derived_functors() {
        let (h, _, triv) = c4_setup();
        let r = Resolver::minimal(h.algebra(), h.counit(), false).unwrap();
        assert_eq!(derived_dims(&Identity, &triv, 3, &r).unwrap(), vec![1, 0, 0, 0]);
    }

    #[test]
    fn functor_laws_on_samples() {
        let (h, nk, triv) = c4_setup();
        let reg = FdModule::regular(h.algebra().clone());
        let fl = triv.field();
        let norm = FpMatrix::from_i64(fl, 1, 4, &[1, 1, 1, 1]);
        let aug = FpMatrix::from_i64(fl, 4, 1, &[1, 1, 1, 1]);
        let fp = FixedPoints { nk: nk.clone() };
        assert!(functor_laws_hold(&fp, &triv, &reg, &triv, &norm, &aug).unwrap());
        let hk = SecondFixed { bf: Arc::new(HomK { nk }), y: triv.clone() };
        assert!(morphism_fits(&hk, &reg, &triv, &norm));
        assert!(functor_laws_hold(&hk, &reg, &triv, &reg, &norm, &aug).unwrap());
    }

    #[test]
    fn c4_over_c2_page_two_and_abutment() {
        let (h, nk, triv) = c4_setup();
        let f: Arc<dyn Functor> = Arc::new(FixedPoints { nk: nk.clone() });
        let q = nk.quotient();
        let g: Arc<dyn Functor> = Arc::new(Invariants { counit: q.counit().clone() });
        let ra = Resolver::minimal(h.algebra(), h.counit(), false).unwrap();
        let pb = InjResProvider::augmented(q.algebra(), q.counit()).unwrap();
        let r = grothendieck_ss(&triv, f.clone(), g.clone(), &ra, &pb, 2, true).unwrap();
        let rep = identify_e2_and_abutment(&r, f, g, &triv, &ra, &pb).unwrap();
        assert!(rep.agree, "{rep:?}");
        assert!(rep.e2.iter().all(|e| e.entry == 1));
        assert!(rep.abutment.iter().all(|a| a.entry == 1));
    }
}
