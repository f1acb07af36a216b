//! Injective modules built from coinduced modules, injective and projective resolutions of single
//! modules, horseshoe resolutions, and lifting of module maps to resolutions.
//!
//! An injective here is `⊕_t Hom_k(A, k^{v_t})`. A module map `N → Hom_k(A, V)` is the same as a
//! linear map `π : N → V`; [`InjectiveModule::lift`] turns `π` into the module map and
//! [`InjectiveModule::ev`] recovers `π` by evaluation at `1`.

use crate::algebra::{socle, AlgebraError, FdAlgebra, FdModule};
use crate::complexes::{CochainComplex, ComplexError, ComplexMap};
use crate::linalg::{kernel_basis, solve, FpMatrix, LinalgError, Subspace};
use std::sync::Arc;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ResolutionError {
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    Complex(#[from] ComplexError),
    #[error("algebra is not local: {0}")]
    NotLocal(String),
    #[error("lift failed: {0}")]
    LiftFailed(&'static str),
    #[error("sequence is not short exact")]
    NotShortExact,
    #[error("resolution check failed: {0}")]
    Invalid(String),
}

/// `⊕_t Hom_k(A, k^{v_t})`; part `t` occupies `dim A · v_t` consecutive coordinates indexed
/// `a * v_t + s`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InjectiveModule {
    parts: Vec<usize>,
    module: FdModule,
}

impl InjectiveModule {
    pub fn new(algebra: Arc<FdAlgebra>, parts: Vec<usize>) -> Self {
        let f = algebra.field();
        let n = algebra.dim();
        let action = (0..n)
            .map(|x| {
                let r = algebra.right_mult(&algebra.basis(x)).transpose();
                let blocks: Vec<FpMatrix> = parts.iter().map(|&v| r.kron(&FpMatrix::identity(f, v))).collect();
                let refs: Vec<&FpMatrix> = blocks.iter().collect();
                FpMatrix::block_diag(f, &refs)
            })
            .collect();
        let dim = n * parts.iter().sum::<usize>();
        let module = FdModule::new_unchecked(algebra, dim, action).expect("shapes");
        Self { parts, module }
    }

    pub fn zero(algebra: Arc<FdAlgebra>) -> Self {
        Self::new(algebra, vec![])
    }

    pub fn direct_sum(parts: &[&InjectiveModule]) -> Self {
        let alg = parts[0].module.algebra().clone();
        Self::new(alg, parts.iter().flat_map(|p| p.parts.iter().copied()).collect())
    }

    pub fn module(&self) -> &FdModule {
        &self.module
    }

    pub fn dim(&self) -> usize {
        self.module.dim()
    }

    pub fn parts(&self) -> &[usize] {
        &self.parts
    }

    /// `dim V` for `V = ⊕ k^{v_t}`.
    pub fn cogenerator_dim(&self) -> usize {
        self.parts.iter().sum()
    }

    /// Evaluation at `1`, a `dim × dim V` matrix.
    pub fn ev(&self) -> FpMatrix {
        let alg = self.module.algebra();
        let f = alg.field();
        let unit = alg.unit();
        let mut out = FpMatrix::zeros(f, self.dim(), self.cogenerator_dim());
        let (mut off, mut voff) = (0, 0);
        for &v in &self.parts {
            for (a, &u) in unit.iter().enumerate() {
                if u != 0 {
                    for s in 0..v {
                        out.set(off + a * v + s, voff + s, u);
                    }
                }
            }
            off += alg.dim() * v;
            voff += v;
        }
        out
    }

    /// The module map `N → self` whose evaluation at `1` is `pi` (`dim N × dim V`).
    pub fn lift(&self, src: &FdModule, pi: &FpMatrix) -> FpMatrix {
        let alg = self.module.algebra();
        let f = alg.field();
        let mut out = FpMatrix::zeros(f, src.dim(), self.dim());
        let acts: Vec<FpMatrix> = (0..alg.dim()).map(|a| src.action(a) * pi).collect();
        let (mut off, mut voff) = (0, 0);
        for &v in &self.parts {
            for (a, img) in acts.iter().enumerate() {
                out.set_block(0, off + a * v, &img.block(0, voff, src.dim(), v));
            }
            off += alg.dim() * v;
            voff += v;
        }
        out
    }
}

/// Right inverse `r` of a matrix with independent rows: `m * r = 1`.
pub fn right_inverse(m: &FpMatrix) -> Option<FpMatrix> {
    let f = m.field();
    solve(&m.transpose(), &FpMatrix::identity(f, m.rows())).map(|x| x.transpose())
}

/// A module map `D → tgt` extending `c : C → tgt` along the mono `mono : C → D`.
pub fn extend_along_mono(mono: &FpMatrix, c: &FpMatrix, src: &FdModule, tgt: &InjectiveModule) -> Result<FpMatrix, ResolutionError> {
    let r = right_inverse(mono).ok_or(ResolutionError::LiftFailed("not a mono"))?;
    let pi = &r * &(c * &tgt.ev());
    let phi = tgt.lift(src, &pi);
    if &(mono * &phi) != c {
        return Err(ResolutionError::LiftFailed("extension does not restrict to the given map"));
    }
    Ok(phi)
}

/// How injective hulls are chosen.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum InjResProvider {
    /// `M ↪ Hom_k(A, M)`; works for every algebra.
    Coinduced,
    /// `M ↪ Hom_k(A, soc M)`, the minimal hull over a local algebra with the given radical.
    LocalSocle { radical: Subspace },
}

impl InjResProvider {
    /// Verifies that `radical` is a nilpotent ideal of codimension one.
    pub fn local_socle(algebra: &FdAlgebra, radical: Subspace) -> Result<Self, ResolutionError> {
        if radical.ambient_dim() != algebra.dim() || radical.dim() + 1 != algebra.dim() {
            return Err(ResolutionError::NotLocal(format!("radical has codimension {}", algebra.dim() - radical.dim())));
        }
        if algebra.ideal_generated(&radical) != radical {
            return Err(ResolutionError::NotLocal("radical is not an ideal".into()));
        }
        let probe = FdModule::regular(Arc::new(algebra.clone()));
        socle(&probe, &radical).map_err(|e| ResolutionError::NotLocal(e.to_string()))?;
        Ok(Self::LocalSocle { radical })
    }

    /// The local-socle provider with radical `ker ε` for an augmentation `ε` (a `dim × 1` column).
    pub fn augmented(algebra: &FdAlgebra, counit: &FpMatrix) -> Result<Self, ResolutionError> {
        Self::local_socle(algebra, kernel_basis(counit))
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::Coinduced => "coinduced",
            Self::LocalSocle { .. } => "local-socle",
        }
    }

    /// An injective `I` and a mono `M → I`.
    pub fn hull(&self, m: &FdModule) -> Result<(InjectiveModule, FpMatrix), ResolutionError> {
        let alg = m.algebra().clone();
        let f = m.field();
        let (inj, pi) = match self {
            Self::Coinduced => (InjectiveModule::new(alg, vec![m.dim()]), FpMatrix::identity(f, m.dim())),
            Self::LocalSocle { radical } => {
                let soc = socle(m, radical)?;
                let pi = if soc.dim() == 0 {
                    FpMatrix::zeros(f, m.dim(), 0)
                } else {
                    right_inverse(soc.basis()).expect("echelon basis has independent rows")
                };
                (InjectiveModule::new(alg, vec![soc.dim()]), pi)
            }
        };
        let emb = inj.lift(m, &pi);
        if emb.rank() != m.dim() {
            return Err(ResolutionError::LiftFailed("hull map is not injective"));
        }
        Ok((inj, emb))
    }
}

/// `0 → M → I^0 → … → I^L` with the cokernels `C^n` (`C^0 = M`), `ε^n : C^n ↣ I^n` and the
/// projections `I^{n-1} ↠ C^n`, so that `d^{n-1} = proj^n ε^n`.
#[derive(Clone, Debug)]
pub struct InjRes {
    pub module: FdModule,
    pub entries: Vec<InjectiveModule>,
    pub cokernels: Vec<FdModule>,
    pub eps: Vec<FpMatrix>,
    /// `proj[n - 1] : I^{n-1} → C^n`.
    pub proj: Vec<FpMatrix>,
    /// Representatives of the basis of `C^n` in `I^{n-1}`, indexed like `proj`.
    pub reps: Vec<FpMatrix>,
}

/// The cokernel of a mono into a module: the quotient module, the projection and representatives.
fn cokernel(m: &FdModule, img: &FpMatrix) -> Result<(FdModule, FpMatrix, FpMatrix), ResolutionError> {
    let (q, sq) = m.quotient(&Subspace::from_rows(img))?;
    let proj = sq.coords_unchecked(&FpMatrix::identity(m.field(), m.dim()));
    Ok((q, proj, sq.complement().clone()))
}

impl InjRes {
    pub fn length(&self) -> usize {
        self.entries.len() - 1
    }

    pub fn augmentation(&self) -> &FpMatrix {
        &self.eps[0]
    }

    /// `d^n : I^n → I^{n+1}`.
    pub fn diff(&self, n: usize) -> FpMatrix {
        &self.proj[n] * &self.eps[n + 1]
    }

    pub fn dims(&self) -> Vec<usize> {
        self.entries.iter().map(|e| e.dim()).collect()
    }

    /// The complex `I^0 → … → I^L`; its homology is trusted below `L`.
    pub fn complex(&self) -> CochainComplex {
        let mods = self.entries.iter().map(|e| e.module().clone()).collect();
        let diffs = (0..self.length()).map(|n| self.diff(n)).collect();
        CochainComplex::from_modules(0, mods, diffs)
            .expect("resolution differentials compose to zero")
            .with_exact_through(Some(self.length() as i64 - 1))
    }

    /// Keeps `I^0..I^L`.
    pub fn truncate(&self, l: usize) -> InjRes {
        let l = l.min(self.length());
        InjRes {
            module: self.module.clone(),
            entries: self.entries[..=l].to_vec(),
            cokernels: self.cokernels[..=l].to_vec(),
            eps: self.eps[..=l].to_vec(),
            proj: self.proj[..l].to_vec(),
            reps: self.reps[..l].to_vec(),
        }
    }

    /// Checks that every `ε^n` is a mono module map, that `proj^n` kills its image, and that the
    /// augmented complex is exact below `L`.
    pub fn validate(&self) -> Result<(), ResolutionError> {
        for (n, e) in self.eps.iter().enumerate() {
            if e.rank() != self.cokernels[n].dim() || !self.cokernels[n].intertwines(self.entries[n].module(), e) {
                return Err(ResolutionError::Invalid(format!("ε^{n} is not a mono module map")));
            }
        }
        for n in 0..self.length() {
            if !(&self.eps[n] * &self.proj[n]).is_zero() || self.proj[n].rank() != self.cokernels[n + 1].dim() {
                return Err(ResolutionError::Invalid(format!("projection {n} is not a cokernel")));
            }
        }
        let x = self.complex();
        for n in 0..self.length() as i64 {
            let expected = if n == 0 { self.module.dim() } else { 0 };
            if x.homology_dim(n) != expected {
                return Err(ResolutionError::Invalid(format!("not exact at degree {n}")));
            }
        }
        let aug = &self.eps[0];
        if !x.cycles(0).contains_rows(aug) || (self.length() > 0 && Subspace::from_rows(aug) != x.cycles(0)) {
            return Err(ResolutionError::Invalid("augmentation does not hit H^0".into()));
        }
        Ok(())
    }
}

/// An injective resolution of length `length` built from `provider`'s hulls.
pub fn injective_resolution(m: &FdModule, provider: &InjResProvider, length: usize) -> Result<InjRes, ResolutionError> {
    let mut res = InjRes { module: m.clone(), entries: vec![], cokernels: vec![m.clone()], eps: vec![], proj: vec![], reps: vec![] };
    for n in 0..=length {
        let (inj, e) = provider.hull(&res.cokernels[n])?;
        if n < length {
            let (q, proj, reps) = cokernel(inj.module(), &e)?;
            res.cokernels.push(q);
            res.proj.push(proj);
            res.reps.push(reps);
        }
        res.entries.push(inj);
        res.eps.push(e);
    }
    Ok(res)
}

/// Horseshoe resolution of an extension: the middle resolution with entries `I′^n ⊕ I″^n`.
#[derive(Clone, Debug)]
pub struct Horseshoe {
    pub middle: InjRes,
    /// The maps `C′^n → C^n` and `C^n → C″^n` on cokernels; index 0 is the input sequence.
    pub sub_maps: Vec<FpMatrix>,
    pub quo_maps: Vec<FpMatrix>,
}

/// Builds a resolution of `M` from resolutions of `M′` and `M″` for `M′ ↣f M ↠g M″`.
pub fn horseshoe(m: &FdModule, f: &FpMatrix, g: &FpMatrix, sub: &InjRes, quo: &InjRes) -> Result<Horseshoe, ResolutionError> {
    let fl = f.field();
    let mid_dim = f.cols();
    if f.rows() != sub.module.dim()
        || g.cols() != quo.module.dim()
        || g.rows() != mid_dim
        || !(f * g).is_zero()
        || f.rank() != f.rows()
        || g.rank() != g.cols()
        || f.rows() + g.cols() != mid_dim
        || !sub.module.intertwines(m, f)
        || !m.intertwines(&quo.module, g)
    {
        return Err(ResolutionError::NotShortExact);
    }
    let length = sub.length().min(quo.length());
    let mut out = InjRes { module: m.clone(), entries: vec![], cokernels: vec![m.clone()], eps: vec![], proj: vec![], reps: vec![] };
    let (mut fn_, mut gn) = (f.clone(), g.clone());
    let mut sub_maps = vec![fn_.clone()];
    let mut quo_maps = vec![gn.clone()];
    for n in 0..=length {
        let c = out.cokernels[n].clone();
        let h = extend_along_mono(&fn_, &sub.eps[n], &c, &sub.entries[n])?;
        let eps = FpMatrix::hstack(fl, c.dim(), &[&h, &(&gn * &quo.eps[n])]);
        let inj = InjectiveModule::direct_sum(&[&sub.entries[n], &quo.entries[n]]);
        if eps.rank() != c.dim() {
            return Err(ResolutionError::LiftFailed("horseshoe embedding is not injective"));
        }
        if n < length {
            let (q, proj, reps) = cokernel(inj.module(), &eps)?;
            let (d1, d2) = (sub.entries[n].dim(), quo.entries[n].dim());
            let incl = FpMatrix::hstack(fl, d1, &[&FpMatrix::identity(fl, d1), &FpMatrix::zeros(fl, d1, d2)]);
            let pr = FpMatrix::vstack(fl, d2, &[&FpMatrix::zeros(fl, d1, d2), &FpMatrix::identity(fl, d2)]);
            fn_ = &(&sub.reps[n] * &incl) * &proj;
            gn = &(&reps * &pr) * &quo.proj[n];
            sub_maps.push(fn_.clone());
            quo_maps.push(gn.clone());
            out.cokernels.push(q);
            out.proj.push(proj);
            out.reps.push(reps);
        }
        out.entries.push(inj);
        out.eps.push(eps);
    }
    Ok(Horseshoe { middle: out, sub_maps, quo_maps })
}

/// Lifts a module map `f : M → N` to a chain map `I_M → I_N` compatible with the augmentations.
pub fn lift_map_to_resolutions(f: &FpMatrix, src: &InjRes, tgt: &InjRes) -> Result<ComplexMap, ResolutionError> {
    if !src.module.intertwines(&tgt.module, f) {
        return Err(ResolutionError::LiftFailed("not a module map"));
    }
    let length = src.length().min(tgt.length());
    let mut comps = Vec::with_capacity(length + 1);
    let mut c = f.clone();
    for n in 0..=length {
        let phi = extend_along_mono(&src.eps[n], &(&c * &tgt.eps[n]), src.entries[n].module(), &tgt.entries[n])?;
        if n < length {
            c = &(&src.reps[n] * &phi) * &tgt.proj[n];
        }
        comps.push(phi);
    }
    let s = Arc::new(src.truncate(length).complex());
    let t = Arc::new(tgt.truncate(length).complex());
    Ok(ComplexMap::new(s, t, 0, comps)?)
}

/// `P_0 ← P_1 ← … ← P_L` over an algebra with `aug : P_0 → M`; `boundary[j] : P_{j+1} → P_j`.
#[derive(Clone, Debug)]
pub struct ProjRes {
    pub module: FdModule,
    pub entries: Vec<FdModule>,
    pub aug: FpMatrix,
    pub boundary: Vec<FpMatrix>,
}

impl ProjRes {
    pub fn length(&self) -> usize {
        self.entries.len() - 1
    }

    pub fn dims(&self) -> Vec<usize> {
        self.entries.iter().map(|e| e.dim()).collect()
    }

    /// Checks module maps, `∂∂ = 0`, `∂ aug = 0` and exactness of `… → P_0 → M → 0` below `L`.
    pub fn validate(&self) -> Result<(), ResolutionError> {
        let bad = |s: String| Err(ResolutionError::Invalid(s));
        if !self.entries[0].intertwines(&self.module, &self.aug) || self.aug.rank() != self.module.dim() {
            return bad("augmentation is not an epi module map".into());
        }
        for (j, b) in self.boundary.iter().enumerate() {
            if !self.entries[j + 1].intertwines(&self.entries[j], b) {
                return bad(format!("∂_{} is not a module map", j + 1));
            }
            let prev = if j == 0 { self.aug.clone() } else { self.boundary[j - 1].clone() };
            if !(b * &prev).is_zero() || Subspace::from_rows(b) != kernel_basis(&prev) {
                return bad(format!("not exact at P_{j}"));
            }
        }
        Ok(())
    }
}

/// How projective covers are chosen.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ProjCover {
    /// `A ⊗ M → M` on all basis vectors.
    Free,
    /// `A^t → M` on a basis of `M / rad M`.
    Minimal { radical: Subspace },
}

/// The free module `A^t` and the map sending the `s`-th generator to `gens[s]`.
fn free_cover(m: &FdModule, gens: &FpMatrix) -> (FdModule, FpMatrix) {
    let alg = m.algebra().clone();
    let f = m.field();
    let reg = FdModule::regular(alg.clone());
    let t = gens.rows();
    let copies: Vec<&FdModule> = (0..t).map(|_| &reg).collect();
    let free = if t == 0 { FdModule::zero(alg.clone()) } else { FdModule::direct_sum(&copies).expect("same algebra") };
    let mut map = FpMatrix::zeros(f, alg.dim() * t, m.dim());
    for s in 0..t {
        let g = gens.row_matrix(s);
        for a in 0..alg.dim() {
            map.set_block(s * alg.dim() + a, 0, &(&g * m.action(a)));
        }
    }
    (free, map)
}

pub fn projective_resolution(m: &FdModule, cover: &ProjCover, length: usize) -> Result<ProjRes, ResolutionError> {
    let f = m.field();
    let gens_of = |x: &FdModule| -> Result<FpMatrix, ResolutionError> {
        Ok(match cover {
            ProjCover::Free => FpMatrix::identity(f, x.dim()),
            ProjCover::Minimal { radical } => crate::algebra::top(x, radical)?.complement().clone(),
        })
    };
    let (p0, aug) = free_cover(m, &gens_of(m)?);
    let mut entries = vec![p0];
    let mut boundary = vec![];
    let mut prev = aug.clone();
    for j in 0..length {
        let k = kernel_basis(&prev);
        let kmod = entries[j].submodule(&k)?;
        let (p, cov) = free_cover(&kmod, &gens_of(&kmod)?);
        let b = &cov * k.basis();
        entries.push(p);
        boundary.push(b.clone());
        prev = b;
    }
    Ok(ProjRes { module: m.clone(), entries, aug, boundary })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{group_algebra, GroupTable};
    use crate::linalg::FieldSpec;

    fn setup(n: usize) -> (Arc<FdAlgebra>, FdModule, InjResProvider) {
        let f = FieldSpec::new(2).unwrap();
        let alg = Arc::new(group_algebra(&GroupTable::cyclic(n), f));
        let triv = FdModule::character(alg.clone(), &vec![1; n]).unwrap();
        let counit = FpMatrix::from_vec(f, n, 1, vec![1; n]);
        let prov = InjResProvider::augmented(&alg, &counit).unwrap();
        (alg, triv, prov)
    }

    #[test]
    fn minimal_resolution_dims() {
        let (_, triv, prov) = setup(2);
        let r = injective_resolution(&triv, &prov, 4).unwrap();
        r.validate().unwrap();
        assert_eq!(r.dims(), vec![2; 5]);
        let (_, triv, prov) = setup(4);
        let r = injective_resolution(&triv, &prov, 4).unwrap();
        r.validate().unwrap();
        assert_eq!(r.dims(), vec![4; 5]);
    }

    #[test]
    fn coinduced_first_step() {
        let (alg, _, _) = setup(4);
        let reg = FdModule::regular(alg);
        let r = injective_resolution(&reg, &InjResProvider::Coinduced, 2).unwrap();
        r.validate().unwrap();
        assert_eq!(r.dims()[0], 16);
    }

    #[test]
    fn non_local_radical_rejected() {
        let f = FieldSpec::new(3).unwrap();
        let alg = group_algebra(&GroupTable::cyclic(2), f);
        let counit = FpMatrix::from_vec(f, 2, 1, vec![1, 1]);
        assert!(matches!(InjResProvider::augmented(&alg, &counit), Err(ResolutionError::NotLocal(_))));
    }

    #[test]
    fn lifts_identity_across_resolutions() {
        let (_, triv, prov) = setup(4);
        let a = injective_resolution(&triv, &prov, 3).unwrap();
        let b = injective_resolution(&triv, &InjResProvider::Coinduced, 3).unwrap();
        let id = FpMatrix::identity(triv.field(), 1);
        let phi = lift_map_to_resolutions(&id, &a, &b).unwrap();
        assert!((&a.eps[0] * &phi.component(0)) == b.eps[0]);
        let z = FpMatrix::zeros(triv.field(), 1, 1);
        lift_map_to_resolutions(&z, &a, &b).unwrap();
    }

    #[test]
    fn horseshoe_over_c2() {
        let (alg, triv, prov) = setup(2);
        let reg = FdModule::regular(alg);
        let fl = triv.field();
        let f = FpMatrix::from_i64(fl, 1, 2, &[1, 1]);
        let g = FpMatrix::from_i64(fl, 2, 1, &[1, 1]);
        let r = injective_resolution(&triv, &prov, 3).unwrap();
        let h = horseshoe(&reg, &f, &g, &r, &r).unwrap();
        h.middle.validate().unwrap();
        assert_eq!(h.middle.dims(), vec![4; 4]);
        let zero = FdModule::zero(triv.algebra().clone());
        let rz = injective_resolution(&zero, &prov, 3).unwrap();
        let id = FpMatrix::identity(fl, 1);
        let h = horseshoe(&triv, &FpMatrix::zeros(fl, 0, 1), &id, &rz, &r).unwrap();
        assert_eq!(h.middle.dims(), r.dims());
    }

    #[test]
    fn minimal_projective_resolution() {
        let (alg, triv, _) = setup(4);
        let counit = FpMatrix::from_vec(triv.field(), 4, 1, vec![1; 4]);
        let rad = kernel_basis(&counit);
        let _ = alg;
        let p = projective_resolution(&triv, &ProjCover::Minimal { radical: rad }, 4).unwrap();
        p.validate().unwrap();
        assert_eq!(p.dims(), vec![4; 5]);
        let p = projective_resolution(&triv, &ProjCover::Free, 2).unwrap();
        p.validate().unwrap();
    }
}
