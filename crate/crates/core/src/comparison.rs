//! Executable comparisons of spectral sequences.
//!
//! The two-variable comparison joins `Ė_I(G J)` for `F(X, A′)` and for `F(A, X′)` through the
//! total complex `tF(A, A′)`. The double-complex comparison joins `Ė_I(G(B, FA))` and the
//! Grothendieck spectral sequence of `F` and `G(Y, −)` through the planewise total complex of
//! `G(B, J′)`. Both arrows of each chain are checked entrywise on the dotted window.

use crate::algebra::{FdAlgebra, FdModule};
use crate::bicomplex::{ce_resolution, lift_map_to_ce, BicomplexError, CEResolution, DoubleComplex, DoubleComplexMap, TripleComplex};
use crate::complexes::{CochainComplex, ComplexError, ComplexMap};
use crate::grothendieck::{
    apply_to_double, apply_to_double_map, apply_to_resolution, bimap, check_acyclic_resolution, default_lengths, derived_dims, fmap,
    functor_laws_hold, ground_module, Applied, Bifunctor, FirstFixed, Functor, GrothendieckError, HomOver, Identity, Resolution, Resolver, SecondFixed,
};
use crate::injective::{lift_map_to_resolutions, InjResProvider, ResolutionError};
use crate::linalg::{FpMatrix, LinalgError, Subspace};
use crate::spectral::{dotted_nodes, first_filtration_map, proper_iso_check, FilteredComplex, FilteredMap, ProperIsoReport, SpectralError};
use rayon::prelude::*;
use serde::Serialize;
use std::sync::Arc;

#[derive(Debug, thiserror::Error)]
pub enum ComparisonError {
    #[error(transparent)]
    Grothendieck(#[from] GrothendieckError),
    #[error(transparent)]
    Bicomplex(#[from] BicomplexError),
    #[error(transparent)]
    Complex(#[from] ComplexError),
    #[error(transparent)]
    Spectral(#[from] SpectralError),
    #[error(transparent)]
    Resolution(#[from] ResolutionError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error("hypothesis fails: {0}")]
    HypothesisFailed(String),
    #[error("lift failed: {0}")]
    LiftFailed(String),
}

#[derive(Clone, Debug, Serialize)]
pub struct EntryRecord {
    pub index: String,
    pub degree: i64,
    pub dims: Vec<usize>,
    pub arrows: Vec<bool>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ArrowVerdict {
    pub name: String,
    pub report: ProperIsoReport,
}

#[derive(Clone, Debug, Serialize)]
pub struct Hypothesis {
    pub name: String,
    pub holds: bool,
    pub detail: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct ComparisonReport {
    pub instance: String,
    pub window: usize,
    pub trusted_through: i64,
    pub complexes: Vec<String>,
    pub hypotheses: Vec<Hypothesis>,
    pub waived: bool,
    pub entries: Vec<EntryRecord>,
    pub arrows: Vec<ArrowVerdict>,
    pub dims_agree: bool,
    pub verdict: bool,
}

impl ComparisonReport {
    pub fn hypotheses_hold(&self) -> bool {
        self.hypotheses.iter().all(|h| h.holds)
    }
}

fn hypothesis(name: &str, holds: bool, detail: impl Into<String>) -> Hypothesis {
    Hypothesis { name: name.into(), holds, detail: detail.into() }
}

fn enforce(hyps: &[Hypothesis], waive: bool) -> Result<(), ComparisonError> {
    if waive {
        return Ok(());
    }
    match hyps.iter().find(|h| !h.holds) {
        Some(h) => Err(ComparisonError::HypothesisFailed(format!("{}: {}", h.name, h.detail))),
        None => Ok(()),
    }
}

fn lifted(f: &ComplexMap, src: &CEResolution, tgt: &CEResolution) -> Result<DoubleComplexMap, ComparisonError> {
    lift_map_to_ce(f, src, tgt).map_err(|e| ComparisonError::LiftFailed(e.to_string()))
}

/// The filtered map of first filtrations induced by a map of double complexes.
pub fn filtered_map<'a>(src: &'a FilteredComplex, tgt: &'a FilteredComplex, m: &DoubleComplexMap) -> Result<FilteredMap<'a>, ComparisonError> {
    Ok(first_filtration_map(src, tgt, &m.src, &m.tgt, |i, j| m.comp(i, j))?)
}

/// Effective length of a resolution: complete resolutions impose no truncation.
fn effective_length(r: &Resolution) -> usize {
    if r.complete {
        usize::MAX
    } else {
        r.length()
    }
}

/// Entry dimensions of every complex and invertibility of every arrow on the dotted window, plus
/// the full check of each arrow.
fn tabulate(complexes: &[&FilteredComplex], arrows: &[(&str, &FilteredMap<'_>)], window: usize) -> Result<(Vec<EntryRecord>, Vec<ArrowVerdict>, bool), ComparisonError> {
    let nodes = dotted_nodes(complexes[0], 0, window as i64);
    let mut entries: Vec<EntryRecord> = nodes
        .par_iter()
        .map(|(_, o, e)| -> Result<EntryRecord, ComparisonError> {
            let dims = complexes.iter().map(|c| c.entry(e).map(|s| s.dim())).collect::<Result<Vec<_>, _>>()?;
            let arrows = arrows
                .iter()
                .map(|(_, m)| -> Result<bool, ComparisonError> {
                    let (i, o) = m.src.entry_nodes(e);
                    let (mat, a, b) = m.entry_map_at(i, o)?;
                    Ok(a == b && mat.rank() == a)
                })
                .collect::<Result<Vec<_>, _>>()?;
            Ok(EntryRecord { index: e.to_string(), degree: o.degree, dims, arrows })
        })
        .collect::<Result<_, _>>()?;
    entries.sort_by(|a, b| (a.degree, &a.index).cmp(&(b.degree, &b.index)));
    let dims_agree = entries.iter().all(|r| r.dims.windows(2).all(|w| w[0] == w[1]));
    let verdicts = arrows
        .iter()
        .map(|(name, m)| Ok(ArrowVerdict { name: name.to_string(), report: proper_iso_check(m, 0, window as i64)? }))
        .collect::<Result<Vec<_>, ComparisonError>>()?;
    Ok((entries, verdicts, dims_agree))
}

fn trusted_of(xs: &[&FilteredComplex]) -> i64 {
    xs.iter().filter_map(|x| x.trusted()).min().unwrap_or(i64::MAX)
}

/// Inputs of the two-variable comparison: `F : 𝒜 × 𝒜′ → ℬ`, `G : ℬ → 𝒞`, objects `X`, `X′`
/// with resolutions `A`, `A′`.
pub struct FirstInstance {
    pub label: String,
    pub f: Arc<dyn Bifunctor>,
    pub g: Arc<dyn Functor>,
    pub x: FdModule,
    pub x2: FdModule,
    pub res_a: Resolution,
    pub res_a2: Resolution,
    pub resolver_a: Resolver,
    pub resolver_a2: Resolver,
    pub provider_b: InjResProvider,
}

/// The three spectral sequences of the two-variable comparison and the arrows between them.
pub struct FirstComparison {
    pub report: ComparisonReport,
    pub k1: Arc<CochainComplex>,
    pub k1_applied: Vec<Applied>,
    pub k2: Arc<CochainComplex>,
    pub k2_applied: Vec<Applied>,
    pub tf: Arc<DoubleComplex>,
    pub tf_applied: Vec<Vec<Applied>>,
    pub t: Arc<CochainComplex>,
    pub phi1: ComplexMap,
    pub phi2: ComplexMap,
    pub ce1: CEResolution,
    pub ce2: CEResolution,
    pub cet: CEResolution,
    pub g1: (Arc<DoubleComplex>, Vec<Vec<Applied>>),
    pub g2: (Arc<DoubleComplex>, Vec<Vec<Applied>>),
    pub gt: (Arc<DoubleComplex>, Vec<Vec<Applied>>),
    pub ff1: FilteredComplex,
    pub ff2: FilteredComplex,
    pub fft: FilteredComplex,
    pub lift1: DoubleComplexMap,
    pub lift2: DoubleComplexMap,
}

/// `F(A, A′)` on the window `i + k ≤ m`, rows indexed by `A`.
fn bifunctor_double(f: &dyn Bifunctor, a: &Resolution, a2: &Resolution, m: usize) -> Result<(DoubleComplex, Vec<Vec<Applied>>), ComparisonError> {
    let (rows, cols) = (a.length().min(m) + 1, a2.length().min(m) + 1);
    let fl = a.object.field();
    let cells: Vec<(usize, usize)> = (0..rows).flat_map(|i| (0..cols).map(move |k| (i, k))).collect();
    let zero_alg = f.apply(&a.terms[0], &a2.terms[0])?.module.algebra().clone();
    let applied: Vec<Applied> = cells
        .par_iter()
        .map(|&(i, k)| {
            if i + k <= m {
                f.apply(&a.terms[i], &a2.terms[k])
            } else {
                Ok(Applied { module: FdModule::zero(zero_alg.clone()), carrier: Subspace::zero(fl, 0) })
            }
        })
        .collect::<Result<_, _>>()?;
    let grid: Vec<Vec<Applied>> = (0..rows).map(|i| applied[i * cols..(i + 1) * cols].to_vec()).collect();
    let maps: Vec<(FpMatrix, FpMatrix)> = cells
        .par_iter()
        .map(|&(i, k)| -> Result<_, ComparisonError> {
            let here = &grid[i][k];
            let (ai, ak) = (&a.terms[i], &a2.terms[k]);
            let d = if k + 1 < cols && i + k < m {
                let id = FpMatrix::identity(fl, ai.dim());
                bimap(f, (ai, ai, &id), (ak, &a2.terms[k + 1], &a2.maps[k]), here, &grid[i][k + 1])?
            } else {
                FpMatrix::zeros(fl, here.dim(), if k + 1 < cols { grid[i][k + 1].dim() } else { 0 })
            };
            let de = if i + 1 < rows && i + k < m {
                let id = FpMatrix::identity(fl, ak.dim());
                bimap(f, (ai, &a.terms[i + 1], &a.maps[i]), (ak, ak, &id), here, &grid[i + 1][k])?
            } else {
                FpMatrix::zeros(fl, here.dim(), if i + 1 < rows { grid[i + 1][k].dim() } else { 0 })
            };
            Ok((d, de))
        })
        .collect::<Result<_, _>>()?;
    let x = DoubleComplex::from_fn(fl, rows, cols, |i, k| grid[i][k].dim(), |i, k| maps[i * cols + k].0.clone(), |i, k| maps[i * cols + k].1.clone())?;
    let mods = grid.iter().map(|r| r.iter().map(|a| a.module.clone()).collect()).collect();
    Ok((x.with_modules(mods)?, grid))
}

/// `0 → F(·) → column/row` is exact below the top position of the window.
fn augmented_exact(aug: &FpMatrix, line: &[FpMatrix], top: usize) -> bool {
    if aug.rank() != aug.rows() {
        return false;
    }
    let mut prev = aug.clone();
    for (n, d) in line.iter().enumerate() {
        if n >= top {
            break;
        }
        if Subspace::from_rows(&prev) != crate::linalg::kernel_basis(d) {
            return false;
        }
        prev = d.clone();
    }
    true
}

fn homology_iso_through(f: &ComplexMap, t: i64) -> bool {
    (0..=t).all(|k| {
        let (a, b) = (f.src().homology_dim(k), f.tgt().homology_dim(k));
        a == b && f.homology_map(k).rank() == a
    })
}

pub fn first_comparison(inst: &FirstInstance, window: usize, waive: bool) -> Result<FirstComparison, ComparisonError> {
    let f = inst.f.as_ref();
    let fl = inst.x.field();
    let (var_a, var_a2) = f.variance();
    if var_a != inst.res_a.opposite || var_a2 != inst.res_a2.opposite {
        return Err(GrothendieckError::Variance(format!("{} against the resolutions {} and {}", f.name(), inst.res_a.label, inst.res_a2.label)).into());
    }
    let (_, bound) = default_lengths(window);
    let m = effective_length(&inst.res_a).min(effective_length(&inst.res_a2)).min(bound + 1);
    let f_x = Arc::new(FirstFixed { bf: inst.f.clone(), x: inst.x.clone() });
    let f_x2 = Arc::new(SecondFixed { bf: inst.f.clone(), y: inst.x2.clone() });
    let rb = Resolver::Injective(inst.provider_b.clone());

    let mut hyps = vec![hypothesis("left exactness", inst.g.left_exact(), format!("declared for {} and {}", f.name(), inst.g.name()))];
    for (name, func, res) in [("functoriality in the first variable", f_x2.clone() as Arc<dyn Functor>, &inst.res_a), ("functoriality in the second variable", f_x.clone() as Arc<dyn Functor>, &inst.res_a2)] {
        if res.length() >= 2 {
            let ok = functor_laws_hold(func.as_ref(), &res.terms[0], &res.terms[1], &res.terms[2], &res.maps[0], &res.maps[1])?;
            hyps.push(hypothesis(name, ok, "identity, composition and direct sums on resolution maps"));
        }
    }
    let depth = window.min(2);
    let ac_a = check_acyclic_resolution(&inst.res_a, f_x2.clone(), inst.g.clone(), &inst.resolver_a, &rb, depth)?;
    hyps.push(hypothesis("first resolution is acyclic for F(-, X') and G", ac_a.passed(), ac_a.failures.join("; ")));
    let ac_a2 = check_acyclic_resolution(&inst.res_a2, f_x.clone(), inst.g.clone(), &inst.resolver_a2, &rb, depth)?;
    hyps.push(hypothesis("second resolution is acyclic for F(X, -) and G", ac_a2.passed(), ac_a2.failures.join("; ")));

    let (tf, tf_applied) = bifunctor_double(f, &inst.res_a, &inst.res_a2, m)?;
    let (k1, k1_applied) = apply_to_resolution(f_x.as_ref(), &inst.res_a2)?;
    let (k2, k2_applied) = apply_to_resolution(f_x2.as_ref(), &inst.res_a)?;

    let col_top = if inst.res_a.complete { usize::MAX } else { inst.res_a.length() };
    let row_top = if inst.res_a2.complete { usize::MAX } else { inst.res_a2.length() };
    let mut cols_ok = true;
    for k in 0..tf.cols() {
        if tf.rows() == 0 || k > m {
            break;
        }
        let id = FpMatrix::identity(fl, inst.res_a2.terms[k].dim());
        let aug = bimap(f, (&inst.x, &inst.res_a.terms[0], &inst.res_a.aug), (&inst.res_a2.terms[k], &inst.res_a2.terms[k], &id), &k1_applied[k], &tf_applied[0][k])?;
        let line: Vec<FpMatrix> = (0..tf.rows().saturating_sub(1)).filter(|&i| i + k < m).map(|i| tf.delta(i, k)).collect();
        cols_ok &= augmented_exact(&aug, &line, col_top.min(m - k).saturating_sub(1));
    }
    hyps.push(hypothesis("F(A, A'^k) resolves F(X, A'^k)", cols_ok, "augmented columns are exact on the window"));
    let mut rows_ok = true;
    for i in 0..tf.rows() {
        let id = FpMatrix::identity(fl, inst.res_a.terms[i].dim());
        let aug = bimap(f, (&inst.res_a.terms[i], &inst.res_a.terms[i], &id), (&inst.x2, &inst.res_a2.terms[0], &inst.res_a2.aug), &k2_applied[i], &tf_applied[i][0])?;
        let line: Vec<FpMatrix> = (0..tf.cols().saturating_sub(1)).filter(|&k| i + k < m).map(|k| tf.d(i, k)).collect();
        rows_ok &= augmented_exact(&aug, &line, row_top.min(m - i).saturating_sub(1));
    }
    hyps.push(hypothesis("F(A^i, A') resolves F(A^i, X')", rows_ok, "augmented rows are exact on the window"));

    let tf = tf.truncate_total(m);
    let t_trusted = tf.trusted();
    let t = Arc::new(tf.total()?.with_exact_through(t_trusted));
    let (k1, k2) = (Arc::new(k1), Arc::new(k2));
    let comps1: Vec<FpMatrix> = (0..=k1.hi())
        .map(|k| -> Result<FpMatrix, ComparisonError> {
            let ku = k as usize;
            let mut c = FpMatrix::zeros(fl, k1.dim(k), t.dim(k));
            if ku <= m && tf.dim(0, ku) > 0 {
                let id = FpMatrix::identity(fl, inst.res_a2.terms[ku].dim());
                let b = bimap(f, (&inst.x, &inst.res_a.terms[0], &inst.res_a.aug), (&inst.res_a2.terms[ku], &inst.res_a2.terms[ku], &id), &k1_applied[ku], &tf_applied[0][ku])?;
                c.set_block(0, 0, &b);
            }
            Ok(c)
        })
        .collect::<Result<_, _>>()?;
    let phi1 = ComplexMap::new(k1.clone(), t.clone(), 0, comps1)?;
    let comps2: Vec<FpMatrix> = (0..=k2.hi())
        .map(|i| -> Result<FpMatrix, ComparisonError> {
            let iu = i as usize;
            let mut c = FpMatrix::zeros(fl, k2.dim(i), t.dim(i));
            if let Some(&(_, _, off)) = tf.total_layout(iu).iter().find(|e| e.0 == iu && e.1 == 0) {
                if tf.dim(iu, 0) > 0 {
                    let id = FpMatrix::identity(fl, inst.res_a.terms[iu].dim());
                    let b = bimap(f, (&inst.res_a.terms[iu], &inst.res_a.terms[iu], &id), (&inst.x2, &inst.res_a2.terms[0], &inst.res_a2.aug), &k2_applied[iu], &tf_applied[iu][0])?;
                    c.set_block(0, off, &b.signed((i * (i - 1) / 2) % 2));
                }
            }
            Ok(c)
        })
        .collect::<Result<_, _>>()?;
    let phi2 = ComplexMap::new(k2.clone(), t.clone(), 0, comps2)?;
    let q_through = t_trusted.unwrap_or(m as i64 - 1);
    let qis = homology_iso_through(&phi1, q_through) && homology_iso_through(&phi2, q_through);
    hyps.push(hypothesis("comparison maps into the total complex are quasi-isomorphisms", qis, format!("checked through degree {q_through}")));
    enforce(&hyps, waive)?;

    let ce1 = ce_resolution(&k1, &inst.provider_b, bound)?;
    let ce2 = ce_resolution(&k2, &inst.provider_b, bound)?;
    let cet = ce_resolution(&t, &inst.provider_b, bound)?;
    let l1 = lifted(&phi1, &ce1, &cet)?;
    let l2 = lifted(&phi2, &ce2, &cet)?;
    let g = inst.g.as_ref();
    let wrap = |(x, grid): (DoubleComplex, Vec<Vec<Applied>>)| (Arc::new(x), grid);
    let g1 = wrap(apply_to_double(g, &ce1.carrier)?);
    let g2 = wrap(apply_to_double(g, &ce2.carrier)?);
    let gt = wrap(apply_to_double(g, &cet.carrier)?);
    let lift1 = apply_to_double_map(g, &ce1.carrier, &cet.carrier, (&g1.0, &g1.1), (&gt.0, &gt.1), &l1)?;
    let lift2 = apply_to_double_map(g, &ce2.carrier, &cet.carrier, (&g2.0, &g2.1), (&gt.0, &gt.1), &l2)?;
    let ff1 = FilteredComplex::first_filtration(&g1.0)?;
    let ff2 = FilteredComplex::first_filtration(&g2.0)?;
    let fft = FilteredComplex::first_filtration(&gt.0)?;
    let trusted = trusted_of(&[&ff1, &ff2, &fft]);
    if (window as i64) > trusted {
        return Err(SpectralError::UntrustedRegionRequested { requested: window as i64, trusted }.into());
    }
    let (entries, arrows, dims_agree) = {
        let m1 = filtered_map(&ff1, &fft, &lift1)?;
        let m2 = filtered_map(&ff2, &fft, &lift2)?;
        tabulate(&[&ff1, &fft, &ff2], &[("F(X, A') -> tF(A, A')", &m1), ("F(A, X') -> tF(A, A')", &m2)], window)?
    };
    let verdict = arrows.iter().all(|a| a.report.iso) && entries.iter().all(|e| e.arrows.iter().all(|&b| b));
    let report = ComparisonReport {
        instance: inst.label.clone(),
        window,
        trusted_through: trusted,
        complexes: vec![format!("G J for {}", f_x.name()), "G J for the total complex".into(), format!("G J for {}", f_x2.name())],
        hypotheses: hyps,
        waived: waive,
        entries,
        arrows,
        dims_agree,
        verdict,
    };
    Ok(FirstComparison {
        report,
        k1,
        k1_applied,
        k2,
        k2_applied,
        tf: Arc::new(tf),
        tf_applied,
        t,
        phi1,
        phi2,
        ce1,
        ce2,
        cet,
        g1,
        g2,
        gt,
        ff1,
        ff2,
        fft,
        lift1,
        lift2,
    })
}

/// Inputs of the double-complex comparison: `F : 𝒜 → ℬ′`, `G : ℬ × ℬ′ → 𝒞`, `X` with an acyclic
/// resolution `A`, and a resolution `B` of `Y` in `ℬ`.
pub struct SecondInstance {
    pub label: String,
    pub f: Arc<dyn Functor>,
    pub g: Arc<dyn Bifunctor>,
    pub x: FdModule,
    pub y: FdModule,
    pub res_a: Resolution,
    pub res_b: Resolution,
    pub resolver_a: Resolver,
    pub resolver_b: Resolver,
    pub provider: InjResProvider,
}

pub struct SecondComparison {
    pub report: ComparisonReport,
    pub truncation: usize,
    pub fa: Arc<CochainComplex>,
    pub fa_applied: Vec<Applied>,
    pub ce: CEResolution,
    pub d: Arc<DoubleComplex>,
    pub d_applied: Vec<Vec<Applied>>,
    pub triple: TripleComplex,
    pub triple_applied: Vec<Vec<Vec<Applied>>>,
    pub t12: Arc<DoubleComplex>,
    pub gyj: Arc<DoubleComplex>,
    pub gyj_applied: Vec<Vec<Applied>>,
    pub u: DoubleComplexMap,
    pub v: DoubleComplexMap,
    pub ffd: FilteredComplex,
    pub fft: FilteredComplex,
    pub ffg: FilteredComplex,
}

fn sign_matrix(m: FpMatrix, a: usize) -> FpMatrix {
    m.signed(((a * a.saturating_sub(1)) / 2 % 2) as i64)
}

/// `G(B, C)` for a resolution `B` and a complex `C` of applied objects, on the window `a + c ≤ m`,
/// rows indexed by `B`.
pub fn bifunctor_on_complex(
    g: &dyn Bifunctor,
    res_b: &Resolution,
    fa: &CochainComplex,
    fa_applied: &[Applied],
    m: usize,
) -> Result<(DoubleComplex, Vec<Vec<Applied>>), ComparisonError> {
    let nb = res_b.length().min(m) + 1;
    let nc = fa_applied.len().min(m + 1);
    let fl = fa.field();
    let target_alg = g.apply(&res_b.terms[0], &fa_applied[0].module)?.module.algebra().clone();
    let empty = Applied { module: FdModule::zero(target_alg), carrier: Subspace::zero(fl, 0) };
    let cells: Vec<(usize, usize)> = (0..nb).flat_map(|a| (0..nc).map(move |c| (a, c))).collect();
    let d_flat: Vec<Applied> = cells
        .par_iter()
        .map(|&(a, c)| if a + c <= m { g.apply(&res_b.terms[a], &fa_applied[c].module) } else { Ok(empty.clone()) })
        .collect::<Result<_, _>>()?;
    let d_applied: Vec<Vec<Applied>> = (0..nb).map(|a| d_flat[a * nc..(a + 1) * nc].to_vec()).collect();
    let d_maps: Vec<(FpMatrix, FpMatrix)> = cells
        .par_iter()
        .map(|&(a, c)| -> Result<_, ComparisonError> {
            let here = &d_applied[a][c];
            let (ba, fc) = (&res_b.terms[a], &fa_applied[c].module);
            let hor = if c + 1 < nc && a + c < m {
                let id = FpMatrix::identity(fl, ba.dim());
                bimap(g, (ba, ba, &id), (fc, &fa_applied[c + 1].module, &fa.diff(c as i64)), here, &d_applied[a][c + 1])?
            } else {
                FpMatrix::zeros(fl, here.dim(), if c + 1 < nc { d_applied[a][c + 1].dim() } else { 0 })
            };
            let ver = if a + 1 < nb && a + c < m {
                let id = FpMatrix::identity(fl, fc.dim());
                bimap(g, (ba, &res_b.terms[a + 1], &res_b.maps[a]), (fc, fc, &id), here, &d_applied[a + 1][c])?
            } else {
                FpMatrix::zeros(fl, here.dim(), if a + 1 < nb { d_applied[a + 1][c].dim() } else { 0 })
            };
            Ok((hor, ver))
        })
        .collect::<Result<_, _>>()?;
    let d = DoubleComplex::from_fn(fl, nb, nc, |a, c| d_applied[a][c].dim(), |a, c| d_maps[a * nc + c].0.clone(), |a, c| d_maps[a * nc + c].1.clone())?
        .with_modules(d_applied.iter().map(|r| r.iter().map(|a| a.module.clone()).collect()).collect())?
        .truncate_total(m);
    Ok((d, d_applied))
}

pub fn second_comparison(inst: &SecondInstance, window: usize, waive: bool) -> Result<SecondComparison, ComparisonError> {
    let g = inst.g.as_ref();
    let fl = inst.x.field();
    let (var_b, var_b2) = g.variance();
    if var_b != inst.res_b.opposite || var_b2 || inst.f.contravariant() != inst.res_a.opposite {
        return Err(GrothendieckError::Variance(format!("{} and {} against the resolutions", inst.f.name(), g.name())).into());
    }
    let (_, bound) = default_lengths(window);
    let m = effective_length(&inst.res_b).min(effective_length(&inst.res_a)).min(bound);
    let g_y: Arc<dyn Functor> = Arc::new(FirstFixed { bf: inst.g.clone(), x: inst.y.clone() });
    let rb2 = Resolver::Injective(inst.provider.clone());
    let depth = window.min(2);

    let mut hyps = vec![hypothesis("left exactness", inst.f.left_exact(), format!("declared for {} and {}", inst.f.name(), g.name()))];
    let resolves = inst.res_b.validate();
    hyps.push(hypothesis("B resolves Y", resolves.is_ok(), resolves.err().map(|e| e.to_string()).unwrap_or_default()));
    let ac = check_acyclic_resolution(&inst.res_a, inst.f.clone(), g_y.clone(), &inst.resolver_a, &rb2, depth)?;
    hyps.push(hypothesis("A is acyclic for F and G(Y, -)", ac.passed(), ac.failures.join("; ")));

    let (fa, fa_applied) = apply_to_resolution(inst.f.as_ref(), &inst.res_a)?;
    let fa = Arc::new(fa);
    let ce = ce_resolution(&fa, &inst.provider, bound)?;
    let j = ce.carrier.clone();
    let jm = j.modules().expect("CE entries carry modules");

    let mut exact_first = true;
    for a in 0..inst.res_b.terms.len().min(3) {
        let gb: Arc<dyn Functor> = Arc::new(FirstFixed { bf: inst.g.clone(), x: inst.res_b.terms[a].clone() });
        for c in 0..fa_applied.len().min(2) {
            let s = &fa_applied[c].module;
            if s.dim() > 0 {
                exact_first &= derived_dims(gb.as_ref(), s, depth, &rb2)?.iter().skip(1).all(|&d| d == 0);
            }
        }
    }
    hyps.push(hypothesis("G(B^a, -) is exact", exact_first, "sampled on the first terms of B and of F(A)"));
    let mut exact_second = true;
    for b in 0..j.rows().min(2) {
        if j.dim(b, 0) > 0 {
            let gi: Arc<dyn Functor> = Arc::new(SecondFixed { bf: inst.g.clone(), y: jm[b][0].clone() });
            exact_second &= derived_dims(gi.as_ref(), &inst.y, depth, &inst.resolver_b)?.iter().skip(1).all(|&d| d == 0);
        }
    }
    hyps.push(hypothesis("G(-, I') is exact on injectives", exact_second, "sampled on injective entries of the CE-resolution"));
    enforce(&hyps, waive)?;

    let (d, d_applied) = bifunctor_on_complex(g, &inst.res_b, &fa, &fa_applied, m)?;
    let nb = d_applied.len();
    let target_alg = d_applied[0][0].module.algebra().clone();
    let empty = Applied { module: FdModule::zero(target_alg), carrier: Subspace::zero(fl, 0) };

    // G(B, J′) on a + b + c ≤ m.
    let shape = [nb, j.rows().min(m + 1), j.cols().min(m + 1)];
    let cells3: Vec<(usize, usize, usize)> =
        (0..shape[0]).flat_map(|a| (0..shape[1]).flat_map(move |b| (0..shape[2]).map(move |c| (a, b, c)))).collect();
    let inside = |a: usize, b: usize, c: usize| a + b + c <= m && j.dim(b, c) > 0;
    let t_flat: Vec<Applied> = cells3
        .par_iter()
        .map(|&(a, b, c)| if inside(a, b, c) { g.apply(&inst.res_b.terms[a], &jm[b][c]) } else { Ok(empty.clone()) })
        .collect::<Result<_, _>>()?;
    let idx3 = |a: usize, b: usize, c: usize| (a * shape[1] + b) * shape[2] + c;
    let triple_applied: Vec<Vec<Vec<Applied>>> =
        (0..shape[0]).map(|a| (0..shape[1]).map(|b| (0..shape[2]).map(|c| t_flat[idx3(a, b, c)].clone()).collect()).collect()).collect();
    let t_maps: Vec<[FpMatrix; 3]> = cells3
        .par_iter()
        .map(|&(a, b, c)| -> Result<[FpMatrix; 3], ComparisonError> {
            let here = &triple_applied[a][b][c];
            let ba = &inst.res_b.terms[a];
            let jbc = &jm[b][c];
            let tgt_dim = |q: [usize; 3]| if q[0] < shape[0] && q[1] < shape[1] && q[2] < shape[2] { triple_applied[q[0]][q[1]][q[2]].dim() } else { 0 };
            let mut out = [FpMatrix::zeros(fl, here.dim(), tgt_dim([a + 1, b, c])), FpMatrix::zeros(fl, here.dim(), tgt_dim([a, b + 1, c])), FpMatrix::zeros(fl, here.dim(), tgt_dim([a, b, c + 1]))];
            if here.dim() == 0 {
                return Ok(out);
            }
            let idj = FpMatrix::identity(fl, jbc.dim());
            let idb = FpMatrix::identity(fl, ba.dim());
            if tgt_dim([a + 1, b, c]) > 0 {
                out[0] = bimap(g, (ba, &inst.res_b.terms[a + 1], &inst.res_b.maps[a]), (jbc, jbc, &idj), here, &triple_applied[a + 1][b][c])?;
            }
            if tgt_dim([a, b + 1, c]) > 0 {
                out[1] = bimap(g, (ba, ba, &idb), (jbc, &jm[b + 1][c], &j.delta(b, c)), here, &triple_applied[a][b + 1][c])?;
            }
            if tgt_dim([a, b, c + 1]) > 0 {
                out[2] = bimap(g, (ba, ba, &idb), (jbc, &jm[b][c + 1], &j.d(b, c)), here, &triple_applied[a][b][c + 1])?;
            }
            Ok(out)
        })
        .collect::<Result<_, _>>()?;
    let triple = TripleComplex::from_fn(fl, shape, |a, b, c| triple_applied[a][b][c].dim(), |axis, a, b, c| t_maps[idx3(a, b, c)][axis].clone())?;
    let t12 = triple.t12()?.with_trusted(Some(m as i64 - 1)).truncate_total(m);

    let (gyj, gyj_applied) = apply_to_double(g_y.as_ref(), &j)?;
    let gyj = gyj.truncate_total(m);
    let (d, t12, gyj) = (Arc::new(d), Arc::new(t12), Arc::new(gyj));

    let u = DoubleComplexMap::from_fn(d.clone(), t12.clone(), |a, c| {
        let mut out = FpMatrix::zeros(fl, d.dim(a, c), t12.dim(a, c));
        if triple.dim(a, 0, c) > 0 {
            let ba = &inst.res_b.terms[a];
            let id = FpMatrix::identity(fl, ba.dim());
            let b = bimap(g, (ba, ba, &id), (&fa_applied[c].module, &jm[0][c], &ce.augmentation[c]), &d_applied[a][c], &triple_applied[a][0][c])
                .expect("augmentation lands in the carrier");
            out.set_block(0, triple.t12_offset(a, 0, c), &sign_matrix(b, a));
        }
        out
    })?;
    let v = DoubleComplexMap::from_fn(gyj.clone(), t12.clone(), |b, c| {
        let mut out = FpMatrix::zeros(fl, gyj.dim(b, c), t12.dim(b, c));
        if triple.dim(0, b, c) > 0 {
            let idj = FpMatrix::identity(fl, jm[b][c].dim());
            let m = bimap(g, (&inst.y, &inst.res_b.terms[0], &inst.res_b.aug), (&jm[b][c], &jm[b][c], &idj), &gyj_applied[b][c], &triple_applied[0][b][c])
                .expect("augmentation lands in the carrier");
            out.set_block(0, triple.t12_offset(0, b, c), &m);
        }
        out
    })?;

    let mut planewise = true;
    for n in 0..t12.rows() {
        for l in 0..t12.cols() {
            if n + l + 1 > m {
                continue;
            }
            let direct: usize = (0..=n).map(|a| plane_homology(&triple, a, n - a, l)).sum();
            let row = t12.row(n);
            planewise &= row.homology_dim(l as i64) == direct;
        }
    }
    hyps.push(hypothesis("planewise total commutes with horizontal homology", planewise, "dimensions on the window"));

    let ffd = FilteredComplex::first_filtration(&d)?;
    let fft = FilteredComplex::first_filtration(&t12)?;
    let ffg = FilteredComplex::first_filtration(&gyj)?;
    let trusted = trusted_of(&[&ffd, &fft, &ffg]);
    if (window as i64) > trusted {
        return Err(SpectralError::UntrustedRegionRequested { requested: window as i64, trusted }.into());
    }
    let (entries, arrows, dims_agree) = {
        let mu = filtered_map(&ffd, &fft, &u)?;
        let mv = filtered_map(&ffg, &fft, &v)?;
        tabulate(&[&ffd, &fft, &ffg], &[("G(B, FA) -> t12 G(B, J')", &mu), ("G(Y, J') -> t12 G(B, J')", &mv)], window)?
    };
    let verdict = arrows.iter().all(|a| a.report.iso) && entries.iter().all(|e| e.arrows.iter().all(|&b| b));
    let report = ComparisonReport {
        instance: inst.label.clone(),
        window,
        trusted_through: trusted,
        complexes: vec!["G(B, FA)".into(), "t12 G(B, J')".into(), format!("G J for {}", inst.f.name())],
        hypotheses: hyps,
        waived: waive,
        entries,
        arrows,
        dims_agree,
        verdict,
    };
    Ok(SecondComparison {
        report,
        truncation: m,
        fa,
        fa_applied,
        ce,
        d,
        d_applied,
        triple,
        triple_applied,
        t12,
        gyj,
        gyj_applied,
        u,
        v,
        ffd,
        fft,
        ffg,
    })
}

/// `dim` of the homology of `Y^{a,b,−}` at `l`.
fn plane_homology(y: &TripleComplex, a: usize, b: usize, l: usize) -> usize {
    let fl = y.diff(2, a, b, l).field();
    let dims: Vec<usize> = (0..=l + 1).map(|c| y.dim(a, b, c)).collect();
    let diffs: Vec<FpMatrix> = (0..=l).map(|c| y.diff(2, a, b, c)).collect();
    CochainComplex::new(fl, 0, dims, diffs).map(|c| c.homology_dim(l as i64)).unwrap_or(0)
}

#[derive(Clone, Debug, Serialize)]
pub struct SquareRecord {
    pub square: String,
    pub index: String,
    pub commutes: bool,
    /// Both composites are nonzero.
    pub nontrivial: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct NaturalityReport {
    pub instance: String,
    pub window: usize,
    pub squares: Vec<SquareRecord>,
    pub all_commute: bool,
}

/// Checks `E(top) E(right) = E(left) E(bottom)` at every dotted entry of the window.
fn squares(
    name: &str,
    window: usize,
    top: &FilteredMap<'_>,
    right: &FilteredMap<'_>,
    left: &FilteredMap<'_>,
    bottom: &FilteredMap<'_>,
) -> Result<Vec<SquareRecord>, ComparisonError> {
    let nodes = dotted_nodes(top.src, 0, window as i64);
    let mut out: Vec<SquareRecord> = nodes
        .par_iter()
        .map(|(_, _, e)| -> Result<SquareRecord, ComparisonError> {
            let lhs = &top.entry_map(e)? * &right.entry_map(e)?;
            let rhs = &left.entry_map(e)? * &bottom.entry_map(e)?;
            Ok(SquareRecord { square: name.into(), index: e.to_string(), nontrivial: !lhs.is_zero() && !rhs.is_zero(), commutes: lhs == rhs })
        })
        .collect::<Result<_, _>>()?;
    out.sort_by(|a, b| a.index.cmp(&b.index));
    Ok(out)
}

/// Naturality of the two-variable comparison in `X′` along a module map `m : X′ → X̃′`. Both
/// comparisons must share the first resolution `A`; the second resolutions must be injective.
pub fn first_naturality(
    inst: &FirstInstance,
    fc: &FirstComparison,
    inst_t: &FirstInstance,
    fc_t: &FirstComparison,
    m: &FpMatrix,
    window: usize,
) -> Result<NaturalityReport, ComparisonError> {
    let f = inst.f.as_ref();
    let fl = m.field();
    if inst.res_a.dims() != inst_t.res_a.dims() || inst.res_a.maps != inst_t.res_a.maps {
        return Err(ComparisonError::HypothesisFailed("both comparisons must share the first resolution".into()));
    }
    let (ia, ib) = match (&inst.res_a2.injective, &inst_t.res_a2.injective) {
        (Some(a), Some(b)) => (a, b),
        _ => return Err(ComparisonError::HypothesisFailed("second resolutions must be injective".into())),
    };
    let mi = lift_map_to_resolutions(m, ia, ib)?;
    let mi_at = |k: usize| -> FpMatrix {
        if k <= ia.length().min(ib.length()) {
            mi.component(k as i64)
        } else {
            FpMatrix::zeros(fl, inst.res_a2.terms.get(k).map_or(0, |t| t.dim()), inst_t.res_a2.terms.get(k).map_or(0, |t| t.dim()))
        }
    };
    let f_x = FirstFixed { bf: inst.f.clone(), x: inst.x.clone() };
    let f_xt = FirstFixed { bf: inst_t.f.clone(), x: inst_t.x.clone() };
    let c1: Vec<FpMatrix> = (0..=fc.k1.hi())
        .map(|k| {
            let ku = k as usize;
            if k > fc_t.k1.hi() || fc.k1.dim(k) == 0 || fc_t.k1.dim(k) == 0 {
                return Ok(FpMatrix::zeros(fl, fc.k1.dim(k), fc_t.k1.dim(k)));
            }
            let _ = &f_xt;
            fmap(&f_x, &inst.res_a2.terms[ku], &fc.k1_applied[ku], &inst_t.res_a2.terms[ku], &fc_t.k1_applied[ku], &mi_at(ku))
        })
        .collect::<Result<_, GrothendieckError>>()?;
    let map1 = ComplexMap::new(fc.k1.clone(), fc_t.k1.clone(), 0, c1)?;
    let ct: Vec<FpMatrix> = (0..=fc.t.hi())
        .map(|n| -> Result<FpMatrix, ComparisonError> {
            let mut c = FpMatrix::zeros(fl, fc.t.dim(n), fc_t.t.dim(n));
            let tl = fc_t.tf.total_layout(n as usize);
            for &(i, k, off) in &fc.tf.total_layout(n as usize) {
                if let Some(&(_, _, o)) = tl.iter().find(|e| e.0 == i && e.1 == k) {
                    if fc.tf.dim(i, k) > 0 && fc_t.tf.dim(i, k) > 0 {
                        let ai = &inst.res_a.terms[i];
                        let id = FpMatrix::identity(fl, ai.dim());
                        let b = bimap(f, (ai, ai, &id), (&inst.res_a2.terms[k], &inst_t.res_a2.terms[k], &mi_at(k)), &fc.tf_applied[i][k], &fc_t.tf_applied[i][k])?;
                        c.set_block(off, o, &b);
                    }
                }
            }
            Ok(c)
        })
        .collect::<Result<_, _>>()?;
    let map_t = ComplexMap::new(fc.t.clone(), fc_t.t.clone(), 0, ct)?;
    let c2: Vec<FpMatrix> = (0..=fc.k2.hi())
        .map(|i| {
            let iu = i as usize;
            if fc.k2.dim(i) == 0 || fc_t.k2.dim(i) == 0 {
                return Ok(FpMatrix::zeros(fl, fc.k2.dim(i), fc_t.k2.dim(i)));
            }
            let ai = &inst.res_a.terms[iu];
            let id = FpMatrix::identity(fl, ai.dim());
            bimap(f, (ai, ai, &id), (&inst.x2, &inst_t.x2, m), &fc.k2_applied[iu], &fc_t.k2_applied[iu])
        })
        .collect::<Result<_, GrothendieckError>>()?;
    let map2 = ComplexMap::new(fc.k2.clone(), fc_t.k2.clone(), 0, c2)?;
    let g = inst.g.as_ref();
    let l1 = apply_to_double_map(g, &fc.ce1.carrier, &fc_t.ce1.carrier, (&fc.g1.0, &fc.g1.1), (&fc_t.g1.0, &fc_t.g1.1), &lifted(&map1, &fc.ce1, &fc_t.ce1)?)?;
    let lt = apply_to_double_map(g, &fc.cet.carrier, &fc_t.cet.carrier, (&fc.gt.0, &fc.gt.1), (&fc_t.gt.0, &fc_t.gt.1), &lifted(&map_t, &fc.cet, &fc_t.cet)?)?;
    let l2 = apply_to_double_map(g, &fc.ce2.carrier, &fc_t.ce2.carrier, (&fc.g2.0, &fc.g2.1), (&fc_t.g2.0, &fc_t.g2.1), &lifted(&map2, &fc.ce2, &fc_t.ce2)?)?;
    let e1 = filtered_map(&fc.ff1, &fc_t.ff1, &l1)?;
    let et = filtered_map(&fc.fft, &fc_t.fft, &lt)?;
    let e2 = filtered_map(&fc.ff2, &fc_t.ff2, &l2)?;
    let p1 = filtered_map(&fc.ff1, &fc.fft, &fc.lift1)?;
    let p1t = filtered_map(&fc_t.ff1, &fc_t.fft, &fc_t.lift1)?;
    let p2 = filtered_map(&fc.ff2, &fc.fft, &fc.lift2)?;
    let p2t = filtered_map(&fc_t.ff2, &fc_t.fft, &fc_t.lift2)?;
    let mut sq = squares("F(X, A') side", window, &e1, &p1t, &p1, &et)?;
    sq.extend(squares("F(A, X') side", window, &e2, &p2t, &p2, &et)?);
    let all_commute = sq.iter().all(|s| s.commutes);
    Ok(NaturalityReport { instance: inst.label.clone(), window, squares: sq, all_commute })
}

/// Naturality of the double-complex comparison along a chain map `h : F(A) → F̃(A)`.
pub fn second_naturality(
    inst: &SecondInstance,
    sc: &SecondComparison,
    sc_t: &SecondComparison,
    h: &ComplexMap,
    window: usize,
) -> Result<NaturalityReport, ComparisonError> {
    let g = inst.g.as_ref();
    let fl = inst.x.field();
    if sc.truncation != sc_t.truncation {
        return Err(ComparisonError::HypothesisFailed("both comparisons must use the same truncation".into()));
    }
    let psi = lifted(h, &sc.ce, &sc_t.ce)?;
    let (jm, jmt) = (sc.ce.carrier.modules().expect("modules"), sc_t.ce.carrier.modules().expect("modules"));
    let dmap = DoubleComplexMap::from_fn(sc.d.clone(), sc_t.d.clone(), |a, c| {
        let ba = &inst.res_b.terms[a];
        let id = FpMatrix::identity(fl, ba.dim());
        bimap(g, (ba, ba, &id), (&sc.fa_applied[c].module, &sc_t.fa_applied[c].module, &h.component(c as i64)), &sc.d_applied[a][c], &sc_t.d_applied[a][c])
            .expect("map of carriers")
    })?;
    let g_y = FirstFixed { bf: inst.g.clone(), x: inst.y.clone() };
    let gmap = DoubleComplexMap::from_fn(sc.gyj.clone(), sc_t.gyj.clone(), |b, c| {
        fmap(&g_y, &jm[b][c], &sc.gyj_applied[b][c], &jmt[b][c], &sc_t.gyj_applied[b][c], &psi.comp(b, c)).expect("map of carriers")
    })?;
    let tmap = DoubleComplexMap::from_fn(sc.t12.clone(), sc_t.t12.clone(), |n, c| {
        let mut out = FpMatrix::zeros(fl, sc.t12.dim(n, c), sc_t.t12.dim(n, c));
        for a in 0..=n {
            let b = n - a;
            if sc.triple.dim(a, b, c) == 0 || sc_t.triple.dim(a, b, c) == 0 {
                continue;
            }
            let ba = &inst.res_b.terms[a];
            let id = FpMatrix::identity(fl, ba.dim());
            let blk = bimap(g, (ba, ba, &id), (&jm[b][c], &jmt[b][c], &psi.comp(b, c)), &sc.triple_applied[a][b][c], &sc_t.triple_applied[a][b][c])
                .expect("map of carriers");
            out.set_block(sc.triple.t12_offset(a, b, c), sc_t.triple.t12_offset(a, b, c), &blk);
        }
        out
    })?;
    let ed = filtered_map(&sc.ffd, &sc_t.ffd, &dmap)?;
    let eg = filtered_map(&sc.ffg, &sc_t.ffg, &gmap)?;
    let et = filtered_map(&sc.fft, &sc_t.fft, &tmap)?;
    let u = filtered_map(&sc.ffd, &sc.fft, &sc.u)?;
    let ut = filtered_map(&sc_t.ffd, &sc_t.fft, &sc_t.u)?;
    let v = filtered_map(&sc.ffg, &sc.fft, &sc.v)?;
    let vt = filtered_map(&sc_t.ffg, &sc_t.fft, &sc_t.v)?;
    let mut sq = squares("G(B, FA) side", window, &ed, &ut, &u, &et)?;
    sq.extend(squares("G(Y, J') side", window, &eg, &vt, &v, &et)?);
    let all_commute = sq.iter().all(|s| s.commutes);
    Ok(NaturalityReport { instance: inst.label.clone(), window, squares: sq, all_commute })
}

/// `Hom_A(X, X′)` into vector spaces followed by the identity, for an augmented local algebra `A`.
pub fn hom_identity_instance(alg: &Arc<FdAlgebra>, counit: &FpMatrix, x: FdModule, x2: FdModule, window: usize) -> Result<FirstInstance, ComparisonError> {
    let (len, _) = default_lengths(window);
    let ra = Resolver::minimal(alg, counit, true)?;
    let ra2 = Resolver::minimal(alg, counit, false)?;
    let fl = alg.field();
    let ground = FdAlgebra::ground(fl);
    Ok(FirstInstance {
        label: format!("hom over an algebra of dimension {} followed by the identity", alg.dim()),
        f: Arc::new(HomOver),
        g: Arc::new(Identity),
        res_a: ra.resolve(&x, len)?,
        res_a2: ra2.resolve(&x2, len)?,
        x,
        x2,
        resolver_a: ra,
        resolver_a2: ra2,
        provider_b: InjResProvider::augmented(&ground, &FpMatrix::identity(fl, 1))?,
    })
}

/// Change of rings along the augmentation `A → k`: `F = Hom_A(k, −)` and `G = Hom_k`, with `Y`
/// of dimension `y_dim` resolved either by itself or by the padded resolution `k → Y ⊕ k → Y`.
pub fn change_of_rings_instance(
    alg: &Arc<FdAlgebra>,
    counit: &FpMatrix,
    x: FdModule,
    y_dim: usize,
    padded: bool,
    window: usize,
) -> Result<SecondInstance, ComparisonError> {
    let (len, _) = default_lengths(window);
    let fl = alg.field();
    let ground = FdAlgebra::ground(fl);
    let y = ground_module(fl, y_dim);
    let res_b = if padded {
        let mut inc = FpMatrix::zeros(fl, 1, y_dim + 1);
        inc.set(0, y_dim, 1);
        let proj = FpMatrix::vstack(fl, y_dim, &[&FpMatrix::identity(fl, y_dim), &FpMatrix::zeros(fl, 1, y_dim)]);
        Resolution {
            object: y.clone(),
            terms: vec![ground_module(fl, y_dim + 1), ground_module(fl, 1)],
            maps: vec![inc],
            aug: proj,
            opposite: true,
            complete: true,
            label: "padded".into(),
            injective: None,
        }
    } else {
        Resolution::conc(&y, true)
    };
    let ra = Resolver::minimal(alg, counit, false)?;
    let triv = FdModule::character(alg.clone(), counit.transpose().row(0)).map_err(GrothendieckError::from)?;
    Ok(SecondInstance {
        label: format!("change of rings from an algebra of dimension {} to the ground field ({})", alg.dim(), res_b.label),
        f: Arc::new(FirstFixed { bf: Arc::new(HomOver), x: triv }),
        g: Arc::new(HomOver),
        res_a: ra.resolve(&x, len)?,
        x,
        y,
        res_b,
        resolver_a: ra,
        resolver_b: Resolver::Projective(crate::injective::ProjCover::Free),
        provider: InjResProvider::augmented(&ground, &FpMatrix::identity(fl, 1))?,
    })
}
