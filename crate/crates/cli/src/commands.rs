use crate::descriptor::{build_module, group_alg, read_document, usage, RunDescriptor, UsageError, SCHEMA};
use crate::render::{dims, kv_table, page_grid, yes, PageJson};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use specseq::algebra::{FdAlgebra, FdModule, GroupTable};
use specseq::comparison::{change_of_rings_instance, first_comparison, hom_identity_instance, second_comparison, ComparisonError, ComparisonReport};
use specseq::complexes::CochainComplex;
use specseq::grothendieck::{
    grothendieck_ss, ground_module, identify_e2_and_abutment, FirstFixed, FixedPoints, Functor, GrothendieckError, HomOver, Identity, Invariants, Resolver,
    SecondFixed, Tensor,
};
use specseq::groupcoh::{cohomology_oracle, hopf_first_instance, hopf_second_instance, lhs_vs_grothendieck, GroupCohError, LhsSetup};
use specseq::hopf::{adjunction_alpha_beta, group_hopf, phi_psi, HopfError, NormalHopfSubalgebra};
use specseq::injective::{InjResProvider, ProjCover};
use specseq::linalg::{FieldSpec, FpMatrix};
use specseq::spectral::{classical_page, EntryIndex, FilteredComplex};
use std::path::Path;
use std::sync::Arc;

#[derive(Debug)]
pub enum Failure {
    Usage(String),
    Hypothesis(String),
    Compute(String),
}

impl From<UsageError> for Failure {
    fn from(e: UsageError) -> Self {
        Self::Usage(e.0)
    }
}

fn spectral_failure(e: impl std::fmt::Display) -> Failure {
    Failure::Compute(format!("spectral: {e}"))
}

fn grothendieck_failure(e: GrothendieckError) -> Failure {
    match e {
        GrothendieckError::HypothesisFailed(s) => Failure::Hypothesis(format!("grothendieck: {s}")),
        e => Failure::Compute(format!("grothendieck: {e}")),
    }
}

fn comparison_failure(e: ComparisonError) -> Failure {
    match e {
        ComparisonError::HypothesisFailed(s) => Failure::Hypothesis(format!("comparison: {s}")),
        ComparisonError::Grothendieck(g) => grothendieck_failure(g),
        e => Failure::Compute(format!("comparison: {e}")),
    }
}

fn groupcoh_failure(e: GroupCohError) -> Failure {
    match e {
        GroupCohError::Comparison(c) => comparison_failure(c),
        GroupCohError::Grothendieck(g) => grothendieck_failure(g),
        e => Failure::Compute(format!("groupcoh: {e}")),
    }
}

pub struct Outcome {
    pub text: String,
    pub json: Value,
    /// `false` when a verified statement turned out false.
    pub verdict: bool,
}

fn envelope(command: &str, body: Value) -> Value {
    let mut v = json!({ "schema": SCHEMA, "command": command });
    if let (Value::Object(out), Value::Object(b)) = (&mut v, body) {
        out.extend(b);
    }
    v
}

fn counit(alg: &FdAlgebra) -> FpMatrix {
    FpMatrix::from_vec(alg.field(), alg.dim(), 1, vec![1; alg.dim()])
}

/// The minimal injective provider over a local algebra, coinduced otherwise.
fn provider_for(alg: &FdAlgebra, counit: &FpMatrix) -> InjResProvider {
    InjResProvider::augmented(alg, counit).unwrap_or(InjResProvider::Coinduced)
}

struct Instance {
    field: FieldSpec,
    group: GroupTable,
    alg: Arc<FdAlgebra>,
    module: FdModule,
    subgroup: Option<Vec<usize>>,
}

fn instance(d: &RunDescriptor) -> Result<Instance, Failure> {
    let field = d.field()?;
    let group = d.group()?;
    let alg = group_alg(&group, field);
    let module = d.module(&group, &alg)?;
    let subgroup = d.subgroup(&group)?;
    Ok(Instance { field, group, alg, module, subgroup })
}

fn lhs_setup(d: &RunDescriptor) -> Result<(Instance, LhsSetup), Failure> {
    let inst = instance(d)?;
    let n = inst.subgroup.clone().ok_or_else(|| usage("a subgroup is required"))?;
    if !inst.group.is_normal(&n) {
        return Err(usage(format!("{n:?} is not a normal subgroup")).into());
    }
    let s = LhsSetup::new(&inst.group, &n, inst.field.p(), Some(inst.module.clone())).map_err(groupcoh_failure)?;
    Ok((inst, s))
}

/// Complex document for `homology`; `pieces` and `smin` make it a filtered complex.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComplexDoc {
    pub schema: Option<u32>,
    pub p: u32,
    #[serde(default)]
    pub lo: i64,
    pub dims: Option<Vec<usize>>,
    pub diffs: Vec<Vec<Vec<i64>>>,
    pub smin: Option<i64>,
    pub pieces: Option<Vec<Vec<usize>>>,
}

pub fn homology(path: &Path, pages: i64) -> Result<Outcome, Failure> {
    let doc: ComplexDoc = read_document(path)?;
    if doc.schema.is_some_and(|s| s != SCHEMA) {
        return Err(usage(format!("unsupported schema, expected {SCHEMA}")).into());
    }
    let f = FieldSpec::new(doc.p).map_err(|e| usage(format!("p = {}: {e}", doc.p)))?;
    let sizes: Vec<usize> = match (&doc.dims, &doc.pieces) {
        (Some(d), None) => d.clone(),
        (None, Some(ps)) => ps.iter().map(|p| p.iter().sum()).collect(),
        (Some(d), Some(ps)) if ps.iter().map(|p| p.iter().sum::<usize>()).eq(d.iter().copied()) => d.clone(),
        (Some(_), Some(_)) => return Err(usage("dims disagree with the filtration pieces").into()),
        (None, None) => return Err(usage("either dims or pieces is required").into()),
    };
    if doc.diffs.len() + 1 != sizes.len().max(1) {
        return Err(usage(format!("{} objects need {} differentials, got {}", sizes.len(), sizes.len().saturating_sub(1), doc.diffs.len())).into());
    }
    let diffs: Vec<FpMatrix> = doc
        .diffs
        .iter()
        .enumerate()
        .map(|(t, rows)| {
            if rows.len() != sizes[t] || rows.iter().any(|r| r.len() != sizes[t + 1]) {
                return Err(usage(format!("differential {t} is not {}×{}", sizes[t], sizes[t + 1])));
            }
            Ok(FpMatrix::from_rows(f, sizes[t + 1], rows))
        })
        .collect::<Result<_, _>>()?;
    let c = CochainComplex::new(f, doc.lo, sizes.clone(), diffs.clone()).map_err(|e| Failure::Usage(format!("complexes: {e}")))?;
    let h: Vec<usize> = c.degrees().map(|k| c.homology_dim(k)).collect();
    let mut rows = vec![("degrees".to_string(), format!("{}..={}", c.lo(), c.hi())), ("dims".into(), dims(&sizes)), ("homology".into(), dims(&h))];
    let mut body = json!({ "lo": c.lo(), "dims": sizes, "homology": h });
    let mut text = String::new();
    if let Some(pieces) = doc.pieces {
        let smin = doc.smin.unwrap_or(0);
        let x = FilteredComplex::new(f, doc.lo, smin, pieces, diffs).map_err(|e| Failure::Usage(format!("spectral: {e}")))?;
        let (lo_s, hi_s) = x.filtration_range();
        let mut out = vec![];
        for r in (1..=pages.max(1)).map(Some).chain([None]) {
            let mut cells = vec![];
            for p in -hi_s..=-lo_s {
                for k in x.lo()..=x.hi() {
                    let dim = x.entry(&EntryIndex::classical(p, k - p, r)).map_err(spectral_failure)?.dim();
                    cells.push((p, k - p, dim));
                }
            }
            let page = PageJson::new(r, cells, None);
            text.push_str(&page_grid(&page));
            text.push('\n');
            out.push(page);
        }
        body["pages"] = serde_json::to_value(out).expect("serializable");
        rows.push(("filtration".into(), format!("{lo_s}..={hi_s}")));
    }
    let text = kv_table(&rows) + if text.is_empty() { "" } else { "\n" } + &text;
    Ok(Outcome { text, json: envelope("homology", body), verdict: true })
}

pub fn resolve(d: &RunDescriptor, kind: &str, provider: &str) -> Result<Outcome, Failure> {
    let inst = instance(d)?;
    let cu = counit(&inst.alg);
    let resolver = match (kind, provider) {
        ("projective", "minimal") | ("injective", "minimal") => {
            Resolver::minimal(&inst.alg, &cu, kind == "projective").map_err(|e| Failure::Compute(format!("grothendieck: {e}")))?
        }
        ("projective", "free") => Resolver::Projective(ProjCover::Free),
        ("injective", "free") => Resolver::Injective(InjResProvider::Coinduced),
        _ => return Err(usage(format!("unknown resolution {kind}/{provider}")).into()),
    };
    let res = resolver.resolve(&inst.module, d.degree()).map_err(grothendieck_failure)?;
    res.validate().map_err(grothendieck_failure)?;
    let ranks: Vec<usize> = res.dims().iter().map(|n| n / inst.group.order()).collect();
    let text = kv_table(&[
        ("resolution".into(), resolver.name()),
        ("term dims".into(), dims(&res.dims())),
        ("in copies of the group algebra".into(), dims(&ranks)),
        ("exactness".into(), yes(true)),
    ]);
    let body = json!({ "resolution": resolver.name(), "dims": res.dims(), "group_order": inst.group.order() });
    Ok(Outcome { text, json: envelope("resolve", body), verdict: true })
}

/// The module category a functor lands in.
struct Target {
    alg: Arc<FdAlgebra>,
    counit: FpMatrix,
    trivial: FdModule,
}

impl Target {
    fn provider(&self) -> InjResProvider {
        provider_for(&self.alg, &self.counit)
    }
}

pub fn gss(d: &RunDescriptor, f_name: &str, g_name: &str, check: bool) -> Result<Outcome, Failure> {
    let inst = instance(d)?;
    let window = d.degree();
    let hopf = Arc::new(group_hopf(&inst.group, inst.field));
    let cu = counit(&inst.alg);
    let over_h = Target { alg: inst.alg.clone(), counit: cu.clone(), trivial: hopf.trivial_module() };
    let ground = Target { alg: Arc::new(FdAlgebra::ground(inst.field)), counit: FpMatrix::identity(inst.field, 1), trivial: ground_module(inst.field, 1) };
    let local = InjResProvider::augmented(&inst.alg, &cu).is_ok();
    let injective = Resolver::Injective(over_h.provider());
    let (f, ra, target): (Arc<dyn Functor>, Resolver, Target) = match f_name {
        "identity" => (Arc::new(Identity), injective, over_h),
        "tensor" => (Arc::new(Tensor { n: FdModule::regular(inst.alg.clone()), hopf: Some(hopf.clone()) }), injective, over_h),
        "hom_from" => (Arc::new(FirstFixed { bf: Arc::new(HomOver), x: over_h.trivial.clone() }), injective, ground),
        "hom_into" => {
            let ra = if local { Resolver::minimal(&inst.alg, &cu, true).map_err(grothendieck_failure)? } else { Resolver::Projective(ProjCover::Free) };
            (Arc::new(SecondFixed { bf: Arc::new(HomOver), y: over_h.trivial.clone() }), ra, ground)
        }
        "fixed_points" => {
            let n = inst.subgroup.clone().ok_or_else(|| usage("fixed_points needs a subgroup"))?;
            if !inst.group.is_normal(&n) {
                return Err(usage(format!("{n:?} is not a normal subgroup")).into());
            }
            let nk = Arc::new(NormalHopfSubalgebra::for_subgroup(hopf.clone(), &inst.group, &n).map_err(|e| Failure::Compute(format!("hopf: {e}")))?);
            let q = nk.quotient().clone();
            let target = Target { alg: q.algebra().clone(), counit: q.counit().clone(), trivial: q.trivial_module() };
            (Arc::new(FixedPoints { nk }), injective, target)
        }
        other => return Err(usage(format!("unknown functor {other:?}; expected fixed_points, hom_from, hom_into, tensor or identity")).into()),
    };
    let g: Arc<dyn Functor> = match g_name {
        "invariants" => Arc::new(Invariants { counit: target.counit.clone() }),
        "hom_from" => Arc::new(FirstFixed { bf: Arc::new(HomOver), x: target.trivial.clone() }),
        "identity" => Arc::new(Identity),
        other => return Err(usage(format!("unknown functor {other:?}; expected invariants, hom_from or identity")).into()),
    };
    let provider_b = target.provider();
    let r = grothendieck_ss(&inst.module, f.clone(), g.clone(), &ra, &provider_b, window, check).map_err(grothendieck_failure)?;
    let id = identify_e2_and_abutment(&r, f, g, &inst.module, &ra, &provider_b).map_err(grothendieck_failure)?;
    let page = |rr: Option<i64>| -> Result<PageJson, Failure> {
        let pg = classical_page(&r.filtered, rr, window as i64).map_err(spectral_failure)?;
        Ok(PageJson::new(rr, pg.entries.iter().map(|e| (e.p, e.q, e.dim)), pg.trusted_through))
    };
    let pages = vec![page(Some(2))?, page(None)?];
    let abut: Vec<usize> = id.abutment.iter().map(|a| a.entry).collect();
    let indep: Vec<usize> = id.abutment.iter().map(|a| a.independent).collect();
    let mut text: String = pages.iter().map(|p| page_grid(p) + "\n").collect();
    text += &kv_table(&[
        ("resolution".into(), format!("{} {}", r.provenance.resolution, dims(&r.provenance.resolution_dims))),
        ("abutment".into(), dims(&abut)),
        ("derived composite".into(), dims(&indep)),
        ("E_2 matches derived functors".into(), yes(id.e2.iter().all(|e| e.entry == e.independent))),
        ("verdict".into(), id.agree.to_string()),
    ]);
    let body = json!({ "pages": pages, "identification": id, "provenance": r.provenance, "verdict": id.agree });
    Ok(Outcome { text, json: envelope("gss", body), verdict: id.agree })
}

pub fn lhs(d: &RunDescriptor, max_page: i64) -> Result<Outcome, Failure> {
    let (_, s) = lhs_setup(d)?;
    let window = d.degree();
    let run = lhs_vs_grothendieck(&s, window, d.waive.unwrap_or(false)).map_err(groupcoh_failure)?;
    let ff = FilteredComplex::first_filtration(&run.dc.d).map_err(spectral_failure)?;
    let mut pages = vec![];
    for r in (2..=max_page.max(2)).map(Some).chain([None]) {
        let pg = classical_page(&ff, r, window as i64).map_err(spectral_failure)?;
        pages.push(PageJson::new(r, pg.entries.iter().map(|e| (e.p, e.q, e.dim)), Some(window as i64)));
    }
    let rep = &run.report;
    let mut text: String = pages.iter().map(|p| page_grid(p) + "\n").collect();
    text += &kv_table(&[
        ("abutment".into(), dims(&rep.abutment)),
        ("cohomology oracle".into(), dims(&rep.oracle)),
        ("E_2 matches oracle".into(), yes(rep.e2_matches_oracle)),
        ("abutment matches oracle".into(), yes(rep.abutment_matches_oracle)),
        ("carriers agree".into(), yes(rep.carriers_agree)),
        ("identification commutes".into(), yes(rep.alpha_commutes)),
        ("invariants are Hom from the trivial module".into(), yes(rep.invariants_are_hom_from_trivial)),
        ("comparisons meet".into(), yes(rep.junction_agrees)),
        ("first comparison".into(), rep.first.verdict.to_string()),
        ("second comparison".into(), rep.second.verdict.to_string()),
        ("verdict".into(), rep.verdict.to_string()),
    ]);
    let body = json!({ "pages": pages, "report": rep });
    Ok(Outcome { text, json: envelope("lhs", body), verdict: rep.verdict })
}

fn comparison_outcome(command: &str, rep: &ComparisonReport, verbose: bool) -> Outcome {
    let mut rows = vec![("instance".to_string(), rep.instance.clone()), ("window".into(), rep.window.to_string())];
    for h in &rep.hypotheses {
        rows.push((format!("hypothesis: {}", h.name), yes(h.holds)));
    }
    for a in &rep.arrows {
        rows.push((format!("arrow {}", a.name), format!("{} ({} entries)", yes(a.report.iso), a.report.checked)));
    }
    rows.push(("dims agree".into(), yes(rep.dims_agree)));
    rows.push(("waived".into(), rep.waived.to_string()));
    rows.push(("verdict".into(), rep.verdict.to_string()));
    let mut text = kv_table(&rows);
    if verbose {
        let entries: Vec<(String, String)> = rep
            .entries
            .iter()
            .map(|e| (e.index.clone(), format!("dims {} isos {}", dims(&e.dims), e.arrows.iter().map(|&b| if b { "y" } else { "n" }).collect::<Vec<_>>().join(" "))))
            .collect();
        text += "\n";
        text += &kv_table(&entries);
    }
    Outcome { text, json: envelope(command, json!({ "report": rep })), verdict: rep.verdict }
}

pub fn compare_first(d: &RunDescriptor, setting: &str, verbose: bool) -> Result<Outcome, Failure> {
    let window = d.degree();
    let waive = d.waive.unwrap_or(false);
    let inst = match setting {
        "hopf" => {
            let (_, s) = lhs_setup(d)?;
            hopf_first_instance(&s, window).map_err(groupcoh_failure)?
        }
        "hom-identity" => {
            let i = instance(d)?;
            let triv = build_module(&crate::descriptor::ModuleSpec::Named("trivial".into()), &i.group, &i.alg)?;
            hom_identity_instance(&i.alg, &counit(&i.alg), triv, i.module, window).map_err(comparison_failure)?
        }
        other => return Err(usage(format!("unknown setting {other:?}; expected hopf or hom-identity")).into()),
    };
    let fc = first_comparison(&inst, window, waive).map_err(comparison_failure)?;
    Ok(comparison_outcome("compare-first", &fc.report, verbose))
}

pub fn compare_second(d: &RunDescriptor, setting: &str, y_dim: usize, padded: bool, verbose: bool) -> Result<Outcome, Failure> {
    let window = d.degree();
    let waive = d.waive.unwrap_or(false);
    let inst = match setting {
        "hopf" => {
            let (_, s) = lhs_setup(d)?;
            hopf_second_instance(&s, window).map_err(groupcoh_failure)?
        }
        "change-of-rings" => {
            let i = instance(d)?;
            if y_dim == 0 {
                return Err(usage("--y-dim must be positive").into());
            }
            change_of_rings_instance(&i.alg, &counit(&i.alg), i.module, y_dim, padded, window).map_err(comparison_failure)?
        }
        other => return Err(usage(format!("unknown setting {other:?}; expected hopf or change-of-rings")).into()),
    };
    let sc = second_comparison(&inst, window, waive).map_err(comparison_failure)?;
    Ok(comparison_outcome("compare-second", &sc.report, verbose))
}

#[derive(Serialize)]
struct Check {
    name: String,
    holds: bool,
}

pub fn hopf_check(d: &RunDescriptor) -> Result<Outcome, Failure> {
    let inst = instance(d)?;
    let h = Arc::new(group_hopf(&inst.group, inst.field));
    let mut checks: Vec<Check> = vec![];
    let ax = h.check_axioms();
    let ids = h.check_basic_identities();
    checks.extend(ax.entries().into_iter().chain(ids.entries()).map(|(n, b)| Check { name: n.into(), holds: b }));
    if let Some(n) = &inst.subgroup {
        if !inst.group.is_normal(n) {
            return Err(usage(format!("{n:?} is not a normal subgroup")).into());
        }
        let nk = NormalHopfSubalgebra::for_subgroup(h.clone(), &inst.group, n).map_err(|e| Failure::Compute(format!("hopf: {e}")))?;
        let triv = h.trivial_module();
        let reg = FdModule::regular(h.algebra().clone());
        let qtriv = nk.quotient().trivial_module();
        let inverse = |r: Result<bool, HopfError>| -> Result<bool, Failure> {
            match r {
                Ok(b) => Ok(b),
                Err(HopfError::InverseCheckFailed(_)) => Ok(false),
                Err(e) => Err(Failure::Compute(format!("hopf: {e}"))),
            }
        };
        for (label, m) in [("trivial", &triv), ("regular", &reg)] {
            let holds = inverse(phi_psi(m, &nk).map(|_| true))?;
            checks.push(Check { name: format!("Φ, Ψ inverse H̄-isomorphisms on the {label} module"), holds });
            let holds = inverse(adjunction_alpha_beta(&qtriv, m, &triv, &nk).map(|_| true))?;
            checks.push(Check { name: format!("α, β inverse with Q the {label} module"), holds });
        }
    }
    let all = checks.iter().all(|c| c.holds);
    let mut rows: Vec<(String, String)> = checks.iter().map(|c| (c.name.clone(), yes(c.holds))).collect();
    rows.push(("verdict".into(), all.to_string()));
    let body = json!({ "group_order": inst.group.order(), "p": inst.field.p(), "checks": checks, "verdict": all });
    Ok(Outcome { text: kv_table(&rows), json: envelope("hopf-check", body), verdict: all })
}

pub fn oracle(d: &RunDescriptor) -> Result<Outcome, Failure> {
    let inst = instance(d)?;
    let v = cohomology_oracle(&inst.group, &inst.module, d.degree()).map_err(groupcoh_failure)?;
    let rows: Vec<(String, String)> = v.iter().enumerate().map(|(n, x)| (format!("H^{n}"), x.to_string())).collect();
    let body = json!({ "group_order": inst.group.order(), "p": inst.field.p(), "dims": v });
    Ok(Outcome { text: kv_table(&rows), json: envelope("oracle", body), verdict: true })
}
