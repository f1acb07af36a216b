use specseq::algebra::{group_algebra, FdModule, GroupTable};
use specseq::comparison::{
    change_of_rings_instance, first_comparison, first_naturality, hom_identity_instance, second_comparison, ComparisonError,
};
use specseq::groupcoh::cohomology_oracle;
use specseq::linalg::{FieldSpec, FpMatrix};
use specseq::spectral::classical_page;
use std::sync::Arc;

fn c2() -> (GroupTable, Arc<specseq::algebra::FdAlgebra>, FpMatrix, FdModule) {
    let g = GroupTable::cyclic(2);
    let f = FieldSpec::new(2).unwrap();
    let alg = Arc::new(group_algebra(&g, f));
    let counit = FpMatrix::from_vec(f, 2, 1, vec![1, 1]);
    let triv = FdModule::character(alg.clone(), &[1, 1]).unwrap();
    (g, alg, counit, triv)
}

fn abutment(x: &specseq::spectral::FilteredComplex, window: usize) -> Vec<usize> {
    let page = classical_page(x, None, window as i64).unwrap();
    (0..=window as i64).map(|n| page.entries.iter().filter(|e| e.p + e.q == n).map(|e| e.dim).sum()).collect()
}

#[test]
fn hom_then_identity_over_c2() {
    let (g, alg, counit, triv) = c2();
    let window = 4;
    let inst = hom_identity_instance(&alg, &counit, triv.clone(), triv.clone(), window).unwrap();
    let fc = first_comparison(&inst, window, false).unwrap();
    assert!(fc.report.hypotheses_hold(), "{:?}", fc.report.hypotheses);
    assert!(fc.report.verdict);
    assert!(fc.report.dims_agree);
    let ext = cohomology_oracle(&g, &triv, window).unwrap();
    assert_eq!(abutment(&fc.ff1, window), ext);
    assert_eq!(abutment(&fc.ff2, window), ext);
    let e2 = classical_page(&fc.ff1, Some(2), window as i64).unwrap();
    for e in &e2.entries {
        let expected = if e.p == 0 && e.q >= 0 { ext[e.q as usize] } else { 0 };
        assert_eq!(e.dim, expected, "E2 at ({}, {})", e.p, e.q);
    }
}

#[test]
fn change_of_rings_with_trivial_and_padded_resolutions() {
    let (g, alg, counit, triv) = c2();
    let window = 4;
    let ext = cohomology_oracle(&g, &triv, window).unwrap();
    for (y_dim, padded) in [(1, false), (1, true), (2, true)] {
        let inst = change_of_rings_instance(&alg, &counit, triv.clone(), y_dim, padded, window).unwrap();
        let sc = second_comparison(&inst, window, false).unwrap();
        assert!(sc.report.hypotheses_hold(), "{:?}", sc.report.hypotheses);
        assert!(sc.report.verdict, "y_dim {y_dim} padded {padded}");
        assert!(sc.report.dims_agree);
        let expected: Vec<usize> = ext.iter().map(|d| d * y_dim).collect();
        assert_eq!(abutment(&sc.ffd, window), expected);
        assert_eq!(abutment(&sc.ffg, window), expected);
    }
}

#[test]
fn broken_resolution_is_rejected_unless_waived() {
    let (_, alg, counit, triv) = c2();
    let mut inst = change_of_rings_instance(&alg, &counit, triv, 1, true, 2).unwrap();
    inst.res_b.maps[0] = FpMatrix::zeros(alg.field(), 1, 2);
    match second_comparison(&inst, 2, false) {
        Err(ComparisonError::HypothesisFailed(msg)) => assert!(msg.contains("resolves")),
        other => panic!("expected a hypothesis failure, got {:?}", other.map(|c| c.report.verdict)),
    }
    let waived = second_comparison(&inst, 2, true).unwrap();
    assert!(waived.report.waived);
    assert!(!waived.report.hypotheses_hold());
}

#[test]
fn naturality_along_identity_and_zero() {
    let (_, alg, counit, triv) = c2();
    let window = 3;
    let inst = hom_identity_instance(&alg, &counit, triv.clone(), triv.clone(), window).unwrap();
    let fc = first_comparison(&inst, window, false).unwrap();
    let inst_t = hom_identity_instance(&alg, &counit, triv.clone(), triv.clone(), window).unwrap();
    let fc_t = first_comparison(&inst_t, window, false).unwrap();
    let id = FpMatrix::identity(alg.field(), 1);
    let rep = first_naturality(&inst, &fc, &inst_t, &fc_t, &id, window).unwrap();
    assert!(rep.all_commute);
    assert!(rep.squares.iter().any(|s| s.nontrivial));
    let zero = FpMatrix::zeros(alg.field(), 1, 1);
    let rep = first_naturality(&inst, &fc, &inst_t, &fc_t, &zero, window).unwrap();
    assert!(rep.all_commute);
    assert!(rep.squares.iter().all(|s| !s.nontrivial));
}

#[test]
fn report_serializes_entry_records() {
    let (_, alg, counit, triv) = c2();
    let inst = change_of_rings_instance(&alg, &counit, triv, 1, false, 2).unwrap();
    let sc = second_comparison(&inst, 2, false).unwrap();
    let v = serde_json::to_value(&sc.report).unwrap();
    let first = &v["entries"][0];
    assert!(first["index"].is_string());
    assert_eq!(first["dims"].as_array().unwrap().len(), 3);
    assert_eq!(first["arrows"].as_array().unwrap().len(), 2);
    assert_eq!(v["verdict"], serde_json::Value::Bool(true));
}
