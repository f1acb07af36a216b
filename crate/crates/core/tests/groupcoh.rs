use specseq::algebra::GroupTable;
use specseq::grothendieck::{apply_to_resolution, HomOver, SecondFixed};
use specseq::groupcoh::{bar_resolution, cohomology_oracle, lhs_vs_grothendieck, trivial_module, GroupCohError, LhsSetup};
use std::sync::Arc;

#[test]
fn bar_terms_are_tensor_powers() {
    let bar = bar_resolution(&GroupTable::cyclic(2), 2, 3).unwrap();
    assert_eq!(bar.dims(), vec![2, 4, 8, 16]);
    bar.validate().unwrap();
    let s3 = bar_resolution(&GroupTable::symmetric3(), 3, 2).unwrap();
    assert_eq!(s3.dims(), vec![6, 36, 216]);
    s3.validate().unwrap();
}

#[test]
fn bar_over_trivial_group_alternates() {
    let bar = bar_resolution(&GroupTable::cyclic(1), 2, 4).unwrap();
    assert_eq!(bar.dims(), vec![1; 5]);
    let ranks: Vec<usize> = bar.res.boundary.iter().map(|b| b.rank()).collect();
    assert_eq!(ranks, vec![0, 1, 0, 1]);
    bar.validate().unwrap();
}

#[test]
fn bar_respects_budget() {
    let err = specseq::groupcoh::bar_resolution_over(
        bar_resolution(&GroupTable::klein4(), 2, 0).unwrap().algebra,
        10,
        1 << 10,
    )
    .unwrap_err();
    assert!(matches!(err, GroupCohError::BudgetExceeded { .. }));
}

#[test]
fn hom_from_bar_computes_cohomology_of_c2() {
    let bar = bar_resolution(&GroupTable::cyclic(2), 2, 4).unwrap();
    let triv = trivial_module(&bar.algebra).unwrap();
    let contra = SecondFixed { bf: Arc::new(HomOver), y: triv };
    let (c, _) = apply_to_resolution(&contra, &bar.resolution()).unwrap();
    let dims: Vec<usize> = (0..=2).map(|n| c.homology_dim(n)).collect();
    assert_eq!(dims, vec![1, 1, 1]);
}

#[test]
fn oracle_matches_known_cohomology() {
    let f2 = |g: &GroupTable, d| {
        let alg = Arc::new(specseq::algebra::group_algebra(g, specseq::linalg::FieldSpec::new(2).unwrap()));
        cohomology_oracle(g, &trivial_module(&alg).unwrap(), d).unwrap()
    };
    assert_eq!(f2(&GroupTable::cyclic(2), 5), vec![1; 6]);
    assert_eq!(f2(&GroupTable::cyclic(4), 5), vec![1; 6]);
    assert_eq!(f2(&GroupTable::klein4(), 5), vec![1, 2, 3, 4, 5, 6]);
    let alg = Arc::new(specseq::algebra::group_algebra(&GroupTable::symmetric3(), specseq::linalg::FieldSpec::new(2).unwrap()));
    assert!(matches!(cohomology_oracle(&GroupTable::symmetric3(), &trivial_module(&alg).unwrap(), 2), Err(GroupCohError::NotLocal { .. })));
}

#[test]
fn lhs_c4_over_c2_small_window() {
    let s = LhsSetup::new(&GroupTable::cyclic(4), &[0, 2], 2, None).unwrap();
    let r = lhs_vs_grothendieck(&s, 2, false).unwrap().report;
    assert!(r.verdict);
    assert_eq!(r.abutment, vec![1, 1, 1]);
    let e3: Vec<(i64, i64, usize)> = r.pages[1].entries.clone();
    assert!(e3.iter().all(|&(p, q, d)| d == usize::from(p <= 1 && q % 2 == 0)));
}

#[test]
fn lhs_entry_dims_with_bar_on_both_axes() {
    let s = LhsSetup::new(&GroupTable::cyclic(4), &[0, 2], 2, None).unwrap();
    let m = 3;
    let b = specseq::groupcoh::bar_resolution_over(s.hopf.algebra().clone(), m, 1 << 12).unwrap().resolution();
    let bbar = specseq::groupcoh::bar_resolution_over(s.nk.quotient().algebra().clone(), m, 1 << 12).unwrap().resolution();
    let u_m = SecondFixed { bf: s.u(), y: s.module.clone() };
    let (fa, fa_applied) = apply_to_resolution(&u_m, &b).unwrap();
    let (d, _) = specseq::comparison::bifunctor_on_complex(&HomOver, &bbar, &fa, &fa_applied, m).unwrap();
    for i in 0..=m {
        for j in 0..=m - i {
            assert_eq!(d.dim(i, j), (1 << (i + 1)) * 4usize.pow(j as u32 + 1) / 4, "entry ({i}, {j})");
        }
    }
    let total = d.total().unwrap();
    assert!((0..m as i64).all(|n| (&total.diff(n) * &total.diff(n + 1)).is_zero()));
    assert_eq!((0..m as i64).map(|n| total.homology_dim(n)).collect::<Vec<_>>(), vec![1; m]);
}

fn e2_support(g: GroupTable, n: &[usize], window: usize) -> (bool, Vec<(i64, i64, usize)>) {
    let s = LhsSetup::new(&g, n, 2, None).unwrap();
    let run = lhs_vs_grothendieck(&s, window, false).unwrap();
    (run.report.verdict, run.report.pages[0].entries.iter().copied().filter(|e| e.2 > 0).collect())
}

#[test]
fn lhs_with_whole_group_as_normal_subgroup() {
    let (verdict, support) = e2_support(GroupTable::cyclic(2), &[0, 1], 3);
    assert!(verdict);
    assert!(support.iter().all(|e| e.0 == 0));
    assert_eq!(support.len(), 4);
}

#[test]
fn lhs_with_trivial_normal_subgroup() {
    let (verdict, support) = e2_support(GroupTable::cyclic(2), &[0], 3);
    assert!(verdict);
    assert!(support.iter().all(|e| e.1 == 0));
    assert_eq!(support.len(), 4);
}

fn dihedral8() -> GroupTable {
    let idx = |a: usize, b: usize| a % 4 + 4 * b;
    let table = (0..8)
        .map(|x| {
            let (a, b) = (x % 4, x / 4);
            (0..8).map(|y| {
                let (c, d) = (y % 4, y / 4);
                let c = if b == 0 { c } else { (4 - c) % 4 };
                idx(a + c, (b + d) % 2)
            }).collect()
        })
        .collect();
    GroupTable::new(table).unwrap()
}

#[test]
fn lhs_rejects_bad_subgroups() {
    let d8 = dihedral8();
    assert!(matches!(LhsSetup::new(&d8, &[0, 4], 2, None), Err(GroupCohError::NotNormal)));
    assert!(LhsSetup::new(&d8, &[0, 2], 2, None).is_ok());
    let s3 = GroupTable::symmetric3();
    assert!(matches!(LhsSetup::new(&s3, &[0], 2, None), Err(GroupCohError::NotLocal { .. })));
}
