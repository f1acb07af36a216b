mod common;

use common::{fields, full_complex, random_chain, random_double_complex, random_filtered_complex, rng};
use proptest::prelude::*;
use rand::Rng;
use specseq::spectral::{
    classical_page, d_r, exact_couple_check, first_filtration_identifications, fundamental_ses_check, EntryIndex, FilteredComplex,
};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn fundamental_sequences_are_short_exact(seed in any::<u64>(), fi in 0usize..2) {
        let mut r = rng(seed);
        let x = random_filtered_complex(&mut r, fields()[fi], 6, 4, 2);
        let (smin, smax) = x.filtration_range();
        for _ in 0..6 {
            let chain = random_chain(&mut r, smin, smax);
            let k = r.gen_range(-2..=6);
            let rep = fundamental_ses_check(&x, chain, k).unwrap();
            prop_assert!(rep.first && rep.second, "{chain:?} at {k}");
        }
    }

    #[test]
    fn exact_couple_sequence_is_exact(seed in any::<u64>(), fi in 0usize..2) {
        let mut r = rng(seed);
        let x = random_filtered_complex(&mut r, fields()[fi], 6, 4, 2);
        let (smin, smax) = x.filtration_range();
        for _ in 0..6 {
            let i = r.gen_range(-smax - 1..=-smin + 1);
            let j = r.gen_range(-2..=7) - i;
            let rr = r.gen_range(1..=4);
            prop_assert!(exact_couple_check(&x, i, j, rr).unwrap(), "i={i} j={j} r={rr}");
        }
    }

    #[test]
    fn infinity_page_sums_to_homology(seed in any::<u64>(), fi in 0usize..2) {
        let mut r = rng(seed);
        let x = random_filtered_complex(&mut r, fields()[fi], 5, 3, 2);
        let h = full_complex(&x);
        let (smin, smax) = x.filtration_range();
        for n in 0..=5 {
            let total: usize = (-smax..=-smin).map(|p| x.entry(&EntryIndex::classical(p, n - p, None)).unwrap().dim()).sum();
            prop_assert_eq!(total, h.homology_dim(n));
        }
    }

    #[test]
    fn pages_recurse_on_filtered_complexes(seed in any::<u64>(), fi in 0usize..2) {
        let mut r = rng(seed);
        let x = random_filtered_complex(&mut r, fields()[fi], 5, 4, 2);
        let (smin, smax) = x.filtration_range();
        for rr in 1..=3 {
            for p in -smax - 1..=-smin + 1 {
                for n in -1..=6 {
                    let q = n - p;
                    let out = d_r(&x, p, q, rr).unwrap();
                    let inc = d_r(&x, p - rr, q + rr - 1, rr).unwrap();
                    prop_assert!((&inc * &out).is_zero());
                    let next = x.entry(&EntryIndex::classical(p, q, Some(rr + 1))).unwrap().dim();
                    prop_assert_eq!(next, out.rows() - out.rank() - inc.rank());
                }
            }
        }
    }

    #[test]
    fn first_filtration_identifies_row_and_vertical_homology(seed in any::<u64>(), fi in 0usize..2) {
        let mut r = rng(seed);
        let x = random_double_complex(&mut r, fields()[fi], 5, 5, 4);
        let ff = FilteredComplex::first_filtration(&x).unwrap();
        for row in 0..5i64 {
            for col in 0..5i64 {
                let (e1, e2) = first_filtration_identifications(&x, &ff, -row, col + row).unwrap();
                prop_assert!(e1 && e2, "row {row} col {col}");
            }
        }
    }

    #[test]
    fn double_complex_pages_recurse(seed in any::<u64>(), fi in 0usize..2) {
        let mut r = rng(seed);
        let x = random_double_complex(&mut r, fields()[fi], 5, 5, 4);
        let ff = FilteredComplex::first_filtration(&x).unwrap();
        for rr in 1..=3 {
            let page = classical_page(&ff, Some(rr), 8).unwrap();
            let next = classical_page(&ff, Some(rr + 1), 8).unwrap();
            for e in &page.entries {
                let out = d_r(&ff, e.p, e.q, rr).unwrap();
                let inc = d_r(&ff, e.p - rr, e.q + rr - 1, rr).unwrap();
                prop_assert!((&inc * &out).is_zero());
                prop_assert_eq!(next.dim(e.p, e.q).unwrap(), e.dim - out.rank() - inc.rank());
            }
        }
    }
}
