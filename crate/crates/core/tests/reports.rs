mod common;

use std::path::PathBuf;

use common::{built, family};
use gf2class_core::classify::{classify, construct_transvection, ClassifyConfig};
use gf2class_core::group::{closure, is_transvection};
use gf2class_core::BitMatrix;
use proptest::prelude::*;

const GOLDEN: &[&str] = &["frobenius73", "alt7", "alternating:7", "f4-unitary:3", "fixed-block:2:4"];

fn golden_path(spec: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(format!("{}.json", spec.replace(':', "-")))
}

fn report_json(spec: &str) -> String {
    let f = family(spec);
    classify(&f.generators, &f.seed, ClassifyConfig::default()).unwrap().to_json()
}

/// Set `UPDATE_GOLDEN=1` to rewrite the files.
#[test]
fn reports_match_golden_files() {
    for spec in GOLDEN {
        let json = report_json(spec);
        let path = golden_path(spec);
        if std::env::var_os("UPDATE_GOLDEN").is_some() {
            std::fs::create_dir_all(path.parent().unwrap()).unwrap();
            std::fs::write(&path, &json).unwrap();
        }
        let expected = std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
        assert_eq!(json, expected, "{spec}");
    }
}

#[test]
fn reports_are_deterministic() {
    for spec in ["symplectic:6", "orthogonal:6:minus", "f4-reflection:3", "transvection:4"] {
        assert_eq!(report_json(spec), report_json(spec), "{spec}");
    }
}

fn random_invertible(n: usize, bits: &[u64]) -> BitMatrix {
    // unit lower times unit upper triangular, times a rotation
    let mut lower = BitMatrix::identity(n);
    let mut upper = BitMatrix::identity(n);
    let mut k = 0;
    for i in 0..n {
        for j in 0..i {
            lower.set(i, j, bits[k % bits.len()] >> (k / bits.len()) & 1 == 1);
            upper.set(j, i, bits[(k + 1) % bits.len()] >> (k / bits.len() + 7) & 1 == 1);
            k += 1;
        }
    }
    let rotation = BitMatrix::from_u64_rows(n, &(0..n).map(|i| 1u64 << ((i + bits[0] as usize) % n)).collect::<Vec<_>>());
    &(&lower * &upper) * &rotation
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn classification_is_stable_under_change_of_basis(
        which in 0usize..6,
        bits in proptest::collection::vec(any::<u64>(), 4),
    ) {
        let spec = ["frobenius73", "alt7", "orthogonal:6:minus", "alternating:7", "f4-reflection:3", "f4-unitary:3"][which];
        let f = family(spec);
        let p = random_invertible(f.seed.rows(), &bits);
        let p_inv = p.inverse().unwrap();
        let conj = |g: &BitMatrix| &(&p_inv * g) * &p;
        let moved: Vec<BitMatrix> = f.generators.iter().map(conj).collect();
        let a = classify(&f.generators, &f.seed, ClassifyConfig::default()).unwrap();
        let b = classify(&moved, &conj(&f.seed), ClassifyConfig::default()).unwrap();
        prop_assert_eq!(a.branch, b.branch);
        prop_assert_eq!(a.group_order, b.group_order);
        prop_assert_eq!(a.class_size, b.class_size);
        prop_assert_eq!(&a.geometry, &b.geometry);
        prop_assert_eq!(&a.spreads, &b.spreads);
        prop_assert_eq!(a.all_verified_branches, b.all_verified_branches);
    }

    #[test]
    fn constructed_transvection_is_a_group_element(
        n in 3usize..=5,
        bits in proptest::collection::vec(any::<u64>(), 4),
    ) {
        let f = family(&format!("transvection:{n}"));
        let p = random_invertible(n, &bits);
        let p_inv = p.inverse().unwrap();
        let conj = |g: &BitMatrix| &(&p_inv * g) * &p;
        let gens: Vec<BitMatrix> = f.generators.iter().map(conj).collect();
        let group = gf2class_core::group::MatrixGroup::new(gens.clone()).unwrap();
        let class = gf2class_core::group::build_class(&group, &conj(&f.seed), None, Default::default()).unwrap();
        let (d1, d2, inverted, t) = construct_transvection(&class).unwrap();
        prop_assert!(is_transvection(&t));
        prop_assert!(class.contains(&d1) && class.contains(&d2));
        let product = if inverted { &d1 * &(&d2 * &d2) } else { &d1 * &d2 };
        prop_assert_eq!(&product, &t);
        prop_assert!(closure(&gens, 1 << 24).unwrap().contains(&t));
    }
}

#[test]
fn transvection_families_contain_the_constructed_element() {
    for n in 3..=6 {
        let b = built(&format!("transvection:{n}"), false);
        let (_, _, _, t) = construct_transvection(&b.class).unwrap();
        assert!(is_transvection(&t), "{n}");
    }
}
