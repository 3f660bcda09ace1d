#![allow(clippy::excessive_precision)]

use proptest::prelude::*;

use qspace3::basistrans::{
    build_transform, c_coeff, c_coeff_mp, completeness_check, completeness_pairs, d_coeff, format_sig17, x3_eigenvalue,
    CompletenessForm, Direction, TransformSpec,
};
use qspace3::QContext;

fn ctx(q: f64) -> QContext {
    QContext::new(q).unwrap()
}

// Frozen values, cross-checked against the 256-bit path.
const C_VALUES: [(i64, i64, i64, i32, f64); 6] = [
    (0, 0, 0, 1, 5.27046276694729809e-1),
    (2, 0, -1, 1, -3.27878661735252430e-1),
    (3, 1, -2, -1, -2.94374222536150476e-1),
    (4, -2, -3, 1, -2.99151394543402449e-1),
    (6, 2, 0, -1, 6.96314198451832567e-2),
    (10, 3, -5, 1, -7.17493543635851910e-2),
];

#[test]
fn c_coefficients_frozen() {
    let c = ctx(1.5);
    for (l, m, mt, s, want) in C_VALUES {
        let got = c_coeff(l, m, mt, s, &c).unwrap();
        assert!((got - want).abs() <= 1e-13 * want.abs(), "c({l}, {m}, {mt}, {s}) = {got}");
        let mp = c_coeff_mp(l, m, mt, s, 1.5, 256).unwrap().to_f64();
        assert!((mp - want).abs() <= 1e-13 * want.abs());
    }
}

#[test]
fn d_coefficients_frozen() {
    let c = ctx(2.0);
    let cases = [
        (0, 0, 0, 0, 1, 6.12372435695794581e-1),
        (1, 2, 1, 0, -1, -9.03498863925652346e-2),
        (0, 5, 2, -3, 1, -1.16161049717759864e-2),
    ];
    for (bm, l, m, nu, s, want) in cases {
        let got = d_coeff(bm, l, m, nu, s, &c).unwrap();
        assert!((got - want).abs() <= 1e-13 * want.abs(), "d({bm}, {l}, {m}, {nu}, {s}) = {got}");
    }
    // The ground state at q = 2 has c = sqrt(3/8).
    assert!((d_coeff(0, 0, 0, 0, 1, &c).unwrap() - 0.375f64.sqrt()).abs() < 1e-15);
}

#[test]
fn d_is_c_shifted_by_big_m() {
    let c = ctx(1.5);
    for big_m in [-1, 0, 2] {
        for nu in big_m - 4..=big_m {
            let m = 1;
            assert_eq!(d_coeff(big_m, 3, m, nu, -1, &c).unwrap(), c_coeff(3, m, nu - big_m, -1, &c).unwrap());
        }
    }
    assert!(d_coeff(0, 3, 0, 1, 1, &c).is_err());
}

#[test]
fn x3_eigenvalues() {
    let c = ctx(2.0);
    assert_eq!(x3_eigenvalue(1.0, 1, 1, &c), 2.0);
    assert_eq!(x3_eigenvalue(1.0, 0, -1, &c), -0.5);
    assert_eq!(x3_eigenvalue(3.0, -1, 1, &c), 3.0 / 8.0);
}

#[test]
fn direction_parsing() {
    assert_eq!(Direction::parse("1").unwrap(), Direction::MtkToLm);
    assert_eq!(Direction::parse("lm_to_x3").unwrap(), Direction::LmToX3);
    assert!(Direction::parse("3").is_err());
}

#[test]
fn transform_tables_are_certified() {
    let c = ctx(1.5);
    let spec = TransformSpec { direction: Direction::MtkToLm, m: 1, big_m: 0, r0: 1.0, l_max: 12, depth: 40 };
    let t = build_transform(&spec, &c).unwrap();
    assert_eq!(t.col_labels.len(), 12);
    assert_eq!(t.row_labels.len(), 2 * 41);
    assert!(t.isometry_defect < 1e-12, "{}", t.isometry_defect);
    assert!(t.eigen_defect < 1e-10, "{}", t.eigen_defect);
    // One sign alone is not complete.
    assert!(t.single_sigma_defect > 1e-3);

    let spec = TransformSpec { direction: Direction::LmToX3, m: 0, big_m: 0, r0: 1.0, l_max: 40, depth: 10 };
    let t = build_transform(&spec, &c).unwrap();
    assert!(t.interior_cols.iter().any(|&b| b));
    assert!(t.isometry_defect < 1e-10, "{}", t.isometry_defect);
    assert!(t.eigen_defect < 1e-6, "{}", t.eigen_defect);
}

#[test]
fn transform_table_outputs() {
    let c = ctx(2.0);
    let spec = TransformSpec { direction: Direction::MtkToLm, m: 0, big_m: 0, r0: 1.0, l_max: 3, depth: 5 };
    let t = build_transform(&spec, &c).unwrap();
    let mut buf = Vec::new();
    t.write_csv(&mut buf).unwrap();
    let text = String::from_utf8(buf).unwrap();
    assert!(text.lines().count() > 1);
    let json = t.to_json();
    assert_eq!(json["schema"], "qspace3/1");
}

#[test]
fn transform_rejects_bad_specs() {
    let c = ctx(1.5);
    let spec = TransformSpec { direction: Direction::MtkToLm, m: 4, big_m: 0, r0: 1.0, l_max: 3, depth: 5 };
    assert!(build_transform(&spec, &c).is_err());
    let spec = TransformSpec { direction: Direction::MtkToLm, m: 0, big_m: 0, r0: 1.0, l_max: 3, depth: 0 };
    assert!(build_transform(&spec, &c).is_err());
}

#[test]
fn completeness_improves_with_l_max() {
    let c = ctx(1.5);
    for form in [CompletenessForm::Tensor, CompletenessForm::X3] {
        let pairs = completeness_pairs(form, -1, 5);
        assert_eq!(pairs.len(), 55);
        let coarse = completeness_check(form, -1, &pairs, 6, &c).unwrap().max_defect;
        let fine = completeness_check(form, -1, &pairs, 30, &c).unwrap().max_defect;
        assert!(fine < coarse && fine < 1e-10, "{coarse} {fine}");
    }
    let bad = [((1, 1), (0, 1))];
    assert!(completeness_check(CompletenessForm::Tensor, 0, &bad, 10, &c).is_err());
    assert!(completeness_check(CompletenessForm::X3, 0, &bad, 10, &c).is_err());
}

#[test]
fn sig17_is_lossless() {
    for x in [0.1, -1.0 / 3.0, 6.02e23, 5e-324] {
        assert_eq!(format_sig17(x).parse::<f64>().unwrap(), x);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn columns_are_orthonormal(q in 1.3f64..2.5, m in -3i64..=3) {
        let c = ctx(q);
        // Deep enough that the truncated tail, of order q^(-2 depth), is below 1e-12.
        let depth = (12.0 / (2.0 * q.log10())).ceil() as i64 + 5;
        let spec = TransformSpec { direction: Direction::MtkToLm, m, big_m: 0, r0: 1.0, l_max: m.abs() + 5, depth };
        let t = build_transform(&spec, &c).unwrap();
        prop_assert!(t.isometry_defect < 1e-10, "{}", t.isometry_defect);
        prop_assert!(t.eigen_defect < 1e-9, "{}", t.eigen_defect);
    }

    #[test]
    fn coefficient_sign_symmetry(q in 1.2f64..2.5, l in 0i64..8, dm in 0i64..8, mt in -6i64..=0) {
        // P~ has parity (-1)^(l-m), so the sigma = -1 coefficient is a signed copy.
        let m = dm.min(l);
        let c = ctx(q);
        let plus = c_coeff(l, m, mt, 1, &c).unwrap();
        let minus = c_coeff(l, m, mt, -1, &c).unwrap();
        let sign = if (l - m) % 2 == 0 { 1.0 } else { -1.0 };
        prop_assert!((minus - sign * plus).abs() <= 1e-13 * plus.abs().max(1e-300));
    }
}
