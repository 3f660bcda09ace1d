//! Frozen reference values for the q-special functions.
//!
//! The expected numbers come from an independent 60-digit (500 digits for the
//! completeness sums) evaluation of the same closed forms in a separate
//! arbitrary-precision implementation.

#![allow(clippy::excessive_precision)]

use proptest::prelude::*;
use qspace3::qarith::{jackson_integral, qbinomial_sym, qfactorial_sym, qnum_sym, qpochhammer, QContext};
use qspace3::qspecial::{
    check_difference, check_difference_at, check_recurrence, check_recurrence_at, completeness_sum, lattice_point,
    low_degree_closed_form, orthonormality_matrix, orthonormality_sum, p_lm, p_tilde, weight_w, QPoint,
};

fn ctx(q: f64) -> QContext {
    QContext::new(q).unwrap()
}

fn close(got: f64, want: f64, rel: f64) -> bool {
    (got - want).abs() <= rel * want.abs().max(f64::MIN_POSITIVE)
}

#[test]
fn plm_reference_values() {
    let cases: &[(i64, i64, f64, f64, f64)] = &[
        (2, 0, 0.37, 1.5, 0.018869230769230765495),
        (3, 1, -0.2, 1.5, 0.018345228654507009564),
        (6, 2, 0.00390625, 2.0, -0.00000000091335568168478158231),
        (8, 0, 0.00390625, 2.0, -0.00000000000023847518845372854196),
        (5, 3, 0.01, 1.1, -0.048171952054974347112),
        (8, 4, -0.3186308177103565, 1.1, -0.00011955817002190084919),
    ];
    for &(l, m, x, q, want) in cases {
        let got = p_lm(l, m, x, &ctx(q)).unwrap();
        assert!(close(got, want, 1e-13), "P^{m}_{l}({x}) at q={q}: {got} vs {want}");
    }
}

#[test]
fn p_tilde_reference_values() {
    let cases: &[(i64, i64, f64, f64, f64)] = &[
        (3, 1, 0.19753086419753085, 1.5, 1.4847653296801087525),
        (4, 2, -0.3348979766803842, 1.2, 1.7672282084721948538),
        (8, 3, -3.814697265625e-06, 2.0, -0.85991271806144781021),
        (0, 0, 0.5, 1.5, 1.0606601717798212866),
        (6, 1, 5.2150950508465636e-06, 1.5, 0.00074775820053588721536),
    ];
    for &(l, m, x, q, want) in cases {
        let got = p_tilde(l, m, x, &ctx(q)).unwrap();
        assert!(close(got, want, 1e-13), "P~^{m}_{l}({x}) at q={q}: {got} vs {want}");
    }
}

#[test]
fn weight_reference_values() {
    let cases: &[(i64, i64, f64, f64, f64)] = &[
        (2, 1, 0.1, 1.5, 11.128122434553372598),
        (5, 0, 0.3, 2.0, 1712317.2335615851063),
        (7, 3, -0.01, 1.3, 113234.81274839589381),
    ];
    for &(l, m, x, q, want) in cases {
        let got = weight_w(l, m, x, &ctx(q)).unwrap();
        assert!(close(got, want, 1e-13), "w^{m}_{l}({x}) at q={q}: {got} vs {want}");
    }
}

#[test]
fn orthonormality_reference_values() {
    let c = ctx(1.5);
    assert!((orthonormality_sum(0, 0, 0, &c, -60).unwrap() - 1.0).abs() < 1e-13);
    assert!(orthonormality_sum(2, 4, 1, &ctx(1.3), -60).unwrap().abs() < 1e-13);
    let got = orthonormality_sum(3, 3, 2, &c, -10).unwrap();
    assert!(close(got, 0.99999999999696788347, 1e-13));
    let got = orthonormality_sum(1, 3, 0, &ctx(2.0), -5).unwrap();
    assert!(close(got, 0.00000000012319862890131491709, 1e-6), "{got}");
    assert!(orthonormality_sum(0, 1, 0, &c, -60).unwrap().abs() < 1e-15);
}

#[test]
fn orthonormality_matrix_matches_pairwise_sums() {
    let c = ctx(1.7);
    let g = orthonormality_matrix(5, 2, &c, -25).unwrap();
    assert_eq!(g.len(), 4);
    for l in 2..=5 {
        for lp in 2..=5 {
            let one = orthonormality_sum(l, lp, 2, &c, -25).unwrap();
            assert_eq!(g[(l - 2) as usize][(lp - 2) as usize], one, "l={l} l'={lp}");
        }
    }
    assert!(orthonormality_matrix(1, 2, &c, -5).is_err());
}

#[test]
fn completeness_reference_values() {
    let c = ctx(1.5);
    assert!((completeness_sum(0, 0, 1, 1, 0, &c, 40).unwrap() - 1.0).abs() < 1e-13);
    assert!(completeness_sum(0, -1, 1, 1, 0, &c, 40).unwrap().abs() < 1e-13);
    assert!(completeness_sum(-2, -2, 1, -1, 0, &c, 40).unwrap().abs() < 1e-13);
    let got = completeness_sum(-1, -1, 1, 1, 1, &c, 10).unwrap();
    assert!(close(got, 0.99999999999999991162, 1e-13));
    assert!(completeness_sum(-3, -2, -1, -1, -2, &c, 30).unwrap().abs() < 1e-13);
}

#[test]
fn closed_forms_match_the_sum() {
    for q in [1.1, 1.5, 2.0] {
        let c = ctx(q);
        for (l, m) in [(0, 0), (1, 0), (2, 0), (3, 0), (1, 1), (2, 1), (3, 1)] {
            for x in [-0.93, -0.4, 0.0, 0.17, 0.66, 1.0] {
                let want = low_degree_closed_form(l, m, x, &c).unwrap();
                let got = p_lm(l, m, x, &c).unwrap();
                assert!((got - want).abs() <= 1e-13 * want.abs().max(1e-3), "P^{m}_{l}({x}), q={q}");
            }
        }
    }
}

#[test]
fn recurrence_examples() {
    let c = ctx(1.5);
    assert!(check_recurrence(3, 1, 1.5f64.powi(-4), &c).unwrap() < 1e-10);
    assert!(check_difference(2, 0, 1.5f64.powi(-2), &c).unwrap() < 1e-10);
    let c = ctx(1.2);
    assert!(check_difference(4, 2, -(1.2f64.powi(-6)), &c).unwrap() < 1e-10);
    assert!(check_recurrence(4, 2, -(1.2f64.powi(-6)), &c).unwrap() < 1e-10);
    // At l = m the lower neighbour drops out.
    assert!(check_recurrence(2, 2, lattice_point(-1, 2, 1, 1.2), &c).unwrap() < 1e-12);
}

#[test]
fn corrected_shift_identity_for_the_weight() {
    // w_{l-1} = w_l q^{-l} sqrt([l-m][2l-1] / ([l+m][2l+1]))
    for q in [1.2, 1.5, 2.0] {
        let c = ctx(q);
        for m in 0..3i64 {
            for l in (m + 1)..(m + 5) {
                let x = lattice_point(-2, m, 1, q);
                let b = |a: i64| qnum_sym(a as f64, &c);
                let lhs = weight_w(l - 1, m, x, &c).unwrap();
                let rhs = weight_w(l, m, x, &c).unwrap()
                    * q.powi(-l as i32)
                    * (b(l - m) * b(2 * l - 1) / (b(l + m) * b(2 * l + 1))).sqrt();
                assert!(close(lhs, rhs, 1e-13), "l={l} m={m} q={q}");
            }
        }
    }
}

#[test]
fn weight_scaling_identity() {
    for q in [1.3, 1.7] {
        let c = ctx(q);
        for m in 0..4i64 {
            for n in -6..=0 {
                let x = lattice_point(n, m, -1, q);
                let lhs = weight_w(m + 2, m, x / (q * q), &c).unwrap();
                let rhs = weight_w(m + 2, m, x, &c).unwrap() * ((1.0 - x * x) / (1.0 - x * x * q.powi(4 * m as i32))).sqrt();
                assert!(close(lhs, rhs, 1e-13), "m={m} n={n} q={q}");
            }
        }
    }
}

#[test]
fn classical_limit_of_qnumbers_and_normalisation() {
    let c = ctx(1.0 + 1e-6);
    for a in 1..=20 {
        assert!((qnum_sym(a as f64, &c) - a as f64).abs() <= 1e-4 * a as f64);
    }
    let c = ctx(1.0 + 1e-4);
    for l in 0..6 {
        for m in 0..=l {
            assert!((p_lm(l, m, 1.0, &c).unwrap() - 1.0).abs() < 1e-3);
        }
    }
}

#[test]
fn binomial_matches_factorial_ratio() {
    for q in [1.1, 1.5, 2.5] {
        let c = ctx(q);
        for n in 0..=30 {
            for k in 0..=n {
                let ratio =
                    qfactorial_sym(n, &c).unwrap() / (qfactorial_sym(k, &c).unwrap() * qfactorial_sym(n - k, &c).unwrap());
                assert!(close(qbinomial_sym(n, k, &c), ratio, 1e-12), "n={n} k={k} q={q}");
            }
        }
    }
}

#[test]
fn jackson_integrates_monomials() {
    for q in [1.2, 2.0, 3.0] {
        let c = ctx(q);
        for n in 0..8 {
            let got = jackson_integral(|x| x.powi(n), 1.0, &c).unwrap();
            let want = (1.0 - 1.0 / q) / (1.0 - q.powi(-(n + 1)));
            assert!(close(got, want, c.tol_rel()), "n={n} q={q}");
        }
    }
}

proptest! {
    #[test]
    fn qnum_is_odd(a in -30.0f64..30.0, q in 1.01f64..4.0) {
        let c = ctx(q);
        prop_assert!((qnum_sym(-a, &c) + qnum_sym(a, &c)).abs() <= 1e-14 * qnum_sym(a, &c).abs().max(1.0));
    }

    #[test]
    fn qbinomial_is_symmetric(n in 0i64..40, k in 0i64..40, q in 1.05f64..3.0) {
        prop_assume!(k <= n);
        let c = ctx(q);
        let a = qbinomial_sym(n, k, &c);
        prop_assert!(close(a, qbinomial_sym(n, n - k, &c), 1e-12));
    }

    #[test]
    fn pochhammer_splits(a in -2.0f64..2.0, b in 0.05f64..0.95, j in 0usize..10, k in 0usize..10) {
        // (a; b)_{j+k} = (a; b)_j (a b^j; b)_k
        let lhs = qpochhammer(a, b, j + k);
        let rhs = qpochhammer(a, b, j) * qpochhammer(a * b.powi(j as i32), b, k);
        prop_assert!((lhs - rhs).abs() <= 1e-12 * lhs.abs().max(1e-12));
    }

    #[test]
    fn p_tilde_parity(l in 0i64..9, dm in 0i64..9, n in -10i64..=0, q in 1.1f64..2.0) {
        let m = dm.min(l);
        let c = ctx(q);
        let x = lattice_point(n, m, 1, q);
        let a = p_tilde(l, m, x, &c).unwrap();
        let b = p_tilde(l, m, -x, &c).unwrap();
        let s = if (l - m) % 2 == 0 { 1.0 } else { -1.0 };
        prop_assert!((b - s * a).abs() <= 1e-13 * a.abs().max(1e-300));
    }

    #[test]
    fn p_lm_has_degree_l_minus_m(l in 0i64..9, dm in 0i64..9, x in -1.0f64..1.0, q in 1.1f64..2.0) {
        // Interpolating through l − m + 1 Chebyshev nodes reproduces the value at x.
        let m = dm.min(l);
        let c = ctx(q);
        let deg = (l - m) as usize;
        let nodes: Vec<f64> = (0..=deg)
            .map(|j| ((2 * j + 1) as f64 * std::f64::consts::PI / (2 * deg + 2) as f64).cos())
            .collect();
        let vals: Vec<f64> = nodes.iter().map(|&t| p_lm(l, m, t, &c).unwrap()).collect();
        let mut interp = 0.0;
        for (i, &xi) in nodes.iter().enumerate() {
            let mut basis = 1.0;
            for (j, &xj) in nodes.iter().enumerate() {
                if i != j {
                    basis *= (x - xj) / (xi - xj);
                }
            }
            interp += vals[i] * basis;
        }
        let scale = vals.iter().fold(1e-300f64, |a, v| a.max(v.abs()));
        prop_assert!((interp - p_lm(l, m, x, &c).unwrap()).abs() <= 1e-9 * scale);
        for k in (deg as i64 + 1)..(deg as i64 + 4) {
            prop_assert_eq!(qbinomial_sym(l - m, k, &c), 0.0);
        }
    }

    #[test]
    fn recurrence_and_difference_hold_on_lattice(l in 0i64..9, dm in 0i64..9, n in -10i64..=0, sigma in prop::sample::select(vec![1, -1]), q in 1.1f64..2.0) {
        let m = dm.min(l);
        let c = ctx(q);
        let x = QPoint::lattice(n, m, sigma);
        prop_assert!(check_recurrence_at(l, m, x, &c).unwrap() < 1e-10);
        prop_assert!(check_difference_at(l, m, x, &c).unwrap() < 1e-10);
    }
}
