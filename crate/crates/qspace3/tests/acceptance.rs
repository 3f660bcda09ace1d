//! Acceptance suite: one PASS/FAIL line per criterion, with its runtime.
//! Runs under `cargo test` without the default harness so the lines are
//! always printed.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use qspace3::basistrans::{completeness_check, completeness_pairs, CompletenessForm};
use qspace3::qarith::qnum_sym;
use qspace3::qspecial::{check_difference_at, check_recurrence_at, low_degree_closed_form, orthonormality_matrix, p_lm, QPoint};
use qspace3::repspace::spectrum::{t2_spectrum, x3_l_spectrum};
use qspace3::repspace::{
    build_joint, build_k_orbital, build_l_basis, build_t_orb, build_t_special, build_x_over_r, commutator_scale, coproduct,
    coproduct_term_scale, group_like_defect, r0_from_z0, verify_relations, window_1d, window_tk, CoproductVariant, RelationSet,
    RepFamily,
};
use qspace3::{QContext, Result};

const GOLDEN: [(i64, i64); 7] = [(0, 0), (1, 0), (2, 0), (3, 0), (1, 1), (2, 1), (3, 1)];

type Criterion = (&'static str, fn() -> Result<Outcome>, Duration);

struct Outcome {
    pass: bool,
    detail: String,
}

fn ctx(q: f64) -> Result<QContext> {
    QContext::new(q)
}

fn golden_table() -> Result<Outcome> {
    let mut rng = StdRng::seed_from_u64(20);
    let xs: Vec<f64> = (0..20).map(|_| rng.gen_range(-1.0..=1.0)).collect();
    let mut worst: f64 = 0.0;
    for q in [1.1, 1.5, 2.0] {
        let c = ctx(q)?;
        for (l, m) in GOLDEN {
            for &x in &xs {
                let want = low_degree_closed_form(l, m, x, &c).expect("closed form");
                let got = p_lm(l, m, x, &c)?;
                worst = worst.max((got - want).abs() / want.abs());
            }
        }
    }
    Ok(Outcome { pass: worst < 1e-12, detail: format!("7 forms x 20 points x 3 q, max rel err {worst:.2e}") })
}

fn recurrence_and_difference() -> Result<Outcome> {
    let (mut rec, mut diff, mut count) = (0.0f64, 0.0f64, 0);
    for q in [1.1, 1.5, 2.0] {
        let c = ctx(q)?;
        for l in 0..=8 {
            for m in 0..=l {
                for n in -10..=0 {
                    for sigma in [1, -1] {
                        let x = QPoint::lattice(n, m, sigma);
                        rec = rec.max(check_recurrence_at(l, m, x, &c)?);
                        diff = diff.max(check_difference_at(l, m, x, &c)?);
                        count += 1;
                    }
                }
            }
        }
    }
    Ok(Outcome {
        pass: rec < 1e-10 && diff < 1e-10,
        detail: format!("{count} lattice points, recurrence {rec:.2e}, difference {diff:.2e}"),
    })
}

fn orthonormality() -> Result<Outcome> {
    let c = ctx(1.5)?;
    let mut worst: f64 = 0.0;
    for m in 0..=3 {
        let g = orthonormality_matrix(6, m, &c, -60)?;
        for (i, row) in g.iter().enumerate() {
            for (j, v) in row.iter().enumerate() {
                worst = worst.max((v - if i == j { 1.0 } else { 0.0 }).abs());
            }
        }
    }
    Ok(Outcome { pass: worst < 1e-8, detail: format!("l, l' <= 6, m <= 3, n >= -60, max defect {worst:.2e}") })
}

fn completeness() -> Result<Outcome> {
    let c = ctx(1.5)?;
    let mut pass = true;
    let mut parts = Vec::new();
    for (form, name) in [(CompletenessForm::Tensor, "tensor"), (CompletenessForm::X3, "x3")] {
        for m in [0, 2] {
            // Pairs reaching eight levels deep still carry truncation error at l_max = 10.
            let pairs = completeness_pairs(form, m, 8);
            let d: Vec<f64> = [10, 20, 40]
                .iter()
                .map(|&l| completeness_check(form, m, &pairs, l, &c).map(|r| r.max_defect))
                .collect::<Result<_>>()?;
            let monotone = d[1] < d[0] && d[2] <= d[1] * (1.0 + 1e-9) + f64::EPSILON;
            pass &= pairs.len() >= 20 && d[2] < 1e-5 && monotone;
            parts.push(format!("{name} m={m} ({} pairs) {:.1e} -> {:.1e} -> {:.1e}", pairs.len(), d[0], d[1], d[2]));
        }
    }
    Ok(Outcome { pass, detail: parts.join("; ") })
}

const SETS: [RelationSet; 9] = [
    RelationSet::X,
    RelationSet::Radius,
    RelationSet::T,
    RelationSet::K,
    RelationSet::Module,
    RelationSet::Tau,
    RelationSet::Conj,
    RelationSet::OrbitalConstraint,
    RelationSet::TConstraints,
];

fn relation_families(c: &QContext, size: i64) -> Result<Vec<RepFamily>> {
    let w_tk = window_tk(size, size, 3)?;
    let w_t = window_1d("m_t", -size, 0, 3)?;
    Ok(vec![
        build_t_orb(&w_tk, c)?,
        build_joint(0, 1.0, 1, &w_tk, c)?,
        build_l_basis(0, r0_from_z0(1.0, c), size, 3, c)?,
        build_t_special(&w_t, c)?.merge(&build_x_over_r(1, &w_t, c)?)?,
        build_k_orbital(&window_1d("m_k", 0, size, 3)?, c)?,
    ])
}

fn relation_suite() -> Result<Outcome> {
    let (mut worst, mut checked, mut pass) = (0.0f64, 0, true);
    for q in [1.2, 1.5, 2.0] {
        let c = ctx(q)?;
        let fams = relation_families(&c, 45)?;
        let refs: Vec<&RepFamily> = fams.iter().collect();
        for set in SETS {
            // An empty set is an error, so every group is exercised.
            let r = verify_relations(&refs, set, 1e-10)?;
            pass &= r.pass;
            worst = worst.max(r.max_residual);
            checked += r.results.len();
        }
    }
    Ok(Outcome {
        pass,
        detail: format!("9 relation groups, {checked} relation instances, windows of 45, max residual {worst:.2e}"),
    })
}

fn spectra() -> Result<Outcome> {
    let (mut t2, mut x3, mut t2_levels, mut x3_levels, mut pass) = (0.0f64, 0.0f64, 0, 0, true);
    for q in [1.5, 2.0] {
        let c = ctx(q)?;
        for m in -3..=3 {
            let r = t2_spectrum(m, 60, 40, 30, &c)?;
            pass &= r.passes(1e-6);
            t2 = t2.max(r.max_rel_err);
            t2_levels += r.checked_levels;
        }
        for big_m in [0, 1] {
            for m in 0..=3 {
                let r = x3_l_spectrum(big_m, 1.0, m, 40, &c)?;
                pass &= r.passes(1e-6);
                x3 = x3.max(r.max_rel_err);
                x3_levels += r.checked_levels;
            }
        }
    }
    Ok(Outcome {
        pass,
        detail: format!("T2: {t2_levels} levels, max rel err {t2:.2e}; X3: {x3_levels} levels, max rel err {x3:.2e}"),
    })
}

fn coproduct_consistency() -> Result<Outcome> {
    let c = ctx(1.5)?;
    let t = build_t_special(&window_1d("m_t", -40, 0, 3)?, &c)?;
    let k = build_k_orbital(&window_1d("m_k", 0, 40, 3)?, &c)?;
    let beta = coproduct(&t, &k, CoproductVariant::Beta)?;
    let direct = build_t_orb(&window_tk(40, 40, 3)?, &c)?;
    let mut entry: f64 = 0.0;
    for key in ["T3", "T+", "T-", "tau"] {
        let scale = coproduct_term_scale(&t, &k, key)?;
        entry = entry.max(beta.op(key)?.matrix.max_rel_diff_scaled(&direct.op(key)?.matrix, &scale));
    }
    let tau_product = t.op("tau")?.matrix.kron(&k.op("tau")?.matrix);
    let group_like = beta.op("tau")?.matrix.max_rel_diff(&tau_product);
    let d_expected = c.lambda() * t.param("d").unwrap_or(f64::NAN) * k.param("d").unwrap_or(f64::NAN);
    let d_err = (beta.param("d").unwrap_or(f64::NAN) - d_expected).abs() / d_expected.abs();
    let diag = group_like_defect(&beta)?;
    Ok(Outcome {
        pass: entry < 1e-12 && group_like == 0.0 && d_err < 1e-12 && diag < 1e-12,
        detail: format!(
            "entrywise {entry:.2e}, tau vs tau1 x tau2 {group_like:.2e}, d vs lambda d1 d2 {d_err:.2e}, diagonal tau vs lambda d q^-4m {diag:.2e}"
        ),
    })
}

fn classical_limit() -> Result<Outcome> {
    let near = ctx(1.0 + 1e-4)?;
    let qnum = (1..=20).map(|k| k as f64 / 2.0).map(|a| (qnum_sym(a, &near) - a).abs() / a).fold(0.0f64, f64::max);
    let mut plm: f64 = 0.0;
    for l in 0..=8 {
        for m in 0..=l {
            plm = plm.max((p_lm(l, m, 1.0, &near)? - 1.0).abs());
        }
    }
    let mut ratios = Vec::new();
    for q in [1.0 + 1e-4, 1.0 + 2e-4] {
        let c = ctx(q)?;
        let joint = build_joint(0, 1.0, 1, &window_tk(45, 45, 3)?, &c)?;
        ratios.push(commutator_scale(&joint)? / c.lambda());
    }
    let linearity = (ratios[1] / ratios[0] - 1.0).abs();
    Ok(Outcome {
        pass: qnum < 1e-6 && plm < 1e-2 && linearity < 0.1,
        detail: format!(
            "|[a]-a|/a {qnum:.2e}, |P(1)-1| {plm:.2e}, commutator/lambda {:.6} and {:.6}, deviation from linearity {linearity:.2e}",
            ratios[0], ratios[1]
        ),
    })
}

fn main() -> ExitCode {
    if std::env::args().any(|a| a == "--list") {
        return ExitCode::SUCCESS;
    }
    let criteria: [Criterion; 8] = [
        ("golden closed forms", golden_table, Duration::from_secs(1)),
        ("recurrence and difference equation", recurrence_and_difference, Duration::from_secs(5)),
        ("orthonormality", orthonormality, Duration::from_secs(5)),
        ("completeness", completeness, Duration::from_secs(10)),
        ("relation suite", relation_suite, Duration::from_secs(30)),
        ("spectra", spectra, Duration::from_secs(30)),
        ("coproduct", coproduct_consistency, Duration::from_secs(30)),
        ("classical limit", classical_limit, Duration::from_secs(30)),
    ];
    let mut failed = 0;
    for (i, (name, f, budget)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = f();
        let elapsed = start.elapsed();
        let (pass, detail) = match outcome {
            Ok(o) => (o.pass && elapsed < *budget, o.detail),
            Err(e) => (false, format!("error: {e}")),
        };
        if !pass {
            failed += 1;
        }
        println!(
            "criterion {}: {} {name} ({:.2} s of {} s) {detail}",
            i + 1,
            if pass { "PASS" } else { "FAIL" },
            elapsed.as_secs_f64(),
            budget.as_secs()
        );
    }
    println!("acceptance: {} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
