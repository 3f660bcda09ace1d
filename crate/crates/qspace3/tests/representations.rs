use proptest::prelude::*;

use qspace3::repspace::{
    add_spin, build_joint, build_k_orbital, build_l_basis, build_t_generic, build_t_orb, build_t_special, build_x_over_r,
    casimir, commutator_scale, coproduct, group_like_defect, l_operators, r0_from_z0, relations_for, verify_relations, window_1d,
    window_tk, z0_from_r0, CasimirMode, CoproductVariant, FamilyKind, RelationSet, RepFamily,
};
use qspace3::QContext;

fn ctx(q: f64) -> QContext {
    QContext::new(q).unwrap()
}

fn families(c: &QContext, size: i64) -> Vec<RepFamily> {
    let w = window_tk(size, size, 3).unwrap();
    let w_t = window_1d("m_t", -size, 0, 3).unwrap();
    vec![
        build_t_orb(&w, c).unwrap(),
        build_joint(1, 0.7, -1, &w, c).unwrap(),
        build_l_basis(0, r0_from_z0(1.0, c), size, 3, c).unwrap(),
        build_t_special(&w_t, c).unwrap().merge(&build_x_over_r(-1, &w_t, c).unwrap()).unwrap(),
        build_k_orbital(&window_1d("m_k", 0, size, 3).unwrap(), c).unwrap(),
    ]
}

#[test]
fn every_relation_group_applies_somewhere() {
    let c = ctx(1.5);
    let fams = families(&c, 12);
    for set in [
        RelationSet::X,
        RelationSet::Radius,
        RelationSet::T,
        RelationSet::K,
        RelationSet::Module,
        RelationSet::Tau,
        RelationSet::Conj,
        RelationSet::OrbitalConstraint,
        RelationSet::TConstraints,
    ] {
        assert!(fams.iter().any(|f| !relations_for(f, set).is_empty()), "{set:?}");
    }
    assert_eq!(RelationSet::parse("torb").unwrap(), RelationSet::T);
    assert!(RelationSet::parse("nope").is_err());
}

#[test]
fn orbital_constraint_holds_on_the_joint_family() {
    let c = ctx(2.0);
    let joint = build_joint(0, 1.0, 1, &window_tk(20, 20, 3).unwrap(), &c).unwrap();
    let r = verify_relations(&[&joint], RelationSet::OrbitalConstraint, 1e-10).unwrap();
    assert!(r.pass && !r.results.is_empty());
    assert_eq!(l_operators(&joint).unwrap().len(), 3);
}

#[test]
fn empty_selection_is_an_error() {
    let c = ctx(1.5);
    let k = build_k_orbital(&window_1d("m_k", 0, 10, 3).unwrap(), &c).unwrap();
    assert!(verify_relations(&[&k], RelationSet::OrbitalConstraint, 1e-10).is_err());
}

#[test]
fn casimir_is_fixed_on_t_special() {
    let c = ctx(1.5);
    let t = build_t_special(&window_1d("m_t", -20, 0, 3).unwrap(), &c).unwrap();
    assert!(casimir(&t, CasimirMode::Matrix).is_err());
    let s = casimir(&t, CasimirMode::Scalar).unwrap();
    let want = -(1.0 + 1.5 * 1.5) / c.lambda().powi(2);
    assert!(s.diagonal().iter().all(|v| (v - want).abs() <= 1e-12 * want.abs()));
}

#[test]
fn standard_coproduct_needs_positive_tau() {
    let c = ctx(1.5);
    let t = build_t_special(&window_1d("m_t", -10, 0, 3).unwrap(), &c).unwrap();
    let k = build_k_orbital(&window_1d("m_k", 0, 10, 3).unwrap(), &c).unwrap();
    assert!(coproduct(&t, &k, CoproductVariant::Standard).is_err());
    assert_eq!(coproduct(&t, &k, CoproductVariant::Beta).unwrap().dim(), t.dim() * k.dim());
}

#[test]
fn spin_half_addition() {
    let c = ctx(1.5);
    let orb = build_t_orb(&window_tk(12, 12, 3).unwrap(), &c).unwrap();
    let spin = build_t_generic(1.0 / c.lambda(), 0.5, &window_1d("dm", -1, 0, 2).unwrap(), &c).unwrap();
    assert_eq!(spin.dim(), 2);
    let total = add_spin(&orb, &spin).unwrap();
    assert_eq!(total.kind, FamilyKind::SpinAdded);
    assert_eq!(total.param("spin"), Some(0.5));
    assert!(group_like_defect(&total).unwrap() < 1e-12);
    let r = verify_relations(&[&total], RelationSet::T, 1e-10).unwrap();
    assert!(r.pass, "{}", r.max_residual);
    // An infinite-dimensional T representation is not a spin.
    let inf = build_t_generic(-1.0, 0.0, &window_1d("dm", -8, 0, 2).unwrap(), &c).unwrap();
    assert!(add_spin(&orb, &inf).is_err());
}

#[test]
fn report_serialises() {
    let c = ctx(1.5);
    let t = build_t_orb(&window_tk(10, 10, 3).unwrap(), &c).unwrap();
    let r = verify_relations(&[&t], RelationSet::T, 1e-10).unwrap();
    let j = r.to_json();
    assert_eq!(j["schema"], "qspace3/1");
    assert_eq!(j["results"].as_array().unwrap().len(), r.results.len());
}

#[test]
fn radius_parameters_round_trip() {
    let c = ctx(1.7);
    for z0 in [0.3, 1.0, 2.5] {
        assert!((z0_from_r0(r0_from_z0(z0, &c), &c) - z0).abs() < 1e-15);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn all_relations_hold_for_random_q(q in 1.05f64..3.0) {
        let c = ctx(q);
        let fams = families(&c, 12);
        let refs: Vec<&RepFamily> = fams.iter().collect();
        let r = verify_relations(&refs, RelationSet::All, 1e-10).unwrap();
        prop_assert!(r.pass, "q = {q}: max residual {}", r.max_residual);
    }

    #[test]
    fn operators_respect_their_bands(q in 1.05f64..3.0) {
        let c = ctx(q);
        for f in families(&c, 10) {
            for (name, op) in &f.ops {
                prop_assert_eq!(op.band_violations(), 0, "{:?} {}", f.kind, name);
            }
        }
    }

    #[test]
    fn tau_is_group_like(q in 1.05f64..3.0, size in 4i64..12) {
        let c = ctx(q);
        let t = build_t_special(&window_1d("m_t", -size, 0, 3).unwrap(), &c).unwrap();
        let k = build_k_orbital(&window_1d("m_k", 0, size, 3).unwrap(), &c).unwrap();
        let beta = coproduct(&t, &k, CoproductVariant::Beta).unwrap();
        let product = t.op("tau").unwrap().matrix.kron(&k.op("tau").unwrap().matrix);
        prop_assert_eq!(beta.op("tau").unwrap().matrix.max_rel_diff(&product), 0.0);
        prop_assert!(group_like_defect(&beta).unwrap() < 1e-12);
        let d = c.lambda() * t.param("d").unwrap() * k.param("d").unwrap();
        prop_assert!((beta.param("d").unwrap() - d).abs() <= 1e-12 * d.abs());
    }

    #[test]
    fn commutator_tracks_lambda(q in 1.0001f64..3.0) {
        let c = ctx(q);
        let joint = build_joint(0, 1.0, 1, &window_tk(10, 10, 3).unwrap(), &c).unwrap();
        let s = commutator_scale(&joint).unwrap();
        prop_assert!((s / c.lambda() - 1.0).abs() < 1e-9, "{s} vs {}", c.lambda());
    }
}
