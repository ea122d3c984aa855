use dirac_split::expr::Expr;
use dirac_split::lattice::{Coupling, Grid};
use dirac_split::potential::*;
use dirac_split::Error;
use proptest::prelude::*;

fn grid4(n: usize) -> Grid {
    let long = Grid::longitudinal((-2.0, 2.0, n), (-2.0, 2.0, n)).unwrap();
    sample_grid(&long, &Grid::transverse(-2.0, 2.0, n).unwrap()).unwrap()
}

#[test]
fn field_strength_examples() {
    let z = PotentialSpec::builtin("zero", &[1.0]).unwrap().field_strengths();
    assert_eq!(z.e.as_constant(), Some(0.0));
    assert_eq!(z.h.as_constant(), Some(0.0));
    let s = PotentialSpec::builtin("uniform_H_symmetric", &[1.0, 1.0]).unwrap().field_strengths();
    assert_eq!(s.h.as_constant(), Some(1.0));
    let l = PotentialSpec::builtin("uniform_H_landau", &[3.0, 1.0]).unwrap().field_strengths();
    assert_eq!(l.h.as_constant(), Some(3.0));
    let e = PotentialSpec::builtin("uniform_E", &[2.0, 1.0]).unwrap().field_strengths();
    assert_eq!(e.e.as_constant(), Some(2.0));
    let a0 = PotentialSpec::builtin("static_A0", &[0.0, 1.0, 1.0]).unwrap().field_strengths();
    assert_eq!(a0.e.as_constant(), Some(-1.0));
}

#[test]
fn builtin_errors() {
    assert!(matches!(PotentialSpec::builtin("uniform_B", &[1.0, 1.0]), Err(Error::UnknownBuiltin(_))));
    assert!(matches!(PotentialSpec::builtin("uniform_H_landau", &[1.0]), Err(Error::ArityMismatch { .. })));
    assert!(matches!(PotentialSpec::builtin("zero", &[]), Err(Error::ArityMismatch { .. })));
}

#[test]
fn every_builtin_is_longitudinal() {
    let params: [&[f64]; 5] = [&[1.0], &[1.0, 1.0], &[1.0, 1.0], &[1.0, 1.0], &[0.1, 0.0, 0.3, 1.0]];
    for (name, p) in BUILTINS.iter().zip(params) {
        let spec = PotentialSpec::builtin(name, p).unwrap();
        assert!(spec.validate_longitudinal().passed(), "{name}");
        spec.require_longitudinal().unwrap();
    }
}

#[test]
fn structural_validation() {
    let mut bad = PotentialSpec::zero(1.0);
    bad.a[1] = Expr::coord(3);
    let report = bad.validate_longitudinal();
    assert!(!report.passed());
    let failures: Vec<_> = report.failures().collect();
    assert_eq!(failures.len(), 1);
    assert_eq!(failures[0].component, 1);
    assert_eq!(failures[0].forbidden, vec![3]);
    assert!(matches!(bad.require_longitudinal(), Err(Error::InvalidPotential(_))));

    let mut mixed = PotentialSpec::zero(1.0);
    mixed.a[0] = Expr::coord(0).mul(Expr::coord(3));
    assert!(mixed.validate_longitudinal().passed());
}

#[test]
fn commutator_vanishes_for_free_field() {
    let g = grid4(8);
    let probes = standard_probes(&g, 8, 1);
    let r = commutator_residual(&PotentialSpec::zero(1.0), &probes, &g, Coupling::Peierls).unwrap();
    assert!(r <= 1e-10, "{r}");
}

#[test]
fn commutator_vanishes_for_crossed_uniform_fields() {
    let g = grid4(16);
    let probes = standard_probes(&g, 8, 2);
    let p = PotentialSpec::builtin("uniform_H_symmetric", &[1.0, 1.0])
        .unwrap()
        .combine(&PotentialSpec::builtin("uniform_E", &[0.7, 1.0]).unwrap())
        .unwrap();
    for coupling in [Coupling::Peierls, Coupling::Minimal] {
        let r = commutator_residual(&p, &probes, &g, coupling).unwrap();
        assert!(r <= 1e-8, "{coupling:?}: {r}");
    }
}

#[test]
fn commutator_detects_transverse_x3_dependence() {
    let g = grid4(12);
    let probes = standard_probes(&g, 8, 3);
    let mut bad = PotentialSpec::zero(1.0);
    bad.a[1] = Expr::coord(3);
    let r = commutator_residual(&bad, &probes, &g, Coupling::Peierls).unwrap();
    assert!(r > 0.1, "{r}");
    assert!(matches!(commutator_residual(&bad, &[], &g, Coupling::Peierls), Err(Error::EmptyProbeSet)));
}

#[test]
fn combine_requires_equal_charges() {
    let a = PotentialSpec::zero(1.0);
    let b = PotentialSpec::zero(2.0);
    assert!(matches!(a.combine(&b), Err(Error::IncompatibleParameters(_))));
}

#[test]
fn reflection_flips_a3_and_mirrors_arguments() {
    let mut p = PotentialSpec::zero(1.0);
    p.a[0] = Expr::coord(3).powi(2).add(Expr::coord(3));
    p.a[3] = Expr::coord(0).mul(Expr::coord(3)).add(Expr::constant(1.0));
    let r = p.reflected_x3();
    let x = [0.4, 0.0, 0.0, 0.9];
    let xm = [0.4, 0.0, 0.0, -0.9];
    assert!((r.a[0].eval(&x) - p.a[0].eval(&xm)).abs() < 1e-15);
    assert!((r.a[3].eval(&x) + p.a[3].eval(&xm)).abs() < 1e-15);
}

fn leaf() -> impl Strategy<Value = Expr> {
    prop_oneof![(-2.0f64..2.0).prop_map(Expr::constant), (0usize..4).prop_map(Expr::coord)]
}

fn expr() -> impl Strategy<Value = Expr> {
    leaf().prop_recursive(4, 24, 3, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| a.add(b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| a.mul(b)),
            (inner.clone(), 0i32..4).prop_map(|(a, n)| a.powi(n)),
            inner.clone().prop_map(Expr::sin),
            inner.clone().prop_map(Expr::cos),
            inner.prop_map(|a| a.scale(0.3).exp()),
        ]
    })
}

fn point() -> impl Strategy<Value = [f64; 4]> {
    prop::array::uniform4(-1.5f64..1.5)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn derivative_matches_central_difference(e in expr(), x in point(), mu in 0usize..4) {
        let h = 1e-5;
        let mut xp = x;
        let mut xm = x;
        xp[mu] += h;
        xm[mu] -= h;
        let fd = (e.eval(&xp) - e.eval(&xm)) / (2.0 * h);
        let d = e.derivative(mu).eval(&x);
        prop_assume!(fd.is_finite() && d.is_finite() && d.abs() < 1e6);
        prop_assert!((fd - d).abs() <= 1e-6f64.max(1e-6 * d.abs()), "{e}: {d} vs {fd}");
    }

    #[test]
    fn printed_expressions_parse_back(e in expr(), x in point()) {
        let back = Expr::parse(&e.to_string()).unwrap();
        let (a, b) = (e.eval(&x), back.eval(&x));
        prop_assume!(a.is_finite() && a.abs() < 1e8);
        prop_assert!((a - b).abs() <= 1e-12 * (1.0 + a.abs()), "{e} -> {back}");
    }

    #[test]
    fn field_strengths_are_linear(h1 in -3.0f64..3.0, h2 in -3.0f64..3.0, e1 in -3.0f64..3.0, c in -2.0f64..2.0, x in point()) {
        let a = PotentialSpec::builtin("uniform_H_symmetric", &[h1, 1.0]).unwrap()
            .combine(&PotentialSpec::builtin("static_A0", &[0.0, e1, c, 1.0]).unwrap()).unwrap();
        let b = PotentialSpec::builtin("uniform_H_landau", &[h2, 1.0]).unwrap();
        let sum = a.combine(&b).unwrap().field_strengths();
        let (fa, fb) = (a.field_strengths(), b.field_strengths());
        prop_assert!((sum.e.eval(&x) - fa.e.eval(&x) - fb.e.eval(&x)).abs() <= 1e-12);
        prop_assert!((sum.h.eval(&x) - fa.h.eval(&x) - fb.h.eval(&x)).abs() <= 1e-12);
        prop_assert!((sum.h.eval(&x) - h1 - h2).abs() <= 1e-12);
    }
}
