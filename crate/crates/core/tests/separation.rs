use dirac_split::expr::Expr;
use dirac_split::fields::{Component, Momenta, Sampled};
use dirac_split::lattice::{ComplexField, Coupling, CsrMatrix, Grid};
use dirac_split::linalg::band_reduce::band_eigenvalues;
use dirac_split::linalg::dense::{csr_to_dense, hermitian_eigen};
use dirac_split::linalg::{lowest_eigenpairs, SubspaceOptions};
use dirac_split::potential::PotentialSpec;
use dirac_split::separation::*;
use dirac_split::{Branch, Error};
use num_complex::Complex64 as C64;
use proptest::prelude::*;

fn landau(h: f64) -> PotentialSpec {
    PotentialSpec::builtin("uniform_H_symmetric", &[h, 1.0]).unwrap()
}

fn max_entry(m: &CsrMatrix) -> f64 {
    (0..m.nrows).flat_map(|i| m.row(i).map(|(_, v)| v.norm()).collect::<Vec<_>>()).fold(0.0, f64::max)
}

#[test]
fn zero_potential_blocks_are_the_five_point_laplacian() {
    let g = Grid::transverse(-1.0, 1.0, 7).unwrap();
    let op = build_pauli_operator(&PotentialSpec::zero(1.0), &g, Branch::Dotted1, Coupling::Peierls).unwrap();
    let h = g.h_max();
    assert_eq!(max_entry(&op.upper.lin_comb(C64::new(1.0, 0.0), &op.lower, C64::new(-1.0, 0.0))), 0.0);
    for i in 0..g.len() {
        assert!((op.upper.get(i, i).re - 4.0 / (h * h)).abs() < 1e-9);
        for (j, v) in op.upper.row(i) {
            if j != i {
                assert!((v.re + 1.0 / (h * h)).abs() < 1e-9 && v.im == 0.0);
            }
        }
    }
}

#[test]
fn uniform_field_shifts_spin_blocks_by_qh() {
    let g = Grid::transverse(-3.0, 3.0, 9).unwrap();
    let op = build_pauli_operator(&landau(1.0), &g, Branch::Dotted1, Coupling::Peierls).unwrap();
    let one = C64::new(1.0, 0.0);
    let up = op.upper.lin_comb(one, &op.kinetic, -one).shift_diagonal(one);
    let down = op.lower.lin_comb(one, &op.kinetic, -one).shift_diagonal(-one);
    assert!(max_entry(&up) < 1e-12);
    assert!(max_entry(&down) < 1e-12);
}

/// ‖(L†L - upper) f‖ on a smooth probe, a pure truncation effect.
fn ladder_identity_defect(n: usize) -> (f64, f64) {
    let g = Grid::transverse(-6.0, 6.0, n).unwrap();
    let op = build_pauli_operator(&landau(1.0), &g, Branch::Dotted1, Coupling::Peierls).unwrap();
    let f = ComplexField::sample(&g, |x| C64::from_polar((-(x[1] * x[1] + x[2] * x[2]) / 2.0).exp() * (1.0 + 0.3 * x[2]), 0.7 * x[1]));
    let l = op.ladder().unwrap();
    let ld = l.dagger();
    let one = C64::new(1.0, 0.0);
    let a = ld.matvec(&l.matvec(&f.values));
    let b = l.matvec(&ld.matvec(&f.values));
    let ua = op.upper.matvec(&f.values);
    let lb = op.lower.matvec(&f.values);
    let d1 = ComplexField::from_values(&g, a).unwrap().lin_comb(one, &ComplexField::from_values(&g, ua).unwrap(), -one).unwrap();
    let d2 = ComplexField::from_values(&g, b).unwrap().lin_comb(one, &ComplexField::from_values(&g, lb).unwrap(), -one).unwrap();
    (d1.norm() / f.norm(), d2.norm() / f.norm())
}

#[test]
fn ladder_products_match_pauli_blocks_to_second_order() {
    let (a1, b1) = ladder_identity_defect(47);
    let (a2, b2) = ladder_identity_defect(95);
    assert!(a1 < 0.3 && b1 < 0.3, "{a1} {b1}");
    assert!((a1 / a2 - 4.0).abs() < 0.6, "ratio {}", a1 / a2);
    assert!((b1 / b2 - 4.0).abs() < 0.6, "ratio {}", b1 / b2);
}

#[test]
fn free_box_ground_state_is_doubly_degenerate() {
    let l = 10.0;
    let g = Grid::transverse(-0.5 * l, 0.5 * l, 64).unwrap();
    let op = build_pauli_operator(&PotentialSpec::zero(1.0), &g, Branch::Dotted1, Coupling::Peierls).unwrap();
    let modes = solve_transverse(&op, 2, 1.0, &SubspaceOptions::default()).unwrap();
    let want = 2.0 * std::f64::consts::PI.powi(2) / (l * l);
    for md in &modes {
        assert!((md.lambda2 - want).abs() < 0.02 * want, "{} vs {want}", md.lambda2);
    }
    assert_ne!(modes[0].block, modes[1].block);
    assert!((modes[0].lambda2 - modes[1].lambda2).abs() < 1e-10);
}

#[test]
fn dotted2_with_reversed_field_matches_dotted1() {
    let g = Grid::transverse(-4.0, 4.0, 20).unwrap();
    let m1 = build_pauli_operator(&landau(1.0), &g, Branch::Dotted1, Coupling::Peierls).unwrap();
    let m2 = build_pauli_operator(&landau(-1.0), &g, Branch::Dotted2, Coupling::Peierls).unwrap();
    let (v1, _) = hermitian_eigen(csr_to_dense(&m1.matrix()));
    let (v2, _) = hermitian_eigen(csr_to_dense(&m2.matrix()));
    let worst = v1.iter().zip(&v2).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    assert!(worst < 1e-9, "{worst}");
}

#[test]
fn dense_and_iterative_solvers_agree() {
    let g = Grid::transverse(-5.0, 5.0, 30).unwrap();
    let op = build_pauli_operator(&landau(1.0), &g, Branch::Dotted1, Coupling::Peierls).unwrap();
    let (dense, _) = hermitian_eigen(csr_to_dense(&op.upper));
    let it = lowest_eigenpairs(&op.upper, 5, op.lower_bound(), &SubspaceOptions::default()).unwrap();
    for (a, b) in dense.iter().zip(&it.values) {
        assert!((a - b).abs() < 1e-6, "{a} vs {b}");
    }
    let opts = SubspaceOptions::default();
    let d = solve_transverse_with(&op, 4, 1.0, &opts, SolverMethod::Dense).unwrap();
    let i = solve_transverse_with(&op, 4, 1.0, &opts, SolverMethod::Iterative).unwrap();
    for (a, b) in d.iter().zip(&i) {
        assert!((a.lambda2 - b.lambda2).abs() < 1e-6);
    }
    assert!("lanczos".parse::<SolverMethod>().is_err());
}

#[test]
fn landau_ground_level_is_not_negative_and_has_no_beta() {
    let g = Grid::transverse(-6.0, 6.0, 30).unwrap();
    let op = build_pauli_operator(&landau(1.0), &g, Branch::Dotted1, Coupling::Peierls).unwrap();
    let modes = solve_transverse(&op, 4, 1.0, &SubspaceOptions::default()).unwrap();
    let tol = 0.05;
    for md in &modes {
        assert!(md.lambda2 >= -tol, "{}", md.lambda2);
        assert!(!md.partnered);
        assert_eq!(md.beta.norm(), 0.0);
        let total = md.psi.norm_sqr() + md.beta.norm_sqr();
        assert!((total - 1.0).abs() < 1e-12);
    }
    assert!(matches!(solve_transverse(&op, 0, 1.0, &SubspaceOptions::default()), Err(Error::TooManyModes { .. })));
    assert!(matches!(
        solve_transverse(&op, 2 * g.len() + 1, 1.0, &SubspaceOptions::default()),
        Err(Error::TooManyModes { .. })
    ));
}

fn lowest_landau_gaussian(op: &PauliOperator) -> ComplexField {
    ComplexField::sample(&op.grid, |x| C64::from((-(x[1] * x[1] + x[2] * x[2]) / 4.0).exp()))
}

/// First excited Landau mode, found from the raised ground state.
fn excited_mode(n: usize, m: f64) -> (PauliOperator, TransverseMode) {
    let g = Grid::transverse(-8.0, 8.0, n).unwrap();
    let op = build_pauli_operator(&landau(1.0), &g, Branch::Dotted1, Coupling::Peierls).unwrap();
    let seed = landau_seed(&op, 1).unwrap();
    let mode = seeded_mode(&op, None, &seed, m, 1).unwrap();
    (op, mode)
}

#[test]
fn landau_seed_checks_field_sign_and_starts_from_the_gaussian() {
    let g = Grid::transverse(-4.0, 4.0, 9).unwrap();
    let op = build_pauli_operator(&landau(1.0), &g, Branch::Dotted1, Coupling::Peierls).unwrap();
    assert_eq!(landau_seed(&op, 0).unwrap(), lowest_landau_gaussian(&op));
    let op2 = build_pauli_operator(&landau(1.0), &g, Branch::Dotted2, Coupling::Peierls).unwrap();
    assert!(matches!(landau_seed(&op2, 0), Err(Error::IncompatibleParameters(_))));
    let op3 = build_pauli_operator(&landau(-1.0), &g, Branch::Dotted2, Coupling::Peierls).unwrap();
    assert!(landau_seed(&op3, 1).is_ok());
    let free = build_pauli_operator(&PotentialSpec::zero(1.0), &g, Branch::Dotted1, Coupling::Peierls).unwrap();
    assert!(landau_seed(&free, 0).is_err());
}

#[test]
fn first_excited_level_pairs_through_the_ladder() {
    let (op, coarse) = excited_mode(63, 1.0);
    let (op_f, fine) = excited_mode(127, 1.0);
    assert!(coarse.partnered && fine.partnered);
    assert!((fine.lambda2 - 2.0).abs() < 0.02, "{}", fine.lambda2);
    let (a1, b1) = ladder_residuals(&op, &coarse, 1.0).unwrap();
    let (a2, b2) = ladder_residuals(&op_f, &fine, 1.0).unwrap();
    // β is built as Lψ/m, so only the second relation carries truncation error
    assert!(a1 < 1e-12 && a2 < 1e-12);
    assert!(b1 < 5.0 * truncation_estimate(&op, &coarse), "{b1}");
    assert!(b1 / b2 > 3.0, "{b1} {b2}");
}

#[test]
fn beta_scales_inversely_with_mass() {
    let (op, one) = excited_mode(63, 1.0);
    let (_, two) = excited_mode(63, 2.0);
    let ratio = one.beta.norm() / one.psi.norm() / (two.beta.norm() / two.psi.norm());
    assert!((ratio - 2.0).abs() < 1e-9, "{ratio}");
    let (a1, b1) = ladder_residuals(&op, &one, 1.0).unwrap();
    let (a2, b2) = ladder_residuals(&op, &two, 2.0).unwrap();
    assert!((a1 - a2).abs() < 1e-12 && (b1 - b2).abs() < 1e-9 * b1.max(1.0), "{a1} {a2} {b1} {b2}");
    assert!(matches!(ladder_residuals(&op, &one, 0.0), Err(Error::ZeroMass(_))));
}

#[test]
fn effective_mass_examples() {
    assert_eq!(effective_mass(1.0, 0.0).unwrap(), 1.0);
    assert_eq!(effective_mass(3.0, 16.0).unwrap(), 5.0);
    assert!((effective_mass(1.0, 2.0).unwrap() - 1.732_050_8).abs() < 1e-7);
    assert!(matches!(effective_mass(1.0, -1.0), Err(Error::TachyonicMode(_))));
    assert!(matches!(effective_mass(1.0, -2.0), Err(Error::TachyonicMode(_))));
}

#[test]
fn alpha_rescaling_examples() {
    let g = Grid::transverse(-1.0, 1.0, 3).unwrap();
    let f = Sampled(ComplexField::sample(&g, |x| C64::new(x[1], x[2] + 0.5)));
    assert_eq!(rescale_alpha(&f, 1.0, 0.0).unwrap().0, f.0);
    let two = rescale_alpha(&f, 1.0, 3.0).unwrap();
    for (a, b) in two.0.values.iter().zip(&f.0.values) {
        assert!((a - 2.0 * b).norm() < 1e-15);
    }
    assert!(matches!(rescale_alpha(&f, 0.0, 1.0), Err(Error::ZeroMass(_))));
}

#[test]
fn plane_wave_longitudinal_examples() {
    let free = longitudinal_momenta(&PotentialSpec::zero(1.0));
    let rest = solve_longitudinal_planewave(1.0, 0.0, Branch::Dotted1, true).unwrap();
    assert_eq!(rest.momentum(), Some((1.0, 0.0)));
    assert_eq!(rest.alpha_tilde.amp, C64::new(1.0, 0.0));
    let moving = solve_longitudinal_planewave(1.0, 0.75, Branch::Dotted1, true).unwrap();
    assert!((moving.energy() - 1.25).abs() < 1e-15);
    assert!((moving.alpha_tilde.amp.re - 2.0).abs() < 1e-15);
    let anti = solve_longitudinal_planewave(1.3, 0.4, Branch::Dotted2, false).unwrap();
    assert!(anti.energy() < 0.0);
    for sol in [rest, moving, anti] {
        let (r1, r2) = sol.residuals(&free).unwrap();
        assert!(r1 <= 1e-12 && r2 <= 1e-12, "{r1} {r2}");
        let (p0, p3) = sol.momentum().unwrap();
        assert!((p0 * p0 - p3 * p3 - sol.eff_mass.powi(2)).abs() < 1e-12);
    }
}

fn well(depth: f64) -> PotentialSpec {
    let mut p = PotentialSpec::zero(1.0);
    p.a[0] = Expr::coord(3).powi(2).neg().exp().scale(-depth);
    p
}

#[test]
fn stationary_free_modes_match_box_momenta() {
    let l = 20.0;
    let g = Grid::along_x3(-0.5 * l, 0.5 * l, 512).unwrap();
    let spec = solve_longitudinal_stationary(&PotentialSpec::zero(1.0), 1.0, &g, Branch::Dotted1, 4).unwrap();
    assert!(!spec.spectral_pollution);
    for (k, sol) in spec.modes.iter().enumerate() {
        let e = sol.energy();
        let want = ((k + 1) as f64 * std::f64::consts::PI / l).powi(2);
        assert!((e * e - 1.0 - want).abs() < 0.02 * want, "mode {k}: {} vs {want}", e * e - 1.0);
    }
}

#[test]
fn stationary_constant_potential_shifts_energies() {
    let g = Grid::along_x3(-5.0, 5.0, 200).unwrap();
    let base = solve_longitudinal_stationary(&PotentialSpec::zero(0.7), 1.2, &g, Branch::Dotted1, 3).unwrap();
    let mut p = PotentialSpec::zero(0.7);
    p.a[0] = Expr::constant(0.5);
    let shifted = solve_longitudinal_stationary(&p, 1.2, &g, Branch::Dotted1, 3).unwrap();
    for (a, b) in base.modes.iter().zip(&shifted.modes) {
        assert!((b.energy() - a.energy() - 0.7 * 0.5).abs() < 1e-11);
    }
}

#[test]
fn stationary_ground_energy_drops_with_well_depth() {
    let g = Grid::along_x3(-10.0, 10.0, 400).unwrap();
    let e: Vec<f64> = [0.2, 0.5, 0.9]
        .iter()
        .map(|&d| solve_longitudinal_stationary(&well(d), 1.0, &g, Branch::Dotted1, 1).unwrap().modes[0].energy())
        .collect();
    assert!(e[0] > e[1] && e[1] > e[2], "{e:?}");
    assert!(e[2] < 1.0);
}

#[test]
fn stationary_profiles_solve_the_first_order_pair() {
    let run = |n: usize| {
        let g = Grid::along_x3(-10.0, 10.0, n).unwrap();
        let p = well(0.6);
        let spec = solve_longitudinal_stationary(&p, 1.0, &g, Branch::Dotted1, 1).unwrap();
        let (a, b) = spec.modes[0].residuals(&longitudinal_momenta(&p)).unwrap();
        a.max(b)
    };
    let (coarse, fine) = (run(199), run(399));
    assert!(coarse < 1e-2, "{coarse}");
    assert!(coarse / fine > 3.0, "{coarse} {fine}");
}

#[test]
fn stationary_rejects_time_dependent_potentials() {
    let g = Grid::along_x3(-1.0, 1.0, 10).unwrap();
    let p = PotentialSpec::builtin("uniform_E", &[1.0, 1.0]).unwrap();
    assert!(matches!(
        solve_longitudinal_stationary(&p, 1.0, &g, Branch::Dotted1, 1),
        Err(Error::Unsupported(_))
    ));
}

#[test]
fn ground_mode_reconstruction_has_empty_xi2() {
    let g = Grid::transverse(-6.0, 6.0, 24).unwrap();
    let op = build_pauli_operator(&landau(1.0), &g, Branch::Dotted1, Coupling::Peierls).unwrap();
    let mode = solve_transverse(&op, 1, 1.0, &SubspaceOptions::default()).unwrap().remove(0);
    let mt = effective_mass(1.0, mode.lambda2).unwrap();
    let long = solve_longitudinal_planewave(mt, 0.0, Branch::Dotted1, true).unwrap();
    let sol = SeparatedSolution::new(mode, long, 1.0, 1.0).unwrap();
    let psi = reconstruct(Some(&sol), None, &g).unwrap();
    assert_eq!(psi.c[1].norm(), 0.0);
    assert_eq!(psi.c[3].norm(), 0.0);
    assert!(psi.c[2].norm() > 0.0);
    assert!(sol.dispersion_defect().unwrap().abs() < 1e-12);

    let zero = reconstruct(None, None, &g).unwrap();
    assert_eq!(zero.norm(), 0.0);
    assert!(matches!(reconstruct(None, Some(&sol), &g), Err(Error::IncompatibleParameters(_))));
}

#[test]
fn separated_solution_checks_effective_mass() {
    let g = Grid::transverse(-6.0, 6.0, 16).unwrap();
    let op = build_pauli_operator(&landau(1.0), &g, Branch::Dotted1, Coupling::Peierls).unwrap();
    let mode = solve_transverse(&op, 1, 1.0, &SubspaceOptions::default()).unwrap().remove(0);
    let long = solve_longitudinal_planewave(2.0, 0.0, Branch::Dotted1, true).unwrap();
    assert!(matches!(SeparatedSolution::new(mode, long, 1.0, 1.0), Err(Error::IncompatibleParameters(_))));
}

#[test]
fn level_search_matches_dense_clusters() {
    let g = Grid::transverse(-8.0, 8.0, 48).unwrap();
    let op = build_pauli_operator(&landau(1.0), &g, Branch::Dotted1, Coupling::Peierls).unwrap();
    let vals = band_eigenvalues(&op.upper).unwrap();
    let dense = cluster_spectrum(&vals, 1e-3, 6);
    let search = LevelSearch { step: 0.5, resolution: 2e-3, min_multiplicity: 6 };
    let found = distinct_levels(&op.upper, op.lower_bound(), 5.0, 2, &search).unwrap();
    assert_eq!(found.len(), 2);
    for (f, d) in found.iter().zip(&dense) {
        assert!((f.value - d.value).abs() <= search.resolution, "{f:?} {d:?}");
    }
}

proptest! {
    #[test]
    fn rescale_alpha_round_trips(m in 0.1f64..5.0, l2 in -0.09f64..20.0, re in -3.0f64..3.0, im in -3.0f64..3.0) {
        let g = Grid::transverse(-1.0, 1.0, 2).unwrap();
        let f = Sampled(ComplexField::from_values(&g, vec![C64::new(re, im); 4]).unwrap());
        let back = unscale_alpha(&rescale_alpha(&f, m, l2).unwrap(), m, l2).unwrap();
        for (a, b) in back.0.values.iter().zip(&f.0.values) {
            prop_assert!((a - b).norm() <= 1e-15 * (1.0 + b.norm()) * 4.0);
        }
    }

    #[test]
    fn plane_wave_dispersion_holds(m in 0.1f64..4.0, l2 in 0.0f64..10.0, p3 in -5.0f64..5.0, positive in any::<bool>(), second in any::<bool>()) {
        let branch = if second { Branch::Dotted2 } else { Branch::Dotted1 };
        let mt = effective_mass(m, l2).unwrap();
        let sol = solve_longitudinal_planewave(mt, p3, branch, positive).unwrap();
        let (p0, q3) = sol.momentum().unwrap();
        prop_assert!((p0 * p0 - q3 * q3 - m * m - l2).abs() <= 1e-10 * (1.0 + p0 * p0));
        let (r1, r2) = sol.residuals(&Momenta::new(PotentialSpec::zero(1.0), Coupling::Peierls)).unwrap();
        prop_assert!(r1 <= 1e-12 && r2 <= 1e-12);
    }
}

fn constant_momenta(q: f64) -> Momenta {
    let a = [Expr::constant(0.4), Expr::constant(0.25), Expr::constant(-0.6), Expr::constant(0.15)];
    Momenta::new(PotentialSpec::new(q, a), Coupling::Peierls)
}

#[test]
fn closed_form_separated_plane_waves_solve_dirac() {
    use dirac_split::splitting::{dirac_residual, split, PiSpinorMatrix};
    let pim = PiSpinorMatrix::new(constant_momenta(0.7));
    for (branch, positive) in [(Branch::Dotted1, true), (Branch::Dotted2, true), (Branch::Dotted1, false)] {
        let (l2, psi) = separated_plane_wave(1.2, [0.3, -0.8], 0.5, branch, positive, &pim.momenta).unwrap();
        assert!(l2 > 0.0);
        assert!(dirac_residual(&psi, &pim, 1.2).unwrap() < 1e-13);
        let pair = split(&psi, &pim, 1.2).unwrap();
        let other = match branch {
            Branch::Dotted1 => &pair.psi2,
            Branch::Dotted2 => &pair.psi1,
        };
        let xi_other = (other.c[0].norm_sqr() + other.c[1].norm_sqr()).sqrt();
        assert!(xi_other < 1e-13 * psi.norm());
    }
    let uniform = Momenta::new(landau(1.0), Coupling::Peierls);
    assert!(separated_plane_wave(1.0, [0.0, 0.0], 0.0, Branch::Dotted1, true, &uniform).is_err());
}

/// Dotted1 ground mode (λ² ≈ 0) plus a dotted2 mode with λ² ≈ 2 in one Ψ.
fn two_branch_residual(n: usize) -> (f64, f64, f64) {
    use dirac_split::splitting::{dirac_residual, PiSpinorMatrix};
    let g = Grid::transverse(-8.0, 8.0, n).unwrap();
    let p = landau(1.0);
    let op1 = build_pauli_operator(&p, &g, Branch::Dotted1, Coupling::Peierls).unwrap();
    let op2 = build_pauli_operator(&p, &g, Branch::Dotted2, Coupling::Peierls).unwrap();
    let m1 = seeded_mode(&op1, None, &landau_seed(&op1, 0).unwrap(), 1.0, 1).unwrap();
    let m2 = seeded_mode(&op2, None, &lowest_landau_gaussian(&op2), 1.0, 1).unwrap();
    let (l1, l2) = (m1.lambda2, m2.lambda2);
    let long = |md: &TransverseMode, p3: f64, b: Branch| {
        solve_longitudinal_planewave(effective_mass(1.0, md.lambda2).unwrap(), p3, b, true).unwrap()
    };
    let s1 = SeparatedSolution::new(m1.clone(), long(&m1, 0.3, Branch::Dotted1), 1.0, 1.0).unwrap();
    let s2 = SeparatedSolution::new(m2.clone(), long(&m2, -0.4, Branch::Dotted2), 1.0, 1.0).unwrap();
    let psi = reconstruct(Some(&s1), Some(&s2), &g).unwrap();
    let pim = PiSpinorMatrix::new(Momenta::new(p, Coupling::Peierls));
    (l1, l2, dirac_residual(&psi, &pim, 1.0).unwrap())
}

#[test]
fn branches_with_different_lambda_recombine_into_a_solution() {
    let (l1, l2, coarse) = two_branch_residual(63);
    let (_, _, fine) = two_branch_residual(127);
    assert!(l1.abs() < 0.05 && (l2 - 2.0).abs() < 0.05, "{l1} {l2}");
    assert!(coarse < 0.05, "{coarse}");
    assert!(coarse / fine > 3.0, "{coarse} {fine}");
}
