use dirac_split::clifford::{ProjectorId, C64};
use dirac_split::fields::{Component, Momenta, PlaneWave, Separable};
use dirac_split::lattice::Grid;
use dirac_split::linalg::SubspaceOptions;
use dirac_split::potential::{commutator_residual, standard_probes, PotentialSpec};
use dirac_split::separation::{
    build_pauli_operator, distinct_levels, effective_mass, ladder_residuals, landau_seed, merge_levels, reconstruct,
    seeded_mode, separated_plane_wave, solve_longitudinal_planewave, solve_transverse_with, truncation_estimate,
    LevelSearch, PauliOperator, SeparatedSolution, TransverseMode,
};
use dirac_split::splitting::{
    dirac_residual, identity_residuals, on_shell_momentum, plane_wave_solution, recombine, second_order_residual,
    split, subequation_residual, BispinorField, PiSpinorMatrix,
};
use dirac_split::Branch;

use crate::config::{EnergySign, RunConfig, SolutionKind, TransverseChoice};
use crate::report::{fmt_num, spectrum_csv, ConvergenceRow, LevelRow, Report, SpectrumRow};
use crate::CliError;

/// Extra files produced next to report.json.
pub type Files = Vec<(&'static str, String)>;

fn momenta(cfg: &RunConfig, p: &PotentialSpec) -> Result<PiSpinorMatrix, CliError> {
    Ok(PiSpinorMatrix::new(Momenta::new(p.clone(), cfg.coupling()?)))
}

fn subspace(cfg: &RunConfig) -> SubspaceOptions {
    SubspaceOptions { tol: cfg.solver.tolerance, max_iter: cfg.solver.max_iter, seed: cfg.solver.seed, block: None }
}

const COMPONENT_NAMES: [&str; 4] = ["A0", "A1", "A2", "A3"];

/// Structural validation, field strengths and the commutator residual.
/// Returns an error naming the failing components when the check fails.
fn run_check(cfg: &RunConfig, report: &mut Report) -> Result<(), CliError> {
    let p = cfg.potential()?;
    let fs = p.field_strengths();
    report.quantity("E", fs.e.to_string());
    report.quantity("H", fs.h.to_string());
    let validation = p.validate_longitudinal();
    let failures: Vec<String> = validation
        .failures()
        .map(|c| {
            let coords: Vec<String> = c.forbidden.iter().map(|mu| format!("x{mu}")).collect();
            format!("{} depends on {}", COMPONENT_NAMES[c.component], coords.join(", "))
        })
        .collect();
    report.quantity("structural_pass", validation.passed());
    report.quantity("failing_components", failures.clone());
    let grid = cfg.sample_grid()?;
    let probes = standard_probes(&grid, cfg.check.probes, cfg.check.seed);
    let r = commutator_residual(&p, &probes, &grid, cfg.coupling()?)?;
    report.residual("commutator", r);
    if !failures.is_empty() {
        return Err(CliError::Validation(format!("potential is not longitudinal: {}", failures.join("; "))));
    }
    if !(r <= cfg.check.tolerance) {
        return Err(CliError::Validation(format!(
            "commutator residual {} exceeds {}",
            fmt_num(r),
            fmt_num(cfg.check.tolerance)
        )));
    }
    Ok(())
}

pub fn check(cfg: &RunConfig, report: &mut Report) -> Result<Files, CliError> {
    run_check(cfg, report)?;
    Ok(Vec::new())
}

fn precheck(cfg: &RunConfig, skip: bool, report: &mut Report) -> Result<(), CliError> {
    if skip {
        report.quantity("check_skipped", true);
        return Ok(());
    }
    run_check(cfg, report)
}

fn operator(cfg: &RunConfig, branch: Branch, grid: &Grid) -> Result<PauliOperator, CliError> {
    Ok(build_pauli_operator(&cfg.potential()?, grid, branch, cfg.coupling()?)?)
}

pub fn spectrum(cfg: &RunConfig, branch: Branch, skip: bool, report: &mut Report) -> Result<Files, CliError> {
    precheck(cfg, skip, report)?;
    report.branch = Some(branch.label().into());
    let grid = cfg.transverse_grid()?;
    let op = operator(cfg, branch, &grid)?;
    report.quantity("h", grid.h_max());
    let modes = solve_transverse_with(&op, cfg.solver.modes, cfg.m, &subspace(cfg), cfg.solver_method()?)?;
    for (i, md) in modes.iter().enumerate() {
        report.spectrum.push(SpectrumRow {
            branch: branch.label().into(),
            index: i,
            lambda2: md.lambda2,
            eff_mass: effective_mass(cfg.m, md.lambda2)?,
            eigen_residual: md.eigen_residual,
        });
    }
    if cfg.solver.levels > 0 {
        let s = &cfg.solver;
        let search = LevelSearch {
            step: s.level_step,
            resolution: s.level_resolution,
            min_multiplicity: s.level_min_multiplicity,
        };
        let [lo, hi] = s.level_window.unwrap_or_else(|| {
            let lo = op.lower_bound();
            [lo, lo + (2 * s.levels + 2) as f64 * op.qh_max.max(op.box_scale())]
        });
        let mut all = distinct_levels(&op.upper, lo, hi, s.levels, &search)?;
        all.extend(distinct_levels(&op.lower, lo, hi, s.levels, &search)?);
        all.sort_by(|a, b| a.value.total_cmp(&b.value));
        let mut merged = merge_levels(all, 0.02, s.level_resolution);
        merged.truncate(s.levels);
        report.levels = merged.iter().map(|l| LevelRow { lambda2: l.value, multiplicity: l.multiplicity }).collect();
    }
    Ok(vec![("spectrum.csv", spectrum_csv(&report.spectrum))])
}

/// Split, identity, subequation, recombination and Dirac residuals of `psi`.
fn split_residuals<C: Component>(
    psi: &BispinorField<C>,
    pim: &PiSpinorMatrix,
    m: f64,
    report: &mut Report,
) -> Result<(), CliError> {
    let pair = split(psi, pim, m)?;
    let (i1, i2) = identity_residuals(&pair, pim)?;
    let s1 = subequation_residual(&pair.psi1, ProjectorId::P4, pim, m)?;
    let s2 = subequation_residual(&pair.psi2, ProjectorId::P3, pim, m)?;
    let back = recombine(&pair)?;
    report.residual("dirac", dirac_residual(psi, pim, m)?);
    report.residual("split_additivity", pair.additivity);
    report.residual("identity_1", i1);
    report.residual("identity_2", i2);
    report.residual("subequation_p4", s1.total);
    report.residual("subequation_p4_projected", s1.projected);
    report.residual("subequation_p4_complement", s1.complement);
    report.residual("subequation_p3", s2.total);
    report.residual("subequation_p3_projected", s2.projected);
    report.residual("subequation_p3_complement", s2.complement);
    report.residual("recombination", back.sub(psi)?.norm() / psi.norm());
    Ok(())
}

fn tolerance_verdict(report: &Report, tol: f64) -> Result<(), CliError> {
    let bad: Vec<String> = report
        .residuals
        .iter()
        .filter(|(k, _)| k.as_str() != "commutator")
        .filter(|(_, v)| !(**v <= tol))
        .map(|(k, v)| format!("{k} = {}", fmt_num(*v)))
        .collect();
    if bad.is_empty() {
        Ok(())
    } else {
        Err(CliError::ToleranceExceeded(format!("above {}: {}", fmt_num(tol), bad.join(", "))))
    }
}

fn eta_spinor(cfg: &RunConfig) -> [C64; 2] {
    let e = cfg.solution.eta;
    [C64::new(e[0][0], e[0][1]), C64::new(e[1][0], e[1][1])]
}

pub fn split_cmd(cfg: &RunConfig, branch: Branch, skip: bool, report: &mut Report) -> Result<Files, CliError> {
    precheck(cfg, skip, report)?;
    let p = cfg.potential()?;
    let pim = momenta(cfg, &p)?;
    let m = cfg.m;
    match (cfg.solution.kind, p.is_constant()) {
        (SolutionKind::PlaneWave, true) => {
            report.quantity("mode", "analytic");
            let k = on_shell_momentum(cfg.solution.momentum, &pim.momenta, m)?;
            report.quantity("momentum", k.to_vec());
            let psi = plane_wave_solution(k, eta_spinor(cfg), &pim, m, 1e-12)?;
            split_residuals(&psi, &pim, m, report)?;
        }
        (SolutionKind::PlaneWave, false) => {
            // A free plane wave sampled on the 4D grid and tested against the
            // configured potential; it is a solution only where A vanishes.
            report.quantity("mode", "grid");
            let free = PiSpinorMatrix::new(Momenta::new(PotentialSpec::zero(p.q), cfg.coupling()?));
            let k = on_shell_momentum(cfg.solution.momentum, &free.momenta, m)?;
            report.quantity("momentum", k.to_vec());
            let wave = plane_wave_solution(k, eta_spinor(cfg), &free, m, 1e-12)?;
            let grid = cfg.sample_grid()?;
            report.quantity("h", grid.h_max());
            let psi = BispinorField::new(std::array::from_fn(|i| wave.c[i].sample(&grid)));
            split_residuals(&psi, &pim, m, report)?;
        }
        (SolutionKind::Separated, true) => {
            report.branch = Some(branch.label().into());
            report.quantity("mode", "analytic");
            let (l2, psi) = closed_form(cfg, branch, &pim)?;
            report.quantity("lambda2", l2);
            split_residuals(&psi, &pim, m, report)?;
        }
        (SolutionKind::Separated, false) => {
            report.branch = Some(branch.label().into());
            report.quantity("mode", "separated");
            let grid = cfg.transverse_grid()?;
            let (_, sol) = separated_at(cfg, branch, &grid)?;
            report.quantity("h", grid.h_max());
            report.quantity("lambda2", sol.mode.lambda2);
            let psi = assemble(&sol, &grid)?;
            split_residuals(&psi, &pim, m, report)?;
        }
    }
    tolerance_verdict(report, cfg.solution.tolerance)?;
    Ok(Vec::new())
}

fn closed_form(cfg: &RunConfig, branch: Branch, pim: &PiSpinorMatrix) -> Result<(f64, BispinorField<PlaneWave>), CliError> {
    let s = &cfg.solution;
    Ok(separated_plane_wave(cfg.m, s.p_transverse, s.p3, branch, s.energy == EnergySign::Positive, &pim.momenta)?)
}

fn transverse_mode(cfg: &RunConfig, op: &PauliOperator) -> Result<TransverseMode, CliError> {
    let s = &cfg.solution;
    match s.transverse {
        TransverseChoice::Landau => {
            let seed = landau_seed(op, s.level)?;
            Ok(seeded_mode(op, None, &seed, cfg.m, s.iterations)?)
        }
        TransverseChoice::Lowest => {
            let mut modes = solve_transverse_with(op, s.index + 1, cfg.m, &subspace(cfg), cfg.solver_method()?)?;
            Ok(modes.swap_remove(s.index))
        }
    }
}

fn separated_at(cfg: &RunConfig, branch: Branch, grid: &Grid) -> Result<(PauliOperator, SeparatedSolution), CliError> {
    let op = operator(cfg, branch, grid)?;
    let mode = transverse_mode(cfg, &op)?;
    let mt = effective_mass(cfg.m, mode.lambda2)?;
    let long = solve_longitudinal_planewave(mt, cfg.solution.p3, branch, cfg.solution.energy == EnergySign::Positive)?;
    let sol = SeparatedSolution::new(mode, long, cfg.m, op.potential.q)?;
    Ok((op, sol))
}

fn assemble(sol: &SeparatedSolution, grid: &Grid) -> Result<BispinorField<Separable>, CliError> {
    let psi = match sol.branch() {
        Branch::Dotted1 => reconstruct(Some(sol), None, grid)?,
        Branch::Dotted2 => reconstruct(None, Some(sol), grid)?,
    };
    Ok(psi)
}

fn eta_index(branch: Branch) -> usize {
    match branch {
        Branch::Dotted1 => 2,
        Branch::Dotted2 => 3,
    }
}

fn other(branch: Branch) -> Branch {
    match branch {
        Branch::Dotted1 => Branch::Dotted2,
        Branch::Dotted2 => Branch::Dotted1,
    }
}

/// Index of the grid point closest to zero along an axis of n points on [min, max].
fn nearest_zero(min: f64, max: f64, n: usize) -> usize {
    let h = (max - min) / (n + 1) as f64;
    (((-min) / h).round() as i64 - 1).clamp(0, n as i64 - 1) as usize
}

fn samples_header() -> String {
    String::from("axis,x0,x1,x2,x3,density\n")
}

fn sample_row(s: &mut String, axis: &str, x: [f64; 4], density: f64) {
    s.push_str(&format!(
        "{axis},{},{},{},{},{}\n",
        fmt_num(x[0]),
        fmt_num(x[1]),
        fmt_num(x[2]),
        fmt_num(x[3]),
        fmt_num(density)
    ));
}

fn density_separable(psi: &BispinorField<Separable>, x0: f64, x3: f64, ti: usize) -> Result<f64, CliError> {
    let mut d = 0.0;
    for c in &psi.c {
        d += c.value_at(x0, x3, ti)?.norm_sqr();
    }
    Ok(d)
}

/// |Ψ|² along each coordinate axis through the origin (nearest grid points).
fn samples_separable(cfg: &RunConfig, psi: &BispinorField<Separable>, grid: &Grid) -> Result<String, CliError> {
    let t = grid.axes()[0];
    let centre = nearest_zero(t.min, t.max, t.n);
    let mut s = samples_header();
    for (label, along) in [("x1", 0usize), ("x2", 1usize)] {
        for i in 0..t.n {
            let idx = if along == 0 { [i, centre] } else { [centre, i] };
            let ti = grid.flat_index(&idx[..]);
            let x = grid.position(ti);
            sample_row(&mut s, label, [0.0, x[1], x[2], 0.0], density_separable(psi, 0.0, 0.0, ti)?);
        }
    }
    let ti = grid.flat_index(&[centre, centre][..]);
    let xc = grid.position(ti);
    let l = cfg.longitudinal_axis();
    let line = Grid::along_x3(l.min, l.max, l.n)?;
    for (label, time) in [("x0", true), ("x3", false)] {
        for i in 0..l.n {
            let v = line.position(i)[3];
            let (x0, x3) = if time { (v, 0.0) } else { (0.0, v) };
            sample_row(&mut s, label, [x0, xc[1], xc[2], x3], density_separable(psi, x0, x3, ti)?);
        }
    }
    Ok(s)
}

fn samples_plane_wave(cfg: &RunConfig, psi: &BispinorField<PlaneWave>) -> Result<String, CliError> {
    let t = cfg.grid.transverse;
    let l = cfg.longitudinal_axis();
    let mut s = samples_header();
    for (label, mu, a) in [("x1", 1usize, t), ("x2", 2, t), ("x0", 0, l), ("x3", 3, l)] {
        let line = Grid::along_x3(a.min, a.max, a.n)?;
        for i in 0..a.n {
            let mut x = [0.0; 4];
            x[mu] = line.position(i)[3];
            let d: f64 = psi.c.iter().map(|c| c.value(&x).norm_sqr()).sum();
            sample_row(&mut s, label, x, d);
        }
    }
    Ok(s)
}

pub fn reconstruct_cmd(cfg: &RunConfig, branch: Branch, skip: bool, report: &mut Report) -> Result<Files, CliError> {
    precheck(cfg, skip, report)?;
    report.branch = Some(branch.label().into());
    let p = cfg.potential()?;
    let pim = momenta(cfg, &p)?;
    let m = cfg.m;
    let eta = eta_index(branch);
    if p.is_constant() {
        let (l2, psi) = closed_form(cfg, branch, &pim)?;
        report.quantity("exact_mode", true);
        report.quantity("ratio", serde_json::Value::Null);
        report.quantity("lambda2", l2);
        report.quantity("momentum", psi.c[eta].p.to_vec());
        report.residual("dirac", dirac_residual(&psi, &pim, m)?);
        report.residual("second_order", second_order_residual(&psi.c[eta], &pim, m, branch)?);
        report.residual("second_order_other_branch", second_order_residual(&psi.c[eta], &pim, m, other(branch))?);
        return Ok(vec![("samples.csv", samples_plane_wave(cfg, &psi)?)]);
    }
    report.quantity("exact_mode", false);
    let n = cfg.grid.transverse.n;
    let mut fine_samples = String::new();
    let mut dirac = Vec::new();
    for (tag, nn) in [("coarse", n), ("fine", 2 * n + 1)] {
        let grid = cfg.transverse_grid_with(nn)?;
        let (op, sol) = separated_at(cfg, branch, &grid)?;
        let psi = assemble(&sol, &grid)?;
        let r = dirac_residual(&psi, &pim, m)?;
        let (l1, l2) = ladder_residuals(&op, &sol.mode, m)?;
        report.residual(&format!("dirac_{tag}"), r);
        report.residual(&format!("ladder_1_{tag}"), l1);
        report.residual(&format!("ladder_2_{tag}"), l2);
        report.residual(&format!("eigen_{tag}"), sol.mode.eigen_residual);
        report.residual(&format!("second_order_{tag}"), second_order_residual(&psi.c[eta], &pim, m, branch)?);
        report.residual(
            &format!("second_order_other_branch_{tag}"),
            second_order_residual(&psi.c[eta], &pim, m, other(branch))?,
        );
        if let Some(d) = sol.dispersion_defect() {
            report.residual(&format!("dispersion_{tag}"), d.abs());
        }
        report.quantity(&format!("lambda2_{tag}"), sol.mode.lambda2);
        report.quantity(&format!("truncation_estimate_{tag}"), truncation_estimate(&op, &sol.mode));
        if let Some((p0, p3)) = sol.longitudinal.momentum() {
            report.quantity(&format!("p0_{tag}"), p0);
            report.quantity(&format!("p3_{tag}"), p3);
        }
        report.convergence.push(ConvergenceRow { n: nn, h: grid.h_max(), residual: r });
        dirac.push(r);
        if tag == "fine" {
            fine_samples = samples_separable(cfg, &psi, &grid)?;
        }
    }
    report.quantity("ratio", dirac[0] / dirac[1]);
    Ok(vec![("samples.csv", fine_samples)])
}
