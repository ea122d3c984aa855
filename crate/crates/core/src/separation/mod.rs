//! Separation of variables for longitudinal potentials: a transverse Pauli
//! eigenproblem for (λ², ψ, β) times a longitudinal 1+1 Dirac system for
//! (φ, α̃) with effective mass m̃ = sqrt(m² + λ²).

mod levels;
mod longitudinal;
mod transverse;

pub use levels::{cluster_spectrum, distinct_levels, merge_levels, Level, LevelSearch};
pub use longitudinal::{
    effective_mass, longitudinal_momenta, rescale_alpha, solve_longitudinal_planewave, solve_longitudinal_stationary,
    unscale_alpha, Factor, LongitudinalKind, LongitudinalSolution, StationarySpectrum,
};
pub use transverse::{
    build_pauli_operator, canonicalize, ladder_residuals, landau_seed, seeded_mode, solve_transverse,
    solve_transverse_with, truncation_estimate, PauliOperator, SolverMethod, SpinBlock, TransverseMode, DENSE_LIMIT,
};

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::fields::{Component, Momenta, PlaneWave, Separable};
use crate::splitting::{kinetic_momentum, BispinorField};
use crate::Branch;

/// A transverse mode paired with a longitudinal solution of matching
/// effective mass.
#[derive(Debug, Clone)]
pub struct SeparatedSolution {
    pub mode: TransverseMode,
    pub longitudinal: LongitudinalSolution,
    pub m: f64,
    pub q: f64,
}

impl SeparatedSolution {
    pub fn new(mode: TransverseMode, longitudinal: LongitudinalSolution, m: f64, q: f64) -> Result<Self> {
        if mode.branch != longitudinal.branch {
            return Err(Error::IncompatibleParameters("transverse and longitudinal branches differ".into()));
        }
        let mt = effective_mass(m, mode.lambda2)?;
        if (mt - longitudinal.eff_mass).abs() > 1e-12 * mt {
            return Err(Error::IncompatibleParameters(format!(
                "effective mass {} does not match sqrt(m² + λ²) = {mt}",
                longitudinal.eff_mass
            )));
        }
        Ok(SeparatedSolution { mode, longitudinal, m, q })
    }

    pub fn branch(&self) -> Branch {
        self.mode.branch
    }

    /// (p⁰)² - (p³)² - m² - λ² for plane-wave longitudinal parts.
    pub fn dispersion_defect(&self) -> Option<f64> {
        let (p0, p3) = self.longitudinal.momentum()?;
        Some(p0 * p0 - p3 * p3 - self.m * self.m - self.mode.lambda2)
    }

    /// The four components of the branch subsolution in factored form.
    ///
    /// dotted1: (αψ, φβ, φψ, 0); dotted2: (φβ, αψ, 0, φψ), with
    /// α = sqrt(1 + λ²/m²) α̃.
    pub fn components(&self) -> Result<BispinorField<Separable>> {
        let l = &self.longitudinal;
        let mut alpha = l.alpha_tilde.clone();
        alpha.amp *= C64::from(effective_mass(self.m, self.mode.lambda2)? / self.m);
        let phi_psi = l.phi.times(&self.mode.psi);
        let phi_beta = l.phi.times(&self.mode.beta);
        let alpha_psi = alpha.times(&self.mode.psi);
        let zero = phi_psi.zero_like();
        Ok(BispinorField::new(match self.branch() {
            Branch::Dotted1 => [alpha_psi, phi_beta, phi_psi, zero],
            Branch::Dotted2 => [phi_beta, alpha_psi, zero, phi_psi],
        }))
    }
}

/// Ψ = P₄Ψ₍₁₎ + P₃Ψ₍₂₎ from up to one separated solution per branch.
pub fn reconstruct(
    first: Option<&SeparatedSolution>,
    second: Option<&SeparatedSolution>,
    transverse_grid: &crate::lattice::Grid,
) -> Result<BispinorField<Separable>> {
    if let (Some(a), Some(b)) = (first, second) {
        if a.m != b.m || a.q != b.q {
            return Err(Error::IncompatibleParameters("branches carry different m or q".into()));
        }
    }
    for (s, want) in [(first, Branch::Dotted1), (second, Branch::Dotted2)] {
        if let Some(s) = s {
            if s.branch() != want {
                return Err(Error::IncompatibleParameters(format!("expected a {} solution", want.label())));
            }
            if &s.mode.psi.grid != transverse_grid {
                return Err(Error::GridMismatch);
            }
        }
    }
    let zero = Separable::zero(transverse_grid);
    let mut out = BispinorField::new([zero.clone(), zero.clone(), zero.clone(), zero]);
    for s in [first, second].into_iter().flatten() {
        out = out.add(&s.components()?)?;
    }
    Ok(out)
}

/// Separated solution in a constant potential, in closed form.
///
/// The transverse factor is the plane wave with canonical momentum
/// `p_perp` = (p¹, p²), so λ² = (π¹)² + (π²)² and β = (π¹ ± iπ²)ψ/m. The
/// longitudinal factor has kinetic momentum `p3` along x³ and the energy
/// sign given by `positive_energy`. Returns λ² and the four components.
pub fn separated_plane_wave(
    m: f64,
    p_perp: [f64; 2],
    p3: f64,
    branch: Branch,
    positive_energy: bool,
    momenta: &Momenta,
) -> Result<(f64, BispinorField<PlaneWave>)> {
    if !momenta.potential.is_constant() {
        return Err(Error::Unsupported("closed-form separated solutions need a constant potential".into()));
    }
    let probe = kinetic_momentum([0.0, p_perp[0], p_perp[1], 0.0], momenta)?;
    let (k1, k2) = (probe[1], probe[2]);
    let lambda2 = k1 * k1 + k2 * k2;
    let mt = effective_mass(m, lambda2)?;
    let long = solve_longitudinal_planewave(mt, p3, branch, positive_energy)?;
    let (p0, _) = long.momentum().expect("plane-wave factor");
    // probe[0] and probe[3] hold the bare potential shifts of π⁰ and π³.
    let p = [p0 - probe[0], p_perp[0], p_perp[1], p3 - probe[3]];
    let alpha = long.alpha_tilde.amp * (mt / m);
    let s = match branch {
        Branch::Dotted1 => 1.0,
        Branch::Dotted2 => -1.0,
    };
    let beta = C64::new(k1, s * k2) / m;
    let w = |a: C64| PlaneWave::new(p, a);
    let one = C64::new(1.0, 0.0);
    let zero = C64::new(0.0, 0.0);
    let c = match branch {
        Branch::Dotted1 => [w(alpha), w(beta), w(one), w(zero)],
        Branch::Dotted2 => [w(beta), w(alpha), w(zero), w(one)],
    };
    Ok((lambda2, BispinorField::new(c)))
}
