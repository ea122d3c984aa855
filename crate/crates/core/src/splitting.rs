//! Spinor-form momenta π^{AḂ}, the split of a solution into the two
//! subsolutions Ψ₍₁₎, Ψ₍₂₎, and the residuals that check them.

use num_complex::Complex64 as C64;

use crate::clifford::{build_spinor_rep, charge_conjugation_matrix, projector, ComplexMatrix4, GammaSet, ProjectorId};
use crate::error::{Error, Result};
use crate::fields::{Component, Momenta};

const ONE: C64 = C64::new(1.0, 0.0);
const I: C64 = C64::new(0.0, 1.0);

/// Four components ordered (ξ¹, ξ², η₁̇, η₂̇).
#[derive(Debug, Clone, PartialEq)]
pub struct BispinorField<C> {
    pub c: [C; 4],
}

impl<C: Component> BispinorField<C> {
    pub fn new(c: [C; 4]) -> Self {
        BispinorField { c }
    }

    pub fn xi(&self) -> [&C; 2] {
        [&self.c[0], &self.c[1]]
    }

    pub fn eta(&self) -> [&C; 2] {
        [&self.c[2], &self.c[3]]
    }

    pub fn norm_sqr(&self) -> f64 {
        self.c.iter().map(|f| f.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn zero_like(&self) -> Self {
        BispinorField { c: std::array::from_fn(|k| self.c[k].zero_like()) }
    }

    pub fn lin_comb(&self, a: C64, other: &Self, b: C64) -> Result<Self> {
        let mut out = Vec::with_capacity(4);
        for k in 0..4 {
            out.push(self.c[k].lin_comb(a, &other.c[k], b)?);
        }
        Ok(BispinorField { c: out.try_into().ok().unwrap() })
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.lin_comb(ONE, other, ONE)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.lin_comb(ONE, other, -ONE)
    }

    pub fn scale(&self, s: C64) -> Self {
        BispinorField { c: std::array::from_fn(|k| self.c[k].scale(s)) }
    }

    pub fn conj(&self) -> Self {
        BispinorField { c: std::array::from_fn(|k| self.c[k].conj()) }
    }

    /// Pointwise action of a constant 4x4 matrix.
    pub fn apply_matrix(&self, m: &ComplexMatrix4) -> Result<Self> {
        let mut out = Vec::with_capacity(4);
        for i in 0..4 {
            let mut acc = self.c[i].zero_like();
            for j in 0..4 {
                if m[(i, j)] != C64::new(0.0, 0.0) {
                    acc = acc.lin_comb(ONE, &self.c[j], m[(i, j)])?;
                }
            }
            out.push(acc);
        }
        Ok(BispinorField { c: out.try_into().ok().unwrap() })
    }

    pub fn project(&self, id: ProjectorId) -> Result<Self> {
        self.apply_matrix(&projector(id, &build_spinor_rep()))
    }

    pub fn reflect_x3(&self) -> Result<Self> {
        let mut out = Vec::with_capacity(4);
        for k in 0..4 {
            out.push(self.c[k].reflect_x3()?);
        }
        Ok(BispinorField { c: out.try_into().ok().unwrap() })
    }
}

/// Entries of the spinor momentum matrix π^{AḂ}.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpinorEntry {
    /// π¹¹̇ = π⁰ + π³
    E11,
    /// π¹²̇ = π¹ - iπ²
    E12,
    /// π²¹̇ = π¹ + iπ²
    E21,
    /// π²²̇ = π⁰ - π³
    E22,
}

impl SpinorEntry {
    /// Lower-index alias π_{AḂ} as (upper entry, sign):
    /// π₁₁̇ = π²²̇, π₁₂̇ = -π²¹̇, π₂₁̇ = -π¹²̇, π₂₂̇ = π¹¹̇.
    pub fn lowered(self) -> (SpinorEntry, f64) {
        match self {
            SpinorEntry::E11 => (SpinorEntry::E22, 1.0),
            SpinorEntry::E12 => (SpinorEntry::E21, -1.0),
            SpinorEntry::E21 => (SpinorEntry::E12, -1.0),
            SpinorEntry::E22 => (SpinorEntry::E11, 1.0),
        }
    }

    /// (μ, ν, coefficient) with the entry equal to π^μ + coefficient·π^ν.
    fn parts(self) -> (usize, usize, C64) {
        match self {
            SpinorEntry::E11 => (0, 3, ONE),
            SpinorEntry::E12 => (1, 2, -I),
            SpinorEntry::E21 => (1, 2, I),
            SpinorEntry::E22 => (0, 3, -ONE),
        }
    }
}

/// The operator matrix π^{AḂ} built from the kinetic momenta.
#[derive(Debug, Clone)]
pub struct PiSpinorMatrix {
    pub momenta: Momenta,
}

impl PiSpinorMatrix {
    pub fn new(momenta: Momenta) -> Self {
        PiSpinorMatrix { momenta }
    }

    pub fn pi<C: Component>(&self, mu: usize, f: &C) -> Result<C> {
        f.apply_pi(mu, &self.momenta)
    }

    pub fn apply<C: Component>(&self, e: SpinorEntry, f: &C) -> Result<C> {
        let (mu, nu, c) = e.parts();
        self.pi(mu, f)?.lin_comb(ONE, &self.pi(nu, f)?, c)
    }

    pub fn apply_lowered<C: Component>(&self, e: SpinorEntry, f: &C) -> Result<C> {
        let (up, sign) = e.lowered();
        Ok(self.apply(up, f)?.scale(C64::from(sign)))
    }

    /// γ^μπ_μΨ written out in spinor components.
    pub fn dirac_operator<C: Component>(&self, psi: &BispinorField<C>) -> Result<BispinorField<C>> {
        use SpinorEntry::*;
        let [x1, x2, e1, e2] = &psi.c;
        let r1 = self.apply(E11, e1)?.add(&self.apply(E12, e2)?)?;
        let r2 = self.apply(E21, e1)?.add(&self.apply(E22, e2)?)?;
        let r3 = self.apply(E22, x1)?.sub(&self.apply(E12, x2)?)?;
        let r4 = self.apply(E11, x2)?.sub(&self.apply(E21, x1)?)?;
        Ok(BispinorField::new([r1, r2, r3, r4]))
    }

    /// γ^μπ_μΨ from an explicit gamma set; agrees with [`Self::dirac_operator`]
    /// for the spinor representation.
    pub fn gamma_operator<C: Component>(&self, g: &GammaSet, psi: &BispinorField<C>) -> Result<BispinorField<C>> {
        let mut out = psi.zero_like();
        for mu in 0..4 {
            let mut pi_psi = Vec::with_capacity(4);
            for k in 0..4 {
                pi_psi.push(self.pi(mu, &psi.c[k])?);
            }
            let pi_psi = BispinorField::new(pi_psi.try_into().ok().unwrap());
            let term = pi_psi.apply_matrix(&g.gamma[mu].scale(C64::from(g.metric[mu])))?;
            out = out.add(&term)?;
        }
        Ok(out)
    }
}

/// The two subsolutions obtained from a solution Ψ.
#[derive(Debug, Clone)]
pub struct SubsolutionPair<C> {
    pub psi1: BispinorField<C>,
    pub psi2: BispinorField<C>,
    pub m: f64,
    /// ‖ξ₍₁₎ + ξ₍₂₎ - ξ‖ / ‖ξ‖ for the source solution.
    pub additivity: f64,
}

fn check_mass(m: f64) -> Result<()> {
    if m > 0.0 && m.is_finite() {
        Ok(())
    } else {
        Err(Error::ZeroMass(m))
    }
}

/// ξ₍₁₎ = π^{A1̇}η₁̇/m and ξ₍₂₎ = π^{A2̇}η₂̇/m.
pub fn split<C: Component>(psi: &BispinorField<C>, pim: &PiSpinorMatrix, m: f64) -> Result<SubsolutionPair<C>> {
    use SpinorEntry::*;
    check_mass(m)?;
    let inv = C64::from(1.0 / m);
    let [_, _, e1, e2] = &psi.c;
    let x11 = pim.apply(E11, e1)?.scale(inv);
    let x12 = pim.apply(E21, e1)?.scale(inv);
    let x21 = pim.apply(E12, e2)?.scale(inv);
    let x22 = pim.apply(E22, e2)?.scale(inv);
    let d1 = x11.add(&x21)?.sub(&psi.c[0])?;
    let d2 = x12.add(&x22)?.sub(&psi.c[1])?;
    let xi_norm = (psi.c[0].norm_sqr() + psi.c[1].norm_sqr()).sqrt();
    let defect = (d1.norm_sqr() + d2.norm_sqr()).sqrt();
    let additivity = if xi_norm > 0.0 { defect / xi_norm } else { defect };
    Ok(SubsolutionPair {
        psi1: BispinorField::new([x11, x12, e1.clone(), e2.clone()]),
        psi2: BispinorField::new([x21, x22, e1.clone(), e2.clone()]),
        m,
        additivity,
    })
}

fn relative(num: f64, den: f64) -> f64 {
    if den > 0.0 {
        num / den
    } else {
        num
    }
}

/// Residuals of the two identities
/// π²¹̇ξ₍₁₎¹ = π¹¹̇ξ₍₁₎² and π²²̇ξ₍₂₎¹ = π¹²̇ξ₍₂₎².
pub fn identity_residuals<C: Component>(pair: &SubsolutionPair<C>, pim: &PiSpinorMatrix) -> Result<(f64, f64)> {
    use SpinorEntry::*;
    let r1 = pim.apply(E21, &pair.psi1.c[0])?.sub(&pim.apply(E11, &pair.psi1.c[1])?)?;
    let r2 = pim.apply(E22, &pair.psi2.c[0])?.sub(&pim.apply(E12, &pair.psi2.c[1])?)?;
    Ok((relative(r1.norm(), pair.psi1.norm()), relative(r2.norm(), pair.psi2.norm())))
}

/// Residual of a projected subequation γ^μπ_μ PΨ = m PΨ, split into the
/// P and 1 - P pieces.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SubequationResidual {
    /// ‖R‖ / ‖PΨ‖ with R = γ^μπ_μPΨ - mPΨ.
    pub total: f64,
    /// ‖PR‖ / ‖PΨ‖.
    pub projected: f64,
    /// ‖(1-P)R‖ / ‖PΨ‖, the identity-equation part.
    pub complement: f64,
    /// Set when PΨ vanishes; all values are then 0.
    pub empty_component: bool,
}

pub fn subequation_residual<C: Component>(
    component: &BispinorField<C>,
    id: ProjectorId,
    pim: &PiSpinorMatrix,
    m: f64,
) -> Result<SubequationResidual> {
    check_mass(m)?;
    let g = build_spinor_rep();
    let p = projector(id, &g);
    let ppsi = component.apply_matrix(&p)?;
    let den = ppsi.norm();
    if den == 0.0 {
        return Ok(SubequationResidual { total: 0.0, projected: 0.0, complement: 0.0, empty_component: true });
    }
    let r = pim.dirac_operator(&ppsi)?.lin_comb(ONE, &ppsi, C64::from(-m))?;
    let pr = r.apply_matrix(&p)?;
    let qr = r.apply_matrix(&(ComplexMatrix4::identity() - p))?;
    Ok(SubequationResidual {
        total: r.norm() / den,
        projected: pr.norm() / den,
        complement: qr.norm() / den,
        empty_component: false,
    })
}

/// Ψ = P₄Ψ₍₁₎ + P₃Ψ₍₂₎.
pub fn recombine<C: Component>(pair: &SubsolutionPair<C>) -> Result<BispinorField<C>> {
    pair.psi1.project(ProjectorId::P4)?.add(&pair.psi2.project(ProjectorId::P3)?)
}

/// ‖γ^μπ_μΨ - mΨ‖ / ‖Ψ‖.
pub fn dirac_residual<C: Component>(psi: &BispinorField<C>, pim: &PiSpinorMatrix, m: f64) -> Result<f64> {
    check_mass(m)?;
    let n = psi.norm();
    if n == 0.0 {
        return Err(Error::ZeroNorm);
    }
    let r = pim.dirac_operator(psi)?.lin_comb(ONE, psi, C64::from(-m))?;
    Ok(r.norm() / n)
}

/// Charge conjugate Ψ_c = iγ²Ψ*, which solves the equation with q → -q.
pub fn charge_conjugate_field<C: Component>(psi: &BispinorField<C>) -> Result<BispinorField<C>> {
    psi.conj().apply_matrix(&charge_conjugation_matrix(&build_spinor_rep()))
}

/// Charge conjugation followed by the mirror x³ → -x³ with spinor matrix
/// γ³γ⁵. Maps the P₄ subequation at charge q onto the P₃ subequation at
/// charge -q with the mirrored potential ([`crate::potential::PotentialSpec::reflected_x3`]).
pub fn conjugate_mirror_field<C: Component>(psi: &BispinorField<C>) -> Result<BispinorField<C>> {
    let g = build_spinor_rep();
    let u = g.gamma[3] * g.gamma5 * charge_conjugation_matrix(&g);
    psi.conj().apply_matrix(&u)?.reflect_x3()
}

/// Second-order operator on η in the form (π²²̇π¹¹̇ - π¹²̇π²¹̇ - m²)η for
/// the dotted-1 branch and (π¹¹̇π²²̇ - π²¹̇π¹²̇ - m²)η for dotted-2; returns
/// the residual norm relative to m²‖η‖.
pub fn second_order_residual<C: Component>(eta: &C, pim: &PiSpinorMatrix, m: f64, branch: crate::Branch) -> Result<f64> {
    use SpinorEntry::*;
    check_mass(m)?;
    let n = eta.norm();
    if n == 0.0 {
        return Err(Error::ZeroNorm);
    }
    let (a, b, c, d) = match branch {
        crate::Branch::Dotted1 => (E22, E11, E12, E21),
        crate::Branch::Dotted2 => (E11, E22, E21, E12),
    };
    let first = pim.apply(a, &pim.apply(b, eta)?)?;
    let second = pim.apply(c, &pim.apply(d, eta)?)?;
    let r = first.sub(&second)?.lin_comb(ONE, eta, C64::from(-m * m))?;
    Ok(r.norm() / (m * m * n))
}

/// Kinetic momenta π^μ of a plane wave e^{-ip·x} in a constant potential.
pub fn kinetic_momentum(p: [f64; 4], momenta: &Momenta) -> Result<[f64; 4]> {
    let w = crate::fields::PlaneWave::new(p, ONE);
    let mut out = [0.0; 4];
    for (mu, o) in out.iter_mut().enumerate() {
        *o = w.apply_pi(mu, momenta)?.amp.re;
    }
    Ok(out)
}

/// Plane-wave solution with momentum `p` and dotted spinor `eta`, the
/// undotted part fixed by ξ^A = π^{AḂ}η_Ḃ / m. Fails unless the kinetic
/// momentum is on shell to within `tol`·m².
pub fn plane_wave_solution(
    p: [f64; 4],
    eta: [C64; 2],
    pim: &PiSpinorMatrix,
    m: f64,
    tol: f64,
) -> Result<BispinorField<crate::fields::PlaneWave>> {
    use crate::fields::PlaneWave;
    check_mass(m)?;
    let k = kinetic_momentum(p, &pim.momenta)?;
    let shell = k[0] * k[0] - k[1] * k[1] - k[2] * k[2] - k[3] * k[3];
    if (shell - m * m).abs() > tol * m * m {
        return Err(Error::IncompatibleParameters(format!("π·π = {shell} is not m² = {}", m * m)));
    }
    let e1 = PlaneWave::new(p, eta[0]);
    let e2 = PlaneWave::new(p, eta[1]);
    let inv = C64::from(1.0 / m);
    let x1 = pim.apply(SpinorEntry::E11, &e1)?.add(&pim.apply(SpinorEntry::E12, &e2)?)?.scale(inv);
    let x2 = pim.apply(SpinorEntry::E21, &e1)?.add(&pim.apply(SpinorEntry::E22, &e2)?)?.scale(inv);
    Ok(BispinorField::new([x1, x2, e1, e2]))
}

/// Momentum with kinetic part on the mass shell: π^0 = sqrt(m² + |π⃗|²).
pub fn on_shell_momentum(p_spatial: [f64; 3], momenta: &Momenta, m: f64) -> Result<[f64; 4]> {
    let probe = kinetic_momentum([0.0, p_spatial[0], p_spatial[1], p_spatial[2]], momenta)?;
    let kin = (m * m + probe[1] * probe[1] + probe[2] * probe[2] + probe[3] * probe[3]).sqrt();
    // π⁰ = p⁰ + probe[0] since probe[0] holds the potential shift alone.
    Ok([kin - probe[0], p_spatial[0], p_spatial[1], p_spatial[2]])
}
