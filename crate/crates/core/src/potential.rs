//! Longitudinal four-potentials: A₀, A₃ over (x⁰, x³) and A₁, A₂ over
//! (x¹, x²), with the field strengths derived symbolically.
//!
//! Components are stored with lower indices, A_μ, and enter through the
//! covariant derivative ∇_μ = ∂_μ + iqA_μ. With that placement
//! E = ∂₀A₃ - ∂₃A₀ and H = ∂₂A₁ - ∂₁A₂.

use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};

use crate::error::{Error, Result};
use crate::expr::Expr;
use crate::lattice::{pi_operator, AxisSpec, ComplexField, Coupling, Grid};

#[derive(Debug, Clone, PartialEq)]
pub struct PotentialSpec {
    pub q: f64,
    /// Lower-index components A_0 .. A_3.
    pub a: [Expr; 4],
}

#[derive(Debug, Clone, PartialEq)]
pub struct FieldStrengths {
    pub e: Expr,
    pub h: Expr,
}

/// Outcome of the structural check for one component.
#[derive(Debug, Clone, PartialEq)]
pub struct ComponentCheck {
    pub component: usize,
    /// Coordinates that occur although they are forbidden for this component.
    pub forbidden: Vec<usize>,
}

impl ComponentCheck {
    pub fn passed(&self) -> bool {
        self.forbidden.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ValidationReport {
    pub components: Vec<ComponentCheck>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.components.iter().all(|c| c.passed())
    }

    pub fn failures(&self) -> impl Iterator<Item = &ComponentCheck> {
        self.components.iter().filter(|c| !c.passed())
    }
}

/// Coordinates a component must not depend on.
pub fn forbidden_coords(component: usize) -> [usize; 2] {
    match component {
        0 | 3 => [1, 2],
        _ => [0, 3],
    }
}

pub const BUILTINS: [&str; 5] = ["zero", "uniform_H_symmetric", "uniform_H_landau", "uniform_E", "static_A0"];

impl PotentialSpec {
    pub fn new(q: f64, a: [Expr; 4]) -> Self {
        PotentialSpec { q, a }
    }

    pub fn zero(q: f64) -> Self {
        PotentialSpec { q, a: Default::default() }
    }

    /// Factory for the named test potentials.
    ///
    /// `static_A0` takes polynomial coefficients followed by the charge:
    /// `[c0, c1, ..., ck, q]` gives A₀ = Σ cᵢ (x³)ⁱ.
    pub fn builtin(name: &str, params: &[f64]) -> Result<Self> {
        let arity = |expected: usize| -> Result<()> {
            if params.len() == expected {
                Ok(())
            } else {
                Err(Error::ArityMismatch { name: name.to_string(), expected: expected.to_string(), got: params.len() })
            }
        };
        let x = Expr::coord;
        match name {
            "zero" => {
                arity(1)?;
                Ok(PotentialSpec::zero(params[0]))
            }
            "uniform_H_symmetric" => {
                arity(2)?;
                let h = params[0];
                let mut p = PotentialSpec::zero(params[1]);
                p.a[1] = x(2).scale(0.5 * h);
                p.a[2] = x(1).scale(-0.5 * h);
                Ok(p)
            }
            "uniform_H_landau" => {
                arity(2)?;
                let mut p = PotentialSpec::zero(params[1]);
                p.a[1] = x(2).scale(params[0]);
                Ok(p)
            }
            "uniform_E" => {
                arity(2)?;
                let mut p = PotentialSpec::zero(params[1]);
                p.a[3] = x(0).scale(params[0]);
                Ok(p)
            }
            "static_A0" => {
                if params.len() < 2 {
                    return Err(Error::ArityMismatch {
                        name: name.to_string(),
                        expected: "at least 2".into(),
                        got: params.len(),
                    });
                }
                let (coeffs, q) = params.split_at(params.len() - 1);
                let terms = coeffs.iter().enumerate().map(|(i, &c)| x(3).powi(i as i32).scale(c)).collect();
                let mut p = PotentialSpec::zero(q[0]);
                p.a[0] = Expr::sum(terms);
                Ok(p)
            }
            other => Err(Error::UnknownBuiltin(other.to_string())),
        }
    }

    /// Component-wise sum; both specs must carry the same charge.
    pub fn combine(&self, other: &PotentialSpec) -> Result<Self> {
        if self.q != other.q {
            return Err(Error::IncompatibleParameters(format!("charges {} and {} differ", self.q, other.q)));
        }
        let a = std::array::from_fn(|mu| self.a[mu].clone().add(other.a[mu].clone()));
        Ok(PotentialSpec { q: self.q, a })
    }

    pub fn field_strengths(&self) -> FieldStrengths {
        let e = self.a[3].derivative(0).sub(self.a[0].derivative(3));
        let h = self.a[1].derivative(2).sub(self.a[2].derivative(1));
        FieldStrengths { e, h }
    }

    pub fn validate_longitudinal(&self) -> ValidationReport {
        let components = (0..4)
            .map(|mu| {
                let used = self.a[mu].coordinates();
                let forbidden = forbidden_coords(mu).into_iter().filter(|&c| used[c]).collect();
                ComponentCheck { component: mu, forbidden }
            })
            .collect();
        ValidationReport { components }
    }

    /// Error out unless the structural check passes.
    pub fn require_longitudinal(&self) -> Result<()> {
        let report = self.validate_longitudinal();
        let first = report.failures().next().cloned();
        match first {
            None => Ok(()),
            Some(c) => Err(Error::InvalidPotential(format!(
                "A{} depends on {}",
                c.component,
                c.forbidden.iter().map(|x| format!("x{x}")).collect::<Vec<_>>().join(", ")
            ))),
        }
    }

    /// Same potential seen by the opposite charge.
    pub fn charge_reversed(&self) -> Self {
        PotentialSpec { q: -self.q, a: self.a.clone() }
    }

    /// Potential in coordinates mirrored along x³: A'_μ(x) = ±A_μ(x⁰, x¹, x², -x³)
    /// with the sign flipped for μ = 3.
    pub fn reflected_x3(&self) -> Self {
        let minus_z = Expr::coord(3).neg();
        let a = std::array::from_fn(|mu| {
            let e = self.a[mu].substitute(3, &minus_z);
            if mu == 3 {
                e.neg()
            } else {
                e
            }
        });
        PotentialSpec { q: self.q, a }
    }

    pub fn is_zero(&self) -> bool {
        self.q == 0.0 || self.a.iter().all(|e| e.as_constant() == Some(0.0))
    }

    /// Whether every component is a constant (so plane waves stay exact).
    pub fn is_constant(&self) -> bool {
        self.a.iter().all(|e| e.as_constant().is_some())
    }
}

/// Merge a transverse and a longitudinal grid into one 4D sample grid.
pub fn sample_grid(longitudinal: &Grid, transverse: &Grid) -> Result<Grid> {
    let mut axes: Vec<AxisSpec> = longitudinal.axes().iter().chain(transverse.axes()).copied().collect();
    axes.sort_by_key(|a| a.coord);
    Grid::new(axes)
}

/// Tensor-product Gaussians with random centres and widths inside the grid.
pub fn standard_probes(grid: &Grid, count: usize, seed: u64) -> Vec<ComplexField> {
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let mut centre = [0.0; 4];
            let mut width = [1.0; 4];
            let mut kick = [0.0; 4];
            for a in grid.axes() {
                let mid = 0.5 * (a.min + a.max);
                let len = a.length();
                centre[a.coord] = mid + rng.gen_range(-0.15..0.15) * len;
                width[a.coord] = rng.gen_range(0.12..0.22) * len;
                kick[a.coord] = rng.gen_range(-1.0..1.0) / width[a.coord];
            }
            let axes: Vec<usize> = grid.axes().iter().map(|a| a.coord).collect();
            ComplexField::sample(grid, move |x| {
                let mut arg = 0.0;
                let mut phase = 0.0;
                for &c in &axes {
                    let d = (x[c] - centre[c]) / width[c];
                    arg -= d * d;
                    phase += kick[c] * x[c];
                }
                C64::from_polar(arg.exp(), phase)
            })
        })
        .collect()
}

/// max over probes and sign choices of ‖[π⁰ ± π³, π¹ ± iπ²]f‖∞ / ‖f‖∞ on a
/// 4D sample grid.
pub fn commutator_residual(
    p: &PotentialSpec,
    probes: &[ComplexField],
    grid: &Grid,
    coupling: Coupling,
) -> Result<f64> {
    if probes.is_empty() {
        return Err(Error::EmptyProbeSet);
    }
    let pi: Vec<_> = (0..4).map(|mu| pi_operator(mu, p, grid, coupling)).collect::<Result<_>>()?;
    let mut worst: f64 = 0.0;
    for f in probes {
        let scale = f.max_abs();
        if scale == 0.0 {
            continue;
        }
        let first: Vec<ComplexField> = pi.iter().map(|op| op.apply(f)).collect::<Result<_>>()?;
        // c[(a, b)] = [π^a, π^b] f for a ∈ {0, 3}, b ∈ {1, 2}
        let comm = |a: usize, b: usize| -> Result<ComplexField> {
            pi[a].apply(&first[b])?.sub(&pi[b].apply(&first[a])?)
        };
        let (c01, c02, c31, c32) = (comm(0, 1)?, comm(0, 2)?, comm(3, 1)?, comm(3, 2)?);
        for s1 in [1.0, -1.0] {
            for s2 in [1.0, -1.0] {
                let i2 = C64::new(0.0, s2);
                let mut m: f64 = 0.0;
                for k in 0..f.len() {
                    let v = c01.values[k] + i2 * c02.values[k] + s1 * (c31.values[k] + i2 * c32.values[k]);
                    m = m.max(v.norm());
                }
                worst = worst.max(m / scale);
            }
        }
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtin_arity_and_names() {
        assert!(matches!(PotentialSpec::builtin("nope", &[1.0]), Err(Error::UnknownBuiltin(_))));
        assert!(matches!(PotentialSpec::builtin("uniform_E", &[1.0]), Err(Error::ArityMismatch { .. })));
        assert!(matches!(PotentialSpec::builtin("static_A0", &[1.0]), Err(Error::ArityMismatch { .. })));
        let z = PotentialSpec::builtin("zero", &[1.0]).unwrap();
        assert!(z.a.iter().all(|e| *e == Expr::zero()));
    }

    #[test]
    fn field_strength_examples() {
        let fs = PotentialSpec::builtin("uniform_H_symmetric", &[1.0, 1.0]).unwrap().field_strengths();
        assert_eq!(fs.h.as_constant(), Some(1.0));
        assert_eq!(fs.e.as_constant(), Some(0.0));
        let fs = PotentialSpec::builtin("uniform_H_landau", &[3.0, 1.0]).unwrap().field_strengths();
        assert_eq!(fs.h.as_constant(), Some(3.0));
        let fs = PotentialSpec::builtin("uniform_E", &[2.0, 1.0]).unwrap().field_strengths();
        assert_eq!(fs.e.as_constant(), Some(2.0));
        // A0 = x³
        let fs = PotentialSpec::builtin("static_A0", &[0.0, 1.0, 1.0]).unwrap().field_strengths();
        assert_eq!(fs.e.as_constant(), Some(-1.0));
        let fs = PotentialSpec::zero(1.0).field_strengths();
        assert_eq!((fs.e.as_constant(), fs.h.as_constant()), (Some(0.0), Some(0.0)));
    }

    #[test]
    fn structural_validation() {
        let ok = PotentialSpec::builtin("uniform_H_symmetric", &[1.0, 1.0]).unwrap();
        assert!(ok.validate_longitudinal().passed());
        let mut bad = PotentialSpec::zero(1.0);
        bad.a[1] = Expr::coord(3);
        let rep = bad.validate_longitudinal();
        assert!(!rep.passed());
        let fails: Vec<_> = rep.failures().collect();
        assert_eq!(fails.len(), 1);
        assert_eq!((fails[0].component, fails[0].forbidden.clone()), (1, vec![3]));
        let mut mixed = PotentialSpec::zero(1.0);
        mixed.a[0] = Expr::coord(0).mul(Expr::coord(3));
        assert!(mixed.validate_longitudinal().passed());
    }

    #[test]
    fn combine_requires_equal_charge() {
        let a = PotentialSpec::builtin("uniform_E", &[1.0, 1.0]).unwrap();
        let b = PotentialSpec::builtin("uniform_H_landau", &[1.0, 2.0]).unwrap();
        assert!(a.combine(&b).is_err());
    }

    #[test]
    fn reflection_flips_the_longitudinal_vector_component() {
        let mut p = PotentialSpec::zero(1.0);
        p.a[0] = Expr::coord(3).powi(3);
        p.a[3] = Expr::coord(3).scale(2.0);
        let r = p.reflected_x3();
        let x = [0.0, 0.0, 0.0, 0.5];
        assert!((r.a[0].eval(&x) + 0.125).abs() < 1e-15);
        assert!((r.a[3].eval(&x) - 1.0).abs() < 1e-15);
        // E'(x) = -E(x⁰, x¹, x², -x³)
        assert!((r.field_strengths().e.eval(&x) + p.field_strengths().e.eval(&[0.0, 0.0, 0.0, -0.5])).abs() < 1e-15);
    }
}
