use num_complex::Complex64 as C64;

use super::field::ComplexField;
use super::grid::Grid;
use super::sparse::CsrMatrix;
use crate::error::{Error, Result};
use crate::expr::Expr;
use crate::parallel::{fill_indexed, map_range, Exec};
use crate::potential::PotentialSpec;

/// How the gauge potential enters the difference stencils.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Coupling {
    /// Link phases exp(iq∫A) on every stencil leg. Exactly gauge covariant
    /// and robust when |qA|h is not small.
    #[default]
    Peierls,
    /// Plain central differences plus multiplication by A.
    Minimal,
}

/// Gauge link data for a covariant difference along one axis.
#[derive(Debug, Clone, PartialEq)]
pub struct Link {
    pub q: f64,
    /// Lower-index component A_coord.
    pub a: Expr,
}

/// One summand of a [`DiffOp`].
#[derive(Debug, Clone, PartialEq)]
pub enum Term {
    /// c·f
    Identity(C64),
    /// c·w(x)·f
    Multiply(C64, Expr),
    /// c·left(x)·Dₖ[right·f] with central differences of order k ∈ {1, 2},
    /// optionally gauge covariant through `link`.
    Derivative {
        coord: usize,
        order: u8,
        coeff: C64,
        left: Option<Expr>,
        right: Option<Expr>,
        link: Option<Link>,
    },
}

impl Term {
    fn scaled(&self, s: C64) -> Term {
        match self {
            Term::Identity(c) => Term::Identity(c * s),
            Term::Multiply(c, e) => Term::Multiply(c * s, e.clone()),
            Term::Derivative { coord, order, coeff, left, right, link } => Term::Derivative {
                coord: *coord,
                order: *order,
                coeff: coeff * s,
                left: left.clone(),
                right: right.clone(),
                link: link.clone(),
            },
        }
    }
}

/// Linear operator on fields over one grid, kept as a sum of stencil terms.
#[derive(Debug, Clone, PartialEq)]
pub struct DiffOp {
    pub grid: Grid,
    pub terms: Vec<Term>,
}

// 5-point Gauss-Legendre nodes and weights on [-1, 1].
const GL_NODES: [f64; 5] = [
    -0.906_179_845_938_664,
    -0.538_469_310_105_683_1,
    0.0,
    0.538_469_310_105_683_1,
    0.906_179_845_938_664,
];
const GL_WEIGHTS: [f64; 5] = [
    0.236_926_885_056_189_1,
    0.478_628_670_499_366_5,
    0.568_888_888_888_888_9,
    0.478_628_670_499_366_5,
    0.236_926_885_056_189_1,
];

/// Link variable U = exp(i q ∫₀^s A_coord(x + t e_coord) dt).
pub fn link_phase(link: &Link, x: &[f64; 4], coord: usize, s: f64) -> C64 {
    let mut integral = 0.0;
    let mut p = *x;
    for (t, w) in GL_NODES.iter().zip(GL_WEIGHTS) {
        p[coord] = x[coord] + 0.5 * s * (1.0 + t);
        integral += w * link.a.eval(&p);
    }
    integral *= 0.5 * s;
    C64::from_polar(1.0, link.q * integral)
}

impl DiffOp {
    pub fn identity(grid: &Grid) -> Self {
        DiffOp { grid: grid.clone(), terms: vec![Term::Identity(C64::new(1.0, 0.0))] }
    }

    pub fn zero(grid: &Grid) -> Self {
        DiffOp { grid: grid.clone(), terms: Vec::new() }
    }

    pub fn from_terms(grid: &Grid, terms: Vec<Term>) -> Result<Self> {
        for t in &terms {
            if let Term::Derivative { coord, order, .. } = t {
                grid.axis(*coord)?;
                if !(1..=2).contains(order) {
                    return Err(Error::Unsupported(format!("difference order {order}")));
                }
            }
        }
        Ok(DiffOp { grid: grid.clone(), terms })
    }

    /// Plain central difference of order 1 or 2 along x^coord.
    pub fn difference(grid: &Grid, coord: usize, order: u8) -> Result<Self> {
        DiffOp::from_terms(
            grid,
            vec![Term::Derivative { coord, order, coeff: C64::new(1.0, 0.0), left: None, right: None, link: None }],
        )
    }

    pub fn multiply(grid: &Grid, w: Expr) -> Self {
        DiffOp { grid: grid.clone(), terms: vec![Term::Multiply(C64::new(1.0, 0.0), w)] }
    }

    pub fn plus(&self, other: &DiffOp) -> Result<Self> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch);
        }
        let mut terms = self.terms.clone();
        terms.extend(other.terms.iter().cloned());
        Ok(DiffOp { grid: self.grid.clone(), terms })
    }

    pub fn scaled(&self, s: C64) -> Self {
        DiffOp { grid: self.grid.clone(), terms: self.terms.iter().map(|t| t.scaled(s)).collect() }
    }

    /// Row `i` of the operator as (column, value) pairs.
    fn stencil_row(&self, i: usize) -> Vec<(usize, C64)> {
        let grid = &self.grid;
        let x = grid.position(i);
        let idx = grid.multi_index(i);
        let mut row = Vec::with_capacity(1 + 2 * self.terms.len());
        for term in &self.terms {
            match term {
                Term::Identity(c) => row.push((i, *c)),
                Term::Multiply(c, w) => row.push((i, c * w.eval(&x))),
                Term::Derivative { coord, order, coeff, left, right, link } => {
                    let k = grid.axis_of(*coord).expect("validated at construction");
                    let axis = grid.axes()[k];
                    let h = axis.h();
                    let stride = grid.stride(*coord).expect("validated");
                    let lw = left.as_ref().map_or(1.0, |e| e.eval(&x));
                    let c = coeff * lw;
                    let rw = |pos: usize| right.as_ref().map_or(1.0, |e| e.eval(&grid.position(pos)));
                    let u = |s: f64| link.as_ref().map_or(C64::new(1.0, 0.0), |l| link_phase(l, &x, *coord, s));
                    let has_next = idx[k] + 1 < axis.n;
                    let has_prev = idx[k] > 0;
                    match order {
                        1 => {
                            let f = c / (2.0 * h);
                            if has_next {
                                row.push((i + stride, f * u(h) * rw(i + stride)));
                            }
                            if has_prev {
                                row.push((i - stride, -f * u(-h) * rw(i - stride)));
                            }
                        }
                        _ => {
                            let f = c / (h * h);
                            row.push((i, -2.0 * f * rw(i)));
                            if has_next {
                                row.push((i + stride, f * u(h) * rw(i + stride)));
                            }
                            if has_prev {
                                row.push((i - stride, f * u(-h) * rw(i - stride)));
                            }
                        }
                    }
                }
            }
        }
        row
    }

    /// Apply to a field on the same grid, Dirichlet zero padding.
    pub fn apply(&self, f: &ComplexField) -> Result<ComplexField> {
        self.apply_with(Exec::current(), f)
    }

    pub fn apply_with(&self, exec: Exec, f: &ComplexField) -> Result<ComplexField> {
        if f.grid != self.grid {
            return Err(Error::GridMismatch);
        }
        let mut out = vec![C64::new(0.0, 0.0); f.len()];
        fill_indexed(exec, &mut out, |i| self.stencil_row(i).into_iter().map(|(j, v)| v * f.values[j]).sum());
        ComplexField::from_values(&self.grid, out)
    }

    /// Sparse matrix in the grid's row-major ordering.
    pub fn matrix(&self) -> CsrMatrix {
        let n = self.grid.len();
        let rows = map_range(Exec::current(), n, |i| self.stencil_row(i));
        CsrMatrix::from_rows(n, rows)
    }
}

fn gauge_component(p: &PotentialSpec, mu: usize) -> Option<Link> {
    let a = p.a[mu].clone();
    if p.q == 0.0 || a.as_constant() == Some(0.0) {
        None
    } else {
        Some(Link { q: p.q, a })
    }
}

/// Covariant first difference ∇_μ = ∂_μ + iqA_μ along x^mu.
pub fn covariant_first(p: &PotentialSpec, grid: &Grid, mu: usize, coupling: Coupling) -> Result<DiffOp> {
    grid.axis(mu)?;
    let one = C64::new(1.0, 0.0);
    let link = gauge_component(p, mu);
    match (coupling, link) {
        (_, None) => DiffOp::difference(grid, mu, 1),
        (Coupling::Peierls, Some(l)) => DiffOp::from_terms(
            grid,
            vec![Term::Derivative { coord: mu, order: 1, coeff: one, left: None, right: None, link: Some(l) }],
        ),
        (Coupling::Minimal, Some(l)) => DiffOp::difference(grid, mu, 1)?
            .plus(&DiffOp::multiply(grid, l.a).scaled(C64::new(0.0, l.q))),
    }
}

/// Covariant second difference ∇_μ∇_μ along x^mu (compact three-point form).
pub fn covariant_second(p: &PotentialSpec, grid: &Grid, mu: usize, coupling: Coupling) -> Result<DiffOp> {
    grid.axis(mu)?;
    let one = C64::new(1.0, 0.0);
    let link = gauge_component(p, mu);
    match (coupling, link) {
        (_, None) => DiffOp::difference(grid, mu, 2),
        (Coupling::Peierls, Some(l)) => DiffOp::from_terms(
            grid,
            vec![Term::Derivative { coord: mu, order: 2, coeff: one, left: None, right: None, link: Some(l) }],
        ),
        (Coupling::Minimal, Some(l)) => {
            // ∂² + iq(A∂ + ∂A) - q²A², symmetric so the result stays Hermitian.
            let iq = C64::new(0.0, l.q);
            let terms = vec![
                Term::Derivative { coord: mu, order: 2, coeff: one, left: None, right: None, link: None },
                Term::Derivative { coord: mu, order: 1, coeff: iq, left: Some(l.a.clone()), right: None, link: None },
                Term::Derivative { coord: mu, order: 1, coeff: iq, left: None, right: Some(l.a.clone()), link: None },
                Term::Multiply(C64::from(-l.q * l.q), l.a.clone().powi(2)),
            ];
            DiffOp::from_terms(grid, terms)
        }
    }
}

/// Factor s_μ with π^μ = s_μ ∇_μ: i for μ = 0, -i for spatial μ.
pub fn pi_prefactor(mu: usize) -> C64 {
    if mu == 0 {
        C64::new(0.0, 1.0)
    } else {
        C64::new(0.0, -1.0)
    }
}

/// Kinetic momentum π^μ on a grid: π⁰ = i∇₀, πʲ = -i∇ⱼ.
pub fn pi_operator(mu: usize, p: &PotentialSpec, grid: &Grid, coupling: Coupling) -> Result<DiffOp> {
    if mu > 3 {
        return Err(Error::CoordinateMismatch(mu));
    }
    Ok(covariant_first(p, grid, mu, coupling)?.scaled(pi_prefactor(mu)))
}

/// (πʲ)² = -∇ⱼ² in the compact form used by the Pauli operator.
pub fn pi_squared(mu: usize, p: &PotentialSpec, grid: &Grid, coupling: Coupling) -> Result<DiffOp> {
    let s = pi_prefactor(mu);
    Ok(covariant_second(p, grid, mu, coupling)?.scaled(s * s))
}
