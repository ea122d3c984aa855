use num_complex::Complex64 as C64;

use super::grid::Grid;
use crate::error::{Error, Result};
use crate::parallel::{fill_indexed, Exec};

/// Complex samples on the interior points of a [`Grid`].
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexField {
    pub grid: Grid,
    pub values: Vec<C64>,
}

impl ComplexField {
    pub fn zeros(grid: &Grid) -> Self {
        ComplexField { grid: grid.clone(), values: vec![C64::new(0.0, 0.0); grid.len()] }
    }

    pub fn from_values(grid: &Grid, values: Vec<C64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::GridMismatch);
        }
        Ok(ComplexField { grid: grid.clone(), values })
    }

    /// Sample a function of the spacetime position.
    pub fn sample<F>(grid: &Grid, f: F) -> Self
    where
        F: Fn([f64; 4]) -> C64 + Sync + Send,
    {
        let mut values = vec![C64::new(0.0, 0.0); grid.len()];
        fill_indexed(Exec::current(), &mut values, |i| f(grid.position(i)));
        ComplexField { grid: grid.clone(), values }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    fn check(&self, other: &Self) -> Result<()> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch);
        }
        Ok(())
    }

    /// ⟨f, g⟩ = vol · Σ conj(f) g.
    pub fn inner(&self, other: &Self) -> Result<C64> {
        self.check(other)?;
        let s: C64 = self.values.iter().zip(&other.values).map(|(a, b)| a.conj() * b).sum();
        Ok(s * self.grid.cell_volume())
    }

    pub fn norm_sqr(&self) -> f64 {
        self.values.iter().map(|v| v.norm_sqr()).sum::<f64>() * self.grid.cell_volume()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    pub fn scale(&self, c: C64) -> Self {
        ComplexField { grid: self.grid.clone(), values: self.values.iter().map(|v| v * c).collect() }
    }

    pub fn conj(&self) -> Self {
        ComplexField { grid: self.grid.clone(), values: self.values.iter().map(|v| v.conj()).collect() }
    }

    /// a·self + b·other.
    pub fn lin_comb(&self, a: C64, other: &Self, b: C64) -> Result<Self> {
        self.check(other)?;
        let values = self.values.iter().zip(&other.values).map(|(x, y)| a * x + b * y).collect();
        Ok(ComplexField { grid: self.grid.clone(), values })
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.lin_comb(C64::new(1.0, 0.0), other, C64::new(1.0, 0.0))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.lin_comb(C64::new(1.0, 0.0), other, C64::new(-1.0, 0.0))
    }

    /// Pointwise product with a real or complex multiplier field.
    pub fn mul_pointwise(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let values = self.values.iter().zip(&other.values).map(|(x, y)| x * y).collect();
        Ok(ComplexField { grid: self.grid.clone(), values })
    }

    /// Mirror the field along the axis sampling `coord` (x^coord → -x^coord).
    /// Needs an axis symmetric about the origin.
    pub fn reflect(&self, coord: usize) -> Result<Self> {
        let k = self.grid.axis_of(coord).ok_or(Error::CoordinateMismatch(coord))?;
        let axis = self.grid.axes()[k];
        if !axis.is_symmetric() {
            return Err(Error::InvalidAxis(format!("axis x{coord} is not symmetric about 0")));
        }
        let n = axis.n;
        let mut out = self.values.clone();
        for (flat, o) in out.iter_mut().enumerate() {
            let mut idx = self.grid.multi_index(flat);
            idx[k] = n - 1 - idx[k];
            *o = self.values[self.grid.flat_index(&idx[..self.grid.axes().len()])];
        }
        Ok(ComplexField { grid: self.grid.clone(), values: out })
    }

    /// Normalise to unit grid norm.
    pub fn normalized(&self) -> Result<Self> {
        let n = self.norm();
        if n == 0.0 {
            return Err(Error::ZeroNorm);
        }
        Ok(self.scale(C64::from(1.0 / n)))
    }
}
