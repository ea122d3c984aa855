use std::fmt;

use crate::error::{Error, Result};

/// One Cartesian axis carrying only interior points; the Dirichlet boundary
/// sits at `min` and `max`, so the spacing is `(max - min) / (n + 1)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AxisSpec {
    /// Which spacetime coordinate x^coord this axis samples.
    pub coord: usize,
    pub min: f64,
    pub max: f64,
    pub n: usize,
}

impl AxisSpec {
    pub fn new(coord: usize, min: f64, max: f64, n: usize) -> Result<Self> {
        if coord > 3 {
            return Err(Error::InvalidAxis(format!("coordinate x{coord} does not exist")));
        }
        if !(max > min) || !min.is_finite() || !max.is_finite() {
            return Err(Error::InvalidAxis(format!("need max > min, got [{min}, {max}]")));
        }
        if n == 0 {
            return Err(Error::InvalidAxis("need at least one interior point".into()));
        }
        Ok(AxisSpec { coord, min, max, n })
    }

    pub fn h(&self) -> f64 {
        (self.max - self.min) / (self.n + 1) as f64
    }

    pub fn point(&self, i: usize) -> f64 {
        self.min + (i + 1) as f64 * self.h()
    }

    pub fn length(&self) -> f64 {
        self.max - self.min
    }

    /// Same interval with `2n + 1` points, i.e. half the spacing.
    pub fn refined(&self) -> AxisSpec {
        AxisSpec { n: 2 * self.n + 1, ..*self }
    }

    /// Whether reflecting about the origin maps grid points onto grid points.
    pub fn is_symmetric(&self) -> bool {
        (self.min + self.max).abs() <= 1e-12 * self.length()
    }
}

/// Tensor-product grid over one to four distinct coordinates, stored
/// row-major (the last axis varies fastest).
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    axes: Vec<AxisSpec>,
}

impl Grid {
    pub fn new(axes: Vec<AxisSpec>) -> Result<Self> {
        if axes.is_empty() || axes.len() > 4 {
            return Err(Error::InvalidAxis(format!("grid needs 1..=4 axes, got {}", axes.len())));
        }
        let mut seen = [false; 4];
        for a in &axes {
            if std::mem::replace(&mut seen[a.coord], true) {
                return Err(Error::InvalidAxis(format!("coordinate x{} repeated", a.coord)));
            }
        }
        Ok(Grid { axes })
    }

    /// Square transverse grid over (x¹, x²).
    pub fn transverse(min: f64, max: f64, n: usize) -> Result<Self> {
        Grid::new(vec![AxisSpec::new(1, min, max, n)?, AxisSpec::new(2, min, max, n)?])
    }

    /// Longitudinal grid over (x⁰, x³).
    pub fn longitudinal(t: (f64, f64, usize), z: (f64, f64, usize)) -> Result<Self> {
        Grid::new(vec![AxisSpec::new(0, t.0, t.1, t.2)?, AxisSpec::new(3, z.0, z.1, z.2)?])
    }

    /// One-dimensional grid along x³ for stationary profiles.
    pub fn along_x3(min: f64, max: f64, n: usize) -> Result<Self> {
        Grid::new(vec![AxisSpec::new(3, min, max, n)?])
    }

    pub fn axes(&self) -> &[AxisSpec] {
        &self.axes
    }

    pub fn axis_of(&self, coord: usize) -> Option<usize> {
        self.axes.iter().position(|a| a.coord == coord)
    }

    pub fn axis(&self, coord: usize) -> Result<&AxisSpec> {
        self.axis_of(coord).map(|k| &self.axes[k]).ok_or(Error::CoordinateMismatch(coord))
    }

    pub fn len(&self) -> usize {
        self.axes.iter().map(|a| a.n).product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Stride (in flat index units) of the axis sampling `coord`.
    pub fn stride(&self, coord: usize) -> Result<usize> {
        let k = self.axis_of(coord).ok_or(Error::CoordinateMismatch(coord))?;
        Ok(self.axes[k + 1..].iter().map(|a| a.n).product())
    }

    /// Measure of one grid cell, the product of spacings.
    pub fn cell_volume(&self) -> f64 {
        self.axes.iter().map(|a| a.h()).product()
    }

    pub fn multi_index(&self, mut flat: usize) -> [usize; 4] {
        let mut idx = [0usize; 4];
        for k in (0..self.axes.len()).rev() {
            idx[k] = flat % self.axes[k].n;
            flat /= self.axes[k].n;
        }
        idx
    }

    pub fn flat_index(&self, idx: &[usize]) -> usize {
        self.axes.iter().zip(idx).fold(0, |acc, (a, &i)| acc * a.n + i)
    }

    /// Spacetime position of a flat index; coordinates not on the grid are 0.
    pub fn position(&self, flat: usize) -> [f64; 4] {
        let idx = self.multi_index(flat);
        let mut x = [0.0; 4];
        for (k, a) in self.axes.iter().enumerate() {
            x[a.coord] = a.point(idx[k]);
        }
        x
    }

    /// Same domain, every spacing halved.
    pub fn refined(&self) -> Grid {
        Grid { axes: self.axes.iter().map(|a| a.refined()).collect() }
    }

    /// Largest spacing over all axes.
    pub fn h_max(&self) -> f64 {
        self.axes.iter().map(|a| a.h()).fold(0.0, f64::max)
    }
}

impl fmt::Display for Grid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, a) in self.axes.iter().enumerate() {
            if k > 0 {
                write!(f, " x ")?;
            }
            write!(f, "x{}:[{}, {}]/{}", a.coord, a.min, a.max, a.n)?;
        }
        Ok(())
    }
}
