//! Transverse Pauli eigenproblem over (x¹, x²) and the first-order ladder
//! pair linking its two spin blocks.

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::lattice::{pi_squared, ComplexField, Coupling, CsrMatrix, DiffOp, Grid};
use crate::linalg::dense::{csr_to_dense, hermitian_eigen};
use crate::linalg::{count_below, lowest_eigenpairs, BandLdl, SubspaceOptions};
use crate::potential::PotentialSpec;
use crate::Branch;

/// Largest block solved with the dense Hermitian eigensolver.
pub const DENSE_LIMIT: usize = 1024;

const HERMITIAN_TOL: f64 = 1e-12;

/// Spin-block Pauli operator K ∓ qH(x)σ³ with K = (π¹)² + (π²)².
///
/// `upper` acts on ψ and `lower` on β. For `Dotted1` the upper block is
/// K - qH, for `Dotted2` it is K + qH.
#[derive(Debug, Clone)]
pub struct PauliOperator {
    pub grid: Grid,
    pub branch: Branch,
    pub potential: PotentialSpec,
    pub coupling: Coupling,
    pub upper: CsrMatrix,
    pub lower: CsrMatrix,
    /// K alone, used for kinetic scales.
    pub kinetic: CsrMatrix,
    /// max |qH| over the grid.
    pub qh_max: f64,
}

fn check_transverse_grid(grid: &Grid) -> Result<()> {
    if grid.axes().len() != 2 || grid.axis_of(1) != Some(0) || grid.axis_of(2) != Some(1) {
        return Err(Error::InvalidAxis(format!("transverse grid must be labelled (x1, x2), got {grid}")));
    }
    Ok(())
}

pub fn build_pauli_operator(p: &PotentialSpec, grid: &Grid, branch: Branch, coupling: Coupling) -> Result<PauliOperator> {
    check_transverse_grid(grid)?;
    let k = pi_squared(1, p, grid, coupling)?.plus(&pi_squared(2, p, grid, coupling)?)?;
    let h = p.field_strengths().h;
    let qh = DiffOp::multiply(grid, h.clone()).scaled(C64::from(p.q));
    let sign = match branch {
        Branch::Dotted1 => -1.0,
        Branch::Dotted2 => 1.0,
    };
    let upper = k.plus(&qh.scaled(C64::from(sign)))?.matrix();
    let lower = k.plus(&qh.scaled(C64::from(-sign)))?.matrix();
    for m in [&upper, &lower] {
        let d = m.hermitian_defect();
        if d > HERMITIAN_TOL * m.norm_inf().max(1.0) {
            return Err(Error::NonHermitian(d));
        }
    }
    let qh_max = (0..grid.len()).map(|i| (p.q * h.eval(&grid.position(i))).abs()).fold(0.0, f64::max);
    Ok(PauliOperator {
        grid: grid.clone(),
        branch,
        potential: p.clone(),
        coupling,
        upper,
        lower,
        kinetic: k.matrix(),
        qh_max,
    })
}

impl PauliOperator {
    /// Full 2N×2N block-diagonal matrix acting on (ψ, β).
    pub fn matrix(&self) -> CsrMatrix {
        let n = self.grid.len();
        let rows = (0..2 * n)
            .map(|i| {
                if i < n {
                    self.upper.row(i).collect()
                } else {
                    self.lower.row(i - n).map(|(j, v)| (j + n, v)).collect()
                }
            })
            .collect();
        CsrMatrix::from_rows(2 * n, rows)
    }

    /// Lowest Dirichlet eigenvalue of K without field, Σ (π/Lᵢ)².
    pub fn box_scale(&self) -> f64 {
        self.grid.axes().iter().map(|a| (std::f64::consts::PI / a.length()).powi(2)).sum()
    }

    /// Lower bound for both blocks: K ≥ 0, so M ≥ -max|qH|.
    pub fn lower_bound(&self) -> f64 {
        -self.qh_max - 1e-3 * self.box_scale()
    }

    /// Window within which eigenvalues of the two blocks count as equal.
    pub fn partner_window(&self, lambda2: f64) -> f64 {
        0.02 * lambda2.abs().max(self.qh_max).max(self.box_scale())
    }

    /// Ladder operator mapping ψ to mβ: π¹ + iπ² for dotted1, π¹ - iπ² for dotted2.
    pub fn ladder(&self) -> Result<CsrMatrix> {
        let p1 = crate::lattice::pi_operator(1, &self.potential, &self.grid, self.coupling)?.matrix();
        let p2 = crate::lattice::pi_operator(2, &self.potential, &self.grid, self.coupling)?.matrix();
        let s = match self.branch {
            Branch::Dotted1 => 1.0,
            Branch::Dotted2 => -1.0,
        };
        Ok(p1.lin_comb(C64::new(1.0, 0.0), &p2, C64::new(0.0, s)))
    }

    /// ⟨f, K f⟩ / ⟨f, f⟩.
    pub fn kinetic_scale(&self, f: &ComplexField) -> f64 {
        let kf = self.kinetic.matvec(&f.values);
        let num: C64 = f.values.iter().zip(&kf).map(|(a, b)| a.conj() * b).sum();
        let den: f64 = f.values.iter().map(|a| a.norm_sqr()).sum();
        if den > 0.0 {
            num.re / den
        } else {
            0.0
        }
    }
}

/// Which spin block an eigenvector came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpinBlock {
    Upper,
    Lower,
}

/// One separated transverse mode (λ², ψ, β).
#[derive(Debug, Clone)]
pub struct TransverseMode {
    pub lambda2: f64,
    pub psi: ComplexField,
    pub beta: ComplexField,
    pub branch: Branch,
    pub block: SpinBlock,
    /// Whether the other block has an eigenvalue at the same λ²; if so
    /// the missing half was regenerated from the ladder relation.
    pub partnered: bool,
    /// ‖Mv - λ²v‖ of the raw eigenvector (Euclidean, unit v).
    pub eigen_residual: f64,
}

fn field_from(grid: &Grid, v: Vec<C64>) -> Result<ComplexField> {
    ComplexField::from_values(grid, v)
}

fn has_partner(other: &CsrMatrix, other_vals: Option<&[f64]>, lambda2: f64, delta: f64) -> Result<bool> {
    match other_vals {
        Some(vals) => Ok(vals.iter().any(|v| (v - lambda2).abs() <= delta)),
        None => Ok(count_below(other, lambda2 + delta)? > count_below(other, lambda2 - delta)?),
    }
}

/// Fix the (ψ, β) split of a raw block eigenvector.
///
/// An upper-block vector keeps ψ; if the lower block has a partner level
/// β becomes Lψ/m, otherwise β stays zero. A lower-block vector keeps β and
/// regenerates ψ = mL†β/λ² when a partner exists. The pair is normalised
/// to ‖ψ‖² + ‖β‖² = 1 in the grid norm.
pub fn canonicalize(
    op: &PauliOperator,
    block: SpinBlock,
    lambda2: f64,
    v: Vec<C64>,
    eigen_residual: f64,
    m: f64,
    partnered: bool,
) -> Result<TransverseMode> {
    if m <= 0.0 {
        return Err(Error::ZeroMass(m));
    }
    let n = op.grid.len();
    let zero = vec![C64::new(0.0, 0.0); n];
    let (psi, beta) = match (block, partnered) {
        (SpinBlock::Upper, false) => (v, zero),
        (SpinBlock::Lower, false) => (zero, v),
        (SpinBlock::Upper, true) => {
            let b = op.ladder()?.matvec(&v).into_iter().map(|x| x / m).collect();
            (v, b)
        }
        (SpinBlock::Lower, true) => {
            let a = op.ladder()?.dagger().matvec(&v).into_iter().map(|x| x * m / lambda2).collect();
            (a, v)
        }
    };
    let psi = field_from(&op.grid, psi)?;
    let beta = field_from(&op.grid, beta)?;
    let norm = (psi.norm_sqr() + beta.norm_sqr()).sqrt();
    if norm == 0.0 {
        return Err(Error::ZeroNorm);
    }
    let s = C64::from(1.0 / norm);
    Ok(TransverseMode {
        lambda2,
        psi: psi.scale(s),
        beta: beta.scale(s),
        branch: op.branch,
        block,
        partnered,
        eigen_residual,
    })
}

struct BlockPairs {
    values: Vec<f64>,
    vectors: Vec<Vec<C64>>,
    residuals: Vec<f64>,
    /// Full spectrum when the dense path was taken.
    all_values: Option<Vec<f64>>,
}

/// How each spin block is diagonalised.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SolverMethod {
    /// Dense up to [`DENSE_LIMIT`] rows, iterative above.
    #[default]
    Auto,
    Dense,
    Iterative,
}

impl std::str::FromStr for SolverMethod {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "auto" => Ok(SolverMethod::Auto),
            "dense" => Ok(SolverMethod::Dense),
            "iterative" => Ok(SolverMethod::Iterative),
            other => Err(Error::Unsupported(format!("solver method '{other}' (expected auto, dense or iterative)"))),
        }
    }
}

fn solve_block(m: &CsrMatrix, k: usize, lower: f64, opts: &SubspaceOptions, method: SolverMethod) -> Result<BlockPairs> {
    let n = m.nrows;
    let dense = match method {
        SolverMethod::Auto => n <= DENSE_LIMIT,
        SolverMethod::Dense => true,
        SolverMethod::Iterative => false,
    };
    if dense {
        let (vals, vecs) = hermitian_eigen(csr_to_dense(m));
        let k = k.min(n);
        let vectors: Vec<Vec<C64>> = (0..k).map(|j| vecs.column(j).iter().cloned().collect()).collect();
        let residuals = vectors
            .iter()
            .zip(&vals)
            .map(|(v, l)| m.matvec(v).iter().zip(v).map(|(a, b)| (a - l * b).norm_sqr()).sum::<f64>().sqrt())
            .collect();
        Ok(BlockPairs { values: vals[..k].to_vec(), vectors, residuals, all_values: Some(vals) })
    } else {
        let r = lowest_eigenpairs(m, k.min(n), lower, opts)?;
        Ok(BlockPairs { values: r.values, vectors: r.vectors, residuals: r.residuals, all_values: None })
    }
}

/// The `k` lowest modes of the Pauli operator, ascending in λ².
///
/// Both spin blocks are solved separately (they decouple) and merged.
pub fn solve_transverse(op: &PauliOperator, k: usize, m: f64, opts: &SubspaceOptions) -> Result<Vec<TransverseMode>> {
    solve_transverse_with(op, k, m, opts, SolverMethod::Auto)
}

/// [`solve_transverse`] with an explicit choice of eigensolver.
pub fn solve_transverse_with(
    op: &PauliOperator,
    k: usize,
    m: f64,
    opts: &SubspaceOptions,
    method: SolverMethod,
) -> Result<Vec<TransverseMode>> {
    let dim = 2 * op.grid.len();
    if k == 0 || k > dim {
        return Err(Error::TooManyModes { requested: k, dim });
    }
    let lower = op.lower_bound();
    let (up, down) = crate::parallel::join(
        crate::parallel::Exec::current(),
        || solve_block(&op.upper, k, lower, opts, method),
        || solve_block(&op.lower, k, lower, opts, method),
    );
    let (up, down) = (up?, down?);
    let mut raw: Vec<(f64, SpinBlock, usize)> = up
        .values
        .iter()
        .enumerate()
        .map(|(i, &v)| (v, SpinBlock::Upper, i))
        .chain(down.values.iter().enumerate().map(|(i, &v)| (v, SpinBlock::Lower, i)))
        .collect();
    raw.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    raw.truncate(k);
    raw.into_iter()
        .map(|(l, block, i)| {
            let (mine, other, other_pairs) = match block {
                SpinBlock::Upper => (&up, &op.lower, &down),
                SpinBlock::Lower => (&down, &op.upper, &up),
            };
            let partnered = has_partner(other, other_pairs.all_values.as_deref(), l, op.partner_window(l))?;
            canonicalize(op, block, l, mine.vectors[i].clone(), mine.residuals[i], m, partnered)
        })
        .collect()
}

/// Upper-block eigenvector reached by inverse iteration from `seed`.
///
/// The shift defaults to the Rayleigh quotient of the seed, so a seed that
/// already approximates a mode (for instance a continuum eigenfunction
/// sampled on the grid) converges to the discrete mode it approximates.
/// Within a degenerate level, edge states of the box cross the bulk value
/// as h changes; keep `iterations` small (one or two sweeps already remove
/// the other levels) so the result does not lock onto such a crossing.
pub fn seeded_mode(
    op: &PauliOperator,
    sigma: Option<f64>,
    seed: &ComplexField,
    m: f64,
    iterations: usize,
) -> Result<TransverseMode> {
    if seed.grid != op.grid {
        return Err(Error::GridMismatch);
    }
    let rayleigh = |x: &[C64]| {
        let mx = op.upper.matvec(x);
        let nn: f64 = x.iter().map(|v| v.norm_sqr()).sum();
        let rho = x.iter().zip(&mx).map(|(a, b)| a.conj() * b).sum::<C64>().re / nn;
        let res = mx.iter().zip(x).map(|(a, b)| (a - rho * b).norm_sqr()).sum::<f64>().sqrt() / nn.sqrt();
        (rho, res)
    };
    let mut x = seed.values.clone();
    let shift = sigma.unwrap_or_else(|| rayleigh(&x).0);
    let fact = BandLdl::factor(&op.upper, shift)?;
    for _ in 0..iterations {
        x = fact.solve(&x);
        let nx = x.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
        if nx == 0.0 || !nx.is_finite() {
            return Err(Error::ConvergenceFailure("inverse iteration lost the seed".into()));
        }
        x.iter_mut().for_each(|v| *v /= nx);
    }
    let (lambda2, res) = rayleigh(&x);
    let partnered = has_partner(&op.lower, None, lambda2, op.partner_window(lambda2))?;
    canonicalize(op, SpinBlock::Upper, lambda2, x, res, m, partnered)
}

/// Relative residuals of the ladder pair
/// Lψ = mβ and L†β = (λ²/m)ψ, where L = π¹ ± iπ² per branch.
///
/// Both are normalised by the natural size of each side: √s‖ψ‖ and
/// (s/m)‖ψ‖ with s the kinetic scale of ψ.
pub fn ladder_residuals(op: &PauliOperator, mode: &TransverseMode, m: f64) -> Result<(f64, f64)> {
    if m <= 0.0 {
        return Err(Error::ZeroMass(m));
    }
    let (psi, beta) = (&mode.psi, &mode.beta);
    let l = op.ladder()?;
    let lpsi = ComplexField::from_values(&op.grid, l.matvec(&psi.values))?;
    let ldb = ComplexField::from_values(&op.grid, l.dagger().matvec(&beta.values))?;
    let r1 = lpsi.lin_comb(C64::new(1.0, 0.0), beta, C64::from(-m))?.norm();
    let r2 = ldb.lin_comb(C64::new(1.0, 0.0), psi, C64::from(-mode.lambda2 / m))?.norm();
    let pn = psi.norm();
    if pn == 0.0 {
        // Unpartnered spin-down mode: Lψ = mβ cannot hold with ψ ≡ 0, and
        // the first residual comes out as 1.
        let bn = beta.norm();
        let s = op.kinetic_scale(beta).max(f64::MIN_POSITIVE);
        return Ok((r1 / (m * bn), r2 / (s.sqrt() * bn)));
    }
    let s = op.kinetic_scale(psi).max(f64::MIN_POSITIVE);
    Ok((r1 / (s.sqrt() * pn), r2 / (s / m * pn)))
}

/// Leading truncation size h²s/6 of the central differences for a mode
/// with kinetic scale s.
pub fn truncation_estimate(op: &PauliOperator, mode: &TransverseMode) -> f64 {
    let f = if mode.psi.norm() > 0.0 { &mode.psi } else { &mode.beta };
    let h = op.grid.h_max();
    h * h * op.kinetic_scale(f) / 6.0
}

/// Seed for the `level`-th Landau level of a uniform field in symmetric
/// gauge centred on the origin: (L†)^level exp(-|qH| r²/4).
///
/// The Gaussian is annihilated by L only when qH > 0 for dotted1 and
/// qH < 0 for dotted2; other combinations are rejected.
pub fn landau_seed(op: &PauliOperator, level: usize) -> Result<ComplexField> {
    let h = op.potential.field_strengths().h;
    let qh = match h.as_constant() {
        Some(h) => op.potential.q * h,
        None => return Err(Error::Unsupported("Landau seeds need a uniform field H".into())),
    };
    let ok = match op.branch {
        Branch::Dotted1 => qh > 0.0,
        Branch::Dotted2 => qh < 0.0,
    };
    if !ok {
        return Err(Error::IncompatibleParameters(format!(
            "qH = {qh} has no Landau ground state annihilated by the {} ladder",
            op.branch.label()
        )));
    }
    let w = qh.abs() / 4.0;
    let mut v: Vec<C64> = (0..op.grid.len())
        .map(|i| {
            let x = op.grid.position(i);
            C64::from((-w * (x[1] * x[1] + x[2] * x[2])).exp())
        })
        .collect();
    if level > 0 {
        let raise = op.ladder()?.dagger();
        for _ in 0..level {
            v = raise.matvec(&v);
        }
    }
    field_from(&op.grid, v)
}
