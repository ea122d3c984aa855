//! Gamma matrices in the spinor (Weyl) representation, the four diagonal
//! projectors, similarity transforms and charge conjugation.

use std::ops::{Add, Index, IndexMut, Mul, Neg, Sub};

use nalgebra::Matrix4;
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};

pub type C64 = Complex64;

const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);
const I: C64 = C64::new(0.0, 1.0);

/// Dense 4x4 complex matrix, row-major.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComplexMatrix4(pub [[C64; 4]; 4]);

/// 2x2 complex matrix used for the Pauli set.
pub type Matrix2c = [[C64; 2]; 2];

impl ComplexMatrix4 {
    pub fn zero() -> Self {
        ComplexMatrix4([[ZERO; 4]; 4])
    }

    pub fn identity() -> Self {
        Self::diag([ONE; 4])
    }

    pub fn diag(d: [C64; 4]) -> Self {
        let mut m = Self::zero();
        for (i, v) in d.into_iter().enumerate() {
            m.0[i][i] = v;
        }
        m
    }

    /// Assemble from 2x2 blocks `[[a, b], [c, d]]`.
    pub fn from_blocks(a: Matrix2c, b: Matrix2c, c: Matrix2c, d: Matrix2c) -> Self {
        let mut m = Self::zero();
        for i in 0..2 {
            for j in 0..2 {
                m.0[i][j] = a[i][j];
                m.0[i][j + 2] = b[i][j];
                m.0[i + 2][j] = c[i][j];
                m.0[i + 2][j + 2] = d[i][j];
            }
        }
        m
    }

    pub fn scale(&self, s: C64) -> Self {
        let mut m = *self;
        m.0.iter_mut().flatten().for_each(|x| *x *= s);
        m
    }

    pub fn dagger(&self) -> Self {
        let mut m = Self::zero();
        for i in 0..4 {
            for j in 0..4 {
                m.0[i][j] = self.0[j][i].conj();
            }
        }
        m
    }

    pub fn conj(&self) -> Self {
        let mut m = *self;
        m.0.iter_mut().flatten().for_each(|x| *x = x.conj());
        m
    }

    pub fn trace(&self) -> C64 {
        (0..4).map(|i| self.0[i][i]).sum()
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> f64 {
        self.0.iter().flatten().map(|x| x.norm()).fold(0.0, f64::max)
    }

    pub fn diagonal(&self) -> [C64; 4] {
        [self.0[0][0], self.0[1][1], self.0[2][2], self.0[3][3]]
    }

    /// True when every off-diagonal entry is exactly zero.
    pub fn is_diagonal(&self) -> bool {
        (0..4).all(|i| (0..4).all(|j| i == j || self.0[i][j] == ZERO))
    }

    fn to_na(self) -> Matrix4<C64> {
        Matrix4::from_fn(|i, j| self.0[i][j])
    }

    fn from_na(m: &Matrix4<C64>) -> Self {
        let mut out = Self::zero();
        for i in 0..4 {
            for j in 0..4 {
                out.0[i][j] = m[(i, j)];
            }
        }
        out
    }

    pub fn determinant(&self) -> C64 {
        self.to_na().determinant()
    }

    pub fn inverse(&self) -> Option<Self> {
        self.to_na().try_inverse().map(|m| Self::from_na(&m))
    }

    pub fn apply(&self, v: &[C64; 4]) -> [C64; 4] {
        let mut out = [ZERO; 4];
        for (i, o) in out.iter_mut().enumerate() {
            *o = (0..4).map(|j| self.0[i][j] * v[j]).sum();
        }
        out
    }

    pub fn anticommutator(&self, other: &Self) -> Self {
        *self * *other + *other * *self
    }
}

impl Index<(usize, usize)> for ComplexMatrix4 {
    type Output = C64;
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.0[i][j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix4 {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.0[i][j]
    }
}

impl Mul for ComplexMatrix4 {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        let mut m = Self::zero();
        for i in 0..4 {
            for j in 0..4 {
                m.0[i][j] = (0..4).map(|k| self.0[i][k] * rhs.0[k][j]).sum();
            }
        }
        m
    }
}

impl Add for ComplexMatrix4 {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        let mut m = self;
        for i in 0..4 {
            for j in 0..4 {
                m.0[i][j] += rhs.0[i][j];
            }
        }
        m
    }
}

impl Sub for ComplexMatrix4 {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        self + (-rhs)
    }
}

impl Neg for ComplexMatrix4 {
    type Output = Self;
    fn neg(self) -> Self {
        self.scale(-ONE)
    }
}

/// Minkowski metric diag(1, -1, -1, -1).
pub const METRIC: [f64; 4] = [1.0, -1.0, -1.0, -1.0];

/// The Pauli matrices with `pauli[0]` the 2x2 identity.
pub fn pauli() -> [Matrix2c; 4] {
    [
        [[ONE, ZERO], [ZERO, ONE]],
        [[ZERO, ONE], [ONE, ZERO]],
        [[ZERO, -I], [I, ZERO]],
        [[ONE, ZERO], [ZERO, -ONE]],
    ]
}

fn neg2(m: Matrix2c) -> Matrix2c {
    [[-m[0][0], -m[0][1]], [-m[1][0], -m[1][1]]]
}

/// A complete set of Dirac matrices in some representation.
#[derive(Debug, Clone, PartialEq)]
pub struct GammaSet {
    pub gamma: [ComplexMatrix4; 4],
    pub gamma5: ComplexMatrix4,
    pub metric: [f64; 4],
    pub pauli: [Matrix2c; 4],
}

/// Spinor representation: γ⁰ has identity off-diagonal blocks, γʲ has blocks
/// (-σʲ, σʲ). γ⁵ is computed as iγ⁰γ¹γ²γ³.
pub fn build_spinor_rep() -> GammaSet {
    let s = pauli();
    let z = [[ZERO; 2]; 2];
    let g0 = ComplexMatrix4::from_blocks(z, s[0], s[0], z);
    let gj = |j: usize| ComplexMatrix4::from_blocks(z, neg2(s[j]), s[j], z);
    let gamma = [g0, gj(1), gj(2), gj(3)];
    let gamma5 = (gamma[0] * gamma[1] * gamma[2] * gamma[3]).scale(I);
    GammaSet { gamma, gamma5, metric: METRIC, pauli: s }
}

impl GammaSet {
    /// Largest deviation of {γ^μ, γ^ν} from 2g^{μν}I over all index pairs.
    pub fn clifford_defect(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for mu in 0..4 {
            for nu in 0..4 {
                let mut target = ComplexMatrix4::zero();
                if mu == nu {
                    target = ComplexMatrix4::identity().scale(C64::from(2.0 * self.metric[mu]));
                }
                let d = self.gamma[mu].anticommutator(&self.gamma[nu]) - target;
                worst = worst.max(d.max_abs());
            }
        }
        worst
    }
}

/// Which of the four one-slot-zeroing projectors.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ProjectorId {
    P1,
    P2,
    P3,
    P4,
}

impl ProjectorId {
    pub const ALL: [ProjectorId; 4] = [ProjectorId::P1, ProjectorId::P2, ProjectorId::P3, ProjectorId::P4];

    /// Signs of (γ⁵, γ⁰γ³, iγ¹γ²) in ¼(3 + a γ⁵ + b γ⁰γ³ + c iγ¹γ²).
    pub fn signs(self) -> [f64; 3] {
        match self {
            ProjectorId::P1 => [-1.0, -1.0, -1.0],
            ProjectorId::P2 => [-1.0, 1.0, 1.0],
            ProjectorId::P3 => [1.0, 1.0, -1.0],
            ProjectorId::P4 => [1.0, -1.0, 1.0],
        }
    }
}

/// Covariant projector polynomial, valid in any representation.
pub fn projector(id: ProjectorId, g: &GammaSet) -> ComplexMatrix4 {
    let [a, b, c] = id.signs();
    let g03 = g.gamma[0] * g.gamma[3];
    let ig12 = (g.gamma[1] * g.gamma[2]).scale(I);
    let sum = ComplexMatrix4::identity().scale(C64::from(3.0))
        + g.gamma5.scale(C64::from(a))
        + g03.scale(C64::from(b))
        + ig12.scale(C64::from(c));
    sum.scale(C64::from(0.25))
}

/// Conjugate every matrix of the set: γ'^μ = S γ^μ S⁻¹.
pub fn similarity_transform(g: &GammaSet, s: &ComplexMatrix4) -> Result<GammaSet> {
    let det = s.determinant().norm();
    if det < 1e-12 {
        return Err(Error::SingularTransform { det });
    }
    let inv = s.inverse().ok_or(Error::SingularTransform { det })?;
    let conj = |m: &ComplexMatrix4| *s * *m * inv;
    Ok(GammaSet {
        gamma: [conj(&g.gamma[0]), conj(&g.gamma[1]), conj(&g.gamma[2]), conj(&g.gamma[3])],
        gamma5: conj(&g.gamma5),
        metric: g.metric,
        pauli: g.pauli,
    })
}

/// Bispinor amplitudes ordered (ξ¹, ξ², η₁̇, η₂̇).
pub type Bispinor = [C64; 4];

/// The matrix part of charge conjugation, iγ².
pub fn charge_conjugation_matrix(g: &GammaSet) -> ComplexMatrix4 {
    g.gamma[2].scale(I)
}

/// Ψ_c = iγ²Ψ*.
pub fn charge_conjugate(psi: &Bispinor, g: &GammaSet) -> Bispinor {
    let conj = [psi[0].conj(), psi[1].conj(), psi[2].conj(), psi[3].conj()];
    charge_conjugation_matrix(g).apply(&conj)
}

/// Haar-distributed random unitary via QR of a complex Gaussian matrix.
pub fn random_unitary<R: Rng + ?Sized>(rng: &mut R) -> ComplexMatrix4 {
    let mut normal = || -> f64 { rng.sample(StandardNormal) };
    let m = Matrix4::<C64>::from_fn(|_, _| C64::new(normal(), normal()));
    let qr = m.qr();
    let (mut q, r) = (qr.q(), qr.r());
    for j in 0..4 {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 { d / d.norm() } else { ONE };
        for i in 0..4 {
            q[(i, j)] *= phase;
        }
    }
    ComplexMatrix4::from_na(&q)
}
