//! Fixed-size complex linear algebra for a single coin (qubit).
//!
//! Everything is 2×2 or length 2, indexed by the coin basis `{→, ←}` with
//! `|→⟩ = (1, 0)ᵀ` and `|←⟩ = (0, 1)ᵀ`. Comparisons use absolute tolerances:
//! [`STRUCTURAL_TOL`] for structural checks (unitarity, Hermiticity) and
//! [`ARITHMETIC_TOL`] for algebraic identities.

use std::ops::{Add, Index, Mul, Neg, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default tolerance for structural predicates.
pub const STRUCTURAL_TOL: f64 = 1e-10;
/// Default tolerance for arithmetic identities.
pub const ARITHMETIC_TOL: f64 = 1e-12;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Basis label of the coin.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Coin {
    Right,
    Left,
}

impl Coin {
    pub const ALL: [Coin; 2] = [Coin::Right, Coin::Left];

    pub fn index(self) -> usize {
        match self {
            Coin::Right => 0,
            Coin::Left => 1,
        }
    }
}

/// A coin state `a_right|→⟩ + a_left|←⟩`. Not necessarily normalized.
///
/// Serialized as `[[re, im], [re, im]]` in `{→, ←}` order.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(from = "[Complex64; 2]", into = "[Complex64; 2]")]
pub struct CoinState {
    pub right: Complex64,
    pub left: Complex64,
}

impl From<[Complex64; 2]> for CoinState {
    fn from([right, left]: [Complex64; 2]) -> Self {
        Self { right, left }
    }
}

impl From<CoinState> for [Complex64; 2] {
    fn from(s: CoinState) -> Self {
        [s.right, s.left]
    }
}

impl CoinState {
    pub const RIGHT: CoinState = CoinState {
        right: ONE,
        left: ZERO,
    };
    pub const LEFT: CoinState = CoinState {
        right: ZERO,
        left: ONE,
    };
    pub const ZERO: CoinState = CoinState {
        right: ZERO,
        left: ZERO,
    };

    pub const fn new(right: Complex64, left: Complex64) -> Self {
        Self { right, left }
    }

    pub fn from_real(right: f64, left: f64) -> Self {
        Self::new(Complex64::new(right, 0.0), Complex64::new(left, 0.0))
    }

    pub fn basis(c: Coin) -> Self {
        match c {
            Coin::Right => Self::RIGHT,
            Coin::Left => Self::LEFT,
        }
    }

    pub fn component(&self, c: Coin) -> Complex64 {
        match c {
            Coin::Right => self.right,
            Coin::Left => self.left,
        }
    }

    pub fn norm_sqr(&self) -> f64 {
        self.right.norm_sqr() + self.left.norm_sqr()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &CoinState) -> Complex64 {
        self.right.conj() * other.right + self.left.conj() * other.left
    }

    pub fn scale(&self, k: Complex64) -> CoinState {
        CoinState::new(self.right * k, self.left * k)
    }

    pub fn normalized(&self) -> Result<CoinState> {
        let norm = self.norm();
        if norm < 1e-12 {
            return Err(Error::ZeroVector { norm });
        }
        Ok(self.scale(Complex64::new(1.0 / norm, 0.0)))
    }

    /// The rank-1 operator `|self⟩⟨self|`.
    pub fn projector(&self) -> Mat2 {
        Mat2::outer(self, self)
    }

    pub fn max_abs_diff(&self, other: &CoinState) -> f64 {
        (self.right - other.right)
            .norm()
            .max((self.left - other.left).norm())
    }

    pub fn is_finite(&self) -> bool {
        self.right.is_finite() && self.left.is_finite()
    }
}

impl Add for CoinState {
    type Output = CoinState;
    fn add(self, rhs: CoinState) -> CoinState {
        CoinState::new(self.right + rhs.right, self.left + rhs.left)
    }
}

impl Sub for CoinState {
    type Output = CoinState;
    fn sub(self, rhs: CoinState) -> CoinState {
        CoinState::new(self.right - rhs.right, self.left - rhs.left)
    }
}

/// A 2×2 complex matrix, row-major, rows and columns indexed by `{→, ←}`.
///
/// Serialized as a nested array `[[m00, m01], [m10, m11]]` of `[re, im]` pairs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Mat2(pub [[Complex64; 2]; 2]);

impl Mat2 {
    pub const IDENTITY: Mat2 = Mat2([[ONE, ZERO], [ZERO, ONE]]);
    pub const ZERO: Mat2 = Mat2([[ZERO, ZERO], [ZERO, ZERO]]);
    /// The coin flip `|→⟩ ↔ |←⟩`.
    pub const NOT: Mat2 = Mat2([[ZERO, ONE], [ONE, ZERO]]);

    pub const fn new(rows: [[Complex64; 2]; 2]) -> Self {
        Mat2(rows)
    }

    pub fn from_real(rows: [[f64; 2]; 2]) -> Self {
        let c = |x: f64| Complex64::new(x, 0.0);
        Mat2([[c(rows[0][0]), c(rows[0][1])], [c(rows[1][0]), c(rows[1][1])]])
    }

    pub fn hadamard() -> Self {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        Mat2::from_real([[h, h], [h, -h]])
    }

    pub fn diag(a: Complex64, b: Complex64) -> Self {
        Mat2([[a, ZERO], [ZERO, b]])
    }

    /// `|u⟩⟨v|`.
    pub fn outer(u: &CoinState, v: &CoinState) -> Self {
        let (vr, vl) = (v.right.conj(), v.left.conj());
        Mat2([[u.right * vr, u.right * vl], [u.left * vr, u.left * vl]])
    }

    /// Builds the matrix whose rows are `⟨row0|` and `⟨row1|`.
    pub fn from_bras(row0: &CoinState, row1: &CoinState) -> Self {
        Mat2([
            [row0.right.conj(), row0.left.conj()],
            [row1.right.conj(), row1.left.conj()],
        ])
    }

    /// Builds the matrix whose columns are `col0` and `col1`.
    pub fn from_columns(col0: &CoinState, col1: &CoinState) -> Self {
        Mat2([[col0.right, col1.right], [col0.left, col1.left]])
    }

    pub fn column(&self, c: Coin) -> CoinState {
        let j = c.index();
        CoinState::new(self.0[0][j], self.0[1][j])
    }

    pub fn get(&self, row: Coin, col: Coin) -> Complex64 {
        self.0[row.index()][col.index()]
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Mat2 {
        let m = &self.0;
        Mat2([
            [m[0][0].conj(), m[1][0].conj()],
            [m[0][1].conj(), m[1][1].conj()],
        ])
    }

    pub fn trace(&self) -> Complex64 {
        self.0[0][0] + self.0[1][1]
    }

    pub fn det(&self) -> Complex64 {
        self.0[0][0] * self.0[1][1] - self.0[0][1] * self.0[1][0]
    }

    pub fn scale(&self, k: Complex64) -> Mat2 {
        let m = &self.0;
        Mat2([[m[0][0] * k, m[0][1] * k], [m[1][0] * k, m[1][1] * k]])
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> f64 {
        self.0
            .iter()
            .flatten()
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }

    pub fn max_abs_diff(&self, other: &Mat2) -> f64 {
        (*self - *other).max_abs()
    }

    pub fn approx_eq(&self, other: &Mat2, tol: f64) -> bool {
        self.max_abs_diff(other) <= tol
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().flatten().all(|z| z.is_finite())
    }

    /// `max |(m·m† − I)_ij|`.
    pub fn unitarity_defect(&self) -> f64 {
        (*self * self.adjoint() - Mat2::IDENTITY).max_abs()
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        self.is_finite() && self.unitarity_defect() <= tol
    }

    /// `max |(m − m†)_ij|`.
    pub fn hermiticity_defect(&self) -> f64 {
        (*self - self.adjoint()).max_abs()
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermiticity_defect() <= tol
    }

    /// `(m + m†) / 2`.
    pub fn hermitian_part(&self) -> Mat2 {
        (*self + self.adjoint()).scale(Complex64::new(0.5, 0.0))
    }

    /// Eigenvalues of the Hermitian part, ascending.
    ///
    /// Closed form `mean ± sqrt(mean² − det)`, evaluated as
    /// `mean ± sqrt(((a − d)/2)² + |b|²)` which is the same quantity without
    /// cancellation.
    pub fn herm_eigvals(&self) -> (f64, f64) {
        let h = self.hermitian_part();
        let a = h.0[0][0].re;
        let d = h.0[1][1].re;
        let b = h.0[0][1];
        let mean = 0.5 * (a + d);
        let half_gap = 0.5 * (a - d);
        let radius = (half_gap * half_gap + b.norm_sqr()).sqrt();
        (mean - radius, mean + radius)
    }

    /// Hermitian within `tol` and smallest eigenvalue `≥ −tol`.
    pub fn is_psd(&self, tol: f64) -> bool {
        self.is_hermitian(tol) && self.herm_eigvals().0 >= -tol
    }

    /// `⟨v|m|v⟩`.
    pub fn expectation(&self, v: &CoinState) -> Complex64 {
        v.inner(&(*self * *v))
    }
}

impl Index<(Coin, Coin)> for Mat2 {
    type Output = Complex64;
    fn index(&self, (r, c): (Coin, Coin)) -> &Complex64 {
        &self.0[r.index()][c.index()]
    }
}

impl Add for Mat2 {
    type Output = Mat2;
    fn add(self, rhs: Mat2) -> Mat2 {
        let (a, b) = (&self.0, &rhs.0);
        Mat2([
            [a[0][0] + b[0][0], a[0][1] + b[0][1]],
            [a[1][0] + b[1][0], a[1][1] + b[1][1]],
        ])
    }
}

impl Sub for Mat2 {
    type Output = Mat2;
    fn sub(self, rhs: Mat2) -> Mat2 {
        self + (-rhs)
    }
}

impl Neg for Mat2 {
    type Output = Mat2;
    fn neg(self) -> Mat2 {
        self.scale(Complex64::new(-1.0, 0.0))
    }
}

impl Mul for Mat2 {
    type Output = Mat2;
    fn mul(self, rhs: Mat2) -> Mat2 {
        let (a, b) = (&self.0, &rhs.0);
        Mat2([
            [
                a[0][0] * b[0][0] + a[0][1] * b[1][0],
                a[0][0] * b[0][1] + a[0][1] * b[1][1],
            ],
            [
                a[1][0] * b[0][0] + a[1][1] * b[1][0],
                a[1][0] * b[0][1] + a[1][1] * b[1][1],
            ],
        ])
    }
}

impl Mul<CoinState> for Mat2 {
    type Output = CoinState;
    fn mul(self, v: CoinState) -> CoinState {
        let m = &self.0;
        CoinState::new(
            m[0][0] * v.right + m[0][1] * v.left,
            m[1][0] * v.right + m[1][1] * v.left,
        )
    }
}

impl std::iter::Sum for Mat2 {
    fn sum<I: Iterator<Item = Mat2>>(iter: I) -> Mat2 {
        iter.fold(Mat2::ZERO, |acc, m| acc + m)
    }
}

/// Conjugate transpose of `m`.
pub fn adjoint(m: &Mat2) -> Mat2 {
    m.adjoint()
}

/// True iff `max |(m·m† − I)_ij| ≤ tol`.
pub fn is_unitary(m: &Mat2, tol: f64) -> bool {
    m.is_unitary(tol)
}

pub fn herm_eigvals(m: &Mat2) -> (f64, f64) {
    m.herm_eigvals()
}

pub fn is_psd(m: &Mat2, tol: f64) -> bool {
    m.is_psd(tol)
}

/// Unit vector orthogonal to `v`, with the fixed convention
/// `w ∝ (−conj(a_left), conj(a_right))`.
pub fn orthogonal_complement(v: &CoinState) -> Result<CoinState> {
    let norm = v.norm();
    if norm < 1e-12 {
        return Err(Error::ZeroVector { norm });
    }
    let inv = Complex64::new(1.0 / norm, 0.0);
    Ok(CoinState::new(-v.left.conj() * inv, v.right.conj() * inv))
}
