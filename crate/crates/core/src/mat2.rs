//! Complex 2×2 and 4×4 linear algebra for operators on a qubit.
//!
//! Everything here is closed form or a fixed, small algorithm:
//!
//! * Pauli coordinates of self-adjoint matrices, `m = ½(tr m · I + u·σ)`;
//! * the Hermitian eigendecomposition read off those coordinates;
//! * column-stacking vectorization, under which `ρ ↦ AρB` becomes the
//!   4×4 matrix `Bᵀ ⊗ A`;
//! * a scaling-and-squaring exponential for superoperators;
//! * the Choi matrix as a complete-positivity witness.

use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::{Matrix2, Matrix4, SMatrix, SymmetricEigen, Vector2, Vector4};
use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

pub type C64 = Complex64;

/// A vector in ℂ².
pub type Ket = Vector2<C64>;

/// Tolerance for Hermiticity, trace and idempotence checks.
pub const HERMITIAN_TOL: f64 = 1e-12;

/// Below this Bloch radius the spectrum is treated as degenerate.
pub const DEGENERACY_TOL: f64 = 1e-12;

/// Choi eigenvalues above `-CP_TOL` count as non-negative.
pub const CP_TOL: f64 = 1e-10;

#[inline]
pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

#[inline]
fn re(x: f64) -> C64 {
    C64::new(x, 0.0)
}

pub fn ket(a: C64, b: C64) -> Ket {
    Ket::new(a, b)
}

/// `⟨u, v⟩`, antilinear in the first slot.
pub fn inner(u: &Ket, v: &Ket) -> C64 {
    u.dotc(v)
}

/// The unit vector orthogonal to `e` with the phase convention
/// `(a, b) ↦ (b̄, −ā)`, so the standard basis pairs up as `(0,1) ↦ (1,0)`.
pub fn orthogonal_complement(e: &Ket) -> Ket {
    ket(e[1].conj(), -e[0].conj())
}

/// A 2×2 complex matrix.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ComplexMat2(pub Matrix2<C64>);

impl ComplexMat2 {
    pub fn new(rows: [[C64; 2]; 2]) -> Self {
        Self(Matrix2::new(rows[0][0], rows[0][1], rows[1][0], rows[1][1]))
    }

    pub fn from_real(rows: [[f64; 2]; 2]) -> Self {
        Self::new([
            [re(rows[0][0]), re(rows[0][1])],
            [re(rows[1][0]), re(rows[1][1])],
        ])
    }

    pub fn diag(a: f64, b: f64) -> Self {
        Self::from_real([[a, 0.0], [0.0, b]])
    }

    pub fn diag_c(a: C64, b: C64) -> Self {
        Self::new([[a, C64::default()], [C64::default(), b]])
    }

    pub fn identity() -> Self {
        Self(Matrix2::identity())
    }

    pub fn zero() -> Self {
        Self(Matrix2::zeros())
    }

    pub fn sigma1() -> Self {
        Self::from_real([[0.0, 1.0], [1.0, 0.0]])
    }

    pub fn sigma2() -> Self {
        Self::new([[re(0.0), c(0.0, -1.0)], [c(0.0, 1.0), re(0.0)]])
    }

    pub fn sigma3() -> Self {
        Self::diag(1.0, -1.0)
    }

    /// `σ₁, σ₂, σ₃`.
    pub fn paulis() -> [Self; 3] {
        [Self::sigma1(), Self::sigma2(), Self::sigma3()]
    }

    /// Matrix unit `E_ij`.
    pub fn unit(i: usize, j: usize) -> Self {
        let mut m = Matrix2::zeros();
        m[(i, j)] = re(1.0);
        Self(m)
    }

    /// `|u⟩⟨v|`.
    pub fn ket_bra(u: &Ket, v: &Ket) -> Self {
        Self(u * v.adjoint())
    }

    /// `|v⟩⟨v|`.
    pub fn projector(v: &Ket) -> Self {
        Self::ket_bra(v, v)
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.0[(i, j)]
    }

    pub fn adjoint(&self) -> Self {
        Self(self.0.adjoint())
    }

    pub fn transpose(&self) -> Self {
        Self(self.0.transpose())
    }

    pub fn conj(&self) -> Self {
        Self(self.0.map(|z| z.conj()))
    }

    pub fn trace(&self) -> C64 {
        self.0[(0, 0)] + self.0[(1, 1)]
    }

    pub fn det(&self) -> C64 {
        self.0[(0, 0)] * self.0[(1, 1)] - self.0[(0, 1)] * self.0[(1, 0)]
    }

    pub fn scale(&self, k: C64) -> Self {
        Self(self.0 * k)
    }

    pub fn apply(&self, v: &Ket) -> Ket {
        self.0 * v
    }

    /// `⟨u, M v⟩`.
    pub fn matrix_element(&self, u: &Ket, v: &Ket) -> C64 {
        inner(u, &self.apply(v))
    }

    /// `max |Mᵢⱼ − conj(Mⱼᵢ)|`.
    pub fn hermitian_defect(&self) -> f64 {
        let m = &self.0;
        let mut d: f64 = 0.0;
        for i in 0..2 {
            for j in 0..2 {
                d = d.max((m[(i, j)] - m[(j, i)].conj()).norm());
            }
        }
        d
    }

    pub fn is_hermitian(&self) -> bool {
        self.hermitian_defect() <= HERMITIAN_TOL
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    pub fn max_abs(&self) -> f64 {
        self.0.iter().fold(0.0, |acc, z| acc.max(z.norm()))
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        (*self - *other).max_abs()
    }

    /// Largest singular value.
    pub fn op_norm(&self) -> f64 {
        let g = self.adjoint() * *self;
        let tr = g.trace().re;
        let det = g.det().re;
        let disc = (tr * tr - 4.0 * det).max(0.0);
        (0.5 * (tr + disc.sqrt())).max(0.0).sqrt()
    }

    /// Ok when the matrix is Hermitian with unit trace and no eigenvalue
    /// below `-HERMITIAN_TOL`.
    pub fn check_density(&self) -> Result<()> {
        if !self.is_finite() {
            return Err(Error::NonFinite);
        }
        let (hi, lo) = eig_hermitian2(self)?;
        let tr = self.trace().re;
        if (tr - 1.0).abs() > HERMITIAN_TOL {
            return Err(Error::NotADensityMatrix(format!("trace {tr}")));
        }
        if lo.eigenvalue < -HERMITIAN_TOL {
            return Err(Error::NotADensityMatrix(format!(
                "eigenvalues ({}, {})",
                hi.eigenvalue, lo.eigenvalue
            )));
        }
        Ok(())
    }

    /// Ok when the matrix is a Hermitian idempotent of the given rank.
    pub fn check_projection(&self, tol: f64) -> Result<usize> {
        let defect = self.hermitian_defect();
        if defect > tol {
            return Err(Error::NotAProjection(format!(
                "Hermitian defect {defect:.3e}"
            )));
        }
        let idem = (*self * *self).max_abs_diff(self);
        if idem > tol {
            return Err(Error::NotAProjection(format!(
                "p² − p has entry {idem:.3e}"
            )));
        }
        let tr = self.trace().re;
        let rank = tr.round();
        if (tr - rank).abs() > tol {
            return Err(Error::NotAProjection(format!("trace {tr}")));
        }
        Ok(rank as usize)
    }
}

impl Add for ComplexMat2 {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        Self(self.0 + rhs.0)
    }
}

impl Sub for ComplexMat2 {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        Self(self.0 - rhs.0)
    }
}

impl Neg for ComplexMat2 {
    type Output = Self;
    fn neg(self) -> Self {
        Self(-self.0)
    }
}

impl Mul for ComplexMat2 {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        Self(self.0 * rhs.0)
    }
}

impl Mul<ComplexMat2> for f64 {
    type Output = ComplexMat2;
    fn mul(self, rhs: ComplexMat2) -> ComplexMat2 {
        rhs.scale(re(self))
    }
}

impl Mul<ComplexMat2> for C64 {
    type Output = ComplexMat2;
    fn mul(self, rhs: ComplexMat2) -> ComplexMat2 {
        rhs.scale(self)
    }
}

// Row-major array of [re, im] pairs.
impl Serialize for ComplexMat2 {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let rows: [[[f64; 2]; 2]; 2] = std::array::from_fn(|i| {
            std::array::from_fn(|j| {
                let z = self.get(i, j);
                [z.re, z.im]
            })
        });
        rows.serialize(s)
    }
}

impl<'de> Deserialize<'de> for ComplexMat2 {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let rows = <[[[f64; 2]; 2]; 2]>::deserialize(d)?;
        Ok(Self::new(std::array::from_fn(|i| {
            std::array::from_fn(|j| c(rows[i][j][0], rows[i][j][1]))
        })))
    }
}

/// Pauli coordinates `(tr m, u)` of a self-adjoint 2×2 matrix.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BlochState {
    pub trace: f64,
    pub u: [f64; 3],
}

impl BlochState {
    pub fn new(trace: f64, u: [f64; 3]) -> Self {
        Self { trace, u }
    }

    /// A state `½(I + u·σ)`.
    pub fn state(u: [f64; 3]) -> Self {
        Self::new(1.0, u)
    }

    pub fn norm(&self) -> f64 {
        let [a, b, c] = self.u;
        (a * a + b * b + c * c).sqrt()
    }
}

/// `m ↦ (tr m, (tr mσ₁, tr mσ₂, tr mσ₃))`.
pub fn pauli_decompose(m: &ComplexMat2) -> Result<BlochState> {
    if !m.is_finite() {
        return Err(Error::NonFinite);
    }
    let defect = m.hermitian_defect();
    if defect > HERMITIAN_TOL {
        return Err(Error::NonHermitian { defect });
    }
    let (m00, m01, m10, m11) = (m.get(0, 0), m.get(0, 1), m.get(1, 0), m.get(1, 1));
    Ok(BlochState {
        trace: (m00 + m11).re,
        u: [(m01 + m10).re, (m10 - m01).im, (m00 - m11).re],
    })
}

/// `½(trace·I + u·σ)`.
pub fn pauli_compose(b: &BlochState) -> ComplexMat2 {
    let [u1, u2, u3] = b.u;
    ComplexMat2::new([
        [re(0.5 * (b.trace + u3)), c(0.5 * u1, -0.5 * u2)],
        [c(0.5 * u1, 0.5 * u2), re(0.5 * (b.trace - u3))],
    ])
}

/// One eigenvalue with its rank-one spectral projection.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SpectralPair {
    pub eigenvalue: f64,
    pub projection: ComplexMat2,
    /// Set when both eigenvalues coincide; the projection is then the
    /// standard-basis one and carries no information about `m`.
    pub degenerate: bool,
}

/// Eigendecomposition of a Hermitian 2×2 matrix, largest eigenvalue first.
///
/// With `m = ½(t·I + u·σ)` and `r = ‖u‖` the eigenvalues are `½(t ± r)` and
/// the projections `½(I ± u/r·σ)`. The eigenvalue of smaller magnitude is
/// recovered as `det m / λ` from the other one, which keeps full relative
/// precision when it is many orders of magnitude below the trace.
pub fn eig_hermitian2(m: &ComplexMat2) -> Result<(SpectralPair, SpectralPair)> {
    let b = pauli_decompose(m)?;
    let r = b.norm();
    let t = b.trace;
    if r <= DEGENERACY_TOL {
        let lam = 0.5 * t;
        return Ok((
            SpectralPair {
                eigenvalue: lam,
                projection: ComplexMat2::diag(1.0, 0.0),
                degenerate: true,
            },
            SpectralPair {
                eigenvalue: lam,
                projection: ComplexMat2::diag(0.0, 1.0),
                degenerate: true,
            },
        ));
    }
    let det = m.get(0, 0).re * m.get(1, 1).re - m.get(0, 1).norm_sqr();
    let (hi, lo) = if t >= 0.0 {
        let hi = 0.5 * (t + r);
        (hi, det / hi)
    } else {
        let lo = 0.5 * (t - r);
        (det / lo, lo)
    };
    let n = b.u.map(|x| x / r);
    Ok((
        SpectralPair {
            eigenvalue: hi,
            projection: pauli_compose(&BlochState::new(1.0, n)),
            degenerate: false,
        },
        SpectralPair {
            eigenvalue: lo,
            projection: pauli_compose(&BlochState::new(1.0, n.map(|x| -x))),
            degenerate: false,
        },
    ))
}

/// Least eigenvalue of a Hermitian matrix.
pub fn min_eigenvalue(m: &ComplexMat2) -> Result<f64> {
    Ok(eig_hermitian2(m)?.1.eigenvalue)
}

/// A linear map on 2×2 matrices, as a 4×4 matrix acting on column-stacked
/// vectors `vec(ρ) = (ρ₀₀, ρ₁₀, ρ₀₁, ρ₁₁)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SuperOp4(pub Matrix4<C64>);

pub fn vectorize(m: &ComplexMat2) -> Vector4<C64> {
    Vector4::new(m.get(0, 0), m.get(1, 0), m.get(0, 1), m.get(1, 1))
}

pub fn unvectorize(v: &Vector4<C64>) -> ComplexMat2 {
    ComplexMat2::new([[v[0], v[2]], [v[1], v[3]]])
}

fn kron2(a: &Matrix2<C64>, b: &Matrix2<C64>) -> Matrix4<C64> {
    Matrix4::from_fn(|r, col| a[(r / 2, col / 2)] * b[(r % 2, col % 2)])
}

impl SuperOp4 {
    pub fn identity() -> Self {
        Self(Matrix4::identity())
    }

    pub fn zero() -> Self {
        Self(Matrix4::zeros())
    }

    /// Matrix of an arbitrary linear map, column `k` being `vec(f(Eₖ))`.
    pub fn from_map(f: impl Fn(&ComplexMat2) -> ComplexMat2) -> Self {
        let mut out = Matrix4::zeros();
        for k in 0..4 {
            let mut e = Vector4::zeros();
            e[k] = re(1.0);
            let col = vectorize(&f(&unvectorize(&e)));
            out.set_column(k, &col);
        }
        Self(out)
    }

    /// `ρ ↦ AρB`, i.e. `Bᵀ ⊗ A`.
    pub fn sandwich(a: &ComplexMat2, b: &ComplexMat2) -> Self {
        Self(kron2(&b.0.transpose(), &a.0))
    }

    /// `ρ ↦ AρA*`.
    pub fn conjugation(a: &ComplexMat2) -> Self {
        Self::sandwich(a, &a.adjoint())
    }

    pub fn apply(&self, m: &ComplexMat2) -> ComplexMat2 {
        unvectorize(&(self.0 * vectorize(m)))
    }

    pub fn scale(&self, k: f64) -> Self {
        Self(self.0 * re(k))
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    pub fn max_abs(&self) -> f64 {
        self.0.iter().fold(0.0, |acc, z| acc.max(z.norm()))
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        (*self - *other).max_abs()
    }

    /// Maximum column sum of absolute values.
    pub fn norm1(&self) -> f64 {
        norm1(&self.0)
    }

    /// `max_k |tr(S(Eₖ))|` over the matrix units; zero for a generator of a
    /// trace-preserving semigroup.
    pub fn trace_annihilation_defect(&self) -> f64 {
        (0..4)
            .map(|k| (self.0[(0, k)] + self.0[(3, k)]).norm())
            .fold(0.0, f64::max)
    }

    /// `max_k |tr(S(Eₖ)) − tr(Eₖ)|`; zero for a trace-preserving map.
    pub fn trace_preservation_defect(&self) -> f64 {
        (0..4)
            .map(|k| {
                let tr_ek = if k == 0 || k == 3 { 1.0 } else { 0.0 };
                (self.0[(0, k)] + self.0[(3, k)] - re(tr_ek)).norm()
            })
            .fold(0.0, f64::max)
    }
}

impl Add for SuperOp4 {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        Self(self.0 + rhs.0)
    }
}

impl Sub for SuperOp4 {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        Self(self.0 - rhs.0)
    }
}

/// Composition `(S ∘ T)(ρ) = S(T(ρ))`.
impl Mul for SuperOp4 {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        Self(self.0 * rhs.0)
    }
}

fn norm1<const N: usize>(a: &SMatrix<C64, N, N>) -> f64 {
    (0..N)
        .map(|j| (0..N).map(|i| a[(i, j)].norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// Target norm of the scaled matrix before the Taylor sum.
const EXPM_SCALED_NORM: f64 = 0.5;
const EXPM_MAX_TERMS: usize = 40;

/// `exp(a)` by scaling and squaring with a truncated Taylor series.
///
/// The matrix is divided by `2^k` until its 1-norm is at most ½; the series
/// is then summed until the next term is below half an ulp of the partial
/// sum, and the result squared `k` times.
pub fn expm<const N: usize>(a: &SMatrix<C64, N, N>) -> SMatrix<C64, N, N> {
    let norm = norm1(a);
    let squarings = if norm > EXPM_SCALED_NORM {
        (norm / EXPM_SCALED_NORM).log2().ceil() as i32
    } else {
        0
    };
    let scaled = a * re(0.5f64.powi(squarings));

    let mut sum = SMatrix::<C64, N, N>::identity();
    let mut term = SMatrix::<C64, N, N>::identity();
    for n in 1..=EXPM_MAX_TERMS {
        term = term * scaled * re(1.0 / n as f64);
        sum += term;
        if norm1(&term) <= 0.5 * f64::EPSILON * norm1(&sum) {
            break;
        }
    }
    for _ in 0..squarings {
        sum = sum * sum;
    }
    sum
}

/// `exp(t·s)` for a superoperator.
pub fn expm4(s: &SuperOp4, t: f64) -> Result<SuperOp4> {
    if !s.is_finite() || !t.is_finite() {
        return Err(Error::NonFinite);
    }
    if t < 0.0 {
        return Err(Error::NegativeTime(t));
    }
    if t == 0.0 {
        return Ok(SuperOp4::identity());
    }
    Ok(SuperOp4(expm(&(s.0 * re(t)))))
}

/// `exp(t·m)` for a 2×2 matrix.
pub fn expm2(m: &ComplexMat2, t: f64) -> Result<ComplexMat2> {
    if !m.is_finite() || !t.is_finite() {
        return Err(Error::NonFinite);
    }
    if t == 0.0 {
        return Ok(ComplexMat2::identity());
    }
    Ok(ComplexMat2(expm(&(m.0 * re(t)))))
}

/// Choi matrix `Σᵢⱼ Eᵢⱼ ⊗ S(Eᵢⱼ)`; block `(i, j)` is `S(Eᵢⱼ)`.
pub fn choi(s: &SuperOp4) -> Matrix4<C64> {
    let mut out = Matrix4::zeros();
    for i in 0..2 {
        for j in 0..2 {
            let block = s.apply(&ComplexMat2::unit(i, j));
            for a in 0..2 {
                for b in 0..2 {
                    out[(2 * i + a, 2 * j + b)] = block.get(a, b);
                }
            }
        }
    }
    out
}

/// Eigenvalues of the Hermitian part of the Choi matrix, descending.
pub fn choi_eigenvalues(s: &SuperOp4) -> [f64; 4] {
    let m = choi(s);
    let herm = (m + m.adjoint()) * re(0.5);
    let eig = SymmetricEigen::new(herm);
    let mut ev: [f64; 4] = std::array::from_fn(|i| eig.eigenvalues[i]);
    ev.sort_by(|a, b| b.total_cmp(a));
    ev
}

/// Smallest Choi eigenvalue; non-negative (to `CP_TOL`) iff `s` is
/// completely positive.
pub fn min_choi_eigenvalue(s: &SuperOp4) -> f64 {
    choi_eigenvalues(s)[3]
}

pub fn is_completely_positive(s: &SuperOp4) -> bool {
    min_choi_eigenvalue(s) >= -CP_TOL
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn decompose_examples() {
        let b = pauli_decompose(&ComplexMat2::diag(0.5, 0.5)).unwrap();
        assert_eq!(b, BlochState::new(1.0, [0.0, 0.0, 0.0]));
        let b = pauli_decompose(&ComplexMat2::sigma3()).unwrap();
        assert_eq!(b, BlochState::new(0.0, [0.0, 0.0, 2.0]));
        let b = pauli_decompose(&ComplexMat2::diag(0.0, 1.0)).unwrap();
        assert_eq!(b, BlochState::new(1.0, [0.0, 0.0, -1.0]));
        let b = pauli_decompose(&ComplexMat2::sigma2()).unwrap();
        assert_eq!(b, BlochState::new(0.0, [0.0, 2.0, 0.0]));
    }

    #[test]
    fn decompose_rejects_non_hermitian() {
        let m = ComplexMat2::unit(0, 1);
        assert!(matches!(
            pauli_decompose(&m),
            Err(Error::NonHermitian { .. })
        ));
        let mut nan = ComplexMat2::identity();
        nan.0[(0, 0)] = c(f64::NAN, 0.0);
        assert_eq!(pauli_decompose(&nan), Err(Error::NonFinite));
    }

    #[test]
    fn compose_examples() {
        assert_eq!(
            pauli_compose(&BlochState::state([0.0; 3])),
            ComplexMat2::diag(0.5, 0.5)
        );
        assert_eq!(
            pauli_compose(&BlochState::state([0.0, 0.0, -1.0])),
            ComplexMat2::diag(0.0, 1.0)
        );
        assert_eq!(
            pauli_compose(&BlochState::new(0.0, [2.0, 0.0, 0.0])),
            ComplexMat2::sigma1()
        );
    }

    #[test]
    fn eig_diagonal() {
        let (p1, p2) = eig_hermitian2(&ComplexMat2::diag(0.7, 0.3)).unwrap();
        assert!(close(p1.eigenvalue, 0.7, 1e-15));
        assert!(close(p2.eigenvalue, 0.3, 1e-15));
        assert!(p1.projection.max_abs_diff(&ComplexMat2::diag(1.0, 0.0)) < 1e-15);
        assert!(p2.projection.max_abs_diff(&ComplexMat2::diag(0.0, 1.0)) < 1e-15);
        assert!(!p1.degenerate);
    }

    #[test]
    fn eig_degenerate() {
        let (p1, p2) = eig_hermitian2(&ComplexMat2::diag(0.5, 0.5)).unwrap();
        assert!(p1.degenerate && p2.degenerate);
        assert_eq!(p1.eigenvalue, 0.5);
        assert_eq!(p2.eigenvalue, 0.5);
        assert_eq!(p1.projection, ComplexMat2::diag(1.0, 0.0));
        assert_eq!(p2.projection, ComplexMat2::diag(0.0, 1.0));
    }

    #[test]
    fn eig_oblique_against_characteristic_polynomial() {
        // ½(I + 0.6σ₁) = [[0.5, 0.3], [0.3, 0.5]]; λ² − λ + (0.25 − 0.09) = 0.
        let m = ComplexMat2::from_real([[0.5, 0.3], [0.3, 0.5]]);
        let disc: f64 = 1.0 - 4.0 * 0.16;
        let roots = [0.5 * (1.0 + disc.sqrt()), 0.5 * (1.0 - disc.sqrt())];
        let (p1, p2) = eig_hermitian2(&m).unwrap();
        assert!(close(p1.eigenvalue, roots[0], 1e-15));
        assert!(close(p2.eigenvalue, roots[1], 1e-15));
        assert!(close(p1.eigenvalue, 0.8, 1e-15));
        let plus = 0.5 * (ComplexMat2::identity() + ComplexMat2::sigma1());
        let minus = 0.5 * (ComplexMat2::identity() - ComplexMat2::sigma1());
        assert!(p1.projection.max_abs_diff(&plus) < 1e-15);
        assert!(p2.projection.max_abs_diff(&minus) < 1e-15);
    }

    #[test]
    fn small_eigenvalue_keeps_relative_precision() {
        let tiny = 1e-200;
        let (hi, lo) = eig_hermitian2(&ComplexMat2::diag(1.0 - tiny, tiny)).unwrap();
        assert_eq!(hi.eigenvalue, 1.0);
        assert!(close(lo.eigenvalue / tiny, 1.0, 1e-14));
    }

    #[test]
    fn vectorization_is_column_stacking() {
        let m = ComplexMat2::new([[c(1.0, 0.0), c(2.0, 0.0)], [c(3.0, 0.0), c(4.0, 0.0)]]);
        let v = vectorize(&m);
        assert_eq!(v[1], c(3.0, 0.0));
        assert_eq!(v[2], c(2.0, 0.0));
        assert_eq!(unvectorize(&v), m);
    }

    #[test]
    fn sandwich_matches_from_map() {
        let a = ComplexMat2::new([[c(1.0, 2.0), c(0.5, -1.0)], [c(0.0, 3.0), c(-2.0, 0.1)]]);
        let b = ComplexMat2::new([[c(0.3, 0.0), c(1.0, 1.0)], [c(2.0, -0.5), c(0.0, 1.0)]]);
        let direct = SuperOp4::from_map(|r| a * *r * b);
        assert!(SuperOp4::sandwich(&a, &b).max_abs_diff(&direct) < 1e-15);
    }

    #[test]
    fn expm_zero_time_is_identity() {
        let s = SuperOp4::from_map(|r| ComplexMat2::sigma2() * *r);
        assert_eq!(expm4(&s, 0.0).unwrap(), SuperOp4::identity());
    }

    #[test]
    fn expm_diagonal() {
        let mut s = SuperOp4::zero();
        s.0[(1, 1)] = c(-1.0, 0.0);
        s.0[(2, 2)] = c(-1.0, 0.0);
        let e = expm4(&s, 1.0).unwrap();
        let em1 = (-1.0f64).exp();
        let mut want = SuperOp4::identity();
        want.0[(1, 1)] = c(em1, 0.0);
        want.0[(2, 2)] = c(em1, 0.0);
        assert!(e.max_abs_diff(&want) < 1e-15);
    }

    #[test]
    fn expm_errors() {
        let s = SuperOp4::identity();
        assert_eq!(expm4(&s, -1.0), Err(Error::NegativeTime(-1.0)));
        let mut bad = SuperOp4::identity();
        bad.0[(0, 1)] = c(f64::INFINITY, 0.0);
        assert_eq!(expm4(&bad, 1.0), Err(Error::NonFinite));
    }

    #[test]
    fn expm_rotation_closed_form() {
        // exp(−iθσ₂) = cos θ·I − i sin θ·σ₂.
        let gen = ComplexMat2::sigma2().scale(c(0.0, -1.0));
        for &theta in &[0.1, 1.0, 3.7, 25.0] {
            let e = expm2(&gen, theta).unwrap();
            let want = theta.cos() * ComplexMat2::identity()
                + ComplexMat2::sigma2().scale(c(0.0, -theta.sin()));
            assert!(e.max_abs_diff(&want) < 1e-13, "theta {theta}");
        }
    }

    #[test]
    fn expm_derivative_residual() {
        let s = SuperOp4::from_map(|r| {
            let h = ComplexMat2::from_real([[0.3, 1.0], [1.0, -0.2]]);
            (h * *r - *r * h).scale(c(0.0, -1.0)) + ComplexMat2::sigma3() * *r * ComplexMat2::sigma3()
                - *r
        });
        let t = 1.7;
        let h = 1e-5;
        let fd = (expm4(&s, t + h).unwrap() - expm4(&s, t - h).unwrap()).scale(0.5 / h);
        let exact = s * expm4(&s, t).unwrap();
        assert!(fd.max_abs_diff(&exact) < 1e-8);
        let commutator = s * expm4(&s, t).unwrap() - expm4(&s, t).unwrap() * s;
        assert!(commutator.max_abs() < 1e-13);
    }

    #[test]
    fn choi_identity_map() {
        let ev = choi_eigenvalues(&SuperOp4::identity());
        assert!(close(ev[0], 2.0, 1e-14));
        for e in &ev[1..] {
            assert!(e.abs() < 1e-14);
        }
    }

    #[test]
    fn choi_kraus_map_is_psd() {
        let z = ComplexMat2::from_real([[0.0, 0.0], [1.0, 0.0]]);
        assert!(is_completely_positive(&SuperOp4::conjugation(&z)));
    }

    #[test]
    fn choi_transpose_map_is_not_cp() {
        let t = SuperOp4::from_map(|r| r.transpose());
        let ev = choi_eigenvalues(&t);
        assert!(close(ev[3], -1.0, 1e-14));
        assert!(!is_completely_positive(&t));
    }

    #[test]
    fn matrix_json_encoding() {
        let s3 = serde_json::to_string(&ComplexMat2::sigma3()).unwrap();
        assert_eq!(s3, "[[[1.0,0.0],[0.0,0.0]],[[0.0,0.0],[-1.0,0.0]]]");
        let back: ComplexMat2 =
            serde_json::from_str("[[[1,0],[0,0]],[[0,0],[-1,0]]]").unwrap();
        assert_eq!(back, ComplexMat2::sigma3());
    }

    #[test]
    fn op_norm_and_projection_checks() {
        assert!(close(ComplexMat2::sigma1().op_norm(), 1.0, 1e-15));
        assert!(close(ComplexMat2::diag(3.0, -5.0).op_norm(), 5.0, 1e-14));
        assert_eq!(ComplexMat2::identity().check_projection(1e-10), Ok(2));
        assert_eq!(ComplexMat2::diag(0.0, 1.0).check_projection(1e-10), Ok(1));
        assert!(ComplexMat2::diag(0.5, 0.5).check_projection(1e-10).is_err());
        assert!(ComplexMat2::diag(0.5, 0.5).check_density().is_ok());
        assert!(ComplexMat2::diag(1.5, -0.5).check_density().is_err());
    }
}
