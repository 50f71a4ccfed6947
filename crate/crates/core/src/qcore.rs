//! Dense complex linear algebra for 3×3, 4×4, 9×9 and 16×16 problems.
//!
//! [`ComplexMatrix`] is a thin column-major wrapper around an `nalgebra`
//! matrix. Column-major storage makes [`ComplexMatrix::vectorize`] the
//! column-stacking map used by the superoperators in [`crate::dynamics`].

use std::fmt;
use std::ops::{Add, AddAssign, Index, IndexMut, Mul, Neg, Sub};

use nalgebra::DMatrix;
use thiserror::Error;

use crate::tolerances;

pub use num_complex::Complex64 as C64;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LinalgError {
    #[error("matrix is not square ({rows}×{cols})")]
    NotSquare { rows: usize, cols: usize },
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: String, found: String },
    #[error("matrix is not Hermitian (max |m - m†| = {deviation:.3e})")]
    NotHermitian { deviation: f64 },
    #[error("matrix is not positive semidefinite (eigenvalue {eigenvalue:.3e})")]
    NotPsd { eigenvalue: f64 },
    #[error("no numerical null space (σ_min/σ_max = {ratio:.3e})")]
    NoNullSpace { ratio: f64 },
    #[error("eigenvalue iteration did not converge")]
    NoConvergence,
    #[error("basis mismatch: expected {expected}, found {found}")]
    BasisMismatch { expected: BasisTag, found: BasisTag },
}

pub type Result<T> = std::result::Result<T, LinalgError>;

/// Which basis a state or operator is written in.
///
/// * `Computational`: `(|ee⟩, |eg⟩, |ge⟩, |gg⟩)`.
/// * `Coupled`: `(|+1⟩, |0⟩, |−1⟩, |A⟩)`, triplet first, singlet last.
/// * `TripletOnly`: `(|+1⟩, |0⟩, |−1⟩)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BasisTag {
    Computational,
    Coupled,
    TripletOnly,
}

impl BasisTag {
    pub fn dim(self) -> usize {
        match self {
            BasisTag::Computational | BasisTag::Coupled => 4,
            BasisTag::TripletOnly => 3,
        }
    }

    /// Errors unless `self == other`.
    pub fn expect(self, other: BasisTag) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(LinalgError::BasisMismatch { expected: other, found: self })
        }
    }
}

impl fmt::Display for BasisTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            BasisTag::Computational => "computational",
            BasisTag::Coupled => "coupled",
            BasisTag::TripletOnly => "triplet",
        };
        f.write_str(s)
    }
}

/// Rectangular complex matrix with fixed shape.
///
/// Comparisons in tests go through [`ComplexMatrix::max_abs_diff`]; the
/// derived `PartialEq` is exact and only meant for structural checks.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix(DMatrix<C64>);

impl ComplexMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self(DMatrix::zeros(rows, cols))
    }

    pub fn identity(n: usize) -> Self {
        Self(DMatrix::identity(n, n))
    }

    pub fn from_fn(rows: usize, cols: usize, f: impl FnMut(usize, usize) -> C64) -> Self {
        Self(DMatrix::from_fn(rows, cols, f))
    }

    /// Builds a matrix from row slices; all rows must have equal length.
    pub fn from_rows(rows: &[&[C64]]) -> Self {
        let n = rows.len();
        let m = rows.first().map_or(0, |r| r.len());
        assert!(rows.iter().all(|r| r.len() == m), "ragged rows");
        Self::from_fn(n, m, |i, j| rows[i][j])
    }

    pub fn from_real_rows(rows: &[&[f64]]) -> Self {
        let n = rows.len();
        let m = rows.first().map_or(0, |r| r.len());
        assert!(rows.iter().all(|r| r.len() == m), "ragged rows");
        Self::from_fn(n, m, |i, j| C64::new(rows[i][j], 0.0))
    }

    pub fn from_diagonal(diag: &[C64]) -> Self {
        let n = diag.len();
        Self::from_fn(n, n, |i, j| if i == j { diag[i] } else { C64::new(0.0, 0.0) })
    }

    pub fn from_real_diagonal(diag: &[f64]) -> Self {
        let d: Vec<C64> = diag.iter().map(|&x| C64::new(x, 0.0)).collect();
        Self::from_diagonal(&d)
    }

    /// Column vector from its entries.
    pub fn column(entries: &[C64]) -> Self {
        Self(DMatrix::from_column_slice(entries.len(), 1, entries))
    }

    /// `|a⟩⟨b|`, both given as entry slices.
    pub fn outer(a: &[C64], b: &[C64]) -> Self {
        Self::from_fn(a.len(), b.len(), |i, j| a[i] * b[j].conj())
    }

    pub fn from_nalgebra(m: DMatrix<C64>) -> Self {
        Self(m)
    }

    pub fn as_nalgebra(&self) -> &DMatrix<C64> {
        &self.0
    }

    pub fn into_nalgebra(self) -> DMatrix<C64> {
        self.0
    }

    pub fn nrows(&self) -> usize {
        self.0.nrows()
    }

    pub fn ncols(&self) -> usize {
        self.0.ncols()
    }

    pub fn is_square(&self) -> bool {
        self.nrows() == self.ncols()
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.nrows(), self.ncols())
    }

    pub fn dagger(&self) -> Self {
        Self(self.0.adjoint())
    }

    pub fn conj(&self) -> Self {
        Self(self.0.map(|z| z.conj()))
    }

    pub fn transpose(&self) -> Self {
        Self(self.0.transpose())
    }

    pub fn trace(&self) -> C64 {
        self.0.diagonal().iter().sum()
    }

    pub fn diagonal(&self) -> Vec<C64> {
        self.0.diagonal().iter().copied().collect()
    }

    pub fn scale(&self, s: C64) -> Self {
        Self(&self.0 * s)
    }

    pub fn scale_real(&self, s: f64) -> Self {
        self.scale(C64::new(s, 0.0))
    }

    /// Column-major entries; for a column vector these are its components.
    pub fn entries(&self) -> &[C64] {
        self.0.as_slice()
    }

    pub fn max_abs(&self) -> f64 {
        self.0.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.0.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Max-abs entrywise difference. Panics on shape mismatch.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!(self.shape(), other.shape(), "shape mismatch");
        self.0.iter().zip(other.0.iter()).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }

    pub fn frobenius_diff(&self, other: &Self) -> f64 {
        assert_eq!(self.shape(), other.shape(), "shape mismatch");
        self.0.iter().zip(other.0.iter()).map(|(a, b)| (a - b).norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        self.shape() == other.shape() && self.max_abs_diff(other) <= tol
    }

    /// Max-abs of `m − m†`.
    pub fn hermiticity_error(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        self.max_abs_diff(&self.dagger())
    }

    /// `(m + m†) / 2`.
    pub fn hermitize(&self) -> Self {
        Self((&self.0 + self.0.adjoint()) * C64::new(0.5, 0.0))
    }

    /// Column-stacking vectorization: entry `(i, j)` lands at `i + j·rows`.
    pub fn vectorize(&self) -> Self {
        Self(DMatrix::from_column_slice(self.0.len(), 1, self.0.as_slice()))
    }

    /// Inverse of [`vectorize`](Self::vectorize) for an `n×n` matrix.
    pub fn unvectorize(v: &Self, n: usize) -> Result<Self> {
        if v.ncols() != 1 || v.nrows() != n * n {
            return Err(LinalgError::DimensionMismatch {
                expected: format!("{}×1", n * n),
                found: format!("{}×{}", v.nrows(), v.ncols()),
            });
        }
        Ok(Self(DMatrix::from_column_slice(n, n, v.0.as_slice())))
    }

    /// Sub-block `rows × cols` starting at `(r0, c0)`.
    pub fn block(&self, r0: usize, c0: usize, rows: usize, cols: usize) -> Self {
        Self(self.0.view((r0, c0), (rows, cols)).into_owned())
    }

    pub fn matmul(&self, other: &Self) -> Result<Self> {
        if self.ncols() != other.nrows() {
            return Err(LinalgError::DimensionMismatch {
                expected: format!("{} rows", self.ncols()),
                found: format!("{} rows", other.nrows()),
            });
        }
        Ok(Self(&self.0 * &other.0))
    }

    /// `⟨a|b⟩` for two column vectors.
    pub fn inner(&self, other: &Self) -> C64 {
        self.0.dotc(&other.0)
    }

    fn require_square(&self) -> Result<usize> {
        if self.is_square() {
            Ok(self.nrows())
        } else {
            Err(LinalgError::NotSquare { rows: self.nrows(), cols: self.ncols() })
        }
    }
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix {}×{} [", self.nrows(), self.ncols())?;
        for i in 0..self.nrows() {
            write!(f, " ")?;
            for j in 0..self.ncols() {
                let z = self[(i, j)];
                write!(f, " {:+.6e}{:+.6e}i", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = C64;
    fn index(&self, idx: (usize, usize)) -> &C64 {
        &self.0[idx]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, idx: (usize, usize)) -> &mut C64 {
        &mut self.0[idx]
    }
}

macro_rules! binop {
    ($tr:ident, $f:ident, $op:tt) => {
        impl $tr<&ComplexMatrix> for &ComplexMatrix {
            type Output = ComplexMatrix;
            fn $f(self, rhs: &ComplexMatrix) -> ComplexMatrix {
                ComplexMatrix(&self.0 $op &rhs.0)
            }
        }
        impl $tr<ComplexMatrix> for ComplexMatrix {
            type Output = ComplexMatrix;
            fn $f(self, rhs: ComplexMatrix) -> ComplexMatrix {
                ComplexMatrix(self.0 $op rhs.0)
            }
        }
        impl $tr<&ComplexMatrix> for ComplexMatrix {
            type Output = ComplexMatrix;
            fn $f(self, rhs: &ComplexMatrix) -> ComplexMatrix {
                ComplexMatrix(self.0 $op &rhs.0)
            }
        }
    };
}

binop!(Add, add, +);
binop!(Sub, sub, -);
binop!(Mul, mul, *);

impl Mul<C64> for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: C64) -> ComplexMatrix {
        self.scale(rhs)
    }
}

impl Mul<C64> for ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: C64) -> ComplexMatrix {
        ComplexMatrix(self.0 * rhs)
    }
}

impl Neg for ComplexMatrix {
    type Output = ComplexMatrix;
    fn neg(self) -> ComplexMatrix {
        ComplexMatrix(-self.0)
    }
}

impl AddAssign<&ComplexMatrix> for ComplexMatrix {
    fn add_assign(&mut self, rhs: &ComplexMatrix) {
        self.0 += &rhs.0;
    }
}

/// Kronecker product `a ⊗ b`.
pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let (ar, ac) = a.shape();
    let (br, bc) = b.shape();
    ComplexMatrix::from_fn(ar * br, ac * bc, |i, j| a[(i / br, j / bc)] * b[(i % br, j % bc)])
}

/// Eigen-decomposition of a Hermitian matrix.
#[derive(Debug, Clone)]
pub struct HermitianEigen {
    /// Eigenvalues in descending order.
    pub values: Vec<f64>,
    /// Orthonormal eigenvectors as columns, in the order of `values`.
    pub vectors: ComplexMatrix,
}

impl HermitianEigen {
    pub fn vector(&self, k: usize) -> ComplexMatrix {
        self.vectors.block(0, k, self.vectors.nrows(), 1)
    }
}

pub fn hermitian_eig(m: &ComplexMatrix) -> Result<HermitianEigen> {
    let n = m.require_square()?;
    let deviation = m.hermiticity_error();
    if deviation > tolerances::HERMITIAN {
        return Err(LinalgError::NotHermitian { deviation });
    }
    let eig = m.hermitize().0.symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let vectors = ComplexMatrix::from_fn(n, n, |i, j| eig.eigenvectors[(i, order[j])]);
    Ok(HermitianEigen { values, vectors })
}

/// Eigenvalues of a general square complex matrix, sorted by descending
/// real part and then descending imaginary part.
pub fn general_eig(m: &ComplexMatrix) -> Result<Vec<C64>> {
    let n = m.require_square()?;
    if n == 0 {
        return Ok(Vec::new());
    }
    let mut values: Vec<C64> = if n == 1 {
        vec![m[(0, 0)]]
    } else {
        let schur = nalgebra::Schur::try_new(m.0.clone(), f64::EPSILON, 10_000)
            .ok_or(LinalgError::NoConvergence)?;
        let (_, t) = schur.unpack();
        (0..n).map(|k| t[(k, k)]).collect()
    };
    values.sort_by(|a, b| b.re.total_cmp(&a.re).then(b.im.total_cmp(&a.im)));
    Ok(values)
}

/// Principal square root of a Hermitian positive-semidefinite matrix.
pub fn psd_sqrt(m: &ComplexMatrix) -> Result<ComplexMatrix> {
    let eig = hermitian_eig(m)?;
    let n = m.nrows();
    if let Some(&low) = eig.values.last() {
        if low < -tolerances::PSD_NEGATIVE {
            return Err(LinalgError::NotPsd { eigenvalue: low });
        }
    }
    // Eigenvalues at round-off level are zero; their square roots would not be.
    let floor = 8.0 * n as f64 * f64::EPSILON * eig.values.first().map_or(0.0, |v| v.abs());
    let roots: Vec<C64> = eig
        .values
        .iter()
        .map(|&l| C64::new(if l <= floor { 0.0 } else { l.sqrt() }, 0.0))
        .collect();
    let v = &eig.vectors;
    let s = v * &ComplexMatrix::from_diagonal(&roots) * v.dagger();
    Ok(s.hermitize())
}

/// Result of [`null_vector`].
#[derive(Debug, Clone)]
pub struct NullVector {
    /// Unit-norm column vector spanning (part of) the numerical kernel.
    pub vector: ComplexMatrix,
    /// `σ_min / σ_max`.
    pub ratio: f64,
    /// Set when the second-smallest singular value is also below threshold.
    pub degenerate: bool,
}

/// Right singular vector of the smallest singular value of a square matrix.
pub fn null_vector(m: &ComplexMatrix) -> Result<NullVector> {
    let n = m.require_square()?;
    let svd = m.0.clone().svd(false, true);
    let v_t = svd.v_t.as_ref().ok_or(LinalgError::NoConvergence)?;
    let sv = &svd.singular_values;
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| sv[a].total_cmp(&sv[b]));
    let largest = sv[order[n - 1]];
    if largest == 0.0 {
        // Zero matrix: every vector is null; pick e₀ and flag.
        let mut e0 = vec![C64::new(0.0, 0.0); n];
        e0[0] = C64::new(1.0, 0.0);
        return Ok(NullVector { vector: ComplexMatrix::column(&e0), ratio: 0.0, degenerate: n > 1 });
    }
    let ratio = sv[order[0]] / largest;
    if ratio > tolerances::NULL_SPACE_RELATIVE {
        return Err(LinalgError::NoNullSpace { ratio });
    }
    let degenerate = n > 1 && sv[order[1]] / largest <= tolerances::NULL_SPACE_RELATIVE;
    let k = order[0];
    let entries: Vec<C64> = (0..n).map(|j| v_t[(k, j)].conj()).collect();
    Ok(NullVector { vector: ComplexMatrix::column(&entries), ratio, degenerate })
}

/// Golden-section search for the maximiser of a unimodal `f` on `[a, b]`.
pub fn golden_section_max(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64, tol: f64) -> f64 {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    while (b - a).abs() > tol {
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    0.5 * (a + b)
}

/// Pauli matrices and single-qubit ladder operators in the `(|e⟩, |g⟩)` basis.
pub mod pauli {
    use super::{ComplexMatrix, C64};

    pub fn x() -> ComplexMatrix {
        ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]])
    }

    pub fn y() -> ComplexMatrix {
        let i = C64::new(0.0, 1.0);
        let o = C64::new(0.0, 0.0);
        ComplexMatrix::from_rows(&[&[o, -i], &[i, o]])
    }

    pub fn z() -> ComplexMatrix {
        ComplexMatrix::from_real_rows(&[&[1.0, 0.0], &[0.0, -1.0]])
    }

    /// `σ₊ = |e⟩⟨g|`.
    pub fn raising() -> ComplexMatrix {
        ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[0.0, 0.0]])
    }

    /// `σ₋ = |g⟩⟨e|`.
    pub fn lowering() -> ComplexMatrix {
        ComplexMatrix::from_real_rows(&[&[0.0, 0.0], &[1.0, 0.0]])
    }

    pub fn identity() -> ComplexMatrix {
        ComplexMatrix::identity(2)
    }
}
