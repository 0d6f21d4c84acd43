//! Pointwise generalized complex linear algebra: Clifford annihilators,
//! purity and nondegeneracy of spinors, J-matrices, B-transforms, and type.
//!
//! Everything here acts on a single fiber `V + V*` with `dim V = m`, in the
//! basis `(d_1..d_m, e_1..e_m)`. The `+i`-eigenspace convention is fixed so
//! that the spinor line of `e^{i omega}` maps to the block matrix
//! `[[0, -inv(omega)], [omega, 0]]`, and so that multiplying a spinor by
//! `e^B` corresponds exactly to conjugating its J-matrix by the shear that
//! sends `X + xi` to `X + xi - i_X B`.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use num_traits::Float;

use crate::form::{AlgebraError, GVector, MultiForm};
use crate::linalg::Mat;
use crate::scalar::{ComplexScalar, Scalar};

#[derive(Debug, Clone, PartialEq)]
pub enum GclinError {
    /// The zero form has no annihilator of interest.
    ZeroSpinor,
    /// A pure spinor was required (annihilator of dimension `m`).
    NotPure { annihilator_dim: usize, expected: usize },
    /// `L` meets its conjugate: the spinor fails `(phi, conj phi) != 0`
    /// transversality and defines no generalized complex structure.
    DegenerateSpinor,
    /// The two-form of `j_symplectic` is not invertible.
    DegenerateTwoForm,
    /// A real two-form was required.
    NotReal,
    /// A homogeneous form of the stated degree was required.
    WrongDegree { got: Option<u32>, want: u32 },
    /// The candidate matrix violates a structure invariant.
    NotAStructure { j_squared_residual: f64, orthogonality_residual: f64 },
    Algebra(AlgebraError),
}

impl From<AlgebraError> for GclinError {
    fn from(e: AlgebraError) -> Self {
        GclinError::Algebra(e)
    }
}

impl fmt::Display for GclinError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GclinError::ZeroSpinor => write!(f, "zero spinor"),
            GclinError::NotPure { annihilator_dim, expected } => write!(
                f,
                "not a pure spinor: annihilator has dimension {annihilator_dim}, expected {expected}"
            ),
            GclinError::DegenerateSpinor => {
                write!(f, "degenerate spinor: annihilator meets its conjugate")
            }
            GclinError::DegenerateTwoForm => write!(f, "two-form is not invertible"),
            GclinError::NotReal => write!(f, "two-form must be real"),
            GclinError::WrongDegree { got, want } => {
                write!(f, "expected homogeneous degree {want}, got {got:?}")
            }
            GclinError::NotAStructure { j_squared_residual, orthogonality_residual } => write!(
                f,
                "matrix is not a generalized complex structure (J^2 residual {j_squared_residual:.3e}, orthogonality residual {orthogonality_residual:.3e})"
            ),
            GclinError::Algebra(e) => write!(f, "{e}"),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for GclinError {}

/// Gram matrix of the natural pairing in the basis `(d_i, e_i)`:
/// `(1/2) [[0, I], [I, 0]]`.
pub fn pairing_gram<K: Scalar>(m: u8) -> Mat<K> {
    let n = m as usize;
    let half = K::one() / K::from_int(2);
    let mut p = Mat::zeros(2 * n, 2 * n);
    for i in 0..n {
        p[(i, n + i)] = half.clone();
        p[(n + i, i)] = half.clone();
    }
    p
}

/// A pointwise generalized complex structure: a real `2m x 2m` matrix,
/// orthogonal for the natural pairing, squaring to `-I`.
#[derive(Clone, PartialEq)]
pub struct GCLinear<K: Scalar> {
    dim: u8,
    mat: Mat<K>,
}

impl<K: Scalar> GCLinear<K> {
    /// Validates realness, `J^2 = -I` and `J^T P J = P` (exact backend:
    /// equality; floating backend: residuals within `tol`).
    pub fn new(dim: u8, mat: Mat<K>, tol: f64) -> Result<Self, GclinError> {
        let n = 2 * dim as usize;
        assert_eq!((mat.nrows(), mat.ncols()), (n, n), "matrix must be 2m x 2m");
        let candidate = GCLinear { dim, mat };
        if !candidate.is_real(tol) {
            return Err(GclinError::NotReal);
        }
        let jsq = candidate.j_squared_residual();
        let orth = candidate.orthogonality_residual();
        let bad = if K::EXACT {
            jsq != 0.0 || orth != 0.0
        } else {
            jsq > tol || orth > tol
        };
        if bad {
            return Err(GclinError::NotAStructure {
                j_squared_residual: jsq,
                orthogonality_residual: orth,
            });
        }
        Ok(candidate)
    }

    pub fn dim(&self) -> u8 {
        self.dim
    }

    pub fn matrix(&self) -> &Mat<K> {
        &self.mat
    }

    pub fn apply(&self, v: &GVector<K>) -> GVector<K> {
        GVector::from_flat(&self.mat.mul_vec(&v.flat()))
    }

    fn is_real(&self, tol: f64) -> bool {
        let n = self.mat.nrows();
        for i in 0..n {
            for j in 0..n {
                let entry = &self.mat[(i, j)];
                let imag = entry.clone() - entry.conj();
                if K::EXACT {
                    if !imag.is_zero() {
                        return false;
                    }
                } else if imag.modulus() > 2.0 * tol {
                    return false;
                }
            }
        }
        true
    }

    /// Max entry modulus of `J^2 + I`.
    pub fn j_squared_residual(&self) -> f64 {
        let n = self.mat.nrows();
        let jsq = self.mat.mul(&self.mat);
        jsq.add(&Mat::identity(n)).max_modulus()
    }

    /// Max entry modulus of `J^T P J - P`.
    pub fn orthogonality_residual(&self) -> f64 {
        let p = pairing_gram::<K>(self.dim);
        let jt = self.mat.transpose();
        jt.mul(&p).mul(&self.mat).sub(&p).max_modulus()
    }
}

impl<K: Scalar> fmt::Debug for GCLinear<K> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GCLinear(m={}) {:?}", self.dim, self.mat)
    }
}

/// An isotropic subspace of the complexified `V + V*`, held in reduced
/// row echelon form so equality of subspaces is equality of bases.
#[derive(Clone, PartialEq)]
pub struct IsotropicSubspace<K: Scalar> {
    ambient: u8,
    basis: Vec<GVector<K>>,
}

impl<K: Scalar> IsotropicSubspace<K> {
    /// Canonicalizes the spanning set by row reduction. Isotropy is the
    /// caller's claim; `isotropy_residual` measures it.
    pub fn from_span(ambient: u8, span: Vec<GVector<K>>, tol: f64) -> Self {
        if span.is_empty() {
            return IsotropicSubspace { ambient, basis: Vec::new() };
        }
        let rows: Vec<Vec<K>> = span.iter().map(GVector::flat).collect();
        let (rref, pivots) = Mat::from_rows(rows).rref(tol);
        let basis = (0..pivots.len())
            .map(|i| GVector::from_flat(rref.row(i)))
            .collect();
        IsotropicSubspace { ambient, basis }
    }

    pub fn ambient_dim(&self) -> u8 {
        self.ambient
    }

    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[GVector<K>] {
        &self.basis
    }

    /// Max `|<b_i, b_j>|` over all pairs; zero for honest isotropic spans.
    pub fn isotropy_residual(&self) -> f64 {
        let mut worst = 0.0f64;
        for a in &self.basis {
            for b in &self.basis {
                let p = a.natural_pairing(b).expect("same ambient dim");
                worst = Float::max(worst, p.modulus());
            }
        }
        worst
    }

    /// Entrywise comparison of the canonical bases.
    pub fn equals(&self, other: &Self, tol: f64) -> bool {
        if self.ambient != other.ambient || self.rank() != other.rank() {
            return false;
        }
        self.basis.iter().zip(&other.basis).all(|(a, b)| {
            a.flat()
                .iter()
                .zip(b.flat().iter())
                .all(|(x, y)| {
                    let d = x.clone() - y.clone();
                    if K::EXACT {
                        d.is_zero()
                    } else {
                        d.modulus() <= tol
                    }
                })
        })
    }

    /// Frobenius distance between the orthogonal projectors onto the two
    /// subspaces; zero iff the spans agree.
    pub fn subspace_distance(&self, other: &Self) -> f64 {
        let q1 = self.orthonormal_basis();
        let q2 = other.orthonormal_basis();
        // |P1 - P2|_F^2 = rank1 + rank2 - 2 |Q1^H Q2|_F^2
        let mut cross = 0.0f64;
        for a in &q1 {
            for b in &q2 {
                let mut acc = Cf64Acc::default();
                for (x, y) in a.iter().zip(b.iter()) {
                    acc.add(x.conj().clone() * y.clone());
                }
                cross += acc.norm_sqr();
            }
        }
        let total = q1.len() as f64 + q2.len() as f64 - 2.0 * cross;
        Float::sqrt(Float::max(total, 0.0))
    }

    fn orthonormal_basis(&self) -> Vec<Vec<K>> {
        // Modified Gram-Schmidt with the Hermitian inner product.
        let mut out: Vec<Vec<K>> = Vec::new();
        for v in &self.basis {
            let mut w = v.flat();
            for u in &out {
                let mut proj = K::zero();
                for (x, y) in u.iter().zip(w.iter()) {
                    proj = proj + x.conj() * y.clone();
                }
                for (x, y) in u.iter().zip(w.iter_mut()) {
                    *y = y.clone() - proj.clone() * x.clone();
                }
            }
            let norm = crate::linalg::vec_norm(&w);
            if norm > 1e-300 {
                let inv = scale_from_f64::<K>(1.0 / norm);
                for y in w.iter_mut() {
                    *y = y.clone() * inv.clone();
                }
                out.push(w);
            }
        }
        out
    }
}

// Embeds an f64 into the scalar backend through a rational approximation
// good to double precision; used only for norm scaling in distance metrics.
fn scale_from_f64<K: Scalar>(x: f64) -> K {
    const DENOM: i64 = 1 << 53;
    let scaled = x * DENOM as f64;
    if scaled.is_finite() && Float::abs(scaled) < 9.2e18 {
        K::from_int(scaled as i64) / K::from_int(DENOM)
    } else {
        K::from_int(0)
    }
}

#[derive(Default)]
struct Cf64Acc {
    re: f64,
    im: f64,
}

impl Cf64Acc {
    fn add<K: Scalar>(&mut self, z: K) {
        let c = z.to_cf64();
        self.re += c.re;
        self.im += c.im;
    }
    fn norm_sqr(&self) -> f64 {
        self.re * self.re + self.im * self.im
    }
}

impl<K: Scalar> fmt::Debug for IsotropicSubspace<K> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "IsotropicSubspace(ambient={}, basis={:?})", self.ambient, self.basis)
    }
}

/// The Clifford annihilator `L = { v : v . phi = 0 }` of a nonzero form,
/// in canonical row-reduced form.
pub fn annihilator<K: Scalar>(
    phi: &MultiForm<K>,
    tol: f64,
) -> Result<IsotropicSubspace<K>, GclinError> {
    if phi.is_zero() {
        return Err(GclinError::ZeroSpinor);
    }
    let m = phi.dim();
    let n = m as usize;
    // Columns: images of d_1..d_m, e_1..e_m under v -> v . phi.
    let mut cols: Vec<Vec<K>> = Vec::with_capacity(2 * n);
    for i in 1..=m {
        cols.push(GVector::basis_vec(m, i).clifford(phi)?.dense());
    }
    for i in 1..=m {
        cols.push(GVector::basis_cov(m, i).clifford(phi)?.dense());
    }
    let rows = 1usize << m;
    let mat = Mat::from_fn(rows, 2 * n, |r, c| cols[c][r].clone());
    let kernel = mat.kernel(tol);
    let span = kernel.iter().map(|v| GVector::from_flat(v)).collect();
    Ok(IsotropicSubspace::from_span(m, span, tol))
}

/// A nonzero form is pure when its annihilator has the maximal dimension `m`.
pub fn is_pure<K: Scalar>(phi: &MultiForm<K>, tol: f64) -> Result<bool, GclinError> {
    Ok(annihilator(phi, tol)?.rank() == phi.dim() as usize)
}

/// Condition (a) for a pure spinor: the Mukai pairing with its conjugate
/// does not vanish.
pub fn nondegenerate<K: Scalar>(phi: &MultiForm<K>, tol: f64) -> Result<bool, GclinError> {
    let ann = annihilator(phi, tol)?;
    if ann.rank() != phi.dim() as usize {
        return Err(GclinError::NotPure {
            annihilator_dim: ann.rank(),
            expected: phi.dim() as usize,
        });
    }
    let pairing = phi.mukai(&phi.conj())?;
    Ok(if K::EXACT {
        !pairing.is_zero()
    } else {
        pairing.modulus() > tol
    })
}

/// Type of a pure spinor: the degree of the lowest nonzero homogeneous
/// component (the decomposable factor of the normal form). Rejects
/// non-pure inputs rather than guessing.
pub fn type_of<K: Scalar>(phi: &MultiForm<K>, tol: f64) -> Result<u32, GclinError> {
    let ann = annihilator(phi, tol)?;
    if ann.rank() != phi.dim() as usize {
        return Err(GclinError::NotPure {
            annihilator_dim: ann.rank(),
            expected: phi.dim() as usize,
        });
    }
    let cleaned = if K::EXACT {
        phi.clone()
    } else {
        phi.prune(tol * Float::max(phi.max_modulus(), 1.0))
    };
    Ok(cleaned.lowest_degree().expect("nonzero by purity check"))
}

/// The block matrix `[[0, -inv(A)], [A, 0]]` of a symplectic form, where
/// `A` is the matrix of `X -> i_X omega`.
pub fn j_symplectic<K: Scalar>(omega: &MultiForm<K>, tol: f64) -> Result<GCLinear<K>, GclinError> {
    if omega.homogeneous_degree() != Some(2) {
        return Err(GclinError::WrongDegree { got: omega.homogeneous_degree(), want: 2 });
    }
    if !is_real_form(omega, tol) {
        return Err(GclinError::NotReal);
    }
    let m = omega.dim();
    let n = m as usize;
    let a = interior_matrix(omega)?;
    let a_inv = a.inverse(tol).ok_or(GclinError::DegenerateTwoForm)?;
    let mut j = Mat::zeros(2 * n, 2 * n);
    for r in 0..n {
        for c in 0..n {
            j[(r, n + c)] = -a_inv[(r, c)].clone();
            j[(n + r, c)] = a[(r, c)].clone();
        }
    }
    GCLinear::new(m, j, tol)
}

/// Matrix `A` with `A x = coords of i_X omega` for `X` with coords `x`.
fn interior_matrix<K: Scalar>(omega: &MultiForm<K>) -> Result<Mat<K>, GclinError> {
    let m = omega.dim();
    let n = m as usize;
    let mut a = Mat::zeros(n, n);
    for k in 1..=m {
        let mut x = vec![K::zero(); n];
        x[(k - 1) as usize] = K::one();
        let contracted = omega.contract(&x)?;
        for j in 1..=m {
            a[((j - 1) as usize, (k - 1) as usize)] = contracted.coeff(1u16 << (j - 1));
        }
    }
    Ok(a)
}

fn is_real_form<K: Scalar>(b: &MultiForm<K>, tol: f64) -> bool {
    let diff = b.sub(&b.conj()).expect("same dim");
    if K::EXACT {
        diff.is_zero()
    } else {
        diff.max_modulus() <= 2.0 * tol
    }
}

/// Conjugation of `J` by the pairing-orthogonal shear associated to a real
/// two-form `B`. The sign convention matches the spinor-side action
/// `phi -> e^B ^ phi` exactly.
pub fn b_transform_j<K: Scalar>(
    j: &GCLinear<K>,
    b: &MultiForm<K>,
    tol: f64,
) -> Result<GCLinear<K>, GclinError> {
    let m = j.dim();
    if !b.is_zero() && b.homogeneous_degree() != Some(2) {
        return Err(GclinError::WrongDegree { got: b.homogeneous_degree(), want: 2 });
    }
    if b.dim() != m {
        return Err(GclinError::Algebra(AlgebraError::DimMismatch {
            left: m,
            right: b.dim(),
        }));
    }
    if !is_real_form(b, tol) {
        return Err(GclinError::NotReal);
    }
    let n = m as usize;
    let a = interior_matrix(b)?;
    // Shear X + xi -> X + xi - i_X B, its inverse flips the sign.
    let mut shear = Mat::identity(2 * n);
    let mut shear_inv = Mat::identity(2 * n);
    for r in 0..n {
        for c in 0..n {
            shear[(n + r, c)] = -a[(r, c)].clone();
            shear_inv[(n + r, c)] = a[(r, c)].clone();
        }
    }
    let mat = shear.mul(j.matrix()).mul(&shear_inv);
    GCLinear::new(m, mat, tol)
}

/// The unique structure whose `+i`-eigenspace is the annihilator of a pure,
/// nondegenerate spinor.
pub fn j_from_spinor<K: ComplexScalar>(
    phi: &MultiForm<K>,
    tol: f64,
) -> Result<GCLinear<K>, GclinError> {
    let m = phi.dim();
    let n = m as usize;
    let ann = annihilator(phi, tol)?;
    if ann.rank() != n {
        return Err(GclinError::NotPure { annihilator_dim: ann.rank(), expected: n });
    }
    // Columns: basis of L, then its conjugate. Transversality of L and
    // conj(L) is exactly invertibility.
    let mut s = Mat::zeros(2 * n, 2 * n);
    for (c, v) in ann.basis().iter().enumerate() {
        let flat = v.flat();
        let conj = v.conj().flat();
        for r in 0..2 * n {
            s[(r, c)] = flat[r].clone();
            s[(r, n + c)] = conj[r].clone();
        }
    }
    let s_inv = s.inverse(tol).ok_or(GclinError::DegenerateSpinor)?;
    let mut d = Mat::zeros(2 * n, 2 * n);
    for k in 0..n {
        d[(k, k)] = K::i();
        d[(n + k, n + k)] = -K::i();
    }
    let j = s.mul(&d).mul(&s_inv);
    GCLinear::new(m, j, tol)
}

/// Structure-check report for a single spinor, mirroring the JSON schema
/// `{pure, nondegenerate, type, jSquaredResidual, orthogonalityResidual}`.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize), serde(rename_all = "camelCase"))]
pub struct StructureReport {
    pub pure: bool,
    pub nondegenerate: bool,
    #[cfg_attr(feature = "serde", serde(rename = "type"))]
    pub type_: Option<u32>,
    pub j_squared_residual: Option<f64>,
    pub orthogonality_residual: Option<f64>,
}

pub fn structure_report<K: ComplexScalar>(phi: &MultiForm<K>, tol: f64) -> Result<StructureReport, GclinError> {
    let ann = annihilator(phi, tol)?;
    let pure = ann.rank() == phi.dim() as usize;
    let nondeg = if pure { nondegenerate(phi, tol)? } else { false };
    let type_ = if pure { Some(type_of(phi, tol)?) } else { None };
    let (jsq, orth) = if pure && nondeg {
        match j_from_spinor(phi, tol) {
            Ok(j) => (Some(j.j_squared_residual()), Some(j.orthogonality_residual())),
            Err(_) => (None, None),
        }
    } else {
        (None, None)
    };
    Ok(StructureReport {
        pure,
        nondegenerate: nondeg,
        type_,
        j_squared_residual: jsq,
        orthogonality_residual: orth,
    })
}
