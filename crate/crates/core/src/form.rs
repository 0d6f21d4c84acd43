//! Complex exterior forms on an `m`-dimensional space (`m <= 8`) and the
//! Clifford action of `V + V*` on them.
//!
//! Basis `q`-vectors are encoded as bitmasks: bit `i` set means the factor
//! `e_{i+1}` is present, and coefficients are stored against the canonical
//! increasing order `e_{i1} ^ ... ^ e_{iq}`, `i1 < ... < iq`. All signs come
//! from the two helpers [`merge_sign`] and `contract_sign`, which count
//! transpositions explicitly.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use num_traits::Float;

use crate::scalar::Scalar;

/// Largest supported base dimension. `2^8` coefficients keeps every
/// brute-force oracle instant.
pub const MAX_DIM: u8 = 8;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AlgebraError {
    /// Two operands live on spaces of different dimension.
    DimMismatch { left: u8, right: u8 },
    /// `exp_form` was fed something other than a (possibly zero) 2-form.
    NotDegreeTwo,
    /// Requested dimension outside `1..=MAX_DIM`.
    BadDim(u8),
}

impl fmt::Display for AlgebraError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AlgebraError::DimMismatch { left, right } => {
                write!(f, "dimension mismatch: {left} vs {right}")
            }
            AlgebraError::NotDegreeTwo => write!(f, "input form is not homogeneous of degree 2"),
            AlgebraError::BadDim(m) => write!(f, "dimension {m} outside 1..={MAX_DIM}"),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for AlgebraError {}

/// Sign of moving every factor of `b` past the larger factors of `a` when
/// concatenating two disjoint increasing products: `(-1)^t` with `t` the
/// number of pairs `(i in a, j in b)` with `i > j`.
pub fn merge_sign(a: u16, b: u16) -> i8 {
    let mut transpositions = 0u32;
    let mut bits = b;
    while bits != 0 {
        let j = bits.trailing_zeros();
        transpositions += (a >> (j + 1)).count_ones();
        bits &= bits - 1;
    }
    if transpositions % 2 == 0 {
        1
    } else {
        -1
    }
}

/// Sign of extracting factor `i` from the increasing product `mask`:
/// `(-1)^{number of factors below i}`.
fn contract_sign(i: u8, mask: u16) -> i8 {
    let below = (mask & ((1u16 << i) - 1)).count_ones();
    if below % 2 == 0 {
        1
    } else {
        -1
    }
}

fn reversal_sign(q: u32) -> i8 {
    if (q * q.saturating_sub(1) / 2) % 2 == 0 {
        1
    } else {
        -1
    }
}

fn apply_sign<K: Scalar>(c: K, sign: i8) -> K {
    if sign >= 0 {
        c
    } else {
        -c
    }
}

/// A complex-coefficient exterior form, indexed by basis subsets.
///
/// Exact backend: no zero coefficient is ever stored. Floating backend:
/// bitwise zeros are dropped eagerly and small coefficients are removed by
/// the explicit [`MultiForm::prune`] with a configured epsilon.
#[derive(Clone, PartialEq)]
pub struct MultiForm<K: Scalar> {
    dim: u8,
    terms: BTreeMap<u16, K>,
}

impl<K: Scalar> MultiForm<K> {
    pub fn zero(dim: u8) -> Self {
        assert!(dim >= 1 && dim <= MAX_DIM, "dimension {dim} outside 1..={MAX_DIM}");
        MultiForm {
            dim,
            terms: BTreeMap::new(),
        }
    }

    /// The constant form `c`.
    pub fn scalar(dim: u8, c: K) -> Self {
        let mut f = MultiForm::zero(dim);
        f.add_term(0, c);
        f
    }

    pub fn one(dim: u8) -> Self {
        MultiForm::scalar(dim, K::one())
    }

    /// Basis covector `e_i`, `i` 1-based.
    pub fn basis(dim: u8, i: u8) -> Self {
        assert!(i >= 1 && i <= dim, "basis index {i} outside 1..={dim}");
        let mut f = MultiForm::zero(dim);
        f.add_term(1u16 << (i - 1), K::one());
        f
    }

    /// Basis monomial from 1-based indices; signs from sorting are applied.
    pub fn monomial(dim: u8, indices: &[u8], c: K) -> Self {
        let mut f = MultiForm::scalar(dim, c);
        for &i in indices {
            f = f.wedge(&MultiForm::basis(dim, i)).expect("same dim");
        }
        f
    }

    /// The covector with given coefficients as a 1-form.
    pub fn one_form(coeffs: &[K]) -> Self {
        let dim = coeffs.len() as u8;
        let mut f = MultiForm::zero(dim);
        for (i, c) in coeffs.iter().enumerate() {
            f.add_term(1u16 << i, c.clone());
        }
        f
    }

    pub fn dim(&self) -> u8 {
        self.dim
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (u16, &K)> {
        self.terms.iter().map(|(m, c)| (*m, c))
    }

    pub fn coeff(&self, mask: u16) -> K {
        self.terms.get(&mask).cloned().unwrap_or_else(K::zero)
    }

    /// Accumulate `c` on `mask`, dropping the slot if it cancels to zero.
    pub fn add_term(&mut self, mask: u16, c: K) {
        debug_assert!(mask < (1u16 << self.dim));
        if c.is_zero() {
            return;
        }
        match self.terms.remove(&mask) {
            None => {
                self.terms.insert(mask, c);
            }
            Some(old) => {
                let sum = old + c;
                if !sum.is_zero() {
                    self.terms.insert(mask, sum);
                }
            }
        }
    }

    fn check_dim(&self, other: &Self) -> Result<(), AlgebraError> {
        if self.dim != other.dim {
            return Err(AlgebraError::DimMismatch {
                left: self.dim,
                right: other.dim,
            });
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self, AlgebraError> {
        self.check_dim(other)?;
        let mut out = self.clone();
        for (mask, c) in other.terms() {
            out.add_term(mask, c.clone());
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self, AlgebraError> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        let mut out = MultiForm::zero(self.dim);
        for (mask, c) in self.terms() {
            out.terms.insert(mask, -c.clone());
        }
        out
    }

    pub fn scale(&self, c: &K) -> Self {
        let mut out = MultiForm::zero(self.dim);
        for (mask, t) in self.terms() {
            out.add_term(mask, t.clone() * c.clone());
        }
        out
    }

    pub fn conj(&self) -> Self {
        let mut out = MultiForm::zero(self.dim);
        for (mask, c) in self.terms() {
            out.terms.insert(mask, c.conj());
        }
        out
    }

    /// Remove coefficients with modulus below `eps` (floating backend).
    pub fn prune(&self, eps: f64) -> Self {
        let mut out = MultiForm::zero(self.dim);
        for (mask, c) in self.terms() {
            if c.modulus() >= eps {
                out.terms.insert(mask, c.clone());
            }
        }
        out
    }

    pub fn max_modulus(&self) -> f64 {
        self.terms
            .values()
            .map(Scalar::modulus)
            .fold(0.0f64, Float::max)
    }

    /// The degree-`q` homogeneous component.
    pub fn component(&self, q: u32) -> Self {
        let mut out = MultiForm::zero(self.dim);
        for (mask, c) in self.terms() {
            if mask.count_ones() == q {
                out.terms.insert(mask, c.clone());
            }
        }
        out
    }

    /// Degree of the lowest nonzero homogeneous component, if any.
    pub fn lowest_degree(&self) -> Option<u32> {
        self.terms.keys().map(|m| m.count_ones()).min()
    }

    /// `Some(q)` when all terms have degree `q` (zero forms included via `None`).
    pub fn homogeneous_degree(&self) -> Option<u32> {
        let mut degs = self.terms.keys().map(|m| m.count_ones());
        let first = degs.next()?;
        if degs.all(|d| d == first) {
            Some(first)
        } else {
            None
        }
    }

    /// Exterior product, bilinear and graded.
    pub fn wedge(&self, other: &Self) -> Result<Self, AlgebraError> {
        self.check_dim(other)?;
        let mut out = MultiForm::zero(self.dim);
        for (ma, ca) in self.terms() {
            for (mb, cb) in other.terms() {
                if ma & mb != 0 {
                    continue;
                }
                let sign = merge_sign(ma, mb);
                out.add_term(ma | mb, apply_sign(ca.clone() * cb.clone(), sign));
            }
        }
        Ok(out)
    }

    /// Interior product with the vector of components `x` (1-based slot `i`
    /// is `x[i-1]`): a degree `-1` anti-derivation.
    pub fn contract(&self, x: &[K]) -> Result<Self, AlgebraError> {
        if x.len() != self.dim as usize {
            return Err(AlgebraError::DimMismatch {
                left: self.dim,
                right: x.len() as u8,
            });
        }
        let mut out = MultiForm::zero(self.dim);
        for (i, xi) in x.iter().enumerate() {
            if xi.is_zero() {
                continue;
            }
            let bit = 1u16 << i;
            for (mask, c) in self.terms() {
                if mask & bit == 0 {
                    continue;
                }
                let sign = contract_sign(i as u8, mask);
                out.add_term(mask & !bit, apply_sign(xi.clone() * c.clone(), sign));
            }
        }
        Ok(out)
    }

    /// The anti-automorphism reversing wedge factors: the degree-`q`
    /// component picks up `(-1)^{q(q-1)/2}`.
    pub fn reversal(&self) -> Self {
        let mut out = MultiForm::zero(self.dim);
        for (mask, c) in self.terms() {
            out.terms
                .insert(mask, apply_sign(c.clone(), reversal_sign(mask.count_ones())));
        }
        out
    }

    /// Mukai pairing: the coefficient of the top-degree component of
    /// `reversal(self) ^ other`.
    pub fn mukai(&self, other: &Self) -> Result<K, AlgebraError> {
        self.check_dim(other)?;
        let full: u16 = ((1u32 << self.dim) - 1) as u16;
        let mut acc = K::zero();
        for (ma, ca) in self.terms() {
            let mb = full & !ma;
            if let Some(cb) = other.terms.get(&mb) {
                let sign = reversal_sign(ma.count_ones()) * merge_sign(ma, mb);
                acc = acc + apply_sign(ca.clone() * cb.clone(), sign);
            }
        }
        Ok(acc)
    }

    /// `exp` of a homogeneous 2-form: the finite sum `sum B^k / k!`.
    pub fn exp_form(&self) -> Result<Self, AlgebraError> {
        if !self.is_zero() && self.homogeneous_degree() != Some(2) {
            return Err(AlgebraError::NotDegreeTwo);
        }
        let mut out = MultiForm::one(self.dim);
        let mut power = MultiForm::one(self.dim);
        let mut factorial = K::one();
        for k in 1..=(self.dim / 2) as i64 {
            power = power.wedge(self)?;
            if power.is_zero() {
                break;
            }
            factorial = factorial * K::from_int(k);
            out = out.add(&power.scale(&(K::one() / factorial.clone())))?;
        }
        Ok(out)
    }

    /// Coefficients as a dense vector of length `2^dim`, mask order.
    pub fn dense(&self) -> Vec<K> {
        let mut v = vec![K::zero(); 1usize << self.dim];
        for (mask, c) in self.terms() {
            v[mask as usize] = c.clone();
        }
        v
    }

    pub fn from_dense(dim: u8, coeffs: &[K]) -> Self {
        assert_eq!(coeffs.len(), 1usize << dim);
        let mut f = MultiForm::zero(dim);
        for (mask, c) in coeffs.iter().enumerate() {
            f.add_term(mask as u16, c.clone());
        }
        f
    }
}

impl<K: Scalar> fmt::Debug for MultiForm<K> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (mask, c) in self.terms() {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            if mask == 0 {
                write!(f, "({c:?})")?;
            } else {
                write!(f, "({c:?})e")?;
                for i in 0..self.dim {
                    if mask & (1 << i) != 0 {
                        write!(f, "{}", i + 1)?;
                    }
                }
            }
        }
        Ok(())
    }
}

/// An element `X + xi` of `V + V*`.
#[derive(Clone, PartialEq)]
pub struct GVector<K: Scalar> {
    /// Components of the vector part `X` against `d_1..d_m`.
    pub vec: Vec<K>,
    /// Components of the covector part `xi` against `e_1..e_m`.
    pub cov: Vec<K>,
}

impl<K: Scalar> GVector<K> {
    pub fn new(vec: Vec<K>, cov: Vec<K>) -> Self {
        assert_eq!(vec.len(), cov.len(), "vector and covector parts must agree");
        GVector { vec, cov }
    }

    pub fn zero(dim: u8) -> Self {
        GVector {
            vec: vec![K::zero(); dim as usize],
            cov: vec![K::zero(); dim as usize],
        }
    }

    /// Basis vector `d_i` (1-based).
    pub fn basis_vec(dim: u8, i: u8) -> Self {
        let mut v = GVector::zero(dim);
        v.vec[(i - 1) as usize] = K::one();
        v
    }

    /// Basis covector `e_i` (1-based).
    pub fn basis_cov(dim: u8, i: u8) -> Self {
        let mut v = GVector::zero(dim);
        v.cov[(i - 1) as usize] = K::one();
        v
    }

    pub fn dim(&self) -> u8 {
        self.vec.len() as u8
    }

    pub fn is_zero(&self) -> bool {
        self.vec.iter().all(|c| c.is_zero()) && self.cov.iter().all(|c| c.is_zero())
    }

    pub fn conj(&self) -> Self {
        GVector {
            vec: self.vec.iter().map(Scalar::conj).collect(),
            cov: self.cov.iter().map(Scalar::conj).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        GVector {
            vec: self
                .vec
                .iter()
                .zip(&other.vec)
                .map(|(a, b)| a.clone() + b.clone())
                .collect(),
            cov: self
                .cov
                .iter()
                .zip(&other.cov)
                .map(|(a, b)| a.clone() + b.clone())
                .collect(),
        }
    }

    pub fn scale(&self, c: &K) -> Self {
        GVector {
            vec: self.vec.iter().map(|a| a.clone() * c.clone()).collect(),
            cov: self.cov.iter().map(|a| a.clone() * c.clone()).collect(),
        }
    }

    /// Flat coordinates `(X, xi)` of length `2m`.
    pub fn flat(&self) -> Vec<K> {
        let mut v = self.vec.clone();
        v.extend(self.cov.iter().cloned());
        v
    }

    pub fn from_flat(coords: &[K]) -> Self {
        let m = coords.len() / 2;
        GVector {
            vec: coords[..m].to_vec(),
            cov: coords[m..].to_vec(),
        }
    }

    pub fn norm(&self) -> f64 {
        Float::sqrt(
            self.flat()
                .iter()
                .map(|c| {
                    let a = c.modulus();
                    a * a
                })
                .sum::<f64>(),
        )
    }

    /// Clifford action `(X + xi) . a = i_X a + xi ^ a`.
    pub fn clifford(&self, a: &MultiForm<K>) -> Result<MultiForm<K>, AlgebraError> {
        if self.dim() != a.dim() {
            return Err(AlgebraError::DimMismatch {
                left: self.dim(),
                right: a.dim(),
            });
        }
        let contracted = a.contract(&self.vec)?;
        let wedged = MultiForm::one_form(&self.cov).wedge(a)?;
        contracted.add(&wedged)
    }

    /// Natural split-signature pairing `<X+xi, Y+eta> = (xi(Y) + eta(X)) / 2`.
    pub fn natural_pairing(&self, other: &Self) -> Result<K, AlgebraError> {
        if self.dim() != other.dim() {
            return Err(AlgebraError::DimMismatch {
                left: self.dim(),
                right: other.dim(),
            });
        }
        let mut acc = K::zero();
        for i in 0..self.vec.len() {
            acc = acc
                + self.cov[i].clone() * other.vec[i].clone()
                + other.cov[i].clone() * self.vec[i].clone();
        }
        Ok(acc / K::from_int(2))
    }
}

impl<K: Scalar> fmt::Debug for GVector<K> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GVector(vec={:?}, cov={:?})", self.vec, self.cov)
    }
}
