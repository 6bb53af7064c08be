//! Compact matrix Lie groups `SU(2)`, `SU(3)`, `SO(3)` and their algebras.
//!
//! Algebra elements are stored as anti-Hermitian complex matrices in the
//! defining representation (real antisymmetric for `so(3)`), group elements
//! as unitary (orthogonal) matrices. The inner product is the negative trace
//! form `<x, y> = -s * Re tr(x y)` with `s = 1` on `su(n)` and `s = 1/2` on
//! `so(n)`, which is a fixed positive multiple of the negative Killing form
//! (see [`GroupId::killing_constant`]).

mod roots;

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use nalgebra::{DMatrix, Schur};
use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{lit, to_f64, Real};

pub use roots::{root_decomposition, RootDatum, TorusDecomposition};

/// Identifier of a supported compact group.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GroupId {
    Su2,
    Su3,
    So3,
}

impl GroupId {
    pub const ALL: [GroupId; 3] = [GroupId::Su2, GroupId::Su3, GroupId::So3];

    /// Size of the defining matrices.
    pub fn matrix_size(self) -> usize {
        match self {
            GroupId::Su2 => 2,
            GroupId::Su3 | GroupId::So3 => 3,
        }
    }

    /// Real dimension of the Lie algebra.
    pub fn dim(self) -> usize {
        match self {
            GroupId::Su2 | GroupId::So3 => 3,
            GroupId::Su3 => 8,
        }
    }

    /// Dimension of a maximal torus.
    pub fn rank(self) -> usize {
        match self {
            GroupId::Su2 | GroupId::So3 => 1,
            GroupId::Su3 => 2,
        }
    }

    pub fn is_real(self) -> bool {
        matches!(self, GroupId::So3)
    }

    /// Scale `s` of the trace form `<x, y> = -s Re tr(xy)`.
    pub fn trace_scale<T: Real>(self) -> T {
        match self {
            GroupId::Su2 | GroupId::Su3 => T::one(),
            GroupId::So3 => lit(0.5),
        }
    }

    /// Factor `k` with `Killing(x, y) = k tr(xy)` in the defining representation.
    pub fn killing_factor<T: Real>(self) -> T {
        let n = self.matrix_size() as f64;
        match self {
            GroupId::Su2 | GroupId::Su3 => lit(2.0 * n),
            GroupId::So3 => lit(n - 2.0),
        }
    }

    /// Constant `c` with `<x, y> = -c Killing(x, y)`.
    pub fn killing_constant<T: Real>(self) -> T {
        self.trace_scale::<T>() / self.killing_factor::<T>()
    }

    /// Orthonormal basis of the algebra for the trace inner product.
    pub fn basis<T: Real>(self) -> Vec<AlgebraVector<T>> {
        let n = self.matrix_size();
        let zero = Complex::new(T::zero(), T::zero());
        let mut out = Vec::with_capacity(self.dim());
        if self.is_real() {
            for j in 0..n {
                for k in (j + 1)..n {
                    let mut m = DMatrix::from_element(n, n, zero);
                    m[(k, j)] = Complex::new(T::one(), T::zero());
                    m[(j, k)] = Complex::new(-T::one(), T::zero());
                    out.push(AlgebraVector { group: self, m });
                }
            }
            // order as (L_x, L_y, L_z): (1,2), (0,2), (0,1) planes
            out.reverse();
            out[1] = -out[1].clone();
            return out;
        }
        let r = lit::<T>(std::f64::consts::FRAC_1_SQRT_2);
        for j in 0..n {
            for k in (j + 1)..n {
                let mut a = DMatrix::from_element(n, n, zero);
                a[(j, k)] = Complex::new(r, T::zero());
                a[(k, j)] = Complex::new(-r, T::zero());
                out.push(AlgebraVector { group: self, m: a });
                let mut b = DMatrix::from_element(n, n, zero);
                b[(j, k)] = Complex::new(T::zero(), r);
                b[(k, j)] = Complex::new(T::zero(), r);
                out.push(AlgebraVector { group: self, m: b });
            }
        }
        for m in 1..n {
            let norm = lit::<T>(1.0 / ((m * (m + 1)) as f64).sqrt());
            let mut h = DMatrix::from_element(n, n, zero);
            for i in 0..m {
                h[(i, i)] = Complex::new(T::zero(), norm);
            }
            h[(m, m)] = Complex::new(T::zero(), -lit::<T>(m as f64) * norm);
            out.push(AlgebraVector { group: self, m: h });
        }
        out
    }

    /// A fixed regular element used to label loop bases independently of
    /// any user-supplied vector.
    pub fn reference_torus_vector<T: Real>(self) -> AlgebraVector<T> {
        let coords: Vec<f64> = match self {
            // diag(0.7i, -0.7i)
            GroupId::Su2 => vec![0.0, 0.0, 0.7 * std::f64::consts::SQRT_2],
            // diag(0.9i, 0.2i, -1.1i)
            GroupId::Su3 => {
                let h1 = 0.9 - 0.2;
                let h2 = (0.9 + 0.2 + 2.0 * 1.1) / 3.0;
                vec![
                    0.0,
                    0.0,
                    0.0,
                    0.0,
                    0.0,
                    0.0,
                    h1 / std::f64::consts::SQRT_2,
                    h2 * (6.0f64).sqrt() / 2.0,
                ]
            }
            GroupId::So3 => vec![0.0, 0.0, 0.7],
        };
        let c: Vec<T> = coords.into_iter().map(lit).collect();
        AlgebraVector::from_coords(self, &c).expect("dimension matches")
    }
}

impl fmt::Display for GroupId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            GroupId::Su2 => "su2",
            GroupId::Su3 => "su3",
            GroupId::So3 => "so3",
        })
    }
}

impl FromStr for GroupId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "su2" => Ok(GroupId::Su2),
            "su3" => Ok(GroupId::Su3),
            "so3" => Ok(GroupId::So3),
            other => Err(Error::InvalidArgument(format!("unknown group id {other:?}"))),
        }
    }
}

/// Validation tolerance for membership checks, loosened for low precision.
pub(crate) fn membership_tol<T: Real>() -> T {
    let eps = T::default_epsilon() * lit(64.0);
    let floor = lit(1e-12);
    if eps > floor {
        eps
    } else {
        floor
    }
}

fn cplx<T: Real>(re: T) -> Complex<T> {
    Complex::new(re, T::zero())
}

fn frobenius<T: Real>(m: &DMatrix<Complex<T>>) -> T {
    m.iter().fold(T::zero(), |acc, z| acc + z.norm_sqr()).sqrt()
}

/// Element of the Lie algebra in the defining representation.
#[derive(Debug, Clone, PartialEq)]
pub struct AlgebraVector<T: Real = f64> {
    group: GroupId,
    m: DMatrix<Complex<T>>,
}

impl<T: Real> AlgebraVector<T> {
    pub fn zero(group: GroupId) -> Self {
        let n = group.matrix_size();
        Self { group, m: DMatrix::from_element(n, n, cplx(T::zero())) }
    }

    /// Validating constructor.
    pub fn from_matrix(group: GroupId, m: DMatrix<Complex<T>>) -> Result<Self> {
        let n = group.matrix_size();
        if m.nrows() != n || m.ncols() != n {
            return Err(Error::NotInAlgebra {
                group,
                reason: format!("expected {n}x{n}, got {}x{}", m.nrows(), m.ncols()),
            });
        }
        let tol = membership_tol::<T>() * (T::one() + frobenius(&m));
        let skew = frobenius(&(&m + m.adjoint()));
        if skew > tol {
            return Err(Error::NotInAlgebra { group, reason: format!("|m + m^H| = {}", to_f64(skew)) });
        }
        if group.is_real() {
            let im = m.iter().fold(T::zero(), |a, z| a + z.im.abs());
            if im > tol {
                return Err(Error::NotInAlgebra { group, reason: "complex entries".into() });
            }
        } else {
            let tr = m.trace();
            if tr.norm_sqr().sqrt() > tol {
                return Err(Error::NotInAlgebra { group, reason: format!("trace {}", to_f64(tr.norm_sqr().sqrt())) });
            }
        }
        Ok(Self::project(group, &m))
    }

    /// Orthogonal projection of an arbitrary square matrix onto the algebra.
    pub fn project(group: GroupId, m: &DMatrix<Complex<T>>) -> Self {
        let half = lit::<T>(0.5);
        let mut p = (m - m.adjoint()).map(|z| z * half);
        if group.is_real() {
            p.iter_mut().for_each(|z| z.im = T::zero());
        } else {
            let n = group.matrix_size();
            let shift = p.trace() / cplx(lit::<T>(n as f64));
            for i in 0..n {
                p[(i, i)] -= shift;
            }
        }
        Self { group, m: p }
    }

    pub fn from_coords(group: GroupId, coords: &[T]) -> Result<Self> {
        if coords.len() != group.dim() {
            return Err(Error::InvalidArgument(format!(
                "{group} needs {} coordinates, got {}",
                group.dim(),
                coords.len()
            )));
        }
        let mut out = Self::zero(group);
        for (b, c) in group.basis::<T>().iter().zip(coords) {
            out.m += b.m.map(|z| z * *c);
        }
        Ok(out)
    }

    /// Coordinates in the orthonormal basis of [`GroupId::basis`].
    pub fn coords(&self) -> Vec<T> {
        self.group.basis::<T>().iter().map(|b| self.dot(b)).collect()
    }

    pub fn group(&self) -> GroupId {
        self.group
    }

    pub fn matrix(&self) -> &DMatrix<Complex<T>> {
        &self.m
    }

    pub fn scale(&self, s: T) -> Self {
        Self { group: self.group, m: self.m.map(|z| z * s) }
    }

    /// `self + s * other`.
    pub fn axpy(&self, s: T, other: &Self) -> Self {
        debug_assert_eq!(self.group, other.group);
        Self { group: self.group, m: &self.m + other.m.map(|z| z * s) }
    }

    /// Lie bracket `[self, other]`.
    pub fn bracket(&self, other: &Self) -> Self {
        debug_assert_eq!(self.group, other.group);
        Self { group: self.group, m: &self.m * &other.m - &other.m * &self.m }
    }

    /// `Ad`-invariant inner product.
    pub fn inner(&self, other: &Self) -> Result<T> {
        if self.group != other.group {
            return Err(Error::GroupMismatch { left: self.group, right: other.group });
        }
        Ok(self.dot(other))
    }

    /// Inner product without the group check.
    pub(crate) fn dot(&self, other: &Self) -> T {
        // -Re tr(x y) = Re sum x_ij conj(y_ij) for anti-Hermitian y
        let s = self
            .m
            .iter()
            .zip(other.m.iter())
            .fold(T::zero(), |acc, (a, b)| acc + a.re * b.re + a.im * b.im);
        s * self.group.trace_scale::<T>()
    }

    pub fn norm_squared(&self) -> T {
        self.dot(self)
    }

    pub fn norm(&self) -> T {
        self.norm_squared().sqrt()
    }

    /// Frobenius norm of the matrix difference.
    pub fn frobenius_distance(&self, other: &Self) -> T {
        frobenius(&(&self.m - &other.m))
    }

    /// Matrix of `ad(self)` in the orthonormal basis; antisymmetric.
    pub fn ad_matrix(&self) -> DMatrix<T> {
        let basis = self.group.basis::<T>();
        let d = basis.len();
        DMatrix::from_fn(d, d, |i, j| basis[i].dot(&self.bracket(&basis[j])))
    }

    /// Killing form `tr(ad x ad y)` evaluated from structure constants.
    pub fn killing(&self, other: &Self) -> Result<T> {
        if self.group != other.group {
            return Err(Error::GroupMismatch { left: self.group, right: other.group });
        }
        Ok((self.ad_matrix() * other.ad_matrix()).trace())
    }

    /// `exp` as a group element.
    pub fn exp(&self) -> GroupElement<T> {
        exp_group(self)
    }
}

impl<T: Real> Add for AlgebraVector<T> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        Self { group: self.group, m: self.m + rhs.m }
    }
}

impl<'a, T: Real> Add<&'a AlgebraVector<T>> for &'a AlgebraVector<T> {
    type Output = AlgebraVector<T>;
    fn add(self, rhs: Self) -> AlgebraVector<T> {
        AlgebraVector { group: self.group, m: &self.m + &rhs.m }
    }
}

impl<T: Real> Sub for AlgebraVector<T> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        Self { group: self.group, m: self.m - rhs.m }
    }
}

impl<'a, T: Real> Sub<&'a AlgebraVector<T>> for &'a AlgebraVector<T> {
    type Output = AlgebraVector<T>;
    fn sub(self, rhs: Self) -> AlgebraVector<T> {
        AlgebraVector { group: self.group, m: &self.m - &rhs.m }
    }
}

impl<T: Real> Neg for AlgebraVector<T> {
    type Output = Self;
    fn neg(self) -> Self {
        Self { group: self.group, m: -self.m }
    }
}

impl<T: Real> Mul<T> for AlgebraVector<T> {
    type Output = Self;
    fn mul(self, s: T) -> Self {
        self.scale(s)
    }
}

/// Element of the compact group in the defining representation.
#[derive(Debug, Clone, PartialEq)]
pub struct GroupElement<T: Real = f64> {
    group: GroupId,
    m: DMatrix<Complex<T>>,
}

impl<T: Real> GroupElement<T> {
    pub fn identity(group: GroupId) -> Self {
        let n = group.matrix_size();
        Self { group, m: DMatrix::identity(n, n) }
    }

    /// Validating constructor: unitary with unit determinant.
    pub fn from_matrix(group: GroupId, m: DMatrix<Complex<T>>) -> Result<Self> {
        let n = group.matrix_size();
        if m.nrows() != n || m.ncols() != n {
            return Err(Error::NotInGroup { group, reason: format!("expected {n}x{n}") });
        }
        let tol = membership_tol::<T>() * lit(100.0);
        let g = Self { group, m };
        let defect = g.unitarity_defect();
        if defect > tol {
            return Err(Error::NotInGroup { group, reason: format!("|g^H g - 1| = {}", to_f64(defect)) });
        }
        let det = g.m.determinant();
        if (det - cplx(T::one())).norm_sqr().sqrt() > tol {
            return Err(Error::NotInGroup { group, reason: format!("det = {}", det) });
        }
        if group.is_real() && g.m.iter().any(|z| z.im.abs() > tol) {
            return Err(Error::NotInGroup { group, reason: "complex entries".into() });
        }
        Ok(g)
    }

    pub fn group(&self) -> GroupId {
        self.group
    }

    pub fn matrix(&self) -> &DMatrix<Complex<T>> {
        &self.m
    }

    pub fn mul(&self, other: &Self) -> Self {
        debug_assert_eq!(self.group, other.group);
        Self { group: self.group, m: &self.m * &other.m }
    }

    pub fn inverse(&self) -> Self {
        Self { group: self.group, m: self.m.adjoint() }
    }

    /// `Ad(g) x = g x g^{-1}`.
    pub fn adjoint(&self, x: &AlgebraVector<T>) -> AlgebraVector<T> {
        let m = &self.m * &x.m * self.m.adjoint();
        AlgebraVector::project(self.group, &m)
    }

    /// `Ad(g)^{-1} x = g^{-1} x g`.
    pub fn adjoint_inverse(&self, x: &AlgebraVector<T>) -> AlgebraVector<T> {
        let m = self.m.adjoint() * &x.m * &self.m;
        AlgebraVector::project(self.group, &m)
    }

    pub fn frobenius_distance(&self, other: &Self) -> T {
        frobenius(&(&self.m - &other.m))
    }

    /// `|g^H g - 1|_F`.
    pub fn unitarity_defect(&self) -> T {
        let n = self.m.nrows();
        frobenius(&(self.m.adjoint() * &self.m - DMatrix::<Complex<T>>::identity(n, n)))
    }

    /// `tr(g^k)`, a class function.
    pub fn trace_power(&self, k: u32) -> Complex<T> {
        let n = self.m.nrows();
        let mut p = DMatrix::<Complex<T>>::identity(n, n);
        for _ in 0..k {
            p = &p * &self.m;
        }
        p.trace()
    }

    pub fn log(&self) -> Result<AlgebraVector<T>> {
        log_group(self)
    }

    /// Bi-invariant distance to `other`, `|log(self^{-1} other)|`.
    pub fn distance(&self, other: &Self) -> Result<T> {
        Ok(log_group(&self.inverse().mul(other))?.norm())
    }
}

/// Matrix exponential of an algebra element.
///
/// Uses the spectral decomposition of the Hermitian matrix `i x`, so the
/// result is unitary to working precision.
pub fn exp_group<T: Real>(x: &AlgebraVector<T>) -> GroupElement<T> {
    let i = Complex::new(T::zero(), T::one());
    let h = x.m.map(|z| z * i);
    let eig = h.symmetric_eigen();
    let v = &eig.eigenvectors;
    let phases = eig.eigenvalues.map(|d| Complex::new(d.cos(), -d.sin()));
    let mut scaled = v.clone();
    for (j, mut col) in scaled.column_iter_mut().enumerate() {
        col *= phases[j];
    }
    let mut m = scaled * v.adjoint();
    if x.group.is_real() {
        m.iter_mut().for_each(|z| z.im = T::zero());
    }
    GroupElement { group: x.group, m }
}

/// Principal matrix logarithm.
///
/// Fails with [`Error::LogBranch`] when an eigenvalue sits within `1e-9` of
/// `-1` or when the principal logarithm leaves `su(n)`.
pub fn log_group<T: Real>(g: &GroupElement<T>) -> Result<AlgebraVector<T>> {
    let n = g.m.nrows();
    let schur = Schur::try_new(g.m.clone(), T::default_epsilon(), 10_000)
        .ok_or_else(|| Error::InvalidArgument("Schur iteration did not converge".into()))?;
    let (q, t) = schur.unpack();
    let pi = T::pi();
    let branch_tol = lit::<T>(1e-9).max(T::default_epsilon().sqrt());
    let mut args = Vec::with_capacity(n);
    for j in 0..n {
        let lam = t[(j, j)];
        let arg = lam.im.atan2(lam.re);
        if pi - arg.abs() < branch_tol {
            return Err(Error::LogBranch { argument: to_f64(arg) });
        }
        args.push(arg);
    }
    if !g.group.is_real() {
        let total = args.iter().fold(T::zero(), |a, b| a + *b);
        if total.abs() > lit::<T>(1e-6) {
            return Err(Error::LogBranch { argument: to_f64(total) });
        }
    }
    let mut scaled = q.clone();
    for (j, mut col) in scaled.column_iter_mut().enumerate() {
        col *= Complex::new(T::zero(), args[j]);
    }
    let m = scaled * q.adjoint();
    Ok(AlgebraVector::project(g.group, &m))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn su2_diag(theta: f64) -> AlgebraVector<f64> {
        let mut m = DMatrix::from_element(2, 2, Complex::new(0.0, 0.0));
        m[(0, 0)] = Complex::new(0.0, theta);
        m[(1, 1)] = Complex::new(0.0, -theta);
        AlgebraVector::from_matrix(GroupId::Su2, m).unwrap()
    }

    #[test]
    fn bases_are_orthonormal_and_in_algebra() {
        for g in GroupId::ALL {
            let b = g.basis::<f64>();
            assert_eq!(b.len(), g.dim());
            for (i, x) in b.iter().enumerate() {
                AlgebraVector::from_matrix(g, x.matrix().clone()).unwrap();
                for (j, y) in b.iter().enumerate() {
                    let expected = if i == j { 1.0 } else { 0.0 };
                    assert_abs_diff_eq!(x.inner(y).unwrap(), expected, epsilon = 1e-14);
                }
            }
        }
    }

    #[test]
    fn so3_basis_is_lx_ly_lz() {
        let b = GroupId::So3.basis::<f64>();
        // [L_x, L_y] = L_z
        let z = b[0].bracket(&b[1]);
        assert!(z.frobenius_distance(&b[2]) < 1e-15);
    }

    #[test]
    fn zero_vector_has_zero_inner() {
        let z = AlgebraVector::<f64>::zero(GroupId::Su3);
        assert_eq!(z.inner(&z).unwrap(), 0.0);
    }

    #[test]
    fn mismatched_groups_are_rejected() {
        let a = AlgebraVector::<f64>::zero(GroupId::Su2);
        let b = AlgebraVector::<f64>::zero(GroupId::So3);
        assert!(matches!(a.inner(&b), Err(Error::GroupMismatch { .. })));
        assert!(a.killing(&b).is_err());
    }

    #[test]
    fn killing_form_agrees_with_trace_form() {
        // su(2), x = diag(i/2, -i/2); Killing form from ad matrices
        let x = su2_diag(0.5);
        let brute = x.killing(&x).unwrap();
        let c = GroupId::Su2.killing_constant::<f64>();
        assert_abs_diff_eq!(-c * brute, x.inner(&x).unwrap(), epsilon = 1e-12);
        assert_abs_diff_eq!(x.inner(&x).unwrap(), 0.5, epsilon = 1e-15);
        for g in GroupId::ALL {
            let c = g.killing_constant::<f64>();
            for a in g.basis::<f64>() {
                for b in g.basis::<f64>() {
                    assert_abs_diff_eq!(-c * a.killing(&b).unwrap(), a.inner(&b).unwrap(), epsilon = 1e-12);
                }
            }
        }
    }

    #[test]
    fn rejects_non_algebra_matrices() {
        let m = DMatrix::from_element(2, 2, Complex::new(1.0, 0.0));
        assert!(AlgebraVector::from_matrix(GroupId::Su2, m).is_err());
        let mut m = DMatrix::from_element(2, 2, Complex::new(0.0, 0.0));
        m[(0, 0)] = Complex::new(0.0, 1.0);
        assert!(AlgebraVector::from_matrix(GroupId::Su2, m).is_err(), "trace must vanish");
    }

    #[test]
    fn exp_of_zero_is_identity() {
        for g in GroupId::ALL {
            let e = exp_group(&AlgebraVector::<f64>::zero(g));
            assert!(e.frobenius_distance(&GroupElement::identity(g)) < 1e-15);
        }
    }

    #[test]
    fn exp_matches_su2_closed_form() {
        // exp(theta n.(i sigma)) = cos(theta) + i sin(theta) n.sigma for a unit axis n
        let axis = [0.48, -0.6, 0.64];
        for &theta in &[0.1f64, 1.3, 2.9, 4.0] {
            let (s, c) = theta.sin_cos();
            let mut m = DMatrix::from_element(2, 2, Complex::new(0.0, 0.0));
            // i n.sigma
            m[(0, 0)] = Complex::new(0.0, axis[2]);
            m[(1, 1)] = Complex::new(0.0, -axis[2]);
            m[(0, 1)] = Complex::new(axis[1], axis[0]);
            m[(1, 0)] = Complex::new(-axis[1], axis[0]);
            let x = AlgebraVector::from_matrix(GroupId::Su2, m.map(|z| z * theta)).unwrap();
            let closed = DMatrix::<Complex<f64>>::identity(2, 2).map(|z| z * c) + m.map(|z| z * s);
            let numeric = exp_group(&x);
            let diff = (numeric.matrix() - closed).iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            assert!(diff < 1e-12, "theta {theta}: {diff}");
        }
    }

    #[test]
    fn exp_matches_rodrigues_on_so3() {
        let b = GroupId::So3.basis::<f64>();
        let theta = 1.7;
        let x = b[2].scale(theta);
        let g = exp_group(&x);
        let (s, c) = theta.sin_cos();
        let m = g.matrix();
        assert_abs_diff_eq!(m[(0, 0)].re, c, epsilon = 1e-13);
        assert_abs_diff_eq!(m[(1, 0)].re, s, epsilon = 1e-13);
        assert_abs_diff_eq!(m[(2, 2)].re, 1.0, epsilon = 1e-13);
    }

    #[test]
    fn log_of_identity_is_zero() {
        for g in GroupId::ALL {
            let x = log_group(&GroupElement::<f64>::identity(g)).unwrap();
            assert!(x.norm() < 1e-14);
        }
    }

    #[test]
    fn log_inverts_exp_for_small_arguments() {
        for g in GroupId::ALL {
            let coords: Vec<f64> = (0..g.dim()).map(|i| 0.05 * (i as f64 + 1.0).sin()).collect();
            let x = AlgebraVector::from_coords(g, &coords).unwrap();
            let back = log_group(&exp_group(&x)).unwrap();
            assert!(back.frobenius_distance(&x) < 1e-12);
        }
    }

    #[test]
    fn log_reports_branch_ambiguity() {
        let g = exp_group(&su2_diag(std::f64::consts::PI));
        assert!(matches!(log_group(&g), Err(Error::LogBranch { .. })));
    }

    #[test]
    fn group_constructor_validates() {
        let m = DMatrix::<Complex<f64>>::identity(2, 2).map(|z| z * 2.0);
        assert!(GroupElement::from_matrix(GroupId::Su2, m).is_err());
        let g = exp_group(&su2_diag(0.3));
        GroupElement::from_matrix(GroupId::Su2, g.matrix().clone()).unwrap();
    }

    #[test]
    fn reference_vectors_are_regular() {
        for g in GroupId::ALL {
            root_decomposition(&g.reference_torus_vector::<f64>()).unwrap();
        }
    }

    #[test]
    fn f32_exp_log_round_trip() {
        let x = AlgebraVector::<f32>::from_coords(GroupId::Su2, &[0.1, -0.2, 0.3]).unwrap();
        let g = exp_group(&x);
        assert!(g.unitarity_defect() < 1e-5);
        let back = log_group(&g).unwrap();
        assert!(back.frobenius_distance(&x) < 1e-4);
    }

    #[test]
    fn group_id_parses() {
        assert_eq!("SU3".parse::<GroupId>().unwrap(), GroupId::Su3);
        assert!("g2".parse::<GroupId>().is_err());
        assert_eq!(GroupId::So3.to_string(), "so3");
    }
}
