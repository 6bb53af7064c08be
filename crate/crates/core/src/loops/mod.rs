//! Algebra-valued loops on `[0, 1]`, the `L^2` and spectral `H^s` inner
//! products, the orthonormal loop basis and group paths with the gauge action.

mod basis;
mod path;

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::lie::{AlgebraVector, GroupId};
use crate::scalar::{lit, Real};

pub use basis::{basis_loop, basis_value, enumerate_basis, BasisKind, BasisLabel, BasisTarget};
pub use path::{fd_weights, gauge_act, GroupPath};

/// Truncated Fourier coefficients of a closed loop, in basis coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct FourierCoefficients<T: Real = f64> {
    kmax: usize,
    /// `coeffs[k + kmax][j]` is the `j`-th coordinate of mode `k`.
    coeffs: Vec<Vec<Complex<T>>>,
}

impl<T: Real> FourierCoefficients<T> {
    pub fn kmax(&self) -> usize {
        self.kmax
    }

    pub fn mode(&self, k: i64) -> Option<&[Complex<T>]> {
        let idx = k + self.kmax as i64;
        if idx < 0 {
            return None;
        }
        self.coeffs.get(idx as usize).map(|c| c.as_slice())
    }

    /// `(k, sum_j |c_kj|^2)` per retained mode.
    pub fn mode_norms(&self) -> Vec<(i64, T)> {
        self.coeffs
            .iter()
            .enumerate()
            .map(|(i, c)| (i as i64 - self.kmax as i64, c.iter().fold(T::zero(), |a, z| a + z.norm_sqr())))
            .collect()
    }
}

/// Element of `H^0([0,1], g)` sampled at `t_i = i/N`, `i = 0..=N`.
#[derive(Debug, Clone, PartialEq)]
pub struct AlgebraLoop<T: Real = f64> {
    group: GroupId,
    samples: Vec<AlgebraVector<T>>,
    closed: bool,
    fourier: Option<FourierCoefficients<T>>,
}

pub(crate) fn check_grid(n: usize) -> Result<()> {
    if n < 2 || !n.is_power_of_two() {
        return Err(Error::GridMismatch(format!("grid size {n} must be a power of two >= 2")));
    }
    Ok(())
}

impl<T: Real> AlgebraLoop<T> {
    /// `samples` holds `N + 1` values including both endpoints.
    pub fn from_samples(group: GroupId, samples: Vec<AlgebraVector<T>>, closed: bool) -> Result<Self> {
        let n = samples.len().saturating_sub(1);
        check_grid(n)?;
        if let Some(bad) = samples.iter().find(|s| s.group() != group) {
            return Err(Error::GroupMismatch { left: group, right: bad.group() });
        }
        if closed {
            let gap = samples[0].frobenius_distance(&samples[n]);
            let scale = T::one() + samples[0].norm();
            if gap > lit::<T>(1e-10) * scale {
                return Err(Error::OpenLoop);
            }
        }
        Ok(Self { group, samples, closed, fourier: None })
    }

    pub fn from_fn(group: GroupId, n: usize, closed: bool, f: impl Fn(T) -> AlgebraVector<T>) -> Result<Self> {
        check_grid(n)?;
        let nn = lit::<T>(n as f64);
        let samples = (0..=n).map(|i| f(lit::<T>(i as f64) / nn)).collect();
        Self::from_samples(group, samples, closed)
    }

    pub fn zero(group: GroupId, n: usize) -> Result<Self> {
        Self::constant(&AlgebraVector::zero(group), n)
    }

    /// The constant loop `v^`.
    pub fn constant(v: &AlgebraVector<T>, n: usize) -> Result<Self> {
        check_grid(n)?;
        Ok(Self { group: v.group(), samples: vec![v.clone(); n + 1], closed: true, fourier: None })
    }

    /// Closed loop `a0 + sum_k cos(2 pi k t) a_k + sin(2 pi k t) b_k`.
    pub fn trig_polynomial(
        group: GroupId,
        n: usize,
        a0: &AlgebraVector<T>,
        cos: &[AlgebraVector<T>],
        sin: &[AlgebraVector<T>],
    ) -> Result<Self> {
        let two_pi = T::two_pi();
        let mut out = Self::from_fn(group, n, false, |t| {
            let mut v = a0.clone();
            for (k, a) in cos.iter().enumerate() {
                v = v.axpy((two_pi * lit((k + 1) as f64) * t).cos(), a);
            }
            for (k, b) in sin.iter().enumerate() {
                v = v.axpy((two_pi * lit((k + 1) as f64) * t).sin(), b);
            }
            v
        })?;
        // the endpoint is the start up to rounding of sin(2 pi k)
        out.samples[n] = out.samples[0].clone();
        out.closed = true;
        Ok(out)
    }

    pub fn group(&self) -> GroupId {
        self.group
    }

    /// Number of grid intervals `N`.
    pub fn n(&self) -> usize {
        self.samples.len() - 1
    }

    pub fn is_closed(&self) -> bool {
        self.closed
    }

    pub fn samples(&self) -> &[AlgebraVector<T>] {
        &self.samples
    }

    pub fn sample(&self, i: usize) -> &AlgebraVector<T> {
        &self.samples[i]
    }

    pub fn time(&self, i: usize) -> T {
        lit::<T>(i as f64) / lit(self.n() as f64)
    }

    pub fn fourier(&self) -> Option<&FourierCoefficients<T>> {
        self.fourier.as_ref()
    }

    /// Predicate for the based loop space: `u(0) = u(1) = 0`.
    pub fn vanishes_at_endpoints(&self, tol: T) -> bool {
        self.samples[0].norm() <= tol && self.samples[self.n()].norm() <= tol
    }

    pub fn max_norm(&self) -> T {
        self.samples.iter().fold(T::zero(), |m, s| m.max(s.norm()))
    }

    fn zip_with(&self, other: &Self, f: impl Fn(&AlgebraVector<T>, &AlgebraVector<T>) -> AlgebraVector<T>) -> Result<Self> {
        self.check_compatible(other)?;
        Ok(Self {
            group: self.group,
            samples: self.samples.iter().zip(&other.samples).map(|(a, b)| f(a, b)).collect(),
            closed: self.closed && other.closed,
            fourier: None,
        })
    }

    fn check_compatible(&self, other: &Self) -> Result<()> {
        if self.group != other.group {
            return Err(Error::GroupMismatch { left: self.group, right: other.group });
        }
        if self.n() != other.n() {
            return Err(Error::GridMismatch(format!("{} vs {} intervals", self.n(), other.n())));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a - b)
    }

    /// `self + s * other`.
    pub fn axpy(&self, s: T, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a.axpy(s, b))
    }

    pub fn scale(&self, s: T) -> Self {
        Self {
            group: self.group,
            samples: self.samples.iter().map(|a| a.scale(s)).collect(),
            closed: self.closed,
            fourier: None,
        }
    }

    pub fn map(&self, f: impl Fn(usize, &AlgebraVector<T>) -> AlgebraVector<T>) -> Self {
        Self {
            group: self.group,
            samples: self.samples.iter().enumerate().map(|(i, a)| f(i, a)).collect(),
            closed: false,
            fourier: None,
        }
    }

    /// Same loop with the closed flag re-checked.
    pub fn with_closed(mut self, closed: bool) -> Result<Self> {
        if closed {
            let n = self.n();
            let gap = self.samples[0].frobenius_distance(&self.samples[n]);
            if gap > lit::<T>(1e-8) * (T::one() + self.samples[0].norm()) {
                return Err(Error::OpenLoop);
            }
        }
        self.closed = closed;
        Ok(self)
    }

    /// Discrete Fourier coefficients for `|k| <= kmax` from the periodic samples.
    pub fn compute_fourier(&self, kmax: usize) -> Result<FourierCoefficients<T>> {
        if !self.closed {
            return Err(Error::OpenLoop);
        }
        let n = self.n();
        if 2 * kmax >= n {
            return Err(Error::GridMismatch(format!("mode cutoff {kmax} needs more than {n} samples")));
        }
        let coords: Vec<Vec<T>> = self.samples[..n].iter().map(|s| s.coords()).collect();
        let d = self.group.dim();
        let nn = lit::<T>(n as f64);
        let mut coeffs = Vec::with_capacity(2 * kmax + 1);
        for k in -(kmax as i64)..=(kmax as i64) {
            let mut c = vec![Complex::new(T::zero(), T::zero()); d];
            for (i, x) in coords.iter().enumerate() {
                // reduce k*i mod n before forming the angle
                let m = (k * i as i64).rem_euclid(n as i64) as f64;
                let ang = -T::two_pi() * lit::<T>(m) / nn;
                let w = Complex::new(ang.cos(), ang.sin());
                for j in 0..d {
                    c[j] += w * x[j];
                }
            }
            coeffs.push(c.into_iter().map(|z| z / nn).collect());
        }
        Ok(FourierCoefficients { kmax, coeffs })
    }

    /// Attach Fourier coefficients; they must match the DFT of the samples.
    pub fn with_fourier(mut self, fourier: FourierCoefficients<T>) -> Result<Self> {
        let own = self.compute_fourier(fourier.kmax)?;
        let dev = own
            .coeffs
            .iter()
            .flatten()
            .zip(fourier.coeffs.iter().flatten())
            .fold(T::zero(), |m, (a, b)| m.max((a - b).norm_sqr().sqrt()));
        if dev > lit(1e-10) {
            return Err(Error::InvalidArgument(format!("Fourier table deviates from samples by {dev}")));
        }
        self.fourier = Some(fourier);
        Ok(self)
    }

    /// Attach the DFT for `|k| <= kmax`.
    pub fn with_computed_fourier(mut self, kmax: usize) -> Result<Self> {
        self.fourier = Some(self.compute_fourier(kmax)?);
        Ok(self)
    }
}

/// `L^2` inner product `int_0^1 <u(t), w(t)> dt` by the trapezoidal rule.
pub fn l2_inner<T: Real>(u: &AlgebraLoop<T>, w: &AlgebraLoop<T>) -> Result<T> {
    u.check_compatible(w)?;
    let n = u.n();
    let mut s = T::zero();
    for i in 0..=n {
        let x = u.samples[i].dot(&w.samples[i]);
        s += if i == 0 || i == n { x * lit(0.5) } else { x };
    }
    Ok(s / lit(n as f64))
}

pub fn l2_norm<T: Real>(u: &AlgebraLoop<T>) -> T {
    l2_inner(u, u).expect("same loop").sqrt()
}

/// Spectral `H^s` product `sum_k (1 + (2 pi k)^2)^s Re<u_k, w_k>` over retained modes.
pub fn hs_inner<T: Real>(u: &AlgebraLoop<T>, w: &AlgebraLoop<T>, s: u32) -> Result<T> {
    u.check_compatible(w)?;
    if !u.closed || !w.closed {
        return Err(Error::OpenLoop);
    }
    let default_k = u.n() / 2 - 1;
    let fu = match &u.fourier {
        Some(f) => f.clone(),
        None => u.compute_fourier(default_k)?,
    };
    let fw = match &w.fourier {
        Some(f) if f.kmax == fu.kmax => f.clone(),
        _ => w.compute_fourier(fu.kmax)?,
    };
    let mut total = T::zero();
    for (idx, (a, b)) in fu.coeffs.iter().zip(&fw.coeffs).enumerate() {
        let k = lit::<T>(idx as f64 - fu.kmax as f64);
        let weight = (T::one() + (T::two_pi() * k).powi(2)).powi(s as i32);
        // coordinates are orthonormal, so the real pairing is the coordinate dot product
        let dot = a.iter().zip(b).fold(T::zero(), |acc, (x, y)| acc + x.re * y.re + x.im * y.im);
        total += weight * dot;
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample_vector(group: GroupId, seed: f64) -> AlgebraVector<f64> {
        let c: Vec<f64> = (0..group.dim()).map(|i| (seed * (i as f64 + 1.3)).sin()).collect();
        AlgebraVector::from_coords(group, &c).unwrap()
    }

    #[test]
    fn grid_must_be_power_of_two() {
        let v = AlgebraVector::<f64>::zero(GroupId::Su2);
        assert!(AlgebraLoop::constant(&v, 12).is_err());
        assert!(AlgebraLoop::constant(&v, 16).is_ok());
    }

    #[test]
    fn l2_inner_with_zero_is_zero() {
        let w = AlgebraLoop::constant(&sample_vector(GroupId::Su3, 0.4), 64).unwrap();
        let z = AlgebraLoop::zero(GroupId::Su3, 64).unwrap();
        assert_eq!(l2_inner(&z, &w).unwrap(), 0.0);
    }

    #[test]
    fn constant_loop_norm_is_vector_norm() {
        let v = sample_vector(GroupId::So3, 1.1);
        let u = AlgebraLoop::constant(&v, 32).unwrap();
        assert!((l2_inner(&u, &u).unwrap() - v.inner(&v).unwrap()).abs() < 1e-14);
    }

    #[test]
    fn size_mismatch_is_an_error() {
        let v = sample_vector(GroupId::Su2, 0.2);
        let a = AlgebraLoop::constant(&v, 32).unwrap();
        let b = AlgebraLoop::constant(&v, 64).unwrap();
        assert!(matches!(l2_inner(&a, &b), Err(Error::GridMismatch(_))));
    }

    #[test]
    fn hs_inner_multiplier_on_single_mode() {
        let g = GroupId::Su2;
        let a = sample_vector(g, 0.7);
        let z = AlgebraVector::zero(g);
        let u = AlgebraLoop::trig_polynomial(g, 64, &z, std::slice::from_ref(&a), &[]).unwrap();
        let l2 = l2_inner(&u, &u).unwrap();
        let h0 = hs_inner(&u, &u, 0).unwrap();
        let h1 = hs_inner(&u, &u, 1).unwrap();
        assert!((h0 - l2).abs() < 1e-12);
        let ratio = h1 / l2;
        let expected = 1.0 + 4.0 * std::f64::consts::PI.powi(2);
        assert!((ratio - expected).abs() < 1e-10 * expected);
    }

    #[test]
    fn hs_inner_of_constants_ignores_s() {
        let v = sample_vector(GroupId::Su3, 0.3);
        let u = AlgebraLoop::constant(&v, 32).unwrap();
        let l2 = l2_inner(&u, &u).unwrap();
        for s in 0..4 {
            assert!((hs_inner(&u, &u, s).unwrap() - l2).abs() < 1e-12);
        }
    }

    #[test]
    fn hs_inner_rejects_open_loops() {
        let g = GroupId::Su2;
        let v = sample_vector(g, 0.3);
        let u = AlgebraLoop::from_fn(g, 16, false, |t| v.scale(t)).unwrap();
        assert!(matches!(hs_inner(&u, &u, 1), Err(Error::OpenLoop)));
    }

    #[test]
    fn closed_flag_is_enforced() {
        let g = GroupId::Su2;
        let v = sample_vector(g, 0.3);
        assert!(matches!(AlgebraLoop::from_fn(g, 16, true, |t| v.scale(t)), Err(Error::OpenLoop)));
    }

    #[test]
    fn attached_fourier_table_must_match() {
        let g = GroupId::Su2;
        let a = sample_vector(g, 0.7);
        let z = AlgebraVector::zero(g);
        let u = AlgebraLoop::trig_polynomial(g, 64, &z, &[], &[a]).unwrap();
        let table = u.compute_fourier(4).unwrap();
        let u2 = u.clone().with_fourier(table.clone()).unwrap();
        assert!(u2.fourier().is_some());
        let mut bad = table;
        bad.coeffs[5][0] += Complex::new(0.1, 0.0);
        assert!(u.with_fourier(bad).is_err());
    }
}
