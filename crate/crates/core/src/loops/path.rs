use crate::error::{Error, Result};
use crate::lie::{AlgebraVector, GroupElement, GroupId};
use crate::scalar::{lit, Real};

use super::{check_grid, AlgebraLoop};

/// Stencil half-width of the finite-difference derivative (order 8).
const STENCIL: usize = 4;

/// Finite-difference weights for the `m`-th derivative at `x0` from nodes `xs`
/// (Fornberg's recursion).
pub fn fd_weights(x0: f64, xs: &[f64], m: usize) -> Vec<f64> {
    let n = xs.len();
    let mut c = vec![vec![0.0; m + 1]; n];
    let mut c1 = 1.0;
    let mut c4 = xs[0] - x0;
    c[0][0] = 1.0;
    for i in 1..n {
        let mn = i.min(m);
        let mut c2 = 1.0;
        let c5 = c4;
        c4 = xs[i] - x0;
        for j in 0..i {
            let c3 = xs[i] - xs[j];
            c2 *= c3;
            if j == i - 1 {
                for k in (1..=mn).rev() {
                    c[i][k] = c1 * (k as f64 * c[i - 1][k - 1] - c5 * c[i - 1][k]) / c2;
                }
                c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
            }
            for k in (1..=mn).rev() {
                c[j][k] = (c4 * c[j][k] - k as f64 * c[j][k - 1]) / c3;
            }
            c[j][0] = c4 * c[j][0] / c3;
        }
        c1 = c2;
    }
    c.into_iter().map(|row| row[m]).collect()
}

/// Group-valued path sampled at `t_i = i/N`, `i = 0..=N`.
#[derive(Debug, Clone, PartialEq)]
pub struct GroupPath<T: Real = f64> {
    group: GroupId,
    samples: Vec<GroupElement<T>>,
}

impl<T: Real> GroupPath<T> {
    pub fn from_samples(group: GroupId, samples: Vec<GroupElement<T>>) -> Result<Self> {
        check_grid(samples.len().saturating_sub(1))?;
        if let Some(bad) = samples.iter().find(|s| s.group() != group) {
            return Err(Error::GroupMismatch { left: group, right: bad.group() });
        }
        Ok(Self { group, samples })
    }

    pub fn from_fn(group: GroupId, n: usize, f: impl Fn(T) -> GroupElement<T>) -> Result<Self> {
        check_grid(n)?;
        let nn = lit::<T>(n as f64);
        Self::from_samples(group, (0..=n).map(|i| f(lit::<T>(i as f64) / nn)).collect())
    }

    pub fn constant(g: &GroupElement<T>, n: usize) -> Result<Self> {
        check_grid(n)?;
        Ok(Self { group: g.group(), samples: vec![g.clone(); n + 1] })
    }

    pub fn identity(group: GroupId, n: usize) -> Result<Self> {
        Self::constant(&GroupElement::identity(group), n)
    }

    pub fn group(&self) -> GroupId {
        self.group
    }

    pub fn n(&self) -> usize {
        self.samples.len() - 1
    }

    pub fn samples(&self) -> &[GroupElement<T>] {
        &self.samples
    }

    pub fn sample(&self, i: usize) -> &GroupElement<T> {
        &self.samples[i]
    }

    pub fn start(&self) -> &GroupElement<T> {
        &self.samples[0]
    }

    pub fn end(&self) -> &GroupElement<T> {
        &self.samples[self.n()]
    }

    /// Pointwise product `(self * other)(t) = self(t) other(t)`.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        if self.n() != other.n() {
            return Err(Error::GridMismatch(format!("{} vs {} intervals", self.n(), other.n())));
        }
        Ok(Self {
            group: self.group,
            samples: self.samples.iter().zip(&other.samples).map(|(a, b)| a.mul(b)).collect(),
        })
    }

    pub fn inverse(&self) -> Self {
        Self { group: self.group, samples: self.samples.iter().map(|g| g.inverse()).collect() }
    }

    /// Largest `N |g_{i+1} - g_i|`, the discrete `H^1` sanity quantity.
    pub fn max_step_ratio(&self) -> T {
        let nn = lit::<T>(self.n() as f64);
        self.samples.windows(2).fold(T::zero(), |m, w| m.max(w[0].frobenius_distance(&w[1]) * nn))
    }

    pub fn satisfies_step_bound(&self, c: T) -> bool {
        self.max_step_ratio() <= c
    }

    fn matrix_derivative(&self) -> Vec<nalgebra::DMatrix<num_complex::Complex<T>>> {
        let n = self.n();
        let width = (2 * STENCIL).min(n);
        let nn = lit::<T>(n as f64);
        (0..=n)
            .map(|i| {
                let start = i.saturating_sub(STENCIL).min(n - width);
                let xs: Vec<f64> = (start..=start + width).map(|j| j as f64).collect();
                let w = fd_weights(i as f64, &xs, 1);
                let mut acc = self.samples[start].matrix().map(|z| z * lit::<T>(w[0]));
                for (k, wk) in w.iter().enumerate().skip(1) {
                    acc += self.samples[start + k].matrix().map(|z| z * lit::<T>(*wk));
                }
                acc * num_complex::Complex::new(nn, T::zero())
            })
            .collect()
    }

    /// Right-trivialized derivative `g'(t) g(t)^{-1}` at every grid point.
    pub fn right_derivative(&self) -> Vec<AlgebraVector<T>> {
        self.matrix_derivative()
            .iter()
            .zip(&self.samples)
            .map(|(d, g)| AlgebraVector::project(self.group, &(d * g.matrix().adjoint())))
            .collect()
    }

    /// Left-trivialized derivative `g(t)^{-1} g'(t)` at every grid point.
    pub fn left_derivative(&self) -> Vec<AlgebraVector<T>> {
        self.matrix_derivative()
            .iter()
            .zip(&self.samples)
            .map(|(d, g)| AlgebraVector::project(self.group, &(g.matrix().adjoint() * d)))
            .collect()
    }
}

/// Gauge action `(g . u)(t) = Ad(g(t)) u(t) - g'(t) g(t)^{-1}`.
pub fn gauge_act<T: Real>(g: &GroupPath<T>, u: &AlgebraLoop<T>) -> Result<AlgebraLoop<T>> {
    if g.group != u.group() {
        return Err(Error::GroupMismatch { left: g.group, right: u.group() });
    }
    if g.n() != u.n() {
        return Err(Error::GridMismatch(format!("path has {} intervals, loop {}", g.n(), u.n())));
    }
    let dg = g.right_derivative();
    let acted = u.map(|i, x| g.samples[i].adjoint(x) - dg[i].clone());
    if u.is_closed() {
        if let Ok(c) = acted.clone().with_closed(true) {
            return Ok(c);
        }
    }
    Ok(acted)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lie::exp_group;

    #[test]
    fn fornberg_central_weights() {
        let w = fd_weights(0.0, &[-1.0, 0.0, 1.0], 1);
        assert!((w[0] + 0.5).abs() < 1e-15 && w[1].abs() < 1e-15 && (w[2] - 0.5).abs() < 1e-15);
        let xs: Vec<f64> = (0..9).map(|j| j as f64).collect();
        let w = fd_weights(0.0, &xs, 1);
        // exact on polynomials of degree 8
        let d: f64 = xs.iter().zip(&w).map(|(x, c)| c * x.powi(8)).sum();
        assert!(d.abs() < 1e-8);
        let d: f64 = xs.iter().zip(&w).map(|(x, c)| c * x).sum();
        assert!((d - 1.0).abs() < 1e-12);
    }

    #[test]
    fn derivative_of_one_parameter_subgroup() {
        let g = GroupId::Su3;
        let x = AlgebraVector::from_coords(g, &[0.3, -0.2, 0.5, 0.1, 0.0, 0.7, -0.4, 0.2]).unwrap();
        let p = GroupPath::from_fn(g, 64, |t| exp_group(&x.scale(t))).unwrap();
        for d in p.right_derivative().iter().chain(p.left_derivative().iter()) {
            assert!(d.frobenius_distance(&x) < 1e-9);
        }
    }

    #[test]
    fn identity_path_leaves_loops_unchanged() {
        let g = GroupId::Su2;
        let v = AlgebraVector::from_coords(g, &[0.1, 0.2, 0.3]).unwrap();
        let u = AlgebraLoop::from_fn(g, 32, false, |t| v.scale(t)).unwrap();
        let acted = gauge_act(&GroupPath::identity(g, 32).unwrap(), &u).unwrap();
        assert_eq!(acted.samples(), u.samples());
    }

    #[test]
    fn constant_path_acts_by_conjugation() {
        let g = GroupId::So3;
        let h = exp_group(&AlgebraVector::from_coords(g, &[0.4, -1.0, 0.3]).unwrap());
        let v = AlgebraVector::from_coords(g, &[0.1, 0.2, 0.3]).unwrap();
        let u = AlgebraLoop::constant(&v, 16).unwrap();
        let acted = gauge_act(&GroupPath::constant(&h, 16).unwrap(), &u).unwrap();
        for s in acted.samples() {
            assert!(s.frobenius_distance(&h.adjoint(&v)) < 1e-12);
        }
        assert!(acted.is_closed());
    }
}
