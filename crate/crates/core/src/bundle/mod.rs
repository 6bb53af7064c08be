//! Trivial principal bundles `B x G` over toy surfaces: horizontal lifts, the
//! pull-back connection map `mu_c`, holonomy along a loop, the induced map
//! `lambda_c` on gauge transformations, and the homothety of `mu_c`.
//!
//! Conventions in the identity section: a connection is a `g`-valued 1-form
//! `A`; the horizontal lift of a base curve through `(c(0), e)` is
//! `(c(t), h(t))` with `h' = -A(c') h`; gauge transformations act by
//! `A -> Ad(g) A - dg g^{-1}`. The holonomy `hol_c(omega)` is the element
//! with `(P^omega)^{-1} P^{omega_0}(u_0) = u_0 hol_c(omega)`, which makes
//! `hol_c = phi o mu_c` hold for the transport convention of
//! [`crate::transport`].

mod base;
mod form;
mod homothety;

use crate::error::{Error, Result};
use crate::lie::{exp_group, AlgebraVector, GroupElement, GroupId};
use crate::loops::{gauge_act, AlgebraLoop, GroupPath};
use crate::scalar::{lit, to_f64, Real};
use crate::transport::{solve_transport, Scheme};

pub use base::{BaseLoop, BaseManifold, Chart, ChartPoint};
pub use form::{AlgebraField, ConnectionForm, GaugeTransform, TorusTerm};
pub use homothety::{adjoint_pairing, check_homothety, CurveSupportedForm, HomothetyReport};

/// A base loop with its reference connection `omega_0` and the
/// `omega_0`-horizontal lift `sigma = (c, h)` sampled on `N + 1` points.
#[derive(Debug, Clone)]
pub struct LoopFrame<T: Real = f64> {
    pub c: BaseLoop<T>,
    pub omega0: ConnectionForm<T>,
    /// `h(t_i)`, the group part of the horizontal lift.
    pub sigma: GroupPath<T>,
    points: Vec<ChartPoint<T>>,
    velocities: Vec<[T; 2]>,
    scheme: Scheme,
}

impl<T: Real> LoopFrame<T> {
    /// Lift `c` horizontally for `omega0` on a grid of `n` intervals.
    ///
    /// Fails with [`Error::ReferenceHolonomy`] unless the lift closes up,
    /// since only then is `mu_c` valued in closed loops.
    pub fn new(c: BaseLoop<T>, omega0: ConnectionForm<T>, n: usize, scheme: Scheme) -> Result<Self> {
        if c.base() != omega0.base() {
            return Err(Error::InvalidArgument("loop and connection live on different bases".into()));
        }
        let group = omega0.group();
        let fine = 2 * n;
        let mut points = Vec::with_capacity(fine + 1);
        let mut velocities = Vec::with_capacity(fine + 1);
        for i in 0..=fine {
            let (p, v) = c.point_velocity(lit::<T>(i as f64) / lit(fine as f64));
            points.push(p);
            velocities.push(v);
        }
        let mut a = Vec::with_capacity(fine + 1);
        for (p, v) in points.iter().zip(&velocities) {
            a.push(omega0.value(p, *v)?);
        }
        // h^{-1} solves (h^{-1})' = h^{-1} A_0(c')
        let sol = solve_transport(&AlgebraLoop::from_samples(group, a, false)?, scheme)?;
        let sigma = GroupPath::from_samples(group, sol.path.samples().iter().map(|y| y.inverse()).collect())?;
        let gap = to_f64(sigma.end().frobenius_distance(&GroupElement::identity(group)));
        if gap > 1e-8 {
            return Err(Error::ReferenceHolonomy(gap));
        }
        let points = points.into_iter().step_by(2).collect();
        let velocities = velocities.into_iter().step_by(2).collect();
        Ok(Self { c, omega0, sigma, points, velocities, scheme })
    }

    pub fn n(&self) -> usize {
        self.sigma.n()
    }

    pub fn group(&self) -> GroupId {
        self.omega0.group()
    }

    pub fn scheme(&self) -> Scheme {
        self.scheme
    }

    pub fn point(&self, i: usize) -> &ChartPoint<T> {
        &self.points[i]
    }

    pub fn velocity(&self, i: usize) -> [T; 2] {
        self.velocities[i]
    }

    /// `max_i |omega_0(sigma'(t_i))|`: `h^{-1} h' + Ad(h^{-1}) A_0(c')`.
    pub fn horizontality_residual(&self) -> Result<T> {
        let d = self.sigma.left_derivative();
        let mut worst = T::zero();
        for (i, di) in d.iter().enumerate() {
            let a0 = self.omega0.value(&self.points[i], self.velocities[i])?;
            worst = worst.max((di + &self.sigma.sample(i).adjoint_inverse(&a0)).norm());
        }
        Ok(worst)
    }

    /// Pull-back connection map `mu_c(omega)(t) = Ad(h^{-1}) (A - A_0)(c'(t))`.
    pub fn mu(&self, omega: &ConnectionForm<T>) -> Result<AlgebraLoop<T>> {
        if omega.group() != self.group() {
            return Err(Error::GroupMismatch { left: self.group(), right: omega.group() });
        }
        if omega.base() != self.omega0.base() {
            return Err(Error::InvalidArgument("connection lives on a different base".into()));
        }
        let mut samples = Vec::with_capacity(self.n() + 1);
        for i in 0..=self.n() {
            let (p, v) = (&self.points[i], self.velocities[i]);
            let diff = omega.value(p, v)? - self.omega0.value(p, v)?;
            samples.push(self.sigma.sample(i).adjoint_inverse(&diff));
        }
        let open = AlgebraLoop::from_samples(self.group(), samples, false)?;
        Ok(open.clone().with_closed(true).unwrap_or(open))
    }

    /// Differential of `mu_c` at any point: `t -> Ad(h^{-1}) A(c'(t))`.
    pub fn d_mu(&self, a: &ConnectionForm<T>) -> Result<AlgebraLoop<T>> {
        let zero = ConnectionForm::zero(*self.omega0.base(), self.group());
        let frame = Self { omega0: zero, ..self.clone() };
        frame.mu(a)
    }

    /// `hol_c(omega) = phi(mu_c(omega))`.
    pub fn hol(&self, omega: &ConnectionForm<T>) -> Result<GroupElement<T>> {
        Ok(solve_transport(&self.mu(omega)?, self.scheme)?.endpoint)
    }

    /// `lambda_c(g)(t) = h(t)^{-1} g(c(t)) h(t)`.
    pub fn lambda(&self, g: &GaugeTransform<T>) -> Result<GroupPath<T>> {
        let mut samples = Vec::with_capacity(self.n() + 1);
        for i in 0..=self.n() {
            let h = self.sigma.sample(i);
            samples.push(h.inverse().mul(&g.value(&self.points[i])?).mul(h));
        }
        GroupPath::from_samples(self.group(), samples)
    }

    /// `lambda' lambda^{-1} = Ad(h^{-1}) (A_0 + dg(c') g^{-1} - Ad(g) A_0)` at
    /// `c(t)`, from `h' = -A_0(c') h`.
    pub fn lambda_right_derivative(&self, g: &GaugeTransform<T>) -> Result<AlgebraLoop<T>> {
        let mut samples = Vec::with_capacity(self.n() + 1);
        for i in 0..=self.n() {
            let (p, v) = (&self.points[i], self.velocities[i]);
            let a0 = self.omega0.value(p, v)?;
            let inner = &a0 + &g.right_differential(p, v)? - g.value(p)?.adjoint(&a0);
            samples.push(self.sigma.sample(i).adjoint_inverse(&inner));
        }
        AlgebraLoop::from_samples(self.group(), samples, false)
    }

    /// `max_t |mu_c(g . omega) - lambda_c(g) . mu_c(omega)|`, with the gauge
    /// action `Ad(lambda) u - lambda' lambda^{-1}` evaluated exactly.
    pub fn mu_equivariance_residual(&self, omega: &ConnectionForm<T>, g: &GaugeTransform<T>) -> Result<T> {
        let lhs = self.mu(&omega.gauge_transform(g)?)?;
        let lam = self.lambda(g)?;
        let dlam = self.lambda_right_derivative(g)?;
        let mu = self.mu(omega)?;
        let mut worst = T::zero();
        for i in 0..=self.n() {
            let rhs = lam.sample(i).adjoint(mu.sample(i)) - dlam.sample(i).clone();
            worst = worst.max(lhs.sample(i).frobenius_distance(&rhs));
        }
        Ok(worst)
    }

    /// Same residual with `lambda'` taken by finite differences on the grid.
    pub fn mu_equivariance_residual_sampled(&self, omega: &ConnectionForm<T>, g: &GaugeTransform<T>) -> Result<T> {
        let lhs = self.mu(&omega.gauge_transform(g)?)?;
        let rhs = gauge_act(&self.lambda(g)?, &self.mu(omega)?)?;
        Ok(lhs.samples().iter().zip(rhs.samples()).fold(T::zero(), |m, (a, b)| m.max(a.frobenius_distance(b))))
    }

    /// `|hol_c(g . omega) - lambda(0) hol_c(omega) lambda(1)^{-1}|_F`.
    pub fn hol_conjugation_residual(&self, omega: &ConnectionForm<T>, g: &GaugeTransform<T>) -> Result<T> {
        let lam = self.lambda(g)?;
        let lhs = self.hol(&omega.gauge_transform(g)?)?;
        let rhs = lam.start().mul(&self.hol(omega)?).mul(&lam.end().inverse());
        Ok(lhs.frobenius_distance(&rhs))
    }

    /// `max_k |tr hol_c(g . omega)^k - tr hol_c(omega)^k|`, `k = 1..n`.
    pub fn class_function_residual(&self, omega: &ConnectionForm<T>, g: &GaugeTransform<T>) -> Result<T> {
        let a = self.hol(&omega.gauge_transform(g)?)?;
        let b = self.hol(omega)?;
        Ok(class_function_distance(&a, &b))
    }
}

/// `max_k |tr a^k - tr b^k|` over `k = 1..n`; zero on a common conjugacy class.
pub fn class_function_distance<T: Real>(a: &GroupElement<T>, b: &GroupElement<T>) -> T {
    let n = a.group().matrix_size() as u32;
    (1..=n).fold(T::zero(), |m, k| m.max((a.trace_power(k) - b.trace_power(k)).norm_sqr().sqrt()))
}

/// Holonomy from parallel translation of the bundle equations along `c`,
/// independent of [`LoopFrame`] and of the loop-space transport: integrates
/// `K' = -A(c') K` and `h' = -A_0(c') h` with a fourth-order Magnus method
/// on Gauss nodes and returns `K(1)^{-1} h(1)`.
pub fn hol_direct<T: Real>(omega: &ConnectionForm<T>, omega0: &ConnectionForm<T>, c: &BaseLoop<T>, steps: usize) -> Result<GroupElement<T>> {
    let group = omega.group();
    if steps == 0 {
        return Err(Error::InvalidArgument("at least one step is required".into()));
    }
    let h = T::one() / lit(steps as f64);
    let r3 = lit::<T>(3.0f64.sqrt());
    let nodes = [lit::<T>(0.5) - r3 / lit(6.0), lit::<T>(0.5) + r3 / lit(6.0)];
    let mut k = GroupElement::identity(group);
    let mut h0 = GroupElement::identity(group);
    for j in 0..steps {
        let t0 = lit::<T>(j as f64) * h;
        let mut b = Vec::with_capacity(2);
        let mut b0 = Vec::with_capacity(2);
        for node in nodes {
            let (p, v) = c.point_velocity(t0 + node * h);
            b.push(-omega.value(&p, v)?);
            b0.push(-omega0.value(&p, v)?);
        }
        let magnus = |b: &[AlgebraVector<T>]| (&b[0] + &b[1]).scale(h * lit(0.5)).axpy(-r3 * h * h / lit(12.0), &b[0].bracket(&b[1]));
        k = exp_group(&magnus(&b)).mul(&k);
        h0 = exp_group(&magnus(&b0)).mul(&h0);
    }
    Ok(k.inverse().mul(&h0))
}
