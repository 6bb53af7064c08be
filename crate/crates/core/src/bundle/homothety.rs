//! Horizontal tangent vectors to connection space supported along a loop,
//! and the homothety of `mu_c` on them.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::lie::AlgebraVector;
use crate::loops::AlgebraLoop;
use crate::scalar::{to_f64, Real};
use crate::transport::simpson_weights;

use super::form::ConnectionForm;
use super::LoopFrame;

/// `integral_0^1 delta_{eta(t)} dt` with `eta(t)` the covector
/// `eta_j = Ad(h) xi (g_jk c'^k) / a^2` over `c(t)`.
///
/// Its inner products are defined by the reproducing pairing
/// `<delta_eta, A>_0 = <eta, A_{c(t)}>` integrated over `t`; it is never
/// represented as a smooth form.
#[derive(Debug, Clone)]
pub struct CurveSupportedForm<'a, T: Real = f64> {
    frame: &'a LoopFrame<T>,
    xi: AlgebraLoop<T>,
    /// `eta_j(t_i)` for `j = 0, 1`.
    covectors: Vec<[AlgebraVector<T>; 2]>,
}

impl<'a, T: Real> CurveSupportedForm<'a, T> {
    pub fn new(frame: &'a LoopFrame<T>, xi: AlgebraLoop<T>) -> Result<Self> {
        if xi.group() != frame.group() {
            return Err(Error::GroupMismatch { left: frame.group(), right: xi.group() });
        }
        if xi.n() != frame.n() {
            return Err(Error::GridMismatch(format!("profile has {} intervals, lift has {}", xi.n(), frame.n())));
        }
        let a2 = frame.c.speed() * frame.c.speed();
        let base = frame.c.base();
        let covectors = (0..=frame.n())
            .map(|i| {
                let g = base.metric(frame.point(i));
                let v = frame.velocity(i);
                let x = frame.sigma.sample(i).adjoint(xi.sample(i));
                [0, 1].map(|j| x.scale((g[j][0] * v[0] + g[j][1] * v[1]) / a2))
            })
            .collect();
        Ok(Self { frame, xi, covectors })
    }

    pub fn xi(&self) -> &AlgebraLoop<T> {
        &self.xi
    }

    pub fn covector(&self, i: usize) -> &[AlgebraVector<T>; 2] {
        &self.covectors[i]
    }

    /// `g^{jk} <eta_j, A_k>` at grid point `i`.
    fn contract(&self, i: usize, other: &[AlgebraVector<T>; 2]) -> Result<T> {
        let g = self.frame.c.base().metric(self.frame.point(i));
        let det = g[0][0] * g[1][1] - g[0][1] * g[1][0];
        let inv = [[g[1][1] / det, -g[0][1] / det], [-g[1][0] / det, g[0][0] / det]];
        let eta = &self.covectors[i];
        let mut out = T::zero();
        for j in 0..2 {
            for k in 0..2 {
                out += inv[j][k] * eta[j].inner(&other[k])?;
            }
        }
        Ok(out)
    }

    /// Pointwise `|eta(t_i)|^2` in the metric of `T*B (x) g`.
    pub fn pointwise_norm_sq(&self, i: usize) -> Result<T> {
        self.contract(i, &self.covectors[i].clone())
    }

    fn integrate(&self, f: impl Fn(usize) -> Result<T>) -> Result<T> {
        let w = simpson_weights::<T>(self.frame.n());
        let mut acc = T::zero();
        for (i, wi) in w.iter().enumerate() {
            acc += *wi * f(i)?;
        }
        Ok(acc)
    }

    /// `<A, A>_0`.
    pub fn norm_sq(&self) -> Result<T> {
        self.integrate(|i| self.pointwise_norm_sq(i))
    }

    /// `<A, B>_0` for a smooth tangent `B`.
    pub fn pair_with(&self, b: &ConnectionForm<T>) -> Result<T> {
        self.integrate(|i| {
            let p = self.frame.point(i);
            let comps = [b.value(p, [T::one(), T::zero()])?, b.value(p, [T::zero(), T::one()])?];
            self.contract(i, &comps)
        })
    }

    /// `d mu_c(A)(t) = Ad(h^{-1}) eta(c'(t))`.
    pub fn image(&self) -> Result<AlgebraLoop<T>> {
        let samples = (0..=self.frame.n())
            .map(|i| {
                let v = self.frame.velocity(i);
                let eta = &self.covectors[i];
                self.frame.sigma.sample(i).adjoint_inverse(&eta[0].scale(v[0]).axpy(v[1], &eta[1]))
            })
            .collect();
        AlgebraLoop::from_samples(self.frame.group(), samples, self.xi.is_closed())
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct HomothetyReport {
    pub speed: f64,
    pub constant_speed_deviation: f64,
    /// `max_i | |eta(t_i)|^2 - |xi(t_i)|^2 / a^2 |`.
    pub pointwise_residual: f64,
    /// `<A, A>_0`.
    pub form_norm_sq: f64,
    /// `|xi|^2_{L^2} / a^2`.
    pub predicted_norm_sq: f64,
    /// `max_i |d mu_c(A)(t_i) - xi(t_i)|`.
    pub image_residual: f64,
    /// `|d mu_c(A)|^2_{L^2}`.
    pub image_norm_sq: f64,
    /// `|d mu_c(A)|^2 / <A, A>_0`, expected `a^2`; `None` for `xi = 0`.
    pub ratio: Option<f64>,
    pub ratio_residual: Option<f64>,
}

/// Builds `A = CurveSupportedForm(xi)` along `frame` and compares its norm
/// and image against `a^2`. The differential of `mu_c` does not depend on
/// the base point `omega`, so only the reference lift enters.
pub fn check_homothety<T: Real>(frame: &LoopFrame<T>, xi: &AlgebraLoop<T>) -> Result<HomothetyReport> {
    let a = frame.c.speed();
    let deviation = frame.c.constant_speed_residual(frame.n());
    if to_f64(deviation) > 1e-6 {
        return Err(Error::ConstantSpeed { expected: to_f64(a), deviation: to_f64(deviation) });
    }
    let form = CurveSupportedForm::new(frame, xi.clone())?;
    let a2 = a * a;
    let mut pointwise = T::zero();
    for i in 0..=frame.n() {
        let lhs = form.pointwise_norm_sq(i)?;
        pointwise = pointwise.max((lhs - xi.sample(i).norm_squared() / a2).abs());
    }
    let image = form.image()?;
    let image_residual = image.samples().iter().zip(xi.samples()).fold(T::zero(), |m, (u, v)| m.max((u - v).norm()));
    let weights = simpson_weights::<T>(frame.n());
    let image_norm_sq = image.samples().iter().zip(&weights).fold(T::zero(), |s, (u, w)| s + *w * u.norm_squared());
    let xi_sq = xi.samples().iter().zip(&weights).fold(T::zero(), |s, (u, w)| s + *w * u.norm_squared());
    let form_norm_sq = form.norm_sq()?;
    let (ratio, ratio_residual) = if to_f64(form_norm_sq) > 0.0 {
        let r = image_norm_sq / form_norm_sq;
        (Some(to_f64(r)), Some(to_f64((r - a2).abs())))
    } else {
        (None, None)
    };
    Ok(HomothetyReport {
        speed: to_f64(a),
        constant_speed_deviation: to_f64(deviation),
        pointwise_residual: to_f64(pointwise),
        form_norm_sq: to_f64(form_norm_sq),
        predicted_norm_sq: to_f64(xi_sq / a2),
        image_residual: to_f64(image_residual),
        image_norm_sq: to_f64(image_norm_sq),
        ratio,
        ratio_residual,
    })
}

/// `(1/a^2) <xi, d mu_c(B)>_{L^2}`, the adjoint side of [`CurveSupportedForm::pair_with`].
pub fn adjoint_pairing<T: Real>(frame: &LoopFrame<T>, xi: &AlgebraLoop<T>, b: &ConnectionForm<T>) -> Result<T> {
    let a = frame.c.speed();
    let image = frame.d_mu(b)?;
    let w = simpson_weights::<T>(frame.n());
    let mut acc = T::zero();
    for (i, wi) in w.iter().enumerate() {
        acc += *wi * xi.sample(i).inner(image.sample(i))?;
    }
    Ok(acc / (a * a))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bundle::{BaseLoop, BaseManifold, Chart};
    use crate::lie::GroupId;
    use crate::random::{random_loop, rng};
    use crate::transport::Scheme;

    fn frame(a: f64) -> LoopFrame<f64> {
        let base: BaseManifold<f64> = BaseManifold::flat_torus(1.0, 1.3).unwrap();
        let c = BaseLoop::with_speed(base, Chart::Primary, [0.1, 0.2], [1, 0], vec![[0.02, 0.1]], vec![[0.0, 0.05]], a).unwrap();
        LoopFrame::new(c, ConnectionForm::zero(base, GroupId::Su2), 128, Scheme::Rkmk4).unwrap()
    }

    #[test]
    fn zero_profile_has_zero_norms() {
        let f = frame(2.0);
        let r = check_homothety(&f, &AlgebraLoop::zero(GroupId::Su2, 128).unwrap()).unwrap();
        assert_eq!(r.form_norm_sq, 0.0);
        assert_eq!(r.image_norm_sq, 0.0);
        assert!(r.ratio.is_none());
    }

    #[test]
    fn constant_unit_profile_on_coordinate_circle() {
        let base: BaseManifold<f64> = BaseManifold::flat_torus(2.0, 1.0).unwrap();
        let c = BaseLoop::coordinate_circle(base, [0.0, 0.5], [1, 0]).unwrap();
        let f = LoopFrame::new(c, ConnectionForm::zero(base, GroupId::Su3), 64, Scheme::Rkmk4).unwrap();
        let e: AlgebraVector<f64> = GroupId::Su3.basis()[0].clone();
        let form = CurveSupportedForm::new(&f, AlgebraLoop::constant(&e, 64).unwrap()).unwrap();
        for i in 0..=64 {
            assert!((form.pointwise_norm_sq(i).unwrap() - 0.25).abs() < 1e-12);
        }
    }

    #[test]
    fn ratio_is_speed_squared() {
        for a in [1.5, std::f64::consts::TAU, 5.0] {
            let f = frame(a);
            let xi = random_loop(GroupId::Su2, 128, 3, 1.0, &mut rng(3)).unwrap();
            let r = check_homothety(&f, &xi).unwrap();
            assert!(r.pointwise_residual < 1e-10);
            assert!(r.image_residual < 1e-12);
            assert!(r.ratio_residual.unwrap() < 1e-8, "{:?}", r);
            assert!((r.form_norm_sq - r.predicted_norm_sq).abs() < 1e-12);
        }
    }

    #[test]
    fn pairing_is_adjoint_to_the_differential() {
        let g = GroupId::Su2;
        let f = frame(2.5);
        let base = *f.c.base();
        let av = |c: &[f64]| AlgebraVector::from_coords(g, c).unwrap();
        let t = crate::bundle::TorusTerm { mode: [1, 1], cos: av(&[0.2, -0.1, 0.4]), sin: av(&[0.0, 0.3, 0.1]) };
        let b = ConnectionForm::torus(base, g, vec![t.clone()], vec![t]).unwrap();
        let xi = random_loop(g, 128, 2, 1.0, &mut rng(9)).unwrap();
        let form = CurveSupportedForm::new(&f, xi.clone()).unwrap();
        let lhs = form.pair_with(&b).unwrap();
        let rhs = adjoint_pairing(&f, &xi, &b).unwrap();
        assert!((lhs - rhs).abs() < 1e-12, "{lhs} {rhs}");
    }
}
