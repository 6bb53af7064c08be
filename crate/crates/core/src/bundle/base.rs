//! Toy base surfaces and constant-speed loops on them.

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{lit, to_f64, Real};

/// Which coordinate chart a point is expressed in. The flat torus uses a
/// single chart (its universal cover); the sphere uses stereographic
/// projection from the north (`Primary`) or south (`Secondary`) pole.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Chart {
    Primary,
    Secondary,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChartPoint<T: Real = f64> {
    pub chart: Chart,
    pub x: [T; 2],
}

impl<T: Real> ChartPoint<T> {
    pub fn new(chart: Chart, x: [T; 2]) -> Self {
        Self { chart, x }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BaseManifold<T: Real = f64> {
    /// `R^2 / (L1 Z x L2 Z)` with the Euclidean metric.
    FlatTorus { l1: T, l2: T },
    /// Round sphere of radius `radius` with two stereographic charts.
    RoundSphere { radius: T },
}

impl<T: Real> BaseManifold<T> {
    pub fn flat_torus(l1: T, l2: T) -> Result<Self> {
        if l1 <= T::zero() || l2 <= T::zero() {
            return Err(Error::InvalidArgument("torus periods must be positive".into()));
        }
        Ok(Self::FlatTorus { l1, l2 })
    }

    pub fn round_sphere(radius: T) -> Result<Self> {
        if radius <= T::zero() {
            return Err(Error::InvalidArgument("sphere radius must be positive".into()));
        }
        Ok(Self::RoundSphere { radius })
    }

    /// Conformal factor `f` with metric `f(x) (dx1^2 + dx2^2)`.
    pub fn conformal_factor(&self, p: &ChartPoint<T>) -> T {
        match self {
            Self::FlatTorus { .. } => T::one(),
            Self::RoundSphere { radius } => {
                let q = T::one() + p.x[0] * p.x[0] + p.x[1] * p.x[1];
                lit::<T>(4.0) * *radius * *radius / (q * q)
            }
        }
    }

    /// Metric matrix at a chart point.
    pub fn metric(&self, p: &ChartPoint<T>) -> [[T; 2]; 2] {
        let f = self.conformal_factor(p);
        [[f, T::zero()], [T::zero(), f]]
    }

    pub fn norm(&self, p: &ChartPoint<T>, v: [T; 2]) -> T {
        let g = self.metric(p);
        (g[0][0] * v[0] * v[0] + lit::<T>(2.0) * g[0][1] * v[0] * v[1] + g[1][1] * v[1] * v[1]).sqrt()
    }

    /// Embedding of the sphere into `R^3`; `None` for the torus.
    pub fn ambient(&self, p: &ChartPoint<T>) -> Option<[T; 3]> {
        match self {
            Self::FlatTorus { .. } => None,
            Self::RoundSphere { radius } => {
                let r2 = p.x[0] * p.x[0] + p.x[1] * p.x[1];
                let q = T::one() + r2;
                let two = lit::<T>(2.0);
                let z = match p.chart {
                    Chart::Primary => (r2 - T::one()) / q,
                    Chart::Secondary => (T::one() - r2) / q,
                };
                Some([*radius * two * p.x[0] / q, *radius * two * p.x[1] / q, *radius * z])
            }
        }
    }

    /// Differential of [`Self::ambient`] applied to a chart tangent vector.
    pub fn ambient_tangent(&self, p: &ChartPoint<T>, v: [T; 2]) -> Option<[T; 3]> {
        match self {
            Self::FlatTorus { .. } => None,
            Self::RoundSphere { radius } => {
                let (x1, x2) = (p.x[0], p.x[1]);
                let q = T::one() + x1 * x1 + x2 * x2;
                let two = lit::<T>(2.0);
                let four = lit::<T>(4.0);
                let dot = x1 * v[0] + x2 * v[1];
                let d1 = *radius * (two * v[0] / q - four * x1 * dot / (q * q));
                let d2 = *radius * (two * v[1] / q - four * x2 * dot / (q * q));
                let d3 = *radius * four * dot / (q * q);
                let d3 = match p.chart {
                    Chart::Primary => d3,
                    Chart::Secondary => -d3,
                };
                Some([d1, d2, d3])
            }
        }
    }

    /// Coordinates of `p` and `v` in the other chart.
    pub fn change_chart(&self, p: &ChartPoint<T>, v: [T; 2]) -> Result<(ChartPoint<T>, [T; 2])> {
        match self {
            Self::FlatTorus { .. } => Ok((*p, v)),
            Self::RoundSphere { .. } => {
                let r2 = p.x[0] * p.x[0] + p.x[1] * p.x[1];
                if r2 <= lit(1e-20) {
                    return Err(Error::InvalidArgument("pole is not covered by the other chart".into()));
                }
                let chart = match p.chart {
                    Chart::Primary => Chart::Secondary,
                    Chart::Secondary => Chart::Primary,
                };
                let y = [p.x[0] / r2, p.x[1] / r2];
                // derivative of the inversion x -> x / |x|^2
                let dot = p.x[0] * v[0] + p.x[1] * v[1];
                let two = lit::<T>(2.0);
                let w = [
                    v[0] / r2 - two * p.x[0] * dot / (r2 * r2),
                    v[1] / r2 - two * p.x[1] * dot / (r2 * r2),
                ];
                Ok((ChartPoint::new(chart, y), w))
            }
        }
    }
}

/// Closed loop in one chart of a base surface, reparametrized to constant
/// speed `a`.
///
/// The chart curve is `x(tau) = x0 + w tau + sum_k a_k cos(2 pi k tau) + b_k sin(2 pi k tau)`
/// with `w` a lattice vector of the torus (zero on the sphere). The arc
/// length `s(tau)` is integrated spectrally from the speed and inverted by
/// Newton's method.
#[derive(Debug, Clone, PartialEq)]
pub struct BaseLoop<T: Real = f64> {
    base: BaseManifold<T>,
    chart: Chart,
    x0: [T; 2],
    winding: [T; 2],
    cos: Vec<[T; 2]>,
    sin: Vec<[T; 2]>,
    length: T,
    /// Fourier coefficients of the speed for `k >= 1`.
    speed_modes: Vec<Complex<T>>,
}

const SPEED_SAMPLES: usize = 4096;

impl<T: Real> BaseLoop<T> {
    pub fn new(base: BaseManifold<T>, chart: Chart, x0: [T; 2], winding: [i64; 2], cos: Vec<[T; 2]>, sin: Vec<[T; 2]>) -> Result<Self> {
        let mut out = Self::unfitted(base, chart, x0, winding, cos, sin)?;
        out.fit_arc_length()?;
        Ok(out)
    }

    fn unfitted(base: BaseManifold<T>, chart: Chart, x0: [T; 2], winding: [i64; 2], cos: Vec<[T; 2]>, sin: Vec<[T; 2]>) -> Result<Self> {
        let winding = match base {
            BaseManifold::FlatTorus { l1, l2 } => [lit::<T>(winding[0] as f64) * l1, lit::<T>(winding[1] as f64) * l2],
            BaseManifold::RoundSphere { .. } => {
                if winding != [0, 0] {
                    return Err(Error::InvalidArgument("loops on the sphere carry no winding".into()));
                }
                [T::zero(), T::zero()]
            }
        };
        if cos.len() != sin.len() {
            return Err(Error::InvalidArgument("cosine and sine tables differ in length".into()));
        }
        Ok(Self { base, chart, x0, winding, cos, sin, length: T::zero(), speed_modes: Vec::new() })
    }

    /// Same shape with the periodic part scaled so that the speed equals `a`.
    pub fn with_speed(base: BaseManifold<T>, chart: Chart, x0: [T; 2], winding: [i64; 2], cos: Vec<[T; 2]>, sin: Vec<[T; 2]>, a: T) -> Result<Self> {
        let build = |lam: T| {
            let sc = |v: &Vec<[T; 2]>| v.iter().map(|p| [p[0] * lam, p[1] * lam]).collect::<Vec<_>>();
            Self::new(base, chart, x0, winding, sc(&cos), sc(&sin))
        };
        let length_at = |lam: T| -> Result<T> {
            let sc = |v: &Vec<[T; 2]>| v.iter().map(|p| [p[0] * lam, p[1] * lam]).collect::<Vec<_>>();
            let probe = Self::unfitted(base, chart, x0, winding, sc(&cos), sc(&sin))?;
            let speeds = probe.sampled_speeds()?;
            Ok(speeds.iter().fold(T::zero(), |a, s| a + *s) / lit(SPEED_SAMPLES as f64))
        };
        let at_zero = if winding == [0, 0] { T::zero() } else { length_at(T::zero())? };
        if (at_zero - a).abs() <= lit::<T>(1e-13) * a {
            return build(T::zero());
        }
        if at_zero > a {
            return Err(Error::InvalidArgument(format!(
                "speed {} is below the minimal length {} of the winding class",
                to_f64(a),
                to_f64(at_zero)
            )));
        }
        let mut lo = T::zero();
        let mut hi = T::one();
        let mut guard = 0;
        while length_at(hi)? < a {
            lo = hi;
            hi = hi + hi;
            guard += 1;
            if guard > 60 {
                return Err(Error::InvalidArgument("periodic part too small to reach the requested speed".into()));
            }
        }
        for _ in 0..200 {
            let mid = (lo + hi) * lit(0.5);
            if length_at(mid)? < a {
                lo = mid;
            } else {
                hi = mid;
            }
            if hi - lo <= T::default_epsilon() * hi * lit(4.0) {
                break;
            }
        }
        build((lo + hi) * lit(0.5))
    }

    /// Straight loop `x(t) = x0 + t w` along a lattice vector of the torus.
    pub fn coordinate_circle(base: BaseManifold<T>, x0: [T; 2], winding: [i64; 2]) -> Result<Self> {
        Self::new(base, Chart::Primary, x0, winding, Vec::new(), Vec::new())
    }

    pub fn base(&self) -> &BaseManifold<T> {
        &self.base
    }

    /// Constant speed `a`, equal to the length of the loop.
    pub fn speed(&self) -> T {
        self.length
    }

    fn curve(&self, tau: T) -> ([T; 2], [T; 2]) {
        let mut x = [self.x0[0] + self.winding[0] * tau, self.x0[1] + self.winding[1] * tau];
        let mut dx = self.winding;
        for (k, (a, b)) in self.cos.iter().zip(&self.sin).enumerate() {
            let w = T::two_pi() * lit((k + 1) as f64);
            let (s, c) = (w * tau).sin_cos();
            for j in 0..2 {
                x[j] += a[j] * c + b[j] * s;
                dx[j] += w * (b[j] * c - a[j] * s);
            }
        }
        (x, dx)
    }

    fn raw_speed(&self, tau: T) -> T {
        let (x, dx) = self.curve(tau);
        self.base.norm(&ChartPoint::new(self.chart, x), dx)
    }

    fn sampled_speeds(&self) -> Result<Vec<T>> {
        let mm = lit::<T>(SPEED_SAMPLES as f64);
        let speeds: Vec<T> = (0..SPEED_SAMPLES).map(|i| self.raw_speed(lit::<T>(i as f64) / mm)).collect();
        if speeds.iter().any(|s| *s <= lit(1e-12)) {
            return Err(Error::InvalidArgument("chart curve is not regular".into()));
        }
        Ok(speeds)
    }

    fn fit_arc_length(&mut self) -> Result<()> {
        let m = SPEED_SAMPLES;
        let mm = lit::<T>(m as f64);
        let speeds = self.sampled_speeds()?;
        let mean = speeds.iter().fold(T::zero(), |a, s| a + *s) / mm;
        let twiddle: Vec<Complex<T>> = (0..m)
            .map(|i| {
                let ang = -T::two_pi() * lit::<T>(i as f64) / mm;
                Complex::new(ang.cos(), ang.sin())
            })
            .collect();
        let tail_tol = mean * lit(1e-15);
        let mut modes = Vec::new();
        let mut quiet = 0;
        for k in 1..m / 2 {
            let mut c = Complex::new(T::zero(), T::zero());
            for (i, s) in speeds.iter().enumerate() {
                c += twiddle[(k * i) % m] * *s;
            }
            let c = c / mm;
            modes.push(c);
            // the speed of a band-limited regular curve is analytic, so its
            // coefficients decay geometrically
            quiet = if c.norm_sqr().sqrt() > tail_tol { 0 } else { quiet + 1 };
            if quiet >= 16 {
                break;
            }
        }
        modes.truncate(modes.len() - quiet);
        self.length = mean;
        self.speed_modes = modes;
        Ok(())
    }

    /// Spectral arc length `s(tau)` and its derivative.
    fn arc_length(&self, tau: T) -> (T, T) {
        let mut s = self.length * tau;
        let mut ds = self.length;
        for (i, c) in self.speed_modes.iter().enumerate() {
            let k = lit::<T>((i + 1) as f64);
            let w = T::two_pi() * k;
            let (sn, cs) = (w * tau).sin_cos();
            // 2 Re[c (e^{i w tau} - 1) / (i w)]
            let e = Complex::new(cs - T::one(), sn);
            let term = c * e / Complex::new(T::zero(), w);
            s += lit::<T>(2.0) * term.re;
            ds += lit::<T>(2.0) * (c * Complex::new(cs, sn)).re;
        }
        (s, ds)
    }

    /// Curve parameter `tau` with `s(tau) = a t`.
    ///
    /// `s` is increasing with `s(0) = 0` and `s(1) = a`, so the root stays
    /// bracketed; Newton steps that leave the bracket fall back to bisection.
    pub fn tau(&self, t: T) -> T {
        let target = self.length * t;
        let whole = t.floor();
        let target_frac = target - self.length * whole;
        let (mut lo, mut hi) = (T::zero(), T::one());
        let mut tau = t - whole;
        for _ in 0..200 {
            let (s, ds) = self.arc_length(tau);
            let f = s - target_frac;
            if f > T::zero() {
                hi = tau;
            } else {
                lo = tau;
            }
            let newton = tau - f / ds;
            let next = if newton > lo && newton < hi { newton } else { (lo + hi) * lit(0.5) };
            let done = (next - tau).abs() <= T::default_epsilon() * lit(4.0) || hi - lo <= T::default_epsilon() * lit(4.0);
            tau = next;
            if done {
                break;
            }
        }
        tau + whole
    }

    /// Point `c(t)`.
    pub fn point(&self, t: T) -> ChartPoint<T> {
        let (x, _) = self.curve(self.tau(t));
        ChartPoint::new(self.chart, x)
    }

    /// Point `c(t)` and velocity `c'(t)` in chart coordinates.
    pub fn point_velocity(&self, t: T) -> (ChartPoint<T>, [T; 2]) {
        let tau = self.tau(t);
        let (x, dx) = self.curve(tau);
        let p = ChartPoint::new(self.chart, x);
        let scale = self.length / self.base.norm(&p, dx);
        (p, [dx[0] * scale, dx[1] * scale])
    }

    /// Ratio of the smallest to the mean speed of the chart curve before
    /// reparametrization. Values near zero mean the curve almost has a cusp.
    pub fn regularity(&self) -> T {
        let mm = lit::<T>(SPEED_SAMPLES as f64);
        (0..SPEED_SAMPLES).fold(T::max_value().unwrap(), |m, i| m.min(self.raw_speed(lit::<T>(i as f64) / mm))) / self.length
    }

    /// `max_i | |c'(t_i)| - a |` over `n` grid intervals.
    pub fn constant_speed_residual(&self, n: usize) -> T {
        (0..=n).fold(T::zero(), |m, i| {
            let (p, v) = self.point_velocity(lit::<T>(i as f64) / lit(n as f64));
            m.max((self.base.norm(&p, v) - self.length).abs())
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn coordinate_circle_has_period_length_speed() {
        let base: BaseManifold<f64> = BaseManifold::flat_torus(2.5, 1.0).unwrap();
        let c = BaseLoop::coordinate_circle(base, [0.0, 0.3], [1, 0]).unwrap();
        assert!((c.speed() - 2.5).abs() < 1e-14);
        let (p, v) = c.point_velocity(0.25);
        assert!((p.x[0] - 0.625).abs() < 1e-14 && (p.x[1] - 0.3).abs() < 1e-15);
        assert!((v[0] - 2.5).abs() < 1e-14);
    }

    #[test]
    fn reparametrization_gives_constant_speed_and_target_length() {
        let base: BaseManifold<f64> = BaseManifold::flat_torus(1.0, 1.0).unwrap();
        let c = BaseLoop::with_speed(base, Chart::Primary, [0.1, 0.2], [1, 0], vec![[0.0, 0.2], [0.05, 0.0]], vec![[0.1, 0.0], [0.0, -0.03]], 5.0).unwrap();
        assert!((c.speed() - 5.0).abs() < 1e-12);
        assert!(c.constant_speed_residual(256) < 1e-12);
        // arc length along the curve grows linearly in t
        let mut len = 0.0;
        let m = 20000;
        let mut prev = c.point(0.0);
        for i in 1..=m / 2 {
            let p = c.point(i as f64 / m as f64);
            len += ((p.x[0] - prev.x[0]).powi(2) + (p.x[1] - prev.x[1]).powi(2)).sqrt();
            prev = p;
        }
        assert!((len - 2.5).abs() < 1e-6, "{len}");
    }

    #[test]
    fn sphere_loops_close_and_have_constant_speed() {
        let base: BaseManifold<f64> = BaseManifold::round_sphere(1.3).unwrap();
        let c = BaseLoop::with_speed(base, Chart::Secondary, [0.2, -0.1], [0, 0], vec![[0.5, 0.0]], vec![[0.0, 0.4]], 2.0).unwrap();
        assert!(c.constant_speed_residual(128) < 1e-12);
        let (p0, p1) = (c.point(0.0), c.point(1.0));
        assert!((p0.x[0] - p1.x[0]).abs() < 1e-12 && (p0.x[1] - p1.x[1]).abs() < 1e-12);
        assert!(BaseLoop::new(base, Chart::Primary, [0.0, 0.0], [1, 0], vec![], vec![]).is_err());
    }

    #[test]
    fn chart_change_preserves_ambient_point_and_tangent() {
        let base: BaseManifold<f64> = BaseManifold::round_sphere(2.0).unwrap();
        let p = ChartPoint::new(Chart::Primary, [0.4, -0.7]);
        let v = [0.3, 1.1];
        let (q, w) = base.change_chart(&p, v).unwrap();
        let (a, b) = (base.ambient(&p).unwrap(), base.ambient(&q).unwrap());
        let (da, db) = (base.ambient_tangent(&p, v).unwrap(), base.ambient_tangent(&q, w).unwrap());
        for i in 0..3 {
            assert!((a[i] - b[i]).abs() < 1e-12);
            assert!((da[i] - db[i]).abs() < 1e-12);
        }
        assert!((base.norm(&p, v) - base.norm(&q, w)).abs() < 1e-12);
        let r = a.iter().map(|x| x * x).sum::<f64>().sqrt();
        assert!((r - 2.0).abs() < 1e-14);
    }
}
