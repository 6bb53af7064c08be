//! Algebra-valued fields, connection forms and gauge transformations on the
//! trivial bundle `B x G`.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::lie::{exp_group, AlgebraVector, GroupElement, GroupId};
use crate::loops::fd_weights;
use crate::scalar::{lit, Real};

use super::base::{BaseManifold, ChartPoint};

/// `cos(theta) cos_coeff + sin(theta) sin_coeff` with
/// `theta = 2 pi (m1 x1 / L1 + m2 x2 / L2)`.
#[derive(Debug, Clone, PartialEq)]
pub struct TorusTerm<T: Real = f64> {
    pub mode: [i64; 2],
    pub cos: AlgebraVector<T>,
    pub sin: AlgebraVector<T>,
}

/// A smooth `g`-valued function on the base.
#[derive(Debug, Clone, PartialEq)]
pub enum AlgebraField<T: Real = f64> {
    /// Trigonometric polynomial on the flat torus.
    Trig(Vec<TorusTerm<T>>),
    /// Restriction of `constant + sum_b linear[b] P^b` from the ambient `R^3`
    /// of the sphere.
    Affine { constant: AlgebraVector<T>, linear: [AlgebraVector<T>; 3] },
}

impl<T: Real> AlgebraField<T> {
    pub fn constant_affine(v: AlgebraVector<T>) -> Self {
        let z = AlgebraVector::zero(v.group());
        Self::Affine { constant: v, linear: [z.clone(), z.clone(), z] }
    }

    pub fn eval(&self, base: &BaseManifold<T>, p: &ChartPoint<T>, group: GroupId) -> Result<AlgebraVector<T>> {
        match (self, base) {
            (Self::Trig(terms), BaseManifold::FlatTorus { l1, l2 }) => {
                let mut out = AlgebraVector::zero(group);
                for t in terms {
                    let theta = T::two_pi() * (lit::<T>(t.mode[0] as f64) * p.x[0] / *l1 + lit::<T>(t.mode[1] as f64) * p.x[1] / *l2);
                    let (s, c) = theta.sin_cos();
                    out = out.axpy(c, &t.cos).axpy(s, &t.sin);
                }
                Ok(out)
            }
            (Self::Affine { constant, linear }, BaseManifold::RoundSphere { .. }) => {
                let q = base.ambient(p).expect("sphere has an embedding");
                let mut out = constant.clone();
                for (b, l) in linear.iter().enumerate() {
                    out = out.axpy(q[b], l);
                }
                Ok(out)
            }
            _ => Err(Error::InvalidArgument("field representation does not match the base".into())),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum FormRepr<T: Real> {
    /// Torus: `A = F_1 dx1 + F_2 dx2`. Sphere: `A = sum_a F_a dP^a` restricted.
    Components(Vec<AlgebraField<T>>),
    Combination(Vec<(T, ConnectionForm<T>)>),
    Gauged(ConnectionForm<T>, GaugeTransform<T>),
}

/// `g`-valued 1-form on the base: the local form of a connection on `B x G`
/// in the identity section, or a tangent vector to the space of connections.
#[derive(Debug, Clone, PartialEq)]
pub struct ConnectionForm<T: Real = f64> {
    base: BaseManifold<T>,
    group: GroupId,
    repr: Arc<FormRepr<T>>,
}

impl<T: Real> ConnectionForm<T> {
    pub fn zero(base: BaseManifold<T>, group: GroupId) -> Self {
        Self { base, group, repr: Arc::new(FormRepr::Combination(Vec::new())) }
    }

    /// Torus form `F_1 dx1 + F_2 dx2` with trigonometric components.
    pub fn torus(base: BaseManifold<T>, group: GroupId, dx1: Vec<TorusTerm<T>>, dx2: Vec<TorusTerm<T>>) -> Result<Self> {
        if !matches!(base, BaseManifold::FlatTorus { .. }) {
            return Err(Error::InvalidArgument("trigonometric forms live on the torus".into()));
        }
        Self::check_terms(group, dx1.iter().chain(dx2.iter()).flat_map(|t| [&t.cos, &t.sin]))?;
        let repr = FormRepr::Components(vec![AlgebraField::Trig(dx1), AlgebraField::Trig(dx2)]);
        Ok(Self { base, group, repr: Arc::new(repr) })
    }

    /// Constant torus form `a1 dx1 + a2 dx2`.
    pub fn torus_constant(base: BaseManifold<T>, a1: AlgebraVector<T>, a2: AlgebraVector<T>) -> Result<Self> {
        let group = a1.group();
        let z = AlgebraVector::zero(group);
        let term = |a: AlgebraVector<T>| vec![TorusTerm { mode: [0, 0], cos: a, sin: z.clone() }];
        Self::torus(base, group, term(a1), term(a2))
    }

    /// Sphere form `sum_a F_a dP^a` with ambient-affine coefficients.
    pub fn sphere(base: BaseManifold<T>, group: GroupId, ambient: [AlgebraField<T>; 3]) -> Result<Self> {
        if !matches!(base, BaseManifold::RoundSphere { .. }) {
            return Err(Error::InvalidArgument("ambient-affine forms live on the sphere".into()));
        }
        for f in &ambient {
            match f {
                AlgebraField::Affine { constant, linear } => {
                    Self::check_terms(group, std::iter::once(constant).chain(linear.iter()))?;
                }
                AlgebraField::Trig(_) => return Err(Error::InvalidArgument("sphere forms need affine fields".into())),
            }
        }
        Ok(Self { base, group, repr: Arc::new(FormRepr::Components(ambient.to_vec())) })
    }

    fn check_terms<'a>(group: GroupId, it: impl Iterator<Item = &'a AlgebraVector<T>>) -> Result<()>
    where
        T: 'a,
    {
        for v in it {
            if v.group() != group {
                return Err(Error::GroupMismatch { left: group, right: v.group() });
            }
        }
        Ok(())
    }

    pub fn base(&self) -> &BaseManifold<T> {
        &self.base
    }

    pub fn group(&self) -> GroupId {
        self.group
    }

    /// `A_p(v)` for a chart tangent vector `v`.
    pub fn value(&self, p: &ChartPoint<T>, v: [T; 2]) -> Result<AlgebraVector<T>> {
        match self.repr.as_ref() {
            FormRepr::Components(fields) => match self.base {
                BaseManifold::FlatTorus { .. } => {
                    let a = fields[0].eval(&self.base, p, self.group)?;
                    let b = fields[1].eval(&self.base, p, self.group)?;
                    Ok(a.scale(v[0]).axpy(v[1], &b))
                }
                BaseManifold::RoundSphere { .. } => {
                    let dp = self.base.ambient_tangent(p, v).expect("sphere has an embedding");
                    let mut out = AlgebraVector::zero(self.group);
                    for (f, d) in fields.iter().zip(dp) {
                        out = out.axpy(d, &f.eval(&self.base, p, self.group)?);
                    }
                    Ok(out)
                }
            },
            FormRepr::Combination(parts) => {
                let mut out = AlgebraVector::zero(self.group);
                for (s, f) in parts {
                    out = out.axpy(*s, &f.value(p, v)?);
                }
                Ok(out)
            }
            FormRepr::Gauged(form, g) => {
                let a = form.value(p, v)?;
                Ok(g.value(p)?.adjoint(&a) - g.right_differential(p, v)?)
            }
        }
    }

    /// `self + s * other`.
    pub fn axpy(&self, s: T, other: &Self) -> Result<Self> {
        if self.group != other.group {
            return Err(Error::GroupMismatch { left: self.group, right: other.group });
        }
        if self.base != other.base {
            return Err(Error::InvalidArgument("forms live on different bases".into()));
        }
        let repr = FormRepr::Combination(vec![(T::one(), self.clone()), (s, other.clone())]);
        Ok(Self { base: self.base, group: self.group, repr: Arc::new(repr) })
    }

    pub fn scale(&self, s: T) -> Self {
        let repr = FormRepr::Combination(vec![(s, self.clone())]);
        Self { base: self.base, group: self.group, repr: Arc::new(repr) }
    }

    /// Gauge-transformed form `Ad(g) A - dg g^{-1}`.
    pub fn gauge_transform(&self, g: &GaugeTransform<T>) -> Result<Self> {
        if g.group != self.group {
            return Err(Error::GroupMismatch { left: self.group, right: g.group });
        }
        let repr = FormRepr::Gauged(self.clone(), g.clone());
        Ok(Self { base: self.base, group: self.group, repr: Arc::new(repr) })
    }
}

/// Gauge transformation `x -> left * exp(X_1(x)) ... exp(X_m(x))` of `B x G`,
/// acting on the trivialization by left multiplication.
#[derive(Debug, Clone, PartialEq)]
pub struct GaugeTransform<T: Real = f64> {
    base: BaseManifold<T>,
    group: GroupId,
    left: GroupElement<T>,
    factors: Vec<AlgebraField<T>>,
    /// Chart step of the finite-difference differential.
    step: T,
}

impl<T: Real> GaugeTransform<T> {
    pub fn identity(base: BaseManifold<T>, group: GroupId) -> Self {
        Self::new(base, group, Vec::new())
    }

    pub fn new(base: BaseManifold<T>, group: GroupId, factors: Vec<AlgebraField<T>>) -> Self {
        Self { base, group, left: GroupElement::identity(group), factors, step: lit(2e-3) }
    }

    /// Constant transformation `x -> g0`.
    pub fn constant(base: BaseManifold<T>, g0: GroupElement<T>) -> Self {
        let mut out = Self::new(base, g0.group(), Vec::new());
        out.left = g0;
        out
    }

    pub fn group(&self) -> GroupId {
        self.group
    }

    pub fn value(&self, p: &ChartPoint<T>) -> Result<GroupElement<T>> {
        let mut g = self.left.clone();
        for f in &self.factors {
            g = g.mul(&exp_group(&f.eval(&self.base, p, self.group)?));
        }
        Ok(g)
    }

    /// The based transformation `g(p0)^{-1} g`, equal to `e` over `p0`.
    pub fn based_at(&self, p0: &ChartPoint<T>) -> Result<Self> {
        let mut out = self.clone();
        out.left = self.value(p0)?.inverse().mul(&self.left);
        Ok(out)
    }

    /// `dg_p(v) g(p)^{-1}` by an eighth-order central difference along `v`.
    pub fn right_differential(&self, p: &ChartPoint<T>, v: [T; 2]) -> Result<AlgebraVector<T>> {
        if self.factors.is_empty() {
            return Ok(AlgebraVector::zero(self.group));
        }
        let xs: Vec<f64> = (-4..=4).map(|j| j as f64).collect();
        let w = fd_weights(0.0, &xs, 1);
        let mut acc: Option<nalgebra::DMatrix<num_complex::Complex<T>>> = None;
        for (j, wj) in w.iter().enumerate() {
            if *wj == 0.0 {
                continue;
            }
            let s = lit::<T>(xs[j]) * self.step;
            let q = ChartPoint::new(p.chart, [p.x[0] + s * v[0], p.x[1] + s * v[1]]);
            let m = self.value(&q)?.matrix().map(|z| z * lit::<T>(*wj));
            acc = Some(match acc {
                Some(a) => a + m,
                None => m,
            });
        }
        let d = acc.expect("stencil is nonempty").map(|z| z / self.step);
        let g = self.value(p)?;
        Ok(AlgebraVector::project(self.group, &(d * g.matrix().adjoint())))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bundle::base::Chart;

    fn av(g: GroupId, c: &[f64]) -> AlgebraVector<f64> {
        AlgebraVector::from_coords(g, c).unwrap()
    }

    #[test]
    fn torus_forms_are_linear_in_the_tangent() {
        let g = GroupId::Su2;
        let base: BaseManifold<f64> = BaseManifold::flat_torus(1.0, 2.0).unwrap();
        let t = TorusTerm { mode: [1, -2], cos: av(g, &[0.1, 0.2, 0.3]), sin: av(g, &[-0.3, 0.0, 0.5]) };
        let form = ConnectionForm::torus(base, g, vec![t.clone()], vec![t]).unwrap();
        let p = ChartPoint::new(Chart::Primary, [0.3, 0.7]);
        let a = form.value(&p, [1.0, 0.0]).unwrap();
        let b = form.value(&p, [0.0, 1.0]).unwrap();
        let c = form.value(&p, [2.0, -3.0]).unwrap();
        assert!(c.frobenius_distance(&a.scale(2.0).axpy(-3.0, &b)) < 1e-14);
    }

    #[test]
    fn sphere_forms_agree_across_charts() {
        let g = GroupId::So3;
        let base: BaseManifold<f64> = BaseManifold::round_sphere(1.5).unwrap();
        let field = |s: f64| AlgebraField::Affine {
            constant: av(g, &[s, 0.1, -0.2]),
            linear: [av(g, &[0.3, s, 0.0]), av(g, &[0.0, 0.2, s]), av(g, &[-s, 0.0, 0.4])],
        };
        let form = ConnectionForm::sphere(base, g, [field(0.1), field(-0.4), field(0.7)]).unwrap();
        let p = ChartPoint::new(Chart::Primary, [0.6, -0.2]);
        let v = [0.4, 0.9];
        let (q, w) = base.change_chart(&p, v).unwrap();
        let a = form.value(&p, v).unwrap();
        let b = form.value(&q, w).unwrap();
        assert!(a.frobenius_distance(&b) < 1e-12);
    }

    #[test]
    fn gauge_differential_matches_one_parameter_subgroup() {
        // g(x) = exp(x1 X) has dg(v) g^{-1} = v1 X
        let g = GroupId::Su3;
        let base: BaseManifold<f64> = BaseManifold::flat_torus(1.0, 1.0).unwrap();
        let x = av(g, &[0.2, -0.1, 0.3, 0.0, 0.5, -0.2, 0.1, 0.4]);
        let z = AlgebraVector::zero(g);
        // exp(sin(2 pi x1) X): derivative 2 pi cos(2 pi x1) X
        let gauge = GaugeTransform::new(base, g, vec![AlgebraField::Trig(vec![TorusTerm { mode: [1, 0], cos: z, sin: x.clone() }])]);
        let p = ChartPoint::new(Chart::Primary, [0.1, 0.4]);
        let d = gauge.right_differential(&p, [1.0, 0.0]).unwrap();
        let expected = x.scale(std::f64::consts::TAU * (std::f64::consts::TAU * 0.1).cos());
        assert!(d.frobenius_distance(&expected) < 1e-11, "{}", d.frobenius_distance(&expected));
    }

    #[test]
    fn based_transformations_are_trivial_over_the_basepoint() {
        let g = GroupId::Su2;
        let base: BaseManifold<f64> = BaseManifold::flat_torus(1.0, 1.0).unwrap();
        let gauge = GaugeTransform::new(
            base,
            g,
            vec![AlgebraField::Trig(vec![TorusTerm { mode: [1, 1], cos: av(g, &[0.4, 0.1, 0.0]), sin: av(g, &[0.0, 0.3, 0.2]) }])],
        );
        let p0 = ChartPoint::new(Chart::Primary, [0.25, 0.5]);
        let based = gauge.based_at(&p0).unwrap();
        assert!(based.value(&p0).unwrap().frobenius_distance(&GroupElement::identity(g)) < 1e-14);
    }
}
