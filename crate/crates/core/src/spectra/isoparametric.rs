//! Spectral constancy of preimages `phi^{-1}(M)` for `M` a point or a
//! distance sphere around `e`.
//!
//! Sample points are taken on the orbit of one constant loop under constant
//! gauge transformations `u -> Ad(h) u`. These act isometrically on each
//! mode space, so the truncation to `|k| <= K` is the same subspace at every
//! sample and the compressed shape operators are comparable.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use super::{numeric_shape_operator_with, ShapeOptions, SpectrumTable};
use crate::error::{Error, Result};
use crate::lie::{exp_group, log_group, root_decomposition, AlgebraVector, GroupElement, GroupId};
use crate::loops::{basis_loop, enumerate_basis, l2_inner, AlgebraLoop};
use crate::random::{random_group_element, random_unit_vector, rng};
use crate::transport::{horizontal_lift, solve_transport, Scheme};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ProbeTarget {
    /// `M = {e}`: the fibre itself, with normal `Ad(h) v0`.
    Point,
    /// Geodesic sphere of the given radius around `e` in `SU(2)`.
    DistanceSphere { radius: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProbeOptions {
    pub kmax: usize,
    pub point_count: usize,
    pub n: usize,
    pub eps: f64,
    #[serde(skip)]
    pub scheme: Scheme,
    pub seed: u64,
    /// Steps of the discrete normal transport between sample points.
    pub transport_steps: usize,
}

impl Default for ProbeOptions {
    fn default() -> Self {
        Self { kmax: 4, point_count: 2, n: 256, eps: 1e-4, scheme: Scheme::Rkmk4, seed: 0, transport_steps: 8 }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ProbePoint {
    /// The constant value of the sample loop (or the normal, for a point).
    pub value: Vec<f64>,
    pub spectrum: SpectrumTable,
    /// Part of the unit normal outside the truncated mode space.
    pub normal_truncation: f64,
    pub asymmetry: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ProbeReport {
    pub group: GroupId,
    pub target: ProbeTarget,
    pub kmax: usize,
    pub points: Vec<ProbePoint>,
    /// Largest sorted-spectrum distance between any sample and the first.
    pub max_discrepancy: f64,
    /// Largest difference between normals transported along two different
    /// paths in the preimage; `None` for a point.
    pub normal_holonomy: Option<f64>,
}

/// Samples `point_count` points of the preimage and compares their
/// truncated shape-operator spectra.
pub fn isoparametric_probe(group: GroupId, target: ProbeTarget, opts: &ProbeOptions) -> Result<ProbeReport> {
    if opts.kmax > 6 {
        return Err(Error::TruncationTooSmall(format!("mode cutoff {} above 6", opts.kmax)));
    }
    if opts.point_count < 2 {
        return Err(Error::InvalidArgument("at least two sample points are needed".into()));
    }
    let mut r = rng(opts.seed);
    let conj: Vec<GroupElement<f64>> = (0..opts.point_count)
        .map(|j| if j == 0 { GroupElement::identity(group) } else { random_group_element(group, 3.0, &mut r) })
        .collect();
    let n0: AlgebraVector<f64> = random_unit_vector(group, &mut r);
    let mut points = Vec::with_capacity(opts.point_count);
    let mut normal_holonomy = None;
    match target {
        ProbeTarget::Point => {
            let v0 = {
                let t = group.reference_torus_vector::<f64>();
                t.scale(1.0 / t.norm())
            };
            for h in &conj {
                let v = h.adjoint(&v0);
                let op = numeric_shape_operator_with(&v, opts.kmax, opts.eps, ShapeOptions { n: opts.n, scheme: opts.scheme })?;
                points.push(ProbePoint { value: v.coords(), spectrum: op.table, normal_truncation: 0.0, asymmetry: op.asymmetry });
            }
        }
        ProbeTarget::DistanceSphere { radius } => {
            let sphere = Sphere::new(group, radius, opts)?;
            let x0 = n0.scale(radius);
            for h in &conj {
                points.push(sphere.spectrum_at(&h.adjoint(&x0))?);
            }
            let mut worst = 0.0f64;
            for h in conj.iter().skip(1) {
                // direct path h(tau) = exp(tau log h) and a detour through a fixed element
                let via = exp_group(&n0.scale(0.7));
                let a = sphere.transport_normal(&x0, &[GroupElement::identity(group), h.clone()])?;
                let b = sphere.transport_normal(&x0, &[GroupElement::identity(group), via, h.clone()])?;
                worst = worst.max(a.sub(&b)?.max_norm());
            }
            normal_holonomy = Some(worst);
        }
    }
    let max_discrepancy = points.iter().skip(1).fold(0.0f64, |m, p| m.max(p.spectrum.multiset_distance(&points[0].spectrum)));
    Ok(ProbeReport { group, target, kmax: opts.kmax, points, max_discrepancy, normal_holonomy })
}

/// Curvatures of the distance sphere of radius `r` at one sample point.
#[derive(Debug, Clone, Serialize)]
pub struct RadiusSample {
    pub radius: f64,
    /// Largest `|lambda|` of the truncated shape operator.
    pub max_abs_curvature: f64,
    /// Eigenvalues of the shape operator on horizontal lifts of `T M`.
    pub horizontal: Vec<f64>,
    /// `cot(r / R) / R` for the round sphere `SU(2)` of radius `R`.
    pub sphere_curvature: f64,
}

/// Curvature data for each radius, at the same sample direction.
pub fn radius_scan(radii: &[f64], opts: &ProbeOptions) -> Result<Vec<RadiusSample>> {
    let group = GroupId::Su2;
    let n0: AlgebraVector<f64> = random_unit_vector(group, &mut rng(opts.seed));
    let big_r = group_radius();
    radii
        .iter()
        .map(|&radius| {
            let sphere = Sphere::new(group, radius, opts)?;
            let x = n0.scale(radius);
            let p = sphere.spectrum_at(&x)?;
            let max_abs_curvature = p.spectrum.expanded().iter().fold(0.0f64, |m, v| m.max(v.abs()));
            Ok(RadiusSample { radius, max_abs_curvature, horizontal: sphere.horizontal_block(&x)?, sphere_curvature: (radius / big_r).cos() / (radius / big_r).sin() / big_r })
        })
        .collect()
}

/// `SU(2)` with `<x, y> = -Re tr(xy)` is the round 3-sphere of radius `sqrt(2)`.
fn group_radius() -> f64 {
    std::f64::consts::SQRT_2
}

struct Sphere<'a> {
    group: GroupId,
    opts: &'a ProbeOptions,
    fine: Vec<AlgebraLoop<f64>>,
    coarse: Vec<AlgebraLoop<f64>>,
}

impl<'a> Sphere<'a> {
    fn new(group: GroupId, radius: f64, opts: &'a ProbeOptions) -> Result<Self> {
        if group != GroupId::Su2 {
            return Err(Error::InvalidArgument("distance spheres are probed in su2 only".into()));
        }
        let focal = std::f64::consts::PI * group_radius();
        if radius < 0.1 || radius > focal - 0.1 {
            return Err(Error::NearFocal(radius));
        }
        let dec = root_decomposition(&group.reference_torus_vector::<f64>())?;
        let labels = enumerate_basis(&dec, opts.kmax);
        let fine = labels.iter().map(|l| basis_loop(&dec, l, opts.n)).collect::<Result<_>>()?;
        let coarse = labels.iter().map(|l| basis_loop(&dec, l, opts.n / 2)).collect::<Result<_>>()?;
        Ok(Self { group, opts, fine, coarse })
    }

    /// Outward unit normal `grad dist(phi(u), e)`, on the coarse grid.
    fn normal(&self, u: &AlgebraLoop<f64>) -> Result<AlgebraLoop<f64>> {
        let sol = solve_transport(u, self.opts.scheme)?;
        let l = log_group(&sol.endpoint)?;
        let len = l.norm();
        if len < 0.1 {
            return Err(Error::NearFocal(len));
        }
        horizontal_lift(&sol, &l.scale(1.0 / len))
    }

    fn coords(&self, w: &AlgebraLoop<f64>) -> Result<DVector<f64>> {
        Ok(DVector::from_iterator(self.coarse.len(), self.coarse.iter().map(|l| l2_inner(w, l)).collect::<Result<Vec<_>>>()?))
    }

    fn combine(&self, c: &DVector<f64>, fine: bool) -> Result<AlgebraLoop<f64>> {
        let basis = if fine { &self.fine } else { &self.coarse };
        let mut out = AlgebraLoop::zero(self.group, basis[0].n())?;
        for (b, x) in basis.iter().zip(c.iter()) {
            out = out.axpy(*x, b)?;
        }
        Ok(out)
    }

    fn spectrum_at(&self, x: &AlgebraVector<f64>) -> Result<ProbePoint> {
        let u = AlgebraLoop::constant(x, self.opts.n)?;
        let nu = self.normal(&u)?;
        let cn = self.coords(&nu)?;
        let truncation = nu.sub(&self.combine(&cn, false)?)?.max_norm();
        let cn = &cn / cn.norm();
        // orthonormal complement of the normal in the truncated space
        let d = cn.len();
        let proj = DMatrix::<f64>::identity(d, d) - &cn * cn.transpose();
        let eig = proj.symmetric_eigen();
        let tangent: Vec<DVector<f64>> = (0..d).filter(|&i| eig.eigenvalues[i] > 0.5).map(|i| eig.eigenvectors.column(i).into_owned()).collect();
        let m = tangent.len();
        let fine: Vec<AlgebraLoop<f64>> = tangent.iter().map(|c| self.combine(c, true)).collect::<Result<_>>()?;
        let mut raw = DMatrix::<f64>::zeros(m, m);
        for (a, t) in fine.iter().enumerate() {
            let plus = self.normal(&u.axpy(self.opts.eps, t)?)?;
            let minus = self.normal(&u.axpy(-self.opts.eps, t)?)?;
            let dc = self.coords(&plus.sub(&minus)?.scale(0.5 / self.opts.eps))?;
            for (b, tb) in tangent.iter().enumerate() {
                raw[(b, a)] = -dc.dot(tb);
            }
        }
        let asymmetry = (&raw - raw.transpose()).amax();
        let sym = (&raw + raw.transpose()) * 0.5;
        let spectrum = SpectrumTable::from_values(sym.symmetric_eigen().eigenvalues.as_slice())?;
        Ok(ProbePoint { value: x.coords(), spectrum, normal_truncation: truncation, asymmetry })
    }

    /// Shape operator on the horizontal lifts `Ad(exp((1 - s) X)) w` of the
    /// two directions `w` orthogonal to `X`.
    fn horizontal_block(&self, x: &AlgebraVector<f64>) -> Result<Vec<f64>> {
        let basis = self.group.basis::<f64>();
        let xh = x.scale(1.0 / x.norm());
        let mut ws: Vec<AlgebraVector<f64>> = Vec::new();
        for b in basis {
            let mut w = b.axpy(-b.inner(&xh)?, &xh);
            for p in &ws {
                w = w.axpy(-w.inner(p)?, p);
            }
            if w.norm() > 1e-6 {
                ws.push(w.scale(1.0 / w.norm()));
            }
        }
        let lift = |w: &AlgebraVector<f64>, n: usize| AlgebraLoop::from_fn(self.group, n, false, |s| exp_group(&x.scale(1.0 - s)).adjoint(w));
        let u = AlgebraLoop::constant(x, self.opts.n)?;
        let mut raw = DMatrix::<f64>::zeros(2, 2);
        for (a, wa) in ws.iter().enumerate() {
            let t = lift(wa, self.opts.n)?;
            let plus = self.normal(&u.axpy(self.opts.eps, &t)?)?;
            let minus = self.normal(&u.axpy(-self.opts.eps, &t)?)?;
            let d = plus.sub(&minus)?.scale(0.5 / self.opts.eps);
            for (b, wb) in ws.iter().enumerate() {
                raw[(b, a)] = -l2_inner(&d, &lift(wb, self.opts.n / 2)?)?;
            }
        }
        let sym = (&raw + raw.transpose()) * 0.5;
        let mut ev: Vec<f64> = sym.symmetric_eigen().eigenvalues.iter().copied().collect();
        ev.sort_by(|a, b| b.total_cmp(a));
        Ok(ev)
    }

    /// Carries the unit normal at `Ad(hs[0]) x0` along the broken geodesic
    /// through `hs`, projecting onto the normal line at each step.
    fn transport_normal(&self, x0: &AlgebraVector<f64>, hs: &[GroupElement<f64>]) -> Result<AlgebraLoop<f64>> {
        let at = |h: &GroupElement<f64>| self.normal(&AlgebraLoop::constant(&h.adjoint(x0), self.opts.n)?);
        let mut carried = at(&hs[0])?;
        for pair in hs.windows(2) {
            let step = log_group(&pair[0].inverse().mul(&pair[1]))?;
            for i in 1..=self.opts.transport_steps {
                let h = pair[0].mul(&exp_group(&step.scale(i as f64 / self.opts.transport_steps as f64)));
                let nu = at(&h)?;
                let c = l2_inner(&carried, &nu)?;
                carried = nu.scale(c.signum());
            }
        }
        Ok(carried)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn point_target_matches_fibre_spectrum() {
        let opts = ProbeOptions { kmax: 2, ..ProbeOptions::default() };
        let rep = isoparametric_probe(GroupId::Su2, ProbeTarget::Point, &opts).unwrap();
        let t = GroupId::Su2.reference_torus_vector::<f64>();
        let ana = super::super::analytic_fiber_spectrum(&t.scale(1.0 / t.norm()), 2).unwrap();
        for p in &rep.points {
            assert!(p.spectrum.multiset_distance(&ana) < 1e-4);
        }
    }

    #[test]
    fn distance_sphere_spectra_agree() {
        let opts = ProbeOptions { kmax: 2, ..ProbeOptions::default() };
        let rep = isoparametric_probe(GroupId::Su2, ProbeTarget::DistanceSphere { radius: std::f64::consts::FRAC_PI_4 }, &opts).unwrap();
        assert!(rep.max_discrepancy < 1e-3, "{}", rep.max_discrepancy);
        assert!(rep.normal_holonomy.unwrap() < 1e-6);
        assert!(rep.points[0].normal_truncation < 1e-10);
    }

    #[test]
    fn horizontal_block_is_the_sphere_curvature() {
        let opts = ProbeOptions { kmax: 1, ..ProbeOptions::default() };
        let scan = radius_scan(&[std::f64::consts::FRAC_PI_3, std::f64::consts::FRAC_PI_8], &opts).unwrap();
        for s in &scan {
            for h in &s.horizontal {
                assert!((h.abs() - s.sphere_curvature).abs() < 1e-5, "{} {}", h, s.sphere_curvature);
            }
        }
        assert!(scan[1].max_abs_curvature > scan[0].max_abs_curvature);
    }
}
