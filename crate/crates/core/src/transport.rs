//! The parallel transport map `phi(u) = Y_u(1)`.
//!
//! `Y_u` solves the left-trivialized equation `Y' = Y u`, `Y(0) = e`. With
//! this convention the gauge action `Ad(g) u - g' g^{-1}` satisfies
//! `phi(g . u) = g(0) phi(u) g(1)^{-1}`; see [`check_equivariance`].
//!
//! The integrators use only the grid samples of `u`: each step of width
//! `h = 2/N` consumes the three samples `u(t_{2j})`, `u(t_{2j+1})`,
//! `u(t_{2j+2})`, so the solution path lives on the coarse grid of `N/2`
//! intervals.

use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lie::{exp_group, log_group, AlgebraVector, GroupElement, GroupId};
use crate::loops::{basis_loop, enumerate_basis, gauge_act, AlgebraLoop, BasisLabel, GroupPath};
use crate::lie::TorusDecomposition;
use crate::scalar::{lit, to_f64, Real};

/// Fourth-order Lie-group integrators.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scheme {
    /// Runge-Kutta-Munthe-Kaas with the classical RK4 tableau.
    #[default]
    Rkmk4,
    /// Two-term Magnus expansion on Simpson nodes.
    Magnus4,
    /// Commutator-free product of two exponentials.
    Cf4,
}

impl Scheme {
    pub const ALL: [Scheme; 3] = [Scheme::Rkmk4, Scheme::Magnus4, Scheme::Cf4];
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Scheme::Rkmk4 => "rkmk4",
            Scheme::Magnus4 => "magnus4",
            Scheme::Cf4 => "cf4",
        })
    }
}

impl FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "rkmk4" => Ok(Scheme::Rkmk4),
            "magnus4" => Ok(Scheme::Magnus4),
            "cf4" => Ok(Scheme::Cf4),
            other => Err(Error::InvalidArgument(format!("unknown scheme {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TransportSolution<T: Real = f64> {
    pub input: AlgebraLoop<T>,
    /// `Y_u` on the coarse grid of `N/2` intervals.
    pub path: GroupPath<T>,
    pub endpoint: GroupElement<T>,
    pub scheme: Scheme,
    /// Number of integrator steps, `N/2`.
    pub step_count: usize,
    pub warnings: Vec<String>,
}

impl<T: Real> TransportSolution<T> {
    /// Largest `|Y^{-1} Y' - u|` over the coarse grid, with `Y'` from
    /// finite differences.
    pub fn ode_residual(&self) -> T {
        let d = self.path.left_derivative();
        d.iter()
            .enumerate()
            .fold(T::zero(), |m, (j, x)| m.max(x.frobenius_distance(self.input.sample(2 * j))))
    }

    /// Largest unitarity defect along the path.
    pub fn unitarity_drift(&self) -> T {
        self.path.samples().iter().fold(T::zero(), |m, g| m.max(g.unitarity_defect()))
    }
}

/// `dexp^{-1}_theta(a)` truncated after the second commutator.
fn dexpinv<T: Real>(theta: &AlgebraVector<T>, a: &AlgebraVector<T>) -> AlgebraVector<T> {
    let c1 = theta.bracket(a);
    let c2 = theta.bracket(&c1);
    a.axpy(lit(-0.5), &c1).axpy(lit(1.0 / 12.0), &c2)
}

/// One step of `Z' = B Z`; returns the factors `F` with `Z <- F_last ... F_first Z`.
fn step_factors<T: Real>(scheme: Scheme, h: T, b1: &AlgebraVector<T>, b2: &AlgebraVector<T>, b3: &AlgebraVector<T>) -> Vec<AlgebraVector<T>> {
    match scheme {
        Scheme::Rkmk4 => {
            let half = lit::<T>(0.5);
            let k1 = b1.scale(h);
            let k2 = dexpinv(&k1.scale(half), b2).scale(h);
            let k3 = dexpinv(&k2.scale(half), b2).scale(h);
            let k4 = dexpinv(&k3, b3).scale(h);
            let two = lit::<T>(2.0);
            let theta = (k1 + k2.scale(two) + k3.scale(two) + k4).scale(lit(1.0 / 6.0));
            vec![theta]
        }
        Scheme::Magnus4 => {
            let mean = (b1 + &b2.scale(lit(4.0))).axpy(T::one(), b3).scale(h / lit(6.0));
            let omega = mean.axpy(-h * h / lit(12.0), &b1.bracket(b3));
            vec![omega]
        }
        Scheme::Cf4 => {
            let third = lit::<T>(1.0 / 3.0);
            let first = b1.scale(lit(0.25)).axpy(third, b2).axpy(lit(-1.0 / 12.0), b3).scale(h);
            let second = b1.scale(lit(-1.0 / 12.0)).axpy(third, b2).axpy(lit(0.25), b3).scale(h);
            vec![first, second]
        }
    }
}

/// Integrate `Y' = Y u`, `Y(0) = e` on the grid of `u`.
pub fn solve_transport<T: Real>(u: &AlgebraLoop<T>, scheme: Scheme) -> Result<TransportSolution<T>> {
    let n = u.n();
    if n < 4 {
        return Err(Error::GridMismatch(format!("transport needs at least 4 intervals, got {n}")));
    }
    let group = u.group();
    let steps = n / 2;
    let h = lit::<T>(2.0) / lit(n as f64);
    let mut warnings = Vec::new();
    let ratio = u.max_norm() / lit(n as f64);
    if ratio > T::one() {
        warnings.push(format!("step-size check: max |u| / N = {:.3} exceeds 1", to_f64(ratio)));
    }
    let mut y = GroupElement::identity(group);
    let mut samples = Vec::with_capacity(steps + 1);
    samples.push(y.clone());
    for j in 0..steps {
        // Z = Y^{-1} solves Z' = -u Z
        let b1 = -u.sample(2 * j).clone();
        let b2 = -u.sample(2 * j + 1).clone();
        let b3 = -u.sample(2 * j + 2).clone();
        for f in step_factors(scheme, h, &b1, &b2, &b3) {
            y = y.mul(&exp_group(&f).inverse());
        }
        samples.push(y.clone());
    }
    let path = GroupPath::from_samples(group, samples)?;
    Ok(TransportSolution {
        input: u.clone(),
        endpoint: path.end().clone(),
        path,
        scheme,
        step_count: steps,
        warnings,
    })
}

/// `phi(u)` with the default scheme.
pub fn phi<T: Real>(u: &AlgebraLoop<T>) -> Result<GroupElement<T>> {
    Ok(solve_transport(u, Scheme::default())?.endpoint)
}

/// `|phi(g . u) - g(0) phi(u) g(1)^{-1}|_F`.
pub fn check_equivariance<T: Real>(g: &GroupPath<T>, u: &AlgebraLoop<T>, scheme: Scheme) -> Result<T> {
    let acted = gauge_act(g, u)?;
    let lhs = solve_transport(&acted, scheme)?.endpoint;
    let rhs = g.start().mul(&solve_transport(u, scheme)?.endpoint).mul(&g.end().inverse());
    Ok(lhs.frobenius_distance(&rhs))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceStudy {
    pub scheme: Scheme,
    pub grids: Vec<usize>,
    /// `|phi_N(u) - phi_ref(u)|_F` per grid.
    pub errors: Vec<f64>,
    pub reference_grid: usize,
    /// Least-squares slope of `-log2 error` against `log2 N`.
    pub order: f64,
}

/// Self-convergence of `phi` for a loop that can be sampled on any grid,
/// measured against the same scheme on `reference_grid`.
pub fn convergence_study<T: Real>(
    sample: impl Fn(usize) -> Result<AlgebraLoop<T>>,
    grids: &[usize],
    reference_grid: usize,
    scheme: Scheme,
) -> Result<ConvergenceStudy> {
    if grids.len() < 2 || grids.iter().any(|&n| n >= reference_grid) {
        return Err(Error::InvalidArgument("need two grids below the reference grid".into()));
    }
    let reference = solve_transport(&sample(reference_grid)?, scheme)?.endpoint;
    let mut errors = Vec::with_capacity(grids.len());
    for &n in grids {
        let e = solve_transport(&sample(n)?, scheme)?.endpoint;
        errors.push(to_f64(e.frobenius_distance(&reference)));
    }
    let xs: Vec<f64> = grids.iter().map(|&n| (n as f64).log2()).collect();
    let ys: Vec<f64> = errors.iter().map(|e| -e.log2()).collect();
    let mx = xs.iter().sum::<f64>() / xs.len() as f64;
    let my = ys.iter().sum::<f64>() / ys.len() as f64;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    Ok(ConvergenceStudy { scheme, grids: grids.to_vec(), errors, reference_grid, order: sxy / sxx })
}

/// Central-difference differential of `phi`, left-trivialized at `phi(u)`.
pub fn differential_phi<T: Real>(u: &AlgebraLoop<T>, direction: &AlgebraLoop<T>, eps: T, scheme: Scheme) -> Result<AlgebraVector<T>> {
    if eps < lit(1e-6) || eps > lit(1e-3) {
        return Err(Error::InvalidArgument(format!("eps = {} outside [1e-6, 1e-3]", to_f64(eps))));
    }
    let base_inv = solve_transport(u, scheme)?.endpoint.inverse();
    let plus = solve_transport(&u.axpy(eps, direction)?, scheme)?.endpoint;
    let minus = solve_transport(&u.axpy(-eps, direction)?, scheme)?.endpoint;
    let lp = log_group(&base_inv.mul(&plus))?;
    let lm = log_group(&base_inv.mul(&minus))?;
    Ok((lp - lm).scale(T::one() / (eps + eps)))
}

/// Composite Simpson weights on `m` (even) intervals of `[0, 1]`.
pub fn simpson_weights<T: Real>(m: usize) -> Vec<T> {
    let h = T::one() / lit(m as f64);
    (0..=m)
        .map(|i| {
            let w = if i == 0 || i == m {
                1.0
            } else if i % 2 == 1 {
                4.0
            } else {
                2.0
            };
            h * lit(w / 3.0)
        })
        .collect()
}

/// Exact differential `dphi_u(w) = Ad(phi^{-1}) int_0^1 Ad(Y(s)) w(s) ds`,
/// left-trivialized, using the transport path of `sol`.
pub fn differential_phi_variational<T: Real>(sol: &TransportSolution<T>, direction: &AlgebraLoop<T>) -> Result<AlgebraVector<T>> {
    if direction.n() != sol.input.n() {
        return Err(Error::GridMismatch(format!("{} vs {} intervals", direction.n(), sol.input.n())));
    }
    let m = sol.step_count;
    let weights = simpson_weights::<T>(m);
    let mut acc = AlgebraVector::zero(sol.input.group());
    for (j, w) in weights.iter().enumerate() {
        acc = acc.axpy(*w, &sol.path.sample(j).adjoint(direction.sample(2 * j)));
    }
    Ok(sol.endpoint.adjoint_inverse(&acc))
}

/// Horizontal lift `s -> Ad(Y(s)^{-1} phi(u)) v` of the left-invariant field
/// `v` at `u`, on the coarse grid of the transport path.
pub fn horizontal_lift<T: Real>(sol: &TransportSolution<T>, v: &AlgebraVector<T>) -> Result<AlgebraLoop<T>> {
    let w = sol.endpoint.adjoint(v);
    let samples = sol.path.samples().iter().map(|y| y.adjoint_inverse(&w)).collect();
    AlgebraLoop::from_samples(v.group(), samples, false)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DifferentialMethod {
    /// [`differential_phi_variational`].
    Variational,
    /// [`differential_phi`] with the given step.
    FiniteDifference { eps: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubmersionReport {
    pub basis_size: usize,
    pub rank: usize,
    pub horizontal_dim: usize,
    pub sigma_max: f64,
    pub sigma_min_nonzero: f64,
    /// `max |<dphi h_i, dphi h_j> - <h_i, h_j>|` over an orthonormal horizontal basis.
    pub isometry_residual: f64,
    /// Largest norm of the constant-loop component of a unit kernel vector,
    /// `|P_c (I - V V^T)|_2` for `V` the horizontal right singular vectors.
    pub kernel_constant_leakage: f64,
}

/// Matrix of `dphi_u` on the truncated loop basis: column `b` holds the
/// coordinates of `dphi_u(l_b)`.
pub fn differential_matrix<T: Real>(
    u: &AlgebraLoop<T>,
    dec: &TorusDecomposition<T>,
    labels: &[BasisLabel],
    method: DifferentialMethod,
    scheme: Scheme,
) -> Result<DMatrix<T>> {
    let d = u.group().dim();
    let sol = solve_transport(u, scheme)?;
    let mut out = DMatrix::zeros(d, labels.len());
    for (b, label) in labels.iter().enumerate() {
        let l = basis_loop(dec, label, u.n())?;
        let x = match method {
            DifferentialMethod::Variational => differential_phi_variational(&sol, &l)?,
            DifferentialMethod::FiniteDifference { eps } => differential_phi(u, &l, lit(eps), scheme)?,
        };
        for (i, c) in x.coords().into_iter().enumerate() {
            out[(i, b)] = c;
        }
    }
    Ok(out)
}

/// Check that `dphi_u` restricted to its horizontal space is an isometry.
///
/// The kernel is the span of right singular vectors with singular value
/// below `1e-8 sigma_max`; the rank must equal `dim g`.
pub fn check_riemannian_submersion<T: Real>(
    u: &AlgebraLoop<T>,
    kmax: usize,
    method: DifferentialMethod,
    scheme: Scheme,
) -> Result<SubmersionReport> {
    let group: GroupId = u.group();
    let dec = crate::lie::root_decomposition(&group.reference_torus_vector::<T>())?;
    let labels = enumerate_basis(&dec, kmax);
    let dmat = differential_matrix(u, &dec, &labels, method, scheme)?;
    let dmat = dmat.map(|x| to_f64(x));
    let nb = labels.len();
    let svd = dmat.clone().svd(false, true);
    let vt = svd.v_t.as_ref().expect("right singular vectors requested");
    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|&a, &b| svd.singular_values[b].total_cmp(&svd.singular_values[a]));
    let sig: Vec<f64> = order.iter().map(|&i| svd.singular_values[i]).collect();
    let sigma_max = sig[0];
    let rank = sig.iter().filter(|s| **s > 1e-8 * sigma_max).count();
    if rank != group.dim() {
        return Err(Error::TruncationTooSmall(format!("differential has rank {rank}, expected {}", group.dim())));
    }
    let horizontal: Vec<nalgebra::DVector<f64>> = order[..rank].iter().map(|&i| vt.row(i).transpose()).collect();
    let images: Vec<nalgebra::DVector<f64>> = horizontal.iter().map(|h| &dmat * h).collect();
    let mut iso = 0.0f64;
    for i in 0..rank {
        for j in 0..rank {
            let want = if i == j { 1.0 } else { 0.0 };
            iso = iso.max((images[i].dot(&images[j]) - want).abs());
        }
    }
    // |P_c (I - V V^T)|_2 with P_c the projection onto constant loops
    let constants: Vec<usize> = labels.iter().enumerate().filter(|(_, l)| l.is_constant()).map(|(i, _)| i).collect();
    let mut residual = DMatrix::<f64>::zeros(constants.len(), nb);
    for (r, &c) in constants.iter().enumerate() {
        residual[(r, c)] = 1.0;
        for h in &horizontal {
            for col in 0..nb {
                residual[(r, col)] -= h[c] * h[col];
            }
        }
    }
    let leakage = if constants.is_empty() { 0.0 } else { residual.svd(false, false).singular_values.amax() };
    Ok(SubmersionReport {
        basis_size: nb,
        rank,
        horizontal_dim: rank,
        sigma_max,
        sigma_min_nonzero: sig[rank - 1],
        isometry_residual: iso,
        kernel_constant_leakage: leakage,
    })
}
