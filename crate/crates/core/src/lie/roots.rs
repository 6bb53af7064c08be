//! Root-space decomposition of `g` with respect to a regular torus vector.

use std::cmp::Ordering;

use nalgebra::{DMatrix, DVector};

use super::{AlgebraVector, GroupId};
use crate::error::{Error, Result};
use crate::scalar::{lit, Real};

/// One positive root pair `(e, e_k)` with `ad(v) e = alpha e_k`, `ad(v) e_k = -alpha e`.
#[derive(Debug, Clone, PartialEq)]
pub struct RootDatum<T: Real = f64> {
    pub alpha_value: T,
    pub e: AlgebraVector<T>,
    pub e_k: AlgebraVector<T>,
    /// Index `j` within the root space, always 1 in the group case.
    pub multiplicity_index: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TorusDecomposition<T: Real = f64> {
    pub v: AlgebraVector<T>,
    pub torus_basis: Vec<AlgebraVector<T>>,
    pub roots: Vec<RootDatum<T>>,
    /// Kernel of `ad(v)^2` beyond the torus; empty for regular `v`.
    pub zero_space_basis: Vec<AlgebraVector<T>>,
}

impl<T: Real> TorusDecomposition<T> {
    pub fn group(&self) -> GroupId {
        self.v.group()
    }

    /// Torus, then `(e, e_k)` per root, then the zero space.
    pub fn full_basis(&self) -> Vec<AlgebraVector<T>> {
        let mut out = self.torus_basis.clone();
        for r in &self.roots {
            out.push(r.e.clone());
            out.push(r.e_k.clone());
        }
        out.extend(self.zero_space_basis.iter().cloned());
        out
    }

    /// Multiplicity `m_alpha` of the root carrying `alpha`.
    pub fn multiplicity(&self, alpha: T) -> usize {
        let tol = lit::<T>(1e-9) * (T::one() + alpha.abs());
        self.roots.iter().filter(|r| (r.alpha_value - alpha).abs() <= tol).count()
    }
}

fn to_vector<T: Real>(group: GroupId, basis: &[AlgebraVector<T>], c: &DVector<T>) -> AlgebraVector<T> {
    let mut out = AlgebraVector::zero(group);
    for (b, x) in basis.iter().zip(c.iter()) {
        out = out.axpy(*x, b);
    }
    out
}

fn lexicographic<T: Real>(a: &AlgebraVector<T>, b: &AlgebraVector<T>) -> Ordering {
    // row-major order of (re, im)
    let n = a.matrix().nrows();
    for i in 0..n {
        for j in 0..n {
            let (x, y) = (a.matrix()[(i, j)], b.matrix()[(i, j)]);
            match x.re.partial_cmp(&y.re).unwrap_or(Ordering::Equal) {
                Ordering::Equal => {}
                o => return o,
            }
            match x.im.partial_cmp(&y.im).unwrap_or(Ordering::Equal) {
                Ordering::Equal => {}
                o => return o,
            }
        }
    }
    Ordering::Equal
}

/// Decompose `g` under `ad(v)^2` for a regular torus vector `v`.
///
/// Each two-dimensional eigenspace of `-ad(v)^2` with eigenvalue `alpha^2`
/// yields one [`RootDatum`]. Within that plane `e` is the normalized
/// projection of the first orthonormal basis element with the largest
/// projection, which makes the output independent of the eigen-solver.
pub fn root_decomposition<T: Real>(v: &AlgebraVector<T>) -> Result<TorusDecomposition<T>> {
    let group = v.group();
    let basis = group.basis::<T>();
    let d = basis.len();
    let ad = v.ad_matrix();
    let s = ad.transpose() * &ad;
    let eig = s.clone().symmetric_eigen();
    let scale = eig.eigenvalues.iter().fold(T::zero(), |m, x| m.max(x.abs()));
    if scale <= T::default_epsilon() {
        return Err(Error::DegenerateTorusVector("ad(v) vanishes; perturb v".into()));
    }
    let zero_tol = scale * lit(1e-9);
    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[j].partial_cmp(&eig.eigenvalues[i]).unwrap_or(Ordering::Equal));
    let kernel: Vec<usize> = order.iter().copied().filter(|&i| eig.eigenvalues[i] <= zero_tol).collect();
    if kernel.len() != group.rank() {
        return Err(Error::DegenerateTorusVector(format!(
            "centralizer has dimension {} but rank is {}; perturb v",
            kernel.len(),
            group.rank()
        )));
    }
    let nonzero: Vec<usize> = order.iter().copied().filter(|&i| eig.eigenvalues[i] > zero_tol).collect();
    let cluster_tol = scale * lit(1e-8);
    let mut clusters: Vec<Vec<usize>> = Vec::new();
    for &i in &nonzero {
        match clusters.last_mut() {
            Some(c) if (eig.eigenvalues[c[0]] - eig.eigenvalues[i]).abs() <= cluster_tol => c.push(i),
            _ => clusters.push(vec![i]),
        }
    }
    if clusters.iter().any(|c| c.len() != 2) {
        return Err(Error::DegenerateTorusVector("coinciding root values; perturb v".into()));
    }

    let mut roots = Vec::with_capacity(clusters.len());
    for c in &clusters {
        let lam = (eig.eigenvalues[c[0]] + eig.eigenvalues[c[1]]) * lit(0.5);
        let alpha = lam.sqrt();
        let u1 = eig.eigenvectors.column(c[0]).into_owned();
        let u2 = eig.eigenvectors.column(c[1]).into_owned();
        let mut best = 0;
        let mut best_w = -T::one();
        for j in 0..d {
            let w = u1[j] * u1[j] + u2[j] * u2[j];
            if w > best_w + lit(1e-12) {
                best = j;
                best_w = w;
            }
        }
        let mut ec = &u1 * u1[best] + &u2 * u2[best];
        ec /= ec.norm();
        let ekc = &ad * &ec / alpha;
        roots.push(RootDatum {
            alpha_value: alpha,
            e: to_vector(group, &basis, &ec),
            e_k: to_vector(group, &basis, &ekc),
            multiplicity_index: 1,
        });
    }
    roots.sort_by(|a, b| {
        b.alpha_value
            .partial_cmp(&a.alpha_value)
            .unwrap_or(Ordering::Equal)
            .then_with(|| lexicographic(&a.e, &b.e))
    });

    // canonical kernel basis: Gram-Schmidt of projected basis elements
    let kmat = DMatrix::from_fn(d, kernel.len(), |i, j| eig.eigenvectors[(i, kernel[j])]);
    let proj = &kmat * kmat.transpose();
    let mut torus: Vec<DVector<T>> = Vec::new();
    for j in 0..d {
        if torus.len() == kernel.len() {
            break;
        }
        let mut x = proj.column(j).into_owned();
        for t in &torus {
            let dot = t.dot(&x);
            x -= t * dot;
        }
        let n = x.norm();
        if n > lit(1e-6) {
            torus.push(x / n);
        }
    }
    let torus_basis = torus.iter().map(|c| to_vector(group, &basis, c)).collect();

    Ok(TorusDecomposition { v: v.clone(), torus_basis, roots, zero_space_basis: Vec::new() })
}
