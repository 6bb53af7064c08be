//! The orthonormal basis of `H^0([0,1], g)` built from a root decomposition:
//! constant loops spanning the horizontal space at `0^` and the rotating
//! loops `l1`, `l2` spanning the vertical space.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lie::{AlgebraVector, TorusDecomposition};
use crate::scalar::{lit, Real};

use super::AlgebraLoop;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BasisKind {
    Constant,
    L1,
    L2,
}

/// Which algebra direction a basis loop is built on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BasisTarget {
    /// `j`-th torus (zero-space) direction.
    Torus(usize),
    /// `e` of the `r`-th root.
    Root(usize),
    /// `e_k` of the `r`-th root; only used by constants.
    RootPartner(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BasisLabel {
    pub kind: BasisKind,
    pub target: BasisTarget,
    /// Mode number; 0 for constants.
    pub k: i64,
}

impl BasisLabel {
    pub fn constant(target: BasisTarget) -> Self {
        Self { kind: BasisKind::Constant, target, k: 0 }
    }

    pub fn is_constant(&self) -> bool {
        self.kind == BasisKind::Constant
    }

    fn validate<T: Real>(&self, dec: &TorusDecomposition<T>) -> Result<()> {
        let bad = |msg: &str| Err(Error::InvalidArgument(format!("basis label {self}: {msg}")));
        let in_range = match self.target {
            BasisTarget::Torus(j) => j < dec.torus_basis.len(),
            BasisTarget::Root(r) | BasisTarget::RootPartner(r) => r < dec.roots.len(),
        };
        if !in_range {
            return bad("target index out of range");
        }
        match (self.kind, self.target) {
            (BasisKind::Constant, _) if self.k != 0 => bad("constants carry k = 0"),
            (BasisKind::Constant, _) => Ok(()),
            (_, BasisTarget::RootPartner(_)) => bad("rotating loops are labelled by e, not e_k"),
            (_, _) if self.k == 0 => bad("k = 0 is not a rotating loop"),
            (_, BasisTarget::Torus(_)) if self.k < 0 => bad("torus loops use k >= 1"),
            _ => Ok(()),
        }
    }
}

impl fmt::Display for BasisLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let kind = match self.kind {
            BasisKind::Constant => "const",
            BasisKind::L1 => "l1",
            BasisKind::L2 => "l2",
        };
        let target = match self.target {
            BasisTarget::Torus(j) => format!("t{j}"),
            BasisTarget::Root(r) => format!("r{r}"),
            BasisTarget::RootPartner(r) => format!("r{r}k"),
        };
        if self.is_constant() {
            write!(f, "{kind}:{target}")
        } else {
            write!(f, "{kind}:{target}:{}", self.k)
        }
    }
}

/// All labels with `|k| <= kmax`: constants first, then by mode.
pub fn enumerate_basis<T: Real>(dec: &TorusDecomposition<T>, kmax: usize) -> Vec<BasisLabel> {
    let mut out = Vec::new();
    for j in 0..dec.torus_basis.len() {
        out.push(BasisLabel::constant(BasisTarget::Torus(j)));
    }
    for r in 0..dec.roots.len() {
        out.push(BasisLabel::constant(BasisTarget::Root(r)));
        out.push(BasisLabel::constant(BasisTarget::RootPartner(r)));
    }
    for k in 1..=kmax as i64 {
        for j in 0..dec.torus_basis.len() {
            for kind in [BasisKind::L1, BasisKind::L2] {
                out.push(BasisLabel { kind, target: BasisTarget::Torus(j), k });
            }
        }
        for r in 0..dec.roots.len() {
            for kk in [k, -k] {
                for kind in [BasisKind::L1, BasisKind::L2] {
                    out.push(BasisLabel { kind, target: BasisTarget::Root(r), k: kk });
                }
            }
        }
    }
    out
}

/// Value of the basis loop `label` at time `t`.
///
/// Root loops are `e cos(2 pi k t) - e_k sin(2 pi k t)` (`l1`) and
/// `e sin(2 pi k t) + e_k cos(2 pi k t)` (`l2`); torus loops are
/// `sqrt(2) cos(2 pi k t) e0` and `sqrt(2) sin(2 pi k t) e0`.
pub fn basis_value<T: Real>(dec: &TorusDecomposition<T>, label: &BasisLabel, t: T) -> Result<AlgebraVector<T>> {
    label.validate(dec)?;
    let angle = T::two_pi() * lit::<T>(label.k as f64) * t;
    let (s, c) = (angle.sin(), angle.cos());
    let sqrt2 = lit::<T>(std::f64::consts::SQRT_2);
    Ok(match (label.kind, label.target) {
        (BasisKind::Constant, BasisTarget::Torus(j)) => dec.torus_basis[j].clone(),
        (BasisKind::Constant, BasisTarget::Root(r)) => dec.roots[r].e.clone(),
        (BasisKind::Constant, BasisTarget::RootPartner(r)) => dec.roots[r].e_k.clone(),
        (BasisKind::L1, BasisTarget::Torus(j)) => dec.torus_basis[j].scale(sqrt2 * c),
        (BasisKind::L2, BasisTarget::Torus(j)) => dec.torus_basis[j].scale(sqrt2 * s),
        (BasisKind::L1, BasisTarget::Root(r)) => dec.roots[r].e.scale(c).axpy(-s, &dec.roots[r].e_k),
        (BasisKind::L2, BasisTarget::Root(r)) => dec.roots[r].e.scale(s).axpy(c, &dec.roots[r].e_k),
        _ => unreachable!("rejected by validate"),
    })
}

/// The basis loop `label` sampled on `N + 1` grid points.
pub fn basis_loop<T: Real>(dec: &TorusDecomposition<T>, label: &BasisLabel, n: usize) -> Result<AlgebraLoop<T>> {
    label.validate(dec)?;
    let mut samples = Vec::with_capacity(n + 1);
    let nn = lit::<T>(n as f64);
    for i in 0..n {
        samples.push(basis_value(dec, label, lit::<T>(i as f64) / nn)?);
    }
    samples.push(samples[0].clone());
    AlgebraLoop::from_samples(dec.group(), samples, true)
}
