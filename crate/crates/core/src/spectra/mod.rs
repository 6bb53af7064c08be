//! Shape operators of the fibres of `phi`, their spectra, regularized traces
//! and the isoparametric probe.

pub mod isoparametric;
pub mod traces;

use std::fmt;

use nalgebra::DMatrix;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::lie::{root_decomposition, AlgebraVector, TorusDecomposition};
use crate::loops::{basis_loop, enumerate_basis, l2_inner, AlgebraLoop, BasisLabel, BasisTarget};
use crate::scalar::{lit, to_f64, Real};
use crate::transport::{horizontal_lift, solve_transport, Scheme};

pub use isoparametric::{isoparametric_probe, radius_scan, ProbeOptions, ProbePoint, ProbeReport, ProbeTarget, RadiusSample};
pub use traces::{hurwitz_zeta, log_fit, regularized_traces, LogFit, TailModel, TraceOptions, TraceReport, TraceVerdict, ZetaProbeRow};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpectrumLabel {
    Basis(BasisLabel),
    Numeric,
}

impl Serialize for SpectrumLabel {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl fmt::Display for SpectrumLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Basis(l) => write!(f, "{l}"),
            Self::Numeric => f.write_str("numeric"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SpectrumEntry {
    pub eigenvalue: f64,
    pub multiplicity: usize,
    pub label: SpectrumLabel,
}

/// Eigenvalues with multiplicities, sorted descending.
#[derive(Debug, Clone, PartialEq, Default, Serialize)]
pub struct SpectrumTable {
    entries: Vec<SpectrumEntry>,
}

impl SpectrumTable {
    pub fn new(mut entries: Vec<SpectrumEntry>) -> Result<Self> {
        if let Some(e) = entries.iter().find(|e| e.multiplicity == 0 || !e.eigenvalue.is_finite()) {
            return Err(Error::InvalidArgument(format!("bad spectrum entry {e:?}")));
        }
        entries.sort_by(|a, b| b.eigenvalue.total_cmp(&a.eigenvalue));
        Ok(Self { entries })
    }

    /// Table of single eigenvalues labelled as numeric.
    pub fn from_values(values: &[f64]) -> Result<Self> {
        Self::new(values.iter().map(|&eigenvalue| SpectrumEntry { eigenvalue, multiplicity: 1, label: SpectrumLabel::Numeric }).collect())
    }

    pub fn entries(&self) -> &[SpectrumEntry] {
        &self.entries
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Total dimension, counting multiplicity.
    pub fn dimension(&self) -> usize {
        self.entries.iter().map(|e| e.multiplicity).sum()
    }

    /// Eigenvalues repeated by multiplicity, descending.
    pub fn expanded(&self) -> Vec<f64> {
        self.entries.iter().flat_map(|e| std::iter::repeat_n(e.eigenvalue, e.multiplicity)).collect()
    }

    /// Positive eigenvalues `lambda^+_i` and magnitudes `lambda^-_i` of the
    /// negative ones, each descending; zeros are dropped.
    pub fn split_signs(&self) -> (Vec<f64>, Vec<f64>) {
        let all = self.expanded();
        let plus = all.iter().copied().filter(|x| *x > 0.0).collect();
        let mut minus: Vec<f64> = all.iter().filter(|x| **x < 0.0).map(|x| -x).collect();
        minus.sort_by(|a, b| b.total_cmp(a));
        (plus, minus)
    }

    pub fn scaled(&self, t: f64) -> Result<Self> {
        Self::new(self.entries.iter().map(|e| SpectrumEntry { eigenvalue: t * e.eigenvalue, ..*e }).collect())
    }

    /// Largest gap between the sorted expanded spectra; infinite when the
    /// dimensions differ.
    pub fn multiset_distance(&self, other: &Self) -> f64 {
        let (a, b) = (self.expanded(), other.expanded());
        if a.len() != b.len() {
            return f64::INFINITY;
        }
        a.iter().zip(&b).fold(0.0, |m, (x, y)| m.max((x - y).abs()))
    }
}

fn fibre_labels<T: Real>(dec: &TorusDecomposition<T>, kmax: usize) -> Vec<BasisLabel> {
    enumerate_basis(dec, kmax).into_iter().filter(|l| !l.is_constant()).collect()
}

/// Spectrum of the fibre shape operator `A_v` at `0^` on modes
/// `0 < |k| <= kmax`: eigenvalue `-alpha(v) / (2 k pi)` with multiplicity
/// `2 m_alpha` on the root loops of `(alpha, k)`, zero on torus loops.
pub fn analytic_fiber_spectrum<T: Real>(v: &AlgebraVector<T>, kmax: usize) -> Result<SpectrumTable> {
    let dec = root_decomposition(v)?;
    let mut entries = Vec::new();
    for k in 1..=kmax as i64 {
        for (r, root) in dec.roots.iter().enumerate() {
            let alpha = to_f64(root.alpha_value);
            for kk in [k, -k] {
                let label = BasisLabel { kind: crate::loops::BasisKind::L1, target: BasisTarget::Root(r), k: kk };
                entries.push(SpectrumEntry {
                    eigenvalue: -alpha / (2.0 * kk as f64 * std::f64::consts::PI),
                    multiplicity: 2 * dec.multiplicity(root.alpha_value),
                    label: SpectrumLabel::Basis(label),
                });
            }
        }
        for j in 0..dec.torus_basis.len() {
            let label = BasisLabel { kind: crate::loops::BasisKind::L1, target: BasisTarget::Torus(j), k };
            entries.push(SpectrumEntry { eigenvalue: 0.0, multiplicity: 2, label: SpectrumLabel::Basis(label) });
        }
    }
    SpectrumTable::new(entries)
}

/// Numerically assembled shape operator of `phi^{-1}(e)` at `0^`.
#[derive(Debug, Clone)]
pub struct ShapeOperator {
    pub labels: Vec<BasisLabel>,
    /// `S[b][a] = -<d/d eps v^L(eps l_a), l_b>`, symmetrized.
    pub matrix: DMatrix<f64>,
    /// `max |S - S^T|` before symmetrization.
    pub asymmetry: f64,
    pub table: SpectrumTable,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShapeOptions {
    /// Transport grid; the lifted fields live on `n / 2` intervals.
    pub n: usize,
    pub scheme: Scheme,
}

impl Default for ShapeOptions {
    fn default() -> Self {
        Self { n: 512, scheme: Scheme::Rkmk4 }
    }
}

/// Shape operator `A_v` of the fibre through `0^`, with `v` lifted to the
/// horizontal field `v^L(u) = Ad(Y_u^{-1} phi(u)) v` and differentiated by
/// central differences of step `eps` along each tangent basis loop.
pub fn numeric_shape_operator<T: Real>(v: &AlgebraVector<T>, kmax: usize, eps: f64) -> Result<ShapeOperator> {
    numeric_shape_operator_with(v, kmax, eps, ShapeOptions::default())
}

pub fn numeric_shape_operator_with<T: Real>(v: &AlgebraVector<T>, kmax: usize, eps: f64, opts: ShapeOptions) -> Result<ShapeOperator> {
    if !(1e-5..=1e-3).contains(&eps) {
        return Err(Error::InvalidArgument(format!("difference step {eps} outside [1e-5, 1e-3]")));
    }
    if kmax > 8 {
        return Err(Error::TruncationTooSmall(format!("mode cutoff {kmax} above 8")));
    }
    let group = v.group();
    let dec = match root_decomposition(v) {
        Ok(d) => d,
        // v = 0 and other singular directions: use any regular torus
        Err(Error::DegenerateTorusVector(_)) if v.norm() <= lit(1e-12) => root_decomposition(&group.reference_torus_vector::<T>())?,
        Err(e) => return Err(e),
    };
    let labels = fibre_labels(&dec, kmax);
    if opts.n < 8 * kmax.max(1) {
        return Err(Error::TruncationTooSmall(format!("grid {} too coarse for modes up to {kmax}", opts.n)));
    }
    let fine: Vec<AlgebraLoop<T>> = labels.iter().map(|l| basis_loop(&dec, l, opts.n)).collect::<Result<_>>()?;
    let coarse: Vec<AlgebraLoop<T>> = labels.iter().map(|l| basis_loop(&dec, l, opts.n / 2)).collect::<Result<_>>()?;
    let field = |u: &AlgebraLoop<T>| -> Result<AlgebraLoop<T>> {
        let sol = solve_transport(u, opts.scheme)?;
        horizontal_lift(&sol, v)
    };
    let m = labels.len();
    let mut raw = DMatrix::<f64>::zeros(m, m);
    let e = lit::<T>(eps);
    for (a, la) in fine.iter().enumerate() {
        let plus = field(&la.scale(e))?;
        let minus = field(&la.scale(-e))?;
        let d = plus.sub(&minus)?.scale(T::one() / (e + e));
        for (b, lb) in coarse.iter().enumerate() {
            raw[(b, a)] = -to_f64(l2_inner(&d, lb)?);
        }
    }
    let asymmetry = (&raw - raw.transpose()).amax();
    let matrix = (&raw + raw.transpose()) * 0.5;
    let eig = matrix.clone().symmetric_eigen();
    let table = SpectrumTable::from_values(eig.eigenvalues.as_slice())?;
    Ok(ShapeOperator { labels, matrix, asymmetry, table })
}

/// `Tr A_v^2` over all modes: the table up to `kmax` plus the tail
/// `sum_{|k| > kmax} 2 m_alpha alpha(v)^2 / (4 k^2 pi^2)` in closed form.
pub fn trace_square<T: Real>(v: &AlgebraVector<T>, kmax: usize) -> Result<f64> {
    if v.norm() == T::zero() {
        return Ok(0.0);
    }
    let dec = root_decomposition(v)?;
    let table = analytic_fiber_spectrum(v, kmax)?;
    let head: f64 = table.entries().iter().map(|e| e.eigenvalue * e.eigenvalue * e.multiplicity as f64).sum();
    let tail_zeta = hurwitz_zeta(2.0, (kmax + 1) as f64);
    let mut tail = 0.0;
    for root in &dec.roots {
        let alpha = to_f64(root.alpha_value);
        let m = dec.multiplicity(root.alpha_value) as f64;
        // two signs of k, multiplicity 2 m
        tail += 2.0 * 2.0 * m * alpha * alpha / (4.0 * std::f64::consts::PI * std::f64::consts::PI) * tail_zeta;
    }
    Ok(head + tail)
}

/// `sum_alpha m_alpha alpha(v)^2 / 6`, the full value of [`trace_square`].
pub fn trace_square_closed_form<T: Real>(v: &AlgebraVector<T>) -> Result<f64> {
    if v.norm() == T::zero() {
        return Ok(0.0);
    }
    let dec = root_decomposition(v)?;
    Ok(dec.roots.iter().map(|r| dec.multiplicity(r.alpha_value) as f64 * to_f64(r.alpha_value).powi(2) / 6.0).sum())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lie::GroupId;

    fn su2_unit_root() -> AlgebraVector<f64> {
        // alpha(v) = 2 theta for v = diag(i theta, -i theta)
        let v = GroupId::Su2.reference_torus_vector::<f64>();
        let dec = root_decomposition(&v).unwrap();
        v.scale(1.0 / dec.roots[0].alpha_value)
    }

    #[test]
    fn su2_table_for_unit_root() {
        let t = analytic_fiber_spectrum(&su2_unit_root(), 2).unwrap();
        let pi = std::f64::consts::PI;
        let nonzero: Vec<f64> = t.expanded().into_iter().filter(|x| *x != 0.0).collect();
        let want = [1.0 / (2.0 * pi), 1.0 / (2.0 * pi), 1.0 / (4.0 * pi), 1.0 / (4.0 * pi)];
        let mut w: Vec<f64> = want.iter().copied().chain(want.iter().map(|x| -x)).collect();
        w.sort_by(|a, b| b.total_cmp(a));
        assert_eq!(nonzero.len(), 8);
        for (a, b) in nonzero.iter().zip(&w) {
            assert!((a - b).abs() < 1e-15);
        }
        assert_eq!(t.dimension(), 3 * 2 * 2);
    }

    #[test]
    fn spectrum_scales_with_v() {
        let v = GroupId::Su3.reference_torus_vector::<f64>();
        let a = analytic_fiber_spectrum(&v, 3).unwrap();
        let b = analytic_fiber_spectrum(&v.scale(2.0), 3).unwrap();
        assert!(a.scaled(2.0).unwrap().multiset_distance(&b) < 1e-14);
    }

    #[test]
    fn numeric_matches_analytic_su2() {
        let v = su2_unit_root().scale(0.9);
        let num = numeric_shape_operator(&v, 3, 1e-4).unwrap();
        let ana = analytic_fiber_spectrum(&v, 3).unwrap();
        assert!(num.asymmetry < 1e-6, "{}", num.asymmetry);
        let d = num.table.multiset_distance(&ana);
        assert!(d < 1e-4, "{d}");
    }

    #[test]
    fn zero_vector_gives_zero_operator() {
        let z = AlgebraVector::<f64>::zero(GroupId::So3);
        let num = numeric_shape_operator(&z, 2, 1e-4).unwrap();
        assert!(num.matrix.amax() < 1e-8);
    }

    #[test]
    fn trace_square_su2_unit_root() {
        let v = su2_unit_root();
        assert!((trace_square(&v, 64).unwrap() - 1.0 / 6.0).abs() < 1e-12);
        assert!((trace_square(&v.scale(2.0), 5).unwrap() - 4.0 / 6.0).abs() < 1e-12);
    }
}
