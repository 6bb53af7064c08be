//! Plain serializable snapshots of algebra and group values for reports.

use serde::{Deserialize, Serialize};

use crate::lie::{AlgebraVector, GroupElement, GroupId};
use crate::scalar::{to_f64, Real};

/// Complex matrix as separate real and imaginary row-major tables.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixRecord {
    pub re: Vec<Vec<f64>>,
    pub im: Vec<Vec<f64>>,
}

impl MatrixRecord {
    fn from_matrix<T: Real>(m: &nalgebra::DMatrix<num_complex::Complex<T>>) -> Self {
        let rows = |f: &dyn Fn(&num_complex::Complex<T>) -> f64| (0..m.nrows()).map(|i| (0..m.ncols()).map(|j| f(&m[(i, j)])).collect()).collect();
        Self { re: rows(&|z| to_f64(z.re)), im: rows(&|z| to_f64(z.im)) }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AlgebraVectorRecord {
    pub group: GroupId,
    /// Coordinates in the orthonormal basis of the group.
    pub coords: Vec<f64>,
}

impl<T: Real> From<&AlgebraVector<T>> for AlgebraVectorRecord {
    fn from(v: &AlgebraVector<T>) -> Self {
        Self { group: v.group(), coords: v.coords().into_iter().map(to_f64).collect() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupElementRecord {
    pub group: GroupId,
    pub matrix: MatrixRecord,
}

impl<T: Real> From<&GroupElement<T>> for GroupElementRecord {
    fn from(g: &GroupElement<T>) -> Self {
        Self { group: g.group(), matrix: MatrixRecord::from_matrix(g.matrix()) }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_record_has_unit_diagonal() {
        let e = GroupElement::<f64>::identity(GroupId::Su3);
        let rec = GroupElementRecord::from(&e);
        assert_eq!(rec.group, GroupId::Su3);
        assert_eq!(rec.matrix.re[1][1], 1.0);
        assert_eq!(rec.matrix.im[0][2], 0.0);
    }
}
