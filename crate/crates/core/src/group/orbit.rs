use std::sync::Arc;

use super::MatrixGroup;
use crate::error::{Error, Result};
use crate::fp::{FpVector, PointSet};

/// The orbit of a base point, `H^T v` when `transposed` and `H v` otherwise.
#[derive(Clone, Debug)]
pub struct OrbitSet {
    group: Arc<MatrixGroup>,
    base_point: FpVector,
    transposed: bool,
    points: PointSet,
}

impl OrbitSet {
    pub fn compute(group: Arc<MatrixGroup>, v: &FpVector, transposed: bool) -> Result<Self> {
        group.check_vector(v)?;
        if v.is_zero() {
            return Err(Error::ZeroVector);
        }
        let points = group.iter().map(|m| {
            if transposed {
                m.apply_transpose(v)
            } else {
                m.apply(v)
            }
        });
        let points = PointSet::new(group.modulus(), group.dim(), points)?;
        Ok(Self {
            group,
            base_point: v.clone(),
            transposed,
            points,
        })
    }

    pub fn group(&self) -> &Arc<MatrixGroup> {
        &self.group
    }

    pub fn base_point(&self) -> &FpVector {
        &self.base_point
    }

    pub fn transposed(&self) -> bool {
        self.transposed
    }

    pub fn points(&self) -> &PointSet {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Stabilizer of the base point under the acting convention of this orbit.
    pub fn base_stabilizer(&self) -> MatrixGroup {
        self.group
            .stabilizer_under(&self.base_point, self.transposed)
            .expect("base point validated at construction")
    }
}
