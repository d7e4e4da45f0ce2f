use serde::{Deserialize, Serialize};

use super::quaternion::Quaternion;
use crate::{Error, Result};

const UNIT_TOL: f64 = 1e-12;

/// An element of SO(4) as a pair of unit quaternions acting by `q ↦ q_left q q_right`.
///
/// `(q_left, q_right)` and `(-q_left, -q_right)` describe the same rotation;
/// [`Rotation::canonical`] picks one representative.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Rotation {
    pub q_left: Quaternion,
    pub q_right: Quaternion,
}

impl Rotation {
    pub fn new(q_left: Quaternion, q_right: Quaternion) -> Result<Self> {
        for q in [q_left, q_right] {
            let n = q.norm_sqr();
            let unit = (n - 1.0).abs() < UNIT_TOL;
            if !unit {
                return Err(Error::NotUnit(n));
            }
        }
        Ok(Self { q_left, q_right })
    }

    /// Normalizes both quaternions first; fails only for (near) zero input.
    pub fn normalized(q_left: Quaternion, q_right: Quaternion) -> Result<Self> {
        for q in [q_left, q_right] {
            let n = q.norm_sqr();
            if !(n > 1e-300 && n.is_finite()) {
                return Err(Error::NotUnit(n));
            }
        }
        Ok(Self {
            q_left: q_left.normalized(),
            q_right: q_right.normalized(),
        })
    }

    pub fn identity() -> Self {
        Self {
            q_left: Quaternion::ONE,
            q_right: Quaternion::ONE,
        }
    }

    pub fn apply(&self, p: Quaternion) -> Quaternion {
        self.q_left * p * self.q_right
    }

    /// The rotation `x ↦ self(other(x))`.
    pub fn compose(&self, other: &Rotation) -> Rotation {
        Rotation {
            q_left: self.q_left * other.q_left,
            q_right: other.q_right * self.q_right,
        }
    }

    pub fn inverse(&self) -> Rotation {
        Rotation {
            q_left: self.q_left.conj(),
            q_right: self.q_right.conj(),
        }
    }

    /// 4×4 orthogonal matrix; column `mu` is the image of `j_mu`.
    pub fn to_matrix(&self) -> [[f64; 4]; 4] {
        let mut m = [[0.0; 4]; 4];
        for mu in 0..4 {
            let col = self.apply(Quaternion::unit(mu));
            for (nu, row) in m.iter_mut().enumerate() {
                row[mu] = col.c[nu];
            }
        }
        m
    }

    /// Representative with the first nonzero coefficient of `q_left` positive.
    pub fn canonical(&self) -> Rotation {
        let lead = self
            .q_left
            .c
            .iter()
            .chain(self.q_right.c.iter())
            .copied()
            .find(|c| c.abs() > 1e-9)
            .unwrap_or(1.0);
        if lead < 0.0 {
            Rotation {
                q_left: -self.q_left,
                q_right: -self.q_right,
            }
        } else {
            *self
        }
    }

    /// Equality as SO(4) elements, i.e. up to the joint sign of the pair.
    pub fn same_element(&self, other: &Rotation, tol: f64) -> bool {
        let direct = self.q_left.max_abs_diff(other.q_left).max(self.q_right.max_abs_diff(other.q_right));
        let flipped = self
            .q_left
            .max_abs_diff(-other.q_left)
            .max(self.q_right.max_abs_diff(-other.q_right));
        direct.min(flipped) < tol
    }
}
