use std::f64::consts::{FRAC_PI_2, TAU};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::quaternion::Quaternion;
use crate::{Error, Result};

/// A point of S³ in toroidal coordinates.
///
/// Embedding in R⁴: `(cos chi cos theta, sin chi cos phi, sin chi sin phi, cos chi sin theta)`,
/// with `chi` in `[0, pi/2]` and `theta`, `phi` in `[0, 2 pi)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ToroidalPoint {
    pub chi: f64,
    pub theta: f64,
    pub phi: f64,
}

impl ToroidalPoint {
    /// Validates `chi` and wraps the two angles into `[0, 2 pi)`.
    pub fn new(chi: f64, theta: f64, phi: f64) -> Result<Self> {
        if !(chi.is_finite() && theta.is_finite() && phi.is_finite()) {
            return Err(Error::InvalidPoint("non-finite coordinate".into()));
        }
        if !(0.0..=FRAC_PI_2).contains(&chi) {
            return Err(Error::InvalidPoint(format!("chi = {chi} outside [0, pi/2]")));
        }
        Ok(Self {
            chi,
            theta: wrap(theta),
            phi: wrap(phi),
        })
    }

    /// Inverse of [`Self::embedding`] for a point of R⁴ (projected radially to S³).
    pub fn from_cartesian(x: [f64; 4]) -> Self {
        let [x0, x1, x2, x3] = x;
        Self {
            chi: x1.hypot(x2).atan2(x0.hypot(x3)),
            theta: wrap(x3.atan2(x0)),
            phi: wrap(x2.atan2(x1)),
        }
    }

    pub fn embedding(&self) -> [f64; 4] {
        let (sc, cc) = self.chi.sin_cos();
        let (st, ct) = self.theta.sin_cos();
        let (sp, cp) = self.phi.sin_cos();
        [cc * ct, sc * cp, sc * sp, cc * st]
    }

    /// The unit quaternion `cos chi (cos theta + j3 sin theta) + sin chi (cos phi + j3 sin phi) j1`.
    pub fn to_quaternion(&self) -> Quaternion {
        let zeta = Quaternion::exp_j3(self.theta);
        let xi = Quaternion::exp_j3(self.phi);
        zeta.scale(self.chi.cos()) + (xi * Quaternion::unit(1)).scale(self.chi.sin())
    }

    pub fn from_quaternion(q: Quaternion) -> Self {
        Self::from_cartesian(q.c)
    }

    /// `e^{i theta}`.
    pub fn zeta(&self) -> Complex64 {
        Complex64::from_polar(1.0, self.theta)
    }

    /// `e^{i phi}`.
    pub fn xi(&self) -> Complex64 {
        Complex64::from_polar(1.0, self.phi)
    }

    /// `u = cos 2 chi`, the Jacobi argument.
    pub fn u(&self) -> f64 {
        (2.0 * self.chi).cos()
    }
}

fn wrap(t: f64) -> f64 {
    let w = t.rem_euclid(TAU);
    // rem_euclid can round up to TAU itself for tiny negative inputs
    if w >= TAU {
        0.0
    } else {
        w
    }
}
