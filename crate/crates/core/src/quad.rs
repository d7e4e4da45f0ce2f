//! Integration over S³ in toroidal coordinates, and the numerical checks built
//! on it: Gram matrices, projection onto an eigenspace, and finite-difference
//! Laplacians.
//!
//! With `u = cos 2chi` the volume element `cos chi sin chi dchi dtheta dphi`
//! becomes `du/4 dtheta dphi`, so a product rule of Gauss–Legendre in `u` and
//! uniform grids in the two angles integrates trigonometric polynomials exactly.

use std::f64::consts::{PI, TAU};

use nalgebra::DVector;
use num_complex::Complex64;

use crate::algebra::{ComplexQuaternion, ToroidalPoint};
use crate::bases::{eval_null_power, eval_t, ModeB2};
use crate::linalg::CMatrix;
use crate::{Error, Result};

#[derive(Debug, Clone)]
pub struct QuadratureRule {
    pub nodes: Vec<ToroidalPoint>,
    pub weights: Vec<f64>,
}

/// Gauss–Legendre nodes and weights on `[-1, 1]`, ascending.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        // Tricomi initial guess, then Newton on P_n
        let mut z = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, z);
            dp = d;
            let dz = p / d;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, z);
        dp = if d != 0.0 { d } else { dp };
        let wi = 2.0 / ((1.0 - z * z) * dp * dp);
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = wi;
        w[n - 1 - i] = wi;
    }
    if n % 2 == 1 {
        x[n / 2] = 0.0;
    }
    (x, w)
}

fn legendre_with_derivative(n: usize, z: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, z);
    if n == 0 {
        return (1.0, 0.0);
    }
    for j in 2..=n {
        let j = j as f64;
        let p2 = ((2.0 * j - 1.0) * z * p1 - (j - 1.0) * p0) / j;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (z * p1 - p0) / (z * z - 1.0);
    (p1, d)
}

/// Product rule: `n_u` Gauss–Legendre nodes in `u = cos 2chi` times `n_angle`
/// uniform nodes in each of `theta`, `phi`.
///
/// Exact for `u^a e^{i b theta} e^{i c phi}` with `a <= 2 n_u - 1` and
/// `|b|, |c| < n_angle`.
pub fn make_rule(n_u: usize, n_angle: usize) -> Result<QuadratureRule> {
    if n_u == 0 || n_angle == 0 {
        return Err(Error::Parse("quadrature sizes must be positive".into()));
    }
    let (us, uw) = gauss_legendre(n_u);
    let step = TAU / n_angle as f64;
    let mut nodes = Vec::with_capacity(n_u * n_angle * n_angle);
    let mut weights = Vec::with_capacity(nodes.capacity());
    for (u, w) in us.iter().zip(&uw) {
        let chi = u.clamp(-1.0, 1.0).acos() / 2.0;
        let weight = w / 4.0 * step * step;
        for a in 0..n_angle {
            for b in 0..n_angle {
                nodes.push(ToroidalPoint {
                    chi,
                    theta: a as f64 * step,
                    phi: b as f64 * step,
                });
                weights.push(weight);
            }
        }
    }
    Ok(QuadratureRule { nodes, weights })
}

/// Default rule for products of two level-`k` functions: `n_u = k+2`, `n_angle = 2k+4`.
pub fn rule_for_level(k: u32) -> QuadratureRule {
    let k = k as usize;
    make_rule(k + 2, 2 * k + 4).expect("positive sizes")
}

impl QuadratureRule {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn integrate(&self, f: impl Fn(&ToroidalPoint) -> Complex64) -> Complex64 {
        self.nodes.iter().zip(&self.weights).map(|(p, w)| f(p) * *w).sum()
    }

    /// Samples `f_a(node_s)` for a family of functions: rows are nodes.
    pub fn sample<F>(&self, funcs: &[F]) -> CMatrix
    where
        F: Fn(&ToroidalPoint) -> Complex64,
    {
        CMatrix::from_fn(self.len(), funcs.len(), |s, a| funcs[a](&self.nodes[s]))
    }

    /// Gram matrix `G[b][a] = ∫ conj(f_b) f_a` from a node-by-function sample
    /// matrix, so that `<f, g> = y^H G x` for coefficient vectors `x`, `y`.
    pub fn gram(&self, samples: &CMatrix) -> CMatrix {
        let weighted = CMatrix::from_fn(samples.nrows(), samples.ncols(), |s, a| samples[(s, a)] * self.weights[s]);
        samples.adjoint() * weighted
    }
}

/// `∫_{S³} f conj(g)`.
pub fn inner_product(
    f: impl Fn(&ToroidalPoint) -> Complex64,
    g: impl Fn(&ToroidalPoint) -> Complex64,
    rule: &QuadratureRule,
) -> Complex64 {
    rule.integrate(|p| f(p) * g(p).conj())
}

/// Sample matrix of the whole B2 basis at level `k` (columns in B2 index order).
pub fn b2_samples(k: u32, rule: &QuadratureRule) -> CMatrix {
    let modes = ModeB2::all(k);
    CMatrix::from_fn(rule.len(), modes.len(), |s, a| eval_t(&modes[a], &rule.nodes[s]))
}

#[derive(Debug, Clone)]
pub struct Projection {
    /// Coefficients on `T_{k;m1,m2}` in B2 index order.
    pub coeffs: Vec<Complex64>,
    /// `sqrt(∫ |f - Σ c T|²)` on the rule.
    pub residual: f64,
}

/// Least-squares projection of `f` onto the B2 functions of level `k`.
pub fn project_onto_level(
    f: impl Fn(&ToroidalPoint) -> Complex64,
    k: u32,
    rule: &QuadratureRule,
) -> Projection {
    let a = b2_samples(k, rule);
    let fv = DVector::from_iterator(rule.len(), rule.nodes.iter().map(&f));
    let weighted = DVector::from_iterator(rule.len(), fv.iter().zip(&rule.weights).map(|(v, w)| v * *w));
    let rhs = a.adjoint() * weighted;
    let gram = rule.gram(&a);
    let coeffs = gram.lu().solve(&rhs).expect("B2 Gram matrix is nonsingular");
    let recon = &a * &coeffs;
    let residual = fv
        .iter()
        .zip(recon.iter())
        .zip(&rule.weights)
        .map(|((x, y), w)| (x - y).norm_sqr() * w)
        .sum::<f64>()
        .sqrt();
    Projection {
        coeffs: coeffs.iter().copied().collect(),
        residual,
    }
}

/// Fourth-order central-difference Laplacian in R⁴ at `x` with step `h`.
pub fn laplacian_fd(f: impl Fn([f64; 4]) -> Complex64, x: [f64; 4], h: f64) -> Complex64 {
    let center = f(x);
    let mut acc = Complex64::new(0.0, 0.0);
    for mu in 0..4 {
        let at = |s: f64| {
            let mut y = x;
            y[mu] += s * h;
            f(y)
        };
        acc += -at(2.0) + at(1.0) * 16.0 - center * 30.0 + at(-1.0) * 16.0 - at(-2.0);
    }
    acc / (12.0 * h * h)
}

/// Low-discrepancy points of S³, uniform for the volume measure.
///
/// Halton sequence in bases 2, 3, 5 mapped to `u = cos 2chi`, `theta`, `phi`;
/// `offset` selects a different stretch of the sequence.
pub fn quasi_random_points(count: usize, offset: usize) -> Vec<ToroidalPoint> {
    (0..count)
        .map(|n| {
            let idx = (n + 1 + offset) as u64;
            let u = 2.0 * radical_inverse(idx, 2) - 1.0;
            ToroidalPoint {
                chi: u.acos() / 2.0,
                theta: TAU * radical_inverse(idx, 3),
                phi: TAU * radical_inverse(idx, 5),
            }
        })
        .collect()
}

fn radical_inverse(mut n: u64, base: u64) -> f64 {
    let inv = 1.0 / base as f64;
    let mut f = inv;
    let mut out = 0.0;
    while n > 0 {
        out += (n % base) as f64 * f;
        n /= base;
        f *= inv;
    }
    out
}

/// Number of points at which [`harmonicity_residual`] and
/// [`eigenfunction_residual`] are evaluated.
pub const FD_SAMPLE_POINTS: usize = 64;

/// Largest normalized finite-difference Laplacian of `(x·N)^k` over sample points
/// of S³: `|Δ_h F(x)| / max(1, |F(x)|)`. Zero (up to rounding) exactly when `N` is null.
pub fn harmonicity_residual(n: &ComplexQuaternion, k: u32, h: f64) -> f64 {
    let f = |x: [f64; 4]| eval_null_power(n, k, x);
    quasi_random_points(FD_SAMPLE_POINTS, 0)
        .iter()
        .map(|p| {
            let x = p.embedding();
            laplacian_fd(f, x, h).norm() / f(x).norm().max(1.0)
        })
        .fold(0.0, f64::max)
}

/// Same residual for the degree-`k` homogeneous extension `r^k f(x/r)` of a
/// function given on S³. It vanishes exactly when `f` lies in `V^k`, i.e. when
/// `f` is an eigenfunction of the S³ Laplacian with eigenvalue `-k(k+2)`.
pub fn eigenfunction_residual(f: impl Fn(&ToroidalPoint) -> Complex64, k: u32, h: f64) -> f64 {
    let ext = |x: [f64; 4]| {
        let r = x.iter().map(|v| v * v).sum::<f64>().sqrt();
        f(&ToroidalPoint::from_cartesian(x)) * r.powi(k as i32)
    };
    quasi_random_points(FD_SAMPLE_POINTS, 0)
        .iter()
        .map(|p| {
            let x = p.embedding();
            laplacian_fd(ext, x, h).norm() / ext(x).norm().max(1.0)
        })
        .fold(0.0, f64::max)
}
