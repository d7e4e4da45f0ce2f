//! Reference implementations used only by the integration tests. Nothing here
//! calls into the library except for plain data types.

#![allow(dead_code)]

use std::f64::consts::{PI, TAU};

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use rand::Rng;
use s3modes::{Quaternion, Rotation, ToroidalPoint};

pub type CMat = DMatrix<Complex64>;

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Gauss–Legendre nodes and weights from the Jacobi matrix eigenproblem.
pub fn golub_welsch(n: usize) -> (Vec<f64>, Vec<f64>) {
    let jac = DMatrix::from_fn(n, n, |i, j| {
        let m = i.max(j);
        if i.abs_diff(j) == 1 {
            let m = m as f64;
            m / (4.0 * m * m - 1.0).sqrt()
        } else {
            0.0
        }
    });
    let eig = SymmetricEigen::new(jac);
    let mut pairs: Vec<(f64, f64)> = (0..n)
        .map(|i| (eig.eigenvalues[i], 2.0 * eig.eigenvectors[(0, i)].powi(2)))
        .collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    pairs.into_iter().unzip()
}

/// Product rule on S³: Gauss–Legendre in `u = cos 2chi` times uniform grids in
/// the two angles. The volume element is `du dtheta dphi / 4`.
pub struct Rule {
    pub points: Vec<ToroidalPoint>,
    pub weights: Vec<f64>,
}

impl Rule {
    pub fn new(n_u: usize, n_angle: usize) -> Self {
        let (us, ws) = golub_welsch(n_u);
        let step = TAU / n_angle as f64;
        let mut points = Vec::new();
        let mut weights = Vec::new();
        for (u, w) in us.iter().zip(&ws) {
            let chi = u.clamp(-1.0, 1.0).acos() / 2.0;
            for a in 0..n_angle {
                for b in 0..n_angle {
                    points.push(ToroidalPoint {
                        chi,
                        theta: a as f64 * step,
                        phi: b as f64 * step,
                    });
                    weights.push(w * step * step / 4.0);
                }
            }
        }
        Self { points, weights }
    }

    pub fn for_level(k: u32) -> Self {
        Self::new(k as usize + 2, 2 * k as usize + 4)
    }

    /// `∫ conj(f) g` from sampled values.
    pub fn inner(&self, f: &[Complex64], g: &[Complex64]) -> Complex64 {
        f.iter()
            .zip(g)
            .zip(&self.weights)
            .map(|((a, b), w)| a.conj() * b * *w)
            .sum()
    }
}

pub fn embed(p: &ToroidalPoint) -> [f64; 4] {
    [
        p.chi.cos() * p.theta.cos(),
        p.chi.sin() * p.phi.cos(),
        p.chi.sin() * p.phi.sin(),
        p.chi.cos() * p.theta.sin(),
    ]
}

pub fn unembed(x: [f64; 4]) -> ToroidalPoint {
    ToroidalPoint {
        chi: x[1].hypot(x[2]).atan2(x[0].hypot(x[3])),
        theta: x[3].atan2(x[0]),
        phi: x[2].atan2(x[1]),
    }
}

/// Uniform on S³: the volume element is flat in `(u, theta, phi)`.
pub fn random_point(rng: &mut impl Rng) -> ToroidalPoint {
    let u: f64 = rng.gen_range(-1.0..1.0);
    ToroidalPoint {
        chi: u.acos() / 2.0,
        theta: rng.gen_range(0.0..TAU),
        phi: rng.gen_range(0.0..TAU),
    }
}

pub fn random_unit_quaternion(rng: &mut impl Rng) -> [f64; 4] {
    loop {
        let q: [f64; 4] = std::array::from_fn(|_| rng.gen_range(-1.0..1.0));
        let n = q.iter().map(|x| x * x).sum::<f64>().sqrt();
        if n > 0.1 && n < 1.0 {
            return q.map(|x| x / n);
        }
    }
}

pub fn rotation(left: [f64; 4], right: [f64; 4]) -> Rotation {
    Rotation::new(Quaternion { c: left }, Quaternion { c: right }).expect("unit quaternions")
}

pub fn random_rotation(rng: &mut impl Rng) -> Rotation {
    let l = random_unit_quaternion(rng);
    let r = random_unit_quaternion(rng);
    rotation(l, r)
}

/// Hamilton product with `j1 j2 = j3`.
pub fn hamilton(a: [f64; 4], b: [f64; 4]) -> [f64; 4] {
    [
        a[0] * b[0] - a[1] * b[1] - a[2] * b[2] - a[3] * b[3],
        a[0] * b[1] + a[1] * b[0] + a[2] * b[3] - a[3] * b[2],
        a[0] * b[2] - a[1] * b[3] + a[2] * b[0] + a[3] * b[1],
        a[0] * b[3] + a[1] * b[2] - a[2] * b[1] + a[3] * b[0],
    ]
}

/// The unit quaternion of a toroidal point: `cos chi e^{j3 theta} + sin chi e^{j3 phi} j1`.
pub fn point_quaternion(p: &ToroidalPoint) -> [f64; 4] {
    let zeta = [p.theta.cos(), 0.0, 0.0, p.theta.sin()];
    let xi = [p.phi.cos(), 0.0, 0.0, p.phi.sin()];
    let xj = hamilton(xi, [0.0, 1.0, 0.0, 0.0]);
    std::array::from_fn(|m| p.chi.cos() * zeta[m] + p.chi.sin() * xj[m])
}

pub fn apply(g: &Rotation, p: &ToroidalPoint) -> ToroidalPoint {
    let q = point_quaternion(p);
    unembed(hamilton(hamilton(g.q_left.c, q), g.q_right.c))
}

/// `N(a, b) = (cos a, i sin b, i cos b, sin a)`.
pub fn null_ab(a: f64, b: f64) -> [Complex64; 4] {
    [c(a.cos(), 0.0), c(0.0, b.sin()), c(0.0, b.cos()), c(a.sin(), 0.0)]
}

pub fn null_ij(k: u32, i: u32, j: u32) -> [Complex64; 4] {
    let alpha = TAU / f64::from(k + 1);
    null_ab(f64::from(i) * alpha, f64::from(j) * alpha)
}

/// A generic null vector `u + i v` with `|u| = |v|` and `u ⟂ v`.
pub fn random_null(rng: &mut impl Rng) -> [Complex64; 4] {
    let u: [f64; 4] = std::array::from_fn(|_| rng.gen_range(-1.0..1.0));
    let mut v: [f64; 4] = std::array::from_fn(|_| rng.gen_range(-1.0..1.0));
    let uu: f64 = u.iter().map(|x| x * x).sum();
    let uv: f64 = u.iter().zip(&v).map(|(a, b)| a * b).sum();
    for m in 0..4 {
        v[m] -= uv / uu * u[m];
    }
    let vv: f64 = v.iter().map(|x| x * x).sum();
    let s = (uu / vv).sqrt();
    std::array::from_fn(|m| c(u[m], v[m] * s))
}

pub fn power(n: &[Complex64; 4], k: u32, x: [f64; 4]) -> Complex64 {
    let dot: Complex64 = n.iter().zip(x).map(|(a, b)| a * b).sum();
    dot.powu(k)
}

/// Every B3 function at `p`, index `I(k+1) + J`.
pub fn phi_row(k: u32, p: &ToroidalPoint) -> Vec<Complex64> {
    let x = embed(p);
    let mut out = Vec::with_capacity(((k + 1) * (k + 1)) as usize);
    for i in 0..=k {
        for j in 0..=k {
            out.push(power(&null_ij(k, i, j), k, x));
        }
    }
    out
}

/// Flat Laplacian in R⁴ by the five-point fourth-order stencil on each axis.
pub fn laplacian4(f: impl Fn([f64; 4]) -> Complex64, x: [f64; 4], h: f64) -> Complex64 {
    let f0 = f(x);
    let mut total = c(0.0, 0.0);
    for axis in 0..4 {
        let at = |s: f64| {
            let mut y = x;
            y[axis] += s * h;
            f(y)
        };
        total += (-at(2.0) + at(1.0) * 16.0 - f0 * 30.0 + at(-1.0) * 16.0 - at(-2.0)) / (12.0 * h * h);
    }
    total
}

/// Squared singular values from the eigenvalues of `A^H A`, read off its real
/// symmetric embedding `[[Re, -Im], [Im, Re]]` (every eigenvalue appears twice).
pub fn squared_singular_values(m: &CMat) -> Vec<f64> {
    let h = m.adjoint() * m;
    let n = h.nrows();
    let real = DMatrix::from_fn(2 * n, 2 * n, |r, c| {
        let z = h[(r % n, c % n)];
        match (r < n, c < n) {
            (true, true) | (false, false) => z.re,
            (true, false) => -z.im,
            (false, true) => z.im,
        }
    });
    let mut ev: Vec<f64> = SymmetricEigen::new(real).eigenvalues.iter().copied().collect();
    ev.sort_by(|a, b| b.total_cmp(a));
    ev.into_iter().step_by(2).collect()
}

/// Number of singular values above `tol * max(sigma_max, 1)`.
pub fn rank(m: &CMat, tol: f64) -> usize {
    let sq = squared_singular_values(m);
    let top = sq.first().copied().unwrap_or(0.0).max(1.0);
    sq.iter().filter(|s| **s > tol * tol * top).count()
}

/// Least squares through the normal equations; the sample matrices used here
/// are well conditioned.
pub fn lstsq(a: &CMat, b: &CMat) -> CMat {
    let lhs = a.adjoint() * a;
    let rhs = a.adjoint() * b;
    lhs.lu().solve(&rhs).expect("full column rank")
}

pub fn max_abs(m: &CMat) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Induced infinity norm: largest absolute row sum.
pub fn inf_norm(m: &CMat) -> f64 {
    (0..m.nrows())
        .map(|r| m.row(r).iter().map(|z| z.norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

pub fn binomial(n: u32, r: u32) -> f64 {
    (1..=r).fold(1.0, |acc, t| acc * f64::from(n - r + t) / f64::from(t))
}

pub const VOLUME: f64 = 2.0 * PI * PI;
