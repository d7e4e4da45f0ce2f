//! The toroidal basis B2 (`T_{k;m1,m2}`), the null-vector basis B3
//! (`Phi^k_{IJ}`), the expansion coefficients `P_{k;m1,m2}` linking them, and the
//! change-of-basis matrices.
//!
//! Index flattening, used by every matrix in the crate:
//!
//! * B2 mode `(m1, m2)` at level `k` ↦ `(m1 + k/2)(k+1) + (m2 + k/2)`;
//! * B3 mode `(I, J)` ↦ `I (k+1) + J`.
//!
//! The change-of-basis matrices are stored for the scaled functions
//! `𝒯_{k;m1,m2} = P_{k;m1,m2} T_{k;m1,m2}`, which are the objects the
//! roots-of-unity transform produces directly. [`p_diagonal`] converts.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::algebra::quaternion::null_vector_from_trig;
use crate::algebra::{
    binomial, jacobi_poly, scalar_product, ComplexQuaternion, RootsOfUnity, ToroidalPoint, MAX_LEVEL,
};
use crate::linalg::{entries_row_major, mat_vec, matrix_from_row_major, matrix_to_csv, CMatrix};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Basis {
    B2,
    B3,
}

/// Index record `(k; m1, m2)` of a B2 function. `m1`, `m2` run over
/// `-k/2..=k/2` in unit steps, so they are half-integers when `k` is odd;
/// they are stored doubled.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ModeB2 {
    k: u32,
    m1x2: i32,
    m2x2: i32,
}

impl ModeB2 {
    /// Build from doubled indices `2 m1`, `2 m2`.
    pub fn from_doubled(k: u32, m1x2: i32, m2x2: i32) -> Result<Self> {
        let ki = k as i32;
        for (name, v) in [("m1", m1x2), ("m2", m2x2)] {
            if v.abs() > ki {
                return Err(Error::InvalidMode {
                    k,
                    reason: format!("|{name}| = {} exceeds k/2", f64::from(v.abs()) / 2.0),
                });
            }
            if (v + ki) % 2 != 0 {
                return Err(Error::InvalidMode {
                    k,
                    reason: format!("{name} = {} does not differ from -k/2 by an integer", f64::from(v) / 2.0),
                });
            }
        }
        Ok(Self { k, m1x2, m2x2 })
    }

    /// Build from the actual (possibly half-integer) values.
    pub fn new(k: u32, m1: f64, m2: f64) -> Result<Self> {
        let twice = |v: f64, name: &str| {
            let t = 2.0 * v;
            if (t - t.round()).abs() > 1e-9 || !t.is_finite() {
                Err(Error::InvalidMode {
                    k,
                    reason: format!("{name} = {v} is not a multiple of 1/2"),
                })
            } else {
                Ok(t.round() as i32)
            }
        };
        Self::from_doubled(k, twice(m1, "m1")?, twice(m2, "m2")?)
    }

    /// Every mode of level `k`, in flattened-index order.
    pub fn all(k: u32) -> Vec<ModeB2> {
        let ki = k as i32;
        let mut out = Vec::with_capacity(((k + 1) * (k + 1)) as usize);
        for a in 0..=ki {
            for b in 0..=ki {
                out.push(Self {
                    k,
                    m1x2: 2 * a - ki,
                    m2x2: 2 * b - ki,
                });
            }
        }
        out
    }

    pub fn from_index(k: u32, index: usize) -> Result<Self> {
        let n = (k + 1) as usize;
        if index >= n * n {
            return Err(Error::DimensionMismatch {
                expected: n * n,
                got: index,
            });
        }
        let (a, b) = ((index / n) as i32, (index % n) as i32);
        Ok(Self {
            k,
            m1x2: 2 * a - k as i32,
            m2x2: 2 * b - k as i32,
        })
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn m1(&self) -> f64 {
        f64::from(self.m1x2) / 2.0
    }

    pub fn m2(&self) -> f64 {
        f64::from(self.m2x2) / 2.0
    }

    pub fn m1_doubled(&self) -> i32 {
        self.m1x2
    }

    pub fn m2_doubled(&self) -> i32 {
        self.m2x2
    }

    /// `l = m1 + m2`, the `theta` frequency.
    pub fn ell(&self) -> i32 {
        (self.m1x2 + self.m2x2) / 2
    }

    /// `m = m2 - m1`, the `phi` frequency.
    pub fn m(&self) -> i32 {
        (self.m2x2 - self.m1x2) / 2
    }

    /// The same mode with `m2` negated.
    pub fn flip_m2(&self) -> Self {
        Self {
            m2x2: -self.m2x2,
            ..*self
        }
    }

    pub fn index(&self) -> usize {
        let n = (self.k + 1) as usize;
        let a = ((self.m1x2 + self.k as i32) / 2) as usize;
        let b = ((self.m2x2 + self.k as i32) / 2) as usize;
        a * n + b
    }

    /// `k/2 + m1`, `k/2 - m1`, `k/2 + m2`, `k/2 - m2` as integers.
    fn shifted(&self) -> [u32; 4] {
        let k = self.k as i32;
        [
            ((k + self.m1x2) / 2) as u32,
            ((k - self.m1x2) / 2) as u32,
            ((k + self.m2x2) / 2) as u32,
            ((k - self.m2x2) / 2) as u32,
        ]
    }
}

#[derive(Serialize, Deserialize)]
struct ModeB2Repr {
    k: u32,
    m1: f64,
    m2: f64,
}

impl Serialize for ModeB2 {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        ModeB2Repr {
            k: self.k,
            m1: self.m1(),
            m2: self.m2(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for ModeB2 {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let r = ModeB2Repr::deserialize(d)?;
        ModeB2::new(r.k, r.m1, r.m2).map_err(serde::de::Error::custom)
    }
}

/// Index record `(k; I, J)` of a B3 function; `k` even, `0 <= I, J <= k`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ModeB3 {
    pub k: u32,
    pub i: u32,
    pub j: u32,
}

impl ModeB3 {
    pub fn new(k: u32, i: u32, j: u32) -> Result<Self> {
        require_even(k)?;
        if i > k || j > k {
            return Err(Error::InvalidIndex { k, i, j });
        }
        Ok(Self { k, i, j })
    }

    pub fn all(k: u32) -> Result<Vec<ModeB3>> {
        require_even(k)?;
        Ok((0..=k)
            .flat_map(|i| (0..=k).map(move |j| ModeB3 { k, i, j }))
            .collect())
    }

    pub fn index(&self) -> usize {
        (self.i * (self.k + 1) + self.j) as usize
    }

    pub fn from_index(k: u32, index: usize) -> Result<Self> {
        let n = (k + 1) as usize;
        Self::new(k, (index / n) as u32, (index % n) as u32)
    }
}

pub(crate) fn require_even(k: u32) -> Result<()> {
    if k % 2 == 1 {
        Err(Error::OddLevel(k))
    } else {
        Ok(())
    }
}

/// Rejects levels above [`MAX_LEVEL`], where the exact binomials stop fitting.
pub fn require_supported(k: u32) -> Result<()> {
    if k > MAX_LEVEL {
        Err(Error::LevelTooLarge { k, max: MAX_LEVEL })
    } else {
        Ok(())
    }
}

/// Dimension `(k+1)²` of `V^k`.
pub fn dimension(k: u32) -> usize {
    ((k + 1) * (k + 1)) as usize
}

/// Normalization constant of `T_{k;m1,m2}`.
///
/// `sqrt(k+1)/pi * sqrt((k/2+m2)!(k/2-m2)! / ((k/2+m1)!(k/2-m1)!))` evaluated at
/// the canonical indices `m1' = (|l|-|m|)/2`, `m2' = (|l|+|m|)/2`, i.e. for the
/// representative with `l, m >= 0` that the radial factor is built from. With it
/// every mode has `∫|T|² = 2` over S³ (volume `2 pi²`).
pub fn normalization_constant(mode: &ModeB2) -> f64 {
    let k = mode.k;
    let (al, am) = (mode.ell().unsigned_abs(), mode.m().unsigned_abs());
    // k/2 + m1' = (k + |l| - |m|)/2 and k/2 + m2' = (k + |l| + |m|)/2
    let a = (k + al - am) / 2;
    let b = (k + al + am) / 2;
    // (k/2+m2')!(k/2-m2')! / ((k/2+m1')!(k/2-m1')!) = C(k, a) / C(k, b)
    let ratio = binomial(k, a) as f64 / binomial(k, b) as f64;
    f64::from(k + 1).sqrt() / PI * ratio.sqrt()
}

/// `T_{k;m1,m2}(chi, theta, phi) = C cos^|l| chi sin^|m| chi P^{(|m|,|l|)}_d(cos 2chi) e^{i l theta} e^{i m phi}`,
/// with `d = (k - |l| - |m|)/2` and an extra factor `(-1)^|m|` when `m < 0`.
///
/// For `l, m >= 0` this is the closed form verbatim. Negative `l` or `m` are
/// reduced with the Jacobi reflection relations; the sign is the one the
/// reflection `P^{(-m,b)}_n(x) ∝ ((x-1)/2)^m P^{(m,b)}_{n-m}(x)` carries at
/// `x = cos 2chi`.
pub fn eval_t(mode: &ModeB2, p: &ToroidalPoint) -> Complex64 {
    let (l, m) = (mode.ell(), mode.m());
    let (al, am) = (l.unsigned_abs(), m.unsigned_abs());
    let d = (mode.k - al - am) / 2;
    let radial = p.chi.cos().powi(al as i32)
        * p.chi.sin().powi(am as i32)
        * jacobi_poly(d, i64::from(am), i64::from(al), p.u()).expect("nonnegative parameters");
    let sign = if m < 0 && am % 2 == 1 { -1.0 } else { 1.0 };
    let phase = Complex64::from_polar(1.0, f64::from(l) * p.theta + f64::from(m) * p.phi);
    phase * (sign * normalization_constant(mode) * radial)
}

/// The null vector `N_IJ = N(I alpha, J alpha)`, `alpha = 2 pi/(k+1)`.
pub fn null_vector_ij(roots: &RootsOfUnity, i: u32, j: u32) -> ComplexQuaternion {
    let (ca, sa) = roots.cos_sin(i64::from(i));
    let (cb, sb) = roots.cos_sin(i64::from(j));
    null_vector_from_trig(ca, sa, cb, sb)
}

/// `(x·N)^k` for any `x` in R⁴: the homogeneous extension of a B3-type function.
pub fn eval_null_power(n: &ComplexQuaternion, k: u32, x: [f64; 4]) -> Complex64 {
    let dot: Complex64 = n.c.iter().zip(x).map(|(nm, xm)| nm * xm).sum();
    dot.powu(k)
}

/// `Phi^k_{IJ}(x) = (X·N_IJ)^k` through the R⁴ dot product.
pub fn eval_phi(mode: &ModeB3, p: &ToroidalPoint) -> Complex64 {
    let roots = RootsOfUnity::new(mode.k);
    eval_null_power(&null_vector_ij(&roots, mode.i, mode.j), mode.k, p.embedding())
}

/// `Phi^k_{IJ}` through the quaternionic scalar product `<n_IJ · q_X>^k`, with
/// `q_X` built from the toroidal form and the product as `(n q̄ + q n̄)/2`.
pub fn eval_phi_quaternionic(mode: &ModeB3, p: &ToroidalPoint) -> Complex64 {
    use crate::algebra::quaternion::scalar_product_via_products;
    let roots = RootsOfUnity::new(mode.k);
    let n = null_vector_ij(&roots, mode.i, mode.j);
    scalar_product_via_products(n, p.to_quaternion().complexify()).powu(mode.k)
}

/// Coherent-state polynomial `[X·N(a,b)]^k` at continuous angles.
pub fn eval_phi_coherent(k: u32, a: f64, b: f64, p: &ToroidalPoint) -> Complex64 {
    let n = crate::algebra::null_vector(a, b);
    scalar_product(n, p.to_quaternion().complexify()).powu(k)
}

/// Expansion coefficient `P_{k;m1,m2}` of the coherent-state polynomial on B2:
/// `[X·N(a,b)]^k = Σ P T_{k;m1,m2}(X) e^{-ia(m1+m2)} e^{ib(m2-m1)}`.
///
/// `P = 2^-k pi k! (k+1)^{-1/2} / sqrt((k/2+m1)!(k/2-m1)!(k/2+m2)!(k/2-m2)!)`,
/// evaluated as `2^-k pi (k+1)^{-1/2} sqrt(C(k, k/2+m1) C(k, k/2+m2))` with exact
/// binomials.
pub fn coeff_p(mode: &ModeB2) -> Result<f64> {
    require_even(mode.k)?;
    Ok(coeff_p_unchecked(mode))
}

fn coeff_p_unchecked(mode: &ModeB2) -> f64 {
    let k = mode.k;
    let [p1, _, p2, _] = mode.shifted();
    let binoms = binomial(k, p1) as f64 * binomial(k, p2) as f64;
    let two_pow = 0.5f64.powi(k as i32);
    two_pow * PI * binoms.sqrt() / f64::from(k + 1).sqrt()
}

/// `P_{k;m1,m2}` for every mode, in B2 index order.
pub fn p_diagonal(k: u32) -> Result<Vec<f64>> {
    require_even(k)?;
    Ok(ModeB2::all(k).iter().map(coeff_p_unchecked).collect())
}

/// A change-of-basis matrix.
///
/// `entries[(r, c)]` is the coefficient of the `from`-basis function with index
/// `c` in the expansion of the `to`-basis function with index `r`. On the B2
/// side the functions are the scaled `𝒯 = P T`.
#[derive(Debug, Clone, PartialEq)]
pub struct CoeffMatrix {
    pub k: u32,
    pub from: Basis,
    pub to: Basis,
    pub entries: CMatrix,
}

/// `𝒯_{k;m1,m2} = (k+1)^-2 Σ_{I,J} rho^{I(m1+m2) - J(m2-m1)} Phi_IJ`: rows are B2
/// modes, columns B3 modes.
pub fn t_from_phi_matrix(k: u32) -> Result<CoeffMatrix> {
    require_even(k)?;
    require_supported(k)?;
    let roots = RootsOfUnity::new(k);
    let n = (k + 1) as usize;
    let scale = 1.0 / (n * n) as f64;
    let modes = ModeB2::all(k);
    let entries = CMatrix::from_fn(n * n, n * n, |r, c| {
        let mode = &modes[r];
        let (i, j) = ((c / n) as i64, (c % n) as i64);
        roots.pow(i * i64::from(mode.ell()) - j * i64::from(mode.m())) * scale
    });
    Ok(CoeffMatrix {
        k,
        from: Basis::B3,
        to: Basis::B2,
        entries,
    })
}

/// `Phi_IJ = Σ_{m1,m2} 𝒯_{k;m1,m2} rho^{-I(m1+m2) + J(m2-m1)}`: rows are B3 modes,
/// columns B2 modes.
pub fn phi_from_t_matrix(k: u32) -> Result<CoeffMatrix> {
    require_even(k)?;
    require_supported(k)?;
    let roots = RootsOfUnity::new(k);
    let n = (k + 1) as usize;
    let modes = ModeB2::all(k);
    let entries = CMatrix::from_fn(n * n, n * n, |r, c| {
        let mode = &modes[c];
        let (i, j) = ((r / n) as i64, (r % n) as i64);
        roots.pow(-i * i64::from(mode.ell()) + j * i64::from(mode.m()))
    });
    Ok(CoeffMatrix {
        k,
        from: Basis::B2,
        to: Basis::B3,
        entries,
    })
}

/// Like [`t_from_phi_matrix`] but for the unscaled `T`: each row divided by `P`.
pub fn t_plain_from_phi_matrix(k: u32) -> Result<CoeffMatrix> {
    let mut m = t_from_phi_matrix(k)?;
    for (r, p) in p_diagonal(k)?.into_iter().enumerate() {
        let mut row = m.entries.row_mut(r);
        row /= Complex64::new(p, 0.0);
    }
    Ok(m)
}

/// Coordinates of `f = Σ v_IJ Phi_IJ` in the `𝒯` basis.
pub fn b3_to_t_coords(k: u32, v: &[Complex64]) -> Result<Vec<Complex64>> {
    check_len(k, v.len())?;
    let m = phi_from_t_matrix(k)?;
    Ok(mat_vec(&m.entries.transpose(), v))
}

/// Coordinates of `f = Σ t_m 𝒯_m` in the B3 basis.
pub fn t_to_b3_coords(k: u32, t: &[Complex64]) -> Result<Vec<Complex64>> {
    check_len(k, t.len())?;
    let m = t_from_phi_matrix(k)?;
    Ok(mat_vec(&m.entries.transpose(), t))
}

pub(crate) fn check_len(k: u32, len: usize) -> Result<()> {
    let want = dimension(k);
    if len != want {
        Err(Error::DimensionMismatch {
            expected: want,
            got: len,
        })
    } else {
        Ok(())
    }
}

/// Evaluate `Σ v_IJ Phi_IJ` at a point.
pub fn eval_b3_combination(k: u32, v: &[Complex64], p: &ToroidalPoint) -> Result<Complex64> {
    require_even(k)?;
    check_len(k, v.len())?;
    let roots = RootsOfUnity::new(k);
    let x = p.embedding();
    let n = k + 1;
    let mut acc = Complex64::new(0.0, 0.0);
    for (idx, c) in v.iter().enumerate() {
        if *c == Complex64::new(0.0, 0.0) {
            continue;
        }
        let (i, j) = (idx as u32 / n, idx as u32 % n);
        acc += c * eval_null_power(&null_vector_ij(&roots, i, j), k, x);
    }
    Ok(acc)
}

/// Evaluate `Σ t_m 𝒯_m = Σ t_m P_m T_m` at a point.
pub fn eval_t_combination(k: u32, t: &[Complex64], p: &ToroidalPoint) -> Result<Complex64> {
    check_len(k, t.len())?;
    let ps = p_diagonal(k)?;
    Ok(ModeB2::all(k)
        .iter()
        .zip(t)
        .zip(ps)
        .filter(|((_, c), _)| **c != Complex64::new(0.0, 0.0))
        .map(|((mode, c), pm)| c * pm * eval_t(mode, p))
        .sum())
}

#[derive(Serialize, Deserialize)]
struct CoeffMatrixRepr {
    k: u32,
    from: Basis,
    to: Basis,
    shape: [usize; 2],
    entries: Vec<[f64; 2]>,
}

impl CoeffMatrix {
    /// One `row,col,re,im` line per entry, row-major, with a header line.
    pub fn to_csv(&self) -> String {
        matrix_to_csv(&self.entries)
    }
}

impl Serialize for CoeffMatrix {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        CoeffMatrixRepr {
            k: self.k,
            from: self.from,
            to: self.to,
            shape: [self.entries.nrows(), self.entries.ncols()],
            entries: entries_row_major(&self.entries),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for CoeffMatrix {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let r = CoeffMatrixRepr::deserialize(d)?;
        let entries = matrix_from_row_major(r.shape, &r.entries).map_err(serde::de::Error::custom)?;
        Ok(CoeffMatrix {
            k: r.k,
            from: r.from,
            to: r.to,
            entries,
        })
    }
}
