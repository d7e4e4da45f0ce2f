use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// Quaternion `c0 j0 + c1 j1 + c2 j2 + c3 j3` with coefficients in `T`.
///
/// `j0 = 1` and the units obey `j1 j2 = j3` (cyclic), `ji² = -1`. With `T = f64`
/// this is an ordinary quaternion; with `T = Complex64` it is a complex
/// quaternion, whose imaginary unit `i` commutes with every `j_mu`.
///
/// Serializes as the bare coefficient array `[c0, c1, c2, c3]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Quat<T> {
    pub c: [T; 4],
}

pub type Quaternion = Quat<f64>;
pub type ComplexQuaternion = Quat<Complex64>;

impl<T> Quat<T> {
    pub const fn new(c0: T, c1: T, c2: T, c3: T) -> Self {
        Self { c: [c0, c1, c2, c3] }
    }
}

impl<T> Quat<T>
where
    T: Copy + Add<Output = T> + Sub<Output = T> + Mul<Output = T> + Neg<Output = T>,
{
    /// Quaternionic conjugate `q̄ = c0 - ci ji`.
    pub fn conj(self) -> Self {
        let [a, b, c, d] = self.c;
        Self::new(a, -b, -c, -d)
    }

    pub fn scale(self, s: T) -> Self {
        Self { c: self.c.map(|x| x * s) }
    }

    /// Bilinear sum of squared coefficients; equals the scalar part of `q q̄`.
    pub fn norm_sqr(self) -> T {
        let [a, b, c, d] = self.c;
        a * a + b * b + c * c + d * d
    }

    pub fn scalar_part(self) -> T {
        self.c[0]
    }
}

impl<T> Add for Quat<T>
where
    T: Copy + Add<Output = T>,
{
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        let [a, b, c, d] = self.c;
        let [e, f, g, h] = rhs.c;
        Self::new(a + e, b + f, c + g, d + h)
    }
}

impl<T> Sub for Quat<T>
where
    T: Copy + Sub<Output = T>,
{
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        let [a, b, c, d] = self.c;
        let [e, f, g, h] = rhs.c;
        Self::new(a - e, b - f, c - g, d - h)
    }
}

impl<T> Neg for Quat<T>
where
    T: Copy + Neg<Output = T>,
{
    type Output = Self;
    fn neg(self) -> Self {
        Self { c: self.c.map(|x| -x) }
    }
}

/// Hamilton product.
impl<T> Mul for Quat<T>
where
    T: Copy + Add<Output = T> + Sub<Output = T> + Mul<Output = T>,
{
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        let [a, b, c, d] = self.c;
        let [e, f, g, h] = rhs.c;
        Self::new(
            a * e - b * f - c * g - d * h,
            a * f + b * e + c * h - d * g,
            a * g - b * h + c * e + d * f,
            a * h + b * g - c * f + d * e,
        )
    }
}

impl Quaternion {
    pub const ONE: Self = Self::new(1.0, 0.0, 0.0, 0.0);

    /// Basis unit `j_mu`, `mu` in `0..4`.
    pub fn unit(mu: usize) -> Self {
        let mut c = [0.0; 4];
        c[mu] = 1.0;
        Self { c }
    }

    /// `cos t + j3 sin t`, the quaternionic analogue of `e^{it}`.
    pub fn exp_j3(t: f64) -> Self {
        Self::new(t.cos(), 0.0, 0.0, t.sin())
    }

    pub fn norm(self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn normalized(self) -> Self {
        self.scale(1.0 / self.norm())
    }

    pub fn dot(self, other: Self) -> f64 {
        self.c.iter().zip(other.c).map(|(a, b)| a * b).sum()
    }

    pub fn complexify(self) -> ComplexQuaternion {
        Quat {
            c: self.c.map(|x| Complex64::new(x, 0.0)),
        }
    }

    pub fn max_abs_diff(self, other: Self) -> f64 {
        self.c
            .iter()
            .zip(other.c)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

impl ComplexQuaternion {
    /// Build `re + i im` from two real quaternions.
    pub fn from_parts(re: Quaternion, im: Quaternion) -> Self {
        let mut c = [Complex64::new(0.0, 0.0); 4];
        for (k, slot) in c.iter_mut().enumerate() {
            *slot = Complex64::new(re.c[k], im.c[k]);
        }
        Self { c }
    }

    /// Complex conjugation (star) of every coefficient; distinct from the
    /// quaternionic conjugate [`Quat::conj`].
    pub fn star(self) -> Self {
        Self {
            c: self.c.map(|z| z.conj()),
        }
    }

    /// Multiplication by the commuting imaginary unit `i`.
    pub fn mul_i(self) -> Self {
        self.scale(Complex64::i())
    }

    pub fn re(self) -> Quaternion {
        Quat { c: self.c.map(|z| z.re) }
    }

    pub fn im(self) -> Quaternion {
        Quat { c: self.c.map(|z| z.im) }
    }

    pub fn max_abs_diff(self, other: Self) -> f64 {
        self.c
            .iter()
            .zip(other.c)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

impl From<Quaternion> for ComplexQuaternion {
    fn from(q: Quaternion) -> Self {
        q.complexify()
    }
}

/// Symmetric bilinear (not Hermitian) scalar product `<a·b> = Σ a_mu b_mu`.
pub fn scalar_product(a: ComplexQuaternion, b: ComplexQuaternion) -> Complex64 {
    a.c.iter().zip(b.c).map(|(x, y)| x * y).sum()
}

/// The same scalar product through quaternion products: the scalar part of
/// `(a b̄ + b ā) / 2`.
pub fn scalar_product_via_products(a: ComplexQuaternion, b: ComplexQuaternion) -> Complex64 {
    ((a * b.conj() + b * a.conj()).scale(Complex64::new(0.5, 0.0))).scalar_part()
}

/// Null vector `N(a, b) = (cos a, i sin b, i cos b, sin a)`.
pub fn null_vector(a: f64, b: f64) -> ComplexQuaternion {
    null_vector_from_trig(a.cos(), a.sin(), b.cos(), b.sin())
}

pub(crate) fn null_vector_from_trig(cos_a: f64, sin_a: f64, cos_b: f64, sin_b: f64) -> ComplexQuaternion {
    Quat::new(
        Complex64::new(cos_a, 0.0),
        Complex64::new(0.0, sin_b),
        Complex64::new(0.0, cos_b),
        Complex64::new(sin_a, 0.0),
    )
}
