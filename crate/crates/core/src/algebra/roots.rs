use std::f64::consts::TAU;

use num_complex::Complex64;

/// The `(k+1)`-th roots of unity `rho^n`, `rho = e^{2 i pi / (k+1)}`.
///
/// Powers are reduced modulo `k+1` before evaluation, so `rho^n` for large or
/// negative `n` carries no accumulated rounding.
#[derive(Debug, Clone)]
pub struct RootsOfUnity {
    k: u32,
    table: Vec<Complex64>,
}

impl RootsOfUnity {
    pub fn new(k: u32) -> Self {
        let n = k + 1;
        let table = (0..n)
            .map(|r| {
                let t = TAU * f64::from(r) / f64::from(n);
                Complex64::new(t.cos(), t.sin())
            })
            .collect();
        Self { k, table }
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn order(&self) -> u32 {
        self.k + 1
    }

    /// The angle `2 pi / (k+1)`.
    pub fn alpha(&self) -> f64 {
        TAU / f64::from(self.order())
    }

    pub fn rho(&self) -> Complex64 {
        self.pow(1)
    }

    pub fn residue(&self, n: i64) -> usize {
        n.rem_euclid(i64::from(self.order())) as usize
    }

    pub fn pow(&self, n: i64) -> Complex64 {
        self.table[self.residue(n)]
    }

    /// `cos(n alpha)` and `sin(n alpha)`.
    pub fn cos_sin(&self, n: i64) -> (f64, f64) {
        let z = self.pow(n);
        (z.re, z.im)
    }

    /// Closed form of `Σ_{n=0}^{k} rho^{n i}`: `k+1` when `i ≡ 0`, else zero.
    pub fn power_sum_exact(&self, i: i64) -> u32 {
        if self.residue(i) == 0 {
            self.order()
        } else {
            0
        }
    }

    /// The same sum accumulated numerically.
    pub fn power_sum(&self, i: i64) -> Complex64 {
        (0..i64::from(self.order())).map(|n| self.pow(n * i)).sum()
    }
}
