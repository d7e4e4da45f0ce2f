//! Action of SO(4) rotations on `V^k` in the null-vector basis.
//!
//! For a rotation `g` the operator `R_g f(x) = f(gx)` maps `Phi_IJ` to
//! `Σ_ij G_IJ^ij(g) Phi_ij`. The coefficients follow in closed form from four
//! scalar products of `n_IJ` with transported auxiliary null quaternions
//! ([`rotation_scalars`]); rows where that form degenerates are filled by a
//! least-squares fit on sample points ([`g_coeffs_oracle`]).
//!
//! Matrices are stored in action form: column `IJ` holds the B3 coordinates of
//! `R_g Phi_IJ`, so `M[(ij, IJ)] = G_IJ^ij` and the coordinates of `R_g f` are
//! `M v`. With this convention `M(g) M(h) = M(h∘g)`.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::algebra::{scalar_product, ComplexQuaternion, Quaternion, RootsOfUnity, Rotation};
use crate::bases::{
    check_len, dimension, eval_phi, null_vector_ij, phi_from_t_matrix, require_even, require_supported,
    t_from_phi_matrix, ModeB3,
};
use crate::linalg::{least_squares, mat_vec, CMatrix};
use crate::quad::quasi_random_points;
use crate::{Error, Result};

/// Relative size below which `A'` or `B` counts as zero.
pub const DEGENERACY_THRESHOLD: f64 = 1e-8;

/// Largest acceptable condition number of the oracle's sample matrix.
pub const ORACLE_MAX_CONDITION: f64 = 1e10;

const ORACLE_ATTEMPTS: usize = 3;

fn i_unit() -> Complex64 {
    Complex64::new(0.0, 1.0)
}

/// `alpha = 1 + i j3`.
pub fn aux_alpha() -> ComplexQuaternion {
    ComplexQuaternion::new(1.0.into(), 0.0.into(), 0.0.into(), i_unit())
}

/// `alpha-bar = 1 - i j3`.
pub fn aux_alpha_bar() -> ComplexQuaternion {
    aux_alpha().conj()
}

/// `beta = j1 - i j2`.
pub fn aux_beta() -> ComplexQuaternion {
    ComplexQuaternion::new(0.0.into(), 1.0.into(), -i_unit(), 0.0.into())
}

/// `delta = -j1 - i j2`.
pub fn aux_delta() -> ComplexQuaternion {
    ComplexQuaternion::new(0.0.into(), (-1.0).into(), -i_unit(), 0.0.into())
}

/// The four scalars attached to a rotation and a B3 index.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RotationScalars {
    pub a: Complex64,
    pub a_prime: Complex64,
    pub b: Complex64,
    pub d: Complex64,
}

impl RotationScalars {
    /// `U = B / A'`.
    pub fn u(&self) -> Complex64 {
        self.b / self.a_prime
    }

    /// `V = A / B`.
    pub fn v(&self) -> Complex64 {
        self.a / self.b
    }

    /// `A A' - B D`, which vanishes identically.
    pub fn consistency_defect(&self) -> f64 {
        (self.a * self.a_prime - self.b * self.d).norm()
    }

    /// True when `U` or `V` cannot be formed reliably.
    pub fn is_degenerate(&self) -> bool {
        let scale = [self.a, self.a_prime, self.b, self.d]
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max);
        self.a_prime.norm().min(self.b.norm()) < DEGENERACY_THRESHOLD * scale
    }
}

fn transported(g: &Rotation, x: ComplexQuaternion) -> ComplexQuaternion {
    g.q_left.complexify() * x * g.q_right.complexify()
}

/// `A = <Q_L alpha Q_R · n_IJ>`, and likewise `A'`, `B`, `D` with `alpha-bar`,
/// `beta`, `delta`.
pub fn rotation_scalars(g: &Rotation, k: u32, i: u32, j: u32) -> Result<RotationScalars> {
    ModeB3::new(k, i, j)?;
    let roots = RootsOfUnity::new(k);
    Ok(scalars_with(g, &null_vector_ij(&roots, i, j)))
}

fn scalars_with(g: &Rotation, n: &ComplexQuaternion) -> RotationScalars {
    let s = |x| scalar_product(transported(g, x), *n);
    RotationScalars {
        a: s(aux_alpha()),
        a_prime: s(aux_alpha_bar()),
        b: s(aux_beta()),
        d: s(aux_delta()),
    }
}

/// Matrix of `R_g` on `V^k` in the B3 basis.
#[derive(Debug, Clone)]
pub struct RotationCoeffs {
    pub k: u32,
    pub rotation: Rotation,
    /// Action form: `matrix[(ij, IJ)] = G_IJ^ij`.
    pub matrix: CMatrix,
    /// B3 indices `IJ` whose coefficients came from the oracle.
    pub fallback_rows: Vec<usize>,
}

impl RotationCoeffs {
    /// `G_IJ^ij`.
    pub fn coeff(&self, big_i: u32, big_j: u32, i: u32, j: u32) -> Complex64 {
        let n = (self.k + 1) as usize;
        self.matrix[(i as usize * n + j as usize, big_i as usize * n + big_j as usize)]
    }

    pub fn to_csv(&self) -> String {
        crate::linalg::matrix_to_csv(&self.matrix)
    }
}

#[derive(Serialize)]
struct RotationCoeffsRepr<'a> {
    k: u32,
    q_left: Quaternion,
    q_right: Quaternion,
    from: &'static str,
    to: &'static str,
    shape: [usize; 2],
    entries: Vec<[f64; 2]>,
    fallback_rows: &'a [usize],
}

/// Same matrix schema as [`crate::CoeffMatrix`] plus the quaternion pair. `entries` is
/// row-major over the action-form matrix, so entry `(r, c)` is `G_c^r`.
impl Serialize for RotationCoeffs {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        RotationCoeffsRepr {
            k: self.k,
            q_left: self.rotation.q_left,
            q_right: self.rotation.q_right,
            from: "B3",
            to: "B3",
            shape: [self.matrix.nrows(), self.matrix.ncols()],
            entries: crate::linalg::entries_row_major(&self.matrix),
            fallback_rows: &self.fallback_rows,
        }
        .serialize(s)
    }
}

/// Closed-form coefficients for one B3 index from its scalars:
///
/// `G_IJ^ij = A'^k/(k+1)² Σ_{A,B} rho^{-i(A+B-k)} rho^{-j(A-B)} U^A V^B`.
///
/// The double sum factors into `rho^{ik} S_U(i+j) S_V(i-j)` with
/// `S_U(r) = Σ_A (U rho^-r)^A`, `S_V(r) = Σ_B (V rho^-r)^B`, each tabulated over
/// the `k+1` residues.
fn closed_form_column(sc: &RotationScalars, roots: &RootsOfUnity) -> Vec<Complex64> {
    let k = roots.k();
    let n = (k + 1) as usize;
    let (u, v) = (sc.u(), sc.v());
    let geometric = |base: Complex64| -> Vec<Complex64> {
        (0..n)
            .map(|r| {
                let z = base * roots.pow(-(r as i64));
                let mut acc = Complex64::new(0.0, 0.0);
                let mut pw = Complex64::new(1.0, 0.0);
                for _ in 0..n {
                    acc += pw;
                    pw *= z;
                }
                acc
            })
            .collect()
    };
    let s_u = geometric(u);
    let s_v = geometric(v);
    let pref = sc.a_prime.powu(k) / (n * n) as f64;
    let mut col = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            let phase = roots.pow((i * k as usize) as i64);
            col.push(pref * phase * s_u[(i + j) % n] * s_v[(i + n - j) % n]);
        }
    }
    col
}

/// Coefficients of `R_g` at level `k` (even) from the closed form, with
/// degenerate rows taken from [`g_coeffs_oracle`].
pub fn g_coeffs(g: &Rotation, k: u32) -> Result<RotationCoeffs> {
    require_even(k)?;
    require_supported(k)?;
    let roots = RootsOfUnity::new(k);
    let dim = dimension(k);
    let n = k + 1;
    let columns: Vec<Option<Vec<Complex64>>> = (0..dim)
        .into_par_iter()
        .map(|idx| {
            let nv = null_vector_ij(&roots, idx as u32 / n, idx as u32 % n);
            let sc = scalars_with(g, &nv);
            (!sc.is_degenerate()).then(|| closed_form_column(&sc, &roots))
        })
        .collect();
    let fallback_rows: Vec<usize> = (0..dim).filter(|&c| columns[c].is_none()).collect();
    let mut matrix = CMatrix::zeros(dim, dim);
    for (c, col) in columns.iter().enumerate() {
        if let Some(col) = col {
            for (r, z) in col.iter().enumerate() {
                matrix[(r, c)] = *z;
            }
        }
    }
    if !fallback_rows.is_empty() {
        let oracle = g_coeffs_oracle(g, k)?;
        for &c in &fallback_rows {
            matrix.set_column(c, &oracle.coeffs.matrix.column(c));
        }
    }
    Ok(RotationCoeffs {
        k,
        rotation: *g,
        matrix,
        fallback_rows,
    })
}

/// Oracle result with its diagnostics.
#[derive(Debug, Clone)]
pub struct OracleFit {
    pub coeffs: RotationCoeffs,
    /// Largest entry of the sample-system residual.
    pub residual: f64,
    /// Condition number of the sample matrix actually used.
    pub condition: f64,
    pub sample_points: usize,
}

/// Least-squares fit of `Phi_IJ(g x_s) = Σ_ij G_IJ^ij Phi_ij(x_s)` over
/// `2(k+1)²` low-discrepancy points. A badly conditioned sample set is replaced
/// by the next stretch of the sequence, at most three times.
pub fn g_coeffs_oracle(g: &Rotation, k: u32) -> Result<OracleFit> {
    require_even(k)?;
    require_supported(k)?;
    let dim = dimension(k);
    let count = 2 * dim;
    let modes = ModeB3::all(k)?;
    let mut worst = 0.0f64;
    for attempt in 0..ORACLE_ATTEMPTS {
        let pts = quasi_random_points(count, attempt * count);
        let moved: Vec<_> = pts
            .iter()
            .map(|p| crate::algebra::ToroidalPoint::from_quaternion(g.apply(p.to_quaternion())))
            .collect();
        let rows: Vec<(Vec<Complex64>, Vec<Complex64>)> = pts
            .par_iter()
            .zip(moved.par_iter())
            .map(|(p, q)| {
                (
                    modes.iter().map(|m| eval_phi(m, p)).collect(),
                    modes.iter().map(|m| eval_phi(m, q)).collect(),
                )
            })
            .collect();
        let a = CMatrix::from_fn(count, dim, |s, c| rows[s].0[c]);
        let b = CMatrix::from_fn(count, dim, |s, c| rows[s].1[c]);
        let ls = least_squares(&a, &b);
        if ls.condition <= ORACLE_MAX_CONDITION {
            return Ok(OracleFit {
                coeffs: RotationCoeffs {
                    k,
                    rotation: *g,
                    matrix: ls.solution,
                    fallback_rows: Vec::new(),
                },
                residual: ls.residual,
                condition: ls.condition,
                sample_points: count,
            });
        }
        worst = worst.max(ls.condition);
    }
    Err(Error::SingularOracle {
        attempts: ORACLE_ATTEMPTS,
        condition: worst,
    })
}

/// B3 coordinates of `R_g f` from those of `f`.
pub fn act_on_coeffs(g: &RotationCoeffs, v: &[Complex64]) -> Result<Vec<Complex64>> {
    check_len(g.k, v.len())?;
    Ok(mat_vec(&g.matrix, v))
}

/// The operator of `g` on `𝒯` coordinates: `t ↦ E M F t` where `F` maps `𝒯`
/// coordinates to B3 coordinates and `E` maps back.
pub fn to_b2_frame(g: &RotationCoeffs) -> Result<CMatrix> {
    let to_b3 = t_from_phi_matrix(g.k)?.entries.transpose();
    let to_t = phi_from_t_matrix(g.k)?.entries.transpose();
    Ok(to_t * &g.matrix * to_b3)
}
