//! Self-check report: every closed form in the crate against its numerical
//! counterpart at one level `k`, grouped by module.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::algebra::{null_vector, scalar_product, Quat, Quaternion, RootsOfUnity, Rotation, ToroidalPoint};
use crate::bases::{
    coeff_p, eval_phi, eval_phi_coherent, eval_phi_quaternionic, eval_t, phi_from_t_matrix, require_even,
    t_from_phi_matrix, ModeB2, ModeB3,
};
use crate::linalg::{identity, max_abs_diff, numerical_rank, CMatrix};
use crate::quad::{
    b2_samples, eigenfunction_residual, harmonicity_residual, project_onto_level, quasi_random_points, rule_for_level,
};
use crate::quotients::{invariant_projector, lens_modes, prism_multiplicity, GroupSpec};
use crate::rotations::{g_coeffs, g_coeffs_oracle, rotation_scalars};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Algebra,
    Bases,
    Quad,
    Rotations,
    Quotients,
}

impl Suite {
    pub const ALL: [Suite; 5] = [Suite::Algebra, Suite::Bases, Suite::Quad, Suite::Rotations, Suite::Quotients];

    /// Parses one suite name, or `all`.
    pub fn parse_list(s: &str) -> Result<Vec<Suite>> {
        if s == "all" {
            return Ok(Self::ALL.to_vec());
        }
        s.split(',').map(|t| t.trim().parse()).collect()
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "algebra" => Ok(Suite::Algebra),
            "bases" => Ok(Suite::Bases),
            "quad" => Ok(Suite::Quad),
            "rotations" => Ok(Suite::Rotations),
            "quotients" => Ok(Suite::Quotients),
            _ => Err(Error::Parse(format!("unknown suite {s:?}"))),
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = serde_json::to_value(self).expect("unit variant");
        f.write_str(s.as_str().expect("string"))
    }
}

/// Tolerances used by the checks; the defaults are the documented ones.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Tolerances {
    /// Exact algebraic identities.
    pub algebra: f64,
    /// Gram-matrix orthogonality and constancy.
    pub gram: f64,
    /// Change-of-basis products and pointwise reconstructions.
    pub transform: f64,
    /// Residual of a function outside its eigenspace.
    pub membership: f64,
    /// Relative error of the expansion coefficients.
    pub coefficient: f64,
    /// Finite-difference Laplacian residual.
    pub harmonic: f64,
    /// Finite-difference step.
    pub fd_step: f64,
    /// Rotation matrices: closed form vs oracle, composition, isometry.
    pub rotation: f64,
    /// Projector idempotency and invariance.
    pub invariance: f64,
    /// Relative singular-value cut for ranks.
    pub rank: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            algebra: 1e-12,
            gram: 1e-10,
            transform: 1e-9,
            membership: 1e-9,
            coefficient: 1e-8,
            harmonic: 1e-5,
            fd_step: 1e-3,
            rotation: 1e-8,
            invariance: 1e-8,
            rank: crate::quotients::RANK_TOLERANCE,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub suite: Suite,
    pub name: String,
    pub value: f64,
    pub tolerance: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub k: u32,
    pub seed: u64,
    pub tolerances: Tolerances,
    pub checks: Vec<Check>,
    pub passed: bool,
}

impl Report {
    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }
}

struct Recorder {
    suite: Suite,
    checks: Vec<Check>,
}

impl Recorder {
    fn check(&mut self, name: &str, value: f64, tolerance: f64) {
        self.checks.push(Check {
            suite: self.suite,
            name: name.to_string(),
            value,
            tolerance,
            passed: value < tolerance,
        });
    }

    /// Integer agreement, reported as `|a - b|` against 0.5.
    fn count(&mut self, name: &str, a: usize, b: usize) {
        self.check(name, a.abs_diff(b) as f64, 0.5);
    }
}

fn random_rotation(rng: &mut ChaCha8Rng) -> Rotation {
    let mut q = || Quat {
        c: [0; 4].map(|_| rng.gen_range(-1.0..1.0)),
    };
    Rotation::normalized(q(), q()).expect("nonzero")
}

fn random_point(rng: &mut ChaCha8Rng) -> ToroidalPoint {
    let u: f64 = rng.gen_range(-1.0..1.0);
    ToroidalPoint {
        chi: u.acos() / 2.0,
        theta: rng.gen_range(0.0..std::f64::consts::TAU),
        phi: rng.gen_range(0.0..std::f64::consts::TAU),
    }
}

/// Runs the selected suites at level `k` (even).
pub fn run(k: u32, suites: &[Suite], tol: &Tolerances, seed: u64) -> Result<Report> {
    require_even(k)?;
    crate::bases::require_supported(k)?;
    let mut checks = Vec::new();
    for &suite in suites {
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ (suite as u64).wrapping_mul(0x9e37_79b9));
        let mut rec = Recorder {
            suite,
            checks: Vec::new(),
        };
        match suite {
            Suite::Algebra => algebra_suite(&mut rec, k, tol, &mut rng),
            Suite::Bases => bases_suite(&mut rec, k, tol, &mut rng)?,
            Suite::Quad => quad_suite(&mut rec, k, tol, &mut rng),
            Suite::Rotations => rotations_suite(&mut rec, k, tol, &mut rng)?,
            Suite::Quotients => quotients_suite(&mut rec, k, tol)?,
        }
        checks.extend(rec.checks);
    }
    let passed = checks.iter().all(|c| c.passed);
    Ok(Report {
        k,
        seed,
        tolerances: *tol,
        checks,
        passed,
    })
}

fn algebra_suite(rec: &mut Recorder, k: u32, tol: &Tolerances, rng: &mut ChaCha8Rng) {
    let roots = RootsOfUnity::new(k);
    let n = i64::from(k) + 1;
    let sum_defect = (0..n)
        .map(|i| (roots.power_sum(i) - Complex64::new(f64::from(roots.power_sum_exact(i)), 0.0)).norm())
        .fold(0.0, f64::max);
    rec.check("roots of unity power sums", sum_defect, 1e-10);

    let mut assoc = 0.0f64;
    let mut orth = 0.0f64;
    for _ in 0..100 {
        let mut q = || Quaternion {
            c: [0; 4].map(|_| rng.gen_range(-2.0..2.0)),
        };
        let (a, b, c) = (q(), q(), q());
        assoc = assoc.max(((a * b) * c).max_abs_diff(a * (b * c)));
        let m = random_rotation(rng).to_matrix();
        for i in 0..4 {
            for j in 0..4 {
                let dot: f64 = (0..4).map(|r| m[r][i] * m[r][j]).sum();
                orth = orth.max((dot - if i == j { 1.0 } else { 0.0 }).abs());
            }
        }
    }
    rec.check("quaternion associativity", assoc, tol.algebra);
    rec.check("rotation matrix orthogonality", orth, tol.algebra);

    let mut null = 0.0f64;
    for _ in 0..100 {
        let nv = null_vector(rng.gen_range(-10.0..10.0), rng.gen_range(-10.0..10.0));
        null = null.max(scalar_product(nv, nv).norm());
    }
    rec.check("null vectors are null", null, tol.algebra);

    let mut aux = 0.0f64;
    for i in 0..=k {
        for j in 0..=k {
            let sc = rotation_scalars(&Rotation::identity(), k, i, j).expect("valid index");
            let (i, j) = (i64::from(i), i64::from(j));
            for (got, want) in [
                (sc.a, roots.pow(i)),
                (sc.a_prime, roots.pow(-i)),
                (sc.b, roots.pow(j)),
                (sc.d, roots.pow(-j)),
            ] {
                aux = aux.max((got - want).norm());
            }
        }
    }
    rec.check("auxiliary quaternion scalar products", aux, tol.algebra);
}

fn bases_suite(rec: &mut Recorder, k: u32, tol: &Tolerances, rng: &mut ChaCha8Rng) -> Result<()> {
    let rule = rule_for_level(k);
    let gram = rule.gram(&b2_samples(k, &rule));
    let dim = gram.nrows();
    let diag: Vec<f64> = (0..dim).map(|i| gram[(i, i)].re).collect();
    let spread = diag.iter().copied().fold(f64::MIN, f64::max) - diag.iter().copied().fold(f64::MAX, f64::min);
    let mut off = 0.0f64;
    for r in 0..dim {
        for c in 0..dim {
            if r != c {
                off = off.max(gram[(r, c)].norm());
            }
        }
    }
    rec.check("B2 Gram off-diagonal", off, tol.gram);
    rec.check("B2 Gram diagonal spread", spread, tol.gram);

    let fwd = t_from_phi_matrix(k)?.entries;
    let back = phi_from_t_matrix(k)?.entries;
    rec.check("change of basis round trip", max_abs_diff(&(&fwd * &back), &identity(dim)), tol.transform);

    let modes = ModeB2::all(k);
    let b3 = ModeB3::all(k)?;
    let ps: Vec<f64> = modes.iter().map(coeff_p).collect::<Result<_>>()?;
    let mut pointwise = 0.0f64;
    let mut paths = 0.0f64;
    for _ in 0..20 {
        let p = random_point(rng);
        let phis: Vec<Complex64> = b3.iter().map(|m| eval_phi(m, &p)).collect();
        for (r, mode) in modes.iter().enumerate() {
            let lhs: Complex64 = (0..dim).map(|c| fwd[(r, c)] * phis[c]).sum();
            pointwise = pointwise.max((lhs - eval_t(mode, &p) * ps[r]).norm());
        }
        for m in &b3 {
            paths = paths.max((eval_phi(m, &p) - eval_phi_quaternionic(m, &p)).norm());
        }
    }
    rec.check("pointwise reconstruction of T from Phi", pointwise, tol.transform);
    rec.check("Phi by dot product vs quaternion product", paths, tol.algebra * 10.0);

    let (a, b) = (rng.gen_range(0.0..6.3), rng.gen_range(0.0..6.3));
    let proj = project_onto_level(|p| eval_phi_coherent(k, a, b, p), k, &rule);
    let mut rel = 0.0f64;
    for (mode, (c, pm)) in modes.iter().zip(proj.coeffs.iter().zip(&ps)) {
        let phase = Complex64::from_polar(1.0, -a * f64::from(mode.ell()) + b * f64::from(mode.m()));
        rel = rel.max((c / phase - pm).norm() / pm);
    }
    rec.check("expansion coefficients vs projection", rel, tol.coefficient);
    Ok(())
}

fn quad_suite(rec: &mut Recorder, k: u32, tol: &Tolerances, rng: &mut ChaCha8Rng) {
    let rule = rule_for_level(k);
    let vol = rule.integrate(|_| Complex64::new(1.0, 0.0));
    rec.check(
        "volume",
        (vol - 2.0 * std::f64::consts::PI.powi(2)).norm(),
        tol.algebra * 10.0,
    );
    let mut harm = 0.0f64;
    let mut member = 0.0f64;
    for _ in 0..20 {
        let (a, b) = (rng.gen_range(-10.0..10.0), rng.gen_range(-10.0..10.0));
        harm = harm.max(harmonicity_residual(&null_vector(a, b), k, tol.fd_step));
        member = member.max(project_onto_level(|p| eval_phi_coherent(k, a, b, p), k, &rule).residual);
    }
    rec.check("harmonicity of null-vector powers", harm, tol.harmonic);
    rec.check("null-vector powers lie in V^k", member, tol.membership);
    let coeffs: Vec<Complex64> = ModeB2::all(k)
        .iter()
        .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
        .collect();
    let f = |p: &ToroidalPoint| -> Complex64 {
        ModeB2::all(k).iter().zip(&coeffs).map(|(m, c)| c * eval_t(m, p)).sum()
    };
    rec.check("B2 combination is an eigenfunction", eigenfunction_residual(f, k, tol.fd_step), tol.harmonic);
}

fn rotations_suite(rec: &mut Recorder, k: u32, tol: &Tolerances, rng: &mut ChaCha8Rng) -> Result<()> {
    let dim = crate::bases::dimension(k);
    rec.check(
        "identity rotation",
        max_abs_diff(&g_coeffs(&Rotation::identity(), k)?.matrix, &identity(dim)),
        tol.rotation,
    );
    let mut vs_oracle = 0.0f64;
    let mut oracle_residual = 0.0f64;
    let mut consistency = 0.0f64;
    for _ in 0..3 {
        let g = random_rotation(rng);
        let oracle = g_coeffs_oracle(&g, k)?;
        vs_oracle = vs_oracle.max(max_abs_diff(&g_coeffs(&g, k)?.matrix, &oracle.coeffs.matrix));
        oracle_residual = oracle_residual.max(oracle.residual);
        for idx in 0..dim {
            let m = ModeB3::from_index(k, idx)?;
            consistency = consistency.max(rotation_scalars(&g, k, m.i, m.j)?.consistency_defect());
        }
    }
    rec.check("closed form vs least-squares oracle", vs_oracle, tol.rotation);
    rec.check("oracle residual", oracle_residual, tol.rotation);
    rec.check("scalar identity A A' = B D", consistency, tol.algebra);

    let (g, h) = (random_rotation(rng), random_rotation(rng));
    let mg = g_coeffs(&g, k)?.matrix;
    let mh = g_coeffs(&h, k)?.matrix;
    let mhg = g_coeffs(&h.compose(&g), k)?.matrix;
    rec.check("composition", max_abs_diff(&(&mg * &mh), &mhg), tol.rotation);
    let minv = g_coeffs(&g.inverse(), k)?.matrix;
    rec.check("inverse", max_abs_diff(&(&mg * minv), &identity(dim)), tol.rotation);

    let rule = rule_for_level(k);
    let b3 = ModeB3::all(k)?;
    let samples = CMatrix::from_fn(rule.len(), dim, |s, c| eval_phi(&b3[c], &rule.nodes[s]));
    let gamma = rule.gram(&samples);
    let moved = mg.adjoint() * &gamma * &mg;
    rec.check("Gram preservation", max_abs_diff(&moved, &gamma), tol.rotation);
    Ok(())
}

fn quotients_suite(rec: &mut Recorder, k: u32, tol: &Tolerances) -> Result<()> {
    for (p, q) in [(3u32, 1u32), (5, 1), (5, 2), (7, 3)] {
        let group = GroupSpec::lens(p, q)?.group()?;
        let proj = invariant_projector(&group, k)?;
        rec.count(
            &format!("lens L({p},{q}) projector rank vs mode count"),
            numerical_rank(&proj, tol.rank),
            lens_modes(p, q, k)?.len(),
        );
    }
    for big_p in [2u32, 3] {
        let group = GroupSpec::prism(big_p)?.group()?;
        let proj = invariant_projector(&group, k)?;
        rec.count(
            &format!("prism P={big_p} projector rank vs counting formula"),
            numerical_rank(&proj, tol.rank),
            prism_multiplicity(big_p, k) as usize,
        );
        rec.check(
            &format!("prism P={big_p} projector idempotency"),
            max_abs_diff(&(&proj * &proj), &proj),
            tol.invariance,
        );
        let mut commute = 0.0f64;
        for g in &group.elements {
            let m = g_coeffs(g, k)?.matrix;
            commute = commute.max(max_abs_diff(&(&proj * &m), &(&m * &proj)));
        }
        rec.check(&format!("prism P={big_p} projector commutes with group"), commute, tol.invariance);
    }
    // pointwise invariance of the lens basis for one space
    let space = GroupSpec::lens(5, 2)?;
    let sub = crate::quotients::invariant_subspace(&space, k, tol.rank)?;
    let g = crate::quotients::lens_rotation(5, 2)?;
    let mut defect = 0.0f64;
    for p in quasi_random_points(20, 7) {
        let gp = ToroidalPoint::from_quaternion(g.apply(p.to_quaternion()));
        for v in sub.basis_b3.iter().flatten() {
            let a = crate::bases::eval_b3_combination(k, v, &p)?;
            let b = crate::bases::eval_b3_combination(k, v, &gp)?;
            defect = defect.max((a - b).norm());
        }
    }
    rec.check("lens L(5,2) basis pointwise invariance", defect, tol.transform);
    Ok(())
}
