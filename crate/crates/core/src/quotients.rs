//! Spherical space forms `S³/Γ`: holonomy groups, invariant projectors, and the
//! eigenmodes and multiplicities of lens and prism spaces.
//!
//! The eigenmodes of `S³/Γ` at level `k` are the `Γ`-invariant elements of `V^k`.
//! For even `k` they are found by averaging the B3 rotation matrices over the
//! group. Lens spaces act diagonally on B2 and are handled there for every `k`;
//! prism spaces also have an explicit basis in `𝒯` coordinates.

use std::f64::consts::{PI, TAU};
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::algebra::{Quaternion, Rotation};
use crate::bases::{b3_to_t_coords, dimension, require_even, require_supported, ModeB2};
use crate::linalg::{column_space, numerical_rank, CMatrix};
use crate::rotations::g_coeffs;
use crate::{Error, Result};

/// Singular values below this fraction of the largest count as zero.
pub const RANK_TOLERANCE: f64 = 1e-6;

/// Default bound for [`close_group`].
pub const DEFAULT_MAX_ORDER: usize = 1000;

const DEDUP_TOL: f64 = 1e-9;

/// A holonomy group given by name or by generators.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum GroupSpec {
    Lens { p: u32, q: u32 },
    Prism { order_param: u32 },
    Custom { generators: Vec<Rotation> },
}

#[derive(Deserialize)]
struct CustomFile {
    generators: Vec<RawRotation>,
}

#[derive(Deserialize)]
struct RawRotation {
    q_left: [f64; 4],
    q_right: [f64; 4],
}

impl GroupSpec {
    pub fn lens(p: u32, q: u32) -> Result<Self> {
        check_lens(p, q)?;
        Ok(GroupSpec::Lens { p, q })
    }

    pub fn prism(order_param: u32) -> Result<Self> {
        if order_param < 2 {
            return Err(Error::InvalidGroup(format!("prism requires P >= 2 (got {order_param})")));
        }
        Ok(GroupSpec::Prism { order_param })
    }

    /// Reads `{"generators": [{"q_left": [..], "q_right": [..]}, ...]}`.
    pub fn from_json(text: &str) -> Result<Self> {
        let file: CustomFile = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        if file.generators.is_empty() {
            return Err(Error::InvalidGroup("no generators".into()));
        }
        let generators = file
            .generators
            .into_iter()
            .map(|r| Rotation::new(Quaternion { c: r.q_left }, Quaternion { c: r.q_right }))
            .collect::<Result<Vec<_>>>()?;
        Ok(GroupSpec::Custom { generators })
    }

    pub fn generators(&self) -> Result<Vec<Rotation>> {
        match self {
            GroupSpec::Lens { p, q } => Ok(vec![lens_rotation(*p, *q)?]),
            GroupSpec::Prism { order_param } => {
                let (a, b) = prism_generators(*order_param)?;
                Ok(vec![a, b])
            }
            GroupSpec::Custom { generators } => Ok(generators.clone()),
        }
    }

    pub fn group(&self) -> Result<FiniteGroup> {
        close_group(&self.generators()?, DEFAULT_MAX_ORDER)
    }
}

/// `lens:p,q` or `prism:P`.
impl FromStr for GroupSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Parse(format!("unrecognized space {s:?}; expected lens:p,q or prism:P"));
        let (kind, args) = s.split_once(':').ok_or_else(bad)?;
        let nums = args
            .split(',')
            .map(|t| t.trim().parse::<u32>().map_err(|_| bad()))
            .collect::<Result<Vec<_>>>()?;
        match (kind.trim(), nums.as_slice()) {
            ("lens", [p, q]) => GroupSpec::lens(*p, *q),
            ("prism", [n]) => GroupSpec::prism(*n),
            _ => Err(bad()),
        }
    }
}

impl fmt::Display for GroupSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GroupSpec::Lens { p, q } => write!(f, "lens:{p},{q}"),
            GroupSpec::Prism { order_param } => write!(f, "prism:{order_param}"),
            GroupSpec::Custom { generators } => write!(f, "custom({} generators)", generators.len()),
        }
    }
}

fn gcd(a: u32, b: u32) -> u32 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn check_lens(p: u32, q: u32) -> Result<()> {
    if q == 0 || q >= p || gcd(p, q) != 1 {
        return Err(Error::NotCoprime { p, q });
    }
    Ok(())
}

/// The rotation `theta ↦ theta + psi1`, `phi ↦ phi + psi2`:
/// `Q_L = w1 w2`, `Q_R = w1 / w2` with `w = cos(psi/2) + j3 sin(psi/2)`.
pub fn torus_rotation(psi1: f64, psi2: f64) -> Rotation {
    let w1 = Quaternion::exp_j3(psi1 / 2.0);
    let w2 = Quaternion::exp_j3(psi2 / 2.0);
    Rotation {
        q_left: w1 * w2,
        q_right: w1 * w2.conj(),
    }
}

/// Generator of `L(p, q)`: `psi1 = 2 pi/p`, `psi2 = 2 pi q/p`.
pub fn lens_rotation(p: u32, q: u32) -> Result<Rotation> {
    check_lens(p, q)?;
    let p = f64::from(p);
    Ok(torus_rotation(TAU / p, TAU * f64::from(q) / p))
}

/// The two generators of the prism group of order `4P`: the single action
/// `(e^{j3 pi/P}, 1)` and `(-j1, 1)`.
pub fn prism_generators(order_param: u32) -> Result<(Rotation, Rotation)> {
    GroupSpec::prism(order_param)?;
    let first = torus_rotation(PI / f64::from(order_param), PI / f64::from(order_param));
    let second = Rotation {
        q_left: -Quaternion::unit(1),
        q_right: Quaternion::ONE,
    };
    Ok((first, second))
}

/// A finite subgroup of SO(4), one canonical quaternion pair per element.
#[derive(Debug, Clone, Serialize)]
pub struct FiniteGroup {
    pub elements: Vec<Rotation>,
}

impl FiniteGroup {
    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn contains(&self, g: &Rotation) -> bool {
        self.elements.iter().any(|e| e.same_element(g, DEDUP_TOL))
    }

    /// Whether `x ↦ -x` is in the group. Then no odd-level mode is invariant.
    pub fn contains_antipodal(&self) -> bool {
        self.contains(&Rotation {
            q_left: Quaternion::ONE,
            q_right: -Quaternion::ONE,
        })
    }
}

/// Breadth-first closure of `generators` under composition.
pub fn close_group(generators: &[Rotation], max_order: usize) -> Result<FiniteGroup> {
    let mut elements = vec![Rotation::identity()];
    let mut frontier = 0;
    while frontier < elements.len() {
        let current = elements[frontier];
        frontier += 1;
        for s in generators {
            let next = s.compose(&current).canonical();
            if !elements.iter().any(|e| e.same_element(&next, DEDUP_TOL)) {
                if elements.len() >= max_order {
                    return Err(Error::GroupTooLarge(max_order));
                }
                elements.push(next);
            }
        }
    }
    Ok(FiniteGroup { elements })
}

/// Group average `(1/|Γ|) Σ_g M(g)` of the B3 rotation matrices (even `k`).
pub fn invariant_projector(group: &FiniteGroup, k: u32) -> Result<CMatrix> {
    require_even(k)?;
    require_supported(k)?;
    let mats = group
        .elements
        .par_iter()
        .map(|g| g_coeffs(g, k).map(|c| c.matrix))
        .collect::<Result<Vec<_>>>()?;
    // summed in element order so that the result does not depend on threading
    let dim = dimension(k);
    let mut acc = CMatrix::zeros(dim, dim);
    for m in &mats {
        acc += m;
    }
    Ok(acc / Complex64::new(group.order() as f64, 0.0))
}

/// Diagonal of the lens-group average on B2, valid for every `k`:
/// `(1/p) Σ_n e^{2 pi i n (l + q m)/p}`, which is 1 or 0.
pub fn lens_projector_b2(p: u32, q: u32, k: u32) -> Result<Vec<f64>> {
    check_lens(p, q)?;
    Ok(ModeB2::all(k)
        .iter()
        .map(|m| if lens_condition(m, p, q) { 1.0 } else { 0.0 })
        .collect())
}

fn lens_condition(mode: &ModeB2, p: u32, q: u32) -> bool {
    let v = i64::from(mode.ell()) + i64::from(q) * i64::from(mode.m());
    v.rem_euclid(i64::from(p)) == 0
}

/// B2 modes with `m1 + m2 + q(m2 - m1) ≡ 0 (mod p)`.
pub fn lens_modes(p: u32, q: u32, k: u32) -> Result<Vec<ModeB2>> {
    check_lens(p, q)?;
    Ok(ModeB2::all(k).into_iter().filter(|m| lens_condition(m, p, q)).collect())
}

/// Explicit prism-invariant vectors in `𝒯` coordinates: for each `m1` and each
/// `m2 > 0` with `m2 ≡ 0 (mod P)`, `𝒯_{m1,m2} + (-1)^{m2+k/2} 𝒯_{m1,-m2}`, and
/// `𝒯_{m1,0}` when `k/2` is even. Empty for odd `k`.
pub fn prism_modes(order_param: u32, k: u32) -> Result<Vec<Vec<Complex64>>> {
    GroupSpec::prism(order_param)?;
    if k % 2 == 1 {
        return Ok(Vec::new());
    }
    let dim = dimension(k);
    let half = k as i32 / 2;
    let mut out = Vec::new();
    for mode in ModeB2::all(k) {
        let m2 = mode.m2_doubled() / 2;
        if m2 < 0 || m2 % order_param as i32 != 0 {
            continue;
        }
        let mut v = vec![Complex64::new(0.0, 0.0); dim];
        if m2 == 0 {
            if half % 2 != 0 {
                continue;
            }
            v[mode.index()] = Complex64::new(1.0, 0.0);
        } else {
            let sign = if (m2 + half) % 2 == 0 { 1.0 } else { -1.0 };
            v[mode.index()] = Complex64::new(1.0, 0.0);
            v[mode.flip_m2().index()] = Complex64::new(sign, 0.0);
        }
        out.push(v);
    }
    Ok(out)
}

/// `(k+1)(⌊k/2P⌋ + [k/2 even])` for even `k`, 0 for odd `k`: the size of
/// [`prism_modes`].
pub fn prism_multiplicity(order_param: u32, k: u32) -> u64 {
    if k % 2 == 1 {
        return 0;
    }
    let k = u64::from(k);
    let extra = u64::from((k / 2) % 2 == 0);
    (k + 1) * (k / (2 * u64::from(order_param)) + extra)
}

/// The commonly quoted prism formula: `(k+1)(1 + ⌊k/2P⌋)` for even `k` and
/// `(k+1)⌊k/2P⌋` for odd `k`. It disagrees with the invariant count when `k/2`
/// is odd, and at odd `k`.
pub fn prism_multiplicity_quoted(order_param: u32, k: u32) -> u64 {
    let floor = u64::from(k) / (2 * u64::from(order_param));
    let k = u64::from(k);
    if k % 2 == 0 {
        (k + 1) * (1 + floor)
    } else {
        (k + 1) * floor
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    /// Trivial level: only constants.
    Constant,
    LensCondition,
    PrismCounting,
    /// Odd level with `-1` in the group.
    Antipodal,
    ProjectorRank,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Multiplicity {
    pub k: u32,
    pub value: u64,
    pub method: Method,
    /// Quoted closed form where one exists (prism only).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub quoted_formula: Option<u64>,
    /// True when the quoted formula differs from `value`.
    pub flagged: bool,
}

/// Dimension of the invariant subspace of `V^k`.
pub fn multiplicity(space: &GroupSpec, k: u32) -> Result<Multiplicity> {
    let plain = |value, method| Multiplicity {
        k,
        value,
        method,
        quoted_formula: None,
        flagged: false,
    };
    if k == 0 {
        space.generators()?;
        return Ok(plain(1, Method::Constant));
    }
    match space {
        GroupSpec::Lens { p, q } => Ok(plain(lens_modes(*p, *q, k)?.len() as u64, Method::LensCondition)),
        GroupSpec::Prism { order_param } => {
            let value = prism_multiplicity(*order_param, k);
            let quoted = prism_multiplicity_quoted(*order_param, k);
            Ok(Multiplicity {
                k,
                value,
                method: Method::PrismCounting,
                quoted_formula: Some(quoted),
                flagged: quoted != value,
            })
        }
        GroupSpec::Custom { .. } => {
            let group = space.group()?;
            if k % 2 == 1 {
                return if group.contains_antipodal() {
                    Ok(plain(0, Method::Antipodal))
                } else {
                    Err(Error::OddLevel(k))
                };
            }
            let proj = invariant_projector(&group, k)?;
            Ok(plain(numerical_rank(&proj, RANK_TOLERANCE) as u64, Method::ProjectorRank))
        }
    }
}

/// Orthonormal basis of the invariant subspace.
#[derive(Debug, Clone)]
pub struct InvariantSubspace {
    pub k: u32,
    pub group: GroupSpec,
    pub dimension: usize,
    /// B3 coordinates; `None` at odd `k`.
    pub basis_b3: Option<Vec<Vec<Complex64>>>,
    /// `𝒯` coordinates at even `k`; plain `T` coordinates at odd `k`, where
    /// `𝒯 = P T` is not defined.
    pub basis_b2: Vec<Vec<Complex64>>,
    /// Largest `|M(g) v - v|` over group elements and basis vectors (B3 route).
    pub invariance_defect: Option<f64>,
}

/// Invariant subspace of `V^k` under `space`. Even `k` goes through the B3
/// projector; odd `k` is supported for lens spaces (diagonal on B2) and for
/// groups containing `-1` (empty).
pub fn invariant_subspace(space: &GroupSpec, k: u32, rank_tol: f64) -> Result<InvariantSubspace> {
    let group = space.group()?;
    if k % 2 == 1 {
        let basis_b2 = match space {
            GroupSpec::Lens { p, q } => lens_modes(*p, *q, k)?
                .iter()
                .map(|m| {
                    let mut v = vec![Complex64::new(0.0, 0.0); dimension(k)];
                    v[m.index()] = Complex64::new(1.0, 0.0);
                    v
                })
                .collect(),
            _ if group.contains_antipodal() => Vec::new(),
            _ => return Err(Error::OddLevel(k)),
        };
        return Ok(InvariantSubspace {
            k,
            group: space.clone(),
            dimension: basis_b2.len(),
            basis_b3: None,
            basis_b2,
            invariance_defect: None,
        });
    }
    let proj = invariant_projector(&group, k)?;
    let basis_b3 = column_space(&proj, rank_tol);
    let basis_b2 = basis_b3
        .iter()
        .map(|v| b3_to_t_coords(k, v))
        .collect::<Result<Vec<_>>>()?;
    let mut defect = 0.0f64;
    for g in &group.elements {
        let m = g_coeffs(g, k)?.matrix;
        for v in &basis_b3 {
            let w = crate::linalg::mat_vec(&m, v);
            defect = defect.max(crate::linalg::max_abs_diff_vec(&w, v));
        }
    }
    Ok(InvariantSubspace {
        k,
        group: space.clone(),
        dimension: basis_b3.len(),
        basis_b3: Some(basis_b3),
        basis_b2,
        invariance_defect: Some(defect),
    })
}

#[derive(Serialize)]
struct InvariantSubspaceRepr {
    k: u32,
    group: String,
    dimension: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    basis_b3: Option<Vec<Vec<[f64; 2]>>>,
    basis_b2: Vec<Vec<[f64; 2]>>,
    b2_scaled: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    invariance_defect: Option<f64>,
}

fn pairs(vs: &[Vec<Complex64>]) -> Vec<Vec<[f64; 2]>> {
    vs.iter().map(|v| v.iter().map(|z| [z.re, z.im]).collect()).collect()
}

/// Vectors are lists of `[re, im]` pairs; `b2_scaled` tells whether `basis_b2`
/// is in `𝒯` (true) or plain `T` (false) coordinates.
impl Serialize for InvariantSubspace {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        InvariantSubspaceRepr {
            k: self.k,
            group: self.group.to_string(),
            dimension: self.dimension,
            basis_b3: self.basis_b3.as_deref().map(pairs),
            basis_b2: pairs(&self.basis_b2),
            b2_scaled: self.k.is_multiple_of(2),
            invariance_defect: self.invariance_defect,
        }
        .serialize(s)
    }
}
