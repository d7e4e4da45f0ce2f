use serde::Serialize;
use thiserror::Error;

use s3modes::bases::{self, eval_phi, eval_t, phi_from_t_matrix, t_from_phi_matrix, t_plain_from_phi_matrix};
use s3modes::quotients::{self, invariant_subspace, GroupSpec};
use s3modes::rotations::{g_coeffs, g_coeffs_oracle, to_b2_frame};
use s3modes::verify::{self, Suite, Tolerances};
use s3modes::{Complex64, ModeB2, ModeB3, Quaternion, Rotation, ToroidalPoint};

use crate::{
    BasisArg, BasisMatrixArgs, Direction, EvalArgs, Format, Frame, GroupSource, InvariantsArgs, Method,
    MultiplicityArgs, RotateArgs, VerifyArgs,
};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Validation(String),
    #[error("{0}")]
    Numerical(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Validation(_) => 2,
            CliError::Numerical(_) => 1,
        }
    }
}

impl From<s3modes::Error> for CliError {
    fn from(e: s3modes::Error) -> Self {
        match e {
            s3modes::Error::SingularOracle { .. } => CliError::Numerical(e.to_string()),
            _ => CliError::Validation(e.to_string()),
        }
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Validation(e.to_string())
    }
}

/// A finished command: both renderings, plus whether `verify` found a breach.
pub struct Report {
    json: String,
    csv: String,
    pub failed: bool,
}

impl Report {
    pub fn render(&self, format: Format) -> Result<String, CliError> {
        Ok(match format {
            Format::Json => self.json.clone(),
            Format::Csv => self.csv.clone(),
        })
    }
}

#[derive(Serialize)]
struct Envelope<'a, T: Serialize> {
    schema: u32,
    command: &'a str,
    #[serde(flatten)]
    body: T,
}

fn envelope<T: Serialize>(command: &str, body: T) -> String {
    let mut s = serde_json::to_string_pretty(&Envelope {
        schema: SCHEMA_VERSION,
        command,
        body,
    })
    .expect("report types serialize");
    s.push('\n');
    s
}

fn csv_table<R: Serialize>(rows: impl IntoIterator<Item = R>) -> Result<String, CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for row in rows {
        w.serialize(row)?;
    }
    let bytes = w.into_inner().map_err(|e| CliError::Validation(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv output is UTF-8"))
}

fn parse_numbers(s: &str, expected: usize, what: &str) -> Result<Vec<f64>, CliError> {
    let nums = s
        .split(',')
        .map(|t| t.trim().parse::<f64>())
        .collect::<Result<Vec<_>, _>>()
        .map_err(|_| CliError::Validation(format!("{what}: expected {expected} comma-separated numbers, got {s:?}")))?;
    if nums.len() != expected {
        return Err(CliError::Validation(format!(
            "{what}: expected {expected} numbers, got {}",
            nums.len()
        )));
    }
    Ok(nums)
}

fn pair(z: Complex64) -> [f64; 2] {
    [z.re, z.im]
}

#[derive(Serialize)]
struct EvalRow {
    mode: [f64; 2],
    point: [f64; 3],
    value: [f64; 2],
}

#[derive(Serialize)]
struct EvalBody {
    basis: &'static str,
    k: u32,
    /// `[m1, m2]` for B2, `[I, J]` for B3.
    mode_fields: [&'static str; 2],
    values: Vec<EvalRow>,
}

#[derive(Serialize)]
struct EvalCsvRow {
    a: f64,
    b: f64,
    chi: f64,
    theta: f64,
    phi: f64,
    re: f64,
    im: f64,
}

pub fn eval(args: &EvalArgs) -> Result<Report, CliError> {
    let points = args
        .points
        .iter()
        .map(|s| {
            let v = parse_numbers(s, 3, "--point")?;
            Ok(ToroidalPoint::new(v[0], v[1], v[2])?)
        })
        .collect::<Result<Vec<_>, CliError>>()?;
    let k = args.k;
    let mut rows = Vec::new();
    let (basis, fields) = match args.basis {
        BasisArg::B2 => {
            if args.i.is_some() {
                return Err(CliError::Validation("--i/--j select B3 modes; use --m1/--m2 for B2".into()));
            }
            bases::require_supported(k)?;
            let modes = match (args.m1, args.m2) {
                (Some(m1), Some(m2)) => vec![ModeB2::new(k, m1, m2)?],
                _ => ModeB2::all(k),
            };
            for m in &modes {
                for p in &points {
                    rows.push(EvalRow {
                        mode: [m.m1(), m.m2()],
                        point: [p.chi, p.theta, p.phi],
                        value: pair(eval_t(m, p)),
                    });
                }
            }
            ("B2", ["m1", "m2"])
        }
        BasisArg::B3 => {
            if args.m1.is_some() {
                return Err(CliError::Validation("--m1/--m2 select B2 modes; use --i/--j for B3".into()));
            }
            bases::require_supported(k)?;
            let modes = match (args.i, args.j) {
                (Some(i), Some(j)) => vec![ModeB3::new(k, i, j)?],
                _ => ModeB3::all(k)?,
            };
            for m in &modes {
                for p in &points {
                    rows.push(EvalRow {
                        mode: [f64::from(m.i), f64::from(m.j)],
                        point: [p.chi, p.theta, p.phi],
                        value: pair(eval_phi(m, p)),
                    });
                }
            }
            ("B3", ["I", "J"])
        }
    };
    let mut csv = csv_table(rows.iter().map(|r| EvalCsvRow {
        a: r.mode[0],
        b: r.mode[1],
        chi: r.point[0],
        theta: r.point[1],
        phi: r.point[2],
        re: r.value[0],
        im: r.value[1],
    }))?;
    // header names depend on the basis
    if let Some(rest) = csv.strip_prefix("a,b,") {
        csv = format!("{},{},{rest}", fields[0], fields[1]);
    }
    let json = envelope(
        "eval",
        EvalBody {
            basis,
            k,
            mode_fields: fields,
            values: rows,
        },
    );
    Ok(Report {
        json,
        csv,
        failed: false,
    })
}

pub fn basis_matrix(args: &BasisMatrixArgs) -> Result<Report, CliError> {
    let m = match args.direction {
        Direction::TFromPhi => t_from_phi_matrix(args.k)?,
        Direction::PhiFromT => phi_from_t_matrix(args.k)?,
        Direction::TPlainFromPhi => t_plain_from_phi_matrix(args.k)?,
    };
    #[derive(Serialize)]
    struct Body<'a> {
        scaled_b2: bool,
        #[serde(flatten)]
        matrix: &'a bases::CoeffMatrix,
    }
    let json = envelope(
        "basis-matrix",
        Body {
            scaled_b2: args.direction != Direction::TPlainFromPhi,
            matrix: &m,
        },
    );
    Ok(Report {
        json,
        csv: m.to_csv(),
        failed: false,
    })
}

fn rotation_from_args(args: &RotateArgs) -> Result<Rotation, CliError> {
    if let Some(spec) = &args.space {
        let gens = spec.parse::<GroupSpec>()?.generators()?;
        return gens.get(args.generator.wrapping_sub(1)).copied().ok_or_else(|| {
            CliError::Validation(format!("--generator must be between 1 and {}", gens.len()))
        });
    }
    let text = args.rotation.as_deref().expect("clap requires --rotation or --space");
    let v = parse_numbers(text, 8, "--rotation")?;
    let ql = Quaternion::new(v[0], v[1], v[2], v[3]);
    let qr = Quaternion::new(v[4], v[5], v[6], v[7]);
    Ok(if args.normalize {
        Rotation::normalized(ql, qr)?
    } else {
        Rotation::new(ql, qr)?
    })
}

#[derive(Serialize)]
struct RotateBody {
    k: u32,
    q_left: Quaternion,
    q_right: Quaternion,
    method: &'static str,
    frame: &'static str,
    shape: [usize; 2],
    entries: Vec<[f64; 2]>,
    fallback_rows: Vec<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    oracle_residual: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    oracle_condition: Option<f64>,
}

pub fn rotate(args: &RotateArgs) -> Result<Report, CliError> {
    let g = rotation_from_args(args)?;
    let (coeffs, residual, condition) = match args.method {
        Method::Closed => (g_coeffs(&g, args.k)?, None, None),
        Method::Oracle => {
            let fit = g_coeffs_oracle(&g, args.k)?;
            (fit.coeffs, Some(fit.residual), Some(fit.condition))
        }
    };
    let matrix = match args.frame {
        Frame::B3 => coeffs.matrix.clone(),
        Frame::B2 => to_b2_frame(&coeffs)?,
    };
    let body = RotateBody {
        k: args.k,
        q_left: g.q_left,
        q_right: g.q_right,
        method: match args.method {
            Method::Closed => "closed",
            Method::Oracle => "oracle",
        },
        frame: match args.frame {
            Frame::B3 => "B3",
            Frame::B2 => "B2",
        },
        shape: [matrix.nrows(), matrix.ncols()],
        entries: s3modes::linalg::entries_row_major(&matrix),
        fallback_rows: coeffs.fallback_rows.clone(),
        oracle_residual: residual,
        oracle_condition: condition,
    };
    Ok(Report {
        json: envelope("rotate", body),
        csv: s3modes::linalg::matrix_to_csv(&matrix),
        failed: false,
    })
}

fn group_spec(source: &GroupSource) -> Result<GroupSpec, CliError> {
    match (&source.space, &source.group_file) {
        (Some(s), _) => Ok(s.parse()?),
        (None, Some(path)) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::Validation(format!("{}: {e}", path.display())))?;
            Ok(GroupSpec::from_json(&text)?)
        }
        (None, None) => Err(CliError::Validation("one of --space or --group-file is required".into())),
    }
}

#[derive(Serialize)]
struct VectorCsvRow {
    vector: usize,
    coords: &'static str,
    index: usize,
    re: f64,
    im: f64,
}

pub fn invariants(args: &InvariantsArgs) -> Result<Report, CliError> {
    let spec = group_spec(&args.source)?;
    let sub = invariant_subspace(&spec, args.k, args.rank_tol)?;
    let b2_label = if args.k.is_multiple_of(2) { "b2_scaled" } else { "b2" };
    let mut rows = Vec::new();
    for (coords, vectors) in [("b3", sub.basis_b3.as_deref().unwrap_or(&[])), (b2_label, &sub.basis_b2[..])] {
        for (n, v) in vectors.iter().enumerate() {
            for (index, z) in v.iter().enumerate() {
                rows.push(VectorCsvRow {
                    vector: n,
                    coords,
                    index,
                    re: z.re,
                    im: z.im,
                });
            }
        }
    }
    let mut csv = csv_table(rows)?;
    if csv.is_empty() {
        csv = "vector,coords,index,re,im\n".into();
    }
    Ok(Report {
        json: envelope("invariants", &sub),
        csv,
        failed: false,
    })
}

#[derive(Serialize)]
struct MultiplicityBody {
    space: String,
    table: Vec<quotients::Multiplicity>,
}

#[derive(Serialize)]
struct MultiplicityCsvRow {
    k: u32,
    multiplicity: u64,
    method: String,
    quoted_formula: Option<u64>,
    flagged: bool,
}

pub fn multiplicity(args: &MultiplicityArgs) -> Result<Report, CliError> {
    let spec = group_spec(&args.source)?;
    let levels: Vec<u32> = match (args.k, args.k_max) {
        (Some(k), _) => vec![k],
        (None, Some(max)) => (0..=max).collect(),
        (None, None) => return Err(CliError::Validation("one of --k or --k-max is required".into())),
    };
    let table = levels
        .iter()
        .map(|&k| quotients::multiplicity(&spec, k))
        .collect::<Result<Vec<_>, _>>()?;
    let csv = csv_table(table.iter().map(|m| MultiplicityCsvRow {
        k: m.k,
        multiplicity: m.value,
        method: serde_json::to_value(m.method)
            .ok()
            .and_then(|v| v.as_str().map(String::from))
            .unwrap_or_default(),
        quoted_formula: m.quoted_formula,
        flagged: m.flagged,
    }))?;
    Ok(Report {
        json: envelope(
            "multiplicity",
            MultiplicityBody {
                space: spec.to_string(),
                table,
            },
        ),
        csv,
        failed: false,
    })
}

#[derive(Serialize)]
struct CheckCsvRow<'a> {
    suite: String,
    check: &'a str,
    value: f64,
    tolerance: f64,
    passed: bool,
}

pub fn verify(args: &VerifyArgs) -> Result<Report, CliError> {
    let suites = Suite::parse_list(&args.suite)?;
    let d = Tolerances::default();
    let t = &args.tol;
    let tol = Tolerances {
        algebra: t.tol_algebra.unwrap_or(d.algebra),
        gram: t.tol_gram.unwrap_or(d.gram),
        transform: t.tol_transform.unwrap_or(d.transform),
        membership: t.tol_membership.unwrap_or(d.membership),
        coefficient: t.tol_coefficient.unwrap_or(d.coefficient),
        harmonic: t.tol_harmonic.unwrap_or(d.harmonic),
        fd_step: t.fd_step.unwrap_or(d.fd_step),
        rotation: t.tol_rotation.unwrap_or(d.rotation),
        invariance: t.tol_invariance.unwrap_or(d.invariance),
        rank: t.rank_tol.unwrap_or(d.rank),
    };
    if !(1e-4..=1e-2).contains(&tol.fd_step) {
        return Err(CliError::Validation("--fd-step must lie in [1e-4, 1e-2]".into()));
    }
    let report = verify::run(args.k, &suites, &tol, args.seed)?;
    let csv = csv_table(report.checks.iter().map(|c| CheckCsvRow {
        suite: c.suite.to_string(),
        check: &c.name,
        value: c.value,
        tolerance: c.tolerance,
        passed: c.passed,
    }))?;
    Ok(Report {
        json: envelope("verify", &report),
        csv,
        failed: !report.passed,
    })
}
