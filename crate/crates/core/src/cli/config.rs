//! JSON case configuration.
//!
//! ```json
//! {
//!   "name": "robin",
//!   "mesh": { "kind": "triangles", "levels": [8, 16, 32] },
//!   "coefficients": { "a": "1", "f": "(pi^2 - 1) * sin(pi*y) * exp(-x)" },
//!   "exact": { "u": "sin(pi*y) * exp(-x)" },
//!   "boundary": { "xmax": { "type": "robin", "alpha": "1", "g": "0" } },
//!   "dirichlet_mode": "l2",
//!   "solver": { "method": "auto", "tol": 1e-12 },
//!   "quadrature_order": 5
//! }
//! ```
//!
//! `mesh.kind` is one of `triangles`, `rectangles`, `boxes`, `anisotropic`
//! (with `k`) or `kellogg` (with `base_n` and `extra_levels`; `levels` are
//! refinement counts). `mesh.domain` is `[x0, x1, y0, y1]` for triangles and
//! rectangles. `mesh.diagonal` (`rising` or `falling`, default `falling`)
//! picks the cut of triangulated rectangles. `a` is a scalar expression or
//! a 2×2 / 3×3 matrix of them.
//! `exact.grad` is optional and differentiated symbolically when absent.
//! Faces without an entry in `boundary` use `boundary.default`, which in
//! turn defaults to Dirichlet data taken from `exact.u`.

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::Deserialize;

use super::cases::{CaseSpec, Exact, MeshFamily, MeshSchedule};
use crate::assembly::{AssemblyOptions, MIN_ORDER};
use crate::element::TriangleBasis;
use crate::error::{Result, WgError};
use crate::expr::Expr;
use crate::mesh::{BoundaryTag, Diagonal, Domain2, Point};
use crate::problem::{
    BoundaryCondition, Coefficients, DirichletMode, ProblemSpec, ScalarFn, TensorFn,
};
use crate::quadrature::{DEFAULT_ORDER, MAX_ORDER};
use crate::solver::{Method, SolverConfig};

/// Largest accepted config file, in bytes.
pub const MAX_CONFIG_LEN: usize = 1 << 20;
const MAX_LEVELS: usize = 16;
const MAX_DIVISIONS: usize = 4096;

#[derive(Deserialize, Debug)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    name: String,
    mesh: RawMesh,
    coefficients: RawCoefficients,
    exact: RawExact,
    #[serde(default)]
    boundary: BTreeMap<String, RawCondition>,
    #[serde(default)]
    dirichlet_mode: Option<String>,
    #[serde(default)]
    solver: Option<RawSolver>,
    #[serde(default)]
    quadrature_order: Option<usize>,
    #[serde(default)]
    triangle_basis: Option<String>,
}

#[derive(Deserialize, Debug)]
#[serde(deny_unknown_fields)]
struct RawMesh {
    kind: String,
    levels: Vec<usize>,
    #[serde(default)]
    k: Option<usize>,
    #[serde(default)]
    domain: Option<[f64; 4]>,
    #[serde(default)]
    base_n: Option<usize>,
    #[serde(default)]
    extra_levels: Option<usize>,
    #[serde(default)]
    diagonal: Option<String>,
}

#[derive(Deserialize, Debug)]
#[serde(untagged)]
enum RawTensor {
    Scalar(String),
    Matrix(Vec<Vec<String>>),
}

#[derive(Deserialize, Debug)]
#[serde(deny_unknown_fields)]
struct RawCoefficients {
    #[serde(default)]
    a: Option<RawTensor>,
    #[serde(default)]
    beta: Option<Vec<String>>,
    #[serde(default)]
    gamma: Option<String>,
    f: String,
}

#[derive(Deserialize, Debug)]
#[serde(deny_unknown_fields)]
struct RawExact {
    u: String,
    #[serde(default)]
    grad: Option<Vec<String>>,
}

#[derive(Deserialize, Debug)]
#[serde(tag = "type", rename_all = "lowercase", deny_unknown_fields)]
enum RawCondition {
    Dirichlet {
        #[serde(default)]
        g: Option<String>,
    },
    Robin {
        alpha: String,
        #[serde(default)]
        g: Option<String>,
    },
}

#[derive(Deserialize, Debug)]
#[serde(deny_unknown_fields)]
struct RawSolver {
    #[serde(default)]
    method: Option<String>,
    #[serde(default)]
    tol: Option<f64>,
    #[serde(default)]
    max_iter: Option<usize>,
}

fn cfg_err(msg: impl Into<String>) -> WgError {
    WgError::Config(msg.into())
}

fn parse_expr(field: &str, src: &str) -> Result<Expr> {
    Expr::parse(src).map_err(|e| cfg_err(format!("{field}: {e}")))
}

fn to_scalar(e: Expr) -> ScalarFn {
    Arc::new(move |p: &Point| e.eval(p))
}

fn scalar_field(field: &str, src: &str) -> Result<ScalarFn> {
    Ok(to_scalar(parse_expr(field, src)?))
}

fn tensor_field(raw: &RawTensor, dim: usize) -> Result<TensorFn> {
    match raw {
        RawTensor::Scalar(s) => {
            let e = parse_expr("coefficients.a", s)?;
            Ok(Arc::new(move |p: &Point| {
                let v = e.eval(p);
                [[v, 0.0, 0.0], [0.0, v, 0.0], [0.0, 0.0, v]]
            }))
        }
        RawTensor::Matrix(rows) => {
            if rows.len() != dim || rows.iter().any(|r| r.len() != dim) {
                return Err(cfg_err(format!(
                    "coefficients.a must be a {dim}x{dim} matrix"
                )));
            }
            let mut entries = Vec::with_capacity(dim * dim);
            for (i, row) in rows.iter().enumerate() {
                for (j, s) in row.iter().enumerate() {
                    entries.push(parse_expr(&format!("coefficients.a[{i}][{j}]"), s)?);
                }
            }
            Ok(Arc::new(move |p: &Point| {
                let mut a = [[0.0; 3]; 3];
                for i in 0..3 {
                    a[i][i] = 1.0;
                }
                for i in 0..dim {
                    for j in 0..dim {
                        a[i][j] = entries[i * dim + j].eval(p);
                    }
                }
                a
            }))
        }
    }
}

fn vector_exprs(field: &str, v: &[String], dim: usize) -> Result<Vec<Expr>> {
    if v.len() != dim {
        return Err(cfg_err(format!("{field} must have {dim} components")));
    }
    v.iter()
        .enumerate()
        .map(|(i, s)| parse_expr(&format!("{field}[{i}]"), s))
        .collect()
}

fn vector_fn(exprs: Vec<Expr>) -> Arc<dyn Fn(&Point) -> Point + Send + Sync> {
    Arc::new(move |p: &Point| {
        let mut out = [0.0; 3];
        for (o, e) in out.iter_mut().zip(&exprs) {
            *o = e.eval(p);
        }
        out
    })
}

fn schedule(raw: &RawMesh) -> Result<(MeshSchedule, usize)> {
    if raw.levels.is_empty() || raw.levels.len() > MAX_LEVELS {
        return Err(cfg_err(format!(
            "mesh.levels must hold 1 to {MAX_LEVELS} entries"
        )));
    }
    let domain = match raw.domain {
        Some([x0, x1, y0, y1]) => {
            if raw.kind != "triangles" && raw.kind != "rectangles" {
                return Err(cfg_err(
                    "mesh.domain applies to triangles and rectangles only",
                ));
            }
            Domain2::new(x0, x1, y0, y1).map_err(|e| cfg_err(format!("mesh.domain: {e}")))?
        }
        None => Domain2::UNIT,
    };
    let diagonal = match raw.diagonal.as_deref() {
        None => super::cases::TRIANGLE_DIAGONAL,
        Some("rising") => Diagonal::Rising,
        Some("falling") => Diagonal::Falling,
        Some(other) => return Err(cfg_err(format!("unknown mesh.diagonal `{other}`"))),
    };
    let (family, dim) = match raw.kind.as_str() {
        "triangles" => (MeshFamily::Triangular { domain, diagonal }, 2),
        "rectangles" => (MeshFamily::Rectangular { domain }, 2),
        "boxes" => (MeshFamily::Box3d, 3),
        "anisotropic" => {
            let k = raw
                .k
                .ok_or_else(|| cfg_err("anisotropic meshes need `k`"))?;
            if k == 0 || k > 64 {
                return Err(cfg_err("mesh.k must lie in 1..=64"));
            }
            (MeshFamily::Anisotropic { k, diagonal }, 2)
        }
        "kellogg" => {
            let base_n = raw.base_n.unwrap_or(super::cases::KELLOGG_BASE_N);
            let extra_levels = raw
                .extra_levels
                .unwrap_or(super::cases::KELLOGG_EXTRA_LEVELS);
            if base_n > 64 || extra_levels > 8 || raw.levels.iter().any(|&l| l > 6) {
                return Err(cfg_err("Kellogg mesh parameters are too large"));
            }
            (
                MeshFamily::Kellogg {
                    base_n,
                    extra_levels,
                },
                2,
            )
        }
        other => return Err(cfg_err(format!("unknown mesh kind `{other}`"))),
    };
    let limit = match family {
        MeshFamily::Box3d => 128,
        _ => MAX_DIVISIONS,
    };
    if !matches!(family, MeshFamily::Kellogg { .. })
        && raw.levels.iter().any(|&n| n == 0 || n > limit)
    {
        return Err(cfg_err(format!("mesh levels must lie in 1..={limit}")));
    }
    Ok((
        MeshSchedule {
            family,
            levels: raw.levels.clone(),
        },
        dim,
    ))
}

fn condition(field: &str, raw: &RawCondition, exact_u: &ScalarFn) -> Result<BoundaryCondition> {
    Ok(match raw {
        RawCondition::Dirichlet { g } => BoundaryCondition::Dirichlet(match g {
            Some(s) => scalar_field(&format!("{field}.g"), s)?,
            None => exact_u.clone(),
        }),
        RawCondition::Robin { alpha, g } => BoundaryCondition::Robin {
            alpha: scalar_field(&format!("{field}.alpha"), alpha)?,
            g: scalar_field(&format!("{field}.g"), g.as_deref().unwrap_or("0"))?,
        },
    })
}

/// Parses a case from JSON text.
pub fn parse_case_config(text: &str) -> Result<CaseSpec> {
    if text.len() > MAX_CONFIG_LEN {
        return Err(cfg_err(format!("config exceeds {MAX_CONFIG_LEN} bytes")));
    }
    let raw: RawConfig = serde_json::from_str(text).map_err(|e| cfg_err(e.to_string()))?;
    if raw.name.is_empty()
        || !raw
            .name
            .chars()
            .all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-')
    {
        return Err(cfg_err("name must be non-empty and use only [A-Za-z0-9_-]"));
    }
    let (schedule, dim) = schedule(&raw.mesh)?;

    let u_expr = parse_expr("exact.u", &raw.exact.u)?;
    let grad = match &raw.exact.grad {
        Some(g) => vector_exprs("exact.grad", g, dim)?,
        None => (0..dim).map(|axis| u_expr.diff(axis)).collect(),
    };
    let exact = Exact {
        u: to_scalar(u_expr),
        grad: vector_fn(grad),
    };

    let c = &raw.coefficients;
    let coefficients = Coefficients {
        a: match &c.a {
            Some(a) => tensor_field(a, dim)?,
            None => crate::problem::identity_tensor(),
        },
        beta: match &c.beta {
            Some(b) => Some(vector_fn(vector_exprs("coefficients.beta", b, dim)?)),
            None => None,
        },
        gamma: match &c.gamma {
            Some(g) => Some(scalar_field("coefficients.gamma", g)?),
            None => None,
        },
        f: scalar_field("coefficients.f", &c.f)?,
    };

    let mut boundary = raw.boundary;
    let default = match boundary.remove("default") {
        Some(d) => condition("boundary.default", &d, &exact.u)?,
        None => BoundaryCondition::Dirichlet(exact.u.clone()),
    };
    let tags = &BoundaryTag::ALL[..2 * dim];
    let mut problem = ProblemSpec::dirichlet_everywhere(coefficients, exact.u.clone());
    for &tag in tags {
        problem = problem.with_condition(tag, default.clone());
    }
    for (name, raw_bc) in &boundary {
        let tag: BoundaryTag = name
            .parse()
            .map_err(|_| cfg_err(format!("unknown boundary `{name}`")))?;
        if !tags.contains(&tag) {
            return Err(cfg_err(format!(
                "boundary `{name}` does not exist in {dim}D"
            )));
        }
        problem = problem.with_condition(
            tag,
            condition(&format!("boundary.{name}"), raw_bc, &exact.u)?,
        );
    }
    let mode = match raw.dirichlet_mode.as_deref() {
        None | Some("l2") => DirichletMode::L2Projection,
        Some("nodal") => DirichletMode::Nodal,
        Some(other) => return Err(cfg_err(format!("unknown dirichlet_mode `{other}`"))),
    };
    problem = problem.with_dirichlet_mode(mode);

    let quadrature_order = raw.quadrature_order.unwrap_or(DEFAULT_ORDER);
    if !(MIN_ORDER..=MAX_ORDER).contains(&quadrature_order) {
        return Err(cfg_err(format!(
            "quadrature_order must lie in {MIN_ORDER}..={MAX_ORDER}"
        )));
    }
    let triangle_basis = match raw.triangle_basis.as_deref() {
        None | Some("centered") => TriangleBasis::Centered,
        Some("edge_normal") => TriangleBasis::EdgeNormal,
        Some(other) => return Err(cfg_err(format!("unknown triangle_basis `{other}`"))),
    };

    let mut solver = SolverConfig::default();
    if let Some(s) = &raw.solver {
        if let Some(m) = &s.method {
            solver.method = m.parse::<Method>().map_err(|e| cfg_err(e.to_string()))?;
        }
        if let Some(t) = s.tol {
            solver.tol = t;
        }
        solver.max_iter = s.max_iter;
    }
    solver.validate().map_err(|e| cfg_err(e.to_string()))?;

    Ok(CaseSpec {
        id: raw.name.clone(),
        title: raw.name,
        problem,
        exact,
        schedule,
        assembly: AssemblyOptions {
            quadrature_order,
            triangle_basis,
        },
        solver,
        reference: None,
    })
}
