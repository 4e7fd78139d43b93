//! Built-in benchmark cases: exact solutions, coefficients and mesh
//! schedules.

use std::f64::consts::PI;
use std::sync::Arc;

use super::reference::{reference_for, ReferenceTable};
use crate::assembly::AssemblyOptions;
use crate::error::{Result, WgError};
use crate::mesh::{
    anisotropic_triangular, locally_refined_kellogg, refine_red, uniform_box3d,
    uniform_rectangular, uniform_triangular_with, BoundaryTag, Diagonal, Domain2, Mesh, Point,
};
use crate::problem::{
    constant, identity_tensor, scalar, scalar_tensor, BoundaryCondition, Coefficients,
    DirichletMode, ProblemSpec, ScalarFn, TensorFn, VectorFn,
};
use crate::solver::SolverConfig;

/// Every built-in case id.
pub const CASE_IDS: [&str; 10] = ["1a", "1b", "1c", "2", "3a", "3b", "4", "5a", "5b", "6"];

/// Default Kellogg initial mesh: `(-1, 1)²` split into `6 × 6` squares
/// with eight triangles at the origin, refined eight more times there
/// (328 triangles).
pub const KELLOGG_BASE_N: usize = 6;
pub const KELLOGG_EXTRA_LEVELS: usize = 8;

#[derive(Clone)]
pub struct Exact {
    pub u: ScalarFn,
    pub grad: VectorFn,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum MeshFamily {
    /// `n × n` squares each split into two triangles.
    Triangular { domain: Domain2, diagonal: Diagonal },
    /// `n × n` rectangles.
    Rectangular { domain: Domain2 },
    /// Unit square, `n × k n` rectangles (`k n` along `y`) each split into
    /// two triangles; `h = 1/n`.
    Anisotropic { k: usize, diagonal: Diagonal },
    /// Unit cube, `n³` cubes.
    Box3d,
    /// Locally refined Kellogg mesh, then uniformly red-refined once per
    /// level; the schedule entries are the refinement levels.
    Kellogg { base_n: usize, extra_levels: usize },
}

#[derive(Clone, Debug, PartialEq)]
pub struct MeshSchedule {
    pub family: MeshFamily,
    /// Divisions per level (`n`), or refinement levels for Kellogg meshes.
    pub levels: Vec<usize>,
}

impl MeshSchedule {
    pub fn len(&self) -> usize {
        self.levels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.levels.is_empty()
    }

    /// Keeps the first `n` levels.
    pub fn truncate(&mut self, n: usize) {
        self.levels.truncate(n);
    }

    /// Mesh of level `i`. For Kellogg meshes `prev` may hold the mesh of
    /// level `i - 1`, which is then refined instead of rebuilding.
    pub fn build(&self, i: usize, prev: Option<&Mesh>) -> Result<Mesh> {
        let n = *self
            .levels
            .get(i)
            .ok_or_else(|| WgError::InvalidArgument(format!("no mesh level {i}")))?;
        match self.family {
            MeshFamily::Triangular { domain, diagonal } => {
                uniform_triangular_with(n, domain, diagonal)
            }
            MeshFamily::Rectangular { domain } => uniform_rectangular(n, n, domain),
            MeshFamily::Anisotropic { k, diagonal } => anisotropic_triangular(k, n, diagonal),
            MeshFamily::Box3d => uniform_box3d(n),
            MeshFamily::Kellogg {
                base_n,
                extra_levels,
            } => {
                let consecutive = i > 0 && self.levels[i - 1] + 1 == n;
                match prev {
                    Some(p) if consecutive => refine_red(p),
                    _ => {
                        let mut m = locally_refined_kellogg(base_n, extra_levels)?;
                        for _ in 0..n {
                            m = refine_red(&m)?;
                        }
                        Ok(m)
                    }
                }
            }
        }
    }
}

#[derive(Clone)]
pub struct CaseSpec {
    pub id: String,
    pub title: String,
    pub problem: ProblemSpec,
    pub exact: Exact,
    pub schedule: MeshSchedule,
    pub assembly: AssemblyOptions,
    pub solver: SolverConfig,
    pub reference: Option<&'static ReferenceTable>,
}

impl std::fmt::Debug for CaseSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("CaseSpec")
            .field("id", &self.id)
            .field("title", &self.title)
            .field("schedule", &self.schedule)
            .finish_non_exhaustive()
    }
}

/// Diagonal of the built-in triangular meshes.
pub const TRIANGLE_DIAGONAL: Diagonal = Diagonal::Falling;

fn halving(from: usize, count: usize) -> Vec<usize> {
    (0..count).map(|i| from << i).collect()
}

fn all_dirichlet(coeffs: Coefficients, exact: &Exact, mode: DirichletMode) -> ProblemSpec {
    ProblemSpec::dirichlet_everywhere(coeffs, exact.u.clone()).with_dirichlet_mode(mode)
}

fn spec(
    id: &str,
    title: &str,
    problem: ProblemSpec,
    exact: Exact,
    family: MeshFamily,
    levels: Vec<usize>,
) -> CaseSpec {
    CaseSpec {
        id: id.into(),
        title: title.into(),
        problem,
        exact,
        schedule: MeshSchedule { family, levels },
        assembly: AssemblyOptions::default(),
        solver: SolverConfig::default(),
        reference: reference_for(id),
    }
}

/// `cos(2 pi x) cos(2 pi y)`, i.e. `sin(2 pi x + pi/2) sin(2 pi y + pi/2)`.
pub fn smooth_cosines() -> Exact {
    let w = 2.0 * PI;
    Exact {
        u: scalar(move |p| (w * p[0]).cos() * (w * p[1]).cos()),
        grad: Arc::new(move |p| {
            [
                -w * (w * p[0]).sin() * (w * p[1]).cos(),
                -w * (w * p[0]).cos() * (w * p[1]).sin(),
                0.0,
            ]
        }),
    }
}

/// `x (1 - x) y (1 - y)` and its first and second derivatives.
fn bubble(p: &Point) -> (f64, f64, f64, f64) {
    let (x, y) = (p[0], p[1]);
    let v = x * (1.0 - x) * y * (1.0 - y);
    let vx = (1.0 - 2.0 * x) * y * (1.0 - y);
    let vy = x * (1.0 - x) * (1.0 - 2.0 * y);
    let lap = -2.0 * y * (1.0 - y) - 2.0 * x * (1.0 - x);
    (v, vx, vy, lap)
}

/// `x (1 - x) y (1 - y) r^(gamma - 2)` with the matching `-lap u`.
pub fn corner_singularity(gamma: f64) -> (Exact, ScalarFn) {
    let s = gamma - 2.0;
    let exact = Exact {
        u: scalar(move |p| bubble(p).0 * p[0].hypot(p[1]).powf(s)),
        grad: Arc::new(move |p| {
            let (v, vx, vy, _) = bubble(p);
            let r = p[0].hypot(p[1]);
            let rs = r.powf(s);
            let rs2 = r.powf(s - 2.0);
            [
                rs * vx + v * s * rs2 * p[0],
                rs * vy + v * s * rs2 * p[1],
                0.0,
            ]
        }),
    };
    let f = scalar(move |p| {
        let (v, vx, vy, lap) = bubble(p);
        let r = p[0].hypot(p[1]);
        let rs2 = r.powf(s - 2.0);
        -(r.powf(s) * lap + 2.0 * s * rs2 * (p[0] * vx + p[1] * vy) + v * s * s * rs2)
    });
    (exact, f)
}

/// Parameters of the intersecting-interface solution `u = r^gamma mu(theta)`
/// with diffusion `R` in the first and third quadrants and 1 elsewhere.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct KelloggParams {
    pub gamma: f64,
    pub ratio: f64,
    pub rho: f64,
    pub sigma: f64,
}

impl KelloggParams {
    pub const PUBLISHED: KelloggParams = KelloggParams {
        gamma: 0.1,
        ratio: 161.4476387975881,
        rho: PI / 4.0,
        sigma: -14.92256510455152,
    };

    /// `(amplitude, phase)` of `mu = amplitude cos((theta - phase) gamma)` on
    /// each quadrant.
    fn branches(&self) -> [(f64, f64); 4] {
        let (g, rho, sigma) = (self.gamma, self.rho, self.sigma);
        [
            (((PI / 2.0 - sigma) * g).cos(), PI / 2.0 - rho),
            ((rho * g).cos(), PI - sigma),
            ((sigma * g).cos(), PI + rho),
            (((PI / 2.0 - rho) * g).cos(), 1.5 * PI + sigma),
        ]
    }

    fn quadrant(theta: f64) -> usize {
        ((theta / (PI / 2.0)).floor() as usize).min(3)
    }

    pub fn mu(&self, theta: f64) -> (f64, f64) {
        let (a, phase) = self.branches()[Self::quadrant(theta)];
        let arg = (theta - phase) * self.gamma;
        (a * arg.cos(), -a * self.gamma * arg.sin())
    }

    pub fn diffusion(&self, p: &Point) -> f64 {
        if p[0] * p[1] > 0.0 {
            self.ratio
        } else {
            1.0
        }
    }

    pub fn u(&self, p: &Point) -> f64 {
        let r = p[0].hypot(p[1]);
        if r == 0.0 {
            return 0.0;
        }
        r.powf(self.gamma) * self.mu(polar_angle(p)).0
    }

    pub fn grad(&self, p: &Point) -> Point {
        let r = p[0].hypot(p[1]);
        if r == 0.0 {
            return [f64::INFINITY, f64::INFINITY, 0.0];
        }
        let theta = polar_angle(p);
        let (m, dm) = self.mu(theta);
        let rg = r.powf(self.gamma - 1.0);
        let (c, s) = (theta.cos(), theta.sin());
        let ur = self.gamma * rg * m;
        let ut = rg * dm;
        [ur * c - ut * s, ur * s + ut * c, 0.0]
    }

    /// Residuals of the three parameter relations exactly as printed,
    /// relative to the left-hand side.
    pub fn printed_relation_residuals(&self) -> [f64; 3] {
        let (g, rho, sigma, r) = (self.gamma, self.rho, self.sigma, self.ratio);
        let cot = |v: f64| 1.0 / v.tan();
        [
            rel(r, -((PI / 2.0 - sigma) * g).tan() * cot(rho * g)),
            rel(1.0 / r, -(rho * g).tan() * cot(sigma * rho)),
            rel(r, -(rho * g).tan() * cot((PI / 2.0 - rho) * g)),
        ]
    }

    /// Residuals of the relations in the form that makes the flux continuous
    /// across both axes: the second uses `cot(sigma gamma)` and the third
    /// `tan(sigma gamma)`.
    pub fn relation_residuals(&self) -> [f64; 3] {
        let (g, rho, sigma, r) = (self.gamma, self.rho, self.sigma, self.ratio);
        let cot = |v: f64| 1.0 / v.tan();
        [
            rel(r, -((PI / 2.0 - sigma) * g).tan() * cot(rho * g)),
            rel(1.0 / r, -(rho * g).tan() * cot(sigma * g)),
            rel(r, -(sigma * g).tan() * cot((PI / 2.0 - rho) * g)),
        ]
    }

    /// The two interval constraints on `gamma rho` and `gamma sigma`.
    pub fn constraints_hold(&self) -> bool {
        let (g, rho, sigma) = (self.gamma, self.rho, self.sigma);
        let a = 2.0 * g * rho;
        let b = -2.0 * g * sigma;
        (0.0f64).max(PI * g - PI) < a
            && a < (PI * g).min(PI)
            && (0.0f64).max(PI - PI * g) < b
            && b < PI.min(2.0 * PI - PI * g)
    }
}

fn rel(lhs: f64, rhs: f64) -> f64 {
    (lhs - rhs).abs() / lhs.abs()
}

/// Polar angle in `[0, 2 pi)`.
pub fn polar_angle(p: &Point) -> f64 {
    let t = p[1].atan2(p[0]);
    if t < 0.0 {
        t + 2.0 * PI
    } else {
        t
    }
}

pub fn kellogg_exact(k: KelloggParams) -> Exact {
    Exact {
        u: scalar(move |p| k.u(p)),
        grad: Arc::new(move |p| k.grad(p)),
    }
}

/// Kellogg case on the given initial mesh family.
pub fn kellogg_case(base_n: usize, extra_levels: usize, levels: usize) -> CaseSpec {
    let k = KelloggParams::PUBLISHED;
    for (i, res) in k.printed_relation_residuals().iter().enumerate() {
        if *res > 1e-6 {
            log::warn!(
                "Kellogg parameter relation {} as printed has relative residual {res:.3e}",
                i + 1
            );
        }
    }
    let exact = kellogg_exact(k);
    let a: TensorFn = scalar_tensor(scalar(move |p| k.diffusion(p)));
    let coeffs = Coefficients {
        a,
        beta: None,
        gamma: None,
        f: constant(0.0),
    };
    spec(
        "4",
        "intersecting interfaces (Kellogg)",
        all_dirichlet(coeffs, &exact, DirichletMode::L2Projection),
        exact,
        MeshFamily::Kellogg {
            base_n,
            extra_levels,
        },
        (0..levels).collect(),
    )
}

/// Anisotropic diffusion `diag(k², 1)` with `u = sin(2 pi x) sin(2 k pi y)`.
pub fn anisotropic_case(id: &str, k: usize, first_n: usize) -> CaseSpec {
    let kf = k as f64;
    let (wx, wy) = (2.0 * PI, 2.0 * kf * PI);
    let exact = Exact {
        u: scalar(move |p| (wx * p[0]).sin() * (wy * p[1]).sin()),
        grad: Arc::new(move |p| {
            [
                wx * (wx * p[0]).cos() * (wy * p[1]).sin(),
                wy * (wx * p[0]).sin() * (wy * p[1]).cos(),
                0.0,
            ]
        }),
    };
    let u = exact.u.clone();
    let coeffs = Coefficients {
        a: Arc::new(move |_| [[kf * kf, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]]),
        beta: None,
        gamma: None,
        f: scalar(move |p| 8.0 * kf * kf * PI * PI * u(p)),
    };
    spec(
        id,
        &format!("anisotropic diffusion, k = {k}"),
        all_dirichlet(coeffs, &exact, DirichletMode::L2Projection),
        exact,
        MeshFamily::Anisotropic {
            k,
            diagonal: TRIANGLE_DIAGONAL,
        },
        halving(first_n, 5),
    )
}

/// Looks up a built-in case.
pub fn case_spec(id: &str) -> Result<CaseSpec> {
    let tri = MeshFamily::Triangular {
        domain: Domain2::UNIT,
        diagonal: TRIANGLE_DIAGONAL,
    };
    Ok(match id {
        "1a" | "1b" => {
            let exact = smooth_cosines();
            let u = exact.u.clone();
            let coeffs = Coefficients::poisson(scalar(move |p| 8.0 * PI * PI * u(p)));
            let (mode, title) = if id == "1a" {
                (
                    DirichletMode::Nodal,
                    "Laplace, Dirichlet data by midpoint values",
                )
            } else {
                (
                    DirichletMode::L2Projection,
                    "Laplace, Dirichlet data by L2 projection",
                )
            };
            spec(
                id,
                title,
                all_dirichlet(coeffs, &exact, mode),
                exact,
                tri,
                halving(8, 5),
            )
        }
        "1c" => {
            let exact = Exact {
                u: scalar(|p| (PI * p[1]).sin() * (-p[0]).exp()),
                grad: Arc::new(|p| {
                    let e = (-p[0]).exp();
                    [-(PI * p[1]).sin() * e, PI * (PI * p[1]).cos() * e, 0.0]
                }),
            };
            let u = exact.u.clone();
            let coeffs = Coefficients::poisson(scalar(move |p| (PI * PI - 1.0) * u(p)));
            let problem = all_dirichlet(coeffs, &exact, DirichletMode::L2Projection)
                .with_condition(
                    BoundaryTag::XMax,
                    BoundaryCondition::Robin {
                        alpha: constant(1.0),
                        g: constant(0.0),
                    },
                );
            spec(
                id,
                "Laplace, Robin condition on x = 1",
                problem,
                exact,
                tri,
                halving(8, 5),
            )
        }
        "2" => {
            let exact = Exact {
                u: scalar(|p| bubble(p).0),
                grad: Arc::new(|p| {
                    let (_, vx, vy, _) = bubble(p);
                    [vx, vy, 0.0]
                }),
            };
            let coeffs = Coefficients {
                a: scalar_tensor(scalar(|p| p[0] * p[1])),
                beta: None,
                gamma: None,
                f: scalar(|p| {
                    let (x, y) = (p[0], p[1]);
                    -((1.0 - 4.0 * x) * y * y * (1.0 - y) + (1.0 - 4.0 * y) * x * x * (1.0 - x))
                }),
            };
            spec(
                id,
                "degenerate diffusion A = xy",
                all_dirichlet(coeffs, &exact, DirichletMode::L2Projection),
                exact,
                tri,
                halving(8, 5),
            )
        }
        "3a" | "3b" => {
            let gamma = if id == "3a" { 0.5 } else { 0.25 };
            let (exact, f) = corner_singularity(gamma);
            spec(
                id,
                &format!("corner singularity, gamma = {gamma}"),
                all_dirichlet(
                    Coefficients::poisson(f),
                    &exact,
                    DirichletMode::L2Projection,
                ),
                exact,
                tri,
                halving(8, 5),
            )
        }
        "4" => kellogg_case(KELLOGG_BASE_N, KELLOGG_EXTRA_LEVELS, 5),
        "5a" => anisotropic_case(id, 3, 8),
        "5b" => anisotropic_case(id, 9, 4),
        "6" => {
            let w = 2.0 * PI;
            let exact = Exact {
                u: scalar(move |p| (w * p[0]).sin() * (w * p[1]).sin() * (w * p[2]).sin()),
                grad: Arc::new(move |p| {
                    let (s, c) = (p.map(|v| (w * v).sin()), p.map(|v| (w * v).cos()));
                    [
                        w * c[0] * s[1] * s[2],
                        w * s[0] * c[1] * s[2],
                        w * s[0] * s[1] * c[2],
                    ]
                }),
            };
            let u = exact.u.clone();
            let coeffs = Coefficients {
                a: identity_tensor(),
                beta: None,
                gamma: None,
                f: scalar(move |p| 12.0 * PI * PI * u(p)),
            };
            spec(
                id,
                "3D Laplace on cubes",
                all_dirichlet(coeffs, &exact, DirichletMode::L2Projection),
                exact,
                MeshFamily::Box3d,
                vec![8, 12, 16, 20],
            )
        }
        _ => {
            return Err(WgError::InvalidArgument(format!(
                "unknown case `{id}`; expected one of {}",
                CASE_IDS.join(", ")
            )))
        }
    })
}
