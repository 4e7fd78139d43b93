//! Projections of exact solutions, error norms and convergence rates.

use rayon::prelude::*;

use crate::assembly::WgSolution;
use crate::element::{discrete_gradient, evaluate_gradient, LocalKernel};
use crate::error::{Result, WgError};
use crate::mesh::{dot, Mesh, Point};
use crate::quadrature::{face_points_raw, RuleSet};

pub type ExactFn<'a> = &'a (dyn Fn(&Point) -> f64 + Sync);
pub type ExactGradFn<'a> = &'a (dyn Fn(&Point) -> Point + Sync);

/// Cell and face averages of `u`.
pub fn project_exact(u: ExactFn<'_>, mesh: &Mesh, rules: &RuleSet) -> WgSolution {
    let u0 = (0..mesh.num_cells())
        .into_par_iter()
        .map(|c| {
            let cell = mesh.cell_geometry(c);
            let s: f64 = rules.cell_points(&cell).iter().map(|(p, w)| w * u(p)).sum();
            s / cell.measure
        })
        .collect();
    let ub = (0..mesh.num_faces())
        .into_par_iter()
        .map(|f| {
            let face = &mesh.faces()[f];
            let s: f64 = face_points_raw(rules, &mesh.face_points(f), face.measure)
                .iter()
                .map(|(p, w)| w * u(p))
                .sum();
            s / face.measure
        })
        .collect();
    WgSolution { u0, ub }
}

/// Number of reported error metrics.
pub const NUM_METRICS: usize = 6;

/// Column names of the six metrics, in table order.
pub const METRIC_NAMES: [&str; NUM_METRICS] = [
    "grad_d_e_h",
    "e_0",
    "e_b",
    "grad_d_u_h_minus_grad_u",
    "u_0_minus_u",
    "e_0_max",
];

/// Errors on one mesh, with `e_h = u_h - Q_h u`:
///
/// 0. `|grad_d e_h|`
/// 1. `|e_0|`
/// 2. `|e_b|`, the face norm `(sum_F h_F |e_b|^2_F)^(1/2)` with each face
///    counted once and `h_F = |F|^(1/(d-1))`
/// 3. `|grad_d u_h - grad u|`
/// 4. `|u_0 - u|`
/// 5. `max |e_0|`
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ErrorNorms(pub [f64; NUM_METRICS]);

impl ErrorNorms {
    pub fn grad_e(&self) -> f64 {
        self.0[0]
    }
    pub fn e0(&self) -> f64 {
        self.0[1]
    }
    pub fn eb(&self) -> f64 {
        self.0[2]
    }
    pub fn grad_error(&self) -> f64 {
        self.0[3]
    }
    pub fn u0_error(&self) -> f64 {
        self.0[4]
    }
    pub fn e0_max(&self) -> f64 {
        self.0[5]
    }
}

#[derive(Default)]
struct CellContribution {
    grad_e: f64,
    e0: f64,
    grad_error: f64,
    u0_error: f64,
    e0_max: f64,
}

/// All six error metrics. `kernels` are the local kernels the solution was
/// assembled with, in cell order.
pub fn error_norms(
    mesh: &Mesh,
    kernels: &[LocalKernel],
    uh: &WgSolution,
    u: ExactFn<'_>,
    grad_u: ExactGradFn<'_>,
    rules: &RuleSet,
) -> Result<ErrorNorms> {
    if kernels.len() != mesh.num_cells()
        || uh.u0.len() != mesh.num_cells()
        || uh.ub.len() != mesh.num_faces()
    {
        return Err(WgError::InvalidArgument(
            "solution does not match the mesh".into(),
        ));
    }
    let q = project_exact(u, mesh, rules);
    let parts: Vec<CellContribution> = (0..mesh.num_cells())
        .into_par_iter()
        .map(|c| {
            let k = &kernels[c];
            let cell = mesh.cell_geometry(c);
            let faces: Vec<usize> = mesh.cell_faces(c).iter().map(|cf| cf.face).collect();
            let e0 = uh.u0[c] - q.u0[c];
            let eb: Vec<f64> = faces.iter().map(|&f| uh.ub[f] - q.ub[f]).collect();
            let ce = discrete_gradient(&k.dzt, &k.d_inv, e0, &eb);
            let ub: Vec<f64> = faces.iter().map(|&f| uh.ub[f]).collect();
            let cu = discrete_gradient(&k.dzt, &k.d_inv, uh.u0[c], &ub);
            let mut out = CellContribution {
                grad_e: ce.dot(&(&k.dzt.d * &ce)),
                e0: cell.measure * e0 * e0,
                e0_max: e0.abs(),
                ..CellContribution::default()
            };
            for (p, w) in rules.cell_points(&cell) {
                let g = evaluate_gradient(&k.basis, &cu, &p);
                let gu = grad_u(&p);
                let d = [g[0] - gu[0], g[1] - gu[1], g[2] - gu[2]];
                out.grad_error += w * dot(&d, &d);
                let e = uh.u0[c] - u(&p);
                out.u0_error += w * e * e;
            }
            out
        })
        .collect();
    let face_exp = 1.0 / (mesh.dim() as f64 - 1.0);
    let face_parts: Vec<f64> = mesh
        .faces()
        .par_iter()
        .enumerate()
        .map(|(f, face)| {
            let e = uh.ub[f] - q.ub[f];
            face.measure.powf(face_exp) * face.measure * e * e
        })
        .collect();
    let mut sums = [0.0; NUM_METRICS];
    sums[2] = face_parts.iter().sum();
    for p in &parts {
        sums[0] += p.grad_e;
        sums[1] += p.e0;
        sums[3] += p.grad_error;
        sums[4] += p.u0_error;
        sums[5] = sums[5].max(p.e0_max);
    }
    for s in sums.iter_mut().take(5) {
        *s = s.max(0.0).sqrt();
    }
    if sums.iter().any(|v| !v.is_finite()) {
        return Err(WgError::NonFinite("computing error norms".into()));
    }
    Ok(ErrorNorms(sums))
}

/// Least-squares slope of `log(err)` against `log(h)`.
pub fn fit_rate(h: &[f64], err: &[f64]) -> Result<f64> {
    if h.len() != err.len() {
        return Err(WgError::InvalidArgument(
            "h and error lengths differ".into(),
        ));
    }
    if h.len() < 2 {
        return Err(WgError::InvalidArgument(
            "a rate needs at least two levels".into(),
        ));
    }
    if h.iter().chain(err).any(|v| !(*v > 0.0 && v.is_finite())) {
        return Err(WgError::InvalidArgument(
            "mesh sizes and errors must be positive and finite".into(),
        ));
    }
    let xs: Vec<f64> = h.iter().map(|v| v.ln()).collect();
    let ys: Vec<f64> = err.iter().map(|v| v.ln()).collect();
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(WgError::InvalidArgument("all mesh sizes are equal".into()));
    }
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    Ok(sxy / sxx)
}

/// Rates between consecutive levels.
pub fn pairwise_rates(h: &[f64], err: &[f64]) -> Result<Vec<f64>> {
    (1..h.len())
        .map(|i| fit_rate(&h[i - 1..=i], &err[i - 1..=i]))
        .collect()
}

#[derive(Clone, Debug, PartialEq)]
pub struct LevelRecord {
    pub h: f64,
    pub num_cells: usize,
    pub num_free_dofs: usize,
    pub norms: ErrorNorms,
    pub solver_iterations: usize,
    pub solver_residual: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ErrorReport {
    pub case: String,
    pub quadrature_order: usize,
    pub levels: Vec<LevelRecord>,
}

impl ErrorReport {
    pub fn new(case: impl Into<String>, quadrature_order: usize) -> Self {
        ErrorReport {
            case: case.into(),
            quadrature_order,
            levels: Vec::new(),
        }
    }

    pub fn h(&self) -> Vec<f64> {
        self.levels.iter().map(|l| l.h).collect()
    }

    pub fn metric(&self, m: usize) -> Vec<f64> {
        self.levels.iter().map(|l| l.norms.0[m]).collect()
    }

    /// Least-squares rate per metric.
    pub fn rates(&self) -> Result<[f64; NUM_METRICS]> {
        let h = self.h();
        let mut out = [0.0; NUM_METRICS];
        for (m, r) in out.iter_mut().enumerate() {
            *r = fit_rate(&h, &self.metric(m))?;
        }
        Ok(out)
    }

    /// Rates between consecutive levels, per metric.
    pub fn pairwise_rates(&self) -> Result<Vec<[f64; NUM_METRICS]>> {
        let h = self.h();
        let per_metric: Vec<Vec<f64>> = (0..NUM_METRICS)
            .map(|m| pairwise_rates(&h, &self.metric(m)))
            .collect::<Result<_>>()?;
        Ok((0..h.len().saturating_sub(1))
            .map(|i| std::array::from_fn(|m| per_metric[m][i]))
            .collect())
    }
}
