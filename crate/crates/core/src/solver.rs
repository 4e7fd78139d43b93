//! Linear solvers: Jacobi-preconditioned CG and BiCGStab, and a dense LU
//! used for small systems, as a fallback and as a test oracle.
//!
//! Convergence is always judged on the true relative residual
//! `|b - Ax| / |b|`, recomputed from scratch, never on the recurrence.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use crate::element::{Mat, Vector};
use crate::error::{Result, WgError};
use crate::sparse::CsrMatrix;

/// Systems with fewer free dofs than this are solved by dense LU when the
/// method is `Auto`.
pub const DENSE_THRESHOLD: usize = 3000;

/// Largest system the dense fallback will factor after an iterative failure.
pub const DENSE_FALLBACK_LIMIT: usize = 8000;

/// Relative asymmetry above which CG refuses a matrix.
pub const SYMMETRY_TOL: f64 = 1e-10;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Method {
    /// Dense LU for small systems, else CG if symmetric and BiCGStab if not.
    #[default]
    Auto,
    Cg,
    BiCgStab,
    Lu,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::Auto => "auto",
            Method::Cg => "cg",
            Method::BiCgStab => "bicgstab",
            Method::Lu => "lu",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = WgError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "auto" => Ok(Method::Auto),
            "cg" => Ok(Method::Cg),
            "bicgstab" => Ok(Method::BiCgStab),
            "lu" => Ok(Method::Lu),
            _ => Err(WgError::InvalidArgument(format!("unknown solver `{s}`"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SolverConfig {
    pub method: Method,
    /// Relative residual tolerance, in (0, 1).
    pub tol: f64,
    /// Iteration cap; `None` means `max(1000, 10 n)`.
    pub max_iter: Option<usize>,
    pub jacobi: bool,
    /// Retry with dense LU when an iterative method fails on a small system.
    pub dense_fallback: bool,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            method: Method::Auto,
            tol: 1e-12,
            max_iter: None,
            jacobi: true,
            dense_fallback: true,
        }
    }
}

impl SolverConfig {
    pub fn with_method(mut self, method: Method) -> Self {
        self.method = method;
        self
    }

    pub fn with_tol(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.tol > 0.0 && self.tol < 1.0) {
            return Err(WgError::InvalidArgument(format!(
                "tolerance must lie in (0, 1), got {}",
                self.tol
            )));
        }
        if self.max_iter == Some(0) {
            return Err(WgError::InvalidArgument(
                "max iterations must be at least 1".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SolveReport {
    /// Method that produced the returned solution.
    pub method: Method,
    pub iterations: usize,
    /// True relative residual of the returned solution.
    pub residual: f64,
    /// Recurrence residual per iteration (relative), for diagnostics.
    pub history: Vec<f64>,
    /// Set when an iterative method failed and dense LU took over.
    pub fell_back: bool,
}

fn norm2(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn par_matvec(a: &CsrMatrix, x: &[f64], y: &mut [f64]) {
    y.par_iter_mut()
        .with_min_len(1024)
        .enumerate()
        .for_each(|(r, out)| *out = a.row(r).map(|(c, v)| v * x[c]).sum());
}

/// `|b - Ax| / |b|`, or `|Ax|` when `b = 0`.
pub fn relative_residual(a: &CsrMatrix, x: &[f64], b: &[f64]) -> f64 {
    let ax = a.mul(x);
    let r: Vec<f64> = b.iter().zip(&ax).map(|(bi, ai)| bi - ai).collect();
    let nb = norm2(b);
    if nb == 0.0 {
        norm2(&r)
    } else {
        norm2(&r) / nb
    }
}

fn preconditioner(a: &CsrMatrix, jacobi: bool) -> Vec<f64> {
    a.diagonal()
        .into_iter()
        .map(|d| {
            if jacobi && d != 0.0 && d.is_finite() {
                1.0 / d
            } else {
                1.0
            }
        })
        .collect()
}

fn true_residual(a: &CsrMatrix, x: &[f64], b: &[f64], r: &mut [f64]) {
    par_matvec(a, x, r);
    for (ri, bi) in r.iter_mut().zip(b) {
        *ri = bi - *ri;
    }
}

/// Relative size of the rounding error made when evaluating `b - Ax` in
/// double precision: `m eps | |A||x| + |b| | / |b|`, with `m` the longest row.
pub fn rounding_floor(a: &CsrMatrix, x: &[f64], b: &[f64]) -> f64 {
    let m = (0..a.nrows()).map(|r| a.row(r).count()).max().unwrap_or(0) + 1;
    let s: f64 = (0..a.nrows())
        .map(|r| {
            let v: f64 = a.row(r).map(|(c, v)| (v * x[c]).abs()).sum::<f64>() + b[r].abs();
            v * v
        })
        .sum();
    m as f64 * f64::EPSILON * s.sqrt() / norm2(b)
}

/// Number of restarts after which a true residual at the rounding floor is
/// accepted in place of the requested tolerance.
const STAGNATION_RESTARTS: usize = 3;

fn accept(
    method: &str,
    actual: f64,
    restarts: usize,
    a: &CsrMatrix,
    x: &[f64],
    b: &[f64],
    tol: f64,
) -> bool {
    if actual <= tol {
        return true;
    }
    if restarts >= STAGNATION_RESTARTS {
        let floor = rounding_floor(a, x, b);
        if actual <= floor {
            log::warn!(
                "{method}: residual {actual:.3e} stagnated at the rounding floor {floor:.3e}, above the tolerance {tol:.1e}"
            );
            return true;
        }
    }
    false
}

/// Preconditioned conjugate gradients. Whenever the recurrence residual
/// drops below the tolerance, the true residual is recomputed and the
/// iteration restarts from it if it is not yet small enough.
pub fn cg(a: &CsrMatrix, b: &[f64], cfg: &SolverConfig) -> Result<(Vec<f64>, SolveReport)> {
    let n = b.len();
    let asym = a.max_asymmetry();
    if asym > SYMMETRY_TOL {
        return Err(WgError::NotSymmetric(asym));
    }
    let max_iter = cfg.max_iter.unwrap_or((10 * n).max(1000));
    let minv = preconditioner(a, cfg.jacobi);
    let bnorm = norm2(b);
    let mut x = vec![0.0; n];
    let mut history = Vec::new();
    if bnorm == 0.0 {
        return Ok((x, report(Method::Cg, 0, 0.0, history)));
    }
    let mut r = b.to_vec();
    let mut z: Vec<f64> = r.iter().zip(&minv).map(|(ri, mi)| ri * mi).collect();
    let mut p = z.clone();
    let mut q = vec![0.0; n];
    let mut rz = dot(&r, &z);
    let mut restarts = 0;
    for it in 1..=max_iter {
        par_matvec(a, &p, &mut q);
        let pq = dot(&p, &q);
        if !(pq > 0.0) {
            return Err(WgError::Breakdown {
                method: "cg",
                iteration: it,
                history,
            });
        }
        let alpha = rz / pq;
        for i in 0..n {
            x[i] += alpha * p[i];
            r[i] -= alpha * q[i];
        }
        let rel = norm2(&r) / bnorm;
        history.push(rel);
        if rel <= cfg.tol {
            true_residual(a, &x, b, &mut r);
            let actual = norm2(&r) / bnorm;
            if accept("cg", actual, restarts, a, &x, b, cfg.tol) {
                return Ok((x, report(Method::Cg, it, actual, history)));
            }
            restarts += 1;
            if restarts > 20 {
                break;
            }
            for i in 0..n {
                z[i] = r[i] * minv[i];
            }
            p.copy_from_slice(&z);
            rz = dot(&r, &z);
            continue;
        }
        for i in 0..n {
            z[i] = r[i] * minv[i];
        }
        let rz_new = dot(&r, &z);
        let beta = rz_new / rz;
        rz = rz_new;
        for i in 0..n {
            p[i] = z[i] + beta * p[i];
        }
    }
    Err(WgError::NotConverged {
        method: "cg",
        iterations: history.len(),
        residual: relative_residual(a, &x, b),
        history,
    })
}

/// Right-preconditioned BiCGStab.
pub fn bicgstab(a: &CsrMatrix, b: &[f64], cfg: &SolverConfig) -> Result<(Vec<f64>, SolveReport)> {
    let n = b.len();
    let max_iter = cfg.max_iter.unwrap_or((10 * n).max(1000));
    let minv = preconditioner(a, cfg.jacobi);
    let bnorm = norm2(b);
    let mut x = vec![0.0; n];
    let mut history = Vec::new();
    if bnorm == 0.0 {
        return Ok((x, report(Method::BiCgStab, 0, 0.0, history)));
    }
    let mut r = b.to_vec();
    let mut r_hat = r.clone();
    let (mut rho, mut alpha, mut omega) = (1.0, 1.0, 1.0);
    let mut v = vec![0.0; n];
    let mut p = vec![0.0; n];
    let mut y = vec![0.0; n];
    let mut s = vec![0.0; n];
    let mut t = vec![0.0; n];
    let mut zz = vec![0.0; n];
    let mut restarts = 0;
    let breakdown = |it: usize, history: Vec<f64>| WgError::Breakdown {
        method: "bicgstab",
        iteration: it,
        history,
    };
    for it in 1..=max_iter {
        let rho_new = dot(&r_hat, &r);
        if rho_new == 0.0 || !rho_new.is_finite() {
            return Err(breakdown(it, history));
        }
        let beta = (rho_new / rho) * (alpha / omega);
        rho = rho_new;
        for i in 0..n {
            p[i] = r[i] + beta * (p[i] - omega * v[i]);
            y[i] = p[i] * minv[i];
        }
        par_matvec(a, &y, &mut v);
        let rv = dot(&r_hat, &v);
        if rv == 0.0 || !rv.is_finite() {
            return Err(breakdown(it, history));
        }
        alpha = rho / rv;
        for i in 0..n {
            s[i] = r[i] - alpha * v[i];
        }
        for i in 0..n {
            zz[i] = s[i] * minv[i];
        }
        par_matvec(a, &zz, &mut t);
        let tt = dot(&t, &t);
        omega = if tt > 0.0 { dot(&t, &s) / tt } else { 0.0 };
        for i in 0..n {
            x[i] += alpha * y[i] + omega * zz[i];
            r[i] = s[i] - omega * t[i];
        }
        let rel = norm2(&r) / bnorm;
        history.push(rel);
        if !rel.is_finite() {
            return Err(breakdown(it, history));
        }
        if rel <= cfg.tol {
            true_residual(a, &x, b, &mut r);
            let actual = norm2(&r) / bnorm;
            if accept("bicgstab", actual, restarts, a, &x, b, cfg.tol) {
                return Ok((x, report(Method::BiCgStab, it, actual, history)));
            }
            restarts += 1;
            if restarts > 20 {
                break;
            }
            r_hat.copy_from_slice(&r);
            (rho, alpha, omega) = (1.0, 1.0, 1.0);
            v.fill(0.0);
            p.fill(0.0);
            continue;
        }
        if omega == 0.0 {
            return Err(breakdown(it, history));
        }
    }
    Err(WgError::NotConverged {
        method: "bicgstab",
        iterations: history.len(),
        residual: relative_residual(a, &x, b),
        history,
    })
}

/// Dense LU with partial pivoting.
pub fn dense_lu(a: &CsrMatrix, b: &[f64], cfg: &SolverConfig) -> Result<(Vec<f64>, SolveReport)> {
    let dense: Mat = a.to_dense();
    let lu = dense.lu();
    let x = lu
        .solve(&Vector::from_column_slice(b))
        .ok_or(WgError::Breakdown {
            method: "lu",
            iteration: 0,
            history: Vec::new(),
        })?;
    let x: Vec<f64> = x.iter().copied().collect();
    let residual = relative_residual(a, &x, b);
    if !(residual <= cfg.tol) {
        return Err(WgError::NotConverged {
            method: "lu",
            iterations: 1,
            residual,
            history: vec![residual],
        });
    }
    Ok((x, report(Method::Lu, 1, residual, vec![residual])))
}

fn report(method: Method, iterations: usize, residual: f64, history: Vec<f64>) -> SolveReport {
    SolveReport {
        method,
        iterations,
        residual,
        history,
        fell_back: false,
    }
}

/// Solves `Ax = b` with the configured method. The returned solution
/// satisfies the residual tolerance, or, for the iterative methods, has a
/// residual that stagnated at the rounding floor (see [`rounding_floor`]);
/// otherwise an error carrying the residual history is returned.
pub fn solve(a: &CsrMatrix, b: &[f64], cfg: &SolverConfig) -> Result<(Vec<f64>, SolveReport)> {
    cfg.validate()?;
    if a.nrows() != a.ncols() || a.nrows() != b.len() {
        return Err(WgError::InvalidArgument(format!(
            "system is {}x{} with a right-hand side of length {}",
            a.nrows(),
            a.ncols(),
            b.len()
        )));
    }
    let n = b.len();
    let method = match cfg.method {
        Method::Auto if n < DENSE_THRESHOLD => Method::Lu,
        Method::Auto if a.max_asymmetry() <= SYMMETRY_TOL => Method::Cg,
        Method::Auto => Method::BiCgStab,
        m => m,
    };
    let attempt = match method {
        Method::Cg => cg(a, b, cfg),
        Method::BiCgStab => bicgstab(a, b, cfg),
        _ => return dense_lu(a, b, cfg),
    };
    match attempt {
        Err(err @ (WgError::NotConverged { .. } | WgError::Breakdown { .. }))
            if cfg.dense_fallback && n <= DENSE_FALLBACK_LIMIT =>
        {
            log::warn!("{err}; retrying with dense LU");
            let (x, mut rep) = dense_lu(a, b, cfg)?;
            rep.fell_back = true;
            Ok((x, rep))
        }
        other => other,
    }
}
