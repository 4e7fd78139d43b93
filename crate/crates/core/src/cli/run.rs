//! Runs a case over its mesh schedule and writes the result tables.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use super::cases::CaseSpec;
use super::reference::ReferenceTable;
use crate::assembly::assemble;
use crate::error::{Result, WgError};
use crate::mesh::{write_mesh_dump, Mesh};
use crate::postprocess::{error_norms, ErrorReport, LevelRecord, METRIC_NAMES, NUM_METRICS};
use crate::quadrature::RuleSet;
use crate::solver::solve;

#[derive(Clone, Debug, Default)]
pub struct RunOptions {
    /// Directory for mesh dumps; nothing is written when `None`.
    pub out_dir: Option<PathBuf>,
    pub dump_mesh: bool,
}

/// Solves the case on every level of its schedule.
pub fn run_case(case: &CaseSpec, opts: &RunOptions) -> Result<ErrorReport> {
    case.solver.validate()?;
    let rules = RuleSet::new(case.assembly.quadrature_order)?;
    let mut report = ErrorReport::new(case.id.clone(), case.assembly.quadrature_order);
    let mut prev: Option<Mesh> = None;
    for level in 0..case.schedule.len() {
        let start = Instant::now();
        let mesh = case.schedule.build(level, prev.as_ref())?;
        if opts.dump_mesh {
            if let Some(dir) = &opts.out_dir {
                let path = dir.join(format!("{}_mesh_{level}.txt", case.id));
                std::fs::write(&path, write_mesh_dump(&mesh))?;
            }
        }
        let system = assemble(&mesh, &case.problem, &case.assembly)?;
        let (x, solve_report) = solve(&system.matrix, &system.rhs, &case.solver)?;
        let uh = system.expand(&x);
        let norms = error_norms(
            &mesh,
            &system.kernels,
            &uh,
            &*case.exact.u,
            &*case.exact.grad,
            &rules,
        )?;
        log::info!(
            "case {} level {level}: {} cells, {} dofs, {} in {} iterations (residual {:.2e}), {:.2?}",
            case.id,
            mesh.num_cells(),
            system.dofmap.num_free,
            solve_report.method,
            solve_report.iterations,
            solve_report.residual,
            start.elapsed()
        );
        report.levels.push(LevelRecord {
            h: mesh.h(),
            num_cells: mesh.num_cells(),
            num_free_dofs: system.dofmap.num_free,
            norms,
            solver_iterations: solve_report.iterations,
            solver_residual: solve_report.residual,
        });
        prev = Some(mesh);
    }
    Ok(report)
}

/// Scientific notation with six significant digits and a two-digit
/// exponent, e.g. `7.14000e-01`.
pub fn sci(v: f64) -> String {
    if !v.is_finite() {
        return v.to_string();
    }
    let s = format!("{v:.5e}");
    let (mantissa, exp) = s.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    let sign = if exp < 0 { '-' } else { '+' };
    format!("{mantissa}e{sign}{:02}", exp.abs())
}

/// Per-level errors, `level,h,cells,dofs,<metrics>`, followed by a `rate`
/// row with the least-squares rates once there are two levels.
pub fn errors_csv(report: &ErrorReport) -> Result<String> {
    let mut out = format!("level,h,cells,dofs,{}\n", METRIC_NAMES.join(","));
    for (i, l) in report.levels.iter().enumerate() {
        let _ = write!(out, "{i},{},{},{}", sci(l.h), l.num_cells, l.num_free_dofs);
        for v in l.norms.0 {
            let _ = write!(out, ",{}", sci(v));
        }
        out.push('\n');
    }
    if report.levels.len() >= 2 {
        out.push_str("rate,,,");
        for r in report.rates()? {
            let _ = write!(out, ",{}", sci(r));
        }
        out.push('\n');
    }
    Ok(out)
}

/// Rates per metric: the least-squares fit over all levels followed by the
/// rates between consecutive levels. Only the header is written when fewer
/// than two levels exist.
pub fn rates_csv(report: &ErrorReport) -> Result<String> {
    let n = report.levels.len();
    let mut out = String::from("metric,rate");
    for i in 1..n {
        let _ = write!(out, ",rate_{}_{}", i - 1, i);
    }
    out.push('\n');
    if n < 2 {
        return Ok(out);
    }
    let fit = report.rates()?;
    let pairs = report.pairwise_rates()?;
    for m in 0..NUM_METRICS {
        let _ = write!(out, "{},{}", METRIC_NAMES[m], sci(fit[m]));
        for p in &pairs {
            let _ = write!(out, ",{}", sci(p[m]));
        }
        out.push('\n');
    }
    Ok(out)
}

/// Writes `<case>_errors.csv` and `<case>_rates.csv` into `dir`.
pub fn emit_csv(report: &ErrorReport, dir: &Path) -> Result<(PathBuf, PathBuf)> {
    std::fs::create_dir_all(dir)?;
    let errors = dir.join(format!("{}_errors.csv", report.case));
    let rates = dir.join(format!("{}_rates.csv", report.case));
    std::fs::write(&errors, errors_csv(report)?)?;
    std::fs::write(&rates, rates_csv(report)?)?;
    Ok((errors, rates))
}

/// Side-by-side comparison with a published table, level by level.
pub fn compare_with(report: &ErrorReport, table: &ReferenceTable) -> Result<String> {
    let mut out = String::new();
    let _ = writeln!(out, "case {}: computed / published", report.case);
    for (i, l) in report.levels.iter().enumerate() {
        let Some((_, reference)) = table.rows.get(i) else {
            let _ = writeln!(out, "level {i}: no published row");
            continue;
        };
        let _ = write!(out, "level {i} h={}", sci(l.h));
        for m in 0..NUM_METRICS {
            let _ = write!(
                out,
                "  {}: {} / {}",
                METRIC_NAMES[m],
                sci(l.norms.0[m]),
                sci(reference[m])
            );
        }
        out.push('\n');
    }
    if report.levels.len() >= 2 {
        let rates = report.rates()?;
        let _ = write!(out, "rates");
        for m in 0..NUM_METRICS {
            let _ = write!(
                out,
                "  {}: {:.4} / {:.4}",
                METRIC_NAMES[m], rates[m], table.rates[m]
            );
        }
        out.push('\n');
    }
    Ok(out)
}

/// Errors unless every reported number is finite.
pub fn check_finite(report: &ErrorReport) -> Result<()> {
    for (i, l) in report.levels.iter().enumerate() {
        if l.norms.0.iter().any(|v| !v.is_finite()) {
            return Err(WgError::NonFinite(format!("error norms on level {i}")));
        }
    }
    Ok(())
}
