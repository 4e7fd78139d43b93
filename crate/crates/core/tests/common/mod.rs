//! Cell generators and element-level checks shared by the property suite
//! and the acceptance runner.
#![allow(dead_code)]

use std::sync::Arc;

use proptest::prelude::*;
use proptest::test_runner::{Config, TestCaseError, TestRunner};

use wgfem::element::{
    basis_for, closed_dzt, discrete_gradient, dk_closed_edge_normal, dkinv_closed,
    dkinv_closed_triangle, evaluate_gradient, invert_dense, local_abc, local_dzt, local_kernel,
    local_stiffness, poisson_triangle_closed, Mat, TriangleBasis, Vector,
};
use wgfem::mesh::{CellGeometry, CellKind, Point};
use wgfem::problem::{constant, Coefficients};
use wgfem::quadrature::RuleSet;

pub const BASES: [TriangleBasis; 2] = [TriangleBasis::EdgeNormal, TriangleBasis::Centered];

/// Number of random cells per property; `PROPTEST_CASES` may raise it.
pub const CASES: u32 = 256;

pub fn cases() -> u32 {
    CASES.max(Config::default().cases)
}

pub fn rules() -> RuleSet {
    RuleSet::new(5).unwrap()
}

/// Largest entry of `a - b` relative to the largest entry of `b`.
pub fn rel_diff(a: &Mat, b: &Mat) -> f64 {
    (a - b).amax() / b.amax().max(f64::MIN_POSITIVE)
}

fn edge2(a: &Point, b: &Point) -> f64 {
    (a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2)
}

/// Counterclockwise triangles in `[-2, 2]^2` with area at least 5% of the
/// squared longest edge.
pub fn triangle() -> impl Strategy<Value = CellGeometry> {
    prop::array::uniform6(-2.0f64..2.0).prop_filter_map("sliver triangle", |c| {
        let mut p = [[c[0], c[1], 0.0], [c[2], c[3], 0.0], [c[4], c[5], 0.0]];
        let cross =
            (p[1][0] - p[0][0]) * (p[2][1] - p[0][1]) - (p[2][0] - p[0][0]) * (p[1][1] - p[0][1]);
        if cross < 0.0 {
            p.swap(1, 2);
        }
        let longest = edge2(&p[0], &p[1])
            .max(edge2(&p[1], &p[2]))
            .max(edge2(&p[2], &p[0]));
        if cross.abs() / 2.0 < 0.05 * longest {
            return None;
        }
        CellGeometry::triangle(p).ok()
    })
}

/// Axis-aligned rectangles and boxes with sides in `[0.1, 3]`.
pub fn tensor_cell(dim: usize) -> impl Strategy<Value = CellGeometry> {
    (
        prop::array::uniform3(-1.0f64..1.0),
        prop::array::uniform3(0.1f64..3.0),
    )
        .prop_map(move |(mut origin, sides)| {
            if dim == 2 {
                origin[2] = 0.0;
            }
            CellGeometry::tensor(origin, sides, dim).unwrap()
        })
}

/// Variable symmetric positive definite diffusion, convection and reaction.
pub fn general_coefficients() -> Coefficients {
    Coefficients {
        a: Arc::new(|p: &Point| {
            [
                [2.0 + p[0] * p[0], 0.5 * p[1], 0.1],
                [0.5 * p[1], 1.5 + p[1] * p[1], 0.2 * p[0]],
                [0.1, 0.2 * p[0], 3.0],
            ]
        }),
        beta: Some(Arc::new(|p: &Point| [1.0 + p[1], p[0] - 0.5, 0.3])),
        gamma: Some(Arc::new(|p: &Point| 1.0 + p[0] * p[0])),
        f: constant(1.0),
    }
}

/// Variable diffusion only.
pub fn diffusion_only() -> Coefficients {
    Coefficients {
        beta: None,
        gamma: None,
        ..general_coefficients()
    }
}

fn triangle_bases(cell: &CellGeometry) -> &'static [TriangleBasis] {
    if cell.kind == CellKind::Triangle {
        &BASES
    } else {
        &BASES[..1]
    }
}

/// The weak-gradient map `[-D^{-1} Z | D^{-1} T]` has a one-dimensional
/// kernel spanned by the constants.
pub fn check_kernel_rank(cell: &CellGeometry) -> Result<(), TestCaseError> {
    let rules = rules();
    for &approach in triangle_bases(cell) {
        let basis = basis_for(cell, approach).unwrap();
        let dzt = local_dzt(&basis, cell, &rules).unwrap();
        let d_inv = invert_dense(&dzt.d).unwrap();
        let g0 = -(&d_inv * &dzt.z);
        let gb = &d_inv * &dzt.t;
        let n = 1 + basis.nb;
        let mut g = Mat::zeros(basis.nv(), n);
        g.view_mut((0, 0), (basis.nv(), 1)).copy_from(&g0);
        g.view_mut((0, 1), (basis.nv(), basis.nb)).copy_from(&gb);
        let sv = g.clone().svd(false, false).singular_values;
        let largest = sv.max();
        let rank = sv.iter().filter(|&&s| s > 1e-10 * largest).count();
        prop_assert_eq!(n - rank, 1, "nullity on {:?}", cell.kind);
        let ones = &g * Vector::from_element(n, 1.0);
        prop_assert!(
            ones.amax() <= 1e-12 * largest,
            "constants not in kernel: {}",
            ones.amax()
        );
    }
    Ok(())
}

type TestFn = fn(&Point) -> (f64, Point);

/// `1, x, y, z, xy, x^2` with their gradients.
pub const PROJECTION_FUNCTIONS: [(&str, TestFn); 6] = [
    ("1", |_| (1.0, [0.0; 3])),
    ("x", |p| (p[0], [1.0, 0.0, 0.0])),
    ("y", |p| (p[1], [0.0, 1.0, 0.0])),
    ("z", |p| (p[2], [0.0, 0.0, 1.0])),
    ("xy", |p| (p[0] * p[1], [p[1], p[0], 0.0])),
    ("x^2", |p| (p[0] * p[0], [2.0 * p[0], 0.0, 0.0])),
];

/// The weak gradient of the projection of `w` equals the L2 projection of
/// `grad w` onto the gradient space.
pub fn check_projection_commutes(cell: &CellGeometry) -> Result<(), TestCaseError> {
    let rules = rules();
    let cell_pts = rules.cell_points(cell);
    for &approach in triangle_bases(cell) {
        let basis = basis_for(cell, approach).unwrap();
        let dzt = closed_dzt(&basis, cell).unwrap();
        let d_inv = dkinv_closed(&basis, cell).unwrap();
        for (name, w) in PROJECTION_FUNCTIONS {
            let v0 = cell_pts.iter().map(|(p, q)| q * w(p).0).sum::<f64>() / cell.measure;
            let vb: Vec<f64> = cell
                .faces
                .iter()
                .map(|f| {
                    rules
                        .face_points(f)
                        .iter()
                        .map(|(p, q)| q * w(p).0)
                        .sum::<f64>()
                        / f.measure
                })
                .collect();
            let weak = discrete_gradient(&dzt, &d_inv, v0, &vb);
            let mut rhs = Vector::zeros(basis.nv());
            for (p, q) in &cell_pts {
                let g = w(p).1;
                for i in 0..basis.nv() {
                    let chi = basis.chi(i, p);
                    rhs[i] += q * (g[0] * chi[0] + g[1] * chi[1] + g[2] * chi[2]);
                }
            }
            let projected = &d_inv * rhs;
            // Size of the terms that cancel in the weak gradient.
            let terms = dzt.t.abs() * Vector::from_iterator(vb.len(), vb.iter().map(|v| v.abs()))
                + dzt.z.column(0).abs() * v0.abs();
            let scale = (d_inv.abs() * terms).amax().max(projected.amax());
            let diff = (&weak - &projected).amax();
            prop_assert!(
                diff <= 1e-12 * scale,
                "w = {} on {:?} ({:?}): difference {:e}",
                name,
                cell.kind,
                approach,
                diff
            );
        }
    }
    Ok(())
}

/// Closed-form D, Z, T and D^{-1} against quadrature and dense inversion.
pub fn check_closed_forms(cell: &CellGeometry) -> Result<(), TestCaseError> {
    let rules = rules();
    for &approach in triangle_bases(cell) {
        let basis = basis_for(cell, approach).unwrap();
        let closed = closed_dzt(&basis, cell).unwrap();
        let quad = local_dzt(&basis, cell, &rules).unwrap();
        prop_assert!(
            rel_diff(&closed.d, &quad.d) <= 1e-12,
            "D: {:e}",
            rel_diff(&closed.d, &quad.d)
        );
        prop_assert!(
            rel_diff(&closed.z, &quad.z) <= 1e-12,
            "Z: {:e}",
            rel_diff(&closed.z, &quad.z)
        );
        prop_assert!(
            rel_diff(&closed.t, &quad.t) <= 1e-12,
            "T: {:e}",
            rel_diff(&closed.t, &quad.t)
        );
        let inv = dkinv_closed(&basis, cell).unwrap();
        let oracle = invert_dense(&quad.d).unwrap();
        prop_assert!(
            rel_diff(&inv, &oracle) <= 1e-12,
            "D^-1: {:e}",
            rel_diff(&inv, &oracle)
        );
    }
    if cell.kind == CellKind::Triangle {
        let basis = basis_for(cell, TriangleBasis::EdgeNormal).unwrap();
        let quad = local_dzt(&basis, cell, &rules).unwrap();
        let d = dk_closed_edge_normal(cell).unwrap();
        prop_assert!(rel_diff(&d, &quad.d) <= 1e-12);
        let inv = dkinv_closed_triangle(cell).unwrap();
        let identity = &d * &inv;
        prop_assert!((identity - Mat::identity(3, 3)).amax() <= 1e-11);
    }
    Ok(())
}

/// Closed-form Poisson stiffness on triangles against the quadrature route
/// for both triangle bases.
pub fn check_poisson_blocks(cell: &CellGeometry) -> Result<(), TestCaseError> {
    let rules = rules();
    let closed = poisson_triangle_closed(cell).unwrap().full();
    let coeffs = Coefficients::poisson(constant(0.0));
    for approach in BASES {
        let basis = basis_for(cell, approach).unwrap();
        let dzt = local_dzt(&basis, cell, &rules).unwrap();
        let d_inv = invert_dense(&dzt.d).unwrap();
        let abc = local_abc(&basis, cell, &coeffs, &rules).unwrap();
        let quad = local_stiffness(&dzt, &d_inv, &abc).full();
        let diff = rel_diff(&closed, &quad);
        prop_assert!(diff <= 1e-12, "{:?}: {:e}", approach, diff);
    }
    Ok(())
}

/// Both triangle bases give the same local stiffness.
pub fn check_approaches_agree(cell: &CellGeometry) -> Result<(), TestCaseError> {
    let rules = rules();
    let coeffs = general_coefficients();
    let one = local_kernel(cell, TriangleBasis::EdgeNormal, &coeffs, &rules).unwrap();
    let two = local_kernel(cell, TriangleBasis::Centered, &coeffs, &rules).unwrap();
    let diff = rel_diff(&one.stiffness.full(), &two.stiffness.full());
    prop_assert!(diff <= 1e-11, "approaches differ by {:e}", diff);
    Ok(())
}

/// `M_K[i][j]` equals `a(phi_j, phi_i)` evaluated directly by quadrature.
pub fn check_bilinear_form(cell: &CellGeometry) -> Result<(), TestCaseError> {
    let rules = rules();
    let coeffs = general_coefficients();
    for &approach in triangle_bases(cell) {
        let kernel = local_kernel(cell, approach, &coeffs, &rules).unwrap();
        let m = kernel.stiffness.full();
        let basis = basis_for(cell, approach).unwrap();
        let dzt = local_dzt(&basis, cell, &rules).unwrap();
        let d_inv = invert_dense(&dzt.d).unwrap();
        let n = 1 + basis.nb;
        let unit = |j: usize| -> (f64, Vec<f64>) {
            let v0 = if j == 0 { 1.0 } else { 0.0 };
            let vb = (0..basis.nb)
                .map(|k| if k + 1 == j { 1.0 } else { 0.0 })
                .collect();
            (v0, vb)
        };
        let grads: Vec<Vector> = (0..n)
            .map(|j| {
                let (v0, vb) = unit(j);
                discrete_gradient(&dzt, &d_inv, v0, &vb)
            })
            .collect();
        let mut direct = Mat::zeros(n, n);
        for (p, w) in rules.cell_points(cell) {
            let a = (coeffs.a)(&p);
            let beta = coeffs.beta.as_ref().unwrap()(&p);
            let gamma = coeffs.gamma.as_ref().unwrap()(&p);
            let g: Vec<Point> = grads
                .iter()
                .map(|c| evaluate_gradient(&basis, c, &p))
                .collect();
            for i in 0..n {
                let vi0 = unit(i).0;
                for j in 0..n {
                    let vj0 = unit(j).0;
                    let ag: Vec<f64> = (0..3)
                        .map(|r| (0..3).map(|c| a[r][c] * g[j][c]).sum())
                        .collect();
                    let diffusion: f64 = (0..3).map(|r| ag[r] * g[i][r]).sum();
                    let convection: f64 = (0..3).map(|r| beta[r] * g[j][r]).sum::<f64>() * vi0;
                    direct[(i, j)] += w * (diffusion + convection + gamma * vj0 * vi0);
                }
            }
        }
        let diff = rel_diff(&m, &direct);
        prop_assert!(diff <= 1e-12, "{:?} {:?}: {:e}", cell.kind, approach, diff);
    }
    Ok(())
}

/// Without convection and reaction the local stiffness is symmetric
/// positive semidefinite with the constants as its null space.
pub fn check_semidefinite(cell: &CellGeometry) -> Result<(), TestCaseError> {
    let rules = rules();
    let coeffs = diffusion_only();
    for &approach in triangle_bases(cell) {
        let m = local_kernel(cell, approach, &coeffs, &rules)
            .unwrap()
            .stiffness
            .full();
        let scale = m.amax();
        prop_assert!((&m - m.transpose()).amax() <= 1e-12 * scale);
        let eig = m.clone().symmetric_eigen().eigenvalues;
        prop_assert!(
            eig.min() >= -1e-12 * scale,
            "negative eigenvalue {:e}",
            eig.min()
        );
        let zero = eig.iter().filter(|&&e| e.abs() <= 1e-10 * scale).count();
        prop_assert_eq!(zero, 1);
        let ones = &m * Vector::from_element(m.ncols(), 1.0);
        prop_assert!(ones.amax() <= 1e-12 * scale);
    }
    Ok(())
}

/// One named element property with its cell generator.
pub struct Suite {
    pub name: &'static str,
    pub run: fn(&mut TestRunner) -> Result<(), String>,
}

fn run_with<S: Strategy<Value = CellGeometry>>(
    runner: &mut TestRunner,
    strategy: S,
    check: fn(&CellGeometry) -> Result<(), TestCaseError>,
) -> Result<(), String> {
    runner
        .run(&strategy, |cell| check(&cell))
        .map_err(|e| e.to_string())
}

/// Triangles, rectangles and boxes, `CASES` of each.
fn run_all_cells(
    runner: &mut TestRunner,
    check: fn(&CellGeometry) -> Result<(), TestCaseError>,
) -> Result<(), String> {
    run_with(runner, triangle(), check)?;
    run_with(runner, tensor_cell(2), check)?;
    run_with(runner, tensor_cell(3), check)
}

/// Every element property, for runners outside the `proptest!` macro.
pub const SUITES: [Suite; 7] = [
    Suite {
        name: "kernel rank",
        run: |r| run_all_cells(r, check_kernel_rank),
    },
    Suite {
        name: "projection commutes with the weak gradient",
        run: |r| run_all_cells(r, check_projection_commutes),
    },
    Suite {
        name: "closed-form D, Z, T and D^-1",
        run: |r| run_all_cells(r, check_closed_forms),
    },
    Suite {
        name: "closed-form Poisson blocks",
        run: |r| run_with(r, triangle(), check_poisson_blocks),
    },
    Suite {
        name: "triangle bases agree",
        run: |r| run_with(r, triangle(), check_approaches_agree),
    },
    Suite {
        name: "stiffness equals the bilinear form",
        run: |r| run_all_cells(r, check_bilinear_form),
    },
    Suite {
        name: "diffusion stiffness is semidefinite",
        run: |r| run_all_cells(r, check_semidefinite),
    },
];

pub fn runner() -> TestRunner {
    TestRunner::new(Config {
        cases: cases(),
        failure_persistence: None,
        ..Config::default()
    })
}
