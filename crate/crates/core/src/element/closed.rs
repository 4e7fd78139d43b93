//! Closed-form local matrices. Each of these has a quadrature counterpart in
//! `kernel.rs`; the two routes are checked against each other in tests.

use super::kernel::{Dzt, LocalStiffness};
use super::{Mat, TriangleBasis, WgBasis};
use crate::error::{Result, WgError};
use crate::mesh::{CellGeometry, CellKind};

/// Squared edge lengths `l_i` and their sum.
fn squared_edges(cell: &CellGeometry) -> ([f64; 3], f64) {
    let l = [0, 1, 2].map(|i| cell.faces[i].measure.powi(2));
    (l, l[0] + l[1] + l[2])
}

fn check_triangle(cell: &CellGeometry) -> Result<()> {
    if cell.kind != CellKind::Triangle {
        return Err(WgError::InvalidArgument("expected a triangle".into()));
    }
    if !(cell.measure > 0.0) {
        return Err(WgError::DegenerateCell {
            cell: 0,
            measure: cell.measure,
        });
    }
    Ok(())
}

/// Mass matrix of the edge-normal basis from edge lengths only.
pub fn dk_closed_edge_normal(cell: &CellGeometry) -> Result<Mat> {
    check_triangle(cell)?;
    let (l, _) = squared_edges(cell);
    let e = [0, 1, 2].map(|i| cell.faces[i].measure);
    let lij = |i: usize, j: usize| l[i] + l[j];
    let inner = Mat::from_row_slice(
        3,
        3,
        &[
            3.0 * lij(1, 2) - l[0],
            lij(0, 1) - 3.0 * l[2],
            lij(0, 2) - 3.0 * l[1],
            lij(0, 1) - 3.0 * l[2],
            3.0 * lij(0, 2) - l[1],
            lij(1, 2) - 3.0 * l[0],
            lij(0, 2) - 3.0 * l[1],
            lij(1, 2) - 3.0 * l[0],
            3.0 * lij(0, 1) - l[2],
        ],
    );
    let scale = 1.0 / (48.0 * cell.measure);
    Ok(Mat::from_fn(3, 3, |i, j| {
        scale * e[i] * e[j] * inner[(i, j)]
    }))
}

/// The symmetric matrix shared by the closed-form inverse of the edge-normal
/// mass matrix and the Poisson face block:
/// `16|K|/l123 · ones + 1/(2|K|) · [[2l1, l3-l12, l2-l13], ...]`.
fn face_coupling(cell: &CellGeometry) -> Mat {
    let (l, l123) = squared_edges(cell);
    let area = cell.measure;
    let lij = |i: usize, j: usize| l[i] + l[j];
    let second = [
        [2.0 * l[0], l[2] - lij(0, 1), l[1] - lij(0, 2)],
        [l[2] - lij(0, 1), 2.0 * l[1], l[0] - lij(1, 2)],
        [l[1] - lij(0, 2), l[0] - lij(1, 2), 2.0 * l[2]],
    ];
    Mat::from_fn(3, 3, |i, j| {
        16.0 * area / l123 + second[i][j] / (2.0 * area)
    })
}

/// Closed-form inverse of the edge-normal mass matrix:
/// `T^{-t} · coupling · T^{-1}` with `T = diag(|e_i|)`.
pub fn dkinv_closed_triangle(cell: &CellGeometry) -> Result<Mat> {
    check_triangle(cell)?;
    let e = [0, 1, 2].map(|i| cell.faces[i].measure);
    let m = face_coupling(cell);
    Ok(Mat::from_fn(3, 3, |i, j| m[(i, j)] / (e[i] * e[j])))
}

/// Closed-form Poisson stiffness on a triangle (any basis yields the same
/// matrix).
pub fn poisson_triangle_closed(cell: &CellGeometry) -> Result<LocalStiffness> {
    check_triangle(cell)?;
    let (_, l123) = squared_edges(cell);
    let area = cell.measure;
    let m0b = Mat::from_element(1, 3, -48.0 * area / l123);
    Ok(LocalStiffness {
        m00: Mat::from_element(1, 1, 144.0 * area / l123),
        mb0: m0b.transpose(),
        m0b,
        mbb: face_coupling(cell),
    })
}

/// Closed-form D_K, Z_K, T_K for every supported basis.
pub fn closed_dzt(basis: &WgBasis, cell: &CellGeometry) -> Result<Dzt> {
    match (cell.kind, basis.triangle_basis) {
        (CellKind::Triangle, Some(TriangleBasis::EdgeNormal)) => {
            let e: Vec<f64> = cell.faces.iter().map(|f| f.measure).collect();
            Ok(Dzt {
                d: dk_closed_edge_normal(cell)?,
                z: Mat::from_column_slice(3, 1, &e),
                t: Mat::from_diagonal(&nalgebra::DVector::from_vec(e)),
            })
        }
        (CellKind::Triangle, Some(TriangleBasis::Centered)) => {
            check_triangle(cell)?;
            let (_, l123) = squared_edges(cell);
            let area = cell.measure;
            let p = &cell.vertices;
            let (x, y) = ([p[0][0], p[1][0], p[2][0]], [p[0][1], p[1][1], p[2][1]]);
            let third = 2.0 * area / 3.0;
            Ok(Dzt {
                d: Mat::from_diagonal(&nalgebra::DVector::from_vec(vec![
                    area,
                    area,
                    area * l123 / 36.0,
                ])),
                z: Mat::from_column_slice(3, 1, &[0.0, 0.0, 2.0 * area]),
                t: Mat::from_row_slice(
                    3,
                    3,
                    &[
                        y[2] - y[1],
                        y[0] - y[2],
                        y[1] - y[0],
                        x[1] - x[2],
                        x[2] - x[0],
                        x[0] - x[1],
                        third,
                        third,
                        third,
                    ],
                ),
            })
        }
        (CellKind::Rect | CellKind::Box, _) => {
            let n = basis.nv();
            let faces: Vec<f64> = cell.faces.iter().map(|f| f.measure).collect();
            let mut d = Mat::zeros(n, n);
            for pair in 0..n / 2 {
                let (i, j) = (2 * pair, 2 * pair + 1);
                d[(i, i)] = 2.0;
                d[(j, j)] = 2.0;
                d[(i, j)] = -1.0;
                d[(j, i)] = -1.0;
            }
            Ok(Dzt {
                d: d * (cell.measure / 6.0),
                z: Mat::from_column_slice(n, 1, &faces),
                t: Mat::from_diagonal(&nalgebra::DVector::from_vec(faces)),
            })
        }
        (CellKind::Triangle, None) => Err(WgError::InvalidArgument(
            "triangle basis without a basis choice".into(),
        )),
    }
}

/// Closed-form inverse of D_K for every supported basis.
pub fn dkinv_closed(basis: &WgBasis, cell: &CellGeometry) -> Result<Mat> {
    match (cell.kind, basis.triangle_basis) {
        (CellKind::Triangle, Some(TriangleBasis::EdgeNormal)) => dkinv_closed_triangle(cell),
        (CellKind::Triangle, _) => {
            check_triangle(cell)?;
            let (_, l123) = squared_edges(cell);
            let area = cell.measure;
            Ok(Mat::from_diagonal(&nalgebra::DVector::from_vec(vec![
                1.0 / area,
                1.0 / area,
                36.0 / (area * l123),
            ])))
        }
        _ => {
            let n = basis.nv();
            let mut d = Mat::zeros(n, n);
            for pair in 0..n / 2 {
                let (i, j) = (2 * pair, 2 * pair + 1);
                d[(i, i)] = 2.0;
                d[(j, j)] = 2.0;
                d[(i, j)] = 1.0;
                d[(j, i)] = 1.0;
            }
            Ok(d * (2.0 / cell.measure))
        }
    }
}
