//! Lowest-order weak Galerkin elements: one constant unknown inside each
//! cell, one constant unknown per face, and the lowest-order Raviart–Thomas
//! space for the discrete weak gradient.
//!
//! All gradient-space basis fields of these elements are affine, so they are
//! stored as `offset + linear · x` and evaluated exactly.

mod closed;
mod kernel;

use crate::error::{Result, WgError};
use crate::mesh::{CellGeometry, CellKind, FaceGeometry, Point};

pub use closed::{
    closed_dzt, dk_closed_edge_normal, dkinv_closed, dkinv_closed_triangle, poisson_triangle_closed,
};
pub use kernel::{
    discrete_gradient, evaluate_gradient, invert_dense, local_abc, local_dzt, local_kernel,
    local_stiffness, Abc, Dzt, LocalKernel, LocalStiffness,
};

pub type Mat = nalgebra::DMatrix<f64>;
pub type Vector = nalgebra::DVector<f64>;

/// Vector field `offset + linear · x`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AffineField {
    pub offset: Point,
    pub linear: [[f64; 3]; 3],
}

impl AffineField {
    pub fn constant(offset: Point) -> AffineField {
        AffineField {
            offset,
            linear: [[0.0; 3]; 3],
        }
    }

    /// `scale · (x - center)` restricted to the first `dim` components.
    pub fn radial(scale: f64, center: Point, dim: usize) -> AffineField {
        let mut f = AffineField::constant([0.0; 3]);
        for k in 0..dim {
            f.linear[k][k] = scale;
            f.offset[k] = -scale * center[k];
        }
        f
    }

    pub fn eval(&self, p: &Point) -> Point {
        let mut v = self.offset;
        for (r, row) in self.linear.iter().enumerate() {
            v[r] += row[0] * p[0] + row[1] * p[1] + row[2] * p[2];
        }
        v
    }

    pub fn div(&self) -> f64 {
        self.linear[0][0] + self.linear[1][1] + self.linear[2][2]
    }
}

/// Choice of gradient-space basis on triangles.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum TriangleBasis {
    /// Edge-normal Raviart–Thomas basis: `chi_i · n_j = delta_ij` on edge `j`.
    EdgeNormal,
    /// `(1, 0)`, `(0, 1)`, `x - barycenter`; the mass matrix is diagonal.
    #[default]
    Centered,
}

#[derive(Clone, Debug)]
pub struct WgBasis {
    pub kind: CellKind,
    pub triangle_basis: Option<TriangleBasis>,
    /// Gradient-space basis fields.
    pub fields: Vec<AffineField>,
    /// Interior unknowns (constants: always one).
    pub n0: usize,
    /// Face unknowns: one indicator per face in local order.
    pub nb: usize,
}

impl WgBasis {
    pub fn nv(&self) -> usize {
        self.fields.len()
    }

    pub fn phi0(&self, _i: usize, _p: &Point) -> f64 {
        1.0
    }

    /// Face indicator: 1 on local face `i`, 0 on the others.
    pub fn phib(&self, i: usize, face: usize) -> f64 {
        if i == face {
            1.0
        } else {
            0.0
        }
    }

    pub fn chi(&self, i: usize, p: &Point) -> Point {
        self.fields[i].eval(p)
    }

    pub fn div_chi(&self, i: usize) -> f64 {
        self.fields[i].div()
    }

    pub fn chi_dot_n(&self, i: usize, face: &FaceGeometry, p: &Point) -> f64 {
        crate::mesh::dot(&self.fields[i].eval(p), &face.normal)
    }
}

/// Lowest-order Raviart–Thomas basis on a counterclockwise triangle.
pub fn basis_triangle_rt0(cell: &CellGeometry, approach: TriangleBasis) -> Result<WgBasis> {
    if cell.kind != CellKind::Triangle {
        return Err(WgError::InvalidArgument(
            "triangle basis on a non-triangle".into(),
        ));
    }
    if !(cell.measure > 0.0) {
        return Err(WgError::DegenerateCell {
            cell: 0,
            measure: cell.measure,
        });
    }
    let fields = match approach {
        TriangleBasis::EdgeNormal => (0..3)
            .map(|i| {
                AffineField::radial(
                    cell.faces[i].measure / (2.0 * cell.measure),
                    cell.vertices[i],
                    2,
                )
            })
            .collect(),
        TriangleBasis::Centered => vec![
            AffineField::constant([1.0, 0.0, 0.0]),
            AffineField::constant([0.0, 1.0, 0.0]),
            AffineField::radial(1.0, cell.centroid(), 2),
        ],
    };
    Ok(WgBasis {
        kind: CellKind::Triangle,
        triangle_basis: Some(approach),
        fields,
        n0: 1,
        nb: 3,
    })
}

/// Lowest-order Raviart–Thomas basis on an axis-aligned rectangle or box:
/// per axis, `(x/a - 1) e_x` and `(x/a) e_x` in local coordinates.
pub fn basis_box_rt0(cell: &CellGeometry) -> Result<WgBasis> {
    let dim = match cell.kind {
        CellKind::Rect => 2,
        CellKind::Box => 3,
        CellKind::Triangle => {
            return Err(WgError::InvalidArgument("box basis on a triangle".into()));
        }
    };
    if cell.sides[..dim].iter().any(|&s| !(s > 0.0)) {
        return Err(WgError::DegenerateCell {
            cell: 0,
            measure: cell.measure,
        });
    }
    let origin = cell.vertices[0];
    let mut fields = Vec::with_capacity(2 * dim);
    for axis in 0..dim {
        let inv = 1.0 / cell.sides[axis];
        for shift in [-1.0, 0.0] {
            let mut f = AffineField::constant([0.0; 3]);
            f.linear[axis][axis] = inv;
            f.offset[axis] = -origin[axis] * inv + shift;
            fields.push(f);
        }
    }
    Ok(WgBasis {
        kind: cell.kind,
        triangle_basis: None,
        fields,
        n0: 1,
        nb: 2 * dim,
    })
}

/// Basis for any supported cell; `approach` only matters for triangles.
pub fn basis_for(cell: &CellGeometry, approach: TriangleBasis) -> Result<WgBasis> {
    match cell.kind {
        CellKind::Triangle => basis_triangle_rt0(cell, approach),
        _ => basis_box_rt0(cell),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn right_triangle() -> CellGeometry {
        CellGeometry::triangle([[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0]]).unwrap()
    }

    #[test]
    fn edge_normal_basis_is_dual_to_edges() {
        let cell =
            CellGeometry::triangle([[0.2, 0.1, 0.0], [1.7, 0.4, 0.0], [0.6, 1.3, 0.0]]).unwrap();
        let b = basis_triangle_rt0(&cell, TriangleBasis::EdgeNormal).unwrap();
        for i in 0..3 {
            for (j, f) in cell.faces.iter().enumerate() {
                for p in &f.vertices {
                    let v = b.chi_dot_n(i, f, p);
                    let expected = if i == j { 1.0 } else { 0.0 };
                    assert!((v - expected).abs() < 1e-14, "chi_{i} . n_{j} = {v}");
                }
            }
        }
    }

    #[test]
    fn centered_basis_uses_barycenter() {
        let cell = right_triangle();
        let c = cell.centroid();
        assert!((c[0] - 1.0 / 3.0).abs() < 1e-16 && (c[1] - 1.0 / 3.0).abs() < 1e-16);
        let b = basis_triangle_rt0(&cell, TriangleBasis::Centered).unwrap();
        assert_eq!(b.chi(2, &c), [0.0, 0.0, 0.0]);
        assert_eq!((b.n0, b.nb, b.nv()), (1, 3, 3));
    }

    #[test]
    fn box_basis_is_dual_to_faces() {
        for (dim, nb) in [(2usize, 4usize), (3, 6)] {
            let cell = CellGeometry::tensor([0.3, -1.0, 2.0], [0.5, 2.0, 1.5], dim).unwrap();
            let b = basis_box_rt0(&cell).unwrap();
            assert_eq!((b.n0, b.nb, b.nv()), (1, nb, nb));
            for i in 0..nb {
                for (j, f) in cell.faces.iter().enumerate() {
                    for p in &f.vertices {
                        let expected = if i == j { 1.0 } else { 0.0 };
                        assert!((b.chi_dot_n(i, f, p) - expected).abs() < 1e-14);
                    }
                }
            }
        }
    }

    #[test]
    fn degenerate_inputs_rejected() {
        assert!(CellGeometry::triangle([[0.0; 3], [1.0, 1.0, 0.0], [2.0, 2.0, 0.0]]).is_err());
        assert!(CellGeometry::tensor([0.0; 3], [1.0, 0.0, 1.0], 3).is_err());
        let mut cell = right_triangle();
        cell.measure = 0.0;
        assert!(basis_triangle_rt0(&cell, TriangleBasis::EdgeNormal).is_err());
    }
}
