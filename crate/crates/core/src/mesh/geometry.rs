use super::{norm, signed_area, sub, CellKind, Point};
use crate::error::{Result, WgError};

#[derive(Clone, Debug)]
pub struct FaceGeometry {
    pub vertices: Vec<Point>,
    pub measure: f64,
    /// Outward unit normal with respect to the owning cell.
    pub normal: Point,
}

/// A single cell detached from its mesh: vertex coordinates plus faces in
/// local order.
#[derive(Clone, Debug)]
pub struct CellGeometry {
    pub kind: CellKind,
    pub vertices: Vec<Point>,
    pub measure: f64,
    pub sides: [f64; 3],
    pub faces: Vec<FaceGeometry>,
}

impl CellGeometry {
    /// Triangle from counterclockwise vertices.
    pub fn triangle(p: [Point; 3]) -> Result<CellGeometry> {
        let area = signed_area(&p[0], &p[1], &p[2]);
        if !(area > 0.0) {
            return Err(WgError::DegenerateCell {
                cell: 0,
                measure: area,
            });
        }
        let faces = CellKind::Triangle
            .local_faces()
            .iter()
            .map(|lf| {
                let (a, b) = (p[lf[0]], p[lf[1]]);
                let d = sub(&b, &a);
                let len = norm(&d);
                FaceGeometry {
                    vertices: vec![a, b],
                    measure: len,
                    normal: [d[1] / len, -d[0] / len, 0.0],
                }
            })
            .collect();
        Ok(CellGeometry {
            kind: CellKind::Triangle,
            vertices: p.to_vec(),
            measure: area,
            sides: [0.0; 3],
            faces,
        })
    }

    /// Axis-aligned rectangle (`dim == 2`) or box (`dim == 3`).
    pub fn tensor(origin: Point, sides: [f64; 3], dim: usize) -> Result<CellGeometry> {
        let kind = match dim {
            2 => CellKind::Rect,
            3 => CellKind::Box,
            _ => {
                return Err(WgError::InvalidArgument(format!(
                    "dim must be 2 or 3, got {dim}"
                )))
            }
        };
        if sides[..dim].iter().any(|&s| !(s > 0.0)) {
            return Err(WgError::DegenerateCell {
                cell: 0,
                measure: 0.0,
            });
        }
        let vertices: Vec<Point> = (0..kind.num_vertices())
            .map(|i| {
                let mut p = origin;
                for axis in 0..dim {
                    if (i >> axis) & 1 == 1 {
                        p[axis] += sides[axis];
                    }
                }
                p
            })
            .collect();
        let measure: f64 = sides[..dim].iter().product();
        let faces = kind
            .local_faces()
            .iter()
            .enumerate()
            .map(|(lf, vs)| {
                let axis = lf / 2;
                let mut normal = [0.0; 3];
                normal[axis] = if lf % 2 == 0 { -1.0 } else { 1.0 };
                FaceGeometry {
                    vertices: vs.iter().map(|&k| vertices[k]).collect(),
                    measure: measure / sides[axis],
                    normal,
                }
            })
            .collect();
        Ok(CellGeometry {
            kind,
            vertices,
            measure,
            sides,
            faces,
        })
    }

    pub fn dim(&self) -> usize {
        self.kind.dim()
    }

    pub fn centroid(&self) -> Point {
        let n = self.vertices.len() as f64;
        let mut c = [0.0; 3];
        for p in &self.vertices {
            for k in 0..3 {
                c[k] += p[k] / n;
            }
        }
        c
    }

    /// Face measures in local order; for triangles, the length of the edge
    /// opposite each vertex.
    pub fn face_measures(&self) -> Vec<f64> {
        self.faces.iter().map(|f| f.measure).collect()
    }

    pub fn diameter(&self) -> f64 {
        match self.kind {
            CellKind::Triangle => self.faces.iter().map(|f| f.measure).fold(0.0, f64::max),
            _ => norm(&self.sides),
        }
    }
}
