use super::{tag_by_bounding_box, CellKind, Mesh, Point};
use crate::error::{Result, WgError};

/// Axis-aligned rectangle `[x0, x1] × [y0, y1]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Domain2 {
    pub x0: f64,
    pub x1: f64,
    pub y0: f64,
    pub y1: f64,
}

impl Domain2 {
    pub const UNIT: Domain2 = Domain2 {
        x0: 0.0,
        x1: 1.0,
        y0: 0.0,
        y1: 1.0,
    };

    pub fn new(x0: f64, x1: f64, y0: f64, y1: f64) -> Result<Domain2> {
        if !(x1 > x0 && y1 > y0) {
            return Err(WgError::InvalidArgument(format!(
                "empty domain [{x0}, {x1}] x [{y0}, {y1}]"
            )));
        }
        Ok(Domain2 { x0, x1, y0, y1 })
    }
}

fn grid_vertices(nx: usize, ny: usize, d: Domain2) -> Vec<Point> {
    let mut v = Vec::with_capacity((nx + 1) * (ny + 1));
    for j in 0..=ny {
        let y = d.y0 + (d.y1 - d.y0) * j as f64 / ny as f64;
        for i in 0..=nx {
            let x = d.x0 + (d.x1 - d.x0) * i as f64 / nx as f64;
            v.push([x, y, 0.0]);
        }
    }
    v
}

/// Which diagonal splits each sub-rectangle of a structured triangulation.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Diagonal {
    /// Lower-left to upper-right.
    #[default]
    Rising,
    /// Upper-left to lower-right.
    Falling,
    /// Rising in the lower-left and upper-right quarters of the domain and
    /// falling in the other two, so the mesh is mirror-symmetric about both
    /// centre lines.
    Mirrored,
}

/// `nx × ny` sub-rectangles, each cut along `diagonal`.
pub(crate) fn structured_triangular(
    nx: usize,
    ny: usize,
    d: Domain2,
    h: f64,
    diagonal: Diagonal,
) -> Result<Mesh> {
    if nx == 0 || ny == 0 {
        return Err(WgError::InvalidArgument(
            "mesh divisions must be positive".into(),
        ));
    }
    let vertices = grid_vertices(nx, ny, d);
    let id = |i: usize, j: usize| j * (nx + 1) + i;
    let mut cells = Vec::with_capacity(2 * nx * ny);
    for j in 0..ny {
        for i in 0..nx {
            let (a, b, c, e) = (id(i, j), id(i + 1, j), id(i + 1, j + 1), id(i, j + 1));
            let rising = match diagonal {
                Diagonal::Rising => true,
                Diagonal::Falling => false,
                Diagonal::Mirrored => (2 * i + 1 > nx) == (2 * j + 1 > ny),
            };
            match rising {
                true => {
                    cells.push((CellKind::Triangle, vec![a, b, c]));
                    cells.push((CellKind::Triangle, vec![a, c, e]));
                }
                false => {
                    cells.push((CellKind::Triangle, vec![a, b, e]));
                    cells.push((CellKind::Triangle, vec![b, c, e]));
                }
            }
        }
    }
    let (lo, hi) = super::bounding_box(&vertices);
    Mesh::from_cells(2, h, vertices, cells, tag_by_bounding_box(lo, hi, 2))
}

/// Uniform triangulation of `domain` with `n × n` rectangles cut along their
/// rising diagonal; h is reported as the width of the domain divided by `n`.
pub fn uniform_triangular(n: usize, domain: Domain2) -> Result<Mesh> {
    uniform_triangular_with(n, domain, Diagonal::Rising)
}

pub fn uniform_triangular_with(n: usize, domain: Domain2, diagonal: Diagonal) -> Result<Mesh> {
    structured_triangular(
        n,
        n,
        domain,
        (domain.x1 - domain.x0) / n.max(1) as f64,
        diagonal,
    )
}

/// `n × (k n)` sub-rectangles of the unit square (`k n` rows along `y`),
/// each split along `diagonal`; h is reported as `1/n`.
pub fn anisotropic_triangular(k: usize, n: usize, diagonal: Diagonal) -> Result<Mesh> {
    if k == 0 || n == 0 {
        return Err(WgError::InvalidArgument("k and n must be positive".into()));
    }
    structured_triangular(n, k * n, Domain2::UNIT, 1.0 / n as f64, diagonal)
}

/// `nx × ny` axis-aligned rectangles.
pub fn uniform_rectangular(nx: usize, ny: usize, domain: Domain2) -> Result<Mesh> {
    if nx == 0 || ny == 0 {
        return Err(WgError::InvalidArgument(
            "mesh divisions must be positive".into(),
        ));
    }
    let vertices = grid_vertices(nx, ny, domain);
    let id = |i: usize, j: usize| j * (nx + 1) + i;
    let cells = (0..ny)
        .flat_map(|j| (0..nx).map(move |i| (i, j)))
        .map(|(i, j)| {
            (
                CellKind::Rect,
                vec![id(i, j), id(i + 1, j), id(i, j + 1), id(i + 1, j + 1)],
            )
        })
        .collect();
    let h = ((domain.x1 - domain.x0) / nx as f64).max((domain.y1 - domain.y0) / ny as f64);
    let (lo, hi) = super::bounding_box(&vertices);
    Mesh::from_cells(2, h, vertices, cells, tag_by_bounding_box(lo, hi, 2))
}

/// `n³` congruent cubes of the unit cube.
pub fn uniform_box3d(n: usize) -> Result<Mesh> {
    if n == 0 {
        return Err(WgError::InvalidArgument("n must be positive".into()));
    }
    let m = n + 1;
    let mut vertices = Vec::with_capacity(m * m * m);
    for k in 0..m {
        for j in 0..m {
            for i in 0..m {
                vertices.push([
                    i as f64 / n as f64,
                    j as f64 / n as f64,
                    k as f64 / n as f64,
                ]);
            }
        }
    }
    let id = |i: usize, j: usize, k: usize| (k * m + j) * m + i;
    let mut cells = Vec::with_capacity(n * n * n);
    for k in 0..n {
        for j in 0..n {
            for i in 0..n {
                let vs = (0..8)
                    .map(|t| id(i + (t & 1), j + ((t >> 1) & 1), k + ((t >> 2) & 1)))
                    .collect();
                cells.push((CellKind::Box, vs));
            }
        }
    }
    let (lo, hi) = super::bounding_box(&vertices);
    Mesh::from_cells(
        3,
        1.0 / n as f64,
        vertices,
        cells,
        tag_by_bounding_box(lo, hi, 3),
    )
}
