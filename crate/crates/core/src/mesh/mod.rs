//! Conforming meshes of triangles, axis-aligned rectangles and boxes.
//!
//! Faces carry one global unit normal; each cell records, per local face,
//! the sign that turns this normal into the cell's outward normal. Interior
//! faces therefore see opposite signs from their two cells, and face-based
//! unknowns are single valued by construction.

mod dump;
mod generate;
mod geometry;
mod refine;

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use crate::error::{Result, WgError};

pub use dump::{parse_mesh_dump, write_mesh_dump};
pub use generate::{
    anisotropic_triangular, uniform_box3d, uniform_rectangular, uniform_triangular,
    uniform_triangular_with, Diagonal, Domain2,
};
pub use geometry::{CellGeometry, FaceGeometry};
pub use refine::{locally_refined_kellogg, refine_red};

pub type Point = [f64; 3];

/// Relative tolerance used by the geometric boundary predicates.
pub const GEOM_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CellKind {
    Triangle,
    Rect,
    Box,
}

impl CellKind {
    pub fn num_vertices(self) -> usize {
        match self {
            CellKind::Triangle => 3,
            CellKind::Rect => 4,
            CellKind::Box => 8,
        }
    }

    pub fn num_faces(self) -> usize {
        match self {
            CellKind::Triangle => 3,
            CellKind::Rect => 4,
            CellKind::Box => 6,
        }
    }

    pub fn dim(self) -> usize {
        match self {
            CellKind::Triangle | CellKind::Rect => 2,
            CellKind::Box => 3,
        }
    }

    /// Local vertex lists of each face, in local face order.
    ///
    /// Triangle face `i` is the edge opposite vertex `i`, traversed
    /// counterclockwise. Rectangles and boxes use tensor vertex order
    /// (x fastest) and faces x=0, x=a, y=0, y=b(, z=0, z=c).
    pub fn local_faces(self) -> &'static [&'static [usize]] {
        match self {
            CellKind::Triangle => &[&[1, 2], &[2, 0], &[0, 1]],
            CellKind::Rect => &[&[0, 2], &[1, 3], &[0, 1], &[2, 3]],
            CellKind::Box => &[
                &[0, 2, 4, 6],
                &[1, 3, 5, 7],
                &[0, 1, 4, 5],
                &[2, 3, 6, 7],
                &[0, 1, 2, 3],
                &[4, 5, 6, 7],
            ],
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            CellKind::Triangle => "tri",
            CellKind::Rect => "rect",
            CellKind::Box => "box",
        }
    }
}

impl FromStr for CellKind {
    type Err = WgError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "tri" => Ok(CellKind::Triangle),
            "rect" => Ok(CellKind::Rect),
            "box" => Ok(CellKind::Box),
            _ => Err(WgError::InvalidArgument(format!("unknown cell kind `{s}`"))),
        }
    }
}

/// Side of the bounding box a boundary face lies on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BoundaryTag {
    XMin,
    XMax,
    YMin,
    YMax,
    ZMin,
    ZMax,
}

impl BoundaryTag {
    pub const ALL: [BoundaryTag; 6] = [
        BoundaryTag::XMin,
        BoundaryTag::XMax,
        BoundaryTag::YMin,
        BoundaryTag::YMax,
        BoundaryTag::ZMin,
        BoundaryTag::ZMax,
    ];

    pub fn axis(self) -> usize {
        match self {
            BoundaryTag::XMin | BoundaryTag::XMax => 0,
            BoundaryTag::YMin | BoundaryTag::YMax => 1,
            BoundaryTag::ZMin | BoundaryTag::ZMax => 2,
        }
    }

    pub fn is_max(self) -> bool {
        matches!(
            self,
            BoundaryTag::XMax | BoundaryTag::YMax | BoundaryTag::ZMax
        )
    }

    pub fn name(self) -> &'static str {
        match self {
            BoundaryTag::XMin => "xmin",
            BoundaryTag::XMax => "xmax",
            BoundaryTag::YMin => "ymin",
            BoundaryTag::YMax => "ymax",
            BoundaryTag::ZMin => "zmin",
            BoundaryTag::ZMax => "zmax",
        }
    }
}

impl fmt::Display for BoundaryTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for BoundaryTag {
    type Err = WgError;

    fn from_str(s: &str) -> Result<Self> {
        BoundaryTag::ALL
            .into_iter()
            .find(|t| t.name() == s)
            .ok_or_else(|| WgError::InvalidArgument(format!("unknown boundary tag `{s}`")))
    }
}

#[derive(Clone, Debug)]
pub struct Cell {
    pub kind: CellKind,
    pub vertices: Vec<usize>,
    /// Area or volume.
    pub measure: f64,
    /// Side lengths a, b(, c) for rectangles and boxes; zero for triangles.
    pub sides: [f64; 3],
    pub diameter: f64,
    pub centroid: Point,
}

#[derive(Clone, Debug)]
pub struct Face {
    pub vertices: Vec<usize>,
    pub measure: f64,
    /// Global unit normal; outward for boundary faces.
    pub normal: Point,
    pub midpoint: Point,
    /// Owner cell (normal points out of it) and, for interior faces, the neighbor.
    pub cells: (usize, Option<usize>),
    /// Diameter of the owner cell; weights the face-based error norm.
    pub h: f64,
}

impl Face {
    pub fn is_boundary(&self) -> bool {
        self.cells.1.is_none()
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CellFace {
    pub face: usize,
    /// +1 if the face's global normal is outward for this cell, -1 otherwise.
    pub sign: f64,
}

#[derive(Clone, Debug)]
pub struct Mesh {
    dim: usize,
    h: f64,
    vertices: Vec<Point>,
    cells: Vec<Cell>,
    faces: Vec<Face>,
    cell_faces: Vec<Vec<CellFace>>,
    boundary_tags: Vec<Option<BoundaryTag>>,
}

type FaceKey = [usize; 4];

fn face_key(vs: &[usize]) -> FaceKey {
    let mut key = [usize::MAX; 4];
    key[..vs.len()].copy_from_slice(vs);
    key.sort_unstable();
    key
}

pub(crate) fn sub(a: &Point, b: &Point) -> Point {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

pub(crate) fn dot(a: &Point, b: &Point) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

pub(crate) fn norm(a: &Point) -> f64 {
    dot(a, a).sqrt()
}

fn cross(a: &Point, b: &Point) -> Point {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

fn average(points: impl Iterator<Item = Point>) -> Point {
    let mut acc = [0.0; 3];
    let mut n = 0usize;
    for p in points {
        for k in 0..3 {
            acc[k] += p[k];
        }
        n += 1;
    }
    acc.map(|v| v / n as f64)
}

/// Signed area of a 2D triangle.
pub(crate) fn signed_area(a: &Point, b: &Point, c: &Point) -> f64 {
    0.5 * ((b[0] - a[0]) * (c[1] - a[1]) - (c[0] - a[0]) * (b[1] - a[1]))
}

impl Mesh {
    /// Builds the full topology from vertices and cell connectivity.
    ///
    /// Triangles given clockwise are reoriented. `tagger` assigns a tag to
    /// each boundary face from its vertex indices; `None` is an error.
    pub fn from_cells<F>(
        dim: usize,
        h: f64,
        vertices: Vec<Point>,
        cells: Vec<(CellKind, Vec<usize>)>,
        tagger: F,
    ) -> Result<Mesh>
    where
        F: Fn(&[usize], &[Point]) -> Option<BoundaryTag>,
    {
        if dim != 2 && dim != 3 {
            return Err(WgError::Mesh(format!(
                "dimension must be 2 or 3, got {dim}"
            )));
        }
        if cells.is_empty() {
            return Err(WgError::Mesh("mesh has no cells".into()));
        }
        let mut built = Vec::with_capacity(cells.len());
        for (ci, (kind, mut vs)) in cells.into_iter().enumerate() {
            if kind.dim() != dim {
                return Err(WgError::Mesh(format!(
                    "cell {ci}: {} cell in a {dim}D mesh",
                    kind.name()
                )));
            }
            if vs.len() != kind.num_vertices() {
                return Err(WgError::Mesh(format!(
                    "cell {ci}: expected {} vertices, got {}",
                    kind.num_vertices(),
                    vs.len()
                )));
            }
            if let Some(&bad) = vs.iter().find(|&&v| v >= vertices.len()) {
                return Err(WgError::Mesh(format!(
                    "cell {ci}: vertex index {bad} out of range"
                )));
            }
            let cell = match kind {
                CellKind::Triangle => {
                    let mut area =
                        signed_area(&vertices[vs[0]], &vertices[vs[1]], &vertices[vs[2]]);
                    if area < 0.0 {
                        vs.swap(1, 2);
                        area = -area;
                    }
                    if !(area > 0.0) {
                        return Err(WgError::DegenerateCell {
                            cell: ci,
                            measure: area,
                        });
                    }
                    let p: Vec<Point> = vs.iter().map(|&v| vertices[v]).collect();
                    let diameter = (0..3)
                        .map(|i| norm(&sub(&p[i], &p[(i + 1) % 3])))
                        .fold(0.0, f64::max);
                    Cell {
                        kind,
                        centroid: average(p.iter().copied()),
                        vertices: vs,
                        measure: area,
                        sides: [0.0; 3],
                        diameter,
                    }
                }
                CellKind::Rect | CellKind::Box => {
                    let p: Vec<Point> = vs.iter().map(|&v| vertices[v]).collect();
                    let sides = tensor_cell_sides(&p, dim).ok_or_else(|| {
                        WgError::Mesh(format!("cell {ci}: not an axis-aligned {}", kind.name()))
                    })?;
                    let measure: f64 = sides[..dim].iter().product();
                    if !(measure > 0.0) {
                        return Err(WgError::DegenerateCell { cell: ci, measure });
                    }
                    Cell {
                        kind,
                        centroid: average(p.iter().copied()),
                        vertices: vs,
                        measure,
                        diameter: norm(&sides),
                        sides,
                    }
                }
            };
            built.push(cell);
        }

        let mut faces: Vec<Face> = Vec::new();
        let mut index: HashMap<FaceKey, usize> = HashMap::new();
        let mut cell_faces = Vec::with_capacity(built.len());
        for (ci, cell) in built.iter().enumerate() {
            let mut local = Vec::with_capacity(cell.kind.num_faces());
            for lf in cell.kind.local_faces() {
                let fv: Vec<usize> = lf.iter().map(|&k| cell.vertices[k]).collect();
                let key = face_key(&fv);
                match index.get(&key) {
                    Some(&fi) => {
                        let face = &mut faces[fi];
                        if face.cells.1.is_some() {
                            return Err(WgError::Mesh(format!(
                                "face {fi} is shared by more than two cells"
                            )));
                        }
                        face.cells.1 = Some(ci);
                        local.push(CellFace {
                            face: fi,
                            sign: -1.0,
                        });
                    }
                    None => {
                        let pts: Vec<Point> = fv.iter().map(|&v| vertices[v]).collect();
                        let (measure, normal) = face_measure_normal(&pts, &cell.centroid);
                        let fi = faces.len();
                        faces.push(Face {
                            midpoint: average(pts.iter().copied()),
                            vertices: fv,
                            measure,
                            normal,
                            cells: (ci, None),
                            h: cell.diameter,
                        });
                        index.insert(key, fi);
                        local.push(CellFace {
                            face: fi,
                            sign: 1.0,
                        });
                    }
                }
            }
            cell_faces.push(local);
        }

        let mut boundary_tags = vec![None; faces.len()];
        for (fi, face) in faces.iter().enumerate() {
            if face.is_boundary() {
                let tag = tagger(&face.vertices, &vertices).ok_or_else(|| {
                    WgError::Mesh(format!("boundary face {fi} has no boundary tag"))
                })?;
                boundary_tags[fi] = Some(tag);
            }
        }

        let mesh = Mesh {
            dim,
            h,
            vertices,
            cells: built,
            faces,
            cell_faces,
            boundary_tags,
        };
        mesh.validate()?;
        Ok(mesh)
    }

    /// Checks the structural invariants that construction does not already
    /// guarantee.
    pub fn validate(&self) -> Result<()> {
        for (fi, f) in self.faces.iter().enumerate() {
            if (norm(&f.normal) - 1.0).abs() > 1e-14 {
                return Err(WgError::Mesh(format!(
                    "face {fi}: normal is not unit length"
                )));
            }
            if !(f.measure > 0.0) {
                return Err(WgError::Mesh(format!("face {fi}: non-positive measure")));
            }
            if let Some(n) = f.cells.1 {
                let owner = self.local_sign(f.cells.0, fi);
                let other = self.local_sign(n, fi);
                if owner != Some(1.0) || other != Some(-1.0) {
                    return Err(WgError::Mesh(format!(
                        "face {fi}: inconsistent orientation"
                    )));
                }
            }
        }
        Ok(())
    }

    fn local_sign(&self, cell: usize, face: usize) -> Option<f64> {
        self.cell_faces[cell]
            .iter()
            .find(|cf| cf.face == face)
            .map(|cf| cf.sign)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Characteristic mesh size as reported in convergence tables.
    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn cells(&self) -> &[Cell] {
        &self.cells
    }

    pub fn faces(&self) -> &[Face] {
        &self.faces
    }

    pub fn num_cells(&self) -> usize {
        self.cells.len()
    }

    pub fn num_faces(&self) -> usize {
        self.faces.len()
    }

    pub fn cell_faces(&self, cell: usize) -> &[CellFace] {
        &self.cell_faces[cell]
    }

    pub fn boundary_tag(&self, face: usize) -> Option<BoundaryTag> {
        self.boundary_tags[face]
    }

    /// Boundary faces with their tags, in face order.
    pub fn boundary_faces(&self) -> impl Iterator<Item = (usize, BoundaryTag)> + '_ {
        self.boundary_tags
            .iter()
            .enumerate()
            .filter_map(|(i, t)| t.map(|t| (i, t)))
    }

    pub fn total_measure(&self) -> f64 {
        self.cells.iter().map(|c| c.measure).sum()
    }

    pub fn cell_points(&self, cell: usize) -> Vec<Point> {
        self.cells[cell]
            .vertices
            .iter()
            .map(|&v| self.vertices[v])
            .collect()
    }

    pub fn face_points(&self, face: usize) -> Vec<Point> {
        self.faces[face]
            .vertices
            .iter()
            .map(|&v| self.vertices[v])
            .collect()
    }

    /// Standalone geometric description of a cell, faces in local order
    /// with outward normals.
    pub fn cell_geometry(&self, cell: usize) -> CellGeometry {
        let c = &self.cells[cell];
        let faces = self.cell_faces[cell]
            .iter()
            .map(|cf| {
                let f = &self.faces[cf.face];
                FaceGeometry {
                    vertices: self.face_points(cf.face),
                    measure: f.measure,
                    normal: f.normal.map(|v| v * cf.sign),
                }
            })
            .collect();
        CellGeometry {
            kind: c.kind,
            vertices: self.cell_points(cell),
            measure: c.measure,
            sides: c.sides,
            faces,
        }
    }

    /// Axis-aligned bounding box (min, max).
    pub fn bounding_box(&self) -> (Point, Point) {
        bounding_box(&self.vertices)
    }
}

pub(crate) fn bounding_box(vertices: &[Point]) -> (Point, Point) {
    let mut lo = [f64::INFINITY; 3];
    let mut hi = [f64::NEG_INFINITY; 3];
    for p in vertices {
        for k in 0..3 {
            lo[k] = lo[k].min(p[k]);
            hi[k] = hi[k].max(p[k]);
        }
    }
    (lo, hi)
}

/// Tags a face by the bounding-box side all of its vertices lie on.
pub(crate) fn tag_by_bounding_box(
    lo: Point,
    hi: Point,
    dim: usize,
) -> impl Fn(&[usize], &[Point]) -> Option<BoundaryTag> {
    move |fv, verts| {
        BoundaryTag::ALL.into_iter().find(|tag| {
            let axis = tag.axis();
            if axis >= dim {
                return false;
            }
            let target = if tag.is_max() { hi[axis] } else { lo[axis] };
            let scale = (hi[axis] - lo[axis]).abs().max(1.0);
            fv.iter()
                .all(|&v| (verts[v][axis] - target).abs() <= GEOM_TOL * scale)
        })
    }
}

/// Side lengths of an axis-aligned rectangle/box in tensor vertex order.
fn tensor_cell_sides(p: &[Point], dim: usize) -> Option<[f64; 3]> {
    let mut sides = [0.0; 3];
    for axis in 0..dim {
        sides[axis] = p[1 << axis][axis] - p[0][axis];
    }
    let tol = 1e-12 * norm(&sides).max(1e-300);
    for (i, q) in p.iter().enumerate() {
        for axis in 0..3 {
            let expected = if axis < dim && (i >> axis) & 1 == 1 {
                p[0][axis] + sides[axis]
            } else {
                p[0][axis]
            };
            if (q[axis] - expected).abs() > tol {
                return None;
            }
        }
    }
    Some(sides)
}

/// Measure and unit normal of a face, oriented away from `inside`.
fn face_measure_normal(pts: &[Point], inside: &Point) -> (f64, Point) {
    let (measure, mut n) = match pts.len() {
        2 => {
            let d = sub(&pts[1], &pts[0]);
            let len = norm(&d);
            (len, [d[1] / len, -d[0] / len, 0.0])
        }
        _ => {
            // tensor-ordered quad: the diagonals are (0,3) and (1,2)
            let c = cross(&sub(&pts[3], &pts[0]), &sub(&pts[2], &pts[1]));
            let len = norm(&c);
            (0.5 * len, c.map(|v| v / len))
        }
    };
    let mid = average(pts.iter().copied());
    if dot(&n, &sub(&mid, inside)) < 0.0 {
        n = n.map(|v| -v);
    }
    (measure, n)
}
