use std::collections::HashMap;

use super::generate::{structured_triangular, Diagonal, Domain2};
use super::{tag_by_bounding_box, CellKind, Mesh, Point};
use crate::error::{Result, WgError};

type Edge = (usize, usize);

fn edge(a: usize, b: usize) -> Edge {
    if a < b {
        (a, b)
    } else {
        (b, a)
    }
}

/// Triangle soup with a shared midpoint table, used while refining.
struct TriangleSoup {
    vertices: Vec<Point>,
    triangles: Vec<[usize; 3]>,
    midpoints: HashMap<Edge, usize>,
    parents: HashMap<usize, Edge>,
}

impl TriangleSoup {
    fn from_mesh(mesh: &Mesh) -> Result<TriangleSoup> {
        if mesh.dim() != 2 || mesh.cells().iter().any(|c| c.kind != CellKind::Triangle) {
            return Err(WgError::InvalidArgument(
                "red refinement needs a triangular mesh".into(),
            ));
        }
        Ok(TriangleSoup {
            vertices: mesh.vertices().to_vec(),
            triangles: mesh
                .cells()
                .iter()
                .map(|c| [c.vertices[0], c.vertices[1], c.vertices[2]])
                .collect(),
            midpoints: HashMap::new(),
            parents: HashMap::new(),
        })
    }

    fn midpoint(&mut self, a: usize, b: usize) -> usize {
        let key = edge(a, b);
        if let Some(&m) = self.midpoints.get(&key) {
            return m;
        }
        let (p, q) = (self.vertices[a], self.vertices[b]);
        let m = self.vertices.len();
        self.vertices
            .push([0.5 * (p[0] + q[0]), 0.5 * (p[1] + q[1]), 0.0]);
        self.midpoints.insert(key, m);
        self.parents.insert(m, key);
        m
    }

    /// Four similar children, counterclockwise like the parent.
    fn red_split(&mut self, [a, b, c]: [usize; 3]) -> [[usize; 3]; 4] {
        let ab = self.midpoint(a, b);
        let bc = self.midpoint(b, c);
        let ca = self.midpoint(c, a);
        [[a, ab, ca], [ab, b, bc], [ca, bc, c], [ab, bc, ca]]
    }

    fn hanging(&self, a: usize, b: usize) -> Option<usize> {
        self.midpoints.get(&edge(a, b)).copied()
    }

    /// Refines until every triangle has at most one hanging vertex, located
    /// at an edge midpoint, then bisects those triangles.
    fn close(&mut self) {
        loop {
            let mut changed = false;
            let triangles = std::mem::take(&mut self.triangles);
            let mut next = Vec::with_capacity(triangles.len());
            for t in triangles {
                let mut count = 0;
                let mut deep = false;
                for k in 0..3 {
                    let (a, b) = (t[k], t[(k + 1) % 3]);
                    if let Some(m) = self.hanging(a, b) {
                        count += 1;
                        deep |= self.hanging(a, m).is_some() || self.hanging(m, b).is_some();
                    }
                }
                if count >= 2 || deep {
                    next.extend(self.red_split(t));
                    changed = true;
                } else {
                    next.push(t);
                }
            }
            self.triangles = next;
            if !changed {
                break;
            }
        }
        let triangles = std::mem::take(&mut self.triangles);
        for t in triangles {
            let split = (0..3).find_map(|k| {
                let (a, b, c) = (t[k], t[(k + 1) % 3], t[(k + 2) % 3]);
                self.hanging(a, b).map(|m| [[a, m, c], [m, b, c]])
            });
            match split {
                Some(children) => self.triangles.extend(children),
                None => self.triangles.push(t),
            }
        }
    }

    fn cells(&self) -> Vec<(CellKind, Vec<usize>)> {
        self.triangles
            .iter()
            .map(|t| (CellKind::Triangle, t.to_vec()))
            .collect()
    }
}

/// Splits every triangle into four through its edge midpoints. Boundary
/// tags are inherited from the parent edges.
pub fn refine_red(mesh: &Mesh) -> Result<Mesh> {
    let mut soup = TriangleSoup::from_mesh(mesh)?;
    let parents = std::mem::take(&mut soup.triangles);
    for t in parents {
        let children = soup.red_split(t);
        soup.triangles.extend(children);
    }
    let parent_faces: HashMap<Edge, usize> = mesh
        .faces()
        .iter()
        .enumerate()
        .map(|(i, f)| (edge(f.vertices[0], f.vertices[1]), i))
        .collect();
    let cells = soup.cells();
    let parent_of = &soup.parents;
    let tagger = |fv: &[usize], _: &[Point]| {
        let (p, q) = (fv[0], fv[1]);
        [(p, q), (q, p)].into_iter().find_map(|(m, other)| {
            let &(u, w) = parent_of.get(&m)?;
            if other != u && other != w {
                return None;
            }
            mesh.boundary_tag(*parent_faces.get(&(u, w))?)
        })
    };
    Mesh::from_cells(2, 0.5 * mesh.h(), soup.vertices.clone(), cells, tagger)
}

/// Triangulation of `(-1, 1)²` with `base_n × base_n` squares, cut so that
/// eight triangles meet at the origin, whose triangles touching the origin
/// are red-refined `extra_levels` times and closed conformingly by further
/// red refinement and midpoint bisection.
pub fn locally_refined_kellogg(base_n: usize, extra_levels: usize) -> Result<Mesh> {
    if base_n < 2 || !base_n.is_multiple_of(2) {
        return Err(WgError::InvalidArgument(format!(
            "base_n must be even and at least 2 so the origin is a vertex, got {base_n}"
        )));
    }
    let domain = Domain2::new(-1.0, 1.0, -1.0, 1.0)?;
    let h = 2.0 / base_n as f64;
    let base = structured_triangular(base_n, base_n, domain, h, Diagonal::Mirrored)?;
    if extra_levels == 0 {
        return Ok(base);
    }
    let mut soup = TriangleSoup::from_mesh(&base)?;
    let origin = soup
        .vertices
        .iter()
        .position(|p| p[0] == 0.0 && p[1] == 0.0)
        .ok_or_else(|| WgError::Mesh("origin is not a mesh vertex".into()))?;
    for _ in 0..extra_levels {
        let triangles = std::mem::take(&mut soup.triangles);
        for t in triangles {
            if t.contains(&origin) {
                let children = soup.red_split(t);
                soup.triangles.extend(children);
            } else {
                soup.triangles.push(t);
            }
        }
    }
    soup.close();
    let cells = soup.cells();
    let (lo, hi) = super::bounding_box(&soup.vertices);
    Mesh::from_cells(2, h, soup.vertices, cells, tag_by_bounding_box(lo, hi, 2))
}
