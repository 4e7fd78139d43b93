//! Plain-text mesh dump.
//!
//! ```text
//! wg-mesh 1
//! dim <2|3>
//! h <float>
//! vertices <N>
//! <x> <y> [<z>]                       N lines
//! cells <M>
//! <tri|rect|box> <vertex indices>     M lines
//! faces <F>
//! <vertex indices> : <owner> <neighbor|->   F lines, in face order
//! boundary <B>
//! <face index> <xmin|xmax|ymin|ymax|zmin|zmax>   B lines
//! end
//! ```
//!
//! Blank lines and lines starting with `#` are ignored. Floats are written in
//! shortest round-trip form, so a dump parses back to an identical mesh. The
//! face section is redundant: the parser rebuilds the topology from the cells
//! and rejects the file unless the listed faces match.

use std::collections::HashMap;
use std::fmt::Write as _;

use super::{face_key, BoundaryTag, CellKind, FaceKey, Mesh, Point};
use crate::error::{Result, WgError};

const MAGIC: &str = "wg-mesh";
const VERSION: &str = "1";

pub fn write_mesh_dump(mesh: &Mesh) -> String {
    let mut out = String::new();
    let dim = mesh.dim();
    let _ = writeln!(out, "{MAGIC} {VERSION}");
    let _ = writeln!(out, "dim {dim}");
    let _ = writeln!(out, "h {}", mesh.h());
    let _ = writeln!(out, "vertices {}", mesh.vertices().len());
    for p in mesh.vertices() {
        let coords: Vec<String> = p[..dim].iter().map(|v| v.to_string()).collect();
        let _ = writeln!(out, "{}", coords.join(" "));
    }
    let _ = writeln!(out, "cells {}", mesh.num_cells());
    for c in mesh.cells() {
        let _ = writeln!(out, "{} {}", c.kind.name(), join(&c.vertices));
    }
    let _ = writeln!(out, "faces {}", mesh.num_faces());
    for f in mesh.faces() {
        let neighbor = f.cells.1.map_or_else(|| "-".to_string(), |n| n.to_string());
        let _ = writeln!(out, "{} : {} {}", join(&f.vertices), f.cells.0, neighbor);
    }
    let _ = writeln!(out, "boundary {}", mesh.boundary_faces().count());
    for (fi, tag) in mesh.boundary_faces() {
        let _ = writeln!(out, "{fi} {tag}");
    }
    out.push_str("end\n");
    out
}

fn join(v: &[usize]) -> String {
    v.iter()
        .map(|x| x.to_string())
        .collect::<Vec<_>>()
        .join(" ")
}

struct Lines<'a> {
    inner: std::iter::Enumerate<std::str::Lines<'a>>,
    line: usize,
}

impl<'a> Lines<'a> {
    fn next(&mut self) -> Result<Vec<&'a str>> {
        for (i, raw) in self.inner.by_ref() {
            let trimmed = raw.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            self.line = i + 1;
            return Ok(trimmed.split_whitespace().collect());
        }
        Err(WgError::Parse {
            line: self.line + 1,
            msg: "unexpected end of input".into(),
        })
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T> {
        Err(WgError::Parse {
            line: self.line,
            msg: msg.into(),
        })
    }

    fn header(&mut self, keyword: &str) -> Result<&'a str> {
        let toks = self.next()?;
        match toks.as_slice() {
            [k, v] if *k == keyword => Ok(v),
            _ => self.err(format!("expected `{keyword} <value>`")),
        }
    }

    fn count(&mut self, keyword: &str) -> Result<usize> {
        let v = self.header(keyword)?;
        v.parse()
            .or_else(|_| self.err(format!("bad {keyword} count `{v}`")))
    }

    fn index(&self, tok: &str) -> Result<usize> {
        tok.parse()
            .or_else(|_| self.err(format!("bad index `{tok}`")))
    }
}

/// Parses a dump produced by [`write_mesh_dump`].
pub fn parse_mesh_dump(text: &str) -> Result<Mesh> {
    let mut lines = Lines {
        inner: text.lines().enumerate(),
        line: 0,
    };
    let toks = lines.next()?;
    if toks != [MAGIC, VERSION] {
        return lines.err(format!("expected `{MAGIC} {VERSION}` header"));
    }
    let dim = lines.count("dim")?;
    if dim != 2 && dim != 3 {
        return lines.err(format!("dim must be 2 or 3, got {dim}"));
    }
    let h_tok = lines.header("h")?;
    let h: f64 = match h_tok.parse() {
        Ok(h) if f64::is_finite(h) && h > 0.0 => h,
        _ => return lines.err(format!("bad mesh size `{h_tok}`")),
    };

    let nv = lines.count("vertices")?;
    let mut vertices: Vec<Point> = Vec::new();
    for _ in 0..nv {
        let toks = lines.next()?;
        if toks.len() != dim {
            return lines.err(format!("expected {dim} coordinates"));
        }
        let mut p = [0.0; 3];
        for (k, t) in toks.iter().enumerate() {
            p[k] = match t.parse::<f64>() {
                Ok(v) if v.is_finite() => v,
                _ => return lines.err(format!("bad coordinate `{t}`")),
            };
        }
        vertices.push(p);
    }

    let nc = lines.count("cells")?;
    let mut cells = Vec::new();
    for _ in 0..nc {
        let toks = lines.next()?;
        let Some((kind, rest)) = toks.split_first() else {
            return lines.err("empty cell line");
        };
        let kind: CellKind = kind
            .parse()
            .or_else(|e: WgError| lines.err(e.to_string()))?;
        let vs = rest
            .iter()
            .map(|t| lines.index(t))
            .collect::<Result<Vec<_>>>()?;
        cells.push((kind, vs));
    }

    let nf = lines.count("faces")?;
    let mut listed: Vec<(Vec<usize>, usize, Option<usize>, usize)> = Vec::new();
    for _ in 0..nf {
        let toks = lines.next()?;
        let Some(colon) = toks.iter().position(|t| *t == ":") else {
            return lines.err("face line needs `:`");
        };
        let vs = toks[..colon]
            .iter()
            .map(|t| lines.index(t))
            .collect::<Result<Vec<_>>>()?;
        let (owner, neighbor) = match &toks[colon + 1..] {
            [o, n] => {
                let o = lines.index(o)?;
                let n = if *n == "-" {
                    None
                } else {
                    Some(lines.index(n)?)
                };
                (o, n)
            }
            _ => return lines.err("face line needs `<owner> <neighbor|->`"),
        };
        listed.push((vs, owner, neighbor, lines.line));
    }

    let nb = lines.count("boundary")?;
    let mut tags: HashMap<FaceKey, BoundaryTag> = HashMap::new();
    for _ in 0..nb {
        let toks = lines.next()?;
        let [fi, tag] = toks.as_slice() else {
            return lines.err("boundary line needs `<face> <tag>`");
        };
        let fi = lines.index(fi)?;
        let tag: BoundaryTag = tag.parse().or_else(|e: WgError| lines.err(e.to_string()))?;
        let Some((vs, ..)) = listed.get(fi) else {
            return lines.err(format!("boundary face {fi} out of range"));
        };
        if vs.len() > 4 {
            return lines.err("face has too many vertices");
        }
        tags.insert(face_key(vs), tag);
    }
    let toks = lines.next()?;
    if toks != ["end"] {
        return lines.err("expected `end`");
    }

    let mesh = Mesh::from_cells(dim, h, vertices, cells, |fv, _| {
        tags.get(&face_key(fv)).copied()
    })?;

    if mesh.num_faces() != listed.len() {
        return Err(WgError::Parse {
            line: lines.line,
            msg: format!(
                "face section lists {} faces, cells define {}",
                listed.len(),
                mesh.num_faces()
            ),
        });
    }
    for (f, (vs, owner, neighbor, line)) in mesh.faces().iter().zip(&listed) {
        if f.vertices != *vs || f.cells != (*owner, *neighbor) {
            return Err(WgError::Parse {
                line: *line,
                msg: "face does not match the topology implied by the cells".into(),
            });
        }
    }
    if mesh.boundary_faces().count() != tags.len() {
        return Err(WgError::Parse {
            line: lines.line,
            msg: "boundary section tags a face that is not on the boundary".into(),
        });
    }
    Ok(mesh)
}
