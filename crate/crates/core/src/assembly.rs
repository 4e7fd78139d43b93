//! Global degrees of freedom and system assembly.
//!
//! Unknowns are numbered cell interiors first, then faces. Dirichlet faces
//! are eliminated; the remaining unknowns are renumbered consecutively.

use rayon::prelude::*;

use crate::element::{local_kernel, LocalKernel, TriangleBasis};
use crate::error::{Result, WgError};
use crate::mesh::Mesh;
use crate::problem::{BoundaryCondition, DirichletMode, ProblemSpec, ScalarFn};
use crate::quadrature::RuleSet;
use crate::sparse::CsrMatrix;

#[derive(Clone, Debug, PartialEq)]
pub struct DofMap {
    pub num_cells: usize,
    pub num_faces: usize,
    /// Global dof -> free index, `None` for Dirichlet faces.
    pub free: Vec<Option<usize>>,
    pub num_free: usize,
}

impl DofMap {
    pub fn cell_dof(&self, cell: usize) -> usize {
        cell
    }

    pub fn face_dof(&self, face: usize) -> usize {
        self.num_cells + face
    }

    pub fn num_dofs(&self) -> usize {
        self.num_cells + self.num_faces
    }
}

/// Numbers the unknowns and checks that every boundary face has a
/// condition.
pub fn build_dofmap(mesh: &Mesh, problem: &ProblemSpec) -> Result<DofMap> {
    let nc = mesh.num_cells();
    let nf = mesh.num_faces();
    let mut free = Vec::with_capacity(nc + nf);
    free.extend((0..nc).map(Some));
    let mut next = nc;
    for (fi, face) in mesh.faces().iter().enumerate() {
        let dirichlet = if face.is_boundary() {
            let cond = mesh
                .boundary_tag(fi)
                .and_then(|t| problem.condition(t))
                .ok_or(WgError::UnassignedBoundary { face: fi })?;
            matches!(cond, BoundaryCondition::Dirichlet(_))
        } else {
            false
        };
        if dirichlet {
            free.push(None);
        } else {
            free.push(Some(next));
            next += 1;
        }
    }
    Ok(DofMap {
        num_cells: nc,
        num_faces: nf,
        free,
        num_free: next,
    })
}

fn face_average(mesh: &Mesh, face: usize, g: &ScalarFn, rules: &RuleSet) -> f64 {
    face_integral(mesh, face, g, rules) / mesh.faces()[face].measure
}

fn face_integral(mesh: &Mesh, face: usize, g: &ScalarFn, rules: &RuleSet) -> f64 {
    let pts = mesh.face_points(face);
    crate::quadrature::face_points_raw(rules, &pts, mesh.faces()[face].measure)
        .iter()
        .map(|(p, w)| w * g(p))
        .sum()
}

/// Face values on Dirichlet faces, `None` elsewhere.
pub fn dirichlet_values(
    mesh: &Mesh,
    problem: &ProblemSpec,
    rules: &RuleSet,
) -> Result<Vec<Option<f64>>> {
    let mut out = vec![None; mesh.num_faces()];
    for (fi, tag) in mesh.boundary_faces() {
        if let Some(BoundaryCondition::Dirichlet(g)) = problem.condition(tag) {
            let v = match problem.dirichlet_mode {
                DirichletMode::Nodal => g(&mesh.faces()[fi].midpoint),
                DirichletMode::L2Projection => face_average(mesh, fi, g, rules),
            };
            if !v.is_finite() {
                return Err(WgError::NonFinite(format!(
                    "evaluating Dirichlet data on face {fi}"
                )));
            }
            out[fi] = Some(v);
        }
    }
    Ok(out)
}

/// Lowest quadrature order that integrates the gradient mass matrices
/// exactly.
pub const MIN_ORDER: usize = 2;

#[derive(Clone, Copy, Debug)]
pub struct AssemblyOptions {
    pub quadrature_order: usize,
    pub triangle_basis: TriangleBasis,
}

impl Default for AssemblyOptions {
    fn default() -> Self {
        AssemblyOptions {
            quadrature_order: crate::quadrature::DEFAULT_ORDER,
            triangle_basis: TriangleBasis::default(),
        }
    }
}

/// Reduced linear system plus what is needed to recover and post-process
/// the full discrete solution.
#[derive(Clone, Debug)]
pub struct SparseSystem {
    pub matrix: CsrMatrix,
    pub rhs: Vec<f64>,
    pub dofmap: DofMap,
    /// Prescribed face values, indexed by face.
    pub dirichlet: Vec<Option<f64>>,
    pub kernels: Vec<LocalKernel>,
}

/// Discrete solution: one value per cell interior and one per face.
#[derive(Clone, Debug, PartialEq)]
pub struct WgSolution {
    pub u0: Vec<f64>,
    pub ub: Vec<f64>,
}

impl SparseSystem {
    /// Inserts the Dirichlet values into a solution of the reduced system.
    pub fn expand(&self, x: &[f64]) -> WgSolution {
        assert_eq!(x.len(), self.dofmap.num_free);
        let dm = &self.dofmap;
        let u0 = (0..dm.num_cells)
            .map(|c| x[dm.free[dm.cell_dof(c)].expect("cell dofs are free")])
            .collect();
        let ub = (0..dm.num_faces)
            .map(|f| match dm.free[dm.face_dof(f)] {
                Some(i) => x[i],
                None => self.dirichlet[f].expect("fixed faces carry Dirichlet data"),
            })
            .collect();
        WgSolution { u0, ub }
    }
}

fn with_cell(err: WgError, cell: usize) -> WgError {
    match err {
        WgError::DegenerateCell { measure, .. } => WgError::DegenerateCell { cell, measure },
        WgError::SingularLocalMatrix { .. } => WgError::SingularLocalMatrix { cell },
        other => other,
    }
}

/// Local kernels for all cells, in cell order.
pub fn local_kernels(
    mesh: &Mesh,
    problem: &ProblemSpec,
    opts: &AssemblyOptions,
    rules: &RuleSet,
) -> Result<Vec<LocalKernel>> {
    (0..mesh.num_cells())
        .into_par_iter()
        .map(|c| {
            local_kernel(
                &mesh.cell_geometry(c),
                opts.triangle_basis,
                &problem.coefficients,
                rules,
            )
            .map_err(|e| with_cell(e, c))
        })
        .collect()
}

/// Assembles the reduced system. Local kernels are computed in parallel
/// and scattered sequentially in cell order, so the result is
/// deterministic.
pub fn assemble(
    mesh: &Mesh,
    problem: &ProblemSpec,
    opts: &AssemblyOptions,
) -> Result<SparseSystem> {
    if opts.quadrature_order < MIN_ORDER {
        return Err(WgError::InvalidArgument(format!(
            "quadrature order must be at least {MIN_ORDER} for nonsingular element matrices, got {}",
            opts.quadrature_order
        )));
    }
    let rules = RuleSet::new(opts.quadrature_order)?;
    let dofmap = build_dofmap(mesh, problem)?;
    let dirichlet = dirichlet_values(mesh, problem, &rules)?;
    let kernels = local_kernels(mesh, problem, opts, &rules)?;

    let mut triplets = Vec::with_capacity(kernels.iter().map(|k| (1 + k.basis.nb).pow(2)).sum());
    let mut rhs = vec![0.0; dofmap.num_free];
    for (c, kernel) in kernels.iter().enumerate() {
        let mut dofs = vec![dofmap.cell_dof(c)];
        dofs.extend(mesh.cell_faces(c).iter().map(|cf| dofmap.face_dof(cf.face)));
        let m = kernel.stiffness.full();
        let row0 = dofmap.free[dofs[0]].expect("cell dofs are free");
        rhs[row0] += kernel.load;
        for (i, &gi) in dofs.iter().enumerate() {
            let Some(row) = dofmap.free[gi] else { continue };
            for (j, &gj) in dofs.iter().enumerate() {
                match dofmap.free[gj] {
                    Some(col) => triplets.push((row, col, m[(i, j)])),
                    None => {
                        let g = dirichlet[gj - dofmap.num_cells].expect("fixed face has data");
                        rhs[row] -= m[(i, j)] * g;
                    }
                }
            }
        }
    }

    for (fi, tag) in mesh.boundary_faces() {
        if let Some(BoundaryCondition::Robin { alpha, g }) = problem.condition(tag) {
            let row = dofmap.free[dofmap.face_dof(fi)].expect("Robin faces are free");
            triplets.push((row, row, face_integral(mesh, fi, alpha, &rules)));
            rhs[row] += face_integral(mesh, fi, g, &rules);
        }
    }

    if rhs.iter().any(|v| !v.is_finite()) || triplets.iter().any(|t| !t.2.is_finite()) {
        return Err(WgError::NonFinite("assembling the global system".into()));
    }
    let matrix = CsrMatrix::from_triplets(dofmap.num_free, dofmap.num_free, triplets);
    Ok(SparseSystem {
        matrix,
        rhs,
        dofmap,
        dirichlet,
        kernels,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::element::poisson_triangle_closed;
    use crate::mesh::{uniform_rectangular, uniform_triangular, BoundaryTag, Domain2};
    use crate::problem::{constant, scalar, Coefficients};

    fn poisson(g: ScalarFn) -> ProblemSpec {
        ProblemSpec::dirichlet_everywhere(Coefficients::poisson(constant(0.0)), g)
    }

    #[test]
    fn dof_counts() {
        let mesh = uniform_triangular(8, Domain2::UNIT).unwrap();
        let dm = build_dofmap(&mesh, &poisson(constant(0.0))).unwrap();
        assert_eq!(dm.num_dofs(), 128 + 208);
        assert_eq!(dm.num_free, 304);
    }

    #[test]
    fn missing_condition_is_an_error() {
        let mesh = uniform_triangular(2, Domain2::UNIT).unwrap();
        let mut p = poisson(constant(0.0));
        p.boundary.remove(&BoundaryTag::YMax);
        assert!(matches!(
            build_dofmap(&mesh, &p),
            Err(WgError::UnassignedBoundary { .. })
        ));
    }

    #[test]
    fn dirichlet_modes() {
        let mesh = uniform_triangular(8, Domain2::UNIT).unwrap();
        let rules = RuleSet::new(5).unwrap();
        let g = scalar(|p| (2.0 * std::f64::consts::PI * p[0] + std::f64::consts::FRAC_PI_2).sin());
        let face = mesh
            .boundary_faces()
            .find(|&(f, t)| t == BoundaryTag::YMin && mesh.faces()[f].midpoint[0] < 0.1)
            .unwrap()
            .0;
        let l2 = dirichlet_values(&mesh, &poisson(g.clone()), &rules).unwrap()[face].unwrap();
        let nodal = dirichlet_values(
            &mesh,
            &poisson(g).with_dirichlet_mode(DirichletMode::Nodal),
            &rules,
        )
        .unwrap()[face]
            .unwrap();
        assert!((l2 - 0.900316316157106).abs() < 1e-13, "{l2}");
        assert!((nodal - 0.923879532511287).abs() < 1e-13, "{nodal}");
    }

    #[test]
    fn scatter_matches_dense_sum_of_local_matrices() {
        // Two triangles, all faces Robin with alpha = 0 so nothing is eliminated.
        let mesh = uniform_triangular(1, Domain2::UNIT).unwrap();
        let zero = constant(0.0);
        let mut p = poisson(zero.clone());
        for t in BoundaryTag::ALL {
            p.boundary.insert(
                t,
                BoundaryCondition::Robin {
                    alpha: zero.clone(),
                    g: zero.clone(),
                },
            );
        }
        let sys = assemble(&mesh, &p, &AssemblyOptions::default()).unwrap();
        assert_eq!(sys.dofmap.num_free, 2 + 5);
        let dense = sys.matrix.to_dense();
        let mut expected = crate::element::Mat::zeros(7, 7);
        for c in 0..2 {
            let m = poisson_triangle_closed(&mesh.cell_geometry(c))
                .unwrap()
                .full();
            let mut dofs = vec![c];
            dofs.extend(mesh.cell_faces(c).iter().map(|cf| 2 + cf.face));
            for i in 0..4 {
                for j in 0..4 {
                    expected[(dofs[i], dofs[j])] += m[(i, j)];
                }
            }
        }
        assert!((dense - expected).abs().max() < 1e-12);
        // constants are in the kernel of the pure Neumann operator
        let ones = vec![1.0; 7];
        assert!(sys.matrix.mul(&ones).iter().all(|v| v.abs() < 1e-12));
    }

    #[test]
    fn rectangles_assemble_symmetric() {
        let mesh = uniform_rectangular(4, 3, Domain2::UNIT).unwrap();
        let sys = assemble(&mesh, &poisson(constant(1.0)), &AssemblyOptions::default()).unwrap();
        assert!(sys.matrix.max_asymmetry() < 1e-14);
        let full = sys.expand(&vec![0.0; sys.dofmap.num_free]);
        assert_eq!(full.u0.len(), 12);
        for (f, face) in mesh.faces().iter().enumerate() {
            let expected = if face.is_boundary() { 1.0 } else { 0.0 };
            assert!((full.ub[f] - expected).abs() < 1e-14);
        }
    }

    #[test]
    fn assembly_is_deterministic() {
        let mesh = uniform_triangular(6, Domain2::UNIT).unwrap();
        let p = poisson(scalar(|p| p[0].sin() + p[1]));
        let a = assemble(&mesh, &p, &AssemblyOptions::default()).unwrap();
        let b = assemble(&mesh, &p, &AssemblyOptions::default()).unwrap();
        assert_eq!(a.matrix, b.matrix);
        assert_eq!(a.rhs, b.rhs);
    }
}
