//! Problem description: `-div(A grad u) + beta . grad u + gamma u = f` with
//! Dirichlet or Robin conditions on each tagged part of the boundary.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use crate::mesh::{BoundaryTag, Point};

pub type ScalarFn = Arc<dyn Fn(&Point) -> f64 + Send + Sync>;
pub type VectorFn = Arc<dyn Fn(&Point) -> Point + Send + Sync>;
pub type TensorFn = Arc<dyn Fn(&Point) -> [[f64; 3]; 3] + Send + Sync>;

pub fn scalar(f: impl Fn(&Point) -> f64 + Send + Sync + 'static) -> ScalarFn {
    Arc::new(f)
}

pub fn constant(v: f64) -> ScalarFn {
    Arc::new(move |_| v)
}

pub fn identity_tensor() -> TensorFn {
    Arc::new(|_| [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]])
}

/// `A = s(x) I`.
pub fn scalar_tensor(s: ScalarFn) -> TensorFn {
    Arc::new(move |p| {
        let v = s(p);
        [[v, 0.0, 0.0], [0.0, v, 0.0], [0.0, 0.0, v]]
    })
}

#[derive(Clone)]
pub struct Coefficients {
    /// Symmetric positive definite diffusion tensor.
    pub a: TensorFn,
    pub beta: Option<VectorFn>,
    pub gamma: Option<ScalarFn>,
    pub f: ScalarFn,
}

impl Coefficients {
    /// `-lap u = f`.
    pub fn poisson(f: ScalarFn) -> Coefficients {
        Coefficients {
            a: identity_tensor(),
            beta: None,
            gamma: None,
            f,
        }
    }

    pub fn is_symmetric(&self) -> bool {
        self.beta.is_none()
    }
}

impl fmt::Debug for Coefficients {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Coefficients")
            .field("beta", &self.beta.is_some())
            .field("gamma", &self.gamma.is_some())
            .finish_non_exhaustive()
    }
}

#[derive(Clone)]
pub enum BoundaryCondition {
    Dirichlet(ScalarFn),
    /// `A grad u . n + alpha u = g`.
    Robin {
        alpha: ScalarFn,
        g: ScalarFn,
    },
}

impl fmt::Debug for BoundaryCondition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BoundaryCondition::Dirichlet(_) => f.write_str("Dirichlet"),
            BoundaryCondition::Robin { .. } => f.write_str("Robin"),
        }
    }
}

/// How Dirichlet data is turned into face values.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum DirichletMode {
    /// Value at the face midpoint.
    Nodal,
    /// Face average, i.e. the L2 projection onto constants.
    #[default]
    L2Projection,
}

#[derive(Clone, Debug)]
pub struct ProblemSpec {
    pub coefficients: Coefficients,
    pub boundary: BTreeMap<BoundaryTag, BoundaryCondition>,
    pub dirichlet_mode: DirichletMode,
}

impl ProblemSpec {
    /// Same Dirichlet data `g` on every boundary tag.
    pub fn dirichlet_everywhere(coefficients: Coefficients, g: ScalarFn) -> ProblemSpec {
        ProblemSpec {
            coefficients,
            boundary: BoundaryTag::ALL
                .iter()
                .map(|&t| (t, BoundaryCondition::Dirichlet(g.clone())))
                .collect(),
            dirichlet_mode: DirichletMode::default(),
        }
    }

    pub fn with_condition(mut self, tag: BoundaryTag, bc: BoundaryCondition) -> ProblemSpec {
        self.boundary.insert(tag, bc);
        self
    }

    pub fn with_dirichlet_mode(mut self, mode: DirichletMode) -> ProblemSpec {
        self.dirichlet_mode = mode;
        self
    }

    pub fn condition(&self, tag: BoundaryTag) -> Option<&BoundaryCondition> {
        self.boundary.get(&tag)
    }
}
