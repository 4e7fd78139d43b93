//! Gaussian quadrature on the unit segment, triangle, square and cube.
//!
//! `order` is the number of Gauss points per direction; every rule is exact
//! for polynomials of total degree `2 * order - 1`. Triangle rules are
//! collapsed Gauss–Jacobi × Gauss–Legendre products averaged over the six
//! vertex permutations, which makes them symmetric with positive weights.

use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::{Result, WgError};
use crate::mesh::{CellGeometry, CellKind, FaceGeometry, Point};

pub const MAX_ORDER: usize = 10;

/// Default per-direction order; exact to degree 9.
pub const DEFAULT_ORDER: usize = 5;

#[derive(Clone, Debug, PartialEq)]
pub struct QuadRule {
    /// Reference coordinates; unused trailing components are zero.
    pub points: Vec<Point>,
    pub weights: Vec<f64>,
    pub exact_degree: usize,
}

impl QuadRule {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Point, f64)> + '_ {
        self.points.iter().zip(self.weights.iter().copied())
    }
}

fn check_order(order: usize) -> Result<()> {
    if (1..=MAX_ORDER).contains(&order) {
        Ok(())
    } else {
        Err(WgError::InvalidArgument(format!(
            "quadrature order must be in 1..={MAX_ORDER}, got {order}"
        )))
    }
}

/// Jacobi polynomial P_n^(alpha, 0)(x) and its derivative.
fn jacobi(n: usize, alpha: f64, x: f64) -> (f64, f64) {
    let beta = 0.0;
    let mut p0 = 1.0;
    if n == 0 {
        return (1.0, 0.0);
    }
    let mut p1 = 0.5 * (alpha - beta) + 0.5 * (alpha + beta + 2.0) * x;
    for k in 2..=n {
        let k = k as f64;
        let s = 2.0 * k + alpha + beta;
        let a1 = 2.0 * k * (k + alpha + beta) * (s - 2.0);
        let a2 = (s - 1.0) * (alpha * alpha - beta * beta);
        let a3 = (s - 2.0) * (s - 1.0) * s;
        let a4 = 2.0 * (k + alpha - 1.0) * (k + beta - 1.0) * s;
        let p2 = ((a2 + a3 * x) * p1 - a4 * p0) / a1;
        p0 = p1;
        p1 = p2;
    }
    let nf = n as f64;
    let s = 2.0 * nf + alpha + beta;
    let dp = (nf * ((alpha - beta) - s * x) * p1 + 2.0 * (nf + alpha) * (nf + beta) * p0)
        / (s * (1.0 - x * x));
    (p1, dp)
}

/// Gauss–Jacobi nodes and weights on `[0, 1]` for the weight `(1 - t)^alpha`
/// (`alpha` is 0 or 1).
fn gauss_jacobi01(n: usize, alpha: u32) -> (Vec<f64>, Vec<f64>) {
    let a = alpha as f64;
    // Golub–Welsch for starting nodes
    let mut jm = DMatrix::<f64>::zeros(n, n);
    for k in 0..n {
        let kf = k as f64;
        let s = 2.0 * kf + a;
        jm[(k, k)] = if k == 0 {
            -a / (a + 2.0)
        } else {
            -a * a / (s * (s + 2.0))
        };
        if k + 1 < n {
            let k1 = kf + 1.0;
            let s1 = 2.0 * k1 + a;
            let b =
                (4.0 * k1 * (k1 + a) * k1 * (k1 + a) / (s1 * s1 * (s1 + 1.0) * (s1 - 1.0))).sqrt();
            jm[(k, k + 1)] = b;
            jm[(k + 1, k)] = b;
        }
    }
    let mut nodes: Vec<f64> = SymmetricEigen::new(jm)
        .eigenvalues
        .iter()
        .copied()
        .collect();
    nodes.sort_by(|x, y| x.total_cmp(y));
    // Gamma ratio of the closed-form weight is 1 for integer alpha in {0, 1}.
    let scale = 2f64.powi(alpha as i32 + 1);
    let mut ts = Vec::with_capacity(n);
    let mut ws = Vec::with_capacity(n);
    for mut x in nodes {
        for _ in 0..3 {
            let (p, dp) = jacobi(n, a, x);
            x -= p / dp;
        }
        let (_, dp) = jacobi(n, a, x);
        let w = scale / ((1.0 - x * x) * dp * dp);
        ts.push(0.5 * (1.0 + x));
        ws.push(w / scale);
    }
    (ts, ws)
}

/// Gauss–Legendre rule on `[0, 1]`.
pub fn segment_rule(order: usize) -> Result<QuadRule> {
    check_order(order)?;
    let (t, w) = gauss_jacobi01(order, 0);
    Ok(QuadRule {
        points: t.into_iter().map(|t| [t, 0.0, 0.0]).collect(),
        weights: w,
        exact_degree: 2 * order - 1,
    })
}

/// Symmetric rule on the reference triangle `{x, y >= 0, x + y <= 1}`.
pub fn triangle_rule(order: usize) -> Result<QuadRule> {
    check_order(order)?;
    let (tj, wj) = gauss_jacobi01(order, 1);
    let (tl, wl) = gauss_jacobi01(order, 0);
    let mut points: Vec<Point> = Vec::new();
    let mut weights: Vec<f64> = Vec::new();
    const PERMS: [[usize; 3]; 6] = [
        [0, 1, 2],
        [0, 2, 1],
        [1, 0, 2],
        [1, 2, 0],
        [2, 0, 1],
        [2, 1, 0],
    ];
    for (x, wx) in tj.iter().zip(&wj) {
        for (s, ws) in tl.iter().zip(&wl) {
            let y = (1.0 - x) * s;
            let bary = [1.0 - x - y, *x, y];
            for perm in PERMS {
                let p = [bary[perm[1]], bary[perm[2]], 0.0];
                let w = wx * ws / 6.0;
                match points
                    .iter()
                    .position(|q| (q[0] - p[0]).abs() < 1e-14 && (q[1] - p[1]).abs() < 1e-14)
                {
                    Some(i) => weights[i] += w,
                    None => {
                        points.push(p);
                        weights.push(w);
                    }
                }
            }
        }
    }
    Ok(QuadRule {
        points,
        weights,
        exact_degree: 2 * order - 1,
    })
}

/// Tensor-product Gauss–Legendre rule on the unit square or cube.
pub fn tensor_rule(order: usize, dim: usize) -> Result<QuadRule> {
    check_order(order)?;
    if dim != 2 && dim != 3 {
        return Err(WgError::InvalidArgument(format!(
            "tensor rule dim must be 2 or 3, got {dim}"
        )));
    }
    let (t, w) = gauss_jacobi01(order, 0);
    let mut points = Vec::new();
    let mut weights = Vec::new();
    let nz = if dim == 3 { order } else { 1 };
    for k in 0..nz {
        for j in 0..order {
            for i in 0..order {
                let (z, wz) = if dim == 3 { (t[k], w[k]) } else { (0.0, 1.0) };
                points.push([t[i], t[j], z]);
                weights.push(w[i] * w[j] * wz);
            }
        }
    }
    Ok(QuadRule {
        points,
        weights,
        exact_degree: 2 * order - 1,
    })
}

/// All reference rules of one order, mapped onto physical cells and faces.
#[derive(Clone, Debug)]
pub struct RuleSet {
    pub order: usize,
    pub segment: QuadRule,
    pub triangle: QuadRule,
    pub square: QuadRule,
    pub cube: QuadRule,
}

impl RuleSet {
    pub fn new(order: usize) -> Result<RuleSet> {
        Ok(RuleSet {
            order,
            segment: segment_rule(order)?,
            triangle: triangle_rule(order)?,
            square: tensor_rule(order, 2)?,
            cube: tensor_rule(order, 3)?,
        })
    }

    /// Physical quadrature points and weights on a cell.
    pub fn cell_points(&self, cell: &CellGeometry) -> Vec<(Point, f64)> {
        let v = &cell.vertices;
        match cell.kind {
            CellKind::Triangle => {
                let e1 = crate::mesh::sub(&v[1], &v[0]);
                let e2 = crate::mesh::sub(&v[2], &v[0]);
                let jac = 2.0 * cell.measure;
                self.triangle
                    .iter()
                    .map(|(q, w)| {
                        let p = [
                            v[0][0] + q[0] * e1[0] + q[1] * e2[0],
                            v[0][1] + q[0] * e1[1] + q[1] * e2[1],
                            0.0,
                        ];
                        (p, w * jac)
                    })
                    .collect()
            }
            CellKind::Rect | CellKind::Box => {
                let rule = if cell.kind == CellKind::Rect {
                    &self.square
                } else {
                    &self.cube
                };
                let s = cell.sides;
                rule.iter()
                    .map(|(q, w)| {
                        let p = [
                            v[0][0] + q[0] * s[0],
                            v[0][1] + q[1] * s[1],
                            v[0][2] + q[2] * s[2],
                        ];
                        (p, w * cell.measure)
                    })
                    .collect()
            }
        }
    }

    /// Physical quadrature points and weights on a face (segment in 2D,
    /// tensor-ordered quadrilateral in 3D).
    pub fn face_points(&self, face: &FaceGeometry) -> Vec<(Point, f64)> {
        face_points_raw(self, &face.vertices, face.measure)
    }
}

pub(crate) fn face_points_raw(rules: &RuleSet, v: &[Point], measure: f64) -> Vec<(Point, f64)> {
    match v.len() {
        2 => rules
            .segment
            .iter()
            .map(|(q, w)| {
                let t = q[0];
                (
                    [
                        v[0][0] + t * (v[1][0] - v[0][0]),
                        v[0][1] + t * (v[1][1] - v[0][1]),
                        v[0][2] + t * (v[1][2] - v[0][2]),
                    ],
                    w * measure,
                )
            })
            .collect(),
        _ => rules
            .square
            .iter()
            .map(|(q, w)| {
                let mut p = [0.0; 3];
                for k in 0..3 {
                    p[k] = v[0][k] + q[0] * (v[1][k] - v[0][k]) + q[1] * (v[2][k] - v[0][k]);
                }
                (p, w * measure)
            })
            .collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn factorial(n: u32) -> f64 {
        (1..=n).map(f64::from).product()
    }

    #[test]
    fn midpoint_segment() {
        let r = segment_rule(1).unwrap();
        assert_eq!(r.len(), 1);
        assert!((r.points[0][0] - 0.5).abs() < 1e-16);
        assert!((r.weights[0] - 1.0).abs() < 1e-16);
    }

    #[test]
    fn segment_quintic() {
        let r = segment_rule(3).unwrap();
        let v: f64 = r.iter().map(|(p, w)| w * p[0].powi(5)).sum();
        assert!((v - 1.0 / 6.0).abs() < 1e-15, "{v}");
        for order in 1..=MAX_ORDER {
            let r = segment_rule(order).unwrap();
            let s: f64 = r.weights.iter().sum();
            assert!((s - 1.0).abs() < 1e-14);
            assert!(r.weights.iter().all(|&w| w > 0.0));
        }
    }

    #[test]
    fn centroid_triangle() {
        let r = triangle_rule(1).unwrap();
        assert_eq!(r.len(), 1);
        assert!((r.points[0][0] - 1.0 / 3.0).abs() < 1e-15);
        assert!((r.points[0][1] - 1.0 / 3.0).abs() < 1e-15);
        assert!((r.weights[0] - 0.5).abs() < 1e-15);
    }

    #[test]
    fn triangle_x2y2() {
        let r = triangle_rule(3).unwrap();
        let v: f64 = r.iter().map(|(p, w)| w * p[0].powi(2) * p[1].powi(2)).sum();
        assert!((v - 1.0 / 180.0).abs() < 1e-14, "{v}");
    }

    #[test]
    fn triangle_monomials_all_orders() {
        for order in 1..=MAX_ORDER {
            let r = triangle_rule(order).unwrap();
            assert!(r.weights.iter().all(|&w| w > 0.0));
            let s: f64 = r.weights.iter().sum();
            assert!((s - 0.5).abs() < 1e-14);
            for a in 0..=r.exact_degree as u32 {
                for b in 0..=(r.exact_degree as u32 - a) {
                    let exact = factorial(a) * factorial(b) / factorial(a + b + 2);
                    let v: f64 = r
                        .iter()
                        .map(|(p, w)| w * p[0].powi(a as i32) * p[1].powi(b as i32))
                        .sum();
                    assert!(
                        (v - exact).abs() <= 1e-13 * exact.max(1e-3),
                        "order {order} x^{a} y^{b}"
                    );
                }
            }
        }
    }

    #[test]
    fn triangle_rule_is_symmetric() {
        let r = triangle_rule(4).unwrap();
        for (p, w) in r.iter() {
            let mirrored = [p[1], p[0], 0.0];
            let found = r.iter().any(|(q, v)| {
                (q[0] - mirrored[0]).abs() < 1e-13
                    && (q[1] - mirrored[1]).abs() < 1e-13
                    && (v - w).abs() < 1e-15
            });
            assert!(found);
        }
    }

    #[test]
    fn tensor_rules() {
        let r = tensor_rule(2, 2).unwrap();
        assert_eq!(r.len(), 4);
        let v: f64 = r.iter().map(|(p, w)| w * p[0].powi(3) * p[1].powi(3)).sum();
        assert!((v - 1.0 / 16.0).abs() < 1e-15);
        let r = tensor_rule(2, 3).unwrap();
        assert_eq!(r.len(), 8);
        assert!((r.weights.iter().sum::<f64>() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn order_out_of_range() {
        assert!(segment_rule(0).is_err());
        assert!(triangle_rule(11).is_err());
        assert!(tensor_rule(3, 4).is_err());
    }

    #[test]
    fn mapped_rules_integrate_physical_polynomials() {
        let rules = RuleSet::new(3).unwrap();
        let tri =
            CellGeometry::triangle([[1.0, 1.0, 0.0], [3.0, 1.5, 0.0], [1.5, 4.0, 0.0]]).unwrap();
        // integral of 1 and x over the triangle: area and area * centroid_x
        let pts = rules.cell_points(&tri);
        let area: f64 = pts.iter().map(|(_, w)| w).sum();
        let mx: f64 = pts.iter().map(|(p, w)| w * p[0]).sum();
        assert!((area - tri.measure).abs() < 1e-14);
        assert!((mx - tri.measure * (1.0 + 3.0 + 1.5) / 3.0).abs() < 1e-13);

        let bx = CellGeometry::tensor([0.5, 1.0, -1.0], [2.0, 0.5, 0.25], 3).unwrap();
        let v: f64 = rules
            .cell_points(&bx)
            .iter()
            .map(|(p, w)| w * p[2] * p[2])
            .sum();
        // ∫ z² over [-1, -0.75] times the cross-section area 1
        let exact = ((-0.75f64).powi(3) - (-1.0f64).powi(3)) / 3.0;
        assert!((v - exact).abs() < 1e-14);
        for f in &bx.faces {
            let s: f64 = rules.face_points(f).iter().map(|(_, w)| w).sum();
            assert!((s - f.measure).abs() < 1e-15);
        }
    }
}
