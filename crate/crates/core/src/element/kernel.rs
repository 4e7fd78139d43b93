//! Local matrices by quadrature and the per-cell kernel used by assembly.

use super::{basis_for, closed_dzt, dkinv_closed, Mat, TriangleBasis, Vector, WgBasis};
use crate::error::{Result, WgError};
use crate::mesh::{dot, CellGeometry, Point};
use crate::problem::Coefficients;
use crate::quadrature::RuleSet;

/// Weak-gradient matrices: `D c = -Z v0 + T vb` defines the coefficients
/// `c` of the discrete weak gradient of `(v0, vb)` in the basis fields.
#[derive(Clone, Debug, PartialEq)]
pub struct Dzt {
    /// `D_ij = (chi_j, chi_i)_K`.
    pub d: Mat,
    /// `Z_i = (div chi_i, 1)_K`, one column.
    pub z: Mat,
    /// `T_ij = <chi_i . n, 1>_{F_j}`.
    pub t: Mat,
}

/// Coefficient matrices in the gradient basis.
#[derive(Clone, Debug, PartialEq)]
pub struct Abc {
    /// `A_ij = (A chi_j, chi_i)_K`.
    pub a: Mat,
    /// `B_j = (beta . chi_j, 1)_K`, one row.
    pub b: Mat,
    /// `C = (gamma, 1)_K`.
    pub c: Mat,
}

/// Local stiffness split into interior/face blocks; rows are test
/// functions, columns trial functions.
#[derive(Clone, Debug, PartialEq)]
pub struct LocalStiffness {
    pub m00: Mat,
    pub m0b: Mat,
    pub mb0: Mat,
    pub mbb: Mat,
}

impl LocalStiffness {
    /// The full matrix with the interior unknown first.
    pub fn full(&self) -> Mat {
        let n0 = self.m00.nrows();
        let nb = self.mbb.nrows();
        let mut m = Mat::zeros(n0 + nb, n0 + nb);
        m.view_mut((0, 0), (n0, n0)).copy_from(&self.m00);
        m.view_mut((0, n0), (n0, nb)).copy_from(&self.m0b);
        m.view_mut((n0, 0), (nb, n0)).copy_from(&self.mb0);
        m.view_mut((n0, n0), (nb, nb)).copy_from(&self.mbb);
        m
    }
}

/// D, Z and T by quadrature.
pub fn local_dzt(basis: &WgBasis, cell: &CellGeometry, rules: &RuleSet) -> Result<Dzt> {
    let n = basis.nv();
    let pts = rules.cell_points(cell);
    let mut d = Mat::zeros(n, n);
    for (p, w) in &pts {
        let chi: Vec<Point> = (0..n).map(|i| basis.chi(i, p)).collect();
        for i in 0..n {
            for j in 0..n {
                d[(i, j)] += w * dot(&chi[i], &chi[j]);
            }
        }
    }
    let z = Mat::from_fn(n, 1, |i, _| basis.div_chi(i) * cell.measure);
    let mut t = Mat::zeros(n, basis.nb);
    for (j, face) in cell.faces.iter().enumerate() {
        for (p, w) in rules.face_points(face) {
            for i in 0..n {
                t[(i, j)] += w * basis.chi_dot_n(i, face, &p);
            }
        }
    }
    Ok(Dzt { d, z, t })
}

/// A, B and C by quadrature.
pub fn local_abc(
    basis: &WgBasis,
    cell: &CellGeometry,
    coeffs: &Coefficients,
    rules: &RuleSet,
) -> Result<Abc> {
    let n = basis.nv();
    let mut a = Mat::zeros(n, n);
    let mut b = Mat::zeros(1, n);
    let mut c = Mat::zeros(1, 1);
    for (p, w) in rules.cell_points(cell) {
        let chi: Vec<Point> = (0..n).map(|i| basis.chi(i, &p)).collect();
        let tensor = (coeffs.a)(&p);
        let achi: Vec<Point> = chi.iter().map(|v| mat_vec(&tensor, v)).collect();
        for i in 0..n {
            for j in 0..n {
                a[(i, j)] += w * dot(&achi[j], &chi[i]);
            }
        }
        if let Some(beta) = &coeffs.beta {
            let bv = beta(&p);
            for j in 0..n {
                b[(0, j)] += w * dot(&bv, &chi[j]);
            }
        }
        if let Some(gamma) = &coeffs.gamma {
            c[(0, 0)] += w * gamma(&p);
        }
    }
    if a.iter()
        .chain(b.iter())
        .chain(c.iter())
        .any(|v| !v.is_finite())
    {
        return Err(WgError::NonFinite("coefficient matrices".into()));
    }
    Ok(Abc { a, b, c })
}

fn mat_vec(m: &[[f64; 3]; 3], v: &Point) -> Point {
    [dot(&m[0], v), dot(&m[1], v), dot(&m[2], v)]
}

/// Local stiffness from the weak-gradient matrices. With `G0 = D^{-1} Z`
/// and `Gb = D^{-1} T` the weak gradient is `-G0 v0 + Gb vb`, so
///
/// ```text
/// M00 =  G0' A G0 - B G0 + C     M0b = -G0' A Gb + B Gb
/// Mb0 = -Gb' A G0                Mbb =  Gb' A Gb
/// ```
pub fn local_stiffness(dzt: &Dzt, d_inv: &Mat, abc: &Abc) -> LocalStiffness {
    let g0 = d_inv * &dzt.z;
    let gb = d_inv * &dzt.t;
    let ag0 = &abc.a * &g0;
    let agb = &abc.a * &gb;
    LocalStiffness {
        m00: g0.transpose() * &ag0 - &abc.b * &g0 + &abc.c,
        m0b: -(g0.transpose() * &agb) + &abc.b * &gb,
        mb0: -(gb.transpose() * &ag0),
        mbb: gb.transpose() * &agb,
    }
}

/// Coefficients of the discrete weak gradient of `(v0, vb)`.
pub fn discrete_gradient(dzt: &Dzt, d_inv: &Mat, v0: f64, vb: &[f64]) -> Vector {
    let rhs = &dzt.t * Vector::from_column_slice(vb) - dzt.z.column(0) * v0;
    d_inv * rhs
}

/// Evaluates `sum_i c_i chi_i(p)`.
pub fn evaluate_gradient(basis: &WgBasis, coeffs: &Vector, p: &Point) -> Point {
    let mut g = [0.0; 3];
    for (i, c) in coeffs.iter().enumerate() {
        let chi = basis.chi(i, p);
        for k in 0..3 {
            g[k] += c * chi[k];
        }
    }
    g
}

/// Inverse of a small dense matrix by LU.
pub fn invert_dense(m: &Mat) -> Result<Mat> {
    let inv = m
        .clone()
        .lu()
        .try_inverse()
        .ok_or(WgError::SingularLocalMatrix { cell: 0 })?;
    if inv.iter().any(|v| !v.is_finite()) {
        return Err(WgError::SingularLocalMatrix { cell: 0 });
    }
    Ok(inv)
}

/// Everything assembly and post-processing need from one cell.
#[derive(Clone, Debug)]
pub struct LocalKernel {
    pub basis: WgBasis,
    pub dzt: Dzt,
    pub d_inv: Mat,
    pub stiffness: LocalStiffness,
    /// `(f, 1)_K`.
    pub load: f64,
}

/// Production kernel: closed-form D, Z, T and D^{-1}, with the coefficient
/// matrices and load by quadrature.
pub fn local_kernel(
    cell: &CellGeometry,
    approach: TriangleBasis,
    coeffs: &Coefficients,
    rules: &RuleSet,
) -> Result<LocalKernel> {
    let basis = basis_for(cell, approach)?;
    let dzt = closed_dzt(&basis, cell)?;
    let d_inv = dkinv_closed(&basis, cell)?;
    let abc = local_abc(&basis, cell, coeffs, rules)?;
    let stiffness = local_stiffness(&dzt, &d_inv, &abc);
    let load: f64 = rules
        .cell_points(cell)
        .iter()
        .map(|(p, w)| w * (coeffs.f)(p))
        .sum();
    if !load.is_finite() {
        return Err(WgError::NonFinite("load".into()));
    }
    Ok(LocalKernel {
        basis,
        dzt,
        d_inv,
        stiffness,
        load,
    })
}
