//! Zero-energy modes on affine displacements and constant microdistortions,
//! boundary constraints on them, and the redundancy test on polynomial fields.

use std::fmt;
use std::str::FromStr;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::bvp1d::{self, Field, ProblemSpec};
use crate::constitutive::{energy_density, Curvature, IsotropicModuli, ModelKind};
use crate::field_calc::{grad, grad_mat, Poly, PolyField};
use crate::tensor_core::{
    check_unit, cross_mat_vec, curl_from_grad, dev_sym, skew, sym, Mat3, Tensor333, Vec3,
};
use crate::{Error, Result};

/// Dimension of the mode space `(A_u, b, P0)`.
pub const MODE_DIM: usize = 21;

const NULL_TOL: f64 = 1e-10;

/// `u = A_u·x + b` together with a constant microdistortion `P0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeVector {
    pub a_u: Mat3,
    pub b: Vec3,
    pub p0: Mat3,
}

impl ModeVector {
    pub fn zeros() -> Self {
        Self {
            a_u: Mat3::zeros(),
            b: Vec3::zeros(),
            p0: Mat3::zeros(),
        }
    }

    /// Coordinates ordered as `A_u` row-major, `b`, `P0` row-major.
    pub fn to_array(&self) -> [f64; MODE_DIM] {
        let mut out = [0.0; MODE_DIM];
        for i in 0..3 {
            for j in 0..3 {
                out[3 * i + j] = self.a_u[(i, j)];
                out[12 + 3 * i + j] = self.p0[(i, j)];
            }
            out[9 + i] = self.b[i];
        }
        out
    }

    pub fn from_slice(x: &[f64]) -> Result<Self> {
        if x.len() != MODE_DIM {
            return Err(Error::Shape(format!(
                "mode vector needs {MODE_DIM} entries, got {}",
                x.len()
            )));
        }
        Ok(Self {
            a_u: Mat3::from_fn(|i, j| x[3 * i + j]),
            b: Vec3::new(x[9], x[10], x[11]),
            p0: Mat3::from_fn(|i, j| x[12 + 3 * i + j]),
        })
    }

    fn unit(k: usize) -> Self {
        let mut x = [0.0; MODE_DIM];
        x[k] = 1.0;
        Self::from_slice(&x).unwrap()
    }

    pub fn displacement(&self, x: &Vec3) -> Vec3 {
        self.a_u * x + self.b
    }
}

/// Flat Dirichlet face through `x0` with unit normal `normal`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GammaSpec {
    pub x0: Vec3,
    pub normal: Vec3,
}

impl GammaSpec {
    pub fn new(x0: Vec3, normal: Vec3) -> Result<Self> {
        check_unit(&normal)?;
        Ok(Self { x0, normal })
    }

    /// Two orthonormal tangents of the face.
    pub fn tangents(&self) -> (Vec3, Vec3) {
        let n = self.normal;
        let seed = if n.x.abs() < 0.9 {
            Vec3::x()
        } else {
            Vec3::y()
        };
        let t1 = (seed - n * n.dot(&seed)).normalize();
        (t1, n.cross(&t1))
    }
}

impl Default for GammaSpec {
    /// The face `x2 = -1/2` of the stripe.
    fn default() -> Self {
        Self {
            x0: Vec3::new(0.0, -0.5, 0.0),
            normal: Vec3::new(0.0, -1.0, 0.0),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ModeBc {
    None,
    ClampU,
    ClampUClampP,
    ClampUConsistent,
    ClampUSymConsistent,
    ClampUDevSymConsistent,
}

impl ModeBc {
    pub const ALL: [ModeBc; 6] = [
        ModeBc::None,
        ModeBc::ClampU,
        ModeBc::ClampUClampP,
        ModeBc::ClampUConsistent,
        ModeBc::ClampUSymConsistent,
        ModeBc::ClampUDevSymConsistent,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ModeBc::None => "none",
            ModeBc::ClampU => "clamp-u",
            ModeBc::ClampUClampP => "clamp-u+clamp-p",
            ModeBc::ClampUConsistent => "clamp-u+cc",
            ModeBc::ClampUSymConsistent => "clamp-u+sym-cc",
            ModeBc::ClampUDevSymConsistent => "clamp-u+devsym-cc",
        }
    }
}

impl fmt::Display for ModeBc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ModeBc {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        ModeBc::ALL
            .into_iter()
            .find(|b| b.name() == s.to_ascii_lowercase())
            .ok_or_else(|| Error::Parse(format!("unknown mode boundary condition `{s}`")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModeReport {
    pub model: String,
    pub mu_c: bool,
    pub bc: String,
    pub dim: usize,
    pub expected: usize,
    #[serde(rename = "match")]
    pub matches: bool,
    /// Each basis vector in the `(A_u, b, P0)` coordinate order.
    pub basis: Vec<Vec<f64>>,
}

/// Rows of a linear map `ModeVector → Mat3`, one per matrix entry.
fn mat_rows(f: impl Fn(&ModeVector) -> Mat3) -> Vec<[f64; MODE_DIM]> {
    let cols: Vec<Mat3> = (0..MODE_DIM).map(|k| f(&ModeVector::unit(k))).collect();
    (0..9)
        .map(|e| {
            let mut row = [0.0; MODE_DIM];
            for k in 0..MODE_DIM {
                row[k] = cols[k][(e / 3, e % 3)];
            }
            row
        })
        .collect()
}

fn vec_rows(f: impl Fn(&ModeVector) -> Vec3) -> Vec<[f64; MODE_DIM]> {
    let cols: Vec<Vec3> = (0..MODE_DIM).map(|k| f(&ModeVector::unit(k))).collect();
    (0..3)
        .map(|e| {
            let mut row = [0.0; MODE_DIM];
            for k in 0..MODE_DIM {
                row[k] = cols[k][e];
            }
            row
        })
        .collect()
}

fn to_matrix(rows: &[[f64; MODE_DIM]]) -> DMatrix<f64> {
    DMatrix::from_fn(rows.len(), MODE_DIM, |r, c| rows[r][c])
}

/// Linear conditions on `(A_u, b, P0)` for vanishing energy.
pub fn energy_constraints(model: ModelKind, mu_c_positive: bool) -> DMatrix<f64> {
    let mut rows = Vec::new();
    match model {
        ModelKind::LinearElastic | ModelKind::SecondGradient => {
            rows.extend(mat_rows(|m| sym(&m.a_u)));
            rows.extend(mat_rows(|m| m.p0));
        }
        ModelKind::Cosserat => {
            rows.extend(mat_rows(|m| sym(&m.p0)));
            rows.extend(mat_rows(|m| sym(&m.a_u)));
            if mu_c_positive {
                rows.extend(mat_rows(|m| skew(&m.a_u) - m.p0));
            }
        }
        ModelKind::ClassicalMicromorphic | ModelKind::RelaxedMicromorphic => {
            rows.extend(mat_rows(|m| sym(&m.p0)));
            if mu_c_positive {
                rows.extend(mat_rows(|m| m.a_u - m.p0));
            } else {
                rows.extend(mat_rows(|m| sym(&(m.a_u - m.p0))));
            }
        }
    }
    to_matrix(&rows)
}

fn bc_constraints(bc: ModeBc, gamma: &GammaSpec) -> DMatrix<f64> {
    let nu = gamma.normal;
    let mut rows = Vec::new();
    if bc != ModeBc::None {
        let (t1, t2) = gamma.tangents();
        rows.extend(vec_rows(|m| m.a_u * t1));
        rows.extend(vec_rows(|m| m.a_u * t2));
        rows.extend(vec_rows(|m| m.displacement(&gamma.x0)));
    }
    match bc {
        ModeBc::None | ModeBc::ClampU => {}
        ModeBc::ClampUClampP => rows.extend(mat_rows(|m| m.p0)),
        ModeBc::ClampUConsistent => rows.extend(mat_rows(|m| cross_mat_vec(&(m.a_u - m.p0), &nu))),
        ModeBc::ClampUSymConsistent => {
            rows.extend(mat_rows(|m| sym(&cross_mat_vec(&(m.a_u - m.p0), &nu))))
        }
        ModeBc::ClampUDevSymConsistent => {
            rows.extend(mat_rows(|m| dev_sym(&cross_mat_vec(&(m.a_u - m.p0), &nu))))
        }
    }
    to_matrix(&rows)
}

/// Orthonormal basis of `ker c`, by singular values below `NULL_TOL` times
/// the largest one.
pub fn nullspace(c: &DMatrix<f64>) -> DMatrix<f64> {
    let n = c.ncols();
    if c.nrows() == 0 || c.amax() == 0.0 {
        return DMatrix::identity(n, n);
    }
    // Pad so that the SVD returns a full right singular basis.
    let rows = c.nrows().max(n);
    let mut padded = DMatrix::zeros(rows, n);
    padded.view_mut((0, 0), (c.nrows(), n)).copy_from(c);
    let svd = padded.svd(false, true);
    let vt = svd.v_t.expect("requested V");
    let smax = svd.singular_values.max();
    let cols: Vec<DVector<f64>> = (0..n)
        .filter(|&k| svd.singular_values[k] <= NULL_TOL * smax)
        .map(|k| vt.row(k).transpose())
        .collect();
    if cols.is_empty() {
        DMatrix::zeros(n, 0)
    } else {
        DMatrix::from_columns(&cols)
    }
}

fn basis_to_modes(k: &DMatrix<f64>) -> Vec<ModeVector> {
    k.column_iter()
        .map(|c| ModeVector::from_slice(c.as_slice()).unwrap())
        .collect()
}

fn modes_to_basis(modes: &[ModeVector]) -> DMatrix<f64> {
    let cols: Vec<DVector<f64>> = modes
        .iter()
        .map(|m| DVector::from_row_slice(&m.to_array()))
        .collect();
    if cols.is_empty() {
        DMatrix::zeros(MODE_DIM, 0)
    } else {
        DMatrix::from_columns(&cols)
    }
}

/// Orthonormal basis of the zero-energy modes. For the relaxed model the
/// curvature of a constant field vanishes, so the kernel coincides with the
/// classical micromorphic one on this space.
pub fn zero_energy_kernel(model: ModelKind, mu_c_positive: bool) -> Vec<ModeVector> {
    basis_to_modes(&nullspace(&energy_constraints(model, mu_c_positive)))
}

/// Restricts a kernel basis by the boundary conditions on `gamma`.
pub fn apply_bc(kernel: &[ModeVector], bc: ModeBc, gamma: &GammaSpec) -> Vec<ModeVector> {
    let k = modes_to_basis(kernel);
    if k.ncols() == 0 {
        return Vec::new();
    }
    let c = bc_constraints(bc, gamma);
    if c.nrows() == 0 {
        return kernel.to_vec();
    }
    let n = nullspace(&(&c * &k));
    basis_to_modes(&(k * n))
}

/// Kernel dimension stated for the model and constraint set.
pub fn expected_dimension(model: ModelKind, mu_c_positive: bool, bc: ModeBc) -> usize {
    let spin_free = matches!(
        model,
        ModelKind::ClassicalMicromorphic | ModelKind::RelaxedMicromorphic | ModelKind::Cosserat
    ) && !mu_c_positive;
    match bc {
        ModeBc::None => {
            if spin_free {
                9
            } else {
                6
            }
        }
        ModeBc::ClampU if spin_free => 3,
        _ => 0,
    }
}

pub fn mode_report(
    model: ModelKind,
    mu_c_positive: bool,
    bc: ModeBc,
    gamma: &GammaSpec,
) -> ModeReport {
    let kernel = apply_bc(&zero_energy_kernel(model, mu_c_positive), bc, gamma);
    let expected = expected_dimension(model, mu_c_positive, bc);
    ModeReport {
        model: model.short_name().to_string(),
        mu_c: mu_c_positive,
        bc: bc.name().to_string(),
        dim: kernel.len(),
        expected,
        matches: kernel.len() == expected,
        basis: kernel.iter().map(|m| m.to_array().to_vec()).collect(),
    }
}

/// A displacement of degree ≤ 2 and a microdistortion of degree ≤ 1.
#[derive(Debug, Clone, PartialEq)]
pub struct PolyMode {
    pub u: PolyField,
    pub p: PolyField,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Redundancy {
    pub redundant: bool,
    /// Vanishing first-order energy forces vanishing curvature energy.
    pub first_controls_all: bool,
    /// Vanishing curvature energy forces vanishing first-order energy.
    pub second_controls_all: bool,
    /// Field with zero first-order energy and positive curvature energy.
    pub witness_first: Option<PolyMode>,
    /// Field with zero curvature energy and positive first-order energy.
    pub witness_second: Option<PolyMode>,
}

const U_MONOMIALS: [[usize; 3]; 10] = [
    [0, 0, 0],
    [1, 0, 0],
    [0, 1, 0],
    [0, 0, 1],
    [2, 0, 0],
    [0, 2, 0],
    [0, 0, 2],
    [1, 1, 0],
    [1, 0, 1],
    [0, 1, 1],
];
const POLY_DIM: usize = 3 * 10 + 9 * 4;

fn poly_mode(c: &[f64]) -> PolyMode {
    let u = PolyField::vector(|i| {
        U_MONOMIALS
            .iter()
            .enumerate()
            .fold(Poly::zero(2), |acc, (m, e)| {
                &acc + &Poly::monomial(c[10 * i + m], *e, 2)
            })
    });
    let p = PolyField::matrix(|i, j| {
        U_MONOMIALS[..4]
            .iter()
            .enumerate()
            .fold(Poly::zero(1), |acc, (m, e)| {
                &acc + &Poly::monomial(c[30 + 4 * (3 * i + j) + m], *e, 1)
            })
    });
    PolyMode { u, p }
}

/// First-order arguments `(Du, P)` at `x` and the curvature argument.
fn mode_arguments(model: ModelKind, m: &PolyMode, x: &Vec3) -> (Mat3, Mat3, Curvature) {
    let du_field = grad(&m.u).unwrap();
    let du = du_field.eval_mat(x).unwrap();
    let mut pm = m.p.eval_mat(x).unwrap();
    let mut dp = grad_mat(&m.p).unwrap().eval_ten3(x).unwrap();
    if model == ModelKind::Cosserat {
        pm = skew(&pm);
        dp = dp.map_slices(skew);
    }
    let curv = match model {
        ModelKind::LinearElastic => Curvature::None,
        ModelKind::ClassicalMicromorphic => Curvature::Grad(dp),
        ModelKind::RelaxedMicromorphic | ModelKind::Cosserat => {
            Curvature::Curl(curl_from_grad(&dp))
        }
        ModelKind::SecondGradient => {
            Curvature::Hessian(grad_mat(&du_field).unwrap().eval_ten3(x).unwrap())
        }
    };
    (du, pm, curv)
}

/// Symmetric matrix of the quadratic form `q` by polarization on unit vectors.
fn polarize(dim: usize, q: impl Fn(&[f64]) -> Result<f64>) -> Result<DMatrix<f64>> {
    let unit = |a: usize| {
        let mut z = vec![0.0; dim];
        z[a] = 1.0;
        z
    };
    let diag: Vec<f64> = (0..dim).map(|a| q(&unit(a))).collect::<Result<_>>()?;
    let mut out = DMatrix::zeros(dim, dim);
    for a in 0..dim {
        out[(a, a)] = 2.0 * diag[a];
        for b in 0..a {
            let mut z = unit(a);
            z[b] = 1.0;
            let v = q(&z)? - diag[a] - diag[b];
            out[(a, b)] = v;
            out[(b, a)] = v;
        }
    }
    Ok(out)
}

fn curvature_to_vec(c: &Curvature) -> Vec<f64> {
    match c {
        Curvature::None => vec![],
        Curvature::Curl(m) => (0..9).map(|e| m[(e / 3, e % 3)]).collect(),
        Curvature::Grad(t) | Curvature::Hessian(t) => t.iter().collect(),
    }
}

fn vec_to_curvature(model: ModelKind, z: &[f64]) -> Curvature {
    match model {
        ModelKind::LinearElastic => Curvature::None,
        ModelKind::RelaxedMicromorphic | ModelKind::Cosserat => {
            Curvature::Curl(Mat3::from_fn(|i, j| z[3 * i + j]))
        }
        ModelKind::ClassicalMicromorphic => {
            Curvature::Grad(Tensor333::from_fn(|i, j, k| z[9 * i + 3 * j + k]))
        }
        ModelKind::SecondGradient => {
            Curvature::Hessian(Tensor333::from_fn(|i, j, k| z[9 * i + 3 * j + k]))
        }
    }
}

/// Decides redundancy on displacements of degree ≤ 2 and microdistortions
/// of degree ≤ 1 (skew for Cosserat). Both energy parts are positive
/// semidefinite, so a part vanishes on a field iff its quadratic form
/// annihilates the pointwise arguments at four affinely independent points.
pub fn redundancy_classify(model: ModelKind, mu_c_positive: bool) -> Result<Redundancy> {
    let p = IsotropicModuli::ones().with_mu_c(if mu_c_positive { 1.0 } else { 0.0 });
    let zero_curv = vec_to_curvature(model, &[0.0; 27]);
    let split = |pm: Mat3| {
        if model == ModelKind::Cosserat {
            skew(&pm)
        } else {
            pm
        }
    };
    let q1 = polarize(18, |z| {
        let du = Mat3::from_fn(|i, j| z[3 * i + j]);
        let pm = Mat3::from_fn(|i, j| z[9 + 3 * i + j]);
        energy_density(model, &p, &du, &split(pm), &zero_curv)
    })?;
    let cdim = curvature_to_vec(&zero_curv).len();
    let q2 = polarize(cdim, |z| {
        energy_density(
            model,
            &p,
            &Mat3::zeros(),
            &Mat3::zeros(),
            &vec_to_curvature(model, z),
        )
    })?;

    let points = [Vec3::zeros(), Vec3::x(), Vec3::y(), Vec3::z()];
    let mut m1 = DMatrix::zeros(18 * 4, POLY_DIM);
    let mut m2 = DMatrix::zeros(cdim * 4, POLY_DIM);
    for k in 0..POLY_DIM {
        let mut c = vec![0.0; POLY_DIM];
        c[k] = 1.0;
        let mode = poly_mode(&c);
        for (s, x) in points.iter().enumerate() {
            let (du, pm, curv) = mode_arguments(model, &mode, x);
            let z1 = DVector::from_iterator(
                18,
                du.transpose().iter().chain(pm.transpose().iter()).copied(),
            );
            let y1 = &q1 * z1;
            m1.view_mut((18 * s, k), (18, 1)).copy_from(&y1);
            if cdim > 0 {
                let y2 = &q2 * DVector::from_vec(curvature_to_vec(&curv));
                m2.view_mut((cdim * s, k), (cdim, 1)).copy_from(&y2);
            }
        }
    }
    // Cosserat fields carry a skew microdistortion only.
    let space = if model == ModelKind::Cosserat {
        let mut c = DMatrix::zeros(6 * 4, POLY_DIM);
        let mut row = 0;
        for m in 0..4 {
            for i in 0..3 {
                for j in i..3 {
                    c[(row, 30 + 4 * (3 * i + j) + m)] += 0.5;
                    c[(row, 30 + 4 * (3 * j + i) + m)] += 0.5;
                    row += 1;
                }
            }
        }
        nullspace(&c)
    } else {
        DMatrix::identity(POLY_DIM, POLY_DIM)
    };
    let (m1, m2) = (&m1 * &space, &m2 * &space);
    let scale = m1.amax().max(m2.amax()).max(f64::MIN_POSITIVE);
    let n1 = nullspace(&m1);
    let n2 = nullspace(&m2);
    let leak = |m: &DMatrix<f64>, n: &DMatrix<f64>| -> Option<DVector<f64>> {
        if n.ncols() == 0 || m.nrows() == 0 {
            return None;
        }
        let img = m * n;
        let (best, norm) = (0..img.ncols())
            .map(|c| (c, img.column(c).norm()))
            .fold((0, 0.0), |a, b| if b.1 > a.1 { b } else { a });
        (norm > 1e-8 * scale).then(|| &space * n.column(best))
    };
    let w_first = leak(&m2, &n1);
    let w_second = leak(&m1, &n2);
    let first_controls_all = w_first.is_none();
    let second_controls_all = w_second.is_none();
    Ok(Redundancy {
        redundant: first_controls_all || second_controls_all,
        first_controls_all,
        second_controls_all,
        witness_first: w_first.map(|c| poly_mode(c.as_slice())),
        witness_second: w_second.map(|c| poly_mode(c.as_slice())),
    })
}

/// Energy of a polynomial mode at a point, split into first-order and
/// curvature parts.
pub fn poly_mode_energy(
    model: ModelKind,
    p: &IsotropicModuli,
    m: &PolyMode,
    x: &Vec3,
) -> Result<(f64, f64)> {
    let (du, pm, curv) = mode_arguments(model, m, x);
    let zero = vec_to_curvature(model, &[0.0; 27]);
    let w1 = energy_density(model, p, &du, &pm, &zero)?;
    let w2 = energy_density(model, p, &Mat3::zeros(), &Mat3::zeros(), &curv)?;
    Ok((w1, w2))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct KernelCrosscheck {
    pub dim_discrete: usize,
    pub dim_predicted: usize,
    pub matches: bool,
}

fn ansatz_subspace(fields: &[Field]) -> DMatrix<f64> {
    let mut cols = Vec::new();
    for f in fields {
        match *f {
            Field::Disp(i) => {
                let mut m = ModeVector::zeros();
                m.b[i] = 1.0;
                cols.push(m);
                let mut m = ModeVector::zeros();
                m.a_u[(i, 1)] = 1.0;
                cols.push(m);
            }
            _ => cols.push(ModeVector {
                p0: f.unit_micro(),
                ..ModeVector::zeros()
            }),
        }
    }
    modes_to_basis(&cols)
}

/// Compares the kernel of the unconstrained assembled matrix with the
/// zero-energy modes representable in the ansatz profiles.
pub fn discrete_kernel_crosscheck(spec: &ProblemSpec) -> Result<KernelCrosscheck> {
    let system = bvp1d::assemble(spec)?;
    let k = system.k.to_dense();
    let eig = k.symmetric_eigen();
    let top = eig.eigenvalues.amax();
    let dim_discrete = eig
        .eigenvalues
        .iter()
        .filter(|&&l| l.abs() <= 1e-10 * top)
        .count();
    let s = ansatz_subspace(&system.energy.fields);
    let c = energy_constraints(spec.model, spec.params.mu_c > 0.0);
    let dim_predicted = nullspace(&(c * &s)).ncols();
    Ok(KernelCrosscheck {
        dim_discrete,
        dim_predicted,
        matches: dim_discrete == dim_predicted,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bvp1d::{BcKind, TestKind};

    fn gamma() -> GammaSpec {
        GammaSpec::default()
    }

    #[test]
    fn free_kernel_dimensions() {
        use ModelKind::*;
        for (model, mu, dim) in [
            (LinearElastic, true, 6),
            (Cosserat, true, 6),
            (ClassicalMicromorphic, true, 6),
            (ClassicalMicromorphic, false, 9),
            (RelaxedMicromorphic, false, 9),
            (SecondGradient, true, 6),
        ] {
            assert_eq!(zero_energy_kernel(model, mu).len(), dim, "{model} {mu}");
        }
    }

    #[test]
    fn kernel_modes_have_zero_energy() {
        for model in ModelKind::ALL {
            for mu in [true, false] {
                let p = IsotropicModuli::ones().with_mu_c(if mu { 1.0 } else { 0.0 });
                for m in zero_energy_kernel(model, mu) {
                    let curv = vec_to_curvature(model, &[0.0; 27]);
                    let pm = if model.has_micro_field() || model == ModelKind::Cosserat {
                        m.p0
                    } else {
                        Mat3::zeros()
                    };
                    let w = energy_density(model, &p, &m.a_u, &pm, &curv).unwrap();
                    assert!(w.abs() < 1e-13, "{model} {mu}: {w}");
                }
            }
        }
    }

    #[test]
    fn basis_is_orthonormal() {
        let k = modes_to_basis(&zero_energy_kernel(ModelKind::ClassicalMicromorphic, false));
        let g = k.transpose() * &k;
        assert!((g - DMatrix::identity(9, 9)).amax() < 1e-12);
    }

    #[test]
    fn boundary_chains() {
        let g = gamma();
        let mm0 = zero_energy_kernel(ModelKind::ClassicalMicromorphic, false);
        assert_eq!(apply_bc(&mm0, ModeBc::ClampU, &g).len(), 3);
        for bc in [
            ModeBc::ClampUConsistent,
            ModeBc::ClampUSymConsistent,
            ModeBc::ClampUDevSymConsistent,
            ModeBc::ClampUClampP,
        ] {
            assert_eq!(apply_bc(&mm0, bc, &g).len(), 0, "{bc}");
        }
        let le = zero_energy_kernel(ModelKind::LinearElastic, true);
        assert_eq!(apply_bc(&le, ModeBc::ClampU, &g).len(), 0);
        let tilted =
            GammaSpec::new(Vec3::new(0.3, 0.1, -0.2), Vec3::new(1.0, 2.0, 2.0) / 3.0).unwrap();
        assert_eq!(apply_bc(&mm0, ModeBc::ClampU, &tilted).len(), 3);
        assert_eq!(apply_bc(&mm0, ModeBc::ClampUConsistent, &tilted).len(), 0);
    }

    #[test]
    fn clamp_leaves_skew_micro_rotation() {
        let mm0 = zero_energy_kernel(ModelKind::ClassicalMicromorphic, false);
        for m in apply_bc(&mm0, ModeBc::ClampU, &gamma()) {
            assert!(m.a_u.amax() < 1e-12 && m.b.amax() < 1e-12);
            assert!(sym(&m.p0).amax() < 1e-12 && m.p0.amax() > 0.1);
        }
    }

    #[test]
    fn report_serializes() {
        let r = mode_report(
            ModelKind::ClassicalMicromorphic,
            false,
            ModeBc::ClampUConsistent,
            &gamma(),
        );
        assert_eq!((r.dim, r.expected, r.matches), (0, 0, true));
        let s = serde_json::to_string(&r).unwrap();
        assert!(s.contains("\"match\":true"));
    }

    #[test]
    fn redundancy_examples() {
        let r = redundancy_classify(ModelKind::ClassicalMicromorphic, true).unwrap();
        assert!(r.redundant);
        let r = redundancy_classify(ModelKind::SecondGradient, true).unwrap();
        assert!(r.redundant);
        let r = redundancy_classify(ModelKind::ClassicalMicromorphic, false).unwrap();
        assert!(!r.redundant);
        let p = IsotropicModuli::ones().with_mu_c(0.0);
        let w = r.witness_first.unwrap();
        let mut e1 = 0.0;
        let mut e2 = 0.0;
        for x in [Vec3::zeros(), Vec3::new(0.3, -0.2, 0.5)] {
            let (a, b) = poly_mode_energy(ModelKind::ClassicalMicromorphic, &p, &w, &x).unwrap();
            e1 += a;
            e2 += b;
        }
        assert!(e1.abs() < 1e-12 && e2 > 1e-6);
        assert!(
            !redundancy_classify(ModelKind::RelaxedMicromorphic, false)
                .unwrap()
                .redundant
        );
        assert!(
            redundancy_classify(ModelKind::RelaxedMicromorphic, true)
                .unwrap()
                .redundant
        );
        assert!(
            redundancy_classify(ModelKind::Cosserat, true)
                .unwrap()
                .redundant
        );
        assert!(
            !redundancy_classify(ModelKind::Cosserat, false)
                .unwrap()
                .redundant
        );
    }

    #[test]
    fn discrete_kernels() {
        let spec = |model, mu_c: f64, bc| {
            ProblemSpec::new(
                model,
                TestKind::SimpleShear,
                bc,
                IsotropicModuli::ones().with_mu_c(mu_c),
            )
            .with_n(20)
        };
        let r = discrete_kernel_crosscheck(&spec(
            ModelKind::ClassicalMicromorphic,
            0.0,
            BcKind::ConsistentCoupling,
        ))
        .unwrap();
        assert_eq!((r.dim_discrete, r.dim_predicted), (2, 2));
        let r = discrete_kernel_crosscheck(&spec(
            ModelKind::ClassicalMicromorphic,
            1.0,
            BcKind::ConsistentCoupling,
        ))
        .unwrap();
        assert_eq!((r.dim_discrete, r.dim_predicted), (1, 1));
        let r =
            discrete_kernel_crosscheck(&spec(ModelKind::SecondGradient, 1.0, BcKind::NormalClamp))
                .unwrap();
        assert_eq!((r.dim_discrete, r.dim_predicted), (1, 1));
        let r =
            discrete_kernel_crosscheck(&spec(ModelKind::Cosserat, 1.0, BcKind::ConsistentCoupling))
                .unwrap();
        assert!(r.matches, "{r:?}");
    }
}
