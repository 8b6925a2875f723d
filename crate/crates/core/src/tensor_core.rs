//! Small dense tensors in three dimensions and the algebraic maps between them.
//!
//! Index conventions: `(DP)_{ijk} = ∂_k P_ij`, `(Da)_{ij} = ∂_j a_i`, and the
//! matrix Curl acts row by row, `(Curl P)_{ab} = ε_{bij} ∂_i P_{aj}`.

use std::ops::{Add, AddAssign, Index, IndexMut, Mul, Neg, Sub};

use nalgebra::{Matrix3, Vector3};

use crate::{Error, Result};

pub type Vec3 = Vector3<f64>;
pub type Mat3 = Matrix3<f64>;

const SKEW_TOL: f64 = 1e-12;
const UNIT_TOL: f64 = 1e-12;

/// Dense 3×3×3 array, stored as `data[i][j][k]`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Tensor333 {
    pub data: [[[f64; 3]; 3]; 3],
}

impl Tensor333 {
    pub fn zeros() -> Self {
        Self::default()
    }

    pub fn from_fn(mut f: impl FnMut(usize, usize, usize) -> f64) -> Self {
        let mut t = Self::zeros();
        for i in 0..3 {
            for j in 0..3 {
                for k in 0..3 {
                    t.data[i][j][k] = f(i, j, k);
                }
            }
        }
        t
    }

    /// The Levi-Civita symbol.
    pub fn levi_civita() -> Self {
        Self::from_fn(levi)
    }

    /// Builds `T` with `T[.., .., k] = slices[k]`.
    pub fn from_slices(slices: [Mat3; 3]) -> Self {
        Self::from_fn(|i, j, k| slices[k][(i, j)])
    }

    /// The matrix `T[.., .., k]`.
    pub fn slice(&self, k: usize) -> Mat3 {
        Mat3::from_fn(|i, j| self.data[i][j][k])
    }

    pub fn map_slices(&self, f: impl Fn(&Mat3) -> Mat3) -> Self {
        Self::from_slices([f(&self.slice(0)), f(&self.slice(1)), f(&self.slice(2))])
    }

    /// Contraction on the last index, `(T·v)_{ij} = T_{ijk} v_k`.
    pub fn dot_vec(&self, v: &Vec3) -> Mat3 {
        Mat3::from_fn(|i, j| (0..3).map(|k| self.data[i][j][k] * v[k]).sum())
    }

    pub fn inner(&self, other: &Self) -> f64 {
        self.iter().zip(other.iter()).map(|(a, b)| a * b).sum()
    }

    pub fn norm_squared(&self) -> f64 {
        self.inner(self)
    }

    pub fn norm(&self) -> f64 {
        self.norm_squared().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.iter().fold(0.0, |m, x| m.max(x.abs()))
    }

    pub fn iter(&self) -> impl Iterator<Item = f64> + '_ {
        self.data.iter().flatten().flatten().copied()
    }

    pub fn is_finite(&self) -> bool {
        self.iter().all(f64::is_finite)
    }
}

impl Index<(usize, usize, usize)> for Tensor333 {
    type Output = f64;
    fn index(&self, (i, j, k): (usize, usize, usize)) -> &f64 {
        &self.data[i][j][k]
    }
}

impl IndexMut<(usize, usize, usize)> for Tensor333 {
    fn index_mut(&mut self, (i, j, k): (usize, usize, usize)) -> &mut f64 {
        &mut self.data[i][j][k]
    }
}

impl Add for Tensor333 {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        Self::from_fn(|i, j, k| self.data[i][j][k] + rhs.data[i][j][k])
    }
}

impl AddAssign for Tensor333 {
    fn add_assign(&mut self, rhs: Self) {
        *self = *self + rhs;
    }
}

impl Sub for Tensor333 {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        Self::from_fn(|i, j, k| self.data[i][j][k] - rhs.data[i][j][k])
    }
}

impl Neg for Tensor333 {
    type Output = Self;
    fn neg(self) -> Self {
        self * -1.0
    }
}

impl Mul<f64> for Tensor333 {
    type Output = Self;
    fn mul(self, s: f64) -> Self {
        Self::from_fn(|i, j, k| self.data[i][j][k] * s)
    }
}

pub fn levi(i: usize, j: usize, k: usize) -> f64 {
    match (i, j, k) {
        (0, 1, 2) | (1, 2, 0) | (2, 0, 1) => 1.0,
        (0, 2, 1) | (2, 1, 0) | (1, 0, 2) => -1.0,
        _ => 0.0,
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Decomposition {
    pub sym: Mat3,
    pub skew: Mat3,
    pub dev: Mat3,
    pub tr: f64,
}

pub fn decompose(m: &Mat3) -> Decomposition {
    Decomposition {
        sym: sym(m),
        skew: skew(m),
        dev: dev(m),
        tr: m.trace(),
    }
}

pub fn sym(m: &Mat3) -> Mat3 {
    (m + m.transpose()) * 0.5
}

pub fn skew(m: &Mat3) -> Mat3 {
    (m - m.transpose()) * 0.5
}

pub fn dev(m: &Mat3) -> Mat3 {
    m - Mat3::identity() * (m.trace() / 3.0)
}

pub fn dev_sym(m: &Mat3) -> Mat3 {
    dev(&sym(m))
}

pub fn frobenius(a: &Mat3, b: &Mat3) -> f64 {
    a.component_mul(b).sum()
}

pub fn outer(a: &Vec3, b: &Vec3) -> Mat3 {
    a * b.transpose()
}

pub fn anti(v: &Vec3) -> Mat3 {
    Mat3::new(0.0, -v[2], v[1], v[2], 0.0, -v[0], -v[1], v[0], 0.0)
}

/// Inverse of [`anti`]; rejects matrices with a non-negligible symmetric part.
pub fn axl(a: &Mat3) -> Result<Vec3> {
    let s = sym(a).norm();
    if s > SKEW_TOL * a.norm() {
        return Err(Error::InvalidSkew(s));
    }
    Ok(Vec3::new(a[(2, 1)], a[(0, 2)], a[(1, 0)]))
}

/// Row-wise cross product `P × v`.
pub fn cross_mat_vec(p: &Mat3, v: &Vec3) -> Mat3 {
    p * anti(v)
}

/// `anti(a)^n` in closed form.
///
/// # Panics
/// If `n == 0`.
pub fn anti_power(a: &Vec3, n: u32) -> Mat3 {
    assert!(n >= 1, "anti_power requires n >= 1");
    let k = n.div_ceil(2);
    let sign = if (k - 1).is_multiple_of(2) { 1.0 } else { -1.0 };
    let scale = sign * a.norm_squared().powi(k as i32 - 1);
    let aa = anti(a);
    if n.is_multiple_of(2) {
        aa * aa * scale
    } else {
        aa * scale
    }
}

pub fn check_unit(nu: &Vec3) -> Result<()> {
    let n = nu.norm();
    if (n - 1.0).abs() > UNIT_TOL || !n.is_finite() {
        return Err(Error::InvalidNormal(n));
    }
    Ok(())
}

/// Splits `P` into its tangential part `P(1 − ν⊗ν)` and normal part `P(ν⊗ν)`.
pub fn split_boundary(p: &Mat3, nu: &Vec3) -> Result<(Mat3, Mat3)> {
    check_unit(nu)?;
    let nn = outer(nu, nu);
    Ok((p * (Mat3::identity() - nn), p * nn))
}

/// Curl of a skew field from the gradient of its axial vector.
pub fn nye_forward(g: &Mat3) -> Mat3 {
    Mat3::identity() * g.trace() - g.transpose()
}

/// Gradient of the axial vector from the Curl of a skew field.
pub fn nye_inverse(c: &Mat3) -> Mat3 {
    Mat3::identity() * (0.5 * c.trace()) - c.transpose()
}

/// Pointwise Curl from the gradient, `(Curl P)_{ab} = ε_{bij} (DP)_{aji}`.
pub fn curl_from_grad(dp: &Tensor333) -> Mat3 {
    let mut c = Mat3::zeros();
    for a in 0..3 {
        for b in 0..3 {
            let mut s = 0.0;
            for i in 0..3 {
                for j in 0..3 {
                    let e = levi(b, i, j);
                    if e != 0.0 {
                        s += e * dp[(a, j, i)];
                    }
                }
            }
            c[(a, b)] = s;
        }
    }
    c
}

/// Lifts a second-order moment to third order, `𝔪_{amn} = m_{ab} ε_{bnm}`.
///
/// This is the adjoint of the Curl map: `⟨levi_lift(m), DP⟩ = ⟨m, Curl P⟩`,
/// so that `levi_lift(m)·ν = m × ν`.
pub fn levi_lift(m: &Mat3) -> Tensor333 {
    Tensor333::from_fn(|a, mm, n| (0..3).map(|b| m[(a, b)] * levi(b, n, mm)).sum())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: &Mat3, b: &Mat3, tol: f64) -> bool {
        (a - b).amax() <= tol
    }

    #[test]
    fn decompose_identity_and_skew() {
        let d = decompose(&Mat3::identity());
        assert_eq!(d.sym, Mat3::identity());
        assert_eq!(d.skew, Mat3::zeros());
        assert_eq!(d.dev, Mat3::zeros());
        assert_eq!(d.tr, 3.0);
        let s = anti(&Vec3::new(0.3, -1.0, 2.0));
        let d = decompose(&s);
        assert_eq!(d.sym, Mat3::zeros());
        assert_eq!(d.skew, s);
        assert_eq!(d.dev, s);
        assert_eq!(d.tr, 0.0);
    }

    #[test]
    fn frobenius_basics() {
        assert_eq!(frobenius(&Mat3::identity(), &Mat3::identity()), 3.0);
        let a = Mat3::new(1.0, 2.0, 3.0, 2.0, 5.0, 6.0, 3.0, 6.0, 9.0);
        let b = anti(&Vec3::new(1.0, -2.0, 0.5));
        assert_eq!(frobenius(&a, &b), 0.0);
    }

    #[test]
    fn anti_axl_examples() {
        let e1 = Vec3::x();
        assert_eq!(anti(&e1) * Vec3::y(), Vec3::z());
        let v = Vec3::new(1.0, 2.0, 3.0);
        assert_eq!(axl(&anti(&v)).unwrap(), v);
        assert!(matches!(axl(&Mat3::identity()), Err(Error::InvalidSkew(_))));
    }

    #[test]
    fn anti_power_examples() {
        let a = Vec3::new(1.0, 2.0, 3.0);
        assert_eq!(anti_power(&a, 1), anti(&a));
        assert!(close(&anti_power(&a, 3), &(anti(&a) * -14.0), 1e-12));
        let nu = Vec3::new(1.0, 2.0, 2.0) / 3.0;
        let want = outer(&nu, &nu) - Mat3::identity();
        assert!(close(&anti_power(&nu, 2), &want, 1e-15));
    }

    #[test]
    fn cross_identity_rows() {
        let e1 = Vec3::x();
        let c = cross_mat_vec(&Mat3::identity(), &e1);
        for i in 0..3 {
            let ei = Vec3::from_fn(|k, _| if k == i { 1.0 } else { 0.0 });
            let row = ei.cross(&e1);
            for j in 0..3 {
                assert_eq!(c[(i, j)], row[j]);
            }
        }
    }

    #[test]
    fn split_boundary_examples() {
        let e2 = Vec3::y();
        let (t, n) = split_boundary(&Mat3::identity(), &e2).unwrap();
        assert_eq!(t, Mat3::identity() - outer(&e2, &e2));
        assert_eq!(n, outer(&e2, &e2));
        assert!(split_boundary(&Mat3::identity(), &Vec3::new(1.0, 1.0, 0.0)).is_err());
    }

    #[test]
    fn nye_examples() {
        assert_eq!(nye_forward(&Mat3::zeros()), Mat3::zeros());
        assert_eq!(nye_forward(&Mat3::identity()), Mat3::identity() * 2.0);
    }

    #[test]
    fn levi_lift_trace_is_cross() {
        let m = Mat3::identity();
        let nu = Vec3::z();
        assert_eq!(levi_lift(&m).dot_vec(&nu), anti(&nu));
    }
}
