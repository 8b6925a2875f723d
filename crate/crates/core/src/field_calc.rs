//! Exact calculus on vector, matrix and third-order fields whose components
//! are trivariate polynomials.

use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::{DMatrix, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::tensor_core::{self, check_unit, cross_mat_vec, levi, Mat3, Tensor333, Vec3};
use crate::{Error, Result};

pub const DEFAULT_DEGREE: usize = 3;

/// Polynomial in `(x, y, z)` with total degree at most `deg`.
///
/// Coefficients are stored densely on the `(deg+1)^3` exponent cube; entries
/// above the total-degree cap are always zero.
#[derive(Debug, Clone, PartialEq)]
pub struct Poly {
    deg: usize,
    coef: Vec<f64>,
}

impl Poly {
    pub fn zero(deg: usize) -> Self {
        let n = deg + 1;
        Self {
            deg,
            coef: vec![0.0; n * n * n],
        }
    }

    pub fn constant(c: f64, deg: usize) -> Self {
        let mut p = Self::zero(deg);
        p.coef[0] = c;
        p
    }

    /// `c · x^i y^j z^k`.
    pub fn monomial(c: f64, e: [usize; 3], deg: usize) -> Self {
        assert!(
            e.iter().sum::<usize>() <= deg,
            "monomial exceeds degree cap"
        );
        let mut p = Self::zero(deg);
        let idx = p.idx(e[0], e[1], e[2]);
        p.coef[idx] = c;
        p
    }

    /// The coordinate function `x_axis`.
    pub fn coordinate(axis: usize, deg: usize) -> Self {
        let mut e = [0; 3];
        e[axis] = 1;
        Self::monomial(1.0, e, deg.max(1))
    }

    /// Coefficients uniform in `[-1, 1]` on every admissible exponent.
    pub fn random(deg: usize, rng: &mut impl Rng) -> Self {
        let mut p = Self::zero(deg);
        for (i, j, k) in p.exponents() {
            let idx = p.idx(i, j, k);
            p.coef[idx] = rng.random_range(-1.0..=1.0);
        }
        p
    }

    pub fn degree_cap(&self) -> usize {
        self.deg
    }

    fn idx(&self, i: usize, j: usize, k: usize) -> usize {
        let n = self.deg + 1;
        (i * n + j) * n + k
    }

    fn exponents(&self) -> impl Iterator<Item = (usize, usize, usize)> {
        let d = self.deg;
        (0..=d).flat_map(move |i| {
            (0..=d - i).flat_map(move |j| (0..=d - i - j).map(move |k| (i, j, k)))
        })
    }

    pub fn coeff(&self, e: [usize; 3]) -> f64 {
        if e.iter().sum::<usize>() > self.deg {
            0.0
        } else {
            self.coef[self.idx(e[0], e[1], e[2])]
        }
    }

    /// Re-embeds into a larger degree cap.
    pub fn with_degree(&self, deg: usize) -> Self {
        let mut p = Self::zero(deg);
        for (i, j, k) in self.exponents() {
            if i + j + k <= deg {
                let dst = p.idx(i, j, k);
                p.coef[dst] = self.coef[self.idx(i, j, k)];
            }
        }
        p
    }

    pub fn derivative(&self, axis: usize) -> Self {
        let mut p = Self::zero(self.deg);
        for (i, j, k) in self.exponents() {
            let e = [i, j, k];
            if e[axis] == 0 {
                continue;
            }
            let mut lower = e;
            lower[axis] -= 1;
            let dst = p.idx(lower[0], lower[1], lower[2]);
            p.coef[dst] += e[axis] as f64 * self.coef[self.idx(i, j, k)];
        }
        p
    }

    pub fn eval(&self, x: &Vec3) -> f64 {
        let n = self.deg + 1;
        let pw = |v: f64| {
            let mut out = vec![1.0; n];
            for e in 1..n {
                out[e] = out[e - 1] * v;
            }
            out
        };
        let (px, py, pz) = (pw(x[0]), pw(x[1]), pw(x[2]));
        self.exponents()
            .map(|(i, j, k)| self.coef[self.idx(i, j, k)] * px[i] * py[j] * pz[k])
            .sum()
    }

    pub fn scale(&self, s: f64) -> Self {
        Self {
            deg: self.deg,
            coef: self.coef.iter().map(|c| c * s).collect(),
        }
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.coef.iter().fold(0.0, |m, c| m.max(c.abs()))
    }
}

impl Add for &Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        let d = self.deg.max(rhs.deg);
        let (a, b) = (self.with_degree(d), rhs.with_degree(d));
        Poly {
            deg: d,
            coef: a.coef.iter().zip(&b.coef).map(|(x, y)| x + y).collect(),
        }
    }
}

impl Sub for &Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        self + &rhs.scale(-1.0)
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        self.scale(-1.0)
    }
}

impl Mul for &Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        let mut p = Poly::zero(self.deg + rhs.deg);
        for (i, j, k) in self.exponents() {
            let a = self.coef[self.idx(i, j, k)];
            if a == 0.0 {
                continue;
            }
            for (l, m, n) in rhs.exponents() {
                let dst = p.idx(i + l, j + m, k + n);
                p.coef[dst] += a * rhs.coef[rhs.idx(l, m, n)];
            }
        }
        p
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Shape {
    Vector,
    Matrix,
    Tensor3,
}

impl Shape {
    fn len(self) -> usize {
        match self {
            Shape::Vector => 3,
            Shape::Matrix => 9,
            Shape::Tensor3 => 27,
        }
    }
}

/// Vector, matrix or third-order field with polynomial components, stored
/// row-major (`(i, j, k) ↦ 9i + 3j + k`).
#[derive(Debug, Clone, PartialEq)]
pub struct PolyField {
    shape: Shape,
    comps: Vec<Poly>,
}

impl PolyField {
    pub fn new(shape: Shape, comps: Vec<Poly>) -> Result<Self> {
        if comps.len() != shape.len() {
            return Err(Error::Shape(format!(
                "{shape:?} field needs {} components, got {}",
                shape.len(),
                comps.len()
            )));
        }
        Ok(Self { shape, comps })
    }

    pub fn zero(shape: Shape, deg: usize) -> Self {
        Self {
            shape,
            comps: vec![Poly::zero(deg); shape.len()],
        }
    }

    pub fn random(shape: Shape, deg: usize, rng: &mut impl Rng) -> Self {
        Self {
            shape,
            comps: (0..shape.len()).map(|_| Poly::random(deg, rng)).collect(),
        }
    }

    pub fn vector(f: impl Fn(usize) -> Poly) -> Self {
        Self {
            shape: Shape::Vector,
            comps: (0..3).map(f).collect(),
        }
    }

    pub fn matrix(f: impl Fn(usize, usize) -> Poly) -> Self {
        Self {
            shape: Shape::Matrix,
            comps: (0..9).map(|n| f(n / 3, n % 3)).collect(),
        }
    }

    pub fn tensor3(f: impl Fn(usize, usize, usize) -> Poly) -> Self {
        Self {
            shape: Shape::Tensor3,
            comps: (0..27).map(|n| f(n / 9, (n / 3) % 3, n % 3)).collect(),
        }
    }

    pub fn shape(&self) -> Shape {
        self.shape
    }

    pub fn comps(&self) -> &[Poly] {
        &self.comps
    }

    fn expect(&self, shape: Shape, op: &str) -> Result<()> {
        if self.shape != shape {
            return Err(Error::Shape(format!(
                "{op} expects {shape:?}, got {:?}",
                self.shape
            )));
        }
        Ok(())
    }

    fn deg(&self) -> usize {
        self.comps.iter().map(Poly::degree_cap).max().unwrap_or(0)
    }

    pub fn v(&self, i: usize) -> &Poly {
        &self.comps[i]
    }

    pub fn m(&self, i: usize, j: usize) -> &Poly {
        &self.comps[3 * i + j]
    }

    pub fn t(&self, i: usize, j: usize, k: usize) -> &Poly {
        &self.comps[9 * i + 3 * j + k]
    }

    pub fn eval_vec(&self, x: &Vec3) -> Result<Vec3> {
        self.expect(Shape::Vector, "eval_vec")?;
        Ok(Vec3::from_fn(|i, _| self.v(i).eval(x)))
    }

    pub fn eval_mat(&self, x: &Vec3) -> Result<Mat3> {
        self.expect(Shape::Matrix, "eval_mat")?;
        Ok(Mat3::from_fn(|i, j| self.m(i, j).eval(x)))
    }

    pub fn eval_ten3(&self, x: &Vec3) -> Result<Tensor333> {
        self.expect(Shape::Tensor3, "eval_ten3")?;
        Ok(Tensor333::from_fn(|i, j, k| self.t(i, j, k).eval(x)))
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.expect(other.shape, "add")?;
        Ok(Self {
            shape: self.shape,
            comps: self
                .comps
                .iter()
                .zip(&other.comps)
                .map(|(a, b)| a + b)
                .collect(),
        })
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.comps.iter().fold(0.0, |m, p| m.max(p.max_abs_coeff()))
    }
}

/// `(Du)_{ij} = ∂_j u_i`.
pub fn grad(f: &PolyField) -> Result<PolyField> {
    f.expect(Shape::Vector, "grad")?;
    Ok(PolyField::matrix(|i, j| f.v(i).derivative(j)))
}

/// `(DP)_{ijk} = ∂_k P_ij`.
pub fn grad_mat(p: &PolyField) -> Result<PolyField> {
    p.expect(Shape::Matrix, "grad_mat")?;
    Ok(PolyField::tensor3(|i, j, k| p.m(i, j).derivative(k)))
}

/// Row-wise curl, `(Curl P)_{ab} = ε_{bij} ∂_i P_{aj}`.
pub fn curl_mat(p: &PolyField) -> Result<PolyField> {
    p.expect(Shape::Matrix, "curl_mat")?;
    let deg = p.deg();
    Ok(PolyField::matrix(|a, b| {
        let mut acc = Poly::zero(deg);
        for i in 0..3 {
            for j in 0..3 {
                let e = levi(b, i, j);
                if e != 0.0 {
                    acc = &acc + &p.m(a, j).derivative(i).scale(e);
                }
            }
        }
        acc
    }))
}

/// Row-wise divergence, `(Div σ)_i = ∂_j σ_ij`.
pub fn div_mat(s: &PolyField) -> Result<PolyField> {
    s.expect(Shape::Matrix, "div_mat")?;
    let deg = s.deg();
    Ok(PolyField::vector(|i| {
        (0..3).fold(Poly::zero(deg), |acc, j| &acc + &s.m(i, j).derivative(j))
    }))
}

/// `(DIV 𝔪)_{ij} = ∂_k 𝔪_{ijk}`.
pub fn div_ten3(m: &PolyField) -> Result<PolyField> {
    m.expect(Shape::Tensor3, "div_ten3")?;
    let deg = m.deg();
    Ok(PolyField::matrix(|i, j| {
        (0..3).fold(Poly::zero(deg), |acc, k| &acc + &m.t(i, j, k).derivative(k))
    }))
}

/// Field version of [`tensor_core::levi_lift`].
pub fn levi_lift_field(m: &PolyField) -> Result<PolyField> {
    m.expect(Shape::Matrix, "levi_lift_field")?;
    let deg = m.deg();
    Ok(PolyField::tensor3(|a, mm, n| {
        (0..3).fold(Poly::zero(deg), |acc, b| {
            &acc + &m.m(a, b).scale(levi(b, n, mm))
        })
    }))
}

/// The skew matrix field `anti(a(x))`.
pub fn anti_field(a: &PolyField) -> Result<PolyField> {
    a.expect(Shape::Vector, "anti_field")?;
    let deg = a.deg();
    let z = Poly::zero(deg);
    Ok(PolyField::matrix(|i, j| match (i, j) {
        (0, 1) => -a.v(2),
        (0, 2) => a.v(1).clone(),
        (1, 0) => a.v(2).clone(),
        (1, 2) => -a.v(0),
        (2, 0) => -a.v(1),
        (2, 1) => a.v(0).clone(),
        _ => z.clone(),
    }))
}

/// Axis-aligned box with a tensor-product Gauss–Legendre rule.
#[derive(Debug, Clone, PartialEq)]
pub struct Domain {
    pub lo: Vec3,
    pub hi: Vec3,
    pub order: usize,
}

impl Domain {
    pub fn new(lo: Vec3, hi: Vec3, order: usize) -> Result<Self> {
        if (0..3).any(|i| lo[i] >= hi[i]) {
            return Err(Error::Argument("domain needs lo < hi componentwise".into()));
        }
        if order == 0 {
            return Err(Error::Argument("quadrature order must be positive".into()));
        }
        Ok(Self { lo, hi, order })
    }

    /// Smallest rule integrating squares of degree-`deg` fields exactly.
    pub fn for_degree(lo: Vec3, hi: Vec3, deg: usize) -> Result<Self> {
        Self::new(lo, hi, (2 * deg + 1).div_ceil(2))
    }

    pub fn unit_cube() -> Self {
        Self::for_degree(Vec3::zeros(), Vec3::from_element(1.0), DEFAULT_DEGREE).unwrap()
    }

    /// Quadrature points and weights on the box.
    pub fn rule(&self) -> Vec<(Vec3, f64)> {
        let (x, w) = gauss_legendre(self.order);
        let mut out = Vec::with_capacity(x.len().pow(3));
        let half = (self.hi - self.lo) * 0.5;
        let mid = (self.hi + self.lo) * 0.5;
        let jac = half.product();
        for (a, wa) in x.iter().zip(&w) {
            for (b, wb) in x.iter().zip(&w) {
                for (c, wc) in x.iter().zip(&w) {
                    let p = mid + half.component_mul(&Vec3::new(*a, *b, *c));
                    out.push((p, wa * wb * wc * jac));
                }
            }
        }
        out
    }

    pub fn integrate(&self, f: impl Fn(&Vec3) -> f64) -> f64 {
        self.rule().iter().map(|(x, w)| w * f(x)).sum()
    }

    /// Uniform random points inside the box.
    pub fn random_points(&self, count: usize, rng: &mut impl Rng) -> Vec<Vec3> {
        (0..count)
            .map(|_| Vec3::from_fn(|i, _| rng.random_range(self.lo[i]..self.hi[i])))
            .collect()
    }
}

/// Gauss–Legendre nodes and weights on `[-1, 1]` (Golub–Welsch).
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut j = DMatrix::<f64>::zeros(n, n);
    for k in 1..n {
        let b = k as f64 / ((4 * k * k - 1) as f64).sqrt();
        j[(k, k - 1)] = b;
        j[(k - 1, k)] = b;
    }
    let eig = SymmetricEigen::new(j);
    let mut pairs: Vec<(f64, f64)> = (0..n)
        .map(|i| (eig.eigenvalues[i], 2.0 * eig.eigenvectors[(0, i)].powi(2)))
        .collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    pairs.into_iter().unzip()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurlBound {
    pub lhs: f64,
    pub rhs: f64,
    pub ok: bool,
}

/// Compares `∫‖Curl P‖²` against `2∫‖DP‖²` on the domain.
pub fn check_curl_bound(p: &PolyField, omega: &Domain) -> Result<CurlBound> {
    let c = curl_mat(p)?;
    let d = grad_mat(p)?;
    let mut lhs = 0.0;
    let mut rhs = 0.0;
    for (x, w) in omega.rule() {
        lhs += w * c.eval_mat(&x)?.norm_squared();
        rhs += w * 2.0 * d.eval_ten3(&x)?.norm_squared();
    }
    Ok(CurlBound {
        lhs,
        rhs,
        ok: lhs <= rhs + 1e-10 * rhs,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Residual {
    pub residual: f64,
    pub scale: f64,
}

impl Residual {
    pub fn relative(&self) -> f64 {
        if self.scale > 0.0 {
            self.residual / self.scale
        } else {
            self.residual
        }
    }
}

fn sample_points(seed: u64) -> Vec<Vec3> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Domain::unit_cube().random_points(5, &mut rng)
}

/// `DIV(levi_lift(Curl P)) + Curl Curl P` at five random points of the unit cube.
pub fn check_curlcurl_identity(p: &PolyField, seed: u64) -> Result<Residual> {
    let c = curl_mat(p)?;
    let lhs = div_ten3(&levi_lift_field(&c)?)?;
    let cc = curl_mat(&c)?;
    let mut out = Residual {
        residual: 0.0,
        scale: 0.0,
    };
    for x in sample_points(seed) {
        let a = lhs.eval_mat(&x)?;
        let b = cc.eval_mat(&x)?;
        out.residual = out.residual.max((a + b).norm());
        out.scale = out.scale.max(b.norm()).max(p.max_abs_coeff());
    }
    Ok(out)
}

/// `curl_mat(anti(a)) − nye_forward(grad a)` at five random points.
pub fn check_nye_identity(a: &PolyField, seed: u64) -> Result<Residual> {
    let c = curl_mat(&anti_field(a)?)?;
    let g = grad(a)?;
    let mut out = Residual {
        residual: 0.0,
        scale: 0.0,
    };
    for x in sample_points(seed) {
        let lhs = c.eval_mat(&x)?;
        let rhs = tensor_core::nye_forward(&g.eval_mat(&x)?);
        out.residual = out.residual.max((lhs - rhs).norm());
        out.scale = out.scale.max(rhs.norm()).max(a.max_abs_coeff());
    }
    Ok(out)
}

/// `curl_mat(grad u)` at five random points; identically zero in exact arithmetic.
pub fn check_curl_of_grad(u: &PolyField, seed: u64) -> Result<Residual> {
    let g = grad(u)?;
    let c = curl_mat(&g)?;
    let mut out = Residual {
        residual: 0.0,
        scale: 0.0,
    };
    for x in sample_points(seed) {
        out.residual = out.residual.max(c.eval_mat(&x)?.norm());
        out.scale = out.scale.max(g.eval_mat(&x)?.norm()).max(u.max_abs_coeff());
    }
    Ok(out)
}

/// Returns `(levi_lift(m)·ν, m × ν)`.
pub fn check_moment_trace(m: &Mat3, nu: &Vec3) -> Result<(Mat3, Mat3)> {
    check_unit(nu)?;
    Ok((tensor_core::levi_lift(m).dot_vec(nu), cross_mat_vec(m, nu)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x(i: usize) -> Poly {
        Poly::coordinate(i, 3)
    }

    #[test]
    fn gauss_rule_exactness() {
        let (x, w) = gauss_legendre(4);
        for d in 0..8 {
            let q: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(d)).sum();
            let exact = if d % 2 == 0 {
                2.0 / (d as f64 + 1.0)
            } else {
                0.0
            };
            assert!((q - exact).abs() < 1e-14, "degree {d}");
        }
    }

    #[test]
    fn grad_of_identity_field() {
        let u = PolyField::vector(x);
        let g = grad(&u).unwrap();
        let p = Vec3::new(0.3, -0.2, 0.9);
        assert_eq!(g.eval_mat(&p).unwrap(), Mat3::identity());
    }

    #[test]
    fn grad_of_affine_skew() {
        let a = tensor_core::anti(&Vec3::new(0.5, -1.0, 2.0));
        let b = Vec3::new(1.0, 2.0, 3.0);
        let u = PolyField::vector(|i| {
            (0..3).fold(Poly::constant(b[i], 1), |acc, j| {
                &acc + &x(j).scale(a[(i, j)])
            })
        });
        let g = grad(&u).unwrap();
        assert_eq!(g.eval_mat(&Vec3::new(4.0, 5.0, 6.0)).unwrap(), a);
    }

    #[test]
    fn grad_matches_finite_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let u = PolyField::random(Shape::Vector, 2, &mut rng);
        let g = grad(&u).unwrap();
        let eps = 1e-6;
        for p in Domain::unit_cube().random_points(5, &mut rng) {
            let exact = g.eval_mat(&p).unwrap();
            for j in 0..3 {
                let mut e = Vec3::zeros();
                e[j] = eps;
                let fd =
                    (u.eval_vec(&(p + e)).unwrap() - u.eval_vec(&(p - e)).unwrap()) / (2.0 * eps);
                for i in 0..3 {
                    let rel = (fd[i] - exact[(i, j)]).abs() / exact[(i, j)].abs().max(1.0);
                    assert!(rel <= 1e-6);
                }
            }
        }
    }

    #[test]
    fn shape_errors() {
        let m = PolyField::zero(Shape::Matrix, 2);
        assert!(matches!(grad(&m), Err(Error::Shape(_))));
        assert!(matches!(
            curl_mat(&PolyField::zero(Shape::Vector, 2)),
            Err(Error::Shape(_))
        ));
        assert!(PolyField::new(Shape::Vector, vec![Poly::zero(1)]).is_err());
    }

    #[test]
    fn constant_fields_have_zero_derivatives() {
        let p = PolyField::matrix(|i, j| Poly::constant((i * 3 + j) as f64, 3));
        let q = Vec3::new(0.1, 0.2, 0.3);
        assert_eq!(curl_mat(&p).unwrap().eval_mat(&q).unwrap(), Mat3::zeros());
        assert_eq!(div_mat(&p).unwrap().eval_vec(&q).unwrap(), Vec3::zeros());
        let t = PolyField::tensor3(|_, _, _| Poly::constant(1.0, 3));
        assert_eq!(div_ten3(&t).unwrap().eval_mat(&q).unwrap(), Mat3::zeros());
    }

    #[test]
    fn div_of_linear_field() {
        // σ = x ⊗ e1: σ_i1 = x_i, so (Div σ)_i = ∂_1 x_i = δ_i1.
        let s = PolyField::matrix(|i, j| if j == 0 { x(i) } else { Poly::zero(1) });
        let d = div_mat(&s)
            .unwrap()
            .eval_vec(&Vec3::new(0.4, 0.5, 0.6))
            .unwrap();
        assert_eq!(d, Vec3::x());
    }

    #[test]
    fn div_of_gradient_is_laplacian() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let p = PolyField::random(Shape::Matrix, 2, &mut rng);
        let dd = div_ten3(&grad_mat(&p).unwrap()).unwrap();
        let q = Vec3::new(0.3, 0.6, 0.9);
        let got = dd.eval_mat(&q).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                let lap = (0..3)
                    .map(|k| p.m(i, j).derivative(k).derivative(k).eval(&q))
                    .sum::<f64>();
                assert!((got[(i, j)] - lap).abs() < 1e-13);
            }
        }
    }

    #[test]
    fn curl_of_gradient_vanishes() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let u = PolyField::random(Shape::Vector, 3, &mut rng);
        let r = check_curl_of_grad(&u, 1).unwrap();
        assert!(r.residual <= 1e-12 * r.scale);
    }

    #[test]
    fn nye_on_linear_axial_field() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let a = PolyField::random(Shape::Vector, 1, &mut rng);
        let r = check_nye_identity(&a, 2).unwrap();
        assert!(r.relative() <= 1e-12);
    }

    #[test]
    fn curl_bound_trivial_cases() {
        let omega = Domain::unit_cube();
        let p = PolyField::matrix(|_, _| Poly::constant(2.0, 3));
        let b = check_curl_bound(&p, &omega).unwrap();
        assert_eq!((b.lhs, b.rhs, b.ok), (0.0, 0.0, true));
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let u = PolyField::random(Shape::Vector, 3, &mut rng);
        let b = check_curl_bound(&grad(&u).unwrap(), &omega).unwrap();
        assert!(b.lhs < 1e-20 && b.rhs > 0.0 && b.ok);
    }

    #[test]
    fn curlcurl_vanishes_for_linear() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let p = PolyField::random(Shape::Matrix, 1, &mut rng);
        assert_eq!(check_curlcurl_identity(&p, 0).unwrap().residual, 0.0);
    }

    #[test]
    fn moment_trace_examples() {
        let (l, r) = check_moment_trace(&Mat3::zeros(), &Vec3::x()).unwrap();
        assert_eq!((l, r), (Mat3::zeros(), Mat3::zeros()));
        let (l, r) = check_moment_trace(&Mat3::identity(), &Vec3::z()).unwrap();
        assert_eq!(l, tensor_core::anti(&Vec3::z()));
        assert_eq!(r, tensor_core::anti(&Vec3::z()));
        assert!(check_moment_trace(&Mat3::identity(), &Vec3::new(2.0, 0.0, 0.0)).is_err());
    }

    #[test]
    fn product_raises_degree() {
        let p = &x(0) * &x(1);
        assert_eq!(p.degree_cap(), 6);
        assert_eq!(p.coeff([1, 1, 0]), 1.0);
        assert_eq!(p.eval(&Vec3::new(2.0, 3.0, 5.0)), 6.0);
    }
}
