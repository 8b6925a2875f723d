//! Shear and uniaxial extension of the stripe `x2 ∈ [-h/2, h/2]`.
//!
//! Every model is reduced to a quadratic integrand in its ansatz profiles and
//! discretized by Galerkin's method: continuous piecewise-linear profiles for
//! the first-order models and C¹ quadratic B-splines for the second-gradient
//! model. Essential conditions are imposed by elimination.

mod analytic;
pub mod ansatz;
pub mod banded;
pub mod basis;

use std::fmt;
use std::hash::{DefaultHasher, Hash, Hasher};
use std::str::FromStr;

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::constitutive::{
    moment, stress_sigma, DerivedModuli, IsotropicModuli, ModelKind, Moment,
};
use crate::tensor_core::{cross_mat_vec, outer, Mat3, Tensor333, Vec3};
use crate::{Error, Result};

pub use analytic::{sg_analytic_stiffness, sg_length_scale, SgAnalytic};
pub use ansatz::{ansatz_fields, Field, LocalElimination, ReducedEnergy};
use banded::BandedSym;

const PIVOT_TOL: f64 = 1e-14;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TestKind {
    SimpleShear,
    UniaxialExtension,
}

impl fmt::Display for TestKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TestKind::SimpleShear => "shear",
            TestKind::UniaxialExtension => "extension",
        })
    }
}

impl FromStr for TestKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "shear" | "simple-shear" => Ok(TestKind::SimpleShear),
            "extension" | "uniaxial-extension" => Ok(TestKind::UniaxialExtension),
            _ => Err(Error::Parse(format!("unknown test `{s}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BcKind {
    FullDirichlet,
    ConsistentCoupling,
    /// Displacement clamped, microdistortion free at both ends.
    FreeMicro,
    /// Second gradient: `u` and `u′` prescribed.
    NormalClamp,
    /// Second gradient: `u` prescribed, double stress free.
    MixedSG,
}

impl fmt::Display for BcKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BcKind::FullDirichlet => "fd",
            BcKind::ConsistentCoupling => "cc",
            BcKind::FreeMicro => "free-micro",
            BcKind::NormalClamp => "normal-clamp",
            BcKind::MixedSG => "mixed-sg",
        })
    }
}

impl FromStr for BcKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "fd" | "full-dirichlet" => Ok(BcKind::FullDirichlet),
            "cc" | "consistent-coupling" => Ok(BcKind::ConsistentCoupling),
            "free-micro" | "free" => Ok(BcKind::FreeMicro),
            "normal-clamp" | "sg-fd" => Ok(BcKind::NormalClamp),
            "mixed-sg" | "sg-mixed" => Ok(BcKind::MixedSG),
            _ => Err(Error::Parse(format!("unknown boundary condition `{s}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProblemSpec {
    pub model: ModelKind,
    pub test: TestKind,
    pub bc: BcKind,
    pub params: IsotropicModuli,
    pub h: f64,
    pub gamma: f64,
    pub n: usize,
}

impl ProblemSpec {
    pub fn new(model: ModelKind, test: TestKind, bc: BcKind, params: IsotropicModuli) -> Self {
        Self {
            model,
            test,
            bc,
            params,
            h: 1.0,
            gamma: 1.0,
            n: 200,
        }
    }

    pub fn with_n(self, n: usize) -> Self {
        Self { n, ..self }
    }

    pub fn with_lc(self, l_c: f64) -> Self {
        Self {
            params: self.params.with_lc(l_c),
            ..self
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 8 {
            return Err(Error::Spec("n ≥ 8 required".into()));
        }
        if !(self.h > 0.0) || !self.h.is_finite() {
            return Err(Error::Spec("h > 0 required".into()));
        }
        if self.gamma == 0.0 || !self.gamma.is_finite() {
            return Err(Error::Spec("gamma ≠ 0 required".into()));
        }
        // The micromorphic solvers accept the degenerate μ_micro = 0 case so
        // that a singular constrained system is reported as such.
        let degenerate_micro = self.model.has_micro_field() && self.params.mu_micro == 0.0;
        let violations: Vec<String> = self
            .params
            .validate()
            .into_iter()
            .filter(|v| !(degenerate_micro && v == "mu_micro > 0"))
            .collect();
        if !violations.is_empty() {
            return Err(Error::InvalidParams(violations));
        }
        check_admissible(self.model, self.bc, &self.params)
    }

    fn u_end(&self) -> f64 {
        0.5 * self.gamma * self.h
    }
}

fn check_admissible(model: ModelKind, bc: BcKind, p: &IsotropicModuli) -> Result<()> {
    use BcKind::*;
    use ModelKind::*;
    let ok = match model {
        SecondGradient => matches!(bc, NormalClamp | MixedSG),
        LinearElastic => matches!(bc, FullDirichlet | ConsistentCoupling),
        Cosserat | ClassicalMicromorphic => {
            matches!(bc, FullDirichlet | ConsistentCoupling | FreeMicro)
        }
        RelaxedMicromorphic => {
            if bc == FullDirichlet {
                return Err(Error::Spec(
                    "full Dirichlet data on P is not admissible for the relaxed model: \
                     only the tangential trace P×ν has a boundary value"
                        .into(),
                ));
            }
            matches!(bc, ConsistentCoupling | FreeMicro)
        }
    };
    if !ok {
        return Err(Error::Spec(format!(
            "boundary condition {bc} is not admissible for model {model}"
        )));
    }
    if bc == FreeMicro && p.mu_c <= 0.0 {
        return Err(Error::Spec(
            "free-micro boundary condition requires mu_c > 0".into(),
        ));
    }
    Ok(())
}

/// Micro components fixed by `P×ν = Du×ν` at the ends (ν = ±e2).
pub fn consistent_coupling_components(model: ModelKind, test: TestKind) -> Vec<Field> {
    use Field::*;
    match (model, test) {
        (ModelKind::Cosserat, TestKind::SimpleShear) => vec![CosseratAxial],
        (
            ModelKind::ClassicalMicromorphic | ModelKind::RelaxedMicromorphic,
            TestKind::SimpleShear,
        ) => {
            vec![Micro(1, 0)]
        }
        (
            ModelKind::ClassicalMicromorphic | ModelKind::RelaxedMicromorphic,
            TestKind::UniaxialExtension,
        ) => {
            vec![Micro(0, 0), Micro(2, 2)]
        }
        _ => vec![],
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BasisKind {
    Lagrange,
    QuadSpline,
}

/// Uniform mesh and dof layout. Lagrange dofs are interleaved by node.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Discretization {
    pub basis: BasisKind,
    pub elements: usize,
    pub fields: usize,
    pub x0: f64,
    pub dx: f64,
}

impl Discretization {
    fn new(basis: BasisKind, nodes: usize, fields: usize, h: f64) -> Self {
        let elements = nodes - 1;
        Self {
            basis,
            elements,
            fields,
            x0: -0.5 * h,
            dx: h / elements as f64,
        }
    }

    pub fn nodes(&self) -> usize {
        self.elements + 1
    }

    pub fn ndofs(&self) -> usize {
        match self.basis {
            BasisKind::Lagrange => self.nodes() * self.fields,
            BasisKind::QuadSpline => self.elements + 2,
        }
    }

    pub fn bandwidth(&self) -> usize {
        match self.basis {
            BasisKind::Lagrange => 2 * self.fields - 1,
            BasisKind::QuadSpline => 2,
        }
    }

    fn quad_points(&self) -> usize {
        match self.basis {
            BasisKind::Lagrange => 2,
            BasisKind::QuadSpline => 3,
        }
    }

    pub fn grid(&self) -> Vec<f64> {
        (0..self.nodes())
            .map(|i| self.x0 + i as f64 * self.dx)
            .collect()
    }

    /// Global dofs of element `e` and the map `B` from local dofs to
    /// `z = [values, d/dx2, d²/dx2²]` at local coordinate `t`.
    pub fn local(&self, e: usize, t: f64) -> (Vec<usize>, DMatrix<f64>) {
        let k = self.fields;
        let (s1, s2) = (1.0 / self.dx, 1.0 / (self.dx * self.dx));
        match self.basis {
            BasisKind::Lagrange => {
                let b = basis::p1(e, t);
                let mut dofs = Vec::with_capacity(2 * k);
                let mut m = DMatrix::zeros(3 * k, 2 * k);
                for a in 0..2 {
                    for c in 0..k {
                        let col = a * k + c;
                        dofs.push((e + a) * k + c);
                        m[(c, col)] = b.n[a];
                        m[(k + c, col)] = b.d1[a] * s1;
                        m[(2 * k + c, col)] = b.d2[a] * s2;
                    }
                }
                (dofs, m)
            }
            BasisKind::QuadSpline => {
                let b = basis::quad_spline(e, self.elements, t);
                let mut m = DMatrix::zeros(3, 3);
                for a in 0..3 {
                    m[(0, a)] = b.n[a];
                    m[(1, a)] = b.d1[a] * s1;
                    m[(2, a)] = b.d2[a] * s2;
                }
                ((e..e + 3).collect(), m)
            }
        }
    }

    /// `z` at local coordinate `t` of element `e` for the global dof vector `x`.
    pub fn z_at(&self, x: &[f64], e: usize, t: f64) -> DVector<f64> {
        let (dofs, b) = self.local(e, t);
        let xl = DVector::from_iterator(dofs.len(), dofs.iter().map(|&d| x[d]));
        b * xl
    }

    /// Assembles `∫ Bᵀ Q B dx2` over the mesh.
    pub fn assemble_form(&self, q: &DMatrix<f64>) -> BandedSym {
        let mut k = BandedSym::zeros(self.ndofs(), self.bandwidth());
        let rule = basis::gauss01(self.quad_points());
        for e in 0..self.elements {
            let mut ke: Option<DMatrix<f64>> = None;
            let mut dofs = Vec::new();
            for &(t, w) in &rule {
                let (d, b) = self.local(e, t);
                let contrib = b.transpose() * q * &b * (w * self.dx);
                ke = Some(match ke {
                    Some(acc) => acc + contrib,
                    None => contrib,
                });
                dofs = d;
            }
            let ke = ke.unwrap();
            for (a, &i) in dofs.iter().enumerate() {
                for (b, &j) in dofs.iter().enumerate() {
                    if j <= i {
                        k.add(i, j, ke[(a, b)]);
                    }
                }
            }
        }
        k
    }

    /// `∫ ½ zᵀ Q z dx2` by Gauss quadrature.
    pub fn integrate_energy(&self, q: &DMatrix<f64>, x: &[f64]) -> f64 {
        let rule = basis::gauss01(self.quad_points());
        let mut e = 0.0;
        for el in 0..self.elements {
            for &(t, w) in &rule {
                let z = self.z_at(x, el, t);
                e += w * self.dx * 0.5 * z.dot(&(q * &z));
            }
        }
        e
    }
}

/// Assembled Galerkin system before elimination of the essential constraints.
#[derive(Debug, Clone)]
pub struct DiscreteSystem {
    pub spec: ProblemSpec,
    /// The integrand actually discretized (after pointwise elimination at `L_c = 0`).
    pub energy: ReducedEnergy,
    pub elimination: Option<LocalElimination>,
    pub disc: Discretization,
    pub k: BandedSym,
    /// External load; zero since the stripe carries no body forces.
    pub f: Vec<f64>,
    /// Prescribed `(dof, value)` pairs.
    pub constraints: Vec<(usize, f64)>,
}

impl DiscreteSystem {
    pub fn free_dofs(&self) -> Vec<usize> {
        let mut fixed = vec![false; self.disc.ndofs()];
        for &(d, _) in &self.constraints {
            fixed[d] = true;
        }
        (0..self.disc.ndofs()).filter(|&d| !fixed[d]).collect()
    }

    /// Discrete energy of a full dof vector, by quadrature of the integrand.
    pub fn energy_of(&self, x: &[f64]) -> f64 {
        self.disc.integrate_energy(&self.energy.q, x)
    }

    /// Consistent L² mass matrix of the profile values.
    pub fn mass(&self) -> BandedSym {
        let k = self.energy.k();
        let mut q = DMatrix::zeros(3 * k, 3 * k);
        for a in 0..k {
            q[(a, a)] = 1.0;
        }
        self.disc.assemble_form(&q)
    }

    /// Stiffness restricted to the free dofs.
    pub fn constrained_matrix(&self) -> BandedSym {
        self.k.restrict(&self.free_dofs())
    }
}

pub fn reduce_energy(spec: &ProblemSpec) -> Result<ReducedEnergy> {
    check_admissible(spec.model, spec.bc, &spec.params)?;
    ReducedEnergy::new(spec.model, spec.test, &spec.params)
}

pub fn assemble(spec: &ProblemSpec) -> Result<DiscreteSystem> {
    spec.validate()?;
    let full = ReducedEnergy::new(spec.model, spec.test, &spec.params)?;
    let local = spec.params.l_c == 0.0 && full.fields.iter().any(Field::is_micro);
    let (energy, elimination) = if local {
        let e = full.eliminate_micro()?;
        (e.reduced.clone(), Some(e))
    } else {
        (full, None)
    };
    let basis = if spec.model == ModelKind::SecondGradient {
        BasisKind::QuadSpline
    } else {
        BasisKind::Lagrange
    };
    let disc = Discretization::new(basis, spec.n, energy.k(), spec.h);
    let k = disc.assemble_form(&energy.q);
    let constraints = essential_constraints(spec, &energy, &disc);
    Ok(DiscreteSystem {
        spec: *spec,
        f: vec![0.0; disc.ndofs()],
        energy,
        elimination,
        disc,
        k,
        constraints,
    })
}

fn essential_constraints(
    spec: &ProblemSpec,
    energy: &ReducedEnergy,
    disc: &Discretization,
) -> Vec<(usize, f64)> {
    let ub = spec.u_end();
    let last = disc.nodes() - 1;
    let mut out = Vec::new();
    match disc.basis {
        BasisKind::QuadSpline => {
            let m = disc.elements;
            out.push((0, -ub));
            out.push((m + 1, ub));
            if spec.bc == BcKind::NormalClamp && energy.uses_second_derivatives() {
                out.push((1, -ub));
                out.push((m, ub));
            }
        }
        BasisKind::Lagrange => {
            let k = disc.fields;
            let cc = consistent_coupling_components(spec.model, spec.test);
            for (c, f) in energy.fields.iter().enumerate() {
                let clamp = match f {
                    Field::Disp(_) => {
                        out.push((c, -ub));
                        out.push((last * k + c, ub));
                        continue;
                    }
                    _ => match spec.bc {
                        BcKind::FullDirichlet => true,
                        BcKind::ConsistentCoupling => cc.contains(f),
                        _ => false,
                    },
                };
                if clamp {
                    out.push((c, 0.0));
                    out.push((last * k + c, 0.0));
                }
            }
        }
    }
    out.sort_by_key(|&(d, _)| d);
    out
}

#[derive(Debug, Clone, PartialEq)]
pub struct Profile {
    pub name: String,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Solution1D {
    pub grid: Vec<f64>,
    pub profiles: Vec<Profile>,
    /// Energy per unit cross-sectional area.
    pub energy_total: f64,
    /// Full dof vector of the discretized (possibly reduced) problem.
    pub dofs: Vec<f64>,
    /// `‖K x − f‖ / ‖f‖` on the constrained system.
    pub residual: f64,
}

impl Solution1D {
    pub fn profile(&self, name: &str) -> Option<&[f64]> {
        self.profiles
            .iter()
            .find(|p| p.name == name)
            .map(|p| p.values.as_slice())
    }
}

pub fn solve(system: &DiscreteSystem) -> Result<Solution1D> {
    let n = system.disc.ndofs();
    let free = system.free_dofs();
    let mut x = vec![0.0; n];
    for &(d, v) in &system.constraints {
        x[d] = v;
    }
    let kx = system.k.matvec(&x);
    let rhs: Vec<f64> = free.iter().map(|&i| system.f[i] - kx[i]).collect();
    let kff = system.k.restrict(&free);
    let fac = kff.ldlt(PIVOT_TOL);
    let xf = fac.solve(&rhs)?;
    let r = kff.matvec(&xf);
    let rn = rhs.iter().map(|v| v * v).sum::<f64>().sqrt();
    let res = r
        .iter()
        .zip(&rhs)
        .map(|(a, b)| (a - b).powi(2))
        .sum::<f64>()
        .sqrt();
    for (a, &i) in free.iter().enumerate() {
        x[i] = xf[a];
    }
    let energy_total = system.energy_of(&x);
    Ok(Solution1D {
        grid: system.disc.grid(),
        profiles: profiles(system, &x),
        energy_total,
        residual: if rn > 0.0 { res / rn } else { res },
        dofs: x,
    })
}

fn profiles(system: &DiscreteSystem, x: &[f64]) -> Vec<Profile> {
    let disc = &system.disc;
    let nodes = disc.nodes();
    let mut out = Vec::new();
    match disc.basis {
        BasisKind::Lagrange => {
            let k = disc.fields;
            for (c, f) in system.energy.fields.iter().enumerate() {
                out.push(Profile {
                    name: f.name(),
                    values: (0..nodes).map(|i| x[i * k + c]).collect(),
                });
            }
        }
        BasisKind::QuadSpline => {
            let values = (0..nodes)
                .map(|i| {
                    if i < disc.elements {
                        disc.z_at(x, i, 0.0)[0]
                    } else {
                        disc.z_at(x, disc.elements - 1, 1.0)[0]
                    }
                })
                .collect();
            out.push(Profile {
                name: system.energy.fields[0].name(),
                values,
            });
        }
    }
    if let Some(elim) = &system.elimination {
        // Element midpoint values, averaged onto the nodes.
        let mids: Vec<DVector<f64>> = (0..disc.elements)
            .map(|e| &elim.recovery * disc.z_at(x, e, 0.5))
            .collect();
        for (r, f) in elim.eliminated.iter().enumerate() {
            let values = (0..nodes)
                .map(|i| {
                    let l = if i > 0 { Some(mids[i - 1][r]) } else { None };
                    let rr = if i < disc.elements {
                        Some(mids[i][r])
                    } else {
                        None
                    };
                    match (l, rr) {
                        (Some(a), Some(b)) => 0.5 * (a + b),
                        (Some(a), None) | (None, Some(a)) => a,
                        (None, None) => 0.0,
                    }
                })
                .collect();
            out.push(Profile {
                name: f.name(),
                values,
            });
        }
    }
    out
}

/// `2 E / (γ² h)`.
pub fn apparent_stiffness(sol: &Solution1D, spec: &ProblemSpec) -> f64 {
    2.0 * sol.energy_total / (spec.gamma * spec.gamma * spec.h)
}

pub fn solve_spec(spec: &ProblemSpec) -> Result<Solution1D> {
    solve(&assemble(spec)?)
}

pub fn stiffness(spec: &ProblemSpec) -> Result<f64> {
    Ok(apparent_stiffness(&solve_spec(spec)?, spec))
}

/// The Cauchy limit stiffness: `μ_macro` for shear, `M_macro` for extension.
pub fn macro_stiffness(p: &IsotropicModuli, test: TestKind) -> Result<f64> {
    let d = DerivedModuli::from_moduli(p)?;
    Ok(match test {
        TestKind::SimpleShear => d.mu_macro,
        TestKind::UniaxialExtension => d.m_macro,
    })
}

/// The bounded large-`L_c` limit under consistent coupling: `μ̄` or `M̄`.
pub fn bar_stiffness(p: &IsotropicModuli, test: TestKind) -> f64 {
    match test {
        TestKind::SimpleShear => crate::constitutive::mu_bar(p),
        TestKind::UniaxialExtension => crate::constitutive::m_bar(p),
    }
}

/// Smallest eigenvalue of `K v = λ M v` on the free dofs, with `M` the L² mass.
pub fn smallest_eigenvalue(system: &DiscreteSystem) -> Result<f64> {
    let free = system.free_dofs();
    let k = system.k.restrict(&free);
    let m = system.mass().restrict(&free);
    let n = free.len();
    let fac = k.ldlt(PIVOT_TOL);
    if !fac.is_positive_definite() {
        return Err(Error::SingularSystem {
            kernel_dim: fac.kernel_dim(),
        });
    }
    let p = n.min(6);
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut x = DMatrix::from_fn(n, p, |_, _| rng.random_range(-1.0..1.0));
    let mut last = f64::INFINITY;
    for _ in 0..500 {
        let mut y = DMatrix::zeros(n, p);
        for c in 0..p {
            let mx = m.matvec(x.column(c).as_slice());
            let col = fac.solve(&mx)?;
            y.set_column(c, &DVector::from_vec(col));
        }
        let ky = DMatrix::from_fn(n, p, |_, _| 0.0);
        let mut ky = ky;
        let mut my = DMatrix::zeros(n, p);
        for c in 0..p {
            ky.set_column(c, &DVector::from_vec(k.matvec(y.column(c).as_slice())));
            my.set_column(c, &DVector::from_vec(m.matvec(y.column(c).as_slice())));
        }
        let kr = y.transpose() * &ky;
        let mr = y.transpose() * &my;
        let (vals, vecs) = generalized_eigen(&kr, &mr)?;
        x = &y * vecs;
        let lam = vals[0];
        if (lam - last).abs() <= 1e-13 * lam.abs() {
            return Ok(lam);
        }
        last = lam;
    }
    Ok(last)
}

/// Sorted eigenpairs of the small dense pencil `(a, b)` with `b` SPD.
fn generalized_eigen(a: &DMatrix<f64>, b: &DMatrix<f64>) -> Result<(Vec<f64>, DMatrix<f64>)> {
    let bs = (b + b.transpose()) * 0.5;
    let chol = bs
        .cholesky()
        .ok_or(Error::SingularSystem { kernel_dim: 0 })?;
    let l = chol.l();
    let linv = l
        .clone()
        .try_inverse()
        .ok_or(Error::SingularSystem { kernel_dim: 0 })?;
    let c = &linv * a * linv.transpose();
    let c = (&c + c.transpose()) * 0.5;
    let eig = c.symmetric_eigen();
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let vals = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let v = DMatrix::from_fn(a.nrows(), order.len(), |r, c| {
        eig.eigenvectors[(r, order[c])]
    });
    Ok((vals, linv.transpose() * v))
}

/// Dense reference for [`smallest_eigenvalue`], intended for small systems.
pub fn smallest_eigenvalue_dense(system: &DiscreteSystem) -> Result<f64> {
    let free = system.free_dofs();
    let k = system.k.restrict(&free).to_dense();
    let m = system.mass().restrict(&free).to_dense();
    Ok(generalized_eigen(&k, &m)?.0[0])
}

/// Largest relative deviation between `K x` and the central-difference
/// gradient of the quadrature energy, at a random dof vector.
pub fn variational_consistency(system: &DiscreteSystem, seed: u64) -> f64 {
    let n = system.disc.ndofs();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let x: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
    let kx = system.k.matvec(&x);
    let scale = kx
        .iter()
        .fold(0.0f64, |m, v| m.max(v.abs()))
        .max(f64::MIN_POSITIVE);
    let step = 1e-3;
    let mut worst = 0.0f64;
    let mut y = x.clone();
    for i in 0..n {
        y[i] = x[i] + step;
        let ep = system.energy_of(&y);
        y[i] = x[i] - step;
        let em = system.energy_of(&y);
        y[i] = x[i];
        let g = (ep - em) / (2.0 * step);
        worst = worst.max((g - kx[i]).abs() / scale);
    }
    worst
}

#[derive(Debug, Clone, PartialEq)]
pub struct CurveRow {
    pub l_c: f64,
    pub stiffness: std::result::Result<f64, String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StiffnessCurve {
    pub model: ModelKind,
    pub test: TestKind,
    pub bc: BcKind,
    pub params_digest: String,
    pub rows: Vec<CurveRow>,
}

impl StiffnessCurve {
    /// Nondecreasing in `L_c` over the successful rows, with relative slack.
    pub fn is_monotone(&self, rel_tol: f64) -> bool {
        let vals: Vec<f64> = self
            .rows
            .iter()
            .filter_map(|r| r.stiffness.clone().ok())
            .collect();
        vals.windows(2).all(|w| w[1] >= w[0] - rel_tol * w[0].abs())
    }

    /// Whether the regime is expected to stiffen monotonically with `L_c`.
    pub fn monotone_expected(&self) -> bool {
        matches!(self.bc, BcKind::FullDirichlet | BcKind::ConsistentCoupling)
    }
}

pub fn params_digest(p: &IsotropicModuli) -> String {
    let mut h = DefaultHasher::new();
    p.to_kv_string().hash(&mut h);
    format!("{:016x}", h.finish())
}

/// `count` log-spaced values from `lo` to `hi` inclusive.
pub fn log_space(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    match count {
        0 => vec![],
        1 => vec![lo],
        _ => {
            let (a, b) = (lo.ln(), hi.ln());
            (0..count)
                .map(|i| {
                    if i == 0 {
                        lo
                    } else if i == count - 1 {
                        hi
                    } else {
                        (a + (b - a) * i as f64 / (count - 1) as f64).exp()
                    }
                })
                .collect()
        }
    }
}

/// One solve per `L_c`, executed on at most `jobs` threads.
pub fn sweep_lc(spec: &ProblemSpec, lc_values: &[f64], jobs: usize) -> Result<StiffnessCurve> {
    if lc_values.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::Argument(
            "L_c values must be strictly increasing".into(),
        ));
    }
    let base = spec.with_lc(lc_values.first().copied().unwrap_or(spec.params.l_c));
    base.validate()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .map_err(|e| Error::Argument(e.to_string()))?;
    let rows = pool.install(|| {
        lc_values
            .par_iter()
            .map(|&l_c| CurveRow {
                l_c,
                stiffness: stiffness(&spec.with_lc(l_c)).map_err(|e| e.to_string()),
            })
            .collect()
    });
    Ok(StiffnessCurve {
        model: spec.model,
        test: spec.test,
        bc: spec.bc,
        params_digest: params_digest(&spec.params),
        rows,
    })
}

/// Natural boundary quantities at one end of the stripe.
#[derive(Debug, Clone, PartialEq)]
pub struct EndReport {
    pub x2: f64,
    /// Outward normal `ν = ±e2`.
    pub normal: Vec3,
    pub sigma_nu: Vec3,
    /// `𝔪·ν` (third-order moment models).
    pub m_nu: Option<Mat3>,
    /// `(𝔪·ν)·(ν⊗ν)`.
    pub m_nu_nn: Option<Mat3>,
    /// `(𝔪·ν)·ν`.
    pub m_nu_nu: Option<Vec3>,
    /// `m×ν` (second-order moment models).
    pub m_cross_nu: Option<Mat3>,
    /// Second-gradient traction `(σ − DIV 𝔪)·ν`.
    pub eta: Option<Vec3>,
    /// Norm of the quantity that must vanish for the chosen conditions, if any.
    pub natural_residual: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryReport {
    pub ends: [EndReport; 2],
    /// For fields depending on `x2` only, the tangential surface divergence in
    /// the generalized traction vanishes identically.
    pub tangential_divergence_vanishes: bool,
}

/// Natural-boundary quantities evaluated from one-sided derivatives of the
/// discrete solution.
pub fn boundary_residuals(sol: &Solution1D, spec: &ProblemSpec) -> Result<BoundaryReport> {
    let system = assemble(spec)?;
    let disc = &system.disc;
    let fields = &system.energy.fields;
    let m = disc.elements;
    let tensors = |e: usize, t: f64| {
        let z = disc.z_at(&sol.dofs, e, t);
        ansatz::ansatz_tensors(spec.model, fields, z.as_slice())
    };
    let third = |e: usize, t: f64| -> Result<Option<Tensor333>> {
        let (_, _, curv) = tensors(e, t);
        Ok(match moment(spec.model, &spec.params, &curv)? {
            Moment::Third(t) => Some(t),
            _ => None,
        })
    };
    let mut ends = Vec::new();
    for (e, t, sign, nb) in [
        (0usize, 0.0, -1.0, 1usize),
        (m - 1, 1.0, 1.0, m.saturating_sub(2)),
    ] {
        let nu = Vec3::new(0.0, sign, 0.0);
        let (du, pm, curv) = tensors(e, t);
        let sigma = stress_sigma(spec.model, &spec.params, &du, &pm)?;
        let mom = moment(spec.model, &spec.params, &curv)?;
        let mut rep = EndReport {
            x2: 0.5 * sign * spec.h,
            normal: nu,
            sigma_nu: sigma * nu,
            m_nu: None,
            m_nu_nn: None,
            m_nu_nu: None,
            m_cross_nu: None,
            eta: None,
            natural_residual: None,
        };
        match mom {
            Moment::Third(mt) => {
                let mnu = mt.dot_vec(&nu);
                rep.m_nu = Some(mnu);
                rep.m_nu_nn = Some(mnu * outer(&nu, &nu));
                rep.m_nu_nu = Some(mnu * nu);
                if spec.model == ModelKind::SecondGradient {
                    // DIV 𝔪 = ∂_2 𝔪_{ij2}; the moment is constant per element.
                    let inner = third(nb, 0.5)?.unwrap();
                    let here = third(e, 0.5)?.unwrap();
                    let d = (here - inner) * (sign / disc.dx);
                    let div = d.slice(1);
                    rep.eta = Some((sigma - div) * nu);
                }
            }
            Moment::Second(ms) => rep.m_cross_nu = Some(cross_mat_vec(&ms, &nu)),
            Moment::None => {}
        }
        rep.natural_residual = match (spec.model, spec.bc) {
            _ if system.elimination.is_some() => None,
            (ModelKind::ClassicalMicromorphic, BcKind::ConsistentCoupling) => {
                rep.m_nu_nn.map(|x| x.norm())
            }
            (ModelKind::ClassicalMicromorphic, BcKind::FreeMicro) => rep.m_nu.map(|x| x.norm()),
            (ModelKind::RelaxedMicromorphic | ModelKind::Cosserat, BcKind::FreeMicro) => {
                rep.m_cross_nu.map(|x| x.norm())
            }
            (ModelKind::SecondGradient, BcKind::MixedSG)
                if system.energy.uses_second_derivatives() =>
            {
                rep.m_nu_nu.map(|x| x.norm())
            }
            _ => None,
        };
        ends.push(rep);
    }
    let [a, b]: [EndReport; 2] = ends.try_into().expect("two ends");
    Ok(BoundaryReport {
        ends: [a, b],
        tangential_divergence_vanishes: true,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceRow {
    pub n: usize,
    pub stiffness: f64,
    /// Against the closed form, or against the next finer level for
    /// self-convergence (absent on the finest level).
    pub error: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceTable {
    pub reference: &'static str,
    pub rows: Vec<ConvergenceRow>,
    pub orders: Vec<f64>,
}

impl ConvergenceTable {
    pub fn mean_order(&self) -> Option<f64> {
        let finite: Vec<f64> = self
            .orders
            .iter()
            .copied()
            .filter(|p| p.is_finite())
            .collect();
        (!finite.is_empty()).then(|| finite.iter().sum::<f64>() / finite.len() as f64)
    }
}

pub fn convergence_study(spec: &ProblemSpec, n_list: &[usize]) -> Result<ConvergenceTable> {
    if n_list.len() < 3 || n_list.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Argument(
            "n_list must be strictly increasing with at least 3 entries".into(),
        ));
    }
    let analytic = spec.model == ModelKind::SecondGradient
        && spec.bc == BcKind::NormalClamp
        && spec.params.l_c > 0.0;
    let exact_lin = spec.model == ModelKind::LinearElastic;
    let mut rows = Vec::new();
    for &n in n_list {
        let s = spec.with_n(n);
        let sol = solve_spec(&s)?;
        let st = apparent_stiffness(&sol, &s);
        let error = if analytic {
            let a = SgAnalytic::for_spec(&s)?;
            let name = ansatz_fields(s.model, s.test)[0].name();
            let u = sol.profile(&name).unwrap();
            Some(
                sol.grid
                    .iter()
                    .zip(u)
                    .map(|(x, v)| (v - a.u(*x)).abs())
                    .fold(0.0, f64::max),
            )
        } else if exact_lin {
            Some((st - macro_stiffness(&s.params, s.test)?).abs())
        } else {
            None
        };
        rows.push(ConvergenceRow {
            n,
            stiffness: st,
            error,
        });
    }
    let m: Vec<f64> = n_list.iter().map(|&n| (n - 1) as f64).collect();
    let orders = if analytic || exact_lin {
        (0..rows.len() - 1)
            .map(|i| {
                (rows[i].error.unwrap() / rows[i + 1].error.unwrap()).ln() / (m[i + 1] / m[i]).ln()
            })
            .collect()
    } else {
        for i in 0..rows.len() - 1 {
            rows[i].error = Some((rows[i].stiffness - rows[i + 1].stiffness).abs());
        }
        (0..rows.len() - 2)
            .map(|i| {
                (rows[i].error.unwrap() / rows[i + 1].error.unwrap()).ln() / (m[i + 1] / m[i]).ln()
            })
            .collect()
    };
    let reference = if analytic {
        "analytic"
    } else if exact_lin {
        "exact"
    } else {
        "self"
    };
    Ok(ConvergenceTable {
        reference,
        rows,
        orders,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mm(test: TestKind, bc: BcKind) -> ProblemSpec {
        ProblemSpec::new(
            ModelKind::ClassicalMicromorphic,
            test,
            bc,
            IsotropicModuli::ones(),
        )
    }

    #[test]
    fn validation_messages() {
        let s = mm(TestKind::SimpleShear, BcKind::ConsistentCoupling).with_n(4);
        assert_eq!(s.validate(), Err(Error::Spec("n ≥ 8 required".into())));
        let s = ProblemSpec::new(
            ModelKind::SecondGradient,
            TestKind::SimpleShear,
            BcKind::ConsistentCoupling,
            IsotropicModuli::ones(),
        );
        assert!(matches!(s.validate(), Err(Error::Spec(_))));
        let s = mm(TestKind::SimpleShear, BcKind::FreeMicro);
        let s = ProblemSpec {
            params: s.params.with_mu_c(0.0),
            ..s
        };
        assert!(matches!(s.validate(), Err(Error::Spec(m)) if m.contains("mu_c")));
    }

    #[test]
    fn cc_lists_match_tangential_trace() {
        let nu = Vec3::y();
        for model in [
            ModelKind::ClassicalMicromorphic,
            ModelKind::RelaxedMicromorphic,
            ModelKind::Cosserat,
        ] {
            for test in [TestKind::SimpleShear, TestKind::UniaxialExtension] {
                let derived: Vec<Field> = ansatz_fields(model, test)
                    .into_iter()
                    .filter(|f| f.is_micro() && cross_mat_vec(&f.unit_micro(), &nu).norm() > 0.0)
                    .collect();
                assert_eq!(
                    derived,
                    consistent_coupling_components(model, test),
                    "{model} {test}"
                );
            }
        }
    }

    #[test]
    fn stiffness_matrix_is_symmetric_psd() {
        let s = mm(TestKind::UniaxialExtension, BcKind::ConsistentCoupling).with_n(12);
        let sys = assemble(&s).unwrap();
        let k = sys.k.to_dense();
        assert_eq!((&k - k.transpose()).amax(), 0.0);
        let eig = k.symmetric_eigen();
        assert!(eig.eigenvalues.min() > -1e-10 * eig.eigenvalues.amax());
    }

    #[test]
    fn linear_elastic_is_exact() {
        let s = ProblemSpec::new(
            ModelKind::LinearElastic,
            TestKind::SimpleShear,
            BcKind::FullDirichlet,
            IsotropicModuli::ones(),
        )
        .with_n(9);
        let sol = solve_spec(&s).unwrap();
        let st = apparent_stiffness(&sol, &s);
        assert!((st - macro_stiffness(&s.params, s.test).unwrap()).abs() < 1e-14);
        let u = sol.profile("u1").unwrap();
        for (x, v) in sol.grid.iter().zip(u) {
            assert!((v - x).abs() < 1e-14);
        }
    }

    #[test]
    fn zero_length_elimination_gives_homogeneous_state() {
        let s = mm(TestKind::SimpleShear, BcKind::ConsistentCoupling)
            .with_lc(0.0)
            .with_n(16);
        let sol = solve_spec(&s).unwrap();
        let u = sol.profile("u1").unwrap();
        for (x, v) in sol.grid.iter().zip(u) {
            assert!((v - x).abs() < 1e-13);
        }
        for name in ["P12", "P21"] {
            let p = sol.profile(name).unwrap();
            assert!(p.iter().all(|v| (v - p[0]).abs() < 1e-13), "{name}");
        }
        let st = apparent_stiffness(&sol, &s);
        assert!((st - macro_stiffness(&s.params, s.test).unwrap()).abs() < 1e-13);
    }

    #[test]
    fn essential_conditions_hold_exactly() {
        let s = mm(TestKind::SimpleShear, BcKind::FullDirichlet).with_n(20);
        let sol = solve_spec(&s).unwrap();
        let u = sol.profile("u1").unwrap();
        assert_eq!((u[0], u[19]), (-0.5, 0.5));
        for name in ["P12", "P21"] {
            let p = sol.profile(name).unwrap();
            assert_eq!((p[0], p[19]), (0.0, 0.0));
        }
        assert!(sol.energy_total >= 0.0);
        assert!(sol.residual < 1e-10);
    }

    #[test]
    fn quadrature_energy_matches_quadratic_form() {
        let s = mm(TestKind::UniaxialExtension, BcKind::ConsistentCoupling).with_n(30);
        let sys = assemble(&s).unwrap();
        let sol = solve(&sys).unwrap();
        let kx = sys.k.matvec(&sol.dofs);
        let half: f64 = 0.5 * kx.iter().zip(&sol.dofs).map(|(a, b)| a * b).sum::<f64>();
        assert!((half - sol.energy_total).abs() < 1e-12 * half);
    }

    #[test]
    fn eigenvalue_matches_dense() {
        let s = ProblemSpec {
            params: IsotropicModuli::ones().with_mu_c(0.0),
            ..mm(TestKind::SimpleShear, BcKind::ConsistentCoupling)
        }
        .with_n(25);
        let sys = assemble(&s).unwrap();
        let a = smallest_eigenvalue(&sys).unwrap();
        let b = smallest_eigenvalue_dense(&sys).unwrap();
        assert!((a - b).abs() < 1e-9 * b, "{a} vs {b}");
    }

    #[test]
    fn log_space_endpoints() {
        let v = log_space(1e-3, 1e3, 13);
        assert_eq!(v.len(), 13);
        assert_eq!(v[0], 1e-3);
        assert_eq!(v[12], 1e3);
        assert!((v[6] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn sweep_rejects_unsorted() {
        let s = mm(TestKind::SimpleShear, BcKind::ConsistentCoupling);
        assert!(sweep_lc(&s, &[1.0, 0.5], 1).is_err());
    }
}
