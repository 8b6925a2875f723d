//! Seeded identity and counterexample suite over the tensor and field layers.

use micromorph::field_calc::{
    anti_field, check_curl_bound, check_curl_of_grad, check_curlcurl_identity, check_moment_trace,
    curl_mat, grad, Domain, PolyField, Shape,
};
use micromorph::tensor_core::{
    self, anti, anti_power, axl, cross_mat_vec, curl_from_grad, levi_lift, nye_inverse, skew,
    split_boundary, sym,
};
use micromorph::{Mat3, Tensor333, Vec3};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

/// Operations the suite exercises through an indirection, so that a test
/// harness can substitute a faulty implementation.
#[derive(Clone, Copy)]
pub struct Ops {
    pub nye_forward: fn(&Mat3) -> Mat3,
}

impl Default for Ops {
    fn default() -> Self {
        Self {
            nye_forward: tensor_core::nye_forward,
        }
    }
}

pub const TENSOR_INSTANCES: usize = 1000;
pub const FIELD_INSTANCES: usize = 100;
pub const TENSOR_TOL: f64 = 1e-12;
pub const FIELD_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Serialize)]
pub struct Family {
    pub name: &'static str,
    pub instances: usize,
    pub worst: f64,
    pub tolerance: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct SuiteReport {
    pub seed: u64,
    pub pass: bool,
    pub families: Vec<Family>,
}

impl SuiteReport {
    pub fn first_failure(&self) -> Option<&Family> {
        self.families.iter().find(|f| !f.pass)
    }

    pub fn to_text(&self) -> String {
        let mut s = format!("identity suite, seed {}\n", self.seed);
        for f in &self.families {
            s += &format!(
                "{:<44} {:>5}  worst {:.3e}  tol {:.0e}  {}\n",
                f.name,
                f.instances,
                f.worst,
                f.tolerance,
                if f.pass { "PASS" } else { "FAIL" }
            );
        }
        let passed = self.families.iter().filter(|f| f.pass).count();
        s += &format!("{passed}/{} families passed\n", self.families.len());
        s
    }
}

fn vec3(rng: &mut ChaCha8Rng) -> Vec3 {
    Vec3::from_fn(|_, _| rng.random_range(-1.0..1.0))
}

fn mat3(rng: &mut ChaCha8Rng) -> Mat3 {
    Mat3::from_fn(|_, _| rng.random_range(-1.0..1.0))
}

fn unit(rng: &mut ChaCha8Rng) -> Vec3 {
    loop {
        let v = vec3(rng);
        if v.norm() > 0.1 {
            return v.normalize();
        }
    }
}

fn rel(err: f64, scale: f64) -> f64 {
    if scale > 0.0 {
        err / scale
    } else {
        err
    }
}

struct Runner {
    rng: ChaCha8Rng,
    families: Vec<Family>,
}

impl Runner {
    /// Runs `count` instances of `f`, each returning a relative residual.
    /// Evaluation errors count as infinite residuals.
    fn family(
        &mut self,
        name: &'static str,
        count: usize,
        tolerance: f64,
        mut f: impl FnMut(&mut ChaCha8Rng) -> micromorph::Result<f64>,
    ) {
        let mut worst = 0.0f64;
        for _ in 0..count {
            let r = f(&mut self.rng).unwrap_or(f64::INFINITY);
            worst = if r.is_nan() {
                f64::INFINITY
            } else {
                worst.max(r)
            };
        }
        self.families.push(Family {
            name,
            instances: count,
            worst,
            tolerance,
            pass: worst <= tolerance,
        });
    }
}

pub fn run_suite(seed: u64, ops: Ops) -> SuiteReport {
    let nye = ops.nye_forward;
    let mut r = Runner {
        rng: ChaCha8Rng::seed_from_u64(seed),
        families: Vec::new(),
    };
    let n = TENSOR_INSTANCES;

    r.family("anti/axl round trip", n, TENSOR_TOL, |g| {
        let a = vec3(g);
        Ok(rel((axl(&anti(&a))? - a).norm(), a.norm()))
    });
    r.family("anti(a)·b = a × b", n, TENSOR_TOL, |g| {
        let (a, b) = (vec3(g), vec3(g));
        Ok(rel(
            (anti(&a) * b - a.cross(&b)).norm(),
            a.norm() * b.norm(),
        ))
    });
    r.family("anti powers vs repeated products", n, TENSOR_TOL, |g| {
        let a = vec3(g);
        let k = g.random_range(1..9u32);
        let mut m = anti(&a);
        for _ in 1..k {
            m *= anti(&a);
        }
        Ok(rel((anti_power(&a, k) - m).norm(), m.norm()))
    });
    r.family(
        "row-wise cross product P×ν = P·anti(ν)",
        n,
        TENSOR_TOL,
        |g| {
            let (p, nu) = (mat3(g), unit(g));
            let c = cross_mat_vec(&p, &nu);
            let rows = (0..3)
                .map(|i| (c.row(i).transpose() - p.row(i).transpose().cross(&nu)).norm())
                .fold(0.0, f64::max);
            Ok(rel(rows + (c - p * anti(&nu)).norm(), p.norm()))
        },
    );
    r.family(
        "tangential/normal split reconstruction",
        n,
        TENSOR_TOL,
        |g| {
            let (p, nu) = (mat3(g), unit(g));
            let (t, m) = split_boundary(&p, &nu)?;
            let err = (t + m - p).norm()
                + (cross_mat_vec(&t, &nu) - cross_mat_vec(&p, &nu)).norm()
                + (t * nu).norm();
            Ok(rel(err, p.norm()))
        },
    );
    r.family("[ν×(u×ν)]×ν = u×ν", n, TENSOR_TOL, |g| {
        let (u, nu) = (vec3(g), unit(g));
        let lhs = nu.cross(&u.cross(&nu)).cross(&nu);
        Ok(rel((lhs - u.cross(&nu)).norm(), u.norm()))
    });
    r.family("Nye round trip", n, TENSOR_TOL, |g| {
        let m = mat3(g);
        let err = (nye_inverse(&nye(&m)) - m).norm() + (nye(&nye_inverse(&m)) - m).norm();
        Ok(rel(err, m.norm()))
    });
    r.family("Curl/levi_lift adjointness", n, TENSOR_TOL, |g| {
        let m = mat3(g);
        let dp = Tensor333::from_fn(|_, _, _| g.random_range(-1.0..1.0));
        let lhs: f64 = curl_from_grad(&dp).component_mul(&m).sum();
        Ok(rel(
            (lhs - dp.inner(&levi_lift(&m))).abs(),
            m.norm() * dp.norm(),
        ))
    });
    r.family("sym/skew split orthogonality", n, TENSOR_TOL, |g| {
        let p = mat3(g);
        let err = (sym(&p) + skew(&p) - p).norm() + sym(&p).component_mul(&skew(&p)).sum().abs();
        Ok(rel(err, p.norm_squared()))
    });
    r.family("moment trace 𝔪·ν = m×ν", n, TENSOR_TOL, |g| {
        let (m, nu) = (mat3(g), unit(g));
        let (l, rr) = check_moment_trace(&m, &nu)?;
        Ok(rel((l - rr).norm(), m.norm()))
    });
    r.family(
        "counterexample: P×ν = 0 but skew P×ν ≠ 0",
        n,
        TENSOR_TOL,
        |g| {
            // P = c ⊗ e1 has vanishing tangential trace while its skew part does not.
            let c = vec3(g);
            let e1 = Vec3::x();
            let p = c * e1.transpose();
            let want = Mat3::new(0.0, -c[2], c[1], 0.0, 0.0, 0.0, 0.0, 0.0, 0.0) * 0.5;
            let s = cross_mat_vec(&skew(&p), &e1);
            let err = cross_mat_vec(&p, &e1).norm()
                + (s - want).norm()
                + (cross_mat_vec(&sym(&p), &e1) + s).norm();
            Ok(rel(err, c.norm()))
        },
    );

    let omega = Domain::unit_cube();
    let mut k = 0u64;
    let mut next = || {
        k += 1;
        k
    };
    let deg = |g: &mut ChaCha8Rng| g.random_range(1..=3usize);
    r.family(
        "Nye formula Curl(anti a) = tr(Da)·1 − (Da)ᵀ",
        FIELD_INSTANCES,
        FIELD_TOL,
        |g| {
            let d = deg(g);
            let a = PolyField::random(Shape::Vector, d, g);
            let c = curl_mat(&anti_field(&a)?)?;
            let da = grad(&a)?;
            let pts = omega.random_points(5, g);
            let mut err = 0.0f64;
            let mut scale = a.max_abs_coeff();
            for x in &pts {
                let want = nye(&da.eval_mat(x)?);
                err = err.max((c.eval_mat(x)? - want).norm());
                scale = scale.max(want.norm());
            }
            Ok(rel(err, scale))
        },
    );
    r.family("Curl D u = 0", FIELD_INSTANCES, FIELD_TOL, |g| {
        let d = deg(g);
        let u = PolyField::random(Shape::Vector, d, g);
        Ok(check_curl_of_grad(&u, next())?.relative())
    });
    r.family(
        "DIV(levi_lift Curl P) = −Curl Curl P",
        FIELD_INSTANCES,
        FIELD_TOL,
        |g| {
            let d = deg(g);
            let p = PolyField::random(Shape::Matrix, d, g);
            Ok(check_curlcurl_identity(&p, next())?.relative())
        },
    );
    r.family(
        "Curl bound ∫|Curl P|² ≤ 2∫|DP|²",
        FIELD_INSTANCES,
        FIELD_TOL,
        |g| {
            let d = deg(g);
            let p = PolyField::random(Shape::Matrix, d, g);
            let b = check_curl_bound(&p, &omega)?;
            Ok(rel((b.lhs - b.rhs).max(0.0), b.rhs))
        },
    );

    let pass = r.families.iter().all(|f| f.pass);
    SuiteReport {
        seed,
        pass,
        families: r.families,
    }
}
