use micromorph::bvp1d::{bar_stiffness, macro_stiffness, stiffness};
use micromorph::constitutive::{
    check_invariance, dual_energy, energy_density, reuss_mu, reuss_mu_e, stress_sigma, Curvature,
};
use micromorph::modes::{apply_bc, zero_energy_kernel};
use micromorph::tensor_core::{
    anti, anti_power, axl, cross_mat_vec, curl_from_grad, levi_lift, nye_forward, nye_inverse,
    skew, split_boundary,
};
use micromorph::{
    BcKind, GammaSpec, IsotropicModuli, Mat3, ModeBc, ModelKind, ProblemSpec, Tensor333, TestKind,
    Vec3,
};
use proptest::prelude::*;

fn vec3() -> impl Strategy<Value = Vec3> {
    prop::array::uniform3(-2.0..2.0f64).prop_map(Vec3::from)
}

fn mat3() -> impl Strategy<Value = Mat3> {
    prop::array::uniform9(-2.0..2.0f64).prop_map(|a| Mat3::from_row_slice(&a))
}

fn ten3() -> impl Strategy<Value = Tensor333> {
    (mat3(), mat3(), mat3()).prop_map(|(a, b, c)| Tensor333::from_slices([a, b, c]))
}

fn unit() -> impl Strategy<Value = Vec3> {
    vec3()
        .prop_filter("nonzero", |v| v.norm() > 0.1)
        .prop_map(|v| v.normalize())
}

fn moduli() -> impl Strategy<Value = IsotropicModuli> {
    (
        prop::array::uniform9(0.2..5.0f64),
        -0.6..3.0f64,
        -0.6..3.0f64,
        prop::array::uniform3(0.2..5.0f64),
    )
        .prop_map(|(a, le, lm, al)| {
            IsotropicModuli {
                mu_e: a[0],
                lambda_e: le * a[0],
                mu_micro: a[1],
                lambda_micro: lm * a[1],
                mu_c: a[2],
                mu: a[3],
                l_c: a[4],
                a1: a[5],
                a2: a[6],
                a3: a[7],
                alpha1: al[0],
                alpha2: al[1],
                alpha3: al[2],
            }
            .validated()
            .unwrap()
        })
}

fn model() -> impl Strategy<Value = ModelKind> {
    prop_oneof![
        Just(ModelKind::LinearElastic),
        Just(ModelKind::Cosserat),
        Just(ModelKind::ClassicalMicromorphic),
        Just(ModelKind::RelaxedMicromorphic),
        Just(ModelKind::SecondGradient),
    ]
}

/// Curvature argument matching the model; the Cosserat micro field is skew.
fn args(model: ModelKind, du: Mat3, pm: Mat3, dp: Tensor333) -> (Mat3, Mat3, Curvature) {
    match model {
        ModelKind::LinearElastic => (du, Mat3::zeros(), Curvature::None),
        ModelKind::SecondGradient => (du, Mat3::zeros(), Curvature::Hessian(dp)),
        ModelKind::ClassicalMicromorphic => (du, pm, Curvature::Grad(dp)),
        ModelKind::RelaxedMicromorphic => (du, pm, Curvature::Curl(curl_from_grad(&dp))),
        ModelKind::Cosserat => (du, skew(&pm), Curvature::Curl(curl_from_grad(&dp))),
    }
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * (1.0 + a.abs().max(b.abs()))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn axl_inverts_anti(a in vec3()) {
        prop_assert!((axl(&anti(&a)).unwrap() - a).norm() <= 1e-14 * (1.0 + a.norm()));
    }

    #[test]
    fn anti_acts_as_cross_product(a in vec3(), b in vec3()) {
        prop_assert!((anti(&a) * b - a.cross(&b)).norm() <= 1e-14 * (1.0 + a.norm() * b.norm()));
    }

    #[test]
    fn anti_powers_follow_recursion(a in vec3(), n in 1u32..7) {
        let lhs = anti_power(&a, n + 2);
        let rhs = -anti_power(&a, n) * a.norm_squared();
        prop_assert!((lhs - rhs).norm() <= 1e-12 * (1.0 + rhs.norm()));
    }

    #[test]
    fn row_cross_is_linear_and_kills_normal_part(p in mat3(), q in mat3(), nu in unit(), s in -3.0..3.0f64) {
        let lin = cross_mat_vec(&(p + q * s), &nu) - cross_mat_vec(&p, &nu) - cross_mat_vec(&q, &nu) * s;
        prop_assert!(lin.norm() <= 1e-13 * (1.0 + p.norm() + q.norm()));
        let (tan, nor) = split_boundary(&p, &nu).unwrap();
        prop_assert!(cross_mat_vec(&nor, &nu).norm() <= 1e-14 * (1.0 + p.norm()));
        prop_assert!((nor * nu - p * nu).norm() <= 1e-14 * (1.0 + p.norm()));
        prop_assert!((tan * nu).norm() <= 1e-14 * (1.0 + p.norm()));
    }

    #[test]
    fn nye_round_trip(g in mat3()) {
        prop_assert!((nye_inverse(&nye_forward(&g)) - g).norm() <= 1e-14 * (1.0 + g.norm()));
    }

    #[test]
    fn levi_lift_is_adjoint_of_curl(m in mat3(), dp in ten3()) {
        let lhs: f64 = curl_from_grad(&dp).component_mul(&m).sum();
        let rhs = dp.inner(&levi_lift(&m));
        prop_assert!(close(lhs, rhs, 1e-13));
    }

    #[test]
    fn energy_is_nonnegative_and_matches_dual(
        m in model(), p in moduli(), du in mat3(), pm in mat3(), dp in ten3()
    ) {
        let (du, pm, curv) = args(m, du, pm, dp);
        let w = energy_density(m, &p, &du, &pm, &curv).unwrap();
        prop_assert!(w >= -1e-12);
        let d = dual_energy(m, &p, &du, &pm, &curv).unwrap();
        prop_assert!(close(w, d, 1e-12), "{} vs {}", w, d);
    }

    #[test]
    fn energy_is_two_homogeneous(
        m in model(), p in moduli(), du in mat3(), pm in mat3(), dp in ten3(), t in -3.0..3.0f64
    ) {
        let (du, pm, curv) = args(m, du, pm, dp);
        let scaled = match curv {
            Curvature::None => Curvature::None,
            Curvature::Grad(x) => Curvature::Grad(x * t),
            Curvature::Curl(x) => Curvature::Curl(x * t),
            Curvature::Hessian(x) => Curvature::Hessian(x * t),
        };
        let w = energy_density(m, &p, &du, &pm, &curv).unwrap();
        let wt = energy_density(m, &p, &(du * t), &(pm * t), &scaled).unwrap();
        prop_assert!(close(wt, t * t * w, 1e-12));
    }

    #[test]
    fn sigma_is_symmetric_without_cosserat_coupling(p in moduli(), du in mat3(), pm in mat3()) {
        let p = p.with_mu_c(0.0);
        let s = stress_sigma(ModelKind::ClassicalMicromorphic, &p, &du, &pm).unwrap();
        prop_assert!(skew(&s).norm() <= 1e-13 * (1.0 + s.norm()));
    }

    #[test]
    fn reuss_round_trip(mm in 0.01..100.0f64, me in 0.01..100.0f64) {
        let mac = reuss_mu(mm, me).unwrap();
        prop_assert!(mac < mm.min(me));
        prop_assert!(close(reuss_mu_e(mm, mac).unwrap(), me, 1e-12));
    }

    #[test]
    fn invariance_without_cosserat_coupling(
        p in moduli(), du in mat3(), pm in mat3(), dp in ten3(), a1 in vec3(), a2 in vec3(), b in vec3()
    ) {
        let p = p.with_mu_c(0.0);
        let w = energy_density(ModelKind::ClassicalMicromorphic, &p, &du, &pm, &Curvature::Grad(dp)).unwrap();
        let d = check_invariance(&p, &du, &pm, &dp, &anti(&a1), &anti(&a2), &b).unwrap();
        prop_assert!(d <= 1e-12 * (1.0 + w));
    }

    #[test]
    fn clamping_removes_six_dimensions(nu in unit(), x in vec3()) {
        let g = GammaSpec::new(x, nu).unwrap();
        for (model, mu) in [(ModelKind::LinearElastic, true), (ModelKind::ClassicalMicromorphic, true), (ModelKind::ClassicalMicromorphic, false)] {
            let k = zero_energy_kernel(model, mu);
            let clamped = apply_bc(&k, ModeBc::ClampU, &g);
            prop_assert_eq!(k.len() - clamped.len(), 6);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn consistent_coupling_is_bracketed(p in moduli(), lc in 0.05..5.0f64) {
        let base = ProblemSpec::new(ModelKind::ClassicalMicromorphic, TestKind::SimpleShear, BcKind::ConsistentCoupling, p)
            .with_lc(lc)
            .with_n(80);
        let cc = stiffness(&base).unwrap();
        let fd = stiffness(&ProblemSpec { bc: BcKind::FullDirichlet, ..base }).unwrap();
        let lo = macro_stiffness(&p, TestKind::SimpleShear).unwrap();
        let hi = bar_stiffness(&p, TestKind::SimpleShear);
        prop_assert!(fd >= cc * (1.0 - 1e-10));
        prop_assert!(cc >= lo * (1.0 - 1e-10));
        prop_assert!(cc <= hi * (1.0 + 1e-3));
    }

    #[test]
    fn homogeneous_extension_energy(p in moduli(), gamma in 0.1..2.0f64, h in 0.3..3.0f64) {
        let s = ProblemSpec { h, gamma, ..ProblemSpec::new(ModelKind::LinearElastic, TestKind::UniaxialExtension, BcKind::FullDirichlet, p) }
            .with_n(16);
        let sol = micromorph::bvp1d::solve_spec(&s).unwrap();
        let m = macro_stiffness(&p, TestKind::UniaxialExtension).unwrap();
        prop_assert!(close(sol.energy_total, 0.5 * m * gamma * gamma * h, 1e-10));
    }
}
