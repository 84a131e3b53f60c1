use muscle_core::activation::integral_f_xi;
use muscle_core::materials::{
    active_deformation_gradient, giant_residual, uniaxial_invariants, BleParams, EhretParams,
};
use muscle_core::{ActivationInput, DeformationState, Mat3, Material, ModelKind, Vec3};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_state(rng: &mut ChaCha8Rng, spread: f64) -> DeformationState {
    loop {
        let mut f = Mat3::identity();
        for i in 0..3 {
            for j in 0..3 {
                f[(i, j)] += rng.random_range(-spread..spread);
            }
        }
        let m = Vec3::new(
            rng.random_range(-1.0..1.0),
            rng.random_range(-1.0..1.0),
            rng.random_range(-1.0..1.0),
        );
        if m.norm() < 0.2 || f.det() < 0.7 {
            continue;
        }
        return DeformationState::new(f, m.scale(1.0 / m.norm())).unwrap();
    }
}

/// Rotation by `angle` about the unit `axis` (Rodrigues).
fn rotation(axis: Vec3, angle: f64) -> Mat3 {
    let (s, c) = angle.sin_cos();
    let k = Mat3([
        [0.0, -axis[2], axis[1]],
        [axis[2], 0.0, -axis[0]],
        [-axis[1], axis[0], 0.0],
    ]);
    Mat3::identity() + k * s + (k * k) * (1.0 - c)
}

fn random_rotation(rng: &mut ChaCha8Rng) -> Mat3 {
    let a = Vec3::new(
        rng.random_range(-1.0..1.0),
        rng.random_range(-1.0..1.0),
        rng.random_range(-1.0..1.0),
    );
    rotation(a.scale(1.0 / a.norm()), rng.random_range(0.0..std::f64::consts::TAU))
}

fn rel(a: &Mat3, b: &Mat3) -> f64 {
    (*a - *b).max_abs() / a.max_abs().max(b.max_abs()).max(1e-300)
}

fn inputs() -> [ActivationInput; 3] {
    [
        ActivationInput::passive(),
        ActivationInput::tetanic(),
        ActivationInput::at_time(0.02),
    ]
}

#[test]
fn second_piola_kirchhoff_is_frame_indifferent() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for kind in ModelKind::ALL {
        let material = Material::published(kind);
        for _ in 0..100 {
            let s = random_state(&mut rng, 0.2);
            let q = random_rotation(&mut rng);
            let rotated = DeformationState::new(q * s.f, s.m).unwrap();
            for input in inputs() {
                let a = material.second_pk(&s, &input).unwrap();
                let b = material.second_pk(&rotated, &input).unwrap();
                assert!(rel(&a, &b) < 1e-9, "{kind}: {}", rel(&a, &b));
                // the Cauchy stress rotates with the current configuration
                let sa = material.cauchy(&s, &input).unwrap();
                let sb = material.cauchy(&rotated, &input).unwrap();
                let turned = q * sa * q.transpose();
                assert!(rel(&turned, &sb) < 1e-9, "{kind}: cauchy");
            }
        }
    }
}

#[test]
fn stress_is_symmetric_and_vanishes_in_the_reference_state() {
    let id = DeformationState::new(Mat3::identity(), Vec3::e(2)).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for kind in ModelKind::ALL {
        let material = Material::published(kind);
        let s0 = material.second_pk(&id, &ActivationInput::passive()).unwrap();
        assert!(s0.max_abs() < 1e-10, "{kind}: {s0:?}");
        for _ in 0..20 {
            let s = random_state(&mut rng, 0.2);
            let stress = material.second_pk(&s, &ActivationInput::tetanic()).unwrap();
            let skew = (stress - stress.transpose()).max_abs();
            assert!(skew <= 1e-14 * stress.max_abs().max(1.0), "{kind}: {skew:e}");
        }
    }
}

fn fd_stress(energy: impl Fn(&DeformationState) -> f64, s: &DeformationState) -> Mat3 {
    let h = 1e-5;
    let mut out = Mat3::zeros();
    for k in 0..3 {
        for l in k..3 {
            let eval = |step: f64| {
                let mut c = s.c;
                c[(k, l)] += step;
                if k != l {
                    c[(l, k)] += step;
                }
                energy(&DeformationState::from_right_cauchy_green(c, s.m).unwrap())
            };
            let d = (eval(-2.0 * h) - 8.0 * eval(-h) + 8.0 * eval(h) - eval(2.0 * h)) / (12.0 * h);
            let v = if k == l { 2.0 * d } else { d };
            out[(k, l)] = v;
            out[(l, k)] = v;
        }
    }
    out
}

#[test]
fn active_strain_stress_includes_the_level_derivative() {
    // without the stretch dependence of the level the GIANT and COMBI
    // stresses miss a fiber-aligned term, so they must differ from the
    // frozen-level stress and match the energy gradient
    let f = Mat3([[1.05, 0.02, 0.0], [0.0, 0.97, 0.03], [0.01, 0.0, 0.98]]);
    let s = DeformationState::new(f, Vec3::e(2)).unwrap();
    let t = ActivationInput::tetanic();
    for kind in [ModelKind::Giant, ModelKind::Combi] {
        let m = Material::published(kind);
        let full = m.second_pk(&s, &t).unwrap();
        let fd = fd_stress(|x| m.energy(x, &t).unwrap(), &s);
        assert!(rel(&full, &fd) < 1e-6, "{kind}: {}", rel(&full, &fd));
        let omega = m.activation(s.lambda, &t).unwrap().omega;
        let frozen = m.second_pk_at_level(&s, omega).unwrap();
        let extra = full - frozen;
        assert!(extra.max_abs() > 1e-3 * full.max_abs(), "{kind}: no level term");
        // the extra term is a multiple of M = m ⊗ m
        let along = extra[(2, 2)];
        let rest = extra - s.structural * along;
        assert!(rest.max_abs() < 1e-10 * along.abs(), "{kind}: not parallel to M");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn passive_stress_of_the_generalized_family_coincides(
        e in prop::array::uniform9(-0.2..0.2_f64),
        a in -1.0..1.0_f64, b in -1.0..1.0_f64,
    ) {
        let mut f = Mat3::identity();
        for (k, v) in e.iter().enumerate() {
            f[(k / 3, k % 3)] += v;
        }
        prop_assume!(f.det() > 0.6);
        let m = Vec3::new(a, b, 1.0);
        let s = DeformationState::new(f, m.scale(1.0 / m.norm())).unwrap();
        let p = ActivationInput::passive();
        let w = Material::published(ModelKind::Wkm).second_pk(&s, &p).unwrap();
        for kind in [ModelKind::Giant, ModelKind::Combi] {
            let o = Material::published(kind).second_pk(&s, &p).unwrap();
            prop_assert!(rel(&w, &o) < 1e-12);
        }
    }

    #[test]
    fn active_deformation_gradient_is_isochoric(omega in -0.5..0.95_f64, a in -1.0..1.0_f64) {
        let m = Vec3::new(a, 0.3, 1.0);
        let m = m.scale(1.0 / m.norm());
        let fa = active_deformation_gradient(omega, &m).unwrap();
        prop_assert!((fa.det() - 1.0).abs() < 1e-14 * (1.0 / (1.0 - omega)));
        // fiber contracts by 1 - omega
        prop_assert!((fa.mul_vec(&m).norm() - (1.0 - omega)).abs() < 1e-14);
    }

    #[test]
    fn combi_level_solves_the_energy_balance(l in 0.6..1.6_f64) {
        let p = EhretParams::published_tanh();
        let m = Material::Combi(p.clone());
        let t = ActivationInput::tetanic();
        let omega = m.activation(l, &t).unwrap().omega;
        // the level adds exactly the integrated active stress to the
        // uniaxial energy; solved here by bisection
        let u = uniaxial_invariants(l, p.omega0);
        let target = p.drive.p_opt() * integral_f_xi(l, p.lambda_opt, p.lambda_min);
        let g = |w: f64| {
            0.25 * p.gamma / p.alpha
                * ((p.alpha * (u.i + w * l * l - 1.0)).exp() - (p.alpha * (u.i - 1.0)).exp())
                - target
        };
        let (mut lo, mut hi) = (0.0, 5.0);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if g(mid) > 0.0 { hi = mid } else { lo = mid }
        }
        prop_assert!((omega - 0.5 * (lo + hi)).abs() < 1e-8);
    }

    #[test]
    fn combi_level_slope_matches_central_difference(l in 0.62..1.6_f64) {
        let m = Material::published(ModelKind::Combi);
        let t = ActivationInput::tetanic();
        let d = m.activation(l, &t).unwrap().d_omega.unwrap();
        let h = 1e-6;
        let fd = (m.activation(l + h, &t).unwrap().omega - m.activation(l - h, &t).unwrap().omega)
            / (2.0 * h);
        prop_assert!((d - fd).abs() < 1e-6 * d.abs().max(1e-2));
    }

    #[test]
    fn giant_level_is_the_physical_root(l in 0.6..1.5_f64) {
        let p = EhretParams::published_twitch();
        let m = Material::Giant(p.clone());
        let t = ActivationInput::tetanic();
        let omega = m.activation(l, &t).unwrap().omega;
        let drive = p.drive.p_opt();
        prop_assert!(omega >= 0.0 && omega >= 1.0 - l - 1e-12);
        let scale = giant_residual(&p, l, drive, 0.0).abs().max(1.0);
        prop_assert!(giant_residual(&p, l, drive, omega).abs() < 1e-10 * scale);
    }
}

#[test]
fn ble_without_matrix_and_fiber_shear_is_stress_free_in_compression() {
    // fiber compression switches off the passive fiber curve, and without
    // shear the invariant terms vanish
    let p = BleParams {
        mu: 0.0,
        ..BleParams::published()
    };
    let m = Material::Ble(p);
    let f = Mat3::diag(0.9, 1.0 / 0.9_f64.sqrt(), 1.0 / 0.9_f64.sqrt());
    let s = DeformationState::new(f, Vec3::e(0)).unwrap();
    let stress = m.second_pk(&s, &ActivationInput::passive()).unwrap();
    assert!(stress.max_abs() < 1e-10, "{stress:?}");
}

#[test]
fn ble_passive_fiber_stress_reference_value() {
    let fs = BleParams::published().fiber_stress(1.2, 0.0);
    assert!((fs.passive - 1.145 * 1.2 * 5.241_871_925_730_835).abs() < 1e-9);
    assert_eq!(fs.active, 0.0);
    let at_opt = BleParams::published().fiber_stress(1.2264, 1.0);
    assert!((at_opt.active - 1.145 * 69.5471).abs() < 1e-9);
}

#[test]
fn tangent_is_consistent_with_the_stress() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for kind in ModelKind::ALL {
        let material = Material::published(kind);
        let t = ActivationInput::tetanic();
        for _ in 0..5 {
            let s = random_state(&mut rng, 0.1);
            let tangent = material.tangent(&s, &t).unwrap();
            assert!(tangent.minor_asymmetry() < 1e-6 * tangent.max_abs());
            // directional derivative dS = ½ C : dC
            let mut dc = Mat3::zeros();
            for i in 0..3 {
                for j in i..3 {
                    let v = rng.random_range(-1.0..1.0);
                    dc[(i, j)] = v;
                    dc[(j, i)] = v;
                }
            }
            let h = 1e-6;
            let shifted = |sign: f64| {
                let c = s.c + dc * (sign * h);
                let st = DeformationState::from_right_cauchy_green(c, s.m).unwrap();
                material.second_pk(&st, &t).unwrap()
            };
            let fd = (shifted(1.0) - shifted(-1.0)) * (1.0 / (2.0 * h));
            let an = tangent.ddot(&dc) * 0.5;
            assert!(rel(&fd, &an) < 1e-4, "{kind}: {}", rel(&fd, &an));
        }
    }
}

#[test]
fn tangent_is_positive_definite_in_the_reference_state() {
    let id = DeformationState::new(Mat3::identity(), Vec3::e(2)).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(14);
    for kind in ModelKind::ALL {
        let material = Material::published(kind);
        let tangent = material.tangent(&id, &ActivationInput::passive()).unwrap();
        for _ in 0..50 {
            let mut e = Mat3::zeros();
            for i in 0..3 {
                for j in i..3 {
                    let v = rng.random_range(-1.0..1.0);
                    e[(i, j)] = v;
                    e[(j, i)] = v;
                }
            }
            assert!(e.ddot(&tangent.ddot(&e)) > 0.0, "{kind}");
        }
    }
}
