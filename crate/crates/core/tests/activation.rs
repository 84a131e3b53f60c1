use muscle_core::activation::{
    f_active, f_t_tanh, f_xi, integral_f_xi, twitch_kernel, ActiveDrive, PassiveCurve,
};
use muscle_core::materials::{BleParams, EhretParams};
use proptest::prelude::*;

const LOPT: f64 = 1.1806;
const LMIN: f64 = 0.5680;

/// Composite 20-point Gauss-Legendre rule on `[a, b]` split into `n` panels.
fn gauss_legendre(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
    // nodes and weights of the 10-point rule on [-1, 1], symmetric halves
    const X: [f64; 5] = [
        0.148_874_338_981_631_2,
        0.433_395_394_129_247_2,
        0.679_409_568_299_024_4,
        0.865_063_366_688_984_5,
        0.973_906_528_517_171_7,
    ];
    const W: [f64; 5] = [
        0.295_524_224_714_752_9,
        0.269_266_719_309_996_4,
        0.219_086_362_515_982,
        0.149_451_349_150_580_6,
        0.066_671_344_308_688_1,
    ];
    let h = (b - a) / n as f64;
    let mut sum = 0.0;
    for k in 0..n {
        let mid = a + (k as f64 + 0.5) * h;
        for (x, w) in X.iter().zip(W) {
            sum += w * (f(mid - 0.5 * h * x) + f(mid + 0.5 * h * x));
        }
    }
    0.5 * h * sum
}

fn ble_curve() -> PassiveCurve {
    BleParams::published().passive_curve()
}

#[test]
fn force_stretch_reference_values() {
    assert!((f_xi(LOPT, LOPT, LMIN) - 1.0).abs() < 1e-15);
    assert_eq!(f_xi(LMIN, LOPT, LMIN), 0.0);
    assert_eq!(f_xi(0.3, LOPT, LMIN), 0.0);
    assert!((f_xi(1.0, LOPT, LMIN) - 0.9067).abs() < 5e-4);
}

#[test]
fn fiber_passive_curve_reference_value() {
    // P1·(e^{0.2·P2} - 1)
    assert!((ble_curve().value(1.2) - 5.241_872).abs() < 1e-6);
    assert_eq!(ble_curve().value(0.9), 0.0);
}

#[test]
fn fiber_active_curve_branches_join() {
    let l = 1.2264;
    assert!((f_active(l, l) - 1.0).abs() < 1e-15);
    for knot in [0.6 * l, 1.4 * l] {
        let below = f_active(knot * (1.0 - 1e-15), l);
        let above = f_active(knot * (1.0 + 1e-15), l);
        assert!((below - above).abs() < 1e-12, "jump at {knot}");
    }
}

#[test]
fn integral_of_force_stretch_matches_quadrature() {
    for &l in &[0.5, 0.6, 0.8, 1.0, LOPT, 1.4, 1.8] {
        let exact = gauss_legendre(|s| f_xi(s, LOPT, LMIN), LMIN, l.max(LMIN), 64);
        let closed = integral_f_xi(l, LOPT, LMIN);
        assert!((closed - exact).abs() < 1e-10, "l = {l}: {closed} vs {exact}");
    }
}

#[test]
fn tanh_time_function() {
    assert_eq!(f_t_tanh(0.0, 34.4017, 0.0), 0.0);
    assert_eq!(f_t_tanh(-1.0, 34.4017, 0.0), 0.0);
    assert!((f_t_tanh(0.05, 34.4017, 0.0) - 1.720_085_f64.tanh()).abs() < 1e-15);
    assert!((1.720_085_f64.tanh() - 0.937_873).abs() < 1e-6);
}

fn twitch_drive() -> ActiveDrive {
    EhretParams::published_twitch().drive
}

#[test]
fn twitch_train_starts_at_zero_and_saturates() {
    let d = twitch_drive();
    assert_eq!(d.f_t(0.0), 0.0);
    assert_eq!(d.f_t(-0.1), 0.0);
    for k in 0..200 {
        let t = 0.3 + 0.001 * k as f64;
        assert!((d.f_t(t) - 1.0).abs() < 0.02, "f_t({t}) = {}", d.f_t(t));
    }
}

#[test]
fn single_twitch_peaks_at_contraction_time() {
    assert!((twitch_kernel(1.0) - 1.0).abs() < 1e-15);
    assert!(twitch_kernel(0.99) < 1.0 && twitch_kernel(1.01) < 1.0);
    assert_eq!(twitch_kernel(-0.5), 0.0);
}

#[test]
fn twitch_peak_stress_is_consistent_with_published_tanh_drive() {
    let p = twitch_drive().p_opt();
    assert!((p - 65.4).abs() < 0.5, "P_opt = {p}");
    assert!((p - 64.6809).abs() / 64.6809 < 0.02);
}

#[test]
fn tanh_rate_matches_twitch_train_slope() {
    // slope of the train averaged over one interstimulus interval, which
    // removes the twitch ripple; its maximum is compared with the maximum
    // tanh slope c
    let d = twitch_drive();
    let interval = 0.004;
    let mut steepest = 0.0_f64;
    for k in 0..20_000 {
        let t = 1e-5 * k as f64;
        steepest = steepest.max((d.f_t(t + interval) - d.f_t(t)) / interval);
    }
    let c = 34.4017;
    assert!((steepest - c).abs() / c < 0.1, "max slope {steepest}");
}

proptest! {
    #[test]
    fn fiber_active_curve_is_symmetric_about_optimum(x in 0.0..0.8_f64) {
        let l = 1.2264;
        prop_assert!((f_active(l * (1.0 + x), l) - f_active(l * (1.0 - x), l)).abs() < 1e-12);
    }

    #[test]
    fn integral_is_additive(a in 0.4..1.9_f64, b in 0.4..1.9_f64) {
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        // f_xi has a kink at lambda_min, so the rule starts there
        let part = gauss_legendre(|s| f_xi(s, LOPT, LMIN), lo.max(LMIN), hi.max(LMIN), 32);
        let diff = integral_f_xi(hi, LOPT, LMIN) - integral_f_xi(lo, LOPT, LMIN);
        prop_assert!((diff - part).abs() < 1e-10);
    }

    #[test]
    fn force_stretch_is_bounded(l in 0.1..3.0_f64) {
        let v = f_xi(l, LOPT, LMIN);
        prop_assert!((0.0..=1.0 + 1e-15).contains(&v));
    }

    #[test]
    fn fiber_passive_integral_has_the_curve_as_derivative(l in 1.001..2.0_f64) {
        let c = ble_curve();
        let h = 1e-6;
        let fd = (c.integral(l + h) - c.integral(l - h)) / (2.0 * h);
        prop_assert!((fd - c.value(l)).abs() < 1e-6 * c.value(l).max(1.0));
    }
}
