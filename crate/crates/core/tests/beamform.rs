use modebeam::beamform::*;
use modebeam::field::FarField;
use modebeam::geometry::*;
use modebeam::metrics::{peak_direction, CutPlane, PatternCut};
use modebeam::modes::{unwrap_phase, ModalField};
use num_complex::Complex;
use proptest::prelude::*;
use std::f64::consts::PI;

fn c(re: f64, im: f64) -> Complex<f64> {
    Complex::new(re, im)
}

fn cut_power(field: &dyn FarField<f64>, plane: CutPlane, step: f64) -> Vec<f64> {
    plane
        .angles(step)
        .iter()
        .map(|&a| {
            let (t, p) = plane.direction(a);
            field.power(t, p)
        })
        .collect()
}

#[test]
fn single_port_is_its_mode() {
    let a1 = build_antenna1::<f64>();
    let s = synthesize(&a1, &ExcitationVector::single(PortId::F1), 5.7, &BendSpec::flat()).unwrap();
    let m = ModalField { mode: *a1.mode(PortId::F1).unwrap(), frequency: 5.7 };
    for &(t, p) in &[(0.1, 0.2), (1.0, 2.0), (2.0, 4.0)] {
        let (a, b) = (s.field(t, p), m.field(t, p));
        assert_eq!(a, b);
    }
}

#[test]
fn negated_weight_negates_field() {
    let a1 = build_antenna1::<f64>();
    let flat = BendSpec::flat();
    let a = synthesize(&a1, &ExcitationVector::single(PortId::F1), 5.7, &flat).unwrap();
    let b = synthesize(&a1, &ExcitationVector::new().with(PortId::F1, c(-1.0, 0.0)), 5.7, &flat).unwrap();
    let (ea, eb) = (a.field(0.7, 0.3), b.field(0.7, 0.3));
    assert!((ea.e_theta + eb.e_theta).norm() < 1e-15 && (ea.e_phi + eb.e_phi).norm() < 1e-15);
    assert!((ea.power() - eb.power()).abs() < 1e-15);
}

#[test]
fn ring_pair_in_quadrature_has_phase_slope_two() {
    let a2 = build_antenna2::<f64>();
    let exc = ExcitationVector::single(PortId::F2).with(PortId::F3, c(0.0, 1.0));
    let s = synthesize(&a2, &exc, 5.76, &BendSpec::flat()).unwrap();
    let phis: Vec<f64> = (0..120).map(|i| f64::from(i) * 3f64.to_radians()).collect();
    let raw: Vec<f64> = phis.iter().map(|&p| s.field(PI / 3.0, p).e_theta.arg()).collect();
    let ph = unwrap_phase(&raw);
    for (w, p) in ph.windows(2).zip(phis.windows(2)) {
        assert!(((w[1] - w[0]) / (p[1] - p[0]) - 2.0).abs() < 1e-9);
    }
}

#[test]
fn azimuth_ring_weights() {
    let a2 = build_antenna2::<f64>();
    let flat = BendSpec::flat();
    let s0 = steer_azimuth(&a2, 0.0, 5.76, &flat).unwrap();
    assert_eq!(s0.excitation.weight(PortId::F2), c(1.0, 0.0));
    assert_eq!(s0.excitation.weight(PortId::F3), c(0.0, 0.0));
    let s45 = steer_azimuth(&a2, 45.0, 5.76, &flat).unwrap();
    assert!(s45.excitation.weight(PortId::F2).norm() < 1e-15);
    assert!((s45.excitation.weight(PortId::F3) - c(1.0, 0.0)).norm() < 1e-15);
}

#[test]
fn azimuth_pattern_is_bidirectional() {
    let a2 = build_antenna2::<f64>();
    let theta = 60f64.to_radians();
    for phi0 in [0.0, 30.0, 45.0, 100.0] {
        let s = steer_azimuth(&a2, phi0, 5.76, &BendSpec::flat()).unwrap();
        let f = synthesize(&a2, &s.excitation, 5.76, &BendSpec::flat()).unwrap();
        let p0 = f.power(theta, f64::to_radians(phi0));
        let p1 = f.power(theta, f64::to_radians(phi0 + 180.0));
        assert!((p0 - p1).abs() <= 1e-9 * p0);
        let d = angle_diff(s.achieved_peak, phi0).abs().min(angle_diff(s.achieved_peak, phi0 + 180.0).abs());
        assert!(d < 2.0, "phi0 {phi0}: peak {}", s.achieved_peak);
    }
}

#[test]
fn elevation_broadside_and_twenty_degrees() {
    let a1 = build_antenna1::<f64>();
    let all = a1.port_ids();
    let flat = BendSpec::flat();
    let s = steer_elevation(&a1, CutPlane::Xz, 0.0, 5.7, &flat, &all).unwrap();
    assert!(s.achieved_peak.abs() <= 0.5);
    for plane in [CutPlane::Xz, CutPlane::Yz] {
        let s = steer_elevation(&a1, plane, 20.0, 5.7, &flat, &all).unwrap();
        assert!((s.achieved_peak - 20.0).abs() < 3.0, "{plane}: {}", s.achieved_peak);
        assert!(s.trace.within_tolerance);
        // add pi to the TM21 port
        let ring = *s.excitation.weights.keys().find(|p| p.index() >= 2).unwrap();
        let w = s.excitation.weight(ring);
        let mirrored = s.excitation.clone().with(ring, -w);
        let f = synthesize(&a1, &mirrored, 5.7, &flat).unwrap();
        let cut = PatternCut::sample(&f, plane, 0.5, false).unwrap();
        assert!((peak_direction(&cut).unwrap() + 20.0).abs() < 3.0);
    }
}

#[test]
fn restricted_ports_under_y_bend() {
    let a1 = build_antenna1::<f64>();
    let bend = BendSpec::new(BendAxis::Y, 10.0).unwrap();
    let allowed = [PortId::F1, PortId::F3, PortId::F4];
    let s = steer_elevation(&a1, CutPlane::Xz, 20.0, 5.45, &bend, &allowed).unwrap();
    assert!(s.excitation.weights.keys().all(|p| allowed.contains(p)));
}

#[test]
fn phase_sweep_through_broadside() {
    let a1 = build_antenna1::<f64>();
    let flat = BendSpec::flat();
    // start 30 deg before the broadside setting and step 1 deg
    let base = ExcitationVector::single(PortId::F2).with_polar(PortId::F4, 1.0, -(30f64.to_radians()));
    let sweep = phase_sweep(&a1, &base, PortId::F4, 5.7, &flat, 360, CutPlane::Xz).unwrap();
    let window = &sweep[5..56];
    assert!(window.windows(2).all(|w| w[1].1 < w[0].1));
    assert!(window.first().unwrap().1 > 0.0 && window.last().unwrap().1 < 0.0);

    let one = phase_sweep(&a1, &base, PortId::F4, 5.7, &flat, 1, CutPlane::Xz).unwrap();
    let f = synthesize(&a1, &base, 5.7, &flat).unwrap();
    let cut = PatternCut::sample(&f, CutPlane::Xz, 0.5, false).unwrap();
    assert_eq!(one.len(), 1);
    assert!((one[0].1 - peak_direction(&cut).unwrap()).abs() < 1e-9);

    let zero = base.clone().with(PortId::F3, c(0.0, 0.0));
    let flat_sweep = phase_sweep(&a1, &zero, PortId::F3, 5.7, &flat, 12, CutPlane::Xz).unwrap();
    assert!(flat_sweep.iter().all(|(_, p)| (p - flat_sweep[0].1).abs() < 1e-12));
}

fn arb_weight() -> impl Strategy<Value = Complex<f64>> {
    (0.1f64..2.0, -PI..PI).prop_map(|(a, p)| Complex::from_polar(a, p))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn linearity(w in proptest::collection::vec(arb_weight(), 4), alpha in arb_weight(), t in 0.0f64..PI, p in 0.0f64..std::f64::consts::TAU) {
        let a1 = build_antenna1::<f64>();
        let exc = PortId::ALL.iter().zip(&w).fold(ExcitationVector::new(), |e, (id, w)| e.with(*id, *w));
        let flat = BendSpec::flat();
        let base = synthesize(&a1, &exc, 5.7, &flat).unwrap().power(t, p);
        let scaled = synthesize(&a1, &exc.scaled(alpha), 5.7, &flat).unwrap().power(t, p);
        prop_assert!((scaled - alpha.norm_sqr() * base).abs() <= 1e-12 * scaled.max(1e-300));
    }

    #[test]
    fn global_phase_invariance(w in proptest::collection::vec(arb_weight(), 4), chi in -PI..PI, t in 0.0f64..PI, p in 0.0f64..std::f64::consts::TAU) {
        let a1 = build_antenna1::<f64>();
        let exc = PortId::ALL.iter().zip(&w).fold(ExcitationVector::new(), |e, (id, w)| e.with(*id, *w));
        let flat = BendSpec::flat();
        let base = synthesize(&a1, &exc, 5.7, &flat).unwrap().power(t, p);
        let turned = synthesize(&a1, &exc.scaled(Complex::from_polar(1.0, chi)), 5.7, &flat).unwrap().power(t, p);
        prop_assert!((turned - base).abs() <= 1e-12 * base.max(1e-300));
    }

    #[test]
    fn azimuth_rotation_equivariance(phi0 in 0.0f64..180.0, delta in -90.0f64..90.0, psi in -PI..PI, phi in 0.0f64..360.0) {
        let a2 = build_antenna2::<f64>();
        let flat = BendSpec::flat();
        let make = |target: f64| {
            let (wc, ws) = ring_weights(target);
            let exc = ExcitationVector::new()
                .with_polar(PortId::F1, 1.0, psi)
                .with(PortId::F2, c(wc, 0.0))
                .with(PortId::F3, c(ws, 0.0));
            synthesize(&a2, &exc, 5.76, &flat).unwrap()
        };
        let theta = PI / 3.0;
        let rotated = make(phi0 + delta).power(theta, (phi + delta).to_radians());
        let base = make(phi0).power(theta, phi.to_radians());
        prop_assert!((rotated - base).abs() <= 1e-9 * base.max(1e-3));
    }

    #[test]
    fn elevation_mirror(psi in -PI..PI, broadside_x in any::<bool>(), ring_cos in any::<bool>()) {
        let a1 = build_antenna1::<f64>();
        let flat = BendSpec::flat();
        let b = if broadside_x { PortId::F1 } else { PortId::F2 };
        let r = if ring_cos { PortId::F3 } else { PortId::F4 };
        for plane in [CutPlane::Xz, CutPlane::Yz] {
            let fwd = synthesize(&a1, &ExcitationVector::single(b).with_polar(r, 1.0, psi), 5.7, &flat).unwrap();
            let back = synthesize(&a1, &ExcitationVector::single(b).with_polar(r, 1.0, psi + PI), 5.7, &flat).unwrap();
            let pf = cut_power(&fwd, plane, 1.0);
            let pb = cut_power(&back, plane, 1.0);
            let n = pf.len();
            let max = pf.iter().cloned().fold(0.0, f64::max);
            // angles run from -180 in 1 deg steps, so index i mirrors n - i
            for i in 1..n {
                prop_assert!((pf[i] - pb[n - i]).abs() <= 1e-10 * max);
            }
        }
    }
}
