use std::f64::consts::PI;

use num_complex::Complex;
use proptest::prelude::*;

use super::*;
use crate::physcore::{spectral_density_for_heating_rate, IonSpecies};

const W1: f64 = 2.0 * PI * 1.2e6;

fn close(a: &Mat2, b: &Mat2, tol: f64) -> bool {
    a.max_abs_diff(b) < tol
}

#[test]
fn rotation_basics() {
    assert!(close(&symplectic_rotation(0.7, W1, 0.0).unwrap(), &Mat2::identity(), 1e-15));
    assert!(close(&symplectic_rotation(1.0, W1, 2.0 * PI / W1).unwrap(), &Mat2::identity(), 1e-12));
    assert!(symplectic_rotation(0.0, W1, 1.0).is_err());
}

#[test]
fn quarter_period_squeezes_vacuum() {
    let lambda = 1.0 / 3.0;
    let s = evolve_covariance(&GaussianState::vacuum(), lambda, W1, PI / (2.0 * lambda * W1)).unwrap();
    let expect = Mat2::new(lambda * lambda / 2.0, 0.0, 0.0, 1.0 / (2.0 * lambda * lambda));
    assert!(close(&s.cov, &expect, 1e-12));
}

#[test]
fn protocol_single_cycle() {
    let p = SqueezeProtocol::new(W1, 2.0 * PI * 0.4e6, 1).unwrap();
    assert!((p.hold() - 625e-9).abs() < 1e-15);
    assert!((p.cycle_period() - (1.0 + 3.0) * PI / (2.0 * W1)).abs() < 1e-18);
    let (s, rec) = run_squeeze_protocol(&p, &GaussianState::vacuum()).unwrap();
    assert_eq!(rec.len(), 1);
    let m = squeezing_metric(&s);
    // λ = 1/3 exactly: enhancement 1/λ² = 9
    assert!((m.enhancement - 9.0).abs() < 1e-9);
    assert!((m.db - 10.0 * (1.0f64 / 9.0).log10()).abs() < 1e-9);
}

#[test]
fn protocol_with_unit_lambda_is_identity() {
    let p = SqueezeProtocol::new(W1, W1, 3).unwrap();
    let (s, _) = run_squeeze_protocol(&p, &GaussianState::vacuum()).unwrap();
    assert!(close(&s.cov, &GaussianState::vacuum().cov, 1e-12));
}

#[test]
fn two_cycles_compose_explicitly() {
    let l2: f64 = 0.1;
    let lambda = l2.sqrt();
    let w2 = lambda * W1;
    let p = SqueezeProtocol::new(W1, w2, 2).unwrap();
    let (s, rec) = run_squeeze_protocol(&p, &GaussianState::vacuum()).unwrap();
    // explicit product of the four factors: hold, free quarter period, hold
    let hold = Mat2::new(0.0, lambda, -1.0 / lambda, 0.0);
    let free = Mat2::new(0.0, 1.0, -1.0, 0.0);
    let m = hold.mul(&free).mul(&hold);
    let v = GaussianState::<f64>::vacuum().cov;
    let oracle = m.mul(&v).mul(&m.transpose());
    assert!(close(&s.cov, &oracle, 1e-10));
    assert!((squeezing_metric(&s).smallest_eigenvalue - l2 * l2 / 2.0).abs() < 1e-12);
    assert!((rec[0].metric.db + 10.0).abs() < 1e-9);
    assert!((rec[1].metric.db + 20.0).abs() < 1e-9);
}

#[test]
fn lambda_then_inverse_returns_vacuum() {
    let w2 = 2.0 * PI * 0.5e6;
    let (s, _) = run_squeeze_protocol(&SqueezeProtocol::new(W1, w2, 1).unwrap(), &GaussianState::vacuum()).unwrap();
    let s = evolve_covariance(&s, 1.0, W1, PI / (2.0 * W1)).unwrap();
    let (s, _) = run_squeeze_protocol(&SqueezeProtocol::new(W1, W1 * W1 / w2, 1).unwrap(), &s).unwrap();
    assert!(close(&s.cov, &GaussianState::vacuum().cov, 1e-10));
}

#[test]
fn metric_and_extent() {
    let m = squeezing_metric(&GaussianState::<f64>::vacuum());
    assert!(m.r.abs() < 1e-15 && m.db.abs() < 1e-14);
    assert!((max_extent(&GaussianState::<f64>::vacuum(), 11e-9) - 11e-9).abs() < 1e-22);
    let lambda = 0.1f64.sqrt();
    let s = evolve_covariance(&GaussianState::vacuum(), lambda, W1, PI / (2.0 * lambda * W1)).unwrap();
    assert!((max_extent(&s, 1.0) - 10f64.sqrt()).abs() < 1e-12);
    assert!((squeezing_metric(&s).db + 10.0).abs() < 1e-9);
    for r in [0.0f64, 0.3, 1.1, std::f64::consts::LN_10] {
        let m = squeezing_metric(&GaussianState::squeezed_vacuum(r, 0.4));
        assert!((m.r - r).abs() < 1e-12);
        assert!((r_from_db(m.db) - r).abs() < 1e-12);
    }
}

#[test]
fn invalid_states_are_rejected() {
    assert!(GaussianState::new([0.0; 2], Mat2::new(0.1, 0.0, 0.0, 0.1)).is_err());
    assert!(GaussianState::new([0.0; 2], Mat2::new(1.0, 0.2, 0.0, 1.0)).is_err());
    assert!(GaussianState::new([0.0; 2], Mat2::new(0.5, 0.0, 0.0, 0.5)).is_ok());
    assert!(SqueezeProtocol::new(W1, W1, 0).is_err());
}

#[test]
fn lifetime_values() {
    assert!((squeezed_lifetime(10.0f64, 0.0).unwrap() - 0.2).abs() < 1e-15);
    let tau: f64 = squeezed_lifetime_from_lambda(10.0, 0.1).unwrap();
    assert!((tau - 4e-3).abs() < 0.05 * 4e-3, "{tau}");
    assert!(squeezed_lifetime(0.0, 1.0).is_err());
    for r in [1.5, 2.0, 3.0] {
        let exact = (2.0 * r as f64).cosh() / 2.0;
        let approx = (2.0 * r as f64).exp() / 4.0;
        assert!((exact / approx - 1.0).abs() < 0.01);
    }
    assert_eq!(displacement_noise_overlap(10.0, 1.0, 0.0).unwrap(), 1.0);
    let t = squeezed_lifetime(10.0, 1.0).unwrap();
    assert!((displacement_noise_overlap(10.0, 1.0, t).unwrap() - (-1.0f64).exp()).abs() < 1e-15);
}

#[test]
fn overlap_formulas() {
    // vacuum: |⟨0|α⟩|² = e^{−|α|²}
    let a = Complex::new(0.3, -0.4);
    assert!((squeezed_displacement_overlap(a, 0.0, 0.0) - (-0.25f64).exp()).abs() < 1e-15);
    // x-squeezed state is most sensitive to real (position) kicks
    let r = 1.0;
    let re = squeezed_displacement_overlap(Complex::new(0.2, 0.0), r, 0.0);
    let im = squeezed_displacement_overlap(Complex::new(0.0, 0.2), r, 0.0);
    assert!((re - (-0.04 * (2.0 * r).exp()).exp()).abs() < 1e-14);
    assert!((im - (-0.04 * (-2.0 * r).exp()).exp()).abs() < 1e-14);
    // the printed exponent can exceed unity
    let p = printed_displacement_overlap(Complex::new(0.5, 0.0), 1.5, PI);
    assert!(p > 1.0);
}

#[test]
fn monte_carlo_reproduces_gaussian_ensemble_average() {
    let sp = IonSpecies::calcium40();
    let w = 2.0 * PI * 1e6;
    let gamma = 10.0;
    let s = spectral_density_for_heating_rate(&sp, w, gamma).unwrap();
    let r = 0.1f64.sqrt().ln().abs() * 2.0; // −20 dB
    let tau = squeezed_lifetime(gamma, r).unwrap();
    let cfg = MonteCarloConfig { realizations: 2000, steps_per_period: 4, seed: 7 };
    let times = [tau, tau / 2.0];
    let pts = monte_carlo_overlap(&sp, w, s, r, 0.0, &times, &cfg).unwrap();
    for p in &pts {
        assert!((p.mean_abs_alpha_sq / (gamma * p.t) - 1.0).abs() < 0.1);
        assert!(p.mean_alpha_sq.norm() < 0.1 * gamma * p.t);
        let expect = ensemble_average_overlap(gamma, r, p.t);
        assert!((p.mean_overlap - expect).abs() < 4.0 * p.std_error, "{} vs {expect} ± {}", p.mean_overlap, p.std_error);
    }
    assert!(pts[1].t < pts[0].t);
    let again = monte_carlo_overlap(&sp, w, s, r, 0.0, &times, &cfg).unwrap();
    assert_eq!(pts, again);
}

proptest! {
    #[test]
    fn determinant_is_invariant(lambda in 0.1f64..3.0, t in 0.0f64..5e-6, a in 0.6f64..3.0, d in 0.6f64..3.0, b in -0.3f64..0.3) {
        let st = GaussianState::new([0.0; 2], Mat2::new(a, b, b, d)).unwrap();
        let s = symplectic_rotation(lambda, W1, t).unwrap();
        prop_assert!((s.det() - 1.0).abs() < 1e-12);
        let out = evolve_covariance(&st, lambda, W1, t).unwrap();
        prop_assert!((out.det() - st.det()).abs() < 1e-12 * st.det().max(1.0) * (1.0 + lambda + 1.0 / lambda).powi(2));
        prop_assert!(out.det() >= 0.25 - 1e-12);
    }

    #[test]
    fn quarter_period_matrix_identity(lambda in 0.1f64..3.0, a in 0.6f64..3.0, d in 0.6f64..3.0, b in -0.3f64..0.3) {
        let st = GaussianState::new([0.0; 2], Mat2::new(a, b, b, d)).unwrap();
        let out = evolve_covariance(&st, lambda, W1, PI / (2.0 * lambda * W1)).unwrap();
        let expect = Mat2::new(lambda * lambda * d, -b, -b, a / (lambda * lambda));
        prop_assert!(close(&out.cov, &expect, 1e-10 * (1.0 + 1.0 / (lambda * lambda))));
    }

    #[test]
    fn rotation_preserves_metric(r in 0.0f64..2.0, phi in 0.0f64..std::f64::consts::TAU, t in 0.0f64..1e-6) {
        let st = GaussianState::squeezed_vacuum(r, phi);
        let out = evolve_covariance(&st, 1.0, W1, t).unwrap();
        prop_assert!((squeezing_metric(&out).r - squeezing_metric(&st).r).abs() < 1e-10);
    }

    #[test]
    fn db_round_trip(r in 0.0f64..3.0) {
        let m = squeezing_metric(&GaussianState::squeezed_vacuum(r, 0.0));
        prop_assert!((r_from_db(m.db) - r).abs() < 1e-12);
    }

    #[test]
    fn heisenberg_bound_through_cycles(l in 0.2f64..0.9, cycles in 1usize..5) {
        let p = SqueezeProtocol::new(W1, l * W1, cycles).unwrap();
        let (_, rec) = run_squeeze_protocol(&p, &GaussianState::vacuum()).unwrap();
        for c in rec {
            prop_assert!(c.state.det() >= 0.25 - 1e-10);
        }
    }
}
