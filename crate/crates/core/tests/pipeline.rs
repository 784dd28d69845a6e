use zeeman_core::field::{build_mode_pair, field_on_orbit_closed_form, eval_total_field, ModeSpec};
use zeeman_core::harmony::{harmony_report, selection_rule_enumerate};
use zeeman_core::larmor::larmor_cancellation_test;
use zeeman_core::model::{validate_params, RawParams};
use zeeman_core::orbit::{
    default_time_step, integrate_orbit_ode, solve_orbit_exact, Dynamics, PlanarState,
};

fn params_from_json(text: &str) -> zeeman_core::model::ModelParams {
    validate_params(&RawParams::from_json_str(text, false).unwrap()).unwrap()
}

#[test]
fn selection_to_harmony() {
    for a in [3u64, 137] {
        let p = params_from_json(&format!(r#"{{"alpha_inv": {a}, "m_p": 1, "sigma": 0, "B": 0, "u0": 1}}"#));
        for entry in selection_rule_enumerate(a, 2, false).unwrap() {
            let spec = ModeSpec::new(entry.m_plus as u32, entry.m_minus as u32);
            let samples = if a == 3 { 4000 } else { 40_000 };
            let rep = harmony_report(&p, entry.n.to_f64(), spec, samples).unwrap();
            assert!(rep.phase_residual < 1e-9, "a = {a}, n = {}: {}", entry.n, rep.phase_residual);
            assert!(rep.debroglie_residuals.p_minus_k < 1e-12);
            assert!((rep.gamma_closed - rep.orbit.gamma).abs() < 1e-9);
            let json = serde_json::to_value(&rep).unwrap();
            assert!(json["orbit"]["r"].as_f64().unwrap() > 0.0);
        }
    }
}

#[test]
fn closed_form_tracks_direct_evaluation_without_field() {
    let p = params_from_json(r#"{"alpha_inv": 3, "m_p": 1, "sigma": 0, "B": 0, "u0": 1}"#);
    let o = solve_orbit_exact(1.0, &p, 1.0, Dynamics::Relativistic).unwrap();
    let pair = build_mode_pair(ModeSpec::new(4, 2), &o, &p).unwrap();
    for i in 0..40 {
        let (t, phi) = (0.37 * i as f64, 0.11 * i as f64);
        let direct = eval_total_field(t, pair.r_n, std::f64::consts::FRAC_PI_2, phi, &pair).unwrap();
        let closed = field_on_orbit_closed_form(t, phi, &pair, &o).unwrap();
        assert!((direct - closed).norm() < 1e-12, "{direct} vs {closed}");
    }
}

#[test]
fn integrated_orbit_stays_on_the_exact_circle() {
    for b in [0.0, 1e-5] {
        let p = params_from_json(&format!(r#"{{"alpha": 0.0072992700729927005, "m_p": 1, "sigma": 0, "B": {b}, "u0": 1}}"#));
        let o = solve_orbit_exact(1.0, &p, 1.0, Dynamics::NonRelativistic).unwrap();
        let traj = integrate_orbit_ode(PlanarState::on_circle(&o), &p, 1.0, default_time_step(&o), 20_000).unwrap();
        assert!(traj.radius_variation() < 1e-9, "B = {b}: {}", traj.radius_variation());
        assert!(traj.energy_drift() < 1e-10);
        let w = traj.unwrapped_angle_frequency();
        assert!((w / o.angular_velocity() - 1.0).abs() < 1e-8);
    }
}

#[test]
fn cancellation_report_round_trips_to_json() {
    let p = params_from_json(r#"{"alpha_inv": 3, "m_p": 1, "sigma": 0, "B": 1e-4, "u0": 1}"#);
    let o = solve_orbit_exact(1.0, &p, 1.0, Dynamics::Relativistic).unwrap();
    let pair = build_mode_pair(ModeSpec::new(4, 2), &o, &p).unwrap();
    let rep = larmor_cancellation_test(&pair, &o, &p, 8).unwrap();
    let json = serde_json::to_value(&rep).unwrap();
    assert_eq!(json["sample_points"].as_array().unwrap().len(), 8);
    assert_eq!(json["B"].as_f64(), Some(1e-4));
    assert!(rep.ratio.unwrap() < 1.0);
}
