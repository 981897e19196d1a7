//! Integration oracles: the Euler kernels against closed-form solutions.

use rebound_core::dynamics::{
    adex_step, dpi_analytic_response, dpi_receive_spike, dpi_step, passive_neuron, NeuronState,
    Polarity, SynapseParams, SynapseState,
};

fn pulse_synapse() -> SynapseParams<f64> {
    SynapseParams {
        tau: 10.0,
        gain: 2.0,
        weight: 120.0,
        pulse_width: 30.0,
        polarity: Polarity::Excitatory,
    }
}

/// Max absolute error between the stepped response and the closed form,
/// over a single rectangular pulse plus a long decay tail.
fn dpi_max_error(params: &SynapseParams<f64>, dt: f64) -> f64 {
    let pulse_start = 5.0;
    let pulse_end = pulse_start + params.pulse_width;
    let horizon = pulse_end + 6.0 * params.tau;
    let steps = (horizon / dt).round() as usize;
    let mut state = SynapseState::idle();
    let mut max_err: f64 = 0.0;
    let mut delivered = false;
    for k in 0..steps {
        let t = k as f64 * dt;
        if !delivered && t + dt > pulse_start {
            // Deliver exactly at the pulse start so the stepped drive
            // window matches the analytic pulse.
            state = dpi_receive_spike(&state, params, pulse_start);
            delivered = true;
        }
        state = dpi_step(&state, params, t, dt).unwrap();
        let exact = dpi_analytic_response(params, pulse_start, pulse_end, t + dt);
        max_err = max_err.max((state.current - exact).abs());
    }
    max_err
}

#[test]
fn dpi_matches_analytic_within_half_percent() {
    let params = pulse_synapse();
    let err = dpi_max_error(&params, 0.01);
    let scale = params.saturation_current();
    assert!(
        err / scale < 0.005,
        "max error {err:.4} pA vs saturation {scale} pA"
    );
}

#[test]
fn dpi_error_shrinks_monotonically_with_dt() {
    let params = pulse_synapse();
    let errors: Vec<f64> = [0.04, 0.02, 0.01, 0.005]
        .iter()
        .map(|&dt| dpi_max_error(&params, dt))
        .collect();
    for pair in errors.windows(2) {
        assert!(
            pair[1] < pair[0],
            "error should shrink when dt halves: {errors:?}"
        );
    }
}

/// Stepped subthreshold relaxation against the closed-form exponential.
fn adex_decay_max_relative_error(dt: f64, horizon_taus: f64) -> f64 {
    let params = passive_neuron(100.0, 10.0, -70.0);
    let tau_m = params.membrane_tau();
    let offset = 10.0;
    let mut state = NeuronState::resting(&params);
    state.v = params.leak_reversal + offset;
    let steps = (horizon_taus * tau_m / dt).round() as usize;
    let mut max_err: f64 = 0.0;
    for k in 0..steps {
        let t = k as f64 * dt;
        let (next, spiked) = adex_step(&state, &params, 0.0, t, dt).unwrap();
        assert!(!spiked);
        state = next;
        let exact = params.leak_reversal + offset * (-(t + dt) / tau_m).exp();
        max_err = max_err.max((state.v - exact).abs() / offset);
    }
    max_err
}

#[test]
fn adex_subthreshold_decay_within_a_tenth_of_a_percent() {
    let err = adex_decay_max_relative_error(0.01, 5.0);
    assert!(err < 0.001, "max relative error {err}");
}

#[test]
fn richardson_half_step_extrapolation_improves_accuracy() {
    // Forward Euler has first-order error, so the half-step extrapolated
    // value 2 * V(dt/2) - V(dt) must land closer to the closed form than
    // either raw solution.
    let params = passive_neuron(100.0, 10.0, -70.0);
    let tau_m = params.membrane_tau();
    let offset = 10.0;
    let horizon = 2.0 * tau_m;
    let run = |dt: f64| -> f64 {
        let mut state = NeuronState::resting(&params);
        state.v = params.leak_reversal + offset;
        let steps = (horizon / dt).round() as usize;
        for k in 0..steps {
            let t = k as f64 * dt;
            state = adex_step(&state, &params, 0.0, t, dt).unwrap().0;
        }
        state.v
    };
    let coarse = run(0.02);
    let fine = run(0.01);
    let exact = params.leak_reversal + offset * (-horizon / tau_m).exp();
    let extrapolated = 2.0 * fine - coarse;
    assert!((extrapolated - exact).abs() < (fine - exact).abs());
    assert!((fine - exact).abs() < (coarse - exact).abs());
}

#[test]
fn reset_contract_after_spike() {
    let mut params = passive_neuron(100.0, 10.0, -70.0);
    params.exp_enabled = true;
    params.adapt_enabled = true;
    params.adapt_increment = 60.0;
    params.adapt_tau = 120.0;
    params.peak_potential = params.threshold + 5.0 * params.slope_factor;
    let mut state = NeuronState::resting(&params);
    let dt = 0.01;
    let mut spikes = 0;
    for k in 0..200_000 {
        let t = k as f64 * dt;
        let w_before = state.w;
        let (next, spiked) = adex_step(&state, &params, 600.0, t, dt).unwrap();
        if spiked {
            assert_eq!(next.v, params.reset_potential);
            let expected_w = w_before
                + dt * (params.adapt_conductance * (state.v - params.leak_reversal) - w_before)
                    / params.adapt_tau
                + params.adapt_increment;
            assert!((next.w - expected_w).abs() < 1e-9);
            spikes += 1;
        }
        state = next;
    }
    assert!(spikes > 5, "driven neuron should spike repeatedly");
}
