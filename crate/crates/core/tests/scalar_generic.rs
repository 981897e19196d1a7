//! The kernels are generic over the scalar type; exercise the `f32`
//! instantiation end to end.

use rebound_core::delay::measure_element;
use rebound_core::dynamics::{adex_step, passive_neuron, NeuronState};
use rebound_core::presets;
use rebound_core::stimgen::{pulse, PulseSpec};

#[test]
fn single_precision_pulse_generation() {
    let spec = PulseSpec::<f32> {
        pulse_dur: 20.0,
        n_spikes: 11,
        ipi: 20.0,
        noise_frac: 0.0,
        seed: 3,
    };
    let train = pulse(&spec).unwrap();
    assert_eq!(train.len(), 11);
    assert!((train.last().unwrap() - 20.0).abs() < 1e-5);
}

#[test]
fn single_precision_subthreshold_decay() {
    let params = passive_neuron::<f32>(100.0, 10.0, -70.0);
    let mut state = NeuronState::resting(&params);
    state.v += 10.0;
    let dt = 0.01f32;
    for k in 0..1000 {
        let t = k as f32 * dt;
        state = adex_step(&state, &params, 0.0, t, dt).unwrap().0;
    }
    let expected = params.leak_reversal + 10.0 * (-1.0f32).exp();
    assert!((state.v - expected).abs() < 0.05, "v {}", state.v);
}

#[test]
fn single_precision_delay_element_close_to_double() {
    let neuron = presets::delay_characterization_neuron::<f32>();
    let element = presets::delay_characterization_element::<f32>();
    let m32 = measure_element(&element, &neuron, 250.0, 0.01).unwrap();

    let neuron64 = presets::delay_characterization_neuron::<f64>();
    let element64 = presets::delay_characterization_element::<f64>();
    let m64 = measure_element(&element64, &neuron64, 250.0, 0.01).unwrap();

    assert!(m32.all_valid());
    assert!((f64::from(m32.tau_delay) - m64.tau_delay).abs() < 0.5);
    assert!((f64::from(m32.v_max) - m64.v_max).abs() < 1.0);
}
