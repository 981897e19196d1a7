//! Adaptive-exponential neuron and first-order dynamic-synapse kernels.
//!
//! Both models advance with explicit forward-Euler steps at a fixed `dt`.
//! Correctness is certified against closed-form solutions (see
//! [`dpi_analytic_response`] and the oracle tests) rather than by a
//! higher-order integrator; determinism and speed win at the step sizes
//! used here (0.01 ms against time constants of 3 ms and up).
//!
//! Units: time in ms, voltage in mV, current in pA, conductance in nS,
//! capacitance in pF. With these units `pF * mV / ms = pA`, so the membrane
//! equation needs no conversion factors.

use serde::{Deserialize, Serialize};

use crate::error::{Result, SimError};
use crate::scalar::{lit, Scalar};

/// Sign of a synapse's contribution to the summed postsynaptic current.
///
/// The synapse state itself always holds a non-negative current; polarity
/// is applied at summation (subtractive inhibition).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Polarity {
    Excitatory,
    Inhibitory,
}

/// Parameters of one adaptive-exponential neuron.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NeuronParams<S: Scalar> {
    /// Membrane capacitance (pF).
    pub capacitance: S,
    /// Leak conductance (nS).
    pub leak_conductance: S,
    /// Leak reversal potential (mV).
    pub leak_reversal: S,
    /// Spike threshold of the exponential term (mV).
    pub threshold: S,
    /// Slope factor of the exponential term (mV).
    pub slope_factor: S,
    /// Adaptation time constant (ms).
    pub adapt_tau: S,
    /// Subthreshold adaptation conductance (nS).
    pub adapt_conductance: S,
    /// Spike-triggered adaptation increment (pA).
    pub adapt_increment: S,
    /// Reset potential after a spike (mV).
    pub reset_potential: S,
    /// Numerical spike-detection ceiling (mV).
    pub peak_potential: S,
    /// Refractory period during which the membrane is pinned at reset (ms).
    pub refractory: S,
    /// Constant injection current (pA).
    pub injection_current: S,
    /// Hard floor emulating the hardware rail (mV).
    pub floor_potential: S,
    /// Include the exponential spike-generation term.
    pub exp_enabled: bool,
    /// Integrate the adaptation variable.
    pub adapt_enabled: bool,
}

impl<S: Scalar> NeuronParams<S> {
    /// Check the structural invariants of the parameter set.
    pub fn validate(&self) -> Result<()> {
        let fail = |msg: &str| Err(SimError::InvalidConfig(msg.to_string()));
        if !(self.capacitance > S::zero()) {
            return fail("capacitance must be > 0");
        }
        if !(self.leak_conductance > S::zero()) {
            return fail("leak conductance must be > 0");
        }
        if self.exp_enabled && !(self.slope_factor > S::zero()) {
            return fail("slope factor must be > 0 when the exponential term is enabled");
        }
        if self.adapt_enabled && !(self.adapt_tau > S::zero()) {
            return fail("adaptation tau must be > 0 when adaptation is enabled");
        }
        if !(self.floor_potential < self.leak_reversal
            && self.leak_reversal < self.threshold
            && self.threshold < self.peak_potential)
        {
            return fail("potentials must satisfy floor < leak reversal < threshold < peak");
        }
        if self.refractory < S::zero() {
            return fail("refractory period must be >= 0");
        }
        Ok(())
    }

    /// Membrane time constant `C / g_L` (ms).
    pub fn membrane_tau(&self) -> S {
        self.capacitance / self.leak_conductance
    }

    /// Quiescent membrane potential under the constant injection current,
    /// ignoring the exponential term. Valid while rest sits well below
    /// threshold, which holds for every preset shipped here.
    pub fn resting_potential(&self) -> S {
        let g_eff = if self.adapt_enabled {
            self.leak_conductance + self.adapt_conductance
        } else {
            self.leak_conductance
        };
        self.leak_reversal + self.injection_current / g_eff
    }
}

/// Integrable state of one neuron.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NeuronState<S: Scalar> {
    /// Membrane potential (mV).
    pub v: S,
    /// Adaptation current (pA).
    pub w: S,
    /// Absolute time until which the membrane stays pinned at reset (ms).
    pub refractory_until: S,
    /// Time of the most recent spike, if any (ms).
    pub last_spike: Option<S>,
}

impl<S: Scalar> NeuronState<S> {
    /// State at quiescence: membrane at rest, adaptation at its fixed point.
    pub fn resting(params: &NeuronParams<S>) -> Self {
        let v = params.resting_potential();
        let w = if params.adapt_enabled {
            params.adapt_conductance * (v - params.leak_reversal)
        } else {
            S::zero()
        };
        Self {
            v,
            w,
            refractory_until: -S::infinity(),
            last_spike: None,
        }
    }
}

/// Parameters of one dynamic synapse (first-order low-pass filter).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SynapseParams<S: Scalar> {
    /// Filter time constant (ms).
    pub tau: S,
    /// Dimensionless filter gain.
    pub gain: S,
    /// Amplitude of the rectangular input pulse per presynaptic spike (pA).
    pub weight: S,
    /// Duration each presynaptic spike drives the filter input (ms).
    pub pulse_width: S,
    pub polarity: Polarity,
}

impl<S: Scalar> SynapseParams<S> {
    pub fn validate(&self) -> Result<()> {
        let fail = |msg: &str| Err(SimError::InvalidConfig(msg.to_string()));
        if !(self.tau > S::zero()) {
            return fail("synapse tau must be > 0");
        }
        if !(self.gain > S::zero()) {
            return fail("synapse gain must be > 0");
        }
        if self.weight < S::zero() {
            return fail("synapse weight must be >= 0");
        }
        if !(self.pulse_width > S::zero()) {
            return fail("pulse width must be > 0");
        }
        Ok(())
    }

    /// Steady-state output current under sustained drive (pA).
    pub fn saturation_current(&self) -> S {
        self.gain * self.weight
    }
}

/// State of one synapse instance.
///
/// The output current is non-negative; polarity is applied when summing.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SynapseState<S: Scalar> {
    /// Filter output current (pA).
    pub current: S,
    /// Absolute time until which the input pulse is active (ms).
    pub drive_until: S,
}

impl<S: Scalar> SynapseState<S> {
    pub fn idle() -> Self {
        Self {
            current: S::zero(),
            drive_until: -S::infinity(),
        }
    }
}

impl<S: Scalar> Default for SynapseState<S> {
    fn default() -> Self {
        Self::idle()
    }
}

/// One explicit Euler step of the neuron equations over `[t, t + dt)`.
///
/// The synaptic input `i_syn` is held constant over the step; the constant
/// injection current from the parameters is added internally. Returns the
/// successor state and whether a spike was emitted during the step. On a
/// spike the membrane resets, the adaptation current jumps by the
/// spike-triggered increment, and the membrane stays pinned at reset until
/// `t + refractory`. After every update the membrane is clamped to
/// `[floor, peak]`.
pub fn adex_step<S: Scalar>(
    state: &NeuronState<S>,
    params: &NeuronParams<S>,
    i_syn: S,
    t: S,
    dt: S,
) -> Result<(NeuronState<S>, bool)> {
    debug_assert!(dt > S::zero());
    let total_input = i_syn + params.injection_current;
    if !(state.v.is_finite() && state.w.is_finite() && total_input.is_finite()) {
        return Err(SimError::NumericalDivergence {
            unit: "neuron".to_string(),
            time_ms: t.to_f64_lossy(),
        });
    }

    let mut next = *state;
    let in_refractory = t < state.refractory_until;

    let v_for_dw = if in_refractory {
        params.reset_potential
    } else {
        state.v
    };
    if params.adapt_enabled {
        let dw = (params.adapt_conductance * (v_for_dw - params.leak_reversal) - state.w)
            / params.adapt_tau;
        next.w = state.w + dt * dw;
    }

    if in_refractory {
        next.v = params.reset_potential;
        return Ok((next, false));
    }

    let leak = -params.leak_conductance * (state.v - params.leak_reversal);
    let exp_term = if params.exp_enabled {
        params.leak_conductance
            * params.slope_factor
            * ((state.v - params.threshold) / params.slope_factor).exp()
    } else {
        S::zero()
    };
    let dv = (leak + exp_term - state.w + total_input) / params.capacitance;
    let v_new = state.v + dt * dv;

    if !v_new.is_finite() {
        return Err(SimError::NumericalDivergence {
            unit: "neuron".to_string(),
            time_ms: t.to_f64_lossy(),
        });
    }

    if v_new >= params.peak_potential {
        next.v = params.reset_potential;
        next.w += params.adapt_increment;
        next.refractory_until = t + params.refractory;
        next.last_spike = Some(t);
        return Ok((next, true));
    }

    next.v = v_new.max(params.floor_potential).min(params.peak_potential);
    Ok((next, false))
}

/// One explicit Euler step of the synapse filter over `[t, t + dt)`.
///
/// The input is `weight` while the drive window is open at the start of the
/// step and zero otherwise.
pub fn dpi_step<S: Scalar>(
    state: &SynapseState<S>,
    params: &SynapseParams<S>,
    t: S,
    dt: S,
) -> Result<SynapseState<S>> {
    debug_assert!(dt > S::zero());
    if !state.current.is_finite() {
        return Err(SimError::NumericalDivergence {
            unit: "synapse".to_string(),
            time_ms: t.to_f64_lossy(),
        });
    }
    let input = if t < state.drive_until {
        params.weight
    } else {
        S::zero()
    };
    let di = (params.gain * input - state.current) / params.tau;
    let current = (state.current + dt * di).max(S::zero());
    Ok(SynapseState {
        current,
        drive_until: state.drive_until,
    })
}

/// Register a presynaptic spike: extend the input drive window to
/// `t + pulse_width`. Overlapping pulses extend the window; they do not
/// stack amplitude.
pub fn dpi_receive_spike<S: Scalar>(
    state: &SynapseState<S>,
    params: &SynapseParams<S>,
    t: S,
) -> SynapseState<S> {
    SynapseState {
        current: state.current,
        drive_until: state.drive_until.max(t + params.pulse_width),
    }
}

/// Closed-form response of the synapse filter to a single rectangular input
/// pulse of amplitude `weight` on `[pulse_start, pulse_end]`, starting from
/// zero output. Used as the integration oracle in tests.
pub fn dpi_analytic_response<S: Scalar>(
    params: &SynapseParams<S>,
    pulse_start: S,
    pulse_end: S,
    t: S,
) -> S {
    debug_assert!(pulse_start < pulse_end);
    let saturation = params.gain * params.weight;
    if t < pulse_start {
        S::zero()
    } else if t <= pulse_end {
        saturation * (S::one() - (-(t - pulse_start) / params.tau).exp())
    } else {
        let at_end = saturation * (S::one() - (-(pulse_end - pulse_start) / params.tau).exp());
        at_end * (-(t - pulse_end) / params.tau).exp()
    }
}

/// Parameter set with the exponential term and adaptation switched off,
/// used by the subthreshold oracle tests and the delay-element presets.
pub fn passive_neuron<S: Scalar>(
    capacitance: S,
    leak_conductance: S,
    leak_reversal: S,
) -> NeuronParams<S> {
    NeuronParams {
        capacitance,
        leak_conductance,
        leak_reversal,
        threshold: leak_reversal + lit(20.0),
        slope_factor: lit(2.0),
        adapt_tau: lit(100.0),
        adapt_conductance: S::zero(),
        adapt_increment: S::zero(),
        reset_potential: leak_reversal,
        peak_potential: leak_reversal + lit(500.0),
        refractory: lit(3.0),
        injection_current: S::zero(),
        floor_potential: leak_reversal - lit(320.0),
        exp_enabled: false,
        adapt_enabled: false,
    }
}
