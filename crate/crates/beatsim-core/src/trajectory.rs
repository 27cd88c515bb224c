//! Single quantum trajectories of the ground-state coherence.
//!
//! Between scattering events the two ground amplitudes evolve under closed
//! factors: Larmor precession, AC Stark phase and null-measurement damping.
//! Rayleigh scattering events (quantum jumps) multiply each amplitude by
//! its elastic scattering amplitude, advancing the coherence phase and
//! re-biasing the superposition weights. Jump times are drawn by thinning
//! an exponential proposal process, so waiting times are statistically
//! exact even when the two branches scatter at different rates.

use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Distribution, Exp};
use thiserror::Error;

use crate::model::{
    scattering_amplitude, scattering_rates, AtomParams, Branch, DerivedRates,
};
use crate::rng::{trajectory_rng, TrajectoryRng};

#[derive(Debug, Error, PartialEq)]
pub enum TrajectoryError {
    #[error("sample grid invalid: {0}")]
    InvalidGrid(String),
}

/// Ground-state superposition amplitudes plus trajectory bookkeeping.
///
/// The pair is deliberately left unnormalized between jumps: the decaying
/// norm is the null-measurement record. [`GroundAmplitudes::renormalize`]
/// is called after every jump and at sampling times.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GroundAmplitudes {
    pub alpha_minus: Complex64,
    pub alpha_plus: Complex64,
    /// Elapsed time, units of `1/γ`.
    pub t: f64,
    pub n_jumps: u64,
    /// Accumulated per-jump phase advance of the coherence, radians.
    /// Tracked as an unbounded ledger, never wrapped.
    pub jump_phase_accum: f64,
}

impl GroundAmplitudes {
    /// The initial superposition `(|g₋⟩ + |g₊⟩)/√2`.
    pub fn initial() -> Self {
        let amp = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        GroundAmplitudes {
            alpha_minus: amp,
            alpha_plus: amp,
            t: 0.0,
            n_jumps: 0,
            jump_phase_accum: 0.0,
        }
    }

    pub fn norm_sqr(&self) -> f64 {
        self.alpha_minus.norm_sqr() + self.alpha_plus.norm_sqr()
    }

    /// Normalized populations `(|α̃₋|², |α̃₊|²)`.
    pub fn populations(&self) -> (f64, f64) {
        let n = self.norm_sqr();
        (self.alpha_minus.norm_sqr() / n, self.alpha_plus.norm_sqr() / n)
    }

    /// Normalized coherence `ρ_{g−,g+} = α₋ α₊* / (|α₋|² + |α₊|²)`.
    pub fn coherence(&self) -> Complex64 {
        self.alpha_minus * self.alpha_plus.conj() / self.norm_sqr()
    }

    pub fn renormalize(&mut self) {
        let n = self.norm_sqr().sqrt();
        self.alpha_minus /= n;
        self.alpha_plus /= n;
    }
}

/// Per-branch multipliers for a propagation step of length `dt`:
/// `exp[(∓iΔg − iδAC(±) − γ(±)) dt]`.
fn step_factors(params: &AtomParams, dt: f64) -> (Complex64, Complex64) {
    let rates = DerivedRates::from_params(params);
    let rate_minus = Complex64::new(-rates.gamma_minus, params.delta_g - rates.ac_minus);
    let rate_plus = Complex64::new(-rates.gamma_plus, -params.delta_g - rates.ac_plus);
    ((rate_minus * dt).exp(), (rate_plus * dt).exp())
}

/// Deterministic between-jump evolution over `dt`; leaves the state
/// unnormalized (norm decay is the null-measurement backaction).
pub fn propagate(state: &GroundAmplitudes, dt: f64, params: &AtomParams) -> GroundAmplitudes {
    debug_assert!(dt >= 0.0);
    let (f_minus, f_plus) = step_factors(params, dt);
    GroundAmplitudes {
        alpha_minus: state.alpha_minus * f_minus,
        alpha_plus: state.alpha_plus * f_plus,
        t: state.t + dt,
        ..*state
    }
}

/// Slaved excited-state amplitudes `Ω A(±) α±(t) / √norm`, valid after the
/// adiabatic transient (`t ≫ 1/γ`). The square norm of the pair is the
/// excited population that feeds the jump rate.
pub fn excited_snapshot(state: &GroundAmplitudes, params: &AtomParams) -> (Complex64, Complex64) {
    let norm = state.norm_sqr().sqrt();
    let a_minus = scattering_amplitude(params, Branch::Minus);
    let a_plus = scattering_amplitude(params, Branch::Plus);
    (
        params.omega * a_minus * state.alpha_minus / norm,
        params.omega * a_plus * state.alpha_plus / norm,
    )
}

/// Instantaneous scattering rate
/// `R(t) = γΩ² (|A(−)|²|α̃₋|² + |A(+)|²|α̃₊|²)`, units of `γ`.
pub fn jump_rate_now(state: &GroundAmplitudes, params: &AtomParams) -> f64 {
    let rates = scattering_rates(params);
    let (p_minus, p_plus) = state.populations();
    rates.weighted(p_minus, p_plus)
}

/// Delay until the next jump within `horizon` of the state's current time,
/// via thinning against the rate bound `R_max = γΩ² max(|A(−)|², |A(+)|²)`.
/// `None` means no jump occurs before the horizon (always, if `R_max = 0`).
fn next_jump_within<R: Rng>(
    state: &GroundAmplitudes,
    params: &AtomParams,
    horizon: f64,
    rng: &mut R,
) -> Option<f64> {
    let r_max = scattering_rates(params).max();
    if r_max <= 0.0 {
        return None;
    }
    let proposal = Exp::new(r_max).expect("positive rate");
    let mut probe = *state;
    let mut waited = 0.0;
    loop {
        let dt = proposal.sample(rng);
        waited += dt;
        if waited > horizon {
            return None;
        }
        probe = propagate(&probe, dt, params);
        // accept with probability R(t)/R_max; exact for piecewise-smooth R
        let u: f64 = rng.gen();
        if u * r_max <= jump_rate_now(&probe, params) {
            return Some(waited);
        }
    }
}

/// Waiting time to the next jump. `None` when no jump can ever occur
/// (`R_max = 0`, i.e. `Ω = 0`).
pub fn sample_waiting_time<R: Rng>(
    state: &GroundAmplitudes,
    params: &AtomParams,
    rng: &mut R,
) -> Option<f64> {
    next_jump_within(state, params, f64::INFINITY, rng)
}

/// Collapse under one Rayleigh scattering event: `α± ← A(±) α±`, then
/// renormalize. Advances the jump count and the coherence phase ledger.
pub fn apply_jump(state: &GroundAmplitudes, params: &AtomParams) -> GroundAmplitudes {
    let a_minus = scattering_amplitude(params, Branch::Minus);
    let a_plus = scattering_amplitude(params, Branch::Plus);
    let theta = (a_minus * a_plus.conj()).arg();
    let mut next = GroundAmplitudes {
        alpha_minus: state.alpha_minus * a_minus,
        alpha_plus: state.alpha_plus * a_plus,
        t: state.t,
        n_jumps: state.n_jumps + 1,
        // assigned from the count, not accumulated, so the ledger identity
        // phase == n_jumps * θ holds exactly
        jump_phase_accum: (state.n_jumps + 1) as f64 * theta,
    };
    next.renormalize();
    next
}

/// Uniform sampling grid: `t_start, t_start + dt, …` up to `t_max`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SampleGrid {
    pub t_start: f64,
    pub t_max: f64,
    pub dt: f64,
}

impl SampleGrid {
    pub fn new(t_max: f64, dt: f64) -> Result<Self, TrajectoryError> {
        Self::with_start(0.0, t_max, dt)
    }

    pub fn with_start(t_start: f64, t_max: f64, dt: f64) -> Result<Self, TrajectoryError> {
        if !(t_max > 0.0) {
            return Err(TrajectoryError::InvalidGrid(format!(
                "t_max must be > 0, got {t_max}"
            )));
        }
        if !(dt > 0.0) {
            return Err(TrajectoryError::InvalidGrid(format!(
                "grid_dt must be > 0, got {dt}"
            )));
        }
        if !(0.0..=t_max).contains(&t_start) {
            return Err(TrajectoryError::InvalidGrid(format!(
                "t_start must lie in [0, t_max], got {t_start}"
            )));
        }
        Ok(SampleGrid { t_start, t_max, dt })
    }

    pub fn len(&self) -> usize {
        ((self.t_max - self.t_start) / self.dt + 1e-9).floor() as usize + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Grid times, built by repeated addition so that consecutive
    /// differences equal `dt` bit-for-bit.
    pub fn times(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.len());
        let mut t = self.t_start;
        for _ in 0..self.len() {
            out.push(t);
            t += self.dt;
        }
        out
    }
}

/// Everything recorded along one trajectory.
#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryRecord {
    pub seed: u64,
    /// Jump times, strictly increasing, all within `[0, t_max]`.
    pub jump_times: Vec<f64>,
    /// `jump_phase_accum` sampled on the grid; a step function that changes
    /// only at jump times.
    pub phase_series: Vec<f64>,
    /// Normalized coherence sampled on the grid.
    pub coherence_series: Vec<Complex64>,
    /// Normalized populations sampled on the grid.
    pub pop_minus_series: Vec<f64>,
    pub pop_plus_series: Vec<f64>,
    /// Jump count at each grid time.
    pub jump_count_series: Vec<u64>,
    pub final_state: GroundAmplitudes,
}

/// Run one trajectory from `(|g₋⟩+|g₊⟩)/√2`, fully determined by
/// `(params, grid, seed)`.
pub fn run_trajectory(
    params: &AtomParams,
    grid: &SampleGrid,
    seed: u64,
) -> Result<TrajectoryRecord, TrajectoryError> {
    let grid_times = grid.times();
    let mut rng: TrajectoryRng = trajectory_rng(seed);
    let mut state = GroundAmplitudes::initial();

    let mut jump_times = Vec::new();
    let mut phase_series = Vec::with_capacity(grid_times.len());
    let mut coherence_series = Vec::with_capacity(grid_times.len());
    let mut pop_minus_series = Vec::with_capacity(grid_times.len());
    let mut pop_plus_series = Vec::with_capacity(grid_times.len());
    let mut jump_count_series = Vec::with_capacity(grid_times.len());

    // memoized step factors; almost every step between jumps spans the
    // same bit-identical dt
    let mut memo_dt = f64::NAN;
    let mut memo_factors = (Complex64::new(1.0, 0.0), Complex64::new(1.0, 0.0));
    let mut advance = |state: &mut GroundAmplitudes, dt: f64| {
        if dt == 0.0 {
            return;
        }
        if dt.to_bits() != memo_dt.to_bits() {
            memo_dt = dt;
            memo_factors = step_factors(params, dt);
        }
        state.alpha_minus *= memo_factors.0;
        state.alpha_plus *= memo_factors.1;
        state.t += dt;
    };

    let mut gi = 0;
    loop {
        let horizon = grid.t_max - state.t;
        let next_jump = next_jump_within(&state, params, horizon, &mut rng);
        let segment_end = match next_jump {
            Some(delay) => state.t + delay,
            None => grid.t_max,
        };
        // emit samples up to the end of this no-jump segment; a sample that
        // coincides with the jump time sees the pre-jump state
        while gi < grid_times.len() && grid_times[gi] <= segment_end {
            let dt = grid_times[gi] - state.t;
            advance(&mut state, dt);
            state.renormalize();
            phase_series.push(state.jump_phase_accum);
            coherence_series.push(state.coherence());
            let (pm, pp) = state.populations();
            pop_minus_series.push(pm);
            pop_plus_series.push(pp);
            jump_count_series.push(state.n_jumps);
            gi += 1;
        }
        match next_jump {
            Some(_) => {
                let dt = segment_end - state.t;
                advance(&mut state, dt);
                state = apply_jump(&state, params);
                jump_times.push(state.t);
            }
            None => {
                let dt = grid.t_max - state.t;
                advance(&mut state, dt);
                break;
            }
        }
    }

    Ok(TrajectoryRecord {
        seed,
        jump_times,
        phase_series,
        coherence_series,
        pop_minus_series,
        pop_plus_series,
        jump_count_series,
        final_state: state,
    })
}
