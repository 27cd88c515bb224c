//! Trajectory ensembles: averaged coherence, phase-diffusion statistics,
//! and the truncated Poisson-sum evaluation of the ensemble coherence.
//!
//! Three routes to the same quantity keep each other honest: the Monte
//! Carlo average over trajectories, the brute-force sum over the Poisson
//! distribution of scattered photons, and the closed-form expression
//! `½ e^{−Γt/2} e^{i2(Δg+Δ)t}`.

use num_complex::Complex64;
use rayon::prelude::*;
use thiserror::Error;

use crate::model::{damping_and_stark, scattering_amplitude, AtomParams, Branch, DerivedRates};
use crate::rng::derive_seed;
use crate::trajectory::{run_trajectory, SampleGrid, TrajectoryError};

/// Trajectories per parallel work unit; partial sums are combined in block
/// order so results do not depend on scheduling.
const BLOCK: usize = 64;

#[derive(Debug, Error, PartialEq)]
pub enum EnsembleError {
    #[error("ensemble needs at least 2 trajectories, got {0}")]
    TooFewTrajectories(usize),
    #[error("poisson sum truncated too early: need at least {required} terms, got {given}")]
    TruncationBound { required: usize, given: usize },
    #[error(transparent)]
    Trajectory(#[from] TrajectoryError),
}

/// Closed-form ensemble coherence `ρ_{g−,g+}(t) = ½ e^{−Γt/2} e^{i2(Δg+Δ)t}`.
pub fn closed_form_coherence(params: &AtomParams, t: f64) -> Complex64 {
    let rates = DerivedRates::from_params(params);
    0.5 * Complex64::new(-0.5 * rates.big_gamma * t, rates.precession_frequency(params) * t)
        .exp()
}

/// Time-gridded ensemble average of the coherence with standard errors.
#[derive(Debug, Clone, PartialEq)]
pub struct EnsembleSeries {
    pub t_grid: Vec<f64>,
    pub mean_coherence: Vec<Complex64>,
    /// Component-wise standard error of the mean (re, im).
    pub stderr: Vec<Complex64>,
    pub n_traj: usize,
    /// Mean normalized populations `(⟨|α̃₋|²⟩, ⟨|α̃₊|²⟩)`.
    pub populations: Vec<(f64, f64)>,
    /// Standard error of each population mean.
    pub populations_stderr: Vec<(f64, f64)>,
    /// Mean jump count at each grid time.
    pub mean_jump_count: Vec<f64>,
}

/// Phase-diffusion statistics of the jump-phase ledger across an ensemble.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseDiffusionStats {
    pub t_grid: Vec<f64>,
    /// Mean accumulated jump phase per grid time, radians.
    pub mean_phase: Vec<f64>,
    /// Standard deviation of the accumulated phase per grid time.
    pub spread: Vec<f64>,
    /// Final accumulated phase of every run, in trajectory order.
    pub endpoints: Vec<f64>,
    /// Phase advance per jump used by the ledger.
    pub jump_phase: f64,
    pub n_traj: usize,
}

impl PhaseDiffusionStats {
    /// Mean drift rate of the accumulated phase, estimated from the run
    /// endpoints, with its standard error: `(slope, stderr)`.
    pub fn endpoint_slope(&self) -> (f64, f64) {
        let t_end = *self.t_grid.last().expect("non-empty grid");
        let n = self.endpoints.len() as f64;
        let mean = self.endpoints.iter().sum::<f64>() / n;
        let var =
            self.endpoints.iter().map(|e| (e - mean) * (e - mean)).sum::<f64>() / (n - 1.0);
        (mean / t_end, (var / n).sqrt() / t_end)
    }

    /// Sample variance of the endpoint phases together with its standard
    /// error (distribution-free, fourth-moment based).
    pub fn endpoint_variance(&self) -> (f64, f64) {
        let n = self.endpoints.len() as f64;
        let mean = self.endpoints.iter().sum::<f64>() / n;
        let m2 = self.endpoints.iter().map(|e| (e - mean).powi(2)).sum::<f64>() / n;
        let m4 = self.endpoints.iter().map(|e| (e - mean).powi(4)).sum::<f64>() / n;
        let var = m2 * n / (n - 1.0);
        let var_of_var = (m4 - (n - 3.0) / (n - 1.0) * m2 * m2) / n;
        (var, var_of_var.max(0.0).sqrt())
    }
}

#[derive(Clone)]
struct Accumulator {
    sum_re: Vec<f64>,
    sum_im: Vec<f64>,
    sum_re2: Vec<f64>,
    sum_im2: Vec<f64>,
    sum_pm: Vec<f64>,
    sum_pp: Vec<f64>,
    sum_pm2: Vec<f64>,
    sum_pp2: Vec<f64>,
    sum_jumps: Vec<u64>,
    sum_jumps_sq: Vec<u64>,
    endpoints: Vec<f64>,
    count: usize,
}

impl Accumulator {
    fn zeros(len: usize) -> Self {
        Accumulator {
            sum_re: vec![0.0; len],
            sum_im: vec![0.0; len],
            sum_re2: vec![0.0; len],
            sum_im2: vec![0.0; len],
            sum_pm: vec![0.0; len],
            sum_pp: vec![0.0; len],
            sum_pm2: vec![0.0; len],
            sum_pp2: vec![0.0; len],
            sum_jumps: vec![0; len],
            sum_jumps_sq: vec![0; len],
            endpoints: Vec::new(),
            count: 0,
        }
    }

    fn add_record(&mut self, rec: &crate::trajectory::TrajectoryRecord) {
        for (k, c) in rec.coherence_series.iter().enumerate() {
            self.sum_re[k] += c.re;
            self.sum_im[k] += c.im;
            self.sum_re2[k] += c.re * c.re;
            self.sum_im2[k] += c.im * c.im;
        }
        for (k, (&pm, &pp)) in rec
            .pop_minus_series
            .iter()
            .zip(&rec.pop_plus_series)
            .enumerate()
        {
            self.sum_pm[k] += pm;
            self.sum_pp[k] += pp;
            self.sum_pm2[k] += pm * pm;
            self.sum_pp2[k] += pp * pp;
        }
        for (k, &n) in rec.jump_count_series.iter().enumerate() {
            self.sum_jumps[k] += n;
            self.sum_jumps_sq[k] += n * n;
        }
        self.endpoints.push(*rec.phase_series.last().expect("non-empty grid"));
        self.count += 1;
    }

    fn merge(&mut self, other: &Accumulator) {
        let add = |a: &mut Vec<f64>, b: &Vec<f64>| {
            for (x, y) in a.iter_mut().zip(b) {
                *x += *y;
            }
        };
        add(&mut self.sum_re, &other.sum_re);
        add(&mut self.sum_im, &other.sum_im);
        add(&mut self.sum_re2, &other.sum_re2);
        add(&mut self.sum_im2, &other.sum_im2);
        add(&mut self.sum_pm, &other.sum_pm);
        add(&mut self.sum_pp, &other.sum_pp);
        add(&mut self.sum_pm2, &other.sum_pm2);
        add(&mut self.sum_pp2, &other.sum_pp2);
        for (x, y) in self.sum_jumps.iter_mut().zip(&other.sum_jumps) {
            *x += *y;
        }
        for (x, y) in self.sum_jumps_sq.iter_mut().zip(&other.sum_jumps_sq) {
            *x += *y;
        }
        self.endpoints.extend_from_slice(&other.endpoints);
        self.count += other.count;
    }
}

/// Run trajectories `index_offset .. index_offset + n_traj` of the ensemble
/// identified by `master_seed` and accumulate their statistics.
///
/// Trajectory `k` always uses seed `derive_seed(master_seed, k)`, so any
/// contiguous slice of an ensemble can be reproduced independently.
fn accumulate(
    params: &AtomParams,
    grid: &SampleGrid,
    master_seed: u64,
    index_offset: u64,
    n_traj: usize,
) -> Result<Accumulator, EnsembleError> {
    let grid_len = grid.len();
    let n_blocks = n_traj.div_ceil(BLOCK);
    let partials: Result<Vec<Accumulator>, EnsembleError> = (0..n_blocks)
        .into_par_iter()
        .map(|b| {
            let lo = b * BLOCK;
            let hi = ((b + 1) * BLOCK).min(n_traj);
            let mut acc = Accumulator::zeros(grid_len);
            for k in lo..hi {
                let seed = derive_seed(master_seed, index_offset + k as u64);
                let rec = run_trajectory(params, grid, seed)?;
                acc.add_record(&rec);
            }
            Ok(acc)
        })
        .collect();
    let partials = partials?;
    let mut total = Accumulator::zeros(grid_len);
    for p in &partials {
        total.merge(p);
    }
    Ok(total)
}

fn stderr_from_sums(sum: f64, sum_sq: f64, n: f64) -> f64 {
    let mean = sum / n;
    let var = ((sum_sq / n - mean * mean) * n / (n - 1.0)).max(0.0);
    (var / n).sqrt()
}

/// Ensemble average of the normalized coherence and populations.
/// Deterministic given `master_seed`; independent of thread scheduling.
pub fn average_ensemble(
    params: &AtomParams,
    n_traj: usize,
    grid: &SampleGrid,
    master_seed: u64,
) -> Result<EnsembleSeries, EnsembleError> {
    average_ensemble_indexed(params, n_traj, grid, master_seed, 0)
}

/// As [`average_ensemble`], over the trajectory index slice starting at
/// `index_offset`. Slices of the same master seed are statistically
/// independent sub-ensembles of one ensemble.
pub fn average_ensemble_indexed(
    params: &AtomParams,
    n_traj: usize,
    grid: &SampleGrid,
    master_seed: u64,
    index_offset: u64,
) -> Result<EnsembleSeries, EnsembleError> {
    if n_traj < 2 {
        return Err(EnsembleError::TooFewTrajectories(n_traj));
    }
    let acc = accumulate(params, grid, master_seed, index_offset, n_traj)?;
    let n = n_traj as f64;
    let len = grid.len();
    let mut mean_coherence = Vec::with_capacity(len);
    let mut stderr = Vec::with_capacity(len);
    let mut populations = Vec::with_capacity(len);
    let mut populations_stderr = Vec::with_capacity(len);
    let mut mean_jump_count = Vec::with_capacity(len);
    for k in 0..len {
        mean_coherence.push(Complex64::new(acc.sum_re[k] / n, acc.sum_im[k] / n));
        stderr.push(Complex64::new(
            stderr_from_sums(acc.sum_re[k], acc.sum_re2[k], n),
            stderr_from_sums(acc.sum_im[k], acc.sum_im2[k], n),
        ));
        populations.push((acc.sum_pm[k] / n, acc.sum_pp[k] / n));
        populations_stderr.push((
            stderr_from_sums(acc.sum_pm[k], acc.sum_pm2[k], n),
            stderr_from_sums(acc.sum_pp[k], acc.sum_pp2[k], n),
        ));
        mean_jump_count.push(acc.sum_jumps[k] as f64 / n);
    }
    Ok(EnsembleSeries {
        t_grid: grid.times(),
        mean_coherence,
        stderr,
        n_traj,
        populations,
        populations_stderr,
        mean_jump_count,
    })
}

/// Per-grid-point mean and standard deviation of the accumulated jump
/// phase. The mean is computed from integer jump-count sums, so
/// `mean_phase(t) = θ · ⟨n_jumps(t)⟩` holds exactly, not statistically.
pub fn phase_diffusion(
    params: &AtomParams,
    n_traj: usize,
    grid: &SampleGrid,
    master_seed: u64,
) -> Result<PhaseDiffusionStats, EnsembleError> {
    if n_traj < 2 {
        return Err(EnsembleError::TooFewTrajectories(n_traj));
    }
    let theta = DerivedRates::from_params(params).jump_phase;
    let acc = accumulate(params, grid, master_seed, 0, n_traj)?;
    let n = n_traj as f64;
    let mut mean_phase = Vec::with_capacity(grid.len());
    let mut spread = Vec::with_capacity(grid.len());
    for k in 0..grid.len() {
        let mean_n = acc.sum_jumps[k] as f64 / n;
        let mean_n_sq = acc.sum_jumps_sq[k] as f64 / n;
        let var_n = ((mean_n_sq - mean_n * mean_n) * n / (n - 1.0)).max(0.0);
        mean_phase.push(theta * mean_n);
        spread.push(theta.abs() * var_n.sqrt());
    }
    Ok(PhaseDiffusionStats {
        t_grid: grid.times(),
        mean_phase,
        spread,
        endpoints: acc.endpoints,
        jump_phase: theta,
        n_traj,
    })
}

/// Number of series terms after which the dropped Poisson tail is provably
/// below `1e-12` of the sum magnitude (Chernoff bound on the tail).
pub fn poisson_terms_bound(params: &AtomParams, t: f64) -> usize {
    let a_minus = scattering_amplitude(params, Branch::Minus);
    let a_plus = scattering_amplitude(params, Branch::Plus);
    let z = params.gamma * params.omega * params.omega * t * (a_minus * a_plus.conj());
    let mu = z.norm();
    if mu == 0.0 {
        return 1;
    }
    // tail(N) = Σ_{n>N} μⁿ/n! ≤ (eμ/N)^N for N > μ; require ≤ 1e-12 e^{Re z}
    let target = 1e-12 * z.re.exp();
    let mut n = mu.ceil() as usize + 1;
    loop {
        let bound = (std::f64::consts::E * mu / n as f64).powi(n as i32);
        if bound <= target {
            return n;
        }
        n += 1;
    }
}

/// Recommended truncation: the provable bound, doubled.
pub fn recommended_poisson_terms(params: &AtomParams, t: f64) -> usize {
    2 * poisson_terms_bound(params, t)
}

/// Brute-force ensemble coherence at time `t` by summing over the Poisson
/// distribution of scattered-photon numbers:
///
/// `½ e^{i2Δg t} e^{i(δAC(+)−δAC(−))t} e^{−(γ(+)+γ(−))t}
///    Σ_{n=0}^{n_max} (γΩ²t)ⁿ (A(−)A(+)*)ⁿ / n!`
///
/// Converges to [`closed_form_coherence`] as `n_max → ∞`. Errors when
/// `n_max` is below the provable truncation bound.
pub fn poisson_sum_oracle(
    params: &AtomParams,
    t: f64,
    n_max: usize,
) -> Result<Complex64, EnsembleError> {
    let required = poisson_terms_bound(params, t);
    if n_max < required {
        return Err(EnsembleError::TruncationBound { required, given: n_max });
    }
    let a_minus = scattering_amplitude(params, Branch::Minus);
    let a_plus = scattering_amplitude(params, Branch::Plus);
    let ((g_minus, g_plus), (s_minus, s_plus)) = damping_and_stark(params);
    let z = params.gamma * params.omega * params.omega * t * (a_minus * a_plus.conj());

    let mut sum = Complex64::new(1.0, 0.0);
    let mut term = Complex64::new(1.0, 0.0);
    for n in 1..=n_max {
        term = term * z / n as f64;
        sum += term;
    }
    let phase = 2.0 * params.delta_g * t + (s_plus - s_minus) * t;
    let damp = (-(g_plus + g_minus) * t).exp();
    Ok(0.5 * damp * Complex64::from_polar(1.0, phase) * sum)
}

/// Result of checking the ensemble envelope against the closed-form decay.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct EnvelopeReport {
    /// Decay rate fitted to `|mean_coherence| ~ ½ e^{−Γt/2}`.
    pub gamma_fit: f64,
    /// Regression standard error of the fitted rate.
    pub gamma_stderr: f64,
    /// Closed-form rate `Ω²γ|A(+)−A(−)|²`.
    pub gamma_closed: f64,
    /// `(fit − closed) / stderr`.
    pub z_score: f64,
    pub points_used: usize,
    /// Fraction of grid points where the envelope sits below the noise floor.
    pub fraction_below_floor: f64,
    /// False when more than half the grid is below the noise floor.
    pub fit_ok: bool,
}

/// Longest grid prefix on which the mean coherence stays above the noise
/// floor (3× the combined standard error).
fn above_floor_prefix(series: &EnsembleSeries) -> usize {
    let mut prefix = 0;
    for (c, e) in series.mean_coherence.iter().zip(&series.stderr) {
        let floor = 3.0 * (e.re * e.re + e.im * e.im).sqrt();
        if c.norm() <= floor {
            break;
        }
        prefix += 1;
    }
    prefix
}

fn linear_fit(x: &[f64], y: &[f64]) -> (f64, f64, f64) {
    let n = x.len() as f64;
    let x_mean = x.iter().sum::<f64>() / n;
    let y_mean = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|xi| (xi - x_mean) * (xi - x_mean)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(xi, yi)| (xi - x_mean) * (yi - y_mean)).sum();
    let slope = sxy / sxx;
    let intercept = y_mean - slope * x_mean;
    let rss: f64 = x
        .iter()
        .zip(y)
        .map(|(xi, yi)| {
            let r = yi - (intercept + slope * xi);
            r * r
        })
        .sum();
    let slope_stderr = if x.len() > 2 { (rss / (n - 2.0) / sxx).sqrt() } else { f64::NAN };
    (slope, intercept, slope_stderr)
}

/// Fit `|mean_coherence|` to `½ e^{−(Γ/2)t}` and compare the fitted `Γ`
/// against the closed form.
pub fn coherence_envelope_check(series: &EnsembleSeries, params: &AtomParams) -> EnvelopeReport {
    let gamma_closed = DerivedRates::from_params(params).big_gamma;
    let prefix = above_floor_prefix(series);
    let fraction_below_floor = 1.0 - prefix as f64 / series.t_grid.len() as f64;
    let fit_ok = fraction_below_floor <= 0.5 && prefix >= 4;
    if prefix < 3 {
        return EnvelopeReport {
            gamma_fit: f64::NAN,
            gamma_stderr: f64::NAN,
            gamma_closed,
            z_score: f64::NAN,
            points_used: prefix,
            fraction_below_floor,
            fit_ok: false,
        };
    }
    let x = &series.t_grid[..prefix];
    let y: Vec<f64> = series.mean_coherence[..prefix]
        .iter()
        .map(|c| c.norm().ln())
        .collect();
    let (slope, _, slope_stderr) = linear_fit(x, &y);
    let gamma_fit = -2.0 * slope;
    let gamma_stderr = 2.0 * slope_stderr;
    let z_score = if gamma_stderr > 0.0 {
        (gamma_fit - gamma_closed) / gamma_stderr
    } else if gamma_fit == gamma_closed {
        0.0
    } else {
        f64::INFINITY
    };
    EnvelopeReport {
        gamma_fit,
        gamma_stderr,
        gamma_closed,
        z_score,
        points_used: prefix,
        fraction_below_floor,
        fit_ok,
    }
}

/// Angular precession frequency fitted to the unwrapped phase of the mean
/// coherence: `(frequency, stderr)`. Uses only the grid prefix above the
/// noise floor; the grid must sample the beat below the Nyquist limit.
pub fn fit_precession_frequency(series: &EnsembleSeries) -> (f64, f64) {
    let prefix = above_floor_prefix(series).max(3).min(series.t_grid.len());
    let mut phases = Vec::with_capacity(prefix);
    let mut offset = 0.0;
    let mut prev = series.mean_coherence[0].arg();
    phases.push(prev);
    for c in &series.mean_coherence[1..prefix] {
        let raw = c.arg();
        let mut d = raw - prev;
        while d > std::f64::consts::PI {
            d -= 2.0 * std::f64::consts::PI;
        }
        while d < -std::f64::consts::PI {
            d += 2.0 * std::f64::consts::PI;
        }
        offset += d - (raw - prev);
        phases.push(raw + offset);
        prev = raw;
    }
    let (slope, _, stderr) = linear_fit(&series.t_grid[..prefix], &phases);
    (slope, stderr)
}

/// Write an ensemble series as CSV with columns
/// `t, re_mean, im_mean, re_stderr, im_stderr, pop_minus, pop_plus`.
pub fn write_ensemble_csv<W: std::io::Write>(
    series: &EnsembleSeries,
    w: &mut W,
) -> std::io::Result<()> {
    writeln!(w, "t,re_mean,im_mean,re_stderr,im_stderr,pop_minus,pop_plus")?;
    for k in 0..series.t_grid.len() {
        writeln!(
            w,
            "{},{},{},{},{},{},{}",
            series.t_grid[k],
            series.mean_coherence[k].re,
            series.mean_coherence[k].im,
            series.stderr[k].re,
            series.stderr[k].im,
            series.populations[k].0,
            series.populations[k].1,
        )?;
    }
    Ok(())
}

/// Write phase-diffusion statistics as CSV with columns
/// `t, mean_phase, spread`.
pub fn write_phase_csv<W: std::io::Write>(
    stats: &PhaseDiffusionStats,
    w: &mut W,
) -> std::io::Result<()> {
    writeln!(w, "t,mean_phase,spread")?;
    for k in 0..stats.t_grid.len() {
        writeln!(w, "{},{},{}", stats.t_grid[k], stats.mean_phase[k], stats.spread[k])?;
    }
    Ok(())
}
