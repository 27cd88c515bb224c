//! Beat synthesis and spectral estimation.
//!
//! A coherence time series becomes a real beat signal, optionally damped by
//! a finite observation window. Its power spectrum yields a center
//! frequency (3-point parabolic interpolation on log power) and a FWHM
//! (linear interpolation at half maximum). A time-domain damped-sinusoid
//! least-squares fit provides an independent estimate of the same two
//! numbers, and a saturation-curve fitter handles drive sweeps.
//!
//! Frequencies here are ordinary frequencies (cycles per unit time): a
//! coherence precessing at angular rate `ω` peaks at `ω/2π`, and an
//! envelope decaying at rate `b` has a Lorentzian FWHM of `b/π`.

use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::Serialize;
use thiserror::Error;

use crate::ensemble::EnsembleSeries;

#[derive(Debug, Error, PartialEq)]
pub enum SpectralError {
    #[error("time grid is not uniform (step {0} deviates from {1})")]
    NonUniformGrid(f64, f64),
    #[error("signal too short: need at least {need} samples, got {got}")]
    TooShort { need: usize, got: usize },
    #[error("signal holds {got:.2} oscillation periods, need at least {need}")]
    TooFewPeriods { need: f64, got: f64 },
    #[error("spectral peak sits at the grid edge (bin {0})")]
    EdgePeak(usize),
    #[error("ambiguous spectrum: secondary maximum within 3 dB at bin {0}")]
    AmbiguousPeak(usize),
    #[error("values are not finite")]
    NonFinite,
    #[error("window tau must be positive, got {0}")]
    BadWindow(f64),
    #[error("fit did not converge after {iterations} iterations (residual {residual_norm})")]
    DidNotConverge { iterations: usize, residual_norm: f64 },
    #[error("degenerate design: need at least {need} distinct abscissas, got {got}")]
    DegenerateDesign { need: usize, got: usize },
}

/// Real beat signal on a uniform time grid.
#[derive(Debug, Clone, PartialEq)]
pub struct BeatSignal {
    pub t_grid: Vec<f64>,
    pub values: Vec<f64>,
    /// Observation-window decay time applied at synthesis, if any.
    pub window_tau: Option<f64>,
    pub dt: f64,
}

fn uniform_step(t_grid: &[f64]) -> Result<f64, SpectralError> {
    if t_grid.len() < 2 {
        return Err(SpectralError::TooShort { need: 2, got: t_grid.len() });
    }
    let dt = t_grid[1] - t_grid[0];
    for w in t_grid.windows(2) {
        let step = w[1] - w[0];
        if (step - dt).abs() > 1e-9 * dt.abs().max(1e-300) {
            return Err(SpectralError::NonUniformGrid(step, dt));
        }
    }
    Ok(dt)
}

impl BeatSignal {
    pub fn from_samples(t_grid: Vec<f64>, values: Vec<f64>) -> Result<Self, SpectralError> {
        let dt = uniform_step(&t_grid)?;
        if values.len() != t_grid.len() {
            return Err(SpectralError::TooShort { need: t_grid.len(), got: values.len() });
        }
        if !values.iter().all(|v| v.is_finite()) {
            return Err(SpectralError::NonFinite);
        }
        Ok(BeatSignal { t_grid, values, window_tau: None, dt })
    }
}

/// Beat written on the second-photon probability: the real part of the
/// mean coherence, optionally damped by `exp(−t/τ_window)` to model a
/// finite observation (transit) time.
pub fn synthesize_beat(
    series: &EnsembleSeries,
    window_tau: Option<f64>,
) -> Result<BeatSignal, SpectralError> {
    let dt = uniform_step(&series.t_grid)?;
    if let Some(tau) = window_tau {
        if !(tau > 0.0) {
            return Err(SpectralError::BadWindow(tau));
        }
    }
    let values: Vec<f64> = series
        .t_grid
        .iter()
        .zip(&series.mean_coherence)
        .map(|(t, c)| match window_tau {
            Some(tau) => c.re * (-t / tau).exp(),
            None => c.re,
        })
        .collect();
    if !values.iter().all(|v| v.is_finite()) {
        return Err(SpectralError::NonFinite);
    }
    Ok(BeatSignal { t_grid: series.t_grid.clone(), values, window_tau, dt })
}

/// Taper applied before the transform. The beat signals are intrinsically
/// damped, so the rectangular default keeps FWHM comparisons well defined;
/// Hann is available for marginal records.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SpectralWindow {
    Rectangular,
    Hann,
}

/// Two-sided power spectrum in DFT bin order (`power[k] = |X_k|²/N`), so
/// that the total power equals the sum of squared input samples.
#[derive(Debug, Clone, PartialEq)]
pub struct PowerSpectrum {
    /// Bin frequencies, cycles per unit time; upper half is negative.
    pub freq: Vec<f64>,
    pub power: Vec<f64>,
    /// Bin spacing `1/(N_fft · dt)`.
    pub df: f64,
    pub n_time_samples: usize,
}

impl PowerSpectrum {
    pub fn total_power(&self) -> f64 {
        self.power.iter().sum()
    }

    /// Bins with non-negative frequency, `(freq, power)`.
    pub fn positive_bins(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        let half = self.power.len() / 2;
        self.freq.iter().zip(&self.power).take(half + 1).map(|(f, p)| (*f, *p))
    }
}

const MIN_SPECTRUM_SAMPLES: usize = 64;

/// Magnitude-squared DFT of the (optionally tapered) beat, zero-padded by
/// `zero_pad_factor` for grid refinement.
pub fn power_spectrum(
    signal: &BeatSignal,
    zero_pad_factor: usize,
    window: SpectralWindow,
) -> Result<PowerSpectrum, SpectralError> {
    let n = signal.values.len();
    if n < MIN_SPECTRUM_SAMPLES {
        return Err(SpectralError::TooShort { need: MIN_SPECTRUM_SAMPLES, got: n });
    }
    let pad = zero_pad_factor.max(1);
    let n_fft = n * pad;

    let mut buf: Vec<Complex64> = Vec::with_capacity(n_fft);
    match window {
        SpectralWindow::Rectangular => {
            buf.extend(signal.values.iter().map(|v| Complex64::new(*v, 0.0)));
        }
        SpectralWindow::Hann => {
            let denom = (n - 1) as f64;
            buf.extend(signal.values.iter().enumerate().map(|(k, v)| {
                let w = 0.5 * (1.0 - (2.0 * std::f64::consts::PI * k as f64 / denom).cos());
                Complex64::new(v * w, 0.0)
            }));
        }
    }
    buf.resize(n_fft, Complex64::new(0.0, 0.0));

    let mut planner = FftPlanner::new();
    planner.plan_fft_forward(n_fft).process(&mut buf);

    let df = 1.0 / (n_fft as f64 * signal.dt);
    let freq: Vec<f64> = (0..n_fft)
        .map(|k| {
            if k <= n_fft / 2 {
                k as f64 * df
            } else {
                (k as f64 - n_fft as f64) * df
            }
        })
        .collect();
    let power: Vec<f64> = buf.iter().map(|x| x.norm_sqr() / n_fft as f64).collect();
    Ok(PowerSpectrum { freq, power, df, n_time_samples: n })
}

/// How a [`SpectrumEstimate`] was produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum EstimateMethod {
    SpectralInterp,
    TimeDomainFit,
}

#[derive(Debug, Clone, PartialEq, Serialize, Default)]
pub struct FitDiagnostics {
    pub residual_norm: f64,
    pub iterations: usize,
    pub converged: bool,
    pub flags: Vec<String>,
}

/// Center frequency and FWHM extracted from a beat.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectrumEstimate {
    /// Peak frequency, cycles per unit time.
    pub center: f64,
    pub fwhm: f64,
    pub peak_power: f64,
    pub method: EstimateMethod,
    pub diagnostics: FitDiagnostics,
}

/// Find the beat peak: center by 3-point parabolic interpolation through
/// the log-power maximum, FWHM by linear interpolation at half maximum on
/// both flanks. Only the positive-frequency half (excluding DC) is
/// searched.
pub fn extract_peak(spectrum: &PowerSpectrum) -> Result<SpectrumEstimate, SpectralError> {
    let n_half = spectrum.power.len() / 2;
    if n_half < 4 {
        return Err(SpectralError::TooShort { need: 8, got: spectrum.power.len() });
    }
    let search = &spectrum.power[..=n_half];
    let (peak_bin, &peak_raw) = search
        .iter()
        .enumerate()
        .skip(1)
        .max_by(|a, b| a.1.partial_cmp(b.1).expect("finite power"))
        .expect("non-empty spectrum");
    if peak_bin <= 1 || peak_bin >= n_half - 1 {
        return Err(SpectralError::EdgePeak(peak_bin));
    }

    let mut flags = Vec::new();
    let (left, center_p, right) =
        (search[peak_bin - 1], search[peak_bin], search[peak_bin + 1]);
    let (delta, peak_power) = if left > 0.0 && right > 0.0 && center_p > 0.0 {
        let (ll, lc, lr) = (left.ln(), center_p.ln(), right.ln());
        let denom = ll - 2.0 * lc + lr;
        if denom < 0.0 {
            let d = 0.5 * (ll - lr) / denom;
            (d, (lc - 0.25 * (ll - lr) * d).exp())
        } else {
            flags.push("degenerate_parabola".to_string());
            (0.0, center_p)
        }
    } else {
        flags.push("degenerate_parabola".to_string());
        (0.0, center_p)
    };
    let center = (peak_bin as f64 + delta) * spectrum.df;

    // half-maximum crossings, linearly interpolated on power
    let half = 0.5 * peak_power;
    let cross_left = {
        let mut k = peak_bin;
        loop {
            if k == 0 {
                return Err(SpectralError::EdgePeak(peak_bin));
            }
            if search[k - 1] < half {
                let frac = (search[k] - half) / (search[k] - search[k - 1]);
                break (k as f64 - frac) * spectrum.df;
            }
            k -= 1;
        }
    };
    let cross_right = {
        let mut k = peak_bin;
        loop {
            if k + 1 > n_half {
                return Err(SpectralError::EdgePeak(peak_bin));
            }
            if search[k + 1] < half {
                let frac = (search[k] - half) / (search[k] - search[k + 1]);
                break (k as f64 + frac) * spectrum.df;
            }
            k += 1;
        }
    };
    let fwhm = cross_right - cross_left;

    // any secondary local maximum within 3 dB of the peak makes the
    // estimate ambiguous
    let three_db = peak_raw / 10f64.powf(0.3);
    let lobe_lo = (cross_left / spectrum.df).floor() as usize;
    let lobe_hi = (cross_right / spectrum.df).ceil() as usize;
    for k in 1..n_half {
        if k >= lobe_lo.saturating_sub(1) && k <= lobe_hi + 1 {
            continue;
        }
        if search[k] >= three_db && search[k] > search[k - 1] && search[k] > search[k + 1] {
            return Err(SpectralError::AmbiguousPeak(k));
        }
    }

    Ok(SpectrumEstimate {
        center,
        fwhm,
        peak_power,
        method: EstimateMethod::SpectralInterp,
        diagnostics: FitDiagnostics { residual_norm: 0.0, iterations: 0, converged: true, flags },
    })
}

/// Parameters of `a·e^{−bt}·cos(ωt+φ)` recovered from a beat signal.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DampedSinusoidFit {
    pub amplitude: f64,
    pub decay_rate: f64,
    pub angular_frequency: f64,
    pub phase: f64,
    pub residual_norm: f64,
    pub iterations: usize,
    pub converged: bool,
}

fn model_damped(t: f64, p: &[f64]) -> f64 {
    p[0] * (-p[1] * t).exp() * (p[2] * t + p[3]).cos()
}

/// Solve `A x = b` for a small dense system by Gaussian elimination with
/// partial pivoting. Returns `None` on a (numerically) singular matrix.
fn solve_small(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    for col in 0..n {
        let pivot = (col..n).max_by(|&i, &j| {
            a[i][col].abs().partial_cmp(&a[j][col].abs()).expect("finite")
        })?;
        if a[pivot][col].abs() < 1e-300 {
            return None;
        }
        a.swap(col, pivot);
        b.swap(col, pivot);
        for row in (col + 1)..n {
            let f = a[row][col] / a[col][col];
            for k in col..n {
                a[row][k] -= f * a[col][k];
            }
            b[row] -= f * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for row in (0..n).rev() {
        let mut s = b[row];
        for k in (row + 1)..n {
            s -= a[row][k] * x[k];
        }
        x[row] = s / a[row][row];
    }
    Some(x)
}

const MAX_FIT_ITERATIONS: usize = 200;
const STEP_TOLERANCE: f64 = 1e-10;

/// Damped Gauss-Newton on a generic residual vector with a numerical
/// (central-difference) Jacobian. Returns `(params, cost, iterations,
/// converged)`.
fn gauss_newton<F>(
    residuals: F,
    mut p: Vec<f64>,
    step_guard: impl Fn(&[f64]) -> bool,
) -> (Vec<f64>, f64, usize, bool)
where
    F: Fn(&[f64]) -> Vec<f64>,
{
    let n_par = p.len();
    let mut cost = residuals(&p).iter().map(|r| r * r).sum::<f64>();
    let mut lambda = 1e-3;
    let mut converged = false;
    let mut iterations = 0;
    while iterations < MAX_FIT_ITERATIONS {
        iterations += 1;
        let r0 = residuals(&p);
        // central-difference Jacobian
        let mut jac: Vec<Vec<f64>> = vec![vec![0.0; n_par]; r0.len()];
        for j in 0..n_par {
            let h = 1e-6 * p[j].abs().max(1e-3);
            let mut p_hi = p.clone();
            let mut p_lo = p.clone();
            p_hi[j] += h;
            p_lo[j] -= h;
            let r_hi = residuals(&p_hi);
            let r_lo = residuals(&p_lo);
            for (i, row) in jac.iter_mut().enumerate() {
                row[j] = (r_hi[i] - r_lo[i]) / (2.0 * h);
            }
        }
        // normal equations JᵀJ δ = −Jᵀr with multiplicative damping
        let mut jtj = vec![vec![0.0; n_par]; n_par];
        let mut jtr = vec![0.0; n_par];
        for (i, row) in jac.iter().enumerate() {
            for a in 0..n_par {
                jtr[a] -= row[a] * r0[i];
                for b in a..n_par {
                    jtj[a][b] += row[a] * row[b];
                }
            }
        }
        for a in 0..n_par {
            for b in 0..a {
                jtj[a][b] = jtj[b][a];
            }
        }

        let mut improved = false;
        for _ in 0..12 {
            let mut damped = jtj.clone();
            for a in 0..n_par {
                damped[a][a] += lambda * jtj[a][a].max(1e-300);
            }
            let Some(step) = solve_small(damped, jtr.clone()) else {
                lambda *= 10.0;
                continue;
            };
            let candidate: Vec<f64> = p.iter().zip(&step).map(|(a, d)| a + d).collect();
            if !step_guard(&candidate) {
                lambda *= 10.0;
                continue;
            }
            let new_cost = residuals(&candidate).iter().map(|r| r * r).sum::<f64>();
            if new_cost.is_finite() && new_cost <= cost {
                let rel_step = step
                    .iter()
                    .zip(&p)
                    .map(|(d, a)| (d / a.abs().max(1e-12)).abs())
                    .fold(0.0f64, f64::max);
                p = candidate;
                cost = new_cost;
                lambda = (lambda / 3.0).max(1e-12);
                improved = true;
                if rel_step < STEP_TOLERANCE {
                    converged = true;
                }
                break;
            }
            lambda *= 10.0;
        }
        if converged || !improved {
            converged = converged || !improved && cost.is_finite();
            break;
        }
    }
    (p, cost, iterations, converged)
}

/// Coarse frequency guess: argmax bin of the unpadded spectrum.
fn coarse_frequency(signal: &BeatSignal) -> Result<f64, SpectralError> {
    let spec = power_spectrum(signal, 1, SpectralWindow::Rectangular)?;
    let n_half = spec.power.len() / 2;
    let (bin, _) = spec.power[..=n_half]
        .iter()
        .enumerate()
        .skip(1)
        .max_by(|a, b| a.1.partial_cmp(b.1).expect("finite power"))
        .expect("non-empty");
    Ok(bin as f64 * spec.df)
}

/// Nonlinear least squares of `a·e^{−bt}·cos(ωt+φ)`, multi-started over 8
/// phase offsets.
pub fn fit_damped_sinusoid_params(signal: &BeatSignal) -> Result<DampedSinusoidFit, SpectralError> {
    let f0 = coarse_frequency(signal)?;
    let duration = signal.t_grid.last().unwrap() - signal.t_grid[0];
    let periods = f0 * duration;
    if periods < 3.0 {
        return Err(SpectralError::TooFewPeriods { need: 3.0, got: periods });
    }

    let a0 = signal.values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if a0 == 0.0 {
        return Err(SpectralError::NonFinite);
    }
    // envelope guess from rms of the first vs last third
    let third = signal.values.len() / 3;
    let rms = |s: &[f64]| (s.iter().map(|v| v * v).sum::<f64>() / s.len() as f64).sqrt();
    let rms_head = rms(&signal.values[..third]);
    let rms_tail = rms(&signal.values[signal.values.len() - third..]);
    let span = signal.t_grid[signal.values.len() - third / 2 - 1] - signal.t_grid[third / 2];
    let b0 = if rms_tail > 0.0 && rms_head > 0.0 {
        ((rms_head / rms_tail).ln() / span).max(0.0)
    } else {
        1.0 / duration
    };

    let omega0 = 2.0 * std::f64::consts::PI * f0;
    let residuals = |p: &[f64]| -> Vec<f64> {
        signal
            .t_grid
            .iter()
            .zip(&signal.values)
            .map(|(t, y)| y - model_damped(*t, p))
            .collect()
    };
    let guard = |p: &[f64]| p[2] > 0.0;

    let mut best: Option<(Vec<f64>, f64, usize, bool)> = None;
    for k in 0..8 {
        let phi = k as f64 * std::f64::consts::FRAC_PI_4;
        let start = vec![a0, b0, omega0, phi];
        let out = gauss_newton(&residuals, start, guard);
        if best.as_ref().map_or(true, |b| out.1 < b.1) {
            best = Some(out);
        }
    }
    let (mut p, cost, iterations, converged) = best.expect("eight starts");
    if !converged {
        return Err(SpectralError::DidNotConverge {
            iterations,
            residual_norm: cost.sqrt(),
        });
    }
    // canonical form: a ≥ 0, ω ≥ 0, φ ∈ (−π, π]
    if p[0] < 0.0 {
        p[0] = -p[0];
        p[3] += std::f64::consts::PI;
    }
    if p[2] < 0.0 {
        p[2] = -p[2];
        p[3] = -p[3];
    }
    let two_pi = 2.0 * std::f64::consts::PI;
    p[3] -= two_pi * (p[3] / two_pi).round();

    Ok(DampedSinusoidFit {
        amplitude: p[0],
        decay_rate: p[1],
        angular_frequency: p[2],
        phase: p[3],
        residual_norm: cost.sqrt(),
        iterations,
        converged,
    })
}

/// Time-domain estimate of center and width: `ω/2π` and `b/π` from the
/// damped-sinusoid fit. Cross-checks [`extract_peak`] on clean signals.
pub fn fit_damped_sinusoid(signal: &BeatSignal) -> Result<SpectrumEstimate, SpectralError> {
    let fit = fit_damped_sinusoid_params(signal)?;
    let mut flags = Vec::new();
    if fit.decay_rate <= 0.0 {
        flags.push("envelope_rate_nonpositive".to_string());
    }
    Ok(SpectrumEstimate {
        center: fit.angular_frequency / (2.0 * std::f64::consts::PI),
        fwhm: fit.decay_rate.max(0.0) / std::f64::consts::PI,
        peak_power: fit.amplitude,
        method: EstimateMethod::TimeDomainFit,
        diagnostics: FitDiagnostics {
            residual_norm: fit.residual_norm,
            iterations: fit.iterations,
            converged: fit.converged,
            flags,
        },
    })
}

/// Saturation-curve fit `value(n) = s·n/(1 + β·n) (+ c)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SaturationFit {
    pub slope: f64,
    pub beta: f64,
    /// Additive constant; zero unless fitted with an offset.
    pub offset: f64,
    pub residual_norm: f64,
    pub iterations: usize,
    pub converged: bool,
}

/// Linear response fit `value(n) = s·n (+ c)`; the `β = 0` nested model.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LinearResponseFit {
    pub slope: f64,
    pub offset: f64,
    pub residual_norm: f64,
}

fn check_design(points: &[(f64, f64)]) -> Result<(), SpectralError> {
    let mut xs: Vec<f64> = points.iter().map(|p| p.0).collect();
    xs.sort_by(|a, b| a.partial_cmp(b).expect("finite"));
    xs.dedup();
    if xs.len() < 3 {
        return Err(SpectralError::DegenerateDesign { need: 3, got: xs.len() });
    }
    Ok(())
}

/// Least squares of `value = s·n (+ c)` in closed form.
pub fn fit_linear_response(
    points: &[(f64, f64)],
    with_offset: bool,
) -> Result<LinearResponseFit, SpectralError> {
    check_design(points)?;
    let n = points.len() as f64;
    let (slope, offset) = if with_offset {
        let x_mean = points.iter().map(|p| p.0).sum::<f64>() / n;
        let y_mean = points.iter().map(|p| p.1).sum::<f64>() / n;
        let sxx: f64 = points.iter().map(|p| (p.0 - x_mean).powi(2)).sum();
        let sxy: f64 = points.iter().map(|p| (p.0 - x_mean) * (p.1 - y_mean)).sum();
        let s = sxy / sxx;
        (s, y_mean - s * x_mean)
    } else {
        let sxx: f64 = points.iter().map(|p| p.0 * p.0).sum();
        let sxy: f64 = points.iter().map(|p| p.0 * p.1).sum();
        (sxy / sxx, 0.0)
    };
    let rss: f64 = points
        .iter()
        .map(|p| {
            let r = p.1 - (slope * p.0 + offset);
            r * r
        })
        .sum();
    Ok(LinearResponseFit { slope, offset, residual_norm: rss.sqrt() })
}

/// Least squares of the saturating response `value = s·n/(1+β·n) (+ c)`.
/// The offset is meant for width curves (observation-window intercept);
/// shift curves must vanish at zero drive and are fitted without it.
pub fn fit_saturation_curve(
    points: &[(f64, f64)],
    with_offset: bool,
) -> Result<SaturationFit, SpectralError> {
    check_design(points)?;
    let linear = fit_linear_response(points, with_offset)?;
    let model = |n: f64, p: &[f64]| -> f64 {
        let c = if p.len() > 2 { p[2] } else { 0.0 };
        p[0] * n / (1.0 + p[1] * n) + c
    };
    let residuals = |p: &[f64]| -> Vec<f64> {
        points.iter().map(|(n, v)| v - model(*n, p)).collect()
    };
    // keep 1 + βn safely positive across the design
    let guard = |p: &[f64]| points.iter().all(|(n, _)| 1.0 + p[1] * n > 0.05);

    let start = if with_offset {
        vec![linear.slope, 0.0, linear.offset]
    } else {
        vec![linear.slope, 0.0]
    };
    let (p, cost, iterations, converged) = gauss_newton(&residuals, start, guard);
    if !converged {
        return Err(SpectralError::DidNotConverge { iterations, residual_norm: cost.sqrt() });
    }
    Ok(SaturationFit {
        slope: p[0],
        beta: p[1],
        offset: if with_offset { p[2] } else { 0.0 },
        residual_norm: cost.sqrt(),
        iterations,
        converged,
    })
}

/// Write a spectrum as CSV with columns `freq, power` (non-negative
/// frequencies only).
pub fn write_spectrum_csv<W: std::io::Write>(
    spectrum: &PowerSpectrum,
    w: &mut W,
) -> std::io::Result<()> {
    writeln!(w, "freq,power")?;
    for (f, p) in spectrum.positive_bins() {
        writeln!(w, "{f},{p}")?;
    }
    Ok(())
}

/// Write a beat signal as CSV with columns `t, value`.
pub fn write_beat_csv<W: std::io::Write>(signal: &BeatSignal, w: &mut W) -> std::io::Result<()> {
    writeln!(w, "t,value")?;
    for (t, v) in signal.t_grid.iter().zip(&signal.values) {
        writeln!(w, "{t},{v}")?;
    }
    Ok(())
}
