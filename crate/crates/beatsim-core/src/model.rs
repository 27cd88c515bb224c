//! Closed-form quantities of the four-level model.
//!
//! Two ground sublevels `g∓` (Zeeman shift `∓Δg`) couple to two excited
//! sublevels `e∓` (shift `∓Δe`) through a weak π-polarized drive of
//! half-Rabi frequency `Ω`, detuned by `δ0` from the unshifted line. All
//! frequencies and rates are expressed in units of the excited-state decay
//! rate `γ`, times in units of `1/γ`. Every function here is a pure
//! function of [`AtomParams`].

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum ModelError {
    #[error("invalid atom parameters: {0}")]
    InvalidParams(String),
}

/// Transition branch label: `Minus` is `g₋ → e₋`, `Plus` is `g₊ → e₊`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Branch {
    Minus,
    Plus,
}

/// Physical parameters of the four-level model, in units of `γ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AtomParams {
    /// Excited-state decay rate; sets the unit system (1 by convention).
    pub gamma: f64,
    /// Drive detuning from the unshifted transition.
    pub delta0: f64,
    /// Ground-state Zeeman shift `Δg` (≥ 0).
    pub delta_g: f64,
    /// Excited-state Zeeman shift `Δe` (≥ 0).
    pub delta_e: f64,
    /// Drive half-Rabi frequency `Ω` (≥ 0).
    pub omega: f64,
}

impl AtomParams {
    pub fn new(
        gamma: f64,
        delta0: f64,
        delta_g: f64,
        delta_e: f64,
        omega: f64,
    ) -> Result<Self, ModelError> {
        let p = Self { gamma, delta0, delta_g, delta_e, omega };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        let all_finite = [self.gamma, self.delta0, self.delta_g, self.delta_e, self.omega]
            .iter()
            .all(|v| v.is_finite());
        if !all_finite {
            return Err(ModelError::InvalidParams("non-finite value".into()));
        }
        if self.gamma <= 0.0 {
            return Err(ModelError::InvalidParams(format!(
                "gamma must be > 0, got {}",
                self.gamma
            )));
        }
        if self.delta_g < 0.0 || self.delta_e < 0.0 {
            return Err(ModelError::InvalidParams(format!(
                "Zeeman shifts must be >= 0, got delta_g={}, delta_e={}",
                self.delta_g, self.delta_e
            )));
        }
        if self.omega < 0.0 {
            return Err(ModelError::InvalidParams(format!(
                "omega must be >= 0, got {}",
                self.omega
            )));
        }
        Ok(())
    }

    /// Transition detuning `δ± = δ0 ± (Δe − Δg)` for the given branch.
    pub fn detuning(&self, branch: Branch) -> f64 {
        match branch {
            Branch::Minus => self.delta0 - (self.delta_e - self.delta_g),
            Branch::Plus => self.delta0 + (self.delta_e - self.delta_g),
        }
    }

    /// The perturbative solution holds to lowest order in `(2Ω/γ)²`;
    /// advisory only, nothing refuses to run outside this regime.
    pub fn weak_drive_valid(&self) -> bool {
        let x = 2.0 * self.omega / self.gamma;
        x * x < 0.1
    }
}

/// Elastic scattering amplitude `A(±) = 1 / (γ/2 + i δ±)`, units of `1/γ`.
pub fn scattering_amplitude(params: &AtomParams, branch: Branch) -> Complex64 {
    let denom = Complex64::new(0.5 * params.gamma, params.detuning(branch));
    Complex64::new(1.0, 0.0) / denom
}

/// Null-measurement damping rate `γ(±) = ½ Ω² γ |A(±)|²` of one branch.
pub fn branch_damping(params: &AtomParams, branch: Branch) -> f64 {
    let a = scattering_amplitude(params, branch);
    0.5 * params.omega * params.omega * params.gamma * a.norm_sqr()
}

/// AC Stark shift `δAC(±) = −(δ± / (γ/2)) γ(±)` of one branch.
pub fn branch_stark_shift(params: &AtomParams, branch: Branch) -> f64 {
    -(params.detuning(branch) / (0.5 * params.gamma)) * branch_damping(params, branch)
}

/// Damping rates and AC Stark shifts `((γ(−), γ(+)), (δAC(−), δAC(+)))`.
pub fn damping_and_stark(params: &AtomParams) -> ((f64, f64), (f64, f64)) {
    (
        (
            branch_damping(params, Branch::Minus),
            branch_damping(params, Branch::Plus),
        ),
        (
            branch_stark_shift(params, Branch::Minus),
            branch_stark_shift(params, Branch::Plus),
        ),
    )
}

/// Decoherence rate `Γ` of the ground coherence:
/// `Γ/2 = γ(+) + γ(−) − Ω²γ Re[A(−) A(+)*]`.
pub fn decoherence_rate(params: &AtomParams) -> f64 {
    let a_minus = scattering_amplitude(params, Branch::Minus);
    let a_plus = scattering_amplitude(params, Branch::Plus);
    let ((g_minus, g_plus), _) = damping_and_stark(params);
    let cross = params.omega * params.omega * params.gamma * (a_minus * a_plus.conj()).re;
    2.0 * (g_plus + g_minus - cross)
}

/// Same rate through the amplitude-difference identity
/// `Γ = Ω²γ |A(+) − A(−)|²`; agrees with [`decoherence_rate`] to machine
/// precision and serves as its cross-check.
pub fn decoherence_rate_from_difference(params: &AtomParams) -> f64 {
    let a_minus = scattering_amplitude(params, Branch::Minus);
    let a_plus = scattering_amplitude(params, Branch::Plus);
    params.omega * params.omega * params.gamma * (a_plus - a_minus).norm_sqr()
}

/// Jump contribution `Ω²γ Im[A(−) A(+)*]` to the net shift.
pub fn jump_shift_term(params: &AtomParams) -> f64 {
    let a_minus = scattering_amplitude(params, Branch::Minus);
    let a_plus = scattering_amplitude(params, Branch::Plus);
    params.omega * params.omega * params.gamma * (a_minus * a_plus.conj()).im
}

/// Net frequency shift `2Δ = δAC(+) − δAC(−) + Ω²γ Im[A(−) A(+)*]` of the
/// coherence; the beat precesses at `2(Δg + Δ)`.
pub fn net_shift(params: &AtomParams) -> f64 {
    let (_, (s_minus, s_plus)) = damping_and_stark(params);
    s_plus - s_minus + jump_shift_term(params)
}

/// Phase advance `arg(A(−) A(+)*)` gained by the `ρ_{g−,g+}` coherence per
/// scattering event; tends to `4(Δe − Δg)/γ` near resonance at `δ0 = 0`.
pub fn jump_phase_per_scatter(params: &AtomParams) -> f64 {
    let a_minus = scattering_amplitude(params, Branch::Minus);
    let a_plus = scattering_amplitude(params, Branch::Plus);
    (a_minus * a_plus.conj()).arg()
}

/// Per-branch Rayleigh scattering rates `R(±) = γΩ²|A(±)|² = 2γ(±)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScatteringRates {
    pub minus: f64,
    pub plus: f64,
}

impl ScatteringRates {
    /// Total rate for a state with normalized populations `(p₋, p₊)`.
    pub fn weighted(&self, pop_minus: f64, pop_plus: f64) -> f64 {
        self.minus * pop_minus + self.plus * pop_plus
    }

    /// Total rate at equal populations `(½, ½)`.
    pub fn equal_population_total(&self) -> f64 {
        0.5 * (self.minus + self.plus)
    }

    pub fn max(&self) -> f64 {
        self.minus.max(self.plus)
    }
}

/// Per-branch scattering rates of the driven transitions.
pub fn scattering_rates(params: &AtomParams) -> ScatteringRates {
    ScatteringRates {
        minus: 2.0 * branch_damping(params, Branch::Minus),
        plus: 2.0 * branch_damping(params, Branch::Plus),
    }
}

/// Phase advance per excitation/decay cycle under broadband (incoherent)
/// drive, `2(Δe − Δg)/γ`; the comparison value for the coherent jump phase.
pub fn incoherent_phase_per_cycle(params: &AtomParams) -> f64 {
    2.0 * (params.delta_e - params.delta_g) / params.gamma
}

/// Two-level saturation of the bare low-drive rate:
/// `4Ω²/γ → (4Ω²/γ) / (1 + 8Ω²/γ²)`. Monotone in `Ω`, asymptote `γ/2`.
pub fn saturated_rate(params: &AtomParams) -> f64 {
    let bare = 4.0 * params.omega * params.omega / params.gamma;
    bare / (1.0 + 8.0 * params.omega * params.omega / (params.gamma * params.gamma))
}

/// Bare low-drive scattering rate `4Ω²/γ` of the resonant two-level atom.
pub fn bare_rate(params: &AtomParams) -> f64 {
    4.0 * params.omega * params.omega / params.gamma
}

/// Every closed-form quantity evaluated once for a parameter set.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DerivedRates {
    pub delta_minus: f64,
    pub delta_plus: f64,
    #[serde(skip)]
    pub a_minus: Complex64,
    #[serde(skip)]
    pub a_plus: Complex64,
    pub gamma_minus: f64,
    pub gamma_plus: f64,
    pub ac_minus: f64,
    pub ac_plus: f64,
    /// Decoherence rate `Γ`.
    pub big_gamma: f64,
    /// Net shift `2Δ` of the beat frequency.
    pub net_shift: f64,
    /// Total scattering rate at equal populations.
    pub jump_rate: f64,
    /// Coherence phase advance per jump, radians.
    pub jump_phase: f64,
}

impl DerivedRates {
    pub fn from_params(params: &AtomParams) -> Self {
        let ((gamma_minus, gamma_plus), (ac_minus, ac_plus)) = damping_and_stark(params);
        let rates = scattering_rates(params);
        DerivedRates {
            delta_minus: params.detuning(Branch::Minus),
            delta_plus: params.detuning(Branch::Plus),
            a_minus: scattering_amplitude(params, Branch::Minus),
            a_plus: scattering_amplitude(params, Branch::Plus),
            gamma_minus,
            gamma_plus,
            ac_minus,
            ac_plus,
            big_gamma: decoherence_rate(params),
            net_shift: net_shift(params),
            jump_rate: rates.equal_population_total(),
            jump_phase: jump_phase_per_scatter(params),
        }
    }

    /// Angular precession frequency `2(Δg + Δ)` of the ensemble coherence.
    pub fn precession_frequency(&self, params: &AtomParams) -> f64 {
        2.0 * params.delta_g + self.net_shift
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::{assert_abs_diff_eq, assert_relative_eq};
    use proptest::prelude::*;

    fn params(delta0: f64, delta_g: f64, delta_e: f64, omega: f64) -> AtomParams {
        AtomParams::new(1.0, delta0, delta_g, delta_e, omega).unwrap()
    }

    #[test]
    fn rejects_bad_params() {
        assert!(AtomParams::new(0.0, 0.0, 0.0, 0.0, 0.0).is_err());
        assert!(AtomParams::new(1.0, 0.0, -0.1, 0.0, 0.0).is_err());
        assert!(AtomParams::new(1.0, 0.0, 0.0, -0.1, 0.0).is_err());
        assert!(AtomParams::new(1.0, 0.0, 0.0, 0.0, -0.1).is_err());
        assert!(AtomParams::new(1.0, f64::NAN, 0.0, 0.0, 0.0).is_err());
    }

    #[test]
    fn weak_drive_flag() {
        assert!(params(0.0, 0.1, 0.1, 0.05).weak_drive_valid());
        assert!(!params(0.0, 0.1, 0.1, 0.2).weak_drive_valid());
    }

    #[test]
    fn amplitude_zero_detuning_is_two() {
        // equal Zeeman shifts, resonant drive: A = 1/(γ/2) = 2
        let p = params(0.0, 0.3, 0.3, 0.05);
        for branch in [Branch::Minus, Branch::Plus] {
            let a = scattering_amplitude(&p, branch);
            assert_abs_diff_eq!(a.re, 2.0, epsilon = 1e-15);
            assert_abs_diff_eq!(a.im, 0.0, epsilon = 1e-15);
        }
    }

    #[test]
    fn amplitude_half_gamma_detunings() {
        // δ+ = 0.5, δ- = -0.5: A(+) = 1 - i, A(-) = 1 + i, |A|² = 2.
        // Oracle: explicit complex division 1/(a+ib) = (a-ib)/(a²+b²).
        let p = params(0.0, 0.0, 0.5, 0.05);
        let inv = |re: f64, im: f64| {
            let n = re * re + im * im;
            Complex64::new(re / n, -im / n)
        };
        let a_plus = scattering_amplitude(&p, Branch::Plus);
        let a_minus = scattering_amplitude(&p, Branch::Minus);
        assert_abs_diff_eq!((a_plus - inv(0.5, 0.5)).norm(), 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!((a_minus - inv(0.5, -0.5)).norm(), 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(a_plus.re, 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(a_plus.im, -1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(a_minus.re, 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(a_minus.im, 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(a_plus.norm_sqr(), 2.0, epsilon = 1e-15);
        assert_abs_diff_eq!(a_minus.norm_sqr(), 2.0, epsilon = 1e-15);
    }

    #[test]
    fn amplitudes_equal_when_shifts_equal() {
        let p = params(0.7, 0.2, 0.2, 0.05);
        let a_plus = scattering_amplitude(&p, Branch::Plus);
        let a_minus = scattering_amplitude(&p, Branch::Minus);
        assert_eq!(a_plus, a_minus);
    }

    #[test]
    fn damping_and_stark_vanish_without_drive() {
        let p = params(0.3, 0.1, 0.4, 0.0);
        let ((gm, gp), (sm, sp)) = damping_and_stark(&p);
        assert_eq!((gm, gp, sm, sp), (0.0, 0.0, 0.0, 0.0));
    }

    #[test]
    fn stark_shifts_antisymmetric_on_resonance() {
        // δ0 = 0, Δe > Δg: shifts reduce the bare Larmor precession.
        let p = params(0.0, 0.1, 0.25, 0.05);
        let (_, (sm, sp)) = damping_and_stark(&p);
        assert!(sp < 0.0);
        assert_relative_eq!(sp, -sm, max_relative = 1e-14);
        // closed-form check: δAC(±) = ∓(Δe−Δg) Ω² / ((γ/2)² + (Δe−Δg)²)
        let d = p.delta_e - p.delta_g;
        let expected = -d * p.omega * p.omega / (0.25 + d * d);
        assert_relative_eq!(sp, expected, max_relative = 1e-14);
    }

    #[test]
    fn damping_and_stark_substitution_values() {
        // γ=1, Ω=0.05, δ± = ±0.5: γ(±) = ½·0.0025·2 = 0.0025, δAC(±) = ∓0.0025
        let p = params(0.0, 0.0, 0.5, 0.05);
        let ((gm, gp), (sm, sp)) = damping_and_stark(&p);
        assert_relative_eq!(gm, 0.0025, max_relative = 1e-14);
        assert_relative_eq!(gp, 0.0025, max_relative = 1e-14);
        assert_relative_eq!(sm, 0.0025, max_relative = 1e-14);
        assert_relative_eq!(sp, -0.0025, max_relative = 1e-14);
    }

    #[test]
    fn decoherence_vanishes_for_equal_amplitudes() {
        let p = params(0.4, 0.2, 0.2, 0.08);
        assert_abs_diff_eq!(decoherence_rate(&p), 0.0, epsilon = 1e-18);
    }

    #[test]
    fn decoherence_near_resonance_limit() {
        // Γ → 64 Ω² δ² / γ³ within 5% for δ ≤ 0.05γ at δ0 = 0
        let omega = 0.05;
        for &d in &[0.05, 0.02, 0.01, 0.005] {
            let p = params(0.0, 0.1, 0.1 + d, omega);
            let exact = decoherence_rate(&p);
            let limit = 64.0 * omega * omega * d * d;
            assert_relative_eq!(exact, limit, max_relative = 0.05);
        }
    }

    #[test]
    fn net_shift_near_resonance_terms() {
        // jump term → 16Ω²δ/γ², AC term → −8Ω²δ/γ², total → +8Ω²δ/γ².
        // Taylor oracle at small δ; tolerance set by the next order, O(δ²).
        let omega = 0.05;
        let d = 0.001;
        let p = params(0.0, 0.1, 0.1 + d, omega);
        let (_, (sm, sp)) = damping_and_stark(&p);
        let ac_term = sp - sm;
        let jump = jump_shift_term(&p);
        assert_relative_eq!(jump, 16.0 * omega * omega * d, max_relative = 1e-4);
        assert_relative_eq!(ac_term, -8.0 * omega * omega * d, max_relative = 1e-4);
        assert_relative_eq!(net_shift(&p), 8.0 * omega * omega * d, max_relative = 1e-3);
        assert!(net_shift(&p) > 0.0);
    }

    #[test]
    fn net_shift_trivial_zeros() {
        assert_eq!(net_shift(&params(0.3, 0.1, 0.4, 0.0)), 0.0);
        assert_abs_diff_eq!(net_shift(&params(0.3, 0.2, 0.2, 0.1)), 0.0, epsilon = 1e-18);
    }

    #[test]
    fn jump_phase_values() {
        // δ± = ±0.5γ: phase = 2·arctan(1) = π/2 (arctangent oracle)
        let p = params(0.0, 0.0, 0.5, 0.075);
        assert_relative_eq!(
            jump_phase_per_scatter(&p),
            2.0 * 1.0_f64.atan(),
            max_relative = 1e-14
        );
        assert_relative_eq!(
            jump_phase_per_scatter(&p),
            std::f64::consts::FRAC_PI_2,
            max_relative = 1e-14
        );

        // small detuning: phase → 4δ/γ within 0.1%
        let p = params(0.0, 0.0, 0.01, 0.05);
        assert_relative_eq!(jump_phase_per_scatter(&p), 0.04, max_relative = 1e-3);

        // equal shifts: no phase advance
        let p = params(0.2, 0.3, 0.3, 0.05);
        assert_eq!(jump_phase_per_scatter(&p), 0.0);
    }

    #[test]
    fn scattering_rate_values() {
        // Ω = 0.075γ, δ± = ±0.5γ: R = 2Ω²/γ = 0.01125γ (substitution oracle)
        let p = params(0.0, 0.0, 0.5, 0.075);
        let r = scattering_rates(&p);
        assert_relative_eq!(r.minus, 0.01125, max_relative = 1e-14);
        assert_relative_eq!(r.plus, 0.01125, max_relative = 1e-14);
        assert_relative_eq!(r.equal_population_total(), 0.01125, max_relative = 1e-14);

        // no drive
        let r0 = scattering_rates(&params(0.0, 0.0, 0.5, 0.0));
        assert_eq!(r0.equal_population_total(), 0.0);

        // resonant small-detuning limit: R → 4Ω²/γ (|A|² → 4/γ²)
        let p = params(0.0, 0.1, 0.1 + 1e-6, 0.05);
        let r = scattering_rates(&p);
        assert_relative_eq!(r.equal_population_total(), 4.0 * 0.05 * 0.05, max_relative = 1e-9);
    }

    #[test]
    fn incoherent_cycle_phase() {
        let p = params(0.0, 0.0, 0.5, 0.05);
        assert_eq!(incoherent_phase_per_cycle(&p), 1.0);
        assert_eq!(incoherent_phase_per_cycle(&params(0.1, 0.2, 0.2, 0.05)), 0.0);
    }

    #[test]
    fn coherent_matches_incoherent_at_resonance() {
        // net coherent phase per scattering event, 2Δ/R, equals 2(Δe−Δg)/γ
        // in the resonant near-detuned limit
        // exact ratio is (1−4δ²)/(1+4δ²), so the gap closes as 8δ²
        for &d in &[0.01, 0.005, 0.001] {
            let p = params(0.0, 0.1, 0.1 + d, 0.05);
            let per_event = net_shift(&p) / scattering_rates(&p).equal_population_total();
            let incoherent = incoherent_phase_per_cycle(&p);
            assert_relative_eq!(per_event, incoherent, max_relative = 8.2 * d * d + 1e-12);
        }
    }

    #[test]
    fn saturation_curve() {
        // Ω → 0: saturated/bare → 1
        let p = params(0.0, 0.0, 0.0, 1e-6);
        assert_relative_eq!(saturated_rate(&p) / bare_rate(&p), 1.0, max_relative = 1e-10);
        // Ω = γ/√8: saturated = bare/2
        let p = params(0.0, 0.0, 0.0, 1.0 / 8.0_f64.sqrt());
        assert_relative_eq!(saturated_rate(&p), 0.5 * bare_rate(&p), max_relative = 1e-14);
        // Ω → ∞: saturated → γ/2
        let p = params(0.0, 0.0, 0.0, 1e6);
        assert_relative_eq!(saturated_rate(&p), 0.5, max_relative = 1e-10);
    }

    #[test]
    fn anomalous_sign_and_ratio() {
        // at δ0 = 0 the jump term reverses the AC Stark shift:
        // ratio approaches −2, net shift positive while AC difference negative
        for &d in &[0.02, 0.01, 0.005] {
            let p = params(0.0, 0.1, 0.1 + d, 0.05);
            let (_, (sm, sp)) = damping_and_stark(&p);
            let ac = sp - sm;
            assert!(ac < 0.0);
            assert!(net_shift(&p) > 0.0);
            let ratio = jump_shift_term(&p) / ac;
            assert_relative_eq!(ratio, -2.0, max_relative = 0.02);
        }
    }

    #[test]
    fn gamma_identity_on_grid() {
        // Γ from the rate form equals Ω²γ|A(+)−A(−)|² everywhere
        let mut worst: f64 = 0.0;
        for i in 0..20 {
            for j in 0..20 {
                let p = params(
                    -1.0 + 0.1 * i as f64,
                    0.05 * j as f64,
                    0.07 * i as f64,
                    0.01 + 0.005 * j as f64,
                );
                let g1 = decoherence_rate(&p);
                let g2 = decoherence_rate_from_difference(&p);
                let denom = g2.abs().max(1e-300);
                worst = worst.max((g1 - g2).abs() / denom);
            }
        }
        assert!(worst < 1e-12, "worst relative error {worst:e}");
    }

    #[test]
    fn resummation_identity() {
        // with R = γΩ²|A(−)||A(+)| and θ the per-jump phase:
        //   Γ/2 = R(1−cosθ) + (γ(+)+γ(−)−R)   and   jump term = R sinθ
        for &(d0, dg, de, om) in &[(0.0, 0.1, 0.6, 0.05), (0.3, 0.0, 0.2, 0.11), (0.0, 0.0, 0.5, 0.075)] {
            let p = params(d0, dg, de, om);
            let a_m = scattering_amplitude(&p, Branch::Minus);
            let a_p = scattering_amplitude(&p, Branch::Plus);
            let r_geom = p.gamma * om * om * a_m.norm() * a_p.norm();
            let theta = jump_phase_per_scatter(&p);
            let ((gm, gp), _) = damping_and_stark(&p);
            let lhs = 0.5 * decoherence_rate(&p);
            let rhs = r_geom * (1.0 - theta.cos()) + (gp + gm - r_geom);
            assert_relative_eq!(lhs, rhs, max_relative = 1e-12, epsilon = 1e-18);
            assert_relative_eq!(jump_shift_term(&p), r_geom * theta.sin(), max_relative = 1e-12, epsilon = 1e-18);
        }
        // equal rates: γ(+)+γ(−) = R so Γ/2 = R(1−cosθ) exactly
        let p = params(0.0, 0.0, 0.5, 0.075);
        let r = scattering_rates(&p).equal_population_total();
        let theta = jump_phase_per_scatter(&p);
        assert_relative_eq!(
            0.5 * decoherence_rate(&p),
            r * (1.0 - theta.cos()),
            max_relative = 1e-12
        );
    }

    #[test]
    fn derived_rates_bundle_consistent() {
        let p = params(0.1, 0.2, 0.45, 0.06);
        let d = DerivedRates::from_params(&p);
        assert_eq!(d.big_gamma, decoherence_rate(&p));
        assert_eq!(d.net_shift, net_shift(&p));
        assert_eq!(d.jump_phase, jump_phase_per_scatter(&p));
        assert_eq!(d.delta_plus, p.detuning(Branch::Plus));
        assert!(d.gamma_minus >= 0.0 && d.gamma_plus >= 0.0 && d.big_gamma >= 0.0);
        assert_eq!(d.precession_frequency(&p), 2.0 * p.delta_g + d.net_shift);
    }

    proptest! {
        #[test]
        fn gamma_identity_random(
            delta0 in -3.0..3.0f64,
            delta_g in 0.0..2.0f64,
            delta_e in 0.0..2.0f64,
            omega in 0.0..0.5f64,
        ) {
            let p = params(delta0, delta_g, delta_e, omega);
            let g1 = decoherence_rate(&p);
            let g2 = decoherence_rate_from_difference(&p);
            prop_assert!(g1 >= -1e-18);
            // the rate form subtracts terms of size γ(+)+γ(−); near
            // Δe = Δg that cancellation sets the attainable accuracy
            let ((gm, gp), _) = damping_and_stark(&p);
            let scale = g2.abs().max(1e-13 * (gm + gp));
            prop_assert!((g1 - g2).abs() <= 1e-12 * scale.max(1e-300));
        }

        #[test]
        fn outputs_pure_functions(
            delta0 in -2.0..2.0f64,
            delta_e in 0.0..1.5f64,
            omega in 0.0..0.3f64,
        ) {
            let p = params(delta0, 0.1, delta_e, omega);
            // bitwise-identical on repeated calls
            prop_assert_eq!(decoherence_rate(&p).to_bits(), decoherence_rate(&p).to_bits());
            prop_assert_eq!(net_shift(&p).to_bits(), net_shift(&p).to_bits());
            prop_assert_eq!(
                jump_phase_per_scatter(&p).to_bits(),
                jump_phase_per_scatter(&p).to_bits()
            );
        }
    }
}
