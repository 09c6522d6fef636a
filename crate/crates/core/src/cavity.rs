//! Whispering-gallery mode field amplitudes, Rabi frequencies and
//! Q/linewidth conversions.
//!
//! The circulating magnetic field of a mode with loaded quality factor
//! `Q`, frequency `f₀` and effective volume `V_eff` driven at power `P`
//! is estimated as `H ≈ sqrt(Q P / (μ₀ f₀ V_eff))` (A/m), with
//! `B = μ₀ H` (tesla).
//!
//! The Rabi frequency is `χ = (γ/2) · a · field`, with `γ = 28 GHz/T` and
//! `a` the transition amplitude in free-spin units. Two conventions are
//! exposed, because inserting `H` (A/m) into the per-tesla factor yields
//! THz-scale numbers while the dimensionally consistent `B` path yields
//! MHz-scale ones; see [`RabiConvention`]. Neither is silently preferred:
//! both appear in reports and the SI path is the library default.

use crate::error::{ensure_nonnegative, ensure_positive, Result};
use crate::units::consts::{FREE_SPIN_GAMMA, MU0};

/// A whispering-gallery mode.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WgMode {
    /// Mode frequency, Hz.
    pub f0: f64,
    /// Loaded quality factor.
    pub q_loaded: f64,
    /// Effective mode volume, m³ (filling factor absorbed).
    pub v_eff: f64,
    /// Coupling coefficient β, when known.
    pub coupling_beta: Option<f64>,
}

impl WgMode {
    pub fn new(f0: f64, q_loaded: f64, v_eff: f64, coupling_beta: Option<f64>) -> Result<Self> {
        ensure_positive(f0, "f0")?;
        ensure_positive(q_loaded, "q_loaded")?;
        ensure_positive(v_eff, "v_eff")?;
        if let Some(beta) = coupling_beta {
            ensure_nonnegative(beta, "coupling_beta")?;
        }
        Ok(WgMode { f0, q_loaded, v_eff, coupling_beta })
    }

    /// Mode linewidth `f₀/Q`, Hz.
    pub fn linewidth(&self) -> f64 {
        self.f0 / self.q_loaded
    }
}

/// A spin transition given by its dipole amplitude in free-spin units.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Transition {
    /// Dipole strength `sqrt(σσ*)`, free-spin units.
    pub amplitude: f64,
    /// Transition frequency, Hz.
    pub f_transition: f64,
}

impl Transition {
    pub fn new(amplitude: f64, f_transition: f64) -> Result<Self> {
        ensure_nonnegative(amplitude, "amplitude")?;
        ensure_positive(f_transition, "f_transition")?;
        Ok(Transition { amplitude, f_transition })
    }

    /// Free-spin amplitudes should not exceed 1; larger values warn.
    pub fn amplitude_warning(&self) -> Option<String> {
        (self.amplitude > 1.0)
            .then(|| format!("transition amplitude {} exceeds 1 free-spin unit", self.amplitude))
    }
}

/// Magnetic field amplitude of a driven mode.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FieldAmplitude {
    /// H field, A/m.
    pub h: f64,
    /// B field, tesla (`μ₀ H`).
    pub b: f64,
}

/// Field amplitude of `mode` at circulating power `p_circ` (W).
pub fn field_amplitude(mode: &WgMode, p_circ: f64) -> Result<FieldAmplitude> {
    ensure_nonnegative(p_circ, "p_circ")?;
    let h = (mode.q_loaded * p_circ / (MU0 * mode.f0 * mode.v_eff)).sqrt();
    Ok(FieldAmplitude { h, b: MU0 * h })
}

/// Which field component feeds the per-tesla gyromagnetic factor.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RabiConvention {
    /// `χ = (γ/2) a B` — dimensionally consistent, the default.
    SiTesla,
    /// `χ = (γ/2) a H` — inserts A/m into the per-tesla factor,
    /// reproducing the THz-scale magnitude quoted for this estimate in
    /// parts of the literature.
    PaperLiteral,
}

/// Rabi frequency of `tr` in `field`, Hz, under the chosen convention.
pub fn rabi_frequency(tr: &Transition, field: &FieldAmplitude, convention: RabiConvention) -> f64 {
    let component = match convention {
        RabiConvention::SiTesla => field.b,
        RabiConvention::PaperLiteral => field.h,
    };
    FREE_SPIN_GAMMA / 2.0 * tr.amplitude * component
}

/// Loaded Q from a measured linewidth: `Q = f / Δf`.
pub fn q_from_linewidth(f: f64, linewidth: f64) -> Result<f64> {
    ensure_positive(f, "f")?;
    ensure_positive(linewidth, "linewidth")?;
    Ok(f / linewidth)
}
