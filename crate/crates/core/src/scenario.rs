//! Scenario and fixture loading.
//!
//! Fixtures (resonators, the pump-loop BOM, the relaxation catalog, the
//! UV path) ship in-repo as data files and are never hard-coded in logic.
//! A scenario is a human-editable TOML file tying a resonator fixture to
//! ensemble, cavity, maser, pump-loop, servo, stability and optics
//! settings. Every physical quantity is written `"<number> <unit>"` and
//! validated on load; bare numbers are rejected for physical fields.

use serde::Deserialize;

use crate::cavity::{Transition, WgMode};
use crate::ensemble::{RelaxationParams, SaturationState};
use crate::error::{Error, Result};
use crate::maser::{MaserConfig, ModelConstants, ThreeLevelSystem};
use crate::optics::UvFixture;
use crate::pumploop::SignalChain;
use crate::servo::{PoundConfig, ResonatorModel};
use crate::stability::{ThermalCurve, Waveform, YoYo};
use crate::units::{self, Concentration};

/// Measured data for one sapphire ring.
#[derive(Debug, Clone, PartialEq)]
pub struct ResonatorFixture {
    pub name: String,
    pub provenance: String,
    /// Ring diameter, m.
    pub diameter: f64,
    /// Ring height, m.
    pub height: f64,
    /// Annealing history, metadata only.
    pub annealing: String,
    /// Pump mode frequency, Hz.
    pub pump_freq: f64,
    /// Signal (doublet) frequencies, Hz.
    pub signal_freqs: Vec<f64>,
    /// Signal mode linewidths, Hz, matching `signal_freqs`.
    pub signal_linewidths: Vec<f64>,
    /// Measured maser outputs, dBm, matching `signal_freqs`.
    pub output_powers_dbm: Vec<f64>,
    /// Doublet splitting as quoted in the source notes, Hz, when given.
    pub doublet_splitting_quoted: Option<f64>,
}

impl ResonatorFixture {
    /// Loaded Q of signal mode `idx` from its linewidth.
    pub fn signal_q(&self, idx: usize) -> Result<f64> {
        let f = self.signal_freqs.get(idx);
        let lw = self.signal_linewidths.get(idx);
        match (f, lw) {
            (Some(&f), Some(&lw)) => crate::cavity::q_from_linewidth(f, lw),
            _ => Err(Error::MissingData(format!(
                "fixture '{}' has no signal mode {idx}",
                self.name
            ))),
        }
    }

    /// Doublet splitting implied by the listed frequencies, Hz.
    pub fn doublet_splitting_measured(&self) -> Option<f64> {
        if self.signal_freqs.len() >= 2 {
            Some((self.signal_freqs[1] - self.signal_freqs[0]).abs())
        } else {
            None
        }
    }

    /// `(quoted, measured)` when both exist and disagree beyond 10%.
    pub fn doublet_splitting_inconsistency(&self) -> Option<(f64, f64)> {
        let quoted = self.doublet_splitting_quoted?;
        let measured = self.doublet_splitting_measured()?;
        ((quoted - measured).abs() > 0.1 * quoted).then_some((quoted, measured))
    }

    /// Three-level scheme from the first signal mode and the pump.
    pub fn three_level_system(&self) -> Result<ThreeLevelSystem> {
        let f_signal = *self
            .signal_freqs
            .first()
            .ok_or_else(|| Error::MissingData(format!("fixture '{}' lists no signal mode", self.name)))?;
        ThreeLevelSystem::from_signal_and_pump(f_signal, self.pump_freq)
    }
}

#[derive(Deserialize)]
struct RawResonator {
    name: String,
    provenance: String,
    diameter: String,
    height: String,
    annealing: String,
    pump_freq: String,
    signal_freqs: Vec<String>,
    signal_linewidths: Vec<String>,
    output_powers: Vec<String>,
    doublet_splitting_quoted: Option<String>,
}

#[derive(Deserialize)]
struct RawResonators {
    resonator: Vec<RawResonator>,
}

const EMBEDDED_RESONATORS: &str = include_str!("../data/resonators.toml");
const EMBEDDED_SCENARIO_LEONARD: &str = include_str!("../data/scenario_leonard.toml");
const EMBEDDED_SCENARIO_BASILE: &str = include_str!("../data/scenario_basile.toml");

/// Parses a resonator fixture file and returns all fixtures in it.
pub fn parse_resonators(text: &str) -> Result<Vec<ResonatorFixture>> {
    let raw: RawResonators =
        toml::from_str(text).map_err(|e| Error::Parse(format!("resonator fixture: {e}")))?;
    raw.resonator
        .into_iter()
        .map(|r| {
            let signal_freqs: Result<Vec<f64>> =
                r.signal_freqs.iter().map(|s| units::hertz(s)).collect();
            let signal_linewidths: Result<Vec<f64>> =
                r.signal_linewidths.iter().map(|s| units::hertz(s)).collect();
            let dbm: Result<Vec<f64>> = r
                .output_powers
                .iter()
                .map(|s| {
                    let (v, unit) = s
                        .split_once(' ')
                        .ok_or_else(|| Error::Parse(format!("bad power '{s}'")))?;
                    if unit != "dBm" {
                        return Err(Error::Parse(format!(
                            "output power must be in dBm, got '{s}'"
                        )));
                    }
                    v.parse::<f64>()
                        .map_err(|_| Error::Parse(format!("bad power '{s}'")))
                })
                .collect();
            let fixture = ResonatorFixture {
                name: r.name,
                provenance: r.provenance,
                diameter: units::meters(&r.diameter)?,
                height: units::meters(&r.height)?,
                annealing: r.annealing,
                pump_freq: units::hertz(&r.pump_freq)?,
                signal_freqs: signal_freqs?,
                signal_linewidths: signal_linewidths?,
                output_powers_dbm: dbm?,
                doublet_splitting_quoted: r
                    .doublet_splitting_quoted
                    .as_deref()
                    .map(units::hertz)
                    .transpose()?,
            };
            if fixture.signal_freqs.is_empty() {
                return Err(Error::Parse(format!(
                    "fixture '{}' must list at least one signal mode",
                    fixture.name
                )));
            }
            if fixture.signal_freqs.len() != fixture.signal_linewidths.len()
                || fixture.signal_freqs.len() != fixture.output_powers_dbm.len()
            {
                return Err(Error::Parse(format!(
                    "fixture '{}': signal_freqs, signal_linewidths and output_powers \
                     must have equal lengths",
                    fixture.name
                )));
            }
            Ok(fixture)
        })
        .collect()
}

/// Looks up a shipped resonator fixture by name.
pub fn builtin_resonator(name: &str) -> Result<ResonatorFixture> {
    parse_resonators(EMBEDDED_RESONATORS)?
        .into_iter()
        .find(|r| r.name == name)
        .ok_or_else(|| Error::UnknownFixture(format!("resonator '{name}' (shipped: leonard, basile)")))
}

/// Looks up a shipped BOM by name.
pub fn builtin_bom(name: &str) -> Result<SignalChain> {
    match name {
        "pump-loop" => Ok(SignalChain::embedded_pump_loop()),
        other => Err(Error::UnknownFixture(format!(
            "bill of materials '{other}' (shipped: pump-loop)"
        ))),
    }
}

/// Spin-ensemble settings of a scenario.
#[derive(Debug, Clone, PartialEq)]
pub struct EnsembleSection {
    pub t1: f64,
    pub t2: f64,
    pub t2_star: f64,
    pub t_d: f64,
    /// Low-power homogeneous linewidth, Hz.
    pub f_hom: f64,
    /// User multiplier on the effective broadened linewidth.
    pub broadening_multiplier: f64,
}

/// Pump cavity settings of a scenario.
#[derive(Debug, Clone, PartialEq)]
pub struct CavitySection {
    pub pump_power: f64,
    pub pump_q: f64,
    pub v_eff: f64,
    pub pump_amplitude: f64,
}

/// Maser model settings of a scenario.
#[derive(Debug, Clone, PartialEq)]
pub struct MaserSection {
    pub temperature: f64,
    pub constants: ModelConstants,
    pub assay: Concentration,
}

/// Servo settings of a scenario.
#[derive(Debug, Clone, PartialEq)]
pub struct ServoSection {
    pub config: PoundConfig,
    pub beta: f64,
    pub duration: f64,
}

/// Stability settings of a scenario.
#[derive(Debug, Clone, PartialEq)]
pub struct StabilitySection {
    pub turnover_temperature: f64,
    pub curvature: f64,
    pub yoyo_amplitude: f64,
    pub yoyo_frequency: f64,
    pub setpoint: f64,
    pub waveform: Waveform,
    /// Optional can-to-crystal thermal time constant, s; lag off when
    /// absent.
    pub can_lowpass: Option<f64>,
    pub tau0: f64,
    pub duration: f64,
    pub taus: Vec<f64>,
}

/// A fully validated scenario.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub name: String,
    pub resonator: ResonatorFixture,
    pub bom: SignalChain,
    pub bom_name: String,
    pub ensemble: EnsembleSection,
    pub cavity: CavitySection,
    pub maser: MaserSection,
    pub oscillation_threshold_db: f64,
    pub servo: ServoSection,
    pub stability: StabilitySection,
    pub uv: UvFixture,
}

#[derive(Deserialize)]
struct RawEnsemble {
    t1: String,
    t2: String,
    t2_star: String,
    t_d: String,
    f_hom: String,
    broadening_multiplier: f64,
}

#[derive(Deserialize)]
struct RawCavity {
    pump_power: String,
    pump_q: f64,
    v_eff: String,
    pump_amplitude: f64,
}

#[derive(Deserialize)]
struct RawMaser {
    temperature: String,
    threshold_constant: f64,
    signal_amplitude: f64,
    assay: String,
}

#[derive(Deserialize)]
struct RawPumpLoop {
    oscillation_threshold: String,
}

#[derive(Deserialize)]
struct RawServo {
    f_if: String,
    sideband_level: String,
    detector_sensitivity: String,
    demod_phase: String,
    actuator_gain: String,
    actuator_pull: String,
    residual_am: String,
    residual_am_enabled: bool,
    integrator_gain: String,
    sample_rate: String,
    incident_power: String,
    max_lock_temperature: String,
    beta: f64,
    duration: String,
}

#[derive(Deserialize)]
struct RawStability {
    turnover_temperature: String,
    curvature: String,
    yoyo_amplitude: String,
    yoyo_frequency: String,
    setpoint: String,
    /// Duty fraction of an asymmetric cycle; sinusoid when absent.
    waveform_duty: Option<f64>,
    can_lowpass: Option<String>,
    tau0: String,
    duration: String,
    taus: Vec<String>,
}

#[derive(Deserialize)]
struct RawScenario {
    name: String,
    resonator: String,
    bom: String,
    ensemble: RawEnsemble,
    cavity: RawCavity,
    maser: RawMaser,
    pumploop: RawPumpLoop,
    servo: RawServo,
    stability: RawStability,
}

impl Scenario {
    /// Loads one of the shipped scenarios by fixture name.
    pub fn builtin(name: &str) -> Result<Scenario> {
        match name {
            "leonard" => Scenario::from_toml_str(EMBEDDED_SCENARIO_LEONARD),
            "basile" => Scenario::from_toml_str(EMBEDDED_SCENARIO_BASILE),
            other => Err(Error::UnknownFixture(format!(
                "scenario '{other}' (shipped: leonard, basile)"
            ))),
        }
    }

    /// Loads and validates a scenario file.
    pub fn from_file(path: &std::path::Path) -> Result<Scenario> {
        let text = std::fs::read_to_string(path)?;
        Scenario::from_toml_str(&text)
    }

    pub fn from_toml_str(text: &str) -> Result<Scenario> {
        let raw: RawScenario =
            toml::from_str(text).map_err(|e| Error::Parse(format!("scenario: {e}")))?;

        let resonator = if let Some((path, name)) = raw.resonator.split_once(':') {
            let text = std::fs::read_to_string(path)?;
            parse_resonators(&text)?
                .into_iter()
                .find(|r| r.name == name)
                .ok_or_else(|| {
                    Error::UnknownFixture(format!("resonator '{name}' in '{path}'"))
                })?
        } else {
            builtin_resonator(&raw.resonator)?
        };

        let (bom, bom_name) = if raw.bom.contains('/') || raw.bom.ends_with(".csv") {
            let text = std::fs::read_to_string(&raw.bom)?;
            (SignalChain::from_csv_str(&text)?, raw.bom.clone())
        } else {
            (builtin_bom(&raw.bom)?, raw.bom.clone())
        };

        let ensemble = EnsembleSection {
            t1: units::seconds(&raw.ensemble.t1)?,
            t2: units::seconds(&raw.ensemble.t2)?,
            t2_star: units::seconds(&raw.ensemble.t2_star)?,
            t_d: units::seconds(&raw.ensemble.t_d)?,
            f_hom: units::hertz(&raw.ensemble.f_hom)?,
            broadening_multiplier: raw.ensemble.broadening_multiplier,
        };
        if ensemble.broadening_multiplier <= 0.0 {
            return Err(Error::Domain(format!(
                "broadening_multiplier must be > 0, got {}",
                ensemble.broadening_multiplier
            )));
        }

        let cavity = CavitySection {
            pump_power: units::watts(&raw.cavity.pump_power)?,
            pump_q: raw.cavity.pump_q,
            v_eff: units::volume_m3(&raw.cavity.v_eff)?,
            pump_amplitude: raw.cavity.pump_amplitude,
        };

        let maser = MaserSection {
            temperature: units::kelvin(&raw.maser.temperature)?,
            constants: ModelConstants {
                threshold_constant: raw.maser.threshold_constant,
                signal_amplitude: raw.maser.signal_amplitude,
            },
            assay: units::concentration(&raw.maser.assay)?,
        };

        let servo = ServoSection {
            config: PoundConfig {
                f_if: units::hertz(&raw.servo.f_if)?,
                sideband_level_dbc: units::dbc(&raw.servo.sideband_level)?,
                detector_sensitivity: units::volts_per_watt(&raw.servo.detector_sensitivity)?,
                demod_phase: units::radians(&raw.servo.demod_phase)?,
                actuator_gain: units::degrees_per_volt(&raw.servo.actuator_gain)?,
                actuator_pull: units::hz_per_degree(&raw.servo.actuator_pull)?,
                residual_am: units::db_per_volt(&raw.servo.residual_am)?,
                residual_am_enabled: raw.servo.residual_am_enabled,
                integrator_gain: units::per_second(&raw.servo.integrator_gain)?,
                sample_rate: units::hertz(&raw.servo.sample_rate)?,
                incident_power: units::watts(&raw.servo.incident_power)?,
                max_lock_temperature: units::kelvin(&raw.servo.max_lock_temperature)?,
            },
            beta: raw.servo.beta,
            duration: units::seconds(&raw.servo.duration)?,
        };
        servo.config.validate()?;

        let stability = StabilitySection {
            turnover_temperature: units::kelvin(&raw.stability.turnover_temperature)?,
            curvature: units::hz_per_kelvin2(&raw.stability.curvature)?,
            yoyo_amplitude: units::kelvin(&raw.stability.yoyo_amplitude)?,
            yoyo_frequency: units::hertz(&raw.stability.yoyo_frequency)?,
            setpoint: units::kelvin(&raw.stability.setpoint)?,
            waveform: match raw.stability.waveform_duty {
                None => Waveform::Sinusoid,
                Some(duty) => Waveform::Asymmetric { duty },
            },
            can_lowpass: raw
                .stability
                .can_lowpass
                .as_deref()
                .map(units::seconds)
                .transpose()?,
            tau0: units::seconds(&raw.stability.tau0)?,
            duration: units::seconds(&raw.stability.duration)?,
            taus: raw
                .stability
                .taus
                .iter()
                .map(|s| units::seconds(s))
                .collect::<Result<Vec<f64>>>()?,
        };

        let scenario = Scenario {
            name: raw.name,
            resonator,
            bom,
            bom_name,
            ensemble,
            cavity,
            maser,
            oscillation_threshold_db: units::db(&raw.pumploop.oscillation_threshold)?,
            servo,
            stability,
            uv: UvFixture::embedded(),
        };
        // surface validation early: these constructors check the numbers
        scenario.relaxation()?;
        scenario.pump_mode()?;
        scenario.maser_config()?;
        scenario.thermal_curve()?;
        scenario.yoyo()?;
        Ok(scenario)
    }

    pub fn relaxation(&self) -> Result<RelaxationParams> {
        RelaxationParams::new(
            self.ensemble.t1,
            self.ensemble.t2,
            self.ensemble.t2_star,
            Some(self.ensemble.t_d),
        )
    }

    /// Total inhomogeneous linewidth `1/(π T₂*)`, Hz.
    pub fn f_inhom(&self) -> Result<f64> {
        crate::ensemble::homogeneous_linewidth(self.ensemble.t2_star)
    }

    /// Participating fraction of the inhomogeneous line.
    pub fn participation(&self) -> Result<f64> {
        crate::ensemble::participation_fraction(
            &self.relaxation()?,
            self.f_inhom()?,
            self.ensemble.f_hom,
        )
    }

    /// The driven pump mode.
    pub fn pump_mode(&self) -> Result<WgMode> {
        WgMode::new(
            self.resonator.pump_freq,
            self.cavity.pump_q,
            self.cavity.v_eff,
            Some(self.servo.beta),
        )
    }

    pub fn pump_transition(&self) -> Result<Transition> {
        Transition::new(self.cavity.pump_amplitude, self.resonator.pump_freq)
    }

    /// Saturation chain for the pump drive under the SI field convention.
    pub fn saturation_state(&self) -> Result<SaturationState> {
        let field = crate::cavity::field_amplitude(&self.pump_mode()?, self.cavity.pump_power)?;
        let chi = crate::cavity::rabi_frequency(
            &self.pump_transition()?,
            &field,
            crate::cavity::RabiConvention::SiTesla,
        );
        SaturationState::evaluate(chi, self.ensemble.t1, self.ensemble.t2)
    }

    /// Effective broadened linewidth at the operating drive, Hz, including
    /// the user multiplier.
    pub fn delta_f_eff(&self) -> Result<f64> {
        Ok(self.saturation_state()?.delta_f * self.ensemble.broadening_multiplier)
    }

    /// Maser model configuration for the first signal mode. The ion
    /// density starts at zero; inference fills it in.
    pub fn maser_config(&self) -> Result<MaserConfig> {
        let f_signal = self.resonator.signal_freqs[0];
        let signal_mode = WgMode::new(
            f_signal,
            self.resonator.signal_q(0)?,
            self.cavity.v_eff,
            Some(self.servo.beta),
        )?;
        let config = MaserConfig {
            system: self.resonator.three_level_system()?,
            signal_mode,
            temperature: self.maser.temperature,
            ion_density: 0.0,
            t1: self.ensemble.t1,
            t2: self.ensemble.t2,
            participation: self.participation()?,
            constants: self.maser.constants,
            t1_table: None,
        };
        config.validate()?;
        Ok(config)
    }

    /// Thermal curve of the first signal mode around its turnover.
    pub fn thermal_curve(&self) -> Result<ThermalCurve> {
        ThermalCurve::new(
            self.resonator.signal_freqs[0],
            self.stability.turnover_temperature,
            self.stability.curvature,
        )
    }

    pub fn yoyo(&self) -> Result<YoYo> {
        YoYo::new(
            self.stability.yoyo_amplitude,
            self.stability.yoyo_frequency,
            self.stability.setpoint,
            self.stability.waveform,
        )
    }

    /// Resonator model tracked by the Pound servo: the first signal mode.
    pub fn servo_resonator(&self) -> Result<ResonatorModel> {
        ResonatorModel::new(
            self.resonator.signal_freqs[0],
            self.resonator.signal_q(0)?,
            self.servo.beta,
        )
    }
}
