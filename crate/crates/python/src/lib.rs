//! Python bindings for the whispering-gallery maser toolkit.
//!
//! Exposes the main types and operations: broadening/saturation math, mode
//! fields and Rabi rates, the maser rate model, filter responses, the
//! Pound discriminator and the Allan deviation estimator.

use num_complex::Complex64;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyDict;

use wgmaser::units::{ConcUnit, Concentration};

fn err(e: wgmaser::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn conc_unit(unit: &str) -> PyResult<ConcUnit> {
    match unit {
        "wt%" => Ok(ConcUnit::WtPercent),
        "ppm" => Ok(ConcUnit::Ppm),
        "ppb" => Ok(ConcUnit::Ppb),
        other => Err(PyValueError::new_err(format!(
            "unknown concentration unit '{other}' (wt%, ppm, ppb)"
        ))),
    }
}

/// A whispering-gallery mode.
#[pyclass(from_py_object)]
#[derive(Clone)]
struct WgMode {
    inner: wgmaser::cavity::WgMode,
}

#[pymethods]
impl WgMode {
    #[new]
    #[pyo3(signature = (f0, q_loaded, v_eff, coupling_beta=None))]
    fn new(f0: f64, q_loaded: f64, v_eff: f64, coupling_beta: Option<f64>) -> PyResult<Self> {
        Ok(WgMode {
            inner: wgmaser::cavity::WgMode::new(f0, q_loaded, v_eff, coupling_beta).map_err(err)?,
        })
    }

    #[getter]
    fn f0(&self) -> f64 {
        self.inner.f0
    }

    #[getter]
    fn q_loaded(&self) -> f64 {
        self.inner.q_loaded
    }

    fn linewidth(&self) -> f64 {
        self.inner.linewidth()
    }
}

/// Zero-field three-level scheme.
#[pyclass(from_py_object)]
#[derive(Clone)]
struct ThreeLevelSystem {
    inner: wgmaser::maser::ThreeLevelSystem,
}

#[pymethods]
impl ThreeLevelSystem {
    #[staticmethod]
    fn from_signal_and_pump(f_signal: f64, f_pump: f64) -> PyResult<Self> {
        Ok(ThreeLevelSystem {
            inner: wgmaser::maser::ThreeLevelSystem::from_signal_and_pump(f_signal, f_pump)
                .map_err(err)?,
        })
    }

    #[getter]
    fn f_signal(&self) -> f64 {
        self.inner.f_signal
    }

    #[getter]
    fn f_idler(&self) -> f64 {
        self.inner.f_idler
    }

    #[getter]
    fn f_pump(&self) -> f64 {
        self.inner.f_pump
    }

    fn boltzmann_populations(&self, temperature: f64) -> PyResult<(f64, f64, f64)> {
        wgmaser::maser::boltzmann_populations(&self.inner, temperature).map_err(err)
    }

    fn saturated_inversion(&self, temperature: f64) -> PyResult<f64> {
        wgmaser::maser::saturated_inversion(&self.inner, temperature).map_err(err)
    }
}

/// The full maser rate-model configuration.
#[pyclass(from_py_object)]
#[derive(Clone)]
struct MaserConfig {
    inner: wgmaser::maser::MaserConfig,
}

#[pymethods]
impl MaserConfig {
    #[new]
    #[pyo3(signature = (system, signal_mode, temperature, ion_density, t1, t2, participation,
                        threshold_constant=1.0, signal_amplitude=1.0))]
    #[allow(clippy::too_many_arguments)]
    fn new(
        system: ThreeLevelSystem,
        signal_mode: WgMode,
        temperature: f64,
        ion_density: f64,
        t1: f64,
        t2: f64,
        participation: f64,
        threshold_constant: f64,
        signal_amplitude: f64,
    ) -> PyResult<Self> {
        let inner = wgmaser::maser::MaserConfig {
            system: system.inner,
            signal_mode: signal_mode.inner,
            temperature,
            ion_density,
            t1,
            t2,
            participation,
            constants: wgmaser::maser::ModelConstants { threshold_constant, signal_amplitude },
            t1_table: None,
        };
        inner.validate().map_err(err)?;
        Ok(MaserConfig { inner })
    }

    #[pyo3(signature = (pump_saturated=true))]
    fn output_power(&self, pump_saturated: bool) -> PyResult<f64> {
        wgmaser::maser::output_power(&self.inner, pump_saturated).map_err(err)
    }

    fn threshold_inversion_density(&self) -> PyResult<f64> {
        wgmaser::maser::threshold_inversion_density(
            &self.inner.signal_mode,
            self.inner.t1,
            self.inner.t2,
            self.inner.system.f_signal,
            &self.inner.constants,
        )
        .map_err(err)
    }

    /// Returns `(ppb, ion_density, upper_bound)`.
    fn infer_concentration(&self, p_out: f64) -> PyResult<(f64, f64, bool)> {
        let est = wgmaser::maser::infer_concentration(p_out, &self.inner).map_err(err)?;
        Ok((est.ppb, est.ion_density, est.upper_bound))
    }

    /// Returns `(temperature, flag)` with flag one of
    /// `cutoff | mases_throughout | no_masing`.
    fn masing_range(&self, t_min: f64, t_max: f64) -> PyResult<(f64, String)> {
        let r = wgmaser::maser::masing_range_check(&self.inner, t_min, t_max).map_err(err)?;
        let flag = match r.flag {
            wgmaser::maser::RangeFlag::Cutoff => "cutoff",
            wgmaser::maser::RangeFlag::MasesThroughout => "mases_throughout",
            wgmaser::maser::RangeFlag::NoMasing => "no_masing",
        };
        Ok((r.temperature, flag.to_string()))
    }
}

/// Ideal n-pole bandpass filter.
#[pyclass(from_py_object)]
#[derive(Clone)]
struct BandpassFilter {
    inner: wgmaser::pumploop::BandpassFilter,
}

#[pymethods]
impl BandpassFilter {
    #[new]
    #[pyo3(signature = (center, bandwidth_3db, poles, insertion_loss_db, ripple_db=None))]
    fn new(
        center: f64,
        bandwidth_3db: f64,
        poles: u32,
        insertion_loss_db: f64,
        ripple_db: Option<f64>,
    ) -> PyResult<Self> {
        let shape = match ripple_db {
            None => wgmaser::pumploop::FilterShape::Butterworth,
            Some(r) => wgmaser::pumploop::FilterShape::Chebyshev { ripple_db: r },
        };
        Ok(BandpassFilter {
            inner: wgmaser::pumploop::BandpassFilter::new(
                center, bandwidth_3db, poles, insertion_loss_db, shape,
            )
            .map_err(err)?,
        })
    }

    fn response(&self, f: f64) -> PyResult<f64> {
        wgmaser::pumploop::filter_response(&self.inner, f).map_err(err)
    }
}

/// One-port resonator interrogated by the Pound servo.
#[pyclass(from_py_object)]
#[derive(Clone)]
struct ResonatorModel {
    inner: wgmaser::servo::ResonatorModel,
}

#[pymethods]
impl ResonatorModel {
    #[new]
    fn new(f_r: f64, q_loaded: f64, beta: f64) -> PyResult<Self> {
        Ok(ResonatorModel {
            inner: wgmaser::servo::ResonatorModel::new(f_r, q_loaded, beta).map_err(err)?,
        })
    }

    fn linewidth(&self) -> f64 {
        self.inner.linewidth()
    }

    fn reflection(&self, f: f64) -> Complex64 {
        wgmaser::servo::reflection(&self.inner, f)
    }

    /// Pound error voltage with the default interrogation settings.
    fn pound_error(&self, f_carrier: f64) -> PyResult<f64> {
        let cfg = wgmaser::servo::PoundConfig::default();
        wgmaser::servo::pound_error(&self.inner, &cfg, f_carrier).map_err(err)
    }
}

/// Quadratic frequency-temperature curve.
#[pyclass(from_py_object)]
#[derive(Clone)]
struct ThermalCurve {
    inner: wgmaser::stability::ThermalCurve,
}

#[pymethods]
impl ThermalCurve {
    #[new]
    fn new(f_turnover: f64, t_turnover: f64, curvature: f64) -> PyResult<Self> {
        Ok(ThermalCurve {
            inner: wgmaser::stability::ThermalCurve::new(f_turnover, t_turnover, curvature)
                .map_err(err)?,
        })
    }

    fn frequency_at(&self, t: f64) -> PyResult<f64> {
        wgmaser::stability::frequency_at_temperature(&self.inner, t).map_err(err)
    }
}

#[pyfunction]
fn homogeneous_linewidth(t2: f64) -> PyResult<f64> {
    wgmaser::ensemble::homogeneous_linewidth(t2).map_err(err)
}

#[pyfunction]
fn saturation(chi: f64, t1: f64, t2: f64) -> PyResult<f64> {
    wgmaser::ensemble::saturation(chi, t1, t2).map_err(err)
}

#[pyfunction]
fn intensity_broadened_linewidth(s: f64, t2: f64) -> PyResult<f64> {
    wgmaser::ensemble::intensity_broadened_linewidth(s, t2).map_err(err)
}

/// Scales T₂ by the square-root concentration law; both concentrations in
/// the same unit ("wt%", "ppm" or "ppb").
#[pyfunction]
fn scale_t2(t2_ref: f64, conc_ref: f64, conc: f64, unit: &str) -> PyResult<f64> {
    let u = conc_unit(unit)?;
    let a = Concentration::new(conc_ref, u).map_err(err)?;
    let b = Concentration::new(conc, u).map_err(err)?;
    wgmaser::ensemble::scale_t2(t2_ref, &a, &b).map_err(err)
}

/// "coexist" or "compete" for a mode pair at a given separation.
#[pyfunction]
fn classify_mode_pair(separation: f64, delta_f_eff: f64) -> PyResult<String> {
    Ok(wgmaser::ensemble::classify_mode_pair(separation, delta_f_eff)
        .map_err(err)?
        .to_string())
}

#[pyfunction]
fn participation_fraction(t1: f64, t_d: f64, f_inhom: f64, f_hom: f64) -> PyResult<f64> {
    let params =
        wgmaser::ensemble::RelaxationParams::new(t1, 1e-6, 1e-9, Some(t_d)).map_err(err)?;
    wgmaser::ensemble::participation_fraction(&params, f_inhom, f_hom).map_err(err)
}

/// Returns `(h_a_per_m, b_tesla)` for a mode driven at `p_circ` watts.
#[pyfunction]
fn field_amplitude(mode: &WgMode, p_circ: f64) -> PyResult<(f64, f64)> {
    let f = wgmaser::cavity::field_amplitude(&mode.inner, p_circ).map_err(err)?;
    Ok((f.h, f.b))
}

/// Rabi frequency; `convention` is "si_tesla" or "paper_literal".
#[pyfunction]
fn rabi_frequency(amplitude: f64, h: f64, b: f64, convention: &str) -> PyResult<f64> {
    let c = match convention {
        "si_tesla" => wgmaser::cavity::RabiConvention::SiTesla,
        "paper_literal" => wgmaser::cavity::RabiConvention::PaperLiteral,
        other => {
            return Err(PyValueError::new_err(format!(
                "unknown convention '{other}' (si_tesla, paper_literal)"
            )))
        }
    };
    let tr = wgmaser::cavity::Transition::new(amplitude, 1e9).map_err(err)?;
    let field = wgmaser::cavity::FieldAmplitude { h, b };
    Ok(wgmaser::cavity::rabi_frequency(&tr, &field, c))
}

#[pyfunction]
fn q_from_linewidth(f: f64, linewidth: f64) -> PyResult<f64> {
    wgmaser::cavity::q_from_linewidth(f, linewidth).map_err(err)
}

/// Overlapping (or plain) Allan deviation of fractional-frequency samples.
#[pyfunction]
#[pyo3(signature = (y, tau0, tau, overlapping=true))]
fn adev(y: Vec<f64>, tau0: f64, tau: f64, overlapping: bool) -> PyResult<f64> {
    let series = wgmaser::stability::FracFreqSeries::new(tau0, y).map_err(err)?;
    let estimator = if overlapping {
        wgmaser::stability::AdevEstimator::Overlapping
    } else {
        wgmaser::stability::AdevEstimator::Plain
    };
    wgmaser::stability::adev_with(&series, tau, estimator).map_err(err)
}

/// Thermal stability pipeline: sinusoidal yo-yo around a setpoint through
/// the curve, returning `[(tau, adev), ...]`.
#[pyfunction]
#[allow(clippy::too_many_arguments)]
fn thermal_adev_pipeline(
    curve: &ThermalCurve,
    amplitude: f64,
    cycle_freq: f64,
    setpoint: f64,
    f_nominal: f64,
    duration: f64,
    tau0: f64,
    taus: Vec<f64>,
) -> PyResult<Vec<(f64, f64)>> {
    let yoyo = wgmaser::stability::YoYo::new(
        amplitude,
        cycle_freq,
        setpoint,
        wgmaser::stability::Waveform::Sinusoid,
    )
    .map_err(err)?;
    wgmaser::stability::thermal_adev_pipeline(&curve.inner, &yoyo, f_nominal, duration, tau0, &taus)
        .map_err(err)
}

#[pyfunction]
fn aged_intensity(i0: f64, hours: f64) -> PyResult<f64> {
    wgmaser::optics::aged_intensity(i0, hours).map_err(err)
}

#[pyfunction]
fn transmission(surfaces: u32, r: f64, path_mm: f64, a_per_mm: f64) -> PyResult<f64> {
    wgmaser::optics::transmission(surfaces, r, path_mm, a_per_mm).map_err(err)
}

#[pyfunction]
fn fiber_loss(atten_db_per_km: f64, length_m: f64) -> PyResult<f64> {
    wgmaser::optics::fiber_loss(atten_db_per_km, length_m).map_err(err)
}

#[pyfunction]
fn dbm_to_watts(dbm: f64) -> f64 {
    wgmaser::units::dbm_to_watts(dbm)
}

#[pyfunction]
fn watts_to_dbm(watts: f64) -> f64 {
    wgmaser::units::watts_to_dbm(watts)
}

/// DC power of the shipped pump-loop bill of materials, W.
#[pyfunction]
fn pump_loop_dc_watts() -> f64 {
    wgmaser::pumploop::dc_power_budget(&wgmaser::pumploop::SignalChain::embedded_pump_loop())
}

/// Net gain of the shipped pump loop at `f`, dB.
#[pyfunction]
fn pump_loop_gain(f: f64) -> PyResult<f64> {
    wgmaser::pumploop::chain_gain(&wgmaser::pumploop::SignalChain::embedded_pump_loop(), f)
        .map_err(err)
}

/// Headline numbers of a shipped fixture scenario as a dict.
#[pyfunction]
fn fixture_summary(py: Python<'_>, name: &str) -> PyResult<Py<PyDict>> {
    let sc = wgmaser::scenario::Scenario::builtin(name).map_err(err)?;
    let sat = sc.saturation_state().map_err(err)?;
    let dict = PyDict::new(py);
    dict.set_item("name", &sc.name)?;
    dict.set_item("pump_freq_hz", sc.resonator.pump_freq)?;
    dict.set_item("signal_freq_hz", sc.resonator.signal_freqs[0])?;
    dict.set_item("signal_q", sc.resonator.signal_q(0).map_err(err)?)?;
    dict.set_item("participation", sc.participation().map_err(err)?)?;
    dict.set_item("rabi_hz_si", sat.chi)?;
    dict.set_item("saturation_s", sat.s)?;
    dict.set_item("delta_f_eff_hz", sc.delta_f_eff().map_err(err)?)?;
    let config = sc.maser_config().map_err(err)?;
    let p_out = wgmaser::units::dbm_to_watts(sc.resonator.output_powers_dbm[0]);
    let est = wgmaser::maser::infer_concentration(p_out, &config).map_err(err)?;
    dict.set_item("inferred_ppb", est.ppb)?;
    Ok(dict.into())
}

#[pymodule]
fn wgmaser_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<WgMode>()?;
    m.add_class::<ThreeLevelSystem>()?;
    m.add_class::<MaserConfig>()?;
    m.add_class::<BandpassFilter>()?;
    m.add_class::<ResonatorModel>()?;
    m.add_class::<ThermalCurve>()?;
    m.add_function(wrap_pyfunction!(homogeneous_linewidth, m)?)?;
    m.add_function(wrap_pyfunction!(saturation, m)?)?;
    m.add_function(wrap_pyfunction!(intensity_broadened_linewidth, m)?)?;
    m.add_function(wrap_pyfunction!(scale_t2, m)?)?;
    m.add_function(wrap_pyfunction!(classify_mode_pair, m)?)?;
    m.add_function(wrap_pyfunction!(participation_fraction, m)?)?;
    m.add_function(wrap_pyfunction!(field_amplitude, m)?)?;
    m.add_function(wrap_pyfunction!(rabi_frequency, m)?)?;
    m.add_function(wrap_pyfunction!(q_from_linewidth, m)?)?;
    m.add_function(wrap_pyfunction!(adev, m)?)?;
    m.add_function(wrap_pyfunction!(thermal_adev_pipeline, m)?)?;
    m.add_function(wrap_pyfunction!(aged_intensity, m)?)?;
    m.add_function(wrap_pyfunction!(transmission, m)?)?;
    m.add_function(wrap_pyfunction!(fiber_loss, m)?)?;
    m.add_function(wrap_pyfunction!(dbm_to_watts, m)?)?;
    m.add_function(wrap_pyfunction!(watts_to_dbm, m)?)?;
    m.add_function(wrap_pyfunction!(pump_loop_dc_watts, m)?)?;
    m.add_function(wrap_pyfunction!(pump_loop_gain, m)?)?;
    m.add_function(wrap_pyfunction!(fixture_summary, m)?)?;
    Ok(())
}
