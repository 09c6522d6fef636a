//! Frequency-temperature turnover model, cryocooler disturbance synthesis,
//! Allan deviation estimation and small spectral helpers.
//!
//! Near its turnover temperature the resonator frequency is quadratic in
//! temperature, `f(T) = f_to + c·(T − T_to)²`, so a sinusoidal temperature
//! wobble at the cooler cycle frequency appears in frequency at twice that
//! rate when the setpoint sits on the turnover, and at the cycle rate
//! itself when it does not.

use crate::error::{ensure_nonnegative, ensure_positive, Error, Result};

/// Quadratic frequency-temperature curve around the turnover point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThermalCurve {
    /// Frequency at the turnover temperature, Hz.
    pub f_turnover: f64,
    /// Turnover temperature, K.
    pub t_turnover: f64,
    /// Curvature, Hz/K².
    pub curvature: f64,
}

impl ThermalCurve {
    pub fn new(f_turnover: f64, t_turnover: f64, curvature: f64) -> Result<Self> {
        ensure_positive(f_turnover, "f_turnover")?;
        ensure_positive(t_turnover, "t_turnover")?;
        if !curvature.is_finite() {
            return Err(Error::Domain(format!("curvature must be finite, got {curvature}")));
        }
        Ok(ThermalCurve { f_turnover, t_turnover, curvature })
    }

    /// Frequency offset from the turnover frequency at temperature `t`:
    /// `curvature · (t − t_turnover)²`.
    pub fn offset_from_turnover(&self, t: f64) -> f64 {
        let dt = t - self.t_turnover;
        self.curvature * dt * dt
    }
}

/// Resonator frequency at temperature `t`, Hz.
pub fn frequency_at_temperature(curve: &ThermalCurve, t: f64) -> Result<f64> {
    ensure_positive(t, "temperature")?;
    Ok(curve.f_turnover + curve.offset_from_turnover(t))
}

/// Disturbance waveform shape.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Waveform {
    Sinusoid,
    /// Piecewise-linear cycle rising over `duty` of the period and falling
    /// over the rest; zero-mean like the sinusoid.
    Asymmetric { duty: f64 },
}

/// Periodic cryocooler temperature wobble around a setpoint.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct YoYo {
    /// Peak amplitude, K (not peak-to-peak).
    pub amplitude: f64,
    /// Cycle frequency, Hz.
    pub cycle_freq: f64,
    /// Mean temperature, K.
    pub setpoint: f64,
    pub waveform: Waveform,
}

impl YoYo {
    pub fn new(amplitude: f64, cycle_freq: f64, setpoint: f64, waveform: Waveform) -> Result<Self> {
        ensure_nonnegative(amplitude, "amplitude")?;
        ensure_positive(cycle_freq, "cycle_freq")?;
        ensure_positive(setpoint, "setpoint")?;
        if let Waveform::Asymmetric { duty } = waveform {
            if !(duty > 0.0 && duty < 1.0) {
                return Err(Error::Domain(format!("duty must lie in (0,1), got {duty}")));
            }
        }
        Ok(YoYo { amplitude, cycle_freq, setpoint, waveform })
    }

    /// Temperature at time `t`, K.
    pub fn at(&self, t: f64) -> f64 {
        let phase = self.cycle_freq * t;
        let shape = match self.waveform {
            Waveform::Sinusoid => (2.0 * std::f64::consts::PI * phase).sin(),
            Waveform::Asymmetric { duty } => {
                let x = phase.rem_euclid(1.0);
                if x < duty {
                    -1.0 + 2.0 * x / duty
                } else {
                    1.0 - 2.0 * (x - duty) / (1.0 - duty)
                }
            }
        };
        self.setpoint + self.amplitude * shape
    }
}

/// A uniformly sampled temperature series.
#[derive(Debug, Clone, PartialEq)]
pub struct TemperatureSeries {
    /// Sample interval, s.
    pub tau0: f64,
    pub kelvin: Vec<f64>,
}

impl TemperatureSeries {
    pub fn constant(setpoint: f64, tau0: f64, samples: usize) -> Result<Self> {
        ensure_positive(setpoint, "setpoint")?;
        ensure_positive(tau0, "tau0")?;
        Ok(TemperatureSeries { tau0, kelvin: vec![setpoint; samples] })
    }
}

/// Samples the yo-yo at interval `tau0` over `duration` seconds.
/// Deterministic; errors when the waveform would be undersampled
/// (`tau0 ≥ 1/(2·cycle_freq)`).
pub fn temperature_series(yoyo: &YoYo, duration: f64, tau0: f64) -> Result<TemperatureSeries> {
    ensure_positive(duration, "duration")?;
    ensure_positive(tau0, "tau0")?;
    if tau0 >= 1.0 / (2.0 * yoyo.cycle_freq) {
        return Err(Error::InsufficientData(format!(
            "tau0 ({tau0} s) undersamples the {} Hz cycle; need tau0 < {}",
            yoyo.cycle_freq,
            1.0 / (2.0 * yoyo.cycle_freq)
        )));
    }
    let n = (duration / tau0).round() as usize;
    if n == 0 {
        return Err(Error::InsufficientData("duration shorter than one sample".into()));
    }
    let kelvin = (0..n).map(|k| yoyo.at(k as f64 * tau0)).collect();
    Ok(TemperatureSeries { tau0, kelvin })
}

/// First-order low-pass of a temperature series, for the thermal lag
/// between the sensed can and the crystal. Off by default everywhere; a
/// hook, not a calibrated model. The filter state starts on the first
/// sample.
pub fn first_order_lowpass(series: &TemperatureSeries, time_constant: f64) -> Result<TemperatureSeries> {
    ensure_positive(time_constant, "time_constant")?;
    let alpha = series.tau0 / (time_constant + series.tau0);
    let mut out = Vec::with_capacity(series.kelvin.len());
    let mut state = *series.kelvin.first().unwrap_or(&0.0);
    for &t in &series.kelvin {
        state += alpha * (t - state);
        out.push(state);
    }
    Ok(TemperatureSeries { tau0: series.tau0, kelvin: out })
}

/// A uniformly sampled fractional-frequency series.
#[derive(Debug, Clone, PartialEq)]
pub struct FracFreqSeries {
    /// Sample interval, s.
    pub tau0: f64,
    /// Dimensionless fractional frequency samples.
    pub y: Vec<f64>,
}

impl FracFreqSeries {
    pub fn new(tau0: f64, y: Vec<f64>) -> Result<Self> {
        ensure_positive(tau0, "tau0")?;
        if y.len() < 2 {
            return Err(Error::InsufficientData(format!(
                "need at least 2 samples, got {}",
                y.len()
            )));
        }
        Ok(FracFreqSeries { tau0, y })
    }

    /// Accumulated phase (time-error) samples, `x[k] = tau0 · Σ y[..k]`,
    /// one element longer than `y`.
    fn phase(&self) -> Vec<f64> {
        let mut x = Vec::with_capacity(self.y.len() + 1);
        x.push(0.0);
        let mut acc = 0.0;
        for &yi in &self.y {
            acc += yi * self.tau0;
            x.push(acc);
        }
        x
    }
}

/// Allan deviation estimator variant.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AdevEstimator {
    /// Overlapping estimator (default; better data efficiency).
    Overlapping,
    /// Plain (non-overlapping) estimator, for comparison.
    Plain,
}

fn averaging_factor(series: &FracFreqSeries, tau: f64) -> Result<usize> {
    ensure_positive(tau, "tau")?;
    let m_real = tau / series.tau0;
    let m = m_real.round();
    if m < 1.0 || (m_real - m).abs() > 1e-9 * m.max(1.0) {
        return Err(Error::Domain(format!(
            "tau ({tau} s) must be an integer multiple of tau0 ({} s)",
            series.tau0
        )));
    }
    Ok(m as usize)
}

/// Overlapping Allan deviation at averaging time `tau = m·tau0`.
pub fn adev(series: &FracFreqSeries, tau: f64) -> Result<f64> {
    adev_with(series, tau, AdevEstimator::Overlapping)
}

/// Allan deviation with an explicit estimator choice.
pub fn adev_with(series: &FracFreqSeries, tau: f64, estimator: AdevEstimator) -> Result<f64> {
    let m = averaging_factor(series, tau)?;
    let n = series.y.len();
    let x = series.phase();
    match estimator {
        AdevEstimator::Overlapping => {
            if n < 2 * m + 1 {
                return Err(Error::InsufficientData(format!(
                    "need at least {} samples for two overlapping pairs at m = {m}, got {n}",
                    2 * m + 1
                )));
            }
            let count = n - 2 * m + 1;
            let mut sum = 0.0;
            for k in 0..count {
                let d = x[k + 2 * m] - 2.0 * x[k + m] + x[k];
                sum += d * d;
            }
            Ok((sum / (2.0 * tau * tau * count as f64)).sqrt())
        }
        AdevEstimator::Plain => {
            let blocks = n / m;
            if blocks < 3 {
                return Err(Error::InsufficientData(format!(
                    "need at least 3 full blocks at m = {m}, got {blocks}"
                )));
            }
            let mut sum = 0.0;
            for i in 0..blocks - 2 {
                let d = x[(i + 2) * m] - 2.0 * x[(i + 1) * m] + x[i * m];
                sum += d * d;
            }
            Ok((sum / (2.0 * tau * tau * (blocks - 2) as f64)).sqrt())
        }
    }
}

/// End-to-end thermal stability estimate: yo-yo temperature → thermal
/// curve → fractional frequency against `f_nominal` → Allan deviation at
/// each requested `tau`.
pub fn thermal_adev_pipeline(
    curve: &ThermalCurve,
    yoyo: &YoYo,
    f_nominal: f64,
    duration: f64,
    tau0: f64,
    taus: &[f64],
) -> Result<Vec<(f64, f64)>> {
    ensure_positive(f_nominal, "f_nominal")?;
    let temps = temperature_series(yoyo, duration, tau0)?;
    let mut y = Vec::with_capacity(temps.kelvin.len());
    for &t in &temps.kelvin {
        y.push((frequency_at_temperature(curve, t)? - f_nominal) / f_nominal);
    }
    let series = FracFreqSeries::new(tau0, y)?;
    taus.iter()
        .map(|&tau| adev(&series, tau).map(|s| (tau, s)))
        .collect()
}

/// Parses a two-column `time,frequency` CSV log (header row optional)
/// into a fractional-frequency series against `f_nominal`. Sampling must
/// be uniform to 1e-6 relative.
pub fn load_frequency_log(text: &str, f_nominal: f64) -> Result<FracFreqSeries> {
    ensure_positive(f_nominal, "f_nominal")?;
    let mut times = Vec::new();
    let mut freqs = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let mut cols = line.split(',');
        let (a, b) = (cols.next().unwrap_or(""), cols.next().unwrap_or(""));
        match (a.trim().parse::<f64>(), b.trim().parse::<f64>()) {
            (Ok(t), Ok(f)) => {
                times.push(t);
                freqs.push(f);
            }
            _ if i == 0 => continue, // header row
            _ => return Err(Error::Parse(format!("bad log line {}: '{line}'", i + 1))),
        }
    }
    if times.len() < 3 {
        return Err(Error::InsufficientData(format!(
            "frequency log has {} samples, need at least 3",
            times.len()
        )));
    }
    let tau0 = (times[times.len() - 1] - times[0]) / (times.len() - 1) as f64;
    ensure_positive(tau0, "log sample interval")?;
    for w in times.windows(2) {
        let dt = w[1] - w[0];
        if ((dt - tau0) / tau0).abs() > 1e-6 {
            return Err(Error::Parse(format!(
                "non-uniform sampling: interval {dt} s against mean {tau0} s"
            )));
        }
    }
    let y = freqs.iter().map(|&f| (f - f_nominal) / f_nominal).collect();
    FracFreqSeries::new(tau0, y)
}

/// Power of the DFT bin nearest `f`, via the Goertzel recurrence,
/// normalized by n². Callers pick bin-aligned frequencies for exact reads.
pub fn goertzel_power(samples: &[f64], sample_rate: f64, f: f64) -> f64 {
    let n = samples.len();
    let w = 2.0 * std::f64::consts::PI * f / sample_rate;
    let coeff = 2.0 * w.cos();
    let (mut s1, mut s2) = (0.0, 0.0);
    for &x in samples {
        let s0 = x + coeff * s1 - s2;
        s2 = s1;
        s1 = s0;
    }
    (s1 * s1 + s2 * s2 - coeff * s1 * s2) / (n as f64 * n as f64)
}

/// The dominant non-DC spectral peak of a uniformly sampled series.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralPeak {
    /// Peak frequency, Hz (a DFT bin center).
    pub freq: f64,
    /// Peak power (Goertzel normalization).
    pub power: f64,
    /// Peak power over the median non-DC bin power, dB.
    pub snr_db: f64,
}

/// Scans all non-DC periodogram bins of the mean-subtracted series and
/// returns the strongest, with its power over the median bin as an SNR.
pub fn dominant_peak(samples: &[f64], sample_rate: f64) -> Option<SpectralPeak> {
    let n = samples.len();
    if n < 4 {
        return None;
    }
    let mean = samples.iter().sum::<f64>() / n as f64;
    let centered: Vec<f64> = samples.iter().map(|&x| x - mean).collect();
    let mut powers = Vec::with_capacity(n / 2);
    for k in 1..=n / 2 {
        let f = k as f64 * sample_rate / n as f64;
        powers.push((f, goertzel_power(&centered, sample_rate, f)));
    }
    let &(freq, power) = powers
        .iter()
        .max_by(|a, b| a.1.partial_cmp(&b.1).expect("finite powers"))?;
    let mut rest: Vec<f64> = powers
        .iter()
        .filter(|&&(f, _)| f != freq)
        .map(|&(_, p)| p)
        .collect();
    rest.sort_by(|a, b| a.partial_cmp(b).expect("finite powers"));
    let median = rest.get(rest.len() / 2).copied().unwrap_or(0.0);
    let snr_db = 10.0 * (power / median.max(f64::MIN_POSITIVE)).log10();
    Some(SpectralPeak { freq, power, snr_db })
}
