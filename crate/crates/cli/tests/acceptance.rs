//! Acceptance suite: every release criterion as one test, each printing a
//! pass line (run with `--nocapture` to see them). Tolerances are pinned
//! here, not calibrated elsewhere.

use approx::assert_relative_eq;

use wgmaser::cavity::{field_amplitude, q_from_linewidth, rabi_frequency, RabiConvention,
                      Transition, WgMode};
use wgmaser::ensemble::{classify_mode_pair, homogeneous_linewidth, ModeRelation,
                        SaturationState};
use wgmaser::maser::{dark_matter_ratio, infer_concentration, output_power, MaserConfig,
                     ModelConstants, ThreeLevelSystem};
use wgmaser::pumploop::{dc_power_budget, filter_response, select_pump_modes, SignalChain};
use wgmaser::servo::{pound_error, simulate, PoundConfig, ResonatorModel};
use wgmaser::stability::{adev, dominant_peak, temperature_series, thermal_adev_pipeline,
                         FracFreqSeries, TemperatureSeries, ThermalCurve, Waveform, YoYo};
use wgmaser::units::{dbm_to_watts, ConcUnit, Concentration};

fn pass(n: u32, what: &str) {
    println!("[acceptance] criterion {n} PASS — {what}");
}

/// Criterion 1: the broadening chain reproduces the kHz-scale homogeneous
/// linewidth and the tens-of-MHz inhomogeneous linewidth.
#[test]
fn criterion_01_broadening_chain() {
    let hom = homogeneous_linewidth(80e-6).unwrap();
    assert!((hom - 3978.9).abs() / 3978.9 <= 1e-3, "got {hom}");
    let inhom = homogeneous_linewidth(10e-9).unwrap();
    assert_relative_eq!(inhom, 31.8e6, max_relative = 1e-3);
    // one-sigma overlap with the measured 27 ± 5 MHz band
    assert!((inhom - 27e6).abs() <= 5e6, "inhomogeneous width {inhom} outside band");
    pass(1, "homogeneous 3978.9 Hz, inhomogeneous 31.8 MHz inside 27±5 MHz");
}

/// Criterion 2: the Rabi/saturation chain lands at 1.98 MHz (SI) and at
/// the THz scale (literal convention), and both give deep saturation.
#[test]
fn criterion_02_rabi_saturation_chain() {
    let mode = WgMode::new(31.3e9, 1e9, 5e-6, Some(1.0)).unwrap();
    let tr = Transition::new(0.05, 31.3e9).unwrap();
    let field = field_amplitude(&mode, 1e-3).unwrap();

    let chi_lit = rabi_frequency(&tr, &field, RabiConvention::PaperLiteral);
    assert!((0.5e12..=2e12).contains(&chi_lit), "literal chi {chi_lit}");
    assert_relative_eq!(chi_lit, 1.58e12, max_relative = 0.01);

    let chi_si = rabi_frequency(&tr, &field, RabiConvention::SiTesla);
    assert_relative_eq!(chi_si, 1.98e6, max_relative = 0.01);

    for chi in [chi_si, chi_lit] {
        let s_full = wgmaser::ensemble::saturation(chi, 7e-3, 80e-6).unwrap();
        assert!(s_full > 5.0, "S {s_full} not deeply saturated");
        let s_bistab = chi * 4.6e-6;
        assert!(s_bistab > 5.0, "S {s_bistab} not deeply saturated");
    }
    pass(2, "chi = 1.98 MHz (SI) / 1.58e12 Hz (literal); S > 5 in both conventions");
}

/// Criterion 3: mode competition matches both observations with the
/// effective linewidth from the SI chain.
#[test]
fn criterion_03_mode_competition() {
    let mode = WgMode::new(31.3e9, 1e9, 5e-6, Some(1.0)).unwrap();
    let tr = Transition::new(0.05, 31.3e9).unwrap();
    let field = field_amplitude(&mode, 1e-3).unwrap();
    let chi_si = rabi_frequency(&tr, &field, RabiConvention::SiTesla);
    let state = SaturationState::evaluate(chi_si, 7e-3, 80e-6).unwrap();
    assert_relative_eq!(state.delta_f, 5.9e6, max_relative = 0.01);

    assert_eq!(
        classify_mode_pair(8e6, state.delta_f).unwrap(),
        ModeRelation::Coexist
    );
    assert_eq!(
        classify_mode_pair(10e3, state.delta_f).unwrap(),
        ModeRelation::Compete
    );
    pass(3, "coexist at 8 MHz, compete at 10 kHz with delta_f_eff = 5.9 MHz");
}

/// Criterion 4: the pump-loop budget and mode selection.
#[test]
fn criterion_04_pump_loop() {
    let bom = SignalChain::embedded_pump_loop();
    assert_eq!(dc_power_budget(&bom), 6.5);

    let picker = bom
        .elements
        .iter()
        .find_map(|e| e.filter.filter(|f| (f.center - 31.33522815e9).abs() < 1.0))
        .expect("mode-picker in BOM");
    assert_eq!(filter_response(&picker, 31.33522815e9).unwrap(), -11.3);
    for sign in [-1.0, 1.0] {
        let r = filter_response(&picker, picker.center + sign * 8.7e6).unwrap();
        assert!((r - -14.3).abs() <= 0.1, "band-edge response {r}");
    }

    let basile = 31.340330e9;
    let leonard = 31.312570e9;
    let picked = select_pump_modes(&[basile, leonard], &bom, 0.0).unwrap();
    assert_eq!(picked.len(), 1);
    assert_eq!(picked[0].f, basile);
    pass(4, "6.5 W DC, -11.3/-14.3 dB filter points, basile accepted / leonard rejected");
}

fn basile_servo() -> (ResonatorModel, PoundConfig) {
    (
        ResonatorModel::new(12.0267126e9, 12.0267126e9 / 200.0, 1.0).unwrap(),
        PoundConfig::default(),
    )
}

/// Criterion 5a/5b: discriminator null at resonance and odd symmetry.
#[test]
fn criterion_05_discriminator_null_and_symmetry() {
    let (model, cfg) = basile_servo();
    let lw = model.linewidth();

    // bisect the zero crossing from a bracketing pair
    let (mut lo, mut hi) = (model.f_r - lw / 4.0, model.f_r + lw / 4.0);
    let e_lo = pound_error(&model, &cfg, lo).unwrap();
    assert!(e_lo * pound_error(&model, &cfg, hi).unwrap() < 0.0);
    for _ in 0..80 {
        let mid = 0.5 * (lo + hi);
        let e_mid = pound_error(&model, &cfg, mid).unwrap();
        if e_mid == 0.0 {
            lo = mid;
            hi = mid;
            break;
        }
        if (e_mid > 0.0) == (e_lo > 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let crossing = 0.5 * (lo + hi);
    assert!(
        (crossing - model.f_r).abs() <= 1e-3 * lw,
        "zero crossing off by {} of a linewidth",
        (crossing - model.f_r).abs() / lw
    );

    let mut max_err = 0.0_f64;
    let mut max_residual = 0.0_f64;
    for i in 1..=200 {
        let x = i as f64 / 200.0 * lw;
        let ep = pound_error(&model, &cfg, model.f_r + x).unwrap();
        let em = pound_error(&model, &cfg, model.f_r - x).unwrap();
        max_err = max_err.max(ep.abs());
        max_residual = max_residual.max((ep + em).abs());
    }
    assert!(max_residual < 1e-9 * max_err);
    pass(5, "error nulls at resonance within 1e-3 linewidth; odd-symmetry residual < 1e-9");
}

/// Criterion 5c: the closed loop recovers a static detuning inside the
/// analytic settling bound.
#[test]
fn criterion_05_static_detuning_recovery() {
    let (model, cfg) = basile_servo();
    let lw = model.linewidth();
    let x0 = lw / 10.0;
    let h = lw / 100.0;
    let slope = (pound_error(&model, &cfg, model.f_r + h).unwrap()
        - pound_error(&model, &cfg, model.f_r - h).unwrap())
        / (2.0 * h);
    let bound = 10.0 / (cfg.integrator_gain * slope.abs() * cfg.hz_per_volt());

    let curve = ThermalCurve::new(model.f_r + x0, 8.72, 0.0).unwrap();
    let duration = 20.0;
    let temps = TemperatureSeries::constant(
        8.72,
        1.0 / cfg.sample_rate,
        (duration * cfg.sample_rate) as usize,
    )
    .unwrap();
    let trace = simulate(&model, &cfg, &curve, &temps, duration).unwrap();

    let target = model.f_r + x0;
    let mut settle = None;
    for k in (0..trace.time.len()).rev() {
        if (trace.loop_freq[k] - target).abs() > 0.01 * x0 {
            settle = Some(trace.time.get(k + 1).copied());
            break;
        }
    }
    let settle_time = settle
        .expect("loop left the 1% band at least once")
        .expect("loop settled inside the run");
    assert!(
        settle_time <= bound,
        "settled at {settle_time} s against the {bound} s bound"
    );
    pass(5, "static detuning recovered to 1% inside the analytic settling bound");
}

fn error_spectrum_peak(setpoint: f64) -> wgmaser::stability::SpectralPeak {
    let (model, cfg) = basile_servo();
    let curve = ThermalCurve::new(model.f_r, 8.72, -11.85).unwrap();
    let yoyo = YoYo::new(0.1, 1.4, setpoint, Waveform::Sinusoid).unwrap();
    let duration = 40.0;
    let temps = temperature_series(&yoyo, duration, 1.0 / cfg.sample_rate).unwrap();
    let trace = simulate(&model, &cfg, &curve, &temps, duration).unwrap();
    // trailing 30 s: an integer number of 1.4 Hz cycles
    let skip = trace.error_v.len() - (30.0 * cfg.sample_rate) as usize;
    dominant_peak(&trace.error_v[skip..], cfg.sample_rate).expect("spectrum")
}

/// Criterion 5d: the error spectrum peaks at twice the cooler frequency at
/// the turnover and at the cooler frequency off it.
#[test]
fn criterion_05_yoyo_spectrum() {
    let on = error_spectrum_peak(8.72);
    assert_relative_eq!(on.freq, 2.8, max_relative = 1e-6);
    assert!(on.snr_db > 10.0, "snr {}", on.snr_db);

    let off = error_spectrum_peak(9.22);
    assert_relative_eq!(off.freq, 1.4, max_relative = 1e-6);
    assert!(off.snr_db > 10.0, "snr {}", off.snr_db);
    pass(5, "error peak at 2.8 Hz on turnover (snr > 10 dB), 1.4 Hz displaced 0.5 K");
}

/// Criterion 6: turnover arithmetic and the thermal stability bound.
#[test]
fn criterion_06_turnover_and_thermal_adev() {
    let curve = ThermalCurve::new(12.0267126e9, 8.72, -11.85).unwrap();
    // exact at the offset level; the absolute difference at 12 GHz is
    // limited by f64 spacing (~2e-6 Hz)
    assert_eq!(curve.offset_from_turnover(9.72), -11.85);
    let df = wgmaser::stability::frequency_at_temperature(&curve, 9.72).unwrap()
        - wgmaser::stability::frequency_at_temperature(&curve, 8.72).unwrap();
    assert!((df - -11.85).abs() <= 1e-5, "df {df}");

    let yoyo = YoYo::new(0.1, 1.4, 8.72, Waveform::Sinusoid).unwrap();
    let table =
        thermal_adev_pipeline(&curve, &yoyo, 12.0267126e9, 400.0, 0.0625, &[10.0]).unwrap();
    let sigma = table[0].1;
    assert!(
        sigma <= 1e-13,
        "thermal-path sigma_y(10 s) = {sigma} exceeds the measured level"
    );
    pass(6, "f(9.72 K) - f(8.72 K) = -11.85 Hz; thermal sigma_y(10 s) <= 1e-13");
}

/// Criterion 7: the Allan estimator against three closed-form oracles.
#[test]
fn criterion_07_adev_oracles() {
    // linear drift: sigma = d tau / sqrt(2)
    let tau0 = 0.5;
    let d = 1e-14;
    let drift: Vec<f64> = (0..4000).map(|k| d * k as f64 * tau0).collect();
    let s = FracFreqSeries::new(tau0, drift).unwrap();
    let got = adev(&s, 10.0).unwrap();
    assert_relative_eq!(got, 7.07e-14, max_relative = 0.01);

    // sinusoid at f_m = 1/(2 tau): sigma = (2/pi) y0
    let y0 = 1e-12;
    let sine: Vec<f64> = (0..4000)
        .map(|k| y0 * (2.0 * std::f64::consts::PI * 0.05 * k as f64 * tau0).sin())
        .collect();
    let s = FracFreqSeries::new(tau0, sine).unwrap();
    let got = adev(&s, 10.0).unwrap();
    // 0.6366 y0 = (2/pi) y0
    assert_relative_eq!(got, std::f64::consts::FRAC_2_PI * y0, max_relative = 0.02);

    // seeded white FM: slope -1/2 over a decade
    use rand::SeedableRng;
    use rand_distr::Distribution;
    let start = std::time::Instant::now();
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0x5eed);
    let normal = rand_distr::StandardNormal;
    let white: Vec<f64> = (0..1_000_000)
        .map(|_| {
            let n: f64 = normal.sample(&mut rng);
            n * 1e-12
        })
        .collect();
    let s = FracFreqSeries::new(1.0, white).unwrap();
    let taus = [1.0_f64, 2.0, 4.0, 10.0];
    let pts: Vec<(f64, f64)> = taus
        .iter()
        .map(|&t| (t.log10(), adev(&s, t).unwrap().log10()))
        .collect();
    let n = pts.len() as f64;
    let sx: f64 = pts.iter().map(|(x, _)| x).sum();
    let sy: f64 = pts.iter().map(|(_, y)| y).sum();
    let sxx: f64 = pts.iter().map(|(x, _)| x * x).sum();
    let sxy: f64 = pts.iter().map(|(x, y)| x * y).sum();
    let slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    assert!((slope + 0.5).abs() <= 0.05, "slope {slope}");
    assert!(start.elapsed().as_secs() < 60, "white-FM check too slow");
    pass(7, "drift 7.07e-14 (±1%), sinusoid 0.6366 y0 (±2%), white-FM slope -1/2 (±0.05)");
}

fn leonard_config() -> MaserConfig {
    let f_signal = 12.0281059e9;
    MaserConfig {
        system: ThreeLevelSystem::from_signal_and_pump(f_signal, 31.312570e9).unwrap(),
        signal_mode: WgMode::new(f_signal, q_from_linewidth(f_signal, 199.0).unwrap(), 5e-6,
                                 Some(1.0)).unwrap(),
        temperature: 3.0,
        ion_density: 0.0,
        t1: 7e-3,
        t2: 80e-6,
        participation: 0.06295751677793947,
        constants: ModelConstants::default(),
        t1_table: None,
    }
}

/// Criterion 8: concentration inference inverts the power model and lands
/// in the expected band for the measured output.
#[test]
fn criterion_08_maser_inference() {
    let mut config = leonard_config();
    for density in [1e21, 3.7e22, 8.8e23] {
        config.ion_density = density;
        let p = output_power(&config, true).unwrap();
        assert!(p > 0.0);
        let est = infer_concentration(p, &config).unwrap();
        assert!(
            (est.ion_density - density).abs() <= 1e-9 * density,
            "round trip at {density}"
        );
    }

    let est = infer_concentration(dbm_to_watts(-47.0), &config).unwrap();
    assert!(
        est.ppb > 1.0 && est.ppb < 1000.0,
        "inferred {} ppb outside the expected band",
        est.ppb
    );

    let assay = Concentration::new(2.0, ConcUnit::Ppm).unwrap();
    let ratio = dark_matter_ratio(&assay, est.ppb).unwrap();
    assert!(ratio > 5.0, "dark-matter ratio {ratio}");
    pass(8, "inference inverts output power to 1e-9; -47 dBm maps inside 1-1000 ppb; ratio > 5");
}

/// Criterion 9: the ultraviolet delivery arithmetic.
#[test]
fn criterion_09_optics() {
    let uv = wgmaser::optics::UvFixture::embedded();
    let p = wgmaser::optics::delivered_power(&uv.path).unwrap();
    assert!((p - 1.63).abs() <= 0.01, "delivered {p} mW");
    let t = uv.path.transmission().unwrap();
    assert!((t - 0.759).abs() <= 0.002, "transmission {t}");
    assert_eq!(wgmaser::optics::fiber_loss(700.0, 1.2).unwrap(), 0.84);
    pass(9, "1.63 mW delivered, 0.759 transmission, 0.84 dB pipe loss");
}

/// Criterion 10: identical runs give byte-identical machine outputs.
#[test]
fn criterion_10_determinism() {
    let exe = env!("CARGO_BIN_EXE_wgmaser");
    let dir = tempfile::tempdir().unwrap();
    let run = |out: &std::path::Path, args: &[&str]| {
        let status = std::process::Command::new(exe)
            .args(args)
            .arg("--out")
            .arg(out)
            .status()
            .expect("spawn wgmaser");
        assert!(status.success());
    };
    for (args, files) in [
        (
            vec!["adev", "--fixture", "basile", "--tau", "1,10"],
            vec!["adev.csv", "report.txt"],
        ),
        (
            vec!["servo-sim", "--fixture", "basile", "--format", "json"],
            vec!["servo_trace.csv", "servo_sim.json", "report.txt"],
        ),
        (
            vec!["maser", "--fixture", "leonard", "--format", "json"],
            vec!["maser.json", "report.txt"],
        ),
    ] {
        let out_a = dir.path().join(format!("a_{}", args[0]));
        let out_b = dir.path().join(format!("b_{}", args[0]));
        run(&out_a, &args);
        run(&out_b, &args);
        for f in files {
            let a = std::fs::read(out_a.join(f)).unwrap();
            let b = std::fs::read(out_b.join(f)).unwrap();
            assert_eq!(a, b, "{} differs between runs for {:?}", f, args);
        }
    }
    pass(10, "adev, servo-sim and maser outputs byte-identical across runs");
}
