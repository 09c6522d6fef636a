//! Scenario-driven command line for the whispering-gallery maser toolkit.
//!
//! Every subcommand loads a scenario (a shipped fixture or a user file),
//! runs one analysis chain and writes a human report plus machine-readable
//! CSV/JSON into the output directory. Identical scenarios and flags give
//! byte-identical machine outputs; `--stamp` adds a wall-clock line to the
//! report only.
//!
//! Exit codes: 0 success, 2 validation error, 3 numeric failure.

mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use output::{Format, Report};
use wgmaser::cavity::{field_amplitude, rabi_frequency, RabiConvention};
use wgmaser::ensemble::{classify_mode_pair, homogeneous_linewidth, Catalog, CatalogProperty,
                        SaturationState};
use wgmaser::maser::{boltzmann_populations, dark_matter_ratio, infer_concentration,
                     masing_range_check, saturated_inversion, threshold_inversion_density,
                     RangeFlag};
use wgmaser::pumploop::{chain_gain, dc_power_budget, select_pump_modes};
use wgmaser::scenario::{builtin_bom, builtin_resonator, Scenario};
use wgmaser::servo::{pound_error, simulate};
use wgmaser::stability::{adev, dominant_peak, load_frequency_log, temperature_series,
                         thermal_adev_pipeline, FracFreqSeries};
use wgmaser::units::{dbm_to_watts, watts_to_dbm};
use wgmaser::{Error, Result};

#[derive(Parser)]
#[command(name = "wgmaser", version, about = "Whispering-gallery sapphire maser design toolkit")]
struct Cli {
    /// Shipped fixture scenario (leonard | basile)
    #[arg(long, global = true)]
    fixture: Option<String>,
    /// Scenario file (unit-suffixed TOML)
    #[arg(long, global = true)]
    scenario: Option<PathBuf>,
    /// Output directory
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,
    /// Machine-readable output format
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Stamp the report with the wall-clock time
    #[arg(long, global = true)]
    stamp: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Spin-ensemble broadening and mode-competition chain
    Linewidth,
    /// Pump field and Rabi frequency in both conventions
    Rabi,
    /// Maser threshold, output power and concentration inference
    Maser,
    /// Pump-loop gain ledger, DC budget and mode selection
    LoopBudget {
        /// Bill of materials: shipped name or CSV path
        #[arg(long)]
        bom: Option<String>,
    },
    /// Closed-loop Pound lock run under the thermal disturbance
    ServoSim,
    /// Allan deviation table from the thermal pipeline or an external log
    Adev {
        /// Averaging times in seconds, comma separated
        #[arg(long, value_delimiter = ',')]
        tau: Option<Vec<f64>>,
        /// External two-column time,frequency CSV log
        #[arg(long)]
        input: Option<PathBuf>,
    },
    /// Ultraviolet delivery budget
    Uv,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::Numeric(_) => ExitCode::from(3),
                _ => ExitCode::from(2),
            }
        }
    }
}

fn load_scenario(cli: &Cli) -> Result<Scenario> {
    match (&cli.fixture, &cli.scenario) {
        (Some(_), Some(_)) => Err(Error::Parse(
            "give either --fixture or --scenario, not both".into(),
        )),
        (Some(name), None) => Scenario::builtin(name),
        (None, Some(path)) => Scenario::from_file(path),
        (None, None) => Scenario::builtin("basile"),
    }
}

fn run(cli: Cli) -> Result<()> {
    let scenario = load_scenario(&cli)?;
    std::fs::create_dir_all(&cli.out)?;
    for w in scenario.relaxation()?.ordering_warnings() {
        eprintln!("warning: {w}");
    }
    match &cli.command {
        Command::Linewidth => run_linewidth(&scenario, &cli),
        Command::Rabi => run_rabi(&scenario, &cli),
        Command::Maser => run_maser(&scenario, &cli),
        Command::LoopBudget { bom } => run_loop_budget(&scenario, bom.as_deref(), &cli),
        Command::ServoSim => run_servo_sim(&scenario, &cli),
        Command::Adev { tau, input } => run_adev(&scenario, tau.clone(), input.as_deref(), &cli),
        Command::Uv => run_uv(&scenario, &cli),
    }
}

fn push_row(rows: &mut Vec<Vec<String>>, quantity: &str, value: f64, unit: &str, tag: &str) {
    rows.push(vec![
        quantity.to_string(),
        value.to_string(),
        unit.to_string(),
        tag.to_string(),
    ]);
}

fn run_linewidth(sc: &Scenario, cli: &Cli) -> Result<()> {
    let mut report = Report::new(format!("linewidth report — scenario: {}", sc.name));
    let mut rows = Vec::new();

    let f_hom = homogeneous_linewidth(sc.ensemble.t2)?;
    let f_inhom = sc.f_inhom()?;
    report.kv(
        "homogeneous linewidth 1/(pi T2)",
        format!("{f_hom:.4} Hz (T2 = {:e} s)", sc.ensemble.t2),
        "scenario:ensemble.t2",
    );
    push_row(&mut rows, "homogeneous_linewidth", f_hom, "Hz", "scenario:ensemble.t2");
    report.kv(
        "inhomogeneous linewidth 1/(pi T2*)",
        format!("{f_inhom:.4e} Hz (T2* = {:e} s)", sc.ensemble.t2_star),
        "scenario:ensemble.t2_star",
    );
    push_row(&mut rows, "inhomogeneous_linewidth", f_inhom, "Hz", "scenario:ensemble.t2_star");
    report.kv(
        "configured low-power homogeneous linewidth",
        format!("{} Hz", sc.ensemble.f_hom),
        "scenario:ensemble.f_hom",
    );

    let participation = sc.participation()?;
    report.kv(
        "participation fraction",
        format!("{participation:.6}"),
        "scenario:ensemble.t_d",
    );
    push_row(&mut rows, "participation_fraction", participation, "", "scenario:ensemble.t_d");

    let sat = sc.saturation_state()?;
    report.kv(
        "pump-drive saturation S",
        format!("{:.4} (chi = {:.6e} Hz, SI convention)", sat.s, sat.chi),
        "scenario:cavity",
    );
    push_row(&mut rows, "saturation_s", sat.s, "", "scenario:cavity");
    let delta_f_eff = sc.delta_f_eff()?;
    report.kv(
        "intensity-broadened linewidth",
        format!(
            "{delta_f_eff:.6e} Hz (multiplier {})",
            sc.ensemble.broadening_multiplier
        ),
        "scenario:ensemble.broadening_multiplier",
    );
    push_row(&mut rows, "delta_f_eff", delta_f_eff, "Hz", "scenario:ensemble");

    report.blank();
    for (sep, label) in [(8e6, "8 MHz"), (10e3, "10 kHz")] {
        let relation = classify_mode_pair(sep, delta_f_eff)?;
        report.line(format!("mode pair {label} apart: {relation}"));
        push_row(&mut rows, &format!("classify_{label}"), sep, "Hz", &relation.to_string());
    }
    if let Some(measured) = sc.resonator.doublet_splitting_measured() {
        let relation = classify_mode_pair(measured, delta_f_eff)?;
        report.line(format!(
            "doublet splitting {measured} Hz: {relation} [{}]",
            sc.resonator.provenance
        ));
        if let Some((quoted, m)) = sc.resonator.doublet_splitting_inconsistency() {
            report.line(format!(
                "note: quoted doublet splitting {quoted} Hz disagrees with the \
                 listed mode frequencies ({m} Hz); both retained"
            ));
        }
    }

    report.write(&cli.out, cli.stamp)?;
    output::write_table(
        &cli.out,
        "linewidth",
        cli.format,
        &["quantity", "value", "unit", "tag"],
        &rows,
    )?;
    Ok(())
}

fn run_rabi(sc: &Scenario, cli: &Cli) -> Result<()> {
    let mut report = Report::new(format!("rabi report — scenario: {}", sc.name));
    let mut rows = Vec::new();

    let mode = sc.pump_mode()?;
    let tr = sc.pump_transition()?;
    let field = field_amplitude(&mode, sc.cavity.pump_power)?;
    report.kv(
        "pump drive",
        format!(
            "{:.3e} W into Q = {:.3e}, V_eff = {:.3e} m3 at {} Hz",
            sc.cavity.pump_power, mode.q_loaded, mode.v_eff, mode.f0
        ),
        &sc.resonator.provenance,
    );
    report.kv("field H", format!("{:.6e} A/m", field.h), "scenario:cavity");
    report.kv("field B", format!("{:.6e} T", field.b), "scenario:cavity");
    push_row(&mut rows, "field_h", field.h, "A/m", "scenario:cavity");
    push_row(&mut rows, "field_b", field.b, "T", "scenario:cavity");

    let chi_si = rabi_frequency(&tr, &field, RabiConvention::SiTesla);
    let chi_lit = rabi_frequency(&tr, &field, RabiConvention::PaperLiteral);
    report.kv("rabi frequency (SI_Tesla, default)", format!("{chi_si:.6e} Hz"), "");
    report.kv("rabi frequency (PaperLiteral)", format!("{chi_lit:.6e} Hz"), "");
    push_row(&mut rows, "rabi_si_tesla", chi_si, "Hz", "");
    push_row(&mut rows, "rabi_paper_literal", chi_lit, "Hz", "");
    report.line(
        "note: PaperLiteral inserts H (A/m) into the per-tesla gyromagnetic factor; \
         the THz-scale figure is not dimensionally consistent and SI_Tesla is the default",
    );

    report.blank();
    let s_config = SaturationState::evaluate(chi_si, sc.ensemble.t1, sc.ensemble.t2)?;
    report.kv(
        "degree of saturation S (scenario T1, T2)",
        format!("{:.4}", s_config.s),
        "scenario:ensemble",
    );
    push_row(&mut rows, "saturation_s", s_config.s, "", "scenario:ensemble");
    let catalog = Catalog::embedded();
    if let Some(entry) = catalog.query(CatalogProperty::SqrtT1T2, None, None).first() {
        let s_bistab = chi_si * entry.value;
        report.kv(
            "degree of saturation S (bistability sqrt(T1 T2))",
            format!("{s_bistab:.4}"),
            &format!("catalog:{}", entry.source),
        );
        push_row(&mut rows, "saturation_s_bistability", s_bistab, "",
                 &format!("catalog:{}", entry.source));
    }

    report.write(&cli.out, cli.stamp)?;
    output::write_table(
        &cli.out,
        "rabi",
        cli.format,
        &["quantity", "value", "unit", "tag"],
        &rows,
    )?;
    Ok(())
}

fn run_maser(sc: &Scenario, cli: &Cli) -> Result<()> {
    let mut report = Report::new(format!("maser report — scenario: {}", sc.name));
    let mut rows = Vec::new();

    let base = sc.maser_config()?;
    report.kv(
        "model constants",
        format!(
            "threshold_constant = {}, signal_amplitude = {}, participation = {:.6}, \
             T1 = {:e} s, T2 = {:e} s",
            base.constants.threshold_constant,
            base.constants.signal_amplitude,
            base.participation,
            base.t1,
            base.t2
        ),
        "scenario:maser",
    );
    let (n1, n2, n3) = boltzmann_populations(&base.system, base.temperature)?;
    let dn = saturated_inversion(&base.system, base.temperature)?;
    report.kv(
        "thermal populations (n1, n2, n3)",
        format!("({n1:.6}, {n2:.6}, {n3:.6}) at {} K", base.temperature),
        "scenario:maser.temperature",
    );
    report.kv("saturated per-ion inversion", format!("{dn:.6e}"), "");
    push_row(&mut rows, "saturated_inversion", dn, "", "");

    let n_th = threshold_inversion_density(
        &base.signal_mode,
        base.t1,
        base.t2,
        base.system.f_signal,
        &base.constants,
    )?;
    report.kv(
        "threshold inverted-ion density",
        format!("{n_th:.6e} /m3 (Q = {:.4e})", base.signal_mode.q_loaded),
        &sc.resonator.provenance,
    );
    push_row(&mut rows, "threshold_inversion_density", n_th, "/m3", &sc.resonator.provenance);

    report.blank();
    let mut first_inferred_ppb = None;
    for (idx, &dbm) in sc.resonator.output_powers_dbm.iter().enumerate() {
        let f_signal = sc.resonator.signal_freqs[idx];
        let mut config = base.clone();
        config.system =
            wgmaser::maser::ThreeLevelSystem::from_signal_and_pump(f_signal, sc.resonator.pump_freq)?;
        config.signal_mode = wgmaser::cavity::WgMode::new(
            f_signal,
            sc.resonator.signal_q(idx)?,
            sc.cavity.v_eff,
            Some(sc.servo.beta),
        )?;
        let p_out = dbm_to_watts(dbm);
        let est = infer_concentration(p_out, &config)?;
        if first_inferred_ppb.is_none() {
            first_inferred_ppb = Some(est.ppb);
        }
        report.kv(
            &format!("signal mode {idx} ({f_signal} Hz)"),
            format!(
                "measured {dbm} dBm -> inferred concentration {:.4} ppb ({:.4e} ions/m3){}",
                est.ppb,
                est.ion_density,
                if est.upper_bound { " [upper bound]" } else { "" }
            ),
            &sc.resonator.provenance,
        );
        push_row(&mut rows, &format!("inferred_ppb_mode{idx}"), est.ppb, "ppb",
                 &sc.resonator.provenance);
    }

    if let Some(ppb) = first_inferred_ppb {
        let ratio = dark_matter_ratio(&sc.maser.assay, ppb)?;
        report.kv(
            "dark-matter ratio (assay / ESR-inferred)",
            format!("{ratio:.4} (assay {})", sc.maser.assay),
            "scenario:maser.assay",
        );
        push_row(&mut rows, "dark_matter_ratio", ratio, "", "scenario:maser.assay");

        let mut config = base.clone();
        config.ion_density = ppb * 1e-9 * wgmaser::units::consts::AL_SITE_DENSITY;
        let range = masing_range_check(&config, 2.0, 40.0)?;
        let flag = match range.flag {
            RangeFlag::Cutoff => "cutoff",
            RangeFlag::MasesThroughout => "mases throughout band",
            RangeFlag::NoMasing => "no masing in band",
        };
        report.kv(
            "masing range check (2 K .. 40 K)",
            format!("{:.2} K ({flag})", range.temperature),
            "",
        );
        push_row(&mut rows, "masing_range_k", range.temperature, "K", flag);

        // round-trip audit of the inference
        let p_check = wgmaser::maser::output_power(&config, true)?;
        report.kv(
            "model audit",
            format!(
                "output_power(inferred density) = {:.4} dBm against measured {} dBm",
                watts_to_dbm(p_check),
                sc.resonator.output_powers_dbm[0]
            ),
            "",
        );
    }

    report.write(&cli.out, cli.stamp)?;
    output::write_table(
        &cli.out,
        "maser",
        cli.format,
        &["quantity", "value", "unit", "tag"],
        &rows,
    )?;
    Ok(())
}

fn run_loop_budget(sc: &Scenario, bom_override: Option<&str>, cli: &Cli) -> Result<()> {
    let (chain, bom_name) = match bom_override {
        None => (sc.bom.clone(), sc.bom_name.clone()),
        Some(name) if name.contains('/') || name.ends_with(".csv") => {
            let text = std::fs::read_to_string(name)?;
            (wgmaser::pumploop::SignalChain::from_csv_str(&text)?, name.to_string())
        }
        Some(name) => (builtin_bom(name)?, name.to_string()),
    };
    let f_pump = sc.resonator.pump_freq;

    let mut report = Report::new(format!(
        "pump-loop budget — scenario: {}, bom: {bom_name}",
        sc.name
    ));
    let mut rows = Vec::new();
    for e in &chain.elements {
        let gain = e.gain_at(f_pump)?;
        let (volts, amps, watts) = match e.component.dc_power {
            Some(dc) => (dc.volts.to_string(), dc.amps.to_string(), (dc.volts * dc.amps).to_string()),
            None => (String::new(), String::new(), String::new()),
        };
        report.line(format!(
            "{:>9.4} dB  {}{}",
            gain,
            e.component.name,
            e.component
                .dc_power
                .map(|dc| format!(" ({} V, {} A)", dc.volts, dc.amps))
                .unwrap_or_default()
        ));
        rows.push(vec![
            e.component.name.clone(),
            gain.to_string(),
            volts,
            amps,
            watts,
        ]);
    }
    report.blank();
    let total = chain_gain(&chain, f_pump)?;
    let dc = dc_power_budget(&chain);
    report.kv(
        "net chain gain at pump",
        format!("{total:.4} dB at {f_pump} Hz"),
        &sc.resonator.provenance,
    );
    report.kv("dc power budget", format!("{dc} W"), &format!("bom:{bom_name}"));

    // which shipped pump modes clear the oscillation threshold
    let mut candidates: Vec<f64> = ["leonard", "basile"]
        .iter()
        .filter_map(|n| builtin_resonator(n).ok())
        .map(|r| r.pump_freq)
        .collect();
    candidates.sort_by(|a, b| a.partial_cmp(b).expect("finite"));
    let picked = select_pump_modes(&candidates, &chain, sc.oscillation_threshold_db)?;
    report.blank();
    report.kv(
        "oscillation threshold",
        format!("{} dB", sc.oscillation_threshold_db),
        "scenario:pumploop",
    );
    for c in &candidates {
        match picked.iter().find(|m| m.f == *c) {
            Some(m) => report.line(format!(
                "candidate {c} Hz: selected (net gain {:.4} dB)",
                m.gain_db
            )),
            None => report.line(format!(
                "candidate {c} Hz: rejected (net gain {:.4} dB; retune the filter \
                 center in a custom bom to pass it)",
                chain_gain(&chain, *c)?
            )),
        }
    }

    report.write(&cli.out, cli.stamp)?;
    output::write_table(
        &cli.out,
        "loop_budget",
        cli.format,
        &["name", "gain_db_at_pump", "volts", "amps", "dc_w"],
        &rows,
    )?;
    Ok(())
}

fn run_servo_sim(sc: &Scenario, cli: &Cli) -> Result<()> {
    let model = sc.servo_resonator()?;
    let cfg = sc.servo.config;
    let curve = sc.thermal_curve()?;
    let yoyo = sc.yoyo()?;
    let duration = sc.servo.duration;
    let mut temps = temperature_series(&yoyo, duration, 1.0 / cfg.sample_rate)?;
    if let Some(tc) = sc.stability.can_lowpass {
        temps = wgmaser::stability::first_order_lowpass(&temps, tc)?;
    }
    let trace = simulate(&model, &cfg, &curve, &temps, duration)?;

    // discriminator characterization around the nominal resonance
    let lw = model.linewidth();
    let h = lw / 100.0;
    let slope = (pound_error(&model, &cfg, model.f_r + h)?
        - pound_error(&model, &cfg, model.f_r - h)?)
        / (2.0 * h);
    let loop_rate = cfg.integrator_gain * slope.abs() * cfg.hz_per_volt();

    let mut report = Report::new(format!("servo run — scenario: {}", sc.name));
    report.kv(
        "resonator",
        format!("f_r = {} Hz, Q = {:.4e}, beta = {}", model.f_r, model.q_loaded, model.beta),
        &sc.resonator.provenance,
    );
    report.kv("discriminator slope", format!("{slope:.6e} V/Hz"), "scenario:servo");
    report.kv("loop rate", format!("{loop_rate:.4} 1/s"), "scenario:servo");
    report.kv(
        "disturbance",
        format!(
            "{} K peak at {} Hz around {} K setpoint",
            yoyo.amplitude, yoyo.cycle_freq, yoyo.setpoint
        ),
        "scenario:stability",
    );
    report.kv(
        "lock",
        match trace.lock_time {
            Some(t) if trace.locked => format!("locked from {t:.4} s"),
            _ => "not locked within the run".to_string(),
        },
        "",
    );

    // spectral view of the error signal over the trailing window
    let window = duration.min(30.0).min(duration / 2.0);
    let skip = trace.error_v.len() - (window * cfg.sample_rate).round() as usize;
    if let Some(peak) = dominant_peak(&trace.error_v[skip..], cfg.sample_rate) {
        report.kv(
            "dominant error peak",
            format!(
                "{:.4} Hz (snr {:.1} dB over the final {window} s)",
                peak.freq, peak.snr_db
            ),
            "",
        );
    }

    let rows: Vec<Vec<String>> = trace
        .time
        .iter()
        .zip(&trace.error_v)
        .zip(&trace.loop_freq)
        .zip(&trace.temperature)
        .map(|(((t, e), f), k)| {
            vec![t.to_string(), e.to_string(), f.to_string(), k.to_string()]
        })
        .collect();
    output::write_csv(
        &cli.out.join("servo_trace.csv"),
        &["time_s", "error_v", "loop_freq_hz", "temperature_k"],
        &rows,
    )?;
    if cli.format == Format::Json {
        let summary = serde_json::json!({
            "locked": trace.locked,
            "lock_time_s": trace.lock_time,
            "slope_v_per_hz": slope,
            "loop_rate_per_s": loop_rate,
            "samples": trace.time.len(),
        });
        output::write_json(&cli.out.join("servo_sim.json"), &summary)?;
    }
    report.write(&cli.out, cli.stamp)?;
    Ok(())
}

fn run_adev(
    sc: &Scenario,
    tau_override: Option<Vec<f64>>,
    input: Option<&std::path::Path>,
    cli: &Cli,
) -> Result<()> {
    let taus = tau_override.unwrap_or_else(|| sc.stability.taus.clone());
    if taus.is_empty() {
        return Err(Error::Parse("no tau values requested".into()));
    }
    let mut report = Report::new(format!("allan deviation — scenario: {}", sc.name));
    let f_nominal = sc.resonator.signal_freqs[0];

    let table: Vec<(f64, f64)> = match input {
        Some(path) => {
            let text = std::fs::read_to_string(path)?;
            let series = load_frequency_log(&text, f_nominal)?;
            report.kv(
                "input",
                format!(
                    "{} ({} samples at {} s against f_nominal = {f_nominal} Hz)",
                    path.display(),
                    series.y.len(),
                    series.tau0
                ),
                "",
            );
            let series = FracFreqSeries::new(series.tau0, series.y)?;
            taus.iter()
                .map(|&tau| adev(&series, tau).map(|s| (tau, s)))
                .collect::<Result<Vec<_>>>()?
        }
        None => {
            let curve = sc.thermal_curve()?;
            let yoyo = sc.yoyo()?;
            report.kv(
                "thermal pipeline",
                format!(
                    "setpoint {} K, yo-yo {} K peak at {} Hz, curvature {} Hz/K2 \
                     around {} K, f_nominal = {f_nominal} Hz",
                    yoyo.setpoint,
                    yoyo.amplitude,
                    yoyo.cycle_freq,
                    curve.curvature,
                    curve.t_turnover
                ),
                "scenario:stability",
            );
            match sc.stability.can_lowpass {
                None => thermal_adev_pipeline(
                    &curve,
                    &yoyo,
                    f_nominal,
                    sc.stability.duration,
                    sc.stability.tau0,
                    &taus,
                )?,
                Some(tc) => {
                    // lag the sensed wobble through the can-to-crystal
                    // pole before the turnover curve
                    report.kv("can-to-crystal lag", format!("{tc} s"), "scenario:stability");
                    let raw = temperature_series(
                        &yoyo,
                        sc.stability.duration,
                        sc.stability.tau0,
                    )?;
                    let lagged = wgmaser::stability::first_order_lowpass(&raw, tc)?;
                    let mut y = Vec::with_capacity(lagged.kelvin.len());
                    for &t in &lagged.kelvin {
                        let f = wgmaser::stability::frequency_at_temperature(&curve, t)?;
                        y.push((f - f_nominal) / f_nominal);
                    }
                    let series = FracFreqSeries::new(sc.stability.tau0, y)?;
                    taus.iter()
                        .map(|&tau| adev(&series, tau).map(|s| (tau, s)))
                        .collect::<Result<Vec<_>>>()?
                }
            }
        }
    };

    report.blank();
    for &(tau, sigma) in &table {
        report.line(format!("sigma_y({tau} s) = {sigma:.6e}"));
    }
    report.line(
        "note: the thermal path is the only modeled contribution; measured \
         stability is dominated by vibration, which is out of model",
    );

    let rows: Vec<Vec<String>> = table
        .iter()
        .map(|&(tau, sigma)| vec![tau.to_string(), sigma.to_string()])
        .collect();
    output::write_table(&cli.out, "adev", cli.format, &["tau_s", "adev"], &rows)?;
    report.write(&cli.out, cli.stamp)?;
    Ok(())
}

fn run_uv(sc: &Scenario, cli: &Cli) -> Result<()> {
    let uv = &sc.uv;
    let mut report = Report::new(format!("ultraviolet delivery — scenario: {}", sc.name));
    let mut rows = Vec::new();

    let fresh = uv.path.source_intensity;
    let aged = wgmaser::optics::aged_intensity(fresh, 2000.0)?;
    report.kv(
        "source intensity (fresh)",
        format!("{fresh} mW/cm2"),
        &uv.path_provenance,
    );
    report.kv(
        "source intensity (2000 h)",
        format!("{aged} mW/cm2 (worked estimate rounds this to 3)"),
        &uv.path_provenance,
    );
    push_row(&mut rows, "aged_intensity_2000h", aged, "mW/cm2", &uv.path_provenance);

    let t = uv.path.transmission()?;
    report.kv(
        "path transmission",
        format!(
            "{t:.6} ({} surfaces at {}, {} mm bulk at {}/mm)",
            uv.path.surfaces, uv.path.surface_loss, uv.path.bulk_path_mm, uv.path.bulk_loss_per_mm
        ),
        &uv.path_provenance,
    );
    push_row(&mut rows, "transmission", t, "", &uv.path_provenance);

    let delivered = wgmaser::optics::delivered_power(&uv.path)?;
    report.kv(
        "delivered 254 nm power",
        format!(
            "{delivered:.4} mW through a {} cm aperture",
            uv.path.aperture_diameter_cm
        ),
        &uv.path_provenance,
    );
    push_row(&mut rows, "delivered_power", delivered, "mW", &uv.path_provenance);

    let loss = wgmaser::optics::fiber_loss(uv.pipe_attenuation, uv.pipe_length)?;
    let through = wgmaser::units::db_to_power_ratio(-loss);
    report.kv(
        "385 nm light-pipe loss",
        format!(
            "{loss} dB over {} m at {} dB/km ({:.4} transmitted)",
            uv.pipe_length, uv.pipe_attenuation, through
        ),
        &uv.pipe_provenance,
    );
    push_row(&mut rows, "light_pipe_loss", loss, "dB", &uv.pipe_provenance);

    report.blank();
    for e in &uv.elements {
        report.line(format!("[{}] {} — {}", e.key, e.function, e.detail));
    }

    report.write(&cli.out, cli.stamp)?;
    output::write_table(
        &cli.out,
        "uv",
        cli.format,
        &["quantity", "value", "unit", "tag"],
        &rows,
    )?;
    Ok(())
}
