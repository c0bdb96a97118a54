use std::path::Path;

use serde::Serialize;
use serde_json::{json, Value};

use puc_core::circuit::{
    bvd_antiresonance, bvd_antiresonance_slope, bvd_impedance, find_antiresonance_numeric, leach_input_impedance,
    ImpedanceSpectrum,
};
use puc_core::lockin::{demod_gate, demodulate, design_lowpass, detect_tof, gate_average};
use puc_core::numeric::linear_grid;
use puc_core::sweep::{estimate_stream, CalibrationCurve, PressureTrace};
use puc_core::waveform::{make_burst, LinkChannel};

use super::{acquire, fit_configured_calibration, loads, scenario_for, Acquired};
use crate::config::Resolved;
use crate::output::{pf_tag, Sink, Table};
use crate::CliError;

fn impedance_table(spec: &ImpedanceSpectrum) -> Table {
    let re: Vec<f64> = spec.values.iter().map(|z| z.re).collect();
    let im: Vec<f64> = spec.values.iter().map(|z| z.im).collect();
    Table::from_columns(&["frequency_hz", "z_real_ohm", "z_imag_ohm"], &[&spec.freqs, &re, &im])
}

#[derive(Serialize)]
struct ImpedanceRow {
    c_load_pf: f64,
    f_a_hz: f64,
    slope_hz_per_pf: f64,
    f_a_bvd_grid_hz: Option<f64>,
    f_a_leach_grid_hz: Option<f64>,
}

pub fn impedance(r: &Resolved, sink: &mut Sink) -> Result<(), CliError> {
    let (start, stop, step) = r.impedance_grid;
    let grid = linear_grid(start, stop, step);
    let stack = &r.scenario.stack;
    let mut rows = Vec::new();
    for c in loads(r) {
        let load = r.base_load.with_c_load(c);
        let bvd = ImpedanceSpectrum::evaluate(&grid, |f| bvd_impedance(&r.bvd, &load, f))?;
        let leach = ImpedanceSpectrum::evaluate(&grid, |f| leach_input_impedance(stack, &load, f))?;
        let tag = pf_tag(c);
        sink.table(&format!("impedance_bvd_{tag}"), &impedance_table(&bvd))?;
        sink.table(&format!("impedance_leach_{tag}"), &impedance_table(&leach))?;
        rows.push(ImpedanceRow {
            c_load_pf: c * 1e12,
            f_a_hz: bvd_antiresonance(&r.bvd, &load),
            slope_hz_per_pf: bvd_antiresonance_slope(&r.bvd, &load) * 1e-12,
            f_a_bvd_grid_hz: find_antiresonance_numeric(&bvd).ok(),
            f_a_leach_grid_hz: find_antiresonance_numeric(&leach).ok(),
        });
    }
    sink.json("impedance_summary", &json!({ "bvd": r.bvd, "loads": rows }))
}

#[derive(Serialize)]
struct SweepRow {
    c_load_pf: f64,
    f_valley_hz: Option<f64>,
    valley_depth_db: Option<f64>,
    ambiguous: Option<bool>,
    tof_s: Option<f64>,
    distance_m: Option<f64>,
    pulse_count: usize,
    out_of_band: bool,
}

fn sweep_table(a: &Acquired) -> Table {
    Table::from_columns(
        &["frequency_hz", "amplitude_v", "smoothed"],
        &[&a.raw.freqs, &Acquired::volts(&a.raw), &Acquired::volts(&a.processed)],
    )
}

pub fn sweep(r: &Resolved, sink: &mut Sink) -> Result<(), CliError> {
    let mut rows = Vec::new();
    for (i, c) in loads(r).into_iter().enumerate() {
        let a = acquire(r, &scenario_for(r, c, i as u64))?;
        sink.table(&format!("sweep_{}", pf_tag(c)), &sweep_table(&a))?;
        rows.push(SweepRow {
            c_load_pf: c * 1e12,
            f_valley_hz: a.valley.map(|v| v.frequency),
            valley_depth_db: a.valley.map(|v| v.depth_db),
            ambiguous: a.valley.map(|v| v.ambiguous),
            tof_s: a.raw.meta.tof,
            distance_m: a.raw.meta.distance,
            pulse_count: a.raw.meta.pulse_count,
            out_of_band: a.raw.meta.out_of_band,
        });
    }
    sink.json("sweep_summary", &rows)
}

pub fn echo(r: &Resolved, sink: &mut Sink) -> Result<(), CliError> {
    let s = scenario_for(r, loads(r)[0], 0);
    let cfg = &r.sweep;
    let f = r.echo_frequency;
    let x = make_burst(f, cfg.burst_duration, cfg.amplitude, cfg.sample_rate, 0.0)?;
    let channel = LinkChannel::new(&s, cfg.sample_rate, x.duration())?;
    let trace = channel.echo(&x, 0)?;
    let lpf = design_lowpass(cfg.filter_order, cfg.filter_cutoff, cfg.sample_rate)?;
    let env = demodulate(&trace, f, &lpf)?;
    let (g0, g1) = demod_gate(channel.tof(), cfg.burst_duration, &lpf, cfg.gate_guard);
    let plateau = gate_average(&env, g0, g1)?;

    let times = |n: usize, t0: f64, fs: f64| -> Vec<f64> { (0..n).map(|i| t0 + i as f64 / fs).collect() };
    sink.table(
        "excitation",
        &Table::from_columns(&["time_s", "amplitude_v"], &[&times(x.len(), x.t0, x.sample_rate), &x.samples]),
    )?;
    sink.table(
        "echo",
        &Table::from_columns(
            &["time_s", "amplitude_v"],
            &[&times(trace.len(), trace.t0, trace.sample_rate), &trace.samples],
        ),
    )?;
    sink.table(
        "envelope",
        &Table::from_columns(
            &["time_s", "magnitude_v"],
            &[&times(env.magnitude.len(), env.t0, env.sample_rate), &env.magnitude],
        ),
    )?;
    sink.json(
        "filter",
        &json!({
            "filter": lpf,
            "gain_at_cutoff_db": lpf.gain_db(lpf.cutoff),
            "dc_group_delay_s": lpf.dc_group_delay(),
            "stable": lpf.is_stable(),
            "oscillator_hz": f,
            "gate_s": [g0, g1],
            "plateau_v": plateau,
            "tof_model_s": channel.tof(),
            "tof_detected_s": detect_tof(&trace, &x).ok(),
            "out_of_band": channel.out_of_band(&x),
        }),
    )
}

pub fn calibrate(r: &Resolved, sink: &mut Sink) -> Result<(), CliError> {
    let (curve, points) = fit_configured_calibration(r)?;
    sink.table("calibration_points", &points)?;
    sink.json("calibration", &curve)
}

/// Read `time_s,pressure_kpa` rows; `#` lines are comments.
pub fn read_pressure_trace(path: &Path) -> Result<PressureTrace, CliError> {
    let input = |m: String| CliError::Input(format!("{}: {m}", path.display()));
    let mut rdr = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| match e.kind() {
            csv::ErrorKind::Io(io) => CliError::Input(format!("{}: {io}", path.display())),
            _ => input(e.to_string()),
        })?;
    let headers = rdr.headers().map_err(|e| input(e.to_string()))?.clone();
    if headers.len() != 2 || &headers[0] != "time_s" || &headers[1] != "pressure_kpa" {
        return Err(input(format!(
            "expected header 'time_s,pressure_kpa', found '{}'",
            headers.iter().collect::<Vec<_>>().join(",")
        )));
    }
    let (mut times, mut pressures) = (Vec::new(), Vec::new());
    for rec in rdr.deserialize::<(f64, f64)>() {
        let (t, p) = rec.map_err(|e| input(e.to_string()))?;
        times.push(t);
        pressures.push(p);
    }
    PressureTrace::new(times, pressures).map_err(|e| input(e.to_string()))
}

/// Calibration JSON as written by `calibrate`, or a bare curve.
pub fn read_calibration(path: &Path) -> Result<CalibrationCurve, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    let mut doc: Value =
        serde_json::from_str(&text).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    if let Some(data) = doc.get_mut("data") {
        doc = data.take();
    }
    let curve: CalibrationCurve =
        serde_json::from_value(doc).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    curve
        .validate()
        .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    Ok(curve)
}

pub fn estimate(
    r: &Resolved,
    sink: &mut Sink,
    pressure: &Path,
    calibration: Option<&Path>,
) -> Result<(), CliError> {
    let trace = read_pressure_trace(pressure)?;
    let curve = match calibration {
        Some(p) => read_calibration(p)?,
        None => fit_configured_calibration(r)?.0,
    };
    let results = estimate_stream(&r.scenario, &r.sweep, &trace, &curve, &r.sensor, &r.stream)?;
    sink.json_lines("estimates", &results)
}
