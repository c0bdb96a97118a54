use serde_json::json;

use puc_core::numeric::{mean, std_dev};
use puc_core::sweep::{estimate_stream, fit_calibration, sensor_capacitance, CalibrationKind, PressureTrace};
use puc_core::waveform::{LinkScenario, Reflector};

use super::{acquire, loads, scenario_for, slope, Acquired};
use crate::config::Resolved;
use crate::output::{pf_tag, Sink, Table};
use crate::CliError;

pub const FIGURES: [&str; 8] = ["fig3c", "fig3d", "fig3h", "fig3i", "fig3j", "fig4c", "fig4d", "fig4e"];

/// SNR used by the statistics figures when the config is noiseless.
const DEFAULT_SNR_DB: f64 = 20.0;
const FLAT_GAMMA: f64 = 0.9;

pub fn run(r: &Resolved, sink: &mut Sink, figure: &str, repeats: Option<usize>) -> Result<(), CliError> {
    if repeats == Some(0) {
        return Err(CliError::Input("--repeats must be >= 1".into()));
    }
    match figure {
        "fig3c" => fig3c(r, sink),
        "fig3d" => fig3d(r, sink),
        "fig3h" => fig3h(r, sink),
        "fig3i" => repeat_stats(r, sink, "fig3i", repeats.unwrap_or(50), true),
        "fig3j" => repeat_stats(r, sink, "fig3j", repeats.unwrap_or(100), false),
        "fig4c" => fig4c(r, sink, repeats.unwrap_or(40)),
        "fig4d" => fig4d(r, sink),
        "fig4e" => fig4e(r, sink),
        other => Err(CliError::Input(format!(
            "unknown figure '{other}' (expected one of {})",
            FIGURES.join(", ")
        ))),
    }
}

fn noisy(s: LinkScenario) -> LinkScenario {
    if s.noise.snr_db.is_some() {
        return s;
    }
    let seed = s.noise.seed;
    s.with_noise(Some(DEFAULT_SNR_DB), seed)
}

fn fig3c(r: &Resolved, sink: &mut Sink) -> Result<(), CliError> {
    let antenna = scenario_for(r, loads(r)[0], 0);
    let gamma = match r.scenario.reflector {
        Reflector::Constant { gamma } => gamma,
        Reflector::Antenna => FLAT_GAMMA,
    };
    let mut a_scn = antenna.clone();
    a_scn.reflector = Reflector::Antenna;
    let a = acquire(r, &a_scn)?;
    let b = acquire(r, &antenna.with_flat_reflector(gamma))?;
    sink.table(
        "fig3c_spectra",
        &Table::from_columns(
            &["frequency_hz", "antenna_v", "antenna_smoothed_v", "flat_v", "flat_smoothed_v"],
            &[
                &a.raw.freqs,
                &Acquired::volts(&a.raw),
                &Acquired::volts(&a.processed),
                &Acquired::volts(&b.raw),
                &Acquired::volts(&b.processed),
            ],
        ),
    )?;
    let antenna_depth = a.valley.map(|v| v.depth_db);
    let flat_ripple = b.processed.ripple_db();
    sink.json(
        "fig3c_stats",
        &json!({
            "antenna_f_valley_hz": a.valley.map(|v| v.frequency),
            "antenna_depth_db": antenna_depth,
            "flat_gamma": gamma,
            "flat_ripple_db": flat_ripple,
            "depth_delta_db": antenna_depth.map(|d| d - flat_ripple),
        }),
    )
}

fn fig3d(r: &Resolved, sink: &mut Sink) -> Result<(), CliError> {
    let durations = [2e-6, 4e-6, 8e-6, 12e-6];
    let scenario = scenario_for(r, loads(r)[0], 0);
    let mut columns = vec!["frequency_hz".to_string()];
    let mut data: Vec<Vec<f64>> = Vec::new();
    let mut depths = Vec::new();
    for d in durations {
        let mut rr = r.clone();
        rr.sweep.burst_duration = d;
        let a = acquire(&rr, &scenario)?;
        if data.is_empty() {
            data.push(a.raw.freqs.clone());
        }
        columns.push(format!("burst_{}us_smoothed_v", d * 1e6));
        data.push(Acquired::volts(&a.processed));
        depths.push(json!({
            "burst_duration_s": d,
            "depth_db": a.valley.map(|v| v.depth_db),
            "f_valley_hz": a.valley.map(|v| v.frequency),
        }));
    }
    let refs: Vec<&[f64]> = data.iter().map(|c| c.as_slice()).collect();
    sink.table("fig3d_spectra", &Table::from_columns(&columns, &refs))?;
    let vals: Vec<Option<f64>> = depths.iter().map(|d| d["depth_db"].as_f64()).collect();
    let non_decreasing = vals.iter().all(|v| v.is_some())
        && vals.windows(2).all(|w| w[1].unwrap_or(0.0) >= w[0].unwrap_or(0.0));
    sink.json("fig3d_stats", &json!({ "durations": depths, "non_decreasing": non_decreasing }))
}

fn fig3h(r: &Resolved, sink: &mut Sink) -> Result<(), CliError> {
    let mut columns = vec!["frequency_hz".to_string()];
    let mut data: Vec<Vec<f64>> = Vec::new();
    let mut rows = Vec::new();
    for (i, c) in loads(r).into_iter().enumerate() {
        let a = acquire(r, &scenario_for(r, c, i as u64))?;
        if data.is_empty() {
            data.push(a.raw.freqs.clone());
        }
        columns.push(format!("load_{}_smoothed_v", pf_tag(c)));
        data.push(Acquired::volts(&a.processed));
        rows.push(json!({
            "c_load_pf": c * 1e12,
            "f_valley_hz": a.valley.map(|v| v.frequency),
            "depth_db": a.valley.map(|v| v.depth_db),
        }));
    }
    let refs: Vec<&[f64]> = data.iter().map(|c| c.as_slice()).collect();
    sink.table("fig3h_spectra", &Table::from_columns(&columns, &refs))?;
    sink.json("fig3h_stats", &json!({ "loads": rows }))
}

/// Mean and spread of the valley over repeated noisy sweeps per load.
fn repeat_stats(r: &Resolved, sink: &mut Sink, name: &str, repeats: usize, fit: bool) -> Result<(), CliError> {
    let loads = loads(r);
    let mut table = Table::new(&["c_load_pf", "mean_f_valley_hz", "std_f_valley_hz", "n_valid"]);
    let mut means = Vec::new();
    for (i, &c) in loads.iter().enumerate() {
        let mut valleys = Vec::with_capacity(repeats);
        for k in 0..repeats {
            let s = noisy(scenario_for(r, c, (i * repeats + k) as u64));
            if let Some(v) = acquire(r, &s)?.valley {
                valleys.push(v.frequency);
            }
        }
        let (m, sd) = if valleys.is_empty() {
            (f64::NAN, f64::NAN)
        } else {
            (mean(&valleys), std_dev(&valleys))
        };
        table.push(vec![c * 1e12, m, sd, valleys.len() as f64]);
        means.push(m);
    }
    sink.table(&format!("{name}_valleys"), &table)?;
    let stds: Vec<f64> = table.rows.iter().map(|row| row[2]).filter(|v| v.is_finite()).collect();
    let max_std = stds.iter().cloned().fold(f64::NAN, f64::max);
    let mut stats = json!({
        "repeats": repeats,
        "mean_std_hz": if stds.is_empty() { None } else { Some(mean(&stds)) },
        "max_std_hz": max_std.is_finite().then_some(max_std),
        "max_std_within_2khz": max_std <= 2e3,
    });
    if fit {
        let points: Vec<(f64, f64)> = means
            .iter()
            .zip(&loads)
            .filter(|(m, _)| m.is_finite())
            .map(|(&m, &c)| (m, c * 1e12))
            .collect();
        let curve = fit_calibration(&points, r.calibration_order, CalibrationKind::CapacitancePf)?;
        // d f / d C at the lightest and heaviest load
        let end_slopes: Vec<f64> = [points[0].0, points[points.len() - 1].0]
            .iter()
            .map(|&f| (1.0 / curve.derivative(f)).abs())
            .collect();
        stats["calibration"] = serde_json::to_value(&curve).expect("curve serializes");
        stats["sensitivity_start_hz_per_pf"] = json!(end_slopes[0]);
        stats["sensitivity_end_hz_per_pf"] = json!(end_slopes[1]);
        stats["total_shift_hz"] = json!(points[0].0 - points[points.len() - 1].0);
    }
    sink.json(&format!("{name}_stats"), &stats)
}

fn fig4c(r: &Resolved, sink: &mut Sink, repeats: usize) -> Result<(), CliError> {
    let pressures = [0.0, 5.0, 10.0, 15.0];
    let mut columns = vec!["frequency_hz".to_string()];
    let mut data: Vec<Vec<f64>> = Vec::new();
    for (i, &p) in pressures.iter().enumerate() {
        let c = sensor_capacitance(p, &r.sensor)?;
        let mut sum: Option<Vec<f64>> = None;
        for k in 0..repeats {
            let a = acquire(r, &noisy(scenario_for(r, c, (i * repeats + k) as u64)))?;
            if data.is_empty() {
                data.push(a.raw.freqs.clone());
            }
            let v = Acquired::volts(&a.raw);
            sum = Some(match sum {
                None => v,
                Some(s) => s.iter().zip(&v).map(|(x, y)| x + y).collect(),
            });
        }
        columns.push(format!("p_{p}kpa_mean_v"));
        data.push(sum.unwrap_or_default().iter().map(|x| x / repeats as f64).collect());
    }
    let refs: Vec<&[f64]> = data.iter().map(|c| c.as_slice()).collect();
    sink.table("fig4c_spectra", &Table::from_columns(&columns, &refs))?;
    sink.json("fig4c_stats", &json!({ "pressures_kpa": pressures, "repeats": repeats }))
}

/// Valley per pressure on a 2.5 kPa grid over 0 to 20 kPa.
fn pressure_valleys(r: &Resolved) -> Result<(Vec<f64>, Vec<f64>, Vec<f64>), CliError> {
    let pressures: Vec<f64> = (0..=8).map(|i| i as f64 * 2.5).collect();
    let (mut caps, mut valleys) = (Vec::new(), Vec::new());
    for (i, &p) in pressures.iter().enumerate() {
        let c = sensor_capacitance(p, &r.sensor)?;
        let a = acquire(r, &scenario_for(r, c, i as u64))?;
        caps.push(c * 1e12);
        valleys.push(a.valley.map_or(f64::NAN, |v| v.frequency));
    }
    Ok((pressures, caps, valleys))
}

fn fig4d(r: &Resolved, sink: &mut Sink) -> Result<(), CliError> {
    let (p, c, f) = pressure_valleys(r)?;
    sink.table(
        "fig4d_valleys",
        &Table::from_columns(&["pressure_kpa", "c_load_pf", "f_valley_hz"], &[&p, &c, &f]),
    )?;
    let ok: Vec<(f64, f64)> = p.iter().cloned().zip(f.iter().cloned()).filter(|(_, f)| f.is_finite()).collect();
    let (px, fy): (Vec<f64>, Vec<f64>) = ok.into_iter().unzip();
    let s = (px.len() >= 2).then(|| slope(&px, &fy));
    sink.json(
        "fig4d_stats",
        &json!({
            "slope_khz_per_kpa": s.map(|v| v / 1e3),
            "points": px.len(),
        }),
    )
}

fn fig4e(r: &Resolved, sink: &mut Sink) -> Result<(), CliError> {
    let (p, _, f) = pressure_valleys(r)?;
    let points: Vec<(f64, f64)> = f.iter().cloned().zip(p.iter().cloned()).filter(|(f, _)| f.is_finite()).collect();
    let curve = fit_calibration(&points, r.calibration_order, CalibrationKind::PressureKpa)?;
    let period = 20.0;
    let (low, high) = (0.0, 10.0);
    let trace = PressureTrace::square_wave(low, high, period, 3, 0.5);
    let scenario = noisy(r.scenario.clone());
    let results = estimate_stream(&scenario, &r.sweep, &trace, &curve, &r.sensor, &r.stream)?;
    sink.json_lines("fig4e_stream", &results)?;

    let dt = 1.0 / r.stream.rate;
    let mut table = Table::new(&["t_s", "true_pressure_kpa", "estimated_pressure_kpa"]);
    for res in &results {
        table.push(vec![
            res.t_s,
            trace.value_at(res.t_s - dt),
            res.pressure_kpa.unwrap_or(f64::NAN),
        ]);
    }
    sink.table("fig4e_tracking", &table)?;

    let mid = 0.5 * (low + high);
    let edges = (trace.span() / (period / 2.0)).floor() as usize;
    let mut worst_lag: Option<usize> = Some(0);
    for edge in 1..=edges {
        let t_edge = edge as f64 * period / 2.0;
        let is_high = edge % 2 == 1;
        let lag = results
            .iter()
            .filter(|x| x.t_s > t_edge)
            .position(|x| x.valid && (x.pressure_kpa.unwrap_or(0.0) > mid) == is_high)
            .map(|i| i + 1);
        worst_lag = match (worst_lag, lag) {
            (Some(w), Some(l)) => Some(w.max(l)),
            _ => None,
        };
    }
    let valid = results.iter().filter(|x| x.valid).count();
    sink.json(
        "fig4e_stats",
        &json!({
            "ticks": results.len(),
            "valid_ticks": valid,
            "worst_lag_ticks": worst_lag,
            "square_wave_kpa": [low, high],
            "period_s": period,
            "calibration": curve,
        }),
    )
}
