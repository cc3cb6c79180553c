//! One function per subcommand: resolved parameters in, table out.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use eitcool_core::cooling::{ScanSettings, SigmaPlus};
use eitcool_core::ion_chain::{scaled_equilibrium, single_ion_eta, TransverseAxis};
use eitcool_core::spectroscopy::{fit_cooling_curve, fit_rabi, SidebandPair};
use eitcool_core::steady_state::{bright_resonance, default_delta0_grid};
use eitcool_core::{
    absorption_spectrum, analytic_rho_ee, cooling_bandwidth, cooling_dynamics, grid, lamb_dicke_factors,
    optimize_probe_detuning, phonon_limit, scan_cooling, transverse_modes, units, zigzag_margin, Beam, ScanCell,
    TrapConfig, TripodParams,
};
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::config::{key, optional, Key, Params};
use crate::output::{Cell, Table};
use crate::CliError;

/// Everything a command produces besides the wall time.
#[derive(Debug, Default)]
pub struct Outcome {
    pub table: Table,
    pub grid_specs: BTreeMap<String, Value>,
    pub summary: BTreeMap<String, Value>,
    /// Values that were derived from presets or defaults at run time.
    pub effective: BTreeMap<String, String>,
}

const ATOM_KEYS: &[Key] = &[
    key("preset", "design"),
    optional("omega_1_gamma"),
    optional("omega_1_mhz"),
    optional("omega_0_gamma"),
    optional("omega_0_mhz"),
    optional("omega_m1_gamma"),
    optional("omega_m1_mhz"),
    optional("delta_1_gamma"),
    optional("delta_1_mhz"),
    optional("delta_0_gamma"),
    optional("delta_0_mhz"),
    optional("delta_m1_gamma"),
    optional("delta_m1_mhz"),
    key("gamma_mhz", "19.6"),
    key("delta_b_mhz", "7.7"),
];

fn with_atom(extra: &[Key]) -> Vec<Key> {
    ATOM_KEYS.iter().chain(extra).copied().collect()
}

pub fn keys(command: &str) -> Vec<Key> {
    match command {
        "spectrum" => with_atom(&[optional("delta0_min_gamma"), optional("delta0_max_gamma"), key("points", "2001")]),
        "cooling-limit" => with_atom(&[
            optional("mode_freq_gamma"),
            optional("mode_freq_mhz"),
            key("omega_min_gamma", "0.02"),
            key("omega_max_gamma", "0.5"),
            key("points", "241"),
        ]),
        "dynamics" => with_atom(&[
            optional("mode_freq_gamma"),
            key("mode_freq_mhz", "4.45"),
            optional("eta"),
            key("nbar0", "5"),
            key("t_max_us", "500"),
            key("points", "201"),
        ]),
        "scan" => with_atom(&[
            key("omega_min_gamma", "0.05"),
            key("omega_max_gamma", "0.35"),
            key("omega_points", "30"),
            key("rabi_min_gamma", "1"),
            key("rabi_max_gamma", "3"),
            key("rabi_points", "30"),
            key("optimize_probe", "true"),
            optional("reference_mode_gamma"),
            key("reference_mode_mhz", "4.45"),
            optional("window_min_gamma"),
            optional("window_max_gamma"),
            key("probe_resolution", "41"),
            optional("sigma_plus_ratio"),
        ]),
        "optimize" => with_atom(&[
            optional("mode_freq_gamma"),
            key("mode_freq_mhz", "4.45"),
            optional("window_min_gamma"),
            optional("window_max_gamma"),
            key("resolution", "41"),
        ]),
        "chain-modes" => vec![
            key("n_ions", "1"),
            key("omega_ax_mhz", "0.3"),
            key("omega_alpha_mhz", "4.45"),
            key("omega_beta_mhz", "4.30"),
            key("beam", "eit"),
            key("beam_angle_deg", "40"),
            key("mass_u", "171"),
        ],
        "thermometry" | "rabi-fit" | "cooling-fit" => vec![optional("data")],
        _ => Vec::new(),
    }
}

fn atom_params(p: &Params, out: &mut Outcome) -> Result<TripodParams, CliError> {
    let gamma_mhz = p.f64("gamma_mhz")?;
    if !(gamma_mhz > 0.0) {
        return Err(CliError::Config("`gamma_mhz` must be > 0".into()));
    }
    let mut t = match p.str("preset")? {
        "design" => TripodParams::design_point(),
        "single-ion" => TripodParams::single_ion_run(),
        "lambda" => TripodParams { omega_m1: 0.0, ..TripodParams::design_point() },
        s => return Err(CliError::Config(format!("unknown preset `{s}` (design, single-ion, lambda)"))),
    };
    t.gamma = units::mhz_to_angular(gamma_mhz);
    t.delta_b = units::mhz_to_angular(p.f64("delta_b_mhz")?);
    for (name, field) in [
        ("omega_1", &mut t.omega_1),
        ("omega_0", &mut t.omega_0),
        ("omega_m1", &mut t.omega_m1),
        ("delta_1", &mut t.delta_1),
        ("delta_0", &mut t.delta_0),
        ("delta_m1", &mut t.delta_m1),
    ] {
        if let Some(v) = p.freq_gamma_opt(name, gamma_mhz)? {
            *field = v;
        }
        out.effective.insert(format!("{name}_gamma"), crate::output::fmt_g(*field));
    }
    t.validate()?;
    let mismatch = t.zeeman_consistency();
    if mismatch.abs() > 0.05 * t.delta_b_over_gamma() {
        log::warn!("Δ₋₁ − Δ₀ differs from the Zeeman splitting by {mismatch:.3} Γ");
    }
    Ok(t)
}

fn gamma_mhz(p: &Params) -> Result<f64, CliError> {
    p.f64("gamma_mhz")
}

fn count(p: &Params, name: &str) -> Result<usize, CliError> {
    let n = p.usize(name)?;
    if n == 0 {
        return Err(CliError::Config(format!("`{name}` must be ≥ 1")));
    }
    Ok(n)
}

fn axis(start: f64, stop: f64, n: usize, name: &str, specs: &mut BTreeMap<String, Value>) -> Result<Vec<f64>, CliError> {
    let a = grid::Axis::new(start, stop, n)?;
    specs.insert(name.to_string(), json!({ "start": start, "stop": stop, "count": n }));
    Ok(a.values())
}

pub fn spectrum(p: &Params) -> Result<Outcome, CliError> {
    let mut out = Outcome::default();
    let t = atom_params(p, &mut out)?;
    let default = default_delta0_grid(&t);
    let lo = p.opt_f64("delta0_min_gamma")?.unwrap_or(default[0]);
    let hi = p.opt_f64("delta0_max_gamma")?.unwrap_or(*default.last().unwrap());
    let g = axis(lo, hi, count(p, "points")?, "delta_0_gamma", &mut out.grid_specs)?;
    let curve = absorption_spectrum(&t, &g)?;

    out.table = Table::new(&["delta_0_gamma", "rho_ee", "rho_ee_closed_form", "rho_ee_weak_probe"]);
    for (d, r) in g.iter().zip(&curve.rho_ee) {
        let q = t.with_delta_0(*d);
        let full = analytic_rho_ee(&q, false).map(|a| a.value).unwrap_or(f64::NAN);
        let weak = analytic_rho_ee(&q, true).map(|a| a.value).unwrap_or(f64::NAN);
        out.table.push(vec![(*d).into(), r.unwrap_or(f64::NAN).into(), full.into(), weak.into()]);
    }
    for (i, e) in &curve.failures {
        log::warn!("Δ₀ = {}: {e}", g[*i]);
    }
    out.summary.insert("failed_points".into(), json!(curve.failures.len()));
    out.summary.insert("bright_resonance_gamma".into(), json!(bright_resonance(&t)));
    if let Ok(w) = cooling_bandwidth(&t, true) {
        out.summary.insert("cooling_bandwidth_gamma".into(), json!(w));
    }
    Ok(out)
}

fn limit_row(t: &TripodParams, w: f64, gamma_mhz: f64) -> Result<Vec<Cell>, CliError> {
    let r = phonon_limit(t, w)?;
    Ok(vec![
        w.into(),
        (w * gamma_mhz).into(),
        r.nbar.into(),
        if r.is_cooling() { "true" } else { "false" }.into(),
        r.rho_ee_carrier.into(),
        r.rho_ee_red.into(),
        r.rho_ee_blue.into(),
    ])
}

pub fn cooling_limit(p: &Params) -> Result<Outcome, CliError> {
    let mut out = Outcome::default();
    let t = atom_params(p, &mut out)?;
    let gm = gamma_mhz(p)?;
    let freqs = match p.freq_gamma_opt("mode_freq", gm)? {
        Some(w) => vec![w],
        None => axis(
            p.f64("omega_min_gamma")?,
            p.f64("omega_max_gamma")?,
            count(p, "points")?,
            "mode_freq_gamma",
            &mut out.grid_specs,
        )?,
    };
    out.table = Table::new(&[
        "mode_freq_gamma",
        "mode_freq_mhz",
        "nbar",
        "cooling",
        "rho_ee_carrier",
        "rho_ee_red",
        "rho_ee_blue",
    ]);
    let rows: Vec<Vec<Cell>> = freqs.par_iter().map(|&w| limit_row(&t, w, gm)).collect::<Result<_, _>>()?;
    rows.into_iter().for_each(|r| out.table.push(r));
    Ok(out)
}

pub fn dynamics(p: &Params) -> Result<Outcome, CliError> {
    let mut out = Outcome::default();
    let t = atom_params(p, &mut out)?;
    let gm = gamma_mhz(p)?;
    let w = p.freq_gamma("mode_freq", gm)?;
    let eta = match p.opt_f64("eta")? {
        Some(e) => e,
        None => single_ion_eta(
            units::wavenumber(units::WAVELENGTH_EIT),
            units::YB171_MASS,
            units::mhz_to_angular(w * gm),
        ),
    };
    out.effective.insert("eta".into(), crate::output::fmt_g(eta));
    let t_max_us = p.f64("t_max_us")?;
    let times_us = axis(0.0, t_max_us, count(p, "points")?, "t_us", &mut out.grid_specs)?;
    let times: Vec<f64> = times_us.iter().map(|t| t * 1e-6).collect();
    let d = cooling_dynamics(&t, eta, w, p.f64("nbar0")?, &times)?;
    out.table = Table::new(&["t_us", "nbar"]);
    for (tu, n) in times_us.iter().zip(&d.nbar) {
        out.table.push(vec![(*tu).into(), (*n).into()]);
    }
    out.summary.insert("rate_per_s".into(), json!(d.rate));
    out.summary.insert("tau_us".into(), json!(d.time_constant() * 1e6));
    out.summary.insert("nbar_ss".into(), json!(d.limit.nbar));
    out.summary.insert("eta".into(), json!(eta));
    Ok(out)
}

fn probe_window(p: &Params, t: &TripodParams) -> Result<(f64, f64), CliError> {
    let lo = p.opt_f64("window_min_gamma")?.unwrap_or(t.delta_1 - 0.1);
    let hi = p.opt_f64("window_max_gamma")?.unwrap_or(t.delta_1 + 0.3);
    Ok((lo, hi))
}

pub fn scan(p: &Params) -> Result<Outcome, CliError> {
    let mut out = Outcome::default();
    let t = atom_params(p, &mut out)?;
    let gm = gamma_mhz(p)?;
    let omegas = axis(
        p.f64("omega_min_gamma")?,
        p.f64("omega_max_gamma")?,
        count(p, "omega_points")?,
        "mode_freq_gamma",
        &mut out.grid_specs,
    )?;
    let rabis = axis(
        p.f64("rabi_min_gamma")?,
        p.f64("rabi_max_gamma")?,
        count(p, "rabi_points")?,
        "omega_1_gamma",
        &mut out.grid_specs,
    )?;
    let settings = ScanSettings {
        optimize_probe: p.bool("optimize_probe")?,
        reference_mode: p.freq_gamma("reference_mode", gm)?,
        probe_window: probe_window(p, &t)?,
        probe_resolution: count(p, "probe_resolution")?,
        sigma_plus: match p.opt_f64("sigma_plus_ratio")? {
            Some(r) => SigmaPlus::Proportional(r),
            None => SigmaPlus::Fixed,
        },
    };
    let g = scan_cooling(&t, &omegas, &rabis, &settings)?;
    out.table = Table::new(&["omega_1_gamma", "mode_freq_gamma", "delta_0_gamma", "nbar", "cooling"]);
    let mut not_cooling = 0;
    for (r, row) in g.values.iter().enumerate() {
        for (c, cell) in row.iter().enumerate() {
            let (n, flag) = match cell {
                ScanCell::Cooling(n) => (*n, "true"),
                ScanCell::NotCooling => (f64::INFINITY, "false"),
                ScanCell::Failed(e) => {
                    log::warn!("Ω₁ = {}, ω = {}: {e}", g.rabi_axis[r], g.omega_axis[c]);
                    (f64::NAN, "failed")
                }
            };
            if flag != "true" {
                not_cooling += 1;
            }
            out.table.push(vec![
                g.rabi_axis[r].into(),
                g.omega_axis[c].into(),
                g.probe_detuning[r].into(),
                n.into(),
                flag.into(),
            ]);
        }
    }
    out.summary.insert("non_cooling_cells".into(), json!(not_cooling));
    Ok(out)
}

pub fn optimize(p: &Params) -> Result<Outcome, CliError> {
    let mut out = Outcome::default();
    let t = atom_params(p, &mut out)?;
    let w = p.freq_gamma("mode_freq", gamma_mhz(p)?)?;
    let window = probe_window(p, &t)?;
    let resolution = count(p, "resolution")?;
    out.grid_specs.insert("window_gamma".into(), json!([window.0, window.1]));
    let opt = optimize_probe_detuning(&t, w, window, resolution)?;
    out.table = Table::new(&["mode_freq_gamma", "delta_0_gamma", "nbar"]);
    out.table.push(vec![w.into(), opt.delta_0.into(), opt.nbar.into()]);
    Ok(out)
}

pub fn chain_modes(p: &Params) -> Result<Outcome, CliError> {
    let mut out = Outcome::default();
    let cfg = TrapConfig {
        n_ions: count(p, "n_ions")?,
        omega_ax: units::mhz_to_angular(p.f64("omega_ax_mhz")?),
        omega_alpha: units::mhz_to_angular(p.f64("omega_alpha_mhz")?),
        omega_beta: units::mhz_to_angular(p.f64("omega_beta_mhz")?),
        ion_mass: p.f64("mass_u")? * units::ATOMIC_MASS_UNIT,
        beam_angle: p.f64("beam_angle_deg")?.to_radians(),
        ..TrapConfig::default()
    };
    let beam = match p.str("beam")? {
        "eit" => Beam::Eit,
        "raman" => Beam::Raman,
        s => return Err(CliError::Config(format!("unknown beam `{s}` (eit, raman)"))),
    };
    let margin = zigzag_margin(&cfg)?;
    out.summary.insert("zigzag_margin".into(), json!(margin));
    out.summary.insert("length_scale_um".into(), json!(cfg.length_scale() * 1e6));
    let u = scaled_equilibrium(cfg.n_ions)?;
    let span = u.last().unwrap() - u[0];
    out.summary.insert("chain_length_um".into(), json!(span * cfg.length_scale() * 1e6));
    let spec = transverse_modes(&cfg)?;
    let etas = lamb_dicke_factors(&spec, &cfg, beam);
    out.table = Table::new(&["branch", "mode", "frequency_mhz", "eta_rms", "eta_max"]);
    for (b, eta) in spec.branches().into_iter().zip(&etas) {
        let name = match b.axis {
            TransverseAxis::Alpha => "alpha",
            TransverseAxis::Beta => "beta",
        };
        for (m, w) in b.frequencies.iter().enumerate() {
            let col = eta.column(m);
            let rms = (col.iter().map(|e| e * e).sum::<f64>() / cfg.n_ions as f64).sqrt();
            let max = col.iter().fold(0.0f64, |a, e| a.max(e.abs()));
            out.table.push(vec![name.into(), m.into(), units::angular_to_mhz(*w).into(), rms.into(), max.into()]);
        }
    }
    Ok(out)
}

/// Numeric columns from a whitespace- or comma-separated file. `#` starts a
/// comment; a first line that does not parse is taken as a header.
pub fn read_columns(path: &Path, min: usize, max: usize) -> Result<Vec<Vec<f64>>, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    let mut rows = Vec::new();
    let mut first = true;
    for (n, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(|c: char| c == ',' || c.is_whitespace()).filter(|s| !s.is_empty()).collect();
        let parsed: Result<Vec<f64>, _> = fields.iter().map(|s| s.parse::<f64>()).collect();
        match parsed {
            Ok(v) => {
                if v.len() < min || v.len() > max {
                    return Err(CliError::Config(format!(
                        "{} line {}: expected {min}–{max} columns, got {}",
                        path.display(),
                        n + 1,
                        v.len()
                    )));
                }
                if rows.first().is_some_and(|r: &Vec<f64>| r.len() != v.len()) {
                    return Err(CliError::Config(format!("{} line {}: column count changed", path.display(), n + 1)));
                }
                rows.push(v);
            }
            Err(_) if first => {}
            Err(_) => return Err(CliError::Config(format!("{} line {}: not numeric", path.display(), n + 1))),
        }
        first = false;
    }
    Ok(rows)
}

fn data_path(p: &Params) -> Result<&Path, CliError> {
    p.str("data").map(Path::new)
}

pub fn thermometry(p: &Params) -> Result<Outcome, CliError> {
    let mut out = Outcome::default();
    let rows = read_columns(data_path(p)?, 2, 4)?;
    out.table = Table::new(&["row", "ratio", "nbar", "nbar_err"]);
    for (i, r) in rows.iter().enumerate() {
        let pair = SidebandPair {
            mode_freq: 0.0,
            p_lower: r[0],
            p_upper: r[1],
            sigma_lower: r.get(2).copied().unwrap_or(0.0),
            sigma_upper: r.get(3).copied().unwrap_or(0.0),
        };
        let th = pair.thermometry()?;
        out.table.push(vec![i.into(), th.ratio.into(), th.nbar.into(), th.nbar_err.into()]);
    }
    Ok(out)
}

type Series = (Vec<f64>, Vec<f64>, Option<Vec<f64>>);

fn series(p: &Params) -> Result<Series, CliError> {
    let rows = read_columns(data_path(p)?, 2, 3)?;
    let t = rows.iter().map(|r| r[0]).collect();
    let y = rows.iter().map(|r| r[1]).collect();
    let s = (rows.first().map(|r| r.len()) == Some(3)).then(|| rows.iter().map(|r| r[2]).collect());
    Ok((t, y, s))
}

pub fn rabi_fit(p: &Params) -> Result<Outcome, CliError> {
    let mut out = Outcome::default();
    let (t, y, s) = series(p)?;
    let f = fit_rabi(&t, &y, s.as_deref())?;
    out.table = Table::new(&["a", "a_err", "b_rad_per_us", "b_err", "p0", "p0_err", "residual_rms"]);
    out.table.push(vec![
        f.a.into(),
        f.a_err.into(),
        f.b.into(),
        f.b_err.into(),
        f.p0.into(),
        f.p0_err.into(),
        f.residual_rms.into(),
    ]);
    out.summary.insert("sum_eta4_nbar2".into(), json!(2.0 * f.a));
    Ok(out)
}

pub fn cooling_fit(p: &Params) -> Result<Outcome, CliError> {
    let mut out = Outcome::default();
    let (t, y, s) = series(p)?;
    let f = fit_cooling_curve(&t, &y, s.as_deref())?;
    out.table = Table::new(&["nbar0", "nbar_ss", "tau_us", "initial_rate_per_us", "degenerate", "residual_rms"]);
    out.table.push(vec![
        f.nbar0.into(),
        f.nbar_ss.into(),
        f.tau.unwrap_or(f64::NAN).into(),
        f.initial_rate.unwrap_or(f64::NAN).into(),
        if f.degenerate { "true" } else { "false" }.into(),
        f.residual_rms.into(),
    ]);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    #[test]
    fn header_and_comments_are_skipped() {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        writeln!(f, "t_us,p\n# note\n0,0.1\n1 0.2\n").unwrap();
        let rows = read_columns(f.path(), 2, 3).unwrap();
        assert_eq!(rows, vec![vec![0.0, 0.1], vec![1.0, 0.2]]);
    }

    #[test]
    fn ragged_data_is_rejected() {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        writeln!(f, "0 0.1\n1 0.2 0.01\n").unwrap();
        assert!(read_columns(f.path(), 2, 3).is_err());
    }

    #[test]
    fn every_command_has_keys() {
        for c in crate::COMMANDS {
            assert!(!keys(c).is_empty(), "{c}");
        }
    }
}
