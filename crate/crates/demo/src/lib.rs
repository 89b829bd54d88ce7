//! WebAssembly bindings for a static demo page. Every export takes plain
//! numbers and returns a JSON string; errors come back as JS exceptions.

use raimsim::dynamics::{self, build_level_scheme, EvolveOptions};
use raimsim::franckcondon::{all_spectra, build_overlap_tables, FockCutoff, QuadratureOptions};
use raimsim::modes::{normal_modes, Configuration, SystemGeometry};
use raimsim::scaling::{crit_map, CritRow, ScalingConstants};
use serde::Serialize;
use wasm_bindgen::prelude::*;

/// Upper bound on blockade duration, to keep the page responsive.
pub const MAX_TF_US: f64 = 20.0;

#[derive(Serialize)]
struct ModeRow {
    configuration: &'static str,
    frequencies_mhz: Vec<f64>,
    equilibrium_um: [f64; 4],
}

#[derive(Serialize)]
struct BlockadeTrace {
    t_us: Vec<f64>,
    gg: Vec<f64>,
    gr: Vec<f64>,
    rg: Vec<f64>,
    rr: Vec<f64>,
    states: usize,
}

fn json<T: Serialize>(v: &T) -> Result<String, String> {
    serde_json::to_string(v).map_err(|e| e.to_string())
}

/// n_crit (radial, axial) and the single-photon boundary versus Ω_rf.
pub fn crit_map_json(q: f64, m_ion_amu: f64, lo_mhz: f64, hi_mhz: f64, points: usize) -> Result<String, String> {
    if points > 2000 {
        return Err("at most 2000 points".into());
    }
    let rows: Vec<CritRow> = crit_map(&ScalingConstants::published(), q, m_ion_amu, lo_mhz, hi_mhz, points).map_err(|e| e.to_string())?;
    json(&rows)
}

fn geometry(omega_ion: f64, omega_tweezer: f64, omega_m: f64, d_um: f64) -> Result<SystemGeometry, String> {
    let g = SystemGeometry { omega_ion, omega_tweezer, omega_m, d: d_um, ..SystemGeometry::reference() };
    g.validate().map_err(|e| e.to_string())?;
    Ok(g)
}

/// Normal-mode frequencies of gg, gR, Rg and RR.
pub fn mode_spectra_json(omega_ion: f64, omega_tweezer: f64, omega_m: f64, d_um: f64) -> Result<String, String> {
    let g = geometry(omega_ion, omega_tweezer, omega_m, d_um)?;
    let rows: Result<Vec<ModeRow>, String> = Configuration::ALL
        .iter()
        .map(|&c| {
            let m = normal_modes(&g, c).map_err(|e| e.to_string())?;
            Ok(ModeRow { configuration: c.label(), frequencies_mhz: m.frequencies, equilibrium_um: m.equilibrium })
        })
        .collect();
    json(&rows?)
}

/// Square-pulse blockade populations on a small Fock space (two bus quanta,
/// no high-mode quanta), so the run takes about a second.
pub fn blockade_json(rabi_mhz: f64, tf_us: f64, k_per_um: f64) -> Result<String, String> {
    if !(tf_us > 0.0 && tf_us <= MAX_TF_US) {
        return Err(format!("duration must be in (0, {MAX_TF_US}] us"));
    }
    let g = SystemGeometry::reference();
    let spectra = all_spectra(&g).map_err(|e| e.to_string())?;
    let cutoff = FockCutoff { bus_total: 2, high_max: 0 };
    let opts = QuadratureOptions { order: 20, verify: false, ..Default::default() };
    let tables = build_overlap_tables(&g, &spectra, k_per_um, &cutoff, &opts).map_err(|e| e.to_string())?;
    let scheme = build_level_scheme(&spectra, &tables).map_err(|e| e.to_string())?;
    let evolve = EvolveOptions { record_every: 50, ..Default::default() };
    let t = dynamics::blockade(&scheme, rabi_mhz, tf_us, &evolve).map_err(|e| e.to_string())?;
    let col = |k: usize| t.populations.iter().map(|p| p[k]).collect::<Vec<f64>>();
    json(&BlockadeTrace { t_us: t.t.clone(), gg: col(0), gr: col(1), rg: col(2), rr: col(3), states: scheme.len() })
}

fn js(r: Result<String, String>) -> Result<String, JsValue> {
    r.map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen(js_name = critMap)]
pub fn crit_map_js(q: f64, m_ion_amu: f64, lo_mhz: f64, hi_mhz: f64, points: usize) -> Result<String, JsValue> {
    js(crit_map_json(q, m_ion_amu, lo_mhz, hi_mhz, points))
}

#[wasm_bindgen(js_name = modeSpectra)]
pub fn mode_spectra_js(omega_ion: f64, omega_tweezer: f64, omega_m: f64, d_um: f64) -> Result<String, JsValue> {
    js(mode_spectra_json(omega_ion, omega_tweezer, omega_m, d_um))
}

#[wasm_bindgen]
pub fn blockade(rabi_mhz: f64, tf_us: f64, k_per_um: f64) -> Result<String, JsValue> {
    js(blockade_json(rabi_mhz, tf_us, k_per_um))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(s: &str) -> serde_json::Value {
        serde_json::from_str(s).unwrap()
    }

    #[test]
    fn crit_map_is_monotone() {
        let v = parse(&crit_map_json(0.1, 9.012, 1.0, 1000.0, 20).unwrap());
        let rows = v.as_array().unwrap();
        assert_eq!(rows.len(), 20);
        let n = |i: usize| rows[i]["n_crit_rad"].as_f64().unwrap();
        assert!((1..20).all(|i| n(i) < n(i - 1)));
        assert!(crit_map_json(0.1, 9.012, 10.0, 1.0, 20).is_err());
    }

    #[test]
    fn reference_modes() {
        let v = parse(&mode_spectra_json(1.0, 0.2, 36.0, 1.735).unwrap());
        let gg = v[0]["frequencies_mhz"].as_array().unwrap();
        assert_eq!(v[0]["configuration"], "gg");
        assert!((gg[0].as_f64().unwrap() - 3f64.sqrt()).abs() < 1e-9);
        assert!(mode_spectra_json(1.0, 0.2, -1.0, 1.735).is_err());
    }

    #[test]
    fn blockade_conserves_probability() {
        let v = parse(&blockade_json(0.1, 1.0, 2.0 * std::f64::consts::PI / 0.297).unwrap());
        let last = v["t_us"].as_array().unwrap().len() - 1;
        let sum: f64 = ["gg", "gr", "rg", "rr"].iter().map(|k| v[k][last].as_f64().unwrap()).sum();
        assert!((sum - 1.0).abs() < 1e-9);
        assert!(blockade_json(0.1, 100.0, 1.0).is_err());
    }
}
