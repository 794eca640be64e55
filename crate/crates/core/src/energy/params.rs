//! Device parameters and the closed-form energy budget of one power cycle.

use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const SHIPPED: &str = include_str!("../../calibration/wisp.params");

/// Electrical description of the device.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnergyParams {
    pub capacitance_f: f64,
    /// Booster turn-on voltage.
    pub v_on: f64,
    /// Brownout voltage.
    pub v_off: f64,
    /// Rectifier clamp.
    pub v_max: f64,
    pub p_load_w: f64,
    pub p_sleep_w: f64,
    /// Drain while the load is off.
    pub p_leak_w: f64,
    pub f_cpu_hz: f64,
}

const KEYS: [&str; 8] = ["capacitance_f", "v_on", "v_off", "v_max", "p_load_w", "p_sleep_w", "p_leak_w", "f_cpu_hz"];

impl EnergyParams {
    /// The calibration bundled with the crate.
    pub fn shipped() -> Self {
        Self::parse(SHIPPED).expect("bundled calibration parses")
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidArgument(format!("energy parameters: {m}")));
        let all = [
            self.capacitance_f,
            self.v_on,
            self.v_off,
            self.v_max,
            self.p_load_w,
            self.p_sleep_w,
            self.p_leak_w,
            self.f_cpu_hz,
        ];
        if all.iter().any(|v| !v.is_finite()) {
            return bad("values must be finite");
        }
        if self.capacitance_f <= 0.0 {
            return bad("capacitance must be positive");
        }
        if !(self.v_off > 0.0 && self.v_on >= self.v_off) {
            return bad("need v_on >= v_off > 0");
        }
        if self.v_max < self.v_on {
            return bad("need v_max >= v_on");
        }
        if !(self.p_load_w > self.p_sleep_w && self.p_sleep_w >= 0.0 && self.p_leak_w >= 0.0) {
            return bad("need p_load > p_sleep >= 0 and p_leak >= 0");
        }
        if self.f_cpu_hz <= 0.0 {
            return bad("clock must be positive");
        }
        Ok(())
    }

    /// Parses `key = value` lines. Every key must appear exactly once;
    /// `#` starts a comment.
    pub fn parse(text: &str) -> Result<Self> {
        let mut vals: [Option<f64>; 8] = [None; 8];
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let perr = |msg: String| Error::Parse { line: i + 1, msg };
            let (k, v) = line.split_once('=').ok_or_else(|| perr("expected key = value".into()))?;
            let (k, v) = (k.trim(), v.trim());
            let idx = KEYS.iter().position(|&x| x == k).ok_or_else(|| perr(format!("unknown key `{k}`")))?;
            if vals[idx].is_some() {
                return Err(perr(format!("duplicate key `{k}`")));
            }
            let x: f64 = v.parse().map_err(|_| perr(format!("`{v}` is not a number")))?;
            vals[idx] = Some(x);
        }
        if let Some(i) = vals.iter().position(Option::is_none) {
            return Err(Error::InvalidArgument(format!("energy parameters: missing key `{}`", KEYS[i])));
        }
        let v = vals.map(Option::unwrap);
        let p = EnergyParams {
            capacitance_f: v[0],
            v_on: v[1],
            v_off: v[2],
            v_max: v[3],
            p_load_w: v[4],
            p_sleep_w: v[5],
            p_leak_w: v[6],
            f_cpu_hz: v[7],
        };
        p.validate()?;
        Ok(p)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    pub fn to_file_string(&self) -> String {
        let v = [
            self.capacitance_f,
            self.v_on,
            self.v_off,
            self.v_max,
            self.p_load_w,
            self.p_sleep_w,
            self.p_leak_w,
            self.f_cpu_hz,
        ];
        let mut s = String::new();
        for (k, x) in KEYS.iter().zip(v) {
            let _ = writeln!(s, "{k} = {x:e}");
        }
        s
    }

    /// Converter efficiency at capacitor voltage `v`: the share of the
    /// stored energy above the brownout voltage.
    pub(crate) fn efficiency(&self, v: f64) -> f64 {
        if v <= self.v_off {
            0.0
        } else {
            1.0 - self.v_off / v
        }
    }
}

/// `C (V_on - V_off)^2 / 2`: energy the load can draw in one power cycle.
pub fn energy_per_ipc(params: &EnergyParams) -> f64 {
    let dv = params.v_on - params.v_off;
    0.5 * params.capacitance_f * dv * dv
}

/// `floor(E / P_load * f_cpu)`.
pub fn cycles_per_ipc(params: &EnergyParams) -> u64 {
    (energy_per_ipc(params) / params.p_load_w * params.f_cpu_hz).floor() as u64
}

/// Inverse-square falloff: `p_ref (d_ref / d)^2`.
pub fn distance_to_power(d_m: f64, p_ref_w: f64, d_ref_m: f64) -> Result<f64> {
    if !(d_m > 0.0 && d_m.is_finite()) {
        return Err(Error::InvalidArgument(format!("distance must be positive, got {d_m}")));
    }
    if !(d_ref_m > 0.0 && p_ref_w >= 0.0) {
        return Err(Error::InvalidArgument("reference distance must be positive and power non-negative".into()));
    }
    let r = d_ref_m / d_m;
    Ok(p_ref_w * r * r)
}
