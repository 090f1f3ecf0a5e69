//! CSV and JSON emission. Numbers are written with 17 significant digits
//! so re-parsing is bit-exact; non-finite values become the string `inf`.

use std::fmt::Write as _;

use num_complex::Complex64;
use serde_json::{json, Value};

use crate::bands::{BandStructure, Regime};
use crate::capacitance::CapacitanceMatrix;
use crate::hill::FloquetSpectrum;

/// 17 significant digits, or `inf` for any non-finite value.
pub fn fmt_num(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        "inf".to_string()
    }
}

/// JSON number, or the string `"inf"` for non-finite values.
pub fn num(x: f64) -> Value {
    if x.is_finite() {
        json!(x)
    } else {
        json!("inf")
    }
}

fn opt(x: Option<f64>) -> Value {
    x.map_or(Value::Null, num)
}

fn row(out: &mut String, fields: &[String]) {
    out.push_str(&fields.join(","));
    out.push('\n');
}

pub fn band_columns(regime: Regime) -> Vec<&'static str> {
    let mut c = vec!["path_parameter", "alpha_x", "alpha_y", "band_index", "re_omega", "im_omega"];
    if regime == Regime::Resonator {
        c.push("ep_condition");
    }
    c
}

/// One row per (sample, band), bands numbered from 1 in stored order.
pub fn bands_csv(bs: &BandStructure) -> String {
    let mut out = String::new();
    row(&mut out, &band_columns(bs.regime).iter().map(|s| s.to_string()).collect::<Vec<_>>());
    for s in &bs.samples {
        for (b, w) in s.omegas.iter().enumerate() {
            let mut f = vec![
                fmt_num(s.path_parameter),
                fmt_num(s.alpha[0]),
                fmt_num(s.alpha[1]),
                (b + 1).to_string(),
                fmt_num(w.re),
                fmt_num(w.im),
            ];
            if bs.regime == Regime::Resonator {
                f.push(fmt_num(s.ep_condition.unwrap_or(f64::INFINITY)));
            }
            row(&mut out, &f);
        }
    }
    out
}

pub fn bands_records(bs: &BandStructure) -> Value {
    let mut rows = Vec::new();
    for s in &bs.samples {
        for (b, w) in s.omegas.iter().enumerate() {
            let mut r = json!({
                "path_parameter": num(s.path_parameter),
                "alpha_x": num(s.alpha[0]),
                "alpha_y": num(s.alpha[1]),
                "band_index": b + 1,
                "re_omega": num(w.re),
                "im_omega": num(w.im),
                "regime": bs.regime.name(),
                "label": s.label,
                "refined": s.refined,
                "capacitance_error": num(s.capacitance_error),
            });
            if bs.regime == Regime::Resonator {
                r["ep_condition"] = opt(s.ep_condition);
                r["det_defect"] = opt(s.det_defect);
            }
            rows.push(r);
        }
    }
    Value::Array(rows)
}

pub fn capacitance_csv(caps: &[(f64, CapacitanceMatrix)]) -> String {
    let mut out = String::new();
    row(
        &mut out,
        &["path_parameter", "alpha_x", "alpha_y", "row", "col", "re_c", "im_c"].map(String::from),
    );
    for (s, c) in caps {
        for i in 0..c.len() {
            for j in 0..c.len() {
                let z = c.entries[(i, j)];
                row(
                    &mut out,
                    &[
                        fmt_num(*s),
                        fmt_num(c.alpha.x),
                        fmt_num(c.alpha.y),
                        (i + 1).to_string(),
                        (j + 1).to_string(),
                        fmt_num(z.re),
                        fmt_num(z.im),
                    ],
                );
            }
        }
    }
    out
}

pub fn capacitance_records(caps: &[(f64, CapacitanceMatrix)]) -> Value {
    let mut rows = Vec::new();
    for (s, c) in caps {
        for i in 0..c.len() {
            for j in 0..c.len() {
                let z = c.entries[(i, j)];
                rows.push(json!({
                    "path_parameter": num(*s),
                    "alpha_x": num(c.alpha.x),
                    "alpha_y": num(c.alpha.y),
                    "row": i + 1,
                    "col": j + 1,
                    "re_c": num(z.re),
                    "im_c": num(z.im),
                }));
            }
        }
    }
    Value::Array(rows)
}

pub fn finite_csv(sp: &FloquetSpectrum) -> String {
    let mut out = String::new();
    row(&mut out, &["index", "re_omega", "im_omega", "re_multiplier", "im_multiplier"].map(String::from));
    for (i, (w, m)) in sp.exponents.iter().zip(&sp.multipliers).enumerate() {
        row(&mut out, &[(i + 1).to_string(), fmt_num(w.re), fmt_num(w.im), fmt_num(m.re), fmt_num(m.im)]);
    }
    out
}

pub fn finite_records(sp: &FloquetSpectrum) -> Value {
    Value::Array(
        sp.exponents
            .iter()
            .zip(&sp.multipliers)
            .enumerate()
            .map(|(i, (w, m))| {
                json!({
                    "index": i + 1,
                    "re_omega": num(w.re),
                    "im_omega": num(w.im),
                    "re_multiplier": num(m.re),
                    "im_multiplier": num(m.im),
                })
            })
            .collect(),
    )
}

/// Stability-chart grid (a, q, ν); `nu` is None where the solver failed.
pub fn chart_csv(points: &[(f64, f64, Option<Complex64>)]) -> String {
    let mut out = String::new();
    row(&mut out, &["a", "q", "re_nu", "im_nu"].map(String::from));
    for &(a, q, nu) in points {
        let (re, im) = nu.map_or((f64::NAN, f64::NAN), |z| (z.re, z.im));
        row(&mut out, &[fmt_num(a), fmt_num(q), fmt_num(re), fmt_num(im)]);
    }
    out
}

pub fn chart_records(points: &[(f64, f64, Option<Complex64>)]) -> Value {
    Value::Array(
        points
            .iter()
            .map(|&(a, q, nu)| {
                json!({
                    "a": num(a),
                    "q": num(q),
                    "re_nu": nu.map_or(Value::Null, |z| num(z.re)),
                    "im_nu": nu.map_or(Value::Null, |z| num(z.im)),
                })
            })
            .collect(),
    )
}

/// Minimal reader for the CSV written here: header plus rows of fields.
pub fn read_csv(text: &str) -> (Vec<String>, Vec<Vec<String>>) {
    let mut lines = text.lines();
    let header = lines.next().map(|h| h.split(',').map(String::from).collect()).unwrap_or_default();
    let rows = lines.filter(|l| !l.is_empty()).map(|l| l.split(',').map(String::from).collect()).collect();
    (header, rows)
}

/// Parses a numeric CSV field, accepting the `inf` sentinel.
pub fn parse_num(s: &str) -> Option<f64> {
    if s == "inf" {
        Some(f64::INFINITY)
    } else {
        s.parse().ok()
    }
}

pub fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("json values serialize");
    let _ = writeln!(s);
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seventeen_digits_round_trip() {
        for x in [0.1, 1.0 / 3.0, -2.5e-300, 6.02214076e23, f64::MIN_POSITIVE] {
            let s = fmt_num(x);
            assert_eq!(s.parse::<f64>().unwrap().to_bits(), x.to_bits(), "{s}");
        }
        assert_eq!(fmt_num(f64::INFINITY), "inf");
        assert_eq!(parse_num("inf"), Some(f64::INFINITY));
    }
}
