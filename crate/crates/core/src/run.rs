//! Command dispatch shared by the `capband` binary and the examples.

use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::bands::{
    detect_dirac, detect_exceptional_points, detect_kgap, sweep_finite, sweep_resonator_modulated, sweep_static,
    sweep_uniform, BandError, BandStructure, Regime,
};
use crate::capacitance::{capacitance_matrix, CapacitanceError};
use crate::config::{emit_config, ConfigError, OutputFormat, RegimeName, RunConfig};
use crate::io;
use crate::mathieu::{mathieu_char_exponent, MathieuParams};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Capacitance,
    StaticBands,
    UniformBands,
    ModulatedBands,
    Finite,
    MathieuChart,
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Capacitance => "capacitance",
            Command::StaticBands => "static-bands",
            Command::UniformBands => "uniform-bands",
            Command::ModulatedBands => "modulated-bands",
            Command::Finite => "finite",
            Command::MathieuChart => "mathieu-chart",
        }
    }
}

#[derive(Debug, Error)]
pub enum RunError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Band(#[from] BandError),
    #[error(transparent)]
    Capacitance(#[from] CapacitanceError),
}

impl RunError {
    pub fn kind(&self) -> &'static str {
        match self {
            RunError::Config(ConfigError::Schema { .. }) => "schema",
            RunError::Config(ConfigError::Range { .. }) => "range",
            RunError::Band(_) => "band",
            RunError::Capacitance(_) => "capacitance",
        }
    }
}

/// Result of one command: the CSV table, the same records as JSON values
/// and a report with diagnostics and detector output.
#[derive(Debug, Clone)]
pub struct RunOutput {
    pub csv: String,
    pub records: Value,
    pub report: Value,
    pub bands: Option<BandStructure>,
}

impl RunOutput {
    /// Contents of the result file. Wall time is left out so identical
    /// configurations give identical bytes.
    pub fn render(&self, format: OutputFormat) -> String {
        match format {
            OutputFormat::Csv => self.csv.clone(),
            OutputFormat::Json => {
                let mut diagnostics = self.report.clone();
                if let Some(m) = diagnostics.as_object_mut() {
                    m.remove("wall_time_s");
                }
                io::pretty(&json!({ "records": self.records, "diagnostics": diagnostics }))
            }
        }
    }
}

/// SHA-256 of the canonical configuration text.
pub fn config_hash(config: &RunConfig) -> String {
    hex::encode(Sha256::digest(emit_config(config).as_bytes()))
}

fn band_report(bs: &BandStructure, config: &RunConfig) -> Result<Value, RunError> {
    let n = &config.numerics;
    let mut detections = Vec::new();
    if bs.regime != Regime::Static {
        detections.extend(detect_kgap(bs, n.im_tol));
    }
    if bs.regime == Regime::Resonator {
        detections.extend(detect_exceptional_points(bs, n.cond_threshold, n.im_tol));
    }
    for d in &n.dirac {
        detections.push(detect_dirac(bs, &d.point, (d.bands[0], d.bands[1]), &config.dirac_settings())?);
    }
    Ok(json!({
        "regime": bs.regime.name(),
        "omega": bs.omega,
        "samples": bs.samples.len(),
        "bands": bs.band_count(),
        "max_imag": io::num(bs.max_imag()),
        "provenance": bs.provenance,
        "continuity_failures": bs.continuity_failures,
        "detections": serde_json::to_value(&detections).expect("reports serialize"),
    }))
}

fn bands_output(mut bs: BandStructure, config: &RunConfig, hash: &str) -> Result<RunOutput, RunError> {
    bs.provenance.config_hash = Some(hash.to_string());
    Ok(RunOutput { csv: io::bands_csv(&bs), records: io::bands_records(&bs), report: band_report(&bs, config)?, bands: Some(bs) })
}

/// Runs `command` on a validated configuration. The report carries the
/// configuration hash and, under `wall_time_s`, the elapsed time.
pub fn run_command(config: &RunConfig, command: Command) -> Result<RunOutput, RunError> {
    let start = Instant::now();
    let hash = config_hash(config);
    let mut out = match command {
        Command::Capacitance => {
            let spec = config.lattice_spec()?;
            let array = config.array()?;
            let path = config.path(&spec)?;
            let settings = config.multipole();
            let caps = path
                .samples()
                .par_iter()
                .map(|p| capacitance_matrix(&array, &spec, p.alpha(), &settings).map(|c| (p.path_parameter, c)))
                .collect::<Result<Vec<_>, _>>()?;
            let diag: Vec<Value> = caps
                .iter()
                .map(|(s, c)| json!({ "path_parameter": s, "diagnostics": c.diagnostics, "hermitian_defect": c.hermitian_defect() }))
                .collect();
            RunOutput {
                csv: io::capacitance_csv(&caps),
                records: io::capacitance_records(&caps),
                report: json!({ "samples": diag }),
                bands: None,
            }
        }
        Command::StaticBands => {
            let spec = config.lattice_spec()?;
            let bs = sweep_static(&config.array()?, &spec, &config.path(&spec)?, &config.sweep_settings(), config.modulation.omega)?;
            bands_output(bs, config, &hash)?
        }
        Command::UniformBands => {
            require(config, RegimeName::Uniform)?;
            let spec = config.lattice_spec()?;
            let bs = sweep_uniform(
                &config.array()?,
                &spec,
                &config.path(&spec)?,
                &config.uniform_law()?,
                config.modulation.omega.unwrap_or_default(),
                config.modulation.eps,
                &config.sweep_settings(),
            )?;
            bands_output(bs, config, &hash)?
        }
        Command::ModulatedBands => {
            require(config, RegimeName::Resonator)?;
            let spec = config.lattice_spec()?;
            let array = config.array()?;
            let profile = config.profile(array.len())?;
            let bs = sweep_resonator_modulated(&array, &spec, &config.path(&spec)?, &profile, &config.sweep_settings())?;
            bands_output(bs, config, &hash)?
        }
        Command::Finite => {
            let (c, vols, modulation) = config.finite_problem()?;
            let sp = sweep_finite(&c, &modulation, &vols, &config.material(), config.numerics.ode_tolerance)?;
            RunOutput {
                csv: io::finite_csv(&sp),
                records: io::finite_records(&sp),
                report: json!({
                    "ep_condition": io::num(sp.ep_condition),
                    "max_imag": io::num(sp.max_imag()),
                    "ode_tolerance": config.numerics.ode_tolerance,
                }),
                bands: None,
            }
        }
        Command::MathieuChart => {
            let mb = config.mathieu.ok_or_else(|| ConfigError::Range {
                path: "mathieu".into(),
                value: "missing".into(),
                reason: "required by mathieu-chart".into(),
            })?;
            let grid: Vec<(f64, f64)> =
                mb.a.values().into_iter().flat_map(|a| mb.q.values().into_iter().map(move |q| (a, q))).collect();
            let points: Vec<_> = grid
                .par_iter()
                .map(|&(a, q)| (a, q, mathieu_char_exponent(MathieuParams { a, q }, mb.method).ok()))
                .collect();
            let failed = points.iter().filter(|p| p.2.is_none()).count();
            RunOutput {
                csv: io::chart_csv(&points),
                records: io::chart_records(&points),
                report: json!({ "points": points.len(), "failed": failed, "method": mb.method }),
                bands: None,
            }
        }
    };
    out.report["command"] = json!(command.name());
    out.report["config_hash"] = json!(hash);
    out.report["wall_time_s"] = json!(start.elapsed().as_secs_f64());
    Ok(out)
}

fn require(config: &RunConfig, regime: RegimeName) -> Result<(), ConfigError> {
    if config.modulation.regime != regime {
        return Err(ConfigError::Range {
            path: "modulation.regime".into(),
            value: format!("{:?}", config.modulation.regime),
            reason: format!("this command needs regime {regime:?}"),
        });
    }
    Ok(())
}
