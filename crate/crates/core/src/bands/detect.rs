//! k-gap, exceptional-point and Dirac-cone detectors. All are pure
//! functions of a stored [`BandStructure`].

use serde::{Deserialize, Serialize};

use super::{BandError, BandStructure, Regime};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DegeneracyKind {
    KGap,
    ExceptionalPoint,
    DiracCone,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case")]
pub enum Location {
    Point { sample: usize, path_parameter: f64, alpha: [f64; 2] },
    Interval { first: usize, last: usize, start: f64, end: f64 },
}

/// Metrics of a report; fields not relevant to the kind stay `None`.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Metrics {
    /// k-gap: every band complex (`false`) or only some (`true`).
    pub partial: Option<bool>,
    pub gap_width: Option<f64>,
    pub max_imag: Option<f64>,
    /// Finite eigenvector condition; `None` with `deficient` set when the
    /// eigenvector matrix is singular.
    pub condition: Option<f64>,
    pub deficient: Option<bool>,
    /// Distance in samples to the nearest real↔complex transition.
    pub transition_distance: Option<usize>,
    pub gap: Option<f64>,
    pub slope_left: Option<f64>,
    pub slope_right: Option<f64>,
    pub residual: Option<f64>,
    pub dirac: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DegeneracyReport {
    pub kind: DegeneracyKind,
    pub location: Location,
    pub metrics: Metrics,
}

impl DegeneracyReport {
    pub fn is_partial(&self) -> bool {
        self.metrics.partial == Some(true)
    }

    pub fn contains(&self, path_parameter: f64) -> bool {
        match self.location {
            Location::Interval { start, end, .. } => (start..=end).contains(&path_parameter),
            Location::Point { path_parameter: p, .. } => p == path_parameter,
        }
    }
}

/// Maximal runs of samples on which every band (full) or some but not all
/// bands (partial) have |Im ω| > `im_tol`.
pub fn detect_kgap(bands: &BandStructure, im_tol: f64) -> Vec<DegeneracyReport> {
    #[derive(PartialEq, Clone, Copy)]
    enum State {
        Real,
        Partial,
        Full,
    }
    let state = |i: usize| {
        let s = &bands.samples[i];
        match s.complex_count(im_tol) {
            0 => State::Real,
            c if c == s.omegas.len() => State::Full,
            _ => State::Partial,
        }
    };
    let mut out = Vec::new();
    let n = bands.samples.len();
    let mut i = 0;
    while i < n {
        let st = state(i);
        let mut j = i;
        while j + 1 < n && state(j + 1) == st {
            j += 1;
        }
        if st != State::Real {
            let run = &bands.samples[i..=j];
            out.push(DegeneracyReport {
                kind: DegeneracyKind::KGap,
                location: Location::Interval {
                    first: i,
                    last: j,
                    start: run[0].path_parameter,
                    end: run[run.len() - 1].path_parameter,
                },
                metrics: Metrics {
                    partial: Some(st == State::Partial),
                    gap_width: Some(run[run.len() - 1].path_parameter - run[0].path_parameter),
                    max_imag: Some(run.iter().map(|s| s.max_imag()).fold(0.0, f64::max)),
                    ..Metrics::default()
                },
            });
        }
        i = j + 1;
    }
    out
}

/// Local maxima of the eigenvector condition above `cond_threshold` lying
/// within two samples of a change in the number of complex exponents.
/// Peaks away from any transition are left out: near Γ the acoustic pair
/// ±ω coalesces at ω = 0 without the spectrum leaving the real axis.
pub fn detect_exceptional_points(bands: &BandStructure, cond_threshold: f64, im_tol: f64) -> Vec<DegeneracyReport> {
    let cond: Vec<f64> = bands.samples.iter().map(|s| s.ep_condition.unwrap_or(f64::NAN)).collect();
    let n = cond.len();
    let counts: Vec<usize> = bands.samples.iter().map(|s| s.complex_count(im_tol)).collect();
    // transition k sits between samples k and k+1
    let transitions: Vec<usize> = (0..n.saturating_sub(1)).filter(|&k| counts[k] != counts[k + 1]).collect();
    let mut out = Vec::new();
    for i in 0..n {
        let c = cond[i];
        if !(c > cond_threshold) {
            continue;
        }
        let left_ok = i == 0 || !(cond[i - 1] > c);
        let right_ok = i + 1 == n || cond[i + 1] < c || (cond[i + 1] == c && c.is_infinite());
        if !(left_ok && right_ok) {
            continue;
        }
        let distance = transitions
            .iter()
            .map(|&k| if i <= k { k - i } else { i - k - 1 })
            .min()
            .filter(|&d| d <= 2);
        if distance.is_none() {
            continue;
        }
        let s = &bands.samples[i];
        out.push(DegeneracyReport {
            kind: DegeneracyKind::ExceptionalPoint,
            location: Location::Point { sample: i, path_parameter: s.path_parameter, alpha: s.alpha },
            metrics: Metrics {
                condition: c.is_finite().then_some(c),
                deficient: Some(c.is_infinite()),
                transition_distance: distance,
                max_imag: Some(s.max_imag()),
                ..Metrics::default()
            },
        });
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DiracSettings {
    /// Samples used on each side of the point (at least 3).
    pub window: usize,
    /// Absolute gap tolerance; `None` means 1e-4·Ω (1e-4·max band for
    /// unfolded static bands).
    pub gap_tol: Option<f64>,
    /// Minimum |slope| of the gap against ‖α − point‖.
    pub slope_tol: f64,
    pub residual_tol: f64,
}

impl Default for DiracSettings {
    fn default() -> Self {
        DiracSettings { window: 4, gap_tol: None, slope_tol: 1e-3, residual_tol: 0.05 }
    }
}

/// Band values at a sample in the order used for `band_pair`, 1-based.
/// Static bands are ranked by value. Modulated spectra come in pairs
/// ω, −ω̄, so the 2N exponents are sorted by (Re, Im) and the upper N are
/// ranked; this is the positive-real-part view of the band diagrams.
pub fn ranked_bands(bands: &BandStructure, sample: usize) -> Vec<f64> {
    let s = &bands.samples[sample];
    let mut w = s.omegas.clone();
    w.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    let skip = match bands.regime {
        Regime::Static => 0,
        _ => w.len() / 2,
    };
    w[skip..].iter().map(|z| z.re).collect()
}

fn gap_at(bands: &BandStructure, sample: usize, pair: (usize, usize)) -> Result<f64, BandError> {
    let v = ranked_bands(bands, sample);
    let get = |b: usize| {
        if b == 0 || b > v.len() {
            Err(BandError::BandOutOfRange { band: b, count: v.len() })
        } else {
            Ok(v[b - 1])
        }
    };
    Ok((get(pair.0)? - get(pair.1)?).abs())
}

// least squares y = s·x + b, returns (s, relative residual)
fn linear_fit(x: &[f64], y: &[f64]) -> (f64, f64) {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|v| (v - mx).powi(2)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let s = sxy / sxx;
    let b = my - s * mx;
    let res: f64 = x.iter().zip(y).map(|(a, v)| (v - s * a - b).powi(2)).sum::<f64>().sqrt();
    let norm: f64 = y.iter().map(|v| v * v).sum::<f64>().sqrt();
    (s, if norm > 0.0 { res / norm } else { 0.0 })
}

/// Gap between two ranked bands at a labelled waypoint and two-sided
/// linear fits of the gap against ‖α − point‖.
pub fn detect_dirac(
    bands: &BandStructure,
    point: &str,
    band_pair: (usize, usize),
    settings: &DiracSettings,
) -> Result<DegeneracyReport, BandError> {
    let idx = bands.find_label(point).ok_or_else(|| BandError::UnknownPoint(point.to_string()))?;
    // refined samples are skipped so the window is made of path samples
    let path: Vec<usize> = (0..bands.samples.len()).filter(|&i| !bands.samples[i].refined).collect();
    let pos = path.iter().position(|&i| i == idx).expect("labelled samples are path samples");
    let w = settings.window;
    if w < 3 || pos < w || pos + w >= path.len() {
        return Err(BandError::WindowOutOfRange {
            index: idx,
            window: w,
            available_left: pos,
            available_right: path.len() - pos - 1,
        });
    }
    let alpha0 = nalgebra::Vector2::from(bands.samples[idx].alpha);
    let gap0 = gap_at(bands, idx, band_pair)?;
    let side = |range: Vec<usize>| -> Result<(f64, f64), BandError> {
        let mut x = Vec::new();
        let mut y = Vec::new();
        for i in range {
            let a = nalgebra::Vector2::from(bands.samples[i].alpha);
            x.push((a - alpha0).norm());
            y.push(gap_at(bands, i, band_pair)?);
        }
        Ok(linear_fit(&x, &y))
    };
    let (sl, rl) = side(path[pos - w..pos].to_vec())?;
    let (sr, rr) = side(path[pos + 1..=pos + w].to_vec())?;
    let gap_tol = settings.gap_tol.unwrap_or_else(|| {
        let scale = bands.omega.unwrap_or_else(|| {
            bands.samples.iter().flat_map(|s| s.omegas.iter().map(|w| w.re.abs())).fold(0.0, f64::max)
        });
        1e-4 * scale
    });
    let residual = rl.max(rr);
    let dirac = gap0 < gap_tol
        && sl.abs() > settings.slope_tol
        && sr.abs() > settings.slope_tol
        && residual < settings.residual_tol;
    let s = &bands.samples[idx];
    Ok(DegeneracyReport {
        kind: DegeneracyKind::DiracCone,
        location: Location::Point { sample: idx, path_parameter: s.path_parameter, alpha: s.alpha },
        metrics: Metrics {
            gap: Some(gap0),
            slope_left: Some(sl),
            slope_right: Some(sr),
            residual: Some(residual),
            dirac: Some(dirac),
            ..Metrics::default()
        },
    })
}
