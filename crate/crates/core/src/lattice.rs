//! Spatial lattices, their duals, Brillouin-zone paths and the folding of
//! quasifrequencies into the time-Brillouin zone.

use std::f64::consts::PI;

use nalgebra::Vector2;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub type Vec2 = Vector2<f64>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LatticeError {
    #[error("degenerate lattice: |det| = {det:e} is below threshold {threshold:e}")]
    DegenerateLattice { det: f64, threshold: f64 },
    #[error("a Brillouin path needs at least two waypoints, got {0}")]
    EmptyPath(usize),
    #[error("invalid path: {0}")]
    InvalidPath(String),
}

/// Two-dimensional Bravais lattice with its dual.
#[derive(Debug, Clone, PartialEq)]
pub struct LatticeSpec {
    l: [Vec2; 2],
    dual: [Vec2; 2],
}

impl LatticeSpec {
    pub fn new(l1: Vec2, l2: Vec2) -> Result<Self, LatticeError> {
        let dual = dual_lattice([l1, l2])?;
        Ok(LatticeSpec { l: [l1, l2], dual })
    }

    /// Unit square lattice, l₁ = (1,0), l₂ = (0,1).
    pub fn square() -> Self {
        Self::new(Vec2::new(1.0, 0.0), Vec2::new(0.0, 1.0)).expect("square lattice")
    }

    /// Hexagonal lattice l₁ = (3/2, √3/2), l₂ = (3/2, −√3/2), for which
    /// sites at (1,0) and (2,0) form a honeycomb with unit bond length.
    pub fn honeycomb() -> Self {
        let s = 3f64.sqrt();
        Self::new(Vec2::new(1.5, s / 2.0), Vec2::new(1.5, -s / 2.0)).expect("honeycomb lattice")
    }

    pub fn primitive(&self) -> &[Vec2; 2] {
        &self.l
    }

    pub fn dual(&self) -> &[Vec2; 2] {
        &self.dual
    }

    pub fn cell_area(&self) -> f64 {
        det2(self.l[0], self.l[1]).abs()
    }

    /// Lattice point m₁l₁ + m₂l₂.
    pub fn point(&self, m1: i64, m2: i64) -> Vec2 {
        self.l[0] * m1 as f64 + self.l[1] * m2 as f64
    }

    /// Dual lattice point n₁α₁ + n₂α₂.
    pub fn dual_point(&self, n1: i64, n2: i64) -> Vec2 {
        self.dual[0] * n1 as f64 + self.dual[1] * n2 as f64
    }

    /// Distance from `alpha` to the nearest point of the dual lattice.
    pub fn dual_distance(&self, alpha: Vec2) -> f64 {
        nearest_distance(alpha, &self.dual, &self.l)
    }

    /// Distance from `r` to the nearest lattice point.
    pub fn lattice_distance(&self, r: Vec2) -> f64 {
        nearest_distance(r, &self.l, &self.dual)
    }

    /// Symmetry points Γ, X = α₁/2, M = (α₁+α₂)/2 of a square-type zone.
    pub fn square_points(&self) -> Vec<(String, Vec2)> {
        vec![
            ("Γ".to_string(), Vec2::zeros()),
            ("X".to_string(), self.dual[0] / 2.0),
            ("M".to_string(), (self.dual[0] + self.dual[1]) / 2.0),
        ]
    }

    /// Symmetry points Γ, M = α₁/2, K = 2α₁/3 + α₂/3 of a hexagonal zone.
    pub fn hexagonal_points(&self) -> Vec<(String, Vec2)> {
        vec![
            ("Γ".to_string(), Vec2::zeros()),
            ("M".to_string(), self.dual[0] / 2.0),
            ("K".to_string(), self.dual[0] * (2.0 / 3.0) + self.dual[1] / 3.0),
        ]
    }

    /// Looks up a named symmetry point in either family.
    pub fn symmetry_point(&self, name: &str) -> Option<Vec2> {
        let hex = (self.dual[0].norm() - self.dual[1].norm()).abs() < 1e-12 * self.dual[0].norm()
            && (self.dual[0].dot(&self.dual[1])).abs() > 1e-12 * self.dual[0].norm_squared();
        let pts = if hex { self.hexagonal_points() } else { self.square_points() };
        let key = match name {
            "G" | "Gamma" | "gamma" => "Γ",
            other => other,
        };
        pts.into_iter().find(|(n, _)| n == key).map(|(_, p)| p)
    }
}

fn det2(a: Vec2, b: Vec2) -> f64 {
    a.x * b.y - a.y * b.x
}

// Nearest point of the lattice spanned by `basis`; `dual_basis` gives the
// fractional coordinates (b_i · d_j = 2π δ_ij).
fn nearest_distance(p: Vec2, basis: &[Vec2; 2], dual_basis: &[Vec2; 2]) -> f64 {
    let f1 = (p.dot(&dual_basis[0]) / (2.0 * PI)).floor() as i64;
    let f2 = (p.dot(&dual_basis[1]) / (2.0 * PI)).floor() as i64;
    let mut best = f64::INFINITY;
    for d1 in -1..=2 {
        for d2 in -1..=2 {
            let q = basis[0] * (f1 + d1) as f64 + basis[1] * (f2 + d2) as f64;
            best = best.min((p - q).norm());
        }
    }
    best
}

/// Dual vectors with αᵢ·lⱼ = 2πδᵢⱼ.
pub fn dual_lattice(l: [Vec2; 2]) -> Result<[Vec2; 2], LatticeError> {
    let det = det2(l[0], l[1]);
    let threshold = 1e-12 * l[0].norm() * l[1].norm();
    if !(det.abs() > threshold) {
        return Err(LatticeError::DegenerateLattice { det, threshold });
    }
    // rows of 2π L⁻¹ where L has the primitive vectors as columns
    let s = 2.0 * PI / det;
    Ok([
        Vec2::new(l[1].y * s, -l[1].x * s),
        Vec2::new(-l[0].y * s, l[0].x * s),
    ])
}

/// Time-Brillouin zone of a modulation with angular frequency Ω.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TimeBrillouinZone {
    omega: f64,
}

impl TimeBrillouinZone {
    pub fn new(omega: f64) -> Option<Self> {
        (omega > 0.0 && omega.is_finite()).then_some(TimeBrillouinZone { omega })
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }

    pub fn period(&self) -> f64 {
        2.0 * PI / self.omega
    }

    pub fn fold(&self, w: Complex64) -> Complex64 {
        fold_quasifrequency(w, self.omega)
    }
}

/// Maps Re ω into [−Ω/2, Ω/2), leaving Im ω untouched.
pub fn fold_quasifrequency(w: Complex64, omega: f64) -> Complex64 {
    let half = 0.5 * omega;
    let x = w.re;
    // values a few ulps below +Ω/2 are rounding of the tie
    let tie = 4.0 * f64::EPSILON * omega;
    if ((-half..half - tie).contains(&x)) || !x.is_finite() {
        return w;
    }
    let k = ((x + half) / omega).floor();
    let mut r = x - k * omega;
    if r < -half {
        r += omega;
    }
    if r >= half - tie {
        r -= omega;
    }
    Complex64::new(r, w.im)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PathSample {
    pub path_parameter: f64,
    pub alpha: [f64; 2],
    /// Set on samples that coincide with a named waypoint.
    pub label: Option<String>,
}

impl PathSample {
    pub fn alpha(&self) -> Vec2 {
        Vec2::new(self.alpha[0], self.alpha[1])
    }
}

/// Piecewise-linear path through named quasimomenta.
#[derive(Debug, Clone, PartialEq)]
pub struct BrillouinPath {
    pub waypoints: Vec<(String, Vec2)>,
    pub samples_per_segment: usize,
    pub gamma_offset: f64,
    samples: Vec<PathSample>,
}

impl BrillouinPath {
    pub fn samples(&self) -> &[PathSample] {
        &self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// Builds a path from waypoint names, resolved with
    /// [`LatticeSpec::symmetry_point`].
    pub fn from_names(
        spec: &LatticeSpec,
        names: &[&str],
        samples_per_segment: usize,
        gamma_offset: Option<f64>,
    ) -> Result<Self, LatticeError> {
        let mut wps = Vec::with_capacity(names.len());
        for n in names {
            let p = spec
                .symmetry_point(n)
                .ok_or_else(|| LatticeError::InvalidPath(format!("unknown symmetry point {n}")))?;
            let label = if *n == "G" || *n == "Gamma" || *n == "gamma" { "Γ" } else { n };
            wps.push((label.to_string(), p));
        }
        brillouin_path(spec, &wps, samples_per_segment, gamma_offset)
    }
}

/// Default Γ displacement, 1e-3·‖α₁‖.
pub fn default_gamma_offset(spec: &LatticeSpec) -> f64 {
    1e-3 * spec.dual()[0].norm()
}

pub fn brillouin_path(
    spec: &LatticeSpec,
    waypoints: &[(String, Vec2)],
    samples_per_segment: usize,
    gamma_offset: Option<f64>,
) -> Result<BrillouinPath, LatticeError> {
    if waypoints.len() < 2 {
        return Err(LatticeError::EmptyPath(waypoints.len()));
    }
    if samples_per_segment < 2 {
        return Err(LatticeError::InvalidPath(format!(
            "samples_per_segment must be at least 2, got {samples_per_segment}"
        )));
    }
    let eta = gamma_offset.unwrap_or_else(|| default_gamma_offset(spec));
    if !(eta > 0.0 && eta.is_finite()) {
        return Err(LatticeError::InvalidPath(format!("gamma_offset must be positive, got {eta}")));
    }
    for w in waypoints.windows(2) {
        if (w[1].1 - w[0].1).norm() == 0.0 {
            return Err(LatticeError::InvalidPath(format!(
                "repeated waypoint {} -> {}",
                w[0].0, w[1].0
            )));
        }
    }
    let on_dual = |p: Vec2| spec.dual_distance(p) < 1e-10 * spec.dual()[0].norm().max(1.0);

    let mut samples = Vec::new();
    let mut s0 = 0.0;
    let nseg = waypoints.len() - 1;
    for k in 0..nseg {
        let (ref na, a) = waypoints[k];
        let (ref nb, b) = waypoints[k + 1];
        let len = (b - a).norm();
        let dir = (b - a) / len;
        let first = if k == 0 { 0 } else { 1 };
        for j in first..samples_per_segment {
            let t = j as f64 / (samples_per_segment - 1) as f64;
            let mut p = a + (b - a) * t;
            let mut label = if j == 0 {
                Some(na.clone())
            } else if j == samples_per_segment - 1 {
                Some(nb.clone())
            } else {
                None
            };
            if on_dual(p) {
                // the last sample points back along the final segment
                let d = if j == samples_per_segment - 1 && k + 1 == nseg {
                    -dir
                } else if j == samples_per_segment - 1 {
                    let c = waypoints[k + 2].1;
                    (c - b) / (c - b).norm()
                } else {
                    dir
                };
                p += d * eta;
                let base = label.take().unwrap_or_else(|| "Λ*".to_string());
                label = Some(format!("{base}(offset)"));
            }
            samples.push(PathSample {
                path_parameter: s0 + t * len,
                alpha: [p.x, p.y],
                label,
            });
        }
        s0 += len;
    }
    Ok(BrillouinPath {
        waypoints: waypoints.to_vec(),
        samples_per_segment,
        gamma_offset: eta,
        samples,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn square_dual() {
        let d = dual_lattice([Vec2::new(1.0, 0.0), Vec2::new(0.0, 1.0)]).unwrap();
        assert!((d[0] - Vec2::new(2.0 * PI, 0.0)).norm() < 1e-15);
        assert!((d[1] - Vec2::new(0.0, 2.0 * PI)).norm() < 1e-15);
    }

    #[test]
    fn hexagonal_dual() {
        let s = 3f64.sqrt();
        let spec = LatticeSpec::new(Vec2::new(3.0, s), Vec2::new(3.0, -s)).unwrap();
        let d = spec.dual();
        assert!((d[0] - Vec2::new(PI / 3.0, PI / s)).norm() < 1e-14);
        assert!((d[1] - Vec2::new(PI / 3.0, -PI / s)).norm() < 1e-14);
        for i in 0..2 {
            for j in 0..2 {
                let want = if i == j { 2.0 * PI } else { 0.0 };
                assert!((d[i].dot(&spec.primitive()[j]) - want).abs() < 1e-12);
            }
        }
        assert!((spec.cell_area() - 6.0 * s).abs() < 1e-14);
    }

    #[test]
    fn collinear_is_degenerate() {
        let e = dual_lattice([Vec2::new(1.0, 0.0), Vec2::new(2.0, 0.0)]);
        assert!(matches!(e, Err(LatticeError::DegenerateLattice { .. })));
    }

    #[test]
    fn fold_examples() {
        let f = fold_quasifrequency(Complex64::new(0.35, 0.0), 0.2);
        assert!((f.re + 0.05).abs() < 1e-15);
        let f = fold_quasifrequency(Complex64::new(0.1, 0.0), 0.2);
        assert_eq!(f.re, -0.1);
        let f = fold_quasifrequency(Complex64::new(0.25, 0.01), 0.2);
        assert!((f.re - 0.05).abs() < 1e-15);
        assert_eq!(f.im, 0.01);
    }

    #[test]
    fn square_path_seven_samples() {
        let spec = LatticeSpec::square();
        let path = BrillouinPath::from_names(&spec, &["X", "Γ", "M", "X"], 3, None).unwrap();
        assert_eq!(path.len(), 7);
        let g = &path.samples()[2];
        assert_eq!(g.label.as_deref(), Some("Γ(offset)"));
        assert!((g.alpha().norm() - 2e-3 * PI).abs() < 1e-15);
        // displaced toward M
        assert!((g.alpha().x - g.alpha().y).abs() < 1e-15);
    }

    #[test]
    fn single_waypoint_is_empty_path() {
        let spec = LatticeSpec::square();
        let e = brillouin_path(&spec, &[("X".into(), Vec2::new(PI, 0.0))], 4, None);
        assert_eq!(e, Err(LatticeError::EmptyPath(1)));
    }

    #[test]
    fn honeycomb_points() {
        let spec = LatticeSpec::honeycomb();
        let k = spec.symmetry_point("K").unwrap();
        let d = spec.dual();
        assert!((k - (d[0] * 2.0 / 3.0 + d[1] / 3.0)).norm() < 1e-15);
        let m = spec.symmetry_point("M").unwrap();
        assert!((m - d[0] / 2.0).norm() < 1e-15);
    }
}
