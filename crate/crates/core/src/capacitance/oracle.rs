//! Dense Nyström reference for C^α: point collocation on equispaced nodes,
//! trapezoidal weights off the diagonal block and Kress log-quadrature for
//! the logarithmic singularity on each circle.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::green::LatticeGreen;
use super::{CapacitanceError, ResonatorArray};
use crate::lattice::{LatticeSpec, Vec2};
use crate::linalg::CMatrix;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OracleSettings {
    /// Nodes per circle (even).
    pub points_per_circle: usize,
    pub lattice_sum_radius: f64,
}

impl Default for OracleSettings {
    fn default() -> Self {
        OracleSettings { points_per_circle: 256, lattice_sum_radius: 8.0 }
    }
}

// R_j(t) weights of the periodic log kernel ln(4 sin²((t−s)/2)), 2n nodes
fn kress_weights(p: usize) -> Vec<f64> {
    let n = p / 2;
    let mut w = vec![0.0; p];
    for (k, wk) in w.iter_mut().enumerate() {
        let t = PI * k as f64 / n as f64;
        let mut s = 0.0;
        for m in 1..n {
            s += (m as f64 * t).cos() / m as f64;
        }
        *wk = -2.0 * PI / n as f64 * s - PI / (n * n) as f64 * (n as f64 * t).cos();
    }
    w
}

pub fn nystrom_capacitance(
    array: &ResonatorArray,
    spec: &LatticeSpec,
    alpha: Vec2,
    settings: &OracleSettings,
) -> Result<CMatrix, CapacitanceError> {
    let p = settings.points_per_circle + settings.points_per_circle % 2;
    let green = LatticeGreen::new(spec, alpha, settings.lattice_sum_radius)?;
    let n = array.len();
    let h = 2.0 * PI / p as f64;
    let mut nodes = Vec::with_capacity(n * p);
    for i in 0..n {
        for k in 0..p {
            let (s, c) = (k as f64 * h).sin_cos();
            nodes.push(array.centers[i] + Vec2::new(array.radii[i] * c, array.radii[i] * s));
        }
    }
    let np = nodes.len();

    // smooth spectral part as E diag(w) E^H
    let terms = green.spectral_terms();
    let mut e = CMatrix::zeros(np, terms.len());
    let mut ew = CMatrix::zeros(np, terms.len());
    for (q, t) in terms.iter().enumerate() {
        for (a, x) in nodes.iter().enumerate() {
            let z = Complex64::from_polar(1.0, t.k.dot(x));
            e[(a, q)] = z;
            ew[(a, q)] = z * t.weight;
        }
    }
    let mut kmat = (&ew * e.adjoint()) * Complex64::new(-1.0 / spec.cell_area(), 0.0);

    let kress = kress_weights(p);
    for a in 0..np {
        let ia = a / p;
        for b in 0..np {
            let ib = b / p;
            let r = nodes[a] - nodes[b];
            let spectral = kmat[(a, b)];
            let rb = array.radii[ib];
            let w = rb * h;
            if ia == ib {
                // regular part by trapezoid, log part by Kress weights
                let lw = kress[(a % p + p - b % p) % p];
                let log_part = rb / (2.0 * PI) * (h * rb.ln() + 0.5 * lw);
                kmat[(a, b)] = (spectral + green.real_space_regular(r)) * w + log_part;
            } else {
                kmat[(a, b)] = (spectral + green.real_space(r)) * w;
            }
        }
    }

    let mut rhs = CMatrix::zeros(np, n);
    for a in 0..np {
        rhs[(a, a / p)] = Complex64::new(1.0, 0.0);
    }
    let phi = kmat
        .lu()
        .solve(&rhs)
        .ok_or(CapacitanceError::SingularOperator { condition: f64::INFINITY })?;
    let mut c = CMatrix::zeros(n, n);
    for i in 0..n {
        for l in 0..n {
            let mut s = Complex64::new(0.0, 0.0);
            for k in 0..p {
                s += phi[(i * p + k, l)];
            }
            c[(i, l)] = -s * (array.radii[i] * h);
        }
    }
    Ok(c)
}
