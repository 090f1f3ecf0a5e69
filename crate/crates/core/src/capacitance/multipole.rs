//! Galerkin discretisation of the single layer potential in the basis
//! e^{inθ} on each circle, paired with arc-length measure.

use std::f64::consts::PI;

use std::ops::AddAssign;

use num_complex::Complex64;

use super::green::LatticeGreen;
use super::{CapacitanceDiagnostics, CapacitanceError, MultipoleSettings, ResonatorArray};
use crate::lattice::{LatticeSpec, Vec2};
use crate::linalg::{hermitian_eigenvalues, CMatrix};
use crate::special::{bessel_j_seq, ein, exp_int_e1, EULER_GAMMA};

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

fn index(i: usize, m: i64, mp: usize) -> usize {
    i * (2 * mp + 1) + (m + mp as i64) as usize
}

/// Matrix of ⟨e^{imθ}, S[e^{inθ'}]⟩ over all circles, size N(2M_p+1).
pub fn single_layer_matrix(
    array: &ResonatorArray,
    spec: &LatticeSpec,
    alpha: Vec2,
    settings: &MultipoleSettings,
) -> Result<CMatrix, CapacitanceError> {
    settings.validate()?;
    let green = LatticeGreen::from_settings(spec, alpha, settings)?;
    Ok(assemble(array, &green, settings.multipole_order))
}

pub(crate) fn assemble(array: &ResonatorArray, green: &LatticeGreen, mp: usize) -> CMatrix {
    let mut a = spectral_part(array, green, mp);
    real_space_part(array, green, mp, &mut a);
    a
}

fn spectral_part(array: &ResonatorArray, green: &LatticeGreen, mp: usize) -> CMatrix {
    let n = array.len();
    let nb = n * (2 * mp + 1);
    let terms = green.spectral_terms();
    let mut u = CMatrix::zeros(nb, terms.len());
    let ipow = |m: i64| I.powi(m.rem_euclid(4) as i32);
    for (col, t) in terms.iter().enumerate() {
        let kappa = t.k.norm();
        let phi = t.k.y.atan2(t.k.x);
        let sw = t.weight.sqrt();
        for i in 0..n {
            let r = array.radii[i];
            let j = bessel_j_seq(mp, kappa * r);
            let base = Complex64::from_polar(2.0 * PI * r * sw, t.k.dot(&array.centers[i]));
            for m in -(mp as i64)..=mp as i64 {
                let jm = if m < 0 && m % 2 != 0 { -j[m.unsigned_abs() as usize] } else { j[m.unsigned_abs() as usize] };
                u[(index(i, m, mp), col)] = base * ipow(m) * jm * Complex64::from_polar(1.0, -(m as f64) * phi);
            }
        }
    }
    let area = green.spec().cell_area();
    (&u * u.adjoint()) * Complex64::new(-1.0 / area, 0.0)
}

// Trapezoid size that resolves harmonics up to M against a kernel whose
// angular bandwidth is set by ratio = (R_i + R_j)/d (0 on the circle itself,
// where the remaining Ein part is entire and needs about 16 harmonics).
fn quadrature_points(mp: usize, ratio: f64) -> usize {
    let bw = if ratio > 0.0 && ratio < 1.0 { ((37.0 / (1.0 / ratio).ln()).ceil() as usize).max(16) } else { 16 };
    let p = (mp + bw + 8).min(4096);
    p + p % 2
}

fn real_space_part(array: &ResonatorArray, green: &LatticeGreen, mp: usize, a: &mut CMatrix) {
    let n = array.len();
    let nm = 2 * mp + 1;
    // diagonal blocks depend only on the radius
    let mut self_blocks: Vec<(f64, CMatrix)> = Vec::new();
    for i in 0..n {
        for j in i..n {
            let block = if i == j {
                let r = array.radii[i];
                match self_blocks.iter().find(|b| b.0 == r) {
                    Some(b) => b.1.clone(),
                    None => {
                        let b = pair_block(green, mp, r, r, Vec2::zeros(), true);
                        self_blocks.push((r, b.clone()));
                        b
                    }
                }
            } else {
                pair_block(green, mp, array.radii[i], array.radii[j], array.centers[i] - array.centers[j], false)
            };
            a.view_mut((i * nm, j * nm), (nm, nm)).add_assign(&block);
            if i != j {
                // the kernel is Hermitian: G(x, y) = conj G(y, x)
                a.view_mut((j * nm, i * nm), (nm, nm)).add_assign(&block.adjoint());
            }
        }
    }
}

// Real-space contribution to the (i, j) block for circles of radii ri, rj
// whose centres differ by dc.
fn pair_block(green: &LatticeGreen, mp: usize, ri: f64, rj: f64, dc: Vec2, same: bool) -> CMatrix {
    let nm = 2 * mp + 1;
    let e2 = green.eta() * green.eta();
    let mut out = CMatrix::zeros(nm, nm);
    // images sharing a quadrature size are summed into one kernel
    let mut groups: Vec<(usize, Vec<(Vec2, Complex64, bool)>)> = Vec::new();
    for (l, phase) in green.images(dc, ri + rj) {
        let shift = dc - l;
        let d = shift.norm();
        let self_term = same && l.norm_squared() == 0.0;
        if !self_term && d - ri - rj > green.rmax() {
            continue;
        }
        let ratio = if self_term { 0.0 } else { (ri + rj) / d };
        let p = quadrature_points(mp, ratio);
        match groups.iter_mut().find(|g| g.0 == p) {
            Some(g) => g.1.push((shift, phase, self_term)),
            None => groups.push((p, vec![(shift, phase, self_term)])),
        }
    }
    for (p, members) in groups {
        let h = 2.0 * PI / p as f64;
        let ang: Vec<(f64, f64)> = (0..p).map(|k| (k as f64 * h).sin_cos()).collect();
        let mut kern = CMatrix::zeros(p, p);
        for &(shift, phase, self_term) in &members {
            for (a_idx, &(sa, ca)) in ang.iter().enumerate() {
                let x = shift + Vec2::new(ri * ca, ri * sa);
                for (b_idx, &(sb, cb)) in ang.iter().enumerate() {
                    let z = e2 * (x - Vec2::new(rj * cb, rj * sb)).norm_squared();
                    let v = if self_term {
                        ein(z)
                    } else if z > 50.0 {
                        continue;
                    } else {
                        exp_int_e1(z)
                    };
                    kern[(a_idx, b_idx)] += phase * v;
                }
            }
        }
        // Φ_{a,m} = e^{imθ_a}
        let mut phi = CMatrix::zeros(p, nm);
        for (a_idx, &(sa, ca)) in ang.iter().enumerate() {
            let e = Complex64::new(ca, sa);
            let mut pw = e.powi(-(mp as i32));
            for m in 0..nm {
                phi[(a_idx, m)] = pw;
                pw *= e;
            }
        }
        let block = phi.adjoint() * (kern * &phi);
        out += block * Complex64::new(-(ri * rj) * h * h / (4.0 * PI), 0.0);
    }
    if same {
        // −(1/4π)(−γ − ln η² − ln|x−y|²) on the circle itself, exactly
        let r = ri;
        let c0 = -(-EULER_GAMMA - e2.ln()) / (4.0 * PI) * (2.0 * PI * r).powi(2);
        out[(mp, mp)] += c0 + 2.0 * PI * r * r * r.ln();
        for m in 1..=mp {
            let v = -PI * r * r / m as f64;
            out[(mp + m, mp + m)] += v;
            out[(mp - m, mp - m)] += v;
        }
    }
    out
}

/// Solves the multipole system for every indicator right-hand side and
/// returns C together with diagnostics (error estimate left at zero).
pub fn solve_capacitance(
    array: &ResonatorArray,
    spec: &LatticeSpec,
    alpha: Vec2,
    settings: &MultipoleSettings,
) -> Result<(CMatrix, CapacitanceDiagnostics), CapacitanceError> {
    let mp = settings.multipole_order;
    let green = LatticeGreen::from_settings(spec, alpha, settings)?;
    let a = assemble(array, &green, mp);
    let ev = hermitian_eigenvalues(&a);
    let amax = ev.iter().map(|x| x.abs()).fold(0.0, f64::max);
    let amin = ev.iter().map(|x| x.abs()).fold(f64::INFINITY, f64::min);
    let condition = if amin > 0.0 { amax / amin } else { f64::INFINITY };
    if !(condition <= 1e14) {
        return Err(CapacitanceError::SingularOperator { condition });
    }
    let n = array.len();
    let nm = 2 * mp + 1;
    let mut b = CMatrix::zeros(n * nm, n);
    for l in 0..n {
        b[(l * nm + mp, l)] = Complex64::new(2.0 * PI * array.radii[l], 0.0);
    }
    let lu = a.lu();
    let x = lu.solve(&b).ok_or(CapacitanceError::SingularOperator { condition: f64::INFINITY })?;
    let mut c = CMatrix::zeros(n, n);
    for i in 0..n {
        for l in 0..n {
            c[(i, l)] = -x[(i * nm + mp, l)] * (2.0 * PI * array.radii[i]);
        }
    }
    let diag = CapacitanceDiagnostics {
        multipole_order: mp,
        lattice_sum_radius: settings.lattice_sum_radius,
        spectral_terms: green.spectral_terms().len(),
        ewald_eta: green.eta(),
        error_estimate: 0.0,
        operator_condition: condition,
    };
    Ok((c, diag))
}
