//! Finite arrays: an isolated sphere (C = 4πR) under constant-impedance
//! modulation, whose exponent stays at ω_s·κ̃, and a user-supplied 2×2
//! capacitance matrix under anti-phase κ-modulation.
//!
//! cargo run --release --example finite_array

use std::f64::consts::PI;

use capband::bands::{sweep_finite, FiniteModulation};
use capband::capacitance::{finite_sphere_capacitance, Material};
use capband::lattice::fold_quasifrequency;
use capband::linalg::CMatrix;
use capband::modulation::{ModulationProfile, UniformLaw};
use num_complex::Complex64;

fn main() -> anyhow::Result<()> {
    let material = Material::default();
    let r = 0.1;
    let c = CMatrix::from_element(1, 1, Complex64::new(finite_sphere_capacitance(r)?, 0.0));
    let vol = [4.0 * PI * r.powi(3) / 3.0];
    let omega_s = (material.delta * c[(0, 0)].re / vol[0]).sqrt() * material.v_r();
    for eps in [0.0, 0.3, 0.6] {
        let m = FiniteModulation::Uniform { law: UniformLaw::ConstantImpedance, omega: 0.5, eps };
        let sp = sweep_finite(&c, &m, &vol, &material, 1e-11)?;
        let expected = fold_quasifrequency(Complex64::new(omega_s * UniformLaw::mean_kappa(eps), 0.0), 0.5);
        println!("sphere, eps = {eps}: ω = {:.10}, ω_s·κ̃ = {:.10}", sp.exponents[1].re, expected.re);
    }

    let c2 = CMatrix::from_row_slice(2, 2, &[3.0, -1.0, -1.0, 3.0].map(|x| Complex64::new(x, 0.0)));
    let vols = [PI * 0.01; 2];
    for eps in [0.0, 0.2, 0.4] {
        let m = FiniteModulation::Resonator(ModulationProfile::kappa_cosine(0.26, eps, &[0.0, PI])?);
        let sp = sweep_finite(&c2, &m, &vols, &material, 1e-11)?;
        let w: Vec<String> = sp.exponents.iter().map(|z| format!("{:.5}{:+.2e}i", z.re, z.im)).collect();
        println!("dimer, eps = {eps}: [{}], condition {:.2e}", w.join(", "), sp.ep_condition);
    }
    Ok(())
}
