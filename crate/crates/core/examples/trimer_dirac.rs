//! Trimer honeycomb lattice with rotating ρ-modulation (Ω = 0.15). Prints
//! the static Dirac cones at K and the gap between bands 4 and 5 at Γ as ε
//! varies, using short paths through each point.
//!
//! cargo run --release --example trimer_dirac

use std::f64::consts::PI;

use capband::bands::{detect_dirac, ranked_bands, sweep_resonator_modulated, sweep_static, DiracSettings, SweepSettings};
use capband::capacitance::{Material, ResonatorArray};
use capband::config::resonator_preset;
use capband::lattice::{brillouin_path, LatticeSpec, Vec2};
use capband::modulation::ModulationProfile;

fn main() -> anyhow::Result<()> {
    let spec = LatticeSpec::honeycomb();
    let (centers, r) = resonator_preset("trimer-honeycomb").unwrap();
    let array = ResonatorArray::new(
        centers.iter().map(|c| Vec2::new(c[0], c[1])).collect(),
        vec![r; 6],
        Material::default(),
    )?;
    let k = spec.symmetry_point("K").unwrap();
    let m = spec.symmetry_point("M").unwrap();
    let eta = 1e-5 * spec.dual()[0].norm();

    let around_k = brillouin_path(
        &spec,
        &[("K-".into(), k * 0.95), ("K".into(), k), ("K+".into(), k + (m - k) * 0.1)],
        9,
        None,
    )?;
    let settings = SweepSettings { ep_refinement_steps: 0, ..SweepSettings::default() };
    let stat = sweep_static(&array, &spec, &around_k, &settings, None)?;
    for pair in [(1, 2), (4, 5)] {
        let d = detect_dirac(&stat, "K", pair, &DiracSettings::default())?;
        println!("static bands {pair:?} at K: gap {:.1e}, dirac {:?}", d.metrics.gap.unwrap(), d.metrics.dirac.unwrap());
    }

    let around_g = brillouin_path(
        &spec,
        &[("M'".into(), m * 0.05), ("Γ".into(), Vec2::zeros()), ("K'".into(), k * 0.05)],
        9,
        Some(eta),
    )?;
    let phases = [0.0, 2.0 * PI / 3.0, 4.0 * PI / 3.0, 0.0, 2.0 * PI / 3.0, 4.0 * PI / 3.0];
    for eps in [0.0, 0.1, 0.2, 0.3] {
        let profile = ModulationProfile::rho_cosine(0.15, eps, &phases)?;
        let bands = sweep_resonator_modulated(&array, &spec, &around_g, &profile, &settings)?;
        let g = bands.find_label("Γ").unwrap();
        let d = detect_dirac(&bands, "Γ", (4, 5), &DiracSettings::default())?;
        let ranked: Vec<String> = ranked_bands(&bands, g).iter().map(|w| format!("{w:.5}")).collect();
        println!(
            "eps = {eps}: bands at Γ [{}], gap(4,5) {:.3e}, dirac {:?}",
            ranked.join(", "),
            d.metrics.gap.unwrap(),
            d.metrics.dirac.unwrap()
        );
    }
    Ok(())
}
