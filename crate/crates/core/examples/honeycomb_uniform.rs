//! Honeycomb lattice under uniform ρ-modulation with ε = 0.2. Lowering Ω
//! towards twice the Dirac frequency at K turns complex bands into a full
//! k-gap around K.
//!
//! cargo run --release --example honeycomb_uniform

use capband::bands::{detect_kgap, sweep_static, sweep_uniform, SweepSettings};
use capband::capacitance::{Material, ResonatorArray};
use capband::lattice::{BrillouinPath, LatticeSpec, Vec2};
use capband::modulation::UniformLaw;

fn main() -> anyhow::Result<()> {
    let spec = LatticeSpec::honeycomb();
    let array =
        ResonatorArray::new(vec![Vec2::new(1.0, 0.0), Vec2::new(2.0, 0.0)], vec![0.1, 0.1], Material::default())?;
    let path = BrillouinPath::from_names(&spec, &["M", "Γ", "K", "M"], 21, None)?;
    let settings = SweepSettings::default();

    let stat = sweep_static(&array, &spec, &path, &settings, None)?;
    let k = stat.find_label("K").unwrap();
    println!("static bands at K: {:.6} {:.6}", stat.samples[k].omegas[0].re, stat.samples[k].omegas[1].re);

    for omega in [0.3, 0.23, 0.2] {
        let bands = sweep_uniform(&array, &spec, &path, &UniformLaw::RhoCosine, omega, 0.2, &settings)?;
        let gaps = detect_kgap(&bands, settings.im_tol);
        let full: Vec<_> = gaps.iter().filter(|g| !g.is_partial()).collect();
        println!(
            "Omega = {omega}: max |Im ω| {:.2e}, {} complex runs, {} full k-gaps, K inside a full gap: {}",
            bands.max_imag(),
            gaps.len(),
            full.len(),
            full.iter().any(|g| g.contains(bands.samples[k].path_parameter))
        );
    }
    Ok(())
}
