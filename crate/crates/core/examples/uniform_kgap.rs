//! Uniform ρ-modulation of a square lattice (Ω = 0.2): k-gaps open at the
//! edges of the time-Brillouin zone as ε grows.
//!
//! cargo run --release --example uniform_kgap

use capband::bands::{detect_kgap, sweep_uniform, Location, SweepSettings};
use capband::capacitance::{Material, ResonatorArray};
use capband::lattice::{BrillouinPath, LatticeSpec, Vec2};
use capband::modulation::UniformLaw;

fn main() -> anyhow::Result<()> {
    let spec = LatticeSpec::square();
    let array = ResonatorArray::new(vec![Vec2::new(0.5, 0.5)], vec![0.1], Material::default())?;
    let path = BrillouinPath::from_names(&spec, &["X", "Γ", "M", "X"], 21, None)?;
    let settings = SweepSettings::default();

    for eps in [0.0, 0.1, 0.3] {
        let bands = sweep_uniform(&array, &spec, &path, &UniformLaw::RhoCosine, 0.2, eps, &settings)?;
        println!("eps = {eps}: max |Im ω| = {:.3e}", bands.max_imag());
        for r in detect_kgap(&bands, settings.im_tol) {
            if let Location::Interval { start, end, .. } = r.location {
                let kind = if r.is_partial() { "partial" } else { "full" };
                println!("  {kind} k-gap on [{start:.3}, {end:.3}], max |Im ω| {:.2e}", r.metrics.max_imag.unwrap_or(0.0));
            }
        }
    }
    Ok(())
}
