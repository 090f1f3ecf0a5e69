//! Static subwavelength band of a square lattice of disks along X → Γ → M → X,
//! unfolded and folded with Ω = 0.2.
//!
//! cargo run --release --example static_bands

use capband::bands::{sweep_static, SweepSettings};
use capband::capacitance::{Material, ResonatorArray};
use capband::lattice::{BrillouinPath, LatticeSpec, Vec2};

fn main() -> anyhow::Result<()> {
    let spec = LatticeSpec::square();
    let array = ResonatorArray::new(vec![Vec2::new(0.5, 0.5)], vec![0.1], Material::default())?;
    let path = BrillouinPath::from_names(&spec, &["X", "Γ", "M", "X"], 11, None)?;
    let settings = SweepSettings::default();

    let plain = sweep_static(&array, &spec, &path, &settings, None)?;
    let folded = sweep_static(&array, &spec, &path, &settings, Some(0.2))?;
    println!("{:>8} {:>6} {:>10} {:>10}", "s", "label", "omega", "folded");
    for (a, b) in plain.samples.iter().zip(&folded.samples) {
        println!(
            "{:8.4} {:>6} {:10.6} {:10.6}",
            a.path_parameter,
            a.label.as_deref().unwrap_or(""),
            a.omegas[0].re,
            b.omegas[0].re
        );
    }
    println!("largest capacitance self-check {:.1e}", plain.provenance.max_capacitance_error);
    Ok(())
}
