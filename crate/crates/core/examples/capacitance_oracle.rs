//! Multipole capacitance matrix of a dimer cell next to the Nyström oracle.
//!
//! cargo run --release --example capacitance_oracle

use capband::capacitance::{capacitance_matrix, nystrom_capacitance, Material, MultipoleSettings, OracleSettings, ResonatorArray};
use capband::lattice::{LatticeSpec, Vec2};
use capband::linalg::frobenius;

fn main() -> anyhow::Result<()> {
    let r = 0.1;
    let dimer = ResonatorArray::new(
        vec![Vec2::new(0.5 - 1.2 * r, 0.5), Vec2::new(0.5 + 1.2 * r, 0.5)],
        vec![r, r],
        Material::default(),
    )?;
    let spec = LatticeSpec::square();
    let x = spec.symmetry_point("X").unwrap();

    for alpha in [x, x * 0.25, Vec2::new(0.7, 2.1)] {
        let c = capacitance_matrix(&dimer, &spec, alpha, &MultipoleSettings::default())?;
        let o = nystrom_capacitance(&dimer, &spec, alpha, &OracleSettings::default())?;
        let rel = frobenius(&(&c.entries - &o)) / frobenius(&o);
        println!("alpha = ({:.4}, {:.4})", alpha.x, alpha.y);
        println!("  C = [{:.6} {:.6}; {:.6} {:.6}]", c.entries[(0, 0)], c.entries[(0, 1)], c.entries[(1, 0)], c.entries[(1, 1)]);
        println!("  eigenvalues {:?}", c.eigenvalues());
        println!("  oracle difference {rel:.2e}, self-check {:.2e}", c.diagnostics.error_estimate);
    }
    Ok(())
}
