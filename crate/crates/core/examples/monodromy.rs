//! Monodromy of Hill equations: a constant coefficient against its closed
//! form, and Meissner's piecewise-constant density against the transfer
//! matrix product.
//!
//! cargo run --release --example monodromy

use std::f64::consts::PI;

use capband::hill::{floquet_exponents, hill_monodromy, meissner_exponents, HillSystem};

fn main() -> anyhow::Result<()> {
    let w = 0.7;
    let t = 2.0 * PI / 0.2;
    let mono = hill_monodromy(&HillSystem::scalar(t, move |_| w * w)?, 1e-12)?;
    let exact = [(w * t).cos(), (w * t).sin() / w, -w * (w * t).sin(), (w * t).cos()];
    let got = [mono.w[(0, 0)].re, mono.w[(0, 1)].re, mono.w[(1, 0)].re, mono.w[(1, 1)].re];
    let err = exact.iter().zip(&got).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    println!("constant coefficient: max entry error {err:.1e}, det W = {:.12}", mono.determinant().re);
    println!("  exponents {:?}", floquet_exponents(&mono, 0.2).exponents);

    for (rho1, rho2) in [(1.0, 1.0), (0.8, 1.25), (0.5, 2.0)] {
        let ex = meissner_exponents(0.1, rho1, rho2, 0.0, t)?;
        println!("Meissner ρ = ({rho1}, {rho2}): ω = {:.6}{:+.2e}i, {:.6}{:+.2e}i", ex[0].re, ex[0].im, ex[1].re, ex[1].im);
    }
    Ok(())
}
