//! Coarse Mathieu stability chart: `.` stable, `#` unstable (complex ν). The
//! two routes to ν are compared away from the tongue boundaries, where ν is
//! not Lipschitz in cos πν.
//!
//! cargo run --release --example mathieu_chart

use capband::mathieu::{mathieu_char_exponent, near_tongue_boundary, MathieuMethod, MathieuParams};

fn main() -> anyhow::Result<()> {
    let mut worst: f64 = 0.0;
    for i in (0..=24).rev() {
        let a = i as f64 * 0.5;
        let mut line = format!("a = {a:5.1} ");
        for j in 0..=40 {
            let q = j as f64 * 0.25;
            let p = MathieuParams { a, q };
            let det = mathieu_char_exponent(p, MathieuMethod::HillDeterminant)?;
            let mono = mathieu_char_exponent(p, MathieuMethod::Monodromy)?;
            if !near_tongue_boundary(p, 1e-6) {
                worst = worst.max((det - mono).norm());
            }
            line.push(if det.im.abs() > 1e-9 { '#' } else { '.' });
        }
        println!("{line}");
    }
    println!("           q = 0 .. 10");
    println!("largest |ν_det − ν_mono| off the boundaries = {worst:.1e}");
    Ok(())
}
