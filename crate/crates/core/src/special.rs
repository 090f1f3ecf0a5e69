//! Bessel functions of integer order and the exponential integral.

/// Euler–Mascheroni constant.
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// J_0(x), ..., J_{nmax}(x) for x ≥ 0 by Miller's backward recurrence,
/// normalised with J_0 + 2ΣJ_{2k} = 1.
pub fn bessel_j_seq(nmax: usize, x: f64) -> Vec<f64> {
    let mut out = vec![0.0; nmax + 1];
    if x == 0.0 {
        out[0] = 1.0;
        return out;
    }
    let ax = x.abs();
    let top = nmax.max(ax.ceil() as usize);
    let mut start = top + 20 + (40.0 * top as f64).sqrt() as usize;
    start += start % 2;
    let mut jp1 = 0.0;
    let mut j = 1e-300;
    let mut norm = 0.0;
    for k in (1..=start).rev() {
        let jm1 = 2.0 * k as f64 / ax * j - jp1;
        jp1 = j;
        j = jm1;
        let km1 = k - 1;
        if km1 <= nmax {
            out[km1] = j;
        }
        if km1 % 2 == 0 && km1 > 0 {
            norm += 2.0 * j;
        }
        if j.abs() > 1e250 {
            j *= 1e-250;
            jp1 *= 1e-250;
            norm *= 1e-250;
            for v in out.iter_mut() {
                *v *= 1e-250;
            }
        }
    }
    norm += j;
    for v in out.iter_mut() {
        *v /= norm;
    }
    if x < 0.0 {
        for (n, v) in out.iter_mut().enumerate() {
            if n % 2 == 1 {
                *v = -*v;
            }
        }
    }
    out
}

/// Exponential integral E₁(x) for x > 0.
pub fn exp_int_e1(x: f64) -> f64 {
    assert!(x > 0.0, "E1 needs a positive argument, got {x}");
    if x > 700.0 {
        return 0.0;
    }
    if x <= 1.0 {
        -EULER_GAMMA - x.ln() + ein_series(x)
    } else {
        // modified Lentz on the continued fraction for e^x E₁(x)
        let tiny = 1e-300;
        let mut b = x + 1.0;
        let mut c = 1.0 / tiny;
        let mut d = 1.0 / b;
        let mut h = d;
        for i in 1..500 {
            let an = -((i * i) as f64);
            b += 2.0;
            d = 1.0 / (an * d + b);
            c = b + an / c;
            let del = c * d;
            h *= del;
            if (del - 1.0).abs() < 1e-16 {
                break;
            }
        }
        h * (-x).exp()
    }
}

/// Entire function Ein(z) = ∫₀^z (1 − e^{−t})/t dt = E₁(z) + γ + ln z.
pub fn ein(z: f64) -> f64 {
    if z <= 2.0 {
        ein_series(z)
    } else {
        exp_int_e1(z) + EULER_GAMMA + z.ln()
    }
}

fn ein_series(z: f64) -> f64 {
    let mut term = 1.0;
    let mut sum = 0.0;
    for k in 1..200 {
        term *= -z / k as f64;
        let add = -term / k as f64;
        sum += add;
        if add.abs() < 1e-17 * sum.abs() {
            break;
        }
    }
    sum
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bessel_values() {
        let j = bessel_j_seq(3, 1.0);
        assert!((j[0] - 0.765_197_686_557_966_6).abs() < 1e-15);
        assert!((j[1] - 0.440_050_585_744_933_5).abs() < 1e-15);
        assert!((j[2] - 0.114_903_484_931_900_5).abs() < 1e-15);
        let j = bessel_j_seq(1, 10.0);
        assert!((j[0] + 0.245_935_764_451_348_3).abs() < 1e-14);
        assert!((j[1] - 0.043_472_746_168_861_44).abs() < 1e-14);
        let j = bessel_j_seq(20, 0.5);
        assert!(j[20] > 0.0 && j[20] < 1e-30);
    }

    #[test]
    fn e1_values() {
        assert!((exp_int_e1(1.0) - 0.219_383_934_395_520_3).abs() < 1e-15);
        assert!((exp_int_e1(0.1) - 1.822_923_958_419_390_7).abs() < 1e-14);
        assert!((exp_int_e1(5.0) - 0.001_148_295_591_275_325_8).abs() < 1e-17);
        let z: f64 = 1.5;
        assert!((ein(z) - (exp_int_e1(z) + EULER_GAMMA + z.ln())).abs() < 1e-14);
        assert!((ein_series(3.0) - ein(3.0)).abs() < 1e-13);
    }
}
