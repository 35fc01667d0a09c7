//! Modified Bessel function K₁ for complex arguments with `Re z >= 0`.

use num_complex::Complex64;
use std::f64::consts::PI;

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;
const SERIES_RADIUS: f64 = 2.0;
const ASYMPTOTIC_RADIUS: f64 = 25.0;

/// K₁(z) on the closed right half-plane, principal branch.
///
/// Ascending series for `|z| <= 2`, Steed's continued fraction up to
/// `|z| = 25`, Hankel asymptotic expansion beyond.
pub fn bessel_k1(z: Complex64) -> Complex64 {
    let a = z.norm();
    if a <= SERIES_RADIUS {
        k1_series(z)
    } else if a <= ASYMPTOTIC_RADIUS {
        k1_continued_fraction(z)
    } else {
        k1_asymptotic(z)
    }
}

/// Real-argument convenience wrapper.
pub fn bessel_k1_real(x: f64) -> f64 {
    bessel_k1(Complex64::new(x, 0.0)).re
}

fn k1_series(z: Complex64) -> Complex64 {
    let y = z * z * 0.25;
    let mut term = Complex64::new(1.0, 0.0);
    let mut i1_sum = Complex64::new(0.0, 0.0);
    let mut psi_sum = Complex64::new(0.0, 0.0);
    let mut harmonic = 0.0;
    for k in 0..60 {
        let kf = k as f64;
        if k > 0 {
            term *= y / (kf * (kf + 1.0));
            harmonic += 1.0 / kf;
        }
        let psi = -2.0 * EULER_GAMMA + 2.0 * harmonic + 1.0 / (kf + 1.0);
        i1_sum += term;
        psi_sum += term * psi;
        if term.norm() < 1e-18 * i1_sum.norm() {
            break;
        }
    }
    let i1 = z * 0.5 * i1_sum;
    z.inv() + (z * 0.5).ln() * i1 - z * 0.25 * psi_sum
}

fn k1_continued_fraction(z: Complex64) -> Complex64 {
    let one = Complex64::new(1.0, 0.0);
    let mut b = (one + z) * 2.0;
    let mut d = b.inv();
    let mut h = d;
    let mut delh = d;
    let mut q1 = Complex64::new(0.0, 0.0);
    let mut q2 = one;
    let a1 = 0.25;
    let mut q = Complex64::new(a1, 0.0);
    let mut c = Complex64::new(a1, 0.0);
    let mut a = -a1;
    let mut s = one + q * delh;
    for i in 2..10_000 {
        a -= 2.0 * (i as f64 - 1.0);
        c = -c * a / i as f64;
        let qnew = (q1 - b * q2) / a;
        q1 = q2;
        q2 = qnew;
        q += c * qnew;
        b += 2.0;
        d = (b + d * a).inv();
        delh = (b * d - 1.0) * delh;
        h += delh;
        let dels = q * delh;
        s += dels;
        if dels.norm() < 1e-17 * s.norm() {
            break;
        }
    }
    h *= a1;
    let k0 = (Complex64::new(PI * 0.5, 0.0) / z).sqrt() * (-z).exp() / s;
    k0 * (z + 0.5 - h) / z
}

fn k1_asymptotic(z: Complex64) -> Complex64 {
    // mu = 4 nu^2 = 4
    let mut term = Complex64::new(1.0, 0.0);
    let mut sum = term;
    let inv8z = (z * 8.0).inv();
    let mut prev = f64::INFINITY;
    for k in 1..40 {
        let odd = (2 * k - 1) as f64;
        term *= inv8z * (4.0 - odd * odd) / k as f64;
        let size = term.norm();
        if size > prev {
            break;
        }
        sum += term;
        prev = size;
        if size < 1e-17 * sum.norm() {
            break;
        }
    }
    (Complex64::new(PI * 0.5, 0.0) / z).sqrt() * (-z).exp() * sum
}

#[cfg(test)]
mod tests {
    use super::*;

    fn k1_integral(z: Complex64) -> Complex64 {
        // K1(z) = int_0^inf exp(-z cosh s) cosh s ds, trapezoid converges geometrically
        let h = 0.01;
        let mut acc = Complex64::new(0.5, 0.0) * (-z).exp();
        for j in 1..2000 {
            let s = j as f64 * h;
            let v = (-z * s.cosh()).exp() * s.cosh();
            acc += v;
            if v.norm() < 1e-30 {
                break;
            }
        }
        acc * h
    }

    #[test]
    fn reference_values() {
        let cases = [
            (0.1, 9.853_844_780_870_606),
            (1.0, 0.601_907_230_197_234_6),
            (2.0, 0.139_865_881_816_522_43),
            (5.0, 4.044_613_445_452_165e-3),
            (30.0, 2.167_732_001_891_549_5e-14),
        ];
        for (x, want) in cases {
            let got = bessel_k1_real(x);
            assert!(((got - want) / want).abs() < 1e-13, "K1({x}) = {got}, want {want}");
        }
    }

    #[test]
    fn branches_agree_with_integral_representation() {
        for &(re, im) in &[
            (0.5, 0.3),
            (1.9, 0.4),
            (2.1, -0.7),
            (3.0, 2.0),
            (6.0, -5.0),
            (12.0, 8.0),
            (24.0, 3.0),
            (26.0, -3.0),
        ] {
            let z = Complex64::new(re, im);
            let a = bessel_k1(z);
            let b = k1_integral(z);
            assert!((a - b).norm() < 1e-12 * b.norm(), "z={z}: {a} vs {b}");
        }
    }

    #[test]
    fn near_imaginary_axis() {
        let cases = [
            ((0.0, 1.99), (-0.906_898_464_525_623_6, -0.176_999_542_446_998_28)),
            ((0.0, 2.01), (-0.904_873_074_884_862_8, -0.159_284_437_121_076_4)),
            ((0.0, 7.5), (-0.212_447_733_246_987, -0.407_038_112_439_424_3)),
            ((0.0, 24.9), (0.211_830_837_471_293_3, -0.135_092_501_566_063_14)),
            ((0.0, 25.1), (0.180_067_897_841_276_86, -0.173_764_997_616_125_27)),
            ((0.05, 3.0), (-0.511_838_935_437_305, 0.481_428_393_974_409_4)),
            ((0.3, -12.0), (0.260_995_554_444_850_7, 0.063_207_401_799_605_92)),
        ];
        for ((re, im), (wr, wi)) in cases {
            let got = bessel_k1(Complex64::new(re, im));
            let want = Complex64::new(wr, wi);
            assert!((got - want).norm() < 1e-12 * want.norm(), "z=({re},{im}): {got} vs {want}");
        }
    }
}
