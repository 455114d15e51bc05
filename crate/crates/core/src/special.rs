//! Special functions: orthonormal Hermite functions and the exponentially
//! scaled modified Bessel function of order zero.

use std::f64::consts::PI;

/// Fills `out[k]` with the orthonormal Hermite function
/// `φ_k(y) = (2^k k! √π)^{-1/2} H_k(y) e^{-y²/2}` for `k = 0..out.len()`.
///
/// Uses the three-term recurrence on the normalized functions, so neither
/// `k!` nor `H_k` is ever formed.
pub fn hermite_functions_into(y: f64, out: &mut [f64]) {
    if out.is_empty() {
        return;
    }
    out[0] = PI.powf(-0.25) * (-0.5 * y * y).exp();
    if out.len() > 1 {
        out[1] = std::f64::consts::SQRT_2 * y * out[0];
    }
    for n in 1..out.len().saturating_sub(1) {
        let nf = n as f64;
        out[n + 1] = (2.0 / (nf + 1.0)).sqrt() * y * out[n] - (nf / (nf + 1.0)).sqrt() * out[n - 1];
    }
}

/// Orthonormal Hermite function `φ_k(y)`.
pub fn hermite_function(k: usize, y: f64) -> f64 {
    let mut buf = vec![0.0; k + 1];
    hermite_functions_into(y, &mut buf);
    buf[k]
}

// Chebyshev expansions of exp(-x) I0(x) on [0, 8] and of exp(-x) sqrt(x) I0(x)
// on (8, inf), from the Cephes library.
#[allow(clippy::excessive_precision)]
const I0E_COEFFS_SMALL: [f64; 30] = [
    -4.415_341_646_479_339_5E-18,
    3.330_794_518_822_238_4E-17,
    -2.431_279_846_547_955E-16,
    1.715_391_285_555_133E-15,
    -1.168_533_287_799_345_1E-14,
    7.676_185_498_604_936E-14,
    -4.856_446_783_111_929E-13,
    2.955_052_663_129_64E-12,
    -1.726_826_291_441_556E-11,
    9.675_809_035_373_237E-11,
    -5.189_795_601_635_263E-10,
    2.659_823_724_682_386_6E-9,
    -1.300_025_009_986_248E-8,
    6.046_995_022_541_919E-8,
    -2.670_793_853_940_612E-7,
    1.117_387_539_120_103_7E-6,
    -4.416_738_358_458_750_5E-6,
    1.644_844_807_072_889_6E-5,
    -5.754_195_010_082_104E-5,
    1.885_028_850_958_416_5E-4,
    -5.763_755_745_385_824E-4,
    1.639_475_616_941_335_7E-3,
    -4.324_309_995_050_576E-3,
    1.054_646_039_459_499_8E-2,
    -2.373_741_480_589_947E-2,
    4.930_528_423_967_071E-2,
    -9.490_109_704_804_764E-2,
    1.716_209_015_222_087_7E-1,
    -3.046_826_723_431_984E-1,
    6.767_952_744_094_761E-1,
];

#[allow(clippy::excessive_precision)]
const I0E_COEFFS_LARGE: [f64; 25] = [
    -7.233_180_487_874_754E-18,
    -4.830_504_485_944_182E-18,
    4.465_621_420_296_76E-17,
    3.461_222_867_697_461E-17,
    -2.827_623_980_516_583_6E-16,
    -3.425_485_619_677_219E-16,
    1.772_560_133_056_526_3E-15,
    3.811_680_669_352_622_4E-15,
    -9.554_846_698_828_307E-15,
    -4.150_569_347_287_222E-14,
    1.540_086_217_521_41E-14,
    3.852_778_382_742_142_6E-13,
    7.180_124_451_383_666E-13,
    -1.794_178_531_506_806_2E-12,
    -1.321_581_184_044_771_3E-11,
    -3.149_916_527_963_241_6E-11,
    1.188_914_710_784_643_9E-11,
    4.940_602_388_224_97E-10,
    3.396_232_025_708_386_5E-9,
    2.266_668_990_498_178E-8,
    2.048_918_589_469_063_8E-7,
    2.891_370_520_834_756_7E-6,
    6.889_758_346_916_825E-5,
    3.369_116_478_255_694_3E-3,
    8.044_904_110_141_088E-1,
];

fn chbevl(x: f64, coeffs: &[f64]) -> f64 {
    let mut b0 = coeffs[0];
    let mut b1 = 0.0;
    let mut b2 = 0.0;
    for c in &coeffs[1..] {
        b2 = b1;
        b1 = b0;
        b0 = x.mul_add(b1, *c) - b2;
    }
    0.5 * (b0 - b2)
}

/// Exponentially scaled modified Bessel function `e^{-|x|} I₀(x)`.
///
/// Finite for every finite argument; the unscaled `I₀` overflows near 713.
pub fn bessel_i0e(x: f64) -> f64 {
    let ax = x.abs();
    if ax <= 8.0 {
        chbevl(0.5 * ax - 2.0, &I0E_COEFFS_SMALL)
    } else {
        chbevl(32.0 / ax - 2.0, &I0E_COEFFS_LARGE) / ax.sqrt()
    }
}

/// Modified Bessel function `I₀(x)`.
pub fn bessel_i0(x: f64) -> f64 {
    x.abs().exp() * bessel_i0e(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    // Power series Σ (x²/4)^m / (m!)², summed until negligible.
    fn i0_series(x: f64) -> f64 {
        let q = 0.25 * x * x;
        let mut term = 1.0;
        let mut sum = 1.0;
        for m in 1..500 {
            term *= q / (m as f64 * m as f64);
            sum += term;
            if term < 1e-17 * sum {
                break;
            }
        }
        sum
    }

    #[test]
    fn i0_matches_power_series() {
        for &x in &[0.0, 0.1, 1.0, 3.75, 5.0, 8.0, 8.5, 12.0, 25.0] {
            let s = i0_series(x);
            let rel = (bessel_i0(x) - s).abs() / s;
            assert!(rel < 1e-14, "x = {x}: rel err {rel}");
        }
    }

    #[test]
    fn i0e_reference_values() {
        assert!((bessel_i0(1.0) - 1.266_065_877_752_008_4).abs() < 1e-14);
        assert!((bessel_i0(10.0) - 2_815.716_628_466_254_4).abs() / 2815.7 < 1e-14);
        // Large argument: e^{-x} I0(x) ~ 1/sqrt(2 pi x) (1 + 1/(8x) + 9/(128 x²))
        let x = 4000.0_f64;
        let asym = (1.0 + 1.0 / (8.0 * x) + 9.0 / (128.0 * x * x)) / (2.0 * PI * x).sqrt();
        assert!((bessel_i0e(x) - asym).abs() / asym < 1e-10);
        assert!(bessel_i0e(1e6).is_finite());
        assert_eq!(bessel_i0e(-3.0), bessel_i0e(3.0));
    }

    #[test]
    fn hermite_functions_low_orders() {
        let y = 0.7_f64;
        let g = PI.powf(-0.25) * (-0.5 * y * y).exp();
        let h2 = (4.0 * y * y - 2.0) / (8.0_f64).sqrt();
        assert!((hermite_function(0, y) - g).abs() < 1e-15);
        assert!((hermite_function(1, y) - std::f64::consts::SQRT_2 * y * g).abs() < 1e-15);
        assert!((hermite_function(2, y) - h2 * g).abs() < 1e-15);
    }

    #[test]
    fn hermite_high_order_is_finite() {
        let mut buf = vec![0.0; 201];
        for &y in &[0.0, 1.0, 7.0, 14.2] {
            hermite_functions_into(y, &mut buf);
            assert!(buf.iter().all(|v| v.is_finite() && v.abs() < 1.0));
        }
    }
}
