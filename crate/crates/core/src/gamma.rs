use crate::error::{Error, Result};
use crate::scalar::Scalar;

const LANCZOS_G: f64 = 7.0;
/// 22! is the largest factorial exactly representable in `f64`.
const EXACT_FACTORIAL_MAX: f64 = 23.0;
#[allow(clippy::excessive_precision)]
const LANCZOS_COEFFS: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

/// Euler gamma function for `x > 0` (Lanczos, g = 7, nine terms).
///
/// Arguments below 1 are shifted up with `Γ(x) = Γ(x+1)/x`; small positive
/// integers return the exact factorial.
pub fn gamma<S: Scalar>(x: S) -> Result<S> {
    if !(x > S::zero()) || !x.is_finite() {
        return Err(Error::GammaDomain(x.as_f64()));
    }
    if x.fract() == S::zero() && x <= S::lit(EXACT_FACTORIAL_MAX) {
        let n = x.to_usize().expect("small positive integer");
        return Ok((1..n).fold(S::one(), |acc, k| acc * S::from_count(k)));
    }
    if x < S::one() {
        return Ok(lanczos(x + S::one()) / x);
    }
    Ok(lanczos(x))
}

fn lanczos<S: Scalar>(x: S) -> S {
    let z = x - S::one();
    let mut series = S::lit(LANCZOS_COEFFS[0]);
    for (k, &c) in LANCZOS_COEFFS.iter().enumerate().skip(1) {
        series = series + S::lit(c) / (z + S::from_count(k));
    }
    let w = z + S::lit(LANCZOS_G + 0.5);
    (S::lit(2.0) * S::PI()).sqrt() * w.powf(z + S::lit(0.5)) * (-w).exp() * series
}
