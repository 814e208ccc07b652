//! Scalar special functions used by the Beta-family likelihoods.
//!
//! `log_gamma` uses the Taylor series of ln Γ(2 + z) near the two real roots
//! (x = 1 and x = 2) so that relative accuracy holds there, upward/downward
//! recurrence in between, and the Stirling series for large arguments.
//! `digamma` and `trigamma` shift the argument to x >= 6 with the recurrence
//! and finish with their asymptotic expansions.

use crate::error::{Error, Result};

/// Euler–Mascheroni constant.
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// Residual target for [`inv_digamma`].
pub const INV_DIGAMMA_TOL: f64 = 1e-10;

/// Newton iteration cap for [`inv_digamma`].
pub const INV_DIGAMMA_MAX_ITERS: usize = 50;

const HALF_LN_2PI: f64 = 0.918_938_533_204_672_8;

// zeta(k) - 1 for k = 2..=40.
const ZETA_MINUS_ONE: [f64; 39] = [
    0.644_934_066_848_226_4,
    0.202_056_903_159_594_3,
    0.082_323_233_711_138_19,
    0.036_927_755_143_369_93,
    0.017_343_061_984_449_14,
    0.008_349_277_381_922_827,
    0.004_077_356_197_944_339,
    0.002_008_392_826_082_214,
    0.000_994_575_127_818_085_3,
    0.000_494_188_604_119_464_6,
    0.000_246_086_553_308_048_3,
    0.000_122_713_347_578_489_1,
    6.124_813_505_870_483e-5,
    3.058_823_630_702_049e-5,
    1.528_225_940_865_187e-5,
    7.637_197_637_899_762e-6,
    3.817_293_264_999_84e-6,
    1.908_212_716_553_939e-6,
    9.539_620_338_727_96e-7,
    4.769_329_867_878_065e-7,
    2.384_505_027_277_33e-7,
    1.192_199_259_653_111e-7,
    5.960_818_905_125_948e-8,
    2.980_350_351_465_228e-8,
    1.490_155_482_836_504e-8,
    7.450_711_789_835_429e-9,
    3.725_334_024_788_457e-9,
    1.862_659_723_513_049e-9,
    9.313_274_324_196_682e-10,
    4.656_629_065_033_784e-10,
    2.328_311_833_676_505e-10,
    1.164_155_017_270_052e-10,
    5.820_772_087_902_701e-11,
    2.910_385_044_497_1e-11,
    1.455_192_189_104_198e-11,
    7.275_959_835_057_481e-12,
    3.637_979_547_378_651e-12,
    1.818_989_650_307_066e-12,
    9.094_947_840_263_889e-13,
];

// B_{2k} / (2k (2k - 1)) for k = 1..=8.
const STIRLING: [f64; 8] = [
    1.0 / 12.0,
    -1.0 / 360.0,
    1.0 / 1260.0,
    -1.0 / 1680.0,
    1.0 / 1188.0,
    -691.0 / 360_360.0,
    1.0 / 156.0,
    -3617.0 / 122_400.0,
];

fn check_positive(x: f64, name: &str) -> Result<()> {
    if x.is_finite() && x > 0.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!("{name} requires a finite positive argument, got {x}")))
    }
}

/// ln Γ(2 + z) for |z| <= 0.5.
fn ln_gamma_two_plus(z: f64) -> f64 {
    let mut acc = 0.0;
    let mut pow = -z;
    for (i, zm1) in ZETA_MINUS_ONE.iter().enumerate() {
        pow *= -z;
        let k = (i + 2) as f64;
        acc += zm1 * pow / k;
    }
    z * (1.0 - EULER_GAMMA) + acc
}

fn ln_gamma_stirling(x: f64) -> f64 {
    let inv = 1.0 / x;
    let inv2 = inv * inv;
    let mut series = 0.0;
    let mut pow = inv;
    for c in STIRLING {
        series += c * pow;
        pow *= inv2;
    }
    (x - 0.5) * x.ln() - x + HALF_LN_2PI + series
}

pub(crate) fn ln_gamma_unchecked(x: f64) -> f64 {
    if x < 0.5 {
        // ln Γ(x) = ln Γ(x + 1) - ln x
        ln_gamma_unchecked(x + 1.0) - x.ln()
    } else if x < 1.5 {
        let z = x - 1.0;
        ln_gamma_two_plus(z) - z.ln_1p()
    } else if x < 2.5 {
        ln_gamma_two_plus(x - 2.0)
    } else if x < 10.0 {
        let mut y = x;
        let mut prod = 1.0;
        while y >= 2.5 {
            y -= 1.0;
            prod *= y;
        }
        ln_gamma_two_plus(y - 2.0) + prod.ln()
    } else {
        ln_gamma_stirling(x)
    }
}

/// Natural logarithm of the Gamma function for `x > 0`.
pub fn log_gamma(x: f64) -> Result<f64> {
    check_positive(x, "log_gamma")?;
    Ok(ln_gamma_unchecked(x))
}

/// ln B(a, b) = ln Γ(a) + ln Γ(b) - ln Γ(a + b).
pub fn log_beta(a: f64, b: f64) -> Result<f64> {
    check_positive(a, "log_beta")?;
    check_positive(b, "log_beta")?;
    Ok(ln_beta_unchecked(a, b))
}

/// Symmetric in its arguments: the first two terms are summed in a fixed
/// order independent of which argument is larger.
pub(crate) fn ln_beta_unchecked(a: f64, b: f64) -> f64 {
    let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
    ln_gamma_unchecked(lo) + ln_gamma_unchecked(hi) - ln_gamma_unchecked(lo + hi)
}

pub(crate) fn digamma_unchecked(mut x: f64) -> f64 {
    let mut shift = 0.0;
    while x < 10.0 {
        shift -= 1.0 / x;
        x += 1.0;
    }
    let inv = 1.0 / x;
    let inv2 = inv * inv;
    // ln x - 1/(2x) - sum B_{2k} / (2k x^{2k})
    let series = inv2
        * (1.0 / 12.0
            - inv2
                * (1.0 / 120.0
                    - inv2
                        * (1.0 / 252.0
                            - inv2 * (1.0 / 240.0 - inv2 * (1.0 / 132.0 - inv2 * (691.0 / 32_760.0))))));
    shift + x.ln() - 0.5 * inv - series
}

pub(crate) fn trigamma_unchecked(mut x: f64) -> f64 {
    let mut shift = 0.0;
    while x < 10.0 {
        shift += 1.0 / (x * x);
        x += 1.0;
    }
    let inv = 1.0 / x;
    let inv2 = inv * inv;
    // 1/x + 1/(2x^2) + sum B_{2k} / x^{2k+1}
    let series = inv
        * inv2
        * (1.0 / 6.0
            - inv2
                * (1.0 / 30.0
                    - inv2 * (1.0 / 42.0 - inv2 * (1.0 / 30.0 - inv2 * (5.0 / 66.0 - inv2 * (691.0 / 2730.0))))));
    shift + inv + 0.5 * inv2 + series
}

/// Digamma function ψ(x) = d/dx ln Γ(x) for `x > 0`.
pub fn digamma(x: f64) -> Result<f64> {
    check_positive(x, "digamma")?;
    Ok(digamma_unchecked(x))
}

/// Trigamma function ψ'(x) for `x > 0`.
pub fn trigamma(x: f64) -> Result<f64> {
    check_positive(x, "trigamma")?;
    Ok(trigamma_unchecked(x))
}

/// Solves ψ(x) = y for x > 0 by Newton's method started from Minka's
/// piecewise initial guess.
///
/// Stops when the residual drops below [`INV_DIGAMMA_TOL`], or when the
/// Newton step no longer changes `x` at machine precision (large |y|, where
/// the residual is bounded below by the spacing of `y` itself).
pub fn inv_digamma(y: f64) -> Result<f64> {
    if !y.is_finite() {
        return Err(Error::Domain(format!("inv_digamma requires a finite argument, got {y}")));
    }
    let mut x = if y >= -2.22 {
        y.exp() + 0.5
    } else {
        -1.0 / (y + EULER_GAMMA)
    };
    let mut residual = f64::INFINITY;
    for _ in 0..INV_DIGAMMA_MAX_ITERS {
        residual = digamma_unchecked(x) - y;
        if residual.abs() <= INV_DIGAMMA_TOL {
            return Ok(x);
        }
        let step = residual / trigamma_unchecked(x);
        let mut next = x - step;
        if next <= 0.0 {
            // Newton overshoot for very negative y; halve towards zero instead.
            next = 0.5 * x;
        }
        if (next - x).abs() <= 4.0 * f64::EPSILON * x {
            return Ok(next);
        }
        x = next;
    }
    Err(Error::Convergence {
        what: "inv_digamma",
        iterations: INV_DIGAMMA_MAX_ITERS,
        residual: residual.abs(),
    })
}
