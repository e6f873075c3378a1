//! Log-gamma, regularized incomplete beta, Student-t tail and Pearson
//! correlation p-values.

use std::f64::consts::PI;

use crate::error::{Error, Result};

const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_8;

// Lanczos approximation, g = 7, n = 9.
const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

/// ln Γ(x) for x > 0 (reflection below 0.5).
pub fn ln_gamma(x: f64) -> f64 {
    if x < 0.5 {
        return (PI / (PI * x).sin()).abs().ln() - ln_gamma(1.0 - x);
    }
    if x >= 10.0 {
        return (x - 0.5) * x.ln() - x + LN_SQRT_2PI + stirling_correction(x);
    }
    let x = x - 1.0;
    let mut acc = LANCZOS[0];
    for (i, c) in LANCZOS.iter().enumerate().skip(1) {
        acc += c / (x + i as f64);
    }
    let t = x + LANCZOS_G + 0.5;
    LN_SQRT_2PI + (x + 0.5) * t.ln() - t + acc.ln()
}

/// Remainder of the Stirling series, ln Γ(x) - [(x-1/2) ln x - x + ln √(2π)],
/// accurate to double precision for x >= 10.
fn stirling_correction(x: f64) -> f64 {
    // Coefficients B_2k / (2k (2k-1)).
    const C: [f64; 8] = [
        1.0 / 12.0,
        -1.0 / 360.0,
        1.0 / 1260.0,
        -1.0 / 1680.0,
        1.0 / 1188.0,
        -691.0 / 360_360.0,
        1.0 / 156.0,
        -3617.0 / 122_400.0,
    ];
    let inv = 1.0 / x;
    let inv2 = inv * inv;
    let mut sum = 0.0;
    let mut pow = inv;
    for c in C {
        sum += c * pow;
        pow *= inv2;
    }
    sum
}

/// ln B(a, b), avoiding cancellation between large log-gamma terms.
pub fn ln_beta(a: f64, b: f64) -> f64 {
    let p = a.min(b);
    let q = a.max(b);
    if p >= 10.0 {
        let corr = stirling_correction(p) + stirling_correction(q) - stirling_correction(p + q);
        -0.5 * q.ln() + LN_SQRT_2PI + corr + (p - 0.5) * (p / (p + q)).ln()
            + q * (-p / (p + q)).ln_1p()
    } else if q >= 10.0 {
        let corr = stirling_correction(q) - stirling_correction(p + q);
        ln_gamma(p) + corr + p - p * (p + q).ln() + (q - 0.5) * (-p / (p + q)).ln_1p()
    } else {
        ln_gamma(p) + ln_gamma(q) - ln_gamma(p + q)
    }
}

const BETA_CF_TOL: f64 = 1e-14;
const BETA_CF_MAX_ITER: usize = 300;
const TINY: f64 = 1e-300;

/// Modified Lentz evaluation of the incomplete beta continued fraction.
fn beta_continued_fraction(a: f64, b: f64, x: f64) -> f64 {
    let qab = a + b;
    let qap = a + 1.0;
    let qam = a - 1.0;
    let mut c = 1.0;
    let mut d = 1.0 - qab * x / qap;
    if d.abs() < TINY {
        d = TINY;
    }
    d = 1.0 / d;
    let mut h = d;
    for m in 1..=BETA_CF_MAX_ITER {
        let m = m as f64;
        let m2 = 2.0 * m;
        let aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = 1.0 + aa / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        h *= d * c;
        let aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = 1.0 + aa / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        let del = d * c;
        h *= del;
        if (del - 1.0).abs() < BETA_CF_TOL {
            break;
        }
    }
    h
}

/// Regularized incomplete beta `I_x(a, b)` together with its complement.
///
/// `y` must equal `1 - x`; passing it separately lets callers that know the
/// complement exactly (e.g. `r^2` next to `1 - r^2`) avoid cancellation.
pub fn beta_reg_pair(a: f64, b: f64, x: f64, y: f64) -> (f64, f64) {
    if x <= 0.0 {
        return (0.0, 1.0);
    }
    if y <= 0.0 {
        return (1.0, 0.0);
    }
    let ln_front = a * x.ln() + b * y.ln() - ln_beta(a, b);
    if x < (a + 1.0) / (a + b + 2.0) {
        let v = (ln_front.exp() * beta_continued_fraction(a, b, x) / a).clamp(0.0, 1.0);
        (v, 1.0 - v)
    } else {
        let w = (ln_front.exp() * beta_continued_fraction(b, a, y) / b).clamp(0.0, 1.0);
        (1.0 - w, w)
    }
}

/// Regularized incomplete beta `I_x(a, b)`.
pub fn beta_reg(a: f64, b: f64, x: f64) -> f64 {
    beta_reg_pair(a, b, x, 1.0 - x).0
}

/// Upper tail probability P(T > t) of Student's t with `df` degrees of
/// freedom.
pub fn t_sf(t: f64, df: f64) -> Result<f64> {
    if !(df > 0.0) || df.is_infinite() {
        return Err(Error::InvalidParameter(format!(
            "degrees of freedom must be positive and finite, got {df}"
        )));
    }
    if t.is_nan() {
        return Err(Error::NonFiniteInput("t statistic"));
    }
    let t2 = t * t;
    // tail = P(T > |t|) = I_{df/(df+t^2)}(df/2, 1/2) / 2
    let tail = if t2.is_infinite() {
        0.0
    } else {
        let x = df / (df + t2);
        let y = t2 / (df + t2);
        0.5 * beta_reg_pair(0.5 * df, 0.5, x, y).0
    };
    Ok(if t >= 0.0 { tail } else { 1.0 - tail })
}

pub fn mean(x: &[f64]) -> f64 {
    x.iter().sum::<f64>() / x.len() as f64
}

/// Sample variance with the (n - 1) denominator; zero for fewer than two
/// values.
pub fn variance(x: &[f64]) -> f64 {
    if x.len() < 2 {
        return 0.0;
    }
    let m = mean(x);
    x.iter().map(|v| (v - m).powi(2)).sum::<f64>() / (x.len() - 1) as f64
}

pub fn std_dev(x: &[f64]) -> f64 {
    variance(x).sqrt()
}

/// Sample Pearson correlation. Requires n >= 3 and non-constant inputs.
pub fn pearson_r(x: &[f64], y: &[f64]) -> Result<f64> {
    if x.len() != y.len() {
        return Err(Error::DimensionMismatch(format!(
            "pearson_r on vectors of length {} and {}",
            x.len(),
            y.len()
        )));
    }
    if x.len() < 3 {
        return Err(Error::InvalidParameter(format!(
            "pearson_r needs at least 3 samples, got {}",
            x.len()
        )));
    }
    let mx = mean(x);
    let my = mean(y);
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        let dx = a - mx;
        let dy = b - my;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if sxx == 0.0 || syy == 0.0 {
        return Err(Error::ZeroVariance);
    }
    Ok((sxy / (sxx.sqrt() * syy.sqrt())).clamp(-1.0, 1.0))
}

/// Two-sided p-value of a Pearson correlation `r` over `n` samples, from
/// the t statistic `r sqrt((n-2)/(1-r^2))` with n - 2 degrees of freedom.
pub fn pearson_p(r: f64, n: usize) -> Result<f64> {
    if n < 3 {
        return Err(Error::InvalidParameter(format!(
            "pearson_p needs n >= 3, got {n}"
        )));
    }
    if r.is_nan() || r.abs() > 1.0 {
        return Err(Error::InvalidParameter(format!("correlation {r} outside [-1, 1]")));
    }
    let r2 = r * r;
    if r2 >= 1.0 {
        return Ok(0.0);
    }
    // 2 * t_sf(|t|, n-2) with df/(df+t^2) = 1 - r^2 exactly.
    let df = (n - 2) as f64;
    Ok(beta_reg_pair(0.5 * df, 0.5, 1.0 - r2, r2).0.clamp(0.0, 1.0))
}
