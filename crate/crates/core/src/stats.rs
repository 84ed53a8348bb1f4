//! Distribution fitting and diagnostics for latency samples: min-max scaling,
//! method-of-moments beta fit, the regularized incomplete beta function,
//! Kolmogorov-Smirnov distance, and histograms.

use crate::error::{Error, Result};
use crate::randutil::ln_gamma;

/// Fitted beta shape parameters plus the scaling bounds and fit statistic.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BetaFit {
    pub alpha: f64,
    pub beta: f64,
    pub lower: f64,
    pub upper: f64,
    pub ks_stat: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Histogram {
    pub bin_edges: Vec<f64>,
    pub counts: Vec<u64>,
}

/// Scales samples into (0,1) with half-unit padding:
/// lower = min - 0.5, upper = max + 0.5.
pub fn min_max_scale(samples: &[f64]) -> Result<(Vec<f64>, f64, f64)> {
    if samples.len() < 2 {
        return Err(Error::InsufficientData(format!(
            "scaling needs >= 2 samples, got {}",
            samples.len()
        )));
    }
    let min = samples.iter().cloned().fold(f64::INFINITY, f64::min);
    let max = samples.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if min == max {
        return Err(Error::DegenerateVariance(format!(
            "all samples equal {min}; cannot scale"
        )));
    }
    let lower = min - 0.5;
    let upper = max + 0.5;
    let span = upper - lower;
    let scaled = samples.iter().map(|x| (x - lower) / span).collect();
    Ok((scaled, lower, upper))
}

/// Method-of-moments beta fit on (0,1) samples:
/// alpha = m(m(1-m)/v - 1), beta = (1-m)(m(1-m)/v - 1).
pub fn fit_beta_mom(scaled: &[f64]) -> Result<(f64, f64)> {
    if scaled.len() < 2 {
        return Err(Error::InsufficientData(format!(
            "fit needs >= 2 samples, got {}",
            scaled.len()
        )));
    }
    let n = scaled.len() as f64;
    let m = scaled.iter().sum::<f64>() / n;
    let v = scaled.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (n - 1.0);
    if v == 0.0 {
        return Err(Error::DegenerateVariance("zero sample variance".into()));
    }
    let bound = m * (1.0 - m);
    if v >= bound {
        return Err(Error::MomentInfeasible {
            variance: v,
            bound,
        });
    }
    let scale = bound / v - 1.0;
    Ok((m * scale, (1.0 - m) * scale))
}

/// Regularized incomplete beta function I_x(a, b), by continued fraction
/// (Lentz's algorithm) with the symmetry switch at x = (a+1)/(a+b+2).
pub fn regularized_incomplete_beta(x: f64, alpha: f64, beta: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::ParameterDomain(format!(
            "x must lie in [0,1], got {x}"
        )));
    }
    if !(alpha > 0.0) || !(beta > 0.0) {
        return Err(Error::ParameterDomain(format!(
            "shape parameters must be positive, got ({alpha}, {beta})"
        )));
    }
    Ok(betainc(x, alpha, beta))
}

fn betainc(x: f64, a: f64, b: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    if x >= 1.0 {
        return 1.0;
    }
    let ln_front =
        ln_gamma(a + b) - ln_gamma(a) - ln_gamma(b) + a * x.ln() + b * (1.0 - x).ln();
    let front = ln_front.exp();
    if x < (a + 1.0) / (a + b + 2.0) {
        front * beta_cf(x, a, b) / a
    } else {
        1.0 - front * beta_cf(1.0 - x, b, a) / b
    }
}

fn beta_cf(x: f64, a: f64, b: f64) -> f64 {
    const MAX_ITER: usize = 300;
    const EPS: f64 = 1e-15;
    const TINY: f64 = 1e-30;

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

    for m in 1..=MAX_ITER {
        let m_f = m as f64;
        let m2 = 2.0 * m_f;

        let aa = m_f * (b - m_f) * x / ((qam + m2) * (a + m2));
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

        let aa = -(a + m_f) * (qab + m_f) * x / ((a + m2) * (qap + m2));
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

        if (del - 1.0).abs() < EPS {
            break;
        }
    }
    h
}

/// Beta log-density, for PDF overlays.
pub fn beta_ln_pdf(x: f64, alpha: f64, beta: f64) -> f64 {
    ln_gamma(alpha + beta) - ln_gamma(alpha) - ln_gamma(beta)
        + (alpha - 1.0) * x.ln()
        + (beta - 1.0) * (1.0 - x).ln()
}

/// Two-sided KS distance between the empirical CDF of `scaled` and the
/// fitted beta CDF.
pub fn ks_statistic(scaled: &[f64], alpha: f64, beta: f64) -> Result<f64> {
    if scaled.is_empty() {
        return Err(Error::InsufficientData("KS needs >= 1 sample".into()));
    }
    let mut xs = scaled.to_vec();
    xs.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = xs.len() as f64;
    let mut d: f64 = 0.0;
    for (i, &x) in xs.iter().enumerate() {
        let f = regularized_incomplete_beta(x.clamp(0.0, 1.0), alpha, beta)?;
        let below = i as f64 / n;
        let above = (i + 1) as f64 / n;
        d = d.max((f - below).abs()).max((above - f).abs());
    }
    Ok(d)
}

/// Equal-width histogram over [min, max]; the last bin is right-closed.
/// All-equal samples collapse to a single unit-width bin around the value.
pub fn make_histogram(samples: &[f64], bins: usize) -> Result<Histogram> {
    if bins == 0 {
        return Err(Error::ParameterDomain("bins must be >= 1".into()));
    }
    if samples.is_empty() {
        return Err(Error::InsufficientData("histogram needs >= 1 sample".into()));
    }
    let min = samples.iter().cloned().fold(f64::INFINITY, f64::min);
    let max = samples.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if min == max {
        return Ok(Histogram {
            bin_edges: vec![min - 0.5, min + 0.5],
            counts: vec![samples.len() as u64],
        });
    }
    let width = (max - min) / bins as f64;
    let bin_edges: Vec<f64> = (0..=bins).map(|i| min + i as f64 * width).collect();
    let mut counts = vec![0u64; bins];
    for &x in samples {
        let idx = (((x - min) / width) as usize).min(bins - 1);
        counts[idx] += 1;
    }
    Ok(Histogram { bin_edges, counts })
}

/// Scale, fit, and score a latency sample set in one step.
pub fn fit_latency_samples(samples: &[f64]) -> Result<BetaFit> {
    let (scaled, lower, upper) = min_max_scale(samples)?;
    let (alpha, beta) = fit_beta_mom(&scaled)?;
    let ks_stat = ks_statistic(&scaled, alpha, beta)?;
    Ok(BetaFit {
        alpha,
        beta,
        lower,
        upper,
        ks_stat,
    })
}

/// Fit report CSV: `scenario,alpha,beta,lower,upper,ks_stat,n_samples`.
pub fn fit_report_csv(rows: &[(&str, BetaFit, usize)]) -> String {
    let mut out = String::from("scenario,alpha,beta,lower,upper,ks_stat,n_samples\n");
    for (scenario, fit, n) in rows {
        out.push_str(&format!(
            "{scenario},{},{},{},{},{},{n}\n",
            fit.alpha, fit.beta, fit.lower, fit.upper, fit.ks_stat
        ));
    }
    out
}

/// Inverse beta CDF by bisection on the regularized incomplete beta.
/// Test oracle and PDF-overlay helper; not a performance path.
pub fn beta_quantile(p: f64, alpha: f64, beta: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::ParameterDomain(format!(
            "quantile level must lie in [0,1], got {p}"
        )));
    }
    let mut lo = 0.0;
    let mut hi = 1.0;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if regularized_incomplete_beta(mid, alpha, beta)? < p {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}
