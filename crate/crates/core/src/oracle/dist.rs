use rand::Rng;
use rand_distr::{Beta, Distribution, Gamma};
use serde::{Deserialize, Serialize};
use statrs::distribution::{Beta as BetaLaw, ContinuousCDF};
use statrs::function::factorial::{ln_binomial, ln_factorial};

use super::OracleError;
use crate::tree::GrowthRule;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BetaParams {
    pub alpha: f64,
    pub beta: f64,
}

impl BetaParams {
    pub fn new(alpha: f64, beta: f64) -> Result<Self, OracleError> {
        if !(alpha > 0.0 && beta > 0.0 && alpha.is_finite() && beta.is_finite()) {
            return Err(OracleError::Domain(format!(
                "Beta({alpha}, {beta}) needs positive finite parameters"
            )));
        }
        Ok(BetaParams { alpha, beta })
    }

    pub fn mean(&self) -> f64 {
        self.alpha / (self.alpha + self.beta)
    }
}

pub fn beta_sample<R: Rng + ?Sized>(p: BetaParams, rng: &mut R) -> f64 {
    Beta::new(p.alpha, p.beta)
        .expect("validated parameters")
        .sample(rng)
}

/// A point of the 2-simplex drawn from `Dir(a1, a2, a3)` by normalising
/// independent gamma variables.
pub fn dirichlet3_sample<R: Rng + ?Sized>(
    a1: f64,
    a2: f64,
    a3: f64,
    rng: &mut R,
) -> Result<[f64; 3], OracleError> {
    let g = |a: f64| {
        Gamma::new(a, 1.0)
            .map_err(|e| OracleError::Domain(format!("Dirichlet parameter {a}: {e}")))
    };
    let (g1, g2, g3) = (g(a1)?, g(a2)?, g(a3)?);
    let x = [g1.sample(rng), g2.sample(rng), g3.sample(rng)];
    let total = x[0] + x[1] + x[2];
    Ok([x[0] / total, x[1] / total, x[2] / total])
}

/// Regularised incomplete beta function, i.e. the `Beta(a, b)` CDF at `x`.
pub fn beta_cdf(a: f64, b: f64, x: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    if x >= 1.0 {
        return 1.0;
    }
    BetaLaw::new(a, b).expect("positive parameters").cdf(x)
}

/// `P(B = alpha + k)` where `B - alpha` is beta-binomial with parameters
/// `(alpha, beta, n)`: the number of first-colour draws in `n` draws from a
/// classic Pólya urn started at `(alpha, beta)`.
pub fn beta_binomial_pmf(alpha: u64, beta: u64, n: u64, k: u64) -> Result<f64, OracleError> {
    if k > n {
        return Err(OracleError::OutOfSupport { k, n });
    }
    if alpha == 0 || beta == 0 {
        return Err(OracleError::Domain(format!(
            "beta-binomial needs alpha, beta >= 1 (got {alpha}, {beta})"
        )));
    }
    let log_p = ln_factorial(k + alpha - 1) + ln_factorial(n - k + beta - 1)
        + ln_factorial(alpha + beta - 1)
        - ln_factorial(n + alpha + beta - 1)
        - ln_factorial(alpha - 1)
        - ln_factorial(beta - 1)
        + ln_binomial(n, k);
    Ok(log_p.exp())
}

/// One draw of the truncated stick-breaking representation of the limiting
/// normalised anti-centrality of a fixed vertex.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LimitSample {
    /// `max` of the first `depth + 1` stick pieces.
    pub value: f64,
    /// Unassigned stick length; an upper bound on any piece not drawn.
    pub residual: f64,
}

/// Stick-breaking draw with `depth + 1` pieces for a vertex with timestamp `tau`.
pub fn limit_anticentrality_sample<R: Rng + ?Sized>(
    rule: GrowthRule,
    tau: usize,
    depth: usize,
    rng: &mut R,
) -> Result<LimitSample, OracleError> {
    if tau < 2 {
        return Err(OracleError::Domain(format!("timestamp {tau} < 2")));
    }
    if depth < 1 {
        return Err(OracleError::Domain("truncation depth must be >= 1".into()));
    }
    let tau = tau as f64;
    let first = match rule {
        GrowthRule::Uniform => BetaParams::new(tau - 1.0, 1.0)?,
        GrowthRule::Preferential => BetaParams::new(tau - 1.5, 0.5)?,
    };
    let mut remaining = 1.0;
    let mut best = 0.0f64;
    for k in 0..=depth {
        let params = if k == 0 {
            first
        } else {
            match rule {
                GrowthRule::Uniform => BetaParams::new(1.0, 1.0)?,
                GrowthRule::Preferential => BetaParams::new(0.5, (k as f64 + 1.0) / 2.0)?,
            }
        };
        let phi = beta_sample(params, rng);
        let piece = phi * remaining;
        best = best.max(piece);
        remaining *= 1.0 - phi;
    }
    Ok(LimitSample {
        value: best,
        residual: remaining,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::ks_one_sample;
    use crate::rng::RngSpec;

    #[test]
    fn beta_means() {
        let mut rng = RngSpec::new(1).rng();
        for (a, b, n) in [(1.0, 1.0, 100_000), (2.0, 5.0, 100_000), (0.5, 3.5, 100_000)] {
            let p = BetaParams::new(a, b).unwrap();
            let xs: Vec<f64> = (0..n).map(|_| beta_sample(p, &mut rng)).collect();
            let mean = xs.iter().sum::<f64>() / n as f64;
            let var = a * b / ((a + b) * (a + b) * (a + b + 1.0));
            assert!((mean - p.mean()).abs() < 3.0 * (var / n as f64).sqrt(), "{a} {b} {mean}");
            assert!(xs.iter().all(|&x| (0.0..=1.0).contains(&x)));
        }
        assert!(BetaParams::new(0.0, 1.0).is_err());
        assert!(BetaParams::new(1.0, f64::NAN).is_err());
    }

    #[test]
    fn beta_samples_pass_ks() {
        let mut rng = RngSpec::new(2).rng();
        let p = BetaParams::new(2.0, 3.0).unwrap();
        let xs: Vec<f64> = (0..5000).map(|_| beta_sample(p, &mut rng)).collect();
        let ks = ks_one_sample(&xs, |x| beta_cdf(2.0, 3.0, x));
        assert!(ks.p_value > 0.01, "{ks:?}");
    }

    #[test]
    fn dirichlet_on_simplex() {
        let mut rng = RngSpec::new(3).rng();
        let mut sums = [0.0; 3];
        let n = 20_000;
        for _ in 0..n {
            let d = dirichlet3_sample(2.0, 3.0, 7.0, &mut rng).unwrap();
            let total: f64 = d.iter().sum();
            assert!((total - 1.0).abs() <= 4.0 * f64::EPSILON);
            for i in 0..3 {
                sums[i] += d[i];
            }
        }
        for (s, expected) in sums.iter().zip([2.0 / 12.0, 3.0 / 12.0, 7.0 / 12.0]) {
            assert!((s / n as f64 - expected).abs() < 0.01);
        }
        assert!(dirichlet3_sample(0.0, 1.0, 1.0, &mut rng).is_err());
    }

    #[test]
    fn beta_binomial_uniform_case() {
        for n in [0u64, 1, 5, 40] {
            for k in 0..=n {
                let p = beta_binomial_pmf(1, 1, n, k).unwrap();
                assert!((p - 1.0 / (n + 1) as f64).abs() < 1e-13);
            }
        }
    }

    #[test]
    fn beta_binomial_normalises() {
        for a in 1..=4 {
            for b in 1..=4 {
                for n in 1..=50 {
                    let total: f64 = (0..=n).map(|k| beta_binomial_pmf(a, b, n, k).unwrap()).sum();
                    assert!((total - 1.0).abs() < 1e-12, "{a} {b} {n}: {total}");
                }
            }
        }
    }

    /// Probability of each first-colour count after `n` classic draws, by
    /// walking every draw sequence.
    fn enumerate_urn(a: u64, b: u64, n: u64) -> Vec<f64> {
        fn walk(a: u64, b: u64, left: u64, drawn: usize, p: f64, out: &mut [f64]) {
            if left == 0 {
                out[drawn] += p;
                return;
            }
            let total = (a + b) as f64;
            walk(a + 1, b, left - 1, drawn + 1, p * a as f64 / total, out);
            walk(a, b + 1, left - 1, drawn, p * b as f64 / total, out);
        }
        let mut out = vec![0.0; n as usize + 1];
        walk(a, b, n, 0, 1.0, &mut out);
        out
    }

    #[test]
    fn beta_binomial_matches_urn_enumeration() {
        assert!((beta_binomial_pmf(2, 2, 2, 1).unwrap() - 0.4).abs() < 1e-15);
        for (a, b, n) in [(2, 2, 2), (1, 3, 6), (3, 1, 8), (2, 5, 10)] {
            let exact = enumerate_urn(a, b, n);
            for k in 0..=n {
                let p = beta_binomial_pmf(a, b, n, k).unwrap();
                assert!((p - exact[k as usize]).abs() < 1e-13);
            }
        }
        assert_eq!(
            beta_binomial_pmf(1, 1, 3, 4),
            Err(OracleError::OutOfSupport { k: 4, n: 3 })
        );
    }

    #[test]
    fn beta_binomial_large_n_stays_finite() {
        let total: f64 = (0..=5000).map(|k| beta_binomial_pmf(3, 7, 5000, k).unwrap()).sum();
        assert!((total - 1.0).abs() < 1e-9);
    }

    #[test]
    fn limit_sample_shape() {
        let mut rng = RngSpec::new(4).rng();
        for rule in [GrowthRule::Uniform, GrowthRule::Preferential] {
            for _ in 0..1000 {
                let s = limit_anticentrality_sample(rule, 2, 1, &mut rng).unwrap();
                assert!(s.value > 0.0 && s.value <= 1.0);
                assert!(s.residual >= 0.0 && s.value + s.residual <= 1.0 + 1e-12);
            }
        }
        assert!(limit_anticentrality_sample(GrowthRule::Uniform, 1, 4, &mut rng).is_err());
        assert!(limit_anticentrality_sample(GrowthRule::Uniform, 3, 0, &mut rng).is_err());
    }

    #[test]
    fn limit_sample_depth_one_ua() {
        // depth 1, tau 2: max(phi0, phi1 (1 - phi0)) with independent uniforms,
        // P(X <= x) = integral_0^x min(1, x / (1 - p)) dp.
        let cdf = |x: f64| {
            if x <= 0.0 {
                0.0
            } else if x >= 1.0 {
                1.0
            } else if x >= 0.5 {
                -x * x.ln() + 2.0 * x - 1.0
            } else {
                -x * (1.0 - x).ln()
            }
        };
        let mut rng = RngSpec::new(5).rng();
        let xs: Vec<f64> = (0..5000)
            .map(|_| limit_anticentrality_sample(GrowthRule::Uniform, 2, 1, &mut rng).unwrap().value)
            .collect();
        let ks = ks_one_sample(&xs, cdf);
        assert!(ks.p_value > 0.01, "{ks:?}");
    }

    #[test]
    fn pa_residual_mean() {
        let mut rng = RngSpec::new(6).rng();
        for (tau, depth) in [(2usize, 4usize), (5, 10)] {
            let n = 40_000;
            let rs: Vec<f64> = (0..n)
                .map(|_| limit_anticentrality_sample(GrowthRule::Preferential, tau, depth, &mut rng).unwrap().residual)
                .collect();
            let mean = rs.iter().sum::<f64>() / n as f64;
            let var = rs.iter().map(|r| (r - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
            let expected = 1.0 / ((tau as f64 - 1.0) * (depth as f64 + 2.0));
            assert!((mean - expected).abs() < 3.0 * (var / n as f64).sqrt(), "{tau} {depth} {mean} {expected}");
        }
    }
}
