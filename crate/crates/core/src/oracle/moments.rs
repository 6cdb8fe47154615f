use statrs::function::gamma::ln_gamma;

use super::{beta_binomial_pmf, OracleError};

/// `E[H(UA(n, star))] - E[H(UA(n, T'))]` where both seeds have `t_star`
/// vertices and `T'` is the `(t_star - 1)`-star with one leaf extended.
pub fn expected_h_diff(t_star: u64, n: u64) -> f64 {
    let t = t_star as f64;
    let n = n as f64;
    let inner = 4.0 * (t - 1.0) * n * n - (t * t - 15.0 * t + 26.0) * n + (-t * t + 19.0 * t - 30.0);
    -(t - 3.0) * (n + 1.0) * inner / (t * (t + 1.0) * (t + 2.0) * (t + 3.0) * n * n * n)
}

/// Limit of [`expected_h_diff`] as `n` grows.
pub fn expected_h_diff_limit(t_star: u64) -> f64 {
    let t = t_star as f64;
    -4.0 * (t - 1.0) * (t - 3.0) / (t * (t + 1.0) * (t + 2.0) * (t + 3.0))
}

/// Exact `E[h(UA(n, S), e)]` for a seed edge splitting the seed into `side`
/// and `seed_size - side` vertices, summed over the beta-binomial law.
pub fn expected_edge_h(side: u64, seed_size: u64, n: u64) -> Result<f64, OracleError> {
    if side == 0 || side >= seed_size || n < seed_size {
        return Err(OracleError::Domain(format!(
            "edge split ({side}, {}) of a {seed_size}-vertex seed grown to {n}",
            seed_size.saturating_sub(side)
        )));
    }
    let draws = n - seed_size;
    let nf = n as f64;
    let mut total = 0.0;
    for k in 0..=draws {
        let b = (side + k) as f64;
        let p = beta_binomial_pmf(side, seed_size - side, draws, k)?;
        let prod = b * (nf - b) / (nf * nf);
        total += p * prod * prod;
    }
    Ok(total)
}

/// `E[(X1 - X2)^4]` for i.i.d. `X1, X2 ~ Beta(alpha, t - alpha)`.
pub fn fourth_moment_beta_diff(alpha: f64, t: f64) -> Result<f64, OracleError> {
    if !(alpha >= 0.5 && t - alpha >= 0.5) {
        return Err(OracleError::Domain(format!(
            "need 1/2 <= alpha and t - alpha >= 1/2 (alpha = {alpha}, t = {t})"
        )));
    }
    let rest = t - alpha;
    Ok(12.0 * alpha * (alpha + 1.0) * rest * (rest + 1.0)
        / (t * t * (t + 1.0) * (t + 1.0) * (t + 2.0) * (t + 3.0)))
}

/// `Cov((X1 - X2)^2, (Y1 - Y2)^2)` where `(X_i, Y_i, 1 - X_i - Y_i)` are
/// i.i.d. `Dir(alpha1, alpha2, t - alpha1 - alpha2)`.
pub fn dirichlet_sq_cov(alpha1: f64, alpha2: f64, t: f64) -> Result<f64, OracleError> {
    check_dirichlet(alpha1, alpha2, t)?;
    let (a1, a2) = (alpha1, alpha2);
    let numer = -2.0 * t.powi(3)
        + (2.0 * a1 * a2 + 5.0 * a1 + 5.0 * a2 - 3.0) * t * t
        + (-5.0 * a1 * a2 + 6.0 * a1 + 6.0 * a2) * t
        - 6.0 * a1 * a2;
    Ok(4.0 * a1 * a2 * numer / (t.powi(4) * (t + 1.0).powi(2) * (t + 2.0) * (t + 3.0)))
}

/// Upper bound on [`dirichlet_sq_cov`] obtained by dropping negative terms.
pub fn dirichlet_sq_cov_bound(alpha1: f64, alpha2: f64, t: f64) -> Result<f64, OracleError> {
    check_dirichlet(alpha1, alpha2, t)?;
    Ok(200.0 * (alpha1 * alpha2).powi(2) / (t * t * (t + 1.0).powi(2) * (t + 2.0) * (t + 3.0)))
}

fn check_dirichlet(alpha1: f64, alpha2: f64, t: f64) -> Result<(), OracleError> {
    if alpha1 >= 0.5 && alpha2 >= 0.5 && alpha1 + alpha2 < t {
        Ok(())
    } else {
        Err(OracleError::Domain(format!(
            "need alpha1, alpha2 >= 1/2 and alpha1 + alpha2 < t ({alpha1}, {alpha2}, {t})"
        )))
    }
}

/// Tail constant of the maximum degree of preferential attachment,
/// `Gamma(2a - 2) / (2^(b-1) Gamma(a - 1/2) Gamma(b))`.
pub fn mori_tail_constant(a: f64, b: f64) -> Result<f64, OracleError> {
    if !(a >= 2.0 && b >= 1.0) {
        return Err(OracleError::Domain(format!("need a >= 2, b >= 1 (got {a}, {b})")));
    }
    let log_c = ln_gamma(2.0 * a - 2.0)
        - (b - 1.0) * std::f64::consts::LN_2
        - ln_gamma(a - 0.5)
        - ln_gamma(b);
    Ok(log_c.exp())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::{beta_sample, dirichlet3_sample, BetaParams};
    use crate::rng::RngSpec;

    fn close(a: f64, b: f64, rel: f64) -> bool {
        (a - b).abs() <= rel * b.abs().max(f64::MIN_POSITIVE)
    }

    #[test]
    fn h_diff_limit_values() {
        assert!(close(expected_h_diff_limit(4), -1.0 / 70.0, 1e-14));
        assert_eq!(expected_h_diff_limit(3), 0.0);
        assert_eq!(expected_h_diff(3, 1000), 0.0);
        let far = expected_h_diff(7, 10_000_000);
        assert!(close(far, expected_h_diff_limit(7), 1e-6));
    }

    #[test]
    fn h_diff_matches_beta_binomial_sum() {
        // star has t-1 edges split (1, t-1); T' swaps one of them for a (2, t-2) split
        for (t, n) in [(4u64, 10u64), (4, 2000), (5, 12), (5, 1000), (6, 20), (9, 300)] {
            let exact = expected_edge_h(1, t, n).unwrap() - expected_edge_h(2, t, n).unwrap();
            assert!(close(expected_h_diff(t, n), exact, 1e-10), "{t} {n}");
        }
    }

    #[test]
    fn edge_h_domain() {
        assert!(expected_edge_h(0, 4, 10).is_err());
        assert!(expected_edge_h(4, 4, 10).is_err());
        assert!(expected_edge_h(1, 4, 3).is_err());
        // no growth: deterministic value
        assert_eq!(expected_edge_h(1, 2, 2).unwrap(), 1.0 / 16.0);
    }

    #[test]
    fn fourth_moment_symmetric_case() {
        let t: f64 = 10.0;
        let h = t / 2.0;
        let direct = 12.0 * h * (h + 1.0) * (h + 1.0) * h
            / (t * t * (t + 1.0).powi(2) * (t + 2.0) * (t + 3.0));
        assert!(close(fourth_moment_beta_diff(h, t).unwrap(), direct, 1e-14));
        assert!(fourth_moment_beta_diff(9.8, 10.0).is_err());
        assert!(fourth_moment_beta_diff(0.4, 10.0).is_err());
    }

    #[test]
    fn fourth_moment_from_raw_moments() {
        // 2 E[X^4] - 8 E[X^3] E[X] + 6 E[X^2]^2 with E[X^k] = prod (a+i)/(t+i)
        for (a, t) in [(3.0, 10.0), (0.5, 1.0), (2.5, 7.0)] {
            let m = |k: i32| (0..k).map(|i| (a + i as f64) / (t + i as f64)).product::<f64>();
            let raw = 2.0 * m(4) - 8.0 * m(3) * m(1) + 6.0 * m(2) * m(2);
            assert!(close(fourth_moment_beta_diff(a, t).unwrap(), raw, 1e-12));
        }
    }

    #[test]
    fn fourth_moment_monte_carlo() {
        let mut rng = RngSpec::new(31).rng();
        let p = BetaParams::new(3.0, 7.0).unwrap();
        let n = 200_000;
        let xs: Vec<f64> = (0..n)
            .map(|_| (beta_sample(p, &mut rng) - beta_sample(p, &mut rng)).powi(4))
            .collect();
        let mean = xs.iter().sum::<f64>() / n as f64;
        let sd = (xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64).sqrt();
        let expected = fourth_moment_beta_diff(3.0, 10.0).unwrap();
        assert!((mean - expected).abs() < 3.5 * sd / (n as f64).sqrt());
    }

    #[test]
    fn dirichlet_cov_from_joint_moments() {
        for (a1, a2, t) in [(2.0, 3.0, 12.0), (0.5, 0.5, 3.0), (4.0, 1.5, 40.0)] {
            let m = |b1: i32, b2: i32| {
                let up: f64 = (0..b1).map(|i| a1 + i as f64).product::<f64>()
                    * (0..b2).map(|j| a2 + j as f64).product::<f64>();
                let down: f64 = (0..b1 + b2).map(|i| t + i as f64).product();
                up / down
            };
            let (ep, ef) = (m(1, 0), m(0, 1));
            let raw = 2.0 * m(2, 2) - 2.0 * m(2, 0) * m(0, 2)
                + 4.0 * ep * (ep * m(0, 2) - m(1, 2))
                + 4.0 * ef * (m(2, 0) * ef - m(2, 1))
                + 4.0 * m(1, 1).powi(2)
                - 4.0 * (ep * ef).powi(2);
            assert!(close(dirichlet_sq_cov(a1, a2, t).unwrap(), raw, 1e-10), "{a1} {a2} {t}");
        }
    }

    #[test]
    fn dirichlet_cov_bound_and_sign() {
        let v = dirichlet_sq_cov(2.0, 3.0, 12.0).unwrap();
        assert!(v <= dirichlet_sq_cov_bound(2.0, 3.0, 12.0).unwrap());
        assert!(dirichlet_sq_cov(2.0, 3.0, 1e4).unwrap() < 0.0);
        assert!(dirichlet_sq_cov(2.0, 3.0, 5.0).is_err());
        assert!(dirichlet_sq_cov(0.2, 3.0, 50.0).is_err());
    }

    #[test]
    fn dirichlet_cov_monte_carlo() {
        let mut rng = RngSpec::new(32).rng();
        let n = 200_000;
        let mut a = Vec::with_capacity(n);
        let mut b = Vec::with_capacity(n);
        for _ in 0..n {
            let x = dirichlet3_sample(2.0, 3.0, 7.0, &mut rng).unwrap();
            let y = dirichlet3_sample(2.0, 3.0, 7.0, &mut rng).unwrap();
            a.push((x[0] - y[0]).powi(2));
            b.push((x[1] - y[1]).powi(2));
        }
        let ma = a.iter().sum::<f64>() / n as f64;
        let mb = b.iter().sum::<f64>() / n as f64;
        let prods: Vec<f64> = a.iter().zip(&b).map(|(x, y)| (x - ma) * (y - mb)).collect();
        let cov = prods.iter().sum::<f64>() / n as f64;
        let sd = (prods.iter().map(|p| (p - cov).powi(2)).sum::<f64>() / (n - 1) as f64).sqrt();
        let expected = dirichlet_sq_cov(2.0, 3.0, 12.0).unwrap();
        assert!((cov - expected).abs() < 3.5 * sd / (n as f64).sqrt(), "{cov} {expected}");
    }

    #[test]
    fn mori_constant_values() {
        let two_over_sqrt_pi = 2.0 / std::f64::consts::PI.sqrt();
        assert!(close(mori_tail_constant(2.0, 1.0).unwrap(), two_over_sqrt_pi, 1e-12));
        for t in 2..20 {
            let t = t as f64;
            let step = mori_tail_constant(t + 1.0, t).unwrap();
            let prev = mori_tail_constant(t, t - 1.0).unwrap();
            assert!(close(step, 2.0 * prev, 1e-10));
            let closed = 2f64.powf(t - 1.0) / std::f64::consts::PI.sqrt();
            assert!(close(prev, closed, 1e-10));
        }
        assert!(mori_tail_constant(1.5, 1.0).is_err());
    }
}
