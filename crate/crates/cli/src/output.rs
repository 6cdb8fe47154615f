//! CSV formatting shared by the commands.

use corrgrow::detect::PowerReport;
use corrgrow::estimate::{EstimateError, EstimatorReport};
use corrgrow::GrowthRule;

pub const SCHEMA_VERSION: u32 = 1;

pub const POWER_HEADER: &str = "schema_version,statistic,n,t_star,alpha,size,power,ci,trials,master_seed";
pub const ESTIMATE_HEADER: &str =
    "schema_version,n,t_star,rule,trial,y1,k_raw,k_used,s_k,t_coarse,t_fine,degenerate_flag";
pub const TREE_HEADER: &str = "schema_version,trial,t_star,tree,n,max_degree,h,psi,centroid";

/// `%.12g`: twelve significant digits, trailing zeros dropped.
pub fn fmt_float(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return if x.is_nan() { "nan".into() } else if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let sci = format!("{:.11e}", x);
    let (mantissa, exp) = sci.split_once('e').unwrap();
    let exp: i32 = exp.parse().unwrap();
    if (-5..12).contains(&exp) {
        let fixed = format!("{:.*}", (11 - exp) as usize, x);
        trim_zeros(&fixed).to_string()
    } else {
        format!("{}e{}{:02}", trim_zeros(mantissa), if exp < 0 { '-' } else { '+' }, exp.abs())
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

pub fn power_row(r: &PowerReport) -> String {
    format!(
        "{SCHEMA_VERSION},{},{},{},{},{},{},{},{},{}",
        r.statistic,
        r.n,
        r.t_star,
        fmt_float(r.alpha_target),
        fmt_float(r.empirical_size),
        fmt_float(r.empirical_power),
        fmt_float(r.ci_halfwidth),
        r.trials,
        r.master_seed
    )
}

pub fn estimate_row(
    n: usize,
    t_star: usize,
    rule: GrowthRule,
    trial: usize,
    r: &Result<EstimatorReport, EstimateError>,
) -> String {
    match r {
        Ok(r) => format!(
            "{SCHEMA_VERSION},{n},{t_star},{rule},{trial},{},{},{},{},{},{},0",
            fmt_float(r.y1),
            r.k_raw,
            r.k_used,
            fmt_float(r.s_k),
            fmt_float(r.t_hat_coarse),
            fmt_float(r.t_hat_fine)
        ),
        Err(_) => format!("{SCHEMA_VERSION},{n},{t_star},{rule},{trial},,,,,,,1"),
    }
}
