//! CSV reports. Every writer is deterministic: identical inputs give
//! byte-identical output.

use std::io::Write;

use disocc_core::bounds::TailBoundReport;
use disocc_core::disjoint::CountDistribution;
use disocc_core::percolation::MonteCarloReport;
use disocc_core::rational::{format_rational, to_f64};

/// `x` with 15 significant digits in the shortest of fixed or exponent form,
/// trailing zeros removed (C's `%.15g`).
pub fn format_sig(x: f64) -> String {
    const DIGITS: i32 = 15;
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let sci = format!("{:.*e}", (DIGITS - 1) as usize, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("integer exponent");
    if exp < -4 || exp >= DIGITS {
        let mantissa = trim_zeros(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{mantissa}e{sign}{:02}", exp.abs())
    } else {
        let decimals = (DIGITS - 1 - exp).max(0) as usize;
        trim_zeros(&format!("{x:.decimals$}")).to_string()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

fn opt(x: Option<f64>) -> String {
    x.map(format_sig).unwrap_or_default()
}

/// `value,pmf,survival,pmf_decimal,survival_decimal` for `value = 0..=k`.
pub fn write_distribution<W: Write>(out: W, dist: &CountDistribution) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["value", "pmf", "survival", "pmf_decimal", "survival_decimal"])?;
    for (v, p) in dist.pmf_values().iter().enumerate() {
        let s = dist.survival(v);
        w.write_record([
            v.to_string(),
            format_rational(p),
            format_rational(&s),
            format_sig(to_f64(p)),
            format_sig(to_f64(&s)),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// `lambda,t,product,chernoff,bernstein[,exact_tail]`.
pub fn write_bounds<W: Write>(out: W, reports: &[TailBoundReport]) -> csv::Result<()> {
    let with_exact = reports.iter().any(|r| r.exact_tail.is_some());
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec!["lambda", "t", "product", "chernoff", "bernstein"];
    if with_exact {
        header.push("exact_tail");
    }
    w.write_record(&header)?;
    for r in reports {
        let mut row = vec![
            format_sig(r.lambda),
            format_sig(r.t),
            opt(r.product),
            format_sig(r.chernoff),
            format_sig(r.bernstein),
        ];
        if with_exact {
            row.push(r.exact_tail.as_ref().map(format_rational).unwrap_or_default());
        }
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

/// `r,empirical_survival,std_err,lambda,t,chernoff_bound`; the last two
/// columns are empty for thresholds `r ≤ λ`.
pub fn write_monte_carlo<W: Write>(out: W, report: &MonteCarloReport) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["r", "empirical_survival", "std_err", "lambda", "t", "chernoff_bound"])?;
    for row in &report.rows {
        w.write_record([
            row.r.to_string(),
            format_sig(row.survival),
            format_sig(row.std_err),
            format_sig(report.lambda),
            opt(row.t),
            opt(row.chernoff),
        ])?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::format_sig;

    #[test]
    fn significant_digits() {
        assert_eq!(format_sig(0.0), "0");
        assert_eq!(format_sig(1.0), "1");
        assert_eq!(format_sig(0.5), "0.5");
        assert_eq!(format_sig(1.0 / 6.0), "0.166666666666667");
        assert_eq!(format_sig(-2.25), "-2.25");
        assert_eq!(format_sig(1e-7), "1e-07");
        assert_eq!(format_sig(1.5e20), "1.5e+20");
        assert_eq!(format_sig(123456.0), "123456");
    }
}
