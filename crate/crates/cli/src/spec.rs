//! `--psi`, `--h` and count grammars. Syntax is checked at parse time (a
//! usage error); parameter values are checked when the model is built.

use std::path::Path;

use ctrw_core::dist::{IncrementModel, WaitingTimeModel};

fn numbers(parts: &[&str], n: usize, what: &str) -> Result<Vec<f64>, String> {
    if parts.len() != n {
        return Err(format!("{what} takes {n} parameter(s), got {}", parts.len()));
    }
    parts
        .iter()
        .map(|p| p.parse::<f64>().map_err(|_| format!("{what}: {p:?} is not a number")))
        .collect()
}

fn split(spec: &str) -> (&str, Vec<&str>) {
    let mut it = spec.split(':');
    let kind = it.next().unwrap_or("");
    (kind, it.collect())
}

pub fn check_psi(spec: &str) -> Result<String, String> {
    let (kind, rest) = split(spec);
    match kind {
        "exp" => numbers(&rest, 1, "exp").map(|_| ()),
        "lognormal" => numbers(&rest, 2, "lognormal").map(|_| ()),
        "empirical" if !rest.is_empty() => Ok(()),
        _ => Err(format!("expected exp:RATE, lognormal:MU:SIGMA or empirical:PATH, got {spec:?}")),
    }?;
    Ok(spec.to_string())
}

pub fn check_h(spec: &str) -> Result<String, String> {
    let (kind, rest) = split(spec);
    match kind {
        "gauss" | "halfgauss" => numbers(&rest, 2, kind).map(|_| ()),
        "twopoint" => numbers(&rest, 1, kind).map(|_| ()),
        "empirical" if !rest.is_empty() => Ok(()),
        _ => Err(format!(
            "expected gauss:MU:SIGMA, halfgauss:MU:SIGMA, twopoint:A or empirical:PATH, got {spec:?}"
        )),
    }?;
    Ok(spec.to_string())
}

/// Positive integer, also written as `1e7`.
pub fn parse_count(s: &str) -> Result<u64, String> {
    if let Ok(n) = s.parse::<u64>() {
        return if n > 0 { Ok(n) } else { Err("must be positive".into()) };
    }
    let v: f64 = s.parse().map_err(|_| format!("{s:?} is not a count"))?;
    if v >= 1.0 && v.fract() == 0.0 && v <= 9.007_199_254_740_992e15 {
        Ok(v as u64)
    } else {
        Err(format!("{s:?} is not a positive integer"))
    }
}

pub fn waiting_model(spec: &str) -> ctrw_core::Result<WaitingTimeModel<f64>> {
    let (kind, rest) = split(spec);
    let num = |i: usize| rest[i].parse::<f64>().unwrap_or(f64::NAN);
    match kind {
        "exp" => WaitingTimeModel::exponential(num(0)),
        "lognormal" => WaitingTimeModel::lognormal(num(0), num(1)),
        _ => WaitingTimeModel::empirical_from_csv(Path::new(&rest.join(":"))),
    }
}

pub fn increment_model(spec: &str) -> ctrw_core::Result<IncrementModel<f64>> {
    let (kind, rest) = split(spec);
    let num = |i: usize| rest[i].parse::<f64>().unwrap_or(f64::NAN);
    match kind {
        "gauss" => IncrementModel::gaussian(num(0), num(1)),
        "halfgauss" => Ok(IncrementModel::gaussian(num(0), num(1))?.rectified()),
        "twopoint" => IncrementModel::two_point(num(0)),
        _ => IncrementModel::empirical_from_csv(Path::new(&rest.join(":"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts() {
        assert_eq!(parse_count("1e7"), Ok(10_000_000));
        assert_eq!(parse_count("250"), Ok(250));
        assert!(parse_count("0").is_err());
        assert!(parse_count("1.5").is_err());
        assert!(parse_count("-3").is_err());
    }

    #[test]
    fn grammar() {
        assert!(check_psi("exp:1.0").is_ok());
        assert!(check_psi("lognormal:-0.5:1").is_ok());
        assert!(check_psi("exp").is_err());
        assert!(check_psi("gamma:1:2").is_err());
        assert!(check_h("halfgauss:0:1").is_ok());
        assert!(check_h("twopoint:0.5").is_ok());
        assert!(check_h("gauss:0").is_err());
    }

    #[test]
    fn halfgauss_is_rectified() {
        assert!(increment_model("halfgauss:0:1").unwrap().half_rectified);
        assert!(!increment_model("gauss:0:1").unwrap().half_rectified);
        assert!(waiting_model("exp:-1").is_err());
    }
}
