//! Value lists for parameter sweeps.

use thiserror::Error;

/// Upper bound on generated sweep points.
pub const MAX_POINTS: usize = 10_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RangeError {
    #[error("empty range")]
    Empty,
    #[error("invalid number `{0}` in range")]
    Number(String),
    #[error("invalid point count `{0}` (expected 1..={MAX_POINTS})")]
    Count(String),
    #[error("range `{0}` must be a comma list or start:stop:count")]
    Shape(String),
}

fn number(s: &str) -> Result<f64, RangeError> {
    let t = s.trim();
    match t.parse::<f64>() {
        Ok(v) if v.is_finite() => Ok(v),
        _ => Err(RangeError::Number(t.to_string())),
    }
}

/// Parses `a,b,c` or the inclusive linear grid `start:stop:count`.
pub fn parse_values(text: &str) -> Result<Vec<f64>, RangeError> {
    let text = text.trim();
    if text.is_empty() {
        return Err(RangeError::Empty);
    }
    if text.contains(':') {
        let parts: Vec<&str> = text.split(':').collect();
        let [start, stop, count] = parts[..] else {
            return Err(RangeError::Shape(text.to_string()));
        };
        let (start, stop) = (number(start)?, number(stop)?);
        let n = count
            .trim()
            .parse::<usize>()
            .ok()
            .filter(|n| (1..=MAX_POINTS).contains(n))
            .ok_or_else(|| RangeError::Count(count.trim().to_string()))?;
        if n == 1 {
            return Ok(vec![start]);
        }
        let last = (n - 1) as f64;
        // Weighted form stays finite where `stop - start` would overflow.
        return Ok((0..n)
            .map(|i| {
                let s = i as f64 / last;
                start * (1.0 - s) + stop * s
            })
            .collect());
    }
    let values = text
        .split(',')
        .filter(|s| !s.trim().is_empty())
        .map(number)
        .collect::<Result<Vec<_>, _>>()?;
    if values.is_empty() {
        return Err(RangeError::Empty);
    }
    if values.len() > MAX_POINTS {
        return Err(RangeError::Count(values.len().to_string()));
    }
    Ok(values)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn extreme_bounds_stay_finite() {
        let v = parse_values("-1.7e308:1.7e308:3").unwrap();
        assert!(v.iter().all(|x| x.is_finite()));
        assert_eq!(v[1], 0.0);
    }

    #[test]
    fn comma_list() {
        assert_eq!(parse_values("1e-2, 1e-3,1e-4").unwrap(), vec![1e-2, 1e-3, 1e-4]);
    }

    #[test]
    fn linear_grid() {
        assert_eq!(parse_values("0:1:5").unwrap(), vec![0.0, 0.25, 0.5, 0.75, 1.0]);
        assert_eq!(parse_values("2:9:1").unwrap(), vec![2.0]);
    }

    #[test]
    fn rejects_bad_input() {
        assert_eq!(parse_values(""), Err(RangeError::Empty));
        assert_eq!(parse_values(" , "), Err(RangeError::Empty));
        assert!(matches!(parse_values("1,x"), Err(RangeError::Number(_))));
        assert!(matches!(parse_values("1,inf"), Err(RangeError::Number(_))));
        assert!(matches!(parse_values("0:1:0"), Err(RangeError::Count(_))));
        assert!(matches!(parse_values("0:1"), Err(RangeError::Shape(_))));
        assert!(matches!(parse_values("0:1:99999999"), Err(RangeError::Count(_))));
    }
}
