//! Exact cost arithmetic.

use num_integer::Integer;
use num_rational::Ratio;
use num_traits::{Signed, ToPrimitive, Zero};

/// Exact rational used for every price, probability and cost.
pub type Rational = Ratio<i128>;

pub fn int(v: i128) -> Rational {
    Rational::from_integer(v)
}

/// Parses `12`, `0.25` or `7/3`. Negative values are accepted here and
/// rejected by the callers that need nonnegativity.
pub fn parse_rational(s: &str) -> Option<Rational> {
    let s = s.trim();
    if s.is_empty() {
        return None;
    }
    if let Some((n, d)) = s.split_once('/') {
        let n: i128 = n.trim().parse().ok()?;
        let d: i128 = d.trim().parse().ok()?;
        if d == 0 {
            return None;
        }
        return Some(Rational::new(n, d));
    }
    let (neg, body) = match s.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, s.strip_prefix('+').unwrap_or(s)),
    };
    let (whole, frac) = body.split_once('.').unwrap_or((body, ""));
    if whole.is_empty() && frac.is_empty() {
        return None;
    }
    if !whole.chars().all(|c| c.is_ascii_digit()) || !frac.chars().all(|c| c.is_ascii_digit()) {
        return None;
    }
    if frac.len() > 30 {
        return None;
    }
    let digits = format!("{whole}{frac}");
    let numer: i128 = if digits.is_empty() { 0 } else { digits.parse().ok()? };
    let denom = 10i128.checked_pow(frac.len() as u32)?;
    let r = Rational::new(numer, denom);
    Some(if neg { -r } else { r })
}

/// Fixed-point rendering with half-away-from-zero rounding. Deterministic,
/// so CSV output is byte-stable.
pub fn format_fixed(r: &Rational, places: u32) -> String {
    let scale = 10i128.pow(places);
    let scaled = r * Rational::from_integer(scale);
    let abs = scaled.abs();
    let (q, rem) = abs.numer().div_rem(abs.denom());
    let rounded = if rem * 2 >= *abs.denom() { q + 1 } else { q };
    let neg = scaled.is_negative() && !rounded.is_zero();
    let whole = rounded / scale;
    let frac = rounded % scale;
    let sign = if neg { "-" } else { "" };
    if places == 0 {
        format!("{sign}{whole}")
    } else {
        format!("{sign}{whole}.{frac:0width$}", width = places as usize)
    }
}

/// Exact decimal when the expansion terminates, otherwise the shortest
/// round-tripping `f64` rendering.
pub fn format_decimal(r: &Rational) -> String {
    let mut d = *r.denom();
    while d % 2 == 0 {
        d /= 2;
    }
    while d % 5 == 0 {
        d /= 5;
    }
    if d == 1 {
        let mut places = 0;
        while (r * Rational::from_integer(10i128.pow(places))).denom() != &1 {
            places += 1;
        }
        format_fixed(r, places)
    } else {
        to_f64(r).to_string()
    }
}

pub fn to_f64(r: &Rational) -> f64 {
    r.numer().to_f64().unwrap_or(f64::NAN) / r.denom().to_f64().unwrap_or(f64::NAN)
}

/// Smallest integer not below `r`.
pub fn ceil_u64(r: &Rational) -> u64 {
    r.ceil().to_integer().max(0) as u64
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_forms() {
        assert_eq!(parse_rational("12"), Some(int(12)));
        assert_eq!(parse_rational("0.25"), Some(Rational::new(1, 4)));
        assert_eq!(parse_rational("7/3"), Some(Rational::new(7, 3)));
        assert_eq!(parse_rational("-1.5"), Some(Rational::new(-3, 2)));
        assert_eq!(parse_rational("1/0"), None);
        assert_eq!(parse_rational("abc"), None);
        assert_eq!(parse_rational("."), None);
    }

    #[test]
    fn fixed_rounding() {
        assert_eq!(format_fixed(&Rational::new(1, 3), 6), "0.333333");
        assert_eq!(format_fixed(&Rational::new(2, 3), 6), "0.666667");
        assert_eq!(format_fixed(&Rational::new(-1, 2), 0), "-1");
        assert_eq!(format_fixed(&int(14320), 2), "14320.00");
        assert_eq!(format_fixed(&Rational::new(-1, 1000), 2), "0.00");
    }

    #[test]
    fn decimal_rendering() {
        assert_eq!(format_decimal(&Rational::new(1, 4)), "0.25");
        assert_eq!(format_decimal(&int(1910)), "1910");
        assert_eq!(format_decimal(&Rational::new(1, 3)), "0.3333333333333333");
    }
}
