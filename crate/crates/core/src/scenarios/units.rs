//! Quantities with explicit unit suffixes ("50um", "5 ns", "-0.014/um").
//!
//! Every configured number names its unit; a bare number is accepted only for
//! dimensionless keys, so a time can never be read as a length by accident.

use std::fmt;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Dimension {
    Length,
    InverseLength,
    Time,
    /// Cyclic frequency, returned in Hz.
    Frequency,
    /// Events per second (heating rates).
    Rate,
    Voltage,
    /// Squeezing or attenuation in dB.
    Decibel,
    Dimensionless,
}

impl fmt::Display for Dimension {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Dimension::Length => "length",
            Dimension::InverseLength => "inverse length",
            Dimension::Time => "time",
            Dimension::Frequency => "frequency",
            Dimension::Rate => "rate",
            Dimension::Voltage => "voltage",
            Dimension::Decibel => "decibel",
            Dimension::Dimensionless => "dimensionless",
        };
        f.write_str(s)
    }
}

const UNITS: &[(&str, Dimension, f64)] = &[
    ("m", Dimension::Length, 1.0),
    ("mm", Dimension::Length, 1e-3),
    ("um", Dimension::Length, 1e-6),
    ("µm", Dimension::Length, 1e-6),
    ("nm", Dimension::Length, 1e-9),
    ("pm", Dimension::Length, 1e-12),
    ("/m", Dimension::InverseLength, 1.0),
    ("/mm", Dimension::InverseLength, 1e3),
    ("/um", Dimension::InverseLength, 1e6),
    ("/µm", Dimension::InverseLength, 1e6),
    ("/nm", Dimension::InverseLength, 1e9),
    ("s", Dimension::Time, 1.0),
    ("ms", Dimension::Time, 1e-3),
    ("us", Dimension::Time, 1e-6),
    ("µs", Dimension::Time, 1e-6),
    ("ns", Dimension::Time, 1e-9),
    ("ps", Dimension::Time, 1e-12),
    ("Hz", Dimension::Frequency, 1.0),
    ("kHz", Dimension::Frequency, 1e3),
    ("MHz", Dimension::Frequency, 1e6),
    ("GHz", Dimension::Frequency, 1e9),
    ("/s", Dimension::Rate, 1.0),
    ("/ms", Dimension::Rate, 1e3),
    ("V", Dimension::Voltage, 1.0),
    ("mV", Dimension::Voltage, 1e-3),
    ("kV", Dimension::Voltage, 1e3),
    ("dB", Dimension::Decibel, 1.0),
];

/// Splits "1.5e-3 um" into (1.5e-3, "um").
fn split_number(s: &str) -> Option<(f64, &str)> {
    let b = s.as_bytes();
    let mut i = 0;
    if i < b.len() && (b[i] == b'+' || b[i] == b'-') {
        i += 1;
    }
    let digits_start = i;
    while i < b.len() && (b[i].is_ascii_digit() || b[i] == b'.') {
        i += 1;
    }
    if i == digits_start {
        return None;
    }
    // exponent only if followed by a digit, so "5e" never eats a unit
    if i < b.len() && (b[i] == b'e' || b[i] == b'E') {
        let mut j = i + 1;
        if j < b.len() && (b[j] == b'+' || b[j] == b'-') {
            j += 1;
        }
        if j < b.len() && b[j].is_ascii_digit() {
            while j < b.len() && b[j].is_ascii_digit() {
                j += 1;
            }
            i = j;
        }
    }
    let v = s[..i].parse().ok()?;
    Some((v, s[i..].trim()))
}

fn normalize_unit(u: &str) -> String {
    let u = u.trim();
    let u = u.strip_prefix("1/").map(|r| format!("/{r}")).unwrap_or_else(|| u.to_string());
    if let Some(base) = u.strip_suffix("^-1") {
        return format!("/{base}");
    }
    if u == "quanta/s" {
        return "/s".into();
    }
    u
}

/// Parses `text` as a quantity of dimension `dim` and returns it in SI
/// (Hz for frequencies). "inf" / "infinite" are accepted for lengths.
pub fn parse_quantity(text: &str, dim: Dimension) -> Result<f64> {
    let t = text.trim();
    if dim == Dimension::Length {
        let lower = t.to_ascii_lowercase();
        let (sign, rest) = match lower.strip_prefix('-') {
            Some(r) => (-1.0, r),
            None => (1.0, lower.trim_start_matches('+')),
        };
        if rest == "inf" || rest == "infinite" {
            return Ok(sign * f64::INFINITY);
        }
    }
    let (value, unit) = split_number(t).ok_or_else(|| Error::Config(format!("cannot parse a number from {text:?}")))?;
    if !value.is_finite() {
        return Err(Error::Config(format!("{text:?} is not finite")));
    }
    if unit.is_empty() {
        return if dim == Dimension::Dimensionless {
            Ok(value)
        } else {
            Err(Error::Config(format!("{text:?} needs a unit ({dim} expected)")))
        };
    }
    let unit = normalize_unit(unit);
    match UNITS.iter().find(|(u, _, _)| *u == unit) {
        Some((_, d, f)) if *d == dim => Ok(value * f),
        Some((_, d, _)) => Err(Error::Config(format!("{text:?} is a {d}, expected a {dim}"))),
        None => Err(Error::Config(format!("unknown unit {unit:?} in {text:?}"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(got: f64, want: f64) {
        assert!((got - want).abs() <= 1e-15 * want.abs(), "{got} vs {want}");
    }

    #[test]
    fn parses_suffixed_values() {
        close(parse_quantity("50um", Dimension::Length).unwrap(), 50e-6);
        close(parse_quantity("5 ns", Dimension::Time).unwrap(), 5e-9);
        close(parse_quantity("1.2MHz", Dimension::Frequency).unwrap(), 1.2e6);
        close(parse_quantity("-0.014/um", Dimension::InverseLength).unwrap(), -0.014e6);
        close(parse_quantity("-0.014 1/um", Dimension::InverseLength).unwrap(), -0.014e6);
        close(parse_quantity("2um^-1", Dimension::InverseLength).unwrap(), 2e6);
        close(parse_quantity("10 quanta/s", Dimension::Rate).unwrap(), 10.0);
        close(parse_quantity("1e-3um", Dimension::Length).unwrap(), 1e-9);
        close(parse_quantity("-20dB", Dimension::Decibel).unwrap(), -20.0);
        close(parse_quantity("3", Dimension::Dimensionless).unwrap(), 3.0);
        assert_eq!(parse_quantity("-inf", Dimension::Length).unwrap(), f64::NEG_INFINITY);
        close(parse_quantity("360ps", Dimension::Time).unwrap(), 360e-12);
    }

    #[test]
    fn rejects_mismatched_or_missing_units() {
        assert!(parse_quantity("5ns", Dimension::Length).is_err());
        assert!(parse_quantity("50", Dimension::Length).is_err());
        assert!(parse_quantity("50 furlongs", Dimension::Length).is_err());
        assert!(parse_quantity("um", Dimension::Length).is_err());
        assert!(parse_quantity("inf", Dimension::Time).is_err());
        assert!(matches!(parse_quantity("1 MHz", Dimension::Time), Err(Error::Config(_))));
    }
}
