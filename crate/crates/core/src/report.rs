//! Positivity-margin reports and their JSON encoding.

use std::io;

use serde::{Deserialize, Serialize};

use crate::algebra::{BlockDiagonalElement, TracialMap};
use crate::error::Result;
use crate::scalar::RealScalar;

/// Normalized margins at or above `−DEFAULT_TOLERANCE` count as passing.
pub const DEFAULT_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Margin {
    pub label: String,
    pub value: f64,
}

/// Outcome of one checker on one instance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MarginReport {
    pub check_id: String,
    #[serde(rename = "seed")]
    pub instance_seed: u64,
    pub margins: Vec<Margin>,
    pub passed: bool,
    pub tolerance: f64,
    pub scale: f64,
}

impl MarginReport {
    pub fn new(check_id: impl Into<String>, margins: Vec<Margin>, scale: f64) -> Self {
        let mut report = Self {
            check_id: check_id.into(),
            instance_seed: 0,
            margins,
            passed: false,
            tolerance: DEFAULT_TOLERANCE,
            scale,
        };
        report.passed = report.evaluate();
        report
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.instance_seed = seed;
        self
    }

    pub fn with_tolerance(mut self, tolerance: f64) -> Self {
        self.tolerance = tolerance;
        self.passed = self.evaluate();
        self
    }

    fn evaluate(&self) -> bool {
        self.margins.iter().all(|m| m.value >= -self.tolerance)
    }

    /// Smallest margin, `+∞` when there are none.
    pub fn min_margin(&self) -> f64 {
        self.margins.iter().map(|m| m.value).fold(f64::INFINITY, f64::min)
    }

    pub fn margin(&self, label: &str) -> Option<f64> {
        self.margins.iter().find(|m| m.label == label).map(|m| m.value)
    }

    /// Passes, but with some margin inside `±tolerance` of zero.
    pub fn is_boundary(&self) -> bool {
        self.passed && self.margins.iter().any(|m| m.value.abs() <= self.tolerance)
    }
}

/// Accumulates labelled margins while a checker runs.
#[derive(Debug, Default)]
pub struct MarginSet {
    margins: Vec<Margin>,
    scale: f64,
    range: Option<TracialMap>,
}

impl MarginSet {
    pub fn new() -> Self {
        Self::default()
    }

    /// Positivity margins are taken on the corner holding the range of `map`, so
    /// that the structural zeros outside it do not pin the margin at 0.
    pub fn on_range(map: &TracialMap) -> Self {
        Self {
            range: Some(map.clone()),
            ..Self::default()
        }
    }

    fn restrict<T: RealScalar>(&self, x: &BlockDiagonalElement<T>) -> Result<BlockDiagonalElement<T>> {
        match &self.range {
            Some(map) => map.compress_to_range(x),
            None => Ok(x.clone()),
        }
    }

    /// Records `λ_min(X) / max(1, ‖X‖_F)` for an operator claimed positive.
    pub fn psd<T: RealScalar>(&mut self, label: &str, op: &BlockDiagonalElement<T>) -> Result<f64> {
        let op = self.restrict(op)?;
        let value = op.hermitize().normalized_min_eigenvalue()?.as_f64();
        self.push(label, value, op.frobenius_norm().as_f64());
        Ok(value)
    }

    /// Records `λ_min(lhs − rhs)` for a claimed `lhs ⪰ rhs`, normalized by
    /// `max(1, ‖lhs‖_F, ‖rhs‖_F, ‖lhs − rhs‖_F)`.
    pub fn psd_between<T: RealScalar>(
        &mut self,
        label: &str,
        lhs: &BlockDiagonalElement<T>,
        rhs: &BlockDiagonalElement<T>,
    ) -> Result<f64> {
        let (lhs, rhs) = (self.restrict(lhs)?, self.restrict(rhs)?);
        let diff = lhs.try_sub(&rhs)?.hermitize();
        let scale = lhs
            .frobenius_norm()
            .max(rhs.frobenius_norm())
            .max(diff.frobenius_norm())
            .as_f64();
        let value = diff.min_eigenvalue()?.as_f64() / scale.max(1.0);
        self.push(label, value, scale);
        Ok(value)
    }

    /// Records a raw real margin measured against the magnitude `scale` of the quantities compared.
    pub fn value(&mut self, label: &str, raw: f64, scale: f64) -> f64 {
        let value = raw / scale.abs().max(1.0);
        self.push(label, value, scale.abs());
        value
    }

    /// Records a real number claimed nonnegative, normalized by `max(1, |x|)`.
    pub fn scalar<T: RealScalar>(&mut self, label: &str, x: T) -> f64 {
        let x = x.as_f64();
        let value = x / x.abs().max(1.0);
        self.push(label, value, x.abs());
        value
    }

    /// Records a deviation `‖lhs − rhs‖` that should vanish, as the margin `−dev / max(1, scale)`.
    pub fn identity<T: RealScalar>(&mut self, label: &str, deviation: T, scale: T) -> f64 {
        let scale = scale.as_f64();
        let value = -deviation.as_f64() / scale.max(1.0);
        self.push(label, value, scale);
        value
    }

    fn push(&mut self, label: &str, value: f64, scale: f64) {
        self.scale = self.scale.max(scale);
        self.margins.push(Margin {
            label: label.to_string(),
            value,
        });
    }

    pub fn finish(self, check_id: &str) -> MarginReport {
        MarginReport::new(check_id, self.margins, self.scale)
    }
}

/// `serde_json` formatter writing every float with 17 significant digits.
#[derive(Debug, Default, Clone, Copy)]
pub struct SignificantDigits;

impl serde_json::ser::Formatter for SignificantDigits {
    fn write_f64<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        writer.write_all(format_f64_17(value).as_bytes())
    }

    fn write_f32<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(writer, value as f64)
    }
}

/// `1.2345678901234567e-3` style, always 17 significant digits.
pub fn format_f64_17(value: f64) -> String {
    format!("{value:.16e}")
}

/// Serializes with [`SignificantDigits`], one compact JSON document.
pub fn to_json_string<S: Serialize + ?Sized>(value: &S) -> serde_json::Result<String> {
    let mut out = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut out, SignificantDigits);
    value.serialize(&mut ser)?;
    Ok(String::from_utf8(out).expect("serde_json emits UTF-8"))
}

/// Formats with 6 significant digits, `%g` style, for tables.
pub fn format_sig6(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let exp = x.abs().log10().floor() as i32;
    if (-4..6).contains(&exp) {
        let decimals = (5 - exp).max(0) as usize;
        let s = format!("{x:.decimals$}");
        if s.contains('.') {
            s.trim_end_matches('0').trim_end_matches('.').to_string()
        } else {
            s
        }
    } else {
        format!("{x:.5e}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pass_fail_follows_tolerance() {
        let r = MarginReport::new(
            "x",
            vec![
                Margin { label: "a".into(), value: -5e-10 },
                Margin { label: "b".into(), value: 0.3 },
            ],
            1.0,
        );
        assert!(r.passed);
        assert!(r.is_boundary());
        assert_eq!(r.min_margin(), -5e-10);
        let r = r.with_tolerance(1e-10);
        assert!(!r.passed);
    }

    #[test]
    fn json_uses_seventeen_digits_and_round_trips() {
        let r = MarginReport::new(
            "skew_positivity",
            vec![Margin { label: "m".into(), value: 0.1 }],
            2.0,
        )
        .with_seed(7);
        let s = to_json_string(&r).unwrap();
        assert!(s.contains("\"seed\":7"));
        assert!(s.contains("1.0000000000000001e-1"));
        let back: MarginReport = serde_json::from_str(&s).unwrap();
        assert_eq!(back, r);
    }

    #[test]
    fn sig6_formatting() {
        assert_eq!(format_sig6(1.0), "1");
        assert_eq!(format_sig6(0.1339745962155614), "0.133975");
        assert_eq!(format_sig6(-2.5e-9), "-2.50000e-9");
        assert_eq!(format_sig6(123456.7), "123457");
        assert_eq!(format_sig6(1234567.0), "1.23457e6");
        assert_eq!(format_sig6(1e-5), "1.00000e-5");
    }
}
