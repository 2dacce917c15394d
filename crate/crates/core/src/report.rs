//! Audit reports shared by the distribution and Bell-scenario checks.

use std::fmt;

/// Reals in reports always use fixed 9-digit fractional formatting.
pub fn fmt_real(x: f64) -> String {
    let s = format!("{x:.9}");
    match s.strip_prefix('-') {
        Some(rest) if rest.bytes().all(|b| b == b'0' || b == b'.') => rest.to_string(),
        _ => s,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CheckStatus {
    Pass,
    Fail,
    /// Evaluated and reported, but not asserted.
    Excluded,
}

impl CheckStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            CheckStatus::Pass => "pass",
            CheckStatus::Fail => "fail",
            CheckStatus::Excluded => "excluded",
        }
    }
}

impl fmt::Display for CheckStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AuditCheck {
    pub label: String,
    pub status: CheckStatus,
    /// Worst deviation observed for this check.
    pub deviation: f64,
    pub witness: Option<String>,
    pub note: Option<String>,
}

impl AuditCheck {
    pub fn new(label: impl Into<String>, passed: bool, deviation: f64) -> Self {
        Self {
            label: label.into(),
            status: if passed { CheckStatus::Pass } else { CheckStatus::Fail },
            deviation,
            witness: None,
            note: None,
        }
    }

    pub fn with_witness(mut self, witness: Option<String>) -> Self {
        self.witness = witness;
        self
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }

    pub fn excluded(mut self) -> Self {
        self.status = CheckStatus::Excluded;
        self
    }

    pub fn passed(&self) -> bool {
        self.status != CheckStatus::Fail
    }
}

/// A titled list of checks; passes iff no check failed.
#[derive(Debug, Clone, PartialEq)]
pub struct AuditReport {
    pub title: String,
    pub checks: Vec<AuditCheck>,
}

impl AuditReport {
    pub fn new(title: impl Into<String>) -> Self {
        Self {
            title: title.into(),
            checks: Vec::new(),
        }
    }

    pub fn push(&mut self, check: AuditCheck) {
        self.checks.push(check);
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(AuditCheck::passed)
    }

    pub fn check(&self, label: &str) -> Option<&AuditCheck> {
        self.checks.iter().find(|c| c.label == label)
    }

    pub fn worst_deviation(&self) -> f64 {
        self.checks
            .iter()
            .filter(|c| c.status != CheckStatus::Excluded)
            .map(|c| c.deviation)
            .fold(0.0, f64::max)
    }

    pub fn to_table(&self) -> String {
        let wl = self
            .checks
            .iter()
            .map(|c| c.label.chars().count())
            .max()
            .unwrap_or(0)
            .max(5);
        let mut out = format!("{}\n", self.title);
        out.push_str(&format!("{:<wl$}  status    deviation    witness\n", "check"));
        for c in &self.checks {
            let mut line = format!(
                "{:<wl$}  {:<8}  {:>11}",
                c.label,
                c.status.as_str(),
                fmt_real(c.deviation)
            );
            if let Some(w) = &c.witness {
                line.push_str(&format!("  {w}"));
            }
            if let Some(n) = &c.note {
                line.push_str(&format!("  ({n})"));
            }
            out.push_str(line.trim_end());
            out.push('\n');
        }
        out.push_str(&format!(
            "overall: {}\n",
            if self.passed() { "pass" } else { "fail" }
        ));
        out
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("check,status,deviation,witness,note\n");
        for c in &self.checks {
            out.push_str(&format!(
                "{},{},{},{},{}\n",
                csv_field(&c.label),
                c.status,
                fmt_real(c.deviation),
                csv_field(c.witness.as_deref().unwrap_or("")),
                csv_field(c.note.as_deref().unwrap_or(""))
            ));
        }
        out
    }
}

impl fmt::Display for AuditReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_table())
    }
}

pub(crate) fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reals_have_nine_digits_and_no_negative_zero() {
        assert_eq!(fmt_real(4.0), "4.000000000");
        assert_eq!(fmt_real(-2.0f64.sqrt() * 2.0), "-2.828427125");
        assert_eq!(fmt_real(-1e-17), "0.000000000");
        assert_eq!(fmt_real(-0.0), "0.000000000");
    }

    #[test]
    fn table_aligns_multibyte_labels() {
        let mut r = AuditReport::new("t");
        r.push(AuditCheck::new("(A ⫫ Y | ∅)", true, 0.0));
        r.push(AuditCheck::new("ab", true, 0.0));
        let t = r.to_table();
        let cols: Vec<usize> = t
            .lines()
            .skip(1)
            .take(3)
            .map(|l| l.chars().position(|c| c == 'p' || c == 's').unwrap())
            .collect();
        assert_eq!(cols, [13, 13, 13]);
    }

    #[test]
    fn excluded_checks_do_not_fail_report() {
        let mut r = AuditReport::new("t");
        r.push(AuditCheck::new("a", true, 0.0));
        r.push(AuditCheck::new("b", false, 0.25).excluded());
        assert!(r.passed());
        assert_eq!(r.worst_deviation(), 0.0);
        r.push(AuditCheck::new("c", false, 0.5));
        assert!(!r.passed());
        assert!(r.to_table().ends_with("overall: fail\n"));
    }

    #[test]
    fn csv_quotes_commas() {
        let mut r = AuditReport::new("t");
        r.push(AuditCheck::new("(A ⫫ B,Y | X)", true, 0.0));
        assert!(r.to_csv().contains("\"(A ⫫ B,Y | X)\",pass,0.000000000"));
    }
}
