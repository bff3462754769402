//! Plain-text report assembly. Reports are deterministic: no timestamps,
//! no environment details, just the checked inequalities and verdicts.

use majorant::ConditionCheck;

/// Six significant digits for report lines.
pub fn fnum(x: f64) -> String {
    format!("{x:.6e}")
}

/// Full-precision shortest form for CSV cells.
pub fn csv_num(x: f64) -> String {
    format!("{x:e}")
}

pub struct Report {
    lines: Vec<String>,
}

impl Report {
    pub fn new(scenario: &str, mode_line: &str) -> Self {
        Self {
            lines: vec![
                "majorant report".into(),
                format!("scenario: {scenario}"),
                format!("mode: {mode_line}"),
            ],
        }
    }

    pub fn section(&mut self, name: &str) {
        self.lines.push(String::new());
        self.lines.push(format!("[{name}]"));
    }

    pub fn line(&mut self, text: impl Into<String>) {
        self.lines.push(format!("  {}", text.into()));
    }

    /// One inequality line: catalog id, statement, numbers, verdict.
    pub fn check(&mut self, check: &ConditionCheck) {
        self.line(format!(
            "{} {}: {} <= {} (slack {})  {}",
            check.condition.id(),
            check.condition.statement(),
            fnum(check.lhs),
            fnum(check.rhs),
            fnum(check.slack()),
            if check.holds { "PASS" } else { "FAIL" },
        ));
    }

    pub fn finish(mut self, pass: bool) -> String {
        self.lines.push(String::new());
        self.lines
            .push(format!("verdict: {}", if pass { "PASS" } else { "FAIL" }));
        self.lines.push(String::new());
        self.lines.join("\n")
    }
}

/// Builds a CSV document from a header and rows.
pub fn csv(header: &str, rows: impl IntoIterator<Item = String>) -> String {
    let mut out = String::from(header);
    out.push('\n');
    for row in rows {
        out.push_str(&row);
        out.push('\n');
    }
    out
}
