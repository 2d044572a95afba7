use serde::Serialize;

/// How a report's verdict relates its two sides.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Relation {
    /// `|lhs - rhs| <= tol`
    Eq,
    /// `lhs <= rhs + tol`
    Le,
    /// decided by the producer; tolerance is informational
    Verdict,
}

/// One numerical comparison: a left side, a right side and a verdict.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerificationReport {
    pub check: String,
    pub lhs: f64,
    pub rhs: f64,
    pub abs_err: f64,
    pub rel_err: f64,
    pub tol: f64,
    pub relation: Relation,
    pub pass: bool,
    pub anchor: String,
}

impl VerificationReport {
    pub fn compare(check: impl Into<String>, lhs: f64, rhs: f64, tol: f64, anchor: &str) -> Self {
        Self::build(check.into(), lhs, rhs, tol, Relation::Eq, None, anchor)
    }

    pub fn at_most(check: impl Into<String>, lhs: f64, rhs: f64, tol: f64, anchor: &str) -> Self {
        Self::build(check.into(), lhs, rhs, tol, Relation::Le, None, anchor)
    }

    pub fn with_verdict(
        check: impl Into<String>,
        lhs: f64,
        rhs: f64,
        tol: f64,
        pass: bool,
        anchor: &str,
    ) -> Self {
        Self::build(check.into(), lhs, rhs, tol, Relation::Verdict, Some(pass), anchor)
    }

    fn build(
        check: String,
        lhs: f64,
        rhs: f64,
        tol: f64,
        relation: Relation,
        verdict: Option<bool>,
        anchor: &str,
    ) -> Self {
        let abs_err = (lhs - rhs).abs();
        let scale = lhs.abs().max(rhs.abs());
        let rel_err = if scale > 0.0 { abs_err / scale } else { 0.0 };
        let mut r = Self {
            check,
            lhs,
            rhs,
            abs_err,
            rel_err,
            tol,
            relation,
            pass: verdict.unwrap_or(false),
            anchor: anchor.to_string(),
        };
        r.judge();
        r
    }

    fn judge(&mut self) {
        let finite = self.lhs.is_finite() && self.rhs.is_finite();
        match self.relation {
            Relation::Eq => self.pass = finite && self.abs_err <= self.tol,
            Relation::Le => self.pass = finite && self.lhs <= self.rhs + self.tol,
            Relation::Verdict => {}
        }
    }

    /// Re-judges the report against another tolerance; producer verdicts are left alone.
    pub fn retolerate(&mut self, tol: f64) {
        if self.relation != Relation::Verdict {
            self.tol = tol;
            self.judge();
        }
    }
}
