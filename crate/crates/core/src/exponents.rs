//! Exponent tuples and admissibility predicates.
//!
//! Every condition is evaluated as a signed residual. For one-sided
//! conditions a residual `>= 0` (or `> tol` for strict ones) means the
//! condition holds; equalities record the signed deviation and hold when
//! `|residual| <= tol`. Mathematical violations are data in the returned
//! [`AdmissibilityReport`]; only malformed input (NaN, `n < 1`) is an error.

use serde::Serialize;

use crate::error::{Error, Result};

/// Absolute tolerance used for equalities and strict inequalities.
pub const DEFAULT_TOL: f64 = 1e-12;

/// `1 - 1/p`, i.e. the reciprocal of the conjugate exponent (0 when p = 1).
pub fn conj_recip(p: f64) -> f64 {
    1.0 - 1.0 / p
}

fn check_finite(name: &str, v: f64) -> Result<()> {
    if v.is_nan() {
        Err(Error::InvalidParameter(format!("{name} is NaN")))
    } else {
        Ok(())
    }
}

fn check_dim(n: u32) -> Result<()> {
    if n < 1 {
        Err(Error::InvalidParameter("dimension n must be >= 1".into()))
    } else {
        Ok(())
    }
}

/// Solve `gamma = a*sigma + (1-a)*beta` for sigma.
pub fn derive_sigma(a: f64, gamma: f64, beta: f64) -> Result<f64> {
    check_finite("a", a)?;
    check_finite("gamma", gamma)?;
    check_finite("beta", beta)?;
    if a == 0.0 {
        return Err(Error::SigmaUndetermined);
    }
    Ok((gamma - (1.0 - a) * beta) / a)
}

/// Exponents of the first-order interpolation family
/// `‖|x|^γ u‖_r ≤ C ‖|x|^α ∇u‖_p^a ‖|x|^β u‖_q^(1-a)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CknParams {
    pub n: u32,
    pub p: f64,
    pub q: f64,
    pub r: f64,
    pub a: f64,
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    /// Carried explicitly; ignored when `a = 0`.
    pub sigma: f64,
}

impl CknParams {
    /// Build from an explicit sigma, validating it against gamma when `a > 0`.
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        n: u32,
        p: f64,
        q: f64,
        r: f64,
        a: f64,
        alpha: f64,
        beta: f64,
        gamma: f64,
        sigma: f64,
    ) -> Result<Self> {
        let params = Self {
            n,
            p,
            q,
            r,
            a,
            alpha,
            beta,
            gamma,
            sigma,
        };
        params.validate()?;
        Ok(params)
    }

    /// Build with sigma derived from gamma (sigma = gamma when `a = 0`,
    /// where it is unconstrained).
    #[allow(clippy::too_many_arguments)]
    pub fn from_gamma(
        n: u32,
        p: f64,
        q: f64,
        r: f64,
        a: f64,
        alpha: f64,
        beta: f64,
        gamma: f64,
    ) -> Result<Self> {
        let sigma = if a == 0.0 {
            gamma
        } else {
            derive_sigma(a, gamma, beta)?
        };
        Self::new(n, p, q, r, a, alpha, beta, gamma, sigma)
    }

    pub fn validate(&self) -> Result<()> {
        check_dim(self.n)?;
        for (name, v) in [
            ("p", self.p),
            ("q", self.q),
            ("r", self.r),
            ("a", self.a),
            ("alpha", self.alpha),
            ("beta", self.beta),
            ("gamma", self.gamma),
            ("sigma", self.sigma),
        ] {
            check_finite(name, v)?;
        }
        if self.a > 0.0 {
            let residual = self.sigma_relation_residual();
            if residual.abs() > 1e-12 * (1.0 + self.gamma.abs()) {
                return Err(Error::SigmaInconsistent { residual });
            }
        }
        Ok(())
    }

    /// `gamma - (a*sigma + (1-a)*beta)`.
    pub fn sigma_relation_residual(&self) -> f64 {
        self.gamma - (self.a * self.sigma + (1.0 - self.a) * self.beta)
    }

    fn nf(&self) -> f64 {
        self.n as f64
    }
}

/// Exponents of the weighted trace family on `ℝ^n × ℝ₊`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TraceParams {
    pub n: u32,
    pub p: f64,
    pub q: f64,
    pub alpha: f64,
    pub beta: f64,
}

impl TraceParams {
    pub fn new(n: u32, p: f64, q: f64, alpha: f64, beta: f64) -> Result<Self> {
        let params = Self {
            n,
            p,
            q,
            alpha,
            beta,
        };
        params.validate()?;
        Ok(params)
    }

    pub fn validate(&self) -> Result<()> {
        check_dim(self.n)?;
        for (name, v) in [
            ("p", self.p),
            ("q", self.q),
            ("alpha", self.alpha),
            ("beta", self.beta),
        ] {
            check_finite(name, v)?;
        }
        Ok(())
    }

    /// The weight-shifted tuple `(alpha + k, beta - k)`.
    pub fn shifted(&self, k: f64) -> Self {
        Self {
            alpha: self.alpha + k,
            beta: self.beta - k,
            ..*self
        }
    }
}

/// Exponents of the weighted Riesz-potential estimate
/// `‖|x|^{-β} T_γ v‖_q ≤ C ‖|x|^α v‖_p`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DddParams {
    pub n: u32,
    pub p: f64,
    pub q: f64,
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
}

impl DddParams {
    pub fn new(n: u32, p: f64, q: f64, alpha: f64, beta: f64, gamma: f64) -> Result<Self> {
        let params = Self {
            n,
            p,
            q,
            alpha,
            beta,
            gamma,
        };
        params.validate()?;
        Ok(params)
    }

    pub fn validate(&self) -> Result<()> {
        check_dim(self.n)?;
        for (name, v) in [
            ("p", self.p),
            ("q", self.q),
            ("alpha", self.alpha),
            ("beta", self.beta),
            ("gamma", self.gamma),
        ] {
            check_finite(name, v)?;
        }
        Ok(())
    }
}

/// `(1/r + γ/n) − a(1/p + (α−1)/n) − (1−a)(1/q + β/n)`; zero iff the
/// dilation balance holds.
pub fn scaling_residual(params: &CknParams) -> f64 {
    let n = params.nf();
    let a = params.a;
    let lhs = 1.0 / params.r + params.gamma / n;
    let grad = if a == 0.0 {
        0.0
    } else {
        a * (1.0 / params.p + (params.alpha - 1.0) / n)
    };
    let func = if a == 1.0 {
        0.0
    } else {
        (1.0 - a) * (1.0 / params.q + params.beta / n)
    };
    lhs - grad - func
}

/// `n/q − (n+1)/p − (α+β−1)`; zero iff the trace dilation balance holds.
pub fn trace_scaling_residual(params: &TraceParams) -> f64 {
    let n = params.n as f64;
    n / params.q - (n + 1.0) / params.p - (params.alpha + params.beta - 1.0)
}

/// `1/q − 1/p − (γ+α+β)/n + 1`; zero iff the Riesz-estimate balance holds.
pub fn ddd_scaling_residual(params: &DddParams) -> f64 {
    let n = params.n as f64;
    1.0 / params.q - 1.0 / params.p - (params.gamma + params.alpha + params.beta) / n + 1.0
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Theorem {
    CknClassical,
    CknRadial,
    TraceRadial,
    TraceOperator,
    Ddd,
}

impl Theorem {
    pub fn tag(&self) -> &'static str {
        match self {
            Theorem::CknClassical => "ckn-classical",
            Theorem::CknRadial => "ckn-radial",
            Theorem::TraceRadial => "trace-radial",
            Theorem::TraceOperator => "trace-operator",
            Theorem::Ddd => "ddd",
        }
    }
}

impl std::fmt::Display for Theorem {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.tag())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ConditionKind {
    /// `residual >= -tol`
    AtLeast,
    /// `residual > tol`
    Strict,
    /// `|residual| <= tol`
    Equal,
    /// Condition does not apply for these parameters.
    Vacuous,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Condition {
    pub label: String,
    pub kind: ConditionKind,
    pub satisfied: bool,
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AdmissibilityReport {
    pub theorem: Theorem,
    pub verdict: bool,
    pub conditions: Vec<Condition>,
}

impl AdmissibilityReport {
    pub fn condition(&self, label: &str) -> Option<&Condition> {
        self.conditions.iter().find(|c| c.label == label)
    }

    pub fn failed(&self) -> impl Iterator<Item = &Condition> {
        self.conditions.iter().filter(|c| !c.satisfied)
    }

    pub fn failed_labels(&self) -> Vec<&str> {
        self.failed().map(|c| c.label.as_str()).collect()
    }
}

struct ReportBuilder {
    tol: f64,
    theorem: Theorem,
    conditions: Vec<Condition>,
}

impl ReportBuilder {
    fn new(theorem: Theorem, tol: f64) -> Self {
        Self {
            tol,
            theorem,
            conditions: Vec::new(),
        }
    }

    fn push(&mut self, label: &str, kind: ConditionKind, residual: f64) {
        let satisfied = match kind {
            ConditionKind::AtLeast => residual >= -self.tol,
            ConditionKind::Strict => residual > self.tol,
            ConditionKind::Equal => residual.abs() <= self.tol,
            ConditionKind::Vacuous => true,
        };
        self.conditions.push(Condition {
            label: label.to_string(),
            kind,
            satisfied,
            residual,
        });
    }

    /// `lhs >= rhs`, or strictly when `strict`.
    fn ge(&mut self, label: &str, lhs: f64, rhs: f64, strict: bool) {
        let kind = if strict {
            ConditionKind::Strict
        } else {
            ConditionKind::AtLeast
        };
        self.push(label, kind, lhs - rhs);
    }

    fn eq(&mut self, label: &str, lhs: f64, rhs: f64) {
        self.push(label, ConditionKind::Equal, lhs - rhs);
    }

    fn vacuous(&mut self, label: &str) {
        self.push(label, ConditionKind::Vacuous, 0.0);
    }

    fn finish(self) -> AdmissibilityReport {
        AdmissibilityReport {
            theorem: self.theorem,
            verdict: self.conditions.iter().all(|c| c.satisfied),
            conditions: self.conditions,
        }
    }
}

/// Predicates for all five theorems at a given tolerance.
#[derive(Debug, Clone, Copy)]
pub struct Checker {
    pub tol: f64,
}

impl Default for Checker {
    fn default() -> Self {
        Self { tol: DEFAULT_TOL }
    }
}

impl Checker {
    pub fn new(tol: f64) -> Self {
        Self { tol }
    }

    fn ckn_common(&self, b: &mut ReportBuilder, pr: &CknParams) {
        let n = pr.nf();
        b.ge("p >= 1", pr.p, 1.0, false);
        b.ge("q >= 1", pr.q, 1.0, false);
        b.ge("r > 0", pr.r, 0.0, true);
        b.ge("a >= 0", pr.a, 0.0, false);
        b.ge("a <= 1", 1.0, pr.a, false);
        b.ge("1/p + alpha/n > 0", 1.0 / pr.p + pr.alpha / n, 0.0, true);
        b.ge("1/q + beta/n > 0", 1.0 / pr.q + pr.beta / n, 0.0, true);
        b.ge("1/r + gamma/n > 0", 1.0 / pr.r + pr.gamma / n, 0.0, true);
    }

    /// Classical (non-radial) admissibility region.
    pub fn ckn_classical(&self, pr: &CknParams) -> Result<AdmissibilityReport> {
        pr.validate()?;
        let n = pr.nf();
        let mut b = ReportBuilder::new(Theorem::CknClassical, self.tol);
        self.ckn_common(&mut b, pr);
        b.eq("scaling balance", scaling_residual(pr), 0.0);
        if pr.a > 0.0 {
            b.ge("alpha - sigma >= 0", pr.alpha - pr.sigma, 0.0, false);
            let critical = (1.0 / pr.p + (pr.alpha - 1.0) / n) - (1.0 / pr.r + pr.gamma / n);
            if critical.abs() <= self.tol {
                b.ge("alpha - sigma <= 1", 1.0, pr.alpha - pr.sigma, false);
            } else {
                b.vacuous("alpha - sigma <= 1");
            }
        } else {
            b.vacuous("alpha - sigma >= 0");
            b.vacuous("alpha - sigma <= 1");
        }
        Ok(b.finish())
    }

    /// Enlarged region available for radially symmetric functions.
    ///
    /// When `a = 1` the exponent q enters only through terms that cancel;
    /// the formulas are evaluated literally.
    pub fn ckn_radial(&self, pr: &CknParams) -> Result<AdmissibilityReport> {
        pr.validate()?;
        let n = pr.nf();
        let a = pr.a;
        let mut b = ReportBuilder::new(Theorem::CknRadial, self.tol);
        self.ckn_common(&mut b, pr);
        b.eq(
            "gamma = a*sigma + (1-a)*beta",
            if a > 0.0 {
                pr.sigma_relation_residual()
            } else {
                pr.gamma - pr.beta
            },
            0.0,
        );
        b.eq("scaling balance", scaling_residual(pr), 0.0);
        b.ge("(1-a)/q <= 1/r", 1.0 / pr.r, (1.0 - a) / pr.q, false);
        b.ge("1/r <= a/p + (1-a)/q", a / pr.p + (1.0 - a) / pr.q, 1.0 / pr.r, false);
        if a > 0.0 {
            let gap = pr.alpha - pr.sigma;
            let lower = (n - 1.0) * ((1.0 / a) * (1.0 / pr.r - 1.0 / pr.q) + 1.0 / pr.q - 1.0 / pr.p);
            b.ge("alpha - sigma >= radial lower bound", gap, lower, pr.p == 1.0);
            b.ge("alpha - sigma <= 0", 0.0, gap, false);
            let bound = (1.0 / a) * (1.0 / pr.r - 1.0 / pr.q) + 1.0 / pr.q;
            b.ge("-sigma/n < (1/a)(1/r - 1/q) + 1/q", bound, -pr.sigma / n, true);
        } else {
            b.vacuous("alpha - sigma >= radial lower bound");
            b.vacuous("alpha - sigma <= 0");
            b.vacuous("-sigma/n < (1/a)(1/r - 1/q) + 1/q");
        }
        Ok(b.finish())
    }

    /// Weighted trace inequality for functions radial in the first n variables.
    pub fn trace_radial(&self, pr: &TraceParams) -> Result<AdmissibilityReport> {
        pr.validate()?;
        let n = pr.n as f64;
        let s = pr.alpha + pr.beta;
        let mut b = ReportBuilder::new(Theorem::TraceRadial, self.tol);
        b.ge("alpha + beta >= -n/q'", s, -n * conj_recip(pr.q), false);
        b.ge("alpha + beta <= 1/p'", conj_recip(pr.p), s, false);
        b.ge("alpha > 1 - (n+1)/p", pr.alpha, 1.0 - (n + 1.0) / pr.p, true);
        b.eq("trace scaling balance", trace_scaling_residual(pr), 0.0);
        b.ge("p >= 1", pr.p, 1.0, false);
        b.ge("p <= q", pr.q, pr.p, false);
        Ok(b.finish())
    }

    /// Weighted estimate for the half-space trace operator T.
    pub fn trace_operator(&self, pr: &TraceParams) -> Result<AdmissibilityReport> {
        pr.validate()?;
        let n = pr.n as f64;
        let mut b = ReportBuilder::new(Theorem::TraceOperator, self.tol);
        b.ge("p >= 1", pr.p, 1.0, false);
        b.ge("p <= q", pr.q, pr.p, false);
        b.eq("trace scaling balance", trace_scaling_residual(pr), 0.0);
        b.ge("beta > -n/q'", pr.beta, -n * conj_recip(pr.q), true);
        b.ge("beta < n/q", n / pr.q, pr.beta, true);
        Ok(b.finish())
    }

    /// Weighted Riesz-potential estimate for radial functions.
    pub fn ddd(&self, pr: &DddParams) -> Result<AdmissibilityReport> {
        pr.validate()?;
        let n = pr.n as f64;
        let mut b = ReportBuilder::new(Theorem::Ddd, self.tol);
        b.ge("p >= 1", pr.p, 1.0, false);
        b.ge("p <= q", pr.q, pr.p, false);
        b.ge("alpha < n/p'", n * conj_recip(pr.p), pr.alpha, true);
        b.ge("beta < n/q", n / pr.q, pr.beta, true);
        b.ge(
            "alpha + beta >= (n-1)(1/q - 1/p)",
            pr.alpha + pr.beta,
            (n - 1.0) * (1.0 / pr.q - 1.0 / pr.p),
            pr.p == 1.0,
        );
        b.eq("riesz scaling balance", ddd_scaling_residual(pr), 0.0);
        b.ge("gamma > 0", pr.gamma, 0.0, true);
        b.ge("gamma < n", n, pr.gamma, true);
        Ok(b.finish())
    }
}

pub fn check_ckn_classical(params: &CknParams) -> Result<AdmissibilityReport> {
    Checker::default().ckn_classical(params)
}

pub fn check_ckn_radial(params: &CknParams) -> Result<AdmissibilityReport> {
    Checker::default().ckn_radial(params)
}

pub fn check_trace_radial(params: &TraceParams) -> Result<AdmissibilityReport> {
    Checker::default().trace_radial(params)
}

pub fn check_trace_operator(params: &TraceParams) -> Result<AdmissibilityReport> {
    Checker::default().trace_operator(params)
}

pub fn check_ddd(params: &DddParams) -> Result<AdmissibilityReport> {
    Checker::default().ddd(params)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() < 1e-12
    }

    #[test]
    fn derive_sigma_examples() {
        assert!(close(derive_sigma(1.0, 0.25, 7.0).unwrap(), 0.25));
        assert!(close(derive_sigma(0.5, 1.0, 0.0).unwrap(), 2.0));
        // (0.5 - 0.75 * (-1)) / 0.25 = 1.25 / 0.25
        assert!(close(derive_sigma(0.25, 0.5, -1.0).unwrap(), 5.0));
        assert_eq!(derive_sigma(0.0, 1.0, 1.0), Err(Error::SigmaUndetermined));
    }

    #[test]
    fn scaling_residual_examples() {
        let p = CknParams::from_gamma(3, 2.0, 5.0, 12.0, 1.0, 0.0, 0.3, 0.25).unwrap();
        assert!(close(scaling_residual(&p), 0.0));
        let p = CknParams::from_gamma(3, 2.0, 5.0, 4.0, 1.0, 0.0, 0.3, -0.25).unwrap();
        assert!(close(scaling_residual(&p), 0.0));
        let p = CknParams::from_gamma(3, 2.0, 5.0, 12.0, 1.0, 0.0, 0.3, 0.55).unwrap();
        assert!(close(scaling_residual(&p), 0.1));
    }

    #[test]
    fn malformed_input_raises() {
        assert!(CknParams::from_gamma(0, 2.0, 2.0, 2.0, 1.0, 0.0, 0.0, 0.0).is_err());
        assert!(TraceParams::new(3, f64::NAN, 3.0, 0.0, 0.0).is_err());
        let mut p = CknParams::from_gamma(3, 2.0, 2.0, 2.0, 0.5, 0.0, 0.0, 0.0).unwrap();
        p.sigma = 1.0;
        assert!(matches!(p.validate(), Err(Error::SigmaInconsistent { .. })));
        assert!(check_ckn_radial(&p).is_err());
    }

    #[test]
    fn classical_examples() {
        let ok = CknParams::new(3, 2.0, 4.0, 4.0, 1.0, 0.0, -0.25, -0.25, -0.25).unwrap();
        let rep = check_ckn_classical(&ok).unwrap();
        assert!(rep.verdict, "{:?}", rep.failed_labels());

        let bad = CknParams::new(3, 2.0, 12.0, 12.0, 1.0, 0.0, 0.25, 0.25, 0.25).unwrap();
        let rep = check_ckn_classical(&bad).unwrap();
        assert!(!rep.verdict);
        assert_eq!(rep.failed_labels(), vec!["alpha - sigma >= 0"]);
        assert!(close(rep.condition("alpha - sigma >= 0").unwrap().residual, -0.25));

        // a = 0: sign conditions vacuous.
        let zero = CknParams::from_gamma(3, 2.0, 3.0, 3.0, 0.0, 5.0, 0.5, 0.5).unwrap();
        let rep = check_ckn_classical(&zero).unwrap();
        assert!(rep.verdict);
        assert_eq!(rep.condition("alpha - sigma >= 0").unwrap().kind, ConditionKind::Vacuous);
        assert_eq!(rep.condition("alpha - sigma <= 1").unwrap().kind, ConditionKind::Vacuous);
    }

    #[test]
    fn radial_examples() {
        let p = CknParams::new(3, 2.0, 12.0, 12.0, 1.0, 0.0, 0.25, 0.25, 0.25).unwrap();
        let rep = check_ckn_radial(&p).unwrap();
        assert!(rep.verdict, "{:?}", rep.failed_labels());
        let lower = rep.condition("alpha - sigma >= radial lower bound").unwrap();
        // gap - lower = -1/4 - (-5/6)
        assert!(close(lower.residual, -0.25 + 5.0 / 6.0));
        assert!(close(rep.condition("alpha - sigma <= 0").unwrap().residual, 0.25));

        // alpha - sigma = 0.1 with r rebalanced: 1/r = 1/6 + 0.1/3.
        let r = 1.0 / (1.0 / 6.0 + 0.1 / 3.0);
        let p = CknParams::from_gamma(3, 2.0, 12.0, r, 1.0, 0.0, 0.25, -0.1).unwrap();
        assert!(close(scaling_residual(&p), 0.0));
        let rep = check_ckn_radial(&p).unwrap();
        assert!(!rep.verdict);
        assert_eq!(rep.failed_labels(), vec!["alpha - sigma <= 0"]);

        let trivial = CknParams::from_gamma(3, 2.0, 3.0, 3.0, 0.0, 0.0, 0.5, 0.5).unwrap();
        assert!(check_ckn_radial(&trivial).unwrap().verdict);
    }

    #[test]
    fn strictness_at_p_equal_one() {
        // n = 2, p = 1, a = 1/2: gap alpha - sigma = -1 equals the lower bound.
        let p = CknParams::from_gamma(2, 1.0, 2.0, 4.0, 0.5, 0.0, 0.0, 0.5).unwrap();
        assert!(close(p.sigma, 1.0));
        assert!(close(scaling_residual(&p), 0.0));
        let rep = check_ckn_radial(&p).unwrap();
        let c = rep.condition("alpha - sigma >= radial lower bound").unwrap();
        assert_eq!(c.kind, ConditionKind::Strict);
        assert!(close(c.residual, 0.0));
        assert_eq!(rep.failed_labels(), vec!["alpha - sigma >= radial lower bound"]);
        let mut q = p;
        q.p = 1.0 + 1e-9;
        let rep = check_ckn_radial(&q).unwrap();
        assert_eq!(
            rep.condition("alpha - sigma >= radial lower bound").unwrap().kind,
            ConditionKind::AtLeast
        );
    }

    #[test]
    fn trace_radial_examples() {
        let ok = TraceParams::new(3, 2.0, 3.0, 0.0, 0.0).unwrap();
        let rep = check_trace_radial(&ok).unwrap();
        assert!(rep.verdict, "{:?}", rep.failed_labels());
        assert!(close(rep.condition("alpha + beta >= -n/q'").unwrap().residual, 2.0));
        assert!(close(rep.condition("alpha + beta <= 1/p'").unwrap().residual, 0.5));

        let bad = TraceParams::new(3, 2.0, 3.0, -1.5, 1.5).unwrap();
        let rep = check_trace_radial(&bad).unwrap();
        assert_eq!(rep.failed_labels(), vec!["alpha > 1 - (n+1)/p"]);

        let edge = TraceParams::new(1, 1.0, 1.0, 0.5, 0.5).unwrap();
        let rep = check_trace_radial(&edge).unwrap();
        let c = rep.condition("alpha + beta <= 1/p'").unwrap();
        assert!(!c.satisfied);
        assert!(close(c.residual, -1.0));
    }

    #[test]
    fn trace_operator_examples() {
        let ok = TraceParams::new(3, 2.0, 3.0, 0.0, 0.0).unwrap();
        assert!(check_trace_operator(&ok).unwrap().verdict);
        let edge = TraceParams::new(3, 2.0, 3.0, -1.0, 1.0).unwrap();
        let rep = check_trace_operator(&edge).unwrap();
        assert!(!rep.verdict);
        assert_eq!(rep.failed_labels(), vec!["beta < n/q"]);
        assert!(close(rep.condition("beta < n/q").unwrap().residual, 0.0));
        let swapped = TraceParams::new(3, 3.0, 2.0, 0.0, 0.0).unwrap();
        let rep = check_trace_operator(&swapped).unwrap();
        assert!(rep.failed_labels().contains(&"p <= q"));
    }

    #[test]
    fn ddd_examples() {
        let ok = DddParams::new(3, 2.0, 2.0, 0.5, 0.5, 2.0).unwrap();
        let rep = check_ddd(&ok).unwrap();
        assert!(rep.verdict, "{:?}", rep.failed_labels());

        // p = 1, q = 2: (n-1)(1/q - 1/p) = -1 attained exactly, gamma = 5/2 from scaling.
        let tight = DddParams::new(3, 1.0, 2.0, -0.5, -0.5, 2.5).unwrap();
        assert!(close(ddd_scaling_residual(&tight), 0.0));
        let rep = check_ddd(&tight).unwrap();
        assert_eq!(rep.failed_labels(), vec!["alpha + beta >= (n-1)(1/q - 1/p)"]);

        let full = DddParams::new(3, 2.0, 2.0, 0.0, 0.0, 3.0).unwrap();
        let rep = check_ddd(&full).unwrap();
        assert!(rep.failed_labels().contains(&"gamma < n"));
    }
}
