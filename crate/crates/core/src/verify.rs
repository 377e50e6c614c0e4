//! Ratio computations for each inequality, dilation slopes, family scans and
//! refinement checks.
//!
//! A ratio is evidence at one test function, never a certificate. Records
//! keep lhs, rhs and flags so that 0/0 and truncated cases stay visible
//! instead of turning into NaN.

use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::exponents::{
    ddd_scaling_residual, scaling_residual, trace_scaling_residual, AdmissibilityReport, Checker,
    CknParams, DddParams, TraceParams,
};
use crate::fields::{make_halfspace, make_radial, FamilySpec, HalfSpaceField, RadialProfile, ZProfile};
use crate::grids::{LogGrid, ProductGrid};
use crate::kernels::fit_line;
use crate::operators::{
    weighted_norm_estimate, weighted_norm_halfspace_estimate, NormEstimate, RieszOperator,
};

/// Tolerance on `|αp + 1|` below which the Hardy step is refused.
pub const HARDY_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Flag {
    /// Both sides vanish (zero test function).
    ZeroOverZero,
    /// A norm is not captured by the grid.
    Truncation,
    /// A norm came out infinite or NaN.
    NonFinite,
    /// Parameters fail the admissibility predicate.
    Inadmissible,
}

impl Flag {
    pub fn tag(&self) -> &'static str {
        match self {
            Flag::ZeroOverZero => "zero-over-zero",
            Flag::Truncation => "truncation",
            Flag::NonFinite => "non-finite",
            Flag::Inadmissible => "inadmissible",
        }
    }
}

/// Which inequality a record refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Kind {
    CknClassical,
    CknRadial,
    Trace,
    TraceOperator,
    Ddd,
    Hardy,
}

impl Kind {
    pub fn tag(&self) -> &'static str {
        match self {
            Kind::CknClassical => "ckn-classical",
            Kind::CknRadial => "ckn-radial",
            Kind::Trace => "trace",
            Kind::TraceOperator => "trace-operator",
            Kind::Ddd => "ddd",
            Kind::Hardy => "hardy",
        }
    }
}

impl std::str::FromStr for Kind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "ckn-classical" | "ckn" => Kind::CknClassical,
            "ckn-radial" => Kind::CknRadial,
            "trace" | "trace-radial" => Kind::Trace,
            "trace-operator" => Kind::TraceOperator,
            "ddd" => Kind::Ddd,
            "hardy" => Kind::Hardy,
            other => {
                return Err(Error::InvalidParameter(format!("unknown theorem {other}")));
            }
        })
    }
}

/// Hardy-step exponents `(n, p, α)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HardyParams {
    pub n: u32,
    pub p: f64,
    pub alpha: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(untagged)]
pub enum ParamSet {
    Ckn(CknParams),
    Trace(TraceParams),
    Ddd(DddParams),
    Hardy(HardyParams),
}

impl ParamSet {
    /// Predicted `d log(ratio) / d log λ` for `u ↦ u(λ·)`.
    pub fn predicted_slope(&self) -> f64 {
        match self {
            ParamSet::Ckn(p) => -(p.n as f64) * scaling_residual(p),
            ParamSet::Trace(p) => -trace_scaling_residual(p),
            ParamSet::Ddd(p) => -(p.n as f64) * ddd_scaling_residual(p),
            ParamSet::Hardy(_) => 0.0,
        }
    }

    pub fn n(&self) -> u32 {
        match self {
            ParamSet::Ckn(p) => p.n,
            ParamSet::Trace(p) => p.n,
            ParamSet::Ddd(p) => p.n,
            ParamSet::Hardy(p) => p.n,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RatioRecord {
    pub theorem: Kind,
    pub params: ParamSet,
    pub family: String,
    pub lhs: f64,
    pub rhs: f64,
    /// `lhs/rhs` when defined.
    pub ratio: Option<f64>,
    pub flags: Vec<Flag>,
}

impl RatioRecord {
    fn build(theorem: Kind, params: ParamSet, family: String, lhs: NormEstimate, rhs: NormEstimate) -> Self {
        let mut flags = Vec::new();
        if lhs.truncation_warning || rhs.truncation_warning {
            flags.push(Flag::Truncation);
        }
        let ratio = if !lhs.value.is_finite() || !rhs.value.is_finite() {
            flags.push(Flag::NonFinite);
            None
        } else if rhs.value == 0.0 {
            if lhs.value == 0.0 {
                flags.push(Flag::ZeroOverZero);
            } else {
                flags.push(Flag::NonFinite);
            }
            None
        } else {
            Some(lhs.value / rhs.value)
        };
        Self {
            theorem,
            params,
            family,
            lhs: lhs.value,
            rhs: rhs.value,
            ratio,
            flags,
        }
    }

    pub fn flag_tags(&self) -> String {
        self.flags.iter().map(|f| f.tag()).collect::<Vec<_>>().join(";")
    }
}

fn combine(a: NormEstimate, b: NormEstimate, ea: f64, eb: f64) -> NormEstimate {
    let part = |x: NormEstimate, e: f64| if e == 0.0 { 1.0 } else { x.value.powf(e) };
    NormEstimate {
        value: part(a, ea) * part(b, eb),
        truncation_warning: (ea != 0.0 && a.truncation_warning) || (eb != 0.0 && b.truncation_warning),
    }
}

/// `‖|x|^γ u‖_r / (‖|x|^α ∇u‖_p^a ‖|x|^β u‖_q^{1-a})`; r < 1 is allowed.
pub fn ckn_ratio(u: &RadialProfile, params: &CknParams) -> Result<RatioRecord> {
    params.validate()?;
    let n = params.n;
    let lhs = weighted_norm_estimate(&u.u, &u.grid, params.gamma, params.r, n)?;
    let grad = if params.a > 0.0 {
        weighted_norm_estimate(&u.du, &u.grid, params.alpha, params.p, n)?
    } else {
        NormEstimate { value: 1.0, truncation_warning: false }
    };
    let func = if params.a < 1.0 {
        weighted_norm_estimate(&u.u, &u.grid, params.beta, params.q, n)?
    } else {
        NormEstimate { value: 1.0, truncation_warning: false }
    };
    let rhs = combine(grad, func, params.a, 1.0 - params.a);
    Ok(RatioRecord::build(
        Kind::CknRadial,
        ParamSet::Ckn(*params),
        u.spec.tag(),
        lhs,
        rhs,
    ))
}

/// `‖f(·,0)|x|^{-β}‖_{L^q(ℝ^n)} / ‖|(y,z)|^α ∇f‖_{L^p(ℝ^n×ℝ₊)}`.
pub fn trace_ratio(f: &HalfSpaceField, params: &TraceParams) -> Result<RatioRecord> {
    params.validate()?;
    let n = params.n;
    let lhs = weighted_norm_estimate(&f.trace0, &f.pgrid.rgrid, -params.beta, params.q, n)?;
    let rhs = weighted_norm_halfspace_estimate(&f.grad_mag, &f.pgrid, params.alpha, params.p, n)?;
    Ok(RatioRecord::build(Kind::Trace, ParamSet::Trace(*params), f.tag(), lhs, rhs))
}

/// `‖|x|^α u‖_p / ‖|x|^{α+1} u′‖_p`.
pub fn hardy_step_ratio(u: &RadialProfile, alpha: f64, p: f64, n: u32) -> Result<f64> {
    let rec = hardy_step_record(u, alpha, p, n)?;
    rec.ratio.ok_or_else(|| {
        Error::InvalidParameter(format!("Hardy ratio undefined ({})", rec.flag_tags()))
    })
}

pub fn hardy_step_record(u: &RadialProfile, alpha: f64, p: f64, n: u32) -> Result<RatioRecord> {
    if !(p >= 1.0) {
        return Err(Error::InvalidParameter(format!("need p >= 1, got {p}")));
    }
    if (alpha * p + 1.0).abs() < HARDY_TOL {
        return Err(Error::HardyProviso(alpha * p));
    }
    let lhs = weighted_norm_estimate(&u.u, &u.grid, alpha, p, n)?;
    let rhs = weighted_norm_estimate(&u.du, &u.grid, alpha + 1.0, p, n)?;
    Ok(RatioRecord::build(
        Kind::Hardy,
        ParamSet::Hardy(HardyParams { n, p, alpha }),
        u.spec.tag(),
        lhs,
        rhs,
    ))
}

/// `‖|x|^{-β} T_γ v‖_q / ‖|x|^α v‖_p`.
pub fn ddd_ratio(v: &RadialProfile, params: &DddParams) -> Result<RatioRecord> {
    let op = RieszOperator::new(v.grid.clone(), params.gamma, params.n)?;
    ddd_ratio_with(&op, v, params)
}

/// As [`ddd_ratio`] with a prebuilt operator (same grid, γ and n).
pub fn ddd_ratio_with(op: &RieszOperator, v: &RadialProfile, params: &DddParams) -> Result<RatioRecord> {
    params.validate()?;
    if !op.grid().same_as(&v.grid) {
        return Err(Error::GridMismatch);
    }
    let t = op.apply(&v.u)?;
    let mut lhs = weighted_norm_estimate(&t.values, &v.grid, -params.beta, params.q, params.n)?;
    lhs.truncation_warning |= t.truncation.warning;
    let rhs = weighted_norm_estimate(&v.u, &v.grid, params.alpha, params.p, params.n)?;
    Ok(RatioRecord::build(Kind::Ddd, ParamSet::Ddd(*params), v.spec.tag(), lhs, rhs))
}

/// A test function paired with the inequality it is fed to.
pub enum Target<'a> {
    Ckn(&'a RadialProfile, CknParams),
    Trace(&'a HalfSpaceField, TraceParams),
    Ddd(&'a RadialProfile, DddParams, &'a RieszOperator),
    Hardy(&'a RadialProfile, HardyParams),
}

impl Target<'_> {
    pub fn params(&self) -> ParamSet {
        match self {
            Target::Ckn(_, p) => ParamSet::Ckn(*p),
            Target::Trace(_, p) => ParamSet::Trace(*p),
            Target::Ddd(_, p, _) => ParamSet::Ddd(*p),
            Target::Hardy(_, p) => ParamSet::Hardy(*p),
        }
    }

    /// The record for the test function dilated by λ.
    pub fn record_at(&self, lambda: f64) -> Result<RatioRecord> {
        match self {
            Target::Ckn(u, p) => ckn_ratio(&u.dilate(lambda)?, p),
            Target::Trace(f, p) => trace_ratio(&f.dilate(lambda)?, p),
            Target::Ddd(v, p, op) => ddd_ratio_with(op, &v.dilate(lambda)?, p),
            Target::Hardy(u, p) => hardy_step_record(&u.dilate(lambda)?, p.alpha, p.p, p.n),
        }
    }

    /// The same record with every grid doubled in resolution.
    pub fn refined_record(&self) -> Result<RatioRecord> {
        match self {
            Target::Ckn(u, p) => ckn_ratio(&make_radial(u.spec, Arc::new(u.grid.refined()?))?, p),
            Target::Trace(f, p) => {
                let pg = Arc::new(f.pgrid.refined()?);
                trace_ratio(&make_halfspace(f.radial, f.zprofile, pg)?, p)
            }
            Target::Ddd(v, p, _) => {
                ddd_ratio(&make_radial(v.spec, Arc::new(v.grid.refined()?))?, p)
            }
            Target::Hardy(u, p) => {
                let fine = make_radial(u.spec, Arc::new(u.grid.refined()?))?;
                hardy_step_record(&fine, p.alpha, p.p, p.n)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DilationScan {
    pub lambdas: Vec<f64>,
    pub ratios: Vec<f64>,
    pub slope: f64,
    pub predicted: f64,
    pub flags: Vec<Flag>,
}

/// Least-squares slope of `log ratio` against `log λ`.
pub fn dilation_scan(target: &Target<'_>, lambdas: &[f64]) -> Result<DilationScan> {
    if lambdas.len() < 2 {
        return Err(Error::InvalidParameter("need at least two dilation factors".into()));
    }
    let mut ratios = Vec::with_capacity(lambdas.len());
    let mut flags = Vec::new();
    for &l in lambdas {
        let rec = target.record_at(l)?;
        for f in &rec.flags {
            if !flags.contains(f) {
                flags.push(*f);
            }
        }
        let r = rec.ratio.ok_or_else(|| {
            Error::InvalidParameter(format!("ratio undefined at lambda = {l} ({})", rec.flag_tags()))
        })?;
        ratios.push(r);
    }
    let xs: Vec<f64> = lambdas.iter().map(|l| l.ln()).collect();
    let ys: Vec<f64> = ratios.iter().map(|r| r.ln()).collect();
    let (slope, _, _) = fit_line(&xs, &ys);
    Ok(DilationScan {
        lambdas: lambdas.to_vec(),
        ratios,
        slope,
        predicted: target.params().predicted_slope(),
        flags,
    })
}

/// Relative change of the ratio when the grids double in resolution.
pub fn refinement_change(target: &Target<'_>) -> Result<f64> {
    let coarse = target.record_at(1.0)?;
    let fine = target.refined_record()?;
    match (coarse.ratio, fine.ratio) {
        (Some(a), Some(b)) => Ok((a - b).abs() / b.abs()),
        _ => Err(Error::InvalidParameter("ratio undefined under refinement".into())),
    }
}

/// Parameters for a family scan, tagged by inequality.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ScanParams {
    CknClassical(CknParams),
    CknRadial(CknParams),
    Trace(TraceParams),
    TraceOperator(TraceParams),
    Ddd(DddParams),
}

impl ScanParams {
    pub fn admissibility(&self, checker: &Checker) -> Result<AdmissibilityReport> {
        match self {
            ScanParams::CknClassical(p) => checker.ckn_classical(p),
            ScanParams::CknRadial(p) => checker.ckn_radial(p),
            ScanParams::Trace(p) => checker.trace_radial(p),
            ScanParams::TraceOperator(p) => checker.trace_operator(p),
            ScanParams::Ddd(p) => checker.ddd(p),
        }
    }
}

/// Grids and options shared by a scan.
#[derive(Debug, Clone)]
pub struct ScanSetup {
    pub grid: Arc<LogGrid>,
    pub pgrid: Arc<ProductGrid>,
    pub zprofile: ZProfile,
    pub checker: Checker,
    /// Refuse inadmissible parameters instead of flagging them.
    pub require_admissible: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FamilyScan {
    pub records: Vec<RatioRecord>,
    /// Largest defined ratio, if any.
    pub sup: Option<f64>,
}

/// Ratios of one parameter tuple over a list of test families.
pub fn family_scan(specs: &[FamilySpec], params: &ScanParams, setup: &ScanSetup) -> Result<FamilyScan> {
    if specs.is_empty() {
        return Err(Error::NothingToScan);
    }
    let report = params.admissibility(&setup.checker)?;
    if !report.verdict && setup.require_admissible {
        return Err(Error::Inadmissible(report.failed_labels().join(", ")));
    }
    let riesz = match params {
        ScanParams::Ddd(p) => Some(RieszOperator::new(setup.grid.clone(), p.gamma, p.n)?),
        _ => None,
    };
    let mut records = Vec::with_capacity(specs.len());
    for spec in specs {
        let mut rec = match params {
            ScanParams::CknClassical(p) | ScanParams::CknRadial(p) => {
                let u = make_radial(*spec, setup.grid.clone())?;
                let mut r = ckn_ratio(&u, p)?;
                if matches!(params, ScanParams::CknClassical(_)) {
                    r.theorem = Kind::CknClassical;
                }
                r
            }
            ScanParams::Trace(p) | ScanParams::TraceOperator(p) => {
                let f = make_halfspace(*spec, setup.zprofile, setup.pgrid.clone())?;
                let mut r = trace_ratio(&f, p)?;
                if matches!(params, ScanParams::TraceOperator(_)) {
                    r.theorem = Kind::TraceOperator;
                }
                r
            }
            ScanParams::Ddd(p) => {
                let v = make_radial(*spec, setup.grid.clone())?;
                ddd_ratio_with(riesz.as_ref().expect("built above"), &v, p)?
            }
        };
        if !report.verdict {
            rec.flags.push(Flag::Inadmissible);
        }
        records.push(rec);
    }
    let sup = records
        .iter()
        .filter_map(|r| r.ratio)
        .fold(None, |m: Option<f64>, r| Some(m.map_or(r, |m| m.max(r))));
    Ok(FamilyScan { records, sup })
}
