//! Run configuration files for `verify` and `scan`.
//!
//! The format is a small INI dialect:
//!
//! ```text
//! theorem = ckn-radial
//! tol = 1e-12
//!
//! [params]
//! n = 3
//! p = 2
//! q = 12
//! r = auto          # solved from the scaling balance
//! a = 1
//! alpha = 0
//! beta = 0.25
//! gamma = 0.2:0.3:3 # sweep start:stop:count
//!
//! [grid]
//! rmin = 1e-5
//! rmax = 1e4
//! n = 2048
//!
//! [families]
//! family = "gaussian", scale = 1.0
//! family = "bump", scale = 2.0, sharpness = 2
//!
//! [zprofile]
//! kind = "exponential"
//! scale = 1.0
//! ```
//!
//! `#` and `;` start comments. Numbers may be written as rationals (`3/2`).

use std::collections::BTreeMap;
use std::path::Path;

use crate::error::{Error, Result};
use crate::exponents::{
    ddd_scaling_residual, scaling_residual, trace_scaling_residual, Checker, CknParams, DddParams,
    TraceParams, DEFAULT_TOL,
};
use crate::fields::{FamilySpec, ZProfile};
use crate::grids::{
    DEFAULT_N, DEFAULT_RMAX, DEFAULT_RMIN, DEFAULT_ZBAR_MAX, DEFAULT_ZBAR_MIN, DEFAULT_ZBAR_N,
};
use crate::verify::{Kind, ScanParams};

/// One `[params]` entry.
#[derive(Debug, Clone, PartialEq)]
pub enum ParamValue {
    Fixed(f64),
    /// Inclusive linear sweep.
    Sweep { start: f64, stop: f64, count: usize },
    /// Solve from the scaling balance.
    Auto,
}

impl ParamValue {
    fn values(&self) -> Vec<f64> {
        match *self {
            ParamValue::Fixed(v) => vec![v],
            ParamValue::Sweep { start, stop, count } => {
                if count == 1 {
                    return vec![start];
                }
                (0..count)
                    .map(|k| start + (stop - start) * k as f64 / (count - 1) as f64)
                    .collect()
            }
            ParamValue::Auto => vec![f64::NAN],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSettings {
    pub rmin: f64,
    pub rmax: f64,
    pub n: usize,
    pub zbar_min: f64,
    pub zbar_max: f64,
    pub zbar_n: usize,
}

impl Default for GridSettings {
    fn default() -> Self {
        Self {
            rmin: DEFAULT_RMIN,
            rmax: DEFAULT_RMAX,
            n: DEFAULT_N,
            zbar_min: DEFAULT_ZBAR_MIN,
            zbar_max: DEFAULT_ZBAR_MAX,
            zbar_n: DEFAULT_ZBAR_N,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub theorem: Kind,
    pub tol: f64,
    pub require_admissible: bool,
    /// Declaration order is kept; sweeps expand in that order.
    pub params: Vec<(String, ParamValue)>,
    pub grid: GridSettings,
    pub families: Vec<FamilySpec>,
    pub zprofile: ZProfile,
}

fn cfg_err(line: usize, message: impl Into<String>) -> Error {
    Error::Config {
        location: format!("line {line}"),
        message: message.into(),
    }
}

/// Decimal or `a/b`.
pub fn parse_number(s: &str) -> Option<f64> {
    let s = s.trim();
    if let Some((a, b)) = s.split_once('/') {
        let a: f64 = a.trim().parse().ok()?;
        let b: f64 = b.trim().parse().ok()?;
        if b == 0.0 {
            return None;
        }
        return Some(a / b);
    }
    s.parse().ok()
}

fn parse_param_value(s: &str) -> Option<ParamValue> {
    let s = s.trim();
    if s == "auto" {
        return Some(ParamValue::Auto);
    }
    let parts: Vec<&str> = s.split(':').collect();
    match parts.len() {
        1 => parse_number(s).map(ParamValue::Fixed),
        3 => {
            let count: usize = parts[2].trim().parse().ok()?;
            if count == 0 {
                return None;
            }
            Some(ParamValue::Sweep {
                start: parse_number(parts[0])?,
                stop: parse_number(parts[1])?,
                count,
            })
        }
        _ => None,
    }
}

fn unquote(s: &str) -> &str {
    let s = s.trim();
    s.strip_prefix('"')
        .and_then(|t| t.strip_suffix('"'))
        .unwrap_or(s)
}

fn parse_family(line: usize, text: &str) -> Result<FamilySpec> {
    let mut fields = BTreeMap::new();
    for part in text.split(',') {
        let (k, v) = part
            .split_once('=')
            .ok_or_else(|| cfg_err(line, format!("expected key = value in '{}'", part.trim())))?;
        fields.insert(k.trim().to_string(), unquote(v).to_string());
    }
    let num = |key: &str| -> Result<Option<f64>> {
        match fields.get(key) {
            None => Ok(None),
            Some(v) => parse_number(v)
                .map(Some)
                .ok_or_else(|| cfg_err(line, format!("bad number for {key}: {v}"))),
        }
    };
    let scale = num("scale")?.unwrap_or(1.0);
    let kind = fields
        .get("family")
        .ok_or_else(|| cfg_err(line, "family line without 'family'"))?;
    let spec = match kind.as_str() {
        "gaussian" => FamilySpec::gaussian(scale),
        "bump" => {
            let m = num("sharpness")?.unwrap_or(1.0);
            if m < 1.0 || m.fract() != 0.0 {
                return Err(cfg_err(line, "sharpness must be a positive integer"));
            }
            FamilySpec::bump(scale, m as u32)
        }
        "power-tail" | "power_tail" => {
            let lam = num("tail_exponent")?
                .ok_or_else(|| cfg_err(line, "power-tail needs tail_exponent"))?;
            FamilySpec::power_tail(scale, lam, num("cutoff")?)
        }
        other => return Err(cfg_err(line, format!("unknown family {other}"))),
    };
    let spec = match num("amplitude")? {
        Some(a) => spec.with_amplitude(a),
        None => spec,
    };
    spec.validate().map_err(|e| cfg_err(line, e.to_string()))?;
    Ok(spec)
}

#[derive(PartialEq)]
enum Section {
    Top,
    Params,
    Grid,
    Families,
    ZProfile,
}

impl RunConfig {
    pub fn from_path(path: &Path) -> Result<Self> {
        Self::from_path_with(path, None)
    }

    /// As [`RunConfig::from_path`]; `theorem` replaces the file's choice and
    /// makes the `theorem` key optional.
    pub fn from_path_with(path: &Path, theorem: Option<Kind>) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        Self::parse_with(&text, theorem)
    }

    pub fn parse(text: &str) -> Result<Self> {
        Self::parse_with(text, None)
    }

    pub fn parse_with(text: &str, theorem_override: Option<Kind>) -> Result<Self> {
        let mut theorem = None;
        let mut tol = DEFAULT_TOL;
        let mut require_admissible = false;
        let mut params: Vec<(String, ParamValue)> = Vec::new();
        let mut grid = GridSettings::default();
        let mut families = Vec::new();
        let mut zkind = "exponential".to_string();
        let mut zscale = 1.0;
        let mut section = Section::Top;

        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let content = raw.split(['#', ';']).next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            if let Some(name) = content.strip_prefix('[').and_then(|s| s.strip_suffix(']')) {
                section = match name.trim() {
                    "params" => Section::Params,
                    "grid" => Section::Grid,
                    "families" => Section::Families,
                    "zprofile" => Section::ZProfile,
                    other => return Err(cfg_err(line, format!("unknown section [{other}]"))),
                };
                continue;
            }
            if section == Section::Families {
                families.push(parse_family(line, content)?);
                continue;
            }
            let (key, value) = content
                .split_once('=')
                .ok_or_else(|| cfg_err(line, "expected key = value"))?;
            let (key, value) = (key.trim(), unquote(value));
            let number = || {
                parse_number(value).ok_or_else(|| cfg_err(line, format!("bad number for {key}: {value}")))
            };
            let count = || -> Result<usize> {
                value
                    .parse()
                    .map_err(|_| cfg_err(line, format!("bad count for {key}: {value}")))
            };
            match section {
                Section::Top => match key {
                    "theorem" => {
                        theorem = Some(value.parse::<Kind>().map_err(|e| cfg_err(line, e.to_string()))?)
                    }
                    "tol" => tol = number()?,
                    "require_admissible" => {
                        require_admissible = value
                            .parse()
                            .map_err(|_| cfg_err(line, "require_admissible must be true or false"))?
                    }
                    _ => return Err(cfg_err(line, format!("unknown key {key}"))),
                },
                Section::Params => {
                    const KNOWN: [&str; 9] =
                        ["n", "p", "q", "r", "a", "alpha", "beta", "gamma", "sigma"];
                    if !KNOWN.contains(&key) {
                        return Err(cfg_err(line, format!("unknown parameter {key}")));
                    }
                    if params.iter().any(|(k, _)| k == key) {
                        return Err(cfg_err(line, format!("duplicate parameter {key}")));
                    }
                    let v = parse_param_value(value)
                        .ok_or_else(|| cfg_err(line, format!("bad value for {key}: {value}")))?;
                    params.push((key.to_string(), v));
                }
                Section::Grid => match key {
                    "rmin" => grid.rmin = number()?,
                    "rmax" => grid.rmax = number()?,
                    "n" => grid.n = count()?,
                    "zbar_min" => grid.zbar_min = number()?,
                    "zbar_max" => grid.zbar_max = number()?,
                    "zbar_n" => grid.zbar_n = count()?,
                    _ => return Err(cfg_err(line, format!("unknown grid key {key}"))),
                },
                Section::ZProfile => match key {
                    "kind" => zkind = value.to_string(),
                    "scale" => zscale = number()?,
                    _ => return Err(cfg_err(line, format!("unknown zprofile key {key}"))),
                },
                Section::Families => unreachable!(),
            }
        }

        let theorem = theorem_override
            .or(theorem)
            .ok_or_else(|| cfg_err(0, "missing 'theorem = ...'"))?;
        let autos = params.iter().filter(|(_, v)| *v == ParamValue::Auto).count();
        if autos > 1 {
            return Err(cfg_err(0, "at most one parameter may be 'auto'"));
        }
        let zprofile = match zkind.as_str() {
            "exponential" => ZProfile::Exponential { scale: zscale },
            "gaussian" => ZProfile::Gaussian { scale: zscale },
            other => return Err(cfg_err(0, format!("unknown zprofile kind {other}"))),
        };
        Ok(Self {
            theorem,
            tol,
            require_admissible,
            params,
            grid,
            families,
            zprofile,
        })
    }

    pub fn checker(&self) -> Checker {
        Checker::new(self.tol)
    }

    /// Every parameter tuple of the sweep, in declaration order.
    pub fn cells(&self) -> Result<Vec<ScanParams>> {
        let mut maps: Vec<BTreeMap<String, f64>> = vec![BTreeMap::new()];
        let mut auto_key = None;
        for (k, v) in &self.params {
            if *v == ParamValue::Auto {
                auto_key = Some(k.clone());
            }
            let vals = v.values();
            maps = maps
                .into_iter()
                .flat_map(|m| {
                    vals.iter().map(move |x| {
                        let mut m = m.clone();
                        m.insert(k.clone(), *x);
                        m
                    })
                })
                .collect();
        }
        maps.iter()
            .map(|m| build_params(self.theorem, m, auto_key.as_deref()))
            .collect()
    }
}

fn get(m: &BTreeMap<String, f64>, key: &str) -> Result<f64> {
    m.get(key)
        .copied()
        .ok_or_else(|| Error::InvalidParameter(format!("missing parameter {key}")))
}

fn get_n(m: &BTreeMap<String, f64>) -> Result<u32> {
    let n = get(m, "n")?;
    if n < 1.0 || n.fract() != 0.0 {
        return Err(Error::InvalidParameter(format!("n must be a positive integer, got {n}")));
    }
    Ok(n as u32)
}

/// Exponents entered as reciprocals are solved in `1/x`, which keeps the
/// scaling residual affine.
fn reciprocal_key(key: &str) -> bool {
    matches!(key, "p" | "q" | "r")
}

/// Solve the affine equation `residual(x) = 0` for the `auto` key.
fn solve_auto<F>(m: &BTreeMap<String, f64>, key: &str, residual: F) -> Result<BTreeMap<String, f64>>
where
    F: Fn(&BTreeMap<String, f64>) -> Result<f64>,
{
    let at = |t: f64| -> Result<f64> {
        let mut mm = m.clone();
        mm.insert(key.to_string(), if reciprocal_key(key) { 1.0 / t } else { t });
        residual(&mm)
    };
    let (t0, t1) = (0.25, 0.75);
    let (r0, r1) = (at(t0)?, at(t1)?);
    if r1 == r0 {
        return Err(Error::InvalidParameter(format!(
            "{key} does not enter the scaling balance"
        )));
    }
    let t = t0 - r0 * (t1 - t0) / (r1 - r0);
    let value = if reciprocal_key(key) { 1.0 / t } else { t };
    if !value.is_finite() || (reciprocal_key(key) && value <= 0.0) {
        return Err(Error::InvalidParameter(format!("auto {key} has no admissible value")));
    }
    let mut out = m.clone();
    out.insert(key.to_string(), value);
    Ok(out)
}

fn ckn_from(m: &BTreeMap<String, f64>) -> Result<CknParams> {
    let (n, a) = (get_n(m)?, get(m, "a")?);
    let (p, q, r) = (get(m, "p")?, get(m, "q")?, get(m, "r")?);
    let (alpha, beta, gamma) = (get(m, "alpha")?, get(m, "beta")?, get(m, "gamma")?);
    match m.get("sigma") {
        Some(&s) if a > 0.0 => CknParams::new(n, p, q, r, a, alpha, beta, gamma, s),
        _ => CknParams::from_gamma(n, p, q, r, a, alpha, beta, gamma),
    }
}

fn trace_from(m: &BTreeMap<String, f64>) -> Result<TraceParams> {
    TraceParams::new(get_n(m)?, get(m, "p")?, get(m, "q")?, get(m, "alpha")?, get(m, "beta")?)
}

fn ddd_from(m: &BTreeMap<String, f64>) -> Result<DddParams> {
    DddParams::new(
        get_n(m)?,
        get(m, "p")?,
        get(m, "q")?,
        get(m, "alpha")?,
        get(m, "beta")?,
        get(m, "gamma")?,
    )
}

fn build_params(theorem: Kind, m: &BTreeMap<String, f64>, auto: Option<&str>) -> Result<ScanParams> {
    match theorem {
        Kind::CknClassical | Kind::CknRadial => {
            let m = match auto {
                // sigma follows gamma, so it is dropped from the solve.
                Some(k) => {
                    let mut base = m.clone();
                    base.remove("sigma");
                    solve_auto(&base, k, |mm| Ok(scaling_residual(&ckn_from(mm)?)))?
                }
                None => m.clone(),
            };
            let p = ckn_from(&m)?;
            Ok(if theorem == Kind::CknClassical {
                ScanParams::CknClassical(p)
            } else {
                ScanParams::CknRadial(p)
            })
        }
        Kind::Trace | Kind::TraceOperator => {
            let m = match auto {
                Some(k) => solve_auto(m, k, |mm| Ok(trace_scaling_residual(&trace_from(mm)?)))?,
                None => m.clone(),
            };
            let p = trace_from(&m)?;
            Ok(if theorem == Kind::Trace {
                ScanParams::Trace(p)
            } else {
                ScanParams::TraceOperator(p)
            })
        }
        Kind::Ddd => {
            let m = match auto {
                Some(k) => solve_auto(m, k, |mm| Ok(ddd_scaling_residual(&ddd_from(mm)?)))?,
                None => m.clone(),
            };
            Ok(ScanParams::Ddd(ddd_from(&m)?))
        }
        Kind::Hardy => Err(Error::InvalidParameter(
            "hardy runs take n, p and alpha on the command line".into(),
        )),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const SAMPLE: &str = r#"
theorem = ckn-radial   # comment
[params]
n = 3
p = 2
q = 12
r = auto
a = 1
alpha = 0
beta = 1/4
gamma = 0.1:0.25:2

[grid]
rmin = 1e-5
n = 1024

[families]
family = "gaussian", scale = 1.0
family = "bump", scale = 2, sharpness = 3
family = "power-tail", scale = 1, tail_exponent = 4, cutoff = 100
"#;

    #[test]
    fn parses_sample() {
        let cfg = RunConfig::parse(SAMPLE).unwrap();
        assert_eq!(cfg.theorem, Kind::CknRadial);
        assert_eq!(cfg.grid.n, 1024);
        assert_eq!(cfg.grid.rmax, DEFAULT_RMAX);
        assert_eq!(cfg.families.len(), 3);
        assert_eq!(cfg.families[1], FamilySpec::bump(2.0, 3));
        let cells = cfg.cells().unwrap();
        assert_eq!(cells.len(), 2);
        for c in cells {
            let ScanParams::CknRadial(p) = c else { panic!() };
            assert!(scaling_residual(&p).abs() < 1e-12);
        }
    }

    #[test]
    fn auto_r_matches_hand_solution() {
        // 1/r = 1/p + (α-1)/n - γ/n with n = 3, p = 2, α = 0, γ = 1/4 → r = 12.
        let cfg = RunConfig::parse(
            "theorem = ckn-radial\n[params]\nn=3\np=2\nq=12\nr=auto\na=1\nalpha=0\nbeta=0.25\ngamma=0.25\n",
        )
        .unwrap();
        let ScanParams::CknRadial(p) = cfg.cells().unwrap()[0] else { panic!() };
        assert!((p.r - 12.0).abs() < 1e-10, "{}", p.r);
    }

    #[test]
    fn errors_carry_lines() {
        let err = RunConfig::parse("theorem = ddd\n[params]\nn = x\n").unwrap_err();
        assert!(matches!(err, Error::Config { ref location, .. } if location == "line 3"), "{err:?}");
        let err = RunConfig::parse("theorem = ddd\n[bogus]\n").unwrap_err();
        assert!(matches!(err, Error::Config { ref location, .. } if location == "line 2"));
        assert!(RunConfig::parse("[params]\nn=3\n").is_err());
    }

    #[test]
    fn sigma_checked_against_gamma() {
        let text = "theorem = ckn-classical\n[params]\nn=3\np=2\nq=2\nr=2\na=0.5\nalpha=0\nbeta=0\ngamma=0.5\nsigma=2\n";
        let cfg = RunConfig::parse(text).unwrap();
        assert!(matches!(cfg.cells(), Err(Error::SigmaInconsistent { .. })));
    }

    #[test]
    fn numbers() {
        assert_eq!(parse_number("3/2"), Some(1.5));
        assert_eq!(parse_number(" 1e-3 "), Some(1e-3));
        assert_eq!(parse_number("1/0"), None);
        assert_eq!(
            parse_param_value("0:1:3").unwrap().values(),
            vec![0.0, 0.5, 1.0]
        );
    }
}
