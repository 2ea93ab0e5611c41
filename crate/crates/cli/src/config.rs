use std::fmt;
use std::str::FromStr;

use seqaccel::series_lab::SeriesSpec;

use crate::CliError;

/// Parameters a transform column may take. Anything left unset falls back to
/// the global flags and then to the transform's own default.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Params {
    pub beta: Option<f64>,
    pub gamma: Option<f64>,
    pub alpha: Option<f64>,
    pub zeta: Option<f64>,
    pub ell: Option<usize>,
    pub omega: Option<String>,
    pub points: Option<String>,
}

impl Params {
    /// Fill every unset field from `defaults`.
    pub fn or(&self, defaults: &Params) -> Params {
        Params {
            beta: self.beta.or(defaults.beta),
            gamma: self.gamma.or(defaults.gamma),
            alpha: self.alpha.or(defaults.alpha),
            zeta: self.zeta.or(defaults.zeta),
            ell: self.ell.or(defaults.ell),
            omega: self.omega.clone().or_else(|| defaults.omega.clone()),
            points: self.points.clone().or_else(|| defaults.points.clone()),
        }
    }

    fn set(&mut self, key: &str, value: &str) -> Result<(), CliError> {
        let num = |v: &str| {
            v.parse::<f64>()
                .ok()
                .filter(|x| x.is_finite())
                .ok_or_else(|| CliError::Usage(format!("parameter '{key}' expects a number, got '{v}'")))
        };
        match key {
            "beta" => self.beta = Some(num(value)?),
            "gamma" => self.gamma = Some(num(value)?),
            "alpha" => self.alpha = Some(num(value)?),
            "zeta" => self.zeta = Some(num(value)?),
            "ell" => {
                self.ell = Some(
                    value.parse().map_err(|_| CliError::Usage(format!("parameter 'ell' expects a non-negative integer, got '{value}'")))?,
                )
            }
            "omega" | "omega-rule" => self.omega = Some(value.to_string()),
            "points" => self.points = Some(value.to_string()),
            _ => return Err(CliError::Usage(format!("unknown transform parameter '{key}'"))),
        }
        Ok(())
    }
}

/// One column: a transform id plus its own parameters, e.g. `levin:beta=1,omega=t`.
#[derive(Debug, Clone, PartialEq)]
pub struct TransformSpec {
    pub id: String,
    pub params: Params,
    /// The text the column was requested with; used as its label.
    pub label: String,
}

impl FromStr for TransformSpec {
    type Err = CliError;

    fn from_str(text: &str) -> Result<Self, CliError> {
        let (id, rest) = match text.split_once(':') {
            Some((id, rest)) => (id, Some(rest)),
            None => (text, None),
        };
        if id.is_empty() {
            return Err(CliError::Usage("empty transform id".into()));
        }
        let mut params = Params::default();
        for pair in rest.into_iter().flat_map(|r| r.split(',')).filter(|p| !p.is_empty()) {
            let (k, v) = pair
                .split_once('=')
                .ok_or_else(|| CliError::Usage(format!("transform parameter '{pair}' is not key=value")))?;
            params.set(k.trim(), v.trim())?;
        }
        Ok(TransformSpec { id: id.to_ascii_lowercase(), params, label: text.to_string() })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Precision {
    Binary64,
    Binary128,
}

impl FromStr for Precision {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, CliError> {
        match s {
            "binary64" | "double" | "f64" => Ok(Precision::Binary64),
            "binary128" | "quad" | "f128" => Ok(Precision::Binary128),
            _ => Err(CliError::Usage(format!("unknown precision '{s}' (binary64 or binary128)"))),
        }
    }
}

impl fmt::Display for Precision {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Precision::Binary64 => "binary64",
            Precision::Binary128 => "binary128",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Table,
    Json,
}

/// Where the input values come from.
#[derive(Debug, Clone, PartialEq)]
pub enum Source {
    Catalog(SeriesSpec),
    /// Values read from a file or stdin; `sums` marks them as partial sums
    /// rather than terms.
    External { label: String, values: Vec<f64>, sums: bool },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub expected: f64,
    pub digits: u32,
}

impl FromStr for Check {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, CliError> {
        let bad = || CliError::Usage(format!("--check expects VALUE:DIGITS, got '{s}'"));
        let (v, d) = s.rsplit_once(':').ok_or_else(bad)?;
        let expected: f64 = v.trim().parse().map_err(|_| bad())?;
        let digits: u32 = d.trim().parse().map_err(|_| bad())?;
        if !expected.is_finite() || digits == 0 {
            return Err(bad());
        }
        Ok(Check { expected, digits })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub source: Source,
    pub transforms: Vec<TransformSpec>,
    /// Last row index; rows run 0..=max_n.
    pub max_n: usize,
    pub precision: Precision,
    pub format: OutputFormat,
    pub check: Option<Check>,
}

/// Parse the plain-text input format: one real per line; blank lines and
/// lines starting with `#` are skipped.
pub fn parse_values(text: &str) -> Result<Vec<f64>, CliError> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let v: f64 = line.parse().map_err(|_| CliError::Input(format!("line {}: '{line}' is not a number", i + 1)))?;
        if !v.is_finite() {
            return Err(CliError::Input(format!("line {}: value is not finite", i + 1)));
        }
        out.push(v);
    }
    if out.is_empty() {
        return Err(CliError::Input("input contains no values".into()));
    }
    Ok(out)
}

/// Parse `name` or `name(param)` or `name:param` into a catalog series.
pub fn parse_series(text: &str) -> Result<SeriesSpec, CliError> {
    let text = text.trim();
    let (name, param) = if let Some(open) = text.find('(') {
        let inner = text[open + 1..]
            .strip_suffix(')')
            .ok_or_else(|| CliError::Usage(format!("malformed series '{text}'")))?;
        (&text[..open], Some(inner))
    } else if let Some((n, p)) = text.split_once(':') {
        (n, Some(p))
    } else {
        (text, None)
    };
    let param = match param {
        Some(p) => Some(parse_number(p).ok_or_else(|| CliError::Usage(format!("series parameter '{p}' is not a number")))?),
        None => None,
    };
    SeriesSpec::from_name(name, param).map_err(|e| CliError::Usage(e.to_string()))
}

// accepts plain reals and simple fractions such as 4/5
fn parse_number(s: &str) -> Option<f64> {
    let s = s.trim();
    if let Some((a, b)) = s.split_once('/') {
        let (a, b): (f64, f64) = (a.trim().parse().ok()?, b.trim().parse().ok()?);
        return (b != 0.0).then(|| a / b);
    }
    s.parse().ok()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn transform_spec_with_params() {
        let t: TransformSpec = "Levin:beta=2, omega=t,ell=1".parse().unwrap();
        assert_eq!(t.id, "levin");
        assert_eq!(t.params.beta, Some(2.0));
        assert_eq!(t.params.omega.as_deref(), Some("t"));
        assert_eq!(t.params.ell, Some(1));
        assert!("levin:beta".parse::<TransformSpec>().is_err());
        assert!("levin:delta=1".parse::<TransformSpec>().is_err());
        assert!("levin:beta=x".parse::<TransformSpec>().is_err());
    }

    #[test]
    fn params_fallback() {
        let own = Params { beta: Some(2.0), ..Default::default() };
        let global = Params { beta: Some(1.0), gamma: Some(5.0), ..Default::default() };
        let p = own.or(&global);
        assert_eq!((p.beta, p.gamma), (Some(2.0), Some(5.0)));
    }

    #[test]
    fn series_forms() {
        assert_eq!(parse_series("zeta(2)").unwrap(), SeriesSpec::Zeta { z: 2.0 });
        assert_eq!(parse_series("bessel:4/5").unwrap(), SeriesSpec::BesselExpansion { z: 0.8 });
        assert_eq!(parse_series("lemniscate").unwrap(), SeriesSpec::Lemniscate);
        assert!(parse_series("zeta").is_err());
        assert!(parse_series("nope(1)").is_err());
        assert!(parse_series("bessel(-1)").is_err());
    }

    #[test]
    fn check_forms() {
        assert_eq!("1.25:10".parse::<Check>().unwrap(), Check { expected: 1.25, digits: 10 });
        assert_eq!("-3e-2:4".parse::<Check>().unwrap(), Check { expected: -0.03, digits: 4 });
        assert!("1.25".parse::<Check>().is_err());
        assert!("1.25:0".parse::<Check>().is_err());
    }

    #[test]
    fn value_file() {
        assert_eq!(parse_values("# s\n0\n1\n\n1.5\n").unwrap(), vec![0.0, 1.0, 1.5]);
        assert!(matches!(parse_values("1\nx\n"), Err(CliError::Input(_))));
        assert!(matches!(parse_values("\n"), Err(CliError::Input(_))));
    }
}
