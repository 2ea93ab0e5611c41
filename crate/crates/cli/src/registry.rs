use seqaccel::epsilon_aitken::{AitkenState, EpsilonState};
use seqaccel::interpolation::{DividedDiffState, NevilleState, PointAnnotator, PointFamily, RhoState, WState};
use seqaccel::kernel::{Accelerator, Bare, Both, Pipeline};
use seqaccel::levin_like::{LinearSpecial, LinearState, RatioFamily, RatioState, RemainderEstimator, RemainderRule};
use seqaccel::series_lab::SeriesSpec;
use seqaccel::theta_like::{IterScheme, IterWeightedState, ThetaKind, ThetaState};
use seqaccel::Real;

use crate::config::{Params, TransformSpec};
use crate::CliError;

/// Transform ids understood by `--transform`, with a one-line description.
pub const TRANSFORMS: &[(&str, &str)] = &[
    ("epsilon", "Wynn epsilon"),
    ("aitken", "iterated Aitken delta-squared"),
    ("aitken_unit", "iterated Aitken, second form"),
    ("richardson", "Richardson extrapolation (Neville); points, default reciprocal"),
    ("sidi", "Sidi generalized Richardson; points and omega"),
    ("rho", "Wynn rho; points, default linear"),
    ("w", "iterated rho_2; points, default linear"),
    ("levin", "Levin L; beta, omega (default u), ell"),
    ("s", "Weniger S; beta, omega (default u), ell"),
    ("m", "M transformation; gamma, omega (default um), ell"),
    ("drummond", "Drummond D; omega (default d), ell"),
    ("big_lambda", "Levin-type Lambda; beta"),
    ("f", "F transformation; alpha"),
    ("p", "P transformation; zeta"),
    ("theta", "Brezinski theta"),
    ("theta_modified", "theta with plain reciprocal odd columns"),
    ("big_theta", "generalized theta on points; points, default linear"),
    ("j", "iterated theta_2"),
    ("b", "iterated B"),
    ("c", "iterated C"),
    ("lambda", "iterated lambda; beta"),
    ("sigma", "iterated sigma; alpha"),
    ("mu", "iterated mu; zeta"),
];

const ALIASES: &[(&str, &str)] = &[
    ("eps", "epsilon"),
    ("neville", "richardson"),
    ("w_standard", "w"),
    ("rho_standard", "rho"),
    ("l", "levin"),
    ("weniger", "s"),
    ("d", "drummond"),
    ("lubkin", "j"),
];

pub fn canonical_id(id: &str) -> Option<&'static str> {
    let id = ALIASES.iter().find(|(a, _)| *a == id).map_or(id, |(_, c)| *c);
    TRANSFORMS.iter().find(|(t, _)| *t == id).map(|(t, _)| *t)
}

/// Build a streaming accelerator for one column.
pub fn build<R: Real>(
    spec: &TransformSpec,
    globals: &Params,
    series: Option<&SeriesSpec>,
) -> Result<Box<dyn Accelerator<R>>, CliError> {
    let id = canonical_id(&spec.id).ok_or_else(|| {
        let known: Vec<&str> = TRANSFORMS.iter().map(|(t, _)| *t).collect();
        CliError::Usage(format!("unknown transform '{}' (known: {})", spec.id, known.join(", ")))
    })?;
    let p = spec.params.or(globals);
    let beta = p.beta.unwrap_or(1.0);
    let core = |e: seqaccel::Error| CliError::Usage(format!("{}: {e}", spec.label));
    let need = |v: Option<f64>, name: &str| v.ok_or_else(|| CliError::Usage(format!("{}: transform '{id}' needs {name}", spec.label)));
    let ratio = |family: RatioFamily, default_rule: &str| -> Result<Box<dyn Accelerator<R>>, CliError> {
        let rule = omega_rule(p.omega.as_deref().unwrap_or(default_rule), &p, series, &spec.label)?;
        let state = match p.ell {
            Some(ell) => RatioState::generalized(family, ell),
            None => RatioState::new(family),
        }
        .map_err(core)?;
        Ok(Box::new(Pipeline::new(RemainderEstimator::new(rule), state)))
    };
    let points = |default: &str| points_family(p.points.as_deref().unwrap_or(default), &p, &spec.label);
    let iter = |scheme: IterScheme| -> Result<Box<dyn Accelerator<R>>, CliError> {
        Ok(Box::new(Pipeline::new(Bare, IterWeightedState::new(scheme).map_err(core)?)))
    };
    let linear = |kind: LinearSpecial| -> Result<Box<dyn Accelerator<R>>, CliError> {
        Ok(Box::new(Pipeline::new(Bare, LinearState::new(kind).map_err(core)?)))
    };
    let annotate = |family: PointFamily| PointAnnotator::<R>::new(family).map_err(core);

    Ok(match id {
        "epsilon" => Box::new(Pipeline::new(Bare, EpsilonState::new())),
        "aitken" => Box::new(Pipeline::new(Bare, AitkenState::new())),
        "aitken_unit" => iter(IterScheme::Unit)?,
        "richardson" => Box::new(Pipeline::new(annotate(points("reciprocal")?)?, NevilleState::new())),
        "sidi" => {
            let rule = omega_rule(p.omega.as_deref().unwrap_or("u"), &p, series, &spec.label)?;
            let both = Both::new(annotate(points("reciprocal")?)?, RemainderEstimator::new(rule));
            Box::new(Pipeline::new(both, DividedDiffState::new()))
        }
        "rho" => Box::new(Pipeline::new(annotate(points("linear")?)?, RhoState::new())),
        "w" => Box::new(Pipeline::new(annotate(points("linear")?)?, WState::new())),
        "levin" => ratio(RatioFamily::L { beta }, "u")?,
        "s" => ratio(RatioFamily::S { beta }, "u")?,
        "m" => ratio(RatioFamily::M { gamma: need(p.gamma, "gamma")? }, "um")?,
        "drummond" => ratio(RatioFamily::D, "d")?,
        "big_lambda" => linear(LinearSpecial::Lambda { beta })?,
        "f" => linear(LinearSpecial::F { alpha: p.alpha.unwrap_or(1.0) })?,
        "p" => linear(LinearSpecial::P { zeta: need(p.zeta, "zeta")? })?,
        "theta" => Box::new(Pipeline::new(Bare, ThetaState::new(ThetaKind::Theta))),
        "theta_modified" => Box::new(Pipeline::new(Bare, ThetaState::new(ThetaKind::Modified))),
        "big_theta" => Box::new(Pipeline::new(annotate(points("linear")?)?, ThetaState::new(ThetaKind::Big))),
        "j" => iter(IterScheme::J)?,
        "b" => iter(IterScheme::B)?,
        "c" => iter(IterScheme::C)?,
        "lambda" => iter(IterScheme::Lambda { beta })?,
        "sigma" => iter(IterScheme::Sigma { alpha: p.alpha.unwrap_or(1.0) })?,
        "mu" => iter(IterScheme::Mu { zeta: need(p.zeta, "zeta")? })?,
        _ => unreachable!("every id in TRANSFORMS is handled"),
    })
}

fn omega_rule(name: &str, p: &Params, series: Option<&SeriesSpec>, label: &str) -> Result<RemainderRule, CliError> {
    Ok(match name {
        "u" => RemainderRule::U { beta: p.beta.unwrap_or(1.0) },
        "um" | "u_m" => RemainderRule::UM {
            gamma: p.gamma.ok_or_else(|| CliError::Usage(format!("{label}: omega rule 'um' needs gamma")))?,
        },
        "t" => RemainderRule::T,
        "d" => RemainderRule::D,
        "v" => RemainderRule::V,
        "stieltjes" => {
            let (moments, z) = series.and_then(|s| s.stieltjes_moments()).ok_or_else(|| {
                CliError::Usage(format!("{label}: omega rule 'stieltjes' needs a catalog Stieltjes series (euler_2f0 or log_stieltjes)"))
            })?;
            RemainderRule::Stieltjes { z, moments }
        }
        _ => return Err(CliError::Usage(format!("{label}: unknown omega rule '{name}' (u, um, t, d, v, stieltjes)"))),
    })
}

fn points_family(name: &str, p: &Params, label: &str) -> Result<PointFamily, CliError> {
    let beta = p.beta.unwrap_or(1.0);
    let alpha = || p.alpha.ok_or_else(|| CliError::Usage(format!("{label}: points '{name}' need alpha")));
    Ok(match name {
        "reciprocal" => PointFamily::Reciprocal { beta },
        "reciprocal_power" => PointFamily::ReciprocalPower { beta, alpha: alpha()? },
        "linear" => PointFamily::Linear { beta },
        "power" => PointFamily::Power { beta, alpha: alpha()? },
        "gbw" => PointFamily::Gbw,
        "levin_like" => PointFamily::LevinLike { beta },
        "reciprocal_levin_like" => PointFamily::ReciprocalLevinLike { beta },
        _ => {
            return Err(CliError::Usage(format!(
                "{label}: unknown points '{name}' (reciprocal, reciprocal_power, linear, power, gbw, levin_like, reciprocal_levin_like)"
            )))
        }
    })
}
