//! Test series and model sequences with known (anti)limits.

use std::fmt;

use crate::kernel::{partial_sums, pochhammer, Compensated, Error, Real, SequencePoint};

/// A named series given by its terms a_0, a_1, ...
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SeriesSpec {
    /// Σ z^m.
    Geometric { z: f64 },
    /// Σ (m+1)^(-z).
    Zeta { z: f64 },
    /// Σ (-1)^m m! z^(-m), divergent for every z; Euler's series in 1/z.
    Euler2F0 { z: f64 },
    /// Σ (-1)^m z^(m+1)/(m+1) = ln(1+z).
    LogStieltjes { z: f64 },
    /// Σ [(2m-1)!!/(2m)!!]/(4m+1), the lemniscate constant.
    Lemniscate,
    /// Expansion of 1/z in reduced Bessel functions, Σ k̂_{m-1/2}(z)/(2^m m!).
    BesselExpansion { z: f64 },
    /// Σ (2m-1)!!/(2m+2)!! = 1.
    HalfFactorial,
    /// 0 + 1 + ρ + ρ² + ..., so that s_n = (1-ρ^n)/(1-ρ).
    SigmaRho { rho: f64 },
}

impl fmt::Display for SeriesSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SeriesSpec::Geometric { z } => write!(f, "geometric({z})"),
            SeriesSpec::Zeta { z } => write!(f, "zeta({z})"),
            SeriesSpec::Euler2F0 { z } => write!(f, "euler_2f0({z})"),
            SeriesSpec::LogStieltjes { z } => write!(f, "log_stieltjes({z})"),
            SeriesSpec::Lemniscate => write!(f, "lemniscate"),
            SeriesSpec::BesselExpansion { z } => write!(f, "bessel_expansion({z})"),
            SeriesSpec::HalfFactorial => write!(f, "half_factorial"),
            SeriesSpec::SigmaRho { rho } => write!(f, "sigma_rho({rho})"),
        }
    }
}

impl SeriesSpec {
    pub const NAMES: [&'static str; 8] = [
        "geometric",
        "zeta",
        "euler_2f0",
        "log_stieltjes",
        "lemniscate",
        "bessel_expansion",
        "half_factorial",
        "sigma_rho",
    ];

    /// Builds a spec from a catalog name and its parameter (if any).
    pub fn from_name(name: &str, param: Option<f64>) -> Result<Self, Error> {
        let need = |p: Option<f64>| {
            p.ok_or_else(|| Error::InvalidParameter(format!("series '{name}' needs a parameter")))
        };
        let spec = match name {
            "geometric" => SeriesSpec::Geometric { z: need(param)? },
            "zeta" => SeriesSpec::Zeta { z: need(param)? },
            "euler_2f0" | "euler" => SeriesSpec::Euler2F0 { z: need(param)? },
            "log_stieltjes" | "log" => SeriesSpec::LogStieltjes { z: need(param)? },
            "lemniscate" => SeriesSpec::Lemniscate,
            "bessel_expansion" | "bessel" => SeriesSpec::BesselExpansion { z: need(param)? },
            "half_factorial" => SeriesSpec::HalfFactorial,
            "sigma_rho" => SeriesSpec::SigmaRho { rho: need(param)? },
            _ => return Err(Error::InvalidParameter(format!("unknown series '{name}'"))),
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn name(&self) -> &'static str {
        match self {
            SeriesSpec::Geometric { .. } => "geometric",
            SeriesSpec::Zeta { .. } => "zeta",
            SeriesSpec::Euler2F0 { .. } => "euler_2f0",
            SeriesSpec::LogStieltjes { .. } => "log_stieltjes",
            SeriesSpec::Lemniscate => "lemniscate",
            SeriesSpec::BesselExpansion { .. } => "bessel_expansion",
            SeriesSpec::HalfFactorial => "half_factorial",
            SeriesSpec::SigmaRho { .. } => "sigma_rho",
        }
    }

    pub fn validate(&self) -> Result<(), Error> {
        let bad = |msg: &str| Err(Error::InvalidParameter(format!("{self}: {msg}")));
        match *self {
            SeriesSpec::Geometric { z } if !z.is_finite() => bad("z must be finite"),
            SeriesSpec::Zeta { z } if !(z > 0.0 && z.is_finite()) => bad("z must be positive"),
            SeriesSpec::Euler2F0 { z } if !(z != 0.0 && z.is_finite()) => bad("z must be nonzero"),
            SeriesSpec::LogStieltjes { z } if !(z != 0.0 && z.is_finite()) => bad("z must be nonzero"),
            SeriesSpec::BesselExpansion { z } if !(z > 0.0 && z.is_finite()) => bad("z must be positive"),
            SeriesSpec::SigmaRho { rho } if !(rho.is_finite() && rho != 1.0) => bad("rho must differ from 1"),
            _ => Ok(()),
        }
    }

    /// The series' μ_m moments when it is a Stieltjes series in the variable
    /// used by the remainder rule `stieltjes`.
    pub fn stieltjes_moments(&self) -> Option<(Moments, f64)> {
        match *self {
            SeriesSpec::Euler2F0 { z } => Some((Moments::Factorial, 1.0 / z)),
            SeriesSpec::LogStieltjes { z } => Some((Moments::Reciprocal, z)),
            _ => None,
        }
    }
}

/// Moment sequences μ_m of the two Stieltjes series in the catalog.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Moments {
    /// μ_m = m!
    Factorial,
    /// μ_m = 1/(m+1)
    Reciprocal,
}

impl Moments {
    pub fn moment<R: Real>(self, m: usize) -> R {
        match self {
            Moments::Factorial => pochhammer(R::one(), m),
            Moments::Reciprocal => R::one() / R::of(m + 1),
        }
    }
}

/// First `count` terms a_0, ..., a_{count-1}.
pub fn terms<R: Real>(spec: &SeriesSpec, count: usize) -> Result<Vec<R>, Error> {
    spec.validate()?;
    let mut out = Vec::with_capacity(count);
    match *spec {
        SeriesSpec::Geometric { z } => {
            let z = R::lit(z);
            let mut t = R::one();
            for _ in 0..count {
                out.push(t);
                t = t * z;
            }
        }
        SeriesSpec::Zeta { z } => {
            let z = R::lit(z);
            out.extend((0..count).map(|m| R::of(m + 1).powf(-z)));
        }
        SeriesSpec::Euler2F0 { z } => {
            let z = R::lit(z);
            let mut t = R::one();
            for m in 0..count {
                out.push(t);
                t = -t * R::of(m + 1) / z;
            }
        }
        SeriesSpec::LogStieltjes { z } => {
            let z = R::lit(z);
            let mut p = z;
            for m in 0..count {
                out.push(p / R::of(m + 1));
                p = -p * z;
            }
        }
        SeriesSpec::Lemniscate => {
            let mut c = R::one();
            for m in 0..count {
                out.push(c / R::of(4 * m + 1));
                c = c * R::of(2 * m + 1) / R::of(2 * m + 2);
            }
        }
        SeriesSpec::HalfFactorial => {
            let mut t = R::lit(0.5);
            for m in 0..count {
                out.push(t);
                t = t * (R::of(m) + R::lit(0.5)) / R::of(m + 2);
            }
        }
        SeriesSpec::SigmaRho { rho } => {
            let rho = R::lit(rho);
            let mut t = R::one();
            for m in 0..count {
                if m == 0 {
                    out.push(R::zero());
                } else {
                    out.push(t);
                    t = t * rho;
                }
            }
        }
        SeriesSpec::BesselExpansion { z } => {
            let zr = R::lit(z);
            let ez = (-zr).exp();
            // h tracks (1/2)_{m-1}/m!
            let mut h = R::one();
            for m in 0..count {
                if m == 0 {
                    out.push(ez / zr);
                    continue;
                }
                let n = m - 1;
                out.push(ez * h * hyp_1f1_bessel(n, zr) / R::lit(2.0));
                h = h * (R::of(n) + R::lit(0.5)) / R::of(m + 1);
            }
        }
    }
    Ok(out)
}

/// ₁F₁(-n; -2n; 2z) as its terminating sum.
fn hyp_1f1_bessel<R: Real>(n: usize, z: R) -> R {
    let two_z = z + z;
    let mut t = R::one();
    let mut sum = R::one();
    for j in 0..n {
        t = t * R::of(n - j) * two_z / (R::of(2 * n - j) * R::of(j + 1));
        sum = sum + t;
    }
    sum
}

/// Partial sums s_0, ..., s_{count-1}.
pub fn sums<R: Real>(spec: &SeriesSpec, count: usize) -> Result<Vec<R>, Error> {
    match spec {
        SeriesSpec::Lemniscate => Ok(lemniscate_sums(count)),
        _ => Ok(partial_sums(&terms::<R>(spec, count)?)),
    }
}

// The coefficient (1/2)_m/m! picks up one rounding per factor, and the ρ-type
// transforms turn a single ulp in s_n into a lost digit. Carrying the
// coefficient and each term as an unevaluated hi+lo pair keeps the sums
// correctly rounded in practice.
fn lemniscate_sums<R: Real>(count: usize) -> Vec<R> {
    let (mut hi, mut lo) = (R::one(), R::zero());
    let mut total = Compensated::new();
    let mut out = Vec::with_capacity(count);
    for m in 0..count {
        let (th, tl) = dd_div(hi, lo, R::of(4 * m + 1));
        total.add(th);
        out.push(total.add(tl));
        let (ph, pl) = dd_mul(hi, lo, R::of(2 * m + 1));
        (hi, lo) = dd_div(ph, pl, R::of(2 * m + 2));
    }
    out
}

fn two_sum<R: Real>(a: R, b: R) -> (R, R) {
    let s = a + b;
    let v = s - a;
    (s, (a - (s - v)) + (b - v))
}

// (hi + lo)·c for an exactly representable c
fn dd_mul<R: Real>(hi: R, lo: R, c: R) -> (R, R) {
    let p = hi * c;
    let e = hi.mul_add(c, -p);
    two_sum(p, e + lo * c)
}

// (hi + lo)/d for an exactly representable d
fn dd_div<R: Real>(hi: R, lo: R, d: R) -> (R, R) {
    let q = hi / d;
    let r = (-q).mul_add(d, hi);
    two_sum(q, (r + lo) / d)
}

/// Reduced Bessel function k̂_{n+1/2}(z) = 2^n (1/2)_n e^(-z) ₁F₁(-n; -2n; 2z).
pub fn reduced_bessel<R: Real>(n: usize, z: R) -> Result<R, Error> {
    if !(z > R::zero()) {
        return Err(Error::InvalidParameter(format!("reduced Bessel function needs z > 0, got {z}")));
    }
    let scale = R::lit(2.0).powi(n as i32) * pochhammer(R::lit(0.5), n);
    Ok(scale * (-z).exp() * hyp_1f1_bessel(n, z))
}

/// (2n-1)!!/(2n)!! computed as (1/2)_n/n! so it never overflows.
pub fn double_factorial_ratio<R: Real>(n: usize) -> R {
    (0..n).fold(R::one(), |acc, j| acc * (R::of(j) + R::lit(0.5)) / R::of(j + 1))
}

/// Where a reference value comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Provenance {
    /// Evaluated from a closed-form expression.
    ClosedForm(&'static str),
    /// A published high-accuracy value for this parameter.
    Tabulated(&'static str),
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Provenance::ClosedForm(s) => write!(f, "closed form: {s}"),
            Provenance::Tabulated(s) => write!(f, "tabulated: {s}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Reference<R> {
    pub value: R,
    pub provenance: Provenance,
}

pub const LEMNISCATE_CONSTANT: f64 = 1.3110287771460598;

// The quadruple-precision digits of the two Euler-series limits are only
// known to 14 places, so these are the best available values.
const EULER_Z3: f64 = 0.78625122076594;
const EULER_Z_HALF: f64 = 0.46145531624187;

/// The limit (or antilimit) of a catalog series.
pub fn reference<R: Real>(spec: &SeriesSpec) -> Result<Reference<R>, Error> {
    let closed = |value: R, s| Ok(Reference { value, provenance: Provenance::ClosedForm(s) });
    let none = || Err(Error::NoResult(format!("no reference value known for {spec}")));
    match *spec {
        SeriesSpec::Geometric { z } => closed(R::one() / (R::one() - R::lit(z)), "1/(1-z)"),
        SeriesSpec::Zeta { z } if z == 2.0 => closed(R::PI() * R::PI() / R::lit(6.0), "pi^2/6"),
        SeriesSpec::Zeta { z } if z == 4.0 => closed(R::PI().powi(4) / R::lit(90.0), "pi^4/90"),
        SeriesSpec::Zeta { .. } => none(),
        SeriesSpec::Euler2F0 { z } if z == 3.0 => Ok(Reference {
            value: R::lit(EULER_Z3),
            provenance: Provenance::Tabulated("z e^z E1(z) at z = 3"),
        }),
        SeriesSpec::Euler2F0 { z } if z == 0.5 => Ok(Reference {
            value: R::lit(EULER_Z_HALF),
            provenance: Provenance::Tabulated("z e^z E1(z) at z = 1/2"),
        }),
        SeriesSpec::Euler2F0 { .. } => none(),
        SeriesSpec::LogStieltjes { z } => closed((R::one() + R::lit(z)).ln(), "ln(1+z)"),
        SeriesSpec::Lemniscate => closed(lemniscate_constant(), "Gamma(1/4)^2/(4 sqrt(2 pi))"),
        SeriesSpec::BesselExpansion { z } => closed(R::one() / R::lit(z), "1/z"),
        SeriesSpec::HalfFactorial => closed(R::one(), "1"),
        SeriesSpec::SigmaRho { rho } => closed(R::one() / (R::one() - R::lit(rho)), "1/(1-rho)"),
    }
}

// Γ(1/4)^2 / (4 sqrt(2π)) to 32 digits, split into a double-double pair.
fn lemniscate_constant<R: Real>() -> R {
    R::lit(LEMNISCATE_CONSTANT) + R::lit(9.58215479734899e-17)
}

/// Generator for an auxiliary sequence g_n used by model sequences.
#[derive(Debug, Clone, PartialEq)]
pub enum Generator {
    /// c (-1)^n
    Alternating(f64),
    /// q^n
    Power(f64),
    /// 1/(n+β)
    ReciprocalShift(f64),
    /// n+β
    Shift(f64),
    Explicit(Vec<f64>),
}

impl Generator {
    pub fn at<R: Real>(&self, n: usize) -> Result<R, Error> {
        Ok(match self {
            Generator::Alternating(c) => {
                let c = R::lit(*c);
                if n.is_multiple_of(2) {
                    c
                } else {
                    -c
                }
            }
            Generator::Power(q) => R::lit(*q).powi(n as i32),
            Generator::ReciprocalShift(b) => R::one() / (R::of(n) + R::lit(*b)),
            Generator::Shift(b) => R::of(n) + R::lit(*b),
            Generator::Explicit(v) => R::lit(*v.get(n).ok_or(Error::TooShort { need: n + 1, got: v.len() })?),
        })
    }
}

/// Sequences built to be reproduced exactly by a particular transformation.
#[derive(Debug, Clone, PartialEq)]
pub enum ModelSequenceSpec {
    /// s + Σ c_j λ_j^n
    ExpSum { s: f64, coeffs: Vec<f64>, lambdas: Vec<f64> },
    /// s + a x^n + b y^n
    TwoGeometric { s: f64, a: f64, x: f64, b: f64, y: f64 },
    /// (s x^k + a_1 x^(k-1) + ... + a_k) / (x^k + b_1 x^(k-1) + ... + b_k)
    RationalInX { s: f64, a: Vec<f64>, b: Vec<f64>, x: Generator },
    /// s + Σ c_j x^(j+1)
    PolyInX { s: f64, coeffs: Vec<f64>, x: Generator },
    /// s + (β+n)^ℓ ω Σ c_j/(β+n)^j
    LevinModel { s: f64, beta: f64, ell: usize, coeffs: Vec<f64>, omega: Generator },
    /// s + (β+n)_ℓ ω Σ c_j/(β+n)_j
    SModel { s: f64, beta: f64, ell: usize, coeffs: Vec<f64>, omega: Generator },
    /// s + (-γ-n)_ℓ ω Σ c_j/(-γ-n)_j
    MModel { s: f64, gamma: f64, ell: usize, coeffs: Vec<f64>, omega: Generator },
    /// s + ω Σ c_j x^j
    SidiModel { s: f64, coeffs: Vec<f64>, x: Generator, omega: Generator },
    /// s + ω Σ c_j n^j
    DrummondModel { s: f64, coeffs: Vec<f64>, omega: Generator },
    /// s + (a)_{n+1}/(b)_{n+1}
    PochhammerRatio { s: f64, a: f64, b: f64 },
}

/// Elements s_0..s_{count-1} of a model sequence, with x and ω attached
/// when the model defines them.
pub fn model_sequence<R: Real>(spec: &ModelSequenceSpec, count: usize) -> Result<Vec<SequencePoint<R>>, Error> {
    use ModelSequenceSpec as M;
    let poly = |coeffs: &[f64], t: R| coeffs.iter().rev().fold(R::zero(), |acc, &c| acc * t + R::lit(c));
    let mut out = Vec::with_capacity(count);
    for n in 0..count {
        let nr = R::of(n);
        let p = match spec {
            M::ExpSum { s, coeffs, lambdas } => {
                if coeffs.len() != lambdas.len() {
                    return Err(Error::InvalidParameter("exp_sum needs one λ per coefficient".into()));
                }
                let tail = coeffs
                    .iter()
                    .zip(lambdas)
                    .fold(R::zero(), |acc, (&c, &l)| acc + R::lit(c) * R::lit(l).powi(n as i32));
                SequencePoint::new(n, R::lit(*s) + tail)
            }
            M::TwoGeometric { s, a, x, b, y } => {
                let v = R::lit(*s) + R::lit(*a) * R::lit(*x).powi(n as i32) + R::lit(*b) * R::lit(*y).powi(n as i32);
                SequencePoint::new(n, v)
            }
            M::RationalInX { s, a, b, x } => {
                if a.len() != b.len() {
                    return Err(Error::InvalidParameter("rational_in_x needs equal numerator and denominator degree".into()));
                }
                let xv: R = x.at(n)?;
                let mut num = R::lit(*s);
                let mut den = R::one();
                for (&ai, &bi) in a.iter().zip(b) {
                    num = num * xv + R::lit(ai);
                    den = den * xv + R::lit(bi);
                }
                SequencePoint::new(n, num / den).with_x(xv)
            }
            M::PolyInX { s, coeffs, x } => {
                let xv: R = x.at(n)?;
                SequencePoint::new(n, R::lit(*s) + xv * poly(coeffs, xv)).with_x(xv)
            }
            M::LevinModel { s, beta, ell, coeffs, omega } => {
                let w: R = omega.at(n)?;
                let b = R::lit(*beta) + nr;
                let tail = coeffs
                    .iter()
                    .enumerate()
                    .fold(R::zero(), |acc, (j, &c)| acc + R::lit(c) / b.powi(j as i32));
                SequencePoint::new(n, R::lit(*s) + b.powi(*ell as i32) * w * tail).with_omega(w)
            }
            M::SModel { s, beta, ell, coeffs, omega } => {
                let w: R = omega.at(n)?;
                let b = R::lit(*beta) + nr;
                let tail = coeffs
                    .iter()
                    .enumerate()
                    .fold(R::zero(), |acc, (j, &c)| acc + R::lit(c) / pochhammer(b, j));
                SequencePoint::new(n, R::lit(*s) + pochhammer(b, *ell) * w * tail).with_omega(w)
            }
            M::MModel { s, gamma, ell, coeffs, omega } => {
                let w: R = omega.at(n)?;
                let g = -R::lit(*gamma) - nr;
                let tail = coeffs
                    .iter()
                    .enumerate()
                    .fold(R::zero(), |acc, (j, &c)| acc + R::lit(c) / pochhammer(g, j));
                SequencePoint::new(n, R::lit(*s) + pochhammer(g, *ell) * w * tail).with_omega(w)
            }
            M::SidiModel { s, coeffs, x, omega } => {
                let xv: R = x.at(n)?;
                let w: R = omega.at(n)?;
                SequencePoint::new(n, R::lit(*s) + w * poly(coeffs, xv)).with_x(xv).with_omega(w)
            }
            M::DrummondModel { s, coeffs, omega } => {
                let w: R = omega.at(n)?;
                SequencePoint::new(n, R::lit(*s) + w * poly(coeffs, nr)).with_omega(w)
            }
            M::PochhammerRatio { s, a, b } => {
                let v = pochhammer(R::lit(*a), n + 1) / pochhammer(R::lit(*b), n + 1);
                SequencePoint::new(n, R::lit(*s) + v)
            }
        };
        out.push(p);
    }
    Ok(out)
}
