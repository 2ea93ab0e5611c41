//! Extrapolation by interpolation: Richardson (Neville scheme), Sidi's
//! generalized Richardson process, Wynn's rho and the iterated rho_2
//! transform, plus the families of interpolation points they use.

use crate::kernel::{
    check_index, guard_divide, Annotate, Error, Estimate, Extend, Real, SafeguardPolicy, SequencePoint, TermTracker,
};
use crate::series_lab::{sums, SeriesSpec};

/// How interpolation points x_n are generated from n and the input stream.
#[derive(Debug, Clone, PartialEq)]
pub enum PointFamily {
    /// 1/(β+n)
    Reciprocal { beta: f64 },
    /// (β+n)^(-α)
    ReciprocalPower { beta: f64, alpha: f64 },
    /// β+n
    Linear { beta: f64 },
    /// (β+n)^α
    Power { beta: f64, alpha: f64 },
    /// Δs_n; needs s_{n+1}, so points lag the input by one.
    Gbw,
    /// (β+n) a_n with a_0 = s_0, a_n = Δs_{n-1}
    LevinLike { beta: f64 },
    /// 1/[(β+n) a_n]
    ReciprocalLevinLike { beta: f64 },
    Explicit(Vec<f64>),
}

impl PointFamily {
    pub fn validate(&self) -> Result<(), Error> {
        let positive = |name: &str, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(Error::InvalidParameter(format!("{name} must be positive, got {v}")))
            }
        };
        match *self {
            PointFamily::Reciprocal { beta }
            | PointFamily::Linear { beta }
            | PointFamily::LevinLike { beta }
            | PointFamily::ReciprocalLevinLike { beta } => positive("beta", beta),
            PointFamily::ReciprocalPower { beta, alpha } | PointFamily::Power { beta, alpha } => {
                positive("beta", beta)?;
                positive("alpha", alpha)
            }
            PointFamily::Gbw | PointFamily::Explicit(_) => Ok(()),
        }
    }

    pub fn lag(&self) -> usize {
        match self {
            PointFamily::Gbw => 1,
            _ => 0,
        }
    }

    /// x_n for the families that depend on n only.
    pub fn closed_point<R: Real>(&self, n: usize) -> Option<R> {
        let shifted = |beta: f64| R::lit(beta) + R::of(n);
        match self {
            PointFamily::Reciprocal { beta } => Some(R::one() / shifted(*beta)),
            PointFamily::ReciprocalPower { beta, alpha } => Some(shifted(*beta).powf(-R::lit(*alpha))),
            PointFamily::Linear { beta } => Some(shifted(*beta)),
            PointFamily::Power { beta, alpha } => Some(shifted(*beta).powf(R::lit(*alpha))),
            _ => None,
        }
    }
}

/// Attaches x_n to each partial sum according to a [`PointFamily`].
#[derive(Debug, Clone)]
pub struct PointAnnotator<R> {
    family: PointFamily,
    terms: TermTracker<R>,
    pending: Option<(usize, R)>,
}

impl<R: Real> PointAnnotator<R> {
    pub fn new(family: PointFamily) -> Result<Self, Error> {
        family.validate()?;
        Ok(PointAnnotator { family, terms: TermTracker::default(), pending: None })
    }
}

impl<R: Real> Annotate<R> for PointAnnotator<R> {
    fn annotate(&mut self, n: usize, s: R) -> Result<Option<SequencePoint<R>>, Error> {
        let a = self.terms.next(s);
        let x = match &self.family {
            PointFamily::Gbw => {
                let prev = self.pending.replace((n, s));
                return Ok(prev.map(|(m, sm)| SequencePoint::new(m, sm).with_x(s - sm)));
            }
            PointFamily::LevinLike { beta } => (R::lit(*beta) + R::of(n)) * a,
            PointFamily::ReciprocalLevinLike { beta } => R::one() / ((R::lit(*beta) + R::of(n)) * a),
            PointFamily::Explicit(v) => R::lit(*v.get(n).ok_or(Error::TooShort { need: n + 1, got: v.len() })?),
            family => family.closed_point(n).expect("closed-form family"),
        };
        Ok(Some(SequencePoint::new(n, s).with_x(x)))
    }

    fn lag(&self) -> usize {
        self.family.lag()
    }
}

fn check_distinct<R: Real>(xs: &[R], x: R, n: usize) -> Result<(), Error> {
    if !x.is_finite() || xs.contains(&x) {
        Err(Error::CoincidentPoints { n })
    } else {
        Ok(())
    }
}

fn check_increasing<R: Real>(xs: &[R], x: R, n: usize) -> Result<(), Error> {
    match xs.last() {
        _ if !x.is_finite() => Err(Error::NonMonotone { n }),
        Some(&p) if !(x > p) => Err(Error::NonMonotone { n }),
        _ => Ok(()),
    }
}

/// Neville table for polynomial extrapolation to x = 0: after s_0..s_m,
/// `diag[m-j]` holds 𝒩_j^{(m-j)}.
#[derive(Debug, Clone)]
pub struct NevilleState<R> {
    diag: Vec<R>,
    taint: Vec<bool>,
    xs: Vec<R>,
    policy: SafeguardPolicy<R>,
}

impl<R: Real> Default for NevilleState<R> {
    fn default() -> Self {
        Self::new()
    }
}

impl<R: Real> NevilleState<R> {
    pub fn new() -> Self {
        NevilleState { diag: Vec::new(), taint: Vec::new(), xs: Vec::new(), policy: R::default_policy() }
    }

    pub fn with_policy(mut self, policy: SafeguardPolicy<R>) -> Self {
        self.policy = policy;
        self
    }

    pub fn diag(&self) -> &[R] {
        &self.diag
    }
}

impl<R: Real> Extend<R> for NevilleState<R> {
    fn extend(&mut self, point: &SequencePoint<R>) -> Result<Estimate<R>, Error> {
        let n = self.diag.len();
        check_index(n, point.n)?;
        let x = point.require_x()?;
        check_distinct(&self.xs, x, n)?;
        self.xs.push(x);
        self.diag.push(point.s);
        self.taint.push(false);
        for j in 1..=n {
            let i = n - j;
            let xi = self.xs[i];
            let (q, fired) = guard_divide(xi * self.diag[i + 1] - x * self.diag[i], xi - x, &self.policy);
            self.diag[i] = q;
            self.taint[i] = fired || self.taint[i] || self.taint[i + 1];
        }
        Ok(Estimate { value: self.diag[0], n: 0, k: n, valid: !self.taint[0] })
    }

    fn count(&self) -> usize {
        self.diag.len()
    }
}

/// Sidi's generalized Richardson process: ratio of the divided differences
/// of s/ω and 1/ω over the points x_0..x_m.
#[derive(Debug, Clone)]
pub struct DividedDiffState<R> {
    num: Vec<R>,
    den: Vec<R>,
    taint: Vec<bool>,
    xs: Vec<R>,
    policy: SafeguardPolicy<R>,
}

impl<R: Real> Default for DividedDiffState<R> {
    fn default() -> Self {
        Self::new()
    }
}

impl<R: Real> DividedDiffState<R> {
    pub fn new() -> Self {
        DividedDiffState {
            num: Vec::new(),
            den: Vec::new(),
            taint: Vec::new(),
            xs: Vec::new(),
            policy: R::default_policy(),
        }
    }

    pub fn with_policy(mut self, policy: SafeguardPolicy<R>) -> Self {
        self.policy = policy;
        self
    }

    /// Current numerator and denominator tables (divided differences of
    /// s/ω and 1/ω with lowest point index equal to the array index).
    pub fn tables(&self) -> (&[R], &[R]) {
        (&self.num, &self.den)
    }
}

impl<R: Real> Extend<R> for DividedDiffState<R> {
    fn extend(&mut self, point: &SequencePoint<R>) -> Result<Estimate<R>, Error> {
        let n = self.num.len();
        check_index(n, point.n)?;
        let x = point.require_x()?;
        let w = point.require_omega()?;
        if w == R::zero() {
            return Err(Error::ZeroOmega { rule: "supplied".into(), n });
        }
        check_distinct(&self.xs, x, n)?;
        self.xs.push(x);
        self.num.push(point.s / w);
        self.den.push(R::one() / w);
        self.taint.push(false);
        for j in 1..=n {
            let i = n - j;
            let h = x - self.xs[i];
            self.num[i] = (self.num[i + 1] - self.num[i]) / h;
            self.den[i] = (self.den[i + 1] - self.den[i]) / h;
            self.taint[i] = self.taint[i] || self.taint[i + 1];
        }
        let (value, fired) = guard_divide(self.num[0], self.den[0], &self.policy);
        Ok(Estimate { value, n: 0, k: n, valid: !(fired || self.taint[0]) })
    }

    fn count(&self) -> usize {
        self.num.len()
    }
}

/// Wynn's rho algorithm: after s_0..s_m, `diag[i]` holds ρ_{m-i}^{(i)}.
#[derive(Debug, Clone)]
pub struct RhoState<R> {
    diag: Vec<R>,
    taint: Vec<bool>,
    xs: Vec<R>,
    policy: SafeguardPolicy<R>,
}

impl<R: Real> Default for RhoState<R> {
    fn default() -> Self {
        Self::new()
    }
}

impl<R: Real> RhoState<R> {
    pub fn new() -> Self {
        RhoState { diag: Vec::new(), taint: Vec::new(), xs: Vec::new(), policy: R::default_policy() }
    }

    pub fn with_policy(mut self, policy: SafeguardPolicy<R>) -> Self {
        self.policy = policy;
        self
    }

    pub fn diag(&self) -> &[R] {
        &self.diag
    }
}

impl<R: Real> Extend<R> for RhoState<R> {
    fn extend(&mut self, point: &SequencePoint<R>) -> Result<Estimate<R>, Error> {
        let n = self.diag.len();
        check_index(n, point.n)?;
        let x = point.require_x()?;
        check_increasing(&self.xs, x, n)?;
        self.xs.push(x);
        self.diag.push(point.s);
        self.taint.push(false);
        if n > 0 {
            let mut aux2 = self.diag[n - 1];
            let mut aux2_t = self.taint[n - 1];
            let (q, fired) = guard_divide(x - self.xs[n - 1], self.diag[n] - aux2, &self.policy);
            self.diag[n - 1] = q;
            self.taint[n - 1] = fired || aux2_t;
            for i in (0..n - 1).rev() {
                let aux1 = self.diag[i];
                let aux1_t = self.taint[i];
                let (q, fired) = guard_divide(x - self.xs[i], self.diag[i + 1] - aux1, &self.policy);
                self.diag[i] = aux2 + q;
                self.taint[i] = fired || aux2_t || aux1_t || self.taint[i + 1];
                aux2 = aux1;
                aux2_t = aux1_t;
            }
        }
        let i = n % 2;
        Ok(Estimate { value: self.diag[i], n: i, k: n - i, valid: !self.taint[i] })
    }

    fn count(&self) -> usize {
        self.diag.len()
    }
}

/// Iterated rho_2 transform: after s_0..s_m, `diag[m-ν]` holds
/// 𝒲_{⌊ν/2⌋}^{(m-ν)}.
#[derive(Debug, Clone)]
pub struct WState<R> {
    diag: Vec<R>,
    taint: Vec<bool>,
    xs: Vec<R>,
    policy: SafeguardPolicy<R>,
}

impl<R: Real> Default for WState<R> {
    fn default() -> Self {
        Self::new()
    }
}

impl<R: Real> WState<R> {
    pub fn new() -> Self {
        WState { diag: Vec::new(), taint: Vec::new(), xs: Vec::new(), policy: R::default_policy() }
    }

    pub fn with_policy(mut self, policy: SafeguardPolicy<R>) -> Self {
        self.policy = policy;
        self
    }

    pub fn diag(&self) -> &[R] {
        &self.diag
    }
}

impl<R: Real> Extend<R> for WState<R> {
    fn extend(&mut self, point: &SequencePoint<R>) -> Result<Estimate<R>, Error> {
        let n = self.diag.len();
        check_index(n, point.n)?;
        let x = point.require_x()?;
        check_increasing(&self.xs, x, n)?;
        self.xs.push(x);
        self.diag.push(point.s);
        self.taint.push(false);
        for j in 1..=n / 2 {
            let l = n - 2 * j;
            let (w0, w1, w2) = (self.diag[l], self.diag[l + 1], self.diag[l + 2]);
            let (d0, d1) = (w1 - w0, w2 - w1);
            let num = (x - self.xs[l]) * d1 * d0;
            let den = (x - self.xs[l + 1]) * d0 - (self.xs[n - 1] - self.xs[l]) * d1;
            let (q, fired) = guard_divide(num, den, &self.policy);
            self.diag[l] = w1 + q;
            self.taint[l] = fired || self.taint[l] || self.taint[l + 1] || self.taint[l + 2];
        }
        let i = n % 2;
        Ok(Estimate { value: self.diag[i], n: i, k: n / 2, valid: !self.taint[i] })
    }

    fn count(&self) -> usize {
        self.diag.len()
    }
}

/// Grid search for the exponent α in x_n = (n+β)^(-α): picks the α whose
/// Richardson estimates from s_0..s_m and s_1..s_m agree best.
pub fn beleznay_alpha_search_sums<R: Real>(sums: &[R], alphas: &[f64], beta: f64) -> Result<f64, Error> {
    if alphas.is_empty() {
        return Err(Error::InvalidParameter("alpha grid is empty".into()));
    }
    if sums.len() < 3 {
        return Err(Error::TooShort { need: 3, got: sums.len() });
    }
    let m = sums.len() - 1;
    let mut grid: Vec<f64> = alphas.to_vec();
    grid.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
    let mut best: Option<(f64, R)> = None;
    for &alpha in &grid {
        let family = PointFamily::ReciprocalPower { beta, alpha };
        family.validate()?;
        let mut st = NevilleState::new();
        let mut previous = None;
        for (n, &s) in sums.iter().enumerate() {
            let x = family.closed_point::<R>(n).expect("closed-form family");
            let e = st.extend(&SequencePoint::new(n, s).with_x(x))?;
            if n == m - 1 {
                previous = Some(e);
            }
        }
        let prev = previous.expect("m >= 2");
        if !prev.valid || st.taint[1] {
            continue;
        }
        let crit = (st.diag[1] - prev.value).abs();
        if best.is_none_or(|(_, c)| crit < c) {
            best = Some((alpha, crit));
        }
    }
    best.map(|(a, _)| a)
        .ok_or_else(|| Error::NoResult("every alpha candidate hit the division safeguard".into()))
}

/// Grid search on the partial sums s_0..s_m of a catalog series.
pub fn beleznay_alpha_search(series: &SeriesSpec, alphas: &[f64], m: usize, beta: f64) -> Result<f64, Error> {
    if m < 2 {
        return Err(Error::InvalidParameter(format!("need m >= 2, got {m}")));
    }
    beleznay_alpha_search_sums(&sums::<f64>(series, m + 1)?, alphas, beta)
}

/// Default exponent grid {0.25, 0.5, ..., 2.0}.
pub fn default_alpha_grid() -> Vec<f64> {
    (1..=8).map(|i| 0.25 * i as f64).collect()
}
