//! Brezinski's θ algorithm, its interpolation-point variant Θ, and the
//! iterated schemes built from the same construction: 𝒥 (iterated θ₂),
//! ℬ and 𝒞 (from Aitken's Δ²), λ, σ and μ (from Λ, ℱ and 𝒫).

use crate::kernel::{check_index, guard_divide, Error, Estimate, Extend, Real, SafeguardPolicy, SequencePoint};

/// Which θ-type recursion a [`ThetaState`] runs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ThetaKind {
    Theta,
    /// Odd columns replaced by plain reciprocals 1/Δθ_{2k}; the even
    /// columns then coincide with 𝒥.
    Modified,
    /// Θ, which needs interpolation points x_n on every sample.
    Big,
}

/// θ table held as two strings. After s_0..s_m the array selected by the
/// parity of m holds θ_j^{(m-⌊3j/2⌋)} for 0 ≤ j ≤ ⌊(2m+1)/3⌋ and the other
/// array holds the string for m-1.
#[derive(Debug, Clone)]
pub struct ThetaState<R> {
    kind: ThetaKind,
    arr: [Vec<R>; 2],
    taint: [Vec<bool>; 2],
    xs: Vec<R>,
    count: usize,
    policy: SafeguardPolicy<R>,
}

impl<R: Real> ThetaState<R> {
    pub fn new(kind: ThetaKind) -> Self {
        ThetaState {
            kind,
            arr: [Vec::new(), Vec::new()],
            taint: [Vec::new(), Vec::new()],
            xs: Vec::new(),
            count: 0,
            policy: R::default_policy(),
        }
    }

    pub fn with_policy(mut self, policy: SafeguardPolicy<R>) -> Self {
        self.policy = policy;
        self
    }

    pub fn kind(&self) -> ThetaKind {
        self.kind
    }

    /// The freshest string, θ_j^{(m-⌊3j/2⌋)} at index j.
    pub fn string(&self) -> &[R] {
        if self.count == 0 {
            return &[];
        }
        let m = self.count - 1;
        &self.arr[m % 2][..=(2 * m + 1) / 3]
    }
}

impl<R: Real> Extend<R> for ThetaState<R> {
    fn extend(&mut self, point: &SequencePoint<R>) -> Result<Estimate<R>, Error> {
        let n = self.count;
        check_index(n, point.n)?;
        if self.kind == ThetaKind::Big {
            self.xs.push(point.require_x()?);
        }
        let c = n % 2;
        let mut cur = std::mem::take(&mut self.arr[c]);
        let mut cur_t = std::mem::take(&mut self.taint[c]);
        let prev = &self.arr[1 - c];
        let prev_t = &self.taint[1 - c];
        let xs = &self.xs;
        let jmax = (2 * n + 1) / 3;
        cur.resize(jmax + 1, R::zero());
        cur_t.resize(jmax + 1, false);

        // o2 and o1 shadow the string n-2 entries at j-2 and j-1, old the
        // one at j before it is overwritten
        let mut o2 = (R::zero(), false);
        let mut o1 = (R::zero(), false);
        for j in 0..=jmax {
            let old = (cur[j], cur_t[j]);
            let (val, t) = if j == 0 {
                (point.s, false)
            } else if j % 2 == 1 {
                let q = j / 2;
                let w = match self.kind {
                    ThetaKind::Big => xs[n - q] - xs[n - 3 * q - 1],
                    _ => R::one(),
                };
                let (r, fired) = guard_divide(w, cur[2 * q] - prev[2 * q], &self.policy);
                let t = fired || cur_t[2 * q] || prev_t[2 * q];
                match self.kind {
                    ThetaKind::Modified => (r, t),
                    _ if q == 0 => (r, t),
                    _ => (o2.0 + r, t || o2.1),
                }
            } else {
                let q = (j - 2) / 2;
                let d_even = prev[2 * q] - o2.0;
                let d1 = cur[2 * q + 1] - prev[2 * q + 1];
                let d0 = prev[2 * q + 1] - o1.0;
                let (r, fired) = match self.kind {
                    ThetaKind::Big => {
                        let a = xs[n - q - 1] - xs[n - 3 * q - 3];
                        let b = xs[n - q] - xs[n - 3 * q - 2];
                        let (r, f) = guard_divide(a * d_even * d1, b * d0 - a * d1, &self.policy);
                        (-r, f)
                    }
                    _ => guard_divide(d_even * d1, d1 - d0, &self.policy),
                };
                let t = fired || o2.1 || o1.1 || prev_t[2 * q] || prev_t[2 * q + 1] || cur_t[2 * q + 1];
                (o2.0 + r, t)
            };
            cur[j] = val;
            cur_t[j] = t;
            o2 = o1;
            o1 = old;
        }

        let j = 2 * (n / 3);
        let est = Estimate { value: cur[j], n: n - 3 * (n / 3), k: j, valid: !cur_t[j] };
        self.arr[c] = cur;
        self.taint[c] = cur_t;
        self.count += 1;
        Ok(est)
    }

    fn count(&self) -> usize {
        self.count
    }
}

/// Iterated schemes that live in a single array.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum IterScheme {
    /// 𝒥, the iterated θ₂ (Lubkin's W).
    J,
    B,
    C,
    Lambda { beta: f64 },
    Sigma { alpha: f64 },
    Mu { zeta: f64 },
    /// λ/σ/μ with both weights replaced by their common n→∞ limit, which is
    /// the second form of iterated Aitken.
    Unit,
}

impl IterScheme {
    pub fn stride(&self) -> usize {
        match self {
            IterScheme::J | IterScheme::B | IterScheme::C => 3,
            _ => 2,
        }
    }

    pub fn validate(&self) -> Result<(), Error> {
        let p = match *self {
            IterScheme::Lambda { beta } => beta,
            IterScheme::Sigma { alpha } => alpha,
            IterScheme::Mu { zeta } => zeta,
            _ => return Ok(()),
        };
        if p > 0.0 && p.is_finite() {
            Ok(())
        } else {
            Err(Error::InvalidParameter(format!("parameter must be positive, got {p}")))
        }
    }

    // weights at superscript p for the step from order k to k+1
    fn weights<R: Real>(&self, p: usize, k: usize) -> (R, R) {
        let (pr, kr) = (R::of(p), R::of(k));
        let w0 = match *self {
            IterScheme::Lambda { beta } => R::lit(beta) + pr,
            IterScheme::Sigma { alpha } => R::lit(alpha) + pr + kr,
            IterScheme::Mu { zeta } => R::lit(zeta) + pr - kr,
            _ => return (R::one(), R::one()),
        };
        (w0, w0 + R::one())
    }
}

/// Single-array state for 𝒥, ℬ, 𝒞 (stride 3) and λ, σ, μ (stride 2).
/// After s_0..s_m, `arr[i]` holds the order ⌊(m-i)/stride⌋ entry with
/// superscript i.
#[derive(Debug, Clone)]
pub struct IterWeightedState<R> {
    scheme: IterScheme,
    arr: Vec<R>,
    taint: Vec<bool>,
    policy: SafeguardPolicy<R>,
}

impl<R: Real> IterWeightedState<R> {
    pub fn new(scheme: IterScheme) -> Result<Self, Error> {
        scheme.validate()?;
        Ok(IterWeightedState { scheme, arr: Vec::new(), taint: Vec::new(), policy: R::default_policy() })
    }

    pub fn with_policy(mut self, policy: SafeguardPolicy<R>) -> Self {
        self.policy = policy;
        self
    }

    pub fn scheme(&self) -> IterScheme {
        self.scheme
    }

    pub fn diag(&self) -> &[R] {
        &self.arr
    }

    fn stride3(&mut self, m: usize) {
        let x = &self.arr;
        let d = |i: usize| x[i + 1] - x[i];
        let (d0, d1, d2) = (d(m), d(m + 1), d(m + 2));
        let (dd0, dd1) = (d1 - d0, d2 - d1);
        let (val, fired) = match self.scheme {
            IterScheme::J => {
                let (r, f) = guard_divide(d0 * d1 * dd1, d2 * dd0 - d0 * dd1, &self.policy);
                (x[m + 1] - r, f)
            }
            IterScheme::B => {
                let (r, f) = guard_divide(d0 * d0 * d0 * dd1, d0 * d0 * dd1 - d1 * d1 * dd0, &self.policy);
                (x[m] + r, f)
            }
            _ => {
                let (r, f) = guard_divide(d1 * d1 * d2 * dd1, d1 * d1 * dd1 - d2 * d2 * dd0, &self.policy);
                (x[m + 2] + r, f)
            }
        };
        let t = fired || self.taint[m..=m + 3].iter().any(|&b| b);
        self.arr[m] = val;
        self.taint[m] = t;
    }

    fn stride2(&mut self, p: usize, k: usize) {
        let x = &self.arr;
        let d0 = x[p + 1] - x[p];
        let d1 = x[p + 2] - x[p + 1];
        let (w0, w1): (R, R) = self.scheme.weights(p, k);
        let (r, fired) = guard_divide(w0 * d0 * d1, w1 * d1 - w0 * d0, &self.policy);
        let t = fired || self.taint[p..=p + 2].iter().any(|&b| b);
        self.arr[p] = x[p + 1] - r;
        self.taint[p] = t;
    }
}

impl<R: Real> Extend<R> for IterWeightedState<R> {
    fn extend(&mut self, point: &SequencePoint<R>) -> Result<Estimate<R>, Error> {
        let n = self.arr.len();
        check_index(n, point.n)?;
        self.arr.push(point.s);
        self.taint.push(false);
        let stride = self.scheme.stride();
        for l in 1..=n / stride {
            if stride == 3 {
                self.stride3(n - 3 * l);
            } else {
                self.stride2(n - 2 * l, l - 1);
            }
        }
        let i = n % stride;
        Ok(Estimate { value: self.arr[i], n: i, k: n / stride, valid: !self.taint[i] })
    }

    fn count(&self) -> usize {
        self.arr.len()
    }
}
