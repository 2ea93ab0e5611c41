//! Wynn's epsilon algorithm and the iterated Aitken Δ² process, each kept
//! in a single array that holds the current counterdiagonal.

use crate::kernel::{check_index, guard_divide, Error, Estimate, Extend, Real, SafeguardPolicy, SequencePoint};

/// Epsilon table stored by superscript: after s_0..s_m, `diag[i]` holds
/// ε_{m-i}^{(i)}.
#[derive(Debug, Clone)]
pub struct EpsilonState<R> {
    diag: Vec<R>,
    taint: Vec<bool>,
    policy: SafeguardPolicy<R>,
}

impl<R: Real> Default for EpsilonState<R> {
    fn default() -> Self {
        Self::new()
    }
}

impl<R: Real> EpsilonState<R> {
    pub fn new() -> Self {
        Self::with_policy(R::default_policy())
    }

    pub fn with_policy(policy: SafeguardPolicy<R>) -> Self {
        EpsilonState { diag: Vec::new(), taint: Vec::new(), policy }
    }

    pub fn diag(&self) -> &[R] {
        &self.diag
    }

    pub fn reset(&mut self) {
        self.diag.clear();
        self.taint.clear();
    }
}

impl<R: Real> Extend<R> for EpsilonState<R> {
    fn extend(&mut self, point: &SequencePoint<R>) -> Result<Estimate<R>, Error> {
        let n = self.diag.len();
        check_index(n, point.n)?;
        self.diag.push(point.s);
        self.taint.push(false);
        if n > 0 {
            // aux2 shadows ε_{j-2}^{(i+1)} from the previous counterdiagonal
            let mut aux2 = self.diag[n - 1];
            let mut aux2_t = self.taint[n - 1];
            let (q, fired) = guard_divide(R::one(), self.diag[n] - aux2, &self.policy);
            self.diag[n - 1] = q;
            self.taint[n - 1] = fired || aux2_t;
            for i in (0..n - 1).rev() {
                let aux1 = self.diag[i];
                let aux1_t = self.taint[i];
                let (q, fired) = guard_divide(R::one(), self.diag[i + 1] - aux1, &self.policy);
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

/// Iterated Aitken table: after s_0..s_m, `diag[m-ν]` holds
/// 𝒜_{⌊ν/2⌋}^{(m-ν)}.
#[derive(Debug, Clone)]
pub struct AitkenState<R> {
    diag: Vec<R>,
    taint: Vec<bool>,
    policy: SafeguardPolicy<R>,
}

impl<R: Real> Default for AitkenState<R> {
    fn default() -> Self {
        Self::new()
    }
}

impl<R: Real> AitkenState<R> {
    pub fn new() -> Self {
        Self::with_policy(R::default_policy())
    }

    pub fn with_policy(policy: SafeguardPolicy<R>) -> Self {
        AitkenState { diag: Vec::new(), taint: Vec::new(), policy }
    }

    pub fn diag(&self) -> &[R] {
        &self.diag
    }
}

impl<R: Real> Extend<R> for AitkenState<R> {
    fn extend(&mut self, point: &SequencePoint<R>) -> Result<Estimate<R>, Error> {
        let n = self.diag.len();
        check_index(n, point.n)?;
        self.diag.push(point.s);
        self.taint.push(false);
        for j in 1..=n / 2 {
            let l = n - 2 * j;
            let (a0, a1, a2) = (self.diag[l], self.diag[l + 1], self.diag[l + 2]);
            let d = a1 - a0;
            let (q, fired) = guard_divide(d * d, a2 - a1 - a1 + a0, &self.policy);
            self.diag[l] = a0 - q;
            self.taint[l] = fired || self.taint[l] || self.taint[l + 1] || self.taint[l + 2];
        }
        let i = n % 2;
        Ok(Estimate { value: self.diag[i], n: i, k: n / 2, valid: !self.taint[i] })
    }

    fn count(&self) -> usize {
        self.diag.len()
    }
}
