//! Probabilistic-method calculators and the resampling driver that turns
//! "with positive probability there is a good sample" into a loop that
//! terminates with one.

use std::f64::consts::E;

use rand::Rng;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum ProbError {
    #[error("probability {0} outside [0, 1]")]
    Probability(f64),
    #[error("deviation t={t} outside [0, {limit}]")]
    Deviation { t: f64, limit: f64 },
    #[error("trial count must be positive, got {0}")]
    Trials(f64),
}

/// Symmetric Local Lemma condition `e·p·(D+1) ≤ 1`.
pub fn lll_feasible(p: f64, dependencies: u64) -> Result<bool, ProbError> {
    if !(0.0..=1.0).contains(&p) {
        return Err(ProbError::Probability(p));
    }
    Ok(E * p * (dependencies as f64 + 1.0) <= 1.0)
}

/// Number of Bernoulli trials in a tail query.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Trials {
    /// Exactly `n` trials: `BIN(n, p)`.
    Exact(u64),
    /// At most `k` trials (`k` need not be an integer), each succeeding with
    /// probability at most `p`. Dominated by `BIN(⌊k⌋, p)`.
    AtMost(f64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TailBoundQuery {
    pub trials: Trials,
    pub p: f64,
    pub t: f64,
}

impl TailBoundQuery {
    pub fn binomial(n: u64, p: f64, t: f64) -> Self {
        TailBoundQuery {
            trials: Trials::Exact(n),
            p,
            t,
        }
    }

    pub fn capped(k: f64, p: f64, t: f64) -> Self {
        TailBoundQuery {
            trials: Trials::AtMost(k),
            p,
            t,
        }
    }

    /// Mean used in the exponent: `np`, or `kq` for the capped form.
    fn mean(&self) -> f64 {
        match self.trials {
            Trials::Exact(n) => n as f64 * self.p,
            Trials::AtMost(k) => k * self.p,
        }
    }

    /// Largest admissible deviation: `np`, or `⌊k⌋q` for the capped form.
    fn deviation_limit(&self) -> f64 {
        match self.trials {
            Trials::Exact(n) => n as f64 * self.p,
            Trials::AtMost(k) => k.floor() * self.p,
        }
    }

    fn validate(&self) -> Result<(), ProbError> {
        if !(0.0..=1.0).contains(&self.p) {
            return Err(ProbError::Probability(self.p));
        }
        if let Trials::AtMost(k) = self.trials {
            if !k.is_finite() || k <= 0.0 {
                return Err(ProbError::Trials(k));
            }
        }
        let limit = self.deviation_limit();
        if !(0.0..=limit).contains(&self.t) {
            return Err(ProbError::Deviation { t: self.t, limit });
        }
        Ok(())
    }
}

/// Upper-tail Chernoff bound `Pr(X > μ + t) < exp(-t²/(3μ))`.
pub fn chernoff_upper(q: &TailBoundQuery) -> Result<f64, ProbError> {
    q.validate()?;
    if q.t == 0.0 {
        return Ok(1.0);
    }
    Ok((-q.t * q.t / (3.0 * q.mean())).exp())
}

/// Lower-tail twin `Pr(X < μ - t) < exp(-t²/(2μ))`.
pub fn chernoff_lower(q: &TailBoundQuery) -> Result<f64, ProbError> {
    q.validate()?;
    if q.t == 0.0 {
        return Ok(1.0);
    }
    Ok((-q.t * q.t / (2.0 * q.mean())).exp())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ResampleScope {
    /// Redraw the whole candidate after every rejection.
    GlobalRestart,
    /// Redraw only the random choices feeding violated locations.
    LocalResample,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ResamplePolicy {
    pub scope: ResampleScope,
    /// Global scope: redraws after the first draw. Local scope: total number
    /// of violated locations redrawn.
    pub max_restarts: usize,
}

impl ResamplePolicy {
    pub fn global(max_restarts: usize) -> Self {
        ResamplePolicy {
            scope: ResampleScope::GlobalRestart,
            max_restarts: max_restarts.max(1),
        }
    }

    pub fn local(max_events: usize) -> Self {
        ResamplePolicy {
            scope: ResampleScope::LocalResample,
            max_restarts: max_events.max(1),
        }
    }
}

impl Default for ResamplePolicy {
    fn default() -> Self {
        ResamplePolicy::global(100)
    }
}

/// A random structure built from independent choices.
pub trait Sampler {
    type Candidate: Clone;
    type Location: Clone;

    fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> Self::Candidate;

    /// Redraws the choices that `violated` depend on. The default redraws
    /// everything.
    fn redraw<R: Rng + ?Sized>(
        &self,
        candidate: &mut Self::Candidate,
        violated: &[Self::Location],
        rng: &mut R,
    ) {
        let _ = violated;
        *candidate = self.draw(rng);
    }
}

/// Adapts a closure into a [`Sampler`] that can only redraw globally.
pub struct FnSampler<F>(pub F);

impl<C: Clone, F> Sampler for FnSampler<F>
where
    F: Fn(&mut dyn rand::RngCore) -> C,
{
    type Candidate = C;
    type Location = ();

    fn draw<R: Rng + ?Sized>(&self, mut rng: &mut R) -> C {
        (self.0)(&mut rng)
    }
}

#[derive(Debug, Clone)]
pub struct Resampled<C> {
    pub candidate: C,
    /// Global scope: rejected draws. Local scope: locations redrawn.
    pub restarts: usize,
    /// Number of predicate evaluations.
    pub rounds: usize,
}

#[derive(Debug, Clone, Error)]
#[error("restart limit exceeded after {restarts} restarts; best candidate had {best_violations} violations")]
pub struct RestartLimitExceeded<C> {
    pub best: C,
    pub best_violations: usize,
    pub restarts: usize,
}

/// Draws until `predicate` reports no violated locations.
pub fn resample<S, P, R>(
    sampler: &S,
    predicate: P,
    policy: ResamplePolicy,
    rng: &mut R,
) -> Result<Resampled<S::Candidate>, RestartLimitExceeded<S::Candidate>>
where
    S: Sampler,
    P: Fn(&S::Candidate) -> Vec<S::Location>,
    R: Rng + ?Sized,
{
    let mut candidate = sampler.draw(rng);
    let mut restarts = 0;
    let mut rounds = 0;
    let mut best: Option<(usize, S::Candidate)> = None;
    loop {
        let violated = predicate(&candidate);
        rounds += 1;
        if violated.is_empty() {
            return Ok(Resampled {
                candidate,
                restarts,
                rounds,
            });
        }
        if best.as_ref().is_none_or(|(v, _)| violated.len() < *v) {
            best = Some((violated.len(), candidate.clone()));
        }
        let cost = match policy.scope {
            ResampleScope::GlobalRestart => 1,
            ResampleScope::LocalResample => violated.len(),
        };
        if restarts + cost > policy.max_restarts {
            let (best_violations, best) = best.expect("recorded above");
            return Err(RestartLimitExceeded {
                best,
                best_violations,
                restarts,
            });
        }
        restarts += cost;
        match policy.scope {
            ResampleScope::GlobalRestart => candidate = sampler.draw(rng),
            ResampleScope::LocalResample => sampler.redraw(&mut candidate, &violated, rng),
        }
    }
}
