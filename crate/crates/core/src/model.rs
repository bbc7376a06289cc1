//! Problem and discount definitions.
//!
//! A problem couples a controlled scalar diffusion
//! `dX = b(s, X, u) ds + σ(s, X, u) dW` with a running cost. The cost a
//! decision maker standing at anchor time ϱ assigns to paying `g₀(s, x, u)`
//! at a later time `s` is `λ(s − ϱ) · g₀(s, x, u)`, where the discount
//! weight λ is non-exponential on an initial stretch `[0, T₀]` and exactly
//! exponential with rate δ beyond it. Everything downstream (classical
//! solves, the equilibrium system, simulation) consumes the pieces defined
//! here: coefficients, the pointwise Hamiltonian, the grid argmin selector,
//! and the cost-envelope tail integral used to truncate infinite horizons.

use std::sync::Arc;

use crate::error::{Result, SolverError};

/// Coefficient of the state equation or base running cost, `(s, x, u) → ℝ`.
pub type CoeffFn = Arc<dyn Fn(f64, f64, f64) -> f64 + Send + Sync>;

/// Scalar function of time, used for cost envelopes and tail integrals.
pub type TimeFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Two-time running cost `(anchor, s, x, u) → ℝ`.
pub type TwoTimeFn = Arc<dyn Fn(f64, f64, f64, f64) -> f64 + Send + Sync>;

// ---------------------------------------------------------------------------
// Discounting
// ---------------------------------------------------------------------------

#[derive(Clone)]
enum Head {
    /// `e^{−δτ}` on the head too: the discount is exponential everywhere.
    Exponential,
    /// `1/(1 + kτ)` with k chosen so the head meets `e^{−δT₀}` at the splice.
    Hyperbolic { k: f64 },
    /// Caller-supplied head; must satisfy the DiscountSpec invariants.
    Custom(TimeFn),
}

/// Discount weight λ: non-exponential head on `[0, T₀]`, exponential tail
/// `e^{−δτ}` from `T₀` on. `λ(0) = 1`, strictly decreasing, integrable.
#[derive(Clone)]
pub struct DiscountSpec {
    t0: f64,
    delta: f64,
    head: Head,
}

impl DiscountSpec {
    /// Exponential discounting at rate `delta` throughout. The splice time
    /// is kept because window lengths elsewhere are tied to it.
    pub fn pure_exponential(delta: f64, t0: f64) -> Result<Self> {
        Self::check_params(delta, t0)?;
        Ok(Self { t0, delta, head: Head::Exponential })
    }

    /// Hyperbolic head `1/(1 + kτ)` with `k = (e^{δT₀} − 1)/T₀`, which makes
    /// the head continuous with the exponential tail at `T₀`.
    pub fn matched_hyperbolic(delta: f64, t0: f64) -> Result<Self> {
        Self::check_params(delta, t0)?;
        if t0 == 0.0 {
            // degenerate head: nothing before the splice
            return Ok(Self { t0, delta, head: Head::Exponential });
        }
        let k = ((delta * t0).exp() - 1.0) / t0;
        Ok(Self { t0, delta, head: Head::Hyperbolic { k } })
    }

    /// Arbitrary head segment. The constructor does not prove monotonicity
    /// or splice continuity; `validate_problem` samples for both.
    pub fn with_head(delta: f64, t0: f64, head: TimeFn) -> Result<Self> {
        Self::check_params(delta, t0)?;
        Ok(Self { t0, delta, head: Head::Custom(head) })
    }

    fn check_params(delta: f64, t0: f64) -> Result<()> {
        if !(delta > 0.0) || !delta.is_finite() {
            return Err(SolverError::Domain(format!(
                "discount rate must be positive and finite, got {delta}"
            )));
        }
        if !(t0 >= 0.0) || !t0.is_finite() {
            return Err(SolverError::Domain(format!(
                "splice time must be nonnegative and finite, got {t0}"
            )));
        }
        Ok(())
    }

    pub fn splice_time(&self) -> f64 {
        self.t0
    }

    pub fn rate(&self) -> f64 {
        self.delta
    }

    /// True when the head itself is exponential, i.e. λ(τ) = e^{−δτ} for all
    /// τ ≥ 0 and the discount carries no time inconsistency.
    pub fn is_exponential(&self) -> bool {
        matches!(self.head, Head::Exponential)
    }

    /// λ(τ). Head value for `τ < T₀`, `e^{−δτ}` from the splice on.
    pub fn eval(&self, tau: f64) -> Result<f64> {
        if !(tau >= 0.0) {
            return Err(SolverError::Domain(format!(
                "discount evaluated at negative lag {tau}"
            )));
        }
        Ok(self.weight(tau))
    }

    /// λ(τ) without the sign check, for inner loops whose lags are grid
    /// differences already known to be nonnegative.
    pub(crate) fn weight(&self, tau: f64) -> f64 {
        debug_assert!(tau >= 0.0);
        if tau < self.t0 {
            match &self.head {
                Head::Exponential => (-self.delta * tau).exp(),
                Head::Hyperbolic { k } => 1.0 / (1.0 + k * tau),
                Head::Custom(f) => f(tau),
            }
        } else {
            (-self.delta * tau).exp()
        }
    }

    /// `∫_T^∞ λ(s) ds` in closed form for the built-in heads. For custom
    /// heads the head part falls back to a fine trapezoid on `[T, T₀]`.
    pub fn integral_tail(&self, from: f64) -> Result<f64> {
        if !(from >= 0.0) {
            return Err(SolverError::Domain(format!(
                "discount tail integral from negative time {from}"
            )));
        }
        let exp_tail = |t: f64| (-self.delta * t).exp() / self.delta;
        if from >= self.t0 {
            return Ok(exp_tail(from));
        }
        let head_part = match &self.head {
            Head::Exponential => exp_tail(from) - exp_tail(self.t0),
            Head::Hyperbolic { k } => ((1.0 + k * self.t0) / (1.0 + k * from)).ln() / k,
            Head::Custom(f) => {
                let n = 4096;
                let h = (self.t0 - from) / n as f64;
                let mut acc = 0.5 * (f(from) + f(self.t0));
                for j in 1..n {
                    acc += f(from + j as f64 * h);
                }
                acc * h
            }
        };
        Ok(head_part + exp_tail(self.t0))
    }
}

// ---------------------------------------------------------------------------
// Problems
// ---------------------------------------------------------------------------

/// A controlled diffusion with running cost, the unit every solver works on.
///
/// `base_cost` is the one-time cost g₀. The two-time cost seen from anchor
/// ϱ is `λ(s−ϱ)·g₀(s,x,u)` unless a general hook was installed with
/// [`ProblemSpec::with_two_time_cost`]; hooks must still agree with
/// `e^{−δ(s−ϱ)}·g₀` once `s − ϱ` passes the splice (checked by
/// `validate_problem`, not at construction).
#[derive(Clone)]
pub struct ProblemSpec {
    drift: CoeffFn,
    diffusion: CoeffFn,
    base_cost: CoeffFn,
    two_time_cost: Option<TwoTimeFn>,
    cost_bound: TimeFn,
    tail_integral: Option<TimeFn>,
    control_grid: Vec<f64>,
    epsilon_floor: f64,
}

impl ProblemSpec {
    pub fn builder() -> ProblemSpecBuilder {
        ProblemSpecBuilder::default()
    }

    pub fn drift(&self, s: f64, x: f64, u: f64) -> f64 {
        (self.drift)(s, x, u)
    }

    pub fn diffusion(&self, s: f64, x: f64, u: f64) -> f64 {
        (self.diffusion)(s, x, u)
    }

    pub fn base_cost(&self, s: f64, x: f64, u: f64) -> f64 {
        (self.base_cost)(s, x, u)
    }

    /// Two-time cost g(ϱ, s, x, u). Product form unless a hook is installed.
    pub fn running_cost(&self, d: &DiscountSpec, anchor: f64, s: f64, x: f64, u: f64) -> f64 {
        match &self.two_time_cost {
            Some(g) => g(anchor, s, x, u),
            None => d.weight(s - anchor) * (self.base_cost)(s, x, u),
        }
    }

    pub fn cost_bound(&self, s: f64) -> f64 {
        (self.cost_bound)(s)
    }

    pub fn control_grid(&self) -> &[f64] {
        &self.control_grid
    }

    pub fn epsilon_floor(&self) -> f64 {
        self.epsilon_floor
    }

    pub fn has_two_time_hook(&self) -> bool {
        self.two_time_cost.is_some()
    }

    /// Index of `u` on the control grid, or None if it is not a grid value.
    pub fn control_index(&self, u: f64) -> Option<usize> {
        self.control_grid.iter().position(|&g| g == u)
    }

    /// Same problem with every time argument shifted: coefficients and cost
    /// read `s + shift` in place of `s`. Used by the anchor-shift check.
    pub fn time_shifted(&self, shift: f64) -> ProblemSpec {
        let b = self.drift.clone();
        let s_ = self.diffusion.clone();
        let g = self.base_cost.clone();
        let phi = self.cost_bound.clone();
        let two = self.two_time_cost.clone();
        ProblemSpec {
            drift: Arc::new(move |s, x, u| b(s + shift, x, u)),
            diffusion: Arc::new(move |s, x, u| s_(s + shift, x, u)),
            base_cost: Arc::new(move |s, x, u| g(s + shift, x, u)),
            two_time_cost: two.map(|f| {
                let f = f.clone();
                Arc::new(move |a: f64, s: f64, x: f64, u: f64| f(a + shift, s + shift, x, u))
                    as TwoTimeFn
            }),
            cost_bound: Arc::new(move |s| phi(s + shift)),
            tail_integral: self.tail_integral.clone().map(|ti| {
                Arc::new(move |t: f64| ti(t + shift)) as TimeFn
            }),
            control_grid: self.control_grid.clone(),
            epsilon_floor: self.epsilon_floor,
        }
    }
}

#[derive(Default)]
pub struct ProblemSpecBuilder {
    drift: Option<CoeffFn>,
    diffusion: Option<CoeffFn>,
    base_cost: Option<CoeffFn>,
    two_time_cost: Option<TwoTimeFn>,
    cost_bound: Option<TimeFn>,
    tail_integral: Option<TimeFn>,
    control_grid: Vec<f64>,
    epsilon_floor: f64,
}

impl ProblemSpecBuilder {
    pub fn drift(mut self, f: impl Fn(f64, f64, f64) -> f64 + Send + Sync + 'static) -> Self {
        self.drift = Some(Arc::new(f));
        self
    }

    pub fn diffusion(mut self, f: impl Fn(f64, f64, f64) -> f64 + Send + Sync + 'static) -> Self {
        self.diffusion = Some(Arc::new(f));
        self
    }

    pub fn base_cost(mut self, f: impl Fn(f64, f64, f64) -> f64 + Send + Sync + 'static) -> Self {
        self.base_cost = Some(Arc::new(f));
        self
    }

    /// Install a general two-time cost in place of the λ-product form.
    pub fn two_time_cost(
        mut self,
        f: impl Fn(f64, f64, f64, f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        self.two_time_cost = Some(Arc::new(f));
        self
    }

    /// Envelope φ with `g₀(s,·,·) ≤ φ(s)`, plus its closed-form tail
    /// integral `T → ∫_T^∞ φ`.
    pub fn cost_bound(
        mut self,
        phi: impl Fn(f64) -> f64 + Send + Sync + 'static,
        tail: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        self.cost_bound = Some(Arc::new(phi));
        self.tail_integral = Some(Arc::new(tail));
        self
    }

    /// Envelope without a closed-form tail; horizon-truncation entry points
    /// will refuse such a problem.
    pub fn cost_bound_no_tail(mut self, phi: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        self.cost_bound = Some(Arc::new(phi));
        self.tail_integral = None;
        self
    }

    pub fn controls(mut self, grid: Vec<f64>) -> Self {
        self.control_grid = grid;
        self
    }

    pub fn epsilon_floor(mut self, eps: f64) -> Self {
        self.epsilon_floor = eps;
        self
    }

    pub fn build(self) -> Result<ProblemSpec> {
        let grid = self.control_grid;
        if grid.is_empty() {
            return Err(SolverError::Domain("control grid is empty".into()));
        }
        if !grid.windows(2).all(|w| w[0] < w[1]) {
            return Err(SolverError::Domain(
                "control grid must be strictly ascending".into(),
            ));
        }
        if !(self.epsilon_floor > 0.0) {
            return Err(SolverError::Domain(format!(
                "ellipticity floor must be positive, got {}",
                self.epsilon_floor
            )));
        }
        Ok(ProblemSpec {
            drift: self
                .drift
                .ok_or_else(|| SolverError::Domain("drift not set".into()))?,
            diffusion: self
                .diffusion
                .ok_or_else(|| SolverError::Domain("diffusion not set".into()))?,
            base_cost: self
                .base_cost
                .ok_or_else(|| SolverError::Domain("base cost not set".into()))?,
            two_time_cost: self.two_time_cost,
            cost_bound: self
                .cost_bound
                .ok_or_else(|| SolverError::Domain("cost bound not set".into()))?,
            tail_integral: self.tail_integral,
            control_grid: grid,
            epsilon_floor: self.epsilon_floor,
        })
    }
}

// ---------------------------------------------------------------------------
// Built-in problem catalog
// ---------------------------------------------------------------------------

/// The smooth bounded family used by tests, the acceptance suite, and the
/// CLI catalog:
///
/// ```text
/// b(s,x,u) = β₀ + β₁·tanh(x) + β₂·u
/// σ(s,x)   = σ₀ + σ₁·tanh(x)            (σ₀ > |σ₁| + √ε)
/// g₀(s,x,u)= e^{−ρs}·(a·tanh²(x−x⋆) + c·(u/u_max)²)
/// φ(s)     = (a + c)·e^{−ρs}
/// ```
///
/// Bounded, globally Lipschitz, uniformly elliptic, so every structural
/// hypothesis the solvers rely on holds by construction.
#[derive(Clone, Debug)]
pub struct CatalogProblem {
    pub drift_base: f64,
    pub drift_state: f64,
    pub drift_control: f64,
    pub vol_base: f64,
    pub vol_state: f64,
    pub cost_decay: f64,
    pub state_weight: f64,
    pub control_weight: f64,
    pub cost_center: f64,
    pub control_span: f64,
    pub n_controls: usize,
    pub epsilon_floor: f64,
}

impl Default for CatalogProblem {
    fn default() -> Self {
        Self {
            drift_base: 0.0,
            drift_state: -0.2,
            drift_control: 0.5,
            vol_base: 1.0,
            vol_state: 0.2,
            cost_decay: 1.0,
            state_weight: 0.8,
            control_weight: 0.2,
            cost_center: 0.5,
            control_span: 1.0,
            n_controls: 5,
            epsilon_floor: 0.25,
        }
    }
}

impl CatalogProblem {
    pub fn build(&self) -> Result<ProblemSpec> {
        let &CatalogProblem {
            drift_base,
            drift_state,
            drift_control,
            vol_base,
            vol_state,
            cost_decay,
            state_weight,
            control_weight,
            cost_center,
            control_span,
            n_controls,
            epsilon_floor,
        } = self;
        if !(vol_base > vol_state.abs() + epsilon_floor.sqrt()) {
            return Err(SolverError::Structural(format!(
                "need vol_base > |vol_state| + sqrt(epsilon): {vol_base} vs {} + {}",
                vol_state.abs(),
                epsilon_floor.sqrt()
            )));
        }
        if !(cost_decay > 0.0) {
            return Err(SolverError::Domain(format!(
                "cost decay rate must be positive, got {cost_decay}"
            )));
        }
        if state_weight < 0.0 || control_weight < 0.0 {
            return Err(SolverError::Domain(
                "cost weights must be nonnegative".into(),
            ));
        }
        if n_controls < 1 || !(control_span > 0.0) {
            return Err(SolverError::Domain(
                "need at least one control and a positive span".into(),
            ));
        }
        let controls: Vec<f64> = if n_controls == 1 {
            vec![0.0]
        } else {
            (0..n_controls)
                .map(|i| -control_span + 2.0 * control_span * i as f64 / (n_controls - 1) as f64)
                .collect()
        };
        let total = state_weight + control_weight;
        ProblemSpec::builder()
            .drift(move |_s, x, u| drift_base + drift_state * x.tanh() + drift_control * u)
            .diffusion(move |_s, x, _u| vol_base + vol_state * x.tanh())
            .base_cost(move |s, x, u| {
                let z = (x - cost_center).tanh();
                let v = u / control_span;
                (-cost_decay * s).exp() * (state_weight * z * z + control_weight * v * v)
            })
            .cost_bound(
                move |s| total * (-cost_decay * s).exp(),
                move |t| total * (-cost_decay * t).exp() / cost_decay,
            )
            .controls(controls)
            .epsilon_floor(epsilon_floor)
            .build()
    }
}

// ---------------------------------------------------------------------------
// Pointwise Hamiltonian and selector
// ---------------------------------------------------------------------------

/// `grad·b + ½σ²·hess + weight·g₀` at one point. The weight carries the
/// discount: `e^{−δt}` for the exponential-tail problem, `λ(t−ϱ)` for an
/// anchored one, 1 for an undiscounted sweep.
pub fn hamiltonian(
    p: &ProblemSpec,
    t: f64,
    x: f64,
    u: f64,
    grad: f64,
    hess: f64,
    weight: f64,
) -> Result<f64> {
    if p.control_index(u).is_none() {
        return Err(SolverError::Domain(format!(
            "control {u} is not on the control grid"
        )));
    }
    Ok(hamiltonian_unchecked(p, t, x, u, grad, hess, weight))
}

#[inline]
pub(crate) fn hamiltonian_unchecked(
    p: &ProblemSpec,
    t: f64,
    x: f64,
    u: f64,
    grad: f64,
    hess: f64,
    weight: f64,
) -> f64 {
    let sigma = p.diffusion(t, x, u);
    grad * p.drift(t, x, u) + 0.5 * sigma * sigma * hess + weight * p.base_cost(t, x, u)
}

/// Control grid element minimizing the Hamiltonian at fixed derivatives.
/// Ties go to the smallest control value.
pub fn argmin_control(
    p: &ProblemSpec,
    t: f64,
    x: f64,
    grad: f64,
    hess: f64,
    weight: f64,
) -> f64 {
    let mut best_u = p.control_grid[0];
    let mut best_h = hamiltonian_unchecked(p, t, x, best_u, grad, hess, weight);
    for &u in &p.control_grid[1..] {
        let h = hamiltonian_unchecked(p, t, x, u, grad, hess, weight);
        if h < best_h {
            best_h = h;
            best_u = u;
        }
    }
    best_u
}

/// `∫_T^∞ φ(s) ds` through the stored closed form. This is the quantity
/// that bounds how much truncating an infinite horizon at `T` can cost.
pub fn tail_bound(p: &ProblemSpec, from: f64) -> Result<f64> {
    if !(from >= 0.0) {
        return Err(SolverError::Domain(format!(
            "tail bound from negative time {from}"
        )));
    }
    match &p.tail_integral {
        Some(f) => Ok(f(from)),
        None => Err(SolverError::Unsupported(
            "problem has no closed-form cost-envelope tail".into(),
        )),
    }
}

// ---------------------------------------------------------------------------
// Validation
// ---------------------------------------------------------------------------

/// One sampled violation of a structural hypothesis.
#[derive(Clone, Debug)]
pub enum Violation {
    /// σ(s,x,u)² fell below the ellipticity floor.
    NonDegeneracy { s: f64, x: f64, u: f64, sigma_sq: f64 },
    /// Running cost left `[0, φ(s)]`.
    CostEnvelope { anchor: f64, s: f64, x: f64, u: f64, value: f64, bound: f64 },
    /// λ failed to decrease between two sampled lags.
    DiscountMonotone { tau_a: f64, tau_b: f64 },
    /// head(T₀) does not meet the exponential tail.
    SpliceContinuity { head: f64, tail: f64 },
    /// λ(0) ≠ 1.
    UnitAtZero { value: f64 },
    /// A two-time hook disagrees with `e^{−δ(s−ϱ)}·g₀` past the splice.
    TwoTimeTail { anchor: f64, s: f64, x: f64, u: f64, got: f64, want: f64 },
}

impl std::fmt::Display for Violation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Violation::NonDegeneracy { s, x, u, sigma_sq } => write!(
                f,
                "sigma^2 = {sigma_sq} below floor at (s={s}, x={x}, u={u})"
            ),
            Violation::CostEnvelope { anchor, s, x, u, value, bound } => write!(
                f,
                "cost {value} outside [0, {bound}] at (anchor={anchor}, s={s}, x={x}, u={u})"
            ),
            Violation::DiscountMonotone { tau_a, tau_b } => {
                write!(f, "discount not decreasing between lags {tau_a} and {tau_b}")
            }
            Violation::SpliceContinuity { head, tail } => {
                write!(f, "head({head}) does not meet exponential tail ({tail}) at the splice")
            }
            Violation::UnitAtZero { value } => write!(f, "discount at lag 0 is {value}, not 1"),
            Violation::TwoTimeTail { anchor, s, x, u, got, want } => write!(
                f,
                "two-time cost {got} != exponential form {want} at (anchor={anchor}, s={s}, x={x}, u={u})"
            ),
        }
    }
}

/// Sample the structural hypotheses on a deterministic lattice and report
/// every violation found. An empty report means all sampled checks passed;
/// it is evidence, not proof.
///
/// The sample region is `s ∈ [0, T₀ + 10]`, `x ∈ [−4, 4]`, `u` over the
/// control grid, with the time/space lattice sized from `budget`.
pub fn validate_problem(p: &ProblemSpec, d: &DiscountSpec, budget: usize) -> Vec<Violation> {
    let mut out = Vec::new();
    let budget = budget.max(8);
    // split the budget between the coefficient lattice and the discount line
    let n_s = (budget as f64).sqrt().ceil() as usize;
    let n_x = n_s;
    let s_hi = d.splice_time() + 10.0;
    let xs: Vec<f64> = (0..n_x)
        .map(|i| -4.0 + 8.0 * i as f64 / (n_x - 1).max(1) as f64)
        .collect();
    let ss: Vec<f64> = (0..n_s)
        .map(|i| s_hi * i as f64 / (n_s - 1).max(1) as f64)
        .collect();

    for &s in &ss {
        for &x in &xs {
            for &u in p.control_grid() {
                let sigma = p.diffusion(s, x, u);
                if sigma * sigma < p.epsilon_floor() {
                    out.push(Violation::NonDegeneracy { s, x, u, sigma_sq: sigma * sigma });
                }
                // envelope bound is over anchors too; anchor 0 and a
                // mid-window anchor cover both discount regimes
                for anchor in [0.0, 0.5 * s] {
                    let g = p.running_cost(d, anchor, s, x, u);
                    let bound = p.cost_bound(s);
                    if !(g >= 0.0 && g <= bound + 1e-12 * bound.abs().max(1.0)) {
                        out.push(Violation::CostEnvelope { anchor, s, x, u, value: g, bound });
                    }
                }
                if p.has_two_time_hook() {
                    // past the splice the hook must be exponential in the lag
                    for lag_extra in [0.0, 1.0, 5.0] {
                        let anchor = s;
                        let s2 = s + d.splice_time() + lag_extra;
                        let got = p.running_cost(d, anchor, s2, x, u);
                        let want =
                            (-d.rate() * (s2 - anchor)).exp() * p.base_cost(s2, x, u);
                        if (got - want).abs() > 1e-10 * want.abs().max(1.0) {
                            out.push(Violation::TwoTimeTail {
                                anchor,
                                s: s2,
                                x,
                                u,
                                got,
                                want,
                            });
                        }
                    }
                }
            }
        }
    }

    let lam0 = d.weight(0.0);
    if (lam0 - 1.0).abs() > 1e-12 {
        out.push(Violation::UnitAtZero { value: lam0 });
    }
    let head_end = if d.splice_time() > 0.0 {
        let t0 = d.splice_time();
        // approach the splice from below
        let tau = t0 * (1.0 - 1e-9);
        d.weight(tau)
    } else {
        1.0
    };
    let tail_start = (-d.rate() * d.splice_time()).exp();
    if (head_end - tail_start).abs() > 1e-6 * tail_start.max(1e-300) {
        out.push(Violation::SpliceContinuity { head: head_end, tail: tail_start });
    }
    let n_tau = budget.max(64);
    let tau_hi = d.splice_time() + 5.0;
    let mut prev = d.weight(0.0);
    for i in 1..=n_tau {
        let tau = tau_hi * i as f64 / n_tau as f64;
        let w = d.weight(tau);
        if !(w < prev) {
            out.push(Violation::DiscountMonotone {
                tau_a: tau_hi * (i - 1) as f64 / n_tau as f64,
                tau_b: tau,
            });
        }
        prev = w;
    }
    out
}
