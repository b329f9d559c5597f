//! Extremal boundary profiles for the functional `L_r(u) = U(rN)`.
//!
//! Over real boundary data with `‖u‖∞ ≤ 1`, `∫u dσ = a` and
//! `∫√(1-u²) dσ ≥ b` the maximizer of `L_r` is zonal. For `b > 0` it is
//! `u = A/√(1+A²)` with
//!
//! ```text
//! A(ω) = (|rN - ω|^{-n} - λ) / μ,     μ > 0,
//! ```
//!
//! where the multipliers `(λ, μ)` solve `R(λ, μ) = a`, `I(λ, μ) = b` for
//! `R = ∫ A/√(1+A²) dσ` and `I = ∫ 1/√(1+A²) dσ`. For `b = 0` the maximizer
//! is `±1` on the two sides of the cap of measure `(1+a)/2` around `N`. For
//! `b < 0` the real part is that of `|b|` and the imaginary part flips sign.
//!
//! All integrands here depend on `ω` only through `t = ω_n`, since
//! `|rN - ω|² = 1 - 2rt + r²`.

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::zonal::{solve_cap_threshold, CapThreshold, ZonalRule, DEFAULT_ORDER};

pub const DEFAULT_TOLERANCE: f64 = 1e-11;
pub const DEFAULT_MAX_ITERATIONS: usize = 100;
/// Largest accepted `a² + b²`; the system degenerates (`μ → ∞`) toward the
/// unit circle.
pub const DEFAULT_NORM_GUARD: f64 = 0.9999;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverOptions {
    /// Gauss points per quadrature panel.
    pub order: usize,
    /// Required `max(|R - a|, |I - b|)`.
    pub tolerance: f64,
    pub max_iterations: usize,
    pub norm_guard: f64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            order: DEFAULT_ORDER,
            tolerance: DEFAULT_TOLERANCE,
            max_iterations: DEFAULT_MAX_ITERATIONS,
            norm_guard: DEFAULT_NORM_GUARD,
        }
    }
}

/// `|rN - ω|^{-n}` as a function of `t = ω_n`.
#[inline]
pub fn kernel_power(dimension: usize, r: f64, t: f64) -> f64 {
    inverse_power(1.0 - 2.0 * r * t + r * r, dimension)
}

/// `q^{-n/2}` without `powf`.
#[inline]
pub(crate) fn inverse_power(q: f64, dimension: usize) -> f64 {
    let p = q.powi(-((dimension / 2) as i32));
    if dimension % 2 == 1 {
        p / q.sqrt()
    } else {
        p
    }
}

pub(crate) fn unit_pair(a: f64) -> (f64, f64) {
    if a.abs() <= 1.0 {
        let s = (1.0 + a * a).sqrt();
        (a / s, 1.0 / s)
    } else {
        let inv = 1.0 / a;
        let s = (1.0 + inv * inv).sqrt();
        (a.signum() / s, inv.abs() / s)
    }
}

fn check_kernel_args(dimension: usize, r: f64, mu: f64) -> Result<()> {
    if dimension < 2 {
        return domain(format!("dimension must be at least 2, got {dimension}"));
    }
    if !(0.0..1.0).contains(&r) {
        return domain(format!("radius {r} outside [0, 1)"));
    }
    if !(mu > 0.0) || !mu.is_finite() {
        return domain(format!("mu must be positive and finite, got {mu}"));
    }
    Ok(())
}

/// `A_{r,λ,μ}` at `t = ω_n`. `r = 0` is accepted as a degenerate limit.
pub fn kernel_a(dimension: usize, r: f64, lambda: f64, mu: f64, t: f64) -> Result<f64> {
    check_kernel_args(dimension, r, mu)?;
    if !(-1.0..=1.0).contains(&t) {
        return domain(format!("t = {t} outside [-1, 1]"));
    }
    Ok((kernel_power(dimension, r, t) - lambda) / mu)
}

/// Partial derivatives of `(R, I)` with respect to `(λ, μ)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Jacobian {
    pub dr_dlambda: f64,
    pub dr_dmu: f64,
    pub di_dlambda: f64,
    pub di_dmu: f64,
}

impl Jacobian {
    pub fn determinant(&self) -> f64 {
        self.dr_dlambda * self.di_dmu - self.dr_dmu * self.di_dlambda
    }
}

#[derive(Debug, Clone, Copy)]
struct Evaluation {
    r_value: f64,
    i_value: f64,
    jacobian: Jacobian,
}

fn evaluate(rule: &ZonalRule, r: f64, lambda: f64, mu: f64) -> Evaluation {
    let n = rule.dimension();
    let (mut sr, mut si, mut v3, mut uv2, mut u2v) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for (&t, &w) in rule.cosines().iter().zip(rule.weights()) {
        let a = (kernel_power(n, r, t) - lambda) / mu;
        let (u, v) = unit_pair(a);
        sr += w * u;
        si += w * v;
        // (1+A²)^{-3/2} = v³, A(1+A²)^{-3/2} = u v², A²(1+A²)^{-3/2} = u² v
        v3 += w * v * v * v;
        uv2 += w * u * v * v;
        u2v += w * u * u * v;
    }
    Evaluation {
        r_value: sr,
        i_value: si,
        jacobian: Jacobian {
            dr_dlambda: -v3 / mu,
            dr_dmu: -uv2 / mu,
            di_dlambda: uv2 / mu,
            di_dmu: u2v / mu,
        },
    }
}

/// `(R(r, λ, μ), I(r, λ, μ))` with the dimension taken from `rule`.
pub fn r_i_values(rule: &ZonalRule, r: f64, lambda: f64, mu: f64) -> Result<(f64, f64)> {
    check_kernel_args(rule.dimension(), r, mu)?;
    let e = evaluate(rule, r, lambda, mu);
    Ok((e.r_value, e.i_value))
}

pub fn jacobian(rule: &ZonalRule, r: f64, lambda: f64, mu: f64) -> Result<Jacobian> {
    check_kernel_args(rule.dimension(), r, mu)?;
    Ok(evaluate(rule, r, lambda, mu).jacobian)
}

/// Location and width (in `t`) of the zero crossing of `A`, where `u`
/// switches between `-1` and `1` on the scale `μ / K'(t*)`.
fn transition(dimension: usize, r: f64, lambda: f64, mu: f64) -> Option<(f64, f64)> {
    if r <= 0.0 || lambda <= 0.0 {
        return None;
    }
    let nf = dimension as f64;
    let level = lambda.powf(-2.0 / nf);
    let crossing = (1.0 + r * r - level) / (2.0 * r);
    let center = crossing.clamp(-1.0 + 1e-12, 1.0 - 1e-12);
    let k = kernel_power(dimension, r, center);
    let slope = nf * r * k / (1.0 - 2.0 * r * center + r * r);
    let width = mu.hypot(k - lambda) / slope;
    (width < 1.0).then_some((center, width))
}

/// Quadrature rule refined around the transition of `A_{r,λ,μ}`.
pub fn adapted_rule(
    dimension: usize,
    r: f64,
    lambda: f64,
    mu: f64,
    order: usize,
) -> Result<ZonalRule> {
    let transitions: Vec<(f64, f64)> = transition(dimension, r, lambda, mu).into_iter().collect();
    ZonalRule::graded(dimension, order, &[], &transitions)
}

/// Solved multipliers with convergence metadata.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LagrangeParams {
    pub lambda: f64,
    pub mu: f64,
    /// `(R - a, I - b)` at the returned point.
    pub residual: (f64, f64),
    pub iterations: usize,
}

impl LagrangeParams {
    pub fn residual_norm(&self) -> f64 {
        self.residual.0.abs().max(self.residual.1.abs())
    }
}

fn check_moments(a: f64, b: f64, guard: f64) -> Result<()> {
    if !a.is_finite() || !b.is_finite() {
        return domain("moments must be finite");
    }
    let norm2 = a * a + b * b;
    if norm2 >= 1.0 {
        return domain(format!("a² + b² = {norm2} must be below 1"));
    }
    if norm2 > guard {
        return domain(format!(
            "a² + b² = {norm2} exceeds the conditioning guard {guard}"
        ));
    }
    Ok(())
}

fn check_radius(r: f64) -> Result<()> {
    if !(r > 0.0 && r < 1.0) {
        return domain(format!("radius {r} outside (0, 1)"));
    }
    Ok(())
}

pub fn solve_lagrange(dimension: usize, r: f64, a: f64, b: f64) -> Result<LagrangeParams> {
    solve_lagrange_with(dimension, r, a, b, &SolverOptions::default())
}

pub fn solve_lagrange_with(
    dimension: usize,
    r: f64,
    a: f64,
    b: f64,
    options: &SolverOptions,
) -> Result<LagrangeParams> {
    solve_lagrange_from(dimension, r, a, b, None, options)
}

/// Solve `R = a`, `I = b`, starting Newton from `start = (λ, μ)` when given.
pub fn solve_lagrange_from(
    dimension: usize,
    r: f64,
    a: f64,
    b: f64,
    start: Option<(f64, f64)>,
    options: &SolverOptions,
) -> Result<LagrangeParams> {
    if dimension < 2 {
        return domain(format!("dimension must be at least 2, got {dimension}"));
    }
    check_radius(r)?;
    if !(b > 0.0) {
        return domain(format!(
            "b = {b} must be positive (b = 0 is the cap profile)"
        ));
    }
    check_moments(a, b, options.norm_guard)?;
    let (lambda, nu) = match start {
        Some((l, m)) if l.is_finite() && m > 0.0 && m.is_finite() => (l, m.ln()),
        _ => initial_guess(dimension, r, a, b, options)?,
    };
    let direct = SolverOptions {
        max_iterations: options.max_iterations.min(DIRECT_NEWTON_ITERATIONS),
        ..*options
    };
    match newton(dimension, r, a, b, lambda, nu, &direct) {
        Ok(params) => Ok(params),
        Err(Error::SolverFailure { .. }) => {
            // Near the unit circle the solution curve bends sharply in
            // (λ, log μ) and plain Newton crawls; the monotone nested
            // solves converge from anywhere and Newton finishes.
            let (lambda, nu) = nested_solve(dimension, r, a, b, lambda, nu, options)?;
            newton(dimension, r, a, b, lambda, nu, options)
        }
        Err(e) => Err(e),
    }
}

/// Iteration budget for Newton before switching to nested solves.
const DIRECT_NEWTON_ITERATIONS: usize = 25;

fn initial_guess(
    dimension: usize,
    r: f64,
    a: f64,
    b: f64,
    options: &SolverOptions,
) -> Result<(f64, f64)> {
    let ceiling = (1.0 - a * a).sqrt();
    if b >= 0.8 * ceiling {
        // large-μ asymptote: A ≈ t₀ uniformly, shifted by the kernel mean.
        // (λ, μ) scale with the kernel, so "large" is relative to its span.
        let t0 = a / ceiling;
        let span = kernel_power(dimension, r, 1.0) - kernel_power(dimension, r, -1.0);
        let mu0 = 10.0 * span;
        let mean_kernel =
            ZonalRule::new(dimension, options.order)?.integrate(|t| kernel_power(dimension, r, t));
        return Ok((mean_kernel - t0 * mu0, mu0.ln()));
    }
    // cap asymptote: λ at the kernel level of the cap boundary, μ by
    // bisection on the increasing map μ ↦ I(λ₀, μ)
    let lambda0 = solve_cap_threshold(dimension, a)?.kernel_level(r);
    let (mut lo, mut hi) = ((1e-15f64).ln(), (1e6f64).ln());
    while hi - lo > 0.05 {
        let mid = 0.5 * (lo + hi);
        let mu = mid.exp();
        let rule = adapted_rule(dimension, r, lambda0, mu, options.order)?;
        let (_, i) = r_i_values(&rule, r, lambda0, mu)?;
        if i < b {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok((lambda0, 0.5 * (lo + hi)))
}

/// Damped Newton in `(λ, log μ)` with backtracking on `‖(R-a, I-b)‖²`.
fn newton(
    dimension: usize,
    r: f64,
    a: f64,
    b: f64,
    mut lambda: f64,
    mut nu: f64,
    options: &SolverOptions,
) -> Result<LagrangeParams> {
    let at = |lambda: f64, nu: f64| -> Result<Evaluation> {
        let mu = nu.exp();
        let rule = adapted_rule(dimension, r, lambda, mu, options.order)?;
        Ok(evaluate(&rule, r, lambda, mu))
    };
    let kernel_span = kernel_power(dimension, r, 1.0) - kernel_power(dimension, r, -1.0);
    let mut current = at(lambda, nu)?;
    for iteration in 0..=options.max_iterations {
        let f = (current.r_value - a, current.i_value - b);
        if f.0.abs() < options.tolerance && f.1.abs() < options.tolerance {
            return Ok(LagrangeParams {
                lambda,
                mu: nu.exp(),
                residual: f,
                iterations: iteration,
            });
        }
        if iteration == options.max_iterations {
            break;
        }
        let mu = nu.exp();
        let jac = current.jacobian;
        let (j00, j01) = (jac.dr_dlambda, mu * jac.dr_dmu);
        let (j10, j11) = (jac.di_dlambda, mu * jac.di_dmu);
        let det = j00 * j11 - j01 * j10;
        if !(det < 0.0) || !det.is_finite() {
            break;
        }
        let mut d_lambda = (-f.0 * j11 + f.1 * j01) / det;
        let mut d_nu = (-f.1 * j00 + f.0 * j10) / det;
        let lambda_cap = 10.0 * (kernel_span + mu);
        let scale = 1.0f64
            .min(2.0 / d_nu.abs().max(f64::MIN_POSITIVE))
            .min(lambda_cap / d_lambda.abs().max(f64::MIN_POSITIVE));
        d_lambda *= scale;
        d_nu *= scale;

        let merit = f.0 * f.0 + f.1 * f.1;
        let mut step = 1.0;
        let mut accepted = None;
        for _ in 0..40 {
            let (l, v) = (lambda + step * d_lambda, nu + step * d_nu);
            let trial = at(l, v)?;
            let g = (trial.r_value - a, trial.i_value - b);
            if g.0 * g.0 + g.1 * g.1 <= (1.0 - 1e-4 * step) * merit {
                accepted = Some((l, v, trial));
                break;
            }
            step *= 0.5;
        }
        match accepted {
            Some((l, v, trial)) => {
                lambda = l;
                nu = v;
                current = trial;
            }
            None => break,
        }
    }
    Err(Error::SolverFailure {
        iterations: options.max_iterations,
        residual_r: current.r_value - a,
        residual_i: current.i_value - b,
    })
}

fn evaluate_adapted(
    dimension: usize,
    r: f64,
    lambda: f64,
    mu: f64,
    order: usize,
) -> Result<Evaluation> {
    let rule = adapted_rule(dimension, r, lambda, mu, order)?;
    Ok(evaluate(&rule, r, lambda, mu))
}

/// Root of a monotone function by Newton steps kept inside an expanding
/// bracket, falling back to bisection. `value` returns `(g(x), g'(x))`;
/// `increasing` gives the sign of `g'`.
fn safeguarded_root<F>(
    mut x: f64,
    increasing: bool,
    scale: f64,
    tolerance: f64,
    max_steps: usize,
    mut value: F,
) -> Result<Option<f64>>
where
    F: FnMut(f64) -> Result<(f64, f64)>,
{
    // `below < root < above` once both sides are known
    let orient = if increasing { 1.0 } else { -1.0 };
    let (mut below, mut above) = (f64::NEG_INFINITY, f64::INFINITY);
    let mut reach = scale;
    let mut dx = f64::INFINITY;
    for _ in 0..max_steps {
        let (g, dg) = value(x)?;
        if g.abs() < tolerance {
            return Ok(Some(x));
        }
        if orient * g < 0.0 {
            below = x;
        } else {
            above = x;
        }
        let step = -g / dg;
        let bracketed = below.is_finite() && above.is_finite();
        x = if bracketed {
            let gap = above - below;
            if gap <= 4.0 * f64::EPSILON * x.abs().max(1.0) {
                return Ok(Some(x));
            }
            let newton = x + step;
            if newton > below && newton < above && step.abs() <= 0.5 * dx {
                dx = step.abs();
                newton
            } else {
                dx = 0.5 * gap;
                below + dx
            }
        } else {
            let toward = if below.is_finite() { 1.0 } else { -1.0 };
            if step.is_finite() && step * toward > 0.0 && step.abs() <= reach {
                x + step
            } else {
                let jump = toward * reach;
                reach *= 2.0;
                x + jump
            }
        };
    }
    Ok(None)
}

/// `(λ, log μ)` with `R = a`, `I = b` via the monotone maps
/// `λ ↦ R(λ, μ)` (decreasing) and `μ ↦ I(λ(μ, a), μ)` (increasing).
fn nested_solve(
    dimension: usize,
    r: f64,
    a: f64,
    b: f64,
    lambda0: f64,
    nu0: f64,
    options: &SolverOptions,
) -> Result<(f64, f64)> {
    let span = kernel_power(dimension, r, 1.0) - kernel_power(dimension, r, -1.0);
    let failure = |lambda: f64, nu: f64| -> Error {
        match evaluate_adapted(dimension, r, lambda, nu.exp(), options.order) {
            Ok(e) => Error::SolverFailure {
                iterations: options.max_iterations,
                residual_r: e.r_value - a,
                residual_i: e.i_value - b,
            },
            Err(err) => err,
        }
    };
    let inner_tolerance = 0.05 * options.tolerance;
    let max_steps = 4 * options.max_iterations;
    let inner = |nu: f64, guess: f64| -> Result<Option<f64>> {
        let mu = nu.exp();
        safeguarded_root(
            guess,
            false,
            span + mu,
            inner_tolerance,
            max_steps,
            |lambda| {
                let e = evaluate_adapted(dimension, r, lambda, mu, options.order)?;
                Ok((e.r_value - a, e.jacobian.dr_dlambda))
            },
        )
    };
    let mut lambda = lambda0;
    let mut last_nu = nu0;
    let outer = safeguarded_root(nu0, true, 2.0, 0.5 * options.tolerance, max_steps, |nu| {
        // the previous λ(μ, a) seeds the next inner solve
        let solved = inner(nu, lambda)?.ok_or_else(|| failure(lambda, nu))?;
        lambda = solved;
        last_nu = nu;
        let mu = nu.exp();
        let e = evaluate_adapted(dimension, r, solved, mu, options.order)?;
        // a rounded-away determinant only costs the Newton step
        let det = e.jacobian.determinant();
        let slope = if det < 0.0 {
            mu * det / e.jacobian.dr_dlambda
        } else {
            f64::NAN
        };
        Ok((e.i_value - b, slope))
    })?;
    match outer {
        Some(nu) => Ok((lambda, nu)),
        None => Err(failure(lambda, last_nu)),
    }
}

/// `λ(μ, a)`: the unique `λ` with `R(r, λ, μ) = a` at fixed `μ`.
pub fn solve_lambda_at_mu(
    dimension: usize,
    r: f64,
    a: f64,
    mu: f64,
    options: &SolverOptions,
) -> Result<f64> {
    check_kernel_args(dimension, r, mu)?;
    if !(a > -1.0 && a < 1.0) {
        return domain(format!("a = {a} must lie in (-1, 1)"));
    }
    let r_at = |lambda: f64| -> Result<f64> {
        let rule = adapted_rule(dimension, r, lambda, mu, options.order)?;
        Ok(r_i_values(&rule, r, lambda, mu)?.0)
    };
    // R decreases from 1 to -1 in λ; expand a bracket around the kernel range
    let k_hi = kernel_power(dimension, r, 1.0);
    let k_lo = kernel_power(dimension, r, -1.0);
    let mut lo = k_lo - mu;
    let mut hi = k_hi + mu;
    let mut width = k_hi - k_lo + mu;
    while r_at(lo)? < a {
        lo -= width;
        width *= 2.0;
    }
    let mut width = k_hi - k_lo + mu;
    while r_at(hi)? > a {
        hi += width;
        width *= 2.0;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let value = r_at(mid)?;
        if (value - a).abs() < 0.1 * options.tolerance {
            return Ok(mid);
        }
        if value > a {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum ProfileKind {
    /// `u = A/√(1+A²)` with solved multipliers.
    Smooth(LagrangeParams),
    /// `u = ±1` outside/inside the cap boundary circle.
    Cap(CapThreshold),
}

/// The extremal boundary function `u_{a,b,r}` and its companion
/// `v = √(1-u²)`, which enters the imaginary part with sign `sign_b`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExtremalProfile {
    pub dimension: usize,
    pub r: f64,
    pub a: f64,
    pub b: f64,
    pub kind: ProfileKind,
    pub sign_b: i8,
    pub order: usize,
}

impl ExtremalProfile {
    pub fn is_cap(&self) -> bool {
        matches!(self.kind, ProfileKind::Cap(_))
    }

    pub fn u(&self, t: f64) -> f64 {
        match self.kind {
            ProfileKind::Smooth(p) => {
                unit_pair((kernel_power(self.dimension, self.r, t) - p.lambda) / p.mu).0
            }
            ProfileKind::Cap(c) => {
                if t > c.t_a {
                    1.0
                } else if t < c.t_a {
                    -1.0
                } else {
                    0.0
                }
            }
        }
    }

    /// `√(1 - u(t)²) ≥ 0`, before the sign of `b` is applied.
    pub fn v(&self, t: f64) -> f64 {
        match self.kind {
            ProfileKind::Smooth(p) => {
                unit_pair((kernel_power(self.dimension, self.r, t) - p.lambda) / p.mu).1
            }
            ProfileKind::Cap(c) => {
                if t == c.t_a {
                    1.0
                } else {
                    0.0
                }
            }
        }
    }

    /// Boundary value of the imaginary part, `sign_b · v(t)`.
    pub fn signed_v(&self, t: f64) -> f64 {
        f64::from(self.sign_b) * self.v(t)
    }

    /// The breakpoint of a cap profile, if any.
    pub fn breakpoint(&self) -> Option<f64> {
        match self.kind {
            ProfileKind::Cap(c) => Some(c.t_a),
            ProfileKind::Smooth(_) => None,
        }
    }

    /// Jump locations and `(center, width)` transition layers in `t`.
    pub fn refinement(&self) -> (Vec<f64>, Vec<(f64, f64)>) {
        match self.kind {
            ProfileKind::Smooth(p) => (
                Vec::new(),
                transition(self.dimension, self.r, p.lambda, p.mu)
                    .into_iter()
                    .collect(),
            ),
            ProfileKind::Cap(c) => (vec![c.t_a], Vec::new()),
        }
    }

    /// Quadrature rule resolving the profile's jump or transition layer.
    pub fn rule(&self) -> ZonalRule {
        let (breakpoints, transitions) = self.refinement();
        ZonalRule::graded(self.dimension, self.order, &breakpoints, &transitions)
            .expect("profile parameters were validated at construction")
    }

    /// `(∫u dσ, sign_b ∫v dσ)`, which reproduce `(a, b)`.
    pub fn moments(&self) -> (f64, f64) {
        let rule = self.rule();
        (
            rule.integrate(|t| self.u(t)),
            rule.integrate(|t| self.signed_v(t)),
        )
    }
}

pub fn build_extremal(dimension: usize, r: f64, a: f64, b: f64) -> Result<ExtremalProfile> {
    build_extremal_with(dimension, r, a, b, None, &SolverOptions::default())
}

/// Build `u_{a,b,r}`; `start` seeds the multiplier solve for `b ≠ 0`.
pub fn build_extremal_with(
    dimension: usize,
    r: f64,
    a: f64,
    b: f64,
    start: Option<(f64, f64)>,
    options: &SolverOptions,
) -> Result<ExtremalProfile> {
    if dimension < 2 {
        return domain(format!("dimension must be at least 2, got {dimension}"));
    }
    check_radius(r)?;
    check_moments(a, b, options.norm_guard)?;
    let (kind, sign_b) = if b == 0.0 {
        (ProfileKind::Cap(solve_cap_threshold(dimension, a)?), 0)
    } else {
        let params = solve_lagrange_from(dimension, r, a, b.abs(), start, options)?;
        (ProfileKind::Smooth(params), if b > 0.0 { 1 } else { -1 })
    };
    Ok(ExtremalProfile {
        dimension,
        r,
        a,
        b,
        kind,
        sign_b,
        order: options.order,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::PI;

    #[test]
    fn kernel_a_examples() {
        for n in 2..6 {
            assert_abs_diff_eq!(kernel_a(n, 0.0, 0.0, 1.0, 0.3).unwrap(), 1.0);
        }
        assert_abs_diff_eq!(
            kernel_a(2, 0.5, 0.0, 1.0, 1.0).unwrap(),
            4.0,
            epsilon = 1e-14
        );
        let direct = 2.0 * (1.25f64.powf(-1.5) - 2.0);
        assert_abs_diff_eq!(
            kernel_a(3, 0.5, 2.0, 0.5, 0.0).unwrap(),
            direct,
            epsilon = 1e-14
        );
        assert_abs_diff_eq!(direct, -2.5689, epsilon = 1e-4);
        assert!(kernel_a(3, 0.5, 0.0, 0.0, 0.0).is_err());
        assert!(kernel_a(3, 0.5, 0.0, -1.0, 0.0).is_err());
    }

    #[test]
    fn kernel_a_increases_toward_the_pole() {
        let mut prev = f64::NEG_INFINITY;
        for k in 0..=100 {
            let t = -1.0 + 0.02 * k as f64;
            let a = kernel_a(4, 0.6, 1.3, 0.7, t).unwrap();
            assert!(a > prev);
            prev = a;
        }
    }

    #[test]
    fn unit_pair_is_stable() {
        for &a in &[0.0, 0.5, -0.9, 3.0, -1e8, 1e200, -1e300] {
            let (u, v) = unit_pair(a);
            assert!((u * u + v * v - 1.0).abs() < 1e-15);
            assert!(v >= 0.0 && u.abs() <= 1.0);
        }
        assert_eq!(unit_pair(1e300).0, 1.0);
    }

    #[test]
    fn r_i_degenerate_radius() {
        let rule = ZonalRule::new(3, 16).unwrap();
        let (r, i) = r_i_values(&rule, 0.0, 0.0, 1.0).unwrap();
        assert_abs_diff_eq!(r, std::f64::consts::FRAC_1_SQRT_2, epsilon = 1e-14);
        assert_abs_diff_eq!(i, std::f64::consts::FRAC_1_SQRT_2, epsilon = 1e-14);
        let j = jacobian(&rule, 0.0, 0.0, 1.0).unwrap();
        assert_abs_diff_eq!(j.dr_dlambda, -(0.5f64).powf(1.5), epsilon = 1e-14);
        assert_abs_diff_eq!(j.dr_dlambda, -0.35355339, epsilon = 1e-8);
    }

    #[test]
    fn r_saturates_for_extreme_lambda() {
        let rule = ZonalRule::new(3, 64).unwrap();
        let (r, i) = r_i_values(&rule, 0.5, -1e6, 1.0).unwrap();
        assert!(r > 0.999999);
        assert!(i > 0.0 && i < 1.0);
        let (r, _) = r_i_values(&rule, 0.5, 1e6, 1.0).unwrap();
        assert!(r < -0.999999);
    }

    #[test]
    fn r_i_against_brute_force_trapezoid() {
        // n = 2: σ is dθ/2π on the circle; a periodic trapezoid sum with 10⁶
        // points is an independent reference.
        let (r, lambda, mu) = (0.5, 1.0, 1.0);
        let samples = 1_000_000;
        let (mut rs, mut is) = (0.0, 0.0);
        for k in 0..samples {
            let theta = 2.0 * PI * k as f64 / samples as f64;
            let dist2 = 1.0 - 2.0 * r * theta.cos() + r * r;
            let a = (1.0 / dist2 - lambda) / mu;
            let s = (1.0 + a * a).sqrt();
            rs += a / s;
            is += 1.0 / s;
        }
        rs /= samples as f64;
        is /= samples as f64;
        let rule = adapted_rule(2, r, lambda, mu, 64).unwrap();
        let (rv, iv) = r_i_values(&rule, r, lambda, mu).unwrap();
        assert_abs_diff_eq!(rv, rs, epsilon = 1e-9);
        assert_abs_diff_eq!(iv, is, epsilon = 1e-9);
    }

    #[test]
    fn jacobian_matches_central_differences() {
        for n in 2..=4 {
            for &(r, lambda, mu) in &[(0.5, 1.0, 1.0), (0.3, 0.2, 0.3), (0.7, 5.0, 2.0)] {
                let rule = adapted_rule(n, r, lambda, mu, 64).unwrap();
                let j = jacobian(&rule, r, lambda, mu).unwrap();
                let hl = 1e-6 * lambda.abs().max(1.0);
                let hm = 1e-6 * mu;
                let (rp, ip) = r_i_values(&rule, r, lambda + hl, mu).unwrap();
                let (rm, im) = r_i_values(&rule, r, lambda - hl, mu).unwrap();
                let fd_rl = (rp - rm) / (2.0 * hl);
                let fd_il = (ip - im) / (2.0 * hl);
                let (rp, ip) = r_i_values(&rule, r, lambda, mu + hm).unwrap();
                let (rm, im) = r_i_values(&rule, r, lambda, mu - hm).unwrap();
                let fd_rm = (rp - rm) / (2.0 * hm);
                let fd_im = (ip - im) / (2.0 * hm);
                for (analytic, fd) in [
                    (j.dr_dlambda, fd_rl),
                    (j.di_dlambda, fd_il),
                    (j.dr_dmu, fd_rm),
                    (j.di_dmu, fd_im),
                ] {
                    assert!(
                        (analytic - fd).abs() <= 1e-5 * analytic.abs(),
                        "{analytic} vs {fd}"
                    );
                }
                assert!(j.determinant() < 0.0);
                assert!(j.dr_dlambda < 0.0);
                assert!(j.di_dmu >= 0.0);
                assert_eq!(j.dr_dmu, -j.di_dlambda);
            }
        }
    }

    #[test]
    fn solve_reaches_tolerance() {
        let p = solve_lagrange(3, 0.5, 0.3, 0.4).unwrap();
        assert!(p.residual_norm() < 1e-11, "{p:?}");
        assert!(p.mu > 0.0);
        let again = solve_lagrange(3, 0.5, 0.3, 0.4).unwrap();
        assert_eq!(p, again);
    }

    #[test]
    fn solve_near_the_circle_has_large_mu() {
        let p = solve_lagrange(2, 0.5, 0.0, 0.99).unwrap();
        assert!(p.residual_norm() < 1e-11);
        assert!(p.mu > 1.0, "{p:?}");
        let rule = adapted_rule(2, 0.5, p.lambda, p.mu, 64).unwrap();
        let (_, i) = r_i_values(&rule, 0.5, p.lambda, p.mu).unwrap();
        assert!((i - 0.99).abs() < 1e-3);
    }

    #[test]
    fn small_b_approaches_the_cap_multiplier() {
        let p = solve_lagrange(2, 0.5, 0.3, 1e-3).unwrap();
        let cap = solve_cap_threshold(2, 0.3).unwrap();
        let level = cap.kernel_level(0.5);
        assert!((p.lambda - level).abs() < 1e-2, "{} vs {}", p.lambda, level);
        assert!(p.mu < 0.05);
    }

    #[test]
    fn solve_rejects_invalid_input() {
        assert!(matches!(
            solve_lagrange(3, 0.5, 0.3, 0.0),
            Err(Error::Domain(_))
        ));
        assert!(matches!(
            solve_lagrange(3, 0.5, 0.8, 0.7),
            Err(Error::Domain(_))
        ));
        assert!(matches!(
            solve_lagrange(3, 1.0, 0.1, 0.1),
            Err(Error::Domain(_))
        ));
        assert!(matches!(
            solve_lagrange(3, 0.5, 0.0, 0.99995),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn exhausted_iterations_report_residual() {
        let options = SolverOptions {
            max_iterations: 0,
            ..SolverOptions::default()
        };
        match solve_lagrange_with(3, 0.5, 0.3, 0.4, &options) {
            Err(Error::SolverFailure {
                residual_r,
                residual_i,
                ..
            }) => assert!(residual_r.abs().max(residual_i.abs()) > 1e-11),
            other => panic!("expected solver failure, got {other:?}"),
        }
    }

    #[test]
    fn symmetric_cap_profile() {
        let p = build_extremal(2, 0.5, 0.0, 0.0).unwrap();
        assert!(p.is_cap());
        assert_eq!(p.breakpoint(), Some(0.0));
        assert_eq!(p.u(0.3), 1.0);
        assert_eq!(p.u(-0.3), -1.0);
        assert_eq!(p.sign_b, 0);
    }

    #[test]
    fn profile_moments_and_reflection() {
        let up = build_extremal(3, 0.5, 0.3, 0.4).unwrap();
        let (ma, mb) = up.moments();
        assert_abs_diff_eq!(ma, 0.3, epsilon = 1e-8);
        assert_abs_diff_eq!(mb, 0.4, epsilon = 1e-8);
        let down = build_extremal(3, 0.5, 0.3, -0.4).unwrap();
        assert_eq!(down.sign_b, -1);
        let (da, db) = down.moments();
        assert_abs_diff_eq!(da, 0.3, epsilon = 1e-8);
        assert_abs_diff_eq!(db, -0.4, epsilon = 1e-8);
        for k in 0..=20 {
            let t = -1.0 + 0.1 * k as f64;
            assert_eq!(up.u(t), down.u(t));
            assert_eq!(up.signed_v(t), -down.signed_v(t));
        }
    }

    #[test]
    fn lambda_at_fixed_mu_solves_r() {
        let options = SolverOptions::default();
        for &mu in &[0.1, 1.0, 10.0] {
            let lambda = solve_lambda_at_mu(3, 0.5, 0.3, mu, &options).unwrap();
            let rule = adapted_rule(3, 0.5, lambda, mu, 64).unwrap();
            let (r, _) = r_i_values(&rule, 0.5, lambda, mu).unwrap();
            assert!((r - 0.3).abs() < 1e-11);
        }
    }

    proptest::proptest! {
        #![proptest_config(proptest::prelude::ProptestConfig::with_cases(24))]
        #[test]
        fn built_profiles_reproduce_their_moments(
            n in 2usize..5,
            r in 0.1f64..0.9,
            radius in 0.0f64..0.95,
            angle in -3.1f64..3.1,
        ) {
            let (a, b) = (radius * angle.cos(), radius * angle.sin());
            let p = build_extremal(n, r, a, b).unwrap();
            let (ma, mb) = p.moments();
            proptest::prop_assert!((ma - a).abs() < 1e-8);
            proptest::prop_assert!((mb - b).abs() < 1e-8);
            for k in 0..=40 {
                let t = -1.0 + 0.05 * k as f64;
                let (u, v) = (p.u(t), p.v(t));
                proptest::prop_assert!(u.abs() <= 1.0 && v >= 0.0);
                proptest::prop_assert!((u * u + v * v - 1.0).abs() < 1e-12 || p.is_cap());
            }
        }
    }
}
