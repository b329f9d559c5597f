//! Independent checks of the extremal machinery.
//!
//! * [`discretized_max`] maximizes `L_r` over piecewise-constant boundary
//!   data by a log-barrier interior-point method, without using the
//!   extremal formula.
//! * [`random_harmonic`] and [`containment_trial`] test value-region
//!   containment of values on random bounded harmonic functions.
//! * [`claim_checks`] samples the structural claims about `R`, `I`, the
//!   Jacobian and the extremal profiles.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::extremal::{
    adapted_rule, build_extremal, jacobian, kernel_power, r_i_values, solve_lagrange,
    solve_lambda_at_mu, SolverOptions,
};
use crate::poisson::{evaluate_f_on_axis, evaluate_poisson_general, BoundaryData, Cap, CapSum};
use crate::region::{build_region, WitnessSpec, DEFAULT_BETA_SAMPLES};
use crate::zonal::{cap_measure, solve_cap_threshold, ZonalRule};

/// Gauss points per bin when averaging the kernel.
const BIN_ORDER: usize = 8;
/// Stop when the barrier duality-gap bound falls below this.
const BARRIER_GAP: f64 = 1e-8;

/// Piecewise-constant boundary data on `M` bins of equal measure, bin `i`
/// covering `t ∈ (edges[i+1], edges[i])`.
#[derive(Debug, Clone)]
pub struct DiscretizedClass {
    pub dimension: usize,
    pub r: f64,
    pub edges: Vec<f64>,
    pub weights: Vec<f64>,
    /// Bin averages of the Poisson kernel at `rN`.
    pub kernel: Vec<f64>,
}

/// Maximizer found by [`DiscretizedClass::maximize`].
#[derive(Debug, Clone)]
pub struct DiscreteOptimum {
    pub value: f64,
    pub u: Vec<f64>,
    /// Upper bound on the distance to the discrete optimum.
    pub gap: f64,
    pub newton_steps: usize,
}

impl DiscretizedClass {
    pub fn new(dimension: usize, r: f64, bins: usize) -> Result<Self> {
        if !(r > 0.0 && r < 1.0) {
            return domain(format!("radius {r} outside (0, 1)"));
        }
        if bins < 2 {
            return domain("need at least two bins");
        }
        let mut edges = Vec::with_capacity(bins + 1);
        edges.push(1.0);
        for j in 1..bins {
            let a = 2.0 * j as f64 / bins as f64 - 1.0;
            edges.push(solve_cap_threshold(dimension, a)?.t_a);
        }
        edges.push(-1.0);
        let weights = edges
            .windows(2)
            .map(|e| Ok(cap_measure(dimension, e[1])? - cap_measure(dimension, e[0])?))
            .collect::<Result<Vec<f64>>>()?;
        let thetas: Vec<f64> = edges.iter().map(|t| t.acos()).collect();
        let rule = ZonalRule::from_edges(dimension, BIN_ORDER, &thetas)?;
        let scale = 1.0 - r * r;
        let kernel = rule
            .cosines()
            .chunks(BIN_ORDER)
            .zip(rule.weights().chunks(BIN_ORDER))
            .map(|(t, w)| {
                let mass: f64 = w.iter().sum();
                let integral: f64 = t
                    .iter()
                    .zip(w)
                    .map(|(&t, &w)| w * scale * kernel_power(dimension, r, t))
                    .sum();
                integral / mass
            })
            .collect();
        Ok(Self {
            dimension,
            r,
            edges,
            weights,
            kernel,
        })
    }

    /// `max Σ wᵢkᵢuᵢ` over `|uᵢ| ≤ 1`, `Σ wᵢuᵢ = a`, `Σ wᵢ√(1-uᵢ²) ≥ |b|`.
    ///
    /// Newton steps on the log barrier drive `Σ wᵢuᵢ` to `a`; the Hessian
    /// is diagonal plus rank one and is inverted by Sherman-Morrison. The
    /// distances `1 - uᵢ` and `1 + uᵢ` are carried separately so they keep
    /// full relative precision at the bounds.
    pub fn maximize(&self, a: f64, b: f64) -> Result<DiscreteOptimum> {
        if !(a > -1.0 && a < 1.0) {
            return Err(Error::Infeasible(format!("mean {a} needs |a| < 1")));
        }
        // v = ±√(1-u²) reaches mean b exactly when Σw√(1-u²) ≥ |b|
        let b = b.abs();
        if !((1.0 - a * a).sqrt() > b) {
            return Err(Error::Infeasible(format!(
                "no strictly feasible point: √(1-a²) = {} ≤ |b| = {b}",
                (1.0 - a * a).sqrt()
            )));
        }
        let total: f64 = self.weights.iter().sum();
        let w: Vec<f64> = self.weights.iter().map(|x| x / total).collect();
        let k = &self.kernel;
        let m = w.len();
        let dot = |x: &[f64], y: &[f64]| x.iter().zip(y).map(|(p, q)| p * q).sum::<f64>();

        let mut state = BarrierState {
            u: vec![a; m],
            hi: vec![1.0 - a; m],
            lo: vec![1.0 + a; m],
        };
        let slack = |s: &BarrierState| dot(&w, &s.roots()) - b;
        let feasible =
            |s: &BarrierState| s.hi.iter().chain(&s.lo).all(|&d| d > 0.0) && slack(s) > 0.0;
        let barrier = |s: &BarrierState, tau: f64| -> f64 {
            let walls: f64 =
                s.hi.iter()
                    .zip(&s.lo)
                    .zip(&w)
                    .map(|((h, l), wi)| wi * (h.ln() + l.ln()))
                    .sum();
            -dot(
                &s.u,
                &w.iter().zip(k).map(|(wi, ki)| wi * ki).collect::<Vec<_>>(),
            ) - tau * (walls + slack(s).ln())
        };

        let mut tau = 0.1;
        let mut steps = 0;
        let mut grad = vec![0.0; m];
        let mut diag = vec![0.0; m];
        let mut cgrad = vec![0.0; m];
        loop {
            let mut done = false;
            for iteration in 0..=100 {
                done |= iteration == 100;
                let c = slack(&state);
                let roots = state.roots();
                for i in 0..m {
                    let (x, hi, lo, root) = (state.u[i], state.hi[i], state.lo[i], roots[i]);
                    cgrad[i] = -w[i] * x / root;
                    grad[i] = -w[i] * k[i] - tau * (w[i] * (1.0 / lo - 1.0 / hi) + cgrad[i] / c);
                    diag[i] = tau
                        * w[i]
                        * (1.0 / (hi * hi) + 1.0 / (lo * lo) + 1.0 / (hi * lo * root * c));
                }
                // H = diag + ρ g gᵀ with ρ = τ/c²
                let rho = tau / (c * c);
                let dinv_g: Vec<f64> = cgrad.iter().zip(&diag).map(|(g, d)| g / d).collect();
                let g_dinv_g = dot(&cgrad, &dinv_g);
                let solve = |rhs: &[f64]| -> Vec<f64> {
                    let dinv_rhs: Vec<f64> = rhs.iter().zip(&diag).map(|(r, d)| r / d).collect();
                    let factor = rho * dot(&cgrad, &dinv_rhs) / (1.0 + rho * g_dinv_g);
                    dinv_rhs
                        .iter()
                        .zip(&dinv_g)
                        .map(|(x, y)| x - factor * y)
                        .collect()
                };
                let h_grad = solve(&grad);
                let h_w = solve(&w);
                // minimal correction of the rounding drift in Σwu, then a tangent step
                let w_hw = dot(&w, &h_w);
                let drift = a - dot(&state.u, &w);
                let corrected = state.moved(&h_w, drift / w_hw);
                if feasible(&corrected) {
                    state = corrected;
                }
                if done {
                    break;
                }
                let nu = -dot(&w, &h_grad) / w_hw;
                let step: Vec<f64> = h_grad
                    .iter()
                    .zip(&h_w)
                    .map(|(g, hw)| -(g + nu * hw))
                    .collect();
                let decrement = -dot(&grad, &step);
                if decrement < 1e-15 {
                    done = true;
                    continue;
                }
                let current = barrier(&state, tau);
                let mut t = 1.0;
                let trial = loop {
                    let trial = state.moved(&step, t);
                    if feasible(&trial) && barrier(&trial, tau) <= current - 0.25 * t * decrement {
                        break Some(trial);
                    }
                    t *= 0.5;
                    if t < 1e-12 {
                        break None;
                    }
                };
                match trial {
                    Some(next) => {
                        state = next;
                        steps += 1;
                    }
                    // rounding floor of the barrier for this τ
                    None => done = true,
                }
            }
            // weighted bound pairs contribute 2τ, the slack barrier τ
            let gap = 3.0 * tau;
            if gap < BARRIER_GAP {
                let mean = dot(&state.u, &w);
                if !feasible(&state) || (mean - a).abs() > 1e-10 {
                    return Err(Error::Internal(format!(
                        "barrier iterate not certified: mean error {:e}, slack {:e}",
                        mean - a,
                        slack(&state)
                    )));
                }
                let value = state
                    .u
                    .iter()
                    .zip(&w)
                    .zip(k)
                    .map(|((x, wi), ki)| wi * ki * x)
                    .sum();
                return Ok(DiscreteOptimum {
                    value,
                    u: state.u,
                    gap,
                    newton_steps: steps,
                });
            }
            tau *= 0.1;
        }
    }
}

/// Iterate of the barrier method with its distances to the bounds.
struct BarrierState {
    u: Vec<f64>,
    hi: Vec<f64>,
    lo: Vec<f64>,
}

impl BarrierState {
    fn roots(&self) -> Vec<f64> {
        self.hi
            .iter()
            .zip(&self.lo)
            .map(|(h, l)| (h * l).sqrt())
            .collect()
    }

    fn moved(&self, step: &[f64], t: f64) -> Self {
        Self {
            u: self.u.iter().zip(step).map(|(x, d)| x + t * d).collect(),
            hi: self.hi.iter().zip(step).map(|(x, d)| x - t * d).collect(),
            lo: self.lo.iter().zip(step).map(|(x, d)| x + t * d).collect(),
        }
    }
}

/// Maximum of the discretized `L_r` over the class `U_{a,b}` with `bins`
/// equal-measure bins.
pub fn discretized_max(dimension: usize, r: f64, a: f64, b: f64, bins: usize) -> Result<f64> {
    Ok(DiscretizedClass::new(dimension, r, bins)?
        .maximize(a, b)?
        .value)
}

/// Bounded boundary data together with its Poisson extension.
#[derive(Debug, Clone)]
pub struct HarmonicSample {
    pub dimension: usize,
    pub seed: u64,
    pub data: BoundaryData,
    /// `F(0)`, the mean of the data.
    pub f0: Complex64,
}

impl HarmonicSample {
    pub fn evaluate(&self, x: &[f64]) -> Result<Complex64> {
        evaluate_poisson_general(&self.data, x)
    }

    pub fn constant(dimension: usize, value: Complex64) -> Result<Self> {
        Ok(Self {
            dimension,
            seed: 0,
            data: BoundaryData::constant(dimension, value)?,
            f0: value,
        })
    }

    /// The witness `k₁e^{iβ₁}F₁ + k₂e^{iβ₂}F₂` as boundary data.
    pub fn from_witness(witness: &WitnessSpec) -> Result<Self> {
        let [p1, p2] = witness.profiles;
        let (mut breakpoints, mut transitions) = p1.refinement();
        let (b2, t2) = p2.refinement();
        breakpoints.extend(b2);
        transitions.extend(t2);
        breakpoints.sort_by(f64::total_cmp);
        breakpoints.dedup();
        let rule = ZonalRule::graded(p1.dimension, p1.order, &breakpoints, &transitions)?;
        let c1 = Complex64::from_polar(witness.k1, witness.beta1);
        let c2 = Complex64::from_polar(witness.k2, witness.beta2);
        let data = BoundaryData::zonal_with_rule(rule, breakpoints, move |t| {
            c1 * Complex64::new(p1.u(t), p1.signed_v(t))
                + c2 * Complex64::new(p2.u(t), p2.signed_v(t))
        });
        Ok(Self {
            dimension: p1.dimension,
            seed: 0,
            f0: witness.evaluate_on_axis(0.0)?,
            data,
        })
    }
}

fn random_direction(rng: &mut ChaCha8Rng, dimension: usize) -> Vec<f64> {
    let phi = rng.gen_range(0.0..2.0 * PI);
    if dimension == 2 {
        return vec![phi.cos(), phi.sin()];
    }
    let z: f64 = rng.gen_range(-1.0..1.0);
    let s = (1.0 - z * z).sqrt();
    vec![s * phi.cos(), s * phi.sin(), z]
}

/// Random cap sum with `complexity` caps and random complex weights,
/// rescaled so that its exact sup norm is drawn from `[0.95, 1)`.
pub fn random_harmonic(dimension: usize, seed: u64, complexity: usize) -> Result<HarmonicSample> {
    if dimension != 2 && dimension != 3 {
        return Err(Error::Capability(format!(
            "random harmonic samples are available for n = 2 and 3, not n = {dimension}"
        )));
    }
    if complexity < 1 {
        return domain("complexity must be at least 1");
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(dimension as u64);
    loop {
        let random_weight = |rng: &mut ChaCha8Rng| {
            Complex64::from_polar(rng.gen_range(0.0..1.0), rng.gen_range(-PI..PI))
        };
        let constant = random_weight(&mut rng);
        let caps: Vec<Cap> = (0..complexity)
            .map(|_| Cap {
                axis: random_direction(&mut rng, dimension),
                level: rng.gen_range(-0.95..0.95),
                weight: random_weight(&mut rng),
            })
            .collect();
        let raw = CapSum::new(dimension, constant, caps)?;
        let sup = raw.sup_norm()?;
        let target = rng.gen_range(0.95..1.0);
        if !(sup > 0.0) {
            continue;
        }
        let sum = raw.affine(Complex64::new(target / sup, 0.0), Complex64::new(0.0, 0.0));
        let f0 = sum.mean();
        if f0.norm() > 0.999 {
            continue;
        }
        return Ok(HarmonicSample {
            dimension,
            seed,
            data: BoundaryData::Caps(sum),
            f0,
        });
    }
}

/// `count` deterministic, well-spread unit vectors, the first being `N`.
pub fn sphere_directions(dimension: usize, count: usize) -> Result<Vec<Vec<f64>>> {
    let golden = 0.5 * (5f64.sqrt() - 1.0);
    match dimension {
        2 => Ok((0..count)
            .map(|k| {
                let phi = PI / 2.0 + 2.0 * PI * (k as f64 * golden).fract();
                vec![phi.cos(), phi.sin()]
            })
            .collect()),
        3 => {
            let mut out = Vec::with_capacity(count);
            if count > 0 {
                out.push(vec![0.0, 0.0, 1.0]);
            }
            let rest = count.saturating_sub(1);
            for k in 0..rest {
                let z = 1.0 - 2.0 * (k as f64 + 0.5) / rest as f64;
                let s = (1.0 - z * z).sqrt();
                let phi = 2.0 * PI * (k as f64 * golden).fract();
                out.push(vec![s * phi.cos(), s * phi.sin(), z]);
            }
            Ok(out)
        }
        n => Err(Error::Capability(format!("sphere directions for n = {n}"))),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialFailure {
    pub seed: u64,
    pub point: Vec<f64>,
    pub value: [f64; 2],
    pub margin: f64,
}

/// Outcome of one containment trial.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialEntry {
    pub seed: u64,
    pub rho: f64,
    pub alpha: f64,
    pub worst_margin: f64,
    pub failures: Vec<TrialFailure>,
}

/// Evaluate `F` at `m_points` points of the sphere of radius `r` (plus a
/// few at radius `r/2`) and classify each against `e^{iα} E_{r,ρ}` for
/// `ρe^{iα} = F(0)`.
pub fn containment_trial(
    sample: &HarmonicSample,
    r: f64,
    m_points: usize,
    tol: f64,
) -> Result<TrialEntry> {
    let rho = sample.f0.norm();
    let alpha = sample.f0.arg();
    let region = build_region(sample.dimension, r, rho, DEFAULT_BETA_SAMPLES)?;
    let directions = sphere_directions(sample.dimension, m_points)?;
    let mut points: Vec<Vec<f64>> = directions
        .iter()
        .map(|d| d.iter().map(|c| r * c).collect())
        .collect();
    points.extend(
        directions
            .iter()
            .take(4)
            .map(|d| d.iter().map(|c| 0.5 * r * c).collect()),
    );
    let mut worst = f64::NEG_INFINITY;
    let mut failures = Vec::new();
    for x in points {
        let value = sample.evaluate(&x)?;
        let margin = region.contains_rotated(alpha, value, tol).margin;
        worst = worst.max(margin);
        if margin > tol {
            failures.push(TrialFailure {
                seed: sample.seed,
                point: x,
                value: [value.re, value.im],
                margin,
            });
        }
    }
    Ok(TrialEntry {
        seed: sample.seed,
        rho,
        alpha,
        worst_margin: worst,
        failures,
    })
}

/// Aggregated containment trials.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialReport {
    pub seed: u64,
    pub dimension: usize,
    pub r: f64,
    pub trials: usize,
    pub points_per_trial: usize,
    pub tol: f64,
    pub worst_margin: f64,
    pub failures: Vec<TrialFailure>,
}

impl TrialReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Seed of trial `index` under the base `seed`.
pub fn trial_seed(seed: u64, index: usize) -> u64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index as u64 + 1);
    rng.gen()
}

/// `trials` random samples with 1 to 4 caps each, checked in parallel and
/// reported in trial order.
pub fn run_trials(
    dimension: usize,
    r: f64,
    trials: usize,
    seed: u64,
    m_points: usize,
    tol: f64,
) -> Result<TrialReport> {
    if trials == 0 {
        return domain("need at least one trial");
    }
    let entries = (0..trials)
        .into_par_iter()
        .map(|i| {
            let sample = random_harmonic(dimension, trial_seed(seed, i), 1 + i % 4)?;
            containment_trial(&sample, r, m_points, tol)
        })
        .collect::<Result<Vec<TrialEntry>>>()?;
    Ok(TrialReport {
        seed,
        dimension,
        r,
        trials,
        points_per_trial: m_points,
        tol,
        worst_margin: entries
            .iter()
            .map(|e| e.worst_margin)
            .fold(f64::NEG_INFINITY, f64::max),
        failures: entries.into_iter().flat_map(|e| e.failures).collect(),
    })
}

/// One sampled structural claim; `worst` is the least favourable sampled
/// quantity, which must stay on the right side of the claim's threshold.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClaimCheck {
    pub name: String,
    pub passed: bool,
    pub worst: f64,
}

fn claim(name: &str, passed: bool, worst: f64) -> ClaimCheck {
    ClaimCheck {
        name: name.to_string(),
        passed,
        worst,
    }
}

/// Moment pairs used by the profile claims.
pub const CLAIM_MOMENTS: [(f64, f64); 8] = [
    (0.0, 0.5),
    (0.3, 0.4),
    (-0.6, 0.5),
    (0.8, 0.3),
    (-0.2, -0.7),
    (0.5, 0.0),
    (0.0, 0.95),
    (-0.9, 0.1),
];

pub fn claim_checks(dimension: usize, r: f64) -> Result<Vec<ClaimCheck>> {
    let options = SolverOptions::default();
    let span = kernel_power(dimension, r, 1.0) - kernel_power(dimension, r, -1.0);
    let k_lo = kernel_power(dimension, r, -1.0);
    let mut checks = Vec::new();

    // Jacobian sign and ranges of R, I on a (λ, μ) grid
    let mut worst_det = f64::NEG_INFINITY;
    let mut worst_range: f64 = 0.0;
    let mut range_ok = true;
    for i in 0..5 {
        let lambda = k_lo - span + 0.75 * span * i as f64;
        for &mu in &[0.01, 0.1, 1.0, 10.0, 100.0] {
            let rule = adapted_rule(dimension, r, lambda, mu, options.order)?;
            worst_det = worst_det.max(jacobian(&rule, r, lambda, mu)?.determinant());
            let (rv, iv) = r_i_values(&rule, r, lambda, mu)?;
            range_ok &= rv.abs() < 1.0 && iv > 0.0 && iv < 1.0;
            worst_range = worst_range.max(rv.abs()).max(iv);
        }
    }
    checks.push(claim(
        "jacobian_determinant_negative",
        worst_det < 0.0,
        worst_det,
    ));
    checks.push(claim("r_and_i_in_open_ranges", range_ok, worst_range));

    // R strictly decreasing in λ
    let mut worst_step = f64::NEG_INFINITY;
    for &mu in &[0.1, 1.0, 10.0] {
        let mut prev = f64::INFINITY;
        for i in 0..=20 {
            let lambda = k_lo - span + 0.15 * span * i as f64;
            let rule = adapted_rule(dimension, r, lambda, mu, options.order)?;
            let (rv, _) = r_i_values(&rule, r, lambda, mu)?;
            worst_step = worst_step.max(rv - prev);
            prev = rv;
        }
    }
    checks.push(claim(
        "r_decreasing_in_lambda",
        worst_step < 0.0,
        worst_step,
    ));

    // I along λ(μ, a) increases to √(1-a²)
    let mut worst_increase = f64::NEG_INFINITY;
    let mut worst_limit: f64 = 0.0;
    for &a in &[0.0, 0.3, 0.6] {
        let mut prev = f64::NEG_INFINITY;
        for &mu in &[0.1, 1.0, 10.0, 100.0, 1e4] {
            let lambda = solve_lambda_at_mu(dimension, r, a, mu, &options)?;
            let rule = adapted_rule(dimension, r, lambda, mu, options.order)?;
            let (_, iv) = r_i_values(&rule, r, lambda, mu)?;
            worst_increase = worst_increase.max(prev - iv);
            prev = iv;
        }
        worst_limit = worst_limit.max((prev - (1.0 - a * a).sqrt()).abs());
    }
    checks.push(claim(
        "i_increasing_along_lambda_curve",
        worst_increase < 0.0,
        worst_increase,
    ));
    checks.push(claim(
        "i_tends_to_sqrt_one_minus_a2",
        worst_limit < 1e-3,
        worst_limit,
    ));

    // small-b limits and continuity at the real diameter
    let mut worst_mu: f64 = 0.0;
    let mut worst_lambda: f64 = 0.0;
    let mut worst_gap: f64 = 0.0;
    for &a in &[-0.5, 0.0, 0.5] {
        let params = solve_lagrange(dimension, r, a, 1e-3)?;
        let cap = solve_cap_threshold(dimension, a)?;
        worst_mu = worst_mu.max(params.mu);
        worst_lambda = worst_lambda.max((params.lambda - cap.kernel_level(r)).abs());
        let smooth = build_extremal(dimension, r, a, 1e-3)?;
        let step = build_extremal(dimension, r, a, 0.0)?;
        for i in 0..=400 {
            let t = -1.0 + 0.005 * i as f64;
            if (t - cap.t_a).abs() >= 0.05 {
                worst_gap = worst_gap.max((smooth.u(t) - step.u(t)).abs());
            }
        }
    }
    checks.push(claim("mu_vanishes_as_b_to_zero", worst_mu < 0.05, worst_mu));
    checks.push(claim(
        "lambda_tends_to_cap_level",
        worst_lambda < 1e-2,
        worst_lambda,
    ));
    checks.push(claim(
        "profile_continuous_at_real_diameter",
        worst_gap <= 0.01,
        worst_gap,
    ));

    // profile moments, strict interior bound and the axis maximum principle
    let mut worst_moment: f64 = 0.0;
    let mut worst_norm: f64 = 0.0;
    let mut worst_margin = f64::INFINITY;
    for &(a, b) in &CLAIM_MOMENTS {
        let profile = build_extremal(dimension, r, a, b)?;
        let (ma, mb) = profile.moments();
        worst_moment = worst_moment.max((ma - a).abs()).max((mb - b).abs());
        let top = evaluate_f_on_axis(&profile, r)?;
        for &s in &[0.0, 0.25 * r, 0.5 * r, 0.75 * r] {
            let value = evaluate_f_on_axis(&profile, s)?;
            worst_margin = worst_margin.min(top.re - value.re);
        }
        for &s in &[0.0, 0.5 * r, r, 0.5 * (1.0 + r), 0.99] {
            worst_norm = worst_norm.max(evaluate_f_on_axis(&profile, s)?.norm());
        }
    }
    checks.push(claim(
        "profile_moments_reproduced",
        worst_moment < 1e-8,
        worst_moment,
    ));
    checks.push(claim(
        "extremal_strictly_inside_disk",
        worst_norm < 1.0,
        worst_norm,
    ));
    checks.push(claim(
        "axis_maximum_at_rn",
        worst_margin > 0.0,
        worst_margin,
    ));
    Ok(checks)
}
