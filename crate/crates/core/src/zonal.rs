//! Quadrature for zonal integrands on the unit sphere `S^{n-1}`.
//!
//! A zonal function depends on a point `ω ∈ S` only through its last
//! coordinate `t = ω_n = cos θ`. Against the normalized surface measure σ the
//! colatitude θ is distributed with density `c_n sin^{n-2} θ` on `[0, π]`, so
//! every zonal integral reduces to a one-dimensional integral in θ. Working in
//! θ rather than `t` keeps the density bounded for every `n ≥ 2`.
//!
//! Rules are built from Gauss-Legendre panels in θ. A plain rule uses a single
//! panel; split and graded rules place panel edges on discontinuities and
//! geometrically refine around sharp transitions.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Arc, Mutex, OnceLock};

use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};

pub const DEFAULT_ORDER: usize = 64;

pub const GRADED_PANEL_ORDER: usize = 20;
pub const GRADED_PANEL_LENGTH: f64 = 0.25;

/// Bracket width at which cap-threshold bisection stops.
const CAP_BISECTION_WIDTH: f64 = 1e-13;

type Nodes = Arc<(Vec<f64>, Vec<f64>)>;

/// Gauss-Legendre nodes and weights on `[-1, 1]`, nodes increasing.
pub fn gauss_legendre(m: usize) -> Nodes {
    static CACHE: OnceLock<Mutex<HashMap<usize, Nodes>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(hit) = cache.lock().unwrap().get(&m) {
        return hit.clone();
    }
    let computed = Arc::new(compute_gauss_legendre(m));
    cache.lock().unwrap().insert(m, computed.clone());
    computed
}

fn compute_gauss_legendre(m: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; m];
    let mut weights = vec![0.0; m];
    let mf = m as f64;
    for i in 0..m.div_ceil(2) {
        // Tricomi initial guess for the i-th largest root.
        let mut x = (PI * (i as f64 + 0.75) / (mf + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(m, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(m, x);
        if d.is_finite() {
            dp = d;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[m - 1 - i] = x;
        weights[i] = w;
        weights[m - 1 - i] = w;
    }
    if m % 2 == 1 {
        nodes[m / 2] = 0.0;
    }
    (nodes, weights)
}

/// `(P_m(x), P_m'(x))` by the three-term recurrence.
fn legendre_with_derivative(m: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if m == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=m {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = m as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// A quadrature rule for σ restricted to zonal integrands.
///
/// Nodes are colatitudes in `(0, π)`; each weight already carries the
/// density `c_n sin^{n-2} θ`, and the weights sum to one.
#[derive(Debug, Clone, PartialEq)]
pub struct ZonalRule {
    dimension: usize,
    order: usize,
    nodes: Vec<f64>,
    weights: Vec<f64>,
    cosines: Vec<f64>,
}

impl ZonalRule {
    /// Single-panel rule of `order` Gauss points on `[0, π]`.
    pub fn new(dimension: usize, order: usize) -> Result<Self> {
        Self::from_edges(dimension, order, &[0.0, PI])
    }

    /// Composite rule with a fresh `order`-point panel between consecutive
    /// `edges` (colatitudes). The edges must start at 0, end at π and be
    /// strictly increasing.
    pub fn from_edges(dimension: usize, order: usize, edges: &[f64]) -> Result<Self> {
        let orders = vec![order; edges.len().saturating_sub(1)];
        Self::from_panels(dimension, order, edges, &orders)
    }

    /// Composite rule with `orders[k]` Gauss points on the panel
    /// `[edges[k], edges[k+1]]`. `order` is the nominal order reported by
    /// [`ZonalRule::order`].
    pub fn from_panels(
        dimension: usize,
        order: usize,
        edges: &[f64],
        orders: &[usize],
    ) -> Result<Self> {
        if dimension < 2 {
            return domain(format!("dimension must be at least 2, got {dimension}"));
        }
        if order < 1 {
            return domain("quadrature order must be at least 1");
        }
        if edges.len() < 2 || edges[0] != 0.0 || edges[edges.len() - 1] != PI {
            return domain("panel edges must span [0, π]");
        }
        if edges.windows(2).any(|w| !(w[1] > w[0])) {
            return domain("panel edges must be strictly increasing");
        }
        if orders.len() + 1 != edges.len() || orders.contains(&0) {
            return domain("need one positive order per panel");
        }
        let power = (dimension - 2) as i32;
        let cap = orders.iter().sum();
        let mut nodes = Vec::with_capacity(cap);
        let mut weights = Vec::with_capacity(cap);
        for (pair, &panel_order) in edges.windows(2).zip(orders) {
            let base = gauss_legendre(panel_order);
            let (gx, gw) = (&base.0, &base.1);
            let half = 0.5 * (pair[1] - pair[0]);
            let mid = 0.5 * (pair[1] + pair[0]);
            for (x, w) in gx.iter().zip(gw.iter()) {
                let theta = mid + half * x;
                nodes.push(theta);
                weights.push(w * half * theta.sin().powi(power));
            }
        }
        let total: f64 = weights.iter().sum();
        weights.iter_mut().for_each(|w| *w /= total);
        let cosines = nodes.iter().map(|t| t.cos()).collect();
        Ok(Self {
            dimension,
            order,
            nodes,
            weights,
            cosines,
        })
    }

    /// Rule with panel edges at the given `t`-values, so that integrands
    /// with jumps at those levels are integrated panelwise.
    pub fn split(dimension: usize, order: usize, breakpoints: &[f64]) -> Result<Self> {
        Self::graded(dimension, order, breakpoints, &[])
    }

    /// Split rule that additionally refines geometrically around each
    /// `(t_center, t_width)` transition: panel edges at distance
    /// `width · 2^k` from the center, in colatitude. Refined panels shorter
    /// than [`GRADED_PANEL_LENGTH`] use at most [`GRADED_PANEL_ORDER`] points;
    /// their nearest singularity sits about one panel length away, so the low
    /// order already resolves them to rounding level.
    pub fn graded(
        dimension: usize,
        order: usize,
        breakpoints: &[f64],
        transitions: &[(f64, f64)],
    ) -> Result<Self> {
        let mut edges = vec![0.0, PI];
        for &t in breakpoints {
            if !(t > -1.0 && t < 1.0) {
                return domain(format!("breakpoint {t} outside (-1, 1)"));
            }
            edges.push(t.acos());
        }
        for &(center, width) in transitions {
            if !(center > -1.0 && center < 1.0) || !(width > 0.0) {
                continue;
            }
            let theta = center.acos();
            let lo = (center - width).max(-1.0).acos();
            let hi = (center + width).min(1.0).acos();
            let step = (lo - theta).min(theta - hi).max(1e-300);
            edges.push(theta);
            if step < 0.2 {
                let mut d = step;
                while d < PI {
                    edges.push(theta - d);
                    edges.push(theta + d);
                    d *= 2.0;
                }
            }
        }
        edges.retain(|e| *e >= 0.0 && *e <= PI);
        edges.sort_by(|a, b| a.partial_cmp(b).unwrap());
        // drop panels too thin to matter
        let mut clean: Vec<f64> = Vec::with_capacity(edges.len());
        for e in edges {
            match clean.last() {
                Some(&last) if e - last < 1e-15 => {}
                _ => clean.push(e),
            }
        }
        if let Some(last) = clean.last_mut() {
            *last = PI;
        }
        let refined = !transitions.is_empty();
        let orders: Vec<usize> = clean
            .windows(2)
            .map(|w| {
                if refined && w[1] - w[0] < GRADED_PANEL_LENGTH {
                    order.min(GRADED_PANEL_ORDER)
                } else {
                    order
                }
            })
            .collect();
        Self::from_panels(dimension, order, &clean, &orders)
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// `t = cos θ` at every node.
    pub fn cosines(&self) -> &[f64] {
        &self.cosines
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// `Σ w_i f(cos θ_i)`.
    pub fn integrate<F: Fn(f64) -> f64>(&self, f: F) -> f64 {
        self.cosines
            .iter()
            .zip(&self.weights)
            .map(|(&t, &w)| w * f(t))
            .sum()
    }
}

pub fn make_rule(dimension: usize, order: usize) -> Result<ZonalRule> {
    ZonalRule::new(dimension, order)
}

pub fn integrate_zonal<F: Fn(f64) -> f64>(rule: &ZonalRule, f: F) -> f64 {
    rule.integrate(f)
}

/// Integrate `f` panelwise with panel edges at `breakpoints`.
pub fn integrate_zonal_split<F: Fn(f64) -> f64>(
    dimension: usize,
    order: usize,
    f: F,
    breakpoints: &[f64],
) -> Result<f64> {
    Ok(ZonalRule::split(dimension, order, breakpoints)?.integrate(f))
}

/// `∫_0^θ sin^{n-2} s ds` by Gauss-Legendre.
fn sine_power_integral(dimension: usize, theta: f64) -> f64 {
    let base = gauss_legendre(DEFAULT_ORDER);
    let half = 0.5 * theta;
    let power = (dimension - 2) as i32;
    base.0
        .iter()
        .zip(&base.1)
        .map(|(x, w)| w * (half * (1.0 + x)).sin().powi(power))
        .sum::<f64>()
        * half
}

/// σ-measure of the cap `{ω ∈ S : ω_n > t}`.
pub fn cap_measure(dimension: usize, t: f64) -> Result<f64> {
    if dimension < 2 {
        return domain(format!("dimension must be at least 2, got {dimension}"));
    }
    if !(-1.0..=1.0).contains(&t) {
        return domain(format!("cap level {t} outside [-1, 1]"));
    }
    if t == 1.0 {
        return Ok(0.0);
    }
    if t == -1.0 {
        return Ok(1.0);
    }
    let theta = t.acos();
    let total = sine_power_integral(dimension, PI);
    // integrate over the shorter side for accuracy near the poles
    if theta <= PI / 2.0 {
        Ok(sine_power_integral(dimension, theta) / total)
    } else {
        Ok(1.0 - sine_power_integral(dimension, PI - theta) / total)
    }
}

/// Boundary circle of the cap whose σ-measure is `(1 + a) / 2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CapThreshold {
    pub dimension: usize,
    pub a: f64,
    /// Value of `ω_n` on the boundary circle.
    pub t_a: f64,
    /// Chordal distance `|N - ω|` from the north pole to the circle.
    pub d_a: f64,
}

impl CapThreshold {
    /// `J_a = |rN - x_0|` for any `x_0` on the boundary circle.
    pub fn distance_from_axis_point(&self, r: f64) -> f64 {
        (1.0 - 2.0 * r * self.t_a + r * r).sqrt()
    }

    /// Kernel level `1 / J_a^n` at which the cap indicator switches sign.
    pub fn kernel_level(&self, r: f64) -> f64 {
        self.distance_from_axis_point(r)
            .powi(-(self.dimension as i32))
    }
}

pub fn solve_cap_threshold(dimension: usize, a: f64) -> Result<CapThreshold> {
    if dimension < 2 {
        return domain(format!("dimension must be at least 2, got {dimension}"));
    }
    if !(a > -1.0 && a < 1.0) {
        return domain(format!("cap mean {a} must lie in (-1, 1)"));
    }
    let target = 0.5 * (1.0 + a);
    // cap_measure is decreasing in t
    let (mut lo, mut hi) = (-1.0f64, 1.0f64);
    while hi - lo > CAP_BISECTION_WIDTH {
        let mid = 0.5 * (lo + hi);
        let m = cap_measure(dimension, mid)?;
        if m == target {
            lo = mid;
            hi = mid;
            break;
        }
        if m > target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let t_a = 0.5 * (lo + hi);
    Ok(CapThreshold {
        dimension,
        a,
        t_a,
        d_a: (2.0 - 2.0 * t_a).sqrt(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn rule_is_normalized_and_ordered() {
        for n in 2..=7 {
            for m in [1, 2, 5, 32, 64] {
                let rule = make_rule(n, m).unwrap();
                let total: f64 = rule.weights().iter().sum();
                assert_abs_diff_eq!(total, 1.0, epsilon = 1e-12);
                assert!(rule.weights().iter().all(|&w| w > 0.0));
                assert!(rule.nodes().windows(2).all(|w| w[1] > w[0]));
                assert!(rule.nodes().iter().all(|&t| t > 0.0 && t < PI));
            }
        }
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(make_rule(1, 8).is_err());
        assert!(make_rule(3, 0).is_err());
        assert!(integrate_zonal_split(3, 8, |_| 1.0, &[1.0]).is_err());
        assert!(integrate_zonal_split(3, 8, |_| 1.0, &[-1.5]).is_err());
        assert!(cap_measure(3, 1.2).is_err());
        assert!(solve_cap_threshold(3, 1.0).is_err());
        assert!(solve_cap_threshold(3, -1.0).is_err());
    }

    #[test]
    fn odd_moment_vanishes() {
        let rule = make_rule(3, 64).unwrap();
        assert_abs_diff_eq!(integrate_zonal(&rule, |t| t), 0.0, epsilon = 1e-12);
        let rule = make_rule(2, 64).unwrap();
        assert_abs_diff_eq!(integrate_zonal(&rule, |_| 1.0), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn second_moment_in_four_dimensions() {
        // Monte-Carlo oracle on S^3: sample Gaussian vectors and normalize.
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let samples = 200_000;
        let mut acc = 0.0;
        for _ in 0..samples {
            let v: Vec<f64> = (0..4)
                .map(|_| {
                    let (u1, u2): (f64, f64) = (rng.gen(), rng.gen());
                    (-2.0 * (1.0 - u1).ln()).sqrt() * (2.0 * PI * u2).cos()
                })
                .collect();
            let norm2: f64 = v.iter().map(|x| x * x).sum();
            acc += v[3] * v[3] / norm2;
        }
        let mc = acc / samples as f64;
        assert!((mc - 0.25).abs() < 5e-3, "monte carlo {mc}");

        let rule = make_rule(4, 32).unwrap();
        assert_abs_diff_eq!(integrate_zonal(&rule, |t| t * t), 0.25, epsilon = 1e-12);
    }

    #[test]
    fn circle_poisson_kernel_has_unit_mean() {
        let rule = make_rule(2, 64).unwrap();
        let r: f64 = 0.5;
        let value = integrate_zonal(&rule, |t| (1.0 - r * r) / (1.0 - 2.0 * r * t + r * r));
        assert_abs_diff_eq!(value, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn poisson_family_converges_under_refinement() {
        for n in 2..=5 {
            for &r in &[0.1, 0.3, 0.5, 0.7, 0.9] {
                let kernel =
                    |t: f64| (1.0 - r * r) / (1.0 - 2.0 * r * t + r * r).powf(n as f64 / 2.0);
                let coarse = make_rule(n, 64).unwrap().integrate(kernel);
                let fine = make_rule(n, 128).unwrap().integrate(kernel);
                assert!(
                    (coarse - fine).abs() < 1e-10,
                    "n={n} r={r}: {coarse} vs {fine}"
                );
                assert_abs_diff_eq!(fine, 1.0, epsilon = 1e-10);
            }
        }
    }

    #[test]
    fn split_integration_of_steps() {
        let v = integrate_zonal_split(3, 32, |t| t.signum(), &[0.0]).unwrap();
        assert_abs_diff_eq!(v, 0.0, epsilon = 1e-14);
        let v = integrate_zonal_split(3, 32, |t| if t > 0.5 { 1.0 } else { 0.0 }, &[0.5]).unwrap();
        assert_abs_diff_eq!(v, 0.25, epsilon = 1e-14);
        let smooth = |t: f64| (1.0 + t).exp() * (0.3 * t).cos();
        let rule = make_rule(4, 64).unwrap();
        let v = integrate_zonal_split(4, 64, smooth, &[]).unwrap();
        assert_abs_diff_eq!(v, integrate_zonal(&rule, smooth), epsilon = 1e-12);
        let v2 = integrate_zonal_split(4, 64, smooth, &[-0.3, 0.2, 0.9]).unwrap();
        assert_abs_diff_eq!(v2, v, epsilon = 1e-10);
    }

    #[test]
    fn graded_rule_resolves_sharp_transition() {
        let width = 1e-6;
        let center = 0.3;
        let f = |t: f64| {
            let s = (t - center) / width;
            s / (1.0 + s * s).sqrt()
        };
        // n = 3: t is uniform on [-1, 1] with density 1/2, antiderivative of f
        // is width·sqrt(1+s²).
        let exact = 0.5
            * width
            * ((1.0 + ((1.0 - center) / width).powi(2)).sqrt()
                - (1.0 + ((-1.0 - center) / width).powi(2)).sqrt());
        let rule = ZonalRule::graded(3, 24, &[], &[(center, width)]).unwrap();
        assert_abs_diff_eq!(rule.integrate(f), exact, epsilon = 1e-12);
    }

    #[test]
    fn cap_measure_values() {
        for n in 2..=6 {
            assert_abs_diff_eq!(cap_measure(n, 0.0).unwrap(), 0.5, epsilon = 1e-15);
            assert_eq!(cap_measure(n, -1.0).unwrap(), 1.0);
            assert_eq!(cap_measure(n, 1.0).unwrap(), 0.0);
        }
        assert_abs_diff_eq!(
            cap_measure(2, -std::f64::consts::FRAC_1_SQRT_2).unwrap(),
            0.75,
            epsilon = 1e-10
        );
        for &t in &[-0.9, -0.4, 0.1, 0.75] {
            // n=2: arccos(t)/π ; n=3: (1-t)/2 ; n=4: (θ - sinθ cosθ)/π
            let theta = f64::acos(t);
            assert_abs_diff_eq!(cap_measure(2, t).unwrap(), theta / PI, epsilon = 1e-14);
            assert_abs_diff_eq!(cap_measure(3, t).unwrap(), (1.0 - t) / 2.0, epsilon = 1e-14);
            assert_abs_diff_eq!(
                cap_measure(4, t).unwrap(),
                (theta - theta.sin() * theta.cos()) / PI,
                epsilon = 1e-14
            );
        }
    }

    #[test]
    fn cap_threshold_examples() {
        for n in 2..=5 {
            assert_abs_diff_eq!(
                solve_cap_threshold(n, 0.0).unwrap().t_a,
                0.0,
                epsilon = 1e-13
            );
        }
        assert_abs_diff_eq!(
            solve_cap_threshold(2, 0.5).unwrap().t_a,
            -(PI / 4.0).sin(),
            epsilon = 1e-12
        );
        let c = solve_cap_threshold(3, 0.5).unwrap();
        assert_abs_diff_eq!(c.t_a, -0.5, epsilon = 1e-12);
        assert_abs_diff_eq!(c.d_a, 3f64.sqrt(), epsilon = 1e-12);
        let j = c.distance_from_axis_point(0.5);
        assert!(j > 0.5 && j < 1.5);
    }

    #[test]
    fn cap_threshold_round_trip() {
        for n in 2..=6 {
            let mut previous = f64::INFINITY;
            for k in -9..=9 {
                let a = k as f64 / 10.0;
                let c = solve_cap_threshold(n, a).unwrap();
                assert!(c.t_a < previous, "threshold must decrease as a grows");
                previous = c.t_a;
                let m = cap_measure(n, c.t_a).unwrap();
                assert!((m - 0.5 * (1.0 + a)).abs() < 1e-12, "n={n} a={a}");
                assert!(c.d_a > 0.0 && c.d_a < 2.0);
            }
        }
    }

    proptest::proptest! {
        #[test]
        fn cap_measure_is_decreasing(n in 2usize..8, t1 in -1.0f64..1.0, gap in 1e-6f64..0.5) {
            let t2 = (t1 + gap).min(1.0);
            let m1 = cap_measure(n, t1).unwrap();
            let m2 = cap_measure(n, t2).unwrap();
            proptest::prop_assert!(m1 > m2);
            proptest::prop_assert!((0.0..=1.0).contains(&m1));
        }
    }
}
