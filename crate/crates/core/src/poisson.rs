//! Poisson integrals over the unit sphere.
//!
//! `U(x) = ∫_S (1-|x|²)/|x-ω|^n g(ω) dσ(ω)` is evaluated on the polar axis
//! for zonal data (a 1-D integral in `t = ω_n`) and at general points for a
//! few boundary-data representations. Off the axis, data that is zonal
//! about some direction `e` reduces to a 2-D integral: with
//! `x = x_∥ e + x_⊥ e'` and `ω = t e + √(1-t²) (ψ e' + …)`,
//!
//! ```text
//! |x - ω|² = 1 + |x|² - 2 (x_∥ t + x_⊥ √(1-t²) ψ),
//! ```
//!
//! where `ψ` is the first coordinate of a uniform point on `S^{n-2}`.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{domain, Error, Result};
use crate::extremal::{inverse_power, kernel_power, ExtremalProfile};
use crate::zonal::{cap_measure, ZonalRule, DEFAULT_ORDER};

/// Gauss order of the transverse `ψ` rule for off-axis evaluation.
pub const TRANSVERSE_ORDER: usize = 48;
/// Default colatitude order and azimuth count of `n = 3` sample grids.
pub const SPHERE_GRID: (usize, usize) = (64, 128);

/// A point `sN` on the polar axis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AxisPoint {
    s: f64,
}

impl AxisPoint {
    pub fn new(s: f64) -> Result<Self> {
        if !(0.0..1.0).contains(&s) {
            return domain(format!("axis point s = {s} outside [0, 1)"));
        }
        Ok(Self { s })
    }

    pub fn s(&self) -> f64 {
        self.s
    }
}

/// `(1-s²)/|sN - ω|^n` as a function of `t = ω_n`.
pub fn poisson_kernel_axis(dimension: usize, s: f64, t: f64) -> Result<f64> {
    if !(s.abs() < 1.0) {
        return domain(format!("|x| = {} must be below 1", s.abs()));
    }
    if !(-1.0..=1.0).contains(&t) {
        return domain(format!("t = {t} outside [-1, 1]"));
    }
    Ok((1.0 - s * s) * kernel_power(dimension, s, t))
}

/// `(1-|x|²)/|x - ω|^n` for `x` in the ball and `ω` on the sphere.
pub fn poisson_kernel(x: &[f64], omega: &[f64]) -> Result<f64> {
    if x.len() != omega.len() || x.len() < 2 {
        return domain("point and direction must share a dimension of at least 2");
    }
    let norm2: f64 = x.iter().map(|c| c * c).sum();
    if !(norm2 < 1.0) {
        return domain(format!("|x| = {} must be below 1", norm2.sqrt()));
    }
    let dist2: f64 = x.iter().zip(omega).map(|(a, b)| (a - b) * (a - b)).sum();
    Ok((1.0 - norm2) * inverse_power(dist2, x.len()))
}

/// `L_r(u) = ∫ (1-r²)/|rN - ω|^n u(t) dσ`, the value at `rN` of the Poisson
/// integral of zonal data. The dimension is that of `rule`.
pub fn functional_l<F: Fn(f64) -> f64>(rule: &ZonalRule, r: f64, u: F) -> Result<f64> {
    if !(0.0..1.0).contains(&r) {
        return domain(format!("radius {r} outside [0, 1)"));
    }
    let n = rule.dimension();
    let scale = 1.0 - r * r;
    Ok(rule.integrate(|t| scale * kernel_power(n, r, t) * u(t)))
}

/// `F = U + iV` of an extremal profile at `sN`.
pub fn evaluate_f_on_axis(profile: &ExtremalProfile, s: f64) -> Result<Complex64> {
    let point = AxisPoint::new(s)?;
    let rule = profile.rule();
    let re = functional_l(&rule, point.s(), |t| profile.u(t))?;
    let im = if profile.sign_b == 0 {
        0.0
    } else {
        functional_l(&rule, point.s(), |t| profile.signed_v(t))?
    };
    Ok(Complex64::new(re, im))
}

/// `U(rN)` for boundary data `±1` on the two hemispheres: the classical
/// harmonic Schwarz bound.
pub fn classical_schwarz_bound(dimension: usize, r: f64) -> Result<f64> {
    if !(r > 0.0 && r < 1.0) {
        return domain(format!("radius {r} outside (0, 1)"));
    }
    let rule = ZonalRule::split(dimension, DEFAULT_ORDER, &[0.0])?;
    functional_l(&rule, r, |t| t.signum())
}

/// `ψ`-marginal of a uniform point on `S^{n-2}`.
fn transverse_rule(dimension: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    if dimension == 2 {
        return Ok((vec![-1.0, 1.0], vec![0.5, 0.5]));
    }
    let rule = ZonalRule::new(dimension - 1, TRANSVERSE_ORDER)?;
    Ok((rule.cosines().to_vec(), rule.weights().to_vec()))
}

/// Poisson kernel averaged over the transverse sphere at colatitude
/// `theta` about the data axis.
#[inline]
fn transverse_kernel(
    dimension: usize,
    transverse: &(Vec<f64>, Vec<f64>),
    parallel: f64,
    perpendicular: f64,
    norm2: f64,
    theta: f64,
) -> f64 {
    let (t, sin) = (theta.cos(), theta.sin());
    let base = 1.0 + norm2 - 2.0 * parallel * t;
    let cross = 2.0 * perpendicular * sin;
    let sum: f64 = transverse
        .0
        .iter()
        .zip(&transverse.1)
        .map(|(&psi, &w)| w * inverse_power(base - cross * psi, dimension))
        .sum();
    (1.0 - norm2) * sum
}

/// Zonal boundary data `g(t)` with a rule that resolves its breakpoints.
#[derive(Clone)]
pub struct ZonalData {
    rule: ZonalRule,
    breakpoints: Vec<f64>,
    values: Arc<dyn Fn(f64) -> Complex64 + Send + Sync>,
}

impl fmt::Debug for ZonalData {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ZonalData")
            .field("dimension", &self.rule.dimension())
            .field("nodes", &self.rule.len())
            .field("breakpoints", &self.breakpoints)
            .finish()
    }
}

impl ZonalData {
    pub fn value(&self, t: f64) -> Complex64 {
        (self.values)(t)
    }

    pub fn rule(&self) -> &ZonalRule {
        &self.rule
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }
}

/// One term `weight · 1{ω·axis > level}` of a cap sum.
#[derive(Debug, Clone, PartialEq)]
pub struct Cap {
    pub axis: Vec<f64>,
    pub level: f64,
    pub weight: Complex64,
}

/// `constant + Σ weight_j 1{ω·axis_j > level_j}`.
#[derive(Debug, Clone)]
pub struct CapSum {
    dimension: usize,
    constant: Complex64,
    caps: Vec<Cap>,
    rules: Vec<ZonalRule>,
}

impl CapSum {
    /// Axes are normalized; levels must lie in `(-1, 1)`.
    pub fn new(dimension: usize, constant: Complex64, caps: Vec<Cap>) -> Result<Self> {
        if dimension < 2 {
            return domain(format!("dimension must be at least 2, got {dimension}"));
        }
        let mut normalized = Vec::with_capacity(caps.len());
        let mut rules = Vec::with_capacity(caps.len());
        for cap in caps {
            if cap.axis.len() != dimension {
                return domain("cap axis has the wrong dimension");
            }
            let norm = cap.axis.iter().map(|c| c * c).sum::<f64>().sqrt();
            if !(norm > 0.0) || !norm.is_finite() {
                return domain("cap axis must be a nonzero vector");
            }
            rules.push(ZonalRule::split(dimension, DEFAULT_ORDER, &[cap.level])?);
            normalized.push(Cap {
                axis: cap.axis.iter().map(|c| c / norm).collect(),
                ..cap
            });
        }
        Ok(Self {
            dimension,
            constant,
            caps: normalized,
            rules,
        })
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn constant(&self) -> Complex64 {
        self.constant
    }

    pub fn caps(&self) -> &[Cap] {
        &self.caps
    }

    pub fn value(&self, omega: &[f64]) -> Complex64 {
        self.caps
            .iter()
            .filter(|c| dot(&c.axis, omega) > c.level)
            .fold(self.constant, |acc, c| acc + c.weight)
    }

    /// `σ`-mean of the data.
    pub fn mean(&self) -> Complex64 {
        self.caps.iter().fold(self.constant, |acc, c| {
            acc + c.weight * cap_measure(self.dimension, c.level).unwrap_or(0.0)
        })
    }

    /// Every linear combination with the same caps: `scale · (self) + shift`.
    pub fn affine(&self, scale: Complex64, shift: Complex64) -> Self {
        Self {
            dimension: self.dimension,
            constant: self.constant * scale + shift,
            caps: self
                .caps
                .iter()
                .map(|c| Cap {
                    weight: c.weight * scale,
                    ..c.clone()
                })
                .collect(),
            rules: self.rules.clone(),
        }
    }

    /// Exact `sup |g|` over the sphere, read off one point in every face of
    /// the cap arrangement. Available for `n ∈ {2, 3}`.
    pub fn sup_norm(&self) -> Result<f64> {
        let points = match self.dimension {
            2 => self.circle_face_points(),
            3 => self.sphere_face_points(),
            n => {
                return Err(Error::Capability(format!(
                    "exact sup norm of cap sums needs n = 2 or 3, got {n}"
                )))
            }
        };
        Ok(points
            .iter()
            .map(|p| self.value(p).norm())
            .fold(self.constant.norm(), f64::max))
    }

    /// Midpoints between consecutive arc endpoints.
    fn circle_face_points(&self) -> Vec<Vec<f64>> {
        let mut angles: Vec<f64> = Vec::with_capacity(2 * self.caps.len());
        for cap in &self.caps {
            let center = cap.axis[1].atan2(cap.axis[0]);
            let half = cap.level.acos();
            for a in [center - half, center + half] {
                angles.push(a.rem_euclid(2.0 * PI));
            }
        }
        angles.sort_by(f64::total_cmp);
        if angles.is_empty() {
            return vec![vec![1.0, 0.0]];
        }
        let k = angles.len();
        (0..k)
            .map(|i| {
                let next = if i + 1 < k {
                    angles[i + 1]
                } else {
                    angles[0] + 2.0 * PI
                };
                let mid = 0.5 * (angles[i] + next);
                vec![mid.cos(), mid.sin()]
            })
            .collect()
    }

    /// Points just off every circle, and in each of the four sectors at
    /// every crossing of two circles.
    fn sphere_face_points(&self) -> Vec<Vec<f64>> {
        const OFFSET: f64 = 1e-7;
        let mut points = vec![vec![0.0, 0.0, 1.0]];
        for cap in &self.caps {
            let e = &cap.axis;
            let u = unit(&orthogonal(e));
            let s = (1.0 - cap.level * cap.level).sqrt();
            let p: Vec<f64> = (0..3).map(|k| cap.level * e[k] + s * u[k]).collect();
            let grad = unit(&tangent_part(e, &p));
            for sign in [-1.0, 1.0] {
                points.push(unit(&axpy(sign * OFFSET, &grad, &p)));
            }
        }
        for i in 0..self.caps.len() {
            for j in i + 1..self.caps.len() {
                let (ci, cj) = (&self.caps[i], &self.caps[j]);
                for p in circle_crossings(ci, cj) {
                    let gi = tangent_part(&ci.axis, &p);
                    let gj = tangent_part(&cj.axis, &p);
                    let (aa, ab, bb) = (dot(&gi, &gi), dot(&gi, &gj), dot(&gj, &gj));
                    let det = aa * bb - ab * ab;
                    if !(det > 1e-12 * aa * bb) {
                        continue;
                    }
                    for si in [-1.0, 1.0] {
                        for sj in [-1.0, 1.0] {
                            // d = x gi + y gj with d·ei = si ε, d·ej = sj ε
                            let x = (si * bb - sj * ab) * OFFSET / det;
                            let y = (sj * aa - si * ab) * OFFSET / det;
                            let q: Vec<f64> =
                                (0..3).map(|k| p[k] + x * gi[k] + y * gj[k]).collect();
                            points.push(unit(&q));
                        }
                    }
                }
            }
        }
        points
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn unit(a: &[f64]) -> Vec<f64> {
    let n = dot(a, a).sqrt();
    a.iter().map(|c| c / n).collect()
}

fn axpy(alpha: f64, x: &[f64], y: &[f64]) -> Vec<f64> {
    x.iter().zip(y).map(|(a, b)| alpha * a + b).collect()
}

/// Component of `v` tangent to the sphere at `p`.
fn tangent_part(v: &[f64], p: &[f64]) -> Vec<f64> {
    let c = dot(v, p);
    v.iter().zip(p).map(|(a, b)| a - c * b).collect()
}

/// Some vector orthogonal to the unit vector `e` in `R^3`.
fn orthogonal(e: &[f64]) -> Vec<f64> {
    let pick = if e[0].abs() < 0.9 {
        [1.0, 0.0, 0.0]
    } else {
        [0.0, 1.0, 0.0]
    };
    tangent_part(&pick, e)
}

fn cross(a: &[f64], b: &[f64]) -> Vec<f64> {
    vec![
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

/// Intersection points of two cap boundary circles on `S^2`.
fn circle_crossings(a: &Cap, b: &Cap) -> Vec<Vec<f64>> {
    let g = dot(&a.axis, &b.axis);
    let det = 1.0 - g * g;
    if det < 1e-14 {
        return Vec::new();
    }
    let alpha = (a.level - g * b.level) / det;
    let beta = (b.level - g * a.level) / det;
    let base = axpy(
        alpha,
        &a.axis,
        &b.axis.iter().map(|c| beta * c).collect::<Vec<_>>(),
    );
    let rest = 1.0 - dot(&base, &base);
    if rest <= 0.0 {
        return Vec::new();
    }
    let normal = cross(&a.axis, &b.axis);
    let gamma = (rest / dot(&normal, &normal)).sqrt();
    vec![axpy(gamma, &normal, &base), axpy(-gamma, &normal, &base)]
}

/// Samples on the circle at `φ_k = 2πk/M`, `ω = (cos φ, sin φ)`.
#[derive(Debug, Clone)]
pub struct CircleSamples {
    values: Vec<Complex64>,
}

/// Samples on `S^2` at colatitude Gauss nodes times uniform azimuths,
/// `ω = (sin θ cos φ, sin θ sin φ, cos θ)`; values are stored θ-major.
#[derive(Debug, Clone)]
pub struct SphereSamples {
    rule: ZonalRule,
    azimuths: usize,
    values: Vec<Complex64>,
}

/// Boundary data for Poisson extension.
#[derive(Debug, Clone)]
pub enum BoundaryData {
    /// Zonal about the polar axis, any dimension.
    Zonal(ZonalData),
    /// A finite sum of cap indicators, any dimension.
    Caps(CapSum),
    /// Uniform samples on the circle (`n = 2`).
    Circle(CircleSamples),
    /// Product-grid samples on `S^2` (`n = 3`).
    Sphere(SphereSamples),
}

impl BoundaryData {
    pub fn constant(dimension: usize, value: Complex64) -> Result<Self> {
        Ok(Self::Caps(CapSum::new(dimension, value, Vec::new())?))
    }

    /// Zonal data `g(t)`, integrated panelwise between `breakpoints`.
    pub fn zonal<F>(dimension: usize, order: usize, breakpoints: &[f64], g: F) -> Result<Self>
    where
        F: Fn(f64) -> Complex64 + Send + Sync + 'static,
    {
        Ok(Self::Zonal(ZonalData {
            rule: ZonalRule::split(dimension, order, breakpoints)?,
            breakpoints: breakpoints.to_vec(),
            values: Arc::new(g),
        }))
    }

    /// Zonal data integrated with a caller-supplied rule.
    pub fn zonal_with_rule<F>(rule: ZonalRule, breakpoints: Vec<f64>, g: F) -> Self
    where
        F: Fn(f64) -> Complex64 + Send + Sync + 'static,
    {
        Self::Zonal(ZonalData {
            rule,
            breakpoints,
            values: Arc::new(g),
        })
    }

    /// The boundary values `u + i·sign_b·v` of an extremal profile.
    pub fn extremal(profile: &ExtremalProfile) -> Self {
        let p = *profile;
        Self::Zonal(ZonalData {
            rule: profile.rule(),
            breakpoints: profile.breakpoint().into_iter().collect(),
            values: Arc::new(move |t| Complex64::new(p.u(t), p.signed_v(t))),
        })
    }

    /// Gridded samples of `g` for `n = 2` (`azimuths` points on the circle)
    /// or `n = 3` (`theta_order × azimuths`); other dimensions are not
    /// supported.
    pub fn gridded<F>(dimension: usize, theta_order: usize, azimuths: usize, g: F) -> Result<Self>
    where
        F: Fn(&[f64]) -> Complex64,
    {
        if azimuths < 1 {
            return domain("need at least one azimuth sample");
        }
        let step = 2.0 * PI / azimuths as f64;
        match dimension {
            2 => Ok(Self::Circle(CircleSamples {
                values: (0..azimuths)
                    .map(|k| {
                        let phi = step * k as f64;
                        g(&[phi.cos(), phi.sin()])
                    })
                    .collect(),
            })),
            3 => {
                let rule = ZonalRule::new(3, theta_order)?;
                let mut values = Vec::with_capacity(rule.len() * azimuths);
                for &theta in rule.nodes() {
                    let (st, ct) = theta.sin_cos();
                    for k in 0..azimuths {
                        let (sp, cp) = (step * k as f64).sin_cos();
                        values.push(g(&[st * cp, st * sp, ct]));
                    }
                }
                Ok(Self::Sphere(SphereSamples {
                    rule,
                    azimuths,
                    values,
                }))
            }
            n => Err(Error::Capability(format!(
                "gridded boundary data is available for n = 2 and 3, not n = {n}"
            ))),
        }
    }

    pub fn dimension(&self) -> usize {
        match self {
            Self::Zonal(z) => z.rule.dimension(),
            Self::Caps(c) => c.dimension,
            Self::Circle(_) => 2,
            Self::Sphere(_) => 3,
        }
    }

    /// Whether `|g| ≤ 1` on the representation: quadrature nodes for zonal
    /// data, grid values for samples, every arrangement face for caps (with
    /// the triangle inequality where faces are not enumerated).
    pub fn is_bounded(&self) -> bool {
        const SLACK: f64 = 1e-12;
        match self {
            Self::Zonal(z) => z
                .rule
                .cosines()
                .iter()
                .all(|&t| z.value(t).norm() <= 1.0 + SLACK),
            Self::Caps(c) => match c.sup_norm() {
                Ok(sup) => sup <= 1.0 + SLACK,
                Err(_) => {
                    c.caps.iter().map(|cap| cap.weight.norm()).sum::<f64>() + c.constant.norm()
                        <= 1.0 + SLACK
                }
            },
            Self::Circle(s) => s.values.iter().all(|v| v.norm() <= 1.0 + SLACK),
            Self::Sphere(s) => s.values.iter().all(|v| v.norm() <= 1.0 + SLACK),
        }
    }
}

/// The Poisson extension of `data` at `x`.
pub fn evaluate_poisson_general(data: &BoundaryData, x: &[f64]) -> Result<Complex64> {
    let n = data.dimension();
    if x.len() != n {
        return domain(format!(
            "point has {} coordinates, data lives in R^{n}",
            x.len()
        ));
    }
    let norm2: f64 = x.iter().map(|c| c * c).sum();
    if !(norm2 < 1.0) {
        return domain(format!("|x| = {} must be below 1", norm2.sqrt()));
    }
    match data {
        BoundaryData::Zonal(z) => {
            let parallel = x[n - 1];
            let perpendicular = (norm2 - parallel * parallel).max(0.0).sqrt();
            if perpendicular == 0.0 {
                let scale = 1.0 - norm2;
                return Ok(z
                    .rule
                    .cosines()
                    .iter()
                    .zip(z.rule.weights())
                    .map(|(&t, &w)| z.value(t) * (w * scale * kernel_power(n, parallel, t)))
                    .sum());
            }
            let transverse = transverse_rule(n)?;
            Ok(z.rule
                .nodes()
                .iter()
                .zip(z.rule.weights())
                .map(|(&theta, &w)| {
                    let k =
                        transverse_kernel(n, &transverse, parallel, perpendicular, norm2, theta);
                    z.value(theta.cos()) * (w * k)
                })
                .sum())
        }
        BoundaryData::Caps(c) => {
            let transverse = transverse_rule(n)?;
            let mut total = c.constant;
            for (cap, rule) in c.caps.iter().zip(&c.rules) {
                let parallel = dot(&cap.axis, x);
                let perpendicular = (norm2 - parallel * parallel).max(0.0).sqrt();
                let mut mass = 0.0;
                for ((&theta, &t), &w) in
                    rule.nodes().iter().zip(rule.cosines()).zip(rule.weights())
                {
                    if t <= cap.level {
                        continue;
                    }
                    mass += w * transverse_kernel(
                        n,
                        &transverse,
                        parallel,
                        perpendicular,
                        norm2,
                        theta,
                    );
                }
                total += cap.weight * mass;
            }
            Ok(total)
        }
        BoundaryData::Circle(s) => {
            let step = 2.0 * PI / s.values.len() as f64;
            let weight = 1.0 / s.values.len() as f64;
            Ok(s.values
                .iter()
                .enumerate()
                .map(|(k, v)| {
                    let (sp, cp) = (step * k as f64).sin_cos();
                    let d2 = (x[0] - cp).powi(2) + (x[1] - sp).powi(2);
                    v * (weight * (1.0 - norm2) / d2)
                })
                .sum())
        }
        BoundaryData::Sphere(s) => {
            let step = 2.0 * PI / s.azimuths as f64;
            let azimuth_weight = 1.0 / s.azimuths as f64;
            let trig: Vec<(f64, f64)> = (0..s.azimuths)
                .map(|k| (step * k as f64).sin_cos())
                .collect();
            let mut total = Complex64::new(0.0, 0.0);
            for (i, (&theta, &w)) in s.rule.nodes().iter().zip(s.rule.weights()).enumerate() {
                let (st, ct) = theta.sin_cos();
                let row = &s.values[i * s.azimuths..(i + 1) * s.azimuths];
                for (v, &(sp, cp)) in row.iter().zip(&trig) {
                    let d2 =
                        (x[0] - st * cp).powi(2) + (x[1] - st * sp).powi(2) + (x[2] - ct).powi(2);
                    total += v * (w * azimuth_weight * (1.0 - norm2) * inverse_power(d2, 3));
                }
            }
            Ok(total)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::extremal::build_extremal;
    use approx::assert_abs_diff_eq;

    fn heinz(r: f64) -> f64 {
        4.0 / PI * r.atan()
    }

    fn ball_bound_3(r: f64) -> f64 {
        (1.0 - (1.0 - r * r) / (1.0 + r * r).sqrt()) / r
    }

    /// Harmonic measure at `z` of the arc from `a1` counterclockwise to `a2`.
    fn arc_measure(a1: f64, a2: f64, z: Complex64) -> f64 {
        let sweep = ((Complex64::from_polar(1.0, a2) - z) / (Complex64::from_polar(1.0, a1) - z))
            .arg()
            .rem_euclid(2.0 * PI);
        (2.0 * sweep - (a2 - a1)) / (2.0 * PI)
    }

    #[test]
    fn kernel_examples() {
        assert_abs_diff_eq!(poisson_kernel_axis(4, 0.0, 0.3).unwrap(), 1.0);
        assert_abs_diff_eq!(
            poisson_kernel_axis(3, 0.5, 1.0).unwrap(),
            6.0,
            epsilon = 1e-13
        );
        assert!(poisson_kernel_axis(3, 1.0, 0.0).is_err());
        let x = [0.1, -0.2, 0.3];
        let w = [0.0, 0.6, 0.8];
        let d2: f64 = 0.01 + 0.64 + 0.25;
        assert_abs_diff_eq!(
            poisson_kernel(&x, &w).unwrap(),
            0.86 / d2.powf(1.5),
            epsilon = 1e-13
        );
        assert!(poisson_kernel(&[0.8, 0.8], &[1.0, 0.0]).is_err());
    }

    #[test]
    fn kernel_has_unit_mass() {
        for n in 2..6 {
            let rule = ZonalRule::new(n, DEFAULT_ORDER).unwrap();
            for &s in &[0.0, 0.3, 0.6, 0.9] {
                let mass = functional_l(&rule, s, |_| 1.0).unwrap();
                assert_abs_diff_eq!(mass, 1.0, epsilon = 1e-9);
            }
        }
    }

    #[test]
    fn functional_of_hemisphere_data() {
        for &r in &[0.25, 0.5, 0.75] {
            assert_abs_diff_eq!(
                classical_schwarz_bound(2, r).unwrap(),
                heinz(r),
                epsilon = 1e-12
            );
            assert_abs_diff_eq!(
                classical_schwarz_bound(3, r).unwrap(),
                ball_bound_3(r),
                epsilon = 1e-12
            );
        }
        assert_abs_diff_eq!(
            classical_schwarz_bound(2, 0.5).unwrap(),
            0.59033447,
            epsilon = 1e-8
        );
        assert_abs_diff_eq!(
            classical_schwarz_bound(3, 0.5).unwrap(),
            0.65835921,
            epsilon = 1e-8
        );
        for n in 2..7 {
            assert!(classical_schwarz_bound(n, 1e-6).unwrap() < 1e-3);
            let mut prev = 0.0;
            for k in 1..20 {
                let value = classical_schwarz_bound(n, 0.05 * k as f64).unwrap();
                assert!(value > prev);
                prev = value;
            }
        }
        assert!(classical_schwarz_bound(2, 0.0).is_err());
        assert!(classical_schwarz_bound(2, 1.0).is_err());
    }

    #[test]
    fn functional_is_linear() {
        let rule = ZonalRule::split(3, DEFAULT_ORDER, &[0.2]).unwrap();
        let u1 = |t: f64| if t > 0.2 { 1.0 } else { -0.5 };
        let u2 = |t: f64| (3.0 * t).sin();
        let lhs = functional_l(&rule, 0.6, |t| 0.3 * u1(t) - 1.7 * u2(t)).unwrap();
        let rhs = 0.3 * functional_l(&rule, 0.6, u1).unwrap()
            - 1.7 * functional_l(&rule, 0.6, u2).unwrap();
        assert_abs_diff_eq!(lhs, rhs, epsilon = 1e-12);
    }

    #[test]
    fn extremal_on_axis() {
        let cap = build_extremal(2, 0.5, 0.0, 0.0).unwrap();
        let f = evaluate_f_on_axis(&cap, 0.5).unwrap();
        assert_abs_diff_eq!(f.re, 0.59033447, epsilon = 1e-8);
        assert_eq!(f.im, 0.0);
        for &(n, a, b) in &[(3, 0.3, 0.4), (2, -0.6, 0.5), (4, 0.1, -0.9), (3, 0.5, 0.0)] {
            let p = build_extremal(n, 0.5, a, b).unwrap();
            let center = evaluate_f_on_axis(&p, 0.0).unwrap();
            assert_abs_diff_eq!(center.re, a, epsilon = 1e-8);
            assert_abs_diff_eq!(center.im, b, epsilon = 1e-8);
            let top = evaluate_f_on_axis(&p, 0.5).unwrap().re;
            for &s in &[0.0, 0.125, 0.25, 0.375, 0.6, 0.9] {
                let value = evaluate_f_on_axis(&p, s).unwrap();
                assert!(value.norm() < 1.0);
                if s < 0.5 {
                    assert!(value.re < top);
                }
            }
        }
        assert!(evaluate_f_on_axis(&cap, 1.0).is_err());
    }

    #[test]
    fn constant_data_extends_to_itself() {
        let c = Complex64::new(0.3, -0.4);
        for n in 2..5 {
            let data = BoundaryData::constant(n, c).unwrap();
            let mut x = vec![0.0; n];
            x[0] = 0.4;
            x[n - 1] = -0.5;
            let value = evaluate_poisson_general(&data, &x).unwrap();
            assert_abs_diff_eq!((value - c).norm(), 0.0, epsilon = 1e-14);
            assert!(data.is_bounded());
        }
    }

    #[test]
    fn zonal_data_matches_axis_evaluation() {
        let p = build_extremal(3, 0.6, 0.2, 0.5).unwrap();
        let data = BoundaryData::extremal(&p);
        for &s in &[0.0, 0.3, 0.6] {
            let direct = evaluate_f_on_axis(&p, s).unwrap();
            let general = evaluate_poisson_general(&data, &[0.0, 0.0, s]).unwrap();
            assert_abs_diff_eq!((direct - general).norm(), 0.0, epsilon = 1e-9);
        }
        assert!(data.is_bounded());
    }

    #[test]
    fn zonal_off_axis_matches_sphere_grid() {
        let g = |t: f64| Complex64::new((2.0 * t).cos(), t * t * t);
        let zonal = BoundaryData::zonal(3, DEFAULT_ORDER, &[], g).unwrap();
        let grid =
            BoundaryData::gridded(3, SPHERE_GRID.0, SPHERE_GRID.1, move |w| g(w[2])).unwrap();
        for x in [[0.3, 0.1, 0.2], [0.0, -0.5, 0.1], [0.45, 0.2, -0.3]] {
            let a = evaluate_poisson_general(&zonal, &x).unwrap();
            let b = evaluate_poisson_general(&grid, &x).unwrap();
            assert_abs_diff_eq!((a - b).norm(), 0.0, epsilon = 1e-10);
        }
    }

    #[test]
    fn circle_grid_reproduces_harmonic_polynomial() {
        // boundary values of z² + 0.5 z̄
        let data = BoundaryData::gridded(2, 0, 64, |w| {
            let z = Complex64::new(w[0], w[1]);
            z * z + 0.5 * z.conj()
        })
        .unwrap();
        let z = Complex64::new(0.3, -0.45);
        let value = evaluate_poisson_general(&data, &[z.re, z.im]).unwrap();
        assert_abs_diff_eq!(
            (value - (z * z + 0.5 * z.conj())).norm(),
            0.0,
            epsilon = 1e-12
        );
    }

    #[test]
    fn rotated_half_circle_matches_arc_measure() {
        for &phi0 in &[0.0, 0.7, 2.5, -1.2] {
            let axis = vec![(phi0 + PI / 2.0).cos(), (phi0 + PI / 2.0).sin()];
            let caps = vec![Cap {
                axis,
                level: 0.0,
                weight: Complex64::new(2.0, 0.0),
            }];
            let data = BoundaryData::Caps(CapSum::new(2, Complex64::new(-1.0, 0.0), caps).unwrap());
            for &(rho, psi) in &[(0.5, 0.3), (0.8, 2.0), (0.2, -2.9), (0.0, 0.0)] {
                let z = Complex64::from_polar(rho, psi);
                let value = evaluate_poisson_general(&data, &[z.re, z.im]).unwrap();
                let exact = 2.0 * arc_measure(phi0, phi0 + PI, z) - 1.0;
                assert_abs_diff_eq!(value.re, exact, epsilon = 1e-10);
            }
        }
    }

    #[test]
    fn cap_sums_have_their_mean_at_the_origin() {
        let caps = vec![
            Cap {
                axis: vec![0.2, 0.3, 0.9],
                level: 0.4,
                weight: Complex64::new(0.3, 0.1),
            },
            Cap {
                axis: vec![-1.0, 0.0, 0.1],
                level: -0.2,
                weight: Complex64::new(-0.2, 0.4),
            },
        ];
        let sum = CapSum::new(3, Complex64::new(0.1, 0.0), caps).unwrap();
        let mean = sum.mean();
        let data = BoundaryData::Caps(sum);
        let at_origin = evaluate_poisson_general(&data, &[0.0; 3]).unwrap();
        assert_abs_diff_eq!((at_origin - mean).norm(), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn cap_poisson_integral_matches_grid_for_n3() {
        let caps = vec![Cap {
            axis: vec![0.6, 0.0, 0.8],
            level: 0.3,
            weight: Complex64::new(1.0, -0.5),
        }];
        let sum = CapSum::new(3, Complex64::new(0.0, 0.0), caps).unwrap();
        let reference = sum.clone();
        let data = BoundaryData::Caps(sum);
        // a fine product rule on the discontinuous data converges slowly; a
        // loose check against it guards against gross geometry errors
        let grid = BoundaryData::gridded(3, 400, 800, move |w| reference.value(w)).unwrap();
        let x = [0.1, 0.3, 0.2];
        let a = evaluate_poisson_general(&data, &x).unwrap();
        let b = evaluate_poisson_general(&grid, &x).unwrap();
        assert_abs_diff_eq!((a - b).norm(), 0.0, epsilon = 2e-3);
    }

    #[test]
    fn sup_norm_sees_every_face() {
        let caps = vec![
            Cap {
                axis: vec![1.0, 0.0],
                level: 0.5,
                weight: Complex64::new(0.5, 0.0),
            },
            Cap {
                axis: vec![0.8, 0.6],
                level: 0.7,
                weight: Complex64::new(0.4, 0.0),
            },
        ];
        let sum = CapSum::new(2, Complex64::new(0.05, 0.0), caps).unwrap();
        assert_abs_diff_eq!(sum.sup_norm().unwrap(), 0.95, epsilon = 1e-15);

        let caps3 = vec![
            Cap {
                axis: vec![0.0, 0.0, 1.0],
                level: 0.8,
                weight: Complex64::new(0.3, 0.2),
            },
            Cap {
                axis: vec![0.3, 0.0, 1.0],
                level: 0.85,
                weight: Complex64::new(0.3, 0.2),
            },
            Cap {
                axis: vec![0.0, 0.3, 1.0],
                level: 0.9,
                weight: Complex64::new(0.3, 0.2),
            },
            Cap {
                axis: vec![0.0, 0.0, -1.0],
                level: 0.0,
                weight: Complex64::new(-0.4, 0.0),
            },
        ];
        let sum3 = CapSum::new(3, Complex64::new(0.0, 0.0), caps3).unwrap();
        let exact = sum3.sup_norm().unwrap();
        let mut sampled: f64 = 0.0;
        let (m, k) = (400, 800);
        for i in 0..m {
            let theta = PI * (i as f64 + 0.5) / m as f64;
            for j in 0..k {
                let phi = 2.0 * PI * j as f64 / k as f64;
                let w = [
                    theta.sin() * phi.cos(),
                    theta.sin() * phi.sin(),
                    theta.cos(),
                ];
                sampled = sampled.max(sum3.value(&w).norm());
            }
        }
        assert!(sampled <= exact + 1e-15);
        assert_abs_diff_eq!(
            exact,
            (0.9f64.powi(2) + 0.6f64.powi(2)).sqrt(),
            epsilon = 1e-12
        );
        assert!(CapSum::new(4, Complex64::new(0.0, 0.0), vec![])
            .unwrap()
            .sup_norm()
            .is_err());
    }

    #[test]
    fn unsupported_grids_are_reported() {
        let err = BoundaryData::gridded(4, 16, 16, |_| Complex64::new(0.0, 0.0)).unwrap_err();
        assert!(matches!(err, Error::Capability(_)));
        let data = BoundaryData::constant(3, Complex64::new(0.1, 0.0)).unwrap();
        assert!(evaluate_poisson_general(&data, &[0.1, 0.2]).is_err());
        assert!(evaluate_poisson_general(&data, &[0.9, 0.5, 0.0]).is_err());
    }
}
