//! The value region `E_{r,ρ}` of `F(rN)` over harmonic `F: B^n → D` with
//! `F(0) = ρ`.
//!
//! `E` is the intersection of the half-planes `P_β = {Re(w e^{-iβ}) ≤ h(β)}`
//! with support function `h(β) = U_{ρcos β, -ρ sin β, r}(rN)`. Its boundary
//! is traced by `f(β) = e^{iβ} F_{ρcos β, -ρ sin β, r}(rN)`. The polygon kept
//! here intersects finitely many `P_β`, so it contains `E`.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{domain, Error, Result};
use crate::extremal::{build_extremal_with, ExtremalProfile, ProfileKind, SolverOptions};
use crate::poisson::evaluate_f_on_axis;

pub const DEFAULT_BETA_SAMPLES: usize = 256;
pub const DEFAULT_CONTAINMENT_TOL: f64 = 1e-6;
/// `|b|` below this is treated as the real diameter `b = 0`.
pub const REAL_AXIS_SNAP: f64 = 1e-10;

/// Moments `(ρ cos β, -ρ sin β)` of the extremal supporting `P_β`.
pub fn support_moments(rho: f64, beta: f64) -> (f64, f64) {
    let (sin, cos) = beta.sin_cos();
    let b = -rho * sin;
    (rho * cos, if b.abs() < REAL_AXIS_SNAP { 0.0 } else { b })
}

fn check_rho(rho: f64) -> Result<()> {
    if !(0.0..1.0).contains(&rho) {
        return domain(format!("rho = {rho} outside [0, 1)"));
    }
    Ok(())
}

fn support_profile(
    dimension: usize,
    r: f64,
    rho: f64,
    beta: f64,
    start: Option<(f64, f64)>,
    options: &SolverOptions,
) -> Result<ExtremalProfile> {
    check_rho(rho)?;
    let (a, b) = support_moments(rho, beta);
    build_extremal_with(dimension, r, a, b, start, options)
}

/// `h(β)`.
pub fn support_value(dimension: usize, r: f64, rho: f64, beta: f64) -> Result<f64> {
    Ok(boundary_point(dimension, r, rho, beta)?.re_rotated(beta))
}

/// `f(β)`.
pub fn boundary_point(dimension: usize, r: f64, rho: f64, beta: f64) -> Result<Complex64> {
    let profile = support_profile(dimension, r, rho, beta, None, &SolverOptions::default())?;
    Ok(Complex64::from_polar(1.0, beta) * evaluate_f_on_axis(&profile, r)?)
}

trait Rotated {
    /// `Re(w e^{-iβ})`.
    fn re_rotated(self, beta: f64) -> f64;
}

impl Rotated for Complex64 {
    fn re_rotated(self, beta: f64) -> f64 {
        let (sin, cos) = beta.sin_cos();
        self.re * cos + self.im * sin
    }
}

/// `h` and `f` on the grid `β_k = -π + 2πk/m`, `k = 0..=m`.
#[derive(Debug, Clone)]
pub struct SupportCurve {
    pub dimension: usize,
    pub r: f64,
    pub rho: f64,
    pub betas: Vec<f64>,
    pub h: Vec<f64>,
    pub f: Vec<Complex64>,
    pub profiles: Vec<ExtremalProfile>,
}

/// Convex polygon `⋂_k P_{β_k}`, counterclockwise, not closed. Edge `i`
/// runs from `vertices[i]` to `vertices[i+1]` on the line `l_{beta_of_edge[i]}`.
#[derive(Debug, Clone)]
pub struct RegionPolygon {
    pub vertices: Vec<Complex64>,
    pub beta_of_edge: Vec<f64>,
}

impl RegionPolygon {
    /// Vertices with the first repeated at the end.
    pub fn closed(&self) -> Vec<Complex64> {
        let mut v = self.vertices.clone();
        if let Some(&first) = v.first() {
            v.push(first);
        }
        v
    }

    fn edges(&self) -> impl Iterator<Item = (Complex64, Complex64)> + '_ {
        let k = self.vertices.len();
        (0..k).map(move |i| (self.vertices[i], self.vertices[(i + 1) % k]))
    }

    pub fn area(&self) -> f64 {
        0.5 * self
            .edges()
            .map(|(p, q)| p.re * q.im - q.re * p.im)
            .sum::<f64>()
    }

    /// Area centroid.
    pub fn centroid(&self) -> Complex64 {
        let mut c = Complex64::new(0.0, 0.0);
        let mut twice_area = 0.0;
        for (p, q) in self.edges() {
            let cross = p.re * q.im - q.re * p.im;
            twice_area += cross;
            c += (p + q) * cross;
        }
        c / (3.0 * twice_area)
    }

    pub fn diameter(&self) -> f64 {
        let v = &self.vertices;
        let mut best: f64 = 0.0;
        for i in 0..v.len() {
            for j in i + 1..v.len() {
                best = best.max((v[i] - v[j]).norm());
            }
        }
        best
    }

    /// Whether consecutive edges never turn clockwise (beyond `slack`).
    pub fn is_convex(&self, slack: f64) -> bool {
        let k = self.vertices.len();
        (0..k).all(|i| {
            let a = self.vertices[(i + 1) % k] - self.vertices[i];
            let b = self.vertices[(i + 2) % k] - self.vertices[(i + 1) % k];
            a.re * b.im - a.im * b.re >= -slack
        })
    }

    /// Euclidean distance from `w` to the polygon boundary.
    pub fn boundary_distance(&self, w: Complex64) -> f64 {
        self.edges()
            .map(|(p, q)| {
                let d = q - p;
                let len2 = d.norm_sqr();
                let s = if len2 > 0.0 {
                    (((w - p) * d.conj()).re / len2).clamp(0.0, 1.0)
                } else {
                    0.0
                };
                (p + d * s - w).norm()
            })
            .fold(f64::INFINITY, f64::min)
    }
}

#[derive(Debug, Clone)]
pub struct Region {
    pub curve: SupportCurve,
    pub polygon: RegionPolygon,
    pub options: SolverOptions,
}

/// Sample the support function and intersect the half-planes.
pub fn build_region(dimension: usize, r: f64, rho: f64, m_beta: usize) -> Result<Region> {
    build_region_with(dimension, r, rho, m_beta, &SolverOptions::default())
}

pub fn build_region_with(
    dimension: usize,
    r: f64,
    rho: f64,
    m_beta: usize,
    options: &SolverOptions,
) -> Result<Region> {
    check_rho(rho)?;
    if m_beta < 16 || !m_beta.is_multiple_of(2) {
        return domain(format!(
            "beta samples must be even and at least 16, got {m_beta}"
        ));
    }
    let betas: Vec<f64> = (0..=m_beta)
        .map(|k| match k {
            0 => -PI,
            k if k == m_beta => PI,
            k if 2 * k == m_beta => 0.0,
            k => -PI + 2.0 * PI * k as f64 / m_beta as f64,
        })
        .collect();
    let half = m_beta / 2;
    let mut profiles: Vec<Option<ExtremalProfile>> = vec![None; m_beta + 1];
    // sweep β ∈ [0, π] warm-starting each solve from its neighbour; the
    // mirror β < 0 has the same real profile and starts at the solution
    let mut previous: Option<(f64, f64)> = None;
    for k in half..=m_beta {
        let profile = support_profile(dimension, r, rho, betas[k], previous, options)?;
        previous = multipliers(&profile);
        let mirror = m_beta - k;
        if mirror != k {
            profiles[mirror] = Some(support_profile(
                dimension,
                r,
                rho,
                betas[mirror],
                multipliers(&profile),
                options,
            )?);
        }
        profiles[k] = Some(profile);
    }
    let profiles: Vec<ExtremalProfile> = profiles.into_iter().map(|p| p.expect("filled")).collect();
    let mut f = Vec::with_capacity(m_beta + 1);
    let mut h = Vec::with_capacity(m_beta + 1);
    for (profile, &beta) in profiles.iter().zip(&betas) {
        let value = Complex64::from_polar(1.0, beta) * evaluate_f_on_axis(profile, r)?;
        h.push(value.re_rotated(beta));
        f.push(value);
    }
    let polygon = intersect_half_planes(&betas[..m_beta], &h[..m_beta])?;
    Ok(Region {
        curve: SupportCurve {
            dimension,
            r,
            rho,
            betas,
            h,
            f,
            profiles,
        },
        polygon,
        options: *options,
    })
}

fn multipliers(profile: &ExtremalProfile) -> Option<(f64, f64)> {
    match profile.kind {
        ProfileKind::Smooth(p) => Some((p.lambda, p.mu)),
        ProfileKind::Cap(_) => None,
    }
}

/// Clip a box around the unit disk by every half-plane
/// `Re(w e^{-iβ_k}) ≤ h_k`.
fn intersect_half_planes(betas: &[f64], h: &[f64]) -> Result<RegionPolygon> {
    let corners = [(2.0, -2.0), (2.0, 2.0), (-2.0, 2.0), (-2.0, -2.0)];
    let mut poly: Vec<(Complex64, Option<usize>)> = corners
        .iter()
        .map(|&(x, y)| (Complex64::new(x, y), None))
        .collect();
    for (k, (&beta, &offset)) in betas.iter().zip(h).enumerate() {
        let side = |p: Complex64| p.re_rotated(beta) - offset;
        let mut next = Vec::with_capacity(poly.len() + 1);
        for i in 0..poly.len() {
            let (p, label) = poly[i];
            let q = poly[(i + 1) % poly.len()].0;
            let (dp, dq) = (side(p), side(q));
            if dp <= 0.0 {
                next.push((p, label));
                if dq > 0.0 {
                    next.push((p + (q - p) * (dp / (dp - dq)), Some(k)));
                }
            } else if dq <= 0.0 {
                next.push((p + (q - p) * (dp / (dp - dq)), label));
            }
        }
        next.dedup_by(|b, a| (a.0 - b.0).norm() < 1e-14);
        if next.len() > 1 && (next[0].0 - next[next.len() - 1].0).norm() < 1e-14 {
            next.pop();
        }
        if next.len() < 3 {
            return Err(Error::Internal("half-plane intersection is empty".into()));
        }
        poly = next;
    }
    let mut beta_of_edge = Vec::with_capacity(poly.len());
    for &(_, label) in &poly {
        match label {
            Some(k) => beta_of_edge.push(betas[k]),
            None => {
                return Err(Error::Internal(
                    "half-planes leave the region unbounded".into(),
                ))
            }
        }
    }
    Ok(RegionPolygon {
        vertices: poly.into_iter().map(|(v, _)| v).collect(),
        beta_of_edge,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Placement {
    Inside,
    Boundary,
    Outside,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Containment {
    pub placement: Placement,
    /// `max_k Re(w e^{-iβ_k}) - h(β_k)`; negative inside.
    pub margin: f64,
}

fn classify(margin: f64, tol: f64) -> Placement {
    if margin > tol {
        Placement::Outside
    } else if margin < -tol {
        Placement::Inside
    } else {
        Placement::Boundary
    }
}

impl Region {
    pub fn contains(&self, w: Complex64, tol: f64) -> Containment {
        let m = self.curve.betas.len() - 1;
        let margin = self.curve.betas[..m]
            .iter()
            .zip(&self.curve.h)
            .map(|(&beta, &h)| w.re_rotated(beta) - h)
            .fold(f64::NEG_INFINITY, f64::max);
        Containment {
            placement: classify(margin, tol),
            margin,
        }
    }

    /// Containment in `e^{iα} E`.
    pub fn contains_rotated(&self, alpha: f64, w: Complex64, tol: f64) -> Containment {
        self.contains(w * Complex64::from_polar(1.0, -alpha), tol)
    }

    /// Polygon vertices of `e^{iα} E`.
    pub fn rotated_vertices(&self, alpha: f64) -> Vec<Complex64> {
        let turn = Complex64::from_polar(1.0, alpha);
        self.polygon.vertices.iter().map(|v| v * turn).collect()
    }

    fn point_at(
        &self,
        beta: f64,
        start: Option<(f64, f64)>,
    ) -> Result<(Complex64, ExtremalProfile)> {
        let c = &self.curve;
        let profile = support_profile(c.dimension, c.r, c.rho, beta, start, &self.options)?;
        let value = Complex64::from_polar(1.0, beta) * evaluate_f_on_axis(&profile, c.r)?;
        Ok((value, profile))
    }

    /// Two boundary points whose convex combination is `target`, on the
    /// chord through `target` and the polygon centroid.
    pub fn witness(&self, target: Complex64, tol: f64) -> Result<WitnessSpec> {
        if self.contains(target, tol).placement == Placement::Outside {
            return domain(format!("target {target} lies outside the region"));
        }
        let c = &self.curve;
        let mut direction = target - self.polygon.centroid();
        if direction.norm() < 1e-12 {
            direction = Complex64::new(1.0, 0.0);
        }
        let direction = direction / direction.norm();
        let offset = |w: Complex64| ((w - target) * direction.conj()).im;
        let along = |w: Complex64| ((w - target) * direction.conj()).re;
        let g: Vec<f64> = c.f.iter().map(|&w| offset(w)).collect();
        let m = c.betas.len() - 1;
        let mut crossings: Vec<(f64, Complex64, ExtremalProfile)> = Vec::new();
        // nodes within rounding of the chord count as crossings; β = ±π is
        // one point of the curve and is visited once
        let on_chord = |x: f64| x.abs() <= 1e-14;
        for k in 0..m {
            if on_chord(g[k]) {
                crossings.push((c.betas[k], c.f[k], c.profiles[k]));
                continue;
            }
            if on_chord(g[k + 1]) || (g[k] < 0.0) == (g[k + 1] < 0.0) {
                continue;
            }
            crossings.push(self.polish_crossing(k, &offset)?);
        }
        let mut scored: Vec<(f64, (f64, Complex64, ExtremalProfile))> =
            crossings.into_iter().map(|x| (along(x.1), x)).collect();
        scored.sort_by(|a, b| a.0.total_cmp(&b.0));
        let nearest = scored
            .iter()
            .enumerate()
            .min_by(|a, b| a.1 .0.abs().total_cmp(&b.1 .0.abs()))
            .map(|(i, _)| i)
            .ok_or_else(|| Error::Internal("chord misses the boundary curve".into()))?;
        if scored[nearest].0.abs() <= 1e-9 {
            let (_, first) = scored[nearest];
            let (_, other) = scored[if nearest == 0 { scored.len() - 1 } else { 0 }];
            return Ok(WitnessSpec::new(c.rho, target, first, other, 1.0));
        }
        let below = scored.iter().rev().find(|x| x.0 < 0.0);
        let above = scored.iter().find(|x| x.0 > 0.0);
        match (below, above) {
            (Some(&(s1, p1)), Some(&(s2, p2))) => {
                let k1 = s2 / (s2 - s1);
                Ok(WitnessSpec::new(c.rho, target, p1, p2, k1))
            }
            _ => domain(format!("target {target} lies outside the boundary curve")),
        }
    }

    /// Root of `offset(f(β))` in `[β_k, β_{k+1}]` by the Illinois method.
    fn polish_crossing<G: Fn(Complex64) -> f64>(
        &self,
        k: usize,
        offset: &G,
    ) -> Result<(f64, Complex64, ExtremalProfile)> {
        let c = &self.curve;
        let seed = multipliers(&c.profiles[k]).or_else(|| multipliers(&c.profiles[k + 1]));
        let (mut x0, mut x1) = (c.betas[k], c.betas[k + 1]);
        let (mut g0, mut g1) = (offset(c.f[k]), offset(c.f[k + 1]));
        let mut best = if g0.abs() < g1.abs() {
            (x0, c.f[k], c.profiles[k])
        } else {
            (x1, c.f[k + 1], c.profiles[k + 1])
        };
        let mut best_g = g0.abs().min(g1.abs());
        for _ in 0..100 {
            if best_g < 1e-13 || (x1 - x0).abs() < 1e-15 {
                break;
            }
            let x = x1 - g1 * (x1 - x0) / (g1 - g0);
            let x = if x > x0.min(x1) && x < x0.max(x1) {
                x
            } else {
                0.5 * (x0 + x1)
            };
            let (w, profile) = self.point_at(x, seed)?;
            let gx = offset(w);
            if gx.abs() < best_g {
                best_g = gx.abs();
                best = (x, w, profile);
            }
            if (gx < 0.0) == (g1 < 0.0) {
                g0 *= 0.5;
            } else {
                x0 = x1;
                g0 = g1;
            }
            x1 = x;
            g1 = gx;
        }
        Ok(best)
    }
}

/// `F = k₁ e^{iβ₁} F_{β₁} + k₂ e^{iβ₂} F_{β₂}` with `F(0) = ρ` and
/// `F(rN) = target`.
#[derive(Debug, Clone)]
pub struct WitnessSpec {
    pub rho: f64,
    pub target: Complex64,
    pub beta1: f64,
    pub beta2: f64,
    pub k1: f64,
    pub k2: f64,
    pub w1: Complex64,
    pub w2: Complex64,
    pub profiles: [ExtremalProfile; 2],
}

impl WitnessSpec {
    fn new(
        rho: f64,
        target: Complex64,
        first: (f64, Complex64, ExtremalProfile),
        second: (f64, Complex64, ExtremalProfile),
        k1: f64,
    ) -> Self {
        Self {
            rho,
            target,
            beta1: first.0,
            beta2: second.0,
            k1,
            k2: 1.0 - k1,
            w1: first.1,
            w2: second.1,
            profiles: [first.2, second.2],
        }
    }

    /// `k₁ f(β₁) + k₂ f(β₂)`.
    pub fn combination(&self) -> Complex64 {
        self.w1 * self.k1 + self.w2 * self.k2
    }

    /// `F(sN)`.
    pub fn evaluate_on_axis(&self, s: f64) -> Result<Complex64> {
        let f1 = evaluate_f_on_axis(&self.profiles[0], s)?;
        let f2 = evaluate_f_on_axis(&self.profiles[1], s)?;
        Ok(Complex64::from_polar(self.k1, self.beta1) * f1
            + Complex64::from_polar(self.k2, self.beta2) * f2)
    }
}

/// Classify `w` against `e^{iα} E_{r,|F0|}` with `α = arg F0`.
pub fn rotated_contains(
    dimension: usize,
    r: f64,
    f0: Complex64,
    w: Complex64,
    tol: f64,
    m_beta: usize,
) -> Result<Containment> {
    if !(f0.norm() < 1.0) {
        return domain(format!("|F(0)| = {} must be below 1", f0.norm()));
    }
    let region = build_region(dimension, r, f0.norm(), m_beta)?;
    Ok(region.contains_rotated(f0.arg(), w, tol))
}

/// Witness harmonic function reaching `target` at `rN`.
pub fn witness_function(
    dimension: usize,
    r: f64,
    rho: f64,
    target: Complex64,
) -> Result<WitnessSpec> {
    build_region(dimension, r, rho, DEFAULT_BETA_SAMPLES)?.witness(target, DEFAULT_CONTAINMENT_TOL)
}
