//! File formats and exit codes of the `harmonic-pick` command.

use std::fmt::Write as _;

use harmonic_pick::extremal::{ExtremalProfile, ProfileKind};
use harmonic_pick::oracle::{ClaimCheck, TrialReport};
use harmonic_pick::region::Region;
use harmonic_pick::Error;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

pub const EXIT_OK: u8 = 0;
pub const EXIT_NEGATIVE: u8 = 1;
pub const EXIT_USAGE: u8 = 2;
pub const EXIT_NUMERICAL: u8 = 3;

/// Bad input maps to a usage error, everything else to a numerical failure.
pub fn exit_code(error: &Error) -> u8 {
    match error {
        Error::Domain(_) | Error::Capability(_) | Error::Infeasible(_) => EXIT_USAGE,
        Error::SolverFailure { .. } | Error::Internal(_) => EXIT_NUMERICAL,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegionMetadata {
    pub n: usize,
    pub r: f64,
    pub rho: f64,
    pub alpha: f64,
    pub beta_samples: usize,
    pub quad_order: usize,
    pub version: String,
}

/// The region `e^{iα} E_{r,ρ}`: `beta[k]` is the outward normal angle of
/// the boundary point `curve[k]`, `h[k]` its support value.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegionDocument {
    pub metadata: RegionMetadata,
    pub beta: Vec<f64>,
    pub h: Vec<f64>,
    pub curve_re: Vec<f64>,
    pub curve_im: Vec<f64>,
    /// Closed: the first vertex is repeated at the end.
    pub polygon: Vec<[f64; 2]>,
}

impl RegionDocument {
    pub fn new(region: &Region, alpha: f64, quad_order: usize) -> Self {
        let curve = &region.curve;
        let rotation = Complex64::from_polar(1.0, alpha);
        let rotated: Vec<Complex64> = curve.f.iter().map(|f| rotation * f).collect();
        Self {
            metadata: RegionMetadata {
                n: curve.dimension,
                r: curve.r,
                rho: curve.rho,
                alpha,
                beta_samples: curve.betas.len() - 1,
                quad_order,
                version: env!("CARGO_PKG_VERSION").to_string(),
            },
            beta: curve.betas.iter().map(|b| b + alpha).collect(),
            h: curve.h.clone(),
            curve_re: rotated.iter().map(|z| z.re).collect(),
            curve_im: rotated.iter().map(|z| z.im).collect(),
            polygon: region
                .polygon
                .closed()
                .iter()
                .map(|v| {
                    let z = rotation * v;
                    [z.re, z.im]
                })
                .collect(),
        }
    }

    pub fn to_json(&self) -> String {
        let mut text = serde_json::to_string_pretty(self).expect("region document is serializable");
        text.push('\n');
        text
    }

    pub fn from_json(text: &str) -> serde_json::Result<Self> {
        serde_json::from_str(text)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("beta,h,re,im\n");
        for k in 0..self.beta.len() {
            let _ = writeln!(
                out,
                "{},{},{},{}",
                self.beta[k], self.h[k], self.curve_re[k], self.curve_im[k]
            );
        }
        out
    }

    /// The boundary curve on a 1000×1000 canvas showing the closed unit disk.
    pub fn to_svg(&self) -> String {
        let px = |x: f64| 500.0 + 500.0 * x;
        let py = |y: f64| 500.0 - 500.0 * y;
        let mut path = String::new();
        for (k, (x, y)) in self.curve_re.iter().zip(&self.curve_im).enumerate() {
            let _ = write!(
                path,
                "{}{:.3},{:.3} ",
                if k == 0 { "M" } else { "L" },
                px(*x),
                py(*y)
            );
        }
        path.push('Z');
        let m = &self.metadata;
        format!(
            concat!(
                "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 1000 1000\" width=\"1000\" height=\"1000\">\n",
                "  <title>n={} r={} rho={} alpha={}</title>\n",
                "  <circle cx=\"500\" cy=\"500\" r=\"500\" fill=\"none\" stroke=\"#888888\" stroke-width=\"1\"/>\n",
                "  <path d=\"{}\" fill=\"#4477aa\" fill-opacity=\"0.25\" stroke=\"#224466\" stroke-width=\"1.5\"/>\n",
                "</svg>\n"
            ),
            m.n, m.r, m.rho, m.alpha, path
        )
    }
}

/// Header lines and `t,u,v` rows of an extremal profile on `samples`
/// equally spaced `t ∈ [-1, 1]`.
pub fn extremal_table(profile: &ExtremalProfile, samples: usize) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "# n={} r={} a={} b={}",
        profile.dimension, profile.r, profile.a, profile.b
    );
    match profile.kind {
        ProfileKind::Smooth(p) => {
            let _ = writeln!(
                out,
                "# kind=smooth lambda={} mu={} residual_r={:e} residual_i={:e} iterations={}",
                p.lambda, p.mu, p.residual.0, p.residual.1, p.iterations
            );
        }
        ProfileKind::Cap(c) => {
            let _ = writeln!(
                out,
                "# kind=cap t_a={} level={}",
                c.t_a,
                c.kernel_level(profile.r)
            );
        }
    }
    out.push_str("t,u,v\n");
    let steps = samples.max(2) - 1;
    for k in 0..=steps {
        let t = (-1.0 + 2.0 * k as f64 / steps as f64).clamp(-1.0, 1.0);
        let _ = writeln!(out, "{},{},{}", t, profile.u(t), profile.signed_v(t));
    }
    out
}

/// Written by `verify`: the trial report plus the structural claim checks.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    #[serde(flatten)]
    pub trials: TrialReport,
    pub claims: Vec<ClaimCheck>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.trials.passed() && self.claims.iter().all(|c| c.passed)
    }

    pub fn to_json(&self) -> String {
        let mut text = serde_json::to_string_pretty(self).expect("report is serializable");
        text.push('\n');
        text
    }
}
