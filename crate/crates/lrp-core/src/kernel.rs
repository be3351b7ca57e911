//! Model definition: norm, kernels, edge probabilities, activation radii.
//!
//! Conventions fixed once for the whole toolkit:
//! * the norm is the scaled sup norm `‖x‖ = 2‖x‖_∞`, whose unit ball
//!   `[-1/2,1/2]^d` has Lebesgue measure exactly 1;
//! * the kernel derivative is `|J'(t)| = t^{-d-α-1}` exactly, so the cut-off
//!   kernel and activation radii have closed forms with zero model error.
//!
//! Lattice distances under this norm are the even integers `2‖Δ‖_∞`.

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum KernelError {
    #[error("dimension must be >= 1, got {0}")]
    BadDimension(u32),
    #[error("alpha must be positive and finite, got {0}")]
    BadAlpha(f64),
    #[error("beta must be nonnegative and finite, got {0}")]
    BadBeta(f64),
    #[error("critical-line preset requires d < 6, got d = {0}")]
    NotCriticalLine(u32),
    #[error("non-finite input: {0}")]
    NonFinite(&'static str),
    #[error("uniform must lie strictly inside (0,1), got {0}")]
    BadUniform(f64),
}

/// Static description of the model: dimension, decay exponent, inverse
/// temperature. `norm_scale` is fixed to 2 by the normalization convention.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KernelSpec {
    pub d: u32,
    pub alpha: f64,
    pub beta: f64,
    pub norm_scale: f64,
}

impl KernelSpec {
    pub fn new(d: u32, alpha: f64, beta: f64) -> Result<Self, KernelError> {
        if d < 1 {
            return Err(KernelError::BadDimension(d));
        }
        if !(alpha > 0.0) || !alpha.is_finite() {
            return Err(KernelError::BadAlpha(alpha));
        }
        if !(beta >= 0.0) || !beta.is_finite() {
            return Err(KernelError::BadBeta(beta));
        }
        Ok(KernelSpec { d, alpha, beta, norm_scale: 2.0 })
    }

    /// Critical-line preset `alpha = d/3`, valid for `d < 6`.
    pub fn critical_line(d: u32, beta: f64) -> Result<Self, KernelError> {
        if d >= 6 {
            return Err(KernelError::NotCriticalLine(d));
        }
        KernelSpec::new(d, d as f64 / 3.0, beta)
    }

    pub fn with_beta(&self, beta: f64) -> Self {
        KernelSpec { beta, ..*self }
    }

    /// `d + alpha`, the decay exponent of the kernel.
    #[inline]
    pub fn decay(&self) -> f64 {
        self.d as f64 + self.alpha
    }

    /// Scaled sup norm `2 max_i |x_i|` of a lattice vector.
    pub fn norm(&self, x: &[i64]) -> f64 {
        debug_assert_eq!(x.len(), self.d as usize);
        2.0 * x.iter().map(|c| c.abs()).max().unwrap_or(0) as f64
    }

    /// Full kernel `J(t) = t^{-d-α} / (d+α)` for `t > 0`.
    pub fn full_kernel(&self, dist: f64) -> f64 {
        let a = self.decay();
        dist.powf(-a) / a
    }

    /// Cut-off kernel `J_r(t) = ∫_t^r s^{-d-α-1} ds` for `0 < t ≤ r`, else 0.
    pub fn cutoff_kernel(&self, dist: f64, r: f64) -> Result<f64, KernelError> {
        if !dist.is_finite() || dist <= 0.0 {
            return Err(KernelError::NonFinite("dist"));
        }
        if r.is_nan() || r <= 0.0 {
            return Err(KernelError::NonFinite("r"));
        }
        if dist > r {
            return Ok(0.0);
        }
        let a = self.decay();
        let tail = if r.is_infinite() { 0.0 } else { r.powf(-a) };
        Ok((dist.powf(-a) - tail) / a)
    }

    /// Edge probability `1 - exp(-β J_r(dist))` at inverse temperature `beta`.
    pub fn edge_probability(&self, dist: f64, r: f64, beta: f64) -> Result<f64, KernelError> {
        if !(beta >= 0.0) {
            return Err(KernelError::BadBeta(beta));
        }
        Ok(-(-beta * self.cutoff_kernel(dist, r)?).exp_m1())
    }

    /// Least `r` such that the edge at distance `dist` is open given uniform `u`:
    /// `r* = (dist^{-d-α} - (d+α) t)^{-1/(d+α)}` with `t = -ln(1-u)/β`, or `+∞`
    /// when the full kernel cannot supply that much weight. Always `r* ≥ dist`.
    pub fn activation_radius(&self, dist: f64, beta: f64, u: f64) -> Result<f64, KernelError> {
        if !dist.is_finite() || dist <= 0.0 {
            return Err(KernelError::NonFinite("dist"));
        }
        if !(beta > 0.0) || !beta.is_finite() {
            return Err(KernelError::BadBeta(beta));
        }
        if !(u > 0.0 && u < 1.0) {
            return Err(KernelError::BadUniform(u));
        }
        let a = self.decay();
        let t = -(-u).ln_1p() / beta; // -ln(1-u)/beta
        let head = dist.powf(-a) - a * t;
        if head <= 0.0 {
            Ok(f64::INFINITY)
        } else {
            Ok(head.powf(-1.0 / a).max(dist))
        }
    }

    /// `|B_r ∩ Z^d| = (2⌊r/2⌋+1)^d` under the scaled sup norm.
    pub fn ball_size(&self, r: f64) -> u64 {
        if r < 0.0 {
            return 0;
        }
        let m = (r / 2.0).floor() as u64;
        (2 * m + 1).pow(self.d)
    }

    /// Deterministic (lexicographic) enumeration of `B_r ∩ Z^d`.
    pub fn ball_points(&self, r: f64) -> Vec<Vec<i64>> {
        let m = if r < 0.0 { return Vec::new() } else { (r / 2.0).floor() as i64 };
        let d = self.d as usize;
        let mut out = Vec::with_capacity(self.ball_size(r) as usize);
        let mut cur = vec![-m; d];
        loop {
            out.push(cur.clone());
            let mut i = d;
            loop {
                if i == 0 {
                    return out;
                }
                i -= 1;
                if cur[i] < m {
                    cur[i] += 1;
                    for c in cur.iter_mut().skip(i + 1) {
                        *c = -m;
                    }
                    break;
                }
            }
        }
    }

    /// Number of lattice points at norm distance exactly `2m` (shell `m ≥ 1`).
    pub fn shell_size(&self, m: u64) -> u64 {
        (2 * m + 1).pow(self.d) - (2 * m - 1).pow(self.d)
    }

    /// Total kernel weight `Σ_{x≠0} J(0,x)`. Shell terms decay like `m^{-1-α}`,
    /// so the tail after shell `m` is below `term(m) · m / α`; we stop once that
    /// bound drops under `tol` relative to the partial sum.
    pub fn total_weight(&self, tol: f64) -> f64 {
        let mut sum = 0.0;
        let mut m = 1u64;
        loop {
            let term = self.shell_size(m) as f64 * self.full_kernel(2.0 * m as f64);
            sum += term;
            let tail_bound = term * m as f64 / self.alpha;
            if tail_bound < tol * sum || m > 5_000_000 {
                return sum + tail_bound;
            }
            m += 1;
        }
    }
}
