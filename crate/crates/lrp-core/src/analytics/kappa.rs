//! The scaling-limit kernel κ through its moment tables.
//!
//! κ is the density of the symmetric Lévy jump process with Lévy measure
//! `dΠ_1/dx = (α/(d+α)) (‖x‖^{-d-α} - 1)` on the unit ball, stopped at an
//! independent Exp(1) time, so its transform is `κ̂ = 1/(1+ψ)` with Lévy
//! exponent `ψ(ξ) = ∫ (1-cos⟨ξ,x⟩) dΠ_1`. Everything here is assembled from
//! the exact closed form of the Π_1 coordinate moments
//!
//! `∫ Π x_i^{k_i} dΠ_1 = α 2^{-K} / ((K-α) Π (k_i+1))`,  K = Σ k_i even,
//!
//! with no quadrature anywhere: ψ's Taylor coefficients are alternating Π_1
//! moments over factorials, κ̂ and κ̂^n are series arithmetic, and the moment
//! tables fall out coefficient by coefficient.

use super::monomial::{moment_by_expansion, Monomial};
use super::series::{IndexTable, Series};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum KappaError {
    #[error("alpha must lie in (0,2) for finite second moments, got {0}")]
    AlphaOutOfRange(f64),
    #[error("moment of total degree {0} <= alpha = {1} diverges")]
    DivergentMoment(usize, f64),
    #[error("max degree {0} exceeds table degree {1}")]
    DegreeTooLarge(usize, usize),
    #[error("convolution power {0} exceeds table maximum {1}")]
    PowerTooLarge(usize, usize),
    #[error("monomial dimension {0} does not match model dimension {1}")]
    DimensionMismatch(usize, usize),
}

/// Coordinate moment of the Lévy measure Π_1: zero when any `k_i` is odd,
/// otherwise `α 2^{-K} / ((K-α) Π (k_i+1))`. Total degree must exceed α.
pub fn levy_coordinate_moment(d: usize, alpha: f64, k: &[usize]) -> Result<f64, KappaError> {
    debug_assert_eq!(k.len(), d);
    if !(alpha > 0.0 && alpha < 2.0) {
        return Err(KappaError::AlphaOutOfRange(alpha));
    }
    if k.iter().any(|&c| c % 2 == 1) {
        return Ok(0.0);
    }
    let big_k: usize = k.iter().sum();
    if (big_k as f64) <= alpha {
        return Err(KappaError::DivergentMoment(big_k, alpha));
    }
    let denom: f64 = k.iter().map(|&c| c as f64 + 1.0).product();
    Ok(alpha * 0.5f64.powi(big_k as i32) / ((big_k as f64 - alpha) * denom))
}

/// Full moment table of Π_1 up to `max_degree` (even degrees >= 2 only).
pub fn levy_moments(d: usize, alpha: f64, max_degree: usize) -> Result<Vec<(Vec<usize>, f64)>, KappaError> {
    let table = IndexTable::new(d, max_degree);
    let mut out = Vec::new();
    for k in &table.idx {
        let deg: usize = k.iter().sum();
        if deg >= 2 && deg % 2 == 0 && k.iter().all(|&c| c % 2 == 0) {
            out.push((k.clone(), levy_coordinate_moment(d, alpha, k)?));
        }
    }
    Ok(out)
}

/// Moment tables of κ and its convolution powers κ^{*n}, n = 1..=n_max.
#[derive(Debug)]
pub struct KappaModel {
    pub d: usize,
    pub alpha: f64,
    pub max_degree: usize,
    pub n_max: usize,
    table: IndexTable,
    /// `moments[n-1][pos]` = coordinate moment of κ^{*n} at the table index.
    moments: Vec<Vec<f64>>,
    /// Π_1 coordinate moments aligned with the same table (0 where divergent).
    levy: Vec<f64>,
}

impl KappaModel {
    pub fn build(d: usize, alpha: f64, max_degree: usize, n_max: usize) -> Result<Self, KappaError> {
        if !(alpha > 0.0 && alpha < 2.0) {
            return Err(KappaError::AlphaOutOfRange(alpha));
        }
        let table = IndexTable::new(d, max_degree);
        // psi(xi) = sum over even multi-indices (-1)^{K/2+1} m_Pi(k)/Pi k_i! xi^k
        let mut psi = Series::zero(&table);
        let mut levy = vec![0.0; table.idx.len()];
        for (pos, k) in table.idx.iter().enumerate() {
            let deg: usize = k.iter().sum();
            if deg < 2 || k.iter().any(|&c| c % 2 == 1) {
                continue;
            }
            let m = levy_coordinate_moment(d, alpha, k)?;
            levy[pos] = m;
            let sign = if (deg / 2) % 2 == 1 { 1.0 } else { -1.0 };
            let fact: f64 = k.iter().map(|&c| factorial(c)).product();
            psi.coeff[pos] = sign * m / fact;
        }
        // kappa-hat = 1/(1+psi); kappa^{*n} hat = kappa-hat^n
        let khat = psi.recip_one_plus();
        let mut moments = Vec::with_capacity(n_max);
        let mut power = Series::one(&table);
        for _ in 0..n_max {
            power = power.mul(&khat);
            let mut row = vec![0.0; table.idx.len()];
            for (pos, k) in table.idx.iter().enumerate() {
                let deg: usize = k.iter().sum();
                if k.iter().any(|&c| c % 2 == 1) {
                    continue; // odd moments vanish by symmetry
                }
                let sign = if (deg / 2) % 2 == 1 { -1.0 } else { 1.0 };
                let fact: f64 = k.iter().map(|&c| factorial(c)).product();
                row[pos] = sign * fact * power.coeff[pos];
            }
            moments.push(row);
        }
        // the series borrowed `table`; the struct keeps its own copy
        Ok(KappaModel { d, alpha, max_degree, n_max, table: IndexTable::new(d, max_degree), moments, levy })
    }

    /// Coordinate moment `E[Π X_i^{k_i}]` of κ^{*n}.
    pub fn coordinate_moment(&self, n: usize, k: &[usize]) -> Result<f64, KappaError> {
        if n == 0 || n > self.n_max {
            return Err(KappaError::PowerTooLarge(n, self.n_max));
        }
        let deg: usize = k.iter().sum();
        if deg > self.max_degree {
            return Err(KappaError::DegreeTooLarge(deg, self.max_degree));
        }
        if k.iter().any(|&c| c % 2 == 1) {
            return Ok(0.0);
        }
        let pos = self.table.position(k).expect("within table");
        Ok(self.moments[n - 1][pos])
    }

    /// Π_1 coordinate moment from the same table.
    pub fn levy_moment(&self, k: &[usize]) -> Result<f64, KappaError> {
        let deg: usize = k.iter().sum();
        if deg > self.max_degree {
            return Err(KappaError::DegreeTooLarge(deg, self.max_degree));
        }
        if k.iter().any(|&c| c % 2 == 1) {
            return Ok(0.0);
        }
        if (deg as f64) <= self.alpha {
            return Err(KappaError::DivergentMoment(deg, self.alpha));
        }
        Ok(self.levy[self.table.position(k).expect("within table")])
    }

    /// Monomial moment `∫ κ^{*n}(x) P(x) dx` by coordinate expansion.
    pub fn monomial_moment(&self, n: usize, p: &Monomial) -> Result<f64, KappaError> {
        if p.dim() != self.d {
            return Err(KappaError::DimensionMismatch(p.dim(), self.d));
        }
        if p.degree() > self.max_degree {
            return Err(KappaError::DegreeTooLarge(p.degree(), self.max_degree));
        }
        if n == 0 || n > self.n_max {
            return Err(KappaError::PowerTooLarge(n, self.n_max));
        }
        Ok(moment_by_expansion(p, |k| self.moments[n - 1][self.table.position(k).unwrap()]))
    }

    /// `∫ [κ^{*n} * 1_B](y) P(y) dy = Σ_{Q|P} N(Q|P) m_{κ^{*n}}(P/Q) ∫_B Q`.
    pub fn conv_ball_moment(&self, n: usize, p: &Monomial) -> Result<f64, KappaError> {
        let mut total = 0.0;
        for t in p.divisors() {
            let ball = t.q.ball_moment();
            if ball == 0.0 {
                continue;
            }
            total += t.multiplicity as f64 * self.monomial_moment(n, &t.p_over_q)? * ball;
        }
        Ok(total)
    }

    /// Residual of the recurrence
    /// `(deg P + αn) ∫ κ^{*n} P = αn ∫ [κ^{*(n+1)} * 1_B] P`,
    /// evaluated entirely from the exact tables.
    pub fn recurrence_residual(&self, n: usize, p: &Monomial) -> Result<f64, KappaError> {
        let lhs = (p.degree() as f64 + self.alpha * n as f64) * self.monomial_moment(n, p)?;
        let rhs = self.alpha * n as f64 * self.conv_ball_moment(n + 1, p)?;
        Ok(lhs - rhs)
    }

    /// Relative residual, normalized by |LHS| (or by 1 when LHS vanishes,
    /// e.g. for odd monomials where the identity is trivially 0 = 0).
    pub fn recurrence_relative_residual(&self, n: usize, p: &Monomial) -> Result<f64, KappaError> {
        let lhs = (p.degree() as f64 + self.alpha * n as f64) * self.monomial_moment(n, p)?;
        let res = self.recurrence_residual(n, p)?;
        let scale = if lhs == 0.0 { 1.0 } else { lhs.abs() };
        Ok(res.abs() / scale)
    }

    /// Cumulant table of κ (coordinate multi-indices), from `ln κ̂`.
    pub fn cumulants(&self) -> Vec<(Vec<usize>, f64)> {
        let table = IndexTable::new(self.d, self.max_degree);
        let mut psi = Series::zero(&table);
        for (pos, k) in table.idx.iter().enumerate() {
            let deg: usize = k.iter().sum();
            if deg < 2 || k.iter().any(|&c| c % 2 == 1) {
                continue;
            }
            let sign = if (deg / 2) % 2 == 1 { 1.0 } else { -1.0 };
            let fact: f64 = k.iter().map(|&c| factorial(c)).product();
            psi.coeff[pos] = sign * self.levy[pos] / fact;
        }
        let khat = psi.recip_one_plus();
        let mut km1 = khat.clone();
        km1.coeff[0] = 0.0;
        let lnk = km1.ln_one_plus();
        let mut out = Vec::new();
        for (pos, k) in table.idx.iter().enumerate() {
            let deg: usize = k.iter().sum();
            if deg == 0 || k.iter().any(|&c| c % 2 == 1) {
                continue;
            }
            let sign = if (deg / 2) % 2 == 1 { -1.0 } else { 1.0 };
            let fact: f64 = k.iter().map(|&c| factorial(c)).product();
            out.push((k.clone(), sign * fact * lnk.coeff[pos]));
        }
        out
    }
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|i| i as f64).product()
}

#[cfg(test)]
mod tests {
    use super::*;

    const A13: f64 = 1.0 / 3.0;

    /// Adaptive Simpson quadrature, test-side oracle.
    fn simpson<F: Fn(f64) -> f64 + Copy>(f: F, a: f64, b: f64, tol: f64, depth: u32) -> f64 {
        let m = 0.5 * (a + b);
        let whole = (b - a) / 6.0 * (f(a) + 4.0 * f(m) + f(b));
        let lm = 0.5 * (a + m);
        let rm = 0.5 * (m + b);
        let left = (m - a) / 6.0 * (f(a) + 4.0 * f(lm) + f(m));
        let right = (b - m) / 6.0 * (f(m) + 4.0 * f(rm) + f(b));
        if depth == 0 || (left + right - whole).abs() < 15.0 * tol {
            left + right + (left + right - whole) / 15.0
        } else {
            simpson(f, a, m, tol / 2.0, depth - 1) + simpson(f, m, b, tol / 2.0, depth - 1)
        }
    }

    #[test]
    fn levy_second_moment_two_oracles() {
        // route 1: closed form
        let m = levy_coordinate_moment(1, A13, &[2]).unwrap();
        // route 2: quadrature of (1/4) x^2 ((2|x|)^{-4/3} - 1) over [-1/2,1/2]
        let q = 2.0
            * simpson(
                |x: f64| 0.25 * x * x * ((2.0 * x).powf(-4.0 / 3.0) - 1.0),
                1e-12,
                0.5,
                1e-13,
                40,
            );
        // route 3: recurrence algebra m = alpha * b / (2 - alpha), b = 1/12
        let r = A13 * (1.0 / 12.0) / (2.0 - A13);
        assert!((m - 1.0 / 60.0).abs() < 1e-15, "{m}");
        assert!((q - 1.0 / 60.0).abs() < 1e-9, "{q}");
        assert!((r - 1.0 / 60.0).abs() < 1e-15);
    }

    #[test]
    fn levy_moment_d2_matches_quadrature() {
        // degree (2,0) in d=2, alpha=2/3: radial decomposition oracle.
        // E[x1^2 at norm s] * shell mass: integrate s in (0,1) of
        //   (alpha/(d+alpha)) (s^{-d-a}-1) * s^2 (d+2)/(12 d) * d s^{d-1}
        let (d, a) = (2.0f64, 2.0 / 3.0);
        let f = |s: f64| (a / (d + a)) * (s.powf(-d - a) - 1.0) * s * s * (d + 2.0) / (12.0 * d) * d * s.powf(d - 1.0);
        let q = simpson(f, 1e-9, 1.0, 1e-13, 40);
        let m = levy_coordinate_moment(2, a, &[2, 0]).unwrap();
        assert!((m - q).abs() < 1e-10, "{m} vs {q}");
        assert!((m - a / (12.0 * (2.0 - a))).abs() < 1e-15);
    }

    #[test]
    fn odd_moments_vanish_and_divergent_rejected() {
        assert_eq!(levy_coordinate_moment(2, 0.5, &[1, 2]).unwrap(), 0.0);
        assert!(levy_coordinate_moment(1, 0.5, &[0]).is_err());
        assert!(levy_coordinate_moment(1, 2.5, &[2]).is_err());
    }

    #[test]
    fn kappa_moment_tables() {
        let km = KappaModel::build(1, A13, 8, 6).unwrap();
        // degree 0 moment of kappa^{*n} is 1 for all n
        for n in 1..=6 {
            assert!((km.coordinate_moment(n, &[0]).unwrap() - 1.0).abs() < 1e-14);
        }
        // variance of kappa = levy second moment = 1/60; additivity in n
        for n in 1..=6 {
            let v = km.coordinate_moment(n, &[2]).unwrap();
            assert!((v - n as f64 / 60.0).abs() < 1e-15, "n={n} v={v}");
        }
        // odd vanish
        assert_eq!(km.coordinate_moment(2, &[3]).unwrap(), 0.0);
        // fourth moment: m4(kappa) = m4(Pi) + 6 m2(Pi)^2 from 1/(1+psi)
        let m4 = km.coordinate_moment(1, &[4]).unwrap();
        let m4_pi = levy_coordinate_moment(1, A13, &[4]).unwrap();
        assert!((m4 - (m4_pi + 6.0 / 3600.0)).abs() < 1e-15);
    }

    #[test]
    fn kappa_fourth_moment_finite_difference_oracle() {
        // brute-force differentiation of 1/(1+psi) with quadrature-evaluated psi
        let km = KappaModel::build(1, A13, 8, 2).unwrap();
        let psi = |xi: f64| -> f64 {
            2.0 * simpson(
                |x: f64| (1.0 - (xi * x).cos()) * 0.25 * ((2.0 * x).powf(-4.0 / 3.0) - 1.0),
                1e-12,
                0.5,
                1e-14,
                44,
            )
        };
        let f = |xi: f64| 1.0 / (1.0 + psi(xi));
        // 4th derivative at 0 by 9-point central stencil, m4 = f''''(0)
        let h = 0.22;
        let d4 = (-(f(-4.0 * h) + f(4.0 * h)) / 560.0
            + (f(-3.0 * h) + f(3.0 * h)) * 8.0 / 315.0
            - (f(-2.0 * h) + f(2.0 * h)) / 5.0
            + (f(-h) + f(h)) * 8.0 / 5.0
            - f(0.0) * 205.0 / 72.0)
            / h.powi(4);
        let m4 = km.coordinate_moment(1, &[4]).unwrap();
        assert!((d4 - m4).abs() / m4 <= 1e-6, "fd {d4} vs table {m4}");
    }

    #[test]
    fn conv_ball_moment_examples() {
        let km = KappaModel::build(1, A13, 8, 3).unwrap();
        let one = Monomial::constant(1);
        assert!((km.conv_ball_moment(1, &one).unwrap() - 1.0).abs() < 1e-14);
        let y1 = Monomial::axis_power(1, 0, 1);
        assert_eq!(km.conv_ball_moment(1, &y1).unwrap(), 0.0);
        let y2 = Monomial::axis_power(1, 0, 2);
        let got = km.conv_ball_moment(1, &y2).unwrap();
        assert!((got - (1.0 / 60.0 + 1.0 / 12.0)).abs() < 1e-14);
    }

    #[test]
    fn recurrence_residual_examples() {
        let km = KappaModel::build(1, A13, 8, 6).unwrap();
        for n in 1..=5 {
            let r = km.recurrence_residual(n, &Monomial::constant(1)).unwrap();
            assert!(r.abs() < 1e-14, "n={n} r={r}");
        }
        let y2 = Monomial::axis_power(1, 0, 2);
        let y4 = Monomial::axis_power(1, 0, 4);
        for n in 1..=5 {
            assert!(km.recurrence_relative_residual(n, &y2).unwrap() < 1e-12);
            assert!(km.recurrence_relative_residual(n, &y4).unwrap() < 1e-8);
        }
        // degree-2 case rearranges to m2 = alpha/12/(2-alpha)
        let m2 = km.coordinate_moment(1, &[2]).unwrap();
        assert!((m2 - A13 / 12.0 / (2.0 - A13)).abs() < 1e-15);
    }

    #[test]
    fn cumulant_additivity_degree4() {
        let km = KappaModel::build(1, 0.5, 8, 4).unwrap();
        let cum = km.cumulants();
        let c2 = cum.iter().find(|(k, _)| k == &vec![2]).unwrap().1;
        let c4 = cum.iter().find(|(k, _)| k == &vec![4]).unwrap().1;
        for n in 1..=4usize {
            let m2 = km.coordinate_moment(n, &[2]).unwrap();
            let m4 = km.coordinate_moment(n, &[4]).unwrap();
            let k2n = m2;
            let k4n = m4 - 3.0 * m2 * m2;
            assert!((k2n - n as f64 * c2).abs() < 1e-14);
            assert!((k4n - n as f64 * c4).abs() < 1e-13, "n={n}");
        }
    }
}
