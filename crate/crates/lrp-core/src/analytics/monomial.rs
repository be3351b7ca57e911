//! Monomials `P(x) = Π ⟨x, u_i⟩` over unit directions, their divisor algebra,
//! and exact moments over the unit ball `[-1/2, 1/2]^d`.
//!
//! A monomial `Q` divides `P` when its factors form a sub-multiset of `P`'s;
//! `N(Q|P)` counts the subsets realizing `Q`. The addition formula
//! `P(x+y) = Σ_{Q|P} N(Q|P) (P/Q)(x) Q(y)` is what turns convolution moments
//! into products of one-factor moments.

use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum MonomialError {
    #[error("direction has dimension {got}, expected {want}")]
    DimensionMismatch { got: usize, want: usize },
    #[error("direction must be a unit vector (|u|_2 = 1), got norm {0}")]
    NotUnit(f64),
    #[error("degree {0} exceeds supported maximum {1}")]
    DegreeTooLarge(usize, usize),
}

pub const MAX_DEGREE: usize = 8;

/// Product of linear factors `⟨x, u_i⟩`; the empty product is the constant 1.
#[derive(Debug, Clone, PartialEq)]
pub struct Monomial {
    d: usize,
    dirs: Vec<Vec<f64>>,
}

impl Monomial {
    pub fn constant(d: usize) -> Self {
        Monomial { d, dirs: Vec::new() }
    }

    pub fn new(d: usize, dirs: Vec<Vec<f64>>) -> Result<Self, MonomialError> {
        if dirs.len() > MAX_DEGREE {
            return Err(MonomialError::DegreeTooLarge(dirs.len(), MAX_DEGREE));
        }
        for u in &dirs {
            if u.len() != d {
                return Err(MonomialError::DimensionMismatch { got: u.len(), want: d });
            }
            let n2 = u.iter().map(|c| c * c).sum::<f64>().sqrt();
            if (n2 - 1.0).abs() > 1e-12 {
                return Err(MonomialError::NotUnit(n2));
            }
        }
        Ok(Monomial { d, dirs })
    }

    /// `⟨x, e_axis⟩^p`.
    pub fn axis_power(d: usize, axis: usize, p: usize) -> Self {
        let mut e = vec![0.0; d];
        e[axis] = 1.0;
        Monomial { d, dirs: vec![e; p] }
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn degree(&self) -> usize {
        self.dirs.len()
    }

    pub fn directions(&self) -> &[Vec<f64>] {
        &self.dirs
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        self.dirs
            .iter()
            .map(|u| u.iter().zip(x).map(|(a, b)| a * b).sum::<f64>())
            .product()
    }

    /// All divisors with multiplicities: `Σ_Q N(Q|P) = 2^deg`,
    /// `N(1|P) = N(P|P) = 1`. Each entry carries the complement `P/Q`.
    pub fn divisors(&self) -> Vec<DivisorTerm> {
        let p = self.degree();
        let mut table: Vec<(Vec<u64>, DivisorTerm)> = Vec::new();
        for mask in 0u32..(1u32 << p) {
            let mut q = Vec::new();
            let mut rest = Vec::new();
            for (i, u) in self.dirs.iter().enumerate() {
                if mask >> i & 1 == 1 {
                    q.push(u.clone());
                } else {
                    rest.push(u.clone());
                }
            }
            let key = canonical_key(&q);
            match table.iter_mut().find(|(k, _)| *k == key) {
                Some((_, term)) => term.multiplicity += 1,
                None => table.push((
                    key,
                    DivisorTerm {
                        q: Monomial { d: self.d, dirs: q },
                        p_over_q: Monomial { d: self.d, dirs: rest },
                        multiplicity: 1,
                    },
                )),
            }
        }
        table.into_iter().map(|(_, t)| t).collect()
    }

    /// Exact `∫_B P(y) dy` over the unit-volume ball `[-1/2, 1/2]^d`,
    /// by expanding every factor in coordinates and using
    /// `∫ y^k dy = 2^{-k}/(k+1)` for even `k`, zero for odd.
    pub fn ball_moment(&self) -> f64 {
        moment_by_expansion(self, |counts| ball_coordinate_moment(counts))
    }
}

#[derive(Debug, Clone)]
pub struct DivisorTerm {
    pub q: Monomial,
    pub p_over_q: Monomial,
    pub multiplicity: u64,
}

fn canonical_key(dirs: &[Vec<f64>]) -> Vec<u64> {
    let mut rows: Vec<Vec<u64>> =
        dirs.iter().map(|u| u.iter().map(|c| c.to_bits()).collect()).collect();
    rows.sort();
    rows.into_iter().flatten().collect()
}

/// `∫ Π y_i^{k_i} dy` over `[-1/2,1/2]^d`.
pub fn ball_coordinate_moment(counts: &[usize]) -> f64 {
    let mut v = 1.0;
    for &k in counts {
        if k % 2 == 1 {
            return 0.0;
        }
        v *= 0.5f64.powi(k as i32) / (k as f64 + 1.0);
    }
    v
}

/// Expand `E[Π ⟨X, u_i⟩]` into coordinate moments: sum over assignments of
/// each factor to a coordinate, weighting by the direction components.
pub fn moment_by_expansion<F>(p: &Monomial, coord_moment: F) -> f64
where
    F: Fn(&[usize]) -> f64,
{
    let d = p.dim();
    let deg = p.degree();
    if deg == 0 {
        return coord_moment(&vec![0; d]);
    }
    let mut total = 0.0;
    let mut assign = vec![0usize; deg];
    loop {
        let mut w = 1.0;
        for (f, &j) in assign.iter().enumerate() {
            w *= p.dirs[f][j];
        }
        if w != 0.0 {
            let mut counts = vec![0usize; d];
            for &j in &assign {
                counts[j] += 1;
            }
            total += w * coord_moment(&counts);
        }
        let mut i = 0;
        loop {
            if i == deg {
                return total;
            }
            assign[i] += 1;
            if assign[i] < d {
                break;
            }
            assign[i] = 0;
            i += 1;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::Seed;

    #[test]
    fn divisor_counts() {
        let one = Monomial::constant(1);
        let dv = one.divisors();
        assert_eq!(dv.len(), 1);
        assert_eq!(dv[0].multiplicity, 1);

        let p1 = Monomial::axis_power(1, 0, 1);
        let dv = p1.divisors();
        assert_eq!(dv.len(), 2);
        assert!(dv.iter().all(|t| t.multiplicity == 1));

        // same direction twice: divisors 1, <x,u> (x2), P
        let p2 = Monomial::axis_power(1, 0, 2);
        let mut mult: Vec<(usize, u64)> =
            p2.divisors().iter().map(|t| (t.q.degree(), t.multiplicity)).collect();
        mult.sort();
        assert_eq!(mult, vec![(0, 1), (1, 2), (2, 1)]);

        // total multiplicity is 2^deg, N(1|P) = N(P|P) = 1
        let u = unit(&[3.0, 4.0]);
        let p = Monomial::new(2, vec![u.clone(), u.clone(), unit(&[1.0, 0.0])]).unwrap();
        let dv = p.divisors();
        assert_eq!(dv.iter().map(|t| t.multiplicity).sum::<u64>(), 8);
        assert_eq!(dv.iter().filter(|t| t.q.degree() == 0).count(), 1);
        assert_eq!(dv.iter().filter(|t| t.q.degree() == 3).count(), 1);
    }

    #[test]
    fn ball_moments() {
        assert_eq!(Monomial::constant(2).ball_moment(), 1.0);
        assert_eq!(Monomial::axis_power(2, 0, 1).ball_moment(), 0.0);
        let m2 = Monomial::axis_power(1, 0, 2).ball_moment();
        assert!((m2 - 1.0 / 12.0).abs() < 1e-15);
        // mixed direction in d=2: E[<y,u>^2] = sum u_i^2 /12 = 1/12
        let p = Monomial::new(2, vec![unit(&[1.0, 1.0]); 2]).unwrap();
        assert!((p.ball_moment() - 1.0 / 12.0).abs() < 1e-15);
    }

    fn unit(v: &[f64]) -> Vec<f64> {
        let n = v.iter().map(|c| c * c).sum::<f64>().sqrt();
        v.iter().map(|c| c / n).collect()
    }

    #[test]
    fn addition_formula_holds_for_random_monomials() {
        let mut st = Seed(77).stream(&[0]);
        for _ in 0..100 {
            let d = 1 + st.below(3) as usize;
            let deg = st.below(6) as usize;
            let dirs: Vec<Vec<f64>> = (0..deg)
                .map(|_| {
                    let v: Vec<f64> = (0..d).map(|_| st.uniform_sym(1.0)).collect();
                    unit(&v)
                })
                .collect();
            let p = Monomial::new(d, dirs).unwrap();
            let x: Vec<f64> = (0..d).map(|_| st.uniform_sym(2.0)).collect();
            let y: Vec<f64> = (0..d).map(|_| st.uniform_sym(2.0)).collect();
            let xy: Vec<f64> = x.iter().zip(&y).map(|(a, b)| a + b).collect();
            let lhs = p.eval(&xy);
            let rhs: f64 = p
                .divisors()
                .iter()
                .map(|t| t.multiplicity as f64 * t.p_over_q.eval(&x) * t.q.eval(&y))
                .sum();
            assert!((lhs - rhs).abs() <= 1e-10 * (1.0 + lhs.abs()), "{lhs} vs {rhs}");
        }
    }

    #[test]
    fn rejects_non_unit_direction() {
        assert!(Monomial::new(2, vec![vec![1.0, 1.0]]).is_err());
        assert!(Monomial::new(2, vec![vec![1.0]]).is_err());
    }
}
