//! Dense multivariate power series truncated at a total degree.
//!
//! Small and exact-to-machine-arithmetic; the moment pipeline never touches a
//! quadrature. Dimensions up to 3 and degrees up to 16 stay tiny.

/// Table of all multi-indices of dimension `d` with total degree <= `max_deg`,
/// in graded lexicographic order.
#[derive(Debug, Clone)]
pub struct IndexTable {
    pub d: usize,
    pub max_deg: usize,
    pub idx: Vec<Vec<usize>>,
}

impl IndexTable {
    pub fn new(d: usize, max_deg: usize) -> Self {
        let mut idx = Vec::new();
        let mut cur = vec![0usize; d];
        loop {
            if cur.iter().sum::<usize>() <= max_deg {
                idx.push(cur.clone());
            }
            let mut i = 0;
            loop {
                if i == d {
                    idx.sort_by_key(|k| (k.iter().sum::<usize>(), k.clone()));
                    return IndexTable { d, max_deg, idx };
                }
                cur[i] += 1;
                if cur[i] <= max_deg {
                    break;
                }
                cur[i] = 0;
                i += 1;
            }
        }
    }

    pub fn position(&self, k: &[usize]) -> Option<usize> {
        self.idx.iter().position(|x| x == k)
    }
}

#[derive(Debug, Clone)]
pub struct Series<'t> {
    pub table: &'t IndexTable,
    pub coeff: Vec<f64>,
}

impl<'t> Series<'t> {
    pub fn zero(table: &'t IndexTable) -> Self {
        Series { table, coeff: vec![0.0; table.idx.len()] }
    }

    pub fn one(table: &'t IndexTable) -> Self {
        let mut s = Series::zero(table);
        s.coeff[0] = 1.0;
        s
    }

    pub fn get(&self, k: &[usize]) -> f64 {
        self.table.position(k).map_or(0.0, |p| self.coeff[p])
    }

    pub fn set(&mut self, k: &[usize], v: f64) {
        let p = self.table.position(k).expect("index within table");
        self.coeff[p] = v;
    }

    pub fn add(&self, other: &Series<'t>) -> Series<'t> {
        let mut out = self.clone();
        for (a, b) in out.coeff.iter_mut().zip(&other.coeff) {
            *a += b;
        }
        out
    }

    pub fn scale(&self, c: f64) -> Series<'t> {
        let mut out = self.clone();
        for a in out.coeff.iter_mut() {
            *a *= c;
        }
        out
    }

    pub fn mul(&self, other: &Series<'t>) -> Series<'t> {
        let t = self.table;
        let mut out = Series::zero(t);
        for (i, ki) in t.idx.iter().enumerate() {
            let a = self.coeff[i];
            if a == 0.0 {
                continue;
            }
            let deg_i: usize = ki.iter().sum();
            for (j, kj) in t.idx.iter().enumerate() {
                let b = other.coeff[j];
                if b == 0.0 {
                    continue;
                }
                let deg_j: usize = kj.iter().sum();
                if deg_i + deg_j > t.max_deg {
                    continue;
                }
                let sum: Vec<usize> = ki.iter().zip(kj).map(|(x, y)| x + y).collect();
                let p = t.position(&sum).unwrap();
                out.coeff[p] += a * b;
            }
        }
        out
    }

    /// `1 / (1 + self)` for a series with zero constant term.
    pub fn recip_one_plus(&self) -> Series<'t> {
        assert_eq!(self.coeff[0], 0.0, "series must have zero constant term");
        let mut out = Series::one(self.table);
        let mut pow = Series::one(self.table);
        // s has min degree >= 1 (here >= 2), so D terms suffice
        for j in 1..=self.table.max_deg {
            pow = pow.mul(self);
            let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
            out = out.add(&pow.scale(sign));
        }
        out
    }

    pub fn pow(&self, n: usize) -> Series<'t> {
        let mut out = Series::one(self.table);
        for _ in 0..n {
            out = out.mul(self);
        }
        out
    }

    /// `ln(1 + self)` for a series with zero constant term.
    pub fn ln_one_plus(&self) -> Series<'t> {
        let mut out = Series::zero(self.table);
        let mut pow = Series::one(self.table);
        for j in 1..=self.table.max_deg {
            pow = pow.mul(self);
            let sign = if j % 2 == 1 { 1.0 } else { -1.0 };
            out = out.add(&pow.scale(sign / j as f64));
        }
        out
    }
}
