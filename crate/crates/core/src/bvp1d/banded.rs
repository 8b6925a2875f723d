//! Symmetric banded storage with an LDLᵀ factorization that tolerates and
//! counts zero pivots.

use nalgebra::DMatrix;

use crate::{Error, Result};

/// Lower band of a symmetric matrix: entry `(i, j)` with `i - bw <= j <= i`.
#[derive(Debug, Clone, PartialEq)]
pub struct BandedSym {
    n: usize,
    bw: usize,
    data: Vec<f64>,
}

impl BandedSym {
    pub fn zeros(n: usize, bw: usize) -> Self {
        Self {
            n,
            bw,
            data: vec![0.0; n * (bw + 1)],
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn bandwidth(&self) -> usize {
        self.bw
    }

    fn slot(&self, i: usize, j: usize) -> Option<usize> {
        let (i, j) = if i >= j { (i, j) } else { (j, i) };
        (i - j <= self.bw).then(|| i * (self.bw + 1) + (i - j))
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.slot(i, j).map_or(0.0, |s| self.data[s])
    }

    /// Adds `v` to the symmetric pair `(i, j)`, `(j, i)`.
    ///
    /// # Panics
    /// If `(i, j)` lies outside the band.
    pub fn add(&mut self, i: usize, j: usize, v: f64) {
        let s = self.slot(i, j).expect("entry outside band");
        self.data[s] += v;
    }

    pub fn diag(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.get(i, i)).collect()
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.n];
        for i in 0..self.n {
            let lo = i.saturating_sub(self.bw);
            for j in lo..=i {
                let a = self.data[i * (self.bw + 1) + (i - j)];
                y[i] += a * x[j];
                if j != i {
                    y[j] += a * x[i];
                }
            }
        }
        y
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        DMatrix::from_fn(self.n, self.n, |i, j| self.get(i, j))
    }

    /// Principal submatrix on the sorted index list `keep`.
    pub fn restrict(&self, keep: &[usize]) -> Self {
        let mut out = Self::zeros(keep.len(), self.bw);
        for (a, &i) in keep.iter().enumerate() {
            for b in a.saturating_sub(self.bw)..=a {
                let j = keep[b];
                if i - j <= self.bw {
                    let s = out.slot(a, b).unwrap();
                    out.data[s] = self.get(i, j);
                }
            }
        }
        out
    }

    /// `LDLᵀ` without pivoting. Pivots below `rel_tol · max|diag|` are treated
    /// as exact zeros and recorded.
    pub fn ldlt(&self, rel_tol: f64) -> Factor {
        let n = self.n;
        let bw = self.bw;
        let w = bw + 1;
        let scale = self.diag().iter().fold(0.0f64, |m, d| m.max(d.abs()));
        let tol = rel_tol * scale.max(f64::MIN_POSITIVE);
        let mut l = self.data.clone();
        let mut d = vec![0.0; n];
        let mut zero_pivots = Vec::new();
        let mut negative = 0;
        for j in 0..n {
            let lo = j.saturating_sub(bw);
            let mut dj = l[j * w];
            for k in lo..j {
                let ljk = l[j * w + (j - k)];
                dj -= ljk * ljk * d[k];
            }
            if dj.abs() <= tol {
                zero_pivots.push(j);
                d[j] = 0.0;
                for i in j + 1..(j + w).min(n) {
                    l[i * w + (i - j)] = 0.0;
                }
                continue;
            }
            if dj < 0.0 {
                negative += 1;
            }
            d[j] = dj;
            for i in j + 1..(j + w).min(n) {
                let mut s = l[i * w + (i - j)];
                for k in i.saturating_sub(bw).max(lo)..j {
                    s -= l[i * w + (i - k)] * l[j * w + (j - k)] * d[k];
                }
                l[i * w + (i - j)] = s / dj;
            }
        }
        Factor {
            n,
            bw,
            l,
            d,
            zero_pivots,
            negative,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Factor {
    n: usize,
    bw: usize,
    l: Vec<f64>,
    d: Vec<f64>,
    zero_pivots: Vec<usize>,
    negative: usize,
}

impl Factor {
    pub fn kernel_dim(&self) -> usize {
        self.zero_pivots.len()
    }

    pub fn negative_pivots(&self) -> usize {
        self.negative
    }

    pub fn pivots(&self) -> &[f64] {
        &self.d
    }

    pub fn is_positive_definite(&self) -> bool {
        self.zero_pivots.is_empty() && self.negative == 0
    }

    pub fn solve(&self, b: &[f64]) -> Result<Vec<f64>> {
        if !self.zero_pivots.is_empty() {
            return Err(Error::SingularSystem {
                kernel_dim: self.kernel_dim(),
            });
        }
        let w = self.bw + 1;
        let mut x = b.to_vec();
        for i in 0..self.n {
            let lo = i.saturating_sub(self.bw);
            let s: f64 = (lo..i).map(|k| self.l[i * w + (i - k)] * x[k]).sum();
            x[i] -= s;
        }
        for i in 0..self.n {
            x[i] /= self.d[i];
        }
        for i in (0..self.n).rev() {
            let hi = (i + w).min(self.n);
            let s: f64 = (i + 1..hi).map(|k| self.l[k * w + (k - i)] * x[k]).sum();
            x[i] -= s;
        }
        Ok(x)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn laplacian(n: usize) -> BandedSym {
        let mut a = BandedSym::zeros(n, 1);
        for i in 0..n {
            a.add(i, i, 2.0);
            if i + 1 < n {
                a.add(i + 1, i, -1.0);
            }
        }
        a
    }

    #[test]
    fn solves_against_dense() {
        let a = laplacian(12);
        let b: Vec<f64> = (0..12).map(|i| (i as f64).sin()).collect();
        let x = a.ldlt(1e-14).solve(&b).unwrap();
        let dense = a
            .to_dense()
            .lu()
            .solve(&nalgebra::DVector::from_vec(b.clone()))
            .unwrap();
        for i in 0..12 {
            assert!((x[i] - dense[i]).abs() < 1e-12);
        }
        let r = a.matvec(&x);
        for i in 0..12 {
            assert!((r[i] - b[i]).abs() < 1e-12);
        }
    }

    #[test]
    fn detects_kernel() {
        // Free-free Laplacian has the constants as kernel.
        let mut a = laplacian(10);
        a.add(0, 0, -1.0);
        a.add(9, 9, -1.0);
        let f = a.ldlt(1e-12);
        assert_eq!(f.kernel_dim(), 1);
        assert!(matches!(
            f.solve(&[0.0; 10]),
            Err(Error::SingularSystem { kernel_dim: 1 })
        ));
    }

    #[test]
    fn restrict_keeps_band() {
        let a = laplacian(6);
        let r = a.restrict(&[0, 2, 3, 5]);
        assert_eq!(r.get(1, 2), -1.0);
        assert_eq!(r.get(0, 1), 0.0);
        assert_eq!(r.get(3, 3), 2.0);
    }
}
