//! Eigenvalues of small dense complex matrices.
//!
//! Isolation of eigenvalues exposed by zero rows and columns, balancing,
//! Householder reduction to upper Hessenberg form and single-shift QR sweeps
//! (Wilkinson shift, Givens rotations) with deflation on negligible
//! subdiagonal entries.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Row-major square complex matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix {
    n: usize,
    data: Vec<Complex64>,
}

impl DenseMatrix {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            data: vec![Complex64::new(0.0, 0.0); n * n],
        }
    }

    /// Panics if `data.len() != n * n`.
    pub fn from_row_major(n: usize, data: Vec<Complex64>) -> Self {
        assert_eq!(data.len(), n * n, "matrix data length");
        Self { n, data }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.data[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Complex64) {
        self.data[i * self.n + j] = v;
    }

    pub fn row_major(&self) -> &[Complex64] {
        &self.data
    }

    pub fn mul_vec(&self, x: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(x.len(), self.n);
        self.data
            .chunks(self.n)
            .map(|row| row.iter().zip(x).map(|(a, b)| a * b).sum())
            .collect()
    }

    /// All eigenvalues, with at most `100·n` QR sweeps in total.
    pub fn eigenvalues(&self) -> Result<Vec<Complex64>> {
        let (mut eig, mut h) = self.isolate();
        h.balance();
        h.reduce_to_hessenberg();
        let cap = 100 * h.n.max(1);
        eig.extend(h.hessenberg_qr(cap)?);
        Ok(eig)
    }

    /// Splits off eigenvalues exposed by rows or columns whose off-diagonal
    /// entries are exactly zero, as a symmetric permutation would. Returns
    /// those eigenvalues and the remaining principal submatrix.
    fn isolate(&self) -> (Vec<Complex64>, Self) {
        let zero = Complex64::new(0.0, 0.0);
        let mut active: Vec<usize> = (0..self.n).collect();
        let mut eig = Vec::new();
        loop {
            let found = active.iter().position(|&i| {
                let row = active.iter().all(|&j| j == i || self.get(i, j) == zero);
                let col = active.iter().all(|&j| j == i || self.get(j, i) == zero);
                row || col
            });
            match found {
                Some(p) => {
                    let i = active.remove(p);
                    eig.push(self.get(i, i));
                }
                None => break,
            }
        }
        let m = active.len();
        let data = active
            .iter()
            .flat_map(|&i| active.iter().map(move |&j| (i, j)))
            .map(|(i, j)| self.get(i, j))
            .collect();
        (eig, Self::from_row_major(m, data))
    }

    #[inline]
    fn at(&mut self, i: usize, j: usize) -> &mut Complex64 {
        &mut self.data[i * self.n + j]
    }

    /// Diagonal similarity by powers of two so that row and column
    /// off-diagonal norms are comparable.
    fn balance(&mut self) {
        const RADIX: f64 = 2.0;
        let n = self.n;
        let mut converged = false;
        while !converged {
            converged = true;
            for i in 0..n {
                let mut col = 0.0;
                let mut row = 0.0;
                for j in 0..n {
                    if j != i {
                        col += l1(self.get(j, i));
                        row += l1(self.get(i, j));
                    }
                }
                if col == 0.0 || row == 0.0 {
                    continue;
                }
                let sum = col + row;
                let mut f = 1.0;
                let mut g = row / RADIX;
                while col < g {
                    f *= RADIX;
                    col *= RADIX * RADIX;
                }
                g = row * RADIX;
                while col > g {
                    f /= RADIX;
                    col /= RADIX * RADIX;
                }
                if (col + row) / f < 0.95 * sum {
                    converged = false;
                    for j in 0..n {
                        *self.at(i, j) /= f;
                        *self.at(j, i) *= f;
                    }
                }
            }
        }
    }

    fn reduce_to_hessenberg(&mut self) {
        let n = self.n;
        if n < 3 {
            return;
        }
        for k in 0..n - 2 {
            let norm: f64 = (k + 1..n).map(|i| self.get(i, k).norm_sqr()).sum::<f64>().sqrt();
            if norm == 0.0 {
                continue;
            }
            let x0 = self.get(k + 1, k);
            let phase = if x0.norm() == 0.0 {
                Complex64::new(1.0, 0.0)
            } else {
                x0 / x0.norm()
            };
            let alpha = -phase * norm;
            let mut v: Vec<Complex64> = (k + 1..n).map(|i| self.get(i, k)).collect();
            v[0] -= alpha;
            let vnorm: f64 = v.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
            if vnorm == 0.0 {
                continue;
            }
            for c in &mut v {
                *c /= vnorm;
            }
            // A <- (I - 2vv*) A
            for j in 0..n {
                let s: Complex64 = v
                    .iter()
                    .enumerate()
                    .map(|(p, vp)| vp.conj() * self.get(k + 1 + p, j))
                    .sum();
                for (p, vp) in v.iter().enumerate() {
                    *self.at(k + 1 + p, j) -= 2.0 * vp * s;
                }
            }
            // A <- A (I - 2vv*)
            for i in 0..n {
                let s: Complex64 = v
                    .iter()
                    .enumerate()
                    .map(|(p, vp)| self.get(i, k + 1 + p) * vp)
                    .sum();
                for (p, vp) in v.iter().enumerate() {
                    *self.at(i, k + 1 + p) -= 2.0 * s * vp.conj();
                }
            }
            for i in k + 2..n {
                self.set(i, k, Complex64::new(0.0, 0.0));
            }
        }
    }

    fn hessenberg_qr(mut self, cap: usize) -> Result<Vec<Complex64>> {
        let n = self.n;
        let mut eig = vec![Complex64::new(0.0, 0.0); n];
        if n == 0 {
            return Ok(eig);
        }
        let mut hi = n - 1;
        let mut sweeps = 0usize;
        let mut since_deflation = 0usize;
        loop {
            if hi == 0 {
                eig[0] = self.get(0, 0);
                return Ok(eig);
            }
            let mut l = hi;
            while l > 0 {
                let scale = l1(self.get(l - 1, l - 1)) + l1(self.get(l, l));
                let sub = l1(self.get(l, l - 1));
                if sub <= f64::EPSILON * scale || sub < f64::MIN_POSITIVE {
                    self.set(l, l - 1, Complex64::new(0.0, 0.0));
                    break;
                }
                l -= 1;
            }
            if l == hi {
                eig[hi] = self.get(hi, hi);
                hi -= 1;
                since_deflation = 0;
                continue;
            }
            if sweeps >= cap {
                return Err(Error::NoConvergence { iterations: sweeps });
            }
            sweeps += 1;
            since_deflation += 1;

            let shift = if since_deflation.is_multiple_of(10) {
                // exceptional shift to break cycles
                self.get(hi, hi) + 0.75 * l1(self.get(hi, hi - 1))
            } else {
                wilkinson_shift(
                    self.get(hi - 1, hi - 1),
                    self.get(hi - 1, hi),
                    self.get(hi, hi - 1),
                    self.get(hi, hi),
                )
            };
            self.qr_sweep(l, hi, shift);
        }
    }

    /// One explicit-shift QR step `H - μI = QR`, `H <- RQ + μI` on the
    /// active block `lo..=hi`.
    fn qr_sweep(&mut self, lo: usize, hi: usize, shift: Complex64) {
        for i in lo..=hi {
            *self.at(i, i) -= shift;
        }
        let mut rotations = Vec::with_capacity(hi - lo);
        for k in lo..hi {
            let (c, s) = givens(self.get(k, k), self.get(k + 1, k));
            for j in k..=hi {
                let x = self.get(k, j);
                let y = self.get(k + 1, j);
                self.set(k, j, c * x + s * y);
                self.set(k + 1, j, -s.conj() * x + c * y);
            }
            rotations.push((c, s));
        }
        for (offset, &(c, s)) in rotations.iter().enumerate() {
            let k = lo + offset;
            for i in lo..=(k + 1).min(hi) {
                let x = self.get(i, k);
                let y = self.get(i, k + 1);
                self.set(i, k, c * x + y * s.conj());
                self.set(i, k + 1, -x * s + c * y);
            }
        }
        for i in lo..=hi {
            *self.at(i, i) += shift;
        }
    }
}

fn l1(z: Complex64) -> f64 {
    z.re.abs() + z.im.abs()
}

/// Rotation `[[c, s], [-conj(s), c]]` with real `c` mapping `(f, g)` to `(r, 0)`.
fn givens(f: Complex64, g: Complex64) -> (f64, Complex64) {
    let fa = f.norm();
    let ga = g.norm();
    if ga == 0.0 {
        return (1.0, Complex64::new(0.0, 0.0));
    }
    if fa == 0.0 {
        return (0.0, Complex64::new(1.0, 0.0));
    }
    let r = fa.hypot(ga);
    let c = fa / r;
    let s = (f / fa) * g.conj() / r;
    (c, s)
}

/// Eigenvalue of `[[a, b], [c, d]]` closer to `d`.
fn wilkinson_shift(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> Complex64 {
    let half_tr = (a + d) * 0.5;
    let det = a * d - b * c;
    let disc = (half_tr * half_tr - det).sqrt();
    let l1_ = half_tr + disc;
    let l2_ = half_tr - disc;
    if (l1_ - d).norm() <= (l2_ - d).norm() {
        l1_
    } else {
        l2_
    }
}
