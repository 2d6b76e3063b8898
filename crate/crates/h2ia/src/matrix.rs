//! Exact integer matrix algebra: fraction-free determinants, Hermite
//! normal form, and integer kernel lattices.
//!
//! Everything here is over unbounded integers. The matrices involved
//! are small (at most a few dozen rows), so the classical cubic
//! algorithms are more than fast enough and exactness is the only
//! concern.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use std::fmt;

#[derive(Clone, PartialEq, Eq)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BigInt>,
}

impl IntMatrix {
    pub fn zero(rows: usize, cols: usize) -> Self {
        IntMatrix {
            rows,
            cols,
            data: vec![BigInt::zero(); rows * cols],
        }
    }

    pub fn from_i64_rows(rows: &[Vec<i64>]) -> Self {
        let r = rows.len();
        let c = rows.first().map(|row| row.len()).unwrap_or(0);
        let mut m = IntMatrix::zero(r, c);
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), c, "ragged rows");
            for (j, &v) in row.iter().enumerate() {
                m.data[i * c + j] = BigInt::from(v);
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn at(&self, r: usize, c: usize) -> &BigInt {
        &self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: BigInt) {
        self.data[r * self.cols + c] = v;
    }

    pub fn transpose(&self) -> IntMatrix {
        let mut t = IntMatrix::zero(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                t.set(c, r, self.at(r, c).clone());
            }
        }
        t
    }

    pub fn mul_vec(&self, v: &[BigInt]) -> Vec<BigInt> {
        assert_eq!(v.len(), self.cols);
        (0..self.rows)
            .map(|r| (0..self.cols).map(|c| self.at(r, c) * &v[c]).sum())
            .collect()
    }

    pub fn row(&self, r: usize) -> &[BigInt] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for c in 0..self.cols {
            self.data.swap(a * self.cols + c, b * self.cols + c);
        }
    }

    /// row(dst) += q * row(src)
    fn add_multiple(&mut self, dst: usize, src: usize, q: &BigInt) {
        for c in 0..self.cols {
            let add = self.at(src, c) * q;
            self.data[dst * self.cols + c] += add;
        }
    }

    fn negate_row(&mut self, r: usize) {
        for c in 0..self.cols {
            let v = -self.at(r, c).clone();
            self.set(r, c, v);
        }
    }

    /// Determinant by the Bareiss fraction-free elimination.
    pub fn det(&self) -> BigInt {
        assert_eq!(self.rows, self.cols, "determinant of non-square matrix");
        let n = self.rows;
        if n == 0 {
            return BigInt::one();
        }
        let mut m = self.clone();
        let mut sign = BigInt::one();
        let mut prev = BigInt::one();
        for k in 0..n - 1 {
            if m.at(k, k).is_zero() {
                match (k + 1..n).find(|&r| !m.at(r, k).is_zero()) {
                    Some(r) => {
                        m.swap_rows(k, r);
                        sign = -sign;
                    }
                    None => return BigInt::zero(),
                }
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let v = (m.at(i, j) * m.at(k, k) - m.at(i, k) * m.at(k, j)) / &prev;
                    m.set(i, j, v);
                }
                m.set(i, k, BigInt::zero());
            }
            prev = m.at(k, k).clone();
        }
        sign * m.at(n - 1, n - 1).clone()
    }

    /// Row-style Hermite normal form with zero rows dropped: pivots
    /// positive and strictly right of the pivots above, entries above a
    /// pivot reduced into [0, pivot). Canonical per row lattice.
    pub fn hnf(&self) -> IntMatrix {
        let mut m = self.clone();
        let mut pivot_row = 0;
        for col in 0..m.cols {
            if pivot_row == m.rows {
                break;
            }
            // Euclidean elimination: shrink entries in this column below
            // the pivot row until one nonzero remains.
            loop {
                let mut best: Option<usize> = None;
                for r in pivot_row..m.rows {
                    if !m.at(r, col).is_zero()
                        && best.is_none_or(|b| m.at(r, col).abs() < m.at(b, col).abs())
                    {
                        best = Some(r);
                    }
                }
                let Some(b) = best else { break };
                m.swap_rows(pivot_row, b);
                let mut done = true;
                for r in pivot_row + 1..m.rows {
                    if !m.at(r, col).is_zero() {
                        let q = -(m.at(r, col) / m.at(pivot_row, col));
                        m.add_multiple(r, pivot_row, &q);
                        if !m.at(r, col).is_zero() {
                            done = false;
                        }
                    }
                }
                if done {
                    break;
                }
            }
            if m.at(pivot_row, col).is_zero() {
                continue;
            }
            if m.at(pivot_row, col).is_negative() {
                m.negate_row(pivot_row);
            }
            // Reduce the entries above the pivot.
            let pivot = m.at(pivot_row, col).clone();
            for r in 0..pivot_row {
                let q = -div_floor(m.at(r, col), &pivot);
                if !q.is_zero() {
                    m.add_multiple(r, pivot_row, &q);
                }
            }
            pivot_row += 1;
        }
        let mut out = IntMatrix::zero(pivot_row, m.cols);
        for r in 0..pivot_row {
            for c in 0..m.cols {
                out.set(r, c, m.at(r, c).clone());
            }
        }
        out
    }

    pub fn rank(&self) -> usize {
        self.hnf().rows
    }

    /// Basis of the integer kernel {v : Mv = 0}, one vector per row, in
    /// Hermite normal form.
    pub fn kernel(&self) -> IntMatrix {
        // Row-reduce [Mᵀ | I]; rows whose Mᵀ-part vanishes record the
        // unimodular combinations that kill M, i.e. the kernel lattice.
        let t = self.transpose();
        let mut aug = IntMatrix::zero(t.rows, t.cols + t.rows);
        for r in 0..t.rows {
            for c in 0..t.cols {
                aug.set(r, c, t.at(r, c).clone());
            }
            aug.set(r, t.cols + r, BigInt::one());
        }
        let reduced = hnf_full(&aug, t.cols);
        let mut kernel_rows = Vec::new();
        for r in 0..reduced.rows {
            if (0..t.cols).all(|c| reduced.at(r, c).is_zero()) {
                kernel_rows.push(reduced.row(r)[t.cols..].to_vec());
            }
        }
        let mut k = IntMatrix::zero(kernel_rows.len(), t.rows);
        for (r, row) in kernel_rows.iter().enumerate() {
            for (c, v) in row.iter().enumerate() {
                k.set(r, c, v.clone());
            }
        }
        k.hnf()
    }
}

/// HNF driver that only creates pivots in the first `pivot_cols`
/// columns, leaving the remaining columns as passengers.
fn hnf_full(m: &IntMatrix, pivot_cols: usize) -> IntMatrix {
    let mut m = m.clone();
    let mut pivot_row = 0;
    for col in 0..pivot_cols {
        if pivot_row == m.rows {
            break;
        }
        loop {
            let mut best: Option<usize> = None;
            for r in pivot_row..m.rows {
                if !m.at(r, col).is_zero()
                    && best.is_none_or(|b| m.at(r, col).abs() < m.at(b, col).abs())
                {
                    best = Some(r);
                }
            }
            let Some(b) = best else { break };
            m.swap_rows(pivot_row, b);
            let mut done = true;
            for r in pivot_row + 1..m.rows {
                if !m.at(r, col).is_zero() {
                    let q = -(m.at(r, col) / m.at(pivot_row, col));
                    m.add_multiple(r, pivot_row, &q);
                    if !m.at(r, col).is_zero() {
                        done = false;
                    }
                }
            }
            if done {
                break;
            }
        }
        if !m.at(pivot_row, col).is_zero() {
            pivot_row += 1;
        }
    }
    m
}

fn div_floor(a: &BigInt, b: &BigInt) -> BigInt {
    let (q, r) = (a / b, a % b);
    if !r.is_zero() && (r.is_negative() != b.is_negative()) {
        q - 1
    } else {
        q
    }
}

impl fmt::Debug for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "IntMatrix {}x{} [", self.rows, self.cols)?;
        for r in 0..self.rows {
            let row: Vec<String> = (0..self.cols).map(|c| self.at(r, c).to_string()).collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        write!(f, "]")
    }
}

impl fmt::Display for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in 0..self.rows {
            let row: Vec<String> = (0..self.cols).map(|c| self.at(r, c).to_string()).collect();
            writeln!(f, "{}", row.join(" "))?;
        }
        Ok(())
    }
}
