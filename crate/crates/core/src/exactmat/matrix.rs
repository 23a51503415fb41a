use std::fmt;
use std::ops::{Add, Index, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use rustc_hash::{FxHashMap, FxHashSet};

use super::Rat;
use crate::error::{Error, Result};

/// Dense row-major matrix of exact rationals.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct RatMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Rat>,
}

/// Matrices at least this large have their repeated rows grouped before
/// multiplication and rank factorization.
const DEDUP_THRESHOLD: usize = 12;

impl RatMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<Rat>) -> Result<RatMatrix> {
        if rows == 0 || cols == 0 {
            return Err(Error::dim(format!("matrix must be at least 1x1, got {rows}x{cols}")));
        }
        if data.len() != rows * cols {
            return Err(Error::dim(format!(
                "{rows}x{cols} matrix needs {} entries, got {}",
                rows * cols,
                data.len()
            )));
        }
        Ok(RatMatrix { rows, cols, data })
    }

    pub fn from_rows(rows: Vec<Vec<Rat>>) -> Result<RatMatrix> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if let Some((i, row)) = rows.iter().enumerate().find(|(_, row)| row.len() != c) {
            return Err(Error::dim(format!(
                "row {i} has {} entries, expected {c}",
                row.len()
            )));
        }
        RatMatrix::new(r, c, rows.into_iter().flatten().collect())
    }

    /// Integer matrix literal. Panics on ragged or empty input.
    pub fn from_int_rows<R: AsRef<[i64]>>(rows: &[R]) -> RatMatrix {
        let rows = rows
            .iter()
            .map(|row| row.as_ref().iter().map(|&x| Rat::from_integer(x)).collect())
            .collect();
        RatMatrix::from_rows(rows).expect("malformed integer matrix literal")
    }

    /// `from_int_rows(rows) / den`.
    pub fn from_scaled_ints<R: AsRef<[i64]>>(rows: &[R], den: i64) -> RatMatrix {
        RatMatrix::from_int_rows(rows).scale(&Rat::ratio(1, den))
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Rat) -> RatMatrix {
        assert!(rows > 0 && cols > 0, "matrix must be at least 1x1");
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        RatMatrix { rows, cols, data }
    }

    pub fn filled(rows: usize, cols: usize, value: Rat) -> RatMatrix {
        assert!(rows > 0 && cols > 0, "matrix must be at least 1x1");
        RatMatrix {
            rows,
            cols,
            data: vec![value; rows * cols],
        }
    }

    pub fn zeros(rows: usize, cols: usize) -> RatMatrix {
        RatMatrix::filled(rows, cols, Rat::zero())
    }

    pub fn identity(n: usize) -> RatMatrix {
        RatMatrix::from_fn(n, n, |i, j| if i == j { Rat::one() } else { Rat::zero() })
    }

    pub fn diagonal(entries: &[Rat]) -> RatMatrix {
        let n = entries.len();
        RatMatrix::from_fn(n, n, |i, j| if i == j { entries[i].clone() } else { Rat::zero() })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &Rat {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, value: Rat) {
        self.data[i * self.cols + j] = value;
    }

    pub fn row(&self, i: usize) -> &[Rat] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<Rat> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn entries(&self) -> &[Rat] {
        &self.data
    }

    pub fn to_rows(&self) -> Vec<Vec<Rat>> {
        self.data.chunks(self.cols).map(<[Rat]>::to_vec).collect()
    }

    pub fn transpose(&self) -> RatMatrix {
        RatMatrix::from_fn(self.cols, self.rows, |i, j| self.get(j, i).clone())
    }

    pub fn scale(&self, factor: &Rat) -> RatMatrix {
        RatMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|x| x * factor).collect(),
        }
    }

    pub fn map(&self, f: impl FnMut(&Rat) -> Rat) -> RatMatrix {
        RatMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(f).collect(),
        }
    }

    pub fn is_nonnegative(&self) -> bool {
        self.data.iter().all(|x| !x.is_negative())
    }

    pub fn is_positive(&self) -> bool {
        self.data.iter().all(Rat::is_positive)
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Rat::is_zero)
    }

    pub fn row_sums(&self) -> Vec<Rat> {
        self.data.chunks(self.cols).map(|row| row.iter().sum()).collect()
    }

    pub fn col_sums(&self) -> Vec<Rat> {
        let mut sums = vec![Rat::zero(); self.cols];
        for row in self.data.chunks(self.cols) {
            for (s, x) in sums.iter_mut().zip(row) {
                *s += x;
            }
        }
        sums
    }

    pub fn trace(&self) -> Rat {
        (0..self.rows.min(self.cols)).map(|i| self.get(i, i)).sum()
    }

    /// First entry (row-major) that is negative.
    pub fn first_negative(&self) -> Option<(usize, usize)> {
        self.data
            .iter()
            .position(Rat::is_negative)
            .map(|k| (k / self.cols, k % self.cols))
    }

    /// First entry (row-major) that is not strictly positive.
    pub fn first_nonpositive(&self) -> Option<(usize, usize)> {
        self.data
            .iter()
            .position(|x| !x.is_positive())
            .map(|k| (k / self.cols, k % self.cols))
    }

    /// Row vector times matrix.
    pub fn left_mul_vec(&self, v: &[Rat]) -> Result<Vec<Rat>> {
        if v.len() != self.rows {
            return Err(Error::dim(format!(
                "vector of length {} cannot multiply a {}x{} matrix from the left",
                v.len(),
                self.rows,
                self.cols
            )));
        }
        let mut out = vec![Rat::zero(); self.cols];
        for (vi, row) in v.iter().zip(self.data.chunks(self.cols)) {
            if vi.is_zero() {
                continue;
            }
            for (o, x) in out.iter_mut().zip(row) {
                if !x.is_zero() {
                    *o += vi * x;
                }
            }
        }
        Ok(out)
    }

    /// Matrix times column vector.
    pub fn mul_vec(&self, v: &[Rat]) -> Result<Vec<Rat>> {
        if v.len() != self.cols {
            return Err(Error::dim(format!(
                "a {}x{} matrix cannot multiply a vector of length {}",
                self.rows,
                self.cols,
                v.len()
            )));
        }
        Ok(self
            .data
            .chunks(self.cols)
            .map(|row| {
                row.iter()
                    .zip(v)
                    .filter(|(x, y)| !x.is_zero() && !y.is_zero())
                    .map(|(x, y)| x * y)
                    .sum()
            })
            .collect())
    }

    pub fn try_mul(&self, rhs: &RatMatrix) -> Result<RatMatrix> {
        if self.cols != rhs.rows {
            return Err(Error::dim(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        Ok(mul_impl(self, rhs))
    }

    pub fn try_add(&self, rhs: &RatMatrix) -> Result<RatMatrix> {
        self.zip_with(rhs, "add", |a, b| a + b)
    }

    pub fn try_sub(&self, rhs: &RatMatrix) -> Result<RatMatrix> {
        self.zip_with(rhs, "subtract", |a, b| a - b)
    }

    fn zip_with(
        &self,
        rhs: &RatMatrix,
        what: &str,
        f: impl Fn(&Rat, &Rat) -> Rat,
    ) -> Result<RatMatrix> {
        if self.shape() != rhs.shape() {
            return Err(Error::dim(format!(
                "cannot {what} {}x{} and {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        Ok(RatMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| f(a, b)).collect(),
        })
    }

    /// First position where `self` and `other` differ; `None` when equal.
    /// Shapes must agree.
    pub fn first_difference(&self, other: &RatMatrix) -> Option<(usize, usize)> {
        debug_assert_eq!(self.shape(), other.shape());
        self.data
            .iter()
            .zip(&other.data)
            .position(|(a, b)| a != b)
            .map(|k| (k / self.cols, k % self.cols))
    }

    /// All positions where `self` and `other` differ.
    pub fn differences(&self, other: &RatMatrix) -> Vec<(usize, usize)> {
        debug_assert_eq!(self.shape(), other.shape());
        self.data
            .iter()
            .zip(&other.data)
            .enumerate()
            .filter(|(_, (a, b))| a != b)
            .map(|(k, _)| (k / self.cols, k % self.cols))
            .collect()
    }

    /// `self^exp` for a square matrix. Large matrices of low rank are raised
    /// through a rank factorization `F G`, using `(F G)^k = F (G F)^(k-1) G`.
    pub fn pow(&self, exp: u64) -> Result<RatMatrix> {
        if !self.is_square() {
            return Err(Error::dim(format!(
                "cannot raise a {}x{} matrix to a power",
                self.rows, self.cols
            )));
        }
        let n = self.rows;
        if exp == 0 {
            return Ok(RatMatrix::identity(n));
        }
        if n >= DEDUP_THRESHOLD && exp > 1 {
            let rows = self.to_rows();
            let basis = RowBasis::of(&rows, n);
            let r = basis.rank();
            if r == 0 {
                return Ok(RatMatrix::zeros(n, n));
            }
            if 2 * r <= n {
                let f = self.select_columns(&basis.pivots);
                let g = RatMatrix::from_rows(basis.rows.clone()).expect("nonempty basis");
                let core = mul_impl(&g, &f).pow(exp - 1)?;
                return Ok(mul_impl(&mul_impl(&f, &core), &g));
            }
        }
        let mut base = self.clone();
        let mut acc: Option<RatMatrix> = None;
        let mut e = exp;
        loop {
            if e & 1 == 1 {
                acc = Some(match acc {
                    None => base.clone(),
                    Some(a) => mul_impl(&a, &base),
                });
            }
            e >>= 1;
            if e == 0 {
                break;
            }
            base = mul_impl(&base, &base);
        }
        Ok(acc.expect("exp >= 1"))
    }

    /// `F_1 F_2 ... F_k`, accumulated from the narrower end over a common
    /// integer denominator. Long products of matrices with growing
    /// denominators stay cheap because no entry is reduced until the end.
    pub fn product(factors: &[&RatMatrix]) -> Result<RatMatrix> {
        let (first, last) = match (factors.first(), factors.last()) {
            (Some(f), Some(l)) => (*f, *l),
            _ => return Err(Error::dim("product of no matrices")),
        };
        if let Some(w) = factors.windows(2).find(|w| w[0].cols != w[1].rows) {
            return Err(Error::dim(format!(
                "cannot multiply {}x{} by {}x{}",
                w[0].rows, w[0].cols, w[1].rows, w[1].cols
            )));
        }
        let acc = if first.rows <= last.cols {
            let mut acc = Scaled::from_matrix(first);
            for f in &factors[1..] {
                acc.mul_right(f);
            }
            acc
        } else {
            let mut acc = Scaled::from_matrix(last);
            for f in factors[..factors.len() - 1].iter().rev() {
                acc.mul_left(f);
            }
            acc
        };
        Ok(acc.into_matrix())
    }

    pub fn select_columns(&self, cols: &[usize]) -> RatMatrix {
        RatMatrix::from_fn(self.rows, cols.len(), |i, j| self.get(i, cols[j]).clone())
    }

    /// Rank over the rationals via fraction-free elimination.
    pub fn rank(&self) -> usize {
        let mut m = integer_rows(self).0;
        bareiss_echelon(&mut m)
    }

    /// Determinant via fraction-free elimination.
    pub fn determinant(&self) -> Result<Rat> {
        if !self.is_square() {
            return Err(Error::dim(format!(
                "determinant of non-square {}x{} matrix",
                self.rows, self.cols
            )));
        }
        let (mut m, scales) = integer_rows(self);
        let n = self.rows;
        let mut sign = BigInt::one();
        let mut prev = BigInt::one();
        for k in 0..n {
            let Some(p) = (k..n).find(|&i| !m[i][k].is_zero()) else {
                return Ok(Rat::zero());
            };
            if p != k {
                m.swap(p, k);
                sign = -sign;
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let v = (&m[k][k] * &m[i][j] - &m[i][k] * &m[k][j]) / &prev;
                    m[i][j] = v;
                }
                m[i][k] = BigInt::zero();
            }
            prev = m[k][k].clone();
        }
        let scale: BigInt = scales.iter().product();
        Ok(Rat::from_bigints(sign * prev, scale).expect("row scales are positive"))
    }

    /// Inverse by Gauss-Jordan elimination; `None` when singular.
    pub fn inverse(&self) -> Option<RatMatrix> {
        if !self.is_square() {
            return None;
        }
        let n = self.rows;
        let mut a = self.to_rows();
        let mut inv = RatMatrix::identity(n).to_rows();
        for k in 0..n {
            let p = (k..n).find(|&i| !a[i][k].is_zero())?;
            a.swap(p, k);
            inv.swap(p, k);
            let piv = a[k][k].recip().expect("nonzero pivot");
            for x in a[k].iter_mut().chain(inv[k].iter_mut()) {
                *x *= &piv;
            }
            for i in 0..n {
                if i == k || a[i][k].is_zero() {
                    continue;
                }
                let f = a[i][k].clone();
                let (pivot_a, pivot_inv) = (a[k].clone(), inv[k].clone());
                sub_scaled(&mut a[i], &f, &pivot_a);
                sub_scaled(&mut inv[i], &f, &pivot_inv);
            }
        }
        Some(RatMatrix::from_rows(inv).expect("square"))
    }

    /// Unique solution of `self * x = b`; `None` when the system is singular.
    pub fn solve(&self, b: &[Rat]) -> Option<Vec<Rat>> {
        if !self.is_square() || b.len() != self.rows {
            return None;
        }
        let n = self.rows;
        let mut a = self.to_rows();
        for (row, bi) in a.iter_mut().zip(b) {
            row.push(bi.clone());
        }
        for k in 0..n {
            let p = (k..n).find(|&i| !a[i][k].is_zero())?;
            a.swap(p, k);
            let piv = a[k][k].recip().expect("nonzero pivot");
            for x in a[k].iter_mut() {
                *x *= &piv;
            }
            let pivot_row = a[k].clone();
            for (i, row) in a.iter_mut().enumerate() {
                if i != k && !row[k].is_zero() {
                    let f = row[k].clone();
                    sub_scaled(row, &f, &pivot_row);
                }
            }
        }
        Some(a.into_iter().map(|mut row| row.pop().expect("augmented")).collect())
    }
}

/// `row -= f * pivot`, skipping zero entries of `pivot`.
pub(crate) fn sub_scaled(row: &mut [Rat], f: &Rat, pivot: &[Rat]) {
    for (x, p) in row.iter_mut().zip(pivot) {
        if !p.is_zero() {
            *x -= f * p;
        }
    }
}

/// Scales each row by the lcm of its denominators. Returns the integer rows
/// and the scale factors.
fn integer_rows(m: &RatMatrix) -> (Vec<Vec<BigInt>>, Vec<BigInt>) {
    let mut rows = Vec::with_capacity(m.rows);
    let mut scales = Vec::with_capacity(m.rows);
    for i in 0..m.rows {
        let scale = m
            .row(i)
            .iter()
            .fold(BigInt::one(), |acc, x| acc.lcm(&x.denom()));
        rows.push(
            m.row(i)
                .iter()
                .map(|x| x.numer() * (&scale / x.denom()))
                .collect(),
        );
        scales.push(scale);
    }
    (rows, scales)
}

/// Fraction-free row echelon reduction in place; returns the rank.
fn bareiss_echelon(m: &mut [Vec<BigInt>]) -> usize {
    let rows = m.len();
    let cols = m.first().map_or(0, Vec::len);
    let mut prev = BigInt::one();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(p, r);
        for i in r + 1..rows {
            for j in c + 1..cols {
                let v = (&m[r][c] * &m[i][j] - &m[i][c] * &m[r][j]) / &prev;
                m[i][j] = v;
            }
            m[i][c] = BigInt::zero();
        }
        prev = m[r][c].clone();
        r += 1;
    }
    r
}

/// Assigns every row a class id so that equal rows share an id. Returns the
/// id per row and one representative row index per class.
fn row_classes<'a>(rows: usize, row: impl Fn(usize) -> &'a [Rat]) -> (Vec<usize>, Vec<usize>) {
    let mut ids = Vec::with_capacity(rows);
    let mut reps = Vec::new();
    let mut seen: FxHashMap<&'a [Rat], usize> = FxHashMap::default();
    for i in 0..rows {
        let slice = row(i);
        let next = reps.len();
        let id = *seen.entry(slice).or_insert(next);
        if id == next {
            reps.push(i);
        }
        ids.push(id);
    }
    (ids, reps)
}

/// Column of the single entry of every row, when each row of `m` is a
/// standard basis vector.
fn selection(m: &RatMatrix) -> Option<Vec<usize>> {
    (0..m.rows)
        .map(|i| {
            let mut hit = None;
            for (j, x) in m.row(i).iter().enumerate() {
                if x.is_zero() {
                    continue;
                }
                if hit.is_some() || !x.is_one() {
                    return None;
                }
                hit = Some(j);
            }
            hit
        })
        .collect()
}

fn mul_impl(a: &RatMatrix, b: &RatMatrix) -> RatMatrix {
    debug_assert_eq!(a.cols, b.rows);
    let (n, inner, m) = (a.rows, a.cols, b.cols);
    if n >= DEDUP_THRESHOLD || inner >= DEDUP_THRESHOLD {
        if let Some(sel) = selection(a) {
            let mut data = Vec::with_capacity(n * m);
            for k in sel {
                data.extend_from_slice(b.row(k));
            }
            return RatMatrix { rows: n, cols: m, data };
        }
        if let Some(sel) = selection(b) {
            let mut data = vec![Rat::zero(); n * m];
            for i in 0..n {
                let out = &mut data[i * m..(i + 1) * m];
                for (x, &j) in a.row(i).iter().zip(&sel) {
                    if !x.is_zero() {
                        out[j] += x;
                    }
                }
            }
            return RatMatrix { rows: n, cols: m, data };
        }
    }
    let dedup = n >= DEDUP_THRESHOLD || inner >= DEDUP_THRESHOLD;

    // Rows of `b` grouped into classes of identical rows: a row of the
    // product is sum over classes of (sum of the matching a-coefficients) * row.
    let (b_ids, b_reps) = if dedup {
        row_classes(inner, |k| b.row(k))
    } else {
        ((0..inner).collect(), (0..inner).collect())
    };
    let sparse_reps: Vec<Vec<(usize, &Rat)>> = b_reps
        .iter()
        .map(|&k| b.row(k).iter().enumerate().filter(|(_, x)| !x.is_zero()).collect())
        .collect();
    let (a_ids, a_reps) = if dedup {
        row_classes(n, |i| a.row(i))
    } else {
        ((0..n).collect(), (0..n).collect())
    };

    let mut distinct_rows: Vec<Vec<Rat>> = Vec::with_capacity(a_reps.len());
    let mut coef = vec![Rat::zero(); b_reps.len()];
    for &i in &a_reps {
        coef.iter_mut().for_each(|c| *c = Rat::zero());
        for (k, x) in a.row(i).iter().enumerate() {
            if !x.is_zero() {
                coef[b_ids[k]] += x;
            }
        }
        let mut out = vec![Rat::zero(); m];
        for (c, entries) in coef.iter().zip(&sparse_reps) {
            if c.is_zero() {
                continue;
            }
            for &(j, y) in entries {
                out[j] += c * y;
            }
        }
        distinct_rows.push(out);
    }
    let mut data = Vec::with_capacity(n * m);
    for id in a_ids {
        data.extend_from_slice(&distinct_rows[id]);
    }
    RatMatrix { rows: n, cols: m, data }
}

/// `num / den` with an integer matrix `num`.
struct Scaled {
    rows: usize,
    cols: usize,
    num: Vec<BigInt>,
    den: BigInt,
    /// Bit length of `den` after the last content reduction.
    reduced_bits: u64,
}

impl Scaled {
    fn from_matrix(m: &RatMatrix) -> Scaled {
        let den = m.data.iter().fold(BigInt::one(), |acc, x| acc.lcm(&x.denom()));
        let num = m.data.iter().map(|x| x.numer() * (&den / x.denom())).collect();
        let reduced_bits = den.bits();
        Scaled { rows: m.rows, cols: m.cols, num, den, reduced_bits }
    }

    fn row(&self, i: usize) -> &[BigInt] {
        &self.num[i * self.cols..(i + 1) * self.cols]
    }

    /// Distinct rows of `m` as sparse integer rows, the class of every row,
    /// and the common denominator.
    fn sparse_classes(m: &RatMatrix) -> (Vec<usize>, Vec<Vec<(usize, BigInt)>>, BigInt) {
        let (ids, reps) = if m.rows >= DEDUP_THRESHOLD {
            row_classes(m.rows, |k| m.row(k))
        } else {
            ((0..m.rows).collect(), (0..m.rows).collect())
        };
        // Every row equals some representative, so they carry all denominators.
        let den = reps
            .iter()
            .flat_map(|&k| m.row(k))
            .filter(|x| !x.is_zero())
            .fold(BigInt::one(), |acc, x| acc.lcm(&x.denom()));
        let sparse = reps
            .iter()
            .map(|&k| {
                m.row(k)
                    .iter()
                    .enumerate()
                    .filter(|(_, x)| !x.is_zero())
                    .map(|(j, x)| (j, x.numer() * (&den / x.denom())))
                    .collect()
            })
            .collect();
        (ids, sparse, den)
    }

    /// `self = self * m`.
    fn mul_right(&mut self, m: &RatMatrix) {
        debug_assert_eq!(self.cols, m.rows);
        let (ids, reps, d) = Scaled::sparse_classes(m);
        let mut num = Vec::with_capacity(self.rows * m.cols);
        let mut coef = vec![BigInt::zero(); reps.len()];
        for i in 0..self.rows {
            coef.iter_mut().for_each(|c| *c = BigInt::zero());
            for (k, x) in self.row(i).iter().enumerate() {
                if !x.is_zero() {
                    coef[ids[k]] += x;
                }
            }
            let mut out = vec![BigInt::zero(); m.cols];
            for (c, entries) in coef.iter().zip(&reps) {
                if c.is_zero() {
                    continue;
                }
                for (j, y) in entries {
                    out[*j] += c * y;
                }
            }
            num.extend(out);
        }
        self.cols = m.cols;
        self.num = num;
        self.den *= d;
        self.reduce_if_grown();
    }

    /// `self = m * self`.
    fn mul_left(&mut self, m: &RatMatrix) {
        debug_assert_eq!(m.cols, self.rows);
        if let Some(sel) = selection(m) {
            let mut num = Vec::with_capacity(m.rows * self.cols);
            for k in sel {
                num.extend_from_slice(self.row(k));
            }
            self.rows = m.rows;
            self.num = num;
            return;
        }
        let (ids, reps, d) = Scaled::sparse_classes(m);
        let distinct: Vec<Vec<BigInt>> = reps
            .iter()
            .map(|entries| {
                let mut out = vec![BigInt::zero(); self.cols];
                for (k, y) in entries {
                    for (o, x) in out.iter_mut().zip(self.row(*k)) {
                        if !x.is_zero() {
                            *o += y * x;
                        }
                    }
                }
                out
            })
            .collect();
        let mut num = Vec::with_capacity(m.rows * self.cols);
        for id in ids {
            num.extend_from_slice(&distinct[id]);
        }
        self.rows = m.rows;
        self.num = num;
        self.den *= d;
        self.reduce_if_grown();
    }

    /// Content reduction costs a gcd per entry, so it runs only once the
    /// denominator has doubled in length.
    fn reduce_if_grown(&mut self) {
        if self.den.bits() > 2 * self.reduced_bits + 64 {
            self.reduce();
            self.reduced_bits = self.den.bits();
        }
    }

    /// Divides out the content shared by all numerators and the denominator.
    fn reduce(&mut self) {
        // Products of split matrices repeat a few values many times; each
        // distinct numerator needs only one gcd.
        let mut seen = FxHashSet::default();
        let mut g = self.den.clone();
        for x in &self.num {
            if g.is_one() {
                return;
            }
            if !x.is_zero() && seen.insert(x) {
                g = g.gcd(x);
            }
        }
        if g.is_one() {
            return;
        }
        for x in self.num.iter_mut() {
            if !x.is_zero() {
                *x /= &g;
            }
        }
        self.den /= &g;
    }

    fn into_matrix(self) -> RatMatrix {
        let den = self.den;
        let mut reduced: FxHashMap<BigInt, Rat> = FxHashMap::default();
        let data = self
            .num
            .into_iter()
            .map(|x| match reduced.get(&x) {
                Some(r) => r.clone(),
                None => {
                    let r = Rat::from_bigints(x.clone(), den.clone()).expect("nonzero denominator");
                    reduced.insert(x, r.clone());
                    r
                }
            })
            .collect();
        RatMatrix { rows: self.rows, cols: self.cols, data }
    }
}

/// Reduced row echelon basis of the row space of a matrix, together with
/// the pivot column of each basis row. Identical input rows are reduced once.
pub(crate) struct RowBasis {
    pub pivots: Vec<usize>,
    pub rows: Vec<Vec<Rat>>,
}

impl RowBasis {
    pub fn of(rows: &[Vec<Rat>], cols: usize) -> RowBasis {
        let mut basis = RowBasis {
            pivots: Vec::new(),
            rows: Vec::new(),
        };
        let mut seen: FxHashMap<&[Rat], ()> = FxHashMap::default();
        for row in rows {
            if rows.len() >= DEDUP_THRESHOLD && seen.insert(row.as_slice(), ()).is_some() {
                continue;
            }
            if basis.rows.len() == cols {
                break;
            }
            basis.insert(row.clone());
        }
        basis
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    fn insert(&mut self, mut v: Vec<Rat>) {
        for (p, g) in self.pivots.iter().zip(&self.rows) {
            if !v[*p].is_zero() {
                let f = v[*p].clone();
                sub_scaled(&mut v, &f, g);
            }
        }
        let Some(q) = v.iter().position(|x| !x.is_zero()) else {
            return;
        };
        let inv = v[q].recip().expect("nonzero pivot");
        for x in v.iter_mut() {
            if !x.is_zero() {
                *x *= &inv;
            }
        }
        for g in self.rows.iter_mut() {
            if !g[q].is_zero() {
                let f = g[q].clone();
                sub_scaled(g, &f, &v);
            }
        }
        self.pivots.push(q);
        self.rows.push(v);
    }
}

impl Index<(usize, usize)> for RatMatrix {
    type Output = Rat;
    fn index(&self, (i, j): (usize, usize)) -> &Rat {
        self.get(i, j)
    }
}

impl Mul<&RatMatrix> for &RatMatrix {
    type Output = RatMatrix;
    /// Panics on a shape mismatch; see [`RatMatrix::try_mul`].
    fn mul(self, rhs: &RatMatrix) -> RatMatrix {
        self.try_mul(rhs).unwrap_or_else(|e| panic!("{e}"))
    }
}

impl Add<&RatMatrix> for &RatMatrix {
    type Output = RatMatrix;
    fn add(self, rhs: &RatMatrix) -> RatMatrix {
        self.try_add(rhs).unwrap_or_else(|e| panic!("{e}"))
    }
}

impl Sub<&RatMatrix> for &RatMatrix {
    type Output = RatMatrix;
    fn sub(self, rhs: &RatMatrix) -> RatMatrix {
        self.try_sub(rhs).unwrap_or_else(|e| panic!("{e}"))
    }
}

impl Neg for &RatMatrix {
    type Output = RatMatrix;
    fn neg(self) -> RatMatrix {
        self.map(|x| -x)
    }
}

impl fmt::Display for RatMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let cells: Vec<String> = self.data.iter().map(Rat::to_string).collect();
        let width = cells.iter().map(String::len).max().unwrap_or(1);
        for (i, row) in cells.chunks(self.cols).enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "[")?;
            for (j, c) in row.iter().enumerate() {
                if j > 0 {
                    write!(f, " ")?;
                }
                write!(f, "{c:>width$}")?;
            }
            write!(f, "]")?;
        }
        Ok(())
    }
}

impl fmt::Debug for RatMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "RatMatrix {}x{} [", self.rows, self.cols)?;
        for (i, row) in self.data.chunks(self.cols).enumerate() {
            if i > 0 {
                write!(f, "; ")?;
            }
            let cells: Vec<String> = row.iter().map(Rat::to_string).collect();
            write!(f, "{}", cells.join(", "))?;
        }
        write!(f, "]")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Rank by plain rational Gaussian elimination.
    fn naive_rank(m: &RatMatrix) -> usize {
        let mut a = m.to_rows();
        let mut r = 0;
        for c in 0..m.cols() {
            let Some(p) = (r..a.len()).find(|&i| !a[i][c].is_zero()) else {
                continue;
            };
            a.swap(p, r);
            for i in r + 1..a.len() {
                let f = &a[i][c] / &a[r][c];
                let pivot = a[r].clone();
                sub_scaled(&mut a[i], &f, &pivot);
            }
            r += 1;
        }
        r
    }

    #[test]
    fn rank_examples() {
        assert_eq!(RatMatrix::identity(3).rank(), 3);
        assert_eq!(RatMatrix::filled(3, 3, Rat::ratio(1, 3)).rank(), 1);
        assert_eq!(RatMatrix::from_int_rows(&[[0, 1], [0, 0]]).rank(), 1);
        assert_eq!(RatMatrix::zeros(2, 3).rank(), 0);
        let m = RatMatrix::from_int_rows(&[[0, 0, 1, 2], [0, 0, 2, 4], [1, 0, 0, 1]]);
        assert_eq!(m.rank(), 2);
        assert_eq!(naive_rank(&m), 2);
    }

    #[test]
    fn determinant_and_inverse() {
        let m = RatMatrix::from_scaled_ints(&[[7, 2, 1], [2, 7, 1], [2, 2, 6]], 10);
        let det = m.determinant().unwrap();
        assert_eq!(det, Rat::ratio(1, 4));
        let inv = m.inverse().unwrap();
        assert_eq!(&m * &inv, RatMatrix::identity(3));
        assert!(RatMatrix::filled(2, 2, Rat::one()).inverse().is_none());
        let x = m.solve(&[Rat::one(), Rat::zero(), Rat::zero()]).unwrap();
        assert_eq!(m.mul_vec(&x).unwrap(), vec![Rat::one(), Rat::zero(), Rat::zero()]);
    }

    #[test]
    fn dedup_multiplication_matches_plain() {
        // Many repeated rows on both sides, above the grouping threshold.
        let base = [[1, 2, 0], [3, -1, 5], [0, 0, 7]];
        let a = RatMatrix::from_fn(20, 15, |i, j| Rat::from_integer(base[i % 3][j % 3] + (j / 3) as i64));
        let b = RatMatrix::from_fn(15, 18, |i, j| Rat::ratio(base[i % 2][j % 3], 1 + (j % 4) as i64));
        let fast = &a * &b;
        let slow = RatMatrix::from_fn(20, 18, |i, j| (0..15).map(|k| a.get(i, k) * b.get(k, j)).sum());
        assert_eq!(fast, slow);
    }

    #[test]
    fn low_rank_power_matches_squaring() {
        let a = RatMatrix::from_fn(16, 16, |i, j| Rat::ratio(((i % 3) + 1) as i64 * (j as i64 % 5 + 1), 40));
        let mut slow = RatMatrix::identity(16);
        for _ in 0..7 {
            slow = &slow * &a;
        }
        assert_eq!(a.pow(7).unwrap(), slow);
        assert_eq!(a.pow(0).unwrap(), RatMatrix::identity(16));
        assert_eq!(a.pow(1).unwrap(), a);
    }

    #[test]
    fn chained_product_matches_pairwise() {
        let wide = RatMatrix::from_fn(2, 14, |i, j| Rat::ratio((i + j) as i64 % 4, 6));
        let repeated = RatMatrix::from_fn(14, 15, |i, j| Rat::ratio(((i % 3) * j) as i64 + 1, 7));
        let tall = RatMatrix::from_fn(15, 3, |i, j| Rat::ratio(i as i64 - j as i64, 11));
        let expected = &(&wide * &repeated) * &tall;
        assert_eq!(RatMatrix::product(&[&wide, &repeated, &tall]).unwrap(), expected);
        let t: Vec<RatMatrix> = [&tall, &repeated, &wide].iter().map(|m| m.transpose()).collect();
        assert_eq!(RatMatrix::product(&[&t[0], &t[1], &t[2]]).unwrap(), expected.transpose());
        assert!(RatMatrix::product(&[&wide, &tall]).is_err());
        assert!(RatMatrix::product(&[]).is_err());
    }

    #[test]
    fn shape_errors() {
        let a = RatMatrix::zeros(2, 3);
        assert!(a.try_mul(&a).is_err());
        assert!(a.determinant().is_err());
        assert!(a.pow(2).is_err());
        assert!(RatMatrix::new(0, 1, vec![]).is_err());
        assert!(RatMatrix::from_rows(vec![vec![Rat::one()], vec![]]).is_err());
    }
}
