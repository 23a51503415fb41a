//! Support-digraph tests for nonnegative square matrices.

use super::RatMatrix;
use crate::error::{Error, Result};

fn check_nonnegative_square(a: &RatMatrix) -> Result<()> {
    if !a.is_square() {
        return Err(Error::dim(format!("{}x{} matrix is not square", a.rows(), a.cols())));
    }
    if let Some((i, j)) = a.first_negative() {
        return Err(Error::domain(format!(
            "entry ({i}, {j}) = {} is negative",
            a.get(i, j)
        )));
    }
    Ok(())
}

/// Boolean support as rows of 64-bit words.
struct Support {
    n: usize,
    words: usize,
    bits: Vec<u64>,
}

impl Support {
    fn of(a: &RatMatrix) -> Support {
        let n = a.rows();
        let words = n.div_ceil(64);
        let mut bits = vec![0u64; n * words];
        for i in 0..n {
            for j in 0..n {
                if a.get(i, j).is_positive() {
                    bits[i * words + j / 64] |= 1 << (j % 64);
                }
            }
        }
        Support { n, words, bits }
    }

    fn has(&self, i: usize, j: usize) -> bool {
        self.bits[i * self.words + j / 64] >> (j % 64) & 1 == 1
    }

    fn row(&self, i: usize) -> &[u64] {
        &self.bits[i * self.words..(i + 1) * self.words]
    }

    fn square(&self) -> Support {
        let mut bits = vec![0u64; self.bits.len()];
        for i in 0..self.n {
            let out = &mut bits[i * self.words..(i + 1) * self.words];
            for k in 0..self.n {
                if self.has(i, k) {
                    for (o, w) in out.iter_mut().zip(self.row(k)) {
                        *o |= w;
                    }
                }
            }
        }
        Support { n: self.n, words: self.words, bits }
    }

    fn is_full(&self) -> bool {
        let tail = self.n % 64;
        (0..self.n).all(|i| {
            self.row(i).iter().enumerate().all(|(w, &x)| {
                if w + 1 == self.words && tail != 0 {
                    x == (1u64 << tail) - 1
                } else {
                    x == u64::MAX
                }
            })
        })
    }

    fn reaches_all(&self, reverse: bool) -> bool {
        let mut seen = vec![false; self.n];
        let mut stack = vec![0];
        seen[0] = true;
        while let Some(u) = stack.pop() {
            for v in 0..self.n {
                let edge = if reverse { self.has(v, u) } else { self.has(u, v) };
                if edge && !seen[v] {
                    seen[v] = true;
                    stack.push(v);
                }
            }
        }
        seen.into_iter().all(|s| s)
    }
}

/// True iff the digraph with an edge `i -> j` whenever `a_ij > 0` is
/// strongly connected.
pub fn is_irreducible(a: &RatMatrix) -> Result<bool> {
    check_nonnegative_square(a)?;
    let s = Support::of(a);
    Ok(s.reaches_all(false) && s.reaches_all(true))
}

/// True iff some power of `a` is positive. Decided by squaring the boolean
/// support until the exponent reaches the Wielandt bound `n^2 - 2n + 2`.
pub fn is_primitive(a: &RatMatrix) -> Result<bool> {
    check_nonnegative_square(a)?;
    if a.is_positive() {
        return Ok(true);
    }
    let n = a.rows();
    let bound = (n - 1) * (n - 1) + 1;
    let mut s = Support::of(a);
    let mut exp = 1;
    while exp < bound {
        s = s.square();
        exp *= 2;
        if s.is_full() {
            return Ok(true);
        }
    }
    Ok(s.is_full())
}
