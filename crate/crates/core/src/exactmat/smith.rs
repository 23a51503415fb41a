//! Invariant factors of the characteristic matrix `tI - A` over `Q[t]`.

use super::{Rat, RatMatrix, RatPoly};
use crate::error::{Error, Result};

/// Monic invariant factors `d_1 | d_2 | ... | d_n` of `tI - A`, computed by
/// a Smith normal form reduction over `Q[t]`. Their product is `charpoly(A)`.
pub fn invariant_factors(a: &RatMatrix) -> Result<Vec<RatPoly>> {
    if !a.is_square() {
        return Err(Error::dim(format!(
            "invariant factors of non-square {}x{} matrix",
            a.rows(),
            a.cols()
        )));
    }
    let n = a.rows();
    let mut m: Vec<Vec<RatPoly>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    let c = -a.get(i, j);
                    if i == j {
                        RatPoly::new(vec![c, Rat::one()])
                    } else {
                        RatPoly::constant(c)
                    }
                })
                .collect()
        })
        .collect();

    for k in 0..n {
        loop {
            // Pivot: nonzero entry of least degree in the trailing block.
            let Some((pi, pj)) = (k..n)
                .flat_map(|i| (k..n).map(move |j| (i, j)))
                .filter(|&(i, j)| !m[i][j].is_zero())
                .min_by_key(|&(i, j)| m[i][j].degree())
            else {
                break;
            };
            m.swap(k, pi);
            for row in m.iter_mut() {
                row.swap(k, pj);
            }

            let pivot = m[k][k].clone();
            let mut dirty = false;
            for i in k + 1..n {
                if m[i][k].is_zero() {
                    continue;
                }
                let (q, r) = m[i][k].div_rem(&pivot);
                for j in k..n {
                    let sub = &q * &m[k][j];
                    m[i][j] = &m[i][j] - &sub;
                }
                dirty |= !r.is_zero();
            }
            for j in k + 1..n {
                if m[k][j].is_zero() {
                    continue;
                }
                let (q, r) = m[k][j].div_rem(&pivot);
                for row in m.iter_mut().skip(k) {
                    let sub = &q * &row[k];
                    row[j] = &row[j] - &sub;
                }
                dirty |= !r.is_zero();
            }
            if dirty {
                continue;
            }
            // Row and column k are clear; the pivot must divide the rest.
            let offender = (k + 1..n).find(|&i| (k + 1..n).any(|j| !pivot.divides(&m[i][j])));
            match offender {
                Some(i) => {
                    for j in k..n {
                        let add = m[i][j].clone();
                        m[k][j] = &m[k][j] + &add;
                    }
                }
                None => break,
            }
        }
    }
    Ok((0..n).map(|i| m[i][i].monic()).collect())
}

/// Whether `A` and `B` are similar over the rationals (equivalently over the
/// reals), decided by comparing invariant factors.
pub fn similar_over_rationals(a: &RatMatrix, b: &RatMatrix) -> Result<bool> {
    if a.shape() != b.shape() || !a.is_square() {
        return Err(Error::dim(format!(
            "similarity needs square matrices of equal size, got {}x{} and {}x{}",
            a.rows(),
            a.cols(),
            b.rows(),
            b.cols()
        )));
    }
    Ok(invariant_factors(a)? == invariant_factors(b)?)
}
