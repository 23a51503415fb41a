use super::matrix::{sub_scaled, RowBasis};
use super::{Rat, RatMatrix, RatPoly};
use crate::error::{Error, Result};

/// Below this size the Hessenberg route is used directly.
const SMALL: usize = 8;

/// `det(tI - A)`, monic of degree `n`.
///
/// Singular matrices are first compressed through a rank factorization
/// `A = F G` (with `G` a reduced echelon basis of the row space), using
/// `det(tI_n - F G) = t^(n - r) det(tI_r - G F)`. Full-rank matrices go
/// through a similarity reduction to upper Hessenberg form.
pub fn charpoly(a: &RatMatrix) -> Result<RatPoly> {
    if !a.is_square() {
        return Err(Error::dim(format!(
            "characteristic polynomial of non-square {}x{} matrix",
            a.rows(),
            a.cols()
        )));
    }
    Ok(charpoly_rows(a.to_rows()))
}

/// `charpoly(a)` with every factor of `t` divided out: encodes the nonzero
/// spectrum with multiplicity.
pub fn nonzero_charpoly(a: &RatMatrix) -> Result<RatPoly> {
    Ok(charpoly(a)?.split_t_power().1)
}

fn charpoly_rows(m: Vec<Vec<Rat>>) -> RatPoly {
    let n = m.len();
    if n == 0 {
        return RatPoly::one();
    }
    if n <= SMALL {
        return hessenberg_charpoly(m);
    }
    let basis = RowBasis::of(&m, n);
    let r = basis.rank();
    if r == n {
        return hessenberg_charpoly(m);
    }
    // G F where F = A[:, pivots]: entry (s, u) = sum_k G[s][k] * A[k][pivot_u].
    let compressed: Vec<Vec<Rat>> = basis
        .rows
        .iter()
        .map(|g| {
            basis
                .pivots
                .iter()
                .map(|&p| {
                    g.iter()
                        .zip(&m)
                        .filter(|(x, _)| !x.is_zero())
                        .map(|(x, row)| x * &row[p])
                        .sum()
                })
                .collect()
        })
        .collect();
    charpoly_rows(compressed).shift(n - r)
}

/// Reduces to upper Hessenberg form by elementary similarities, then runs
/// the standard three-term recurrence on the leading principal minors.
fn hessenberg_charpoly(mut h: Vec<Vec<Rat>>) -> RatPoly {
    let n = h.len();
    for m in 1..n.saturating_sub(1) {
        let Some(i) = (m..n).find(|&i| !h[i][m - 1].is_zero()) else {
            continue;
        };
        if i != m {
            h.swap(i, m);
            for row in h.iter_mut() {
                row.swap(i, m);
            }
        }
        let pivot_inv = h[m][m - 1].recip().expect("nonzero pivot");
        for i in m + 1..n {
            if h[i][m - 1].is_zero() {
                continue;
            }
            let u = &h[i][m - 1] * &pivot_inv;
            // row_i -= u * row_m, then col_m += u * col_i.
            let pivot_row = h[m].clone();
            sub_scaled(&mut h[i], &u, &pivot_row);
            for row in h.iter_mut() {
                if !row[i].is_zero() {
                    let add = &u * &row[i];
                    row[m] += add;
                }
            }
        }
    }
    // p_0 = 1, p_k = (t - h_kk) p_{k-1} - sum_{i<k} h_ik (prod_{j=i+1}^{k} h_{j,j-1}) p_{i-1}
    let mut p: Vec<RatPoly> = Vec::with_capacity(n + 1);
    p.push(RatPoly::one());
    for k in 0..n {
        let linear = RatPoly::new(vec![-&h[k][k], Rat::one()]);
        let mut next = &linear * &p[k];
        let mut prod = Rat::one();
        for i in (0..k).rev() {
            prod *= &h[i + 1][i];
            if prod.is_zero() {
                break;
            }
            let c = &prod * &h[i][k];
            if !c.is_zero() {
                next = &next - &p[i].scale(&c);
            }
        }
        p.push(next);
    }
    p.pop().expect("n >= 1")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_and_nilpotent() {
        let id = RatMatrix::identity(2);
        assert_eq!(charpoly(&id).unwrap(), RatPoly::from_roots(&[Rat::one(), Rat::one()]));
        let n = RatMatrix::from_int_rows(&[[0, 1], [0, 0]]);
        assert_eq!(charpoly(&n).unwrap(), RatPoly::monomial(2));
        assert_eq!(nonzero_charpoly(&RatMatrix::zeros(2, 2)).unwrap(), RatPoly::one());
        assert!(charpoly(&RatMatrix::zeros(2, 3)).is_err());
    }

    #[test]
    fn rank_one_uniform() {
        let j3 = RatMatrix::filled(3, 3, Rat::ratio(1, 3));
        let expected = RatPoly::from_roots(&[Rat::zero(), Rat::zero(), Rat::one()]);
        assert_eq!(charpoly(&j3).unwrap(), expected);
        let j2 = RatMatrix::filled(2, 2, Rat::ratio(1, 2));
        assert_eq!(nonzero_charpoly(&j2).unwrap(), RatPoly::from_roots(&[Rat::one()]));
    }

    #[test]
    fn compressed_route_agrees_with_hessenberg() {
        // 14x14 of rank 3 with many repeated rows.
        let base = [[1, 2, 3], [0, 5, -1], [2, 2, 2]];
        let a = RatMatrix::from_fn(14, 14, |i, j| Rat::ratio(base[i % 3][j % 3] * (1 + (j / 3) as i64), 7));
        assert_eq!(charpoly(&a).unwrap(), hessenberg_charpoly(a.to_rows()));
    }
}
