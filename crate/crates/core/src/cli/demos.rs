//! The matrix families behind the `demo-*` subcommands.

use num_integer::Integer;

use crate::error::{Error, Result};
use crate::exactmat::{Rat, RatMatrix};

/// `P_t = (1/4) [[3 + t, 1 - t], [1 + t, 3 - t]]` for `t` in `[0, 1]`.
pub fn pt_matrix(t: &Rat) -> Result<RatMatrix> {
    if t.is_negative() || *t > Rat::one() {
        return Err(Error::domain(format!("t = {t} is outside [0, 1]")));
    }
    let q = Rat::ratio(1, 4);
    let three = Rat::from_integer(3);
    let one = Rat::one();
    let rows = vec![
        vec![&(&three + t) * &q, &(&one - t) * &q],
        vec![&(&one + t) * &q, &(&three - t) * &q],
    ];
    RatMatrix::from_rows(rows)
}

/// `A_n = 1/(n + 2) [[1, n, 1], [n, 1, 1], [n, 1, 1]]` for `n >= 1`.
pub fn an_matrix(n: u64) -> Result<RatMatrix> {
    if n == 0 {
        return Err(Error::domain("A_n needs n >= 1"));
    }
    let n = n as i64;
    Ok(RatMatrix::from_scaled_ints(&[[1, n, 1], [n, 1, 1], [n, 1, 1]], n + 2))
}

/// Third eigenvalue `-(n - 1)/(n + 2)` of `A_n`.
pub fn an_third_eigenvalue(n: u64) -> Rat {
    Rat::ratio(-(n as i64 - 1), n as i64 + 2)
}

/// `[[0, b, c], [c, 0, b], [b, c, 0]]`.
pub fn circulant(b: &Rat, c: &Rat) -> RatMatrix {
    let z = Rat::zero();
    RatMatrix::from_rows(vec![
        vec![z.clone(), b.clone(), c.clone()],
        vec![c.clone(), z.clone(), b.clone()],
        vec![b.clone(), c.clone(), z],
    ])
    .expect("3x3")
}

/// For a 3x3 doubly stochastic matrix of trace zero, the pair `(b, c)` with
/// `b + c = 1` such that it equals `circulant(b, c)`. Nonnegativity and zero
/// trace force the diagonal to vanish, which pins down the rest.
pub fn circulant_form(a: &RatMatrix) -> Result<(Rat, Rat)> {
    if a.shape() != (3, 3) {
        return Err(Error::Structural(format!("expected a 3x3 matrix, got {}x{}", a.rows(), a.cols())));
    }
    if let Some((i, j)) = a.first_negative() {
        return Err(Error::Structural(format!("entry ({i}, {j}) = {} is negative", a.get(i, j))));
    }
    for (what, sums) in [("row", a.row_sums()), ("column", a.col_sums())] {
        if let Some((k, s)) = sums.iter().enumerate().find(|(_, s)| !s.is_one()) {
            return Err(Error::Structural(format!("{what} {k} sums to {s}, not 1")));
        }
    }
    let tr = a.trace();
    if !tr.is_zero() {
        return Err(Error::Structural(format!("trace is {tr}, not 0")));
    }
    let (b, c) = (a.get(0, 1).clone(), a.get(0, 2).clone());
    let expected = circulant(&b, &c);
    if let Some((i, j)) = expected.first_difference(a) {
        return Err(Error::Structural(format!(
            "entry ({i}, {j}) = {} but the circulant form needs {}",
            a.get(i, j),
            expected.get(i, j)
        )));
    }
    Ok((b, c))
}

/// `b^3 + (1 - b)^3`, the determinant of `circulant(b, 1 - b)`.
pub fn circulant_det(b: &Rat) -> Rat {
    let c = Rat::one() - b;
    &b.pow(3) + &c.pow(3)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GridScan {
    pub max_den: u64,
    pub points: usize,
    pub min_value: Rat,
    /// Every grid point attaining the minimum.
    pub argmin: Vec<Rat>,
}

/// Exact minimum of `b^3 + (1 - b)^3` over the reduced fractions `p/q` in
/// `[0, 1]` with `q <= max_den`.
pub fn circulant_grid_scan(max_den: u64) -> GridScan {
    let mut points = 0;
    let mut min_value: Option<Rat> = None;
    let mut argmin = Vec::new();
    for q in 1..=max_den as i64 {
        for p in 0..=q {
            if p.gcd(&q) != 1 {
                continue;
            }
            points += 1;
            let b = Rat::ratio(p, q);
            let f = circulant_det(&b);
            match &min_value {
                Some(m) if f > *m => {}
                Some(m) if f == *m => argmin.push(b),
                _ => {
                    min_value = Some(f);
                    argmin = vec![b];
                }
            }
        }
    }
    GridScan { max_den, points, min_value: min_value.expect("grid contains 0 and 1"), argmin }
}

/// Critical point of `f(b) = b^3 + (1 - b)^3`: `f'(b) = 3 b^2 - 3 (1 - b)^2
/// = 3 (2b - 1)` vanishes only at `b = 1/2`, and `f'' = 6 > 0` there.
pub fn circulant_critical_point() -> (Rat, Rat) {
    let half = Rat::ratio(1, 2);
    let f = circulant_det(&half);
    (half, f)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactmat::charpoly;

    #[test]
    fn pt_values() {
        let p0 = pt_matrix(&Rat::zero()).unwrap();
        assert_eq!(p0, RatMatrix::from_scaled_ints(&[[3, 1], [1, 3]], 4));
        let p1 = pt_matrix(&Rat::one()).unwrap();
        assert_eq!(p1, RatMatrix::from_scaled_ints(&[[4, 0], [2, 2]], 4));
        assert!(pt_matrix(&Rat::ratio(5, 4)).is_err());
        assert!(pt_matrix(&Rat::ratio(-1, 4)).is_err());
    }

    #[test]
    fn an_small() {
        let a1 = an_matrix(1).unwrap();
        assert_eq!(charpoly(&a1).unwrap().to_string(), "t^3 - t^2");
        assert_eq!(an_third_eigenvalue(2), Rat::ratio(-1, 4));
        assert_eq!(an_third_eigenvalue(100), Rat::ratio(-33, 34));
        assert!(an_matrix(0).is_err());
    }

    #[test]
    fn circulant_checker() {
        let half = Rat::ratio(1, 2);
        let m = circulant(&half, &half);
        assert_eq!(circulant_form(&m).unwrap(), (half.clone(), half.clone()));
        assert_eq!(m.determinant().unwrap(), Rat::ratio(1, 4));

        let perm = circulant(&Rat::one(), &Rat::zero());
        assert_eq!(perm.determinant().unwrap(), Rat::one());
        let perm = circulant(&Rat::zero(), &Rat::one());
        assert_eq!(perm.determinant().unwrap(), Rat::one());

        let j3 = RatMatrix::filled(3, 3, Rat::ratio(1, 3));
        assert!(matches!(circulant_form(&j3), Err(Error::Structural(_))));
        assert!(circulant_form(&RatMatrix::identity(2)).is_err());
    }

    #[test]
    fn small_grid() {
        let scan = circulant_grid_scan(4);
        // 0, 1, 1/2, 1/3, 2/3, 1/4, 3/4.
        assert_eq!(scan.points, 7);
        assert_eq!((scan.min_value, scan.argmin), (Rat::ratio(1, 4), vec![Rat::ratio(1, 2)]));
    }
}
