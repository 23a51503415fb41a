//! Stochastic matrices: classification, exact Perron vectors, the rank-one
//! `J_v` calculus, the involution conjugacy and the uniform shift, the
//! same-size sufficient conditions, and stochasticization.

use std::fmt;

use crate::error::{Error, Result};
use crate::exactmat::{is_irreducible, is_primitive, Rat, RatMatrix};

/// A positive rational row vector whose entries sum to exactly 1.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct ProbVector(Vec<Rat>);

impl ProbVector {
    pub fn new(entries: Vec<Rat>) -> Result<ProbVector> {
        if entries.is_empty() {
            return Err(Error::dim("probability vector must be nonempty"));
        }
        if let Some(k) = entries.iter().position(|x| !x.is_positive()) {
            return Err(Error::domain(format!("entry {k} = {} is not positive", entries[k])));
        }
        let total: Rat = entries.iter().sum();
        if !total.is_one() {
            return Err(Error::domain(format!("entries sum to {total}, not 1")));
        }
        Ok(ProbVector(entries))
    }

    /// `(1/n, ..., 1/n)`.
    pub fn uniform(n: usize) -> ProbVector {
        assert!(n > 0, "uniform vector of length 0");
        ProbVector(vec![Rat::ratio(1, n as i64); n])
    }

    pub fn entries(&self) -> &[Rat] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn into_vec(self) -> Vec<Rat> {
        self.0
    }
}

impl fmt::Display for ProbVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (k, x) in self.0.iter().enumerate() {
            if k > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{x}")?;
        }
        write!(f, ")")
    }
}

impl fmt::Debug for ProbVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ProbVector{self}")
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StochasticProfile {
    pub nonnegative: bool,
    pub positive: bool,
    pub stochastic: bool,
    pub doubly_stochastic: bool,
    /// `None` unless the matrix is square and nonnegative.
    pub irreducible: Option<bool>,
    pub primitive: Option<bool>,
    pub row_sums: Vec<Rat>,
    pub col_sums: Vec<Rat>,
}

impl StochasticProfile {
    /// One-line description such as `positive doubly stochastic primitive`
    /// or `positive stochastic; not doubly stochastic; primitive`.
    pub fn summary(&self) -> String {
        let mut head = vec![if self.positive {
            "positive"
        } else if self.nonnegative {
            "nonnegative"
        } else {
            "signed"
        }];
        head.push(if self.doubly_stochastic {
            "doubly stochastic"
        } else if self.stochastic {
            "stochastic"
        } else {
            "non-stochastic"
        });
        let mut out = head.join(" ");
        let not_doubly = self.stochastic && !self.doubly_stochastic;
        if not_doubly {
            out.push_str("; not doubly stochastic");
        }
        match (self.irreducible, self.primitive) {
            (Some(false), _) => out.push_str("; reducible"),
            (Some(true), Some(false)) => out.push_str("; irreducible, imprimitive"),
            (_, Some(true)) if not_doubly => out.push_str("; primitive"),
            (_, Some(true)) => out.push_str(" primitive"),
            _ => {}
        }
        out
    }
}

pub fn classify(a: &RatMatrix) -> StochasticProfile {
    let nonnegative = a.is_nonnegative();
    let row_sums = a.row_sums();
    let col_sums = a.col_sums();
    let stochastic = a.is_square() && nonnegative && row_sums.iter().all(Rat::is_one);
    let doubly_stochastic = stochastic && col_sums.iter().all(Rat::is_one);
    let (irreducible, primitive) = if a.is_square() && nonnegative {
        (is_irreducible(a).ok(), is_primitive(a).ok())
    } else {
        (None, None)
    };
    StochasticProfile {
        nonnegative,
        positive: a.is_positive(),
        stochastic,
        doubly_stochastic,
        irreducible,
        primitive,
        row_sums,
        col_sums,
    }
}

fn require_stochastic(p: &RatMatrix) -> Result<()> {
    if !p.is_square() {
        return Err(Error::dim(format!("{}x{} matrix is not square", p.rows(), p.cols())));
    }
    if let Some((i, j)) = p.first_negative() {
        return Err(Error::domain(format!("entry ({i}, {j}) = {} is negative", p.get(i, j))));
    }
    if let Some((i, s)) = p.row_sums().into_iter().enumerate().find(|(_, s)| !s.is_one()) {
        return Err(Error::domain(format!("row {i} sums to {s}, not 1")));
    }
    Ok(())
}

pub(crate) fn require_positive_stochastic(p: &RatMatrix) -> Result<()> {
    require_stochastic(p)?;
    if let Some((i, j)) = p.first_nonpositive() {
        return Err(Error::domain(format!("entry ({i}, {j}) is zero; a positive matrix is required")));
    }
    Ok(())
}

/// The unique `l` with `lP = l`, for `P` stochastic and irreducible. Solves
/// `(P^T - I) l^T = 0` with the last equation replaced by `sum l_k = 1`.
pub fn left_perron(p: &RatMatrix) -> Result<ProbVector> {
    require_stochastic(p)?;
    if !is_irreducible(p)? {
        return Err(Error::Ambiguity(
            "matrix is reducible, so the left Perron vector is not unique".into(),
        ));
    }
    let n = p.rows();
    let system = RatMatrix::from_fn(n, n, |i, j| {
        if i == n - 1 {
            Rat::one()
        } else if i == j {
            p.get(j, i) - Rat::one()
        } else {
            p.get(j, i).clone()
        }
    });
    let mut rhs = vec![Rat::zero(); n];
    rhs[n - 1] = Rat::one();
    let l = system
        .solve(&rhs)
        .expect("irreducible stochastic matrix has a one-dimensional left fixed space");
    ProbVector::new(l)
}

/// `J_v`: the square matrix with every row equal to `v`.
pub fn rank_one(v: &ProbVector) -> RatMatrix {
    let n = v.len();
    RatMatrix::from_fn(n, n, |_, j| v.entries()[j].clone())
}

/// `X = I - J_l - J_v` (with `l` the left Perron vector of `P`) and
/// `Q = X P X = P + J_v (I - P)`. Both `X^2 = I` and the conjugation
/// identity are checked before returning.
pub fn involution_conjugate(p: &RatMatrix, v: &ProbVector) -> Result<(RatMatrix, RatMatrix)> {
    require_positive_stochastic(p)?;
    let n = p.rows();
    if v.len() != n {
        return Err(Error::dim(format!("vector of length {} for a {n}x{n} matrix", v.len())));
    }
    let l = left_perron(p)?;
    let id = RatMatrix::identity(n);
    let jv = rank_one(v);
    let x = &(&id - &rank_one(&l)) - &jv;
    if &x * &x != id {
        return Err(Error::Certificate("X * X != I".into()));
    }
    let q = p + &(&jv * &(&id - p));
    if &(&x * p) * &x != q {
        return Err(Error::Certificate("X P X != P + J_v (I - P)".into()));
    }
    Ok((x, q))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DsShift {
    /// `P + J_n (I - P)`, doubly stochastic in its row and column sums.
    pub matrix: RatMatrix,
    /// Whether the shifted matrix is entrywise positive.
    pub positive: bool,
}

/// `Q = P + J_n (I - P)` with `J_n` the uniform rank-one matrix. Entry-wise
/// `q_ij = p_ij + (1 - c_j) / n` where `c_j` is the `j`-th column sum.
pub fn ds_shift(p: &RatMatrix) -> Result<DsShift> {
    require_positive_stochastic(p)?;
    let n = p.rows();
    let inv_n = Rat::ratio(1, n as i64);
    let shift: Vec<Rat> = p.col_sums().iter().map(|c| &(Rat::one() - c) * &inv_n).collect();
    let matrix = RatMatrix::from_fn(n, n, |i, j| p.get(i, j) + &shift[j]);
    let positive = matrix.is_positive();
    Ok(DsShift { matrix, positive })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Condition {
    pub holds: bool,
    /// The first failing inequality instance, when `holds` is false.
    pub violation: Option<String>,
}

impl Condition {
    fn check(failure: Option<String>) -> Condition {
        Condition { holds: failure.is_none(), violation: failure }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConditionReport {
    /// `sum_i p_ij < 1 + n min_i p_ij` for every column `j`; equivalent to
    /// positivity of [`ds_shift`].
    pub remark_col_condition: Condition,
    /// `max_i p_ij - min_i p_ij < 1/(n-1)` for every column `j`.
    pub cor_spread_per_column: Condition,
    /// `max p_ij - min p_ij < 1/n` over all entries.
    pub cor_global_spread: Condition,
    /// `min p_ij > 1/n - 1/n^2`.
    pub cor_min_entry: Condition,
    /// `sum_k (l_i/l_k) p_ik < 1 + n (l_i/l_j) p_ij` for all `i, j`.
    pub weighted_transpose: Condition,
    pub same_size_available: bool,
}

impl ConditionReport {
    pub fn conditions(&self) -> [(&'static str, &Condition); 5] {
        [
            ("remark_col_condition", &self.remark_col_condition),
            ("cor_spread_per_column", &self.cor_spread_per_column),
            ("cor_global_spread", &self.cor_global_spread),
            ("cor_min_entry", &self.cor_min_entry),
            ("weighted_transpose", &self.weighted_transpose),
        ]
    }
}

/// Evaluates every same-size sufficient condition exactly; nothing is
/// short-circuited. For `n = 1` all conditions hold vacuously.
pub fn same_size_conditions(p: &RatMatrix) -> Result<ConditionReport> {
    require_positive_stochastic(p)?;
    let n = p.rows();
    let nr = Rat::from(n);
    let one = Rat::one();
    let col_min: Vec<Rat> = (0..n).map(|j| (0..n).map(|i| p.get(i, j)).min().unwrap().clone()).collect();
    let col_max: Vec<Rat> = (0..n).map(|j| (0..n).map(|i| p.get(i, j)).max().unwrap().clone()).collect();
    let col_sums = p.col_sums();

    let remark = (0..n).find_map(|j| {
        let bound = &one + &(&nr * &col_min[j]);
        (col_sums[j] >= bound).then(|| format!("column {j}: sum {} >= 1 + n * min = {bound}", col_sums[j]))
    });

    let spread = (n >= 2)
        .then(|| {
            let bound = Rat::ratio(1, n as i64 - 1);
            (0..n).find_map(|j| {
                let s = &col_max[j] - &col_min[j];
                (s >= bound).then(|| format!("column {j}: max - min = {s} >= {bound}"))
            })
        })
        .flatten();

    let global_min = col_min.iter().min().unwrap();
    let global_max = col_max.iter().max().unwrap();
    let global = (n >= 2)
        .then(|| {
            let s = global_max - global_min;
            let bound = Rat::ratio(1, n as i64);
            (s >= bound).then(|| format!("max - min = {s} >= {bound}"))
        })
        .flatten();

    let min_entry = (n >= 2)
        .then(|| {
            let bound = Rat::ratio(n as i64 - 1, (n * n) as i64);
            (*global_min <= bound).then(|| format!("min entry {global_min} <= 1/n - 1/n^2 = {bound}"))
        })
        .flatten();

    let l = left_perron(p)?;
    let l = l.entries();
    let weighted = (0..n).find_map(|i| {
        let lhs: Rat = (0..n).map(|k| &(&l[i] / &l[k]) * p.get(i, k)).sum();
        (0..n).find_map(|j| {
            let rhs = &one + &(&nr * &(&(&l[i] / &l[j]) * p.get(i, j)));
            (lhs >= rhs).then(|| format!("(i, j) = ({i}, {j}): {lhs} >= {rhs}"))
        })
    });

    let remark_col_condition = Condition::check(remark);
    let weighted_transpose = Condition::check(weighted);
    let same_size_available = remark_col_condition.holds || weighted_transpose.holds;
    Ok(ConditionReport {
        remark_col_condition,
        cor_spread_per_column: Condition::check(spread),
        cor_global_spread: Condition::check(global),
        cor_min_entry: Condition::check(min_entry),
        weighted_transpose,
        same_size_available,
    })
}

/// A Perron eigenpair `A v = lambda v` with `v > 0`, supplied by the caller.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EigenCertificate {
    pub lambda: Rat,
    pub right_vector: Vec<Rat>,
}

impl EigenCertificate {
    /// `(1, (1, ..., 1))`, the certificate of any stochastic matrix.
    pub fn stochastic(n: usize) -> EigenCertificate {
        EigenCertificate { lambda: Rat::one(), right_vector: vec![Rat::one(); n] }
    }

    pub fn validate(&self, a: &RatMatrix) -> Result<()> {
        if !a.is_square() || a.rows() != self.right_vector.len() {
            return Err(Error::Certificate(format!(
                "vector of length {} for a {}x{} matrix",
                self.right_vector.len(),
                a.rows(),
                a.cols()
            )));
        }
        if !self.lambda.is_positive() {
            return Err(Error::Certificate(format!("lambda = {} is not positive", self.lambda)));
        }
        if let Some(k) = self.right_vector.iter().position(|x| !x.is_positive()) {
            return Err(Error::Certificate(format!("component {k} of the eigenvector is not positive")));
        }
        let av = a.mul_vec(&self.right_vector)?;
        if let Some(k) = (0..av.len()).find(|&k| av[k] != &self.lambda * &self.right_vector[k]) {
            return Err(Error::Certificate(format!(
                "(A v)_{k} = {} but lambda v_{k} = {}",
                av[k],
                &self.lambda * &self.right_vector[k]
            )));
        }
        Ok(())
    }
}

/// `S(A) = (1/lambda) D^-1 A D` with `D = diag(v)`.
pub fn stochasticize(a: &RatMatrix, cert: &EigenCertificate) -> Result<RatMatrix> {
    cert.validate(a)?;
    if !is_irreducible(a)? {
        return Err(Error::domain("stochasticization needs an irreducible matrix"));
    }
    let v = &cert.right_vector;
    let n = a.rows();
    Ok(RatMatrix::from_fn(n, n, |i, j| &(a.get(i, j) * &v[j]) / &(&cert.lambda * &v[i])))
}

/// Whether `(1 - t) P + t Q` is positive for every `t` in `[0, 1]`. The
/// entries are affine in `t`, so the endpoints decide.
pub fn segment_positivity(p: &RatMatrix, q: &RatMatrix) -> Result<bool> {
    if p.shape() != q.shape() {
        return Err(Error::dim(format!(
            "segment between {}x{} and {}x{} matrices",
            p.rows(),
            p.cols(),
            q.rows(),
            q.cols()
        )));
    }
    Ok(p.is_positive() && q.is_positive())
}
