//! Elementary strong shift equivalences, chains of them, their verification,
//! composition into shift equivalences, transposition, column splitting, and
//! the stochastic normalizations of an ESSE.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::exactmat::{charpoly, Rat, RatMatrix, RatPoly};
use crate::stochastic::{classify, EigenCertificate, stochasticize};

/// One elementary strong shift equivalence: `A = U V`, `B = V U` with
/// `U, V >= 0`. The endpoints are reference counted so that consecutive
/// steps of a chain can share them.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct EsseStep {
    pub a: Arc<RatMatrix>,
    pub b: Arc<RatMatrix>,
    pub u: RatMatrix,
    pub v: RatMatrix,
}

impl EsseStep {
    pub fn new(a: RatMatrix, b: RatMatrix, u: RatMatrix, v: RatMatrix) -> EsseStep {
        EsseStep { a: Arc::new(a), b: Arc::new(b), u, v }
    }
}

/// A composable list of steps starting at `start`. A chain with no steps is
/// a bare matrix of lag 0.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct SseChain {
    pub start: Arc<RatMatrix>,
    pub steps: Vec<EsseStep>,
}

impl SseChain {
    pub fn trivial(a: RatMatrix) -> SseChain {
        SseChain { start: Arc::new(a), steps: Vec::new() }
    }

    /// Chain starting at the first step's `A`; `None` if `steps` is empty.
    pub fn from_steps(steps: Vec<EsseStep>) -> Option<SseChain> {
        let start = steps.first()?.a.clone();
        Some(SseChain { start, steps })
    }

    /// Appends a step, reusing the current end matrix as its `A` when the
    /// two are equal.
    pub fn push(&mut self, mut step: EsseStep) {
        let end = self.end_arc();
        if !Arc::ptr_eq(&end, &step.a) && *end == *step.a {
            step.a = end;
        }
        self.steps.push(step);
    }

    pub fn start(&self) -> &RatMatrix {
        &self.start
    }

    pub fn end(&self) -> &RatMatrix {
        self.steps.last().map_or(&self.start, |s| &s.b)
    }

    fn end_arc(&self) -> Arc<RatMatrix> {
        self.steps.last().map_or_else(|| self.start.clone(), |s| s.b.clone())
    }

    pub fn lag(&self) -> usize {
        self.steps.len()
    }

    /// Largest dimension among all matrices `A_i` of the chain.
    pub fn size(&self) -> usize {
        self.steps
            .iter()
            .map(|s| s.a.rows().max(s.b.rows()))
            .fold(self.start.rows(), usize::max)
    }

    /// The matrices `A_0, A_1, ..., A_lag`, taken from each step's `A` and
    /// the last step's `B`.
    pub fn nodes(&self) -> Vec<&RatMatrix> {
        let mut out = vec![&*self.start];
        out.extend(self.steps.iter().map(|s| &*s.b));
        out
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    /// Dimensions of `A, B, U, V` do not fit together.
    Shape { detail: String },
    Negative { matrix: char, row: usize, col: usize, value: Rat },
    /// `lhs = rhs` fails at `(row, col)`, e.g. `A = UV`.
    Product { equation: &'static str, row: usize, col: usize, expected: Rat, actual: Rat },
    /// The `B` of step `step` differs from the `A` of the next step (or the
    /// chain start differs from the first `A` when `step` is `None`).
    Endpoint { step: Option<usize>, detail: String },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::Shape { detail } => write!(f, "shape: {detail}"),
            Violation::Negative { matrix, row, col, value } => {
                write!(f, "negativity: {matrix}[{row}][{col}] = {value}")
            }
            Violation::Product { equation, row, col, expected, actual } => write!(
                f,
                "product mismatch {equation} at ({row}, {col}): expected {expected}, product gives {actual}"
            ),
            Violation::Endpoint { step: None, detail } => write!(f, "endpoint mismatch at chain start: {detail}"),
            Violation::Endpoint { step: Some(i), detail } => {
                write!(f, "endpoint mismatch between steps {} and {}: {detail}", i + 1, i + 2)
            }
        }
    }
}

/// Status of the padded identity `t^n p_A(t) = t^m p_B(t)` for one step.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SpectrumStatus {
    Holds,
    Fails,
    /// Not evaluated because the product checks already failed.
    Skipped,
}

impl fmt::Display for SpectrumStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SpectrumStatus::Holds => "holds",
            SpectrumStatus::Fails => "FAILS",
            SpectrumStatus::Skipped => "skipped",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StepVerdict {
    pub violations: Vec<Violation>,
    pub spectrum: SpectrumStatus,
}

impl StepVerdict {
    pub fn passed(&self) -> bool {
        self.violations.is_empty() && self.spectrum != SpectrumStatus::Fails
    }
}

fn push_products(out: &mut Vec<Violation>, equation: &'static str, expected: &RatMatrix, actual: &RatMatrix) {
    for (row, col) in expected.differences(actual) {
        out.push(Violation::Product {
            equation,
            row,
            col,
            expected: expected.get(row, col).clone(),
            actual: actual.get(row, col).clone(),
        });
    }
}

fn shape_violation(step: &EsseStep) -> Option<Violation> {
    let (a, b, u, v) = (&*step.a, &*step.b, &step.u, &step.v);
    let (m, n) = (a.rows(), b.rows());
    if a.is_square() && b.is_square() && u.shape() == (m, n) && v.shape() == (n, m) {
        return None;
    }
    Some(Violation::Shape {
        detail: format!(
            "A {}x{}, B {}x{}, U {}x{}, V {}x{}; need A m x m, B n x n, U m x n, V n x m",
            a.rows(),
            a.cols(),
            b.rows(),
            b.cols(),
            u.rows(),
            u.cols(),
            v.rows(),
            v.cols()
        ),
    })
}

/// Shape, sign and product checks of one step; the spectrum is not examined.
fn check_products(step: &EsseStep) -> Vec<Violation> {
    let mut out = Vec::new();
    if let Some(shape) = shape_violation(step) {
        out.push(shape);
        return out;
    }
    let (a, b, u, v) = (&*step.a, &*step.b, &step.u, &step.v);
    for (name, w) in [('U', u), ('V', v)] {
        for row in 0..w.rows() {
            for col in 0..w.cols() {
                if w.get(row, col).is_negative() {
                    out.push(Violation::Negative { matrix: name, row, col, value: w.get(row, col).clone() });
                }
            }
        }
    }
    push_products(&mut out, "A = UV", a, &(u * v));
    push_products(&mut out, "B = VU", b, &(v * u));
    out
}

fn padded_identity(pa: &RatPoly, m: usize, pb: &RatPoly, n: usize) -> SpectrumStatus {
    if pa.shift(n) == pb.shift(m) {
        SpectrumStatus::Holds
    } else {
        SpectrumStatus::Fails
    }
}

/// Checks `U, V >= 0`, `A = UV`, `B = VU` and, when those hold, the padded
/// characteristic polynomial identity.
pub fn verify_esse(step: &EsseStep) -> StepVerdict {
    let violations = check_products(step);
    let spectrum = if violations.is_empty() {
        let pa = charpoly(&step.a).expect("square");
        let pb = charpoly(&step.b).expect("square");
        padded_identity(&pa, step.a.rows(), &pb, step.b.rows())
    } else {
        SpectrumStatus::Skipped
    };
    StepVerdict { violations, spectrum }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChainVerdict {
    pub steps: Vec<StepVerdict>,
    pub endpoints: Vec<Violation>,
    pub lag: usize,
    pub size: usize,
}

impl ChainVerdict {
    pub fn passed(&self) -> bool {
        self.endpoints.is_empty() && self.steps.iter().all(StepVerdict::passed)
    }

    /// Every violation with its 1-based step number (`None` for endpoint
    /// problems).
    pub fn failures(&self) -> Vec<(Option<usize>, &Violation)> {
        let mut out: Vec<_> = self.endpoints.iter().map(|v| (None, v)).collect();
        for (i, s) in self.steps.iter().enumerate() {
            out.extend(s.violations.iter().map(|v| (Some(i + 1), v)));
        }
        out
    }
}

impl fmt::Display for ChainVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} (lag {}, size {})",
            if self.passed() { "chain verifies" } else { "chain fails" },
            self.lag,
            self.size
        )?;
        for v in &self.endpoints {
            write!(f, "; {v}")?;
        }
        for (i, s) in self.steps.iter().enumerate() {
            for v in &s.violations {
                write!(f, "; step {}: {v}", i + 1)?;
            }
            if s.spectrum == SpectrumStatus::Fails {
                write!(f, "; step {}: padded characteristic polynomial identity fails", i + 1)?;
            }
        }
        Ok(())
    }
}

fn endpoint_detail(left: &RatMatrix, right: &RatMatrix) -> String {
    if left.shape() != right.shape() {
        return format!("{}x{} vs {}x{}", left.rows(), left.cols(), right.rows(), right.cols());
    }
    let (i, j) = left.first_difference(right).expect("matrices differ");
    format!("entry ({i}, {j}): {} vs {}", left.get(i, j), right.get(i, j))
}

/// Mismatches between the start and the first `A`, and between each `B`
/// and the next `A`.
fn link_violations(chain: &SseChain) -> Vec<Violation> {
    let mut endpoints = Vec::new();
    if let Some(first) = chain.steps.first() {
        if !Arc::ptr_eq(&chain.start, &first.a) && *chain.start != *first.a {
            endpoints.push(Violation::Endpoint { step: None, detail: endpoint_detail(&chain.start, &first.a) });
        }
    }
    for (i, pair) in chain.steps.windows(2).enumerate() {
        if !Arc::ptr_eq(&pair[0].b, &pair[1].a) && *pair[0].b != *pair[1].a {
            endpoints.push(Violation::Endpoint { step: Some(i), detail: endpoint_detail(&pair[0].b, &pair[1].a) });
        }
    }
    endpoints
}

/// Verifies every step, the chaining of endpoints, and the padded spectrum
/// identity per step. Each distinct node's characteristic polynomial is
/// computed once.
pub fn verify_chain(chain: &SseChain) -> ChainVerdict {
    let endpoints = link_violations(chain);
    let mut steps = Vec::with_capacity(chain.steps.len());
    // Characteristic polynomial of the previous step's B, reusable when it
    // is the same matrix as this step's A.
    let mut carried: Option<(Arc<RatMatrix>, RatPoly)> = None;
    for step in &chain.steps {
        let violations = check_products(step);
        let spectrum = if violations.is_empty() {
            let pa = match carried.take() {
                Some((m, p)) if Arc::ptr_eq(&m, &step.a) || *m == *step.a => p,
                _ => charpoly(&step.a).expect("square"),
            };
            let pb = charpoly(&step.b).expect("square");
            let status = padded_identity(&pa, step.a.rows(), &pb, step.b.rows());
            carried = Some((step.b.clone(), pb));
            status
        } else {
            carried = None;
            SpectrumStatus::Skipped
        };
        steps.push(StepVerdict { violations, spectrum });
    }
    ChainVerdict { steps, endpoints, lag: chain.lag(), size: chain.size() }
}

/// A lag `l` shift equivalence: `A^l = UV`, `B^l = VU`, `AU = UB`,
/// `VA = BV` with `U, V >= 0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SeCertificate {
    pub a: RatMatrix,
    pub b: RatMatrix,
    pub u: RatMatrix,
    pub v: RatMatrix,
    pub lag: usize,
}

impl SeCertificate {
    /// Checks all four equalities and the signs of `U` and `V`.
    pub fn verify(&self) -> Result<()> {
        let fail = |what: &str| Err(Error::Certificate(format!("shift equivalence fails: {what}")));
        let (m, n) = (self.a.rows(), self.b.rows());
        if !self.a.is_square() || !self.b.is_square() || self.u.shape() != (m, n) || self.v.shape() != (n, m) {
            return fail("shapes");
        }
        if !self.u.is_nonnegative() || !self.v.is_nonnegative() {
            return fail("U or V has a negative entry");
        }
        let l = self.lag as u64;
        // Products ending in U run over a common denominator; the others
        // have few distinct rows and are cheaper entrywise.
        let scaled = |x: &RatMatrix, y: &RatMatrix| RatMatrix::product(&[x, y]);
        if self.a.pow(l)? != &self.u * &self.v {
            return fail("A^lag != UV");
        }
        if self.b.pow(l)? != &self.v * &self.u {
            return fail("B^lag != VU");
        }
        if scaled(&self.a, &self.u)? != scaled(&self.u, &self.b)? {
            return fail("AU != UB");
        }
        if &self.v * &self.a != &self.b * &self.v {
            return fail("VA != BV");
        }
        Ok(())
    }
}

/// `(U_1 U_2 ... U_l, V_l ... V_2 V_1)`. Only links and shapes of the chain
/// are checked up front; the composed certificate is verified before it is
/// returned, so a chain with bad products surfaces as a certificate error.
/// A lag-0 chain gives the identity certificate of its start matrix.
pub fn compose_to_se(chain: &SseChain) -> Result<SeCertificate> {
    let endpoints = link_violations(chain);
    let shapes: Vec<StepVerdict> = chain
        .steps
        .iter()
        .map(|s| StepVerdict { violations: shape_violation(s).into_iter().collect(), spectrum: SpectrumStatus::Skipped })
        .collect();
    if !endpoints.is_empty() || shapes.iter().any(|s| !s.violations.is_empty()) {
        let verdict = ChainVerdict { steps: shapes, endpoints, lag: chain.lag(), size: chain.size() };
        return Err(Error::InvalidChain(Box::new(verdict)));
    }
    let n = chain.start.rows();
    let (u, v) = if chain.steps.is_empty() {
        (RatMatrix::identity(n), RatMatrix::identity(n))
    } else {
        let us: Vec<&RatMatrix> = chain.steps.iter().map(|s| &s.u).collect();
        let vs: Vec<&RatMatrix> = chain.steps.iter().rev().map(|s| &s.v).collect();
        (RatMatrix::product(&us)?, RatMatrix::product(&vs)?)
    };
    let cert = SeCertificate {
        a: (*chain.start).clone(),
        b: chain.end().clone(),
        u,
        v,
        lag: chain.lag(),
    };
    cert.verify()?;
    Ok(cert)
}

/// The chain from `A_0^T` to `A_l^T` with steps `(A^T, B^T, V^T, U^T)`.
pub fn transpose_chain(chain: &SseChain) -> Result<SseChain> {
    let verdict = verify_chain(chain);
    if !verdict.passed() {
        return Err(Error::InvalidChain(Box::new(verdict)));
    }
    let start = Arc::new(chain.start.transpose());
    let mut prev: (Arc<RatMatrix>, Arc<RatMatrix>) = (chain.start.clone(), start.clone());
    let mut steps = Vec::with_capacity(chain.steps.len());
    for s in &chain.steps {
        let a = if Arc::ptr_eq(&prev.0, &s.a) { prev.1.clone() } else { Arc::new(s.a.transpose()) };
        let b = Arc::new(s.b.transpose());
        steps.push(EsseStep { a, b: b.clone(), u: s.v.transpose(), v: s.u.transpose() });
        prev = (s.b.clone(), b);
    }
    Ok(SseChain { start, steps })
}

/// Splits column `j` (0-based) of the square nonnegative `A` into columns
/// `j` and `j + 1` carrying `theta` and `1 - theta` of it, and duplicates
/// row `j` of the identity below itself. Returns the verified step
/// `(A, C, X, V)` with `C = V X` of size `n + 1`; rows `j` and `j + 1` of `C`
/// coincide.
pub fn column_split(a: &RatMatrix, j: usize, theta: &Rat) -> Result<EsseStep> {
    let step = column_split_shared(Arc::new(a.clone()), j, theta)?;
    if let Some(p) = check_products(&step).first() {
        return Err(Error::Certificate(format!("column split does not verify: {p}")));
    }
    Ok(step)
}

/// [`column_split`] without the product checks, for callers that verify
/// the whole chain afterwards.
pub(crate) fn column_split_shared(a: Arc<RatMatrix>, j: usize, theta: &Rat) -> Result<EsseStep> {
    if !a.is_square() {
        return Err(Error::dim(format!("{}x{} matrix is not square", a.rows(), a.cols())));
    }
    if !a.is_nonnegative() {
        return Err(Error::domain("column splitting needs a nonnegative matrix"));
    }
    if !theta.is_positive() || *theta >= Rat::one() {
        return Err(Error::domain(format!("theta = {theta} is not in (0, 1)")));
    }
    let n = a.rows();
    if j >= n {
        return Err(Error::Index(format!("column {j} out of range for a {n}x{n} matrix")));
    }
    let rest = Rat::one() - theta;
    let mut x = Vec::with_capacity(n * (n + 1));
    for r in 0..n {
        let row = a.row(r);
        x.extend_from_slice(&row[..j]);
        x.push(&row[j] * theta);
        x.push(&row[j] * &rest);
        x.extend_from_slice(&row[j + 1..]);
    }
    let mut v = vec![Rat::zero(); (n + 1) * n];
    for r in 0..=n {
        v[r * n + if r <= j { r } else { r - 1 }] = Rat::one();
    }
    // V X is X with row j repeated below itself.
    let w = n + 1;
    let mut c = Vec::with_capacity(w * w);
    c.extend_from_slice(&x[..(j + 1) * w]);
    c.extend_from_slice(&x[j * w..]);
    let x = RatMatrix::new(n, w, x)?;
    let v = RatMatrix::new(w, n, v)?;
    let c = RatMatrix::new(w, w, c)?;
    Ok(EsseStep { a, b: Arc::new(c), u: x, v })
}

/// Conjugates a verified ESSE `(A, B, X, Y)` of irreducible matrices into
/// one between their stochasticizations:
/// `(S(A), S(B), (1/lambda) D^-1 X E, E^-1 Y D)` with `D, E` the diagonal
/// matrices of the two right eigenvectors.
pub fn conjugate_esse_to_stochastic(
    a: &RatMatrix,
    b: &RatMatrix,
    x: &RatMatrix,
    y: &RatMatrix,
    cert_a: &EigenCertificate,
    cert_b: &EigenCertificate,
) -> Result<EsseStep> {
    let input = EsseStep::new(a.clone(), b.clone(), x.clone(), y.clone());
    if let Some(p) = check_products(&input).first() {
        return Err(Error::Certificate(format!("input is not an ESSE: {p}")));
    }
    if cert_a.lambda != cert_b.lambda {
        return Err(Error::Certificate(format!(
            "Perron eigenvalues differ: {} vs {}",
            cert_a.lambda, cert_b.lambda
        )));
    }
    let sa = stochasticize(a, cert_a)?;
    let sb = stochasticize(b, cert_b)?;
    let (d, e) = (&cert_a.right_vector, &cert_b.right_vector);
    let lambda = &cert_a.lambda;
    let u = RatMatrix::from_fn(x.rows(), x.cols(), |i, j| &(x.get(i, j) * &e[j]) / &(lambda * &d[i]));
    let v = RatMatrix::from_fn(y.rows(), y.cols(), |i, j| &(y.get(i, j) * &d[j]) / &e[i]);
    let step = EsseStep::new(sa, sb, u, v);
    let verdict = verify_esse(&step);
    if !verdict.passed() {
        return Err(Error::Certificate("conjugated step does not verify".into()));
    }
    Ok(step)
}

/// `R = U / alpha`, `S = V / beta` for an ESSE `(SA, SB, U, V)` of
/// stochastic matrices, where `U j = alpha j` and `V j = beta j`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RowNormalization {
    pub r: RatMatrix,
    pub s: RatMatrix,
    pub alpha: Rat,
    pub beta: Rat,
}

fn constant_row_sum(w: &RatMatrix, name: char) -> Result<Rat> {
    let sums = w.row_sums();
    match sums.iter().position(|s| *s != sums[0]) {
        Some(k) => Err(Error::Structural(format!(
            "row sums of {name} are not constant: row 0 sums to {}, row {k} to {}",
            sums[0], sums[k]
        ))),
        None => Ok(sums[0].clone()),
    }
}

pub fn normalize_esse_to_row_stochastic(
    u: &RatMatrix,
    v: &RatMatrix,
    sa: &RatMatrix,
    sb: &RatMatrix,
) -> Result<RowNormalization> {
    let input = EsseStep::new(sa.clone(), sb.clone(), u.clone(), v.clone());
    if let Some(p) = check_products(&input).first() {
        return Err(Error::Certificate(format!("input is not an ESSE: {p}")));
    }
    if !classify(sa).stochastic || !classify(sb).stochastic {
        return Err(Error::domain("both endpoints must be stochastic"));
    }
    let alpha = constant_row_sum(u, 'U')?;
    let beta = constant_row_sum(v, 'V')?;
    let (Some(ia), Some(ib)) = (alpha.recip(), beta.recip()) else {
        return Err(Error::Structural("a row sum of U or V is zero".into()));
    };
    let r = u.scale(&ia);
    let s = v.scale(&ib);
    let ok = (&alpha * &beta).is_one()
        && r.row_sums().iter().chain(&s.row_sums()).all(Rat::is_one)
        && &r * &s == *sa
        && &s * &r == *sb;
    if !ok {
        return Err(Error::Certificate("row normalization does not verify".into()));
    }
    Ok(RowNormalization { r, s, alpha, beta })
}
