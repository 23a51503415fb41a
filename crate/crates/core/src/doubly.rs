//! From a positive stochastic matrix to a positive doubly stochastic one:
//! optional re-denomination of the Perron vector, then iterated column
//! splitting, with the full chain of elementary equivalences.

use std::sync::Arc;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, ToPrimitive};

use crate::error::{Error, Result};
use crate::exactmat::{Rat, RatMatrix};
use crate::sse::{column_split_shared, verify_chain, EsseStep, SseChain};
use crate::stochastic::{
    ds_shift, involution_conjugate, left_perron, require_positive_stochastic, segment_positivity, ProbVector,
};

/// Default bound on the dimension `M` of the doubly stochastic target.
pub const DEFAULT_SIZE_CAP: usize = 512;

/// `l = (m_1, ..., m_n) / M` with `M` the lcm of the denominators of `l`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PerronWeights {
    pub weights: Vec<BigUint>,
    pub total: BigUint,
}

impl PerronWeights {
    /// The weights as machine integers, if `M` fits under `cap`.
    fn small(&self, cap: usize) -> Result<Vec<usize>> {
        match self.total.to_usize() {
            Some(m) if m <= cap => Ok(self.weights.iter().map(|w| w.to_usize().expect("w <= M")).collect()),
            _ => Err(Error::SizeCap { required: self.total.clone(), cap }),
        }
    }
}

pub fn perron_weights(l: &ProbVector) -> PerronWeights {
    let total = l
        .entries()
        .iter()
        .map(|x| x.denom().magnitude().clone())
        .fold(BigUint::one(), |acc, d| acc.lcm(&d));
    let weights = l
        .entries()
        .iter()
        .map(|x| {
            let d = x.denom().magnitude().clone();
            x.numer().magnitude() * (&total / d)
        })
        .collect();
    PerronWeights { weights, total }
}

/// The matrix with diagonal `l_j / r_j` and last column `1 - l_j / r_j`
/// (last row `e_n`), and its inverse with `r_j / l_j` and `1 - r_j / l_j`.
fn redenomination_pair(l: &[Rat], r: &[Rat]) -> (RatMatrix, RatMatrix) {
    let n = l.len();
    let build = |ratio: &dyn Fn(usize) -> Rat| {
        RatMatrix::from_fn(n, n, |i, j| {
            if i == n - 1 {
                if j == n - 1 { Rat::one() } else { Rat::zero() }
            } else if j == i {
                ratio(i)
            } else if j == n - 1 {
                Rat::one() - ratio(i)
            } else {
                Rat::zero()
            }
        })
    };
    let m = build(&|i| &l[i] / &r[i]);
    let m_inv = build(&|i| &r[i] / &l[i]);
    (m, m_inv)
}

/// Moves the left Perron vector of `P` to `(r_1, ..., r_{n-1}, 1 - sum r)`
/// by the similarity `P_N = M P M^-1`. Returns the step `(P, P_N, M^-1, M P)`
/// and `P_N`.
pub fn redenominate(p: &RatMatrix, r: &[Rat]) -> Result<(EsseStep, RatMatrix)> {
    require_positive_stochastic(p)?;
    let n = p.rows();
    if r.len() + 1 != n {
        return Err(Error::dim(format!("{} targets for a {n}x{n} matrix; need {}", r.len(), n - 1)));
    }
    let l = left_perron(p)?;
    let l = l.entries();
    for (j, (rj, lj)) in r.iter().zip(l).enumerate() {
        if !rj.is_positive() {
            return Err(Error::domain(format!("r_{j} = {rj} is not positive")));
        }
        if rj > lj {
            return Err(Error::domain(format!("r_{j} = {rj} exceeds l_{j} = {lj}")));
        }
    }
    let sum: Rat = r.iter().sum();
    if sum >= Rat::one() {
        return Err(Error::domain(format!("targets sum to {sum}, need < 1")));
    }
    let (m, m_inv) = redenomination_pair(l, r);
    if &m * &m_inv != RatMatrix::identity(n) {
        return Err(Error::Certificate("M(r) M(r)^-1 != I".into()));
    }
    let mp = &m * p;
    if let Some((i, j)) = mp.first_nonpositive() {
        return Err(Error::Positivity(format!(
            "M(r) P has entry ({i}, {j}) = {}; choose r closer to l",
            mp.get(i, j)
        )));
    }
    let pn = &mp * &m_inv;
    let step = EsseStep::new(p.clone(), pn.clone(), m_inv, mp);
    Ok((step, pn))
}

fn lcm_of_denominators(v: &[Rat]) -> BigUint {
    v.iter().fold(BigUint::one(), |acc, x| acc.lcm(x.denom().magnitude()))
}

/// Scans `q = max_den, max_den - 1, ..., 2` and returns the first
/// `r_j = floor(l_j q) / q` that [`redenominate`] accepts and that lowers the
/// lcm `M` of the Perron denominators.
pub fn suggest_redenomination(p: &RatMatrix, max_den: u64) -> Option<Vec<Rat>> {
    require_positive_stochastic(p).ok()?;
    let l = left_perron(p).ok()?;
    let l = l.entries();
    let n = l.len();
    if n < 2 {
        return None;
    }
    let current = lcm_of_denominators(l);
    for q in (2..=max_den).rev() {
        let qr = Rat::from(q);
        let r: Vec<Rat> = l[..n - 1]
            .iter()
            .map(|x| Rat::from((x * &qr).floor()) / &qr)
            .collect();
        if r.iter().any(|x| !x.is_positive()) {
            continue;
        }
        let rest = Rat::one() - r.iter().sum::<Rat>();
        if !rest.is_positive() {
            continue;
        }
        let mut target = r.clone();
        target.push(rest);
        if lcm_of_denominators(&target) >= current {
            continue;
        }
        let (m, _) = redenomination_pair(l, &r);
        if (&m * p).is_positive() {
            return Some(r);
        }
    }
    None
}

/// Splits `start` until every Perron weight is 1, appending to `chain`.
fn split_into(chain: &mut SseChain, start: Arc<RatMatrix>, mut weights: Vec<usize>) -> Result<Arc<RatMatrix>> {
    let mut current = start;
    let mut from = 0;
    while let Some(idx) = (from..weights.len()).find(|&k| weights[k] > 1) {
        let m = weights[idx];
        let theta = Rat::ratio(1, m as i64);
        let step = column_split_shared(current, idx, &theta)?;
        current = step.b.clone();
        weights[idx] = 1;
        weights.insert(idx + 1, m - 1);
        chain.push(step);
        // Everything left of the split column already has weight 1.
        from = idx + 1;
    }
    Ok(current)
}

/// Repeatedly splits the leftmost column whose Perron weight `m` exceeds 1
/// with `theta = 1/m`. Takes exactly `M - n` steps and ends at an `M x M`
/// positive doubly stochastic matrix. The steps are built directly and not
/// re-multiplied here; [`verify_chain`] checks them.
pub fn split_to_doubly(p: &RatMatrix, size_cap: usize) -> Result<(SseChain, RatMatrix)> {
    require_positive_stochastic(p)?;
    let weights = perron_weights(&left_perron(p)?).small(size_cap)?;
    let start = Arc::new(p.clone());
    let mut chain = SseChain { start: start.clone(), steps: Vec::new() };
    let end = split_into(&mut chain, start, weights)?;
    Ok((chain, (*end).clone()))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum RoutePolicy {
    /// Same-size route when the uniform shift is positive, else splitting.
    #[default]
    PreferSameSize,
    /// Same-size route or [`Error::SameSizeUnavailable`].
    SameSizeOnly,
    SplitOnly,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Options {
    pub route: RoutePolicy,
    /// Largest denominator tried by [`suggest_redenomination`]; `None`
    /// skips re-denomination.
    pub max_den: Option<u64>,
    pub size_cap: usize,
}

impl Default for Options {
    fn default() -> Options {
        Options { route: RoutePolicy::default(), max_den: None, size_cap: DEFAULT_SIZE_CAP }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Route {
    SameSizePath,
    Splitting,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PipelineReport {
    pub input: RatMatrix,
    pub route: Route,
    /// Empty (lag 0 at the input) on the same-size route.
    pub chain: SseChain,
    pub output: RatMatrix,
    /// The involution `X` with `X P X = output`, on the same-size route.
    pub similarity_witness: Option<RatMatrix>,
    /// Dimension of the output: `M` on the splitting route.
    pub target_size: usize,
    pub notes: Vec<String>,
}

pub const SAME_SIZE_NOTE: &str = "same-size route: the output is similar to the input through the involution X, \
and (1 - t) P + t Q is positive for all t in [0, 1]; an explicit chain through matrices of the same size exists \
by the Kim-Roush path theorem but is not constructed here";

/// Runs the pipeline under `options` and verifies whatever it emits.
pub fn make_doubly(p: &RatMatrix, options: &Options) -> Result<PipelineReport> {
    require_positive_stochastic(p)?;
    let n = p.rows();
    let mut notes = Vec::new();

    if options.route != RoutePolicy::SplitOnly {
        let shift = ds_shift(p)?;
        if shift.positive {
            let (x, q) = involution_conjugate(p, &ProbVector::uniform(n))?;
            debug_assert_eq!(q, shift.matrix);
            if !segment_positivity(p, &q)? {
                return Err(Error::Certificate("path (1 - t) P + t Q leaves the positive matrices".into()));
            }
            notes.push(SAME_SIZE_NOTE.to_string());
            return Ok(PipelineReport {
                input: p.clone(),
                route: Route::SameSizePath,
                chain: SseChain::trivial(p.clone()),
                output: q,
                similarity_witness: Some(x),
                target_size: n,
                notes,
            });
        }
        if options.route == RoutePolicy::SameSizeOnly {
            let (i, j) = shift.matrix.first_nonpositive().expect("not positive");
            return Err(Error::SameSizeUnavailable(format!(
                "P + J_n (I - P) has entry ({i}, {j}) = {}, so the column condition sum_k p_kj < 1 + n p_ij fails",
                shift.matrix.get(i, j)
            )));
        }
        notes.push("uniform shift P + J_n (I - P) is not positive; using column splitting".to_string());
    }

    let mut chain = SseChain::trivial(p.clone());
    let mut split_start = chain.start.clone();
    if let Some(max_den) = options.max_den {
        if let Some(r) = suggest_redenomination(p, max_den) {
            let before = perron_weights(&left_perron(p)?).total;
            let (mut step, _) = redenominate(p, &r)?;
            step.a = chain.start.clone();
            split_start = step.b.clone();
            chain.push(step);
            let after = perron_weights(&left_perron(&split_start)?).total;
            notes.push(format!("re-denominated the Perron vector: M drops from {before} to {after}"));
        }
    }
    let weights = perron_weights(&left_perron(&split_start)?).small(options.size_cap)?;
    let end = split_into(&mut chain, split_start, weights)?;

    let verdict = verify_chain(&chain);
    if !verdict.passed() {
        return Err(Error::InvalidChain(Box::new(verdict)));
    }
    let output = (*end).clone();
    if !output.is_positive() || !output.col_sums().iter().all(Rat::is_one) {
        return Err(Error::Certificate("split output is not positive doubly stochastic".into()));
    }
    Ok(PipelineReport {
        input: p.clone(),
        route: Route::Splitting,
        target_size: output.rows(),
        chain,
        output,
        similarity_witness: None,
        notes,
    })
}
