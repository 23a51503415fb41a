//! Acceptance suite. Every criterion runs in one sequential test so the
//! spectrum tally (criterion 9) sees every chain built here, and so the
//! runtime budgets are measured without other tests competing for cores.
//! Arithmetic is exact: every tolerance is zero. Runtime budgets are pinned
//! below.

mod common;

use std::fmt::Write as _;
use std::io::Write as _;
use std::time::{Duration, Instant};

use common::{ex43, path_str, sse, stdout, write_matrix};
use num_traits::ToPrimitive;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sse_core::cli::demos::{an_matrix, pt_matrix};
use sse_core::cli::format::{parse_json, to_json, ChainFile, MatrixFile};
use sse_core::doubly::{make_doubly, perron_weights, split_to_doubly, Options, RoutePolicy, DEFAULT_SIZE_CAP};
use sse_core::exactmat::{charpoly, is_irreducible, similar_over_rationals, Rat, RatMatrix, RatPoly};
use sse_core::sse::{
    compose_to_se, normalize_esse_to_row_stochastic, verify_chain, verify_esse, ChainVerdict, EsseStep, SpectrumStatus,
};
use sse_core::stochastic::{ds_shift, involution_conjugate, left_perron, rank_one, same_size_conditions, ProbVector};

const BUDGET_C1: Duration = Duration::from_secs(1);
const BUDGET_C2: Duration = Duration::from_secs(120);
const BUDGET_C3: Duration = Duration::from_secs(30);
const BUDGET_C6: Duration = Duration::from_secs(5);
const BUDGET_C7: Duration = Duration::from_secs(1);

const SAMPLES_C2: usize = 200;
const SAMPLES_C3: usize = 500;
const SAMPLES_C4: usize = 500;
const SAMPLES_C5: usize = 600;
const SAMPLES_C8: usize = 100;
const CORRUPTIONS_C11: usize = 120;

/// Padded-identity statuses over every step verified in this target.
#[derive(Default)]
struct Tally {
    chains: usize,
    steps: usize,
    holds: usize,
    fails: usize,
    skipped: usize,
}

impl Tally {
    fn record(&mut self, verdict: &ChainVerdict) {
        self.chains += 1;
        for s in &verdict.steps {
            self.count(s.spectrum);
        }
    }

    fn count(&mut self, status: SpectrumStatus) {
        self.steps += 1;
        match status {
            SpectrumStatus::Holds => self.holds += 1,
            SpectrumStatus::Fails => self.fails += 1,
            SpectrumStatus::Skipped => self.skipped += 1,
        }
    }
}

struct Report {
    lines: Vec<String>,
    failed: Vec<usize>,
}

impl Report {
    fn line(&mut self, criterion: usize, pass: bool, detail: String) {
        let line = format!("criterion {criterion}: {} {detail}", if pass { "PASS" } else { "FAIL" });
        // Written past the test harness capture so the lines show up in a
        // plain `cargo test` run.
        let _ = writeln!(std::io::stdout().lock(), "{line}");
        self.lines.push(line);
        if !pass {
            self.failed.push(criterion);
        }
    }
}

fn secs(d: Duration) -> String {
    format!("{:.2}s", d.as_secs_f64())
}

fn criterion_1(report: &mut Report, tally: &mut Tally) {
    let dir = tempfile::tempdir().unwrap();
    let p = write_matrix(dir.path(), "p.json", &ex43());
    let out = dir.path().join("chain.json");
    let started = Instant::now();
    let o = sse(&["make-doubly", "--split-only", path_str(&p), "--out", path_str(&out)]);
    let elapsed = started.elapsed();
    let file: ChainFile = parse_json(&std::fs::read_to_string(&out).unwrap()).unwrap();
    let chain = file.to_chain().unwrap();
    let p1 = RatMatrix::from_scaled_ints(&[[7, 7, 4, 2], [7, 7, 4, 2], [2, 2, 14, 2], [2, 2, 4, 12]], 20);
    let p2 = RatMatrix::from_scaled_ints(
        &[[7, 7, 2, 2, 2], [7, 7, 2, 2, 2], [2, 2, 7, 7, 2], [2, 2, 7, 7, 2], [2, 2, 2, 2, 12]],
        20,
    );
    let verdict = verify_chain(&chain);
    tally.record(&verdict);
    let pass = o.status.code() == Some(0)
        && chain.lag() == 2
        && *chain.start() == ex43()
        && *chain.steps[0].b == p1
        && *chain.steps[1].b == p2
        && verdict.passed()
        && elapsed < BUDGET_C1;
    report.line(1, pass, format!("lag {} with P^(1), P^(2) entrywise equal (exact; {} < {})", chain.lag(), secs(elapsed), secs(BUDGET_C1)));
}

/// Positivity over every entry; row sums once per distinct row, since
/// splitting only duplicates rows.
fn positive_stochastic(a: &RatMatrix) -> bool {
    let mut reps: Vec<&[Rat]> = Vec::new();
    for i in 0..a.rows() {
        if !reps.contains(&a.row(i)) {
            reps.push(a.row(i));
        }
    }
    a.is_positive() && reps.into_iter().all(|r| r.iter().sum::<Rat>().is_one())
}

fn criterion_2(report: &mut Report, tally: &mut Tally) {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let started = Instant::now();
    let (mut accepted, mut rejected, mut bad) = (0, 0, Vec::new());
    let mut max_m = 0;
    while accepted < SAMPLES_C2 {
        let p = common::random_positive_stochastic(&mut rng, 5, 30);
        let n = p.rows();
        let m = match perron_weights(&left_perron(&p).unwrap()).total.to_usize() {
            Some(m) if m <= DEFAULT_SIZE_CAP => m,
            _ => {
                rejected += 1;
                continue;
            }
        };
        accepted += 1;
        max_m = max_m.max(m);
        let (chain, d) = split_to_doubly(&p, DEFAULT_SIZE_CAP).unwrap();
        let verdict = verify_chain(&chain);
        tally.record(&verdict);
        let intermediates_ok = chain.nodes().iter().all(|a| positive_stochastic(a));
        let uniform = ProbVector::uniform(m);
        // D is positive, so its fixed probability vector is unique.
        let ok = chain.lag() == m - n
            && intermediates_ok
            && d.is_positive()
            && d.row_sums().iter().chain(&d.col_sums()).all(Rat::is_one)
            && d.left_mul_vec(uniform.entries()).unwrap() == uniform.entries()
            && verdict.passed()
            && compose_to_se(&chain).is_ok_and(|se| se.lag == m - n);
        if !ok {
            bad.push(p.to_string());
        }
    }
    let elapsed = started.elapsed();
    report.line(
        2,
        bad.is_empty() && elapsed < BUDGET_C2,
        format!(
            "{accepted} samples ({rejected} rejected with M > {DEFAULT_SIZE_CAP}, largest M {max_m}), {} failures (exact; {} < {})",
            bad.len(),
            secs(elapsed),
            secs(BUDGET_C2)
        ),
    );
    for p in bad.iter().take(3) {
        let _ = writeln!(std::io::stdout().lock(), "  failing input: {p}");
    }
}

fn criterion_3(report: &mut Report) {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let started = Instant::now();
    let mut failures = 0;
    for _ in 0..SAMPLES_C3 {
        let p = common::random_positive_stochastic(&mut rng, 6, 30);
        let n = p.rows();
        let v = common::random_prob_vector(&mut rng, n, 25);
        let l = left_perron(&p).unwrap();
        let (jl, jv) = (rank_one(&l), rank_one(&v));
        let id = RatMatrix::identity(n);
        let (x, q) = involution_conjugate(&p, &v).unwrap();
        // Recompute X and the conjugate here rather than trusting the library's self-check.
        let x_direct = &(&id - &jl) - &jv;
        let q_direct = &p + &(&jv * &(&id - &p));
        let ok = x == x_direct
            && &x * &x == id
            && &(&x * &p) * &x == q_direct
            && q == q_direct
            && &jl * &p == jl
            && &p * &jl == jl
            && &p * &jv == jv
            && &jv * &jv == jv
            && &jv * &jl == jl;
        failures += usize::from(!ok);
    }
    let elapsed = started.elapsed();
    report.line(
        3,
        failures == 0 && elapsed < BUDGET_C3,
        format!("{SAMPLES_C3} (P, v) pairs, {failures} failures (exact; {} < {})", secs(elapsed), secs(BUDGET_C3)),
    );
}

fn criterion_4(report: &mut Report) {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut failures = 0;
    for _ in 0..SAMPLES_C4 {
        let d = rng.gen_range(2..=1000);
        let p = common::positive_stochastic(&mut rng, 2, d);
        let s = ds_shift(&p).unwrap();
        let ok = s.positive
            && s.matrix.is_positive()
            && s.matrix.row_sums().iter().chain(&s.matrix.col_sums()).all(Rat::is_one);
        failures += usize::from(!ok);
    }
    report.line(4, failures == 0, format!("{SAMPLES_C4} positive 2x2 inputs, {failures} failures (exact)"));
}

fn criterion_5(report: &mut Report) {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut hits = [0usize; 3];
    let mut counterexamples = 0;
    for k in 0..SAMPLES_C5 {
        let p = if k % 2 == 0 {
            let n = rng.gen_range(2..=6);
            let d = 60 * n as i64;
            let spread = rng.gen_range(1..=40);
            common::near_uniform(&mut rng, n, d, spread)
        } else {
            common::random_positive_stochastic(&mut rng, 6, 40)
        };
        let c = same_size_conditions(&p).unwrap();
        let positive = ds_shift(&p).unwrap().positive;
        for (h, cond) in hits.iter_mut().zip([&c.cor_spread_per_column, &c.cor_global_spread, &c.cor_min_entry]) {
            if cond.holds {
                *h += 1;
                counterexamples += usize::from(!positive);
            }
        }
        // The column condition is exactly positivity of the shift.
        counterexamples += usize::from(c.remark_col_condition.holds != positive);
    }
    report.line(
        5,
        counterexamples == 0 && hits.iter().all(|&h| h > 0),
        format!(
            "{SAMPLES_C5} samples; conditions (1), (2), (3) held {}, {}, {} times; {counterexamples} counterexamples (exact)",
            hits[0], hits[1], hits[2]
        ),
    );
}

fn criterion_6(report: &mut Report) {
    let started = Instant::now();
    let mut failures = 0;
    for n in 1..=100u64 {
        // t (t - 1)(t + c) = t^3 + (c - 1) t^2 - c t.
        let c = Rat::ratio(n as i64 - 1, n as i64 + 2);
        let expected = RatPoly::new(vec![Rat::zero(), -&c, &c - &Rat::one(), Rat::one()]);
        failures += usize::from(charpoly(&an_matrix(n).unwrap()).unwrap() != expected);
    }
    let elapsed = started.elapsed();
    report.line(
        6,
        failures == 0 && elapsed < BUDGET_C6,
        format!("n = 1..100, {failures} failures (exact; {} < {})", secs(elapsed), secs(BUDGET_C6)),
    );
}

fn criterion_7(report: &mut Report) {
    let started = Instant::now();
    let p0 = pt_matrix(&Rat::zero()).unwrap();
    let mut ok = true;
    let mut detail = String::new();
    for (a, b) in [(0, 1), (1, 4), (1, 2), (3, 4), (9, 10)] {
        let p = pt_matrix(&Rat::ratio(a, b)).unwrap();
        let four = p.scale(&Rat::from(4));
        let tr = four.trace();
        let det = four.determinant().unwrap();
        let _ = write!(detail, "t = {}: Tr(4P_t) = {tr}, det(4P_t) = {det}; ", Rat::ratio(a, b));
        ok &= p.is_positive()
            && is_irreducible(&p).unwrap()
            && similar_over_rationals(&p0, &p).unwrap()
            && tr == Rat::from(6)
            && det == Rat::from(8);
    }
    let p1 = pt_matrix(&Rat::one()).unwrap();
    ok &= !is_irreducible(&p1).unwrap();
    let elapsed = started.elapsed();
    report.line(
        7,
        ok && elapsed < BUDGET_C7,
        format!("{detail}P_1 reducible (exact; {} < {})", secs(elapsed), secs(BUDGET_C7)),
    );
}

fn criterion_8(report: &mut Report, tally: &mut Tally) {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut failures = 0;
    for _ in 0..SAMPLES_C8 {
        let n = rng.gen_range(1..=4);
        let m = rng.gen_range(1..=5);
        let (dr, ds) = (rng.gen_range(1..=12), rng.gen_range(1..=12));
        let r = common::random_row_stochastic(&mut rng, n, m, dr);
        let s = common::random_row_stochastic(&mut rng, m, n, ds);
        let alpha = Rat::ratio(rng.gen_range(1..=9), rng.gen_range(1..=9));
        let (sa, sb) = (&r * &s, &s * &r);
        let u = r.scale(&alpha);
        let v = s.scale(&alpha.recip().unwrap());
        let verdict = verify_esse(&EsseStep::new(sa.clone(), sb.clone(), u.clone(), v.clone()));
        tally.count(verdict.spectrum);
        let ok = match normalize_esse_to_row_stochastic(&u, &v, &sa, &sb) {
            Ok(norm) => {
                norm.r.row_sums().iter().chain(&norm.s.row_sums()).all(Rat::is_one)
                    && &norm.r * &norm.s == sa
                    && &norm.s * &norm.r == sb
                    && (&norm.alpha * &norm.beta).is_one()
                    && norm.alpha == alpha
            }
            Err(_) => false,
        };
        failures += usize::from(!ok || !verdict.passed());
    }
    report.line(8, failures == 0, format!("{SAMPLES_C8} factorizations, {failures} failures (exact)"));
}

fn criterion_10(report: &mut Report) {
    let o = sse(&["demo-circulant"]);
    let text = stdout(&o);
    // Integer oracle: f(p/q) = (q^2 - 3pq + 3p^2) / q^2; keep the least by
    // cross-multiplication.
    let (mut best_n, mut best_d, mut at) = (1i128, 1i128, (0i128, 1i128));
    for q in 1..=1000i128 {
        for p in 0..=q {
            let num = q * q - 3 * p * q + 3 * p * p;
            if num * best_d < best_n * q * q {
                (best_n, best_d, at) = (num, q * q, (p, q));
            }
        }
    }
    let g = num_integer::gcd(best_n, best_d);
    let oracle = (best_n / g, best_d / g);
    let pass = o.status.code() == Some(0)
        && text.contains("denominator <= 1000; minimum 1/4 at b = 1/2")
        && text.contains("det = 0 is impossible: true")
        && oracle == (1, 4)
        && at == (1, 2);
    report.line(
        10,
        pass,
        format!("binary reports minimum 1/4 at b = 1/2; oracle {}/{} at {}/{} (exact)", oracle.0, oracle.1, at.0, at.1),
    );
}

fn bump(entry: &mut String) {
    let x: Rat = entry.parse().unwrap();
    *entry = (&x + &Rat::ratio(1, 1_000_000)).to_string();
}

fn random_entry<'a, R: Rng>(rng: &mut R, m: &'a mut MatrixFile) -> &'a mut String {
    let i = rng.gen_range(0..m.rows);
    let j = rng.gen_range(0..m.cols);
    &mut m.entries[i][j]
}

fn criterion_11(report: &mut Report, tally: &mut Tally) {
    let dir = tempfile::tempdir().unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let split = make_doubly(&ex43(), &Options { route: RoutePolicy::SplitOnly, ..Options::default() }).unwrap();
    tally.record(&verify_chain(&split.chain));
    let split_file = ChainFile::from_chain("split", &split.chain);
    let near = RatMatrix::from_scaled_ints(&[[5, 3, 2], [3, 4, 3], [3, 3, 4]], 10);
    let same = make_doubly(&near, &Options::default()).unwrap();
    let same_file = sse_core::cli::pipeline_chain_file("same size", &same);
    assert!(same_file.similarity.is_some());

    let path = dir.path().join("c.json");
    let (mut wrong_code, mut unlocated) = (0, 0);
    for k in 0..CORRUPTIONS_C11 {
        let (file, marker) = if k % 4 == 3 {
            let mut f = same_file.clone();
            let sim = f.similarity.as_mut().unwrap();
            match rng.gen_range(0..3) {
                0 => {
                    bump(random_entry(&mut rng, f.start.as_mut().unwrap()));
                }
                1 => bump(random_entry(&mut rng, &mut sim.witness)),
                _ => bump(random_entry(&mut rng, &mut sim.target)),
            }
            (f, "similarity: X start = target X fails".to_string())
        } else {
            let mut f = split_file.clone();
            if rng.gen_range(0..10) == 0 {
                bump(random_entry(&mut rng, f.start.as_mut().unwrap()));
                (f, "endpoint mismatch at chain start".to_string())
            } else {
                let s = rng.gen_range(0..f.steps.len());
                let step = &mut f.steps[s];
                let m = match rng.gen_range(0..4) {
                    0 => &mut step.a,
                    1 => &mut step.b,
                    2 => &mut step.u,
                    _ => &mut step.v,
                };
                bump(random_entry(&mut rng, m));
                (f, format!("  step {}: ", s + 1))
            }
        };
        std::fs::write(&path, to_json(&file)).unwrap();
        let o = sse(&["verify", path_str(&path)]);
        wrong_code += usize::from(o.status.code() != Some(1));
        let text = stdout(&o);
        unlocated += usize::from(!text.lines().any(|l| l.starts_with(marker.as_str())));
    }
    report.line(
        11,
        wrong_code == 0 && unlocated == 0,
        format!("{CORRUPTIONS_C11} corruptions by +1/1000000: {wrong_code} without exit 1, {unlocated} without a located failure (exact)"),
    );
}

#[test]
fn acceptance() {
    let mut report = Report { lines: Vec::new(), failed: Vec::new() };
    let mut tally = Tally::default();
    criterion_1(&mut report, &mut tally);
    criterion_2(&mut report, &mut tally);
    criterion_3(&mut report);
    criterion_4(&mut report);
    criterion_5(&mut report);
    criterion_6(&mut report);
    criterion_7(&mut report);
    criterion_8(&mut report, &mut tally);
    criterion_10(&mut report);
    criterion_11(&mut report, &mut tally);
    report.line(
        9,
        tally.fails == 0 && tally.skipped == 0 && tally.holds > 0,
        format!(
            "{} chains, {} steps in this target: {} hold, {} fail, {} skipped (exact)",
            tally.chains, tally.steps, tally.holds, tally.fails, tally.skipped
        ),
    );
    assert!(report.failed.is_empty(), "failing criteria: {:?}\n{}", report.failed, report.lines.join("\n"));
}
