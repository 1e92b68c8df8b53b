//! Acceptance checks: each criterion of the verification suite as a
//! callable returning a structured outcome. The `acceptance` integration
//! test asserts them one by one; the CLI `selfcheck` command runs them all
//! and prints one pass/fail line per criterion.

use std::sync::OnceLock;
use std::time::{Duration, Instant};

use num_bigint::BigUint;

use crate::alphabet::Genus;
use crate::cone::{enumerate_representatives, ConeTypeTable, OracleClassifier};
use crate::element::GroupElement;
use crate::error::Result;
use crate::matrix::{
    diff_against_fixture, growth_counts, perron, primitivity_certificate, ConeMatrix,
    PERRON_MAX_ITER, PERRON_TOL, REFERENCE_BLOCKS,
};
use crate::mult::{DimsProfile, Evaluator, MatrixSystem, MultFunc, Scalar};
use crate::oracle::{cone_membership, quadruple_occurrences, Ball, BallConfig};
use crate::relator::RelatorTable;
use crate::rng::SplitMix64;
use crate::word::Word;

type Rational = num_rational::BigRational;

/// The 48 cone-type representatives of the genus-2 table, in table order.
pub const GENUS2_TABLE: [&str; 48] = [
    "B", "a", "d", "C", "D", "c", "b", "A", //
    "Bc", "BA", "ab", "aB", "dC", "dc", "CD", "Cb", "Da", "DC", "cd", "cD", "bA", "ba", "AB",
    "Ad", //
    "Bcd", "BAd", "abA", "aBA", "dCD", "dcD", "CDa", "Cba", "Dab", "DCb", "cdC", "cDC", "bAB",
    "baB", "ABc", "Adc", //
    "BcdC", "abAB", "dCDa", "CDab", "DabA", "cdCD", "bABc", "ABcd",
];

/// Result of one acceptance criterion.
#[derive(Debug, Clone)]
pub struct CheckOutcome {
    pub index: usize,
    pub name: &'static str,
    pub passed: bool,
    pub details: String,
    pub elapsed: Duration,
}

impl CheckOutcome {
    pub fn line(&self) -> String {
        format!(
            "criterion {}: {} [{}] ({:.2?})",
            self.index,
            if self.passed { "PASS" } else { "FAIL" },
            self.name,
            self.elapsed
        )
    }
}

/// Failure collector for one criterion.
#[derive(Default)]
struct Probe {
    failures: Vec<String>,
    notes: Vec<String>,
}

impl Probe {
    fn require(&mut self, ok: bool, msg: impl FnOnce() -> String) {
        if !ok {
            self.failures.push(msg());
        }
    }

    fn note(&mut self, msg: String) {
        self.notes.push(msg);
    }

    fn outcome(self, index: usize, name: &'static str, start: Instant) -> CheckOutcome {
        let passed = self.failures.is_empty();
        let mut details = self.failures.join("; ");
        if !self.notes.is_empty() {
            if !details.is_empty() {
                details.push_str(" | ");
            }
            details.push_str(&self.notes.join("; "));
        }
        CheckOutcome { index, name, passed, details, elapsed: start.elapsed() }
    }
}

/// Shared state for the acceptance suite. Heavy artifacts (the radius-7
/// ball, the fingerprint classifier) are built once on first use.
pub struct Acceptance {
    pub rt: RelatorTable,
    pub table: ConeTypeTable,
    pub matrix: ConeMatrix,
    cfg: BallConfig,
    big_ball: OnceLock<std::result::Result<(Ball, Duration), String>>,
    classifier: OnceLock<std::result::Result<OracleClassifier, String>>,
}

/// Radius of the big oracle ball; criteria 4, 6, 7 and 8 compare against it.
const BIG_RADIUS: usize = 7;

impl Acceptance {
    pub fn new(cfg: BallConfig) -> Result<Acceptance> {
        let rt = RelatorTable::new(Genus::new(2)?);
        let table = ConeTypeTable::build(&rt);
        let matrix = ConeMatrix::build(&table)?;
        Ok(Acceptance {
            rt,
            table,
            matrix,
            cfg,
            big_ball: OnceLock::new(),
            classifier: OnceLock::new(),
        })
    }

    /// The radius-7 oracle ball (radius 6 fallback when the configured cap
    /// is too small), with its build time.
    pub fn big_ball(&self) -> std::result::Result<(&Ball, Duration), String> {
        let slot = self.big_ball.get_or_init(|| {
            let t = Instant::now();
            match Ball::build(&self.rt, BIG_RADIUS, &self.cfg) {
                Ok(b) => Ok((b, t.elapsed())),
                Err(_) => {
                    let t = Instant::now();
                    Ball::build(&self.rt, BIG_RADIUS - 1, &self.cfg)
                        .map(|b| (b, t.elapsed()))
                        .map_err(|e| e.to_string())
                }
            }
        });
        slot.as_ref().map(|(b, d)| (b, *d)).map_err(Clone::clone)
    }

    pub fn classifier(&self) -> std::result::Result<&OracleClassifier, String> {
        self.classifier
            .get_or_init(|| {
                OracleClassifier::new(&self.rt, &self.table, &self.cfg).map_err(|e| e.to_string())
            })
            .as_ref()
            .map_err(Clone::clone)
    }

    fn random_geodesic_word(&self, rng: &mut SplitMix64, len: usize) -> Word {
        let mut w = Word::empty();
        'outer: for _ in 0..len {
            for _ in 0..32 {
                let a = rng.below(self.rt.alphabet().size() as u64) as u8;
                let cand = w.appended(a);
                if self.rt.is_geodesic(&cand) {
                    w = cand;
                    continue 'outer;
                }
            }
        }
        w
    }

    /// Criterion 1: representative enumeration (counts, histogram, the
    /// genus-2 table, higher-genus counts).
    pub fn criterion_1(&self) -> CheckOutcome {
        let start = Instant::now();
        let mut p = Probe::default();
        let ab = self.rt.alphabet();
        let reps = enumerate_representatives(&self.rt);
        p.require(reps.len() == 48, || format!("expected 48 representatives, got {}", reps.len()));
        let mut hist = [0usize; 5];
        for w in &reps {
            if w.len() <= 4 {
                hist[w.len()] += 1;
            }
        }
        p.require(hist[1..] == [8, 16, 16, 8], || format!("length histogram {:?}", &hist[1..]));
        let listed: Vec<String> = reps.iter().map(|w| ab.format_word(w)).collect();
        let expected: Vec<String> = GENUS2_TABLE.iter().map(|s| s.to_string()).collect();
        p.require(listed == expected, || {
            let first = listed
                .iter()
                .zip(&expected)
                .position(|(a, b)| a != b)
                .map(|i| format!(" (first mismatch at id {}: {} vs {})", i + 1, listed[i], expected[i]))
                .unwrap_or_default();
            format!("representative list differs from the fixed table{first}")
        });
        for (g, expect) in [(3u32, 120usize), (4, 224)] {
            let rt = RelatorTable::new(Genus::new(g).expect("valid genus"));
            let n = enumerate_representatives(&rt).len();
            p.require(n == expect, || format!("genus {g}: {n} representatives, expected {expect}"));
        }
        let elapsed = start.elapsed();
        p.require(elapsed < Duration::from_secs(1), || format!("took {elapsed:.2?}, budget 1s"));
        p.outcome(1, "cone-type enumeration", start)
    }

    /// Criterion 2: the computed matrix against the bundled reference block
    /// tables, bit-exactly.
    pub fn criterion_2(&self) -> CheckOutcome {
        let start = Instant::now();
        let mut p = Probe::default();
        match ConeMatrix::parse_block_text(REFERENCE_BLOCKS) {
            Ok(fixture) => {
                let diff = diff_against_fixture(&self.matrix, &fixture);
                p.require(diff.is_empty(), || {
                    let entries: Vec<String> = diff
                        .iter()
                        .map(|d| {
                            format!(
                                "(row {}, col {}): computed {} vs reference {}",
                                d.row, d.col, d.computed, d.fixture
                            )
                        })
                        .collect();
                    format!(
                        "{} entries differ from the reference tables: {}",
                        diff.len(),
                        entries.join(", ")
                    )
                });
            }
            Err(e) => p.require(false, || format!("fixture parse failed: {e}")),
        }
        let elapsed = start.elapsed();
        p.require(elapsed < Duration::from_secs(1), || format!("took {elapsed:.2?}, budget 1s"));
        p.outcome(2, "matrix fidelity vs reference tables", start)
    }

    /// Criterion 3: staged primitivity, rows 8/16/32 of the square, cube and
    /// fourth power, then a strictly positive fifth power.
    pub fn criterion_3(&self) -> CheckOutcome {
        let start = Instant::now();
        let mut p = Probe::default();
        let cert = primitivity_certificate(&self.matrix);
        for s in &cert.stages {
            p.require(s.ok, || {
                format!(
                    "rows 1..={} of power {} not strictly positive (first zero at {:?})",
                    s.rows_checked, s.power, s.first_failure
                )
            });
        }
        p.require(cert.k == Some(5), || format!("least positive power is {:?}, expected 5", cert.k));
        p.require(!cert.power_positive[3], || "fourth power already positive".to_string());
        let elapsed = start.elapsed();
        p.require(elapsed < Duration::from_secs(1), || format!("took {elapsed:.2?}, budget 1s"));
        p.outcome(3, "primitivity staging", start)
    }

    /// Criterion 4: Perron data and the sphere-ratio cross-check.
    pub fn criterion_4(&self) -> CheckOutcome {
        let start = Instant::now();
        let mut p = Probe::default();
        let mut budget_extra = Duration::ZERO;
        match perron(&self.matrix, PERRON_TOL, PERRON_MAX_ITER, 0xC0FFEE) {
            Ok(s) => {
                p.require(s.residual <= 1e-10, || format!("residual {} above 1e-10", s.residual));
                p.require(
                    s.right.iter().all(|&x| x > 0.0) && s.left.iter().all(|&x| x > 0.0),
                    || "eigenvector with a nonpositive entry".to_string(),
                );
                p.require(s.restart_deviation <= 1e-8, || {
                    format!("restart deviation {} above 1e-8", s.restart_deviation)
                });
                match self.big_ball() {
                    Ok((ball, build_time)) => {
                        budget_extra = build_time;
                        let sizes = ball.sphere_sizes();
                        let r = ball.radius();
                        let ratio = sizes[r] as f64 / sizes[r - 1] as f64;
                        let rel_err = (s.eigenvalue - ratio).abs() / ratio;
                        p.require(rel_err <= 0.05, || {
                            format!(
                                "eigenvalue {} vs sphere ratio {} differs by {:.2}%",
                                s.eigenvalue,
                                ratio,
                                rel_err * 100.0
                            )
                        });
                        p.note(format!(
                            "r = {:.6}, s({})/s({}) = {:.6}, iterations = {}",
                            s.eigenvalue,
                            r,
                            r - 1,
                            ratio,
                            s.iterations
                        ));
                    }
                    Err(e) => p.require(false, || format!("oracle ball unavailable: {e}")),
                }
            }
            Err(e) => p.require(false, || format!("power iteration failed: {e}")),
        }
        let elapsed = start.elapsed() + budget_extra;
        p.require(elapsed < Duration::from_secs(10), || {
            format!("took {elapsed:.2?} including the ball, budget 10s")
        });
        p.outcome(4, "Perron eigendata vs sphere growth", start)
    }

    /// Criterion 5: suffix-cascade classification equals oracle
    /// classification, exhaustively to radius 5 plus random long elements,
    /// and the four cascade identities hold.
    pub fn criterion_5(&self) -> CheckOutcome {
        let start = Instant::now();
        let mut p = Probe::default();
        let classify = |s: &str| {
            self.table
                .classify(&self.rt.element_of(s).expect("parseable"))
                .expect("genus-2 cascade")
        };
        for (lhs, rhs) in [("bc", "c"), ("aba", "ba"), ("abcd", "cd"), ("dcDCAdc", "BAdc")] {
            p.require(classify(lhs) == classify(rhs), || {
                format!("cascade identity {lhs} = {rhs} failed")
            });
        }
        match (self.classifier(), self.big_ball()) {
            (Ok(oc), Ok((ball, _))) => {
                let mut checked = 0usize;
                let mut mismatches = 0usize;
                for d in 0..=5.min(ball.radius()) {
                    for node in ball.sphere(d) {
                        let x = GroupElement::from_canonical(node.word.clone());
                        let fast = self.table.classify(&x).expect("cascade");
                        match oc.classify(&self.rt, &x) {
                            Ok(slow) if slow == fast => {}
                            other => {
                                mismatches += 1;
                                if mismatches <= 3 {
                                    p.require(false, || {
                                        format!(
                                            "mismatch on {} (cascade {:?}, oracle {:?})",
                                            self.rt.alphabet().format_word(&x.word()),
                                            fast,
                                            other
                                        )
                                    });
                                }
                            }
                        }
                        checked += 1;
                    }
                }
                let mut rng = SplitMix64::new(0x5EED);
                for _ in 0..10_000 {
                    let len = 1 + rng.below(7) as usize;
                    let w = self.random_geodesic_word(&mut rng, len);
                    let x = self.rt.normal_form(&w);
                    let fast = self.table.classify(&x).expect("cascade");
                    let slow = oc.classify(&self.rt, &x);
                    p.require(matches!(&slow, Ok(s) if *s == fast), || {
                        format!(
                            "random mismatch on {} (cascade {:?}, oracle {:?})",
                            self.rt.alphabet().format_word(x.word()),
                            fast,
                            slow
                        )
                    });
                    checked += 1;
                }
                p.note(format!("checked {checked} elements at oracle depth {}", oc.depth()));
            }
            (Err(e), _) | (_, Err(e)) => p.require(false, || format!("oracle unavailable: {e}")),
        }
        let elapsed = start.elapsed();
        p.require(elapsed < Duration::from_secs(120), || format!("took {elapsed:.2?}, budget 2min"));
        p.outcome(5, "cascade vs oracle classification", start)
    }

    /// Criterion 6: matrix-driven sphere counts equal BFS sphere sizes, and
    /// the per-type census matches.
    pub fn criterion_6(&self) -> CheckOutcome {
        let start = Instant::now();
        let mut p = Probe::default();
        match self.big_ball() {
            Ok((ball, _)) => {
                let sizes = ball.sphere_sizes();
                let rows = growth_counts(&self.matrix, ball.radius());
                for (n, row) in rows.iter().enumerate() {
                    p.require(row.sphere_size == BigUint::from(sizes[n]), || {
                        format!("s({n}): automaton {} vs BFS {}", row.sphere_size, sizes[n])
                    });
                }
                p.require(sizes[0] == 1 && sizes[1] == 8 && sizes[2] == 56, || {
                    format!("first spheres {:?}", &sizes[..3])
                });
                // Per-type census on the smaller spheres.
                for n in 1..=6.min(ball.radius()) {
                    let mut census = vec![0u64; 48];
                    for node in ball.sphere(n) {
                        let c = self
                            .table
                            .classify(&GroupElement::from_canonical(node.word.clone()))
                            .expect("cascade");
                        census[c.get() as usize - 1] += 1;
                    }
                    let expect: Vec<u64> = rows[n]
                        .by_type
                        .iter()
                        .map(|b| b.to_u64_digits().first().copied().unwrap_or(0))
                        .collect();
                    p.require(census == expect, || format!("per-type census differs at n = {n}"));
                }
                p.note(format!("sphere sizes {:?}", sizes));
            }
            Err(e) => p.require(false, || format!("oracle ball unavailable: {e}")),
        }
        p.outcome(6, "growth equivalence", start)
    }

    /// Criterion 7: twin-swap closures enumerate exactly the geodesics of
    /// the DAG, and half-relator occurrences overlap in at most one letter.
    pub fn criterion_7(&self) -> CheckOutcome {
        let start = Instant::now();
        let mut p = Probe::default();
        match self.big_ball() {
            Ok((ball, _)) => {
                let counts = ball.geodesic_counts();
                let half = self.rt.genus().half_relator_len();
                let mut mismatches = 0usize;
                let limit = 6.min(ball.radius());
                let mut offset = 0usize;
                for d in 0..=limit {
                    for (k, node) in ball.sphere(d).iter().enumerate() {
                        let idx = offset + k;
                        let class = self
                            .rt
                            .geodesic_class(&node.word)
                            .expect("ball words are geodesic");
                        if class.len() as u64 != counts[idx] {
                            mismatches += 1;
                            if mismatches <= 3 {
                                p.require(false, || {
                                    format!(
                                        "{}: closure size {} vs DAG count {}",
                                        self.rt.alphabet().format_word(&node.word),
                                        class.len(),
                                        counts[idx]
                                    )
                                });
                            }
                        }
                        // Occurrence overlap within each geodesic word.
                        for w in &class {
                            let mut last_start: Option<usize> = None;
                            if w.len() < half {
                                continue;
                            }
                            for s in 0..=w.len() - half {
                                if self.rt.is_in_r(&w.subword(s, half)) {
                                    if let Some(prev) = last_start {
                                        p.require(s >= prev + half - 1, || {
                                            format!(
                                                "occurrences at {prev} and {s} share more than one letter in {}",
                                                self.rt.alphabet().format_word(w)
                                            )
                                        });
                                    }
                                    last_start = Some(s);
                                }
                            }
                        }
                    }
                    offset += ball.sphere(d).len();
                }
                p.require(mismatches == 0, || format!("{mismatches} closure/DAG mismatches"));
                // Elementwise agreement of the two enumerations on the
                // smaller spheres (the count comparison covers the rest).
                let mut offset = 0usize;
                for d in 0..=5.min(ball.radius()) {
                    for (k, node) in ball.sphere(d).iter().enumerate() {
                        let x = ball.element_at((offset + k) as u32);
                        let from_dag = ball.geodesic_words_to(&x).expect("inside the ball");
                        let from_swaps =
                            self.rt.geodesic_class(&node.word).expect("ball words are geodesic");
                        p.require(from_dag == from_swaps, || {
                            format!(
                                "enumerations differ at {}",
                                self.rt.alphabet().format_word(&node.word)
                            )
                        });
                    }
                    offset += ball.sphere(d).len();
                }
                let y = self.rt.element_of("abABAdc").expect("parseable");
                let n = self.rt.geodesic_class(y.word()).expect("geodesic").len();
                p.require(n == 3, || format!("three-form element has {n} geodesics"));
                let occs = quadruple_occurrences(&self.rt, &y);
                p.require(occs.len() == 4, || format!("expected 4 occurrences, got {}", occs.len()));
            }
            Err(e) => p.require(false, || format!("oracle ball unavailable: {e}")),
        }
        let elapsed = start.elapsed();
        p.require(elapsed < Duration::from_secs(120), || format!("took {elapsed:.2?}, budget 2min"));
        p.outcome(7, "geodesic machinery", start)
    }

    /// Criterion 8: the three evaluators agree exactly in rational mode on
    /// random systems over every in-cone target, the translation identity
    /// holds, and the all-ones system counts geodesics.
    pub fn criterion_8(&self) -> CheckOutcome {
        let start = Instant::now();
        let mut p = Probe::default();
        match self.big_ball() {
            Ok((ball, _)) => {
                let limit = 6.min(ball.radius());
                let profiles = [
                    DimsProfile::scalar(),
                    DimsProfile { singles: 2, doubles: 1, triples: 1, quadruples: 3 },
                    DimsProfile { singles: 1, doubles: 2, triples: 2, quadruples: 1 },
                ];
                let mut evaluated = 0usize;
                for seed in 0..10u64 {
                    let profile = profiles[(seed % 3) as usize];
                    let sys =
                        match MatrixSystem::<Rational>::random(&self.rt, &self.table, &profile, 1000 + seed)
                        {
                            Ok(s) => s,
                            Err(e) => {
                                p.require(false, || format!("system build failed: {e}"));
                                continue;
                            }
                        };
                    let ev = Evaluator::new(&self.rt, &self.table, &sys);
                    let b_rank = (seed % 8) as u8;
                    let b = self.rt.normal_form(&Word::single(b_rank));
                    let c0 = self.table.classify(&b).expect("cascade");
                    let mut rng = SplitMix64::new(seed);
                    let vector: Vec<Rational> = (0..sys.dim_of(c0))
                        .map(|_| {
                            let mut n = rng.in_range(-3, 3);
                            if n == 0 {
                                n = 1;
                            }
                            Scalar::from_ratio(n, rng.in_range(1, 3))
                        })
                        .collect();
                    let f = match MultFunc::new(
                        &self.rt,
                        &self.table,
                        &sys,
                        GroupElement::identity(),
                        b.clone(),
                        vector,
                    ) {
                        Ok(f) => f,
                        Err(e) => {
                            p.require(false, || format!("function build failed: {e}"));
                            continue;
                        }
                    };
                    let marks = ball.cone_of_vertex(&b).expect("generator is in the ball");
                    let mut offset = 0usize;
                    let mut sphere_mismatch = 0usize;
                    for d in 0..=limit {
                        for (k, node) in ball.sphere(d).iter().enumerate() {
                            if !marks[offset + k] {
                                continue;
                            }
                            let z = GroupElement::from_canonical(node.word.clone());
                            let r1 = ev.recursive(&f, &z);
                            let r2 = ev.geodesic_sum(&f, &z);
                            let r3 = ev.matrix_form(&f, &z);
                            let agree = matches!((&r1, &r2, &r3), (Ok(a), Ok(b), Ok(c)) if a == b && b == c);
                            if !agree {
                                sphere_mismatch += 1;
                                if sphere_mismatch <= 2 {
                                    p.require(false, || {
                                        format!(
                                            "seed {seed}: evaluators disagree at {}",
                                            self.rt.alphabet().format_word(&z.word())
                                        )
                                    });
                                }
                            }
                            evaluated += 1;
                        }
                        offset += ball.sphere(d).len();
                    }
                    p.require(sphere_mismatch == 0, || {
                        format!("seed {seed}: {sphere_mismatch} disagreements")
                    });
                }
                // Translation identity on random samples.
                let sys =
                    MatrixSystem::<Rational>::random(&self.rt, &self.table, &DimsProfile::scalar(), 424242)
                        .expect("buildable system");
                let ev = Evaluator::new(&self.rt, &self.table, &sys);
                let b = self.rt.element_of("b").expect("parseable");
                let f = MultFunc::new(
                    &self.rt,
                    &self.table,
                    &sys,
                    GroupElement::identity(),
                    b.clone(),
                    vec![Scalar::from_ratio(1, 1)],
                )
                .expect("valid function");
                let mut rng = SplitMix64::new(77);
                for _ in 0..25 {
                    let g = self.rt.normal_form(&self.random_geodesic_word(&mut rng, 4));
                    let tail = self.rt.normal_form(&self.random_geodesic_word(&mut rng, 4));
                    let z0 = self.rt.multiply(&b, &tail);
                    let z = self.rt.multiply(&g, &z0);
                    let tf = f.translate(&self.rt, &g);
                    let lhs = ev.recursive(&tf, &z).expect("evaluates");
                    let rhs = ev
                        .recursive(&f, &self.rt.multiply(&self.rt.invert(&g), &z))
                        .expect("evaluates");
                    p.require(lhs == rhs, || "translation identity failed".to_string());
                }
                // All-ones system reproduces geodesic counts.
                let ones = MatrixSystem::<Rational>::all_ones_scalar(&self.rt, &self.table)
                    .expect("buildable system");
                let ev1 = Evaluator::new(&self.rt, &self.table, &ones);
                let f1 = MultFunc::new(
                    &self.rt,
                    &self.table,
                    &ones,
                    GroupElement::identity(),
                    b.clone(),
                    vec![Scalar::from_ratio(1, 1)],
                )
                .expect("valid function");
                let mut rng = SplitMix64::new(78);
                for _ in 0..50 {
                    let tail = self.rt.normal_form(&self.random_geodesic_word(&mut rng, 5));
                    if !cone_membership(&self.rt, &b, &tail) {
                        continue;
                    }
                    let z = self.rt.multiply(&b, &tail);
                    let count = self.rt.geodesic_class(tail.word()).expect("geodesic").len() as i64;
                    let got = ev1.recursive(&f1, &z).expect("evaluates");
                    p.require(got == vec![Scalar::from_ratio(count, 1)], || {
                        format!(
                            "all-ones value at {} is {:?}, geodesic count {count}",
                            self.rt.alphabet().format_word(z.word()),
                            got
                        )
                    });
                }
                p.note(format!("compared three evaluators on {evaluated} targets"));
            }
            Err(e) => p.require(false, || format!("oracle ball unavailable: {e}")),
        }
        let elapsed = start.elapsed();
        p.require(elapsed < Duration::from_secs(300), || format!("took {elapsed:.2?}, budget 5min"));
        p.outcome(8, "multiplicative-function equivalence", start)
    }

    /// Criterion 9: cone nesting along suffixes and pairwise-distinct
    /// representative fingerprints, including the explicit witness.
    pub fn criterion_9(&self) -> CheckOutcome {
        let start = Instant::now();
        let mut p = Probe::default();
        match self.classifier() {
            Ok(oc) => {
                let mut rng = SplitMix64::new(0xAB5);
                for _ in 0..1000 {
                    let len = 2 + rng.below(5) as usize;
                    let w = self.random_geodesic_word(&mut rng, len);
                    let mut prev = oc.fingerprint_of(&self.rt, &self.rt.normal_form(&w));
                    for cut in 1..w.len() {
                        let suffix = self.rt.normal_form(&w.suffix(w.len() - cut));
                        let fp = oc.fingerprint_of(&self.rt, &suffix);
                        p.require(prev.is_subset_of(&fp), || {
                            format!(
                                "nesting failed for {} at cut {cut}",
                                self.rt.alphabet().format_word(&w)
                            )
                        });
                        prev = fp;
                    }
                }
                // Pairwise distinctness of the 48 representative prints.
                let prints: Vec<_> = self
                    .table
                    .representatives()
                    .iter()
                    .map(|w| oc.fingerprint_of(&self.rt, &self.rt.normal_form(w)))
                    .collect();
                for i in 0..prints.len() {
                    for j in i + 1..prints.len() {
                        p.require(prints[i] != prints[j], || {
                            format!("fingerprints of ids {} and {} collide", i + 1, j + 1)
                        });
                    }
                }
                // Explicit witness separating the types of a and ba.
                let witness = self.rt.element_of("BAd").expect("parseable");
                let a = self.rt.element_of("a").expect("parseable");
                let ba = self.rt.element_of("ba").expect("parseable");
                p.require(
                    cone_membership(&self.rt, &a, &witness)
                        && !cone_membership(&self.rt, &ba, &witness),
                    || "witness BAd does not separate a from ba".to_string(),
                );
                p.note(format!("fingerprint depth {}", oc.depth()));
            }
            Err(e) => p.require(false, || format!("classifier unavailable: {e}")),
        }
        let elapsed = start.elapsed();
        p.require(elapsed < Duration::from_secs(60), || format!("took {elapsed:.2?}, budget 1min"));
        p.outcome(9, "cone nesting and fingerprint uniqueness", start)
    }

    pub fn run_all(&self) -> Vec<CheckOutcome> {
        vec![
            self.criterion_1(),
            self.criterion_2(),
            self.criterion_3(),
            self.criterion_4(),
            self.criterion_5(),
            self.criterion_6(),
            self.criterion_7(),
            self.criterion_8(),
            self.criterion_9(),
        ]
    }
}
