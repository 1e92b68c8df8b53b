//! The 48x48 cone-type successor matrix: construction, comparison against
//! the bundled reference block tables, the primitivity certificate, Perron
//! eigendata, and sphere-size counting.

use num_bigint::BigUint;
use num_traits::Zero;

use crate::alphabet::Generator;
use crate::cone::{ConeTypeId, ConeTypeTable};
use crate::error::{Error, Result};
use crate::rng::SplitMix64;

/// Row/column group sizes: singles, doubles, triples, quadruples.
pub const GROUP_SIZES: [usize; 4] = [8, 16, 16, 8];
/// Group offsets into the 48 indices.
pub const GROUP_OFFSETS: [usize; 5] = [0, 8, 24, 40, 48];
pub const ORDER: usize = 48;

/// Bundled reference block tables; `verify` diffs the computed matrix
/// against them. Kept verbatim from their source (see README).
pub const REFERENCE_BLOCKS: &str = include_str!("../fixtures/reference_blocks.txt");

/// 0/1 successor matrix: `entry(r, c) = 1` iff some generator sends cone
/// type `c + 1` to cone type `r + 1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConeMatrix {
    entries: Vec<u8>,
}

impl ConeMatrix {
    /// Build from the successor map of a genus-2 table.
    pub fn build(table: &ConeTypeTable) -> Result<ConeMatrix> {
        if table.count() != ORDER {
            return Err(Error::MatrixGenus(((table.count() / 8 + 1) / 2) as u32));
        }
        let mut entries = vec![0u8; ORDER * ORDER];
        for c in 1..=ORDER as u16 {
            for a in 0..8u8 {
                if let Some(s) = table.successor(ConeTypeId(c), Generator(a)) {
                    entries[(s.get() as usize - 1) * ORDER + (c as usize - 1)] = 1;
                }
            }
        }
        Ok(ConeMatrix { entries })
    }

    pub fn from_entries(entries: Vec<u8>) -> Result<ConeMatrix> {
        if entries.len() != ORDER * ORDER {
            return Err(Error::DimensionMismatch { expected: ORDER * ORDER, got: entries.len() });
        }
        Ok(ConeMatrix { entries })
    }

    /// 0-based access.
    pub fn entry(&self, row: usize, col: usize) -> u8 {
        self.entries[row * ORDER + col]
    }

    pub fn set_entry(&mut self, row: usize, col: usize, v: u8) {
        self.entries[row * ORDER + col] = v;
    }

    pub fn column_sums(&self) -> Vec<usize> {
        (0..ORDER)
            .map(|c| (0..ORDER).map(|r| self.entry(r, c) as usize).sum())
            .collect()
    }

    /// Extract block `(i, j)` (1-based group indices) as rows.
    pub fn block(&self, i: usize, j: usize) -> Vec<Vec<u8>> {
        let rows = GROUP_OFFSETS[i - 1]..GROUP_OFFSETS[i];
        let cols = GROUP_OFFSETS[j - 1]..GROUP_OFFSETS[j];
        rows.map(|r| cols.clone().map(|c| self.entry(r, c)).collect()).collect()
    }

    fn block_is_zero(&self, i: usize, j: usize) -> bool {
        self.block(i, j).iter().all(|row| row.iter().all(|&v| v == 0))
    }

    fn block_is_identity(&self, i: usize, j: usize) -> bool {
        let b = self.block(i, j);
        b.len() == b[0].len()
            && b.iter().enumerate().all(|(r, row)| {
                row.iter().enumerate().all(|(c, &v)| v == u8::from(r == c))
            })
    }

    /// Block-form text layout: blocks column by column, zero blocks
    /// omitted, identity blocks abbreviated. Matches the reference fixture.
    pub fn to_block_text(&self) -> String {
        let mut out = String::new();
        out.push_str("# 48x48 cone-type successor matrix in block form.\n");
        out.push_str("# Row/column groups: 1=singles(8), 2=doubles(16), 3=triples(16), 4=quadruples(8).\n");
        out.push_str("# Blocks not listed are zero; \"identity\" marks an identity block.\n");
        for j in 1..=4 {
            for i in 1..=4 {
                if self.block_is_zero(i, j) {
                    continue;
                }
                if self.block_is_identity(i, j) {
                    out.push_str(&format!("\nblock {i},{j} identity\n"));
                    continue;
                }
                out.push_str(&format!("\nblock {i},{j}\n"));
                for row in self.block(i, j) {
                    let line: Vec<String> = row.iter().map(u8::to_string).collect();
                    out.push_str(&line.join(" "));
                    out.push('\n');
                }
            }
        }
        out
    }

    /// Parse the block-form layout produced by `to_block_text` (also the
    /// format of the bundled reference fixture).
    pub fn parse_block_text(text: &str) -> Result<ConeMatrix> {
        let mut entries = vec![0u8; ORDER * ORDER];
        let mut lines = text
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'))
            .peekable();
        while let Some(header) = lines.next() {
            let rest = header
                .strip_prefix("block ")
                .ok_or_else(|| Error::Fixture(format!("expected block header, got '{header}'")))?;
            let mut parts = rest.split_whitespace();
            let coords = parts.next().unwrap_or_default();
            let (i, j) = coords
                .split_once(',')
                .and_then(|(a, b)| Some((a.parse::<usize>().ok()?, b.parse::<usize>().ok()?)))
                .filter(|&(i, j)| (1..=4).contains(&i) && (1..=4).contains(&j))
                .ok_or_else(|| Error::Fixture(format!("bad block coordinates '{coords}'")))?;
            let height = GROUP_SIZES[i - 1];
            let width = GROUP_SIZES[j - 1];
            if parts.next() == Some("identity") {
                if height != width {
                    return Err(Error::Fixture(format!("block {i},{j} cannot be an identity")));
                }
                for d in 0..height {
                    entries[(GROUP_OFFSETS[i - 1] + d) * ORDER + GROUP_OFFSETS[j - 1] + d] = 1;
                }
                continue;
            }
            for r in 0..height {
                let line = lines
                    .next()
                    .ok_or_else(|| Error::Fixture(format!("block {i},{j}: missing row {}", r + 1)))?;
                let values: Vec<u8> = line
                    .split_whitespace()
                    .map(|t| match t {
                        "0" => Ok(0u8),
                        "1" => Ok(1u8),
                        _ => Err(Error::Fixture(format!("block {i},{j}: bad entry '{t}'"))),
                    })
                    .collect::<Result<_>>()?;
                if values.len() != width {
                    return Err(Error::Fixture(format!(
                        "block {i},{j} row {}: expected {width} entries, got {}",
                        r + 1,
                        values.len()
                    )));
                }
                for (cidx, v) in values.into_iter().enumerate() {
                    entries[(GROUP_OFFSETS[i - 1] + r) * ORDER + GROUP_OFFSETS[j - 1] + cidx] = v;
                }
            }
        }
        ConeMatrix::from_entries(entries)
    }

    pub fn to_csv(&self) -> String {
        (0..ORDER)
            .map(|r| {
                (0..ORDER)
                    .map(|c| self.entry(r, c).to_string())
                    .collect::<Vec<_>>()
                    .join(",")
            })
            .collect::<Vec<_>>()
            .join("\n")
            + "\n"
    }

    pub fn to_json(&self) -> serde_json::Value {
        let rows: Vec<Vec<u8>> =
            (0..ORDER).map(|r| (0..ORDER).map(|c| self.entry(r, c)).collect()).collect();
        serde_json::json!(rows)
    }
}

/// One disagreement between a computed matrix and a fixture. Indices are
/// 1-based cone-type ids.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub struct DiffEntry {
    pub row: usize,
    pub col: usize,
    pub computed: u8,
    pub fixture: u8,
}

/// Entrywise diff of a computed matrix against a fixture. Empty on full
/// agreement; the computed matrix stays authoritative either way.
pub fn diff_against_fixture(computed: &ConeMatrix, fixture: &ConeMatrix) -> Vec<DiffEntry> {
    let mut out = Vec::new();
    for r in 0..ORDER {
        for c in 0..ORDER {
            let (a, b) = (computed.entry(r, c), fixture.entry(r, c));
            if a != b {
                out.push(DiffEntry { row: r + 1, col: c + 1, computed: a, fixture: b });
            }
        }
    }
    out
}

/// One rows-positivity stage of the primitivity certificate.
#[derive(Debug, Clone, Copy, serde::Serialize)]
pub struct StageCheck {
    /// Power of the matrix this stage examines.
    pub power: u32,
    /// The first `rows_checked` rows must be strictly positive.
    pub rows_checked: usize,
    pub ok: bool,
    /// First failing `(row, col)` (1-based) when not ok.
    pub first_failure: Option<(usize, usize)>,
}

/// Staged positivity evidence: rows 1-8 of M^2, 1-16 of M^3, 1-32 of M^4,
/// and all of M^5 are strictly positive, so M is primitive with exponent
/// at most 5.
#[derive(Debug, Clone, serde::Serialize)]
pub struct PrimitivityCertificate {
    /// Least `k <= 5` with `M^k > 0`, if any.
    pub k: Option<u32>,
    pub power_positive: [bool; 5],
    pub stages: Vec<StageCheck>,
    /// Largest entry seen across the computed powers.
    pub max_entry: u64,
}

impl PrimitivityCertificate {
    pub fn all_stages_ok(&self) -> bool {
        self.stages.iter().all(|s| s.ok)
    }
}

fn mat_mul(a: &[u64], b: &[u64]) -> Vec<u64> {
    let mut out = vec![0u64; ORDER * ORDER];
    for r in 0..ORDER {
        for k in 0..ORDER {
            let v = a[r * ORDER + k];
            if v == 0 {
                continue;
            }
            for c in 0..ORDER {
                out[r * ORDER + c] += v * b[k * ORDER + c];
            }
        }
    }
    out
}

fn check_rows_positive(m: &[u64], rows: usize) -> (bool, Option<(usize, usize)>) {
    for r in 0..rows {
        for c in 0..ORDER {
            if m[r * ORDER + c] == 0 {
                return (false, Some((r + 1, c + 1)));
            }
        }
    }
    (true, None)
}

/// Compute the staged primitivity certificate with exact integer powers.
pub fn primitivity_certificate(m: &ConeMatrix) -> PrimitivityCertificate {
    let base: Vec<u64> = (0..ORDER * ORDER).map(|i| m.entries[i] as u64).collect();
    let mut powers = vec![base.clone()];
    for _ in 1..5 {
        let next = mat_mul(powers.last().expect("nonempty"), &base);
        powers.push(next);
    }
    let max_entry = powers.iter().flat_map(|p| p.iter().copied()).max().unwrap_or(0);
    // Entries of M^5 are bounded by (max column sum)^5 = 7^5; anything close
    // to u64 range would signal a broken input.
    assert!(max_entry < 1 << 32, "power entries out of expected range");
    let power_positive: Vec<bool> =
        powers.iter().map(|p| p.iter().all(|&v| v > 0)).collect();
    let stage_rows = [8usize, 16, 32, 48];
    let stages: Vec<StageCheck> = stage_rows
        .iter()
        .enumerate()
        .map(|(idx, &rows)| {
            let power = idx as u32 + 2;
            let (ok, first_failure) = check_rows_positive(&powers[idx + 1], rows);
            StageCheck { power, rows_checked: rows, ok, first_failure }
        })
        .collect();
    let k = power_positive.iter().position(|&p| p).map(|i| i as u32 + 1);
    PrimitivityCertificate {
        k,
        power_positive: power_positive.try_into().expect("five powers"),
        stages,
        max_entry,
    }
}

/// Perron data from power iteration.
#[derive(Debug, Clone)]
pub struct SpectralResult {
    pub eigenvalue: f64,
    /// Right eigenvector, sup-norm 1.
    pub right: Vec<f64>,
    /// Left eigenvector, sup-norm 1.
    pub left: Vec<f64>,
    /// Final residual `max|Mv - rv|` over the two primary runs.
    pub residual: f64,
    pub iterations: usize,
    /// Sup distance between the normalized eigenvectors of the two right
    /// restarts.
    pub restart_deviation: f64,
    /// `|r_right - r_left|`.
    pub left_right_gap: f64,
    /// Residuals of the primary right run, per iteration.
    pub residual_history: Vec<f64>,
}

fn apply(m: &ConeMatrix, v: &[f64], transpose: bool) -> Vec<f64> {
    let mut out = vec![0.0; ORDER];
    for r in 0..ORDER {
        for c in 0..ORDER {
            if m.entry(r, c) != 0 {
                if transpose {
                    out[c] += v[r];
                } else {
                    out[r] += v[c];
                }
            }
        }
    }
    out
}

fn sup_norm(v: &[f64]) -> f64 {
    v.iter().fold(0.0f64, |a, &x| a.max(x.abs()))
}

fn power_iterate(
    m: &ConeMatrix,
    start: Vec<f64>,
    transpose: bool,
    tol: f64,
    max_iter: usize,
) -> Result<(f64, Vec<f64>, f64, usize, Vec<f64>)> {
    let mut v = start;
    let norm = sup_norm(&v);
    v.iter_mut().for_each(|x| *x /= norm);
    let mut history = Vec::new();
    for it in 1..=max_iter {
        let w = apply(m, &v, transpose);
        let lambda = sup_norm(&w);
        let residual = v
            .iter()
            .zip(&w)
            .fold(0.0f64, |a, (&vi, &wi)| a.max((wi - lambda * vi).abs()));
        history.push(residual);
        v = w;
        v.iter_mut().for_each(|x| *x /= lambda);
        if residual <= tol {
            return Ok((lambda, v, residual, it, history));
        }
    }
    Err(Error::NoConvergence(max_iter))
}

pub const PERRON_TOL: f64 = 1e-12;
pub const PERRON_MAX_ITER: usize = 100_000;

/// Power iteration from the all-ones vector (and a transposed run for the
/// left vector). A second run from a random positive vector checks that the
/// limit direction does not depend on the start.
pub fn perron(m: &ConeMatrix, tol: f64, max_iter: usize, seed: u64) -> Result<SpectralResult> {
    let ones = vec![1.0; ORDER];
    let (r_right, right, res_right, it_right, history) =
        power_iterate(m, ones.clone(), false, tol, max_iter)?;
    let mut rng = SplitMix64::new(seed);
    let random_start: Vec<f64> = (0..ORDER).map(|_| 0.05 + rng.unit_f64()).collect();
    let (_, right2, _, it2, _) = power_iterate(m, random_start, false, tol, max_iter)?;
    let restart_deviation = right
        .iter()
        .zip(&right2)
        .fold(0.0f64, |a, (&x, &y)| a.max((x - y).abs()));
    let (r_left, left, res_left, it_left, _) = power_iterate(m, ones, true, tol, max_iter)?;
    Ok(SpectralResult {
        eigenvalue: r_right,
        right,
        left,
        residual: res_right.max(res_left),
        iterations: it_right.max(it_left).max(it2),
        restart_deviation,
        left_right_gap: (r_right - r_left).abs(),
        residual_history: history,
    })
}

/// Sphere census driven by the successor matrix: `n`, the sphere size, and
/// the per-type element counts.
#[derive(Debug, Clone)]
pub struct GrowthRow {
    pub n: usize,
    pub sphere_size: BigUint,
    /// Element counts for types 1..=48; empty for `n = 0`.
    pub by_type: Vec<BigUint>,
}

/// Exact sphere sizes for `n = 0..=n_max`, counting group elements.
///
/// The matrix transports counts along successor edges. Every element whose
/// type is a quadruple is reached through both of its twin suffixes, i.e.
/// through exactly two (predecessor, letter) pairs, so the quadruple
/// coordinates come out doubled and are halved each step. All other types
/// are reached through exactly one pair.
pub fn growth_counts(m: &ConeMatrix, n_max: usize) -> Vec<GrowthRow> {
    let mut rows = vec![GrowthRow { n: 0, sphere_size: BigUint::from(1u32), by_type: Vec::new() }];
    if n_max == 0 {
        return rows;
    }
    let mut v: Vec<BigUint> = (0..ORDER).map(|i| BigUint::from(u8::from(i < 8))).collect();
    rows.push(GrowthRow { n: 1, sphere_size: v.iter().sum(), by_type: v.clone() });
    for n in 2..=n_max {
        let mut next = vec![BigUint::zero(); ORDER];
        for r in 0..ORDER {
            for c in 0..ORDER {
                if m.entry(r, c) != 0 {
                    next[r] += &v[c];
                }
            }
        }
        for q in next.iter_mut().take(GROUP_OFFSETS[4]).skip(GROUP_OFFSETS[3]) {
            let (half, rem) = (&*q / 2u32, &*q % 2u32);
            assert!(rem.is_zero(), "quadruple counts must be even");
            *q = half;
        }
        v = next;
        rows.push(GrowthRow { n, sphere_size: v.iter().sum(), by_type: v.clone() });
    }
    rows
}

/// Number of geodesic words of each length (plain matrix powers, no twin
/// collapse). Exceeds the sphere size from length 4 on, by one per element
/// with several geodesics.
pub fn geodesic_word_counts(m: &ConeMatrix, n_max: usize) -> Vec<BigUint> {
    let mut out = vec![BigUint::from(1u32)];
    if n_max == 0 {
        return out;
    }
    let mut v: Vec<BigUint> = (0..ORDER).map(|i| BigUint::from(u8::from(i < 8))).collect();
    out.push(v.iter().sum());
    for _ in 2..=n_max {
        let mut next = vec![BigUint::zero(); ORDER];
        for r in 0..ORDER {
            for c in 0..ORDER {
                if m.entry(r, c) != 0 {
                    next[r] += &v[c];
                }
            }
        }
        v = next;
        out.push(v.iter().sum());
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::alphabet::Genus;
    use crate::relator::RelatorTable;

    fn matrix() -> ConeMatrix {
        let rt = RelatorTable::new(Genus::new(2).unwrap());
        let table = ConeTypeTable::build(&rt);
        ConeMatrix::build(&table).unwrap()
    }

    #[test]
    fn column_sums_are_the_out_degrees() {
        let m = matrix();
        let sums = m.column_sums();
        assert!(sums[..40].iter().all(|&s| s == 7));
        assert!(sums[40..].iter().all(|&s| s == 6));
        assert_eq!(sums.iter().filter(|&&s| s == 6).count(), 8);
    }

    #[test]
    fn structural_blocks() {
        let m = matrix();
        assert!(m.block_is_identity(3, 2));
        for (i, j) in [(3, 1), (3, 3), (3, 4), (4, 1), (4, 2), (4, 4)] {
            assert!(m.block_is_zero(i, j), "block {i},{j}");
        }
    }

    #[test]
    fn column_of_type_a_splits_five_singles_two_doubles() {
        let m = matrix();
        // Type 2 is the single `a`; 0-based column 1.
        let singles: usize = (0..8).map(|r| m.entry(r, 1) as usize).sum();
        let doubles: usize = (8..24).map(|r| m.entry(r, 1) as usize).sum();
        let rest: usize = (24..48).map(|r| m.entry(r, 1) as usize).sum();
        assert_eq!((singles, doubles, rest), (5, 2, 0));
    }

    #[test]
    fn block_text_round_trips() {
        let m = matrix();
        let text = m.to_block_text();
        let parsed = ConeMatrix::parse_block_text(&text).unwrap();
        assert_eq!(parsed, m);
        assert!(text.contains("block 3,2 identity"));
    }

    #[test]
    fn malformed_fixtures_are_rejected() {
        let cases = [
            ("rows 1 1\n1 0", "expected block header"),
            ("block 5,1\n1", "bad block coordinates"),
            ("block 1,1\n1 0 1\n", "expected 8 entries"),
            ("block 1,1\n1 0 1 1 1 1 0 2\n", "bad entry"),
            ("block 1,2 identity\n", "cannot be an identity"),
            ("block 2,1\n1 0 0 0 0 0 0 0\n", "missing row"),
        ];
        for (text, needle) in cases {
            let err = ConeMatrix::parse_block_text(text).unwrap_err().to_string();
            assert!(err.contains(needle), "{text:?} gave {err:?}");
        }
    }

    #[test]
    fn diff_reports_exactly_the_flipped_bit() {
        let m = matrix();
        let mut tampered = m.clone();
        tampered.set_entry(10, 3, 1 - tampered.entry(10, 3));
        let d = diff_against_fixture(&m, &tampered);
        assert_eq!(d.len(), 1);
        assert_eq!((d[0].row, d[0].col), (11, 4));
        // Transposing the comparison order flips the value columns only.
        let d2 = diff_against_fixture(&tampered, &m);
        assert_eq!((d2[0].row, d2[0].col), (11, 4));
        assert_eq!((d2[0].computed, d2[0].fixture), (d[0].fixture, d[0].computed));
        assert!(diff_against_fixture(&m, &m).is_empty());
    }

    #[test]
    fn primitivity_certificate_on_the_real_matrix() {
        let cert = primitivity_certificate(&matrix());
        assert_eq!(cert.k, Some(5));
        assert!(cert.all_stages_ok());
        assert_eq!(cert.power_positive, [false, false, false, false, true]);
    }

    #[test]
    fn identity_matrix_is_never_positive() {
        let mut entries = vec![0u8; ORDER * ORDER];
        for i in 0..ORDER {
            entries[i * ORDER + i] = 1;
        }
        let id = ConeMatrix::from_entries(entries).unwrap();
        let cert = primitivity_certificate(&id);
        assert_eq!(cert.k, None);
        assert!(!cert.all_stages_ok());
        assert!(cert.stages[0].first_failure.is_some());
    }

    #[test]
    fn perron_converges_with_positive_vectors() {
        let m = matrix();
        let s = perron(&m, PERRON_TOL, PERRON_MAX_ITER, 1).unwrap();
        assert!(s.residual <= PERRON_TOL);
        assert!(s.right.iter().all(|&x| x > 0.0));
        assert!(s.left.iter().all(|&x| x > 0.0));
        assert!(s.restart_deviation <= 1e-8);
        assert!(s.left_right_gap <= 1e-9);
        assert!(s.eigenvalue > 6.0 && s.eigenvalue < 7.0);
    }

    #[test]
    fn growth_starts_one_eight_fifty_six() {
        let rows = growth_counts(&matrix(), 3);
        let sizes: Vec<u64> = rows
            .iter()
            .map(|r| r.sphere_size.to_u64_digits().first().copied().unwrap_or(0))
            .collect();
        assert_eq!(sizes, vec![1, 8, 56, 392]);
    }

    #[test]
    fn word_counts_dominate_element_counts() {
        let m = matrix();
        let words = geodesic_word_counts(&m, 6);
        let elements = growth_counts(&m, 6);
        for n in 0..=3 {
            assert_eq!(words[n], elements[n].sphere_size);
        }
        for n in 4..=6 {
            assert!(words[n] > elements[n].sphere_size);
        }
    }
}
