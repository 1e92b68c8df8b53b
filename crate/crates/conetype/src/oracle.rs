//! Ground-truth brute-force engine: BFS balls of the Cayley graph, the
//! geodesic DAG, cones, and bounded-depth cone-type fingerprints.
//!
//! The ball stores one node per group element, keyed by canonical word, with
//! the full predecessor structure `(p, a)` where `p * a = element` and
//! `|p| = |element| - 1`. Construction is single-threaded and deterministic;
//! a completed ball is immutable and safe for concurrent reads.

use std::collections::HashMap;
use std::fmt::Write as _;

use smallvec::SmallVec;

use crate::element::GroupElement;
use crate::error::{Error, Result};
use crate::relator::RelatorTable;
use crate::word::Word;

/// Resource guard for ball construction.
#[derive(Debug, Clone)]
pub struct BallConfig {
    /// Hard cap on the total number of elements.
    pub max_elements: usize,
}

impl Default for BallConfig {
    fn default() -> Self {
        // Radius 7 at genus 2 is ~1.1e6 elements; the cap leaves an order of
        // magnitude of headroom.
        BallConfig { max_elements: 20_000_000 }
    }
}

/// One element of a ball: canonical word, distance, and predecessors in the
/// geodesic DAG.
#[derive(Debug, Clone)]
pub struct BallNode {
    pub word: Word,
    pub dist: u8,
    /// `(node index, letter)` pairs with `pred * letter = self`.
    pub preds: SmallVec<[(u32, u8); 2]>,
}

/// BFS ball of the Cayley graph around the identity.
#[derive(Debug)]
pub struct Ball {
    radius: usize,
    nodes: Vec<BallNode>,
    index: HashMap<Word, u32>,
    /// `sphere_start[d]..sphere_start[d + 1]` indexes sphere `d`.
    sphere_start: Vec<usize>,
}

impl Ball {
    /// Breadth-first construction out to `radius`.
    pub fn build(rt: &RelatorTable, radius: usize, cfg: &BallConfig) -> Result<Ball> {
        let half = rt.genus().half_relator_len();
        let n_letters = rt.alphabet().size() as u8;
        let mut nodes = vec![BallNode { word: Word::empty(), dist: 0, preds: SmallVec::new() }];
        let mut index: HashMap<Word, u32> = HashMap::new();
        index.insert(Word::empty(), 0);
        let mut sphere_start = vec![0usize, 1];

        for d in 0..radius {
            let (lo, hi) = (sphere_start[d], sphere_start[d + 1]);
            let projected = nodes.len() + (hi - lo) * (n_letters as usize);
            if projected > cfg.max_elements {
                return Err(Error::ResourceCap { radius, cap: cfg.max_elements });
            }
            for u_idx in lo..hi {
                let u_word = nodes[u_idx].word.clone();
                let back = u_word.last().map(|l| rt.alphabet().inverse_rank(l));
                for a in 0..n_letters {
                    if back == Some(a) {
                        continue;
                    }
                    let w = u_word.appended(a);
                    if rt.longest_window_suffix(&w) > half {
                        // Over-half run: the edge points back toward the
                        // identity.
                        continue;
                    }
                    let Some(canon) = rt.canonical_if_geodesic(&w) else {
                        // A twin swap shortens the appended word, so this
                        // edge points inward as well.
                        continue;
                    };
                    match index.get(&canon) {
                        Some(&v_idx) => {
                            let node = &mut nodes[v_idx as usize];
                            // Rediscovery must land on the same sphere and
                            // the same canonical word; a mismatch would
                            // falsify the twin-swap closure.
                            assert_eq!(node.dist as usize, d + 1, "sphere mismatch during BFS");
                            node.preds.push((u_idx as u32, a));
                        }
                        None => {
                            let v_idx = nodes.len() as u32;
                            nodes.push(BallNode {
                                word: canon.clone(),
                                dist: (d + 1) as u8,
                                preds: SmallVec::from_slice(&[(u_idx as u32, a)]),
                            });
                            index.insert(canon, v_idx);
                        }
                    }
                }
            }
            sphere_start.push(nodes.len());
        }
        Ok(Ball { radius, nodes, index, sphere_start })
    }

    pub fn radius(&self) -> usize {
        self.radius
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[BallNode] {
        &self.nodes
    }

    pub fn node(&self, idx: u32) -> &BallNode {
        &self.nodes[idx as usize]
    }

    /// The group element of a node (ball words are canonical).
    pub fn element_at(&self, idx: u32) -> GroupElement {
        GroupElement::from_canonical(self.nodes[idx as usize].word.clone())
    }

    pub fn sphere_sizes(&self) -> Vec<usize> {
        (0..=self.radius).map(|d| self.sphere_start[d + 1] - self.sphere_start[d]).collect()
    }

    pub fn sphere(&self, d: usize) -> &[BallNode] {
        &self.nodes[self.sphere_start[d]..self.sphere_start[d + 1]]
    }

    pub fn index_of(&self, x: &GroupElement) -> Option<u32> {
        self.index.get(x.word()).copied()
    }

    pub fn contains(&self, x: &GroupElement) -> bool {
        self.index.contains_key(x.word())
    }

    pub fn distance_of(&self, x: &GroupElement) -> Option<usize> {
        self.index_of(x).map(|i| self.nodes[i as usize].dist as usize)
    }

    /// Number of geodesic words from the identity to every node, computed in
    /// one pass over the DAG (predecessors always precede their successors).
    pub fn geodesic_counts(&self) -> Vec<u64> {
        let mut counts = vec![0u64; self.nodes.len()];
        counts[0] = 1;
        for (i, node) in self.nodes.iter().enumerate().skip(1) {
            counts[i] = node.preds.iter().map(|&(p, _)| counts[p as usize]).sum();
        }
        counts
    }

    /// All geodesic words from the identity to `x`, by backward traversal of
    /// the geodesic DAG. Sorted shortlex.
    pub fn geodesic_words_to(&self, x: &GroupElement) -> Result<Vec<Word>> {
        let idx = self
            .index_of(x)
            .ok_or(Error::OutsideBall { needed: x.len(), radius: self.radius })?;
        let mut memo: HashMap<u32, Vec<Word>> = HashMap::new();
        let mut words = self.words_rec(idx, &mut memo);
        words.sort();
        Ok(words)
    }

    fn words_rec(&self, idx: u32, memo: &mut HashMap<u32, Vec<Word>>) -> Vec<Word> {
        if idx == 0 {
            return vec![Word::empty()];
        }
        if let Some(w) = memo.get(&idx) {
            return w.clone();
        }
        let mut out = Vec::new();
        for &(p, a) in &self.nodes[idx as usize].preds {
            for w in self.words_rec(p, memo) {
                out.push(w.appended(a));
            }
        }
        memo.insert(idx, out.clone());
        out
    }

    /// Forward adjacency of the geodesic DAG in compressed form.
    pub fn forward_edges(&self) -> ForwardEdges {
        let mut degree = vec![0u32; self.nodes.len()];
        for node in &self.nodes {
            for &(p, _) in &node.preds {
                degree[p as usize] += 1;
            }
        }
        let mut offsets = vec![0u32; self.nodes.len() + 1];
        for i in 0..self.nodes.len() {
            offsets[i + 1] = offsets[i] + degree[i];
        }
        let mut cursor = offsets.clone();
        let mut targets = vec![0u32; offsets[self.nodes.len()] as usize];
        for (i, node) in self.nodes.iter().enumerate() {
            for &(p, _) in &node.preds {
                targets[cursor[p as usize] as usize] = i as u32;
                cursor[p as usize] += 1;
            }
        }
        ForwardEdges { offsets, targets }
    }

    /// Membership marks for the cone of the vertex `x`: every node reachable
    /// from `x` along the geodesic DAG (including `x` itself).
    pub fn cone_of_vertex(&self, x: &GroupElement) -> Option<Vec<bool>> {
        let root = self.index_of(x)?;
        let mut marks = vec![false; self.nodes.len()];
        marks[root as usize] = true;
        for i in root as usize + 1..self.nodes.len() {
            marks[i] = self.nodes[i].preds.iter().any(|&(p, _)| marks[p as usize]);
        }
        Some(marks)
    }

    /// DOT rendering of the geodesic DAG: vertices labeled by normal form,
    /// edges by generator.
    pub fn to_dot(&self, rt: &RelatorTable) -> String {
        let ab = rt.alphabet();
        let mut out = String::from("digraph ball {\n  rankdir=LR;\n");
        for node in &self.nodes {
            let label = if node.word.is_empty() { "e".to_string() } else { ab.format_word(&node.word) };
            let _ = writeln!(out, "  \"{label}\";");
        }
        for node in &self.nodes {
            let to = if node.word.is_empty() { "e".to_string() } else { ab.format_word(&node.word) };
            for &(p, a) in &node.preds {
                let pw = &self.nodes[p as usize].word;
                let from = if pw.is_empty() { "e".to_string() } else { ab.format_word(pw) };
                let _ = writeln!(out, "  \"{from}\" -> \"{to}\" [label=\"{}\"];", ab.name(crate::alphabet::Generator(a)));
            }
        }
        out.push_str("}\n");
        out
    }
}

/// Successor adjacency of a ball's geodesic DAG (CSR layout).
#[derive(Debug)]
pub struct ForwardEdges {
    offsets: Vec<u32>,
    targets: Vec<u32>,
}

impl ForwardEdges {
    pub fn successors(&self, idx: u32) -> &[u32] {
        &self.targets[self.offsets[idx as usize] as usize..self.offsets[idx as usize + 1] as usize]
    }
}

/// Cone-type membership: `d(e, x z) = |x| + |z|`.
pub fn cone_membership(rt: &RelatorTable, x: &GroupElement, z: &GroupElement) -> bool {
    rt.element_length(&x.word().concat(z.word())) == x.len() + z.len()
}

/// Bounded-depth cone-type fingerprint: the set of ball elements that lie in
/// the cone type of `x`. Members are stored as ascending node indices of the
/// ball the fingerprint was computed against, so fingerprints are only
/// comparable across one ball.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Fingerprint {
    depth: usize,
    member_indices: Vec<u32>,
}

impl Fingerprint {
    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn member_indices(&self) -> &[u32] {
        &self.member_indices
    }

    pub fn members<'b>(&'b self, ball: &'b Ball) -> impl Iterator<Item = GroupElement> + 'b {
        self.member_indices.iter().map(|&i| GroupElement::from_canonical(ball.node(i).word.clone()))
    }

    /// Subset test; both fingerprints must come from the same ball.
    pub fn is_subset_of(&self, other: &Fingerprint) -> bool {
        let mut it = other.member_indices.iter().peekable();
        'outer: for &m in &self.member_indices {
            while let Some(&&o) = it.peek() {
                match o.cmp(&m) {
                    std::cmp::Ordering::Less => {
                        it.next();
                    }
                    std::cmp::Ordering::Equal => continue 'outer,
                    std::cmp::Ordering::Greater => return false,
                }
            }
            return false;
        }
        true
    }
}

/// Depth-`ball.radius()` fingerprint of `x`.
pub fn fingerprint(rt: &RelatorTable, ball: &Ball, x: &GroupElement) -> Fingerprint {
    let mut member_indices = Vec::new();
    for (i, node) in ball.nodes().iter().enumerate() {
        if rt.element_length(&x.word().concat(&node.word)) == x.len() + node.word.len() {
            member_indices.push(i as u32);
        }
    }
    Fingerprint { depth: ball.radius(), member_indices }
}

/// All geodesic words representing `y`, via a ball of radius `|y|`.
pub fn enumerate_geodesics(rt: &RelatorTable, y: &GroupElement, cfg: &BallConfig) -> Result<Vec<Word>> {
    let ball = Ball::build(rt, y.len(), cfg)?;
    ball.geodesic_words_to(y)
}

/// One half-relator occurrence inside a geodesic word of some element.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct QuadrupleOccurrence {
    /// The geodesic word containing the occurrence.
    pub word: Word,
    /// 0-based start of the half-relator window.
    pub start: usize,
    /// The window itself.
    pub quadruple: Word,
}

/// Every half-relator window in every geodesic word of `y`. Empty exactly
/// when `y` has a unique geodesic.
pub fn quadruple_occurrences(rt: &RelatorTable, y: &GroupElement) -> Vec<QuadrupleOccurrence> {
    let half = rt.genus().half_relator_len();
    let mut out = Vec::new();
    for w in rt.geodesic_class(y.word()).expect("canonical word is geodesic") {
        if w.len() < half {
            continue;
        }
        let mut prev_start: Option<usize> = None;
        for start in 0..=w.len() - half {
            let q = w.subword(start, half);
            if rt.is_in_r(&q) {
                // Two occurrences in one word overlap in at most one letter.
                if let Some(p) = prev_start {
                    debug_assert!(start >= p + half - 1, "overlapping windows share more than one letter");
                }
                prev_start = Some(start);
                out.push(QuadrupleOccurrence { word: w.clone(), start, quadruple: q });
            }
        }
    }
    out.sort();
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::alphabet::Genus;

    fn rt() -> RelatorTable {
        RelatorTable::new(Genus::new(2).unwrap())
    }

    #[test]
    fn small_sphere_sizes() {
        let rt = rt();
        let ball = Ball::build(&rt, 2, &BallConfig::default()).unwrap();
        assert_eq!(ball.sphere_sizes(), vec![1, 8, 56]);
        let b0 = Ball::build(&rt, 0, &BallConfig::default()).unwrap();
        assert_eq!(b0.sphere_sizes(), vec![1]);
    }

    #[test]
    fn resource_guard_fires() {
        let rt = rt();
        let err = Ball::build(&rt, 4, &BallConfig { max_elements: 100 }).unwrap_err();
        assert!(matches!(err, Error::ResourceCap { .. }));
    }

    #[test]
    fn ball_distances_match_word_lengths() {
        let rt = rt();
        let ball = Ball::build(&rt, 4, &BallConfig::default()).unwrap();
        for node in ball.nodes() {
            assert!(rt.is_geodesic(&node.word));
            assert_eq!(node.word.len(), node.dist as usize);
            for &(p, a) in &node.preds {
                let pred = ball.node(p);
                assert_eq!(pred.dist + 1, node.dist);
                let prod = rt.normal_form(&pred.word.appended(a));
                assert_eq!(prod.word(), &node.word);
            }
        }
    }

    #[test]
    fn cone_membership_examples() {
        let rt = rt();
        let a = rt.element_of("a").unwrap();
        let ba = rt.element_of("ba").unwrap();
        let z = rt.element_of("BAd").unwrap();
        assert!(cone_membership(&rt, &a, &z));
        assert!(!cone_membership(&rt, &ba, &z));
        let e = GroupElement::identity();
        assert!(cone_membership(&rt, &ba, &e));
    }

    #[test]
    fn fingerprints_of_equal_cone_types_agree() {
        let rt = rt();
        let ball = Ball::build(&rt, 4, &BallConfig::default()).unwrap();
        let f_bc = fingerprint(&rt, &ball, &rt.element_of("bc").unwrap());
        let f_c = fingerprint(&rt, &ball, &rt.element_of("c").unwrap());
        assert_eq!(f_bc, f_c);
        // The identity's cone type is everything.
        let f_e = fingerprint(&rt, &ball, &GroupElement::identity());
        assert_eq!(f_e.member_indices().len(), ball.len());
    }

    #[test]
    fn geodesic_enumeration_examples() {
        let rt = rt();
        let cfg = BallConfig::default();
        let y = rt.element_of("abABAdc").unwrap();
        let words = enumerate_geodesics(&rt, &y, &cfg).unwrap();
        assert_eq!(words.len(), 3);
        assert_eq!(words, rt.geodesic_class(y.word()).unwrap());
        assert_eq!(enumerate_geodesics(&rt, &rt.element_of("a").unwrap(), &cfg).unwrap().len(), 1);
        assert_eq!(enumerate_geodesics(&rt, &rt.element_of("abAB").unwrap(), &cfg).unwrap().len(), 2);
    }

    #[test]
    fn quadruple_occurrence_examples() {
        let rt = rt();
        let ab = rt.alphabet();
        let y = rt.element_of("abABAdc").unwrap();
        let occs = quadruple_occurrences(&rt, &y);
        let readable: Vec<(String, usize, String)> = occs
            .iter()
            .map(|o| (ab.format_word(&o.word), o.start, ab.format_word(&o.quadruple)))
            .collect();
        assert!(readable.contains(&("abABAdc".into(), 0, "abAB".into())));
        assert!(readable.contains(&("abABAdc".into(), 3, "BAdc".into())));
        // In the twin-rewritten form the count drops to one.
        let in_dc_form: Vec<_> = readable.iter().filter(|(w, _, _)| w == "dcDCAdc").collect();
        assert_eq!(in_dc_form.len(), 1);
        assert_eq!(in_dc_form[0].1, 0);
        // No relator subword anywhere: no occurrences, unique geodesic.
        let abc = rt.element_of("abc").unwrap();
        assert!(quadruple_occurrences(&rt, &abc).is_empty());
        assert_eq!(rt.geodesic_class(abc.word()).unwrap().len(), 1);
    }

    #[test]
    fn dot_export_mentions_vertices_and_edges() {
        let rt = rt();
        let ball = Ball::build(&rt, 1, &BallConfig::default()).unwrap();
        let dot = ball.to_dot(&rt);
        assert!(dot.starts_with("digraph"));
        assert!(dot.contains("\"e\" -> \"a\" [label=\"a\"]"));
    }
}
