//! Cone-type representatives, the suffix-cascade classifier, and the
//! oracle-backed classifier used to validate it.
//!
//! The nonidentity cone types are indexed by the subwords of length at most
//! `2g` of the cyclic permutations of the relator and of its inverse. For
//! lengths below `2g` the two cycles yield disjoint words; at length `2g`
//! each word of the relator cycle and its twin from the inverse cycle
//! represent the same group element and share one type. Representatives are
//! ordered by length, then by first letter in the generator order, with the
//! relator-cycle window before the inverse-cycle window; for genus 2 this is
//! exactly the standard 48-row table.

use std::collections::HashMap;

use serde::Serialize;

use crate::alphabet::Generator;
use crate::element::GroupElement;
use crate::error::{Error, Result};
use crate::oracle::{fingerprint, Ball, BallConfig, Fingerprint};
use crate::relator::{Cycle, RelatorTable};
use crate::word::Word;

/// Index of a cone type: 0 is the identity's type, positive ids follow the
/// table order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct ConeTypeId(pub u16);

impl ConeTypeId {
    pub const IDENTITY: ConeTypeId = ConeTypeId(0);

    pub fn get(self) -> u16 {
        self.0
    }
}

/// Enumerate the cone-type representatives for any genus, in table order.
/// Returns `8g(2g - 1)` words.
pub fn enumerate_representatives(rt: &RelatorTable) -> Vec<Word> {
    let half = rt.genus().half_relator_len();
    let n_letters = rt.alphabet().size() as u8;
    let mut reps = Vec::with_capacity(8 * rt.genus().get() as usize * (2 * rt.genus().get() as usize - 1));
    for len in 1..=half {
        for l in 0..n_letters {
            reps.push(rt.window(Cycle::Relator, l, len));
            if len > 1 && len < half {
                reps.push(rt.window(Cycle::InverseRelator, l, len));
            }
        }
    }
    // Within one length the table interleaves the two cycles per first
    // letter; restore that interleaving.
    let mut ordered = Vec::with_capacity(reps.len());
    for len in 1..=half {
        for l in 0..n_letters {
            for w in &reps {
                if w.len() == len && w.letters()[0] == l {
                    ordered.push(w.clone());
                }
            }
        }
    }
    ordered
}

#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum LengthClass {
    Identity,
    Single,
    Double,
    Triple,
    Quadruple,
    /// Representative lengths beyond 4 (genus above 2).
    Longer(usize),
}

/// The cone-type table: representatives, the successor map, and per-type
/// out-degrees.
#[derive(Debug)]
pub struct ConeTypeTable {
    rt_genus: u32,
    reps: Vec<Word>,
    /// Word (including half-relator twins) to id.
    word_to_id: HashMap<Word, u16>,
    /// Twin word of each half-relator representative, by id.
    twins: HashMap<u16, Word>,
    /// `successor[id][letter]`, present when the cascade is supported.
    successor: Option<Vec<Vec<Option<u16>>>>,
}

impl ConeTypeTable {
    pub fn build(rt: &RelatorTable) -> ConeTypeTable {
        let half = rt.genus().half_relator_len();
        let reps = enumerate_representatives(rt);
        let mut word_to_id = HashMap::new();
        let mut twins = HashMap::new();
        for (i, w) in reps.iter().enumerate() {
            let id = (i + 1) as u16;
            word_to_id.insert(w.clone(), id);
            if w.len() == half {
                let t = rt.twin(w).expect("representative is a half relator");
                word_to_id.insert(t.clone(), id);
                twins.insert(id, t);
            }
        }
        let mut table = ConeTypeTable {
            rt_genus: rt.genus().get(),
            reps,
            word_to_id,
            twins,
            successor: None,
        };
        if table.cascade_supported() {
            table.successor = Some(table.build_successors(rt));
        }
        table
    }

    fn cascade_supported(&self) -> bool {
        self.rt_genus == 2 || cfg!(feature = "generic-cascade")
    }

    /// Number of nonidentity cone types, `8g(2g - 1)`.
    pub fn count(&self) -> usize {
        self.reps.len()
    }

    pub fn representatives(&self) -> &[Word] {
        &self.reps
    }

    /// Representative word of a nonidentity type.
    pub fn representative(&self, c: ConeTypeId) -> Option<&Word> {
        if c.0 == 0 {
            None
        } else {
            self.reps.get(c.0 as usize - 1)
        }
    }

    /// Twin of a half-relator representative.
    pub fn twin_of(&self, c: ConeTypeId) -> Option<&Word> {
        self.twins.get(&c.0)
    }

    /// Id of a member of R (half-relator twins map to their shared id).
    pub fn id_of_word(&self, w: &Word) -> Option<ConeTypeId> {
        self.word_to_id.get(w).copied().map(ConeTypeId)
    }

    pub fn length_of(&self, c: ConeTypeId) -> usize {
        self.representative(c).map_or(0, Word::len)
    }

    pub fn length_class(&self, c: ConeTypeId) -> LengthClass {
        match self.length_of(c) {
            0 => LengthClass::Identity,
            1 => LengthClass::Single,
            2 => LengthClass::Double,
            3 => LengthClass::Triple,
            4 => LengthClass::Quadruple,
            n => LengthClass::Longer(n),
        }
    }

    fn build_successors(&self, rt: &RelatorTable) -> Vec<Vec<Option<u16>>> {
        let n_letters = rt.alphabet().size();
        let mut map = Vec::with_capacity(self.count() + 1);
        for c in 0..=self.count() as u16 {
            let row: Vec<Option<u16>> = (0..n_letters as u8)
                .map(|a| self.successor_of(rt, c, a))
                .collect();
            map.push(row);
        }
        map
    }

    /// The suffix cascade. `None` when `a` leaves the cone of the
    /// representative.
    fn successor_of(&self, rt: &RelatorTable, c: u16, a: u8) -> Option<u16> {
        let ab = rt.alphabet();
        let half = rt.genus().half_relator_len();
        if c == 0 {
            return Some(self.word_to_id[&Word::single(a)]);
        }
        let z = &self.reps[c as usize - 1];
        let last = z.last().expect("representative is nonempty");
        if z.len() < half {
            if a == ab.inverse_rank(last) {
                return None;
            }
            // Longest-suffix preference: extend the window, else restart a
            // double from the last letter, else fall back to the single.
            let za = z.appended(a);
            if rt.is_in_r(&za) {
                return Some(self.word_to_id[&za]);
            }
            let pair = Word::from_ranks(vec![last, a]);
            if rt.is_in_r(&pair) {
                return Some(self.word_to_id[&pair]);
            }
            Some(self.word_to_id[&Word::single(a)])
        } else {
            let twin = &self.twins[&c];
            let twin_last = twin.last().expect("twin is nonempty");
            if a == ab.inverse_rank(last) || a == ab.inverse_rank(twin_last) {
                return None;
            }
            let via_rep = Word::from_ranks(vec![last, a]);
            let via_twin = Word::from_ranks(vec![twin_last, a]);
            let hit_rep = rt.is_in_r(&via_rep).then(|| self.word_to_id[&via_rep]);
            let hit_twin = rt.is_in_r(&via_twin).then(|| self.word_to_id[&via_twin]);
            match (hit_rep, hit_twin) {
                (Some(r), Some(t)) => {
                    assert_eq!(r, t, "half-relator suffix rules disagree");
                    Some(r)
                }
                (Some(r), None) => Some(r),
                (None, Some(t)) => Some(t),
                (None, None) => Some(self.word_to_id[&Word::single(a)]),
            }
        }
    }

    /// Whether the suffix cascade (and hence `successor`/`classify`) is
    /// available for this genus.
    pub fn has_cascade(&self) -> bool {
        self.successor.is_some()
    }

    /// Cone type of the `a`-successor, or `None` when there is no edge.
    ///
    /// Panics if the cascade is unavailable for this genus.
    pub fn successor(&self, c: ConeTypeId, a: Generator) -> Option<ConeTypeId> {
        let map = self
            .successor
            .as_ref()
            .expect("suffix cascade is unavailable for this genus");
        map[c.0 as usize][a.index()].map(ConeTypeId)
    }

    pub fn out_degree(&self, c: ConeTypeId) -> usize {
        let map = self
            .successor
            .as_ref()
            .expect("suffix cascade is unavailable for this genus");
        map[c.0 as usize].iter().filter(|s| s.is_some()).count()
    }

    /// Cone type of an element: walk the successor map along its canonical
    /// word, starting from the identity type.
    pub fn classify(&self, x: &GroupElement) -> Result<ConeTypeId> {
        if self.successor.is_none() {
            return Err(Error::UnsupportedGenus(self.rt_genus));
        }
        let map = self.successor.as_ref().expect("checked above");
        let mut c = 0u16;
        for &a in x.word().letters() {
            c = map[c as usize][a as usize].expect("canonical words walk inside cones");
        }
        Ok(ConeTypeId(c))
    }

    /// JSON export: id, representative, length class, successor row.
    pub fn to_json(&self, rt: &RelatorTable) -> serde_json::Value {
        let ab = rt.alphabet();
        let types: Vec<serde_json::Value> = (0..=self.count() as u16)
            .map(|c| {
                let id = ConeTypeId(c);
                let successors: serde_json::Map<String, serde_json::Value> = ab
                    .generators()
                    .filter_map(|a| {
                        self.successor(id, a)
                            .map(|s| (ab.name(a).to_string(), serde_json::json!(s.get())))
                    })
                    .collect();
                serde_json::json!({
                    "id": c,
                    "representative": self.representative(id).map(|w| ab.format_word(w)),
                    "length_class": self.length_class(id),
                    "out_degree": self.out_degree(id),
                    "successors": successors,
                })
            })
            .collect();
        serde_json::json!({ "genus": self.rt_genus, "count": self.count(), "types": types })
    }
}

/// Classifier backed by the brute-force oracle: an element's type is the
/// unique representative with an identical bounded-depth fingerprint.
///
/// Construction recomputes pairwise distinctness of the representative
/// fingerprints and deepens the ball if any two collide.
#[derive(Debug)]
pub struct OracleClassifier {
    ball: Ball,
    /// Fingerprints for ids `0..=count`.
    rep_prints: Vec<Fingerprint>,
    by_hash: HashMap<u64, u16>,
}

/// Working fingerprint depth; collisions deepen it automatically.
pub const DEFAULT_FINGERPRINT_DEPTH: usize = 4;

fn print_hash(fp: &Fingerprint) -> u64 {
    // FNV-1a over the member indices.
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for &i in fp.member_indices() {
        h ^= u64::from(i);
        h = h.wrapping_mul(0x1000_0000_01b3);
    }
    h
}

impl OracleClassifier {
    pub fn new(rt: &RelatorTable, table: &ConeTypeTable, cfg: &BallConfig) -> Result<Self> {
        Self::with_depth(rt, table, cfg, DEFAULT_FINGERPRINT_DEPTH)
    }

    pub fn with_depth(
        rt: &RelatorTable,
        table: &ConeTypeTable,
        cfg: &BallConfig,
        start_depth: usize,
    ) -> Result<Self> {
        let max_depth = start_depth + 3;
        let mut depth = start_depth;
        loop {
            let ball = Ball::build(rt, depth, cfg)?;
            let mut rep_prints = Vec::with_capacity(table.count() + 1);
            rep_prints.push(fingerprint(rt, &ball, &GroupElement::identity()));
            for w in table.representatives() {
                rep_prints.push(fingerprint(rt, &ball, &rt.normal_form(w)));
            }
            let mut by_hash = HashMap::new();
            let mut distinct = true;
            for (id, fp) in rep_prints.iter().enumerate() {
                if by_hash.insert(print_hash(fp), id as u16).is_some() {
                    distinct = false;
                    break;
                }
            }
            if distinct {
                return Ok(OracleClassifier { ball, rep_prints, by_hash });
            }
            depth += 1;
            if depth > max_depth {
                return Err(Error::FingerprintCollision(max_depth));
            }
        }
    }

    pub fn depth(&self) -> usize {
        self.ball.radius()
    }

    pub fn fingerprint_of(&self, rt: &RelatorTable, x: &GroupElement) -> Fingerprint {
        fingerprint(rt, &self.ball, x)
    }

    /// Ground-truth classification. Fails loudly when no representative
    /// fingerprint matches; that would falsify the finite-type table.
    pub fn classify(&self, rt: &RelatorTable, x: &GroupElement) -> Result<ConeTypeId> {
        let fp = self.fingerprint_of(rt, x);
        let id = self
            .by_hash
            .get(&print_hash(&fp))
            .copied()
            .filter(|&id| self.rep_prints[id as usize] == fp)
            .ok_or_else(|| Error::UnclassifiedElement(rt.alphabet().format_word(x.word())))?;
        Ok(ConeTypeId(id))
    }
}
