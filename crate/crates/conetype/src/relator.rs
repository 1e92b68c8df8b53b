//! Relator machinery: cyclic permutations of the relator and its inverse,
//! membership in the subword set R, twins of half-relator words, and the
//! geodesic criterion.
//!
//! Both the relator and its inverse visit every letter of the alphabet
//! exactly once, so each is a cyclic successor function on letters. A word
//! is a subword of a cyclic permutation of the relator (resp. its inverse)
//! exactly when consecutive letters follow that successor function. All
//! subword queries reduce to run-length scans against the two functions.

use crate::alphabet::{Alphabet, Genus};
use crate::error::{Error, Result};
use crate::word::Word;

/// Which of the two relator cycles a word lives in.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Cycle {
    Relator,
    InverseRelator,
}

/// Cyclic-permutation tables for the relator and its inverse, plus the
/// queries built on them.
#[derive(Debug, Clone)]
pub struct RelatorTable {
    alphabet: Alphabet,
    /// Successor of each letter inside the relator cycle.
    succ_rel: Vec<u8>,
    /// Successor of each letter inside the inverse-relator cycle.
    succ_inv: Vec<u8>,
}

impl RelatorTable {
    pub fn new(genus: Genus) -> Self {
        let alphabet = Alphabet::new(genus);
        let n = alphabet.size();
        let rel = alphabet.relator().to_vec();
        let inv_rel: Vec<u8> =
            rel.iter().rev().map(|&l| alphabet.inverse_rank(l)).collect();
        let mut succ_rel = vec![0u8; n];
        let mut succ_inv = vec![0u8; n];
        for i in 0..n {
            succ_rel[rel[i] as usize] = rel[(i + 1) % n];
            succ_inv[inv_rel[i] as usize] = inv_rel[(i + 1) % n];
        }
        RelatorTable { alphabet, succ_rel, succ_inv }
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn genus(&self) -> Genus {
        self.alphabet.genus()
    }

    fn half_len(&self) -> usize {
        self.genus().half_relator_len()
    }

    fn succ(&self, cycle: Cycle, letter: u8) -> u8 {
        match cycle {
            Cycle::Relator => self.succ_rel[letter as usize],
            Cycle::InverseRelator => self.succ_inv[letter as usize],
        }
    }

    /// Successor of `letter` in the relator cycle.
    pub fn relator_successor(&self, letter: u8) -> u8 {
        self.succ_rel[letter as usize]
    }

    /// Successor of `letter` in the inverse-relator cycle.
    pub fn inverse_relator_successor(&self, letter: u8) -> u8 {
        self.succ_inv[letter as usize]
    }

    /// The length-`len` window of `cycle` starting at `letter`.
    pub fn window(&self, cycle: Cycle, letter: u8, len: usize) -> Word {
        let mut out = Vec::with_capacity(len);
        let mut l = letter;
        for _ in 0..len {
            out.push(l);
            l = self.succ(cycle, l);
        }
        Word::from_ranks(out)
    }

    fn follows(&self, cycle: Cycle, w: &Word) -> bool {
        w.letters().windows(2).all(|p| self.succ(cycle, p[0]) == p[1])
    }

    /// Which cycle `w` is a window of, if any. Nonempty words of length >= 2
    /// lie in at most one cycle; single letters lie in both and report
    /// `Relator`.
    pub fn window_cycle(&self, w: &Word) -> Option<Cycle> {
        if w.is_empty() {
            return None;
        }
        if self.follows(Cycle::Relator, w) {
            Some(Cycle::Relator)
        } else if self.follows(Cycle::InverseRelator, w) {
            Some(Cycle::InverseRelator)
        } else {
            None
        }
    }

    /// Membership in R: `w` is a nonempty subword, of length at most `2g`,
    /// of a cyclic permutation of the relator or of its inverse. Longer
    /// words are not members by convention.
    pub fn is_in_r(&self, w: &Word) -> bool {
        !w.is_empty() && w.len() <= self.half_len() && self.window_cycle(w).is_some()
    }

    /// Twin of a half-relator word: the inverse of the complementary half of
    /// the cyclic permutation `q` starts. Represents the same group element
    /// by a different word.
    pub fn twin(&self, q: &Word) -> Result<Word> {
        if q.len() != self.half_len() {
            return Err(Error::NotHalfRelator(self.alphabet.format_word(q)));
        }
        let cycle = self
            .window_cycle(q)
            .ok_or_else(|| Error::NotHalfRelator(self.alphabet.format_word(q)))?;
        let mut l = q.last().expect("half relator is nonempty");
        let mut complement = Vec::with_capacity(self.half_len());
        for _ in 0..self.half_len() {
            l = self.succ(cycle, l);
            complement.push(l);
        }
        Ok(complement.iter().rev().map(|&x| self.alphabet.inverse_rank(x)).collect())
    }

    /// Length of the longest suffix of `w` that is a window of some cycle.
    pub(crate) fn longest_window_suffix(&self, w: &Word) -> usize {
        if w.is_empty() {
            return 0;
        }
        let letters = w.letters();
        let mut rel_run = 1usize;
        let mut inv_run = 1usize;
        for i in 1..letters.len() {
            rel_run = if self.succ_rel[letters[i - 1] as usize] == letters[i] { rel_run + 1 } else { 1 };
            inv_run = if self.succ_inv[letters[i - 1] as usize] == letters[i] { inv_run + 1 } else { 1 };
        }
        rel_run.max(inv_run)
    }

    /// Longest run inside either cycle anywhere in `w`, with its start.
    fn longest_window_run(&self, w: &Word) -> (usize, usize) {
        let letters = w.letters();
        if letters.is_empty() {
            return (0, 0);
        }
        let mut best = (1usize, 0usize);
        for succ_of in [&self.succ_rel, &self.succ_inv] {
            let mut run = 1usize;
            for i in 1..letters.len() {
                run = if succ_of[letters[i - 1] as usize] == letters[i] { run + 1 } else { 1 };
                if run > best.0 {
                    best = (run, i + 1 - run);
                }
            }
        }
        best
    }

    fn is_freely_reduced(&self, w: &Word) -> bool {
        w.letters()
            .windows(2)
            .all(|p| self.alphabet.inverse_rank(p[0]) != p[1])
    }

    /// Freely reduced with no over-half relator run: nothing shortens the
    /// word in place.
    fn is_locally_reduced(&self, w: &Word) -> bool {
        self.is_freely_reduced(w) && self.longest_window_run(w).0 <= self.half_len()
    }

    /// One in-place shortening step, if any applies: free reduction, or the
    /// replacement of an over-half relator run by the inverse of its
    /// complement.
    fn shorten_once(&self, w: &Word) -> Option<Word> {
        if !self.is_freely_reduced(w) {
            return Some(self.alphabet.free_reduce(w));
        }
        let relator_len = self.genus().relator_len();
        let (run, start) = self.longest_window_run(w);
        if run <= self.half_len() {
            return None;
        }
        let len = run.min(relator_len);
        let window = w.subword(start, len);
        let cycle = self.window_cycle(&window).expect("run is a window");
        // Remaining letters of the window's cyclic permutation.
        let mut l = window.last().expect("nonempty window");
        let mut complement = Vec::with_capacity(relator_len - len);
        for _ in 0..relator_len - len {
            l = self.succ(cycle, l);
            complement.push(l);
        }
        let replacement: Vec<u8> =
            complement.iter().rev().map(|&x| self.alphabet.inverse_rank(x)).collect();
        Some(self.alphabet.free_reduce(&w.splice(start, len, &replacement)))
    }

    /// Walk the twin-swap closure of a locally reduced word. Either every
    /// member is locally reduced too, in which case the closure is the full
    /// set of geodesic words of the element, or some swap exposes a
    /// shortening and the word was not geodesic.
    ///
    /// Plain local reduction is not a geodesic test: a half-relator window
    /// followed by four letters continuing its twin's cycle hides an
    /// over-half run behind a swap (shortest examples have eight letters).
    pub(crate) fn explore_closure(&self, start: &Word) -> ClosureOutcome {
        debug_assert!(self.is_locally_reduced(start));
        let half = self.half_len();
        let mut members = vec![start.clone()];
        let mut cursor = 0;
        while cursor < members.len() {
            let u = members[cursor].clone();
            cursor += 1;
            if u.len() < half {
                continue;
            }
            for pos in 0..=u.len() - half {
                let q = u.subword(pos, half);
                if self.window_cycle(&q).is_some() {
                    let flipped =
                        u.splice(pos, half, self.twin(&q).expect("q is a half window").letters());
                    if !self.is_locally_reduced(&flipped) {
                        return ClosureOutcome::Shortens(flipped);
                    }
                    if !members.contains(&flipped) {
                        members.push(flipped);
                    }
                }
            }
        }
        ClosureOutcome::Clean { members }
    }

    /// Word-level geodesic test: freely reduced, no contiguous subword of
    /// length `2g + 1` or more inside a cyclic permutation of the relator or
    /// its inverse, and no twin swap exposing such a subword. Cross-validated
    /// against the brute-force ball.
    pub fn is_geodesic(&self, w: &Word) -> bool {
        self.is_locally_reduced(w)
            && matches!(self.explore_closure(w), ClosureOutcome::Clean { .. })
    }

    /// Rewrite `w` into a geodesic word for the same group element: freely
    /// reduce, replace over-half relator runs by the inverse of their
    /// complement, and chase twin swaps that expose further shortenings,
    /// until nothing shrinks.
    pub fn dehn_reduce(&self, w: &Word) -> Word {
        let mut cur = self.alphabet.free_reduce(w);
        loop {
            while let Some(shorter) = self.shorten_once(&cur) {
                cur = shorter;
            }
            match self.explore_closure(&cur) {
                ClosureOutcome::Clean { .. } => return cur,
                ClosureOutcome::Shortens(next) => cur = next,
            }
        }
    }

    /// Geodesic length of the group element represented by `w`.
    pub fn element_length(&self, w: &Word) -> usize {
        self.dehn_reduce(w).len()
    }

    /// For a locally reduced candidate: its shortlex-least geodesic form if
    /// it is geodesic, `None` if some twin swap shortens it.
    pub(crate) fn canonical_if_geodesic(&self, w: &Word) -> Option<Word> {
        match self.explore_closure(w) {
            ClosureOutcome::Clean { members } => members.into_iter().min(),
            ClosureOutcome::Shortens(_) => None,
        }
    }
}

/// Outcome of walking a twin-swap closure.
#[derive(Debug)]
pub(crate) enum ClosureOutcome {
    /// Every member is locally reduced; the word is geodesic.
    Clean { members: Vec<Word> },
    /// A swap produced a shortenable word.
    Shortens(Word),
}
