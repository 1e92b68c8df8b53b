//! Canonical normal forms and the word metric.
//!
//! The canonical form of an element is the shortlex-least geodesic word
//! representing it. Geodesic words of one element are connected by swapping
//! half-relator subwords with their twins, so the canonical form is the
//! minimum of that swap closure; the closure itself is exposed as
//! `geodesic_class` and is cross-checked against brute-force path
//! enumeration in the oracle tests.

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::relator::RelatorTable;
use crate::word::Word;

/// A group element, held as its canonical (shortlex-least geodesic) word.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GroupElement {
    word: Word,
}

impl GroupElement {
    pub fn identity() -> Self {
        GroupElement { word: Word::empty() }
    }

    /// The canonical word. Its length is the word-metric length.
    pub fn word(&self) -> &Word {
        &self.word
    }

    pub fn len(&self) -> usize {
        self.word.len()
    }

    pub fn is_identity(&self) -> bool {
        self.word.is_empty()
    }

    pub fn is_empty(&self) -> bool {
        self.word.is_empty()
    }

    /// Wrap a word already known to be canonical (ball internals).
    pub(crate) fn from_canonical(word: Word) -> Self {
        GroupElement { word }
    }
}

impl RelatorTable {
    /// All geodesic words representing the same element as the geodesic word
    /// `w`: the closure of `{w}` under replacing half-relator subwords by
    /// their twins. Sorted shortlex.
    pub fn geodesic_class(&self, w: &Word) -> Result<Vec<Word>> {
        if !self.is_geodesic(w) {
            return Err(Error::NotGeodesic(self.alphabet().format_word(w)));
        }
        match self.explore_closure(w) {
            crate::relator::ClosureOutcome::Clean { members } => {
                let sorted: BTreeSet<Word> = members.into_iter().collect();
                Ok(sorted.into_iter().collect())
            }
            crate::relator::ClosureOutcome::Shortens(_) => {
                Err(Error::NotGeodesic(self.alphabet().format_word(w)))
            }
        }
    }

    /// Canonical form of the element represented by an arbitrary word.
    pub fn normal_form(&self, w: &Word) -> GroupElement {
        let geodesic = self.dehn_reduce(w);
        let word = self
            .canonical_if_geodesic(&geodesic)
            .expect("fully reduced words are geodesic");
        GroupElement { word }
    }

    pub fn element_of(&self, s: &str) -> Result<GroupElement> {
        Ok(self.normal_form(&self.alphabet().parse_word(s)?))
    }

    pub fn multiply(&self, x: &GroupElement, y: &GroupElement) -> GroupElement {
        self.normal_form(&x.word().concat(y.word()))
    }

    pub fn invert(&self, x: &GroupElement) -> GroupElement {
        self.normal_form(&self.alphabet().inverse_word(x.word()))
    }

    /// Word metric: `d(x, y) = |x⁻¹ y|`.
    pub fn distance(&self, x: &GroupElement, y: &GroupElement) -> usize {
        self.element_length(&self.alphabet().inverse_word(x.word()).concat(y.word()))
    }
}
