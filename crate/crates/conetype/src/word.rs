//! Words over the symmetric alphabet, in rank encoding.

use smallvec::SmallVec;
use std::cmp::Ordering;

/// A finite sequence of generators (possibly empty). Letters are stored as
/// order ranks, so plain byte comparison is comparison in the generator
/// order; `Ord` is shortlex (length first, then letters).
///
/// Words up to 16 letters live inline, which covers every radius reachable
/// under the default resource cap.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Word {
    letters: SmallVec<[u8; 16]>,
}

impl Word {
    pub fn empty() -> Self {
        Word::default()
    }

    pub fn from_ranks(ranks: impl Into<SmallVec<[u8; 16]>>) -> Self {
        Word { letters: ranks.into() }
    }

    pub fn single(rank: u8) -> Self {
        Word::from_ranks(vec![rank])
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn letters(&self) -> &[u8] {
        &self.letters
    }

    pub fn last(&self) -> Option<u8> {
        self.letters.last().copied()
    }

    pub fn push(&mut self, rank: u8) {
        self.letters.push(rank);
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut letters = self.letters.clone();
        letters.extend_from_slice(&other.letters);
        Word { letters }
    }

    pub fn appended(&self, rank: u8) -> Word {
        let mut w = self.clone();
        w.push(rank);
        w
    }

    pub fn subword(&self, start: usize, len: usize) -> Word {
        Word::from_ranks(self.letters[start..start + len].to_vec())
    }

    pub fn prefix(&self, len: usize) -> Word {
        self.subword(0, len)
    }

    pub fn suffix(&self, len: usize) -> Word {
        self.subword(self.len() - len, len)
    }

    /// Replace `count` letters starting at `start` with `replacement`.
    pub fn splice(&self, start: usize, count: usize, replacement: &[u8]) -> Word {
        let mut letters: SmallVec<[u8; 16]> = SmallVec::with_capacity(self.len() - count + replacement.len());
        letters.extend_from_slice(&self.letters[..start]);
        letters.extend_from_slice(replacement);
        letters.extend_from_slice(&self.letters[start + count..]);
        Word { letters }
    }
}

impl Ord for Word {
    fn cmp(&self, other: &Self) -> Ordering {
        // Shortlex: by length, then by rank sequence.
        self.len().cmp(&other.len()).then_with(|| self.letters.cmp(&other.letters))
    }
}

impl PartialOrd for Word {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl FromIterator<u8> for Word {
    fn from_iter<T: IntoIterator<Item = u8>>(iter: T) -> Self {
        Word { letters: iter.into_iter().collect() }
    }
}

impl FromIterator<crate::alphabet::Generator> for Word {
    fn from_iter<T: IntoIterator<Item = crate::alphabet::Generator>>(iter: T) -> Self {
        iter.into_iter().map(|g| g.0).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shortlex_orders_by_length_first() {
        let a = Word::from_ranks(vec![7, 7]);
        let b = Word::from_ranks(vec![0, 0, 0]);
        assert!(a < b);
        let c = Word::from_ranks(vec![0, 1]);
        let d = Word::from_ranks(vec![0, 2]);
        assert!(c < d);
    }

    #[test]
    fn concat_is_associative_with_empty_unit() {
        let u = Word::from_ranks(vec![1, 2]);
        let v = Word::from_ranks(vec![3]);
        let w = Word::from_ranks(vec![4, 5]);
        assert_eq!(u.concat(&v).concat(&w), u.concat(&v.concat(&w)));
        assert_eq!(u.concat(&Word::empty()), u);
        assert_eq!(Word::empty().concat(&u), u);
    }

    #[test]
    fn splice_replaces_a_segment() {
        let w = Word::from_ranks(vec![1, 2, 3, 4, 5]);
        assert_eq!(w.splice(1, 3, &[9]), Word::from_ranks(vec![1, 9, 5]));
    }
}
