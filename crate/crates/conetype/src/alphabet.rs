//! Symmetric generating alphabet of the genus-g surface group.
//!
//! Generators are stored as small integers giving their position in a fixed
//! total order. For genus 2 that order is
//! `b⁻¹ < a < d < c⁻¹ < d⁻¹ < c < b < a⁻¹`, and the single-letter syntax uses
//! lowercase for generators and uppercase for inverses (`a..d`, `A..D`). For
//! higher genus the order is the layout order `a1 < b1 < ... < ag < bg <
//! a1⁻¹ < ... < bg⁻¹` and letters are written `a1, b1, ..` with a trailing
//! apostrophe for inverses.

use crate::error::{Error, Result};
use crate::word::Word;

/// Genus of the underlying surface, at least 2.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Genus(u32);

impl Genus {
    pub fn new(g: u32) -> Result<Self> {
        if g < 2 {
            return Err(Error::InvalidGenus(g));
        }
        Ok(Genus(g))
    }

    pub fn get(self) -> u32 {
        self.0
    }

    /// Size of the symmetric alphabet, `4g`.
    pub fn alphabet_size(self) -> usize {
        4 * self.0 as usize
    }

    /// Length of the defining relator, `4g`.
    pub fn relator_len(self) -> usize {
        4 * self.0 as usize
    }

    /// Length of a half relator, `2g`.
    pub fn half_relator_len(self) -> usize {
        2 * self.0 as usize
    }
}

/// A generator, identified by its rank in the fixed total order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Generator(pub u8);

impl Generator {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// The alphabet: letter names, the inverse involution, and the relator.
#[derive(Debug, Clone)]
pub struct Alphabet {
    genus: Genus,
    inverse: Vec<u8>,
    names: Vec<String>,
    /// Defining relator `[a1,b1]..[ag,bg]` in rank encoding.
    relator: Vec<u8>,
}

/// Genus-2 letters in rank order: `b⁻¹ a d c⁻¹ d⁻¹ c b a⁻¹`.
const G2_NAMES: [&str; 8] = ["B", "a", "d", "C", "D", "c", "b", "A"];
const G2_INVERSE: [u8; 8] = [6, 7, 4, 5, 2, 3, 0, 1];
/// `a b a⁻¹ b⁻¹ c d c⁻¹ d⁻¹` in rank encoding.
const G2_RELATOR: [u8; 8] = [1, 6, 7, 0, 5, 2, 3, 4];

impl Alphabet {
    pub fn new(genus: Genus) -> Self {
        let g = genus.get() as usize;
        if g == 2 {
            return Alphabet {
                genus,
                inverse: G2_INVERSE.to_vec(),
                names: G2_NAMES.iter().map(|s| s.to_string()).collect(),
                relator: G2_RELATOR.to_vec(),
            };
        }
        // Layout order: a1 b1 .. ag bg, then their inverses in the same order.
        let mut names = Vec::with_capacity(4 * g);
        for k in 1..=g {
            names.push(format!("a{k}"));
            names.push(format!("b{k}"));
        }
        for k in 1..=g {
            names.push(format!("a{k}'"));
            names.push(format!("b{k}'"));
        }
        let inverse = (0..4 * g).map(|i| ((i + 2 * g) % (4 * g)) as u8).collect();
        let mut relator = Vec::with_capacity(4 * g);
        for k in 0..g {
            let a = (2 * k) as u8;
            let b = (2 * k + 1) as u8;
            relator.extend_from_slice(&[a, b, a + 2 * g as u8, b + 2 * g as u8]);
        }
        Alphabet { genus, inverse, names, relator }
    }

    pub fn genus(&self) -> Genus {
        self.genus
    }

    pub fn size(&self) -> usize {
        self.inverse.len()
    }

    pub fn generators(&self) -> impl Iterator<Item = Generator> + '_ {
        (0..self.size() as u8).map(Generator)
    }

    pub fn inverse(&self, g: Generator) -> Generator {
        Generator(self.inverse[g.index()])
    }

    pub fn inverse_rank(&self, rank: u8) -> u8 {
        self.inverse[rank as usize]
    }

    pub fn name(&self, g: Generator) -> &str {
        &self.names[g.index()]
    }

    pub fn relator(&self) -> &[u8] {
        &self.relator
    }

    /// Inverse word of `w` (reverse, letterwise inverse).
    pub fn inverse_word(&self, w: &Word) -> Word {
        w.letters().iter().rev().map(|&l| self.inverse[l as usize]).collect()
    }

    /// Free reduction: repeatedly delete adjacent mutually inverse letters.
    pub fn free_reduce(&self, w: &Word) -> Word {
        let mut out: Vec<u8> = Vec::with_capacity(w.len());
        for &l in w.letters() {
            if out.last().is_some_and(|&t| self.inverse[t as usize] == l) {
                out.pop();
            } else {
                out.push(l);
            }
        }
        Word::from_ranks(out)
    }

    pub fn parse_word(&self, s: &str) -> Result<Word> {
        if self.genus.get() == 2 {
            self.parse_word_g2(s)
        } else {
            self.parse_word_general(s)
        }
    }

    fn parse_word_g2(&self, s: &str) -> Result<Word> {
        let mut out = Vec::with_capacity(s.len());
        for (pos, ch) in s.chars().enumerate() {
            let rank = G2_NAMES.iter().position(|&n| n == ch.to_string());
            match rank {
                Some(r) => out.push(r as u8),
                None => {
                    return Err(Error::Parse {
                        pos,
                        msg: format!("unknown letter '{ch}' (expected a-d or A-D)"),
                    })
                }
            }
        }
        Ok(Word::from_ranks(out))
    }

    fn parse_word_general(&self, s: &str) -> Result<Word> {
        let bytes = s.as_bytes();
        let mut out = Vec::new();
        let mut i = 0;
        while i < bytes.len() {
            let start = i;
            let family = bytes[i];
            if family != b'a' && family != b'b' {
                return Err(Error::Parse {
                    pos: start,
                    msg: format!("expected 'a' or 'b', found '{}'", bytes[i] as char),
                });
            }
            i += 1;
            let digits_start = i;
            while i < bytes.len() && bytes[i].is_ascii_digit() {
                i += 1;
            }
            if i == digits_start {
                return Err(Error::Parse { pos: i, msg: "expected a subscript".into() });
            }
            let k: usize = s[digits_start..i].parse().map_err(|_| Error::Parse {
                pos: digits_start,
                msg: "bad subscript".into(),
            })?;
            if k == 0 || k > self.genus.get() as usize {
                return Err(Error::Parse {
                    pos: digits_start,
                    msg: format!("subscript {k} out of range 1..={}", self.genus.get()),
                });
            }
            let inverted = i < bytes.len() && bytes[i] == b'\'';
            if inverted {
                i += 1;
            }
            let mut rank = 2 * (k - 1) + usize::from(family == b'b');
            if inverted {
                rank += 2 * self.genus.get() as usize;
            }
            out.push(rank as u8);
        }
        Ok(Word::from_ranks(out))
    }

    pub fn format_word(&self, w: &Word) -> String {
        w.letters().iter().map(|&l| self.names[l as usize].as_str()).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn genus_validation() {
        assert!(Genus::new(1).is_err());
        assert_eq!(Genus::new(2).unwrap().alphabet_size(), 8);
        assert_eq!(Genus::new(3).unwrap().half_relator_len(), 6);
    }

    #[test]
    fn inverse_is_a_fixed_point_free_involution() {
        for g in [2u32, 3, 5] {
            let ab = Alphabet::new(Genus::new(g).unwrap());
            for gen in ab.generators() {
                assert_ne!(ab.inverse(gen), gen);
                assert_eq!(ab.inverse(ab.inverse(gen)), gen);
            }
        }
    }

    #[test]
    fn genus2_order_matches_the_fixed_table() {
        let ab = Alphabet::new(Genus::new(2).unwrap());
        let order: Vec<&str> = ab.generators().map(|g| ab.name(g)).collect();
        assert_eq!(order, vec!["B", "a", "d", "C", "D", "c", "b", "A"]);
    }

    #[test]
    fn parse_and_format_round_trip() {
        let ab = Alphabet::new(Genus::new(2).unwrap());
        let w = ab.parse_word("abABAdc").unwrap();
        assert_eq!(ab.format_word(&w), "abABAdc");
        assert_eq!(w.len(), 7);
        let err = ab.parse_word("abx").unwrap_err();
        assert!(matches!(err, Error::Parse { pos: 2, .. }));

        let ab3 = Alphabet::new(Genus::new(3).unwrap());
        let w3 = ab3.parse_word("a1b2'a3").unwrap();
        assert_eq!(ab3.format_word(&w3), "a1b2'a3");
        assert!(ab3.parse_word("a9").is_err());
    }

    #[test]
    fn free_reduction_examples() {
        let ab = Alphabet::new(Genus::new(2).unwrap());
        let red = |s: &str| ab.format_word(&ab.free_reduce(&ab.parse_word(s).unwrap()));
        assert_eq!(red("aA"), "");
        assert_eq!(red("abBa"), "aa");
        assert_eq!(red("abc"), "abc");
    }

    #[test]
    fn relator_evaluates_letterwise() {
        let ab = Alphabet::new(Genus::new(2).unwrap());
        assert_eq!(ab.format_word(&Word::from_ranks(ab.relator().to_vec())), "abABcdCD");
        let ab3 = Alphabet::new(Genus::new(3).unwrap());
        assert_eq!(ab3.relator().len(), 12);
    }
}
