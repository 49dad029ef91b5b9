//! Words in free groups and in the fundamental group of a closed orientable
//! surface, with Dehn's algorithm for shortening conjugacy classes.
//!
//! Generators are indexed `0..rank`; for genus `g` the order is
//! `a1, b1, a2, b2, .., ag, bg`. The compact spelling uses `a, b, c, ..` for
//! generators `0, 1, 2, ..` and upper case for inverses, so that for genus 2
//! `abABcdCD` is the surface relator.

use std::collections::{HashSet, VecDeque};
use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Letter {
    pub gen: u8,
    pub inv: bool,
}

impl Letter {
    pub fn new(gen: u8, inv: bool) -> Self {
        Letter { gen, inv }
    }

    pub fn inverse(self) -> Letter {
        Letter {
            gen: self.gen,
            inv: !self.inv,
        }
    }

    pub fn sign(self) -> i64 {
        if self.inv {
            -1
        } else {
            1
        }
    }

    pub fn compact(self) -> char {
        let c = (b'a' + self.gen) as char;
        if self.inv {
            c.to_ascii_uppercase()
        } else {
            c
        }
    }
}

/// A freely reduced word over `rank` generators.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Word {
    rank: usize,
    letters: Vec<Letter>,
}

fn free_reduce(letters: impl IntoIterator<Item = Letter>) -> Vec<Letter> {
    let mut out: Vec<Letter> = Vec::new();
    for l in letters {
        if out.last() == Some(&l.inverse()) {
            out.pop();
        } else {
            out.push(l);
        }
    }
    out
}

impl Word {
    pub fn new(rank: usize, letters: Vec<Letter>) -> Result<Self> {
        if rank > 26 {
            return Err(Error::InvalidArgument("at most 26 generators".into()));
        }
        if let Some(l) = letters.iter().find(|l| l.gen as usize >= rank) {
            return Err(Error::InvalidArgument(format!(
                "generator index {} exceeds rank {rank}",
                l.gen + 1
            )));
        }
        Ok(Word {
            rank,
            letters: free_reduce(letters),
        })
    }

    pub fn identity(rank: usize) -> Self {
        Word {
            rank,
            letters: Vec::new(),
        }
    }

    /// Parses over a free group of the given rank (see [`parse_word`] for syntax).
    pub fn parse_free(text: &str, rank: usize) -> Result<Self> {
        let mut letters = Vec::new();
        let chars: Vec<char> = text.chars().collect();
        let mut i = 0;
        let mut negate = false;
        while i < chars.len() {
            let c = chars[i];
            if c.is_whitespace() || c == '*' || c == '.' {
                if negate {
                    return Err(Error::Parse(format!("dangling '-' in {text:?}")));
                }
                i += 1;
                continue;
            }
            if c == '-' {
                if negate {
                    return Err(Error::Parse(format!("double '-' in {text:?}")));
                }
                negate = true;
                i += 1;
                continue;
            }
            if !c.is_ascii_alphabetic() {
                return Err(Error::Parse(format!("unexpected {c:?} in {text:?}")));
            }
            let mut j = i + 1;
            while j < chars.len() && chars[j].is_ascii_digit() {
                j += 1;
            }
            let letter = if j > i + 1 {
                // Indexed form `a3` / `b3`.
                let idx: usize = chars[i + 1..j]
                    .iter()
                    .collect::<String>()
                    .parse()
                    .map_err(|_| Error::Parse(format!("bad index in {text:?}")))?;
                let lower = c.to_ascii_lowercase();
                if idx == 0 || !(lower == 'a' || lower == 'b') {
                    return Err(Error::Parse(format!("unknown generator in {text:?}")));
                }
                let gen = 2 * (idx - 1) + usize::from(lower == 'b');
                if gen >= rank {
                    return Err(Error::Parse(format!(
                        "generator {c}{idx} out of range for rank {rank}"
                    )));
                }
                Letter::new(gen as u8, c.is_ascii_uppercase() != negate)
            } else {
                let gen = (c.to_ascii_lowercase() as u8 - b'a') as usize;
                if gen >= rank {
                    return Err(Error::Parse(format!(
                        "letter {c:?} out of range for rank {rank}"
                    )));
                }
                Letter::new(gen as u8, c.is_ascii_uppercase() != negate)
            };
            letters.push(letter);
            negate = false;
            i = j;
        }
        if negate {
            return Err(Error::Parse(format!("dangling '-' in {text:?}")));
        }
        Word::new(rank, letters)
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn inverse(&self) -> Word {
        Word {
            rank: self.rank,
            letters: self.letters.iter().rev().map(|l| l.inverse()).collect(),
        }
    }

    pub fn concat(&self, other: &Word) -> Word {
        Word {
            rank: self.rank.max(other.rank),
            letters: free_reduce(self.letters.iter().chain(&other.letters).copied()),
        }
    }

    /// Same letters viewed over a larger alphabet.
    pub fn with_rank(&self, rank: usize) -> Result<Word> {
        Word::new(rank, self.letters.clone())
    }

    pub fn is_cyclically_reduced(&self) -> bool {
        self.letters.len() < 2 || self.letters[0] != self.letters[self.len() - 1].inverse()
    }

    pub fn cyclic_reduce(&self) -> Word {
        let l = &self.letters;
        let mut i = 0;
        let mut j = l.len();
        while j - i >= 2 && l[i] == l[j - 1].inverse() {
            i += 1;
            j -= 1;
        }
        Word {
            rank: self.rank,
            letters: l[i..j].to_vec(),
        }
    }

    /// The rotation starting at letter `i`.
    pub fn rotate(&self, i: usize) -> Word {
        let n = self.len();
        if n == 0 {
            return self.clone();
        }
        let i = i % n;
        let mut letters = self.letters[i..].to_vec();
        letters.extend_from_slice(&self.letters[..i]);
        Word {
            rank: self.rank,
            letters,
        }
    }

    /// Least rotation; a canonical name for the cyclic word.
    pub fn min_rotation(&self) -> Word {
        (0..self.len().max(1))
            .map(|i| self.rotate(i))
            .min()
            .expect("at least one rotation")
    }

    /// Net exponent of each generator.
    pub fn exponent_sums(&self) -> Vec<i64> {
        let mut s = vec![0i64; self.rank];
        for l in &self.letters {
            s[l.gen as usize] += l.sign();
        }
        s
    }

    /// Number of occurrences of each generator with exponent `+1`.
    pub fn positive_counts(&self) -> Vec<usize> {
        let mut s = vec![0usize; self.rank];
        for l in self.letters.iter().filter(|l| !l.inv) {
            s[l.gen as usize] += 1;
        }
        s
    }

    /// Balanced words: every exponent sum vanishes.
    pub fn in_commutator_subgroup(&self) -> bool {
        self.exponent_sums().iter().all(|&e| e == 0)
    }

    pub fn to_compact(&self) -> String {
        self.letters.iter().map(|l| l.compact()).collect()
    }

    /// Spelling with explicit genus indices, e.g. `a1 b1 -a1 -b1`.
    pub fn to_indexed(&self) -> String {
        let v: Vec<String> = self
            .letters
            .iter()
            .map(|l| {
                format!(
                    "{}{}{}",
                    if l.inv { "-" } else { "" },
                    if l.gen % 2 == 0 { 'a' } else { 'b' },
                    l.gen / 2 + 1
                )
            })
            .collect();
        v.join(" ")
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_empty() {
            write!(f, "e")
        } else {
            write!(f, "{}", self.to_compact())
        }
    }
}

/// Parses a word in the genus-`g` surface alphabet.
///
/// Accepts whitespace-separated indexed tokens such as `a1 -b2` and the
/// compact spelling `abAB`; the result is freely reduced.
pub fn parse_word(text: &str, g: usize) -> Result<Word> {
    if g == 0 {
        return Err(Error::InvalidArgument("genus must be positive".into()));
    }
    Word::parse_free(text, 2 * g)
}

/// `[a1, b1] .. [ag, bg]`.
pub fn surface_relator(g: usize) -> Word {
    let mut letters = Vec::with_capacity(4 * g);
    for i in 0..g as u8 {
        let (a, b) = (2 * i, 2 * i + 1);
        letters.extend([
            Letter::new(a, false),
            Letter::new(b, false),
            Letter::new(a, true),
            Letter::new(b, true),
        ]);
    }
    Word {
        rank: 2 * g,
        letters,
    }
}

fn relators(g: usize) -> [Vec<Letter>; 2] {
    let r = surface_relator(g);
    [r.letters.clone(), r.inverse().letters]
}

/// Longest cyclic subword of `w` starting at `start` that is a subword of a
/// rotation of `R` or `R^-1`; returns `(length, relator index, offset)`.
fn longest_relator_piece(
    w: &[Letter],
    start: usize,
    rels: &[Vec<Letter>; 2],
) -> (usize, usize, usize) {
    let n = w.len();
    let rl = rels[0].len();
    let mut best = (0, 0, 0);
    for (ri, rel) in rels.iter().enumerate() {
        for off in 0..rl {
            let mut len = 0;
            while len < n.min(rl) && w[(start + len) % n] == rel[(off + len) % rl] {
                len += 1;
            }
            if len > best.0 {
                best = (len, ri, off);
            }
        }
    }
    best
}

/// Applies one Dehn replacement to a cyclically reduced word, if any applies.
fn dehn_step(w: &Word, g: usize) -> Option<Word> {
    let rels = relators(g);
    let n = w.len();
    let rl = 4 * g;
    for start in 0..n {
        let (len, ri, off) = longest_relator_piece(&w.letters, start, &rels);
        if len > 2 * g {
            let rel = &rels[ri];
            // Complement Y with (piece)(Y) a rotation of the relator.
            let complement: Vec<Letter> = (len..rl).map(|t| rel[(off + t) % rl]).collect();
            let mut letters: Vec<Letter> = complement.iter().rev().map(|l| l.inverse()).collect();
            letters.extend((len..n).map(|t| w.letters[(start + t) % n]));
            let out = Word {
                rank: w.rank,
                letters: free_reduce(letters),
            };
            return Some(out.cyclic_reduce());
        }
    }
    None
}

/// Dehn's algorithm on the cyclic word: replace any cyclic subword longer
/// than half a relator by the inverse of its complement until none remains.
pub fn dehn_shorten(w: &Word, g: usize) -> Word {
    let mut cur = w.cyclic_reduce();
    while let Some(next) = dehn_step(&cur, g) {
        debug_assert!(next.len() < cur.len());
        cur = next;
    }
    cur
}

/// Cyclically reduced with no cyclic subword of length `>= 2g + 1` that
/// occurs in a rotation of `R^{+1}` or `R^{-1}`.
pub fn is_shortest_conj_rep(w: &Word, g: usize) -> bool {
    if !w.is_cyclically_reduced() {
        return false;
    }
    let rels = relators(g);
    (0..w.len()).all(|s| longest_relator_piece(&w.letters, s, &rels).0 <= 2 * g)
}

/// Cyclic words reachable by inserting one rotation of `R^{+-1}` at one gap,
/// then reducing; only results of length at most `max_len` are kept.
fn relator_insertions(w: &Word, g: usize, max_len: usize) -> Vec<Word> {
    let rels = relators(g);
    let rl = 4 * g;
    let n = w.len();
    let mut out = Vec::new();
    for gap in 0..n.max(1) {
        for rel in &rels {
            for off in 0..rl {
                let mut letters: Vec<Letter> = w.letters[..gap].to_vec();
                letters.extend((0..rl).map(|t| rel[(off + t) % rl]));
                letters.extend_from_slice(&w.letters[gap..]);
                let v = Word {
                    rank: w.rank,
                    letters: free_reduce(letters),
                }
                .cyclic_reduce();
                if v.len() <= max_len {
                    out.push(v.min_rotation());
                }
            }
        }
    }
    out
}

fn bfs_layers(start: &Word, g: usize, max_len: usize, max_depth: usize) -> HashSet<Word> {
    let s = start.cyclic_reduce().min_rotation();
    let mut seen = HashSet::from([s.clone()]);
    let mut queue = VecDeque::from([(s, 0usize)]);
    while let Some((w, d)) = queue.pop_front() {
        if d == max_depth {
            continue;
        }
        for v in relator_insertions(&w, g, max_len) {
            if seen.insert(v.clone()) {
                queue.push_back((v, d + 1));
            }
        }
    }
    seen
}

/// Searches for a chain of relator insertions relating the conjugacy classes
/// of `u` and `v`, exploring cyclic words up to `max_len` letters and
/// `max_depth` moves from each side.
pub fn certify_conjugate(u: &Word, v: &Word, g: usize, max_len: usize, max_depth: usize) -> bool {
    let a = bfs_layers(u, g, max_len, max_depth);
    let target = v.cyclic_reduce().min_rotation();
    if a.contains(&target) {
        return true;
    }
    let b = bfs_layers(v, g, max_len, max_depth);
    a.iter().any(|x| b.contains(x))
}

/// A conjugate of `w` shorter than its cyclic reduction, found by bounded search.
pub fn find_shorter_conjugate(
    w: &Word,
    g: usize,
    max_len: usize,
    max_depth: usize,
) -> Option<Word> {
    let base = w.cyclic_reduce().len();
    bfs_layers(w, g, max_len, max_depth)
        .into_iter()
        .filter(|v| v.len() < base)
        .min_by_key(|v| (v.len(), v.clone()))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DehnReport {
    pub word: String,
    pub length: usize,
    pub shortest: bool,
}

pub fn dehn_report(w: &Word, g: usize) -> DehnReport {
    let s = dehn_shorten(w, g);
    DehnReport {
        word: s.to_compact(),
        length: s.len(),
        shortest: is_shortest_conj_rep(&s, g),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parsing() {
        let w = parse_word("abAB", 2).unwrap();
        assert_eq!(w.to_indexed(), "a1 b1 -a1 -b1");
        assert!(parse_word("a1 -a1", 3).unwrap().is_empty());
        assert!(parse_word("e", 2).is_err());
        assert!(parse_word("a3", 2).is_err());
        assert_eq!(parse_word("a2 -b2", 2).unwrap().to_compact(), "cD");
    }

    #[test]
    fn relator_shape() {
        assert_eq!(surface_relator(2).to_compact(), "abABcdCD");
        assert_eq!(surface_relator(3).len(), 12);
    }

    #[test]
    fn dehn_examples() {
        let r = surface_relator(2);
        assert!(dehn_shorten(&r, 2).is_empty());
        let w = parse_word("abABc", 2).unwrap();
        // The replacement yields dcD, whose cyclic reduction is c.
        let s = dehn_shorten(&w, 2);
        assert_eq!(s.to_compact(), "c");
        let dcd = parse_word("dcD", 2).unwrap();
        assert!(certify_conjugate(&w, &dcd, 2, 14, 2));
        assert!(certify_conjugate(&s, &dcd, 2, 14, 1));
        let c = parse_word("abAB", 2).unwrap();
        assert_eq!(dehn_shorten(&c, 2), c);
        assert!(is_shortest_conj_rep(&c, 2));
        assert!(!is_shortest_conj_rep(&r, 2));
    }

    #[test]
    fn commutator_membership() {
        assert!(parse_word("abAB", 2).unwrap().in_commutator_subgroup());
        assert!(!parse_word("aab", 2).unwrap().in_commutator_subgroup());
    }
}
