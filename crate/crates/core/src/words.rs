//! Finite binary words, the overlap predicate and the Thue-Morse morphism.
//!
//! Words render as strings over `0`/`1`; that rendering is the text format
//! used everywhere else in the crate and by the CLI.

use std::fmt;
use std::ops::{ControlFlow, Index};
use std::str::FromStr;

use serde::{Serialize, Serializer};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[repr(u8)]
pub enum Letter {
    Zero = 0,
    One = 1,
}

impl Letter {
    pub const BOTH: [Letter; 2] = [Letter::Zero, Letter::One];

    #[inline]
    pub fn complement(self) -> Letter {
        Letter::from_bit(self as u8 ^ 1)
    }

    #[inline]
    pub fn from_bit(bit: u8) -> Letter {
        if bit & 1 == 0 {
            Letter::Zero
        } else {
            Letter::One
        }
    }

    #[inline]
    pub fn bit(self) -> u8 {
        self as u8
    }

    pub fn to_char(self) -> char {
        match self {
            Letter::Zero => '0',
            Letter::One => '1',
        }
    }

    pub fn from_char(c: char) -> Result<Letter> {
        match c {
            '0' => Ok(Letter::Zero),
            '1' => Ok(Letter::One),
            other => Err(Error::InvalidLetter(other)),
        }
    }
}

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_char())
    }
}

/// A finite word over {0, 1}.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Word(Vec<Letter>);

impl Word {
    pub fn new() -> Self {
        Word(Vec::new())
    }

    pub fn with_capacity(n: usize) -> Self {
        Word(Vec::with_capacity(n))
    }

    pub fn from_letters(letters: Vec<Letter>) -> Self {
        Word(letters)
    }

    /// Word of length `len` whose letter `i` is `f(i)`.
    pub fn from_fn(len: usize, f: impl FnMut(usize) -> Letter) -> Self {
        Word((0..len).map(f).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    pub fn into_letters(self) -> Vec<Letter> {
        self.0
    }

    pub fn get(&self, i: usize) -> Option<Letter> {
        self.0.get(i).copied()
    }

    pub fn push(&mut self, a: Letter) {
        self.0.push(a);
    }

    pub fn extend_from(&mut self, other: &Word) {
        self.0.extend_from_slice(&other.0);
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut out = Vec::with_capacity(self.len() + other.len());
        out.extend_from_slice(&self.0);
        out.extend_from_slice(&other.0);
        Word(out)
    }

    /// The first `n` letters (or the whole word if shorter).
    pub fn prefix(&self, n: usize) -> Word {
        Word(self.0[..n.min(self.len())].to_vec())
    }

    pub fn suffix_from(&self, start: usize) -> Word {
        Word(self.0[start.min(self.len())..].to_vec())
    }

    /// True iff `self` has at least `|h|` letters and agrees with `h` there.
    pub fn starts_with(&self, h: &Word) -> bool {
        self.0.starts_with(&h.0)
    }

    pub fn complement(&self) -> Word {
        Word(self.0.iter().map(|a| a.complement()).collect())
    }

    /// Image under the Thue-Morse morphism 0 -> 01, 1 -> 10.
    pub fn mu(&self) -> Word {
        let mut out = Vec::with_capacity(2 * self.len());
        for &a in &self.0 {
            out.push(a);
            out.push(a.complement());
        }
        Word(out)
    }

    pub fn mu_pow(&self, k: u32) -> Word {
        (0..k).fold(self.clone(), |w, _| w.mu())
    }

    /// The unique `y` with `mu(y) = self`.
    pub fn mu_preimage(&self) -> Result<Word> {
        if self.len() % 2 == 1 {
            return Err(Error::NotMuImage { position: self.len() - 1 });
        }
        self.0
            .chunks_exact(2)
            .enumerate()
            .map(|(k, block)| {
                if block[0] != block[1] {
                    Ok(block[0])
                } else {
                    Err(Error::NotMuImage { position: 2 * k })
                }
            })
            .collect::<Result<Vec<_>>>()
            .map(Word)
    }

    pub fn find_overlap(&self) -> Option<OverlapWitness> {
        find_overlap(&self.0)
    }

    pub fn is_overlap_free(&self) -> bool {
        is_overlap_free(&self.0)
    }
}

impl Index<usize> for Word {
    type Output = Letter;

    fn index(&self, i: usize) -> &Letter {
        &self.0[i]
    }
}

impl From<Vec<Letter>> for Word {
    fn from(letters: Vec<Letter>) -> Self {
        Word(letters)
    }
}

impl FromIterator<Letter> for Word {
    fn from_iter<I: IntoIterator<Item = Letter>>(iter: I) -> Self {
        Word(iter.into_iter().collect())
    }
}

impl FromStr for Word {
    type Err = Error;

    fn from_str(s: &str) -> Result<Word> {
        s.chars().map(Letter::from_char).collect::<Result<Vec<_>>>().map(Word)
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: String = self.0.iter().map(|a| a.to_char()).collect();
        f.write_str(&s)
    }
}

impl Serialize for Word {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

/// A factor `a x a x a` located at `start`, with `period = |x| + 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct OverlapWitness {
    pub start: usize,
    pub period: usize,
}

impl OverlapWitness {
    /// Length of the overlapping factor, `2 * period + 1`.
    pub fn factor_len(&self) -> usize {
        2 * self.period + 1
    }

    pub fn end(&self) -> usize {
        self.start + self.factor_len()
    }

    /// Re-checks the positional equalities directly against `w`.
    pub fn holds_in(&self, w: &[Letter]) -> bool {
        self.period >= 1
            && self.end() <= w.len()
            && (0..=self.period).all(|i| w[self.start + i] == w[self.start + i + self.period])
    }

    pub fn factor<'a>(&self, w: &'a [Letter]) -> &'a [Letter] {
        &w[self.start..self.end()]
    }
}

impl fmt::Display for OverlapWitness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "overlap at {} with period {}", self.start, self.period)
    }
}

/// Letters packed one bit each, bit `i` of the stream holding letter `i`.
struct PackedWord {
    bits: Vec<u64>,
    len: usize,
}

impl PackedWord {
    fn new(w: &[Letter]) -> Self {
        let mut bits = vec![0u64; w.len().div_ceil(64) + 1];
        for (i, &a) in w.iter().enumerate() {
            bits[i / 64] |= (a.bit() as u64) << (i % 64);
        }
        PackedWord { bits, len: w.len() }
    }

    /// 64 letters starting at bit offset `at` (zero-padded past the end).
    #[inline]
    fn window(&self, at: usize) -> u64 {
        let (k, r) = (at / 64, at % 64);
        let lo = self.bits[k] >> r;
        if r == 0 || k + 1 >= self.bits.len() {
            lo
        } else {
            lo | (self.bits[k + 1] << (64 - r))
        }
    }

    /// Earliest `s` with `w[s + i] == w[s + i + p]` for all `0 <= i <= p`,
    /// restricted to `s < limit`.
    fn earliest_overlap_with_period(&self, p: usize, limit: usize) -> Option<usize> {
        let need = p + 1;
        // Starts s must satisfy s + 2p + 1 <= len.
        let span = (self.len + 1).checked_sub(2 * p + 1)?.min(limit);
        if span == 0 {
            return None;
        }
        // Agreement positions i range over [0, span + p).
        let m = span + p;
        let mut run = 0usize;
        for k in 0..m.div_ceil(64) {
            let base = 64 * k;
            let mut eq = !(self.bits[k] ^ self.window(base + p));
            if m - base < 64 {
                eq &= (1u64 << (m - base)) - 1;
            }
            if eq == u64::MAX {
                run += 64;
                if run >= need {
                    return Some(base + 64 - run).filter(|&s| s < span);
                }
                continue;
            }
            if run + eq.trailing_ones() as usize >= need {
                return Some(base - run).filter(|&s| s < span);
            }
            if need <= 64 {
                let mut y = eq;
                let mut have = 1;
                while have < need {
                    let s = have.min(need - have);
                    y &= y >> s;
                    have += s;
                }
                if y != 0 {
                    return Some(base + y.trailing_zeros() as usize).filter(|&s| s < span);
                }
            }
            run = eq.leading_ones() as usize;
        }
        None
    }
}

/// Leftmost overlap, ties broken by smallest period.
pub fn find_overlap(w: &[Letter]) -> Option<OverlapWitness> {
    if w.len() < 3 {
        return None;
    }
    let packed = PackedWord::new(w);
    let mut best: Option<OverlapWitness> = None;
    for p in 1..=(w.len() - 1) / 2 {
        let limit = best.map_or(usize::MAX, |b| b.start);
        if let Some(start) = packed.earliest_overlap_with_period(p, limit) {
            best = Some(OverlapWitness { start, period: p });
            if start == 0 {
                break;
            }
        }
    }
    best
}

pub fn is_overlap_free(w: &[Letter]) -> bool {
    if w.len() < 3 {
        return true;
    }
    let packed = PackedWord::new(w);
    (1..=(w.len() - 1) / 2).all(|p| packed.earliest_overlap_with_period(p, usize::MAX).is_none())
}

/// Overlap ending exactly at the last letter, if any. Used when words are
/// grown one letter at a time from an overlap-free prefix.
pub fn overlap_at_end(w: &[Letter]) -> Option<OverlapWitness> {
    let n = w.len();
    (1..=n.saturating_sub(1) / 2).find_map(|p| {
        let start = n - 2 * p - 1;
        (0..=p)
            .all(|i| w[n - 1 - i] == w[n - 1 - i - p])
            .then_some(OverlapWitness { start, period: p })
    })
}

/// Depth-first search over overlap-free extensions of `prefix` up to `len`
/// letters, trying 0 before 1. `visit` sees each word of length `len` in
/// lexicographic order and may stop the search.
pub fn search_overlap_free<B>(
    prefix: &[Letter],
    len: usize,
    visit: &mut impl FnMut(&[Letter]) -> ControlFlow<B>,
) -> ControlFlow<B> {
    fn go<B>(
        buf: &mut Vec<Letter>,
        len: usize,
        visit: &mut impl FnMut(&[Letter]) -> ControlFlow<B>,
    ) -> ControlFlow<B> {
        if buf.len() == len {
            return visit(buf);
        }
        for a in Letter::BOTH {
            buf.push(a);
            if overlap_at_end(buf).is_none() {
                go(buf, len, visit)?;
            }
            buf.pop();
        }
        ControlFlow::Continue(())
    }

    if !is_overlap_free(prefix) {
        return ControlFlow::Continue(());
    }
    if prefix.len() > len {
        return visit(&prefix[..len]);
    }
    let mut buf = Vec::with_capacity(len);
    buf.extend_from_slice(prefix);
    go(&mut buf, len, visit)
}

/// Whether `prefix` extends to an overlap-free word of length `len`.
pub fn extends_overlap_free(prefix: &[Letter], len: usize) -> bool {
    search_overlap_free(prefix, len, &mut |_| ControlFlow::Break(())).is_break()
}

/// Length-`n` prefix of the fixed point of the Thue-Morse morphism starting
/// with `first`.
pub fn thue_morse(n: usize, first: Letter) -> Word {
    let mut w = Word(vec![first]);
    while w.len() < n {
        w = w.mu();
    }
    w.0.truncate(n);
    w
}

/// Position `i` holds the parity of the number of 0 digits in the binary
/// expansion of `i`; 0 has the empty expansion.
pub fn zeros_parity_word(n: usize) -> Word {
    Word::from_fn(n, |i| {
        let zeros = if i == 0 {
            0
        } else {
            (usize::BITS - i.leading_zeros()) - i.count_ones()
        };
        Letter::from_bit(zeros as u8)
    })
}
