//! Applications: the lexicographically least infinite overlap-free word, a
//! family of non-fragile words, an uncountable family of paths, and
//! enumeration oracles.

use std::ops::ControlFlow;

use serde::Serialize;

use crate::automaton::{transitions, Digit, State};
use crate::codec::{decode_eventually_periodic, InfiniteCode, PeriodicCode, Tail};
use crate::error::{Error, Result};
use crate::words::{search_overlap_free, Letter, Word};

const LEX_LEAST_MAX: usize = 256;
const COUNT_MAX: usize = 24;
const FAMILY_MAX: usize = 8;

/// The two interchangeable blocks, each a loop on state B.
pub const FRAGILITY_BLOCKS: [&str; 2] = ["113011", "313011"];

/// The two blocks of the uncountable family leaving K.
pub const FAMILY_BLOCKS: [&str; 2] = ["13010", "1301000"];

fn digits(s: &str) -> Vec<Digit> {
    s.chars().map(|c| Digit::from_char(c).expect("digit literal")).collect()
}

/// Length-`n` prefix of the lexicographically least overlap-free word of
/// length `2n`, found by depth-first search trying 0 before 1.
pub fn lex_least_oracle(n: usize) -> Result<Word> {
    if n > LEX_LEAST_MAX {
        return Err(Error::LimitExceeded { what: "length", value: n as u64, max: LEX_LEAST_MAX as u64 });
    }
    match search_overlap_free(&[], 2 * n, &mut |w| ControlFlow::Break(w[..n].to_vec())) {
        ControlFlow::Break(letters) => Ok(Word::from_letters(letters)),
        ControlFlow::Continue(()) => unreachable!("overlap-free words exist at every length"),
    }
}

/// `203 0^ω ;3`. The tail is 3: the path ends in the G/H cycle.
pub fn lex_least_code() -> PeriodicCode {
    PeriodicCode { preperiod: digits("203"), period: digits("0"), tail: Some(Tail::Complement) }
}

/// Number of overlap-free binary words of length `n`.
pub fn count_overlap_free(n: usize) -> Result<u64> {
    if n > COUNT_MAX {
        return Err(Error::LimitExceeded { what: "length", value: n as u64, max: COUNT_MAX as u64 });
    }
    let mut count = 0u64;
    let _ = search_overlap_free::<()>(&[], n, &mut |_| {
        count += 1;
        ControlFlow::Continue(())
    });
    Ok(count)
}

/// `1 · b₁ b₂ ⋯` where block `b_j` is the second fragility block for the
/// given indices and the first otherwise; 1-based block indices.
pub fn fragility_code(switched: Option<usize>) -> PeriodicCode {
    let mut pre = digits("1");
    if let Some(j) = switched {
        for _ in 1..j {
            pre.extend(digits(FRAGILITY_BLOCKS[0]));
        }
        pre.extend(digits(FRAGILITY_BLOCKS[1]));
    }
    PeriodicCode { preperiod: pre, period: digits(FRAGILITY_BLOCKS[0]), tail: None }
}

/// Where switching block `j` changes the decoded word: the span
/// `start .. start + len`, from the level structure of the expansion.
pub fn fragility_span(j: usize) -> (u128, u128) {
    let code = fragility_code(None);
    // Block j starts at 0-based digit 1 + 6(j - 1).
    let level = 1 + 6 * (j - 1);
    let start = (0..level)
        .map(|m| (code.digit(m).prefix_letters().len() as u128) << m)
        .sum();
    (start, 1u128 << level)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FragilityPair {
    #[serde(serialize_with = "display")]
    pub code_a: PeriodicCode,
    #[serde(serialize_with = "display")]
    pub code_b: PeriodicCode,
    pub block_index: usize,
    pub horizon: usize,
    #[serde(skip)]
    pub word_a: Word,
    #[serde(skip)]
    pub word_b: Word,
    pub diff_positions: Vec<usize>,
}

fn display<T: std::fmt::Display, S: serde::Serializer>(v: &T, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_str(v)
}

/// Two valid codes differing only in block `j`, decoded to `horizon` letters.
pub fn fragility_pair(j: usize, horizon: usize) -> Result<FragilityPair> {
    if j == 0 {
        return Err(Error::Precondition("block index starts at 1"));
    }
    let (start, _) = fragility_span(j);
    if start >= horizon as u128 {
        return Err(Error::HorizonTooSmall { horizon, start: start.min(usize::MAX as u128) as usize });
    }
    let code_a = fragility_code(None);
    let code_b = fragility_code(Some(j));
    let word_a = decode_eventually_periodic(&code_a, horizon)?;
    let word_b = decode_eventually_periodic(&code_b, horizon)?;
    for word in [&word_a, &word_b] {
        if let Some(witness) = word.find_overlap() {
            return Err(Error::VerificationFailed { position: witness.start });
        }
    }
    let diff_positions = (0..horizon).filter(|&i| word_a[i] != word_b[i]).collect();
    Ok(FragilityPair { code_a, code_b, block_index: j, horizon, word_a, word_b, diff_positions })
}

/// The code `1 b₀ b₁ ⋯` choosing block `b_j` by letter `j` of the
/// Thue-Morse word. Not ultimately periodic, so its word is not 2-automatic.
#[derive(Debug, Clone, Copy, Default)]
pub struct ThueMorseChoiceCode;

impl InfiniteCode for ThueMorseChoiceCode {
    fn digit(&self, j: usize) -> Digit {
        if j == 0 {
            return Digit::new(1).unwrap();
        }
        let (block, r) = ((j - 1) / 6, (j - 1) % 6);
        let which = block.count_ones() as usize % 2;
        Digit::from_char(FRAGILITY_BLOCKS[which].as_bytes()[r] as char).unwrap()
    }

    fn zero_tail(&self) -> Option<(usize, Tail)> {
        None
    }
}

/// Concatenates one family block per choice letter (0 picks `13010`, 1 picks
/// `1301000`) and checks the result is a path from K back to K.
pub fn uncountable_family_sample(choices: &Word) -> Result<Vec<Digit>> {
    if choices.len() > FAMILY_MAX {
        return Err(Error::LimitExceeded { what: "choices", value: choices.len() as u64, max: FAMILY_MAX as u64 });
    }
    let path: Vec<Digit> = choices
        .letters()
        .iter()
        .flat_map(|&c| digits(FAMILY_BLOCKS[c.bit() as usize]))
        .collect();
    match transitions().run(State::K, &path) {
        Ok(State::K) => Ok(path),
        Ok(_) | Err(_) => Err(Error::VerificationFailed { position: 0 }),
    }
}

/// Complements the letters at `positions`.
pub fn flip_positions(w: &Word, positions: &[usize]) -> Result<Word> {
    let mut letters = w.letters().to_vec();
    for &p in positions {
        let slot = letters.get_mut(p).ok_or(Error::PositionOutOfRange { position: p, len: w.len() })?;
        *slot = slot.complement();
    }
    Ok(Word::from_letters(letters))
}

/// All binary words of length `n` that avoid 000, 111, 01010 and 10101;
/// for `n <= 5` these are exactly the overlap-free words.
pub fn short_overlap_free_by_filter(n: usize) -> Vec<Word> {
    let banned: [Word; 4] = ["000", "111", "01010", "10101"].map(|s| s.parse().unwrap());
    (0u32..1 << n)
        .map(|bits| Word::from_fn(n, |i| Letter::from_bit((bits >> (n - 1 - i)) as u8)))
        .filter(|w| {
            banned
                .iter()
                .all(|b| !w.letters().windows(b.len()).any(|f| f == b.letters()))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codec::{validate, Validation};
    use crate::words::thue_morse;

    fn w(s: &str) -> Word {
        s.parse().unwrap()
    }

    #[test]
    fn lex_least_examples() {
        assert_eq!(lex_least_oracle(3).unwrap(), w("001"));
        assert_eq!(lex_least_oracle(8).unwrap(), w("00100110"));
        assert_eq!(lex_least_oracle(8).unwrap(), w("001001").concat(&thue_morse(2, Letter::One)));
        assert_eq!(lex_least_oracle(64).unwrap(), w("001001").concat(&thue_morse(58, Letter::One)));
        assert!(lex_least_oracle(257).is_err());
    }

    #[test]
    fn lex_least_prefixes_are_stable() {
        let long = lex_least_oracle(128).unwrap();
        for n in [1, 5, 17, 40, 100] {
            assert!(long.starts_with(&lex_least_oracle(n).unwrap()), "{n}");
        }
    }

    #[test]
    fn lex_least_code_agrees_with_oracle() {
        let c = lex_least_code();
        assert!(validate(&c).is_valid());
        for n in [16, 64, 128] {
            assert_eq!(decode_eventually_periodic(&c, n).unwrap(), lex_least_oracle(n).unwrap());
        }
        let wrong_tail = PeriodicCode { tail: Some(Tail::ThueMorse), ..c };
        assert!(matches!(validate(&wrong_tail), Validation::Invalid(_)));
    }

    #[test]
    fn count_examples() {
        assert_eq!(count_overlap_free(1).unwrap(), 2);
        assert_eq!(count_overlap_free(3).unwrap(), 6);
        assert_eq!(count_overlap_free(5).unwrap(), 14);
        assert_eq!(count_overlap_free(0).unwrap(), 1);
        assert!(count_overlap_free(25).is_err());
        for n in 1..=16 {
            assert_eq!(count_overlap_free(n).unwrap() % 2, 0, "{n}");
        }
    }

    #[test]
    fn filter_agrees_with_count_for_short_words() {
        for n in 1..=5 {
            assert_eq!(short_overlap_free_by_filter(n).len() as u64, count_overlap_free(n).unwrap());
        }
    }

    #[test]
    fn fragility_examples() {
        let p1 = fragility_pair(1, 1 << 10).unwrap();
        assert!(!p1.diff_positions.is_empty());
        assert!(validate(&p1.code_a).is_valid() && validate(&p1.code_b).is_valid());
        let p3 = fragility_pair(3, 1 << 13).unwrap();
        assert!(p3.diff_positions[0] > p1.diff_positions[0]);
        assert!(matches!(fragility_pair(3, 1 << 10), Err(Error::HorizonTooSmall { .. })));
        assert!(fragility_pair(0, 1 << 10).is_err());
    }

    #[test]
    fn diff_positions_are_the_predicted_span() {
        for (j, n) in [(1, 1 << 10), (2, 1 << 12), (3, 1 << 13)] {
            let pair = fragility_pair(j, n).unwrap();
            let (start, len) = fragility_span(j);
            let expected: Vec<usize> = (start as usize..(start + len).min(n as u128) as usize).collect();
            assert_eq!(pair.diff_positions, expected, "block {j}");
        }
        assert_eq!(fragility_span(1), (1, 2));
        assert_eq!(fragility_span(2), (111, 128));
        assert_eq!(fragility_span(3), (7151, 8192));
    }

    #[test]
    fn flipping_diff_positions_maps_a_to_b() {
        let pair = fragility_pair(2, 1 << 12).unwrap();
        assert_eq!(flip_positions(&pair.word_a, &pair.diff_positions).unwrap(), pair.word_b);
    }

    #[test]
    fn flip_examples() {
        assert_eq!(flip_positions(&w("000"), &[1]).unwrap(), w("010"));
        assert_eq!(
            flip_positions(&w("000"), &[3]),
            Err(Error::PositionOutOfRange { position: 3, len: 3 })
        );
        let t = thue_morse(64, Letter::Zero);
        for i in 0..64 {
            assert!(!flip_positions(&t, &[i]).unwrap().is_overlap_free(), "flip at {i}");
        }
    }

    #[test]
    fn family_examples() {
        assert_eq!(uncountable_family_sample(&w("0")).unwrap(), digits("13010"));
        assert_eq!(uncountable_family_sample(&w("")).unwrap(), vec![]);
        assert_eq!(uncountable_family_sample(&w("10")).unwrap(), digits("130100013010"));
        let all: std::collections::HashSet<Vec<Digit>> = (0u32..8)
            .map(|b| {
                let choice = Word::from_fn(3, |i| Letter::from_bit((b >> i) as u8));
                uncountable_family_sample(&choice).unwrap()
            })
            .collect();
        assert_eq!(all.len(), 8);
        assert!(uncountable_family_sample(&w("000000000")).is_err());
    }

    #[test]
    fn choice_code_follows_thue_morse() {
        let c = ThueMorseChoiceCode;
        let first: String = (0..19).map(|j| c.digit(j).to_char()).collect();
        assert_eq!(first, "1113011313011313011");
        let prefix: Vec<Digit> = (0..1 + 6 * 40).map(|j| c.digit(j)).collect();
        assert_eq!(transitions().run(State::A, &prefix), Ok(State::B));
    }
}
