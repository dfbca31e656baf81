//! Translation between overlap-free words and their digit codes.
//!
//! A word `x` is peeled as `x = p μ(y)` with `p` one of ε, 0, 00, 1, 11,
//! the choice being fixed by the first five letters of `x`; iterating gives
//! the code `i₁ i₂ ⋯`. Decoding runs the other way, inside out.
//!
//! Code text: a digit string, an optional period written `(...)^w`, and an
//! optional tail marker `;1` or `;3`, e.g. `203(0)^w;3`, `2(31)^w`.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::ControlFlow;
use std::str::FromStr;
use std::sync::OnceLock;

use serde::Serialize;

use crate::automaton::{classify_zero_cycle, path_to_zero_cycle, transitions, Digit, State, ZeroCycle};
use crate::error::{Error, Result};
use crate::words::{search_overlap_free, Letter, Word};

/// Upper bound on decoded lengths.
pub const MAX_DECODE_LEN: usize = 1 << 20;

/// Which fixed point of μ a trailing run of zeros stands for.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Tail {
    /// `;1`, the Thue-Morse word.
    #[serde(rename = "1")]
    ThueMorse,
    /// `;3`, its complement.
    #[serde(rename = "3")]
    Complement,
}

impl Tail {
    pub const BOTH: [Tail; 2] = [Tail::ThueMorse, Tail::Complement];

    /// The digit substituted for a final 0 when truncating.
    pub fn digit(self) -> Digit {
        match self {
            Tail::ThueMorse => Digit::new(1).unwrap(),
            Tail::Complement => Digit::new(3).unwrap(),
        }
    }

    pub fn first_letter(self) -> Letter {
        match self {
            Tail::ThueMorse => Letter::Zero,
            Tail::Complement => Letter::One,
        }
    }

    pub fn admitted_by(self, cycle: ZeroCycle) -> bool {
        match cycle {
            ZeroCycle::Both => true,
            ZeroCycle::Only1 => self == Tail::ThueMorse,
            ZeroCycle::Only3 => self == Tail::Complement,
            ZeroCycle::Dies => false,
        }
    }
}

impl fmt::Display for Tail {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, ";{}", self.digit())
    }
}

/// A finite code `i₁ ⋯ iₙ`, with a tail marker when `iₙ = 0`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FifeCode {
    pub digits: Vec<Digit>,
    pub tail: Option<Tail>,
}

impl FifeCode {
    pub fn new(digits: Vec<Digit>, tail: Option<Tail>) -> Self {
        FifeCode { digits, tail }
    }

    /// Prefix lengths after substituting the tail for a final zero.
    fn effective_prefix_lens(&self) -> Result<Vec<usize>> {
        let (last, init) = self.digits.split_last().ok_or(Error::EmptyCode)?;
        let last = if *last == Digit::ZERO {
            self.tail.ok_or(Error::TailRequired)?.digit()
        } else {
            *last
        };
        Ok(init
            .iter()
            .chain(std::iter::once(&last))
            .map(|d| d.prefix_letters().len())
            .collect())
    }

    /// `Σ_j 2^(j-1) |p'_{i_j}|`, saturating.
    pub fn decoded_len(&self) -> Result<u128> {
        Ok(self
            .effective_prefix_lens()?
            .iter()
            .enumerate()
            .map(|(j, &l)| match l {
                0 => 0,
                _ if j >= 126 => u128::MAX,
                _ => (l as u128) << j,
            })
            .fold(0u128, |acc, x| acc.saturating_add(x)))
    }
}

impl fmt::Display for FifeCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for d in &self.digits {
            write!(f, "{d}")?;
        }
        if let Some(t) = self.tail {
            write!(f, "{t}")?;
        }
        Ok(())
    }
}

/// The infinite code `preperiod · period^ω`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PeriodicCode {
    pub preperiod: Vec<Digit>,
    pub period: Vec<Digit>,
    pub tail: Option<Tail>,
}

impl PeriodicCode {
    pub fn new(preperiod: Vec<Digit>, period: Vec<Digit>, tail: Option<Tail>) -> Result<Self> {
        if period.is_empty() {
            return Err(Error::Precondition("period must be nonempty"));
        }
        Ok(PeriodicCode { preperiod, period, tail })
    }

    /// Digit `j` (0-based).
    pub fn digit(&self, j: usize) -> Digit {
        match self.preperiod.get(j) {
            Some(&d) => d,
            None => self.period[(j - self.preperiod.len()) % self.period.len()],
        }
    }

    /// True when the code ends in 0^ω.
    pub fn ends_in_zeros(&self) -> bool {
        self.period.iter().all(|&d| d == Digit::ZERO)
    }

    /// The first `m` digits as a finite code carrying this code's tail.
    pub fn truncate(&self, m: usize) -> FifeCode {
        FifeCode::new((0..m).map(|j| self.digit(j)).collect(), self.tail)
    }
}

impl fmt::Display for PeriodicCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for d in &self.preperiod {
            write!(f, "{d}")?;
        }
        f.write_str("(")?;
        for d in &self.period {
            write!(f, "{d}")?;
        }
        f.write_str(")^w")?;
        if let Some(t) = self.tail {
            write!(f, "{t}")?;
        }
        Ok(())
    }
}

/// Either form of code text.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Code {
    Finite(FifeCode),
    Periodic(PeriodicCode),
}

impl fmt::Display for Code {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Code::Finite(c) => c.fmt(f),
            Code::Periodic(c) => c.fmt(f),
        }
    }
}

fn parse_digits(s: &str) -> Result<Vec<Digit>> {
    s.chars().map(Digit::from_char).collect()
}

impl FromStr for Code {
    type Err = Error;

    fn from_str(text: &str) -> Result<Code> {
        let syntax = |reason: &str| Error::CodeSyntax { text: text.to_string(), reason: reason.to_string() };
        let s = text.trim();
        let (body, tail) = match s.split_once(';') {
            Some((body, "1")) => (body, Some(Tail::ThueMorse)),
            Some((body, "3")) => (body, Some(Tail::Complement)),
            Some(_) => return Err(syntax("tail marker must be ;1 or ;3")),
            None => (s, None),
        };
        match body.split_once('(') {
            None => {
                let digits = parse_digits(body)?;
                if digits.is_empty() {
                    return Err(syntax("no digits"));
                }
                Ok(Code::Finite(FifeCode::new(digits, tail)))
            }
            Some((pre, rest)) => {
                let period = rest
                    .strip_suffix(")^w")
                    .or_else(|| rest.strip_suffix(")^ω"))
                    .ok_or_else(|| syntax("period must be written (digits)^w"))?;
                let period = parse_digits(period)?;
                if period.is_empty() {
                    return Err(syntax("empty period"));
                }
                Ok(Code::Periodic(PeriodicCode::new(parse_digits(pre)?, period, tail)?))
            }
        }
    }
}

impl FromStr for PeriodicCode {
    type Err = Error;

    fn from_str(s: &str) -> Result<PeriodicCode> {
        match s.parse::<Code>()? {
            Code::Periodic(c) => Ok(c),
            Code::Finite(_) => Err(Error::CodeSyntax {
                text: s.to_string(),
                reason: "expected an eventually periodic code".into(),
            }),
        }
    }
}

impl FromStr for FifeCode {
    type Err = Error;

    fn from_str(s: &str) -> Result<FifeCode> {
        match s.parse::<Code>()? {
            Code::Finite(c) => Ok(c),
            Code::Periodic(_) => Err(Error::CodeSyntax {
                text: s.to_string(),
                reason: "expected a finite code".into(),
            }),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum InvalidReason {
    UndefinedTransition { digit: Digit },
    /// The code ends in 0^ω but carries no tail marker.
    TailRequired,
    /// The 0-cycle entered does not admit the given tail.
    TailNotAdmissible { tail: Tail, cycle: ZeroCycle },
}

impl fmt::Display for InvalidReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            InvalidReason::UndefinedTransition { digit } => write!(f, "undefined transition on {digit}"),
            InvalidReason::TailRequired => f.write_str("tail required"),
            InvalidReason::TailNotAdmissible { tail, cycle } => {
                write!(f, "tail {tail} not admissible for zero cycle {cycle:?}")
            }
        }
    }
}

/// Where and why a code is rejected.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Invalid {
    /// 0-based digit index.
    pub position: usize,
    pub state: State,
    pub reason: InvalidReason,
}

impl fmt::Display for Invalid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} at digit {} in state {}", self.reason, self.position, self.state)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Validation {
    Valid,
    Invalid(Invalid),
}

impl Validation {
    pub fn is_valid(&self) -> bool {
        matches!(self, Validation::Valid)
    }
}

/// Follows a finite digit string from A; returns the state reached.
pub fn trace(digits: &[Digit]) -> std::result::Result<State, Invalid> {
    trace_from(State::A, digits, 0)
}

fn trace_from(from: State, digits: &[Digit], offset: usize) -> std::result::Result<State, Invalid> {
    transitions().run(from, digits).map_err(|(k, state)| Invalid {
        position: offset + k,
        state,
        reason: InvalidReason::UndefinedTransition { digit: digits[k] },
    })
}

/// Checks that the infinite path is defined from A, and for codes ending in
/// 0^ω that the tail marker is the one the entered 0-cycle allows.
pub fn validate(c: &PeriodicCode) -> Validation {
    match check(c) {
        Ok(()) => Validation::Valid,
        Err(e) => Validation::Invalid(e),
    }
}

fn check(c: &PeriodicCode) -> std::result::Result<(), Invalid> {
    let after_pre = trace(&c.preperiod)?;
    let base = c.preperiod.len();
    if c.ends_in_zeros() {
        // 0^ω: follow zeros until a state repeats or the path dies.
        let mut seen = [false; 11];
        let mut s = after_pre;
        let mut k = 0;
        while !seen[s.index()] {
            seen[s.index()] = true;
            s = trace_from(s, &[Digit::ZERO], base + k)?;
            k += 1;
        }
        let cycle = classify_zero_cycle(after_pre);
        let tail = c.tail.ok_or(Invalid { position: base, state: after_pre, reason: InvalidReason::TailRequired })?;
        if !tail.admitted_by(cycle) {
            return Err(Invalid {
                position: base,
                state: after_pre,
                reason: InvalidReason::TailNotAdmissible { tail, cycle },
            });
        }
        return Ok(());
    }
    let mut seen = [false; 11];
    let mut s = after_pre;
    let mut offset = base;
    while !seen[s.index()] {
        seen[s.index()] = true;
        s = trace_from(s, &c.period, offset)?;
        offset += c.period.len();
    }
    Ok(())
}

/// Maps the 5-letter prefixes of infinite overlap-free words to the unique
/// factor prefix `p` with `x = p μ(y)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DeterminationTable {
    map: BTreeMap<Word, Digit>,
}

/// Length of the words whose factorizations are inspected.
const TABLE_WINDOW: usize = 24;
/// Those words must extend to overlap-free words of this length.
const TABLE_HORIZON: usize = 48;

impl DeterminationTable {
    pub fn get(&self, prefix: &[Letter]) -> Option<Digit> {
        self.map.get(&Word::from_letters(prefix.to_vec())).copied()
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Word, Digit)> {
        self.map.iter().map(|(w, &d)| (w, d))
    }
}

/// Whether `x = p μ(y) r` with `|r| <= 1` and `y` overlap-free.
fn factors_through(x: &[Letter], p: Digit) -> bool {
    let Some(rest) = x.strip_prefix(p.prefix_letters()) else {
        return false;
    };
    let even = &rest[..rest.len() & !1];
    match Word::from_letters(even.to_vec()).mu_preimage() {
        Ok(y) => y.is_overlap_free(),
        Err(_) => false,
    }
}

/// Builds the table by enumerating every overlap-free word of length 48 and
/// factoring its 24-letter prefix against all five candidates.
pub fn build_determination_table() -> Result<DeterminationTable> {
    let mut windows = std::collections::BTreeSet::new();
    let _ = search_overlap_free::<()>(&[], TABLE_HORIZON, &mut |w| {
        windows.insert(Word::from_letters(w[..TABLE_WINDOW].to_vec()));
        ControlFlow::Continue(())
    });
    let mut map: BTreeMap<Word, Digit> = BTreeMap::new();
    for x in &windows {
        let key = x.prefix(5);
        for p in Digit::ALL {
            if !factors_through(x.letters(), p) {
                continue;
            }
            match map.get(&key) {
                Some(&q) if q != p => {
                    return Err(Error::AmbiguityDetected { prefix: key.to_string(), first: q, second: p })
                }
                _ => {
                    map.insert(key.clone(), p);
                }
            }
        }
    }
    Ok(DeterminationTable { map })
}

/// The shared table, built on first use.
pub fn determination_table() -> Result<&'static DeterminationTable> {
    static TABLE: OnceLock<Result<DeterminationTable>> = OnceLock::new();
    TABLE.get_or_init(build_determination_table).as_ref().map_err(Clone::clone)
}

/// One factorization step `x = p μ(y) r`, discarding a trailing unpaired
/// letter `r`.
pub fn restivo_salemi_step(x: &Word) -> Result<(Digit, Word)> {
    if x.len() < 5 {
        return Err(Error::Precondition("factorization needs at least 5 letters"));
    }
    let head = &x.letters()[..5];
    let p = determination_table()?
        .get(head)
        .ok_or_else(|| Error::NotInTable { prefix: Word::from_letters(head.to_vec()).to_string() })?;
    let rest = &x.letters()[p.prefix_letters().len()..];
    let y = Word::from_letters(rest[..rest.len() & !1].to_vec())
        .mu_preimage()
        .map_err(|e| match e {
            Error::NotMuImage { position } => Error::NotMuImage { position: position + p.prefix_letters().len() },
            other => other,
        })?;
    Ok((p, y))
}

/// Peels digits until fewer than five letters remain or `max_digits` have
/// been produced.
pub fn encode(x: &Word, max_digits: usize) -> Result<FifeCode> {
    let mut digits = Vec::new();
    let mut cur = x.clone();
    while cur.len() >= 5 && digits.len() < max_digits {
        let (p, y) = restivo_salemi_step(&cur)?;
        digits.push(p);
        cur = y;
    }
    Ok(FifeCode::new(digits, None))
}

/// The truncated expansion `p_{i₁} μ(p_{i₂} μ(⋯ μ(p'_{iₙ})))`, where a final
/// zero is replaced by the tail digit.
pub fn decode_prefix(c: &FifeCode) -> Result<Word> {
    let len = c.decoded_len()?;
    if len > MAX_DECODE_LEN as u128 {
        return Err(Error::LimitExceeded { what: "decoded length", value: len.min(u64::MAX as u128) as u64, max: MAX_DECODE_LEN as u64 });
    }
    let (last, init) = c.digits.split_last().ok_or(Error::EmptyCode)?;
    let last = if *last == Digit::ZERO { c.tail.ok_or(Error::TailRequired)?.digit() } else { *last };
    let mut w = last.prefix();
    for d in init.iter().rev() {
        w = d.prefix().concat(&w.mu());
    }
    Ok(w)
}

/// Length-`n` prefix of the word coded by a valid eventually periodic code.
pub fn decode_eventually_periodic(c: &PeriodicCode, n: usize) -> Result<Word> {
    if n > MAX_DECODE_LEN {
        return Err(Error::LimitExceeded { what: "decode length", value: n as u64, max: MAX_DECODE_LEN as u64 });
    }
    if let Validation::Invalid(e) = validate(c) {
        return Err(Error::InvalidCode(e.to_string()));
    }
    if n == 0 {
        return Ok(Word::new());
    }
    // Grow the truncation until it is long enough, stopping on a digit whose
    // truncated expansion is a genuine prefix (nonzero, or zero with a tail).
    let zeros = c.ends_in_zeros();
    let mut len: u128 = 0;
    let mut m = 0;
    loop {
        let d = c.digit(m);
        let effective = if d == Digit::ZERO && zeros && m >= c.preperiod.len() {
            c.tail.map(Tail::digit)
        } else if d == Digit::ZERO {
            None
        } else {
            Some(d)
        };
        m += 1;
        if let Some(e) = effective {
            let candidate = len + ((e.prefix_letters().len() as u128) << (m - 1));
            if candidate >= n as u128 {
                break;
            }
        }
        len += (d.prefix_letters().len() as u128) << (m - 1);
    }
    let mut letters = decode_prefix(&c.truncate(m))?.into_letters();
    letters.truncate(n);
    Ok(Word::from_letters(letters))
}

/// An infinite digit sequence, possibly ending in 0^ω with a tail marker.
pub trait InfiniteCode {
    fn digit(&self, j: usize) -> Digit;

    /// `Some((start, tail))` when every digit from `start` on is 0.
    fn zero_tail(&self) -> Option<(usize, Tail)>;
}

impl InfiniteCode for PeriodicCode {
    fn digit(&self, j: usize) -> Digit {
        PeriodicCode::digit(self, j)
    }

    fn zero_tail(&self) -> Option<(usize, Tail)> {
        if self.ends_in_zeros() {
            self.tail.map(|t| (self.preperiod.len(), t))
        } else {
            None
        }
    }
}

/// Letter `pos` of the coded word by descending through the levels
/// `x_j = p_{i_j} μ(x_{j+1})`, without materializing a prefix. `None` when the
/// descent does not settle within `1 << 16` levels.
pub fn letter_at<C: InfiniteCode + ?Sized>(code: &C, pos: usize) -> Option<Letter> {
    const MAX_LEVELS: usize = 1 << 16;
    let tail = code.zero_tail();
    let mut m = pos;
    let mut flip = 0u8;
    for j in 0..MAX_LEVELS {
        if let Some((start, t)) = tail {
            if j >= start {
                return Some(Letter::from_bit(t.first_letter().bit() ^ flip ^ (m.count_ones() as u8)));
            }
        }
        let p = code.digit(j).prefix_letters();
        if m < p.len() {
            return Some(Letter::from_bit(p[m].bit() ^ flip));
        }
        m -= p.len();
        flip ^= (m & 1) as u8;
        m >>= 1;
    }
    None
}

/// Every completion `digits · u · 0^ω; τ` where `u` is the shortest path to a
/// live 0-cycle and `τ` ranges over the tails that cycle admits.
pub fn zero_completions(digits: &[Digit]) -> std::result::Result<Vec<PeriodicCode>, Invalid> {
    let end = trace(digits)?;
    let bridge = path_to_zero_cycle(end);
    let cycle_state = transitions().run(end, &bridge).expect("bridge path is defined");
    let cycle = classify_zero_cycle(cycle_state);
    let mut pre = digits.to_vec();
    pre.extend_from_slice(&bridge);
    Ok(Tail::BOTH
        .into_iter()
        .filter(|t| t.admitted_by(cycle))
        .map(|t| PeriodicCode { preperiod: pre.clone(), period: vec![Digit::ZERO], tail: Some(t) })
        .collect())
}
