//! The 11-state automaton over the digit alphabet {0,1,2,3,4}.
//!
//! Each state names a set of infinite binary words `x` described by a guard
//! letter `g` and a required prefix `h`: `x` belongs to the state when `g x`
//! is overlap-free and `x` begins with `h`. Reading digit `a` in state `S`
//! moves to the state `T` with `x in T <=> p_a mu(x) in S`.
//!
//! The transition table is data, and [`certify`] re-derives it from the
//! overlap predicate alone by bounded exhaustive search.

use std::collections::VecDeque;
use std::fmt;
use std::ops::ControlFlow;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::words::{Letter, OverlapWitness, Word};

/// Largest depth accepted by the exhaustive checks (2^16 words).
pub const MAX_DEPTH: usize = 16;

/// Default depth for certification.
pub const DEFAULT_DEPTH: usize = 12;

/// A symbol of {0,1,2,3,4}, standing for the prefixes ε, 0, 00, 1, 11.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Digit(u8);

const PREFIXES: [&[Letter]; 5] = [
    &[],
    &[Letter::Zero],
    &[Letter::Zero, Letter::Zero],
    &[Letter::One],
    &[Letter::One, Letter::One],
];

impl Digit {
    pub const ALL: [Digit; 5] = [Digit(0), Digit(1), Digit(2), Digit(3), Digit(4)];
    pub const ZERO: Digit = Digit(0);

    pub fn new(d: u8) -> Option<Digit> {
        (d < 5).then_some(Digit(d))
    }

    pub fn value(self) -> u8 {
        self.0
    }

    pub fn index(self) -> usize {
        self.0 as usize
    }

    pub fn prefix_letters(self) -> &'static [Letter] {
        PREFIXES[self.index()]
    }

    pub fn prefix(self) -> Word {
        Word::from_letters(self.prefix_letters().to_vec())
    }

    /// The digit whose prefix is the complement of this one's.
    pub fn mirror(self) -> Digit {
        Digit([0, 3, 4, 1, 2][self.index()])
    }

    pub fn from_char(c: char) -> Result<Digit> {
        c.to_digit(10)
            .and_then(|d| Digit::new(d as u8))
            .ok_or(Error::InvalidDigit(c))
    }

    pub fn to_char(self) -> char {
        (b'0' + self.0) as char
    }
}

impl fmt::Display for Digit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl Serialize for Digit {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_u8(self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum State {
    A,
    B,
    C,
    D,
    E,
    F,
    G,
    H,
    I,
    J,
    K,
}

use State::*;

impl State {
    pub const ALL: [State; 11] = [A, B, C, D, E, F, G, H, I, J, K];

    pub fn index(self) -> usize {
        self as usize
    }

    /// Letter that must be prepended before membership in the overlap-free
    /// words is required.
    pub fn guard(self) -> &'static [Letter] {
        use Letter::{One as L1, Zero as L0};
        match self {
            A => &[],
            B | C | H | I | J => &[L1],
            D | E | F | G | K => &[L0],
        }
    }

    /// Prefix every member must begin with.
    pub fn required_prefix(self) -> &'static [Letter] {
        use Letter::{One as L1, Zero as L0};
        match self {
            A | B | D => &[],
            C => &[L1, L0, L1],
            E => &[L0, L1, L0],
            F => &[L1, L1],
            G | H => &[L1],
            I => &[L0, L0],
            J | K => &[L0],
        }
    }

    /// The state describing the complemented set.
    pub fn mirror(self) -> State {
        match self {
            A => A,
            B => D,
            D => B,
            C => E,
            E => C,
            F => I,
            I => F,
            G => J,
            J => G,
            H => K,
            K => H,
        }
    }

    pub fn name(self) -> char {
        (b'A' + self as u8) as char
    }

    pub fn from_name(s: &str) -> Option<State> {
        let mut chars = s.chars();
        let c = chars.next()?.to_ascii_uppercase();
        if chars.next().is_some() {
            return None;
        }
        State::ALL.iter().copied().find(|st| st.name() == c)
    }

    /// Finite-word membership: `guard · w` is overlap-free and `w` has
    /// `required_prefix` as a prefix (a too-short `w` is not a member).
    pub fn admits(self, w: &[Letter]) -> bool {
        if !w.starts_with(self.required_prefix()) {
            return false;
        }
        let mut buf = Vec::with_capacity(w.len() + 1);
        buf.extend_from_slice(self.guard());
        buf.extend_from_slice(w);
        crate::words::is_overlap_free(&buf)
    }
}

impl fmt::Display for State {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.name())
    }
}

impl Serialize for State {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// Partial transition map `State × Digit -> State`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TransitionTable {
    delta: [[Option<State>; 5]; 11],
}

const fn row(entries: [Option<State>; 5]) -> [Option<State>; 5] {
    entries
}

static TABLE: TransitionTable = TransitionTable {
    delta: [
        row([Some(A), Some(B), Some(C), Some(D), Some(E)]), // A
        row([Some(D), Some(B), None, Some(E), None]),       // B
        row([Some(F), None, None, Some(E), None]),          // C
        row([Some(B), Some(C), None, Some(D), None]),       // D
        row([Some(I), Some(C), None, None, None]),          // E
        row([None, None, None, Some(G), None]),             // F
        row([Some(H), None, None, Some(D), None]),          // G
        row([Some(G), None, None, Some(E), None]),          // H
        row([None, Some(J), None, None, None]),             // I
        row([Some(K), Some(B), None, None, None]),          // J
        row([Some(J), Some(C), None, None, None]),          // K
    ],
};

pub fn transitions() -> &'static TransitionTable {
    &TABLE
}

pub fn step(s: State, a: Digit) -> Option<State> {
    TABLE.get(s, a)
}

impl TransitionTable {
    pub fn empty() -> Self {
        TransitionTable { delta: [[None; 5]; 11] }
    }

    pub fn get(&self, s: State, a: Digit) -> Option<State> {
        self.delta[s.index()][a.index()]
    }

    pub fn set(&mut self, s: State, a: Digit, t: State) {
        self.delta[s.index()][a.index()] = Some(t);
    }

    /// Defined edges sorted by (state, digit).
    pub fn edges(&self) -> impl Iterator<Item = (State, Digit, State)> + '_ {
        State::ALL.into_iter().flat_map(move |s| {
            Digit::ALL
                .into_iter()
                .filter_map(move |a| self.get(s, a).map(|t| (s, a, t)))
        })
    }

    /// Undefined (state, digit) pairs sorted by (state, digit).
    pub fn gaps(&self) -> impl Iterator<Item = (State, Digit)> + '_ {
        State::ALL.into_iter().flat_map(move |s| {
            Digit::ALL
                .into_iter()
                .filter(move |&a| self.get(s, a).is_none())
                .map(move |a| (s, a))
        })
    }

    /// Follows `digits` from `from`; `Err((position, state))` names the first
    /// undefined step.
    pub fn run(&self, from: State, digits: &[Digit]) -> std::result::Result<State, (usize, State)> {
        digits.iter().enumerate().try_fold(from, |s, (k, &a)| self.get(s, a).ok_or((k, s)))
    }

    /// The table obtained by complementing every state's guard and prefix and
    /// relabelling digits 1<->3, 2<->4.
    pub fn mirrored(&self) -> TransitionTable {
        let mut out = TransitionTable::empty();
        for (s, a, t) in self.edges() {
            out.set(s.mirror(), a.mirror(), t.mirror());
        }
        out
    }

    pub fn to_dot(&self) -> String {
        let mut out = String::from("digraph fife {\n  rankdir=LR;\n  start [shape=point];\n  start -> A;\n");
        for s in State::ALL {
            let shape = if s == A { "doublecircle" } else { "circle" };
            out.push_str(&format!("  {s} [shape={shape}];\n"));
        }
        for (s, a, t) in self.edges() {
            out.push_str(&format!("  {s} -> {t} [label=\"{a}\"];\n"));
        }
        out.push_str("}\n");
        out
    }

    pub fn to_json(&self) -> String {
        #[derive(Serialize)]
        struct Edge {
            from: State,
            digit: Digit,
            to: State,
        }
        #[derive(Serialize)]
        struct Doc {
            start: State,
            states: Vec<State>,
            edges: Vec<Edge>,
        }
        let doc = Doc {
            start: A,
            states: State::ALL.to_vec(),
            edges: self.edges().map(|(from, digit, to)| Edge { from, digit, to }).collect(),
        };
        serde_json::to_string_pretty(&doc).expect("table serializes")
    }
}

fn check_depth(depth: usize) -> Result<()> {
    if depth == 0 {
        return Err(Error::DepthTooSmall);
    }
    if depth > MAX_DEPTH {
        return Err(Error::DepthTooLarge { depth, max: MAX_DEPTH });
    }
    Ok(())
}

/// `p_a · mu(y)` as a letter vector.
fn prefixed_image(a: Digit, y: &[Letter]) -> Vec<Letter> {
    let mut v = Vec::with_capacity(2 * y.len() + 2);
    v.extend_from_slice(a.prefix_letters());
    for &c in y {
        v.push(c);
        v.push(c.complement());
    }
    v
}

/// Checks, for every binary `y` of length `depth`, that
/// `y ∈ t  <=>  p_a mu(y) ∈ s` holds for the finite-word membership
/// [`State::admits`].
pub fn verify_transition(s: State, a: Digit, t: State, depth: usize) -> Result<bool> {
    check_depth(depth)?;
    let mut y = vec![Letter::Zero; depth];
    for bits in 0u32..1 << depth {
        for (i, c) in y.iter_mut().enumerate() {
            *c = Letter::from_bit((bits >> (depth - 1 - i)) as u8);
        }
        if t.admits(&y) != s.admits(&prefixed_image(a, &y)) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Why every continuation beginning with a given class prefix fails.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Refutation {
    /// `guard · p_a · mu(class)` contains this overlap.
    Overlap { word: Word, witness: OverlapWitness },
    /// `p_a · mu(class)` already disagrees with the state's required prefix.
    PrefixMismatch { word: Word },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RefutedClass {
    /// Every `y` beginning with this word is refuted.
    pub class: Word,
    pub refutation: Refutation,
}

/// Proof that no infinite word follows the digit from the state.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EmptinessCertificate {
    pub state: State,
    pub digit: Digit,
    pub depth: usize,
    pub classes: Vec<RefutedClass>,
}

impl EmptinessCertificate {
    /// Independently re-checks every class and that the classes cover all
    /// words of length `depth`.
    pub fn check(&self) -> bool {
        let classes_hold = self.classes.iter().all(|c| {
            let image = prefixed_image(self.digit, c.class.letters());
            match &c.refutation {
                Refutation::Overlap { word, witness } => {
                    let mut full = self.state.guard().to_vec();
                    full.extend_from_slice(&image);
                    full == word.letters() && witness.holds_in(&full)
                }
                Refutation::PrefixMismatch { word } => {
                    let need = self.state.required_prefix();
                    let common = need.len().min(image.len());
                    image == word.letters() && need[..common] != image[..common]
                }
            }
        });
        // Class prefixes form a complete prefix code iff their measures sum to 1.
        let measure: u64 = self
            .classes
            .iter()
            .map(|c| 1u64 << (self.depth - c.class.len().min(self.depth)))
            .sum();
        classes_hold && measure == 1u64 << self.depth
    }
}

/// Searches for a certificate that the transition `(s, a)` is empty, refuting
/// every continuation of length at most `depth`.
pub fn verify_empty(s: State, a: Digit, depth: usize) -> Result<EmptinessCertificate> {
    check_depth(depth)?;
    if step(s, a).is_some() {
        return Err(Error::TransitionPresent { state: s, digit: a });
    }
    let mut classes = Vec::new();
    let mut y = Vec::with_capacity(depth);
    let outcome = refute_from(s, a, depth, &mut y, &mut classes);
    match outcome {
        ControlFlow::Continue(()) => Ok(EmptinessCertificate { state: s, digit: a, depth, classes }),
        ControlFlow::Break(()) => Err(Error::NotRefutedAtDepth { state: s, digit: a, depth }),
    }
}

fn refute(s: State, a: Digit, y: &[Letter]) -> Option<Refutation> {
    let image = prefixed_image(a, y);
    let need = s.required_prefix();
    let common = need.len().min(image.len());
    if need[..common] != image[..common] {
        return Some(Refutation::PrefixMismatch { word: Word::from_letters(image) });
    }
    let mut full = s.guard().to_vec();
    full.extend_from_slice(&image);
    crate::words::find_overlap(&full).map(|witness| Refutation::Overlap {
        word: Word::from_letters(full),
        witness,
    })
}

fn refute_from(
    s: State,
    a: Digit,
    depth: usize,
    y: &mut Vec<Letter>,
    classes: &mut Vec<RefutedClass>,
) -> ControlFlow<()> {
    if let Some(refutation) = refute(s, a, y) {
        classes.push(RefutedClass { class: Word::from_letters(y.clone()), refutation });
        return ControlFlow::Continue(());
    }
    if y.len() == depth {
        return ControlFlow::Break(());
    }
    for c in Letter::BOTH {
        y.push(c);
        let r = refute_from(s, a, depth, y, classes);
        y.pop();
        r?;
    }
    ControlFlow::Continue(())
}

/// [`verify_empty`] at `depth`, retried once at double depth (capped at
/// [`MAX_DEPTH`]).
pub fn verify_empty_auto(s: State, a: Digit, depth: usize) -> Result<EmptinessCertificate> {
    match verify_empty(s, a, depth) {
        Err(Error::NotRefutedAtDepth { .. }) if depth < MAX_DEPTH => {
            verify_empty(s, a, (2 * depth).min(MAX_DEPTH))
        }
        other => other,
    }
}

/// Outcome of re-deriving one (state, digit) pair from the overlap predicate.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Derived {
    Transition(State),
    Empty(EmptinessCertificate),
    /// Several targets, or none while the pair still admits continuations.
    Undetermined { targets: Vec<State> },
}

/// Result of re-deriving the whole table.
#[derive(Debug, Clone)]
pub struct Certification {
    pub depth: usize,
    pub derived: Vec<(State, Digit, Derived)>,
}

impl Certification {
    pub fn table(&self) -> TransitionTable {
        let mut t = TransitionTable::empty();
        for (s, a, d) in &self.derived {
            if let Derived::Transition(target) = d {
                t.set(*s, *a, *target);
            }
        }
        t
    }

    pub fn transitions_certified(&self) -> usize {
        self.derived.iter().filter(|(_, _, d)| matches!(d, Derived::Transition(_))).count()
    }

    pub fn certificates(&self) -> impl Iterator<Item = &EmptinessCertificate> {
        self.derived.iter().filter_map(|(_, _, d)| match d {
            Derived::Empty(c) => Some(c),
            _ => None,
        })
    }

    /// Whether the derived table equals the built-in one and every gap is
    /// backed by a valid certificate.
    pub fn agrees_with_table(&self) -> bool {
        self.table() == *transitions()
            && self.certificates().all(EmptinessCertificate::check)
            && self.certificates().count() == transitions().gaps().count()
    }
}

/// Re-derives every transition without consulting the built-in table: for
/// each (state, digit) the target is the unique state passing
/// [`verify_transition`], otherwise an emptiness certificate is sought.
pub fn certify(depth: usize) -> Result<Certification> {
    check_depth(depth)?;
    let mut derived = Vec::with_capacity(55);
    for s in State::ALL {
        for a in Digit::ALL {
            let mut targets = Vec::new();
            for t in State::ALL {
                if verify_transition(s, a, t, depth)? {
                    targets.push(t);
                }
            }
            let d = match targets.as_slice() {
                [t] => Derived::Transition(*t),
                [] => {
                    let mut classes = Vec::new();
                    let mut y = Vec::new();
                    match refute_from(s, a, depth, &mut y, &mut classes) {
                        ControlFlow::Continue(()) => Derived::Empty(EmptinessCertificate {
                            state: s,
                            digit: a,
                            depth,
                            classes,
                        }),
                        ControlFlow::Break(()) => Derived::Undetermined { targets },
                    }
                }
                _ => Derived::Undetermined { targets },
            };
            derived.push((s, a, d));
        }
    }
    Ok(Certification { depth, derived })
}

/// Digit strings of exactly `len` symbols readable from `from`, in
/// lexicographic order.
pub fn enumerate_paths(from: State, len: usize) -> Result<Vec<Vec<Digit>>> {
    const MAX_LEN: usize = 20;
    if len > MAX_LEN {
        return Err(Error::LimitExceeded { what: "path length", value: len as u64, max: MAX_LEN as u64 });
    }
    fn go(s: State, left: usize, path: &mut Vec<Digit>, out: &mut Vec<Vec<Digit>>) {
        if left == 0 {
            out.push(path.clone());
            return;
        }
        for a in Digit::ALL {
            if let Some(t) = step(s, a) {
                path.push(a);
                go(t, left - 1, path, out);
                path.pop();
            }
        }
    }
    let mut out = Vec::new();
    go(from, len, &mut Vec::with_capacity(len), &mut out);
    Ok(out)
}

/// Which tail markers a path ending in 0^ω admits, by the cycle it enters.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ZeroCycle {
    /// Cycle on A or between B and D: either tail.
    Both,
    /// Cycle between J and K: tail 1 only.
    Only1,
    /// Cycle between G and H: tail 3 only.
    Only3,
    /// The 0-path reaches a state without a 0-transition.
    Dies,
}

pub fn classify_zero_cycle(s: State) -> ZeroCycle {
    let mut seen = [false; 11];
    let mut cur = s;
    loop {
        if seen[cur.index()] {
            return match cur {
                A | B | D => ZeroCycle::Both,
                J | K => ZeroCycle::Only1,
                G | H => ZeroCycle::Only3,
                _ => unreachable!("no other state lies on a 0-cycle"),
            };
        }
        seen[cur.index()] = true;
        match step(cur, Digit::ZERO) {
            Some(next) => cur = next,
            None => return ZeroCycle::Dies,
        }
    }
}

/// Shortest (then lexicographically least) digit string leading from `s` to a
/// state whose 0-path does not die.
pub fn path_to_zero_cycle(s: State) -> Vec<Digit> {
    let mut prev: [Option<(State, Digit)>; 11] = [None; 11];
    let mut seen = [false; 11];
    let mut queue = VecDeque::from([s]);
    seen[s.index()] = true;
    while let Some(cur) = queue.pop_front() {
        if classify_zero_cycle(cur) != ZeroCycle::Dies {
            let mut path = Vec::new();
            let mut at = cur;
            while let Some((p, a)) = prev[at.index()] {
                path.push(a);
                at = p;
            }
            path.reverse();
            return path;
        }
        for a in Digit::ALL {
            if let Some(t) = step(cur, a) {
                if !seen[t.index()] {
                    seen[t.index()] = true;
                    prev[t.index()] = Some((cur, a));
                    queue.push_back(t);
                }
            }
        }
    }
    unreachable!("every state reaches a 0-cycle")
}

/// States reachable from `from` by defined transitions, in BFS order.
pub fn reachable(from: State) -> Vec<State> {
    let mut seen = [false; 11];
    let mut order = vec![from];
    seen[from.index()] = true;
    let mut k = 0;
    while k < order.len() {
        let cur = order[k];
        k += 1;
        for a in Digit::ALL {
            if let Some(t) = step(cur, a) {
                if !seen[t.index()] {
                    seen[t.index()] = true;
                    order.push(t);
                }
            }
        }
    }
    order
}
