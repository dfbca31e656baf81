//! 2-kernels and automata with output.
//!
//! The 2-kernel of `w` is the set of sequences `n ↦ w[2^e n + i]` with
//! `0 <= i < 2^e`. Exploring it breadth-first from `w` itself, each node has
//! an even child (`i`) and an odd child (`i + 2^e`). When the kernel is finite
//! its nodes are the states of an automaton reading `n` in base 2, least
//! significant bit first.
//!
//! Sequences are compared on a finite horizon, so two kernel sequences that
//! agree on that many letters are merged. [`build_dfao`] therefore checks the
//! compiled automaton against the decoded word before returning it.

use std::collections::HashMap;

use serde::Serialize;

use crate::codec::{decode_eventually_periodic, letter_at, validate, InfiniteCode, PeriodicCode, Validation};
use crate::error::{Error, Result};
use crate::words::{Letter, Word};

pub const MIN_HORIZON: usize = 64;
pub const DEFAULT_HORIZON: usize = 1024;
pub const DEFAULT_MAX_NODES: usize = 4096;

/// Anything that can produce letter `pos` of a (possibly infinite) word.
pub trait WordSource {
    /// `None` when the source does not reach `pos`.
    fn letter(&self, pos: usize) -> Option<Letter>;
}

impl WordSource for Word {
    fn letter(&self, pos: usize) -> Option<Letter> {
        self.get(pos)
    }
}

/// The infinite word coded by `C`, read letter by letter.
#[derive(Debug, Clone)]
pub struct Coded<C>(pub C);

impl<C: InfiniteCode> WordSource for Coded<C> {
    fn letter(&self, pos: usize) -> Option<Letter> {
        letter_at(&self.0, pos)
    }
}

/// Letters at positions congruent to `parity` mod 2.
pub fn decimate(w: &Word, parity: usize) -> Word {
    w.letters().iter().skip(parity).step_by(2).copied().collect()
}

/// Kernel sequence `n ↦ w[2^exponent · n + offset]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct KernelAddress {
    pub exponent: u32,
    pub offset: usize,
}

impl KernelAddress {
    pub const ROOT: KernelAddress = KernelAddress { exponent: 0, offset: 0 };

    pub fn child(self, bit: usize) -> Option<KernelAddress> {
        let exponent = self.exponent.checked_add(1).filter(|&e| e < usize::BITS)?;
        let offset = self.offset.checked_add(bit << self.exponent)?;
        Some(KernelAddress { exponent, offset })
    }

    pub fn position(self, n: usize) -> Option<usize> {
        n.checked_shl(self.exponent)
            .filter(|&v| v >> self.exponent == n)?
            .checked_add(self.offset)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KernelNode {
    /// Address at which the node was first found.
    pub address: KernelAddress,
    pub prefix: Word,
    /// Node ids of the even and odd decimations, once expanded.
    pub children: [Option<usize>; 2],
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KernelExploration {
    pub horizon: usize,
    pub nodes: Vec<KernelNode>,
    pub overflowed: bool,
}

impl KernelExploration {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }
}

fn sample<S: WordSource + ?Sized>(src: &S, at: KernelAddress, horizon: usize) -> Result<Word> {
    (0..horizon)
        .map(|n| {
            let pos = at.position(n).ok_or(Error::InsufficientPrefix { position: usize::MAX })?;
            src.letter(pos).ok_or(Error::InsufficientPrefix { position: pos })
        })
        .collect::<Result<Vec<_>>>()
        .map(Word::from_letters)
}

/// Breadth-first exploration of the 2-kernel of `src`, identifying sequences
/// by their first `horizon` letters. Stops with `overflowed = true` as soon
/// as a node beyond `max_nodes` would be created.
pub fn kernel_explore<S: WordSource + ?Sized>(
    src: &S,
    horizon: usize,
    max_nodes: usize,
) -> Result<KernelExploration> {
    if horizon < MIN_HORIZON {
        return Err(Error::HorizonTooShort { horizon, min: MIN_HORIZON });
    }
    if max_nodes == 0 {
        return Err(Error::Precondition("max_nodes must be positive"));
    }
    let root = sample(src, KernelAddress::ROOT, horizon)?;
    let mut index: HashMap<Word, usize> = HashMap::from([(root.clone(), 0)]);
    let mut nodes = vec![KernelNode { address: KernelAddress::ROOT, prefix: root, children: [None; 2] }];
    let mut next = 0;
    while next < nodes.len() {
        let address = nodes[next].address;
        for bit in 0..2 {
            let child = address.child(bit).ok_or(Error::InsufficientPrefix { position: usize::MAX })?;
            let prefix = sample(src, child, horizon)?;
            let id = match index.get(&prefix) {
                Some(&id) => id,
                None if nodes.len() == max_nodes => {
                    return Ok(KernelExploration { horizon, nodes, overflowed: true });
                }
                None => {
                    let id = nodes.len();
                    index.insert(prefix.clone(), id);
                    nodes.push(KernelNode { address: child, prefix, children: [None; 2] });
                    id
                }
            };
            nodes[next].children[bit] = Some(id);
        }
        next += 1;
    }
    Ok(KernelExploration { horizon, nodes, overflowed: false })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DfaoState {
    pub out: Letter,
    /// Successor on input bit 0 and 1.
    pub on: [usize; 2],
}

/// Deterministic automaton with output reading `n` least significant bit
/// first.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dfao {
    pub start: usize,
    pub states: Vec<DfaoState>,
}

impl Dfao {
    /// Each kernel node becomes a state; fails if the exploration did not close.
    pub fn from_kernel(k: &KernelExploration) -> Option<Dfao> {
        if k.overflowed {
            return None;
        }
        let states = k
            .nodes
            .iter()
            .map(|node| {
                Some(DfaoState { out: node.prefix.get(0)?, on: [node.children[0]?, node.children[1]?] })
            })
            .collect::<Option<Vec<_>>>()?;
        Some(Dfao { start: 0, states })
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn eval(&self, mut n: u64) -> Letter {
        let mut s = self.start;
        while n != 0 {
            s = self.states[s].on[(n & 1) as usize];
            n >>= 1;
        }
        self.states[s].out
    }

    pub fn to_json(&self) -> String {
        #[derive(Serialize)]
        struct StateDoc {
            id: usize,
            out: u8,
            on0: usize,
            on1: usize,
        }
        #[derive(Serialize)]
        struct Doc {
            start: usize,
            states: Vec<StateDoc>,
            bit_order: &'static str,
        }
        let doc = Doc {
            start: self.start,
            states: self
                .states
                .iter()
                .enumerate()
                .map(|(id, s)| StateDoc { id, out: s.out.bit(), on0: s.on[0], on1: s.on[1] })
                .collect(),
            bit_order: "lsb-first",
        };
        serde_json::to_string_pretty(&doc).expect("dfao serializes")
    }
}

pub fn dfao_eval(d: &Dfao, n: u64) -> Letter {
    d.eval(n)
}

/// Compiles the word coded by `c` into an automaton with the default horizon
/// and node budget.
pub fn build_dfao(c: &PeriodicCode) -> Result<Dfao> {
    build_dfao_with(c, DEFAULT_HORIZON, DEFAULT_MAX_NODES)
}

pub fn build_dfao_with(c: &PeriodicCode, horizon: usize, max_nodes: usize) -> Result<Dfao> {
    if let Validation::Invalid(e) = validate(c) {
        return Err(Error::InvalidCode(e.to_string()));
    }
    let kernel = kernel_explore(&Coded(c.clone()), horizon, max_nodes)?;
    let dfao = Dfao::from_kernel(&kernel).ok_or(Error::KernelOverflow { max_nodes })?;
    let check_len = 4 * horizon;
    let expected = decode_eventually_periodic(c, check_len)?;
    if let Some(position) = (0..check_len).find(|&n| dfao.eval(n as u64) != expected[n]) {
        return Err(Error::VerificationFailed { position });
    }
    Ok(dfao)
}

/// For a purely periodic code `z^ω` with `k = |z|`, the word satisfies
/// `w = seed · μ^k(w)` with `seed = p_{z₁} μ(p_{z₂}) ⋯ μ^{k-1}(p_{z_k})`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SeedExpansion {
    pub seed: Word,
    pub power: u32,
}

impl SeedExpansion {
    /// Prefix of `seed · φ(seed) · φ²(seed) ⋯` with `φ = μ^power`.
    pub fn expand(&self, n: usize) -> Word {
        let mut out = Word::with_capacity(n);
        let mut block = self.seed.clone();
        while out.len() < n && !block.is_empty() {
            out.extend_from(&block);
            block = block.mu_pow(self.power);
        }
        out.prefix(n)
    }
}

pub fn seed_expansion(c: &PeriodicCode) -> Result<SeedExpansion> {
    if !c.preperiod.is_empty() {
        return Err(Error::Precondition("seed expansion needs an empty preperiod"));
    }
    if c.ends_in_zeros() {
        return Err(Error::Precondition("seed expansion needs a period with a nonzero digit"));
    }
    let seed = c
        .period
        .iter()
        .enumerate()
        .fold(Word::new(), |acc, (j, d)| acc.concat(&d.prefix().mu_pow(j as u32)));
    Ok(SeedExpansion { seed, power: c.period.len() as u32 })
}

/// Size of `{ u μ^i(v) μ^{i+k}(v) ⋯ : |u| <= 2|seed|, v ∈ {seed, seed̄}, 1 <= i <= k }`
/// counting every binary `u`, saturating at `u128::MAX`.
pub fn kernel_superset_bound(s: &SeedExpansion) -> u128 {
    let exp = 2 * s.seed.len() as u32 + 1;
    let prefixes = if exp >= 128 { u128::MAX } else { (1u128 << exp) - 1 };
    prefixes.saturating_mul(2).saturating_mul(s.power as u128)
}
