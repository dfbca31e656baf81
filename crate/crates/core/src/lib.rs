//! Infinite binary overlap-free words as codes accepted by an 11-state
//! automaton over the digits {0,1,2,3,4}.
//!
//! - [`words`]: binary words, the overlap predicate, the Thue-Morse morphism.
//! - [`automaton`]: the automaton, with bounded exhaustive certification.
//! - [`codec`]: encoding words to codes and decoding codes to words.
//! - [`automaticity`]: 2-kernels and automata with output for periodic codes.
//! - [`analysis`]: the lexicographically least word, fragility, enumeration.

pub mod analysis;
pub mod automaticity;
pub mod automaton;
pub mod cli;
pub mod codec;
pub mod error;
pub mod words;

pub use automaton::{Digit, State};
pub use codec::{Code, FifeCode, PeriodicCode, Tail};
pub use error::{Error, Result};
pub use words::{Letter, OverlapWitness, Word};
