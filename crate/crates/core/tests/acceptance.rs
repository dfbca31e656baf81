//! Acceptance suite: one PASS/FAIL line per criterion. Runs as a plain
//! binary (`harness = false`) and exits nonzero if any criterion fails.

use std::collections::HashSet;
use std::panic::{self, AssertUnwindSafe};
use std::time::{Duration, Instant};

use fife::analysis::{
    count_overlap_free, fragility_pair, lex_least_code, lex_least_oracle, short_overlap_free_by_filter,
    uncountable_family_sample, ThueMorseChoiceCode,
};
use fife::automaticity::{build_dfao, kernel_explore, Coded};
use fife::automaton::{certify, enumerate_paths, transitions};
use fife::codec::{decode_eventually_periodic, decode_prefix, encode, trace, validate, zero_completions};
use fife::words::{thue_morse, zeros_parity_word};
use fife::{Code, Digit, FifeCode, Letter, PeriodicCode, State, Tail, Word};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Check = fn() -> Result<String, String>;

/// Wall-clock budget for re-deriving the automaton.
const CERTIFY_BUDGET: Duration = Duration::from_secs(60);
const CERTIFY_DEPTH: usize = 12;
const ROUNDTRIP_MAX_DIGITS: usize = 8;
const ROUNDTRIP_DECODE_LEN: usize = 4096;
const RANDOM_CODES: usize = 1000;
const RANDOM_CODE_LEN: usize = 14;
const RNG_SEED: u64 = 0x5eed_f1fe;
const MU_IDENTITY_MAX_LEN: usize = 12;
const DFAO_CHECK_LEN: usize = 4096;
const KERNEL_HORIZONS: [usize; 4] = [64, 256, 1024, 4096];
const KERNEL_THRESHOLDS: [usize; 3] = [8, 16, 32];
const FRAGILITY_HORIZON: usize = 1 << 13;

fn periodic(text: &str) -> PeriodicCode {
    match text.parse::<Code>() {
        Ok(Code::Periodic(c)) => c,
        other => panic!("{text} is not a periodic code: {other:?}"),
    }
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn err(e: fife::Error) -> String {
    e.to_string()
}

fn automaton_certification() -> Result<String, String> {
    let start = Instant::now();
    let cert = certify(CERTIFY_DEPTH).map_err(err)?;
    let elapsed = start.elapsed();
    let transitions_certified = cert.transitions_certified();
    let certificates = cert.certificates().count();
    ensure(transitions_certified == 25, || format!("{transitions_certified} transitions certified"))?;
    ensure(certificates == 30, || format!("{certificates} emptiness certificates"))?;
    ensure(cert.certificates().all(|c| c.depth <= CERTIFY_DEPTH && c.check()), || {
        "a certificate fails its re-check".into()
    })?;
    ensure(cert.agrees_with_table(), || "re-derived table differs from the built-in one".into())?;
    ensure(elapsed < CERTIFY_BUDGET, || format!("took {elapsed:?}"))?;
    Ok(format!("25 transitions, 30 certificates at L={CERTIFY_DEPTH} in {elapsed:.2?}"))
}

fn thue_morse_identity() -> Result<String, String> {
    let n = 1 << 14;
    for (code, first) in [("(0)^w;1", Letter::Zero), ("(0)^w;3", Letter::One)] {
        let w = decode_eventually_periodic(&periodic(code), n).map_err(err)?;
        ensure(w == thue_morse(n, first), || format!("{code} differs from the Thue-Morse word"))?;
    }
    Ok(format!("both tails match to {n} letters"))
}

fn lex_least() -> Result<String, String> {
    let n = 128;
    let code = lex_least_code();
    let decoded = decode_eventually_periodic(&code, n).map_err(err)?;
    let expected: Word = "001001".parse::<Word>().unwrap().concat(&thue_morse(n - 6, Letter::One));
    ensure(decoded == expected, || "decode differs from 001001 followed by the complemented Thue-Morse word".into())?;
    let oracle = lex_least_oracle(n).map_err(err)?;
    ensure(decoded == oracle, || "decode differs from the backtracking oracle".into())?;
    let wrong_tail = PeriodicCode { tail: Some(Tail::ThueMorse), ..code.clone() };
    ensure(!validate(&wrong_tail).is_valid(), || format!("{wrong_tail} was accepted"))?;
    Ok(format!("{code} matches the oracle to {n} letters; {wrong_tail} rejected"))
}

fn zeros_parity() -> Result<String, String> {
    let n = 4096;
    let w = decode_eventually_periodic(&periodic("2(31)^w"), n).map_err(err)?;
    ensure(w == zeros_parity_word(n), || "2(31)^w differs from the zeros-parity word".into())?;
    Ok(format!("equal to {n} letters"))
}

fn codec_roundtrip() -> Result<String, String> {
    let mut checked = 0usize;
    for len in 1..=ROUNDTRIP_MAX_DIGITS {
        for digits in enumerate_paths(State::A, len).map_err(err)? {
            let completions = zero_completions(&digits).map_err(|e| e.to_string())?;
            ensure(!completions.is_empty(), || format!("no completion for {digits:?}"))?;
            for c in completions {
                let w = decode_eventually_periodic(&c, ROUNDTRIP_DECODE_LEN).map_err(err)?;
                if let Some(witness) = w.find_overlap() {
                    return Err(format!("{c} decodes with an overlap at {}", witness.start));
                }
                let back = encode(&w, len).map_err(err)?;
                ensure(back.digits == digits, || format!("{c} re-encodes as {back}"))?;
                checked += 1;
            }
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(RNG_SEED);
    let mut sampled = 0;
    while sampled < RANDOM_CODES {
        let mut digits = Vec::with_capacity(RANDOM_CODE_LEN);
        let mut state = State::A;
        while digits.len() < RANDOM_CODE_LEN {
            let options: Vec<(Digit, State)> =
                Digit::ALL.iter().filter_map(|&d| transitions().get(state, d).map(|t| (d, t))).collect();
            let (d, t) = options[rng.gen_range(0..options.len())];
            digits.push(d);
            state = t;
        }
        let tail = if digits.last() == Some(&Digit::ZERO) {
            let tails: Vec<Tail> = Tail::BOTH
                .into_iter()
                .filter(|t| state.required_prefix().first().is_none_or(|&l| l == t.first_letter()))
                .collect();
            if tails.is_empty() {
                continue;
            }
            Some(tails[rng.gen_range(0..tails.len())])
        } else {
            None
        };
        let code = FifeCode::new(digits, tail);
        let w = decode_prefix(&code).map_err(err)?;
        if let Some(witness) = w.find_overlap() {
            return Err(format!("{code} decodes with an overlap at {}", witness.start));
        }
        sampled += 1;
    }
    Ok(format!("{checked} completed codes re-encoded; {RANDOM_CODES} random codes overlap-free"))
}

fn all_words(len: usize) -> impl Iterator<Item = Word> {
    (0u32..1 << len).map(move |bits| Word::from_fn(len, |i| Letter::from_bit(((bits >> i) & 1) as u8)))
}

fn mu_prefix_identities() -> Result<String, String> {
    let mut checks = 0usize;
    for len in 0..=MU_IDENTITY_MAX_LEN {
        for x in all_words(len) {
            let mu = x.mu();
            ensure(x.is_overlap_free() == mu.is_overlap_free(), || format!("(a) fails for {x}"))?;
            checks += 1;
            for a in Letter::BOTH {
                let single = Word::from_letters(vec![a]);
                let bar = Word::from_letters(vec![a.complement()]);
                let bar_x_free = bar.concat(&x).is_overlap_free();
                ensure(single.concat(&mu).is_overlap_free() == bar_x_free, || format!("(b) fails for {a}, {x}"))?;
                checks += 1;
                if len >= 3 {
                    let double = Word::from_letters(vec![a, a]);
                    let head = Word::from_letters(vec![a.complement(), a, a.complement()]);
                    ensure(
                        double.concat(&mu).is_overlap_free() == (bar_x_free && x.starts_with(&head)),
                        || format!("(c) fails for {a}, {x}"),
                    )?;
                    checks += 1;
                }
            }
        }
    }
    Ok(format!("{checks} checks up to length {MU_IDENTITY_MAX_LEN}"))
}

fn automaticity_forward() -> Result<String, String> {
    let third = if validate(&periodic("(3)^w")).is_valid() { "(3)^w" } else { "(31)^w" };
    let suite = ["(0)^w;1", "(0)^w;3", third, "2(31)^w", "203(0)^w;3", "1(113011)^w"];
    let mut sizes = Vec::new();
    for text in suite {
        let code = periodic(text);
        let dfao = build_dfao(&code).map_err(err)?;
        let direct = decode_eventually_periodic(&code, DFAO_CHECK_LEN).map_err(err)?;
        for n in 0..DFAO_CHECK_LEN {
            ensure(dfao.eval(n as u64) == direct[n], || format!("{text} differs at {n}"))?;
        }
        sizes.push(format!("{text}:{}", dfao.len()));
    }
    let tm = build_dfao(&periodic("(0)^w;1")).map_err(err)?;
    ensure(tm.len() == 2, || format!("Thue-Morse automaton has {} states", tm.len()))?;
    Ok(format!("states {}", sizes.join(" ")))
}

fn automaticity_reverse() -> Result<String, String> {
    let control = periodic("1(113011)^w");
    let mut counts = Vec::new();
    let mut control_counts = HashSet::new();
    for h in KERNEL_HORIZONS {
        let k = kernel_explore(&Coded(ThueMorseChoiceCode), h, usize::MAX).map_err(err)?;
        counts.push(k.len());
        control_counts.insert(kernel_explore(&Coded(control.clone()), h, usize::MAX).map_err(err)?.len());
    }
    ensure(counts.windows(2).all(|w| w[0] < w[1]), || format!("node counts {counts:?} not strictly increasing"))?;
    ensure(counts.iter().zip(KERNEL_THRESHOLDS).all(|(&c, t)| c > t), || format!("node counts {counts:?} too small"))?;
    ensure(control_counts.len() == 1, || format!("periodic control varies: {control_counts:?}"))?;
    Ok(format!("nodes {counts:?} at horizons {KERNEL_HORIZONS:?}; periodic control constant"))
}

fn fragility() -> Result<String, String> {
    let mut firsts = Vec::new();
    for j in 1..=3 {
        let pair = fragility_pair(j, FRAGILITY_HORIZON).map_err(err)?;
        ensure(pair.word_a.is_overlap_free() && pair.word_b.is_overlap_free(), || format!("block {j} has an overlap"))?;
        let first = *pair.diff_positions.first().ok_or_else(|| format!("block {j}: words are equal"))?;
        firsts.push(first);
    }
    ensure(firsts.windows(2).all(|w| w[0] < w[1]), || format!("first differences {firsts:?} not increasing"))?;
    ensure(firsts[2] > 1000, || format!("first differences {firsts:?} stay below 1000"))?;
    Ok(format!("first differences {firsts:?} at horizon {FRAGILITY_HORIZON}"))
}

fn enumeration() -> Result<String, String> {
    let counts: Vec<u64> = (1..=5).map(count_overlap_free).collect::<fife::Result<_>>().map_err(err)?;
    let filtered: Vec<u64> = (1..=5).map(|n| short_overlap_free_by_filter(n).len() as u64).collect();
    ensure(counts == filtered, || format!("search {counts:?} vs filter {filtered:?}"))?;
    ensure(counts == [2, 4, 6, 10, 14], || format!("counts {counts:?}"))?;
    Ok(format!("{counts:?}"))
}

fn uncountable_family() -> Result<String, String> {
    let mut seen = HashSet::new();
    for choices in all_words(5) {
        let path = uncountable_family_sample(&choices).map_err(err)?;
        ensure(transitions().run(State::K, &path) == Ok(State::K), || format!("{choices} leaves the K loop"))?;
        // 13010 leads from A to K.
        let mut full: Vec<Digit> = "13010".chars().map(|c| Digit::from_char(c).unwrap()).collect();
        full.extend_from_slice(&path);
        ensure(trace(&full).is_ok(), || format!("{choices} is not readable from A"))?;
        ensure(seen.insert(path), || format!("{choices} repeats an earlier path"))?;
    }
    Ok(format!("{} distinct K-to-K paths", seen.len()))
}

fn main() {
    let criteria: [(&str, Check); 11] = [
        ("automaton certification", automaton_certification),
        ("Thue-Morse identity", thue_morse_identity),
        ("lexicographically least word", lex_least),
        ("zeros-parity word", zeros_parity),
        ("codec roundtrip", codec_roundtrip),
        ("μ prefix identities", mu_prefix_identities),
        ("automaticity of periodic codes", automaticity_forward),
        ("kernel growth of an aperiodic code", automaticity_reverse),
        ("fragility counterexamples", fragility),
        ("enumeration oracle", enumeration),
        ("uncountable family witness", uncountable_family),
    ];
    panic::set_hook(Box::new(|_| {}));
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let outcome = panic::catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|p| {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        match outcome {
            Ok(detail) => println!("PASS {:>2} {name}: {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {detail}", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
