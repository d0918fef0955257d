//! One-sided symbol sequences: substitution fixed points and the Rudin–Shapiro recurrence.

use std::collections::{BTreeMap, HashMap};

use rayon::prelude::*;
use serde::Serialize;

use super::substitution::Substitution;
use crate::error::{input_err, Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub enum Generator {
    FixedPoint { substitution: Substitution, seed: u8 },
    /// `v_0 = 1, v_{2n} = v_n, v_{2n+1} = (−1)^n v_n`, coded `+1 ↦ 0`, `−1 ↦ 1`.
    RudinShapiro,
    /// A fixed point pushed through the letter map `map[a]`.
    Projected { substitution: Substitution, seed: u8, map: Vec<u8> },
}

/// A lazily grown prefix `v_0 v_1 …` over the codes `0..alphabet.len()`.
#[derive(Clone, Debug)]
pub struct SymbolSequence {
    generator: Generator,
    alphabet: Vec<char>,
    spins: Vec<i8>,
    source: Vec<u8>,
    prefix: Vec<u8>,
}

impl SymbolSequence {
    pub fn new(generator: Generator, alphabet: Vec<char>, spins: Vec<i8>) -> Result<Self> {
        if alphabet.len() != spins.len() {
            return Err(input_err!("{} letters but {} spin values", alphabet.len(), spins.len()));
        }
        match &generator {
            Generator::FixedPoint { substitution, seed } => {
                substitution.check_seed(*seed)?;
                if substitution.alphabet().len() != alphabet.len() {
                    return Err(input_err!("alphabet does not match the substitution"));
                }
            }
            Generator::RudinShapiro => {
                if alphabet.len() != 2 {
                    return Err(input_err!("the recurrence produces two symbols"));
                }
            }
            Generator::Projected { substitution, seed, map } => {
                substitution.check_seed(*seed)?;
                if map.len() != substitution.alphabet().len() {
                    return Err(input_err!("letter map has {} entries for {} letters", map.len(), substitution.alphabet().len()));
                }
                if let Some(b) = map.iter().find(|&&b| b as usize >= alphabet.len()) {
                    return Err(input_err!("letter map target {b} outside the alphabet"));
                }
            }
        }
        Ok(SymbolSequence { generator, alphabet, spins, source: Vec::new(), prefix: Vec::new() })
    }

    /// The fixed point `ABACABDB…` with spins `A, B ↦ +1`, `C, D ↦ −1`.
    pub fn rudin_shapiro_letters() -> Self {
        let generator = Generator::FixedPoint { substitution: Substitution::rudin_shapiro(), seed: 0 };
        Self::new(generator, vec!['A', 'B', 'C', 'D'], vec![1, 1, -1, -1]).expect("valid")
    }

    /// The ±1 sequence from the recurrence.
    pub fn rudin_shapiro() -> Self {
        Self::new(Generator::RudinShapiro, vec!['+', '-'], vec![1, -1]).expect("valid")
    }

    /// The ±1 sequence as the projection of the four-letter fixed point.
    pub fn rudin_shapiro_projected() -> Self {
        let generator =
            Generator::Projected { substitution: Substitution::rudin_shapiro(), seed: 0, map: vec![0, 0, 1, 1] };
        Self::new(generator, vec!['+', '-'], vec![1, -1]).expect("valid")
    }

    pub fn fixed_point(substitution: Substitution, seed: char) -> Result<Self> {
        let seed = substitution.letter(seed)?;
        let alphabet = substitution.alphabet().to_vec();
        let spins = vec![0; alphabet.len()];
        Self::new(Generator::FixedPoint { substitution, seed }, alphabet, spins)
    }

    pub fn generator(&self) -> &Generator {
        &self.generator
    }

    pub fn alphabet(&self) -> &[char] {
        &self.alphabet
    }

    /// The value `f(x) = x_0` attached to each code.
    pub fn spin_values(&self) -> &[i8] {
        &self.spins
    }

    fn grow(&mut self, n: usize) {
        if self.prefix.len() >= n {
            return;
        }
        match &self.generator {
            Generator::RudinShapiro => {
                let v = &mut self.prefix;
                v.reserve(n - v.len());
                if v.is_empty() {
                    v.push(0);
                }
                for m in v.len()..n {
                    let i = m / 2;
                    let c = if m % 2 == 0 { v[i] } else { v[i] ^ (i & 1) as u8 };
                    v.push(c);
                }
            }
            Generator::FixedPoint { substitution, seed } | Generator::Projected { substitution, seed, .. } => {
                if self.source.is_empty() {
                    self.source.push(*seed);
                }
                while self.source.len() < n {
                    // the image of a fixed-point prefix is a longer prefix
                    self.source = substitution.apply(&self.source);
                }
                self.prefix = match &self.generator {
                    Generator::Projected { map, .. } => self.source[..n].iter().map(|&a| map[a as usize]).collect(),
                    _ => self.source[..n].to_vec(),
                };
            }
        }
    }

    /// The first `n` symbols; the cache only grows.
    pub fn prefix(&mut self, n: usize) -> &[u8] {
        self.grow(n);
        &self.prefix[..n]
    }

    pub fn spins(&mut self, n: usize) -> Vec<i8> {
        let table = self.spins.clone();
        self.prefix(n).iter().map(|&c| table[c as usize]).collect()
    }

    pub fn render(&mut self, n: usize) -> String {
        let alphabet = self.alphabet.clone();
        self.prefix(n).iter().map(|&c| alphabet[c as usize]).collect()
    }

    pub fn encode(&self, word: &str) -> Result<Vec<u8>> {
        word.chars()
            .map(|c| {
                self.alphabet
                    .iter()
                    .position(|&a| a == c)
                    .map(|i| i as u8)
                    .ok_or_else(|| input_err!("symbol {c:?} is not in the alphabet {:?}", self.alphabet))
            })
            .collect()
    }
}

/// `v_0 … v_{n−1}` of the Rudin–Shapiro sequence, in `O(n)`.
pub fn rudin_shapiro_prefix(n: usize) -> Vec<i8> {
    SymbolSequence::rudin_shapiro().spins(n)
}

/// Distinct factors of length `L` in a prefix of length `N`, with occurrence counts.
#[derive(Clone, Debug, PartialEq)]
pub struct Language {
    pub word_length: usize,
    pub scan_length: usize,
    pub words: BTreeMap<Vec<u8>, u64>,
}

impl Language {
    pub fn count(&self) -> usize {
        self.words.len()
    }
}

pub const DEFAULT_SCAN_FACTOR: usize = 64;

pub fn language(seq: &mut SymbolSequence, word_length: usize, scan_length: usize) -> Result<Language> {
    if word_length == 0 {
        return Err(input_err!("word length must be positive"));
    }
    if scan_length < word_length {
        return Err(input_err!("scan length {scan_length} shorter than word length {word_length}"));
    }
    let v = seq.prefix(scan_length);
    let mut counts: HashMap<&[u8], u64> = HashMap::new();
    for w in v.windows(word_length) {
        *counts.entry(w).or_default() += 1;
    }
    let words = counts.into_iter().map(|(w, c)| (w.to_vec(), c)).collect();
    Ok(Language { word_length, scan_length, words })
}

/// Number of distinct factors of length `L` in a prefix.
pub fn factor_count(seq: &mut SymbolSequence, word_length: usize, scan_length: usize) -> Result<usize> {
    if word_length == 0 || scan_length < word_length {
        return Err(input_err!("need 1 ≤ L ≤ N, got L = {word_length}, N = {scan_length}"));
    }
    let v = seq.prefix(scan_length);
    let mut seen: std::collections::HashSet<&[u8]> = std::collections::HashSet::new();
    seen.extend(v.windows(word_length));
    Ok(seen.len())
}

/// The factor set at scan length `64·L`, accepted only if doubling the scan adds nothing.
pub fn certified_language(seq: &mut SymbolSequence, word_length: usize) -> Result<Language> {
    let scan = DEFAULT_SCAN_FACTOR * word_length.max(1);
    let lang = language(seq, word_length, scan)?;
    let longer = factor_count(seq, word_length, 2 * scan)?;
    if longer != lang.count() {
        return Err(Error::Certification(format!(
            "factor count at length {word_length} grew from {} to {longer} when the scan doubled to {}",
            lang.count(),
            2 * scan
        )));
    }
    Ok(lang)
}

/// `Ω_z(v_0…v_{N−1}) / N`.
pub fn word_frequency(seq: &mut SymbolSequence, z: &[u8], scan_length: usize) -> Result<f64> {
    if z.is_empty() || scan_length < z.len() {
        return Err(input_err!("need 1 ≤ |z| ≤ N, got |z| = {}, N = {scan_length}", z.len()));
    }
    let v = seq.prefix(scan_length);
    let hits = v.windows(z.len()).filter(|w| *w == z).count();
    Ok(hits as f64 / scan_length as f64)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FrequencyTrace {
    pub samples: Vec<(usize, f64)>,
    /// `|f(N_last) − f(N_last/2)|`.
    pub fluctuation: f64,
}

/// Frequencies at `N_0, 2N_0, …, 2^steps N_0`.
pub fn frequency_doublings(seq: &mut SymbolSequence, z: &[u8], n0: usize, steps: u32) -> Result<FrequencyTrace> {
    let mut samples = Vec::new();
    for s in 0..=steps {
        let n = n0 << s;
        samples.push((n, word_frequency(seq, z, n)?));
    }
    let fluctuation = match samples.len() {
        0 | 1 => 0.0,
        l => (samples[l - 1].1 - samples[l - 2].1).abs(),
    };
    Ok(FrequencyTrace { samples, fluctuation })
}

const CORRELATION_CHUNK: usize = 1 << 16;

fn lagged_sum(s: &[i8], k: usize, n: usize) -> i64 {
    (0..n)
        .into_par_iter()
        .step_by(CORRELATION_CHUNK)
        .map(|start| {
            let end = (start + CORRELATION_CHUNK).min(n);
            s[start..end].iter().zip(&s[start + k..end + k]).map(|(&a, &b)| (a * b) as i64).sum::<i64>()
        })
        .sum()
}

/// `(1/N) Σ_{n<N} f(v_n) f(v_{n+k})`, with an exact integer sum.
pub fn correlation(seq: &mut SymbolSequence, k: usize, scan_length: usize) -> Result<f64> {
    Ok(correlations(seq, &[k], scan_length)?[0])
}

pub fn correlations(seq: &mut SymbolSequence, lags: &[usize], scan_length: usize) -> Result<Vec<f64>> {
    if scan_length == 0 {
        return Err(input_err!("scan length must be positive"));
    }
    let kmax = lags.iter().copied().max().unwrap_or(0);
    let s = seq.spins(scan_length + kmax);
    Ok(lags.iter().map(|&k| lagged_sum(&s, k, scan_length) as f64 / scan_length as f64).collect())
}
