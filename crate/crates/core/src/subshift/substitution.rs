//! Substitutions `ζ: 𝒜 → 𝒜*` on small alphabets.

use crate::error::{input_err, Result};

/// Letters are stored as indices into `alphabet`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Substitution {
    alphabet: Vec<char>,
    rules: Vec<Vec<u8>>,
}

impl Substitution {
    /// Builds from `(letter, image)` pairs; the alphabet is the set of rule letters in order.
    pub fn new(rules: &[(char, &str)]) -> Result<Self> {
        if rules.is_empty() {
            return Err(input_err!("a substitution needs at least one rule"));
        }
        if rules.len() > u8::MAX as usize {
            return Err(input_err!("alphabet of {} letters is too large", rules.len()));
        }
        let alphabet: Vec<char> = rules.iter().map(|r| r.0).collect();
        for (i, a) in alphabet.iter().enumerate() {
            if alphabet[..i].contains(a) {
                return Err(input_err!("letter {a:?} has two rules"));
            }
        }
        let mut s = Substitution { alphabet, rules: Vec::new() };
        for (a, img) in rules {
            if img.is_empty() {
                return Err(input_err!("rule for {a:?} has an empty image"));
            }
            let w = s.encode(img)?;
            s.rules.push(w);
        }
        Ok(s)
    }

    /// Parses lines of the form `X -> YZ`; blank lines and `#` comments are ignored.
    pub fn parse(text: &str) -> Result<Self> {
        let mut rules = Vec::new();
        for (ln, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (lhs, rhs) =
                line.split_once("->").ok_or_else(|| input_err!("line {}: expected `X -> word`", ln + 1))?;
            let lhs = lhs.trim();
            let mut chars = lhs.chars();
            let a = match (chars.next(), chars.next()) {
                (Some(a), None) => a,
                _ => return Err(input_err!("line {}: left side {lhs:?} must be one letter", ln + 1)),
            };
            rules.push((a, rhs.trim().to_string()));
        }
        let borrowed: Vec<(char, &str)> = rules.iter().map(|(a, w)| (*a, w.as_str())).collect();
        Self::new(&borrowed)
    }

    /// `A ↦ AB, B ↦ AC, C ↦ DB, D ↦ DC`.
    pub fn rudin_shapiro() -> Self {
        Self::new(&[('A', "AB"), ('B', "AC"), ('C', "DB"), ('D', "DC")]).expect("valid rules")
    }

    pub fn alphabet(&self) -> &[char] {
        &self.alphabet
    }

    pub fn letter(&self, c: char) -> Result<u8> {
        self.alphabet
            .iter()
            .position(|&a| a == c)
            .map(|i| i as u8)
            .ok_or_else(|| input_err!("symbol {c:?} is not in the alphabet {:?}", self.alphabet))
    }

    pub fn encode(&self, word: &str) -> Result<Vec<u8>> {
        word.chars().map(|c| self.letter(c)).collect()
    }

    pub fn decode(&self, word: &[u8]) -> String {
        word.iter().map(|&i| self.alphabet[i as usize]).collect()
    }

    pub fn image(&self, a: u8) -> &[u8] {
        &self.rules[a as usize]
    }

    pub fn apply(&self, word: &[u8]) -> Vec<u8> {
        let mut out = Vec::with_capacity(word.len() * 2);
        for &a in word {
            out.extend_from_slice(&self.rules[a as usize]);
        }
        out
    }

    pub fn iterate(&self, word: &[u8], steps: usize) -> Vec<u8> {
        let mut w = word.to_vec();
        for _ in 0..steps {
            w = self.apply(&w);
        }
        w
    }

    /// Whether some `ζ^k`, `k ≤ |𝒜|²`, maps every letter to a word containing every letter.
    pub fn is_primitive(&self) -> bool {
        let n = self.alphabet.len();
        let step: Vec<Vec<bool>> =
            (0..n).map(|a| (0..n).map(|b| self.rules[a].contains(&(b as u8))).collect()).collect();
        let mut reach = step.clone();
        for _ in 0..n * n {
            if reach.iter().all(|row| row.iter().all(|&x| x)) {
                return true;
            }
            reach = (0..n)
                .map(|a| (0..n).map(|b| (0..n).any(|c| reach[a][c] && step[c][b])).collect())
                .collect();
        }
        false
    }

    /// `ζ(a)` must start with `a` and have at least two letters.
    pub fn check_seed(&self, a: u8) -> Result<()> {
        let img = self.rules.get(a as usize).ok_or_else(|| input_err!("seed index {a} outside the alphabet"))?;
        if img.len() < 2 || img[0] != a {
            return Err(input_err!(
                "ζ({}) = {} does not start with the seed and extend it",
                self.alphabet[a as usize],
                self.decode(img)
            ));
        }
        Ok(())
    }

    /// The first `n` letters of the fixed point `lim ζ^k(a)`.
    pub fn fixed_point_prefix(&self, seed: u8, n: usize) -> Result<Vec<u8>> {
        self.check_seed(seed)?;
        let mut w = vec![seed];
        while w.len() < n {
            w = self.apply(&w);
        }
        w.truncate(n);
        Ok(w)
    }
}

/// `ζ^steps(start)` on letters.
pub fn iterate_substitution(s: &Substitution, start: &str, steps: usize) -> Result<String> {
    let w = s.encode(start)?;
    Ok(s.decode(&s.iterate(&w, steps)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rudin_shapiro_iterates() {
        let s = Substitution::rudin_shapiro();
        assert_eq!(iterate_substitution(&s, "A", 1).unwrap(), "AB");
        assert_eq!(iterate_substitution(&s, "A", 3).unwrap(), "ABACABDB");
        assert_eq!(iterate_substitution(&s, "CAD", 0).unwrap(), "CAD");
        assert!(iterate_substitution(&s, "AXB", 2).is_err());
        assert!(s.is_primitive());
    }

    #[test]
    fn parse_rule_file() {
        let s = Substitution::parse("# Rudin-Shapiro\nA -> AB\nB -> AC\n\nC -> DB\nD -> DC\n").unwrap();
        assert_eq!(s, Substitution::rudin_shapiro());
        assert!(Substitution::parse("AB -> A").is_err());
        assert!(Substitution::parse("A -> AZ").is_err());
        assert!(Substitution::parse("A -> ").is_err());
        assert!(Substitution::parse("A -> B\nA -> A\nB -> A").is_err());
        assert!(Substitution::parse("A AB").is_err());
    }

    #[test]
    fn primitivity_and_seeds() {
        let fib = Substitution::new(&[('a', "ab"), ('b', "a")]).unwrap();
        assert!(fib.is_primitive());
        assert!(fib.check_seed(0).is_ok());
        assert!(fib.check_seed(1).is_err());
        let split = Substitution::new(&[('a', "aa"), ('b', "bb")]).unwrap();
        assert!(!split.is_primitive());
        let rs = Substitution::rudin_shapiro();
        assert!(rs.check_seed(rs.letter('D').unwrap()).is_ok());
        assert!(rs.check_seed(rs.letter('B').unwrap()).is_err());
    }

    #[test]
    fn fixed_point_is_stable() {
        let s = Substitution::rudin_shapiro();
        let p = s.fixed_point_prefix(0, 1000).unwrap();
        let img = s.apply(&p[..500]);
        assert_eq!(&img[..], &p[..1000]);
    }
}
