//! Generator alphabets and words.

use std::fmt;

use smallvec::SmallVec;

/// Ordered generator names with positive degrees.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Alphabet {
    names: Vec<String>,
    degrees: Vec<u32>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum AlphabetError {
    #[error("duplicate generator name `{0}`")]
    Duplicate(String),
    #[error("generator `{0}` must have positive degree")]
    ZeroDegree(String),
    #[error("invalid generator name `{0}`")]
    BadName(String),
    #[error("{names} names but {degrees} degrees")]
    Length { names: usize, degrees: usize },
    #[error("at most 255 generators are supported")]
    TooMany,
}

fn valid_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic())
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

impl Alphabet {
    pub fn new(names: Vec<String>, degrees: Vec<u32>) -> Result<Self, AlphabetError> {
        if names.len() != degrees.len() {
            return Err(AlphabetError::Length { names: names.len(), degrees: degrees.len() });
        }
        if names.len() > 255 {
            return Err(AlphabetError::TooMany);
        }
        for (i, n) in names.iter().enumerate() {
            if !valid_identifier(n) {
                return Err(AlphabetError::BadName(n.clone()));
            }
            if names[..i].contains(n) {
                return Err(AlphabetError::Duplicate(n.clone()));
            }
            if degrees[i] == 0 {
                return Err(AlphabetError::ZeroDegree(n.clone()));
            }
        }
        Ok(Alphabet { names, degrees })
    }

    /// All generators in degree one.
    pub fn linear<S: AsRef<str>>(names: &[S]) -> Result<Self, AlphabetError> {
        let names: Vec<String> = names.iter().map(|s| s.as_ref().to_string()).collect();
        let degrees = vec![1; names.len()];
        Self::new(names, degrees)
    }

    /// `self` followed by `other`; names must stay distinct.
    pub fn concat(&self, other: &Alphabet) -> Result<Self, AlphabetError> {
        let mut names = self.names.clone();
        names.extend(other.names.iter().cloned());
        let mut degrees = self.degrees.clone();
        degrees.extend(other.degrees.iter().copied());
        Self::new(names, degrees)
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn name(&self, i: usize) -> &str {
        &self.names[i]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn degree(&self, i: usize) -> u32 {
        self.degrees[i]
    }

    pub fn degrees(&self) -> &[u32] {
        &self.degrees
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    pub fn word_degree(&self, w: &Word) -> u32 {
        w.iter().map(|&l| self.degrees[l as usize]).sum()
    }

    pub fn generated_in_degree_one(&self) -> bool {
        self.degrees.iter().all(|&d| d == 1)
    }

    /// Every word of the given degree, in increasing order.
    pub fn words_of_degree(&self, d: u32) -> Vec<Word> {
        if d == 0 {
            return vec![Word::empty()];
        }
        let mut out = Vec::new();
        for (i, &g) in self.degrees.iter().enumerate() {
            if g <= d {
                for rest in self.words_of_degree(d - g) {
                    let mut w = Word::letter(i);
                    w.extend(&rest);
                    out.push(w);
                }
            }
        }
        out
    }
}

/// A word in the generators, stored as letter indices.
///
/// The derived order is lexicographic on letters, which agrees with
/// degree-lexicographic order on words of equal degree.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Word(SmallVec<[u8; 16]>);

impl Word {
    pub fn empty() -> Self {
        Word(SmallVec::new())
    }

    pub fn letter(i: usize) -> Self {
        let mut v = SmallVec::new();
        v.push(u8::try_from(i).expect("letter index fits in u8"));
        Word(v)
    }

    pub fn from_letters(letters: &[usize]) -> Self {
        Word(letters.iter().map(|&l| u8::try_from(l).expect("letter index fits in u8")).collect())
    }

    pub fn from_slice(s: &[u8]) -> Self {
        Word(SmallVec::from_slice(s))
    }

    pub fn as_slice(&self) -> &[u8] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, u8> {
        self.0.iter()
    }

    pub fn first(&self) -> Option<usize> {
        self.0.first().map(|&l| l as usize)
    }

    pub fn push(&mut self, letter: usize) {
        self.0.push(u8::try_from(letter).expect("letter index fits in u8"));
    }

    pub fn extend(&mut self, other: &Word) {
        self.0.extend_from_slice(&other.0);
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut w = self.clone();
        w.extend(other);
        w
    }

    /// Subword `[start, end)`.
    pub fn sub(&self, start: usize, end: usize) -> Word {
        Word::from_slice(&self.0[start..end])
    }

    /// Position of the first occurrence of `pat` at or after `from`.
    pub fn find(&self, pat: &Word, from: usize) -> Option<usize> {
        let (h, n) = (self.0.as_slice(), pat.0.as_slice());
        if n.len() > h.len() {
            return None;
        }
        (from..=h.len() - n.len()).find(|&i| &h[i..i + n.len()] == n)
    }

    pub fn contains(&self, pat: &Word) -> bool {
        self.find(pat, 0).is_some()
    }

    pub fn display<'a>(&'a self, alphabet: &'a Alphabet) -> impl fmt::Display + 'a {
        WordDisplay { word: self, alphabet }
    }
}

struct WordDisplay<'a> {
    word: &'a Word,
    alphabet: &'a Alphabet,
}

impl fmt::Display for WordDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.word.is_empty() {
            return write!(f, "1");
        }
        let parts: Vec<&str> = self.word.iter().map(|&l| self.alphabet.name(l as usize)).collect();
        write!(f, "{}", parts.join("*"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn alphabet_validation() {
        assert!(Alphabet::linear(&["x", "x"]).is_err());
        assert!(Alphabet::new(vec!["x".into()], vec![0]).is_err());
        assert!(Alphabet::linear(&["1x"]).is_err());
        let a = Alphabet::new(vec!["x".into(), "y".into()], vec![1, 2]).unwrap();
        assert_eq!(a.words_of_degree(3).len(), 3);
    }

    #[test]
    fn free_word_counts() {
        let a = Alphabet::linear(&["x", "y"]).unwrap();
        assert_eq!(a.words_of_degree(3).len(), 8);
        assert_eq!(a.words_of_degree(0), vec![Word::empty()]);
        let w = a.words_of_degree(2);
        assert!(w.windows(2).all(|p| p[0] < p[1]));
    }

    #[test]
    fn find_subwords() {
        let w = Word::from_letters(&[0, 1, 0, 1]);
        let p = Word::from_letters(&[1, 0]);
        assert_eq!(w.find(&p, 0), Some(1));
        assert_eq!(w.find(&p, 2), None);
    }

    proptest! {
        #[test]
        fn degree_is_additive(u in proptest::collection::vec(0usize..3, 0..6), v in proptest::collection::vec(0usize..3, 0..6)) {
            let a = Alphabet::new(vec!["a".into(), "b".into(), "c".into()], vec![1, 2, 3]).unwrap();
            let (u, v) = (Word::from_letters(&u), Word::from_letters(&v));
            prop_assert_eq!(a.word_degree(&u.concat(&v)), a.word_degree(&u) + a.word_degree(&v));
        }
    }
}
