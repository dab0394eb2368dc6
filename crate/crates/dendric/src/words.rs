//! Alphabets, words and horizon-bounded factorial languages.
//!
//! A [`FiniteLanguage`] is stored as a prefix trie: every node is a member
//! word and children are indexed by alphabet position. Because the language
//! is factorial, the trie of all members is the same as the trie of the
//! maximal ones, and membership is a walk of `|w|` steps.

use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::fmt;
use std::ops::Deref;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Rendering of the empty word in dumps and on the command line.
pub const EPSILON: &str = "@";

/// Ordered set of letter symbols. Declaration order is the canonical order.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Alphabet {
    symbols: Vec<char>,
}

impl Alphabet {
    pub fn new(symbols: impl IntoIterator<Item = char>) -> Result<Self> {
        let symbols: Vec<char> = symbols.into_iter().collect();
        if symbols.is_empty() {
            return Err(Error::InvalidAlphabet("empty alphabet".into()));
        }
        let distinct: BTreeSet<char> = symbols.iter().copied().collect();
        if distinct.len() != symbols.len() {
            return Err(Error::InvalidAlphabet(format!(
                "duplicate symbols in {:?}",
                symbols.iter().collect::<String>()
            )));
        }
        if symbols.contains(&'@') || symbols.contains(&'.') {
            return Err(Error::InvalidAlphabet("'@' and '.' are reserved".into()));
        }
        Ok(Alphabet { symbols })
    }

    /// Alphabet from a string of symbols, e.g. `"123"`.
    pub fn parse(s: &str) -> Result<Self> {
        Self::new(s.chars())
    }

    /// The alphabet `{1, ..., d}` used for ternary shifts and fresh codings.
    /// Sizes above nine continue with `A`, `B`, ...
    pub fn numeric(d: usize) -> Self {
        let symbols =
            (0..d).map(|i| if i < 9 { char::from(b'1' + i as u8) } else { char::from(b'A' + (i - 9) as u8) }).collect();
        Alphabet { symbols }
    }

    pub fn ternary() -> Self {
        Self::numeric(3)
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn symbols(&self) -> &[char] {
        &self.symbols
    }

    pub fn letter(&self, i: usize) -> char {
        self.symbols[i]
    }

    pub fn index(&self, c: char) -> Option<usize> {
        self.symbols.iter().position(|&x| x == c)
    }

    pub fn contains(&self, c: char) -> bool {
        self.symbols.contains(&c)
    }

    pub fn check_word(&self, w: &[char]) -> Result<()> {
        match w.iter().find(|c| !self.contains(**c)) {
            Some(&c) => Err(Error::UnknownLetter(c)),
            None => Ok(()),
        }
    }

    /// Canonical word order: shorter first, then lexicographic by declaration order.
    pub fn cmp_words(&self, a: &[char], b: &[char]) -> Ordering {
        a.len().cmp(&b.len()).then_with(|| {
            let ia = a.iter().map(|c| self.index(*c));
            let ib = b.iter().map(|c| self.index(*c));
            ia.cmp(ib)
        })
    }
}

impl fmt::Display for Alphabet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.symbols {
            write!(f, "{c}")?;
        }
        Ok(())
    }
}

/// A finite word. Ordering is by length, then by `char` order, which agrees
/// with declaration order for the digit alphabets used throughout.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Word(Vec<char>);

impl Word {
    pub fn new(letters: Vec<char>) -> Self {
        Word(letters)
    }

    pub fn empty() -> Self {
        Word(Vec::new())
    }

    pub fn letters(&self) -> &[char] {
        &self.0
    }

    pub fn into_letters(self) -> Vec<char> {
        self.0
    }

    pub fn push(&mut self, c: char) {
        self.0.push(c);
    }

    pub fn concat(&self, other: &[char]) -> Word {
        let mut v = self.0.clone();
        v.extend_from_slice(other);
        Word(v)
    }

    pub fn first(&self) -> Option<char> {
        self.0.first().copied()
    }

    pub fn last(&self) -> Option<char> {
        self.0.last().copied()
    }

    /// Number of occurrences of the letter `c`.
    pub fn count(&self, c: char) -> usize {
        self.0.iter().filter(|&&x| x == c).count()
    }
}

impl Deref for Word {
    type Target = [char];
    fn deref(&self) -> &[char] {
        &self.0
    }
}

impl AsRef<[char]> for Word {
    fn as_ref(&self) -> &[char] {
        &self.0
    }
}

impl From<&str> for Word {
    fn from(s: &str) -> Self {
        if s == EPSILON {
            Word::empty()
        } else {
            Word(s.chars().collect())
        }
    }
}

impl From<&[char]> for Word {
    fn from(s: &[char]) -> Self {
        Word(s.to_vec())
    }
}

impl From<Vec<char>> for Word {
    fn from(v: Vec<char>) -> Self {
        Word(v)
    }
}

impl FromStr for Word {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Ok(Word::from(s.trim()))
    }
}

impl Ord for Word {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.len().cmp(&other.0.len()).then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Word {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str(EPSILON);
        }
        for c in &self.0 {
            write!(f, "{c}")?;
        }
        Ok(())
    }
}

/// Render a letter slice the same way [`Word`] displays.
pub fn show(w: &[char]) -> String {
    if w.is_empty() {
        EPSILON.to_string()
    } else {
        w.iter().collect()
    }
}

const NONE: u32 = u32::MAX;

/// Handle to a member word inside a [`FiniteLanguage`] trie.
pub type Node = u32;

/// A factorial language truncated at an explicit horizon.
#[derive(Clone, Debug)]
pub struct FiniteLanguage {
    alphabet: Alphabet,
    horizon: usize,
    children: Vec<u32>,
    depth: Vec<u32>,
    counts: Vec<usize>,
}

/// Incremental constructor for [`FiniteLanguage`].
#[derive(Clone, Debug)]
pub struct LanguageBuilder {
    alphabet: Alphabet,
    horizon: usize,
    children: Vec<u32>,
    depth: Vec<u32>,
}

impl LanguageBuilder {
    pub fn new(alphabet: Alphabet, horizon: usize) -> Self {
        let d = alphabet.len();
        LanguageBuilder { alphabet, horizon, children: vec![NONE; d], depth: vec![0] }
    }

    pub fn horizon(&self) -> usize {
        self.horizon
    }

    fn encode(&self, s: &[char]) -> Result<Vec<usize>> {
        s.iter().map(|&c| self.alphabet.index(c).ok_or(Error::UnknownLetter(c))).collect()
    }

    fn insert_indices(&mut self, w: &[usize]) {
        let d = self.alphabet.len();
        let mut node = 0usize;
        for &i in w {
            let slot = node * d + i;
            let next = self.children[slot];
            node = if next == NONE {
                let fresh = self.depth.len();
                self.children[slot] = fresh as u32;
                self.depth.push(self.depth[node] + 1);
                self.children.extend(std::iter::repeat_n(NONE, d));
                fresh
            } else {
                next as usize
            };
        }
    }

    /// Insert every factor of `s` of length at most the horizon.
    pub fn insert_factors(&mut self, s: &[char]) -> Result<()> {
        let idx = self.encode(s)?;
        for start in 0..idx.len() {
            let end = (start + self.horizon).min(idx.len());
            self.insert_indices(&idx[start..end]);
        }
        Ok(())
    }

    /// Insert `w` and its prefixes only. The caller is responsible for
    /// keeping the result factorial.
    pub fn insert_prefixes(&mut self, w: &[char]) -> Result<()> {
        if w.len() > self.horizon {
            return Err(Error::HorizonExceeded { len: w.len(), horizon: self.horizon });
        }
        let idx = self.encode(w)?;
        self.insert_indices(&idx);
        Ok(())
    }

    pub fn build(self) -> FiniteLanguage {
        let mut counts = vec![0usize; self.horizon + 1];
        for &dp in &self.depth {
            counts[dp as usize] += 1;
        }
        FiniteLanguage {
            alphabet: self.alphabet,
            horizon: self.horizon,
            children: self.children,
            depth: self.depth,
            counts,
        }
    }
}

impl FiniteLanguage {
    /// The factorial closure of `words`, truncated at `horizon`.
    pub fn from_words<W: AsRef<[char]>>(
        alphabet: Alphabet,
        horizon: usize,
        words: impl IntoIterator<Item = W>,
    ) -> Result<Self> {
        let mut b = LanguageBuilder::new(alphabet, horizon);
        for w in words {
            b.insert_factors(w.as_ref())?;
        }
        Ok(b.build())
    }

    /// Like [`from_words`](Self::from_words) with word literals such as `"12"` or `"@"`.
    pub fn from_strs(alphabet: Alphabet, horizon: usize, words: &[&str]) -> Result<Self> {
        Self::from_words(alphabet, horizon, words.iter().map(|s| Word::from(*s)))
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn horizon(&self) -> usize {
        self.horizon
    }

    pub const ROOT: Node = 0;

    /// Total number of member words, ε included.
    pub fn len(&self) -> usize {
        self.depth.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn node_depth(&self, node: Node) -> usize {
        self.depth[node as usize] as usize
    }

    /// Child of `node` along the letter with alphabet index `i`.
    pub fn child(&self, node: Node, i: usize) -> Option<Node> {
        let c = self.children[node as usize * self.alphabet.len() + i];
        (c != NONE).then_some(c)
    }

    pub fn step(&self, node: Node, c: char) -> Option<Node> {
        self.alphabet.index(c).and_then(|i| self.child(node, i))
    }

    fn check_len(&self, len: usize) -> Result<()> {
        if len > self.horizon {
            Err(Error::HorizonExceeded { len, horizon: self.horizon })
        } else {
            Ok(())
        }
    }

    /// The trie node of `w`, or `None` when `w` is not a member.
    pub fn node_of(&self, w: &[char]) -> Result<Option<Node>> {
        self.check_len(w.len())?;
        let mut node = Self::ROOT;
        for &c in w {
            match self.step(node, c) {
                Some(n) => node = n,
                None => return Ok(None),
            }
        }
        Ok(Some(node))
    }

    pub fn contains(&self, w: &[char]) -> Result<bool> {
        Ok(self.node_of(w)?.is_some())
    }

    /// Factor complexity p(n).
    pub fn complexity(&self, n: usize) -> Result<usize> {
        self.check_len(n)?;
        Ok(self.counts.get(n).copied().unwrap_or(0))
    }

    /// Visit every member of length at most `max_len` in canonical DFS order
    /// (lexicographic by alphabet order, prefixes first).
    pub fn visit(&self, max_len: usize, mut f: impl FnMut(&[char], Node)) {
        let max_len = max_len.min(self.horizon);
        let mut path: Vec<char> = Vec::new();
        let mut stack: Vec<(Node, usize)> = vec![(Self::ROOT, 0)];
        f(&path, Self::ROOT);
        // Each frame is (node, next child index to try).
        while let Some((node, i)) = stack.last_mut() {
            if *i >= self.alphabet.len() || path.len() >= max_len {
                stack.pop();
                path.pop();
                continue;
            }
            let idx = *i;
            *i += 1;
            let node = *node;
            if let Some(ch) = self.child(node, idx) {
                path.push(self.alphabet.letter(idx));
                f(&path, ch);
                stack.push((ch, 0));
            }
        }
    }

    /// Members of length exactly `n` in canonical order.
    pub fn words_of_length(&self, n: usize) -> Result<Vec<Word>> {
        self.check_len(n)?;
        let mut out = Vec::new();
        self.visit(n, |w, _| {
            if w.len() == n {
                out.push(Word::from(w));
            }
        });
        Ok(out)
    }

    /// All members in canonical order (by length, then lexicographic).
    pub fn words(&self) -> Vec<Word> {
        let mut out = Vec::with_capacity(self.len());
        for n in 0..=self.horizon {
            let level = self.words_of_length(n).unwrap_or_default();
            if level.is_empty() {
                break;
            }
            out.extend(level);
        }
        out
    }

    /// The same language cut at a smaller horizon.
    pub fn truncate(&self, horizon: usize) -> FiniteLanguage {
        let horizon = horizon.min(self.horizon);
        let mut b = LanguageBuilder::new(self.alphabet.clone(), horizon);
        self.visit(horizon, |w, node| {
            let leaf = (0..self.alphabet.len()).all(|i| self.child(node, i).is_none());
            if w.len() == horizon || leaf {
                b.insert_prefixes(w).expect("member words are valid");
            }
        });
        b.build()
    }

    /// One word per line, canonical order, ε as `@`.
    pub fn dump(&self) -> String {
        let mut s = String::new();
        for w in self.words() {
            s.push_str(&w.to_string());
            s.push('\n');
        }
        s
    }

    fn same_subtrie(&self, a: Node, other: &FiniteLanguage, b: Node) -> bool {
        let mut stack = vec![(a, b)];
        while let Some((x, y)) = stack.pop() {
            for i in 0..self.alphabet.len() {
                match (self.child(x, i), other.child(y, i)) {
                    (None, None) => {}
                    (Some(cx), Some(cy)) => stack.push((cx, cy)),
                    _ => return false,
                }
            }
        }
        true
    }
}

impl PartialEq for FiniteLanguage {
    fn eq(&self, other: &Self) -> bool {
        self.alphabet == other.alphabet
            && self.horizon == other.horizon
            && self.len() == other.len()
            && self.same_subtrie(Self::ROOT, other, Self::ROOT)
    }
}

impl Eq for FiniteLanguage {}

/// All distinct factors of `w` of length at most `n`.
pub fn factors(alphabet: &Alphabet, w: &[char], n: usize) -> Result<FiniteLanguage> {
    FiniteLanguage::from_words(alphabet.clone(), n, [w])
}

/// Factor complexity p(n) of `lang`.
pub fn complexity(lang: &FiniteLanguage, n: usize) -> Result<usize> {
    lang.complexity(n)
}

/// Rauzy graph of order `n`: vertices are the length-`n` members and each
/// member `w` of length `n+1` gives the edge `w[..n] -> w[1..]` labelled `w[0]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RauzyGraph {
    pub order: usize,
    pub vertices: Vec<Word>,
    pub edges: Vec<(Word, Word, char)>,
}

pub fn rauzy_graph(lang: &FiniteLanguage, n: usize) -> Result<RauzyGraph> {
    lang.check_len(n + 1)?;
    let vertices = lang.words_of_length(n)?;
    let edges =
        lang.words_of_length(n + 1)?.into_iter().map(|w| (Word::from(&w[..n]), Word::from(&w[1..]), w[0])).collect();
    Ok(RauzyGraph { order: n, vertices, edges })
}

impl RauzyGraph {
    /// Strong connectivity via forward and backward reachability from the first vertex.
    pub fn is_strongly_connected(&self) -> bool {
        if self.vertices.is_empty() {
            return true;
        }
        let pos = |w: &Word| self.vertices.binary_search(w).ok();
        let n = self.vertices.len();
        let mut fwd = vec![Vec::new(); n];
        let mut bwd = vec![Vec::new(); n];
        for (u, v, _) in &self.edges {
            if let (Some(i), Some(j)) = (pos(u), pos(v)) {
                fwd[i].push(j);
                bwd[j].push(i);
            }
        }
        let reach = |adj: &Vec<Vec<usize>>| {
            let mut seen = vec![false; n];
            let mut stack = vec![0];
            seen[0] = true;
            while let Some(x) = stack.pop() {
                for &y in &adj[x] {
                    if !seen[y] {
                        seen[y] = true;
                        stack.push(y);
                    }
                }
            }
            seen.into_iter().all(|b| b)
        };
        reach(&fwd) && reach(&bwd)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(lang: &FiniteLanguage) -> Vec<String> {
        lang.words().iter().map(|w| w.to_string()).collect()
    }

    #[test]
    fn factors_enumerate_directly() {
        let a = Alphabet::parse("01").unwrap();
        let l = factors(&a, &Word::from("0100"), 2).unwrap();
        assert_eq!(set(&l), ["@", "0", "1", "00", "01", "10"]);
        let e = factors(&a, &[], 5).unwrap();
        assert_eq!(set(&e), ["@"]);
        let t = factors(&Alphabet::ternary(), &Word::from("1233"), 2).unwrap();
        assert_eq!(set(&t), ["@", "1", "2", "3", "12", "23", "33"]);
    }

    #[test]
    fn horizon_is_a_hard_limit() {
        let a = Alphabet::parse("01").unwrap();
        let l = factors(&a, &Word::from("0100"), 2).unwrap();
        assert!(matches!(l.contains(&Word::from("010")), Err(Error::HorizonExceeded { .. })));
        assert!(l.complexity(3).is_err());
        assert_eq!(l.complexity(0).unwrap(), 1);
    }

    #[test]
    fn canonical_order_follows_declaration() {
        let a = Alphabet::parse("ba").unwrap();
        let l = factors(&a, &Word::from("ab"), 2).unwrap();
        assert_eq!(set(&l), ["@", "b", "a", "ab"]);
        assert_eq!(a.cmp_words(&['b'], &['a']), Ordering::Less);
    }

    #[test]
    fn periodic_rauzy_graph_is_a_two_cycle() {
        let a = Alphabet::parse("01").unwrap();
        let l = factors(&a, &Word::from("010101"), 3).unwrap();
        let g = rauzy_graph(&l, 1).unwrap();
        assert_eq!(g.vertices, vec![Word::from("0"), Word::from("1")]);
        assert_eq!(g.edges.len(), 2);
        assert!(g.is_strongly_connected());
    }

    #[test]
    fn truncate_and_equality() {
        let a = Alphabet::parse("01").unwrap();
        let long = factors(&a, &Word::from("0100101001001"), 6).unwrap();
        let short = factors(&a, &Word::from("0100101001001"), 3).unwrap();
        assert_eq!(long.truncate(3), short);
        assert_ne!(long, short);
    }

    #[test]
    fn alphabet_rejects_duplicates() {
        assert!(Alphabet::parse("121").is_err());
        assert!(Alphabet::parse("").is_err());
    }
}
