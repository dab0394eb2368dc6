//! Directive sequences and the languages they generate.
//!
//! Levels are numbered from 1, so `σ₁` is the outermost morphism and the
//! level-`n` language is generated by `σ_[n,N) = σₙ ∘ … ∘ σ_{N-1}`.

use std::collections::BTreeSet;
use std::fmt;

use crate::error::{Error, Result};
use crate::morphism::{parse_morphism, Morphism};
use crate::words::{show, Alphabet, FiniteLanguage, LanguageBuilder, Word};

/// An eventually periodic sequence of morphisms `σ₁ σ₂ …`, with
/// `σₙ : 𝒜_{n+1}* → 𝒜ₙ*`. An empty period makes the sequence finite.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DirectiveSequence {
    prefix: Vec<Morphism>,
    period: Vec<Morphism>,
}

impl DirectiveSequence {
    pub fn new(prefix: Vec<Morphism>, period: Vec<Morphism>) -> Result<Self> {
        if prefix.is_empty() && period.is_empty() {
            return Err(Error::Precondition("directive sequence is empty".into()));
        }
        let ds = DirectiveSequence { prefix, period };
        let checked = ds.prefix.len() + 2 * ds.period.len();
        for n in 1..checked {
            if let (Some(a), Some(b)) = (ds.get(n), ds.get(n + 1)) {
                if a.domain() != b.codomain() {
                    return Err(Error::AlphabetMismatch(format!(
                        "sigma_{n} has domain {} but sigma_{} has codomain {}",
                        a.domain(),
                        n + 1,
                        b.codomain()
                    )));
                }
            }
        }
        Ok(ds)
    }

    pub fn finite(morphisms: Vec<Morphism>) -> Result<Self> {
        Self::new(morphisms, Vec::new())
    }

    pub fn periodic(period: Vec<Morphism>) -> Result<Self> {
        Self::new(Vec::new(), period)
    }

    /// Build from expression strings.
    pub fn from_exprs(prefix: &[&str], period: &[&str]) -> Result<Self> {
        let p = prefix.iter().map(|s| parse_morphism(s)).collect::<Result<Vec<_>>>()?;
        let q = period.iter().map(|s| parse_morphism(s)).collect::<Result<Vec<_>>>()?;
        Self::new(p, q)
    }

    /// Parse the directive-sequence file format: one morphism per line,
    /// `#` comments, and `repeat:` lines forming the periodic tail.
    pub fn parse(text: &str) -> Result<Self> {
        let mut prefix = Vec::new();
        let mut period = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let at = |e: Error| Error::Parse(format!("line {}: {e}", lineno + 1));
            if let Some(rest) = line.strip_prefix("repeat:") {
                period.push(parse_morphism(rest.trim()).map_err(at)?);
            } else if period.is_empty() {
                prefix.push(parse_morphism(line).map_err(at)?);
            } else {
                return Err(Error::Parse(format!("line {}: prefix morphism after a repeat: line", lineno + 1)));
            }
        }
        Self::new(prefix, period)
    }

    pub fn prefix(&self) -> &[Morphism] {
        &self.prefix
    }

    pub fn period(&self) -> &[Morphism] {
        &self.period
    }

    /// Number of morphisms, or `None` when the sequence is infinite.
    pub fn available_len(&self) -> Option<usize> {
        self.period.is_empty().then_some(self.prefix.len())
    }

    /// `σₙ` for `n ≥ 1`.
    pub fn get(&self, n: usize) -> Option<&Morphism> {
        if n == 0 {
            return None;
        }
        let i = n - 1;
        if i < self.prefix.len() {
            Some(&self.prefix[i])
        } else if self.period.is_empty() {
            None
        } else {
            Some(&self.period[(i - self.prefix.len()) % self.period.len()])
        }
    }

    fn at(&self, n: usize) -> Result<&Morphism> {
        self.get(n).ok_or_else(|| Error::Precondition(format!("directive sequence has no sigma_{n}")))
    }

    /// The alphabet `𝒜ₙ` of level `n`.
    pub fn alphabet(&self, n: usize) -> Result<Alphabet> {
        if n >= 1 {
            if let Some(m) = self.get(n) {
                return Ok(m.codomain().clone());
            }
        }
        if n >= 2 {
            return Ok(self.at(n - 1)?.domain().clone());
        }
        Err(Error::Precondition(format!("no alphabet at level {n}")))
    }

    /// The first `len` morphisms.
    pub fn take(&self, len: usize) -> Result<Vec<Morphism>> {
        (1..=len).map(|n| self.at(n).cloned()).collect()
    }

    /// `σ_[n,N)`.
    pub fn composite(&self, n: usize, big_n: usize) -> Result<Morphism> {
        let alph = self.alphabet(n)?;
        let ms = (n..big_n).map(|i| self.at(i)).collect::<Result<Vec<_>>>()?;
        Morphism::compose_all(&alph, ms)
    }

    fn check_window(&self, n: usize, big_n: usize) -> Result<()> {
        if n == 0 || n >= big_n {
            return Err(Error::Precondition(format!("need 1 <= n < N, got n={n}, N={big_n}")));
        }
        if let Some(len) = self.available_len() {
            if big_n > len + 1 {
                return Err(Error::Precondition(format!("depth {big_n} exceeds the {len} available morphisms")));
            }
        }
        Ok(())
    }
}

impl fmt::Display for DirectiveSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for m in &self.prefix {
            writeln!(f, "{}", m.to_json())?;
        }
        for m in &self.period {
            writeln!(f, "repeat: {}", m.to_json())?;
        }
        Ok(())
    }
}

/// Words of length at most 2 in the level-`m` language, computed exactly
/// from the letters of level `N` downward.
fn short_words(ds: &DirectiveSequence, m: usize, big_n: usize) -> Result<BTreeSet<Vec<char>>> {
    let mut cur: BTreeSet<Vec<char>> = ds.alphabet(big_n)?.symbols().iter().map(|&c| vec![c]).collect();
    for level in (m..big_n).rev() {
        let sigma = ds.at(level)?;
        let mut next = BTreeSet::new();
        for w in &cur {
            let img = sigma.apply(w)?;
            for i in 0..img.len() {
                next.insert(vec![img[i]]);
                if i + 1 < img.len() {
                    next.insert(vec![img[i], img[i + 1]]);
                }
            }
        }
        cur = next;
    }
    Ok(cur)
}

fn level_language_at_depth(ds: &DirectiveSequence, n: usize, big_n: usize, horizon: usize) -> Result<FiniteLanguage> {
    let alph = ds.alphabet(n)?;
    // images[i] = σ_[n,M)(i-th letter of 𝒜_M); grow M until every image
    // covers a window of length h-1, so any length-h factor sits inside the
    // image of a word of length at most 2 of level M.
    let mut m = n;
    let mut level_alph = alph.clone();
    let mut images: Vec<Vec<char>> = alph.symbols().iter().map(|&c| vec![c]).collect();
    let need = horizon.saturating_sub(1);
    while m < big_n && images.iter().map(|w| w.len()).min().unwrap_or(0) < need {
        let sigma = ds.at(m)?;
        images = sigma
            .images()
            .iter()
            .map(|w| {
                let mut out = Vec::new();
                for &c in w.iter() {
                    let j = level_alph.index(c).expect("compatible alphabets");
                    out.extend_from_slice(&images[j]);
                }
                out
            })
            .collect();
        level_alph = sigma.domain().clone();
        m += 1;
    }
    let seeds: Vec<Vec<char>> = if m == big_n {
        level_alph.symbols().iter().map(|&c| vec![c]).collect()
    } else {
        short_words(ds, m, big_n)?.into_iter().collect()
    };
    let mut b = LanguageBuilder::new(alph, horizon);
    for w in seeds {
        let mut img = Vec::new();
        for c in w {
            img.extend_from_slice(&images[level_alph.index(c).expect("seed letters belong to the level")]);
        }
        b.insert_factors(&img)?;
    }
    Ok(b.build())
}

/// A generated language together with its stabilization flag.
#[derive(Clone, Debug)]
pub struct LevelLanguage {
    pub language: FiniteLanguage,
    /// True when the words up to the horizon do not change if the depth grows by one.
    pub stabilized: bool,
}

/// All factors of length at most `horizon` of the words `σ_[n,N)(a)`.
pub fn language_of_level(ds: &DirectiveSequence, n: usize, depth: usize, horizon: usize) -> Result<LevelLanguage> {
    ds.check_window(n, depth)?;
    let language = level_language_at_depth(ds, n, depth, horizon)?;
    let stabilized = match ds.check_window(n, depth + 1) {
        Ok(()) => level_language_at_depth(ds, n, depth + 1, horizon)? == language,
        Err(_) => false,
    };
    Ok(LevelLanguage { language, stabilized })
}

/// True iff every letter of `𝒜ₙ` occurs in `σ_[n,N)(b)` for every `b ∈ 𝒜_N`.
pub fn is_primitive_window(ds: &DirectiveSequence, n: usize, big_n: usize) -> Result<bool> {
    ds.check_window(n, big_n)?;
    let top = ds.alphabet(n)?;
    // occ[b] is the set of level-n letters occurring in σ_[n,M)(b).
    let mut occ: Vec<Vec<bool>> = (0..top.len()).map(|i| (0..top.len()).map(|j| i == j).collect()).collect();
    let mut alph = top.clone();
    for m in n..big_n {
        let sigma = ds.at(m)?;
        occ = sigma
            .images()
            .iter()
            .map(|w| {
                let mut row = vec![false; top.len()];
                for &c in w.iter() {
                    let j = alph.index(c).expect("compatible alphabets");
                    for (r, &o) in row.iter_mut().zip(&occ[j]) {
                        *r |= o;
                    }
                }
                row
            })
            .collect();
        alph = sigma.domain().clone();
    }
    Ok(occ.iter().all(|row| row.iter().all(|&x| x)))
}

/// The factors of length at most `horizon` of `σ(L)`. Exact when the
/// language horizon is at least `horizon`, since each window of the image is
/// covered by the image of a member of at most that length.
pub fn image_language(sigma: &Morphism, lang: &FiniteLanguage, horizon: usize) -> Result<FiniteLanguage> {
    if lang.alphabet() != sigma.domain() {
        return Err(Error::AlphabetMismatch(format!(
            "language over {} but morphism domain {}",
            lang.alphabet(),
            sigma.domain()
        )));
    }
    if lang.horizon() < horizon {
        return Err(Error::HorizonExceeded { len: horizon, horizon: lang.horizon() });
    }
    let mut b = LanguageBuilder::new(sigma.codomain().clone(), horizon);
    let d = lang.alphabet().len();
    lang.visit(horizon, |w, node| {
        let leaf = (0..d).all(|i| lang.child(node, i).is_none());
        if w.len() == horizon || leaf {
            let img = sigma.apply(w).expect("alphabets checked");
            b.insert_factors(&img).expect("alphabets checked");
        }
    });
    Ok(b.build())
}

/// Return words to a base word, as found inside the language horizon.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReturnWordSet {
    pub base: Word,
    /// Canonical order: by length, then lexicographic by alphabet order.
    pub words: Vec<Word>,
    pub certified: bool,
}

impl ReturnWordSet {
    pub fn max_len(&self) -> usize {
        self.words.iter().map(|w| w.len()).max().unwrap_or(0)
    }
}

/// Return words to `w`: every `r` such that `rw` is a member starting with
/// `w` and containing exactly two occurrences of it.
pub fn return_words(lang: &FiniteLanguage, w: &[char]) -> Result<ReturnWordSet> {
    if w.is_empty() {
        return Err(Error::Precondition("return words need a non-empty base".into()));
    }
    let start = lang.node_of(w)?.ok_or_else(|| Error::NotInLanguage(show(w)))?;
    let h = lang.horizon();
    let d = lang.alphabet().len();
    let mut found: BTreeSet<Vec<char>> = BTreeSet::new();
    let mut open_branch = false;
    let mut stack = vec![(start, w.to_vec())];
    while let Some((node, path)) = stack.pop() {
        let mut extended = false;
        for i in 0..d {
            let Some(child) = lang.child(node, i) else { continue };
            extended = true;
            let mut next = path.clone();
            next.push(lang.alphabet().letter(i));
            if next.ends_with(w) {
                found.insert(next[..next.len() - w.len()].to_vec());
            } else if next.len() >= h {
                open_branch = true;
            } else {
                stack.push((child, next));
            }
        }
        if !extended {
            open_branch = true;
        }
    }
    let alph = lang.alphabet();
    let mut words: Vec<Word> = found.into_iter().map(Word::new).collect();
    words.sort_by(|a, b| alph.cmp_words(a, b));
    let max_r = words.iter().map(|r| r.len()).max().unwrap_or(0);
    let certified = !open_branch && !words.is_empty() && h > 2 * max_r + w.len();
    Ok(ReturnWordSet { base: Word::from(w), words, certified })
}

/// The coding morphism over return words to a letter and the recoded language.
#[derive(Clone, Debug)]
pub struct Derivation {
    pub letter: char,
    pub returns: ReturnWordSet,
    pub coding: Morphism,
    pub language: FiniteLanguage,
}

/// Derive `lang` with respect to the letter `a`. The new alphabet is
/// `{1, ..., #ℛ(a)}` assigned in canonical return-word order, and the new
/// horizon is `⌊(h − 1) / max|r|⌋`.
pub fn derived_language(lang: &FiniteLanguage, a: char) -> Result<Derivation> {
    let returns = return_words(lang, &[a])?;
    if !returns.certified {
        return Err(Error::Uncertified(a.to_string()));
    }
    let new_alph = Alphabet::numeric(returns.words.len());
    let coding = Morphism::new(new_alph.clone(), lang.alphabet().clone(), returns.words.clone())?;
    let p = coding.properness();
    debug_assert!(p.strongly_left && p.first_letter == Some(a));
    let horizon = (lang.horizon() - 1) / returns.max_len();
    let mut b = LanguageBuilder::new(new_alph.clone(), horizon);
    // Walk new words u while tracking the trie node of coding(u); u is a
    // member iff coding(u)·a is.
    let mut stack = vec![(FiniteLanguage::ROOT, Vec::<char>::new())];
    while let Some((node, u)) = stack.pop() {
        b.insert_prefixes(&u)?;
        if u.len() == horizon {
            continue;
        }
        'letters: for (i, r) in returns.words.iter().enumerate() {
            let mut cur = node;
            for &c in r.iter() {
                match lang.step(cur, c) {
                    Some(nx) => cur = nx,
                    None => continue 'letters,
                }
            }
            if lang.step(cur, a).is_some() {
                let mut v = u.clone();
                v.push(new_alph.letter(i));
                stack.push((cur, v));
            }
        }
    }
    Ok(Derivation { letter: a, returns, coding, language: b.build() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::words::rauzy_graph;

    fn fibonacci() -> DirectiveSequence {
        let a = Alphabet::parse("01").unwrap();
        let s = Morphism::from_images(a.clone(), a, &["01", "0"]).unwrap();
        DirectiveSequence::periodic(vec![s]).unwrap()
    }

    fn tribonacci() -> DirectiveSequence {
        DirectiveSequence::from_exprs(&[], &["a.p231"]).unwrap()
    }

    fn strs(l: &FiniteLanguage) -> Vec<String> {
        l.words().iter().map(|w| w.to_string()).collect()
    }

    #[test]
    fn tribonacci_has_nine_words_of_length_four() {
        let l = language_of_level(&tribonacci(), 1, 12, 4).unwrap();
        assert!(l.stabilized);
        assert_eq!(l.language.complexity(4).unwrap(), 9);
    }

    #[test]
    fn fibonacci_short_words() {
        let l = language_of_level(&fibonacci(), 1, 10, 2).unwrap();
        assert_eq!(strs(&l.language), ["@", "0", "1", "00", "01", "10"]);
        let l = language_of_level(&fibonacci(), 1, 20, 4).unwrap();
        assert_eq!(l.language.complexity(4).unwrap(), 5);
    }

    #[test]
    fn last_level_gives_image_letters() {
        let ds = DirectiveSequence::from_exprs(&["b", "a"], &[]).unwrap();
        let l = language_of_level(&ds, 2, 3, 1).unwrap();
        assert_eq!(strs(&l.language), ["@", "1", "2", "3"]);
        assert!(!l.stabilized);
        assert!(language_of_level(&ds, 2, 4, 1).is_err());
    }

    #[test]
    fn depth_search_matches_naive_generation() {
        let ds = DirectiveSequence::from_exprs(&["p213.g", "b.p132", "e"], &["a.p231"]).unwrap();
        let fast = language_of_level(&ds, 1, 14, 12).unwrap().language;
        let big = ds.composite(1, 14).unwrap();
        let words: Vec<Word> = big.images().to_vec();
        let naive = FiniteLanguage::from_words(Alphabet::ternary(), 12, words).unwrap();
        assert_eq!(fast, naive);
    }

    #[test]
    fn primitive_windows() {
        assert!(is_primitive_window(&tribonacci(), 1, 4).unwrap());
        let ba = DirectiveSequence::from_exprs(&[], &["b", "a"]).unwrap();
        assert!(!is_primitive_window(&ba, 1, 9).unwrap());
        let single = DirectiveSequence::from_exprs(&["a"], &[]).unwrap();
        assert!(!is_primitive_window(&single, 1, 2).unwrap());
    }

    #[test]
    fn return_words_of_examples() {
        let ds = DirectiveSequence::from_exprs(&["b"], &["a.p231"]).unwrap();
        let l = language_of_level(&ds, 1, 20, 16).unwrap().language;
        let r = return_words(&l, &['1']).unwrap();
        assert!(r.certified);
        let got: Vec<String> = r.words.iter().map(|w| w.to_string()).collect();
        assert_eq!(got, ["1", "12", "132"]);

        let fib = language_of_level(&fibonacci(), 1, 30, 13).unwrap().language;
        let r = return_words(&fib, &['0', '0']).unwrap();
        assert!(r.certified);
        let got: Vec<String> = r.words.iter().map(|w| w.to_string()).collect();
        assert_eq!(got, ["001", "00101"]);

        let per = FiniteLanguage::from_words(Alphabet::parse("01").unwrap(), 8, [Word::from("0101010101")]).unwrap();
        let r = return_words(&per, &['0']).unwrap();
        assert_eq!(r.words, vec![Word::from("01")]);
        assert!(r.certified);
    }

    #[test]
    fn short_horizon_is_not_certified() {
        let fib = language_of_level(&fibonacci(), 1, 30, 12).unwrap().language;
        let r = return_words(&fib, &['0', '0']).unwrap();
        assert!(!r.certified);
    }

    #[test]
    fn derivations() {
        let ds = DirectiveSequence::from_exprs(&["b"], &["a.p231"]).unwrap();
        let l = language_of_level(&ds, 1, 20, 40).unwrap().language;
        let d = derived_language(&l, '1').unwrap();
        assert_eq!(d.coding, crate::morphism::Shape::Beta.morphism());

        let fib = language_of_level(&fibonacci(), 1, 30, 40).unwrap().language;
        let d = derived_language(&fib, '0').unwrap();
        let a01 = Alphabet::parse("01").unwrap();
        assert_eq!(d.coding, Morphism::from_images(Alphabet::numeric(2), a01, &["0", "01"]).unwrap());
        for n in 0..=d.language.horizon() {
            assert_eq!(d.language.complexity(n).unwrap(), n + 1);
        }

        let per = FiniteLanguage::from_words(Alphabet::parse("01").unwrap(), 9, [Word::from("0101010101")]).unwrap();
        let d = derived_language(&per, '0').unwrap();
        assert_eq!(d.coding.images(), &[Word::from("01")]);
        assert_eq!(strs(&d.language), ["@", "1", "11", "111", "1111"]);
    }

    #[test]
    fn levels_are_images_of_the_next() {
        let ds = DirectiveSequence::from_exprs(&["p213.d2", "z1.p213"], &["a.p231"]).unwrap();
        let l1 = language_of_level(&ds, 1, 16, 10).unwrap();
        let l2 = language_of_level(&ds, 2, 16, 10).unwrap();
        assert!(l1.stabilized && l2.stabilized);
        let img = image_language(ds.get(1).unwrap(), &l2.language, 10).unwrap();
        assert_eq!(img, l1.language);
        assert!(rauzy_graph(&l1.language, 5).unwrap().is_strongly_connected());
    }

    #[test]
    fn file_format() {
        let text = "# tribonacci\n\na.p231  # one step\nrepeat: a.p231\n";
        let ds = DirectiveSequence::parse(text).unwrap();
        assert_eq!(ds.prefix().len(), 1);
        assert_eq!(ds.period().len(), 1);
        assert_eq!(DirectiveSequence::parse(&ds.to_string()).unwrap(), ds);
        assert!(DirectiveSequence::parse("repeat: a\nb\n").is_err());
        assert!(DirectiveSequence::parse("q\n").is_err());
    }
}
