//! Non-erasing morphisms between free monoids, the ternary catalog, and the
//! expression grammar used on the command line.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use crate::error::{Error, Result};
use crate::words::{Alphabet, Word};

/// Largest `k` accepted for the `δ^(k)` and `ζ^(k)` families unless a caller asks otherwise.
pub const DEFAULT_K_CAP: u32 = 64;

/// A bijection of `{1, ..., d}`, stored as the image list `[π(1), ..., π(d)]`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Permutation {
    images: Vec<u8>,
}

impl Permutation {
    pub fn new(images: Vec<u8>) -> Result<Self> {
        let d = images.len();
        let mut seen = vec![false; d];
        for &x in &images {
            if x == 0 || x as usize > d || seen[x as usize - 1] {
                return Err(Error::Parse(format!("{images:?} is not a permutation")));
            }
            seen[x as usize - 1] = true;
        }
        Ok(Permutation { images })
    }

    pub fn identity(d: usize) -> Self {
        Permutation { images: (1..=d as u8).collect() }
    }

    /// Parse `213` or `p213`.
    pub fn parse(s: &str) -> Result<Self> {
        let digits = s.strip_prefix('p').unwrap_or(s);
        let images = digits
            .chars()
            .map(|c| c.to_digit(10).map(|x| x as u8).ok_or_else(|| Error::Parse(format!("bad permutation {s:?}"))))
            .collect::<Result<Vec<u8>>>()?;
        Self::new(images)
    }

    pub fn degree(&self) -> usize {
        self.images.len()
    }

    pub fn images(&self) -> &[u8] {
        &self.images
    }

    /// `π(x)`; the value 0 is fixed, which is how class labels encode ∅.
    pub fn apply(&self, x: u8) -> u8 {
        if x == 0 {
            0
        } else {
            self.images[x as usize - 1]
        }
    }

    pub fn apply_char(&self, c: char) -> char {
        match c.to_digit(10) {
            Some(x) if x >= 1 && (x as usize) <= self.degree() => char::from(b'0' + self.apply(x as u8)),
            _ => c,
        }
    }

    pub fn inverse(&self) -> Self {
        let mut inv = vec![0u8; self.degree()];
        for (i, &x) in self.images.iter().enumerate() {
            inv[x as usize - 1] = i as u8 + 1;
        }
        Permutation { images: inv }
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &Permutation) -> Self {
        Permutation { images: other.images.iter().map(|&x| self.apply(x)).collect() }
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(i, &x)| x as usize == i + 1)
    }

    pub fn to_morphism(&self) -> Morphism {
        let a = Alphabet::numeric(self.degree());
        let images = self.images.iter().map(|&x| Word::new(vec![char::from(b'0' + x)])).collect();
        Morphism { domain: a.clone(), codomain: a, images }
    }

    /// All permutations of `{1, ..., d}`. For `d = 3` the order puts the
    /// identity first and involutions before 3-cycles:
    /// 123, 213, 132, 321, 231, 312. Display names prefer earlier entries.
    pub fn all(d: usize) -> Vec<Permutation> {
        if d == 3 {
            return ["123", "213", "132", "321", "231", "312"].iter().map(|s| Permutation::parse(s).unwrap()).collect();
        }
        let mut out = Vec::new();
        let mut cur: Vec<u8> = (1..=d as u8).collect();
        permute(&mut cur, 0, &mut out);
        out.sort();
        out
    }
}

fn permute(v: &mut Vec<u8>, i: usize, out: &mut Vec<Permutation>) {
    if i == v.len() {
        out.push(Permutation { images: v.clone() });
        return;
    }
    for j in i..v.len() {
        v.swap(i, j);
        permute(v, i + 1, out);
        v.swap(i, j);
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "p")?;
        for x in &self.images {
            write!(f, "{x}")?;
        }
        Ok(())
    }
}

/// Incidence matrix with `entries[b][a] = |σ(a)|_b` (rows indexed by the codomain).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IncidenceMatrix {
    pub entries: Vec<Vec<u64>>,
}

impl IncidenceMatrix {
    pub fn rows(&self) -> usize {
        self.entries.len()
    }

    pub fn cols(&self) -> usize {
        self.entries.first().map_or(0, |r| r.len())
    }

    pub fn mul(&self, other: &IncidenceMatrix) -> IncidenceMatrix {
        let (n, m, p) = (self.rows(), other.rows(), other.cols());
        let mut entries = vec![vec![0u64; p]; n];
        for i in 0..n {
            for k in 0..m {
                let x = self.entries[i][k];
                if x == 0 {
                    continue;
                }
                for j in 0..p {
                    entries[i][j] += x * other.entries[k][j];
                }
            }
        }
        IncidenceMatrix { entries }
    }
}

/// Which sides a morphism is proper on.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Properness {
    pub left: bool,
    pub right: bool,
    pub strongly_left: bool,
    pub strongly_right: bool,
    pub first_letter: Option<char>,
    pub last_letter: Option<char>,
}

/// A non-erasing morphism `domain* -> codomain*`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Morphism {
    domain: Alphabet,
    codomain: Alphabet,
    images: Vec<Word>,
}

impl Morphism {
    pub fn new(domain: Alphabet, codomain: Alphabet, images: Vec<Word>) -> Result<Self> {
        if images.len() != domain.len() {
            return Err(Error::InvalidMorphism(format!(
                "{} images for a domain of {} letters",
                images.len(),
                domain.len()
            )));
        }
        for (i, w) in images.iter().enumerate() {
            if w.is_empty() {
                return Err(Error::InvalidMorphism(format!("image of {} is empty", domain.letter(i))));
            }
            codomain.check_word(w)?;
        }
        Ok(Morphism { domain, codomain, images })
    }

    /// Endomorphism of `{1, ..., d}` from image literals, e.g. `&["1", "12", "13"]`.
    pub fn numeric(images: &[&str]) -> Result<Self> {
        let a = Alphabet::numeric(images.len());
        Self::new(a.clone(), a, images.iter().map(|s| Word::from(*s)).collect())
    }

    pub fn from_images(domain: Alphabet, codomain: Alphabet, images: &[&str]) -> Result<Self> {
        Self::new(domain, codomain, images.iter().map(|s| Word::from(*s)).collect())
    }

    pub fn identity(alphabet: &Alphabet) -> Self {
        let images = alphabet.symbols().iter().map(|&c| Word::new(vec![c])).collect();
        Morphism { domain: alphabet.clone(), codomain: alphabet.clone(), images }
    }

    pub fn domain(&self) -> &Alphabet {
        &self.domain
    }

    pub fn codomain(&self) -> &Alphabet {
        &self.codomain
    }

    pub fn images(&self) -> &[Word] {
        &self.images
    }

    pub fn image(&self, c: char) -> Result<&Word> {
        self.domain.index(c).map(|i| &self.images[i]).ok_or(Error::UnknownLetter(c))
    }

    pub fn max_image_len(&self) -> usize {
        self.images.iter().map(|w| w.len()).max().unwrap_or(0)
    }

    pub fn min_image_len(&self) -> usize {
        self.images.iter().map(|w| w.len()).min().unwrap_or(0)
    }

    pub fn apply(&self, w: &[char]) -> Result<Word> {
        let mut out = Vec::with_capacity(w.len() * self.max_image_len());
        for &c in w {
            out.extend_from_slice(self.image(c)?);
        }
        Ok(Word::new(out))
    }

    /// `self ∘ inner`, i.e. `a ↦ self(inner(a))`.
    pub fn compose(&self, inner: &Morphism) -> Result<Morphism> {
        if inner.codomain != self.domain {
            return Err(Error::AlphabetMismatch(format!(
                "cannot compose: inner codomain {} differs from outer domain {}",
                inner.codomain, self.domain
            )));
        }
        let images = inner.images.iter().map(|w| self.apply(w)).collect::<Result<Vec<_>>>()?;
        Ok(Morphism { domain: inner.domain.clone(), codomain: self.codomain.clone(), images })
    }

    /// `σ₁ ∘ σ₂ ∘ … ∘ σₙ`; the identity on `alphabet` when the list is empty.
    pub fn compose_all<'a>(alphabet: &Alphabet, morphisms: impl IntoIterator<Item = &'a Morphism>) -> Result<Morphism> {
        let mut acc = Morphism::identity(alphabet);
        for m in morphisms {
            acc = acc.compose(m)?;
        }
        Ok(acc)
    }

    pub fn incidence_matrix(&self) -> IncidenceMatrix {
        let mut entries = vec![vec![0u64; self.domain.len()]; self.codomain.len()];
        for (a, w) in self.images.iter().enumerate() {
            for &c in w.iter() {
                let b = self.codomain.index(c).expect("images live in the codomain");
                entries[b][a] += 1;
            }
        }
        IncidenceMatrix { entries }
    }

    pub fn properness(&self) -> Properness {
        let first = self.images[0].first();
        let last = self.images[0].last();
        let left = self.images.iter().all(|w| w.first() == first);
        let right = self.images.iter().all(|w| w.last() == last);
        let strongly_left = left && self.images.iter().all(|w| w.count(first.unwrap()) == 1);
        let strongly_right = right && self.images.iter().all(|w| w.count(last.unwrap()) == 1);
        Properness {
            left,
            right,
            strongly_left,
            strongly_right,
            first_letter: left.then_some(first.unwrap()),
            last_letter: right.then_some(last.unwrap()),
        }
    }

    /// The morphism `σ̄` with `σ(a)ℓ = ℓσ̄(a)` for the common first letter `ℓ`.
    pub fn right_conjugate(&self) -> Result<Morphism> {
        let l =
            self.properness().first_letter.ok_or_else(|| Error::Precondition("morphism is not left proper".into()))?;
        let images = self
            .images
            .iter()
            .map(|w| {
                let mut v = w[1..].to_vec();
                v.push(l);
                Word::new(v)
            })
            .collect();
        Ok(Morphism { domain: self.domain.clone(), codomain: self.codomain.clone(), images })
    }

    /// Bounded code test: no two distinct letter sequences whose images have
    /// total length at most twice the longest image produce the same word.
    pub fn check_injective(&self) -> Result<()> {
        let bound = 2 * self.max_image_len();
        let mut seen: HashMap<Vec<char>, Vec<usize>> = HashMap::new();
        let mut stack: Vec<(Vec<usize>, Vec<char>)> = vec![(Vec::new(), Vec::new())];
        while let Some((seq, img)) = stack.pop() {
            for (i, w) in self.images.iter().enumerate() {
                if img.len() + w.len() > bound {
                    continue;
                }
                let mut s = seq.clone();
                s.push(i);
                let mut m = img.clone();
                m.extend_from_slice(w);
                if let Some(prev) = seen.get(&m) {
                    let show = |q: &[usize]| q.iter().map(|&j| self.domain.letter(j)).collect::<String>();
                    return Err(Error::InvalidMorphism(format!(
                        "not injective: {} and {} both map to {}",
                        show(prev),
                        show(&s),
                        Word::new(m)
                    )));
                }
                seen.insert(m.clone(), s.clone());
                stack.push((s, m));
            }
        }
        Ok(())
    }

    pub fn is_injective(&self) -> bool {
        self.check_injective().is_ok()
    }

    /// Error unless the morphism is injective and strongly left proper.
    pub fn require_desubstitutable(&self) -> Result<char> {
        let p = self.properness();
        if !p.strongly_left {
            return Err(Error::Precondition(format!("{self} is not strongly left proper")));
        }
        self.check_injective()?;
        Ok(p.first_letter.unwrap())
    }

    pub fn to_json(&self) -> serde_json::Value {
        let mut map = serde_json::Map::new();
        for (i, w) in self.images.iter().enumerate() {
            map.insert(self.domain.letter(i).to_string(), w.to_string().into());
        }
        let list = |a: &Alphabet| serde_json::Value::Array(a.symbols().iter().map(|c| c.to_string().into()).collect());
        map.insert("domain".into(), list(&self.domain));
        map.insert("codomain".into(), list(&self.codomain));
        serde_json::Value::Object(map)
    }

    /// Parse the JSON object format: letter → image, plus optional
    /// `"domain"` and `"codomain"` symbol lists.
    pub fn from_json(text: &str) -> Result<Morphism> {
        let v: serde_json::Value = serde_json::from_str(text).map_err(|e| Error::Parse(format!("json: {e}")))?;
        let obj = v.as_object().ok_or_else(|| Error::Parse("json morphism must be an object".into()))?;
        let letters = |key: &str| -> Result<Option<Vec<char>>> {
            match obj.get(key) {
                None => Ok(None),
                Some(serde_json::Value::Array(xs)) => xs
                    .iter()
                    .map(|x| {
                        let s = x.as_str().unwrap_or_default();
                        let mut cs = s.chars();
                        match (cs.next(), cs.next()) {
                            (Some(c), None) => Ok(c),
                            _ => Err(Error::Parse(format!("{key} entries must be single letters"))),
                        }
                    })
                    .collect::<Result<Vec<_>>>()
                    .map(Some),
                Some(_) => Err(Error::Parse(format!("{key} must be a list"))),
            }
        };
        let mut images: BTreeMap<char, Word> = BTreeMap::new();
        for (k, val) in obj {
            if k == "domain" || k == "codomain" {
                continue;
            }
            let mut cs = k.chars();
            let c = match (cs.next(), cs.next()) {
                (Some(c), None) => c,
                _ => return Err(Error::Parse(format!("key {k:?} is not a single letter"))),
            };
            let img = val.as_str().ok_or_else(|| Error::Parse(format!("image of {k} must be a string")))?;
            images.insert(c, Word::from(img));
        }
        let domain = match letters("domain")? {
            Some(d) => Alphabet::new(d)?,
            None => Alphabet::new(images.keys().copied())?,
        };
        let codomain = match letters("codomain")? {
            Some(d) => Alphabet::new(d)?,
            None => {
                let mut syms: Vec<char> = domain.symbols().to_vec();
                let mut extra: Vec<char> =
                    images.values().flat_map(|w| w.iter().copied()).filter(|c| !syms.contains(c)).collect();
                extra.sort();
                extra.dedup();
                syms.extend(extra);
                Alphabet::new(syms)?
            }
        };
        let ordered = domain
            .symbols()
            .iter()
            .map(|c| images.remove(c).ok_or_else(|| Error::InvalidMorphism(format!("no image for {c}"))))
            .collect::<Result<Vec<_>>>()?;
        if let Some(c) = images.keys().next() {
            return Err(Error::InvalidMorphism(format!("letter {c} is not in the domain")));
        }
        Morphism::new(domain, codomain, ordered)
    }
}

impl fmt::Display for Morphism {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, w) in self.images.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{}->{}", self.domain.letter(i), w)?;
        }
        f.write_str("}")
    }
}

/// The six shapes of the ternary catalog. `Delta` and `Zeta` carry `k ≥ 1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Shape {
    Alpha,
    Beta,
    Gamma,
    Delta(u32),
    Zeta(u32),
    Eta,
}

/// A shape with its parameter forgotten.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ShapeKind {
    Alpha,
    Beta,
    Gamma,
    Delta,
    Zeta,
    Eta,
}

impl ShapeKind {
    pub const ALL: [ShapeKind; 6] =
        [ShapeKind::Alpha, ShapeKind::Beta, ShapeKind::Gamma, ShapeKind::Delta, ShapeKind::Zeta, ShapeKind::Eta];

    pub fn with_k(self, k: u32) -> Shape {
        match self {
            ShapeKind::Alpha => Shape::Alpha,
            ShapeKind::Beta => Shape::Beta,
            ShapeKind::Gamma => Shape::Gamma,
            ShapeKind::Delta => Shape::Delta(k),
            ShapeKind::Zeta => Shape::Zeta(k),
            ShapeKind::Eta => Shape::Eta,
        }
    }

    pub fn has_k(self) -> bool {
        matches!(self, ShapeKind::Delta | ShapeKind::Zeta)
    }

    /// Expression atom without `k`.
    pub fn atom(self) -> &'static str {
        match self {
            ShapeKind::Alpha => "a",
            ShapeKind::Beta => "b",
            ShapeKind::Gamma => "g",
            ShapeKind::Delta => "d",
            ShapeKind::Zeta => "z",
            ShapeKind::Eta => "e",
        }
    }
}

impl Shape {
    pub fn kind(self) -> ShapeKind {
        match self {
            Shape::Alpha => ShapeKind::Alpha,
            Shape::Beta => ShapeKind::Beta,
            Shape::Gamma => ShapeKind::Gamma,
            Shape::Delta(_) => ShapeKind::Delta,
            Shape::Zeta(_) => ShapeKind::Zeta,
            Shape::Eta => ShapeKind::Eta,
        }
    }

    pub fn k(self) -> Option<u32> {
        match self {
            Shape::Delta(k) | Shape::Zeta(k) => Some(k),
            _ => None,
        }
    }

    pub fn morphism(self) -> Morphism {
        let threes = |k: u32| "3".repeat(k as usize);
        let images: [String; 3] = match self {
            Shape::Alpha => ["1".into(), "12".into(), "13".into()],
            Shape::Beta => ["1".into(), "12".into(), "132".into()],
            Shape::Gamma => ["1".into(), "12".into(), "123".into()],
            Shape::Delta(k) => ["1".into(), format!("12{}", threes(k)), format!("12{}", threes(k + 1))],
            Shape::Zeta(k) => [format!("1{}", threes(k)), "12".into(), format!("1{}", threes(k + 1))],
            Shape::Eta => ["13".into(), "12".into(), "123".into()],
        };
        Morphism::numeric(&[&images[0], &images[1], &images[2]]).expect("catalog images are valid")
    }
}

impl fmt::Display for Shape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.kind().atom())?;
        if let Some(k) = self.k() {
            write!(f, "{k}")?;
        }
        Ok(())
    }
}

/// `α_a` on `{1, ..., d}`: `a ↦ a`, `b ↦ ab`.
pub fn arnoux_rauzy(a: char, d: usize) -> Result<Morphism> {
    ar_family(a, d, false)
}

/// `ᾱ_a` on `{1, ..., d}`: `a ↦ a`, `b ↦ ba`.
pub fn arnoux_rauzy_bar(a: char, d: usize) -> Result<Morphism> {
    ar_family(a, d, true)
}

fn ar_family(a: char, d: usize, bar: bool) -> Result<Morphism> {
    let alph = Alphabet::numeric(d);
    if !alph.contains(a) {
        return Err(Error::UnknownLetter(a));
    }
    let images = alph
        .symbols()
        .iter()
        .map(|&b| match (b == a, bar) {
            (true, _) => Word::new(vec![a]),
            (false, false) => Word::new(vec![a, b]),
            (false, true) => Word::new(vec![b, a]),
        })
        .collect();
    Morphism::new(alph.clone(), alph, images)
}

/// The Cassaigne morphisms `c₁` and `c₂`.
pub fn cassaigne(i: u8) -> Result<Morphism> {
    match i {
        1 => Morphism::numeric(&["1", "13", "2"]),
        2 => Morphism::numeric(&["2", "13", "3"]),
        _ => Err(Error::Parse(format!("no Cassaigne morphism c{i}"))),
    }
}

/// Catalog lookup by name. Accepted names: `alpha`, `beta`, `gamma`, `eta`,
/// `delta`, `zeta` (these two need `k`), `c1`, `c2`, and `ar<x>` / `arb<x>`
/// for the Arnoux-Rauzy morphisms on three letters.
pub fn catalog(name: &str, k: Option<u32>) -> Result<Morphism> {
    catalog_capped(name, k, DEFAULT_K_CAP)
}

pub fn catalog_capped(name: &str, k: Option<u32>, k_cap: u32) -> Result<Morphism> {
    let need_k = || -> Result<u32> {
        let k = k.ok_or_else(|| Error::Parse(format!("{name} needs a parameter k")))?;
        check_k(k, k_cap)?;
        Ok(k)
    };
    match name {
        "alpha" | "α" => Ok(Shape::Alpha.morphism()),
        "beta" | "β" => Ok(Shape::Beta.morphism()),
        "gamma" | "γ" => Ok(Shape::Gamma.morphism()),
        "eta" | "η" => Ok(Shape::Eta.morphism()),
        "delta" | "δ" => Ok(Shape::Delta(need_k()?).morphism()),
        "zeta" | "ζ" => Ok(Shape::Zeta(need_k()?).morphism()),
        "c1" => cassaigne(1),
        "c2" => cassaigne(2),
        _ => {
            if let Some(x) = name.strip_prefix("arb") {
                single_letter(x).and_then(|a| arnoux_rauzy_bar(a, 3))
            } else if let Some(x) = name.strip_prefix("ar") {
                single_letter(x).and_then(|a| arnoux_rauzy(a, 3))
            } else {
                Err(Error::Parse(format!("unknown catalog name {name:?}")))
            }
        }
    }
}

fn check_k(k: u32, cap: u32) -> Result<()> {
    if k == 0 || k > cap {
        Err(Error::Parse(format!("k = {k} outside 1..={cap}")))
    } else {
        Ok(())
    }
}

fn single_letter(s: &str) -> Result<char> {
    let mut cs = s.chars();
    match (cs.next(), cs.next()) {
        (Some(c), None) => Ok(c),
        _ => Err(Error::Parse(format!("expected one letter, got {s:?}"))),
    }
}

/// Parse one atom of the expression grammar.
pub fn parse_atom(atom: &str) -> Result<Morphism> {
    let parse_k = |digits: &str| -> Result<u32> {
        let k: u32 = digits.parse().map_err(|_| Error::Parse(format!("bad k in {atom:?}")))?;
        check_k(k, DEFAULT_K_CAP)?;
        Ok(k)
    };
    match atom {
        "a" => return Ok(Shape::Alpha.morphism()),
        "b" => return Ok(Shape::Beta.morphism()),
        "g" => return Ok(Shape::Gamma.morphism()),
        "e" => return Ok(Shape::Eta.morphism()),
        "abar" => return Shape::Alpha.morphism().right_conjugate(),
        "gbar" => return Shape::Gamma.morphism().right_conjugate(),
        "ebar" => return Shape::Eta.morphism().right_conjugate(),
        "c1" => return cassaigne(1),
        "c2" => return cassaigne(2),
        "id" => return Ok(Morphism::identity(&Alphabet::ternary())),
        _ => {}
    }
    if let Some(x) = atom.strip_prefix("arb") {
        return arnoux_rauzy_bar(single_letter(x)?, 3);
    }
    if let Some(x) = atom.strip_prefix("ar") {
        return arnoux_rauzy(single_letter(x)?, 3);
    }
    if let Some(x) = atom.strip_prefix('d') {
        return Ok(Shape::Delta(parse_k(x)?).morphism());
    }
    if let Some(x) = atom.strip_prefix('z') {
        return Ok(Shape::Zeta(parse_k(x)?).morphism());
    }
    if atom.starts_with('p') {
        return Ok(Permutation::parse(atom)?.to_morphism());
    }
    Err(Error::Parse(format!("unknown atom {atom:?}")))
}

/// Parse a composition such as `p213.g.p231`. The leftmost atom is applied last.
pub fn parse_expr(expr: &str) -> Result<Morphism> {
    let expr = expr.trim();
    if expr.is_empty() {
        return Err(Error::Parse("empty morphism expression".into()));
    }
    let mut acc: Option<Morphism> = None;
    for atom in expr.split('.') {
        let m = parse_atom(atom.trim())?;
        acc = Some(match acc {
            None => m,
            Some(outer) => outer.compose(&m)?,
        });
    }
    Ok(acc.unwrap())
}

/// Parse either a JSON object or an expression.
pub fn parse_morphism(text: &str) -> Result<Morphism> {
    if text.trim_start().starts_with('{') {
        Morphism::from_json(text)
    } else {
        parse_expr(text)
    }
}

/// The factorization `ᾱ_{a₁} ∘ … ∘ ᾱ_{aₙ} ∘ α_ℓ ∘ π`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ArFactorization {
    pub bars: Vec<char>,
    pub l: char,
    pub perm: Permutation,
}

impl ArFactorization {
    pub fn compose(&self) -> Result<Morphism> {
        let d = self.perm.degree();
        let mut m = arnoux_rauzy(self.l, d)?.compose(&self.perm.to_morphism())?;
        for &a in self.bars.iter().rev() {
            m = arnoux_rauzy_bar(a, d)?.compose(&m)?;
        }
        Ok(m)
    }
}

impl fmt::Display for ArFactorization {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for a in &self.bars {
            write!(f, "arb{a}.")?;
        }
        write!(f, "ar{}", self.l)?;
        if !self.perm.is_identity() {
            write!(f, ".{}", self.perm)?;
        }
        Ok(())
    }
}

/// Factor a dendric-preserving morphism into Arnoux-Rauzy pieces, or return
/// `None` when no such factorization exists. The peeling strips one `ᾱ_a` at
/// a time, where `a` is the first and last letter of the common suffix, and
/// the result is checked by recomposition.
pub fn ar_factorize(sigma: &Morphism) -> Result<Option<ArFactorization>> {
    let l = sigma.require_desubstitutable()?;
    let d = sigma.domain().len();
    if sigma.domain() != sigma.codomain() || *sigma.domain() != Alphabet::numeric(d) {
        return Ok(None);
    }
    let (tm, tp) = crate::desubstitution::common_affixes(sigma)?;
    if tm.len() != 1 || tp.len() != 1 {
        return Ok(None);
    }
    let s0 = tm.iter().next().unwrap().clone();
    let p0 = tp.iter().next().unwrap().clone();
    if p0.len() != s0.len() + 1 || p0[0] != l || p0[1..] != s0[..] {
        return Ok(None);
    }
    // π(c) is the letter following ℓs₀ in σ(c)ℓ.
    let mut perm = vec![0u8; d];
    for (i, w) in sigma.images().iter().enumerate() {
        let mut wl = w.to_vec();
        wl.push(l);
        match wl.get(p0.len()).and_then(|c| c.to_digit(10)) {
            Some(x) if wl.starts_with(&p0) => perm[i] = x as u8,
            _ => return Ok(None),
        }
    }
    let perm = match Permutation::new(perm) {
        Ok(p) => p,
        Err(_) => return Ok(None),
    };
    // σ = σ'' ∘ π with σ''(a) = σ(π⁻¹(a)).
    let inv = perm.inverse();
    let inner: Vec<Word> = (1..=d as u8).map(|a| sigma.images()[inv.apply(a) as usize - 1].clone()).collect();
    let mut cur = Morphism::new(sigma.domain().clone(), sigma.codomain().clone(), inner)?;
    let alpha_l = arnoux_rauzy(l, d)?;
    let mut bars = Vec::new();
    while cur != alpha_l {
        if !cur.properness().strongly_left || !cur.is_injective() {
            return Ok(None);
        }
        let (tm, _) = crate::desubstitution::common_affixes(&cur)?;
        if tm.len() != 1 {
            return Ok(None);
        }
        let s0 = tm.into_iter().next().unwrap();
        let (Some(a), Some(z)) = (s0.first(), s0.last()) else {
            return Ok(None);
        };
        if a != z {
            return Ok(None);
        }
        let mut images = Vec::with_capacity(d);
        for w in cur.images() {
            let mut out = Vec::with_capacity(w.len());
            let mut i = 0;
            while i < w.len() {
                out.push(w[i]);
                if w[i] != a {
                    if w.get(i + 1) != Some(&a) {
                        return Ok(None);
                    }
                    i += 1;
                }
                i += 1;
            }
            if out.is_empty() {
                return Ok(None);
            }
            images.push(Word::new(out));
        }
        let tau = Morphism::new(cur.domain().clone(), cur.codomain().clone(), images)?;
        if arnoux_rauzy_bar(a, d)?.compose(&tau)? != cur {
            return Ok(None);
        }
        bars.push(a);
        cur = tau;
    }
    let fact = ArFactorization { bars, l, perm };
    Ok((fact.compose()? == *sigma).then_some(fact))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(images: &[&str]) -> Morphism {
        Morphism::numeric(images).unwrap()
    }

    #[test]
    fn apply_and_compose() {
        let a01 = Alphabet::parse("01").unwrap();
        let fib = Morphism::from_images(a01.clone(), a01, &["01", "0"]).unwrap();
        assert_eq!(fib.apply(&Word::from("01")).unwrap(), Word::from("010"));
        let c1 = cassaigne(1).unwrap();
        assert_eq!(c1.compose(&c1).unwrap(), m(&["1", "12", "13"]));
        let trib = parse_expr("a.p231").unwrap();
        assert_eq!(trib, m(&["12", "13", "1"]));
    }

    #[test]
    fn compose_rejects_mismatched_alphabets() {
        let a01 = Alphabet::parse("01").unwrap();
        let fib = Morphism::from_images(a01.clone(), a01, &["01", "0"]).unwrap();
        assert!(matches!(fib.compose(&Shape::Alpha.morphism()), Err(Error::AlphabetMismatch(_))));
    }

    #[test]
    fn incidence_matrices() {
        assert_eq!(
            Shape::Alpha.morphism().incidence_matrix().entries,
            vec![vec![1, 1, 1], vec![0, 1, 0], vec![0, 0, 1]]
        );
        assert_eq!(
            Shape::Delta(1).morphism().incidence_matrix().entries,
            vec![vec![1, 1, 1], vec![0, 1, 1], vec![0, 1, 2]]
        );
        let id = Morphism::identity(&Alphabet::ternary()).incidence_matrix();
        assert_eq!(id.entries, vec![vec![1, 0, 0], vec![0, 1, 0], vec![0, 0, 1]]);
    }

    #[test]
    fn properness_flags() {
        let p = Shape::Beta.morphism().properness();
        assert!(p.strongly_left && !p.right);
        assert_eq!(p.first_letter, Some('1'));
        let p = arnoux_rauzy_bar('2', 3).unwrap().properness();
        assert!(p.strongly_right);
        assert_eq!(p.last_letter, Some('2'));
        let p = Morphism::identity(&Alphabet::parse("12").unwrap()).properness();
        assert!(!p.left && !p.right);
    }

    #[test]
    fn right_conjugates() {
        assert_eq!(Shape::Alpha.morphism().right_conjugate().unwrap(), m(&["1", "21", "31"]));
        assert_eq!(Shape::Gamma.morphism().right_conjugate().unwrap(), m(&["1", "21", "231"]));
        let one = Morphism::identity(&Alphabet::parse("1").unwrap());
        assert_eq!(one.right_conjugate().unwrap(), one);
        assert!(Morphism::identity(&Alphabet::ternary()).right_conjugate().is_err());
    }

    #[test]
    fn catalog_entries() {
        assert_eq!(catalog("zeta", Some(2)).unwrap(), m(&["133", "12", "1333"]));
        assert_eq!(catalog("c2", None).unwrap(), m(&["2", "13", "3"]));
        assert_eq!(catalog("arb3", None).unwrap(), m(&["13", "23", "3"]));
        assert!(catalog("delta", None).is_err());
        assert!(catalog("omega", None).is_err());
        assert!(catalog("delta", Some(65)).is_err());
    }

    #[test]
    fn expressions_compose_leftmost_last() {
        assert_eq!(parse_expr("p321.arb1.p321").unwrap(), m(&["13", "23", "3"]));
        assert_eq!(parse_expr("d2").unwrap(), m(&["1", "1233", "12333"]));
        assert!(parse_expr("a..b").is_err());
        assert!(parse_expr("p112").is_err());
    }

    #[test]
    fn json_round_trip() {
        let b = Shape::Beta.morphism();
        let text = b.to_json().to_string();
        assert_eq!(Morphism::from_json(&text).unwrap(), b);
        let plain = Morphism::from_json(r#"{"1":"1","2":"12","3":"13"}"#).unwrap();
        assert_eq!(plain, Shape::Alpha.morphism());
        assert!(Morphism::from_json(r#"{"1":""}"#).is_err());
    }

    #[test]
    fn injectivity_bound() {
        for s in [Shape::Alpha, Shape::Beta, Shape::Gamma, Shape::Delta(3), Shape::Zeta(2), Shape::Eta] {
            assert!(s.morphism().is_injective(), "{s}");
        }
        assert!(!m(&["1", "11", "2"]).is_injective());
        assert!(!m(&["12", "1", "2"]).is_injective());
    }

    #[test]
    fn ar_factorization_examples() {
        let f = ar_factorize(&Shape::Alpha.morphism()).unwrap().unwrap();
        assert_eq!((f.bars.len(), f.l, f.perm.is_identity()), (0, '1', true));
        assert_eq!(ar_factorize(&Shape::Gamma.morphism()).unwrap(), None);
        let s = arnoux_rauzy_bar('2', 3).unwrap().compose(&arnoux_rauzy('1', 3).unwrap()).unwrap();
        assert_eq!(s, m(&["12", "122", "1232"]));
        let f = ar_factorize(&s).unwrap().unwrap();
        assert_eq!(f.bars, vec!['2']);
        assert_eq!(f.l, '1');
        assert!(f.perm.is_identity());
        assert!(ar_factorize(&Morphism::identity(&Alphabet::ternary())).is_err());
    }

    #[test]
    fn singleton_affixes_do_not_imply_ar_form() {
        // Two letters always give singleton affix sets, yet 1 -> 1, 2 -> 122
        // has the 4-cycle 11, 12, 21, 22 among its initial factors.
        let s = m(&["1", "122"]);
        let (tm, tp) = crate::desubstitution::common_affixes(&s).unwrap();
        assert_eq!((tm.len(), tp.len()), (1, 1));
        assert_eq!(ar_factorize(&s).unwrap(), None);
    }

    #[test]
    fn permutations() {
        let p = Permutation::parse("p231").unwrap();
        assert_eq!(p.inverse(), Permutation::parse("312").unwrap());
        assert!(p.compose(&p.inverse()).is_identity());
        assert_eq!(p.apply(0), 0);
        assert_eq!(Permutation::all(3).len(), 6);
        assert_eq!(Permutation::all(4).len(), 24);
    }
}
