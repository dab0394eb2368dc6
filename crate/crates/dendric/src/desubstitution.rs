//! Desubstitution of bispecial factors under injective strongly left proper
//! morphisms: antecedents, radix trees of common affixes, the graph maps
//! `φ⁻_s`/`φ⁺_p`, and the dendric-preserving tests built on them.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use crate::error::{Error, Result};
use crate::extensions::{extension_graph, ExtensionGraph};
use crate::morphism::{Morphism, Shape};
use crate::words::{show, FiniteLanguage, LanguageBuilder, Word};

/// Longest common prefix.
pub fn lcp(a: &[char], b: &[char]) -> Word {
    let n = a.iter().zip(b).take_while(|(x, y)| x == y).count();
    Word::from(&a[..n])
}

/// Longest common suffix.
pub fn lcs(a: &[char], b: &[char]) -> Word {
    let n = a.iter().rev().zip(b.iter().rev()).take_while(|(x, y)| x == y).count();
    Word::from(&a[a.len() - n..])
}

fn with_first(sigma: &Morphism, b: char, l: char) -> Vec<char> {
    let mut w = sigma.image(b).expect("letter of the domain").to_vec();
    w.push(l);
    w
}

/// `(𝒯⁻(σ), 𝒯⁺(σ))`: common suffixes and prefixes of pairs of distinct letter images.
pub fn common_affixes(sigma: &Morphism) -> Result<(BTreeSet<Word>, BTreeSet<Word>)> {
    let l = sigma.require_desubstitutable()?;
    let letters = sigma.domain().symbols().iter().copied().collect();
    let left = RadixTree::build(sigma, Side::Left, &letters, l);
    let right = RadixTree::build(sigma, Side::Right, &letters, l);
    Ok((left.internal_nodes(), right.internal_nodes()))
}

/// `F_σ`, the factors of the words `σ(a)ℓ`, up to `horizon`.
pub fn initial_factor_language(sigma: &Morphism, horizon: usize) -> Result<FiniteLanguage> {
    let l = sigma.require_desubstitutable()?;
    let mut b = LanguageBuilder::new(sigma.codomain().clone(), horizon);
    for &a in sigma.domain().symbols() {
        let w = with_first(sigma, a, l);
        b.insert_factors(&w[..w.len().min(horizon)])?;
        for i in 1..w.len() {
            let end = (i + horizon).min(w.len());
            b.insert_factors(&w[i..end])?;
        }
    }
    Ok(b.build())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Side {
    Left,
    Right,
}

/// The radix tree on `𝒯̄⁻_v(σ)` (suffix order) or `𝒯̄⁺_v(σ)` (prefix order).
/// Leaves are the images `σ(a)` (resp. `σ(b)ℓ`) of the given letters.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RadixTree {
    pub side: Side,
    /// Nodes sorted by length; index 0 is the root.
    pub nodes: Vec<Word>,
    pub parent: Vec<Option<usize>>,
    /// Leaf node of each letter.
    pub leaves: BTreeMap<char, usize>,
}

impl RadixTree {
    pub fn build(sigma: &Morphism, side: Side, letters: &BTreeSet<char>, l: char) -> RadixTree {
        let leaf_word = |c: char| match side {
            Side::Left => sigma.image(c).expect("letter of the domain").to_vec(),
            Side::Right => with_first(sigma, c, l),
        };
        let affix = |a: &[char], b: &[char]| match side {
            Side::Left => lcs(a, b),
            Side::Right => lcp(a, b),
        };
        let mut set: BTreeSet<Word> = BTreeSet::new();
        let ls: Vec<char> = letters.iter().copied().collect();
        for (i, &a) in ls.iter().enumerate() {
            set.insert(Word::new(leaf_word(a)));
            for &b in &ls[i + 1..] {
                set.insert(affix(&leaf_word(a), &leaf_word(b)));
            }
        }
        let mut nodes: Vec<Word> = set.into_iter().collect();
        nodes.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
        let extends = |long: &[char], short: &[char]| match side {
            Side::Left => long.ends_with(short),
            Side::Right => long.starts_with(short),
        };
        let parent = (0..nodes.len())
            .map(|i| (0..i).rev().find(|&j| nodes[j].len() < nodes[i].len() && extends(&nodes[i], &nodes[j])))
            .collect();
        let index: HashMap<&Word, usize> = nodes.iter().enumerate().map(|(i, w)| (w, i)).collect();
        let leaves = ls.iter().map(|&c| (c, index[&Word::new(leaf_word(c))])).collect();
        RadixTree { side, nodes, parent, leaves }
    }

    pub fn root(&self) -> &Word {
        &self.nodes[0]
    }

    pub fn find(&self, w: &[char]) -> Option<usize> {
        self.nodes.iter().position(|n| n.letters() == w)
    }

    pub fn children(&self, i: usize) -> Vec<usize> {
        (0..self.nodes.len()).filter(|&j| self.parent[j] == Some(i)).collect()
    }

    fn is_leaf(&self, i: usize) -> bool {
        !self.parent.contains(&Some(i))
    }

    /// Nodes with at least one child, i.e. `𝒯⁻_v(σ)` or `𝒯⁺_v(σ)`.
    pub fn internal_nodes(&self) -> BTreeSet<Word> {
        (0..self.nodes.len()).filter(|&i| !self.is_leaf(i)).map(|i| self.nodes[i].clone()).collect()
    }

    fn ancestor_or_self(&self, mut j: usize, i: usize) -> bool {
        loop {
            if j == i {
                return true;
            }
            match self.parent[j] {
                Some(p) => j = p,
                None => return false,
            }
        }
    }

    /// Letters whose leaf lies below node `i`: `E⁻_{X,s}(v)` resp. `E⁺_{X,p}(v)`.
    pub fn letters_below(&self, i: usize) -> BTreeSet<char> {
        self.leaves.iter().filter(|(_, &j)| self.ancestor_or_self(j, i)).map(|(&c, _)| c).collect()
    }

    /// The partial map sending each letter below node `i` to the label of the
    /// child of `i` it lies under: the letter just before `s` in that child,
    /// or just after `p`.
    pub fn phi(&self, i: usize) -> BTreeMap<char, char> {
        let base = self.nodes[i].len();
        let mut map = BTreeMap::new();
        for c in self.children(i) {
            let child = &self.nodes[c];
            let label = match self.side {
                Side::Left => child[child.len() - base - 1],
                Side::Right => child[base],
            };
            for a in self.letters_below(c) {
                map.insert(a, label);
            }
        }
        map
    }
}

fn full_tree(sigma: &Morphism, side: Side) -> Result<RadixTree> {
    let l = sigma.require_desubstitutable()?;
    let letters = sigma.domain().symbols().iter().copied().collect();
    Ok(RadixTree::build(sigma, side, &letters, l))
}

/// `φ⁻_s` as a partial map on the domain alphabet.
pub fn phi_minus(sigma: &Morphism, s: &[char]) -> Result<BTreeMap<char, char>> {
    let t = full_tree(sigma, Side::Left)?;
    let i = t.find(s).ok_or_else(|| Error::Precondition(format!("{} is not in T-", show(s))))?;
    Ok(t.phi(i))
}

/// `φ⁺_p` as a partial map on the domain alphabet.
pub fn phi_plus(sigma: &Morphism, p: &[char]) -> Result<BTreeMap<char, char>> {
    let t = full_tree(sigma, Side::Right)?;
    let i = t.find(p).ok_or_else(|| Error::Precondition(format!("{} is not in T+", show(p))))?;
    Ok(t.phi(i))
}

/// Affix sets together with the φ map attached to each affix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PhiTable {
    pub minus: BTreeMap<Word, BTreeMap<char, char>>,
    pub plus: BTreeMap<Word, BTreeMap<char, char>>,
}

impl PhiTable {
    pub fn of(sigma: &Morphism) -> Result<PhiTable> {
        let side = |side| -> Result<BTreeMap<Word, BTreeMap<char, char>>> {
            let t = full_tree(sigma, side)?;
            Ok((0..t.nodes.len()).filter(|&i| !t.is_leaf(i)).map(|i| (t.nodes[i].clone(), t.phi(i))).collect())
        };
        Ok(PhiTable { minus: side(Side::Left)?, plus: side(Side::Right)? })
    }

    /// Hand-entered maps for the ternary catalog, in the form
    /// `affix: a↦x b↦y ...`.
    pub fn reference(shape: Shape) -> PhiTable {
        let threes = |k: u32| "3".repeat(k as usize);
        let (minus, plus): (Vec<(String, &str)>, Vec<(String, &str)>) = match shape {
            Shape::Alpha => (vec![("".into(), "11 22 33")], vec![("1".into(), "11 22 33")]),
            Shape::Beta => (vec![("".into(), "11 22 32"), ("2".into(), "21 33")], vec![("1".into(), "11 22 33")]),
            Shape::Gamma => (vec![("".into(), "11 22 33")], vec![("1".into(), "11 22 32"), ("12".into(), "21 33")]),
            Shape::Delta(k) => (
                vec![("".into(), "11 23 33"), (threes(k), "22 33")],
                vec![("1".into(), "11 22 32"), (format!("12{}", threes(k)), "21 33")],
            ),
            Shape::Zeta(k) => (
                vec![("".into(), "13 22 33"), (threes(k), "11 33")],
                vec![("1".into(), "13 22 33"), (format!("1{}", threes(k)), "11 33")],
            ),
            Shape::Eta => (
                vec![("".into(), "13 22 33"), ("3".into(), "11 32")],
                vec![("1".into(), "13 22 32"), ("12".into(), "21 33")],
            ),
        };
        let parse = |rows: Vec<(String, &str)>| {
            rows.into_iter()
                .map(|(affix, pairs)| {
                    let map = pairs
                        .split_whitespace()
                        .map(|p| {
                            let cs: Vec<char> = p.chars().collect();
                            (cs[0], cs[1])
                        })
                        .collect();
                    (Word::from(affix.as_str()), map)
                })
                .collect()
        };
        PhiTable { minus: parse(minus), plus: parse(plus) }
    }
}

impl fmt::Display for PhiTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let side = |f: &mut fmt::Formatter<'_>, name: &str, m: &BTreeMap<Word, BTreeMap<char, char>>| {
            let affixes: Vec<String> = m.keys().map(|w| w.to_string()).collect();
            write!(f, "T{name} = {{{}}}", affixes.join(", "))?;
            for (w, map) in m {
                let pairs: Vec<String> = map.iter().map(|(a, b)| format!("{a}->{b}")).collect();
                write!(f, "; phi{name}[{w}] = {{{}}}", pairs.join(", "))?;
            }
            Ok(())
        };
        side(f, "-", &self.minus)?;
        writeln!(f)?;
        side(f, "+", &self.plus)
    }
}

/// Outcome of desubstituting a non-empty word of the image language.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Antecedent {
    /// `u = s·σ(v)·p` with `|s|_ℓ = 0` and `p` starting with `ℓ`.
    Triple { s: Word, v: Word, p: Word },
    /// `ℓ` does not occur in `u`, which sits inside `σ(b)` away from its start.
    NonPrefixFactor(char),
}

/// Decode a word of the form `σ(v)` by cutting before each `ℓ`.
fn decode(sigma: &Morphism, l: char, w: &[char]) -> Option<Word> {
    let by_image: HashMap<&[char], char> =
        sigma.domain().symbols().iter().map(|&c| (sigma.image(c).unwrap().letters(), c)).collect();
    let mut v = Vec::new();
    let mut start = 0;
    for i in 1..=w.len() {
        if i == w.len() || w[i] == l {
            v.push(*by_image.get(&w[start..i])?);
            start = i;
        }
    }
    Some(Word::new(v))
}

/// The antecedent of `u` under `σ`, relative to the preimage language `lx`.
/// Membership of `u` in the image language is checked on the way.
pub fn antecedent(sigma: &Morphism, lx: &FiniteLanguage, u: &[char]) -> Result<Antecedent> {
    let l = sigma.require_desubstitutable()?;
    if u.is_empty() {
        return Err(Error::Precondition("antecedent of the empty word".into()));
    }
    let not_in = || Error::NotInLanguage(format!("{} is not in the image language", show(u)));
    let Some(first) = u.iter().position(|&c| c == l) else {
        for &b in sigma.domain().symbols() {
            let img = sigma.image(b)?;
            let inside = (1..img.len()).any(|i| img[i..].starts_with(u));
            if inside && lx.contains(&[b])? {
                return Ok(Antecedent::NonPrefixFactor(b));
            }
        }
        return Err(not_in());
    };
    let last = u.iter().rposition(|&c| c == l).unwrap();
    let s = Word::from(&u[..first]);
    let p = Word::from(&u[last..]);
    let v = decode(sigma, l, &u[first..last]).ok_or_else(not_in)?;
    let g = match extension_graph(lx, &v) {
        Ok(g) => g,
        Err(Error::NotInLanguage(_)) => return Err(not_in()),
        Err(e) => return Err(e),
    };
    let fits = g.edges.iter().any(|&(a, b)| {
        let sa = sigma.image(a).unwrap();
        sa.len() > s.len() && sa.ends_with(&s) && sigma.image(b).unwrap().starts_with(&p)
    });
    if fits {
        Ok(Antecedent::Triple { s, v, p })
    } else {
        Err(not_in())
    }
}

struct Trees {
    graph: ExtensionGraph,
    left: RadixTree,
    right: RadixTree,
}

fn trees(sigma: &Morphism, lx: &FiniteLanguage, v: &[char]) -> Result<Trees> {
    let l = sigma.require_desubstitutable()?;
    let need = v.len() + 2;
    if lx.horizon() < need {
        return Err(Error::HorizonExceeded { len: need, horizon: lx.horizon() });
    }
    let graph = extension_graph(lx, v)?;
    let left = RadixTree::build(sigma, Side::Left, &graph.left, l);
    let right = RadixTree::build(sigma, Side::Right, &graph.right, l);
    Ok(Trees { graph, left, right })
}

fn restrict(t: &Trees, si: usize, pi: usize) -> ExtensionGraph {
    let ls = t.left.letters_below(si);
    let rs = t.right.letters_below(pi);
    ExtensionGraph::from_edges(
        t.graph.word.clone(),
        t.graph.edges.iter().copied().filter(|(a, b)| ls.contains(a) && rs.contains(b)),
    )
}

/// `ℰ_{X,s,p}(v)`: the edges `(a, b)` of `ℰ(v)` with `σ(a)` ending in `s` and
/// `σ(b)ℓ` starting with `p`, isolated vertices dropped.
pub fn restricted_extensions(
    lx: &FiniteLanguage,
    sigma: &Morphism,
    v: &[char],
    s: &[char],
    p: &[char],
) -> Result<ExtensionGraph> {
    let t = trees(sigma, lx, v)?;
    let si = t.left.find(s).ok_or_else(|| Error::Precondition(format!("{} is not a left tree node", show(s))))?;
    let pi = t.right.find(p).ok_or_else(|| Error::Precondition(format!("{} is not a right tree node", show(p))))?;
    Ok(restrict(&t, si, pi))
}

/// A bispecial extended image `u = s·σ(v)·p` with its extension graph.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExtendedImage {
    pub s: Word,
    pub p: Word,
    pub graph: ExtensionGraph,
}

impl ExtendedImage {
    pub fn word(&self) -> &Word {
        &self.graph.word
    }
}

/// All bispecial extended images of the bispecial word `v`, each graph
/// obtained from `ℰ_{X,s,p}(v)` through the child-label maps of the trees.
pub fn extended_bispecial_images(sigma: &Morphism, lx: &FiniteLanguage, v: &[char]) -> Result<Vec<ExtendedImage>> {
    let t = trees(sigma, lx, v)?;
    if !t.graph.is_bispecial() {
        return Err(Error::Precondition(format!("{} is not bispecial", show(v))));
    }
    let l = sigma.properness().first_letter.unwrap();
    let mut pairs: BTreeSet<(usize, usize)> = BTreeSet::new();
    let edges: Vec<(char, char)> = t.graph.edges.iter().copied().collect();
    for &(a1, b1) in &edges {
        for &(a2, b2) in &edges {
            if a1 == a2 || b1 == b2 {
                continue;
            }
            let s = lcs(sigma.image(a1)?, sigma.image(a2)?);
            let p = lcp(&with_first(sigma, b1, l), &with_first(sigma, b2, l));
            pairs.insert((t.left.find(&s).unwrap(), t.right.find(&p).unwrap()));
        }
    }
    let sv = sigma.apply(v)?;
    let mut out = Vec::with_capacity(pairs.len());
    for (si, pi) in pairs {
        let s = t.left.nodes[si].clone();
        let p = t.right.nodes[pi].clone();
        let u = Word::new([s.letters(), sv.letters(), p.letters()].concat());
        let fl = t.left.phi(si);
        let fr = t.right.phi(pi);
        let graph = restrict(&t, si, pi).map(u, |a| fl[&a], |b| fr[&b]);
        out.push(ExtendedImage { s, p, graph });
    }
    let alph = sigma.codomain();
    out.sort_by(|x, y| alph.cmp_words(x.word(), y.word()));
    Ok(out)
}

/// Whether every bispecial extended image of the dendric bispecial word `v`
/// is dendric, via the two families of trees rooted at `s₀` and `p₀`.
pub fn is_dendric_preserving_for(sigma: &Morphism, lx: &FiniteLanguage, v: &[char]) -> Result<bool> {
    let t = trees(sigma, lx, v)?;
    if !t.graph.is_bispecial() || !t.graph.is_tree() {
        return Err(Error::Precondition(format!("{} is not a dendric bispecial word", show(v))));
    }
    let internal = |tree: &RadixTree| -> Vec<usize> { (1..tree.nodes.len()).filter(|&i| !tree.is_leaf(i)).collect() };
    let lefts_ok = internal(&t.left).into_iter().all(|si| restrict(&t, si, 0).is_tree());
    let rights_ok = internal(&t.right).into_iter().all(|pi| restrict(&t, 0, pi).is_tree());
    Ok(lefts_ok && rights_ok)
}

/// Dendric preserving for every shift: both affix sets are singletons.
pub fn is_universally_dendric_preserving(sigma: &Morphism) -> Result<bool> {
    let (tm, tp) = common_affixes(sigma)?;
    Ok(tm.len() == 1 && tp.len() == 1)
}
