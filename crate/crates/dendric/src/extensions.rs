//! Extension graphs, dendricity and bispecial classification.

use std::collections::BTreeSet;
use std::fmt;

use crate::error::{Error, Result};
use crate::words::{show, FiniteLanguage, Node, Word};

/// Bipartite graph of two-sided extensions of a word. Vertex sets are the
/// projections of the edge set, so there are never isolated vertices.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ExtensionGraph {
    pub word: Word,
    pub left: BTreeSet<char>,
    pub right: BTreeSet<char>,
    pub edges: BTreeSet<(char, char)>,
}

impl ExtensionGraph {
    pub fn from_edges(word: Word, edges: impl IntoIterator<Item = (char, char)>) -> Self {
        let edges: BTreeSet<(char, char)> = edges.into_iter().collect();
        let left = edges.iter().map(|e| e.0).collect();
        let right = edges.iter().map(|e| e.1).collect();
        ExtensionGraph { word, left, right, edges }
    }

    /// Graph from `"ab"` pair literals, handy for examples.
    pub fn from_pairs(word: &str, pairs: &[&str]) -> Self {
        Self::from_edges(
            Word::from(word),
            pairs.iter().map(|p| {
                let cs: Vec<char> = p.chars().collect();
                (cs[0], cs[1])
            }),
        )
    }

    pub fn vertex_count(&self) -> usize {
        self.left.len() + self.right.len()
    }

    pub fn is_connected(&self) -> bool {
        if self.edges.is_empty() {
            return true;
        }
        let left: Vec<char> = self.left.iter().copied().collect();
        let right: Vec<char> = self.right.iter().copied().collect();
        let n = left.len() + right.len();
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(p: &mut [usize], x: usize) -> usize {
            let mut r = x;
            while p[r] != r {
                r = p[r];
            }
            let mut y = x;
            while p[y] != r {
                let next = p[y];
                p[y] = r;
                y = next;
            }
            r
        }
        for &(a, b) in &self.edges {
            let i = left.binary_search(&a).unwrap();
            let j = left.len() + right.binary_search(&b).unwrap();
            let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
            parent[ri] = rj;
        }
        let root = find(&mut parent, 0);
        (0..n).all(|x| find(&mut parent, x) == root)
    }

    /// Connected and acyclic, i.e. connected with one edge fewer than vertices.
    pub fn is_tree(&self) -> bool {
        !self.edges.is_empty() && self.edges.len() + 1 == self.vertex_count() && self.is_connected()
    }

    /// `#E − #E⁻ − #E⁺ + 1`.
    pub fn bilateral_multiplicity(&self) -> i64 {
        self.edges.len() as i64 - self.left.len() as i64 - self.right.len() as i64 + 1
    }

    pub fn is_bispecial(&self) -> bool {
        self.left.len() >= 2 && self.right.len() >= 2
    }

    /// Bispecial with every edge touching one fixed left vertex or one fixed right vertex.
    pub fn is_ordinary(&self) -> bool {
        self.is_bispecial() && self.edges.iter().any(|&(a, b)| self.edges.iter().all(|&(x, y)| x == a || y == b))
    }

    /// Drop the left vertex `a` together with the vertices it leaves isolated.
    pub fn remove_left(&self, a: char) -> ExtensionGraph {
        Self::from_edges(self.word.clone(), self.edges.iter().copied().filter(|e| e.0 != a))
    }

    /// Drop the right vertex `b` together with the vertices it leaves isolated.
    pub fn remove_right(&self, b: char) -> ExtensionGraph {
        Self::from_edges(self.word.clone(), self.edges.iter().copied().filter(|e| e.1 != b))
    }

    /// Rename both sides with `f`.
    pub fn map(&self, word: Word, f: impl Fn(char) -> char, g: impl Fn(char) -> char) -> ExtensionGraph {
        Self::from_edges(word, self.edges.iter().map(|&(a, b)| (f(a), g(b))))
    }

    /// Text dump: vertex headers then one `a-b` line per edge.
    pub fn dump(&self) -> String {
        let join = |s: &BTreeSet<char>| s.iter().map(|c| c.to_string()).collect::<Vec<_>>().join(" ");
        let mut out = format!("word: {}\nleft: {}\nright: {}\n", self.word, join(&self.left), join(&self.right));
        for (a, b) in &self.edges {
            out.push_str(&format!("{a}-{b}\n"));
        }
        out
    }

    pub fn to_dot(&self) -> String {
        let mut out = format!("graph \"E({})\" {{\n  rankdir=LR;\n", self.word);
        for a in &self.left {
            out.push_str(&format!("  \"L{a}\" [label=\"{a}\"];\n"));
        }
        for b in &self.right {
            out.push_str(&format!("  \"R{b}\" [label=\"{b}\"];\n"));
        }
        for (a, b) in &self.edges {
            out.push_str(&format!("  \"L{a}\" -- \"R{b}\";\n"));
        }
        out.push_str("}\n");
        out
    }
}

impl fmt::Display for ExtensionGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let edges: Vec<String> = self.edges.iter().map(|(a, b)| format!("{a}-{b}")).collect();
        write!(f, "E({}) = {{{}}}", self.word, edges.join(", "))
    }
}

fn check_query(lang: &FiniteLanguage, w: &[char]) -> Result<Node> {
    if w.len() + 2 > lang.horizon() {
        return Err(Error::HorizonExceeded { len: w.len() + 2, horizon: lang.horizon() });
    }
    lang.node_of(w)?.ok_or_else(|| Error::NotInLanguage(show(w)))
}

fn graph_from_nodes(lang: &FiniteLanguage, w: &[char], left_nodes: &[Option<Node>]) -> ExtensionGraph {
    let alph = lang.alphabet();
    let mut edges = Vec::new();
    for (i, ln) in left_nodes.iter().enumerate() {
        let Some(ln) = ln else { continue };
        for j in 0..alph.len() {
            if lang.child(*ln, j).is_some() {
                edges.push((alph.letter(i), alph.letter(j)));
            }
        }
    }
    ExtensionGraph::from_edges(Word::from(w), edges)
}

/// `ℰ(w)` with edges `{(a, b) : awb ∈ L}`. Needs `|w| + 2 ≤ horizon`.
pub fn extension_graph(lang: &FiniteLanguage, w: &[char]) -> Result<ExtensionGraph> {
    check_query(lang, w)?;
    let alph = lang.alphabet();
    let left_nodes: Vec<Option<Node>> = alph
        .symbols()
        .iter()
        .map(|&a| {
            let mut aw = Vec::with_capacity(w.len() + 1);
            aw.push(a);
            aw.extend_from_slice(w);
            lang.node_of(&aw).ok().flatten()
        })
        .collect();
    Ok(graph_from_nodes(lang, w, &left_nodes))
}

/// Visit the extension graph of every member of length at most `n_max`.
/// Each step extends the trie nodes of all `aw` at once, so the traversal
/// costs `O(d)` per word instead of `O(d·|w|)`.
pub fn visit_extension_graphs(lang: &FiniteLanguage, n_max: usize, mut f: impl FnMut(&ExtensionGraph)) -> Result<()> {
    if n_max + 2 > lang.horizon() {
        return Err(Error::HorizonExceeded { len: n_max + 2, horizon: lang.horizon() });
    }
    let alph = lang.alphabet();
    let d = alph.len();
    let root_left: Vec<Option<Node>> = (0..d).map(|i| lang.child(FiniteLanguage::ROOT, i)).collect();
    let mut stack: Vec<(Node, Vec<char>, Vec<Option<Node>>)> = vec![(FiniteLanguage::ROOT, Vec::new(), root_left)];
    while let Some((node, w, left)) = stack.pop() {
        f(&graph_from_nodes(lang, &w, &left));
        if w.len() == n_max {
            continue;
        }
        for j in (0..d).rev() {
            if let Some(child) = lang.child(node, j) {
                let next_left = left.iter().map(|ln| ln.and_then(|n| lang.child(n, j))).collect();
                let mut v = w.clone();
                v.push(alph.letter(j));
                stack.push((child, v, next_left));
            }
        }
    }
    Ok(())
}

pub fn is_tree(g: &ExtensionGraph) -> bool {
    g.is_tree()
}

pub fn is_dendric_word(lang: &FiniteLanguage, w: &[char]) -> Result<bool> {
    Ok(extension_graph(lang, w)?.is_tree())
}

pub fn bilateral_multiplicity(g: &ExtensionGraph) -> i64 {
    g.bilateral_multiplicity()
}

/// Special-ness flags of a single word.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct WordClass {
    pub left_special: bool,
    pub right_special: bool,
    pub bispecial: bool,
    pub ordinary: bool,
    pub dendric: bool,
}

impl WordClass {
    pub fn of(g: &ExtensionGraph) -> Self {
        WordClass {
            left_special: g.left.len() >= 2,
            right_special: g.right.len() >= 2,
            bispecial: g.is_bispecial(),
            ordinary: g.is_ordinary(),
            dendric: g.is_tree(),
        }
    }
}

pub fn classify_word(lang: &FiniteLanguage, w: &[char]) -> Result<WordClass> {
    Ok(WordClass::of(&extension_graph(lang, w)?))
}

/// Outcome of a dendricity audit.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AuditReport {
    /// Longest word length inspected.
    pub n_max: usize,
    pub words_checked: usize,
    pub bispecials: usize,
    pub non_dendric: Vec<ExtensionGraph>,
    /// Bispecial words whose bilateral multiplicity is not zero.
    pub nonzero_multiplicity: Vec<(Word, i64)>,
}

impl AuditReport {
    pub fn passed(&self) -> bool {
        self.non_dendric.is_empty() && self.nonzero_multiplicity.is_empty()
    }
}

/// Check every member of length at most `n_max` for dendricity, and every
/// bispecial member for zero bilateral multiplicity.
pub fn dendricity_audit(lang: &FiniteLanguage, n_max: usize) -> Result<AuditReport> {
    let mut report = AuditReport {
        n_max,
        words_checked: 0,
        bispecials: 0,
        non_dendric: Vec::new(),
        nonzero_multiplicity: Vec::new(),
    };
    visit_extension_graphs(lang, n_max, |g| {
        report.words_checked += 1;
        if !g.is_tree() {
            report.non_dendric.push(g.clone());
        }
        if g.is_bispecial() {
            report.bispecials += 1;
            let m = g.bilateral_multiplicity();
            if m != 0 {
                report.nonzero_multiplicity.push((g.word.clone(), m));
            }
        }
    })?;
    report.non_dendric.sort_by(|a, b| a.word.cmp(&b.word));
    report.nonzero_multiplicity.sort();
    Ok(report)
}

/// `Σ_{w ∈ ℒₙ} (#E⁺(w) − 1)` and `Σ_{w ∈ ℒₙ} (#E⁻(w) − 1)`, the two sides
/// of the complexity telescoping identity.
pub fn extension_excess(lang: &FiniteLanguage, n: usize) -> Result<(i64, i64)> {
    let mut right = 0i64;
    let mut left = 0i64;
    for w in lang.words_of_length(n)? {
        let g = extension_graph(lang, &w)?;
        right += g.right.len() as i64 - 1;
        left += g.left.len() as i64 - 1;
    }
    Ok((right, left))
}
