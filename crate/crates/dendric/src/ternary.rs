//! Class labels of ternary dendric shifts, the class graphs and their path
//! searches, and one step of the inverse S-adic construction.

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::extensions::{extension_graph, visit_extension_graphs, ExtensionGraph};
use crate::morphism::{Morphism, Permutation, Shape, ShapeKind};
use crate::sadic::{derived_language, ReturnWordSet};
use crate::words::{Alphabet, FiniteLanguage, Word};

/// `[l, r]` with `l, r ∈ {0, 1, 2, 3}`; 0 stands for the empty set.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ClassLabel {
    pub l: u8,
    pub r: u8,
}

impl ClassLabel {
    pub fn new(l: u8, r: u8) -> Result<Self> {
        if l > 3 || r > 3 {
            return Err(Error::Precondition(format!("class entries must lie in 0..=3, got [{l},{r}]")));
        }
        Ok(ClassLabel { l, r })
    }

    /// Apply a permutation to both entries; 0 is fixed.
    pub fn permute(self, p: &Permutation) -> ClassLabel {
        ClassLabel { l: p.apply(self.l), r: p.apply(self.r) }
    }

    /// The five vertices of the full class graph.
    pub fn representatives() -> [ClassLabel; 5] {
        [lbl(0, 0), lbl(0, 3), lbl(3, 0), lbl(3, 2), lbl(3, 3)]
    }

    /// All sixteen labels.
    pub fn all() -> Vec<ClassLabel> {
        (0..4).flat_map(|l| (0..4).map(move |r| lbl(l, r))).collect()
    }
}

fn lbl(l: u8, r: u8) -> ClassLabel {
    ClassLabel { l, r }
}

impl fmt::Display for ClassLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{},{}]", self.l, self.r)
    }
}

impl FromStr for ClassLabel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Parse(format!("expected a class like [3,2], got {s:?}"));
        let inner = s.trim().strip_prefix('[').and_then(|t| t.strip_suffix(']')).ok_or_else(bad)?;
        let (a, b) = inner.split_once(',').ok_or_else(bad)?;
        let l: u8 = a.trim().parse().map_err(|_| bad())?;
        let r: u8 = b.trim().parse().map_err(|_| bad())?;
        ClassLabel::new(l, r)
    }
}

fn letter_value(c: char) -> u8 {
    match c {
        '1' => 1,
        '2' => 2,
        '3' => 3,
        _ => 0,
    }
}

fn value_letter(x: u8) -> char {
    char::from(b'0' + x)
}

/// The letters of each side whose removal disconnects the graph. Removing a
/// vertex also removes the vertices left isolated.
pub fn c_sets_of_graph(g: &ExtensionGraph) -> (BTreeSet<char>, BTreeSet<char>) {
    let left = g.left.iter().copied().filter(|&a| !g.remove_left(a).is_connected()).collect();
    let right = g.right.iter().copied().filter(|&b| !g.remove_right(b).is_connected()).collect();
    (left, right)
}

/// `(𝒞⁻(w), 𝒞⁺(w))` computed on the extension graph of `w` in `lang`.
pub fn c_sets(lang: &FiniteLanguage, w: &[char]) -> Result<(BTreeSet<char>, BTreeSet<char>)> {
    Ok(c_sets_of_graph(&extension_graph(lang, w)?))
}

/// Outcome of a class scan over the bispecial words of a language.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClassReport {
    pub class: ClassLabel,
    /// Length of the bispecial word that last added a letter on the left.
    pub left_stable_at: usize,
    pub right_stable_at: usize,
    /// Longest bispecial length inspected.
    pub scanned_to: usize,
    /// True when the scan went at least `delta` lengths past the last change.
    pub settled: bool,
}

pub const DEFAULT_STABILITY_MARGIN: usize = 8;

/// Union of the `𝒞±` sets of every bispecial word of length at most
/// `n_max`. Fails if a word is not dendric or a side collects two letters.
pub fn classify_shift(lang: &FiniteLanguage, n_max: usize, delta: usize) -> Result<ClassReport> {
    if lang.alphabet() != &Alphabet::ternary() {
        return Err(Error::AlphabetMismatch(format!("class scans need the alphabet 123, got {}", lang.alphabet())));
    }
    let mut left: BTreeSet<char> = BTreeSet::new();
    let mut right: BTreeSet<char> = BTreeSet::new();
    let (mut left_at, mut right_at) = (0, 0);
    let mut failure: Option<Error> = None;
    visit_extension_graphs(lang, n_max, |g| {
        if failure.is_some() {
            return;
        }
        if !g.is_tree() {
            failure = Some(Error::AuditFailed(format!("{g} is not a tree")));
            return;
        }
        if !g.is_bispecial() {
            return;
        }
        let (cl, cr) = c_sets_of_graph(g);
        for c in cl {
            if left.insert(c) {
                left_at = left_at.max(g.word.len());
            }
        }
        for c in cr {
            if right.insert(c) {
                right_at = right_at.max(g.word.len());
            }
        }
    })?;
    if let Some(e) = failure {
        return Err(e);
    }
    let one = |s: &BTreeSet<char>, side: &str| -> Result<u8> {
        match s.len() {
            0 => Ok(0),
            1 => Ok(letter_value(*s.iter().next().unwrap())),
            _ => Err(Error::AuditFailed(format!("two letters {s:?} on the {side} side"))),
        }
    };
    let class = ClassLabel { l: one(&left, "left")?, r: one(&right, "right")? };
    let last = left_at.max(right_at);
    Ok(ClassReport {
        class,
        left_stable_at: left_at,
        right_stable_at: right_at,
        scanned_to: n_max,
        settled: n_max >= last + delta,
    })
}

/// The class transition of a bare catalog shape, or the violated condition.
pub fn shape_class_image(kind: ShapeKind, c: ClassLabel) -> Result<ClassLabel> {
    let fail = |cond: &str| Err(Error::ConditionViolated(format!("{} on {c} needs {cond}", kind.atom())));
    let ClassLabel { l, r } = c;
    match kind {
        ShapeKind::Alpha => Ok(c),
        ShapeKind::Beta if l != 1 => Ok(lbl(1, r)),
        ShapeKind::Beta => fail("l != 1"),
        ShapeKind::Gamma if r != 1 => Ok(lbl(l, 1)),
        ShapeKind::Gamma => fail("r != 1"),
        ShapeKind::Delta if l != 1 && r != 1 => Ok(lbl(3, 1)),
        ShapeKind::Delta => fail("l, r != 1"),
        ShapeKind::Zeta if l != 2 && r != 2 => Ok(lbl(3, 3)),
        ShapeKind::Zeta => fail("l, r != 2"),
        ShapeKind::Eta if l != 2 && r != 1 => Ok(lbl(2, 3)),
        ShapeKind::Eta => fail("l != 2, r != 1"),
    }
}

/// `π ∘ σ ∘ π′` with `σ` a catalog shape.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Decomposition {
    pub pre: Permutation,
    pub shape: Shape,
    pub post: Permutation,
}

impl Decomposition {
    pub fn morphism(&self) -> Morphism {
        compose3(&self.pre, &self.shape.morphism(), &self.post)
    }

    pub fn class_image(&self, c: ClassLabel) -> Result<ClassLabel> {
        Ok(shape_class_image(self.shape.kind(), c.permute(&self.post))?.permute(&self.pre))
    }

    pub fn label(&self) -> EdgeLabel {
        EdgeLabel { pre: self.pre.clone(), kind: self.shape.kind(), post: self.post.clone() }
    }
}

impl fmt::Display for Decomposition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let atom = match self.shape.k() {
            Some(k) => format!("{}{k}", self.shape.kind().atom()),
            None => self.shape.kind().atom().to_string(),
        };
        f.write_str(&wrap(&self.pre, &atom, &self.post))
    }
}

fn wrap(pre: &Permutation, atom: &str, post: &Permutation) -> String {
    let mut parts = Vec::new();
    if !pre.is_identity() {
        parts.push(format!("p{}", perm_digits(pre)));
    }
    parts.push(atom.to_string());
    if !post.is_identity() {
        parts.push(format!("p{}", perm_digits(post)));
    }
    parts.join(".")
}

fn perm_digits(p: &Permutation) -> String {
    p.images().iter().map(|&x| value_letter(x)).collect()
}

fn compose3(pre: &Permutation, m: &Morphism, post: &Permutation) -> Morphism {
    pre.to_morphism().compose(m).and_then(|x| x.compose(&post.to_morphism())).expect("ternary alphabets agree")
}

fn shape_candidates(m: &Morphism) -> Vec<Shape> {
    let lens: Vec<usize> = m.images().iter().map(|w| w.len()).collect();
    let mut out = vec![Shape::Alpha, Shape::Beta, Shape::Gamma, Shape::Eta];
    if lens[1] >= 3 {
        out.push(Shape::Delta(lens[1] as u32 - 2));
    }
    if lens[0] >= 2 {
        out.push(Shape::Zeta(lens[0] as u32 - 1));
    }
    out
}

/// Every way of writing `m` as `π ∘ σ ∘ π′` with `σ` in the catalog. The
/// list is empty when `m` is not of that form; it has two entries for
/// labels built on `α`, since `α = π₁₃₂ α π₁₃₂`.
pub fn decompositions(m: &Morphism) -> Vec<Decomposition> {
    let tern = Alphabet::ternary();
    if m.domain() != &tern || m.codomain() != &tern {
        return Vec::new();
    }
    let perms = Permutation::all(3);
    let mut out = Vec::new();
    for pre in &perms {
        for post in &perms {
            // σ = π⁻¹ ∘ m ∘ π′⁻¹
            let core = compose3(&pre.inverse(), m, &post.inverse());
            for shape in shape_candidates(&core) {
                if shape.morphism() == core {
                    out.push(Decomposition { pre: pre.clone(), shape, post: post.clone() });
                }
            }
        }
    }
    out
}

pub fn decompose(m: &Morphism) -> Result<Decomposition> {
    decompositions(m).into_iter().next().ok_or_else(|| Error::NotDecomposable(m.to_string()))
}

/// Image of a class under a morphism of `Σ₃𝒮₃Σ₃`.
pub fn class_image(c: ClassLabel, m: &Morphism) -> Result<ClassLabel> {
    let ds = decompositions(m);
    let first = ds.first().ok_or_else(|| Error::NotDecomposable(m.to_string()))?;
    let image = first.class_image(c)?;
    debug_assert!(ds.iter().all(|d| d.class_image(c).ok() == Some(image)));
    Ok(image)
}

/// `π ∘ σ ∘ π′` with the parameter of `δ`/`ζ` left symbolic.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct EdgeLabel {
    pub pre: Permutation,
    pub kind: ShapeKind,
    pub post: Permutation,
}

impl EdgeLabel {
    pub fn instantiate(&self, k: u32) -> Morphism {
        compose3(&self.pre, &self.kind.with_k(k).morphism(), &self.post)
    }

    /// Identity of the family as a set of morphisms. Two parameter values
    /// suffice because every label is affine in `k`.
    pub fn key(&self) -> (ShapeKind, String, String) {
        (self.kind, self.instantiate(1).to_string(), self.instantiate(2).to_string())
    }

    /// `p213.b.p132` style; `δ`/`ζ` print as `dk`/`zk`.
    pub fn parse(s: &str) -> Result<EdgeLabel> {
        let atoms: Vec<&str> = s.trim().split('.').map(str::trim).collect();
        let is_perm = |a: &str| a.starts_with('p') && a.len() == 4;
        let (pre, rest) = match atoms.first() {
            Some(a) if is_perm(a) => (Permutation::parse(a)?, &atoms[1..]),
            _ => (Permutation::identity(3), &atoms[..]),
        };
        let (core, post) = match rest {
            [c] => (*c, Permutation::identity(3)),
            [c, p] if is_perm(p) => (*c, Permutation::parse(p)?),
            _ => return Err(Error::Parse(format!("expected [perm.]shape[.perm], got {s:?}"))),
        };
        let kind = match core {
            "a" => ShapeKind::Alpha,
            "b" => ShapeKind::Beta,
            "g" => ShapeKind::Gamma,
            "d" | "dk" => ShapeKind::Delta,
            "z" | "zk" => ShapeKind::Zeta,
            "e" => ShapeKind::Eta,
            _ => return Err(Error::Parse(format!("unknown shape {core:?} in {s:?}"))),
        };
        Ok(EdgeLabel { pre, kind, post })
    }
}

impl fmt::Display for EdgeLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let atom = if self.kind.has_k() { format!("{}k", self.kind.atom()) } else { self.kind.atom().to_string() };
        f.write_str(&wrap(&self.pre, &atom, &self.post))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Edge {
    pub from: ClassLabel,
    pub to: ClassLabel,
    pub label: EdgeLabel,
}

/// A class graph. Every vertex also has an incoming edge for each
/// permutation, which is left implicit.
#[derive(Clone, Debug)]
pub struct ClassGraph {
    pub name: String,
    pub vertices: Vec<ClassLabel>,
    pub edges: Vec<Edge>,
}

/// Canonical form of the edge set, used for equality tests between graphs.
pub type EdgeKey = (ClassLabel, ClassLabel, (ShapeKind, String, String));

impl ClassGraph {
    pub fn labels(&self, from: ClassLabel, to: ClassLabel) -> Vec<&EdgeLabel> {
        self.edges.iter().filter(|e| e.from == from && e.to == to).map(|e| &e.label).collect()
    }

    pub fn edge_keys(&self) -> BTreeSet<EdgeKey> {
        self.edges.iter().map(|e| (e.from, e.to, e.label.key())).collect()
    }

    /// Every edge of `self` is an edge of `other`.
    pub fn is_subgraph_of(&self, other: &ClassGraph) -> bool {
        self.vertices.iter().all(|v| other.vertices.contains(v)) && self.edge_keys().is_subset(&other.edge_keys())
    }

    /// `[from,to] label` lines in a stable order.
    pub fn dump(&self) -> String {
        let mut lines: Vec<String> = self.edges.iter().map(|e| format!("{} -> {} {}", e.from, e.to, e.label)).collect();
        lines.sort();
        let mut out = format!("graph {}\n", self.name);
        for l in lines {
            out.push_str(&l);
            out.push('\n');
        }
        out
    }

    fn from_lists(name: &str, vertices: Vec<ClassLabel>, lists: &[(ClassLabel, ClassLabel, &[&str])]) -> ClassGraph {
        let mut edges = Vec::new();
        for (from, to, labels) in lists {
            for s in labels.iter() {
                let label = EdgeLabel::parse(s).expect("edge list literals parse");
                edges.push(Edge { from: *from, to: *to, label });
            }
        }
        ClassGraph { name: name.to_string(), vertices, edges }
    }

    fn vertex_index(&self, c: ClassLabel) -> usize {
        self.vertices.iter().position(|&v| v == c).expect("vertex of the graph")
    }

    /// Morphism → (from, to) index pairs with `k` instantiated up to `k_max`.
    fn label_index(&self, k_max: u32) -> HashMap<Morphism, Vec<(usize, usize)>> {
        let mut idx: HashMap<Morphism, Vec<(usize, usize)>> = HashMap::new();
        for e in &self.edges {
            let pair = (self.vertex_index(e.from), self.vertex_index(e.to));
            let ks: Vec<u32> = if e.label.kind.has_k() { (1..=k_max.max(1)).collect() } else { vec![1] };
            for k in ks {
                let entry = idx.entry(e.label.instantiate(k)).or_default();
                if !entry.contains(&pair) {
                    entry.push(pair);
                }
            }
        }
        idx
    }
}

fn drawn_lists() -> Vec<(ClassLabel, ClassLabel, &'static [&'static str])> {
    vec![
        (
            lbl(3, 2),
            lbl(3, 2),
            &[
                "a",
                "p213.a.p213",
                "p321.a.p321",
                "p321.b",
                "p312.b.p132",
                "p213.g",
                "p231.g.p132",
                "p213.dk",
                "p213.dk.p132",
                "p132.e",
                "p132.e.p231",
                "p132.e.p321",
            ],
        ),
        (
            lbl(3, 3),
            lbl(3, 3),
            &["a", "p213.a.p213", "p321.a.p321", "zk.p213", "p213.zk.p213", "zk.p231", "p213.zk.p231"],
        ),
        (
            lbl(3, 2),
            lbl(3, 3),
            &["p312.b.p213", "p321.b.p312", "p213.g", "p231.g.p132", "p213.dk", "p213.dk.p132", "p132.e"],
        ),
        (
            lbl(3, 3),
            lbl(3, 2),
            &[
                "p312.b.p213",
                "p321.b.p213",
                "p312.b.p312",
                "p321.b.p312",
                "p312.g.p231",
                "p321.g.p231",
                "p312.g.p321",
                "p321.g.p321",
                "zk.p213",
                "p213.zk.p213",
                "zk.p231",
                "p213.zk.p231",
            ],
        ),
    ]
}

/// The two-vertex graph as drawn by hand, used as golden data.
pub fn drawn_graph() -> ClassGraph {
    ClassGraph::from_lists("G(drawn)", vec![lbl(3, 2), lbl(3, 3)], &drawn_lists())
}

/// The interval-exchange induction cases: source class, condition text,
/// label, target class, and the interval induced on.
pub struct InductionCase {
    pub from: ClassLabel,
    pub condition: &'static str,
    pub label: &'static str,
    pub to: ClassLabel,
    pub interval: usize,
}

pub const INDUCTION_CASES: [InductionCase; 9] = [
    InductionCase { from: lbl32(), condition: "l1 > l2 + l3", label: "a", to: lbl32(), interval: 1 },
    InductionCase { from: lbl32(), condition: "l2, l3 < l1 < l2 + l3", label: "p132.e.p321", to: lbl32(), interval: 1 },
    InductionCase { from: lbl32(), condition: "l2 < l1 < l3", label: "p312.b.p213", to: lbl33(), interval: 3 },
    InductionCase { from: lbl32(), condition: "l3 < l1 < l2", label: "p213.g", to: lbl33(), interval: 2 },
    InductionCase {
        from: lbl32(),
        condition: "l1 < l2, l3 and k l1 < l3 < (k+1) l1",
        label: "p213.dk",
        to: lbl33(),
        interval: 2,
    },
    InductionCase { from: lbl33(), condition: "l1 > l2 + l3", label: "a", to: lbl33(), interval: 1 },
    InductionCase { from: lbl33(), condition: "l2 > l1 + l3", label: "p213.a.p213", to: lbl33(), interval: 2 },
    InductionCase {
        from: lbl33(),
        condition: "l2 < l1 < l2 + l3 and k (l1 - l2) < l3 < (k+1) (l1 - l2)",
        label: "zk.p213",
        to: lbl33(),
        interval: 1,
    },
    InductionCase {
        from: lbl33(),
        condition: "l1 < l2 < l1 + l3 and k (l2 - l1) < l3 < (k+1) (l2 - l1)",
        label: "p213.zk.p213",
        to: lbl33(),
        interval: 2,
    },
];

const fn lbl32() -> ClassLabel {
    ClassLabel { l: 3, r: 2 }
}

const fn lbl33() -> ClassLabel {
    ClassLabel { l: 3, r: 3 }
}

/// The three class graphs.
#[derive(Clone, Debug)]
pub struct ClassGraphs {
    pub full: ClassGraph,
    pub reduced: ClassGraph,
    pub iet: ClassGraph,
}

/// All edges between the five representative classes, one per distinct
/// label family.
pub fn build_full_graph() -> ClassGraph {
    let vertices = ClassLabel::representatives().to_vec();
    let perms = Permutation::all(3);
    let mut seen: BTreeSet<EdgeKey> = BTreeSet::new();
    let mut edges = Vec::new();
    for &from in &vertices {
        for &to in &vertices {
            for pre in &perms {
                for kind in ShapeKind::ALL {
                    for post in &perms {
                        let Ok(image) = shape_class_image(kind, to.permute(post)) else { continue };
                        if image.permute(pre) != from {
                            continue;
                        }
                        let label = EdgeLabel { pre: pre.clone(), kind, post: post.clone() };
                        if seen.insert((from, to, label.key())) {
                            edges.push(Edge { from, to, label });
                        }
                    }
                }
            }
        }
    }
    ClassGraph { name: "G'".into(), vertices, edges }
}

/// Restrict the full graph to `[3,2]` and `[3,3]`, then keep one edge of
/// each pair `σ`, `σπ₂₁₃` entering `[3,3]`, choosing the one in `keep`.
pub fn reduce_graph(full: &ClassGraph, keep: &ClassGraph) -> Result<ClassGraph> {
    let vertices = vec![lbl(3, 2), lbl(3, 3)];
    let keep_keys = keep.edge_keys();
    let swap = Permutation::parse("213")?;
    let mut edges = Vec::new();
    for e in &full.edges {
        if !vertices.contains(&e.from) || !vertices.contains(&e.to) {
            continue;
        }
        if e.to != lbl(3, 3) {
            edges.push(e.clone());
            continue;
        }
        let partner = EdgeLabel { pre: e.label.pre.clone(), kind: e.label.kind, post: e.label.post.compose(&swap) };
        let mine = keep_keys.contains(&(e.from, e.to, e.label.key()));
        let theirs = keep_keys.contains(&(e.from, e.to, partner.key()));
        if mine && theirs && partner.key() != e.label.key() {
            return Err(Error::Precondition(format!("both {} and {} are kept", e.label, partner)));
        }
        if mine {
            edges.push(e.clone());
        } else if !theirs {
            return Err(Error::Precondition(format!("neither {} nor {} is kept into [3,3]", e.label, partner)));
        }
    }
    Ok(ClassGraph { name: "G".into(), vertices, edges })
}

pub fn build_iet_graph() -> ClassGraph {
    let vertices = vec![lbl(3, 2), lbl(3, 3)];
    let edges = INDUCTION_CASES
        .iter()
        .map(|c| Edge { from: c.from, to: c.to, label: EdgeLabel::parse(c.label).expect("case labels parse") })
        .collect();
    ClassGraph { name: "G_IET".into(), vertices, edges }
}

pub fn build_graphs() -> ClassGraphs {
    let full = build_full_graph();
    let reduced = reduce_graph(&full, &drawn_graph()).expect("the drawing keeps exactly one edge per pair");
    ClassGraphs { full, reduced, iet: build_iet_graph() }
}

fn k_bound(prefix: &[Morphism]) -> u32 {
    prefix.iter().map(|m| m.max_image_len() as u32).max().unwrap_or(1)
}

fn require_decomposable(prefix: &[Morphism]) -> Result<()> {
    for m in prefix {
        if decompositions(m).is_empty() {
            return Err(Error::NotDecomposable(m.to_string()));
        }
    }
    Ok(())
}

/// Every vertex sequence along which the prefix labels a path.
pub fn path_check(prefix: &[Morphism], g: &ClassGraph) -> Result<Vec<Vec<ClassLabel>>> {
    require_decomposable(prefix)?;
    let idx = g.label_index(k_bound(prefix));
    let mut paths: Vec<Vec<usize>> = (0..g.vertices.len()).map(|v| vec![v]).collect();
    for m in prefix {
        let Some(pairs) = idx.get(m) else { return Ok(Vec::new()) };
        let mut next = Vec::new();
        for p in &paths {
            let cur = *p.last().unwrap();
            for &(from, to) in pairs {
                if from == cur {
                    let mut q = p.clone();
                    q.push(to);
                    next.push(q);
                }
            }
        }
        paths = next;
        if paths.is_empty() {
            break;
        }
    }
    Ok(paths.into_iter().map(|p| p.into_iter().map(|i| g.vertices[i]).collect()).collect())
}

/// A path labeled by a sequence equivalent to a given prefix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EquivalentPath {
    /// Label of the initial permutation edge.
    pub initial: Permutation,
    pub labels: Vec<Morphism>,
    pub vertices: Vec<ClassLabel>,
    /// `ξ` with `σ₁⋯σₙ ξ = initial ∘ τ₁⋯τₙ`.
    pub final_perm: Permutation,
}

pub fn equivalent_path_exists(prefix: &[Morphism], g: &ClassGraph) -> Result<Option<EquivalentPath>> {
    equivalent_path_filtered(prefix, g, |_, _, _| true)
}

/// Search over states `(vertex, ξ)`: from `(C, ξ)` the step `n` moves to
/// `(C′, ξ′)` when `ξ⁻¹ σₙ ξ′` labels an edge `C → C′`. `allow(n, C, ξ)`
/// prunes states reached after `n` steps.
pub fn equivalent_path_filtered(
    prefix: &[Morphism],
    g: &ClassGraph,
    allow: impl Fn(usize, ClassLabel, &Permutation) -> bool,
) -> Result<Option<EquivalentPath>> {
    require_decomposable(prefix)?;
    let idx = g.label_index(k_bound(prefix));
    let perms = Permutation::all(3);
    let np = perms.len();
    let nv = g.vertices.len();
    let state = |v: usize, x: usize| v * np + x;
    // parent[n][s] = state at step n-1 leading to s, plus the label used.
    let mut layers: Vec<Vec<Option<(usize, Morphism)>>> = Vec::new();
    let mut alive: Vec<bool> = vec![false; nv * np];
    for v in 0..nv {
        for (x, p) in perms.iter().enumerate() {
            alive[state(v, x)] = allow(0, g.vertices[v], p);
        }
    }
    for (n, sigma) in prefix.iter().enumerate() {
        let mut next: Vec<Option<(usize, Morphism)>> = vec![None; nv * np];
        for v in 0..nv {
            for x in 0..np {
                if !alive[state(v, x)] {
                    continue;
                }
                let left = perms[x].inverse().to_morphism().compose(sigma)?;
                for (y, py) in perms.iter().enumerate() {
                    let tau = left.compose(&py.to_morphism())?;
                    let Some(pairs) = idx.get(&tau) else { continue };
                    for &(from, to) in pairs {
                        let s = state(to, y);
                        if from == v && next[s].is_none() && allow(n + 1, g.vertices[to], py) {
                            next[s] = Some((state(v, x), tau.clone()));
                        }
                    }
                }
            }
        }
        alive = next.iter().map(Option::is_some).collect();
        layers.push(next);
        if !alive.iter().any(|&a| a) {
            return Ok(None);
        }
    }
    let Some(mut s) = alive.iter().position(|&a| a) else { return Ok(None) };
    let final_perm = perms[s % np].clone();
    let mut labels = Vec::new();
    let mut vertices = vec![g.vertices[s / np]];
    for layer in layers.iter().rev() {
        let (prev, tau) = layer[s].clone().expect("alive states have parents");
        labels.push(tau);
        s = prev;
        vertices.push(g.vertices[s / np]);
    }
    labels.reverse();
    vertices.reverse();
    Ok(Some(EquivalentPath { initial: perms[s % np].clone(), labels, vertices, final_perm }))
}

/// Single-step transitions of the equivalent-path search, for callers that
/// drive their own exploration.
pub struct StepIndex<'g> {
    graph: &'g ClassGraph,
    index: HashMap<Morphism, Vec<(usize, usize)>>,
}

impl<'g> StepIndex<'g> {
    pub fn new(graph: &'g ClassGraph, k_max: u32) -> Self {
        StepIndex { graph, index: graph.label_index(k_max) }
    }

    /// Every `(C′, ξ′, τ)` with `τ = ξ⁻¹ σ ξ′` labelling an edge `C → C′`.
    pub fn successors(
        &self,
        c: ClassLabel,
        xi: &Permutation,
        sigma: &Morphism,
    ) -> Result<Vec<(ClassLabel, Permutation, Morphism)>> {
        let left = xi.inverse().to_morphism().compose(sigma)?;
        let mut out = Vec::new();
        for p in Permutation::all(3) {
            let tau = left.compose(&p.to_morphism())?;
            if let Some(pairs) = self.index.get(&tau) {
                for &(from, to) in pairs {
                    if self.graph.vertices[from] == c {
                        out.push((self.graph.vertices[to], p.clone(), tau.clone()));
                    }
                }
            }
        }
        Ok(out)
    }
}

/// `ξ` with `σ₁⋯σₙ ξ = τ₁⋯τₙ`, if one exists.
pub fn prefix_equivalence(sigma: &[Morphism], tau: &[Morphism]) -> Result<Option<Permutation>> {
    if sigma.len() != tau.len() {
        return Err(Error::Precondition("prefixes of different lengths".into()));
    }
    let tern = Alphabet::ternary();
    let s = Morphism::compose_all(&tern, sigma.iter())?;
    let t = Morphism::compose_all(&tern, tau.iter())?;
    for p in Permutation::all(3) {
        if s.compose(&p.to_morphism())? == t {
            return Ok(Some(p));
        }
    }
    Ok(None)
}

/// Edges of `ℰ(ε)` in the image of a shift with empty classes under each shape.
pub fn empty_word_template(kind: ShapeKind) -> ExtensionGraph {
    let pairs: &[&str] = match kind {
        ShapeKind::Alpha => &["11", "12", "13", "21", "31"],
        ShapeKind::Beta => &["11", "12", "13", "21", "32"],
        ShapeKind::Gamma => &["11", "12", "23", "21", "31"],
        ShapeKind::Delta => &["11", "12", "23", "31", "33"],
        ShapeKind::Zeta => &["12", "13", "21", "31", "33"],
        ShapeKind::Eta => &["12", "13", "21", "23", "31"],
    };
    ExtensionGraph::from_pairs("", pairs)
}

/// One derivation step of a ternary dendric language.
#[derive(Clone, Debug)]
pub struct TernaryStep {
    pub template: ShapeKind,
    /// Permutation carrying the template onto `ℰ(ε)`.
    pub template_perm: Permutation,
    pub letter: char,
    pub returns: ReturnWordSet,
    pub coding: Morphism,
    pub decomposition: Decomposition,
    pub language: FiniteLanguage,
}

/// Match `ℰ(ε)` to a template, derive with respect to the designated left
/// special letter and factor the coding morphism.
pub fn ternary_derive_step(lang: &FiniteLanguage) -> Result<TernaryStep> {
    if lang.alphabet() != &Alphabet::ternary() {
        return Err(Error::AlphabetMismatch(format!("derivation needs the alphabet 123, got {}", lang.alphabet())));
    }
    let e = extension_graph(lang, &[])?;
    let (template, perm) = ShapeKind::ALL
        .iter()
        .flat_map(|&kind| Permutation::all(3).into_iter().map(move |p| (kind, p)))
        .find(|(kind, p)| {
            let t = empty_word_template(*kind);
            t.map(Word::empty(), |c| p.apply_char(c), |c| p.apply_char(c)) == e
        })
        .ok_or_else(|| Error::NoTemplate(e.to_string()))?;
    let letter = perm.apply_char('1');
    let d = derived_language(lang, letter)?;
    let decs = decompositions(&d.coding);
    let decomposition = decs
        .iter()
        .find(|x| x.shape.kind() == template && x.pre == perm)
        .or_else(|| decs.iter().find(|x| x.shape.kind() == template))
        .cloned()
        .ok_or_else(|| Error::NoTemplate(format!("coding {} does not fit {}", d.coding, template.atom())))?;
    Ok(TernaryStep {
        template,
        template_perm: perm,
        letter,
        returns: d.returns,
        coding: d.coding,
        decomposition,
        language: d.language,
    })
}
