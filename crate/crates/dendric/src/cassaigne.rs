//! Words over the two Cassaigne morphisms and their recoding into catalog
//! morphisms. The bounded disjointness check lives here too.

use std::collections::{BTreeSet, VecDeque};
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::morphism::{cassaigne, parse_expr, Morphism, Permutation, ShapeKind};
use crate::ternary::{build_iet_graph, decompose, equivalent_path_filtered, ClassLabel, EquivalentPath, StepIndex};
use crate::words::Alphabet;

/// A non-empty word over `{c₁, c₂}`, written with the digits 1 and 2.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CassaigneSequence {
    symbols: Vec<u8>,
}

impl CassaigneSequence {
    pub fn new(symbols: Vec<u8>) -> Result<Self> {
        if symbols.is_empty() {
            return Err(Error::Precondition("a Cassaigne sequence needs at least one symbol".into()));
        }
        if let Some(&s) = symbols.iter().find(|&&s| s != 1 && s != 2) {
            return Err(Error::Parse(format!("Cassaigne symbols are 1 and 2, got {s}")));
        }
        Ok(CassaigneSequence { symbols })
    }

    pub fn symbols(&self) -> &[u8] {
        &self.symbols
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn morphisms(&self) -> Vec<Morphism> {
        self.symbols.iter().map(|&s| cassaigne(s).expect("symbols are 1 or 2")).collect()
    }

    /// `c_{s₁} ∘ ⋯ ∘ c_{sₙ}`.
    pub fn composite(&self) -> Result<Morphism> {
        Morphism::compose_all(&Alphabet::ternary(), self.morphisms().iter())
    }
}

impl FromStr for CassaigneSequence {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let symbols = s
            .trim()
            .chars()
            .map(|c| match c {
                '1' => Ok(1),
                '2' => Ok(2),
                _ => Err(Error::Parse(format!("Cassaigne sequences use the digits 1 and 2, got {c:?}"))),
            })
            .collect::<Result<Vec<u8>>>()?;
        CassaigneSequence::new(symbols)
    }
}

impl fmt::Display for CassaigneSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for s in &self.symbols {
            write!(f, "{s}")?;
        }
        Ok(())
    }
}

/// Bounded primitivity: false when the last `window` symbols (rounded down to
/// an even count) split, from the end, into blocks `c₁c₁` and `c₂c₂`.
pub fn is_primitive_cassaigne(seq: &CassaigneSequence, window: usize) -> Result<bool> {
    if window > seq.len() {
        return Err(Error::Precondition(format!("window {window} exceeds the sequence length {}", seq.len())));
    }
    let even = window - window % 2;
    if even == 0 {
        return Ok(true);
    }
    let tail = &seq.symbols[seq.len() - even..];
    Ok(!tail.chunks(2).all(|p| p[0] == p[1]))
}

/// The six products used for the recoding.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Product {
    C11,
    C22,
    C122,
    C211,
    C121,
    C212,
}

impl Product {
    pub const ALL: [Product; 6] =
        [Product::C11, Product::C22, Product::C122, Product::C211, Product::C121, Product::C212];

    pub fn symbols(self) -> &'static [u8] {
        match self {
            Product::C11 => &[1, 1],
            Product::C22 => &[2, 2],
            Product::C122 => &[1, 2, 2],
            Product::C211 => &[2, 1, 1],
            Product::C121 => &[1, 2, 1],
            Product::C212 => &[2, 1, 2],
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Product::C11 => "c11",
            Product::C22 => "c22",
            Product::C122 => "c122",
            Product::C211 => "c211",
            Product::C121 => "c121",
            Product::C212 => "c212",
        }
    }

    /// An expression equal to the product, using right conjugates where needed.
    pub fn exact_expr(self) -> &'static str {
        match self {
            Product::C11 => "a",
            Product::C22 => "p321.abar.p321",
            Product::C122 => "p213.gbar.p231",
            Product::C211 => "p231.b.p132",
            Product::C121 => "p132.e.p231",
            Product::C212 => "p321.ebar.p231",
        }
    }

    /// The member of `𝒮_C` recorded for the product. It differs from
    /// [`Product::exact_expr`] by replacing a right conjugate with the
    /// catalog shape it comes from.
    pub fn sc_expr(self) -> &'static str {
        match self {
            Product::C11 => "a",
            Product::C22 => "p321.a.p321",
            Product::C122 => "p213.g.p231",
            Product::C211 => "p231.b.p132",
            Product::C121 => "p132.e.p231",
            Product::C212 => "p321.e.p231",
        }
    }

    pub fn morphism(self) -> Morphism {
        let ms: Vec<Morphism> = self.symbols().iter().map(|&s| cassaigne(s).expect("valid symbol")).collect();
        Morphism::compose_all(&Alphabet::ternary(), ms.iter()).expect("ternary endomorphisms compose")
    }

    pub fn sc_morphism(self) -> Morphism {
        parse_expr(self.sc_expr()).expect("catalog expression")
    }

    /// True for the two products whose `𝒮_C` member has shape `α`.
    pub fn is_square(self) -> bool {
        matches!(self, Product::C11 | Product::C22)
    }
}

impl fmt::Display for Product {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Result of recoding a Cassaigne word into products.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ScRepresentation {
    pub products: Vec<Product>,
    /// Trailing symbols the transducer could not consume.
    pub remainder: Vec<u8>,
}

impl ScRepresentation {
    pub fn exact_exprs(&self) -> Vec<&'static str> {
        self.products.iter().map(|p| p.exact_expr()).collect()
    }

    pub fn sc_exprs(&self) -> Vec<&'static str> {
        self.products.iter().map(|p| p.sc_expr()).collect()
    }

    /// Composition of the exact expressions of the consumed part.
    pub fn recompose(&self) -> Result<Morphism> {
        let ms = self.exact_exprs().into_iter().map(parse_expr).collect::<Result<Vec<_>>>()?;
        Morphism::compose_all(&Alphabet::ternary(), ms.iter())
    }
}

/// Left-to-right recoding: a square is read as a block of two, otherwise
/// three symbols are taken.
pub fn sc_representation(seq: &CassaigneSequence) -> ScRepresentation {
    let s = seq.symbols();
    let mut products = Vec::new();
    let mut i = 0;
    while i < s.len() {
        let block = if i + 1 < s.len() && s[i] == s[i + 1] {
            2
        } else if i + 2 < s.len() {
            3
        } else {
            break;
        };
        let p = Product::ALL
            .into_iter()
            .find(|p| p.symbols() == &s[i..i + block])
            .expect("every square and every unequal-start triple is a product");
        products.push(p);
        i += block;
    }
    ScRepresentation { products, remainder: s[i..].to_vec() }
}

/// Classes that a shift generated with infinitely many non-square products
/// can carry. This is the greatest set in which every class is the image of
/// a member of the set under some non-square product.
pub fn reachable_classes() -> BTreeSet<ClassLabel> {
    let movers: Vec<_> = Product::ALL
        .into_iter()
        .filter(|p| !p.is_square())
        .map(|p| decompose(&p.sc_morphism()).expect("catalog members decompose"))
        .collect();
    let mut set: BTreeSet<ClassLabel> = ClassLabel::all().into_iter().collect();
    loop {
        let next: BTreeSet<ClassLabel> = set
            .iter()
            .flat_map(|&c| movers.iter().filter_map(move |d| d.class_image(c).ok()))
            .filter(|c| set.contains(c))
            .collect();
        if next == set {
            return set;
        }
        set = next;
    }
}

/// Status of one word for one of the two checks.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Verdict {
    Excluded,
    /// The bound is too short to decide; only square products were read.
    UndecidedAtBound,
    Counterexample,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Excluded => "excluded",
            Verdict::UndecidedAtBound => "undecided-at-bound",
            Verdict::Counterexample => "counterexample",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WordVerdict {
    pub word: Vec<Product>,
    pub ar: Verdict,
    pub iet: Verdict,
    pub witness: Option<EquivalentPath>,
}

impl WordVerdict {
    pub fn word_string(&self) -> String {
        self.word.iter().map(|p| p.sc_expr()).collect::<Vec<_>>().join(" ")
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DisjointnessReport {
    pub max_len: usize,
    pub words_checked: usize,
    pub ar_undecided: usize,
    pub iet_undecided: usize,
    pub counterexamples: Vec<WordVerdict>,
}

impl DisjointnessReport {
    pub fn passed(&self) -> bool {
        self.counterexamples.is_empty()
    }
}

/// Bounded form of the disjointness statement, run over every word of
/// `𝒮_C` of length at most `max_len`.
///
/// The AR check marks a word undecided when every letter has shape `α`, and
/// excluded otherwise. The IET check treats the same words as undecided,
/// since such a window factorizes over squares. For the other words it
/// searches for an equivalent path in the IET graph whose states `(C, ξ)`
/// all carry a class `ξ(C)` from [`reachable_classes`], and whose last state
/// can still read a non-square product.
pub fn disjointness_check(max_len: usize) -> Result<DisjointnessReport> {
    if max_len == 0 {
        return Err(Error::Precondition("max_len must be at least 1".into()));
    }
    let checker = Checker::new()?;
    let mut report = DisjointnessReport {
        max_len,
        words_checked: 0,
        ar_undecided: 0,
        iet_undecided: 0,
        counterexamples: Vec::new(),
    };
    let mut word: Vec<Product> = Vec::new();
    for len in 1..=max_len {
        let total = 6usize.pow(len as u32);
        for code in 0..total {
            word.clear();
            let mut c = code;
            for _ in 0..len {
                word.push(Product::ALL[c % 6]);
                c /= 6;
            }
            let v = checker.check(&word)?;
            report.words_checked += 1;
            if v.ar == Verdict::UndecidedAtBound {
                report.ar_undecided += 1;
            }
            if v.iet == Verdict::UndecidedAtBound {
                report.iet_undecided += 1;
            }
            if v.ar == Verdict::Counterexample || v.iet == Verdict::Counterexample {
                report.counterexamples.push(v);
            }
        }
    }
    Ok(report)
}

/// Check a single word of `𝒮_C`.
pub fn check_word(word: &[Product]) -> Result<WordVerdict> {
    Checker::new()?.check(word)
}

struct Checker {
    graph: crate::ternary::ClassGraph,
    reachable: BTreeSet<ClassLabel>,
    live: BTreeSet<(ClassLabel, Permutation)>,
}

impl Checker {
    fn new() -> Result<Self> {
        let graph = build_iet_graph();
        let reachable = reachable_classes();
        let live = live_states(&graph, &reachable)?;
        Ok(Checker { graph, reachable, live })
    }

    fn check(&self, word: &[Product]) -> Result<WordVerdict> {
        let squares_only = word.iter().all(|p| p.is_square());
        let ar = if squares_only { Verdict::UndecidedAtBound } else { Verdict::Excluded };
        if squares_only {
            return Ok(WordVerdict { word: word.to_vec(), ar, iet: Verdict::UndecidedAtBound, witness: None });
        }
        let prefix: Vec<Morphism> = word.iter().map(|p| p.sc_morphism()).collect();
        let n = prefix.len();
        let witness = equivalent_path_filtered(&prefix, &self.graph, |step, c, xi| {
            self.reachable.contains(&c.permute(xi)) && (step < n || self.live.contains(&(c, xi.clone())))
        })?;
        let iet = if witness.is_some() { Verdict::Counterexample } else { Verdict::Excluded };
        Ok(WordVerdict { word: word.to_vec(), ar, iet, witness })
    }
}

/// States `(C, ξ)` from which some run of square products followed by one
/// non-square product stays inside the reachable classes.
fn live_states(
    graph: &crate::ternary::ClassGraph,
    reachable: &BTreeSet<ClassLabel>,
) -> Result<BTreeSet<(ClassLabel, Permutation)>> {
    let idx = StepIndex::new(graph, 1);
    let ok = |c: ClassLabel, xi: &Permutation| reachable.contains(&c.permute(xi));
    let mut live = BTreeSet::new();
    for &c in &graph.vertices {
        for xi in Permutation::all(3) {
            if !ok(c, &xi) {
                continue;
            }
            let mut seen = BTreeSet::from([(c, xi.clone())]);
            let mut queue = VecDeque::from([(c, xi.clone())]);
            let mut found = false;
            'search: while let Some((v, x)) = queue.pop_front() {
                for p in Product::ALL {
                    for (to, y, _) in idx.successors(v, &x, &p.sc_morphism())? {
                        if !ok(to, &y) {
                            continue;
                        }
                        if !p.is_square() {
                            found = true;
                            break 'search;
                        }
                        if seen.insert((to, y.clone())) {
                            queue.push_back((to, y));
                        }
                    }
                }
            }
            if found {
                live.insert((c, xi));
            }
        }
    }
    Ok(live)
}

/// Shape of each product's `𝒮_C` member.
pub fn product_shape(p: Product) -> ShapeKind {
    decompose(&p.sc_morphism()).expect("catalog members decompose").shape.kind()
}
