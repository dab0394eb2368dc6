//! Interval exchange transformations over any [`Scalar`], their natural
//! codings, Rauzy inductions and the class-graph expansion of ternary ones.

use std::fmt;

use crate::error::{Error, Result};
use crate::morphism::{Morphism, Permutation, Shape};
use crate::scalar::Scalar;
use crate::ternary::{ClassLabel, Decomposition};
use crate::words::{Alphabet, FiniteLanguage, LanguageBuilder, Word};

/// Half-open interval `[start, end)`.
pub type Span<S> = (S, S);

/// `T_{λ,π₀,π₁}` on `[left, left + Σλ)`. Letters are `1..=d`.
#[derive(Clone, Debug, PartialEq)]
pub struct Iet<S> {
    left: S,
    lambda: Vec<S>,
    pi0: Permutation,
    pi1: Permutation,
}

fn sum<S: Scalar>(xs: impl IntoIterator<Item = S>) -> S {
    xs.into_iter().fold(S::zero(), |a, b| a + b)
}

impl<S: Scalar> Iet<S> {
    pub fn new(left: S, lambda: Vec<S>, pi0: Permutation, pi1: Permutation) -> Result<Self> {
        let d = lambda.len();
        if d == 0 || d > 9 || pi0.degree() != d || pi1.degree() != d {
            return Err(Error::Precondition(format!(
                "need 1..=9 lengths and permutations of matching degree, got {d}, {}, {}",
                pi0.degree(),
                pi1.degree()
            )));
        }
        if let Some(x) = lambda.iter().find(|x| **x <= S::zero()) {
            return Err(Error::Precondition(format!("lengths must be positive, got {x}")));
        }
        Ok(Iet { left, lambda, pi0, pi1 })
    }

    /// Parse a pair written `123/231`.
    pub fn with_pair(left: S, lambda: Vec<S>, pair: &str) -> Result<Self> {
        let (p0, p1) = parse_pair(pair)?;
        Self::new(left, lambda, p0, p1)
    }

    pub fn degree(&self) -> usize {
        self.lambda.len()
    }

    pub fn left(&self) -> &S {
        &self.left
    }

    pub fn right(&self) -> S {
        self.left.clone() + sum(self.lambda.iter().cloned())
    }

    pub fn lambda(&self) -> &[S] {
        &self.lambda
    }

    pub fn pi0(&self) -> &Permutation {
        &self.pi0
    }

    pub fn pi1(&self) -> &Permutation {
        &self.pi1
    }

    pub fn pair(&self) -> String {
        format!("{}/{}", digits(&self.pi0), digits(&self.pi1))
    }

    fn len_of(&self, letter: u8) -> S {
        self.lambda[letter as usize - 1].clone()
    }

    /// `μ_k`, the right end of the `k`-th top cell.
    pub fn mu(&self, k: usize) -> S {
        self.left.clone() + sum((1..=k).map(|m| self.len_of(self.pi0.apply(m as u8))))
    }

    /// `ν_k`, the right end of the `k`-th bottom cell.
    pub fn nu(&self, k: usize) -> S {
        self.left.clone() + sum((1..=k).map(|m| self.len_of(self.pi1.apply(m as u8))))
    }

    /// `I_i`.
    pub fn top(&self, i: usize) -> Span<S> {
        let pos = self.pi0.inverse().apply(i as u8) as usize;
        (self.mu(pos - 1), self.mu(pos))
    }

    /// `J_i = T(I_i)`.
    pub fn bottom(&self, i: usize) -> Span<S> {
        let pos = self.pi1.inverse().apply(i as u8) as usize;
        (self.nu(pos - 1), self.nu(pos))
    }

    fn shift(&self, i: usize) -> S {
        self.bottom(i).0 - self.top(i).0
    }

    /// The letter whose top cell contains `x`.
    pub fn letter_at(&self, x: &S) -> Option<usize> {
        (1..=self.degree()).find(|&i| {
            let (a, b) = self.top(i);
            a <= *x && *x < b
        })
    }

    pub fn apply(&self, x: &S) -> Result<S> {
        let i = self
            .letter_at(x)
            .ok_or_else(|| Error::Precondition(format!("{x} lies outside [{}, {})", self.left, self.right())))?;
        Ok(x.clone() + self.shift(i))
    }

    /// Rescaled copy on `[0, 1)`.
    pub fn normalize(&self) -> Self {
        let total = self.right() - self.left.clone();
        let lambda = self.lambda.iter().map(|x| x.clone() / total.clone()).collect();
        Iet { left: S::zero(), lambda, pi0: self.pi0.clone(), pi1: self.pi1.clone() }
    }

    /// Both permutations composed with `i ↦ d + 1 − i`.
    pub fn reflect(&self) -> Self {
        let d = self.degree() as u8;
        let tau = Permutation::new((1..=d).rev().collect()).expect("reversal is a permutation");
        Iet {
            left: self.left.clone(),
            lambda: self.lambda.clone(),
            pi0: self.pi0.compose(&tau),
            pi1: self.pi1.compose(&tau),
        }
    }
}

impl<S: Scalar> fmt::Display for Iet<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let ls: Vec<String> = self.lambda.iter().map(|x| x.to_string()).collect();
        write!(f, "T({}; {}) on [{}, {})", self.pair(), ls.join(", "), self.left, self.right())
    }
}

fn digits(p: &Permutation) -> String {
    p.images().iter().map(|&x| char::from(b'0' + x)).collect()
}

pub fn parse_pair(s: &str) -> Result<(Permutation, Permutation)> {
    let (a, b) =
        s.trim().split_once('/').ok_or_else(|| Error::Parse(format!("expected a pair like 123/231, got {s:?}")))?;
    Ok((Permutation::parse(a.trim())?, Permutation::parse(b.trim())?))
}

/// `π₀({1..k}) ≠ π₁({1..k})` for every `k < d`.
pub fn indecomposable(pi0: &Permutation, pi1: &Permutation) -> bool {
    let d = pi0.degree();
    (1..d).all(|k| {
        let mut a: Vec<u8> = pi0.images()[..k].to_vec();
        let mut b: Vec<u8> = pi1.images()[..k].to_vec();
        a.sort_unstable();
        b.sort_unstable();
        a != b
    })
}

fn intersect<S: Scalar>(cells: &[Span<S>], (a, b): &Span<S>) -> Vec<Span<S>> {
    cells
        .iter()
        .filter_map(|(s, e)| {
            let lo = if s > a { s.clone() } else { a.clone() };
            let hi = if e < b { e.clone() } else { b.clone() };
            (lo < hi).then_some((lo, hi))
        })
        .collect()
}

/// Admissible words of length at most `n`. Cells are refined right to left:
/// `I_{bw}` is the part of `I_b` that `T` sends into `I_w`.
pub fn coding_factors<S: Scalar>(t: &Iet<S>, n: usize) -> Result<FiniteLanguage> {
    let d = t.degree();
    let alph = Alphabet::numeric(d);
    let mut b = LanguageBuilder::new(alph.clone(), n);
    let mut layer: Vec<(Vec<char>, Vec<Span<S>>)> = Vec::new();
    if n >= 1 {
        layer = (1..=d).map(|i| (vec![alph.letter(i - 1)], vec![t.top(i)])).collect();
    }
    for len in 1..=n {
        for (w, _) in &layer {
            b.insert_factors(w)?;
        }
        if len == n {
            break;
        }
        let mut next = Vec::new();
        for (w, cells) in &layer {
            for i in 1..=d {
                let hit = intersect(cells, &t.bottom(i));
                if hit.is_empty() {
                    continue;
                }
                let back = t.shift(i);
                let cells: Vec<Span<S>> = hit.into_iter().map(|(s, e)| (s - back.clone(), e - back.clone())).collect();
                let mut v = vec![alph.letter(i - 1)];
                v.extend_from_slice(w);
                next.push((v, cells));
            }
        }
        layer = next;
    }
    Ok(b.build())
}

/// Forward orbits of `μ₁, …, μ_{d−1}` up to `n` steps are pairwise
/// disjoint and never revisit a starting point.
pub fn is_regular_up_to<S: Scalar>(t: &Iet<S>, n: usize) -> bool {
    let d = t.degree();
    let mut points: Vec<(S, usize, usize)> = Vec::new();
    for i in 1..d {
        let mut x = t.mu(i);
        points.push((x.clone(), i, 0));
        for k in 1..=n {
            x = t.apply(&x).expect("orbits stay in the support");
            points.push((x.clone(), i, k));
        }
    }
    points.sort_by(|a, b| a.0.partial_cmp(&b.0).expect("comparable scalars"));
    points.windows(2).all(|w| w[0].0 != w[1].0)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

struct RauzyEdge {
    from: &'static str,
    side: Side,
    /// True when the top cell is the shorter one.
    top_shorter: bool,
    images: [&'static str; 3],
    to: &'static str,
}

const RAUZY_TABLE: [RauzyEdge; 12] = [
    RauzyEdge { from: "123/231", side: Side::Left, top_shorter: true, images: ["21", "2", "3"], to: "123/231" },
    RauzyEdge { from: "123/231", side: Side::Left, top_shorter: false, images: ["1", "3", "21"], to: "132/231" },
    RauzyEdge { from: "132/231", side: Side::Left, top_shorter: true, images: ["2", "21", "3"], to: "321/132" },
    RauzyEdge { from: "132/231", side: Side::Left, top_shorter: false, images: ["1", "3", "21"], to: "123/231" },
    RauzyEdge { from: "321/132", side: Side::Left, top_shorter: true, images: ["2", "1", "13"], to: "132/231" },
    RauzyEdge { from: "321/132", side: Side::Left, top_shorter: false, images: ["13", "2", "3"], to: "321/132" },
    RauzyEdge { from: "123/231", side: Side::Right, top_shorter: false, images: ["13", "2", "3"], to: "123/231" },
    RauzyEdge { from: "123/231", side: Side::Right, top_shorter: true, images: ["1", "2", "13"], to: "132/231" },
    RauzyEdge { from: "132/231", side: Side::Right, top_shorter: false, images: ["2", "3", "12"], to: "321/132" },
    RauzyEdge { from: "132/231", side: Side::Right, top_shorter: true, images: ["1", "12", "3"], to: "123/231" },
    RauzyEdge { from: "321/132", side: Side::Right, top_shorter: false, images: ["3", "1", "21"], to: "132/231" },
    RauzyEdge { from: "321/132", side: Side::Right, top_shorter: true, images: ["21", "2", "3"], to: "321/132" },
];

/// `M⁻¹ λ` by Gaussian elimination; `M` must be invertible.
pub fn solve_incidence<S: Scalar>(sigma: &Morphism, lambda: &[S]) -> Result<Vec<S>> {
    let m = sigma.incidence_matrix();
    let n = m.rows();
    if m.cols() != n || lambda.len() != n {
        return Err(Error::Precondition("incidence matrix must be square and match the vector".into()));
    }
    let num = |x: u64| S::from_u64(x).expect("small integers are representable");
    let mut a: Vec<Vec<S>> = (0..n)
        .map(|i| {
            let mut row: Vec<S> = m.entries[i].iter().map(|&x| num(x)).collect();
            row.push(lambda[i].clone());
            row
        })
        .collect();
    for col in 0..n {
        let pivot = (col..n)
            .find(|&r| !a[r][col].is_zero())
            .ok_or_else(|| Error::Precondition(format!("incidence matrix of {sigma} is singular")))?;
        a.swap(col, pivot);
        let p = a[col][col].clone();
        for x in a[col].iter_mut() {
            *x = x.clone() / p.clone();
        }
        for r in 0..n {
            if r != col && !a[r][col].is_zero() {
                let f = a[r][col].clone();
                let pivot_row = a[col].clone();
                for (x, y) in a[r].iter_mut().zip(pivot_row) {
                    *x = x.clone() - f.clone() * y;
                }
            }
        }
    }
    Ok(a.into_iter().map(|row| row[n].clone()).collect())
}

/// One left or right Rauzy induction of a ternary IET whose pair is in the
/// table, with the substitution `σ` such that `X_T = σ(X_{T′})`.
pub fn rauzy_induction<S: Scalar>(t: &Iet<S>, side: Side) -> Result<(Iet<S>, Morphism)> {
    let pair = t.pair();
    let d = t.degree();
    let pos = if side == Side::Left { 1 } else { d as u8 };
    let top = t.len_of(t.pi0.apply(pos));
    let bottom = t.len_of(t.pi1.apply(pos));
    if top == bottom {
        return Err(Error::Connection(0));
    }
    let top_shorter = top < bottom;
    let edge = RAUZY_TABLE
        .iter()
        .find(|e| e.from == pair && e.side == side && e.top_shorter == top_shorter)
        .ok_or_else(|| Error::Precondition(format!("pair {pair} is not in the induction table")))?;
    let sigma = Morphism::numeric(&edge.images)?;
    let lambda = solve_incidence(&sigma, &t.lambda)?;
    let left = match side {
        Side::Left => {
            let (m1, n1) = (t.mu(1), t.nu(1));
            if m1 < n1 {
                m1
            } else {
                n1
            }
        }
        Side::Right => t.left.clone(),
    };
    let (p0, p1) = parse_pair(edge.to)?;
    Ok((Iet::new(left, lambda, p0, p1)?, sigma))
}

/// The first-return map on a sub-interval, as an IET whose letters follow
/// the left-to-right order of its pieces, together with the itinerary of
/// each piece under `T` before its return.
#[derive(Clone, Debug, PartialEq)]
pub struct InducedMap<S> {
    pub iet: Iet<S>,
    pub itineraries: Vec<Word>,
}

impl<S: Scalar> InducedMap<S> {
    /// The coding morphism `letter ↦ itinerary`.
    pub fn coding(&self) -> Result<Morphism> {
        let d = self.iet.degree();
        let codomain = Alphabet::numeric(
            self.itineraries.iter().flat_map(|w| w.iter()).map(|&c| c as usize - '0' as usize).max().unwrap_or(1),
        );
        Morphism::new(Alphabet::numeric(d), codomain, self.itineraries.clone())
    }

    /// Rename the pieces so that letter `i` is the piece with itinerary `σ(i)`.
    pub fn relabel(&self, sigma: &Morphism) -> Result<Iet<S>> {
        let d = self.iet.degree();
        if sigma.images().len() != d {
            return Err(Error::Precondition("relabelling needs one image per piece".into()));
        }
        // old[i] = canonical piece index carrying the new letter i + 1.
        let mut old = Vec::with_capacity(d);
        for img in sigma.images() {
            let j = self
                .itineraries
                .iter()
                .position(|w| w == img)
                .ok_or_else(|| Error::Precondition(format!("no piece has itinerary {img}")))?;
            old.push(j);
        }
        let new_of_old = |j: usize| old.iter().position(|&x| x == j).expect("bijection") as u8 + 1;
        let lambda = old.iter().map(|&j| self.iet.lambda[j].clone()).collect();
        let pi0 = Permutation::new(self.iet.pi0.images().iter().map(|&x| new_of_old(x as usize - 1)).collect())?;
        let pi1 = Permutation::new(self.iet.pi1.images().iter().map(|&x| new_of_old(x as usize - 1)).collect())?;
        Iet::new(self.iet.left.clone(), lambda, pi0, pi1)
    }
}

pub const DEFAULT_STEP_CAP: usize = 4096;

/// First-return map of `T` on `[a, b)`, computed by pushing pieces forward
/// and splitting them at cell boundaries until every piece is back.
pub fn induced_on_interval<S: Scalar>(t: &Iet<S>, a: &S, b: &S, step_cap: usize) -> Result<InducedMap<S>> {
    if !(a < b) || *a < t.left || *b > t.right() {
        return Err(Error::Precondition(format!("[{a}, {b}) is not a sub-interval of the support")));
    }
    let alph = Alphabet::numeric(t.degree());
    struct Piece<S> {
        origin: S,
        pos: Span<S>,
        word: Vec<char>,
    }
    let mut active = vec![Piece { origin: a.clone(), pos: (a.clone(), b.clone()), word: Vec::new() }];
    let mut done: Vec<(Span<S>, S, Vec<char>)> = Vec::new();
    for _ in 0..step_cap {
        if active.is_empty() {
            break;
        }
        let mut next = Vec::new();
        for p in active {
            for i in 1..=t.degree() {
                for (s, e) in intersect(std::slice::from_ref(&p.pos), &t.top(i)) {
                    let origin = p.origin.clone() + (s.clone() - p.pos.0.clone());
                    let shift = t.shift(i);
                    let img = (s + shift.clone(), e + shift);
                    let mut word = p.word.clone();
                    word.push(alph.letter(i - 1));
                    let inside = intersect(std::slice::from_ref(&img), &(a.clone(), b.clone()));
                    for (s2, e2) in &inside {
                        let o = origin.clone() + (s2.clone() - img.0.clone());
                        let len = e2.clone() - s2.clone();
                        done.push(((o.clone(), o + len), s2.clone(), word.clone()));
                    }
                    let outside: Vec<Span<S>> = [(img.0.clone(), a.clone()), (b.clone(), img.1.clone())]
                        .into_iter()
                        .flat_map(|cut| intersect(std::slice::from_ref(&img), &cut))
                        .collect();
                    for (s2, e2) in outside {
                        let o = origin.clone() + (s2.clone() - img.0.clone());
                        next.push(Piece { origin: o, pos: (s2, e2), word: word.clone() });
                    }
                }
            }
        }
        active = next;
    }
    if !active.is_empty() {
        return Err(Error::StepCap(step_cap));
    }
    done.sort_by(|x, y| x.0 .0.partial_cmp(&y.0 .0).expect("comparable scalars"));
    // Adjacent pieces with the same itinerary form one cell.
    let mut merged: Vec<(Span<S>, S, Vec<char>)> = Vec::new();
    for piece in done {
        if let Some(last) = merged.last_mut() {
            if last.2 == piece.2 && last.0 .1 == piece.0 .0 {
                last.0 .1 = piece.0 .1;
                continue;
            }
        }
        merged.push(piece);
    }
    let m = merged.len();
    if m > 9 {
        return Err(Error::Precondition(format!("induced map has {m} pieces")));
    }
    let lambda: Vec<S> = merged.iter().map(|(sp, _, _)| sp.1.clone() - sp.0.clone()).collect();
    let pi0 = Permutation::identity(m);
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&x, &y| merged[x].1.partial_cmp(&merged[y].1).expect("comparable scalars"));
    let pi1 = Permutation::new(order.iter().map(|&x| x as u8 + 1).collect())?;
    let itineraries = merged.into_iter().map(|(_, _, w)| Word::new(w)).collect();
    Ok(InducedMap { iet: Iet::new(a.clone(), lambda, pi0, pi1)?, itineraries })
}

/// One step of the class-graph expansion.
#[derive(Clone, Debug, PartialEq)]
pub struct ExpansionStep<S> {
    pub from: ClassLabel,
    pub to: ClassLabel,
    pub label: Decomposition,
    /// Index (1-based) of the top cell the induction is performed on.
    pub interval: usize,
    /// Pair of the induced map with lengths `lambda`.
    pub pair: &'static str,
    pub lambda: Vec<S>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Expansion<S> {
    pub steps: Vec<ExpansionStep<S>>,
    /// Step (1-based) at which a boundary equality stopped the expansion.
    pub connection: Option<usize>,
}

impl<S> Expansion<S> {
    pub fn morphisms(&self) -> Vec<Morphism> {
        self.steps.iter().map(|s| s.label.morphism()).collect()
    }
}

fn dec(pre: &str, shape: Shape, post: &str) -> Decomposition {
    Decomposition { pre: Permutation::parse(pre).unwrap(), shape, post: Permutation::parse(post).unwrap() }
}

/// The largest `k` with `k·unit < x`, or `None` when `x` is a multiple of `unit`.
fn strict_floor<S: Scalar>(x: &S, unit: &S) -> Option<u32> {
    let mut k = 0u32;
    let mut acc = S::zero();
    loop {
        let nxt = acc.clone() + unit.clone();
        if nxt == *x {
            return None;
        }
        if nxt > *x {
            return Some(k);
        }
        acc = nxt;
        k += 1;
    }
}

/// Select the induction case for the class of `(λ₁, λ₂, λ₃)`. `None` on a
/// boundary equality.
fn induction_case<S: Scalar>(class: ClassLabel, l: &[S]) -> Option<(Decomposition, ClassLabel, usize, &'static str)> {
    let (l1, l2, l3) = (&l[0], &l[1], &l[2]);
    let c32 = ClassLabel { l: 3, r: 2 };
    let c33 = ClassLabel { l: 3, r: 3 };
    let s23 = l2.clone() + l3.clone();
    if class == c32 {
        if *l1 == s23 || l1 == l2 || l1 == l3 {
            return None;
        }
        if *l1 > s23 {
            return Some((dec("123", Shape::Alpha, "123"), c32, 1, "123/231"));
        }
        if l1 > l2 && l1 > l3 {
            return Some((dec("132", Shape::Eta, "321"), c32, 1, "321/132"));
        }
        if l2 < l1 && l1 < l3 {
            return Some((dec("312", Shape::Beta, "213"), c33, 3, "132/231"));
        }
        if l3 < l1 && l1 < l2 {
            return Some((dec("213", Shape::Gamma, "123"), c33, 2, "231/132"));
        }
        let k = strict_floor(l3, l1)?;
        return Some((dec("213", Shape::Delta(k), "123"), c33, 2, "231/132"));
    }
    let s13 = l1.clone() + l3.clone();
    if *l1 == s23 || *l2 == s13 || l1 == l2 {
        return None;
    }
    if *l1 > s23 {
        return Some((dec("123", Shape::Alpha, "123"), c33, 1, "132/231"));
    }
    if *l2 > s13 {
        return Some((dec("213", Shape::Alpha, "213"), c33, 2, "132/231"));
    }
    if l1 > l2 {
        let k = strict_floor(l3, &(l1.clone() - l2.clone()))?;
        return Some((dec("123", Shape::Zeta(k), "213"), c33, 1, "231/132"));
    }
    let k = strict_floor(l3, &(l2.clone() - l1.clone()))?;
    Some((dec("213", Shape::Zeta(k), "213"), c33, 2, "132/231"))
}

/// Class of a ternary IET's pair: `[3,2]` for `123/231` (or its reflection
/// `321/132`), `[3,3]` for `132/231`.
pub fn class_of_pair(pair: &str) -> Result<ClassLabel> {
    match pair {
        "123/231" | "321/132" => Ok(ClassLabel { l: 3, r: 2 }),
        "132/231" | "231/132" => Ok(ClassLabel { l: 3, r: 3 }),
        _ => Err(Error::Precondition(format!("pair {pair} is not a normal form of an indecomposable 3-IET"))),
    }
}

/// Run up to `depth` induction steps, emitting one morphism per step.
pub fn iet_expansion<S: Scalar>(t: &Iet<S>, depth: usize) -> Result<Expansion<S>> {
    if t.degree() != 3 {
        return Err(Error::Precondition("expansions are defined for 3-IETs".into()));
    }
    let mut class = class_of_pair(&t.pair())?;
    let mut lambda = t.lambda.clone();
    let mut steps = Vec::new();
    for step in 1..=depth {
        let Some((label, to, interval, pair)) = induction_case(class, &lambda) else {
            return Ok(Expansion { steps, connection: Some(step) });
        };
        lambda = solve_incidence(&label.morphism(), &lambda)?;
        steps.push(ExpansionStep { from: class, to, label, interval, pair, lambda: lambda.clone() });
        class = to;
    }
    Ok(Expansion { steps, connection: None })
}

/// The IET reached after an expansion step, placed at `left`.
pub fn expansion_target<S: Scalar>(step: &ExpansionStep<S>, left: S) -> Result<Iet<S>> {
    Iet::with_pair(left, step.lambda.clone(), step.pair)
}

/// `M_{σ₁⋯σₙ}·(1, …, 1)` normalized to sum 1.
pub fn frequencies<S: Scalar>(prefix: &[Morphism], d: usize) -> Result<Vec<S>> {
    let mut v: Vec<S> = vec![S::one(); d];
    for sigma in prefix.iter().rev() {
        let m = sigma.incidence_matrix();
        if m.cols() != v.len() {
            return Err(Error::AlphabetMismatch(format!("{sigma} does not compose with the vector")));
        }
        v = m
            .entries
            .iter()
            .map(|row| sum(row.iter().zip(&v).map(|(&x, y)| S::from_u64(x).expect("small integers") * y.clone())))
            .collect();
    }
    let total = sum(v.iter().cloned());
    Ok(v.into_iter().map(|x| x / total.clone()).collect())
}

/// `Σ |xᵢ − yᵢ|`.
pub fn l1_distance<S: Scalar>(x: &[S], y: &[S]) -> S {
    sum(x.iter().zip(y).map(|(a, b)| (a.clone() - b.clone()).abs()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::morphism::parse_expr;
    use crate::sadic::image_language;
    use crate::scalar::{ratio, Rational};

    fn iet(ls: &[(i64, i64)], pair: &str) -> Iet<Rational> {
        Iet::with_pair(ratio(0, 1), ls.iter().map(|&(p, q)| ratio(p, q)).collect(), pair).unwrap()
    }

    #[test]
    fn rotation_example() {
        let t = iet(&[(1, 2), (1, 4), (1, 4)], "123/231");
        assert_eq!(t.apply(&ratio(0, 1)).unwrap(), ratio(1, 2));
        assert_eq!(t.apply(&ratio(1, 2)).unwrap(), ratio(0, 1));
        assert_eq!(t.apply(&ratio(7, 8)).unwrap(), ratio(3, 8));
        for i in 1..=3 {
            let (a, b) = t.top(i);
            let (c, d) = t.bottom(i);
            assert_eq!(t.apply(&a).unwrap(), c);
            assert_eq!(b - a, d - c);
        }
        assert!(t.apply(&ratio(1, 1)).is_err());
        assert_eq!(t.reflect().reflect(), t);
        assert_eq!(t.reflect().pair(), "321/132");
    }

    #[test]
    fn normalize_rescales() {
        let t = Iet::with_pair(ratio(2, 1), vec![ratio(1, 1), ratio(2, 1), ratio(1, 1)], "132/231").unwrap();
        let n = t.normalize();
        assert_eq!(n.right(), ratio(1, 1));
        assert_eq!(n.lambda()[1], ratio(1, 2));
    }

    #[test]
    fn indecomposability() {
        let p = |s: &str| parse_pair(s).unwrap();
        let (a, b) = p("123/231");
        assert!(indecomposable(&a, &b));
        let (a, b) = p("123/123");
        assert!(!indecomposable(&a, &b));
        let (a, b) = p("123/312");
        assert!(indecomposable(&a, &b));
    }

    #[test]
    fn coding_of_the_rotation() {
        let t = iet(&[(1, 2), (1, 4), (1, 4)], "123/231");
        let l = coding_factors(&t, 2).unwrap();
        // J_2 = [0, 1/4) lies inside I_1, so 2 is always followed by 1.
        assert!(l.contains(&['2', '1']).unwrap());
        assert!(!l.contains(&['2', '2']).unwrap());
        assert!(!l.contains(&['2', '3']).unwrap());
        assert!(l.contains(&['1', '2']).unwrap());
        assert_eq!(coding_factors(&t, 1).unwrap().complexity(1).unwrap(), 3);
    }

    #[test]
    fn regularity() {
        let t = iet(&[(1, 2), (1, 4), (1, 4)], "123/312");
        assert!(!is_regular_up_to(&t, 1));
        assert!(is_regular_up_to(&t, 0));
        let t = iet(&[(1000, 2718), (1000, 3141), (718, 2718)], "123/231");
        assert!(is_regular_up_to(&t, 10));
    }

    #[test]
    fn rauzy_table_examples() {
        let t = iet(&[(1, 7), (4, 7), (2, 7)], "123/231");
        let (t1, s) = rauzy_induction(&t, Side::Left).unwrap();
        assert_eq!(s, Morphism::numeric(&["21", "2", "3"]).unwrap());
        assert_eq!(t1.lambda(), &[ratio(1, 7), ratio(3, 7), ratio(2, 7)]);
        assert_eq!(t1.pair(), "123/231");
        let t = iet(&[(4, 7), (2, 7), (1, 7)], "123/231");
        let (t1, s) = rauzy_induction(&t, Side::Right).unwrap();
        assert_eq!(s, Morphism::numeric(&["1", "2", "13"]).unwrap());
        assert_eq!(t1.pair(), "132/231");
        let t = iet(&[(1, 7), (2, 7), (4, 7)], "321/132");
        let (t1, s) = rauzy_induction(&t, Side::Left).unwrap();
        assert_eq!(s, Morphism::numeric(&["13", "2", "3"]).unwrap());
        assert_eq!(t1.pair(), "321/132");
        let t = iet(&[(1, 3), (1, 3), (1, 3)], "123/231");
        assert_eq!(rauzy_induction(&t, Side::Left).unwrap_err(), Error::Connection(0));
    }

    #[test]
    fn rauzy_matches_induced_maps() {
        let pairs = ["123/231", "132/231", "321/132"];
        let lengths = [[(3, 17), (5, 17), (9, 17)], [(9, 17), (5, 17), (3, 17)], [(5, 17), (9, 17), (3, 17)]];
        for pair in pairs {
            for ls in &lengths {
                let t = iet(ls, pair);
                for side in [Side::Left, Side::Right] {
                    let (t1, sigma) = rauzy_induction(&t, side).unwrap();
                    let ind = induced_on_interval(&t, t1.left(), &t1.right(), 8).unwrap();
                    assert_eq!(ind.relabel(&sigma).unwrap(), t1, "{pair} {ls:?} {side:?}");
                }
            }
        }
    }

    #[test]
    fn induced_on_the_whole_support_is_t() {
        let t = iet(&[(2, 9), (3, 9), (4, 9)], "132/231");
        let ind = induced_on_interval(&t, &ratio(0, 1), &ratio(1, 1), 4).unwrap();
        assert_eq!(ind.relabel(&Morphism::numeric(&["1", "2", "3"]).unwrap()).unwrap(), t);
        assert!(matches!(induced_on_interval(&t, &ratio(0, 1), &ratio(1, 100), 3), Err(Error::StepCap(3))));
    }

    #[test]
    fn expansion_cases_match_induced_maps() {
        // Inputs chosen to hit each case once.
        let cases: [(&[(i64, i64)], &str, &str); 9] = [
            (&[(50, 100), (20, 100), (17, 100)], "123/231", "a"),
            (&[(50, 100), (31, 100), (23, 100)], "123/231", "p132.e.p321"),
            (&[(30, 100), (20, 100), (41, 100)], "123/231", "p312.b.p213"),
            (&[(30, 100), (41, 100), (20, 100)], "123/231", "p213.g"),
            (&[(10, 100), (40, 100), (25, 100)], "123/231", "p213.d2"),
            (&[(50, 100), (20, 100), (17, 100)], "132/231", "a"),
            (&[(20, 100), (50, 100), (17, 100)], "132/231", "p213.a.p213"),
            (&[(30, 100), (20, 100), (35, 100)], "132/231", "z3.p213"),
            (&[(20, 100), (30, 100), (25, 100)], "132/231", "p213.z2.p213"),
        ];
        for (ls, pair, want) in cases {
            let t = iet(ls, pair);
            let e = iet_expansion(&t, 1).unwrap();
            let step = &e.steps[0];
            let sigma = step.label.morphism();
            assert_eq!(sigma, parse_expr(want).unwrap(), "{pair} {ls:?}");
            let (a, b) = t.top(step.interval);
            let ind = induced_on_interval(&t, &a, &b, 64).unwrap();
            let target = expansion_target(step, a.clone()).unwrap();
            assert_eq!(ind.relabel(&sigma).unwrap(), target, "{pair} {ls:?} {want}");
            let lt = coding_factors(&t, 8).unwrap();
            let img = image_language(&sigma, &coding_factors(&target, 8).unwrap(), 8).unwrap();
            assert_eq!(lt, img);
        }
    }

    #[test]
    fn expansion_examples() {
        let t = iet(&[(5, 9), (3, 9), (1, 9)], "123/231");
        let e = iet_expansion(&t, 10).unwrap();
        assert_eq!(e.steps[0].label.morphism(), parse_expr("a").unwrap());
        assert_eq!(e.steps[0].lambda, vec![ratio(1, 9), ratio(3, 9), ratio(1, 9)]);
        assert!(e.connection.is_some());
        let t = iet(&[(1, 3), (1, 3), (1, 3)], "132/231");
        assert_eq!(iet_expansion(&t, 3).unwrap().connection, Some(1));
    }

    #[test]
    fn frequency_examples() {
        let f: Vec<Rational> = frequencies(&[], 3).unwrap();
        assert_eq!(f, vec![ratio(1, 3); 3]);
        let f: Vec<Rational> = frequencies(&[parse_expr("a").unwrap()], 3).unwrap();
        assert_eq!(f, vec![ratio(3, 5), ratio(1, 5), ratio(1, 5)]);
    }

    #[test]
    fn floats_work_too() {
        let t: Iet<f64> = Iet::with_pair(0.0, vec![0.5, 0.25, 0.25], "123/231").unwrap();
        assert_eq!(t.apply(&0.0).unwrap(), 0.5);
        let e = iet_expansion(&t, 1).unwrap();
        assert_eq!(e.connection, Some(1));
    }
}
