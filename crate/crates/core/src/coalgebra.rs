//! The cofree nilpotent dual-Leibniz coalgebra on `V`: words of length at
//! least one, the unshuffle comultiplication with pinned last letter, and
//! coderivations given by their corestrictions.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use crate::check::{Mode, Residual, Violation};
use crate::error::{Error, Result};
use crate::graded::{koszul_parity, unshuffles, Element, GradedBasis, Permutation, Scalar};
use crate::leibniz::MultiOp;

/// A non-empty word of basis indices, an element of some `V^{(x) n}`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TensorWord(Vec<usize>);

impl TensorWord {
    pub fn new(letters: Vec<usize>) -> Result<Self> {
        if letters.is_empty() {
            return Err(Error::Malformed(
                "tensor words have at least one letter".into(),
            ));
        }
        Ok(TensorWord(letters))
    }

    pub(crate) fn from_vec(letters: Vec<usize>) -> Self {
        debug_assert!(!letters.is_empty());
        TensorWord(letters)
    }

    pub fn letters(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn degree(&self, basis: &GradedBasis) -> i64 {
        basis.word_degree(&self.0)
    }

    pub fn render(&self, basis: &GradedBasis) -> String {
        format!(
            "({})",
            self.0
                .iter()
                .map(|&i| basis.name(i))
                .collect::<Vec<_>>()
                .join(" ")
        )
    }
}

impl fmt::Debug for TensorWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0)
    }
}

/// Keys of a [`Combination`] that know how to print themselves.
pub trait RenderKey {
    fn render_key(&self, basis: &GradedBasis) -> String;
}

impl RenderKey for TensorWord {
    fn render_key(&self, basis: &GradedBasis) -> String {
        self.render(basis)
    }
}

impl RenderKey for (TensorWord, TensorWord) {
    fn render_key(&self, basis: &GradedBasis) -> String {
        format!("{}|{}", self.0.render(basis), self.1.render(basis))
    }
}

impl RenderKey for (TensorWord, TensorWord, TensorWord) {
    fn render_key(&self, basis: &GradedBasis) -> String {
        format!(
            "{}|{}|{}",
            self.0.render(basis),
            self.1.render(basis),
            self.2.render(basis)
        )
    }
}

/// A sparse rational combination of keys with no zero coefficients.
#[derive(Clone, PartialEq, Eq)]
pub struct Combination<K: Ord> {
    terms: BTreeMap<K, Scalar>,
}

/// An element of `T̄V`; words of different lengths may be mixed.
pub type TensorElement = Combination<TensorWord>;
/// An element of `T̄V (x) T̄V`.
pub type TensorPairElement = Combination<(TensorWord, TensorWord)>;
/// An element of `T̄V (x) T̄V (x) T̄V`.
pub type TensorTripleElement = Combination<(TensorWord, TensorWord, TensorWord)>;

impl<K: Ord> Default for Combination<K> {
    fn default() -> Self {
        Combination {
            terms: BTreeMap::new(),
        }
    }
}

impl<K: Ord + Clone> Combination<K> {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn single(key: K, c: Scalar) -> Self {
        let mut out = Self::zero();
        out.add_term(key, c);
        out
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, key: &K) -> Scalar {
        self.terms.get(key).cloned().unwrap_or_else(Scalar::zero)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&K, &Scalar)> + '_ {
        self.terms.iter()
    }

    pub fn add_term(&mut self, key: K, c: Scalar) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&key) {
            Some(v) => {
                *v += c;
                if v.is_zero() {
                    self.terms.remove(&key);
                }
            }
            None => {
                self.terms.insert(key, c);
            }
        }
    }

    pub fn add_scaled(&mut self, other: &Self, c: &Scalar) {
        for (k, v) in &other.terms {
            self.add_term(k.clone(), v * c);
        }
    }

    pub fn scaled(&self, c: &Scalar) -> Self {
        let mut out = Self::zero();
        out.add_scaled(self, c);
        out
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        out.add_scaled(other, &Scalar::one());
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        let mut out = self.clone();
        out.add_scaled(other, &-Scalar::one());
        out
    }

    /// Keeps only the keys satisfying `keep`.
    pub fn filter(&self, mut keep: impl FnMut(&K) -> bool) -> Self {
        Combination {
            terms: self
                .terms
                .iter()
                .filter(|(k, _)| keep(k))
                .map(|(k, v)| (k.clone(), v.clone()))
                .collect(),
        }
    }
}

impl<K: Ord + Clone + RenderKey> Combination<K> {
    /// `key:coeff` pairs separated by spaces, or `0`.
    pub fn render(&self, basis: &GradedBasis) -> String {
        if self.is_zero() {
            return "0".into();
        }
        self.terms
            .iter()
            .map(|(k, c)| format!("{}:{}", k.render_key(basis), c))
            .collect::<Vec<_>>()
            .join(" ")
    }
}

impl<K: Ord + fmt::Debug> fmt::Debug for Combination<K> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_map().entries(self.terms.iter()).finish()
    }
}

impl TensorElement {
    pub fn word(letters: Vec<usize>) -> Result<Self> {
        Ok(Self::single(TensorWord::new(letters)?, Scalar::one()))
    }

    /// The part in `V`, as an element.
    pub fn project_to_v(&self) -> Element {
        Element::from_terms(
            self.terms
                .iter()
                .filter(|(w, _)| w.len() == 1)
                .map(|(w, c)| (w.0[0], c.clone())),
        )
    }
}

/// Every word of length `1..=max_len`, shortest first, lexicographic within
/// a length.
pub fn words_up_to(basis: &GradedBasis, max_len: usize) -> impl Iterator<Item = TensorWord> + '_ {
    (1..=max_len).flat_map(move |n| basis.tuples(n).map(TensorWord::from_vec))
}

fn letter_degrees(basis: &GradedBasis, letters: &[usize]) -> Vec<i64> {
    letters.iter().map(|&i| basis.degree(i)).collect()
}

fn koszul(sigma: &Permutation, degrees: &[i64]) -> Scalar {
    if koszul_parity(sigma.images(), degrees) {
        -Scalar::one()
    } else {
        Scalar::one()
    }
}

/// `Delta(x_1..x_{n+1}) = sum_{i=1}^{n} sum_{(i,n-i)-unshuffles}
/// eps(sigma) (x_s(1)..x_s(i)) (x) (x_s(i+1)..x_s(n), x_{n+1})`, and
/// `Delta(V) = 0`.
pub fn comultiply(basis: &GradedBasis, word: &TensorWord) -> TensorPairElement {
    let mut out = TensorPairElement::zero();
    let n = word.len() - 1;
    if n == 0 {
        return out;
    }
    let head = &word.0[..n];
    let last = word.0[n];
    let degrees = letter_degrees(basis, head);
    for i in 1..=n {
        for sigma in unshuffles(i, n - i) {
            let permuted = sigma.permute(head);
            let left = TensorWord::from_vec(permuted[..i].to_vec());
            let mut right = permuted[i..].to_vec();
            right.push(last);
            out.add_term(
                (left, TensorWord::from_vec(right)),
                koszul(&sigma, &degrees),
            );
        }
    }
    out
}

pub fn comultiply_element(basis: &GradedBasis, x: &TensorElement) -> TensorPairElement {
    let mut out = TensorPairElement::zero();
    for (w, c) in x.terms() {
        out.add_scaled(&comultiply(basis, w), c);
    }
    out
}

/// Checks `(1(x)Delta)Delta = (Delta(x)1)Delta + ((12)(x)1)(Delta(x)1)Delta`
/// on every word of length at most `max_len`.
pub fn check_dual_leibniz(basis: &GradedBasis, max_len: usize) -> Vec<Violation> {
    let mut out = Vec::new();
    for w in words_up_to(basis, max_len) {
        let res = dual_leibniz_residual(basis, &w);
        if !res.is_zero() {
            out.push(Violation::new(w.0.clone(), Residual::Triple(res)));
        }
    }
    out
}

fn dual_leibniz_residual(basis: &GradedBasis, w: &TensorWord) -> TensorTripleElement {
    let delta = comultiply(basis, w);
    let mut res = TensorTripleElement::zero();
    for ((u, v), c) in delta.terms() {
        for ((v1, v2), c2) in comultiply(basis, v).terms() {
            res.add_term((u.clone(), v1.clone(), v2.clone()), c * c2);
        }
        for ((u1, u2), c2) in comultiply(basis, u).terms() {
            let coeff = c * c2;
            // (12) swaps the first two factors with the Koszul sign
            let swap = Scalar::sign(u1.degree(basis) * u2.degree(basis));
            res.add_term((u1.clone(), u2.clone(), v.clone()), -&coeff);
            res.add_term((u2.clone(), u1.clone(), v.clone()), -(coeff * swap));
        }
    }
    res
}

/// Something that acts on single words of `T̄V` with a fixed degree: a lifted
/// coderivation, or a deliberately broken map used as a negative control.
pub trait WordMap {
    fn degree(&self) -> i64;
    fn eval_word(&self, word: &TensorWord) -> TensorElement;

    fn eval(&self, x: &TensorElement) -> TensorElement {
        let mut out = TensorElement::zero();
        for (w, c) in x.terms() {
            out.add_scaled(&self.eval_word(w), c);
        }
        out
    }
}

/// A coderivation of `T̄V`, stored by its corestriction components
/// `f_i : V^{(x) i} -> V`.
#[derive(Clone, PartialEq, Eq)]
pub struct CoderivationSpec {
    basis: Arc<GradedBasis>,
    degree: i64,
    components: BTreeMap<usize, MultiOp>,
}

impl CoderivationSpec {
    pub fn new(
        basis: Arc<GradedBasis>,
        degree: i64,
        components: impl IntoIterator<Item = MultiOp>,
    ) -> Result<Self> {
        let mut spec = CoderivationSpec::zero(basis, degree);
        for f in components {
            spec.insert(f)?;
        }
        Ok(spec)
    }

    pub fn zero(basis: Arc<GradedBasis>, degree: i64) -> Self {
        CoderivationSpec {
            basis,
            degree,
            components: BTreeMap::new(),
        }
    }

    /// Adds `f` to the component of its arity. Zero maps are accepted with any
    /// degree.
    pub fn insert(&mut self, f: MultiOp) -> Result<()> {
        if f.basis() != &*self.basis {
            return Err(Error::BasisMismatch);
        }
        if f.is_zero() {
            return Ok(());
        }
        if f.degree() != self.degree {
            return Err(Error::Degree(format!(
                "component of arity {} has degree {}, coderivation has degree {}",
                f.arity(),
                f.degree(),
                self.degree
            )));
        }
        let arity = f.arity();
        let merged = match self.components.remove(&arity) {
            Some(old) => old.add(&f)?,
            None => f,
        };
        if !merged.is_zero() {
            self.components.insert(arity, merged);
        }
        Ok(())
    }

    pub fn basis(&self) -> &GradedBasis {
        &self.basis
    }

    pub fn basis_arc(&self) -> &Arc<GradedBasis> {
        &self.basis
    }

    pub fn degree(&self) -> i64 {
        self.degree
    }

    pub fn is_zero(&self) -> bool {
        self.components.is_empty()
    }

    pub fn component(&self, arity: usize) -> Option<&MultiOp> {
        self.components.get(&arity)
    }

    pub fn components(&self) -> impl Iterator<Item = &MultiOp> + '_ {
        self.components.values()
    }

    pub fn scaled(&self, c: &Scalar) -> CoderivationSpec {
        let mut out = CoderivationSpec::zero(self.basis.clone(), self.degree);
        for f in self.components.values() {
            out.insert(f.scaled(c)).expect("same basis and degree");
        }
        out
    }

    /// The arity-`n` corestriction read off from evaluating the lift, i.e.
    /// the inverse of `f -> f^c`.
    pub fn corestriction(&self, arity: usize) -> Result<MultiOp> {
        corestriction(self, self.basis.clone(), arity)
    }
}

impl fmt::Debug for CoderivationSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "CoderivationSpec(degree {})", self.degree)?;
        for op in self.components.values() {
            writeln!(f, "{op:?}")?;
        }
        Ok(())
    }
}

impl WordMap for CoderivationSpec {
    fn degree(&self) -> i64 {
        self.degree
    }

    fn eval_word(&self, word: &TensorWord) -> TensorElement {
        let mut out = TensorElement::zero();
        for f in self.components.values() {
            out.add_scaled(&lift_word(f, word), &Scalar::one());
        }
        out
    }
}

/// Projection to `V` of a word map on words of length `arity`.
pub fn corestriction(map: &impl WordMap, basis: Arc<GradedBasis>, arity: usize) -> Result<MultiOp> {
    MultiOp::from_fn(basis, arity, map.degree(), |t| {
        map.eval_word(&TensorWord::from_vec(t.to_vec()))
            .project_to_v()
    })
}

/// `f -> f^c` as a one-component spec.
pub fn lift_coderivation(f: &MultiOp) -> CoderivationSpec {
    let mut spec = CoderivationSpec::zero(f.basis_arc().clone(), f.degree());
    spec.insert(f.clone())
        .expect("single component is consistent");
    spec
}

pub fn evaluate_coderivation(spec: &CoderivationSpec, word: &TensorWord) -> TensorElement {
    spec.eval_word(word)
}

/// `f^c` on one word: zero below the arity of `f`, otherwise the sum of the
/// summands [`decompose_k`] over `k = arity..=len`.
pub fn lift_word(f: &MultiOp, word: &TensorWord) -> TensorElement {
    let mut out = TensorElement::zero();
    if f.is_zero() {
        return out;
    }
    for k in f.arity()..=word.len() {
        out.add_scaled(&decompose_k(f, k, word), &Scalar::one());
    }
    out
}

/// The `k`-th summand of the lift: the output of `f` sits at position
/// `k - i + 1`, its last input is the pinned letter `x_k`, and a
/// `(k-i, i-1)`-unshuffle distributes `x_1..x_{k-1}` before and inside `f`.
/// The sign is `eps(sigma) (-1)^{|f|(x_s(1)+..+x_s(k-i))}`. Out-of-range `k`
/// gives zero.
pub fn decompose_k(f: &MultiOp, k: usize, word: &TensorWord) -> TensorElement {
    let mut out = TensorElement::zero();
    let i = f.arity();
    let n = word.len();
    if k < i || k > n || f.is_zero() {
        return out;
    }
    let basis = f.basis();
    let letters = &word.0;
    let head = &letters[..k - 1];
    let degrees = letter_degrees(basis, head);
    for sigma in unshuffles(k - i, i - 1) {
        let permuted = sigma.permute(head);
        let before = &permuted[..k - i];
        let mut inputs = permuted[k - i..].to_vec();
        inputs.push(letters[k - 1]);
        let Some(image) = f.on_basis(&inputs) else {
            continue;
        };
        let passed = basis.word_degree(before);
        let sign = koszul(&sigma, &degrees) * Scalar::sign(f.degree() * passed);
        for (v, c) in image.terms() {
            let mut w = before.to_vec();
            w.push(v);
            w.extend_from_slice(&letters[k..]);
            out.add_term(TensorWord::from_vec(w), c * &sign);
        }
    }
    out
}

/// Checks `Delta D = (D(x)1)Delta + (1(x)D)Delta` on all words of length at
/// most `max_len`; `(1(x)D)(u(x)v) = (-1)^{|D||u|} u (x) D v`.
pub fn check_coderivation_axiom(
    map: &impl WordMap,
    basis: &GradedBasis,
    max_len: usize,
) -> Vec<Violation> {
    let mut out = Vec::new();
    for w in words_up_to(basis, max_len) {
        let res = coderivation_residual(map, basis, &w);
        if !res.is_zero() {
            out.push(Violation::new(w.0.clone(), Residual::Pair(res)));
        }
    }
    out
}

fn coderivation_residual(
    map: &impl WordMap,
    basis: &GradedBasis,
    w: &TensorWord,
) -> TensorPairElement {
    let mut res = comultiply_element(basis, &map.eval_word(w));
    for ((u, v), c) in comultiply(basis, w).terms() {
        for (du, c2) in map.eval_word(u).terms() {
            res.add_term((du.clone(), v.clone()), -(c * c2));
        }
        let sign = Scalar::sign(map.degree() * u.degree(basis));
        for (dv, c2) in map.eval_word(v).terms() {
            res.add_term((u.clone(), dv.clone()), -(c * c2 * sign.clone()));
        }
    }
    res
}

/// Composite `a o b` of word maps.
pub struct Composed<'a, A: WordMap, B: WordMap>(pub &'a A, pub &'a B);

impl<A: WordMap, B: WordMap> WordMap for Composed<'_, A, B> {
    fn degree(&self) -> i64 {
        self.0.degree() + self.1.degree()
    }

    fn eval_word(&self, word: &TensorWord) -> TensorElement {
        self.0.eval(&self.1.eval_word(word))
    }
}

/// `f o g^c` projected to `V` on words of length `i + j - 1`.
fn compose_with_lift(f: &MultiOp, g: &MultiOp, word: &TensorWord) -> Element {
    let mut out = Element::zero();
    for (w, c) in lift_word(g, word).terms() {
        if w.len() == f.arity() {
            out.add_scaled(&f.eval_basis(&w.0), c);
        }
    }
    out
}

/// `(f,g) = f o g^c - (-1)^{|f||g|} g o f^c`, an operation of arity
/// `i + j - 1` and degree `|f| + |g|`.
pub fn hom_bracket(f: &MultiOp, g: &MultiOp) -> Result<MultiOp> {
    if !f.same_space(g) {
        return Err(Error::BasisMismatch);
    }
    let arity = f.arity() + g.arity() - 1;
    let sign = Scalar::sign(f.degree() * g.degree());
    MultiOp::from_fn(f.basis_arc().clone(), arity, f.degree() + g.degree(), |t| {
        let w = TensorWord::from_vec(t.to_vec());
        let mut e = compose_with_lift(f, g, &w);
        e.add_scaled(&compose_with_lift(g, f, &w), &-sign.clone());
        e
    })
}

/// Graded commutator of the lifts evaluated on words.
pub struct LiftCommutator<'a> {
    f: &'a CoderivationSpec,
    g: &'a CoderivationSpec,
}

impl<'a> LiftCommutator<'a> {
    pub fn new(f: &'a CoderivationSpec, g: &'a CoderivationSpec) -> Self {
        LiftCommutator { f, g }
    }
}

impl WordMap for LiftCommutator<'_> {
    fn degree(&self) -> i64 {
        self.f.degree() + self.g.degree()
    }

    fn eval_word(&self, word: &TensorWord) -> TensorElement {
        let mut out = self.f.eval(&self.g.eval_word(word));
        let sign = Scalar::sign(self.f.degree() * self.g.degree());
        out.add_scaled(&self.g.eval(&self.f.eval_word(word)), &-sign);
        out
    }
}

/// Cross-check of [`hom_bracket`]: `[f^c, g^c] = (f,g)^c` on all words of
/// length at most `max_len`.
pub fn check_bracket_lifts(f: &MultiOp, g: &MultiOp, max_len: usize) -> Result<Vec<Violation>> {
    let fg = hom_bracket(f, g)?;
    let lf = lift_coderivation(f);
    let lg = lift_coderivation(g);
    let comm = LiftCommutator::new(&lf, &lg);
    let mut out = Vec::new();
    for w in words_up_to(f.basis(), max_len) {
        let res = comm.eval_word(&w).sub(&lift_word(&fg, &w));
        if !res.is_zero() {
            out.push(Violation::new(w.0.clone(), Residual::Tensor(res)));
        }
    }
    Ok(out)
}

/// Words on which `map` does not vanish.
pub fn check_vanishes(
    map: &impl WordMap,
    basis: &GradedBasis,
    max_len: usize,
    mode: Mode,
) -> Vec<Violation> {
    let mut out = Vec::new();
    for w in words_up_to(basis, max_len) {
        let image = map.eval_word(&w);
        if !image.is_zero() {
            out.push(
                Violation::new(w.0.clone(), Residual::Tensor(image))
                    .with_scope("length", w.len() as i64),
            );
            if mode.done(&out) {
                break;
            }
        }
    }
    out
}

/// Words where `sum_k decompose_k` differs from the full lift.
pub fn check_decomposition(f: &MultiOp, max_len: usize) -> Vec<Violation> {
    let mut out = Vec::new();
    for w in words_up_to(f.basis(), max_len) {
        let mut sum = TensorElement::zero();
        for k in 0..=w.len() {
            sum.add_scaled(&decompose_k(f, k, &w), &Scalar::one());
        }
        let res = sum.sub(&lift_coderivation(f).eval_word(&w));
        if !res.is_zero() {
            out.push(Violation::new(w.0.clone(), Residual::Tensor(res)));
        }
    }
    out
}

/// `f` differs from the arity-`i` corestriction of its own lift.
pub fn check_round_trip(f: &MultiOp) -> Result<Vec<Violation>> {
    let back = lift_coderivation(f).corestriction(f.arity())?;
    let diff = back.sub(f)?;
    Ok(diff
        .constants()
        .map(|(t, e)| Violation::new(t.to_vec(), Residual::Vector(e.clone())))
        .collect())
}
