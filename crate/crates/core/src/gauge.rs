//! Deformation conditions, Maurer-Cartan input, gauge transformations and
//! the coalgebra isomorphism `e^Ξ`.

use std::sync::Arc;

use crate::check::{Residual, Violation};
use crate::coalgebra::{
    comultiply, hom_bracket, words_up_to, CoderivationSpec, TensorElement, TensorPairElement,
    TensorWord, WordMap,
};
use crate::derived::{codifferential, DeformationFamily};
use crate::error::{Error, Result};
use crate::graded::{Element, GradedBasis, Scalar};
use crate::leibniz::{check_derivation, check_skewsymmetry, left_multiplication, n_i_d, MultiOp};

/// A truncated degree-zero derivation series `t ξ_1 + ... + t^m ξ_m`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GaugeFamily {
    basis: Arc<GradedBasis>,
    xis: Vec<MultiOp>,
}

impl GaugeFamily {
    /// `xis[0]` is `ξ_1`. Shapes only; see [`GaugeFamily::validate`].
    pub fn new(basis: Arc<GradedBasis>, xis: Vec<MultiOp>) -> Result<Self> {
        for (k, x) in xis.iter().enumerate() {
            if x.arity() != 1 {
                return Err(Error::ArityMismatch {
                    expected: 1,
                    got: x.arity(),
                });
            }
            if !x.is_zero() && x.degree() != 0 {
                return Err(Error::Degree(format!(
                    "ξ_{} has degree {}, expected 0",
                    k + 1,
                    x.degree()
                )));
            }
            if x.basis() != &*basis {
                return Err(Error::BasisMismatch);
            }
        }
        let xis = xis
            .into_iter()
            .map(|x| {
                if x.is_zero() {
                    MultiOp::zero(basis.clone(), 1, 0)
                } else {
                    x
                }
            })
            .collect();
        Ok(GaugeFamily { basis, xis })
    }

    pub fn order(&self) -> usize {
        self.xis.len()
    }

    pub fn basis_arc(&self) -> &Arc<GradedBasis> {
        &self.basis
    }

    pub fn xis(&self) -> &[MultiOp] {
        &self.xis
    }

    /// `ξ_j` for `j >= 1`, zero past the order.
    pub fn xi(&self, j: usize) -> MultiOp {
        j.checked_sub(1)
            .and_then(|k| self.xis.get(k))
            .cloned()
            .unwrap_or_else(|| MultiOp::zero(self.basis.clone(), 1, 0))
    }

    pub fn negated(&self) -> GaugeFamily {
        GaugeFamily {
            basis: self.basis.clone(),
            xis: self.xis.iter().map(|x| x.scaled(&-Scalar::one())).collect(),
        }
    }

    /// Every `ξ_j` must be a derivation of `bracket`.
    pub fn validate(&self, bracket: &MultiOp) -> Result<()> {
        for (k, x) in self.xis.iter().enumerate() {
            if !check_derivation(x, bracket)?.is_empty() {
                return Err(Error::Precondition(format!(
                    "ξ_{} is not a derivation",
                    k + 1
                )));
            }
        }
        Ok(())
    }
}

/// `κ_n = ∑_{i+j=n} δ_i δ_j`.
pub fn square_operator(fam: &DeformationFamily, n: usize) -> Result<MultiOp> {
    let mut acc = MultiOp::zero(fam.basis_arc().clone(), 1, 2);
    for i in 0..=n {
        acc = acc.add(&fam.delta(i).compose(&fam.delta(n - i))?)?;
    }
    Ok(acc)
}

fn square_violations(
    fam: &DeformationFamily,
    orders: std::ops::RangeInclusive<usize>,
) -> Result<Vec<Violation>> {
    let mut out = Vec::new();
    for n in orders {
        for (t, e) in square_operator(fam, n)?.constants() {
            out.push(
                Violation::new(t.to_vec(), Residual::Vector(e.clone()))
                    .with_scope("order", n as i64),
            );
        }
    }
    Ok(out)
}

fn derivation_violations(bracket: &MultiOp, fam: &DeformationFamily) -> Result<Vec<Violation>> {
    let mut out = Vec::new();
    for (i, d) in fam.deltas().iter().enumerate() {
        out.extend(
            check_derivation(d, bracket)?
                .into_iter()
                .map(|v| v.with_scope("derivation", i as i64)),
        );
    }
    Ok(out)
}

/// Each `δ_i` must be a derivation, and `κ_n` must vanish on every basis
/// vector for `n <= m`.
pub fn check_deformation(bracket: &MultiOp, fam: &DeformationFamily) -> Result<Vec<Violation>> {
    check_deformation_up_to(bracket, fam, fam.order())
}

/// As [`check_deformation`] with orders up to `n_max`. With `n_max = 2m`
/// this is the full condition on the polynomial `δ_t`.
pub fn check_deformation_up_to(
    bracket: &MultiOp,
    fam: &DeformationFamily,
    n_max: usize,
) -> Result<Vec<Violation>> {
    if !bracket.same_space(&fam.delta(0)) {
        return Err(Error::BasisMismatch);
    }
    let mut out = derivation_violations(bracket, fam)?;
    out.extend(square_violations(fam, 0..=n_max)?);
    Ok(out)
}

/// `θ_1, ..., θ_m`, degree-one elements of a dg Lie algebra.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct McElement {
    thetas: Vec<Element>,
}

impl McElement {
    pub fn new(basis: &GradedBasis, thetas: Vec<Element>) -> Result<Self> {
        for (k, t) in thetas.iter().enumerate() {
            if !t.is_zero() && !t.is_homogeneous_of(basis, 1) {
                return Err(Error::Degree(format!(
                    "θ_{} must be homogeneous of degree 1",
                    k + 1
                )));
            }
            if t.support().any(|i| i >= basis.dim()) {
                return Err(Error::Malformed(format!(
                    "θ_{} refers to a missing basis vector",
                    k + 1
                )));
            }
        }
        Ok(McElement { thetas })
    }

    pub fn thetas(&self) -> &[Element] {
        &self.thetas
    }

    pub fn order(&self) -> usize {
        self.thetas.len()
    }
}

/// `δ_0 θ_n + (1/2) ∑_{p+q=n} [θ_p, θ_q]`
pub fn mc_residual(bracket: &MultiOp, delta0: &MultiOp, theta: &McElement, n: usize) -> Element {
    let th = |p: usize| theta.thetas().get(p - 1).cloned().unwrap_or_default();
    let mut out = delta0.apply_unchecked(&[th(n)]);
    let half = Scalar::new(1, 2).expect("non-zero denominator");
    for p in 1..n {
        out.add_scaled(&bracket.apply_unchecked(&[th(p), th(n - p)]), &half);
    }
    out
}

/// `(δ_0, ad θ_1, ..., ad θ_m)`. Requires a graded skewsymmetric bracket and
/// the Maurer-Cartan equation at every order up to `m`; the first failing
/// order is reported.
pub fn mc_to_deformation(
    bracket: &MultiOp,
    delta0: &MultiOp,
    theta: &McElement,
) -> Result<DeformationFamily> {
    let all: Vec<usize> = (0..bracket.basis().dim()).collect();
    if !check_skewsymmetry(bracket, &all)?.is_empty() {
        return Err(Error::Precondition(
            "the bracket is not graded skewsymmetric".into(),
        ));
    }
    for n in 1..=theta.order() {
        if !mc_residual(bracket, delta0, theta, n).is_zero() {
            return Err(Error::NotMaurerCartan { order: n });
        }
    }
    let mut deltas = vec![delta0.clone()];
    for t in theta.thetas() {
        deltas.push(if t.is_zero() {
            MultiOp::zero(bracket.basis_arc().clone(), 1, 1)
        } else {
            left_multiplication(bracket, t)?
        });
    }
    DeformationFamily::new(deltas)
}

/// `δ'_t = exp([-, ξ_t])(δ_t)` truncated at the order of `fam`.
pub fn gauge_transform(fam: &DeformationFamily, gauge: &GaugeFamily) -> Result<DeformationFamily> {
    gauge_transform_to_order(fam, gauge, fam.order())
}

/// The gauge transform of the polynomial `δ_t` (with `δ_{>m} = 0`) computed
/// through order `order`:
/// `δ'_n = ∑_r (1/r!) P_r[n]`, `P_0[n] = δ_n`,
/// `P_r[n] = ∑_{j>=1} [P_{r-1}[n-j], ξ_j]`.
pub fn gauge_transform_to_order(
    fam: &DeformationFamily,
    gauge: &GaugeFamily,
    order: usize,
) -> Result<DeformationFamily> {
    if fam.basis() != &**gauge.basis_arc() {
        return Err(Error::BasisMismatch);
    }
    // layers[r][n] = P_r[n]
    let mut layers: Vec<Vec<MultiOp>> = vec![(0..=order).map(|n| fam.delta(n)).collect()];
    for r in 1..=order {
        let prev = &layers[r - 1];
        let mut layer = Vec::with_capacity(order + 1);
        for n in 0..=order {
            let mut acc = MultiOp::zero(fam.basis_arc().clone(), 1, 1);
            for j in 1..=n {
                acc = acc.add(&prev[n - j].commutator(&gauge.xi(j))?)?;
            }
            layer.push(acc);
        }
        layers.push(layer);
    }
    let deltas = (0..=order)
        .map(|n| {
            let mut acc = MultiOp::zero(fam.basis_arc().clone(), 1, 1);
            for (r, layer) in layers.iter().enumerate() {
                acc = acc.add_scaled(&layer[n], &Scalar::inverse_factorial(r))?;
            }
            Ok(acc)
        })
        .collect::<Result<Vec<_>>>()?;
    DeformationFamily::new(deltas)
}

/// `Ξ = ∑_i N_{i+1}^c ξ_i`, a degree-zero coderivation.
pub fn build_xi(bracket: &MultiOp, gauge: &GaugeFamily) -> Result<CoderivationSpec> {
    let mut spec = CoderivationSpec::zero(bracket.basis_arc().clone(), 0);
    for (k, x) in gauge.xis().iter().enumerate() {
        spec.insert(n_i_d(bracket, x, k + 2)?)?;
    }
    Ok(spec)
}

/// `e^{±Ξ}` as a word map. Every component of `Ξ` has arity at least two, so
/// `Ξ^r` vanishes on words shorter than `r + 1` and the series terminates.
pub struct ExpXi<'a> {
    xi: &'a CoderivationSpec,
    negative: bool,
}

impl<'a> ExpXi<'a> {
    pub fn new(xi: &'a CoderivationSpec) -> Self {
        ExpXi {
            xi,
            negative: false,
        }
    }

    pub fn inverse(xi: &'a CoderivationSpec) -> Self {
        ExpXi { xi, negative: true }
    }
}

impl WordMap for ExpXi<'_> {
    fn degree(&self) -> i64 {
        0
    }

    fn eval_word(&self, word: &TensorWord) -> TensorElement {
        let sign = if self.negative {
            -Scalar::one()
        } else {
            Scalar::one()
        };
        let mut term = TensorElement::single(word.clone(), Scalar::one());
        let mut acc = term.clone();
        for r in 1..word.len() {
            term = self
                .xi
                .eval(&term)
                .scaled(&(sign.clone() * Scalar::new(1, r as i64).expect("r > 0")));
            if term.is_zero() {
                break;
            }
            acc.add_scaled(&term, &Scalar::one());
        }
        acc
    }
}

pub fn exp_xi(spec: &CoderivationSpec, word: &TensorWord) -> TensorElement {
    ExpXi::new(spec).eval_word(word)
}

/// `X_Ξ^r(∂)` evaluated on words: `E_r(w) = E_{r-1}(Ξ w) - Ξ(E_{r-1}(w))`.
struct AdjointPower<'a> {
    d: &'a CoderivationSpec,
    xi: &'a CoderivationSpec,
    r: usize,
}

impl AdjointPower<'_> {
    fn eval_elem(&self, x: &TensorElement, r: usize) -> TensorElement {
        if r == 0 {
            return self.d.eval(x);
        }
        let mut out = self.eval_elem(&self.xi.eval(x), r - 1);
        out.add_scaled(&self.xi.eval(&self.eval_elem(x, r - 1)), &-Scalar::one());
        out
    }
}

impl WordMap for AdjointPower<'_> {
    fn degree(&self) -> i64 {
        self.d.degree()
    }

    fn eval_word(&self, word: &TensorWord) -> TensorElement {
        self.eval_elem(&TensorElement::single(word.clone(), Scalar::one()), self.r)
    }
}

/// `exp(X_Ξ)(∂)` on one word.
pub fn conjugate_series(
    d: &CoderivationSpec,
    xi: &CoderivationSpec,
    word: &TensorWord,
) -> TensorElement {
    let mut acc = TensorElement::zero();
    for r in 0..word.len() {
        let term = AdjointPower { d, xi, r }.eval_word(word);
        acc.add_scaled(&term, &Scalar::inverse_factorial(r));
    }
    acc
}

/// Outcome of [`check_gauge_equivalence`]; each list holds the words (or, for
/// the component form, basis tuples) on which an identity fails.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct GaugeVerdict {
    /// `∂' = exp(X_Ξ)(∂)` evaluated as operators on words.
    pub series: Vec<Violation>,
    /// The same identity compared arity by arity on corestrictions.
    pub series_components: Vec<Violation>,
    /// `∂' = e^{-Ξ} ∂ e^{Ξ}`
    pub conjugation: Vec<Violation>,
    /// `Δ e^Ξ = (e^Ξ (x) e^Ξ) Δ`
    pub coalgebra_map: Vec<Violation>,
    /// `e^{-Ξ} e^{Ξ} = 1 = e^{Ξ} e^{-Ξ}`
    pub inverse: Vec<Violation>,
}

impl GaugeVerdict {
    pub fn passes(&self) -> bool {
        self.series.is_empty()
            && self.series_components.is_empty()
            && self.conjugation.is_empty()
            && self.coalgebra_map.is_empty()
            && self.inverse.is_empty()
    }

    pub fn named(&self) -> [(&'static str, &[Violation]); 5] {
        [
            ("series", &self.series),
            ("series-components", &self.series_components),
            ("conjugation", &self.conjugation),
            ("coalgebra-map", &self.coalgebra_map),
            ("inverse", &self.inverse),
        ]
    }
}

/// Verifies that `e^Ξ` intertwines the codifferentials of `fam` and of its
/// gauge transform on all words of length at most `max_len`. The transform
/// is expanded through order `max_len - 1`, which is everything that acts on
/// such words.
pub fn check_gauge_equivalence(
    bracket: &MultiOp,
    fam: &DeformationFamily,
    gauge: &GaugeFamily,
    max_len: usize,
) -> Result<GaugeVerdict> {
    if max_len == 0 {
        return Err(Error::Scope("word length bound must be at least 1".into()));
    }
    let order = fam.order().max(max_len - 1);
    let transformed = gauge_transform_to_order(fam, gauge, order)?;
    let d = codifferential(bracket, fam)?;
    let d_new = codifferential(bracket, &transformed)?;
    let xi = build_xi(bracket, gauge)?;
    let exp = ExpXi::new(&xi);
    let exp_inv = ExpXi::inverse(&xi);
    let basis = bracket.basis();
    let mut verdict = GaugeVerdict::default();
    let word_violation = |w: &TensorWord, res: TensorElement| {
        Violation::new(w.letters().to_vec(), Residual::Tensor(res))
    };
    for w in words_up_to(basis, max_len) {
        let lhs = d_new.eval_word(&w);
        let series = conjugate_series(&d, &xi, &w);
        let res = lhs.sub(&series);
        if !res.is_zero() {
            verdict.series.push(word_violation(&w, res));
        }
        let conj = exp_inv.eval(&d.eval(&exp.eval_word(&w)));
        let res = lhs.sub(&conj);
        if !res.is_zero() {
            verdict.conjugation.push(word_violation(&w, res));
        }
        let res = coalgebra_map_residual(basis, &exp, &w);
        if !res.is_zero() {
            verdict
                .coalgebra_map
                .push(Violation::new(w.letters().to_vec(), Residual::Pair(res)));
        }
        let id = TensorElement::single(w.clone(), Scalar::one());
        for res in [
            exp_inv.eval(&exp.eval_word(&w)).sub(&id),
            exp.eval(&exp_inv.eval_word(&w)).sub(&id),
        ] {
            if !res.is_zero() {
                verdict.inverse.push(word_violation(&w, res));
            }
        }
    }
    verdict.series_components = series_components(bracket, &d, &xi, &transformed, max_len)?;
    Ok(verdict)
}

fn coalgebra_map_residual(
    basis: &GradedBasis,
    exp: &ExpXi<'_>,
    w: &TensorWord,
) -> TensorPairElement {
    let mut res = TensorPairElement::zero();
    for (v, c) in exp.eval_word(w).terms() {
        res.add_scaled(&comultiply(basis, v), c);
    }
    for ((u, v), c) in comultiply(basis, w).terms() {
        let eu = exp.eval_word(u);
        let ev = exp.eval_word(v);
        for (a, ca) in eu.terms() {
            for (b, cb) in ev.terms() {
                res.add_term((a.clone(), b.clone()), -(c * ca * cb.clone()));
            }
        }
    }
    res
}

/// Arity-by-arity: `N_n δ'_{n-1} = ∑_r (1/r!) (X_Ξ^r ∂)_n` with
/// `(X_Ξ A)_n = ∑_{a+b-1=n} (A_a, Ξ_b)`.
fn series_components(
    bracket: &MultiOp,
    d: &CoderivationSpec,
    xi: &CoderivationSpec,
    transformed: &DeformationFamily,
    max_len: usize,
) -> Result<Vec<Violation>> {
    let basis = bracket.basis_arc().clone();
    let component = |spec: &CoderivationSpec, n: usize, degree: i64| {
        spec.component(n)
            .cloned()
            .unwrap_or_else(|| MultiOp::zero(basis.clone(), n, degree))
    };
    // layer[n - 1] = arity-n component of X_Ξ^r(∂)
    let mut layer: Vec<MultiOp> = (1..=max_len).map(|n| component(d, n, 1)).collect();
    let mut total: Vec<MultiOp> = layer.clone();
    for r in 1..max_len {
        let mut next = Vec::with_capacity(max_len);
        for n in 1..=max_len {
            let mut acc = MultiOp::zero(basis.clone(), n, 1);
            for b in 2..=n {
                let a = n + 1 - b;
                acc = acc.add(&hom_bracket(&layer[a - 1], &component(xi, b, 0))?)?;
            }
            next.push(acc);
        }
        layer = next;
        for (t, l) in total.iter_mut().zip(&layer) {
            *t = t.add_scaled(l, &Scalar::inverse_factorial(r))?;
        }
    }
    let mut out = Vec::new();
    for n in 1..=max_len {
        let expected = n_i_d(bracket, &transformed.delta(n - 1), n)?;
        for (t, e) in expected.sub(&total[n - 1])?.constants() {
            out.push(
                Violation::new(t.to_vec(), Residual::Vector(e.clone()))
                    .with_scope("arity", n as i64),
            );
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::leibniz::left_multiplication;

    fn l2b() -> (MultiOp, DeformationFamily) {
        let basis = Arc::new(GradedBasis::new([("e", 0), ("c", 0), ("b", 1), ("z", 2)]).unwrap());
        let br = MultiOp::new(
            basis.clone(),
            2,
            0,
            [(vec![0, 0], Element::basis_vector(1))],
        )
        .unwrap();
        let d1 = MultiOp::new(basis.clone(), 1, 1, [(vec![0], Element::basis_vector(2))]).unwrap();
        let fam = DeformationFamily::new(vec![MultiOp::zero(basis, 1, 1), d1]).unwrap();
        (br, fam)
    }

    #[test]
    fn zero_gauge_changes_nothing() {
        let (br, fam) = l2b();
        let g = GaugeFamily::new(
            br.basis_arc().clone(),
            vec![MultiOp::zero(br.basis_arc().clone(), 1, 0)],
        )
        .unwrap();
        assert_eq!(gauge_transform(&fam, &g).unwrap(), fam);
        assert!(build_xi(&br, &g).unwrap().is_zero());
        assert!(check_gauge_equivalence(&br, &fam, &g, 3).unwrap().passes());
    }

    #[test]
    fn first_and_second_order_terms() {
        let (br, fam) = l2b();
        let basis = br.basis_arc().clone();
        let le = left_multiplication(&br, &Element::basis_vector(0)).unwrap();
        let x2 = MultiOp::new(basis.clone(), 1, 0, [(vec![2], Element::basis_vector(2))]).unwrap();
        let g = GaugeFamily::new(basis, vec![le.clone(), x2.clone()]).unwrap();
        let out = gauge_transform_to_order(&fam, &g, 2).unwrap();
        let d0 = fam.delta(0);
        let d1 = fam.delta(1);
        assert_eq!(out.delta(1), d1.add(&d0.commutator(&le).unwrap()).unwrap());
        let half = Scalar::new(1, 2).unwrap();
        let expected = fam
            .delta(2)
            .add(&d1.commutator(&le).unwrap())
            .unwrap()
            .add_scaled(&d0.commutator(&le).unwrap().commutator(&le).unwrap(), &half)
            .unwrap()
            .add(&d0.commutator(&x2).unwrap())
            .unwrap();
        assert_eq!(out.delta(2), expected);
    }

    #[test]
    fn exp_on_short_words() {
        let (br, _) = l2b();
        let le = left_multiplication(&br, &Element::basis_vector(0)).unwrap();
        let g = GaugeFamily::new(br.basis_arc().clone(), vec![le]).unwrap();
        let xi = build_xi(&br, &g).unwrap();
        let w = TensorWord::new(vec![0, 0]).unwrap();
        // N_2 ξ_1 (e,e) = {{e,e},e} = {c,e} = 0
        assert!(xi.eval_word(&w).is_zero());
        assert_eq!(
            exp_xi(&xi, &w),
            TensorElement::single(w.clone(), Scalar::one())
        );
    }

    #[test]
    fn mc_rejection_reports_order() {
        let basis = Arc::new(GradedBasis::new([("w", 0), ("y", 1), ("p", 1), ("z", 2)]).unwrap());
        let v = Element::basis_vector;
        let m = |i| Element::term(i, -Scalar::one());
        let br = MultiOp::new(
            basis.clone(),
            2,
            0,
            [
                (vec![0, 1], v(1)),
                (vec![1, 0], m(1)),
                (vec![0, 2], v(2)),
                (vec![2, 0], m(2)),
                (vec![0, 3], Element::term(3, Scalar::from_int(2))),
                (vec![3, 0], Element::term(3, Scalar::from_int(-2))),
                (vec![1, 2], v(3)),
                (vec![2, 1], v(3)),
            ],
        )
        .unwrap();
        let d0 = MultiOp::new(basis.clone(), 1, 1, [(vec![0], v(2)), (vec![1], m(3))]).unwrap();
        let good = McElement::new(&basis, vec![v(2), Element::zero(), v(2)]).unwrap();
        let fam = mc_to_deformation(&br, &d0, &good).unwrap();
        assert!(check_deformation(&br, &fam).unwrap().is_empty());
        let bad = McElement::new(&basis, vec![v(2), v(1)]).unwrap();
        assert_eq!(
            mc_to_deformation(&br, &d0, &bad).unwrap_err(),
            Error::NotMaurerCartan { order: 2 }
        );
    }
}
