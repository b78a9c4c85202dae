//! Higher derived brackets and the two characterizations of sh Leibniz
//! algebras: the generalized Jacobi identities for `l_i` on `sV`, and
//! `∂∂ = 0` for the coderivation `∂ = ∑ N_i^c δ_{i-1}` on `T̄V`.

use std::collections::HashMap;
use std::sync::Arc;

use crate::check::{Mode, Residual, Violation};
use crate::coalgebra::{check_vanishes, hom_bracket, CoderivationSpec, Composed};
use crate::error::{Error, Result};
use crate::graded::tensor::{apply_tensor_map, Composite, Identity, Letter, LetterMap};
use crate::graded::{
    anti_koszul_sign, shifted_degrees, unshuffles, Element, GradedBasis, Permutation, Scalar, Shift,
};
use crate::leibniz::{
    check_derivation, derivation_basis, left_multiplication, n_i_d, nary_bracket, MultiOp,
};

/// A truncated deformation `δ_0 + t δ_1 + ... + t^m δ_m` of a differential;
/// `δ_{i>m} = 0`.
///
/// Construction only checks shapes (arity one, degree one, common basis), so
/// that broken families can be built and fed to the checks.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DeformationFamily {
    basis: Arc<GradedBasis>,
    deltas: Vec<MultiOp>,
}

impl DeformationFamily {
    pub fn new(deltas: Vec<MultiOp>) -> Result<Self> {
        let first = deltas
            .first()
            .ok_or_else(|| Error::Malformed("a deformation needs δ_0".into()))?;
        let basis = first.basis_arc().clone();
        for (i, d) in deltas.iter().enumerate() {
            if d.arity() != 1 {
                return Err(Error::ArityMismatch {
                    expected: 1,
                    got: d.arity(),
                });
            }
            if !d.is_zero() && d.degree() != 1 {
                return Err(Error::Degree(format!(
                    "δ_{i} has degree {}, expected 1",
                    d.degree()
                )));
            }
            if d.basis() != &*basis {
                return Err(Error::BasisMismatch);
            }
        }
        let deltas = deltas
            .into_iter()
            .map(|d| {
                if d.is_zero() {
                    MultiOp::zero(basis.clone(), 1, 1)
                } else {
                    d
                }
            })
            .collect();
        Ok(DeformationFamily { basis, deltas })
    }

    /// The undeformed family `(δ_0)`.
    pub fn trivial(delta0: MultiOp) -> Result<Self> {
        DeformationFamily::new(vec![delta0])
    }

    pub fn order(&self) -> usize {
        self.deltas.len() - 1
    }

    pub fn basis(&self) -> &GradedBasis {
        &self.basis
    }

    pub fn basis_arc(&self) -> &Arc<GradedBasis> {
        &self.basis
    }

    pub fn deltas(&self) -> &[MultiOp] {
        &self.deltas
    }

    /// `δ_i`, zero past the order.
    pub fn delta(&self, i: usize) -> MultiOp {
        self.deltas
            .get(i)
            .cloned()
            .unwrap_or_else(|| MultiOp::zero(self.basis.clone(), 1, 1))
    }

    /// Same family with `δ_i` replaced.
    pub fn with_delta(&self, i: usize, delta: MultiOp) -> Result<Self> {
        let mut deltas = self.deltas.clone();
        if i >= deltas.len() {
            deltas.resize(i + 1, MultiOp::zero(self.basis.clone(), 1, 1));
        }
        deltas[i] = delta;
        DeformationFamily::new(deltas)
    }
}

/// The operations `l_1, ..., l_N` on `sV`, `l_i` of arity `i` and degree
/// `2 - i`; brackets past `N` are zero.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ShLeibnizStructure {
    shifted_basis: Arc<GradedBasis>,
    ops: Vec<MultiOp>,
}

impl ShLeibnizStructure {
    pub fn new(shifted_basis: Arc<GradedBasis>, ops: Vec<MultiOp>) -> Result<Self> {
        for (k, op) in ops.iter().enumerate() {
            let i = k + 1;
            if op.arity() != i {
                return Err(Error::ArityMismatch {
                    expected: i,
                    got: op.arity(),
                });
            }
            if op.degree() != 2 - i as i64 {
                return Err(Error::Degree(format!(
                    "l_{i} has degree {}, expected {}",
                    op.degree(),
                    2 - i as i64
                )));
            }
            if op.basis() != &*shifted_basis {
                return Err(Error::BasisMismatch);
            }
        }
        Ok(ShLeibnizStructure { shifted_basis, ops })
    }

    pub fn shifted_basis(&self) -> &GradedBasis {
        &self.shifted_basis
    }

    pub fn ops(&self) -> &[MultiOp] {
        &self.ops
    }

    /// `l_i`, or `None` when it vanishes by truncation.
    pub fn op(&self, i: usize) -> Option<&MultiOp> {
        if i == 0 {
            None
        } else {
            self.ops.get(i - 1)
        }
    }
}

/// Adapts a unary operation to the signed tensor evaluator.
struct UnaryLetters<'a>(&'a MultiOp);

impl LetterMap for UnaryLetters<'_> {
    fn degree(&self) -> i64 {
        self.0.degree()
    }

    fn map_letter(&self, _: &GradedBasis, letter: Letter) -> Vec<(Letter, Scalar)> {
        self.0
            .eval_basis(&[letter.index])
            .terms()
            .map(|(v, c)| (Letter::new(v, letter.shift), c.clone()))
            .collect()
    }
}

fn require_delta(bracket: &MultiOp, delta: &MultiOp) -> Result<()> {
    if bracket.arity() != 2 {
        return Err(Error::ArityMismatch {
            expected: 2,
            got: bracket.arity(),
        });
    }
    if bracket.degree() != 0 {
        return Err(Error::Degree("the bracket must have degree 0".into()));
    }
    if delta.arity() != 1 {
        return Err(Error::ArityMismatch {
            expected: 1,
            got: delta.arity(),
        });
    }
    if !delta.is_zero() && delta.degree() != 1 {
        return Err(Error::Degree(format!(
            "δ must have degree 1, has {}",
            delta.degree()
        )));
    }
    if !delta.same_space(bracket) {
        return Err(Error::BasisMismatch);
    }
    Ok(())
}

/// `(-1)^{(i-1)(i-2)/2}`
pub fn bracket_prefactor(i: usize) -> Scalar {
    let i = i as i64;
    Scalar::sign((i - 1) * (i - 2) / 2)
}

/// The sign in `s^{-1} l_i(sx_1..sx_i) = ± N_i(δ x_1, x_2, .., x_i)`:
/// `(-1)^{x_1+x_3+...}` for even `i`, `(-1)^{x_2+x_4+...}` for odd `i`.
/// `degrees` are the degrees in `V`.
pub fn explicit_sign(degrees: &[i64]) -> Scalar {
    let skip = if degrees.len().is_multiple_of(2) {
        0
    } else {
        1
    };
    Scalar::sign(degrees.iter().skip(skip).step_by(2).sum())
}

/// `l_i = (-1)^{(i-1)(i-2)/2} s N_i (s^{-1})^{(x) i} (s δ s^{-1} (x) 1 (x) ... (x) 1)`,
/// evaluated with the signed tensor evaluator. Returned over `sV`.
pub fn derived_bracket(bracket: &MultiOp, delta: &MultiOp, i: usize) -> Result<MultiOp> {
    require_delta(bracket, delta)?;
    if i == 0 {
        return Err(Error::Malformed("derived brackets start at i = 1".into()));
    }
    let basis = bracket.basis_arc().clone();
    let shifted = Arc::new(shifted_degrees(&basis, Shift::Raise));
    let n_i = nary_bracket(bracket, i)?;
    let delta_letters = UnaryLetters(delta);
    let shifted_delta = Composite(vec![&Shift::Raise, &delta_letters, &Shift::Lower]);
    let mut first: Vec<&dyn LetterMap> = vec![&shifted_delta];
    first.extend(std::iter::repeat_n(&Identity as &dyn LetterMap, i - 1));
    let lowers: Vec<&dyn LetterMap> = vec![&Shift::Lower; i];
    let prefactor = bracket_prefactor(i);
    MultiOp::from_fn(shifted, i, 2 - i as i64, |t| {
        let word: Vec<Letter> = t.iter().map(|&x| Letter::new(x, 1)).collect();
        let mut out = Element::zero();
        for (w1, c1) in apply_tensor_map(&basis, &first, &word, &prefactor) {
            for (w2, c2) in apply_tensor_map(&basis, &lowers, &w1, &c1) {
                let indices: Vec<usize> = w2.iter().map(|l| l.index).collect();
                out.add_scaled(&n_i.eval_basis(&indices), &c2);
            }
        }
        out
    })
}

/// The same bracket from the closed form `s^{-1} l_i(sx..) = ± N_i δ(x..)`.
pub fn derived_bracket_explicit(bracket: &MultiOp, delta: &MultiOp, i: usize) -> Result<MultiOp> {
    require_delta(bracket, delta)?;
    let basis = bracket.basis_arc().clone();
    let shifted = Arc::new(shifted_degrees(&basis, Shift::Raise));
    let nd = n_i_d(bracket, delta, i)?;
    MultiOp::from_fn(shifted, i, 2 - i as i64, |t| {
        let degrees: Vec<i64> = t.iter().map(|&x| basis.degree(x)).collect();
        nd.eval_basis(t).scaled(&explicit_sign(&degrees))
    })
}

/// Tuples where the two constructions of `l_i` differ.
pub fn check_bracket_routes(
    bracket: &MultiOp,
    delta: &MultiOp,
    i: usize,
) -> Result<Vec<Violation>> {
    let a = derived_bracket(bracket, delta, i)?;
    let b = derived_bracket_explicit(bracket, delta, i)?;
    Ok(a.sub(&b)?
        .constants()
        .map(|(t, e)| {
            Violation::new(t.to_vec(), Residual::Vector(e.clone())).with_scope("i", i as i64)
        })
        .collect())
}

/// `l_i = derived_bracket(δ_{i-1}, i)` for `1 <= i <= m + 1`.
pub fn build_sh_structure(
    bracket: &MultiOp,
    fam: &DeformationFamily,
) -> Result<ShLeibnizStructure> {
    if !bracket.same_space(&fam.deltas[0]) {
        return Err(Error::BasisMismatch);
    }
    let ops = fam
        .deltas()
        .iter()
        .enumerate()
        .map(|(k, d)| derived_bracket(bracket, d, k + 1))
        .collect::<Result<Vec<_>>>()?;
    let shifted = Arc::new(shifted_degrees(bracket.basis(), Shift::Raise));
    // rebind so all ops share one Arc
    let ops = ops
        .into_iter()
        .map(|op| op.transport(shifted.clone(), op.degree()))
        .collect::<Result<Vec<_>>>()?;
    ShLeibnizStructure::new(shifted, ops)
}

/// `∂_i = N_i δ_{i-1}` on `V`.
pub fn partial_i(bracket: &MultiOp, delta: &MultiOp, i: usize) -> Result<MultiOp> {
    require_delta(bracket, delta)?;
    n_i_d(bracket, delta, i)
}

/// `s^{-1} l (s (x) ... (x) s)`, transporting an operation on `sV` back to `V`
/// through the signed tensor evaluator.
pub fn unshift_operation(l: &MultiOp, basis: Arc<GradedBasis>) -> Result<MultiOp> {
    let i = l.arity();
    let raises: Vec<&dyn LetterMap> = vec![&Shift::Raise; i];
    let b = basis.clone();
    MultiOp::from_fn(basis, i, l.degree() + i as i64 - 1, |t| {
        let word: Vec<Letter> = t.iter().map(|&x| Letter::new(x, 0)).collect();
        let mut out = Element::zero();
        for (w, c) in apply_tensor_map(&b, &raises, &word, &Scalar::one()) {
            let indices: Vec<usize> = w.iter().map(|l| l.index).collect();
            out.add_scaled(&l.eval_basis(&indices), &c);
        }
        out
    })
}

/// Tuples where `N_i δ_{i-1}` differs from `s^{-1} l_i s^{(x) i}`.
pub fn check_partial_routes(
    bracket: &MultiOp,
    delta: &MultiOp,
    i: usize,
) -> Result<Vec<Violation>> {
    let direct = partial_i(bracket, delta, i)?;
    let via_l = unshift_operation(
        &derived_bracket(bracket, delta, i)?,
        bracket.basis_arc().clone(),
    )?;
    Ok(direct
        .sub(&via_l)?
        .constants()
        .map(|(t, e)| {
            Violation::new(t.to_vec(), Residual::Vector(e.clone())).with_scope("i", i as i64)
        })
        .collect())
}

/// The codifferential `∂ = ∑_i ∂_i` as a degree-one coderivation.
pub fn codifferential(bracket: &MultiOp, fam: &DeformationFamily) -> Result<CoderivationSpec> {
    let mut spec = CoderivationSpec::zero(bracket.basis_arc().clone(), 1);
    for (k, d) in fam.deltas().iter().enumerate() {
        spec.insert(partial_i(bracket, d, k + 1)?)?;
    }
    Ok(spec)
}

/// Checks `∂∂ = 0` on every word of length at most `max_len`. Each violation
/// carries its word length and the matching `Const = length + 1`.
pub fn check_codifferential(
    bracket: &MultiOp,
    fam: &DeformationFamily,
    max_len: usize,
    mode: Mode,
) -> Result<Vec<Violation>> {
    let d = codifferential(bracket, fam)?;
    let square = Composed(&d, &d);
    Ok(check_vanishes(&square, bracket.basis(), max_len, mode)
        .into_iter()
        .map(|v| {
            let len = v.tuple.len() as i64;
            v.with_scope("const", len + 1)
        })
        .collect())
}

// Sign factors of the generalized Jacobi identity. Degrees are in sV.

/// `chi(sigma)` on the first `k - 1` letters.
pub fn jacobi_chi(sigma: &Permutation, degrees: &[i64]) -> Scalar {
    anti_koszul_sign(sigma, degrees).expect("unshuffle size matches the letters it permutes")
}

/// `(-1)^{(k+1-j)(j-1)}`
pub fn jacobi_block_sign(k: usize, j: usize) -> Scalar {
    Scalar::sign(((k + 1 - j) * (j - 1)) as i64)
}

/// `(-1)^{j (x_s(1) + ... + x_s(k-j))}`: `l_j` moving past the letters that
/// stay in front of it.
pub fn jacobi_prefix_sign(j: usize, prefix_degree: i64) -> Scalar {
    Scalar::sign(j as i64 * prefix_degree)
}

/// Memoized `(p,q)`-unshuffles.
#[derive(Default)]
struct UnshuffleCache(HashMap<(usize, usize), Vec<Permutation>>);

impl UnshuffleCache {
    fn get(&mut self, p: usize, q: usize) -> &[Permutation] {
        self.0.entry((p, q)).or_insert_with(|| unshuffles(p, q))
    }
}

/// The left side of the identity with outer sum `i + j = Const`, on a tuple
/// of length `Const - 1`:
/// `∑_{i+j=Const} ∑_{k=j}^{Const-1} ∑_σ chi(σ) (-1)^{(k+1-j)(j-1)}
///  (-1)^{j(x_σ(1)+..+x_σ(k-j))}
///  l_i(x_σ(1), .., x_σ(k-j), l_j(x_σ(k+1-j), .., x_σ(k-1), x_k), x_{k+1}, .., x_{Const-1})`,
/// `σ` ranging over the `(k-j, j-1)`-unshuffles of the first `k - 1` letters
/// and `x_k` pinned.
pub fn jacobi_residual(structure: &ShLeibnizStructure, tuple: &[usize]) -> Element {
    jacobi_residual_cached(structure, tuple, &mut UnshuffleCache::default())
}

fn jacobi_residual_cached(
    structure: &ShLeibnizStructure,
    tuple: &[usize],
    cache: &mut UnshuffleCache,
) -> Element {
    let basis = structure.shifted_basis();
    let n = tuple.len();
    let c = n + 1;
    let mut out = Element::zero();
    for j in 1..c {
        let i = c - j;
        let (Some(li), Some(lj)) = (structure.op(i), structure.op(j)) else {
            continue;
        };
        if li.is_zero() || lj.is_zero() {
            continue;
        }
        for k in j..=n {
            let head = &tuple[..k - 1];
            let degrees: Vec<i64> = head.iter().map(|&x| basis.degree(x)).collect();
            let block = jacobi_block_sign(k, j);
            for sigma in cache.get(k - j, j - 1) {
                let permuted = sigma.permute(head);
                let (before, inside) = permuted.split_at(k - j);
                let mut inner_args = inside.to_vec();
                inner_args.push(tuple[k - 1]);
                let Some(inner) = lj.on_basis(&inner_args) else {
                    continue;
                };
                let sign = jacobi_chi(sigma, &degrees)
                    * block.clone()
                    * jacobi_prefix_sign(j, basis.word_degree(before));
                let mut outer_args = before.to_vec();
                outer_args.push(0);
                outer_args.extend_from_slice(&tuple[k..]);
                out.add_scaled(&li.apply_with_slot(&outer_args, k - j, inner), &sign);
            }
        }
    }
    out
}

/// Checks the generalized Jacobi identity for every `Const` in
/// `2..=max_const` on every basis tuple of length `Const - 1` over `sV`.
pub fn check_sh_leibniz(
    structure: &ShLeibnizStructure,
    max_const: usize,
    mode: Mode,
) -> Result<Vec<Violation>> {
    if max_const < 2 {
        return Err(Error::Scope(format!(
            "Const starts at 2, got bound {max_const}"
        )));
    }
    let mut cache = UnshuffleCache::default();
    let mut out = Vec::new();
    for c in 2..=max_const {
        for t in structure.shifted_basis().tuples(c - 1) {
            let res = jacobi_residual_cached(structure, &t, &mut cache);
            if !res.is_zero() {
                out.push(Violation::new(t, Residual::Vector(res)).with_scope("const", c as i64));
                if mode.done(&out) {
                    return Ok(out);
                }
            }
        }
    }
    Ok(out)
}

/// `Const` values up to `max_const` for which no pair of non-zero brackets
/// `l_i, l_j` with `i + j = Const` exists, so the identity holds trivially.
pub fn vacuous_consts(structure: &ShLeibnizStructure, max_const: usize) -> Vec<usize> {
    let live = |i: usize| structure.op(i).is_some_and(|op| !op.is_zero());
    (2..=max_const)
        .filter(|&c| !(1..c).any(|j| live(j) && live(c - j)))
        .collect()
}

/// Checks `N_{i+j-1}[D,D'] = (N_i D, N_j D')` on all basis tuples.
pub fn check_key_lemma(
    bracket: &MultiOp,
    d: &MultiOp,
    d2: &MultiOp,
    i: usize,
    j: usize,
) -> Result<Vec<Violation>> {
    for (name, op) in [("D", d), ("D'", d2)] {
        if !check_derivation(op, bracket)?.is_empty() {
            return Err(Error::Precondition(format!(
                "{name} is not a derivation of the bracket"
            )));
        }
    }
    let lhs = n_i_d(bracket, &d.commutator(d2)?, i + j - 1)?;
    let rhs = hom_bracket(&n_i_d(bracket, d, i)?, &n_i_d(bracket, d2, j)?)?;
    Ok(lhs
        .sub(&rhs)?
        .constants()
        .map(|(t, e)| {
            Violation::new(t.to_vec(), Residual::Vector(e.clone()))
                .with_scope("i", i as i64)
                .with_scope("j", j as i64)
        })
        .collect())
}

/// A spanning set of the derivations of `bracket` across every degree that
/// a non-zero map between basis vectors can have.
pub fn derivation_spanning_set(bracket: &MultiOp) -> Result<Vec<MultiOp>> {
    let degrees = bracket.basis().degrees();
    let mut shifts: Vec<i64> = degrees
        .iter()
        .flat_map(|a| degrees.iter().map(move |b| b - a))
        .collect();
    shifts.sort_unstable();
    shifts.dedup();
    let mut out = Vec::new();
    for s in shifts {
        out.extend(derivation_basis(bracket, s)?);
    }
    Ok(out)
}

/// With `∂_2 = N_2 δ_1` and `b = (∂_2, -)`: checks
/// `(∂_2, N_i D) = N_{i+1}[δ_1, D]` and `b(b(N_i D)) = 0` for each `D` and
/// `i <= i_max`. Scope entries name the derivation by its position.
pub fn leibniz_cohomology_check(
    bracket: &MultiOp,
    delta1: &MultiOp,
    derivations: &[MultiOp],
    i_max: usize,
) -> Result<Vec<Violation>> {
    require_delta(bracket, delta1)?;
    if !check_derivation(delta1, bracket)?.is_empty() {
        return Err(Error::Precondition("δ_1 is not a derivation".into()));
    }
    let d2 = n_i_d(bracket, delta1, 2)?;
    let mut out = Vec::new();
    let mut push = |op: MultiOp, tag: i64, i: usize, which: i64| {
        for (t, e) in op.constants() {
            out.push(
                Violation::new(t.to_vec(), Residual::Vector(e.clone()))
                    .with_scope("derivation", tag)
                    .with_scope("i", i as i64)
                    .with_scope("identity", which),
            );
        }
    };
    for (tag, d) in derivations.iter().enumerate() {
        for i in 1..=i_max {
            let nd = n_i_d(bracket, d, i)?;
            let b_nd = hom_bracket(&d2, &nd)?;
            let expected = n_i_d(bracket, &delta1.commutator(d)?, i + 1)?;
            push(b_nd.sub(&expected)?, tag as i64, i, 1);
            push(hom_bracket(&d2, &b_nd)?, tag as i64, i, 2);
        }
    }
    Ok(out)
}

/// Adjoint case: for every basis vector `x`,
/// `(∂_2, N_i ad x) = N_{i+1} ad(δ_1 x)`, so `N_i ad(V)` is closed under `b`.
pub fn check_adjoint_subcomplex(
    bracket: &MultiOp,
    delta1: &MultiOp,
    i_max: usize,
) -> Result<Vec<Violation>> {
    require_delta(bracket, delta1)?;
    let d2 = n_i_d(bracket, delta1, 2)?;
    let mut out = Vec::new();
    for x in 0..bracket.basis().dim() {
        let ad_x = left_multiplication(bracket, &Element::basis_vector(x))?;
        let dx = delta1.eval_basis(&[x]);
        let ad_dx = if dx.is_zero() {
            MultiOp::zero(bracket.basis_arc().clone(), 1, ad_x.degree() + 1)
        } else {
            left_multiplication(bracket, &dx)?
        };
        for i in 1..=i_max {
            let lhs = hom_bracket(&d2, &n_i_d(bracket, &ad_x, i)?)?;
            let rhs = n_i_d(bracket, &ad_dx, i + 1)?;
            for (t, e) in lhs.sub(&rhs)?.constants() {
                out.push(
                    Violation::new(t.to_vec(), Residual::Vector(e.clone()))
                        .with_scope("x", x as i64)
                        .with_scope("i", i as i64),
                );
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::leibniz::check_leibniz_identity;

    fn l2b() -> (MultiOp, MultiOp) {
        let basis = Arc::new(GradedBasis::new([("e", 0), ("c", 0), ("b", 1)]).unwrap());
        let br = MultiOp::new(
            basis.clone(),
            2,
            0,
            [(vec![0, 0], Element::basis_vector(1))],
        )
        .unwrap();
        let d = MultiOp::new(basis, 1, 1, [(vec![0], Element::basis_vector(2))]).unwrap();
        (br, d)
    }

    /// `[e,x] = x` for `x` in a degree-one line: a dg-free Lie example where
    /// `δ = ad p` style maps give non-trivial `l_2`.
    fn hemi() -> MultiOp {
        let basis = Arc::new(GradedBasis::new([("e", 0), ("f", 0), ("p", 1), ("q", 1)]).unwrap());
        let v = |i| Element::basis_vector(i);
        let m = |i| Element::term(i, -Scalar::one());
        MultiOp::new(
            basis,
            2,
            0,
            [
                (vec![0, 1], v(1)),
                (vec![1, 0], m(1)),
                (vec![0, 2], v(2)),
                (vec![2, 0], m(2)),
                (vec![0, 3], v(3)),
            ],
        )
        .unwrap()
    }

    #[test]
    fn prefactors() {
        let got: Vec<Scalar> = (1..=5).map(bracket_prefactor).collect();
        let want: Vec<Scalar> = [1, 1, -1, -1, 1]
            .iter()
            .map(|&x| Scalar::from_int(x))
            .collect();
        assert_eq!(got, want);
    }

    #[test]
    fn explicit_sign_parities() {
        // i = 2: (-1)^{x1}; i = 3: (-1)^{x2}
        assert_eq!(explicit_sign(&[1, 0]), -Scalar::one());
        assert_eq!(explicit_sign(&[0, 1]), Scalar::one());
        assert_eq!(explicit_sign(&[1, 0, 0]), Scalar::one());
        assert_eq!(explicit_sign(&[0, 1, 0]), -Scalar::one());
        assert_eq!(explicit_sign(&[0, 0, 1, 0]), -Scalar::one());
        assert_eq!(explicit_sign(&[1, 1, 1, 0]), Scalar::one());
    }

    #[test]
    fn jacobi_sign_factors() {
        assert_eq!(jacobi_block_sign(1, 1), Scalar::one());
        assert_eq!(jacobi_block_sign(2, 2), -Scalar::one());
        assert_eq!(jacobi_block_sign(3, 2), Scalar::one());
        assert_eq!(jacobi_block_sign(3, 3), Scalar::one());
        assert_eq!(jacobi_block_sign(4, 2), -Scalar::one());
        assert_eq!(jacobi_prefix_sign(1, 3), -Scalar::one());
        assert_eq!(jacobi_prefix_sign(2, 3), Scalar::one());
        let swap = Permutation::transposition(2, 1, 2).unwrap();
        assert_eq!(jacobi_chi(&swap, &[1, 1]), Scalar::one());
        assert_eq!(jacobi_chi(&swap, &[0, 1]), -Scalar::one());
    }

    #[test]
    fn routes_agree_on_small_examples() {
        let (br, d) = l2b();
        for i in 1..=5 {
            assert!(
                check_bracket_routes(&br, &d, i).unwrap().is_empty(),
                "i = {i}"
            );
            assert!(
                check_partial_routes(&br, &d, i).unwrap().is_empty(),
                "i = {i}"
            );
        }
        let h = hemi();
        let delta = MultiOp::new(
            h.basis_arc().clone(),
            1,
            1,
            [(vec![0], Element::basis_vector(2))],
        )
        .unwrap();
        for i in 1..=5 {
            assert!(
                check_bracket_routes(&h, &delta, i).unwrap().is_empty(),
                "i = {i}"
            );
            assert!(
                check_partial_routes(&h, &delta, i).unwrap().is_empty(),
                "i = {i}"
            );
        }
    }

    #[test]
    fn first_brackets() {
        let (br, d) = l2b();
        let l1 = derived_bracket(&br, &d, 1).unwrap();
        assert_eq!(l1.eval_basis(&[0]), Element::basis_vector(2));
        assert_eq!(l1.degree(), 1);
        // l_2(se, se) = s{δe, e} = s{b, e} = 0
        assert!(derived_bracket(&br, &d, 2).unwrap().is_zero());
        let h = hemi();
        let delta = MultiOp::new(
            h.basis_arc().clone(),
            1,
            1,
            [(vec![1], Element::basis_vector(2))],
        )
        .unwrap();
        // l_2(sf, se) = (-1)^0 s{δf, e} = s{p, e} = -sp
        let l2 = derived_bracket(&h, &delta, 2).unwrap();
        assert_eq!(l2.eval_basis(&[1, 0]), Element::term(2, -Scalar::one()));
    }

    #[test]
    fn abelian_structures_pass() {
        let basis = Arc::new(GradedBasis::new([("x", 0), ("y", 1), ("z", 2)]).unwrap());
        let zero = MultiOp::zero(basis.clone(), 2, 0);
        let d0 = MultiOp::new(basis, 1, 1, [(vec![0], Element::basis_vector(1))]).unwrap();
        let fam = DeformationFamily::new(vec![d0.clone(), d0]).unwrap();
        let sh = build_sh_structure(&zero, &fam).unwrap();
        assert!(sh.op(2).unwrap().is_zero());
        assert!(check_sh_leibniz(&sh, 6, Mode::Exhaustive)
            .unwrap()
            .is_empty());
        assert!(check_codifferential(&zero, &fam, 5, Mode::Exhaustive)
            .unwrap()
            .is_empty());
        assert_eq!(vacuous_consts(&sh, 4), vec![3, 4]);
    }

    #[test]
    fn binary_derived_bracket_is_leibniz() {
        let (br, d) = l2b();
        assert!(
            check_leibniz_identity(&derived_bracket(&br, &d, 2).unwrap())
                .unwrap()
                .is_empty()
        );
    }

    #[test]
    fn key_lemma_small() {
        let (br, d) = l2b();
        let ders = derivation_spanning_set(&br).unwrap();
        assert!(!ders.is_empty());
        for a in &ders {
            for b in &ders {
                for (i, j) in [(1, 1), (1, 2), (2, 1), (2, 2)] {
                    assert!(check_key_lemma(&br, a, b, i, j).unwrap().is_empty());
                }
            }
        }
        let not_der = MultiOp::new(
            br.basis_arc().clone(),
            1,
            0,
            [(vec![1], Element::basis_vector(0))],
        )
        .unwrap();
        assert!(matches!(
            check_key_lemma(&br, &not_der, &d, 1, 1),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn square_zero_failure_is_caught_by_both_routes() {
        let basis = Arc::new(GradedBasis::new([("x", 0), ("y", 1), ("z", 2)]).unwrap());
        let zero = MultiOp::zero(basis.clone(), 2, 0);
        let d0 = MultiOp::new(
            basis,
            1,
            1,
            [
                (vec![0], Element::basis_vector(1)),
                (vec![1], Element::basis_vector(2)),
            ],
        )
        .unwrap();
        let fam = DeformationFamily::trivial(d0).unwrap();
        let sh = build_sh_structure(&zero, &fam).unwrap();
        let a = check_sh_leibniz(&sh, 3, Mode::Exhaustive).unwrap();
        let b = check_codifferential(&zero, &fam, 2, Mode::Exhaustive).unwrap();
        assert_eq!(a[0].scope_value("const"), Some(2));
        assert_eq!(b[0].scope_value("const"), Some(2));
        assert_eq!(a[0].tuple, vec![0]);
        assert_eq!(b[0].tuple, vec![0]);
    }
}
