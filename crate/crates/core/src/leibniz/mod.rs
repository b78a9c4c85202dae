//! Structure-constant operations and the identities of (dg) Leibniz algebras.
//!
//! Everything here uses the left convention:
//! `{x,{y,z}} = {{x,y},z} + (-1)^{|x||y|} {y,{x,z}}`.

mod multiop;

use std::sync::Arc;

pub use multiop::{render_tuple, MultiOp};

use crate::check::{Mode, Residual, Violation};
use crate::error::{Error, Result};
use crate::graded::{Element, GradedBasis, Scalar};

/// A graded Leibniz algebra: a degree-0 bracket satisfying the left Leibniz
/// identity.
#[derive(Debug, Clone)]
pub struct LeibnizAlgebra {
    bracket: MultiOp,
}

impl LeibnizAlgebra {
    pub fn new(bracket: MultiOp) -> Result<Self> {
        let violations = check_leibniz_identity(&bracket)?;
        if let Some(v) = violations.first() {
            return Err(Error::Precondition(format!(
                "Leibniz identity fails at ({}) with residual {}",
                render_tuple(bracket.basis(), &v.tuple),
                v.residual.render(bracket.basis())
            )));
        }
        Ok(LeibnizAlgebra { bracket })
    }

    pub fn bracket(&self) -> &MultiOp {
        &self.bracket
    }

    pub fn basis(&self) -> &GradedBasis {
        self.bracket.basis()
    }

    pub fn basis_arc(&self) -> &Arc<GradedBasis> {
        self.bracket.basis_arc()
    }
}

/// A Leibniz algebra with a square-zero degree-one derivation.
#[derive(Debug, Clone)]
pub struct DgLeibnizAlgebra {
    algebra: LeibnizAlgebra,
    differential: MultiOp,
}

impl DgLeibnizAlgebra {
    pub fn new(algebra: LeibnizAlgebra, differential: MultiOp) -> Result<Self> {
        let verdict = check_differential(&differential, algebra.bracket())?;
        if !verdict.passes() {
            return Err(Error::Precondition(format!(
                "not a differential: {}",
                verdict.summary()
            )));
        }
        Ok(DgLeibnizAlgebra {
            algebra,
            differential,
        })
    }

    pub fn algebra(&self) -> &LeibnizAlgebra {
        &self.algebra
    }

    pub fn differential(&self) -> &MultiOp {
        &self.differential
    }
}

fn require_bracket(bracket: &MultiOp) -> Result<()> {
    if bracket.arity() != 2 {
        return Err(Error::ArityMismatch {
            expected: 2,
            got: bracket.arity(),
        });
    }
    if bracket.degree() != 0 {
        return Err(Error::Degree(format!(
            "bracket must have degree 0, has {}",
            bracket.degree()
        )));
    }
    Ok(())
}

fn require_unary(op: &MultiOp) -> Result<()> {
    if op.arity() != 1 {
        return Err(Error::ArityMismatch {
            expected: 1,
            got: op.arity(),
        });
    }
    Ok(())
}

fn bracket2(bracket: &MultiOp, x: &Element, y: &Element) -> Element {
    bracket.apply_unchecked(&[x.clone(), y.clone()])
}

/// Residual `{x,{y,z}} - {{x,y},z} - (-1)^{|x||y|}{y,{x,z}}` on every basis
/// triple.
pub fn check_leibniz_identity(bracket: &MultiOp) -> Result<Vec<Violation>> {
    check_leibniz_identity_with(bracket, Mode::Exhaustive)
}

pub fn check_leibniz_identity_with(bracket: &MultiOp, mode: Mode) -> Result<Vec<Violation>> {
    require_bracket(bracket)?;
    let basis = bracket.basis();
    let mut out = Vec::new();
    for t in basis.tuples(3) {
        let (x, y, z) = (t[0], t[1], t[2]);
        let yz = bracket.eval_basis(&[y, z]);
        let xz = bracket.eval_basis(&[x, z]);
        let xy = bracket.eval_basis(&[x, y]);
        let lhs = bracket.apply_with_slot(&[x, 0], 1, &yz);
        let mut res = lhs.sub(&bracket.apply_with_slot(&[0, z], 0, &xy));
        let sign = Scalar::sign(basis.degree(x) * basis.degree(y));
        res.add_scaled(&bracket.apply_with_slot(&[y, 0], 1, &xz), &-sign);
        if !res.is_zero() {
            out.push(Violation::new(t, Residual::Vector(res)));
            if mode.done(&out) {
                break;
            }
        }
    }
    Ok(out)
}

/// Residual `D{x,y} - {Dx,y} - (-1)^{|x||D|}{x,Dy}` on every basis pair.
pub fn check_derivation(d: &MultiOp, bracket: &MultiOp) -> Result<Vec<Violation>> {
    check_derivation_with(d, bracket, Mode::Exhaustive)
}

pub fn check_derivation_with(d: &MultiOp, bracket: &MultiOp, mode: Mode) -> Result<Vec<Violation>> {
    require_unary(d)?;
    if bracket.arity() != 2 {
        return Err(Error::ArityMismatch {
            expected: 2,
            got: bracket.arity(),
        });
    }
    if !d.same_space(bracket) {
        return Err(Error::BasisMismatch);
    }
    let basis = bracket.basis();
    let mut out = Vec::new();
    for t in basis.tuples(2) {
        let res = derivation_residual(d, bracket, t[0], t[1]);
        if !res.is_zero() {
            out.push(Violation::new(t, Residual::Vector(res)));
            if mode.done(&out) {
                break;
            }
        }
    }
    Ok(out)
}

pub(crate) fn derivation_residual(d: &MultiOp, bracket: &MultiOp, x: usize, y: usize) -> Element {
    let basis = bracket.basis();
    let xy = bracket.eval_basis(&[x, y]);
    let mut res = d.apply_unchecked(&[xy]);
    res = res.sub(&bracket.apply_with_slot(&[0, y], 0, &d.eval_basis(&[x])));
    let sign = Scalar::sign(basis.degree(x) * d.degree());
    res.add_scaled(
        &bracket.apply_with_slot(&[x, 0], 1, &d.eval_basis(&[y])),
        &-sign,
    );
    res
}

/// Outcome of [`check_differential`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DifferentialVerdict {
    pub degree: i64,
    pub derivation_violations: Vec<Violation>,
    /// Basis vectors with `D(D(v)) != 0`.
    pub square_violations: Vec<Violation>,
}

impl DifferentialVerdict {
    pub fn passes(&self) -> bool {
        self.degree == 1
            && self.derivation_violations.is_empty()
            && self.square_violations.is_empty()
    }

    pub fn summary(&self) -> String {
        let mut parts = Vec::new();
        if self.degree != 1 {
            parts.push(format!("degree {} instead of 1", self.degree));
        }
        if !self.derivation_violations.is_empty() {
            parts.push(format!(
                "{} derivation violations",
                self.derivation_violations.len()
            ));
        }
        if !self.square_violations.is_empty() {
            parts.push(format!(
                "does not square to zero on {} basis vectors",
                self.square_violations.len()
            ));
        }
        if parts.is_empty() {
            "ok".into()
        } else {
            parts.join("; ")
        }
    }
}

/// A differential is a degree-one derivation of square zero.
pub fn check_differential(d: &MultiOp, bracket: &MultiOp) -> Result<DifferentialVerdict> {
    let derivation_violations = check_derivation(d, bracket)?;
    let square = d.compose(d)?;
    let square_violations = square
        .constants()
        .map(|(t, e)| Violation::new(t.to_vec(), Residual::Vector(e.clone())))
        .collect();
    Ok(DifferentialVerdict {
        degree: d.degree(),
        derivation_violations,
        square_violations,
    })
}

/// The left-nested bracket `N_i(x_1..x_i) = {...{{x_1,x_2},x_3},...,x_i}`;
/// `N_1` is the identity.
pub fn nary_bracket(bracket: &MultiOp, i: usize) -> Result<MultiOp> {
    let id = MultiOp::identity(bracket.basis_arc().clone());
    n_i_d(bracket, &id, i)
}

/// `N_i D = N_i (D (x) 1 (x) ... (x) 1)`. `D` sits in the leftmost slot so
/// no Koszul sign arises.
pub fn n_i_d(bracket: &MultiOp, d: &MultiOp, i: usize) -> Result<MultiOp> {
    require_bracket(bracket)?;
    require_unary(d)?;
    if !d.same_space(bracket) {
        return Err(Error::BasisMismatch);
    }
    if i == 0 {
        return Err(Error::Malformed("N_i needs i >= 1".into()));
    }
    let basis = bracket.basis_arc().clone();
    // current[t] = N_k D(t) for tuples t of length k
    let mut current: Vec<(Vec<usize>, Element)> = d
        .constants()
        .map(|(t, e)| (t.to_vec(), e.clone()))
        .collect();
    for _ in 1..i {
        let mut next = Vec::new();
        for (t, v) in &current {
            for y in 0..basis.dim() {
                let image = bracket.apply_with_slot(&[0, y], 0, v);
                if !image.is_zero() {
                    let mut t2 = t.clone();
                    t2.push(y);
                    next.push((t2, image));
                }
            }
        }
        current = next;
    }
    MultiOp::new(basis, i, d.degree(), current)
}

/// Left-nested bracket of arbitrary elements.
pub(crate) fn nest(bracket: &MultiOp, items: &[Element]) -> Element {
    let mut acc = items[0].clone();
    for y in &items[1..] {
        acc = bracket2(bracket, &acc, y);
    }
    acc
}

/// Rearrangement identity for `n >= 1`:
/// `N_{n+2}(A,B,y_1..y_n) = -(-1)^{AB} {B, N_{n+1}(A,y_1..y_n)}
///   + sum_a (-1)^{B(y_1+..+y_{a-1})} N_{n+1}(A,y_1..{B,y_a}..y_n)`.
///
/// Each sample is a basis tuple `(A, B, y_1, ..., y_n)`.
pub fn check_rearrangement(
    bracket: &MultiOp,
    samples: impl IntoIterator<Item = Vec<usize>>,
) -> Result<Vec<Violation>> {
    require_bracket(bracket)?;
    let basis = bracket.basis();
    let mut out = Vec::new();
    for t in samples {
        if t.len() < 3 {
            return Err(Error::Malformed(format!(
                "rearrangement samples need (A, B, y_1..y_n) with n >= 1, got {} entries",
                t.len()
            )));
        }
        let res = rearrangement_residual(bracket, &t);
        if !res.is_zero() {
            out.push(
                Violation::new(t.clone(), Residual::Vector(res))
                    .with_scope("n", t.len() as i64 - 2),
            );
        }
    }
    let _ = basis;
    Ok(out)
}

/// Every basis tuple with `1 <= n <= max_n`.
pub fn check_rearrangement_exhaustive(bracket: &MultiOp, max_n: usize) -> Result<Vec<Violation>> {
    let basis = bracket.basis().clone();
    let samples = (1..=max_n).flat_map(|n| basis.tuples(n + 2).collect::<Vec<_>>());
    check_rearrangement(bracket, samples)
}

fn rearrangement_residual(bracket: &MultiOp, t: &[usize]) -> Element {
    let basis = bracket.basis();
    let elems: Vec<Element> = t.iter().map(|&i| Element::basis_vector(i)).collect();
    let (a, b, ys) = (t[0], t[1], &t[2..]);
    let lhs = nest(bracket, &elems);
    let mut with_a: Vec<Element> = vec![elems[0].clone()];
    with_a.extend(elems[2..].iter().cloned());
    let inner = nest(bracket, &with_a);
    let mut res = lhs;
    // + (-1)^{AB} {B, N(A, y..)}
    res.add_scaled(
        &bracket2(bracket, &elems[1], &inner),
        &Scalar::sign(basis.degree(a) * basis.degree(b)),
    );
    let mut passed = 0i64;
    for (pos, &y) in ys.iter().enumerate() {
        let mut items = with_a.clone();
        items[pos + 1] = bracket.eval_basis(&[b, y]);
        res.add_scaled(
            &nest(bracket, &items),
            &-Scalar::sign(basis.degree(b) * passed),
        );
        passed += basis.degree(y);
    }
    res
}

/// Checks `op(.., x_a, x_{a+1}, ..) = -(-1)^{|x_a||x_{a+1}|} op(.., x_{a+1}, x_a, ..)`
/// for every tuple drawn from `sub_basis` and every adjacent pair of slots.
pub fn check_skewsymmetry(op: &MultiOp, sub_basis: &[usize]) -> Result<Vec<Violation>> {
    if op.arity() < 2 {
        return Err(Error::Precondition("skewsymmetry needs arity >= 2".into()));
    }
    let basis = op.basis();
    let sub = GradedBasis::new(
        sub_basis
            .iter()
            .map(|&i| (basis.name(i).to_string(), basis.degree(i))),
    )?;
    let mut out = Vec::new();
    for local in sub.tuples(op.arity()) {
        let t: Vec<usize> = local.iter().map(|&k| sub_basis[k]).collect();
        for a in 0..op.arity() - 1 {
            let mut swapped = t.clone();
            swapped.swap(a, a + 1);
            let sign = Scalar::sign(basis.degree(t[a]) * basis.degree(t[a + 1]));
            let mut res = op.eval_basis(&t);
            res.add_scaled(&op.eval_basis(&swapped), &sign);
            if !res.is_zero() {
                out.push(
                    Violation::new(t.clone(), Residual::Vector(res))
                        .with_scope("slot", a as i64 + 1),
                );
            }
        }
    }
    Ok(out)
}

/// Tuples from `sub_basis` whose image leaves `span(sub_basis)`.
pub fn check_closure(op: &MultiOp, sub_basis: &[usize]) -> Vec<Violation> {
    let mut out = Vec::new();
    let local_dim = sub_basis.len();
    let mut idx = vec![0usize; op.arity()];
    if local_dim == 0 {
        return out;
    }
    loop {
        let t: Vec<usize> = idx.iter().map(|&k| sub_basis[k]).collect();
        let image = op.eval_basis(&t);
        let outside = Element::from_terms(
            image
                .terms()
                .filter(|(i, _)| !sub_basis.contains(i))
                .map(|(i, c)| (i, c.clone())),
        );
        if !outside.is_zero() {
            out.push(Violation::new(t, Residual::Vector(outside)));
        }
        let mut pos = idx.len();
        loop {
            if pos == 0 {
                return out;
            }
            pos -= 1;
            idx[pos] += 1;
            if idx[pos] < local_dim {
                break;
            }
            idx[pos] = 0;
        }
    }
}

/// A basis of the degree-`degree` derivations of `bracket`, obtained as the
/// null space of the linear derivation condition.
pub fn derivation_basis(bracket: &MultiOp, degree: i64) -> Result<Vec<MultiOp>> {
    require_bracket(bracket)?;
    let basis = bracket.basis_arc().clone();
    let n = basis.dim();
    let unknowns: Vec<(usize, usize)> = (0..n)
        .flat_map(|a| (0..n).map(move |b| (a, b)))
        .filter(|&(a, b)| basis.degree(b) == basis.degree(a) + degree)
        .collect();
    if unknowns.is_empty() {
        return Ok(Vec::new());
    }
    let single = |&(a, b): &(usize, usize)| -> MultiOp {
        MultiOp::new(
            basis.clone(),
            1,
            degree,
            [(vec![a], Element::basis_vector(b))],
        )
        .expect("single constant is homogeneous by construction")
    };
    // columns: residual coordinates of each elementary map
    let columns: Vec<Vec<(usize, Scalar)>> = unknowns
        .iter()
        .map(|u| {
            let d = single(u);
            let mut col = Vec::new();
            for x in 0..n {
                for y in 0..n {
                    for (k, c) in derivation_residual(&d, bracket, x, y).terms() {
                        col.push(((x * n + y) * n + k, c.clone()));
                    }
                }
            }
            col
        })
        .collect();
    let rows = n * n * n;
    let mut matrix = vec![vec![Scalar::zero(); unknowns.len()]; rows];
    for (j, col) in columns.iter().enumerate() {
        for (r, c) in col {
            matrix[*r][j] = c.clone();
        }
    }
    let kernel = crate::linalg::nullspace(matrix, unknowns.len());
    kernel
        .into_iter()
        .map(|v| {
            let mut op = MultiOp::zero(basis.clone(), 1, degree);
            for (u, c) in unknowns.iter().zip(&v) {
                op = op.add_scaled(&single(u), c)?;
            }
            Ok(op)
        })
        .collect()
}

/// Left multiplication `{x, -}`, a derivation of degree `|x|` for any left
/// Leibniz bracket.
pub fn left_multiplication(bracket: &MultiOp, x: &Element) -> Result<MultiOp> {
    require_bracket(bracket)?;
    let basis = bracket.basis_arc().clone();
    let degree = x.homogeneous_degree(&basis).ok_or_else(|| {
        Error::Degree("left multiplication needs a non-zero homogeneous element".into())
    })?;
    MultiOp::from_fn(basis, 1, degree, |t| {
        bracket.apply_with_slot(&[0, t[0]], 0, x)
    })
}
