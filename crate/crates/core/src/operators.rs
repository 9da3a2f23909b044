//! Invariant operators on polynomial forms.
//!
//! Sign conventions:
//!
//! ```text
//! d   =  sum_j d/dx_j (dx_j ^)        d* = - sum_j d/dx_j (dx_j _|)
//! x   = -sum_j x_j    (dx_j ^)        x* =   sum_j x_j    (dx_j _|)
//! ```
//!
//! with the contraction `dx_j _| dx_I = sum_k (-1)^(k-1) [j = i_k] dx_{I \ i_k}`.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::linalg::RatMatrix;
use crate::polyform::{FormError, FormIndex, GradedSlot, Monomial, MonomialBasis, PolyForm};
use crate::Rational;

/// `dx_j ^ dx_I` as a sorted index list and sign, `None` if `j` is in `I`.
fn wedge_index(idx: &FormIndex, j: usize) -> Option<(FormIndex, bool)> {
    let ind = idx.indices();
    match ind.binary_search(&j) {
        Ok(_) => None,
        Err(pos) => {
            let mut out = Vec::with_capacity(ind.len() + 1);
            out.extend_from_slice(&ind[..pos]);
            out.push(j);
            out.extend_from_slice(&ind[pos..]);
            Some((FormIndex::from_sorted(out), pos % 2 == 1))
        }
    }
}

/// `dx_j _| dx_I` as a sorted index list and sign, `None` if `j` is not in `I`.
fn contract_index(idx: &FormIndex, j: usize) -> Option<(FormIndex, bool)> {
    let ind = idx.indices();
    let pos = ind.binary_search(&j).ok()?;
    let mut out = ind.to_vec();
    out.remove(pos);
    Some((FormIndex::from_sorted(out), pos % 2 == 1))
}

fn signed(c: Rational, negate: bool) -> Rational {
    if negate {
        -c
    } else {
        c
    }
}

fn raise(alpha: &Monomial, j: usize) -> Monomial {
    let mut a = alpha.clone();
    a.0[j - 1] += 1;
    a
}

/// `d/dx_j x^alpha = alpha_j x^(alpha - e_j)`
fn lower(alpha: &Monomial, j: usize) -> Option<(Monomial, u32)> {
    let e = alpha.0[j - 1];
    if e == 0 {
        return None;
    }
    let mut a = alpha.clone();
    a.0[j - 1] -= 1;
    Some((a, e))
}

fn check_axis(p: &PolyForm, j: usize) {
    assert!(j >= 1 && j <= p.dim(), "axis {j} out of range 1..={}", p.dim());
}

/// Exterior multiplication `dx_j ^ P`.
pub fn wedge(j: usize, p: &PolyForm) -> PolyForm {
    check_axis(p, j);
    let mut out = PolyForm::zero(p.dim());
    for (a, idx, c) in p.terms() {
        if let Some((i2, neg)) = wedge_index(idx, j) {
            out.add_term(a.clone(), i2, signed(c.clone(), neg));
        }
    }
    out
}

/// Contraction `dx_j _| P`.
pub fn contract(j: usize, p: &PolyForm) -> PolyForm {
    check_axis(p, j);
    let mut out = PolyForm::zero(p.dim());
    for (a, idx, c) in p.terms() {
        if let Some((i2, neg)) = contract_index(idx, j) {
            out.add_term(a.clone(), i2, signed(c.clone(), neg));
        }
    }
    out
}

/// De Rham differential.
pub fn d(p: &PolyForm) -> PolyForm {
    let m = p.dim();
    let mut out = PolyForm::zero(m);
    for (a, idx, c) in p.terms() {
        for j in 1..=m {
            let Some((a2, e)) = lower(a, j) else { continue };
            let Some((i2, neg)) = wedge_index(idx, j) else { continue };
            out.add_term(a2, i2, signed(c * Rational::from_integer(e.into()), neg));
        }
    }
    out
}

/// Codifferential `d* = -sum_j d/dx_j (dx_j _|)`.
pub fn dstar(p: &PolyForm) -> PolyForm {
    let m = p.dim();
    let mut out = PolyForm::zero(m);
    for (a, idx, c) in p.terms() {
        for &j in idx.indices() {
            let Some((a2, e)) = lower(a, j) else { continue };
            let (i2, neg) = contract_index(idx, j).expect("j in I");
            out.add_term(a2, i2, signed(c * Rational::from_integer(e.into()), !neg));
        }
    }
    out
}

/// `x = -sum_j x_j (dx_j ^)`
pub fn x_op(p: &PolyForm) -> PolyForm {
    let m = p.dim();
    let mut out = PolyForm::zero(m);
    for (a, idx, c) in p.terms() {
        for j in 1..=m {
            let Some((i2, neg)) = wedge_index(idx, j) else { continue };
            out.add_term(raise(a, j), i2, signed(c.clone(), !neg));
        }
    }
    out
}

/// `x* = sum_j x_j (dx_j _|)`
pub fn xstar_op(p: &PolyForm) -> PolyForm {
    let m = p.dim();
    let mut out = PolyForm::zero(m);
    for (a, idx, c) in p.terms() {
        for &j in idx.indices() {
            let (i2, neg) = contract_index(idx, j).expect("j in I");
            out.add_term(raise(a, j), i2, signed(c.clone(), neg));
        }
    }
    out
}

/// Coefficient-wise Laplacian.
pub fn laplacian(p: &PolyForm) -> PolyForm {
    let m = p.dim();
    let mut out = PolyForm::zero(m);
    for (a, idx, c) in p.terms() {
        for j in 0..m {
            let e = a.0[j];
            if e >= 2 {
                let mut a2 = a.clone();
                a2.0[j] -= 2;
                out.add_term(a2, idx.clone(), c * Rational::from_integer((e * (e - 1)).into()));
            }
        }
    }
    out
}

/// `d + d*`
pub fn dirac(p: &PolyForm) -> PolyForm {
    d(p) + dstar(p)
}

/// Multiplication of every coefficient by `r^2`.
pub fn r2(p: &PolyForm) -> PolyForm {
    let m = p.dim();
    let mut out = PolyForm::zero(m);
    for (a, idx, c) in p.terms() {
        for j in 1..=m {
            let mut a2 = a.clone();
            a2.0[j - 1] += 2;
            out.add_term(a2, idx.clone(), c.clone());
        }
    }
    out
}

/// `E = sum_j x_j d/dx_j`
pub fn euler(p: &PolyForm) -> PolyForm {
    let m = p.dim();
    let mut out = PolyForm::zero(m);
    for (a, idx, c) in p.terms() {
        for j in 1..=m {
            if let Some((a2, e)) = lower(a, j) {
                out.add_term(raise(&a2, j), idx.clone(), c * Rational::from_integer(e.into()));
            }
        }
    }
    out
}

/// `E^ = sum_j (dx_j ^)(dx_j _|)`
pub fn skew_euler(p: &PolyForm) -> PolyForm {
    let m = p.dim();
    let mut out = PolyForm::zero(m);
    for j in 1..=m {
        out = out + wedge(j, &contract(j, p));
    }
    out
}

/// A letter of the invariant alphabet `{x, x*}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Letter {
    X,
    XStar,
}

impl Letter {
    pub fn apply(self, p: &PolyForm) -> PolyForm {
        match self {
            Letter::X => x_op(p),
            Letter::XStar => xstar_op(p),
        }
    }

    fn other(self) -> Letter {
        match self {
            Letter::X => Letter::XStar,
            Letter::XStar => Letter::X,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum WordError {
    #[error("word {0:?} repeats a letter; x^2 = (x*)^2 = 0")]
    Repeated(String),
    #[error("cannot parse word {0:?}")]
    Parse(String),
}

/// Alternating word over `{x, x*}`, written as an operator product: the
/// rightmost letter acts first, so `"x*x"` is `x* . x`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct OmegaWord {
    letters: Vec<Letter>,
}

impl OmegaWord {
    pub fn empty() -> Self {
        Self { letters: Vec::new() }
    }

    pub fn new(letters: Vec<Letter>) -> Result<Self, WordError> {
        let w = Self { letters };
        if w.letters.windows(2).any(|p| p[0] == p[1]) {
            return Err(WordError::Repeated(w.to_string()));
        }
        Ok(w)
    }

    /// Alternating word of the given length whose leftmost letter is `first`.
    pub fn alternating(first: Letter, len: usize) -> Self {
        let mut letters = Vec::with_capacity(len);
        let mut cur = first;
        for _ in 0..len {
            letters.push(cur);
            cur = cur.other();
        }
        Self { letters }
    }

    /// `(x x*)^p`
    pub fn xxstar_pow(p: usize) -> Self {
        Self::alternating(Letter::X, 2 * p)
    }

    /// `(x* x)^p`
    pub fn xstarx_pow(p: usize) -> Self {
        Self::alternating(Letter::XStar, 2 * p)
    }

    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn first(&self) -> Option<Letter> {
        self.letters.first().copied()
    }

    /// The letter that acts first.
    pub fn innermost(&self) -> Option<Letter> {
        self.letters.last().copied()
    }

    /// Net grade change: count of `x` minus count of `x*`.
    pub fn grade_shift(&self) -> i64 {
        self.letters
            .iter()
            .map(|l| if *l == Letter::X { 1 } else { -1 })
            .sum()
    }

    /// All alternating words of length `len` (one or two of them).
    pub fn all_of_length(len: usize) -> Vec<OmegaWord> {
        if len == 0 {
            vec![OmegaWord::empty()]
        } else {
            vec![
                Self::alternating(Letter::X, len),
                Self::alternating(Letter::XStar, len),
            ]
        }
    }

    pub fn apply(&self, p: &PolyForm) -> PolyForm {
        apply_word(&self.letters, p)
    }
}

/// Ordered by length, then by first letter with `x < x*`.
impl Ord for OmegaWord {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.letters
            .len()
            .cmp(&other.letters.len())
            .then_with(|| self.letters.cmp(&other.letters))
    }
}

impl PartialOrd for OmegaWord {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for OmegaWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for l in &self.letters {
            f.write_str(match l {
                Letter::X => "x",
                Letter::XStar => "x*",
            })?;
        }
        Ok(())
    }
}

impl FromStr for OmegaWord {
    type Err = WordError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut letters = Vec::new();
        let mut chars = s.trim().chars().peekable();
        while let Some(c) = chars.next() {
            if c != 'x' {
                return Err(WordError::Parse(s.to_string()));
            }
            if chars.peek() == Some(&'*') {
                chars.next();
                letters.push(Letter::XStar);
            } else {
                letters.push(Letter::X);
            }
        }
        OmegaWord::new(letters)
    }
}

/// Applies a letter sequence as an operator product (rightmost first).
/// Repeated letters are allowed and simply produce zero.
pub fn apply_word(letters: &[Letter], p: &PolyForm) -> PolyForm {
    let mut cur = p.clone();
    for l in letters.iter().rev() {
        if cur.is_zero() {
            break;
        }
        cur = l.apply(&cur);
    }
    cur
}

/// The operators available by name.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Operator {
    D,
    DStar,
    X,
    XStar,
    Laplacian,
    Dirac,
    Euler,
    SkewEuler,
    R2,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OperatorError {
    #[error("unknown operator {0:?}")]
    Unknown(String),
    #[error(transparent)]
    Form(#[from] FormError),
}

impl Operator {
    pub const ALL: [Operator; 9] = [
        Operator::D,
        Operator::DStar,
        Operator::X,
        Operator::XStar,
        Operator::Laplacian,
        Operator::Dirac,
        Operator::Euler,
        Operator::SkewEuler,
        Operator::R2,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Operator::D => "d",
            Operator::DStar => "dstar",
            Operator::X => "x",
            Operator::XStar => "xstar",
            Operator::Laplacian => "laplacian",
            Operator::Dirac => "dirac",
            Operator::Euler => "euler",
            Operator::SkewEuler => "skew_euler",
            Operator::R2 => "r2",
        }
    }

    pub fn apply(self, p: &PolyForm) -> PolyForm {
        match self {
            Operator::D => d(p),
            Operator::DStar => dstar(p),
            Operator::X => x_op(p),
            Operator::XStar => xstar_op(p),
            Operator::Laplacian => laplacian(p),
            Operator::Dirac => dirac(p),
            Operator::Euler => euler(p),
            Operator::SkewEuler => skew_euler(p),
            Operator::R2 => r2(p),
        }
    }

    /// `(grade shift, degree shift)` pairs of the homogeneous pieces.
    pub fn shifts(self) -> &'static [(i64, i64)] {
        match self {
            Operator::D => &[(1, -1)],
            Operator::DStar => &[(-1, -1)],
            Operator::X => &[(1, 1)],
            Operator::XStar => &[(-1, 1)],
            Operator::Laplacian => &[(0, -2)],
            Operator::Dirac => &[(-1, -1), (1, -1)],
            Operator::Euler | Operator::SkewEuler => &[(0, 0)],
            Operator::R2 => &[(0, 2)],
        }
    }

    /// Slots spanning the codomain of the operator restricted to `slot`.
    ///
    /// Grades outside `0..=m` are dropped. A negative degree is clamped to 0:
    /// the restricted map is zero there, and the zero matrix is still sized by
    /// that slot.
    pub fn target_slots(self, m: usize, slot: GradedSlot) -> Vec<GradedSlot> {
        self.shifts()
            .iter()
            .filter_map(|&(ds, dk)| {
                let s = slot.s as i64 + ds;
                let k = (slot.k as i64 + dk).max(0);
                (s >= 0 && s <= m as i64).then(|| GradedSlot::new(s as usize, k as usize))
            })
            .collect()
    }
}

impl fmt::Display for Operator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Operator {
    type Err = OperatorError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Operator::ALL
            .into_iter()
            .find(|op| op.name() == s)
            .ok_or_else(|| OperatorError::Unknown(s.to_string()))
    }
}

/// Matrix of `op` from the monomial basis of `P^s_k` to the monomial basis of
/// its target slot(s).
pub fn operator_matrix(op: Operator, slot: GradedSlot, m: usize) -> Result<RatMatrix, OperatorError> {
    let source = MonomialBasis::for_slot(m, slot.check(m)?)?;
    let target = MonomialBasis::for_slots(m, &op.target_slots(m, slot))?;
    operator_matrix_between(op, &source, &target)
}

pub(crate) fn operator_matrix_between(
    op: Operator,
    source: &MonomialBasis,
    target: &MonomialBasis,
) -> Result<RatMatrix, OperatorError> {
    let columns: Vec<_> = (0..source.len())
        .map(|i| {
            let img = op.apply(&source.element(i));
            target
                .coords(&img)
                .expect("operator image lies in its target slots")
        })
        .collect();
    Ok(RatMatrix::from_columns(target.len(), &columns).expect("coordinates in range"))
}

/// `{A, B} = AB + BA` applied to `p`.
pub fn anticommutator(
    a: impl Fn(&PolyForm) -> PolyForm,
    b: impl Fn(&PolyForm) -> PolyForm,
    p: &PolyForm,
) -> PolyForm {
    a(&b(p)) + b(&a(p))
}

/// Multiplies every term of `p` by its own ambient dimension constant `m`.
pub fn times_dim(p: &PolyForm) -> PolyForm {
    p.scale(&Rational::from_integer((p.dim() as i64).into()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64) -> Rational {
        Rational::from_integer(n.into())
    }

    fn t(m: usize, alpha: &[u32], idx: &[usize], c: i64) -> PolyForm {
        PolyForm::term(m, alpha, idx, q(c)).unwrap()
    }

    #[test]
    fn wedge_examples() {
        assert!(wedge(1, &t(2, &[0, 0], &[1], 1)).is_zero());
        assert_eq!(wedge(1, &t(2, &[0, 0], &[2], 1)), t(2, &[0, 0], &[1, 2], 1));
        assert_eq!(wedge(2, &t(2, &[0, 0], &[1], 1)), t(2, &[0, 0], &[1, 2], -1));
    }

    #[test]
    fn contract_examples() {
        let dx12 = t(3, &[0, 0, 0], &[1, 2], 1);
        assert_eq!(contract(1, &dx12), t(3, &[0, 0, 0], &[2], 1));
        assert_eq!(contract(2, &dx12), t(3, &[0, 0, 0], &[1], -1));
        assert!(contract(3, &dx12).is_zero());
    }

    #[test]
    fn d_examples() {
        assert_eq!(d(&t(2, &[1, 0], &[], 1)), t(2, &[0, 0], &[1], 1));
        assert_eq!(d(&t(2, &[1, 0], &[2], 1)), t(2, &[0, 0], &[1, 2], 1));
        assert_eq!(d(&t(2, &[0, 1], &[1], 1)), t(2, &[0, 0], &[1, 2], -1));
    }

    #[test]
    fn dstar_examples() {
        assert_eq!(dstar(&t(2, &[1, 0], &[1], 1)), t(2, &[0, 0], &[], -1));
        assert!(dstar(&t(2, &[0, 1], &[1], 1)).is_zero());
        assert_eq!(dstar(&t(2, &[1, 0], &[1, 2], 1)), t(2, &[0, 0], &[2], -1));
    }

    #[test]
    fn x_examples() {
        let one = PolyForm::constant(3, q(1));
        let expected = t(3, &[1, 0, 0], &[1], -1) + t(3, &[0, 1, 0], &[2], -1) + t(3, &[0, 0, 1], &[3], -1);
        assert_eq!(x_op(&one), expected);
        assert_eq!(xstar_op(&t(3, &[0, 0, 0], &[1], 1)), t(3, &[1, 0, 0], &[], 1));
        let f = t(3, &[1, 1, 0], &[], 3);
        let lhs = anticommutator(x_op, xstar_op, &f);
        assert_eq!(lhs, -r2(&f));
    }

    #[test]
    fn laplacian_dirac_r2() {
        assert_eq!(laplacian(&t(2, &[2, 0], &[2], 1)), t(2, &[0, 0], &[2], 2));
        assert!(dirac(&PolyForm::constant(3, q(7))).is_zero());
        let f = t(2, &[1, 0], &[], 1);
        assert_eq!(r2(&f), t(2, &[3, 0], &[], 1) + t(2, &[1, 2], &[], 1));
    }

    #[test]
    fn euler_examples() {
        let p = t(3, &[1, 1, 0], &[3], 1);
        assert_eq!(euler(&p), p.scale_int(2));
        assert_eq!(skew_euler(&p), p);
        assert!(skew_euler(&t(3, &[1, 1, 0], &[], 1)).is_zero());
    }

    #[test]
    fn words() {
        let p = t(3, &[1, 0, 0], &[2], 1);
        assert_eq!(apply_word(&[], &p), p);
        assert!(apply_word(&[Letter::X, Letter::X], &p).is_zero());
        let f = t(3, &[0, 1, 1], &[], 2);
        let sum = apply_word(&[Letter::X, Letter::XStar], &f) + apply_word(&[Letter::XStar, Letter::X], &f);
        assert_eq!(sum, -r2(&f));

        let w: OmegaWord = "x*x".parse().unwrap();
        assert_eq!(w.letters(), &[Letter::XStar, Letter::X]);
        assert_eq!(w.to_string(), "x*x");
        assert_eq!(w.innermost(), Some(Letter::X));
        assert_eq!(w.grade_shift(), 0);
        assert!("xx".parse::<OmegaWord>().is_err());
        assert!("y".parse::<OmegaWord>().is_err());
        assert_eq!("".parse::<OmegaWord>().unwrap(), OmegaWord::empty());
        let mut ws = [
            OmegaWord::xstarx_pow(1),
            OmegaWord::alternating(Letter::XStar, 1),
            OmegaWord::empty(),
            OmegaWord::xxstar_pow(1),
            OmegaWord::alternating(Letter::X, 1),
        ];
        ws.sort();
        let names: Vec<String> = ws.iter().map(ToString::to_string).collect();
        assert_eq!(names, ["", "x", "x*", "xx*", "x*x"]);
    }

    #[test]
    fn operator_matrix_examples() {
        let m = operator_matrix(Operator::D, GradedSlot::new(0, 0), 2).unwrap();
        assert_eq!((m.nrows(), m.ncols(), m.nnz()), (2, 1, 0));

        // dstar(x_i dx_j) = -delta_ij; columns are x2 dx1, x2 dx2, x1 dx1, x1 dx2
        let m = operator_matrix(Operator::DStar, GradedSlot::new(1, 1), 2).unwrap();
        assert_eq!((m.nrows(), m.ncols()), (1, 4));
        assert_eq!(m.rank(), 1);
        assert_eq!(m, RatMatrix::from_i64(&[&[0, -1, -1, 0]]));

        let m = operator_matrix(Operator::Euler, GradedSlot::new(1, 3), 3).unwrap();
        let n = m.ncols();
        let mut expected = RatMatrix::zeros(n, n);
        for i in 0..n {
            expected.set(i, i, q(3)).unwrap();
        }
        assert_eq!(m, expected);

        assert!(operator_matrix(Operator::D, GradedSlot::new(4, 0), 3).is_err());
        assert!("nabla".parse::<Operator>().is_err());
        for op in Operator::ALL {
            assert_eq!(op.name().parse::<Operator>().unwrap(), op);
        }
    }
}
