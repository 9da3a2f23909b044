//! Polynomial differential forms `sum_I P_I dx_I` with rational coefficients.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Neg, Sub};

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::Rational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FormError {
    #[error("form index {indices:?} is not strictly increasing")]
    NonIncreasingIndex { indices: Vec<usize> },
    #[error("form index {index} out of range 1..={m}")]
    IndexOutOfRange { index: usize, m: usize },
    #[error("exponent vector has length {found}, expected {expected}")]
    ExponentLength { expected: usize, found: usize },
    #[error("ambient dimensions differ: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },
    #[error("ambient dimension must be positive")]
    ZeroDimension,
    #[error("invalid slot (s={s}, k={k}) for m={m}")]
    InvalidSlot { m: usize, s: usize, k: usize },
    #[error("matrix is not orthogonal; Q^T Q - I = {defect:?}")]
    NotOrthogonal { defect: Vec<Vec<String>> },
    #[error("matrix must be {m}x{m}")]
    MatrixShape { m: usize },
    #[error("bad coefficient {0:?}")]
    BadCoefficient(String),
}

/// Exponent vector `alpha` of `x^alpha = x_1^{alpha_1} ... x_m^{alpha_m}`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Monomial(pub Vec<u32>);

impl Monomial {
    pub fn one(m: usize) -> Self {
        Monomial(vec![0; m])
    }

    pub fn degree(&self) -> usize {
        self.0.iter().map(|&a| a as usize).sum()
    }

    pub fn exponents(&self) -> &[u32] {
        &self.0
    }

    /// `alpha!`
    pub fn factorial_weight(&self) -> BigInt {
        self.0.iter().fold(BigInt::one(), |acc, &a| {
            (1..=a).fold(acc, |acc, i| acc * BigInt::from(i))
        })
    }

    /// All exponent vectors of total degree `k` in `m` variables, ascending.
    pub fn all_of_degree(m: usize, k: usize) -> Vec<Monomial> {
        fn rec(m: usize, k: usize, prefix: &mut Vec<u32>, out: &mut Vec<Monomial>) {
            if prefix.len() + 1 == m {
                prefix.push(k as u32);
                out.push(Monomial(prefix.clone()));
                prefix.pop();
                return;
            }
            for a in 0..=k {
                prefix.push(a as u32);
                rec(m, k - a, prefix, out);
                prefix.pop();
            }
        }
        let mut out = Vec::new();
        if m > 0 {
            rec(m, k, &mut Vec::with_capacity(m), &mut out);
        }
        out
    }
}

/// Strictly increasing list of 1-based axes, standing for `dx_{i_1} ^ ... ^ dx_{i_s}`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FormIndex(Vec<usize>);

impl FormIndex {
    pub fn new(indices: Vec<usize>, m: usize) -> Result<Self, FormError> {
        if let Some(&bad) = indices.iter().find(|&&i| i == 0 || i > m) {
            return Err(FormError::IndexOutOfRange { index: bad, m });
        }
        if indices.windows(2).any(|w| w[0] >= w[1]) {
            return Err(FormError::NonIncreasingIndex { indices });
        }
        Ok(FormIndex(indices))
    }

    pub fn empty() -> Self {
        FormIndex(Vec::new())
    }

    pub(crate) fn from_sorted(indices: Vec<usize>) -> Self {
        debug_assert!(indices.windows(2).all(|w| w[0] < w[1]));
        FormIndex(indices)
    }

    pub fn grade(&self) -> usize {
        self.0.len()
    }

    pub fn indices(&self) -> &[usize] {
        &self.0
    }

    pub fn contains(&self, j: usize) -> bool {
        self.0.binary_search(&j).is_ok()
    }

    /// All index sets of size `s` drawn from `1..=m`, ascending.
    pub fn all_of_grade(m: usize, s: usize) -> Vec<FormIndex> {
        fn rec(start: usize, m: usize, s: usize, cur: &mut Vec<usize>, out: &mut Vec<FormIndex>) {
            if cur.len() == s {
                out.push(FormIndex(cur.clone()));
                return;
            }
            for i in start..=m {
                cur.push(i);
                rec(i + 1, m, s, cur, out);
                cur.pop();
            }
        }
        let mut out = Vec::new();
        if s <= m {
            rec(1, m, s, &mut Vec::with_capacity(s), &mut out);
        }
        out
    }
}

/// Bidegree: grade `s` (number of `dx` factors) and polynomial degree `k`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct GradedSlot {
    pub s: usize,
    pub k: usize,
}

impl GradedSlot {
    pub fn new(s: usize, k: usize) -> Self {
        Self { s, k }
    }

    pub fn check(self, m: usize) -> Result<Self, FormError> {
        if m == 0 || self.s > m {
            return Err(FormError::InvalidSlot {
                m,
                s: self.s,
                k: self.k,
            });
        }
        Ok(self)
    }
}

impl fmt::Display for GradedSlot {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(s={}, k={})", self.s, self.k)
    }
}

pub type TermKey = (Monomial, FormIndex);

/// Element of `P (x) Lambda(R^m)` in canonical form: no zero coefficients,
/// terms ordered lexicographically by (exponents, index list).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PolyForm {
    m: usize,
    terms: BTreeMap<TermKey, Rational>,
}

impl PolyForm {
    pub fn zero(m: usize) -> Self {
        Self {
            m,
            terms: BTreeMap::new(),
        }
    }

    /// The constant 0-form `c`.
    pub fn constant(m: usize, c: Rational) -> Self {
        let mut p = Self::zero(m);
        p.add_term(Monomial::one(m), FormIndex::empty(), c);
        p
    }

    /// Builds a canonical form, summing duplicate keys and dropping zeros.
    pub fn new<I>(m: usize, terms: I) -> Result<Self, FormError>
    where
        I: IntoIterator<Item = (Vec<u32>, Vec<usize>, Rational)>,
    {
        if m == 0 {
            return Err(FormError::ZeroDimension);
        }
        let mut p = Self::zero(m);
        for (alpha, indices, c) in terms {
            if alpha.len() != m {
                return Err(FormError::ExponentLength {
                    expected: m,
                    found: alpha.len(),
                });
            }
            let idx = FormIndex::new(indices, m)?;
            p.add_term(Monomial(alpha), idx, c);
        }
        Ok(p)
    }

    /// Single term `c x^alpha dx_I`.
    pub fn term(m: usize, alpha: &[u32], indices: &[usize], c: Rational) -> Result<Self, FormError> {
        Self::new(m, [(alpha.to_vec(), indices.to_vec(), c)])
    }

    /// Scalar coordinate function `x_j` (1-based).
    pub fn coordinate(m: usize, j: usize) -> Self {
        let mut alpha = vec![0; m];
        alpha[j - 1] = 1;
        let mut p = Self::zero(m);
        p.add_term(Monomial(alpha), FormIndex::empty(), Rational::one());
        p
    }

    /// `r^2 = x_1^2 + ... + x_m^2`
    pub fn r_squared(m: usize) -> Self {
        let mut p = Self::zero(m);
        for j in 0..m {
            let mut alpha = vec![0; m];
            alpha[j] = 2;
            p.add_term(Monomial(alpha), FormIndex::empty(), Rational::one());
        }
        p
    }

    pub fn dim(&self) -> usize {
        self.m
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

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &FormIndex, &Rational)> {
        self.terms.iter().map(|((a, i), c)| (a, i, c))
    }

    pub fn coefficient(&self, alpha: &Monomial, index: &FormIndex) -> Rational {
        self.terms
            .get(&(alpha.clone(), index.clone()))
            .cloned()
            .unwrap_or_else(Rational::zero)
    }

    pub(crate) fn add_term(&mut self, alpha: Monomial, index: FormIndex, c: Rational) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry((alpha, index)) {
            Entry::Vacant(e) => {
                e.insert(c);
            }
            Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub(crate) fn add_scaled(&mut self, c: &Rational, other: &PolyForm) {
        debug_assert_eq!(self.m, other.m);
        if c.is_zero() {
            return;
        }
        for ((a, i), v) in &other.terms {
            self.add_term(a.clone(), i.clone(), c * v);
        }
    }

    fn same_dim(&self, other: &PolyForm) -> Result<(), FormError> {
        if self.m != other.m {
            return Err(FormError::DimensionMismatch {
                left: self.m,
                right: other.m,
            });
        }
        Ok(())
    }

    pub fn checked_add(&self, other: &PolyForm) -> Result<PolyForm, FormError> {
        self.same_dim(other)?;
        let mut out = self.clone();
        out.add_scaled(&Rational::one(), other);
        Ok(out)
    }

    pub fn checked_sub(&self, other: &PolyForm) -> Result<PolyForm, FormError> {
        self.same_dim(other)?;
        let mut out = self.clone();
        out.add_scaled(&-Rational::one(), other);
        Ok(out)
    }

    pub fn scale(&self, c: &Rational) -> PolyForm {
        if c.is_zero() {
            return PolyForm::zero(self.m);
        }
        PolyForm {
            m: self.m,
            terms: self.terms.iter().map(|(k, v)| (k.clone(), v * c)).collect(),
        }
    }

    pub fn scale_int(&self, c: i64) -> PolyForm {
        self.scale(&Rational::from_integer(c.into()))
    }

    /// Splits into bihomogeneous components; zero components are absent.
    pub fn grade_split(&self) -> BTreeMap<GradedSlot, PolyForm> {
        let mut out: BTreeMap<GradedSlot, PolyForm> = BTreeMap::new();
        for ((a, i), c) in &self.terms {
            let slot = GradedSlot::new(i.grade(), a.degree());
            out.entry(slot)
                .or_insert_with(|| PolyForm::zero(self.m))
                .terms
                .insert((a.clone(), i.clone()), c.clone());
        }
        out
    }

    /// Splits by polynomial degree only (grades stay mixed).
    pub fn degree_split(&self) -> BTreeMap<usize, PolyForm> {
        let mut out: BTreeMap<usize, PolyForm> = BTreeMap::new();
        for ((a, i), c) in &self.terms {
            out.entry(a.degree())
                .or_insert_with(|| PolyForm::zero(self.m))
                .terms
                .insert((a.clone(), i.clone()), c.clone());
        }
        out
    }

    /// The slot of a nonzero bihomogeneous form.
    pub fn homogeneous_slot(&self) -> Option<GradedSlot> {
        let mut it = self.terms.keys().map(|(a, i)| GradedSlot::new(i.grade(), a.degree()));
        let first = it.next()?;
        it.all(|s| s == first).then_some(first)
    }

    /// True if every term has bidegree `slot` (vacuously for zero).
    pub fn lies_in_slot(&self, slot: GradedSlot) -> bool {
        self.terms
            .keys()
            .all(|(a, i)| i.grade() == slot.s && a.degree() == slot.k)
    }

    pub fn has_degree(&self, k: usize) -> bool {
        self.terms.keys().all(|(a, _)| a.degree() == k)
    }

    pub fn max_degree(&self) -> Option<usize> {
        self.terms.keys().map(|(a, _)| a.degree()).max()
    }

    /// Fischer pairing `<x^a dx_I, x^b dx_J> = a! [a = b] [I = J]`.
    pub fn fischer_inner(&self, other: &PolyForm) -> Result<Rational, FormError> {
        self.same_dim(other)?;
        let (small, large) = if self.len() <= other.len() {
            (self, other)
        } else {
            (other, self)
        };
        let mut acc = Rational::zero();
        for (key, c) in &small.terms {
            if let Some(d) = large.terms.get(key) {
                acc += c * d * Rational::from_integer(key.0.factorial_weight());
            }
        }
        Ok(acc)
    }

    /// Exterior product with polynomial multiplication of coefficients.
    pub fn wedge_mul(&self, other: &PolyForm) -> Result<PolyForm, FormError> {
        self.same_dim(other)?;
        let mut out = PolyForm::zero(self.m);
        for ((a, i), c) in &self.terms {
            for ((b, j), d) in &other.terms {
                let Some((merged, sign)) = merge_indices(i.indices(), j.indices()) else {
                    continue;
                };
                let alpha: Vec<u32> = a.0.iter().zip(&b.0).map(|(x, y)| x + y).collect();
                let v = c * d;
                out.add_term(
                    Monomial(alpha),
                    FormIndex::from_sorted(merged),
                    if sign < 0 { -v } else { v },
                );
            }
        }
        Ok(out)
    }

    /// The change of variables `P -> Q.P`, `(Q.P)(x) = Lambda(Q) P(Q^{-1} x)`.
    ///
    /// Coefficients are evaluated at `Q^T x` and `dx_j` is sent to
    /// `sum_i Q_ij dx_i`.
    pub fn apply_orthogonal(&self, q: &OrthogonalMatrix) -> Result<PolyForm, FormError> {
        if q.dim() != self.m {
            return Err(FormError::DimensionMismatch {
                left: self.m,
                right: q.dim(),
            });
        }
        let m = self.m;
        let var_images: Vec<PolyForm> = (0..m)
            .map(|j| {
                let mut p = PolyForm::zero(m);
                for i in 0..m {
                    let mut alpha = vec![0; m];
                    alpha[i] = 1;
                    p.add_term(Monomial(alpha), FormIndex::empty(), q.entries[i][j].clone());
                }
                p
            })
            .collect();
        let dx_images: Vec<PolyForm> = (0..m)
            .map(|j| {
                let mut p = PolyForm::zero(m);
                for i in 0..m {
                    p.add_term(
                        Monomial::one(m),
                        FormIndex::from_sorted(vec![i + 1]),
                        q.entries[i][j].clone(),
                    );
                }
                p
            })
            .collect();
        let mut out = PolyForm::zero(m);
        for ((a, idx), c) in &self.terms {
            let mut img = PolyForm::constant(m, c.clone());
            for (j, &e) in a.0.iter().enumerate() {
                for _ in 0..e {
                    img = img.wedge_mul(&var_images[j])?;
                }
            }
            for &j in idx.indices() {
                img = img.wedge_mul(&dx_images[j - 1])?;
            }
            out.add_scaled(&Rational::one(), &img);
        }
        Ok(out)
    }
}

/// Merges two sorted index lists, returning the sign of the sorting
/// permutation, or `None` if they share an index.
pub(crate) fn merge_indices(left: &[usize], right: &[usize]) -> Option<(Vec<usize>, i8)> {
    let mut out = Vec::with_capacity(left.len() + right.len());
    let mut inversions = 0usize;
    let (mut i, mut j) = (0, 0);
    while i < left.len() || j < right.len() {
        if j == right.len() || (i < left.len() && left[i] < right[j]) {
            out.push(left[i]);
            i += 1;
        } else if i == left.len() || right[j] < left[i] {
            // right[j] jumps over the remaining left entries
            inversions += left.len() - i;
            out.push(right[j]);
            j += 1;
        } else {
            return None;
        }
    }
    Some((out, if inversions.is_multiple_of(2) { 1 } else { -1 }))
}

impl Add for &PolyForm {
    type Output = PolyForm;
    fn add(self, rhs: &PolyForm) -> PolyForm {
        self.checked_add(rhs).expect("ambient dimensions agree")
    }
}

impl Add for PolyForm {
    type Output = PolyForm;
    fn add(mut self, rhs: PolyForm) -> PolyForm {
        assert_eq!(self.m, rhs.m, "ambient dimensions agree");
        for ((a, i), c) in rhs.terms {
            self.add_term(a, i, c);
        }
        self
    }
}

impl Sub for &PolyForm {
    type Output = PolyForm;
    fn sub(self, rhs: &PolyForm) -> PolyForm {
        self.checked_sub(rhs).expect("ambient dimensions agree")
    }
}

impl Sub for PolyForm {
    type Output = PolyForm;
    fn sub(self, rhs: PolyForm) -> PolyForm {
        &self - &rhs
    }
}

impl Neg for &PolyForm {
    type Output = PolyForm;
    fn neg(self) -> PolyForm {
        PolyForm {
            m: self.m,
            terms: self.terms.iter().map(|(k, v)| (k.clone(), -v.clone())).collect(),
        }
    }
}

impl Neg for PolyForm {
    type Output = PolyForm;
    fn neg(mut self) -> PolyForm {
        for v in self.terms.values_mut() {
            *v = -v.clone();
        }
        self
    }
}

impl fmt::Display for PolyForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (n, ((a, i), c)) in self.terms.iter().enumerate() {
            let mut factors = Vec::new();
            for (j, &e) in a.0.iter().enumerate() {
                match e {
                    0 => {}
                    1 => factors.push(format!("x{}", j + 1)),
                    _ => factors.push(format!("x{}^{}", j + 1, e)),
                }
            }
            if !i.0.is_empty() {
                let dx: Vec<String> = i.0.iter().map(|j| format!("dx{j}")).collect();
                factors.push(dx.join("^"));
            }
            let mag = c.abs();
            let sep = match (n, c.is_negative()) {
                (0, true) => "-",
                (0, false) => "",
                (_, true) => " - ",
                (_, false) => " + ",
            };
            write!(f, "{sep}")?;
            if factors.is_empty() {
                write!(f, "{mag}")?;
            } else if mag.is_one() {
                write!(f, "{}", factors.join(" "))?;
            } else {
                write!(f, "{mag} {}", factors.join(" "))?;
            }
        }
        Ok(())
    }
}

/// Exactly orthogonal rational `m x m` matrix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrthogonalMatrix {
    entries: Vec<Vec<Rational>>,
}

impl OrthogonalMatrix {
    /// Checks `Q^T Q = I` exactly; the defect is returned on failure.
    pub fn new(entries: Vec<Vec<Rational>>) -> Result<Self, FormError> {
        let m = entries.len();
        if m == 0 || entries.iter().any(|r| r.len() != m) {
            return Err(FormError::MatrixShape { m });
        }
        let mut defect = vec![vec![Rational::zero(); m]; m];
        let mut ok = true;
        for i in 0..m {
            for j in 0..m {
                let mut v: Rational = (0..m).map(|l| &entries[l][i] * &entries[l][j]).sum();
                if i == j {
                    v -= Rational::one();
                }
                ok &= v.is_zero();
                defect[i][j] = v;
            }
        }
        if !ok {
            return Err(FormError::NotOrthogonal {
                defect: defect
                    .iter()
                    .map(|r| r.iter().map(ToString::to_string).collect())
                    .collect(),
            });
        }
        Ok(Self { entries })
    }

    pub fn identity(m: usize) -> Self {
        let entries = (0..m)
            .map(|i| {
                (0..m)
                    .map(|j| if i == j { Rational::one() } else { Rational::zero() })
                    .collect()
            })
            .collect();
        Self { entries }
    }

    /// Signed permutation sending `e_j` to `signs[j] * e_{perm[j]}` (0-based).
    pub fn signed_permutation(perm: &[usize], signs: &[i64]) -> Result<Self, FormError> {
        let m = perm.len();
        let mut entries = vec![vec![Rational::zero(); m]; m];
        for j in 0..m {
            if perm[j] >= m || signs.get(j).is_none() {
                return Err(FormError::MatrixShape { m });
            }
            entries[perm[j]][j] = Rational::from_integer(signs[j].into());
        }
        Self::new(entries)
    }

    /// Rotation by `(cos, sin)` in the plane of axes `i`, `j` (0-based).
    pub fn plane_rotation(
        m: usize,
        i: usize,
        j: usize,
        cos: Rational,
        sin: Rational,
    ) -> Result<Self, FormError> {
        let mut e = Self::identity(m).entries;
        if i >= m || j >= m || i == j {
            return Err(FormError::MatrixShape { m });
        }
        e[i][i] = cos.clone();
        e[j][j] = cos;
        e[i][j] = -sin.clone();
        e[j][i] = sin;
        Self::new(e)
    }

    pub fn dim(&self) -> usize {
        self.entries.len()
    }

    pub fn entries(&self) -> &[Vec<Rational>] {
        &self.entries
    }

    /// Matrix product `self * other`.
    pub fn compose(&self, other: &OrthogonalMatrix) -> OrthogonalMatrix {
        let m = self.dim();
        let entries = (0..m)
            .map(|i| {
                (0..m)
                    .map(|j| (0..m).map(|l| &self.entries[i][l] * &other.entries[l][j]).sum())
                    .collect()
            })
            .collect();
        OrthogonalMatrix { entries }
    }
}

/// Ordered monomial basis `x^alpha dx_I` of one or more graded slots.
///
/// Within a slot the keys are in canonical (lexicographic) order; slots are
/// concatenated in the order given.
#[derive(Debug, Clone)]
pub struct MonomialBasis {
    m: usize,
    slots: Vec<GradedSlot>,
    keys: Vec<TermKey>,
    index: std::collections::HashMap<TermKey, usize>,
}

impl MonomialBasis {
    pub fn for_slot(m: usize, slot: GradedSlot) -> Result<Self, FormError> {
        Self::for_slots(m, &[slot])
    }

    pub fn for_slots(m: usize, slots: &[GradedSlot]) -> Result<Self, FormError> {
        let mut keys = Vec::new();
        for &slot in slots {
            slot.check(m)?;
            let mut block: Vec<TermKey> = Vec::new();
            for a in Monomial::all_of_degree(m, slot.k) {
                for i in FormIndex::all_of_grade(m, slot.s) {
                    block.push((a.clone(), i));
                }
            }
            block.sort();
            keys.extend(block);
        }
        let index = keys.iter().cloned().enumerate().map(|(i, k)| (k, i)).collect();
        Ok(Self {
            m,
            slots: slots.to_vec(),
            keys,
            index,
        })
    }

    pub fn dim(&self) -> usize {
        self.m
    }

    pub fn slots(&self) -> &[GradedSlot] {
        &self.slots
    }

    pub fn len(&self) -> usize {
        self.keys.len()
    }

    pub fn is_empty(&self) -> bool {
        self.keys.is_empty()
    }

    pub fn key(&self, i: usize) -> &TermKey {
        &self.keys[i]
    }

    pub fn position(&self, key: &TermKey) -> Option<usize> {
        self.index.get(key).copied()
    }

    pub fn element(&self, i: usize) -> PolyForm {
        let (a, idx) = &self.keys[i];
        let mut p = PolyForm::zero(self.m);
        p.add_term(a.clone(), idx.clone(), Rational::one());
        p
    }

    /// Coordinates of `p`; `None` if some term lies outside the basis.
    pub fn coords(&self, p: &PolyForm) -> Option<crate::linalg::SparseRow> {
        if p.dim() != self.m {
            return None;
        }
        let mut out = Vec::with_capacity(p.len());
        for (key, c) in &p.terms {
            out.push((self.position(key)?, c.clone()));
        }
        out.sort_by_key(|(i, _)| *i);
        Some(out)
    }

    pub fn form_from_sparse(&self, v: &crate::linalg::SparseRow) -> PolyForm {
        let mut p = PolyForm::zero(self.m);
        for (i, c) in v {
            let (a, idx) = &self.keys[*i];
            p.add_term(a.clone(), idx.clone(), c.clone());
        }
        p
    }

    pub fn form_from_dense(&self, v: &[Rational]) -> PolyForm {
        let mut p = PolyForm::zero(self.m);
        for (i, c) in v.iter().enumerate() {
            let (a, idx) = &self.keys[i];
            p.add_term(a.clone(), idx.clone(), c.clone());
        }
        p
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
struct TermJson {
    alpha: Vec<u32>,
    #[serde(rename = "I")]
    indices: Vec<usize>,
    coeff: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
struct PolyFormJson {
    m: usize,
    terms: Vec<TermJson>,
}

pub fn parse_rational(s: &str) -> Result<Rational, FormError> {
    let t = s.trim();
    if t.contains('.') || t.is_empty() {
        return Err(FormError::BadCoefficient(s.to_string()));
    }
    t.parse::<Rational>()
        .map_err(|_| FormError::BadCoefficient(s.to_string()))
}

/// Error from [`PolyForm::from_json`]: malformed JSON or an invalid form.
#[derive(Debug, Error)]
pub enum JsonFormError {
    #[error("malformed JSON at line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error(transparent)]
    Form(#[from] FormError),
}

impl PolyForm {
    /// Parses the JSON file format, keeping syntax and validation errors
    /// apart.
    pub fn from_json(text: &str) -> Result<PolyForm, JsonFormError> {
        let raw: PolyFormJson = serde_json::from_str(text).map_err(|e| JsonFormError::Syntax {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })?;
        raw.into_form()
    }
}

impl PolyFormJson {
    fn into_form(self) -> Result<PolyForm, JsonFormError> {
        let mut terms = Vec::with_capacity(self.terms.len());
        for t in self.terms {
            terms.push((t.alpha, t.indices, parse_rational(&t.coeff)?));
        }
        Ok(PolyForm::new(self.m, terms)?)
    }
}

impl Serialize for PolyForm {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        PolyFormJson {
            m: self.m,
            terms: self
                .terms
                .iter()
                .map(|((a, i), c)| TermJson {
                    alpha: a.0.clone(),
                    indices: i.0.clone(),
                    coeff: c.to_string(),
                })
                .collect(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for PolyForm {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        PolyFormJson::deserialize(deserializer)?
            .into_form()
            .map_err(serde::de::Error::custom)
    }
}
