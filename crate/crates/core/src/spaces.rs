//! Bases of the invariant subspaces of `P^s_k`.
//!
//! `H^s_k` is computed as the joint kernel of `d` and `d*`; the spaces
//! `U`, `V`, `W`, `M_{s,k}` are images of `H` bases under fixed operator
//! combinations, each checked to have full rank. Results are cached per
//! `(m, s, k, kind)`.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, OnceLock, RwLock};

use num_integer::Integer;
use num_bigint::BigInt;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::linalg::{rank_of_vectors, RatMatrix, SparseRow, SpanSolver};
use crate::operators::{self, operator_matrix_between, Operator, OperatorError};
use crate::polyform::{FormError, FormIndex, GradedSlot, MonomialBasis, PolyForm};
use crate::Rational;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SpaceKind {
    /// All of `P^s_k`.
    P,
    /// `Ker^s_k Laplacian`.
    KerLaplace,
    H,
    U,
    V,
    W,
    /// `M_{s,k}`, mixed grades `s - 1` and `s + 1`.
    Msk,
    /// All degree-`k` monogenic forms, mixed grades.
    Monogenic,
}

impl fmt::Display for SpaceKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            SpaceKind::P => "P",
            SpaceKind::KerLaplace => "Ker",
            SpaceKind::H => "H",
            SpaceKind::U => "U",
            SpaceKind::V => "V",
            SpaceKind::W => "W",
            SpaceKind::Msk => "M",
            SpaceKind::Monogenic => "Mono",
        };
        f.write_str(name)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SpaceError {
    #[error(transparent)]
    Form(#[from] FormError),
    #[error(transparent)]
    Operator(#[from] OperatorError),
    #[error("M_(s,k) needs 1 <= s <= m-1 and k >= 1, got m={m}, s={s}, k={k}")]
    MskRange { m: usize, s: usize, k: usize },
    #[error("operator list is empty")]
    NoOperators,
    #[error("{kind} basis for m={m}, s={s}, k={k} has rank {rank} < {len}")]
    RankDeficient {
        kind: SpaceKind,
        m: usize,
        s: usize,
        k: usize,
        rank: usize,
        len: usize,
    },
    #[error("{kind} element for m={m}, s={s}, k={k} fails its defining identity")]
    Membership {
        kind: SpaceKind,
        m: usize,
        s: usize,
        k: usize,
    },
}

/// Linearly independent forms spanning one subspace, with coordinates in the
/// ambient monomial basis.
#[derive(Debug)]
pub struct SpaceBasis {
    m: usize,
    kind: SpaceKind,
    slots: Vec<GradedSlot>,
    elements: Vec<PolyForm>,
    ambient: MonomialBasis,
    coords: RatMatrix,
    solver: OnceLock<SpanSolver>,
}

impl SpaceBasis {
    pub(crate) fn from_parts(
        m: usize,
        kind: SpaceKind,
        label: (usize, usize),
        ambient: MonomialBasis,
        elements: Vec<PolyForm>,
    ) -> Result<Self, SpaceError> {
        let columns: Vec<SparseRow> = elements
            .iter()
            .map(|e| ambient.coords(e).expect("element lies in its ambient slots"))
            .collect();
        let rank = rank_of_vectors(ambient.len(), &columns);
        if rank < elements.len() {
            return Err(SpaceError::RankDeficient {
                kind,
                m,
                s: label.0,
                k: label.1,
                rank,
                len: elements.len(),
            });
        }
        let coords = RatMatrix::from_columns(ambient.len(), &columns).expect("in range");
        Ok(Self {
            m,
            kind,
            slots: ambient.slots().to_vec(),
            elements,
            ambient,
            coords,
            solver: OnceLock::new(),
        })
    }

    pub fn dim(&self) -> usize {
        self.m
    }

    pub fn kind(&self) -> SpaceKind {
        self.kind
    }

    pub fn slots(&self) -> &[GradedSlot] {
        &self.slots
    }

    pub fn elements(&self) -> &[PolyForm] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn ambient(&self) -> &MonomialBasis {
        &self.ambient
    }

    /// Columns are the elements' coordinates in the ambient monomial basis.
    pub fn coordinates(&self) -> &RatMatrix {
        &self.coords
    }

    fn solver(&self) -> &SpanSolver {
        self.solver.get_or_init(|| {
            let cols: Vec<SparseRow> = self
                .elements
                .iter()
                .map(|e| self.ambient.coords(e).expect("in ambient"))
                .collect();
            SpanSolver::new(self.ambient.len(), &cols).expect("basis is independent")
        })
    }

    /// Coefficients of `p` in this basis, or `None` if `p` is outside the span.
    pub fn express(&self, p: &PolyForm) -> Option<Vec<Rational>> {
        if p.is_zero() {
            return Some(vec![Rational::zero(); self.len()]);
        }
        let coords = self.ambient.coords(p)?;
        self.solver().solve_sparse(&coords)
    }

    pub fn contains(&self, p: &PolyForm) -> bool {
        self.express(p).is_some()
    }

    pub fn combine(&self, coeffs: &[Rational]) -> PolyForm {
        let mut out = PolyForm::zero(self.m);
        for (c, e) in coeffs.iter().zip(&self.elements) {
            out.add_scaled(c, e);
        }
        out
    }
}

type CacheKey = (usize, usize, usize, SpaceKind);

fn cache() -> &'static RwLock<HashMap<CacheKey, Arc<SpaceBasis>>> {
    static CACHE: OnceLock<RwLock<HashMap<CacheKey, Arc<SpaceBasis>>>> = OnceLock::new();
    CACHE.get_or_init(|| RwLock::new(HashMap::new()))
}

fn cached(
    key: CacheKey,
    compute: impl FnOnce() -> Result<SpaceBasis, SpaceError>,
) -> Result<Arc<SpaceBasis>, SpaceError> {
    if let Some(b) = cache().read().expect("cache lock").get(&key) {
        return Ok(Arc::clone(b));
    }
    let basis = Arc::new(compute()?);
    let mut guard = cache().write().expect("cache lock");
    Ok(Arc::clone(guard.entry(key).or_insert(basis)))
}

/// Scales a rational vector to a primitive integer vector.
fn primitive(v: Vec<Rational>) -> Vec<Rational> {
    let lcm = v
        .iter()
        .filter(|x| !x.is_zero())
        .fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
    let ints: Vec<BigInt> = v.iter().map(|x| (x * &lcm).to_integer()).collect();
    let g = ints.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
    if g.is_zero() {
        return v;
    }
    ints.into_iter().map(|x| Rational::from_integer(x / &g)).collect()
}

fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1usize, |acc, i| acc * (n - i) / (i + 1))
}

/// `dim P^s_k = C(m+k-1, k) C(m, s)` by the counting formula.
pub fn dim_psk(m: usize, s: usize, k: usize) -> usize {
    if m == 0 {
        return 0;
    }
    binomial(m + k - 1, k) * binomial(m, s)
}

fn slot(m: usize, s: usize, k: usize) -> Result<GradedSlot, SpaceError> {
    Ok(GradedSlot::new(s, k).check(m)?)
}

/// Monomial forms `x^alpha dx_I` of `P^s_k` in canonical order.
pub fn basis_psk(m: usize, s: usize, k: usize) -> Result<Arc<SpaceBasis>, SpaceError> {
    let sl = slot(m, s, k)?;
    cached((m, s, k, SpaceKind::P), || {
        let ambient = MonomialBasis::for_slot(m, sl)?;
        let elements = (0..ambient.len()).map(|i| ambient.element(i)).collect();
        SpaceBasis::from_parts(m, SpaceKind::P, (s, k), ambient, elements)
    })
}

fn kernel_elements(ops: &[Operator], ambient: &MonomialBasis) -> Result<Vec<PolyForm>, SpaceError> {
    let m = ambient.dim();
    let mut stacked = RatMatrix::zeros(0, ambient.len());
    for &op in ops {
        let mut targets = Vec::new();
        for &sl in ambient.slots() {
            for t in op.target_slots(m, sl) {
                if !targets.contains(&t) {
                    targets.push(t);
                }
            }
        }
        let target = MonomialBasis::for_slots(m, &targets)?;
        let mat = operator_matrix_between(op, ambient, &target)?;
        stacked = stacked.vstack(&mat).expect("same column count");
    }
    Ok(stacked
        .kernel_basis()
        .into_iter()
        .map(|v| ambient.form_from_dense(&primitive(v)))
        .collect())
}

/// Joint kernel of the listed operators inside `P^s_k`.
pub fn basis_ker(ops: &[Operator], m: usize, s: usize, k: usize) -> Result<SpaceBasis, SpaceError> {
    if ops.is_empty() {
        return Err(SpaceError::NoOperators);
    }
    let ambient = MonomialBasis::for_slot(m, slot(m, s, k)?)?;
    let elements = kernel_elements(ops, &ambient)?;
    SpaceBasis::from_parts(m, SpaceKind::KerLaplace, (s, k), ambient, elements)
}

/// Harmonic scalar polynomials of degree `k`.
pub fn basis_scalar_harmonic(m: usize, k: usize) -> Result<Arc<SpaceBasis>, SpaceError> {
    basis_ker_laplace(m, 0, k)
}

/// `Ker^s_k Laplacian`, built as (harmonic scalars) x `dx_I`.
pub fn basis_ker_laplace(m: usize, s: usize, k: usize) -> Result<Arc<SpaceBasis>, SpaceError> {
    let sl = slot(m, s, k)?;
    cached((m, s, k, SpaceKind::KerLaplace), || {
        let ambient = MonomialBasis::for_slot(m, sl)?;
        let elements = if s == 0 {
            kernel_elements(&[Operator::Laplacian], &ambient)?
        } else {
            let scalar = basis_scalar_harmonic(m, k)?;
            let mut out = Vec::new();
            for idx in FormIndex::all_of_grade(m, s) {
                let dx = PolyForm::term(m, &vec![0; m], idx.indices(), Rational::one())?;
                for h in scalar.elements() {
                    out.push(h.wedge_mul(&dx)?);
                }
            }
            out
        };
        SpaceBasis::from_parts(m, SpaceKind::KerLaplace, (s, k), ambient, elements)
    })
}

/// `H^s_k = { P in P^s_k : dP = 0, d*P = 0 }`; all of `P^s_0` when `k = 0`.
pub fn basis_h(m: usize, s: usize, k: usize) -> Result<Arc<SpaceBasis>, SpaceError> {
    let sl = slot(m, s, k)?;
    cached((m, s, k, SpaceKind::H), || {
        let ambient = MonomialBasis::for_slot(m, sl)?;
        let elements = if k == 0 {
            (0..ambient.len()).map(|i| ambient.element(i)).collect()
        } else {
            kernel_elements(&[Operator::D, Operator::DStar], &ambient)?
        };
        SpaceBasis::from_parts(m, SpaceKind::H, (s, k), ambient, elements)
    })
}

fn image_space(
    m: usize,
    kind: SpaceKind,
    s: usize,
    k: usize,
    ambient_slots: &[GradedSlot],
    source: Option<Arc<SpaceBasis>>,
    map: impl Fn(&PolyForm) -> PolyForm,
) -> Result<SpaceBasis, SpaceError> {
    let ambient = MonomialBasis::for_slots(m, ambient_slots)?;
    let elements = match source {
        Some(src) => src.elements().iter().map(map).collect(),
        None => Vec::new(),
    };
    SpaceBasis::from_parts(m, kind, (s, k), ambient, elements)
}

/// `U^s_k = x H^{s-1}_{k-1}` for `1 <= s <= m`, `k >= 1`; zero otherwise.
pub fn basis_u(m: usize, s: usize, k: usize) -> Result<Arc<SpaceBasis>, SpaceError> {
    let sl = slot(m, s, k)?;
    cached((m, s, k, SpaceKind::U), || {
        let src = (s >= 1 && k >= 1).then(|| basis_h(m, s - 1, k - 1)).transpose()?;
        image_space(m, SpaceKind::U, s, k, &[sl], src, operators::x_op)
    })
}

/// `V^s_k = x* H^{s+1}_{k-1}` for `0 <= s <= m-1`, `k >= 1`; zero otherwise.
pub fn basis_v(m: usize, s: usize, k: usize) -> Result<Arc<SpaceBasis>, SpaceError> {
    let sl = slot(m, s, k)?;
    cached((m, s, k, SpaceKind::V), || {
        let src = (s < m && k >= 1).then(|| basis_h(m, s + 1, k - 1)).transpose()?;
        image_space(m, SpaceKind::V, s, k, &[sl], src, operators::xstar_op)
    })
}

/// The pair `(c1, c2) = (k-2+s, k-2+m-s)` for slot `(s, k)`.
pub fn projection_constants(m: usize, s: usize, k: usize) -> (i64, i64) {
    let (m, s, k) = (m as i64, s as i64, k as i64);
    (k - 2 + s, k - 2 + m - s)
}

/// `[c2 x x* - c1 x* x] h` with `(c1, c2)` taken from slot `(s, k)`.
pub fn w_map(m: usize, s: usize, k: usize, h: &PolyForm) -> PolyForm {
    let (c1, c2) = projection_constants(m, s, k);
    let xs = operators::xstar_op(h);
    let x = operators::x_op(h);
    operators::x_op(&xs).scale_int(c2) - operators::xstar_op(&x).scale_int(c1)
}

/// `W^s_k = [(k-2+m-s) x x* - (k-2+s) x* x] H^s_{k-2}` for `1 <= s <= m-1`,
/// `k >= 2`; zero otherwise.
pub fn basis_w(m: usize, s: usize, k: usize) -> Result<Arc<SpaceBasis>, SpaceError> {
    let sl = slot(m, s, k)?;
    cached((m, s, k, SpaceKind::W), || {
        let src = (s >= 1 && s < m && k >= 2)
            .then(|| basis_h(m, s, k - 2))
            .transpose()?;
        image_space(m, SpaceKind::W, s, k, &[sl], src, |h| w_map(m, s, k, h))
    })
}

/// `[(k-1+m-s) x* - (k-1+s) x] h`, the map onto `M_{s,k}`.
pub fn msk_map(m: usize, s: usize, k: usize, h: &PolyForm) -> PolyForm {
    let (m, s, k) = (m as i64, s as i64, k as i64);
    operators::xstar_op(h).scale_int(k - 1 + m - s) - operators::x_op(h).scale_int(k - 1 + s)
}

/// `M_{s,k} = [(k-1+m-s) x* - (k-1+s) x] H^s_{k-1}`, `1 <= s <= m-1`, `k >= 1`.
pub fn basis_msk(m: usize, s: usize, k: usize) -> Result<Arc<SpaceBasis>, SpaceError> {
    slot(m, s, k)?;
    if s == 0 || s >= m || k == 0 {
        return Err(SpaceError::MskRange { m, s, k });
    }
    cached((m, s, k, SpaceKind::Msk), || {
        let src = basis_h(m, s, k - 1)?;
        let slots = [GradedSlot::new(s - 1, k), GradedSlot::new(s + 1, k)];
        let basis = image_space(m, SpaceKind::Msk, s, k, &slots, Some(src), |h| msk_map(m, s, k, h))?;
        if basis.elements().iter().any(|e| !operators::dirac(e).is_zero()) {
            return Err(SpaceError::Membership {
                kind: SpaceKind::Msk,
                m,
                s,
                k,
            });
        }
        Ok(basis)
    })
}

/// Kernel of `d + d*` on all degree-`k` forms.
///
/// `d + d*` shifts the grade by one, so even and odd grades decouple and the
/// kernel is computed on each parity separately.
pub fn basis_monogenics(m: usize, k: usize) -> Result<Arc<SpaceBasis>, SpaceError> {
    if m == 0 {
        return Err(FormError::ZeroDimension.into());
    }
    cached((m, 0, k, SpaceKind::Monogenic), || {
        let mut elements = Vec::new();
        for parity in 0..2 {
            let slots: Vec<GradedSlot> = (0..=m)
                .filter(|s| s % 2 == parity)
                .map(|s| GradedSlot::new(s, k))
                .collect();
            let ambient = MonomialBasis::for_slots(m, &slots)?;
            elements.extend(kernel_elements(&[Operator::Dirac], &ambient)?);
        }
        let all: Vec<GradedSlot> = (0..=m).map(|s| GradedSlot::new(s, k)).collect();
        let ambient = MonomialBasis::for_slots(m, &all)?;
        SpaceBasis::from_parts(m, SpaceKind::Monogenic, (0, k), ambient, elements)
    })
}

/// The basis for any kind in one call; `Monogenic` ignores `s`.
pub fn basis_of(kind: SpaceKind, m: usize, s: usize, k: usize) -> Result<Arc<SpaceBasis>, SpaceError> {
    match kind {
        SpaceKind::P => basis_psk(m, s, k),
        SpaceKind::KerLaplace => basis_ker_laplace(m, s, k),
        SpaceKind::H => basis_h(m, s, k),
        SpaceKind::U => basis_u(m, s, k),
        SpaceKind::V => basis_v(m, s, k),
        SpaceKind::W => basis_w(m, s, k),
        SpaceKind::Msk => basis_msk(m, s, k),
        SpaceKind::Monogenic => basis_monogenics(m, k),
    }
}

/// Dimension table row for one slot.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub struct SlotDims {
    pub s: usize,
    pub k: usize,
    pub p: usize,
    pub ker: usize,
    pub h: usize,
    pub u: usize,
    pub v: usize,
    pub w: usize,
}

impl SlotDims {
    pub fn compute(m: usize, s: usize, k: usize) -> Result<Self, SpaceError> {
        Ok(Self {
            s,
            k,
            p: basis_psk(m, s, k)?.len(),
            ker: basis_ker_laplace(m, s, k)?.len(),
            h: basis_h(m, s, k)?.len(),
            u: basis_u(m, s, k)?.len(),
            v: basis_v(m, s, k)?.len(),
            w: basis_w(m, s, k)?.len(),
        })
    }

    /// `ker = h + u + v + w`
    pub fn balanced(&self) -> bool {
        self.ker == self.h + self.u + self.v + self.w
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn psk_counts() {
        assert_eq!(basis_psk(3, 1, 1).unwrap().len(), 9);
        let b = basis_psk(2, 2, 0).unwrap();
        assert_eq!(b.len(), 1);
        assert_eq!(b.elements()[0].to_string(), "dx1^dx2");
        assert_eq!(basis_psk(3, 0, 2).unwrap().len(), 6);
        assert!(basis_psk(3, 4, 0).is_err());
        assert_eq!(dim_psk(3, 1, 1), 9);
        assert_eq!(dim_psk(4, 2, 5), 56 * 6);
    }

    #[test]
    fn ker_examples() {
        let b = basis_ker(&[Operator::Laplacian], 3, 0, 1).unwrap();
        assert_eq!(b.len(), 3);
        let b = basis_ker(&[Operator::D, Operator::DStar], 3, 1, 1).unwrap();
        assert_eq!(b.len(), 5);
        for e in b.elements() {
            assert!(operators::d(e).is_zero());
            assert!(operators::dstar(e).is_zero());
        }
        assert_eq!(basis_ker(&[Operator::D, Operator::DStar], 3, 0, 1).unwrap().len(), 0);
        assert_eq!(basis_ker(&[], 3, 0, 1).unwrap_err(), SpaceError::NoOperators);
    }

    #[test]
    fn h_examples() {
        assert_eq!(basis_h(3, 2, 0).unwrap().len(), 3);
        assert_eq!(basis_h(3, 3, 2).unwrap().len(), 0);
        assert_eq!(basis_h(3, 1, 2).unwrap().len(), 7);
        assert!(basis_h(3, 5, 1).is_err());
    }

    #[test]
    fn uvw_examples() {
        let u = basis_u(3, 1, 1).unwrap();
        assert_eq!(u.len(), 1);
        assert_eq!(u.elements()[0], operators::x_op(&PolyForm::constant(3, Rational::one())));
        assert!(basis_w(3, 1, 1).unwrap().is_empty());
        let w = basis_w(3, 1, 2).unwrap();
        assert_eq!(w.len(), 3);
        for e in w.elements() {
            assert!(operators::laplacian(e).is_zero());
        }
        assert!(basis_u(3, 0, 2).unwrap().is_empty());
        assert!(basis_v(3, 3, 2).unwrap().is_empty());
    }

    #[test]
    fn msk_examples() {
        let b = basis_msk(3, 1, 1).unwrap();
        assert_eq!(b.len(), 3);
        for e in b.elements() {
            assert!(operators::dirac(e).is_zero());
        }
        assert_eq!(basis_msk(3, 0, 1).unwrap_err(), SpaceError::MskRange { m: 3, s: 0, k: 1 });
        assert!(basis_msk(3, 1, 0).is_err());
    }

    #[test]
    fn monogenic_examples() {
        assert_eq!(basis_monogenics(3, 0).unwrap().len(), 8);
        assert_eq!(basis_monogenics(3, 1).unwrap().len(), 16);
        for e in basis_monogenics(3, 2).unwrap().elements() {
            assert!(operators::laplacian(e).is_zero());
            assert!(operators::dirac(e).is_zero());
        }
    }

    #[test]
    fn ker_laplace_matches_generic_kernel() {
        for (m, s, k) in [(3, 1, 2), (2, 1, 3), (4, 2, 2)] {
            let tensor = basis_ker_laplace(m, s, k).unwrap();
            let generic = basis_ker(&[Operator::Laplacian], m, s, k).unwrap();
            assert_eq!(tensor.len(), generic.len());
            assert!(generic.elements().iter().all(|e| tensor.contains(e)));
        }
    }

    #[test]
    fn express_and_combine() {
        let h = basis_h(3, 1, 2).unwrap();
        let coeffs: Vec<Rational> = (0..h.len()).map(|i| Rational::from_integer((i as i64 - 3).into())).collect();
        let p = h.combine(&coeffs);
        assert_eq!(h.express(&p), Some(coeffs));
        let outside = PolyForm::term(3, &[2, 0, 0], &[1], Rational::one()).unwrap();
        assert_eq!(h.express(&outside), None);
    }

    #[test]
    fn primitive_scaling() {
        let v = vec![Rational::new(1.into(), 2.into()), Rational::new((-3).into(), 4.into())];
        let p = primitive(v);
        assert_eq!(p, vec![Rational::from_integer(2.into()), Rational::from_integer((-3).into())]);
    }
}
