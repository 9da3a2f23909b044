//! Decompositions of polynomial forms.
//!
//! * [`harmonic_decompose`]: `P = sum_p r^{2p} L_p` with harmonic `L_p`.
//! * [`ker_project`]: the four closed-form projections of a harmonic form
//!   onto `H`, `U = xH`, `V = x*H` and `W`.
//! * [`fischer_decompose`]: every form as a sum of `w h` with `h` in some
//!   `H^s_k` and `w` an alternating word over `{x, x*}`.
//! * [`monogenic_decompose`] / [`monogenic_refine`]: the split into
//!   `r^{2p} (M + (x + x*) M)` layers and of a monogenic form into `H` and
//!   `M_{s,k}` pieces.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::{Arc, OnceLock, RwLock};

use num_traits::One;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::operators::{self, dirac, laplacian, OmegaWord};
use crate::polyform::{FormIndex, GradedSlot, MonomialBasis, PolyForm};
use crate::spaces::{self, projection_constants, SpaceBasis, SpaceError};
use crate::Rational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DecompositionError {
    #[error("form is not homogeneous in slot {expected}")]
    NotInSlot { expected: GradedSlot },
    #[error("form is not homogeneous of degree {k}")]
    NotOfDegree { k: usize },
    #[error("form is not harmonic; its Laplacian is {image}")]
    NotHarmonic { image: PolyForm },
    #[error("form is not monogenic; (d + d*) P = {image}")]
    NotMonogenic { image: PolyForm },
    #[error(transparent)]
    Space(#[from] SpaceError),
    #[error("identity check failed: {0}")]
    Identity(String),
}

fn q(n: i64) -> Rational {
    Rational::from_integer(n.into())
}

fn sign(p: usize) -> Rational {
    if p.is_multiple_of(2) {
        Rational::one()
    } else {
        -Rational::one()
    }
}

fn r2_pow(p: &PolyForm, n: usize) -> PolyForm {
    (0..n).fold(p.clone(), |acc, _| operators::r2(&acc))
}

/// Splits a form by its `dx_I` into scalar coefficient polynomials.
fn coefficient_polys(p: &PolyForm) -> BTreeMap<FormIndex, PolyForm> {
    let m = p.dim();
    let mut out: BTreeMap<FormIndex, PolyForm> = BTreeMap::new();
    for (a, idx, c) in p.terms() {
        out.entry(idx.clone())
            .or_insert_with(|| PolyForm::zero(m))
            .add_term(a.clone(), FormIndex::empty(), c.clone());
    }
    out
}

/// Basis `{ r^{2p} h : h harmonic of degree k - 2p }` of scalar `P_k`.
struct RadialBasis {
    basis: SpaceBasis,
    /// `(p, offset, count)` per radial power.
    layers: Vec<(usize, usize, usize)>,
    harmonics: Vec<Arc<SpaceBasis>>,
}

type RadialCache = RwLock<HashMap<(usize, usize), Arc<RadialBasis>>>;

fn radial_basis(m: usize, k: usize) -> Result<Arc<RadialBasis>, SpaceError> {
    static CACHE: OnceLock<RadialCache> = OnceLock::new();
    let cache = CACHE.get_or_init(|| RwLock::new(HashMap::new()));
    if let Some(b) = cache.read().expect("cache lock").get(&(m, k)) {
        return Ok(Arc::clone(b));
    }
    let mut elements = Vec::new();
    let mut layers = Vec::new();
    let mut harmonics = Vec::new();
    for p in 0..=k / 2 {
        let h = spaces::basis_scalar_harmonic(m, k - 2 * p)?;
        layers.push((p, elements.len(), h.len()));
        elements.extend(h.elements().iter().map(|e| r2_pow(e, p)));
        harmonics.push(h);
    }
    let ambient = MonomialBasis::for_slot(m, GradedSlot::new(0, k))?;
    let basis = SpaceBasis::from_parts(m, spaces::SpaceKind::P, (0, k), ambient, elements)?;
    let rb = Arc::new(RadialBasis {
        basis,
        layers,
        harmonics,
    });
    let mut guard = cache.write().expect("cache lock");
    Ok(Arc::clone(guard.entry((m, k)).or_insert(rb)))
}

/// Harmonic layers `L_p` of a bihomogeneous form, `P = sum_p r^{2p} L_p`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HarmonicLayers {
    pub m: usize,
    pub slot: GradedSlot,
    /// Nonzero layers only.
    pub components: BTreeMap<usize, PolyForm>,
}

impl HarmonicLayers {
    pub fn layer(&self, p: usize) -> PolyForm {
        self.components
            .get(&p)
            .cloned()
            .unwrap_or_else(|| PolyForm::zero(self.m))
    }

    pub fn reconstruct(&self) -> PolyForm {
        let mut out = PolyForm::zero(self.m);
        for (p, l) in &self.components {
            out = out + r2_pow(l, *p);
        }
        out
    }
}

/// Classical Fischer split of `P` in `P^s_k` into `r^{2p}`-multiples of
/// harmonic forms, by an exact solve in the basis `r^{2p} H_{k-2p}`.
pub fn harmonic_decompose(p: &PolyForm, slot: GradedSlot) -> Result<HarmonicLayers, DecompositionError> {
    let m = p.dim();
    slot.check(m).map_err(SpaceError::from)?;
    if !p.lies_in_slot(slot) {
        return Err(DecompositionError::NotInSlot { expected: slot });
    }
    let mut components: BTreeMap<usize, PolyForm> = BTreeMap::new();
    if !p.is_zero() {
        let rb = radial_basis(m, slot.k)?;
        for (idx, poly) in coefficient_polys(p) {
            let coeffs = rb
                .basis
                .express(&poly)
                .ok_or_else(|| DecompositionError::Identity("radial basis does not span P_k".into()))?;
            let dx = PolyForm::term(m, &vec![0; m], idx.indices(), Rational::one())
                .expect("valid index");
            for (&(layer, offset, count), h) in rb.layers.iter().zip(&rb.harmonics) {
                let scalar = h.combine(&coeffs[offset..offset + count]);
                if scalar.is_zero() {
                    continue;
                }
                let piece = scalar.wedge_mul(&dx).expect("same dimension");
                let entry = components.entry(layer).or_insert_with(|| PolyForm::zero(m));
                *entry = std::mem::replace(entry, PolyForm::zero(m)) + piece;
            }
        }
        components.retain(|_, l| !l.is_zero());
    }
    let layers = HarmonicLayers {
        m,
        slot,
        components,
    };
    if layers.reconstruct() != *p {
        return Err(DecompositionError::Identity(format!(
            "harmonic layers do not reconstruct input in {slot}"
        )));
    }
    Ok(layers)
}

/// The four pieces of a harmonic form in `Ker^s_k`, with the `H`-elements
/// they are built from.
///
/// `u = x u_source`, `v = x* v_source`, `w = [c2 x x* - c1 x* x] w_source`
/// with `u_source` in `H^{s-1}_{k-1}`, `v_source` in `H^{s+1}_{k-1}` and
/// `w_source` in `H^s_{k-2}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KerBlocks {
    pub m: usize,
    pub slot: GradedSlot,
    pub h: PolyForm,
    pub u: PolyForm,
    pub v: PolyForm,
    pub w: PolyForm,
    pub u_source: PolyForm,
    pub v_source: PolyForm,
    pub w_source: PolyForm,
}

impl KerBlocks {
    pub fn sum(&self) -> PolyForm {
        &(&(&self.h + &self.u) + &self.v) + &self.w
    }

    /// Checks that `h` and every source solve `dP = 0 = d*P` in the right
    /// slot and that each block is the stated image of its source.
    pub fn certify(&self) -> Result<(), DecompositionError> {
        let (s, k) = (self.slot.s, self.slot.k);
        let in_h = |p: &PolyForm, slot: Option<(usize, usize)>| {
            p.is_zero()
                || slot.is_some_and(|(s, k)| {
                    p.lies_in_slot(GradedSlot::new(s, k))
                        && operators::d(p).is_zero()
                        && operators::dstar(p).is_zero()
                })
        };
        let below = |ds: i64, dk: usize| {
            let s2 = s as i64 + ds;
            (s2 >= 0 && s2 <= self.m as i64 && k >= dk).then(|| (s2 as usize, k - dk))
        };
        let fail = |what: &str| Err(DecompositionError::Identity(format!("{what} in {}", self.slot)));
        if !in_h(&self.h, Some((s, k))) {
            return fail("h-block not in H");
        }
        if !in_h(&self.u_source, below(-1, 1)) || operators::x_op(&self.u_source) != self.u {
            return fail("u-block not in x H");
        }
        if !in_h(&self.v_source, below(1, 1)) || operators::xstar_op(&self.v_source) != self.v {
            return fail("v-block not in x* H");
        }
        if !in_h(&self.w_source, below(0, 2)) || spaces::w_map(self.m, s, k, &self.w_source) != self.w {
            return fail("w-block not in W");
        }
        Ok(())
    }
}

/// Projects a harmonic `P` in `Ker^s_k` onto `H`, `U`, `V`, `W` using
///
/// ```text
/// pi4 = (c2 x x* - c1 x* x) d d* / (c1 c2 (c1 + c2 + 2))   (1 <= s <= m-1, k >= 2)
/// pi2 = x d* (1 - pi4) / (c2 + 2)                          (1 <= s <= m,   k >= 1)
/// pi3 = x* d (1 - pi4) / (c1 + 2)                          (0 <= s <= m-1, k >= 1)
/// pi1 = 1 - pi2 - pi3 - pi4
/// ```
///
/// with `c1 = k-2+s`, `c2 = k-2+m-s`; each projection is zero outside its range.
pub fn ker_project(p: &PolyForm, slot: GradedSlot) -> Result<KerBlocks, DecompositionError> {
    let m = p.dim();
    slot.check(m).map_err(SpaceError::from)?;
    if !p.lies_in_slot(slot) {
        return Err(DecompositionError::NotInSlot { expected: slot });
    }
    let lap = laplacian(p);
    if !lap.is_zero() {
        return Err(DecompositionError::NotHarmonic { image: lap });
    }
    let (s, k) = (slot.s, slot.k);
    let (c1, c2) = projection_constants(m, s, k);
    let zero = PolyForm::zero(m);

    let w_source = if s >= 1 && s < m && k >= 2 {
        let denom = q(c1 * c2 * (c1 + c2 + 2));
        operators::d(&operators::dstar(p)).scale(&denom.recip())
    } else {
        zero.clone()
    };
    let w = spaces::w_map(m, s, k, &w_source);
    let rest = p - &w;

    let u_source = if s >= 1 && k >= 1 {
        operators::dstar(&rest).scale(&q(c2 + 2).recip())
    } else {
        zero.clone()
    };
    let v_source = if s < m && k >= 1 {
        operators::d(&rest).scale(&q(c1 + 2).recip())
    } else {
        zero
    };
    let u = operators::x_op(&u_source);
    let v = operators::xstar_op(&v_source);
    let h = &(&rest - &u) - &v;
    Ok(KerBlocks {
        m,
        slot,
        h,
        u,
        v,
        w,
        u_source,
        v_source,
        w_source,
    })
}

/// Key of one Fischer block: the block is `word` applied to an element of
/// `H^s_k`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct BlockKey {
    pub s: usize,
    pub k: usize,
    pub word: OmegaWord,
}

impl BlockKey {
    pub fn new(s: usize, k: usize, word: OmegaWord) -> Self {
        Self { s, k, word }
    }

    /// Slot the block lands in, if the grade stays in range.
    pub fn target(&self, m: usize) -> Option<GradedSlot> {
        let s = self.s as i64 + self.word.grade_shift();
        (s >= 0 && s <= m as i64).then(|| GradedSlot::new(s as usize, self.k + self.word.len()))
    }
}

impl fmt::Display for BlockKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let w = if self.word.is_empty() {
            "1".to_string()
        } else {
            self.word.to_string()
        };
        write!(f, "{w} H^{}_{}", self.s, self.k)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FischerBlock {
    /// Element of `H^s_k` before the word is applied.
    pub base: PolyForm,
    /// `word(base)`.
    pub form: PolyForm,
}

/// Output of [`fischer_decompose`]: nonzero blocks keyed by `(s, k, word)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FischerComponents {
    pub m: usize,
    blocks: BTreeMap<BlockKey, FischerBlock>,
}

impl FischerComponents {
    pub fn new(m: usize) -> Self {
        Self {
            m,
            blocks: BTreeMap::new(),
        }
    }

    /// Adds `word(base)` under `key`, accumulating into an existing block.
    /// Rejects a base outside `H^s_k`; drops the block if its form vanishes.
    pub fn insert(&mut self, key: BlockKey, base: PolyForm) -> Result<(), DecompositionError> {
        let base = match self.blocks.remove(&key) {
            Some(b) => b.base + base,
            None => base,
        };
        let in_h = base.lies_in_slot(GradedSlot::new(key.s, key.k))
            && operators::d(&base).is_zero()
            && operators::dstar(&base).is_zero();
        if !in_h {
            return Err(DecompositionError::Identity(format!("base of {key} is not in H")));
        }
        let form = key.word.apply(&base);
        if !form.is_zero() {
            self.blocks.insert(key, FischerBlock { base, form });
        }
        Ok(())
    }

    pub fn blocks(&self) -> impl Iterator<Item = (&BlockKey, &FischerBlock)> {
        self.blocks.iter()
    }

    pub fn get(&self, key: &BlockKey) -> Option<&FischerBlock> {
        self.blocks.get(key)
    }

    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    /// Every base lies in its `H^s_k` and every form equals `word(base)`.
    pub fn verify(&self) -> Result<(), DecompositionError> {
        for (key, b) in &self.blocks {
            let ok = b.base.lies_in_slot(GradedSlot::new(key.s, key.k))
                && operators::d(&b.base).is_zero()
                && operators::dstar(&b.base).is_zero()
                && key.word.apply(&b.base) == b.form
                && !b.form.is_zero();
            if !ok {
                return Err(DecompositionError::Identity(format!("block {key} is invalid")));
            }
        }
        Ok(())
    }

    pub fn to_json(&self) -> FischerComponentsJson {
        FischerComponentsJson {
            blocks: self
                .blocks
                .iter()
                .map(|(key, b)| BlockJson {
                    s: key.s,
                    k: key.k,
                    word: key.word.to_string(),
                    form: b.form.clone(),
                })
                .collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlockJson {
    pub s: usize,
    pub k: usize,
    pub word: String,
    pub form: PolyForm,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FischerComponentsJson {
    pub blocks: Vec<BlockJson>,
}

/// Sum of all blocks.
pub fn reconstruct(c: &FischerComponents) -> PolyForm {
    c.blocks
        .values()
        .fold(PolyForm::zero(c.m), |acc, b| acc + b.form.clone())
}

/// Decomposes `P` into blocks `w H^s_k`.
///
/// Each bihomogeneous part in `P^s_k` is split into harmonic layers
/// `r^{2p} L_p`, each `L_p` is projected onto `H + xH + x*H + W`, and the
/// radial powers are absorbed into words using `r^2 = -(x x* + x* x)`:
///
/// ```text
/// r^{2p} h          = (-1)^p ((x x*)^p h + (x* x)^p h)          (p >= 1)
/// r^{2p} x u        = (-1)^p (x x*)^p x u
/// r^{2p} x* v       = (-1)^p (x* x)^p x* v
/// r^{2p} [c2 x x* - c1 x* x] w = (-1)^p (c2 (x x*)^{p+1} w - c1 (x* x)^{p+1} w)
/// ```
pub fn fischer_decompose(p: &PolyForm) -> Result<FischerComponents, DecompositionError> {
    let m = p.dim();
    let mut out = FischerComponents::new(m);
    for (slot, component) in p.grade_split() {
        let s = slot.s;
        for (layer, l) in harmonic_decompose(&component, slot)?.components {
            let j = slot.k - 2 * layer;
            let blocks = ker_project(&l, GradedSlot::new(s, j))?;
            let sg = sign(layer);
            if layer == 0 {
                out.insert(BlockKey::new(s, j, OmegaWord::empty()), blocks.h.clone())?;
            } else if !blocks.h.is_zero() {
                let h = blocks.h.scale(&sg);
                out.insert(BlockKey::new(s, j, OmegaWord::xxstar_pow(layer)), h.clone())?;
                out.insert(BlockKey::new(s, j, OmegaWord::xstarx_pow(layer)), h)?;
            }
            if !blocks.u_source.is_zero() {
                let word = OmegaWord::alternating(operators::Letter::X, 2 * layer + 1);
                out.insert(BlockKey::new(s - 1, j - 1, word), blocks.u_source.scale(&sg))?;
            }
            if !blocks.v_source.is_zero() {
                let word = OmegaWord::alternating(operators::Letter::XStar, 2 * layer + 1);
                out.insert(BlockKey::new(s + 1, j - 1, word), blocks.v_source.scale(&sg))?;
            }
            if !blocks.w_source.is_zero() {
                let (c1, c2) = projection_constants(m, s, j);
                out.insert(
                    BlockKey::new(s, j - 2, OmegaWord::xxstar_pow(layer + 1)),
                    blocks.w_source.scale(&(&sg * q(c2))),
                )?;
                out.insert(
                    BlockKey::new(s, j - 2, OmegaWord::xstarx_pow(layer + 1)),
                    blocks.w_source.scale(&(-&sg * q(c1))),
                )?;
            }
        }
    }
    out.verify()?;
    if reconstruct(&out) != *p {
        return Err(DecompositionError::Identity(
            "Fischer blocks do not reconstruct the input".into(),
        ));
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum MonogenicLayer {
    /// Monogenic piece `M_p`.
    #[serde(rename = "M")]
    M,
    /// `N_p` with the piece being `(x + x*) N_p`, `N_p` monogenic.
    #[serde(rename = "xM")]
    XM,
}

/// `P = sum_p r^{2p} (M_p + (x + x*) N_p)` with `M_p`, `N_p` monogenic.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MonogenicLayers {
    pub m: usize,
    pub k: usize,
    /// Nonzero layers keyed by `(p, layer)`; `XM` entries store `N_p`.
    pub components: BTreeMap<(usize, MonogenicLayer), PolyForm>,
}

fn x_plus_xstar(p: &PolyForm) -> PolyForm {
    operators::x_op(p) + operators::xstar_op(p)
}

impl MonogenicLayers {
    pub fn reconstruct(&self) -> PolyForm {
        let mut out = PolyForm::zero(self.m);
        for ((p, layer), f) in &self.components {
            let piece = match layer {
                MonogenicLayer::M => f.clone(),
                MonogenicLayer::XM => x_plus_xstar(f),
            };
            out = out + r2_pow(&piece, *p);
        }
        out
    }
}

/// Splits a harmonic form of degree `j` (mixed grades) into `M + (x + x*) N`.
///
/// Per source grade `t` the pieces `x a + x* b` with `a, b` in `H^t_{j-1}`
/// are rewritten as `(x + x*) c + [A x* - B x] e` with `A = j-1+m-t`,
/// `B = j-1+t`, `e = (b - a)/(A + B)`, `c = a + B e`; the `W` pieces are
/// `(x + x*) [c2 x* - c1 x] w_source`.
fn split_harmonic(
    m: usize,
    j: usize,
    by_grade: &BTreeMap<usize, PolyForm>,
) -> Result<(PolyForm, PolyForm), DecompositionError> {
    let mut mono = PolyForm::zero(m);
    let mut inner = PolyForm::zero(m);
    let mut u_src: BTreeMap<usize, PolyForm> = BTreeMap::new();
    let mut v_src: BTreeMap<usize, PolyForm> = BTreeMap::new();
    for (&s, l) in by_grade {
        let blocks = ker_project(l, GradedSlot::new(s, j))?;
        mono = mono + blocks.h;
        if !blocks.u_source.is_zero() {
            u_src.insert(s - 1, blocks.u_source);
        }
        if !blocks.v_source.is_zero() {
            v_src.insert(s + 1, blocks.v_source);
        }
        if !blocks.w_source.is_zero() {
            let (c1, c2) = projection_constants(m, s, j);
            let n = operators::xstar_op(&blocks.w_source).scale_int(c2)
                - operators::x_op(&blocks.w_source).scale_int(c1);
            inner = inner + n;
        }
    }
    for t in 0..=m {
        let a = u_src.remove(&t).unwrap_or_else(|| PolyForm::zero(m));
        let b = v_src.remove(&t).unwrap_or_else(|| PolyForm::zero(m));
        if a.is_zero() && b.is_zero() {
            continue;
        }
        let big_a = (j + m - 1 - t) as i64;
        let big_b = (j - 1 + t) as i64;
        let e = (&b - &a).scale(&q(big_a + big_b).recip());
        let c = &a + &e.scale_int(big_b);
        mono = mono + spaces::msk_map(m, t, j, &e);
        inner = inner + c;
    }
    Ok((mono, inner))
}

/// Splits a degree-`k` form (any grades) into monogenic layers.
pub fn monogenic_decompose(p: &PolyForm, k: usize) -> Result<MonogenicLayers, DecompositionError> {
    let m = p.dim();
    if !p.has_degree(k) {
        return Err(DecompositionError::NotOfDegree { k });
    }
    // layer p -> grade s -> L_p^s
    let mut harmonic: BTreeMap<usize, BTreeMap<usize, PolyForm>> = BTreeMap::new();
    for (slot, component) in p.grade_split() {
        for (layer, l) in harmonic_decompose(&component, slot)?.components {
            harmonic.entry(layer).or_default().insert(slot.s, l);
        }
    }
    let mut components = BTreeMap::new();
    for (layer, by_grade) in harmonic {
        let j = k - 2 * layer;
        let (mono, inner) = split_harmonic(m, j, &by_grade)?;
        if !dirac(&mono).is_zero() || !dirac(&inner).is_zero() {
            return Err(DecompositionError::Identity(format!(
                "monogenic layer {layer} is not annihilated by d + d*"
            )));
        }
        if !mono.is_zero() {
            components.insert((layer, MonogenicLayer::M), mono);
        }
        if !inner.is_zero() {
            components.insert((layer, MonogenicLayer::XM), inner);
        }
    }
    let out = MonogenicLayers { m, k, components };
    if out.reconstruct() != *p {
        return Err(DecompositionError::Identity(
            "monogenic layers do not reconstruct the input".into(),
        ));
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum RefineBlock {
    /// Piece in `H^s_k`.
    H,
    /// Piece in `M_{s,k}` (grades `s - 1` and `s + 1`).
    M,
}

/// A monogenic form split into `H^s_k` and `M_{s,k}` pieces.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MonogenicRefinement {
    pub m: usize,
    pub k: usize,
    pub blocks: BTreeMap<(usize, RefineBlock), PolyForm>,
}

impl MonogenicRefinement {
    pub fn reconstruct(&self) -> PolyForm {
        self.blocks
            .values()
            .fold(PolyForm::zero(self.m), |acc, b| acc + b.clone())
    }
}

/// Splits a degree-`k` monogenic form into `H^s_k` and `M_{s,k}` pieces.
pub fn monogenic_refine(p: &PolyForm, k: usize) -> Result<MonogenicRefinement, DecompositionError> {
    let m = p.dim();
    if !p.has_degree(k) {
        return Err(DecompositionError::NotOfDegree { k });
    }
    let image = dirac(p);
    if !image.is_zero() {
        return Err(DecompositionError::NotMonogenic { image });
    }
    let mut blocks = BTreeMap::new();
    let mut ms: BTreeMap<usize, PolyForm> = BTreeMap::new();
    for (slot, component) in p.grade_split() {
        let kb = ker_project(&component, slot)?;
        if !kb.w_source.is_zero() {
            return Err(DecompositionError::Identity(format!(
                "monogenic input has a W-component in {slot}"
            )));
        }
        if !kb.h.is_zero() {
            blocks.insert((slot.s, RefineBlock::H), kb.h);
        }
        // x u_source comes from grade s-1, x* v_source from grade s+1
        if !kb.u.is_zero() {
            let e = ms.entry(slot.s - 1).or_insert_with(|| PolyForm::zero(m));
            *e = &*e + &kb.u;
        }
        if !kb.v.is_zero() {
            let e = ms.entry(slot.s + 1).or_insert_with(|| PolyForm::zero(m));
            *e = &*e + &kb.v;
        }
    }
    for (t, piece) in ms {
        if piece.is_zero() {
            continue;
        }
        if t == 0 || t >= m || !dirac(&piece).is_zero() {
            return Err(DecompositionError::Identity(format!(
                "M-piece for s={t} is not in M_(s,k)"
            )));
        }
        blocks.insert((t, RefineBlock::M), piece);
    }
    let out = MonogenicRefinement { m, k, blocks };
    if out.reconstruct() != *p {
        return Err(DecompositionError::Identity(
            "refinement does not reconstruct the input".into(),
        ));
    }
    Ok(out)
}

/// Words `w` and base slots `(s', j)` with `w H^{s'}_j` landing in `(s, k)`
/// and `w` acting injectively on a nonzero `H^{s'}_j`.
///
/// For `1 <= s' <= m-1` every alternating word is allowed. `H^0_j` and
/// `H^m_j` vanish unless `j = 0`; constants are killed by `x*` and top forms
/// by `x`, so there the innermost letter must be `x` (resp. `x*`).
pub fn isotypic_words(m: usize, slot: GradedSlot) -> Vec<BlockKey> {
    let mut out = Vec::new();
    for len in 0..=slot.k {
        let j = slot.k - len;
        for word in OmegaWord::all_of_length(len) {
            let base_s = slot.s as i64 - word.grade_shift();
            if base_s < 0 || base_s > m as i64 {
                continue;
            }
            let base_s = base_s as usize;
            let allowed = if base_s >= 1 && base_s < m {
                true
            } else if j != 0 {
                false
            } else {
                match word.innermost() {
                    None => true,
                    Some(l) => (base_s == 0) == (l == operators::Letter::X),
                }
            };
            // grades along the way stay inside 0..=m
            let mut g = base_s as i64;
            let mut in_range = true;
            for l in word.letters().iter().rev() {
                g += if *l == operators::Letter::X { 1 } else { -1 };
                in_range &= g >= 0 && g <= m as i64;
            }
            if allowed && in_range {
                out.push(BlockKey::new(base_s, j, word));
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn t(m: usize, alpha: &[u32], idx: &[usize], c: i64) -> PolyForm {
        PolyForm::term(m, alpha, idx, q(c)).unwrap()
    }

    #[test]
    fn harmonic_of_harmonic_is_single_layer() {
        let p = t(3, &[1, 1, 0], &[2], 1);
        let layers = harmonic_decompose(&p, GradedSlot::new(1, 2)).unwrap();
        assert_eq!(layers.components.len(), 1);
        assert_eq!(layers.layer(0), p);
    }

    #[test]
    fn harmonic_of_r2() {
        let p = PolyForm::r_squared(3);
        let layers = harmonic_decompose(&p, GradedSlot::new(0, 2)).unwrap();
        assert!(layers.layer(0).is_zero());
        assert_eq!(layers.layer(1), PolyForm::constant(3, q(1)));
    }

    #[test]
    fn harmonic_of_x1_squared() {
        // x1^2 = (x1^2 - r^2/3) + r^2 (1/3)
        let p = t(3, &[2, 0, 0], &[], 1);
        let layers = harmonic_decompose(&p, GradedSlot::new(0, 2)).unwrap();
        let third = Rational::new(1.into(), 3.into());
        assert_eq!(layers.layer(1), PolyForm::constant(3, third.clone()));
        let expected0 = &p - &PolyForm::r_squared(3).scale(&third);
        assert_eq!(layers.layer(0), expected0);
        assert!(laplacian(&layers.layer(0)).is_zero());
        assert!(harmonic_decompose(&p, GradedSlot::new(0, 3)).is_err());
    }

    #[test]
    fn ker_project_on_h_element() {
        let h = spaces::basis_h(3, 1, 1).unwrap();
        let p = h.elements()[0].clone();
        let kb = ker_project(&p, GradedSlot::new(1, 1)).unwrap();
        assert_eq!(kb.h, p);
        assert!(kb.u.is_zero() && kb.v.is_zero() && kb.w.is_zero());
        kb.certify().unwrap();
    }

    #[test]
    fn ker_project_pi4_constants() {
        // m=3, s=1, k=2: c1 = 1, c2 = 2, denominator 1*2*5 = 10
        assert_eq!(projection_constants(3, 1, 2), (1, 2));
        let w = spaces::basis_w(3, 1, 2).unwrap();
        let p = w.elements()[1].clone();
        let kb = ker_project(&p, GradedSlot::new(1, 2)).unwrap();
        assert_eq!(kb.w, p);
        let dd = operators::d(&operators::dstar(&p));
        assert_eq!(kb.w_source.scale_int(10), dd);
    }

    #[test]
    fn ker_project_rejects_non_harmonic() {
        let p = t(3, &[2, 0, 0], &[1], 1);
        match ker_project(&p, GradedSlot::new(1, 2)) {
            Err(DecompositionError::NotHarmonic { image }) => assert_eq!(image, t(3, &[0, 0, 0], &[1], 2)),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn fischer_of_h_element() {
        let h = spaces::basis_h(3, 1, 2).unwrap();
        let p = h.elements()[2].clone();
        let c = fischer_decompose(&p).unwrap();
        assert_eq!(c.len(), 1);
        let b = c.get(&BlockKey::new(1, 2, OmegaWord::empty())).unwrap();
        assert_eq!(b.form, p);
    }

    #[test]
    fn fischer_of_r2_times_h() {
        let h = spaces::basis_h(3, 1, 1).unwrap().elements()[0].clone();
        let p = operators::r2(&h);
        let c = fischer_decompose(&p).unwrap();
        let words: Vec<String> = c.blocks().map(|(k, _)| k.word.to_string()).collect();
        assert_eq!(words, ["xx*", "x*x"]);
        for (key, b) in c.blocks() {
            assert_eq!((key.s, key.k), (1, 1));
            assert_eq!(b.base, -&h);
        }
        assert_eq!(reconstruct(&c), p);
    }

    #[test]
    fn empty_and_single_reconstruct() {
        assert!(reconstruct(&FischerComponents::new(3)).is_zero());
        let h = spaces::basis_h(3, 2, 1).unwrap().elements()[0].clone();
        let mut c = FischerComponents::new(3);
        c.insert(BlockKey::new(2, 1, OmegaWord::empty()), h.clone()).unwrap();
        assert_eq!(reconstruct(&c), h);
        assert!(c
            .insert(BlockKey::new(1, 1, OmegaWord::empty()), t(3, &[1, 0, 0], &[1], 1))
            .is_err());
    }

    #[test]
    fn monogenic_examples() {
        let mono = spaces::basis_monogenics(3, 2).unwrap();
        let p = mono.elements()[3].clone();
        let layers = monogenic_decompose(&p, 2).unwrap();
        assert_eq!(layers.components.len(), 1);
        assert_eq!(layers.components[&(0, MonogenicLayer::M)], p);

        let qf = spaces::basis_monogenics(3, 1).unwrap().elements()[5].clone();
        let p = x_plus_xstar(&qf);
        let layers = monogenic_decompose(&p, 2).unwrap();
        assert_eq!(layers.components.len(), 1);
        assert_eq!(layers.components[&(0, MonogenicLayer::XM)], qf);

        assert!(monogenic_decompose(&t(3, &[1, 0, 0], &[], 1), 2).is_err());
    }

    #[test]
    fn refine_examples() {
        let c = PolyForm::constant(3, q(2)) + t(3, &[0, 0, 0], &[1, 3], 5);
        let r = monogenic_refine(&c, 0).unwrap();
        assert!(r.blocks.keys().all(|(_, b)| *b == RefineBlock::H));
        assert_eq!(r.blocks.len(), 2);

        let e = spaces::basis_msk(3, 1, 1).unwrap().elements()[0].clone();
        let r = monogenic_refine(&e, 1).unwrap();
        assert_eq!(r.blocks.len(), 1);
        assert_eq!(r.blocks[&(1, RefineBlock::M)], e);

        assert!(matches!(
            monogenic_refine(&t(3, &[1, 0, 0], &[], 1), 1),
            Err(DecompositionError::NotMonogenic { .. })
        ));
    }

    #[test]
    fn isotypic_words_small() {
        // P^0_1 for m=1: only x* applied to H^1_0
        let keys = isotypic_words(1, GradedSlot::new(0, 1));
        assert_eq!(keys.len(), 1);
        assert_eq!(keys[0].word.to_string(), "x*");
        assert_eq!((keys[0].s, keys[0].k), (1, 0));
    }
}
