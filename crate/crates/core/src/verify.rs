//! Verification suites: every identity the library relies on, checked exactly
//! on bases and on seeded random forms.
//!
//! Each suite returns a [`SuiteReport`]; a failure names the check, the
//! dimension and slot, and a small witness form where one exists.

use std::fmt;

use rand::Rng;

use crate::decomposition::{
    fischer_decompose, isotypic_words, ker_project, monogenic_decompose, monogenic_refine,
    reconstruct, RefineBlock,
};
use crate::linalg::rank_of_vectors;
use crate::operators;
use crate::polyform::{GradedSlot, MonomialBasis, OrthogonalMatrix, PolyForm};
use crate::random;
use crate::spaces::{self, projection_constants, SlotDims, SpaceBasis, SpaceKind};
use crate::Rational;

type Op = fn(&PolyForm) -> PolyForm;

/// The four first-order operators as used by the suites. Swapping one out
/// lets tests check that the suites catch a wrong sign.
#[derive(Clone, Copy)]
pub struct OperatorSet {
    pub d: Op,
    pub dstar: Op,
    pub x: Op,
    pub xstar: Op,
}

impl OperatorSet {
    pub fn standard() -> Self {
        Self {
            d: operators::d,
            dstar: operators::dstar,
            x: operators::x_op,
            xstar: operators::xstar_op,
        }
    }

    /// `d*` with its sign flipped.
    pub fn flipped_dstar() -> Self {
        fn neg_dstar(p: &PolyForm) -> PolyForm {
            -operators::dstar(p)
        }
        Self {
            dstar: neg_dstar,
            ..Self::standard()
        }
    }
}

impl Default for OperatorSet {
    fn default() -> Self {
        Self::standard()
    }
}

impl fmt::Debug for OperatorSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("OperatorSet")
    }
}

#[derive(Debug, Clone)]
pub struct VerifyConfig {
    pub dims: Vec<usize>,
    pub k_max: usize,
    pub seed: u64,
    pub trials: usize,
    pub ops: OperatorSet,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self {
            dims: vec![2, 3],
            k_max: 3,
            seed: 0,
            trials: 50,
            ops: OperatorSet::standard(),
        }
    }
}

impl VerifyConfig {
    /// `m` in 1..=4, degrees up to 5.
    pub fn deep() -> Self {
        Self {
            dims: vec![1, 2, 3, 4],
            k_max: 5,
            ..Self::default()
        }
    }

    fn rng(&self, suite: u64, m: usize) -> random::TestRng {
        random::rng(self.seed ^ suite.wrapping_mul(0x9e37_79b9_7f4a_7c15) ^ ((m as u64) << 48))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Failure {
    pub check: String,
    pub m: usize,
    pub slot: Option<GradedSlot>,
    pub witness: Option<PolyForm>,
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} at m={}", self.check, self.m)?;
        if let Some(sl) = self.slot {
            write!(f, ", s={}, k={}", sl.s, sl.k)?;
        }
        if let Some(w) = &self.witness {
            write!(f, "; witness: {w}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SuiteReport {
    pub name: &'static str,
    pub checks: usize,
    pub failures: Vec<Failure>,
}

impl SuiteReport {
    fn new(name: &'static str) -> Self {
        Self {
            name,
            checks: 0,
            failures: Vec::new(),
        }
    }

    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    fn check(&mut self, ok: bool, fail: impl FnOnce() -> Failure) {
        self.checks += 1;
        if !ok {
            self.failures.push(fail());
        }
    }
}

impl fmt::Display for SuiteReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.passed() {
            write!(f, "PASS {} ({} checks)", self.name, self.checks)
        } else {
            write!(
                f,
                "FAIL {} ({} of {} checks failed)",
                self.name,
                self.failures.len(),
                self.checks
            )?;
            for fl in self.failures.iter().take(5) {
                write!(f, "\n  {fl}")?;
            }
            Ok(())
        }
    }
}

fn fail(check: impl Into<String>, m: usize, slot: Option<GradedSlot>, witness: Option<PolyForm>) -> Failure {
    Failure {
        check: check.into(),
        m,
        slot,
        witness,
    }
}

fn slots(m: usize, k_max: usize) -> impl Iterator<Item = GradedSlot> {
    (0..=k_max).flat_map(move |k| (0..=m).map(move |s| GradedSlot::new(s, k)))
}

/// Splits `p` into single terms, in canonical order.
fn single_terms(p: &PolyForm) -> Vec<PolyForm> {
    let m = p.dim();
    p.terms()
        .map(|(a, i, c)| PolyForm::term(m, a.exponents(), i.indices(), c.clone()).expect("valid term"))
        .collect()
}

/// The smallest single-term witness for a failing linear identity: lowest
/// degree, then lowest grade, then canonical order.
fn linear_witness(p: &PolyForm, holds: impl Fn(&PolyForm) -> bool) -> PolyForm {
    single_terms(p)
        .into_iter()
        .filter(|t| !holds(t))
        .min_by_key(|t| t.homogeneous_slot().map(|sl| (sl.k, sl.s)))
        .unwrap_or_else(|| p.clone())
}

pub const RELATION_NAMES: [&str; 10] = [
    "{x,x}=0",
    "{x*,x*}=0",
    "{x,x*}=−r²",
    "{d,d}=0",
    "{d*,d*}=0",
    "{d,d*}=−Δ",
    "{x*,d}=E+Ê",
    "{x,d*}=E−Ê+m",
    "{x*,d*}=0",
    "{x,d}=0",
];

/// Both sides of relation `i` (indexing [`RELATION_NAMES`]) applied to `p`.
pub fn relation_sides(ops: &OperatorSet, i: usize, p: &PolyForm) -> (PolyForm, PolyForm) {
    let ac = |a: Op, b: Op| operators::anticommutator(a, b, p);
    let zero = PolyForm::zero(p.dim());
    match i {
        0 => (ac(ops.x, ops.x), zero),
        1 => (ac(ops.xstar, ops.xstar), zero),
        2 => (ac(ops.x, ops.xstar), -operators::r2(p)),
        3 => (ac(ops.d, ops.d), zero),
        4 => (ac(ops.dstar, ops.dstar), zero),
        5 => (ac(ops.d, ops.dstar), -operators::laplacian(p)),
        6 => (ac(ops.xstar, ops.d), operators::euler(p) + operators::skew_euler(p)),
        7 => (
            ac(ops.x, ops.dstar),
            operators::euler(p) - operators::skew_euler(p) + operators::times_dim(p),
        ),
        8 => (ac(ops.xstar, ops.dstar), zero),
        9 => (ac(ops.x, ops.d), zero),
        _ => panic!("relation index out of range"),
    }
}

/// The ten (anti)commutation relations on `trials` random mixed-grade forms
/// of degree `<= k_max` per `m`.
pub fn relations(cfg: &VerifyConfig) -> SuiteReport {
    let mut rep = SuiteReport::new("relations");
    for &m in &cfg.dims {
        let mut rng = cfg.rng(1, m);
        for _ in 0..cfg.trials {
            let terms = rng.gen_range(1..=6);
            let p = random::mixed_form(&mut rng, m, cfg.k_max, terms);
            for (i, name) in RELATION_NAMES.iter().enumerate() {
                let holds = |q: &PolyForm| {
                    let (l, r) = relation_sides(&cfg.ops, i, q);
                    l == r
                };
                let ok = holds(&p);
                rep.check(ok, || {
                    let w = linear_witness(&p, holds);
                    fail(*name, m, w.homogeneous_slot(), Some(w))
                });
            }
        }
    }
    rep
}

/// `E P = k P` and `Ê P = s P` on every monomial basis element.
pub fn euler(cfg: &VerifyConfig) -> SuiteReport {
    let mut rep = SuiteReport::new("euler");
    for &m in &cfg.dims {
        for sl in slots(m, cfg.k_max) {
            let ambient = MonomialBasis::for_slot(m, sl).expect("valid slot");
            for i in 0..ambient.len() {
                let e = ambient.element(i);
                let ok_e = operators::euler(&e) == e.scale_int(sl.k as i64);
                rep.check(ok_e, || fail("EP=kP", m, Some(sl), Some(e.clone())));
                let ok_s = operators::skew_euler(&e) == e.scale_int(sl.s as i64);
                rep.check(ok_s, || fail("ÊP=sP", m, Some(sl), Some(e.clone())));
            }
        }
    }
    rep
}

/// Concatenation of the `H`, `U`, `V`, `W` bases of one slot; fails if the
/// sum is not direct.
pub fn hodge_blocks(m: usize, sl: GradedSlot) -> Result<(SpaceBasis, [usize; 4]), spaces::SpaceError> {
    let parts = [
        spaces::basis_h(m, sl.s, sl.k)?,
        spaces::basis_u(m, sl.s, sl.k)?,
        spaces::basis_v(m, sl.s, sl.k)?,
        spaces::basis_w(m, sl.s, sl.k)?,
    ];
    let lens = [parts[0].len(), parts[1].len(), parts[2].len(), parts[3].len()];
    let elements: Vec<PolyForm> = parts.iter().flat_map(|b| b.elements().iter().cloned()).collect();
    let ambient = MonomialBasis::for_slot(m, sl)?;
    let basis = SpaceBasis::from_parts(m, SpaceKind::KerLaplace, (sl.s, sl.k), ambient, elements)?;
    Ok((basis, lens))
}

fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

/// `dim Ker = dim H + dim U + dim V + dim W` with a direct sum, and the
/// vanishing of `H^0_k`, `H^m_k` for `k >= 1`.
pub fn dimensions(cfg: &VerifyConfig) -> SuiteReport {
    let mut rep = SuiteReport::new("dimensions");
    for &m in &cfg.dims {
        for sl in slots(m, cfg.k_max) {
            let dims = match SlotDims::compute(m, sl.s, sl.k) {
                Ok(d) => d,
                Err(e) => {
                    rep.check(false, || fail(format!("space construction: {e}"), m, Some(sl), None));
                    continue;
                }
            };
            rep.check(dims.balanced(), || fail("dim Ker = H+U+V+W", m, Some(sl), None));
            let scalar = spaces::basis_scalar_harmonic(m, sl.k).map(|b| b.len()).unwrap_or(0);
            rep.check(dims.ker == scalar * binomial(m, sl.s), || {
                fail("dim Ker = dim harmonic scalars · C(m,s)", m, Some(sl), None)
            });
            rep.check(dims.p == spaces::dim_psk(m, sl.s, sl.k), || {
                fail("dim P = C(m+k−1,k)·C(m,s)", m, Some(sl), None)
            });
            match hodge_blocks(m, sl) {
                Ok((basis, _)) => {
                    let bad = basis
                        .elements()
                        .iter()
                        .find(|e| !operators::laplacian(e).is_zero())
                        .cloned();
                    rep.check(bad.is_none(), || fail("H+U+V+W inside Ker Δ", m, Some(sl), bad));
                }
                Err(e) => rep.check(false, || fail(format!("H+U+V+W not direct: {e}"), m, Some(sl), None)),
            }
            if sl.k >= 1 && (sl.s == 0 || sl.s == m) {
                rep.check(dims.h == 0, || fail("H^s_k = 0 for s in {0,m}", m, Some(sl), None));
            }
        }
    }
    rep
}

/// Projection algebra on `Ker^s_k Δ` for `k <= min(k_max, 4)`: resolution of
/// identity, idempotence, mutual annihilation, range membership, the
/// `dd*` identity, and agreement with a direct solve on random inputs.
pub fn projections(cfg: &VerifyConfig) -> SuiteReport {
    let mut rep = SuiteReport::new("projections");
    for &m in &cfg.dims {
        let mut rng = cfg.rng(4, m);
        for sl in slots(m, cfg.k_max.min(4)) {
            let ker = match spaces::basis_ker_laplace(m, sl.s, sl.k) {
                Ok(b) => b,
                Err(e) => {
                    rep.check(false, || fail(format!("Ker basis: {e}"), m, Some(sl), None));
                    continue;
                }
            };
            let (blocks, lens) = match hodge_blocks(m, sl) {
                Ok(b) => b,
                Err(e) => {
                    rep.check(false, || fail(format!("H+U+V+W not direct: {e}"), m, Some(sl), None));
                    continue;
                }
            };
            let ranges = [
                spaces::basis_h(m, sl.s, sl.k).expect("built above"),
                spaces::basis_u(m, sl.s, sl.k).expect("built above"),
                spaces::basis_v(m, sl.s, sl.k).expect("built above"),
                spaces::basis_w(m, sl.s, sl.k).expect("built above"),
            ];
            for e in ker.elements() {
                projection_checks(&mut rep, m, sl, e, &ranges);
            }
            for _ in 0..cfg.trials {
                let p = random::element_of(&mut rng, &ker);
                let ok = oracle_agrees(&p, sl, &blocks, lens);
                rep.check(ok, || fail("ker_project = basis solve", m, Some(sl), Some(p.clone())));
            }
        }
    }
    rep
}

fn projection_checks(
    rep: &mut SuiteReport,
    m: usize,
    sl: GradedSlot,
    e: &PolyForm,
    ranges: &[std::sync::Arc<SpaceBasis>; 4],
) {
    let w = || Some(e.clone());
    let kb = match ker_project(e, sl) {
        Ok(kb) => kb,
        Err(err) => {
            rep.check(false, || fail(format!("ker_project: {err}"), m, Some(sl), w()));
            return;
        }
    };
    rep.check(kb.sum() == *e, || fail("π1+π2+π3+π4 = 1", m, Some(sl), w()));
    rep.check(kb.certify().is_ok(), || fail("block certificates", m, Some(sl), w()));
    let parts = [&kb.h, &kb.u, &kb.v, &kb.w];
    const NAMES: [&str; 4] = ["π1", "π2", "π3", "π4"];
    for (i, part) in parts.iter().enumerate() {
        rep.check(ranges[i].contains(part), || {
            fail(format!("range of {}", NAMES[i]), m, Some(sl), w())
        });
        let again = match ker_project(part, sl) {
            Ok(kb) => kb,
            Err(err) => {
                rep.check(false, || fail(format!("ker_project: {err}"), m, Some(sl), w()));
                continue;
            }
        };
        let images = [&again.h, &again.u, &again.v, &again.w];
        for (j, img) in images.iter().enumerate() {
            let ok = if i == j { *img == *part } else { img.is_zero() };
            let name = if i == j {
                format!("{0}∘{0} = {0}", NAMES[i])
            } else {
                format!("{}∘{} = 0", NAMES[j], NAMES[i])
            };
            rep.check(ok, || fail(name, m, Some(sl), w()));
        }
    }
    let dds = operators::d(&operators::dstar(e));
    let dsd = operators::dstar(&operators::d(e));
    rep.check(dds == -&dsd, || fail("dd*P = −d*dP", m, Some(sl), w()));
    let (c1, c2) = projection_constants(m, sl.s, sl.k);
    let expected = if sl.s >= 1 && sl.s < m && sl.k >= 2 {
        kb.w_source.scale_int(c1 * c2 * (c1 + c2 + 2))
    } else {
        PolyForm::zero(m)
    };
    rep.check(dds == expected, || fail("dd*P = c1c2(c1+c2+2)P4", m, Some(sl), w()));
}

fn oracle_agrees(p: &PolyForm, sl: GradedSlot, blocks: &SpaceBasis, lens: [usize; 4]) -> bool {
    let Some(coeffs) = blocks.express(p) else {
        return false;
    };
    let Ok(kb) = ker_project(p, sl) else {
        return false;
    };
    let parts = [&kb.h, &kb.u, &kb.v, &kb.w];
    let mut offset = 0;
    for (len, part) in lens.iter().zip(parts) {
        let piece: PolyForm = blocks.elements()[offset..offset + len]
            .iter()
            .zip(&coeffs[offset..offset + len])
            .fold(PolyForm::zero(p.dim()), |acc, (e, c)| acc + e.scale(c));
        if piece != *part {
            return false;
        }
        offset += len;
    }
    true
}

/// Round trip of the full decomposition on random forms, plus the audit
/// that the admissible words over `H`-spaces exactly fill each slot.
pub fn fischer(cfg: &VerifyConfig) -> SuiteReport {
    let mut rep = SuiteReport::new("fischer");
    for &m in &cfg.dims {
        let mut rng = cfg.rng(5, m);
        for _ in 0..cfg.trials {
            let terms = rng.gen_range(1..=6);
            let p = random::mixed_form(&mut rng, m, cfg.k_max, terms);
            let ok = match fischer_decompose(&p) {
                Ok(c) => reconstruct(&c) == p && c.verify().is_ok(),
                Err(_) => false,
            };
            rep.check(ok, || fail("reconstruct ∘ fischer_decompose = 1", m, None, Some(p.clone())));
        }
        for sl in slots(m, cfg.k_max) {
            isotypic_audit(&mut rep, m, sl);
        }
    }
    rep
}

/// Only the word-count audit of [`fischer`], for every slot up to `k_max`.
pub fn isotypic(cfg: &VerifyConfig) -> SuiteReport {
    let mut rep = SuiteReport::new("isotypic");
    for &m in &cfg.dims {
        for sl in slots(m, cfg.k_max) {
            isotypic_audit(&mut rep, m, sl);
        }
    }
    rep
}

fn isotypic_audit(rep: &mut SuiteReport, m: usize, sl: GradedSlot) {
    let mut count = 0;
    let mut images = Vec::new();
    let ambient = MonomialBasis::for_slot(m, sl).expect("valid slot");
    for key in isotypic_words(m, sl) {
        let Ok(h) = spaces::basis_h(m, key.s, key.k) else {
            rep.check(false, || fail("H basis", m, Some(sl), None));
            return;
        };
        count += h.len();
        for e in h.elements() {
            match ambient.coords(&key.word.apply(e)) {
                Some(c) => images.push(c),
                None => rep.check(false, || fail(format!("{key} leaves its slot"), m, Some(sl), Some(e.clone()))),
            }
        }
    }
    let dim = spaces::dim_psk(m, sl.s, sl.k);
    rep.check(count == dim, || {
        fail(format!("Σ dim H over words = {count} ≠ dim P = {dim}"), m, Some(sl), None)
    });
    let rank = rank_of_vectors(ambient.len(), &images);
    rep.check(rank == dim, || fail(format!("word images have rank {rank} ≠ {dim}"), m, Some(sl), None));
}

fn x_plus_xstar(p: &PolyForm) -> PolyForm {
    operators::x_op(p) + operators::xstar_op(p)
}

fn rank_in(m: usize, slots: &[GradedSlot], forms: &[PolyForm]) -> Option<usize> {
    let ambient = MonomialBasis::for_slots(m, slots).ok()?;
    let rows: Option<Vec<_>> = forms.iter().map(|f| ambient.coords(f)).collect();
    Some(rank_of_vectors(ambient.len(), &rows?))
}

/// Monogenic structure for `k <= min(k_max, 4)`: `⊕ H^s_k ⊕ ⊕ M_{s,k}` is
/// the kernel of `d + d*`, `W^s_k = (x + x*) M_{s,k-1}`,
/// `xH + x*H = (x + x*)H ⊕ M_{s,k}`, and both monogenic splittings
/// reconstruct random input.
pub fn monogenic(cfg: &VerifyConfig) -> SuiteReport {
    let mut rep = SuiteReport::new("monogenic");
    for &m in &cfg.dims {
        let mut rng = cfg.rng(6, m);
        for k in 0..=cfg.k_max.min(4) {
            let all: Vec<GradedSlot> = (0..=m).map(|s| GradedSlot::new(s, k)).collect();
            let mut parts = Vec::new();
            for s in 0..=m {
                parts.extend(spaces::basis_h(m, s, k).expect("valid slot").elements().iter().cloned());
                if s >= 1 && s < m && k >= 1 {
                    parts.extend(spaces::basis_msk(m, s, k).expect("in range").elements().iter().cloned());
                }
            }
            let mono = spaces::basis_monogenics(m, k).expect("valid degree");
            let rank = rank_in(m, &all, &parts);
            let at_k = Some(GradedSlot::new(0, k));
            rep.check(rank == Some(parts.len()) && parts.len() == mono.len(), || {
                fail("⊕H ⊕ ⊕M_(s,k) has the dimension of the monogenics", m, at_k, None)
            });
            let bad = parts.iter().find(|e| !operators::dirac(e).is_zero()).cloned();
            rep.check(bad.is_none(), || fail("⊕H ⊕ ⊕M_(s,k) ⊂ Ker(d+d*)", m, at_k, bad));

            for s in 1..m {
                let sl = GradedSlot::new(s, k);
                if k >= 2 {
                    let w = spaces::basis_w(m, s, k).expect("valid slot");
                    let imgs: Vec<PolyForm> = spaces::basis_msk(m, s, k - 1)
                        .expect("in range")
                        .elements()
                        .iter()
                        .map(x_plus_xstar)
                        .collect();
                    let ok = imgs.iter().all(|f| w.contains(f))
                        && rank_in(m, &[sl], &imgs) == Some(w.len());
                    rep.check(ok, || fail("W^s_k = (x+x*)M_(s,k−1)", m, Some(sl), None));
                }
                if k >= 1 {
                    let h = spaces::basis_h(m, s, k - 1).expect("valid slot");
                    let slots3 = [GradedSlot::new(s - 1, k), GradedSlot::new(s + 1, k)];
                    let left: Vec<PolyForm> = h
                        .elements()
                        .iter()
                        .flat_map(|e| [operators::x_op(e), operators::xstar_op(e)])
                        .collect();
                    let mut right: Vec<PolyForm> = h.elements().iter().map(x_plus_xstar).collect();
                    right.extend(spaces::basis_msk(m, s, k).expect("in range").elements().iter().cloned());
                    let mut both = left.clone();
                    both.extend(right.iter().cloned());
                    let (rl, rr, rb) = (
                        rank_in(m, &slots3, &left),
                        rank_in(m, &slots3, &right),
                        rank_in(m, &slots3, &both),
                    );
                    let ok = rl.is_some() && rl == rr && rr == rb && rr == Some(right.len());
                    rep.check(ok, || fail("xH ⊕ x*H = (x+x*)H ⊕ M_(s,k)", m, Some(sl), None));
                }
            }

            let trials = cfg.trials.div_ceil(5).max(1);
            for _ in 0..trials {
                let terms = rng.gen_range(1..=5);
                let p = random::form_of_degree(&mut rng, m, k, terms);
                let ok = monogenic_decompose(&p, k).is_ok_and(|l| l.reconstruct() == p);
                rep.check(ok, || fail("monogenic layers reconstruct", m, at_k, Some(p.clone())));

                let e = random::element_of(&mut rng, &mono);
                let ok = monogenic_refine(&e, k).is_ok_and(|r| {
                    r.reconstruct() == e
                        && r.blocks.iter().all(|(&(s, b), f)| match b {
                            RefineBlock::H => spaces::basis_h(m, s, k).is_ok_and(|h| h.contains(f)),
                            RefineBlock::M => spaces::basis_msk(m, s, k).is_ok_and(|b| b.contains(f)),
                        })
                });
                rep.check(ok, || fail("monogenic refinement", m, at_k, Some(e.clone())));
            }
        }
    }
    rep
}

/// Invariance under exactly orthogonal test matrices: the four operators and
/// the Laplacian commute with the action, the action composes, preserves the
/// Fischer pairing and `H`, and the decomposition maps each `(s, k)` block
/// family to itself.
pub fn equivariance(cfg: &VerifyConfig) -> SuiteReport {
    let mut rep = SuiteReport::new("equivariance");
    let ops = cfg.ops;
    let named: [(&str, Op); 5] = [
        ("d", ops.d),
        ("d*", ops.dstar),
        ("x", ops.x),
        ("x*", ops.xstar),
        ("Δ", operators::laplacian),
    ];
    for &m in &cfg.dims {
        let mut rng = cfg.rng(7, m);
        let mats = random::test_matrices(m);
        for _ in 0..cfg.trials.div_ceil(5).max(1) {
            let terms = rng.gen_range(1..=5);
            let p = random::mixed_form(&mut rng, m, cfg.k_max.min(4), terms);
            let other = random::mixed_form(&mut rng, m, cfg.k_max.min(4), terms);
            for (qi, q) in mats.iter().enumerate() {
                let qp = act(&p, q);
                for (name, op) in named {
                    let holds = |f: &PolyForm| op(&act(f, q)) == act(&op(f), q);
                    rep.check(holds(&p), || {
                        let w = linear_witness(&p, holds);
                        fail(format!("{name} commutes with Q{qi}"), m, w.homogeneous_slot(), Some(w))
                    });
                }
                let q2 = &mats[(qi + 1) % mats.len()];
                let qj = (qi + 1) % mats.len();
                rep.check(act(&qp, q2) == act(&p, &q2.compose(q)), || {
                    fail(format!("Q{qj}(Q{qi} P) = (Q{qj}Q{qi}) P"), m, None, Some(p.clone()))
                });
                let same = p.fischer_inner(&other).ok() == qp.fischer_inner(&act(&other, q)).ok();
                rep.check(same, || fail(format!("Q{qi} preserves the Fischer pairing"), m, None, Some(p.clone())));
                let ok = blockwise_equivariant(&p, &qp, q);
                rep.check(ok, || fail(format!("fischer_decompose commutes with Q{qi}"), m, None, Some(p.clone())));
            }
        }
        for sl in slots(m, cfg.k_max.min(3)) {
            let h = spaces::basis_h(m, sl.s, sl.k).expect("valid slot");
            for q in &mats {
                let bad = h
                    .elements()
                    .iter()
                    .map(|e| act(e, q))
                    .find(|e| !h.contains(e));
                rep.check(bad.is_none(), || fail("Q H^s_k = H^s_k", m, Some(sl), bad));
            }
        }
    }
    rep
}

fn act(p: &PolyForm, q: &OrthogonalMatrix) -> PolyForm {
    p.apply_orthogonal(q).expect("same dimension")
}

fn blockwise_equivariant(p: &PolyForm, qp: &PolyForm, q: &OrthogonalMatrix) -> bool {
    let (Ok(a), Ok(b)) = (fischer_decompose(p), fischer_decompose(qp)) else {
        return false;
    };
    let group = |c: &crate::decomposition::FischerComponents| {
        let mut out: std::collections::BTreeMap<(usize, usize), PolyForm> = Default::default();
        for (key, block) in c.blocks() {
            let e = out.entry((key.s, key.k)).or_insert_with(|| PolyForm::zero(c.m));
            *e = &*e + &block.form;
        }
        out.retain(|_, f| !f.is_zero());
        out
    };
    let mut ga = group(&a);
    for f in ga.values_mut() {
        *f = f.apply_orthogonal(q).expect("same dimension");
    }
    ga == group(&b)
}

/// `<xP, Q> = <P, d*Q>` and `<x*P, Q> = <P, dQ>` on random pairs.
pub fn adjointness(cfg: &VerifyConfig) -> SuiteReport {
    let mut rep = SuiteReport::new("adjointness");
    let ops = cfg.ops;
    for &m in &cfg.dims {
        let mut rng = cfg.rng(8, m);
        for _ in 0..cfg.trials {
            let terms = rng.gen_range(1..=6);
            let p = random::mixed_form(&mut rng, m, cfg.k_max, terms);
            // Q is biased towards x P so that the pairings are rarely trivially zero
            let q = (ops.x)(&p) + (ops.xstar)(&p) + random::mixed_form(&mut rng, m, cfg.k_max + 1, 4);
            let pair = |a: &PolyForm, b: &PolyForm| a.fischer_inner(b).unwrap_or_else(|_| Rational::from_integer((-1).into()));
            rep.check(pair(&(ops.x)(&p), &q) == pair(&p, &(ops.dstar)(&q)), || {
                fail("⟨xP,Q⟩ = ⟨P,d*Q⟩", m, p.homogeneous_slot(), Some(p.clone()))
            });
            rep.check(pair(&(ops.xstar)(&p), &q) == pair(&p, &(ops.d)(&q)), || {
                fail("⟨x*P,Q⟩ = ⟨P,dQ⟩", m, p.homogeneous_slot(), Some(p.clone()))
            });
        }
    }
    rep
}

pub type Suite = fn(&VerifyConfig) -> SuiteReport;

pub const SUITES: [(&str, Suite); 8] = [
    ("relations", relations),
    ("euler", euler),
    ("dimensions", dimensions),
    ("projections", projections),
    ("fischer", fischer),
    ("monogenic", monogenic),
    ("equivariance", equivariance),
    ("adjointness", adjointness),
];

pub fn run_all(cfg: &VerifyConfig) -> Vec<SuiteReport> {
    SUITES.iter().map(|(_, f)| f(cfg)).collect()
}
