//! Seeded random test data: forms with small integer coefficients and exact
//! rational orthogonal matrices.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::polyform::{FormIndex, GradedSlot, Monomial, OrthogonalMatrix, PolyForm};
use crate::spaces::SpaceBasis;
use crate::Rational;

pub type TestRng = ChaCha8Rng;

pub fn rng(seed: u64) -> TestRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Nonzero integer in `[-9, 9]`.
pub fn coefficient(rng: &mut impl Rng) -> Rational {
    let mut c = 0i64;
    while c == 0 {
        c = rng.gen_range(-9..=9);
    }
    Rational::from_integer(c.into())
}

fn monomial(rng: &mut impl Rng, m: usize, k: usize) -> Monomial {
    let mut alpha = vec![0u32; m];
    for _ in 0..k {
        alpha[rng.gen_range(0..m)] += 1;
    }
    Monomial(alpha)
}

fn index(rng: &mut impl Rng, m: usize, s: usize) -> FormIndex {
    let mut all: Vec<usize> = (1..=m).collect();
    all.shuffle(rng);
    let mut idx = all[..s].to_vec();
    idx.sort_unstable();
    FormIndex::new(idx, m).expect("sorted distinct indices")
}

/// Up to `terms` random terms in one slot.
pub fn form_in_slot(rng: &mut impl Rng, m: usize, slot: GradedSlot, terms: usize) -> PolyForm {
    let mut p = PolyForm::zero(m);
    for _ in 0..terms {
        p.add_term(monomial(rng, m, slot.k), index(rng, m, slot.s), coefficient(rng));
    }
    p
}

/// Up to `terms` random terms of mixed grade and degree `<= max_degree`.
pub fn mixed_form(rng: &mut impl Rng, m: usize, max_degree: usize, terms: usize) -> PolyForm {
    let mut p = PolyForm::zero(m);
    for _ in 0..terms {
        let s = rng.gen_range(0..=m);
        let k = rng.gen_range(0..=max_degree);
        p.add_term(monomial(rng, m, k), index(rng, m, s), coefficient(rng));
    }
    p
}

/// Mixed grades, every term of degree exactly `k`.
pub fn form_of_degree(rng: &mut impl Rng, m: usize, k: usize, terms: usize) -> PolyForm {
    let mut p = PolyForm::zero(m);
    for _ in 0..terms {
        let s = rng.gen_range(0..=m);
        p.add_term(monomial(rng, m, k), index(rng, m, s), coefficient(rng));
    }
    p
}

/// Random combination of basis elements with coefficients in `[-9, 9]`.
pub fn element_of(rng: &mut impl Rng, basis: &SpaceBasis) -> PolyForm {
    let coeffs: Vec<Rational> = (0..basis.len())
        .map(|_| Rational::from_integer(rng.gen_range(-9i64..=9).into()))
        .collect();
    basis.combine(&coeffs)
}

fn ratio(n: i64, d: i64) -> Rational {
    Rational::new(n.into(), d.into())
}

/// Five exactly orthogonal test matrices for `m >= 2` (signed permutations
/// and Pythagorean rotations); for `m = 1` the two elements of `O(1)`.
pub fn test_matrices(m: usize) -> Vec<OrthogonalMatrix> {
    if m == 1 {
        return vec![
            OrthogonalMatrix::identity(1),
            OrthogonalMatrix::signed_permutation(&[0], &[-1]).expect("valid"),
        ];
    }
    let last = m - 1;
    let cycle: Vec<usize> = (0..m).map(|j| (j + 1) % m).collect();
    let mut signs = vec![1i64; m];
    signs[0] = -1;
    let swap: Vec<usize> = {
        let mut p: Vec<usize> = (0..m).collect();
        p.swap(0, last);
        p
    };
    let alt: Vec<i64> = (0..m).map(|j| if j % 2 == 0 { 1 } else { -1 }).collect();
    let perm1 = OrthogonalMatrix::signed_permutation(&cycle, &signs).expect("valid");
    let perm2 = OrthogonalMatrix::signed_permutation(&swap, &alt).expect("valid");
    let rot1 = OrthogonalMatrix::plane_rotation(m, 0, 1, ratio(3, 5), ratio(4, 5)).expect("valid");
    let rot2 =
        OrthogonalMatrix::plane_rotation(m, last - 1, last, ratio(5, 13), ratio(-12, 13)).expect("valid");
    let mixed = rot1.compose(&perm1).compose(&rot2);
    vec![perm1, perm2, rot1, rot2, mixed]
}
