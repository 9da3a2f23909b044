//! Test-only oracles written without the library's operators or linear
//! algebra: forms are plain maps, operators follow the defining formulas term
//! by term, and ranks come from a dense Gaussian elimination.

#![allow(dead_code, clippy::needless_range_loop)]

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

pub type Q = BigRational;
/// `(alpha, I) -> coefficient`, I 1-based and increasing.
pub type Form = BTreeMap<(Vec<u32>, Vec<usize>), Q>;

pub fn q(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

pub fn binom(n: i64, k: i64) -> i64 {
    if k < 0 || n < 0 || k > n {
        return 0;
    }
    let mut r = 1i64;
    for i in 0..k {
        r = r * (n - i) / (i + 1);
    }
    r
}

/// All exponent vectors of length `m` and total degree `k`.
pub fn exponents(m: usize, k: usize) -> Vec<Vec<u32>> {
    if m == 0 {
        return if k == 0 { vec![vec![]] } else { vec![] };
    }
    let mut out = Vec::new();
    for first in 0..=k {
        for mut rest in exponents(m - 1, k - first) {
            rest.insert(0, first as u32);
            out.push(rest);
        }
    }
    out
}

/// Increasing index lists of length `s` from `1..=m`.
pub fn index_sets(m: usize, s: usize) -> Vec<Vec<usize>> {
    (0u32..1 << m)
        .filter(|b| b.count_ones() as usize == s)
        .map(|b| (1..=m).filter(|j| b & (1 << (j - 1)) != 0).collect())
        .collect()
}

pub fn slot_basis(m: usize, s: usize, k: usize) -> Vec<(Vec<u32>, Vec<usize>)> {
    let mut out = Vec::new();
    for a in exponents(m, k) {
        for i in index_sets(m, s) {
            out.push((a.clone(), i));
        }
    }
    out
}

fn add(f: &mut Form, key: (Vec<u32>, Vec<usize>), c: Q) {
    let e = f.entry(key.clone()).or_insert_with(Q::zero);
    *e += c;
    if e.is_zero() {
        f.remove(&key);
    }
}

/// `dx_j ^ dx_I` as (sign, index) or None.
fn wedge_one(j: usize, idx: &[usize]) -> Option<(i64, Vec<usize>)> {
    if idx.contains(&j) {
        return None;
    }
    let before = idx.iter().filter(|&&i| i < j).count();
    let mut out = idx.to_vec();
    out.push(j);
    out.sort_unstable();
    Some((if before % 2 == 0 { 1 } else { -1 }, out))
}

/// `dx_j ⌟ dx_I` as (sign, index) or None.
fn contract_one(j: usize, idx: &[usize]) -> Option<(i64, Vec<usize>)> {
    let pos = idx.iter().position(|&i| i == j)?;
    let mut out = idx.to_vec();
    out.remove(pos);
    Some((if pos % 2 == 0 { 1 } else { -1 }, out))
}

/// `d = Σ_j ∂_j dx_j ^`
pub fn d(f: &Form, m: usize) -> Form {
    let mut out = Form::new();
    for ((a, idx), c) in f {
        for j in 1..=m {
            if a[j - 1] == 0 {
                continue;
            }
            if let Some((sg, new)) = wedge_one(j, idx) {
                let mut b = a.clone();
                b[j - 1] -= 1;
                add(&mut out, (b, new), c * q(sg * a[j - 1] as i64));
            }
        }
    }
    out
}

/// `d* = −Σ_j ∂_j dx_j ⌟`
pub fn dstar(f: &Form, m: usize) -> Form {
    let mut out = Form::new();
    for ((a, idx), c) in f {
        for j in 1..=m {
            if a[j - 1] == 0 {
                continue;
            }
            if let Some((sg, new)) = contract_one(j, idx) {
                let mut b = a.clone();
                b[j - 1] -= 1;
                add(&mut out, (b, new), c * q(-sg * a[j - 1] as i64));
            }
        }
    }
    out
}

/// `x = −Σ_j x_j dx_j ^`
pub fn x(f: &Form, m: usize) -> Form {
    let mut out = Form::new();
    for ((a, idx), c) in f {
        for j in 1..=m {
            if let Some((sg, new)) = wedge_one(j, idx) {
                let mut b = a.clone();
                b[j - 1] += 1;
                add(&mut out, (b, new), c * q(-sg));
            }
        }
    }
    out
}

/// `x* = Σ_j x_j dx_j ⌟`
pub fn xstar(f: &Form, m: usize) -> Form {
    let mut out = Form::new();
    for ((a, idx), c) in f {
        for j in 1..=m {
            if let Some((sg, new)) = contract_one(j, idx) {
                let mut b = a.clone();
                b[j - 1] += 1;
                add(&mut out, (b, new), c * q(sg));
            }
        }
    }
    out
}

pub fn laplacian(f: &Form, m: usize) -> Form {
    let mut out = Form::new();
    for ((a, idx), c) in f {
        for j in 0..m {
            if a[j] >= 2 {
                let mut b = a.clone();
                b[j] -= 2;
                add(&mut out, (b, idx.clone()), c * q(a[j] as i64 * (a[j] as i64 - 1)));
            }
        }
    }
    out
}

/// Dense matrix of a linear map on `P^s_k` in the given source/target bases.
pub fn matrix(
    source: &[(Vec<u32>, Vec<usize>)],
    target: &[(Vec<u32>, Vec<usize>)],
    op: impl Fn(&Form) -> Form,
) -> Vec<Vec<Q>> {
    let pos: BTreeMap<_, _> = target.iter().enumerate().map(|(i, k)| (k.clone(), i)).collect();
    let mut rows = vec![vec![Q::zero(); source.len()]; target.len()];
    for (j, key) in source.iter().enumerate() {
        let mut f = Form::new();
        f.insert(key.clone(), Q::one());
        for (k, c) in op(&f) {
            rows[pos[&k]][j] = c;
        }
    }
    rows
}

pub fn rank(mut a: Vec<Vec<Q>>) -> usize {
    let rows = a.len();
    let cols = a.first().map_or(0, Vec::len);
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..rows).find(|&i| !a[i][c].is_zero()) else {
            continue;
        };
        a.swap(r, p);
        let pivot = a[r][c].clone();
        for i in 0..rows {
            if i != r && !a[i][c].is_zero() {
                let f = &a[i][c] / &pivot;
                for j in c..cols {
                    let v = &a[r][j] * &f;
                    a[i][j] -= v;
                }
            }
        }
        r += 1;
    }
    r
}

/// Solves `A y = b` for a full-column-rank `A`; None if inconsistent.
pub fn solve(a: &[Vec<Q>], b: &[Q]) -> Option<Vec<Q>> {
    let rows = a.len();
    let cols = a.first().map_or(0, Vec::len);
    let mut m: Vec<Vec<Q>> = a
        .iter()
        .zip(b)
        .map(|(r, v)| r.iter().cloned().chain(std::iter::once(v.clone())).collect())
        .collect();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..rows).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        let pivot = m[r][c].clone();
        for j in c..=cols {
            m[r][j] = &m[r][j] / &pivot;
        }
        for i in 0..rows {
            if i != r && !m[i][c].is_zero() {
                let f = m[i][c].clone();
                for j in c..=cols {
                    let v = &m[r][j] * &f;
                    m[i][j] -= v;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    if (r..rows).any(|i| !m[i][cols].is_zero()) {
        return None;
    }
    let mut y = vec![Q::zero(); cols];
    for (i, &c) in pivots.iter().enumerate() {
        y[c] = m[i][cols].clone();
    }
    Some(y)
}

/// Brute-force `dim { P in P^s_k : dP = 0, d*P = 0 }` (all of `P^s_0`).
pub fn dim_h(m: usize, s: usize, k: usize) -> usize {
    let src = slot_basis(m, s, k);
    if k == 0 {
        return src.len();
    }
    let mut a = Vec::new();
    if s < m {
        a.extend(matrix(&src, &slot_basis(m, s + 1, k - 1), |f| d(f, m)));
    }
    if s > 0 {
        a.extend(matrix(&src, &slot_basis(m, s - 1, k - 1), |f| dstar(f, m)));
    }
    src.len() - rank(a)
}

/// Classical count of harmonic polynomials of degree `k` in `m` variables.
pub fn dim_scalar_harmonic(m: usize, k: usize) -> usize {
    let (m, k) = (m as i64, k as i64);
    (binom(m + k - 1, k) - binom(m + k - 3, k - 2)) as usize
}

pub fn is_zero_abs(v: &Q) -> bool {
    v.abs().is_zero()
}

/// Library form to oracle form.
pub fn to_oracle(p: &hodge_fischer::PolyForm) -> Form {
    p.terms()
        .map(|(a, i, c)| ((a.exponents().to_vec(), i.indices().to_vec()), c.clone()))
        .collect()
}

/// Brute-force `dim ker(d + d*)` on all degree-`k` forms.
pub fn dim_monogenic(m: usize, k: usize) -> usize {
    let src: Vec<_> = (0..=m).flat_map(|s| slot_basis(m, s, k)).collect();
    if k == 0 {
        return src.len();
    }
    let tgt: Vec<_> = (0..=m).flat_map(|s| slot_basis(m, s, k - 1)).collect();
    let a = matrix(&src, &tgt, |f| {
        let mut out = d(f, m);
        for (key, c) in dstar(f, m) {
            add(&mut out, key, c);
        }
        out
    });
    src.len() - rank(a)
}
