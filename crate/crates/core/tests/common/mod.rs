//! Independent reference implementations used by the integration tests.
//!
//! Everything here is built from plain nested loops and explicit matrix
//! entries so that it shares no code path with the library under test.

#![allow(dead_code)]

use num_complex::Complex64;
use qcolor::{CMatrix, Graph};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn from_rows(rows: &[&[Complex64]]) -> CMatrix {
    let n = rows.len();
    CMatrix::from_shape_fn((n, rows[0].len()), |(i, j)| rows[i][j])
}

pub fn identity(n: usize) -> CMatrix {
    CMatrix::from_shape_fn((n, n), |(i, j)| if i == j { c(1.0, 0.0) } else { c(0.0, 0.0) })
}

pub fn diag(values: &[f64]) -> CMatrix {
    let n = values.len();
    CMatrix::from_shape_fn((n, n), |(i, j)| if i == j { c(values[i], 0.0) } else { c(0.0, 0.0) })
}

pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    let (ar, ac) = a.dim();
    let (br, bc) = b.dim();
    let mut out = CMatrix::zeros((ar * br, ac * bc));
    for i in 0..ar {
        for j in 0..ac {
            for k in 0..br {
                for l in 0..bc {
                    out[[i * br + k, j * bc + l]] = a[[i, j]] * b[[k, l]];
                }
            }
        }
    }
    out
}

pub fn matmul(a: &CMatrix, b: &CMatrix) -> CMatrix {
    let (n, m) = a.dim();
    let p = b.dim().1;
    let mut out = CMatrix::zeros((n, p));
    for i in 0..n {
        for k in 0..m {
            let aik = a[[i, k]];
            if aik == c(0.0, 0.0) {
                continue;
            }
            for j in 0..p {
                out[[i, j]] += aik * b[[k, j]];
            }
        }
    }
    out
}

pub fn dagger(a: &CMatrix) -> CMatrix {
    a.t().mapv(|z| z.conj())
}

pub fn trace(a: &CMatrix) -> Complex64 {
    (0..a.nrows()).map(|i| a[[i, i]]).sum()
}

pub fn max_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    assert_eq!(a.dim(), b.dim());
    a.iter().zip(b.iter()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

/// `max |U^dagger U - I|`.
pub fn unitarity_defect(u: &CMatrix) -> f64 {
    max_diff(&matmul(&dagger(u), u), &identity(u.nrows()))
}

/// Distance after removing the best global phase (aligned on the largest entry of `b`).
pub fn diff_up_to_phase(a: &CMatrix, b: &CMatrix) -> f64 {
    let (idx, _) = b
        .iter()
        .enumerate()
        .max_by(|x, y| x.1.norm().partial_cmp(&y.1.norm()).unwrap())
        .unwrap();
    let av = a.iter().nth(idx).unwrap();
    let bv = b.iter().nth(idx).unwrap();
    let phase = (av / bv) / (av / bv).norm();
    max_diff(a, &b.mapv(|z| z * phase))
}

pub fn gell_mann_oracle() -> Vec<CMatrix> {
    let o = c(0.0, 0.0);
    let r = c(1.0, 0.0);
    let i = c(0.0, 1.0);
    let s = 1.0 / 3f64.sqrt();
    vec![
        from_rows(&[&[o, r, o], &[r, o, o], &[o, o, o]]),
        from_rows(&[&[o, -i, o], &[i, o, o], &[o, o, o]]),
        from_rows(&[&[r, o, o], &[o, -r, o], &[o, o, o]]),
        from_rows(&[&[o, o, r], &[o, o, o], &[r, o, o]]),
        from_rows(&[&[o, o, -i], &[o, o, o], &[i, o, o]]),
        from_rows(&[&[o, o, o], &[o, o, r], &[o, r, o]]),
        from_rows(&[&[o, o, o], &[o, o, -i], &[o, i, o]]),
        from_rows(&[&[c(s, 0.0), o, o], &[o, c(s, 0.0), o], &[o, o, c(-2.0 * s, 0.0)]]),
    ]
}

pub fn th_oracle() -> CMatrix {
    let w = Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI / 3.0);
    let one = c(1.0, 0.0);
    let pref = c(0.0, -1.0 / 3f64.sqrt());
    from_rows(&[&[one, one, one], &[one, w, w * w], &[one, w * w, w]]).mapv(|z| z * pref)
}

/// `|j>|k> -> |j>|(k + sign*j) mod 3>`, index `3j + k`.
pub fn controlled_add_oracle(sign: i32) -> CMatrix {
    let mut m = CMatrix::zeros((9, 9));
    for j in 0..3i32 {
        for k in 0..3i32 {
            let out = (k + sign * j).rem_euclid(3);
            m[[(3 * j + out) as usize, (3 * j + k) as usize]] = c(1.0, 0.0);
        }
    }
    m
}

pub fn lambda3() -> CMatrix {
    diag(&[1.0, -1.0, 0.0])
}

pub fn lambda8() -> CMatrix {
    let s = 1.0 / 3f64.sqrt();
    diag(&[s, s, -2.0 * s])
}

pub fn pauli_z() -> CMatrix {
    diag(&[1.0, -1.0])
}

/// `ops` placed on the given sites of an `n`-site register of dimension `d`, identity elsewhere.
pub fn embed(n: usize, d: usize, ops: &[(usize, CMatrix)]) -> CMatrix {
    let mut out = identity(1);
    for site in 0..n {
        let m = ops
            .iter()
            .find(|(s, _)| *s == site)
            .map(|(_, m)| m.clone())
            .unwrap_or_else(|| identity(d));
        out = kron(&out, &m);
    }
    out
}

/// Dense qutrit cost Hamiltonian: sum over edges of `l3 l3 + l8 l8`.
pub fn qutrit_hamiltonian(g: &Graph) -> CMatrix {
    let n = g.num_nodes();
    let dim = 3usize.pow(n as u32);
    let mut h = CMatrix::zeros((dim, dim));
    for &(u, v) in g.edges() {
        h = h + embed(n, 3, &[(u, lambda3()), (v, lambda3())]) + embed(n, 3, &[(u, lambda8()), (v, lambda8())]);
    }
    h
}

/// Dense qubit cost Hamiltonian; node `v` owns qubits `2v` and `2v + 1`.
pub fn qubit_hamiltonian(g: &Graph, alpha: f64) -> CMatrix {
    let n = 2 * g.num_nodes();
    let dim = 1usize << n;
    let z = pauli_z;
    let mut h = CMatrix::zeros((dim, dim));
    for &(v, w) in g.edges() {
        let (v1, v2, w1, w2) = (2 * v, 2 * v + 1, 2 * w, 2 * w + 1);
        h = h
            + embed(n, 2, &[(v1, z()), (v2, z()), (w1, z()), (w2, z())])
            + embed(n, 2, &[(v1, z()), (w1, z())])
            + embed(n, 2, &[(v2, z()), (w2, z())]);
    }
    for v in 0..g.num_nodes() {
        let (v1, v2) = (2 * v, 2 * v + 1);
        let term = embed(n, 2, &[(v1, z()), (v2, z())]) - embed(n, 2, &[(v1, z())]) - embed(n, 2, &[(v2, z())]);
        h = h + term.mapv(|x| x * alpha);
    }
    h
}

/// `exp(-i t H)` for diagonal `H`.
pub fn diagonal_exp(h: &CMatrix, t: f64) -> CMatrix {
    let n = h.nrows();
    let mut out = CMatrix::zeros((n, n));
    for i in 0..n {
        out[[i, i]] = Complex64::from_polar(1.0, -t * h[[i, i]].re);
    }
    out
}

pub fn expectation(h: &CMatrix, psi: &[Complex64]) -> f64 {
    let n = psi.len();
    let mut acc = c(0.0, 0.0);
    for i in 0..n {
        for j in 0..n {
            acc += psi[i].conj() * h[[i, j]] * psi[j];
        }
    }
    acc.re
}

pub fn random_state(dim: usize, rng: &mut ChaCha8Rng) -> Vec<Complex64> {
    let v: Vec<Complex64> = (0..dim)
        .map(|_| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
        .collect();
    let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    v.into_iter().map(|z| z / norm).collect()
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Base-`d` digits of `index`, most significant first.
pub fn digits(mut index: usize, d: usize, n: usize) -> Vec<usize> {
    let mut out = vec![0; n];
    for k in (0..n).rev() {
        out[k] = index % d;
        index /= d;
    }
    out
}

pub fn is_proper(g: &Graph, colors: &[usize]) -> bool {
    g.edges().iter().all(|&(u, v)| colors[u] != colors[v])
}

/// All labeled simple graphs on `n` nodes.
pub fn all_graphs(n: usize) -> Vec<Graph> {
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).collect();
    (0..1u64 << pairs.len())
        .map(|mask| {
            let edges = pairs
                .iter()
                .enumerate()
                .filter(|(i, _)| mask >> i & 1 == 1)
                .map(|(_, &e)| e);
            Graph::new(n, edges).unwrap()
        })
        .collect()
}

pub fn brute_force_three_colorable(g: &Graph) -> bool {
    let n = g.num_nodes();
    (0..3usize.pow(n as u32)).any(|i| is_proper(g, &digits(i, 3, n)))
}

/// Brute-force isomorphism test for small graphs.
pub fn isomorphic(a: &Graph, b: &Graph) -> bool {
    if a.num_nodes() != b.num_nodes() || a.num_edges() != b.num_edges() {
        return false;
    }
    let n = a.num_nodes();
    let mut perm: Vec<usize> = (0..n).collect();
    fn rec(k: usize, perm: &mut Vec<usize>, a: &Graph, b: &Graph) -> bool {
        if k == perm.len() {
            return a.edges().iter().all(|&(u, v)| b.has_edge(perm[u], perm[v]));
        }
        for i in k..perm.len() {
            perm.swap(k, i);
            if rec(k + 1, perm, a, b) {
                return true;
            }
            perm.swap(k, i);
        }
        false
    }
    rec(0, &mut perm, a, b)
}
