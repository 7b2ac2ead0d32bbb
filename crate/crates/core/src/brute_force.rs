//! Independent verification oracle: `SL_2(o_r)` as a concrete finite group,
//! its conjugacy classes and exact character table, and direct tests of the
//! quantities the construction side predicts.
//!
//! The character table uses the Dixon–Schneider method over a prime field
//! `F_p` with `p = 1 mod exp(G)` and `p > 2|G|`: central characters are the
//! common eigenvectors of the class-multiplication matrices (a random linear
//! combination of them has simple spectrum with high probability), degrees
//! follow from the norm of those eigenvectors, and each value `chi(g)` is
//! recovered exactly as the multiset of eigenvalues of `rho(g)`, i.e. as a
//! coefficient vector over the powers of a primitive `o(g)`-th root of unity.

use std::collections::{BTreeMap, HashMap, HashSet};

use rand::rngs::StdRng;
use rand::{Rng as _, SeedableRng};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::chain_ring::{Ring, RingElem};
use crate::clifford::ZetaPolynomial;
use crate::error::{Error, Result};
use crate::linalg::{group_order, norm_form, psi_a, CongruenceSubgroup, CyclicTriple, GroupKind, Mat2};

/// Default bound on the order of an enumerated group.
pub const DEFAULT_CAP: u64 = 200_000;

/// `SL_2(o_r)` with its elements indexed.
pub struct FiniteGroup {
    ring: Ring,
    elements: Vec<Mat2>,
    index: HashMap<Mat2, u32>,
    generators: Vec<Mat2>,
}

impl FiniteGroup {
    pub fn ring(&self) -> &Ring {
        &self.ring
    }

    pub fn order(&self) -> u64 {
        self.elements.len() as u64
    }

    pub fn elements(&self) -> &[Mat2] {
        &self.elements
    }

    pub fn generators(&self) -> &[Mat2] {
        &self.generators
    }

    pub fn index_of(&self, g: &Mat2) -> u32 {
        self.index[g]
    }

    pub fn mul(&self, g: &Mat2, h: &Mat2) -> Mat2 {
        g.mul(&self.ring, h)
    }

    pub fn inverse(&self, g: &Mat2) -> Mat2 {
        g.inverse(&self.ring).expect("group element")
    }

    /// Order of an element.
    pub fn element_order(&self, g: &Mat2) -> u64 {
        let mut x = *g;
        let mut n = 1;
        while x != Mat2::identity() {
            x = self.mul(&x, g);
            n += 1;
        }
        n
    }
}

/// Additive generators of `o_r`: the residue basis scaled by powers of `pi`.
fn additive_generators(ring: &Ring) -> Vec<RingElem> {
    let n = ring.residue_degree();
    let mut out = Vec::new();
    for i in 0..ring.r() {
        for j in 0..n {
            out.push(ring.shift_up(ring.from_residue(1 << j), i));
        }
    }
    out
}

/// Elementary matrices `E_12(x)`, `E_21(x)` over additive generators `x`;
/// they generate `SL_2` of a local ring.
pub fn sl2_generators(ring: &Ring) -> Vec<Mat2> {
    let (zero, one) = (ring.zero(), ring.one());
    additive_generators(ring)
        .into_iter()
        .flat_map(|x| [Mat2::new(one, x, zero, one), Mat2::new(one, zero, x, one)])
        .collect()
}

/// Enumerates `SL_2(o_r)`: for `a` a unit, `b` is free and `d = (1 + bc)/a`;
/// otherwise `c` is a unit, `d` is free and `b = (ad - 1)/c`.
pub fn enumerate_sl2(ring: &Ring, cap: u64) -> Result<FiniteGroup> {
    let size = group_order(GroupKind::SL, ring.q(), ring.r());
    if size > cap {
        return Err(Error::CapExceeded { size, cap });
    }
    let one = ring.one();
    let mut elements = Vec::with_capacity(size as usize);
    for a in ring.elements() {
        for c in ring.elements() {
            if let Some(a_inv) = ring.inv(a) {
                for b in ring.elements() {
                    let d = ring.mul(a_inv, ring.add(one, ring.mul(b, c)));
                    elements.push(Mat2::new(a, b, c, d));
                }
            } else if let Some(c_inv) = ring.inv(c) {
                for d in ring.elements() {
                    let b = ring.mul(c_inv, ring.sub(ring.mul(a, d), one));
                    elements.push(Mat2::new(a, b, c, d));
                }
            }
        }
    }
    debug_assert_eq!(elements.len() as u64, size);
    let index = elements.iter().enumerate().map(|(i, &g)| (g, i as u32)).collect();
    Ok(FiniteGroup { ring: ring.clone(), elements, index, generators: sl2_generators(ring) })
}

/// Conjugacy classes of a group.
#[derive(Clone, Debug)]
pub struct ConjugacyClasses {
    /// Class id of each element (by element index).
    pub class_of: Vec<u32>,
    /// Representative element index per class (the identity is class 0).
    pub reps: Vec<u32>,
    pub sizes: Vec<u64>,
}

impl ConjugacyClasses {
    pub fn count(&self) -> usize {
        self.reps.len()
    }
}

/// Classes by closing each element under conjugation by the generators.
pub fn conjugacy_classes(g: &FiniteGroup) -> ConjugacyClasses {
    let n = g.elements.len();
    let gens: Vec<(Mat2, Mat2)> = g.generators.iter().map(|x| (*x, g.inverse(x))).collect();
    let mut class_of = vec![u32::MAX; n];
    let mut reps = Vec::new();
    let mut sizes = Vec::new();
    let id = g.index_of(&Mat2::identity()) as usize;
    let order: Vec<usize> = std::iter::once(id).chain((0..n).filter(|&i| i != id)).collect();
    for start in order {
        if class_of[start] != u32::MAX {
            continue;
        }
        let cid = reps.len() as u32;
        reps.push(start as u32);
        class_of[start] = cid;
        let mut queue = vec![start];
        let mut size = 0u64;
        while let Some(i) = queue.pop() {
            size += 1;
            let x = g.elements[i];
            for (s, s_inv) in &gens {
                let y = g.mul(&g.mul(s, &x), s_inv);
                let j = g.index_of(&y) as usize;
                if class_of[j] == u32::MAX {
                    class_of[j] = cid;
                    queue.push(j);
                }
            }
        }
        sizes.push(size);
    }
    ConjugacyClasses { class_of, reps, sizes }
}

// ----- arithmetic modulo a prime --------------------------------------------

fn mul_mod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

fn pow_mod(mut a: u64, mut e: u64, p: u64) -> u64 {
    let mut acc = 1 % p;
    a %= p;
    while e > 0 {
        if e & 1 == 1 {
            acc = mul_mod(acc, a, p);
        }
        a = mul_mod(a, a, p);
        e >>= 1;
    }
    acc
}

fn inv_mod(a: u64, p: u64) -> u64 {
    pow_mod(a, p - 2, p)
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            out.push(d);
            while n.is_multiple_of(d) {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

fn primitive_root(p: u64) -> u64 {
    let factors = prime_factors(p - 1);
    (2..p)
        .find(|&g| factors.iter().all(|&f| pow_mod(g, (p - 1) / f, p) != 1))
        .expect("a prime has a primitive root")
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// The least prime `p > lower` with `p = 1 mod m`.
fn prime_one_mod(m: u64, lower: u64) -> u64 {
    let mut p = (lower / m + 1) * m + 1;
    while !is_prime(p) {
        p += m;
    }
    p
}

// ----- polynomials over F_p (coefficients low to high) ------------------------

fn poly_trim(a: &mut Vec<u64>) {
    while a.len() > 1 && *a.last().unwrap() == 0 {
        a.pop();
    }
}

fn poly_is_zero(a: &[u64]) -> bool {
    a.iter().all(|&c| c == 0)
}

fn poly_rem(a: &[u64], m: &[u64], p: u64) -> Vec<u64> {
    let mut r = a.to_vec();
    poly_trim(&mut r);
    let dm = m.len() - 1;
    let lead_inv = inv_mod(m[dm], p);
    while r.len() > dm && !poly_is_zero(&r) {
        let shift = r.len() - 1 - dm;
        let f = mul_mod(*r.last().unwrap(), lead_inv, p);
        for (i, &c) in m.iter().enumerate() {
            r[i + shift] = (r[i + shift] + p - mul_mod(f, c, p)) % p;
        }
        poly_trim(&mut r);
        if r.len() == 1 && dm == 0 {
            break;
        }
    }
    r
}

fn poly_divmod(a: &[u64], m: &[u64], p: u64) -> (Vec<u64>, Vec<u64>) {
    let mut r = a.to_vec();
    poly_trim(&mut r);
    let dm = m.len() - 1;
    if r.len() <= dm {
        return (vec![0], r);
    }
    let mut quot = vec![0; r.len() - dm];
    let lead_inv = inv_mod(m[dm], p);
    for shift in (0..quot.len()).rev() {
        let f = mul_mod(r[shift + dm], lead_inv, p);
        quot[shift] = f;
        for (i, &c) in m.iter().enumerate() {
            r[i + shift] = (r[i + shift] + p - mul_mod(f, c, p)) % p;
        }
    }
    r.truncate(dm.max(1));
    poly_trim(&mut r);
    (quot, r)
}

fn poly_mulmod(a: &[u64], b: &[u64], m: &[u64], p: u64) -> Vec<u64> {
    let mut prod = vec![0u64; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            prod[i + j] = (prod[i + j] + mul_mod(x, y, p)) % p;
        }
    }
    poly_rem(&prod, m, p)
}

fn poly_powmod(base: &[u64], mut e: u64, m: &[u64], p: u64) -> Vec<u64> {
    let mut acc = vec![1];
    let mut b = poly_rem(base, m, p);
    while e > 0 {
        if e & 1 == 1 {
            acc = poly_mulmod(&acc, &b, m, p);
        }
        b = poly_mulmod(&b, &b, m, p);
        e >>= 1;
    }
    acc
}

fn poly_gcd(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let (mut x, mut y) = (a.to_vec(), b.to_vec());
    poly_trim(&mut x);
    poly_trim(&mut y);
    while !poly_is_zero(&y) {
        let r = poly_rem(&x, &y, p);
        x = y;
        y = r;
    }
    let inv = inv_mod(*x.last().unwrap(), p);
    x.iter().map(|&c| mul_mod(c, inv, p)).collect()
}

fn poly_derivative(a: &[u64], p: u64) -> Vec<u64> {
    if a.len() <= 1 {
        return vec![0];
    }
    a.iter().enumerate().skip(1).map(|(i, &c)| mul_mod(c, i as u64 % p, p)).collect()
}

/// Roots of a squarefree polynomial that splits over `F_p`.
fn split_roots(f: &[u64], p: u64, rng: &mut StdRng, out: &mut Vec<u64>) {
    let deg = f.len() - 1;
    if deg == 0 {
        return;
    }
    if deg == 1 {
        let root = mul_mod(p - f[0], inv_mod(f[1], p), p);
        out.push(root);
        return;
    }
    loop {
        let a = rng.gen_range(0..p);
        let h = poly_powmod(&[a, 1], (p - 1) / 2, f, p);
        let mut h1 = h.clone();
        h1[0] = (h1[0] + p - 1) % p;
        let g = poly_gcd(f, &h1, p);
        let dg = g.len() - 1;
        if dg > 0 && dg < deg {
            let (quot, _) = poly_divmod(f, &g, p);
            split_roots(&g, p, rng, out);
            split_roots(&quot, p, rng, out);
            return;
        }
    }
}

// ----- dense linear algebra over F_p -----------------------------------------

/// Characteristic polynomial `det(x I - M)` via Hessenberg reduction.
fn char_poly(m: &[Vec<u64>], p: u64) -> Vec<u64> {
    let n = m.len();
    let mut h: Vec<Vec<u64>> = m.to_vec();
    for col in 0..n.saturating_sub(2) {
        let pivot = (col + 1..n).find(|&i| h[i][col] != 0);
        let Some(piv) = pivot else { continue };
        if piv != col + 1 {
            h.swap(piv, col + 1);
            for row in h.iter_mut() {
                row.swap(piv, col + 1);
            }
        }
        let inv = inv_mod(h[col + 1][col], p);
        for i in col + 2..n {
            let f = mul_mod(h[i][col], inv, p);
            if f == 0 {
                continue;
            }
            let pivot = h[col + 1].clone();
            for (x, &y) in h[i].iter_mut().zip(&pivot) {
                *x = (*x + p - mul_mod(f, y, p)) % p;
            }
            for row in h.iter_mut() {
                let v = mul_mod(f, row[i], p);
                row[col + 1] = (row[col + 1] + v) % p;
            }
        }
    }
    // Recurrence over leading principal submatrices of the Hessenberg form.
    let mut polys: Vec<Vec<u64>> = vec![vec![1]];
    for k in 0..n {
        let mut next = vec![0u64; k + 2];
        for (i, &c) in polys[k].iter().enumerate() {
            next[i + 1] = (next[i + 1] + c) % p;
            next[i] = (next[i] + p - mul_mod(h[k][k], c, p)) % p;
        }
        let mut prod = 1u64;
        for i in (0..k).rev() {
            prod = mul_mod(prod, h[i + 1][i], p);
            let coef = mul_mod(prod, h[i][k], p);
            if coef == 0 {
                continue;
            }
            for (j, &c) in polys[i].iter().enumerate() {
                next[j] = (next[j] + p - mul_mod(coef, c, p)) % p;
            }
        }
        polys.push(next);
    }
    polys.pop().unwrap()
}

/// A nonzero vector of the kernel of `M - lambda I`, assumed one-dimensional.
fn kernel_vector(m: &[Vec<u64>], lambda: u64, p: u64) -> Option<Vec<u64>> {
    let n = m.len();
    let mut a: Vec<Vec<u64>> = m.to_vec();
    for (i, row) in a.iter_mut().enumerate() {
        row[i] = (row[i] + p - lambda) % p;
    }
    let mut pivot_col = vec![usize::MAX; n];
    let mut row = 0;
    let mut free = Vec::new();
    for col in 0..n {
        let Some(piv) = (row..n).find(|&i| a[i][col] != 0) else {
            free.push(col);
            continue;
        };
        a.swap(row, piv);
        let inv = inv_mod(a[row][col], p);
        for v in a[row].iter_mut() {
            *v = mul_mod(*v, inv, p);
        }
        let pivot_row = a[row].clone();
        for (i, r) in a.iter_mut().enumerate() {
            if i != row && r[col] != 0 {
                let f = r[col];
                for (x, &y) in r.iter_mut().zip(&pivot_row) {
                    *x = (*x + p - mul_mod(f, y, p)) % p;
                }
            }
        }
        pivot_col[row] = col;
        row += 1;
    }
    if free.len() != 1 {
        return None;
    }
    let f = free[0];
    let mut v = vec![0u64; n];
    v[f] = 1;
    for (r, &c) in pivot_col.iter().enumerate().take(row) {
        v[c] = (p - a[r][f]) % p;
    }
    Some(v)
}

// ----- character table ----------------------------------------------------------

/// `chi(g) = sum_j multiplicities[j] zeta_order^j`: the eigenvalue multiset of
/// `rho(g)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CyclotomicValue {
    pub order: u64,
    pub multiplicities: Vec<u64>,
}

/// An exact character table.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CharacterTable {
    /// Class representatives.
    pub classes: Vec<Mat2>,
    pub class_sizes: Vec<u64>,
    pub class_orders: Vec<u64>,
    /// Degree of each irreducible, in the row order of `values`.
    pub dims: Vec<u64>,
    /// `values[chi][class]`.
    pub values: Vec<Vec<CyclotomicValue>>,
    /// The prime used for the modular computation.
    pub prime: u64,
    /// `values` reduced into `F_prime` under the fixed root of unity.
    #[serde(skip)]
    pub modular: Vec<Vec<u64>>,
    #[serde(skip)]
    class_of: Vec<u32>,
}

impl CharacterTable {
    pub fn order(&self) -> u64 {
        self.class_sizes.iter().sum()
    }

    /// Row orthogonality `sum_C |C| chi(g_C) chi'(g_C^{-1}) = |G| delta`,
    /// checked after mapping the exact values into `F_p` for a prime `p`
    /// distinct from the one used to compute them.
    pub fn check_orthogonality(&self, inverse_class: &[usize]) -> bool {
        let exp = self.class_orders.iter().fold(1, |a, &b| a / gcd(a, b) * b);
        let p = prime_one_mod(exp, self.prime.max(2 * self.order()));
        let root = pow_mod(primitive_root(p), (p - 1) / exp, p);
        let eval: Vec<Vec<u64>> = self
            .values
            .iter()
            .map(|row| {
                row.iter()
                    .map(|v| {
                        let z = pow_mod(root, exp / v.order, p);
                        v.multiplicities
                            .iter()
                            .enumerate()
                            .fold(0, |acc, (j, &m)| (acc + mul_mod(m % p, pow_mod(z, j as u64, p), p)) % p)
                    })
                    .collect()
            })
            .collect();
        let g = self.order() % p;
        (0..eval.len()).all(|a| {
            (0..eval.len()).all(|b| {
                let s = (0..self.classes.len()).fold(0, |acc, c| {
                    let term = mul_mod(self.class_sizes[c] % p, mul_mod(eval[a][c], eval[b][inverse_class[c]], p), p);
                    (acc + term) % p
                });
                s == if a == b { g } else { 0 }
            })
        })
    }

    /// JSON export: `{classes, dims, values}` with each value given as its
    /// eigenvalue-multiplicity vector over the powers of a root of unity.
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("a character table serializes")
    }

    /// The class of a group element (by element index).
    pub fn class_of(&self, element_index: u32) -> usize {
        self.class_of[element_index as usize] as usize
    }
}

/// Power map: the class of `g^t` for `t < o(g)`, per class.
fn power_classes(g: &FiniteGroup, cc: &ConjugacyClasses, orders: &[u64]) -> Vec<Vec<usize>> {
    cc.reps
        .iter()
        .zip(orders)
        .map(|(&rep, &o)| {
            let x = g.elements[rep as usize];
            let mut acc = Mat2::identity();
            (0..o)
                .map(|_| {
                    let c = cc.class_of[g.index_of(&acc) as usize] as usize;
                    acc = g.mul(&acc, &x);
                    c
                })
                .collect()
        })
        .collect()
}

/// Exact character table of an enumerated group.
pub fn character_table(g: &FiniteGroup, seed: u64) -> Result<CharacterTable> {
    let cc = conjugacy_classes(g);
    let k = cc.count();
    let order = g.order();
    let reps: Vec<Mat2> = cc.reps.iter().map(|&i| g.elements[i as usize]).collect();
    let orders: Vec<u64> = reps.iter().map(|x| g.element_order(x)).collect();
    let exp = orders.iter().fold(1, |a, &b| a / gcd(a, b) * b);
    let p = prime_one_mod(exp, 2 * order);
    let inverse_class: Vec<usize> =
        reps.iter().map(|x| cc.class_of[g.index_of(&g.inverse(x)) as usize] as usize).collect();
    let inverses: Vec<u32> = g.elements.iter().map(|x| g.index_of(&g.inverse(x))).collect();
    let mut rng = StdRng::seed_from_u64(seed);

    let mut attempt = 0;
    let (omegas, _) = loop {
        attempt += 1;
        if attempt > 8 {
            return Err(Error::Domain("no class-matrix combination with simple spectrum found".into()));
        }
        let weights: Vec<u64> = (0..k).map(|_| rng.gen_range(0..p)).collect();
        // columns[k][i] = sum over x in C_i of weights[class(x^{-1} z_k)].
        let columns: Vec<Vec<u64>> = cc
            .reps
            .par_iter()
            .map(|&z| {
                let zm = g.elements[z as usize];
                let mut col = vec![0u64; k];
                for (xi, &xinv) in inverses.iter().enumerate() {
                    let y = g.mul(&g.elements[xinv as usize], &zm);
                    let j = cc.class_of[g.index_of(&y) as usize] as usize;
                    let i = cc.class_of[xi] as usize;
                    col[i] = (col[i] + weights[j]) % p;
                }
                col
            })
            .collect();
        let m: Vec<Vec<u64>> = (0..k).map(|i| (0..k).map(|c| columns[c][i]).collect()).collect();
        let f = char_poly(&m, p);
        if poly_gcd(&f, &poly_derivative(&f, p), p).len() > 1 {
            continue;
        }
        let mut roots = Vec::new();
        split_roots(&f, p, &mut rng, &mut roots);
        if roots.len() != k {
            continue;
        }
        let vectors: Option<Vec<Vec<u64>>> = roots
            .par_iter()
            .map(|&lam| {
                let v = kernel_vector(&m, lam, p)?;
                let inv = inv_mod(v[0], p);
                (v[0] != 0).then(|| v.iter().map(|&x| mul_mod(x, inv, p)).collect())
            })
            .collect();
        match vectors {
            Some(v) => break (v, roots),
            None => continue,
        }
    };

    let root = primitive_root(p);
    let mut dims = Vec::with_capacity(k);
    let mut modular = Vec::with_capacity(k);
    for w in &omegas {
        let norm = (0..k).fold(0, |acc, i| {
            (acc + mul_mod(mul_mod(w[i], w[inverse_class[i]], p), inv_mod(cc.sizes[i] % p, p), p)) % p
        });
        let d_sq = mul_mod(order % p, inv_mod(norm, p), p);
        let d = (1..).take_while(|d| d * d <= order).find(|d| d * d % p == d_sq).ok_or_else(|| {
            Error::Domain("central character does not give an integral degree".into())
        })?;
        dims.push(d);
        modular.push((0..k).map(|i| mul_mod(mul_mod(w[i], d, p), inv_mod(cc.sizes[i] % p, p), p)).collect::<Vec<u64>>());
    }

    let powers = power_classes(g, &cc, &orders);
    let mut values = Vec::with_capacity(k);
    for (chi, &d) in modular.iter().zip(&dims) {
        let mut row = Vec::with_capacity(k);
        for c in 0..k {
            let o = orders[c];
            let zeta = pow_mod(root, (p - 1) / o, p);
            let o_inv = inv_mod(o % p, p);
            let mut mult = Vec::with_capacity(o as usize);
            for j in 0..o {
                let z_inv = pow_mod(zeta, (o - j % o) % o, p);
                let s = (0..o).fold(0, |acc, t| (acc + mul_mod(chi[powers[c][t as usize]], pow_mod(z_inv, t, p), p)) % p);
                let m = mul_mod(s, o_inv, p);
                if m > d {
                    return Err(Error::Domain("eigenvalue multiplicity out of range".into()));
                }
                mult.push(m);
            }
            if mult.iter().sum::<u64>() != d {
                return Err(Error::Domain("eigenvalue multiplicities do not sum to the degree".into()));
            }
            row.push(CyclotomicValue { order: o, multiplicities: mult });
        }
        values.push(row);
    }

    // Order rows by (degree, modular values) for determinism.
    let mut idx: Vec<usize> = (0..k).collect();
    idx.sort_by(|&a, &b| (dims[a], &modular[a]).cmp(&(dims[b], &modular[b])));
    let table = CharacterTable {
        classes: reps,
        class_sizes: cc.sizes.clone(),
        class_orders: orders,
        dims: idx.iter().map(|&i| dims[i]).collect(),
        values: idx.iter().map(|&i| values[i].clone()).collect(),
        prime: p,
        modular: idx.iter().map(|&i| modular[i].clone()).collect(),
        class_of: cc.class_of.clone(),
    };
    let mass: u128 = table.dims.iter().map(|&d| d as u128 * d as u128).sum();
    if mass != order as u128 {
        return Err(Error::Domain(format!("sum of squared degrees {mass} != |G| = {order}")));
    }
    Ok(table)
}

/// Inverse-class map of a table's classes within its group.
pub fn inverse_classes(g: &FiniteGroup, table: &CharacterTable) -> Vec<usize> {
    table
        .classes
        .iter()
        .map(|x| table.class_of(g.index_of(&g.inverse(x))))
        .collect()
}

/// Every irreducible degree of `SL_2(o_r)` as a zeta polynomial.
pub fn zeta_polynomial(ring: &Ring, cap: u64) -> Result<ZetaPolynomial> {
    let g = enumerate_sl2(ring, cap)?;
    let table = character_table(&g, 1)?;
    Ok(ZetaPolynomial::from_dimensions(table.dims.iter().copied()))
}

/// Cyclic matrices over `o_l'` modulo scalars, as representatives with
/// top-left entry zero.
pub fn cyclic_classes_mod_scalars(level: &Ring) -> Vec<Mat2> {
    let zero = level.zero();
    let mut out = Vec::new();
    for b in level.elements() {
        for c in level.elements() {
            for d in level.elements() {
                let m = Mat2::new(zero, b, c, d);
                if crate::linalg::is_cyclic(level, &m) {
                    out.push(m);
                }
            }
        }
    }
    out
}

/// Degrees of the irreducibles whose restriction to `K^l` contains some
/// `psi_[A]` with `A` cyclic, from the character table.
pub fn primitive_dimension_multiset(g: &FiniteGroup, table: &CharacterTable) -> Result<Vec<u64>> {
    let ring = g.ring();
    let r = ring.r();
    let (l, lp) = (r.div_ceil(2), r / 2);
    let level = ring.with_length(lp)?;
    let p = table.prime;
    let m = ring.psi_modulus();
    let zeta_m = pow_mod(primitive_root(p), (p - 1) / m, p);
    let powers: Vec<u64> = (0..m).map(|e| pow_mod(zeta_m, (m - e) % m, p)).collect();
    let lifts: Vec<Mat2> = cyclic_classes_mod_scalars(&level).iter().map(|a| a.convert(ring, &level)).collect();
    let kernel = CongruenceSubgroup::new(l, GroupKind::SL).elements(ring);
    // weight[class] = sum over k in that class of sum_A conj(psi_[A](k)).
    let per_k: Vec<(usize, u64)> = kernel
        .par_iter()
        .map(|k| {
            let s = lifts.iter().fold(0, |acc, a| (acc + powers[psi_a(ring, a, k, l) as usize]) % p);
            (table.class_of(g.index_of(k)), s)
        })
        .collect();
    let mut weight = vec![0u64; table.classes.len()];
    for (c, s) in per_k {
        weight[c] = (weight[c] + s) % p;
    }
    let k_inv = inv_mod(kernel.len() as u64 % p, p);
    let mut out = Vec::new();
    for (row, &d) in table.modular.iter().zip(&table.dims) {
        let n = row.iter().zip(&weight).fold(0, |acc, (&x, &w)| (acc + mul_mod(x, w, p)) % p);
        if mul_mod(n, k_inv, p) != 0 {
            out.push(d);
        }
    }
    out.sort_unstable();
    Ok(out)
}

/// Orbits of the cyclic classes `[B]` (matrices over `o_l'` modulo scalars)
/// under conjugation, found by closing under elementary generators.
pub fn orbit_oracle(level: &Ring) -> Vec<Vec<Mat2>> {
    let gens: Vec<(Mat2, Mat2)> = sl2_generators(level)
        .into_iter()
        .map(|s| (s, s.inverse(level).expect("invertible")))
        .collect();
    let normalize = |m: Mat2| m.sub(level, &Mat2::scalar(m.a));
    let mut seen: HashSet<Mat2> = HashSet::new();
    let mut orbits = Vec::new();
    for start in cyclic_classes_mod_scalars(level) {
        if !seen.insert(start) {
            continue;
        }
        let mut orbit = vec![start];
        let mut i = 0;
        while i < orbit.len() {
            let x = orbit[i];
            for (s, s_inv) in &gens {
                let y = normalize(s.mul(level, &x).mul(level, s_inv));
                if seen.insert(y) {
                    orbit.push(y);
                }
            }
            i += 1;
        }
        orbit.sort();
        orbits.push(orbit);
    }
    orbits
}

/// `|C_{SL_2(o_r)}(psi_[A])|` by direct count: `g` with
/// `g A g^{-1} = A + x I mod pi^l'` for some `x`.
pub fn stabilizer_order_oracle(g: &FiniteGroup, triple: &CyclicTriple) -> Result<u64> {
    let ring = g.ring();
    let level = ring.with_length(ring.r() / 2)?;
    let a = triple.matrix(&level);
    let mut count = 0;
    for x in &g.elements {
        let xl = x.convert(&level, ring);
        let conj = a.conjugate_by(&level, &xl).expect("invertible");
        let diff = conj.sub(&level, &a);
        if diff.b == level.zero() && diff.c == level.zero() && diff.a == diff.d {
            count += 1;
        }
    }
    Ok(count)
}

/// Whether `psi_[A]` extends to `H = C_S^l(A~) <e_lambda>`, where
/// `C_S^l(A~) = C_GL(A~) M^l` intersected with `SL_2(o_r)`, decided on the
/// enumerated subgroup: a linear character of `K^l` extends to `H` iff it is
/// trivial on `K^l` intersected with `[H, H]`.
pub fn extension_oracle(ring: &Ring, lift: &CyclicTriple, lambda: RingElem) -> Result<bool> {
    let r = ring.r();
    let l = r.div_ceil(2);
    let a_hat = lift.matrix(ring);
    let one = ring.one();
    // C_S^l(A~) = C_GL(A~) M^l intersected with SL_2: elements congruent to
    // some x I + y A~ modulo pi^l, with x, y ranging over residues mod pi^l.
    let short = ring.with_length(l)?;
    let mut gens = Vec::new();
    for x in short.elements().map(|x| ring.convert_from(&short, x)) {
        for y in short.elements().map(|y| ring.convert_from(&short, y)) {
            let det = norm_form(ring, lift.alpha, lift.beta, x, y);
            if ring.valuation(ring.sub(det, one)) >= l {
                let g = Mat2::scalar(x).add(ring, &a_hat.scale(ring, y));
                let fix = Mat2::new(one, ring.zero(), ring.zero(), ring.inv(det).expect("unit"));
                gens.push(g.mul(ring, &fix));
            }
        }
    }
    let kernel = CongruenceSubgroup::new(l, GroupKind::SL).elements(ring);
    gens.extend(kernel.iter().copied());
    let a_inv = ring.inv(lift.a).ok_or_else(|| Error::Domain("a must be a unit".into()))?;
    gens.push(Mat2::new(one, ring.mul(a_inv, lambda), ring.zero(), one));
    let (_, small) = generate(ring, &gens);
    let derived = derived_subgroup(ring, &small);
    let kernel_set: HashSet<Mat2> = kernel.into_iter().collect();
    Ok(derived
        .iter()
        .filter(|k| kernel_set.contains(k))
        .all(|k| psi_a(ring, &a_hat, k, l) == 0))
}

/// The subgroup generated by `gens`, together with a generating subset
/// chosen greedily (each kept generator enlarges the group).
fn generate(ring: &Ring, gens: &[Mat2]) -> (HashSet<Mat2>, Vec<Mat2>) {
    let mut group: HashSet<Mat2> = HashSet::from([Mat2::identity()]);
    let mut kept: Vec<Mat2> = Vec::new();
    for g in gens {
        if group.contains(g) {
            continue;
        }
        kept.push(*g);
        group = closure(ring, &kept, &[]).into_iter().collect();
    }
    (group, kept)
}

/// `[H, H]` for `H = <gens>`: the normal closure of the commutators of
/// generators.
fn derived_subgroup(ring: &Ring, gens: &[Mat2]) -> Vec<Mat2> {
    let inv: Vec<Mat2> = gens.iter().map(|x| x.inverse(ring).expect("invertible")).collect();
    let mut comms = Vec::new();
    for (x, xi) in gens.iter().zip(&inv) {
        for (y, yi) in gens.iter().zip(&inv) {
            comms.push(x.mul(ring, y).mul(ring, xi).mul(ring, yi));
        }
    }
    closure(ring, &comms, gens)
}

/// The smallest subgroup containing `gens` and normalized by `normalizers`.
fn closure(ring: &Ring, gens: &[Mat2], normalizers: &[Mat2]) -> Vec<Mat2> {
    let gens: Vec<Mat2> = gens.iter().copied().collect::<HashSet<_>>().into_iter().collect();
    let conj: Vec<(Mat2, Mat2)> =
        normalizers.iter().map(|g| (*g, g.inverse(ring).expect("invertible"))).collect();
    let mut seen: HashSet<Mat2> = HashSet::from([Mat2::identity()]);
    let mut out = vec![Mat2::identity()];
    let mut i = 0;
    while i < out.len() {
        let x = out[i];
        let products = gens.iter().map(|s| x.mul(ring, s));
        let conjugates = conj.iter().map(|(g, gi)| g.mul(ring, &x).mul(ring, gi));
        for y in products.chain(conjugates).collect::<Vec<_>>() {
            if seen.insert(y) {
                out.push(y);
            }
        }
        i += 1;
    }
    out
}

/// Multiset of degrees as a sorted `dimension -> count` map.
pub fn dimension_counts(dims: &[u64]) -> BTreeMap<u64, u64> {
    let mut out = BTreeMap::new();
    for &d in dims {
        *out.entry(d).or_insert(0) += 1;
    }
    out
}
