//! 2x2 matrices over a chain ring: cyclicity, companion form, centralizers,
//! determinant images, congruence subgroups and the trace-pairing characters.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::chain_ring::{Ring, RingElem};
use crate::error::{Error, Result};

/// A 2x2 matrix `[[a, b], [c, d]]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Mat2 {
    pub a: RingElem,
    pub b: RingElem,
    pub c: RingElem,
    pub d: RingElem,
}

impl Mat2 {
    pub fn new(a: RingElem, b: RingElem, c: RingElem, d: RingElem) -> Self {
        Self { a, b, c, d }
    }

    pub fn identity() -> Self {
        Self::scalar(RingElem(1))
    }

    pub fn scalar(x: RingElem) -> Self {
        Self::new(x, RingElem(0), RingElem(0), x)
    }

    pub fn entries(&self) -> [RingElem; 4] {
        [self.a, self.b, self.c, self.d]
    }

    pub fn map(&self, f: impl Fn(RingElem) -> RingElem) -> Self {
        Self::new(f(self.a), f(self.b), f(self.c), f(self.d))
    }

    pub fn add(&self, ring: &Ring, o: &Mat2) -> Mat2 {
        Mat2::new(ring.add(self.a, o.a), ring.add(self.b, o.b), ring.add(self.c, o.c), ring.add(self.d, o.d))
    }

    pub fn sub(&self, ring: &Ring, o: &Mat2) -> Mat2 {
        Mat2::new(ring.sub(self.a, o.a), ring.sub(self.b, o.b), ring.sub(self.c, o.c), ring.sub(self.d, o.d))
    }

    pub fn scale(&self, ring: &Ring, x: RingElem) -> Mat2 {
        self.map(|e| ring.mul(x, e))
    }

    pub fn mul(&self, ring: &Ring, o: &Mat2) -> Mat2 {
        let dot = |x1, y1, x2, y2| ring.add(ring.mul(x1, y1), ring.mul(x2, y2));
        Mat2::new(
            dot(self.a, o.a, self.b, o.c),
            dot(self.a, o.b, self.b, o.d),
            dot(self.c, o.a, self.d, o.c),
            dot(self.c, o.b, self.d, o.d),
        )
    }

    pub fn det(&self, ring: &Ring) -> RingElem {
        ring.sub(ring.mul(self.a, self.d), ring.mul(self.b, self.c))
    }

    pub fn trace(&self, ring: &Ring) -> RingElem {
        ring.add(self.a, self.d)
    }

    /// Inverse of an invertible matrix.
    pub fn inverse(&self, ring: &Ring) -> Option<Mat2> {
        let inv_det = ring.inv(self.det(ring))?;
        Some(Mat2::new(self.d, ring.neg(self.b), ring.neg(self.c), self.a).scale(ring, inv_det))
    }

    /// `g self g^{-1}`.
    pub fn conjugate_by(&self, ring: &Ring, g: &Mat2) -> Option<Mat2> {
        Some(g.mul(ring, self).mul(ring, &g.inverse(ring)?))
    }

    /// Entrywise map between two lengths of the same family (reduction or
    /// canonical lift).
    pub fn convert(&self, to: &Ring, from: &Ring) -> Mat2 {
        self.map(|e| to.convert_from(from, e))
    }
}

/// The companion-type data `(a, alpha, beta)` of a cyclic matrix, encoding
/// `[[0, a^{-1} alpha], [a, beta]]` (trace `beta`, determinant `-alpha`).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct CyclicTriple {
    pub a: RingElem,
    pub alpha: RingElem,
    pub beta: RingElem,
}

impl CyclicTriple {
    pub fn new(a: RingElem, alpha: RingElem, beta: RingElem) -> Self {
        Self { a, alpha, beta }
    }

    /// Convenience constructor from raw codes.
    pub fn from_codes(a: u64, alpha: u64, beta: u64) -> Self {
        Self::new(RingElem(a), RingElem(alpha), RingElem(beta))
    }

    pub fn matrix(&self, ring: &Ring) -> Mat2 {
        let a_inv = ring.inv(self.a).expect("triple entry a must be a unit");
        Mat2::new(RingElem(0), ring.mul(a_inv, self.alpha), self.a, self.beta)
    }

    /// Canonical lift (or reduction) entrywise to another length.
    pub fn convert(&self, to: &Ring, from: &Ring) -> CyclicTriple {
        CyclicTriple::new(
            to.convert_from(from, self.a),
            to.convert_from(from, self.alpha),
            to.convert_from(from, self.beta),
        )
    }

    /// Ordering key `(beta, alpha, a)` used to pick canonical orbit members.
    pub fn canonical_key(&self) -> (RingElem, RingElem, RingElem) {
        (self.beta, self.alpha, self.a)
    }

    pub fn format(&self, ring: &Ring) -> String {
        format!("({},{},{})", ring.format(self.a), ring.format(self.alpha), ring.format(self.beta))
    }
}

/// `A` is cyclic iff its reduction mod `pi` is not scalar.
pub fn is_cyclic(ring: &Ring, m: &Mat2) -> bool {
    ring.digit(m.b, 0) != 0 || ring.digit(m.c, 0) != 0 || ring.digit(m.a, 0) != ring.digit(m.d, 0)
}

/// Conjugates a cyclic matrix into companion form by an element of `SL_2`.
///
/// The cyclic vector is the first of `e1`, `e2`, `e1 + e2` that works.
/// Returns `(g, triple)` with `g A g^{-1} = triple.matrix()` and `det g = 1`.
pub fn companion_reduce(ring: &Ring, m: &Mat2) -> Result<(Mat2, CyclicTriple)> {
    if !is_cyclic(ring, m) {
        return Err(Error::Domain("matrix is scalar modulo pi, hence not cyclic".into()));
    }
    let one = ring.one();
    let zero = ring.zero();
    let candidates = [(one, zero), (zero, one), (one, one)];
    for (v1, v2) in candidates {
        let w1 = ring.add(ring.mul(m.a, v1), ring.mul(m.b, v2));
        let w2 = ring.add(ring.mul(m.c, v1), ring.mul(m.d, v2));
        let p = Mat2::new(v1, w1, v2, w2);
        let Some(g) = p.inverse(ring) else { continue };
        let det_g = g.det(ring);
        let det_g_inv = ring.inv(det_g).expect("g invertible");
        let g_sl = Mat2::new(ring.mul(det_g_inv, g.a), ring.mul(det_g_inv, g.b), g.c, g.d);
        let triple = CyclicTriple::new(det_g, ring.neg(m.det(ring)), m.trace(ring));
        debug_assert_eq!(m.conjugate_by(ring, &g_sl), Some(triple.matrix(ring)));
        return Ok((g_sl, triple));
    }
    unreachable!("a cyclic 2x2 matrix has one of e1, e2, e1+e2 as cyclic vector")
}

/// `g(x, y) = x^2 + beta x y - alpha y^2 = det(x I + y A)`.
pub fn norm_form(ring: &Ring, alpha: RingElem, beta: RingElem, x: RingElem, y: RingElem) -> RingElem {
    let xy = ring.mul(x, y);
    ring.sub(ring.add(ring.square(x), ring.mul(beta, xy)), ring.mul(alpha, ring.square(y)))
}

/// The centralizer `{x I + y A invertible}` of a cyclic matrix in `GL_2`,
/// as `(x, y)` parameters.
pub fn centralizer_gl<'a>(ring: &'a Ring, t: &CyclicTriple) -> impl Iterator<Item = (RingElem, RingElem)> + 'a {
    let (alpha, beta) = (t.alpha, t.beta);
    ring.elements()
        .flat_map(move |x| ring.elements().map(move |y| (x, y)))
        .filter(move |&(x, y)| ring.is_unit(norm_form(ring, alpha, beta, x, y)))
}

/// `|C_GL(A)|`, counted through residues: invertibility depends only on
/// `(x, y) mod pi`.
pub fn centralizer_gl_order(ring: &Ring, t: &CyclicTriple) -> u64 {
    let field = ring.field();
    let (al, be) = (ring.digit(t.alpha, 0), ring.digit(t.beta, 0));
    let residue_pairs = field
        .elements()
        .flat_map(|x| field.elements().map(move |y| (x, y)))
        .filter(|&(x, y)| {
            let v = field.add(field.add(field.mul(x, x), field.mul(be, field.mul(x, y))), field.mul(al, field.mul(y, y)));
            v != 0
        })
        .count() as u64;
    residue_pairs * ring.q().pow(2 * (ring.r() - 1))
}

/// Number of `(x, y)` with `g(x, y) = w`, found digit by digit.
pub fn count_norm_solutions(ring: &Ring, alpha: RingElem, beta: RingElem, w: RingElem) -> u64 {
    norm_search(ring, alpha, beta, w, ring.zero(), ring.zero(), 0, false)
}

/// Whether `g(x, y) = w` is solvable.
pub fn norm_represents(ring: &Ring, alpha: RingElem, beta: RingElem, w: RingElem) -> bool {
    norm_search(ring, alpha, beta, w, ring.zero(), ring.zero(), 0, true) > 0
}

#[allow(clippy::too_many_arguments)]
fn norm_search(
    ring: &Ring,
    alpha: RingElem,
    beta: RingElem,
    w: RingElem,
    x: RingElem,
    y: RingElem,
    depth: u32,
    stop_at_first: bool,
) -> u64 {
    let value = ring.sub(norm_form(ring, alpha, beta, x, y), w);
    if ring.valuation(value) < depth {
        return 0;
    }
    if depth == ring.r() {
        return 1;
    }
    let mut total = 0;
    for dx in ring.field().elements() {
        let nx = ring.add(x, ring.shift_up(ring.from_residue(dx), depth));
        for dy in ring.field().elements() {
            let ny = ring.add(y, ring.shift_up(ring.from_residue(dy), depth));
            total += norm_search(ring, alpha, beta, w, nx, ny, depth + 1, stop_at_first);
            if stop_at_first && total > 0 {
                return total;
            }
        }
    }
    total
}

/// `|C_SL(A)| = #{(x, y) : x^2 + beta x y - alpha y^2 = 1}`.
pub fn centralizer_sl_order(ring: &Ring, t: &CyclicTriple) -> u64 {
    count_norm_solutions(ring, t.alpha, t.beta, ring.one())
}

/// `det(C_GL(A))`: the units represented by the norm form, in canonical order.
pub fn det_image(ring: &Ring, alpha: RingElem, beta: RingElem) -> Vec<RingElem> {
    ring.units().filter(|&w| norm_represents(ring, alpha, beta, w)).collect()
}

/// Which group an order formula refers to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum GroupKind {
    GL,
    SL,
}

/// `|SL_2(o_r)| = (q^2-1) q^(3r-2)` and `|GL_2(o_r)| = (q^2-1)(q^2-q) q^(4(r-1))`.
pub fn group_order(kind: GroupKind, q: u64, r: u32) -> u64 {
    match kind {
        GroupKind::SL => (q * q - 1) * q.pow(3 * r - 2),
        GroupKind::GL => (q * q - 1) * (q * q - q) * q.pow(4 * (r - 1)),
    }
}

/// The congruence subgroup `M^i = I + pi^i M_2(o_r)` (or `K^i = M^i ∩ SL_2`).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CongruenceSubgroup {
    pub level: u32,
    pub kind: GroupKind,
}

impl CongruenceSubgroup {
    pub fn new(level: u32, kind: GroupKind) -> Self {
        Self { level, kind }
    }

    /// Enumerates the subgroup inside `ring`'s `GL_2`.
    pub fn elements(&self, ring: &Ring) -> Vec<Mat2> {
        let small = ring.with_length(ring.r() - self.level.min(ring.r())).ok();
        let reps: Vec<RingElem> = match &small {
            Some(s) if self.level < ring.r() => s.elements().map(|x| ring.convert_from(s, x)).collect(),
            _ => vec![ring.zero()],
        };
        let mut out = Vec::new();
        for &b11 in &reps {
            for &b12 in &reps {
                for &b21 in &reps {
                    for &b22 in &reps {
                        let b = Mat2::new(b11, b12, b21, b22).map(|e| ring.shift_up(e, self.level));
                        let g = Mat2::identity().add(ring, &b);
                        if self.kind == GroupKind::GL || g.det(ring) == ring.one() {
                            out.push(g);
                        }
                    }
                }
            }
        }
        out
    }

    /// Order of the subgroup for `level >= r/2` (and in general for `M^i`).
    pub fn order(&self, q: u64, r: u32) -> u64 {
        let j = r - self.level.min(r);
        match self.kind {
            GroupKind::GL => q.pow(4 * j),
            GroupKind::SL if self.level == 0 => group_order(GroupKind::SL, q, r),
            GroupKind::SL => q.pow(3 * j),
        }
    }
}

/// `psi_A(k) = psi(pi^j tr(A_hat B))` for `k = I + pi^j B` in `M^j`, with
/// `A_hat` any lift of `A` to `o_r`.  Returns the exponent of `psi`.
pub fn psi_a(ring: &Ring, a_hat: &Mat2, k: &Mat2, j: u32) -> u64 {
    let b = k.sub(ring, &Mat2::identity()).map(|e| ring.shift_down(e, j));
    let prod = a_hat.mul(ring, &b);
    ring.psi(ring.shift_up(prod.trace(ring), j))
}

/// The restriction of `psi_A` to `K^l` (which only depends on `A` modulo
/// scalars), evaluated on every element of `K^l`.
pub fn restrict_to_k(ring: &Ring, a_hat: &Mat2, level: u32) -> Vec<(Mat2, u64)> {
    CongruenceSubgroup::new(level, GroupKind::SL)
        .elements(ring)
        .into_iter()
        .map(|k| (k, psi_a(ring, a_hat, &k, level)))
        .collect()
}

/// The distinct values of the trace pairing as a table: for each `A` in
/// `M_2(o_i)` (canonically lifted) the vector of `psi_A` exponents on `M^{r-i}`.
/// Used to check non-degeneracy of the pairing.
pub fn pairing_table(ring: &Ring, i: u32, kind: GroupKind) -> Result<Vec<Vec<u64>>> {
    if 2 * i > ring.r() {
        return Err(Error::Domain(format!("level {i} exceeds r/2 = {}", ring.r() / 2)));
    }
    let small = ring.with_length(i)?;
    let group = CongruenceSubgroup::new(ring.r() - i, kind).elements(ring);
    let mats = all_matrices(&small);
    Ok(mats
        .iter()
        .map(|m| {
            let lift = m.convert(ring, &small);
            group.iter().map(|k| psi_a(ring, &lift, k, ring.r() - i)).collect()
        })
        .collect())
}

/// All of `M_2(o)` for a (small) ring.
pub fn all_matrices(ring: &Ring) -> Vec<Mat2> {
    let els: Vec<RingElem> = ring.elements().collect();
    let mut out = Vec::with_capacity(els.len().pow(4));
    for &a in &els {
        for &b in &els {
            for &c in &els {
                for &d in &els {
                    out.push(Mat2::new(a, b, c, d));
                }
            }
        }
    }
    out
}

/// Distinct rows of a table (used to count distinct characters).
pub fn distinct_rows(table: &[Vec<u64>]) -> usize {
    table.iter().collect::<BTreeSet<_>>().len()
}
