//! Orbits of the cyclic characters `psi_[A]` of `K^l` under conjugation.
//!
//! A cyclic `A in M_2(o_l')` is conjugate to a companion triple `(a, alpha,
//! beta)`.  Two triples give `SL_2`-conjugate characters `psi_[A]` iff some
//! `s in o_l'` moves `(alpha, beta)` to the other pair by
//! `beta -> beta - 2s`, `alpha -> alpha - s^2 + s beta`, and the ratio of the
//! `a` entries lies in the determinant image `{x^2 + beta x y - alpha y^2}`
//! of the centralizer.  Classes are computed by union-find over all triples;
//! where closed-form representative lists are known they are generated
//! directly and labelled `structured`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::chain_ring::{Ring, RingElem};
use crate::error::{Error, Result};
use crate::linalg::{det_image, group_order, centralizer_sl_order, CyclicTriple, GroupKind};

/// Reduction type of `A` modulo `pi`, read off `X^2 + beta X + alpha`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum OrbitType {
    /// Split with distinct roots.
    SS,
    /// Irreducible.
    IR,
    /// Split with a repeated root (`beta = 0 mod pi`).
    SNS,
}

impl fmt::Display for OrbitType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            OrbitType::SS => "SS",
            OrbitType::IR => "IR",
            OrbitType::SNS => "SNS",
        };
        f.pad(s)
    }
}

/// How a representative list was produced.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Provenance {
    /// From a closed-form description of the classes.
    Structured,
    /// From the union-find partition of all triples.
    Computed,
}

/// The valuation parameter `k = min(val beta, l')` and the odd parameter `s`
/// of `alpha` (characteristic two only).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SnsParameters {
    pub k: u32,
    pub s: u32,
}

/// Classifies a triple over the level ring `o_l'`.
pub fn classify_type(level: &Ring, t: &CyclicTriple) -> OrbitType {
    let field = level.field();
    let beta = level.digit(t.beta, 0);
    if beta == 0 {
        return OrbitType::SNS;
    }
    let alpha = level.digit(t.alpha, 0);
    // X = beta Y turns the polynomial into beta^2 (Y^2 + Y + alpha/beta^2),
    // which splits iff the trace of alpha/beta^2 vanishes.
    let beta_sq_inv = field.inv(field.mul(beta, beta)).expect("beta is nonzero");
    if field.trace(field.mul(alpha, beta_sq_inv)) == 0 {
        OrbitType::SS
    } else {
        OrbitType::IR
    }
}

/// `k = val(beta)` in `o_l'` (so `k = l'` when `beta = 0`) and `s`: the
/// first odd position below `k` holding a nonzero digit of `alpha`, or
/// `2 floor(k/2) + 1` when there is none.
pub fn sns_parameters(level: &Ring, t: &CyclicTriple) -> SnsParameters {
    let k = level.valuation(t.beta);
    let s = (1..k)
        .step_by(2)
        .find(|&i| level.digit(t.alpha, i) != 0)
        .unwrap_or(2 * (k / 2) + 1);
    SnsParameters { k, s }
}

/// Applies the move `(alpha, beta) -> (alpha - s^2 + s beta, beta - 2s)`.
pub fn s_move(level: &Ring, alpha: RingElem, beta: RingElem, s: RingElem) -> (RingElem, RingElem) {
    let alpha2 = level.add(level.sub(alpha, level.square(s)), level.mul(s, beta));
    let beta2 = level.sub(beta, level.add(s, s));
    (alpha2, beta2)
}

/// Whether two triples give conjugate characters `psi_[A]`.
pub fn sigma_equivalent(level: &Ring, t1: &CyclicTriple, t2: &CyclicTriple) -> bool {
    let Some(a1_inv) = level.inv(t1.a) else { return false };
    let ratio = level.mul(t2.a, a1_inv);
    let pair_match = level
        .elements()
        .any(|s| s_move(level, t1.alpha, t1.beta, s) == (t2.alpha, t2.beta));
    pair_match && det_image(level, t1.alpha, t1.beta).contains(&ratio)
}

/// One class of `Sigma`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrbitClass {
    pub representative: CyclicTriple,
    pub orbit_type: OrbitType,
    pub params: SnsParameters,
    /// Number of triples `(a, alpha, beta)` in the class.
    pub class_size: u64,
    pub provenance: Provenance,
}

/// The partition of the `(alpha, beta)` pairs under `s`-moves.
struct PairClasses {
    /// Members of each class, sorted by `(beta, alpha)`.
    members: Vec<Vec<(RingElem, RingElem)>>,
}

fn find(parent: &mut [usize], mut x: usize) -> usize {
    while parent[x] != x {
        parent[x] = parent[parent[x]];
        x = parent[x];
    }
    x
}

fn pair_classes(level: &Ring) -> PairClasses {
    let n = level.size() as usize;
    let mut parent: Vec<usize> = (0..n * n).collect();
    let index = |alpha: RingElem, beta: RingElem| alpha.0 as usize * n + beta.0 as usize;
    for alpha in level.elements() {
        for beta in level.elements() {
            let from = index(alpha, beta);
            for s in level.elements().skip(1) {
                let (a2, b2) = s_move(level, alpha, beta, s);
                let (x, y) = (find(&mut parent, from), find(&mut parent, index(a2, b2)));
                if x != y {
                    parent[x.max(y)] = x.min(y);
                }
            }
        }
    }
    let mut members: Vec<Vec<(RingElem, RingElem)>> = Vec::new();
    let mut root_class = BTreeMap::new();
    // Visit pairs in (beta, alpha) order so each member list comes out sorted
    // and class ids follow the canonical order of their least members.
    for beta in level.elements() {
        for alpha in level.elements() {
            let root = find(&mut parent, index(alpha, beta));
            let next = members.len();
            let id = *root_class.entry(root).or_insert(next);
            if id == next {
                members.push(Vec::new());
            }
            members[id].push((alpha, beta));
        }
    }
    PairClasses { members }
}

/// Splits the units into cosets of a subgroup, each sorted, listed by least
/// element.
fn unit_cosets(level: &Ring, subgroup: &[RingElem]) -> Vec<Vec<RingElem>> {
    let mut seen = BTreeSet::new();
    let mut cosets = Vec::new();
    for u in level.units() {
        if seen.contains(&u) {
            continue;
        }
        let mut coset: Vec<RingElem> = subgroup.iter().map(|&d| level.mul(u, d)).collect();
        coset.sort();
        seen.extend(coset.iter().copied());
        cosets.push(coset);
    }
    cosets
}

/// The partition of all triples in `Sigma`, each class listed in canonical
/// order, classes ordered by their least member under `(beta, alpha, a)`.
pub fn sigma_partition(level: &Ring) -> Vec<Vec<CyclicTriple>> {
    let pairs = pair_classes(level);
    let mut classes = Vec::new();
    for members in &pairs.members {
        let (alpha0, beta0) = members[0];
        for coset in unit_cosets(level, &det_image(level, alpha0, beta0)) {
            let mut class: Vec<CyclicTriple> = members
                .iter()
                .flat_map(|&(alpha, beta)| coset.iter().map(move |&a| CyclicTriple::new(a, alpha, beta)))
                .collect();
            class.sort_by_key(|t| t.canonical_key());
            classes.push(class);
        }
    }
    classes.sort_by_key(|c| c[0].canonical_key());
    classes
}

/// Class size of a triple: (size of its `s`-move class) x |det image|.
fn class_size(level: &Ring, t: &CyclicTriple) -> u64 {
    let pairs: BTreeSet<_> = level.elements().map(|s| s_move(level, t.alpha, t.beta, s)).collect();
    pairs.len() as u64 * det_image(level, t.alpha, t.beta).len() as u64
}

fn make_class(level: &Ring, t: CyclicTriple, size: u64, provenance: Provenance) -> OrbitClass {
    OrbitClass {
        representative: t,
        orbit_type: classify_type(level, &t),
        params: sns_parameters(level, &t),
        class_size: size,
        provenance,
    }
}

/// Representatives computed from the union-find partition: the least member
/// of each class.
pub fn computed_representatives(level: &Ring) -> Vec<OrbitClass> {
    sigma_partition(level)
        .into_iter()
        .map(|class| make_class(level, class[0], class.len() as u64, Provenance::Computed))
        .collect()
}

/// Closed-form representatives where known, `None` for a `beta` regime that
/// has none.
///
/// * invertible `beta`, characteristic two: `(1, 0, beta)` and
///   `(1, alpha', beta)` with `alpha'` the least element outside
///   `{s^2 + s beta}`;
/// * invertible `beta`, characteristic zero, `l' > e`: `(1, alpha, beta)`
///   with `beta` a lift of a nonzero residue and `alpha` ranging over
///   elements whose digit `l' - 1` vanishes;
/// * non-invertible `beta`, characteristic zero, `l' >= 2e`: `beta = 0`, every
///   `alpha`, and `a` over coset representatives of the determinant image.
fn structured_unit_trace(level: &Ring) -> Option<Vec<CyclicTriple>> {
    let lp = level.r();
    let one = level.one();
    if level.is_char_two() {
        let mut out = Vec::new();
        for beta in level.units() {
            let image: BTreeSet<_> = level.elements().map(|s| level.add(level.square(s), level.mul(s, beta))).collect();
            let alpha_prime = level.elements().find(|x| !image.contains(x)).expect("image has index two");
            out.push(CyclicTriple::new(one, level.zero(), beta));
            out.push(CyclicTriple::new(one, alpha_prime, beta));
        }
        return Some(out);
    }
    let e = level.spec().ramification()?;
    if lp <= e {
        return None;
    }
    let mut out = Vec::new();
    for d in level.field().elements().skip(1) {
        let beta = level.from_residue(d);
        for alpha in level.elements().filter(|&x| level.digit(x, lp - 1) == 0) {
            out.push(CyclicTriple::new(one, alpha, beta));
        }
    }
    Some(out)
}

fn structured_nonunit_trace(level: &Ring) -> Option<Vec<CyclicTriple>> {
    if level.is_char_two() {
        return None;
    }
    let e = level.spec().ramification()?;
    if level.r() < 2 * e {
        return None;
    }
    let mut out = Vec::new();
    for alpha in level.elements() {
        let image = det_image(level, alpha, level.zero());
        for coset in unit_cosets(level, &image) {
            out.push(CyclicTriple::new(coset[0], alpha, level.zero()));
        }
    }
    Some(out)
}

/// A complete, duplicate-free list of class representatives, sorted by
/// canonical key.  Closed forms are used per `beta`-regime where available;
/// the remaining classes come from union-find.
pub fn orbit_representatives(level: &Ring) -> Vec<OrbitClass> {
    let unit_part = structured_unit_trace(level);
    let nonunit_part = structured_nonunit_trace(level);
    let mut out = Vec::new();
    if unit_part.is_none() || nonunit_part.is_none() {
        for c in computed_representatives(level) {
            let unit = level.is_unit(c.representative.beta);
            if (unit && unit_part.is_none()) || (!unit && nonunit_part.is_none()) {
                out.push(c);
            }
        }
    }
    for t in unit_part.into_iter().chain(nonunit_part).flatten() {
        out.push(make_class(level, t, class_size(level, &t), Provenance::Structured));
    }
    out.sort_by_key(|c| c.representative.canonical_key());
    out
}

/// Number of classes per type.
pub fn count_orbits_by_type(level: &Ring) -> BTreeMap<OrbitType, u64> {
    let mut counts = BTreeMap::new();
    for c in orbit_representatives(level) {
        *counts.entry(c.orbit_type).or_insert(0) += 1;
    }
    counts
}

/// Closed-form count of SS (equivalently IR) classes at level `l'`:
/// `(q-1) q^(l'-1)` in characteristic two, half that in characteristic zero
/// when `l' > e`.  `None` outside that regime.
pub fn split_class_count(level: &Ring) -> Option<u64> {
    let q = level.q();
    let lp = level.r();
    let base = (q - 1) * q.pow(lp - 1);
    match level.spec().ramification() {
        None => Some(base),
        Some(e) if lp > e => Some(base / 2),
        Some(_) => None,
    }
}

/// Number of `GL_2`-classes of SNS characters with parameters `(k, s)`,
/// enumerated: classes of SNS pairs `(alpha, beta)` under `s`-moves.
pub fn gl_sns_class_counts(level: &Ring) -> BTreeMap<(u32, u32), u64> {
    let pairs = pair_classes(level);
    let mut counts = BTreeMap::new();
    for members in &pairs.members {
        let (alpha, beta) = members[0];
        let t = CyclicTriple::new(level.one(), alpha, beta);
        if classify_type(level, &t) == OrbitType::SNS {
            let p = sns_parameters(level, &t);
            *counts.entry((p.k, p.s)).or_insert(0) += 1;
        }
    }
    counts
}

/// Which variant of the closed form for the `GL_2` SNS class count to use.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GlCountVariant {
    /// The formula as commonly stated: `q^{-floor(l'/2)} D(s)` when `k = l'`.
    AsStated,
    /// With `q^{-ceil(l'/2)} D(s)` when `k = l'`, which matches enumeration
    /// for odd `l'` as well.
    Corrected,
}

/// Closed-form number of `GL_2`-classes of SNS characters with parameters
/// `(k, s)` at level `l'` (characteristic two).  Returns `None` when the
/// expression is not an integer.
pub fn gl_sns_class_formula(q: u64, lp: u32, k: u32, s: u32, variant: GlCountVariant) -> Option<u64> {
    // Track the value as (numerator, power of q in the denominator).
    let (lp_i, k_i) = (lp as i64, k as i64);
    let (d_num, d_exp) = if s < k {
        (q - 1, lp_i - (s / 2) as i64 - 1)
    } else {
        (1, lp_i - (k / 2) as i64)
    };
    let (num, exp) = if 2 * k < lp {
        (2 * (q - 1) * d_num, d_exp - 1)
    } else if k < lp {
        ((q - 1) * d_num, d_exp + (lp / 2) as i64 - k_i - 1)
    } else {
        let half = match variant {
            GlCountVariant::AsStated => lp / 2,
            GlCountVariant::Corrected => lp.div_ceil(2),
        } as i64;
        (d_num, d_exp - half)
    };
    if exp >= 0 {
        Some(num * q.pow(exp as u32))
    } else {
        let den = q.pow((-exp) as u32);
        (num % den == 0).then(|| num / den)
    }
}

/// `#{x in o_l' : 2x = 0, x (x + beta) = 0}`: the residues of `h^{l'}`.
pub fn scalar_shift_count(level: &Ring, beta: RingElem) -> u64 {
    level
        .elements()
        .filter(|&x| level.add(x, x) == level.zero() && level.mul(x, level.add(x, beta)) == level.zero())
        .count() as u64
}

/// `|C_{SL_2(o_r)}(psi_A)| = |C_{SL_2(o_l')}(A)| q^{3(r - l')}`.
pub fn character_stabilizer_order(level: &Ring, r: u32, t: &CyclicTriple) -> u64 {
    centralizer_sl_order(level, t) * level.q().pow(3 * (r - level.r()))
}

/// `|C_{SL_2(o_r)}(psi_[A])| = |C(psi_A)| x #{x : A + x I ~ A}`.
pub fn class_stabilizer_order(level: &Ring, r: u32, t: &CyclicTriple) -> u64 {
    character_stabilizer_order(level, r, t) * scalar_shift_count(level, t.beta)
}

/// A row of an orbit report.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrbitRow {
    pub representative: String,
    #[serde(rename = "type")]
    pub orbit_type: OrbitType,
    pub k: u32,
    pub s: Option<u32>,
    /// Number of characters `psi_[B]` in the `SL_2(o_r)`-orbit.
    pub orbit_size: u64,
    /// `|C_{SL_2(o_r)}(psi_[A])|`.
    pub stabilizer_order: u64,
    pub provenance: Provenance,
}

/// The orbit report for `SL_2(o_r)`, `r >= 2`.
pub fn orbit_table(ring: &Ring) -> Result<Vec<OrbitRow>> {
    let r = ring.r();
    if r < 2 {
        return Err(Error::Domain("orbits of cyclic characters need r >= 2".into()));
    }
    let level = ring.with_length(r / 2)?;
    let g = group_order(GroupKind::SL, ring.q(), r);
    Ok(orbit_representatives(&level)
        .into_iter()
        .map(|c| {
            let stab = class_stabilizer_order(&level, r, &c.representative);
            OrbitRow {
                representative: c.representative.format(&level),
                orbit_type: c.orbit_type,
                k: c.params.k,
                s: level.is_char_two().then_some(c.params.s),
                orbit_size: g / stab,
                stabilizer_order: stab,
                provenance: c.provenance,
            }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn triples(level: &Ring, reps: &[OrbitClass]) -> Vec<String> {
        reps.iter().map(|c| c.representative.format(level)).collect()
    }

    #[test]
    fn level_one_representatives() {
        let level = Ring::parse("Z/2^1").unwrap();
        let reps = orbit_representatives(&level);
        assert_eq!(triples(&level, &reps), ["(1,0,0)", "(1,0,1)", "(1,1,1)"]);
    }

    #[test]
    fn z16_sns_representatives() {
        let level = Ring::parse("Z/2^2").unwrap();
        let sns: Vec<_> = orbit_representatives(&level)
            .into_iter()
            .filter(|c| c.orbit_type == OrbitType::SNS)
            .collect();
        assert_eq!(triples(&level, &sns), ["(1,0,0)", "(3,0,0)", "(1,1,0)", "(1,2,0)", "(1,3,0)", "(3,3,0)"]);
    }

    #[test]
    fn structured_matches_union_find() {
        for spec in ["Z/2^2", "Z/2^3", "Z/2^4", "F2[t]/t^2", "F2[t]/t^3", "GR(2^2,2)"] {
            let level = Ring::parse(spec).unwrap();
            let partition = sigma_partition(&level);
            let reps = orbit_representatives(&level);
            assert_eq!(reps.len(), partition.len(), "{spec}");
            let mut hit = vec![false; partition.len()];
            for c in &reps {
                let idx = partition.iter().position(|cl| cl.contains(&c.representative)).unwrap();
                assert!(!hit[idx], "{spec}: duplicate class");
                hit[idx] = true;
                assert_eq!(c.class_size, partition[idx].len() as u64, "{spec}");
            }
        }
    }

    #[test]
    fn sigma_equivalence_examples() {
        let level = Ring::parse("Z/2^2").unwrap();
        let t = |a, b, c| CyclicTriple::from_codes(a, b, c);
        assert!(sigma_equivalent(&level, &t(1, 3, 0), &t(1, 3, 0)));
        assert!(!sigma_equivalent(&level, &t(1, 3, 0), &t(3, 3, 0)));
        assert!(sigma_equivalent(&level, &t(1, 1, 0), &t(3, 1, 0)));
        let l1 = Ring::parse("Z/2^1").unwrap();
        assert!(!sigma_equivalent(&l1, &t(1, 0, 1), &t(1, 1, 1)));
    }

    #[test]
    fn sns_parameter_examples() {
        let level = Ring::parse("F2[t]/t^3").unwrap();
        let p = sns_parameters(&level, &CyclicTriple::from_codes(1, 0b010, 0));
        assert_eq!((p.k, p.s), (3, 1));
        let p = sns_parameters(&level, &CyclicTriple::from_codes(1, 0b101, 1));
        assert_eq!((p.k, p.s), (0, 1));
        let p = sns_parameters(&level, &CyclicTriple::from_codes(1, 0b001, 0b100));
        assert_eq!((p.k, p.s), (2, 3));
    }

    #[test]
    fn gl_formula_variants_differ_only_for_odd_top_level() {
        for lp in 1..=6u32 {
            for k in 1..=lp {
                for s in (1..=k + 1).step_by(2) {
                    let a = gl_sns_class_formula(2, lp, k, s, GlCountVariant::AsStated);
                    let b = gl_sns_class_formula(2, lp, k, s, GlCountVariant::Corrected);
                    if k < lp || lp % 2 == 0 {
                        assert_eq!(a, b);
                    }
                }
            }
        }
    }
}
