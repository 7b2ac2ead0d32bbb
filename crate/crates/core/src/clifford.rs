//! Clifford-theoretic assembly of the primitive irreducible representations
//! of `SL_2(o_r)` at even `r = 2l`.
//!
//! For a cyclic `A` over `o_l` with stabilizer `T = C(psi_[A])`, the subgroup
//! `M_A = C(psi_A) E` (with `E` the extension set, read as elementary
//! matrices) is normal in `T` and `psi_[A]` extends to it.  Its image `Q` in
//! `SL_2(o_l)` is generated by the norm-one centralizer `{x I + y A}` and the
//! `e_lambda`, `lambda in E`; irreducibles of `M_A` above `psi_[A]` are one
//! extension twisted by `Irr(Q)`, all of degree 1 or 2.  Every such
//! irreducible has stabilizer `M_A` in `T`, so inducing to `SL_2(o_r)` gives
//!
//! ```text
//! Delta_1 = |Q / [Q, Q]| |M_A| / |T|         of dimension d = |SL_2(o_r)| / |M_A|,
//! Delta_2 = #{2-dim irreps of Q} |M_A| / |T|  of dimension 2d.
//! ```

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::brute_force;
use crate::chain_ring::{Ring, RingElem};
use crate::error::{Error, Result};
use crate::extension::{ExtensionProblem, ExtensionSet};
use crate::linalg::{centralizer_sl_order, group_order, norm_form, CyclicTriple, GroupKind, Mat2};
use crate::orbits::{classify_type, orbit_representatives, scalar_shift_count, OrbitType};

/// Orders of the groups attached to one cyclic triple.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StabilizerData {
    /// `|C_{SL_2(o_l')}(A)|`.
    pub centralizer_level: u64,
    /// `|C_{SL_2(o_r)}(psi_A)|`.
    pub character_stabilizer: u64,
    /// `|C_{SL_2(o_r)}(psi_[A])|`.
    pub class_stabilizer: u64,
    /// `|C_S^l(A~)| = |C_{SL_2(o_l)}(A~)| |K^l|`.
    pub cs_ell: u64,
    /// `|h^{l'}|`.
    pub h_l_prime: u64,
    /// `[E : (pi^l)]`.
    pub extension_index: u64,
    /// `|M_A|` (even `r` only).
    pub m_a: Option<u64>,
}

/// `R_o`: `4e` in characteristic zero, `2` in characteristic two.
pub fn threshold(ring: &Ring) -> u32 {
    ring.spec().threshold()
}

fn level_of(ring: &Ring) -> Result<Ring> {
    if ring.r() < 2 {
        return Err(Error::Domain("primitive data need r >= 2".into()));
    }
    ring.with_length(ring.r() / 2)
}

/// The extension set used to build `M_A`.  Below `R_o` (only `r = 2` in
/// characteristic zero) `M_A` is taken to be `C(psi_[A])`, i.e. `E = h^l`.
fn extension_set_for(problem: &ExtensionProblem) -> ExtensionSet {
    let ring = problem.ring();
    if ring.r() < threshold(ring) {
        let l = problem.l();
        ExtensionSet {
            cosets: problem.h_residues(l),
            level: l,
            regime: crate::extension::Regime::Brute,
        }
    } else {
        problem.e_set()
    }
}

/// Stabilizer orders for a triple over `o_l'` inside `SL_2(o_r)`.
pub fn stabilizers(ring: &Ring, triple: &CyclicTriple) -> Result<StabilizerData> {
    let level = level_of(ring)?;
    let problem = ExtensionProblem::new(ring, *triple)?;
    let (q, r, lp, l) = (ring.q(), ring.r(), level.r(), problem.l());
    let centralizer_level = centralizer_sl_order(&level, triple);
    let character_stabilizer = centralizer_level * q.pow(3 * (r - lp));
    let class_stabilizer = character_stabilizer * scalar_shift_count(&level, triple.beta);
    let ring_l = ring.with_length(l)?;
    let lift_l = problem.lift().convert(&ring_l, ring);
    let cs_ell = centralizer_sl_order(&ring_l, &lift_l) * q.pow(3 * lp);
    let e = extension_set_for(&problem);
    let extension_index = e.index_over_pi_ell() as u64;
    let m_a = (r % 2 == 0).then_some(character_stabilizer * extension_index);
    Ok(StabilizerData {
        centralizer_level,
        character_stabilizer,
        class_stabilizer,
        cs_ell,
        h_l_prime: problem.h_cardinality(lp),
        extension_index,
        m_a,
    })
}

/// `|M_A| = |C(psi_A)| [E : (pi^l)]` at even `r`.
pub fn m_a(ring: &Ring, triple: &CyclicTriple) -> Result<u64> {
    require_even(ring)?;
    Ok(stabilizers(ring, triple)?.m_a.expect("even r"))
}

fn require_even(ring: &Ring) -> Result<()> {
    if ring.r() % 2 == 1 || ring.r() < 2 {
        return Err(Error::UnsupportedRegime(format!(
            "primitive tables are constructed for even r only (got r = {}); use the brute-force oracle",
            ring.r()
        )));
    }
    Ok(())
}

/// `theta_lambda = #{(x, y) in o_l^2 : x^2 + beta x y - alpha y^2 = 1, lambda y = 0 mod pi^l}`.
pub fn theta_lambda(ring: &Ring, triple: &CyclicTriple, lambda: RingElem) -> Result<u64> {
    let level = level_of(ring)?;
    let l = ring.r().div_ceil(2);
    if ring.valuation(lambda) >= l {
        return Err(Error::Domain("theta is defined for lambda outside (pi^l)".into()));
    }
    let ring_l = ring.with_length(l)?;
    let t = triple.convert(&ring_l, &level);
    let lam = ring_l.convert_from(ring, lambda);
    let one = ring_l.one();
    let mut count = 0;
    for y in ring_l.elements().filter(|&y| ring_l.mul(lam, y) == ring_l.zero()) {
        for x in ring_l.elements() {
            if norm_form(&ring_l, t.alpha, t.beta, x, y) == one {
                count += 1;
            }
        }
    }
    Ok(count)
}

/// A finite subgroup of `SL_2(o_l)` given by its elements.
struct SmallGroup {
    elements: Vec<Mat2>,
}

impl SmallGroup {
    fn generated_by(ring: &Ring, gens: &[Mat2]) -> SmallGroup {
        let mut seen: HashSet<Mat2> = HashSet::from([Mat2::identity()]);
        let mut elements = vec![Mat2::identity()];
        let mut i = 0;
        while i < elements.len() {
            let g = elements[i];
            for h in gens {
                let gh = g.mul(ring, h);
                if seen.insert(gh) {
                    elements.push(gh);
                }
            }
            i += 1;
        }
        SmallGroup { elements }
    }

    fn order(&self) -> u64 {
        self.elements.len() as u64
    }

    fn derived_subgroup_order(&self, ring: &Ring) -> u64 {
        let inv: Vec<Mat2> = self.elements.iter().map(|g| g.inverse(ring).expect("invertible")).collect();
        let mut comms: HashSet<Mat2> = HashSet::new();
        for (x, xi) in self.elements.iter().zip(&inv) {
            for (y, yi) in self.elements.iter().zip(&inv) {
                comms.insert(x.mul(ring, y).mul(ring, xi).mul(ring, yi));
            }
        }
        let gens: Vec<Mat2> = comms.into_iter().collect();
        SmallGroup::generated_by(ring, &gens).order()
    }

    fn class_count(&self, ring: &Ring) -> u64 {
        let mut seen: HashSet<Mat2> = HashSet::new();
        let mut classes = 0;
        for g in &self.elements {
            if seen.contains(g) {
                continue;
            }
            classes += 1;
            for h in &self.elements {
                seen.insert(g.conjugate_by(ring, h).expect("invertible"));
            }
        }
        classes
    }
}

/// The `Delta` counts for one triple at even `r`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DeltaCounts {
    pub delta1: u64,
    pub delta2: u64,
    /// `|Q| = |M_A / K^l|`.
    pub quotient_order: u64,
    /// `|Q / [Q, Q]|`.
    pub abelianization: u64,
    /// `theta_lambda` when `[E : (pi^l)] = 2`.
    pub theta: Option<u64>,
}

/// `(Delta_1, Delta_2)` for a triple over `o_l` at `r = 2l`.
pub fn delta_counts(ring: &Ring, triple: &CyclicTriple) -> Result<DeltaCounts> {
    require_even(ring)?;
    let level = level_of(ring)?;
    let problem = ExtensionProblem::new(ring, *triple)?;
    let stab = stabilizers(ring, triple)?;
    let e = extension_set_for(&problem);
    let a = triple.matrix(&level);
    let a_inv = level.inv(triple.a).expect("unit");
    let one = level.one();
    let mut gens: Vec<Mat2> = Vec::new();
    for x in level.elements() {
        for y in level.elements() {
            if norm_form(&level, triple.alpha, triple.beta, x, y) == one {
                gens.push(Mat2::scalar(x).add(&level, &a.scale(&level, y)));
            }
        }
    }
    for &lam in &e.cosets {
        let b = level.mul(a_inv, level.convert_from(ring, lam));
        gens.push(Mat2::new(one, b, level.zero(), one));
    }
    let q_group = SmallGroup::generated_by(&level, &gens);
    let q_order = q_group.order();
    let m_a = stab.m_a.expect("even r");
    if q_order * ring.q().pow(3 * level.r()) != m_a {
        return Err(Error::Domain(format!(
            "|Q| = {q_order} inconsistent with |M_A| = {m_a} for {}",
            triple.format(&level)
        )));
    }
    let n1 = q_order / q_group.derived_subgroup_order(&level);
    let n2 = (q_order - n1) / 4;
    if n1 + 4 * n2 != q_order || n1 + n2 != q_group.class_count(&level) {
        return Err(Error::Domain("quotient has irreducibles of degree > 2".into()));
    }
    let t = stab.class_stabilizer;
    if !(n1 * m_a).is_multiple_of(t) || !(n2 * m_a).is_multiple_of(t) {
        return Err(Error::Domain("irreducibles of M_A do not induce irreducibly".into()));
    }
    let theta = if e.index_over_pi_ell() == 2 {
        let lam = *e.cosets.iter().find(|&&x| x != ring.zero()).expect("nonzero coset");
        Some(theta_lambda(ring, triple, lam)?)
    } else {
        None
    };
    Ok(DeltaCounts {
        delta1: n1 * m_a / t,
        delta2: n2 * m_a / t,
        quotient_order: q_order,
        abelianization: n1,
        theta,
    })
}

/// `(dimension, count)` of inequivalent irreducibles above one orbit.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct IrrBlock {
    pub dimension: u64,
    pub count: u64,
}

/// The irreducibles of `SL_2(o_{2l})` above `psi_[A]`.
pub fn irr_above(ring: &Ring, triple: &CyclicTriple) -> Result<Vec<IrrBlock>> {
    let stab = stabilizers(ring, triple)?;
    let delta = delta_counts(ring, triple)?;
    let d = group_order(GroupKind::SL, ring.q(), ring.r()) / stab.m_a.expect("even r");
    Ok([IrrBlock { dimension: d, count: delta.delta1 }, IrrBlock { dimension: 2 * d, count: delta.delta2 }]
        .into_iter()
        .filter(|b| b.count > 0)
        .collect())
}

/// Formal sum `sum count X^dim`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ZetaPolynomial {
    pub terms: BTreeMap<u64, u64>,
}

impl ZetaPolynomial {
    pub fn from_dimensions(dims: impl IntoIterator<Item = u64>) -> Self {
        let mut p = Self::default();
        for d in dims {
            p.add_term(d, 1);
        }
        p
    }

    pub fn add_term(&mut self, dimension: u64, count: u64) {
        if count > 0 {
            *self.terms.entry(dimension).or_insert(0) += count;
        }
    }

    pub fn add(&self, other: &ZetaPolynomial) -> ZetaPolynomial {
        let mut p = self.clone();
        for (&d, &c) in &other.terms {
            p.add_term(d, c);
        }
        p
    }

    pub fn count(&self, dimension: u64) -> u64 {
        self.terms.get(&dimension).copied().unwrap_or(0)
    }

    /// `sum count dim^2`.
    pub fn plancherel_mass(&self) -> u128 {
        self.terms.iter().map(|(&d, &c)| c as u128 * d as u128 * d as u128).sum()
    }

    pub fn total_count(&self) -> u64 {
        self.terms.values().sum()
    }

    /// `(n^max, #n^max)`.
    pub fn top(&self) -> Option<(u64, u64)> {
        self.terms.iter().next_back().map(|(&d, &c)| (d, c))
    }
}

impl fmt::Display for ZetaPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .rev()
            .map(|(&d, &c)| {
                let coeff = if c == 1 { String::new() } else { c.to_string() };
                match d {
                    0 => c.to_string(),
                    1 => format!("{coeff}X"),
                    _ => format!("{coeff}X^{d}"),
                }
            })
            .collect();
        f.write_str(&parts.join(" + "))
    }
}

impl Serialize for ZetaPolynomial {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let terms: BTreeMap<String, u64> = self.terms.iter().map(|(d, c)| (d.to_string(), *c)).collect();
        let mut st = s.serialize_struct("ZetaPolynomial", 2)?;
        st.serialize_field("terms", &terms)?;
        st.serialize_field("pretty", &self.to_string())?;
        st.end()
    }
}

/// One orbit's row of a primitive table.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TableRow {
    pub representative: String,
    #[serde(skip)]
    pub triple: CyclicTriple,
    #[serde(rename = "type")]
    pub orbit_type: OrbitType,
    /// `|C_{SL_2(o_l)}(A)|`.
    pub centralizer_sl: u64,
    /// `|M_A|`.
    pub m_a: u64,
    pub theta: Option<u64>,
    pub delta1: u64,
    pub delta2: u64,
    pub blocks: Vec<IrrBlock>,
}

/// All primitive irreducibles of `SL_2(o_{2l})`, orbit by orbit.
#[derive(Clone, Debug, Serialize)]
pub struct PrimitiveTable {
    pub ring: String,
    pub r: u32,
    pub rows: Vec<TableRow>,
    pub zeta: ZetaPolynomial,
}

impl PrimitiveTable {
    /// CSV with one line per orbit.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("representative,type,centralizer_sl,m_a,theta,delta1,delta2,dims\n");
        for row in &self.rows {
            let dims: Vec<String> = row.blocks.iter().map(|b| format!("{}x{}", b.count, b.dimension)).collect();
            out.push_str(&format!(
                "\"{}\",{},{},{},{},{},{},{}\n",
                row.representative,
                row.orbit_type,
                row.centralizer_sl,
                row.m_a,
                row.theta.map(|t| t.to_string()).unwrap_or_default(),
                row.delta1,
                row.delta2,
                dims.join(" ")
            ));
        }
        out
    }
}

/// The primitive table of `SL_2(o_r)` for even `r`.
pub fn primitive_table(ring: &Ring) -> Result<PrimitiveTable> {
    require_even(ring)?;
    let level = level_of(ring)?;
    let reps = orbit_representatives(&level);
    let rows: Result<Vec<TableRow>> = {
        use rayon::prelude::*;
        reps.par_iter()
            .map(|c| {
                let t = c.representative;
                let stab = stabilizers(ring, &t)?;
                let delta = delta_counts(ring, &t)?;
                Ok(TableRow {
                    representative: t.format(&level),
                    triple: t,
                    orbit_type: classify_type(&level, &t),
                    centralizer_sl: stab.centralizer_level,
                    m_a: stab.m_a.expect("even r"),
                    theta: delta.theta,
                    delta1: delta.delta1,
                    delta2: delta.delta2,
                    blocks: irr_above(ring, &t)?,
                })
            })
            .collect()
    };
    let rows = rows?;
    let mut zeta = ZetaPolynomial::default();
    for row in &rows {
        for b in &row.blocks {
            zeta.add_term(b.dimension, b.count);
        }
    }
    Ok(PrimitiveTable { ring: ring.spec().to_string(), r: ring.r(), rows, zeta })
}

/// The primitive zeta polynomial of `SL_2(o_r)` for even `r`.
pub fn primitive_zeta(ring: &Ring) -> Result<ZetaPolynomial> {
    Ok(primitive_table(ring)?.zeta)
}

/// Rows of one type, re-aggregated.
pub fn zeta_contributions(table: &PrimitiveTable, orbit_type: OrbitType) -> ZetaPolynomial {
    let mut p = ZetaPolynomial::default();
    for row in table.rows.iter().filter(|r| r.orbit_type == orbit_type) {
        for b in &row.blocks {
            p.add_term(b.dimension, b.count);
        }
    }
    p
}

/// `|SL_2(o_r)| - |SL_2(o_{r-1})|`.
pub fn primitive_plancherel_mass(q: u64, r: u32) -> u128 {
    let g = group_order(GroupKind::SL, q, r) as u128;
    let lower = if r >= 2 { group_order(GroupKind::SL, q, r - 1) as u128 } else { 1 };
    g - lower
}

/// Every dimension of `SL_2(o_r)`, `r` even: the primitive part plus the
/// full polynomial of `SL_2(o_{r-1})` from the character-table oracle.
pub fn full_zeta(ring: &Ring, cap: u64) -> Result<ZetaPolynomial> {
    let primitive = primitive_zeta(ring)?;
    let lower = ring.with_length(ring.r() - 1)?;
    let below = brute_force::zeta_polynomial(&lower, cap)?;
    Ok(primitive.add(&below))
}

/// `(n^max, #n^max)` of `SL_2(o_r)` for even `r`.
///
/// Read off the primitive part when its top dimension exceeds every
/// dimension below (`dim^2 <= |SL_2(o_{r-1})|`), otherwise from the full
/// polynomial.
pub fn nmax(ring: &Ring, cap: u64) -> Result<(u64, u64)> {
    let primitive = primitive_zeta(ring)?;
    let (d, c) = primitive.top().ok_or_else(|| Error::Domain("empty table".into()))?;
    let lower_order = group_order(GroupKind::SL, ring.q(), ring.r() - 1);
    if d * d > lower_order {
        return Ok((d, c));
    }
    full_zeta(ring, cap)?.top().ok_or_else(|| Error::Domain("empty table".into()))
}

/// Outcome of comparing two zeta polynomials.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "kebab-case")]
pub enum Verdict {
    /// Equal polynomials: the group algebras are isomorphic.
    Consistent,
    /// The largest dimension with differing counts.
    Distinguished { dimension: u64, count_a: u64, count_b: u64 },
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::Consistent => f.write_str("CONSISTENT: zeta polynomials agree"),
            Verdict::Distinguished { dimension, count_a, count_b } => {
                write!(f, "DISTINGUISHED at dimension {dimension}: counts {count_a} vs {count_b}")
            }
        }
    }
}

pub fn compare_polynomials(a: &ZetaPolynomial, b: &ZetaPolynomial) -> Verdict {
    let dims: std::collections::BTreeSet<u64> = a.terms.keys().chain(b.terms.keys()).copied().collect();
    for &d in dims.iter().rev() {
        let (ca, cb) = (a.count(d), b.count(d));
        if ca != cb {
            return Verdict::Distinguished { dimension: d, count_a: ca, count_b: cb };
        }
    }
    Verdict::Consistent
}

/// Compares `C[SL_2(A_r)]` and `C[SL_2(B_r)]` for even `r` through their full
/// zeta polynomials.
pub fn compare_group_algebras(a: &Ring, b: &Ring, cap: u64) -> Result<Verdict> {
    if a.q() != b.q() || a.r() != b.r() {
        return Err(Error::Domain("compared rings must share q and r".into()));
    }
    Ok(compare_polynomials(&full_zeta(a, cap)?, &full_zeta(b, cap)?))
}

/// Closed-form dimension window for one orbit:
/// `|G| / (q^5 |C(psi_A)|) <= dim <= |G| / |C_S^l|`, as `(lower, upper)`
/// with the lower bound rounded up.
pub fn dimension_window(ring: &Ring, stab: &StabilizerData) -> (u64, u64) {
    let g = group_order(GroupKind::SL, ring.q(), ring.r());
    let lower = g.div_ceil(ring.q().pow(5) * stab.character_stabilizer);
    (lower, g / stab.cs_ell)
}

/// Whether `n` lies in the window
/// `|C_S^l|^2 q^l / (|C(psi_A)| |H^{l'}| |K^l|) <= n <= |C(psi_A)| q^{l+10} / (|H^{l'}| |K^l|)`.
pub fn count_in_window(ring: &Ring, stab: &StabilizerData, n: u64) -> bool {
    let (q, r) = (ring.q() as u128, ring.r());
    let (l, lp) = (r.div_ceil(2), r / 2);
    let k = q.pow(3 * lp);
    let (cs, cpsi, h) = (stab.cs_ell as u128, stab.character_stabilizer as u128, stab.h_l_prime as u128);
    let n = n as u128;
    cs * cs * q.pow(l) <= n * cpsi * h * k && n * h * k <= cpsi * q.pow(l + 10)
}

/// `(q+1) q^{2l-1}`, the largest dimension at `r = 2l`.
pub fn max_dimension_bound(q: u64, r: u32) -> u64 {
    let l = r / 2;
    (q + 1) * q.pow(2 * l - 1)
}

/// Groups rows by their orbit type.
pub fn rows_by_type(table: &PrimitiveTable) -> HashMap<OrbitType, Vec<&TableRow>> {
    let mut out: HashMap<OrbitType, Vec<&TableRow>> = HashMap::new();
    for row in &table.rows {
        out.entry(row.orbit_type).or_default().push(row);
    }
    out
}
