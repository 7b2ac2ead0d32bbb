//! The sets `h^j`, the extension set `E` and its two computation paths.
//!
//! Fix a cyclic triple `A = (a, alpha, beta)` over `o_l'` and a lift `A~`
//! over `o_r`, with `l = ceil(r/2)` and `l' = floor(r/2)`.  For `lambda` in
//!
//! ```text
//! h^j = { x in o_r : 2x = 0 and x (x + beta~) = 0  mod pi^j }
//! ```
//!
//! the elementary matrix `e_lambda = [[1, a~^{-1} lambda], [0, 1]]` stabilizes
//! `psi_[A]`, and `E` collects the `lambda in h^l` for which `psi_[A]`
//! extends to the group generated by `C_S^l(A~)` and `e_lambda`.  The direct
//! test: `lambda in E` iff `psi(f(lambda, x, y)) = 1` for every `(x, y)` with
//! `g(x, y) = 1 mod pi^l` and `lambda y = 0 mod pi^l`, where
//!
//! ```text
//! f(lambda, x, y) = x y lambda (beta~ - lambda) - alpha~ lambda y^2 + lambda (x^2 - 1)
//! g(x, y)         = x^2 + beta~ x y - alpha~ y^2.
//! ```
//!
//! `E` is a union of cosets of `(pi^l)` and is stored as coset
//! representatives with all digits at positions `>= l` equal to zero.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::chain_ring::{Ring, RingElem};
use crate::error::{Error, Result};
use crate::linalg::CyclicTriple;
use crate::orbits::sns_parameters;

/// Which path produced an extension set.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Regime {
    /// Closed form in characteristic zero.
    FastChar0,
    /// Digit conditions in characteristic two.
    FastChar2,
    /// Direct test of every `lambda`.
    Brute,
}

/// `E` as a set of coset representatives modulo `(pi^l)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExtensionSet {
    /// Representatives in canonical order.
    pub cosets: Vec<RingElem>,
    /// `l`: the cosets are taken modulo `(pi^l)`.
    pub level: u32,
    pub regime: Regime,
}

impl ExtensionSet {
    fn new(cosets: impl IntoIterator<Item = RingElem>, level: u32, regime: Regime) -> Self {
        let set: BTreeSet<_> = cosets.into_iter().collect();
        Self { cosets: set.into_iter().collect(), level, regime }
    }

    /// `[E : (pi^l)]`.
    pub fn index_over_pi_ell(&self) -> usize {
        self.cosets.len()
    }

    /// Whether `lambda in E`.
    pub fn contains(&self, ring: &Ring, lambda: RingElem) -> bool {
        self.cosets.binary_search(&ring.truncate(lambda, self.level)).is_ok()
    }

    /// Same cosets, regardless of provenance.
    pub fn same_set(&self, other: &ExtensionSet) -> bool {
        self.level == other.level && self.cosets == other.cosets
    }

    /// Whether the cosets form an additive group modulo `(pi^l)`.
    pub fn is_subgroup(&self, ring: &Ring) -> bool {
        self.cosets.iter().all(|&x| {
            self.cosets
                .iter()
                .all(|&y| self.contains(ring, ring.sub(x, y)))
        })
    }
}

/// Serializable form of an extension set.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExtensionReport {
    pub triple: String,
    pub regime: Regime,
    pub cosets: Vec<String>,
    pub index_over_pi_ell: usize,
}

/// How the `(x, y)` pairs are swept in the direct test.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sweep {
    /// `(x, y)` modulo `pi^l`, with `val(y) >= l - val(lambda)` imposed first
    /// and `x` found as roots of `g(x, y) = 1`.
    Restricted,
    /// Every `(x, y) in o_r^2`, filtered by the defining conditions.
    Full,
}

/// Per-`lambda` parameters of the characteristic-two criterion.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LambdaParameters {
    /// `val(lambda)`.
    pub i: u32,
    /// `min(val(lambda + beta~), l')`.
    pub j: u32,
    /// `j - s - max(l - i, l - k, ceil((l - s)/2))`.
    pub delta: i64,
}

/// A triple over `o_l'` together with a lift to `o_r`.
#[derive(Clone, Debug)]
pub struct ExtensionProblem {
    ring: Ring,
    level: Ring,
    triple: CyclicTriple,
    lift: CyclicTriple,
    l: u32,
    lp: u32,
}

impl ExtensionProblem {
    /// Uses the canonical lift (digits at positions `>= l'` set to zero).
    pub fn new(ring: &Ring, triple: CyclicTriple) -> Result<Self> {
        let level = level_ring(ring)?;
        let lift = triple.convert(ring, &level);
        Self::with_lift(ring, triple, lift)
    }

    /// Uses a given lift, which must reduce to `triple` modulo `pi^l'`.
    pub fn with_lift(ring: &Ring, triple: CyclicTriple, lift: CyclicTriple) -> Result<Self> {
        let level = level_ring(ring)?;
        if lift.convert(&level, ring) != triple {
            return Err(Error::Domain("lift does not reduce to the triple".into()));
        }
        if !level.is_unit(triple.a) {
            return Err(Error::Domain("triple entry a must be a unit".into()));
        }
        let r = ring.r();
        Ok(Self { ring: ring.clone(), level, triple, lift, l: r.div_ceil(2), lp: r / 2 })
    }

    pub fn ring(&self) -> &Ring {
        &self.ring
    }

    pub fn level_ring(&self) -> &Ring {
        &self.level
    }

    pub fn triple(&self) -> &CyclicTriple {
        &self.triple
    }

    pub fn lift(&self) -> &CyclicTriple {
        &self.lift
    }

    /// `l = ceil(r/2)`.
    pub fn l(&self) -> u32 {
        self.l
    }

    /// `l' = floor(r/2)`.
    pub fn l_prime(&self) -> u32 {
        self.lp
    }

    /// `f(lambda, x, y)` in `o_r`.
    pub fn f_eval(&self, lambda: RingElem, x: RingElem, y: RingElem) -> RingElem {
        let ring = &self.ring;
        let (alpha, beta) = (self.lift.alpha, self.lift.beta);
        let t1 = ring.mul(ring.mul(ring.mul(x, y), lambda), ring.sub(beta, lambda));
        let t2 = ring.mul(ring.mul(alpha, lambda), ring.square(y));
        let t3 = ring.mul(lambda, ring.sub(ring.square(x), ring.one()));
        ring.add(ring.sub(t1, t2), t3)
    }

    /// `g(x, y) = x^2 + beta~ x y - alpha~ y^2` in `o_r`.
    pub fn g_eval(&self, x: RingElem, y: RingElem) -> RingElem {
        crate::linalg::norm_form(&self.ring, self.lift.alpha, self.lift.beta, x, y)
    }

    /// Whether `x in h^j`.
    pub fn in_h(&self, x: RingElem, j: u32) -> bool {
        let ring = &self.ring;
        let two_x = ring.add(x, x);
        let prod = ring.mul(x, ring.add(x, self.lift.beta));
        ring.valuation(two_x) >= j && ring.valuation(prod) >= j
    }

    /// Representatives of `h^j / (pi^j)`: the members with all digits at
    /// positions `>= j` equal to zero.
    pub fn h_residues(&self, j: u32) -> Vec<RingElem> {
        let short = self.ring.with_length(j.max(1)).expect("shorter ring of the same family");
        short
            .elements()
            .map(|x| self.ring.convert_from(&short, x))
            .filter(|&x| j == 0 || self.in_h(x, j))
            .collect()
    }

    /// `|h^j|`, by enumeration of residues.
    pub fn h_cardinality(&self, j: u32) -> u64 {
        self.h_residues(j).len() as u64 * self.ring.q().pow(self.ring.r() - j)
    }

    /// `|h^j|` in closed form:
    /// `q^{r - j + min(e, val beta~)}` in characteristic zero, and in
    /// characteristic two `2 q^{r - j + val beta~}` when
    /// `val beta~ < ceil(j/2)`, else `q^{r - ceil(j/2)}`.
    pub fn h_cardinality_formula(&self, j: u32) -> u64 {
        let (q, r) = (self.ring.q(), self.ring.r());
        let v = self.ring.valuation(self.lift.beta);
        match self.ring.spec().ramification() {
            Some(e) => q.pow(r - j + e.min(v)),
            None if v < j.div_ceil(2) => 2 * q.pow(r - j + v),
            None => q.pow(r - j.div_ceil(2)),
        }
    }

    /// `k = min(val beta~, l')`.
    pub fn k(&self) -> u32 {
        self.ring.valuation(self.lift.beta).min(self.lp)
    }

    /// The odd parameter `s` of `alpha` (characteristic two).
    pub fn s(&self) -> u32 {
        sns_parameters(&self.level, &self.triple).s
    }

    /// `epsilon` with `r - 1 = 2 l' - epsilon`.
    pub fn epsilon(&self) -> u32 {
        2 * self.lp + 1 - self.ring.r()
    }

    /// `i`, `j` and `delta` for one `lambda`.
    pub fn lambda_parameters(&self, lambda: RingElem) -> LambdaParameters {
        let ring = &self.ring;
        let i = ring.valuation(lambda);
        let j = ring.valuation(ring.add(lambda, self.lift.beta)).min(self.lp);
        let (l, k, s) = (self.l as i64, self.k() as i64, self.s() as i64);
        let m = (l - i as i64).max(l - k).max((l - s + 1).div_euclid(2));
        LambdaParameters { i, j, delta: j as i64 - s - m }
    }

    /// Whether `psi(f(lambda, x, y)) = 1` on every admissible `(x, y)`.
    pub fn extends(&self, lambda: RingElem, sweep: Sweep) -> bool {
        match sweep {
            Sweep::Restricted => self.extends_restricted(lambda),
            Sweep::Full => self.extends_full(lambda),
        }
    }

    fn extends_restricted(&self, lambda: RingElem) -> bool {
        let ring = &self.ring;
        let l = self.l;
        let short = ring.with_length(l).expect("shorter ring of the same family");
        let alpha = short.convert_from(ring, self.lift.alpha);
        let beta = short.convert_from(ring, self.lift.beta);
        let min_val_y = l.saturating_sub(ring.valuation(lambda));
        for y in short.ideal(min_val_y) {
            let (by, ay2) = (short.mul(beta, y), short.mul(alpha, short.square(y)));
            let c = short.sub(short.neg(ay2), short.one());
            for x in short.roots(|x| short.add(short.mul(x, short.add(x, by)), c)) {
                let (xr, yr) = (ring.convert_from(&short, x), ring.convert_from(&short, y));
                if ring.psi(self.f_eval(lambda, xr, yr)) != 0 {
                    return false;
                }
            }
        }
        true
    }

    fn extends_full(&self, lambda: RingElem) -> bool {
        let ring = &self.ring;
        let l = self.l;
        ring.elements().all(|x| {
            ring.elements().all(|y| {
                let admissible = ring.valuation(ring.sub(self.g_eval(x, y), ring.one())) >= l
                    && ring.valuation(ring.mul(lambda, y)) >= l;
                !admissible || ring.psi(self.f_eval(lambda, x, y)) == 0
            })
        })
    }

    /// `E` by the direct test on one representative per coset of `(pi^l)`.
    pub fn e_brute(&self) -> ExtensionSet {
        self.e_brute_with(Sweep::Restricted)
    }

    pub fn e_brute_with(&self, sweep: Sweep) -> ExtensionSet {
        let cosets = self.h_residues(self.l).into_iter().filter(|&lam| self.extends(lam, sweep));
        ExtensionSet::new(cosets, self.l, Regime::Brute)
    }

    /// `E` by the direct test on every `lambda in h^l` (not only coset
    /// representatives).  Returns the set and whether each coset was decided
    /// uniformly.
    pub fn e_brute_all_lambda(&self) -> (ExtensionSet, bool) {
        let ring = &self.ring;
        let mut verdicts: std::collections::BTreeMap<RingElem, bool> = Default::default();
        let mut uniform = true;
        for lam in ring.elements().filter(|&x| self.in_h(x, self.l)) {
            let v = self.extends(lam, Sweep::Restricted);
            let rep = ring.truncate(lam, self.l);
            match verdicts.get(&rep) {
                Some(&old) if old != v => uniform = false,
                _ => {
                    verdicts.insert(rep, v);
                }
            }
        }
        let cosets = verdicts.into_iter().filter(|&(_, v)| v).map(|(k, _)| k);
        (ExtensionSet::new(cosets, self.l, Regime::Brute), uniform)
    }

    /// `E` by the closed-form characterizations, or `UnsupportedRegime`.
    pub fn e_fast(&self) -> Result<ExtensionSet> {
        if self.ring.is_char_two() {
            Ok(self.e_fast_char_two())
        } else {
            self.e_fast_char_zero()
        }
    }

    /// The cosets of `(pi^j)` inside `o_r / (pi^l)`, for `j <= l`.
    fn ideal_cosets(&self, j: u32) -> Vec<RingElem> {
        let ring = &self.ring;
        let short = ring.with_length(self.l).expect("shorter ring of the same family");
        short.ideal(j).map(|x| ring.convert_from(&short, x)).collect()
    }

    /// Characteristic zero:
    /// 1. `r > 2e`, `beta` a unit: `E = (pi^l)`;
    /// 2. `r = 4e`, `beta = pi v`: `E = {0, pi^{l-1} (xi~ w^2)^{-1}} + (pi^l)`
    ///    when `alpha = (v/w)^2 + (xi w^3)^{-2} mod pi` (with `2 = pi^e w`),
    ///    otherwise `E = (pi^l)`;
    /// 3. `r > 4e`, `beta` not a unit: `E = (pi^{l'})`.
    fn e_fast_char_zero(&self) -> Result<ExtensionSet> {
        let ring = &self.ring;
        let e = ring.spec().ramification().expect("characteristic zero");
        let r = ring.r();
        let beta_unit = ring.is_unit(self.lift.beta);
        let regime = Regime::FastChar0;
        if beta_unit && r > 2 * e {
            return Ok(ExtensionSet::new([ring.zero()], self.l, regime));
        }
        if !beta_unit && r == 4 * e {
            // Both modelled families have pi = 2, hence w = 1.
            let field = ring.field();
            let w = 1u64;
            let xi = ring.xi();
            let v = ring.digit(self.lift.beta, 1);
            let w_inv = field.inv(w).expect("w is a unit");
            let vw = field.mul(v, w_inv);
            let c = field.inv(field.mul(xi, field.pow(w, 3))).expect("unit");
            let target = field.add(field.mul(vw, vw), field.mul(c, c));
            let mut cosets = vec![ring.zero()];
            if ring.digit(self.lift.alpha, 0) == target {
                let xi_w2_inv = field.inv(field.mul(xi, field.mul(w, w))).expect("unit");
                let lam = ring.shift_up(ring.from_residue(xi_w2_inv), self.l - 1);
                cosets.push(ring.truncate(lam, self.l));
            }
            return Ok(ExtensionSet::new(cosets, self.l, regime));
        }
        if !beta_unit && r > 4 * e {
            return Ok(ExtensionSet::new(self.ideal_cosets(self.lp), self.l, regime));
        }
        Err(Error::UnsupportedRegime(format!(
            "no closed form for E over {} with {} trace",
            ring.spec(),
            if beta_unit { "invertible" } else { "non-invertible" }
        )))
    }

    /// `lambda in pi^{l - l'} o_r^2 + (pi^{l'})`.
    fn condition_square(&self, lambda: RingElem) -> bool {
        let ring = &self.ring;
        let shift = self.l - self.lp;
        let mu = ring.truncate(lambda, self.lp);
        if ring.valuation(mu) < shift {
            return false;
        }
        let top = self.lp - shift;
        let rest = ring.shift_down(mu, shift);
        (1..top).step_by(2).all(|i| ring.digit(rest, i) == 0)
    }

    /// `w2^2` in `alpha~ = w1^2 + pi^s w2^2`, from the odd digits of the lift.
    fn w2_squared(&self) -> RingElem {
        let ring = &self.ring;
        let s = self.s();
        let digits: Vec<u64> = (0..ring.r())
            .map(|i| if i % 2 == 1 { ring.digit(self.lift.alpha, i) } else { 0 })
            .collect();
        ring.shift_down(ring.from_digits(&digits), s)
    }

    /// Whether `lambda in h^l` passes the characteristic-two criterion.
    pub fn char_two_criterion(&self, lambda: RingElem) -> bool {
        let ring = &self.ring;
        if ring.valuation(lambda) >= self.lp {
            return true;
        }
        if !self.condition_square(lambda) {
            return false;
        }
        let p = self.lambda_parameters(lambda);
        let (s, k) = (self.s(), self.k());
        if 2 * p.j + p.i != 2 * self.lp + s - self.epsilon() {
            return false;
        }
        if p.j < self.lp && s < k && p.delta >= 0 {
            let precision = (2 * p.delta + 1) as u32;
            let (_, u1) = ring.unit_part(lambda);
            let (_, u2) = ring.unit_part(ring.add(lambda, self.lift.beta));
            let xi = ring.from_residue(ring.xi());
            let lhs = ring.mul(xi, ring.square(ring.mul(u1, u2)));
            let rhs = ring.mul(u1, self.w2_squared());
            return ring.valuation(ring.sub(lhs, rhs)) >= precision;
        }
        true
    }

    fn e_fast_char_two(&self) -> ExtensionSet {
        let cosets = self
            .h_residues(self.l)
            .into_iter()
            .filter(|&lam| self.char_two_criterion(lam));
        ExtensionSet::new(cosets, self.l, Regime::FastChar2)
    }

    /// The closed form where it applies, the direct test otherwise.
    pub fn e_set(&self) -> ExtensionSet {
        self.e_fast().unwrap_or_else(|_| self.e_brute())
    }

    /// Serializable report of an extension set for this problem.
    pub fn report(&self, e: &ExtensionSet) -> ExtensionReport {
        ExtensionReport {
            triple: self.triple.format(&self.level),
            regime: e.regime,
            cosets: e.cosets.iter().map(|&x| self.ring.format(x)).collect(),
            index_over_pi_ell: e.index_over_pi_ell(),
        }
    }
}

fn level_ring(ring: &Ring) -> Result<Ring> {
    if ring.r() < 2 {
        return Err(Error::Domain("extension sets need r >= 2".into()));
    }
    ring.with_length(ring.r() / 2)
}

/// `(w(A), delta(A))` from digits: `w(A) = val(beta)` (or `l'` when
/// `beta = 0`) and `delta(A)` the least `i < floor(w/2)` with digit `2i+1` of
/// `alpha` nonzero, else `floor(w/2)`.
pub fn appendix_params(level: &Ring, t: &CyclicTriple) -> (u32, u32) {
    let w = if t.beta == level.zero() { level.r() } else { level.valuation(t.beta) };
    let depth = (0..w / 2).find(|&i| level.digit(t.alpha, 2 * i + 1) != 0).unwrap_or(w / 2);
    (w, depth)
}

/// `[E : (pi^l)]` bounds any `[M_chi : (pi^l)]` with `M_chi` inside `E`;
/// returns that index after checking it against `q^3`.
pub fn extension_char_bound(ring: &Ring, e: &ExtensionSet) -> Result<usize> {
    let index = e.index_over_pi_ell();
    if index as u64 > ring.q().pow(3) {
        return Err(Error::Domain(format!("[E : (pi^l)] = {index} exceeds q^3")));
    }
    Ok(index)
}
