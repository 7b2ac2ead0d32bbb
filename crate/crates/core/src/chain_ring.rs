//! Finite chain rings `o_r` of residue characteristic two.
//!
//! Three concrete models are supported:
//!
//! * `Z/2^r` (characteristic zero, ramification `e = 1`, `q = 2`),
//! * the Galois ring `GR(2^r, n) = Z[x]/(2^r, f(x))` (characteristic zero,
//!   `e = 1`, `q = 2^n`),
//! * the truncated polynomial ring `F_q[t]/(t^r)` (characteristic two).
//!
//! Elements are stored as packed `u64` codes.  Every code below `q^r` is a
//! valid element, the numeric order of codes is the "canonical order" used
//! whenever a least representative has to be chosen, and each element has a
//! unique digit expansion `x = sum_i [d_i] pi^i` with digits in the residue
//! field `F_q`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Irreducible polynomials used for `F_{2^n}`, indexed by `n`, encoded as bit
/// masks including the leading term.  These are the Conway polynomials.
const FIELD_MODULI: [u64; 9] = [
    0, 0b11, 0b111, 0b1011, 0b10011, 0b100101, 0b1011011, 0b10000011, 0x11D,
];

/// Largest supported residue degree `n` (so `q <= 256`).
pub const MAX_RESIDUE_DEGREE: u32 = 8;

/// Largest supported total bit width `n * r` of a packed element.
pub const MAX_ELEMENT_BITS: u32 = 30;

/// The residue field `F_{2^n}` in the polynomial basis.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ResidueField {
    n: u32,
    modulus: u64,
}

impl ResidueField {
    pub fn new(n: u32) -> Result<Self> {
        if n == 0 || n > MAX_RESIDUE_DEGREE {
            return Err(Error::Config(format!(
                "residue degree {n} outside 1..={MAX_RESIDUE_DEGREE}"
            )));
        }
        Ok(Self { n, modulus: FIELD_MODULI[n as usize] })
    }

    pub fn degree(&self) -> u32 {
        self.n
    }

    pub fn order(&self) -> u64 {
        1 << self.n
    }

    /// The defining polynomial as a bit mask (leading term included).
    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn add(&self, a: u64, b: u64) -> u64 {
        a ^ b
    }

    pub fn mul(&self, a: u64, b: u64) -> u64 {
        let mut acc = 0u64;
        let mut a = a;
        let mut b = b;
        while b != 0 {
            if b & 1 == 1 {
                acc ^= a;
            }
            b >>= 1;
            a <<= 1;
            if a >> self.n & 1 == 1 {
                a ^= self.modulus;
            }
        }
        acc
    }

    pub fn pow(&self, a: u64, mut k: u64) -> u64 {
        let mut base = a;
        let mut acc = 1;
        while k > 0 {
            if k & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            k >>= 1;
        }
        acc
    }

    /// Multiplicative inverse; `None` for zero.
    pub fn inv(&self, a: u64) -> Option<u64> {
        (a != 0).then(|| self.pow(a, self.order() - 2))
    }

    /// The unique square root (Frobenius is bijective on `F_q`).
    pub fn sqrt(&self, a: u64) -> u64 {
        self.pow(a, self.order() / 2)
    }

    /// Absolute trace `F_q -> F_2`.
    pub fn trace(&self, a: u64) -> u64 {
        let mut t = 0;
        let mut x = a;
        for _ in 0..self.n {
            t ^= x;
            x = self.mul(x, x);
        }
        debug_assert!(t <= 1);
        t
    }

    pub fn elements(&self) -> impl Iterator<Item = u64> {
        0..self.order()
    }
}

/// Characteristic of the ring of integers the quotient comes from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum RingKind {
    /// Characteristic zero with ramification index `e` (`2 o = p^e`).
    CharZero { e: u32 },
    /// Equal characteristic two (`F_q[[t]]`).
    CharTwo,
}

/// Description of a finite chain ring `o_r`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RingSpec {
    pub kind: RingKind,
    /// Residue field cardinality, a power of two.
    pub q: u64,
    /// Length: `pi^r = 0` and `pi^(r-1) != 0`.
    pub r: u32,
}

impl RingSpec {
    /// `Z/2^r`.
    pub fn integers(r: u32) -> Self {
        Self { kind: RingKind::CharZero { e: 1 }, q: 2, r }
    }

    /// `F_q[t]/(t^r)`.
    pub fn truncated(q: u64, r: u32) -> Self {
        Self { kind: RingKind::CharTwo, q, r }
    }

    /// Galois ring `GR(2^r, n)`.
    pub fn galois(r: u32, n: u32) -> Self {
        Self { kind: RingKind::CharZero { e: 1 }, q: 1 << n, r }
    }

    /// Same family, different length.
    pub fn with_length(self, r: u32) -> Self {
        Self { r, ..self }
    }

    pub fn is_char_two(&self) -> bool {
        matches!(self.kind, RingKind::CharTwo)
    }

    /// Ramification index; `None` in characteristic two.
    pub fn ramification(&self) -> Option<u32> {
        match self.kind {
            RingKind::CharZero { e } => Some(e),
            RingKind::CharTwo => None,
        }
    }

    /// The threshold `R_o` from which the closed-form theory applies:
    /// `4e` in characteristic zero and `2` in characteristic two.
    pub fn threshold(&self) -> u32 {
        match self.kind {
            RingKind::CharZero { e } => 4 * e,
            RingKind::CharTwo => 2,
        }
    }

    /// Short family label used in reports: `Z2`, `GR(n)` or `Fq[[t]]`.
    pub fn family_label(&self) -> String {
        match (self.kind, self.q) {
            (RingKind::CharZero { .. }, 2) => "Z2".into(),
            (RingKind::CharZero { .. }, q) => format!("GR(q={q})"),
            (RingKind::CharTwo, q) => format!("F{q}[[t]]"),
        }
    }
}

impl fmt::Display for RingSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.kind, self.q) {
            (RingKind::CharZero { .. }, 2) => write!(f, "Z/2^{}", self.r),
            (RingKind::CharZero { .. }, q) => {
                write!(f, "GR(2^{},{})", self.r, q.trailing_zeros())
            }
            (RingKind::CharTwo, q) => write!(f, "F{}[t]/t^{}", q, self.r),
        }
    }
}

impl FromStr for RingSpec {
    type Err = Error;

    /// Accepts `Z/2^r`, `Z/<2^r>`, `Fq[t]/t^r`, `Fq[t]/(t^r)` and `GR(2^r,n)`.
    fn from_str(s: &str) -> Result<Self> {
        let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        let bad = || Error::Config(format!("cannot parse ring spec {s:?}"));
        let parse_u = |t: &str| t.parse::<u64>().map_err(|_| bad());

        if let Some(rest) = compact.strip_prefix("Z/") {
            let r = if let Some(exp) = rest.strip_prefix("2^") {
                parse_u(exp)?
            } else {
                let m = parse_u(rest)?;
                if !m.is_power_of_two() || m < 2 {
                    return Err(bad());
                }
                u64::from(m.trailing_zeros())
            };
            return Ok(RingSpec::integers(u32::try_from(r).map_err(|_| bad())?));
        }
        if let Some(rest) = compact.strip_prefix("GR(") {
            let inner = rest.strip_suffix(')').ok_or_else(bad)?;
            let (modulus, n) = inner.split_once(',').ok_or_else(bad)?;
            let r = parse_u(modulus.strip_prefix("2^").ok_or_else(bad)?)?;
            let n = parse_u(n)?;
            return Ok(RingSpec::galois(r as u32, n as u32));
        }
        if let Some(rest) = compact.strip_prefix('F') {
            let (q, tail) = rest.split_once("[t]/").ok_or_else(bad)?;
            let q = parse_u(q)?;
            let tail = tail.trim_start_matches('(').trim_end_matches(')');
            let r = parse_u(tail.strip_prefix("t^").ok_or_else(bad)?)?;
            return Ok(RingSpec::truncated(q, r as u32));
        }
        Err(bad())
    }
}

/// An element of a [`Ring`], stored as its canonical packed code.
#[derive(
    Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize,
)]
pub struct RingElem(pub u64);

#[derive(Clone, Debug)]
enum Model {
    /// `Z/2^r`; the code is the integer.
    Integers,
    /// `F_q[t]/t^r`; digit `i` occupies bits `[i n, (i+1) n)`.
    Truncated,
    /// `GR(2^r, n)`; coefficient `j` of `x^j` occupies bits `[j r, (j+1) r)`.
    Galois {
        /// Coefficients of `x^n mod f` (i.e. of `-(f - x^n)`), reduced mod `2^r`.
        reduction: Vec<u64>,
        /// `Tr(x^j)` for `j < n`, reduced mod `2^r`.
        traces: Vec<u64>,
    },
}

/// A finite chain ring handle.  Immutable after construction and cheap to
/// share across threads.
#[derive(Clone, Debug)]
pub struct Ring {
    spec: RingSpec,
    field: ResidueField,
    n: u32,
    model: Model,
    /// The unit `c` with `psi(x) = Tr(c x)` (or `(-1)^Tr(c x_{r-1})`).
    psi_twist: RingElem,
    /// Residue of `psi_twist`.
    psi_twist_residue: u64,
    xi: u64,
}

impl Ring {
    pub fn new(spec: RingSpec) -> Result<Self> {
        if !spec.q.is_power_of_two() || spec.q < 2 {
            return Err(Error::Config(format!("q = {} is not a power of two >= 2", spec.q)));
        }
        if spec.r == 0 {
            return Err(Error::Config("ring length r must be at least 1".into()));
        }
        let n = spec.q.trailing_zeros();
        let field = ResidueField::new(n)?;
        if n * spec.r > MAX_ELEMENT_BITS {
            return Err(Error::Config(format!(
                "ring {spec} needs {} bits per element (max {MAX_ELEMENT_BITS})",
                n * spec.r
            )));
        }
        let model = match spec.kind {
            RingKind::CharZero { e: 1 } if n == 1 => Model::Integers,
            RingKind::CharZero { e: 1 } => Model::Galois { reduction: Vec::new(), traces: Vec::new() },
            RingKind::CharZero { e } => {
                return Err(Error::Config(format!(
                    "ramification index {e} unsupported (only e = 1 models are implemented)"
                )))
            }
            RingKind::CharTwo => Model::Truncated,
        };
        let mut ring = Ring {
            spec,
            field,
            n,
            model,
            psi_twist: RingElem(0),
            psi_twist_residue: 0,
            xi: 0,
        };
        ring.init_galois_tables();
        ring.init_character();
        Ok(ring)
    }

    /// Parses a ring description such as `"Z/2^4"` or `"F2[t]/t^6"`.
    pub fn parse(s: &str) -> Result<Self> {
        Self::new(s.parse()?)
    }

    fn init_galois_tables(&mut self) {
        if !matches!(self.model, Model::Galois { .. }) {
            return;
        }
        let n = self.n as usize;
        let mask = self.coeff_mask();
        let f = self.field.modulus();
        // x^n = -(f_0 + f_1 x + ... + f_{n-1} x^{n-1})
        let reduction: Vec<u64> = (0..n)
            .map(|j| if f >> j & 1 == 1 { mask } else { 0 })
            .collect();
        self.model = Model::Galois { reduction, traces: Vec::new() };
        let traces: Vec<u64> = (0..n)
            .map(|j| {
                let xj = self.monomial(j);
                (0..n)
                    .map(|k| self.coeffs(self.mul(xj, self.monomial(k)))[k])
                    .fold(0, |acc, c| (acc + c) & mask)
            })
            .collect();
        if let Model::Galois { traces: t, .. } = &mut self.model {
            *t = traces;
        }
    }

    fn init_character(&mut self) {
        // Least unit whose trace is odd; `1` whenever the residue degree is odd.
        let twist = self
            .elements()
            .find(|&x| self.is_unit(x) && self.field.trace(self.digit(x, 0)) == 1)
            .expect("a unit with odd trace exists");
        self.psi_twist = twist;
        self.psi_twist_residue = self.digit(twist, 0);
        self.xi = self
            .field
            .elements()
            .skip(1)
            .find(|&xi| {
                let image: std::collections::BTreeSet<u64> = self
                    .field
                    .elements()
                    .map(|x| self.field.add(self.field.mul(xi, self.field.mul(x, x)), x))
                    .collect();
                self.field.elements().all(|d| image.contains(&d) == (self.bottom_psi(d) == 0))
            })
            .expect("the kernel of the residue character is {xi x^2 + x}");
    }

    // ----- structure -------------------------------------------------------

    pub fn spec(&self) -> RingSpec {
        self.spec
    }

    pub fn field(&self) -> &ResidueField {
        &self.field
    }

    pub fn q(&self) -> u64 {
        self.spec.q
    }

    pub fn r(&self) -> u32 {
        self.spec.r
    }

    /// `log2 q`.
    pub fn residue_degree(&self) -> u32 {
        self.n
    }

    pub fn is_char_two(&self) -> bool {
        self.spec.is_char_two()
    }

    /// Number of elements, `q^r`.
    pub fn size(&self) -> u64 {
        1 << (self.n * self.spec.r)
    }

    /// Number of units, `(q-1) q^(r-1)`.
    pub fn unit_count(&self) -> u64 {
        (self.q() - 1) * self.q().pow(self.r() - 1)
    }

    /// The same family at another length.
    pub fn with_length(&self, r: u32) -> Result<Ring> {
        Ring::new(self.spec.with_length(r))
    }

    pub fn elements(&self) -> impl Iterator<Item = RingElem> {
        (0..self.size()).map(RingElem)
    }

    pub fn units(&self) -> impl Iterator<Item = RingElem> + '_ {
        self.elements().filter(move |&x| self.is_unit(x))
    }

    /// All elements of `(pi^j)`, in canonical order.
    pub fn ideal(&self, j: u32) -> impl Iterator<Item = RingElem> + '_ {
        self.elements().filter(move |&x| self.valuation(x) >= j)
    }

    // ----- packing helpers -------------------------------------------------

    fn coeff_mask(&self) -> u64 {
        (1u64 << self.spec.r) - 1
    }

    fn digit_mask(&self) -> u64 {
        (1u64 << self.n) - 1
    }

    fn coeffs(&self, x: RingElem) -> Vec<u64> {
        let r = self.spec.r;
        (0..self.n).map(|j| x.0 >> (j * r) & self.coeff_mask()).collect()
    }

    fn pack_coeffs(&self, c: &[u64]) -> RingElem {
        let r = self.spec.r;
        RingElem(
            c.iter()
                .enumerate()
                .fold(0, |acc, (j, &v)| acc | (v & self.coeff_mask()) << (j as u32 * r)),
        )
    }

    fn monomial(&self, j: usize) -> RingElem {
        let mut c = vec![0; self.n as usize];
        c[j] = 1;
        self.pack_coeffs(&c)
    }

    // ----- constants -------------------------------------------------------

    pub fn zero(&self) -> RingElem {
        RingElem(0)
    }

    pub fn one(&self) -> RingElem {
        RingElem(1)
    }

    /// The uniformizer (`2` or `t`).
    pub fn pi(&self) -> RingElem {
        self.pi_pow(1)
    }

    /// `pi^i` (zero once `i >= r`).
    pub fn pi_pow(&self, i: u32) -> RingElem {
        self.shift_up(self.one(), i)
    }

    /// Image of an integer.
    pub fn from_int(&self, k: i64) -> RingElem {
        let mut acc = self.zero();
        let mut base = self.one();
        let mut m = k.unsigned_abs();
        while m > 0 {
            if m & 1 == 1 {
                acc = self.add(acc, base);
            }
            base = self.add(base, base);
            m >>= 1;
        }
        if k < 0 {
            self.neg(acc)
        } else {
            acc
        }
    }

    /// The element with digit expansion `[d]` (a lift of a residue class).
    pub fn from_residue(&self, d: u64) -> RingElem {
        self.from_digits(&[d])
    }

    // ----- digits ----------------------------------------------------------

    /// Digit `(x)_i` as a residue field element.
    pub fn digit(&self, x: RingElem, i: u32) -> u64 {
        if i >= self.spec.r {
            return 0;
        }
        match &self.model {
            Model::Integers => x.0 >> i & 1,
            Model::Truncated => x.0 >> (i * self.n) & self.digit_mask(),
            Model::Galois { .. } => {
                let r = self.spec.r;
                (0..self.n).fold(0, |acc, j| acc | (x.0 >> (j * r + i) & 1) << j)
            }
        }
    }

    /// Little-endian digit vector of length `r`.
    pub fn digits(&self, x: RingElem) -> Vec<u64> {
        (0..self.spec.r).map(|i| self.digit(x, i)).collect()
    }

    /// Element with the given digits (missing digits are zero, extra ignored).
    pub fn from_digits(&self, digits: &[u64]) -> RingElem {
        let r = self.spec.r as usize;
        match &self.model {
            Model::Integers => RingElem(
                digits.iter().take(r).enumerate().fold(0, |acc, (i, &d)| acc | (d & 1) << i),
            ),
            Model::Truncated => RingElem(digits.iter().take(r).enumerate().fold(0, |acc, (i, &d)| {
                acc | (d & self.digit_mask()) << (i as u32 * self.n)
            })),
            Model::Galois { .. } => {
                let mut c = vec![0u64; self.n as usize];
                for (i, &d) in digits.iter().take(r).enumerate() {
                    for (j, cj) in c.iter_mut().enumerate() {
                        *cj |= (d >> j & 1) << i;
                    }
                }
                self.pack_coeffs(&c)
            }
        }
    }

    /// Canonical representative of `x mod pi^j` (digits `>= j` cleared).
    pub fn truncate(&self, x: RingElem, j: u32) -> RingElem {
        if j >= self.spec.r {
            return x;
        }
        match &self.model {
            Model::Integers => RingElem(x.0 & ((1 << j) - 1)),
            Model::Truncated => RingElem(x.0 & ((1 << (j * self.n)) - 1)),
            Model::Galois { .. } => {
                let c: Vec<u64> = self.coeffs(x).iter().map(|&v| v & ((1 << j) - 1)).collect();
                self.pack_coeffs(&c)
            }
        }
    }

    /// `pi^k x`.
    pub fn shift_up(&self, x: RingElem, k: u32) -> RingElem {
        if k >= self.spec.r {
            return self.zero();
        }
        match &self.model {
            Model::Integers => RingElem(x.0 << k & self.coeff_mask()),
            Model::Truncated => RingElem(x.0 << (k * self.n) & (self.size() - 1)),
            Model::Galois { .. } => {
                let c: Vec<u64> = self.coeffs(x).iter().map(|&v| v << k).collect();
                self.pack_coeffs(&c)
            }
        }
    }

    /// The canonical `y` (digits `>= r-k` zero) with `pi^k y = x`; requires
    /// `val(x) >= k`.
    pub fn shift_down(&self, x: RingElem, k: u32) -> RingElem {
        debug_assert!(self.valuation(x) >= k);
        if k >= self.spec.r {
            return self.zero();
        }
        match &self.model {
            Model::Integers => RingElem(x.0 >> k),
            Model::Truncated => RingElem(x.0 >> (k * self.n)),
            Model::Galois { .. } => {
                let c: Vec<u64> = self.coeffs(x).iter().map(|&v| v >> k).collect();
                self.pack_coeffs(&c)
            }
        }
    }

    /// Maps an element of `other` (same family, any length) through digits:
    /// reduction when `other` is longer, canonical lift when it is shorter.
    pub fn convert_from(&self, other: &Ring, x: RingElem) -> RingElem {
        debug_assert_eq!(self.spec.kind, other.spec.kind);
        debug_assert_eq!(self.spec.q, other.spec.q);
        self.from_digits(&other.digits(x))
    }

    // ----- arithmetic ------------------------------------------------------

    pub fn add(&self, a: RingElem, b: RingElem) -> RingElem {
        match &self.model {
            Model::Integers => RingElem((a.0 + b.0) & self.coeff_mask()),
            Model::Truncated => RingElem(a.0 ^ b.0),
            Model::Galois { .. } => {
                let (ca, cb) = (self.coeffs(a), self.coeffs(b));
                let c: Vec<u64> = ca.iter().zip(&cb).map(|(x, y)| x + y).collect();
                self.pack_coeffs(&c)
            }
        }
    }

    pub fn neg(&self, a: RingElem) -> RingElem {
        match &self.model {
            Model::Integers => RingElem(a.0.wrapping_neg() & self.coeff_mask()),
            Model::Truncated => a,
            Model::Galois { .. } => {
                let c: Vec<u64> = self.coeffs(a).iter().map(|&x| x.wrapping_neg()).collect();
                self.pack_coeffs(&c)
            }
        }
    }

    pub fn sub(&self, a: RingElem, b: RingElem) -> RingElem {
        self.add(a, self.neg(b))
    }

    pub fn mul(&self, a: RingElem, b: RingElem) -> RingElem {
        match &self.model {
            Model::Integers => RingElem(a.0.wrapping_mul(b.0) & self.coeff_mask()),
            Model::Truncated => {
                let r = self.spec.r;
                let mut acc = 0u64;
                for i in 0..r {
                    let da = self.digit(a, i);
                    if da == 0 {
                        continue;
                    }
                    for j in 0..(r - i) {
                        let db = self.digit(b, j);
                        if db != 0 {
                            acc ^= self.field.mul(da, db) << ((i + j) * self.n);
                        }
                    }
                }
                RingElem(acc)
            }
            Model::Galois { reduction, .. } => {
                let n = self.n as usize;
                let mask = self.coeff_mask();
                let (ca, cb) = (self.coeffs(a), self.coeffs(b));
                let mut prod = vec![0u64; 2 * n - 1];
                for i in 0..n {
                    for j in 0..n {
                        prod[i + j] = (prod[i + j] + ca[i].wrapping_mul(cb[j])) & mask;
                    }
                }
                for d in (n..2 * n - 1).rev() {
                    let top = prod[d];
                    if top == 0 {
                        continue;
                    }
                    prod[d] = 0;
                    for (j, &red) in reduction.iter().enumerate() {
                        let idx = d - n + j;
                        prod[idx] = (prod[idx] + top.wrapping_mul(red)) & mask;
                    }
                }
                self.pack_coeffs(&prod[..n])
            }
        }
    }

    pub fn square(&self, a: RingElem) -> RingElem {
        self.mul(a, a)
    }

    pub fn pow(&self, a: RingElem, mut k: u64) -> RingElem {
        let mut base = a;
        let mut acc = self.one();
        while k > 0 {
            if k & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            k >>= 1;
        }
        acc
    }

    pub fn is_unit(&self, a: RingElem) -> bool {
        self.digit(a, 0) != 0
    }

    /// Multiplicative inverse of a unit (Newton iteration from the residue
    /// inverse); `None` for non-units.
    pub fn inv(&self, a: RingElem) -> Option<RingElem> {
        let d0 = self.field.inv(self.digit(a, 0))?;
        let two = self.from_int(2);
        let mut y = self.from_residue(d0);
        // Each step doubles the precision.
        let mut precision = 1;
        while precision < self.spec.r {
            y = self.mul(y, self.sub(two, self.mul(a, y)));
            precision *= 2;
        }
        debug_assert_eq!(self.mul(a, y), self.one());
        Some(y)
    }

    /// `val(x)`: the least `i` with `x in (pi^i)`; `val(0) = r`.
    pub fn valuation(&self, x: RingElem) -> u32 {
        if x.0 == 0 {
            return self.spec.r;
        }
        match &self.model {
            Model::Integers => x.0.trailing_zeros(),
            Model::Truncated => x.0.trailing_zeros() / self.n,
            Model::Galois { .. } => {
                self.coeffs(x).iter().filter(|&&c| c != 0).map(|c| c.trailing_zeros()).min().unwrap()
            }
        }
    }

    /// Splits a nonzero `x` as `pi^val(x) * u` with `u` a unit (the canonical
    /// choice with high digits zero).
    pub fn unit_part(&self, x: RingElem) -> (u32, RingElem) {
        let v = self.valuation(x);
        (v, self.shift_down(x, v))
    }

    // ----- squares and roots -----------------------------------------------

    /// All roots of a polynomial map, found digit by digit.
    ///
    /// `p` must be a polynomial function with coefficients in the ring, so
    /// that `p(x) mod pi^j` depends only on `x mod pi^j`.
    pub fn roots<F: Fn(RingElem) -> RingElem>(&self, p: F) -> Vec<RingElem> {
        let mut out = Vec::new();
        self.root_search(&p, self.zero(), 0, &mut |x| {
            out.push(x);
            false
        });
        out.sort();
        out
    }

    /// Some root of a polynomial map, if one exists.
    pub fn first_root<F: Fn(RingElem) -> RingElem>(&self, p: F) -> Option<RingElem> {
        let mut found = None;
        self.root_search(&p, self.zero(), 0, &mut |x| {
            found = Some(x);
            true
        });
        found
    }

    fn root_search<F, S>(&self, p: &F, x: RingElem, depth: u32, sink: &mut S) -> bool
    where
        F: Fn(RingElem) -> RingElem,
        S: FnMut(RingElem) -> bool,
    {
        if self.valuation(p(x)) < depth {
            return false;
        }
        if depth == self.spec.r {
            return sink(x);
        }
        for d in self.field.elements() {
            let next = self.add(x, self.shift_up(self.from_residue(d), depth));
            if self.root_search(p, next, depth + 1, sink) {
                return true;
            }
        }
        false
    }

    pub fn is_square(&self, x: RingElem) -> bool {
        if self.is_char_two() {
            (0..self.spec.r).filter(|i| i % 2 == 1).all(|i| self.digit(x, i) == 0)
        } else {
            self.first_root(|y| self.sub(self.square(y), x)).is_some()
        }
    }

    /// The least square root (in canonical order).
    pub fn sqrt(&self, x: RingElem) -> Result<RingElem> {
        if !self.is_square(x) {
            return Err(Error::Domain(format!("{} is not a square in {}", x.0, self.spec)));
        }
        if self.is_char_two() {
            // (sum y_i t^i)^2 = sum y_i^2 t^(2i): the digits below ceil(r/2)
            // are forced, the rest are free and set to zero.
            let half = self.spec.r.div_ceil(2);
            let digits: Vec<u64> =
                (0..half).map(|i| self.field.sqrt(self.digit(x, 2 * i))).collect();
            Ok(self.from_digits(&digits))
        } else {
            Ok(self.roots(|y| self.sub(self.square(y), x))[0])
        }
    }

    /// Solves `u y + v y^2 = z` for a unit `u` and `z in (pi)` by the
    /// contraction `y <- u^{-1}(z - v y^2)`.
    pub fn solve_linear_quadratic(&self, u: RingElem, v: RingElem, z: RingElem) -> Result<RingElem> {
        let u_inv = self
            .inv(u)
            .ok_or_else(|| Error::Domain("linear coefficient must be a unit".into()))?;
        if self.valuation(z) == 0 {
            return Err(Error::Domain("right-hand side must lie in the maximal ideal".into()));
        }
        let mut y = self.mul(u_inv, z);
        for _ in 0..=self.spec.r {
            let next = self.mul(u_inv, self.sub(z, self.mul(v, self.square(y))));
            if next == y {
                break;
            }
            y = next;
        }
        debug_assert_eq!(self.add(self.mul(u, y), self.mul(v, self.square(y))), z);
        Ok(y)
    }

    /// A solution of `x^2 + u x y + v y^2 = w` for a unit `w`: the least `y`
    /// admitting a solution, paired with the least such `x`.
    pub fn represent_unit(&self, u: RingElem, v: RingElem, w: RingElem) -> Result<(RingElem, RingElem)> {
        if !self.is_unit(w) {
            return Err(Error::Domain("target must be a unit".into()));
        }
        for y in self.elements() {
            let uy = self.mul(u, y);
            let c = self.sub(self.mul(v, self.square(y)), w);
            let roots = self.roots(|x| self.add(self.mul(x, self.add(x, uy)), c));
            if let Some(&x) = roots.first() {
                return Ok((x, y));
            }
        }
        Err(Error::Domain("no representation found".into()))
    }

    // ----- additive character ----------------------------------------------

    /// Order of the cyclic group in which `psi` takes values (`2^r` in
    /// characteristic zero, `2` in characteristic two).
    pub fn psi_modulus(&self) -> u64 {
        if self.is_char_two() {
            2
        } else {
            1 << self.spec.r
        }
    }

    /// The unit `c` twisting the trace in `psi`.
    pub fn psi_twist(&self) -> RingElem {
        self.psi_twist
    }

    /// The fixed primitive additive character, as an exponent `k` standing for
    /// `exp(2 pi i k / m)` with `m = psi_modulus()`.
    pub fn psi(&self, x: RingElem) -> u64 {
        match &self.model {
            Model::Integers => x.0,
            Model::Truncated => self.bottom_psi(self.digit(x, self.spec.r - 1)),
            Model::Galois { traces, .. } => {
                let cx = self.mul(self.psi_twist, x);
                self.coeffs(cx)
                    .iter()
                    .zip(traces)
                    .fold(0, |acc, (c, t)| (acc + c * t) & self.coeff_mask())
            }
        }
    }

    /// The residue-field character `d -> psi(pi^(r-1) [d])` as an exponent
    /// mod 2: `Tr(c d)`.
    pub fn bottom_psi(&self, d: u64) -> u64 {
        self.field.trace(self.field.mul(self.psi_twist_residue, d))
    }

    /// The unique `xi in F_q^*` with `ker(bottom_psi) = {xi x^2 + x}`.
    pub fn xi(&self) -> u64 {
        self.xi
    }

    /// Human-readable form of an element (integer, polynomial in `t`, or
    /// coefficient vector).
    pub fn format(&self, x: RingElem) -> String {
        match &self.model {
            Model::Integers => x.0.to_string(),
            Model::Truncated => {
                let terms: Vec<String> = (0..self.spec.r)
                    .filter_map(|i| {
                        let d = self.digit(x, i);
                        (d != 0).then(|| {
                            let coeff = if d == 1 && i > 0 { String::new() } else { format!("{d}") };
                            match i {
                                0 => format!("{d}"),
                                1 => format!("{coeff}t"),
                                _ => format!("{coeff}t^{i}"),
                            }
                        })
                    })
                    .collect();
                if terms.is_empty() {
                    "0".into()
                } else {
                    terms.join("+")
                }
            }
            Model::Galois { .. } => {
                let c = self.coeffs(x);
                format!("({})", c.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(","))
            }
        }
    }
}
