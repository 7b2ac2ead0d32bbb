//! Property tests for the invariants the engine relies on.

use proptest::prelude::*;
use sl2prim::clifford::{
    compare_polynomials, max_dimension_bound, primitive_plancherel_mass, primitive_table, threshold, Verdict,
    ZetaPolynomial,
};
use sl2prim::extension::ExtensionProblem;
use sl2prim::linalg::{centralizer_gl_order, centralizer_gl, psi_a, CongruenceSubgroup};
use sl2prim::orbits::{classify_type, orbit_representatives, sigma_equivalent, sns_parameters};
use sl2prim::{CyclicTriple, GroupKind, Mat2, Ring, RingElem};

const SPECS: [&str; 10] = [
    "Z/2^3", "Z/2^5", "Z/2^8", "F2[t]/t^3", "F2[t]/t^5", "F2[t]/t^8", "F4[t]/t^3", "F4[t]/t^4", "GR(2^3,2)", "GR(2^4,2)",
];

fn any_ring() -> impl Strategy<Value = Ring> {
    prop::sample::select(SPECS.to_vec()).prop_map(|s| Ring::parse(s).unwrap())
}

fn ring_with_elements(n: usize) -> impl Strategy<Value = (Ring, Vec<RingElem>)> {
    any_ring().prop_flat_map(move |ring| {
        let size = ring.size();
        (Just(ring), prop::collection::vec((0..size).prop_map(RingElem), n))
    })
}

/// An even-length ring of either family together with a random cyclic triple
/// over its level ring.
fn even_ring_and_triple(lengths: &'static [u32]) -> impl Strategy<Value = (Ring, CyclicTriple)> {
    (prop::sample::select(lengths.to_vec()), prop::bool::ANY)
        .prop_flat_map(|(r, char_two)| {
            let spec = if char_two { format!("F2[t]/t^{r}") } else { format!("Z/2^{r}") };
            let ring = Ring::parse(&spec).unwrap();
            let n = ring.with_length(r / 2).unwrap().size();
            (Just(ring), 0..n, 0..n, 0..n)
        })
        .prop_filter_map("unit a", |(ring, a, alpha, beta)| {
            let level = ring.with_length(ring.r() / 2).unwrap();
            level.is_unit(RingElem(a)).then(|| (ring, CyclicTriple::from_codes(a, alpha, beta)))
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn ring_axioms((ring, xs) in ring_with_elements(3)) {
        let (a, b, c) = (xs[0], xs[1], xs[2]);
        prop_assert_eq!(ring.mul(a, ring.mul(b, c)), ring.mul(ring.mul(a, b), c));
        prop_assert_eq!(ring.mul(a, ring.add(b, c)), ring.add(ring.mul(a, b), ring.mul(a, c)));
        prop_assert_eq!(ring.add(a, b), ring.add(b, a));
        prop_assert_eq!(ring.mul(a, b), ring.mul(b, a));
        prop_assert_eq!(ring.sub(ring.add(a, b), b), a);
    }

    #[test]
    fn units_invert_and_valuations_add((ring, xs) in ring_with_elements(2)) {
        let (a, b) = (xs[0], xs[1]);
        match ring.inv(a) {
            Some(i) => prop_assert_eq!(ring.mul(a, i), ring.one()),
            None => prop_assert!(ring.valuation(a) > 0),
        }
        let v = (ring.valuation(a) + ring.valuation(b)).min(ring.r());
        prop_assert_eq!(ring.valuation(ring.mul(a, b)), v);
        let (val, u) = ring.unit_part(a);
        if a != ring.zero() {
            prop_assert!(ring.is_unit(u));
            prop_assert_eq!(ring.shift_up(u, val), a);
        }
    }

    #[test]
    fn squares_have_square_roots((ring, xs) in ring_with_elements(1)) {
        let x = ring.square(xs[0]);
        prop_assert!(ring.is_square(x));
        let y = ring.sqrt(x).unwrap();
        prop_assert_eq!(ring.square(y), x);
    }

    #[test]
    fn determinant_is_multiplicative((ring, xs) in ring_with_elements(8)) {
        let m = Mat2::new(xs[0], xs[1], xs[2], xs[3]);
        let n = Mat2::new(xs[4], xs[5], xs[6], xs[7]);
        prop_assert_eq!(m.mul(&ring, &n).det(&ring), ring.mul(m.det(&ring), n.det(&ring)));
        if let Some(inv) = m.inverse(&ring) {
            prop_assert_eq!(m.mul(&ring, &inv), Mat2::identity());
        }
    }

    #[test]
    fn centralizer_order_counts_invertible_pairs((ring, xs) in ring_with_elements(2)) {
        let level = ring.with_length(ring.r().min(2)).unwrap();
        let t = CyclicTriple::new(level.one(), level.convert_from(&ring, xs[0]), level.convert_from(&ring, xs[1]));
        prop_assert_eq!(centralizer_gl(&level, &t).count() as u64, centralizer_gl_order(&level, &t));
    }

    /// `psi_A` is a character of `K^l` and ignores scalar shifts of `A`.
    #[test]
    fn psi_is_a_character_and_ignores_scalars(
        (ring, t) in even_ring_and_triple(&[4, 6]),
        picks in prop::collection::vec(any::<prop::sample::Index>(), 2),
        shift in any::<u64>(),
    ) {
        let l = ring.r().div_ceil(2);
        let kernel = CongruenceSubgroup::new(l, GroupKind::SL).elements(&ring);
        let (k1, k2) = (picks[0].get(&kernel), picks[1].get(&kernel));
        let a = t.convert(&ring, &ring.with_length(ring.r() / 2).unwrap()).matrix(&ring);
        let m = ring.psi_modulus();
        let lhs = psi_a(&ring, &a, &k1.mul(&ring, k2), l);
        prop_assert_eq!(lhs, (psi_a(&ring, &a, k1, l) + psi_a(&ring, &a, k2, l)) % m);
        let shifted = a.add(&ring, &Mat2::scalar(RingElem(shift % ring.size())));
        prop_assert_eq!(psi_a(&ring, &shifted, k1, l), psi_a(&ring, &a, k1, l));
    }

    /// Every triple is equivalent to exactly one listed representative, of
    /// the same type (and, in characteristic two, the same SNS parameters).
    #[test]
    fn representatives_cover_once((ring, t) in even_ring_and_triple(&[4, 6, 8])) {
        let level = ring.with_length(ring.r() / 2).unwrap();
        let reps = orbit_representatives(&level);
        let hits: Vec<_> = reps.iter().filter(|c| sigma_equivalent(&level, &t, &c.representative)).collect();
        prop_assert_eq!(hits.len(), 1);
        let rep = hits[0].representative;
        prop_assert_eq!(classify_type(&level, &rep), classify_type(&level, &t));
        if level.is_char_two() {
            // In characteristic two the moves fix beta, so (k, s) is an invariant.
            prop_assert_eq!(sns_parameters(&level, &rep), sns_parameters(&level, &t));
        }
    }

    /// `E` is an additive subgroup containing `(pi^l)`, the closed forms
    /// agree with the direct test, and the index is at most 4 above the
    /// threshold.
    #[test]
    fn extension_sets_are_subgroups((ring, t) in even_ring_and_triple(&[4, 6, 8, 10])) {
        let p = ExtensionProblem::new(&ring, t).unwrap();
        let brute = p.e_brute();
        prop_assert!(brute.contains(&ring, ring.zero()));
        prop_assert!(brute.is_subgroup(&ring));
        let fast = p.e_fast().unwrap();
        prop_assert!(fast.same_set(&brute));
        if ring.r() >= threshold(&ring) {
            prop_assert!(brute.index_over_pi_ell() <= 4);
        }
        prop_assert!(p.h_cardinality(p.l()) <= p.h_cardinality(p.l_prime()));
    }

    /// The extension set does not depend on the chosen lift.
    #[test]
    fn extension_sets_ignore_the_lift((ring, t) in even_ring_and_triple(&[4, 6, 8]), digits in any::<u64>()) {
        let level = ring.with_length(ring.r() / 2).unwrap();
        let lp = level.r();
        let high = ring.shift_up(RingElem(digits % level.size()), lp);
        let lift_of = |x: RingElem| ring.add(ring.convert_from(&level, x), high);
        let lift = CyclicTriple::new(lift_of(t.a), lift_of(t.alpha), lift_of(t.beta));
        let canonical = ExtensionProblem::new(&ring, t).unwrap().e_brute();
        let other = ExtensionProblem::with_lift(&ring, t, lift).unwrap().e_brute();
        prop_assert!(canonical.same_set(&other));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    /// Plancherel and the top-dimension bound on whole tables.
    #[test]
    fn tables_satisfy_plancherel(r in prop::sample::select(vec![2u32, 4, 6, 8]), char_two in any::<bool>()) {
        let spec = if char_two { format!("F2[t]/t^{r}") } else { format!("Z/2^{r}") };
        let ring = Ring::parse(&spec).unwrap();
        let table = primitive_table(&ring).unwrap();
        prop_assert_eq!(table.zeta.plancherel_mass(), primitive_plancherel_mass(2, r));
        let top = max_dimension_bound(2, r);
        prop_assert!(table.zeta.terms.keys().all(|&d| d <= top));
        if r >= 4 {
            // Some split-semisimple orbit attains the bound.
            prop_assert!(table.zeta.count(top) > 0);
        }
    }

    #[test]
    fn zeta_polynomials_add_and_compare(dims in prop::collection::vec(1u64..200, 0..40), extra in 1u64..200) {
        let p = ZetaPolynomial::from_dimensions(dims.iter().copied());
        prop_assert_eq!(p.total_count(), dims.len() as u64);
        prop_assert_eq!(compare_polynomials(&p, &p), Verdict::Consistent);
        let q = p.add(&ZetaPolynomial::from_dimensions([extra]));
        prop_assert_eq!(q.plancherel_mass(), p.plancherel_mass() + (extra * extra) as u128);
        prop_assert_eq!(
            compare_polynomials(&p, &q),
            Verdict::Distinguished { dimension: extra, count_a: p.count(extra), count_b: p.count(extra) + 1 }
        );
    }
}
