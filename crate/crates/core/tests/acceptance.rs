//! Acceptance run: eight end-to-end criteria, one PASS/FAIL line each.
//!
//! Runs without the libtest harness so every criterion is evaluated and
//! reported even when an earlier one fails; the process exits nonzero if
//! any criterion fails.

use std::collections::{BTreeMap, BTreeSet};
use std::time::{Duration, Instant};

use rand::rngs::StdRng;
use rand::{Rng as _, SeedableRng};
use sl2prim::brute_force::{
    character_table, enumerate_sl2, orbit_oracle, primitive_dimension_multiset, extension_oracle, DEFAULT_CAP,
};
use sl2prim::clifford::{
    compare_group_algebras, count_in_window, dimension_window, max_dimension_bound, nmax, primitive_plancherel_mass,
    primitive_table, stabilizers, threshold, zeta_contributions, PrimitiveTable, Verdict, ZetaPolynomial,
};
use sl2prim::extension::{appendix_params, extension_char_bound, ExtensionProblem};
use sl2prim::linalg::{centralizer_gl, companion_reduce, group_order, CongruenceSubgroup};
use sl2prim::orbits::{
    classify_type, count_orbits_by_type, gl_sns_class_counts, gl_sns_class_formula, orbit_representatives,
    sns_parameters, split_class_count, GlCountVariant, OrbitType,
};
use sl2prim::{CyclicTriple, GroupKind, Ring, RingElem};

/// Outcome of one criterion: failures collected as human-readable notes.
struct Criterion {
    failures: Vec<String>,
    notes: Vec<String>,
}

impl Criterion {
    fn new() -> Self {
        Self { failures: Vec::new(), notes: Vec::new() }
    }

    fn check(&mut self, ok: bool, what: impl FnOnce() -> String) {
        if !ok {
            self.failures.push(what());
        }
    }

    fn note(&mut self, s: impl Into<String>) {
        self.notes.push(s.into());
    }
}

fn ring(spec: &str) -> Ring {
    Ring::parse(spec).unwrap_or_else(|e| panic!("{spec}: {e}"))
}

fn family(prefix: &str, r: u32) -> Ring {
    match prefix {
        "Z" => ring(&format!("Z/2^{r}")),
        _ => ring(&format!("F2[t]/t^{r}")),
    }
}

const FAMILIES: [&str; 2] = ["Z", "F2"];

fn level_of(ring: &Ring) -> Ring {
    ring.with_length(ring.r() / 2).expect("level ring")
}

fn sl_order(ring: &Ring) -> u64 {
    group_order(GroupKind::SL, ring.q(), ring.r())
}

fn timed<T>(f: impl FnOnce() -> T) -> (T, Duration) {
    let t0 = Instant::now();
    let out = f();
    (out, t0.elapsed())
}

// ----- 1. table reproduction --------------------------------------------------

/// Rows of a table as a multiset of `(|C(A)|, |M_A|, Delta1, Delta2, |G|/|M_A|)`.
fn row_signature(table: &PrimitiveTable, ring: &Ring) -> BTreeMap<(u64, u64, u64, u64, u64), u64> {
    let g = sl_order(ring);
    let mut out = BTreeMap::new();
    for row in &table.rows {
        *out.entry((row.centralizer_sl, row.m_a, row.delta1, row.delta2, g / row.m_a)).or_insert(0) += 1;
    }
    out
}

fn criterion_tables() -> Criterion {
    let mut c = Criterion::new();
    let expected = [
        ("Z/2^2", "4X^3 + X^2 + 2X"),
        ("F2[t]/t^2", "4X^3 + X^2 + 2X"),
        ("Z/2^4", "2X^24 + 2X^12 + 6X^8 + 20X^6 + 16X^3"),
        ("F2[t]/t^4", "X^24 + 8X^12 + 5X^8 + 16X^6 + 4X^4"),
        ("Z/2^6", "8X^96 + 8X^48 + 24X^32 + 80X^24 + 64X^12"),
        ("F2[t]/t^6", "6X^96 + 16X^48 + 22X^32 + 88X^24 + 8X^16 + 32X^12"),
    ];
    for (spec, want) in expected {
        let ring = ring(spec);
        let (table, elapsed) = timed(|| primitive_table(&ring));
        let table = match table {
            Ok(t) => t,
            Err(e) => {
                c.check(false, || format!("{spec}: {e}"));
                continue;
            }
        };
        let got = table.zeta.to_string();
        c.check(got == want, || format!("{spec}: got {got}, expected {want}"));
        let limit = if ring.r() <= 4 { Duration::from_secs(10) } else { Duration::from_secs(300) };
        c.check(elapsed < limit, || format!("{spec}: took {elapsed:?} (limit {limit:?})"));
        c.note(format!("{spec} {:.2?}", elapsed));

        if spec == "Z/2^6" {
            // Per-orbit rows of the Z/64 table, grouped as in the published table.
            let want: BTreeMap<_, _> = [
                ((4, 1 << 11, 4, 0, 96), 2),
                ((12, 3 << 11, 12, 0, 32), 2),
                ((32, 1 << 14, 16, 0, 12), 4),
                ((8, 1 << 12, 4, 0, 48), 2),
                ((16, 1 << 13, 8, 0, 24), 10),
            ]
            .into_iter()
            .collect();
            let got = row_signature(&table, &ring);
            c.check(got == want, || format!("Z/2^6 rows: got {got:?}"));
        }
    }
    c
}

// ----- 2. Plancherel ----------------------------------------------------------

fn criterion_plancherel() -> Criterion {
    let mut c = Criterion::new();
    for fam in FAMILIES {
        for r in [2, 4, 6] {
            let ring = family(fam, r);
            let q = ring.q() as u128;
            let sl = |n: u32| (q * q - 1) * q.pow(3 * n - 2);
            let want = sl(r) - sl(r - 1);
            let mass = primitive_table(&ring).map(|t| t.zeta.plancherel_mass());
            c.check(mass == Ok(want), || format!("{}: mass {mass:?} != {want}", ring.spec()));
            c.check(primitive_plancherel_mass(ring.q(), r) == want, || "closed-form mass".into());
        }
    }
    c
}

// ----- 3. construction vs character tables ----------------------------------

fn criterion_character_oracle() -> Criterion {
    let mut c = Criterion::new();
    for fam in FAMILIES {
        for r in [2, 4] {
            let ring = family(fam, r);
            let (oracle, elapsed) = timed(|| {
                let g = enumerate_sl2(&ring, DEFAULT_CAP).expect("within cap");
                let table = character_table(&g, 1).expect("character table");
                ZetaPolynomial::from_dimensions(primitive_dimension_multiset(&g, &table).expect("primitive test"))
            });
            let constructed = primitive_table(&ring).expect("table").zeta;
            c.check(constructed == oracle, || format!("{}: construction {constructed} vs oracle {oracle}", ring.spec()));
            c.check(elapsed < Duration::from_secs(120), || format!("{}: oracle took {elapsed:?}", ring.spec()));
            c.note(format!("{} {:.2?}", ring.spec(), elapsed));
        }
    }
    c
}

// ----- 4. extension sets ------------------------------------------------------

fn random_triple(level: &Ring, rng: &mut StdRng) -> CyclicTriple {
    let n = level.size();
    let a = loop {
        let a = RingElem(rng.gen_range(0..n));
        if level.is_unit(a) {
            break a;
        }
    };
    CyclicTriple::new(a, RingElem(rng.gen_range(0..n)), RingElem(rng.gen_range(0..n)))
}

fn compare_fast_brute(c: &mut Criterion, ring: &Ring, t: CyclicTriple) -> bool {
    let problem = ExtensionProblem::new(ring, t).expect("valid triple");
    let ok = match problem.e_fast() {
        Ok(fast) => fast.same_set(&problem.e_brute()),
        Err(_) => false,
    };
    c.check(ok, || format!("{}: E_fast != E_brute at {}", ring.spec(), t.format(problem.level_ring())));
    ok
}

fn criterion_extension_sets() -> Criterion {
    let mut c = Criterion::new();
    let mut compared = 0;
    for fam in FAMILIES {
        for r in [4, 6, 8] {
            let ring = family(fam, r);
            for class in orbit_representatives(&level_of(&ring)) {
                compare_fast_brute(&mut c, &ring, class.representative);
                compared += 1;
            }
        }
    }
    let mut rng = StdRng::seed_from_u64(0x5eed);
    let mut random = 0;
    for r in [10, 12] {
        for fam in FAMILIES {
            let ring = family(fam, r);
            let level = level_of(&ring);
            for _ in 0..250 {
                compare_fast_brute(&mut c, &ring, random_triple(&level, &mut rng));
                random += 1;
            }
        }
    }
    let mut lambdas = 0;
    for fam in FAMILIES {
        let ring = family(fam, 4);
        for class in orbit_representatives(&level_of(&ring)) {
            let problem = ExtensionProblem::new(&ring, class.representative).expect("valid");
            let e = problem.e_brute();
            for lambda in problem.h_residues(problem.l()) {
                lambdas += 1;
                let oracle = extension_oracle(&ring, problem.lift(), lambda).expect("oracle");
                c.check(oracle == e.contains(&ring, lambda), || {
                    format!(
                        "{}: subgroup oracle {oracle} for lambda = {} at {}",
                        ring.spec(),
                        ring.format(lambda),
                        class.representative.format(problem.level_ring())
                    )
                });
            }
        }
    }
    c.note(format!("{compared} representatives, {random} random triples, {lambdas} subgroup checks"));
    c
}

// ----- 5. closed-form counts ------------------------------------------------

fn centralizer_formula(level: &Ring, t: &CyclicTriple) -> u64 {
    let (q, m) = (level.q(), level.r());
    let tail = q.pow(2 * m - 2);
    match classify_type(level, t) {
        OrbitType::SS => (q - 1) * (q - 1) * tail,
        OrbitType::IR => (q * q - 1) * tail,
        OrbitType::SNS => (q * q - q) * tail,
    }
}

/// Orbit-type counts from the direct conjugation sweep.
fn oracle_type_counts(level: &Ring) -> (BTreeMap<OrbitType, u64>, BTreeMap<OrbitType, u64>) {
    let mut orbits = BTreeMap::new();
    let mut sizes = BTreeMap::new();
    for orbit in orbit_oracle(level) {
        let (_, t) = companion_reduce(level, &orbit[0]).expect("cyclic");
        let ty = classify_type(level, &t);
        *orbits.entry(ty).or_insert(0) += 1;
        *sizes.entry(ty).or_insert(0) += orbit.len() as u64;
    }
    (orbits, sizes)
}

fn criterion_formulas() -> Criterion {
    let mut c = Criterion::new();

    for spec in ["Z/2^1", "Z/2^2", "Z/2^3", "F2[t]/t^1", "F2[t]/t^2", "F2[t]/t^3", "F4[t]/t^1", "F4[t]/t^2"] {
        let level = ring(spec);
        for alpha in level.elements() {
            for beta in level.elements() {
                let t = CyclicTriple::new(level.one(), alpha, beta);
                let n = centralizer_gl(&level, &t).count() as u64;
                c.check(n == centralizer_formula(&level, &t), || format!("{spec}: |C_GL| of {} = {n}", t.format(&level)));
            }
        }
    }

    for fam in FAMILIES {
        for r in [4, 6, 8] {
            let ring = family(fam, r);
            let level = level_of(&ring);
            for class in orbit_representatives(&level) {
                let p = ExtensionProblem::new(&ring, class.representative).expect("valid");
                for j in [p.l_prime(), p.l()] {
                    let (n, f) = (p.h_cardinality(j), p.h_cardinality_formula(j));
                    c.check(n == f, || {
                        format!("{}: |h^{j}| of {} = {n}, formula {f}", ring.spec(), class.representative.format(&level))
                    });
                }
            }
        }
    }

    for spec in ["Z/2^2", "Z/2^3", "Z/2^4", "F2[t]/t^1", "F2[t]/t^2", "F2[t]/t^3", "F2[t]/t^4", "F4[t]/t^2"] {
        let level = ring(spec);
        let want = split_class_count(&level);
        let by_type = count_orbits_by_type(&level);
        let (oracle, _) = oracle_type_counts(&level);
        for ty in [OrbitType::SS, OrbitType::IR] {
            let n = by_type.get(&ty).copied().unwrap_or(0);
            let o = oracle.get(&ty).copied().unwrap_or(0);
            c.check(Some(n) == want && n == o, || format!("{spec}: {ty} orbits {n}, oracle {o}, closed form {want:?}"));
        }
    }

    let mut stated_misses = 0;
    for spec in ["F2[t]/t^1", "F2[t]/t^2", "F2[t]/t^3", "F2[t]/t^4", "F2[t]/t^5", "F2[t]/t^6", "F4[t]/t^2", "F4[t]/t^3"] {
        let level = ring(spec);
        for ((k, s), n) in gl_sns_class_counts(&level) {
            let f = gl_sns_class_formula(level.q(), level.r(), k, s, GlCountVariant::Corrected);
            c.check(f == Some(n), || format!("{spec}: B_G({k},{s}) enumerated {n}, formula {f:?}"));
            if gl_sns_class_formula(level.q(), level.r(), k, s, GlCountVariant::AsStated) != Some(n) {
                stated_misses += 1;
            }
        }
    }
    c.note(format!("B_G with floor(l'/2) at k = l' misses {stated_misses} cells (odd l'); ceil(l'/2) used"));

    let expected = [
        ("Z/2^2", (3, 4)),
        ("F2[t]/t^2", (3, 4)),
        ("Z/2^4", (24, 2)),
        ("F2[t]/t^4", (24, 1)),
        ("Z/2^6", (96, 8)),
        ("F2[t]/t^6", (96, 6)),
    ];
    for (spec, want) in expected {
        let got = nmax(&ring(spec), DEFAULT_CAP);
        c.check(got == Ok(want), || format!("{spec}: nmax {got:?}, expected {want:?}"));
    }
    c
}

// ----- 6. structural bounds ---------------------------------------------------

fn criterion_bounds() -> Criterion {
    let mut c = Criterion::new();
    let mut blocks = 0;
    let rings: Vec<Ring> = FAMILIES
        .iter()
        .flat_map(|f| [4, 6, 8].map(|r| family(f, r)))
        .chain([ring("F4[t]/t^4"), ring("GR(2^4,2)")])
        .collect();
    for ring in &rings {
        let r = ring.r();
        let level = level_of(ring);
        let above = r >= threshold(ring);
        for class in orbit_representatives(&level) {
            let t = class.representative;
            let p = ExtensionProblem::new(ring, t).expect("valid");
            let e = p.e_set();
            if above {
                let idx = e.index_over_pi_ell();
                c.check(idx <= 4, || format!("{}: [E:(pi^l)] = {idx} at {}", ring.spec(), t.format(&level)));
            }
            c.check(extension_char_bound(ring, &e).is_ok(), || format!("{}: index above q^3", ring.spec()));
        }
        let table = primitive_table(ring).expect("table");
        let top = max_dimension_bound(ring.q(), r);
        for row in &table.rows {
            let stab = stabilizers(ring, &row.triple).expect("stabilizers");
            let (lo, hi) = dimension_window(ring, &stab);
            for b in &row.blocks {
                blocks += 1;
                c.check(b.dimension <= top, || format!("{}: dim {} > {top}", ring.spec(), b.dimension));
                if above {
                    c.check(lo <= b.dimension && b.dimension <= hi, || {
                        format!("{}: dim {} outside [{lo}, {hi}] at {}", ring.spec(), b.dimension, row.representative)
                    });
                }
            }
        }
    }
    let mut sns = 0;
    for spec in ["F2[t]/t^1", "F2[t]/t^2", "F2[t]/t^3", "F2[t]/t^4", "F4[t]/t^1", "F4[t]/t^2"] {
        let level = ring(spec);
        for a in level.units() {
            for alpha in level.elements() {
                for beta in level.elements() {
                    let t = CyclicTriple::new(a, alpha, beta);
                    if classify_type(&level, &t) != OrbitType::SNS {
                        continue;
                    }
                    sns += 1;
                    let p = sns_parameters(&level, &t);
                    let got = appendix_params(&level, &t);
                    c.check(got == (p.k, p.s / 2), || format!("{spec}: (w, delta) {got:?} vs (k, s) = ({}, {})", p.k, p.s));
                }
            }
        }
    }
    c.note(format!("{blocks} blocks, {sns} SNS triples"));
    c
}

// ----- 7. group-algebra verdicts ------------------------------------------

fn criterion_verdicts() -> Criterion {
    let mut c = Criterion::new();
    for r in [2, 4, 6] {
        let (a, b) = (family("Z", r), family("F2", r));
        let verdict = compare_group_algebras(&a, &b, DEFAULT_CAP);
        let ok = match (&verdict, r) {
            (Ok(Verdict::Consistent), 2) => true,
            (Ok(Verdict::Distinguished { dimension, .. }), _) if r > 2 => *dimension == max_dimension_bound(2, r),
            _ => false,
        };
        c.check(ok, || format!("r = {r}: {verdict:?}"));
        if let Ok(v) = verdict {
            c.note(format!("r={r}: {v}"));
        }
    }
    c
}

// ----- 8. per-type counts -------------------------------------------------------

fn criterion_type_counts() -> Criterion {
    let mut c = Criterion::new();
    for fam in FAMILIES {
        for r in [4, 6, 8] {
            let ring = family(fam, r);
            let level = level_of(&ring);
            let (oracle_orbits, oracle_sizes) = oracle_type_counts(&level);
            let by_type = count_orbits_by_type(&level);
            let want = split_class_count(&level);
            for ty in [OrbitType::SS, OrbitType::IR] {
                let n = by_type.get(&ty).copied().unwrap_or(0);
                let o = oracle_orbits.get(&ty).copied().unwrap_or(0);
                c.check(Some(n) == want && n == o, || {
                    format!("{}: {ty} orbits {n}, oracle {o}, closed form {want:?}", ring.spec())
                });
            }
            let table = primitive_table(&ring).expect("table");
            let above = r >= threshold(&ring);
            for row in &table.rows {
                if row.orbit_type == OrbitType::SNS || !above {
                    continue;
                }
                let stab = stabilizers(&ring, &row.triple).expect("stabilizers");
                let n_a = row.delta1 + row.delta2;
                c.check(count_in_window(&ring, &stab, n_a), || {
                    format!("{}: n_A = {n_a} outside the window at {}", ring.spec(), row.representative)
                });
            }
            // Each orbit O of characters carries Plancherel mass |G| |O| / |K^l|.
            let k = CongruenceSubgroup::new(r.div_ceil(2), GroupKind::SL).order(ring.q(), r) as u128;
            let g = sl_order(&ring) as u128;
            let types: BTreeSet<OrbitType> = [OrbitType::SS, OrbitType::IR, OrbitType::SNS].into();
            for ty in types {
                let mass = zeta_contributions(&table, ty).plancherel_mass();
                let want = g * oracle_sizes.get(&ty).copied().unwrap_or(0) as u128 / k;
                c.check(mass == want, || format!("{}: {ty} mass {mass} != {want}", ring.spec()));
            }
        }
    }
    c
}

type NamedCriterion = (&'static str, fn() -> Criterion);

fn main() {
    let criteria: [NamedCriterion; 8] = [
        ("table reproduction", criterion_tables),
        ("Plancherel identity", criterion_plancherel),
        ("construction = character-table oracle", criterion_character_oracle),
        ("extension sets: fast = direct = subgroup oracle", criterion_extension_sets),
        ("closed-form counts", criterion_formulas),
        ("structural bounds", criterion_bounds),
        ("group-algebra verdicts", criterion_verdicts),
        ("per-type orbit counts and windows", criterion_type_counts),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let (c, elapsed) = timed(run);
        let status = if c.failures.is_empty() { "PASS" } else { "FAIL" };
        let notes = if c.notes.is_empty() { String::new() } else { format!(" [{}]", c.notes.join("; ")) };
        println!("criterion {}: {status} — {name} ({elapsed:.1?}){notes}", i + 1);
        for f in &c.failures {
            println!("    {f}");
        }
        failed += usize::from(!c.failures.is_empty());
    }
    if failed > 0 {
        println!("{failed} of 8 criteria failed");
        std::process::exit(1);
    }
    println!("all 8 criteria passed");
}
