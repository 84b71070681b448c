//! Acceptance criteria, one PASS/FAIL line each. Every expected value is
//! either a stated constant or produced by an oracle written here.

use std::collections::BTreeMap;
use std::process::ExitCode;
use std::time::Instant;

use num_bigint::BigUint;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};

use esc_count::abelian::{enumerate_automorphisms, AbelianGroup};
use esc_count::burnside::{
    all_permutations, fixed_point_report, fixed_points_by_cycles, fixed_points_naive,
    orbit_count_congruence, orbit_count_naive,
};
use esc_count::closed_form::{
    general_linear_order, n_cyclic, n_cyclic_prime_power, n_cyclic_prime_power_form,
    n_elementary_abelian, special_case_value, CyclicForm, SpecialCase,
};
use esc_count::numtheory::{
    cycle_types, delta_census, delta_pattern, divisors, euler_phi, factorial, perm_count,
    CycleType,
};
use esc_count::verify::{abelian_groups_up_to, closed_form_value, sweep, Method, Outcome};
use esc_count::Budget;

type Check = Result<(), String>;
type Criterion<'a> = Box<dyn Fn() -> Check + 'a>;

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Check {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn same<T: PartialEq + std::fmt::Display>(what: &str, values: &[(&str, T)]) -> Check {
    let first = &values[0].1;
    if values.iter().all(|(_, v)| v == first) {
        Ok(())
    } else {
        let all: Vec<String> = values.iter().map(|(n, v)| format!("{n}={v}")).collect();
        Err(format!("{what}: {}", all.join(", ")))
    }
}

fn cyclic(m: u64) -> AbelianGroup {
    AbelianGroup::cyclic(m).expect("valid order")
}

fn e(err: impl std::fmt::Display) -> String {
    err.to_string()
}

fn big(x: u64) -> BigUint {
    BigUint::from(x)
}

fn gcd_phi(n: u64) -> u64 {
    (1..=n).filter(|&k| k.gcd(&n) == 1).count() as u64
}

fn order_mod(i: u64, m: u64) -> u64 {
    let mut x = i % m;
    let mut k = 1;
    while x != 1 % m {
        x = x * i % m;
        k += 1;
    }
    k
}

fn matrix_rank_mod_p(mut rows: Vec<Vec<u64>>, p: u64) -> usize {
    let cols = rows.first().map_or(0, Vec::len);
    let mut rank = 0;
    for c in 0..cols {
        let Some(pivot) = (rank..rows.len()).find(|&r| !rows[r][c].is_multiple_of(p)) else {
            continue;
        };
        rows.swap(rank, pivot);
        let inv = (1..p).find(|&x| rows[rank][c] * x % p == 1).unwrap();
        for x in rows[rank].iter_mut() {
            *x = *x * inv % p;
        }
        for r in 0..rows.len() {
            if r != rank && rows[r][c] != 0 {
                let factor = rows[r][c];
                for k in 0..cols {
                    rows[r][k] = (rows[r][k] + p * p - factor * rows[rank][k] % p) % p;
                }
            }
        }
        rank += 1;
    }
    rank
}

fn invertible_matrices(p: u64, s: usize) -> u64 {
    let total = p.pow((s * s) as u32);
    (0..total)
        .filter(|&code| {
            let mut c = code;
            let rows: Vec<Vec<u64>> = (0..s)
                .map(|_| {
                    (0..s)
                        .map(|_| {
                            let v = c % p;
                            c /= p;
                            v
                        })
                        .collect()
                })
                .collect();
            matrix_rank_mod_p(rows, p) == s
        })
        .count() as u64
}

fn naive_if_small(group: &AbelianGroup, n: usize, b: &Budget) -> Option<Result<BigUint, String>> {
    let small = group.order() <= 16 && (n <= 2 || group.order() <= 8);
    small.then(|| orbit_count_naive(group, n, b).map_err(e))
}

/// Stated values for C2 and C4 at n = 2 from four routes.
fn stated_pair_values(b: &Budget) -> Check {
    for (p, e_, expected) in [(2u64, 1u32, 10u64), (2, 2, 76)] {
        let g = cyclic(p.pow(e_));
        same(
            &format!("{g} n=2"),
            &[
                ("stated", big(expected)),
                ("naive", orbit_count_naive(&g, 2, b).map_err(e)?),
                ("congruence", orbit_count_congruence(&g, 2, b).map_err(e)?),
                ("prime-power", n_cyclic_prime_power(p, e_, 2).map_err(e)?),
                (
                    "two-slot",
                    special_case_value(&SpecialCase::CyclicPrimePowerPair { p, e: e_ }).map_err(e)?,
                ),
            ],
        )?;
    }
    Ok(())
}

/// `N(C_{p^e}, 1)` from the one-slot expression, the prime-power formula and
/// (order <= 16) the naive count.
fn one_slot_values(b: &Budget) -> Check {
    let mut cases: Vec<(u64, u32, u64)> = [(2u64, 1u32), (2, 2), (3, 1), (3, 2), (5, 1), (7, 1), (3, 3)]
        .into_iter()
        .map(|(p, e_)| (p, e_, p.pow(e_) + 2 * (0..e_).map(|i| p.pow(i)).sum::<u64>()))
        .collect();
    cases.extend((3..=5u32).map(|e_| (2, e_, (1u64 << (e_ + 1)) + (1 << e_) - 2)));
    for (p, e_, oracle) in cases {
        let g = cyclic(p.pow(e_));
        let mut values = vec![
            ("expression", big(oracle)),
            (
                "one-slot",
                special_case_value(&SpecialCase::CyclicPrimePowerSingle { p, e: e_ }).map_err(e)?,
            ),
            ("prime-power", n_cyclic_prime_power(p, e_, 1).map_err(e)?),
        ];
        if let Some(naive) = naive_if_small(&g, 1, b) {
            values.push(("naive", naive?));
        }
        same(&format!("{g} n=1"), &values)?;
    }
    Ok(())
}

/// Squarefree cyclic groups at n = 1.
fn squarefree_values(b: &Budget) -> Check {
    for primes in [&[2u64, 3][..], &[2, 5], &[3, 5], &[2, 3, 5]] {
        let m: u64 = primes.iter().product();
        let g = cyclic(m);
        let mut values = vec![
            ("product", big(primes.iter().map(|p| p + 2).product())),
            (
                "squarefree",
                special_case_value(&SpecialCase::SquarefreeSingle { primes: primes.to_vec() })
                    .map_err(e)?,
            ),
            ("cyclic", n_cyclic(m, 1).map_err(e)?),
            ("congruence", orbit_count_congruence(&g, 1, b).map_err(e)?),
        ];
        if let Some(naive) = naive_if_small(&g, 1, b) {
            values.push(("naive", naive?));
        }
        same(&format!("C{m} n=1"), &values)?;
    }
    Ok(())
}

/// Prime cyclic expression against the prime-power formula at e = 1 and the
/// naive count.
fn prime_cyclic_values(b: &Budget) -> Check {
    for p in [2u64, 3, 5] {
        for n in 1..=3usize {
            let g = cyclic(p);
            let mut values = vec![
                (
                    "prime-cyclic",
                    special_case_value(&SpecialCase::PrimeCyclic { p, n }).map_err(e)?,
                ),
                ("prime-power", n_cyclic_prime_power(p, 1, n).map_err(e)?),
            ];
            if let Some(naive) = naive_if_small(&g, n, b) {
                values.push(("naive", naive?));
            }
            ensure(values.len() == 3, || format!("C{p} n={n}: naive not run"))?;
            same(&format!("C{p} n={n}"), &values)?;
        }
    }
    Ok(())
}

/// `|GL(s, p)|` and `N(C_2^2, n)`.
fn elementary_abelian_values(b: &Budget) -> Check {
    for (p, s) in [(2u64, 2usize), (2, 3), (3, 2)] {
        let product_form = p.pow((s * (s - 1) / 2) as u32)
            * (1..=s as u32).map(|i| p.pow(i) - 1).product::<u64>();
        let g = AbelianGroup::parse(&format!("C{p}^{s}")).map_err(e)?;
        let automorphisms = enumerate_automorphisms(&g, b).map_err(e)?.len() as u64;
        same(
            &format!("|GL({s}, {p})|"),
            &[
                ("product", big(product_form)),
                ("library", general_linear_order(p, s as u32)),
                ("rank scan", big(invertible_matrices(p, s))),
                ("automorphisms", big(automorphisms)),
            ],
        )?;
    }
    let g = AbelianGroup::parse("C2xC2").map_err(e)?;
    let naive_one = orbit_count_naive(&g, 1, b).map_err(e)?;
    ensure(naive_one == big(5), || format!("naive N(C2^2, 1) = {naive_one}, expected 5"))?;
    for n in 1..=2 {
        same(
            &format!("C2^2 n={n}"),
            &[
                ("elementary-abelian", n_elementary_abelian(2, 2, n, b).map_err(e)?),
                ("naive", orbit_count_naive(&g, n, b).map_err(e)?),
            ],
        )?;
    }
    same(
        "C2^2 n=1 stated",
        &[("stated", big(5)), ("elementary-abelian", n_elementary_abelian(2, 2, 1, b).map_err(e)?)],
    )
}

/// Every group of order <= 16 at n <= 2 and order <= 8 at n = 3.
fn equivalence_sweep(b: &Budget) -> Check {
    let start = Instant::now();
    let mut cases = sweep(16, 2, b).map_err(e)?.cases;
    cases.extend(sweep(8, 3, b).map_err(e)?.cases.into_iter().filter(|c| c.n == 3));
    let elapsed = start.elapsed();
    let expected_cases = abelian_groups_up_to(16).map_err(e)?.len() * 2
        + abelian_groups_up_to(8).map_err(e)?.len();
    ensure(cases.len() == expected_cases, || {
        format!("{} cases, expected {expected_cases}", cases.len())
    })?;
    for case in &cases {
        ensure(case.agree, || format!("{} n={} disagrees: {:?}", case.group, case.n, case.results))?;
        for required in [Method::Naive, Method::Congruence] {
            let ran = case
                .results
                .iter()
                .any(|r| r.method == required && matches!(r.outcome, Outcome::Computed { .. }));
            ensure(ran, || format!("{} n={}: {required} did not run", case.group, case.n))?;
        }
        let g = AbelianGroup::parse(&case.group).map_err(e)?;
        let (method, value) = closed_form_value(&g, case.n, b).map_err(e)?;
        ensure(case.value() == Some(value.to_string().as_str()), || {
            format!("{} n={}: closed form {method} gives {value}", case.group, case.n)
        })?;
    }
    ensure(elapsed.as_secs() < 60, || format!("sweep took {elapsed:?}"))
}

fn expected_census(p: u64, e_: u32) -> BTreeMap<Vec<u64>, u64> {
    let mut out = BTreeMap::new();
    if p == 2 && e_ >= 3 {
        for d in [1u64, 2] {
            for k in 2..=e_ {
                let mut v = vec![1u64];
                v.extend(std::iter::repeat_n(d, k as usize - 1));
                v.extend((1..=e_ - k).map(|j| 1u64 << j));
                *out.entry(v).or_insert(0) += gcd_phi(2u64.pow(e_ - k));
            }
        }
    } else {
        for d in (1..p).filter(|d| (p - 1).is_multiple_of(*d)) {
            for k in 1..=e_ {
                let v: Vec<u64> = (1..=e_).map(|s| if s <= k { d } else { d * p.pow(s - k) }).collect();
                *out.entry(v).or_insert(0) += gcd_phi(p.pow(e_ - k) * d);
            }
        }
    }
    out
}

/// Totient, partition, order-vector census, per-pair fixed points and
/// Burnside divisibility.
fn property_suites(b: &Budget) -> Check {
    for n in 1..=1000u64 {
        let phi_sum: u64 = divisors(n).into_iter().map(euler_phi).sum();
        ensure(phi_sum == n, || format!("sum of phi over divisors of {n} is {phi_sum}"))?;
        ensure(euler_phi(n) == gcd_phi(n), || format!("phi({n}) disagrees with gcd count"))?;
    }
    for n in 1..=12usize {
        let types: Vec<CycleType> = cycle_types(n).collect();
        let weight: BigRational = types.iter().fold(BigRational::zero(), |acc, t| acc + t.weight());
        ensure(weight.is_one(), || format!("partition weights for n={n} sum to {weight}"))?;
        let perms: BigUint = types.iter().map(perm_count).sum();
        ensure(perms == factorial(n as u64), || format!("class sizes for n={n} sum to {perms}"))?;
    }
    for (p, e_) in [(3u64, 1u32), (3, 2), (3, 3), (5, 1), (5, 2), (2, 2), (2, 3), (2, 4)] {
        let modulus = p.pow(e_);
        let mut scanned: BTreeMap<Vec<u64>, u64> = BTreeMap::new();
        for i in (1..modulus).filter(|i| i % p != 0) {
            let v: Vec<u64> = (1..=e_).map(|s| order_mod(i, p.pow(s))).collect();
            *scanned.entry(v).or_insert(0) += 1;
        }
        let expected = expected_census(p, e_);
        ensure(scanned == expected, || format!("{p}^{e_}: scanned {scanned:?}, expected {expected:?}"))?;
        let mut library: BTreeMap<Vec<u64>, u64> = BTreeMap::new();
        for (shape, count) in delta_census(p, e_).map_err(e)? {
            let v = delta_pattern(p, e_, shape).map_err(e)?;
            let count: u64 = count.try_into().map_err(e)?;
            *library.entry(v).or_insert(0) += count;
        }
        ensure(library == expected, || format!("{p}^{e_}: library census {library:?}"))?;
    }
    for g in abelian_groups_up_to(8).map_err(e)? {
        for n in 1..=2usize {
            let aut = enumerate_automorphisms(&g, b).map_err(e)?;
            let perms = all_permutations(n);
            let mut total = BigUint::zero();
            for phi in &aut {
                for sigma in &perms {
                    let naive = fixed_points_naive(phi, sigma, &g, b).map_err(e)?;
                    let cycles =
                        fixed_points_by_cycles(phi, &CycleType::of_permutation(sigma), &g, b).map_err(e)?;
                    ensure(naive == cycles, || {
                        format!("{g} n={n} sigma={sigma:?}: naive {naive}, cycles {cycles}")
                    })?;
                    total += naive;
                }
            }
            let size = big(aut.len() as u64) * factorial(n as u64);
            ensure(total.is_multiple_of(&size), || format!("{g} n={n}: {total} not divisible by {size}"))?;
        }
    }
    for g in abelian_groups_up_to(16).map_err(e)? {
        for n in 1..=3usize {
            if n == 3 && g.order() > 8 {
                continue;
            }
            let report = fixed_point_report(&g, n, b).map_err(e)?;
            let size = big(enumerate_automorphisms(&g, b).map_err(e)?.len() as u64) * factorial(n as u64);
            ensure(report.total.is_multiple_of(&size), || {
                format!("{g} n={n}: Burnside total {} not divisible by {size}", report.total)
            })?;
            ensure(&report.total / &size == report.orbit_count, || format!("{g} n={n}: quotient"))?;
        }
    }
    Ok(())
}

/// Both arrangements of the cyclic prime-power formula.
fn arrangement_equality() -> Check {
    let mut cases: Vec<(u64, u32)> = Vec::new();
    for p in [3u64, 5] {
        cases.extend((1..=3).map(|e_| (p, e_)));
    }
    cases.extend([(2, 3), (2, 4)]);
    for (p, e_) in cases {
        for n in 1..=4usize {
            same(
                &format!("C{p}^{e_} n={n}"),
                &[
                    ("unit classes", n_cyclic_prime_power_form(p, e_, n, CyclicForm::UnitClasses).map_err(e)?),
                    ("regrouped", n_cyclic_prime_power_form(p, e_, n, CyclicForm::Regrouped).map_err(e)?),
                ],
            )?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let budget = Budget::default();
    let b = &budget;
    let criteria: Vec<(&str, Criterion)> = vec![
        ("stated values N(C2,2)=10, N(C4,2)=76", Box::new(|| stated_pair_values(b))),
        ("one-slot cyclic prime-power values", Box::new(|| one_slot_values(b))),
        ("squarefree cyclic values at n=1", Box::new(|| squarefree_values(b))),
        ("prime cyclic expression", Box::new(|| prime_cyclic_values(b))),
        ("elementary abelian GL orders and counts", Box::new(|| elementary_abelian_values(b))),
        ("equivalence sweep", Box::new(|| equivalence_sweep(b))),
        ("property suites", Box::new(|| property_suites(b))),
        ("formula arrangements agree", Box::new(arrangement_equality)),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        match check() {
            Ok(()) => println!("PASS {} {name} ({:.2?})", i + 1, start.elapsed()),
            Err(msg) => {
                failed += 1;
                println!("FAIL {} {name}: {msg}", i + 1);
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
