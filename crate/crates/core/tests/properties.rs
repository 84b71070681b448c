use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{One, Zero};
use proptest::prelude::*;

use esc_count::abelian::AbelianGroup;
use esc_count::burnside::{act, all_permutations, compose_permutations, fixed_points_by_cycles, fixed_points_naive, Esc};
use esc_count::closed_form::{n_cyclic, n_cyclic_prime_power_form, CyclicForm};
use esc_count::numtheory::{cycle_types, divisors, euler_phi, CycleType};
use esc_count::Budget;

fn small_group() -> impl Strategy<Value = AbelianGroup> {
    prop::sample::select(vec!["C1", "C2", "C3", "C4", "C5", "C6", "C2xC2", "C8", "C2xC4", "C3xC3", "C2^3"])
        .prop_map(|s| AbelianGroup::parse(s).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn phi_sums_over_divisors(n in 1u64..5000) {
        let total: u64 = divisors(n).into_iter().map(euler_phi).sum();
        prop_assert_eq!(total, n);
    }

    #[test]
    fn canonical_form_is_stable(group in small_group()) {
        let again = AbelianGroup::parse(&group.to_string()).unwrap();
        prop_assert_eq!(again.to_string(), group.to_string());
        prop_assert_eq!(again.order(), group.order());
    }

    #[test]
    fn action_is_a_group_action(group in small_group(), index in any::<u64>(), seed in any::<u64>()) {
        let n = 2;
        let b = Budget::default();
        let aut = esc_count::abelian::enumerate_automorphisms(&group, &b).unwrap();
        let omega = (group.order() * group.order()).pow(n as u32);
        let x = Esc::at(&group, n, index % omega);
        let a = &aut[(seed as usize) % aut.len()];
        let c = &aut[((seed >> 20) as usize) % aut.len()];
        let perms = all_permutations(n);
        let s = &perms[(seed as usize >> 40) % perms.len()];
        let t = &perms[(seed as usize >> 41) % perms.len()];
        let ac = a.compose(c).unwrap();
        let st = compose_permutations(s, t);
        let lhs = act(&ac, &st, &x).unwrap();
        let rhs = act(a, s, &act(c, t, &x).unwrap()).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn fixed_point_routes_agree(group in small_group(), seed in any::<usize>(), n in 1usize..=3) {
        let b = Budget::default();
        let aut = esc_count::abelian::enumerate_automorphisms(&group, &b).unwrap();
        let phi = &aut[seed % aut.len()];
        let perms = all_permutations(n);
        let sigma = &perms[(seed >> 16) % perms.len()];
        prop_assume!((group.order() as u128).pow(2 * n as u32) <= 1 << 16);
        let naive = fixed_points_naive(phi, sigma, &group, &b).unwrap();
        let cycles = fixed_points_by_cycles(phi, &CycleType::of_permutation(sigma), &group, &b).unwrap();
        prop_assert_eq!(naive, cycles);
    }

    #[test]
    fn cyclic_arrangements_agree(p in prop::sample::select(vec![2u64, 3, 5, 7]), e in 1u32..=5, n in 1usize..=5) {
        let a = n_cyclic_prime_power_form(p, e, n, CyclicForm::UnitClasses).unwrap();
        let b = n_cyclic_prime_power_form(p, e, n, CyclicForm::Regrouped).unwrap();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn cyclic_counts_grow_with_n(m in 2u64..=60, n in 1usize..=4) {
        let smaller = n_cyclic(m, n).unwrap();
        let larger = n_cyclic(m, n + 1).unwrap();
        prop_assert!(larger > smaller);
    }
}

#[test]
fn cycle_type_weights_sum_to_one() {
    for n in 1..=12 {
        let total: BigRational = cycle_types(n).map(|t| t.weight()).fold(BigRational::zero(), |a, w| a + w);
        assert!(total.is_one(), "n={n}");
    }
}

#[test]
fn orbit_count_lower_bound() {
    // At least |Ω| / (|Aut| n!) orbits.
    let b = Budget::default();
    for spec in ["C4", "C2xC2", "C6"] {
        let g = AbelianGroup::parse(spec).unwrap();
        let aut = esc_count::abelian::enumerate_automorphisms(&g, &b).unwrap().len() as u64;
        for n in 1..=3usize {
            let omega = BigUint::from(g.order()).pow(2 * n as u32);
            let group_size = BigUint::from(aut) * (1..=n as u64).product::<u64>();
            let count = esc_count::burnside::orbit_count_congruence(&g, n, &b).unwrap();
            assert!(count * &group_size >= omega, "{spec} n={n}");
        }
    }
}

#[test]
fn element_and_character_solution_counts_coincide() {
    let b = Budget::default();
    let mut pairs = 0;
    for g in esc_count::verify::abelian_groups_up_to(16).unwrap() {
        let aut = esc_count::abelian::AutomorphismGroup::new(&g, &b).unwrap();
        for a in aut.members() {
            for r in 1..=4 {
                let nu = esc_count::abelian::count_element_solutions(&a.matrix, r, &b).unwrap();
                let mu = esc_count::abelian::count_character_solutions(&a.matrix, r, &b).unwrap();
                assert_eq!(nu, mu, "{g} r={r} {:?}", a.matrix);
                pairs += 1;
            }
        }
    }
    assert!(pairs > 0);
}
