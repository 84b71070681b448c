//! Number-theoretic helpers: totients, divisors, cycle types of `S_n`,
//! multiplicative orders and the order-vector ("delta vector") of a unit
//! modulo a prime power.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigUint;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{EscError, Result};
use crate::ExactCount;

/// `a * b mod m` without overflow.
#[inline]
pub fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    let mut acc = 1u64;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Inverse of `a` modulo `m`, if it exists.
pub fn inv_mod(a: u64, m: u64) -> Option<u64> {
    if m == 1 {
        return Some(0);
    }
    let e = (a as i128).extended_gcd(&(m as i128));
    if e.gcd != 1 {
        return None;
    }
    Some(e.x.rem_euclid(m as i128) as u64)
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n < 4 {
        return true;
    }
    if n.is_multiple_of(2) {
        return false;
    }
    let mut d = 3u64;
    while d <= n / d {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 2;
    }
    true
}

/// Prime factorisation by trial division, primes ascending.
pub fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut d = 2u64;
    while d <= n / d {
        if n.is_multiple_of(d) {
            let mut e = 0;
            while n.is_multiple_of(d) {
                n /= d;
                e += 1;
            }
            out.push((d, e));
        }
        d += if d == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

/// Euler's totient via the product formula over prime factors.
pub fn euler_phi(n: u64) -> u64 {
    assert!(n >= 1, "euler_phi is defined for n >= 1");
    factorize(n)
        .into_iter()
        .fold(n, |acc, (p, _)| acc / p * (p - 1))
}

/// All divisors of `n`, ascending.
pub fn divisors(n: u64) -> Vec<u64> {
    assert!(n >= 1, "divisors is defined for n >= 1");
    let mut small = Vec::new();
    let mut large = Vec::new();
    let mut d = 1u64;
    while d <= n / d {
        if n.is_multiple_of(d) {
            small.push(d);
            if d != n / d {
                large.push(n / d);
            }
        }
        d += 1;
    }
    small.extend(large.into_iter().rev());
    small
}

pub fn factorial(n: u64) -> BigUint {
    (2..=n).fold(BigUint::one(), |acc, k| acc * k)
}

/// Cycle type `1^λ1 2^λ2 … n^λn` of a permutation in `S_n`.
///
/// `multiplicities[t - 1]` is `λ_t`, the number of cycles of length `t`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct CycleType {
    multiplicities: Vec<u32>,
}

impl CycleType {
    pub fn new(multiplicities: Vec<u32>) -> Result<Self> {
        if multiplicities.is_empty() {
            return Err(EscError::Inadmissible("cycle type of S_0".into()));
        }
        let n = multiplicities.len() as u64;
        let total: u64 = multiplicities
            .iter()
            .enumerate()
            .map(|(i, &l)| (i as u64 + 1) * l as u64)
            .sum();
        if total != n {
            return Err(EscError::Inadmissible(format!(
                "cycle lengths sum to {total}, expected {n}"
            )));
        }
        Ok(CycleType { multiplicities })
    }

    /// Cycle type of the permutation `j -> perm[j]` of `{0, …, n-1}`.
    pub fn of_permutation(perm: &[usize]) -> Self {
        let n = perm.len();
        let mut seen = vec![false; n];
        let mut multiplicities = vec![0u32; n];
        for start in 0..n {
            if seen[start] {
                continue;
            }
            let mut len = 0;
            let mut j = start;
            while !seen[j] {
                seen[j] = true;
                j = perm[j];
                len += 1;
            }
            multiplicities[len - 1] += 1;
        }
        CycleType { multiplicities }
    }

    pub fn n(&self) -> usize {
        self.multiplicities.len()
    }

    pub fn multiplicities(&self) -> &[u32] {
        &self.multiplicities
    }

    /// `λ_t` for `t >= 1`; zero beyond `n`.
    pub fn lambda(&self, t: u64) -> u32 {
        if t == 0 {
            return 0;
        }
        usize::try_from(t - 1)
            .ok()
            .and_then(|i| self.multiplicities.get(i).copied())
            .unwrap_or(0)
    }

    /// Iterator of `(length, count)` over the cycle lengths that occur.
    pub fn cycles(&self) -> impl Iterator<Item = (u64, u32)> + '_ {
        self.multiplicities
            .iter()
            .enumerate()
            .filter(|(_, &l)| l > 0)
            .map(|(i, &l)| (i as u64 + 1, l))
    }

    /// Centraliser order `λ_1!…λ_n! · 1^λ1 … n^λn`.
    pub fn centralizer_order(&self) -> BigUint {
        self.cycles().fold(BigUint::one(), |acc, (t, l)| {
            acc * factorial(l as u64) * BigUint::from(t).pow(l)
        })
    }

    /// `1 / (λ_1!…λ_n! · 1^λ1 … n^λn)`, the share of `S_n` with this type.
    pub fn weight(&self) -> BigRational {
        BigRational::new(One::one(), self.centralizer_order().into())
    }
}

impl fmt::Display for CycleType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (t, l) in self.cycles() {
            if !first {
                f.write_str(" ")?;
            }
            first = false;
            write!(f, "{t}^{l}")?;
        }
        Ok(())
    }
}

/// Every cycle type of `S_n`, each exactly once.
///
/// Order: ascending lexicographic on `(λ_n, …, λ_2)` (which fixes `λ_1`), so
/// the identity type `1^n` comes first and the single `n`-cycle last.
pub fn cycle_types(n: usize) -> CycleTypes {
    assert!(n >= 1, "cycle_types is defined for n >= 1");
    let mut first = vec![0u32; n];
    first[0] = n as u32;
    CycleTypes { next: Some(first) }
}

pub struct CycleTypes {
    next: Option<Vec<u32>>,
}

impl Iterator for CycleTypes {
    type Item = CycleType;

    fn next(&mut self) -> Option<CycleType> {
        let current = self.next.take()?;
        let n = current.len();
        // Smallest position t >= 2 that can absorb one more cycle using the
        // mass held by positions below it.
        let mut freed = current[0] as usize;
        let mut successor = None;
        for t in 2..=n {
            if freed >= t {
                let mut s = current.clone();
                s[t - 1] += 1;
                for x in s.iter_mut().take(t - 1) {
                    *x = 0;
                }
                s[0] = (freed - t) as u32;
                successor = Some(s);
                break;
            }
            freed += t * current[t - 1] as usize;
        }
        self.next = successor;
        Some(CycleType {
            multiplicities: current,
        })
    }
}

/// Number of permutations in `S_n` with the given cycle type.
pub fn perm_count(t: &CycleType) -> ExactCount {
    factorial(t.n() as u64) / t.centralizer_order()
}

/// Least `r >= 1` with `i^r ≡ 1 (mod modulus)`.
pub fn multiplicative_order(i: i64, modulus: u64) -> Result<u64> {
    if modulus == 0 {
        return Err(EscError::OutOfRange("modulus must be positive".into()));
    }
    let residue = (i as i128).rem_euclid(modulus as i128) as u64;
    if modulus == 1 {
        return Ok(1);
    }
    if residue.gcd(&modulus) != 1 {
        return Err(EscError::NotCoprime { value: i, modulus });
    }
    let phi = euler_phi(modulus);
    let order = divisors(phi)
        .into_iter()
        .find(|&d| pow_mod(residue, d, modulus) == 1)
        .expect("Euler's theorem bounds the order by phi(modulus)");
    Ok(order)
}

fn prime_power(p: u64, e: u32) -> Result<u64> {
    p.checked_pow(e)
        .ok_or_else(|| EscError::OutOfRange(format!("{p}^{e} overflows u64")))
}

/// Smallest `α >= 2` generating `Z*_{p^s}` for every `1 <= s <= e`.
pub fn primitive_root(p: u64, e: u32) -> Result<u64> {
    if p == 2 || !is_prime(p) {
        return Err(EscError::NotOddPrime(p));
    }
    if e == 0 {
        return Err(EscError::OutOfRange("exponent must be positive".into()));
    }
    let top = prime_power(p, e)?;
    let moduli: Vec<u64> = (1..=e).map(|s| p.pow(s)).collect();
    (2..top)
        .filter(|a| a % p != 0)
        .find(|&a| {
            moduli.iter().all(|&q| {
                multiplicative_order(a as i64, q).expect("a is a unit") == euler_phi(q)
            })
        })
        .ok_or_else(|| EscError::OutOfRange(format!("no common primitive root below {top}")))
}

/// Writes an odd `i` as `ε · 5^ν (mod 2^e)` with `ε = ±1`, `0 <= ν < 2^(e-2)`.
pub fn two_power_unit_decomposition(e: u32, i: i64) -> Result<(i8, u64)> {
    if !(3..=63).contains(&e) {
        return Err(EscError::OutOfRange(format!(
            "exponent must lie in 3..=63, got {e}"
        )));
    }
    if i % 2 == 0 {
        return Err(EscError::EvenUnit(i));
    }
    let modulus = 1u64 << e;
    let x = (i as i128).rem_euclid(modulus as i128) as u64;
    let sign: i8 = if x % 4 == 1 { 1 } else { -1 };
    let target = if sign == 1 { x } else { modulus - x };

    // 5^(2^b) ≡ 1 + 2^(b+2) (mod 2^(b+3)): recover ν one bit at a time.
    let inv5 = pow_mod(5, (1u64 << (e - 2)) - 1, modulus);
    let mut nu = 0u64;
    let mut residual = target;
    let mut inv5_pow = inv5;
    for b in 0..e - 2 {
        let window = 1u64 << (b + 3);
        if residual % window != 1 {
            nu |= 1 << b;
            residual = mul_mod(residual, inv5_pow, modulus);
        }
        inv5_pow = mul_mod(inv5_pow, inv5_pow, modulus);
    }
    debug_assert_eq!(residual, 1);
    Ok((sign, nu))
}

/// Index pair `(k, d)` naming one of the admissible order-vector patterns.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct DeltaShape {
    pub k: u32,
    pub d: u64,
}

impl fmt::Display for DeltaShape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.k, self.d)
    }
}

/// Orders of a unit `i` in `Z*_{p^s}` for `s = 1..=e`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DeltaVector {
    pub entries: Vec<u64>,
    pub shape: Option<DeltaShape>,
}

fn uses_two_adic_patterns(p: u64, e: u32) -> bool {
    p == 2 && e >= 3
}

/// The order vector of pattern `(k, d)` for units modulo `p^e`.
///
/// Odd `p` (or `e <= 2`): `(d, …, d, pd, p²d, …, p^(e-k) d)` with `k` leading
/// `d`s, `d | p - 1`, `1 <= k <= e`.
/// `p = 2, e >= 3`: `(1, d, …, d, 2, 4, …, 2^(e-k))` with `d` in positions
/// `2..=k`, `d ∈ {1, 2}`, `2 <= k <= e`.
pub fn delta_pattern(p: u64, e: u32, shape: DeltaShape) -> Result<Vec<u64>> {
    let DeltaShape { k, d } = shape;
    let bad = || EscError::Inadmissible(format!("shape {shape} for p = {p}, e = {e}"));
    if uses_two_adic_patterns(p, e) {
        if !(2..=e).contains(&k) || !(d == 1 || d == 2) {
            return Err(bad());
        }
        let mut v = vec![1u64];
        v.extend(std::iter::repeat_n(d, k as usize - 1));
        v.extend((1..=e - k).map(|j| 1u64 << j));
        Ok(v)
    } else {
        if !(1..=e).contains(&k) || d == 0 || !(p - 1).is_multiple_of(d) {
            return Err(bad());
        }
        let mut v = vec![d; k as usize];
        let mut x = d;
        for _ in k..e {
            x = x.checked_mul(p).ok_or_else(bad)?;
            v.push(x);
        }
        Ok(v)
    }
}

/// Canonical admissible shapes for `p^e`.
///
/// For `p = 2, e >= 3` the patterns `(e-1, 2)` and `(e, 2)` coincide; only
/// `(e, 2)` is listed.
pub fn admissible_shapes(p: u64, e: u32) -> Vec<DeltaShape> {
    if uses_two_adic_patterns(p, e) {
        let mut out = Vec::new();
        for d in [1u64, 2] {
            for k in 2..=e {
                if d == 2 && k == e - 1 {
                    continue;
                }
                out.push(DeltaShape { k, d });
            }
        }
        out
    } else {
        let mut out = Vec::new();
        for d in divisors(p - 1) {
            for k in 1..=e {
                out.push(DeltaShape { k, d });
            }
        }
        out
    }
}

fn classify(p: u64, e: u32, entries: &[u64]) -> Option<DeltaShape> {
    let shape = if uses_two_adic_patterns(p, e) {
        let d = entries[1];
        let run_end = 1 + entries[1..].iter().take_while(|&&x| x == d).count();
        let k = match d {
            1 => run_end as u32,
            2 if run_end == e as usize => e,
            2 => run_end as u32 - 1,
            _ => return None,
        };
        DeltaShape { k, d }
    } else {
        let d = entries[0];
        let k = entries.iter().take_while(|&&x| x == d).count() as u32;
        DeltaShape { k, d }
    };
    match delta_pattern(p, e, shape) {
        Ok(pattern) if pattern == entries => Some(shape),
        _ => None,
    }
}

/// Order vector of the unit `i` modulo `p, p², …, p^e`, with its pattern.
pub fn delta_vector(i: i64, p: u64, e: u32) -> Result<DeltaVector> {
    if !is_prime(p) {
        return Err(EscError::NotPrime(p));
    }
    if e == 0 {
        return Err(EscError::OutOfRange("exponent must be positive".into()));
    }
    if (i as i128).rem_euclid(p as i128) == 0 {
        return Err(EscError::NotCoprime { value: i, modulus: p });
    }
    prime_power(p, e)?;
    let entries = (1..=e)
        .map(|s| multiplicative_order(i, p.pow(s)))
        .collect::<Result<Vec<_>>>()?;
    let shape = classify(p, e, &entries);
    Ok(DeltaVector { entries, shape })
}

/// Number of units modulo `p^e` carrying each order-vector pattern, found by
/// scanning every unit.
pub fn delta_census(p: u64, e: u32) -> Result<BTreeMap<DeltaShape, ExactCount>> {
    if !is_prime(p) {
        return Err(EscError::NotPrime(p));
    }
    let modulus = prime_power(p, e)?;
    let mut census: BTreeMap<DeltaShape, ExactCount> = BTreeMap::new();
    for i in 1..modulus {
        if i % p == 0 {
            continue;
        }
        let dv = delta_vector(i as i64, p, e)?;
        let shape = dv.shape.ok_or_else(|| {
            EscError::Inadmissible(format!("unit {i} mod {p}^{e} matches no pattern"))
        })?;
        *census.entry(shape).or_insert_with(Zero::zero) += 1u32;
    }
    Ok(census)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn phi_brute(n: u64) -> u64 {
        (1..=n).filter(|x| x.gcd(&n) == 1).count() as u64
    }

    #[test]
    fn totient_examples() {
        assert_eq!(euler_phi(1), 1);
        assert_eq!(euler_phi(9), 6);
        assert_eq!(euler_phi(12), phi_brute(12));
        assert_eq!(euler_phi(12), 4);
        for n in 1..300 {
            assert_eq!(euler_phi(n), phi_brute(n), "n = {n}");
        }
    }

    #[test]
    fn divisor_examples() {
        assert_eq!(divisors(1), vec![1]);
        assert_eq!(divisors(6), vec![1, 2, 3, 6]);
        assert_eq!(divisors(8), vec![1, 2, 4, 8]);
        for n in 1..200u64 {
            let brute: Vec<u64> = (1..=n).filter(|d| n % d == 0).collect();
            assert_eq!(divisors(n), brute);
        }
    }

    #[test]
    fn factorize_small() {
        assert_eq!(factorize(1), vec![]);
        assert_eq!(factorize(12), vec![(2, 2), (3, 1)]);
        assert_eq!(factorize(97), vec![(97, 1)]);
        assert_eq!(factorize(2 * 2 * 2 * 5 * 5 * 7), vec![(2, 3), (5, 2), (7, 1)]);
    }

    #[test]
    fn cycle_type_listing() {
        let mt = |n| -> Vec<Vec<u32>> {
            cycle_types(n)
                .map(|t| t.multiplicities().to_vec())
                .collect()
        };
        assert_eq!(mt(1), vec![vec![1]]);
        assert_eq!(mt(2), vec![vec![2, 0], vec![0, 1]]);
        assert_eq!(mt(3), vec![vec![3, 0, 0], vec![1, 1, 0], vec![0, 0, 1]]);
        assert_eq!(
            mt(4),
            vec![
                vec![4, 0, 0, 0],
                vec![2, 1, 0, 0],
                vec![0, 2, 0, 0],
                vec![1, 0, 1, 0],
                vec![0, 0, 0, 1]
            ]
        );
    }

    #[test]
    fn partition_counts() {
        // p(n) for n = 1..=12
        let expected = [1, 2, 3, 5, 7, 11, 15, 22, 30, 42, 56, 77];
        for (n, &p) in (1..=12).zip(expected.iter()) {
            assert_eq!(cycle_types(n).count(), p);
        }
    }

    #[test]
    fn perm_count_examples() {
        assert_eq!(perm_count(&CycleType::new(vec![1]).unwrap()), 1u32.into());
        assert_eq!(perm_count(&CycleType::new(vec![0, 1]).unwrap()), 1u32.into());
        assert_eq!(perm_count(&CycleType::new(vec![1, 1, 0]).unwrap()), 3u32.into());
    }

    #[test]
    fn invalid_cycle_type() {
        assert!(CycleType::new(vec![1, 1]).is_err());
        assert!(CycleType::new(vec![]).is_err());
    }

    #[test]
    fn order_examples() {
        assert_eq!(multiplicative_order(1, 7).unwrap(), 1);
        assert_eq!(multiplicative_order(5, 8).unwrap(), 2);
        assert_eq!(multiplicative_order(2, 9).unwrap(), 6);
        assert_eq!(multiplicative_order(-1, 9).unwrap(), 2);
        assert!(matches!(
            multiplicative_order(6, 9),
            Err(EscError::NotCoprime { .. })
        ));
    }

    #[test]
    fn order_matches_brute_force() {
        for m in 2..120u64 {
            for i in 1..m {
                if i.gcd(&m) != 1 {
                    continue;
                }
                let brute = (1..).find(|&r| pow_mod(i, r, m) == 1).unwrap();
                assert_eq!(multiplicative_order(i as i64, m).unwrap(), brute);
            }
        }
    }

    #[test]
    fn primitive_root_examples() {
        assert_eq!(primitive_root(3, 2).unwrap(), 2);
        assert_eq!(primitive_root(5, 1).unwrap(), 2);
        let a = primitive_root(7, 2).unwrap();
        assert_eq!(multiplicative_order(a as i64, 7).unwrap(), 6);
        assert_eq!(multiplicative_order(a as i64, 49).unwrap(), 42);
        assert_eq!(primitive_root(2, 3), Err(EscError::NotOddPrime(2)));
        assert_eq!(primitive_root(9, 1), Err(EscError::NotOddPrime(9)));
    }

    #[test]
    fn two_adic_decomposition_examples() {
        assert_eq!(two_power_unit_decomposition(3, 1).unwrap(), (1, 0));
        assert_eq!(two_power_unit_decomposition(3, 5).unwrap(), (1, 1));
        // 7 ≡ -1 = -5^0 (mod 8), found by exhaustive search over (ε, ν).
        assert_eq!(two_power_unit_decomposition(3, 7).unwrap(), (-1, 0));
        assert_eq!(two_power_unit_decomposition(3, 4), Err(EscError::EvenUnit(4)));
    }

    #[test]
    fn two_adic_decomposition_exhaustive() {
        for e in 3..=10u32 {
            let m = 1u64 << e;
            for i in (1..m).step_by(2) {
                let brute = [1i8, -1]
                    .iter()
                    .flat_map(|&s| (0..m / 4).map(move |nu| (s, nu)))
                    .find(|&(s, nu)| {
                        let v = pow_mod(5, nu, m);
                        let v = if s == 1 { v } else { (m - v) % m };
                        v == i
                    })
                    .unwrap();
                assert_eq!(two_power_unit_decomposition(e, i as i64).unwrap(), brute);
            }
        }
    }

    #[test]
    fn delta_vector_examples() {
        let dv = delta_vector(1, 5, 3).unwrap();
        assert_eq!(dv.entries, vec![1, 1, 1]);
        assert_eq!(dv.shape, Some(DeltaShape { k: 3, d: 1 }));

        let dv = delta_vector(2, 3, 2).unwrap();
        assert_eq!(dv.entries, vec![2, 6]);
        assert_eq!(dv.shape, Some(DeltaShape { k: 1, d: 2 }));

        let dv = delta_vector(7, 2, 3).unwrap();
        assert_eq!(dv.entries, vec![1, 2, 2]);
        assert_eq!(dv.shape.map(|s| s.d), Some(2));

        assert!(delta_vector(6, 3, 2).is_err());
    }

    #[test]
    fn census_example() {
        let census = delta_census(3, 1).unwrap();
        let expected: BTreeMap<_, ExactCount> = [
            (DeltaShape { k: 1, d: 1 }, 1u32.into()),
            (DeltaShape { k: 1, d: 2 }, 1u32.into()),
        ]
        .into_iter()
        .collect();
        assert_eq!(census, expected);
    }

    #[test]
    fn delta_inverse_symmetry() {
        for &(p, e) in &[(2u64, 10u32), (3, 6), (5, 4), (7, 3), (31, 2)] {
            let m = p.pow(e);
            for i in 1..m {
                if i % p == 0 {
                    continue;
                }
                let inv = inv_mod(i, m).unwrap();
                assert_eq!(
                    delta_vector(i as i64, p, e).unwrap().entries,
                    delta_vector(inv as i64, p, e).unwrap().entries
                );
            }
        }
    }
}
