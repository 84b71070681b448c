//! Explicit orbit-count formulas for cyclic groups, elementary abelian
//! groups, and a handful of closed special-case expressions.
//!
//! Every sum is carried out over the rationals and the final value is checked
//! to be an integer; nothing is rounded.

use std::collections::HashMap;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::abelian::{rank_mod_p, AbelianGroup};
use crate::budget::Budget;
use crate::burnside::orbit_count_congruence;
use crate::error::{EscError, Result};
use crate::numtheory::{cycle_types, divisors, euler_phi, factorize, is_prime, CycleType};
use crate::ExactCount;

/// Arguments of the exponent functions [`f_p`] and [`f_2`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FpExponentParams {
    pub p: u64,
    pub e: u32,
    pub k: u32,
    pub d: u64,
    pub lambda: CycleType,
}

fn rational(x: impl Into<BigInt>) -> BigRational {
    BigRational::from_integer(x.into())
}

fn big_pow(base: u64, exp: u64) -> BigUint {
    BigUint::from(base).pow(u32::try_from(exp).expect("exponent fits in u32"))
}

/// `p^{-k}` or `p^k` as a rational.
fn rational_pow(p: u64, k: i64) -> BigRational {
    let magnitude = rational(big_pow(p, k.unsigned_abs()));
    if k >= 0 {
        magnitude
    } else {
        magnitude.recip()
    }
}

fn into_count(value: BigRational, what: &'static str) -> Result<ExactCount> {
    if !value.is_integer() {
        return Err(EscError::NonIntegral(what));
    }
    value
        .to_integer()
        .to_biguint()
        .ok_or(EscError::NonIntegral(what))
}

fn check_prime(p: u64) -> Result<()> {
    if is_prime(p) {
        Ok(())
    } else {
        Err(EscError::NotPrime(p))
    }
}

fn check_n(n: usize) -> Result<()> {
    if n == 0 {
        Err(EscError::OutOfRange("n must be at least 1".into()))
    } else {
        Ok(())
    }
}

/// `Σ_{1 <= t <= n/step} λ_{t·step}`, optionally over `t` prime to `p` only.
fn strided_sum(lambda: &CycleType, step: u64, coprime_to: Option<u64>) -> u64 {
    let n = lambda.n() as u64;
    if step > n {
        return 0;
    }
    (1..=n / step)
        .filter(|t| coprime_to.is_none_or(|p| t % p != 0))
        .map(|t| lambda.lambda(t * step) as u64)
        .sum()
}

/// `Σ_{s=first}^{e-k-1} (k+s) Σ_{t <= n/(p^s d), (t,p)=1} λ_{t p^s d}
///   + e Σ_{t <= n/(p^{e-k} d)} λ_{t p^{e-k} d}`.
fn layered_sum(p: u64, e: u32, k: u32, d: u64, first: u32, lambda: &CycleType) -> u64 {
    let stride = |s: u32| p.saturating_pow(s).saturating_mul(d);
    let layers: u64 = (first..e - k)
        .map(|s| (k + s) as u64 * strided_sum(lambda, stride(s), Some(p)))
        .sum();
    layers + e as u64 * strided_sum(lambda, stride(e - k), None)
}

/// Exponent `f_p(λ, δ^{(k,d)})` with `|F| = p^{2 f_p}` for a unit of
/// `C_{p^e}` whose class is `(k, d)`; for odd `p`, or `p = 2` with `e <= 2`.
pub fn f_p(params: &FpExponentParams) -> Result<u64> {
    let FpExponentParams { p, e, k, d, .. } = *params;
    check_prime(p)?;
    if p == 2 && e >= 3 {
        return Err(EscError::Inadmissible(format!(
            "f_p covers p = 2 only for e <= 2, got e = {e}"
        )));
    }
    if e == 0 || k == 0 || k > e {
        return Err(EscError::Inadmissible(format!("k = {k} outside 1..={e}")));
    }
    if d == 0 || (p - 1) % d != 0 {
        return Err(EscError::Inadmissible(format!("d = {d} does not divide {}", p - 1)));
    }
    Ok(layered_sum(p, e, k, d, 0, &params.lambda))
}

/// Exponent `f_2(λ, δ^{(k,d)})` for `C_{2^e}`, `e >= 3`, `2 <= k <= e`,
/// `d ∈ {1, 2}`; `|F| = 4^{f_2}`.
pub fn f_2(params: &FpExponentParams) -> Result<u64> {
    let FpExponentParams { p, e, k, d, .. } = *params;
    if p != 2 || e < 3 {
        return Err(EscError::Inadmissible(format!(
            "f_2 needs p = 2 and e >= 3, got p = {p}, e = {e}"
        )));
    }
    if k < 2 || k > e {
        return Err(EscError::Inadmissible(format!("k = {k} outside 2..={e}")));
    }
    let lambda = &params.lambda;
    let odd = strided_sum(lambda, 1, Some(2));
    match d {
        1 => Ok(layered_sum(2, e, k, 1, 0, lambda)),
        2 if k < e => Ok(odd + layered_sum(2, e, k, 1, 1, lambda)),
        2 => Ok(odd + e as u64 * strided_sum(lambda, 2, None)),
        _ => Err(EscError::Inadmissible(format!("d = {d} not in {{1, 2}}"))),
    }
}

/// Which of the two equivalent printed arrangements of the cyclic
/// prime-power formula to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CyclicForm {
    /// One term per unit class `(k, d)`, weighted by the class size.
    UnitClasses,
    /// The identity (and, for `p = 2`, `-1`) split off, with the `d > n`
    /// classes folded into the leading constant.
    Regrouped,
}

struct Types {
    list: Vec<(CycleType, BigRational)>,
}

impl Types {
    fn new(n: usize) -> Self {
        Types {
            list: cycle_types(n).map(|t| {
                let w = t.weight();
                (t, w)
            })
            .collect(),
        }
    }

    /// `Σ_λ base^{exponent(λ)} / (λ_1!…λ_n! 1^{λ_1}…n^{λ_n})`.
    fn weighted(
        &self,
        base: u64,
        mut exponent: impl FnMut(&CycleType) -> Result<u64>,
    ) -> Result<BigRational> {
        let mut sum = BigRational::zero();
        for (t, w) in &self.list {
            sum += rational(big_pow(base, exponent(t)?)) * w;
        }
        Ok(sum)
    }
}

fn params(p: u64, e: u32, k: u32, d: u64, lambda: &CycleType) -> FpExponentParams {
    FpExponentParams {
        p,
        e,
        k,
        d,
        lambda: lambda.clone(),
    }
}

/// `N(C_{p^e}, n)`, evaluated in the requested arrangement.
pub fn n_cyclic_prime_power_form(p: u64, e: u32, n: usize, form: CyclicForm) -> Result<ExactCount> {
    check_prime(p)?;
    check_n(n)?;
    if e == 0 {
        return Err(EscError::Inadmissible("e must be positive".into()));
    }
    let types = Types::new(n);
    let value = if p == 2 && e >= 3 {
        match form {
            CyclicForm::UnitClasses => two_power_by_classes(e, &types)?,
            CyclicForm::Regrouped => two_power_regrouped(e, &types)?,
        }
    } else {
        match form {
            CyclicForm::UnitClasses => prime_power_by_classes(p, e, &types)?,
            CyclicForm::Regrouped => prime_power_regrouped(p, e, n, &types)?,
        }
    };
    into_count(value, "cyclic prime-power formula")
}

/// `N(C_{p^e}, n)` summed over unit classes.
pub fn n_cyclic_prime_power(p: u64, e: u32, n: usize) -> Result<ExactCount> {
    n_cyclic_prime_power_form(p, e, n, CyclicForm::UnitClasses)
}

fn prime_power_by_classes(p: u64, e: u32, types: &Types) -> Result<BigRational> {
    let aut_order = rational(big_pow(p, (e - 1) as u64) * (p - 1));
    let mut total = BigRational::zero();
    for k in 1..=e {
        let scale = if k == e {
            aut_order.recip()
        } else {
            rational_pow(p, -(k as i64))
        };
        for d in divisors(p - 1) {
            let inner = types.weighted(p, |t| Ok(2 * f_p(&params(p, e, k, d, t))?))?;
            total += scale.clone() * rational(euler_phi(d)) * inner;
        }
    }
    Ok(total)
}

fn prime_power_regrouped(p: u64, e: u32, n: usize, types: &Types) -> Result<BigRational> {
    let aut_order = rational(big_pow(p, (e - 1) as u64) * (p - 1));
    let ds: Vec<u64> = divisors(p - 1)
        .into_iter()
        .filter(|&d| d <= n as u64)
        .collect();
    let mut total = BigRational::one();
    for &d in &ds {
        let inner = types.weighted(p, |t| Ok(2 * e as u64 * strided_sum(t, d, None)))?;
        total += rational(euler_phi(d)) * (inner - BigRational::one()) / &aut_order;
    }
    for k in 1..e {
        for &d in &ds {
            let inner = types.weighted(p, |t| Ok(2 * f_p(&params(p, e, k, d, t))?))?;
            total += rational_pow(p, -(k as i64))
                * rational(euler_phi(d))
                * (inner - BigRational::one());
        }
    }
    Ok(total)
}

fn two_power_by_classes(e: u32, types: &Types) -> Result<BigRational> {
    let denom = rational(big_pow(2, (e - 1) as u64));
    let mut total = BigRational::zero();
    for d in 1..=2 {
        for k in 2..=e {
            let count = rational(euler_phi(1u64 << (e - k)));
            let inner = types.weighted(4, |t| f_2(&params(2, e, k, d, t)))?;
            total += count * inner / &denom;
        }
    }
    Ok(total)
}

fn two_power_regrouped(e: u32, types: &Types) -> Result<BigRational> {
    let denom = rational(big_pow(2, (e - 1) as u64));
    let identity = types.weighted(4, |t| Ok(e as u64 * strided_sum(t, 1, None)))?;
    let negation = types.weighted(4, |t| {
        Ok(strided_sum(t, 1, Some(2)) + e as u64 * strided_sum(t, 2, None))
    })?;
    let mut total = (identity + negation) / denom;
    for d in 1..=2 {
        for k in 2..e {
            let inner = types.weighted(4, |t| f_2(&params(2, e, k, d, t)))?;
            total += rational_pow(2, -(k as i64)) * inner;
        }
    }
    Ok(total)
}

/// Contribution of one primary part `C_{p^e}` of a cyclic group at cycle
/// type `λ`: the average of `|F|` over `Aut(C_{p^e})`.
fn primary_factor(p: u64, e: u32, t: &CycleType) -> Result<BigRational> {
    let mut sum = BigRational::zero();
    let denom;
    if p == 2 && e >= 3 {
        denom = rational(big_pow(2, (e - 1) as u64));
        for k in 2..=e {
            for d in 1..=2 {
                let count = euler_phi(1u64 << (e - k));
                sum += rational(count) * rational(big_pow(4, f_2(&params(2, e, k, d, t))?));
            }
        }
    } else {
        denom = rational(big_pow(p, (e - 1) as u64) * (p - 1));
        for k in 1..=e {
            for d in divisors(p - 1) {
                let count = euler_phi(p.pow(e - k) * d);
                let f = f_p(&params(p, e, k, d, t))?;
                sum += rational(count) * rational(big_pow(p, 2 * f));
            }
        }
    }
    Ok(sum / denom)
}

/// `N(C_m, n)` as a sum over cycle types of products over the primary parts.
pub fn n_cyclic(m: u64, n: usize) -> Result<ExactCount> {
    check_n(n)?;
    if m == 0 {
        return Err(EscError::OutOfRange("m must be positive".into()));
    }
    let parts = factorize(m);
    let types = Types::new(n);
    let mut total = BigRational::zero();
    for (t, w) in &types.list {
        let mut product = w.clone();
        for &(p, e) in &parts {
            product *= primary_factor(p, e, t)?;
        }
        total += product;
    }
    into_count(total, "cyclic product formula")
}

/// `|GL(s, Z_p)| = p^{s(s-1)/2} Π_{i=1}^{s} (p^i - 1)`.
pub fn general_linear_order(p: u64, s: u32) -> BigUint {
    (1..=s).fold(big_pow(p, (s * (s - 1) / 2) as u64), |acc, i| {
        acc * (big_pow(p, i as u64) - 1u32)
    })
}

fn mat_mul_mod(a: &[Vec<u64>], b: &[Vec<u64>], p: u64) -> Vec<Vec<u64>> {
    let s = a.len();
    (0..s)
        .map(|i| {
            (0..s)
                .map(|j| (0..s).map(|l| a[i][l] * b[l][j] % p).sum::<u64>() % p)
                .collect()
        })
        .collect()
}

/// `N((C_p)^s, n)` by summing `Π_i p^{2(s - rank(A^i - I)) λ_i}` over all of
/// `GL(s, Z_p)`, found by scanning every `s × s` matrix over `Z_p`.
pub fn n_elementary_abelian(p: u64, s: u32, n: usize, budget: &Budget) -> Result<ExactCount> {
    check_prime(p)?;
    check_n(n)?;
    if s == 0 {
        return Err(EscError::Inadmissible("s must be positive".into()));
    }
    let size = s as usize;
    let candidates = Budget::check(
        "matrices over Z_p",
        budget.max_endomorphisms,
        p.checked_pow(s * s),
    )?;
    let decode = |mut code: u64| -> Vec<Vec<u64>> {
        let mut a = vec![vec![0u64; size]; size];
        for x in (0..size * size).rev() {
            a[x / size][x % size] = code % p;
            code /= p;
        }
        a
    };
    // rank(A^i - I) for i = 1..=n, for each invertible A.
    let profiles: Vec<Vec<usize>> = (0..candidates)
        .into_par_iter()
        .filter_map(|code| {
            let a = decode(code);
            if rank_mod_p(&a, p).ok()? != size {
                return None;
            }
            let mut power = a.clone();
            let mut ranks = Vec::with_capacity(n);
            for i in 1..=n {
                if i > 1 {
                    power = mat_mul_mod(&power, &a, p);
                }
                let mut shifted = power.clone();
                for (r, row) in shifted.iter_mut().enumerate() {
                    row[r] = (row[r] + p - 1) % p;
                }
                ranks.push(rank_mod_p(&shifted, p).ok()?);
            }
            Some(ranks)
        })
        .collect();
    let gl = general_linear_order(p, s);
    if BigUint::from(profiles.len()) != gl {
        return Err(EscError::Consistency(format!(
            "found {} invertible matrices over Z_{p}, expected |GL({s}, {p})| = {gl}",
            profiles.len()
        )));
    }
    let mut multiplicity: HashMap<Vec<usize>, u64> = HashMap::new();
    for r in profiles {
        *multiplicity.entry(r).or_default() += 1;
    }
    let types = Types::new(n);
    let mut total = BigRational::zero();
    for (ranks, count) in &multiplicity {
        let inner = types.weighted(p, |t| {
            Ok(t.cycles()
                .map(|(i, l)| 2 * (size - ranks[i as usize - 1]) as u64 * l as u64)
                .sum())
        })?;
        total += rational(*count) * inner;
    }
    into_count(total / rational(gl), "elementary abelian formula")
}

/// `N(G, n)` for an arbitrary finite abelian `G`, from the solution counts
/// `ν_{φ,r}`, `μ_{φ,r}` of every automorphism.
pub fn n_general(group: &AbelianGroup, n: usize, budget: &Budget) -> Result<ExactCount> {
    orbit_count_congruence(group, n, budget)
}

/// Closed expressions for special families.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum SpecialCase {
    /// `N(C_{p^e}, 1)`.
    CyclicPrimePowerSingle { p: u64, e: u32 },
    /// `N(C_{p^e}, 2)`.
    CyclicPrimePowerPair { p: u64, e: u32 },
    /// `N(C_p, n)`.
    PrimeCyclic { p: u64, n: usize },
    /// `N(C_{p_1} × … × C_{p_s}, 1)` for distinct primes.
    SquarefreeSingle { primes: Vec<u64> },
}

/// Evaluate a [`SpecialCase`] expression directly.
pub fn special_case_value(case: &SpecialCase) -> Result<ExactCount> {
    match case {
        SpecialCase::CyclicPrimePowerSingle { p, e } => {
            let (p, e) = (*p, *e);
            check_prime(p)?;
            if e == 0 {
                return Err(EscError::Inadmissible("e must be positive".into()));
            }
            if p == 2 && e >= 3 {
                Ok(big_pow(2, e as u64 + 1) + big_pow(2, e as u64) - 2u32)
            } else {
                let geometric: BigUint = (0..e as u64).map(|i| big_pow(p, i)).sum();
                Ok(big_pow(p, e as u64) + geometric * 2u32)
            }
        }
        SpecialCase::CyclicPrimePowerPair { p, e } => {
            let (p, e) = (*p, *e as u64);
            check_prime(p)?;
            if e == 0 {
                return Err(EscError::Inadmissible("e must be positive".into()));
            }
            let half = BigRational::new(1.into(), 2.into());
            let value = match (p, e) {
                (2, 1) => rational(10),
                (2, 2) => rational(76),
                (2, _) => {
                    BigRational::new(15.into(), 14.into()) * rational(big_pow(2, 3 * e))
                        + rational(3u32) * rational(big_pow(2, e + 1))
                        - BigRational::new(116.into(), 7.into())
                }
                _ => {
                    let pp = |x: u64| rational(big_pow(p, x));
                    let p1 = rational(p);
                    BigRational::one()
                        + &half * (pp(3 * e) - pp(3)) / (pp(3) - BigRational::one())
                        + (&half * pp(3 * e + 1) + pp(e + 1) + pp(e) - &p1
                            - rational(3) * &half)
                            / (p1 - BigRational::one())
                }
            };
            into_count(value, "two-slot cyclic expression")
        }
        SpecialCase::PrimeCyclic { p, n } => {
            let (p, n) = (*p, *n);
            check_prime(p)?;
            check_n(n)?;
            let types = Types::new(n);
            let mut total = BigRational::zero();
            for d in divisors(p - 1).into_iter().filter(|&d| d <= n as u64) {
                let inner = types.weighted(p, |t| Ok(2 * strided_sum(t, d, None)))?;
                total += rational(euler_phi(d)) * (inner - BigRational::one());
            }
            into_count(
                BigRational::one() + total / rational(p - 1),
                "prime cyclic expression",
            )
        }
        SpecialCase::SquarefreeSingle { primes } => {
            let mut sorted = primes.clone();
            sorted.sort_unstable();
            for w in sorted.windows(2) {
                if w[0] == w[1] {
                    return Err(EscError::Inadmissible(format!("prime {} repeated", w[0])));
                }
            }
            let mut product = BigUint::one();
            for &p in &sorted {
                check_prime(p)?;
                product *= p + 2;
            }
            Ok(product)
        }
    }
}
