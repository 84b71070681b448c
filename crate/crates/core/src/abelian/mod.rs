//! Finite abelian groups as products of prime-power cyclic factors, with
//! elements and characters stored as exponent vectors over the factor moduli.

mod automorphisms;
mod endo;

use std::fmt;
use std::str::FromStr;

use num_integer::Integer;
use serde::{Deserialize, Serialize};

use crate::error::{EscError, Result};
use crate::numtheory::factorize;

pub use automorphisms::{enumerate_automorphisms, Automorphism, AutomorphismGroup};
pub use endo::{
    apply_endo, count_character_solutions, count_character_solutions_with_inverse,
    count_element_solutions,
    count_element_solutions_by_rank, endo_power, invert_automorphism, pullback_character,
    rank_mod_p, EndoMatrix,
};

/// One cyclic factor `C_{p^e}` of the canonical decomposition.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct PrimePowerFactor {
    pub p: u64,
    pub e: u32,
}

impl PrimePowerFactor {
    pub fn modulus(&self) -> u64 {
        self.p.pow(self.e)
    }
}

/// `C_{m_1} × … × C_{m_s}` with every `m_i = p_i^{e_i}`, factors sorted by
/// `(p, e)`. The trivial group has no factors.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct AbelianGroup {
    factors: Vec<PrimePowerFactor>,
    moduli: Vec<u64>,
    order: u64,
}

/// Exponent vector `(k_1, …, k_s)` naming `k_1 h_1 + … + k_s h_s`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct GroupElement(pub Vec<u64>);

/// Exponent vector `(l_1, …, l_s)` naming the character with
/// `χ(h_i) = ω_i^{l_i}`, `ω_i` a fixed primitive `m_i`-th root of unity.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Character(pub Vec<u64>);

impl AbelianGroup {
    pub fn new(mut factors: Vec<PrimePowerFactor>) -> Result<Self> {
        for f in &factors {
            if !crate::numtheory::is_prime(f.p) || f.e == 0 {
                return Err(EscError::Inadmissible(format!(
                    "C_{{{}^{}}} is not a nontrivial prime-power cycle",
                    f.p, f.e
                )));
            }
        }
        factors.sort();
        let moduli = factors
            .iter()
            .map(|f| {
                f.p.checked_pow(f.e)
                    .ok_or_else(|| EscError::OutOfRange(format!("{}^{} overflows", f.p, f.e)))
            })
            .collect::<Result<Vec<_>>>()?;
        let order = moduli
            .iter()
            .try_fold(1u64, |acc, &m| acc.checked_mul(m))
            .ok_or_else(|| EscError::OutOfRange("group order overflows u64".into()))?;
        Ok(AbelianGroup {
            factors,
            moduli,
            order,
        })
    }

    pub fn trivial() -> Self {
        AbelianGroup {
            factors: Vec::new(),
            moduli: Vec::new(),
            order: 1,
        }
    }

    /// `C_m`, split into its primary parts.
    pub fn cyclic(m: u64) -> Result<Self> {
        Self::from_moduli(&[m])
    }

    /// `(C_p)^s`.
    pub fn elementary(p: u64, s: usize) -> Result<Self> {
        Self::from_moduli(&vec![p; s])
    }

    /// Direct product of cyclic groups of the given (arbitrary) orders.
    pub fn from_moduli(moduli: &[u64]) -> Result<Self> {
        let mut factors = Vec::new();
        for &m in moduli {
            if m == 0 {
                return Err(EscError::Inadmissible("cyclic factor of order 0".into()));
            }
            factors.extend(factorize(m).into_iter().map(|(p, e)| PrimePowerFactor { p, e }));
        }
        Self::new(factors)
    }

    pub fn parse(spec: &str) -> Result<Self> {
        parse_group(spec)
    }

    pub fn factors(&self) -> &[PrimePowerFactor] {
        &self.factors
    }

    /// Factor orders `m_1, …, m_s`.
    pub fn moduli(&self) -> &[u64] {
        &self.moduli
    }

    pub fn order(&self) -> u64 {
        self.order
    }

    /// Number of cyclic factors `s`.
    pub fn rank(&self) -> usize {
        self.factors.len()
    }

    pub fn is_trivial(&self) -> bool {
        self.factors.is_empty()
    }

    /// True when no prime repeats, i.e. `G` is cyclic.
    pub fn is_cyclic(&self) -> bool {
        self.factors.windows(2).all(|w| w[0].p != w[1].p)
    }

    /// `Some((p, e))` when `G ≅ C_{p^e}`.
    pub fn as_cyclic_prime_power(&self) -> Option<(u64, u32)> {
        match self.factors.as_slice() {
            [f] => Some((f.p, f.e)),
            _ => None,
        }
    }

    /// `Some((p, s))` when `G ≅ (C_p)^s`, `s >= 1`.
    pub fn as_elementary_abelian(&self) -> Option<(u64, usize)> {
        let first = self.factors.first()?;
        self.factors
            .iter()
            .all(|f| f.p == first.p && f.e == 1)
            .then_some((first.p, self.factors.len()))
    }

    /// Mixed-radix index of an element or character vector (first
    /// coordinate most significant).
    pub fn index_of(&self, exps: &[u64]) -> usize {
        exps.iter()
            .zip(&self.moduli)
            .fold(0usize, |acc, (&k, &m)| acc * m as usize + k as usize)
    }

    fn vector_at(&self, mut index: usize) -> Vec<u64> {
        let mut v = vec![0u64; self.rank()];
        for (slot, &m) in v.iter_mut().zip(&self.moduli).rev() {
            *slot = (index % m as usize) as u64;
            index /= m as usize;
        }
        v
    }

    pub fn element_at(&self, index: usize) -> GroupElement {
        GroupElement(self.vector_at(index))
    }

    pub fn character_at(&self, index: usize) -> Character {
        Character(self.vector_at(index))
    }

    pub fn identity(&self) -> GroupElement {
        GroupElement(vec![0; self.rank()])
    }

    /// `k_1 h_1 + … + k_s h_s` after reducing each `k_i` mod `m_i`.
    pub fn element(&self, exps: &[i64]) -> Result<GroupElement> {
        self.check_len(exps.len())?;
        Ok(GroupElement(
            exps.iter()
                .zip(&self.moduli)
                .map(|(&k, &m)| (k as i128).rem_euclid(m as i128) as u64)
                .collect(),
        ))
    }

    pub fn character(&self, exps: &[i64]) -> Result<Character> {
        self.element(exps).map(|g| Character(g.0))
    }

    pub fn add(&self, a: &GroupElement, b: &GroupElement) -> GroupElement {
        GroupElement(
            a.0.iter()
                .zip(&b.0)
                .zip(&self.moduli)
                .map(|((&x, &y), &m)| (x + y) % m)
                .collect(),
        )
    }

    /// Additive order of `g`.
    pub fn element_order(&self, g: &GroupElement) -> u64 {
        g.0.iter().zip(&self.moduli).fold(1u64, |acc, (&k, &m)| {
            acc.lcm(&(m / k.gcd(&m)))
        })
    }

    /// `χ(g)` as an exponent of a fixed primitive `|G|`-th root of unity `ω`,
    /// where `ω_i = ω^{|G|/m_i}`.
    pub fn character_value(&self, chi: &Character, g: &GroupElement) -> u64 {
        let m = self.order as u128;
        let total = chi
            .0
            .iter()
            .zip(&g.0)
            .zip(&self.moduli)
            .fold(0u128, |acc, ((&l, &k), &mi)| {
                (acc + (l as u128 * k as u128 % mi as u128) * (m / mi as u128)) % m
            });
        total as u64
    }

    pub(crate) fn check_len(&self, len: usize) -> Result<()> {
        if len == self.rank() {
            Ok(())
        } else {
            Err(EscError::DimensionMismatch {
                expected: self.rank(),
                found: len,
            })
        }
    }
}

impl fmt::Display for AbelianGroup {
    /// Canonical spec, e.g. `C4xC3`; the trivial group prints as `C1`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.moduli.is_empty() {
            return f.write_str("C1");
        }
        for (i, m) in self.moduli.iter().enumerate() {
            if i > 0 {
                f.write_str("x")?;
            }
            write!(f, "C{m}")?;
        }
        Ok(())
    }
}

impl FromStr for AbelianGroup {
    type Err = EscError;

    fn from_str(s: &str) -> Result<Self> {
        parse_group(s)
    }
}

/// All `|G|` elements, lexicographic.
pub fn elements(group: &AbelianGroup) -> impl Iterator<Item = GroupElement> + '_ {
    (0..group.order() as usize).map(move |i| group.element_at(i))
}

/// All `|Ĝ| = |G|` characters, lexicographic.
pub fn characters(group: &AbelianGroup) -> impl Iterator<Item = Character> + '_ {
    (0..group.order() as usize).map(move |i| group.character_at(i))
}

/// Parses `group := factor ("x" factor)*`, `factor := "C" uint ("^" uint)?`.
///
/// Composite orders are split into prime powers, so `C12` and `C4xC3` parse
/// to the same group. The leading `C` is case-insensitive.
pub fn parse_group(spec: &str) -> Result<AbelianGroup> {
    let bytes = spec.as_bytes();
    let mut pos = 0usize;
    let err = |position: usize, message: &str| EscError::Parse {
        position,
        message: message.to_string(),
    };
    let read_uint = |pos: &mut usize| -> Result<u64> {
        let start = *pos;
        while *pos < bytes.len() && bytes[*pos].is_ascii_digit() {
            *pos += 1;
        }
        if start == *pos {
            return Err(err(start, "expected an unsigned integer"));
        }
        spec[start..*pos]
            .parse::<u64>()
            .map_err(|_| err(start, "integer does not fit in 64 bits"))
    };

    if bytes.is_empty() {
        return Err(err(0, "empty group spec"));
    }
    let mut moduli = Vec::new();
    loop {
        match bytes.get(pos) {
            Some(b'C') | Some(b'c') => pos += 1,
            _ => return Err(err(pos, "expected 'C'")),
        }
        let modulus_pos = pos;
        let modulus = read_uint(&mut pos)?;
        if modulus == 0 {
            return Err(err(modulus_pos, "cyclic factor of order 0"));
        }
        let mut power = 1u64;
        if bytes.get(pos) == Some(&b'^') {
            pos += 1;
            let power_pos = pos;
            power = read_uint(&mut pos)?;
            if power == 0 {
                return Err(err(power_pos, "power must be positive"));
            }
            if power > 64 && modulus > 1 {
                return Err(err(power_pos, "power too large"));
            }
        }
        for _ in 0..power.min(64) {
            moduli.push(modulus);
        }
        match bytes.get(pos) {
            None => break,
            Some(b'x') => pos += 1,
            Some(_) => return Err(err(pos, "expected 'x' or end of input")),
        }
    }
    AbelianGroup::from_moduli(&moduli).map_err(|e| match e {
        EscError::OutOfRange(msg) => err(0, &msg),
        other => other,
    })
}
