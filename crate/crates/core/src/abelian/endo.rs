use std::fmt;

use num_integer::Integer;
use serde::{Deserialize, Serialize};

use super::{characters, elements, AbelianGroup, Character, GroupElement};
use crate::budget::Budget;
use crate::error::{EscError, Result};
use crate::numtheory::{inv_mod, is_prime, mul_mod};
use crate::ExactCount;

/// Integer matrix `A = (a_ij)` of an endomorphism of
/// `C_{m_1} × … × C_{m_s}`, acting by `(Ak)_i = Σ_j a_ij k_j mod m_i`.
///
/// Entries are kept reduced, `0 <= a_ij < m_i`, and satisfy
/// `a_ij ≡ 0 (mod m_i / gcd(m_i, m_j))`, which is exactly the condition for
/// the column `j` to be the image of a generator of order `m_j`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct EndoMatrix {
    moduli: Vec<u64>,
    entries: Vec<u64>,
}

/// Step between admissible values of `a_ij`.
#[inline]
pub(crate) fn entry_step(mi: u64, mj: u64) -> u64 {
    mi / mi.gcd(&mj)
}

impl EndoMatrix {
    /// Builds a matrix from rows, reducing row `i` mod `m_i`.
    pub fn new(group: &AbelianGroup, rows: &[Vec<i64>]) -> Result<Self> {
        let s = group.rank();
        group.check_len(rows.len())?;
        let moduli = group.moduli().to_vec();
        let mut entries = Vec::with_capacity(s * s);
        for (i, row) in rows.iter().enumerate() {
            group.check_len(row.len())?;
            for (j, &a) in row.iter().enumerate() {
                let reduced = (a as i128).rem_euclid(moduli[i] as i128) as u64;
                if !reduced.is_multiple_of(entry_step(moduli[i], moduli[j])) {
                    return Err(EscError::Inadmissible(format!(
                        "entry ({i}, {j}) = {a} is not a multiple of {}",
                        entry_step(moduli[i], moduli[j])
                    )));
                }
                entries.push(reduced);
            }
        }
        Ok(EndoMatrix { moduli, entries })
    }

    pub(crate) fn from_raw(moduli: Vec<u64>, entries: Vec<u64>) -> Self {
        debug_assert_eq!(entries.len(), moduli.len() * moduli.len());
        EndoMatrix { moduli, entries }
    }

    pub fn identity(group: &AbelianGroup) -> Self {
        Self::identity_on(group.moduli())
    }

    fn identity_on(moduli: &[u64]) -> Self {
        let s = moduli.len();
        let mut entries = vec![0u64; s * s];
        for (i, &m) in moduli.iter().enumerate() {
            entries[i * s + i] = 1 % m;
        }
        EndoMatrix {
            moduli: moduli.to_vec(),
            entries,
        }
    }

    pub fn dim(&self) -> usize {
        self.moduli.len()
    }

    pub fn moduli(&self) -> &[u64] {
        &self.moduli
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> u64 {
        self.entries[i * self.dim() + j]
    }

    pub fn rows(&self) -> Vec<Vec<u64>> {
        self.entries.chunks(self.dim().max(1)).map(<[u64]>::to_vec).take(self.dim()).collect()
    }

    pub fn is_identity(&self) -> bool {
        let s = self.dim();
        (0..s).all(|i| (0..s).all(|j| self.get(i, j) == if i == j { 1 % self.moduli[i] } else { 0 }))
    }

    fn check_dim(&self, len: usize) -> Result<()> {
        if len == self.dim() {
            Ok(())
        } else {
            Err(EscError::DimensionMismatch {
                expected: self.dim(),
                found: len,
            })
        }
    }

    /// Applies the endomorphism to raw exponents.
    pub(crate) fn apply_raw(&self, k: &[u64], out: &mut [u64]) {
        let s = self.dim();
        for i in 0..s {
            let m = self.moduli[i] as u128;
            let mut acc = 0u128;
            for j in 0..s {
                acc += self.entries[i * s + j] as u128 * k[j] as u128 % m;
            }
            out[i] = (acc % m) as u64;
        }
    }

    pub fn apply(&self, g: &GroupElement) -> Result<GroupElement> {
        self.check_dim(g.0.len())?;
        let mut out = vec![0u64; self.dim()];
        self.apply_raw(&g.0, &mut out);
        Ok(GroupElement(out))
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &EndoMatrix) -> Result<EndoMatrix> {
        self.check_dim(other.dim())?;
        if self.moduli != other.moduli {
            return Err(EscError::Inadmissible("matrices act on different groups".into()));
        }
        let s = self.dim();
        let mut entries = vec![0u64; s * s];
        for i in 0..s {
            let m = self.moduli[i] as u128;
            for j in 0..s {
                let mut acc = 0u128;
                for l in 0..s {
                    acc += self.get(i, l) as u128 * other.get(l, j) as u128 % m;
                }
                entries[i * s + j] = (acc % m) as u64;
            }
        }
        Ok(EndoMatrix {
            moduli: self.moduli.clone(),
            entries,
        })
    }

    /// `A^r` by repeated squaring; `A^0` is the identity.
    pub fn power(&self, mut r: u64) -> EndoMatrix {
        let mut acc = Self::identity_on(&self.moduli);
        let mut base = self.clone();
        while r > 0 {
            if r & 1 == 1 {
                acc = acc.compose(&base).expect("same group");
            }
            r >>= 1;
            if r > 0 {
                base = base.compose(&base).expect("same group");
            }
        }
        acc
    }

    /// The character `χ ∘ A`.
    ///
    /// With a common primitive `|G|`-th root `ω` and `ω_i = ω^{|G|/m_i}`,
    /// `(χ ∘ A)(h_j) = Π_i ω_i^{l_i a_ij}`; writing `a_ij = q (m_i/g)` with
    /// `g = gcd(m_i, m_j)` gives the exponent `Σ_i l_i q (m_j/g)` over `ω_j`.
    pub fn pull_back(&self, chi: &Character) -> Result<Character> {
        self.check_dim(chi.0.len())?;
        let mut out = vec![0u64; self.dim()];
        self.pull_back_raw(&chi.0, &mut out);
        Ok(Character(out))
    }

    pub(crate) fn pull_back_raw(&self, l: &[u64], out: &mut [u64]) {
        let s = self.dim();
        for j in 0..s {
            let mj = self.moduli[j];
            let mut acc = 0u128;
            for i in 0..s {
                let mi = self.moduli[i];
                let g = mi.gcd(&mj);
                let q = self.get(i, j) / (mi / g);
                acc += (l[i] as u128 * q as u128 % mj as u128) * (mj / g) as u128 % mj as u128;
            }
            out[j] = (acc % mj as u128) as u64;
        }
    }
}

impl fmt::Display for EndoMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("[")?;
        for (i, row) in self.rows().iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{row:?}")?;
        }
        f.write_str("]")
    }
}

pub fn apply_endo(a: &EndoMatrix, g: &GroupElement) -> Result<GroupElement> {
    a.apply(g)
}

/// `χ ∘ φ^{-1}`, given the matrix of `φ^{-1}`.
pub fn pullback_character(a_inv: &EndoMatrix, chi: &Character) -> Result<Character> {
    a_inv.pull_back(chi)
}

pub fn endo_power(a: &EndoMatrix, r: u64) -> EndoMatrix {
    a.power(r)
}

fn group_of(a: &EndoMatrix) -> AbelianGroup {
    AbelianGroup::from_moduli(a.moduli()).expect("moduli came from a valid group")
}

/// Inverse automorphism, read off the permutation `A` induces on elements.
///
/// Runs in `O(|G| s²)`.
pub fn invert_automorphism(a: &EndoMatrix) -> Result<EndoMatrix> {
    let group = group_of(a);
    let s = a.dim();
    let m = group.order() as usize;
    let mut preimage = vec![usize::MAX; m];
    let mut image = vec![0u64; s];
    for (idx, g) in elements(&group).enumerate() {
        a.apply_raw(&g.0, &mut image);
        let target = group.index_of(&image);
        if preimage[target] != usize::MAX {
            return Err(EscError::NotInvertible);
        }
        preimage[target] = idx;
    }
    // Column j of the inverse is the preimage of the generator h_j.
    let mut entries = vec![0u64; s * s];
    for j in 0..s {
        let mut unit = vec![0u64; s];
        unit[j] = 1;
        let col = group.element_at(preimage[group.index_of(&unit)]);
        for i in 0..s {
            entries[i * s + j] = col.0[i];
        }
    }
    Ok(EndoMatrix::from_raw(a.moduli.clone(), entries))
}

fn check_order(group: &AbelianGroup, budget: &Budget) -> Result<()> {
    Budget::check("group order", budget.max_group_order, Some(group.order())).map(|_| ())
}

/// `ν_{A,r}`: elements `X` with `(A^r - I) X = 0`, by exhaustive enumeration.
pub fn count_element_solutions(a: &EndoMatrix, r: u64, budget: &Budget) -> Result<ExactCount> {
    let group = group_of(a);
    check_order(&group, budget)?;
    let ar = a.power(r);
    let mut image = vec![0u64; a.dim()];
    let count = elements(&group)
        .filter(|g| {
            ar.apply_raw(&g.0, &mut image);
            image == g.0
        })
        .count();
    Ok(ExactCount::from(count))
}

/// `μ_{A,r}`: characters `χ` with `χ ∘ φ^{-r} = χ`, by exhaustive enumeration.
pub fn count_character_solutions(a: &EndoMatrix, r: u64, budget: &Budget) -> Result<ExactCount> {
    check_order(&group_of(a), budget)?;
    count_character_solutions_with_inverse(&invert_automorphism(a)?, r, budget)
}

/// [`count_character_solutions`] when the inverse `φ^{-1}` is already known.
pub fn count_character_solutions_with_inverse(
    a_inv: &EndoMatrix,
    r: u64,
    budget: &Budget,
) -> Result<ExactCount> {
    let group = group_of(a_inv);
    check_order(&group, budget)?;
    let inv_r = a_inv.power(r);
    let mut image = vec![0u64; a_inv.dim()];
    let count = characters(&group)
        .filter(|chi| {
            inv_r.pull_back_raw(&chi.0, &mut image);
            image == chi.0
        })
        .count();
    Ok(ExactCount::from(count))
}

/// `ν_{A,r} = p^(s - rank(A^r - I))`, valid on `(C_p)^s` only.
pub fn count_element_solutions_by_rank(a: &EndoMatrix, r: u64) -> Result<ExactCount> {
    let group = group_of(a);
    let (p, s) = group
        .as_elementary_abelian()
        .ok_or_else(|| EscError::Inadmissible("group is not elementary abelian".into()))?;
    let mut shifted = a.power(r).rows();
    for (i, row) in shifted.iter_mut().enumerate() {
        row[i] = (row[i] + p - 1) % p;
    }
    let rank = rank_mod_p(&shifted, p)?;
    Ok(ExactCount::from(p).pow((s - rank) as u32))
}

/// Rank over the field `Z_p` by Gaussian elimination.
pub fn rank_mod_p(matrix: &[Vec<u64>], p: u64) -> Result<usize> {
    if !is_prime(p) {
        return Err(EscError::NotPrime(p));
    }
    let mut rows: Vec<Vec<u64>> = matrix
        .iter()
        .map(|r| r.iter().map(|&x| x % p).collect())
        .collect();
    let cols = rows.first().map_or(0, Vec::len);
    let mut rank = 0;
    for col in 0..cols {
        let Some(pivot) = (rank..rows.len()).find(|&r| rows[r][col] != 0) else {
            continue;
        };
        rows.swap(rank, pivot);
        let inv = inv_mod(rows[rank][col], p).expect("nonzero mod prime");
        for x in rows[rank].iter_mut() {
            *x = mul_mod(*x, inv, p);
        }
        for r in 0..rows.len() {
            if r != rank && rows[r][col] != 0 {
                let factor = rows[r][col];
                for c in 0..cols {
                    let sub = mul_mod(factor, rows[rank][c], p);
                    rows[r][c] = (rows[r][c] + p - sub) % p;
                }
            }
        }
        rank += 1;
    }
    Ok(rank)
}
