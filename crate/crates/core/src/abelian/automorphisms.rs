use num_integer::Integer;
use rayon::prelude::*;

use super::endo::{entry_step, EndoMatrix};
use super::AbelianGroup;
use crate::budget::Budget;
use crate::error::{EscError, Result};

/// Number of endomorphisms, `Π_{i,j} gcd(m_i, m_j)`, or `None` on overflow.
pub(crate) fn endomorphism_count(group: &AbelianGroup) -> Option<u64> {
    let m = group.moduli();
    m.iter()
        .flat_map(|&mi| m.iter().map(move |&mj| mi.gcd(&mj)))
        .try_fold(1u64, |acc, g| acc.checked_mul(g))
}

/// Every automorphism of `G`.
///
/// Scans all matrices obeying the divisibility constraint and keeps those
/// that permute the elements of `G`. The scan is bounded by
/// [`Budget::max_endomorphisms`] and [`Budget::max_group_order`].
pub fn enumerate_automorphisms(group: &AbelianGroup, budget: &Budget) -> Result<Vec<EndoMatrix>> {
    Ok(automorphisms_with_tables(group, budget)?
        .into_iter()
        .map(|(a, _)| a)
        .collect())
}

/// Automorphisms together with their element permutation tables.
fn automorphisms_with_tables(
    group: &AbelianGroup,
    budget: &Budget,
) -> Result<Vec<(EndoMatrix, Vec<u32>)>> {
    Budget::check("group order", budget.max_group_order, Some(group.order()))?;
    let candidates = Budget::check(
        "endomorphism candidates",
        budget.max_endomorphisms,
        endomorphism_count(group),
    )?;
    let s = group.rank();
    let moduli = group.moduli().to_vec();
    let m = group.order() as usize;
    // Entry (i, j) takes gcd(m_i, m_j) values, spaced by m_i / gcd.
    let radices: Vec<u64> = (0..s * s)
        .map(|x| moduli[x / s].gcd(&moduli[x % s]))
        .collect();
    let steps: Vec<u64> = (0..s * s)
        .map(|x| entry_step(moduli[x / s], moduli[x % s]))
        .collect();
    let elements: Vec<Vec<u64>> = (0..m).map(|i| group.element_at(i).0).collect();

    let decode = |mut code: u64| -> Vec<u64> {
        let mut entries = vec![0u64; s * s];
        for x in (0..s * s).rev() {
            entries[x] = (code % radices[x]) * steps[x];
            code /= radices[x];
        }
        entries
    };

    let found: Vec<(EndoMatrix, Vec<u32>)> = (0..candidates)
        .into_par_iter()
        .filter_map(|code| {
            let a = EndoMatrix::from_raw(moduli.clone(), decode(code));
            let mut seen = vec![false; m];
            let mut table = vec![0u32; m];
            let mut image = vec![0u64; s];
            for (idx, k) in elements.iter().enumerate() {
                a.apply_raw(k, &mut image);
                let target = group.index_of(&image);
                if seen[target] {
                    return None;
                }
                seen[target] = true;
                table[idx] = target as u32;
            }
            Some((a, table))
        })
        .collect();
    Ok(found)
}

/// An automorphism `φ` with its inverse and its permutations of the element
/// and character index sets.
#[derive(Debug, Clone)]
pub struct Automorphism {
    pub matrix: EndoMatrix,
    pub inverse: EndoMatrix,
    /// `element_map[g] = φ(g)` on element indices.
    pub element_map: Vec<u32>,
    /// `character_map[χ] = χ ∘ φ^{-1}` on character indices.
    pub character_map: Vec<u32>,
}

/// `Aut(G)` with per-automorphism lookup tables.
#[derive(Debug, Clone)]
pub struct AutomorphismGroup {
    group: AbelianGroup,
    members: Vec<Automorphism>,
}

impl Automorphism {
    /// Tables for a single matrix; fails unless it is bijective on `G`.
    pub fn from_matrix(group: &AbelianGroup, matrix: &EndoMatrix) -> Result<Self> {
        group.check_len(matrix.dim())?;
        if matrix.moduli() != group.moduli() {
            return Err(EscError::Inadmissible(
                "matrix moduli differ from the group's".into(),
            ));
        }
        let m = group.order() as usize;
        let mut seen = vec![false; m];
        let mut element_map = vec![0u32; m];
        let mut image = vec![0u64; group.rank()];
        for (idx, slot) in element_map.iter_mut().enumerate() {
            matrix.apply_raw(&group.element_at(idx).0, &mut image);
            let target = group.index_of(&image);
            if seen[target] {
                return Err(EscError::NotInvertible);
            }
            seen[target] = true;
            *slot = target as u32;
        }
        let characters: Vec<Vec<u64>> = (0..m).map(|i| group.character_at(i).0).collect();
        Ok(Self::with_tables(group, matrix.clone(), element_map, &characters))
    }

    fn with_tables(
        group: &AbelianGroup,
        matrix: EndoMatrix,
        element_map: Vec<u32>,
        characters: &[Vec<u64>],
    ) -> Self {
        let s = group.rank();
        let mut inverse_entries = vec![0u64; s * s];
        for j in 0..s {
            let mut unit = vec![0u64; s];
            unit[j] = 1;
            let target = group.index_of(&unit) as u32;
            let pre = element_map
                .iter()
                .position(|&t| t == target)
                .expect("bijection");
            let col = group.element_at(pre);
            for i in 0..s {
                inverse_entries[i * s + j] = col.0[i];
            }
        }
        let inverse = EndoMatrix::from_raw(group.moduli().to_vec(), inverse_entries);
        let mut out = vec![0u64; s];
        let character_map = characters
            .iter()
            .map(|l| {
                inverse.pull_back_raw(l, &mut out);
                group.index_of(&out) as u32
            })
            .collect();
        Automorphism {
            matrix,
            inverse,
            element_map,
            character_map,
        }
    }
}

impl AutomorphismGroup {
    pub fn new(group: &AbelianGroup, budget: &Budget) -> Result<Self> {
        let m = group.order() as usize;
        let characters: Vec<Vec<u64>> = (0..m).map(|i| group.character_at(i).0).collect();
        let members = automorphisms_with_tables(group, budget)?
            .into_par_iter()
            .map(|(matrix, element_map)| {
                Automorphism::with_tables(group, matrix, element_map, &characters)
            })
            .collect();
        Ok(AutomorphismGroup {
            group: group.clone(),
            members,
        })
    }

    pub fn group(&self) -> &AbelianGroup {
        &self.group
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn members(&self) -> &[Automorphism] {
        &self.members
    }

    pub fn get(&self, index: usize) -> Option<&Automorphism> {
        self.members.get(index)
    }

    /// Index of the automorphism with the given matrix.
    pub fn position(&self, matrix: &EndoMatrix) -> Option<usize> {
        self.members.iter().position(|a| &a.matrix == matrix)
    }
}
