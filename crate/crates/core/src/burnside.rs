//! Orbit counting for `Aut(G) × S_n` acting on `Ω(G, n) = G^n × Ĝ^n`.
//!
//! The pair `(φ, σ)` sends `(g_j, χ_j)_j` to the tuple whose entry at
//! position `σ(j)` is `(φ(g_j), χ_j ∘ φ^{-1})`. Three independent counts are
//! provided: an exhaustive fixed-point oracle, the cycle-type formula
//! `|F_(φ,σ)| = Π_r (ν_{φ,r} μ_{φ,r})^{λ_r}`, and explicit orbits.

use std::collections::{BTreeMap, HashMap, HashSet};

use num_bigint::BigUint;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::abelian::{
    count_character_solutions_with_inverse, count_element_solutions, AbelianGroup, Automorphism,
    AutomorphismGroup, Character, EndoMatrix, GroupElement,
};
use crate::budget::Budget;
use crate::error::{EscError, Result};
use crate::numtheory::{cycle_types, factorial, perm_count, CycleType};
use crate::ExactCount;

/// A point of `Ω(G, n)`: `n` group elements and `n` characters.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Esc {
    pub elements: Vec<GroupElement>,
    pub characters: Vec<Character>,
}

impl Esc {
    pub fn new(elements: Vec<GroupElement>, characters: Vec<Character>) -> Result<Self> {
        if elements.len() != characters.len() {
            return Err(EscError::DimensionMismatch {
                expected: elements.len(),
                found: characters.len(),
            });
        }
        Ok(Esc {
            elements,
            characters,
        })
    }

    pub fn n(&self) -> usize {
        self.elements.len()
    }

    /// Point with mixed-radix index `index` in `Ω(G, n)`; element coordinates
    /// come first and are most significant.
    pub fn at(group: &AbelianGroup, n: usize, index: u64) -> Self {
        let digits = decode(index, group.order(), 2 * n);
        Esc {
            elements: digits[..n]
                .iter()
                .map(|&d| group.element_at(d as usize))
                .collect(),
            characters: digits[n..]
                .iter()
                .map(|&d| group.character_at(d as usize))
                .collect(),
        }
    }

    /// Inverse of [`Esc::at`].
    pub fn index_in(&self, group: &AbelianGroup) -> u64 {
        let m = group.order();
        self.elements
            .iter()
            .map(|g| group.index_of(&g.0))
            .chain(self.characters.iter().map(|c| group.index_of(&c.0)))
            .fold(0u64, |acc, d| acc * m + d as u64)
    }
}

fn decode(mut index: u64, m: u64, len: usize) -> Vec<u32> {
    let mut digits = vec![0u32; len];
    for d in digits.iter_mut().rev() {
        *d = (index % m) as u32;
        index /= m;
    }
    digits
}

fn encode(digits: &[u32], m: u64) -> u64 {
    digits.iter().fold(0u64, |acc, &d| acc * m + d as u64)
}

/// Every permutation of `{0, …, n-1}` in lexicographic order.
pub fn all_permutations(n: usize) -> Vec<Vec<usize>> {
    let mut current: Vec<usize> = (0..n).collect();
    let mut out = vec![current.clone()];
    loop {
        let Some(i) = (1..n).rev().find(|&i| current[i - 1] < current[i]) else {
            return out;
        };
        let j = (i..n).rev().find(|&j| current[j] > current[i - 1]).unwrap();
        current.swap(i - 1, j);
        current[i..].reverse();
        out.push(current.clone());
    }
}

/// `(outer ∘ inner)(j) = outer[inner[j]]`.
pub fn compose_permutations(outer: &[usize], inner: &[usize]) -> Vec<usize> {
    inner.iter().map(|&j| outer[j]).collect()
}

fn check_permutation(sigma: &[usize], n: usize) -> Result<()> {
    if sigma.len() != n {
        return Err(EscError::DimensionMismatch {
            expected: n,
            found: sigma.len(),
        });
    }
    let mut seen = vec![false; n];
    for &j in sigma {
        if j >= n || std::mem::replace(&mut seen[j], true) {
            return Err(EscError::Inadmissible(format!(
                "{sigma:?} is not a permutation of 0..{n}"
            )));
        }
    }
    Ok(())
}

/// `(φ, σ) ∘ x`.
pub fn act(phi: &EndoMatrix, sigma: &[usize], x: &Esc) -> Result<Esc> {
    let inverse = crate::abelian::invert_automorphism(phi)?;
    act_with_inverse(phi, &inverse, sigma, x)
}

/// [`act`] with `φ^{-1}` supplied.
pub fn act_with_inverse(
    phi: &EndoMatrix,
    phi_inv: &EndoMatrix,
    sigma: &[usize],
    x: &Esc,
) -> Result<Esc> {
    let n = x.n();
    check_permutation(sigma, n)?;
    let mut elements = x.elements.clone();
    let mut characters = x.characters.clone();
    for j in 0..n {
        elements[sigma[j]] = phi.apply(&x.elements[j])?;
        characters[sigma[j]] = phi_inv.pull_back(&x.characters[j])?;
    }
    Ok(Esc {
        elements,
        characters,
    })
}

fn omega_size(group: &AbelianGroup, n: usize) -> Option<u64> {
    u32::try_from(2 * n)
        .ok()
        .and_then(|k| group.order().checked_pow(k))
}

/// Exhaustive count of `x ∈ Ω` with `(φ, σ) ∘ x = x`.
///
/// Coordinates are assigned one at a time and a partial tuple is abandoned as
/// soon as a condition `x_{σ(j)} = φ(x_j)` between two assigned coordinates
/// fails, so no fixed point is missed and no non-fixed point is counted.
fn fixed_points_exhaustive(aut: &Automorphism, sigma: &[usize], m: usize) -> u64 {
    let n = sigma.len();
    // Slots 0..n hold elements and n..2n characters; `forward[q]` is the slot
    // that must equal the image of slot `q`.
    let mut forward = vec![0usize; 2 * n];
    let mut backward = vec![0usize; 2 * n];
    for b in 0..2 {
        for j in 0..n {
            forward[b * n + j] = b * n + sigma[j];
            backward[b * n + sigma[j]] = b * n + j;
        }
    }
    let maps = [&aut.element_map[..], &aut.character_map[..]];

    struct Search<'a> {
        n: usize,
        m: u32,
        forward: &'a [usize],
        backward: &'a [usize],
        maps: [&'a [u32]; 2],
        slots: Vec<u32>,
    }

    impl Search<'_> {
        fn image(&self, q: usize) -> u32 {
            self.maps[q / self.n][self.slots[q] as usize]
        }

        fn run(&mut self, q: usize) -> u64 {
            if q == self.slots.len() {
                return 1;
            }
            let mut total = 0;
            for v in 0..self.m {
                self.slots[q] = v;
                let f = self.forward[q];
                if f <= q && self.slots[f] != self.image(q) {
                    continue;
                }
                let b = self.backward[q];
                if b < q && self.slots[q] != self.image(b) {
                    continue;
                }
                total += self.run(q + 1);
            }
            total
        }
    }

    Search {
        n,
        m: m as u32,
        forward: &forward,
        backward: &backward,
        maps,
        slots: vec![0; 2 * n],
    }
    .run(0)
}

/// `|F_(φ,σ)|` by exhaustive search over `Ω(G, n)`, `n = |σ|`.
pub fn fixed_points_naive(
    phi: &EndoMatrix,
    sigma: &[usize],
    group: &AbelianGroup,
    budget: &Budget,
) -> Result<ExactCount> {
    let n = sigma.len();
    check_permutation(sigma, n)?;
    Budget::check("group order", budget.max_group_order, Some(group.order()))?;
    Budget::check("|Ω(G, n)|", budget.max_omega, omega_size(group, n))?;
    let aut = Automorphism::from_matrix(group, phi)?;
    Ok(fixed_points_exhaustive(&aut, sigma, group.order() as usize).into())
}

/// `ν_{φ,r}` and `μ_{φ,r}` for `r = 1..=n`.
fn solution_profile(aut: &Automorphism, n: usize, budget: &Budget) -> Result<Vec<ExactCount>> {
    let mut profile = Vec::with_capacity(2 * n);
    for r in 1..=n as u64 {
        profile.push(count_element_solutions(&aut.matrix, r, budget)?);
        profile.push(count_character_solutions_with_inverse(&aut.inverse, r, budget)?);
    }
    Ok(profile)
}

fn product_over_cycles(profile: &[ExactCount], t: &CycleType) -> ExactCount {
    t.cycles().fold(BigUint::one(), |acc, (r, l)| {
        let i = 2 * (r as usize - 1);
        acc * (&profile[i] * &profile[i + 1]).pow(l)
    })
}

/// `|F_(φ,σ)|` for any `σ` of type `t`, as `Π_r (ν_{φ,r} μ_{φ,r})^{λ_r}`.
pub fn fixed_points_by_cycles(
    phi: &EndoMatrix,
    t: &CycleType,
    group: &AbelianGroup,
    budget: &Budget,
) -> Result<ExactCount> {
    Budget::check("group order", budget.max_group_order, Some(group.order()))?;
    let aut = Automorphism::from_matrix(group, phi)?;
    Ok(product_over_cycles(&solution_profile(&aut, t.n(), budget)?, t))
}

fn check_n(n: usize) -> Result<()> {
    if n == 0 {
        Err(EscError::OutOfRange("n must be at least 1".into()))
    } else {
        Ok(())
    }
}

fn exact_quotient(total: ExactCount, divisor: ExactCount, what: &'static str) -> Result<ExactCount> {
    let (q, r) = total.div_rem(&divisor);
    if r.is_zero() {
        Ok(q)
    } else {
        Err(EscError::NonIntegral(what))
    }
}

/// `N(G, n)` as the Burnside average of exhaustive fixed-point counts over
/// every `(φ, σ) ∈ Aut(G) × S_n`.
pub fn orbit_count_naive(group: &AbelianGroup, n: usize, budget: &Budget) -> Result<ExactCount> {
    check_n(n)?;
    Budget::check("|Ω(G, n)|", budget.max_omega, omega_size(group, n))?;
    Budget::check(
        "n!",
        budget.max_permutations,
        factorial(n as u64).to_u64(),
    )?;
    let aut = AutomorphismGroup::new(group, budget)?;
    let perms = all_permutations(n);
    let m = group.order() as usize;
    let total: u128 = aut
        .members()
        .par_iter()
        .map(|a| {
            perms
                .iter()
                .map(|sigma| fixed_points_exhaustive(a, sigma, m) as u128)
                .sum::<u128>()
        })
        .sum();
    exact_quotient(
        BigUint::from(total),
        BigUint::from(aut.len()) * factorial(n as u64),
        "naive Burnside average",
    )
}

/// `N(G, n) = (1/|Aut G|) Σ_φ Σ_λ Π_i (ν_{φ,i} μ_{φ,i})^{λ_i} / (λ_i! i^{λ_i})`,
/// summed exactly over the rationals.
pub fn orbit_count_congruence(
    group: &AbelianGroup,
    n: usize,
    budget: &Budget,
) -> Result<ExactCount> {
    check_n(n)?;
    let aut = AutomorphismGroup::new(group, budget)?;
    let profiles = aut
        .members()
        .par_iter()
        .map(|a| solution_profile(a, n, budget))
        .collect::<Result<Vec<_>>>()?;
    let mut multiplicity: HashMap<Vec<ExactCount>, u64> = HashMap::new();
    for p in profiles {
        *multiplicity.entry(p).or_default() += 1;
    }
    let types: Vec<CycleType> = cycle_types(n).collect();
    let mut sum = BigRational::zero();
    for (profile, count) in &multiplicity {
        for t in &types {
            let term = BigRational::from_integer(
                (product_over_cycles(profile, t) * BigUint::from(*count)).into(),
            );
            sum += term * t.weight();
        }
    }
    let average = sum / BigRational::from_integer(BigUint::from(aut.len()).into());
    if !average.is_integer() {
        return Err(EscError::NonIntegral("congruence average"));
    }
    average
        .to_integer()
        .to_biguint()
        .ok_or(EscError::NonIntegral("congruence average"))
}

/// Fixed-point counts for every automorphism and cycle type.
#[derive(Debug, Clone)]
pub struct FixedPointReport {
    pub group: AbelianGroup,
    pub n: usize,
    /// `|F_(φ,σ)|` keyed by automorphism index and the cycle type of `σ`.
    pub counts: BTreeMap<(usize, CycleType), ExactCount>,
    /// `Σ_(φ,σ) |F_(φ,σ)|`.
    pub total: ExactCount,
    pub orbit_count: ExactCount,
}

pub fn fixed_point_report(
    group: &AbelianGroup,
    n: usize,
    budget: &Budget,
) -> Result<FixedPointReport> {
    check_n(n)?;
    let aut = AutomorphismGroup::new(group, budget)?;
    let types: Vec<CycleType> = cycle_types(n).collect();
    let mut counts = BTreeMap::new();
    let mut total = BigUint::zero();
    for (idx, a) in aut.members().iter().enumerate() {
        let profile = solution_profile(a, n, budget)?;
        for t in &types {
            let f = product_over_cycles(&profile, t);
            total += &f * perm_count(t);
            counts.insert((idx, t.clone()), f);
        }
    }
    let orbit_count = exact_quotient(
        total.clone(),
        BigUint::from(aut.len()) * factorial(n as u64),
        "Burnside total",
    )?;
    Ok(FixedPointReport {
        group: group.clone(),
        n,
        counts,
        total,
        orbit_count,
    })
}

/// One orbit of `Ω(G, n)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Orbit {
    /// Lexicographically least member.
    pub representative: Esc,
    pub size: u64,
}

/// A small generating set of `Aut(G)`, chosen greedily.
fn automorphism_generators(aut: &AutomorphismGroup) -> Vec<&Automorphism> {
    let m = aut.group().order() as usize;
    let identity: Vec<u32> = (0..m as u32).collect();
    let mut span: HashSet<Vec<u32>> = HashSet::from([identity.clone()]);
    let mut gens: Vec<&Automorphism> = Vec::new();
    for a in aut.members() {
        if span.contains(&a.element_map) {
            continue;
        }
        gens.push(a);
        span = HashSet::from([identity.clone()]);
        let mut frontier = vec![identity.clone()];
        while let Some(h) = frontier.pop() {
            for g in &gens {
                let next: Vec<u32> = h.iter().map(|&x| g.element_map[x as usize]).collect();
                if span.insert(next.clone()) {
                    frontier.push(next);
                }
            }
        }
        if span.len() == aut.len() {
            break;
        }
    }
    gens
}

struct DisjointSets {
    parent: Vec<u32>,
    size: Vec<u32>,
}

impl DisjointSets {
    fn new(len: usize) -> Self {
        DisjointSets {
            parent: (0..len as u32).collect(),
            size: vec![1; len],
        }
    }

    fn find(&mut self, mut x: u32) -> u32 {
        while self.parent[x as usize] != x {
            let up = self.parent[self.parent[x as usize] as usize];
            self.parent[x as usize] = up;
            x = up;
        }
        x
    }

    fn union(&mut self, a: u32, b: u32) {
        let (mut a, mut b) = (self.find(a), self.find(b));
        if a == b {
            return;
        }
        if self.size[a as usize] < self.size[b as usize] {
            std::mem::swap(&mut a, &mut b);
        }
        self.parent[b as usize] = a;
        self.size[a as usize] += self.size[b as usize];
    }
}

/// Generators of `Aut(G) × S_n`: `(φ, id)` for generators `φ` of `Aut(G)`
/// and `(id, (0 1))`, `(id, (0 1 … n-1))`.
fn action_generators(
    aut: &AutomorphismGroup,
    n: usize,
) -> Vec<(Option<&Automorphism>, Vec<usize>)> {
    let id: Vec<usize> = (0..n).collect();
    let mut gens: Vec<(Option<&Automorphism>, Vec<usize>)> = automorphism_generators(aut)
        .into_iter()
        .map(|a| (Some(a), id.clone()))
        .collect();
    if n >= 2 {
        let mut swap = id.clone();
        swap.swap(0, 1);
        gens.push((None, swap));
        if n >= 3 {
            gens.push((None, (0..n).map(|j| (j + 1) % n).collect()));
        }
    }
    gens
}

/// Components of the graph joining each point to its images under `gens`,
/// over `blocks` blocks of `n` coordinates (elements, then characters).
fn components(
    m: u64,
    n: usize,
    blocks: usize,
    gens: &[(Option<&Automorphism>, Vec<usize>)],
) -> (DisjointSets, u64) {
    let len = m.pow((blocks * n) as u32);
    let mut sets = DisjointSets::new(len as usize);
    let mut image = vec![0u32; blocks * n];
    for x in 0..len {
        let digits = decode(x, m, blocks * n);
        for (phi, sigma) in gens {
            for b in 0..blocks {
                for j in 0..n {
                    let v = digits[b * n + j];
                    image[b * n + sigma[j]] = match (phi, b) {
                        (None, _) => v,
                        (Some(a), 0) => a.element_map[v as usize],
                        (Some(a), _) => a.character_map[v as usize],
                    };
                }
            }
            sets.union(x as u32, encode(&image, m) as u32);
        }
    }
    (sets, len)
}

/// Explicit orbits of `Ω(G, n)`, ordered by representative.
pub fn orbit_enumerate(group: &AbelianGroup, n: usize, budget: &Budget) -> Result<Vec<Orbit>> {
    check_n(n)?;
    Budget::check("|Ω(G, n)| for orbits", budget.max_orbit_omega, omega_size(group, n))?;
    let aut = AutomorphismGroup::new(group, budget)?;
    let gens = action_generators(&aut, n);
    let (mut sets, len) = components(group.order(), n, 2, &gens);
    let mut size_of_root: HashMap<u32, u64> = HashMap::new();
    for x in 0..len as u32 {
        *size_of_root.entry(sets.find(x)).or_default() += 1;
    }
    // Points are visited in increasing order, so the first member seen of
    // each component is its least.
    let mut orbits = Vec::new();
    let mut seen_roots = HashSet::new();
    for x in 0..len as u32 {
        let root = sets.find(x);
        if seen_roots.insert(root) {
            orbits.push(Orbit {
                representative: Esc::at(group, n, x as u64),
                size: size_of_root[&root],
            });
        }
    }
    Ok(orbits)
}

/// Number of orbits of `Aut(G) × S_n` on `G^n` alone.
pub fn element_orbit_count(group: &AbelianGroup, n: usize, budget: &Budget) -> Result<u64> {
    check_n(n)?;
    let size = u32::try_from(n).ok().and_then(|k| group.order().checked_pow(k));
    Budget::check("|G^n| for orbits", budget.max_orbit_omega, size)?;
    let aut = AutomorphismGroup::new(group, budget)?;
    let gens = action_generators(&aut, n);
    let (mut sets, len) = components(group.order(), n, 1, &gens);
    Ok((0..len as u32).filter(|&x| sets.find(x) == x).count() as u64)
}
