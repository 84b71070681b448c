//! Cross-checks between the counting methods, exhaustive sweeps over small
//! abelian groups, and a table of known values.

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::abelian::{AbelianGroup, PrimePowerFactor};
use crate::budget::Budget;
use crate::burnside::{orbit_count_congruence, orbit_count_naive, orbit_enumerate};
use crate::closed_form::{
    n_cyclic, n_cyclic_prime_power_form, n_elementary_abelian, special_case_value, CyclicForm,
    SpecialCase,
};
use crate::error::{EscError, Result};
use crate::numtheory::factorize;
use crate::ExactCount;

/// A way of computing `N(G, n)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    /// Burnside average of exhaustively counted fixed points.
    Naive,
    /// Burnside average of `Π (ν μ)^λ` over `Aut(G)` and cycle types.
    Congruence,
    /// Number of explicitly enumerated orbits.
    Orbits,
    /// Cyclic `p`-group formula, one term per unit class.
    PrimePower,
    /// Cyclic `p`-group formula, regrouped arrangement.
    PrimePowerRegrouped,
    /// Cyclic group formula, product over primary parts.
    Cyclic,
    /// Sum over `GL(s, Z_p)` for `(C_p)^s`.
    ElementaryAbelian,
    /// Closed expression for `N(C_{p^e}, 1)`.
    OneSlot,
    /// Closed expression for `N(C_{p^e}, 2)`.
    TwoSlot,
    /// Closed expression for `N(C_p, n)`.
    PrimeCyclic,
    /// `Π (p_i + 2)` for squarefree cyclic groups at `n = 1`.
    Squarefree,
}

impl Method {
    pub const ALL: [Method; 11] = [
        Method::Naive,
        Method::Congruence,
        Method::Orbits,
        Method::PrimePower,
        Method::PrimePowerRegrouped,
        Method::Cyclic,
        Method::ElementaryAbelian,
        Method::OneSlot,
        Method::TwoSlot,
        Method::PrimeCyclic,
        Method::Squarefree,
    ];

    /// Closed forms in order of preference for a single answer.
    pub const CLOSED: [Method; 4] = [
        Method::PrimePower,
        Method::Cyclic,
        Method::ElementaryAbelian,
        Method::Congruence,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Method::Naive => "naive",
            Method::Congruence => "congruence",
            Method::Orbits => "orbits",
            Method::PrimePower => "prime-power",
            Method::PrimePowerRegrouped => "prime-power-regrouped",
            Method::Cyclic => "cyclic",
            Method::ElementaryAbelian => "elementary-abelian",
            Method::OneSlot => "one-slot",
            Method::TwoSlot => "two-slot",
            Method::PrimeCyclic => "prime-cyclic",
            Method::Squarefree => "squarefree",
        }
    }

    /// Whether the method is defined for `G` and `n` at all (budget aside).
    pub fn applies_to(self, group: &AbelianGroup, n: usize) -> bool {
        let prime_power = group.as_cyclic_prime_power();
        match self {
            Method::Naive | Method::Congruence | Method::Orbits => true,
            Method::PrimePower | Method::PrimePowerRegrouped => prime_power.is_some(),
            Method::Cyclic => group.is_cyclic(),
            Method::ElementaryAbelian => group.as_elementary_abelian().is_some(),
            Method::OneSlot => prime_power.is_some() && n == 1,
            Method::TwoSlot => prime_power.is_some() && n == 2,
            Method::PrimeCyclic => matches!(prime_power, Some((_, 1))),
            Method::Squarefree => {
                n == 1 && group.is_cyclic() && group.factors().iter().all(|f| f.e == 1)
            }
        }
    }

    pub fn evaluate(self, group: &AbelianGroup, n: usize, budget: &Budget) -> Result<ExactCount> {
        if !self.applies_to(group, n) {
            return Err(EscError::Inadmissible(format!(
                "{} does not apply to {group} at n = {n}",
                self.name()
            )));
        }
        let prime_power = group.as_cyclic_prime_power();
        match self {
            Method::Naive => orbit_count_naive(group, n, budget),
            Method::Congruence => orbit_count_congruence(group, n, budget),
            Method::Orbits => Ok(orbit_enumerate(group, n, budget)?.len().into()),
            Method::PrimePower | Method::PrimePowerRegrouped => {
                let (p, e) = prime_power.expect("checked above");
                let form = if self == Method::PrimePower {
                    CyclicForm::UnitClasses
                } else {
                    CyclicForm::Regrouped
                };
                n_cyclic_prime_power_form(p, e, n, form)
            }
            Method::Cyclic => n_cyclic(group.order(), n),
            Method::ElementaryAbelian => {
                let (p, s) = group.as_elementary_abelian().expect("checked above");
                n_elementary_abelian(p, s as u32, n, budget)
            }
            Method::OneSlot => {
                let (p, e) = prime_power.expect("checked above");
                special_case_value(&SpecialCase::CyclicPrimePowerSingle { p, e })
            }
            Method::TwoSlot => {
                let (p, e) = prime_power.expect("checked above");
                special_case_value(&SpecialCase::CyclicPrimePowerPair { p, e })
            }
            Method::PrimeCyclic => {
                let (p, _) = prime_power.expect("checked above");
                special_case_value(&SpecialCase::PrimeCyclic { p, n })
            }
            Method::Squarefree => special_case_value(&SpecialCase::SquarefreeSingle {
                primes: group.factors().iter().map(|f| f.p).collect(),
            }),
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = EscError;

    fn from_str(s: &str) -> Result<Self> {
        Method::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| EscError::Parse {
                position: 0,
                message: format!("unknown method {s:?}"),
            })
    }
}

/// The preferred closed form for `G`, falling back to the general formula.
pub fn closed_form_value(
    group: &AbelianGroup,
    n: usize,
    budget: &Budget,
) -> Result<(Method, ExactCount)> {
    let method = Method::CLOSED
        .into_iter()
        .find(|m| m.applies_to(group, n))
        .expect("the general formula always applies");
    Ok((method, method.evaluate(group, n, budget)?))
}

fn elapsed_ms(start: Instant) -> u64 {
    start.elapsed().as_millis() as u64
}

/// What happened when one method ran on one case.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "kebab-case")]
pub enum Outcome {
    Computed { count: String },
    /// Over budget; not counted as a disagreement.
    Skipped { reason: String },
    Failed { error: String },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MethodResult {
    pub method: Method,
    #[serde(flatten)]
    pub outcome: Outcome,
    pub elapsed_ms: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CaseResult {
    pub group: String,
    pub n: usize,
    pub results: Vec<MethodResult>,
    /// True iff nothing failed and every computed value is the same.
    pub agree: bool,
    pub elapsed_ms: u64,
}

impl CaseResult {
    pub fn computed(&self) -> impl Iterator<Item = (Method, &str)> + '_ {
        self.results.iter().filter_map(|r| match &r.outcome {
            Outcome::Computed { count } => Some((r.method, count.as_str())),
            _ => None,
        })
    }

    /// The common value, when the methods agree and at least one ran.
    pub fn value(&self) -> Option<&str> {
        if self.agree {
            self.computed().next().map(|(_, c)| c)
        } else {
            None
        }
    }

    fn describe_disagreement(&self) -> String {
        let parts: Vec<String> = self
            .results
            .iter()
            .filter_map(|r| match &r.outcome {
                Outcome::Computed { count } => Some(format!("{}={count}", r.method)),
                Outcome::Failed { error } => Some(format!("{} failed: {error}", r.method)),
                Outcome::Skipped { .. } => None,
            })
            .collect();
        format!("{} n={}: {}", self.group, self.n, parts.join(", "))
    }
}

/// Run each applicable method in `methods` on `(G, n)`.
pub fn cross_check(
    group: &AbelianGroup,
    n: usize,
    methods: &[Method],
    budget: &Budget,
) -> CaseResult {
    let start = Instant::now();
    let results: Vec<MethodResult> = methods
        .iter()
        .filter(|m| m.applies_to(group, n))
        .map(|&method| {
            let t = Instant::now();
            let outcome = match method.evaluate(group, n, budget) {
                Ok(v) => Outcome::Computed {
                    count: v.to_string(),
                },
                Err(e @ EscError::BudgetExceeded { .. }) => Outcome::Skipped {
                    reason: e.to_string(),
                },
                Err(e) => Outcome::Failed {
                    error: e.to_string(),
                },
            };
            MethodResult {
                method,
                outcome,
                elapsed_ms: elapsed_ms(t),
            }
        })
        .collect();
    let no_failures = results
        .iter()
        .all(|r| !matches!(r.outcome, Outcome::Failed { .. }));
    let mut case = CaseResult {
        group: group.to_string(),
        n,
        results,
        agree: false,
        elapsed_ms: 0,
    };
    let agree = {
        let mut values = case.computed().map(|(_, c)| c);
        let first = values.next();
        values.all(|c| Some(c) == first)
    };
    case.agree = no_failures && agree;
    case.elapsed_ms = elapsed_ms(start);
    case
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Summary {
    pub cases: usize,
    pub agreeing: usize,
    pub disagreeing: usize,
    pub skipped_methods: usize,
    pub known_rows: usize,
    pub known_mismatches: usize,
}

/// One known value next to its recomputation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct KnownValueRow {
    pub group: String,
    pub n: usize,
    /// The expression or constant the expected value comes from.
    pub source: String,
    pub expected: String,
    pub computed: String,
    pub computed_by: Method,
    pub matches: bool,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub cases: Vec<CaseResult>,
    pub known_values: Vec<KnownValueRow>,
    pub summary: Summary,
    /// Human-readable description of every disagreement or mismatch.
    pub flags: Vec<String>,
}

impl VerificationReport {
    pub fn from_parts(cases: Vec<CaseResult>, known_values: Vec<KnownValueRow>) -> Self {
        let mut flags: Vec<String> = cases
            .iter()
            .filter(|c| !c.agree)
            .map(CaseResult::describe_disagreement)
            .collect();
        flags.extend(known_values.iter().filter(|r| !r.matches).map(|r| {
            format!(
                "{} n={}: expected {} from {}, computed {} by {}",
                r.group, r.n, r.expected, r.source, r.computed, r.computed_by
            )
        }));
        let summary = Summary {
            cases: cases.len(),
            agreeing: cases.iter().filter(|c| c.agree).count(),
            disagreeing: cases.iter().filter(|c| !c.agree).count(),
            skipped_methods: cases
                .iter()
                .flat_map(|c| &c.results)
                .filter(|r| matches!(r.outcome, Outcome::Skipped { .. }))
                .count(),
            known_rows: known_values.len(),
            known_mismatches: known_values.iter().filter(|r| !r.matches).count(),
        };
        VerificationReport {
            cases,
            known_values,
            summary,
            flags,
        }
    }

    pub fn is_clean(&self) -> bool {
        self.flags.is_empty()
    }
}

/// Partitions of `e` into positive parts, each listed in ascending order.
fn partitions(e: u32) -> Vec<Vec<u32>> {
    fn go(remaining: u32, min: u32, current: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if remaining == 0 {
            out.push(current.clone());
            return;
        }
        for part in min..=remaining {
            current.push(part);
            go(remaining - part, part, current, out);
            current.pop();
        }
    }
    let mut out = Vec::new();
    go(e, 1, &mut Vec::new(), &mut out);
    out
}

/// Every abelian group of order `m` up to isomorphism: one per choice of a
/// partition of each prime exponent.
pub fn abelian_groups_of_order(m: u64) -> Result<Vec<AbelianGroup>> {
    if m == 0 {
        return Err(EscError::OutOfRange("group order must be positive".into()));
    }
    let mut choices: Vec<Vec<PrimePowerFactor>> = vec![Vec::new()];
    for (p, e) in factorize(m) {
        let mut next = Vec::new();
        for prefix in &choices {
            for parts in partitions(e) {
                let mut factors = prefix.clone();
                factors.extend(parts.into_iter().map(|e| PrimePowerFactor { p, e }));
                next.push(factors);
            }
        }
        choices = next;
    }
    let mut groups = choices
        .into_iter()
        .map(AbelianGroup::new)
        .collect::<Result<Vec<_>>>()?;
    groups.sort_by_key(|g| g.to_string());
    Ok(groups)
}

/// Every abelian group of order at most `max_order`, by order.
pub fn abelian_groups_up_to(max_order: u64) -> Result<Vec<AbelianGroup>> {
    let mut all = Vec::new();
    for m in 1..=max_order {
        all.extend(abelian_groups_of_order(m)?);
    }
    Ok(all)
}

/// [`cross_check`] with every method on every group of order `<= max_order`
/// and every `1 <= n <= max_n`.
pub fn sweep(max_order: u64, max_n: usize, budget: &Budget) -> Result<VerificationReport> {
    let groups = abelian_groups_up_to(max_order)?;
    let cells: Vec<(usize, &AbelianGroup)> = groups
        .iter()
        .flat_map(|g| (1..=max_n).map(move |n| (n, g)))
        .collect();
    let mut cases: Vec<(usize, CaseResult)> = cells
        .par_iter()
        .enumerate()
        .map(|(i, (n, g))| (i, cross_check(g, *n, &Method::ALL, budget)))
        .collect();
    cases.sort_by_key(|(i, _)| *i);
    Ok(VerificationReport::from_parts(
        cases.into_iter().map(|(_, c)| c).collect(),
        Vec::new(),
    ))
}

/// Recompute with the general formula when it fits the budget, otherwise
/// with the cyclic product formula.
fn recompute(group: &AbelianGroup, n: usize, budget: &Budget) -> Result<(Method, ExactCount)> {
    match orbit_count_congruence(group, n, budget) {
        Ok(v) => Ok((Method::Congruence, v)),
        Err(EscError::BudgetExceeded { .. }) if group.is_cyclic() => {
            Ok((Method::Cyclic, n_cyclic(group.order(), n)?))
        }
        Err(e) => Err(e),
    }
}

fn known_row(
    group: AbelianGroup,
    n: usize,
    source: &str,
    expected: Result<ExactCount>,
    budget: &Budget,
) -> KnownValueRow {
    let (computed_by, computed) = match recompute(&group, n, budget) {
        Ok((m, v)) => (m, v.to_string()),
        Err(e) => (Method::Congruence, format!("error: {e}")),
    };
    let expected = match expected {
        Ok(v) => v.to_string(),
        Err(e) => format!("error: {e}"),
    };
    KnownValueRow {
        group: group.to_string(),
        n,
        source: source.to_string(),
        matches: expected == computed,
        expected,
        computed,
        computed_by,
    }
}

/// Closed values and expressions next to independent
/// recomputations.
pub fn known_values_table(budget: &Budget) -> Result<Vec<KnownValueRow>> {
    let mut rows = vec![
        known_row(AbelianGroup::cyclic(2)?, 2, "stated value", Ok(10u32.into()), budget),
        known_row(AbelianGroup::cyclic(4)?, 2, "stated value", Ok(76u32.into()), budget),
    ];
    let one_slot = [(2u64, 1u32), (2, 2), (3, 1), (3, 2), (3, 3), (5, 1), (5, 2), (7, 1), (7, 2), (11, 1), (13, 1)];
    for (p, e) in one_slot {
        rows.push(known_row(
            AbelianGroup::cyclic(p.pow(e))?,
            1,
            "p^e + 2(p^(e-1) + ... + p + 1)",
            special_case_value(&SpecialCase::CyclicPrimePowerSingle { p, e }),
            budget,
        ));
    }
    for e in 3..=6u32 {
        rows.push(known_row(
            AbelianGroup::cyclic(1 << e)?,
            1,
            "2^(e+1) + 2^e - 2",
            special_case_value(&SpecialCase::CyclicPrimePowerSingle { p: 2, e }),
            budget,
        ));
    }
    for (p, e) in [(3u64, 1u32), (3, 2), (3, 3), (5, 1), (5, 2), (7, 1), (7, 2)] {
        rows.push(known_row(
            AbelianGroup::cyclic(p.pow(e))?,
            2,
            "1 + (p^3e - p^3)/(2(p^3 - 1)) + (p^(3e+1)/2 + p^(e+1) + p^e - p - 3/2)/(p - 1)",
            special_case_value(&SpecialCase::CyclicPrimePowerPair { p, e }),
            budget,
        ));
    }
    for e in 3..=6u32 {
        rows.push(known_row(
            AbelianGroup::cyclic(1 << e)?,
            2,
            "(15/14) 2^3e + 3 * 2^(e+1) - 116/7",
            special_case_value(&SpecialCase::CyclicPrimePowerPair { p: 2, e }),
            budget,
        ));
    }
    for p in [2u64, 3, 5, 7] {
        for n in 1..=3 {
            rows.push(known_row(
                AbelianGroup::cyclic(p)?,
                n,
                "prime cyclic expression",
                special_case_value(&SpecialCase::PrimeCyclic { p, n }),
                budget,
            ));
        }
    }
    let squarefree: [&[u64]; 7] = [&[2, 3], &[2, 5], &[3, 5], &[2, 7], &[2, 3, 5], &[2, 3, 7], &[3, 5, 7]];
    for primes in squarefree {
        rows.push(known_row(
            AbelianGroup::cyclic(primes.iter().product())?,
            1,
            "product of (p_i + 2)",
            special_case_value(&SpecialCase::SquarefreeSingle {
                primes: primes.to_vec(),
            }),
            budget,
        ));
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::abelian::parse_group;

    #[test]
    fn partitions_are_counted() {
        let counts: Vec<usize> = (1..=8).map(|e| partitions(e).len()).collect();
        assert_eq!(counts, vec![1, 2, 3, 5, 7, 11, 15, 22]);
    }

    #[test]
    fn group_counts_by_order() {
        let counts: Vec<usize> = (1..=16)
            .map(|m| abelian_groups_of_order(m).unwrap().len())
            .collect();
        assert_eq!(counts, vec![1, 1, 1, 2, 1, 1, 1, 3, 2, 1, 1, 2, 1, 1, 1, 5]);
        let names: Vec<String> = abelian_groups_up_to(4)
            .unwrap()
            .iter()
            .map(|g| g.to_string())
            .collect();
        assert_eq!(names, vec!["C1", "C2", "C3", "C2xC2", "C4"]);
    }

    #[test]
    fn method_names_round_trip() {
        for m in Method::ALL {
            assert_eq!(m.name().parse::<Method>().unwrap(), m);
            assert_eq!(serde_json::to_string(&m).unwrap(), format!("\"{}\"", m.name()));
        }
    }

    #[test]
    fn cross_check_examples() {
        let b = Budget::default();
        let c2 = cross_check(&parse_group("C2").unwrap(), 2, &Method::ALL, &b);
        assert!(c2.agree);
        assert_eq!(c2.value(), Some("10"));
        assert!(c2.computed().count() >= 8);
        let c1 = cross_check(&AbelianGroup::trivial(), 1, &Method::ALL, &b);
        assert!(c1.agree);
        assert_eq!(c1.value(), Some("1"));
        let mixed = cross_check(
            &parse_group("C4xC2").unwrap(),
            2,
            &[Method::Naive, Method::Congruence],
            &b,
        );
        assert!(mixed.agree);
        assert_eq!(mixed.computed().count(), 2);
    }

    #[test]
    fn over_budget_methods_are_skipped() {
        let tight = Budget {
            max_omega: 10,
            max_orbit_omega: 10,
            ..Budget::default()
        };
        let case = cross_check(&parse_group("C4").unwrap(), 2, &Method::ALL, &tight);
        assert!(case.agree);
        assert_eq!(case.value(), Some("76"));
        let skipped: Vec<Method> = case
            .results
            .iter()
            .filter(|r| matches!(r.outcome, Outcome::Skipped { .. }))
            .map(|r| r.method)
            .collect();
        assert_eq!(skipped, vec![Method::Naive, Method::Orbits]);
    }

    #[test]
    fn small_sweeps_agree() {
        let b = Budget::default();
        let report = sweep(4, 1, &b).unwrap();
        assert_eq!(report.summary.cases, 5);
        assert!(report.is_clean(), "{:?}", report.flags);
        let report = sweep(2, 3, &b).unwrap();
        assert_eq!(report.summary.cases, 6);
        assert!(report.is_clean(), "{:?}", report.flags);
    }

    #[test]
    fn closed_form_preference() {
        let b = Budget::default();
        let pick = |s: &str, n| closed_form_value(&parse_group(s).unwrap(), n, &b).unwrap();
        assert_eq!(pick("C9", 1), (Method::PrimePower, 17u32.into()));
        assert_eq!(pick("C12", 1), (Method::Cyclic, 50u32.into()));
        assert_eq!(pick("C2xC2", 1), (Method::ElementaryAbelian, 5u32.into()));
        assert_eq!(pick("C4xC2", 1).0, Method::Congruence);
        assert_eq!(pick("C1", 2), (Method::Cyclic, 1u32.into()));
    }

    #[test]
    fn known_values_reproduce() {
        let rows = known_values_table(&Budget::default()).unwrap();
        let bad: Vec<_> = rows.iter().filter(|r| !r.matches).collect();
        assert!(bad.is_empty(), "{bad:?}");
        let find = |g: &str, n| rows.iter().find(|r| r.group == g && r.n == n).unwrap();
        assert_eq!(find("C4", 2).expected, "76");
        assert_eq!(find("C8", 1).expected, "22");
        assert_eq!(find("C2xC3xC5", 1).expected, "140");
        assert_eq!(find("C3xC5xC7", 1).computed_by, Method::Cyclic);
    }

    #[test]
    fn report_flags_disagreements() {
        let case = CaseResult {
            group: "C2".into(),
            n: 1,
            results: vec![
                MethodResult {
                    method: Method::Naive,
                    outcome: Outcome::Computed { count: "4".into() },
                    elapsed_ms: 0,
                },
                MethodResult {
                    method: Method::Congruence,
                    outcome: Outcome::Computed { count: "5".into() },
                    elapsed_ms: 0,
                },
            ],
            agree: false,
            elapsed_ms: 0,
        };
        let report = VerificationReport::from_parts(vec![case], Vec::new());
        assert!(!report.is_clean());
        assert_eq!(report.summary.disagreeing, 1);
        assert_eq!(report.flags, vec!["C2 n=1: naive=4, congruence=5"]);
    }
}
