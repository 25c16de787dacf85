//! Orbits of the column-permutation group and the orbit-majority bound.
//!
//! A row representation invariant to every column permutation is constant on
//! the orbits of `S_m` acting on `{0,1}^m`; two rows share an orbit exactly
//! when they have equal Hamming weight. Any deterministic readout of such a
//! representation is therefore capped by the orbit-wise majority of the label
//! rule, computed here by exact enumeration.

use super::{Frac, Row, ToyError, ToyTask};

/// The partition of `{0,1}^m` into `S_m` orbits (one per Hamming weight).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrbitPartition {
    m: usize,
    orbits: Vec<Vec<Row>>,
}

impl OrbitPartition {
    pub fn new(m: usize) -> Result<Self, ToyError> {
        if m > 20 {
            return Err(ToyError::MTooLarge(m));
        }
        let mut orbits: Vec<Vec<Row>> = vec![Vec::new(); m + 1];
        for row in 0..(1u32 << m) {
            orbits[row.count_ones() as usize].push(row);
        }
        Ok(Self { m, orbits })
    }

    pub fn orbits(&self) -> &[Vec<Row>] {
        &self.orbits
    }

    pub fn orbit_count(&self) -> usize {
        self.orbits.len()
    }

    /// Index of the orbit containing `row`.
    pub fn orbit_of(&self, row: Row) -> usize {
        row.count_ones() as usize
    }

    /// Check the partition property: disjoint orbits covering all rows.
    pub fn is_partition(&self) -> bool {
        let mut seen = vec![false; 1 << self.m];
        for orbit in &self.orbits {
            for &r in orbit {
                if seen[r as usize] {
                    return false;
                }
                seen[r as usize] = true;
            }
        }
        seen.iter().all(|&s| s)
    }
}

/// The orbit-majority accuracy ceiling for an arbitrary binary rule.
pub fn orbit_bound_of_rule(
    m: usize,
    rule: impl Fn(Row) -> u8,
) -> Result<Frac, ToyError> {
    let partition = OrbitPartition::new(m)?;
    let mut correct: i64 = 0;
    for orbit in partition.orbits() {
        let ones = orbit.iter().filter(|&&r| rule(r) == 1).count() as i64;
        let zeros = orbit.len() as i64 - ones;
        correct += ones.max(zeros);
    }
    Ok(Frac::new(correct, 1i64 << m))
}

/// The orbit-majority accuracy ceiling for a task's label rule.
pub fn orbit_bound(task: &ToyTask) -> Result<Frac, ToyError> {
    orbit_bound_of_rule(task.m, |r| task.label(r))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::toy::TaskKind;

    fn frac(n: i64, d: i64) -> Frac {
        Frac::new(n, d)
    }

    #[test]
    fn bounds_at_m3_match_the_stated_values() {
        let a = ToyTask::new(TaskKind::A, 3).unwrap();
        let b = ToyTask::new(TaskKind::B, 3).unwrap();
        let c = ToyTask::new(TaskKind::C, 3).unwrap();
        assert_eq!(orbit_bound(&a).unwrap(), frac(3, 4));
        assert_eq!(orbit_bound(&b).unwrap(), frac(3, 4));
        assert_eq!(orbit_bound(&c).unwrap(), frac(1, 1));
    }

    #[test]
    fn partition_property() {
        for m in 1..=6 {
            assert!(OrbitPartition::new(m).unwrap().is_partition());
        }
    }

    #[test]
    fn enumeration_limit() {
        assert!(OrbitPartition::new(21).is_err());
    }

    /// Independent oracle: enumerate every orbit-constant classifier and take
    /// the best accuracy. Must equal the orbit-majority formula.
    fn best_orbit_constant_classifier(m: usize, rule: &dyn Fn(Row) -> u8) -> Frac {
        let orbit_count = m + 1;
        let rows = 1u32 << m;
        let mut best: i64 = 0;
        for assignment in 0..(1u32 << orbit_count) {
            let mut correct: i64 = 0;
            for r in 0..rows {
                let g = ((assignment >> r.count_ones()) & 1) as u8;
                if g == rule(r) {
                    correct += 1;
                }
            }
            best = best.max(correct);
        }
        Frac::new(best, 1i64 << m)
    }

    #[test]
    fn bound_equals_exhaustive_classifier_search_for_all_rules_m3() {
        // All 2^8 deterministic rules on {0,1}^3.
        for rule_id in 0u32..256 {
            let rule = move |r: Row| ((rule_id >> r) & 1) as u8;
            assert_eq!(
                orbit_bound_of_rule(3, rule).unwrap(),
                best_orbit_constant_classifier(3, &rule),
                "rule {rule_id}"
            );
        }
    }
}
