//! Enumeration of every analyzable (variable, condition combination) pair.

use std::collections::BTreeMap;
use std::fmt;

use crate::domain::{StudyRecord, Subgroup, SubgroupKey};
use crate::ingest::InputTable;

/// How to treat a candidate in which one study contributes several rows,
/// which happens when a selected column subset leaves out a column on which
/// that study has more than one value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum MembershipPolicy {
    /// Keep every matching row as its own entry. This yields the marginal
    /// analyses (e.g. all `Retro` rows regardless of eye condition).
    #[default]
    PoolRepeatedStudies,
    /// Skip the candidate with [`SkipReason::AmbiguousMembership`].
    RejectRepeatedStudies,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SkipReason {
    /// Fewer than two rows match.
    TooFewStudies { k: usize },
    /// A study appears more than once in the candidate.
    AmbiguousMembership { study: String },
}

impl fmt::Display for SkipReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::TooFewStudies { k } => write!(f, "only {k} study (at least 2 required)"),
            Self::AmbiguousMembership { study } => {
                write!(f, "study {study:?} contributes more than one row")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct SubgroupSet {
    pub subgroups: Vec<Subgroup>,
    pub skipped: Vec<(SubgroupKey, SkipReason)>,
}

impl SubgroupSet {
    pub fn len(&self) -> usize {
        self.subgroups.len()
    }

    pub fn is_empty(&self) -> bool {
        self.subgroups.is_empty()
    }

    pub fn get(&self, key: &SubgroupKey) -> Option<&Subgroup> {
        self.subgroups.iter().find(|s| s.key() == key)
    }
}

/// Non-empty subsets of `1..=columns`, each as increasing column indices.
fn column_subsets(columns: usize) -> Vec<Vec<usize>> {
    assert!(columns < usize::BITS as usize, "too many condition columns");
    (1usize..(1 << columns))
        .map(|mask| {
            (0..columns)
                .filter(|b| mask & (1 << b) != 0)
                .map(|b| b + 1)
                .collect()
        })
        .collect()
}

pub fn enumerate_subgroups(table: &InputTable) -> SubgroupSet {
    enumerate_subgroups_with(table, MembershipPolicy::default())
}

pub fn enumerate_subgroups_with(table: &InputTable, policy: MembershipPolicy) -> SubgroupSet {
    let mut by_variable: BTreeMap<&str, Vec<&StudyRecord>> = BTreeMap::new();
    for r in table.records() {
        by_variable.entry(r.variable()).or_default().push(r);
    }

    let subsets = column_subsets(table.condition_column_count());
    let mut candidates: Vec<(SubgroupKey, Vec<StudyRecord>)> = Vec::new();
    for (variable, records) in &by_variable {
        for columns in &subsets {
            // only observed value combinations become candidates
            let mut groups: BTreeMap<Vec<&str>, Vec<StudyRecord>> = BTreeMap::new();
            for r in records {
                let values: Vec<&str> = columns
                    .iter()
                    .map(|&c| r.conditions()[c - 1].as_str())
                    .collect();
                groups.entry(values).or_default().push((*r).clone());
            }
            for (values, members) in groups {
                let selected = columns
                    .iter()
                    .zip(values)
                    .map(|(&c, v)| (c, v.to_string()))
                    .collect();
                let key = SubgroupKey::new(*variable, selected)
                    .expect("column subsets are non-empty and increasing");
                candidates.push((key, members));
            }
        }
    }
    candidates.sort_by(|a, b| a.0.cmp(&b.0));

    let mut set = SubgroupSet::default();
    for (key, mut members) in candidates {
        if members.len() < 2 {
            set.skipped
                .push((key, SkipReason::TooFewStudies { k: members.len() }));
            continue;
        }
        members.sort_by(|a, b| a.study().cmp(b.study()));
        if policy == MembershipPolicy::RejectRepeatedStudies {
            if let Some(w) = members.windows(2).find(|w| w[0].study() == w[1].study()) {
                let study = w[0].study().to_string();
                set.skipped
                    .push((key, SkipReason::AmbiguousMembership { study }));
                continue;
            }
        }
        let sub = Subgroup::new(key, members)
            .expect("ingestion guarantees unique (study, variable, conditions)");
        set.subgroups.push(sub);
    }
    set
}

/// Output folder name, `{variable}-{v1|v2|…}` with values in column order.
pub fn folder_name(key: &SubgroupKey) -> String {
    key.to_string()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::parse_input;

    fn table(rows: &[&str], conditions: usize) -> InputTable {
        let mut s = String::from("study;variable;n_1;n_2;mean_1;std_1;mean_2;std_2");
        for i in 1..=conditions {
            s.push_str(&format!(";condition_{i}"));
        }
        s.push('\n');
        for r in rows {
            s.push_str(r);
            s.push('\n');
        }
        parse_input(s.as_bytes()).unwrap()
    }

    fn key(variable: &str, sel: &[(usize, &str)]) -> SubgroupKey {
        SubgroupKey::new(
            variable,
            sel.iter().map(|(c, v)| (*c, v.to_string())).collect(),
        )
        .unwrap()
    }

    #[test]
    fn subsets_in_mask_order() {
        assert_eq!(column_subsets(2), vec![vec![1], vec![2], vec![1, 2]]);
        assert_eq!(column_subsets(3).len(), 7);
        assert!(column_subsets(0).is_empty());
    }

    #[test]
    fn minimal_single_subgroup() {
        let t = table(&["A;X;10;10;1;1;1;1;c", "B;X;10;10;1;1;1;1;c"], 1);
        let set = enumerate_subgroups(&t);
        assert_eq!(set.len(), 1);
        assert!(set.skipped.is_empty());
        assert_eq!(folder_name(set.subgroups[0].key()), "X-c");
    }

    #[test]
    fn singletons_are_skipped_and_holes_are_absent() {
        // (a, p) and (b, q) observed; (a, q) and (b, p) never co-occur
        let t = table(
            &[
                "A;X;10;10;1;1;1;1;a;p",
                "B;X;10;10;1;1;1;1;a;p",
                "C;X;10;10;1;1;1;1;b;q",
            ],
            2,
        );
        let set = enumerate_subgroups(&t);
        let emitted: Vec<String> = set.subgroups.iter().map(|s| folder_name(s.key())).collect();
        assert_eq!(emitted, ["X-a", "X-a|p", "X-p"]);
        let skipped: Vec<String> = set.skipped.iter().map(|(k, _)| folder_name(k)).collect();
        assert_eq!(skipped, ["X-b", "X-b|q", "X-q"]);
        assert!(set
            .skipped
            .iter()
            .all(|(_, r)| *r == SkipReason::TooFewStudies { k: 1 }));
    }

    #[test]
    fn variables_are_analyzed_separately() {
        let t = table(
            &[
                "A;Y;10;10;1;1;1;1;c",
                "B;Y;10;10;1;1;1;1;c",
                "A;X;10;10;1;1;1;1;c",
                "B;X;10;10;1;1;1;1;c",
            ],
            1,
        );
        let set = enumerate_subgroups(&t);
        let names: Vec<String> = set.subgroups.iter().map(|s| folder_name(s.key())).collect();
        assert_eq!(names, ["X-c", "Y-c"]);
    }

    #[test]
    fn repeated_study_policy() {
        let rows = [
            "A;X;10;10;1;1;1;1;EO;Retro",
            "A;X;10;10;1;1;1;1;EC;Retro",
            "B;X;10;10;1;1;1;1;EO;Retro",
        ];
        let t = table(&rows, 2);
        let pooled = enumerate_subgroups(&t);
        let retro = pooled.get(&key("X", &[(2, "Retro")])).unwrap();
        assert_eq!(retro.len(), 3);

        let strict = enumerate_subgroups_with(&t, MembershipPolicy::RejectRepeatedStudies);
        assert!(strict.get(&key("X", &[(2, "Retro")])).is_none());
        assert!(strict.skipped.contains(&(
            key("X", &[(2, "Retro")]),
            SkipReason::AmbiguousMembership { study: "A".into() }
        )));
        assert!(strict.get(&key("X", &[(1, "EO"), (2, "Retro")])).is_some());
    }

    #[test]
    fn folder_names() {
        assert_eq!(
            folder_name(&key("AP mean velocity", &[(1, "EC"), (2, "Retro")])),
            "AP mean velocity-EC|Retro"
        );
        assert_eq!(folder_name(&key("X", &[(1, "A")])), "X-A");
        assert_eq!(folder_name(&key("X", &[(2, "B")])), "X-B");
    }

    #[test]
    fn empty_table_yields_nothing() {
        let set = enumerate_subgroups(&table(&[], 2));
        assert!(set.is_empty());
        assert!(set.skipped.is_empty());
    }
}
