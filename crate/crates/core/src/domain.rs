//! Value types shared by every stage of the pipeline.
//!
//! Everything here is validated on construction and immutable afterwards.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::engine::HeterogeneityStats;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DomainError {
    #[error("{field} must be at least 2, got {value}")]
    NonPositiveCount { field: &'static str, value: String },
    #[error("{field} must be non-negative, got {value}")]
    NegativeSd { field: &'static str, value: f64 },
    #[error("{field} is not finite: {value}")]
    NonFiniteNumber { field: &'static str, value: String },
    #[error("{field} is not a number: {value:?}")]
    InvalidNumber { field: &'static str, value: String },
    #[error("{field} uses a comma as decimal separator: {value:?} (write \".\" instead)")]
    CommaDecimal { field: &'static str, value: String },
    #[error("{field} is empty")]
    EmptyLabel { field: String },
    #[error("alpha must lie strictly between 0 and 1, got {0}")]
    InvalidAlpha(f64),
    #[error("unknown effect size {0:?} (expected Hedges or Cohen)")]
    InvalidKind(String),
    #[error("a subgroup key needs at least one condition")]
    EmptySelection,
    #[error("condition columns must be 1-based and strictly increasing")]
    BadColumnOrder,
    #[error("a subgroup needs at least 2 studies, got {0}")]
    TooFewMembers(usize),
    #[error("study {study:?} does not match subgroup {key}")]
    MemberMismatch { study: String, key: String },
    #[error("study {study:?} appears twice with identical conditions")]
    DuplicateMember { study: String },
}

/// Number of subjects, mean and unbiased standard deviation of one group.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GroupStats {
    n: u32,
    mean: f64,
    sd: f64,
}

impl GroupStats {
    pub fn new(n: u32, mean: f64, sd: f64) -> Result<Self, DomainError> {
        if n < 2 {
            return Err(DomainError::NonPositiveCount {
                field: "n",
                value: n.to_string(),
            });
        }
        if !mean.is_finite() {
            return Err(DomainError::NonFiniteNumber {
                field: "mean",
                value: mean.to_string(),
            });
        }
        if !sd.is_finite() {
            return Err(DomainError::NonFiniteNumber {
                field: "sd",
                value: sd.to_string(),
            });
        }
        if sd < 0.0 {
            return Err(DomainError::NegativeSd {
                field: "sd",
                value: sd,
            });
        }
        Ok(Self { n, mean, sd })
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    pub fn sd(&self) -> f64 {
        self.sd
    }
}

/// Unvalidated text fields of one input row, keyed by column role.
#[derive(Debug, Clone, Default)]
pub struct RawRecord<'a> {
    pub study: &'a str,
    pub variable: &'a str,
    pub n_1: &'a str,
    pub n_2: &'a str,
    pub mean_1: &'a str,
    pub std_1: &'a str,
    pub mean_2: &'a str,
    pub std_2: &'a str,
    pub conditions: Vec<&'a str>,
}

/// One validated row of the study table.
#[derive(Debug, Clone, PartialEq)]
pub struct StudyRecord {
    study: String,
    variable: String,
    group1: GroupStats,
    group2: GroupStats,
    conditions: Vec<String>,
}

impl StudyRecord {
    pub fn new(
        study: impl Into<String>,
        variable: impl Into<String>,
        group1: GroupStats,
        group2: GroupStats,
        conditions: Vec<String>,
    ) -> Result<Self, DomainError> {
        let study = study.into();
        let variable = variable.into();
        if study.trim().is_empty() {
            return Err(DomainError::EmptyLabel {
                field: "study".into(),
            });
        }
        if variable.trim().is_empty() {
            return Err(DomainError::EmptyLabel {
                field: "variable".into(),
            });
        }
        if conditions.is_empty() {
            return Err(DomainError::EmptyLabel {
                field: "condition_1".into(),
            });
        }
        if let Some(i) = conditions.iter().position(|c| c.trim().is_empty()) {
            return Err(DomainError::EmptyLabel {
                field: format!("condition_{}", i + 1),
            });
        }
        Ok(Self {
            study,
            variable,
            group1,
            group2,
            conditions,
        })
    }

    pub fn study(&self) -> &str {
        &self.study
    }

    pub fn variable(&self) -> &str {
        &self.variable
    }

    pub fn group1(&self) -> &GroupStats {
        &self.group1
    }

    pub fn group2(&self) -> &GroupStats {
        &self.group2
    }

    pub fn conditions(&self) -> &[String] {
        &self.conditions
    }

    /// Value of the 1-based condition column `column`.
    pub fn condition(&self, column: usize) -> Option<&str> {
        column
            .checked_sub(1)
            .and_then(|i| self.conditions.get(i))
            .map(String::as_str)
    }

    /// Same record with the two groups exchanged.
    pub fn swapped_groups(&self) -> Self {
        Self {
            group1: self.group2,
            group2: self.group1,
            ..self.clone()
        }
    }
}

fn parse_count(field: &'static str, raw: &str) -> Result<u32, DomainError> {
    let raw = raw.trim();
    if raw.contains(',') {
        return Err(DomainError::CommaDecimal {
            field,
            value: raw.into(),
        });
    }
    if raw.is_empty() || !raw.bytes().all(|b| b.is_ascii_digit()) {
        return Err(DomainError::InvalidNumber {
            field,
            value: raw.into(),
        });
    }
    let n: u32 = raw.parse().map_err(|_| DomainError::InvalidNumber {
        field,
        value: raw.into(),
    })?;
    if n < 2 {
        return Err(DomainError::NonPositiveCount {
            field,
            value: raw.into(),
        });
    }
    Ok(n)
}

fn parse_real(field: &'static str, raw: &str) -> Result<f64, DomainError> {
    let raw = raw.trim();
    if raw.contains(',') {
        return Err(DomainError::CommaDecimal {
            field,
            value: raw.into(),
        });
    }
    let v: f64 = raw.parse().map_err(|_| DomainError::InvalidNumber {
        field,
        value: raw.into(),
    })?;
    if !v.is_finite() {
        return Err(DomainError::NonFiniteNumber {
            field,
            value: raw.into(),
        });
    }
    Ok(v)
}

fn parse_sd(field: &'static str, raw: &str) -> Result<f64, DomainError> {
    let v = parse_real(field, raw)?;
    if v < 0.0 {
        return Err(DomainError::NegativeSd { field, value: v });
    }
    Ok(v)
}

/// Turns the text fields of one row into a [`StudyRecord`].
pub fn validate_record(raw: &RawRecord<'_>) -> Result<StudyRecord, DomainError> {
    let n1 = parse_count("n_1", raw.n_1)?;
    let n2 = parse_count("n_2", raw.n_2)?;
    let mean1 = parse_real("mean_1", raw.mean_1)?;
    let sd1 = parse_sd("std_1", raw.std_1)?;
    let mean2 = parse_real("mean_2", raw.mean_2)?;
    let sd2 = parse_sd("std_2", raw.std_2)?;
    StudyRecord::new(
        raw.study.trim(),
        raw.variable.trim(),
        GroupStats::new(n1, mean1, sd1)?,
        GroupStats::new(n2, mean2, sd2)?,
        raw.conditions
            .iter()
            .map(|c| c.trim().to_string())
            .collect(),
    )
}

/// A variable of interest plus one value for each selected condition column.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SubgroupKey {
    variable: String,
    selected: Vec<(usize, String)>,
}

impl SubgroupKey {
    pub fn new(
        variable: impl Into<String>,
        selected: Vec<(usize, String)>,
    ) -> Result<Self, DomainError> {
        if selected.is_empty() {
            return Err(DomainError::EmptySelection);
        }
        if selected[0].0 < 1 || selected.windows(2).any(|w| w[0].0 >= w[1].0) {
            return Err(DomainError::BadColumnOrder);
        }
        Ok(Self {
            variable: variable.into(),
            selected,
        })
    }

    pub fn variable(&self) -> &str {
        &self.variable
    }

    pub fn selected(&self) -> &[(usize, String)] {
        &self.selected
    }

    pub fn columns(&self) -> impl Iterator<Item = usize> + '_ {
        self.selected.iter().map(|(c, _)| *c)
    }

    pub fn values(&self) -> impl Iterator<Item = &str> + '_ {
        self.selected.iter().map(|(_, v)| v.as_str())
    }

    pub fn matches(&self, record: &StudyRecord) -> bool {
        record.variable() == self.variable
            && self
                .selected
                .iter()
                .all(|(c, v)| record.condition(*c) == Some(v.as_str()))
    }
}

// Variable first, then the column set, then the values.
impl Ord for SubgroupKey {
    fn cmp(&self, other: &Self) -> Ordering {
        self.variable
            .cmp(&other.variable)
            .then_with(|| self.columns().cmp(other.columns()))
            .then_with(|| self.values().cmp(other.values()))
    }
}

impl PartialOrd for SubgroupKey {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for SubgroupKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}-", self.variable)?;
        for (i, v) in self.values().enumerate() {
            if i > 0 {
                f.write_str("|")?;
            }
            f.write_str(v)?;
        }
        Ok(())
    }
}

/// The studies sharing one [`SubgroupKey`], sorted by study label.
#[derive(Debug, Clone, PartialEq)]
pub struct Subgroup {
    key: SubgroupKey,
    members: Vec<StudyRecord>,
}

impl Subgroup {
    pub fn new(key: SubgroupKey, mut members: Vec<StudyRecord>) -> Result<Self, DomainError> {
        if members.len() < 2 {
            return Err(DomainError::TooFewMembers(members.len()));
        }
        if let Some(m) = members.iter().find(|m| !key.matches(m)) {
            return Err(DomainError::MemberMismatch {
                study: m.study().to_string(),
                key: key.to_string(),
            });
        }
        members.sort_by(|a, b| {
            a.study()
                .cmp(b.study())
                .then_with(|| a.conditions().cmp(b.conditions()))
        });
        if let Some(w) = members
            .windows(2)
            .find(|w| w[0].study() == w[1].study() && w[0].conditions() == w[1].conditions())
        {
            return Err(DomainError::DuplicateMember {
                study: w[0].study().to_string(),
            });
        }
        Ok(Self { key, members })
    }

    pub fn key(&self) -> &SubgroupKey {
        &self.key
    }

    pub fn members(&self) -> &[StudyRecord] {
        &self.members
    }

    /// K, the number of rows pooled in this subgroup.
    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// Display label per member. A study contributing several rows (pooled
    /// over an unselected condition column) gets its free condition values
    /// appended so that every label is distinct.
    pub fn member_labels(&self) -> Vec<String> {
        self.members
            .iter()
            .map(|m| {
                let repeated = self
                    .members
                    .iter()
                    .filter(|o| o.study() == m.study())
                    .count()
                    > 1;
                if !repeated {
                    return m.study().to_string();
                }
                let free: Vec<&str> = m
                    .conditions()
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| !self.key.columns().any(|c| c == i + 1))
                    .map(|(_, v)| v.as_str())
                    .collect();
                format!("{} ({})", m.study(), free.join("|"))
            })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum EffectSizeKind {
    /// Standardized mean difference, Cohen's d.
    Cohen,
    /// Small-sample corrected standardized mean difference, Hedges' g.
    Hedges,
}

impl FromStr for EffectSizeKind {
    type Err = DomainError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "Cohen" => Ok(Self::Cohen),
            "Hedges" => Ok(Self::Hedges),
            other => Err(DomainError::InvalidKind(other.to_string())),
        }
    }
}

impl fmt::Display for EffectSizeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Cohen => "Cohen",
            Self::Hedges => "Hedges",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnalysisConfig {
    alpha: f64,
    kind: EffectSizeKind,
}

impl AnalysisConfig {
    pub fn new(alpha: f64, kind: EffectSizeKind) -> Result<Self, DomainError> {
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(DomainError::InvalidAlpha(alpha));
        }
        Ok(Self { alpha, kind })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn kind(&self) -> EffectSizeKind {
        self.kind
    }
}

impl Default for AnalysisConfig {
    fn default() -> Self {
        Self {
            alpha: 0.05,
            kind: EffectSizeKind::Hedges,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Model {
    FixedEffects,
    RandomEffects,
}

impl Model {
    /// Machine-readable name used in data.csv.
    pub fn as_str(&self) -> &'static str {
        match self {
            Self::FixedEffects => "fixed-effects",
            Self::RandomEffects => "random-effects",
        }
    }

    pub fn title(&self) -> &'static str {
        match self {
            Self::FixedEffects => "Fixed-effects model",
            Self::RandomEffects => "Random-effects model",
        }
    }
}

impl fmt::Display for Model {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Per-study quantities computed for one subgroup.
#[derive(Debug, Clone, PartialEq)]
pub struct StudyEffect {
    pub(crate) label: String,
    pub(crate) record: StudyRecord,
    pub(crate) pooled_sd: f64,
    pub(crate) delta: f64,
    pub(crate) sigma_intra: f64,
    pub(crate) fe_weight: f64,
    pub(crate) weight: f64,
    pub(crate) ci_low: f64,
    pub(crate) ci_high: f64,
}

impl StudyEffect {
    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn record(&self) -> &StudyRecord {
        &self.record
    }

    /// S, the pooled standard deviation of both groups.
    pub fn pooled_sd(&self) -> f64 {
        self.pooled_sd
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    /// Square root of the intra-study variance of `delta`.
    pub fn sigma_intra(&self) -> f64 {
        self.sigma_intra
    }

    pub fn fe_weight(&self) -> f64 {
        self.fe_weight
    }

    /// Weight under the selected model.
    pub fn weight(&self) -> f64 {
        self.weight
    }

    pub fn ci_low(&self) -> f64 {
        self.ci_low
    }

    pub fn ci_high(&self) -> f64 {
        self.ci_high
    }
}

/// Pooled result of one subgroup.
#[derive(Debug, Clone, PartialEq)]
pub struct MetaResult {
    pub(crate) key: SubgroupKey,
    pub(crate) config: AnalysisConfig,
    pub(crate) critical_value: f64,
    pub(crate) effects: Vec<StudyEffect>,
    pub(crate) heterogeneity: HeterogeneityStats,
    pub(crate) model: Model,
    pub(crate) mu: f64,
    pub(crate) sigma: f64,
    pub(crate) ci_low: f64,
    pub(crate) ci_high: f64,
    pub(crate) z: f64,
    pub(crate) p: f64,
}

impl MetaResult {
    pub fn key(&self) -> &SubgroupKey {
        &self.key
    }

    pub fn config(&self) -> &AnalysisConfig {
        &self.config
    }

    /// Φ⁻¹(1 − α/2), the multiplier of every interval half-width.
    pub fn critical_value(&self) -> f64 {
        self.critical_value
    }

    pub fn effects(&self) -> &[StudyEffect] {
        &self.effects
    }

    pub fn k(&self) -> usize {
        self.effects.len()
    }

    pub fn heterogeneity(&self) -> &HeterogeneityStats {
        &self.heterogeneity
    }

    pub fn q(&self) -> f64 {
        self.heterogeneity.q
    }

    pub fn xi(&self) -> f64 {
        self.heterogeneity.xi
    }

    pub fn tau2(&self) -> f64 {
        self.heterogeneity.tau2
    }

    pub fn i2(&self) -> f64 {
        self.heterogeneity.i2
    }

    pub fn model(&self) -> Model {
        self.model
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn ci_low(&self) -> f64 {
        self.ci_low
    }

    pub fn ci_high(&self) -> f64 {
        self.ci_high
    }

    pub fn z(&self) -> f64 {
        self.z
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    /// Weights of the selected model divided by their sum.
    pub fn normalized_weights(&self) -> Vec<f64> {
        let total = crate::engine::sum::compensated_sum(self.effects.iter().map(|e| e.weight));
        self.effects.iter().map(|e| e.weight / total).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn raw<'a>(n1: &'a str, sd2: &'a str) -> RawRecord<'a> {
        RawRecord {
            study: "Kwok, 2015",
            variable: "AP mean velocity",
            n_1: n1,
            n_2: "55",
            mean_1: "1.27",
            std_1: "0.45",
            mean_2: "1.02",
            std_2: sd2,
            conditions: vec!["EO", "Retro"],
        }
    }

    #[test]
    fn kwok_row_validates() {
        let rec = validate_record(&raw("18", "0.26")).unwrap();
        assert_eq!(rec.study(), "Kwok, 2015");
        assert_eq!(rec.group1().n(), 18);
        assert_eq!(rec.group1().mean(), 1.27);
        assert_eq!(rec.group2().sd(), 0.26);
        assert_eq!(rec.conditions(), ["EO", "Retro"]);
        assert_eq!(rec.condition(2), Some("Retro"));
        assert_eq!(rec.condition(0), None);
    }

    #[test]
    fn count_below_two_is_rejected() {
        assert!(matches!(
            validate_record(&raw("1", "0.26")),
            Err(DomainError::NonPositiveCount { field: "n_1", .. })
        ));
        assert!(matches!(
            validate_record(&raw("0", "0.26")),
            Err(DomainError::NonPositiveCount { .. })
        ));
    }

    #[test]
    fn negative_sd_is_rejected() {
        assert!(matches!(
            validate_record(&raw("18", "-0.1")),
            Err(DomainError::NegativeSd { field: "std_2", .. })
        ));
    }

    #[test]
    fn bad_numbers_are_classified() {
        assert!(matches!(
            validate_record(&raw("18", "NaN")),
            Err(DomainError::NonFiniteNumber { .. })
        ));
        assert!(matches!(
            validate_record(&raw("18", "inf")),
            Err(DomainError::NonFiniteNumber { .. })
        ));
        assert!(matches!(
            validate_record(&raw("18", "0,26")),
            Err(DomainError::CommaDecimal { field: "std_2", .. })
        ));
        assert!(matches!(
            validate_record(&raw("18.5", "0.26")),
            Err(DomainError::InvalidNumber { field: "n_1", .. })
        ));
        assert!(matches!(
            validate_record(&raw("18", "abc")),
            Err(DomainError::InvalidNumber { .. })
        ));
    }

    #[test]
    fn zero_sd_is_accepted_at_ingestion() {
        assert!(validate_record(&raw("18", "0")).is_ok());
    }

    #[test]
    fn empty_labels_are_rejected() {
        let mut r = raw("18", "0.26");
        r.study = "  ";
        assert!(matches!(
            validate_record(&r),
            Err(DomainError::EmptyLabel { .. })
        ));
        let mut r = raw("18", "0.26");
        r.conditions = vec!["EO", ""];
        assert_eq!(
            validate_record(&r),
            Err(DomainError::EmptyLabel {
                field: "condition_2".into()
            })
        );
    }

    #[test]
    fn key_validation_and_order() {
        assert_eq!(
            SubgroupKey::new("X", vec![]),
            Err(DomainError::EmptySelection)
        );
        assert_eq!(
            SubgroupKey::new("X", vec![(2, "a".into()), (1, "b".into())]),
            Err(DomainError::BadColumnOrder)
        );
        assert_eq!(
            SubgroupKey::new("X", vec![(0, "a".into())]),
            Err(DomainError::BadColumnOrder)
        );

        let k = |sel: &[(usize, &str)]| {
            SubgroupKey::new("X", sel.iter().map(|(c, v)| (*c, v.to_string())).collect()).unwrap()
        };
        // column set dominates values
        assert!(k(&[(1, "EO")]) < k(&[(1, "EC"), (2, "Pro")]));
        assert!(k(&[(1, "EC"), (2, "Pro")]) < k(&[(2, "Pro")]));
        assert!(k(&[(1, "EC")]) < k(&[(1, "EO")]));
        assert_eq!(k(&[(1, "EC"), (2, "Pro")]), k(&[(1, "EC"), (2, "Pro")]));
        assert_eq!(k(&[(1, "EC"), (2, "Retro")]).to_string(), "X-EC|Retro");
    }

    #[test]
    fn alpha_bounds() {
        assert!(AnalysisConfig::new(0.0, EffectSizeKind::Hedges).is_err());
        assert!(AnalysisConfig::new(1.0, EffectSizeKind::Hedges).is_err());
        assert!(AnalysisConfig::new(f64::NAN, EffectSizeKind::Hedges).is_err());
        assert!(AnalysisConfig::new(0.01, EffectSizeKind::Cohen).is_ok());
    }

    #[test]
    fn kind_parsing_is_case_sensitive() {
        assert_eq!(
            "Hedges".parse::<EffectSizeKind>(),
            Ok(EffectSizeKind::Hedges)
        );
        assert_eq!("Cohen".parse::<EffectSizeKind>(), Ok(EffectSizeKind::Cohen));
        assert!("hedges".parse::<EffectSizeKind>().is_err());
        assert!("Tukey".parse::<EffectSizeKind>().is_err());
    }

    fn rec(study: &str, conds: &[&str]) -> StudyRecord {
        let g = GroupStats::new(10, 1.0, 1.0).unwrap();
        StudyRecord::new(
            study,
            "X",
            g,
            g,
            conds.iter().map(|s| s.to_string()).collect(),
        )
        .unwrap()
    }

    #[test]
    fn subgroup_invariants() {
        let key = SubgroupKey::new("X", vec![(2, "Retro".into())]).unwrap();
        assert_eq!(
            Subgroup::new(key.clone(), vec![rec("A", &["EO", "Retro"])]),
            Err(DomainError::TooFewMembers(1))
        );
        assert!(matches!(
            Subgroup::new(
                key.clone(),
                vec![rec("A", &["EO", "Retro"]), rec("B", &["EO", "Pro"])]
            ),
            Err(DomainError::MemberMismatch { .. })
        ));
        assert!(matches!(
            Subgroup::new(
                key.clone(),
                vec![rec("A", &["EO", "Retro"]), rec("A", &["EO", "Retro"])]
            ),
            Err(DomainError::DuplicateMember { .. })
        ));
        let sg = Subgroup::new(
            key,
            vec![
                rec("B", &["EO", "Retro"]),
                rec("A", &["EO", "Retro"]),
                rec("A", &["EC", "Retro"]),
            ],
        )
        .unwrap();
        assert_eq!(sg.len(), 3);
        assert_eq!(sg.member_labels(), ["A (EC)", "A (EO)", "B"]);
    }
}
