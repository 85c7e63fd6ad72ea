//! Strict reader for the semicolon-separated study table.
//!
//! The header must read exactly
//! `study;variable;n_1;n_2;mean_1;std_1;mean_2;std_2;condition_1[;condition_2;…]`.
//! Fields are separated by `;`, decimals use `.`, and there is no quoting.

use std::collections::{BTreeSet, HashMap};
use std::fmt::{self, Write as _};

use thiserror::Error;

use crate::domain::{validate_record, DomainError, RawRecord, StudyRecord};

const FIXED_COLUMNS: [&str; 8] = [
    "study", "variable", "n_1", "n_2", "mean_1", "std_1", "mean_2", "std_2",
];

#[derive(Debug, Clone, PartialEq, Error)]
pub enum IngestErrorKind {
    #[error("input is not valid UTF-8")]
    NotUtf8,
    #[error("bad header: {0}")]
    BadHeader(String),
    #[error("fields are separated by commas; use semicolons")]
    BadSeparator,
    #[error("line ends with a semicolon")]
    TrailingSeparator,
    #[error("empty value in column {column}")]
    EmptyConditionValue { column: String },
    #[error("expected {expected} fields, found {found}")]
    RaggedRow { expected: usize, found: usize },
    #[error("duplicate of line {first_line} (same study, variable and conditions)")]
    DuplicateKey { first_line: usize },
    #[error(transparent)]
    Record(#[from] DomainError),
}

/// An ingestion failure with the 1-based line it occurred on.
#[derive(Debug, Clone, PartialEq, Error)]
#[error("line {line}: {kind}")]
pub struct IngestError {
    pub line: usize,
    pub kind: IngestErrorKind,
}

impl IngestError {
    fn at(line: usize, kind: impl Into<IngestErrorKind>) -> Self {
        Self {
            line,
            kind: kind.into(),
        }
    }
}

/// Parsed study table, in file order.
#[derive(Debug, Clone, PartialEq)]
pub struct InputTable {
    records: Vec<StudyRecord>,
    condition_column_names: Vec<String>,
}

impl InputTable {
    pub fn records(&self) -> &[StudyRecord] {
        &self.records
    }

    pub fn condition_column_names(&self) -> &[String] {
        &self.condition_column_names
    }

    pub fn condition_column_count(&self) -> usize {
        self.condition_column_names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    /// Writes the table back in the input format, one LF-terminated line per
    /// record. Numbers use the shortest representation that parses back to
    /// the same value.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        let mut header: Vec<&str> = FIXED_COLUMNS.to_vec();
        header.extend(self.condition_column_names.iter().map(String::as_str));
        out.push_str(&header.join(";"));
        out.push('\n');
        for r in &self.records {
            let _ = write!(
                out,
                "{};{};{};{};{};{};{};{}",
                r.study(),
                r.variable(),
                r.group1().n(),
                r.group2().n(),
                r.group1().mean(),
                r.group1().sd(),
                r.group2().mean(),
                r.group2().sd()
            );
            for c in r.conditions() {
                out.push(';');
                out.push_str(c);
            }
            out.push('\n');
        }
        out
    }
}

fn check_header(line: &str) -> Result<Vec<String>, IngestErrorKind> {
    if !line.contains(';') && line.contains(',') {
        return Err(IngestErrorKind::BadSeparator);
    }
    if line.ends_with(';') {
        return Err(IngestErrorKind::TrailingSeparator);
    }
    let fields: Vec<&str> = line.split(';').map(str::trim).collect();
    if fields.len() < FIXED_COLUMNS.len() + 1 {
        return Err(IngestErrorKind::BadHeader(format!(
            "expected at least {} columns, found {}",
            FIXED_COLUMNS.len() + 1,
            fields.len()
        )));
    }
    for (i, (found, want)) in fields.iter().zip(FIXED_COLUMNS).enumerate() {
        if *found != want {
            return Err(IngestErrorKind::BadHeader(format!(
                "column {} must be {want:?}, found {found:?}",
                i + 1
            )));
        }
    }
    let mut names = Vec::new();
    for (i, found) in fields[FIXED_COLUMNS.len()..].iter().enumerate() {
        let want = format!("condition_{}", i + 1);
        if *found != want {
            return Err(IngestErrorKind::BadHeader(format!(
                "column {} must be {want:?}, found {found:?}",
                FIXED_COLUMNS.len() + i + 1
            )));
        }
        names.push(want);
    }
    Ok(names)
}

fn parse_line(line: &str, condition_names: &[String]) -> Result<StudyRecord, IngestErrorKind> {
    let expected = FIXED_COLUMNS.len() + condition_names.len();
    if line.ends_with(';') {
        return Err(IngestErrorKind::TrailingSeparator);
    }
    let fields: Vec<&str> = line.split(';').map(str::trim).collect();
    if fields.len() != expected {
        if fields.len() < expected && line.split(',').count() >= expected {
            return Err(IngestErrorKind::BadSeparator);
        }
        return Err(IngestErrorKind::RaggedRow {
            expected,
            found: fields.len(),
        });
    }
    let conditions = &fields[FIXED_COLUMNS.len()..];
    if let Some(i) = conditions.iter().position(|c| c.is_empty()) {
        return Err(IngestErrorKind::EmptyConditionValue {
            column: condition_names[i].clone(),
        });
    }
    let raw = RawRecord {
        study: fields[0],
        variable: fields[1],
        n_1: fields[2],
        n_2: fields[3],
        mean_1: fields[4],
        std_1: fields[5],
        mean_2: fields[6],
        std_2: fields[7],
        conditions: conditions.to_vec(),
    };
    Ok(validate_record(&raw)?)
}

/// Parses a whole input file. LF and CRLF line endings are both accepted and
/// blank lines are ignored.
pub fn parse_input(bytes: &[u8]) -> Result<InputTable, IngestError> {
    let text = std::str::from_utf8(bytes).map_err(|e| {
        let line = bytes[..e.valid_up_to()]
            .iter()
            .filter(|&&b| b == b'\n')
            .count()
            + 1;
        IngestError::at(line, IngestErrorKind::NotUtf8)
    })?;
    let text = text.strip_prefix('\u{feff}').unwrap_or(text);

    let mut lines = text
        .split('\n')
        .map(|l| l.strip_suffix('\r').unwrap_or(l).trim_end());
    let header = lines.next().unwrap_or("");
    let condition_names = check_header(header).map_err(|k| IngestError::at(1, k))?;

    let mut records = Vec::new();
    let mut seen: HashMap<(String, String, Vec<String>), usize> = HashMap::new();
    for (idx, line) in lines.enumerate() {
        let lineno = idx + 2;
        if line.trim().is_empty() {
            continue;
        }
        let rec = parse_line(line, &condition_names).map_err(|k| IngestError::at(lineno, k))?;
        let key = (
            rec.study().to_string(),
            rec.variable().to_string(),
            rec.conditions().to_vec(),
        );
        if let Some(&first_line) = seen.get(&key) {
            return Err(IngestError::at(
                lineno,
                IngestErrorKind::DuplicateKey { first_line },
            ));
        }
        seen.insert(key, lineno);
        records.push(rec);
    }
    Ok(InputTable {
        records,
        condition_column_names: condition_names,
    })
}

struct Plural<'a>(usize, &'a str, &'a str);

impl fmt::Display for Plural<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} {}",
            self.0,
            if self.0 == 1 { self.1 } else { self.2 }
        )
    }
}

/// One-line human description of a table, e.g.
/// `12 rows, 7 studies, 1 variable, condition_1: {EO, EC}, condition_2: {Retro, Pro}`.
/// Values are listed in order of first appearance.
pub fn summarize_table(table: &InputTable) -> String {
    if table.is_empty() {
        return "0 rows".to_string();
    }
    let studies: BTreeSet<&str> = table.records.iter().map(|r| r.study()).collect();
    let variables: BTreeSet<&str> = table.records.iter().map(|r| r.variable()).collect();
    let mut out = format!(
        "{}, {}, {}",
        Plural(table.records.len(), "row", "rows"),
        Plural(studies.len(), "study", "studies"),
        Plural(variables.len(), "variable", "variables")
    );
    for (i, name) in table.condition_column_names.iter().enumerate() {
        let mut values: Vec<&str> = Vec::new();
        for r in &table.records {
            let v = r.conditions()[i].as_str();
            if !values.contains(&v) {
                values.push(v);
            }
        }
        let _ = write!(out, ", {name}: {{{}}}", values.join(", "));
    }
    out
}
