//! Per-subgroup output artifacts and the run manifest.

mod data_csv;
mod figure;
mod forest;
mod format;
mod funnel;

use std::collections::HashMap;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};
use std::process::Command;

use serde::Serialize;
use thiserror::Error;

use crate::domain::{MetaResult, SubgroupKey};

pub use data_csv::emit_data_csv;
pub use figure::{Anchor, Figure, Label, Scale, Shape};
pub use forest::{emit_forest, forest_figure};
pub use format::{escape_latex, escape_xml, sig6};
pub use funnel::{emit_funnel, funnel_figure, FunnelLayout};

pub const MANIFEST_FILE: &str = "manifest.json";
const DATA_FILE: &str = "data.csv";
const FOREST_SVG: &str = "forest_plot.svg";
const FOREST_TEX: &str = "forest_plot.tex";
const FUNNEL_SVG: &str = "funnel_plot.svg";
const FUNNEL_TEX: &str = "funnel_plot.tex";

#[derive(Debug, Error)]
pub enum ReportError {
    #[error("cannot write {}: {source}", path.display())]
    IoFailure {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error("pdflatex failed on {}", path.display())]
    LatexFailed { path: PathBuf },
    #[error("cannot serialize manifest: {0}")]
    Manifest(#[from] serde_json::Error),
}

fn io_err(path: &Path) -> impl FnOnce(io::Error) -> ReportError + '_ {
    move |source| ReportError::IoFailure {
        path: path.to_path_buf(),
        source,
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct OutputOptions {
    /// Run `pdflatex` on each figure source.
    pub compile_pdf: bool,
}

/// Paths (relative to the output root) of everything written for one
/// subgroup.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SubgroupReport {
    pub folder: PathBuf,
    pub data_table: PathBuf,
    pub forest_vector: PathBuf,
    pub forest_source: PathBuf,
    pub funnel_vector: PathBuf,
    pub funnel_source: PathBuf,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub forest_pdf: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub funnel_pdf: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConditionValue {
    pub column: usize,
    pub value: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ManifestEntry {
    pub name: String,
    pub variable: String,
    pub conditions: Vec<ConditionValue>,
    pub k: usize,
    pub model: String,
    pub files: SubgroupReport,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SkippedEntry {
    pub name: String,
    pub variable: String,
    pub conditions: Vec<ConditionValue>,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Manifest {
    pub subgroups: Vec<ManifestEntry>,
    pub skipped: Vec<SkippedEntry>,
}

fn conditions_of(key: &SubgroupKey) -> Vec<ConditionValue> {
    key.selected()
        .iter()
        .map(|(column, value)| ConditionValue {
            column: *column,
            value: value.clone(),
        })
        .collect()
}

/// Makes a subgroup name safe as a single path component. `%` and characters
/// the platform forbids are written as `%XX` (UTF-8 bytes, upper-case hex).
pub fn encode_folder_name(name: &str) -> String {
    if name == "." || name == ".." {
        return name.replace('.', "%2E");
    }
    let mut out = String::with_capacity(name.len());
    for c in name.chars() {
        if c == '%' || c == '/' || c.is_control() || (cfg!(windows) && r#"<>:"\|?*"#.contains(c)) {
            let mut buf = [0u8; 4];
            for b in c.encode_utf8(&mut buf).bytes() {
                out.push_str(&format!("%{b:02X}"));
            }
        } else {
            out.push(c);
        }
    }
    out
}

/// Folder names for `keys`, in order. Two keys can render to the same name
/// (e.g. a variable containing `-`); later ones get a `~2`, `~3`, … suffix.
fn unique_folders<'a>(keys: impl Iterator<Item = &'a SubgroupKey>) -> Vec<String> {
    let mut seen: HashMap<String, usize> = HashMap::new();
    keys.map(|key| {
        let base = encode_folder_name(&key.to_string());
        let n = seen.entry(base.clone()).or_insert(0);
        *n += 1;
        if *n == 1 {
            base
        } else {
            format!("{base}~{n}")
        }
    })
    .collect()
}

/// Writes every artifact under `root` and returns the manifest, which is
/// also saved as `root/manifest.json`.
pub fn write_outputs(
    results: &[MetaResult],
    skipped: &[(SubgroupKey, String)],
    root: &Path,
) -> Result<Manifest, ReportError> {
    write_outputs_with(results, skipped, root, &OutputOptions::default())
}

pub fn write_outputs_with(
    results: &[MetaResult],
    skipped: &[(SubgroupKey, String)],
    root: &Path,
    options: &OutputOptions,
) -> Result<Manifest, ReportError> {
    fs::create_dir_all(root).map_err(io_err(root))?;
    let folders = unique_folders(results.iter().map(|r| r.key()));

    let mut subgroups = Vec::with_capacity(results.len());
    for (result, folder) in results.iter().zip(folders) {
        let files = write_subgroup(result, root, Path::new(&folder), options)?;
        subgroups.push(ManifestEntry {
            name: result.key().to_string(),
            variable: result.key().variable().to_string(),
            conditions: conditions_of(result.key()),
            k: result.k(),
            model: result.model().to_string(),
            files,
        });
    }
    let skipped = skipped
        .iter()
        .map(|(key, reason)| SkippedEntry {
            name: key.to_string(),
            variable: key.variable().to_string(),
            conditions: conditions_of(key),
            reason: reason.clone(),
        })
        .collect();

    let manifest = Manifest { subgroups, skipped };
    let path = root.join(MANIFEST_FILE);
    let mut json = serde_json::to_string_pretty(&manifest)?;
    json.push('\n');
    fs::write(&path, json).map_err(io_err(&path))?;
    Ok(manifest)
}

fn write_subgroup(
    result: &MetaResult,
    root: &Path,
    folder: &Path,
    options: &OutputOptions,
) -> Result<SubgroupReport, ReportError> {
    let dir = root.join(folder);
    fs::create_dir_all(&dir).map_err(io_err(&dir))?;
    let put = |name: &str, contents: &str| -> Result<PathBuf, ReportError> {
        let path = dir.join(name);
        fs::write(&path, contents).map_err(io_err(&path))?;
        Ok(folder.join(name))
    };

    let (forest_svg, forest_tex) = emit_forest(result);
    let (funnel_svg, funnel_tex) = emit_funnel(result);
    let mut report = SubgroupReport {
        folder: folder.to_path_buf(),
        data_table: put(DATA_FILE, &emit_data_csv(result))?,
        forest_vector: put(FOREST_SVG, &forest_svg)?,
        forest_source: put(FOREST_TEX, &forest_tex)?,
        funnel_vector: put(FUNNEL_SVG, &funnel_svg)?,
        funnel_source: put(FUNNEL_TEX, &funnel_tex)?,
        forest_pdf: None,
        funnel_pdf: None,
    };
    if options.compile_pdf {
        report.forest_pdf = Some(folder.join(compile_pdf(&dir, FOREST_TEX)?));
        report.funnel_pdf = Some(folder.join(compile_pdf(&dir, FUNNEL_TEX)?));
    }
    Ok(report)
}

/// Runs pdflatex in `dir` and removes its auxiliary files. Returns the PDF
/// file name.
fn compile_pdf(dir: &Path, tex: &str) -> Result<String, ReportError> {
    let source = dir.join(tex);
    let status = Command::new("pdflatex")
        .args(["-interaction=nonstopmode", "-halt-on-error", tex])
        .current_dir(dir)
        .output()
        .map_err(io_err(&source))?
        .status;
    let stem = tex.trim_end_matches(".tex");
    for ext in ["aux", "log"] {
        let _ = fs::remove_file(dir.join(format!("{stem}.{ext}")));
    }
    if !status.success() {
        return Err(ReportError::LatexFailed { path: source });
    }
    Ok(format!("{stem}.pdf"))
}
