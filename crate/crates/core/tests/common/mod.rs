#![allow(dead_code)]

pub mod oracle;

use std::fs;
use std::path::{Path, PathBuf};

use metacond::{GroupStats, StudyRecord, Subgroup, SubgroupKey};
use rand::Rng;
use sha2::{Digest, Sha256};

use oracle::OracleStudy;

pub fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(name)
}

pub fn fixture_bytes(name: &str) -> Vec<u8> {
    fs::read(fixture(name)).unwrap_or_else(|e| panic!("{name}: {e}"))
}

/// Random study with sizes in [2, 300] and strictly positive standard
/// deviations.
pub fn random_study(rng: &mut impl Rng) -> OracleStudy {
    let scale = 10f64.powf(rng.gen_range(-2.0..3.0));
    OracleStudy {
        n1: rng.gen_range(2..=300) as f64,
        mean1: rng.gen_range(-3.0..3.0) * scale,
        sd1: rng.gen_range(0.2..2.0) * scale,
        n2: rng.gen_range(2..=300) as f64,
        mean2: rng.gen_range(-3.0..3.0) * scale,
        sd2: rng.gen_range(0.2..2.0) * scale,
    }
}

pub fn random_studies(rng: &mut impl Rng, k: usize) -> Vec<OracleStudy> {
    (0..k).map(|_| random_study(rng)).collect()
}

pub fn record(name: &str, s: &OracleStudy) -> StudyRecord {
    StudyRecord::new(
        name,
        "V",
        GroupStats::new(s.n1 as u32, s.mean1, s.sd1).unwrap(),
        GroupStats::new(s.n2 as u32, s.mean2, s.sd2).unwrap(),
        vec!["c".to_string()],
    )
    .unwrap()
}

/// Subgroup `V-c` with studies named `S000`, `S001`, … in input order, so
/// member order equals input order.
pub fn subgroup(studies: &[OracleStudy]) -> Subgroup {
    let key = SubgroupKey::new("V", vec![(1, "c".to_string())]).unwrap();
    let members = studies
        .iter()
        .enumerate()
        .map(|(i, s)| record(&format!("S{i:03}"), s))
        .collect();
    Subgroup::new(key, members).unwrap()
}

pub fn key(variable: &str, selected: &[(usize, &str)]) -> SubgroupKey {
    SubgroupKey::new(
        variable,
        selected.iter().map(|(c, v)| (*c, v.to_string())).collect(),
    )
    .unwrap()
}

/// Every regular file under `root`, as sorted relative paths.
pub fn files_under(root: &Path) -> Vec<PathBuf> {
    fn walk(dir: &Path, root: &Path, out: &mut Vec<PathBuf>) {
        for entry in fs::read_dir(dir).unwrap() {
            let path = entry.unwrap().path();
            if path.is_dir() {
                walk(&path, root, out);
            } else {
                out.push(path.strip_prefix(root).unwrap().to_path_buf());
            }
        }
    }
    let mut out = Vec::new();
    walk(root, root, &mut out);
    out.sort();
    out
}

/// SHA-256 over every file path and content under `root`.
pub fn tree_hash(root: &Path) -> String {
    let mut h = Sha256::new();
    for rel in files_under(root) {
        h.update(rel.to_string_lossy().as_bytes());
        h.update([0]);
        let bytes = fs::read(root.join(&rel)).unwrap();
        h.update((bytes.len() as u64).to_le_bytes());
        h.update(&bytes);
    }
    h.finalize().iter().map(|b| format!("{b:02x}")).collect()
}
