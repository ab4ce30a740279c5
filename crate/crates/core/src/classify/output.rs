//! Run directory layout:
//!
//! - `manifest.json`: parameters, seed and solution counts, completion flag.
//! - `checkpoint.jsonl`: one line per finished seed (`seed`, `solutions`,
//!   and per certificate the least solution as `[block index, multiplicity]`
//!   pairs, block indices into the lexicographic co-clique list). A rerun on
//!   the same directory skips seeds already listed.
//! - `index.json` and `squares/class_NNNNN.json`: written once every seed is done.

use std::fs::{self, File, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::{Classification, DepthPolicy, SeedResult};
use crate::design::EtaVector;
use crate::error::{Error, Result};
use crate::sls::SemiLatinSquare;

const MANIFEST: &str = "manifest.json";
const CHECKPOINT: &str = "checkpoint.jsonl";
const INDEX: &str = "index.json";
const SQUARES: &str = "squares";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub n: usize,
    pub mu: u32,
    pub min_depth: usize,
    pub seed_count: usize,
    pub seeds_done: usize,
    pub solution_count: u64,
    pub class_count: Option<usize>,
    pub complete: bool,
    pub wall_time_secs: f64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IndexEntry {
    pub class: usize,
    pub eta: Vec<u64>,
    pub aut_square: u128,
    pub aut_dual: u128,
    pub transposing_automorphism: bool,
    pub certificate: String,
    pub file: String,
}

pub(crate) struct RunDir {
    dir: PathBuf,
    completed: Vec<SeedResult>,
}

impl RunDir {
    pub(crate) fn open(dir: &Path, n: usize, mu: u32, policy: DepthPolicy, seed_count: usize) -> Result<Self> {
        fs::create_dir_all(dir)?;
        if let Some(m) = read_manifest(dir)? {
            if (m.n, m.mu, m.min_depth, m.seed_count) != (n, mu, policy.min_depth, seed_count) {
                return Err(Error::Checkpoint(format!(
                    "{} holds a run for n={}, mu={}, min_depth={} with {} seeds",
                    dir.display(),
                    m.n,
                    m.mu,
                    m.min_depth,
                    m.seed_count
                )));
            }
        }
        let mut completed: Vec<SeedResult> = Vec::new();
        let path = dir.join(CHECKPOINT);
        if path.exists() {
            let lines: Vec<String> = BufReader::new(File::open(&path)?).lines().collect::<std::io::Result<_>>()?;
            let last = lines.len().saturating_sub(1);
            for (i, line) in lines.iter().enumerate() {
                if line.trim().is_empty() {
                    continue;
                }
                match serde_json::from_str::<SeedResult>(line) {
                    Ok(r) if r.seed < seed_count => {
                        if !completed.iter().any(|c| c.seed == r.seed) {
                            completed.push(r);
                        }
                    }
                    Ok(r) => return Err(Error::Checkpoint(format!("seed {} out of range", r.seed))),
                    // a run killed mid-write leaves a torn final line
                    Err(_) if i == last => {}
                    Err(e) => return Err(Error::Checkpoint(format!("line {}: {e}", i + 1))),
                }
            }
        }
        Ok(RunDir { dir: dir.to_path_buf(), completed })
    }

    pub(crate) fn completed(&self) -> &[SeedResult] {
        &self.completed
    }

    pub(crate) fn checkpoint_writer(&self) -> Result<File> {
        Ok(OpenOptions::new().create(true).append(true).open(self.dir.join(CHECKPOINT))?)
    }

    pub(crate) fn finish(&self, run: &Classification, policy: DepthPolicy, wall: f64) -> Result<()> {
        let complete = run.complete();
        if complete {
            let squares = self.dir.join(SQUARES);
            fs::create_dir_all(&squares)?;
            let mut index = Vec::with_capacity(run.classes.len());
            for (i, rep) in run.classes.iter().enumerate() {
                let file = format!("{SQUARES}/class_{:05}.json", i + 1);
                fs::write(self.dir.join(&file), serde_json::to_string(&rep.square)? + "\n")?;
                index.push(IndexEntry {
                    class: i + 1,
                    eta: rep.eta.0.clone(),
                    aut_square: rep.aut_square,
                    aut_dual: rep.aut_dual,
                    transposing_automorphism: rep.transposing_automorphism,
                    certificate: rep.certificate.to_hex(),
                    file,
                });
            }
            fs::write(self.dir.join(INDEX), serde_json::to_string_pretty(&index)? + "\n")?;
        }
        let manifest = Manifest {
            n: run.n,
            mu: run.mu,
            min_depth: policy.min_depth,
            seed_count: run.seed_count,
            seeds_done: run.seeds_done,
            solution_count: run.solution_count,
            class_count: complete.then_some(run.classes.len()),
            complete,
            wall_time_secs: wall,
        };
        fs::write(self.dir.join(MANIFEST), serde_json::to_string_pretty(&manifest)? + "\n")?;
        Ok(())
    }
}

pub(crate) fn append_checkpoint(w: &mut File, r: &SeedResult) -> Result<()> {
    let line = serde_json::to_string(r)? + "\n";
    w.write_all(line.as_bytes())?;
    w.flush()?;
    Ok(())
}

fn read_manifest(dir: &Path) -> Result<Option<Manifest>> {
    let path = dir.join(MANIFEST);
    if !path.exists() {
        return Ok(None);
    }
    Ok(Some(serde_json::from_str(&fs::read_to_string(path)?)?))
}

/// Summary statistics over a finished classification.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CatalogSummary {
    pub class_count: usize,
    pub best_eta: Option<Vec<u64>>,
    pub next_eta: Option<Vec<u64>>,
    pub worst_eta: Option<Vec<u64>>,
    pub nontrivial_dual_aut: usize,
    pub max_concurrence_at_most_2: usize,
    /// Squares with at least one pair of treatments of full concurrence.
    pub full_concurrence_pair: usize,
    /// Squares with at least two such pairs.
    pub full_concurrence_two_pairs: usize,
    pub transposing_automorphism: usize,
}

#[derive(Debug, Clone)]
pub struct Catalog {
    pub manifest: Manifest,
    pub entries: Vec<IndexEntry>,
    pub summary: CatalogSummary,
}

impl Catalog {
    /// Loads the representative square of a class (1-based id).
    pub fn square(&self, dir: &Path, class: usize) -> Result<SemiLatinSquare> {
        let e = self
            .entries
            .get(class.wrapping_sub(1))
            .ok_or_else(|| Error::InvalidParameter(format!("no class {class}")))?;
        Ok(serde_json::from_str(&fs::read_to_string(dir.join(&e.file))?)?)
    }
}

/// Reads a finished run directory.
pub fn catalog(dir: &Path) -> Result<Catalog> {
    let manifest =
        read_manifest(dir)?.ok_or_else(|| Error::Checkpoint(format!("{} has no {MANIFEST}", dir.display())))?;
    if !manifest.complete {
        return Err(Error::Checkpoint(format!(
            "run incomplete: {} of {} seeds done",
            manifest.seeds_done, manifest.seed_count
        )));
    }
    let entries: Vec<IndexEntry> = serde_json::from_str(&fs::read_to_string(dir.join(INDEX))?)?;
    if Some(entries.len()) != manifest.class_count {
        return Err(Error::Checkpoint("index and manifest disagree on the class count".into()));
    }
    let full = manifest.n;
    let summary = CatalogSummary {
        class_count: entries.len(),
        best_eta: entries.first().map(|e| e.eta.clone()),
        next_eta: entries.get(1).map(|e| e.eta.clone()),
        worst_eta: entries.last().map(|e| e.eta.clone()),
        nontrivial_dual_aut: entries.iter().filter(|e| e.aut_dual > 1).count(),
        max_concurrence_at_most_2: entries.iter().filter(|e| EtaVector(e.eta.clone()).max_concurrence() <= 2).count(),
        full_concurrence_pair: entries.iter().filter(|e| e.eta.get(full).is_some_and(|&x| x >= 1)).count(),
        full_concurrence_two_pairs: entries.iter().filter(|e| e.eta.get(full).is_some_and(|&x| x >= 2)).count(),
        transposing_automorphism: entries.iter().filter(|e| e.transposing_automorphism).count(),
    };
    Ok(Catalog { manifest, entries, summary })
}
