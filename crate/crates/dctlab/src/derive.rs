//! Parallel greedy derivation with an append-only checkpoint ledger.
//!
//! The ledger starts with `#` header lines that pin the configuration, then
//! holds one line per finished sequence:
//!
//! ```text
//! seq 2,3,4,6,7,8 ok 1 1 1 1 1 1 1 1/1 1 1 0 0 -1 -1 -1/... tie 3 0.7297 0,1,0,0,0,0,-1,0 1,1,0,0,0,0,-1,-1:2.2e-16
//! seq 2,3,4,6,8,7 infeasible 7
//! ```
//!
//! Rows are written in the matrix text format with `/` between rows. Row
//! labels are 1-based. A record is only trusted once its newline is on disk,
//! so a run killed mid-write resumes cleanly.

use std::collections::BTreeMap;
use std::fs::{File, OpenOptions};
use std::io::{Read, Seek, SeekFrom, Write};
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use anyhow::{anyhow, bail, Context, Result};
use dctlab_core::linalg::{exact_dct_matrix, IntMatrix};
use dctlab_core::search::{aggregate, enumerate_sequences, Derivation, GreedySolver, PermutationSequence, SearchSpace, Solution, TieEvent, TiePolicy, DIM};
use dctlab_core::Error as CoreError;
use rayon::prelude::*;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum EntrySet {
    D1,
    D2,
}

impl EntrySet {
    pub fn as_str(&self) -> &'static str {
        match self {
            EntrySet::D1 => "d1",
            EntrySet::D2 => "d2",
        }
    }

    pub fn space(&self) -> SearchSpace {
        match self {
            EntrySet::D1 => SearchSpace::d1(),
            EntrySet::D2 => SearchSpace::d2(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct DeriveConfig {
    pub set: EntrySet,
    /// 0-based fixed rows.
    pub fixed: Vec<usize>,
    pub policy: TiePolicy,
    /// Worker threads; 0 lets rayon choose.
    pub workers: usize,
    pub checkpoint: Option<PathBuf>,
    /// Stop once this many new sequences have been recorded.
    pub stop_after: Option<usize>,
}

#[derive(Debug)]
pub enum DeriveOutcome {
    Complete(Derivation),
    Interrupted { done: usize, total: usize },
}

type Outcome = std::result::Result<Solution, usize>;

fn header(cfg: &DeriveConfig, total: usize) -> String {
    let fixed: Vec<String> = cfg.fixed.iter().map(|r| (r + 1).to_string()).collect();
    format!(
        "# dctlab derive checkpoint v1\n# set {}\n# tie-policy {}\n# fixed {}\n# sequences {total}\n",
        cfg.set.as_str(),
        cfg.policy.as_str(),
        if fixed.is_empty() { "-".to_string() } else { fixed.join(",") },
    )
}

fn join_ints<T: ToString>(v: impl IntoIterator<Item = T>, sep: &str) -> String {
    v.into_iter().map(|x| x.to_string()).collect::<Vec<_>>().join(sep)
}

fn format_record(seq: &PermutationSequence, outcome: &Outcome) -> String {
    let mut s = format!("seq {}", join_ints(seq.one_based(), ","));
    match outcome {
        Ok(sol) => {
            let rows: Vec<String> = (0..sol.matrix.rows()).map(|i| join_ints(sol.matrix.row(i).iter(), " ")).collect();
            s.push_str(" ok ");
            s.push_str(&rows.join("/"));
            for t in &sol.ties {
                let rivals = if t.rivals.is_empty() {
                    "-".to_string()
                } else {
                    t.rivals.iter().map(|(v, d)| format!("{}:{d:e}", join_ints(v.iter(), ","))).collect::<Vec<_>>().join(";")
                };
                s.push_str(&format!(" tie {} {:e} {} {rivals}", t.row + 1, t.angle, join_ints(t.chosen.iter(), ",")));
            }
        }
        Err(row) => s.push_str(&format!(" infeasible {}", row + 1)),
    }
    s.push('\n');
    s
}

fn parse_vec8(s: &str) -> Result<[i32; DIM]> {
    let v: Vec<i32> = s.split(',').map(str::parse).collect::<std::result::Result<_, _>>()?;
    v.try_into().map_err(|_| anyhow!("expected {DIM} entries in `{s}`"))
}

fn parse_label(s: &str) -> Result<usize> {
    s.parse::<usize>()?.checked_sub(1).ok_or_else(|| anyhow!("row labels start at 1"))
}

fn parse_record(line: &str, fixed: &[usize]) -> Result<(PermutationSequence, Outcome)> {
    let rest = line.strip_prefix("seq ").ok_or_else(|| anyhow!("record must start with `seq`"))?;
    let (order, rest) = rest.split_once(' ').ok_or_else(|| anyhow!("truncated record"))?;
    let order: Vec<usize> = order.split(',').map(parse_label).collect::<Result<_>>()?;
    let seq = PermutationSequence::new(order, fixed.to_vec())?;
    if let Some(row) = rest.strip_prefix("infeasible ") {
        return Ok((seq, Err(parse_label(row.trim())?)));
    }
    let body = rest.strip_prefix("ok ").ok_or_else(|| anyhow!("unknown status in `{rest}`"))?;
    let mut parts = body.split(" tie ");
    let matrix_text = parts.next().unwrap_or_default();
    let rows: Vec<Vec<i32>> = matrix_text
        .split('/')
        .map(|r| r.split_whitespace().map(str::parse).collect::<std::result::Result<Vec<i32>, _>>())
        .collect::<std::result::Result<_, _>>()?;
    let matrix = IntMatrix::from_rows(&rows)?;
    let mut ties = Vec::new();
    for t in parts {
        let f: Vec<&str> = t.split(' ').collect();
        let [row, angle, chosen, rivals] = f[..] else { bail!("malformed tie `{t}`") };
        let rivals = if rivals == "-" {
            Vec::new()
        } else {
            rivals
                .split(';')
                .map(|r| {
                    let (v, d) = r.split_once(':').ok_or_else(|| anyhow!("malformed rival `{r}`"))?;
                    Ok((parse_vec8(v)?, d.parse::<f64>()?))
                })
                .collect::<Result<_>>()?
        };
        ties.push(TieEvent { row: parse_label(row)?, chosen: parse_vec8(chosen)?, angle: angle.parse()?, rivals });
    }
    Ok((seq, Ok(Solution { matrix, ties })))
}

/// Open or create the ledger, returning finished records and a handle
/// positioned for appending.
fn open_ledger(path: &Path, cfg: &DeriveConfig, total: usize) -> Result<(BTreeMap<PermutationSequence, Outcome>, File)> {
    let head = header(cfg, total);
    let mut file =
        OpenOptions::new().read(true).write(true).create(true).truncate(false).open(path).with_context(|| format!("opening checkpoint {}", path.display()))?;
    let mut text = String::new();
    file.read_to_string(&mut text)?;
    if text.is_empty() {
        file.write_all(head.as_bytes())?;
        file.sync_data()?;
        return Ok((BTreeMap::new(), file));
    }
    if !text.starts_with(&head) {
        bail!("checkpoint {} was written for a different configuration", path.display());
    }
    // Drop a partially written trailing record.
    let complete = text.rfind('\n').map_or(0, |i| i + 1);
    if complete < text.len() {
        file.set_len(complete as u64)?;
    }
    file.seek(SeekFrom::Start(complete as u64))?;
    let mut done = BTreeMap::new();
    for (k, line) in text[head.len()..complete].lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let (seq, outcome) = parse_record(line, &cfg.fixed).with_context(|| format!("checkpoint record {}", k + 1))?;
        done.insert(seq, outcome);
    }
    Ok((done, file))
}

pub fn run_derive(cfg: &DeriveConfig) -> Result<DeriveOutcome> {
    let mut cfg = cfg.clone();
    cfg.fixed.sort_unstable();
    cfg.fixed.dedup();
    let cfg = &cfg;
    let sequences = enumerate_sequences(&cfg.fixed)?;
    let total = sequences.len();
    let space = cfg.set.space();
    let c = exact_dct_matrix(DIM)?;
    let solver = GreedySolver::new(&c, &space, cfg.policy)?;

    let (mut done, ledger) = match &cfg.checkpoint {
        Some(p) => {
            let (d, f) = open_ledger(p, cfg, total)?;
            (d, Some(Mutex::new(f)))
        }
        None => (BTreeMap::new(), None),
    };
    let pending: Vec<&PermutationSequence> = sequences.iter().filter(|s| !done.contains_key(*s)).collect();
    let budget = cfg.stop_after.unwrap_or(usize::MAX);
    let taken = AtomicUsize::new(0);

    let work = || -> Result<Vec<(PermutationSequence, Outcome)>> {
        pending
            .par_iter()
            .filter(|_| taken.fetch_add(1, Ordering::SeqCst) < budget)
            .map(|seq| {
                let outcome = match solver.solve(seq) {
                    Ok(sol) => Ok(sol),
                    Err(CoreError::Infeasible { row }) => Err(row),
                    Err(e) => return Err(e.into()),
                };
                if let Some(l) = &ledger {
                    let rec = format_record(seq, &outcome);
                    let mut f = l.lock().map_err(|_| anyhow!("checkpoint lock poisoned"))?;
                    f.write_all(rec.as_bytes())?;
                    f.sync_data()?;
                }
                Ok(((*seq).clone(), outcome))
            })
            .collect()
    };
    let fresh = if cfg.workers > 0 { rayon::ThreadPoolBuilder::new().num_threads(cfg.workers).build()?.install(work)? } else { work()? };
    done.extend(fresh);

    if done.len() < total {
        return Ok(DeriveOutcome::Interrupted { done: done.len(), total });
    }
    let derivation = aggregate(done.into_iter().map(|(s, o)| (s, o.map_err(|row| CoreError::Infeasible { row }))))?;
    Ok(DeriveOutcome::Complete(derivation))
}
