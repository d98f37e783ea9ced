//! Greedy angle-based search for low-complexity matrices.
//!
//! Rows are approximated one at a time in a chosen order. Each row takes the
//! search-space vector closest in angle to the matching DCT row among the
//! vectors orthogonal to every row already placed.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::linalg::{angle_between, IntMatrix, RealMatrix};
use crate::{Error, Result, ALGEBRAIC_TOL};

/// Vector length handled by the search.
pub const DIM: usize = 8;

pub const P1: [i32; 3] = [0, 1, -1];
pub const P2: [i32; 5] = [0, 1, -1, 2, -2];

/// All `DIM`-tuples over an entry set, in lexicographic order of the declared
/// entry order with the first position most significant.
#[derive(Debug, Clone)]
pub struct SearchSpace {
    entry_set: Vec<i32>,
    vectors: Vec<[i32; DIM]>,
    zero_index: Option<usize>,
}

impl SearchSpace {
    pub fn new(entry_set: &[i32]) -> Result<Self> {
        if entry_set.is_empty() {
            return Err(Error::InvalidArgument("entry set is empty".into()));
        }
        if entry_set.iter().enumerate().any(|(i, v)| entry_set[..i].contains(v)) {
            return Err(Error::InvalidArgument("entry set has repeated values".into()));
        }
        let base = entry_set.len();
        let size = base.pow(DIM as u32);
        let mut vectors = Vec::with_capacity(size);
        let mut digits = [0usize; DIM];
        for _ in 0..size {
            vectors.push(digits.map(|d| entry_set[d]));
            for pos in (0..DIM).rev() {
                digits[pos] += 1;
                if digits[pos] < base {
                    break;
                }
                digits[pos] = 0;
            }
        }
        let zero_index = vectors.iter().position(|v| v.iter().all(|&x| x == 0));
        Ok(Self { entry_set: entry_set.to_vec(), vectors, zero_index })
    }

    pub fn d1() -> Self {
        Self::new(&P1).expect("static entry set")
    }

    pub fn d2() -> Self {
        Self::new(&P2).expect("static entry set")
    }

    pub fn entry_set(&self) -> &[i32] {
        &self.entry_set
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    pub fn vector(&self, index: usize) -> &[i32; DIM] {
        &self.vectors[index]
    }

    pub fn vectors(&self) -> &[[i32; DIM]] {
        &self.vectors
    }

    /// Index of the all-zero vector, which never competes.
    pub fn zero_index(&self) -> Option<usize> {
        self.zero_index
    }

    /// Canonical index of a vector, if it belongs to the space.
    pub fn index_of(&self, v: &[i32]) -> Option<usize> {
        if v.len() != DIM {
            return None;
        }
        let base = self.entry_set.len();
        v.iter().try_fold(0usize, |acc, x| Some(acc * base + self.entry_set.iter().position(|e| e == x)?))
    }
}

/// A processing order over the rows that are not fixed in advance.
///
/// Row indices are 0-based internally; [`PermutationSequence::one_based`]
/// gives the conventional 1-based labels.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PermutationSequence {
    pub order: Vec<usize>,
    pub fixed: Vec<usize>,
}

impl PermutationSequence {
    pub fn new(order: Vec<usize>, fixed: Vec<usize>) -> Result<Self> {
        let mut seen = [false; DIM];
        for &r in order.iter().chain(&fixed) {
            if r >= DIM || seen[r] {
                return Err(Error::InvalidArgument(format!("row {r} is out of range or repeated")));
            }
            seen[r] = true;
        }
        if seen.iter().any(|s| !s) {
            return Err(Error::InvalidArgument("order and fixed rows must cover every row".into()));
        }
        Ok(Self { order, fixed })
    }

    /// Build from 1-based row labels.
    pub fn from_one_based(order: &[usize], fixed: &[usize]) -> Result<Self> {
        let shift = |v: &[usize]| -> Result<Vec<usize>> {
            v.iter().map(|&r| r.checked_sub(1).ok_or_else(|| Error::InvalidArgument("row labels start at 1".into()))).collect()
        };
        Self::new(shift(order)?, shift(fixed)?)
    }

    pub fn one_based(&self) -> Vec<usize> {
        self.order.iter().map(|r| r + 1).collect()
    }
}

/// Every ordering of the non-fixed rows, in lexicographic order.
pub fn enumerate_sequences(fixed: &[usize]) -> Result<Vec<PermutationSequence>> {
    let mut fixed_sorted = fixed.to_vec();
    fixed_sorted.sort_unstable();
    fixed_sorted.dedup();
    if fixed_sorted.iter().any(|&r| r >= DIM) {
        return Err(Error::InvalidArgument("fixed row out of range".into()));
    }
    let mut free: Vec<usize> = (0..DIM).filter(|r| !fixed_sorted.contains(r)).collect();
    let mut out = Vec::new();
    loop {
        out.push(PermutationSequence { order: free.clone(), fixed: fixed_sorted.clone() });
        if !next_permutation(&mut free) {
            break;
        }
    }
    Ok(out)
}

fn next_permutation(v: &mut [usize]) -> bool {
    if v.len() < 2 {
        return false;
    }
    let mut i = v.len() - 1;
    while i > 0 && v[i - 1] >= v[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = v.len() - 1;
    while v[j] <= v[i - 1] {
        j -= 1;
    }
    v.swap(i - 1, j);
    v[i..].reverse();
    true
}

/// How exactly-equal objective values are resolved.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum TiePolicy {
    /// Scan in canonical order and keep a candidate only if its computed angle
    /// is strictly smaller than the best so far.
    #[default]
    StrictFirst,
    /// Treat angles within [`ALGEBRAIC_TOL`] as equal and keep the earliest
    /// such candidate in canonical order.
    Canonical,
}

impl TiePolicy {
    pub fn as_str(&self) -> &'static str {
        match self {
            TiePolicy::StrictFirst => "strict-first",
            TiePolicy::Canonical => "canonical",
        }
    }
}

/// A choice where more than one feasible candidate was within
/// [`ALGEBRAIC_TOL`] of the chosen angle.
#[derive(Debug, Clone, PartialEq)]
pub struct TieEvent {
    pub row: usize,
    pub chosen: [i32; DIM],
    pub angle: f64,
    /// Competitors with their angle minus the chosen angle.
    pub rivals: Vec<([i32; DIM], f64)>,
}

/// Outcome of one successful greedy run.
#[derive(Debug, Clone, PartialEq)]
pub struct Solution {
    pub matrix: IntMatrix,
    pub ties: Vec<TieEvent>,
}

/// Greedy solver with per-row candidate lists sorted by angle.
#[derive(Debug, Clone)]
pub struct GreedySolver<'a> {
    space: &'a SearchSpace,
    c: RealMatrix,
    policy: TiePolicy,
    /// For each target row, `(angle, canonical index)` sorted ascending.
    ranked: Vec<Vec<(f64, u32)>>,
}

impl<'a> GreedySolver<'a> {
    pub fn new(c: &RealMatrix, space: &'a SearchSpace, policy: TiePolicy) -> Result<Self> {
        if c.rows() != DIM || c.cols() != DIM {
            return Err(Error::DimensionMismatch(format!("target must be {DIM}x{DIM}")));
        }
        let mut ranked = Vec::with_capacity(DIM);
        for k in 0..DIM {
            let target = c.row(k);
            let mut list = Vec::with_capacity(space.len());
            for (idx, v) in space.vectors().iter().enumerate() {
                if Some(idx) == space.zero_index() {
                    continue;
                }
                let u = v.map(|x| x as f64);
                list.push((angle_between(&u, target)?, idx as u32));
            }
            list.sort_unstable_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
            ranked.push(list);
        }
        Ok(Self { space, c: c.clone(), policy, ranked })
    }

    pub fn policy(&self) -> TiePolicy {
        self.policy
    }

    pub fn target(&self) -> &RealMatrix {
        &self.c
    }

    /// Approximation used for a fixed row: the sign pattern of the target row.
    pub fn trivial_row(&self, row: usize) -> [i32; DIM] {
        core::array::from_fn(|j| {
            let v = self.c[(row, j)];
            if libm::fabs(v) <= ALGEBRAIC_TOL {
                0
            } else if v > 0.0 {
                1
            } else {
                -1
            }
        })
    }

    /// Run the greedy loop for one sequence.
    pub fn solve(&self, seq: &PermutationSequence) -> Result<Solution> {
        let mut rows: [Option<[i32; DIM]>; DIM] = [None; DIM];
        let mut placed: Vec<[i32; DIM]> = Vec::with_capacity(DIM);
        for &r in &seq.fixed {
            let t = self.trivial_row(r);
            // Fixed rows are imposed, not searched, so they are not checked
            // against each other; they still constrain every searched row.
            if t.iter().all(|&x| x == 0) {
                return Err(Error::Infeasible { row: r });
            }
            rows[r] = Some(t);
            placed.push(t);
        }
        let mut ties = Vec::new();
        for &k in &seq.order {
            let list = &self.ranked[k];
            let feasible = |idx: u32| {
                let v = self.space.vector(idx as usize);
                placed.iter().all(|p| int_dot(p, v) == 0)
            };
            let first = list.iter().position(|&(_, idx)| feasible(idx)).ok_or(Error::Infeasible { row: k })?;
            let band_end = first + list[first..].partition_point(|&(a, _)| a <= list[first].0 + ALGEBRAIC_TOL);
            let band: Vec<(f64, u32)> = list[first..band_end].iter().copied().filter(|&(_, idx)| feasible(idx)).collect();
            let chosen = match self.policy {
                TiePolicy::StrictFirst => band[0],
                TiePolicy::Canonical => *band.iter().min_by_key(|(_, idx)| *idx).expect("band holds first"),
            };
            let chosen_vec = *self.space.vector(chosen.1 as usize);
            if band.len() > 1 {
                ties.push(TieEvent {
                    row: k,
                    chosen: chosen_vec,
                    angle: chosen.0,
                    rivals: band.iter().filter(|&&(_, idx)| idx != chosen.1).map(|&(a, idx)| (*self.space.vector(idx as usize), a - chosen.0)).collect(),
                });
            }
            rows[k] = Some(chosen_vec);
            placed.push(chosen_vec);
        }
        let data: Vec<i32> = rows.iter().flat_map(|r| r.expect("every row assigned")).collect();
        Ok(Solution { matrix: IntMatrix::new(DIM, DIM, data)?, ties })
    }

    /// Re-scan check: every non-fixed row of `matrix` has no feasible rival
    /// with a strictly smaller angle, given the rows placed before it.
    pub fn is_greedy_optimal(&self, matrix: &IntMatrix, seq: &PermutationSequence) -> bool {
        let mut placed: Vec<[i32; DIM]> = seq.fixed.iter().map(|&r| row_array(matrix, r)).collect();
        for &k in &seq.order {
            let chosen = row_array(matrix, k);
            let Some(chosen_idx) = self.space.index_of(&chosen) else { return false };
            let Some(&(chosen_angle, _)) = self.ranked[k].iter().find(|(_, idx)| *idx as usize == chosen_idx) else {
                return false;
            };
            let better = self.ranked[k]
                .iter()
                .take_while(|(a, _)| *a < chosen_angle - ALGEBRAIC_TOL)
                .any(|(_, idx)| placed.iter().all(|p| int_dot(p, self.space.vector(*idx as usize)) == 0));
            if better || !placed.iter().all(|p| int_dot(p, &chosen) == 0) {
                return false;
            }
            placed.push(chosen);
        }
        true
    }
}

fn row_array(m: &IntMatrix, r: usize) -> [i32; DIM] {
    core::array::from_fn(|j| m[(r, j)])
}

fn int_dot(a: &[i32; DIM], b: &[i32; DIM]) -> i32 {
    let mut acc = 0;
    for j in 0..DIM {
        acc += a[j] * b[j];
    }
    acc
}

/// One distinct matrix found by [`derive_all`] and the orders producing it.
#[derive(Debug, Clone, PartialEq)]
pub struct SearchResult {
    pub matrix: IntMatrix,
    pub producing_orders: Vec<PermutationSequence>,
}

impl SearchResult {
    pub fn multiplicity(&self) -> usize {
        self.producing_orders.len()
    }
}

/// Aggregated outcome over many sequences.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Derivation {
    /// Distinct matrices in canonical matrix order.
    pub results: Vec<SearchResult>,
    /// Sequences that ran out of feasible candidates, with the failing row.
    pub infeasible: Vec<(PermutationSequence, usize)>,
    pub ties: Vec<(PermutationSequence, TieEvent)>,
}

impl Derivation {
    pub fn sequences(&self) -> usize {
        self.results.iter().map(SearchResult::multiplicity).sum::<usize>() + self.infeasible.len()
    }
}

/// Merge per-sequence outcomes. The result does not depend on input order.
pub fn aggregate<I>(outcomes: I) -> Result<Derivation>
where
    I: IntoIterator<Item = (PermutationSequence, Result<Solution>)>,
{
    let mut groups: BTreeMap<IntMatrix, Vec<PermutationSequence>> = BTreeMap::new();
    let mut infeasible = Vec::new();
    let mut ties = Vec::new();
    for (seq, outcome) in outcomes {
        match outcome {
            Ok(sol) => {
                ties.extend(sol.ties.into_iter().map(|t| (seq.clone(), t)));
                groups.entry(sol.matrix).or_default().push(seq);
            }
            Err(Error::Infeasible { row }) => infeasible.push((seq, row)),
            Err(e) => return Err(e),
        }
    }
    let mut results: Vec<SearchResult> = groups
        .into_iter()
        .map(|(matrix, mut producing_orders)| {
            producing_orders.sort();
            SearchResult { matrix, producing_orders }
        })
        .collect();
    results.sort_by(|a, b| a.matrix.cmp(&b.matrix));
    infeasible.sort();
    ties.sort_by(|a, b| a.0.cmp(&b.0).then(a.1.row.cmp(&b.1.row)));
    Ok(Derivation { results, infeasible, ties })
}

/// Run [`GreedySolver::solve`] over all sequences sequentially.
pub fn derive_all(solver: &GreedySolver<'_>, sequences: &[PermutationSequence]) -> Result<Derivation> {
    aggregate(sequences.iter().map(|s| (s.clone(), solver.solve(s))))
}

/// The default fixed rows: the DC row and the middle row.
pub const DEFAULT_FIXED: [usize; 2] = [0, 4];

/// Convenience wrapper: greedy solve with a fresh solver.
pub fn greedy_solve(c: &RealMatrix, seq: &PermutationSequence, space: &SearchSpace, policy: TiePolicy) -> Result<Solution> {
    GreedySolver::new(c, space, policy)?.solve(seq)
}

/// Sequences of the form `(1, …, 8)` with no fixed rows.
pub fn identity_order() -> PermutationSequence {
    PermutationSequence { order: (0..DIM).collect(), fixed: vec![] }
}
