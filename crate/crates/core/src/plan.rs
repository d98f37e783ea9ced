//! Multiplierless operation plans: straight-line programs of additions,
//! subtractions and left shifts that compute `y = T·x` exactly.
//!
//! Also holds the sparse factorization of T1 and the recursive scaling that
//! builds 16- and 32-point transforms from two copies of a half-size one.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::catalog::t1_matrix;
use crate::linalg::{kronecker, IntMatrix, RealMatrix};
use crate::{Error, Result};

/// A value read by a node: an input sample or an earlier temporary.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Slot {
    Input(usize),
    Temp(usize),
}

impl fmt::Display for Slot {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Slot::Input(i) => write!(f, "x{i}"),
            Slot::Temp(t) => write!(f, "t{t}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Op {
    Add(Slot, Slot),
    Sub(Slot, Slot),
    Shl(Slot, u32),
    Neg(Slot),
    Copy(Slot),
}

/// One assignment `dest = op`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Node {
    pub op: Op,
    pub dest: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Stage {
    pub label: String,
    pub nodes: Vec<Node>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct Cost {
    /// Additions and subtractions.
    pub additions: usize,
    pub shifts: usize,
}

/// A validated straight-line program over `length` inputs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TransformPlan {
    length: usize,
    stages: Vec<Stage>,
    outputs: Vec<Slot>,
    temps: usize,
    cost: Cost,
}

impl TransformPlan {
    /// Checks that every temporary is assigned exactly once, that operands are
    /// defined before use, and recomputes the cost from the node list.
    pub fn new(length: usize, stages: Vec<Stage>, outputs: Vec<Slot>) -> Result<Self> {
        if length == 0 {
            return Err(Error::InvalidArgument("plan length must be positive".into()));
        }
        let max_dest = stages.iter().flat_map(|s| &s.nodes).map(|n| n.dest + 1).max().unwrap_or(0);
        let mut defined = vec![false; max_dest];
        let check = |slot: Slot, defined: &[bool]| -> Result<()> {
            match slot {
                Slot::Input(i) if i < length => Ok(()),
                Slot::Temp(t) if t < defined.len() && defined[t] => Ok(()),
                other => Err(Error::InvalidArgument(format!("operand {other} is used before it is defined"))),
            }
        };
        let mut cost = Cost::default();
        for node in stages.iter().flat_map(|s| &s.nodes) {
            match node.op {
                Op::Add(a, b) | Op::Sub(a, b) => {
                    check(a, &defined)?;
                    check(b, &defined)?;
                    cost.additions += 1;
                }
                Op::Shl(a, bits) => {
                    check(a, &defined)?;
                    if bits == 0 || bits > 30 {
                        return Err(Error::InvalidArgument(format!("shift by {bits} bits")));
                    }
                    cost.shifts += 1;
                }
                Op::Neg(a) | Op::Copy(a) => check(a, &defined)?,
            }
            if defined[node.dest] {
                return Err(Error::InvalidArgument(format!("t{} is assigned twice", node.dest)));
            }
            defined[node.dest] = true;
        }
        if outputs.len() != length {
            return Err(Error::DimensionMismatch(format!("{} outputs for length {length}", outputs.len())));
        }
        for &o in &outputs {
            check(o, &defined)?;
        }
        Ok(Self { length, stages, outputs, temps: max_dest, cost })
    }

    pub fn length(&self) -> usize {
        self.length
    }

    pub fn stages(&self) -> &[Stage] {
        &self.stages
    }

    pub fn outputs(&self) -> &[Slot] {
        &self.outputs
    }

    pub fn cost(&self) -> Cost {
        self.cost
    }

    pub fn nodes(&self) -> impl Iterator<Item = &Node> {
        self.stages.iter().flat_map(|s| &s.nodes)
    }

    /// Largest magnitude any intermediate or output can take when every input
    /// satisfies `|x| ≤ bound`.
    pub fn worst_case_magnitude(&self, bound: u64) -> u64 {
        let mut temps = vec![0u64; self.temps];
        let get = |s: Slot, temps: &[u64]| match s {
            Slot::Input(_) => bound,
            Slot::Temp(t) => temps[t],
        };
        let mut worst = bound;
        for node in self.nodes() {
            let v = match node.op {
                Op::Add(a, b) | Op::Sub(a, b) => get(a, &temps).saturating_add(get(b, &temps)),
                Op::Shl(a, bits) => get(a, &temps).saturating_mul(1 << bits),
                Op::Neg(a) | Op::Copy(a) => get(a, &temps),
            };
            temps[node.dest] = v;
            worst = worst.max(v);
        }
        worst
    }

    /// Two's-complement width needed for every value when inputs fit in
    /// `input_bits` signed bits.
    pub fn required_bits(&self, input_bits: u32) -> u32 {
        let bound = (1u64 << (input_bits - 1)) - 1;
        let worst = self.worst_case_magnitude(bound);
        64 - worst.leading_zeros() + 1
    }

    /// The integer matrix the plan computes, read off from unit inputs.
    pub fn matrix(&self) -> Result<IntMatrix> {
        let n = self.length;
        let mut m = vec![0i32; n * n];
        for j in 0..n {
            let mut e = vec![0i64; n];
            e[j] = 1;
            for (i, v) in apply_plan(self, &e)?.into_iter().enumerate() {
                m[i * n + j] = i32::try_from(v).map_err(|_| Error::Domain("plan coefficient exceeds i32"))?;
            }
        }
        IntMatrix::new(n, n, m)
    }

    /// One node per line, e.g. `ADD x0 x7 -> t0` and `SHL t3 1 -> t9`.
    pub fn to_text(&self) -> String {
        let mut out = format!("LEN {}\n", self.length);
        for stage in &self.stages {
            out.push_str(&format!("STAGE {}\n", stage.label));
            for node in &stage.nodes {
                let line = match node.op {
                    Op::Add(a, b) => format!("ADD {a} {b}"),
                    Op::Sub(a, b) => format!("SUB {a} {b}"),
                    Op::Shl(a, s) => format!("SHL {a} {s}"),
                    Op::Neg(a) => format!("NEG {a}"),
                    Op::Copy(a) => format!("CPY {a}"),
                };
                out.push_str(&format!("{line} -> t{}\n", node.dest));
            }
        }
        for (i, o) in self.outputs.iter().enumerate() {
            out.push_str(&format!("OUT {o} -> y{i}\n"));
        }
        out
    }

    /// Inverse of [`TransformPlan::to_text`].
    pub fn from_text(text: &str) -> Result<Self> {
        let bad = |line: &str| Error::InvalidArgument(format!("cannot parse plan line `{line}`"));
        let slot = |tok: &str, line: &str| -> Result<Slot> {
            let (kind, idx) = tok.split_at(1.min(tok.len()));
            let idx: usize = idx.parse().map_err(|_| bad(line))?;
            match kind {
                "x" => Ok(Slot::Input(idx)),
                "t" => Ok(Slot::Temp(idx)),
                _ => Err(bad(line)),
            }
        };
        let mut length = None;
        let mut stages: Vec<Stage> = Vec::new();
        let mut outputs: Vec<(usize, Slot)> = Vec::new();
        for line in text.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#')) {
            let tokens: Vec<&str> = line.split_whitespace().collect();
            match tokens.as_slice() {
                ["LEN", n] => length = Some(n.parse::<usize>().map_err(|_| bad(line))?),
                ["STAGE", rest @ ..] => stages.push(Stage { label: rest.join(" "), nodes: Vec::new() }),
                ["OUT", s, "->", y] => {
                    let idx = y.strip_prefix('y').and_then(|v| v.parse().ok()).ok_or_else(|| bad(line))?;
                    outputs.push((idx, slot(s, line)?));
                }
                [op, args @ .., "->", dest] => {
                    let dest = dest.strip_prefix('t').and_then(|v| v.parse().ok()).ok_or_else(|| bad(line))?;
                    let op = match (*op, args) {
                        ("ADD", [a, b]) => Op::Add(slot(a, line)?, slot(b, line)?),
                        ("SUB", [a, b]) => Op::Sub(slot(a, line)?, slot(b, line)?),
                        ("SHL", [a, s]) => Op::Shl(slot(a, line)?, s.parse().map_err(|_| bad(line))?),
                        ("NEG", [a]) => Op::Neg(slot(a, line)?),
                        ("CPY", [a]) => Op::Copy(slot(a, line)?),
                        _ => return Err(bad(line)),
                    };
                    stages.last_mut().ok_or_else(|| bad(line))?.nodes.push(Node { op, dest });
                }
                _ => return Err(bad(line)),
            }
        }
        let length = length.ok_or_else(|| Error::InvalidArgument("plan text lacks a LEN line".into()))?;
        outputs.sort_by_key(|(i, _)| *i);
        if outputs.iter().enumerate().any(|(k, (i, _))| k != *i) {
            return Err(Error::InvalidArgument("plan outputs are not numbered 0..n".into()));
        }
        Self::new(length, stages, outputs.into_iter().map(|(_, s)| s).collect())
    }
}

/// Run a plan on an integer vector.
pub fn apply_plan(plan: &TransformPlan, x: &[i64]) -> Result<Vec<i64>> {
    if x.len() != plan.length {
        return Err(Error::InvalidArgument(format!("input of length {} for a {}-point plan", x.len(), plan.length)));
    }
    let overflow = || Error::Domain("integer overflow while applying plan");
    let mut temps = vec![0i64; plan.temps];
    let get = |s: Slot, temps: &[i64]| match s {
        Slot::Input(i) => x[i],
        Slot::Temp(t) => temps[t],
    };
    for node in plan.nodes() {
        temps[node.dest] = match node.op {
            Op::Add(a, b) => get(a, &temps).checked_add(get(b, &temps)).ok_or_else(overflow)?,
            Op::Sub(a, b) => get(a, &temps).checked_sub(get(b, &temps)).ok_or_else(overflow)?,
            Op::Shl(a, s) => get(a, &temps).checked_mul(1 << s).ok_or_else(overflow)?,
            Op::Neg(a) => get(a, &temps).checked_neg().ok_or_else(overflow)?,
            Op::Copy(a) => get(a, &temps),
        };
    }
    Ok(plan.outputs.iter().map(|&o| get(o, &temps)).collect())
}

/// Incremental construction of a [`TransformPlan`].
#[derive(Debug, Clone)]
pub struct PlanBuilder {
    length: usize,
    stages: Vec<Stage>,
    next: usize,
}

impl PlanBuilder {
    pub fn new(length: usize) -> Self {
        Self { length, stages: Vec::new(), next: 0 }
    }

    pub fn input(&self, i: usize) -> Slot {
        Slot::Input(i)
    }

    pub fn stage(&mut self, label: impl Into<String>) {
        self.stages.push(Stage { label: label.into(), nodes: Vec::new() });
    }

    fn push(&mut self, op: Op) -> Slot {
        if self.stages.is_empty() {
            self.stage("main");
        }
        let dest = self.next;
        self.next += 1;
        self.stages.last_mut().expect("stage exists").nodes.push(Node { op, dest });
        Slot::Temp(dest)
    }

    pub fn add(&mut self, a: Slot, b: Slot) -> Slot {
        self.push(Op::Add(a, b))
    }

    pub fn sub(&mut self, a: Slot, b: Slot) -> Slot {
        self.push(Op::Sub(a, b))
    }

    pub fn shl(&mut self, a: Slot, bits: u32) -> Slot {
        self.push(Op::Shl(a, bits))
    }

    /// Copy another plan's nodes in, reading its inputs from `inputs`.
    /// Returns the slots holding its outputs.
    pub fn inline(&mut self, plan: &TransformPlan, inputs: &[Slot], prefix: &str) -> Result<Vec<Slot>> {
        if inputs.len() != plan.length() {
            return Err(Error::DimensionMismatch(format!("{} inputs for a {}-point plan", inputs.len(), plan.length())));
        }
        let mut map = vec![None; plan.temps];
        let resolve = |s: Slot, map: &[Option<Slot>]| match s {
            Slot::Input(i) => inputs[i],
            Slot::Temp(t) => map[t].expect("plan was validated"),
        };
        for stage in plan.stages() {
            self.stage(format!("{prefix}{}", stage.label));
            for node in &stage.nodes {
                let op = match node.op {
                    Op::Add(a, b) => Op::Add(resolve(a, &map), resolve(b, &map)),
                    Op::Sub(a, b) => Op::Sub(resolve(a, &map), resolve(b, &map)),
                    Op::Shl(a, s) => Op::Shl(resolve(a, &map), s),
                    Op::Neg(a) => Op::Neg(resolve(a, &map)),
                    Op::Copy(a) => Op::Copy(resolve(a, &map)),
                };
                map[node.dest] = Some(self.push(op));
            }
        }
        Ok(plan.outputs().iter().map(|&o| resolve(o, &map)).collect())
    }

    pub fn finish(self, outputs: Vec<Slot>) -> Result<TransformPlan> {
        TransformPlan::new(self.length, self.stages, outputs)
    }
}

/// Fast algorithm for T1: 24 additions and 6 shifts.
///
/// The halves in the fourth factor and the doubling diagonal are merged, so
/// every intermediate value is an integer.
pub fn t1_fast_plan() -> TransformPlan {
    let mut b = PlanBuilder::new(8);
    let x: Vec<Slot> = (0..8).map(Slot::Input).collect();

    b.stage("A1");
    let a0 = b.add(x[0], x[7]);
    let a1 = b.add(x[1], x[6]);
    let a2 = b.add(x[2], x[5]);
    let a3 = b.add(x[3], x[4]);
    let a4 = b.sub(x[3], x[4]);
    let a5 = b.sub(x[2], x[5]);
    let a6 = b.sub(x[1], x[6]);
    let a7 = b.sub(x[0], x[7]);

    b.stage("A2");
    let b0 = b.add(a0, a3);
    let b1 = b.add(a1, a2);
    let b2 = b.sub(a1, a2);
    let b3 = b.sub(a0, a3);

    b.stage("A3");
    let c0 = b.add(b0, b1);
    let c1 = b.sub(b0, b1);

    b.stage("D.A4");
    let s = b.add(a6, a7);
    let s = b.shl(s, 1);
    let y1 = b.add(a5, s);

    let s = b.shl(b3, 1);
    let y2 = b.add(b2, s);

    let s = b.add(a4, a5);
    let s = b.shl(s, 1);
    let y3 = b.sub(a7, s);

    let s = b.sub(a7, a6);
    let s = b.shl(s, 1);
    let y5 = b.add(a4, s);

    let s = b.shl(b2, 1);
    let y6 = b.sub(b3, s);

    let s = b.sub(a5, a4);
    let s = b.shl(s, 1);
    let y7 = b.sub(s, a6);

    b.finish(vec![c0, y1, y2, y3, c1, y5, y6, y7]).expect("static plan is well formed")
}

/// The printed factors of T1, in the order `[D, A4, A3, A2, A1]`.
pub fn t1_factors() -> [RealMatrix; 5] {
    let m = |rows: [[f64; 8]; 8]| RealMatrix::from_rows(&rows).expect("8x8 literal");
    #[rustfmt::skip]
    let a1 = m([
        [1., 0., 0., 0., 0., 0., 0., 1.],
        [0., 1., 0., 0., 0., 0., 1., 0.],
        [0., 0., 1., 0., 0., 1., 0., 0.],
        [0., 0., 0., 1., 1., 0., 0., 0.],
        [0., 0., 0., 1., -1., 0., 0., 0.],
        [0., 0., 1., 0., 0., -1., 0., 0.],
        [0., 1., 0., 0., 0., 0., -1., 0.],
        [1., 0., 0., 0., 0., 0., 0., -1.],
    ]);
    #[rustfmt::skip]
    let a2 = m([
        [1., 0., 0., 1., 0., 0., 0., 0.],
        [0., 1., 1., 0., 0., 0., 0., 0.],
        [0., 1., -1., 0., 0., 0., 0., 0.],
        [1., 0., 0., -1., 0., 0., 0., 0.],
        [0., 0., 0., 0., 1., 0., 0., 0.],
        [0., 0., 0., 0., 0., 1., 0., 0.],
        [0., 0., 0., 0., 0., 0., 1., 0.],
        [0., 0., 0., 0., 0., 0., 0., 1.],
    ]);
    #[rustfmt::skip]
    let a3 = m([
        [1., 1., 0., 0., 0., 0., 0., 0.],
        [1., -1., 0., 0., 0., 0., 0., 0.],
        [0., 0., 1., 0., 0., 0., 0., 0.],
        [0., 0., 0., 1., 0., 0., 0., 0.],
        [0., 0., 0., 0., 1., 0., 0., 0.],
        [0., 0., 0., 0., 0., 1., 0., 0.],
        [0., 0., 0., 0., 0., 0., 1., 0.],
        [0., 0., 0., 0., 0., 0., 0., 1.],
    ]);
    #[rustfmt::skip]
    let a4 = m([
        [1., 0., 0., 0., 0., 0., 0., 0.],
        [0., 0., 0., 0., 0., 0.5, 1., 1.],
        [0., 0., 1., 2., 0., 0., 0., 0.],
        [0., 0., 0., 0., -1., -1., 0., 0.5],
        [0., 1., 0., 0., 0., 0., 0., 0.],
        [0., 0., 0., 0., 0.5, 0., -1., 1.],
        [0., 0., -2., 1., 0., 0., 0., 0.],
        [0., 0., 0., 0., -1., 1., -0.5, 0.],
    ]);
    let d = RealMatrix::diagonal(&[1., 2., 1., 2., 1., 2., 1., 2.]);
    [d, a4, a3, a2, a1]
}

/// Result of multiplying out a factorization.
#[derive(Debug, Clone, PartialEq)]
pub struct FactorizationCheck {
    pub exact: bool,
    pub residual: f64,
    /// `(row, col, expected, obtained)` for every differing entry.
    pub mismatches: Vec<(usize, usize, f64, f64)>,
}

/// Multiply `factors` left to right and compare with `target` entrywise.
///
/// All printed factors are dyadic, so the floating-point product is exact.
pub fn verify_factors(factors: &[RealMatrix], target: &IntMatrix) -> Result<FactorizationCheck> {
    let (first, rest) = factors.split_first().ok_or_else(|| Error::InvalidArgument("no factors".into()))?;
    let product = rest.iter().try_fold(first.clone(), |acc, f| acc.matmul(f))?;
    let expected = target.to_real();
    if product.rows() != expected.rows() || product.cols() != expected.cols() {
        return Err(Error::DimensionMismatch("factor product has the wrong shape".into()));
    }
    let mut mismatches = Vec::new();
    for i in 0..product.rows() {
        for j in 0..product.cols() {
            if product[(i, j)] != expected[(i, j)] {
                mismatches.push((i, j, expected[(i, j)], product[(i, j)]));
            }
        }
    }
    Ok(FactorizationCheck { exact: mismatches.is_empty(), residual: product.max_abs_diff(&expected), mismatches })
}

/// Check `D·A4·A3·A2·A1 = T1`.
pub fn verify_factorization() -> FactorizationCheck {
    verify_factors(&t1_factors(), &t1_matrix()).expect("printed factors are 8x8")
}

/// An `N`-point matrix from the recursive scaling together with its row
/// norms and the pending `(1/√2)^levels` factor.
#[derive(Debug, Clone, PartialEq)]
pub struct ScaledTransform {
    pub t: IntMatrix,
    /// `t·tᵀ`; diagonal whenever the rows of `t` are orthogonal.
    pub diagonal: RealMatrix,
    /// Number of scaling steps applied; each contributes a `1/√2` that is
    /// left to the quantization stage.
    pub levels: u32,
}

impl ScaledTransform {
    pub fn base(t: IntMatrix) -> Result<Self> {
        if !t.is_square() {
            return Err(Error::InvalidArgument("matrix to scale must be square".into()));
        }
        let diagonal = t.gram().to_real();
        Ok(Self { t, diagonal, levels: 0 })
    }

    /// The factor `(1/√2)^levels` that the integer matrix omits.
    pub fn pre_scale(&self) -> f64 {
        libm::pow(core::f64::consts::FRAC_1_SQRT_2, self.levels as f64)
    }

    /// One doubling step.
    ///
    /// With `u = x_top + rev(x_bottom)` and `v = x_top − rev(x_bottom)`, even
    /// outputs apply the half matrix to `u` and odd outputs apply it to `v`:
    /// row `2k` is `[tₖ, rev(tₖ)]` and row `2k+1` is `[tₖ, −rev(tₖ)]`.
    pub fn doubled(&self) -> Result<Self> {
        let h = self.t.rows();
        let n = 2 * h;
        let t = IntMatrix::from_fn(n, n, |i, j| {
            let k = i / 2;
            if j < h {
                self.t[(k, j)]
            } else {
                let v = self.t[(k, n - 1 - j)];
                if i % 2 == 0 {
                    v
                } else {
                    -v
                }
            }
        });
        let mut out = Self::base(t)?;
        out.levels = self.levels + 1;
        Ok(out)
    }
}

/// Scale an `N/2`-point matrix up to `N` points.
pub fn jam_scale(half: &IntMatrix) -> Result<ScaledTransform> {
    ScaledTransform::base(half.clone())?.doubled()
}

/// T1 scaled to `n ∈ {8, 16, 32}` points.
pub fn scaled_transform(n: usize) -> Result<ScaledTransform> {
    let mut s = ScaledTransform::base(t1_matrix())?;
    match n {
        8 => {}
        16 => s = s.doubled()?,
        32 => s = s.doubled()?.doubled()?,
        _ => return Err(Error::InvalidArgument(format!("scaled length {n} is not one of 8, 16, 32"))),
    }
    Ok(s)
}

/// Closed form of `t·tᵀ` for the scaled T1: `4·(I₂ ⊗ diag(4,9,10,9) ⊗ I₂)`
/// for 16 points and twice that, expanded by `I₂`, for 32.
pub fn scaled_diagonal(n: usize) -> Result<RealMatrix> {
    let i2 = RealMatrix::identity(2);
    let core = RealMatrix::diagonal(&[4.0, 9.0, 10.0, 9.0]);
    let d16 = kronecker(&kronecker(&i2, &core), &i2).scale(4.0);
    match n {
        16 => Ok(d16),
        32 => Ok(kronecker(&d16, &i2).scale(2.0)),
        _ => Err(Error::InvalidArgument(format!("scaled diagonal is defined for 16 and 32, not {n}"))),
    }
}

/// Plan for the scaled T1: `N` butterfly additions feeding two half-size
/// plans whose outputs are interleaved.
pub fn scaled_plan(n: usize) -> Result<TransformPlan> {
    match n {
        8 => Ok(t1_fast_plan()),
        16 | 32 => {
            let half = scaled_plan(n / 2)?;
            let h = n / 2;
            let mut b = PlanBuilder::new(n);
            b.stage(format!("butterfly{n}"));
            let u: Vec<Slot> = (0..h).map(|i| b.add(Slot::Input(i), Slot::Input(n - 1 - i))).collect();
            let v: Vec<Slot> = (0..h).map(|i| b.sub(Slot::Input(i), Slot::Input(n - 1 - i))).collect();
            let even = b.inline(&half, &u, &format!("even{n}/"))?;
            let odd = b.inline(&half, &v, &format!("odd{n}/"))?;
            let outputs = even.into_iter().zip(odd).flat_map(|(e, o)| [e, o]).collect();
            b.finish(outputs)
        }
        _ => Err(Error::InvalidArgument(format!("no plan for length {n}"))),
    }
}

impl fmt::Display for Cost {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} additions, {} shifts", self.additions, self.shifts)
    }
}

/// Names accepted by [`plan_by_name`].
pub const PLAN_NAMES: [&str; 3] = ["T1", "T1-16", "T1-32"];

pub fn plan_by_name(name: &str) -> Result<TransformPlan> {
    match name.to_ascii_uppercase().as_str() {
        "T1" => Ok(t1_fast_plan()),
        "T1-16" => scaled_plan(16),
        "T1-32" => scaled_plan(32),
        _ => Err(Error::NotFound { name: name.to_string(), available: PLAN_NAMES.join(", ") }),
    }
}
