//! Registry of the printed 8-point low-complexity matrices.
//!
//! Transforms are looked up by name and come back already orthogonalized (or
//! scaled) as [`ApproxTransform`]s. Matrices that are cited but not printed are
//! only available as [`ReferenceFigures`] for report rendering.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::linalg::{orthogonalize, printed_dct8, ApproxTransform, IntMatrix, PreScale, ScalingKind};
use crate::{Error, Result};

type Rows8 = [[i32; 8]; 8];

#[rustfmt::skip]
const T1: Rows8 = [
    [1,  1,  1,  1,  1,  1,  1,  1],
    [2,  2,  1,  0,  0, -1, -2, -2],
    [2,  1, -1, -2, -2, -1,  1,  2],
    [1,  0, -2, -2,  2,  2,  0, -1],
    [1, -1, -1,  1,  1, -1, -1,  1],
    [2, -2,  0,  1, -1,  0,  2, -2],
    [1, -2,  2, -1, -1,  2, -2,  1],
    [0, -1,  2, -2,  2, -2,  1,  0],
];

#[rustfmt::skip]
const T2: Rows8 = [
    [1,  1,  1,  1,  1,  1,  1,  1],
    [2,  1,  2,  0,  0, -2, -1, -2],
    [2,  1, -1, -2, -2, -1,  1,  2],
    [2,  0, -2, -1,  1,  2,  0, -2],
    [1, -1, -1,  1,  1, -1, -1,  1],
    [1, -2,  0,  2, -2,  0,  2, -1],
    [1, -2,  2, -1, -1,  2, -2,  1],
    [0, -2,  1, -2,  2, -1,  2,  0],
];

#[rustfmt::skip]
const RDCT: Rows8 = [
    [1,  1,  1,  1,  1,  1,  1,  1],
    [1,  1,  1,  0,  0, -1, -1, -1],
    [1,  0,  0, -1, -1,  0,  0,  1],
    [1,  0, -1, -1,  1,  1,  0, -1],
    [1, -1, -1,  1,  1, -1, -1,  1],
    [1, -1,  0,  1, -1,  0,  1, -1],
    [0, -1,  1,  0,  0,  1, -1,  0],
    [0, -1,  1, -1,  1, -1,  1,  0],
];

#[rustfmt::skip]
const T4: Rows8 = [
    [1,  1,  1,  1,  1,  1,  1,  1],
    [1,  1,  1,  0,  0, -1, -1, -1],
    [1,  1, -1, -1, -1, -1,  1,  1],
    [1,  0, -1, -1,  1,  1,  0, -1],
    [1, -1, -1,  1,  1, -1, -1,  1],
    [1, -1,  0,  1, -1,  0,  1, -1],
    [1, -1,  1, -1, -1,  1, -1,  1],
    [0, -1,  1, -1,  1, -1,  1,  0],
];

#[rustfmt::skip]
const T6: Rows8 = [
    [1,  1,  1,  1,  1,  1,  1,  1],
    [2,  1,  1,  0,  0, -1, -1, -2],
    [2,  1, -1, -2, -2, -1,  1,  2],
    [1,  0, -2, -1,  1,  2,  0, -1],
    [1, -1, -1,  1,  1, -1, -1,  1],
    [1, -2,  0,  1, -1,  0,  2, -1],
    [1, -2,  2, -1, -1,  2, -2,  1],
    [0, -1,  1, -2,  2, -1,  1,  0],
];

#[rustfmt::skip]
const BAS_2008B: Rows8 = [
    [1,  1,  1,  1,  1,  1,  1,  1],
    [1,  1,  1,  0,  0, -1, -1, -1],
    [1,  1, -1, -1, -1, -1,  1,  1],
    [1,  0, -1,  0,  0,  1,  0, -1],
    [1, -1, -1,  1,  1, -1, -1,  1],
    [1, -1,  1,  0,  0, -1,  1, -1],
    [1, -1,  1, -1, -1,  1, -1,  1],
    [1, -1,  1, -1,  1, -1,  1, -1],
];

/// Twice the LO matrix, so the ±1/2 entries stay integral.
#[rustfmt::skip]
const LO_DOUBLED: Rows8 = [
    [2,  2,  2,  2,  2,  2,  2,  2],
    [2,  2,  2,  0,  0, -2, -2, -2],
    [2,  1, -1, -2, -2, -1,  1,  2],
    [2,  0, -2, -2,  2,  2,  0, -2],
    [2, -2, -2,  2,  2, -2, -2,  2],
    [2, -2,  0,  2, -2,  0,  2, -2],
    [1, -2,  2, -1, -1,  2, -2,  1],
    [0, -2,  2, -2,  2, -2,  2,  0],
];

const SET_01: &[i32] = &[0, 1, -1];
const SET_012: &[i32] = &[0, 1, -1, 2, -2];
const SET_PM1: &[i32] = &[1, -1];

/// One built-in matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct CatalogEntry {
    pub name: &'static str,
    /// Stored integer matrix; `pre_scale·t` is the published matrix.
    pub t: IntMatrix,
    pub pre_scale: PreScale,
    pub scaling: ScalingKind,
    /// Allowed entries of the stored matrix.
    pub entry_set: &'static [i32],
    pub citation: &'static str,
}

/// Names accepted by [`get_transform`], in report order.
pub const NAMES: [&str; 9] = ["DCT", "T1", "T2", "RDCT", "T4", "T6", "BAS-2008b", "LO", "SDCT"];

fn int8(rows: &Rows8) -> IntMatrix {
    IntMatrix::from_rows(rows).expect("8x8 literal")
}

pub fn t1_matrix() -> IntMatrix {
    int8(&T1)
}

pub fn t2_matrix() -> IntMatrix {
    int8(&T2)
}

pub fn rdct_matrix() -> IntMatrix {
    int8(&RDCT)
}

pub fn t4_matrix() -> IntMatrix {
    int8(&T4)
}

/// Entrywise sign of the 8-point DCT; no entry of the DCT is zero.
pub fn sdct_matrix() -> IntMatrix {
    let c = printed_dct8();
    IntMatrix::from_fn(8, 8, |i, j| if c[(i, j)] > 0.0 { 1 } else { -1 })
}

/// All low-complexity entries (everything except the exact DCT).
pub fn entries() -> Vec<CatalogEntry> {
    let e = |name, rows: &Rows8, scaling, entry_set, citation| CatalogEntry { name, t: int8(rows), pre_scale: PreScale::ONE, scaling, entry_set, citation };
    let mut out = Vec::with_capacity(8);
    out.push(e("T1", &T1, ScalingKind::DiagonalRowNorm, SET_012, "greedy search over {0,±1,±2}"));
    out.push(e("T2", &T2, ScalingKind::DiagonalRowNorm, SET_012, "greedy search over {0,±1,±2}"));
    out.push(e("RDCT", &RDCT, ScalingKind::DiagonalRowNorm, SET_01, "rounded DCT"));
    out.push(e("T4", &T4, ScalingKind::DiagonalRowNorm, SET_01, "integer approximation from prior literature"));
    out.push(e("T6", &T6, ScalingKind::DiagonalRowNorm, SET_012, "integer approximation from prior literature"));
    out.push(e("BAS-2008b", &BAS_2008B, ScalingKind::RowNormalized, SET_01, "multiplierless approximation from prior literature"));
    let mut lo = e("LO", &LO_DOUBLED, ScalingKind::DiagonalRowNorm, SET_012, "approximation with ±1/2 entries from prior literature");
    lo.pre_scale = PreScale { num: 1, den: 2 };
    out.push(lo);
    out.push(CatalogEntry {
        name: "SDCT",
        t: sdct_matrix(),
        pre_scale: PreScale::ONE,
        scaling: ScalingKind::Scalar,
        entry_set: SET_PM1,
        citation: "signed DCT",
    });
    out
}

fn not_found(name: &str) -> Error {
    Error::NotFound { name: name.into(), available: NAMES.join(", ") }
}

/// Canonical spelling of a catalog name, matched case-insensitively.
pub fn canonical_name(name: &str) -> Result<&'static str> {
    NAMES.iter().copied().find(|n| n.eq_ignore_ascii_case(name)).ok_or_else(|| not_found(name))
}

pub fn get_entry(name: &str) -> Result<CatalogEntry> {
    let name = canonical_name(name)?;
    entries().into_iter().find(|e| e.name == name).ok_or_else(|| not_found(name))
}

/// Build the transform for a catalog entry according to its scaling rule.
pub fn build(entry: &CatalogEntry) -> Result<ApproxTransform> {
    let approx = match entry.scaling {
        ScalingKind::Scalar => ApproxTransform::scalar(&entry.t, 1.0 / libm::sqrt(8.0)),
        ScalingKind::RowNormalized => ApproxTransform::row_normalized(&entry.t)?,
        _ => orthogonalize(&entry.t)?,
    };
    let mut approx = approx.with_name(entry.name);
    approx.pre_scale = entry.pre_scale;
    Ok(approx)
}

/// Look a transform up by name.
pub fn get_transform(name: &str) -> Result<ApproxTransform> {
    let name = canonical_name(name)?;
    if name == "DCT" {
        return ApproxTransform::exact(8);
    }
    build(&get_entry(name)?)
}

/// Published figures of a transform, for report tables that mention matrices
/// the catalog does not carry.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReferenceFigures {
    pub name: &'static str,
    /// `(ε, MSE, C*g dB, η %)`.
    pub table4: (f64, f64, f64, f64),
    /// `(θ̄ degrees, V, D̄mod radians)`.
    pub table5: (f64, f64, f64),
    /// `(multiplications, additions, bit-shifts)`.
    pub cost: (u32, u32, u32),
}

const fn fig(name: &'static str, table4: (f64, f64, f64, f64), table5: (f64, f64, f64), cost: (u32, u32, u32)) -> ReferenceFigures {
    ReferenceFigures { name, table4, table5, cost }
}

/// Published values for every transform compared in the evaluation, in the
/// printed order. Catalog transforms are recomputed; these are the targets.
pub const REFERENCE: [ReferenceFigures; 17] = [
    fig("DCT", (0.0, 0.0, 8.8259, 93.9912), (70.53, 0.0089, 0.0), (11, 29, 0)),
    fig("IDCT-HEVC", (0.0020, 8.66e-6, 8.8248, 93.8236), (70.50, 0.0086, 0.0022), (0, 50, 30)),
    fig("T1", (1.2194, 0.0046, 8.6337, 90.4615), (71.12, 0.0124, 0.0711), (0, 24, 6)),
    fig("T2", (1.2194, 0.0127, 8.1024, 87.2275), (71.12, 0.0124, 0.0343), (0, 24, 6)),
    fig("LO", (0.8695, 0.0061, 8.3902, 88.7023), (70.81, 0.0102, 0.0483), (0, 24, 2)),
    fig("SDCT", (3.3158, 0.0207, 6.0261, 82.6190), (69.29, 0.0, 0.1062), (0, 24, 0)),
    fig("RDCT", (1.7945, 0.0098, 8.1827, 87.4297), (71.98, 0.0174, 0.0716), (0, 22, 0)),
    fig("MRDCT", (8.6592, 0.0594, 7.3326, 80.8969), (75.58, 0.0392, 0.1646), (0, 14, 0)),
    fig("BAS-2008a", (5.9294, 0.0238, 8.1194, 86.8626), (72.35, 0.0198, 0.1036), (0, 18, 2)),
    fig("BAS-2008b", (4.1875, 0.0191, 6.2684, 83.1734), (67.29, 0.0015, 0.1097), (0, 21, 0)),
    fig("BAS-2009", (6.8543, 0.0275, 7.9126, 85.3799), (72.10, 0.0183, 0.1334), (0, 18, 0)),
    fig("BAS-2011", (26.8462, 0.0710, 7.9118, 85.6419), (73.54, 0.0265, 0.1492), (0, 16, 0)),
    fig("BAS-2013", (35.0639, 0.1023, 7.9461, 85.3138), (69.29, 0.0, 0.1062), (0, 24, 0)),
    fig("T1'", (3.3158, 0.0208, 6.0462, 83.0814), (73.54, 0.0265, 0.0901), (0, 18, 0)),
    fig("T4", (1.7945, 0.0098, 8.1834, 87.1567), (70.57, 0.0085, 0.0781), (0, 24, 0)),
    fig("T5", (1.7945, 0.0100, 8.1369, 86.5359), (72.45, 0.0209, 0.0730), (0, 24, 4)),
    fig("T6", (0.8695, 0.0062, 8.3437, 88.0594), (71.27, 0.0139, 0.0497), (0, 24, 6)),
];

pub fn reference(name: &str) -> Option<&'static ReferenceFigures> {
    REFERENCE.iter().find(|r| r.name.eq_ignore_ascii_case(name))
}

/// Text rendering helper shared by error messages and the CLI.
pub fn describe(entry: &CatalogEntry) -> String {
    format!("{} ({}; {})", entry.name, entry.scaling.as_str(), entry.citation)
}

/// Published 16- and 32-point scaled matrices, kept as references for
/// checking the scaling construction.
#[rustfmt::skip]
const PRINTED_T16: [[i8; 16]; 16] = [
    [ 1,  1,  1,  1,  1,  1,  1,  1,  1,  1,  1,  1,  1,  1,  1,  1],
    [ 1,  1,  1,  1,  1,  1,  1,  1, -1, -1, -1, -1, -1, -1, -1, -1],
    [ 2,  2,  1,  0,  0, -1, -2, -2, -2, -2, -1,  0,  0,  1,  2,  2],
    [ 2,  2,  1,  0,  0, -1, -2, -2,  2,  2,  1,  0,  0, -1, -2, -2],
    [ 2,  1, -1, -2, -2, -1,  1,  2,  2,  1, -1, -2, -2, -1,  1,  2],
    [ 2,  1, -1, -2, -2, -1,  1,  2, -2, -1,  1,  2,  2,  1, -1, -2],
    [ 1,  0, -2, -2,  2,  2,  0, -1, -1,  0,  2,  2, -2, -2,  0,  1],
    [ 1,  0, -2, -2,  2,  2,  0, -1,  1,  0, -2, -2,  2,  2,  0, -1],
    [ 1, -1, -1,  1,  1, -1, -1,  1,  1, -1, -1,  1,  1, -1, -1,  1],
    [ 1, -1, -1,  1,  1, -1, -1,  1, -1,  1,  1, -1, -1,  1,  1, -1],
    [ 2, -2,  0,  1, -1,  0,  2, -2, -2,  2,  0, -1,  1,  0, -2,  2],
    [ 2, -2,  0,  1, -1,  0,  2, -2,  2, -2,  0,  1, -1,  0,  2, -2],
    [ 1, -2,  2, -1, -1,  2, -2,  1,  1, -2,  2, -1, -1,  2, -2,  1],
    [ 1, -2,  2, -1, -1,  2, -2,  1, -1,  2, -2,  1,  1, -2,  2, -1],
    [ 0, -1,  2, -2,  2, -2,  1,  0,  0,  1, -2,  2, -2,  2, -1,  0],
    [ 0, -1,  2, -2,  2, -2,  1,  0,  0, -1,  2, -2,  2, -2,  1,  0],
];

#[rustfmt::skip]
const PRINTED_T32: [[i8; 32]; 32] = [
    [ 1,  1,  1,  1,  1,  1,  1,  1,  1,  1,  1,  1,  1,  1,  1,  1,  1,  1,  1,  1,  1,  1,  1,  1,  1,  1,  1,  1,  1,  1,  1,  1],
    [ 1,  1,  1,  1,  1,  1,  1,  1,  1,  1,  1,  1,  1,  1,  1,  1, -1, -1, -1, -1, -1, -1, -1, -1, -1, -1, -1, -1, -1, -1, -1, -1],
    [ 1,  1,  1,  1,  1,  1,  1,  1, -1, -1, -1, -1, -1, -1, -1, -1, -1, -1, -1, -1, -1, -1, -1, -1,  1,  1,  1,  1,  1,  1,  1,  1],
    [ 1,  1,  1,  1,  1,  1,  1,  1, -1, -1, -1, -1, -1, -1, -1, -1,  1,  1,  1,  1,  1,  1,  1,  1, -1, -1, -1, -1, -1, -1, -1, -1],
    [ 2,  2,  1,  0,  0, -1, -2, -2, -2, -2, -1,  0,  0,  1,  2,  2,  2,  2,  1,  0,  0, -1, -2, -2, -2, -2, -1,  0,  0,  1,  2,  2],
    [ 2,  2,  1,  0,  0, -1, -2, -2, -2, -2, -1,  0,  0,  1,  2,  2, -2, -2, -1,  0,  0,  1,  2,  2,  2,  2,  1,  0,  0, -1, -2, -2],
    [ 2,  2,  1,  0,  0, -1, -2, -2,  2,  2,  1,  0,  0, -1, -2, -2, -2, -2, -1,  0,  0,  1,  2,  2, -2, -2, -1,  0,  0,  1,  2,  2],
    [ 2,  2,  1,  0,  0, -1, -2, -2,  2,  2,  1,  0,  0, -1, -2, -2,  2,  2,  1,  0,  0, -1, -2, -2,  2,  2,  1,  0,  0, -1, -2, -2],
    [ 2,  1, -1, -2, -2, -1,  1,  2,  2,  1, -1, -2, -2, -1,  1,  2,  2,  1, -1, -2, -2, -1,  1,  2,  2,  1, -1, -2, -2, -1,  1,  2],
    [ 2,  1, -1, -2, -2, -1,  1,  2,  2,  1, -1, -2, -2, -1,  1,  2, -2, -1,  1,  2,  2,  1, -1, -2, -2, -1,  1,  2,  2,  1, -1, -2],
    [ 2,  1, -1, -2, -2, -1,  1,  2, -2, -1,  1,  2,  2,  1, -1, -2, -2, -1,  1,  2,  2,  1, -1, -2,  2,  1, -1, -2, -2, -1,  1,  2],
    [ 2,  1, -1, -2, -2, -1,  1,  2, -2, -1,  1,  2,  2,  1, -1, -2,  2,  1, -1, -2, -2, -1,  1,  2, -2, -1,  1,  2,  2,  1, -1, -2],
    [ 1,  0, -2, -2,  2,  2,  0, -1, -1,  0,  2,  2, -2, -2,  0,  1,  1,  0, -2, -2,  2,  2,  0, -1, -1,  0,  2,  2, -2, -2,  0,  1],
    [ 1,  0, -2, -2,  2,  2,  0, -1, -1,  0,  2,  2, -2, -2,  0,  1, -1,  0,  2,  2, -2, -2,  0,  1,  1,  0, -2, -2,  2,  2,  0, -1],
    [ 1,  0, -2, -2,  2,  2,  0, -1,  1,  0, -2, -2,  2,  2,  0, -1, -1,  0,  2,  2, -2, -2,  0,  1, -1,  0,  2,  2, -2, -2,  0,  1],
    [ 1,  0, -2, -2,  2,  2,  0, -1,  1,  0, -2, -2,  2,  2,  0, -1,  1,  0, -2, -2,  2,  2,  0, -1,  1,  0, -2, -2,  2,  2,  0, -1],
    [ 1, -1, -1,  1,  1, -1, -1,  1,  1, -1, -1,  1,  1, -1, -1,  1,  1, -1, -1,  1,  1, -1, -1,  1,  1, -1, -1,  1,  1, -1, -1,  1],
    [ 1, -1, -1,  1,  1, -1, -1,  1,  1, -1, -1,  1,  1, -1, -1,  1, -1,  1,  1, -1, -1,  1,  1, -1, -1,  1,  1, -1, -1,  1,  1, -1],
    [ 1, -1, -1,  1,  1, -1, -1,  1, -1,  1,  1, -1, -1,  1,  1, -1, -1,  1,  1, -1, -1,  1,  1, -1,  1, -1, -1,  1,  1, -1, -1,  1],
    [ 1, -1, -1,  1,  1, -1, -1,  1, -1,  1,  1, -1, -1,  1,  1, -1,  1, -1, -1,  1,  1, -1, -1,  1, -1,  1,  1, -1, -1,  1,  1, -1],
    [ 2, -2,  0,  1, -1,  0,  2, -2, -2,  2,  0, -1,  1,  0, -2,  2,  2, -2,  0,  1, -1,  0,  2, -2, -2,  2,  0, -1,  1,  0, -2,  2],
    [ 2, -2,  0,  1, -1,  0,  2, -2, -2,  2,  0, -1,  1,  0, -2,  2, -2,  2,  0, -1,  1,  0, -2,  2,  2, -2,  0,  1, -1,  0,  2, -2],
    [ 2, -2,  0,  1, -1,  0,  2, -2,  2, -2,  0,  1, -1,  0,  2, -2, -2,  2,  0, -1,  1,  0, -2,  2, -2,  2,  0, -1,  1,  0, -2,  2],
    [ 2, -2,  0,  1, -1,  0,  2, -2,  2, -2,  0,  1, -1,  0,  2, -2,  2, -2,  0,  1, -1,  0,  2, -2,  2, -2,  0,  1, -1,  0,  2, -2],
    [ 1, -2,  2, -1, -1,  2, -2,  1,  1, -2,  2, -1, -1,  2, -2,  1,  1, -2,  2, -1, -1,  2, -2,  1,  1, -2,  2, -1, -1,  2, -2,  1],
    [ 1, -2,  2, -1, -1,  2, -2,  1,  1, -2,  2, -1, -1,  2, -2,  1, -1,  2, -2,  1,  1, -2,  2, -1, -1,  2, -2,  1,  1, -2,  2, -1],
    [ 1, -2,  2, -1, -1,  2, -2,  1, -1,  2, -2,  1,  1, -2,  2, -1, -1,  2, -2,  1,  1, -2,  2, -1,  1, -2,  2, -1, -1,  2, -2,  1],
    [ 1, -2,  2, -1, -1,  2, -2,  1, -1,  2, -2,  1,  1, -2,  2, -1,  1, -2,  2, -1, -1,  2, -2,  1, -1,  2, -2,  1,  1, -2,  2, -1],
    [ 0, -1,  2, -2,  2, -2,  1,  0,  0,  1, -2,  2, -2,  2, -1,  0,  0, -1,  2, -2,  2, -2,  1,  0,  0,  1, -2,  2, -2,  2, -1,  0],
    [ 0, -1,  2, -2,  2, -2,  1,  0,  0,  1, -2,  2, -2,  2, -1,  0,  0,  1, -2,  2, -2,  2, -1,  0,  0, -1,  2, -2,  2, -2,  1,  0],
    [ 0, -1,  2, -2,  2, -2,  1,  0,  0, -1,  2, -2,  2, -2,  1,  0,  0,  1, -2,  2, -2,  2, -1,  0,  0,  1, -2,  2, -2,  2, -1,  0],
    [ 0, -1,  2, -2,  2, -2,  1,  0,  0, -1,  2, -2,  2, -2,  1,  0,  0, -1,  2, -2,  2, -2,  1,  0,  0, -1,  2, -2,  2, -2,  1,  0],
];

fn from_i8<const N: usize>(rows: &[[i8; N]; N]) -> IntMatrix {
    IntMatrix::from_fn(N, N, |i, j| rows[i][j] as i32)
}

pub fn printed_t16() -> IntMatrix {
    from_i8(&PRINTED_T16)
}

pub fn printed_t32() -> IntMatrix {
    from_i8(&PRINTED_T32)
}
