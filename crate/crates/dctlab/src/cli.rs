use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use dctlab_core::catalog::{self, get_entry, get_transform, REFERENCE};
use dctlab_core::circular::circular_summary;
use dctlab_core::codec::compress_image;
use dctlab_core::linalg::{orthogonalize, ApproxTransform};
use dctlab_core::metrics::{coding_gain_curve, default_rho_grid, report_for, CovarianceModel};
use dctlab_core::plan::{apply_plan, jam_scale, plan_by_name, scaled_transform, verify_factorization, PLAN_NAMES};
use dctlab_core::search::{Derivation, TiePolicy, DEFAULT_FIXED};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::corpus::{corpus_dir, image_label, list_images};
use crate::derive::{run_derive, DeriveConfig, DeriveOutcome, EntrySet};
use crate::fmt::{fixed4, sig6};
use crate::io::{emit, write_atomic};
use crate::matrix_text::{format_records, parse_single, MatrixRecord};
use crate::pgm;

/// Exit status of a derivation stopped by `--stop-after`.
pub const EXIT_INTERRUPTED: u8 = 3;

#[derive(Debug, Parser)]
#[command(name = "dctlab", version, about = "Greedy low-complexity DCT approximations: derivation, metrics, fast plans and block coding")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run the greedy search over every row ordering.
    Derive(DeriveArgs),
    /// Error energy, MSE, unified coding gain and efficiency (CSV).
    Evaluate(EvaluateArgs),
    /// Circular statistics of the row angles (CSV).
    Circular(CircularArgs),
    /// Unified coding gain shortfall against the DCT across ρ (CSV).
    CgCurve(CgCurveArgs),
    /// Check the fast plans against their matrices on random inputs.
    FastCheck(FastCheckArgs),
    /// Additions and bit-shifts per plan (CSV), or one plan as text.
    CountOps(CountOpsArgs),
    /// Scale T1 (or a given matrix) to twice its length.
    Scale(ScaleArgs),
    /// Blockwise transform, zig-zag truncation and reconstruction (CSV).
    Compress(CompressArgs),
    /// Print catalog matrices in the matrix text format.
    Catalog(CatalogArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum PolicyArg {
    StrictFirst,
    Canonical,
}

impl From<PolicyArg> for TiePolicy {
    fn from(p: PolicyArg) -> Self {
        match p {
            PolicyArg::StrictFirst => TiePolicy::StrictFirst,
            PolicyArg::Canonical => TiePolicy::Canonical,
        }
    }
}

#[derive(Debug, Args)]
pub struct DeriveArgs {
    #[arg(long, value_enum, default_value = "d1")]
    pub set: EntrySet,
    /// Search all 8! orderings instead of fixing rows 1 and 5.
    #[arg(long, conflicts_with = "fixed")]
    pub full: bool,
    /// 1-based rows fixed to the sign pattern of the DCT row.
    #[arg(long, value_delimiter = ',')]
    pub fixed: Option<Vec<usize>>,
    #[arg(long, value_enum, default_value = "strict-first")]
    pub tie_policy: PolicyArg,
    /// Worker threads.
    #[arg(long, default_value_t = 1)]
    pub parallel: usize,
    /// Progress ledger; an existing ledger is resumed.
    #[arg(long)]
    pub checkpoint: Option<PathBuf>,
    /// Stop after recording this many new sequences (needs --checkpoint).
    #[arg(long, requires = "checkpoint")]
    pub stop_after: Option<usize>,
    /// Directory for matrices.txt, summary.csv, orders.csv and ties.csv.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct EvaluateArgs {
    /// Catalog transforms; defaults to the whole catalog.
    #[arg(long = "transform", value_delimiter = ',')]
    pub transforms: Vec<String>,
    /// Extra matrices in the matrix text format, orthogonalized before use.
    #[arg(long = "matrix")]
    pub matrices: Vec<PathBuf>,
    #[arg(long, default_value_t = 0.95)]
    pub rho: f64,
    /// Append published rows for matrices outside the catalog.
    #[arg(long)]
    pub reference: bool,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CircularArgs {
    #[arg(long = "transform", value_delimiter = ',')]
    pub transforms: Vec<String>,
    #[arg(long)]
    pub reference: bool,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CgCurveArgs {
    #[arg(long, default_value = "T1", conflicts_with = "out_dir")]
    pub transform: String,
    #[arg(long, conflicts_with = "out_dir")]
    pub out: Option<PathBuf>,
    /// Write `<name>.csv` for every catalog approximation instead.
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct FastCheckArgs {
    #[arg(long, default_value_t = 100_000)]
    pub vectors: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Inputs are drawn from `[-bound, bound]`.
    #[arg(long, default_value_t = 255)]
    pub bound: i64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CountOpsArgs {
    /// Append published costs of transforms without a shipped plan.
    #[arg(long)]
    pub reference: bool,
    /// Print this plan's node list instead of the cost table.
    #[arg(long, value_name = "PLAN")]
    pub plan_text: Option<String>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ScaleArgs {
    /// Target length when scaling T1.
    #[arg(long, default_value_t = 16, conflicts_with = "input")]
    pub n: usize,
    /// Scale this matrix once instead.
    #[arg(long)]
    pub input: Option<PathBuf>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CompressArgs {
    /// PGM file or directory; defaults to $DCTLAB_CORPUS or the bundled fixtures.
    #[arg(long)]
    pub input: Option<PathBuf>,
    #[arg(long = "transform", value_delimiter = ',', default_value = "DCT,T1,T2,RDCT,T4,T6,LO")]
    pub transforms: Vec<String>,
    /// Retained coefficients per block.
    #[arg(long, value_delimiter = ',', default_value = "3", conflicts_with = "all_r")]
    pub r: Vec<usize>,
    /// Sweep r = 1..=64.
    #[arg(long)]
    pub all_r: bool,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Also write one CSV per image into this directory.
    #[arg(long)]
    pub per_image_dir: Option<PathBuf>,
    /// Reconstructed PGM; needs exactly one image, transform and r.
    #[arg(long)]
    pub recon: Option<PathBuf>,
    #[arg(long, default_value_t = 1)]
    pub parallel: usize,
}

#[derive(Debug, Args)]
pub struct CatalogArgs {
    /// Names to print; defaults to every entry.
    #[arg(long = "name", value_delimiter = ',')]
    pub names: Vec<String>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Parse `args` and run; usage errors exit 2, runtime errors exit 1.
pub fn run<I, T>(args: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match dispatch(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

pub fn dispatch(cmd: Command) -> Result<ExitCode> {
    match cmd {
        Command::Derive(a) => derive(a),
        Command::Evaluate(a) => emit(a.out.as_deref(), &evaluate_csv(&a)?).map(|_| ExitCode::SUCCESS).map_err(Into::into),
        Command::Circular(a) => emit(a.out.as_deref(), &circular_csv(&a)?).map(|_| ExitCode::SUCCESS).map_err(Into::into),
        Command::CgCurve(a) => cg_curve(a),
        Command::FastCheck(a) => fast_check(a),
        Command::CountOps(a) => emit(a.out.as_deref(), &count_ops_text(&a)?).map(|_| ExitCode::SUCCESS).map_err(Into::into),
        Command::Scale(a) => emit(a.out.as_deref(), &scale_text(&a)?).map(|_| ExitCode::SUCCESS).map_err(Into::into),
        Command::Compress(a) => compress(a),
        Command::Catalog(a) => emit(a.out.as_deref(), &catalog_text(&a)?).map(|_| ExitCode::SUCCESS).map_err(Into::into),
    }
}

fn names_or_catalog(names: &[String]) -> Result<Vec<&'static str>> {
    if names.is_empty() {
        return Ok(catalog::NAMES.to_vec());
    }
    names.iter().map(|n| catalog::canonical_name(n).map_err(Into::into)).collect()
}

/// Published rows for transforms the catalog does not carry.
fn reference_only() -> impl Iterator<Item = &'static catalog::ReferenceFigures> {
    REFERENCE.iter().filter(|r| catalog::canonical_name(r.name).is_err())
}

fn derive(a: DeriveArgs) -> Result<ExitCode> {
    let fixed = if a.full {
        Vec::new()
    } else {
        match &a.fixed {
            Some(v) => v.iter().map(|&r| r.checked_sub(1).context("row labels start at 1")).collect::<Result<_>>()?,
            None => DEFAULT_FIXED.to_vec(),
        }
    };
    let cfg = DeriveConfig { set: a.set, fixed, policy: a.tie_policy.into(), workers: a.parallel, checkpoint: a.checkpoint.clone(), stop_after: a.stop_after };
    match run_derive(&cfg)? {
        DeriveOutcome::Interrupted { done, total } => {
            eprintln!("stopped after {done} of {total} sequences; rerun with the same --checkpoint to resume");
            Ok(ExitCode::from(EXIT_INTERRUPTED))
        }
        DeriveOutcome::Complete(d) => {
            for (seq, row) in &d.infeasible {
                eprintln!("warning: sequence {} is infeasible at row {}", join(&seq.one_based(), ","), row + 1);
            }
            let artifacts = derive_artifacts(&d);
            for (name, text) in &artifacts {
                write_atomic(&a.out.join(name), text.as_bytes()).with_context(|| format!("writing {name}"))?;
            }
            print!("{}", artifacts[1].1);
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn join<T: ToString>(v: &[T], sep: &str) -> String {
    v.iter().map(ToString::to_string).collect::<Vec<_>>().join(sep)
}

/// Catalog entry whose stored matrix equals `m`, if any.
fn catalog_match(m: &dctlab_core::linalg::IntMatrix) -> &'static str {
    catalog::entries().into_iter().find(|e| e.pre_scale.is_one() && &e.t == m).map_or("-", |e| e.name)
}

/// `(file name, contents)` for every derive artifact.
pub fn derive_artifacts(d: &Derivation) -> Vec<(&'static str, String)> {
    let records: Vec<MatrixRecord> = d
        .results
        .iter()
        .enumerate()
        .map(|(k, r)| {
            MatrixRecord::new(r.matrix.clone())
                .with_comment(format!("id m{k}"))
                .with_comment(format!("multiplicity {}", r.multiplicity()))
                .with_comment(format!("catalog {}", catalog_match(&r.matrix)))
        })
        .collect();
    let mut summary = String::from("matrix_id,multiplicity,producing_orders,catalog_match\n");
    for (k, r) in d.results.iter().enumerate() {
        let mut orders = r.producing_orders.clone();
        orders.dedup_by(|a, b| a.order == b.order);
        let _ = writeln!(summary, "m{k},{},{},{}", r.multiplicity(), orders.len(), catalog_match(&r.matrix));
    }
    let _ = writeln!(summary, "infeasible,{},{},-", d.infeasible.len(), d.infeasible.len());

    let mut rows: Vec<(Vec<usize>, String)> = Vec::new();
    for (k, r) in d.results.iter().enumerate() {
        for s in &r.producing_orders {
            rows.push((s.one_based(), format!("ok,m{k},")));
        }
    }
    for (s, row) in &d.infeasible {
        rows.push((s.one_based(), format!("infeasible,,{}", row + 1)));
    }
    rows.sort();
    let mut orders = String::from("order,status,matrix_id,failed_row\n");
    for (o, rest) in rows {
        let _ = writeln!(orders, "{},{rest}", join(&o, " "));
    }

    let mut ties = String::from("order,row,angle,chosen,rival,delta\n");
    for (s, t) in &d.ties {
        for (v, delta) in &t.rivals {
            let _ = writeln!(ties, "{},{},{},{},{},{}", join(&s.one_based(), " "), t.row + 1, sig6(t.angle), join(&t.chosen, " "), join(v, " "), sig6(*delta));
        }
    }
    vec![("matrices.txt", format_records(&records)), ("summary.csv", summary), ("orders.csv", orders), ("ties.csv", ties)]
}

fn load_matrix_transform(path: &Path) -> Result<ApproxTransform> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let rec = parse_single(&text)?;
    Ok(orthogonalize(&rec.matrix)?.with_name(image_label(path)))
}

pub fn evaluate_csv(a: &EvaluateArgs) -> Result<String> {
    let model = CovarianceModel::new(a.rho, 8)?;
    let mut transforms: Vec<ApproxTransform> = names_or_catalog(&a.transforms)?.into_iter().map(get_transform).collect::<Result<_, _>>()?;
    for p in &a.matrices {
        transforms.push(load_matrix_transform(p)?);
    }
    let mut s = String::from("name,epsilon,mse,unified_cg_db,eta_percent\n");
    for t in &transforms {
        let r = report_for(t, &model)?;
        let _ = writeln!(s, "{},{},{},{},{}", r.name, fixed4(r.epsilon), fixed4(r.mse), fixed4(r.unified_cg), fixed4(r.eta));
    }
    if a.reference {
        for r in reference_only() {
            let (e, m, cg, eta) = r.table4;
            let _ = writeln!(s, "{} (published),{},{},{},{}", r.name, fixed4(e), fixed4(m), fixed4(cg), fixed4(eta));
        }
    }
    Ok(s)
}

pub fn circular_csv(a: &CircularArgs) -> Result<String> {
    let mut s = String::from("name,theta_bar_deg,variance,dbar_mod_rad\n");
    for name in names_or_catalog(&a.transforms)? {
        let (theta, v, d) = circular_summary(&get_transform(name)?.angle_rows())?;
        let _ = writeln!(s, "{name},{},{},{}", fixed4(theta), fixed4(v), fixed4(d));
    }
    if a.reference {
        for r in reference_only() {
            let (theta, v, d) = r.table5;
            let _ = writeln!(s, "{} (published),{},{},{}", r.name, fixed4(theta), fixed4(v), fixed4(d));
        }
    }
    Ok(s)
}

/// `rho,delta_cg_db` with `delta = C*g(DCT) − C*g(Ĉ)`.
pub fn cg_curve_csv(name: &str) -> Result<String> {
    let approx = get_transform(name)?;
    let mut s = String::from("rho,delta_cg_db\n");
    for (rho, delta) in coding_gain_curve(&approx.c_hat, &default_rho_grid())? {
        let _ = writeln!(s, "{},{}", sig6(rho), sig6(delta));
    }
    Ok(s)
}

fn cg_curve(a: CgCurveArgs) -> Result<ExitCode> {
    match &a.out_dir {
        Some(dir) => {
            for name in catalog::NAMES.iter().filter(|n| **n != "DCT") {
                write_atomic(&dir.join(format!("{name}.csv")), cg_curve_csv(name)?.as_bytes())?;
            }
        }
        None => emit(a.out.as_deref(), &cg_curve_csv(&a.transform)?)?,
    }
    Ok(ExitCode::SUCCESS)
}

/// CSV report and whether every check passed.
pub fn fast_check_report(a: &FastCheckArgs) -> Result<(String, bool)> {
    let mut rng = ChaCha8Rng::seed_from_u64(a.seed);
    let mut s = String::from("plan,length,vectors,mismatches,additions,bit_shifts,required_bits\n");
    let mut ok = true;
    for name in PLAN_NAMES {
        let plan = plan_by_name(name)?;
        let m = plan.matrix()?;
        let n = plan.length();
        let mut mismatches = 0usize;
        for _ in 0..a.vectors {
            let x: Vec<i64> = (0..n).map(|_| rng.gen_range(-a.bound..=a.bound)).collect();
            if apply_plan(&plan, &x)? != m.apply(&x)? {
                mismatches += 1;
            }
        }
        ok &= mismatches == 0;
        let c = plan.cost();
        let input_bits = 64 - (a.bound.unsigned_abs()).leading_zeros() + 1;
        let _ = writeln!(s, "{name},{n},{},{mismatches},{},{},{}", a.vectors, c.additions, c.shifts, plan.required_bits(input_bits));
    }
    let f = verify_factorization();
    ok &= f.exact;
    let _ = writeln!(s, "# factorization {} (residual {})", if f.exact { "exact" } else { "INEXACT" }, sig6(f.residual));
    Ok((s, ok))
}

fn fast_check(a: FastCheckArgs) -> Result<ExitCode> {
    let (s, ok) = fast_check_report(&a)?;
    emit(a.out.as_deref(), &s)?;
    if !ok {
        bail!("fast plan check failed");
    }
    Ok(ExitCode::SUCCESS)
}

pub fn count_ops_text(a: &CountOpsArgs) -> Result<String> {
    if let Some(name) = &a.plan_text {
        return Ok(plan_by_name(name)?.to_text());
    }
    let mut s = String::from("transform,additions,bit_shifts\n");
    for name in PLAN_NAMES {
        let c = plan_by_name(name)?.cost();
        let _ = writeln!(s, "{name},{},{}", c.additions, c.shifts);
    }
    if a.reference {
        for r in REFERENCE.iter().filter(|r| r.name != "T1") {
            let (_, adds, shifts) = r.cost;
            let _ = writeln!(s, "{} (published),{adds},{shifts}", r.name);
        }
    }
    Ok(s)
}

pub fn scale_text(a: &ScaleArgs) -> Result<String> {
    let (scaled, label) = match &a.input {
        Some(p) => {
            let rec = parse_single(&std::fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?)?;
            (jam_scale(&rec.matrix)?, format!("{} scaled once", image_label(p)))
        }
        None => (scaled_transform(a.n)?, format!("T1 scaled to {} points", a.n)),
    };
    let diag: Vec<String> = scaled.diagonal.diag().iter().map(|v| sig6(*v)).collect();
    let orthogonal = scaled.diagonal.is_diagonal(0.0);
    let rec = MatrixRecord::new(scaled.t.clone())
        .with_comment(label)
        .with_comment(format!("pre-scale (1/sqrt(2))^{}", scaled.levels))
        .with_comment(format!("row norms squared {}", diag.join(" ")))
        .with_comment(format!("rows orthogonal {orthogonal}"));
    Ok(format_records(&[rec]))
}

#[derive(Debug, Clone)]
struct CompressJob {
    image: usize,
    transform: usize,
    r: usize,
}

fn compress(a: CompressArgs) -> Result<ExitCode> {
    let root = corpus_dir(a.input.as_deref());
    let paths = list_images(&root).with_context(|| format!("listing {}", root.display()))?;
    if paths.is_empty() {
        bail!("no .pgm images under {}", root.display());
    }
    let images = paths.iter().map(|p| pgm::read(p).with_context(|| format!("reading {}", p.display()))).collect::<Result<Vec<_>>>()?;
    let labels: Vec<String> = paths.iter().map(|p| image_label(p)).collect();
    let transforms: Vec<ApproxTransform> = a.transforms.iter().map(|n| get_transform(n)).collect::<Result<_, _>>()?;
    let rs: Vec<usize> = if a.all_r { (1..=64).collect() } else { a.r.clone() };

    let mut jobs = Vec::new();
    for image in 0..images.len() {
        for transform in 0..transforms.len() {
            jobs.extend(rs.iter().map(|&r| CompressJob { image, transform, r }));
        }
    }
    if a.recon.is_some() && jobs.len() != 1 {
        bail!("--recon needs exactly one image, transform and r ({} combinations requested)", jobs.len());
    }
    let run =
        || jobs.par_iter().map(|j| compress_image(&images[j.image], &transforms[j.transform], j.r).map(|o| (j.clone(), o))).collect::<Result<Vec<_>, _>>();
    let outputs = rayon::ThreadPoolBuilder::new().num_threads(a.parallel.max(1)).build()?.install(run)?;

    let header = "image,transform,r,bpp,mse,psnr_db,ssim\n";
    let mut all = String::from(header);
    let mut per_image = vec![String::from(header); images.len()];
    for (j, o) in &outputs {
        let r = &o.result;
        let line = format!("{},{},{},{},{},{},{}\n", labels[j.image], r.transform, r.r, sig6(r.bpp), sig6(r.mse), sig6(r.psnr), sig6(r.ssim));
        all.push_str(&line);
        per_image[j.image].push_str(&line);
    }
    if let Some(dir) = &a.per_image_dir {
        for (label, text) in labels.iter().zip(&per_image) {
            write_atomic(&dir.join(format!("{label}.csv")), text.as_bytes())?;
        }
    }
    if let Some(p) = &a.recon {
        pgm::write(p, &outputs[0].1.image)?;
    }
    emit(a.out.as_deref(), &all)?;
    Ok(ExitCode::SUCCESS)
}

pub fn catalog_text(a: &CatalogArgs) -> Result<String> {
    let mut recs = Vec::new();
    for name in names_or_catalog(&a.names)? {
        if name == "DCT" {
            continue;
        }
        let e = get_entry(name)?;
        recs.push(MatrixRecord::new(e.t.clone()).with_comment(catalog::describe(&e)).with_scale(e.pre_scale));
    }
    Ok(format_records(&recs))
}
