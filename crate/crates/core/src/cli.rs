//! The `pskel` command line.
//!
//! Exit codes: 0 when every report is internally consistent, 1 when a report
//! contradicts the characterization it checks (a bug detector), 2 for usage,
//! parse and I/O errors.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::Serialize;

use crate::cur::{select_indices, verify_cur, Budget, CurReport, SCHEMA_VERSION};
use crate::error::Error;
use crate::field::{Complexes, Field, FieldSpec, PrimeField, Rationals, Reals};
use crate::geninv::{
    drazin_inverse, enumerate_generalized_inverses, inverse_count, is_generalized_inverse, moore_penrose,
    mp_conditions, satisfies_drazin_axioms, InverseSampler, DEFAULT_ENUM_CAP,
};
use crate::io::{parse_matrix, parse_tensor, peek_field, write_matrix, write_tensor};
use crate::matrix::{random_rank_matrix, IndexSet, Matrix};
use crate::seeded_rng;
use crate::tensor::{
    chidori_cur, fiber_cur, random_low_mlrank_tensor, select_chidori_indices, select_fiber_indices, Tensor,
    TensorCurReport, DEFAULT_TUPLES,
};
use crate::tprod::{select_tcur_indices, t_product, verify_tcur, Spectral, TcurReport};

const GEN_RETRIES: usize = 100;

#[derive(Debug, thiserror::Error)]
enum CliError {
    #[error(transparent)]
    Lib(#[from] Error),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{0}")]
    Usage(String),
}

type CliResult<T> = std::result::Result<T, CliError>;

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

#[derive(Parser, Debug)]
#[command(
    name = "pskel",
    version,
    about = "Generalized pseudoskeleton (CUR) decompositions over arbitrary fields"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Write a random matrix or tensor with a prescribed rank.
    Gen(GenArgs),
    /// Check a CUR characterization on one instance.
    Verify {
        #[command(subcommand)]
        kind: VerifyKind,
    },
    /// Sample, enumerate or classify generalized inverses of a matrix.
    Geninv(GeninvArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Args, Debug)]
struct GenArgs {
    /// gf <p>, rational, real or complex
    #[arg(long, value_parser = parse_spec)]
    field: FieldSpec,
    /// e.g. 4x6 for a matrix, 4x5x6 for a tensor
    #[arg(long)]
    shape: String,
    /// Matrix rank.
    #[arg(long, conflicts_with_all = ["mlrank", "tubal_rank"])]
    rank: Option<usize>,
    /// Multilinear rank, comma separated.
    #[arg(long, conflicts_with = "tubal_rank")]
    mlrank: Option<String>,
    /// Build a 3-mode real or complex tensor as a t-product through this
    /// middle size.
    #[arg(long)]
    tubal_rank: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    eps: Option<f64>,
}

#[derive(Subcommand, Debug)]
enum VerifyKind {
    /// Matrix CUR: ten equivalent conditions.
    Cur(VerifyArgs),
    /// Fiber CUR of an n-mode tensor; one --rows and one --cols per mode.
    Fiber(VerifyArgs),
    /// Chidori CUR of an n-mode tensor; one --rows per mode.
    Chidori(VerifyArgs),
    /// t-CUR of a real or complex 3-mode tensor.
    Tcur(VerifyArgs),
}

#[derive(Args, Debug)]
struct VerifyArgs {
    file: PathBuf,
    /// Row index set, 1-based and comma separated (`all` for every index).
    #[arg(long)]
    rows: Vec<String>,
    /// Column index set.
    #[arg(long)]
    cols: Vec<String>,
    /// Pick indices by pivoting instead of --rows/--cols.
    #[arg(long, conflicts_with_all = ["rows", "cols"])]
    auto_indices: bool,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Inverses (or tuples) sampled per quantifier when enumeration is out of
    /// reach.
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    samples: Option<u64>,
    #[arg(long, default_value_t = DEFAULT_ENUM_CAP, value_parser = clap::value_parser!(u64).range(1..))]
    enum_cap: u64,
    /// Repeat with seeds seed, seed+1, ...
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..))]
    trials: u64,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    #[arg(long)]
    eps: Option<f64>,
}

#[derive(Args, Debug)]
struct GeninvArgs {
    file: PathBuf,
    /// List every generalized inverse (finite fields only).
    #[arg(long)]
    enumerate: bool,
    #[arg(long, default_value_t = 1)]
    samples: usize,
    /// Moore-Penrose pseudoinverse (real and complex only).
    #[arg(long)]
    mp: bool,
    /// Drazin inverse and index (square matrices only).
    #[arg(long)]
    drazin: bool,
    #[arg(long, default_value_t = DEFAULT_ENUM_CAP, value_parser = clap::value_parser!(u64).range(1..))]
    enum_cap: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    #[arg(long)]
    eps: Option<f64>,
}

fn parse_spec(s: &str) -> Result<FieldSpec, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

/// Runs the command line and returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let result = match cli.command {
        Command::Gen(a) => cmd_gen(&a),
        Command::Verify { kind } => cmd_verify(kind),
        Command::Geninv(a) => cmd_geninv(&a),
    };
    match result {
        Ok(consistent) => i32::from(!consistent),
        Err(e) => {
            eprintln!("error: {e}");
            2
        }
    }
}

/// Dispatches `$body` on the concrete field named by `$spec`.
macro_rules! with_field {
    ($spec:expr, |$f:ident| $body:expr) => {
        match $spec {
            FieldSpec::Prime(p) => {
                let $f = PrimeField::new(p)?;
                $body
            }
            FieldSpec::Rational => {
                let $f = Rationals;
                $body
            }
            FieldSpec::Real { eps } => {
                let $f = Reals::new(eps);
                $body
            }
            FieldSpec::Complex { eps } => {
                let $f = Complexes::new(eps);
                $body
            }
        }
    };
}

fn with_eps(spec: FieldSpec, eps: Option<f64>) -> CliResult<FieldSpec> {
    let spec = match eps {
        Some(e) => spec.with_eps(e),
        None => spec,
    };
    spec.validate()?;
    Ok(spec)
}

fn read(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn emit(out: Option<&Path>, text: &str) -> CliResult<()> {
    match out {
        Some(path) => fs::write(path, text).map_err(|source| CliError::Io {
            path: path.to_path_buf(),
            source,
        }),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes()).map_err(|source| CliError::Io {
                path: PathBuf::from("<stdout>"),
                source,
            })
        }
    }
}

fn parse_list(s: &str, what: &str) -> CliResult<Vec<usize>> {
    s.split(['x', ','])
        .map(|t| {
            t.trim()
                .parse::<usize>()
                .map_err(|_| usage(format!("bad {what} `{s}`")))
        })
        .collect()
}

// gen

fn cmd_gen(a: &GenArgs) -> CliResult<bool> {
    let spec = with_eps(a.field, a.eps)?;
    let shape = parse_list(&a.shape, "shape")?;
    if shape.is_empty() {
        return Err(usage("empty shape"));
    }
    let mut rng = seeded_rng(a.seed);
    let (text, summary) = with_field!(spec, |f| {
        if let Some(r) = a.tubal_rank {
            gen_tubal(&f, &shape, r, &mut rng)?
        } else if let Some(ml) = &a.mlrank {
            let target = parse_list(ml, "multilinear rank")?;
            let t = random_low_mlrank_tensor(&f, &shape, &target, &mut rng)?;
            (write_tensor(&t), format!("multilinear rank {}", t.multilinear_rank()))
        } else if shape.len() == 2 {
            let m = match a.rank {
                Some(r) => random_rank_matrix(&f, shape[0], shape[1], r, &mut rng, GEN_RETRIES)?,
                None => Matrix::random(&f, shape[0], shape[1], &mut rng),
            };
            (write_matrix(&m), format!("rank {}", m.rank()))
        } else if a.rank.is_some() {
            return Err(usage("--rank needs a two-mode shape; use --mlrank for tensors"));
        } else {
            let t = Tensor::random(&f, &shape, &mut rng);
            (write_tensor(&t), format!("multilinear rank {}", t.multilinear_rank()))
        }
    });
    emit(a.out.as_deref(), &text)?;
    if a.out.is_some() {
        println!("{summary}");
    } else {
        eprintln!("{summary}");
    }
    Ok(true)
}

trait MaybeSpectral: Field {
    fn tubal<R: rand::Rng + ?Sized>(&self, shape: &[usize], r: usize, rng: &mut R) -> CliResult<Tensor<Self>>;
}

macro_rules! no_tubal {
    ($($t:ty),*) => {$(
        impl MaybeSpectral for $t {
            fn tubal<R: rand::Rng + ?Sized>(&self, _: &[usize], _: usize, _: &mut R) -> CliResult<Tensor<Self>> {
                Err(Error::UnsupportedField("the t-product").into())
            }
        }
    )*};
}
no_tubal!(PrimeField, Rationals);

macro_rules! tubal {
    ($($t:ty),*) => {$(
        impl MaybeSpectral for $t {
            fn tubal<R: rand::Rng + ?Sized>(&self, shape: &[usize], r: usize, rng: &mut R) -> CliResult<Tensor<Self>> {
                let x = Tensor::random(self, &[shape[0], r, shape[2]], rng);
                let y = Tensor::random(self, &[r, shape[1], shape[2]], rng);
                Ok(t_product(&x, &y)?)
            }
        }
    )*};
}
tubal!(Reals, Complexes);

fn gen_tubal<F: MaybeSpectral, R: rand::Rng + ?Sized>(
    f: &F,
    shape: &[usize],
    r: usize,
    rng: &mut R,
) -> CliResult<(String, String)> {
    if shape.len() != 3 {
        return Err(usage("--tubal-rank needs a three-mode shape"));
    }
    let t = f.tubal(shape, r, rng)?;
    Ok((
        write_tensor(&t),
        format!("tubal rank at most {r}, multilinear rank {}", t.multilinear_rank()),
    ))
}

// verify

/// A report the command line can print and judge.
trait Report: Serialize + Send {
    fn consistent(&self) -> bool;
    fn text(&self) -> String;
}

fn flag_lines(names: &[&str], flags: &[(bool, String)]) -> String {
    names
        .iter()
        .zip(flags)
        .map(|(n, (v, mode))| format!("  {n:<5} {v:<5} ({mode})\n"))
        .collect()
}

fn mode_name<T: Serialize>(mode: &T) -> String {
    serde_json::to_value(mode)
        .ok()
        .and_then(|v| v.as_str().map(str::to_string))
        .unwrap_or_default()
}

fn verdict(ok: bool) -> &'static str {
    if ok {
        "consistent"
    } else {
        "INCONSISTENT"
    }
}

fn notes_text(notes: &[String]) -> String {
    notes.iter().map(|n| format!("note: {n}\n")).collect()
}

const ROMAN: [&str; 10] = ["i", "ii", "iii", "iv", "v", "vi", "vii", "viii", "ix", "x"];

impl Report for CurReport {
    fn consistent(&self) -> bool {
        self.is_consistent()
    }

    fn text(&self) -> String {
        let c = &self.conditions;
        let flags: Vec<(bool, String)> = [c.i, c.ii, c.iii, c.iv, c.v, c.vi, c.vii, c.viii, c.ix, c.x]
            .iter()
            .map(|f| (f.value, mode_name(&f.mode)))
            .collect();
        format!(
            "cur over {}, {}x{}, I={} J={}, seed {}\nranks: A={} C={} U={} R={}\n{}{}{}\n",
            self.field,
            self.shape[0],
            self.shape[1],
            self.rows,
            self.cols,
            self.seed,
            self.ranks.a,
            self.ranks.c,
            self.ranks.u,
            self.ranks.r,
            flag_lines(&ROMAN, &flags),
            notes_text(&self.notes),
            verdict(self.is_consistent())
        )
    }
}

fn sets_text(sets: &[IndexSet]) -> String {
    sets.iter().map(ToString::to_string).collect::<Vec<_>>().join(" ")
}

impl Report for TensorCurReport {
    fn consistent(&self) -> bool {
        self.is_consistent()
    }

    fn text(&self) -> String {
        let c = &self.conditions;
        let mut flags: Vec<(bool, String)> = [c.i, c.ii, c.iii, c.iv]
            .iter()
            .map(|f| (f.value, mode_name(&f.mode)))
            .collect();
        if let Some(v) = c.v {
            flags.push((v.value, mode_name(&v.mode)));
        }
        let cols = self
            .cols
            .as_ref()
            .map(|c| format!(" J: {}", sets_text(c)))
            .unwrap_or_default();
        format!(
            "{} cur over {}, shape {:?}, seed {}\nI: {}{}\nmultilinear rank {} core {}\n{}  proj  {:<5} ({})\n{}{}\n",
            self.kind,
            self.field,
            self.shape,
            self.seed,
            sets_text(&self.rows),
            cols,
            self.mlrank,
            self.core_mlrank,
            flag_lines(&ROMAN, &flags),
            self.self_projection.value,
            mode_name(&self.self_projection.mode),
            notes_text(&self.notes),
            verdict(self.is_consistent())
        )
    }
}

impl Report for TcurReport {
    fn consistent(&self) -> bool {
        self.is_consistent()
    }

    fn text(&self) -> String {
        let c = &self.conditions;
        let flags: Vec<(bool, String)> = [c.i, c.ii, c.iii, c.iv, c.v, c.vi, c.vii, c.viii]
            .iter()
            .map(|f| (f.value, mode_name(&f.mode)))
            .collect();
        format!(
            "tcur over {}, shape {:?}, I={} J={}, seed {}\nface ranks T={:?} U={:?}\nreconstruction error {:e}\n{}{}{}\n",
            self.field,
            self.shape,
            self.rows,
            self.cols,
            self.seed,
            self.face_ranks.t,
            self.face_ranks.u,
            self.reconstruction_error,
            flag_lines(&ROMAN, &flags),
            notes_text(&self.notes),
            verdict(self.is_consistent())
        )
    }
}

#[derive(Serialize)]
struct Trials<T> {
    schema: u32,
    trials: Vec<T>,
}

fn finish<T: Report>(reports: Vec<T>, args: &VerifyArgs) -> CliResult<bool> {
    let consistent = reports.iter().all(Report::consistent);
    let text = match args.format {
        Format::Text => reports.iter().map(Report::text).collect::<Vec<_>>().join("\n"),
        Format::Json if reports.len() == 1 => json(&reports[0]),
        Format::Json => json(&Trials {
            schema: SCHEMA_VERSION,
            trials: reports,
        }),
    };
    emit(args.out.as_deref(), &text)?;
    Ok(consistent)
}

fn json<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("reports serialize");
    s.push('\n');
    s
}

/// Runs one verification per trial seed, in parallel, in seed order.
fn trials<T, G>(args: &VerifyArgs, one: G) -> CliResult<Vec<T>>
where
    T: Report,
    G: Fn(u64) -> CliResult<T> + Sync,
{
    (0..args.trials)
        .into_par_iter()
        .map(|k| one(args.seed.wrapping_add(k)))
        .collect()
}

fn budget(args: &VerifyArgs, default_samples: usize, seed: u64) -> Budget {
    Budget {
        samples: args.samples.map_or(default_samples, |s| s as usize),
        enum_cap: args.enum_cap,
        seed,
    }
}

fn single(sets: &[String], bound: usize, what: &str) -> CliResult<IndexSet> {
    match sets {
        [s] => Ok(IndexSet::parse(s, bound)?),
        _ => Err(usage(format!("give exactly one --{what} or --auto-indices"))),
    }
}

fn per_mode(sets: &[String], shape: &[usize], what: &str) -> CliResult<Vec<IndexSet>> {
    if sets.len() != shape.len() {
        return Err(usage(format!(
            "give one --{what} per mode ({} modes) or --auto-indices",
            shape.len()
        )));
    }
    sets.iter()
        .zip(shape)
        .map(|(s, &d)| Ok(IndexSet::parse(s, d)?))
        .collect()
}

fn cmd_verify(kind: VerifyKind) -> CliResult<bool> {
    match kind {
        VerifyKind::Cur(a) => verify_file(&a, Kind::Cur),
        VerifyKind::Fiber(a) => verify_file(&a, Kind::Fiber),
        VerifyKind::Chidori(a) => verify_file(&a, Kind::Chidori),
        VerifyKind::Tcur(a) => verify_file(&a, Kind::Tcur),
    }
}

#[derive(Clone, Copy)]
enum Kind {
    Cur,
    Fiber,
    Chidori,
    Tcur,
}

fn verify_file(args: &VerifyArgs, kind: Kind) -> CliResult<bool> {
    let text = read(&args.file)?;
    let spec = with_eps(peek_field(&text)?, args.eps)?;
    with_field!(spec, |f| match kind {
        Kind::Cur => run_cur(&f, &text, args),
        Kind::Fiber | Kind::Chidori => run_tensor(&f, &text, args, matches!(kind, Kind::Chidori)),
        Kind::Tcur => f.run_tcur(&text, args),
    })
}

fn run_cur<F: Field>(f: &F, text: &str, args: &VerifyArgs) -> CliResult<bool> {
    let a = parse_matrix(f, text)?;
    let fixed = if args.auto_indices {
        None
    } else {
        Some((
            single(&args.rows, a.rows(), "rows")?,
            single(&args.cols, a.cols(), "cols")?,
        ))
    };
    let reports = trials(args, |seed| {
        let (rows, cols) = match &fixed {
            Some(sets) => sets.clone(),
            None => select_indices(&a, &mut seeded_rng(seed)),
        };
        Ok(verify_cur(
            &a,
            &rows,
            &cols,
            &budget(args, Budget::default().samples, seed),
        )?)
    })?;
    finish(reports, args)
}

fn run_tensor<F: Field>(f: &F, text: &str, args: &VerifyArgs, chidori: bool) -> CliResult<bool> {
    let t = parse_tensor(f, text)?;
    let fixed = if args.auto_indices {
        None
    } else if chidori {
        Some((per_mode(&args.rows, t.shape(), "rows")?, Vec::new()))
    } else {
        let bounds: Vec<usize> = (0..t.order()).map(|i| t.len() / t.shape()[i].max(1)).collect();
        Some((
            per_mode(&args.rows, t.shape(), "rows")?,
            per_mode(&args.cols, &bounds, "cols")?,
        ))
    };
    let reports = trials(args, |seed| {
        let b = budget(args, DEFAULT_TUPLES, seed);
        let mut rng = seeded_rng(seed);
        if chidori {
            let rows = match &fixed {
                Some((rows, _)) => rows.clone(),
                None => select_chidori_indices(&t, &mut rng),
            };
            Ok(chidori_cur(&t, &rows, &b)?)
        } else {
            let (rows, cols) = match &fixed {
                Some(sets) => sets.clone(),
                None => select_fiber_indices(&t, &mut rng),
            };
            Ok(fiber_cur(&t, &rows, &cols, &b)?)
        }
    })?;
    finish(reports, args)
}

trait TcurDispatch: Field {
    fn run_tcur(&self, text: &str, args: &VerifyArgs) -> CliResult<bool>;
}

impl TcurDispatch for PrimeField {
    fn run_tcur(&self, _: &str, _: &VerifyArgs) -> CliResult<bool> {
        Err(Error::UnsupportedField("the t-product").into())
    }
}

impl TcurDispatch for Rationals {
    fn run_tcur(&self, _: &str, _: &VerifyArgs) -> CliResult<bool> {
        Err(Error::UnsupportedField("the t-product").into())
    }
}

impl TcurDispatch for Reals {
    fn run_tcur(&self, text: &str, args: &VerifyArgs) -> CliResult<bool> {
        run_tcur(self, text, args)
    }
}

impl TcurDispatch for Complexes {
    fn run_tcur(&self, text: &str, args: &VerifyArgs) -> CliResult<bool> {
        run_tcur(self, text, args)
    }
}

fn run_tcur<F: Spectral>(f: &F, text: &str, args: &VerifyArgs) -> CliResult<bool> {
    let t = parse_tensor(f, text)?;
    if t.order() != 3 {
        return Err(usage(format!("tcur needs a 3-mode tensor, got {} modes", t.order())));
    }
    let fixed = if args.auto_indices {
        None
    } else {
        Some((
            single(&args.rows, t.shape()[0], "rows")?,
            single(&args.cols, t.shape()[1], "cols")?,
        ))
    };
    let reports = trials(args, |seed| {
        let (rows, cols) = match &fixed {
            Some(sets) => sets.clone(),
            None => select_tcur_indices(&t, &mut seeded_rng(seed))?,
        };
        Ok(verify_tcur(
            &t,
            &rows,
            &cols,
            &budget(args, Budget::default().samples, seed),
        )?)
    })?;
    finish::<TcurReport>(reports, args)
}

// geninv

#[derive(Serialize)]
struct SampleEntry {
    inverse: Vec<Vec<String>>,
    generalized: bool,
    /// Moore-Penrose conditions the sample satisfies.
    mp: Vec<u8>,
}

#[derive(Serialize)]
struct MpEntry {
    inverse: Vec<Vec<String>>,
    mp: Vec<u8>,
}

#[derive(Serialize)]
struct DrazinEntry {
    inverse: Vec<Vec<String>>,
    index: u32,
    axioms: bool,
    generalized: bool,
}

#[derive(Serialize)]
struct GeninvReport {
    schema: u32,
    kind: &'static str,
    field: FieldSpec,
    shape: [usize; 2],
    rank: usize,
    /// Number of generalized inverses, finite fields only.
    #[serde(skip_serializing_if = "Option::is_none")]
    count: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    enumerated: Option<Vec<Vec<Vec<String>>>>,
    samples: Vec<SampleEntry>,
    #[serde(skip_serializing_if = "Option::is_none")]
    moore_penrose: Option<MpEntry>,
    #[serde(skip_serializing_if = "Option::is_none")]
    drazin: Option<DrazinEntry>,
    seed: u64,
}

impl GeninvReport {
    fn consistent(&self) -> bool {
        let enumerated_ok = match (&self.enumerated, &self.count) {
            (Some(list), Some(count)) => list.len().to_string() == *count,
            _ => true,
        };
        enumerated_ok
            && self.samples.iter().all(|s| s.generalized && s.mp.contains(&1))
            && self.moore_penrose.as_ref().is_none_or(|m| m.mp == [1, 2, 3, 4])
            && self.drazin.as_ref().is_none_or(|d| d.axioms)
    }

    fn text(&self) -> String {
        let mut out = format!(
            "geninv over {}, {}x{}, rank {}, seed {}\n",
            self.field, self.shape[0], self.shape[1], self.rank, self.seed
        );
        if let Some(c) = &self.count {
            out.push_str(&format!("generalized inverses: {c}\n"));
        }
        let show = |m: &[Vec<String>]| m.iter().map(|r| format!("  {}\n", r.join(" "))).collect::<String>();
        if let Some(list) = &self.enumerated {
            for (k, m) in list.iter().enumerate() {
                out.push_str(&format!("inverse {}:\n{}", k + 1, show(m)));
            }
        }
        for (k, s) in self.samples.iter().enumerate() {
            out.push_str(&format!(
                "sample {} (conditions {:?}):\n{}",
                k + 1,
                s.mp,
                show(&s.inverse)
            ));
        }
        if let Some(m) = &self.moore_penrose {
            out.push_str(&format!("moore-penrose (conditions {:?}):\n{}", m.mp, show(&m.inverse)));
        }
        if let Some(d) = &self.drazin {
            out.push_str(&format!(
                "drazin, index {}, axioms {}, generalized inverse {}:\n{}",
                d.index,
                d.axioms,
                d.generalized,
                show(&d.inverse)
            ));
        }
        out.push_str(verdict(self.consistent()));
        out.push('\n');
        out
    }
}

fn rows_of<F: Field>(m: &Matrix<F>) -> Vec<Vec<String>> {
    (0..m.rows())
        .map(|i| m.row(i).iter().map(|a| m.field().format_elem(a)).collect())
        .collect()
}

fn cmd_geninv(args: &GeninvArgs) -> CliResult<bool> {
    let text = read(&args.file)?;
    let spec = with_eps(peek_field(&text)?, args.eps)?;
    let report = with_field!(spec, |f| geninv_report(&f, &text, args)?);
    let out = match args.format {
        Format::Json => json(&report),
        Format::Text => report.text(),
    };
    emit(args.out.as_deref(), &out)?;
    Ok(report.consistent())
}

fn geninv_report<F: Field>(f: &F, text: &str, args: &GeninvArgs) -> CliResult<GeninvReport> {
    let a = parse_matrix(f, text)?;
    let mut rng = seeded_rng(args.seed);
    let sampler = InverseSampler::new(&a);
    let count = f
        .order()
        .map(|q| inverse_count(q, a.rows(), a.cols(), sampler.rank()).to_string());
    let enumerated = if args.enumerate {
        let list = enumerate_generalized_inverses(&a, args.enum_cap)?;
        Some(list.map(|m| rows_of(&m)).collect())
    } else {
        None
    };
    let samples = (0..args.samples)
        .map(|_| {
            let b = sampler.sample(&mut rng);
            Ok(SampleEntry {
                generalized: is_generalized_inverse(&a, &b)?,
                mp: mp_conditions(&a, &b)?.satisfied(),
                inverse: rows_of(&b),
            })
        })
        .collect::<CliResult<Vec<_>>>()?;
    let moore_penrose = if args.mp {
        let p = moore_penrose(&a)?;
        Some(MpEntry {
            mp: mp_conditions(&a, &p)?.satisfied(),
            inverse: rows_of(&p),
        })
    } else {
        None
    };
    let drazin = if args.drazin {
        let d = drazin_inverse(&a)?;
        Some(DrazinEntry {
            axioms: satisfies_drazin_axioms(&a, &d.inverse, d.index)?,
            generalized: is_generalized_inverse(&a, &d.inverse)?,
            index: d.index,
            inverse: rows_of(&d.inverse),
        })
    } else {
        None
    };
    Ok(GeninvReport {
        schema: SCHEMA_VERSION,
        kind: "geninv",
        field: f.spec(),
        shape: [a.rows(), a.cols()],
        rank: sampler.rank(),
        count,
        enumerated,
        samples,
        moore_penrose,
        drazin,
        seed: args.seed,
    })
}
