//! Command-line front end.
//!
//! Exit codes: 0 when a bound certifies GHZ-class entanglement (or the
//! command produces no verdict), 2 when the bound is inconclusive, 1 on any
//! error.

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context};
use clap::{Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::certify::{lower_bound, lower_bound_with_estimate, BoundReport, Verdict};
use crate::config::{Config, NormalFormConfig, OptConfig};
use crate::ghz_symmetric::{
    tau3_symmetric_approx, tau3_symmetric_exact, witness_expectation, SymCoords, WitnessKind, LOWER_CORNER,
};
use crate::linalg::{c, ComplexMatrix, DensityMatrix, PureState, C64};
use crate::states;
use crate::tomo::{
    bound_from_elements, ghz_elements_minimal, pit_record, reconstruct, PauliRecord, ReconstructMode,
};
use crate::twirl::{coords, tau3_approx_rho};
use crate::unitary_opt::Criterion;

pub const EXIT_CERTIFIED: i32 = 0;
pub const EXIT_ERROR: i32 = 1;
pub const EXIT_INCONCLUSIVE: i32 = 2;

#[derive(Parser, Debug)]
#[command(name = "tangle-bound", version, about = "Certified lower bounds to the three-tangle of three-qubit states")]
pub struct Cli {
    /// Worker threads for optimizer restarts
    #[arg(long, global = true, default_value_t = 1)]
    jobs: usize,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run the full pipeline and report the certified lower bound
    Bound {
        input: PathBuf,
        #[arg(long, value_enum, default_value_t = CriterionArg::Tau3)]
        criterion: CriterionArg,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 32)]
        restarts: usize,
        /// Also compute the geometric upper estimate
        #[arg(long)]
        error_estimate: bool,
        /// Write the machine-readable report here
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// Twirl coordinates, exact and approximate three-tangle, witness values
    Project {
        input: Option<PathBuf>,
        /// Dump an (x, y, tau3) grid over the triangle instead
        #[arg(long)]
        csv: Option<PathBuf>,
        #[arg(long, default_value_t = 101)]
        grid: usize,
    },
    /// Witness-plane bound on the raw state
    Approx { input: PathBuf },
    /// Reconstruct or extract from a Pauli expectation record
    Tomo {
        record: PathBuf,
        #[arg(long, value_enum, default_value_t = TomoMode::Full)]
        mode: TomoMode,
        /// Also extract Im(rho_{000,111}) (minimal mode)
        #[arg(long)]
        with_imag: bool,
        /// Treat missing labels as zero instead of failing
        #[arg(long)]
        partial: bool,
        /// Chain into the bound
        #[arg(long)]
        bound: bool,
        /// Write the reconstructed state file here
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 32)]
        restarts: usize,
    },
    /// Witness expectation values
    Witness {
        input: PathBuf,
        #[arg(long, value_enum, default_value_t = WitnessArg::All)]
        kind: WitnessArg,
    },
    /// Write one of the named example states
    Examples {
        #[arg(value_enum)]
        name: ExampleName,
        #[arg(long)]
        p: Option<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum CriterionArg {
    Tau3,
    Fidelity,
    Hs,
}

impl From<CriterionArg> for Criterion {
    fn from(c: CriterionArg) -> Self {
        match c {
            CriterionArg::Tau3 => Criterion::MaxTau3,
            CriterionArg::Fidelity => Criterion::MaxFidelity,
            CriterionArg::Hs => Criterion::MinHsDistance,
        }
    }
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum TomoMode {
    Full,
    Pit,
    Minimal,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum WitnessArg {
    Projector,
    Plus,
    Minus,
    All,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExampleName {
    Rho1,
    Rho2,
    Rho3,
    Ghz,
    W,
    FlippedGhz,
}

/// On-disk state: either a full matrix or pure-state amplitudes.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct StateFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub matrix_re: Option<Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub matrix_im: Option<Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pure: Option<Vec<[f64; 2]>>,
}

impl StateFile {
    pub fn from_matrix(name: Option<String>, m: &ComplexMatrix) -> Self {
        let re = (0..8).map(|i| (0..8).map(|j| m[(i, j)].re).collect()).collect();
        let im = (0..8).map(|i| (0..8).map(|j| m[(i, j)].im).collect()).collect();
        Self {
            name,
            matrix_re: Some(re),
            matrix_im: Some(im),
            pure: None,
        }
    }

    pub fn from_pure(name: Option<String>, psi: &PureState) -> Self {
        Self {
            name,
            pure: Some(psi.amplitudes().iter().map(|z| [z.re, z.im]).collect()),
            ..Default::default()
        }
    }

    pub fn to_state(&self) -> anyhow::Result<DensityMatrix> {
        match (&self.pure, &self.matrix_re) {
            (Some(_), Some(_)) => bail!("state file has both `pure` and `matrix_re`"),
            (Some(amp), None) => {
                if amp.len() != 8 {
                    bail!("`pure` needs 8 amplitudes, got {}", amp.len());
                }
                let a: [C64; 8] = std::array::from_fn(|i| c(amp[i][0], amp[i][1]));
                Ok(PureState::new(a)?.projector())
            }
            (None, Some(re)) => {
                let zero = vec![vec![0.0; 8]; 8];
                let im = self.matrix_im.as_ref().unwrap_or(&zero);
                let shape_ok = |m: &Vec<Vec<f64>>| m.len() == 8 && m.iter().all(|r| r.len() == 8);
                if !shape_ok(re) || !shape_ok(im) {
                    bail!("matrix_re and matrix_im must be 8x8");
                }
                let m = ComplexMatrix::from_fn(8, 8, |i, j| c(re[i][j], im[i][j]));
                Ok(DensityMatrix::new(m)?)
            }
            (None, None) => bail!("state file needs `matrix_re`/`matrix_im` or `pure`"),
        }
    }
}

/// Machine-readable output of `bound`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ReportFile {
    pub tool: String,
    pub version: String,
    pub input: String,
    pub input_sha256: String,
    pub criterion: Criterion,
    pub error_estimate: bool,
    pub config: Config,
    pub report: BoundReport,
}

/// JSON formatter writing every float with 17 significant digits.
struct FullPrecision;

impl serde_json::ser::Formatter for FullPrecision {
    fn write_f64<W: ?Sized + std::io::Write>(&mut self, writer: &mut W, value: f64) -> std::io::Result<()> {
        write!(writer, "{value:.16e}")
    }
}

pub fn to_json<T: Serialize>(value: &T) -> anyhow::Result<String> {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, FullPrecision);
    value.serialize(&mut ser)?;
    buf.push(b'\n');
    Ok(String::from_utf8(buf)?)
}

fn read_state(path: &Path) -> anyhow::Result<(DensityMatrix, Vec<u8>)> {
    let bytes = fs::read(path).with_context(|| format!("reading {}", path.display()))?;
    let file: StateFile =
        serde_json::from_slice(&bytes).with_context(|| format!("parsing {}", path.display()))?;
    let rho = file.to_state().with_context(|| format!("invalid state in {}", path.display()))?;
    Ok((rho, bytes))
}

fn write_out(path: Option<&Path>, text: &str, out: &mut dyn std::io::Write) -> anyhow::Result<()> {
    match path {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => Ok(out.write_all(text.as_bytes())?),
    }
}

fn verdict_code(v: Verdict) -> i32 {
    match v {
        Verdict::GhzClassCertified => EXIT_CERTIFIED,
        Verdict::Inconclusive => EXIT_INCONCLUSIVE,
    }
}

fn config_for(seed: u64, restarts: usize, jobs: usize) -> Config {
    Config {
        normal_form: NormalFormConfig::default(),
        opt: OptConfig {
            seed,
            restarts,
            jobs,
            ..Default::default()
        },
    }
}

fn print_report(r: &BoundReport, out: &mut dyn std::io::Write) -> anyhow::Result<()> {
    writeln!(out, "lower bound      {:.6}", r.lower_bound)?;
    writeln!(out, "verdict          {:?}", r.verdict)?;
    writeln!(out, "trace of NF      {:.6}{}", r.trace_nf, if r.degenerate_nf { " (degenerate)" } else { "" })?;
    writeln!(out, "NF cycles        {}{}", r.nf_iterations, if r.nf_converged { "" } else { " (not converged)" })?;
    writeln!(out, "coords after     ({:.6}, {:.6})", r.coords_after.x, r.coords_after.y)?;
    writeln!(out, "tau3 symmetric   {:.6}", r.tau3_symmetric)?;
    writeln!(out, "plane bound raw  {:.6}", r.approx_bound)?;
    writeln!(out, "spectral upper   {:.6}", r.upper_bound_spectral)?;
    writeln!(out, "fidelity (diag.) {:.6}", r.fidelity_heuristic)?;
    if let Some(e) = &r.error_estimate {
        match e.lambda {
            Some(l) => writeln!(out, "error estimate   upper {:.6} (lambda {:.6}, tau3- {:.6})", e.upper_bound, l, e.tau3_minus)?,
            None => writeln!(out, "error estimate   upper {:.6} (already symmetric)", e.upper_bound)?,
        }
    }
    Ok(())
}

fn cmd_bound(
    rho: &DensityMatrix,
    input_bytes: &[u8],
    input_name: &str,
    crit: Criterion,
    cfg: &Config,
    estimate: bool,
    json: Option<&Path>,
    out: &mut dyn std::io::Write,
) -> anyhow::Result<i32> {
    let report = if estimate {
        lower_bound_with_estimate(rho, crit, cfg)?
    } else {
        lower_bound(rho, crit, cfg)?
    };
    print_report(&report, out)?;
    if let Some(path) = json {
        let file = ReportFile {
            tool: env!("CARGO_PKG_NAME").to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            input: input_name.to_string(),
            input_sha256: hex::encode(Sha256::digest(input_bytes)),
            criterion: crit,
            error_estimate: estimate,
            config: *cfg,
            report: report.clone(),
        };
        fs::write(path, to_json(&file)?).with_context(|| format!("writing {}", path.display()))?;
    }
    Ok(verdict_code(report.verdict))
}

fn witness_label(k: WitnessKind) -> &'static str {
    match k {
        WitnessKind::ProjectorGHZ => "projector",
        WitnessKind::TangentPlus => "tangent+",
        WitnessKind::TangentMinus => "tangent-",
    }
}

fn print_witnesses(rho: &DensityMatrix, kinds: &[WitnessKind], out: &mut dyn std::io::Write) -> anyhow::Result<()> {
    for &k in kinds {
        let w = witness_expectation(rho, k);
        writeln!(
            out,
            "witness {:<10} tr(W rho) = {:.6}  tau3 >= {:.6}",
            witness_label(k),
            w.expectation,
            w.quantitative_tau3.max(0.0)
        )?;
    }
    Ok(())
}

/// Rows `x,y,tau3_exact,tau3_approx` over the physical part of an n x n grid.
pub fn csv_grid(n: usize) -> anyhow::Result<String> {
    if n < 2 {
        bail!("grid needs at least 2 points per axis");
    }
    let (y0, y1) = (LOWER_CORNER.1, 3f64.sqrt() / 4.0);
    let mut s = String::from("x,y,tau3_exact,tau3_approx\n");
    for i in 0..n {
        let y = y0 + (y1 - y0) * i as f64 / (n - 1) as f64;
        for j in 0..n {
            let x = -0.5 + j as f64 / (n - 1) as f64;
            let Ok(p) = SymCoords::new(x, y) else { continue };
            s.push_str(&format!(
                "{:.17e},{:.17e},{:.17e},{:.17e}\n",
                x,
                y,
                tau3_symmetric_exact(p)?,
                tau3_symmetric_approx(p)?
            ));
        }
    }
    Ok(s)
}

pub fn example_state(name: ExampleName, p: Option<f64>) -> anyhow::Result<StateFile> {
    let needs_p = matches!(name, ExampleName::Rho1 | ExampleName::Rho2);
    if needs_p && p.is_none() {
        bail!("this example needs --p");
    }
    if !needs_p && p.is_some() {
        bail!("this example takes no parameter");
    }
    Ok(match name {
        ExampleName::Rho1 => {
            let p = p.expect("checked");
            StateFile::from_matrix(Some(format!("rho1 p={p}")), states::rho1(p)?.matrix())
        }
        ExampleName::Rho2 => {
            let p = p.expect("checked");
            StateFile::from_matrix(Some(format!("rho2 p={p}")), states::rho2(p)?.matrix())
        }
        ExampleName::Rho3 => StateFile::from_matrix(Some("rho3".into()), states::rho3().matrix()),
        ExampleName::Ghz => StateFile::from_pure(Some("ghz".into()), &states::ghz_plus()),
        ExampleName::W => StateFile::from_pure(Some("w".into()), &states::w_state()),
        ExampleName::FlippedGhz => StateFile::from_pure(Some("flipped-ghz".into()), &states::flipped_ghz()),
    })
}

fn execute(cli: Cli, out: &mut dyn std::io::Write) -> anyhow::Result<i32> {
    let jobs = cli.jobs;
    match cli.command {
        Command::Bound {
            input,
            criterion,
            seed,
            restarts,
            error_estimate,
            json,
        } => {
            let (rho, bytes) = read_state(&input)?;
            let cfg = config_for(seed, restarts, jobs);
            let name = input.display().to_string();
            cmd_bound(&rho, &bytes, &name, criterion.into(), &cfg, error_estimate, json.as_deref(), out)
        }
        Command::Project { input, csv, grid } => {
            if let Some(path) = csv {
                fs::write(&path, csv_grid(grid)?).with_context(|| format!("writing {}", path.display()))?;
            }
            if let Some(input) = input {
                let (rho, _) = read_state(&input)?;
                let p = coords(&rho);
                writeln!(out, "x                {:.6}", p.x)?;
                writeln!(out, "y                {:.6}", p.y)?;
                writeln!(out, "tau3 exact       {:.6}", tau3_symmetric_exact(p)?)?;
                writeln!(out, "tau3 approx      {:.6}", tau3_symmetric_approx(p)?)?;
                print_witnesses(&rho, &WitnessKind::ALL, out)?;
            }
            Ok(EXIT_CERTIFIED)
        }
        Command::Approx { input } => {
            let (rho, _) = read_state(&input)?;
            writeln!(out, "tau3 approx      {:.6}", tau3_approx_rho(&rho))?;
            Ok(EXIT_CERTIFIED)
        }
        Command::Witness { input, kind } => {
            let (rho, _) = read_state(&input)?;
            let kinds: &[WitnessKind] = match kind {
                WitnessArg::Projector => &[WitnessKind::ProjectorGHZ],
                WitnessArg::Plus => &[WitnessKind::TangentPlus],
                WitnessArg::Minus => &[WitnessKind::TangentMinus],
                WitnessArg::All => &WitnessKind::ALL,
            };
            print_witnesses(&rho, kinds, out)?;
            Ok(EXIT_CERTIFIED)
        }
        Command::Tomo {
            record,
            mode,
            with_imag,
            partial,
            bound,
            out: out_path,
            seed,
            restarts,
        } => {
            let text = fs::read_to_string(&record).with_context(|| format!("reading {}", record.display()))?;
            let rec = PauliRecord::parse(&text).with_context(|| format!("parsing {}", record.display()))?;
            if mode == TomoMode::Minimal {
                let e = ghz_elements_minimal(&rec, with_imag)?;
                let b = bound_from_elements(&e);
                writeln!(out, "p000             {:.6}", e.p000)?;
                writeln!(out, "p111             {:.6}", e.p111)?;
                writeln!(out, "Re c             {:.6}", e.c_re)?;
                if let Some(im) = e.c_im {
                    writeln!(out, "Im c             {:.6}", im)?;
                }
                writeln!(out, "plane bound      {:.6}", b)?;
                return Ok(if bound && b <= 0.0 { EXIT_INCONCLUSIVE } else { EXIT_CERTIFIED });
            }
            let rec = if mode == TomoMode::Pit { pit_record(&rec) } else { rec };
            let rmode = if partial { ReconstructMode::Partial } else { ReconstructMode::Strict };
            let (rho, missing) = reconstruct(&rec, rmode)?;
            if !missing.is_empty() {
                eprintln!("warning: {} labels missing, taken as zero: {}", missing.len(), missing.join(" "));
            }
            let file = StateFile::from_matrix(Some(record.display().to_string()), rho.matrix());
            let json = to_json(&file)?;
            if bound {
                if let Some(p) = &out_path {
                    fs::write(p, &json).with_context(|| format!("writing {}", p.display()))?;
                }
                let cfg = config_for(seed, restarts, jobs);
                cmd_bound(&rho, json.as_bytes(), &record.display().to_string(), Criterion::MaxTau3, &cfg, false, None, out)
            } else {
                write_out(out_path.as_deref(), &json, out)?;
                Ok(EXIT_CERTIFIED)
            }
        }
        Command::Examples { name, p, out: out_path } => {
            let file = example_state(name, p)?;
            write_out(out_path.as_deref(), &to_json(&file)?, out)?;
            Ok(EXIT_CERTIFIED)
        }
    }
}

/// Parses `args` (including the program name), runs, and returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_ERROR } else { EXIT_CERTIFIED };
        }
    };
    let stdout = std::io::stdout();
    let mut lock = stdout.lock();
    match execute(cli, &mut lock) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            EXIT_ERROR
        }
    }
}
