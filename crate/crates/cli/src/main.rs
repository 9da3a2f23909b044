//! `hodge-fischer`: dimension tables, decompositions of forms read from JSON,
//! and the verification suites.
//!
//! Exit codes: 0 ok, 2 parse error, 3 dimension error, 4 failed
//! precondition, 5 failed identity.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use hodge_fischer::decomposition::{
    fischer_decompose, harmonic_decompose, ker_project, monogenic_decompose, reconstruct,
    DecompositionError, MonogenicLayer,
};
use hodge_fischer::polyform::{FormError, GradedSlot, JsonFormError, PolyForm};
use hodge_fischer::spaces::{SlotDims, SpaceError};
use hodge_fischer::verify::{run_all, OperatorSet, VerifyConfig};

#[derive(Parser)]
#[command(name = "hodge-fischer", version, about = "Exact Fischer decompositions of polynomial differential forms")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Dimensions of P, Ker Δ, H, U, V, W for every slot up to degree K.
    Dims {
        #[arg(long)]
        m: usize,
        #[arg(long = "kmax")]
        k_max: usize,
        #[arg(long)]
        json: bool,
    },
    /// Decompose a form read from JSON.
    Decompose {
        #[arg(long, value_enum, default_value = "fischer")]
        mode: Mode,
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long = "out")]
        output: Option<PathBuf>,
    },
    /// Split a homogeneous harmonic form into its H, U, V, W blocks.
    Project {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long = "out")]
        output: Option<PathBuf>,
    },
    /// Run the verification suites.
    Verify {
        /// Comma-separated dimensions [default: 2,3; 1,2,3,4 with --deep]
        #[arg(long, value_delimiter = ',')]
        m: Option<Vec<usize>>,
        /// Degree bound [default: 3; 5 with --deep]
        #[arg(long = "kmax")]
        k_max: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 50)]
        trials: usize,
        #[arg(long)]
        deep: bool,
        #[arg(long, hide = true, value_enum)]
        inject_fault: Option<Fault>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Fischer,
    Monogenic,
    Harmonic,
}

#[derive(Clone, Copy, ValueEnum)]
enum Fault {
    DstarSign,
}

struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn new(code: u8, message: impl Into<String>) -> Self {
        Self {
            code,
            message: message.into(),
        }
    }
}

fn form_error(e: &FormError) -> Failure {
    let code = match e {
        FormError::NonIncreasingIndex { .. } | FormError::BadCoefficient(_) => 2,
        _ => 3,
    };
    Failure::new(code, e.to_string())
}

fn space_error(e: &SpaceError) -> Failure {
    match e {
        SpaceError::Form(f) => form_error(f),
        _ => Failure::new(5, e.to_string()),
    }
}

fn decomposition_error(e: &DecompositionError) -> Failure {
    match e {
        DecompositionError::NotHarmonic { image } => {
            Failure::new(4, format!("input is not harmonic; Laplacian = {image}"))
        }
        DecompositionError::NotMonogenic { image } => {
            Failure::new(4, format!("input is not monogenic; (d + d*) P = {image}"))
        }
        DecompositionError::NotInSlot { .. } | DecompositionError::NotOfDegree { .. } => {
            Failure::new(4, e.to_string())
        }
        DecompositionError::Space(s) => space_error(s),
        DecompositionError::Identity(_) => Failure::new(5, e.to_string()),
    }
}

fn read_form(path: &Path) -> Result<PolyForm, Failure> {
    let text = fs::read_to_string(path)
        .map_err(|e| Failure::new(2, format!("cannot read {}: {e}", path.display())))?;
    PolyForm::from_json(&text).map_err(|e| match e {
        JsonFormError::Syntax { .. } => Failure::new(2, format!("{}: {e}", path.display())),
        JsonFormError::Form(f) => form_error(&f),
    })
}

fn write_json(value: &impl Serialize, path: Option<&Path>) -> Result<(), Failure> {
    let text = serde_json::to_string_pretty(value).map_err(|e| Failure::new(5, e.to_string()))?;
    match path {
        Some(p) => fs::write(p, text + "\n")
            .map_err(|e| Failure::new(2, format!("cannot write {}: {e}", p.display()))),
        None => {
            println!("{text}");
            Ok(())
        }
    }
}

#[derive(Serialize)]
struct DimsRow {
    #[serde(flatten)]
    dims: SlotDims,
    balanced: bool,
}

#[derive(Serialize)]
struct DimsTable {
    m: usize,
    rows: Vec<DimsRow>,
}

fn cmd_dims(m: usize, k_max: usize, json: bool) -> Result<(), Failure> {
    if m == 0 {
        return Err(Failure::new(3, "m must be at least 1"));
    }
    let mut rows = Vec::new();
    for k in 0..=k_max {
        for s in 0..=m {
            let dims = SlotDims::compute(m, s, k).map_err(|e| space_error(&e))?;
            rows.push(DimsRow {
                balanced: dims.balanced(),
                dims,
            });
        }
    }
    if json {
        return write_json(&DimsTable { m, rows }, None);
    }
    println!("{:>3} {:>3} {:>7} {:>7} {:>7} {:>7} {:>7} {:>7}  check", "s", "k", "P", "Ker", "H", "U", "V", "W");
    for r in &rows {
        let d = &r.dims;
        println!(
            "{:>3} {:>3} {:>7} {:>7} {:>7} {:>7} {:>7} {:>7}  {}",
            d.s,
            d.k,
            d.p,
            d.ker,
            d.h,
            d.u,
            d.v,
            d.w,
            if r.balanced { "ok" } else { "MISMATCH" }
        );
    }
    if rows.iter().all(|r| r.balanced) {
        Ok(())
    } else {
        Err(Failure::new(5, "Ker ≠ H + U + V + W in some slot"))
    }
}

#[derive(Serialize)]
struct HarmonicLayerJson {
    s: usize,
    k: usize,
    p: usize,
    form: PolyForm,
}

#[derive(Serialize)]
struct MonogenicLayerJson {
    k: usize,
    p: usize,
    layer: MonogenicLayer,
    form: PolyForm,
}

#[derive(Serialize)]
struct LayersJson<T> {
    layers: Vec<T>,
}

fn exact(ok: bool) -> Result<(), Failure> {
    if ok {
        println!("reconstruction: exact");
        Ok(())
    } else {
        Err(Failure::new(5, "reconstruction failed"))
    }
}

fn cmd_decompose(mode: Mode, input: &Path, output: Option<&Path>) -> Result<(), Failure> {
    let p = read_form(input)?;
    let m = p.dim();
    match mode {
        Mode::Fischer => {
            let c = fischer_decompose(&p).map_err(|e| decomposition_error(&e))?;
            exact(reconstruct(&c) == p)?;
            write_json(&c.to_json(), output)
        }
        Mode::Harmonic => {
            let mut layers = Vec::new();
            let mut sum = PolyForm::zero(m);
            for (slot, part) in p.grade_split() {
                let h = harmonic_decompose(&part, slot).map_err(|e| decomposition_error(&e))?;
                sum = sum + h.reconstruct();
                for (q, form) in h.components {
                    layers.push(HarmonicLayerJson {
                        s: slot.s,
                        k: slot.k,
                        p: q,
                        form,
                    });
                }
            }
            exact(sum == p)?;
            write_json(&LayersJson { layers }, output)
        }
        Mode::Monogenic => {
            let mut layers = Vec::new();
            let mut sum = PolyForm::zero(m);
            for (k, part) in p.degree_split() {
                let l = monogenic_decompose(&part, k).map_err(|e| decomposition_error(&e))?;
                sum = sum + l.reconstruct();
                for ((q, layer), form) in l.components {
                    layers.push(MonogenicLayerJson { k, p: q, layer, form });
                }
            }
            exact(sum == p)?;
            write_json(&LayersJson { layers }, output)
        }
    }
}

#[derive(Serialize)]
struct Blocks {
    h: PolyForm,
    u: PolyForm,
    v: PolyForm,
    w: PolyForm,
}

/// Elements of `H` the `u`, `v`, `w` blocks are built from.
#[derive(Serialize)]
struct Certificates {
    u_source: PolyForm,
    v_source: PolyForm,
    w_source: PolyForm,
}

#[derive(Serialize)]
struct ProjectJson {
    s: usize,
    k: usize,
    blocks: Blocks,
    certificates: Certificates,
}

fn cmd_project(input: &Path, output: Option<&Path>) -> Result<(), Failure> {
    let p = read_form(input)?;
    let slot = if p.is_zero() {
        GradedSlot::new(0, 0)
    } else {
        p.homogeneous_slot()
            .ok_or_else(|| Failure::new(4, "input is not homogeneous in a single (s, k) slot"))?
    };
    let kb = ker_project(&p, slot).map_err(|e| decomposition_error(&e))?;
    kb.certify().map_err(|e| decomposition_error(&e))?;
    if kb.sum() != p {
        return Err(Failure::new(5, "h + u + v + w differs from the input"));
    }
    println!("slot: s={}, k={}", slot.s, slot.k);
    println!("sum check: h + u + v + w = input (exact)");
    write_json(
        &ProjectJson {
            s: slot.s,
            k: slot.k,
            blocks: Blocks {
                h: kb.h,
                u: kb.u,
                v: kb.v,
                w: kb.w,
            },
            certificates: Certificates {
                u_source: kb.u_source,
                v_source: kb.v_source,
                w_source: kb.w_source,
            },
        },
        output,
    )
}

fn cmd_verify(
    m: Option<Vec<usize>>,
    k_max: Option<usize>,
    seed: u64,
    trials: usize,
    deep: bool,
    fault: Option<Fault>,
) -> Result<(), Failure> {
    let base = if deep {
        VerifyConfig::deep()
    } else {
        VerifyConfig::default()
    };
    let dims = m.unwrap_or(base.dims);
    if dims.is_empty() || dims.contains(&0) {
        return Err(Failure::new(3, "every m must be at least 1"));
    }
    let cfg = VerifyConfig {
        dims,
        k_max: k_max.unwrap_or(base.k_max),
        seed,
        trials,
        ops: match fault {
            Some(Fault::DstarSign) => OperatorSet::flipped_dstar(),
            None => OperatorSet::standard(),
        },
    };
    println!(
        "verify: m={:?} kmax={} seed={} trials={}",
        cfg.dims, cfg.k_max, cfg.seed, cfg.trials
    );
    let reports = run_all(&cfg);
    for r in &reports {
        println!("{r}");
    }
    let failed = reports.iter().filter(|r| !r.passed()).count();
    if failed == 0 {
        println!("all {} suites passed", reports.len());
        Ok(())
    } else {
        Err(Failure::new(5, format!("{failed} of {} suites failed", reports.len())))
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Dims { m, k_max, json } => cmd_dims(m, k_max, json),
        Command::Decompose { mode, input, output } => cmd_decompose(mode, &input, output.as_deref()),
        Command::Project { input, output } => cmd_project(&input, output.as_deref()),
        Command::Verify {
            m,
            k_max,
            seed,
            trials,
            deep,
            inject_fault,
        } => cmd_verify(m, k_max, seed, trials, deep, inject_fault),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
