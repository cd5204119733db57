//! `lamina` command-line front end.
//!
//! Exit codes: 0 success, 1 bad input or usage, 2 budget exhausted or a
//! numerical or axiom check that did not come out clean, 3 internal error.

use std::fmt::Write as _;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use lamina_core::error::Error;
use lamina_core::group::limit_set_sample_with;
use lamina_core::hyperbolic::{DiskPoint, HPoint, Tolerances, EPS_THETA, EPS_TRACE};
use lamina_core::lamination::{
    axiom_report, escape_test, AxiomStatus, LaminationApprox, Laminations, Params,
};
use lamina_core::markov::{
    admissible_words, build_matrix_a, build_matrix_b, invariant_measures, perron, to_f64, to_rows,
    verify_markov, PERRON_MAXITER, PERRON_TOL,
};
use lamina_core::render::{render_svg, Layer, RenderStyle};
use lamina_core::scene::{parse_scene_with, Scene};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 1;
pub const EXIT_FLAGGED: i32 = 2;
pub const EXIT_INTERNAL: i32 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "lamina",
    version,
    about = "Laminations, limit sets and Markov codings from scene files"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct Shared {
    /// Scene file (JSON).
    scene: PathBuf,
    /// Convergence tolerance for limit chains and Perron iteration.
    #[arg(long)]
    tol: Option<f64>,
    /// Iterate horizon.
    #[arg(long, default_value_t = 12)]
    horizon: u32,
    /// Conjugator ball radius.
    #[arg(long, default_value_t = 3)]
    ball: usize,
    /// Angular tolerance on the boundary circle, in radians.
    #[arg(long, default_value_t = EPS_THETA)]
    eps_theta: f64,
    /// Trace tolerance separating hyperbolic from parabolic.
    #[arg(long, default_value_t = EPS_TRACE)]
    eps_trace: f64,
    /// Also write the report as JSON to this path.
    #[arg(long, value_name = "PATH")]
    json: Option<PathBuf>,
}

impl Shared {
    fn tolerances(&self) -> Tolerances {
        Tolerances {
            eps_theta: self.eps_theta,
            eps_trace: self.eps_trace,
        }
    }

    fn params(&self) -> Params {
        Params {
            horizon: self.horizon,
            ball: self.ball,
            tol: self.tol.unwrap_or(Params::default().tol),
            tolerances: self.tolerances(),
            ..Params::default()
        }
    }
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Sample the limit set from an orbit of i and short-word fixed points.
    LimitSet {
        #[command(flatten)]
        shared: Shared,
        #[arg(long, default_value_t = 6)]
        depth: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Extract limit leaves of both laminations and audit crossings.
    Laminate {
        #[command(flatten)]
        shared: Shared,
    },
    /// Escape test for every juncture.
    Escape {
        #[command(flatten)]
        shared: Shared,
    },
    /// Check the axioms on the finite approximation.
    Axioms {
        #[command(flatten)]
        shared: Shared,
    },
    /// Markov family tools.
    #[command(subcommand)]
    Markov(MarkovCommand),
    /// Draw juncture families and laminations.
    Render {
        #[command(flatten)]
        shared: Shared,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Debug, Subcommand)]
enum MarkovCommand {
    /// Check that every crossing has at most one component.
    Verify {
        #[command(flatten)]
        shared: Shared,
    },
    /// Perron eigenvalue and entropy of the transition matrix.
    Entropy {
        #[command(flatten)]
        shared: Shared,
    },
    /// Invariant transverse measures from the component-count matrix.
    Measure {
        #[command(flatten)]
        shared: Shared,
    },
    /// Count and list admissible words.
    Words {
        #[command(flatten)]
        shared: Shared,
        #[arg(long)]
        length: usize,
        /// List the words when there are at most this many.
        #[arg(long, default_value_t = 64)]
        list: u128,
    },
}

/// A failed run: exit code plus message for standard error.
#[derive(Debug)]
struct Failure {
    code: i32,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Validation(_) | Error::Scene { .. } | Error::ZeroMatrix => EXIT_INPUT,
            Error::Budget { .. } => EXIT_FLAGGED,
            Error::NumericDegeneracy(_) | Error::NotHyperbolic { .. } | Error::NoIntersection => {
                EXIT_INTERNAL
            }
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

type Outcome = std::result::Result<i32, Failure>;

fn load(shared: &Shared) -> std::result::Result<Scene, Failure> {
    let path = &shared.scene;
    let text = fs::read_to_string(path).map_err(|e| Failure {
        code: EXIT_INPUT,
        message: if e.kind() == io::ErrorKind::NotFound {
            format!("file not found: {}", path.display())
        } else {
            format!("cannot read {}: {e}", path.display())
        },
    })?;
    parse_scene_with(&text, &shared.tolerances()).map_err(|e| Failure {
        code: EXIT_INPUT,
        message: format!("{}: {e}", path.display()),
    })
}

fn write_file(path: &Path, contents: &str) -> std::result::Result<(), Failure> {
    fs::write(path, contents).map_err(|e| Failure {
        code: EXIT_INTERNAL,
        message: format!("cannot write {}: {e}", path.display()),
    })
}

fn write_json<T: Serialize>(
    path: Option<&PathBuf>,
    report: &T,
) -> std::result::Result<(), Failure> {
    let Some(path) = path else { return Ok(()) };
    let mut text = serde_json::to_string_pretty(report).map_err(|e| Failure {
        code: EXIT_INTERNAL,
        message: format!("cannot serialize report: {e}"),
    })?;
    text.push('\n');
    write_file(path, &text)
}

fn lamination_layers(lams: &Laminations) -> Vec<Layer> {
    vec![
        Layer::from_family("x-plus", &lams.x_plus),
        Layer::from_family("x-minus", &lams.x_minus),
        Layer::from_lamination("lambda-plus", &lams.plus),
        Layer::from_lamination("lambda-minus", &lams.minus),
    ]
}

fn lamination_lines(out: &mut String, name: &str, lam: &LaminationApprox) {
    let _ = writeln!(
        out,
        "{name}: {} leaf(s), {} chain(s) skipped",
        lam.leaves.len(),
        lam.skipped.len()
    );
    for (leaf, cert) in lam.leaves.iter().zip(&lam.certificates) {
        let (a, b) = leaf.to_disk();
        let _ = writeln!(
            out,
            "  juncture {} conjugator len {} dir {:+}: ({:.9}, {:.9}) rad, last gap {:.3e}",
            cert.chain.juncture,
            cert.chain.conjugator.len(),
            cert.chain.direction,
            a,
            b,
            cert.last_gap()
        );
    }
}

fn limit_set(shared: &Shared, depth: usize, out_path: &Path, out: &mut String) -> Outcome {
    let scene = load(shared)?;
    let group = scene.group()?;
    let sample = limit_set_sample_with(
        group,
        &HPoint::I,
        depth,
        Params::default().ball_budget,
        shared.eps_trace,
    )?;
    let boundary: Vec<DiskPoint> = sample.fixed_points.iter().map(|p| p.to_disk()).collect();
    let svg = render_svg(
        &[
            Layer::points("orbit", sample.orbit.clone()),
            Layer::points("fixed-points", boundary),
        ],
        &RenderStyle {
            eps_theta: shared.eps_theta,
            ..RenderStyle::default()
        },
    )?;
    write_file(out_path, &svg)?;
    write_json(shared.json.as_ref(), &sample)?;
    let _ = writeln!(
        out,
        "depth {depth}: {} orbit point(s), {} fixed point(s)",
        sample.orbit.len(),
        sample.fixed_points.len()
    );
    let _ = writeln!(
        out,
        "closest orbit point to the boundary: {:.3e}",
        sample.min_boundary_gap()
    );
    let _ = writeln!(out, "wrote {}", out_path.display());
    Ok(EXIT_OK)
}

fn laminate(shared: &Shared, out: &mut String) -> Outcome {
    let scene = load(shared)?;
    let pres = scene.presentation()?;
    let params = shared.params();
    let lams = Laminations::build(&pres, &scene.junctures, &params)?;
    let eps = params.tolerances.eps_theta;
    let _ = writeln!(
        out,
        "horizon {}, ball {}: {} positive and {} negative juncture axes",
        params.horizon,
        params.ball,
        lams.x_plus.len(),
        lams.x_minus.len()
    );
    lamination_lines(out, "lambda+", &lams.plus);
    lamination_lines(out, "lambda-", &lams.minus);
    let crossings = lamina_core::lamination::crossing_audit(&lams.plus, eps).len()
        + lamina_core::lamination::crossing_audit(&lams.minus, eps).len();
    let _ = writeln!(out, "crossing pairs within a lamination: {crossings}");
    write_json(shared.json.as_ref(), &lams)?;
    Ok(if crossings == 0 {
        EXIT_OK
    } else {
        EXIT_FLAGGED
    })
}

fn escape(shared: &Shared, out: &mut String) -> Outcome {
    let scene = load(shared)?;
    let pres = scene.presentation()?;
    let params = shared.params();
    let mut reports = Vec::new();
    for (id, j) in scene.junctures.iter().enumerate() {
        let r = escape_test(&pres, j, id, params.horizon, &params)?;
        let lengths: Vec<String> = r.lengths().iter().map(|l| format!("{l:.6}")).collect();
        let _ = writeln!(
            out,
            "juncture {} ({} {}): {}",
            j.end,
            j.sign.symbol(),
            pres.group.format_word(&j.word),
            r.verdict.label()
        );
        let _ = writeln!(out, "  lengths: {}", lengths.join(" "));
        if let Some(note) = &r.note {
            let _ = writeln!(out, "  note: {note}");
        }
        reports.push(r);
    }
    write_json(shared.json.as_ref(), &reports)?;
    Ok(EXIT_OK)
}

fn axioms(shared: &Shared, out: &mut String) -> Outcome {
    let scene = load(shared)?;
    let pres = scene.presentation()?;
    let report = axiom_report(&pres, &scene.junctures, &shared.params())?;
    let _ = writeln!(
        out,
        "horizon {}, ball {}, tol {:e}: {}",
        report.horizon,
        report.ball,
        report.tol,
        if report.endperiodic_like {
            "endperiodic-like"
        } else {
            "not endperiodic-like"
        }
    );
    for c in &report.checks {
        let _ = writeln!(out, "  {:<4} {:<9} {}", c.axiom, c.status.label(), c.detail);
    }
    for e in &report.escapes {
        let _ = writeln!(
            out,
            "  juncture {} escape: {}",
            e.juncture,
            e.verdict.label()
        );
    }
    for n in &report.notes {
        let _ = writeln!(out, "note: {n}");
    }
    let _ = writeln!(out, "({})", report.caveat);
    write_json(shared.json.as_ref(), &report)?;
    let failed = report.checks.iter().any(|c| c.status == AxiomStatus::Fail);
    Ok(if failed { EXIT_FLAGGED } else { EXIT_OK })
}

#[derive(Serialize)]
struct EntropyReport {
    matrix: Vec<Vec<u64>>,
    kappa: f64,
    entropy: f64,
    residual: f64,
    iterations: usize,
    converged: bool,
    full_support: bool,
    y: Vec<f64>,
}

fn markov(cmd: &MarkovCommand, out: &mut String) -> Outcome {
    match cmd {
        MarkovCommand::Verify { shared } => {
            let scene = load(shared)?;
            let m = scene.markov()?;
            let v = verify_markov(&m.rects, &m.table)?;
            write_json(shared.json.as_ref(), &v)?;
            if v.is_ok() {
                let _ = writeln!(out, "Markov family: OK");
                return Ok(EXIT_OK);
            }
            let _ = writeln!(out, "Markov family: {} violation(s)", v.violations.len());
            for x in &v.violations {
                let _ = writeln!(
                    out,
                    "  image of {} meets {} in {} components",
                    m.rects[x.i - 1].id,
                    m.rects[x.j - 1].id,
                    x.count
                );
            }
            Ok(EXIT_INPUT)
        }
        MarkovCommand::Entropy { shared } => {
            let scene = load(shared)?;
            let m = scene.markov()?;
            let a = build_matrix_a(&m.rects, &m.table)?;
            let p = perron(
                &to_f64(&a.0),
                shared.tol.unwrap_or(PERRON_TOL),
                PERRON_MAXITER,
            )?;
            let report = EntropyReport {
                matrix: to_rows(&a.0),
                kappa: p.kappa,
                entropy: p.kappa.ln().max(0.0),
                residual: p.residual,
                iterations: p.iterations,
                converged: p.converged,
                full_support: p.full_support,
                y: p.y.clone(),
            };
            let _ = writeln!(out, "kappa = {:.12}", report.kappa);
            let _ = writeln!(out, "entropy = {:.12}", report.entropy);
            let _ = writeln!(
                out,
                "residual = {:.3e} after {} iteration(s)",
                report.residual, report.iterations
            );
            write_json(shared.json.as_ref(), &report)?;
            Ok(if p.converged { EXIT_OK } else { EXIT_FLAGGED })
        }
        MarkovCommand::Measure { shared } => {
            let scene = load(shared)?;
            let m = scene.markov()?;
            let b = build_matrix_b(&m.table);
            let mu = invariant_measures(&b.0, shared.tol.unwrap_or(PERRON_TOL), PERRON_MAXITER)?;
            let fmt = |v: &[f64]| {
                v.iter()
                    .map(|x| format!("{x:.12}"))
                    .collect::<Vec<_>>()
                    .join(" ")
            };
            let _ = writeln!(out, "kappa = {:.12} (gap {:.3e})", mu.kappa, mu.kappa_gap);
            let _ = writeln!(
                out,
                "mu+ = {}  residual {:.3e}",
                fmt(&mu.plus.y),
                mu.plus.residual
            );
            let _ = writeln!(
                out,
                "mu- = {}  residual {:.3e}",
                fmt(&mu.minus.y),
                mu.minus.residual
            );
            if !(mu.plus.full_support && mu.minus.full_support) {
                let _ = writeln!(out, "note: a measure does not have full support");
            }
            write_json(shared.json.as_ref(), &mu)?;
            Ok(if mu.plus.converged && mu.minus.converged {
                EXIT_OK
            } else {
                EXIT_FLAGGED
            })
        }
        MarkovCommand::Words {
            shared,
            length,
            list,
        } => {
            let scene = load(shared)?;
            let m = scene.markov()?;
            let a = build_matrix_a(&m.rects, &m.table)?;
            let words = admissible_words(&a.0, *length, *list)?;
            let _ = writeln!(out, "{} admissible word(s) of length {length}", words.count);
            for w in words.words.iter().flatten() {
                let _ = writeln!(out, "  {w}");
            }
            write_json(shared.json.as_ref(), &words)?;
            Ok(EXIT_OK)
        }
    }
}

fn render(shared: &Shared, out_path: &Path, out: &mut String) -> Outcome {
    let scene = load(shared)?;
    let pres = scene.presentation()?;
    let params = shared.params();
    let lams = Laminations::build(&pres, &scene.junctures, &params)?;
    let svg = render_svg(
        &lamination_layers(&lams),
        &RenderStyle {
            eps_theta: params.tolerances.eps_theta,
            ..RenderStyle::default()
        },
    )?;
    write_file(out_path, &svg)?;
    write_json(shared.json.as_ref(), &lams)?;
    let _ = writeln!(
        out,
        "drew {} + {} juncture axes and {} + {} leaves",
        lams.x_plus.len(),
        lams.x_minus.len(),
        lams.plus.len(),
        lams.minus.len()
    );
    let _ = writeln!(out, "wrote {}", out_path.display());
    Ok(EXIT_OK)
}

fn dispatch(cli: &Cli, out: &mut String) -> Outcome {
    match &cli.command {
        Command::LimitSet {
            shared,
            depth,
            out: path,
        } => limit_set(shared, *depth, path, out),
        Command::Laminate { shared } => laminate(shared, out),
        Command::Escape { shared } => escape(shared, out),
        Command::Axioms { shared } => axioms(shared, out),
        Command::Markov(cmd) => markov(cmd, out),
        Command::Render { shared, out: path } => render(shared, path, out),
    }
}

/// Runs one command line, writing the human report to `stdout` and
/// diagnostics to `stderr`. Returns the exit code.
pub fn run_with<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                let _ = stderr.write_all(text.as_bytes());
                EXIT_INPUT
            } else {
                // --help and --version
                let _ = stdout.write_all(text.as_bytes());
                EXIT_OK
            };
        }
    };
    let mut report = String::new();
    let code = match dispatch(&cli, &mut report) {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(stderr, "error: {}", f.message);
            f.code
        }
    };
    if stdout.write_all(report.as_bytes()).is_err() {
        return EXIT_INTERNAL;
    }
    code
}

pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    run_with(args, &mut io::stdout().lock(), &mut io::stderr().lock())
}
