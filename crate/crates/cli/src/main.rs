use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use nchardy::accont::{ac_membership, AcVerdict};
use nchardy::eval::{evaluate, DEFAULT_EVAL_TOL};
use nchardy::fock::FockBasis;
use nchardy::io;
use nchardy::linalg::{Mat, Vector};
use nchardy::pick::np_feasible;
use nchardy::reps::{classify, dual_correspondence, isometric_dilation};
use nchardy::suite::run_suite;
use nchardy::{DirectedGraph, Error};

const EXIT_PARSE: u8 = 1;
const EXIT_PRECONDITION: u8 = 2;
const EXIT_VIOLATED: u8 = 3;

#[derive(Parser, Debug)]
#[command(name = "nchardy", version, about = "Hardy algebras of graph correspondences: evaluation, interpolation, classification")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
struct Common {
    /// Graph description (JSON).
    #[arg(long)]
    graph: PathBuf,
    /// Truncation level of the Fock space.
    #[arg(long = "level", default_value_t = 6)]
    level: usize,
    /// Seed for randomized checks.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Exit with status 3 when the verdict is violated or infeasible.
    #[arg(long)]
    expect_feasible: bool,
    /// Print a JSON document instead of text.
    #[arg(long)]
    json: bool,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Evaluate a Hardy element at the points of a point file.
    Eval {
        #[command(flatten)]
        common: Common,
        /// Hardy element (constant term, tensors, optional geometric part).
        #[arg(long)]
        element: PathBuf,
        /// One point or `{"points": [...]}`.
        #[arg(long)]
        points: PathBuf,
        /// Tail tolerance for series.
        #[arg(long, default_value_t = DEFAULT_EVAL_TOL)]
        tol: f64,
    },
    /// Decide feasibility of a Nevanlinna-Pick problem.
    Interp {
        #[command(flatten)]
        common: Common,
        /// Nodes with their `B` and `C` matrices.
        #[arg(long)]
        problem: PathBuf,
    },
    /// Classify a covariant representation and decide absolute continuity.
    Classify {
        #[command(flatten)]
        common: Common,
        /// Covariant representation (multiplicities and `T(e)` blocks).
        #[arg(long)]
        rep: PathBuf,
        /// Write an orthonormal basis of the obstruction subspace `W` here.
        #[arg(long)]
        basis_out: Option<PathBuf>,
    },
    /// Run the property suites on the graph.
    Suite {
        #[command(flatten)]
        common: Common,
    },
    /// Describe the dual correspondence of a representation.
    Dual {
        #[command(flatten)]
        common: Common,
        /// Representation of the vertex algebra (multiplicities).
        #[arg(long)]
        rep: PathBuf,
    },
    /// Build the isometric dilation of a covariant representation.
    Dilate {
        #[command(flatten)]
        common: Common,
        /// Contractive covariant representation.
        #[arg(long)]
        rep: PathBuf,
    },
}

#[derive(Debug)]
struct Failure {
    code: u8,
    message: String,
    output: Option<String>,
}

impl Failure {
    fn parse(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_PARSE,
            message: message.into(),
            output: None,
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Parse { .. } => EXIT_PARSE,
            _ => EXIT_PRECONDITION,
        };
        Self {
            code,
            message: e.to_string(),
            output: None,
        }
    }
}

struct Outcome {
    text: String,
    json: Value,
    violated: bool,
}

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure::parse(format!("{}: {e}", path.display())))
}

fn load_graph(path: &Path) -> Result<Arc<DirectedGraph>, Failure> {
    io::parse_graph(&read(path)?).map(Arc::new).map_err(|e| with_file(e, path))
}

fn with_file(e: Error, path: &Path) -> Failure {
    let mut f = Failure::from(e);
    if f.code == EXIT_PARSE {
        f.message = format!("{}: {}", path.display(), f.message);
    }
    f
}

fn fmt_c(z: nchardy::linalg::C) -> String {
    if z.im == 0.0 {
        format!("{:.6}", z.re)
    } else {
        format!("{:.6}{:+.6}i", z.re, z.im)
    }
}

fn fmt_matrix(m: &Mat) -> String {
    let mut s = String::new();
    for i in 0..m.nrows() {
        let row: Vec<String> = (0..m.ncols()).map(|j| fmt_c(m[(i, j)])).collect();
        let _ = writeln!(s, "  [{}]", row.join(", "));
    }
    if m.nrows() == 0 {
        s.push_str("  []\n");
    }
    s
}

fn vector_json(v: &Vector) -> Value {
    json!(v.iter().map(|z| io::complex_json(*z)).collect::<Vec<_>>())
}

fn cmd_eval(common: &Common, element: &Path, points: &Path, tol: f64) -> Result<Outcome, Failure> {
    let g = load_graph(&common.graph)?;
    let theta = io::parse_element(&read(element)?, &g).map_err(|e| with_file(e, element))?;
    let pts = io::parse_points(&read(points)?, &g).map_err(|e| with_file(e, points))?;
    let mut text = String::new();
    let mut results = Vec::new();
    for (i, p) in pts.iter().enumerate() {
        match evaluate(&theta, p, tol) {
            Ok(r) => {
                let _ = writeln!(text, "point {i}: |eta| = {:.6}", p.norm());
                text.push_str(&fmt_matrix(&r.value));
                let _ = writeln!(text, "terms used: {}", r.terms_used);
                let _ = writeln!(text, "tail bound: {:.3e}", r.tail_bound);
                results.push(json!({
                    "point": i,
                    "value": io::matrix_value(&r.value),
                    "terms_used": r.terms_used,
                    "tail_bound": r.tail_bound,
                }));
            }
            Err(Error::RadiusExceeded { partial, terms, last_term }) => {
                let _ = writeln!(text, "point {i}: radius of convergence exceeded after {terms} terms");
                let _ = writeln!(text, "partial sum:");
                text.push_str(&fmt_matrix(&partial));
                results.push(json!({
                    "point": i,
                    "error": "radius exceeded",
                    "partial": io::matrix_value(&partial),
                    "terms": terms,
                    "last_term": if last_term.is_finite() { json!(last_term) } else { Value::Null },
                }));
                let json = json!({"command": "eval", "results": results});
                return Err(Failure {
                    code: EXIT_PRECONDITION,
                    message: format!("point {i}: radius of convergence exceeded"),
                    output: Some(if common.json { pretty(&json) } else { text }),
                });
            }
            Err(e) => return Err(e.into()),
        }
    }
    Ok(Outcome {
        text,
        json: json!({"command": "eval", "results": results}),
        violated: false,
    })
}

fn cmd_interp(common: &Common, problem: &Path) -> Result<Outcome, Failure> {
    let g = load_graph(&common.graph)?;
    let prob = io::parse_problem(&read(problem)?, &g).map_err(|e| with_file(e, problem))?;
    let v = np_feasible(&prob)?;
    let mut text = String::new();
    let _ = writeln!(text, "{}", if v.feasible { "feasible" } else { "infeasible" });
    let _ = writeln!(text, "min Choi eigenvalue: {:.6e}", v.cp.min_eigenvalue);
    if v.cp.marginal {
        let _ = writeln!(text, "warning: eigenvalue within ten times the tolerance");
    }
    if !v.faithful {
        let _ = writeln!(text, "warning: representation is not faithful; the criterion assumes faithfulness");
    }
    if let Some(w) = &v.cp.witness {
        let parts: Vec<String> = w.iter().map(|z| fmt_c(*z)).collect();
        let _ = writeln!(text, "witness: [{}]", parts.join(", "));
    }
    let json = json!({
        "command": "interp",
        "feasible": v.feasible,
        "min_eigenvalue": v.cp.min_eigenvalue,
        "choi_norm": v.cp.choi_norm,
        "marginal": v.cp.marginal,
        "faithful": v.faithful,
        "witness": v.cp.witness.as_ref().map(vector_json),
    });
    Ok(Outcome {
        text,
        json,
        violated: !v.feasible,
    })
}

fn cmd_classify(common: &Common, rep: &Path, basis_out: Option<&Path>) -> Result<Outcome, Failure> {
    let g = load_graph(&common.graph)?;
    let t = io::parse_covariant(&read(rep)?, &g).map_err(|e| with_file(e, rep))?;
    let cl = classify(&t);
    let mut text = String::new();
    let _ = writeln!(text, "contractive: {} (|T~| = {:.6})", cl.contractive, t.norm());
    let _ = writeln!(text, "isometric: {} (residual {:.3e})", cl.isometric, cl.isometry_residual);
    let _ = writeln!(text, "fully coisometric: {} (residual {:.3e})", cl.fully_coisometric, cl.coisometry_residual);
    let _ = writeln!(text, "pure: {}", cl.pure);
    let mut json = json!({
        "command": "classify",
        "contractive": cl.contractive,
        "isometric": cl.isometric,
        "fully_coisometric": cl.fully_coisometric,
        "pure": cl.pure,
        "norm": t.norm(),
    });
    let mut violated = !cl.contractive;
    if cl.contractive {
        let ac = ac_membership(&t, common.level)?;
        text.push_str(&ac.to_string());
        violated = ac.verdict != AcVerdict::AbsolutelyContinuous;
        json["ac"] = json!({
            "verdict": match ac.verdict {
                AcVerdict::AbsolutelyContinuous => "AC",
                AcVerdict::NotAc => "not AC",
                AcVerdict::Undecided => "undecided",
            },
            "completely_non_coisometric": ac.cnc.completely_non_coisometric,
            "w_dim": ac.w().ncols(),
            "iteration_dims": ac.cnc.dims,
            "periodic_state": ac.periodic_state.as_ref().map(|p| json!({
                "period": p.period,
                "residual": p.residual,
            })),
            "certificates": ac.certificates.iter().map(|c| json!({
                "gram_residual": c.gram_residual,
                "intertwining_residual": c.intertwining_residual,
                "telescoping": c.telescoping_holds(),
            })).collect::<Vec<_>>(),
        });
        if let Some(path) = basis_out {
            std::fs::write(path, io::to_pretty(&io::matrix_to_json(ac.w())))
                .map_err(|e| Failure::parse(format!("{}: {e}", path.display())))?;
            let _ = writeln!(text, "W basis written to {}", path.display());
        }
    }
    Ok(Outcome { text, json, violated })
}

fn cmd_suite(common: &Common) -> Result<Outcome, Failure> {
    let g = load_graph(&common.graph)?;
    let report = run_suite(&g, common.level, common.seed);
    let mut json = serde_json::to_value(&report).expect("report serializes");
    json["command"] = json!("suite");
    json["passed"] = json!(report.passed());
    json["failed"] = json!(report.failed());
    Ok(Outcome {
        text: format!("{report}\n"),
        json,
        violated: report.failed() > 0,
    })
}

fn cmd_dual(common: &Common, rep: &Path) -> Result<Outcome, Failure> {
    let g = load_graph(&common.graph)?;
    let r = io::parse_representation(&read(rep)?, &g).map_err(|e| with_file(e, rep))?;
    let d = dual_correspondence(&r);
    let json = json!({
        "command": "dual",
        "blocks": d.block_shapes.iter().map(|(n, (r, c))| json!({"edge": n, "rows": r, "cols": c})).collect::<Vec<_>>(),
        "opposite_graph": d.opposite_graph.as_ref().map(io::graph_to_json),
    });
    Ok(Outcome {
        text: d.to_string(),
        json,
        violated: false,
    })
}

fn cmd_dilate(common: &Common, rep: &Path) -> Result<Outcome, Failure> {
    let g = load_graph(&common.graph)?;
    let t = io::parse_covariant(&read(rep)?, &g).map_err(|e| with_file(e, rep))?;
    let basis = FockBasis::new(g, common.level);
    let d = isometric_dilation(&t, &basis)?;
    let mut text = String::new();
    let _ = writeln!(text, "dilation space dimension: {}", d.covrep.rep().dim());
    let _ = writeln!(text, "defect dimensions: {:?}", d.defect_dims);
    let _ = writeln!(text, "commutation residual: {:.3e}", d.commutation_residual);
    let _ = writeln!(text, "compression residual: {:.3e}", d.compression_residual);
    let _ = writeln!(text, "isometric on interior: {}", d.isometric_on_interior);
    let json = json!({
        "command": "dilate",
        "dimension": d.covrep.rep().dim(),
        "defect_dims": d.defect_dims,
        "commutation_residual": d.commutation_residual,
        "compression_residual": d.compression_residual,
        "isometric_on_interior": d.isometric_on_interior,
    });
    Ok(Outcome {
        text,
        json,
        violated: !d.isometric_on_interior,
    })
}

fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("json");
    s.push('\n');
    s
}

fn run(cli: Cli) -> Result<(Outcome, bool, bool), Failure> {
    let (common, outcome) = match &cli.command {
        Command::Eval { common, element, points, tol } => (common, cmd_eval(common, element, points, *tol)?),
        Command::Interp { common, problem } => (common, cmd_interp(common, problem)?),
        Command::Classify { common, rep, basis_out } => (common, cmd_classify(common, rep, basis_out.as_deref())?),
        Command::Suite { common } => (common, cmd_suite(common)?),
        Command::Dual { common, rep } => (common, cmd_dual(common, rep)?),
        Command::Dilate { common, rep } => (common, cmd_dilate(common, rep)?),
    };
    Ok((outcome, common.json, common.expect_feasible))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(EXIT_PARSE) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok((outcome, as_json, expect)) => {
            if as_json {
                print!("{}", pretty(&outcome.json));
            } else {
                print!("{}", outcome.text);
            }
            if expect && outcome.violated {
                ExitCode::from(EXIT_VIOLATED)
            } else {
                ExitCode::SUCCESS
            }
        }
        Err(f) => {
            if let Some(out) = &f.output {
                print!("{out}");
            }
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
