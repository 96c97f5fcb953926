//! Command-line front end: parse a problem file, run the requested analysis,
//! emit a JSON report. Exit codes: 0 success, 1 input error, 2 mathematical
//! negative (pair not admissible / embedding fails).

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Deserialize;
use serde_json::{json, Value};

use copson::associated::associated_norm;
use copson::conditions::embedding_constant;
use copson::discretization::{build_sequence, verify_sequence};
use copson::fundamental::{Admissibility, FundamentalFunction};
use copson::grid::Grid;
use copson::oracle::{empirical_embedding_constant, OptimizerBudget};
use copson::parse::{parse_step, parse_weight};
use copson::{StepFunction, WeightExpr};

#[derive(Parser)]
#[command(name = "copson", version, about = "Embeddings of Copson-Lorentz spaces into Lorentz spaces")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Problem file (TOML)
    #[arg(short = 'f', long = "file")]
    file: PathBuf,
    /// Emit the report as JSON (default: human-readable summary)
    #[arg(long)]
    json: bool,
    /// Override the optimizer seed
    #[arg(long)]
    seed: Option<u64>,
    /// Override the discretizing-sequence depth
    #[arg(long)]
    depth: Option<u32>,
    /// Override the quadrature/grid tolerance
    #[arg(long)]
    tol: Option<f64>,
}

#[derive(Subcommand)]
enum Command {
    /// Check that (u, v) is admissible with respect to (m, p)
    Admissible(Common),
    /// Evaluate the fundamental function phi at a few points
    Phi {
        #[command(flatten)]
        common: Common,
        /// Comma-separated evaluation points (default: 2^-3 .. 2^3)
        #[arg(long)]
        at: Option<String>,
    },
    /// Build and verify the discretizing sequence
    Discretize(Common),
    /// Evaluate the embedding conditions and estimate the constant
    Embed {
        #[command(flatten)]
        common: Common,
        /// Also run the brute-force optimizer and report C_emp
        #[arg(long)]
        oracle: bool,
    },
    /// Associated-space norm of the step function g
    Assoc(Common),
    /// Run the full invariant suite on the problem
    Verify(Common),
}

/// Problem file contents; weights in the expression grammar, g as a step
/// literal, every option defaulted and echoed back into the report.
#[derive(Deserialize)]
struct ProblemFile {
    u: String,
    v: String,
    w: Option<String>,
    m: f64,
    p: f64,
    q: Option<f64>,
    g: Option<String>,
    #[serde(default)]
    options: Options,
}

#[derive(Deserialize, Clone, Copy)]
#[serde(default)]
struct Options {
    lo_exp: i32,
    hi_exp: i32,
    points_per_octave: u32,
    tol: f64,
    depth: u32,
    candidates: usize,
    local_steps: usize,
    seed: u64,
    knot_count: usize,
}

impl Default for Options {
    fn default() -> Self {
        let g = Grid::default();
        let b = OptimizerBudget::default();
        Options {
            lo_exp: g.lo_exp,
            hi_exp: g.hi_exp,
            points_per_octave: g.points_per_octave,
            tol: g.tol,
            depth: 8,
            candidates: b.candidates,
            local_steps: b.local_steps,
            seed: b.seed,
            knot_count: b.knot_count,
        }
    }
}

/// Fully parsed problem, ready for the library calls.
struct Problem {
    u: WeightExpr,
    v: WeightExpr,
    w: Option<WeightExpr>,
    m: f64,
    p: f64,
    q: Option<f64>,
    g: Option<StepFunction>,
    options: Options,
    /// the raw strings, echoed into every report for reproducibility
    echo: Value,
}

impl Problem {
    fn grid(&self) -> Grid {
        Grid {
            lo_exp: self.options.lo_exp,
            hi_exp: self.options.hi_exp,
            points_per_octave: self.options.points_per_octave,
            tol: self.options.tol,
        }
    }

    fn budget(&self) -> OptimizerBudget {
        OptimizerBudget {
            candidates: self.options.candidates,
            local_steps: self.options.local_steps,
            seed: self.options.seed,
            knot_count: self.options.knot_count,
        }
    }

    fn fundamental(&self) -> FundamentalFunction {
        FundamentalFunction::new(self.u.clone(), self.v.clone(), self.m, self.p)
    }

    fn require_w(&self) -> Result<(&WeightExpr, f64), String> {
        match (&self.w, self.q) {
            (Some(w), Some(q)) => Ok((w, q)),
            _ => Err("problem file needs both `w` and `q` for this command".into()),
        }
    }
}

fn load_problem(common: &Common) -> Result<Problem, String> {
    let text = std::fs::read_to_string(&common.file)
        .map_err(|e| format!("cannot read {}: {e}", common.file.display()))?;
    let file: ProblemFile = toml::from_str(&text).map_err(|e| format!("problem file: {e}"))?;
    if !(file.m > 0.0 && file.p > 0.0) || file.q.is_some_and(|q| q <= 0.0) {
        return Err("exponents m, p, q must be positive".into());
    }
    let mut options = file.options;
    if let Some(s) = common.seed {
        options.seed = s;
    }
    if let Some(d) = common.depth {
        options.depth = d;
    }
    if let Some(t) = common.tol {
        if !(t > 0.0) {
            return Err("tolerance must be positive".into());
        }
        options.tol = t;
    }
    let u = parse_weight(&file.u).map_err(|e| format!("u: {e}"))?;
    let v = parse_weight(&file.v).map_err(|e| format!("v: {e}"))?;
    let w = match &file.w {
        Some(s) => Some(parse_weight(s).map_err(|e| format!("w: {e}"))?),
        None => None,
    };
    let g = match &file.g {
        Some(s) => Some(parse_step(s).map_err(|e| format!("g: {e}"))?),
        None => None,
    };
    let echo = json!({
        "u": file.u,
        "v": file.v,
        "w": file.w,
        "m": file.m,
        "p": file.p,
        "q": file.q,
        "g": file.g,
        "options": {
            "lo_exp": options.lo_exp,
            "hi_exp": options.hi_exp,
            "points_per_octave": options.points_per_octave,
            "tol": options.tol,
            "depth": options.depth,
            "candidates": options.candidates,
            "local_steps": options.local_steps,
            "seed": options.seed,
            "knot_count": options.knot_count,
        },
    });
    Ok(Problem {
        u,
        v,
        w,
        m: file.m,
        p: file.p,
        q: file.q,
        g,
        options,
        echo,
    })
}

fn jnum(v: f64) -> Value {
    if v.is_finite() {
        json!(v)
    } else {
        json!("inf")
    }
}

fn emit(common: &Common, mut report: Value, problem: &Problem, human: String) {
    report["problem"] = problem.echo.clone();
    if common.json {
        println!("{}", serde_json::to_string_pretty(&report).unwrap());
    } else {
        println!("{human}");
    }
}

fn input_error(msg: &str) -> ExitCode {
    eprintln!("error: {msg}");
    ExitCode::from(1)
}

fn cmd_admissible(common: &Common) -> ExitCode {
    let problem = match load_problem(common) {
        Ok(p) => p,
        Err(e) => return input_error(&e),
    };
    let f = problem.fundamental();
    let verdict = f.is_admissible(problem.options.depth, problem.options.tol);
    let (admissible, witness, label) = match verdict {
        Admissibility::Admissible => (true, Value::Null, "admissible".to_string()),
        Admissibility::DegenerateZero(t) => (false, json!(t), format!("phi({t}) = 0")),
        Admissibility::DegenerateInfinite(t) => (false, json!(t), format!("phi({t}) = inf")),
    };
    emit(
        common,
        json!({ "admissible": admissible, "witness": witness }),
        &problem,
        if admissible {
            "admissible".into()
        } else {
            format!("not admissible: {label}")
        },
    );
    if admissible {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(2)
    }
}

fn cmd_phi(common: &Common, at: &Option<String>) -> ExitCode {
    let problem = match load_problem(common) {
        Ok(p) => p,
        Err(e) => return input_error(&e),
    };
    let points: Vec<f64> = match at {
        None => (-3..=3).map(|k| 2f64.powi(k)).collect(),
        Some(s) => {
            let mut out = Vec::new();
            for part in s.split(',') {
                match part.trim().parse::<f64>() {
                    Ok(t) if t > 0.0 => out.push(t),
                    _ => return input_error(&format!("bad evaluation point {part:?}")),
                }
            }
            out
        }
    };
    let f = problem.fundamental();
    let tol = problem.options.tol;
    let mut rows = Vec::new();
    let mut human = String::new();
    for &t in &points {
        let phi = f.phi(t, tol).unwrap_or(f64::INFINITY);
        let phi_p = f.phi_p(t, tol).unwrap_or(f64::INFINITY);
        let big_v = f.big_v(t, tol).unwrap_or(f64::INFINITY);
        rows.push(json!({ "t": t, "phi": jnum(phi), "phi_p": jnum(phi_p), "V": jnum(big_v) }));
        human.push_str(&format!("t = {t}: phi = {phi}, phi^p = {phi_p}, V = {big_v}\n"));
    }
    emit(common, json!({ "points": rows }), &problem, human.trim_end().into());
    ExitCode::SUCCESS
}

fn cmd_discretize(common: &Common) -> ExitCode {
    let problem = match load_problem(common) {
        Ok(p) => p,
        Err(e) => return input_error(&e),
    };
    let f = problem.fundamental();
    let seq = match build_sequence(&f, problem.options.depth, problem.options.tol) {
        Ok(s) => s,
        Err(copson::Error::NotAdmissible) => {
            eprintln!("error: weight pair is not admissible");
            return ExitCode::from(2);
        }
        Err(e) => return input_error(&e.to_string()),
    };
    let rep = match verify_sequence(&seq, &f, problem.options.tol) {
        Ok(r) => r,
        Err(e) => return input_error(&e.to_string()),
    };
    let mut report = seq.dump_json();
    report["residuals"] = serde_json::to_value(rep).unwrap();
    let human = format!(
        "sequence: {}\nresiduals: v_growth {:.3e}, phi_growth {:.3e}, v_equality {:.3e}, phi_equality {:.3e}",
        report["points"]
            .as_array()
            .unwrap()
            .iter()
            .map(|e| format!("t_{} = {}", e["k"], e["t_k"]))
            .collect::<Vec<_>>()
            .join(", "),
        rep.v_growth,
        rep.phi_growth,
        rep.v_equality,
        rep.phi_equality,
    );
    emit(common, report, &problem, human);
    ExitCode::SUCCESS
}

fn cmd_embed(common: &Common, oracle: bool) -> ExitCode {
    let problem = match load_problem(common) {
        Ok(p) => p,
        Err(e) => return input_error(&e),
    };
    let (w, q) = match problem.require_w() {
        Ok(x) => x,
        Err(e) => return input_error(&e),
    };
    let report = match embedding_constant(&problem.u, &problem.v, w, problem.m, problem.p, q, &problem.grid()) {
        Ok(r) => r,
        Err(copson::Error::NotAdmissible) => {
            eprintln!("error: weight pair is not admissible");
            return ExitCode::from(2);
        }
        Err(e) => return input_error(&e.to_string()),
    };
    let mut out = report.to_json();
    let mut human = format!(
        "case {}: C_estimate = {}, embedding {}",
        out["case"].as_str().unwrap(),
        report.c_estimate,
        if report.embedding_holds { "holds" } else { "fails" },
    );
    if oracle {
        match empirical_embedding_constant(
            &problem.u,
            &problem.v,
            w,
            problem.m,
            problem.p,
            q,
            &problem.budget(),
        ) {
            Ok(emp) => {
                out["C_emp"] = jnum(emp.c_emp);
                out["ratio"] = jnum(report.c_estimate / emp.c_emp);
                human.push_str(&format!(
                    "\nC_emp = {} (ratio C_estimate/C_emp = {})",
                    emp.c_emp,
                    report.c_estimate / emp.c_emp
                ));
            }
            Err(e) => return input_error(&e.to_string()),
        }
    }
    emit(common, out, &problem, human);
    if report.embedding_holds {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(2)
    }
}

fn cmd_assoc(common: &Common) -> ExitCode {
    let problem = match load_problem(common) {
        Ok(p) => p,
        Err(e) => return input_error(&e),
    };
    let g = match &problem.g {
        Some(g) => g.clone(),
        None => return input_error("problem file needs `g` for this command"),
    };
    match associated_norm(&problem.u, &problem.v, problem.m, problem.p, &g, &problem.grid()) {
        Ok(n) => {
            emit(
                common,
                json!({ "norm": jnum(n) }),
                &problem,
                format!("associated norm = {n}"),
            );
            ExitCode::SUCCESS
        }
        Err(copson::Error::NotAdmissible) => {
            eprintln!("error: weight pair is not admissible");
            ExitCode::from(2)
        }
        Err(e) => input_error(&e.to_string()),
    }
}

fn cmd_verify(common: &Common) -> ExitCode {
    let problem = match load_problem(common) {
        Ok(p) => p,
        Err(e) => return input_error(&e),
    };
    let mut sections = serde_json::Map::new();
    let mut human = Vec::new();
    let mut negative = false;

    let f = problem.fundamental();
    let verdict = f.is_admissible(problem.options.depth, problem.options.tol);
    let admissible = verdict == Admissibility::Admissible;
    negative |= !admissible;
    sections.insert("admissible".into(), json!(admissible));
    human.push(format!("admissible: {admissible}"));

    if admissible {
        match build_sequence(&f, problem.options.depth, problem.options.tol)
            .and_then(|seq| verify_sequence(&seq, &f, problem.options.tol))
        {
            Ok(rep) => {
                let worst = rep
                    .v_growth
                    .max(rep.phi_growth)
                    .max(rep.v_equality)
                    .max(rep.phi_equality);
                sections.insert("sequence_residuals".into(), serde_json::to_value(rep).unwrap());
                human.push(format!("sequence residuals: worst {worst:.3e}"));
                negative |= !(worst <= 1e-6);
            }
            Err(e) => return input_error(&e.to_string()),
        }

        if let Ok((w, q)) = problem.require_w() {
            match embedding_constant(&problem.u, &problem.v, w, problem.m, problem.p, q, &problem.grid()) {
                Ok(rep) => {
                    negative |= !rep.embedding_holds;
                    human.push(format!(
                        "embedding: case {}, C_estimate {}, {}",
                        rep.case.name(),
                        rep.c_estimate,
                        if rep.embedding_holds { "holds" } else { "fails" }
                    ));
                    sections.insert("embedding".into(), rep.to_json());
                }
                Err(e) => return input_error(&e.to_string()),
            }
        }

        if let Some(g) = &problem.g {
            match associated_norm(&problem.u, &problem.v, problem.m, problem.p, g, &problem.grid()) {
                Ok(n) => {
                    sections.insert("associated_norm".into(), jnum(n));
                    human.push(format!("associated norm: {n}"));
                }
                Err(e) => return input_error(&e.to_string()),
            }
        }
    }

    sections.insert("ok".into(), json!(!negative));
    human.push(format!("ok: {}", !negative));
    emit(common, Value::Object(sections), &problem, human.join("\n"));
    if negative {
        ExitCode::from(2)
    } else {
        ExitCode::SUCCESS
    }
}

fn main() -> ExitCode {
    match Cli::parse().command {
        Command::Admissible(c) => cmd_admissible(&c),
        Command::Phi { common, at } => cmd_phi(&common, &at),
        Command::Discretize(c) => cmd_discretize(&c),
        Command::Embed { common, oracle } => cmd_embed(&common, oracle),
        Command::Assoc(c) => cmd_assoc(&c),
        Command::Verify(c) => cmd_verify(&c),
    }
}
