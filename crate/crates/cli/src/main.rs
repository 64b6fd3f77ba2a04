//! `qknot`: command-line front end for the qknot library.
//!
//! Every subcommand prints one JSON document on stdout. Failures print a
//! single JSON line `{"error":..,"reason":..}` on stderr. Exit status is 0 on
//! success, 1 on validation errors and 2 when a cap or limit leaves the
//! answer unknown.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde_json::{json, Value};

use qknot::bracket::{self, bracket_a_with_cap, bracket_q_with_cap, f_poly_with_cap, jones_with_cap};
use qknot::gaussmoves::{self, Equivalence, GaussRules, MoveInstance, QuantumGaussWord, SearchLimits};
use qknot::instances::{self, DirectedGraph, GroupWord, Presentation, WordEquivalence};
use qknot::khovanov::{self, build_complex_with_cap, ChainComplex, CheckReport};
use qknot::mosaic::{self, Invariant, Limits, MoveSet, OrbitStatus, SameOrbit};
use qknot::{Error, Laurent, Mosaic, PlanarDiagram, Var};

mod angle;

const ENV_MAX_CROSSINGS: &str = "QKNOT_MAX_CROSSINGS";
const ENV_MAX_MATRIX: &str = "QKNOT_MAX_MATRIX";
const ENV_MAX_STATES: &str = "QKNOT_MAX_STATES";

#[derive(Parser)]
#[command(name = "qknot", version, about = "Quantized knot diagrams: brackets, Khovanov complexes, mosaics and move systems")]
struct Cli {
    /// Indent JSON output.
    #[arg(long, global = true)]
    pretty: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Form {
    A,
    Q,
}

#[derive(Subcommand)]
enum Command {
    /// Kauffman bracket of a PD file.
    Bracket {
        #[arg(long, value_enum, default_value = "a")]
        form: Form,
        pd: PathBuf,
    },
    /// Jones polynomial of a PD file.
    Jones { pd: PathBuf },
    /// Khovanov homology table of a PD file.
    Khovanov {
        /// Apply the conventional shift i -> i - n-, j -> j + n+ - 2n-.
        #[arg(long)]
        shifted: bool,
        /// Include integer torsion of each boundary block.
        #[arg(long)]
        torsion: bool,
        pd: PathBuf,
    },
    /// <psi|U|psi> at a unit-circle q given as an angle, e.g. `pi/5`.
    Amplitude {
        #[arg(long, allow_hyphen_values = true)]
        q: String,
        pd: PathBuf,
    },
    /// Run every identity check for one diagram.
    Verify {
        pd: PathBuf,
        /// Expected values to compare against.
        #[arg(long)]
        golden: Option<PathBuf>,
    },
    /// Orbit of a mosaic under a move set, or a bounded same-orbit query.
    MosaicOrbit {
        /// Move file; the built-in set when absent.
        #[arg(long)]
        moves: Option<PathBuf>,
        #[arg(long)]
        max_states: Option<usize>,
        #[arg(long)]
        max_depth: Option<usize>,
        /// Second mosaic: answer whether it lies in the orbit.
        #[arg(long)]
        target: Option<PathBuf>,
        /// Print every orbit member.
        #[arg(long)]
        list: bool,
        mosaic: PathBuf,
    },
    /// Validate a mosaic and extract its PD code.
    MosaicExtract {
        /// Also evaluate an invariant observable, e.g. `jones-at-real-t:2`.
        #[arg(long)]
        invariant: Option<String>,
        mosaic: PathBuf,
    },
    /// Quantum Gauss word moves.
    Gauss {
        #[command(subcommand)]
        action: GaussCommand,
    },
    /// Directed graph instances.
    Graph {
        #[command(subcommand)]
        action: GraphCommand,
    },
    /// Group word instances.
    Word {
        #[command(subcommand)]
        action: WordCommand,
    },
}

#[derive(Subcommand)]
enum GaussCommand {
    /// Apply one move given as a JSON move record.
    Apply {
        word: String,
        #[arg(long = "move")]
        mv: String,
        /// Index bound N; unbounded when absent.
        #[arg(long)]
        n: Option<u32>,
        /// Extra r3 patterns, JSON {"r3": [...]}.
        #[arg(long)]
        rules: Option<PathBuf>,
    },
    /// Bounded search for a move sequence between two words.
    Search {
        from: String,
        to: String,
        #[arg(long)]
        n: Option<u32>,
        #[arg(long)]
        max_depth: Option<usize>,
        #[arg(long)]
        max_states: Option<usize>,
        #[arg(long)]
        rules: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum GraphCommand {
    /// Brute-force isomorphism test of two graph files.
    Iso { first: PathBuf, second: PathBuf },
}

#[derive(Subcommand)]
enum WordCommand {
    /// Bounded search for a move sequence between two words.
    Search {
        from: String,
        to: String,
        /// Presentation file; a free group when absent.
        #[arg(long)]
        presentation: Option<PathBuf>,
        /// Generator count for a free group.
        #[arg(long)]
        generators: Option<u32>,
        #[arg(long)]
        max_depth: Option<usize>,
        #[arg(long)]
        max_states: Option<usize>,
    },
}

/// A failed run: exit status plus a one-line reason.
struct Failure {
    code: u8,
    kind: &'static str,
    reason: String,
}

impl Failure {
    fn validation(kind: &'static str, reason: impl Into<String>) -> Self {
        Failure { code: 1, kind, reason: reason.into() }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let kind = match &e {
            Error::CapExceeded { .. } => return Failure { code: 2, kind: "cap", reason: e.to_string() },
            Error::Parse(_) => "format",
            Error::InvalidMove { .. } => "invalid-move",
            Error::Precondition(_) => "precondition",
            Error::NotUnitCircle(_) => "not-unit-circle",
            Error::UnknownInvariant(_) => "unknown-invariant",
            Error::DimensionMismatch(_) => "dimension-mismatch",
            Error::NotBijection(_) => "not-bijection",
            _ => "invalid",
        };
        Failure::validation(kind, e.to_string())
    }
}

type Run = Result<(Value, u8), Failure>;

struct Caps {
    crossings: Option<usize>,
    matrix: usize,
    states: Option<usize>,
}

impl Caps {
    fn from_env() -> Result<Caps, Failure> {
        let read = |name: &str| -> Result<Option<usize>, Failure> {
            match std::env::var(name) {
                Ok(v) => v
                    .trim()
                    .parse()
                    .map(Some)
                    .map_err(|_| Failure::validation("env", format!("{name}={v} is not a nonnegative integer"))),
                Err(_) => Ok(None),
            }
        };
        Ok(Caps {
            crossings: read(ENV_MAX_CROSSINGS)?,
            matrix: read(ENV_MAX_MATRIX)?.unwrap_or(khovanov::DEFAULT_TORSION_MAX_DIM),
            states: read(ENV_MAX_STATES)?,
        })
    }

    fn bracket(&self) -> usize {
        self.crossings.unwrap_or(bracket::DEFAULT_MAX_CROSSINGS)
    }

    fn complex(&self) -> usize {
        self.crossings.unwrap_or(khovanov::DEFAULT_MAX_CROSSINGS)
    }
}

fn read_text(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure::validation("io", format!("{}: {e}", path.display())))
}

fn read_pd(path: &Path) -> Result<PlanarDiagram, Failure> {
    let text = read_text(path)?;
    PlanarDiagram::from_json(&text).map_err(|e| Failure::validation("format", format!("{}: {e}", path.display())))
}

fn read_mosaic(path: &Path) -> Result<Mosaic, Failure> {
    let text = read_text(path)?;
    Mosaic::parse(&text).map_err(|e| Failure::validation("format", format!("{}: {e}", path.display())))
}

fn poly(p: &Laurent) -> Value {
    serde_json::to_value(p).expect("polynomials serialize")
}

fn complex(z: Complex64) -> Value {
    json!([z.re, z.im])
}

fn run(cli: Cli) -> Run {
    let caps = Caps::from_env()?;
    match cli.command {
        Command::Bracket { form, pd } => {
            let d = read_pd(&pd)?;
            let p = match form {
                Form::A => bracket_a_with_cap(&d, caps.bracket())?,
                Form::Q => bracket_q_with_cap(&d, caps.bracket())?,
            };
            Ok((poly(&p), 0))
        }
        Command::Jones { pd } => Ok((poly(&jones_with_cap(&read_pd(&pd)?, caps.bracket())?), 0)),
        Command::Khovanov { shifted, torsion, pd } => {
            let d = read_pd(&pd)?;
            let cx = build_complex_with_cap(&d, caps.complex())?;
            let mut table = cx.homology_with(torsion, caps.matrix);
            if shifted {
                let (np, nm) = d.sign_counts();
                table = table.shifted(np, nm);
            }
            let rows = serde_json::to_value(&table.rows).expect("rows serialize");
            Ok((json!({ "shifted": shifted, "rows": rows }), 0))
        }
        Command::Amplitude { q, pd } => {
            let theta = angle::parse(&q).map_err(|r| Failure::validation("angle", r))?;
            let z = Complex64::from_polar(1.0, theta);
            let d = read_pd(&pd)?;
            let cx = build_complex_with_cap(&d, caps.complex())?;
            let amp = cx.amplitude(z)?;
            let trace = cx.density_trace(z)?;
            let expected = bracket_q_with_cap(&d, caps.bracket())?.eval(z)?;
            Ok((
                json!({
                    "theta": theta,
                    "q": complex(z),
                    "amplitude": complex(amp),
                    "densityTrace": complex(trace),
                    "polynomial": complex(expected),
                    "deviation": (amp - expected).norm(),
                    "states": cx.states().len(),
                }),
                0,
            ))
        }
        Command::Verify { pd, golden } => verify(&pd, golden.as_deref(), &caps),
        Command::MosaicOrbit { moves, max_states, max_depth, target, list, mosaic } => {
            let set = match moves {
                Some(path) => mosaic::load_moves(&read_text(&path)?)?,
                None => MoveSet::default_set(),
            };
            let limits = Limits {
                max_states: max_states.or(caps.states).unwrap_or(mosaic::DEFAULT_MAX_STATES),
                max_depth: max_depth.unwrap_or(mosaic::DEFAULT_MAX_DEPTH),
            };
            let start = read_mosaic(&mosaic)?;
            if let Some(t) = target {
                let goal = read_mosaic(&t)?;
                return Ok(match mosaic::same_orbit(&start, &goal, &set, limits)? {
                    SameOrbit::Yes(path) => (json!({ "answer": "yes", "path": path }), 0),
                    SameOrbit::No => (
                        json!({ "answer": "no", "relativeTo": "loaded move set", "moves": set.len() }),
                        0,
                    ),
                    SameOrbit::Unknown => (json!({ "answer": "unknown", "reason": "limit reached" }), 2),
                });
            }
            let orbit = mosaic::orbit_bfs(&start, &set, limits);
            let mut out = json!({
                "status": orbit.status,
                "size": orbit.size,
                "moves": set.len(),
            });
            if list {
                let members: Vec<String> =
                    orbit.members(start.size()).iter().map(|m| m.to_string().trim_end().replace('\n', " / ")).collect();
                out["members"] = json!(members);
            }
            let code = if orbit.status == OrbitStatus::Truncated { 2 } else { 0 };
            Ok((out, code))
        }
        Command::MosaicExtract { invariant, mosaic } => {
            let m = read_mosaic(&mosaic)?;
            let report = m.validate();
            if !report.suitably_connected {
                return Err(Failure::validation(
                    "not-suitably-connected",
                    format!("unmatched connection points at {:?}", report.violations),
                ));
            }
            let d = m.to_pd()?;
            let pd: Value = serde_json::from_str(&d.to_json()).expect("pd json");
            let mut out = json!({
                "size": m.size(),
                "crossings": d.crossing_count(),
                "components": d.component_count(),
                "writhe": d.writhe(),
                "pd": pd,
            });
            if let Some(spec) = invariant {
                let inv = Invariant::parse(&spec)?;
                out["invariant"] = json!({ "name": spec, "value": mosaic::invariant_observable(&m, &inv)? });
            }
            Ok((out, 0))
        }
        Command::Gauss { action } => gauss(action, &caps),
        Command::Graph { action: GraphCommand::Iso { first, second } } => {
            let g = DirectedGraph::from_json(&read_text(&first)?)?;
            let h = DirectedGraph::from_json(&read_text(&second)?)?;
            let found = instances::isomorphic_graphs(&g, &h)?;
            Ok((json!({ "isomorphic": found.is_some(), "permutation": found }), 0))
        }
        Command::Word { action: WordCommand::Search { from, to, presentation, generators, max_depth, max_states } } => {
            let p = match (presentation, generators) {
                (Some(path), _) => Presentation::from_json(&read_text(&path)?)?,
                (None, Some(k)) => Presentation::free(k),
                (None, None) => {
                    return Err(Failure::validation("usage", "word search needs --presentation or --generators"))
                }
            };
            let a = GroupWord::parse(&from, p.generators)?;
            let b = GroupWord::parse(&to, p.generators)?;
            let limits = search_limits(max_depth, max_states, &caps);
            Ok(match instances::bounded_word_equivalence(&a, &b, &p, limits)? {
                WordEquivalence::Path(path) => (json!({ "answer": "path", "length": path.len(), "path": path }), 0),
                WordEquivalence::DistinctWithinBound => {
                    (json!({ "answer": "distinctWithinBound", "maxDepth": limits.max_depth }), 0)
                }
                WordEquivalence::Unknown => (json!({ "answer": "unknown", "reason": "state limit reached" }), 2),
            })
        }
    }
}

fn search_limits(max_depth: Option<usize>, max_states: Option<usize>, caps: &Caps) -> SearchLimits {
    let d = SearchLimits::default();
    SearchLimits {
        max_depth: max_depth.unwrap_or(d.max_depth),
        max_states: max_states.or(caps.states).unwrap_or(d.max_states),
    }
}

fn gauss_rules(path: Option<&Path>) -> Result<GaussRules, Failure> {
    let mut rules = GaussRules::default();
    if let Some(p) = path {
        rules.extend_from_json(&read_text(p)?)?;
    }
    Ok(rules)
}

fn gauss(action: GaussCommand, caps: &Caps) -> Run {
    match action {
        GaussCommand::Apply { word, mv, n, rules } => {
            let rules = gauss_rules(rules.as_deref())?;
            let w = QuantumGaussWord::parse(&word, n)?;
            let m: MoveInstance =
                serde_json::from_str(&mv).map_err(|e| Failure::validation("format", format!("move: {e}")))?;
            let out = gaussmoves::apply(&w, &m, &rules)?;
            let inverse = m.inverse(&w)?;
            Ok((json!({ "result": out.to_string(), "inverse": inverse }), 0))
        }
        GaussCommand::Search { from, to, n, max_depth, max_states, rules } => {
            let rules = gauss_rules(rules.as_deref())?;
            let a = QuantumGaussWord::parse(&from, n)?;
            let b = QuantumGaussWord::parse(&to, n)?;
            let limits = search_limits(max_depth, max_states, caps);
            Ok(match gaussmoves::bounded_equivalence(&a, &b, &rules, limits)? {
                Equivalence::Path(path) => (json!({ "answer": "path", "length": path.len(), "path": path }), 0),
                Equivalence::DistinctWithinBound => {
                    (json!({ "answer": "distinctWithinBound", "maxDepth": limits.max_depth }), 0)
                }
                Equivalence::Unknown => (json!({ "answer": "unknown", "reason": "state limit reached" }), 2),
            })
        }
    }
}

fn check(name: &str, pass: bool, detail: Value) -> Value {
    json!({ "name": name, "pass": pass, "detail": detail })
}

fn report(r: &CheckReport) -> Value {
    check(&r.name, r.pass, json!({ "checked": r.checked, "failures": r.failures, "maxDeviation": r.max_deviation }))
}

fn khovanov_checks(cx: &ChainComplex, bq: &Laurent, matrix: usize, out: &mut Vec<Value>) {
    out.push(report(&cx.check_d_squared()));
    out.push(report(&cx.check_degrees()));
    out.push(report(&cx.check_anticommutation_symbolic()));
    out.push(report(&cx.check_eigenvalue_propagation()));
    let dims = cx.graded_euler();
    out.push(check("graded Euler (dimensions) = bracket_q", &dims == bq, json!(dims.to_string())));
    let betti = cx.homology_with(false, matrix).graded_euler();
    out.push(check("graded Euler (betti) = bracket_q", &betti == bq, json!(betti.to_string())));
    let tol = 1e-9 * cx.states().len() as f64;
    let mut worst = 0.0f64;
    for k in 0..12 {
        let z = Complex64::from_polar(1.0, std::f64::consts::TAU * k as f64 / 12.0);
        let want = bq.eval(z).unwrap_or(Complex64::new(f64::NAN, 0.0));
        for got in [cx.amplitude(z), cx.density_trace(z)] {
            worst = worst.max(got.map_or(f64::INFINITY, |g| (g - want).norm()));
        }
    }
    out.push(check(
        "amplitude and density trace = bracket_q at 12 roots of unity",
        worst <= tol,
        json!({ "maxDeviation": worst, "tolerance": tol }),
    ));
}

fn golden_checks(d: &PlanarDiagram, path: &Path, caps: &Caps, out: &mut Vec<Value>) -> Result<(), Failure> {
    let text = read_text(path)?;
    let g: Value = serde_json::from_str(&text)
        .map_err(|e| Failure::validation("format", format!("{}: {e}", path.display())))?;
    let want_poly = |key: &str| -> Result<Option<Laurent>, Failure> {
        g.get(key)
            .map(|v| Laurent::from_json(&v.to_string()).map_err(|e| Failure::validation("format", format!("{key}: {e}"))))
            .transpose()
    };
    if let Some(w) = g.get("writhe") {
        out.push(check("golden writhe", w.as_i64() == Some(d.writhe()), json!(d.writhe())));
    }
    let computed = [
        ("bracketA", bracket_a_with_cap(d, caps.bracket())?),
        ("bracketQ", bracket_q_with_cap(d, caps.bracket())?),
        ("jones", jones_with_cap(d, caps.bracket())?),
    ];
    for (key, got) in computed {
        if let Some(want) = want_poly(key)? {
            out.push(check(&format!("golden {key}"), got == want, poly(&got)));
        }
    }
    if let Some(rows) = g.get("homology") {
        let cx = build_complex_with_cap(d, caps.complex())?;
        let table = cx.homology_with(true, caps.matrix);
        let got = serde_json::to_value(&table.rows).expect("rows serialize");
        out.push(check("golden homology", &got == rows, got.clone()));
    }
    Ok(())
}

fn verify(path: &Path, golden: Option<&Path>, caps: &Caps) -> Run {
    let d = read_pd(path)?;
    let mut checks = Vec::new();
    let ba = bracket_a_with_cap(&d, caps.bracket())?;
    let bq = bracket_q_with_cap(&d, caps.bracket())?;
    let via_a = ba.shift(-(d.crossing_count() as i64)).convert(Var::Q)?;
    checks.push(check("bracket_q = convert(A^-c bracket_A)", via_a == bq, poly(&bq)));
    let states = bracket::bracket_q_from_states(&d)?;
    checks.push(check("enhanced-state sum = bracket_q", states == bq, Value::Null));
    let plus = bracket_q_with_cap(&d.with_extra_circle(), caps.bracket())?;
    checks.push(check("disjoint circle multiplies by q + q^-1", plus == &bq * &Laurent::q_circle(), Value::Null));
    let mirrored = bracket_a_with_cap(&d.mirror(), caps.bracket())?;
    checks.push(check("mirror inverts A", mirrored == ba.invert_variable(), Value::Null));
    match f_poly_with_cap(&d, caps.bracket()) {
        Ok(f) => checks.push(check("bracket divisible by delta", true, poly(&f))),
        Err(e) => checks.push(check("bracket divisible by delta", false, json!(e.to_string()))),
    }
    let mut skipped = false;
    match build_complex_with_cap(&d, caps.complex()) {
        Ok(cx) => khovanov_checks(&cx, &bq, caps.matrix, &mut checks),
        Err(Error::CapExceeded { .. }) => skipped = true,
        Err(e) => return Err(e.into()),
    }
    if let Some(g) = golden {
        golden_checks(&d, g, caps, &mut checks)?;
    }
    let pass = checks.iter().all(|c| c["pass"] == json!(true));
    let out = json!({
        "diagram": path.display().to_string(),
        "crossings": d.crossing_count(),
        "pass": pass,
        "khovanovSkipped": skipped,
        "checks": checks,
    });
    let code = if !pass {
        1
    } else if skipped {
        2
    } else {
        0
    };
    Ok((out, code))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{e}");
                return ExitCode::SUCCESS;
            }
            let first = e.to_string().lines().next().unwrap_or("usage error").trim_start_matches("error: ").to_string();
            eprintln!("{}", json!({ "error": "usage", "reason": first }));
            return ExitCode::from(1);
        }
    };
    let pretty = cli.pretty;
    match run(cli) {
        Ok((value, code)) => {
            let text = if pretty { serde_json::to_string_pretty(&value) } else { serde_json::to_string(&value) };
            // a closed pipe downstream is not an error of ours
            let _ = writeln!(std::io::stdout().lock(), "{}", text.expect("values serialize"));
            ExitCode::from(code)
        }
        Err(f) => {
            eprintln!("{}", json!({ "error": f.kind, "reason": f.reason }));
            ExitCode::from(f.code)
        }
    }
}
