//! The `lathom` command line, as a library so tests can drive it in-process.
//!
//! Exit codes: 0 success, 1 usage, 2 parse or validation error, 3 budget
//! exceeded, 4 internal invariant violation.

use std::fmt::Write as _;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use lattice_homology::classify::{full_report, is_almost_rational, ClassificationReport};
use lattice_homology::format::{parse_plumbing, PlumbingDoc};
use lattice_homology::homology::{compute_homology, DerivedDimensions};
use lattice_homology::hplus::{all_orbits, Level};
use lattice_homology::moves::{blow_down, check_exactness, BlowDown, ExactnessReport, SurgeryTriple};
use lattice_homology::seifert::{seifert_to_plumbing, SeifertData};
use lattice_homology::{CharVector, Error, Limits, PlumbingForest, SemidefiniteClass};

pub const SCHEMA_VERSION: u32 = 1;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_BUDGET: i32 = 3;
pub const EXIT_INVARIANT: i32 = 4;

#[derive(Debug, Parser)]
#[command(name = "lathom", version, about = "Lattice homology of negative-definite plumbing forests")]
struct Cli {
    /// Emit the versioned JSON schema instead of text.
    #[arg(long, global = true)]
    json: bool,
    /// Maximum number of box vectors to enumerate.
    #[arg(long, global = true, value_name = "N")]
    box_cap: Option<u64>,
    /// Maximum number of lattice points visited by sublevel and rationality searches.
    #[arg(long, global = true, value_name = "N")]
    point_cap: Option<u64>,
    /// Largest framing decrement tried when testing almost-rationality.
    #[arg(long, global = true, value_name = "N")]
    nmax: Option<u32>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Validation, determinant, bad vertices and definiteness.
    Info(FileArg),
    /// Dimensions per spin^c orbit and class representatives.
    Homology(FileArg),
    /// Graded lattice cohomology per orbit and its ker U cross-check.
    Hplus(FileArg),
    /// Rationality, almost-rationality and the derived dimensions.
    Classify(FileArg),
    /// Exactness of the surgery triple at a vertex.
    Triad(VertexArgs),
    /// Blow down a -1 leaf or isolated -1 vertex and compare homology.
    Blowdown(VertexArgs),
    /// Run a command on the star plumbing of a Seifert fibered space.
    Sfs(SfsArgs),
}

#[derive(Debug, Args)]
struct FileArg {
    /// Plumbing file, text or JSON.
    file: PathBuf,
}

#[derive(Debug, Args)]
struct VertexArgs {
    file: PathBuf,
    #[arg(long)]
    vertex: String,
}

#[derive(Debug, Args)]
struct SfsArgs {
    /// `"e0; a1/b1 a2/b2 ..."` or `"SFS [S2: (a1,b1) ...]"`.
    #[arg(long = "sfs", value_name = "DATA")]
    data: String,
    #[arg(value_enum, default_value_t = SfsAction::Homology)]
    action: SfsAction,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
enum SfsAction {
    Info,
    Homology,
    Hplus,
    Classify,
}

/// The exit code reported for a library error.
pub fn exit_code_for(e: &Error) -> i32 {
    if e.is_budget_error() {
        EXIT_BUDGET
    } else if e.is_invariant_violation() {
        EXIT_INVARIANT
    } else {
        EXIT_INPUT
    }
}

/// Why a run failed after parsing its arguments.
#[derive(Debug)]
enum Failure {
    Io(String),
    Lib(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

impl Failure {
    fn exit_code(&self) -> i32 {
        match self {
            Failure::Io(_) => EXIT_INPUT,
            Failure::Lib(e) => exit_code_for(e),
        }
    }

    fn kind(&self) -> &'static str {
        match self.exit_code() {
            EXIT_BUDGET => "budget_exceeded",
            EXIT_INVARIANT => "invariant_violation",
            _ => "invalid_input",
        }
    }

    fn message(&self) -> String {
        match self {
            Failure::Io(m) => m.clone(),
            Failure::Lib(e) => e.to_string(),
        }
    }
}

#[derive(Serialize)]
struct Envelope<'a> {
    schema_version: u32,
    command: &'a str,
    #[serde(skip_serializing_if = "Option::is_none")]
    seifert: Option<SeifertOut>,
    plumbing: PlumbingDoc,
    result: Payload,
}

#[derive(Serialize)]
struct ErrorEnvelope<'a> {
    schema_version: u32,
    command: &'a str,
    error: ErrorOut,
}

#[derive(Serialize)]
struct ErrorOut {
    kind: &'static str,
    exit_code: i32,
    message: String,
}

#[derive(Serialize)]
struct SeifertOut {
    input: SeifertData,
    normalized: SeifertData,
    reversed: bool,
    action: SfsAction,
}

#[derive(Serialize)]
#[serde(untagged)]
enum Payload {
    Info(InfoOut),
    Homology(HomologyOut),
    Hplus(HplusOut),
    Classify(Box<ClassificationReport>),
    Triad(TriadOut),
    Blowdown(BlowdownOut),
}

#[derive(Serialize)]
struct InfoOut {
    vertices: usize,
    edges: usize,
    determinant: String,
    abs_det: String,
    definiteness: lattice_homology::Definiteness,
    negdef: bool,
    bad_vertex_count: usize,
    bad_vertices: Vec<String>,
    semidefinite_class: Option<SemidefiniteClass>,
}

#[derive(Serialize)]
struct OrbitOut {
    index: usize,
    representative: CharVector,
    dim: u64,
    generators: Vec<CharVector>,
}

#[derive(Serialize)]
struct HomologyOut {
    det: u64,
    total_dim: u64,
    orbits: Vec<OrbitOut>,
    dims: DerivedDimensions,
    certified: bool,
}

#[derive(Serialize)]
struct HplusOrbitOut {
    index: usize,
    representative: CharVector,
    homology_dim: u64,
    ker_u_rank: u64,
    agrees: bool,
    stabilized_at: i64,
    local_minima: usize,
    levels: Vec<Level>,
}

#[derive(Serialize)]
struct HplusOut {
    det: u64,
    total_dim: u64,
    total_ker_u_rank: u64,
    agrees: bool,
    orbits: Vec<HplusOrbitOut>,
}

#[derive(Serialize)]
struct TriadOut {
    p: i64,
    exact: bool,
    #[serde(flatten)]
    report: ExactnessReport,
}

#[derive(Serialize)]
struct BlowdownOut {
    isomorphism: bool,
    #[serde(flatten)]
    report: BlowDown,
    result_plumbing: PlumbingDoc,
}

/// A finished computation; `violation` is set when a checked identity failed.
struct Outcome {
    payload: Payload,
    text: String,
    violation: Option<String>,
}

fn read_forest(path: &PathBuf) -> Result<PlumbingForest, Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::Io(format!("cannot read {}: {e}", path.display())))?;
    Ok(parse_plumbing(&text)?)
}

fn vec_str(v: &CharVector) -> String {
    let parts: Vec<String> = v.evals.iter().map(i64::to_string).collect();
    format!("({})", parts.join(", "))
}

fn info(f: &PlumbingForest) -> Outcome {
    let form = f.intersection_form();
    let bad = f.bad_vertex_ids();
    let out = InfoOut {
        vertices: f.len(),
        edges: f.edges().len(),
        determinant: form.determinant().to_string(),
        abs_det: form.determinant().magnitude().to_string(),
        definiteness: form.definiteness(),
        negdef: form.is_negative_definite(),
        bad_vertex_count: bad.len(),
        semidefinite_class: f.semidefinite_classify().ok(),
        bad_vertices: bad,
    };
    let mut t = String::new();
    let _ = writeln!(t, "vertices: {}  edges: {}  convention: {}", out.vertices, out.edges, f.edge_sign().as_str());
    let _ = writeln!(t, "determinant: {}  |det|: {}", out.determinant, out.abs_det);
    let _ = writeln!(t, "definiteness: {:?}", out.definiteness);
    let _ = writeln!(t, "bad vertices: {} {:?}", out.bad_vertex_count, out.bad_vertices);
    if let Some(c) = &out.semidefinite_class {
        let _ = writeln!(t, "semidefinite class: {c:?}");
    }
    Outcome {
        payload: Payload::Info(out),
        text: t,
        violation: None,
    }
}

fn dims_text(t: &mut String, d: &DerivedDimensions) {
    let _ = writeln!(
        t,
        "dim I# = {} (even {}, odd {})  dim HF-hat = {}  instanton L-space: {}",
        d.dim_isharp, d.dim_isharp_even, d.dim_isharp_odd, d.dim_hfhat, d.is_instanton_lspace
    );
    if d.conjectural {
        let _ = writeln!(t, "conjectural: yes (almost-rationality not certified)");
    } else {
        let _ = writeln!(t, "conjectural: no");
    }
}

fn homology(f: &PlumbingForest, limits: &Limits) -> Result<Outcome, Failure> {
    let h = compute_homology(f, limits)?;
    // Certification is best effort; a budget failure leaves it uncertified.
    let certified = match is_almost_rational(f, limits) {
        Ok(ar) => ar.is_yes(),
        Err(e) if e.is_budget_error() => false,
        Err(e) => return Err(e.into()),
    };
    let dims = h.derived_dimensions(certified)?;
    let shape = h.shape();
    let orbits: Vec<OrbitOut> = h
        .per_orbit()
        .iter()
        .enumerate()
        .map(|(i, o)| OrbitOut {
            index: i,
            representative: o.orbit.representative.clone(),
            dim: o.dim,
            generators: o.representatives.iter().map(|&idx| shape.vector_at(idx)).collect(),
        })
        .collect();
    let mut t = String::new();
    let _ = writeln!(t, "|det| = {}  total_dim = {}", h.det(), h.total_dim());
    for o in &orbits {
        let gens: Vec<String> = o.generators.iter().map(vec_str).collect();
        let _ = writeln!(
            t,
            "orbit {:>3} {}  dim {}  generators {}",
            o.index,
            vec_str(&o.representative),
            o.dim,
            gens.join(" ")
        );
    }
    dims_text(&mut t, &dims);
    Ok(Outcome {
        payload: Payload::Homology(HomologyOut {
            det: h.det(),
            total_dim: h.total_dim(),
            orbits,
            dims,
            certified,
        }),
        text: t,
        violation: None,
    })
}

fn hplus(f: &PlumbingForest, limits: &Limits) -> Result<Outcome, Failure> {
    let h = compute_homology(f, limits)?;
    let orbits: Vec<_> = h.per_orbit().iter().map(|o| o.orbit.clone()).collect();
    let graded = all_orbits(f, &orbits, limits)?;
    let rows: Vec<HplusOrbitOut> = h
        .per_orbit()
        .iter()
        .zip(graded)
        .enumerate()
        .map(|(i, (o, g))| HplusOrbitOut {
            index: i,
            representative: o.orbit.representative.clone(),
            homology_dim: o.dim,
            ker_u_rank: g.ker_u_rank,
            agrees: o.dim == g.ker_u_rank,
            stabilized_at: g.stabilized_at,
            local_minima: g.local_minima.len(),
            levels: g.levels,
        })
        .collect();
    let agrees = rows.iter().all(|r| r.agrees);
    let mut t = String::new();
    for r in &rows {
        let _ = writeln!(
            t,
            "orbit {} {}  ker U rank {}  dim H {}  {}",
            r.index,
            vec_str(&r.representative),
            r.ker_u_rank,
            r.homology_dim,
            if r.agrees { "ok" } else { "MISMATCH" }
        );
        let _ = writeln!(t, "  {:>6} {:>10} {:>6} {:>8}", "n", "components", "births", "points");
        for l in &r.levels {
            let _ = writeln!(t, "  {:>6} {:>10} {:>6} {:>8}", l.n, l.components, l.births, l.points);
        }
    }
    let _ = writeln!(t, "cross-check: {}", if agrees { "agrees" } else { "DISAGREES" });
    Ok(Outcome {
        violation: (!agrees).then(|| "ker U ranks differ from lattice homology dimensions".to_string()),
        payload: Payload::Hplus(HplusOut {
            det: h.det(),
            total_dim: h.total_dim(),
            total_ker_u_rank: rows.iter().map(|r| r.ker_u_rank).sum(),
            agrees,
            orbits: rows,
        }),
        text: t,
    })
}

fn classify(f: &PlumbingForest, limits: &Limits) -> Result<Outcome, Failure> {
    let r = full_report(f, limits)?;
    let mut t = String::new();
    let _ = writeln!(t, "vertices: {}  edges: {}  |det|: {}", r.vertices, r.edges, r.abs_det);
    let _ = writeln!(t, "negative-definite: {}", r.negdef);
    let _ = writeln!(t, "bad vertices: {} {:?}", r.bad_vertex_count, r.bad_vertices);
    if let Some(rational) = r.rational {
        let _ = write!(t, "rational: {rational}");
        if let Some(w) = &r.rationality_witness {
            let _ = write!(t, "  witness {:?}", w.coords);
        }
        let _ = writeln!(t);
    }
    if let Some(ar) = &r.almost_rational {
        let _ = writeln!(t, "almost-rational: {ar:?}");
    }
    if let Some(d) = r.dim_h {
        let _ = writeln!(t, "dim H: {d}");
    }
    if let Some(d) = &r.dims {
        dims_text(&mut t, d);
    }
    Ok(Outcome {
        payload: Payload::Classify(Box::new(r)),
        text: t,
        violation: None,
    })
}

fn triad(f: &PlumbingForest, vertex: &str, limits: &Limits) -> Result<Outcome, Failure> {
    let triple = SurgeryTriple::by_id(f, vertex)?;
    let report = check_exactness(&triple, limits)?;
    let exact = report.is_exact();
    let mut t = String::new();
    let _ = writeln!(t, "vertex {} (p = {})", report.vertex, triple.p());
    let _ = writeln!(
        t,
        "dims: Gamma-v {}  Gamma {}  Gamma+1 {}  rank A {}  rank B {}",
        report.dim_minus, report.dim_base, report.dim_plus, report.rank_a, report.rank_b
    );
    for (name, ok) in [
        ("A well-defined", report.a_well_defined),
        ("B well-defined", report.b_well_defined),
        ("B surjective", report.b_surjective),
        ("BA = 0", report.ba_zero),
        ("ker B = im A", report.ker_b_equals_im_a),
        ("BS = id", report.bs_identity),
        ("SB = id mod im A", report.sb_identity_mod_im_a),
    ] {
        let _ = writeln!(t, "  {name:<18} {ok}");
    }
    let _ = writeln!(t, "exact: {exact}");
    Ok(Outcome {
        violation: (!exact).then(|| "surgery triple is not exact".to_string()),
        payload: Payload::Triad(TriadOut {
            p: triple.p(),
            exact,
            report,
        }),
        text: t,
    })
}

fn blowdown(f: &PlumbingForest, vertex: &str, limits: &Limits) -> Result<Outcome, Failure> {
    let x = f.index_of(vertex)?;
    let report = blow_down(f, x, limits)?;
    let iso = report.is_isomorphism();
    let mut t = String::new();
    let _ = writeln!(
        t,
        "removed {}  neighbor {}",
        report.removed,
        report.neighbor.as_deref().unwrap_or("none")
    );
    let _ = writeln!(t, "dim H before {}  after {}", report.dim_before, report.dim_after);
    let _ = writeln!(
        t,
        "well-defined {}  signed permutation {}  orbits bijective {}  per-orbit dims match {}",
        report.well_defined, report.is_signed_permutation, report.orbits_bijective, report.per_orbit_dims_match
    );
    let _ = writeln!(t, "isomorphism: {iso}");
    Ok(Outcome {
        violation: (!iso).then(|| "blow-down map is not an isomorphism".to_string()),
        payload: Payload::Blowdown(BlowdownOut {
            isomorphism: iso,
            result_plumbing: PlumbingDoc::from_forest(&report.result),
            report,
        }),
        text: t,
    })
}

fn limits_of(cli: &Cli) -> Limits {
    let mut l = Limits::default();
    if let Some(c) = cli.box_cap {
        l.box_cap = c;
    }
    if let Some(c) = cli.point_cap {
        l.point_cap = c;
    }
    if let Some(n) = cli.nmax {
        l.nmax = n;
    }
    l
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::Info(_) => "info",
        Command::Homology(_) => "homology",
        Command::Hplus(_) => "hplus",
        Command::Classify(_) => "classify",
        Command::Triad(_) => "triad",
        Command::Blowdown(_) => "blowdown",
        Command::Sfs(_) => "sfs",
    }
}

fn execute(cli: &Cli, limits: &Limits) -> Result<(Option<SeifertOut>, PlumbingForest, Outcome), Failure> {
    let run = |action: SfsAction, f: &PlumbingForest| match action {
        SfsAction::Info => Ok(info(f)),
        SfsAction::Homology => homology(f, limits),
        SfsAction::Hplus => hplus(f, limits),
        SfsAction::Classify => classify(f, limits),
    };
    match &cli.command {
        Command::Info(a) => {
            let f = read_forest(&a.file)?;
            Ok((None, f.clone(), info(&f)))
        }
        Command::Homology(a) => {
            let f = read_forest(&a.file)?;
            let o = run(SfsAction::Homology, &f)?;
            Ok((None, f, o))
        }
        Command::Hplus(a) => {
            let f = read_forest(&a.file)?;
            let o = run(SfsAction::Hplus, &f)?;
            Ok((None, f, o))
        }
        Command::Classify(a) => {
            let f = read_forest(&a.file)?;
            let o = run(SfsAction::Classify, &f)?;
            Ok((None, f, o))
        }
        Command::Triad(a) => {
            let f = read_forest(&a.file)?;
            let o = triad(&f, &a.vertex, limits)?;
            Ok((None, f, o))
        }
        Command::Blowdown(a) => {
            let f = read_forest(&a.file)?;
            let o = blowdown(&f, &a.vertex, limits)?;
            Ok((None, f, o))
        }
        Command::Sfs(a) => {
            let data = SeifertData::parse(&a.data)?;
            let p = seifert_to_plumbing(&data)?;
            let mut o = run(a.action, &p.forest)?;
            let head = format!(
                "Seifert data {:?}, plumbed as e0 = {} with legs {:?}{}\n",
                data.legs,
                p.data.e0,
                p.data.legs,
                if p.reversed { " (orientation reversed)" } else { "" }
            );
            o.text.insert_str(0, &head);
            let s = SeifertOut {
                input: data,
                normalized: p.data,
                reversed: p.reversed,
                action: a.action,
            };
            Ok((Some(s), p.forest, o))
        }
    }
}

fn to_json<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("output types serialize");
    s.push('\n');
    s
}

/// Runs the command line `args` (including the program name), writing
/// results to `out` and diagnostics to `err`. Returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = out.write_all(text.as_bytes());
                    EXIT_OK
                }
                _ => {
                    let _ = err.write_all(text.as_bytes());
                    EXIT_USAGE
                }
            };
        }
    };
    let limits = limits_of(&cli);
    let name = command_name(&cli.command);
    match execute(&cli, &limits) {
        Ok((seifert, forest, outcome)) => {
            if cli.json {
                let env = Envelope {
                    schema_version: SCHEMA_VERSION,
                    command: name,
                    seifert,
                    plumbing: PlumbingDoc::from_forest(&forest),
                    result: outcome.payload,
                };
                let _ = out.write_all(to_json(&env).as_bytes());
            } else {
                let _ = out.write_all(outcome.text.as_bytes());
            }
            match outcome.violation {
                Some(v) => {
                    let _ = writeln!(err, "error: internal invariant violated: {v}");
                    EXIT_INVARIANT
                }
                None => EXIT_OK,
            }
        }
        Err(f) => {
            let code = f.exit_code();
            if cli.json {
                let env = ErrorEnvelope {
                    schema_version: SCHEMA_VERSION,
                    command: name,
                    error: ErrorOut {
                        kind: f.kind(),
                        exit_code: code,
                        message: f.message(),
                    },
                };
                let _ = out.write_all(to_json(&env).as_bytes());
            }
            let _ = writeln!(err, "error: {}", f.message());
            code
        }
    }
}

/// Thread count from `LATHOM_THREADS`, if set.
pub fn threads_from_env() -> Result<Option<usize>, String> {
    match std::env::var("LATHOM_THREADS") {
        Err(_) => Ok(None),
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(Some(n)),
            _ => Err(format!("LATHOM_THREADS must be a positive integer, got `{v}`")),
        },
    }
}
