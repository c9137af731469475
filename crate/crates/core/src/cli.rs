//! Command-line front end. Every command produces a [`Table`] which is
//! rendered as CSV (with a `#` header) or JSON.

use std::fmt::Write as _;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::catmap::CatMap;
use crate::error::Error;
use crate::flows::QuadraticHamiltonian;
use crate::fock::{exact_cs_propagator, FockTruncation};
use crate::phase_space::PhasePoint;
use crate::semiclassical::{
    amplitude_error, error_sweep, phase_error, spearman, torus_element, LinearStep, Method, PlaneElement, ScElement,
};
use crate::torus::{self, global_phase, hannay_berry, TorusHilbert};
use crate::weyl_ops::{compose_identities_report, weyl_symbol_via_reflection, LatticeCenter};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Parser)]
#[command(name = "scprop", version, about = "Exact and semiclassical coherent-state propagators")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Exact element <X1|U^t|X2>.
    Exact(PointArgs),
    /// Semiclassical elements, with errors against the exact value.
    Semiclassical(ScArgs),
    /// Amplitude errors of SC1, SC2, SC3 against N.
    Figure2(Figure2Args),
    /// Weyl symbol of U^t on the integer center grid.
    WeylSymbol(SymbolArgs),
    /// Maximum deviations of the translation/reflection identities.
    Identities(IdentityArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum System {
    /// Standard cat map on the torus.
    Cat,
    /// Harmonic oscillator in the plane.
    Harmonic,
    /// Inverted oscillator in the plane.
    Inverted,
}

#[derive(Debug, Clone, Args)]
pub struct Dims {
    /// Hilbert-space dimensions (comma separated).
    #[arg(long, value_delimiter = ',')]
    pub n: Vec<usize>,
    /// Lower end of an odd-N sweep.
    #[arg(long)]
    pub n_min: Option<usize>,
    /// Upper end of an odd-N sweep.
    #[arg(long)]
    pub n_max: Option<usize>,
}

#[derive(Debug, Clone, Args)]
pub struct Output {
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Write here instead of standard output.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct PointArgs {
    #[command(flatten)]
    pub dims: Dims,
    #[arg(long, default_value_t = 1.0)]
    pub t: f64,
    /// Bra label "p,q".
    #[arg(long, value_parser = parse_point, allow_hyphen_values = true, default_value = "0.2,0.3")]
    pub x1: PhasePoint,
    /// Ket label "p,q".
    #[arg(long, value_parser = parse_point, allow_hyphen_values = true, default_value = "0.1,0.2")]
    pub x2: PhasePoint,
    #[arg(long, value_enum, default_value_t = System::Cat)]
    pub system: System,
    /// Planck constant for plane systems.
    #[arg(long)]
    pub hbar: Option<f64>,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Clone, Args)]
pub struct ScArgs {
    #[command(flatten)]
    pub point: PointArgs,
    /// sc1, sc2, sc3, sc3lin (comma separated).
    #[arg(long, value_delimiter = ',', default_value = "sc3")]
    pub method: Vec<String>,
}

#[derive(Debug, Clone, Args)]
pub struct Figure2Args {
    #[arg(long, default_value_t = 3)]
    pub n_min: usize,
    #[arg(long, default_value_t = 31)]
    pub n_max: usize,
    #[arg(long, default_value_t = 1)]
    pub t: u32,
    #[arg(long, value_parser = parse_point, allow_hyphen_values = true, default_value = "0.2,0.3")]
    pub x1: PhasePoint,
    #[arg(long, value_parser = parse_point, allow_hyphen_values = true, default_value = "0.1,0.2")]
    pub x2: PhasePoint,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Clone, Args)]
pub struct SymbolArgs {
    #[command(flatten)]
    pub dims: Dims,
    #[arg(long, default_value_t = 1)]
    pub t: u32,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Clone, Args)]
pub struct IdentityArgs {
    #[command(flatten)]
    pub dims: Dims,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Random label triples per N.
    #[arg(long, default_value_t = 50)]
    pub samples: usize,
    #[command(flatten)]
    pub output: Output,
}

fn parse_point(s: &str) -> Result<PhasePoint, String> {
    let (p, q) = s.split_once(',').ok_or_else(|| format!("expected \"p,q\", got '{s}'"))?;
    let p: f64 = p.trim().parse().map_err(|e| format!("bad p in '{s}': {e}"))?;
    let q: f64 = q.trim().parse().map_err(|e| format!("bad q in '{s}': {e}"))?;
    let x = PhasePoint::new(p, q);
    if !x.is_finite() {
        return Err(format!("non-finite point '{s}'"));
    }
    Ok(x)
}

/// Failure of a CLI run, carrying its exit status.
#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Compute(Error),
    Io(std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Compute(_) | CliError::Io(_) => 1,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "usage error: {m}"),
            CliError::Compute(e) => write!(f, "computation error: {e}"),
            CliError::Io(e) => write!(f, "i/o error: {e}"),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::EvenNUnsupported(_) | Error::InvalidInput(_) => CliError::Usage(e.to_string()),
            e => CliError::Compute(e),
        }
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

fn usage<T>(msg: impl Into<String>) -> CliResult<T> {
    Err(CliError::Usage(msg.into()))
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Int(i64),
    Float(f64),
    Text(String),
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Int(i) => i.to_string(),
            Cell::Float(x) if x.is_finite() => format!("{x:.16e}"),
            Cell::Float(x) => x.to_string(),
            Cell::Text(s) => s.clone(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Int(i) => json!(i),
            Cell::Float(x) if x.is_finite() => json!(x),
            Cell::Float(_) => Value::Null,
            Cell::Text(s) => json!(s),
        }
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as i64)
    }
}
impl From<i64> for Cell {
    fn from(v: i64) -> Self {
        Cell::Int(v)
    }
}
impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Float(v)
    }
}
impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_string())
    }
}

/// Result table plus the header lines echoed into the output.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub command: String,
    pub config: Vec<(String, String)>,
    pub notes: Vec<String>,
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    fn new(command: &str, columns: Vec<&'static str>) -> Self {
        Table {
            command: command.into(),
            config: Vec::new(),
            notes: Vec::new(),
            columns,
            rows: Vec::new(),
        }
    }

    fn set(&mut self, k: &str, v: impl ToString) {
        self.config.push((k.into(), v.to_string()));
    }

    pub fn column(&self, name: &str) -> Option<Vec<&Cell>> {
        let i = self.columns.iter().position(|c| *c == name)?;
        Some(self.rows.iter().map(|r| &r[i]).collect())
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "# scprop {VERSION} {}", self.command);
        for (k, v) in &self.config {
            let _ = writeln!(s, "# {k} = {v}");
        }
        for n in &self.notes {
            let _ = writeln!(s, "# {n}");
        }
        let _ = writeln!(s, "{}", self.columns.join(","));
        for r in &self.rows {
            let line: Vec<String> = r.iter().map(Cell::csv).collect();
            let _ = writeln!(s, "{}", line.join(","));
        }
        s
    }

    pub fn to_json(&self) -> String {
        let config: serde_json::Map<String, Value> =
            self.config.iter().map(|(k, v)| (k.clone(), json!(v))).collect();
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|r| {
                Value::Object(
                    self.columns
                        .iter()
                        .zip(r)
                        .map(|(c, v)| (c.to_string(), v.json()))
                        .collect(),
                )
            })
            .collect();
        let doc = json!({
            "scprop": VERSION,
            "command": self.command,
            "config": config,
            "notes": self.notes,
            "rows": rows,
        });
        serde_json::to_string_pretty(&doc).unwrap_or_default() + "\n"
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Csv => self.to_csv(),
            Format::Json => self.to_json(),
        }
    }
}

impl Dims {
    /// Explicit list, else the odd range `[n_min, n_max]`.
    fn resolve(&self, default: &[usize]) -> CliResult<Vec<usize>> {
        let ns = match (self.n.is_empty(), self.n_min, self.n_max) {
            (false, None, None) => self.n.clone(),
            (false, _, _) => return usage("give either --n or --n-min/--n-max, not both"),
            (true, None, None) => default.to_vec(),
            (true, lo, hi) => {
                let lo = lo.unwrap_or(3);
                let hi = hi.unwrap_or(lo);
                if lo > hi {
                    return usage(format!("--n-min {lo} exceeds --n-max {hi}"));
                }
                (lo..=hi).filter(|n| n % 2 == 1).collect()
            }
        };
        if ns.is_empty() {
            return usage("empty list of dimensions");
        }
        Ok(ns)
    }
}

fn odd_dims(ns: &[usize]) -> CliResult<Vec<TorusHilbert>> {
    ns.iter()
        .map(|&n| {
            if n < 3 || n % 2 == 0 {
                usage(format!("N = {n} invalid: N must be odd and at least 3"))
            } else {
                Ok(TorusHilbert::new(n)?)
            }
        })
        .collect()
}

fn torus_point(x: PhasePoint, name: &str) -> CliResult<()> {
    if x.in_unit_square() {
        Ok(())
    } else {
        usage(format!("--{name} = ({}, {}) must lie in [0,1)^2 on the torus", x.p, x.q))
    }
}

fn torus_steps(t: f64) -> CliResult<u32> {
    if t >= 0.0 && t.fract() == 0.0 && t <= u32::MAX as f64 {
        Ok(t as u32)
    } else {
        usage(format!("--t = {t}: the cat map needs a non-negative integer number of steps"))
    }
}

fn plane_hamiltonian(p: &PointArgs) -> CliResult<Option<QuadraticHamiltonian>> {
    let hbar = p.hbar.unwrap_or(1.0);
    if !(hbar > 0.0 && hbar.is_finite()) {
        return usage(format!("--hbar = {hbar} must be positive"));
    }
    Ok(match p.system {
        System::Cat => {
            if p.hbar.is_some() {
                return usage("--hbar applies to plane systems (--system harmonic|inverted)");
            }
            None
        }
        System::Harmonic => Some(QuadraticHamiltonian::harmonic().with_hbar(hbar)),
        System::Inverted => Some(QuadraticHamiltonian::inverted().with_hbar(hbar)),
    })
}

fn echo_point(table: &mut Table, p: &PointArgs) {
    table.set("system", format!("{:?}", p.system).to_lowercase());
    table.set("t", p.t);
    table.set("x1", format!("{},{}", p.x1.p, p.x1.q));
    table.set("x2", format!("{},{}", p.x2.p, p.x2.q));
}

fn cmd_exact(p: &PointArgs) -> CliResult<Table> {
    let mut table = Table::new("exact", vec!["n", "t", "x1_p", "x1_q", "x2_p", "x2_q", "re", "im"]);
    echo_point(&mut table, p);
    let row = |n: i64, v: num_complex::Complex64| {
        vec![
            n.into(),
            p.t.into(),
            p.x1.p.into(),
            p.x1.q.into(),
            p.x2.p.into(),
            p.x2.q.into(),
            v.re.into(),
            v.im.into(),
        ]
    };
    if let Some(h) = plane_hamiltonian(p)? {
        table.set("hbar", h.hbar);
        table.notes.push("plane element from the number-basis propagator; n = 0".into());
        let v = exact_cs_propagator(&h, p.x1, p.x2, p.t, &FockTruncation::default_for(h.hbar))?;
        table.rows.push(row(0, v.value));
        return Ok(table);
    }
    let t = torus_steps(p.t)?;
    torus_point(p.x1, "x1")?;
    torus_point(p.x2, "x2")?;
    let spaces = odd_dims(&p.dims.resolve(&[7])?)?;
    table.set("n", join(&spaces));
    let vals: Vec<_> = spaces
        .par_iter()
        .map(|s| torus::exact_cs_element(s, p.x1, p.x2, t as i64).value)
        .collect();
    for (s, v) in spaces.iter().zip(vals) {
        table.rows.push(row(s.n as i64, v));
    }
    Ok(table)
}

fn join(spaces: &[TorusHilbert]) -> String {
    spaces.iter().map(|s| s.n.to_string()).collect::<Vec<_>>().join(",")
}

fn methods(names: &[String]) -> CliResult<Vec<Method>> {
    let ms = names
        .iter()
        .map(|s| s.parse::<Method>())
        .collect::<Result<Vec<_>, _>>()?;
    if let Some(m) = ms.iter().find(|m| **m == Method::Exact) {
        return usage(format!("--method {m}: use the exact command"));
    }
    Ok(ms)
}

fn cmd_semiclassical(a: &ScArgs) -> CliResult<Table> {
    let p = &a.point;
    let ms = methods(&a.method)?;
    let mut table = Table::new(
        "semiclassical",
        vec![
            "n", "t", "method", "re", "im", "amp_err", "phase_err", "winding_p", "winding_q", "mismatch", "images",
        ],
    );
    echo_point(&mut table, p);
    table.set("method", ms.iter().map(|m| m.name()).collect::<Vec<_>>().join(","));
    let push = |table: &mut Table, n: usize, m: Method, e: &crate::CSElement, exact: num_complex::Complex64| {
        let d = e.diagnostics;
        table.rows.push(vec![
            n.into(),
            p.t.into(),
            m.name().into(),
            e.value.re.into(),
            e.value.im.into(),
            amplitude_error(e.value, exact).into(),
            phase_error(e.value, exact).into(),
            d.winding[0].into(),
            d.winding[1].into(),
            d.mismatch.into(),
            d.images.into(),
        ]);
    };

    if let Some(h) = plane_hamiltonian(p)? {
        table.set("hbar", h.hbar);
        let exact = exact_cs_propagator(&h, p.x1, p.x2, p.t, &FockTruncation::default_for(h.hbar))?.value;
        let step = LinearStep::from_flow(&h, p.t);
        for &m in &ms {
            let e = ScElement { step: &step, method: m }.eval(p.x1, p.x2, h.hbar)?;
            push(&mut table, 0, m, &e, exact);
        }
        return Ok(table);
    }

    let t = torus_steps(p.t)?;
    torus_point(p.x1, "x1")?;
    torus_point(p.x2, "x2")?;
    let spaces = odd_dims(&p.dims.resolve(&[7])?)?;
    table.set("n", join(&spaces));
    table.notes.push(format!(
        "values include the global phase exp(i pi t/2) of the Hannay-Berry propagator (t = {t})"
    ));
    let map = CatMap::standard();
    let g = global_phase(t as i64);
    let results: Vec<_> = spaces
        .par_iter()
        .map(|s| {
            let exact = torus::exact_cs_element(s, p.x1, p.x2, t as i64).value;
            let rows: Result<Vec<_>, Error> = ms
                .iter()
                .map(|&m| {
                    torus_element(&map, s, m, p.x1, p.x2, t).map(|mut e| {
                        e.value *= g;
                        (m, e)
                    })
                })
                .collect();
            rows.map(|r| (s.n, exact, r))
        })
        .collect();
    for r in results {
        let (n, exact, rows) = r?;
        for (m, e) in rows {
            push(&mut table, n, m, &e, exact);
        }
    }
    Ok(table)
}

/// Error table of SC1, SC2, SC3 over the odd `N` in `[n_min, n_max]`.
pub fn figure2_table(a: &Figure2Args) -> CliResult<Table> {
    torus_point(a.x1, "x1")?;
    torus_point(a.x2, "x2")?;
    let dims = Dims {
        n: Vec::new(),
        n_min: Some(a.n_min),
        n_max: Some(a.n_max),
    };
    let spaces = odd_dims(&dims.resolve(&[])?)?;
    let ns: Vec<usize> = spaces.iter().map(|s| s.n).collect();
    let mut table = Table::new("figure2", vec!["n", "e_sc1", "e_sc2", "e_sc3"]);
    table.set("n", join(&spaces));
    table.set("t", a.t);
    table.set("x1", format!("{},{}", a.x1.p, a.x1.q));
    table.set("x2", format!("{},{}", a.x2.p, a.x2.q));
    let ms = [Method::Sc1, Method::Sc2, Method::Sc3];
    let rows = error_sweep(&CatMap::standard(), &ns, a.t, a.x1, a.x2, &ms);
    for (k, chunk) in rows.chunks(ms.len()).enumerate() {
        let mut r: Vec<Cell> = vec![ns[k].into()];
        for row in chunk {
            match (row.amp_err, &row.error) {
                (Some(e), _) => r.push(e.into()),
                (None, Some(msg)) => {
                    return Err(CliError::Compute(Error::InvalidInput(format!(
                        "{} at N = {}: {msg}",
                        row.method, row.n
                    ))))
                }
                (None, None) => r.push(f64::NAN.into()),
            }
        }
        table.rows.push(r);
    }
    let col = |i: usize| -> Vec<f64> {
        table
            .rows
            .iter()
            .map(|r| if let Cell::Float(x) = r[i] { x } else { f64::NAN })
            .collect()
    };
    let nsf: Vec<f64> = ns.iter().map(|&n| n as f64).collect();
    let (e1, e2, e3) = (col(1), col(2), col(3));
    let note = format!(
        "min e_sc1 = {:.6e}; spearman(n, e_sc2) = {:.6}; max e_sc3 = {:.6e}",
        e1.iter().cloned().fold(f64::INFINITY, f64::min),
        spearman(&nsf, &e2),
        e3.iter().cloned().fold(0.0, f64::max)
    );
    table.notes.push(note);
    Ok(table)
}

fn cmd_weyl_symbol(a: &SymbolArgs) -> CliResult<Table> {
    let spaces = odd_dims(&a.dims.resolve(&[7])?)?;
    let map_t = CatMap::standard().power(a.t.max(1))?;
    let mut table = Table::new("weyl-symbol", vec!["n", "a", "b", "p", "q", "re", "im", "closed_re", "closed_im"]);
    table.set("n", join(&spaces));
    table.set("t", a.t);
    table.notes.push("centers (a/N, b/N); closed_* is the classical-action formula".into());
    let g = global_phase(a.t as i64);
    let blocks: Vec<Result<Vec<Vec<Cell>>, Error>> = spaces
        .par_iter()
        .map(|s| {
            let u = hannay_berry(s).pow(a.t as i64);
            let closed = if a.t == 0 {
                None
            } else {
                Some(torus::weyl_symbol_closed_form_grid(&map_t, s))
            };
            let ni = s.n as i64;
            let mut out = Vec::new();
            for ia in 0..ni {
                for ib in 0..ni {
                    let v = weyl_symbol_via_reflection(s, &u, LatticeCenter::integer(ia, ib))?;
                    let c = closed
                        .as_ref()
                        .map(|c| c[[ia as usize, ib as usize]] * g)
                        .unwrap_or(num_complex::Complex64::new(1.0, 0.0));
                    out.push(vec![
                        s.n.into(),
                        ia.into(),
                        ib.into(),
                        (ia as f64 / s.n as f64).into(),
                        (ib as f64 / s.n as f64).into(),
                        v.re.into(),
                        v.im.into(),
                        c.re.into(),
                        c.im.into(),
                    ]);
                }
            }
            Ok(out)
        })
        .collect();
    for b in blocks {
        table.rows.extend(b?);
    }
    Ok(table)
}

fn cmd_identities(a: &IdentityArgs) -> CliResult<Table> {
    let spaces = odd_dims(&a.dims.resolve(&[3, 5, 7, 9, 11, 13, 15])?)?;
    let mut table = Table::new(
        "identities",
        vec![
            "n",
            "translation_group",
            "translation_inverse",
            "reflect_translate",
            "translate_reflect",
            "reflect_reflect",
            "three_reflections",
            "involution",
            "completeness",
            "orthogonality",
            "unitarity",
            "max",
        ],
    );
    table.set("n", join(&spaces));
    table.set("seed", a.seed);
    table.set("samples", a.samples);
    let reports: Vec<_> = spaces
        .par_iter()
        .map(|s| compose_identities_report(s, a.samples, a.seed.wrapping_add(s.n as u64)))
        .collect();
    for r in reports {
        let r = r?;
        table.rows.push(vec![
            r.n.into(),
            r.translation_group.into(),
            r.translation_inverse.into(),
            r.reflect_translate.into(),
            r.translate_reflect.into(),
            r.reflect_reflect.into(),
            r.three_reflections.into(),
            r.involution.into(),
            r.completeness.into(),
            r.orthogonality.into(),
            r.unitarity.into(),
            r.max_deviation().into(),
        ]);
    }
    Ok(table)
}

impl Command {
    fn output(&self) -> &Output {
        match self {
            Command::Exact(a) => &a.output,
            Command::Semiclassical(a) => &a.point.output,
            Command::Figure2(a) => &a.output,
            Command::WeylSymbol(a) => &a.output,
            Command::Identities(a) => &a.output,
        }
    }
}

/// Runs a parsed command and returns its table.
pub fn execute(cmd: &Command) -> CliResult<Table> {
    match cmd {
        Command::Exact(a) => cmd_exact(a),
        Command::Semiclassical(a) => cmd_semiclassical(a),
        Command::Figure2(a) => figure2_table(a),
        Command::WeylSymbol(a) => cmd_weyl_symbol(a),
        Command::Identities(a) => cmd_identities(a),
    }
}

/// Parses `args`, runs, writes the output. Returns the process exit status.
pub fn main_with<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let out = cli.command.output().clone();
    let result = execute(&cli.command).and_then(|table| {
        let text = table.render(out.format);
        match &out.out {
            Some(path) => std::fs::write(path, text).map_err(CliError::Io),
            None => {
                print!("{text}");
                Ok(())
            }
        }
    });
    match result {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("scprop: {e}");
            e.exit_code()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run(args: &[&str]) -> CliResult<Table> {
        let cli = Cli::try_parse_from(std::iter::once("scprop").chain(args.iter().copied())).unwrap();
        execute(&cli.command)
    }

    #[test]
    fn point_parsing() {
        assert_eq!(parse_point("0.5, -0.25").unwrap(), PhasePoint::new(0.5, -0.25));
        assert!(parse_point("0.5").is_err());
        assert!(parse_point("a,b").is_err());
        assert!(parse_point("nan,1").is_err());
    }

    #[test]
    fn exact_one_row() {
        let t = run(&["exact", "--n", "7", "--t", "1", "--x1", "0.5,0.5", "--x2", "0.5,0.5"]).unwrap();
        assert_eq!(t.rows.len(), 1);
        let csv = t.to_csv();
        assert!(csv.starts_with("# scprop "));
        assert!(csv.contains("\nn,t,x1_p,x1_q,x2_p,x2_q,re,im\n"));
    }

    #[test]
    fn usage_errors() {
        let e = run(&["exact", "--n", "6"]).unwrap_err();
        assert_eq!(e.exit_code(), 2);
        assert!(e.to_string().contains("odd"));
        assert_eq!(run(&["exact", "--t", "1.5"]).unwrap_err().exit_code(), 2);
        assert_eq!(run(&["exact", "--x1", "1.2,0.1"]).unwrap_err().exit_code(), 2);
        assert_eq!(run(&["semiclassical", "--method", "sc9"]).unwrap_err().exit_code(), 2);
        assert_eq!(run(&["exact", "--hbar", "0.1"]).unwrap_err().exit_code(), 2);
    }

    #[test]
    fn short_time_divergence_exit_1() {
        let e = run(&["semiclassical", "--method", "sc2", "--t", "0"]).unwrap_err();
        assert_eq!(e.exit_code(), 1);
        assert!(e.to_string().contains("short-time divergence"));
    }

    #[test]
    fn json_mirrors_rows() {
        let t = run(&["semiclassical", "--n", "5,7", "--method", "sc3,sc3lin"]).unwrap();
        let v: Value = serde_json::from_str(&t.to_json()).unwrap();
        assert_eq!(v["rows"].as_array().unwrap().len(), 4);
        assert_eq!(v["rows"][1]["method"], "sc3lin");
        assert!(v["rows"][0]["amp_err"].as_f64().unwrap() < 1e-9);
    }

    #[test]
    fn range_resolution() {
        let d = Dims {
            n: vec![],
            n_min: Some(3),
            n_max: Some(10),
        };
        assert_eq!(d.resolve(&[]).unwrap(), vec![3, 5, 7, 9]);
    }
}
