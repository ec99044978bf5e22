//! Batch front end: parses state specs, runs one command, returns a report.

use std::fmt::Write as _;
use std::fs;

use clap::{Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde::Serialize;

use crate::embedding::{Factorization, GpEmbedding};
use crate::error::{Error, Result};
use crate::eval::{covariance_check, moment_table, MomentTable, StateEvaluator, RANK_THRESHOLD};
use crate::format::{parse_order, parse_state, parse_unitary, StateSpec};
use crate::oracle::{
    monomials_up_to, oracle_table, states_agree, table_discrepancy, OracleEvaluator,
};
use crate::params::{
    canonicalize, classify, equivalent, equivalent_by_product_order, lift_order,
    CanonicalInvariant, CuntzParam, Equivalence, FiniteGpParam, GpState, L2Family, Region, Verdict,
};
use crate::scalar::{cpow, Real, Tolerances};
use crate::word::{parse_product, Monomial, MultiIndex};

#[derive(Parser, Debug)]
#[command(
    name = "gpstate",
    version,
    about = "Geometric progression states on Cuntz algebras"
)]
pub struct Cli {
    /// Absolute tolerance for verdicts and truncated sums.
    #[arg(long, global = true, default_value_t = 1e-9)]
    pub tolerance: f64,
    /// Longest |J| + |K| enumerated when no words are given.
    #[arg(long, global = true, default_value_t = 6)]
    pub max_len: usize,
    /// Recompute through the independent oracle.
    #[arg(long, global = true)]
    pub verify: bool,
    #[arg(long, global = true, value_enum, default_value_t = OutputFormat::Text)]
    pub format: OutputFormat,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Text,
    Structured,
}

/// `SPEC` arguments are inline JSON when they start with `{`, else a file path.
#[derive(Subcommand, Debug)]
pub enum Command {
    /// Unique-pure versus boundary-mixture verdict.
    Classify { spec: String },
    /// Tabulate ω(s_J s_K*).
    Eval {
        spec: String,
        /// Monomial such as "s1 s2*"; repeatable. Defaults to every monomial up to --max-len.
        #[arg(long = "word")]
        words: Vec<String>,
    },
    /// Unitary equivalence of two states.
    Equiv { a: String, b: String },
    /// Canonical invariant.
    Canon { spec: String },
    /// Re-express a finite-order state at a multiple of its order.
    Lift {
        spec: String,
        #[arg(long)]
        order: usize,
    },
    /// Transform by a unitary g in U(n-1), given as rows of [re, im].
    Gauge {
        spec: String,
        #[arg(long)]
        unitary: String,
    },
    /// Θ, its spectrum and the correlation dimension.
    Gram { spec: String },
    /// Split a word as t_Ĵ s_n^a.
    Factorize {
        #[arg(long)]
        n: usize,
        /// Positive integer or "infinite".
        #[arg(long)]
        order: String,
        word: String,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Provenance {
    pub tolerance: f64,
    pub max_len: usize,
    pub verify: bool,
    pub library: Tolerances<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VerdictEntry {
    pub name: String,
    pub value: String,
    pub tolerance: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TableEntry {
    pub label: String,
    pub re: f64,
    pub im: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Table {
    pub name: String,
    pub tolerance: f64,
    pub entries: Vec<TableEntry>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Residual {
    pub name: String,
    pub value: f64,
    pub tolerance: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NamedState {
    pub name: String,
    pub spec: StateSpec,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Report {
    pub command: Vec<String>,
    pub provenance: Provenance,
    pub verdicts: Vec<VerdictEntry>,
    pub tables: Vec<Table>,
    pub residuals: Vec<Residual>,
    pub states: Vec<NamedState>,
    pub notes: Vec<String>,
}

pub const MIXTURE_NOTE: &str = "mixture weights are not determined: every convex combination of the components is a GP state with this parameter";

/// Process result: what to print and the exit status.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Outcome {
    pub stdout: String,
    pub stderr: String,
    pub code: i32,
}

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_ILL_CONDITIONED: i32 = 2;
pub const EXIT_ORACLE_MISMATCH: i32 = 3;

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::NearBoundary { .. }
        | Error::Boundary
        | Error::TailBoundTooLoose { .. }
        | Error::SingularSystem => EXIT_ILL_CONDITIONED,
        _ => EXIT_USAGE,
    }
}

fn fmt_complex(z: Complex64) -> String {
    if z.im.is_sign_negative() {
        format!("{}-{}i", z.re, -z.im)
    } else {
        format!("{}+{}i", z.re, z.im)
    }
}

impl Report {
    fn new(command: Vec<String>, cli: &Cli) -> Self {
        Report {
            command,
            provenance: Provenance {
                tolerance: cli.tolerance,
                max_len: cli.max_len,
                verify: cli.verify,
                library: f64::tolerances(),
            },
            verdicts: Vec::new(),
            tables: Vec::new(),
            residuals: Vec::new(),
            states: Vec::new(),
            notes: Vec::new(),
        }
    }

    fn verdict(&mut self, name: &str, value: impl Into<String>, tolerance: f64) {
        self.verdicts.push(VerdictEntry {
            name: name.into(),
            value: value.into(),
            tolerance,
        });
    }

    fn residual(&mut self, name: &str, value: f64, tolerance: f64) {
        self.residuals.push(Residual {
            name: name.into(),
            value,
            tolerance,
        });
    }

    fn state(&mut self, name: &str, state: &GpState<f64>) {
        self.states.push(NamedState {
            name: name.into(),
            spec: StateSpec::from_state(state),
        });
    }

    pub fn render_text(&self) -> String {
        let mut out = String::new();
        let p = &self.provenance;
        let _ = writeln!(out, "command: {}", self.command.join(" "));
        let _ = writeln!(
            out,
            "tolerances: requested {:e} | prune {:e} norm {:e} boundary {:e} closed_form {:e} unitary {:e} l2_bracket {:e} | max_len {} | verify {}",
            p.tolerance,
            p.library.prune,
            p.library.norm,
            p.library.boundary,
            p.library.closed_form,
            p.library.unitary,
            p.library.l2_bracket,
            p.max_len,
            p.verify
        );
        for v in &self.verdicts {
            let _ = writeln!(
                out,
                "verdict {}: {} (tol {:e})",
                v.name, v.value, v.tolerance
            );
        }
        for t in &self.tables {
            let _ = writeln!(out, "table {} (tol {:e}):", t.name, t.tolerance);
            let width = t
                .entries
                .iter()
                .map(|e| e.label.chars().count())
                .max()
                .unwrap_or(0);
            for e in &t.entries {
                let pad = width - e.label.chars().count();
                let _ = writeln!(
                    out,
                    "  {}{}  {}",
                    e.label,
                    " ".repeat(pad),
                    fmt_complex(Complex64::new(e.re, e.im))
                );
            }
        }
        for r in &self.residuals {
            let _ = writeln!(
                out,
                "residual {}: {:e} (tol {:e})",
                r.name, r.value, r.tolerance
            );
        }
        for s in &self.states {
            let _ = writeln!(
                out,
                "state {}: {}",
                s.name,
                serde_json::to_string(&s.spec).expect("spec serializes")
            );
        }
        for n in &self.notes {
            let _ = writeln!(out, "note: {n}");
        }
        out
    }

    pub fn render(&self, format: OutputFormat) -> String {
        match format {
            OutputFormat::Text => self.render_text(),
            OutputFormat::Structured => {
                let mut s = serde_json::to_string_pretty(self).expect("report serializes");
                s.push('\n');
                s
            }
        }
    }
}

fn read_arg(arg: &str, inline_prefix: char) -> Result<String> {
    if arg.trim_start().starts_with(inline_prefix) {
        Ok(arg.to_string())
    } else {
        fs::read_to_string(arg).map_err(|e| Error::Usage(format!("cannot read {arg}: {e}")))
    }
}

fn load_state(arg: &str) -> Result<GpState<f64>> {
    parse_state(&read_arg(arg, '{')?)
}

fn entry(label: impl Into<String>, z: Complex64) -> TableEntry {
    TableEntry {
        label: label.into(),
        re: z.re,
        im: z.im,
    }
}

fn verdict_name(v: Verdict) -> &'static str {
    match v {
        Verdict::UniquePure => "UNIQUE_PURE",
        Verdict::BoundaryMixture => "BOUNDARY_MIXTURE",
    }
}

fn equivalence_name(e: Equivalence) -> &'static str {
    match e {
        Equivalence::ExactEquivalent => "EXACT_EQUIVALENT",
        Equivalence::EquivalentWithinTol => "EQUIVALENT_WITHIN_TOL",
        Equivalence::Distinct => "DISTINCT",
    }
}

fn invariant_state(c: &CanonicalInvariant<f64>) -> GpState<f64> {
    match c {
        CanonicalInvariant::Interior(p) => GpState::Infinite(p.clone()),
        CanonicalInvariant::Boundary { n, c } => {
            let mut y = vec![Complex64::new(0.0, 0.0); *n];
            y[n - 1] = *c;
            GpState::Cuntz(CuntzParam::new(*n, y).expect("unit vector"))
        }
    }
}

/// A finite parameter defining the same state, when one exists.
fn finite_form(state: &GpState<f64>) -> Option<FiniteGpParam<f64>> {
    match state {
        GpState::Finite(p) => Some(p.clone()),
        GpState::Cuntz(y) => Some(y.to_finite()),
        GpState::Infinite(z) => match z.family() {
            L2Family::Geometric { seed } => {
                let k = (seed.len() - 1) / (z.n() - 1);
                FiniteGpParam::new(z.n(), k, seed.clone()).ok()
            }
            _ => None,
        },
    }
}

fn table_entries(t: &MomentTable<f64>) -> Vec<TableEntry> {
    let mut entries = Vec::new();
    for a in 0..t.k {
        for b in 0..t.k {
            entries.push(entry(format!("Θ[{a},{b}]"), t.theta(a, b)));
        }
    }
    entries
}

fn parse_words(words: &[String]) -> Result<Vec<(String, Option<Monomial>)>> {
    words
        .iter()
        .map(|w| Ok((w.trim().to_string(), parse_product(w)?)))
        .collect()
}

struct Ctx<'a> {
    cli: &'a Cli,
    report: Report,
    mismatch: bool,
}

impl Ctx<'_> {
    fn tol(&self) -> f64 {
        self.cli.tolerance
    }

    fn classify(&mut self, spec: &str) -> Result<()> {
        let state = load_state(spec)?;
        let c = classify(&state)?;
        let tol = f64::tolerances().boundary;
        self.report
            .verdict("classification", verdict_name(c.verdict), tol);
        for (j, y) in c.components.iter().enumerate() {
            self.report
                .state(&format!("component_{j}"), &GpState::Cuntz(y.clone()));
        }
        if c.verdict == Verdict::BoundaryMixture {
            self.report
                .verdict("components", c.components.len().to_string(), tol);
            self.report.notes.push(MIXTURE_NOTE.into());
            if self.cli.verify {
                let (k, zm) = match &state {
                    GpState::Finite(p) => (p.k(), p.last()),
                    _ => unreachable!("only finite orders have mixtures"),
                };
                let worst = c
                    .components
                    .iter()
                    .map(|y| (cpow(y.last(), k) - zm).norm())
                    .fold(0.0, f64::max);
                self.report.residual("component_power", worst, 1e-12);
                self.mismatch |= worst > 1e-12;
            }
        }
        Ok(())
    }

    fn eval(&mut self, spec: &str, words: &[String]) -> Result<()> {
        let state = load_state(spec)?;
        if let GpState::Finite(p) = &state {
            if p.k() > 1 {
                p.region()?;
            }
        }
        let n = state.n();
        let targets: Vec<(String, Option<Monomial>)> = if words.is_empty() {
            monomials_up_to(n, self.cli.max_len)
                .into_iter()
                .map(|m| (m.to_string(), Some(m)))
                .collect()
        } else {
            parse_words(words)?
        };
        let evaluator = StateEvaluator::new(&state, self.tol())?;
        let mut entries = Vec::with_capacity(targets.len());
        let mut values = Vec::with_capacity(targets.len());
        for (label, m) in &targets {
            let v = match m {
                Some(m) => evaluator.monomial(m)?,
                None => Complex64::new(0.0, 0.0),
            };
            values.push(v);
            entries.push(entry(label.clone(), v));
        }
        self.report.tables.push(Table {
            name: "moments".into(),
            tolerance: self.tol(),
            entries,
        });
        if self.cli.verify {
            let oracle = OracleEvaluator::new(&state)?;
            let (mut worst, mut slack) = (0.0_f64, 0.0_f64);
            for ((_, m), v) in targets.iter().zip(&values) {
                if let Some(m) = m {
                    let (o, budget) = oracle.monomial(m)?;
                    worst = worst.max((o - v).norm());
                    slack = slack.max(budget);
                }
            }
            let allowed = self.tol() + slack;
            self.report.residual("oracle_discrepancy", worst, allowed);
            self.mismatch |= worst > allowed;
        }
        Ok(())
    }

    fn equiv(&mut self, a: &str, b: &str) -> Result<()> {
        let (p, q) = (load_state(a)?, load_state(b)?);
        let verdict = equivalent(&p, &q, self.tol())?;
        self.report
            .verdict("equivalence", equivalence_name(verdict), self.tol());
        for (name, s) in [("canonical_a", &p), ("canonical_b", &q)] {
            if let Ok(c) = canonicalize(s) {
                self.report.state(name, &invariant_state(&c));
            }
        }
        if self.cli.verify {
            if let (GpState::Finite(x), GpState::Finite(y)) = (&p, &q) {
                let by_product = equivalent_by_product_order(x, y, self.tol())?;
                self.report.verdict(
                    "equivalence_product_order",
                    equivalence_name(by_product),
                    self.tol(),
                );
                self.mismatch |= by_product.is_equivalent() != verdict.is_equivalent();
            }
            let (agree, worst, witness) = states_agree(&p, &q, self.cli.max_len, self.tol())?;
            let ea = StateEvaluator::new(&p, self.tol() / 10.0)?;
            let eb = StateEvaluator::new(&q, self.tol() / 10.0)?;
            self.report.tables.push(Table {
                name: "witness".into(),
                tolerance: self.tol(),
                entries: vec![
                    entry(format!("a: {witness}"), ea.monomial(&witness)?),
                    entry(format!("b: {witness}"), eb.monomial(&witness)?),
                ],
            });
            self.report.residual("states_agree", worst, self.tol());
            if verdict.is_equivalent() && !agree {
                self.mismatch = true;
            }
            if !verdict.is_equivalent() && agree {
                self.report.notes.push(format!(
                    "states agree on all monomials with |J| + |K| <= {}; they differ at greater length",
                    self.cli.max_len
                ));
            }
        }
        Ok(())
    }

    fn canon(&mut self, spec: &str) -> Result<()> {
        let state = load_state(spec)?;
        let c = canonicalize(&state)?;
        let kind = match &c {
            CanonicalInvariant::Interior(_) => "INTERIOR",
            CanonicalInvariant::Boundary { .. } => "BOUNDARY",
        };
        self.report
            .verdict("invariant", kind, f64::tolerances().boundary);
        let inv = invariant_state(&c);
        self.report.state("canonical", &inv);
        if self.cli.verify {
            let (agree, worst, _) = states_agree(&state, &inv, self.cli.max_len, self.tol())?;
            self.report.residual("states_agree", worst, self.tol());
            self.mismatch |= !agree;
        }
        Ok(())
    }

    fn lift(&mut self, spec: &str, order: usize) -> Result<()> {
        let state = load_state(spec)?;
        let p = match &state {
            GpState::Finite(p) => p.clone(),
            GpState::Cuntz(y) => y.to_finite(),
            GpState::Infinite(_) => {
                return Err(Error::Usage("lift needs a finite-order state".into()))
            }
        };
        let lifted = GpState::Finite(lift_order(&p, order)?);
        self.report.state("lifted", &lifted);
        if self.cli.verify {
            let (agree, worst, _) = states_agree(&state, &lifted, self.cli.max_len, self.tol())?;
            self.report.residual("states_agree", worst, self.tol());
            self.mismatch |= !agree;
        }
        Ok(())
    }

    fn gauge(&mut self, spec: &str, unitary: &str) -> Result<()> {
        let state = load_state(spec)?;
        let g = parse_unitary(&read_arg(unitary, '[')?)?;
        let moved = crate::params::gauge_transform_param(&g, &state)?;
        self.report.state("transformed", &moved);
        if self.cli.verify {
            let mut worst = 0.0_f64;
            for m in monomials_up_to(state.n(), self.cli.max_len) {
                worst = worst.max(covariance_check(&state, &g, &m, self.tol() / 10.0)?);
            }
            self.report.residual("covariance", worst, self.tol());
            self.mismatch |= worst > self.tol();
        }
        Ok(())
    }

    fn gram(&mut self, spec: &str) -> Result<()> {
        let state = load_state(spec)?;
        let p = finite_form(&state).ok_or_else(|| {
            Error::Usage("gram needs a finite-order, Cuntz or geometric state".into())
        })?;
        if p.k() > 1 && p.region()? == Region::Boundary {
            return Err(Error::Boundary);
        }
        let t = moment_table(&p)?;
        self.report.tables.push(Table {
            name: "theta".into(),
            tolerance: f64::tolerances().closed_form,
            entries: table_entries(&t),
        });
        self.report.tables.push(Table {
            name: "spectrum".into(),
            tolerance: f64::tolerances().closed_form,
            entries: t
                .spectrum()
                .into_iter()
                .enumerate()
                .map(|(i, x)| entry(format!("λ{i}"), Complex64::new(x, 0.0)))
                .collect(),
        });
        self.report.verdict(
            "correlation_dimension",
            t.rank().to_string(),
            RANK_THRESHOLD,
        );
        if self.cli.verify {
            let d = table_discrepancy(&t, &oracle_table(&p)?);
            self.report.residual("oracle_discrepancy", d, self.tol());
            self.mismatch |= d > self.tol();
        }
        Ok(())
    }

    fn factorize(&mut self, n: usize, order: &str, word: &str) -> Result<()> {
        let embedding = GpEmbedding::new(n, parse_order(order)?)?;
        let m = parse_product(word)?
            .filter(|m| m.right.is_empty())
            .ok_or_else(|| Error::Usage(format!("{word:?} is not a word s_J")))?;
        let Factorization { hat, tail } = embedding.factorize(&m.left)?;
        self.report.verdict("hat", format_hat(&hat), 0.0);
        self.report.verdict("tail_power", tail.to_string(), 0.0);
        if self.cli.verify {
            let back = embedding.reassemble(&Factorization { hat, tail })?;
            let ok = back == m.left;
            self.report
                .residual("reassemble", if ok { 0.0 } else { 1.0 }, 0.0);
            self.mismatch |= !ok;
        }
        Ok(())
    }
}

fn format_hat(hat: &MultiIndex) -> String {
    let letters: Vec<String> = hat.letters().iter().map(usize::to_string).collect();
    format!("({})", letters.join(","))
}

/// Runs one invocation; `args` includes the program name.
pub fn run<I, S>(args: I) -> Outcome
where
    I: IntoIterator<Item = S>,
    S: Into<String>,
{
    let args: Vec<String> = args.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            return if code == EXIT_OK {
                Outcome {
                    stdout: text,
                    stderr: String::new(),
                    code,
                }
            } else {
                Outcome {
                    stdout: String::new(),
                    stderr: text,
                    code,
                }
            };
        }
    };
    let mut ctx = Ctx {
        report: Report::new(args.clone(), &cli),
        cli: &cli,
        mismatch: false,
    };
    let result = match &cli.command {
        Command::Classify { spec } => ctx.classify(spec),
        Command::Eval { spec, words } => ctx.eval(spec, words),
        Command::Equiv { a, b } => ctx.equiv(a, b),
        Command::Canon { spec } => ctx.canon(spec),
        Command::Lift { spec, order } => ctx.lift(spec, *order),
        Command::Gauge { spec, unitary } => ctx.gauge(spec, unitary),
        Command::Gram { spec } => ctx.gram(spec),
        Command::Factorize { n, order, word } => ctx.factorize(*n, order, word),
    };
    match result {
        Ok(()) => {
            let (code, stderr) = if ctx.mismatch {
                (EXIT_ORACLE_MISMATCH, "error: oracle mismatch\n".to_string())
            } else {
                (EXIT_OK, String::new())
            };
            Outcome {
                stdout: ctx.report.render(cli.format),
                stderr,
                code,
            }
        }
        Err(e) => Outcome {
            stdout: String::new(),
            stderr: format!("error: {e}\n"),
            code: exit_code(&e),
        },
    }
}
