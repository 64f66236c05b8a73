//! The JSON document and the plain-text tables.

use std::fmt::Write;

use hgs_core::convergence::{MethodReport, Status};
use hgs_core::linalg::IterationMethod;
use hgs_core::precondition::{MethodBound, PreconditionReport, Preconditioner, PreconditionerParams, Strategy};
use hgs_core::ray::RayAngle;
use hgs_core::solver::{SolveResult, SolveStatus};
use hgs_core::taxonomy::{DominanceTag, HClass, MTag};
use hgs_core::{Classification, Complex64, IndexSet};
use serde::Serialize;

#[derive(Debug, Serialize)]
pub struct Report {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: &'static str,
    pub results: Vec<Entry>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timing_ms: Option<f64>,
}

#[derive(Debug, Serialize)]
pub struct Input {
    pub source: String,
    pub order: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub drop_tol: Option<f64>,
}

#[derive(Debug, Serialize)]
pub struct Entry {
    pub input: Input,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub classification: Option<Classification>,
    /// Frobenius blocks as 0-based index lists.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fnf_blocks: Option<Vec<IndexSet>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub methods: Option<Vec<MethodReport>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub preconditioner: Option<PreconditionOut>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub solve: Option<SolveOut>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub output: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub matrix_market: Option<String>,
}

impl Entry {
    pub fn new(input: Input) -> Self {
        Entry {
            input,
            classification: None,
            fnf_blocks: None,
            methods: None,
            preconditioner: None,
            solve: None,
            output: None,
            matrix_market: None,
        }
    }
}

#[derive(Debug, Serialize)]
pub struct PreconditionOut {
    pub strategy: &'static str,
    pub params: PreconditionerParams,
    pub h_class: HClass,
    pub reference: String,
    pub bounds_hold: bool,
    pub methods: Vec<MethodBound>,
}

impl PreconditionOut {
    pub fn new(strategy: Strategy, p: &Preconditioner, check: PreconditionReport) -> Self {
        PreconditionOut {
            strategy: strategy.label(),
            params: p.params.clone(),
            h_class: check.h_class,
            bounds_hold: check.all_bounds_hold(),
            reference: check.reference,
            methods: check.methods,
        }
    }
}

#[derive(Debug, Serialize)]
pub struct SolveOut {
    pub method: IterationMethod,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub strategy: Option<&'static str>,
    pub status: SolveStatus,
    pub iterations: usize,
    pub maxit: usize,
    pub residual: f64,
    pub last_update: Option<f64>,
    pub x: Vec<Complex64>,
}

impl SolveOut {
    pub fn new(method: IterationMethod, strategy: Option<Strategy>, maxit: usize, r: SolveResult) -> Self {
        SolveOut {
            method,
            strategy: strategy.map(Strategy::label),
            status: r.status,
            iterations: r.iterations,
            maxit,
            residual: r.residual,
            last_update: r.history.last().copied(),
            x: r.x,
        }
    }
}

impl Report {
    pub fn new(command: &'static str, results: Vec<Entry>) -> Self {
        Report { tool: "hgs", version: env!("CARGO_PKG_VERSION"), command, results, timing_ms: None }
    }

    pub fn render(&self) -> String {
        let mut s = String::new();
        match self.command {
            "analyze" if self.results.len() > 1 => render_analysis_grid(&mut s, &self.results),
            _ => {
                for (i, e) in self.results.iter().enumerate() {
                    if i > 0 {
                        s.push('\n');
                    }
                    render_entry(&mut s, e);
                }
            }
        }
        if let Some(t) = self.timing_ms {
            let _ = writeln!(s, "time: {t:.1} ms");
        }
        s
    }
}

fn dominance_label(t: DominanceTag) -> &'static str {
    match t {
        DominanceTag::StrictlyDd => "strictly diagonally dominant",
        DominanceTag::IrreduciblyDd => "irreducibly diagonally dominant",
        DominanceTag::NonstrictDd => "nonstrictly diagonally dominant",
        DominanceTag::DiagonallyEquipotent => "diagonally equipotent",
        DominanceTag::NotDd => "not diagonally dominant",
    }
}

fn m_label(t: MTag) -> &'static str {
    match t {
        MTag::NotZ => "not a Z-matrix",
        MTag::NonsingularM => "nonsingular M-matrix",
        MTag::SingularM => "singular M-matrix",
        MTag::NotM => "not an M-matrix",
    }
}

fn yes(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

fn rho_cell(r: Option<f64>) -> String {
    r.map_or_else(|| "-".to_string(), |r| format!("{r:.4}"))
}

fn numerical(r: Option<f64>) -> &'static str {
    match r {
        Some(r) if hgs_core::convergence::numerically_convergent(r) => "converges",
        Some(_) => "diverges",
        None => "-",
    }
}

fn render_classification(s: &mut String, c: &Classification, blocks: Option<&[IndexSet]>) {
    let _ = writeln!(s, "dominance: {}", dominance_label(c.dominance.tag));
    let _ = writeln!(s, "comparison matrix: {}", m_label(c.comparison.tag));
    let _ = writeln!(s, "H-class: {}", c.h_class.label());
    let _ = writeln!(s, "irreducible: {}", yes(c.irreducible));
    let gd = match (c.gd.exists, c.gd.equipotent) {
        (true, true) => "yes (equipotent)",
        (true, false) => "yes",
        _ => "no",
    };
    let _ = writeln!(s, "generalized dominant: {gd}");
    if let Some(blocks) = blocks {
        let sizes: Vec<String> = blocks.iter().map(|b| b.len().to_string()).collect();
        let _ = writeln!(s, "FNF block sizes: {}", sizes.join(" "));
    }
}

fn render_methods(s: &mut String, methods: &[MethodReport]) {
    let _ = writeln!(s, "{:<7}{:>8}  {:<10}{:<11}{:<7}rule", "method", "rho", "theorem", "numerical", "agree");
    for m in methods {
        let rule: Vec<&str> = m.verdict.rule_chain.iter().map(|r| r.id.as_str()).collect();
        let _ = writeln!(
            s,
            "{:<7}{:>8}  {:<10}{:<11}{:<7}{}",
            m.method.label(),
            rho_cell(m.rho),
            m.verdict.status.to_string(),
            numerical(m.rho),
            yes(m.agree),
            rule.join(" > "),
        );
    }
    for m in methods {
        if let Some(w) = &m.verdict.witness {
            if w.block.len() <= 12 {
                let _ = write!(s, "{} diverging block {}", m.method.label(), w.block);
            } else {
                let _ = write!(s, "{} diverging block of {} indices", m.method.label(), w.block.len());
            }
            if let Some(f) = w.ray_family {
                let _ = write!(s, ", {f} ray");
            }
            match w.ray_angle {
                Some(RayAngle::Fixed(a)) => {
                    let _ = write!(s, ", angle {a:.6}");
                }
                Some(RayAngle::Free) => s.push_str(", any angle"),
                None => {}
            }
            let _ = writeln!(s, ", rho = {}", w.rho);
        }
        if let Some(d) = m.diagnostic.as_ref().or(m.verdict.diagnostic.as_ref()) {
            let _ = writeln!(s, "{}: {d}", m.method.label());
        }
    }
}

fn render_entry(s: &mut String, e: &Entry) {
    if let Some(text) = &e.matrix_market {
        s.push_str(text);
        return;
    }
    let _ = writeln!(s, "input: {} ({}x{})", e.input.source, e.input.order, e.input.order);
    if let Some(c) = &e.classification {
        render_classification(s, c, e.fnf_blocks.as_deref());
    }
    if let Some(m) = &e.methods {
        s.push('\n');
        render_methods(s, m);
    }
    if let Some(p) = &e.preconditioner {
        render_preconditioner(s, p);
    }
    if let Some(r) = &e.solve {
        render_solve(s, r);
    }
    if let Some(path) = &e.output {
        let _ = writeln!(s, "wrote: {path}");
    }
}

fn render_preconditioner(s: &mut String, p: &PreconditionOut) {
    let params = match &p.params {
        PreconditionerParams::Pivot(k) => format!(" (k = {})", k + 1),
        PreconditionerParams::Alpha(a) => format!(" (alpha = {a})"),
        PreconditionerParams::Weights(_) => String::new(),
    };
    let _ = writeln!(s, "preconditioner: {}{params}", p.strategy);
    let _ = writeln!(s, "preconditioned H-class: {}", p.h_class.label());
    let _ = writeln!(s, "reference: {}", p.reference);
    s.push('\n');
    let _ =
        writeln!(s, "{:<7}{:>9}{:>9}{:>13}{:>11}  bound", "method", "rho(A)", "rho(PA)", "rho(mu(PA))", "reference");
    for m in &p.methods {
        let _ = writeln!(
            s,
            "{:<7}{:>9}{:>9}{:>13}{:>11}  {}",
            m.method.label(),
            rho_cell(m.rho_original),
            rho_cell(m.rho_preconditioned),
            rho_cell(m.rho_comparison),
            rho_cell(m.rho_reference),
            if m.bound_holds { "holds" } else { "fails" },
        );
    }
}

fn render_solve(s: &mut String, r: &SolveOut) {
    let status = match r.status {
        SolveStatus::Converged => "converged",
        SolveStatus::MaxIterations => "iteration limit reached",
        SolveStatus::Diverged => "diverged",
    };
    let _ = write!(s, "method: {}", r.method.label());
    if let Some(st) = r.strategy {
        let _ = write!(s, " preconditioned by {st}");
    }
    s.push('\n');
    let _ = writeln!(s, "status: {status}");
    let _ = writeln!(s, "iterations: {} of {}", r.iterations, r.maxit);
    let _ = writeln!(s, "residual: {:.3e}", r.residual);
    for (i, z) in r.x.iter().enumerate() {
        let _ = writeln!(s, "x[{}] = {} {:+}i", i + 1, z.re, z.im);
    }
}

/// Methods as rows, inputs as columns, each cell `rho verdict`.
fn render_analysis_grid(s: &mut String, entries: &[Entry]) {
    let width = entries.iter().map(|e| e.input.source.len()).max().unwrap_or(0).max(12) + 2;
    let _ = write!(s, "{:<7}", "method");
    for e in entries {
        let _ = write!(s, "{:>width$}", e.input.source);
    }
    s.push('\n');
    let Some(methods) = entries[0].methods.as_ref() else { return };
    for (row, m) in methods.iter().enumerate() {
        let _ = write!(s, "{:<7}", m.method.label());
        for e in entries {
            let r = &e.methods.as_ref().expect("analysis entry")[row];
            let mark = match r.verdict.status {
                Status::Converges => "C",
                Status::Diverges => "D",
                Status::Unknown => "?",
            };
            let flag = if r.agree { "" } else { "!" };
            let _ = write!(s, "{:>width$}", format!("{} {mark}{flag}", rho_cell(r.rho)));
        }
        s.push('\n');
    }
    let _ = write!(s, "{:<7}", "H");
    for e in entries {
        let h = e.classification.as_ref().map_or("-", |c| c.h_class.label());
        let _ = write!(s, "{:>width$}", h);
    }
    s.push('\n');
    let _ = writeln!(s, "C converges, D diverges, ? no theorem applies, ! disagrees with rho");
}
