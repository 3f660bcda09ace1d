//! Command-line front end behind the `qspace3` binary.
//!
//! Every verb builds a [`Report`]: a summary map, an optional table and a
//! pass flag. Reports render as JSON (with `"schema": "qspace3/1"`), CSV
//! (17 significant digits) or aligned text, and contain nothing that varies
//! between runs with the same configuration.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use crate::basistrans::{
    build_transform, completeness_check, completeness_pairs, format_sig17, CompletenessForm, Direction, TransformSpec,
    TransformTable, SCHEMA,
};
use crate::error::{Error, Result};
use crate::qarith::QContext;
use crate::qspecial::{low_degree_closed_form, orthonormality_matrix, p_lm_mp, p_tilde_mp, QPoint};
use crate::repspace::spectrum::{t2_spectrum, x3_l_spectrum, SpectrumReport};
use crate::repspace::{
    build_joint, build_k_orbital, build_l_basis, build_t_orb, build_t_special, build_x_over_r, commutator_scale, r0_from_z0,
    verify_relations, window_1d, window_tk, RelationSet, RepFamily,
};

/// Exit code for a completed run whose checks failed.
pub const EXIT_VERIFICATION_FAILED: i32 = 2;

/// Interior margin of the default relation windows.
const VERIFY_MARGIN: i64 = 3;
/// Levels below the top of the `T²` block that are not checked.
const T2_UNCHECKED_TOP: i64 = 10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Parser, Debug)]
#[command(name = "qspace3", version, about = "q-deformed three-space numerics")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct GlobalArgs {
    /// Deformation parameter, q > 1.
    #[arg(long, global = true, default_value_t = 1.5)]
    pub q: f64,
    /// Pass/fail tolerance; each verb has its own default.
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    /// Lattice depth below the top state.
    #[arg(long, global = true, default_value_t = 60)]
    pub depth: i64,
    /// Largest angular momentum.
    #[arg(long, global = true, default_value_t = 40)]
    pub lmax: i64,
    /// Width of the K direction.
    #[arg(long = "kwidth", global = true, default_value_t = 60)]
    pub k_width: i64,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Tabulate P and P~.
    Poly {
        #[arg(long)]
        l: i64,
        #[arg(long)]
        m: i64,
        /// Comma-separated arguments.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        x: Vec<f64>,
        /// Use the lattice points ±q^{2(n-m-1)}, 0 >= n >= -depth.
        #[arg(long)]
        lattice: bool,
        /// Compare with the closed forms (l <= 3, m <= 1).
        #[arg(long)]
        golden: bool,
    },
    /// Check the operator relations on truncated representations.
    Verify {
        /// all, x, radius, t, k, torb, module, tau, conj, orbital-constraint, t-constraints.
        #[arg(long, default_value = "all")]
        relations: String,
    },
    /// Eigenvalue tables.
    Spectrum {
        #[arg(long, value_parser = ["x3", "r2", "t3", "t2"])]
        observable: String,
        /// joint (|M, nu, m>) or l (|M, l, m>); t2 always uses the tensor basis.
        #[arg(long, default_value = "joint", value_parser = ["joint", "l"])]
        basis: String,
        #[arg(long = "M", default_value_t = 0, allow_hyphen_values = true)]
        big_m: i64,
        #[arg(long, default_value_t = 1.0)]
        z0: f64,
        #[arg(long, default_value_t = 0, allow_hyphen_values = true)]
        m: i64,
        #[arg(long, default_value_t = 1, allow_hyphen_values = true)]
        sigma: i32,
    },
    /// Basis-change coefficient tables.
    Transform {
        /// 1 (tensor to |l, m>) or 2 (|l, m> to X3 eigenstates).
        #[arg(long)]
        direction: String,
        #[arg(long, default_value_t = 0, allow_hyphen_values = true)]
        m: i64,
        #[arg(long = "M", default_value_t = 0, allow_hyphen_values = true)]
        big_m: i64,
        #[arg(long, default_value_t = 1.0)]
        r0: f64,
        /// X3 levels per sign (direction 2).
        #[arg(long, default_value_t = 20)]
        levels: i64,
    },
    /// Orthonormality of P~ on the lattice.
    Ortho {
        #[arg(long, default_value_t = 0)]
        m: i64,
    },
    /// Completeness of the coefficient families.
    Complete {
        #[arg(long, default_value = "both", value_parser = ["tensor", "x3", "both"])]
        form: String,
        #[arg(long, default_value_t = 0, allow_hyphen_values = true)]
        m: i64,
        /// Labels per sign entering the sampled pairs.
        #[arg(long, default_value_t = 4)]
        levels: i64,
    },
}

/// Validated settings shared by all verbs.
#[derive(Clone, Debug)]
pub struct RunConfig {
    pub ctx: QContext,
    pub tol: Option<f64>,
    pub n_depth: i64,
    pub l_max: i64,
    pub k_width: i64,
    pub format: Format,
    pub out: Option<PathBuf>,
}

impl RunConfig {
    /// Reads the precision from `QSPACE3_PRECISION`.
    pub fn from_args(g: &GlobalArgs) -> Result<RunConfig> {
        let ctx = QContext::from_env(g.q)?;
        if let Some(t) = g.tol {
            if !(t > 0.0 && t.is_finite()) {
                return Err(Error::Config(format!("tol must be positive, got {t}")));
            }
        }
        if g.depth < 1 || g.lmax < 0 || g.k_width < 1 {
            return Err(Error::Config(format!(
                "need depth >= 1, lmax >= 0, kwidth >= 1, got {}, {}, {}",
                g.depth, g.lmax, g.k_width
            )));
        }
        Ok(RunConfig {
            ctx,
            tol: g.tol,
            n_depth: g.depth,
            l_max: g.lmax,
            k_width: g.k_width,
            format: g.format,
            out: g.out.clone(),
        })
    }

    fn tol_or(&self, default: f64) -> f64 {
        self.tol.unwrap_or(default)
    }

    fn describe(&self, tol: f64) -> Value {
        json!({
            "q": self.ctx.q(),
            "tol": tol,
            "n_depth": self.n_depth,
            "l_max": self.l_max,
            "k_width": self.k_width,
            "precision": format!("{:?}", self.ctx.precision()).to_lowercase(),
        })
    }
}

/// A table cell.
#[derive(Clone, Debug, PartialEq)]
pub enum Cell {
    Int(i64),
    Num(f64),
    Text(String),
    Bool(bool),
    Empty,
}

impl Cell {
    fn json(&self) -> Value {
        match self {
            Cell::Int(i) => json!(i),
            Cell::Num(x) if x.is_finite() => json!(x),
            Cell::Num(_) | Cell::Empty => Value::Null,
            Cell::Text(s) => json!(s),
            Cell::Bool(b) => json!(b),
        }
    }

    fn csv(&self) -> String {
        match self {
            Cell::Int(i) => i.to_string(),
            Cell::Num(x) => format_sig17(*x),
            Cell::Text(s) => s.clone(),
            Cell::Bool(b) => b.to_string(),
            Cell::Empty => String::new(),
        }
    }

    fn text(&self) -> String {
        match self {
            Cell::Num(x) => format!("{x:.12e}"),
            Cell::Empty => "-".into(),
            other => other.csv(),
        }
    }
}

impl From<i64> for Cell {
    fn from(v: i64) -> Cell {
        Cell::Int(v)
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Cell {
        Cell::Num(v)
    }
}

impl From<bool> for Cell {
    fn from(v: bool) -> Cell {
        Cell::Bool(v)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Cell {
        Cell::Text(v.into())
    }
}

impl From<Option<f64>> for Cell {
    fn from(v: Option<f64>) -> Cell {
        v.map_or(Cell::Empty, Cell::Num)
    }
}

/// Output of one verb.
#[derive(Clone, Debug)]
pub struct Report {
    pub command: String,
    pub config: Value,
    pub summary: BTreeMap<String, Value>,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
    pub pass: bool,
}

impl Report {
    fn new(command: &str, config: Value) -> Report {
        Report { command: command.into(), config, summary: BTreeMap::new(), columns: Vec::new(), rows: Vec::new(), pass: true }
    }

    fn columns(&mut self, cols: &[&str]) {
        self.columns = cols.iter().map(|s| s.to_string()).collect();
    }

    fn note(&mut self, key: &str, v: impl Into<Value>) {
        self.summary.insert(key.into(), v.into());
    }

    pub fn to_json(&self) -> Value {
        let rows: Vec<Value> = self.rows.iter().map(|r| Value::Array(r.iter().map(Cell::json).collect())).collect();
        json!({
            "schema": SCHEMA,
            "command": self.command,
            "config": self.config,
            "pass": self.pass,
            "summary": self.summary,
            "columns": self.columns,
            "rows": rows,
        })
    }

    /// The table only; the summary goes to stderr in CSV mode.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let io = |e: csv::Error| Error::Io(e.to_string());
        w.write_record(&self.columns).map_err(io)?;
        for r in &self.rows {
            w.write_record(r.iter().map(Cell::csv)).map_err(io)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn write_text<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "{}: {}", self.command, if self.pass { "PASS" } else { "FAIL" })?;
        for (k, v) in &self.summary {
            writeln!(out, "  {k}: {v}")?;
        }
        if self.columns.is_empty() {
            return Ok(());
        }
        let cells: Vec<Vec<String>> = self.rows.iter().map(|r| r.iter().map(Cell::text).collect()).collect();
        let widths: Vec<usize> = (0..self.columns.len())
            .map(|c| cells.iter().map(|r| r[c].len()).chain([self.columns[c].len()]).max().unwrap_or(0))
            .collect();
        let line = |row: &[String]| row.iter().zip(&widths).map(|(s, w)| format!("{s:>w$}")).collect::<Vec<_>>().join("  ");
        writeln!(out, "{}", line(&self.columns))?;
        for r in &cells {
            writeln!(out, "{}", line(r))?;
        }
        Ok(())
    }

    /// Renders in `format` to `out` or stdout.
    pub fn emit(&self, format: Format, out: Option<&PathBuf>) -> Result<()> {
        let mut buf = Vec::new();
        match format {
            Format::Json => {
                serde_json::to_writer_pretty(&mut buf, &self.to_json()).map_err(|e| Error::Io(e.to_string()))?;
                buf.push(b'\n');
            }
            Format::Csv => {
                self.write_csv(&mut buf)?;
                let mut err = std::io::stderr().lock();
                writeln!(err, "{}: {}", self.command, if self.pass { "PASS" } else { "FAIL" })?;
                for (k, v) in &self.summary {
                    writeln!(err, "  {k}: {v}")?;
                }
            }
            Format::Text => self.write_text(&mut buf)?,
        }
        match out {
            Some(p) => std::fs::write(p, buf)?,
            None => std::io::stdout().lock().write_all(&buf)?,
        }
        Ok(())
    }
}

/// `P` and `P̃` at explicit or lattice arguments.
pub fn cmd_poly(l: i64, m: i64, xs: &[f64], lattice: bool, golden: bool, cfg: &RunConfig) -> Result<Report> {
    let tol = cfg.tol_or(1e-12);
    let ctx = &cfg.ctx;
    let mut rep = Report::new("poly", cfg.describe(tol));
    rep.note("l", l);
    rep.note("m", m);
    if golden && low_degree_closed_form(l, m, 0.0, ctx).is_none() {
        return Err(Error::Config(format!("no closed form for l = {l}, m = {m}; --golden needs l <= 3, m <= 1")));
    }
    let mut points: Vec<(Option<(i64, i32)>, QPoint)> = xs.iter().map(|&x| (None, QPoint::from(x))).collect();
    if lattice {
        for n in (-cfg.n_depth..=0).rev() {
            for s in [1, -1] {
                points.push((Some((n, s)), QPoint::lattice(n, m, s)));
            }
        }
    }
    if points.is_empty() {
        return Err(Error::Config("poly needs --x or --lattice".into()));
    }
    if points.iter().any(|(_, p)| !p.coeff.is_finite()) {
        return Err(Error::Domain("non-finite argument".into()));
    }
    let bits = ctx.precision().target_bits();
    let q = ctx.q();
    let mut cols = vec!["n", "sigma", "x", "P", "P_tilde"];
    if golden {
        cols.extend(["closed_form", "rel_err"]);
    }
    rep.columns(&cols);
    let mut worst: f64 = 0.0;
    for (lab, pt) in points {
        let x = pt.to_f64(q);
        let p = p_lm_mp(l, m, pt, q, bits)?.to_f64();
        let pt_val = match p_tilde_mp(l, m, pt, q, bits) {
            Ok(v) => Some(v.to_f64()),
            Err(Error::Domain(_)) => None,
            Err(e) => return Err(e),
        };
        let mut row: Vec<Cell> = match lab {
            Some((n, s)) => vec![n.into(), Cell::Int(s.into())],
            None => vec![Cell::Empty, Cell::Empty],
        };
        row.extend([x.into(), p.into(), pt_val.into()]);
        if golden {
            let cf = low_degree_closed_form(l, m, x, ctx).expect("checked above");
            let err = (p - cf).abs() / cf.abs().max(f64::MIN_POSITIVE);
            let err = if p == cf { 0.0 } else { err };
            worst = worst.max(err);
            row.extend([cf.into(), err.into()]);
        }
        rep.rows.push(row);
    }
    if golden {
        rep.note("max_rel_err", worst);
        rep.pass = worst < tol;
    }
    Ok(rep)
}

/// The families the relation suite runs on.
pub fn default_families(cfg: &RunConfig) -> Result<Vec<RepFamily>> {
    let ctx = &cfg.ctx;
    let w_tk = window_tk(cfg.n_depth, cfg.k_width, VERIFY_MARGIN)?;
    let w_t = window_1d("m_t", -cfg.n_depth, 0, VERIFY_MARGIN)?;
    let w_k = window_1d("m_k", 0, cfg.k_width, VERIFY_MARGIN)?;
    Ok(vec![
        build_t_orb(&w_tk, ctx)?,
        build_joint(0, 1.0, 1, &w_tk, ctx)?,
        build_l_basis(0, r0_from_z0(1.0, ctx), cfg.l_max, VERIFY_MARGIN, ctx)?,
        build_t_special(&w_t, ctx)?.merge(&build_x_over_r(1, &w_t, ctx)?)?,
        build_k_orbital(&w_k, ctx)?,
    ])
}

/// Relation suite on [`default_families`].
pub fn cmd_verify(relations: &str, cfg: &RunConfig) -> Result<Report> {
    let tol = cfg.tol_or(1e-10);
    let set = RelationSet::parse(relations)?;
    let fams = default_families(cfg)?;
    let refs: Vec<&RepFamily> = fams.iter().collect();
    let vr = verify_relations(&refs, set, tol)?;
    let mut rep = Report::new("verify", cfg.describe(tol));
    rep.note("relations", relations);
    rep.note("max_residual", vr.max_residual);
    rep.note("relations_checked", vr.results.len());
    let lam = cfg.ctx.lambda();
    let scale = commutator_scale(&fams[1])?;
    rep.note("lambda", lam);
    rep.note("commutator_scale", scale);
    rep.note("commutator_scale_over_lambda", scale / lam);
    rep.columns(&["family", "relation", "max_residual", "entries", "pass"]);
    for r in &vr.results {
        let fam = serde_json::to_value(r.family).ok().and_then(|v| v.as_str().map(String::from)).unwrap_or_default();
        rep.rows.push(vec![
            Cell::Text(fam),
            Cell::Text(r.relation.clone()),
            r.max_residual.into(),
            Cell::Int(r.entries_checked as i64),
            r.pass.into(),
        ]);
    }
    rep.pass = vr.pass;
    Ok(rep)
}

/// `T³_orb` eigenvalue `(1 − q^{−4m})/λ`.
fn t3_exact(q: f64, m: i64, ctx: &QContext) -> f64 {
    -(-4.0 * m as f64 * q.ln()).exp_m1() / ctx.lambda()
}

fn spectrum_rows(rep: &mut Report, s: &SpectrumReport, with_sigma: bool) {
    if with_sigma {
        rep.columns(&["nu", "sigma", "computed", "exact", "rel_err", "checked"]);
    } else {
        rep.columns(&["l", "computed", "exact", "rel_err", "checked"]);
    }
    for lv in &s.levels {
        let mut row = vec![Cell::Int(lv.label)];
        if with_sigma {
            row.push(Cell::Int(lv.sigma.into()));
        }
        row.extend([lv.computed.into(), lv.exact.into(), lv.rel_err.into(), lv.checked.into()]);
        rep.rows.push(row);
    }
    rep.note("checked_levels", s.checked_levels);
    rep.note("max_rel_err", s.max_rel_err);
}

/// Eigenvalue tables for `X³`, `R²`, `T³` or `T²`.
pub fn cmd_spectrum(observable: &str, basis: &str, big_m: i64, z0: f64, m: i64, sigma: i32, cfg: &RunConfig) -> Result<Report> {
    let ctx = &cfg.ctx;
    let q = ctx.q();
    let tol = cfg.tol_or(if observable == "t2" || basis == "l" { 1e-6 } else { 1e-10 });
    let mut rep = Report::new("spectrum", cfg.describe(tol));
    rep.note("observable", observable);
    if observable == "t2" {
        rep.note("basis", "tensor");
        rep.note("m", m);
        let check = cfg.l_max - T2_UNCHECKED_TOP;
        let s = t2_spectrum(m, cfg.n_depth, cfg.l_max, check, ctx)?;
        spectrum_rows(&mut rep, &s, false);
        rep.pass = s.passes(tol);
        return Ok(rep);
    }
    rep.note("basis", basis);
    rep.note("M", big_m);
    if basis == "l" {
        let r0 = r0_from_z0(z0, ctx);
        rep.note("r0", r0);
        if observable == "x3" {
            rep.note("m", m);
            let s = x3_l_spectrum(big_m, r0, m, cfg.l_max, ctx)?;
            spectrum_rows(&mut rep, &s, true);
            rep.pass = s.passes(tol);
            return Ok(rep);
        }
        let fam = build_l_basis(big_m, r0, cfg.l_max, 0, ctx)?;
        let key = if observable == "r2" { "R2" } else { "T3" };
        let d = fam.op(key)?.diagonal();
        rep.columns(&["l", "m", "eigenvalue", "exact", "rel_err"]);
        let mut worst: f64 = 0.0;
        for (i, lab) in fam.basis.labels().iter().enumerate() {
            let exact = if observable == "r2" { r0 * r0 * q.powi(4 * big_m as i32) } else { t3_exact(q, lab[1], ctx) };
            let err = (d[i] - exact).abs() / exact.abs().max(f64::MIN_POSITIVE);
            let err = if d[i] == exact { 0.0 } else { err };
            worst = worst.max(err);
            rep.rows.push(vec![lab[0].into(), lab[1].into(), d[i].into(), exact.into(), err.into()]);
        }
        rep.note("max_rel_err", worst);
        rep.pass = worst < tol;
        return Ok(rep);
    }
    let w = window_tk(cfg.n_depth, 2, 2)?;
    let fam = build_joint(big_m, z0, sigma, &w, ctx)?;
    rep.note("z0", z0);
    rep.note("sigma", sigma);
    let key = match observable {
        "x3" => "X3",
        "r2" => "R2",
        _ => "T3",
    };
    let d = fam.op(key)?.diagonal();
    let z = if sigma < 0 { -z0.abs() } else { z0.abs() };
    rep.columns(&["nu", "m", "eigenvalue", "exact", "rel_err"]);
    let mut worst: f64 = 0.0;
    for (i, lab) in fam.basis.labels().iter().enumerate().filter(|(_, l)| l[1] == 0) {
        let nu = lab[0] + big_m;
        let mm = lab[0] + lab[1];
        let exact = match observable {
            "x3" => z * q.powi(2 * nu as i32),
            "r2" => q.powi(4 * big_m as i32 + 2) * z0 * z0,
            _ => t3_exact(q, mm, ctx),
        };
        let err = if d[i] == exact { 0.0 } else { (d[i] - exact).abs() / exact.abs().max(f64::MIN_POSITIVE) };
        worst = worst.max(err);
        rep.rows.push(vec![nu.into(), mm.into(), d[i].into(), exact.into(), err.into()]);
    }
    rep.note("max_rel_err", worst);
    rep.pass = worst < tol;
    Ok(rep)
}

/// Builds a transform table. In CSV mode the table itself is the body.
pub fn cmd_transform(
    direction: &str,
    m: i64,
    big_m: i64,
    r0: f64,
    levels: i64,
    cfg: &RunConfig,
) -> Result<(Report, TransformTable)> {
    let tol = cfg.tol_or(1e-6);
    let direction = Direction::parse(direction)?;
    let spec = TransformSpec {
        direction,
        m,
        big_m,
        r0,
        l_max: cfg.l_max,
        depth: if direction == Direction::MtkToLm { cfg.n_depth } else { levels },
    };
    let table = build_transform(&spec, &cfg.ctx)?;
    let mut rep = Report::new("transform", cfg.describe(tol));
    rep.note("direction", serde_json::to_value(direction).unwrap_or(Value::Null));
    rep.note("m", m);
    rep.note("isometry_defect", table.isometry_defect);
    rep.note("single_sigma_defect", table.single_sigma_defect);
    rep.note("eigen_defect", table.eigen_defect);
    rep.note("interior_columns", table.interior_cols.iter().filter(|&&b| b).count());
    rep.pass = table.isometry_defect < tol && table.eigen_defect < tol && table.interior_cols.iter().any(|&b| b);
    Ok((rep, table))
}

/// Orthonormality matrix for `m ≤ l, l′ ≤ l_max`, truncated at `n ≥ −depth`.
pub fn cmd_ortho(m: i64, cfg: &RunConfig) -> Result<Report> {
    let tol = cfg.tol_or(1e-8);
    let mat = orthonormality_matrix(cfg.l_max, m, &cfg.ctx, -cfg.n_depth)?;
    let mut rep = Report::new("ortho", cfg.describe(tol));
    rep.note("m", m);
    rep.columns(&["l", "lp", "sum", "defect"]);
    let mut worst: f64 = 0.0;
    for (i, row) in mat.iter().enumerate() {
        for (j, &s) in row.iter().enumerate().skip(i) {
            let defect = (s - if i == j { 1.0 } else { 0.0 }).abs();
            worst = worst.max(defect);
            rep.rows.push(vec![(m + i as i64).into(), (m + j as i64).into(), s.into(), defect.into()]);
        }
    }
    rep.note("max_defect", worst);
    rep.pass = worst < tol;
    Ok(rep)
}

/// Completeness at `l_max` plus the defect at `l_max/4` and `l_max/2`.
pub fn cmd_complete(form: &str, m: i64, levels: i64, cfg: &RunConfig) -> Result<Report> {
    let tol = cfg.tol_or(1e-5);
    let forms: Vec<CompletenessForm> = match form {
        "tensor" => vec![CompletenessForm::Tensor],
        "x3" => vec![CompletenessForm::X3],
        _ => vec![CompletenessForm::Tensor, CompletenessForm::X3],
    };
    if levels < 1 {
        return Err(Error::Config(format!("levels must be >= 1, got {levels}")));
    }
    let mut rep = Report::new("complete", cfg.describe(tol));
    rep.note("m", m);
    rep.columns(&["form", "a_label", "a_sigma", "b_label", "b_sigma", "sum", "expected", "defect"]);
    let mut pass = true;
    for f in forms {
        let pairs = completeness_pairs(f, m, levels);
        let steps: Vec<i64> = [cfg.l_max / 4, cfg.l_max / 2, cfg.l_max].into_iter().filter(|&l| l >= m.abs()).collect();
        let mut history = Vec::new();
        let mut last = None;
        for &l in &steps {
            let r = completeness_check(f, m, &pairs, l, &cfg.ctx)?;
            history.push(json!({"l_max": l, "max_defect": r.max_defect}));
            last = Some(r);
        }
        let r = last.ok_or_else(|| Error::Coverage(format!("l_max = {} is below |m| = {}", cfg.l_max, m.abs())))?;
        let defects: Vec<f64> = history.iter().map(|h| h["max_defect"].as_f64().unwrap_or(f64::NAN)).collect();
        let monotone = defects.windows(2).all(|w| w[1] <= w[0]);
        rep.note(&format!("{}_defect_history", r.form), Value::Array(history));
        rep.note(&format!("{}_monotone", r.form), monotone);
        rep.note(&format!("{}_max_defect", r.form), r.max_defect);
        rep.note(&format!("{}_pairs", r.form), pairs.len());
        pass &= monotone && r.max_defect < tol;
        for s in &r.samples {
            rep.rows.push(vec![
                Cell::Text(r.form.clone()),
                s.a.0.into(),
                Cell::Int(s.a.1.into()),
                s.b.0.into(),
                Cell::Int(s.b.1.into()),
                s.sum.into(),
                s.expected.into(),
                s.defect.into(),
            ]);
        }
    }
    rep.pass = pass;
    Ok(rep)
}

fn dispatch(cli: &Cli) -> Result<bool> {
    let cfg = RunConfig::from_args(&cli.global)?;
    if let Some(w) = cfg.ctx.conditioning_warning() {
        eprintln!("warning: {w}");
    }
    let rep = match &cli.command {
        Command::Poly { l, m, x, lattice, golden } => cmd_poly(*l, *m, x, *lattice, *golden, &cfg)?,
        Command::Verify { relations } => cmd_verify(relations, &cfg)?,
        Command::Spectrum { observable, basis, big_m, z0, m, sigma } => {
            cmd_spectrum(observable, basis, *big_m, *z0, *m, *sigma, &cfg)?
        }
        Command::Transform { direction, m, big_m, r0, levels } => {
            let (rep, table) = cmd_transform(direction, *m, *big_m, *r0, *levels, &cfg)?;
            match cfg.format {
                Format::Csv => {
                    let mut buf = Vec::new();
                    table.write_csv(&mut buf)?;
                    match &cfg.out {
                        Some(p) => std::fs::write(p, buf)?,
                        None => std::io::stdout().lock().write_all(&buf)?,
                    }
                    let mut err = std::io::stderr().lock();
                    for (k, v) in &rep.summary {
                        writeln!(err, "  {k}: {v}")?;
                    }
                    return Ok(rep.pass);
                }
                Format::Json => {
                    let mut v = table.to_json();
                    v["pass"] = json!(rep.pass);
                    v["config"] = rep.config.clone();
                    let mut buf = serde_json::to_vec_pretty(&v).map_err(|e| Error::Io(e.to_string()))?;
                    buf.push(b'\n');
                    match &cfg.out {
                        Some(p) => std::fs::write(p, buf)?,
                        None => std::io::stdout().lock().write_all(&buf)?,
                    }
                    return Ok(rep.pass);
                }
                Format::Text => rep,
            }
        }
        Command::Ortho { m } => cmd_ortho(*m, &cfg)?,
        Command::Complete { form, m, levels } => cmd_complete(form, *m, *levels, &cfg)?,
    };
    rep.emit(cfg.format, cfg.out.as_ref())?;
    Ok(rep.pass)
}

/// Parses `args` (program name first), runs the verb and returns the exit
/// code: 0 pass, 2 failed checks, 3 domain or configuration error, 4
/// precision error.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 3 } else { 0 };
        }
    };
    match dispatch(&cli) {
        Ok(true) => 0,
        Ok(false) => EXIT_VERIFICATION_FAILED,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
