use serde::Serialize;

use seqaccel::kernel::{partial_sums, Accelerator};
use seqaccel::series_lab::{reference, sums, terms};
use seqaccel::{Estimate, Real};

use crate::config::{Check, Params, Precision, RunConfig, Source};
use crate::registry;
use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Cell {
    pub value: f64,
    pub k: usize,
    pub n: usize,
    pub tainted: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    pub n: usize,
    pub s: f64,
    pub cells: Vec<Option<Cell>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Column {
    pub id: String,
    /// Set when the transformation stopped with an error; later cells are empty.
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResultTable {
    pub series: String,
    pub precision: Precision,
    /// Significant digits used when printing.
    pub digits: usize,
    pub columns: Vec<Column>,
    pub rows: Vec<Row>,
    pub reference: Option<(f64, String)>,
}

/// Feed every configured transformation and collect one row per n.
pub fn run(config: &RunConfig, globals: &Params) -> Result<ResultTable, CliError> {
    match config.precision {
        Precision::Binary64 => run_in::<f64>(config, globals),
        #[cfg(feature = "binary128")]
        Precision::Binary128 => run_in::<seqaccel::Quad>(config, globals),
        #[cfg(not(feature = "binary128"))]
        Precision::Binary128 => Err(CliError::Usage("this build has no binary128 support".into())),
    }
}

fn run_in<R: Real>(config: &RunConfig, globals: &Params) -> Result<ResultTable, CliError> {
    let series = match &config.source {
        Source::Catalog(spec) => Some(spec),
        Source::External { .. } => None,
    };
    let mut accs: Vec<Box<dyn Accelerator<R>>> = config
        .transforms
        .iter()
        .map(|t| registry::build::<R>(t, globals, series))
        .collect::<Result<_, _>>()?;
    let lag = accs.iter().map(|a| a.lag()).max().unwrap_or(0);
    let wanted = config.max_n + 1 + lag;

    // (s_n, Some(a_n)) when the terms are known exactly
    let input: Vec<(R, Option<R>)> = match &config.source {
        Source::Catalog(spec) => {
            let a = terms::<R>(spec, wanted).map_err(|e| CliError::Usage(e.to_string()))?;
            let s = sums::<R>(spec, wanted).map_err(|e| CliError::Usage(e.to_string()))?;
            s.into_iter().zip(a.into_iter().map(Some)).collect()
        }
        Source::External { values, sums: true, .. } => values.iter().take(wanted).map(|&v| (R::lit(v), None)).collect(),
        Source::External { values, sums: false, .. } => {
            let a: Vec<R> = values.iter().take(wanted).map(|&v| R::lit(v)).collect();
            partial_sums(&a).into_iter().zip(a.into_iter().map(Some)).collect()
        }
    };
    let rows_len = input.len().min(config.max_n + 1);

    let mut columns = Vec::with_capacity(accs.len());
    let mut cells: Vec<Vec<Option<Cell>>> = Vec::with_capacity(accs.len());
    for (acc, spec) in accs.iter_mut().zip(&config.transforms) {
        let (col, error) = feed(acc.as_mut(), &input, rows_len);
        columns.push(Column { id: spec.label.clone(), error });
        cells.push(col);
    }
    let rows = (0..rows_len)
        .map(|n| Row { n, s: input[n].0.approx(), cells: cells.iter().map(|c| c[n]).collect() })
        .collect();
    let reference = series.and_then(|spec| reference::<R>(spec).ok()).map(|r| (r.value.approx(), r.provenance.to_string()));
    let label = match &config.source {
        Source::Catalog(spec) => spec.to_string(),
        Source::External { label, .. } => label.clone(),
    };
    Ok(ResultTable { series: label, precision: config.precision, digits: R::TABLE_DIGITS, columns, rows, reference })
}

// The i-th emitted estimate fills row i, so lagged transforms see one more
// sample than the row index.
fn feed<R: Real>(acc: &mut dyn Accelerator<R>, input: &[(R, Option<R>)], rows: usize) -> (Vec<Option<Cell>>, Option<String>) {
    let mut out = Vec::with_capacity(rows);
    for &(s, a) in input {
        if out.len() == rows {
            break;
        }
        let step = match a {
            Some(a) => acc.push_term(s, a),
            None => acc.push(s),
        };
        match step {
            Ok(Some(e)) => out.push(Some(cell(&e))),
            Ok(None) => {}
            Err(e) => {
                out.resize(rows, None);
                return (out, Some(e.to_string()));
            }
        }
    }
    out.resize(rows, None);
    (out, None)
}

fn cell<R: Real>(e: &Estimate<R>) -> Cell {
    Cell { value: e.value.approx(), k: e.k, n: e.n, tainted: !e.valid }
}

/// Format `v` with `digits` significant digits: fixed notation for moderate
/// magnitudes, scientific otherwise.
pub fn format_value(v: f64, digits: usize) -> String {
    if !v.is_finite() {
        return format!("{v}");
    }
    if v == 0.0 {
        return format!("{:.*}", digits - 1, 0.0);
    }
    let mag = v.abs().log10().floor() as i32;
    if (-3..7).contains(&mag) {
        let decimals = (digits as i32 - 1 - mag).max(0) as usize;
        format!("{v:.decimals$}")
    } else {
        format!("{:.*e}", digits - 1, v)
    }
}

fn format_cell(c: &Option<Cell>, digits: usize) -> String {
    match c {
        Some(c) if c.tainted => format!("{}*", format_value(c.value, digits)),
        Some(c) => format_value(c.value, digits),
        None => String::new(),
    }
}

pub fn render_table(t: &ResultTable) -> String {
    let mut head = vec!["n".to_string(), "s_n".to_string()];
    head.extend(t.columns.iter().map(|c| c.id.clone()));
    let body: Vec<Vec<String>> = t
        .rows
        .iter()
        .map(|r| {
            let mut line = vec![r.n.to_string(), format_value(r.s, t.digits)];
            line.extend(r.cells.iter().map(|c| format_cell(c, t.digits)));
            line
        })
        .collect();
    let widths: Vec<usize> = (0..head.len())
        .map(|i| body.iter().map(|l| l[i].len()).chain([head[i].len()]).max().unwrap_or(0))
        .collect();
    let line = |cols: &[String]| {
        let parts: Vec<String> = cols.iter().zip(&widths).map(|(c, w)| format!("{c:>w$}")).collect();
        parts.join("  ").trim_end().to_string()
    };
    let mut out = format!("# {} ({})\n", t.series, t.precision);
    out += &line(&head);
    out.push('\n');
    for l in &body {
        out += &line(l);
        out.push('\n');
    }
    if let Some((v, prov)) = &t.reference {
        out += &format!("reference  {}  ({prov})\n", format_value(*v, t.digits));
    }
    for c in t.columns.iter().filter(|c| c.error.is_some()) {
        out += &format!("note: {} stopped: {}\n", c.id, c.error.as_deref().unwrap_or_default());
    }
    if t.rows.iter().flat_map(|r| &r.cells).flatten().any(|c| c.tainted) {
        out += "* value passed through a guarded near-zero denominator\n";
    }
    out
}

#[derive(Serialize)]
struct JsonCell<'a> {
    id: &'a str,
    value: Option<f64>,
    k: Option<usize>,
    n: Option<usize>,
    tainted: bool,
}

#[derive(Serialize)]
struct JsonRow<'a> {
    n: usize,
    s: f64,
    cells: Vec<JsonCell<'a>>,
}

#[derive(Serialize)]
struct JsonReference<'a> {
    value: f64,
    provenance: &'a str,
}

#[derive(Serialize)]
struct JsonError<'a> {
    id: &'a str,
    message: &'a str,
}

#[derive(Serialize)]
struct JsonTable<'a> {
    series: &'a str,
    params: serde_json::Value,
    rows: Vec<JsonRow<'a>>,
    reference: Option<JsonReference<'a>>,
    errors: Vec<JsonError<'a>>,
}

pub fn render_json(t: &ResultTable, config: &RunConfig, globals: &Params) -> String {
    let transforms: Vec<serde_json::Value> = config
        .transforms
        .iter()
        .map(|s| {
            let p = s.params.or(globals);
            serde_json::json!({
                "id": s.id, "label": s.label, "beta": p.beta, "gamma": p.gamma, "alpha": p.alpha,
                "zeta": p.zeta, "ell": p.ell, "omega": p.omega, "points": p.points,
            })
        })
        .collect();
    let params = serde_json::json!({
        "n": config.max_n,
        "precision": t.precision.to_string(),
        "digits": t.digits,
        "transforms": transforms,
    });
    let rows = t
        .rows
        .iter()
        .map(|r| JsonRow {
            n: r.n,
            s: r.s,
            cells: r
                .cells
                .iter()
                .zip(&t.columns)
                .map(|(c, col)| JsonCell {
                    id: &col.id,
                    value: c.map(|c| c.value),
                    k: c.map(|c| c.k),
                    n: c.map(|c| c.n),
                    tainted: c.is_some_and(|c| c.tainted),
                })
                .collect(),
        })
        .collect();
    let doc = JsonTable {
        series: &t.series,
        params,
        rows,
        reference: t.reference.as_ref().map(|(v, p)| JsonReference { value: *v, provenance: p }),
        errors: t
            .columns
            .iter()
            .filter_map(|c| c.error.as_deref().map(|m| JsonError { id: &c.id, message: m }))
            .collect(),
    };
    let mut out = serde_json::to_string_pretty(&doc).expect("table serializes");
    out.push('\n');
    out
}

#[derive(Debug, Clone, PartialEq)]
pub struct CheckOutcome {
    pub id: String,
    pub pass: bool,
    pub message: String,
}

/// Largest number of significant digits a value in this precision can carry.
fn max_digits(p: Precision) -> u32 {
    match p {
        Precision::Binary64 => 16,
        Precision::Binary128 => 34,
    }
}

/// Compare each column's final untainted estimate with the expected value.
pub fn check(t: &ResultTable, c: &Check) -> Vec<CheckOutcome> {
    t.columns
        .iter()
        .enumerate()
        .map(|(i, col)| {
            let last = t.rows.iter().rev().find_map(|r| r.cells[i].filter(|c| !c.tainted).map(|c| (r.n, c)));
            let Some((row, cell)) = last else {
                let tainted = t.rows.iter().filter(|r| r.cells[i].is_some_and(|c| c.tainted)).count();
                return CheckOutcome {
                    id: col.id.clone(),
                    pass: false,
                    message: format!("no untainted estimate ({tainted} tainted cells)"),
                };
            };
            if c.digits > max_digits(t.precision) {
                return CheckOutcome {
                    id: col.id.clone(),
                    pass: false,
                    message: format!("{} digits exceed what {} can represent", c.digits, t.precision),
                };
            }
            let agree = seqaccel::kernel::agreeing_digits(cell.value, c.expected);
            let pass = agree >= c.digits as f64;
            let shown = if agree.is_infinite() { "all".to_string() } else { format!("{agree:.1}") };
            CheckOutcome {
                id: col.id.clone(),
                pass,
                message: format!(
                    "row {row}: {} agrees with {} to {shown} digits (need {})",
                    format_value(cell.value, t.digits),
                    c.expected,
                    c.digits
                ),
            }
        })
        .collect()
}
