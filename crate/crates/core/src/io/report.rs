use std::fmt::Write as _;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::explain::{set_as_string, CiResult, InfoReport, RelevanceResult, SensitivityReport};
use crate::frames::ConfigSet;
use crate::mass::{MassFunction, ZERO_THRESHOLD};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Format {
    #[default]
    Table,
    Csv,
    Json,
}

impl FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "table" => Ok(Format::Table),
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            other => Err(Error::InvalidParameter(format!("unknown format `{other}`"))),
        }
    }
}

/// Belief and plausibility of one subset.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BeliefRow {
    #[serde(serialize_with = "set_as_string")]
    pub subset: ConfigSet,
    pub bel: f64,
    pub pl: f64,
}

impl BeliefRow {
    pub fn new(m: &MassFunction, subset: ConfigSet) -> Result<Self> {
        Ok(BeliefRow {
            bel: m.bel(&subset)?,
            pl: m.pl(&subset)?,
            subset,
        })
    }
}

#[derive(Debug, Clone, Copy)]
pub enum Report<'a> {
    Mass(&'a MassFunction),
    Beliefs(&'a [BeliefRow]),
    Sensitivity(&'a SensitivityReport),
    Info(&'a InfoReport),
    Relevance(&'a RelevanceResult),
    Ci(&'a CiResult),
}

/// Renders a report. Tables round to four decimals (five below 5e-4);
/// CSV and JSON keep full precision.
pub fn serialize_report(report: Report<'_>, format: Format) -> String {
    match format {
        Format::Table => table(report),
        Format::Csv => csv_text(report),
        Format::Json => json(report),
    }
}

/// Four decimals, or five when the magnitude is below 5e-4.
pub(crate) fn fixed(v: f64) -> String {
    if v.abs() < ZERO_THRESHOLD {
        "0".to_string()
    } else if v.abs() < 5e-4 {
        format!("{v:.5}")
    } else {
        format!("{v:.4}")
    }
}

fn set_label(set: &ConfigSet) -> String {
    if set.is_full() {
        "Θ".to_string()
    } else if set.is_empty() {
        "∅".to_string()
    } else {
        set.to_string()
    }
}

/// Focal elements with the largest first, then by their configurations.
fn sorted_focals(m: &MassFunction) -> Vec<(ConfigSet, f64)> {
    let mut focals: Vec<_> = m.focal_elements().collect();
    focals.sort_by(|(a, _), (b, _)| {
        b.len()
            .cmp(&a.len())
            .then_with(|| a.indices().cmp(b.indices()))
    });
    focals
}

struct Grid {
    rows: Vec<Vec<String>>,
    numeric: Vec<bool>,
}

impl Grid {
    fn new(header: &[&str], numeric: &[bool]) -> Self {
        Grid {
            rows: vec![header.iter().map(|s| s.to_string()).collect()],
            numeric: numeric.to_vec(),
        }
    }

    fn push(&mut self, row: Vec<String>) {
        self.rows.push(row);
    }

    fn render(&self, out: &mut String) {
        let cols = self.numeric.len();
        let widths: Vec<usize> = (0..cols)
            .map(|c| self.rows.iter().map(|r| r[c].chars().count()).max().unwrap_or(0))
            .collect();
        for row in &self.rows {
            let mut line = String::new();
            for (c, cell) in row.iter().enumerate() {
                if c > 0 {
                    line.push_str("  ");
                }
                let pad = widths[c] - cell.chars().count();
                if self.numeric[c] {
                    line.extend(std::iter::repeat_n(' ', pad));
                    line.push_str(cell);
                } else {
                    line.push_str(cell);
                    line.extend(std::iter::repeat_n(' ', pad));
                }
            }
            out.push_str(line.trim_end());
            out.push('\n');
        }
    }
}

fn table(report: Report<'_>) -> String {
    let mut out = String::new();
    match report {
        Report::Mass(m) => {
            let mut g = Grid::new(&["focal element", "m(a)"], &[false, true]);
            for (set, mass) in sorted_focals(m) {
                g.push(vec![set_label(&set), fixed(mass)]);
            }
            g.push(vec!["Σ m(a)".into(), fixed(m.total())]);
            g.render(&mut out);
        }
        Report::Beliefs(rows) => {
            let mut g = Grid::new(&["a", "bel(a)", "pl(a)"], &[false, true, true]);
            for r in rows {
                g.push(vec![set_label(&r.subset), fixed(r.bel), fixed(r.pl)]);
            }
            g.render(&mut out);
        }
        Report::Sensitivity(s) => {
            let mut g = Grid::new(&["a", "evidence", "bel^", "pl^", "impact"], &[false, false, true, true, false]);
            for r in &s.rows {
                g.push(vec![
                    set_label(&r.query),
                    r.evidence.clone(),
                    fixed(r.bel_hat),
                    fixed(r.pl_hat),
                    r.impact.to_string(),
                ]);
            }
            g.render(&mut out);
        }
        Report::Info(info) => {
            let _ = writeln!(out, "variable {}, log base {}", info.variable, info.base);
            let _ = writeln!(out, "I(all evidence)  {}", fixed(info.info_full));
            let _ = writeln!(out, "I(no evidence)   {}", fixed(info.info_baseline));
            out.push('\n');
            let mut g = Grid::new(&["evidence", "ΔI", "I"], &[false, true, true]);
            for r in &info.rows {
                g.push(vec![r.evidence.clone(), fixed(r.delta_info), fixed(r.info_individual)]);
            }
            if let Some(sub) = &info.subset {
                g.push(vec![
                    format!("{{{}}}", sub.evidence.join(",")),
                    fixed(sub.delta_info),
                    fixed(sub.info_individual),
                ]);
            }
            g.render(&mut out);
        }
        Report::Relevance(r) => {
            let _ = writeln!(out, "selected: {}", r.selected.join(", "));
            out.push('\n');
            let mut g = Grid::new(&["n", "added", "ΔI(R)"], &[true, false, true]);
            for step in &r.trace {
                g.push(vec![step.step.to_string(), step.evidence.clone(), fixed(step.delta_info)]);
            }
            g.render(&mut out);
            if let Some(stop) = &r.stopped_at {
                let _ = writeln!(
                    out,
                    "\nstopped: adding {} gives ΔI(R) {}, a negligible increase",
                    stop.evidence,
                    fixed(stop.delta_info)
                );
            }
            for p in &r.pruned {
                let _ = writeln!(
                    out,
                    "pruned: {} (ΔI {} against {} for the rest)",
                    p.evidence,
                    fixed(p.delta_info),
                    fixed(p.delta_info_rest)
                );
            }
        }
        Report::Ci(c) => {
            let _ = writeln!(out, "independent: {}", c.independent);
            let _ = writeln!(out, "max deviation: {:e}", c.max_deviation);
        }
    }
    out
}

fn csv_text(report: Report<'_>) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut put = |fields: &[String]| w.write_record(fields).expect("writing to memory");
    let s = |x: &str| x.to_string();
    match report {
        Report::Mass(m) => {
            put(&[s("focal_element"), s("mass")]);
            for (set, mass) in sorted_focals(m) {
                put(&[set.to_string(), mass.to_string()]);
            }
        }
        Report::Beliefs(rows) => {
            put(&[s("subset"), s("bel"), s("pl")]);
            for r in rows {
                put(&[r.subset.to_string(), r.bel.to_string(), r.pl.to_string()]);
            }
        }
        Report::Sensitivity(rep) => {
            put(&[s("subset"), s("evidence"), s("bel_hat"), s("pl_hat"), s("impact")]);
            for r in &rep.rows {
                put(&[
                    r.query.to_string(),
                    r.evidence.clone(),
                    r.bel_hat.to_string(),
                    r.pl_hat.to_string(),
                    r.impact.to_string(),
                ]);
            }
        }
        Report::Info(info) => {
            put(&[s("evidence"), s("delta_info"), s("info_individual")]);
            put(&[s("*"), info.info_full.to_string(), String::new()]);
            for r in &info.rows {
                put(&[r.evidence.clone(), r.delta_info.to_string(), r.info_individual.to_string()]);
            }
            if let Some(sub) = &info.subset {
                put(&[
                    sub.evidence.join(" "),
                    sub.delta_info.to_string(),
                    sub.info_individual.to_string(),
                ]);
            }
        }
        Report::Relevance(r) => {
            put(&[s("n"), s("evidence"), s("delta_info"), s("status")]);
            for step in &r.trace {
                let status = if r.pruned.iter().any(|p| p.evidence == step.evidence) {
                    "pruned"
                } else {
                    "selected"
                };
                put(&[step.step.to_string(), step.evidence.clone(), step.delta_info.to_string(), s(status)]);
            }
            if let Some(stop) = &r.stopped_at {
                put(&[stop.step.to_string(), stop.evidence.clone(), stop.delta_info.to_string(), s("rejected")]);
            }
        }
        Report::Ci(c) => {
            put(&[s("independent"), s("max_deviation")]);
            put(&[c.independent.to_string(), c.max_deviation.to_string()]);
        }
    }
    String::from_utf8(w.into_inner().expect("flushing to memory")).expect("csv output is utf-8")
}

#[derive(Serialize)]
struct MassView {
    domain: Vec<String>,
    conflict: f64,
    focal_elements: Vec<FocalView>,
}

#[derive(Serialize)]
struct FocalView {
    set: String,
    mass: f64,
}

fn json(report: Report<'_>) -> String {
    let value = match report {
        Report::Mass(m) => serde_json::to_value(MassView {
            domain: m.domain().names().map(String::from).collect(),
            conflict: m.conflict(),
            focal_elements: sorted_focals(m)
                .into_iter()
                .map(|(set, mass)| FocalView {
                    set: set.to_string(),
                    mass,
                })
                .collect(),
        }),
        Report::Beliefs(rows) => serde_json::to_value(rows),
        Report::Sensitivity(r) => serde_json::to_value(r),
        Report::Info(r) => serde_json::to_value(r),
        Report::Relevance(r) => serde_json::to_value(r),
        Report::Ci(r) => serde_json::to_value(r),
    }
    .expect("reports serialize");
    let mut text = serde_json::to_string_pretty(&value).expect("reports serialize");
    text.push('\n');
    text
}
