//! `colombeau sweep`: raw seminorm values per net and `eps`.

use colombeau::expr::Representative;
use colombeau::grid::SeminormQuery;
use colombeau::quotient::sweep;
use colombeau::{Result, Workbench};

use crate::run::CsvFile;

pub const SWEEP_CSV_HEADER: &str = "representative,net,seminorm,eps,value";

/// `S(a=1,b=2)` or `K(r=2,b=0)`, the labels used in verdict tables.
pub fn parse_seminorm(text: &str) -> Option<SeminormQuery> {
    let t = text.trim();
    let (kind, args) = t.split_once('(')?;
    let args = args.strip_suffix(')')?;
    let mut first = None;
    let mut beta = None;
    for part in args.split(',') {
        let (k, v) = part.split_once('=')?;
        match (kind.trim(), k.trim()) {
            ("S", "a") => first = Some(v.trim().parse::<u32>().ok()? as f64),
            ("K", "r") => first = Some(v.trim().parse::<f64>().ok()?),
            (_, "b") => beta = Some(v.trim().parse::<u32>().ok()?),
            _ => return None,
        }
    }
    let (first, beta) = (first?, beta?);
    match kind.trim() {
        "S" => Some(SeminormQuery::schwartz(first as u32, beta)),
        "K" => Some(SeminormQuery::compact(first, beta)),
        _ => None,
    }
}

pub fn sweep_table(
    wb: &Workbench,
    r: &Representative,
    queries: &[SeminormQuery],
) -> Result<(CsvFile, Vec<String>)> {
    let mut rows = Vec::new();
    let mut notes = Vec::new();
    let evaluator = wb.evaluator();
    for net in &wb.nets {
        let (series, note) = sweep(&evaluator, &wb.eps, r, &net.operator, &[], queries)?;
        if !note.is_empty() {
            notes.push(format!("{}: {note}", net.id));
        }
        for (q, s) in queries.iter().zip(series) {
            for (e, v) in s {
                rows.push(format!("\"{}\",{},\"{}\",{e},{v:e}", r, net.id, q.label()));
            }
        }
    }
    Ok((
        CsvFile {
            name: "sweep.csv".into(),
            header: SWEEP_CSV_HEADER.into(),
            rows,
        },
        notes,
    ))
}
