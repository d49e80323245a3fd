//! Text snapshot of a super-terms table.
//!
//! ```text
//! tbi-snapshot<TAB>terms=<n><TAB>relations=<r>
//! <nested><TAB><super>
//! <term>
//! ```
//!
//! After the header every line is either a relation or a term that takes
//! part in no relation, and the lines are sorted bytewise. Two tables with the
//! same content therefore serialize to identical bytes. Bucket tables are
//! never written.

use std::collections::HashSet;
use std::fs::File;
use std::io::{self, BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use thiserror::Error;

use crate::table::SuperTermsTable;
use crate::term::Term;

const MAGIC: &str = "tbi-snapshot";

#[derive(Debug, Error)]
pub enum SnapshotError {
    #[error("i/o error: {0}")]
    Io(#[from] io::Error),
    #[error("snapshot line {line}: {reason}")]
    Parse { line: usize, reason: String },
}

fn parse_err(line: usize, reason: impl Into<String>) -> SnapshotError {
    SnapshotError::Parse { line, reason: reason.into() }
}

pub fn snapshot_lines(table: &SuperTermsTable) -> Vec<String> {
    let mut related = vec![false; table.len()];
    let mut lines: Vec<String> = Vec::with_capacity(table.len());
    for (id, term) in table.terms().iter().enumerate() {
        for &sup in table.super_ids(id as u32) {
            related[id] = true;
            related[sup as usize] = true;
            lines.push(format!("{}\t{}", term, table.term(sup)));
        }
    }
    for (id, term) in table.terms().iter().enumerate() {
        if !related[id] {
            lines.push(term.as_str().to_owned());
        }
    }
    lines.sort_unstable();
    lines
}

pub fn write_snapshot(table: &SuperTermsTable, mut out: impl Write) -> io::Result<()> {
    writeln!(out, "{MAGIC}\tterms={}\trelations={}", table.len(), table.relation_count())?;
    for line in snapshot_lines(table) {
        writeln!(out, "{line}")?;
    }
    out.flush()
}

pub fn save_snapshot(table: &SuperTermsTable, path: impl AsRef<Path>) -> io::Result<()> {
    write_snapshot(table, BufWriter::new(File::create(path)?))
}

pub fn read_snapshot(reader: impl BufRead) -> Result<SuperTermsTable, SnapshotError> {
    let mut lines = reader.lines();
    let header = lines.next().ok_or_else(|| parse_err(1, "missing header"))??;
    let (terms, relations) = parse_header(&header).ok_or_else(|| parse_err(1, "malformed header"))?;

    let mut table = SuperTermsTable::with_capacity(terms);
    let mut pairs = HashSet::new();
    let intern = |table: &mut SuperTermsTable, text: &str, line: usize| -> Result<u32, SnapshotError> {
        if let Some(id) = table.id_of(text) {
            return Ok(id);
        }
        let term = Term::normalize(text).map_err(|e| parse_err(line, e.to_string()))?;
        if term.as_str() != text {
            return Err(parse_err(line, format!("term {text:?} is not normalized")));
        }
        Ok(table.insert_key(term).expect("checked absent"))
    };
    for (i, line) in lines.enumerate() {
        let line_no = i + 2;
        let line = line?;
        match line.split_once('\t') {
            Some((nested, sup)) => {
                let n = intern(&mut table, nested, line_no)?;
                let s = intern(&mut table, sup, line_no)?;
                if !table.term(n).is_nested_in(table.term(s)) {
                    return Err(parse_err(line_no, format!("{nested:?} is not nested in {sup:?}")));
                }
                if !pairs.insert((n, s)) {
                    return Err(parse_err(line_no, "duplicate relation"));
                }
                table.add_super(n, s);
            }
            None => {
                intern(&mut table, &line, line_no)?;
            }
        }
    }
    if table.len() != terms || table.relation_count() != relations {
        return Err(parse_err(
            1,
            format!(
                "header promises {terms} terms / {relations} relations, body has {} / {}",
                table.len(),
                table.relation_count()
            ),
        ));
    }
    Ok(table)
}

pub fn load_snapshot(path: impl AsRef<Path>) -> Result<SuperTermsTable, SnapshotError> {
    read_snapshot(BufReader::new(File::open(path)?))
}

fn parse_header(header: &str) -> Option<(usize, usize)> {
    let mut parts = header.split('\t');
    if parts.next()? != MAGIC {
        return None;
    }
    let terms = parts.next()?.strip_prefix("terms=")?.parse().ok()?;
    let relations = parts.next()?.strip_prefix("relations=")?.parse().ok()?;
    parts.next().is_none().then_some((terms, relations))
}
