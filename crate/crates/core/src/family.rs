//! Plain-text matrix family files.
//!
//! ```text
//! # comments run to the end of the line
//! field GF(4)
//! subfield GF(2)      # optional
//! matrix
//!   t   0
//!   0   t+1
//! matrix
//!   1 1
//!   0 1
//! ```
//!
//! A `quaternion` line replaces `field` and switches entries to quaternion
//! literals such as `1/2-i+3k`. Entries are separated by whitespace, so a
//! single entry may not contain spaces. A matrix ends at the next directive
//! or at the end of the file; blank lines are ignored.

use crate::error::{Error, Result};
use crate::field::FieldDescriptor;
use crate::linalg::ExactMatrix;
use crate::quat::QuaternionMatrix;

#[derive(Clone, Debug)]
pub enum Matrices {
    Field(Vec<ExactMatrix>),
    Quaternion(Vec<QuaternionMatrix>),
}

#[derive(Clone, Debug)]
pub struct FamilyFile {
    /// `None` for quaternion files.
    pub field: Option<FieldDescriptor>,
    pub subfield: Option<FieldDescriptor>,
    pub matrices: Matrices,
}

impl FamilyFile {
    pub fn n(&self) -> usize {
        match &self.matrices {
            Matrices::Field(m) => m[0].rows(),
            Matrices::Quaternion(m) => m[0].n(),
        }
    }

    pub fn field_matrices(&self) -> Option<&[ExactMatrix]> {
        match &self.matrices {
            Matrices::Field(m) => Some(m),
            Matrices::Quaternion(_) => None,
        }
    }

    pub fn quaternion_matrices(&self) -> Option<&[QuaternionMatrix]> {
        match &self.matrices {
            Matrices::Quaternion(m) => Some(m),
            Matrices::Field(_) => None,
        }
    }
}

fn located(line: usize, column: usize, e: Error) -> Error {
    Error::Located {
        line,
        column,
        source: Box::new(e),
    }
}

fn parse_error(line: usize, column: usize, token: &str, message: &str) -> Error {
    Error::Parse {
        line,
        column,
        token: token.into(),
        message: message.into(),
    }
}

/// A whitespace-separated token with its 1-based column.
fn tokens(line: &str) -> Vec<(usize, &str)> {
    let mut out = Vec::new();
    let mut start = None;
    for (i, ch) in line.char_indices() {
        if ch.is_whitespace() {
            if let Some(s) = start.take() {
                out.push((s, &line[s..i]));
            }
        } else if start.is_none() {
            start = Some(i);
        }
    }
    if let Some(s) = start {
        out.push((s, &line[s..]));
    }
    out.into_iter()
        .map(|(byte, t)| (line[..byte].chars().count() + 1, t))
        .collect()
}

struct Block {
    line: usize,
    rows: Vec<(usize, Vec<(usize, String)>)>,
}

pub fn parse_family(text: &str) -> Result<FamilyFile> {
    let mut field: Option<(usize, usize, String)> = None;
    let mut subfield: Option<(usize, usize, String)> = None;
    let mut quaternion = None;
    let mut blocks: Vec<Block> = Vec::new();
    let mut in_matrix = false;

    for (idx, raw) in text.lines().enumerate() {
        let lineno = idx + 1;
        let content = raw.split('#').next().unwrap_or("");
        let toks = tokens(content);
        let Some(&(col, head)) = toks.first() else {
            continue;
        };
        let rest_of_line = |toks: &[(usize, &str)]| -> Option<(usize, String)> {
            let (c, _) = *toks.get(1)?;
            let byte = content.char_indices().nth(c - 1).map(|(b, _)| b)?;
            Some((c, content[byte..].trim().to_string()))
        };
        match head {
            "field" | "subfield" => {
                let (c, spec) = rest_of_line(&toks)
                    .ok_or_else(|| parse_error(lineno, col, head, "expected a field after the directive"))?;
                let slot = if head == "field" { &mut field } else { &mut subfield };
                if slot.is_some() {
                    return Err(parse_error(lineno, col, head, "directive given twice"));
                }
                *slot = Some((lineno, c, spec));
                in_matrix = false;
            }
            "quaternion" => {
                if toks.len() > 1 {
                    return Err(parse_error(lineno, toks[1].0, toks[1].1, "unexpected token after `quaternion`"));
                }
                quaternion = Some(lineno);
                in_matrix = false;
            }
            "matrix" => {
                if toks.len() > 1 {
                    return Err(parse_error(lineno, toks[1].0, toks[1].1, "unexpected token after `matrix`"));
                }
                blocks.push(Block {
                    line: lineno,
                    rows: Vec::new(),
                });
                in_matrix = true;
            }
            _ if in_matrix => {
                let row = toks.iter().map(|&(c, t)| (c, t.to_string())).collect();
                blocks.last_mut().expect("inside a block").rows.push((lineno, row));
            }
            _ => return Err(parse_error(lineno, col, head, "expected `field`, `subfield`, `quaternion` or `matrix`")),
        }
    }

    if blocks.is_empty() {
        return Err(parse_error(text.lines().count().max(1), 1, "", "no matrices"));
    }
    let mut n = None;
    for b in &blocks {
        let Some((_, first)) = b.rows.first() else {
            return Err(parse_error(b.line, 1, "matrix", "matrix has no rows"));
        };
        let size = *n.get_or_insert(first.len());
        if b.rows.len() != size {
            return Err(located(
                b.line,
                1,
                Error::shape(format!("matrix has {} rows, expected {size}", b.rows.len())),
            ));
        }
        for (line, row) in &b.rows {
            if row.len() != size {
                let col = row.get(size).or(row.last()).map_or(1, |(c, _)| *c);
                return Err(located(
                    *line,
                    col,
                    Error::shape(format!("row has {} entries, expected {size}", row.len())),
                ));
            }
        }
    }

    if quaternion.is_some() {
        if let Some((line, col, _)) = field {
            return Err(parse_error(line, col, "field", "quaternion files take no field"));
        }
        if let Some((line, col, _)) = subfield {
            return Err(parse_error(line, col, "subfield", "quaternion files take no subfield"));
        }
        let mut mats = Vec::with_capacity(blocks.len());
        for b in &blocks {
            let mut grid = Vec::new();
            for (line, row) in &b.rows {
                let mut out = Vec::new();
                for (col, t) in row {
                    let q = crate::field::Quaternion::parse(t).map_err(|e| literal_error(*line, *col, t, e))?;
                    out.push(q.to_string());
                }
                grid.push(out);
            }
            mats.push(QuaternionMatrix::parse(&grid).map_err(|e| located(b.line, 1, e))?);
        }
        return Ok(FamilyFile {
            field: None,
            subfield: None,
            matrices: Matrices::Quaternion(mats),
        });
    }

    let Some((fline, fcol, fspec)) = field else {
        return Err(parse_error(1, 1, "", "missing `field` directive"));
    };
    let field = FieldDescriptor::parse(&fspec).map_err(|e| located(fline, fcol, e))?;
    let sub = match subfield {
        Some((line, col, spec)) => {
            let sub = FieldDescriptor::parse(&spec).map_err(|e| located(line, col, e))?;
            field.check_tower(&sub).map_err(|e| located(line, col, e))?;
            Some(sub)
        }
        None => None,
    };
    let mut mats = Vec::with_capacity(blocks.len());
    for b in &blocks {
        let mut rows = Vec::new();
        for (line, row) in &b.rows {
            let mut out = Vec::new();
            for (col, t) in row {
                out.push(field.parse_scalar(t).map_err(|e| literal_error(*line, *col, t, e))?);
            }
            rows.push(out);
        }
        mats.push(ExactMatrix::from_rows(&field, rows).map_err(|e| located(b.line, 1, e))?);
    }
    Ok(FamilyFile {
        field: Some(field),
        subfield: sub,
        matrices: Matrices::Field(mats),
    })
}

fn literal_error(line: usize, column: usize, token: &str, e: Error) -> Error {
    let message = match e {
        Error::Literal { message, .. } => message,
        other => other.to_string(),
    };
    parse_error(line, column, token, &message)
}

pub fn read_family(path: &std::path::Path) -> Result<FamilyFile> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::PreconditionViolated(format!("cannot read {}: {e}", path.display())))?;
    parse_family(&text)
}

/// Renders a family in the file format; `parse_family` reads it back.
pub fn format_family(file: &FamilyFile) -> String {
    let mut out = String::new();
    match (&file.field, &file.matrices) {
        (_, Matrices::Quaternion(ms)) => {
            out.push_str("quaternion\n");
            for m in ms {
                out.push_str("matrix\n");
                for row in m.to_strings() {
                    out.push_str(&format!("  {}\n", row.join(" ")));
                }
            }
        }
        (Some(f), Matrices::Field(ms)) => {
            out.push_str(&format!("field {f}\n"));
            if let Some(s) = &file.subfield {
                out.push_str(&format!("subfield {s}\n"));
            }
            for m in ms {
                out.push_str("matrix\n");
                for row in m.to_strings() {
                    out.push_str(&format!("  {}\n", row.join(" ")));
                }
            }
        }
        (None, Matrices::Field(_)) => unreachable!("field matrices carry a field"),
    }
    out
}
