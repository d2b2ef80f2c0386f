//! Plain-text file formats.
//!
//! Subproblem files start with a `# n=<n> d=<d>` header followed by one
//! subproblem per line, written `a;b;c;d` with comma-separated compressed
//! entries. Solution files hold four `+`/`-` rows (A, B, C, D) per
//! quadruple, quadruples separated by blank lines. In both formats lines
//! starting with `#` are comments.

use std::io::{BufRead, Write};

use crate::designs::Quadruple;
use crate::divide::CompressedQuadruple;
use crate::error::{Error, Result};
use crate::seqcore::{CompressedSequence, OrderParams, PmSequence, Role};

/// Parses one `a;b;c;d` line against the given parameters.
pub fn parse_subproblem(text: &str, params: &OrderParams) -> std::result::Result<CompressedQuadruple, String> {
    let parts: Vec<&str> = text.trim().split(';').collect();
    if parts.len() != 4 {
        return Err(format!("expected 4 ';'-separated rows, found {}", parts.len()));
    }
    let mut seqs = Vec::with_capacity(4);
    for (role, part) in Role::ALL.into_iter().zip(parts) {
        let entries = part
            .split(',')
            .map(|v| v.trim().parse::<i8>().map_err(|e| format!("row {role}: {v:?}: {e}")))
            .collect::<std::result::Result<Vec<_>, _>>()?;
        seqs.push(CompressedSequence::new(entries, params.d()).map_err(|e| format!("row {role}: {e}"))?);
    }
    let seqs: [CompressedSequence; 4] = seqs.try_into().expect("four rows");
    CompressedQuadruple::new(seqs, *params).map_err(|e| e.to_string())
}

fn parse_header(text: &str) -> Option<(usize, usize)> {
    let rest = text.strip_prefix('#')?.trim();
    let mut n = None;
    let mut d = None;
    for field in rest.split_whitespace() {
        match field.split_once('=')? {
            ("n", v) => n = v.parse().ok(),
            ("d", v) => d = v.parse().ok(),
            _ => return None,
        }
    }
    Some((n?, d?))
}

pub fn write_subproblems<W: Write>(mut w: W, params: &OrderParams, subs: &[CompressedQuadruple]) -> Result<()> {
    writeln!(w, "# n={} d={}", params.n(), params.d())?;
    for q in subs {
        writeln!(w, "{q}")?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_subproblems<R: BufRead>(r: R) -> Result<(OrderParams, Vec<CompressedQuadruple>)> {
    let mut params = None;
    let mut out = Vec::new();
    for (i, line) in r.lines().enumerate() {
        let line = line?;
        let lineno = i + 1;
        let text = line.trim();
        if text.is_empty() {
            continue;
        }
        if text.starts_with('#') {
            if params.is_none() {
                if let Some((n, d)) = parse_header(text) {
                    params = Some(OrderParams::from_n(n, Some(d)).map_err(|e| Error::parse(lineno, e.to_string()))?);
                }
            }
            continue;
        }
        let Some(p) = &params else {
            return Err(Error::parse(lineno, "subproblem before the '# n=<n> d=<d>' header"));
        };
        out.push(parse_subproblem(text, p).map_err(|msg| Error::parse(lineno, msg))?);
    }
    let params = params.ok_or_else(|| Error::parse(0, "missing '# n=<n> d=<d>' header"))?;
    Ok((params, out))
}

pub fn write_solutions<W: Write>(mut w: W, quads: &[Quadruple]) -> Result<()> {
    for (i, q) in quads.iter().enumerate() {
        if i > 0 {
            writeln!(w)?;
        }
        for s in q.seqs() {
            writeln!(w, "{s}")?;
        }
    }
    w.flush()?;
    Ok(())
}

pub fn read_solutions<R: BufRead>(r: R) -> Result<Vec<Quadruple>> {
    let mut out = Vec::new();
    let mut block: Vec<(usize, String)> = Vec::new();
    let flush = |block: &mut Vec<(usize, String)>, out: &mut Vec<Quadruple>| -> Result<()> {
        if block.is_empty() {
            return Ok(());
        }
        let first = block[0].0;
        if block.len() != 4 {
            return Err(Error::parse(
                first,
                format!("quadruple has {} rows, expected 4", block.len()),
            ));
        }
        let mut rows = Vec::with_capacity(4);
        for (role, (lineno, text)) in Role::ALL.into_iter().zip(block.iter()) {
            rows.push(PmSequence::parse_pm(text, role.symmetry()).map_err(|e| Error::parse(*lineno, e.to_string()))?);
        }
        let rows: [PmSequence; 4] = rows.try_into().expect("four rows");
        out.push(Quadruple::from_array(rows).map_err(|e| Error::parse(first, e.to_string()))?);
        block.clear();
        Ok(())
    };
    for (i, line) in r.lines().enumerate() {
        let line = line?;
        let text = line.trim();
        if text.starts_with('#') {
            continue;
        }
        if text.is_empty() {
            flush(&mut block, &mut out)?;
        } else {
            block.push((i + 1, text.to_string()));
        }
    }
    flush(&mut block, &mut out)?;
    Ok(out)
}
