//! SDPA sparse format (`.dat-s`).
//!
//! Header: number of constraints, number of blocks, block sizes, then the
//! right-hand side `b`. Each following line is `matno blkno i j value` with
//! 1-based indices, upper-triangle entries only and `matno 0` for `C`.
//! Lines starting with `"` or `*` are comments. The data is read as
//! `min C • X, A⁽ⁱ⁾ • X = bᵢ` without any sign change.
//!
//! Several blocks are merged into one block-diagonal matrix: block `k`
//! occupies rows and columns `offset_k .. offset_k + |size_k|`, where
//! `offset_k` is the sum of the earlier `|size|`. A negative size marks a
//! diagonal block, whose entries must have `i = j`.

use std::fmt::Write as _;
use std::path::Path;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::model::SdoProblem;

fn parse_err(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse { line, msg: msg.into() }
}

fn tokens(s: &str) -> impl Iterator<Item = &str> {
    s.split(|c: char| c.is_whitespace() || matches!(c, ',' | '{' | '}' | '(' | ')'))
        .filter(|t| !t.is_empty())
}

fn parse_f64(tok: &str, line: usize) -> Result<f64> {
    tok.parse::<f64>()
        .map_err(|_| parse_err(line, format!("'{tok}' is not a number")))
}

fn parse_int(tok: &str, line: usize) -> Result<i64> {
    if let Ok(v) = tok.parse::<i64>() {
        return Ok(v);
    }
    // Some writers emit integers as "3.0".
    let v = parse_f64(tok, line)?;
    if v.fract() != 0.0 || v.abs() > 1e15 {
        return Err(parse_err(line, format!("'{tok}' is not an integer")));
    }
    Ok(v as i64)
}

/// Parses the text of an SDPA sparse file.
pub fn parse_sdpa(text: &str) -> Result<SdoProblem> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('"') && !l.starts_with('*'));
    let total_lines = text.lines().count();
    let mut next = |what: &str| {
        lines
            .next()
            .ok_or_else(|| parse_err(total_lines + 1, format!("unexpected end of file, expected {what}")))
    };

    let (ln, l) = next("the number of constraints")?;
    let m = parse_int(tokens(l).next().unwrap_or(""), ln)?;
    if m < 1 {
        return Err(parse_err(ln, "need at least one constraint"));
    }
    let m = m as usize;

    let (ln, l) = next("the number of blocks")?;
    let nblocks = parse_int(tokens(l).next().unwrap_or(""), ln)?;
    if nblocks < 1 {
        return Err(parse_err(ln, "need at least one block"));
    }

    let (ln, l) = next("the block sizes")?;
    let sizes: Vec<i64> = tokens(l).map(|t| parse_int(t, ln)).collect::<Result<_>>()?;
    if sizes.len() < nblocks as usize {
        return Err(parse_err(ln, format!("expected {nblocks} block sizes, found {}", sizes.len())));
    }
    let sizes = &sizes[..nblocks as usize];
    if sizes.contains(&0) {
        return Err(parse_err(ln, "block size 0"));
    }
    let mut offsets = Vec::with_capacity(sizes.len());
    let mut n = 0usize;
    for s in sizes {
        offsets.push(n);
        n += s.unsigned_abs() as usize;
    }

    let mut b = Vec::with_capacity(m);
    while b.len() < m {
        let (ln, l) = next("the right-hand side")?;
        for t in tokens(l) {
            if b.len() == m {
                return Err(parse_err(ln, format!("more than {m} right-hand side entries")));
            }
            b.push(parse_f64(t, ln)?);
        }
    }

    let mut mats = vec![DMatrix::<f64>::zeros(n, n); m + 1];
    for (ln, l) in lines {
        let t: Vec<&str> = tokens(l).collect();
        if t.len() != 5 {
            return Err(parse_err(ln, format!("expected 'matno blkno i j value', found {} fields", t.len())));
        }
        let matno = parse_int(t[0], ln)?;
        let blk = parse_int(t[1], ln)?;
        let i = parse_int(t[2], ln)?;
        let j = parse_int(t[3], ln)?;
        let v = parse_f64(t[4], ln)?;
        if matno < 0 || matno as usize > m {
            return Err(parse_err(ln, format!("matrix number {matno} outside 0..={m}")));
        }
        if blk < 1 || blk > nblocks {
            return Err(parse_err(ln, format!("block {blk} outside 1..={nblocks}")));
        }
        let size = sizes[blk as usize - 1];
        let dim = size.unsigned_abs() as i64;
        if i < 1 || j < 1 || i > dim || j > dim {
            return Err(parse_err(ln, format!("index ({i}, {j}) outside block of size {dim}")));
        }
        if size < 0 && i != j {
            return Err(parse_err(ln, "off-diagonal entry in a diagonal block"));
        }
        let off = offsets[blk as usize - 1];
        let (r, c) = (off + i as usize - 1, off + j as usize - 1);
        let mat = &mut mats[matno as usize];
        mat[(r, c)] = v;
        mat[(c, r)] = v;
    }
    let c = mats.remove(0);
    SdoProblem::new(mats, DVector::from_vec(b), c)
}

pub fn read_sdpa(path: impl AsRef<Path>) -> Result<SdoProblem> {
    parse_sdpa(&std::fs::read_to_string(path)?)
}

/// Single-block SDPA text with 17 significant digits per value.
pub fn format_sdpa(p: &SdoProblem) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{}", p.m);
    let _ = writeln!(out, "1");
    let _ = writeln!(out, "{}", p.n);
    let b: Vec<String> = p.b.iter().map(|v| format!("{v:.16e}")).collect();
    let _ = writeln!(out, "{}", b.join(" "));
    for (k, mat) in std::iter::once(&p.c).chain(p.a.iter()).enumerate() {
        for i in 0..p.n {
            for j in i..p.n {
                let v = mat[(i, j)];
                if v != 0.0 {
                    let _ = writeln!(out, "{k} 1 {} {} {v:.16e}", i + 1, j + 1);
                }
            }
        }
    }
    out
}

pub fn write_sdpa(p: &SdoProblem, path: impl AsRef<Path>) -> Result<()> {
    std::fs::write(path, format_sdpa(p))?;
    Ok(())
}
