//! Text formats read and written by the commands.
//!
//! A classes file holds one record per isomorphism class, sorted by digest:
//!
//! ```text
//! P1F-CLASSES v1 n=7 count=2
//! # canon <sha256> aut=12 direct=6
//! 7 7
//! 0 1 2 3 4 5 6
//! ...
//! ```

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use p1f_core::search::automorphism_histogram;
use p1f_core::seeds::SEED_HEADER;
use p1f_core::{ClassRecord, LatinSquare, Opf, SeedSet};
use sha2::{Digest, Sha256};

use crate::error::{CliError, CliResult};

pub const CLASSES_HEADER: &str = "P1F-CLASSES v1";

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

pub fn read_text(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|e| CliError::io(path, e))
}

pub fn write_classes(n: usize, classes: &[ClassRecord]) -> String {
    let mut s = String::new();
    writeln!(s, "{CLASSES_HEADER} n={n} count={}", classes.len()).unwrap();
    for c in classes {
        writeln!(
            s,
            "# canon {} aut={} direct={}",
            c.digest, c.automorphisms, c.direct_automorphisms
        )
        .unwrap();
        write!(s, "{}", c.representative).unwrap();
    }
    s
}

fn header_fields(rest: &str) -> Option<(usize, usize)> {
    let mut n = None;
    let mut count = None;
    for tok in rest.split_whitespace() {
        if let Some(v) = tok.strip_prefix("n=") {
            n = Some(v.parse().ok()?);
        } else if let Some(v) = tok.strip_prefix("count=") {
            count = Some(v.parse().ok()?);
        } else {
            return None;
        }
    }
    n.zip(count)
}

fn bad(line: usize, msg: impl Into<String>) -> p1f_core::Error {
    p1f_core::Error::Parse {
        line,
        msg: msg.into(),
    }
}

/// Parses a classes file. Stored digests and group orders are taken as
/// given; `merge` recomputes them.
pub fn parse_classes(text: &str) -> p1f_core::Result<(usize, Vec<ClassRecord>)> {
    let lines: Vec<(usize, &str)> = text
        .lines()
        .enumerate()
        .map(|(k, l)| (k + 1, l))
        .filter(|(_, l)| !l.trim().is_empty())
        .collect();
    let (hl, header) = *lines.first().ok_or_else(|| bad(1, "empty classes file"))?;
    let (n, count) = header
        .strip_prefix(CLASSES_HEADER)
        .and_then(header_fields)
        .ok_or_else(|| bad(hl, "expected 'P1F-CLASSES v1 n=<n> count=<c>'"))?;
    let mut out = Vec::with_capacity(count);
    let mut k = 1;
    while k < lines.len() {
        let (cl, line) = lines[k];
        let mut toks = line
            .trim()
            .strip_prefix("# canon ")
            .ok_or_else(|| bad(cl, "expected '# canon <digest> aut=<a> direct=<d>'"))?
            .split_whitespace();
        let digest = toks.next().ok_or_else(|| bad(cl, "missing digest"))?.to_string();
        let mut aut = None;
        let mut direct = None;
        for t in toks {
            if let Some(v) = t.strip_prefix("aut=") {
                aut = v.parse::<u128>().ok();
            } else if let Some(v) = t.strip_prefix("direct=") {
                direct = v.parse::<u128>().ok();
            }
        }
        let (aut, direct) = aut.zip(direct).ok_or_else(|| bad(cl, "missing aut= or direct="))?;
        let body_start = k + 1;
        let end = lines[body_start..]
            .iter()
            .position(|(_, l)| l.trim_start().starts_with('#'))
            .map_or(lines.len(), |p| body_start + p);
        let body: String = lines[body_start..end].iter().map(|(_, l)| format!("{l}\n")).collect();
        let opf: Opf = body
            .parse()
            .map_err(|e: p1f_core::Error| bad(cl, format!("record: {e}")))?;
        if opf.order() != n || !opf.is_complete() {
            return Err(bad(cl, "record is not a complete factorisation of the file's order"));
        }
        out.push(ClassRecord {
            digest,
            representative: opf,
            automorphisms: aut,
            direct_automorphisms: direct,
        });
        k = end;
    }
    if out.len() != count {
        return Err(bad(hl, format!("header count {count}, found {}", out.len())));
    }
    Ok((n, out))
}

/// Machine-readable run summary; deterministic for a given class list.
pub fn summary(n: usize, shard: (usize, usize), seeds: usize, classes: &[ClassRecord]) -> String {
    let mut s = String::new();
    writeln!(s, "n={n} shard={}/{} seeds={seeds}", shard.0, shard.1).unwrap();
    writeln!(s, "classes={}", classes.len()).unwrap();
    writeln!(s, "# direct automorphisms, automorphisms, classes").unwrap();
    for (d, a, k) in automorphism_histogram(classes) {
        writeln!(s, "hist direct={d} aut={a} count={k}").unwrap();
    }
    s
}

/// The objects a catalogue command can read.
#[derive(Clone, Debug)]
pub enum Catalogue {
    Factorisations(Vec<Opf>),
    Squares(Vec<LatinSquare>),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum InputFormat {
    Auto,
    Classes,
    Seeds,
    Opf,
    Latin,
}

impl Catalogue {
    pub fn len(&self) -> usize {
        match self {
            Catalogue::Factorisations(v) => v.len(),
            Catalogue::Squares(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Squares of the catalogue; factorisations must be complete.
    pub fn squares(&self) -> p1f_core::Result<Vec<LatinSquare>> {
        match self {
            Catalogue::Squares(v) => Ok(v.clone()),
            Catalogue::Factorisations(v) => v.iter().map(LatinSquare::from_opf).collect(),
        }
    }
}

fn sniff(text: &str) -> InputFormat {
    let first = text
        .lines()
        .map(str::trim)
        .find(|l| !l.is_empty() && !l.starts_with('#'))
        .unwrap_or("");
    if first.starts_with(CLASSES_HEADER) {
        InputFormat::Classes
    } else if first.starts_with(SEED_HEADER) {
        InputFormat::Seeds
    } else if first.split_whitespace().count() == 2 {
        InputFormat::Opf
    } else {
        InputFormat::Latin
    }
}

pub fn parse_catalogue(text: &str, format: InputFormat) -> p1f_core::Result<Catalogue> {
    let format = match format {
        InputFormat::Auto => sniff(text),
        f => f,
    };
    Ok(match format {
        InputFormat::Classes => {
            Catalogue::Factorisations(parse_classes(text)?.1.into_iter().map(|c| c.representative).collect())
        }
        InputFormat::Seeds => Catalogue::Factorisations(
            SeedSet::parse(text)?.seeds().iter().map(|s| s.opf.clone()).collect(),
        ),
        InputFormat::Opf => Catalogue::Factorisations(Opf::parse_many(text)?),
        InputFormat::Latin | InputFormat::Auto => Catalogue::Squares(LatinSquare::parse_many(text)?),
    })
}

pub fn load_catalogue(path: &Path, format: InputFormat) -> CliResult<Catalogue> {
    let text = read_text(path)?;
    let cat = parse_catalogue(&text, format).map_err(|e| CliError::parse(path, e))?;
    if cat.is_empty() {
        return Err(CliError::Data(format!("{}: no records", path.display())));
    }
    Ok(cat)
}

#[cfg(test)]
mod tests {
    use super::*;
    use p1f_core::search::naive_classes;

    #[test]
    fn classes_round_trip() {
        let classes = naive_classes(5).unwrap().finish();
        let text = write_classes(5, &classes);
        let (n, back) = parse_classes(&text).unwrap();
        assert_eq!(n, 5);
        assert_eq!(back, classes);
        assert_eq!(write_classes(n, &back), text);
    }

    #[test]
    fn classes_rejects_bad_count() {
        let classes = naive_classes(5).unwrap().finish();
        let text = write_classes(5, &classes).replace("count=1", "count=2");
        assert!(parse_classes(&text).is_err());
        assert!(parse_classes("P1F-CLASSES v1 n=5\n").is_err());
    }

    #[test]
    fn sniffing() {
        let sq = LatinSquare::cyclic(3).to_string();
        assert!(matches!(parse_catalogue(&sq, InputFormat::Auto).unwrap(), Catalogue::Squares(v) if v.len() == 1));
        let opf = LatinSquare::cyclic(5).to_opf().to_string();
        assert!(matches!(
            parse_catalogue(&opf, InputFormat::Auto).unwrap(),
            Catalogue::Factorisations(v) if v.len() == 1
        ));
    }
}
