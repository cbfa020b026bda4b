//! Species and isotopy classification, invariant reports and digests.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use p1f_core::canon::{canonize, latin_form, ColouredGraph};
use p1f_core::latin::p_invariant;
use p1f_core::{ColourMode, Conjugate, InvariantRecord, LatinSquare};
use rayon::prelude::*;

use crate::error::CliResult;
use crate::formats::{sha256_hex, Catalogue};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpeciesRecord {
    pub digest: String,
    pub nu: usize,
    pub autotopisms: u128,
    pub autoparatopisms: u128,
    pub symmetric: bool,
    pub representative: LatinSquare,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Classification {
    /// Sorted by digest.
    pub species: Vec<SpeciesRecord>,
    /// Distinct isotopism classes of row-Hamiltonian squares among all
    /// conjugates of the species.
    pub isotopism_classes: usize,
    pub atomic: usize,
}

pub fn classify(squares: &[LatinSquare]) -> Classification {
    let digests: Vec<String> = squares
        .par_iter()
        .map(|l| latin_form(l, ColourMode::LsSpecies).digest())
        .collect();
    let mut reps: BTreeMap<String, &LatinSquare> = BTreeMap::new();
    for (d, l) in digests.into_iter().zip(squares) {
        reps.entry(d).or_insert(l);
    }
    let reps: Vec<(String, &LatinSquare)> = reps.into_iter().collect();
    let done: Vec<(SpeciesRecord, Vec<String>)> = reps
        .par_iter()
        .map(|(d, l)| {
            let iso: Vec<String> = Conjugate::ALL
                .iter()
                .map(|&x| l.conjugate(x))
                .filter(|c| c.is_row_hamiltonian())
                .map(|c| latin_form(&c, ColourMode::LsIsotopy).digest())
                .collect();
            let rec = SpeciesRecord {
                digest: d.clone(),
                nu: l.nu(),
                autotopisms: l.autotopism_group_order(),
                autoparatopisms: l.autoparatopism_group_order(),
                symmetric: l.is_symmetric(),
                representative: (*l).clone(),
            };
            (rec, iso)
        })
        .collect();
    let mut iso = BTreeSet::new();
    let mut species = Vec::with_capacity(done.len());
    for (rec, ds) in done {
        iso.extend(ds);
        species.push(rec);
    }
    let atomic = species.iter().filter(|s| s.nu == 6).count();
    Classification {
        species,
        isotopism_classes: iso.len(),
        atomic,
    }
}

/// (count, autotopisms, autoparatopisms, ν), ordered by the last three.
pub fn symmetry_histogram(c: &Classification) -> Vec<(usize, u128, u128, usize)> {
    let mut h: BTreeMap<(u128, u128, usize), usize> = BTreeMap::new();
    for s in &c.species {
        *h.entry((s.autotopisms, s.autoparatopisms, s.nu)).or_default() += 1;
    }
    h.into_iter().map(|((a, p, nu), k)| (k, a, p, nu)).collect()
}

pub fn classify_report(c: &Classification) -> String {
    let mut s = String::new();
    writeln!(
        s,
        "species={} isotopism_classes={} atomic={}",
        c.species.len(),
        c.isotopism_classes,
        c.atomic
    )
    .unwrap();
    for r in &c.species {
        writeln!(
            s,
            "species {} nu={} autotopisms={} autoparatopisms={} symmetric={}",
            r.digest, r.nu, r.autotopisms, r.autoparatopisms, r.symmetric
        )
        .unwrap();
    }
    writeln!(s, "# count, autotopisms, autoparatopisms, nu").unwrap();
    for (k, a, p, nu) in symmetry_histogram(c) {
        writeln!(s, "hist count={k} autotopisms={a} autoparatopisms={p} nu={nu}").unwrap();
    }
    s
}

fn text_digest(s: &str) -> String {
    sha256_hex(s.as_bytes())[..16].to_string()
}

fn train_text(r: &InvariantRecord) -> String {
    r.train.iter().map(|(d, k)| format!("{d}^{k}")).collect::<Vec<_>>().join(",")
}

fn cycles_text(r: &InvariantRecord) -> String {
    r.cycles.iter().map(|c| c.to_string()).collect::<Vec<_>>().join(",")
}

fn lists_text(r: &InvariantRecord) -> String {
    r.cycle_lists
        .iter()
        .map(|l| l.iter().map(|c| c.to_string()).collect::<Vec<_>>().join(","))
        .collect::<Vec<_>>()
        .join(";")
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InvariantRow {
    pub invariants: InvariantRecord,
    pub p: Option<u128>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Discrimination {
    pub items: usize,
    pub species: usize,
    pub n: usize,
    pub i: usize,
    pub c: usize,
    pub s: usize,
    pub ic: usize,
    pub nic: usize,
    pub is: usize,
    pub p: Option<usize>,
}

pub fn invariant_rows(cat: &Catalogue) -> CliResult<Vec<InvariantRow>> {
    let squares = cat.squares()?;
    let ps: Vec<Option<u128>> = match cat {
        Catalogue::Factorisations(v) => v
            .par_iter()
            .map(|f| p_invariant(f).map(Some))
            .collect::<p1f_core::Result<_>>()?,
        Catalogue::Squares(v) => vec![None; v.len()],
    };
    Ok(squares
        .par_iter()
        .zip(ps)
        .map(|(l, p)| InvariantRow {
            invariants: l.invariants(),
            p,
        })
        .collect())
}

fn distinct<T: Ord, F: Fn(&InvariantRow) -> T>(rows: &[InvariantRow], f: F) -> usize {
    rows.iter().map(f).collect::<BTreeSet<T>>().len()
}

pub fn discrimination(cat: &Catalogue, rows: &[InvariantRow]) -> CliResult<Discrimination> {
    let squares = cat.squares()?;
    let species: BTreeSet<String> = squares
        .par_iter()
        .map(|l| latin_form(l, ColourMode::LsSpecies).digest())
        .collect::<Vec<_>>()
        .into_iter()
        .collect();
    let inv = |r: &InvariantRow| r.invariants.clone();
    Ok(Discrimination {
        items: rows.len(),
        species: species.len(),
        n: distinct(rows, |r| inv(r).transversals),
        i: distinct(rows, |r| inv(r).train),
        c: distinct(rows, |r| inv(r).cycles),
        s: distinct(rows, |r| inv(r).cycle_lists),
        ic: distinct(rows, |r| (inv(r).train, inv(r).cycles)),
        nic: distinct(rows, |r| (inv(r).transversals, inv(r).train, inv(r).cycles)),
        is: distinct(rows, |r| (inv(r).train, inv(r).cycle_lists)),
        p: rows.iter().all(|r| r.p.is_some()).then(|| distinct(rows, |r| r.p)),
    })
}

pub fn invariants_report(rows: &[InvariantRow], d: &Discrimination) -> String {
    let mut s = String::new();
    for (k, r) in rows.iter().enumerate() {
        let inv = &r.invariants;
        write!(
            s,
            "item {k} nu={} N={} I={} C={} S={}",
            inv.nu,
            inv.transversals,
            text_digest(&train_text(inv)),
            text_digest(&cycles_text(inv)),
            text_digest(&lists_text(inv)),
        )
        .unwrap();
        if let Some(p) = r.p {
            write!(s, " P={p}").unwrap();
        }
        s.push('\n');
    }
    write!(
        s,
        "distinct items={} species={} N={} I={} C={} S={} IC={} NIC={} IS={}",
        d.items, d.species, d.n, d.i, d.c, d.s, d.ic, d.nic, d.is
    )
    .unwrap();
    if let Some(p) = d.p {
        write!(s, " P={p}").unwrap();
    }
    s.push('\n');
    writeln!(s, "IS_separates_species={}", d.is == d.species).unwrap();
    s
}

/// One line per item: digest and automorphism group order in `mode`.
pub fn canon_report(cat: &Catalogue, mode: ColourMode) -> CliResult<String> {
    let graphs: Vec<ColouredGraph> = match (cat, mode) {
        (Catalogue::Factorisations(v), ColourMode::P1f | ColourMode::P1fDirect) => {
            v.iter().map(|f| ColouredGraph::from_opf(f, mode)).collect()
        }
        (Catalogue::Factorisations(_), _) => cat.squares()?.iter().map(|l| ColouredGraph::from_latin(l, mode)).collect(),
        (Catalogue::Squares(v), ColourMode::P1f | ColourMode::P1fDirect) => {
            v.iter().map(|l| ColouredGraph::from_opf(&l.to_opf(), mode)).collect()
        }
        (Catalogue::Squares(v), _) => v.iter().map(|l| ColouredGraph::from_latin(l, mode)).collect(),
    };
    let lines: Vec<String> = graphs
        .par_iter()
        .map(|g| {
            let c = canonize(g);
            format!("{} aut={}", c.form.digest(), c.group_order)
        })
        .collect();
    Ok(lines.into_iter().map(|l| l + "\n").collect())
}
