//! Seeded enumeration with sharding and crash-tolerant checkpoints.
//!
//! The checkpoint at `PATH` is a header line followed by one completed
//! global seed index per line. Each batch first appends its screened
//! classes to `PATH.emit`, closed by an `# end` marker, and only then
//! records its seed indices; both files are fsynced per batch.

use std::collections::BTreeSet;
use std::fs::{File, OpenOptions};
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use p1f_core::search::{naive_classes, SeedSearcher};
use p1f_core::seeds::gen_seeds;
use p1f_core::{ClassRecord, Opf, Screen, SearchStats, SeedSet};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{CliError, CliResult};
use crate::formats::{read_text, sha256_hex, summary, write_classes};

const CHECKPOINT_HEADER: &str = "P1F-CHECKPOINT v1";
pub const DEFAULT_BATCH: usize = 64;

#[derive(Clone, Debug)]
pub struct EnumerateOptions {
    pub n: usize,
    pub shard: (usize, usize),
    pub checkpoint: Option<PathBuf>,
    pub out_dir: PathBuf,
    pub seeds_file: Option<PathBuf>,
    pub human: bool,
    /// Seeds per checkpoint batch.
    pub batch: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct OutputFile {
    pub path: String,
    pub sha256: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub n: usize,
    pub shard_index: usize,
    pub shard_total: usize,
    pub seeds_total: usize,
    pub seeds_in_shard: usize,
    /// Seeds searched by this invocation, as opposed to restored from a
    /// checkpoint.
    pub seeds_searched: usize,
    pub search_nodes: u64,
    pub outputs: Vec<OutputFile>,
    pub wall_seconds: f64,
}

#[derive(Clone, Debug)]
pub struct EnumerateResult {
    pub classes: Vec<ClassRecord>,
    pub summary: String,
    pub manifest: RunManifest,
    pub classes_path: PathBuf,
}

pub fn output_stem(n: usize, shard: (usize, usize)) -> String {
    if shard.1 == 1 {
        format!("enumerate-n{n}")
    } else {
        format!("enumerate-n{n}-s{}of{}", shard.0, shard.1)
    }
}

pub fn parse_shard(s: &str) -> CliResult<(usize, usize)> {
    let (i, m) = s
        .split_once('/')
        .ok_or_else(|| CliError::Usage(format!("shard {s:?} is not of the form i/m")))?;
    let i: usize = i
        .trim()
        .parse()
        .map_err(|_| CliError::Usage(format!("bad shard index in {s:?}")))?;
    let m: usize = m
        .trim()
        .parse()
        .map_err(|_| CliError::Usage(format!("bad shard count in {s:?}")))?;
    if m == 0 || i >= m {
        return Err(CliError::Usage(format!("shard {i}/{m} out of range")));
    }
    Ok((i, m))
}

fn check_order(n: usize) -> CliResult<()> {
    if n < 3 || n % 2 == 0 {
        return Err(CliError::Usage(format!("order {n} must be odd and at least 3")));
    }
    Ok(())
}

pub fn load_or_generate_seeds(n: usize, seeds_file: Option<&Path>) -> CliResult<SeedSet> {
    match seeds_file {
        Some(p) => {
            let set = SeedSet::parse(&read_text(p)?).map_err(|e| CliError::parse(p, e))?;
            if set.order() != n {
                return Err(CliError::Data(format!(
                    "{}: seeds have order {}, expected {n}",
                    p.display(),
                    set.order()
                )));
            }
            Ok(set)
        }
        None => Ok(gen_seeds(n)?),
    }
}

struct Checkpoint {
    path: PathBuf,
    emit_path: PathBuf,
    done: BTreeSet<usize>,
}

fn emit_path(path: &Path) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(".emit");
    PathBuf::from(s)
}

fn sync_append(path: &Path, text: &str) -> CliResult<()> {
    let mut f = OpenOptions::new()
        .create(true)
        .append(true)
        .open(path)
        .map_err(|e| CliError::io(path, e))?;
    f.write_all(text.as_bytes()).map_err(|e| CliError::io(path, e))?;
    f.sync_all().map_err(|e| CliError::io(path, e))
}

impl Checkpoint {
    fn header(n: usize, shard: (usize, usize), seeds: usize) -> String {
        format!("{CHECKPOINT_HEADER} n={n} shard={}/{} seeds={seeds}", shard.0, shard.1)
    }

    /// Opens or creates the checkpoint, restoring already screened classes
    /// into `screen`.
    fn open(path: &Path, header: &str, seeds: usize, screen: &mut Screen) -> CliResult<Self> {
        let corrupt = |msg: String| CliError::Data(format!("corrupt checkpoint {}: {msg}", path.display()));
        let emit_path = emit_path(path);
        let mut done = BTreeSet::new();
        if !path.exists() {
            File::create(&emit_path).map_err(|e| CliError::io(&emit_path, e))?;
            sync_append(path, &format!("{header}\n"))?;
            return Ok(Self {
                path: path.to_path_buf(),
                emit_path,
                done,
            });
        }
        let text = read_text(path)?;
        let mut lines = text.lines();
        if lines.next() != Some(header) {
            return Err(corrupt(format!("header does not match {header:?}")));
        }
        // A final line without its newline was torn by a crash.
        let torn = !text.ends_with('\n');
        let body: Vec<&str> = lines.collect();
        let keep = body.len() - usize::from(torn && !body.is_empty());
        for (k, l) in body[..keep].iter().enumerate() {
            let idx: usize = l
                .trim()
                .parse()
                .map_err(|_| corrupt(format!("line {}: {l:?} is not a seed index", k + 2)))?;
            if idx >= seeds {
                return Err(corrupt(format!("seed index {idx} out of range")));
            }
            done.insert(idx);
        }
        let emit = if emit_path.exists() { read_text(&emit_path)? } else { String::new() };
        // Anything after the last end marker belongs to an interrupted batch.
        let complete = match emit.rfind("# end\n") {
            Some(p) => &emit[..p + "# end\n".len()],
            None => "",
        };
        if complete.len() != emit.len() {
            std::fs::write(&emit_path, complete).map_err(|e| CliError::io(&emit_path, e))?;
        }
        let mut digest: Option<String> = None;
        let mut body = String::new();
        for (k, l) in complete.lines().enumerate() {
            let t = l.trim();
            if t.starts_with('#') {
                if let Some(d) = digest.take() {
                    let f: Opf = body
                        .parse()
                        .map_err(|e| corrupt(format!("emit line {}: {e}", k + 1)))?;
                    screen.insert_with_digest(d, f);
                    body.clear();
                }
                if let Some(d) = t.strip_prefix("# canon ") {
                    digest = Some(d.trim().to_string());
                } else if t != "# end" {
                    return Err(corrupt(format!("emit line {}: unexpected {t:?}", k + 1)));
                }
            } else if digest.is_some() {
                body.push_str(l);
                body.push('\n');
            } else if !t.is_empty() {
                return Err(corrupt(format!("emit line {}: record without digest", k + 1)));
            }
        }
        Ok(Self {
            path: path.to_path_buf(),
            emit_path,
            done,
        })
    }

    fn record(&mut self, batch: &[usize], found: &Screen) -> CliResult<()> {
        let mut emit = String::new();
        for (d, f) in found.entries() {
            emit.push_str(&format!("# canon {d}\n{f}"));
        }
        emit.push_str("# end\n");
        sync_append(&self.emit_path, &emit)?;
        let idx: String = batch.iter().map(|i| format!("{i}\n")).collect();
        sync_append(&self.path, &idx)?;
        self.done.extend(batch);
        Ok(())
    }
}

fn write_file(path: &Path, text: &str) -> CliResult<OutputFile> {
    std::fs::write(path, text).map_err(|e| CliError::io(path, e))?;
    Ok(OutputFile {
        path: path.display().to_string(),
        sha256: sha256_hex(text.as_bytes()),
    })
}

pub fn run_enumerate(opts: &EnumerateOptions) -> CliResult<EnumerateResult> {
    let start = Instant::now();
    let n = opts.n;
    check_order(n)?;
    let (si, sm) = opts.shard;
    if sm == 0 || si >= sm {
        return Err(CliError::Usage(format!("shard {si}/{sm} out of range")));
    }
    let mut screen = Screen::new();
    let mut stats = SearchStats::default();
    let (seeds_total, seeds_in_shard, seeds_searched);
    if n == 3 {
        // Too small for seeds: shard 0 searches everything directly.
        if si == 0 {
            screen = naive_classes(n)?;
        }
        seeds_total = 0;
        seeds_in_shard = 0;
        seeds_searched = 0;
    } else {
        let all = load_or_generate_seeds(n, opts.seeds_file.as_deref())?;
        seeds_total = all.len();
        let mine: Vec<usize> = (si..seeds_total).step_by(sm).collect();
        seeds_in_shard = mine.len();
        let mut ckpt = match &opts.checkpoint {
            Some(p) => Some(Checkpoint::open(
                p,
                &Checkpoint::header(n, opts.shard, seeds_total),
                seeds_total,
                &mut screen,
            )?),
            None => None,
        };
        if let Some(c) = &ckpt {
            if let Some(&bad) = c.done.iter().find(|&&i| i % sm != si) {
                return Err(CliError::Data(format!(
                    "corrupt checkpoint {}: seed {bad} is not in shard {si}/{sm}",
                    c.path.display()
                )));
            }
        }
        let todo: Vec<usize> = mine
            .into_iter()
            .filter(|i| ckpt.as_ref().is_none_or(|c| !c.done.contains(i)))
            .collect();
        seeds_searched = todo.len();
        let searcher = SeedSearcher::new(n)?;
        let mut finished = seeds_in_shard - todo.len();
        for batch in todo.chunks(opts.batch.max(1)) {
            let parts: Vec<(Screen, SearchStats)> = batch
                .par_iter()
                .map(|&i| searcher.run(&all.seeds()[i].opf))
                .collect();
            let mut found = Screen::new();
            for (s, st) in parts {
                found.merge(s);
                stats.merge(&st);
            }
            if let Some(c) = ckpt.as_mut() {
                c.record(batch, &found)?;
            }
            screen.merge(found);
            finished += batch.len();
            if opts.human {
                eprintln!(
                    "seeds {finished}/{seeds_in_shard}  classes so far {}  {:.1}s",
                    screen.len(),
                    start.elapsed().as_secs_f64()
                );
            }
        }
    }
    let classes = screen.finish();
    std::fs::create_dir_all(&opts.out_dir).map_err(|e| CliError::io(&opts.out_dir, e))?;
    let stem = output_stem(n, opts.shard);
    let classes_path = opts.out_dir.join(format!("{stem}.classes"));
    let summary_text = summary(n, opts.shard, seeds_in_shard, &classes);
    let outputs = vec![
        write_file(&classes_path, &write_classes(n, &classes))?,
        write_file(&opts.out_dir.join(format!("{stem}.summary")), &summary_text)?,
    ];
    let manifest = RunManifest {
        command: "enumerate".into(),
        n,
        shard_index: si,
        shard_total: sm,
        seeds_total,
        seeds_in_shard,
        seeds_searched,
        search_nodes: stats.nodes,
        outputs,
        wall_seconds: start.elapsed().as_secs_f64(),
    };
    let json = serde_json::to_string_pretty(&manifest).map_err(|e| CliError::Internal(e.to_string()))?;
    let mpath = opts.out_dir.join(format!("{stem}.manifest.json"));
    std::fs::write(&mpath, json + "\n").map_err(|e| CliError::io(&mpath, e))?;
    Ok(EnumerateResult {
        classes,
        summary: summary_text,
        manifest,
        classes_path,
    })
}

/// Unions class files and re-screens every record by its recomputed
/// digest, keeping the least representative. Idempotent.
pub fn merge_classes(inputs: &[(PathBuf, String)]) -> CliResult<(usize, Vec<ClassRecord>)> {
    let mut n = None;
    let mut screen = Screen::new();
    for (path, text) in inputs {
        let (m, recs) = crate::formats::parse_classes(text).map_err(|e| CliError::parse(path, e))?;
        if *n.get_or_insert(m) != m {
            return Err(CliError::Data(format!("{}: order {m} differs from earlier inputs", path.display())));
        }
        let recomputed: Vec<String> = recs
            .par_iter()
            .map(|r| p1f_core::search::class_digest(&r.representative))
            .collect();
        for (r, d) in recs.into_iter().zip(recomputed) {
            if d != r.digest {
                return Err(CliError::Data(format!(
                    "{}: stored digest {} does not match its record",
                    path.display(),
                    r.digest
                )));
            }
            screen.insert_with_digest(d, r.representative);
        }
    }
    let n = n.ok_or_else(|| CliError::Usage("merge needs at least one input".into()))?;
    Ok((n, screen.finish()))
}
