//! Minimal representatives of the isomorphism classes of perfect 4-factor
//! partial factorisations.

use std::fmt::Write as _;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::factor::{parse_header, perfect_pair_unchecked, standard_prefix, OneFactor, Opf};
use crate::order::MinimalityTester;
use crate::search::{class_digest, perfect_extensions};

pub const SEED_HEADER: &str = "P1F-SEEDS v1";

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Seed {
    pub opf: Opf,
    /// Class digest of the unordered 4-factor object.
    pub digest: String,
}

/// Seeds sorted by digest.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SeedSet {
    n: usize,
    seeds: Vec<Seed>,
}

/// Every `f3` extending the standard pair with `[f1, f2, f3]` minimal.
pub fn third_factors(n: usize, tester: &MinimalityTester) -> Result<Vec<OneFactor>> {
    let prefix = standard_prefix(n)?;
    let (f1, f2) = (prefix.factor(0).image(), prefix.factor(1).image());
    Ok(perfect_extensions(&prefix)
        .into_iter()
        .filter(|t| tester.is_minimal_raw(&[f1, f2, t.image()]))
        .collect())
}

/// One minimal representative per isomorphism class of perfect 4-factor
/// OPFs of order `n`.
pub fn gen_seeds(n: usize) -> Result<SeedSet> {
    if n < 5 || n % 2 == 0 {
        return Err(Error::BadOrder(n, 5));
    }
    let tester = MinimalityTester::for_order(n)?;
    let prefix = standard_prefix(n)?;
    let pool = perfect_extensions(&prefix);
    let (f1, f2) = (prefix.factor(0).image(), prefix.factor(1).image());
    let thirds: Vec<&OneFactor> = pool
        .iter()
        .filter(|t| tester.is_minimal_raw(&[f1, f2, t.image()]))
        .collect();
    debug_assert_eq!(thirds.len(), third_factors(n, &tester)?.len());
    let found: Vec<(String, Opf)> = thirds
        .par_iter()
        .flat_map_iter(|f3| {
            let p3 = prefix.append((*f3).clone()).expect("perfect extension is disjoint");
            let raw3: Vec<&[u8]> = p3.factors().iter().map(|f| f.image()).collect();
            let fourths: Vec<OneFactor> = pool
                .iter()
                .filter(|f4| perfect_pair_unchecked(f3.image(), f4.image()))
                .cloned()
                .filter(|f4| {
                    let mut raw = raw3.clone();
                    raw.push(f4.image());
                    tester.is_minimal_raw(&raw)
                })
                .collect();
            fourths.into_iter().map(move |f4| {
                let p4 = p3.append(f4).expect("perfect extension is disjoint");
                (class_digest(&p4), p4)
            })
        })
        .collect();
    Ok(SeedSet::from_found(n, found))
}

impl SeedSet {
    /// Keeps the first occurrence of each digest, then sorts by digest.
    fn from_found(n: usize, mut found: Vec<(String, Opf)>) -> Self {
        found.sort_by(|a, b| a.0.cmp(&b.0));
        found.dedup_by(|later, first| later.0 == first.0);
        Self {
            n,
            seeds: found
                .into_iter()
                .map(|(digest, opf)| Seed { opf, digest })
                .collect(),
        }
    }

    pub fn new(n: usize, mut seeds: Vec<Seed>) -> Self {
        seeds.sort_by(|a, b| a.digest.cmp(&b.digest));
        Self { n, seeds }
    }

    pub fn order(&self) -> usize {
        self.n
    }

    pub fn seeds(&self) -> &[Seed] {
        &self.seeds
    }

    pub fn len(&self) -> usize {
        self.seeds.len()
    }

    pub fn is_empty(&self) -> bool {
        self.seeds.is_empty()
    }

    /// Members whose position is `index` modulo `total`.
    pub fn shard(&self, index: usize, total: usize) -> Result<SeedSet> {
        if total == 0 || index >= total {
            return Err(Error::BadShard { index, total });
        }
        Ok(Self {
            n: self.n,
            seeds: self.seeds.iter().skip(index).step_by(total).cloned().collect(),
        })
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        writeln!(s, "{SEED_HEADER} n={} count={}", self.n, self.seeds.len()).unwrap();
        for seed in &self.seeds {
            writeln!(s, "# canon {}", seed.digest).unwrap();
            write!(s, "{}", seed.opf).unwrap();
        }
        s
    }

    pub fn parse(text: &str) -> Result<SeedSet> {
        let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
        let bad = |line: usize, msg: &str| Error::Parse {
            line: line + 1,
            msg: msg.to_string(),
        };
        let (hl, header) = lines.next().ok_or_else(|| bad(0, "empty seed file"))?;
        let rest = header
            .strip_prefix(SEED_HEADER)
            .ok_or_else(|| bad(hl, "missing seed file header"))?;
        let mut n = None;
        let mut count = None;
        for tok in rest.split_whitespace() {
            if let Some(v) = tok.strip_prefix("n=") {
                n = v.parse::<usize>().ok();
            } else if let Some(v) = tok.strip_prefix("count=") {
                count = v.parse::<usize>().ok();
            } else {
                return Err(bad(hl, "unexpected header field"));
            }
        }
        let (n, count) = n.zip(count).ok_or_else(|| bad(hl, "header needs n= and count="))?;
        let mut seeds = Vec::with_capacity(count);
        while let Some((cl, line)) = lines.next() {
            let digest = line
                .trim()
                .strip_prefix("# canon ")
                .ok_or_else(|| bad(cl, "expected '# canon <digest>'"))?
                .trim()
                .to_string();
            let (ol, oh) = lines.next().ok_or_else(|| bad(cl, "missing record"))?;
            let (rn, a) = parse_header(oh).ok_or_else(|| bad(ol, "bad record header"))?;
            if rn != n {
                return Err(bad(ol, "record order differs from file header"));
            }
            let mut body = String::from(oh);
            body.push('\n');
            for _ in 0..a {
                let (_, l) = lines.next().ok_or_else(|| bad(ol, "truncated record"))?;
                body.push_str(l);
                body.push('\n');
            }
            let opf: Opf = body.parse().map_err(|e: Error| bad(ol, &e.to_string()))?;
            seeds.push(Seed { opf, digest });
        }
        if seeds.len() != count {
            return Err(bad(hl, &format!("header count {count}, found {}", seeds.len())));
        }
        if seeds.windows(2).any(|w| w[0].digest >= w[1].digest) {
            return Err(bad(hl, "seeds not sorted by digest"));
        }
        Ok(Self { n, seeds })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::factor::is_perfect;
    use crate::order::is_minimal;

    #[test]
    fn seeds_are_minimal_and_distinct() {
        let s = gen_seeds(5).unwrap();
        assert!(!s.is_empty());
        for seed in s.seeds() {
            assert_eq!(seed.opf.len(), 4);
            assert!(is_perfect(&seed.opf));
            assert!(is_minimal(&seed.opf).unwrap());
            assert_eq!(class_digest(&seed.opf), seed.digest);
        }
        assert!(s.seeds().windows(2).all(|w| w[0].digest < w[1].digest));
    }

    #[test]
    fn bad_orders() {
        assert!(gen_seeds(3).is_err());
        assert!(gen_seeds(6).is_err());
    }

    #[test]
    fn shards_partition() {
        let s = gen_seeds(7).unwrap();
        assert_eq!(s.shard(0, 1).unwrap(), s);
        let parts: Vec<SeedSet> = (0..3).map(|i| s.shard(i, 3).unwrap()).collect();
        let sizes: Vec<usize> = parts.iter().map(|p| p.len()).collect();
        assert!(sizes.iter().max().unwrap() - sizes.iter().min().unwrap() <= 1);
        let all: Vec<Seed> = parts.iter().flat_map(|p| p.seeds().iter().cloned()).collect();
        assert_eq!(SeedSet::new(7, all), s);
        assert!(s.shard(3, 3).is_err());
        assert!(s.shard(0, 0).is_err());
    }

    #[test]
    fn text_round_trip() {
        let s = gen_seeds(7).unwrap();
        let t = s.to_text();
        assert!(t.starts_with(&format!("P1F-SEEDS v1 n=7 count={}", s.len())));
        assert_eq!(SeedSet::parse(&t).unwrap(), s);
        assert!(SeedSet::parse("P1F-SEEDS v1 n=7 count=1\n").is_err());
    }
}
