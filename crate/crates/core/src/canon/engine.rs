//! Canonical labelling of coloured graphs by equitable refinement,
//! individualisation and backtracking, with automorphism pruning.
//!
//! The canonical leaf is the one minimising (refinement trace sequence,
//! relabelled adjacency bitmap). The trace of a node is a hash of the splits
//! performed while refining it, so it is invariant under relabelling and
//! lets whole subtrees be skipped once a better one is known.

use std::cmp::Ordering;
use std::collections::VecDeque;

use super::graph::ColouredGraph;
use super::CanonicalForm;

#[derive(Clone, Debug)]
struct Partition {
    /// position -> vertex
    lab: Vec<u32>,
    /// vertex -> position
    pos: Vec<u32>,
    /// vertex -> start position of its cell
    start: Vec<u32>,
    /// cell start -> cell length
    len: Vec<u32>,
    cells: usize,
}

impl Partition {
    /// One cell per colour, cells ordered by colour value.
    fn by_colour(g: &ColouredGraph) -> (Self, Vec<u32>) {
        let nv = g.vertex_count();
        let mut lab: Vec<u32> = (0..nv as u32).collect();
        lab.sort_by_key(|&v| (g.colour(v as usize), v));
        let mut pos = vec![0u32; nv];
        let mut start = vec![0u32; nv];
        let mut len = vec![0u32; nv];
        let mut starts = Vec::new();
        let mut i = 0;
        while i < nv {
            let c = g.colour(lab[i] as usize);
            let s = i;
            while i < nv && g.colour(lab[i] as usize) == c {
                pos[lab[i] as usize] = i as u32;
                start[lab[i] as usize] = s as u32;
                i += 1;
            }
            len[s] = (i - s) as u32;
            starts.push(s as u32);
        }
        let cells = starts.len();
        (
            Self {
                lab,
                pos,
                start,
                len,
                cells,
            },
            starts,
        )
    }

    fn is_discrete(&self) -> bool {
        self.cells == self.lab.len()
    }

    /// Moves `v` to the front of its cell as a new singleton cell and
    /// returns that cell's start.
    fn individualize(&mut self, v: u32) -> u32 {
        let c = self.start[v as usize];
        let l = self.len[c as usize];
        debug_assert!(l > 1);
        let pv = self.pos[v as usize];
        let other = self.lab[c as usize];
        self.lab.swap(c as usize, pv as usize);
        self.pos[other as usize] = pv;
        self.pos[v as usize] = c;
        self.len[c as usize] = 1;
        self.len[c as usize + 1] = l - 1;
        for i in c + 1..c + l {
            self.start[self.lab[i as usize] as usize] = c + 1;
        }
        self.cells += 1;
        c
    }
}

#[inline]
fn mix(h: u64, x: u64) -> u64 {
    let mut z = h ^ x.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

struct Refiner {
    count: Vec<u32>,
    touched: Vec<u32>,
    touched_cells: Vec<u32>,
    cell_mark: Vec<bool>,
    queue: VecDeque<u32>,
    inq: Vec<bool>,
    buf: Vec<(u32, u32)>,
    frags: Vec<(u32, u32)>,
    splitter: Vec<u32>,
}

impl Refiner {
    fn new(nv: usize) -> Self {
        Self {
            count: vec![0; nv],
            touched: Vec::new(),
            touched_cells: Vec::new(),
            cell_mark: vec![false; nv],
            queue: VecDeque::new(),
            inq: vec![false; nv],
            buf: Vec::new(),
            frags: Vec::new(),
            splitter: Vec::new(),
        }
    }

    /// Refines `p` to the coarsest equitable partition finer than it, using
    /// the cells starting at `init` as the first splitters. Returns the
    /// trace hash.
    fn refine(&mut self, g: &ColouredGraph, p: &mut Partition, init: &[u32]) -> u64 {
        let mut h = 0x5151_F00D_u64;
        for &c in init {
            if !self.inq[c as usize] {
                self.inq[c as usize] = true;
                self.queue.push_back(c);
            }
        }
        while let Some(w) = self.queue.pop_front() {
            self.inq[w as usize] = false;
            if p.is_discrete() {
                continue;
            }
            h = mix(h, w as u64);
            let wl = p.len[w as usize] as usize;
            self.splitter.clear();
            self.splitter
                .extend_from_slice(&p.lab[w as usize..w as usize + wl]);
            for &x in &self.splitter {
                for &y in g.neighbours(x as usize) {
                    if self.count[y as usize] == 0 {
                        self.touched.push(y);
                        let c = p.start[y as usize];
                        if !self.cell_mark[c as usize] && p.len[c as usize] > 1 {
                            self.cell_mark[c as usize] = true;
                            self.touched_cells.push(c);
                        }
                    }
                    self.count[y as usize] += 1;
                }
            }
            self.touched_cells.sort_unstable();
            for k in 0..self.touched_cells.len() {
                let c = self.touched_cells[k];
                h = self.split(p, c, h);
            }
            for &c in &self.touched_cells {
                self.cell_mark[c as usize] = false;
            }
            for &y in &self.touched {
                self.count[y as usize] = 0;
            }
            self.touched.clear();
            self.touched_cells.clear();
        }
        mix(h, p.cells as u64)
    }

    fn split(&mut self, p: &mut Partition, c: u32, mut h: u64) -> u64 {
        let cu = c as usize;
        let l = p.len[cu] as usize;
        self.buf.clear();
        let mut lo = u32::MAX;
        let mut hi = 0;
        for &v in &p.lab[cu..cu + l] {
            let k = self.count[v as usize];
            lo = lo.min(k);
            hi = hi.max(k);
            self.buf.push((k, v));
        }
        if lo == hi {
            return h;
        }
        self.buf.sort_unstable();
        self.frags.clear();
        let mut i = 0;
        while i < l {
            let k = self.buf[i].0;
            let s = i;
            while i < l && self.buf[i].0 == k {
                let v = self.buf[i].1;
                p.lab[cu + i] = v;
                p.pos[v as usize] = (cu + i) as u32;
                p.start[v as usize] = (cu + s) as u32;
                i += 1;
            }
            p.len[cu + s] = (i - s) as u32;
            self.frags.push(((cu + s) as u32, (i - s) as u32));
            h = mix(h, ((k as u64) << 32) | (i - s) as u64);
        }
        h = mix(h, c as u64);
        p.cells += self.frags.len() - 1;
        if self.inq[cu] {
            for &(s, _) in &self.frags[1..] {
                self.inq[s as usize] = true;
                self.queue.push_back(s);
            }
        } else {
            let mut largest = 0;
            for (k, &(_, len)) in self.frags.iter().enumerate() {
                if len > self.frags[largest].1 {
                    largest = k;
                }
            }
            for (k, &(s, _)) in self.frags.iter().enumerate() {
                if k != largest {
                    self.inq[s as usize] = true;
                    self.queue.push_back(s);
                }
            }
        }
        h
    }

    /// Non-singleton cell joined non-trivially to the most other
    /// non-singleton cells; first such cell on ties.
    fn target_cell(&mut self, g: &ColouredGraph, p: &Partition) -> u32 {
        let nv = p.lab.len();
        let mut best = u32::MAX;
        let mut best_joins = -1i64;
        let mut c = 0usize;
        while c < nv {
            let l = p.len[c] as usize;
            if l > 1 {
                let x = p.lab[c];
                for &y in g.neighbours(x as usize) {
                    let s = p.start[y as usize];
                    if self.count[s as usize] == 0 {
                        self.touched_cells.push(s);
                    }
                    self.count[s as usize] += 1;
                }
                let mut joins = 0i64;
                for &s in &self.touched_cells {
                    let sl = p.len[s as usize];
                    if sl > 1 && self.count[s as usize] < sl {
                        joins += 1;
                    }
                    self.count[s as usize] = 0;
                }
                self.touched_cells.clear();
                if joins > best_joins {
                    best_joins = joins;
                    best = c as u32;
                }
            }
            c += l;
        }
        best
    }
}

#[derive(Clone)]
struct Leaf {
    lab: Vec<u32>,
    graph: Vec<u64>,
    path: Vec<u32>,
    inv: Vec<u64>,
}

enum Flow {
    Continue,
    /// Unwind to the node on the current path at this depth.
    Jump(usize),
}

/// Statistics of one canonisation.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct SearchCounters {
    pub nodes: u64,
    pub leaves: u64,
}

/// Result of canonical labelling.
#[derive(Clone, Debug)]
pub struct Canonical {
    pub form: CanonicalForm,
    /// `labeling[i]` is the vertex that receives canonical label `i`.
    pub labeling: Vec<usize>,
    /// Order of the colour-preserving automorphism group.
    pub group_order: u128,
    /// Automorphisms found, as vertex permutations.
    pub generators: Vec<Vec<usize>>,
    pub counters: SearchCounters,
}

struct Search<'a> {
    g: &'a ColouredGraph,
    words: usize,
    refiner: Refiner,
    path: Vec<u32>,
    inv: Vec<u64>,
    first: Option<Leaf>,
    best: Option<Leaf>,
    /// Bumped whenever `best` is replaced.
    best_version: u64,
    gens: Vec<Vec<u32>>,
    counters: SearchCounters,
}

fn find(parent: &mut [u32], mut x: u32) -> u32 {
    while parent[x as usize] != x {
        let up = parent[parent[x as usize] as usize];
        parent[x as usize] = up;
        x = up;
    }
    x
}

fn common_prefix(a: &[u32], b: &[u32]) -> usize {
    a.iter().zip(b).take_while(|(x, y)| x == y).count()
}

impl<'a> Search<'a> {
    fn new(g: &'a ColouredGraph) -> Self {
        let nv = g.vertex_count();
        Self {
            g,
            words: nv.div_ceil(64),
            refiner: Refiner::new(nv),
            path: Vec::new(),
            inv: Vec::new(),
            first: None,
            best: None,
            best_version: 0,
            gens: Vec::new(),
            counters: SearchCounters::default(),
        }
    }

    /// Union-find forest of the orbits of the generators fixing `fixed`
    /// pointwise.
    fn orbits_fixing(&self, fixed: &[u32]) -> Vec<u32> {
        let nv = self.g.vertex_count();
        let mut parent: Vec<u32> = (0..nv as u32).collect();
        for gen in &self.gens {
            if fixed.iter().any(|&v| gen[v as usize] != v) {
                continue;
            }
            for (x, &y) in gen.iter().enumerate() {
                let (a, b) = (find(&mut parent, x as u32), find(&mut parent, y));
                if a != b {
                    let (lo, hi) = (a.min(b), a.max(b));
                    parent[hi as usize] = lo;
                }
            }
        }
        parent
    }

    fn leaf_graph(&self, lab: &[u32]) -> Vec<u64> {
        let nv = lab.len();
        let mut inv = vec![0u32; nv];
        for (i, &v) in lab.iter().enumerate() {
            inv[v as usize] = i as u32;
        }
        let mut bm = vec![0u64; nv * self.words];
        for (i, &v) in lab.iter().enumerate() {
            let row = &mut bm[i * self.words..(i + 1) * self.words];
            for &y in self.g.neighbours(v as usize) {
                let j = inv[y as usize] as usize;
                row[j / 64] |= 1 << (j % 64);
            }
        }
        bm
    }

    fn record_automorphism(&mut self, from: &[u32], to: &[u32]) {
        let mut gen = vec![0u32; from.len()];
        for (&a, &b) in from.iter().zip(to) {
            gen[a as usize] = b;
        }
        debug_assert!(self
            .g
            .is_automorphism(&gen.iter().map(|&x| x as usize).collect::<Vec<_>>()));
        if gen.iter().enumerate().any(|(i, &x)| i as u32 != x) {
            self.gens.push(gen);
        }
    }

    fn leaf(&mut self, p: &Partition, eq_first: bool, cmp_best: Ordering) -> Flow {
        self.counters.leaves += 1;
        let graph = self.leaf_graph(&p.lab);
        let Some(first) = &self.first else {
            let leaf = Leaf {
                lab: p.lab.clone(),
                graph,
                path: self.path.clone(),
                inv: self.inv.clone(),
            };
            self.first = Some(leaf.clone());
            self.best = Some(leaf);
            return Flow::Continue;
        };
        if eq_first && graph == first.graph {
            let (from, jump) = (first.lab.clone(), common_prefix(&self.path, &first.path));
            self.record_automorphism(&from, &p.lab);
            return Flow::Jump(jump);
        }
        let best = self.best.as_ref().expect("best leaf set with first");
        let replace = match cmp_best {
            Ordering::Less => true,
            Ordering::Greater => false,
            Ordering::Equal => match graph.cmp(&best.graph) {
                Ordering::Less => true,
                Ordering::Greater => false,
                Ordering::Equal => {
                    let (from, jump) = (best.lab.clone(), common_prefix(&self.path, &best.path));
                    self.record_automorphism(&from, &p.lab);
                    return Flow::Jump(jump);
                }
            },
        };
        if replace {
            self.best_version += 1;
            self.best = Some(Leaf {
                lab: p.lab.clone(),
                graph,
                path: self.path.clone(),
                inv: self.inv.clone(),
            });
        }
        Flow::Continue
    }

    fn visit(&mut self, p: &Partition, eq_first: bool, mut cmp_best: Ordering) -> Flow {
        self.counters.nodes += 1;
        if p.is_discrete() {
            return self.leaf(p, eq_first, cmp_best);
        }
        let level = self.path.len();
        let tc = self.refiner.target_cell(self.g, p) as usize;
        let cell: Vec<u32> = p.lab[tc..tc + p.len[tc] as usize].to_vec();
        let mut explored: Vec<u32> = Vec::new();
        let mut parent: Vec<u32> = Vec::new();
        let mut gens_seen = usize::MAX;
        for &w in &cell {
            if !explored.is_empty() {
                if self.gens.len() != gens_seen {
                    parent = self.orbits_fixing(&self.path);
                    gens_seen = self.gens.len();
                }
                let rw = find(&mut parent, w);
                if explored.iter().any(|&x| find(&mut parent, x) == rw) {
                    continue;
                }
            }
            explored.push(w);

            let mut child = p.clone();
            let c = child.individualize(w);
            let x = self.refiner.refine(self.g, &mut child, &[c]);

            let (child_eq_first, child_cmp) = match (&self.first, &self.best) {
                (Some(first), Some(best)) => {
                    let ef = eq_first && first.inv.get(level + 1) == Some(&x);
                    let cb = match cmp_best {
                        Ordering::Equal => match best.inv.get(level + 1) {
                            Some(b) => x.cmp(b),
                            None => Ordering::Greater,
                        },
                        other => other,
                    };
                    (ef, cb)
                }
                _ => (true, Ordering::Equal),
            };
            if !child_eq_first && child_cmp == Ordering::Greater {
                continue;
            }

            self.path.push(w);
            self.inv.push(x);
            let version = self.best_version;
            let flow = self.visit(&child, child_eq_first, child_cmp);
            self.path.pop();
            self.inv.pop();
            // A new best below this node shares its trace so far.
            if self.best_version != version {
                cmp_best = Ordering::Equal;
            }
            if let Flow::Jump(to) = flow {
                if to < level {
                    return flow;
                }
            }
        }
        Flow::Continue
    }

    fn run(mut self) -> Canonical {
        let nv = self.g.vertex_count();
        let (mut root, starts) = Partition::by_colour(self.g);
        let x = if nv == 0 {
            0
        } else {
            self.refiner.refine(self.g, &mut root, &starts)
        };
        self.inv.push(x);
        if nv > 0 {
            self.visit(&root, true, Ordering::Equal);
        }

        let (first_path, best_lab, best_graph) = match (&self.first, &self.best) {
            (Some(f), Some(b)) => (f.path.clone(), b.lab.clone(), b.graph.clone()),
            _ => (Vec::new(), Vec::new(), Vec::new()),
        };
        let mut group_order: u128 = 1;
        for k in 0..first_path.len() {
            let mut parent = self.orbits_fixing(&first_path[..k]);
            let r = find(&mut parent, first_path[k]);
            let size = (0..nv as u32).filter(|&v| find(&mut parent, v) == r).count();
            group_order = group_order
                .checked_mul(size as u128)
                .expect("automorphism group order exceeds u128");
        }

        let mut classes: Vec<(u32, u32)> = Vec::new();
        for &v in &best_lab {
            let c = self.g.colour(v as usize);
            match classes.last_mut() {
                Some((col, cnt)) if *col == c => *cnt += 1,
                _ => classes.push((c, 1)),
            }
        }
        let form = CanonicalForm::encode(nv, &classes, &best_graph);
        Canonical {
            form,
            labeling: best_lab.iter().map(|&v| v as usize).collect(),
            group_order,
            generators: self
                .gens
                .iter()
                .map(|g| g.iter().map(|&x| x as usize).collect())
                .collect(),
            counters: self.counters,
        }
    }
}

/// Canonical labelling, form, and automorphism group order of `g`.
pub fn canonize(g: &ColouredGraph) -> Canonical {
    Search::new(g).run()
}
