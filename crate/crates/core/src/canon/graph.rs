use crate::factor::Opf;
use crate::latin::LatinSquare;

/// How the hub vertices of the encoding are coloured, and therefore which
/// symmetries a colour-preserving isomorphism may realise.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ColourMode {
    /// Unordered factorisation; the two sides may be exchanged.
    P1f,
    /// Unordered factorisation; sides fixed.
    P1fDirect,
    /// Rows, columns and symbols each fixed as a role: isotopism.
    LsIsotopy,
    /// All three roles interchangeable: paratopism.
    LsSpecies,
    /// As `LsIsotopy`, with every row vertex pinned to its position.
    LsRowsOrdered,
}

impl ColourMode {
    pub const ALL: [ColourMode; 5] = [
        ColourMode::P1f,
        ColourMode::P1fDirect,
        ColourMode::LsIsotopy,
        ColourMode::LsSpecies,
        ColourMode::LsRowsOrdered,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ColourMode::P1f => "p1f",
            ColourMode::P1fDirect => "p1f-direct",
            ColourMode::LsIsotopy => "ls-isotopy",
            ColourMode::LsSpecies => "ls-species",
            ColourMode::LsRowsOrdered => "ls-rows-ordered",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|m| m.name() == s)
    }

    /// Colours of the hubs `F`, `U`, `V`.
    fn hub_colours(self) -> [u32; 3] {
        match self {
            ColourMode::P1f => [BLUE, RED, RED],
            ColourMode::P1fDirect | ColourMode::LsIsotopy | ColourMode::LsRowsOrdered => {
                [BLUE, RED, YELLOW]
            }
            ColourMode::LsSpecies => [RED, RED, RED],
        }
    }
}

pub const GREEN: u32 = 0;
pub const BLUE: u32 = 1;
pub const RED: u32 = 2;
pub const YELLOW: u32 = 3;
pub const BLACK: u32 = 4;
/// First colour used for position-pinned factor vertices.
pub const POSITION_BASE: u32 = 5;

/// Vertex numbering of the encoding of an OPF with `a` factors of order `n`:
/// factor vertices, then `u`, then `v`, then hubs `F`, `U`, `V`, then one
/// black vertex per covered edge in factor-major order.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct OpfLayout {
    pub factors: usize,
    pub n: usize,
}

impl OpfLayout {
    pub fn factor(&self, k: usize) -> usize {
        k
    }
    pub fn u(&self, i: usize) -> usize {
        self.factors + i
    }
    pub fn v(&self, j: usize) -> usize {
        self.factors + self.n + j
    }
    pub fn hub_f(&self) -> usize {
        self.factors + 2 * self.n
    }
    pub fn hub_u(&self) -> usize {
        self.hub_f() + 1
    }
    pub fn hub_v(&self) -> usize {
        self.hub_f() + 2
    }
    pub fn black(&self, k: usize, i: usize) -> usize {
        self.hub_f() + 3 + k * self.n + i
    }
    pub fn vertex_count(&self) -> usize {
        self.factors + 2 * self.n + 3 + self.factors * self.n
    }
}

/// Undirected simple graph with a colour per vertex, stored as CSR.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ColouredGraph {
    colours: Vec<u32>,
    offsets: Vec<u32>,
    targets: Vec<u32>,
}

impl ColouredGraph {
    /// Builds the graph; duplicate edges are merged and loops rejected.
    pub fn new(colours: Vec<u32>, edges: &[(usize, usize)]) -> Self {
        let nv = colours.len();
        let mut adj: Vec<Vec<u32>> = vec![Vec::new(); nv];
        for &(a, b) in edges {
            assert!(a < nv && b < nv && a != b, "bad edge {a}-{b}");
            adj[a].push(b as u32);
            adj[b].push(a as u32);
        }
        let mut offsets = Vec::with_capacity(nv + 1);
        let mut targets = Vec::new();
        offsets.push(0);
        for mut list in adj {
            list.sort_unstable();
            list.dedup();
            targets.extend_from_slice(&list);
            offsets.push(targets.len() as u32);
        }
        Self {
            colours,
            offsets,
            targets,
        }
    }

    pub fn vertex_count(&self) -> usize {
        self.colours.len()
    }

    pub fn edge_count(&self) -> usize {
        self.targets.len() / 2
    }

    pub fn colour(&self, v: usize) -> u32 {
        self.colours[v]
    }

    pub fn colours(&self) -> &[u32] {
        &self.colours
    }

    #[inline]
    pub fn neighbours(&self, v: usize) -> &[u32] {
        &self.targets[self.offsets[v] as usize..self.offsets[v + 1] as usize]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.neighbours(v).len()
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        self.neighbours(a).binary_search(&(b as u32)).is_ok()
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.vertex_count()).flat_map(move |a| {
            self.neighbours(a)
                .iter()
                .map(|&b| b as usize)
                .filter(move |&b| a < b)
                .map(move |b| (a, b))
        })
    }

    /// The graph with vertex `v` renamed `perm[v]`.
    pub fn relabel(&self, perm: &[usize]) -> Self {
        let mut colours = vec![0; self.vertex_count()];
        for (v, &c) in self.colours.iter().enumerate() {
            colours[perm[v]] = c;
        }
        let edges: Vec<(usize, usize)> = self.edges().map(|(a, b)| (perm[a], perm[b])).collect();
        Self::new(colours, &edges)
    }

    /// True iff `perm` preserves colours and edges.
    pub fn is_automorphism(&self, perm: &[usize]) -> bool {
        (0..self.vertex_count()).all(|v| self.colours[v] == self.colours[perm[v]])
            && self.edges().all(|(a, b)| self.has_edge(perm[a], perm[b]))
    }

    /// The coloured encoding of an ordered partial factorisation.
    pub fn from_opf(p: &Opf, mode: ColourMode) -> Self {
        let layout = OpfLayout {
            factors: p.len(),
            n: p.order(),
        };
        let n = p.order();
        let mut colours = vec![GREEN; layout.vertex_count()];
        let [cf, cu, cv] = mode.hub_colours();
        colours[layout.hub_f()] = cf;
        colours[layout.hub_u()] = cu;
        colours[layout.hub_v()] = cv;
        if mode == ColourMode::LsRowsOrdered {
            for k in 0..p.len() {
                colours[layout.factor(k)] = POSITION_BASE + k as u32;
            }
        }
        let mut edges = Vec::with_capacity(layout.factors + 2 * n + 3 * layout.factors * n);
        for k in 0..p.len() {
            edges.push((layout.factor(k), layout.hub_f()));
        }
        for i in 0..n {
            edges.push((layout.u(i), layout.hub_u()));
            edges.push((layout.v(i), layout.hub_v()));
        }
        for (k, f) in p.factors().iter().enumerate() {
            for i in 0..n {
                let b = layout.black(k, i);
                colours[b] = BLACK;
                edges.push((b, layout.factor(k)));
                edges.push((b, layout.u(i)));
                edges.push((b, layout.v(f.get(i))));
            }
        }
        Self::new(colours, &edges)
    }

    /// Encoding of a Latin square through its row factorisation.
    pub fn from_latin(l: &LatinSquare, mode: ColourMode) -> Self {
        Self::from_opf(&l.to_opf(), mode)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::factor::standard_prefix;
    use crate::latin::LatinSquare;

    #[test]
    fn vertex_counts() {
        let l = LatinSquare::cyclic(5);
        let g = ColouredGraph::from_latin(&l, ColourMode::P1f);
        assert_eq!(g.vertex_count(), 5 + 10 + 3 + 25);
        let seedlike = LatinSquare::cyclic(11).to_opf().prefix(4);
        let g = ColouredGraph::from_opf(&seedlike, ColourMode::P1f);
        assert_eq!(g.vertex_count(), 4 + 22 + 3 + 44);
    }

    #[test]
    fn black_vertices_have_degree_three() {
        let g = ColouredGraph::from_latin(&LatinSquare::cyclic(7), ColourMode::LsSpecies);
        let blacks: Vec<usize> = (0..g.vertex_count()).filter(|&v| g.colour(v) == BLACK).collect();
        assert_eq!(blacks.len(), 49);
        assert!(blacks.iter().all(|&b| g.degree(b) == 3));
    }

    #[test]
    fn hub_colours_follow_mode() {
        let p = standard_prefix(5).unwrap();
        let l = OpfLayout { factors: 2, n: 5 };
        let col = |m| {
            let g = ColouredGraph::from_opf(&p, m);
            [g.colour(l.hub_f()), g.colour(l.hub_u()), g.colour(l.hub_v())]
        };
        assert_eq!(col(ColourMode::P1f), [BLUE, RED, RED]);
        assert_eq!(col(ColourMode::P1fDirect), [BLUE, RED, YELLOW]);
        assert_eq!(col(ColourMode::LsSpecies), [RED, RED, RED]);
        let g = ColouredGraph::from_opf(&p, ColourMode::LsRowsOrdered);
        assert_eq!(g.colour(1), POSITION_BASE + 1);
    }
}
