//! Isomorphism-invariant keys for labeled multigraphs.
//!
//! Vertices start in cells given by their labels. Cells are refined by the
//! multiset of neighboring cells (and the cell of the involution partner,
//! when one is given) until stable; remaining ties are broken by
//! individualizing each vertex of the first non-trivial cell in turn. Every
//! discrete leaf yields an encoding and the smallest encoding is the key.
//! Automorphisms found along the way prune siblings in the same orbit.

use std::fmt;

use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::graph::{Color, DualGraph};

pub const DEFAULT_VERTEX_CAP: usize = 24;
/// Cap used for cover keys, whose total graphs are twice the base size.
pub const COVER_VERTEX_CAP: usize = 64;
const SEARCH_NODE_LIMIT: usize = 5_000_000;

/// Opaque comparable token; equal iff the inputs are isomorphic.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CanonicalKey(Vec<u64>);

impl CanonicalKey {
    /// 64-bit FNV-1a digest, for compact display.
    pub fn digest(&self) -> u64 {
        let mut h: u64 = 0xcbf2_9ce4_8422_2325;
        for word in &self.0 {
            for byte in word.to_le_bytes() {
                h ^= u64::from(byte);
                h = h.wrapping_mul(0x0000_0100_0000_01b3);
            }
        }
        h
    }
}

impl fmt::Display for CanonicalKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:016x}", self.digest())
    }
}

impl Serialize for CanonicalKey {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

/// A labeled multigraph with an optional vertex involution.
pub struct LabeledMultigraph {
    pub labels: Vec<Vec<u64>>,
    /// `mult[u][v]`: number of edges between `u` and `v`; loops on the diagonal.
    pub mult: Vec<Vec<u32>>,
    pub involution: Option<Vec<usize>>,
}

impl LabeledMultigraph {
    pub fn from_graph(g: &DualGraph) -> Self {
        let n = g.vertex_count();
        let mut labels: Vec<Vec<u64>> = g.vertices().iter().map(vertex_label).collect();
        let mut legs_at: Vec<Vec<u64>> = vec![Vec::new(); n];
        for (i, leg) in g.legs().iter().enumerate() {
            legs_at[g.incidence(leg.half_edge)].push(i as u64);
        }
        for (label, legs) in labels.iter_mut().zip(legs_at) {
            label.push(legs.len() as u64);
            label.extend(legs);
        }
        let mut mult = vec![vec![0u32; n]; n];
        for (a, b) in g.edge_endpoints() {
            mult[a][b] += 1;
            if a != b {
                mult[b][a] += 1;
            }
        }
        Self {
            labels,
            mult,
            involution: None,
        }
    }
}

fn vertex_label(v: &crate::graph::Vertex) -> Vec<u64> {
    let color = match v.color {
        Color::Black => 0,
        Color::White => 1,
    };
    let sing = v.sing.map_or(0, |t| {
        let fam = match t.family() {
            crate::Family::A => 1,
            crate::Family::D => 2,
        };
        fam * 1_000 + u64::from(t.index())
    });
    vec![
        color,
        u64::from(v.genus),
        sing,
        v.degree.map_or(0, |d| u64::from(d) + 1),
    ]
}

/// Canonical key of a dual graph respecting colors, genera, singularity
/// labels, degrees and leg markings.
pub fn canonical_key(g: &DualGraph) -> Result<CanonicalKey> {
    canonical_key_with_cap(g, DEFAULT_VERTEX_CAP)
}

pub fn canonical_key_with_cap(g: &DualGraph, cap: usize) -> Result<CanonicalKey> {
    Ok(canonical_form(&LabeledMultigraph::from_graph(g), cap)?.0)
}

/// Canonical vertex order: `order[pos]` is the vertex placed at `pos`.
pub fn canonical_order(g: &DualGraph, cap: usize) -> Result<Vec<usize>> {
    Ok(canonical_form(&LabeledMultigraph::from_graph(g), cap)?.1)
}

/// Returns the key and the canonical order of the vertices.
pub fn canonical_form(m: &LabeledMultigraph, cap: usize) -> Result<(CanonicalKey, Vec<usize>)> {
    let n = m.labels.len();
    if n > cap {
        return Err(Error::Resource {
            what: "canonical labeling vertex cap",
            limit: cap,
            reached: n,
        });
    }
    let mut search = Search::new(m);
    let mut sorted: Vec<&Vec<u64>> = m.labels.iter().collect();
    sorted.sort();
    sorted.dedup();
    let colors: Vec<usize> = m
        .labels
        .iter()
        .map(|l| sorted.binary_search(&l).expect("label present"))
        .collect();
    let mut path = Vec::new();
    search.run(colors, &mut path)?;
    let (code, order) = search.best.expect("search visits at least one leaf");
    Ok((CanonicalKey(code), order))
}

struct Search<'a> {
    m: &'a LabeledMultigraph,
    neighbors: Vec<Vec<(usize, u32)>>,
    best: Option<(Vec<u64>, Vec<usize>)>,
    automorphisms: Vec<Vec<usize>>,
    nodes: usize,
}

/// Own color, sorted neighbor colors with multiplicities, partner color.
type Signature = (usize, Vec<(usize, u32)>, usize);

impl<'a> Search<'a> {
    fn new(m: &'a LabeledMultigraph) -> Self {
        let neighbors = m
            .mult
            .iter()
            .map(|row| {
                row.iter()
                    .enumerate()
                    .filter(|(_, &c)| c > 0)
                    .map(|(w, &c)| (w, c))
                    .collect()
            })
            .collect();
        Self {
            m,
            neighbors,
            best: None,
            automorphisms: Vec::new(),
            nodes: 0,
        }
    }

    fn refine(&self, mut colors: Vec<usize>) -> Vec<usize> {
        let n = colors.len();
        loop {
            let count_before = colors.iter().copied().max().map_or(0, |c| c + 1);
            let sigs: Vec<Signature> = (0..n)
                .map(|v| {
                    let mut nb: Vec<(usize, u32)> = self.neighbors[v]
                        .iter()
                        .map(|&(w, c)| (colors[w], c))
                        .collect();
                    nb.sort_unstable();
                    let partner = self.m.involution.as_ref().map_or(0, |s| colors[s[v]]);
                    (colors[v], nb, partner)
                })
                .collect();
            let mut uniq: Vec<&Signature> = sigs.iter().collect();
            uniq.sort();
            uniq.dedup();
            colors = sigs
                .iter()
                .map(|s| uniq.binary_search(&s).expect("signature present"))
                .collect();
            if uniq.len() == count_before {
                return colors;
            }
        }
    }

    fn encode(&self, order: &[usize]) -> Vec<u64> {
        let n = order.len();
        let mut pos = vec![0; n];
        for (p, &v) in order.iter().enumerate() {
            pos[v] = p;
        }
        let mut code = vec![n as u64];
        for &v in order {
            code.push(self.m.labels[v].len() as u64);
            code.extend(&self.m.labels[v]);
        }
        for i in 0..n {
            for j in i..n {
                code.push(u64::from(self.m.mult[order[i]][order[j]]));
            }
        }
        if let Some(s) = &self.m.involution {
            code.extend(order.iter().map(|&v| pos[s[v]] as u64));
        }
        code
    }

    fn run(&mut self, colors: Vec<usize>, path: &mut Vec<usize>) -> Result<()> {
        self.nodes += 1;
        if self.nodes > SEARCH_NODE_LIMIT {
            return Err(Error::Resource {
                what: "canonical labeling search nodes",
                limit: SEARCH_NODE_LIMIT,
                reached: self.nodes,
            });
        }
        let colors = self.refine(colors);
        let n = colors.len();
        let cell_count = colors.iter().copied().max().map_or(0, |c| c + 1);
        if cell_count == n {
            let mut order = vec![0; n];
            for (v, &c) in colors.iter().enumerate() {
                order[c] = v;
            }
            let code = self.encode(&order);
            match &self.best {
                Some((best, best_order)) if *best == code => {
                    let mut auto = vec![0; n];
                    for p in 0..n {
                        auto[best_order[p]] = order[p];
                    }
                    self.automorphisms.push(auto);
                }
                Some((best, _)) if *best < code => {}
                _ => self.best = Some((code, order)),
            }
            return Ok(());
        }
        let mut sizes = vec![0usize; cell_count];
        for &c in &colors {
            sizes[c] += 1;
        }
        let target = (0..cell_count)
            .find(|&c| sizes[c] > 1)
            .expect("non-discrete partition has a non-trivial cell");
        let cell: Vec<usize> = (0..n).filter(|&v| colors[v] == target).collect();
        let mut explored: Vec<usize> = Vec::new();
        for &v in &cell {
            if !explored.is_empty() && self.same_orbit(v, &explored, path, n) {
                continue;
            }
            explored.push(v);
            let child: Vec<usize> = colors
                .iter()
                .enumerate()
                .map(|(u, &c)| {
                    if c > target || (c == target && u != v) {
                        c + 1
                    } else {
                        c
                    }
                })
                .collect();
            path.push(v);
            self.run(child, path)?;
            path.pop();
        }
        Ok(())
    }

    /// Whether `v` is in the orbit of an explored vertex under the found
    /// automorphisms that fix the current path pointwise.
    fn same_orbit(&self, v: usize, explored: &[usize], path: &[usize], n: usize) -> bool {
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(p: &mut [usize], x: usize) -> usize {
            let mut r = x;
            while p[r] != r {
                r = p[r];
            }
            let mut y = x;
            while p[y] != r {
                let next = p[y];
                p[y] = r;
                y = next;
            }
            r
        }
        for auto in &self.automorphisms {
            if path.iter().any(|&u| auto[u] != u) {
                continue;
            }
            for x in 0..n {
                let (a, b) = (find(&mut parent, x), find(&mut parent, auto[x]));
                if a != b {
                    parent[a] = b;
                }
            }
        }
        let rv = find(&mut parent, v);
        explored.iter().any(|&u| find(&mut parent, u) == rv)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::graph::Vertex;
    use rand::rngs::StdRng;
    use rand::seq::SliceRandom;
    use rand::SeedableRng;

    fn random_relabel(g: &DualGraph, rng: &mut StdRng) -> DualGraph {
        let mut vperm: Vec<usize> = (0..g.vertex_count()).collect();
        let mut hperm: Vec<usize> = (0..g.half_edge_count()).collect();
        vperm.shuffle(rng);
        hperm.shuffle(rng);
        g.permuted(&vperm, &hperm)
    }

    #[test]
    fn relabeled_copies_share_keys() {
        let mut rng = StdRng::seed_from_u64(7);
        for g in [
            fixtures::d4_cubic(),
            fixtures::quintic_q_cup_l(),
            fixtures::quintic_q_cup_l_realized(),
            fixtures::a7_quartic_line(),
        ] {
            let k = canonical_key(&g).unwrap();
            for _ in 0..100 {
                assert_eq!(canonical_key(&random_relabel(&g, &mut rng)).unwrap(), k);
            }
        }
    }

    #[test]
    fn path_and_triangle_differ() {
        let mut path = DualGraph::new();
        let v: Vec<usize> = (0..3).map(|_| path.add_vertex(Vertex::black(0))).collect();
        path.add_edge(v[0], v[1]);
        path.add_edge(v[1], v[2]);
        let mut tri = path.clone();
        tri.add_edge(v[2], v[0]);
        assert_ne!(canonical_key(&path).unwrap(), canonical_key(&tri).unwrap());
    }

    #[test]
    fn swapping_the_two_a1_vertices_is_an_automorphism() {
        let g = fixtures::quintic_q_cup_l();
        let a1: Vec<usize> = (0..g.vertex_count())
            .filter(|&v| g.vertex(v).sing == Some(crate::SingularityType::a(1)))
            .collect();
        assert_eq!(a1.len(), 2);
        let mut vperm: Vec<usize> = (0..g.vertex_count()).collect();
        vperm.swap(a1[0], a1[1]);
        let hperm: Vec<usize> = (0..g.half_edge_count()).collect();
        let swapped = g.permuted(&vperm, &hperm);
        assert_eq!(canonical_key(&g).unwrap(), canonical_key(&swapped).unwrap());
    }

    #[test]
    fn labels_matter() {
        let mut a = DualGraph::new();
        a.add_vertex(Vertex::black(1));
        let mut b = DualGraph::new();
        b.add_vertex(Vertex::black(2));
        let mut c = DualGraph::new();
        c.add_vertex(Vertex::component(1, 1));
        let ka = canonical_key(&a).unwrap();
        assert_ne!(ka, canonical_key(&b).unwrap());
        assert_ne!(ka, canonical_key(&c).unwrap());
    }

    #[test]
    fn legs_are_distinguished() {
        // Path x - y with leg 0 at x and leg 1 at y vs. swapped genera.
        let mut a = DualGraph::new();
        let x = a.add_vertex(Vertex::black(0));
        let y = a.add_vertex(Vertex::black(1));
        a.add_edge(x, y);
        a.add_leg(x, "0");
        a.add_leg(y, "1");
        let mut b = DualGraph::new();
        let x = b.add_vertex(Vertex::black(0));
        let y = b.add_vertex(Vertex::black(1));
        b.add_edge(x, y);
        b.add_leg(y, "0");
        b.add_leg(x, "1");
        assert_ne!(canonical_key(&a).unwrap(), canonical_key(&b).unwrap());
    }

    #[test]
    fn symmetric_star_is_fast_and_invariant() {
        let mut star = DualGraph::new();
        let c = star.add_vertex(Vertex::black(0));
        for _ in 0..20 {
            let l = star.add_vertex(Vertex::black(0));
            star.add_edge(c, l);
        }
        let mut rng = StdRng::seed_from_u64(3);
        let k = canonical_key(&star).unwrap();
        assert_eq!(canonical_key(&random_relabel(&star, &mut rng)).unwrap(), k);
    }

    #[test]
    fn cap_is_enforced() {
        let mut g = DualGraph::new();
        for _ in 0..25 {
            g.add_vertex(Vertex::black(0));
        }
        assert!(matches!(canonical_key(&g), Err(Error::Resource { .. })));
        assert!(canonical_key_with_cap(&g, 30).is_ok());
    }

    #[test]
    fn involution_is_part_of_the_key() {
        // Two genus-0 vertices joined by two edges; involution swapping them
        // vs. fixing both.
        let mut g = DualGraph::new();
        let a = g.add_vertex(Vertex::black(0));
        let b = g.add_vertex(Vertex::black(0));
        g.add_edge(a, b);
        g.add_edge(a, b);
        let mut swap = LabeledMultigraph::from_graph(&g);
        swap.involution = Some(vec![1, 0]);
        let mut fix = LabeledMultigraph::from_graph(&g);
        fix.involution = Some(vec![0, 1]);
        let ks = canonical_form(&swap, 8).unwrap().0;
        let kf = canonical_form(&fix, 8).unwrap().0;
        assert_ne!(ks, kf);
    }
}
