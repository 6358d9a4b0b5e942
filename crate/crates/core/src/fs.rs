//! Friedman–Smith closure detection on double covers.
//!
//! Parts of a decomposition are involution-invariant, hence unions of
//! vertex orbits, and the orbits are exactly the fibres over base vertices.
//! All searches therefore run over subsets of base vertices with the total
//! graph encoded as 64-bit adjacency masks.

use serde::Serialize;

use crate::cover::DoubleCover;
use crate::error::{Error, Result};

/// Largest number of orbit assignments any search will visit.
pub const SEARCH_LIMIT: usize = 1 << 22;

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct FsDecomposition {
    /// Total-graph vertices of the two parts, each ascending; the part
    /// holding vertex 0 comes first.
    pub parts: [Vec<usize>; 2],
    /// Half the number of edges between the parts.
    pub n: usize,
}

struct Masks {
    /// Fibre of each base vertex as a bitmask of total vertices.
    orbits: Vec<u64>,
    adj: Vec<u64>,
    /// Edges of the total graph as endpoint pairs, loops dropped.
    edges: Vec<(usize, usize)>,
}

impl Masks {
    fn new(c: &DoubleCover) -> Result<Self> {
        let t = c.total();
        let n = t.vertex_count();
        if n > 64 {
            return Err(Error::Resource {
                what: "total graph vertices for closure search",
                limit: 64,
                reached: n,
            });
        }
        let mut orbits = vec![0u64; c.base().vertex_count()];
        for u in 0..n {
            orbits[c.proj_vertex(u)] |= 1 << u;
        }
        let mut adj = vec![0u64; n];
        let mut edges = Vec::new();
        for (a, b) in t.edge_endpoints() {
            if a != b {
                adj[a] |= 1 << b;
                adj[b] |= 1 << a;
                edges.push((a, b));
            }
        }
        Ok(Self { orbits, adj, edges })
    }

    fn union(&self, orbit_mask: u64) -> u64 {
        let mut out = 0;
        let mut m = orbit_mask;
        while m != 0 {
            let i = m.trailing_zeros() as usize;
            out |= self.orbits[i];
            m &= m - 1;
        }
        out
    }

    /// A nonempty vertex set inducing a single connected component.
    fn connected(&self, set: u64) -> bool {
        if set == 0 {
            return false;
        }
        let mut seen = set & set.wrapping_neg();
        let mut frontier = seen;
        while frontier != 0 {
            let v = frontier.trailing_zeros() as usize;
            frontier &= frontier - 1;
            let new = self.adj[v] & set & !seen;
            seen |= new;
            frontier |= new;
        }
        seen == set
    }

    fn crossing(&self, a: u64, b: u64) -> usize {
        self.edges
            .iter()
            .filter(|&&(x, y)| {
                let (x, y) = (1u64 << x, 1u64 << y);
                (x & a != 0 && y & b != 0) || (x & b != 0 && y & a != 0)
            })
            .count()
    }
}

fn bits(mask: u64) -> Vec<usize> {
    (0..64).filter(|&i| mask >> i & 1 == 1).collect()
}

fn check_budget(k: usize, base: usize) -> Result<()> {
    let reached = base.checked_pow(k as u32).unwrap_or(usize::MAX);
    if reached > SEARCH_LIMIT {
        return Err(Error::Resource {
            what: "closure search orbit assignments",
            limit: SEARCH_LIMIT,
            reached,
        });
    }
    Ok(())
}

/// Every bipartition of the total graph into two involution-invariant parts
/// that each induce a connected subgraph, with `2n >= 2` edges between them
/// and none of those fixed by the involution. Sorted by `n`, then parts.
pub fn fs_decompositions(c: &DoubleCover) -> Result<Vec<FsDecomposition>> {
    let m = Masks::new(c)?;
    let k = m.orbits.len();
    if k < 2 {
        return Ok(Vec::new());
    }
    check_budget(k - 1, 2)?;
    let all = m.union((1u64 << k) - 1);
    let mut out = Vec::new();
    // Orbit 0 always sits in the first part, so each pair appears once.
    for rest in 0u64..(1 << (k - 1)) {
        let first = m.union(1 | rest << 1);
        let second = all & !first;
        if second == 0 || !m.connected(first) || !m.connected(second) {
            continue;
        }
        let crossing: Vec<(usize, usize)> = m
            .edges
            .iter()
            .copied()
            .filter(|&(x, y)| (first >> x & 1) != (first >> y & 1))
            .collect();
        if crossing.is_empty() || !crossing.len().is_multiple_of(2) {
            continue;
        }
        if crossing.iter().any(|&(x, y)| edge_fixed(c, x, y)) {
            continue;
        }
        out.push(FsDecomposition {
            parts: [bits(first), bits(second)],
            n: crossing.len() / 2,
        });
    }
    out.sort_by(|a, b| a.n.cmp(&b.n).then_with(|| a.parts.cmp(&b.parts)));
    Ok(out)
}

/// Whether some edge between `x` and `y` is mapped to itself.
fn edge_fixed(c: &DoubleCover, x: usize, y: usize) -> bool {
    let t = c.total();
    let ends = |a: usize| (t.incidence(a), t.incidence(t.pair(a).expect("no legs")));
    t.edges().into_iter().any(|(a, b)| {
        let (u, v) = ends(a);
        if !((u == x && v == y) || (u == y && v == x)) {
            return false;
        }
        let (ia, ib) = (c.invol_half_edge(a), c.invol_half_edge(b));
        (ia == a && ib == b) || (ia == b && ib == a)
    })
}

pub fn in_fs_closure(c: &DoubleCover, n_min: usize) -> Result<bool> {
    Ok(fs_decompositions(c)?.iter().any(|d| d.n >= n_min))
}

/// The largest-`n` decomposition with `n >= n_min`, if any.
pub fn fs_witness(c: &DoubleCover, n_min: usize) -> Result<Option<FsDecomposition>> {
    Ok(fs_decompositions(c)?
        .into_iter()
        .filter(|d| d.n >= n_min)
        .max_by(|a, b| a.n.cmp(&b.n).then_with(|| b.parts.cmp(&a.parts))))
}

/// Necessary condition read off the base: a split of the base vertices
/// into two connected sides joined by at least two edges, over each of
/// which the cover is connected. The cover over a connected side is
/// connected exactly when the side contains a nonsplit vertex or the
/// crossing bits around some cycle of the side sum to one.
pub fn quotient_prefilter(c: &DoubleCover) -> bool {
    let base = c.base();
    let k = base.vertex_count();
    if !(2..=63).contains(&k) {
        return false;
    }
    let edges = base.edges();
    let ends: Vec<(usize, usize)> = edges
        .iter()
        .map(|&(a, b)| (base.incidence(a), base.incidence(b)))
        .collect();
    let bitv = crossing_bits(c);
    let mut adj = vec![0u64; k];
    for &(a, b) in &ends {
        if a != b {
            adj[a] |= 1 << b;
            adj[b] |= 1 << a;
        }
    }
    let split: Vec<bool> = (0..k).map(|v| c.preimages(v).len() == 2).collect();
    let side_ok = |set: u64| -> bool {
        let start = set & set.wrapping_neg();
        let mut seen = start;
        let mut frontier = start;
        while frontier != 0 {
            let v = frontier.trailing_zeros() as usize;
            frontier &= frontier - 1;
            let new = adj[v] & set & !seen;
            seen |= new;
            frontier |= new;
        }
        if seen != set {
            return false;
        }
        if (0..k).any(|v| set >> v & 1 == 1 && !split[v]) {
            return true;
        }
        // All split: look for an inconsistent sheet potential.
        let mut pot: Vec<Option<bool>> = vec![None; k];
        let root = start.trailing_zeros() as usize;
        pot[root] = Some(false);
        let mut stack = vec![root];
        while let Some(v) = stack.pop() {
            for (e, &(a, b)) in ends.iter().enumerate() {
                if set >> a & 1 == 0 || set >> b & 1 == 0 || (a != v && b != v) {
                    continue;
                }
                let w = if a == v { b } else { a };
                let want = pot[v].expect("visited") ^ bitv[e];
                match pot[w] {
                    None => {
                        pot[w] = Some(want);
                        stack.push(w);
                    }
                    Some(p) if p != want => return true,
                    Some(_) => {}
                }
            }
        }
        false
    };
    let all = (1u64 << k) - 1;
    (0u64..(1 << (k - 1))).any(|rest| {
        let first = 1 | rest << 1;
        let second = all & !first;
        if second == 0 {
            return false;
        }
        let cross = ends
            .iter()
            .filter(|&&(a, b)| (first >> a & 1) != (first >> b & 1))
            .count();
        cross >= 2 && side_ok(first) && side_ok(second)
    })
}

/// For each base edge, whether its lifts join different sheets. Sheets of
/// a split vertex are its two preimages in ascending order; edges touching
/// a nonsplit vertex get `false`.
fn crossing_bits(c: &DoubleCover) -> Vec<bool> {
    let base = c.base();
    let t = c.total();
    let sheet_of = |u: usize| -> usize {
        let pre = c.preimages(c.proj_vertex(u));
        usize::from(pre.len() == 2 && pre[1] == u)
    };
    let mut lift = vec![usize::MAX; base.half_edge_count()];
    for h in 0..t.half_edge_count() {
        let b = c.proj_half_edge(h);
        if lift[b] == usize::MAX || sheet_of(t.incidence(h)) == 0 {
            lift[b] = h;
        }
    }
    base.edges()
        .into_iter()
        .map(|(a, b)| {
            let (va, vb) = (base.incidence(a), base.incidence(b));
            if c.preimages(va).len() == 1 || c.preimages(vb).len() == 1 {
                return false;
            }
            let x = lift[a];
            let y = t.pair(x).expect("no legs");
            sheet_of(t.incidence(x)) != sheet_of(t.incidence(y))
        })
        .collect()
}

/// Largest `n` such that two disjoint connected involution-invariant vertex
/// sets, not necessarily covering the graph, are joined by at least `2n`
/// edges. Zero when there is no such pair.
pub fn vologodsky_bound(c: &DoubleCover) -> Result<usize> {
    let m = Masks::new(c)?;
    let k = m.orbits.len();
    if k < 2 {
        return Ok(0);
    }
    check_budget(k, 3)?;
    // Connected invariant sets, as orbit masks.
    let sets: Vec<(u64, u64)> = (1u64..(1 << k))
        .map(|om| (om, m.union(om)))
        .filter(|&(_, vm)| m.connected(vm))
        .collect();
    let mut best = 0;
    for (i, &(oa, va)) in sets.iter().enumerate() {
        // An upper bound for any partner: all edges leaving `va`.
        let out: usize = m
            .edges
            .iter()
            .filter(|&&(x, y)| ((va >> x) & 1) != ((va >> y) & 1))
            .count();
        if out / 2 <= best {
            continue;
        }
        for &(ob, vb) in &sets[i + 1..] {
            if oa & ob != 0 {
                continue;
            }
            best = best.max(m.crossing(va, vb) / 2);
        }
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cover::{build_cover, enumerate_covers, CoverSpec, Sheet};
    use crate::fixtures;
    use crate::graph::{DualGraph, Vertex};

    #[test]
    fn fs_figure_covers() {
        for n in 1..=4 {
            let c = fixtures::fs_cover(n);
            let ds = fs_decompositions(&c).unwrap();
            assert_eq!(ds.len(), 1);
            assert_eq!(ds[0].n, n);
            assert_eq!(ds[0].parts, [vec![0], vec![1]]);
            assert_eq!(in_fs_closure(&c, 2).unwrap(), n >= 2);
            assert_eq!(vologodsky_bound(&c).unwrap(), n);
            assert_eq!(quotient_prefilter(&c), n >= 2);
        }
    }

    #[test]
    fn single_vertex_has_nothing() {
        let mut base = DualGraph::new();
        base.add_vertex(Vertex::component(5, 6));
        let c = &enumerate_covers(&base).unwrap()[0];
        assert!(fs_decompositions(c).unwrap().is_empty());
        assert!(!in_fs_closure(c, 2).unwrap());
        assert_eq!(vologodsky_bound(c).unwrap(), 0);
        assert!(!quotient_prefilter(c));
    }

    #[test]
    fn a3_quintic_stable_cover_is_not_fs() {
        // Tails T1, T2 over T and one genus-7 component, four edges.
        let mut base = DualGraph::new();
        let t = base.add_vertex(Vertex::black(1));
        let n = base.add_vertex(Vertex::component(5, 4));
        base.add_edge(t, n);
        base.add_edge(t, n);
        let spec = CoverSpec::all_split(&base).with_sheet(n, Sheet::Nonsplit);
        let c = build_cover(&base, &spec).unwrap();
        assert_eq!(c.total().vertex_count(), 3);
        assert_eq!(c.total().edge_count(), 4);
        assert!(fs_decompositions(&c).unwrap().iter().all(|d| d.n < 2));
        assert!(!in_fs_closure(&c, 2).unwrap());
        assert!(!quotient_prefilter(&c));
    }

    #[test]
    fn star_covers_agree_with_full_search() {
        let mut base = DualGraph::new();
        let hub = base.add_vertex(Vertex::black(1));
        for g in [1, 1, 2] {
            let leaf = base.add_vertex(Vertex::black(g));
            base.add_edge(hub, leaf);
            base.add_edge(hub, leaf);
        }
        for c in enumerate_covers(&base).unwrap() {
            let full = in_fs_closure(&c, 2).unwrap();
            assert_eq!(quotient_prefilter(&c), full);
            if vologodsky_bound(&c).unwrap() >= 2 {
                assert!(full);
            }
        }
    }

    #[test]
    fn degenerating_sides_keeps_n() {
        // Each side of FS_2 replaced by a genus-1 vertex with a rational
        // bridge to another genus-1 vertex; the four nodes stay between
        // the two sides.
        let mut base = DualGraph::new();
        let a = base.add_vertex(Vertex::black(1));
        let a2 = base.add_vertex(Vertex::black(1));
        let b = base.add_vertex(Vertex::black(1));
        base.add_edge(a, a2);
        base.add_edge(a, b);
        base.add_edge(a2, b);
        let spec = CoverSpec::all_split(&base)
            .with_sheet(a, Sheet::Nonsplit)
            .with_sheet(a2, Sheet::Nonsplit)
            .with_sheet(b, Sheet::Nonsplit);
        let c = build_cover(&base, &spec).unwrap();
        let ds = fs_decompositions(&c).unwrap();
        assert!(ds
            .iter()
            .any(|d| d.n == 2 && d.parts == [vec![0, 1], vec![2]]));
    }

    #[test]
    fn parts_are_swap_invariant() {
        let c = fixtures::fs_cover(3);
        let d = &fs_decompositions(&c).unwrap()[0];
        let swapped = FsDecomposition {
            parts: [d.parts[1].clone(), d.parts[0].clone()],
            n: d.n,
        };
        assert_eq!(swapped.n, 3);
        assert!(d.parts[0].contains(&0));
    }
}
