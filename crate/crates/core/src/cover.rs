//! Étale double covers of dual graphs.
//!
//! A cover is described combinatorially: every base vertex is either split
//! (two preimages swapped by the involution) or nonsplit (one preimage
//! fixed by it, carrying a connected double cover of the component), and
//! every base edge carries a bit saying whether its two lifts cross sheets.
//! Each base half-edge `h` lifts to the total half-edges `2h` and `2h + 1`.

use std::collections::{BTreeSet, HashMap, VecDeque};

use serde::{Deserialize, Serialize};

use crate::canon::{canonical_form, CanonicalKey, LabeledMultigraph, COVER_VERTEX_CAP};
use crate::error::{Error, Result};
use crate::graph::{DualGraph, GraphJson, Vertex};
use crate::realize::{realize_with_provenance, substitute, Origin, Realization};

const SPEC_LIMIT: usize = 1 << 20;

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Sheet {
    Split,
    Nonsplit,
}

/// Split flags per base vertex and crossing bits per base edge (in
/// [`DualGraph::edges`] order).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CoverSpec {
    pub sheets: Vec<Sheet>,
    pub cocycle: Vec<bool>,
}

impl CoverSpec {
    pub fn all_split(base: &DualGraph) -> Self {
        Self {
            sheets: vec![Sheet::Split; base.vertex_count()],
            cocycle: vec![false; base.edge_count()],
        }
    }

    pub fn with_sheet(mut self, v: usize, sheet: Sheet) -> Self {
        self.sheets[v] = sheet;
        self
    }

    pub fn with_bit(mut self, e: usize, bit: bool) -> Self {
        self.cocycle[e] = bit;
        self
    }

    pub fn validate(&self, base: &DualGraph) -> Result<()> {
        if self.sheets.len() != base.vertex_count() || self.cocycle.len() != base.edge_count() {
            return Err(Error::InvalidCover(
                "spec size does not match base graph".into(),
            ));
        }
        for (v, &s) in self.sheets.iter().enumerate() {
            if s == Sheet::Nonsplit {
                let vert = base.vertex(v);
                if vert.is_white() {
                    return Err(Error::InvalidCover(format!(
                        "white vertex {v} must have two preimages"
                    )));
                }
                if vert.genus == 0 {
                    return Err(Error::InvalidCover(format!(
                        "vertex {v} has genus 0 and cannot be nonsplit"
                    )));
                }
            }
        }
        Ok(())
    }
}

/// Discrete invariants of the Prym of a cover.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct PrymProfile {
    pub abelian_dim: u32,
    pub torus_rank: u32,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DoubleCover {
    base: DualGraph,
    total: DualGraph,
    proj_v: Vec<usize>,
    proj_h: Vec<usize>,
    invol_v: Vec<usize>,
    invol_h: Vec<usize>,
}

impl DoubleCover {
    /// Assembles a cover from parts and checks every invariant except
    /// connectivity of the total graph.
    pub fn from_parts(
        base: DualGraph,
        total: DualGraph,
        proj_v: Vec<usize>,
        proj_h: Vec<usize>,
        invol_v: Vec<usize>,
        invol_h: Vec<usize>,
    ) -> Result<Self> {
        let c = Self {
            base,
            total,
            proj_v,
            proj_h,
            invol_v,
            invol_h,
        };
        c.validate_structure()?;
        Ok(c)
    }

    pub fn base(&self) -> &DualGraph {
        &self.base
    }

    pub fn total(&self) -> &DualGraph {
        &self.total
    }

    pub fn proj_vertex(&self, v: usize) -> usize {
        self.proj_v[v]
    }

    pub fn proj_half_edge(&self, h: usize) -> usize {
        self.proj_h[h]
    }

    pub fn invol_vertex(&self, v: usize) -> usize {
        self.invol_v[v]
    }

    pub fn invol_half_edge(&self, h: usize) -> usize {
        self.invol_h[h]
    }

    pub fn vertex_projection(&self) -> &[usize] {
        &self.proj_v
    }

    pub fn vertex_involution(&self) -> &[usize] {
        &self.invol_v
    }

    pub(crate) fn parts(&self) -> (&[usize], &[usize], &[usize], &[usize]) {
        (&self.proj_v, &self.proj_h, &self.invol_v, &self.invol_h)
    }

    /// Preimages of base vertex `v`, ascending.
    pub fn preimages(&self, v: usize) -> Vec<usize> {
        (0..self.proj_v.len())
            .filter(|&u| self.proj_v[u] == v)
            .collect()
    }

    pub fn sheet(&self, v: usize) -> Sheet {
        if self.proj_v.iter().filter(|&&w| w == v).count() == 2 {
            Sheet::Split
        } else {
            Sheet::Nonsplit
        }
    }

    pub fn is_connected(&self) -> bool {
        self.total.is_connected()
    }

    /// All invariants, connectivity of the total graph included.
    pub fn validate(&self) -> Result<()> {
        self.validate_structure()?;
        if !self.total.is_connected() {
            return Err(Error::InvalidCover("total graph is disconnected".into()));
        }
        Ok(())
    }

    pub fn validate_structure(&self) -> Result<()> {
        let (b, t) = (&self.base, &self.total);
        let bad = |msg: String| Err(Error::InvalidCover(msg));
        if b.has_legs() || t.has_legs() {
            return Err(Error::HasLegs);
        }
        let (nv, nh) = (t.vertex_count(), t.half_edge_count());
        if self.proj_v.len() != nv
            || self.invol_v.len() != nv
            || self.proj_h.len() != nh
            || self.invol_h.len() != nh
        {
            return bad("map lengths do not match the total graph".into());
        }
        if self.proj_v.iter().any(|&v| v >= b.vertex_count())
            || self.proj_h.iter().any(|&h| h >= b.half_edge_count())
            || self.invol_v.iter().any(|&v| v >= nv)
            || self.invol_h.iter().any(|&h| h >= nh)
        {
            return bad("map value out of range".into());
        }
        for h in 0..nh {
            let ph = self.proj_h[h];
            if b.incidence(ph) != self.proj_v[t.incidence(h)] {
                return bad(format!(
                    "projection does not respect incidence at half-edge {h}"
                ));
            }
            let pair = t.pair(h).expect("no legs");
            if b.pair(ph) != Some(self.proj_h[pair]) {
                return bad(format!(
                    "projection does not respect pairing at half-edge {h}"
                ));
            }
            let ih = self.invol_h[h];
            if self.invol_h[ih] != h {
                return bad(format!("involution is not an involution at half-edge {h}"));
            }
            if ih == h {
                return bad(format!("involution fixes half-edge {h}"));
            }
            if t.incidence(ih) != self.invol_v[t.incidence(h)] {
                return bad(format!(
                    "involution does not respect incidence at half-edge {h}"
                ));
            }
            if t.pair(ih) != Some(self.invol_h[pair]) {
                return bad(format!(
                    "involution does not respect pairing at half-edge {h}"
                ));
            }
            if self.proj_h[ih] != ph {
                return bad(format!(
                    "projection is not involution-invariant at half-edge {h}"
                ));
            }
            if ih == pair {
                return bad(format!("involution fixes the edge at half-edge {h}"));
            }
        }
        let mut lifts = vec![0usize; b.half_edge_count()];
        for &ph in &self.proj_h {
            lifts[ph] += 1;
        }
        if let Some(h) = lifts.iter().position(|&c| c != 2) {
            return bad(format!(
                "base half-edge {h} has {} lifts, expected 2",
                lifts[h]
            ));
        }
        let mut pre: Vec<Vec<usize>> = vec![Vec::new(); b.vertex_count()];
        for (u, &v) in self.proj_v.iter().enumerate() {
            pre[v].push(u);
        }
        for (v, us) in pre.iter().enumerate() {
            let bv = b.vertex(v);
            match us.as_slice() {
                [u] => {
                    if self.invol_v[*u] != *u {
                        return bad(format!("lone preimage of vertex {v} is not fixed"));
                    }
                    if bv.is_white() {
                        return bad(format!("white vertex {v} has a single preimage"));
                    }
                    if bv.genus == 0 {
                        return bad(format!("rational vertex {v} has a single preimage"));
                    }
                    let expect = Vertex {
                        genus: 2 * bv.genus - 1,
                        ..bv.clone()
                    };
                    if *t.vertex(*u) != expect {
                        return bad(format!("preimage of nonsplit vertex {v} has wrong data"));
                    }
                }
                [u, w] => {
                    if self.invol_v[*u] != *w || self.invol_v[*w] != *u {
                        return bad(format!("preimages of vertex {v} are not swapped"));
                    }
                    if t.vertex(*u) != bv || t.vertex(*w) != bv {
                        return bad(format!("preimages of split vertex {v} differ from it"));
                    }
                }
                _ => {
                    return bad(format!("vertex {v} has {} preimages", us.len()));
                }
            }
        }
        for u in 0..nv {
            if self.invol_v[self.invol_v[u]] != u || self.proj_v[self.invol_v[u]] != self.proj_v[u]
            {
                return bad(format!("involution misbehaves at vertex {u}"));
            }
        }
        Ok(())
    }

    /// Isomorphism class of the total graph together with the involution.
    pub fn canonical_key(&self) -> Result<CanonicalKey> {
        let mut m = LabeledMultigraph::from_graph(&self.total);
        m.involution = Some(self.invol_v.clone());
        Ok(canonical_form(&m, COVER_VERTEX_CAP)?.0)
    }

    /// Abelian part and torus rank of the Prym.
    pub fn prym_profile(&self) -> Result<PrymProfile> {
        let abelian = i64::from(self.total.genus_sum()) - i64::from(self.base.genus_sum());
        let torus = i64::from(self.total.first_betti()?) - i64::from(self.base.first_betti()?);
        let to_u32 = |x: i64, what: &str| {
            u32::try_from(x).map_err(|_| Error::InvalidCover(format!("negative {what}: {x}")))
        };
        Ok(PrymProfile {
            abelian_dim: to_u32(abelian, "abelian dimension")?,
            torus_rank: to_u32(torus, "torus rank")?,
        })
    }

    /// `genus(total) == 2 genus(base) - 1`.
    pub fn satisfies_riemann_hurwitz(&self) -> Result<bool> {
        Ok(i64::from(self.total.genus()?) == 2 * i64::from(self.base.genus()?) - 1)
    }

    /// No edge of the total graph is mapped to itself.
    pub fn is_admissible(&self) -> bool {
        self.total.edges().iter().all(|&(a, b)| {
            let (ia, ib) = (self.invol_h[a], self.invol_h[b]);
            !((ia == a && ib == b) || (ia == b && ib == a))
        })
    }

    pub fn to_json_value(&self) -> CoverJson {
        let (base, bmap) = self.base.normalized();
        let (total, tmap) = self.total.normalized();
        let nh = self.total.half_edge_count();
        let mut proj_h = vec![0; nh];
        let mut invol_h = vec![0; nh];
        for h in 0..nh {
            proj_h[tmap[h]] = bmap[self.proj_h[h]];
            invol_h[tmap[h]] = tmap[self.invol_h[h]];
        }
        CoverJson {
            base: base.to_json_value(),
            total: total.to_json_value(),
            proj: MapJson {
                vertices: self.proj_v.clone(),
                half_edges: proj_h,
            },
            invol: MapJson {
                vertices: self.invol_v.clone(),
                half_edges: invol_h,
            },
        }
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(&self.to_json_value()).expect("cover json serializes")
    }

    pub fn from_json_value(doc: &CoverJson) -> Result<Self> {
        let base = DualGraph::from_json_value(&doc.base)?;
        let total = DualGraph::from_json_value(&doc.total)?;
        Self::from_parts(
            base,
            total,
            doc.proj.vertices.clone(),
            doc.proj.half_edges.clone(),
            doc.invol.vertices.clone(),
            doc.invol.half_edges.clone(),
        )
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        let doc: CoverJson = serde_json::from_str(s)?;
        Self::from_json_value(&doc)
    }
}

/// Vertex and half-edge maps. Half-edge `2i`, `2i + 1` belong to edge `i`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MapJson {
    pub vertices: Vec<usize>,
    pub half_edges: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoverJson {
    pub base: GraphJson,
    pub total: GraphJson,
    pub proj: MapJson,
    pub invol: MapJson,
}

/// The two-sheet construction. The result may be disconnected; check
/// [`DoubleCover::is_connected`].
pub fn build_cover(base: &DualGraph, spec: &CoverSpec) -> Result<DoubleCover> {
    if base.has_legs() {
        return Err(Error::HasLegs);
    }
    spec.validate(base)?;
    let mut vertices = Vec::new();
    let mut proj_v = Vec::new();
    let mut invol_v = Vec::new();
    // lift[v][s]: preimage of v on sheet s.
    let mut lift = Vec::with_capacity(base.vertex_count());
    for (v, vert) in base.vertices().iter().enumerate() {
        let i = vertices.len();
        match spec.sheets[v] {
            Sheet::Split => {
                vertices.push(vert.clone());
                vertices.push(vert.clone());
                proj_v.extend([v, v]);
                invol_v.extend([i + 1, i]);
                lift.push([i, i + 1]);
            }
            Sheet::Nonsplit => {
                vertices.push(Vertex {
                    genus: 2 * vert.genus - 1,
                    ..vert.clone()
                });
                proj_v.push(v);
                invol_v.push(i);
                lift.push([i, i]);
            }
        }
    }
    let nh = base.half_edge_count();
    let mut incidence = vec![0; 2 * nh];
    let mut pairing = vec![None; 2 * nh];
    let mut proj_h = vec![0; 2 * nh];
    let mut invol_h = vec![0; 2 * nh];
    for h in 0..nh {
        let v = base.incidence(h);
        for s in 0..2 {
            incidence[2 * h + s] = lift[v][s];
            proj_h[2 * h + s] = h;
            invol_h[2 * h + s] = 2 * h + (1 - s);
        }
    }
    for (e, (a, b)) in base.edges().into_iter().enumerate() {
        let bit = usize::from(spec.cocycle[e]);
        for s in 0..2 {
            pairing[2 * a + s] = Some(2 * b + (s ^ bit));
            pairing[2 * b + (s ^ bit)] = Some(2 * a + s);
        }
    }
    let total = DualGraph::from_parts(vertices, incidence, pairing, Vec::new())?;
    DoubleCover::from_parts(base.clone(), total, proj_v, proj_h, invol_v, invol_h)
}

#[derive(Copy, Clone, Debug, Default)]
pub struct CoverEnumOptions {
    pub include_disconnected: bool,
}

/// Every cover of `base` up to gauge and isomorphism, connected ones only
/// unless asked otherwise. Order follows [`gauge_fixed_specs`].
pub fn enumerate_covers(base: &DualGraph) -> Result<Vec<DoubleCover>> {
    enumerate_covers_with(base, CoverEnumOptions::default())
}

pub fn enumerate_covers_with(base: &DualGraph, opts: CoverEnumOptions) -> Result<Vec<DoubleCover>> {
    if base.has_legs() {
        return Err(Error::HasLegs);
    }
    if !base.is_connected() {
        return Err(Error::InvalidCover("base graph must be connected".into()));
    }
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for spec in gauge_fixed_specs(base)? {
        let cover = build_cover(base, &spec)?;
        if !opts.include_disconnected && !cover.is_connected() {
            continue;
        }
        if seen.insert(cover.canonical_key()?) {
            out.push(cover);
        }
    }
    Ok(out)
}

/// Specs modulo gauge: positive-genus black vertices choose a sheet type;
/// bits are free only on edges between split vertices outside a spanning
/// forest of the split subgraph. A bit on an edge at a nonsplit vertex can
/// be undone by swapping the two lifts of that half-edge alone, and a bit on
/// a forest edge by swapping the sheets of a split vertex.
pub fn gauge_fixed_specs(base: &DualGraph) -> Result<Vec<CoverSpec>> {
    let flexible: Vec<usize> = (0..base.vertex_count())
        .filter(|&v| base.vertex(v).is_black() && base.vertex(v).genus >= 1)
        .collect();
    if flexible.len() >= 20 {
        return Err(Error::Resource {
            what: "cover specs",
            limit: SPEC_LIMIT,
            reached: usize::MAX,
        });
    }
    let edges = base.edge_endpoints();
    let mut specs = Vec::new();
    for mask in 0usize..(1 << flexible.len()) {
        let mut sheets = vec![Sheet::Split; base.vertex_count()];
        for (i, &v) in flexible.iter().enumerate() {
            if mask >> i & 1 == 1 {
                sheets[v] = Sheet::Nonsplit;
            }
        }
        let free = free_edges(base.vertex_count(), &edges, &sheets);
        if free.len() >= 20 || specs.len() + (1 << free.len()) > SPEC_LIMIT {
            return Err(Error::Resource {
                what: "cover specs",
                limit: SPEC_LIMIT,
                reached: specs.len().saturating_add(1usize << free.len().min(40)),
            });
        }
        for bits in 0usize..(1 << free.len()) {
            let mut cocycle = vec![false; edges.len()];
            for (i, &e) in free.iter().enumerate() {
                cocycle[e] = bits >> i & 1 == 1;
            }
            specs.push(CoverSpec {
                sheets: sheets.clone(),
                cocycle,
            });
        }
    }
    Ok(specs)
}

/// Edges between split vertices not in the BFS spanning forest of the split
/// subgraph.
fn free_edges(n: usize, edges: &[(usize, usize)], sheets: &[Sheet]) -> Vec<usize> {
    let split = |v: usize| sheets[v] == Sheet::Split;
    let mut adj: Vec<Vec<(usize, usize)>> = vec![Vec::new(); n];
    for (e, &(a, b)) in edges.iter().enumerate() {
        if split(a) && split(b) {
            adj[a].push((b, e));
            if a != b {
                adj[b].push((a, e));
            }
        }
    }
    let mut in_tree = vec![false; edges.len()];
    let mut seen = vec![false; n];
    for root in 0..n {
        if !split(root) || seen[root] {
            continue;
        }
        seen[root] = true;
        let mut queue = VecDeque::from([root]);
        while let Some(v) = queue.pop_front() {
            for &(w, e) in &adj[v] {
                if !seen[w] {
                    seen[w] = true;
                    in_tree[e] = true;
                    queue.push_back(w);
                }
            }
        }
    }
    (0..edges.len())
        .filter(|&e| split(edges[e].0) && split(edges[e].1) && !in_tree[e])
        .collect()
}

/// Builds a cover from new base/total graphs whose elements are tagged with
/// origins, transporting projection and involution through the tags.
#[allow(clippy::too_many_arguments)]
pub(crate) fn transport<O: Eq + std::hash::Hash + Clone>(
    base: DualGraph,
    base_v_origin: &[O],
    base_h_origin: &[O],
    total: DualGraph,
    total_v_origin: &[O],
    total_h_origin: &[O],
    map_origin_down: impl Fn(&O, bool) -> O,
    map_origin_invol: impl Fn(&O, bool) -> O,
) -> Result<DoubleCover> {
    let bv: HashMap<&O, usize> = base_v_origin
        .iter()
        .enumerate()
        .map(|(i, o)| (o, i))
        .collect();
    let bh: HashMap<&O, usize> = base_h_origin
        .iter()
        .enumerate()
        .map(|(i, o)| (o, i))
        .collect();
    let tv: HashMap<&O, usize> = total_v_origin
        .iter()
        .enumerate()
        .map(|(i, o)| (o, i))
        .collect();
    let th: HashMap<&O, usize> = total_h_origin
        .iter()
        .enumerate()
        .map(|(i, o)| (o, i))
        .collect();
    let missing = || Error::InvalidCover("origin lost while transporting cover maps".into());
    let proj_v = total_v_origin
        .iter()
        .map(|o| {
            bv.get(&map_origin_down(o, true))
                .copied()
                .ok_or_else(missing)
        })
        .collect::<Result<Vec<_>>>()?;
    let proj_h = total_h_origin
        .iter()
        .map(|o| {
            bh.get(&map_origin_down(o, false))
                .copied()
                .ok_or_else(missing)
        })
        .collect::<Result<Vec<_>>>()?;
    let invol_v = total_v_origin
        .iter()
        .map(|o| {
            tv.get(&map_origin_invol(o, true))
                .copied()
                .ok_or_else(missing)
        })
        .collect::<Result<Vec<_>>>()?;
    let invol_h = total_h_origin
        .iter()
        .map(|o| {
            th.get(&map_origin_invol(o, false))
                .copied()
                .ok_or_else(missing)
        })
        .collect::<Result<Vec<_>>>()?;
    DoubleCover::from_parts(base, total, proj_v, proj_h, invol_v, invol_h)
}

/// Realizes base and total together. Each pair of white preimages gets two
/// copies of the tail chosen downstairs, glued along the lifted branches.
pub fn realize_cover(c: &DoubleCover, choice: &Realization<'_>) -> Result<DoubleCover> {
    c.validate_structure()?;
    let (base, base_prov) = realize_with_provenance(&c.base, choice)?;
    let (proj_v, proj_h) = (&c.proj_v, &c.proj_h);
    let (total, total_prov) = substitute(&c.total, |u| {
        let w = proj_v[u];
        let tc = choice
            .get(&w)
            .ok_or_else(|| Error::Realize(format!("no tail chosen for white vertex {w}")))?;
        let below = c.base.half_edges_at(w);
        let above = c.total.half_edges_at(u);
        let legs_to = tc
            .matching
            .iter()
            .map(|&i| {
                let target = *below
                    .get(i)
                    .ok_or_else(|| Error::Realize(format!("branch {i} out of range at {w}")))?;
                above
                    .iter()
                    .copied()
                    .find(|&h| proj_h[h] == target)
                    .ok_or_else(|| {
                        Error::InvalidCover(format!("branch {i} at {w} has no lift at {u}"))
                    })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok((tc.template, legs_to))
    })?;
    let down = |o: &Origin, vertex: bool| match *o {
        Origin::Kept(x) => Origin::Kept(if vertex { proj_v[x] } else { proj_h[x] }),
        Origin::Tail { white, local } => Origin::Tail {
            white: proj_v[white],
            local,
        },
    };
    let flip = |o: &Origin, vertex: bool| match *o {
        Origin::Kept(x) => Origin::Kept(if vertex { c.invol_v[x] } else { c.invol_h[x] }),
        Origin::Tail { white, local } => Origin::Tail {
            white: c.invol_v[white],
            local,
        },
    };
    transport(
        base,
        &base_prov.vertices,
        &base_prov.half_edges,
        total,
        &total_prov.vertices,
        &total_prov.half_edges,
        down,
        flip,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    fn two_lines_twice() -> DualGraph {
        let mut g = DualGraph::new();
        let a = g.add_vertex(Vertex::black(0));
        let b = g.add_vertex(Vertex::black(0));
        g.add_edge(a, b);
        g.add_edge(a, b);
        g
    }

    #[test]
    fn smooth_quintic_nonsplit_and_split() {
        let mut base = DualGraph::new();
        base.add_vertex(Vertex::component(5, 6));
        let non = build_cover(
            &base,
            &CoverSpec::all_split(&base).with_sheet(0, Sheet::Nonsplit),
        )
        .unwrap();
        assert_eq!(non.total().vertex_count(), 1);
        assert_eq!(non.total().vertex(0).genus, 11);
        assert!(non.is_connected());
        non.validate().unwrap();

        let split = build_cover(&base, &CoverSpec::all_split(&base)).unwrap();
        assert_eq!(split.total().vertex_count(), 2);
        assert!(!split.is_connected());
        assert!(split.validate().is_err());
        split.validate_structure().unwrap();
    }

    #[test]
    fn nonsplit_requires_positive_genus() {
        let base = two_lines_twice();
        let spec = CoverSpec::all_split(&base).with_sheet(0, Sheet::Nonsplit);
        assert!(build_cover(&base, &spec).is_err());
    }

    #[test]
    fn fs_figure_cover_shape() {
        for n in 1..=4 {
            let c = fixtures::fs_cover(n);
            c.validate().unwrap();
            assert_eq!(c.total().vertex_count(), 2);
            assert_eq!(c.total().edge_count(), 2 * n);
            assert_eq!(c.invol_vertex(0), 0);
            assert_eq!(c.invol_vertex(1), 1);
            assert!(c.is_admissible());
        }
    }

    #[test]
    fn brute_force_two_vertex_double_edge() {
        // All four bit assignments, no gauge fixing.
        let base = two_lines_twice();
        let mut keys = BTreeSet::new();
        for bits in 0..4 {
            let spec = CoverSpec::all_split(&base)
                .with_bit(0, bits & 1 == 1)
                .with_bit(1, bits & 2 == 2);
            let c = build_cover(&base, &spec).unwrap();
            if c.is_connected() {
                keys.insert(c.canonical_key().unwrap());
            }
        }
        assert_eq!(keys.len(), 1);
        assert_eq!(enumerate_covers(&base).unwrap().len(), keys.len());
    }

    #[test]
    fn smooth_quintic_has_one_connected_cover() {
        let mut base = DualGraph::new();
        base.add_vertex(Vertex::component(5, 6));
        assert_eq!(enumerate_covers(&base).unwrap().len(), 1);
    }

    #[test]
    fn gauge_fixing_agrees_with_brute_force() {
        // Q ∪ L quintic: brute force over every sheet choice and every bit.
        for base in [
            fixtures::quintic_q_cup_l(),
            fixtures::quintic_q_cup_l_realized(),
            fixtures::a1_a2_quintic(),
        ] {
            let edges = base.edge_count();
            let flexible: Vec<usize> = (0..base.vertex_count())
                .filter(|&v| base.vertex(v).is_black() && base.vertex(v).genus > 0)
                .collect();
            let mut brute = BTreeSet::new();
            for mask in 0..(1usize << flexible.len()) {
                for bits in 0..(1usize << edges) {
                    let mut spec = CoverSpec::all_split(&base);
                    for (i, &v) in flexible.iter().enumerate() {
                        if mask >> i & 1 == 1 {
                            spec.sheets[v] = Sheet::Nonsplit;
                        }
                    }
                    for e in 0..edges {
                        spec.cocycle[e] = bits >> e & 1 == 1;
                    }
                    let c = build_cover(&base, &spec).unwrap();
                    if c.is_connected() {
                        brute.insert(c.canonical_key().unwrap());
                    }
                }
            }
            let fast: BTreeSet<_> = enumerate_covers(&base)
                .unwrap()
                .iter()
                .map(|c| c.canonical_key().unwrap())
                .collect();
            assert_eq!(fast, brute);
        }
    }

    #[test]
    fn riemann_hurwitz_and_profile_on_smooth_quintic() {
        let mut base = DualGraph::new();
        base.add_vertex(Vertex::component(5, 6));
        let c = &enumerate_covers(&base).unwrap()[0];
        assert!(c.satisfies_riemann_hurwitz().unwrap());
        assert_eq!(
            c.prym_profile().unwrap(),
            PrymProfile {
                abelian_dim: 5,
                torus_rank: 0
            }
        );
    }

    #[test]
    fn json_round_trip() {
        let c = fixtures::a3_quintic_cover();
        let text = c.to_json_string();
        let back = DoubleCover::from_json_str(&text).unwrap();
        assert_eq!(back.to_json_value(), c.to_json_value());
        assert_eq!(back.canonical_key().unwrap(), c.canonical_key().unwrap());
    }

    #[test]
    fn json_rejects_broken_involution() {
        let c = fixtures::fs_cover(2);
        let mut doc = c.to_json_value();
        doc.invol.half_edges[0] = 0;
        assert!(DoubleCover::from_json_value(&doc).is_err());
    }

    #[test]
    fn white_vertices_are_always_split() {
        let base = fixtures::a3_quintic();
        for c in enumerate_covers(&base).unwrap() {
            assert_eq!(c.sheet(1), Sheet::Split);
            let pre = c.preimages(1);
            assert_eq!(c.total().vertex(pre[0]), c.total().vertex(pre[1]));
        }
    }
}
