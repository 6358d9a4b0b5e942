//! Tail substitution for white vertices and stabilization.

use std::collections::{BTreeMap, BTreeSet};

use itertools::Itertools;

use crate::canon::{canonical_key, CanonicalKey};
use crate::cover::DoubleCover;
use crate::error::{Error, Result};
use crate::graph::{DualGraph, Leg, Vertex};
use crate::singularity::SingularityType;

/// Upper bound on the number of templates for one `(genus, legs)` pair.
pub const TAIL_LIMIT: usize = 10_000;
/// Upper bound on the number of realization choices for one graph.
pub const CHOICE_LIMIT: usize = 1_000_000;
pub const DEFAULT_TAIL_CAP: usize = 2;

/// A connected all-black graph with ordered legs, glued in place of a white
/// vertex.
#[derive(Clone, Debug)]
pub struct TailTemplate {
    graph: DualGraph,
    genus: u32,
    key: CanonicalKey,
    /// Leg permutations `p` (leg `j` goes to leg `p[j]`) induced by
    /// automorphisms.
    symmetries: Vec<Vec<usize>>,
}

impl PartialEq for TailTemplate {
    fn eq(&self, other: &Self) -> bool {
        self.key == other.key
    }
}

impl Eq for TailTemplate {}

impl TailTemplate {
    pub fn new(graph: DualGraph) -> Result<Self> {
        graph.validate()?;
        if !graph.is_realized() {
            return Err(Error::Realize("tail must have only black vertices".into()));
        }
        if !graph.is_connected() {
            return Err(Error::Realize("tail must be connected".into()));
        }
        let genus = graph.genus_ignoring_legs();
        let key = canonical_key(&graph)?;
        let m = graph.legs().len();
        let mut symmetries = Vec::new();
        for p in (0..m).permutations(m) {
            if canonical_key(&with_leg_order(&graph, &p))? == key {
                symmetries.push(p);
            }
        }
        Ok(Self {
            graph,
            genus,
            key,
            symmetries,
        })
    }

    /// One black vertex of genus `g` carrying all `m` legs.
    pub fn smooth(g: u32, m: usize) -> Self {
        let mut graph = DualGraph::new();
        let v = graph.add_vertex(Vertex::black(g));
        for j in 0..m {
            graph.add_leg(v, format!("x{j}"));
        }
        Self::new(graph).expect("smooth tail is valid")
    }

    pub fn graph(&self) -> &DualGraph {
        &self.graph
    }

    pub fn genus(&self) -> u32 {
        self.genus
    }

    pub fn leg_count(&self) -> usize {
        self.graph.legs().len()
    }

    pub fn key(&self) -> &CanonicalKey {
        &self.key
    }

    pub fn is_smooth(&self) -> bool {
        self.graph.vertex_count() == 1 && self.graph.edge_count() == 0
    }

    /// Every genus-0 vertex has at least two incident half-edges, legs
    /// included.
    pub fn is_semistable(&self) -> bool {
        is_semistable(&self.graph)
    }

    pub fn symmetries(&self) -> &[Vec<usize>] {
        &self.symmetries
    }

    /// Leg-to-branch bijections up to automorphisms of the tail:
    /// `matching[j]` is the branch receiving leg `j`. The lexicographically
    /// least member of each orbit is returned.
    pub fn matchings(&self) -> Vec<Vec<usize>> {
        let m = self.leg_count();
        (0..m)
            .permutations(m)
            .filter(|sigma| {
                self.symmetries.iter().all(|p| {
                    // Gluing leg p[j] where leg j used to go.
                    let mut other = vec![0; m];
                    for j in 0..m {
                        other[p[j]] = sigma[j];
                    }
                    *sigma <= other
                })
            })
            .collect()
    }
}

fn with_leg_order(g: &DualGraph, p: &[usize]) -> DualGraph {
    let legs = g.legs();
    let mut reordered = legs.to_vec();
    for (j, leg) in legs.iter().enumerate() {
        reordered[p[j]] = Leg {
            half_edge: leg.half_edge,
            name: leg.name.clone(),
        };
    }
    let incidence = (0..g.half_edge_count()).map(|h| g.incidence(h)).collect();
    let pairing = (0..g.half_edge_count()).map(|h| g.pair(h)).collect();
    DualGraph::from_parts(g.vertices().to_vec(), incidence, pairing, reordered)
        .expect("reordering legs keeps a valid graph")
}

fn is_semistable(g: &DualGraph) -> bool {
    (0..g.vertex_count()).all(|v| g.vertex(v).genus > 0 || g.valence(v) >= 2)
}

/// All connected, semistable, genus-`g` tails with `m` distinguished legs
/// and at most `cap` vertices, up to isomorphism. The smooth tail comes
/// first; the rest are ordered by vertex count, then by key.
pub fn enumerate_tails(g: u32, m: usize, cap: usize) -> Result<Vec<TailTemplate>> {
    if m == 0 || cap == 0 {
        return Err(Error::Realize(
            "tails need at least one leg and one vertex".into(),
        ));
    }
    let mut found: BTreeMap<(usize, CanonicalKey), TailTemplate> = BTreeMap::new();
    let smooth = TailTemplate::smooth(g, m);
    for n in 1..=cap {
        let slots: Vec<(usize, usize)> = (0..n).flat_map(|i| (i..n).map(move |j| (i, j))).collect();
        for b1 in 0..=g {
            let edges = b1 as usize + n - 1;
            for genera in compositions(g - b1, n) {
                for multiset in slots.iter().combinations_with_replacement(edges) {
                    for legs in (0..m).map(|_| 0..n).multi_cartesian_product() {
                        let mut graph = DualGraph::new();
                        for &gv in &genera {
                            graph.add_vertex(Vertex::black(gv));
                        }
                        for &&(a, b) in &multiset {
                            graph.add_edge(a, b);
                        }
                        for (j, &v) in legs.iter().enumerate() {
                            graph.add_leg(v, format!("x{j}"));
                        }
                        if !graph.is_connected() || !is_semistable(&graph) {
                            continue;
                        }
                        let key = canonical_key(&graph)?;
                        if key == *smooth.key() {
                            continue;
                        }
                        let slot = (n, key);
                        if !found.contains_key(&slot) {
                            if found.len() + 1 >= TAIL_LIMIT {
                                return Err(Error::Resource {
                                    what: "tail templates",
                                    limit: TAIL_LIMIT,
                                    reached: found.len() + 1,
                                });
                            }
                            found.insert(slot, TailTemplate::new(graph)?);
                        }
                    }
                }
            }
        }
    }
    let mut out = vec![smooth];
    out.extend(found.into_values());
    Ok(out)
}

/// Ordered ways to write `total` as a sum of `parts` nonnegative integers.
fn compositions(total: u32, parts: usize) -> Vec<Vec<u32>> {
    if parts == 1 {
        return vec![vec![total]];
    }
    let mut out = Vec::new();
    for first in 0..=total {
        for mut rest in compositions(total - first, parts - 1) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash)]
pub enum TailMode {
    /// Only the smooth tail.
    Canonical,
    /// Every semistable tail with at most this many vertices.
    All { cap: usize },
}

/// Tail templates keyed by `(genus, leg count)`.
#[derive(Clone, Debug)]
pub struct TailLibrary {
    mode: TailMode,
    tails: BTreeMap<(u32, usize), Vec<TailTemplate>>,
}

impl TailLibrary {
    pub fn new(mode: TailMode) -> Self {
        Self {
            mode,
            tails: BTreeMap::new(),
        }
    }

    /// A library prepared for every listed singularity type (A1 needs none).
    pub fn for_types(mode: TailMode, types: &[SingularityType]) -> Result<Self> {
        let mut lib = Self::new(mode);
        for t in types {
            if !t.is_node() {
                lib.ensure(t.tail_genus(), t.branches() as usize)?;
            }
        }
        Ok(lib)
    }

    pub fn mode(&self) -> TailMode {
        self.mode
    }

    pub fn ensure(&mut self, g: u32, m: usize) -> Result<&[TailTemplate]> {
        if !self.tails.contains_key(&(g, m)) {
            let list = match self.mode {
                TailMode::Canonical => vec![TailTemplate::smooth(g, m)],
                TailMode::All { cap } => enumerate_tails(g, m, cap)?,
            };
            self.tails.insert((g, m), list);
        }
        Ok(&self.tails[&(g, m)])
    }

    pub fn get(&self, g: u32, m: usize) -> Option<&[TailTemplate]> {
        self.tails.get(&(g, m)).map(Vec::as_slice)
    }

    pub fn for_singularity(&self, t: SingularityType) -> Result<&[TailTemplate]> {
        self.get(t.tail_genus(), t.branches() as usize)
            .ok_or_else(|| Error::Realize(format!("tail library has no entry for {t}")))
    }

    pub fn len(&self) -> usize {
        self.tails.values().map(Vec::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Tail and leg matching for one white vertex. `matching[j]` indexes the
/// half-edges at the white vertex in ascending order.
#[derive(Clone, Debug)]
pub struct TailChoice<'a> {
    pub template: &'a TailTemplate,
    pub matching: Vec<usize>,
}

/// Choices keyed by white vertex; A1 vertices are absent.
pub type Realization<'a> = BTreeMap<usize, TailChoice<'a>>;

/// Where an element of a substituted graph came from.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Origin {
    Kept(usize),
    Tail { white: usize, local: usize },
}

#[derive(Clone, Debug, Default)]
pub struct Provenance {
    pub vertices: Vec<Origin>,
    pub half_edges: Vec<Origin>,
}

/// Core substitution. `pick(w)` returns the template for white vertex `w`
/// and, for each leg, the half-edge at `w` it replaces; A1 vertices are
/// spliced without consulting `pick`.
pub(crate) fn substitute<'t>(
    g: &DualGraph,
    mut pick: impl FnMut(usize) -> Result<(&'t TailTemplate, Vec<usize>)>,
) -> Result<(DualGraph, Provenance)> {
    if g.has_legs() {
        return Err(Error::HasLegs);
    }
    let mut vertices = Vec::new();
    let mut prov = Provenance::default();
    let mut vnew = vec![usize::MAX; g.vertex_count()];
    for (v, vert) in g.vertices().iter().enumerate() {
        if vert.is_black() {
            vnew[v] = vertices.len();
            vertices.push(vert.clone());
            prov.vertices.push(Origin::Kept(v));
        }
    }
    let mut tails: Vec<(usize, &TailTemplate, Vec<usize>, usize)> = Vec::new();
    let mut nodes = Vec::new();
    for w in g.white_vertices() {
        let t = g.vertex(w).sing.expect("white vertex has a label");
        let at = g.half_edges_at(w);
        for &h in &at {
            let p = g.pair(h).expect("no legs");
            if !g.vertex(g.incidence(p)).is_black() {
                return Err(Error::Realize(format!(
                    "white vertex {w} is adjacent to a white vertex"
                )));
            }
        }
        if t.is_node() {
            if at.len() != 2 {
                return Err(Error::Realize(format!(
                    "A1 vertex {w} has valence {}",
                    at.len()
                )));
            }
            nodes.push(at);
            continue;
        }
        let (tpl, legs_to) = pick(w)?;
        if tpl.genus() != t.tail_genus() {
            return Err(Error::Realize(format!(
                "tail of genus {} for {t} at vertex {w}, expected {}",
                tpl.genus(),
                t.tail_genus()
            )));
        }
        if tpl.leg_count() != at.len() || legs_to.len() != at.len() {
            return Err(Error::Realize(format!(
                "tail with {} legs for {} branches at vertex {w}",
                tpl.leg_count(),
                at.len()
            )));
        }
        let mut sorted = legs_to.clone();
        sorted.sort_unstable();
        if sorted != at {
            return Err(Error::Realize(format!(
                "leg matching at vertex {w} is not a bijection onto its branches"
            )));
        }
        let offset = vertices.len();
        for (local, vert) in tpl.graph().vertices().iter().enumerate() {
            vertices.push(vert.clone());
            prov.vertices.push(Origin::Tail { white: w, local });
        }
        tails.push((w, tpl, legs_to, offset));
    }

    let mut hnew = vec![usize::MAX; g.half_edge_count()];
    let mut incidence = Vec::new();
    for h in 0..g.half_edge_count() {
        let v = g.incidence(h);
        if g.vertex(v).is_black() {
            hnew[h] = incidence.len();
            incidence.push(vnew[v]);
            prov.half_edges.push(Origin::Kept(h));
        }
    }
    let mut tail_h: Vec<usize> = Vec::with_capacity(tails.len());
    for (w, tpl, _, offset) in &tails {
        tail_h.push(incidence.len());
        for local in 0..tpl.graph().half_edge_count() {
            incidence.push(offset + tpl.graph().incidence(local));
            prov.half_edges.push(Origin::Tail { white: *w, local });
        }
    }

    let mut pairing = vec![None; incidence.len()];
    let mut join = |a: usize, b: usize| {
        pairing[a] = Some(b);
        pairing[b] = Some(a);
    };
    for (a, b) in g.edges() {
        if hnew[a] != usize::MAX && hnew[b] != usize::MAX {
            join(hnew[a], hnew[b]);
        }
    }
    for at in &nodes {
        let p = g.pair(at[0]).expect("no legs");
        let q = g.pair(at[1]).expect("no legs");
        join(hnew[p], hnew[q]);
    }
    for ((_, tpl, legs_to, _), &base) in tails.iter().zip(&tail_h) {
        let tg = tpl.graph();
        for (a, b) in tg.edges() {
            join(base + a, base + b);
        }
        for (j, leg) in tg.legs().iter().enumerate() {
            let outer = g.pair(legs_to[j]).expect("no legs");
            join(hnew[outer], base + leg.half_edge);
        }
    }
    let out = DualGraph::from_parts(vertices, incidence, pairing, Vec::new())?;
    let (before, after) = (g.genus()?, out.genus()?);
    if before != after {
        return Err(Error::Realize(format!(
            "substitution changed the genus from {before} to {after}"
        )));
    }
    Ok((out, prov))
}

/// Replaces every white vertex by its chosen tail, splicing out A1 vertices.
pub fn realize(g: &DualGraph, choice: &Realization<'_>) -> Result<DualGraph> {
    Ok(realize_with_provenance(g, choice)?.0)
}

pub fn realize_with_provenance(
    g: &DualGraph,
    choice: &Realization<'_>,
) -> Result<(DualGraph, Provenance)> {
    substitute(g, |w| {
        let c = choice
            .get(&w)
            .ok_or_else(|| Error::Realize(format!("no tail chosen for white vertex {w}")))?;
        let at = g.half_edges_at(w);
        let legs_to = c
            .matching
            .iter()
            .map(|&i| {
                at.get(i)
                    .copied()
                    .ok_or_else(|| Error::Realize(format!("branch {i} out of range at {w}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok((c.template, legs_to))
    })
}

/// Every combination of template and matching for the non-A1 white
/// vertices of `g`, in a fixed order.
pub fn realization_choices<'a>(
    g: &DualGraph,
    lib: &'a TailLibrary,
) -> Result<Vec<Realization<'a>>> {
    let per_vertex = tail_options(g, lib, false)?;
    Ok(product(&per_vertex))
}

/// Like [`realization_choices`], keeping one option per white vertex for
/// each class of options that stabilize to the same tail with the same
/// attachment. Stabilization is confluent and the contractions inside a
/// tail are legal in any graph it is glued into, so dropped options lead
/// to isomorphic stable graphs and covers. Also returns the size of the
/// unreduced product.
pub fn reduced_realization_choices<'a>(
    g: &DualGraph,
    lib: &'a TailLibrary,
) -> Result<(Vec<Realization<'a>>, usize)> {
    let raw = tail_options(g, lib, false)?
        .iter()
        .fold(1usize, |acc, (_, o)| acc.saturating_mul(o.len()));
    let per_vertex = tail_options(g, lib, true)?;
    Ok((product(&per_vertex), raw))
}

type Options<'a> = Vec<(usize, Vec<TailChoice<'a>>)>;

fn tail_options<'a>(g: &DualGraph, lib: &'a TailLibrary, reduce: bool) -> Result<Options<'a>> {
    let mut per_vertex: Options<'a> = Vec::new();
    let mut total: usize = 1;
    for w in g.white_vertices() {
        let t = g.vertex(w).sing.expect("white vertex has a label");
        if t.is_node() {
            continue;
        }
        let mut options = Vec::new();
        let mut seen = BTreeSet::new();
        for tpl in lib.for_singularity(t)? {
            for matching in tpl.matchings() {
                if reduce && !seen.insert(attached_key(tpl, &matching)?) {
                    continue;
                }
                options.push(TailChoice {
                    template: tpl,
                    matching,
                });
            }
        }
        total = total.saturating_mul(options.len());
        if total > CHOICE_LIMIT {
            return Err(Error::Resource {
                what: "realization choices",
                limit: CHOICE_LIMIT,
                reached: total,
            });
        }
        per_vertex.push((w, options));
    }
    Ok(per_vertex)
}

fn product<'a>(per_vertex: &Options<'a>) -> Vec<Realization<'a>> {
    if per_vertex.is_empty() {
        return vec![Realization::new()];
    }
    per_vertex
        .iter()
        .map(|(w, opts)| opts.iter().map(move |c| (*w, c.clone())))
        .multi_cartesian_product()
        .map(|pairs| pairs.into_iter().collect())
        .collect()
}

/// Key of the stabilized tail with leg `j` glued to a marker vertex that
/// records branch `matching[j]`. Markers have large distinct genera so
/// they are never contracted and never confused.
fn attached_key(tpl: &TailTemplate, matching: &[usize]) -> Result<CanonicalKey> {
    let tg = tpl.graph();
    let mut g = DualGraph::new();
    for v in tg.vertices() {
        g.add_vertex(v.clone());
    }
    for (a, b) in tg.edges() {
        g.add_edge(tg.incidence(a), tg.incidence(b));
    }
    for (j, leg) in tg.legs().iter().enumerate() {
        let marker = g.add_vertex(Vertex::black(MARKER_GENUS + matching[j] as u32));
        g.add_edge(tg.incidence(leg.half_edge), marker);
    }
    canonical_key(&stabilize(&g)?)
}

const MARKER_GENUS: u32 = 1_000;

/// Smooth tails with the identity matching everywhere.
pub fn canonical_realization<'a>(g: &DualGraph, lib: &'a TailLibrary) -> Result<Realization<'a>> {
    let mut out = Realization::new();
    for w in g.white_vertices() {
        let t = g.vertex(w).sing.expect("white vertex has a label");
        if t.is_node() {
            continue;
        }
        let tpl = lib
            .for_singularity(t)?
            .iter()
            .find(|t| t.is_smooth())
            .ok_or_else(|| Error::Realize(format!("no smooth tail for {t}")))?;
        out.insert(
            w,
            TailChoice {
                template: tpl,
                matching: (0..tpl.leg_count()).collect(),
            },
        );
    }
    Ok(out)
}

/// Mutable graph with deletion flags used by the contraction passes.
struct Work {
    vertices: Vec<Vertex>,
    inc: Vec<usize>,
    pair: Vec<usize>,
    v_alive: Vec<bool>,
    h_alive: Vec<bool>,
    at: Vec<Vec<usize>>,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
enum Step {
    Prune,
    Splice,
}

impl Work {
    fn new(g: &DualGraph) -> Self {
        let n = g.vertex_count();
        let mut at = vec![Vec::new(); n];
        let inc: Vec<usize> = (0..g.half_edge_count()).map(|h| g.incidence(h)).collect();
        for (h, &v) in inc.iter().enumerate() {
            at[v].push(h);
        }
        Self {
            vertices: g.vertices().to_vec(),
            pair: (0..g.half_edge_count())
                .map(|h| g.pair(h).expect("no legs"))
                .collect(),
            inc,
            v_alive: vec![true; n],
            h_alive: vec![true; g.half_edge_count()],
            at,
        }
    }

    fn candidates(&self) -> Vec<usize> {
        (0..self.vertices.len())
            .filter(|&v| self.v_alive[v] && self.vertices[v].genus == 0 && self.at[v].len() <= 2)
            .collect()
    }

    fn step_for(&self, v: usize) -> Result<Step> {
        match self.at[v].as_slice() {
            [_] => Ok(Step::Prune),
            [a, b] if self.pair[*a] == *b => Err(Error::Stabilize(format!(
                "rational vertex {v} carries only a loop"
            ))),
            [_, _] => Ok(Step::Splice),
            _ => Err(Error::Stabilize(format!("isolated rational vertex {v}"))),
        }
    }

    fn apply(&mut self, v: usize, step: Step) {
        match step {
            Step::Prune => {
                let h = self.at[v][0];
                let p = self.pair[h];
                let w = self.inc[p];
                self.h_alive[h] = false;
                self.h_alive[p] = false;
                self.at[w].retain(|&x| x != p);
            }
            Step::Splice => {
                let (a, b) = (self.at[v][0], self.at[v][1]);
                let (pa, pb) = (self.pair[a], self.pair[b]);
                self.h_alive[a] = false;
                self.h_alive[b] = false;
                self.pair[pa] = pb;
                self.pair[pb] = pa;
            }
        }
        self.v_alive[v] = false;
        self.at[v].clear();
    }

    /// Compacts the surviving elements, keeping their relative order.
    fn finish(&self) -> Result<(DualGraph, Vec<usize>, Vec<usize>)> {
        let mut vmap = vec![usize::MAX; self.vertices.len()];
        let mut vertices = Vec::new();
        for v in 0..self.vertices.len() {
            if self.v_alive[v] {
                vmap[v] = vertices.len();
                vertices.push(self.vertices[v].clone());
            }
        }
        let mut hmap = vec![usize::MAX; self.inc.len()];
        let mut next = 0;
        for h in 0..self.inc.len() {
            if self.h_alive[h] {
                hmap[h] = next;
                next += 1;
            }
        }
        let mut incidence = vec![0; next];
        let mut pairing = vec![None; next];
        for h in 0..self.inc.len() {
            if self.h_alive[h] {
                incidence[hmap[h]] = vmap[self.inc[h]];
                pairing[hmap[h]] = Some(hmap[self.pair[h]]);
            }
        }
        let g = DualGraph::from_parts(vertices, incidence, pairing, Vec::new())?;
        Ok((g, vmap, hmap))
    }
}

fn check_stabilizable(g: &DualGraph) -> Result<()> {
    if g.has_legs() {
        return Err(Error::HasLegs);
    }
    if !g.is_realized() {
        return Err(Error::Stabilize("graph still has white vertices".into()));
    }
    if !g.is_connected() {
        return Err(Error::Stabilize("graph is disconnected".into()));
    }
    if g.genus()? < 1 {
        return Err(Error::Stabilize("genus must be positive".into()));
    }
    Ok(())
}

/// Contracts rational vertices of valence one or two until none is left.
pub fn stabilize(g: &DualGraph) -> Result<DualGraph> {
    stabilize_by(g, |_| 0)
}

/// [`stabilize`] with the next vertex chosen by `choose`, which gets the
/// current candidates and returns an index into them.
pub fn stabilize_by(g: &DualGraph, mut choose: impl FnMut(&[usize]) -> usize) -> Result<DualGraph> {
    check_stabilizable(g)?;
    let mut w = Work::new(g);
    loop {
        let cands = w.candidates();
        if cands.is_empty() {
            break;
        }
        let v = cands[choose(&cands) % cands.len()];
        let step = w.step_for(v)?;
        w.apply(v, step);
    }
    Ok(w.finish()?.0)
}

/// Stabilizes base and total together: every contraction in the base is
/// mirrored on both preimages of the contracted vertex.
pub fn stabilize_cover(c: &DoubleCover) -> Result<DoubleCover> {
    c.validate_structure()?;
    check_stabilizable(c.base())?;
    let (proj_v, proj_h, invol_v, invol_h) = c.parts();
    let mut pre: Vec<Vec<usize>> = vec![Vec::new(); c.base().vertex_count()];
    for (u, &v) in proj_v.iter().enumerate() {
        pre[v].push(u);
    }
    let mut base = Work::new(c.base());
    let mut total = Work::new(c.total());
    loop {
        let cands = base.candidates();
        let Some(&v) = cands.first() else { break };
        let step = base.step_for(v)?;
        if pre[v].len() != 2 {
            return Err(Error::Stabilize(format!(
                "contractible vertex {v} has a single preimage"
            )));
        }
        for &u in &pre[v] {
            if total.vertices[u].genus != 0 || total.at[u].len() != base.at[v].len() {
                return Err(Error::Stabilize(format!(
                    "preimage {u} of contractible vertex {v} is not contractible"
                )));
            }
            let s = total.step_for(u)?;
            if s != step {
                return Err(Error::Stabilize(format!(
                    "preimage {u} contracts differently from vertex {v}"
                )));
            }
        }
        base.apply(v, step);
        for &u in &pre[v] {
            total.apply(u, step);
        }
    }
    let (b, bv, bh) = base.finish()?;
    let (t, tv, th) = total.finish()?;
    let mut pv = vec![0; t.vertex_count()];
    let mut iv = vec![0; t.vertex_count()];
    for u in 0..tv.len() {
        if tv[u] != usize::MAX {
            pv[tv[u]] = bv[proj_v[u]];
            iv[tv[u]] = tv[invol_v[u]];
        }
    }
    let mut ph = vec![0; t.half_edge_count()];
    let mut ih = vec![0; t.half_edge_count()];
    for h in 0..th.len() {
        if th[h] != usize::MAX {
            ph[th[h]] = bh[proj_h[h]];
            ih[th[h]] = th[invol_h[h]];
        }
    }
    if pv.contains(&usize::MAX) || ph.contains(&usize::MAX) {
        return Err(Error::Stabilize(
            "surviving element projects to a contracted one".into(),
        ));
    }
    DoubleCover::from_parts(b, t, pv, ph, iv, ih)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::canon::canonical_key;
    use crate::fixtures;
    use rand::{Rng, SeedableRng};

    #[test]
    fn tail_counts_at_cap_one() {
        assert_eq!(enumerate_tails(1, 1, 1).unwrap().len(), 2);
        assert_eq!(enumerate_tails(0, 2, 1).unwrap().len(), 1);
        assert_eq!(enumerate_tails(1, 2, 1).unwrap().len(), 2);
    }

    #[test]
    fn tails_are_valid_and_distinct() {
        for (g, m) in [(1, 1), (1, 2), (1, 3), (2, 1), (2, 2), (2, 3), (3, 3)] {
            let tails = enumerate_tails(g, m, 2).unwrap();
            assert!(tails[0].is_smooth());
            let mut keys: Vec<_> = tails.iter().map(|t| t.key().clone()).collect();
            keys.sort();
            keys.dedup();
            assert_eq!(keys.len(), tails.len());
            for t in &tails {
                assert_eq!(t.genus(), g);
                assert_eq!(t.leg_count(), m);
                assert!(t.graph().vertex_count() <= 2);
                assert!(t.is_semistable());
            }
        }
    }

    #[test]
    fn matchings_respect_symmetry() {
        // Smooth tail: all legs interchangeable, one matching.
        assert_eq!(TailTemplate::smooth(1, 3).matchings().len(), 1);
        // Two legs on different vertices of different genus: both matchings.
        let mut g = DualGraph::new();
        let a = g.add_vertex(Vertex::black(1));
        let b = g.add_vertex(Vertex::black(0));
        g.add_edge(a, b);
        g.add_edge(b, b);
        g.add_leg(a, "x0");
        g.add_leg(b, "x1");
        assert_eq!(TailTemplate::new(g).unwrap().matchings().len(), 2);
    }

    fn lib() -> TailLibrary {
        let mut lib = TailLibrary::new(TailMode::Canonical);
        lib.ensure(1, 3).unwrap();
        lib.ensure(1, 1).unwrap();
        lib.ensure(1, 2).unwrap();
        lib.ensure(3, 2).unwrap();
        lib
    }

    #[test]
    fn d4_cubic_chain() {
        let lib = lib();
        let g = fixtures::d4_cubic();
        let r = realize(&g, &canonical_realization(&g, &lib).unwrap()).unwrap();
        assert_eq!(
            canonical_key(&r).unwrap(),
            canonical_key(&fixtures::d4_cubic_realized()).unwrap()
        );
        let s = stabilize(&r).unwrap();
        assert_eq!(
            canonical_key(&s).unwrap(),
            canonical_key(&fixtures::d4_cubic_stabilized()).unwrap()
        );
    }

    #[test]
    fn quintic_figure_realization() {
        let g = fixtures::quintic_q_cup_l();
        let nodal = enumerate_tails(1, 1, 1)
            .unwrap()
            .into_iter()
            .find(|t| !t.is_smooth())
            .unwrap();
        let smooth = TailTemplate::smooth(1, 3);
        let mut choice = Realization::new();
        choice.insert(
            2,
            TailChoice {
                template: &nodal,
                matching: vec![0],
            },
        );
        choice.insert(
            5,
            TailChoice {
                template: &smooth,
                matching: vec![0, 1, 2],
            },
        );
        let r = realize(&g, &choice).unwrap();
        assert_eq!(r.genus().unwrap(), 6);
        assert_eq!(
            canonical_key(&r).unwrap(),
            canonical_key(&fixtures::quintic_q_cup_l_realized()).unwrap()
        );
    }

    #[test]
    fn a7_contracts_the_line() {
        let lib = lib();
        let g = fixtures::a7_quartic_line();
        let r = realize(&g, &canonical_realization(&g, &lib).unwrap()).unwrap();
        assert_eq!(
            canonical_key(&r).unwrap(),
            canonical_key(&fixtures::a7_quartic_line_realized()).unwrap()
        );
        let s = stabilize(&r).unwrap();
        assert_eq!(
            canonical_key(&s).unwrap(),
            canonical_key(&fixtures::a7_quartic_line_stabilized()).unwrap()
        );
    }

    #[test]
    fn only_nodes_splice_to_loops() {
        let lib = lib();
        let g = fixtures::a1_a2_quintic();
        let r = realize(&g, &canonical_realization(&g, &lib).unwrap()).unwrap();
        assert_eq!(r.vertex_count(), 2);
        assert_eq!(r.genus().unwrap(), g.genus().unwrap());
        assert!(r
            .edges()
            .iter()
            .any(|&(a, b)| r.incidence(a) == r.incidence(b)));
    }

    #[test]
    fn stable_graph_is_unchanged() {
        let g = fixtures::quintic_q_cup_l_realized();
        let s = stabilize(&g).unwrap();
        assert_eq!(canonical_key(&s).unwrap(), canonical_key(&g).unwrap());
    }

    #[test]
    fn valence_two_vertex_between_parallel_edges_becomes_loop() {
        let mut g = DualGraph::new();
        let a = g.add_vertex(Vertex::black(2));
        let r = g.add_vertex(Vertex::black(0));
        g.add_edge(a, r);
        g.add_edge(a, r);
        let s = stabilize(&g).unwrap();
        assert_eq!(s.vertex_count(), 1);
        assert_eq!(s.edge_count(), 1);
        assert_eq!(s.genus().unwrap(), 3);
    }

    #[test]
    fn lone_loop_on_rational_vertex_is_rejected() {
        let mut g = DualGraph::new();
        let a = g.add_vertex(Vertex::black(2));
        let r = g.add_vertex(Vertex::black(0));
        g.add_edge(a, r);
        g.add_edge(r, r);
        // Valence 3, so nothing to do.
        assert!(stabilize(&g).is_ok());
        let mut w = Work::new(&g);
        w.at[r].retain(|&h| g.pair(h).map(|p| g.incidence(p)) == Some(r));
        assert!(w.step_for(r).is_err());
    }

    #[test]
    fn stabilization_order_does_not_matter() {
        let mut rng = rand::rngs::StdRng::seed_from_u64(7);
        let mut g = DualGraph::new();
        let top = g.add_vertex(Vertex::black(2));
        let mut prev = top;
        for _ in 0..5 {
            let v = g.add_vertex(Vertex::black(0));
            g.add_edge(prev, v);
            prev = v;
        }
        g.add_edge(prev, top);
        let leaf = g.add_vertex(Vertex::black(0));
        g.add_edge(leaf, 3);
        let expected = canonical_key(&stabilize(&g).unwrap()).unwrap();
        for _ in 0..50 {
            let s = stabilize_by(&g, |c| rng.gen_range(0..c.len())).unwrap();
            assert_eq!(canonical_key(&s).unwrap(), expected);
            assert_eq!(s.genus().unwrap(), 3);
        }
    }

    #[test]
    fn reduced_choices_reach_the_same_stable_covers() {
        use crate::cover::{enumerate_covers, realize_cover};
        let mut lib = TailLibrary::new(TailMode::All { cap: 2 });
        for g in [
            fixtures::a3_quintic(),
            fixtures::a1_a2_quintic(),
            fixtures::d4_cubic(),
        ] {
            let full = realization_choices(&g, {
                for w in g.white_vertices() {
                    let t = g.vertex(w).sing.unwrap();
                    if !t.is_node() {
                        lib.ensure(t.tail_genus(), t.branches() as usize).unwrap();
                    }
                }
                &lib
            })
            .unwrap();
            let (reduced, raw) = reduced_realization_choices(&g, &lib).unwrap();
            assert_eq!(raw, full.len());
            assert!(reduced.len() <= full.len());
            for c in enumerate_covers(&g).unwrap() {
                let keys = |choices: &[Realization<'_>]| {
                    choices
                        .iter()
                        .map(|ch| {
                            let r = realize_cover(&c, ch).unwrap();
                            stabilize_cover(&r).unwrap().canonical_key().unwrap()
                        })
                        .collect::<BTreeSet<_>>()
                };
                assert_eq!(keys(&full), keys(&reduced));
            }
        }
    }

    #[test]
    fn reduction_merges_rational_bridges() {
        let mut lib = TailLibrary::new(TailMode::All { cap: 2 });
        lib.ensure(1, 3).unwrap();
        let g = fixtures::d4_cubic();
        let (reduced, raw) = reduced_realization_choices(&g, &lib).unwrap();
        assert!(reduced.len() < raw);
    }
}
