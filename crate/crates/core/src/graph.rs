//! Half-edge dual graphs.
//!
//! A graph is a list of vertices, a list of half-edges each incident to one
//! vertex, and a pairing of half-edges. A paired couple is an edge; two
//! halves at the same vertex make a loop. Unpaired half-edges are legs and
//! only appear in tail templates.
//!
//! Black vertices are curve components labeled by geometric genus. White
//! vertices are singular points labeled by their [`SingularityType`]; their
//! genus is the tail genus of that type and their degree is its branch count.

use std::collections::{BTreeMap, VecDeque};
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::singularity::SingularityType;

#[derive(Copy, Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Color {
    Black,
    White,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Vertex {
    pub color: Color,
    pub genus: u32,
    pub sing: Option<SingularityType>,
    /// Plane degree of the component, when known.
    pub degree: Option<u8>,
}

impl Vertex {
    pub fn black(genus: u32) -> Self {
        Self {
            color: Color::Black,
            genus,
            sing: None,
            degree: None,
        }
    }

    pub fn component(degree: u8, genus: u32) -> Self {
        Self {
            degree: Some(degree),
            ..Self::black(genus)
        }
    }

    pub fn white(sing: SingularityType) -> Self {
        Self {
            color: Color::White,
            genus: sing.tail_genus(),
            sing: Some(sing),
            degree: None,
        }
    }

    pub fn is_black(&self) -> bool {
        self.color == Color::Black
    }

    pub fn is_white(&self) -> bool {
        self.color == Color::White
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Leg {
    pub half_edge: usize,
    pub name: String,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct DualGraph {
    vertices: Vec<Vertex>,
    incidence: Vec<usize>,
    pairing: Vec<Option<usize>>,
    legs: Vec<Leg>,
}

impl DualGraph {
    pub fn new() -> Self {
        Self::default()
    }

    /// Builds a graph from raw parts and validates the structural invariants.
    pub fn from_parts(
        vertices: Vec<Vertex>,
        incidence: Vec<usize>,
        pairing: Vec<Option<usize>>,
        legs: Vec<Leg>,
    ) -> Result<Self> {
        let g = Self {
            vertices,
            incidence,
            pairing,
            legs,
        };
        g.validate()?;
        Ok(g)
    }

    pub fn add_vertex(&mut self, v: Vertex) -> usize {
        self.vertices.push(v);
        self.vertices.len() - 1
    }

    fn add_half_edge(&mut self, v: usize) -> usize {
        assert!(v < self.vertices.len(), "vertex {v} out of range");
        self.incidence.push(v);
        self.pairing.push(None);
        self.incidence.len() - 1
    }

    /// Adds an edge and returns its two half-edges (at `u`, at `v`).
    pub fn add_edge(&mut self, u: usize, v: usize) -> (usize, usize) {
        let a = self.add_half_edge(u);
        let b = self.add_half_edge(v);
        self.pairing[a] = Some(b);
        self.pairing[b] = Some(a);
        (a, b)
    }

    pub fn add_leg(&mut self, v: usize, name: impl Into<String>) -> usize {
        let h = self.add_half_edge(v);
        self.legs.push(Leg {
            half_edge: h,
            name: name.into(),
        });
        h
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn half_edge_count(&self) -> usize {
        self.incidence.len()
    }

    pub fn edge_count(&self) -> usize {
        self.pairing.iter().filter(|p| p.is_some()).count() / 2
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.vertices
    }

    pub fn vertex(&self, v: usize) -> &Vertex {
        &self.vertices[v]
    }

    pub fn vertex_mut(&mut self, v: usize) -> &mut Vertex {
        &mut self.vertices[v]
    }

    /// Vertex carrying half-edge `h`.
    pub fn incidence(&self, h: usize) -> usize {
        self.incidence[h]
    }

    pub fn pair(&self, h: usize) -> Option<usize> {
        self.pairing[h]
    }

    pub fn legs(&self) -> &[Leg] {
        &self.legs
    }

    pub fn has_legs(&self) -> bool {
        !self.legs.is_empty()
    }

    pub fn is_leg(&self, h: usize) -> bool {
        self.pairing[h].is_none()
    }

    /// Edges as `(h, pair(h))` with `h < pair(h)`, ordered by `h`.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        self.pairing
            .iter()
            .enumerate()
            .filter_map(|(h, p)| p.filter(|&q| q > h).map(|q| (h, q)))
            .collect()
    }

    /// Edges as vertex pairs, in the order of [`DualGraph::edges`].
    pub fn edge_endpoints(&self) -> Vec<(usize, usize)> {
        self.edges()
            .into_iter()
            .map(|(a, b)| (self.incidence[a], self.incidence[b]))
            .collect()
    }

    /// Half-edges at `v`, ascending.
    pub fn half_edges_at(&self, v: usize) -> Vec<usize> {
        (0..self.incidence.len())
            .filter(|&h| self.incidence[h] == v)
            .collect()
    }

    /// Number of incident half-edges, legs included.
    pub fn valence(&self, v: usize) -> usize {
        self.incidence.iter().filter(|&&w| w == v).count()
    }

    pub fn is_realized(&self) -> bool {
        self.vertices.iter().all(Vertex::is_black)
    }

    pub fn white_vertices(&self) -> Vec<usize> {
        (0..self.vertices.len())
            .filter(|&v| self.vertices[v].is_white())
            .collect()
    }

    /// Structural checks plus the white-vertex label rules.
    pub fn validate(&self) -> Result<()> {
        let n = self.vertices.len();
        if self.pairing.len() != self.incidence.len() {
            return Err(Error::InvalidGraph(
                "pairing and incidence lengths differ".into(),
            ));
        }
        for (h, &v) in self.incidence.iter().enumerate() {
            if v >= n {
                return Err(Error::InvalidGraph(format!(
                    "half-edge {h} references missing vertex {v}"
                )));
            }
        }
        let mut leg_seen = vec![false; self.incidence.len()];
        for leg in &self.legs {
            if leg.half_edge >= self.incidence.len() || self.pairing[leg.half_edge].is_some() {
                return Err(Error::InvalidGraph(format!(
                    "leg {} is not an unpaired half-edge",
                    leg.name
                )));
            }
            if std::mem::replace(&mut leg_seen[leg.half_edge], true) {
                return Err(Error::InvalidGraph(format!(
                    "leg {} declared twice",
                    leg.name
                )));
            }
        }
        for (h, p) in self.pairing.iter().enumerate() {
            match *p {
                Some(q) => {
                    if q >= self.pairing.len() || q == h || self.pairing[q] != Some(h) {
                        return Err(Error::InvalidGraph(format!(
                            "pairing is not a fixed-point-free involution at half-edge {h}"
                        )));
                    }
                }
                None if !leg_seen[h] => {
                    return Err(Error::InvalidGraph(format!(
                        "half-edge {h} is unpaired and not a declared leg"
                    )));
                }
                None => {}
            }
        }
        for (v, vert) in self.vertices.iter().enumerate() {
            match (vert.color, vert.sing) {
                (Color::White, Some(t)) => {
                    if vert.genus != t.tail_genus() {
                        return Err(Error::InvalidGraph(format!(
                            "white vertex {v} ({t}) has genus {} but tail genus is {}",
                            vert.genus,
                            t.tail_genus()
                        )));
                    }
                    let deg = self.valence(v);
                    if deg as u32 != t.branches() {
                        return Err(Error::InvalidGraph(format!(
                            "white vertex {v} ({t}) has degree {deg} but {} branches",
                            t.branches()
                        )));
                    }
                }
                (Color::White, None) => {
                    return Err(Error::InvalidGraph(format!(
                        "white vertex {v} has no singularity label"
                    )))
                }
                (Color::Black, Some(_)) => {
                    return Err(Error::InvalidGraph(format!(
                        "black vertex {v} carries a singularity label"
                    )))
                }
                (Color::Black, None) => {}
            }
        }
        Ok(())
    }

    /// [`DualGraph::validate`] plus: every edge joins black to white, no legs.
    pub fn validate_bipartite(&self) -> Result<()> {
        self.validate()?;
        if self.has_legs() {
            return Err(Error::HasLegs);
        }
        for (a, b) in self.edge_endpoints() {
            if self.vertices[a].color == self.vertices[b].color {
                return Err(Error::InvalidGraph(format!(
                    "edge {a}-{b} does not join a black and a white vertex"
                )));
            }
        }
        Ok(())
    }

    /// `E - V + C`.
    pub fn first_betti(&self) -> Result<u32> {
        if self.has_legs() {
            return Err(Error::HasLegs);
        }
        Ok(self.betti_ignoring_legs())
    }

    pub(crate) fn betti_ignoring_legs(&self) -> u32 {
        let c = self.component_count();
        (self.edge_count() + c - self.vertices.len()) as u32
    }

    /// Sum of vertex genera plus the first Betti number.
    pub fn genus(&self) -> Result<u32> {
        Ok(self.genus_sum() + self.first_betti()?)
    }

    pub(crate) fn genus_ignoring_legs(&self) -> u32 {
        self.genus_sum() + self.betti_ignoring_legs()
    }

    pub fn genus_sum(&self) -> u32 {
        self.vertices.iter().map(|v| v.genus).sum()
    }

    fn vertex_adjacency(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.vertices.len()];
        for (a, b) in self.edge_endpoints() {
            adj[a].push(b);
            adj[b].push(a);
        }
        adj
    }

    /// Vertex sets of the connected components, each ascending, ordered by
    /// smallest member.
    pub fn connected_components(&self) -> Vec<Vec<usize>> {
        let adj = self.vertex_adjacency();
        let mut seen = vec![false; self.vertices.len()];
        let mut parts = Vec::new();
        for start in 0..self.vertices.len() {
            if seen[start] {
                continue;
            }
            seen[start] = true;
            let mut part = vec![start];
            let mut queue = VecDeque::from([start]);
            while let Some(v) = queue.pop_front() {
                for &w in &adj[v] {
                    if !seen[w] {
                        seen[w] = true;
                        part.push(w);
                        queue.push_back(w);
                    }
                }
            }
            part.sort_unstable();
            parts.push(part);
        }
        parts
    }

    pub fn component_count(&self) -> usize {
        self.connected_components().len()
    }

    pub fn is_connected(&self) -> bool {
        self.component_count() == 1
    }

    /// The subgraph on `vs` keeping exactly the edges with both ends in `vs`.
    ///
    /// Vertices are renumbered in ascending order of `vs`; legs at kept
    /// vertices are kept.
    pub fn induced_subgraph(&self, vs: &[usize]) -> DualGraph {
        let mut keep: Vec<usize> = vs.to_vec();
        keep.sort_unstable();
        keep.dedup();
        let mut new_index = vec![usize::MAX; self.vertices.len()];
        let mut out = DualGraph::new();
        for &v in &keep {
            new_index[v] = out.add_vertex(self.vertices[v].clone());
        }
        for (a, b) in self.edges() {
            let (u, w) = (self.incidence[a], self.incidence[b]);
            if new_index[u] != usize::MAX && new_index[w] != usize::MAX {
                out.add_edge(new_index[u], new_index[w]);
            }
        }
        for leg in &self.legs {
            let v = self.incidence[leg.half_edge];
            if new_index[v] != usize::MAX {
                out.add_leg(new_index[v], leg.name.clone());
            }
        }
        out
    }

    /// Disjoint union; the vertices of `other` are shifted after ours.
    pub fn disjoint_union(&self, other: &DualGraph) -> DualGraph {
        let mut out = self.clone();
        let vshift = out.vertices.len();
        let hshift = out.incidence.len();
        out.vertices.extend(other.vertices.iter().cloned());
        out.incidence
            .extend(other.incidence.iter().map(|&v| v + vshift));
        out.pairing
            .extend(other.pairing.iter().map(|p| p.map(|q| q + hshift)));
        out.legs.extend(other.legs.iter().map(|l| Leg {
            half_edge: l.half_edge + hshift,
            name: l.name.clone(),
        }));
        out
    }

    /// Renumbers vertices by `vperm[old] = new` and half-edges by
    /// `hperm[old] = new`. Leg order is kept.
    pub fn permuted(&self, vperm: &[usize], hperm: &[usize]) -> DualGraph {
        let n = self.vertices.len();
        let m = self.incidence.len();
        assert_eq!(vperm.len(), n);
        assert_eq!(hperm.len(), m);
        let mut vertices = vec![Vertex::black(0); n];
        for (old, v) in self.vertices.iter().enumerate() {
            vertices[vperm[old]] = v.clone();
        }
        let mut incidence = vec![0; m];
        let mut pairing = vec![None; m];
        for old in 0..m {
            incidence[hperm[old]] = vperm[self.incidence[old]];
            pairing[hperm[old]] = self.pairing[old].map(|q| hperm[q]);
        }
        let legs = self
            .legs
            .iter()
            .map(|l| Leg {
                half_edge: hperm[l.half_edge],
                name: l.name.clone(),
            })
            .collect();
        DualGraph {
            vertices,
            incidence,
            pairing,
            legs,
        }
    }

    /// Renumbers half-edges so that edge `i` (in [`DualGraph::edges`] order)
    /// owns half-edges `2i` and `2i + 1`, followed by the legs in order.
    /// Returns the graph and the map `old half-edge -> new half-edge`.
    pub fn normalized(&self) -> (DualGraph, Vec<usize>) {
        let mut hperm = vec![usize::MAX; self.incidence.len()];
        let mut next = 0;
        for (a, b) in self.edges() {
            hperm[a] = next;
            hperm[b] = next + 1;
            next += 2;
        }
        for leg in &self.legs {
            hperm[leg.half_edge] = next;
            next += 1;
        }
        let identity: Vec<usize> = (0..self.vertices.len()).collect();
        (self.permuted(&identity, &hperm), hperm)
    }

    pub fn to_json_value(&self) -> GraphJson {
        let vertices = self
            .vertices
            .iter()
            .enumerate()
            .map(|(id, v)| VertexJson {
                id,
                color: v.color,
                genus: v.genus,
                sing: v.sing,
                degree: v.degree,
            })
            .collect();
        let edges = self
            .edge_endpoints()
            .into_iter()
            .map(|(a, b)| [a, b])
            .collect();
        let legs = self
            .legs
            .iter()
            .map(|l| (self.incidence[l.half_edge], l.name.clone()))
            .collect();
        GraphJson {
            vertices,
            edges,
            legs,
        }
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(&self.to_json_value()).expect("graph json serializes")
    }

    /// Reads the JSON graph format. Edge `i` gets half-edges `2i`, `2i + 1`;
    /// legs follow in the listed order.
    pub fn from_json_value(doc: &GraphJson) -> Result<Self> {
        let mut ids = BTreeMap::new();
        let mut g = DualGraph::new();
        for v in &doc.vertices {
            if let Some(t) = v.sing {
                if v.color == Color::White && v.genus != t.tail_genus() {
                    return Err(Error::Parse(format!(
                        "vertex {}: genus {} does not match tail genus of {t}",
                        v.id, v.genus
                    )));
                }
            }
            let idx = g.add_vertex(Vertex {
                color: v.color,
                genus: v.genus,
                sing: v.sing,
                degree: v.degree,
            });
            if ids.insert(v.id, idx).is_some() {
                return Err(Error::Parse(format!("duplicate vertex id {}", v.id)));
            }
        }
        let lookup = |id: usize| {
            ids.get(&id)
                .copied()
                .ok_or_else(|| Error::Parse(format!("unknown vertex id {id}")))
        };
        for [a, b] in &doc.edges {
            g.add_edge(lookup(*a)?, lookup(*b)?);
        }
        for (v, name) in &doc.legs {
            g.add_leg(lookup(*v)?, name.clone());
        }
        g.validate()?;
        Ok(g)
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        let doc: GraphJson = serde_json::from_str(s)?;
        Self::from_json_value(&doc)
    }

    /// Graphviz rendering: black vertices filled and labeled by genus, white
    /// vertices open and labeled by singularity type.
    pub fn to_dot(&self) -> String {
        let mut out = String::from("graph dual {\n  node [shape=circle, fontsize=10];\n");
        for (i, v) in self.vertices.iter().enumerate() {
            match v.color {
                Color::Black => {
                    let _ = writeln!(
                        out,
                        "  v{i} [style=filled, fillcolor=black, fontcolor=white, width=0.3, label=\"{}\"];",
                        v.genus
                    );
                }
                Color::White => {
                    let label = v.sing.map(|t| t.to_string()).unwrap_or_default();
                    let _ = writeln!(out, "  v{i} [label=\"{label}\"];");
                }
            }
        }
        for (a, b) in self.edge_endpoints() {
            let _ = writeln!(out, "  v{a} -- v{b};");
        }
        for (k, leg) in self.legs.iter().enumerate() {
            let v = self.incidence[leg.half_edge];
            let _ = writeln!(
                out,
                "  leg{k} [shape=plaintext, label=\"{}\"];\n  v{v} -- leg{k} [style=dashed];",
                leg.name
            );
        }
        out.push_str("}\n");
        out
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VertexJson {
    pub id: usize,
    pub color: Color,
    pub genus: u32,
    #[serde(default)]
    pub sing: Option<SingularityType>,
    #[serde(default)]
    pub degree: Option<u8>,
}

/// On-disk graph document.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphJson {
    pub vertices: Vec<VertexJson>,
    #[serde(default)]
    pub edges: Vec<[usize; 2]>,
    #[serde(default)]
    pub legs: Vec<(usize, String)>,
}
