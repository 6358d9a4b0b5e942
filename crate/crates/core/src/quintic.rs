//! Candidate plane-quintic configurations as bipartite dual graphs.
//!
//! The enumeration is a combinatorial over-approximation. Enforced:
//! degrees summing to 5, the genus bounds for plane curves of each degree,
//! connectivity, genus 6 via the delta budget, two distinct lines meeting
//! in exactly one singular point, and smoothness of lines and conics (no
//! singular point with two branches on one of them, no singular branch on
//! one of them). Intersection multiplicities and Bézout counts are not.

use std::collections::BTreeSet;

use rayon::prelude::*;
use serde::Serialize;

use crate::canon::{canonical_key, CanonicalKey};
use crate::error::{Error, Result};
use crate::graph::{DualGraph, Vertex};
use crate::singularity::{Family, SingularityType};

/// Search nodes visited per work item before giving up.
pub const ENUM_NODE_LIMIT: usize = 20_000_000;
pub const DEFAULT_DELTA_CAP: u32 = 6;

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Component {
    pub degree: u8,
    pub genus: u32,
}

/// One singular point and the components its branches lie on.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Placement {
    pub sing: SingularityType,
    /// Component index per branch, ascending.
    pub branches: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct QuinticConfig {
    pub components: Vec<Component>,
    pub singularities: Vec<Placement>,
}

impl QuinticConfig {
    pub fn partition(&self) -> Vec<u8> {
        self.components.iter().map(|c| c.degree).collect()
    }

    pub fn partition_label(&self) -> String {
        self.partition()
            .iter()
            .map(u8::to_string)
            .collect::<Vec<_>>()
            .join("+")
    }

    pub fn delta_sum(&self) -> u32 {
        self.singularities.iter().map(|p| p.sing.delta()).sum()
    }

    /// `5 + #components - sum of genera`.
    pub fn delta_budget(&self) -> i64 {
        5 + self.components.len() as i64
            - self
                .components
                .iter()
                .map(|c| i64::from(c.genus))
                .sum::<i64>()
    }

    pub fn is_irreducible(&self) -> bool {
        self.components.len() == 1
    }

    /// Singularity types with multiplicity, sorted.
    pub fn singularity_types(&self) -> Vec<SingularityType> {
        let mut v: Vec<_> = self.singularities.iter().map(|p| p.sing).collect();
        v.sort();
        v
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidGraph(m));
        if self
            .components
            .iter()
            .map(|c| u32::from(c.degree))
            .sum::<u32>()
            != 5
        {
            return bad("degrees do not sum to 5".into());
        }
        for c in &self.components {
            if c.degree == 0 || c.genus > max_genus(c.degree) {
                return bad(format!("component {c:?} violates the genus bound"));
            }
        }
        for p in &self.singularities {
            if p.branches.len() != p.sing.branches() as usize
                || p.branches.iter().any(|&i| i >= self.components.len())
            {
                return bad(format!("bad branch assignment for {}", p.sing));
            }
            if !smooth_low_degree(&self.components, p) {
                return bad(format!("{} is singular on a line or conic", p.sing));
            }
        }
        if i64::from(self.delta_sum()) != self.delta_budget() {
            return bad("delta sum does not match the budget".into());
        }
        let lines: Vec<usize> = (0..self.components.len())
            .filter(|&i| self.components[i].degree == 1)
            .collect();
        for (i, &a) in lines.iter().enumerate() {
            for &b in &lines[i + 1..] {
                let shared = self
                    .singularities
                    .iter()
                    .filter(|p| p.branches.contains(&a) && p.branches.contains(&b))
                    .count();
                if shared != 1 {
                    return bad(format!("lines {a} and {b} share {shared} singular points"));
                }
            }
        }
        let g = config_to_graph(self);
        if !g.is_connected() || g.genus()? != 6 {
            return bad("graph is not connected of genus 6".into());
        }
        Ok(())
    }
}

/// Genus bound of a plane curve of degree `d`.
pub fn max_genus(d: u8) -> u32 {
    let d = u32::from(d);
    (d.saturating_sub(1)) * (d.saturating_sub(2)) / 2
}

/// Lines and conics are smooth: a singular point has at most one branch
/// on each, unibranch points avoid them, and the singular branch of a
/// `D_odd` point lies on a curve of degree at least 3.
fn smooth_low_degree(components: &[Component], p: &Placement) -> bool {
    let low = |i: usize| components[i].degree <= 2;
    for w in p.branches.windows(2) {
        if w[0] == w[1] && low(w[0]) {
            return false;
        }
    }
    let t = p.sing;
    let unibranch = t.family() == Family::A && t.index().is_multiple_of(2);
    let d_odd = t.family() == Family::D && t.index() % 2 == 1;
    if (unibranch || d_odd) && p.branches.iter().all(|&i| low(i)) {
        return false;
    }
    true
}

/// The 7 partitions of 5, parts descending, coarsest first.
pub fn enumerate_partitions() -> Vec<Vec<u8>> {
    fn go(rest: u8, max: u8, cur: &mut Vec<u8>, out: &mut Vec<Vec<u8>>) {
        if rest == 0 {
            out.push(cur.clone());
            return;
        }
        for p in (1..=rest.min(max)).rev() {
            cur.push(p);
            go(rest - p, p, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(5, 5, &mut Vec::new(), &mut out);
    out
}

pub fn config_to_graph(c: &QuinticConfig) -> DualGraph {
    let mut g = DualGraph::new();
    for comp in &c.components {
        g.add_vertex(Vertex::component(comp.degree, comp.genus));
    }
    for p in &c.singularities {
        let w = g.add_vertex(Vertex::white(p.sing));
        for &b in &p.branches {
            g.add_edge(b, w);
        }
    }
    g
}

/// Genus assignments with genera non-increasing across equal degrees.
fn genus_assignments(partition: &[u8]) -> Vec<Vec<u32>> {
    let mut out = vec![Vec::new()];
    for (i, &d) in partition.iter().enumerate() {
        let mut next = Vec::new();
        for prefix in &out {
            let cap = if i > 0 && partition[i - 1] == d {
                prefix[i - 1]
            } else {
                max_genus(d)
            };
            for g in 0..=cap {
                let mut p: Vec<u32> = prefix.clone();
                p.push(g);
                next.push(p);
            }
        }
        out = next;
    }
    out
}

/// Multisets of `size` indices from `0..n`, ascending.
fn multisets(n: usize, size: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, n: usize, size: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == size {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            go(i, n, size, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(0, n, size, &mut Vec::new(), &mut out);
    out
}

struct Search<'a> {
    components: &'a [Component],
    placements: Vec<Placement>,
    deltas: Vec<u32>,
    /// For each placement, the line pairs it covers (as indices).
    covers: Vec<Vec<usize>>,
    pair_count: usize,
    nodes: usize,
    found: Vec<Vec<usize>>,
}

impl Search<'_> {
    fn run(
        &mut self,
        start: usize,
        budget: u32,
        chosen: &mut Vec<usize>,
        used: &mut [u8],
    ) -> Result<()> {
        self.nodes += 1;
        if self.nodes > ENUM_NODE_LIMIT {
            return Err(Error::Resource {
                what: "quintic enumeration search nodes",
                limit: ENUM_NODE_LIMIT,
                reached: self.nodes,
            });
        }
        if budget == 0 {
            if used.iter().all(|&u| u == 1) {
                self.found.push(chosen.clone());
            }
            return Ok(());
        }
        for i in start..self.placements.len() {
            if self.deltas[i] > budget {
                continue;
            }
            if self.covers[i].iter().any(|&p| used[p] == 1) {
                continue;
            }
            for &p in &self.covers[i] {
                used[p] = 1;
            }
            chosen.push(i);
            let next = if self.covers[i].is_empty() { i } else { i + 1 };
            self.run(next, budget - self.deltas[i], chosen, used)?;
            chosen.pop();
            for &p in &self.covers[i] {
                used[p] = 0;
            }
        }
        Ok(())
    }
}

fn configs_for(components: &[Component], types: &[SingularityType]) -> Result<Vec<QuinticConfig>> {
    let budget =
        5 + components.len() as i64 - components.iter().map(|c| i64::from(c.genus)).sum::<i64>();
    if budget < 0 {
        return Ok(Vec::new());
    }
    let budget = budget as u32;
    let lines: Vec<usize> = (0..components.len())
        .filter(|&i| components[i].degree == 1)
        .collect();
    let mut pairs = Vec::new();
    for (i, &a) in lines.iter().enumerate() {
        for &b in &lines[i + 1..] {
            pairs.push((a, b));
        }
    }
    let mut placements = Vec::new();
    for &t in types {
        if t.delta() > budget {
            continue;
        }
        for branches in multisets(components.len(), t.branches() as usize) {
            let p = Placement { sing: t, branches };
            if smooth_low_degree(components, &p) {
                placements.push(p);
            }
        }
    }
    let covers: Vec<Vec<usize>> = placements
        .iter()
        .map(|p| {
            (0..pairs.len())
                .filter(|&k| p.branches.contains(&pairs[k].0) && p.branches.contains(&pairs[k].1))
                .collect()
        })
        .collect();
    let mut search = Search {
        components,
        deltas: placements.iter().map(|p| p.sing.delta()).collect(),
        placements,
        covers,
        pair_count: pairs.len(),
        nodes: 0,
        found: Vec::new(),
    };
    let mut used = vec![0u8; search.pair_count];
    search.run(0, budget, &mut Vec::new(), &mut used)?;
    let mut out = Vec::new();
    for chosen in &search.found {
        let c = QuinticConfig {
            components: search.components.to_vec(),
            singularities: chosen
                .iter()
                .map(|&i| search.placements[i].clone())
                .collect(),
        };
        if config_to_graph(&c).is_connected() {
            out.push(c);
        }
    }
    Ok(out)
}

/// Singularity types admitted by the flags, in a fixed order.
pub fn admitted_types(allowable_only: bool, delta_cap: u32) -> Vec<SingularityType> {
    SingularityType::all_with_delta_at_most(delta_cap)
        .into_iter()
        .filter(|t| !allowable_only || t.is_allowable())
        .collect()
}

/// All configurations up to graph isomorphism, grouped by partition in the
/// order of [`enumerate_partitions`], then by canonical key.
pub fn enumerate_configs(allowable_only: bool, delta_cap: u32) -> Result<Vec<QuinticConfig>> {
    if delta_cap == 0 {
        return Err(Error::Parse("delta cap must be positive".into()));
    }
    let types = admitted_types(allowable_only, delta_cap);
    let mut items = Vec::new();
    for (pi, partition) in enumerate_partitions().into_iter().enumerate() {
        for genera in genus_assignments(&partition) {
            let comps: Vec<Component> = partition
                .iter()
                .zip(&genera)
                .map(|(&degree, &genus)| Component { degree, genus })
                .collect();
            items.push((pi, comps));
        }
    }
    let batches: Vec<(usize, Vec<(CanonicalKey, QuinticConfig)>)> = items
        .par_iter()
        .map(|(pi, comps)| {
            let configs = configs_for(comps, &types)?;
            let keyed = configs
                .into_iter()
                .map(|c| Ok((canonical_key(&config_to_graph(&c))?, c)))
                .collect::<Result<Vec<_>>>()?;
            Ok((*pi, keyed))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut all: Vec<(usize, CanonicalKey, QuinticConfig)> = batches
        .into_iter()
        .flat_map(|(pi, v)| v.into_iter().map(move |(k, c)| (pi, k, c)))
        .collect();
    all.sort_by(|a, b| a.0.cmp(&b.0).then_with(|| a.1.cmp(&b.1)));
    let mut seen = BTreeSet::new();
    Ok(all
        .into_iter()
        .filter(|(_, k, _)| seen.insert(k.clone()))
        .map(|(_, _, c)| c)
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn seven_partitions() {
        let p = enumerate_partitions();
        assert_eq!(p.len(), 7);
        assert!(p.contains(&vec![3, 2]));
        assert!(p.contains(&vec![1, 1, 1, 1, 1]));
        assert_eq!(p[0], vec![5]);
    }

    #[test]
    fn genus_bounds() {
        assert_eq!(max_genus(1), 0);
        assert_eq!(max_genus(2), 0);
        assert_eq!(max_genus(3), 1);
        assert_eq!(max_genus(4), 3);
        assert_eq!(max_genus(5), 6);
    }

    fn keys(configs: &[QuinticConfig]) -> BTreeSet<CanonicalKey> {
        configs
            .iter()
            .map(|c| canonical_key(&config_to_graph(c)).unwrap())
            .collect()
    }

    #[test]
    fn worked_examples_are_enumerated() {
        let all = enumerate_configs(false, DEFAULT_DELTA_CAP).unwrap();
        let ks = keys(&all);
        for g in [
            fixtures::quintic_q_cup_l(),
            fixtures::a3_quintic(),
            fixtures::a1_a2_quintic(),
        ] {
            assert!(ks.contains(&canonical_key(&g).unwrap()));
        }
        let mut smooth = DualGraph::new();
        smooth.add_vertex(Vertex::component(5, 6));
        assert!(ks.contains(&canonical_key(&smooth).unwrap()));
    }

    #[test]
    fn every_config_is_valid() {
        for allowable in [true, false] {
            for c in enumerate_configs(allowable, DEFAULT_DELTA_CAP).unwrap() {
                c.validate().unwrap();
                let g = config_to_graph(&c);
                g.validate_bipartite().unwrap();
                assert_eq!(g.genus().unwrap(), 6);
                assert_eq!(i64::from(c.delta_sum()), c.delta_budget());
                if allowable {
                    assert!(c.singularities.iter().all(|p| p.sing.is_allowable()));
                }
            }
        }
    }

    #[test]
    fn five_general_lines() {
        let all = enumerate_configs(true, DEFAULT_DELTA_CAP).unwrap();
        let found = all.iter().any(|c| {
            c.components.len() == 5
                && c.singularities.len() == 10
                && c.singularities.iter().all(|p| p.sing.is_node())
        });
        assert!(found);
    }

    #[test]
    fn irreducible_with_one_node() {
        let all = enumerate_configs(true, DEFAULT_DELTA_CAP).unwrap();
        assert!(all.iter().any(|c| c.is_irreducible()
            && c.components[0].genus == 5
            && c.singularity_types() == vec![SingularityType::a(1)]));
    }

    #[test]
    fn two_lines_and_cubic_through_d4() {
        let c = QuinticConfig {
            components: vec![
                Component {
                    degree: 3,
                    genus: 1,
                },
                Component {
                    degree: 1,
                    genus: 0,
                },
                Component {
                    degree: 1,
                    genus: 0,
                },
            ],
            singularities: vec![
                Placement {
                    sing: SingularityType::d(4),
                    branches: vec![0, 1, 2],
                },
                Placement {
                    sing: SingularityType::a(1),
                    branches: vec![0, 1],
                },
                Placement {
                    sing: SingularityType::a(1),
                    branches: vec![0, 1],
                },
                Placement {
                    sing: SingularityType::a(1),
                    branches: vec![0, 2],
                },
                Placement {
                    sing: SingularityType::a(1),
                    branches: vec![0, 2],
                },
            ],
        };
        c.validate().unwrap();
        let g = config_to_graph(&c);
        assert_eq!(g.valence(3), 3);
        let all = enumerate_configs(true, DEFAULT_DELTA_CAP).unwrap();
        assert!(keys(&all).contains(&canonical_key(&g).unwrap()));
    }

    #[test]
    fn enumeration_is_stable() {
        let a = enumerate_configs(true, DEFAULT_DELTA_CAP).unwrap();
        let b = enumerate_configs(true, DEFAULT_DELTA_CAP).unwrap();
        assert_eq!(a, b);
    }
}
