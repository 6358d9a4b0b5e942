//! Hand-built graphs and covers for the worked examples.
//!
//! These are constructed directly from their descriptions and serve both as
//! test inputs and as the sources of the `examples` golden run.

use crate::cover::{build_cover, CoverSpec, DoubleCover, Sheet};
use crate::graph::{DualGraph, Vertex};
use crate::singularity::SingularityType;

/// Three concurrent lines: three rational components around one `D_4`.
pub fn d4_cubic() -> DualGraph {
    let mut g = DualGraph::new();
    let lines: Vec<usize> = (0..3)
        .map(|_| g.add_vertex(Vertex::component(1, 0)))
        .collect();
    let d4 = g.add_vertex(Vertex::white(SingularityType::d(4)));
    for &l in &lines {
        g.add_edge(l, d4);
    }
    g
}

/// The `D_4` cubic with its tail replaced by a smooth elliptic curve.
pub fn d4_cubic_realized() -> DualGraph {
    let mut g = DualGraph::new();
    let lines: Vec<usize> = (0..3)
        .map(|_| g.add_vertex(Vertex::component(1, 0)))
        .collect();
    let e = g.add_vertex(Vertex::black(1));
    for &l in &lines {
        g.add_edge(l, e);
    }
    g
}

/// One genus-1 vertex.
pub fn d4_cubic_stabilized() -> DualGraph {
    let mut g = DualGraph::new();
    g.add_vertex(Vertex::black(1));
    g
}

/// Quartic `Q` of geometric genus 1 with a cusp, plus a line `L` meeting it
/// transversally twice and passing through the node of `Q` (a `D_4`).
///
/// Vertex order: `Q, L, A2, A1, A1, D4`.
pub fn quintic_q_cup_l() -> DualGraph {
    let mut g = DualGraph::new();
    let q = g.add_vertex(Vertex::component(4, 1));
    let l = g.add_vertex(Vertex::component(1, 0));
    let cusp = g.add_vertex(Vertex::white(SingularityType::a(2)));
    let n1 = g.add_vertex(Vertex::white(SingularityType::a(1)));
    let n2 = g.add_vertex(Vertex::white(SingularityType::a(1)));
    let d4 = g.add_vertex(Vertex::white(SingularityType::d(4)));
    g.add_edge(q, cusp);
    for n in [n1, n2] {
        g.add_edge(q, n);
        g.add_edge(l, n);
    }
    g.add_edge(q, d4);
    g.add_edge(q, d4);
    g.add_edge(l, d4);
    g
}

/// Realization of [`quintic_q_cup_l`]: the cusp becomes a nodal elliptic
/// curve, the `D_4` a smooth elliptic curve.
pub fn quintic_q_cup_l_realized() -> DualGraph {
    let mut g = DualGraph::new();
    let q = g.add_vertex(Vertex::component(4, 1));
    let l = g.add_vertex(Vertex::component(1, 0));
    let nodal = g.add_vertex(Vertex::black(0));
    let e = g.add_vertex(Vertex::black(1));
    g.add_edge(nodal, nodal);
    g.add_edge(nodal, q);
    g.add_edge(q, l);
    g.add_edge(q, l);
    g.add_edge(q, e);
    g.add_edge(q, e);
    g.add_edge(e, l);
    g
}

/// Smooth quartic `C` and a line `M` with contact of order 4 (an `A_7`).
pub fn a7_quartic_line() -> DualGraph {
    let mut g = DualGraph::new();
    let c = g.add_vertex(Vertex::component(4, 3));
    let m = g.add_vertex(Vertex::component(1, 0));
    let a7 = g.add_vertex(Vertex::white(SingularityType::a(7)));
    g.add_edge(c, a7);
    g.add_edge(m, a7);
    g
}

/// [`a7_quartic_line`] with a smooth genus-3 tail.
pub fn a7_quartic_line_realized() -> DualGraph {
    let mut g = DualGraph::new();
    let c = g.add_vertex(Vertex::component(4, 3));
    let m = g.add_vertex(Vertex::component(1, 0));
    let t = g.add_vertex(Vertex::black(3));
    g.add_edge(c, t);
    g.add_edge(m, t);
    g
}

/// Two vertices and one edge: `C` and the tail after contracting `M`.
pub fn a7_quartic_line_stabilized() -> DualGraph {
    let mut g = DualGraph::new();
    let c = g.add_vertex(Vertex::component(4, 3));
    let t = g.add_vertex(Vertex::black(3));
    g.add_edge(c, t);
    g
}

/// Irreducible quintic with one `A_3`; normalization of genus 4.
pub fn a3_quintic() -> DualGraph {
    let mut g = DualGraph::new();
    let n = g.add_vertex(Vertex::component(5, 4));
    let a3 = g.add_vertex(Vertex::white(SingularityType::a(3)));
    g.add_edge(n, a3);
    g.add_edge(n, a3);
    g
}

/// Irreducible quintic with one `A_1` and one `A_2`; normalization of genus 4.
pub fn a1_a2_quintic() -> DualGraph {
    let mut g = DualGraph::new();
    let n = g.add_vertex(Vertex::component(5, 4));
    let a1 = g.add_vertex(Vertex::white(SingularityType::a(1)));
    let a2 = g.add_vertex(Vertex::white(SingularityType::a(2)));
    g.add_edge(n, a1);
    g.add_edge(n, a1);
    g.add_edge(n, a2);
    g
}

/// The étale cover of [`a3_quintic`] that is connected over the
/// normalization (nonsplit genus-4 component).
pub fn a3_quintic_cover() -> DoubleCover {
    let base = a3_quintic();
    let spec = CoverSpec::all_split(&base).with_sheet(0, Sheet::Nonsplit);
    let cover = build_cover(&base, &spec).expect("valid spec");
    assert!(cover.is_connected());
    cover
}

/// Base of a Friedman–Smith cover: two genus-1 vertices joined by `n` edges.
pub fn fs_base(n: usize) -> DualGraph {
    let mut g = DualGraph::new();
    let a = g.add_vertex(Vertex::black(1));
    let b = g.add_vertex(Vertex::black(1));
    for _ in 0..n {
        g.add_edge(a, b);
    }
    g
}

/// The `FS_n` cover: both components have connected double covers, fixed by
/// the involution, meeting in `2n` nodes swapped in pairs.
pub fn fs_cover(n: usize) -> DoubleCover {
    let base = fs_base(n);
    let spec = CoverSpec::all_split(&base)
        .with_sheet(0, Sheet::Nonsplit)
        .with_sheet(1, Sheet::Nonsplit);
    build_cover(&base, &spec).expect("valid spec")
}
