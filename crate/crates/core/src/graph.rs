//! Graphviz export of the rank-distance graph behind a global attribution map.

use std::fmt::Write as _;

use crate::error::{GamError, Result};
use crate::gam::GlobalAttributionMap;
use crate::rank::{pairwise_distances, DistanceMatrix, Metric, RankedAttribution};

/// Up to this many nodes every pair gets an edge.
pub const COMPLETE_GRAPH_MAX_NODES: usize = 500;
/// Outgoing edges per node in larger graphs.
pub const NEAREST_NEIGHBOURS: usize = 10;

/// DOT document with one node per attribution (attributes `cluster` and
/// `medoid`) and edges weighted by rank distance.
pub fn export_rank_graph(
    attributions: &[RankedAttribution],
    map: &GlobalAttributionMap,
    metric: Metric,
) -> Result<String> {
    match attributions.len() {
        0 => Err(GamError::EmptyInput("no attributions to draw")),
        1 => rank_graph_dot(&DistanceMatrix::from_fn(1, |_, _| 0.0), map),
        _ => rank_graph_dot(&pairwise_distances(attributions, metric)?, map),
    }
}

/// [`export_rank_graph`] over precomputed distances.
pub fn rank_graph_dot(d: &DistanceMatrix, map: &GlobalAttributionMap) -> Result<String> {
    let n = d.n();
    if n == 0 {
        return Err(GamError::EmptyInput("no attributions to draw"));
    }
    if map.n_samples() != n {
        return Err(GamError::RowCountMismatch {
            expected: map.n_samples(),
            found: n,
        });
    }
    let assignment = map.assignment();
    let mut medoid = vec![false; n];
    for i in map.medoid_sample_indices() {
        medoid[i] = true;
    }

    let complete = n <= COMPLETE_GRAPH_MAX_NODES;
    let mut out = String::new();
    out.push_str(if complete {
        "graph rank_distances {\n"
    } else {
        "digraph rank_distances {\n"
    });
    out.push_str("  node [shape=circle, style=filled, colorscheme=set19];\n");
    for i in 0..n {
        let c = assignment[i];
        let _ = writeln!(
            out,
            "  {i} [cluster={c}, medoid={}, fillcolor={}];",
            medoid[i],
            c % 9 + 1
        );
    }
    if complete {
        for i in 0..n {
            for j in (i + 1)..n {
                let _ = writeln!(out, "  {i} -- {j} [weight={}];", d.get(i, j));
            }
        }
    } else {
        for i in 0..n {
            let mut others: Vec<usize> = (0..n).filter(|&j| j != i).collect();
            // stable sort keeps lower indices first on equal distance
            others.sort_by(|&a, &b| d.get(i, a).total_cmp(&d.get(i, b)));
            for &j in others.iter().take(NEAREST_NEIGHBOURS) {
                let _ = writeln!(out, "  {i} -> {j} [weight={}];", d.get(i, j));
            }
        }
    }
    out.push_str("}\n");
    Ok(out)
}
