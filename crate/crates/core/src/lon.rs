//! The weighted, directed Local Optima Network.
//!
//! Nodes are the local optima of a [`BasinMap`]. The weight `w_ij` of edge
//! `i -> j` is the probability that a uniformly random exchange applied to a
//! uniformly random configuration of basin `i` lands in basin `j`. Self-loops
//! are stored like any other edge; degree, strength and the metrics built on
//! them ignore them.

use std::collections::HashMap;
use std::fmt::Write as _;

use rayon::prelude::*;
use serde::Deserialize;

use crate::error::{Error, Result};
use crate::landscape::BasinMap;
use crate::perm::{lehmer_code, lehmer_weights, next_permutation, swapped_rank, unrank_into, ConfigId};
use crate::qap::{neighborhood_size, QapInstance};

const CHUNK: usize = 1 << 12;

#[derive(Debug, Clone, PartialEq)]
pub struct LonNode {
    pub id: ConfigId,
    pub cost: i64,
    pub basin_size: u64,
    pub fitness: f64,
}

impl LonNode {
    pub fn new(id: ConfigId, cost: i64, basin_size: u64) -> Self {
        LonNode {
            id,
            cost,
            basin_size,
            fitness: -(cost as f64),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LonEdge {
    pub src: usize,
    pub dst: usize,
    pub weight: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LocalOptimaNetwork {
    n: usize,
    search_space_size: u64,
    nodes: Vec<LonNode>,
    /// Sorted by `(src, dst)`.
    edges: Vec<LonEdge>,
    /// `edges[out_start[i]..out_start[i + 1]]` leave node `i`.
    out_start: Vec<usize>,
    /// Edge indices entering each node, sorted by source.
    in_edges: Vec<Vec<usize>>,
    global: usize,
}

impl LocalOptimaNetwork {
    /// Counts, for every ordered pair of basins, the exchanges leading from
    /// one to the other, and normalizes by `|b_i| · n(n-1)/2`.
    pub fn build(inst: &QapInstance, bm: &BasinMap) -> Result<Self> {
        let n = inst.n();
        if n != bm.n() {
            return Err(Error::invalid(format!(
                "basin map is for n = {} but instance has n = {n}",
                bm.n()
            )));
        }
        let node_of = bm.node_indices();
        let weights = lehmer_weights(n);
        let total = node_of.len();

        let counts = (0..total.div_ceil(CHUNK))
            .into_par_iter()
            .fold(HashMap::<(u32, u32), u64>::new, |mut counts, chunk_idx| {
                let first = chunk_idx * CHUNK;
                let last = (first + CHUNK).min(total);
                let mut p = vec![0; n];
                let mut code = vec![0; n];
                unrank_into(first as u64, &weights, &mut p);
                for rank in first..last {
                    let src = node_of[rank];
                    lehmer_code(&p, &mut code);
                    for r in 0..n {
                        for s in r + 1..n {
                            let nb = swapped_rank(&p, &code, rank as u64, &weights, r, s);
                            *counts.entry((src, node_of[nb as usize])).or_default() += 1;
                        }
                    }
                    next_permutation(&mut p);
                }
                counts
            })
            .reduce(HashMap::new, |mut a, b| {
                for (k, v) in b {
                    *a.entry(k).or_default() += v;
                }
                a
            });

        let moves = neighborhood_size(n) as u64;
        let optima = bm.optima();
        let mut edges: Vec<LonEdge> = counts
            .into_iter()
            .map(|((src, dst), count)| {
                let (src, dst) = (src as usize, dst as usize);
                LonEdge {
                    src,
                    dst,
                    weight: count as f64 / (optima[src].basin_size * moves) as f64,
                }
            })
            .collect();
        edges.sort_unstable_by_key(|e| (e.src, e.dst));

        let nodes = optima
            .iter()
            .map(|o| LonNode::new(o.id, o.cost, o.basin_size))
            .collect();
        let global = bm
            .optimum_index(bm.global_optima().canonical)
            .expect("canonical optimum is a node");
        Ok(Self::assemble(n, bm.search_space_size(), nodes, edges, global))
    }

    /// Builds a network from explicit weights, e.g. for hand-made examples.
    ///
    /// Weights must lie in `(0, 1]` and pairs must be unique; rows are not
    /// required to sum to one.
    pub fn from_weights(
        n: usize,
        search_space_size: u64,
        nodes: Vec<LonNode>,
        weights: impl IntoIterator<Item = (usize, usize, f64)>,
        global: usize,
    ) -> Result<Self> {
        let k = nodes.len();
        if global >= k {
            return Err(Error::invalid(format!("global node {global} out of range for {k} nodes")));
        }
        let mut edges = Vec::new();
        for (src, dst, weight) in weights {
            if src >= k || dst >= k {
                return Err(Error::invalid(format!("edge ({src}, {dst}) out of range for {k} nodes")));
            }
            if !(weight > 0.0 && weight <= 1.0) {
                return Err(Error::invalid(format!("edge ({src}, {dst}) weight {weight} not in (0, 1]")));
            }
            edges.push(LonEdge { src, dst, weight });
        }
        edges.sort_unstable_by_key(|e| (e.src, e.dst));
        if edges.windows(2).any(|w| (w[0].src, w[0].dst) == (w[1].src, w[1].dst)) {
            return Err(Error::invalid("duplicate edge"));
        }
        Ok(Self::assemble(n, search_space_size, nodes, edges, global))
    }

    fn assemble(n: usize, search_space_size: u64, nodes: Vec<LonNode>, edges: Vec<LonEdge>, global: usize) -> Self {
        let k = nodes.len();
        let mut out_start = vec![0usize; k + 1];
        for e in &edges {
            out_start[e.src + 1] += 1;
        }
        for i in 0..k {
            out_start[i + 1] += out_start[i];
        }
        let mut in_edges = vec![Vec::new(); k];
        for (idx, e) in edges.iter().enumerate() {
            in_edges[e.dst].push(idx);
        }
        LocalOptimaNetwork {
            n,
            search_space_size,
            nodes,
            edges,
            out_start,
            in_edges,
            global,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn search_space_size(&self) -> u64 {
        self.search_space_size
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn nodes(&self) -> &[LonNode] {
        &self.nodes
    }

    /// All edges, self-loops included, sorted by `(src, dst)`.
    pub fn edges(&self) -> &[LonEdge] {
        &self.edges
    }

    /// Index of the canonical global optimum.
    pub fn global_node(&self) -> usize {
        self.global
    }

    /// Edges leaving `i`, self-loop included.
    pub fn out_edges(&self, i: usize) -> &[LonEdge] {
        &self.edges[self.out_start[i]..self.out_start[i + 1]]
    }

    /// Edges entering `i`, self-loop included.
    pub fn in_edges(&self, i: usize) -> impl Iterator<Item = &LonEdge> + '_ {
        self.in_edges[i].iter().map(|&idx| &self.edges[idx])
    }

    /// `w_ij`, zero when there is no edge.
    pub fn weight(&self, i: usize, j: usize) -> f64 {
        let out = self.out_edges(i);
        out.binary_search_by_key(&j, |e| e.dst)
            .map_or(0.0, |idx| out[idx].weight)
    }

    pub fn self_weight(&self, i: usize) -> f64 {
        self.weight(i, i)
    }

    /// `Σ_{j≠i} w_ij`; equals `1 - w_ii` on a built network.
    pub fn out_strength(&self, i: usize) -> f64 {
        self.out_edges(i)
            .iter()
            .filter(|e| e.dst != i)
            .map(|e| e.weight)
            .sum()
    }

    /// `Σ_{j≠i} w_ji`.
    pub fn in_strength(&self, i: usize) -> f64 {
        self.in_edges(i)
            .filter(|e| e.src != i)
            .map(|e| e.weight)
            .sum()
    }

    /// `(in_degree, out_degree)`, self-loops excluded.
    pub fn degrees(&self, i: usize) -> (usize, usize) {
        let in_deg = self.in_edges(i).filter(|e| e.src != i).count();
        let out_deg = self.out_edges(i).iter().filter(|e| e.dst != i).count();
        (in_deg, out_deg)
    }

    /// Sum of all outgoing weights including the self-loop.
    pub fn row_sum(&self, i: usize) -> f64 {
        self.out_edges(i).iter().map(|e| e.weight).sum()
    }

    /// CSV edge list `src_rank,dst_rank,weight`, weights to 17 significant digits.
    pub fn export_edges(&self) -> String {
        let mut out = String::from("src_rank,dst_rank,weight\n");
        for e in &self.edges {
            let _ = writeln!(
                out,
                "{},{},{}",
                self.nodes[e.src].id,
                self.nodes[e.dst].id,
                format_sig17(e.weight)
            );
        }
        out
    }

    pub fn export_graphml(&self) -> String {
        let mut out = String::new();
        out.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
        out.push_str("<graphml xmlns=\"http://graphml.graphdrawing.org/xmlns\">\n");
        out.push_str("  <key id=\"cost\" for=\"node\" attr.name=\"cost\" attr.type=\"long\"/>\n");
        out.push_str("  <key id=\"basin_size\" for=\"node\" attr.name=\"basin_size\" attr.type=\"long\"/>\n");
        out.push_str("  <key id=\"weight\" for=\"edge\" attr.name=\"weight\" attr.type=\"double\"/>\n");
        out.push_str("  <graph id=\"lon\" edgedefault=\"directed\">\n");
        for node in &self.nodes {
            let _ = writeln!(
                out,
                "    <node id=\"n{}\"><data key=\"cost\">{}</data><data key=\"basin_size\">{}</data></node>",
                node.id, node.cost, node.basin_size
            );
        }
        for e in &self.edges {
            let _ = writeln!(
                out,
                "    <edge source=\"n{}\" target=\"n{}\"><data key=\"weight\">{}</data></edge>",
                self.nodes[e.src].id,
                self.nodes[e.dst].id,
                format_sig17(e.weight)
            );
        }
        out.push_str("  </graph>\n</graphml>\n");
        out
    }
}

/// One row of an exported edge list.
#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
pub struct EdgeRecord {
    pub src_rank: ConfigId,
    pub dst_rank: ConfigId,
    pub weight: f64,
}

/// Reads the output of [`LocalOptimaNetwork::export_edges`].
pub fn parse_edges(text: &str) -> Result<Vec<EdgeRecord>> {
    let mut reader = csv::Reader::from_reader(text.as_bytes());
    let records = reader.deserialize().collect::<std::result::Result<Vec<EdgeRecord>, _>>()?;
    Ok(records)
}

/// Decimal with 17 significant digits, which always round-trips an `f64`.
pub fn format_sig17(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x:?}");
    }
    let sci = format!("{x:.16e}");
    let exp: i32 = sci[sci.find('e').expect("scientific format") + 1..]
        .parse()
        .expect("integer exponent");
    let decimals = (16 - exp).max(0) as usize;
    format!("{x:.decimals$}")
}
