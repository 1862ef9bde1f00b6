//! Basin and network statistics of a Local Optima Network.
//!
//! Statistics that can be undefined (a correlation with a constant variable,
//! transitivity on fewer than three nodes, ...) are `Option`s and serialize
//! as JSON `null` / an empty CSV field, never as zero.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BinaryHeap};
use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::landscape::BasinMap;
use crate::lon::LocalOptimaNetwork;
use crate::qap::QapInstance;
use crate::stats::{lower_median, mean, pearson};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct NodeEdgeCounts {
    pub n_nodes: usize,
    pub n_edges_excl_self: usize,
    pub n_edges_incl_self: usize,
}

pub fn count_nodes_edges(lon: &LocalOptimaNetwork) -> NodeEdgeCounts {
    let loops = lon.edges().iter().filter(|e| e.src == e.dst).count();
    NodeEdgeCounts {
        n_nodes: lon.node_count(),
        n_edges_excl_self: lon.edges().len() - loops,
        n_edges_incl_self: lon.edges().len(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BasinStats {
    pub rel_global: f64,
    pub rel_max: f64,
    pub rel_median: f64,
}

/// Global (canonical), largest and lower-median basin sizes relative to `n!`.
pub fn basin_stats(lon: &LocalOptimaNetwork) -> BasinStats {
    let total = lon.search_space_size() as f64;
    let sizes: Vec<u64> = lon.nodes().iter().map(|v| v.basin_size).collect();
    BasinStats {
        rel_global: lon.nodes()[lon.global_node()].basin_size as f64 / total,
        rel_max: sizes.iter().copied().max().unwrap_or(0) as f64 / total,
        rel_median: lower_median(&sizes).unwrap_or(0) as f64 / total,
    }
}

/// Pearson correlation between fitness and the natural log of basin size.
pub fn fitness_basin_correlation(lon: &LocalOptimaNetwork) -> Option<f64> {
    let fitness: Vec<f64> = lon.nodes().iter().map(|v| v.fitness).collect();
    let log_size: Vec<f64> = lon.nodes().iter().map(|v| (v.basin_size as f64).ln()).collect();
    pearson(&fitness, &log_size)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NearOptimalMass {
    pub fraction: f64,
    /// The global cost is 0, so the band only admits exact optima.
    pub degenerate: bool,
}

/// Fraction of the search space whose basin optimum costs at most
/// `(1 + eps)` times the global cost.
pub fn near_optimal_mass(lon: &LocalOptimaNetwork, eps: f64) -> NearOptimalMass {
    let best = lon.nodes().iter().map(|v| v.cost).min().unwrap_or(0);
    let limit = (1.0 + eps) * best as f64;
    let mass: u64 = lon
        .nodes()
        .iter()
        .filter(|v| v.cost == best || v.cost as f64 <= limit)
        .map(|v| v.basin_size)
        .sum();
    NearOptimalMass {
        fraction: mass as f64 / lon.search_space_size() as f64,
        degenerate: best == 0,
    }
}

/// Mean self-loop weight over all nodes (missing loops count as 0), and mean
/// weight over existing off-diagonal edges.
pub fn weight_averages(lon: &LocalOptimaNetwork) -> (f64, Option<f64>) {
    let k = lon.node_count();
    let avg_loop = (0..k).map(|i| lon.self_weight(i)).sum::<f64>() / k as f64;
    let off: Vec<f64> = lon
        .edges()
        .iter()
        .filter(|e| e.src != e.dst)
        .map(|e| e.weight)
        .collect();
    (avg_loop, mean(&off))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DegreeRow {
    pub degree: usize,
    pub mean: f64,
    /// `1/degree` for disparity rows, 0 for strength rows.
    pub baseline: f64,
    pub nodes: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StrengthStats {
    pub avg_in_strength: f64,
    /// Mean in-degree times mean off-diagonal edge weight.
    pub expected_in_strength: f64,
    pub mean_in_degree: f64,
    pub mean_out_degree: f64,
    /// Mean in-strength of the nodes with each in-degree.
    pub by_in_degree: Vec<DegreeRow>,
}

pub fn strength_stats(lon: &LocalOptimaNetwork) -> StrengthStats {
    let k = lon.node_count();
    let strengths: Vec<f64> = (0..k).map(|i| lon.in_strength(i)).collect();
    let degrees: Vec<(usize, usize)> = (0..k).map(|i| lon.degrees(i)).collect();
    let mean_in_degree = degrees.iter().map(|d| d.0 as f64).sum::<f64>() / k as f64;
    let mean_out_degree = degrees.iter().map(|d| d.1 as f64).sum::<f64>() / k as f64;
    let (_, avg_w) = weight_averages(lon);

    let mut groups: BTreeMap<usize, Vec<f64>> = BTreeMap::new();
    for (s, d) in strengths.iter().zip(&degrees) {
        if d.0 > 0 {
            groups.entry(d.0).or_default().push(*s);
        }
    }
    StrengthStats {
        avg_in_strength: strengths.iter().sum::<f64>() / k as f64,
        expected_in_strength: mean_in_degree * avg_w.unwrap_or(0.0),
        mean_in_degree,
        mean_out_degree,
        by_in_degree: degree_rows(groups, |_| 0.0),
    }
}

fn degree_rows(groups: BTreeMap<usize, Vec<f64>>, baseline: impl Fn(usize) -> f64) -> Vec<DegreeRow> {
    groups
        .into_iter()
        .map(|(degree, vals)| DegreeRow {
            degree,
            mean: vals.iter().sum::<f64>() / vals.len() as f64,
            baseline: baseline(degree),
            nodes: vals.len(),
        })
        .collect()
}

/// Pearson correlation between fitness and in-strength.
pub fn fitness_strength_correlation(lon: &LocalOptimaNetwork) -> Option<f64> {
    let fitness: Vec<f64> = lon.nodes().iter().map(|v| v.fitness).collect();
    let strength: Vec<f64> = (0..lon.node_count()).map(|i| lon.in_strength(i)).collect();
    pearson(&fitness, &strength)
}

/// Global clustering coefficient of the undirected, unweighted projection
/// (an edge `{i, j}` for `i != j` whenever `w_ij > 0` or `w_ji > 0`).
pub fn transitivity(lon: &LocalOptimaNetwork) -> Option<f64> {
    let k = lon.node_count();
    if k < 3 {
        return None;
    }
    let words = k.div_ceil(64);
    let mut adj = vec![vec![0u64; words]; k];
    for e in lon.edges().iter().filter(|e| e.src != e.dst) {
        adj[e.src][e.dst / 64] |= 1 << (e.dst % 64);
        adj[e.dst][e.src / 64] |= 1 << (e.src % 64);
    }
    let degree: Vec<u64> = adj
        .iter()
        .map(|row| row.iter().map(|w| u64::from(w.count_ones())).sum())
        .collect();
    let triples: u64 = degree.iter().map(|&d| d * d.saturating_sub(1) / 2).sum();
    if triples == 0 {
        return None;
    }
    // each triangle is seen once from each of its three edges
    let closed: u64 = (0..k)
        .into_par_iter()
        .map(|i| {
            let mut sum = 0u64;
            for j in i + 1..k {
                if adj[i][j / 64] >> (j % 64) & 1 == 1 {
                    sum += adj[i]
                        .iter()
                        .zip(&adj[j])
                        .map(|(a, b)| u64::from((a & b).count_ones()))
                        .sum::<u64>();
                }
            }
            sum
        })
        .sum();
    Some(closed as f64 / triples as f64)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DisparityStats {
    /// Mean `Y2` over nodes with out-degree at least 1.
    pub mean: Option<f64>,
    /// `1 / k` for the mean out-degree `k` of those same nodes.
    pub baseline: Option<f64>,
    pub by_out_degree: Vec<DegreeRow>,
    /// Nodes without off-diagonal out-edges, left out of the aggregates.
    pub excluded_nodes: usize,
}

/// `Y2(i) = Σ_{j≠i} (w_ij / s_i)^2` with `s_i` the out-strength (self-loop excluded).
pub fn node_disparity(lon: &LocalOptimaNetwork, i: usize) -> Option<f64> {
    let s = lon.out_strength(i);
    if s <= 0.0 {
        return None;
    }
    Some(
        lon.out_edges(i)
            .iter()
            .filter(|e| e.dst != i)
            .map(|e| (e.weight / s).powi(2))
            .sum(),
    )
}

pub fn disparity(lon: &LocalOptimaNetwork) -> DisparityStats {
    let mut groups: BTreeMap<usize, Vec<f64>> = BTreeMap::new();
    let mut all = Vec::new();
    let mut excluded = 0;
    for i in 0..lon.node_count() {
        match node_disparity(lon, i) {
            Some(y) => {
                groups.entry(lon.degrees(i).1).or_default().push(y);
                all.push(y);
            }
            None => excluded += 1,
        }
    }
    let degree_sum: usize = groups.iter().map(|(k, v)| k * v.len()).sum();
    DisparityStats {
        mean: mean(&all),
        baseline: (degree_sum > 0).then(|| all.len() as f64 / degree_sum as f64),
        by_out_degree: degree_rows(groups, |k| 1.0 / k as f64),
        excluded_nodes: excluded,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PathStats {
    pub avg_path_length: Option<f64>,
    pub avg_dist_to_global_opt: Option<f64>,
    pub unreachable_pair_count: u64,
}

#[derive(Clone, Copy, PartialEq)]
struct Frontier {
    dist: f64,
    node: usize,
}

impl Eq for Frontier {}

impl Ord for Frontier {
    fn cmp(&self, other: &Self) -> Ordering {
        // min-heap on distance
        other
            .dist
            .total_cmp(&self.dist)
            .then_with(|| other.node.cmp(&self.node))
    }
}

impl PartialOrd for Frontier {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Directed shortest-path distances from `source`, edge length `1 / w_ij`,
/// self-loops ignored. Unreachable nodes are `f64::INFINITY`.
pub fn shortest_paths_from(lon: &LocalOptimaNetwork, source: usize) -> Vec<f64> {
    let mut dist = vec![f64::INFINITY; lon.node_count()];
    let mut heap = BinaryHeap::new();
    dist[source] = 0.0;
    heap.push(Frontier { dist: 0.0, node: source });
    while let Some(Frontier { dist: d, node }) = heap.pop() {
        if d > dist[node] {
            continue;
        }
        for e in lon.out_edges(node) {
            if e.dst == node {
                continue;
            }
            let nd = d + 1.0 / e.weight;
            if nd < dist[e.dst] {
                dist[e.dst] = nd;
                heap.push(Frontier { dist: nd, node: e.dst });
            }
        }
    }
    dist
}

pub fn path_stats(lon: &LocalOptimaNetwork) -> PathStats {
    let k = lon.node_count();
    let g = lon.global_node();
    let rows: Vec<(f64, u64, u64, f64)> = (0..k)
        .into_par_iter()
        .map(|i| {
            let d = shortest_paths_from(lon, i);
            let (mut sum, mut reached, mut missing) = (0.0, 0u64, 0u64);
            for (j, &dj) in d.iter().enumerate() {
                if j == i {
                    continue;
                }
                if dj.is_finite() {
                    sum += dj;
                    reached += 1;
                } else {
                    missing += 1;
                }
            }
            (sum, reached, missing, d[g])
        })
        .collect();

    let total: f64 = rows.iter().map(|r| r.0).sum();
    let reached: u64 = rows.iter().map(|r| r.1).sum();
    let missing: u64 = rows.iter().map(|r| r.2).sum();
    let to_global: Vec<f64> = rows
        .iter()
        .enumerate()
        .filter(|&(i, r)| i != g && r.3.is_finite())
        .map(|(_, r)| r.3)
        .collect();
    PathStats {
        avg_path_length: (reached > 0).then(|| total / reached as f64),
        avg_dist_to_global_opt: mean(&to_global),
        unreachable_pair_count: missing,
    }
}

/// Every per-instance statistic. Field order is the JSON key order and the
/// CSV column order ([`MetricsReport::CSV_COLUMNS`]).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub schema_version: u32,
    pub class: Option<String>,
    pub seed: Option<u64>,
    pub n: usize,
    pub search_space_size: u64,
    pub global_cost: i64,
    pub n_global_optima: usize,
    pub neutrality_count: Option<u64>,
    pub n_nodes: usize,
    pub n_edges_excl_self: usize,
    pub n_edges_incl_self: usize,
    pub rel_global_basin: f64,
    pub rel_max_basin: f64,
    pub rel_median_basin: f64,
    pub corr_fitness_logbasin: Option<f64>,
    pub near_opt_eps: f64,
    pub near_opt_mass_5pct: f64,
    pub near_opt_degenerate: bool,
    pub avg_w_ii: f64,
    pub avg_w_ij_offdiag: Option<f64>,
    pub avg_in_strength: f64,
    pub expected_in_strength: f64,
    pub mean_in_degree: f64,
    pub mean_out_degree: f64,
    pub corr_fitness_instrength: Option<f64>,
    pub transitivity: Option<f64>,
    pub mean_disparity: Option<f64>,
    /// Disparity of perfectly homogeneous weights, `1 / k` for the mean
    /// out-degree `k` of the nodes that have a disparity.
    pub disparity_baseline: Option<f64>,
    pub avg_path_length: Option<f64>,
    pub avg_dist_to_global_opt: Option<f64>,
    pub unreachable_pair_count: u64,
    /// Mean in-strength per in-degree; written to its own CSV file.
    #[serde(skip)]
    pub strength_vs_indegree: Vec<DegreeRow>,
    /// Mean disparity per out-degree with the `1/k` baseline; own CSV file.
    #[serde(skip)]
    pub disparity_vs_outdegree: Vec<DegreeRow>,
}

impl MetricsReport {
    pub const CSV_COLUMNS: &'static [&'static str] = &[
        "schema_version",
        "class",
        "seed",
        "n",
        "search_space_size",
        "global_cost",
        "n_global_optima",
        "neutrality_count",
        "n_nodes",
        "n_edges_excl_self",
        "n_edges_incl_self",
        "rel_global_basin",
        "rel_max_basin",
        "rel_median_basin",
        "corr_fitness_logbasin",
        "near_opt_eps",
        "near_opt_mass_5pct",
        "near_opt_degenerate",
        "avg_w_ii",
        "avg_w_ij_offdiag",
        "avg_in_strength",
        "expected_in_strength",
        "mean_in_degree",
        "mean_out_degree",
        "corr_fitness_instrength",
        "transitivity",
        "mean_disparity",
        "disparity_baseline",
        "avg_path_length",
        "avg_dist_to_global_opt",
        "unreachable_pair_count",
    ];

    /// Numeric statistics by name, `None` where undefined. These are the
    /// quantities aggregated across instances.
    pub fn numeric_fields(&self) -> Vec<(&'static str, Option<f64>)> {
        vec![
            ("global_cost", Some(self.global_cost as f64)),
            ("n_global_optima", Some(self.n_global_optima as f64)),
            ("neutrality_count", self.neutrality_count.map(|v| v as f64)),
            ("n_nodes", Some(self.n_nodes as f64)),
            ("n_edges_excl_self", Some(self.n_edges_excl_self as f64)),
            ("n_edges_incl_self", Some(self.n_edges_incl_self as f64)),
            ("rel_global_basin", Some(self.rel_global_basin)),
            ("rel_max_basin", Some(self.rel_max_basin)),
            ("rel_median_basin", Some(self.rel_median_basin)),
            ("corr_fitness_logbasin", self.corr_fitness_logbasin),
            ("near_opt_mass_5pct", Some(self.near_opt_mass_5pct)),
            ("avg_w_ii", Some(self.avg_w_ii)),
            ("avg_w_ij_offdiag", self.avg_w_ij_offdiag),
            ("avg_in_strength", Some(self.avg_in_strength)),
            ("expected_in_strength", Some(self.expected_in_strength)),
            ("mean_in_degree", Some(self.mean_in_degree)),
            ("mean_out_degree", Some(self.mean_out_degree)),
            ("corr_fitness_instrength", self.corr_fitness_instrength),
            ("transitivity", self.transitivity),
            ("mean_disparity", self.mean_disparity),
            ("disparity_baseline", self.disparity_baseline),
            ("avg_path_length", self.avg_path_length),
            ("avg_dist_to_global_opt", self.avg_dist_to_global_opt),
            ("unreachable_pair_count", Some(self.unreachable_pair_count as f64)),
        ]
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    /// Writes reports as CSV rows under a [`CSV_COLUMNS`](Self::CSV_COLUMNS) header.
    pub fn write_csv<'a, W: Write>(w: W, reports: impl IntoIterator<Item = &'a MetricsReport>) -> Result<()> {
        let mut writer = csv::WriterBuilder::new().has_headers(false).from_writer(w);
        writer.write_record(Self::CSV_COLUMNS)?;
        for report in reports {
            writer.serialize(report)?;
        }
        writer.flush()?;
        Ok(())
    }

    pub fn read_csv(text: &str) -> Result<Vec<Self>> {
        let mut reader = csv::Reader::from_reader(text.as_bytes());
        Ok(reader.deserialize().collect::<std::result::Result<Vec<_>, _>>()?)
    }
}

/// Writes a degree table as `degree,mean,baseline,nodes`.
pub fn write_degree_table<W: Write>(w: W, rows: &[DegreeRow]) -> Result<()> {
    let mut writer = csv::Writer::from_writer(w);
    for row in rows {
        writer.serialize(row)?;
    }
    if rows.is_empty() {
        writer.write_record(["degree", "mean", "baseline", "nodes"])?;
    }
    writer.flush()?;
    Ok(())
}

/// Runs every statistic on one analyzed instance.
pub fn compute_report(inst: &QapInstance, bm: &BasinMap, lon: &LocalOptimaNetwork, eps: f64) -> MetricsReport {
    let counts = count_nodes_edges(lon);
    let basins = basin_stats(lon);
    let near = near_optimal_mass(lon, eps);
    let (avg_w_ii, avg_w_ij) = weight_averages(lon);
    let strength = strength_stats(lon);
    let disp = disparity(lon);
    let paths = path_stats(lon);
    let global = bm.global_optima();
    let meta = inst.meta();

    MetricsReport {
        schema_version: SCHEMA_VERSION,
        class: meta.class.clone(),
        seed: meta.seed,
        n: inst.n(),
        search_space_size: lon.search_space_size(),
        global_cost: global.cost,
        n_global_optima: global.ids.len(),
        neutrality_count: bm.neutrality_count(),
        n_nodes: counts.n_nodes,
        n_edges_excl_self: counts.n_edges_excl_self,
        n_edges_incl_self: counts.n_edges_incl_self,
        rel_global_basin: basins.rel_global,
        rel_max_basin: basins.rel_max,
        rel_median_basin: basins.rel_median,
        corr_fitness_logbasin: fitness_basin_correlation(lon),
        near_opt_eps: eps,
        near_opt_mass_5pct: near.fraction,
        near_opt_degenerate: near.degenerate,
        avg_w_ii,
        avg_w_ij_offdiag: avg_w_ij,
        avg_in_strength: strength.avg_in_strength,
        expected_in_strength: strength.expected_in_strength,
        mean_in_degree: strength.mean_in_degree,
        mean_out_degree: strength.mean_out_degree,
        corr_fitness_instrength: fitness_strength_correlation(lon),
        transitivity: transitivity(lon),
        mean_disparity: disp.mean,
        disparity_baseline: disp.baseline,
        avg_path_length: paths.avg_path_length,
        avg_dist_to_global_opt: paths.avg_dist_to_global_opt,
        unreachable_pair_count: paths.unreachable_pair_count,
        strength_vs_indegree: strength.by_in_degree,
        disparity_vs_outdegree: disp.by_out_degree,
    }
}

/// Maps, builds and measures `inst` in one call.
pub fn analyze(inst: &QapInstance, eps: f64) -> Result<(BasinMap, LocalOptimaNetwork, MetricsReport)> {
    let bm = crate::landscape::map_basins(inst)?;
    let lon = LocalOptimaNetwork::build(inst, &bm)?;
    let report = compute_report(inst, &bm, &lon, eps);
    Ok((bm, lon, report))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lon::LonNode;
    use crate::perm::ConfigId;

    fn node(id: u64, cost: i64, size: u64) -> LonNode {
        LonNode::new(ConfigId(id), cost, size)
    }

    /// w = [[0.8, 0.2], [0.4, 0.6]]; node 0 is better and larger.
    fn two_node() -> LocalOptimaNetwork {
        LocalOptimaNetwork::from_weights(
            5,
            120,
            vec![node(0, 10, 119), node(1, 20, 1)],
            [(0, 0, 0.8), (0, 1, 0.2), (1, 0, 0.4), (1, 1, 0.6)],
            0,
        )
        .unwrap()
    }

    fn single() -> LocalOptimaNetwork {
        LocalOptimaNetwork::from_weights(2, 2, vec![node(1, 10, 2)], [(0, 0, 1.0)], 0).unwrap()
    }

    fn complete(k: usize, with_loops: bool) -> LocalOptimaNetwork {
        let nodes = (0..k).map(|i| node(i as u64, 10 + i as i64, 1)).collect();
        let w = 1.0 / k as f64;
        let edges = (0..k)
            .flat_map(|i| (0..k).map(move |j| (i, j)))
            .filter(|&(i, j)| with_loops || i != j)
            .map(|(i, j)| (i, j, w));
        LocalOptimaNetwork::from_weights(4, 24, nodes, edges, 0).unwrap()
    }

    #[test]
    fn counts() {
        let c = count_nodes_edges(&single());
        assert_eq!((c.n_nodes, c.n_edges_excl_self, c.n_edges_incl_self), (1, 0, 1));
        let c = count_nodes_edges(&complete(5, true));
        assert_eq!((c.n_nodes, c.n_edges_excl_self, c.n_edges_incl_self), (5, 20, 25));
    }

    #[test]
    fn basin_fractions() {
        let b = basin_stats(&single());
        assert_eq!((b.rel_global, b.rel_max, b.rel_median), (1.0, 1.0, 1.0));
        let b = basin_stats(&two_node());
        assert_eq!(b.rel_max, 119.0 / 120.0);
        assert_eq!(b.rel_median, 1.0 / 120.0);
        assert_eq!(b.rel_global, 119.0 / 120.0);
    }

    #[test]
    fn correlations() {
        // fitter node has the larger basin and the larger in-strength
        assert!((fitness_basin_correlation(&two_node()).unwrap() - 1.0).abs() < 1e-12);
        assert!((fitness_strength_correlation(&two_node()).unwrap() - 1.0).abs() < 1e-12);
        assert_eq!(fitness_basin_correlation(&single()), None);
        // equal basins: zero variance
        assert_eq!(fitness_basin_correlation(&complete(3, true)), None);
        // equal in-strengths
        assert_eq!(fitness_strength_correlation(&complete(3, true)), None);
    }

    #[test]
    fn near_optimal_band() {
        let m = near_optimal_mass(&single(), 0.05);
        assert_eq!(m.fraction, 1.0);
        assert!(!m.degenerate);
        assert_eq!(near_optimal_mass(&two_node(), 0.05).fraction, 119.0 / 120.0);
        assert_eq!(near_optimal_mass(&two_node(), f64::INFINITY).fraction, 1.0);
        assert_eq!(near_optimal_mass(&two_node(), 1.0).fraction, 1.0);
        let zero = LocalOptimaNetwork::from_weights(2, 2, vec![node(0, 0, 1), node(1, 3, 1)], [], 0).unwrap();
        let m = near_optimal_mass(&zero, 0.05);
        assert!(m.degenerate);
        assert_eq!(m.fraction, 0.5);
    }

    #[test]
    fn weights_and_strengths() {
        assert_eq!(weight_averages(&single()), (1.0, None));
        let (wii, wij) = weight_averages(&two_node());
        assert!((wii - 0.7).abs() < 1e-15);
        assert!((wij.unwrap() - 0.3).abs() < 1e-15);

        let s = strength_stats(&two_node());
        assert!((s.avg_in_strength - 0.3).abs() < 1e-15);
        assert!((s.expected_in_strength - 0.3).abs() < 1e-15);
        assert_eq!(s.by_in_degree.len(), 1);
        assert_eq!(s.by_in_degree[0].degree, 1);

        let s = strength_stats(&single());
        assert_eq!((s.avg_in_strength, s.expected_in_strength), (0.0, 0.0));
        assert!(s.by_in_degree.is_empty());
    }

    #[test]
    fn transitivity_cases() {
        assert_eq!(transitivity(&complete(4, false)), Some(1.0));
        assert_eq!(transitivity(&complete(3, true)), Some(1.0));
        assert_eq!(transitivity(&two_node()), None);
        let path = LocalOptimaNetwork::from_weights(
            4,
            24,
            vec![node(0, 1, 1), node(1, 2, 1), node(2, 3, 1)],
            [(0, 1, 0.5), (2, 1, 0.5)],
            0,
        )
        .unwrap();
        assert_eq!(transitivity(&path), Some(0.0));
        let empty = LocalOptimaNetwork::from_weights(4, 24, vec![node(0, 1, 1), node(1, 2, 1), node(2, 3, 1)], [], 0).unwrap();
        assert_eq!(transitivity(&empty), None);
    }

    #[test]
    fn disparity_cases() {
        let d = disparity(&two_node());
        assert_eq!(d.mean, Some(1.0));
        let d = disparity(&complete(5, true));
        let y = d.mean.unwrap();
        assert!((y - 0.25).abs() < 1e-12);
        assert_eq!(d.by_out_degree.len(), 1);
        assert_eq!(d.by_out_degree[0].baseline, 0.25);
        let d = disparity(&single());
        assert_eq!(d.mean, None);
        assert_eq!(d.excluded_nodes, 1);
    }

    #[test]
    fn two_node_paths() {
        let p = path_stats(&two_node());
        assert_eq!(p.avg_path_length, Some(3.75));
        assert_eq!(p.avg_dist_to_global_opt, Some(2.5));
        assert_eq!(p.unreachable_pair_count, 0);
        let p = path_stats(&single());
        assert_eq!((p.avg_path_length, p.avg_dist_to_global_opt, p.unreachable_pair_count), (None, None, 0));
    }

    #[test]
    fn unreachable_pairs_are_counted() {
        let lon = LocalOptimaNetwork::from_weights(
            4,
            24,
            vec![node(0, 1, 1), node(1, 2, 1), node(2, 3, 1)],
            [(1, 0, 0.5), (2, 1, 0.25)],
            0,
        )
        .unwrap();
        let p = path_stats(&lon);
        // reachable: 1->0 (2), 2->1 (4), 2->0 (6)
        assert_eq!(p.unreachable_pair_count, 3);
        assert_eq!(p.avg_path_length, Some(4.0));
        assert_eq!(p.avg_dist_to_global_opt, Some(4.0));
    }

    #[test]
    fn report_json_and_csv_roundtrip() {
        let inst = QapInstance::new(vec![vec![0, 1], vec![2, 0]], vec![vec![0, 3], vec![4, 0]]).unwrap();
        let (_, _, report) = analyze(&inst, 0.05).unwrap();
        assert_eq!(report.n_nodes, 1);
        assert_eq!(report.rel_global_basin, 1.0);
        let json = report.to_json();
        assert!(json.contains("\"transitivity\": null"));
        assert_eq!(MetricsReport::from_json(&json).unwrap(), report);

        let mut buf = Vec::new();
        MetricsReport::write_csv(&mut buf, [&report]).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().next().unwrap(), MetricsReport::CSV_COLUMNS.join(","));
        assert_eq!(MetricsReport::read_csv(&text).unwrap(), vec![report]);
    }

    #[test]
    fn csv_columns_match_json_keys() {
        let inst = QapInstance::new(vec![vec![0, 1], vec![2, 0]], vec![vec![0, 3], vec![4, 0]]).unwrap();
        let (_, _, report) = analyze(&inst, 0.05).unwrap();
        let value = serde_json::to_value(&report).unwrap();
        let keys: Vec<&str> = value.as_object().unwrap().keys().map(String::as_str).collect();
        let mut cols = MetricsReport::CSV_COLUMNS.to_vec();
        let mut keys_sorted = keys.clone();
        cols.sort_unstable();
        keys_sorted.sort_unstable();
        assert_eq!(cols, keys_sorted);
    }
}
