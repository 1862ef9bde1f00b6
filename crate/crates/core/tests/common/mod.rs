//! Straight-line reference implementations used as test oracles. Nothing here
//! calls into the library's search, ranking or metric code.

#![allow(dead_code)]

use std::collections::HashMap;

use qap_lon::generate::{self, GeneratorConfig};
use qap_lon::QapInstance;

/// All permutations of `0..n` in lexicographic order, built recursively.
pub fn all_perms(n: usize) -> Vec<Vec<usize>> {
    fn rec(prefix: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Vec<usize>>) {
        if prefix.len() == used.len() {
            out.push(prefix.clone());
            return;
        }
        for v in 0..used.len() {
            if !used[v] {
                used[v] = true;
                prefix.push(v);
                rec(prefix, used, out);
                prefix.pop();
                used[v] = false;
            }
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::new(), &mut vec![false; n], &mut out);
    out
}

pub fn naive_cost(inst: &QapInstance, p: &[usize]) -> i64 {
    let n = inst.n();
    let mut total = 0;
    for i in 0..n {
        for j in 0..n {
            total += inst.dist(i, j) * inst.flow(p[i], p[j]);
        }
    }
    total
}

/// Best improvement with full recomputation; first strictly best `(r, s)` wins.
pub fn naive_climb(inst: &QapInstance, start: &[usize]) -> Vec<usize> {
    let n = start.len();
    let mut p = start.to_vec();
    loop {
        let here = naive_cost(inst, &p);
        let mut best: Option<(i64, usize, usize)> = None;
        for r in 0..n {
            for s in r + 1..n {
                let mut q = p.clone();
                q.swap(r, s);
                let c = naive_cost(inst, &q);
                if c < here && best.is_none_or(|b| c < b.0) {
                    best = Some((c, r, s));
                }
            }
        }
        match best {
            Some((_, r, s)) => p.swap(r, s),
            None => return p,
        }
    }
}

/// Dense description of a landscape and its network, indexed like the
/// library's node list (optima sorted by rank).
pub struct Dense {
    pub n: usize,
    pub total: u64,
    /// Optimum rank of every configuration rank.
    pub owner: Vec<u64>,
    /// Hill-climb endpoint cost of every configuration rank.
    pub end_cost: Vec<i64>,
    pub ids: Vec<u64>,
    pub cost: Vec<i64>,
    pub size: Vec<u64>,
    pub w: Vec<Vec<f64>>,
    pub global: usize,
}

pub fn dense(inst: &QapInstance) -> Dense {
    let n = inst.n();
    let perms = all_perms(n);
    let index: HashMap<Vec<usize>, u64> = perms
        .iter()
        .enumerate()
        .map(|(i, p)| (p.clone(), i as u64))
        .collect();
    let owner: Vec<u64> = perms.iter().map(|p| index[&naive_climb(inst, p)]).collect();
    let end_cost: Vec<i64> = owner
        .iter()
        .map(|&o| naive_cost(inst, &perms[o as usize]))
        .collect();

    let mut ids: Vec<u64> = owner.clone();
    ids.sort_unstable();
    ids.dedup();
    let node: HashMap<u64, usize> = ids.iter().enumerate().map(|(i, &id)| (id, i)).collect();
    let k = ids.len();
    let cost: Vec<i64> = ids.iter().map(|&id| naive_cost(inst, &perms[id as usize])).collect();
    let mut size = vec![0u64; k];
    for &o in &owner {
        size[node[&o]] += 1;
    }

    // boundary counting: every ordered (configuration, neighbor) pair
    let mut count = vec![vec![0u64; k]; k];
    for (rank, p) in perms.iter().enumerate() {
        let a = node[&owner[rank]];
        for r in 0..n {
            for s in r + 1..n {
                let mut q = p.clone();
                q.swap(r, s);
                let b = node[&owner[index[&q] as usize]];
                count[a][b] += 1;
            }
        }
    }
    let moves = (n * (n - 1) / 2) as f64;
    let w = (0..k)
        .map(|a| (0..k).map(|b| count[a][b] as f64 / (size[a] as f64 * moves)).collect())
        .collect();

    let best = *cost.iter().min().unwrap();
    let mut global = usize::MAX;
    for i in 0..k {
        if cost[i] == best && (global == usize::MAX || size[i] > size[global]) {
            global = i;
        }
    }

    Dense {
        n,
        total: perms.len() as u64,
        owner,
        end_cost,
        ids,
        cost,
        size,
        w,
        global,
    }
}

impl Dense {
    pub fn k(&self) -> usize {
        self.ids.len()
    }

    pub fn nonzero(&self, excl_self: bool) -> usize {
        let mut c = 0;
        for i in 0..self.k() {
            for j in 0..self.k() {
                if self.w[i][j] > 0.0 && !(excl_self && i == j) {
                    c += 1;
                }
            }
        }
        c
    }

    pub fn in_strength(&self, j: usize) -> f64 {
        (0..self.k()).filter(|&i| i != j).map(|i| self.w[i][j]).sum()
    }

    pub fn out_strength(&self, i: usize) -> f64 {
        (0..self.k()).filter(|&j| j != i).map(|j| self.w[i][j]).sum()
    }

    pub fn in_degree(&self, j: usize) -> usize {
        (0..self.k()).filter(|&i| i != j && self.w[i][j] > 0.0).count()
    }

    pub fn out_degree(&self, i: usize) -> usize {
        (0..self.k()).filter(|&j| j != i && self.w[i][j] > 0.0).count()
    }

    pub fn fitness(&self) -> Vec<f64> {
        self.cost.iter().map(|&c| -(c as f64)).collect()
    }

    /// Fraction of all configurations whose endpoint cost is within the band.
    pub fn near_opt_scan(&self, eps: f64) -> f64 {
        let best = *self.cost.iter().min().unwrap();
        let hits = self
            .end_cost
            .iter()
            .filter(|&&c| c == best || c as f64 <= (1.0 + eps) * best as f64)
            .count();
        hits as f64 / self.total as f64
    }

    /// Global clustering coefficient by enumerating every node triple.
    pub fn transitivity(&self) -> Option<f64> {
        let k = self.k();
        let adj = |i: usize, j: usize| i != j && (self.w[i][j] > 0.0 || self.w[j][i] > 0.0);
        let (mut closed, mut triples) = (0u64, 0u64);
        for c in 0..k {
            for a in 0..k {
                for b in a + 1..k {
                    if a != c && b != c && adj(c, a) && adj(c, b) {
                        triples += 1;
                        if adj(a, b) {
                            closed += 1;
                        }
                    }
                }
            }
        }
        (triples > 0).then(|| closed as f64 / triples as f64)
    }

    pub fn disparity(&self, i: usize) -> Option<f64> {
        let s = self.out_strength(i);
        (s > 0.0).then(|| {
            (0..self.k())
                .filter(|&j| j != i)
                .map(|j| (self.w[i][j] / s).powi(2))
                .sum()
        })
    }

    /// All-pairs directed distances with edge length `1 / w`.
    pub fn floyd_warshall(&self) -> Vec<Vec<f64>> {
        let k = self.k();
        let mut d = vec![vec![f64::INFINITY; k]; k];
        for i in 0..k {
            d[i][i] = 0.0;
            for j in 0..k {
                if i != j && self.w[i][j] > 0.0 {
                    d[i][j] = 1.0 / self.w[i][j];
                }
            }
        }
        for m in 0..k {
            for i in 0..k {
                for j in 0..k {
                    if d[i][m] + d[m][j] < d[i][j] {
                        d[i][j] = d[i][m] + d[m][j];
                    }
                }
            }
        }
        d
    }
}

/// Textbook Pearson on raw sums.
pub fn pearson_oracle(x: &[f64], y: &[f64]) -> Option<f64> {
    let m = x.len() as f64;
    if x.len() < 2 {
        return None;
    }
    let mx = x.iter().sum::<f64>() / m;
    let my = y.iter().sum::<f64>() / m;
    let cov: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let vx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    let vy: f64 = y.iter().map(|b| (b - my).powi(2)).sum();
    (vx > 0.0 && vy > 0.0).then(|| cov / (vx * vy).sqrt())
}

pub fn close(a: f64, b: f64) -> bool {
    a == b || (a - b).abs() <= 1e-9 * a.abs().max(b.abs()).max(1e-300)
}

pub fn close_opt(a: Option<f64>, b: Option<f64>) -> bool {
    match (a, b) {
        (Some(a), Some(b)) => close(a, b),
        (None, None) => true,
        _ => false,
    }
}

pub fn instance(class: &str, n: usize, seed: u64) -> QapInstance {
    generate::generate(&GeneratorConfig::new(class, n, seed)).expect("generator")
}

/// Compares every library stage on `inst` against the dense oracle and
/// returns a description of each disagreement.
pub fn oracle_mismatches(inst: &QapInstance, eps: f64) -> Vec<String> {
    use qap_lon::landscape::map_basins;
    use qap_lon::metrics::{self, analyze};

    let d = dense(inst);
    let mut bad = Vec::new();
    let mut check = |ok: bool, what: &str| {
        if !ok {
            bad.push(what.to_string());
        }
    };

    let bm = map_basins(inst).expect("map");
    let owners: Vec<u64> = bm.owners().map(|o| o.get()).collect();
    check(owners == d.owner, "owner array");
    let (_, lon, report) = analyze(inst, eps).expect("analyze");
    let k = d.k();
    if lon.node_count() != k {
        return vec!["node count".to_string()];
    }
    let ids: Vec<u64> = lon.nodes().iter().map(|v| v.id.get()).collect();
    check(ids == d.ids, "node ids");
    check(lon.nodes().iter().map(|v| v.basin_size).eq(d.size.iter().copied()), "basin sizes");
    check(lon.global_node() == d.global, "global node");
    check(report.global_cost == d.cost[d.global], "global cost");
    let n_best = d.cost.iter().filter(|&&c| c == d.cost[d.global]).count();
    check(report.n_global_optima == n_best, "global optima count");

    for i in 0..k {
        for j in 0..k {
            // both sides divide the same integer count by the same product
            check(lon.weight(i, j) == d.w[i][j], "weights");
        }
        check(close(lon.in_strength(i), d.in_strength(i)), "in-strength");
        check(close(lon.out_strength(i), d.out_strength(i)), "out-strength");
        check(lon.degrees(i) == (d.in_degree(i), d.out_degree(i)), "degrees");
        check(close_opt(metrics::node_disparity(&lon, i), d.disparity(i)), "node disparity");
    }

    check(report.n_nodes == k, "n_nodes");
    check(report.n_edges_incl_self == d.nonzero(false), "edges incl self");
    check(report.n_edges_excl_self == d.nonzero(true), "edges excl self");
    check(lon.export_edges().lines().count() == d.nonzero(false) + 1, "export rows");

    let total = d.total as f64;
    let mut sizes = d.size.clone();
    sizes.sort_unstable();
    check(close(report.rel_global_basin, d.size[d.global] as f64 / total), "rel_global");
    check(close(report.rel_max_basin, *sizes.last().unwrap() as f64 / total), "rel_max");
    check(close(report.rel_median_basin, sizes[(k - 1) / 2] as f64 / total), "rel_median");

    let fit = d.fitness();
    let log_size: Vec<f64> = d.size.iter().map(|&s| (s as f64).ln()).collect();
    check(close_opt(report.corr_fitness_logbasin, pearson_oracle(&fit, &log_size)), "corr fitness/log basin");
    check(close(report.near_opt_mass_5pct, d.near_opt_scan(eps)), "near-optimal mass");

    let avg_loop = (0..k).map(|i| d.w[i][i]).sum::<f64>() / k as f64;
    check(close(report.avg_w_ii, avg_loop), "avg w_ii");
    let off: Vec<f64> = (0..k)
        .flat_map(|i| (0..k).filter(move |&j| j != i).map(move |j| (i, j)))
        .map(|(i, j)| d.w[i][j])
        .filter(|&w| w > 0.0)
        .collect();
    let avg_off = (!off.is_empty()).then(|| off.iter().sum::<f64>() / off.len() as f64);
    check(close_opt(report.avg_w_ij_offdiag, avg_off), "avg w_ij");

    let s_in: Vec<f64> = (0..k).map(|j| d.in_strength(j)).collect();
    check(close(report.avg_in_strength, s_in.iter().sum::<f64>() / k as f64), "avg in-strength");
    let mean_in = (0..k).map(|j| d.in_degree(j)).sum::<usize>() as f64 / k as f64;
    let mean_out = (0..k).map(|i| d.out_degree(i)).sum::<usize>() as f64 / k as f64;
    check(close(report.mean_in_degree, mean_in), "mean in-degree");
    check(close(report.mean_out_degree, mean_out), "mean out-degree");
    check(close(report.expected_in_strength, mean_in * avg_off.unwrap_or(0.0)), "expected in-strength");
    check(close_opt(report.corr_fitness_instrength, pearson_oracle(&fit, &s_in)), "corr fitness/in-strength");

    let mut by_deg: std::collections::BTreeMap<usize, Vec<f64>> = Default::default();
    for j in 0..k {
        if d.in_degree(j) > 0 {
            by_deg.entry(d.in_degree(j)).or_default().push(s_in[j]);
        }
    }
    let table_ok = report.strength_vs_indegree.len() == by_deg.len()
        && report
            .strength_vs_indegree
            .iter()
            .zip(&by_deg)
            .all(|(row, (&deg, v))| {
                row.degree == deg && row.nodes == v.len() && close(row.mean, v.iter().sum::<f64>() / v.len() as f64)
            });
    check(table_ok, "strength table");

    check(close_opt(report.transitivity, d.transitivity()), "transitivity");
    let ys: Vec<f64> = (0..k).filter_map(|i| d.disparity(i)).collect();
    let mean_y = (!ys.is_empty()).then(|| ys.iter().sum::<f64>() / ys.len() as f64);
    check(close_opt(report.mean_disparity, mean_y), "mean disparity");
    let k_out: Vec<f64> = (0..k).filter(|&i| d.out_degree(i) > 0).map(|i| d.out_degree(i) as f64).collect();
    let base = (!k_out.is_empty()).then(|| k_out.len() as f64 / k_out.iter().sum::<f64>());
    check(close_opt(report.disparity_baseline, base), "disparity baseline");

    let fw = d.floyd_warshall();
    let mut finite = Vec::new();
    let mut missing = 0u64;
    for i in 0..k {
        for j in 0..k {
            if i != j {
                if fw[i][j].is_finite() {
                    finite.push(fw[i][j]);
                } else {
                    missing += 1;
                }
            }
        }
    }
    let apl = (!finite.is_empty()).then(|| finite.iter().sum::<f64>() / finite.len() as f64);
    check(close_opt(report.avg_path_length, apl), "avg path length");
    check(report.unreachable_pair_count == missing, "unreachable pairs");
    let to_g: Vec<f64> = (0..k)
        .filter(|&i| i != d.global && fw[i][d.global].is_finite())
        .map(|i| fw[i][d.global])
        .collect();
    let dg = (!to_g.is_empty()).then(|| to_g.iter().sum::<f64>() / to_g.len() as f64);
    check(close_opt(report.avg_dist_to_global_opt, dg), "distance to global optimum");
    bad
}
