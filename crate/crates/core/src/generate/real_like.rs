use rand::Rng;

use super::{check_dimension, draw_flows, euclidean_matrix, point_in_disc, GeneratorConfig, InstanceGenerator};
use crate::error::{Error, Result};
use crate::qap::QapInstance;

/// Flow for a unit draw `x`: `10^((b - a)·x + a)` rounded to the nearest
/// integer, ties away from zero.
pub fn real_like_flow(x: f64, exp_low: f64, exp_high: f64) -> i64 {
    10f64.powf((exp_high - exp_low) * x + exp_low).round() as i64
}

/// Clustered locations and sparse, heavy-tailed flows.
#[derive(Debug, Clone, Copy, Default)]
pub struct RealLikeGenerator;

impl InstanceGenerator for RealLikeGenerator {
    fn name(&self) -> &'static str {
        super::REAL_LIKE
    }

    fn description(&self) -> &'static str {
        "clustered locations; flows round(10^((B-A)X + A)) with X uniform in [0,1)"
    }

    fn validate(&self, cfg: &GeneratorConfig) -> Result<()> {
        check_dimension(cfg)?;
        let p = &cfg.params;
        if !(p.flow_exp_low < p.flow_exp_high) {
            return Err(Error::Config(format!(
                "flow exponents need A < B, got A = {}, B = {}",
                p.flow_exp_low, p.flow_exp_high
            )));
        }
        if !(p.flow_exp_high > 0.0) {
            return Err(Error::Config(format!("flow exponent B must be positive, got {}", p.flow_exp_high)));
        }
        if p.max_cluster < 1 {
            return Err(Error::Config("clusters need at least one point (K >= 1)".into()));
        }
        if p.outer_radius < 0.0 || p.cluster_radius < 0.0 {
            return Err(Error::Config("radii must be non-negative".into()));
        }
        if !(p.outer_radius > 0.0 || p.cluster_radius > 0.0) {
            return Err(Error::Config("at least one of M and m must be positive".into()));
        }
        Ok(())
    }

    fn generate(&self, cfg: &GeneratorConfig) -> Result<QapInstance> {
        let n = cfg.n;
        let p = &cfg.params;
        let mut rng = cfg.rng();

        let mut points = Vec::with_capacity(n);
        while points.len() < n {
            let center = point_in_disc(&mut rng, (0.0, 0.0), p.outer_radius);
            let size = rng.random_range(1..=p.max_cluster) as usize;
            let take = size.min(n - points.len());
            for _ in 0..take {
                points.push(point_in_disc(&mut rng, center, p.cluster_radius));
            }
        }
        let dist = euclidean_matrix(&points);

        let (lo, hi) = (p.flow_exp_low, p.flow_exp_high);
        let flow = draw_flows(&mut rng, n, |rng| real_like_flow(rng.random::<f64>(), lo, hi));

        let meta = cfg.meta(vec![
            ("outer_radius".into(), p.outer_radius.to_string()),
            ("max_cluster".into(), p.max_cluster.to_string()),
            ("cluster_radius".into(), p.cluster_radius.to_string()),
            ("flow_exp_low".into(), lo.to_string()),
            ("flow_exp_high".into(), hi.to_string()),
        ]);
        QapInstance::with_meta(dist, flow, meta)
    }
}
