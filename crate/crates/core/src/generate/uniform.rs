use rand::Rng;

use super::{
    check_dimension, draw_flows, euclidean_matrix, point_in_disc, DistanceMode, GeneratorConfig,
    InstanceGenerator,
};
use crate::error::{Error, Result};
use crate::qap::QapInstance;

/// Uniform integer flows in `[1, f_max]` on every ordered pair.
#[derive(Debug, Clone, Copy, Default)]
pub struct UniformGenerator;

impl InstanceGenerator for UniformGenerator {
    fn name(&self) -> &'static str {
        super::UNIFORM
    }

    fn description(&self) -> &'static str {
        "uniform integer flows in [1, f_max]; distances from points uniform in a disc of radius d_max"
    }

    fn validate(&self, cfg: &GeneratorConfig) -> Result<()> {
        check_dimension(cfg)?;
        let p = &cfg.params;
        if p.f_max < 1 {
            return Err(Error::Config(format!("f_max must be at least 1, got {}", p.f_max)));
        }
        if !(p.d_max.is_finite() && p.d_max > 0.0) {
            return Err(Error::Config(format!("d_max must be positive, got {}", p.d_max)));
        }
        if p.distance_mode == DistanceMode::UniformIntegers && p.d_max < 1.0 {
            return Err(Error::Config("d_max must be at least 1 for uniform-integers distances".into()));
        }
        Ok(())
    }

    fn generate(&self, cfg: &GeneratorConfig) -> Result<QapInstance> {
        let n = cfg.n;
        let p = &cfg.params;
        let mut rng = cfg.rng();

        let dist = match p.distance_mode {
            DistanceMode::EuclideanPoints => {
                let points: Vec<_> = (0..n)
                    .map(|_| point_in_disc(&mut rng, (0.0, 0.0), p.d_max))
                    .collect();
                euclidean_matrix(&points)
            }
            DistanceMode::UniformIntegers => {
                let bound = p.d_max.floor() as i64;
                let mut dist = vec![vec![0i64; n]; n];
                for i in 0..n {
                    for j in i + 1..n {
                        let d = rng.random_range(1..=bound);
                        dist[i][j] = d;
                        dist[j][i] = d;
                    }
                }
                dist
            }
        };
        let f_max = p.f_max;
        let flow = draw_flows(&mut rng, n, |rng| rng.random_range(1..=f_max));

        let meta = cfg.meta(vec![
            ("d_max".into(), p.d_max.to_string()),
            ("f_max".into(), p.f_max.to_string()),
            ("distance_mode".into(), p.distance_mode.to_string()),
        ]);
        QapInstance::with_meta(dist, flow, meta)
    }
}
