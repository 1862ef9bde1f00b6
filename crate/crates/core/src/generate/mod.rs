//! Seeded random instance generators, selected by class name.
//!
//! Each instance class is an [`InstanceGenerator`] registered in a
//! [`GeneratorRegistry`]. The built-in registry knows `uniform` and
//! `real-like`; callers may register further classes under new names.

mod real_like;
mod uniform;

use std::collections::BTreeMap;
use std::f64::consts::TAU;
use std::fmt;
use std::str::FromStr;
use std::sync::{Arc, OnceLock};

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qap::{InstanceMeta, QapInstance};

pub use real_like::{real_like_flow, RealLikeGenerator};
pub use uniform::UniformGenerator;

pub const UNIFORM: &str = "uniform";
pub const REAL_LIKE: &str = "real-like";

/// How the uniform class builds its distance matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DistanceMode {
    /// Rounded Euclidean distances between points uniform in a disc of radius `d_max`.
    #[default]
    EuclideanPoints,
    /// Symmetric integers uniform in `[1, d_max]`.
    UniformIntegers,
}

impl DistanceMode {
    pub fn as_str(self) -> &'static str {
        match self {
            DistanceMode::EuclideanPoints => "euclidean-points",
            DistanceMode::UniformIntegers => "uniform-integers",
        }
    }
}

impl fmt::Display for DistanceMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for DistanceMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "euclidean-points" => Ok(DistanceMode::EuclideanPoints),
            "uniform-integers" => Ok(DistanceMode::UniformIntegers),
            other => Err(Error::Config(format!("unknown distance mode `{other}`"))),
        }
    }
}

/// Parameters for both built-in classes; each generator reads its own subset.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GeneratorParams {
    /// Uniform class: disc radius (or integer bound) for distances.
    pub d_max: f64,
    /// Uniform class: flows are drawn from `[1, f_max]`.
    pub f_max: i64,
    /// Real-like class: radius of the disc holding cluster centers.
    pub outer_radius: f64,
    /// Real-like class: clusters hold between 1 and this many points.
    pub max_cluster: u32,
    /// Real-like class: radius of each cluster.
    pub cluster_radius: f64,
    /// Real-like class: lower exponent of the flow law.
    pub flow_exp_low: f64,
    /// Real-like class: upper exponent of the flow law.
    pub flow_exp_high: f64,
    pub distance_mode: DistanceMode,
}

impl Default for GeneratorParams {
    fn default() -> Self {
        GeneratorParams {
            d_max: 100.0,
            f_max: 100,
            outer_radius: 0.0,
            max_cluster: 1,
            cluster_radius: 100.0,
            flow_exp_low: -10.0,
            flow_exp_high: 5.0,
            distance_mode: DistanceMode::EuclideanPoints,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GeneratorConfig {
    pub class: String,
    pub n: usize,
    pub seed: u64,
    pub params: GeneratorParams,
}

impl GeneratorConfig {
    pub fn new(class: impl Into<String>, n: usize, seed: u64) -> Self {
        GeneratorConfig {
            class: class.into(),
            n,
            seed,
            params: GeneratorParams::default(),
        }
    }

    pub fn with_params(mut self, params: GeneratorParams) -> Self {
        self.params = params;
        self
    }

    pub(crate) fn rng(&self) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.seed)
    }

    pub(crate) fn meta(&self, params: Vec<(String, String)>) -> InstanceMeta {
        InstanceMeta {
            class: Some(self.class.clone()),
            seed: Some(self.seed),
            params,
        }
    }
}

/// One instance class.
pub trait InstanceGenerator: Send + Sync {
    /// Registry key, also written into instance metadata.
    fn name(&self) -> &'static str;

    fn description(&self) -> &'static str;

    fn validate(&self, cfg: &GeneratorConfig) -> Result<()>;

    /// Deterministic in `cfg` (including its seed).
    fn generate(&self, cfg: &GeneratorConfig) -> Result<QapInstance>;
}

#[derive(Clone, Default)]
pub struct GeneratorRegistry {
    generators: BTreeMap<&'static str, Arc<dyn InstanceGenerator>>,
}

impl GeneratorRegistry {
    pub fn empty() -> Self {
        Self::default()
    }

    pub fn with_builtins() -> Self {
        let mut registry = Self::empty();
        registry.register(UniformGenerator);
        registry.register(RealLikeGenerator);
        registry
    }

    /// Replaces any generator already registered under the same name.
    pub fn register(&mut self, generator: impl InstanceGenerator + 'static) {
        self.generators.insert(generator.name(), Arc::new(generator));
    }

    pub fn get(&self, name: &str) -> Result<Arc<dyn InstanceGenerator>> {
        self.generators
            .get(name)
            .cloned()
            .ok_or_else(|| Error::UnknownClass(name.to_string()))
    }

    pub fn names(&self) -> impl Iterator<Item = &'static str> + '_ {
        self.generators.keys().copied()
    }

    pub fn generate(&self, cfg: &GeneratorConfig) -> Result<QapInstance> {
        let generator = self.get(&cfg.class)?;
        generator.validate(cfg)?;
        generator.generate(cfg)
    }
}

impl fmt::Debug for GeneratorRegistry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.generators.keys()).finish()
    }
}

/// Process-wide registry holding the built-in classes.
pub fn builtin() -> &'static GeneratorRegistry {
    static REGISTRY: OnceLock<GeneratorRegistry> = OnceLock::new();
    REGISTRY.get_or_init(GeneratorRegistry::with_builtins)
}

/// Generates with the built-in registry.
pub fn generate(cfg: &GeneratorConfig) -> Result<QapInstance> {
    builtin().generate(cfg)
}

pub fn gen_uniform(cfg: &GeneratorConfig) -> Result<QapInstance> {
    expect_class(cfg, UNIFORM)?;
    UniformGenerator.validate(cfg)?;
    UniformGenerator.generate(cfg)
}

pub fn gen_real_like(cfg: &GeneratorConfig) -> Result<QapInstance> {
    expect_class(cfg, REAL_LIKE)?;
    RealLikeGenerator.validate(cfg)?;
    RealLikeGenerator.generate(cfg)
}

fn expect_class(cfg: &GeneratorConfig, class: &str) -> Result<()> {
    if cfg.class != class {
        return Err(Error::Config(format!(
            "expected class `{class}`, got `{}`",
            cfg.class
        )));
    }
    Ok(())
}

pub(crate) fn check_dimension(cfg: &GeneratorConfig) -> Result<()> {
    if cfg.n < 2 {
        return Err(Error::Config(format!("n must be at least 2, got {}", cfg.n)));
    }
    Ok(())
}

/// Area-uniform point in the disc of the given radius around `center`.
pub(crate) fn point_in_disc<R: Rng>(rng: &mut R, center: (f64, f64), radius: f64) -> (f64, f64) {
    let r = radius * rng.random::<f64>().sqrt();
    let theta = TAU * rng.random::<f64>();
    (center.0 + r * theta.cos(), center.1 + r * theta.sin())
}

/// Rounded Euclidean distance matrix; symmetric with a zero diagonal.
pub(crate) fn euclidean_matrix(points: &[(f64, f64)]) -> Vec<Vec<i64>> {
    let n = points.len();
    let mut dist = vec![vec![0i64; n]; n];
    for i in 0..n {
        for j in i + 1..n {
            let (dx, dy) = (points[i].0 - points[j].0, points[i].1 - points[j].1);
            let d = dx.hypot(dy).round() as i64;
            dist[i][j] = d;
            dist[j][i] = d;
        }
    }
    dist
}

/// Fills every off-diagonal flow with `draw`, redrawing the whole matrix in
/// the (rare) case that it comes out all zero.
pub(crate) fn draw_flows<R: Rng>(
    rng: &mut R,
    n: usize,
    mut draw: impl FnMut(&mut R) -> i64,
) -> Vec<Vec<i64>> {
    loop {
        let mut flow = vec![vec![0i64; n]; n];
        let mut any = false;
        for (i, row) in flow.iter_mut().enumerate() {
            for (j, slot) in row.iter_mut().enumerate() {
                if i != j {
                    *slot = draw(rng);
                    any |= *slot > 0;
                }
            }
        }
        if any {
            return flow;
        }
    }
}
