//! Experiment configuration file (JSON).
//!
//! ```json
//! {
//!   "chain": { "sites": 4, "flavors": 3, "potential": { "kind": "hubbard", "u": 1.0 } },
//!   "particles": { "total": 7 },
//!   "couplings": { "distribution": { "kind": "uniform", "low": 0.5, "high": 1.5, "seed": 42, "draws": 5 } }
//! }
//! ```
//!
//! `particles` is either `{"total": M}` (a number or a list of numbers) or
//! `{"sectors": [[M_1, ..., M_N], ...]}`. `couplings` is either
//! `{"fixed": {"hopping": .., "exchange": .., "pair_hopping": ..}}`, each a
//! number (same on every bond) or one value per bond, or a seeded uniform
//! distribution. `tolerances`, `solver` and `outputs` are optional.

use std::fs;
use std::path::{Path, PathBuf};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use sunchain_core::fock::FockError;
use sunchain_core::hamiltonian::HamiltonianError;
use sunchain_core::spectra::{AnalysisOptions, SolverOptions, Tolerances};
use sunchain_core::{ChainConfig, Layout, Potential, Sector};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("malformed config {path}: {source}")]
    Parse {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },
    #[error("couplings.distribution.seed is required (or pass --seed)")]
    MissingSeed,
    #[error("couplings.distribution needs 0 < low <= high, got low = {low}, high = {high}")]
    BadRange { low: f64, high: f64 },
    #[error("couplings.distribution.draws must be at least 1")]
    NoDraws,
    #[error("particles.sectors is empty")]
    EmptySectors,
    #[error("particles.total is empty")]
    EmptyTotals,
    #[error("particles.total = {total} exceeds the {capacity} available modes")]
    TooManyParticles { total: usize, capacity: usize },
    #[error("particles.total must be positive")]
    ZeroParticles,
    #[error(transparent)]
    Chain(#[from] HamiltonianError),
    #[error(transparent)]
    Sector(#[from] FockError),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub chain: ChainSpec,
    pub particles: ParticleSpec,
    pub couplings: CouplingSpec,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default)]
    pub solver: SolverOptions,
    /// Where and how results are written. Not echoed into reports.
    #[serde(default, skip_serializing)]
    pub outputs: OutputSpec,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChainSpec {
    pub sites: usize,
    pub flavors: usize,
    #[serde(default)]
    pub potential: PotentialSpec,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum PotentialSpec {
    /// `U/2 sum_x n_x^2`
    Hubbard { u: f64 },
    /// `sum_x v_x n_x`
    SiteDiagonal { values: Vec<f64> },
}

impl Default for PotentialSpec {
    fn default() -> Self {
        PotentialSpec::Hubbard { u: 0.0 }
    }
}

impl PotentialSpec {
    fn build(&self) -> Potential {
        match self {
            PotentialSpec::Hubbard { u } => Potential::Hubbard { u: *u },
            PotentialSpec::SiteDiagonal { values } => Potential::SiteDiagonal(values.clone()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum OneOrMany<T> {
    One(T),
    Many(Vec<T>),
}

impl<T: Clone> OneOrMany<T> {
    pub fn to_vec(&self) -> Vec<T> {
        match self {
            OneOrMany::One(v) => vec![v.clone()],
            OneOrMany::Many(v) => v.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum ParticleSpec {
    Total(OneOrMany<usize>),
    Sectors(Vec<Vec<usize>>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum CouplingSpec {
    Fixed(FixedCouplings),
    Distribution(Distribution),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FixedCouplings {
    pub hopping: OneOrMany<f64>,
    pub exchange: OneOrMany<f64>,
    pub pair_hopping: OneOrMany<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DistributionKind {
    Uniform,
}

/// Every bond's `t`, `J` and `K` drawn independently, per draw, from one
/// seeded generator in the order: all `t`, all `J`, all `K`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Distribution {
    pub kind: DistributionKind,
    pub low: f64,
    pub high: f64,
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default = "one")]
    pub draws: usize,
}

fn one() -> usize {
    1
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum OutputFormat {
    Json,
    Csv,
    #[default]
    Both,
}

impl OutputFormat {
    pub fn json(self) -> bool {
        matches!(self, OutputFormat::Json | OutputFormat::Both)
    }

    pub fn csv(self) -> bool {
        matches!(self, OutputFormat::Csv | OutputFormat::Both)
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    #[serde(default)]
    pub dir: Option<PathBuf>,
    #[serde(default)]
    pub format: OutputFormat,
}

/// Command-line values that take precedence over the file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub sites: Option<usize>,
    pub flavors: Option<usize>,
    pub particles: Option<usize>,
    pub seed: Option<u64>,
    pub out_dir: Option<PathBuf>,
    pub format: Option<OutputFormat>,
}

/// What the particle specification expands to.
#[derive(Debug, Clone, PartialEq)]
pub enum Workload {
    Totals(Vec<usize>),
    Sectors(Vec<Sector>),
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        serde_json::from_str(&text).map_err(|source| ConfigError::Parse {
            path: path.to_path_buf(),
            source,
        })
    }

    pub fn apply(&mut self, o: &Overrides) {
        if let Some(l) = o.sites {
            self.chain.sites = l;
        }
        if let Some(n) = o.flavors {
            self.chain.flavors = n;
        }
        if let Some(m) = o.particles {
            self.particles = ParticleSpec::Total(OneOrMany::One(m));
        }
        if let (Some(seed), CouplingSpec::Distribution(d)) = (o.seed, &mut self.couplings) {
            d.seed = Some(seed);
        }
        if let Some(dir) = &o.out_dir {
            self.outputs.dir = Some(dir.clone());
        }
        if let Some(f) = o.format {
            self.outputs.format = f;
        }
    }

    pub fn analysis_options(&self) -> AnalysisOptions {
        AnalysisOptions {
            tolerances: self.tolerances,
            solver: self.solver,
        }
    }

    pub fn seed(&self) -> Option<u64> {
        match &self.couplings {
            CouplingSpec::Distribution(d) => d.seed,
            CouplingSpec::Fixed(_) => None,
        }
    }

    /// Validates the particle specification against the chain.
    pub fn workload(&self) -> Result<Workload, ConfigError> {
        let layout = Layout::new(self.chain.sites, self.chain.flavors)?;
        match &self.particles {
            ParticleSpec::Total(t) => {
                let totals = t.to_vec();
                if totals.is_empty() {
                    return Err(ConfigError::EmptyTotals);
                }
                let capacity = layout.sites() * layout.flavors();
                for &total in &totals {
                    if total == 0 {
                        return Err(ConfigError::ZeroParticles);
                    }
                    if total > capacity {
                        return Err(ConfigError::TooManyParticles { total, capacity });
                    }
                }
                Ok(Workload::Totals(totals))
            }
            ParticleSpec::Sectors(list) => {
                if list.is_empty() {
                    return Err(ConfigError::EmptySectors);
                }
                let sectors: Vec<Sector> = list.iter().map(|c| Sector::new(c.clone())).collect();
                for s in &sectors {
                    if s.flavors() != layout.flavors() {
                        return Err(FockError::FlavorCountMismatch {
                            expected: layout.flavors(),
                            found: s.flavors(),
                        }
                        .into());
                    }
                    s.check_feasible(&layout)?;
                }
                Ok(Workload::Sectors(sectors))
            }
        }
    }

    /// One validated chain per coupling draw.
    pub fn chains(&self) -> Result<Vec<ChainConfig>, ConfigError> {
        let (l, n) = (self.chain.sites, self.chain.flavors);
        let bonds = l.saturating_sub(1);
        let potential = self.chain.potential.build();
        match &self.couplings {
            CouplingSpec::Fixed(f) => {
                let expand = |v: &OneOrMany<f64>| match v {
                    OneOrMany::One(x) => vec![*x; bonds],
                    OneOrMany::Many(xs) => xs.clone(),
                };
                let config = ChainConfig::new(
                    l,
                    n,
                    expand(&f.hopping),
                    expand(&f.exchange),
                    expand(&f.pair_hopping),
                    potential,
                )?;
                Ok(vec![config])
            }
            CouplingSpec::Distribution(d) => {
                let seed = d.seed.ok_or(ConfigError::MissingSeed)?;
                if !(d.low > 0.0 && d.low <= d.high && d.high.is_finite()) {
                    return Err(ConfigError::BadRange {
                        low: d.low,
                        high: d.high,
                    });
                }
                if d.draws == 0 {
                    return Err(ConfigError::NoDraws);
                }
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let sample = |rng: &mut ChaCha8Rng| -> Vec<f64> {
                    (0..bonds)
                        .map(|_| {
                            if d.low == d.high {
                                d.low
                            } else {
                                rng.gen_range(d.low..d.high)
                            }
                        })
                        .collect()
                };
                (0..d.draws)
                    .map(|_| {
                        let t = sample(&mut rng);
                        let j = sample(&mut rng);
                        let k = sample(&mut rng);
                        ChainConfig::new(l, n, t, j, k, potential.clone()).map_err(Into::into)
                    })
                    .collect()
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(text: &str) -> Result<ExperimentConfig, serde_json::Error> {
        serde_json::from_str(text)
    }

    #[test]
    fn fixed_scalars_broadcast_to_bonds() {
        let c = parse(
            r#"{"chain": {"sites": 3, "flavors": 2},
                "particles": {"total": [2, 3]},
                "couplings": {"fixed": {"hopping": 1.0, "exchange": [0.5, 0.7], "pair_hopping": 0}}}"#,
        )
        .unwrap();
        let chains = c.chains().unwrap();
        assert_eq!(chains[0].hopping(), &[1.0, 1.0]);
        assert_eq!(chains[0].exchange(), &[0.5, 0.7]);
        assert_eq!(c.workload().unwrap(), Workload::Totals(vec![2, 3]));
    }

    #[test]
    fn both_coupling_kinds_are_rejected() {
        let err = parse(
            r#"{"chain": {"sites": 3, "flavors": 2}, "particles": {"total": 2},
                "couplings": {"fixed": {"hopping": 1, "exchange": 1, "pair_hopping": 1},
                              "distribution": {"kind": "uniform", "low": 0.5, "high": 1.5, "seed": 1}}}"#,
        );
        assert!(err.is_err());
    }

    #[test]
    fn unknown_field_is_named() {
        let err = parse(
            r#"{"chain": {"sites": 3, "flavours": 2}, "particles": {"total": 2},
                "couplings": {"fixed": {"hopping": 1, "exchange": 1, "pair_hopping": 1}}}"#,
        )
        .unwrap_err();
        assert!(err.to_string().contains("flavours"));
        assert_eq!(err.line(), 1);
    }

    #[test]
    fn distribution_needs_a_seed() {
        let mut c = parse(
            r#"{"chain": {"sites": 3, "flavors": 2}, "particles": {"total": 2},
                "couplings": {"distribution": {"kind": "uniform", "low": 0.5, "high": 1.5, "draws": 2}}}"#,
        )
        .unwrap();
        assert!(matches!(c.chains(), Err(ConfigError::MissingSeed)));
        c.apply(&Overrides {
            seed: Some(9),
            ..Overrides::default()
        });
        let a = c.chains().unwrap();
        let b = c.chains().unwrap();
        assert_eq!(a.len(), 2);
        assert_eq!(a[1].pair_hopping(), b[1].pair_hopping());
        assert_ne!(a[0].hopping(), a[1].hopping());
    }

    #[test]
    fn sector_lists_are_validated() {
        let base = |particles: &str| {
            parse(&format!(
                r#"{{"chain": {{"sites": 2, "flavors": 1}}, "particles": {particles},
                    "couplings": {{"fixed": {{"hopping": 1, "exchange": 1, "pair_hopping": 1}}}}}}"#
            ))
            .unwrap()
        };
        assert!(matches!(
            base(r#"{"sectors": [[3]]}"#).workload(),
            Err(ConfigError::Sector(FockError::InfeasibleSector { .. }))
        ));
        assert!(matches!(
            base(r#"{"sectors": []}"#).workload(),
            Err(ConfigError::EmptySectors)
        ));
        assert!(base(r#"{"sectors": [[1]]}"#).workload().is_ok());
    }

    #[test]
    fn negative_hopping_is_rejected() {
        let c = parse(
            r#"{"chain": {"sites": 3, "flavors": 2}, "particles": {"total": 2},
                "couplings": {"fixed": {"hopping": [1.0, -0.5], "exchange": 1, "pair_hopping": 1}}}"#,
        )
        .unwrap();
        assert!(matches!(
            c.chains(),
            Err(ConfigError::Chain(HamiltonianError::NonPositiveHopping { .. }))
        ));
    }
}
