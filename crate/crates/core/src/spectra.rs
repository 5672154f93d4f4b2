//! Lowest eigenpairs per sector and the checks built on them: Perron-Frobenius
//! positivity and uniqueness, multiplet identification, level ordering along
//! the dominance order, and the ground multiplet.

use std::collections::BTreeMap;

use nalgebra::SymmetricEigen;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::fock::{trial_state, Sector, SectorBasis};
use crate::freefermion::{free_sector_energy, single_particle_energies, Boundary};
use crate::hamiltonian::{
    apply_raising, build_sector_matrix, check_connectivity, check_offdiagonal_nonpositive,
    ChainConfig, HamiltonianError, SparseSectorMatrix, DEFAULT_MAX_DIMENSION,
};
use crate::lanczos::{self, LanczosOptions, SolverError};
use crate::young::{enumerate_diagrams, ground_diagram, Dominance, YoungDiagram, YoungError};

#[derive(Debug, Error)]
pub enum SpectraError {
    #[error(transparent)]
    Hamiltonian(#[from] HamiltonianError),
    #[error(transparent)]
    Young(#[from] YoungError),
    #[error("eigensolver failed in sector {sector}: {source}")]
    Solver {
        sector: Sector,
        #[source]
        source: SolverError,
    },
    #[error("{particles} particles do not fit on {capacity} modes")]
    TooManyParticles { particles: usize, capacity: usize },
    #[error("sector {0} is not nonascending")]
    NotNonascending(Sector),
}

/// Numerical thresholds used by the verdicts. Relative ones scale with
/// `max(1, |E|)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    /// Eigenpair residual `|Hv - Ev|`, relative.
    pub residual: f64,
    /// Two levels closer than this are degenerate, relative.
    pub degeneracy: f64,
    /// Smallest gauge-fixed component over the largest one.
    pub positivity_floor: f64,
    /// Smallest acceptable ground-vector component on the trial state.
    pub trial_overlap: f64,
    /// Largest acceptable norm of a raised relative ground state.
    pub highest_weight: f64,
    /// Required `E(upper) - E(lower)` for dominance-related diagrams.
    pub ordering_margin: f64,
    /// Spread of ground energies over rearranged sectors, relative.
    pub permutation: f64,
    /// Deviation from the filled-level energy in the free limit, absolute.
    pub free_fermion: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            residual: 1e-10,
            degeneracy: 1e-8,
            positivity_floor: 1e-12,
            trial_overlap: 1e-12,
            highest_weight: 1e-8,
            ordering_margin: 1e-9,
            permutation: 1e-10,
            free_fermion: 1e-10,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverOptions {
    /// Sectors up to this dimension are diagonalized densely.
    pub dense_crossover: usize,
    pub max_krylov: usize,
    pub max_restarts: usize,
    /// Sectors above this dimension are refused.
    pub max_dimension: usize,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            dense_crossover: 512,
            max_krylov: 120,
            max_restarts: 50,
            max_dimension: DEFAULT_MAX_DIMENSION,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct AnalysisOptions {
    pub tolerances: Tolerances,
    pub solver: SolverOptions,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Pass,
    Fail,
    Indeterminate,
}

impl Verdict {
    pub fn from_bool(ok: bool) -> Self {
        if ok {
            Verdict::Pass
        } else {
            Verdict::Fail
        }
    }

    pub fn is_pass(self) -> bool {
        self == Verdict::Pass
    }
}

/// One eigenpair with a unit-norm vector over the sector basis.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenResult {
    pub energy: f64,
    pub vector: Vec<f64>,
    /// Distance to the next computed eigenvalue.
    pub gap: Option<f64>,
    pub residual: f64,
}

fn relative(e: f64) -> f64 {
    e.abs().max(1.0)
}

/// The `how_many` algebraically smallest eigenpairs, ascending.
///
/// Dense diagonalization up to `dense_crossover`, Lanczos with full
/// reorthogonalization above it.
pub fn lowest_eigenpairs(
    m: &SparseSectorMatrix,
    how_many: usize,
    solver: &SolverOptions,
    residual_tolerance: f64,
) -> Result<Vec<EigenResult>, SolverError> {
    let dim = m.dim();
    if how_many > dim {
        return Err(SolverError::TooManyRequested {
            requested: how_many,
            dim,
        });
    }
    let mut results: Vec<EigenResult> = if dim <= solver.dense_crossover {
        let eig = SymmetricEigen::new(m.to_dense());
        let mut order: Vec<usize> = (0..dim).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
        order
            .into_iter()
            .take(how_many)
            .map(|i| {
                let vector: Vec<f64> = eig.eigenvectors.column(i).iter().copied().collect();
                let energy = eig.eigenvalues[i];
                let residual = residual_norm(m, &vector, energy);
                EigenResult {
                    energy,
                    vector,
                    gap: None,
                    residual,
                }
            })
            .collect()
    } else {
        let options = LanczosOptions {
            max_krylov: solver.max_krylov,
            max_restarts: solver.max_restarts,
            residual_tolerance,
            ..LanczosOptions::default()
        };
        lanczos::lowest_eigenpairs(m, how_many, &options)?
            .into_iter()
            .map(|p| EigenResult {
                energy: p.value,
                vector: p.vector,
                gap: None,
                residual: p.residual,
            })
            .collect()
    };
    for r in &results {
        let tolerance = residual_tolerance * relative(r.energy);
        if r.residual > tolerance {
            return Err(SolverError::NotConverged {
                iterations: 0,
                residual: r.residual,
                tolerance,
            });
        }
    }
    for i in 0..results.len().saturating_sub(1) {
        results[i].gap = Some(results[i + 1].energy - results[i].energy);
    }
    Ok(results)
}

fn residual_norm(m: &SparseSectorMatrix, v: &[f64], e: f64) -> f64 {
    let mut hv = vec![0.0; v.len()];
    m.matvec(v, &mut hv);
    hv.iter()
        .zip(v)
        .map(|(a, b)| (a - e * b).powi(2))
        .sum::<f64>()
        .sqrt()
}

/// Sign that makes the largest-magnitude component positive.
fn gauge_sign(v: &[f64]) -> f64 {
    let big = v
        .iter()
        .copied()
        .max_by(|a, b| a.abs().total_cmp(&b.abs()))
        .unwrap_or(1.0);
    if big < 0.0 {
        -1.0
    } else {
        1.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PositivityCheck {
    pub verdict: Verdict,
    /// Smallest gauge-fixed component.
    pub min_component: f64,
    pub max_component: f64,
}

/// Strict positivity of a vector after fixing its global sign.
pub fn verify_positivity(r: &EigenResult, floor: f64) -> PositivityCheck {
    let sign = gauge_sign(&r.vector);
    let (min, max) = r
        .vector
        .iter()
        .map(|v| sign * v)
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)));
    PositivityCheck {
        verdict: Verdict::from_bool(min > floor * max),
        min_component: min,
        max_component: max,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UniquenessCheck {
    pub verdict: Verdict,
    pub gap: Option<f64>,
}

/// Nondegeneracy of the lowest level. A single result means a
/// one-dimensional sector and passes.
pub fn verify_uniqueness(results: &[EigenResult], degeneracy: f64) -> UniquenessCheck {
    match results {
        [e0, e1, ..] => {
            let gap = e1.energy - e0.energy;
            UniquenessCheck {
                verdict: Verdict::from_bool(gap > degeneracy * relative(e0.energy)),
                gap: Some(gap),
            }
        }
        _ => UniquenessCheck {
            verdict: Verdict::Pass,
            gap: None,
        },
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MultipletCheck {
    pub verdict: Verdict,
    /// Gauge-fixed amplitude on the compact trial state.
    pub trial_component: f64,
    /// Largest norm of `F^{ab} v` over `a < b`.
    pub max_raising_norm: f64,
}

/// Checks that an eigenvector of a nonascending sector overlaps the trial
/// state and is annihilated by every raising generator, i.e. that it is the
/// highest-weight state of the multiplet labelled by the sector's diagram.
pub fn verify_multiplet_label(
    r: &EigenResult,
    basis: &SectorBasis,
    tolerances: &Tolerances,
) -> Result<MultipletCheck, SpectraError> {
    let sector = basis.sector();
    if !sector.is_nonascending() {
        return Err(SpectraError::NotNonascending(sector.clone()));
    }
    let sign = gauge_sign(&r.vector);
    let trial = trial_state(basis.layout(), sector).map_err(HamiltonianError::from)?;
    let trial_component = basis
        .index_of(trial)
        .map_or(0.0, |i| sign * r.vector[i]);
    let flavors = sector.flavors();
    let mut max_raising_norm: f64 = 0.0;
    for a in 0..flavors {
        for b in a + 1..flavors {
            match apply_raising(basis, &r.vector, a, b) {
                Ok(raised) => max_raising_norm = max_raising_norm.max(raised.norm()),
                // flavor `a` is already full: the image is zero
                Err(HamiltonianError::InfeasibleTarget(_)) => {}
                Err(e) => return Err(e.into()),
            }
        }
    }
    Ok(MultipletCheck {
        verdict: Verdict::from_bool(
            trial_component > tolerances.trial_overlap
                && max_raising_norm <= tolerances.highest_weight,
        ),
        trial_component,
        max_raising_norm,
    })
}

/// Everything computed for one sector.
#[derive(Debug, Clone)]
pub struct SectorAnalysis {
    pub basis: SectorBasis,
    pub eigenpairs: Vec<EigenResult>,
    pub summary: SectorSummary,
}

/// Serializable digest of a [`SectorAnalysis`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SectorSummary {
    pub sector: Sector,
    pub dimension: usize,
    /// Lowest computed eigenvalues, ascending.
    pub energies: Vec<f64>,
    pub symmetric: bool,
    pub nonpositive: bool,
    pub connected: bool,
    pub positivity: PositivityCheck,
    pub uniqueness: UniquenessCheck,
    /// Present for nonascending sectors.
    pub multiplet: Option<MultipletCheck>,
}

impl SectorSummary {
    pub fn failures(&self) -> Vec<String> {
        let s = &self.sector;
        let mut out = Vec::new();
        if !self.symmetric {
            out.push(format!("sector {s}: matrix not symmetric"));
        }
        if !self.nonpositive {
            out.push(format!("sector {s}: off-diagonal nonpositivity violated"));
        }
        if !self.connected {
            out.push(format!("sector {s}: hopping graph disconnected"));
        }
        if !self.positivity.verdict.is_pass() {
            out.push(format!(
                "sector {s}: ground vector not strictly positive (min component {:e})",
                self.positivity.min_component
            ));
        }
        if !self.uniqueness.verdict.is_pass() {
            out.push(format!(
                "sector {s}: relative ground state degenerate (gap {:?})",
                self.uniqueness.gap
            ));
        }
        if let Some(m) = &self.multiplet {
            if !m.verdict.is_pass() {
                out.push(format!(
                    "sector {s}: not a highest-weight state (trial component {:e}, raising norm {:e})",
                    m.trial_component, m.max_raising_norm
                ));
            }
        }
        out
    }
}

/// Builds, checks and diagonalizes one sector, keeping `how_many` lowest
/// eigenpairs (fewer if the sector is smaller).
pub fn analyze_sector(
    config: &ChainConfig,
    sector: &Sector,
    how_many: usize,
    options: &AnalysisOptions,
) -> Result<SectorAnalysis, SpectraError> {
    let tol = &options.tolerances;
    let h = build_sector_matrix(config, sector, options.solver.max_dimension)?;
    let dimension = h.matrix.dim();
    let eigenpairs = lowest_eigenpairs(
        &h.matrix,
        how_many.clamp(1, dimension),
        &options.solver,
        tol.residual,
    )
    .map_err(|source| SpectraError::Solver {
        sector: sector.clone(),
        source,
    })?;
    let positivity = verify_positivity(&eigenpairs[0], tol.positivity_floor);
    let uniqueness = verify_uniqueness(&eigenpairs, tol.degeneracy);
    let multiplet = if sector.is_nonascending() {
        Some(verify_multiplet_label(&eigenpairs[0], &h.basis, tol)?)
    } else {
        None
    };
    let summary = SectorSummary {
        sector: sector.clone(),
        dimension,
        energies: eigenpairs.iter().map(|e| e.energy).collect(),
        symmetric: h.matrix.is_symmetric(),
        nonpositive: check_offdiagonal_nonpositive(&h.matrix),
        connected: check_connectivity(&h.matrix),
        positivity,
        uniqueness,
        multiplet,
    };
    Ok(SectorAnalysis {
        basis: h.basis,
        eigenpairs,
        summary,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PermutationCheck {
    pub verdict: Verdict,
    pub energies: Vec<(Sector, f64)>,
    pub spread: f64,
}

/// Lowest energies of every distinct rearrangement of `sector` agree.
pub fn permuted_sector_consistency(
    config: &ChainConfig,
    sector: &Sector,
    options: &AnalysisOptions,
) -> Result<PermutationCheck, SpectraError> {
    let energies = sector
        .distinct_permutations()
        .par_iter()
        .map(|s| {
            let h = build_sector_matrix(config, s, options.solver.max_dimension)?;
            let e = lowest_eigenpairs(&h.matrix, 1, &options.solver, options.tolerances.residual)
                .map_err(|source| SpectraError::Solver {
                    sector: s.clone(),
                    source,
                })?;
            Ok((s.clone(), e[0].energy))
        })
        .collect::<Result<Vec<_>, SpectraError>>()?;
    Ok(permutation_check(energies, options.tolerances.permutation))
}

fn permutation_check(energies: Vec<(Sector, f64)>, tolerance: f64) -> PermutationCheck {
    let lo = energies.iter().map(|e| e.1).fold(f64::INFINITY, f64::min);
    let hi = energies.iter().map(|e| e.1).fold(f64::NEG_INFINITY, f64::max);
    let spread = hi - lo;
    PermutationCheck {
        verdict: Verdict::from_bool(spread <= tolerance * relative(lo)),
        energies,
        spread,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChainEcho {
    pub hopping: Vec<f64>,
    pub exchange: Vec<f64>,
    pub pair_hopping: Vec<f64>,
    pub potential: String,
}

impl ChainEcho {
    pub fn of(config: &ChainConfig) -> Self {
        Self {
            hopping: config.hopping().to_vec(),
            exchange: config.exchange().to_vec(),
            pair_hopping: config.pair_hopping().to_vec(),
            potential: config.potential().to_string(),
        }
    }
}

/// Per-diagram row of a [`SpectrumReport`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiagramEntry {
    /// False when the first row is longer than the chain.
    pub feasible: bool,
    /// `E(diagram)`: the relative ground energy of its nonascending sector.
    pub energy: Option<f64>,
    pub sector: Option<Sector>,
    pub gap: Option<f64>,
    pub positivity: Option<Verdict>,
    pub uniqueness: Option<Verdict>,
    pub highest_weight: Option<Verdict>,
    pub trial_component: Option<f64>,
    pub max_raising_norm: Option<f64>,
    /// Spread of ground energies over all rearrangements of the sector.
    pub permutation_spread: Option<f64>,
    pub permutation: Option<Verdict>,
    /// Filled-level energy, present in the noninteracting limit.
    pub free_energy: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrderingViolation {
    pub upper: YoungDiagram,
    pub lower: YoungDiagram,
    pub upper_energy: f64,
    pub lower_energy: f64,
}

/// Incomparable diagrams; their energy difference is recorded, not judged.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UnjudgedPair {
    pub first: YoungDiagram,
    pub second: YoungDiagram,
    pub energy_difference: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroundMultipletCheck {
    pub expected_diagram: YoungDiagram,
    pub lowest_diagram: YoungDiagram,
    pub diagram_verdict: Verdict,
    pub energy: f64,
    /// Eigenvalues, over all sectors with this particle number, within the
    /// degeneracy tolerance of the global minimum.
    pub multiplicity: usize,
    pub expected_multiplicity: u64,
    pub multiplicity_verdict: Verdict,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FreeFermionCheck {
    pub verdict: Verdict,
    pub single_particle_energies: Vec<f64>,
    pub max_deviation: f64,
}

/// Level-ordering verdicts for one chain at fixed particle number.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumReport {
    pub sites: usize,
    pub flavors: usize,
    pub particles: usize,
    pub chain: ChainEcho,
    pub warnings: Vec<String>,
    pub diagrams: BTreeMap<YoungDiagram, DiagramEntry>,
    pub sectors: Vec<SectorSummary>,
    pub comparable_pairs: usize,
    pub violations: Vec<OrderingViolation>,
    pub unjudged_pairs: Vec<UnjudgedPair>,
    pub ground: GroundMultipletCheck,
    pub free_fermion: Option<FreeFermionCheck>,
}

impl SpectrumReport {
    /// Human-readable list of every failed or indeterminate check.
    pub fn failures(&self) -> Vec<String> {
        let mut out: Vec<String> = self.sectors.iter().flat_map(|s| s.failures()).collect();
        for (d, entry) in &self.diagrams {
            if entry.permutation.is_some_and(|v| !v.is_pass()) {
                out.push(format!(
                    "diagram {d}: rearranged sectors disagree (spread {:e})",
                    entry.permutation_spread.unwrap_or(f64::NAN)
                ));
            }
        }
        for v in &self.violations {
            out.push(format!(
                "ordering violated: E({}) = {} not above E({}) = {}",
                v.upper, v.upper_energy, v.lower, v.lower_energy
            ));
        }
        let g = &self.ground;
        if !g.diagram_verdict.is_pass() {
            out.push(format!(
                "lowest diagram {} differs from expected {}",
                g.lowest_diagram, g.expected_diagram
            ));
        }
        match g.multiplicity_verdict {
            Verdict::Pass => {}
            Verdict::Fail => out.push(format!(
                "ground multiplicity {} differs from expected {}",
                g.multiplicity, g.expected_multiplicity
            )),
            Verdict::Indeterminate => out.push(format!(
                "ground multiplicity indeterminate: a level sits at the degeneracy tolerance (counted {})",
                g.multiplicity
            )),
        }
        if let Some(f) = &self.free_fermion {
            if !f.verdict.is_pass() {
                out.push(format!(
                    "free-fermion energies deviate by {:e}",
                    f.max_deviation
                ));
            }
        }
        out
    }

    pub fn passed(&self) -> bool {
        self.failures().is_empty()
    }
}

/// Diagonalizes every sector with `particles` fermions and renders the
/// level-ordering, ground-multiplet and structural verdicts.
pub fn level_ordering_report(
    config: &ChainConfig,
    particles: usize,
    options: &AnalysisOptions,
) -> Result<SpectrumReport, SpectraError> {
    let (sites, flavors) = (config.sites(), config.flavors());
    let tol = &options.tolerances;
    let capacity = sites * flavors;
    if particles > capacity {
        return Err(SpectraError::TooManyParticles {
            particles,
            capacity,
        });
    }
    let expected = ground_diagram(particles, flavors)?;

    let sectors = Sector::all_with_total(particles, flavors, sites);
    let analyses: Vec<SectorSummary> = sectors
        .par_iter()
        .map(|s| analyze_sector(config, s, 2, options).map(|a| a.summary))
        .collect::<Result<_, _>>()?;
    let by_sector: BTreeMap<&Sector, &SectorSummary> =
        analyses.iter().map(|a| (&a.sector, a)).collect();

    let free = if config.is_free() {
        let hopping = config.hopping();
        let spectrum = single_particle_energies(hopping, sites, Boundary::Open)
            .expect("validated hopping length");
        Some(spectrum)
    } else {
        None
    };

    let diagrams = enumerate_diagrams(particles, flavors);
    let mut table: BTreeMap<YoungDiagram, DiagramEntry> = BTreeMap::new();
    let mut energies: Vec<(YoungDiagram, f64)> = Vec::new();
    for d in &diagrams {
        let sector = d.highest_weight(flavors)?;
        let Some(summary) = by_sector.get(&sector) else {
            table.insert(
                d.clone(),
                DiagramEntry {
                    feasible: false,
                    energy: None,
                    sector: None,
                    gap: None,
                    positivity: None,
                    uniqueness: None,
                    highest_weight: None,
                    trial_component: None,
                    max_raising_norm: None,
                    permutation_spread: None,
                    permutation: None,
                    free_energy: None,
                },
            );
            continue;
        };
        let perms: Vec<(Sector, f64)> = sector
            .distinct_permutations()
            .into_iter()
            .map(|p| {
                let e = by_sector[&p].energies[0];
                (p, e)
            })
            .collect();
        let perm = permutation_check(perms, tol.permutation);
        let multiplet = summary.multiplet.expect("nonascending sector");
        let energy = summary.energies[0];
        energies.push((d.clone(), energy));
        table.insert(
            d.clone(),
            DiagramEntry {
                feasible: true,
                energy: Some(energy),
                sector: Some(sector.clone()),
                gap: summary.uniqueness.gap,
                positivity: Some(summary.positivity.verdict),
                uniqueness: Some(summary.uniqueness.verdict),
                highest_weight: Some(multiplet.verdict),
                trial_component: Some(multiplet.trial_component),
                max_raising_norm: Some(multiplet.max_raising_norm),
                permutation_spread: Some(perm.spread),
                permutation: Some(perm.verdict),
                free_energy: free
                    .as_ref()
                    .map(|s| free_sector_energy(s, &sector).expect("feasible sector")),
            },
        );
    }

    let mut comparable_pairs = 0;
    let mut violations = Vec::new();
    let mut unjudged_pairs = Vec::new();
    for (i, (a, ea)) in energies.iter().enumerate() {
        for (b, eb) in &energies[i + 1..] {
            let (upper, lower, eu, el) = match a.dominance(b) {
                Dominance::Above => (a, b, *ea, *eb),
                Dominance::Below => (b, a, *eb, *ea),
                Dominance::Equal => continue,
                Dominance::Incomparable => {
                    unjudged_pairs.push(UnjudgedPair {
                        first: a.clone(),
                        second: b.clone(),
                        energy_difference: ea - eb,
                    });
                    continue;
                }
            };
            comparable_pairs += 1;
            // written so that a NaN energy counts as a violation
            let ordered = eu > el + tol.ordering_margin;
            if !ordered {
                violations.push(OrderingViolation {
                    upper: upper.clone(),
                    lower: lower.clone(),
                    upper_energy: eu,
                    lower_energy: el,
                });
            }
        }
    }

    let (lowest_diagram, _) = energies
        .iter()
        .min_by(|x, y| x.1.total_cmp(&y.1))
        .cloned()
        .expect("the ground diagram always fits");
    let all_levels: Vec<f64> = analyses.iter().flat_map(|a| a.energies.iter().copied()).collect();
    let ground_energy = all_levels.iter().copied().fold(f64::INFINITY, f64::min);
    let window = tol.degeneracy * relative(ground_energy);
    let mut multiplicity = 0;
    let mut boundary_tie = false;
    for e in &all_levels {
        let d = e - ground_energy;
        if d <= window {
            multiplicity += 1;
        }
        if (d - window).abs() <= 0.5 * window {
            boundary_tie = true;
        }
    }
    let expected_multiplicity = expected.irrep_dimension(flavors)? as u64;
    let multiplicity_verdict = if boundary_tie {
        Verdict::Indeterminate
    } else {
        Verdict::from_bool(multiplicity as u64 == expected_multiplicity)
    };
    let ground = GroundMultipletCheck {
        diagram_verdict: Verdict::from_bool(lowest_diagram == expected),
        expected_diagram: expected,
        lowest_diagram,
        energy: ground_energy,
        multiplicity,
        expected_multiplicity,
        multiplicity_verdict,
    };

    let free_fermion = free.map(|spectrum| {
        let max_deviation = analyses
            .iter()
            .map(|a| {
                let e = free_sector_energy(&spectrum, &a.sector).expect("feasible sector");
                (e - a.energies[0]).abs()
            })
            .fold(0.0, f64::max);
        FreeFermionCheck {
            verdict: Verdict::from_bool(max_deviation <= tol.free_fermion),
            single_particle_energies: spectrum.energies,
            max_deviation,
        }
    });

    Ok(SpectrumReport {
        sites,
        flavors,
        particles,
        chain: ChainEcho::of(config),
        warnings: config.warnings(),
        diagrams: table,
        sectors: analyses,
        comparable_pairs,
        violations,
        unjudged_pairs,
        ground,
        free_fermion,
    })
}
