//! Noninteracting limit: single-particle levels of the hopping matrix and
//! filled-level sector energies.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::fock::Sector;
use crate::tridiag;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FreeFermionError {
    #[error("{boundary:?} chain of {sites} sites needs {expected} hoppings, found {found}")]
    CouplingCount {
        boundary: Boundary,
        sites: usize,
        expected: usize,
        found: usize,
    },
    #[error("flavor {flavor} needs {count} levels but only {levels} exist")]
    InfeasibleSector {
        flavor: usize,
        count: usize,
        levels: usize,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Boundary {
    Open,
    Periodic,
}

/// Sorted single-particle levels.
///
/// `offset` is the constant added to every level relative to the raw
/// hopping-matrix spectrum; it is zero for [`single_particle_energies`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SingleParticleSpectrum {
    pub energies: Vec<f64>,
    pub boundary: Boundary,
    pub offset: f64,
}

/// Eigenvalues of the `L x L` hopping matrix with entries `-t_x`.
///
/// Open chains take `L - 1` couplings, periodic ones `L` (the last closes the
/// ring). For `L = 2` the periodic ring has both bonds between the same pair.
pub fn single_particle_energies(
    hopping: &[f64],
    sites: usize,
    boundary: Boundary,
) -> Result<SingleParticleSpectrum, FreeFermionError> {
    let expected = match boundary {
        Boundary::Open => sites.saturating_sub(1),
        Boundary::Periodic => sites,
    };
    if sites == 0 || hopping.len() != expected || (boundary == Boundary::Periodic && sites < 2) {
        return Err(FreeFermionError::CouplingCount {
            boundary,
            sites,
            expected,
            found: hopping.len(),
        });
    }
    let mut energies = match boundary {
        Boundary::Open => {
            let off: Vec<f64> = hopping.iter().map(|t| -t).collect();
            tridiag::eigenvalues(&vec![0.0; sites], &off)
        }
        Boundary::Periodic => {
            let mut m = DMatrix::<f64>::zeros(sites, sites);
            for (x, t) in hopping.iter().enumerate() {
                let y = (x + 1) % sites;
                m[(x, y)] -= t;
                m[(y, x)] -= t;
            }
            m.symmetric_eigenvalues().iter().copied().collect()
        }
    };
    energies.sort_by(f64::total_cmp);
    Ok(SingleParticleSpectrum {
        energies,
        boundary,
        offset: 0.0,
    })
}

/// `eps_k = 4 t sin^2(pi (k - 1) / L)` for `k = 1..L`, sorted.
///
/// These are the periodic uniform-chain levels shifted by `+2t`, which is
/// recorded in `offset`.
pub fn periodic_dispersion(t: f64, sites: usize) -> SingleParticleSpectrum {
    let mut energies: Vec<f64> = (0..sites)
        .map(|k| {
            let s = (PI * k as f64 / sites as f64).sin();
            4.0 * t * s * s
        })
        .collect();
    energies.sort_by(f64::total_cmp);
    SingleParticleSpectrum {
        energies,
        boundary: Boundary::Periodic,
        offset: 2.0 * t,
    }
}

/// Ground energy of a sector without interactions: every flavor fills its
/// `M_a` lowest levels independently.
pub fn free_sector_energy(
    spectrum: &SingleParticleSpectrum,
    sector: &Sector,
) -> Result<f64, FreeFermionError> {
    let levels = spectrum.energies.len();
    let mut total = 0.0;
    for (flavor, &count) in sector.counts().iter().enumerate() {
        if count > levels {
            return Err(FreeFermionError::InfeasibleSector {
                flavor,
                count,
                levels,
            });
        }
        total += spectrum.energies[..count].iter().sum::<f64>();
    }
    Ok(total)
}
