//! Exact diagonalization of the SU(N) extended Hubbard-Heisenberg open chain
//! with pair hopping.
//!
//! The Hamiltonian conserves the particle number of every flavor, so it is
//! built and diagonalized one sector `(M_1, ..., M_N)` at a time. The
//! [`spectra`] module turns sector spectra into verdicts about how multiplet
//! energies are ordered along the dominance order of Young diagrams.
//!
//! ```
//! use sunchain_core::{level_ordering_report, AnalysisOptions, ChainConfig, Potential};
//!
//! # fn main() -> Result<(), Box<dyn std::error::Error>> {
//! let chain = ChainConfig::uniform(4, 3, 1.0, 0.8, 0.5, Potential::Hubbard { u: 1.0 })?;
//! let report = level_ordering_report(&chain, 7, &AnalysisOptions::default())?;
//! assert_eq!(report.ground.lowest_diagram.to_string(), "3,2,2");
//! assert_eq!(report.ground.multiplicity, 3);
//! assert!(report.failures().is_empty());
//! # Ok(())
//! # }
//! ```

pub mod fock;
pub mod freefermion;
pub mod hamiltonian;
pub mod lanczos;
pub mod spectra;
pub mod tridiag;
pub mod young;

pub use fock::{FockState, Layout, ModeOrder, Sector, SectorBasis};
pub use hamiltonian::{build_sector_matrix, ChainConfig, Potential, SparseSectorMatrix};
pub use spectra::{level_ordering_report, AnalysisOptions, SpectrumReport, Verdict};
pub use young::{Dominance, YoungDiagram};
