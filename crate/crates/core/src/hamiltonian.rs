//! Sector-restricted matrices of the `SU(N)` extended Hubbard chain
//!
//! ```text
//! H = - sum_{x,a} t_x (c+_{x+1,a} c_{x,a} + h.c.)
//!     + V(n_1, ..., n_L)
//!     + sum_x J_x sum_A T^A_x T^A_{x+1}
//!     - sum_{x, a>b} K_x (c+_{x+1,a} c+_{x+1,b} c_{x,b} c_{x,a} + h.c.)
//! ```
//!
//! on an open chain, together with the flavor-raising generators
//! `F^{ab} = sum_x c+_{x,a} c_{x,b}`.
//!
//! The Heisenberg bond is never built from the generators `T^A`; it is
//! expanded into flavor exchange plus a density remainder,
//!
//! ```text
//! sum_A T^A_x T^A_{x+1} = -2 sum_{a,b} c+_{x,a} c_{x+1,a} c+_{x+1,b} c_{x,b}
//!                         + 2 n_x - (2/N) n_x n_{x+1}
//! ```
//!
//! In the flavor-major signed basis every off-diagonal element is `-t_x`,
//! `-K_x` or `-2 J_x` (or a sum of them).

use std::collections::VecDeque;
use std::fmt;
use std::io::{self, Write};
use std::sync::Arc;

use nalgebra::DMatrix;
use thiserror::Error;

use crate::fock::{
    apply_exchange, apply_hop, apply_mode_op, apply_pair_hop, FockError, Layout, ModeOp,
    ModeOrder, Sector, SectorBasis,
};
use crate::lanczos::SymmetricOperator;

/// Sector dimension above which matrix construction is refused.
pub const DEFAULT_MAX_DIMENSION: usize = 500_000;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum HamiltonianError {
    #[error(transparent)]
    Fock(#[from] FockError),
    #[error("{name} needs {expected} entries (one per bond or site), found {found}")]
    CouplingLength {
        name: &'static str,
        expected: usize,
        found: usize,
    },
    #[error("hopping t[{bond}] = {value} must be strictly positive")]
    NonPositiveHopping { bond: usize, value: f64 },
    #[error("{name}[{index}] = {value} must be finite and non-negative")]
    NegativeCoupling {
        name: &'static str,
        index: usize,
        value: f64,
    },
    #[error("potential parameter {value} is not finite")]
    NonFinitePotential { value: f64 },
    #[error("sector dimension {dimension} exceeds the cap of {cap}")]
    DimensionCap { dimension: u128, cap: usize },
    #[error("raising operator needs two distinct flavors, got {0} twice")]
    SameFlavor(usize),
    #[error("raising target sector {0} is infeasible")]
    InfeasibleTarget(Sector),
}

/// User-supplied potential as a function of the site occupations.
pub type PotentialFn = Arc<dyn Fn(&[usize]) -> f64 + Send + Sync>;

/// On-site interaction `V(n_1, ..., n_L)`, a function of the local fermion
/// numbers only.
#[derive(Clone)]
pub enum Potential {
    /// `U/2 sum_x n_x^2`
    Hubbard { u: f64 },
    /// `sum_x v_x n_x`
    SiteDiagonal(Vec<f64>),
    Custom(PotentialFn),
}

impl Potential {
    pub fn energy(&self, occupations: &[usize]) -> f64 {
        match self {
            Potential::Hubbard { u } => {
                0.5 * u * occupations.iter().map(|&n| (n * n) as f64).sum::<f64>()
            }
            Potential::SiteDiagonal(v) => v
                .iter()
                .zip(occupations)
                .map(|(vx, &n)| vx * n as f64)
                .sum(),
            Potential::Custom(f) => f(occupations),
        }
    }

    /// True when the potential is known to vanish identically.
    pub fn is_zero(&self) -> bool {
        match self {
            Potential::Hubbard { u } => *u == 0.0,
            Potential::SiteDiagonal(v) => v.iter().all(|&x| x == 0.0),
            Potential::Custom(_) => false,
        }
    }
}

impl fmt::Debug for Potential {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Potential::Hubbard { u } => f.debug_struct("Hubbard").field("u", u).finish(),
            Potential::SiteDiagonal(v) => f.debug_tuple("SiteDiagonal").field(v).finish(),
            Potential::Custom(_) => f.write_str("Custom(..)"),
        }
    }
}

impl fmt::Display for Potential {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Potential::Hubbard { u } => write!(f, "hubbard(u={u})"),
            Potential::SiteDiagonal(v) => write!(f, "site_diagonal({v:?})"),
            Potential::Custom(_) => write!(f, "custom"),
        }
    }
}

/// Chain length, flavor count, bond couplings and potential.
#[derive(Debug, Clone)]
pub struct ChainConfig {
    layout: Layout,
    hopping: Vec<f64>,
    exchange: Vec<f64>,
    pair_hopping: Vec<f64>,
    potential: Potential,
}

impl ChainConfig {
    /// Validates and builds a configuration. `hopping`, `exchange` and
    /// `pair_hopping` hold one value per bond (`L - 1` entries).
    pub fn new(
        sites: usize,
        flavors: usize,
        hopping: Vec<f64>,
        exchange: Vec<f64>,
        pair_hopping: Vec<f64>,
        potential: Potential,
    ) -> Result<Self, HamiltonianError> {
        let layout = Layout::new(sites, flavors)?;
        let bonds = sites - 1;
        for (name, values) in [
            ("hopping", &hopping),
            ("exchange", &exchange),
            ("pair_hopping", &pair_hopping),
        ] {
            if values.len() != bonds {
                return Err(HamiltonianError::CouplingLength {
                    name,
                    expected: bonds,
                    found: values.len(),
                });
            }
        }
        if let Some((bond, &value)) = hopping
            .iter()
            .enumerate()
            .find(|(_, t)| !(t.is_finite() && **t > 0.0))
        {
            return Err(HamiltonianError::NonPositiveHopping { bond, value });
        }
        for (name, values) in [("exchange", &exchange), ("pair_hopping", &pair_hopping)] {
            if let Some((index, &value)) = values
                .iter()
                .enumerate()
                .find(|(_, v)| !(v.is_finite() && **v >= 0.0))
            {
                return Err(HamiltonianError::NegativeCoupling { name, index, value });
            }
        }
        match &potential {
            Potential::Hubbard { u } if !u.is_finite() => {
                return Err(HamiltonianError::NonFinitePotential { value: *u })
            }
            Potential::SiteDiagonal(v) => {
                if v.len() != sites {
                    return Err(HamiltonianError::CouplingLength {
                        name: "site_diagonal",
                        expected: sites,
                        found: v.len(),
                    });
                }
                if let Some(&value) = v.iter().find(|x| !x.is_finite()) {
                    return Err(HamiltonianError::NonFinitePotential { value });
                }
            }
            _ => {}
        }
        Ok(Self {
            layout,
            hopping,
            exchange,
            pair_hopping,
            potential,
        })
    }

    /// Same couplings on every bond.
    pub fn uniform(
        sites: usize,
        flavors: usize,
        t: f64,
        j: f64,
        k: f64,
        potential: Potential,
    ) -> Result<Self, HamiltonianError> {
        let bonds = sites.saturating_sub(1);
        Self::new(
            sites,
            flavors,
            vec![t; bonds],
            vec![j; bonds],
            vec![k; bonds],
            potential,
        )
    }

    /// Switches the sign convention of the basis. Anything but the default
    /// flavor-major order breaks nonpositivity; used for mutation tests.
    pub fn with_mode_order(mut self, order: ModeOrder) -> Self {
        self.layout = self.layout.with_mode_order(order);
        self
    }

    pub fn layout(&self) -> &Layout {
        &self.layout
    }

    pub fn sites(&self) -> usize {
        self.layout.sites()
    }

    pub fn flavors(&self) -> usize {
        self.layout.flavors()
    }

    pub fn hopping(&self) -> &[f64] {
        &self.hopping
    }

    pub fn exchange(&self) -> &[f64] {
        &self.exchange
    }

    pub fn pair_hopping(&self) -> &[f64] {
        &self.pair_hopping
    }

    pub fn potential(&self) -> &Potential {
        &self.potential
    }

    /// Only the hopping term survives.
    pub fn is_free(&self) -> bool {
        self.exchange.iter().all(|&j| j == 0.0)
            && self.pair_hopping.iter().all(|&k| k == 0.0)
            && self.potential.is_zero()
    }

    /// Couplings accepted but outside the strict positivity the ordering
    /// theorem assumes.
    pub fn warnings(&self) -> Vec<String> {
        let mut out = Vec::new();
        for (name, values) in [("exchange", &self.exchange), ("pair_hopping", &self.pair_hopping)] {
            let zeros: Vec<usize> = values
                .iter()
                .enumerate()
                .filter(|(_, v)| **v == 0.0)
                .map(|(i, _)| i)
                .collect();
            if !zeros.is_empty() {
                out.push(format!("{name} vanishes on bonds {zeros:?}"));
            }
        }
        out
    }
}

/// Real symmetric matrix in compressed-row layout. Both triangles are stored.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseSectorMatrix {
    dim: usize,
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    values: Vec<f64>,
}

impl SparseSectorMatrix {
    /// Builds from per-row `(col, value)` lists; duplicates are summed and
    /// off-diagonal entries that cancel to zero are dropped.
    pub fn from_rows(rows: Vec<Vec<(usize, f64)>>) -> Self {
        let dim = rows.len();
        let mut row_ptr = Vec::with_capacity(dim + 1);
        let mut cols = Vec::new();
        let mut values = Vec::new();
        row_ptr.push(0);
        for (r, mut row) in rows.into_iter().enumerate() {
            row.sort_by_key(|&(c, _)| c);
            let mut i = 0;
            while i < row.len() {
                let c = row[i].0;
                assert!(c < dim, "column {c} out of range");
                let mut v = 0.0;
                while i < row.len() && row[i].0 == c {
                    v += row[i].1;
                    i += 1;
                }
                if v != 0.0 || c == r {
                    cols.push(c);
                    values.push(v);
                }
            }
            row_ptr.push(cols.len());
        }
        Self {
            dim,
            row_ptr,
            cols,
            values,
        }
    }

    pub fn from_triplets(dim: usize, triplets: &[(usize, usize, f64)]) -> Self {
        let mut rows = vec![Vec::new(); dim];
        for &(r, c, v) in triplets {
            rows[r].push((c, v));
        }
        Self::from_rows(rows)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn row(&self, r: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let span = self.row_ptr[r]..self.row_ptr[r + 1];
        self.cols[span.clone()]
            .iter()
            .copied()
            .zip(self.values[span].iter().copied())
    }

    /// All stored `(row, col, value)` triples in row order.
    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.dim).flat_map(move |r| self.row(r).map(move |(c, v)| (r, c, v)))
    }

    pub fn get(&self, r: usize, c: usize) -> f64 {
        self.row(r).find(|&(cc, _)| cc == c).map_or(0.0, |(_, v)| v)
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(self.dim, self.dim);
        for (r, c, v) in self.entries() {
            m[(r, c)] = v;
        }
        m
    }

    /// Exact (bitwise) symmetry.
    pub fn is_symmetric(&self) -> bool {
        self.entries().all(|(r, c, v)| self.get(c, r) == v)
    }

    pub fn matvec(&self, x: &[f64], y: &mut [f64]) {
        for (r, yr) in y.iter_mut().enumerate() {
            let mut acc = 0.0;
            for k in self.row_ptr[r]..self.row_ptr[r + 1] {
                acc += self.values[k] * x[self.cols[k]];
            }
            *yr = acc;
        }
    }

    /// MatrixMarket coordinate format, lower triangle, one-based indices.
    pub fn write_matrix_market<W: Write>(&self, mut w: W) -> io::Result<()> {
        let lower: Vec<(usize, usize, f64)> = self.entries().filter(|&(r, c, _)| r >= c).collect();
        writeln!(w, "%%MatrixMarket matrix coordinate real symmetric")?;
        writeln!(w, "{} {} {}", self.dim, self.dim, lower.len())?;
        for (r, c, v) in lower {
            writeln!(w, "{} {} {:e}", r + 1, c + 1, v)?;
        }
        Ok(())
    }
}

impl SymmetricOperator for SparseSectorMatrix {
    fn dim(&self) -> usize {
        self.dim
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        self.matvec(x, y)
    }
}

/// A sector basis together with the Hamiltonian restricted to it.
#[derive(Debug, Clone)]
pub struct SectorHamiltonian {
    pub basis: SectorBasis,
    pub matrix: SparseSectorMatrix,
}

/// Assembles `H` on the sector basis.
pub fn build_sector_matrix(
    config: &ChainConfig,
    sector: &Sector,
    max_dimension: usize,
) -> Result<SectorHamiltonian, HamiltonianError> {
    let layout = *config.layout();
    sector.check_feasible(&layout)?;
    let dimension = sector.dimension(layout.sites());
    if dimension > max_dimension as u128 {
        return Err(HamiltonianError::DimensionCap {
            dimension,
            cap: max_dimension,
        });
    }
    let basis = SectorBasis::new(layout, sector.clone())?;
    let (sites, flavors) = (layout.sites(), layout.flavors());
    let inv_flavors = 1.0 / flavors as f64;

    let rows = basis
        .states()
        .iter()
        .map(|&state| {
            let n = state.site_occupations(&layout);
            let mut diagonal = config.potential.energy(&n);
            let mut row: Vec<(usize, f64)> = Vec::new();
            let mut push = |target, value: f64| {
                let col = basis
                    .index_of(target)
                    .expect("hopping left the sector");
                row.push((col, value));
            };
            for x in 0..sites - 1 {
                let t = config.hopping[x];
                for a in 0..flavors {
                    for (from, to) in [(x, x + 1), (x + 1, x)] {
                        if let Some((s, sign)) = apply_hop(&layout, state, a, from, to) {
                            push(s, -t * f64::from(sign));
                        }
                    }
                }

                let k = config.pair_hopping[x];
                if k != 0.0 {
                    for a in 0..flavors {
                        for b in 0..a {
                            for (from, to) in [(x, x + 1), (x + 1, x)] {
                                if let Some((s, sign)) = apply_pair_hop(&layout, state, a, b, from, to) {
                                    push(s, -k * f64::from(sign));
                                }
                            }
                        }
                    }
                }

                let j = config.exchange[x];
                if j != 0.0 {
                    let (nx, ny) = (n[x] as f64, n[x + 1] as f64);
                    diagonal += j * (2.0 * nx - 2.0 * inv_flavors * nx * ny);
                    for a in 0..flavors {
                        for b in 0..flavors {
                            if let Some((s, sign)) = apply_exchange(&layout, state, x, a, b) {
                                let value = -2.0 * j * f64::from(sign);
                                if s == state {
                                    diagonal += value;
                                } else {
                                    push(s, value);
                                }
                            }
                        }
                    }
                }
            }
            row.push((basis.index_of(state).unwrap(), diagonal));
            row
        })
        .collect();

    Ok(SectorHamiltonian {
        matrix: SparseSectorMatrix::from_rows(rows),
        basis,
    })
}

/// True iff every stored entry off the diagonal is `<= 0`.
pub fn check_offdiagonal_nonpositive(m: &SparseSectorMatrix) -> bool {
    m.entries().all(|(r, c, v)| r == c || v <= 0.0)
}

/// True iff the graph with edges at nonzero off-diagonal entries is connected.
pub fn check_connectivity(m: &SparseSectorMatrix) -> bool {
    if m.dim() == 0 {
        return true;
    }
    let mut seen = vec![false; m.dim()];
    let mut queue = VecDeque::from([0]);
    seen[0] = true;
    let mut reached = 1;
    while let Some(r) = queue.pop_front() {
        for (c, v) in m.row(r) {
            if c != r && v != 0.0 && !seen[c] {
                seen[c] = true;
                reached += 1;
                queue.push_back(c);
            }
        }
    }
    reached == m.dim()
}

/// Image of a vector under `F^{ab}`.
#[derive(Debug, Clone)]
pub struct RaisedVector {
    /// `None` when the source sector has no `b` fermions, so the image is
    /// identically zero.
    pub target: Option<SectorBasis>,
    pub amplitudes: Vec<f64>,
}

impl RaisedVector {
    pub fn norm(&self) -> f64 {
        self.amplitudes.iter().map(|v| v * v).sum::<f64>().sqrt()
    }
}

/// Applies `F^{ab} = sum_x c+_{x,a} c_{x,b}` to a vector over `source`.
///
/// Fails when `a == b` or when the target sector `(.., M_a + 1, .., M_b - 1, ..)`
/// does not fit on the chain.
pub fn apply_raising(
    source: &SectorBasis,
    vector: &[f64],
    alpha: usize,
    beta: usize,
) -> Result<RaisedVector, HamiltonianError> {
    assert_eq!(vector.len(), source.len(), "vector does not match basis");
    if alpha == beta {
        return Err(HamiltonianError::SameFlavor(alpha));
    }
    let layout = *source.layout();
    let Some(target_sector) = source.sector().shifted(alpha, beta) else {
        return Ok(RaisedVector {
            target: None,
            amplitudes: Vec::new(),
        });
    };
    if !target_sector.is_feasible(layout.sites()) {
        return Err(HamiltonianError::InfeasibleTarget(target_sector));
    }
    let target = SectorBasis::new(layout, target_sector)?;
    let mut amplitudes = vec![0.0; target.len()];
    for (&state, &v) in source.states().iter().zip(vector) {
        if v == 0.0 {
            continue;
        }
        for x in 0..layout.sites() {
            let Some((mid, s1)) = apply_mode_op(&layout, state, beta, x, ModeOp::Annihilate) else {
                continue;
            };
            let Some((out, s2)) = apply_mode_op(&layout, mid, alpha, x, ModeOp::Create) else {
                continue;
            };
            let i = target.index_of(out).expect("raising left the target sector");
            amplitudes[i] += f64::from(s1 * s2) * v;
        }
    }
    Ok(RaisedVector {
        target: Some(target),
        amplitudes,
    })
}
