//! Fermionic Fock space for an `N`-flavor open chain of `L` sites.
//!
//! A basis state is stored as a single `u128` whose bit `alpha * L + x` is set
//! when a fermion of flavor `alpha` occupies site `x` (both zero-based). The
//! amplitude `+1` representative of a bit pattern is the ket obtained by
//! applying creation operators in flavor-major, site-ascending order to the
//! vacuum:
//!
//! ```text
//! |{x^0}, ..., {x^(N-1)}> = prod_alpha (c+_{x^alpha_1, alpha} ... c+_{x^alpha_M, alpha}) |0>
//! ```
//!
//! With this convention the fermionic sign of an elementary operator is the
//! parity of the occupied modes that precede it in the bit order, and every
//! same-flavor nearest-neighbour hop carries sign `+1`.

use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Largest supported chain length.
pub const MAX_SITES: usize = 21;
/// Largest supported number of flavors.
pub const MAX_FLAVORS: usize = 6;

/// Coefficient of a basis state in a many-body vector.
pub type Amplitude = f64;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FockError {
    #[error("chain length {sites} outside supported range 1..={MAX_SITES}")]
    TooManySites { sites: usize },
    #[error("flavor count {flavors} outside supported range 1..={MAX_FLAVORS}")]
    TooManyFlavors { flavors: usize },
    #[error("expected {expected} flavor entries, found {found}")]
    FlavorCountMismatch { expected: usize, found: usize },
    #[error("site {site} out of range for a chain of {sites} sites")]
    SiteOutOfRange { site: usize, sites: usize },
    #[error("flavor {flavor} occupies site {site} more than once or out of order")]
    DuplicateMode { flavor: usize, site: usize },
    #[error("sector infeasible: flavor {flavor} has {count} fermions but the chain has only {sites} sites (need L >= max M_alpha)")]
    InfeasibleSector {
        flavor: usize,
        count: usize,
        sites: usize,
    },
}

/// Order in which modes `(flavor, site)` are arranged when building the
/// signed basis.
///
/// Only [`ModeOrder::FlavorMajor`] yields a nonpositive Hamiltonian;
/// [`ModeOrder::SiteMajor`] is the ordinary site-by-site convention and is
/// kept for mutation testing of the sign bookkeeping.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModeOrder {
    #[default]
    FlavorMajor,
    SiteMajor,
}

/// Chain geometry shared by every state of a computation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Layout {
    sites: usize,
    flavors: usize,
    order: ModeOrder,
}

impl Layout {
    pub fn new(sites: usize, flavors: usize) -> Result<Self, FockError> {
        if sites == 0 || sites > MAX_SITES {
            return Err(FockError::TooManySites { sites });
        }
        if flavors == 0 || flavors > MAX_FLAVORS {
            return Err(FockError::TooManyFlavors { flavors });
        }
        Ok(Self {
            sites,
            flavors,
            order: ModeOrder::FlavorMajor,
        })
    }

    pub fn with_mode_order(mut self, order: ModeOrder) -> Self {
        self.order = order;
        self
    }

    pub fn sites(&self) -> usize {
        self.sites
    }

    pub fn flavors(&self) -> usize {
        self.flavors
    }

    pub fn mode_order(&self) -> ModeOrder {
        self.order
    }

    #[inline]
    fn bit(&self, flavor: usize, site: usize) -> u32 {
        debug_assert!(flavor < self.flavors && site < self.sites);
        (flavor * self.sites + site) as u32
    }

    #[inline]
    fn site_mask(&self) -> u128 {
        (1u128 << self.sites) - 1
    }

    /// Parity of the occupied modes strictly preceding `(flavor, site)`.
    #[inline]
    fn preceding_parity(&self, state: FockState, flavor: usize, site: usize) -> bool {
        match self.order {
            ModeOrder::FlavorMajor => {
                let below = (1u128 << self.bit(flavor, site)) - 1;
                (state.0 & below).count_ones() & 1 == 1
            }
            ModeOrder::SiteMajor => {
                let left = (1u128 << site) - 1;
                let mut count = 0;
                for beta in 0..self.flavors {
                    let mask = state.mask(self, beta);
                    count += (mask & left).count_ones();
                    if beta < flavor && mask >> site & 1 == 1 {
                        count += 1;
                    }
                }
                count & 1 == 1
            }
        }
    }
}

/// Bit-packed occupation configuration.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct FockState(u128);

impl FockState {
    pub const VACUUM: FockState = FockState(0);

    pub fn from_bits(bits: u128) -> Self {
        FockState(bits)
    }

    pub fn bits(&self) -> u128 {
        self.0
    }

    /// Occupation mask of one flavor; bit `x` is site `x`.
    pub fn mask(&self, layout: &Layout, flavor: usize) -> u128 {
        (self.0 >> (flavor * layout.sites)) & layout.site_mask()
    }

    pub fn is_occupied(&self, layout: &Layout, flavor: usize, site: usize) -> bool {
        self.0 >> layout.bit(flavor, site) & 1 == 1
    }

    pub fn particle_count(&self) -> usize {
        self.0.count_ones() as usize
    }

    /// Local fermion numbers `n_x`.
    pub fn site_occupations(&self, layout: &Layout) -> Vec<usize> {
        let mut n = vec![0; layout.sites];
        for flavor in 0..layout.flavors {
            let mut mask = self.mask(layout, flavor);
            while mask != 0 {
                n[mask.trailing_zeros() as usize] += 1;
                mask &= mask - 1;
            }
        }
        n
    }

    /// Flavor counts `M_alpha` of this state.
    pub fn sector(&self, layout: &Layout) -> Sector {
        Sector::new(
            (0..layout.flavors)
                .map(|a| self.mask(layout, a).count_ones() as usize)
                .collect(),
        )
    }
}

/// Particle number per flavor. Indexes an invariant subspace.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Sector {
    counts: Vec<usize>,
}

impl Sector {
    pub fn new(counts: Vec<usize>) -> Self {
        Self { counts }
    }

    pub fn counts(&self) -> &[usize] {
        &self.counts
    }

    pub fn flavors(&self) -> usize {
        self.counts.len()
    }

    pub fn total(&self) -> usize {
        self.counts.iter().sum()
    }

    pub fn is_feasible(&self, sites: usize) -> bool {
        self.counts.iter().all(|&m| m <= sites)
    }

    pub fn check_feasible(&self, layout: &Layout) -> Result<(), FockError> {
        if self.counts.len() != layout.flavors {
            return Err(FockError::FlavorCountMismatch {
                expected: layout.flavors,
                found: self.counts.len(),
            });
        }
        match self.counts.iter().position(|&m| m > layout.sites) {
            Some(flavor) => Err(FockError::InfeasibleSector {
                flavor,
                count: self.counts[flavor],
                sites: layout.sites,
            }),
            None => Ok(()),
        }
    }

    pub fn is_nonascending(&self) -> bool {
        self.counts.windows(2).all(|w| w[0] >= w[1])
    }

    /// The nonascending rearrangement of the counts.
    pub fn sorted(&self) -> Sector {
        let mut counts = self.counts.clone();
        counts.sort_unstable_by(|a, b| b.cmp(a));
        Sector::new(counts)
    }

    /// Number of basis states, `prod_alpha C(L, M_alpha)`; zero when infeasible.
    pub fn dimension(&self, sites: usize) -> u128 {
        self.counts
            .iter()
            .map(|&m| binomial(sites as u64, m as u64))
            .product()
    }

    /// The counts with `alpha` raised and `beta` lowered by one, if both stay
    /// non-negative.
    pub fn shifted(&self, alpha: usize, beta: usize) -> Option<Sector> {
        if self.counts[beta] == 0 {
            return None;
        }
        let mut counts = self.counts.clone();
        counts[alpha] += 1;
        counts[beta] -= 1;
        Some(Sector::new(counts))
    }

    /// All distinct rearrangements of the counts in lexicographic order.
    pub fn distinct_permutations(&self) -> Vec<Sector> {
        let mut current = self.counts.clone();
        current.sort_unstable();
        let mut out = vec![Sector::new(current.clone())];
        while next_permutation(&mut current) {
            out.push(Sector::new(current.clone()));
        }
        out
    }

    /// Every sector with `total` particles over `flavors` flavors and at most
    /// `sites` particles per flavor, in lexicographic order.
    pub fn all_with_total(total: usize, flavors: usize, sites: usize) -> Vec<Sector> {
        fn rec(
            left: usize,
            remaining_flavors: usize,
            sites: usize,
            prefix: &mut Vec<usize>,
            out: &mut Vec<Sector>,
        ) {
            if remaining_flavors == 0 {
                if left == 0 {
                    out.push(Sector::new(prefix.clone()));
                }
                return;
            }
            if left > remaining_flavors * sites {
                return;
            }
            for m in 0..=left.min(sites) {
                prefix.push(m);
                rec(left - m, remaining_flavors - 1, sites, prefix, out);
                prefix.pop();
            }
        }
        let mut out = Vec::new();
        rec(total, flavors, sites, &mut Vec::new(), &mut out);
        out
    }
}

impl fmt::Display for Sector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, m) in self.counts.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{m}")?;
        }
        write!(f, ")")
    }
}

fn next_permutation(v: &mut [usize]) -> bool {
    if v.len() < 2 {
        return false;
    }
    let mut i = v.len() - 1;
    while i > 0 && v[i - 1] >= v[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = v.len() - 1;
    while v[j] <= v[i - 1] {
        j -= 1;
    }
    v.swap(i - 1, j);
    v[i..].reverse();
    true
}

pub fn binomial(n: u64, k: u64) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc
}

/// Creation or annihilation of a single mode.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModeOp {
    Create,
    Annihilate,
}

/// Bit-packs per-flavor site lists. Each list must be strictly increasing.
pub fn encode_state(layout: &Layout, positions: &[Vec<usize>]) -> Result<FockState, FockError> {
    if positions.len() != layout.flavors {
        return Err(FockError::FlavorCountMismatch {
            expected: layout.flavors,
            found: positions.len(),
        });
    }
    let mut bits = 0u128;
    for (flavor, sites) in positions.iter().enumerate() {
        let mut previous: Option<usize> = None;
        for &site in sites {
            if site >= layout.sites {
                return Err(FockError::SiteOutOfRange {
                    site,
                    sites: layout.sites,
                });
            }
            if previous.is_some_and(|p| p >= site) {
                return Err(FockError::DuplicateMode { flavor, site });
            }
            previous = Some(site);
            bits |= 1u128 << layout.bit(flavor, site);
        }
    }
    Ok(FockState(bits))
}

/// Inverse of [`encode_state`].
pub fn decode_state(layout: &Layout, state: FockState) -> Vec<Vec<usize>> {
    (0..layout.flavors)
        .map(|flavor| {
            let mask = state.mask(layout, flavor);
            (0..layout.sites).filter(|&x| mask >> x & 1 == 1).collect()
        })
        .collect()
}

/// Applies `c+_{site,flavor}` or `c_{site,flavor}`.
///
/// Returns `None` when Pauli-blocked, otherwise the new state and the sign
/// picked up relative to the canonical ordering.
pub fn apply_mode_op(
    layout: &Layout,
    state: FockState,
    flavor: usize,
    site: usize,
    op: ModeOp,
) -> Option<(FockState, i8)> {
    assert!(flavor < layout.flavors, "flavor {flavor} out of range");
    assert!(site < layout.sites, "site {site} out of range");
    let bit = 1u128 << layout.bit(flavor, site);
    let occupied = state.0 & bit != 0;
    let next = match (op, occupied) {
        (ModeOp::Create, false) | (ModeOp::Annihilate, true) => FockState(state.0 ^ bit),
        _ => return None,
    };
    let sign = if layout.preceding_parity(state, flavor, site) {
        -1
    } else {
        1
    };
    Some((next, sign))
}

/// Applies a sequence of mode operators right to left, as written in an
/// operator product.
fn apply_product(
    layout: &Layout,
    state: FockState,
    ops: &[(usize, usize, ModeOp)],
) -> Option<(FockState, i8)> {
    ops.iter()
        .rev()
        .try_fold((state, 1i8), |(s, sign), &(flavor, site, op)| {
            apply_mode_op(layout, s, flavor, site, op).map(|(n, g)| (n, sign * g))
        })
}

fn assert_adjacent(layout: &Layout, from: usize, to: usize) {
    assert!(
        from < layout.sites && to < layout.sites && from.abs_diff(to) == 1,
        "sites {from} and {to} are not nearest neighbours"
    );
}

/// `c+_{to,flavor} c_{from,flavor}` for nearest neighbours.
pub fn apply_hop(
    layout: &Layout,
    state: FockState,
    flavor: usize,
    from: usize,
    to: usize,
) -> Option<(FockState, i8)> {
    assert_adjacent(layout, from, to);
    apply_product(
        layout,
        state,
        &[
            (flavor, to, ModeOp::Create),
            (flavor, from, ModeOp::Annihilate),
        ],
    )
}

/// `c+_{to,alpha} c+_{to,beta} c_{from,beta} c_{from,alpha}` with `alpha > beta`.
pub fn apply_pair_hop(
    layout: &Layout,
    state: FockState,
    alpha: usize,
    beta: usize,
    from: usize,
    to: usize,
) -> Option<(FockState, i8)> {
    assert!(alpha > beta, "pair hop requires alpha > beta");
    assert_adjacent(layout, from, to);
    apply_product(
        layout,
        state,
        &[
            (alpha, to, ModeOp::Create),
            (beta, to, ModeOp::Create),
            (beta, from, ModeOp::Annihilate),
            (alpha, from, ModeOp::Annihilate),
        ],
    )
}

/// One exchange summand `c+_{x,alpha} c_{x+1,alpha} c+_{x+1,beta} c_{x,beta}`.
///
/// For `alpha == beta` the result, when defined, is the input state itself.
pub fn apply_exchange(
    layout: &Layout,
    state: FockState,
    site: usize,
    alpha: usize,
    beta: usize,
) -> Option<(FockState, i8)> {
    assert_adjacent(layout, site, site + 1);
    apply_product(
        layout,
        state,
        &[
            (alpha, site, ModeOp::Create),
            (alpha, site + 1, ModeOp::Annihilate),
            (beta, site + 1, ModeOp::Create),
            (beta, site, ModeOp::Annihilate),
        ],
    )
}

/// Parity of the number of inversions `#{x < y : a_x > a_y}`.
pub fn inversion_sign(flavors: &[usize]) -> i8 {
    let mut inversions = 0usize;
    for (i, &a) in flavors.iter().enumerate() {
        inversions += flavors[i + 1..].iter().filter(|&&b| a > b).count();
    }
    if inversions.is_multiple_of(2) {
        1
    } else {
        -1
    }
}

/// The compact state with flavor `alpha` on sites `0..M_alpha`.
pub fn trial_state(layout: &Layout, sector: &Sector) -> Result<FockState, FockError> {
    sector.check_feasible(layout)?;
    let mut bits = 0u128;
    for (flavor, &m) in sector.counts.iter().enumerate() {
        bits |= ((1u128 << m) - 1) << (flavor * layout.sites);
    }
    Ok(FockState(bits))
}

/// All states of a sector, ascending in bit order (lexicographic on the
/// per-flavor masks, highest flavor most significant).
pub fn enumerate_sector(layout: &Layout, sector: &Sector) -> Result<Vec<FockState>, FockError> {
    sector.check_feasible(layout)?;
    let per_flavor: Vec<Vec<u128>> = sector
        .counts
        .iter()
        .map(|&m| masks_with_popcount(layout.sites, m))
        .collect();
    let mut states = Vec::with_capacity(sector.dimension(layout.sites) as usize);
    fn rec(
        layout: &Layout,
        per_flavor: &[Vec<u128>],
        flavor: usize,
        acc: u128,
        out: &mut Vec<FockState>,
    ) {
        for &mask in &per_flavor[flavor] {
            let bits = acc | mask << (flavor * layout.sites);
            if flavor == 0 {
                out.push(FockState(bits));
            } else {
                rec(layout, per_flavor, flavor - 1, bits, out);
            }
        }
    }
    rec(
        layout,
        &per_flavor,
        layout.flavors - 1,
        0,
        &mut states,
    );
    Ok(states)
}

/// Ascending list of `width`-bit masks with exactly `ones` bits set.
fn masks_with_popcount(width: usize, ones: usize) -> Vec<u128> {
    if ones == 0 {
        return vec![0];
    }
    let limit = 1u128 << width;
    let mut out = Vec::new();
    let mut v: u128 = (1u128 << ones) - 1;
    while v < limit {
        out.push(v);
        // Gosper's hack
        let c = v & v.wrapping_neg();
        let r = v + c;
        v = (((r ^ v) >> 2) / c) | r;
    }
    out
}

/// Materialized basis of one sector with a reverse index.
#[derive(Debug, Clone)]
pub struct SectorBasis {
    layout: Layout,
    sector: Sector,
    states: Vec<FockState>,
    index: HashMap<FockState, usize>,
}

impl SectorBasis {
    pub fn new(layout: Layout, sector: Sector) -> Result<Self, FockError> {
        let states = enumerate_sector(&layout, &sector)?;
        let index = states.iter().enumerate().map(|(i, &s)| (s, i)).collect();
        Ok(Self {
            layout,
            sector,
            states,
            index,
        })
    }

    pub fn layout(&self) -> &Layout {
        &self.layout
    }

    pub fn sector(&self) -> &Sector {
        &self.sector
    }

    pub fn states(&self) -> &[FockState] {
        &self.states
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn index_of(&self, state: FockState) -> Option<usize> {
        self.index.get(&state).copied()
    }
}
