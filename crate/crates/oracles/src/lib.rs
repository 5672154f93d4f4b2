//! Deliberately naive reference implementations.
//!
//! Nothing here shares code with `sunchain-core`. Fermions are stored as
//! plain occupation vectors in site-major mode order, operators are applied
//! one at a time, and the exchange term is built from explicit generalized
//! Gell-Mann matrices instead of the flavor-swap rewrite.

use std::collections::HashMap;

/// Occupation of every mode; mode `site * flavors + flavor`.
pub type Occupation = Vec<bool>;

pub type OraclePotential = Box<dyn Fn(&[usize]) -> f64>;

pub struct OracleChain {
    pub sites: usize,
    pub flavors: usize,
    pub hopping: Vec<f64>,
    pub exchange: Vec<f64>,
    pub pair_hopping: Vec<f64>,
    /// Potential as a function of the site occupations `n_x`.
    pub potential: OraclePotential,
}

impl OracleChain {
    fn mode(&self, site: usize, flavor: usize) -> usize {
        site * self.flavors + flavor
    }
}

/// Dense matrix of `H` on one sector, in the oracle's own basis and sign
/// convention.
pub struct OracleSector {
    pub states: Vec<Occupation>,
    pub matrix: Vec<Vec<f64>>,
}

fn create(state: &mut Occupation, mode: usize) -> Option<f64> {
    if state[mode] {
        return None;
    }
    let below = state[..mode].iter().filter(|&&b| b).count();
    state[mode] = true;
    Some(if below % 2 == 0 { 1.0 } else { -1.0 })
}

fn annihilate(state: &mut Occupation, mode: usize) -> Option<f64> {
    if !state[mode] {
        return None;
    }
    let below = state[..mode].iter().filter(|&&b| b).count();
    state[mode] = false;
    Some(if below % 2 == 0 { 1.0 } else { -1.0 })
}

#[derive(Clone, Copy)]
enum Op {
    Up(usize),
    Down(usize),
}

/// Applies an operator string; the rightmost operator acts first.
fn apply_string(ops: &[Op], state: &Occupation) -> Option<(Occupation, f64)> {
    let mut s = state.clone();
    let mut sign = 1.0;
    for op in ops.iter().rev() {
        sign *= match *op {
            Op::Up(m) => create(&mut s, m)?,
            Op::Down(m) => annihilate(&mut s, m)?,
        };
    }
    Some((s, sign))
}

/// Complex `N x N` matrix as (re, im) pairs.
type Cmat = Vec<Vec<(f64, f64)>>;

/// The `N^2 - 1` generalized Gell-Mann matrices, normalized to
/// `tr(l_a l_b) = 2 delta_ab`.
pub fn gell_mann(n: usize) -> Vec<Vec<Vec<(f64, f64)>>> {
    let zero = || -> Cmat { vec![vec![(0.0, 0.0); n]; n] };
    let mut out = Vec::new();
    for j in 0..n {
        for k in j + 1..n {
            let mut s = zero();
            s[j][k] = (1.0, 0.0);
            s[k][j] = (1.0, 0.0);
            out.push(s);
            let mut a = zero();
            a[j][k] = (0.0, -1.0);
            a[k][j] = (0.0, 1.0);
            out.push(a);
        }
    }
    for l in 1..n {
        let mut d = zero();
        let c = (2.0 / (l * (l + 1)) as f64).sqrt();
        for (j, row) in d.iter_mut().enumerate().take(l) {
            row[j] = (c, 0.0);
        }
        d[l][l] = (-(l as f64) * c, 0.0);
        out.push(d);
    }
    out
}

/// `sum_a l_a[ab] l_a[cd]`, real part. The imaginary part cancels.
fn exchange_tensor(n: usize) -> Vec<f64> {
    let gm = gell_mann(n);
    let mut t = vec![0.0; n * n * n * n];
    for g in &gm {
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    for d in 0..n {
                        let (x, y) = g[a][b];
                        let (u, v) = g[c][d];
                        t[((a * n + b) * n + c) * n + d] += x * u - y * v;
                    }
                }
            }
        }
    }
    t
}

/// All occupations with the given count per flavor, in no particular order.
pub fn sector_states(sites: usize, counts: &[usize]) -> Vec<Occupation> {
    let flavors = counts.len();
    let mut out = vec![vec![false; sites * flavors]];
    for (f, &m) in counts.iter().enumerate() {
        let mut next = Vec::new();
        for base in &out {
            for subset in subsets(sites, m) {
                let mut s = base.clone();
                for x in subset {
                    s[x * flavors + f] = true;
                }
                next.push(s);
            }
        }
        out = next;
    }
    out
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            go(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(0, n, k, &mut Vec::new(), &mut out);
    out
}

/// `H |state>` as a map from occupation to amplitude.
pub fn apply_hamiltonian(chain: &OracleChain, state: &Occupation) -> HashMap<Occupation, f64> {
    let (l, n) = (chain.sites, chain.flavors);
    let mut out: HashMap<Occupation, f64> = HashMap::new();
    let mut add = |ops: &[Op], coeff: f64| {
        if coeff == 0.0 {
            return;
        }
        if let Some((s, sign)) = apply_string(ops, state) {
            *out.entry(s).or_insert(0.0) += coeff * sign;
        }
    };
    let tensor = exchange_tensor(n);
    for x in 0..l.saturating_sub(1) {
        let t = chain.hopping[x];
        for a in 0..n {
            let (p, q) = (chain.mode(x, a), chain.mode(x + 1, a));
            add(&[Op::Up(q), Op::Down(p)], -t);
            add(&[Op::Up(p), Op::Down(q)], -t);
        }
        let k = chain.pair_hopping[x];
        for a in 0..n {
            for b in 0..a {
                let (pa, pb) = (chain.mode(x, a), chain.mode(x, b));
                let (qa, qb) = (chain.mode(x + 1, a), chain.mode(x + 1, b));
                add(&[Op::Up(qa), Op::Up(qb), Op::Down(pb), Op::Down(pa)], -k);
                add(&[Op::Up(pa), Op::Up(pb), Op::Down(qb), Op::Down(qa)], -k);
            }
        }
        let j = chain.exchange[x];
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    for d in 0..n {
                        let w = tensor[((a * n + b) * n + c) * n + d];
                        if w.abs() < 1e-15 {
                            continue;
                        }
                        add(
                            &[
                                Op::Up(chain.mode(x, a)),
                                Op::Down(chain.mode(x, b)),
                                Op::Up(chain.mode(x + 1, c)),
                                Op::Down(chain.mode(x + 1, d)),
                            ],
                            j * w,
                        );
                    }
                }
            }
        }
    }
    let occ: Vec<usize> = (0..l)
        .map(|x| (0..n).filter(|&a| state[chain.mode(x, a)]).count())
        .collect();
    let v = (chain.potential)(&occ);
    if v != 0.0 {
        *out.entry(state.clone()).or_insert(0.0) += v;
    }
    out
}

/// Dense sector matrix `<s_i| H |s_j>`.
pub fn sector_matrix(chain: &OracleChain, counts: &[usize]) -> OracleSector {
    let states = sector_states(chain.sites, counts);
    let index: HashMap<&Occupation, usize> = states.iter().enumerate().map(|(i, s)| (s, i)).collect();
    let d = states.len();
    let mut matrix = vec![vec![0.0; d]; d];
    for (j, s) in states.iter().enumerate() {
        for (t, amp) in apply_hamiltonian(chain, s) {
            let i = *index.get(&t).expect("H left the sector");
            matrix[i][j] += amp;
        }
    }
    OracleSector { states, matrix }
}

/// Sign of `prod c+ |0>` with the creators written in flavor-major order
/// (flavor slowest, then site, lowest mode leftmost), expressed in the
/// oracle's site-major basis.
pub fn flavor_major_sign(sites: usize, flavors: usize, state: &Occupation) -> f64 {
    let mut modes: Vec<(usize, usize)> = Vec::new();
    for f in 0..flavors {
        for x in 0..sites {
            if state[x * flavors + f] {
                modes.push((x, f));
            }
        }
    }
    let mut s = vec![false; sites * flavors];
    let mut sign = 1.0;
    for &(x, f) in modes.iter().rev() {
        sign *= create(&mut s, x * flavors + f).expect("distinct modes");
    }
    sign
}

/// `(site, flavor)` pairs occupied in `state`.
pub fn occupied_modes(flavors: usize, state: &Occupation) -> Vec<(usize, usize)> {
    state
        .iter()
        .enumerate()
        .filter(|(_, &b)| b)
        .map(|(m, _)| (m / flavors, m % flavors))
        .collect()
}

/// Number of semistandard tableaux of `shape` with entries `1..=n`,
/// counted by filling boxes row by row.
pub fn count_ssyt(shape: &[usize], n: usize) -> u128 {
    let cells: Vec<(usize, usize)> = shape
        .iter()
        .enumerate()
        .flat_map(|(r, &len)| (0..len).map(move |c| (r, c)))
        .collect();
    let mut grid: Vec<Vec<usize>> = shape.iter().map(|&len| vec![0; len]).collect();
    fn fill(k: usize, cells: &[(usize, usize)], grid: &mut Vec<Vec<usize>>, n: usize) -> u128 {
        if k == cells.len() {
            return 1;
        }
        let (r, c) = cells[k];
        let lo = if c > 0 { grid[r][c - 1] } else { 1 };
        let lo = if r > 0 { lo.max(grid[r - 1][c] + 1) } else { lo };
        let mut total = 0;
        for v in lo..=n {
            grid[r][c] = v;
            total += fill(k + 1, cells, grid, n);
        }
        grid[r][c] = 0;
        total
    }
    fill(0, &cells, &mut grid, n)
}

/// Whether `lower` is reachable from `upper` by repeatedly moving one box to
/// a lower row while keeping a valid diagram. This is the dominance order
/// (`upper >= lower`) built from its covering moves.
pub fn dominates_by_moves(upper: &[usize], lower: &[usize]) -> bool {
    let total: usize = upper.iter().sum();
    if total != lower.iter().sum::<usize>() {
        return false;
    }
    let pad = |p: &[usize]| {
        let mut v = p.to_vec();
        v.resize(total.max(1), 0);
        v
    };
    let target = pad(lower);
    let mut seen = std::collections::HashSet::new();
    let mut stack = vec![pad(upper)];
    while let Some(p) = stack.pop() {
        if p == target {
            return true;
        }
        if !seen.insert(p.clone()) {
            continue;
        }
        for i in 0..p.len() {
            for j in i + 1..p.len() {
                if p[i] == 0 {
                    continue;
                }
                let mut q = p.clone();
                q[i] -= 1;
                q[j] += 1;
                if q.windows(2).all(|w| w[0] >= w[1]) {
                    stack.push(q);
                }
            }
        }
    }
    false
}

/// All partitions of `n` with at most `max_rows` rows, any order.
pub fn partitions(n: usize, max_rows: usize) -> Vec<Vec<usize>> {
    fn go(left: usize, cap: usize, rows: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if left == 0 {
            out.push(cur.clone());
            return;
        }
        if rows == 0 {
            return;
        }
        for r in (1..=cap.min(left)).rev() {
            cur.push(r);
            go(left - r, r, rows - 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(n, n, max_rows, &mut Vec::new(), &mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gell_mann_orthonormal() {
        for n in 2..=4 {
            let gm = gell_mann(n);
            assert_eq!(gm.len(), n * n - 1);
            for (p, a) in gm.iter().enumerate() {
                for (q, b) in gm.iter().enumerate() {
                    // tr(a b)
                    let mut re = 0.0;
                    for i in 0..n {
                        for k in 0..n {
                            let (x, y) = a[i][k];
                            let (u, v) = b[k][i];
                            re += x * u - y * v;
                        }
                    }
                    let want = if p == q { 2.0 } else { 0.0 };
                    assert!((re - want).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn ssyt_counts() {
        assert_eq!(count_ssyt(&[1], 3), 3);
        assert_eq!(count_ssyt(&[2, 1], 3), 8);
        assert_eq!(count_ssyt(&[1, 1, 1], 3), 1);
        assert_eq!(count_ssyt(&[2, 2], 2), 1);
    }

    #[test]
    fn moves() {
        assert!(dominates_by_moves(&[3], &[2, 1]));
        assert!(dominates_by_moves(&[2, 1], &[1, 1, 1]));
        assert!(!dominates_by_moves(&[2, 1], &[3]));
        assert!(!dominates_by_moves(&[3, 1, 1, 1], &[2, 2, 2]));
        assert!(!dominates_by_moves(&[2, 2, 2], &[3, 1, 1, 1]));
    }

    #[test]
    fn single_site_single_fermion_has_potential_only() {
        let chain = OracleChain {
            sites: 1,
            flavors: 2,
            hopping: vec![],
            exchange: vec![],
            pair_hopping: vec![],
            potential: Box::new(|n| 2.0 * n[0] as f64),
        };
        let m = sector_matrix(&chain, &[1, 0]);
        assert_eq!(m.matrix, vec![vec![2.0]]);
    }
}
