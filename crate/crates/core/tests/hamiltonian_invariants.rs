use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sunchain_core::hamiltonian::apply_raising;
use sunchain_core::{build_sector_matrix, ChainConfig, Potential, Sector};

fn random_config(sites: usize, flavors: usize, rng: &mut ChaCha8Rng) -> ChainConfig {
    let bonds = sites - 1;
    let mut draw = || -> Vec<f64> { (0..bonds).map(|_| rng.gen_range(0.5..1.5)).collect() };
    let (t, j, k) = (draw(), draw(), draw());
    ChainConfig::new(sites, flavors, t, j, k, Potential::Hubbard { u: rng.gen_range(0.0..3.0) }).unwrap()
}

fn every_sector(sites: usize, flavors: usize) -> Vec<Sector> {
    (1..=sites * flavors)
        .flat_map(|m| Sector::all_with_total(m, flavors, sites))
        .collect()
}

#[test]
fn sector_matrices_are_exactly_symmetric() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for flavors in 1..=3 {
        for sites in 2..=4 {
            let config = random_config(sites, flavors, &mut rng);
            for sector in every_sector(sites, flavors) {
                let h = build_sector_matrix(&config, &sector, 1 << 20).unwrap();
                for (r, c, v) in h.matrix.entries() {
                    assert_eq!(h.matrix.get(c, r), v, "sector {sector} ({r},{c})");
                }
            }
        }
    }
}

#[test]
fn raising_commutes_with_hamiltonian() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for flavors in 2..=3 {
        for sites in 2..=4 {
            let config = random_config(sites, flavors, &mut rng);
            for sector in every_sector(sites, flavors) {
                let source = build_sector_matrix(&config, &sector, 1 << 20).unwrap();
                let d = source.basis.len();
                let v: Vec<f64> = (0..d).map(|_| rng.gen_range(-1.0..1.0)).collect();
                let mut hv = vec![0.0; d];
                source.matrix.matvec(&v, &mut hv);
                for a in 0..flavors {
                    for b in 0..flavors {
                        if a == b {
                            continue;
                        }
                        let Some(target) = sector.shifted(a, b) else { continue };
                        if !target.is_feasible(sites) {
                            continue;
                        }
                        let raised = apply_raising(&source.basis, &v, a, b).unwrap();
                        let raised_hv = apply_raising(&source.basis, &hv, a, b).unwrap();
                        let t = build_sector_matrix(&config, &target, 1 << 20).unwrap();
                        let mut h_raised = vec![0.0; t.basis.len()];
                        t.matrix.matvec(&raised.amplitudes, &mut h_raised);
                        for (x, y) in h_raised.iter().zip(&raised_hv.amplitudes) {
                            assert!((x - y).abs() < 1e-12, "sector {sector}, F^({a},{b})");
                        }
                    }
                }
            }
        }
    }
}

fn sorted_spectrum(config: &ChainConfig, sector: &Sector) -> Vec<f64> {
    let h = build_sector_matrix(config, sector, 1 << 20).unwrap();
    let dense: DMatrix<f64> = h.matrix.to_dense();
    let mut e: Vec<f64> = dense.symmetric_eigenvalues().iter().copied().collect();
    e.sort_by(f64::total_cmp);
    e
}

#[test]
fn rearranged_sectors_share_the_spectrum() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for flavors in 2..=3 {
        for sites in 2..=4 {
            let config = random_config(sites, flavors, &mut rng);
            for sector in every_sector(sites, flavors) {
                if !sector.is_nonascending() {
                    continue;
                }
                let reference = sorted_spectrum(&config, &sector);
                for p in sector.distinct_permutations() {
                    let e = sorted_spectrum(&config, &p);
                    for (x, y) in e.iter().zip(&reference) {
                        assert!((x - y).abs() <= 1e-10, "{sector} vs {p}: {x} vs {y}");
                    }
                }
            }
        }
    }
}

#[test]
fn hamiltonian_never_leaves_the_sector() {
    use sunchain_oracles::{apply_hamiltonian, sector_states, OracleChain};
    for flavors in 1..=3 {
        for sites in 1..=3 {
            let chain = OracleChain {
                sites,
                flavors,
                hopping: vec![1.0; sites - 1],
                exchange: vec![0.7; sites - 1],
                pair_hopping: vec![0.4; sites - 1],
                potential: Box::new(|n: &[usize]| n.iter().map(|&m| (m * m) as f64).sum()),
            };
            for sector in every_sector(sites, flavors) {
                for s in sector_states(sites, sector.counts()) {
                    for (t, _) in apply_hamiltonian(&chain, &s) {
                        let counts: Vec<usize> = (0..flavors)
                            .map(|f| (0..sites).filter(|x| t[x * flavors + f]).count())
                            .collect();
                        assert_eq!(counts, sector.counts());
                    }
                }
            }
        }
    }
}
