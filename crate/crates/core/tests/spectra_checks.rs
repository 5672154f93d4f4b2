use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sunchain_core::freefermion::{free_sector_energy, single_particle_energies, Boundary};
use sunchain_core::hamiltonian::apply_raising;
use sunchain_core::spectra::{
    analyze_sector, lowest_eigenpairs, permuted_sector_consistency, verify_multiplet_label,
    verify_positivity, EigenResult, SolverOptions, Tolerances,
};
use sunchain_core::young::{enumerate_diagrams, ground_diagram};
use sunchain_core::{
    build_sector_matrix, level_ordering_report, AnalysisOptions, ChainConfig, Dominance,
    Potential, Sector, SectorBasis, Verdict, YoungDiagram,
};

fn random_config(sites: usize, flavors: usize, seed: u64) -> ChainConfig {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let bonds = sites - 1;
    let mut draw = || -> Vec<f64> { (0..bonds).map(|_| rng.gen_range(0.5..1.5)).collect() };
    let (t, j, k) = (draw(), draw(), draw());
    ChainConfig::new(sites, flavors, t, j, k, Potential::Hubbard { u: 1.0 }).unwrap()
}

fn diagram(s: &str) -> YoungDiagram {
    s.parse().unwrap()
}

#[test]
fn random_50_by_50_matches_dense() {
    let mut rng = ChaCha8Rng::seed_from_u64(50);
    let mut triplets = Vec::new();
    let mut dense = DMatrix::<f64>::zeros(50, 50);
    for i in 0..50 {
        for j in 0..=i {
            let v: f64 = rng.gen_range(-1.0..1.0);
            dense[(i, j)] = v;
            dense[(j, i)] = v;
            triplets.push((i, j, v));
            if i != j {
                triplets.push((j, i, v));
            }
        }
    }
    let m = sunchain_core::SparseSectorMatrix::from_triplets(50, &triplets);
    let mut want: Vec<f64> = dense.symmetric_eigenvalues().iter().copied().collect();
    want.sort_by(f64::total_cmp);
    for crossover in [512, 10] {
        let options = SolverOptions {
            dense_crossover: crossover,
            ..SolverOptions::default()
        };
        let got = lowest_eigenpairs(&m, 3, &options, 1e-10).unwrap();
        for (g, w) in got.iter().zip(&want) {
            assert!((g.energy - w).abs() < 1e-9);
            let norm: f64 = g.vector.iter().map(|v| v * v).sum::<f64>().sqrt();
            assert!((norm - 1.0).abs() < 1e-12);
        }
    }
}

#[test]
fn su3_six_particles_form_a_singlet() {
    let report =
        level_ordering_report(&random_config(4, 3, 1), 6, &AnalysisOptions::default()).unwrap();
    assert!(report.violations.is_empty());
    assert_eq!(report.ground.lowest_diagram, diagram("2,2,2"));
    assert_eq!(report.ground.multiplicity, 1);
    assert!(report.passed(), "{:?}", report.failures());
}

#[test]
fn su3_seven_particles_form_a_triplet() {
    let report =
        level_ordering_report(&random_config(4, 3, 2), 7, &AnalysisOptions::default()).unwrap();
    assert_eq!(report.ground.lowest_diagram, diagram("3,2,2"));
    assert_eq!(report.ground.multiplicity, 3);
    assert_eq!(report.ground.multiplicity_verdict, Verdict::Pass);
    assert!(report.passed(), "{:?}", report.failures());
}

#[test]
fn su2_four_particles_follow_spin_ordering() {
    let report =
        level_ordering_report(&random_config(4, 2, 3), 4, &AnalysisOptions::default()).unwrap();
    let e = |s: &str| report.diagrams[&diagram(s)].energy.unwrap();
    assert!(e("2,2") < e("3,1") && e("3,1") < e("4"));
    assert_eq!(report.comparable_pairs, 3);
    assert!(report.unjudged_pairs.is_empty());
    assert!(report.passed(), "{:?}", report.failures());
}

#[test]
fn infeasible_diagrams_are_recorded_not_fatal() {
    let report =
        level_ordering_report(&random_config(3, 2, 4), 4, &AnalysisOptions::default()).unwrap();
    let four = &report.diagrams[&diagram("4")];
    assert!(!four.feasible && four.energy.is_none());
    assert!(report.diagrams[&diagram("3,1")].feasible);
    assert!(report.passed(), "{:?}", report.failures());
}

#[test]
fn incomparable_pairs_are_recorded_without_a_verdict() {
    // [4,1,1] vs [3,3] needs N >= 3 and L >= 4
    let report =
        level_ordering_report(&random_config(4, 3, 5), 6, &AnalysisOptions::default()).unwrap();
    let pair = report
        .unjudged_pairs
        .iter()
        .find(|p| {
            let names = [p.first.to_string(), p.second.to_string()];
            names.contains(&"4,1,1".to_string()) && names.contains(&"3,3".to_string())
        })
        .expect("pair recorded");
    assert!(pair.energy_difference.is_finite());
    assert!(report
        .violations
        .iter()
        .all(|v| v.upper.dominance(&v.lower) == Dominance::Above));
}

#[test]
fn permuted_sectors_agree() {
    let options = AnalysisOptions::default();
    let c2 = random_config(4, 2, 6);
    let check = permuted_sector_consistency(&c2, &Sector::new(vec![2, 1]), &options).unwrap();
    assert_eq!(check.energies.len(), 2);
    assert_eq!(check.verdict, Verdict::Pass);

    let c3 = random_config(3, 3, 7);
    let check = permuted_sector_consistency(&c3, &Sector::new(vec![3, 2, 1]), &options).unwrap();
    assert_eq!(check.energies.len(), 6);
    assert_eq!(check.verdict, Verdict::Pass);

    let check = permuted_sector_consistency(&c2, &Sector::new(vec![1, 1]), &options).unwrap();
    assert_eq!(check.energies.len(), 1);
    assert_eq!(check.verdict, Verdict::Pass);
}

#[test]
fn kinetic_excited_state_is_not_positive() {
    let config = ChainConfig::uniform(2, 1, 1.0, 0.0, 0.0, Potential::Hubbard { u: 0.0 }).unwrap();
    let h = build_sector_matrix(&config, &Sector::new(vec![1]), 100).unwrap();
    let r = lowest_eigenpairs(&h.matrix, 2, &SolverOptions::default(), 1e-10).unwrap();
    assert_eq!(verify_positivity(&r[0], 1e-12).verdict, Verdict::Pass);
    assert_eq!(verify_positivity(&r[1], 1e-12).verdict, Verdict::Fail);
}

/// Orthonormal basis of the joint kernel of every raising operator on
/// `basis`, computed densely.
fn highest_weight_space(basis: &SectorBasis) -> DMatrix<f64> {
    let d = basis.len();
    let flavors = basis.sector().flavors();
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for a in 0..flavors {
        for b in a + 1..flavors {
            let mut columns: Vec<Vec<f64>> = Vec::new();
            for j in 0..d {
                let mut e = vec![0.0; d];
                e[j] = 1.0;
                match apply_raising(basis, &e, a, b) {
                    Ok(r) if r.target.is_some() => columns.push(r.amplitudes),
                    _ => columns.push(Vec::new()),
                }
            }
            let height = columns.iter().map(Vec::len).max().unwrap_or(0);
            for i in 0..height {
                rows.push(columns.iter().map(|c| c.get(i).copied().unwrap_or(0.0)).collect());
            }
        }
    }
    if rows.is_empty() {
        return DMatrix::identity(d, d);
    }
    let f = DMatrix::from_fn(rows.len(), d, |i, j| rows[i][j]);
    let gram = f.transpose() * f;
    let eig = gram.symmetric_eigen();
    let keep: Vec<usize> = (0..d).filter(|&i| eig.eigenvalues[i].abs() < 1e-9).collect();
    DMatrix::from_fn(d, keep.len(), |i, j| eig.eigenvectors[(i, keep[j])])
}

#[test]
fn diagram_energy_is_lowest_energy_of_its_multiplet() {
    for (sites, flavors, seed) in [(2, 2, 20), (3, 2, 21), (2, 3, 22), (3, 3, 23)] {
        let config = random_config(sites, flavors, seed);
        for m in 1..=sites * flavors {
            let report = level_ordering_report(&config, m, &AnalysisOptions::default()).unwrap();
            let all_sectors = Sector::all_with_total(m, flavors, sites);
            let spectra: Vec<(Sector, Vec<f64>)> = all_sectors
                .iter()
                .map(|s| {
                    let h = build_sector_matrix(&config, s, 1 << 20).unwrap();
                    let mut e: Vec<f64> =
                        h.matrix.to_dense().symmetric_eigenvalues().iter().copied().collect();
                    e.sort_by(f64::total_cmp);
                    (s.clone(), e)
                })
                .collect();
            for d in enumerate_diagrams(m, flavors) {
                let entry = &report.diagrams[&d];
                let Some(energy) = entry.energy else { continue };
                let sector = d.highest_weight(flavors).unwrap();
                let h = build_sector_matrix(&config, &sector, 1 << 20).unwrap();
                let p = highest_weight_space(&h.basis);
                assert!(p.ncols() > 0, "no highest-weight states for {d}");
                let restricted = p.transpose() * h.matrix.to_dense() * &p;
                let lowest = restricted.symmetric_eigenvalues().min();
                assert!(
                    (lowest - energy).abs() < 1e-9,
                    "L={sites} N={flavors} {d}: kernel minimum {lowest} vs {energy}"
                );
                // every sector holding a weight of d carries the level E(d)
                for (s, e) in &spectra {
                    let holds_weight =
                        matches!(d.dominance(&YoungDiagram::from_sector(s).unwrap()), Dominance::Above | Dominance::Equal);
                    if holds_weight {
                        assert!(
                            e.iter().any(|x| (x - energy).abs() < 1e-9),
                            "{d} level missing from sector {s}"
                        );
                    }
                }
            }
        }
    }
}

#[test]
fn excited_state_outside_the_multiplet_is_not_highest_weight() {
    // Sector (1,1) on two sites holds a symmetric triplet and antisymmetric
    // singlets; diagonalize fully and find an eigenvector with a nonzero
    // raised image.
    let config = random_config(3, 2, 30);
    let sector = Sector::new(vec![1, 1]);
    let h = build_sector_matrix(&config, &sector, 1 << 20).unwrap();
    let eig = h.matrix.to_dense().symmetric_eigen();
    let tolerances = Tolerances::default();
    let mut found = false;
    for i in 0..h.basis.len() {
        let vector: Vec<f64> = eig.eigenvectors.column(i).iter().copied().collect();
        let r = EigenResult {
            energy: eig.eigenvalues[i],
            vector,
            gap: None,
            residual: 0.0,
        };
        let check = verify_multiplet_label(&r, &h.basis, &tolerances).unwrap();
        if check.max_raising_norm > 1e-3 {
            assert_eq!(check.verdict, Verdict::Fail);
            found = true;
        }
    }
    assert!(found);
    let ground = analyze_sector(&config, &sector, 2, &AnalysisOptions::default()).unwrap();
    assert_eq!(ground.summary.multiplet.unwrap().verdict, Verdict::Pass);
}

#[test]
fn one_dimensional_sector_is_trivially_highest_weight() {
    let config = random_config(2, 2, 31);
    let a = analyze_sector(&config, &Sector::new(vec![2, 2]), 2, &AnalysisOptions::default()).unwrap();
    assert_eq!(a.summary.dimension, 1);
    assert_eq!(a.summary.multiplet.unwrap().verdict, Verdict::Pass);
}

#[test]
fn free_fermions_fill_single_particle_levels() {
    let mut rng = ChaCha8Rng::seed_from_u64(40);
    for flavors in 1..=3 {
        for sites in 2..=5 {
            let t: Vec<f64> = (0..sites - 1).map(|_| rng.gen_range(0.5..1.5)).collect();
            let config = ChainConfig::new(
                sites,
                flavors,
                t.clone(),
                vec![0.0; sites - 1],
                vec![0.0; sites - 1],
                Potential::Hubbard { u: 0.0 },
            )
            .unwrap();
            let spectrum = single_particle_energies(&t, sites, Boundary::Open).unwrap();
            for m in 1..=sites * flavors {
                for s in Sector::all_with_total(m, flavors, sites) {
                    let h = build_sector_matrix(&config, &s, 1 << 20).unwrap();
                    let e = lowest_eigenpairs(&h.matrix, 1, &SolverOptions::default(), 1e-10).unwrap();
                    let want = free_sector_energy(&spectrum, &s).unwrap();
                    assert!((e[0].energy - want).abs() <= 1e-10, "{s}: {} vs {want}", e[0].energy);
                }
                if flavors >= 2 && sites <= 4 {
                    let report = level_ordering_report(&config, m, &AnalysisOptions::default()).unwrap();
                    assert_eq!(report.ground.lowest_diagram, ground_diagram(m, flavors).unwrap());
                    assert_eq!(report.free_fermion.unwrap().verdict, Verdict::Pass);
                }
            }
        }
    }
}

#[test]
fn periodic_dispersion_matches_ring_spectrum() {
    use sunchain_core::freefermion::periodic_dispersion;
    for sites in 2..=12 {
        let ring = single_particle_energies(&vec![1.3; sites], sites, Boundary::Periodic).unwrap();
        let formula = periodic_dispersion(1.3, sites);
        for (a, b) in ring.energies.iter().zip(&formula.energies) {
            assert!((a + formula.offset - b).abs() <= 1e-12);
        }
        if sites >= 3 {
            // eps_k = eps_{L-k+2}: every nonzero level but the top one for even L is doubled
            let e = &formula.energies;
            let pairs = e.windows(2).filter(|w| (w[0] - w[1]).abs() < 1e-12).count();
            assert_eq!(pairs, (sites - 1) / 2);
        }
    }
}
