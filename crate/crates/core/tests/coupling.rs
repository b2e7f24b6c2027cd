use stretch_idla::analysis::stats::mean;
use stretch_idla::analysis::{coverage_partition_check, ks_test_exp1, lag1_autocorrelation};
use stretch_idla::coupling::{generate_rings, replay, verify_coupling, AuxClockField, CouplingOptions, RingKind};
use stretch_idla::{build_forest, ForestView, WeightField, WeightProfile, Window};

#[test]
fn replay_reproduces_the_forest_bit_for_bit() {
    let w = Window::new(16, 8).unwrap();
    for seed in 0..25 {
        let field = WeightField::new(seed, WeightProfile::Stretch, w);
        let forest = build_forest::<f64>(&field).unwrap();
        let h = forest.max_dist() * 1.5;
        let rings = generate_rings(&forest, &AuxClockField::for_field(&field), h, h).unwrap();
        let state = replay(&rings, w).unwrap();
        assert!(state.fully_covered());
        assert!(coverage_partition_check(&state));
        for i in w.width() as usize..w.vertex_count() {
            let v = w.vertex_at(i);
            assert_eq!(state.occupancy_time(v), Some(forest.distance(v).unwrap()));
            assert_eq!(state.parent_dir(v), forest.parent_dir(v));
            assert_eq!(state.owner(v), forest.owner(v));
        }
        for s in w.sites() {
            assert_eq!(state.tree_edges(s), forest.tree_of(s).unwrap());
        }
    }
}

#[test]
fn boundary_rings_never_extend() {
    let r = verify_coupling::<f64>(3, Window::new(16, 8).unwrap(), &CouplingOptions::default()).unwrap();
    assert!(r.forest_equal);
    assert_eq!(r.boundary_extends, 0);
    assert_eq!(r.interior_rings, 16 * 8);
    assert!(r.boundary_rings > r.interior_rings);
}

#[test]
fn gaps_are_unit_exponential_and_uncorrelated() {
    let opts = CouplingOptions::default();
    let w = Window::new(16, 8).unwrap();
    let mut per_site_ac = Vec::new();
    let mut pooled = Vec::new();
    for seed in 0..8 {
        let r = verify_coupling::<f64>(seed, w, &opts).unwrap();
        for s in w.sites() {
            let g: Vec<f64> = r.gaps.iter().filter(|(v, _)| *v == s).map(|(_, g)| *g).collect();
            if g.len() > 50 {
                per_site_ac.push(lag1_autocorrelation(&g));
            }
            pooled.extend(g);
        }
    }
    assert!(pooled.len() > 10_000);
    let ks = ks_test_exp1(&pooled).unwrap();
    assert!(ks.p_value > 1e-3, "{ks:?}");
    assert!((mean(&pooled) - 1.0).abs() < 0.03);
    let ac = mean(&per_site_ac);
    assert!(ac.abs() < 0.02, "lag-1 autocorrelation {ac}");

    let r = verify_coupling::<f64>(100, w, &opts).unwrap();
    let site = w.site(5);
    let g: Vec<f64> = r.gaps.iter().filter(|(v, _)| *v == site).map(|(_, g)| *g).collect();
    let rho = lag1_autocorrelation(&g);
    assert!(rho.abs() < 3.0 / (g.len() as f64).sqrt(), "site gaps {} rho {rho}", g.len());
}

#[test]
fn ks_is_calibrated_on_true_exponentials() {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
    let reps = 400;
    let mut small = 0;
    for _ in 0..reps {
        let xs: Vec<f64> = (0..500).map(|_| -(-rng.gen::<f64>()).ln_1p()).collect();
        if ks_test_exp1(&xs).unwrap().p_value < 0.05 {
            small += 1;
        }
    }
    let rate = small as f64 / reps as f64;
    assert!((0.02..0.09).contains(&rate), "rejection rate {rate}");
}

#[test]
fn interior_rings_are_one_per_tree_edge() {
    let w = Window::new(12, 6).unwrap();
    let field = WeightField::new(40, WeightProfile::Stretch, w);
    let forest = build_forest::<f64>(&field).unwrap();
    let h = forest.max_dist() * 2.0;
    let rings = generate_rings(&forest, &AuxClockField::for_field(&field), h, h).unwrap();
    let interior: Vec<_> = rings.iter().filter(|r| r.kind == RingKind::Interior).collect();
    assert_eq!(interior.len(), w.interior_count());
    assert!(rings.windows(2).all(|p| p[0].time <= p[1].time));
}
