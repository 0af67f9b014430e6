use kinetic_limit::dynamics::{hamiltonian, PhasePoint, SystemState};
use kinetic_limit::potentials::RadialPotential;
use kinetic_limit::trees_flows::*;
use kinetic_limit::two_body::{measure_jacobian, TwoBody};
use kinetic_limit::Vec3;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal, UnitSphere};

fn gauss(rng: &mut ChaCha8Rng, s: f64) -> Vec3 {
    let g = |r: &mut ChaCha8Rng| -> f64 { StandardNormal.sample(r) };
    Vec3::new(g(rng), g(rng), g(rng)) * s
}

fn sphere(rng: &mut ChaCha8Rng) -> Vec3 {
    let a: [f64; 3] = UnitSphere.sample(rng);
    Vec3::new(a[0], a[1], a[2])
}

/// Random parameters for a given tree and signs, with ν flipped into the
/// required half-space against the Boltzmann flow built so far.
fn random_point(rng: &mut ChaCha8Rng, tree: &TreeGraph, signs: &SignSequence, z: &[PhasePoint], t: f64, vscale: f64, tb: &TwoBody) -> CollisionParams {
    let n = tree.n();
    let mut times: Vec<f64> = (0..n).map(|_| rng.gen_range(0.0..t)).collect();
    times.sort_by(|a, b| b.total_cmp(a));
    let mut p = CollisionParams { times, nus: Vec::new(), velocities: Vec::new() };
    for r in 0..n {
        let head = TreeGraph::new(tree.j, tree.k[..r].to_vec()).unwrap();
        let hs = SignSequence::new(signs.sigma[..r].to_vec());
        let hp = CollisionParams { times: p.times[..r].to_vec(), nus: p.nus.clone(), velocities: p.velocities.clone() };
        let b = build_bbf(&head, &hs, z, &hp, t, tb).unwrap();
        let eta = b.state_at(p.times[r]).unwrap()[tree.k[r] - 1].v;
        let v = gauss(rng, vscale);
        let mut nu = sphere(rng);
        if signs.sigma[r].value() * nu.dot(&(v - eta)) < 0.0 {
            nu = -nu;
        }
        p.nus.push(nu);
        p.velocities.push(v);
    }
    p
}

fn random_z(rng: &mut ChaCha8Rng, j: usize, vscale: f64) -> Vec<PhasePoint> {
    (0..j).map(|_| PhasePoint::new(gauss(rng, 1.0), gauss(rng, vscale))).collect()
}

#[test]
fn zero_potential_ibf_is_bbf_up_to_offsets() {
    let tb = TwoBody::new(RadialPotential::zero());
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let eps = 1e-3;
    let mut done = 0;
    while done < 10 {
        let tree = TreeGraph::new(2, vec![rng.gen_range(1..=2), rng.gen_range(1..=3)]).unwrap();
        let signs = SignSequence::new(vec![if rng.gen() { Sign::Plus } else { Sign::Minus }, if rng.gen() { Sign::Plus } else { Sign::Minus }]);
        let z = random_z(&mut rng, 2, 1.0);
        let p = random_point(&mut rng, &tree, &signs, &z, 1.0, 1.0, &tb);
        let c = match compare_flows(&tree, &signs, &z, &p, 1.0, eps, &tb, &CompareOptions::default()) {
            Ok(c) => c,
            Err(kinetic_limit::Error::Rejected(_)) => continue,
            Err(e) => panic!("{e}"),
        };
        assert_eq!(c.velocity_gap_at_zero, 0.0);
        assert!(c.max_position_gap <= 2.0 * eps * (1.0 + 1e-9), "{c:?}");
        done += 1;
    }
}

#[test]
fn numeric_mode_with_zero_potential_matches_too() {
    let tb = TwoBody::new(RadialPotential::zero());
    let tree = TreeGraph::new(1, vec![1]).unwrap();
    let signs = SignSequence::new(vec![Sign::Plus]);
    let z = vec![PhasePoint::new(Vec3::zeros(), Vec3::new(0.3, 0.0, 0.0))];
    let v = Vec3::new(-1.0, 0.5, 0.0);
    let rel = v - z[0].v;
    let side = Vec3::z().cross(&rel).normalize();
    let nu = rel.normalize() * 0.8 + side * 0.6;
    let p = CollisionParams { times: vec![0.5], nus: vec![nu], velocities: vec![v] };
    let opts = CompareOptions { ibf: IbfOptions { mode: ScatteringMode::Numeric, ..Default::default() }, ..Default::default() };
    let c = compare_flows(&tree, &signs, &z, &p, 1.0, 1e-3, &tb, &opts).unwrap();
    assert_eq!(c.velocity_gap_at_zero, 0.0);
    assert!(c.max_position_gap <= 1e-3 * (1.0 + 1e-9));
}

#[test]
fn one_plus_node_scatters_back_to_the_bbf_velocities() {
    let tb = TwoBody::new(RadialPotential::smooth_junction(0.1, 20.0).unwrap());
    let tree = TreeGraph::new(1, vec![1]).unwrap();
    let signs = SignSequence::new(vec![Sign::Plus]);
    let z = vec![PhasePoint::new(Vec3::zeros(), Vec3::new(0.3, 0.1, 0.0))];
    let v = Vec3::new(-1.2, 0.5, 0.3);
    let rel = v - z[0].v;
    let nu = (rel.normalize() + Vec3::new(0.0, 0.0, 0.6)).normalize();
    assert!(nu.dot(&rel) > 0.0);
    let p = CollisionParams { times: vec![0.5], nus: vec![nu], velocities: vec![v] };
    let bbf = build_bbf(&tree, &signs, &z, &p, 1.0, &tb).unwrap();
    let exact = build_ibf(&tree, &signs, &z, &p, 1.0, 1e-3, &tb, &IbfOptions::default()).unwrap();
    assert_eq!(exact.numeric_scatterings, 0);
    for (a, b) in bbf.final_state().iter().zip(exact.final_state()) {
        assert_eq!(a.v, b.v);
    }
    let numeric = build_ibf(&tree, &signs, &z, &p, 1.0, 1e-3, &tb, &IbfOptions { mode: ScatteringMode::Numeric, ..Default::default() }).unwrap();
    assert!(!numeric.recollided);
    assert!(numeric.energy_drift < 1e-8);
    for (a, b) in bbf.final_state().iter().zip(numeric.final_state()) {
        assert!((a.v - b.v).norm() < 1e-6, "{} vs {}", a.v, b.v);
    }
    for (a, b) in exact.final_state().iter().zip(numeric.final_state()) {
        assert!((a.x - b.x).norm() < 1e-7);
    }
    let st = |ps: &[PhasePoint]| SystemState::new(ps.to_vec(), 1e-3).unwrap();
    let e0 = hamiltonian(&st(&numeric.segments[1].start), tb.potential());
    let e1 = hamiltonian(&st(numeric.final_state()), tb.potential());
    assert!((e0 - e1).abs() < 1e-8 * e0);
}

#[test]
fn third_particle_at_creation_is_rejected() {
    let tb = TwoBody::new(RadialPotential::zero());
    let tree = TreeGraph::new(2, vec![1]).unwrap();
    let signs = SignSequence::new(vec![Sign::Minus]);
    // Particle 2 sits where particle 3 will be created at t₁ = 0.5.
    let eps = 1e-2;
    let nu = Vec3::x();
    let z = vec![PhasePoint::new(Vec3::zeros(), Vec3::zeros()), PhasePoint::new(Vec3::new(eps * 1.5, 0.0, 0.0), Vec3::zeros())];
    let p = CollisionParams { times: vec![0.5], nus: vec![nu], velocities: vec![Vec3::new(-1.0, 0.0, 0.0)] };
    let e = build_ibf(&tree, &signs, &z, &p, 1.0, eps, &tb, &IbfOptions::default());
    assert!(matches!(e, Err(kinetic_limit::Error::Rejected(_))));
}

#[test]
fn overlap_detector_matches_scan() {
    let tb = TwoBody::new(RadialPotential::smooth_junction(0.1, 20.0).unwrap());
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..30 {
        let j = rng.gen_range(1..=3);
        let n = rng.gen_range(0..=3);
        let tree = TreeGraph::new(j, (0..n).map(|i| rng.gen_range(1..=j + i)).collect()).unwrap();
        let signs = SignSequence::new((0..n).map(|_| if rng.gen() { Sign::Plus } else { Sign::Minus }).collect());
        let z = random_z(&mut rng, j, 1.0);
        let p = random_point(&mut rng, &tree, &signs, &z, 1.0, 1.0, &tb);
        let b = build_bbf(&tree, &signs, &z, &p, 1.0, &tb).unwrap();
        let rep = overlap_detect(&b, 0.1).unwrap();
        for pr in &rep.pairs {
            let scan = overlap_scan(&b, pr.i, pr.h, 1e-4).unwrap();
            assert!((scan - pr.min_distance).abs() < 1e-8, "{pr:?} scan {scan}");
        }
    }
}

#[test]
fn overlap_examples() {
    let tb = TwoBody::new(RadialPotential::zero());
    let tree = TreeGraph::new(2, vec![]).unwrap();
    let none = SignSequence::new(vec![]);
    // Backward in time the pair separates.
    let z = vec![PhasePoint::new(Vec3::zeros(), Vec3::new(1.0, 0.2, 0.0)), PhasePoint::new(Vec3::new(1.0, 0.0, 0.0), Vec3::new(-1.0, 0.0, 0.0))];
    let b = build_bbf(&tree, &none, &z, &CollisionParams::empty(), 1.0, &tb).unwrap();
    assert!(!overlap_detect(&b, 0.5).unwrap().in_n_delta);
    // Without nodes only s = 0 is checked; there the pair coincides.
    let z = vec![PhasePoint::new(Vec3::new(-1.0, 0.0, 0.0), Vec3::new(-1.0, 0.0, 0.0)), PhasePoint::new(Vec3::new(1.0, 0.0, 0.0), Vec3::new(1.0, 0.0, 0.0))];
    let b = build_bbf(&tree, &none, &z, &CollisionParams::empty(), 1.0, &tb).unwrap();
    let r = overlap_detect(&b, 1e-12).unwrap();
    assert!(r.in_n_delta);
    assert_eq!(r.witnesses[0].time, 0.0);
}

#[test]
fn merge_node_window() {
    let tb = TwoBody::new(RadialPotential::zero());
    let tree = TreeGraph::new(1, vec![1, 2]).unwrap();
    let signs = SignSequence::new(vec![Sign::Minus, Sign::Minus]);
    let z = vec![PhasePoint::new(Vec3::zeros(), Vec3::new(0.1, 0.0, 0.0))];
    let p = CollisionParams { times: vec![0.7, 0.3], nus: vec![Vec3::x(), -Vec3::x()], velocities: vec![Vec3::new(-1.0, 0.0, 0.0), Vec3::new(0.0, -1.0, 0.0)] };
    let b = build_bbf(&tree, &signs, &z, &p, 1.0, &tb).unwrap();
    // 1 and 2 merge at t₁; node 2 lies on the path of 2 only.
    assert_eq!(overlap_window(&b, 1, 2), (0.7, 0.3));
    assert_eq!(overlap_window(&b, 2, 3), (0.3, 0.0));
    assert_eq!(overlap_window(&b, 1, 3), (0.7, 0.3));
}

#[test]
fn incoming_map_round_trip_and_measure() {
    let tb = TwoBody::new(RadialPotential::smooth_junction(0.1, 20.0).unwrap());
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let tree = TreeGraph::new(2, vec![1, 3]).unwrap();
    for signs in SignSequence::all(2) {
        let z = random_z(&mut rng, 2, 1.0);
        let p = random_point(&mut rng, &tree, &signs, &z, 1.0, 1.0, &tb);
        let b = build_bbf(&tree, &signs, &z, &p, 1.0, &tb).unwrap();
        for r in 1..=2 {
            let inc = incoming_map(&b, r, &p, &tb).unwrap();
            if signs.sigma[r - 1] == Sign::Minus {
                assert_eq!(inc.nus[r - 1], p.nus[r - 1]);
            }
            let back = outgoing_params(&tree, &signs, &z, 1.0, &inc, &tb).unwrap();
            let b2 = build_bbf(&tree, &signs, &z, &back, 1.0, &tb).unwrap();
            for (x, y) in b.final_state().iter().zip(b2.final_state()) {
                assert!((x.x - y.x).norm() < 1e-9 && (x.v - y.v).norm() < 1e-9);
            }
            let eta = b.creations[r - 1].parent_before;
            let d = measure_jacobian(|nu, v| incoming_pair(&tb, nu, v, &eta), &p.nus[r - 1], &p.velocities[r - 1], 1e-4).unwrap();
            assert!((d - 1.0).abs() < 1e-6, "{d}");
        }
    }
}
