use dualsat_core::beamhopping::{
    parent_beams, primary_pattern, secondary_pattern, secondary_power_control, SlotPattern,
};
use dualsat_core::channel::{build_beam_layout, build_nested_layout, distance, BeamLayout, SatelliteId};
use dualsat_core::linalg::{CMatrix, C64};
use dualsat_core::system::{System, SystemConfig};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn layout(k: usize) -> BeamLayout {
    let coverage = match k {
        7 => 500.0,
        19 => 900.0,
        _ => 1300.0,
    };
    build_beam_layout(coverage, k, 250.0, SatelliteId::Primary).unwrap()
}

fn assert_non_adjacent(p: &SlotPattern, l: &BeamLayout) {
    for set in &p.active_sets {
        for (i, &a) in set.iter().enumerate() {
            for &b in &set[i + 1..] {
                // Adjacent means the 3-dB discs overlap.
                let d = distance(l.beam_centers[a], l.beam_centers[b]);
                assert!(
                    d >= 2.0 * l.beam_radius_3db - 1e-9,
                    "beams {a} and {b} lit together at {d} km"
                );
            }
        }
    }
}

#[test]
fn primary_patterns_partition_and_avoid_neighbours() {
    for k in [7, 19, 37] {
        let l = layout(k);
        for reuse in [3, 4, 7] {
            let p = primary_pattern(&l, reuse).unwrap();
            assert_eq!(p.period, reuse);
            assert!(p.is_partition(k), "K={k} reuse={reuse}");
            assert!(p.active_sets.iter().all(|s| !s.is_empty()));
            assert_non_adjacent(&p, &l);
            for b in 0..k {
                assert_eq!(p.illumination_fraction(b), 1.0 / reuse as f64);
            }
        }
    }
}

#[test]
fn seven_beams_split_into_centre_and_two_triangles() {
    let p = primary_pattern(&layout(7), 3).unwrap();
    let mut sizes: Vec<usize> = p.active_sets.iter().map(Vec::len).collect();
    sizes.sort_unstable();
    assert_eq!(sizes, vec![1, 3, 3]);
}

#[test]
fn pattern_construction_is_deterministic() {
    let l = layout(19);
    assert_eq!(primary_pattern(&l, 3).unwrap(), primary_pattern(&l, 3).unwrap());
}

#[test]
fn secondary_never_overlaps_the_lit_primary() {
    for k in [7, 19] {
        let l = layout(k);
        let sub = build_nested_layout(&l, 4, SatelliteId::Secondary).unwrap();
        let parent = parent_beams(&l, &sub).unwrap();
        for reuse in [3, 4] {
            let p = primary_pattern(&l, reuse).unwrap();
            let q = secondary_pattern(&p, &l, &sub, None).unwrap();
            assert_eq!(q.period, p.period);
            let mut lit_ever = vec![false; sub.beams_count()];
            for (lit_p, lit_s) in p.active_sets.iter().zip(&q.active_sets) {
                assert_eq!(lit_s.len(), 4 * (k - lit_p.len()));
                for &b in lit_s {
                    lit_ever[b] = true;
                    assert!(!lit_p.contains(&parent[b]));
                    for &a in lit_p {
                        let d = distance(sub.beam_centers[b], l.beam_centers[a]);
                        assert!(d > l.beam_radius_3db, "sub-beam {b} within {d} km of lit beam {a}");
                    }
                }
            }
            assert!(lit_ever.iter().all(|&x| x));
        }
    }
}

#[test]
fn budget_keeps_the_farthest_sub_beams() {
    let l = layout(7);
    let sub = build_nested_layout(&l, 4, SatelliteId::Secondary).unwrap();
    let p = primary_pattern(&l, 3).unwrap();
    let full = secondary_pattern(&p, &l, &sub, None).unwrap();
    for budget in [0, 1, 5, 12, 24, 100] {
        let thin = secondary_pattern(&p, &l, &sub, Some(budget)).unwrap();
        for (slot, (t, f)) in thin.active_sets.iter().zip(&full.active_sets).enumerate() {
            assert_eq!(t.len(), f.len().min(budget));
            assert!(t.iter().all(|b| f.contains(b)));
            let clearance = |b: usize| {
                p.active_sets[slot]
                    .iter()
                    .map(|&a| distance(sub.beam_centers[b], l.beam_centers[a]))
                    .fold(f64::INFINITY, f64::min)
            };
            let kept = t.iter().map(|&b| clearance(b)).fold(f64::INFINITY, f64::min);
            for b in f.iter().filter(|b| !t.contains(b)) {
                assert!(clearance(*b) <= kept + 1e-9);
            }
        }
    }
}

#[test]
fn far_sub_beam_is_an_orphan() {
    let l = layout(7);
    let far = build_beam_layout(2000.0, 19, 250.0, SatelliteId::Secondary).unwrap();
    assert!(parent_beams(&l, &far).is_err());
    let p = primary_pattern(&l, 3).unwrap();
    assert!(secondary_pattern(&p, &l, &far, None).is_err());
}

fn i_over_n_db(h: &CMatrix, user: usize, beams: &[usize], powers: &[f64], noise: f64) -> f64 {
    let i: f64 = beams
        .iter()
        .zip(powers)
        .map(|(&b, p)| p * h[(user, b)].norm_sqr())
        .sum();
    10.0 * (i / noise).log10()
}

#[test]
fn single_beam_three_db_over_is_cut_by_three_db() {
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    for _ in 0..200 {
        let g = C64::from_polar(rng.gen_range(1e-8..1e-3), rng.gen_range(0.0..std::f64::consts::TAU));
        let h = CMatrix::from_element(1, 1, g);
        let noise = rng.gen_range(1e-14..1e-10);
        let cap = rng.gen_range(-20.0..10.0);
        let nominal = noise * 10f64.powf((cap + 3.0) / 10.0) / g.norm_sqr();
        let out = secondary_power_control(&h, &[0], &[0], &[nominal], noise, cap);
        assert!((out[0] / nominal - 10f64.powf(-0.3)).abs() < 1e-12);
        assert!((i_over_n_db(&h, 0, &[0], &out, noise) - cap).abs() < 1e-9);
    }
}

#[test]
fn nothing_to_protect_leaves_powers_alone() {
    let h = CMatrix::from_element(2, 3, C64::new(1.0, 0.0));
    let p = [1.0, 2.0, 3.0];
    assert_eq!(
        secondary_power_control(&h, &[], &[0, 1, 2], &p, 1e-3, -10.0),
        p.to_vec()
    );
}

/// Power-control audit on realized drops of the default system: every slot,
/// every primary user that is lit sees at most the cap.
#[test]
fn power_control_meets_the_cap_on_random_drops() {
    let system = System::new(SystemConfig::default()).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(32);
    for d in 0..300u64 {
        let drop = system.realize(d).unwrap();
        let cap = rng.gen_range(-20.0..5.0);
        let total = 10f64.powf(rng.gen_range(-0.5..5.0));
        for (lit_p, lit_s) in system
            .primary_hops
            .active_sets
            .iter()
            .zip(&system.secondary_hops.active_sets)
        {
            let users: Vec<usize> = lit_p.iter().filter_map(|&k| drop.cognitive.sat1[k]).collect();
            let beams: Vec<usize> = lit_s
                .iter()
                .copied()
                .filter(|&b| drop.cognitive.sat2[b].is_some())
                .collect();
            if beams.is_empty() {
                continue;
            }
            let nominal = vec![total / 2.0 / beams.len() as f64; beams.len()];
            let noise = drop.channel.noise_power_w;
            let out = secondary_power_control(&drop.sub_channel, &users, &beams, &nominal, noise, cap);
            assert!(out.iter().zip(&nominal).all(|(a, b)| a <= b));
            for &u in &users {
                assert!(i_over_n_db(&drop.sub_channel, u, &beams, &out, noise) <= cap + 1e-9);
            }
            let again = secondary_power_control(&drop.sub_channel, &users, &beams, &out, noise, cap);
            assert_eq!(again, out);
            let loose = secondary_power_control(&drop.sub_channel, &users, &beams, &nominal, noise, f64::INFINITY);
            assert_eq!(loose, nominal);
        }
    }
}
