use dualsat_core::architectures::{
    eval_cognitive, eval_conventional, eval_cooperative, eval_coordinated, Architecture, CognitiveSetup,
};
use dualsat_core::beamhopping::SlotPattern;
use dualsat_core::channel::DualChannel;
use dualsat_core::linalg::{CMatrix, C64};
use dualsat_core::precoding::{sum_capacity_bound, PowerAllocation};
use dualsat_core::scheduling::Allocation;
use dualsat_core::system::{DropRealization, System, SystemConfig};

const POWERS_DBW: [f64; 6] = [-5.0, 5.0, 15.0, 22.5, 35.0, 50.0];

fn watts(dbw: f64) -> f64 {
    10f64.powf(dbw / 10.0)
}

fn system() -> System {
    System::new(SystemConfig::default()).unwrap()
}

fn drops(system: &System, n: u64) -> impl Iterator<Item = DropRealization> + '_ {
    (0..n).filter_map(move |seed| system.realize(1000 + seed).ok())
}

/// ZF SNRs from the normal equations, without the SVD used by the library.
fn zf_snr_oracle(h: &CMatrix, p_ant: f64, noise: f64) -> Vec<f64> {
    let gram = h * h.adjoint();
    let mut w = h.adjoint() * gram.try_inverse().unwrap();
    for mut c in w.column_iter_mut() {
        let n = c.norm();
        c /= C64::new(n, 0.0);
    }
    let feed = (0..w.nrows())
        .map(|k| w.row(k).iter().map(|x| x.norm_sqr()).sum::<f64>())
        .fold(0.0, f64::max);
    let p = p_ant / feed;
    (0..h.nrows())
        .map(|i| p * (h.row(i) * w.column(i))[(0, 0)].norm_sqr() / noise)
        .collect()
}

#[test]
fn silent_partner_reduces_to_single_satellite_zf() {
    let sys = system();
    for drop in drops(&sys, 30) {
        let alloc = Allocation {
            sat1_users: drop.allocation.sat1_users.clone(),
            sat2_users: vec![],
        };
        let set = &alloc.sat1_users;
        let hs = CMatrix::from_fn(set.len(), drop.channel.h1.ncols(), |r, c| drop.channel.h1[(set[r], c)]);
        for dbw in POWERS_DBW {
            let p = watts(dbw);
            let r = eval_coordinated(&drop.channel, &alloc, p, PowerAllocation::Uniform).unwrap();
            let snr = zf_snr_oracle(&hs, p / 2.0 / 7.0, drop.channel.noise_power_w);
            for (a, &i) in set.iter().enumerate() {
                let got = 2f64.powf(r.per_user_rate[i]) - 1.0;
                assert!((got / snr[a] - 1.0).abs() < 1e-6, "{got} vs {}", snr[a]);
            }
        }
    }
}

#[test]
fn cooperative_is_the_capacity_bound() {
    let sys = system();
    for drop in drops(&sys, 10) {
        let joint = dualsat_core::linalg::hstack(&drop.channel.h1, &drop.channel.h2);
        let p = watts(20.0);
        let r = eval_cooperative(&drop.channel, p).unwrap();
        let b = sum_capacity_bound(&joint, p, drop.channel.noise_power_w).unwrap();
        assert!(r.per_user_rate.iter().all(|&x| x == r.per_user_rate[0]));
        assert!((r.sum_rate() - b.sum_rate).abs() <= 1e-12 * b.sum_rate);
        assert!(r.upper_bound);
    }
}

#[test]
fn cooperative_dominates_every_drop_and_power() {
    let sys = system();
    for drop in drops(&sys, 40) {
        let mut last = 0.0;
        for dbw in POWERS_DBW {
            let p = watts(dbw);
            let bound = sys.evaluate(Architecture::Cooperative, &drop, p).unwrap().sum_rate();
            assert!(bound >= last, "bound not monotone");
            last = bound;
            for arch in Architecture::ALL.into_iter().filter(|a| a.is_realizable()) {
                let r = sys.evaluate(arch, &drop, p).unwrap();
                assert!(
                    r.sum_rate() <= bound * (1.0 + 1e-9),
                    "{arch} beats the bound at {dbw} dBW"
                );
            }
        }
    }
}

#[test]
fn common_power_and_rate_sanity() {
    let sys = system();
    for drop in drops(&sys, 40) {
        for dbw in POWERS_DBW {
            let p = watts(dbw);
            for arch in Architecture::ALL {
                let r = sys.evaluate(arch, &drop, p).unwrap();
                assert_eq!(r.architecture, arch);
                assert!(
                    r.consumed_power_w <= p * (1.0 + 1e-9),
                    "{arch} spends {} of {p}",
                    r.consumed_power_w
                );
                assert_eq!(r.per_user_rate.len(), drop.users.len());
                for (i, &x) in r.per_user_rate.iter().enumerate() {
                    assert!(x >= 0.0 && x.is_finite());
                    if !r.served_user_ids.contains(&i) {
                        assert_eq!(x, 0.0);
                    }
                }
            }
        }
    }
}

/// With power scaled without bound the conventional SINR tends to C/I for every
/// beam that shares its color; a beam alone in its color stays noise limited.
#[test]
fn conventional_saturates_at_carrier_to_interference() {
    let sys = system();
    for drop in drops(&sys, 10) {
        let p = 1e15;
        let hi = eval_conventional(&drop.channel, &drop.conventional, [&sys.colors1, &sys.colors2], p).unwrap();
        let mut limit = 0.0;
        let mut alone = 0.0;
        for (s, served, colors) in [
            (0, &drop.conventional.sat1, &sys.colors1),
            (1, &drop.conventional.sat2, &sys.colors2),
        ] {
            let h = drop.channel.satellite(s);
            for class in &colors.active_sets {
                for &k in class {
                    let Some(i) = served[k] else { continue };
                    let c = h[(i, k)].norm_sqr();
                    let i_sum: f64 = class
                        .iter()
                        .filter(|&&k2| k2 != k && served[k2].is_some())
                        .map(|&k2| h[(i, k2)].norm_sqr())
                        .sum();
                    if i_sum > 0.0 {
                        limit += (1.0 + c / i_sum).log2() / 6.0;
                    } else {
                        let active = served.iter().flatten().count() as f64;
                        let noise = drop.channel.noise_power_w / 6.0;
                        alone += (1.0 + p / 2.0 / active * c / noise).log2() / 6.0;
                    }
                }
            }
        }
        let total = limit + alone;
        assert!(
            (hi.sum_rate() - total).abs() < 1e-6 * total,
            "{} vs {total}",
            hi.sum_rate()
        );
        let mid = eval_conventional(&drop.channel, &drop.conventional, [&sys.colors1, &sys.colors2], 1e5).unwrap();
        assert!(mid.sum_rate() < hi.sum_rate());
    }
}

#[test]
fn other_colors_and_other_satellite_never_interfere() {
    let sys = system();
    for drop in drops(&sys, 20) {
        let mut ch = drop.channel.clone();
        for (s, colors) in [(0, &sys.colors1), (1, &sys.colors2)] {
            let served = if s == 0 {
                &drop.conventional.sat1
            } else {
                &drop.conventional.sat2
            };
            let h = if s == 0 { &mut ch.h1 } else { &mut ch.h2 };
            for class in &colors.active_sets {
                for &k in class {
                    let Some(i) = served[k] else { continue };
                    for k2 in 0..h.ncols() {
                        if !class.contains(&k2) {
                            h[(i, k2)] = C64::new(0.0, 0.0);
                        }
                    }
                }
            }
        }
        // Gains of each user toward the satellite that does not serve it.
        for i in 0..ch.users() {
            if !drop.conventional.sat1.contains(&Some(i)) {
                ch.h1.row_mut(i).fill(C64::new(0.0, 0.0));
            }
            if !drop.conventional.sat2.contains(&Some(i)) {
                ch.h2.row_mut(i).fill(C64::new(0.0, 0.0));
            }
        }
        for dbw in POWERS_DBW {
            let p = watts(dbw);
            let a = eval_conventional(&drop.channel, &drop.conventional, [&sys.colors1, &sys.colors2], p).unwrap();
            let b = eval_conventional(&ch, &drop.conventional, [&sys.colors1, &sys.colors2], p).unwrap();
            assert_eq!(a, b);
        }
    }
}

fn silent(period: usize) -> SlotPattern {
    SlotPattern {
        period,
        active_sets: vec![vec![]; period],
        slot_duration: 1.0,
    }
}

#[test]
fn primary_only_cognitive_matches_slot_accounting() {
    let sys = system();
    let period = sys.primary_hops.period as f64;
    for drop in drops(&sys, 30) {
        let mut setup = sys.cognitive_setup(&drop);
        let quiet = silent(sys.primary_hops.period);
        setup.secondary_pattern = &quiet;
        let n0 = drop.channel.noise_power_w;
        for dbw in POWERS_DBW {
            let p = watts(dbw);
            let r = eval_cognitive(&setup, p, None).unwrap();
            for lit in &sys.primary_hops.active_sets {
                let served: Vec<(usize, usize)> = lit
                    .iter()
                    .filter_map(|&k| drop.cognitive.sat1[k].map(|u| (k, u)))
                    .collect();
                let pb = p / 2.0 / served.len() as f64;
                for &(k, i) in &served {
                    let s = pb * drop.channel.h1[(i, k)].norm_sqr();
                    let intf: f64 = served
                        .iter()
                        .filter(|(k2, _)| *k2 != k)
                        .map(|(k2, _)| pb * drop.channel.h1[(i, *k2)].norm_sqr())
                        .sum();
                    let want = (1.0 + s / (n0 + intf)).log2() / period;
                    assert!((r.per_user_rate[i] - want).abs() <= 1e-12 * want.max(1e-300));
                }
            }
            // The centre beam is lit alone: rate is a third of the full-band SNR capacity.
            let i = drop.cognitive.sat1[0].unwrap();
            let snr = p / 2.0 * drop.channel.h1[(i, 0)].norm_sqr() / n0;
            assert!((r.per_user_rate[i] - (1.0 + snr).log2() / 3.0).abs() < 1e-12 * r.per_user_rate[i]);
        }
    }
}

#[test]
fn infinite_cap_changes_nothing() {
    let sys = system();
    for drop in drops(&sys, 30) {
        let setup = sys.cognitive_setup(&drop);
        for dbw in POWERS_DBW {
            let a = eval_cognitive(&setup, watts(dbw), None).unwrap();
            let b = eval_cognitive(&setup, watts(dbw), Some(f64::INFINITY)).unwrap();
            assert_eq!(a.per_user_rate, b.per_user_rate);
            assert_eq!(b.architecture, Architecture::CognitivePc);
        }
    }
}

#[test]
fn capped_secondary_costs_primary_users_at_most_half_a_db() {
    let sys = system();
    let period = sys.primary_hops.period as f64;
    let sinr = |rate: f64| 2f64.powf(rate * period) - 1.0;
    for drop in drops(&sys, 60) {
        let setup = sys.cognitive_setup(&drop);
        let quiet = silent(sys.primary_hops.period);
        let alone = CognitiveSetup {
            secondary_pattern: &quiet,
            ..setup
        };
        for dbw in POWERS_DBW {
            let p = watts(dbw);
            let capped = eval_cognitive(&setup, p, Some(-10.0)).unwrap();
            let clean = eval_cognitive(&alone, p, None).unwrap();
            for i in drop.cognitive.sat1.iter().flatten().copied() {
                let loss_db = 10.0 * (sinr(clean.per_user_rate[i]) / sinr(capped.per_user_rate[i])).log10();
                assert!(loss_db <= 0.5, "user {i} loses {loss_db} dB at {dbw} dBW");
                assert!(loss_db <= 10.0 * 1.1f64.log10() + 1e-9);
            }
        }
    }
}

fn rotate(m: &CMatrix, phi: f64) -> CMatrix {
    m * C64::from_polar(1.0, phi)
}

#[test]
fn global_phase_rotation_leaves_rates_unchanged() {
    let sys = system();
    for drop in drops(&sys, 15) {
        let mut turned = drop.clone();
        turned.channel = DualChannel {
            h1: rotate(&drop.channel.h1, 0.7),
            h2: rotate(&drop.channel.h2, -2.1),
            ..drop.channel.clone()
        };
        turned.sub_channel = rotate(&drop.sub_channel, 1.3);
        for dbw in [0.0, 20.0, 40.0] {
            for arch in Architecture::ALL {
                let a = sys.evaluate(arch, &drop, watts(dbw)).unwrap();
                let b = sys.evaluate(arch, &turned, watts(dbw)).unwrap();
                for (x, y) in a.per_user_rate.iter().zip(&b.per_user_rate) {
                    assert!((x - y).abs() <= 1e-9 * x.abs().max(1.0), "{arch}: {x} vs {y}");
                }
            }
        }
    }
}

#[test]
fn evaluators_reject_bad_power() {
    let sys = system();
    let drop = sys.realize(1).unwrap();
    for arch in Architecture::ALL {
        for p in [0.0, -1.0, f64::NAN, f64::INFINITY] {
            assert!(sys.evaluate(arch, &drop, p).is_err());
        }
    }
}
