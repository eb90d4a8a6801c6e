//! Illumination patterns for beam hopping and the secondary interference cap.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use serde::{Deserialize, Serialize};

use crate::channel::{distance, BeamLayout};
use crate::error::{invalid, Error, Result};
use crate::linalg::CMatrix;

/// Periodic schedule of active beams.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SlotPattern {
    pub period: usize,
    /// Active beam indices per slot, ascending.
    pub active_sets: Vec<Vec<usize>>,
    pub slot_duration: f64,
}

impl SlotPattern {
    /// Whether every beam `0..beams` is active in exactly one slot.
    pub fn is_partition(&self, beams: usize) -> bool {
        let mut count = vec![0usize; beams];
        for set in &self.active_sets {
            for &b in set {
                match count.get_mut(b) {
                    Some(c) => *c += 1,
                    None => return false,
                }
            }
        }
        count.iter().all(|&c| c == 1)
    }

    /// Fraction of the period during which `beam` is lit.
    pub fn illumination_fraction(&self, beam: usize) -> f64 {
        let lit = self.active_sets.iter().filter(|s| s.contains(&beam)).count();
        lit as f64 / self.period as f64
    }

    pub fn is_active(&self, slot: usize, beam: usize) -> bool {
        self.active_sets[slot].binary_search(&beam).is_ok()
    }
}

/// One line per slot: `slot<TAB>beam,beam,...`.
impl fmt::Display for SlotPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "slot\tactive_beams")?;
        for (s, set) in self.active_sets.iter().enumerate() {
            write!(f, "{s}\t")?;
            for (i, b) in set.iter().enumerate() {
                if i > 0 {
                    f.write_str(",")?;
                }
                write!(f, "{b}")?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

fn adjacency(layout: &BeamLayout) -> Vec<Vec<usize>> {
    let k = layout.beams_count();
    (0..k)
        .map(|a| (0..k).filter(|&b| layout.adjacent(a, b)).collect())
        .collect()
}

/// Exact k-coloring by backtracking, visiting vertices in DSatur order.
fn color_graph(adj: &[Vec<usize>], colors: usize) -> Option<Vec<usize>> {
    fn pick(adj: &[Vec<usize>], color: &[Option<usize>]) -> Option<usize> {
        let mut best: Option<(usize, usize, usize)> = None;
        for v in 0..adj.len() {
            if color[v].is_some() {
                continue;
            }
            let mut seen: Vec<usize> = adj[v].iter().filter_map(|&u| color[u]).collect();
            seen.sort_unstable();
            seen.dedup();
            let key = (seen.len(), adj[v].len());
            if best.is_none_or(|(_, s, d)| key > (s, d)) {
                best = Some((v, key.0, key.1));
            }
        }
        best.map(|(v, _, _)| v)
    }
    fn solve(adj: &[Vec<usize>], color: &mut Vec<Option<usize>>, colors: usize) -> bool {
        let Some(v) = pick(adj, color) else { return true };
        for c in 0..colors {
            if adj[v].iter().all(|&u| color[u] != Some(c)) {
                color[v] = Some(c);
                if solve(adj, color, colors) {
                    return true;
                }
                color[v] = None;
            }
        }
        false
    }
    let mut color = vec![None; adj.len()];
    if solve(adj, &mut color, colors) {
        Some(color.into_iter().map(|c| c.unwrap_or(0)).collect())
    } else {
        None
    }
}

/// Primary beam-hopping pattern: one color class of the beam adjacency graph
/// per slot, so no two overlapping beams are lit together. Slots are ordered
/// by their lowest beam index. A reuse of one lights every beam in a single slot.
pub fn primary_pattern(layout: &BeamLayout, slot_reuse: usize) -> Result<SlotPattern> {
    let k = layout.beams_count();
    if slot_reuse == 0 {
        return Err(invalid("slot_reuse", "must be at least 1"));
    }
    if slot_reuse > k {
        return Err(invalid("slot_reuse", "cannot exceed the number of beams"));
    }
    let mut classes = if slot_reuse == 1 {
        vec![(0..k).collect::<Vec<_>>()]
    } else {
        let color = color_graph(&adjacency(layout), slot_reuse).ok_or(Error::NotColorable { colors: slot_reuse })?;
        let mut classes = vec![Vec::new(); slot_reuse];
        for (b, c) in color.into_iter().enumerate() {
            classes[c].push(b);
        }
        // Moving a beam into an empty class never breaks the coloring.
        while let Some(empty) = classes.iter().position(|c| c.is_empty()) {
            let donor = (0..slot_reuse)
                .filter(|&c| classes[c].len() > 1)
                .max_by_key(|&c| (classes[c].len(), usize::MAX - c))
                .expect("slot_reuse <= beams leaves a class with two beams");
            let beam = classes[donor].pop().expect("donor class is non-empty");
            classes[empty].push(beam);
        }
        classes
    };
    for c in &mut classes {
        c.sort_unstable();
    }
    classes.sort_by_key(|c| c[0]);
    Ok(SlotPattern {
        period: slot_reuse,
        active_sets: classes,
        slot_duration: 1.0,
    })
}

/// Parent primary beam of each secondary beam (nearest center).
pub fn parent_beams(primary_layout: &BeamLayout, secondary_layout: &BeamLayout) -> Result<Vec<usize>> {
    secondary_layout
        .beam_centers
        .iter()
        .enumerate()
        .map(|(b, c)| {
            let p = primary_layout.nearest_beam(*c).ok_or(Error::OrphanBeam { beam: b })?;
            if distance(*c, primary_layout.beam_centers[p]) > primary_layout.beam_radius_3db {
                Err(Error::OrphanBeam { beam: b })
            } else {
                Ok(p)
            }
        })
        .collect()
}

/// Secondary pattern that avoids the primary: a sub-beam is lit in every slot
/// where its parent is dark. When more sub-beams than `beam_budget` qualify,
/// the ones farthest from any lit primary beam are kept.
pub fn secondary_pattern(
    primary: &SlotPattern,
    primary_layout: &BeamLayout,
    secondary_layout: &BeamLayout,
    beam_budget: Option<usize>,
) -> Result<SlotPattern> {
    if primary.active_sets.len() != primary.period {
        return Err(Error::PatternMismatch("slot count differs from period"));
    }
    if !primary.is_partition(primary_layout.beams_count()) {
        return Err(Error::PatternMismatch(
            "primary pattern does not partition the primary beams",
        ));
    }
    let parent = parent_beams(primary_layout, secondary_layout)?;
    let mut active_sets = Vec::with_capacity(primary.period);
    for lit in &primary.active_sets {
        let mut set: Vec<usize> = (0..parent.len()).filter(|&b| !lit.contains(&parent[b])).collect();
        if let Some(budget) = beam_budget {
            if set.len() > budget {
                let clearance = |b: usize| {
                    lit.iter()
                        .map(|&p| distance(secondary_layout.beam_centers[b], primary_layout.beam_centers[p]))
                        .fold(f64::INFINITY, f64::min)
                };
                set.sort_by(|&a, &b| clearance(b).total_cmp(&clearance(a)).then(a.cmp(&b)));
                set.truncate(budget);
                set.sort_unstable();
            }
        }
        active_sets.push(set);
    }
    Ok(SlotPattern {
        period: primary.period,
        active_sets,
        slot_duration: primary.slot_duration,
    })
}

/// Common scale factor `s <= 1` applied to the secondary feed powers so that
/// the aggregate secondary interference at every listed primary user satisfies
/// `I / N <= cap`. `channel` holds the users' gains toward the secondary beams.
pub fn secondary_power_control(
    channel: &CMatrix,
    primary_users: &[usize],
    active_beams: &[usize],
    nominal_powers: &[f64],
    noise_w: f64,
    i_over_n_cap_db: f64,
) -> Vec<f64> {
    let cap = libm::pow(10.0, i_over_n_cap_db / 10.0) * noise_w;
    let mut scale: f64 = 1.0;
    for &u in primary_users {
        let interference: f64 = active_beams
            .iter()
            .zip(nominal_powers)
            .map(|(&b, p)| p * channel[(u, b)].norm_sqr())
            .sum();
        if interference > cap {
            scale = scale.min(cap / interference);
        }
    }
    // A factor within rounding of one would otherwise shave powers on each reapplication.
    if scale >= 1.0 - 1e-12 {
        return nominal_powers.to_vec();
    }
    nominal_powers.iter().map(|p| p * scale).collect()
}
