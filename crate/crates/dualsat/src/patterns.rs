//! Text dump of the illumination and color patterns of a scenario.

use std::fmt::Write;

use dualsat_core::system::System;

/// Beam centers followed by the frequency colors and hopping slots.
pub fn dump(system: &System) -> String {
    let mut s = String::new();
    let layouts = [
        ("primary", &system.layout1),
        ("second satellite", &system.layout2),
        ("cognitive sub-beams", &system.sub_beams),
    ];
    for (name, l) in layouts {
        writeln!(
            s,
            "# {name} layout: {} beams, 3-dB radius {} km",
            l.beams_count(),
            l.beam_radius_3db
        )
        .unwrap();
        writeln!(s, "beam\tx_km\ty_km").unwrap();
        for (k, c) in l.beam_centers.iter().enumerate() {
            writeln!(s, "{k}\t{:.3}\t{:.3}", c.x, c.y).unwrap();
        }
        s.push('\n');
    }
    let patterns = [
        ("primary frequency colors", &system.colors1),
        ("second satellite frequency colors", &system.colors2),
        ("primary hopping", &system.primary_hops),
        ("secondary hopping", &system.secondary_hops),
    ];
    for (name, p) in patterns {
        writeln!(s, "# {name}: period {}", p.period).unwrap();
        write!(s, "{p}").unwrap();
        s.push('\n');
    }
    s
}
