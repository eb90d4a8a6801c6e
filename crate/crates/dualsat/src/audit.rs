//! Link-budget audit against the nominal Ka-band figures.

use std::fmt::Write;

use dualsat_core::channel::LinkBudget;

use crate::error::Result;

/// One audited quantity with its reference value and tolerance.
#[derive(Debug, Clone, PartialEq)]
pub struct AuditLine {
    pub name: &'static str,
    pub unit: &'static str,
    pub computed: f64,
    pub reference: f64,
    pub tolerance: f64,
}

impl AuditLine {
    pub fn passes(&self) -> bool {
        (self.computed - self.reference).abs() <= self.tolerance
    }
}

pub fn link_budget_audit(budget: &LinkBudget) -> Result<Vec<AuditLine>> {
    let a = budget.audit()?;
    let line = |name, unit, computed, reference, tolerance| AuditLine {
        name,
        unit,
        computed,
        reference,
        tolerance,
    };
    Ok(vec![
        line("path loss", "dB", a.path_loss_db, 210.0, 0.2),
        line("noise power", "dBW", a.noise_power_dbw, -118.0, 0.2),
        line("carrier power", "dBW", a.carrier_power_dbw, -103.0, 0.5),
        line("C/N", "dB", a.carrier_to_noise_db, 15.0, 0.5),
        line("transmit power per beam", "W", a.transmit_power_per_beam_w, 17.38, 0.1),
    ])
}

pub fn render(lines: &[AuditLine]) -> String {
    let mut s = String::new();
    writeln!(
        s,
        "{:<26} {:>12} {:>10} {:>6}  status",
        "quantity", "computed", "reference", "tol"
    )
    .unwrap();
    for l in lines {
        writeln!(
            s,
            "{:<26} {:>8.3} {:<3} {:>10.2} {:>6.2}  {}",
            l.name,
            l.computed,
            l.unit,
            l.reference,
            l.tolerance,
            if l.passes() { "ok" } else { "FAIL" }
        )
        .unwrap();
    }
    s
}
