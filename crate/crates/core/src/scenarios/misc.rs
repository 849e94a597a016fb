use std::f64::consts::PI;

use super::config::ScenarioConfig;
use super::report::{num, Check, Rule, ScenarioOutput, Table};
use super::units::Dimension;
use crate::error::Result;
use crate::physcore::constants::{ELECTRON_VOLT, HBAR};
use crate::physcore::{ground_state_extent, micromotion_coefficients, TrapContext};
use crate::potential::PotentialSpec;
use crate::qprop::{make_ground_state, propagate, Drive, GridSpec, Lattice, Observables};

/// Sudden displacement of a harmonic well by Δz: the ion, left at the old
/// center, gains ½mω²Δz², all kinetic after π/(2ω), all potential after π/ω.
pub fn kick(cfg: &ScenarioConfig) -> Result<ScenarioOutput> {
    let f = cfg.quantity_or("trap", "frequency", Dimension::Frequency, "1MHz")?;
    let omega = 2.0 * PI * f;
    let max_offset = cfg.quantity_or("kick", "max_offset", Dimension::Length, "0.2um")?;
    let samples = cfg.integer_or("kick", "samples", 5)?.max(2) as usize;
    let target = cfg.quantity_or("kick", "target_energy_mev", Dimension::Dimensionless, "25")? * 1e-3 * ELECTRON_VOLT;
    let dt = cfg.quantity_or("protocol", "dt", Dimension::Time, "0.25ns")?;
    let m = cfg.species.mass;
    let a0 = ground_state_extent(&cfg.species, omega)?;
    let mut out = ScenarioOutput::default();

    let half = 1.3 * (2.0 * max_offset + 12.0 * a0);
    let k_need = max_offset / a0 + 8.0;
    let points = ((2.0 * half / a0) / (PI / (2.0 * k_need))).ceil() as usize;
    let quarter = (PI / (2.0 * omega) / dt).ceil() as usize;
    let dt = PI / (2.0 * omega) / quarter as f64;
    let lat = Lattice::new(GridSpec::new(-half, half, points.next_power_of_two().max(1024), dt, quarter)?, &cfg.species, omega)?;
    let origin = PotentialSpec::harmonic(f, 0.0)?;
    let psi0 = make_ground_state(&lat, &origin, &cfg.species)?;
    let zero_point = 0.5 * HBAR * omega;

    let mut t = Table::new(
        "kick_energy",
        &[("offset", "m"), ("analytic", "J"), ("after_quarter", "J"), ("kinetic_quarter", "J"), ("after_half", "J"), ("potential_half", "J")],
    );
    let mut worst_rel = 0.0f64;
    let mut worst_split = 0.0f64;
    let mut zero_gain = f64::NAN;
    for i in 0..samples {
        let dz = max_offset * i as f64 / (samples - 1) as f64;
        let well = PotentialSpec::harmonic(f, dz)?;
        let q = propagate(&psi0, Drive::Static(&well), None)?.final_state;
        let h = propagate(&q, Drive::Static(&well), None)?.final_state;
        let oq = Observables::of(&q, Some(&well));
        let oh = Observables::of(&h, Some(&well));
        let eq = oq.energy.unwrap_or(f64::NAN) - zero_point;
        let eh = oh.energy.unwrap_or(f64::NAN) - zero_point;
        let kinetic = (oq.var_momentum + oq.mean_momentum.powi(2)) / (2.0 * m) - zero_point / 2.0;
        let potential = 0.5 * m * omega * omega * (oh.var_position + (oh.mean_position - dz).powi(2)) - zero_point / 2.0;
        let analytic = 0.5 * m * omega * omega * dz * dz;
        t.push_numbers(&[dz, analytic, eq, kinetic, eh, potential]);
        if i == 0 {
            zero_gain = eq.abs().max(eh.abs()) / zero_point;
        } else {
            worst_rel = worst_rel.max(((eq - analytic) / analytic).abs()).max(((kinetic - analytic) / analytic).abs());
            worst_rel = worst_rel.max(((potential - analytic) / analytic).abs());
            worst_split = worst_split.max(((eq - eh) / analytic).abs());
        }
    }
    out.tables.push(t);
    out.check(Check::new("kick_zero_offset_gain", None, zero_gain, Rule::AtMost { limit: 1e-10 }));
    out.check(Check::new("kick_energy_vs_analytic", None, worst_rel, Rule::AtMost { limit: 1e-4 }));
    out.check(Check::new("kick_quarter_vs_half_total", None, worst_split, Rule::AtMost { limit: 1e-4 }));

    let mut t = Table::new("kick_energy_table", &[("energy", "eV"), ("offset", "m")]);
    for mev in [1.0, 5.0, 10.0, 20.0, 25.0, 50.0] {
        let e = mev * 1e-3 * ELECTRON_VOLT;
        t.push_numbers(&[mev * 1e-3, (2.0 * e / (m * omega * omega)).sqrt()]);
    }
    out.tables.push(t);
    out.info("offset_for_target_energy_m", num((2.0 * target / (m * omega * omega)).sqrt()));
    Ok(out)
}

pub fn micromotion(cfg: &ScenarioConfig) -> Result<ScenarioOutput> {
    let f = cfg.quantity_or("trap", "frequency", Dimension::Frequency, "1MHz")?;
    let drive = cfg.quantity_or("trap", "drive_frequency", Dimension::Frequency, "100MHz")?;
    let c2 = cfg.quantity_or("trap", "dc_curvature_v_per_m2", Dimension::Dimensionless, "8e-6")?;
    let d2 = cfg.quantity_or("trap", "rf_curvature_v_per_m2", Dimension::Dimensionless, "4")?;
    let c0 = cfg.quantity_or("protocol", "secular_amplitude", Dimension::Length, "100um")?;
    let ctx = TrapContext::new(2.0 * PI * f, 2.0 * PI * drive, c2, d2)?;
    let mut out = ScenarioOutput::default();
    let rule = Rule::within(2.5e-15, 0.15 * 2.5e-15);
    let mut t = Table::new(
        "micromotion",
        &[("a_z", "1"), ("q_z", "1"), ("beta_z", "1"), ("c0", "m"), ("c_plus2", "m"), ("c_minus2", "m"), ("status", "-")],
    );
    match micromotion_coefficients(&ctx, &cfg.species, c0) {
        Ok(m) => {
            t.push(vec![num(m.a_z), num(m.q_z), num(m.beta_z), num(m.c0), num(m.c_plus2), num(m.c_minus2), "ok".into()]);
            out.check(Check::new("micromotion_c_plus2_m", Some(10), m.c_plus2.abs(), rule));
            out.check(Check::new("micromotion_c_minus2_m", Some(10), m.c_minus2.abs(), rule));
        }
        Err(e) => {
            t.push(vec!["nan".into(); 6].into_iter().chain([e.to_string()]).collect());
            out.check(Check::errored("micromotion_c_plus2_m", Some(10), rule, &e));
            out.check(Check::errored("micromotion_c_minus2_m", Some(10), rule, &e));
        }
    }
    out.tables.push(t);
    Ok(out)
}
