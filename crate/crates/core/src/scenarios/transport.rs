use std::time::Instant;

use rayon::prelude::*;

use super::config::{GridPreset, ScenarioConfig};
use super::report::{num, Check, Rule, ScenarioOutput, Table};
use super::units::Dimension;
use crate::error::{Error, Result};
use crate::gaussian::GaussianState;
use crate::physcore::constants::HBAR;
use crate::physcore::{ground_state_extent, IonSpecies};
use crate::potential::{classical_half_period, PotentialSpec, TransitionShape, TransportProtocol};
use crate::qprop::{fock_overlap, make_ground_state, propagate, Drive, GridSpec, Lattice, Observables, Wavefunction};

/// When the catch switch fires.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CatchTiming {
    /// Classical half period of the transport well for the release point;
    /// equals π/ω for a harmonic well.
    HalfPeriod,
    /// π/ω of the transport well's central curvature.
    PiOverOmega,
}

impl CatchTiming {
    fn parse(s: &str) -> Result<Self> {
        match s {
            "half-period" => Ok(Self::HalfPeriod),
            "pi-over-omega" => Ok(Self::PiOverOmega),
            _ => Err(Error::Config(format!("protocol.catch must be \"half-period\" or \"pi-over-omega\", got {s:?}"))),
        }
    }
}

/// Throw-catch transport from −z0 to +z0 with instantaneous switches.
#[derive(Debug, Clone, PartialEq)]
pub struct TransportSetup {
    pub species: IonSpecies,
    /// Hz.
    pub transport_frequency: f64,
    /// Hz.
    pub end_frequency: f64,
    pub z0: f64,
    /// Signed lengths in m; infinities drop the term.
    pub end_l3: f64,
    pub end_l4: f64,
    pub transport_l4: f64,
    /// Target time step; shortened so an integer number of steps reaches the catch.
    pub dt: f64,
    pub catch: CatchTiming,
    /// Grid size override; `None` sizes the grid from the release energy.
    pub points: Option<usize>,
}

impl TransportSetup {
    /// Same geometry with every length (z0, L3, L4) multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            z0: self.z0 * factor,
            end_l3: self.end_l3 * factor,
            end_l4: self.end_l4 * factor,
            transport_l4: self.transport_l4 * factor,
            ..self.clone()
        }
    }

    pub fn end_well(&self) -> Result<PotentialSpec> {
        PotentialSpec::from_lengths(self.end_frequency, self.end_l3, self.end_l4, 0.0)
    }

    pub fn transport_well(&self) -> Result<PotentialSpec> {
        PotentialSpec::from_lengths(self.transport_frequency, f64::INFINITY, self.transport_l4, 0.0)
    }

    pub fn catch_time(&self) -> Result<f64> {
        let w = self.transport_well()?;
        match self.catch {
            CatchTiming::PiOverOmega => Ok(std::f64::consts::PI / w.angular_frequency()),
            CatchTiming::HalfPeriod => classical_half_period(&w, &self.species, -self.z0),
        }
    }

    pub fn protocol(&self) -> Result<TransportProtocol> {
        TransportProtocol::symmetric(
            self.end_well()?,
            self.transport_well()?,
            self.z0,
            TransitionShape::Instantaneous,
            self.catch_time()?,
            TransitionShape::Instantaneous,
        )
    }
}

/// Grid half-span (m) and power-of-two point count for a transport run: the
/// half-Nyquist wavenumber must exceed the classical momentum at the well
/// bottom plus the packet's momentum spread, and the span must hold ±z0 with
/// margins clear of the edge monitor.
pub fn auto_grid(setup: &TransportSetup) -> Result<(f64, usize)> {
    let w_t = 2.0 * std::f64::consts::PI * setup.transport_frequency;
    let a0_t = ground_state_extent(&setup.species, w_t)?;
    let transport = setup.transport_well()?;
    let release = transport.value(&setup.species, -setup.z0);
    if !(release.is_finite() && release >= 0.0) {
        return Err(Error::Domain("release point lies below the transport well bottom".into()));
    }
    // lattice units: H = k² + V/(ħω_t)
    let k_class = (release / (HBAR * w_t)).sqrt();
    let sigma_k = 0.5 * (setup.end_frequency / setup.transport_frequency).sqrt();
    let k_need = k_class + 16.0 * sigma_k + 4.0;
    let dx = std::f64::consts::PI / (2.0 * k_need);
    let stretch = (setup.transport_frequency / setup.end_frequency).sqrt().max(1.0);
    let half_span = 1.1 * (setup.z0 + 12.0 * a0_t * stretch);
    let points = ((2.0 * half_span / a0_t / dx).ceil() as usize).next_power_of_two().max(1024);
    Ok((half_span, points))
}

#[derive(Debug, Clone)]
pub struct TransportOutcome {
    /// P(n) for n = 0..=6 in the final well.
    pub fock: Vec<f64>,
    pub catch_time: f64,
    pub points: usize,
    pub steps: usize,
    pub norm_drift: f64,
    pub final_state: Wavefunction,
}

pub fn run_transport(setup: &TransportSetup) -> Result<TransportOutcome> {
    let protocol = setup.protocol()?;
    let t = protocol.total_duration();
    let (half_span, auto_points) = auto_grid(setup)?;
    let points = setup.points.unwrap_or(auto_points);
    let steps = (t / setup.dt).ceil().max(1.0) as usize;
    let grid = GridSpec::new(-half_span, half_span, points, t / steps as f64, steps)?;
    let lattice = Lattice::new(grid, &setup.species, protocol.transport_well.angular_frequency())?;
    let psi0 = make_ground_state(&lattice, &protocol.initial_well, &setup.species)?;
    let r = propagate(&psi0, Drive::Transport(&protocol), None)?;
    let fock = fock_overlap(&r.final_state, &protocol.final_well, &setup.species, 6)?;
    Ok(TransportOutcome { fock, catch_time: protocol.catch_time, points, steps, norm_drift: r.norm_drift, final_state: r.final_state })
}

/// Transport parameters shared by fig6, fig7 and throw-catch, before any
/// desk-scale reduction.
fn base_setup(cfg: &ScenarioConfig, default_catch: &str) -> Result<TransportSetup> {
    let f = cfg.quantity_or("trap", "frequency", Dimension::Frequency, "1MHz")?;
    let end_f = cfg.quantity_or("trap", "end_frequency", Dimension::Frequency, "1MHz")?;
    let mut end_l3 = cfg.quantity_or("trap", "end_l3", Dimension::Length, "140um")?;
    let end_l4 = cfg.quantity_or("trap", "end_l4", Dimension::Length, "-200um")?;
    if cfg.bool_or("trap", "drop_end_cubic", false)? {
        end_l3 = f64::INFINITY;
    }
    let transport_l4 = cfg.quantity_or("trap", "transport_l4", Dimension::Length, "-120um")?;
    let points = cfg.integer_or("grid", "points", 0)?;
    Ok(TransportSetup {
        species: cfg.species.clone(),
        transport_frequency: f,
        end_frequency: end_f,
        z0: cfg.quantity_or("protocol", "z0", Dimension::Length, "50um")?,
        end_l3,
        end_l4,
        transport_l4,
        dt: cfg.quantity_or("protocol", "dt", Dimension::Time, "360ps")?,
        catch: CatchTiming::parse(&cfg.string_or("protocol", "catch", default_catch)?)?,
        points: (points > 0).then_some(points as usize),
    })
}

/// Desk-scale reduction factor (1 for the paper preset).
fn desk_factor(cfg: &ScenarioConfig, setup: &TransportSetup) -> Result<f64> {
    let desk_z0 = cfg.quantity_or("grid", "desk_z0", Dimension::Length, "2um")?;
    Ok(match cfg.grid {
        GridPreset::Desk => desk_z0 / setup.z0,
        GridPreset::Paper => 1.0,
    })
}

fn fock_row(inv_l4: f64, sim_inv_l4: f64, r: &Result<TransportOutcome>) -> Vec<String> {
    match r {
        Ok(o) => vec![
            num(inv_l4),
            num(sim_inv_l4),
            num(o.fock[0]),
            num(o.fock[2]),
            num(o.fock[4]),
            num(o.fock[6]),
            num(o.catch_time),
            "ok".into(),
        ],
        Err(e) => {
            let mut row = vec![num(inv_l4), num(sim_inv_l4)];
            row.extend(std::iter::repeat("nan".to_string()).take(5));
            row.push(e.to_string());
            row
        }
    }
}

pub fn fig6(cfg: &ScenarioConfig) -> Result<ScenarioOutput> {
    let start = Instant::now();
    let paper = base_setup(cfg, "half-period")?;
    let factor = desk_factor(cfg, &paper)?;
    let sim = paper.scaled(factor);
    let anchor_l4 = cfg.quantity_or("check", "anchor_l4", Dimension::Length, "-120um")?;
    let alt_f = cfg.quantity_or("check", "alt_frequency", Dimension::Frequency, "0.5MHz")?;
    let sweep = cfg.sweep("inv_l4", Dimension::InverseLength, "-0.014/um", "0.014/um", 25)?;
    let mut out = ScenarioOutput::default();

    let with_l4 = |s: &TransportSetup, l4_paper: f64| TransportSetup { transport_l4: l4_paper * factor, ..s.clone() };
    let rows: Vec<(f64, Result<TransportOutcome>)> = sweep
        .values
        .par_iter()
        .map(|&inv| {
            let l4 = if inv == 0.0 { f64::INFINITY } else { 1.0 / inv };
            (inv, run_transport(&with_l4(&sim, l4)))
        })
        .collect();
    let mut table = Table::new(
        "fig6_quartic_scan",
        &[
            ("inv_l4", "1/m"),
            ("inv_l4_simulated", "1/m"),
            ("p0", "1"),
            ("p2", "1"),
            ("p4", "1"),
            ("p6", "1"),
            ("catch_time", "s"),
            ("status", "-"),
        ],
    );
    for (inv, r) in &rows {
        table.push(fock_row(*inv, inv / factor, r));
    }
    out.tables.push(table);

    let anchor_setup = with_l4(&sim, anchor_l4);
    let paper_anchor = TransportSetup { transport_l4: anchor_l4, ..paper.clone() };
    let p0_rule = Rule::within(0.90, 0.03);
    let p2_rule = Rule::within(0.10, 0.03);
    let anchor = run_transport(&anchor_setup);
    match &anchor {
        Ok(a) => {
            out.check(Check::new("fig6_anchor_p0", Some(1), a.fock[0], p0_rule));
            out.check(Check::new("fig6_anchor_p2", Some(1), a.fock[2], p2_rule));
            out.info("anchor_catch_time_s", num(a.catch_time));
            out.info("anchor_grid_points", a.points);
            out.info("anchor_steps", a.steps);
            out.info("anchor_fock_0_to_6", format!("{:?}", a.fock.iter().map(|p| (p * 1e6).round() / 1e6).collect::<Vec<_>>()));
        }
        Err(e) => {
            out.check(Check::errored("fig6_anchor_p0", Some(1), p0_rule, e));
            out.check(Check::errored("fig6_anchor_p2", Some(1), p2_rule, e));
        }
    }

    let group = |s: &TransportSetup| (s.z0 / s.transport_l4, s.z0 / s.end_l3, s.z0 / s.end_l4);
    let (g_sim, g_paper) = (group(&anchor_setup), group(&paper_anchor));
    let group_dev = [(g_sim.0, g_paper.0), (g_sim.1, g_paper.1), (g_sim.2, g_paper.2)]
        .iter()
        .map(|(a, b)| if a == b { 0.0 } else { ((a - b) / b).abs() })
        .fold(0.0, f64::max);
    out.check(Check::new("fig6_dimensionless_group", Some(1), group_dev, Rule::AtMost { limit: 1e-12 }));

    let zero = rows.iter().find(|(inv, _)| *inv == 0.0).map(|(_, r)| r.clone()).unwrap_or_else(|| run_transport(&with_l4(&sim, f64::INFINITY)));
    let rule = Rule::within(1.0, 1e-4);
    out.check(match zero {
        Ok(z) => Check::new("fig6_harmonic_point_p0", None, z.fock[0], rule),
        Err(e) => Check::errored("fig6_harmonic_point_p0", None, rule, &e),
    });

    let alt = TransportSetup { transport_frequency: alt_f, end_frequency: alt_f, ..anchor_setup.clone() };
    let rule = Rule::AtMost { limit: 0.01 };
    let alt = run_transport(&alt);
    if let Ok(b) = &alt {
        out.info("alt_frequency_anchor_p0", num(b.fock[0]));
    }
    out.check(match (&anchor, &alt) {
        (Ok(a), Ok(b)) => Check::new("fig6_frequency_independence", None, (a.fock[0] - b.fock[0]).abs(), rule),
        (Err(e), _) | (_, Err(e)) => Check::errored("fig6_frequency_independence", None, rule, e),
    });

    let elapsed = start.elapsed().as_secs_f64();
    if cfg.grid == GridPreset::Desk {
        out.check(Check::new("fig6_desk_runtime_s", Some(1), elapsed, Rule::AtMost { limit: 60.0 }));
    }

    let rule = Rule::AtMost { limit: 0.01 };
    let other = match cfg.grid {
        GridPreset::Desk if cfg.slow => Some(paper_anchor.clone()),
        GridPreset::Paper => {
            let desk_z0 = cfg.quantity_or("grid", "desk_z0", Dimension::Length, "2um")?;
            Some(paper_anchor.scaled(desk_z0 / paper.z0))
        }
        GridPreset::Desk => None,
    };
    match other {
        None => {
            out.check(Check::skipped("fig6_paper_vs_desk_p0", Some(1), rule, "full-scale run needs --slow"));
            out.check(Check::skipped("fig6_paper_vs_desk_p2", Some(1), rule, "full-scale run needs --slow"));
        }
        Some(s) => {
            let r = run_transport(&s);
            match (&anchor, &r) {
                (Ok(a), Ok(b)) => {
                    out.info("comparison_grid_points", b.points);
                    out.info("comparison_fock_0_to_6", format!("{:?}", b.fock.iter().map(|p| (p * 1e6).round() / 1e6).collect::<Vec<_>>()));
                    out.check(Check::new("fig6_paper_vs_desk_p0", Some(1), (a.fock[0] - b.fock[0]).abs(), rule));
                    out.check(Check::new("fig6_paper_vs_desk_p2", Some(1), (a.fock[2] - b.fock[2]).abs(), rule));
                }
                (Err(e), _) | (_, Err(e)) => {
                    out.check(Check::errored("fig6_paper_vs_desk_p0", Some(1), rule, e));
                    out.check(Check::errored("fig6_paper_vs_desk_p2", Some(1), rule, e));
                }
            }
        }
    }
    out.info("length_scale_factor", num(factor));
    Ok(out)
}

pub fn fig7(cfg: &ScenarioConfig) -> Result<ScenarioOutput> {
    let paper = base_setup(cfg, "half-period")?;
    let factor = desk_factor(cfg, &paper)?;
    let sim = paper.scaled(factor);
    let sweep = cfg.sweep("f_end", Dimension::Frequency, "1MHz", "3MHz", 9)?;
    let mut out = ScenarioOutput::default();

    let rows: Vec<(f64, Result<TransportOutcome>)> = sweep
        .values
        .par_iter()
        .map(|&f| (f, run_transport(&TransportSetup { end_frequency: f, ..sim.clone() })))
        .collect();
    let mut table = Table::new("fig7_frequency_scan", &[("f_end", "Hz"), ("p0", "1"), ("p2", "1"), ("status", "-")]);
    for (f, r) in &rows {
        table.push(match r {
            Ok(o) => vec![num(*f), num(o.fock[0]), num(o.fock[2]), "ok".into()],
            Err(e) => vec![num(*f), "nan".into(), "nan".into(), e.to_string()],
        });
    }
    out.tables.push(table);

    let p0: Vec<f64> = rows.iter().map(|(_, r)| r.as_ref().map(|o| o.fock[0]).unwrap_or(f64::NAN)).collect();
    let min_step = p0.windows(2).map(|w| w[1] - w[0]).fold(f64::INFINITY, f64::min);
    let min_step = if p0.iter().any(|p| p.is_nan()) { f64::NAN } else { min_step };
    out.check(Check::new("fig7_p0_monotone_min_step", None, min_step, Rule::AtLeast { limit: 0.0 }));

    // the end-well frequency equal to the transport frequency is the Fig. 6 anchor
    let same = TransportSetup { end_frequency: sim.transport_frequency, ..sim.clone() };
    let rule = Rule::AtMost { limit: 1e-12 };
    let direct = rows.iter().find(|(f, _)| *f == sim.transport_frequency);
    out.check(match (direct, &run_transport(&same)) {
        (Some((_, Ok(a))), Ok(b)) => Check::new("fig7_matches_fig6_anchor", None, (a.fock[0] - b.fock[0]).abs(), rule),
        (None, _) => Check::skipped("fig7_matches_fig6_anchor", None, rule, "sweep does not contain the transport frequency"),
        (Some((_, Err(e))), _) | (_, Err(e)) => Check::errored("fig7_matches_fig6_anchor", None, rule, e),
    });

    // ground state of a stiffer well, seen from the transport well's vacuum,
    // is a squeezed vacuum with r = ln(ω_end/ω_t)/2
    let f_end = sweep.values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let rule = Rule::AtMost { limit: 1e-8 };
    out.check(match projection_mismatch(&sim, f_end) {
        Ok(d) => Check::new("fig7_initial_state_projection", None, d, rule),
        Err(e) => Check::errored("fig7_initial_state_projection", None, rule, &e),
    });
    out.info("length_scale_factor", num(factor));
    Ok(out)
}

/// Largest relative mismatch between the propagator's ground state of a
/// harmonic well at `f_end` and the covariance of the matching squeezed vacuum.
fn projection_mismatch(sim: &TransportSetup, f_end: f64) -> Result<f64> {
    let setup = TransportSetup { end_frequency: f_end, ..sim.clone() };
    let (h, n) = auto_grid(&setup)?;
    let w_t = 2.0 * std::f64::consts::PI * sim.transport_frequency;
    let lat = Lattice::new(GridSpec::new(-h, h, n, setup.dt, 1)?, &sim.species, w_t)?;
    let well = PotentialSpec::harmonic(f_end, 0.0)?;
    let psi = make_ground_state(&lat, &well, &sim.species)?;
    let o = Observables::of(&psi, None);
    let a0 = ground_state_extent(&sim.species, w_t)?;
    let r = 0.5 * (f_end / sim.transport_frequency).ln();
    let g = GaussianState::<f64>::squeezed_vacuum(r, 0.0);
    let var_z = 2.0 * a0 * a0 * g.cov.a;
    let var_p = 2.0 * (HBAR / (2.0 * a0)).powi(2) * g.cov.d;
    Ok(((o.var_position - var_z) / var_z).abs().max(((o.var_momentum - var_p) / var_p).abs()))
}

pub fn throw_catch(cfg: &ScenarioConfig) -> Result<ScenarioOutput> {
    let start = Instant::now();
    let paper = base_setup(cfg, "pi-over-omega")?;
    let factor = desk_factor(cfg, &paper)?;
    let sim = paper.scaled(factor);
    let mut out = ScenarioOutput::default();
    let rule = Rule::AtLeast { limit: 1.0 - 1e-5 };
    let r = run_transport(&sim);
    let elapsed = start.elapsed().as_secs_f64();
    match r {
        Ok(o) => {
            out.check(Check::new("throw_catch_ground_overlap", Some(2), o.fock[0], rule));
            let protocol = sim.protocol()?;
            let g = make_ground_state(o.final_state.lattice(), &protocol.final_well, &sim.species)?;
            let fid = g.fidelity(&o.final_state)?;
            out.check(Check::new("throw_catch_overlap_routes_agree", None, (fid - o.fock[0]).abs(), Rule::AtMost { limit: 1e-10 }));
            let mut t = Table::new("throw_catch", &[("n", "1"), ("p", "1")]);
            for (n, p) in o.fock.iter().enumerate() {
                t.push(vec![n.to_string(), num(*p)]);
            }
            out.tables.push(t);
            out.info("grid_points", o.points);
            out.info("steps", o.steps);
            out.info("norm_drift", num(o.norm_drift));
        }
        Err(e) => out.check(Check::errored("throw_catch_ground_overlap", Some(2), rule, &e)),
    }
    if cfg.grid == GridPreset::Desk {
        out.check(Check::new("throw_catch_desk_runtime_s", Some(2), elapsed, Rule::AtMost { limit: 10.0 }));
    }
    Ok(out)
}
