use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;
use std::sync::Arc;

use num_complex::Complex;

use super::lattice::{GridSpec, Lattice, OscillatorUnits};
use super::propagate::TracePoint;
use super::Wavefunction;
use crate::error::{ensure, Error, Result};
use crate::scalar::{lit, Real};

pub const SNAPSHOT_MAGIC: &[u8; 4] = b"ITWF";
pub const SNAPSHOT_VERSION: u32 = 1;

fn csv_err(e: csv::Error) -> Error {
    Error::Io(e.to_string())
}

fn header(w: &mut impl Write, meta: &[(&str, String)]) -> Result<()> {
    for (k, v) in meta {
        writeln!(w, "# {k}: {v}")?;
    }
    Ok(())
}

/// Writes z, Re ψ, Im ψ (SI normalization) as CSV.
pub fn write_wavefunction_csv<T: Real>(psi: &Wavefunction<T>, path: &Path) -> Result<()> {
    let mut f = BufWriter::new(File::create(path)?);
    let g = psi.lattice().grid();
    header(&mut f, &[("points", g.points.to_string()), ("z_min", format!("{:e}", g.z_min)), ("z_max", format!("{:e}", g.z_max))])?;
    let mut w = csv::Writer::from_writer(f);
    w.write_record(["z", "re_psi", "im_psi"]).map_err(csv_err)?;
    w.write_record(["m", "m^-1/2", "m^-1/2"]).map_err(csv_err)?;
    for j in 0..g.points {
        let c = psi.amplitude_si(j);
        w.write_record([format!("{:e}", g.z(j)), format!("{:e}", c.re), format!("{:e}", c.im)]).map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

/// Writes a propagation trace as CSV.
pub fn write_trace_csv(trace: &[TracePoint], path: &Path) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(csv_err)?;
    w.write_record(["t", "mean_z", "mean_p", "var_z", "var_p", "energy"]).map_err(csv_err)?;
    w.write_record(["s", "m", "kg m/s", "m^2", "(kg m/s)^2", "J"]).map_err(csv_err)?;
    for p in trace {
        w.write_record([p.t, p.mean_position, p.mean_momentum, p.var_position, p.var_momentum, p.energy].map(|v| format!("{v:e}")))
            .map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

/// Binary snapshot, little-endian:
///
/// | bytes | content |
/// |-------|---------|
/// | 4 | magic `ITWF` |
/// | 4 | u32 version |
/// | 8 | u64 points |
/// | 8×3 | f64 z_min, z_max (m), dt (s) |
/// | 8 | u64 steps |
/// | 8×2 | f64 reference ω (rad/s), ion mass (kg) |
/// | 16×points | f64 pairs (Re ψ, Im ψ), SI normalization |
pub fn write_snapshot<T: Real>(psi: &Wavefunction<T>, path: &Path) -> Result<()> {
    let mut f = BufWriter::new(File::create(path)?);
    let lat = psi.lattice();
    let g = lat.grid();
    let u = lat.units();
    f.write_all(SNAPSHOT_MAGIC)?;
    f.write_all(&SNAPSHOT_VERSION.to_le_bytes())?;
    f.write_all(&(g.points as u64).to_le_bytes())?;
    for v in [g.z_min.to_f64_lossy(), g.z_max.to_f64_lossy(), g.dt.to_f64_lossy()] {
        f.write_all(&v.to_le_bytes())?;
    }
    f.write_all(&(g.steps as u64).to_le_bytes())?;
    for v in [u.omega.to_f64_lossy(), u.mass.to_f64_lossy()] {
        f.write_all(&v.to_le_bytes())?;
    }
    for j in 0..g.points {
        let c = psi.amplitude_si(j);
        f.write_all(&c.re.to_f64_lossy().to_le_bytes())?;
        f.write_all(&c.im.to_f64_lossy().to_le_bytes())?;
    }
    f.flush()?;
    Ok(())
}

fn read_u64(r: &mut impl Read) -> Result<u64> {
    let mut b = [0u8; 8];
    r.read_exact(&mut b)?;
    Ok(u64::from_le_bytes(b))
}

fn read_f64(r: &mut impl Read) -> Result<f64> {
    let mut b = [0u8; 8];
    r.read_exact(&mut b)?;
    Ok(f64::from_le_bytes(b))
}

/// Reads a snapshot written by [`write_snapshot`].
pub fn read_snapshot<T: Real>(path: &Path) -> Result<Wavefunction<T>> {
    let mut r = BufReader::new(File::open(path)?);
    let mut magic = [0u8; 4];
    r.read_exact(&mut magic)?;
    ensure!(&magic == SNAPSHOT_MAGIC, Input, "{}: not a wavefunction snapshot", path.display());
    let mut vb = [0u8; 4];
    r.read_exact(&mut vb)?;
    let version = u32::from_le_bytes(vb);
    ensure!(version == SNAPSHOT_VERSION, Input, "unsupported snapshot version {version}");
    let points = read_u64(&mut r)? as usize;
    let (z_min, z_max, dt) = (read_f64(&mut r)?, read_f64(&mut r)?, read_f64(&mut r)?);
    let steps = read_u64(&mut r)? as usize;
    let (omega, mass) = (read_f64(&mut r)?, read_f64(&mut r)?);
    let grid = GridSpec::new(lit(z_min), lit(z_max), points, lit(dt), steps)?;
    let a0 = (crate::physcore::constants::HBAR / (2.0 * mass * omega)).sqrt();
    let units = OscillatorUnits { length: lit(a0), omega: lit(omega), mass: lit(mass) };
    let lattice: Arc<Lattice<T>> = Lattice::with_units(grid, units)?;
    let s = a0.sqrt();
    let mut amps = Vec::with_capacity(points);
    for _ in 0..points {
        let (re, im) = (read_f64(&mut r)?, read_f64(&mut r)?);
        amps.push(Complex::new(lit(re * s), lit(im * s)));
    }
    Wavefunction::from_amplitudes(lattice, amps)
}
