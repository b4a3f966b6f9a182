//! Dictionary between 2+1 electrodynamics and a superfluid helium-4 film.
//!
//! Phonon velocity maps to the electric field, phonon density to the magnetic
//! field and vortices to charges:
//!
//! E1 = -v2, E2 = v1, H = -c rho / rho_bar, e = (hbar / m_atom) q
//!
//! with c = sqrt(kappa / m_atom). Film time t enters the field coordinates as
//! x0 = -c t, which turns the linearized continuity equation of the film into
//! Faraday's law.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::FieldMapRow;
use crate::geometry::{FieldStrength, MVec3};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FilmParameters {
    /// Compressibility.
    pub kappa: f64,
    pub m_atom: f64,
    pub rho_bar: f64,
    pub hbar: f64,
}

impl FilmParameters {
    /// Parameters in which every conversion constant is one.
    pub const UNIT: FilmParameters = FilmParameters { kappa: 1.0, m_atom: 1.0, rho_bar: 1.0, hbar: 1.0 };

    pub fn new(kappa: f64, m_atom: f64, rho_bar: f64, hbar: f64) -> Result<Self> {
        let p = FilmParameters { kappa, m_atom, rho_bar, hbar };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("kappa", self.kappa), ("m_atom", self.m_atom), ("rho_bar", self.rho_bar), ("hbar", self.hbar)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::invalid(format!("film parameter {name} must be positive and finite, got {v}")));
            }
        }
        if !self.c_eff().is_finite() {
            return Err(Error::invalid("film sound speed is not finite"));
        }
        Ok(())
    }

    /// Effective speed of light sqrt(kappa / m_atom).
    pub fn c_eff(&self) -> f64 {
        (self.kappa / self.m_atom).sqrt()
    }

    /// Charge carried by one quantum of circulation.
    pub fn charge_quantum(&self) -> f64 {
        self.hbar / self.m_atom
    }

    pub fn scales(&self) -> FilmScales {
        FilmScales { c_eff: self.c_eff(), charge_quantum: self.charge_quantum(), rho_bar: self.rho_bar }
    }

    /// Field coordinate x0 of film time t.
    pub fn time_to_x0(&self, t: f64) -> f64 {
        -self.c_eff() * t
    }

    pub fn x0_to_time(&self, x0: f64) -> f64 {
        -x0 / self.c_eff()
    }
}

/// Scale factors relating film units to the nondimensional field units.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FilmScales {
    pub c_eff: f64,
    pub charge_quantum: f64,
    pub rho_bar: f64,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct FilmState {
    pub v1: f64,
    pub v2: f64,
    /// Phonon density.
    pub rho: f64,
    /// Vortex density.
    pub rho_v: f64,
    pub jv1: f64,
    pub jv2: f64,
}

impl FilmState {
    pub fn is_finite(&self) -> bool {
        [self.v1, self.v2, self.rho, self.rho_v, self.jv1, self.jv2].iter().all(|v| v.is_finite())
    }
}

/// Field, charge density and current of a film state.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct EmSources {
    pub field: FieldStrength,
    pub charge_density: f64,
    pub current: [f64; 2],
}

pub fn film_to_em(fs: &FilmState, p: &FilmParameters) -> EmSources {
    let c = p.c_eff();
    let q = p.charge_quantum();
    EmSources {
        field: FieldStrength::new(-fs.v2, fs.v1, -c * fs.rho / p.rho_bar),
        charge_density: q * fs.rho_v,
        current: [q * fs.jv1, q * fs.jv2],
    }
}

pub fn em_to_film(em: &EmSources, p: &FilmParameters) -> FilmState {
    let c = p.c_eff();
    let q = p.charge_quantum();
    FilmState {
        v1: em.field.e2,
        v2: -em.field.e1,
        rho: -em.field.h * p.rho_bar / c,
        rho_v: em.charge_density / q,
        jv1: em.current[0] / q,
        jv2: em.current[1] / q,
    }
}

/// Effective charge of a vortex with winding number `q_v`.
///
/// Only |q_v| = 1 vortices are thermodynamically stable; other values are
/// accepted with a warning.
pub fn vorticity_to_charge(q_v: i32, p: &FilmParameters) -> f64 {
    if q_v.abs() > 1 {
        log::warn!("vortex winding {q_v} is not thermodynamically stable");
    }
    p.charge_quantum() * f64::from(q_v)
}

/// Residual of the linearized film continuity equation d(rho)/dt + rho_bar div v
/// at film time `t` and position (x1, x2), by central differences.
pub fn continuity_residual<F>(state: F, p: &FilmParameters, t: f64, x1: f64, x2: f64, h: f64) -> f64
where
    F: Fn(f64, f64, f64) -> FilmState,
{
    let ht = h / p.c_eff();
    let drho = (state(t + ht, x1, x2).rho - state(t - ht, x1, x2).rho) / (2.0 * ht);
    let dv1 = (state(t, x1 + h, x2).v1 - state(t, x1 - h, x2).v1) / (2.0 * h);
    let dv2 = (state(t, x1, x2 + h).v2 - state(t, x1, x2 - h).v2) / (2.0 * h);
    drho + p.rho_bar * (dv1 + dv2)
}

/// Film state at a field point, for a film defined on (t, x1, x2).
pub fn film_field<'a, F>(state: F, p: &'a FilmParameters) -> impl Fn(MVec3) -> Result<FieldStrength> + 'a
where
    F: Fn(f64, f64, f64) -> FilmState + 'a,
{
    move |x: MVec3| Ok(film_to_em(&state(p.x0_to_time(x.t), x.x, x.y), p).field)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FilmRow {
    pub x: MVec3,
    pub v1: f64,
    pub v2: f64,
    pub rho: f64,
}

/// Convert field-map rows to film rows (sources are not part of a field map).
pub fn field_rows_to_film(rows: &[FieldMapRow], p: &FilmParameters) -> Vec<FilmRow> {
    rows.iter()
        .map(|r| {
            let fs = em_to_film(&EmSources { field: r.field, ..Default::default() }, p);
            FilmRow { x: r.x, v1: fs.v1, v2: fs.v2, rho: fs.rho }
        })
        .collect()
}

pub fn film_rows_to_field(rows: &[FilmRow], p: &FilmParameters) -> Vec<FieldMapRow> {
    rows.iter()
        .map(|r| {
            let fs = FilmState { v1: r.v1, v2: r.v2, rho: r.rho, ..Default::default() };
            FieldMapRow { x: r.x, field: film_to_em(&fs, p).field, quad_error: 0.0 }
        })
        .collect()
}

pub fn write_film_csv(rows: &[FilmRow], path: &Path) -> Result<()> {
    let mut out = BufWriter::new(File::create(path)?);
    writeln!(out, "x0,x1,x2,v1,v2,rho")?;
    for r in rows {
        writeln!(out, "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}", r.x.t, r.x.x, r.x.y, r.v1, r.v2, r.rho)?;
    }
    out.flush()?;
    Ok(())
}

pub fn read_film_csv(path: &Path) -> Result<Vec<FilmRow>> {
    let mut rdr = csv::Reader::from_path(path)?;
    let mut rows = Vec::new();
    for rec in rdr.records() {
        let rec = rec?;
        let mut v = [0.0; 6];
        for (k, slot) in v.iter_mut().enumerate() {
            *slot = rec
                .get(k)
                .ok_or_else(|| Error::invalid("film row has fewer than 6 columns"))?
                .trim()
                .parse()
                .map_err(|e| Error::invalid(format!("bad number in film csv: {e}")))?;
        }
        rows.push(FilmRow { x: MVec3::new(v[0], v[1], v[2]), v1: v[3], v2: v[4], rho: v[5] });
    }
    Ok(rows)
}
