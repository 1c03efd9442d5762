//! Annealing schedules `Δ(s)`, `𝓔(s)` tabulated on knots in `s ∈ [0, 1]`.

use std::io::Read;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SchedulePoint {
    pub s: f64,
    pub delta: f64,
    pub eps: f64,
}

/// Piecewise-linear schedule through its knots.
#[derive(Debug, Clone, PartialEq)]
pub struct Schedule {
    points: Vec<SchedulePoint>,
}

/// Transverse and problem energy scales at one `s`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Scales {
    pub delta: f64,
    pub eps: f64,
}

impl Schedule {
    pub fn new(points: Vec<SchedulePoint>) -> Result<Self> {
        if points.len() < 2 {
            return Err(Error::contract("schedule needs at least two knots"));
        }
        if points[0].s != 0.0 || points[points.len() - 1].s != 1.0 {
            return Err(Error::contract("schedule must start at s=0 and end at s=1"));
        }
        for w in points.windows(2) {
            if !(w[1].s > w[0].s) {
                return Err(Error::contract(format!(
                    "schedule knots not strictly increasing at s={}",
                    w[1].s
                )));
            }
        }
        for p in &points {
            if !(p.delta >= 0.0 && p.eps >= 0.0 && p.delta.is_finite() && p.eps.is_finite()) {
                return Err(Error::contract(format!(
                    "negative or non-finite energy scale at s={}",
                    p.s
                )));
            }
        }
        Ok(Self { points })
    }

    /// Synthetic test schedule `Δ(s) = Δ₀(1-s)`, `𝓔(s) = 𝓔₀ s`.
    pub fn linear(delta0: f64, eps0: f64) -> Self {
        Self::new(vec![
            SchedulePoint { s: 0.0, delta: delta0, eps: 0.0 },
            SchedulePoint { s: 1.0, delta: 0.0, eps: eps0 },
        ])
        .expect("linear schedule is valid")
    }

    /// The shipped default: [`Schedule::linear`] with `Δ₀ = 𝓔₀ = 10`.
    /// Not derived from any hardware curve.
    pub fn synthetic_default() -> Self {
        Self::linear(10.0, 10.0)
    }

    /// Constant scales for every `s`.
    pub fn constant(delta: f64, eps: f64) -> Result<Self> {
        Self::new(vec![
            SchedulePoint { s: 0.0, delta, eps },
            SchedulePoint { s: 1.0, delta, eps },
        ])
    }

    pub fn points(&self) -> &[SchedulePoint] {
        &self.points
    }

    pub fn at(&self, s: f64) -> Result<Scales> {
        if !(0.0..=1.0).contains(&s) {
            return Err(Error::Domain(format!("s = {s} is outside [0, 1]")));
        }
        // first knot with knot.s >= s
        let hi = self.points.partition_point(|p| p.s < s);
        let b = self.points[hi];
        if b.s == s || hi == 0 {
            return Ok(Scales { delta: b.delta, eps: b.eps });
        }
        let a = self.points[hi - 1];
        let t = (s - a.s) / (b.s - a.s);
        Ok(Scales {
            delta: a.delta + t * (b.delta - a.delta),
            eps: a.eps + t * (b.eps - a.eps),
        })
    }

    pub fn from_csv_reader(reader: impl Read) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new()
            .trim(csv::Trim::All)
            .comment(Some(b'#'))
            .from_reader(reader);
        let headers = rdr.headers()?.clone();
        if headers.iter().collect::<Vec<_>>() != ["s", "delta", "eps"] {
            return Err(Error::Parse(format!(
                "schedule header must be `s,delta,eps`, found `{}`",
                headers.iter().collect::<Vec<_>>().join(",")
            )));
        }
        let points = rdr
            .deserialize()
            .collect::<std::result::Result<Vec<SchedulePoint>, _>>()?;
        Self::new(points)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_csv_reader(std::fs::File::open(path)?)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("s,delta,eps\n");
        for p in &self.points {
            out.push_str(&format!("{},{},{}\n", p.s, p.delta, p.eps));
        }
        out
    }
}

/// `schedule_at`: `(Δ(s), 𝓔(s))`.
pub fn schedule_at(schedule: &Schedule, s: f64) -> Result<(f64, f64)> {
    let sc = schedule.at(s)?;
    Ok((sc.delta, sc.eps))
}
