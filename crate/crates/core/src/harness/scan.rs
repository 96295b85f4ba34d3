//! Residual scans over coordinate grids, evaluated in parallel and reduced in
//! a fixed order so that statistics do not depend on the worker count.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};
use crate::geometry::{CoordPoint, MetricParams};

/// Caps the number of scan workers.
pub const WORKERS_ENV: &str = "TAUBNUT_WORKERS";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    pub r: Vec<f64>,
    pub theta: Vec<f64>,
    pub phi: Vec<f64>,
    pub psi: Vec<f64>,
}

pub const DEFAULT_RADIAL_POINTS: usize = 24;

pub fn log_spaced(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    if count == 1 {
        return vec![lo];
    }
    let (a, b) = (lo.ln(), hi.ln());
    (0..count).map(|i| (a + (b - a) * i as f64 / (count - 1) as f64).exp()).collect()
}

pub fn lin_spaced(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    if count == 1 {
        return vec![lo];
    }
    (0..count).map(|i| lo + (hi - lo) * i as f64 / (count - 1) as f64).collect()
}

impl Grid {
    /// `r` log-spaced on `[N(1 + 10⁻³), 50N]`, five polar angles away from the
    /// poles, `φ ∈ {0, π/2}`, `ψ ∈ {0, π, 2π}`.
    pub fn default_for(params: &MetricParams) -> Grid {
        let n = params.n();
        Grid {
            r: log_spaced(n * (1.0 + 1e-3), 50.0 * n, DEFAULT_RADIAL_POINTS),
            theta: vec![PI / 6.0, PI / 3.0, PI / 2.0, 2.0 * PI / 3.0, 5.0 * PI / 6.0],
            phi: vec![0.0, PI / 2.0],
            psi: vec![0.0, PI, 2.0 * PI],
        }
    }

    /// Parses `r=LO:HI:COUNT[:log];theta=a,b,...;phi=...;psi=...`. Omitted
    /// axes keep their defaults; values may be written as multiples of `pi`
    /// (`0.5pi`, `pi/3`).
    pub fn parse(spec: &str, params: &MetricParams) -> Result<Grid> {
        let mut grid = Grid::default_for(params);
        for part in spec.split(';').map(str::trim).filter(|s| !s.is_empty()) {
            let (key, value) = part
                .split_once('=')
                .ok_or_else(|| LabError::Config(format!("grid entry `{part}` lacks `=`")))?;
            let key = key.trim();
            if key == "r" && value.contains(':') {
                let fields: Vec<&str> = value.split(':').map(str::trim).collect();
                if fields.len() < 3 || fields.len() > 4 {
                    return Err(LabError::Config(format!("radial range `{value}` is not LO:HI:COUNT[:log]")));
                }
                let lo = parse_value(fields[0])?;
                let hi = parse_value(fields[1])?;
                let count: usize =
                    fields[2].parse().map_err(|_| LabError::Config(format!("bad point count `{}`", fields[2])))?;
                let log = match fields.get(3) {
                    None | Some(&"lin") => false,
                    Some(&"log") => true,
                    Some(other) => return Err(LabError::Config(format!("unknown spacing `{other}`"))),
                };
                if count == 0 {
                    grid.r.clear();
                } else if !(lo <= hi) || (log && !(lo > 0.0)) {
                    return Err(LabError::Config(format!("invalid radial range `{value}`")));
                } else {
                    grid.r = if log { log_spaced(lo, hi, count) } else { lin_spaced(lo, hi, count) };
                }
                continue;
            }
            let values = value
                .split(',')
                .map(str::trim)
                .filter(|s| !s.is_empty())
                .map(parse_value)
                .collect::<Result<Vec<f64>>>()?;
            match key {
                "r" => grid.r = values,
                "theta" => grid.theta = values,
                "phi" => grid.phi = values,
                "psi" => grid.psi = values,
                other => return Err(LabError::Config(format!("unknown grid axis `{other}`"))),
            }
        }
        Ok(grid)
    }

    pub fn len(&self) -> usize {
        self.r.len() * self.theta.len() * self.phi.len() * self.psi.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Points in `r`-major order.
    pub fn points(&self) -> Vec<CoordPoint> {
        let mut out = Vec::with_capacity(self.len());
        for &r in &self.r {
            for &t in &self.theta {
                for &p in &self.phi {
                    for &q in &self.psi {
                        out.push(CoordPoint::new(r, t, p, q));
                    }
                }
            }
        }
        out
    }
}

fn parse_value(s: &str) -> Result<f64> {
    let bad = || LabError::Config(format!("bad grid value `{s}`"));
    let s = s.trim();
    if let Some(rest) = s.strip_suffix("pi") {
        let k = if rest.is_empty() { 1.0 } else { rest.trim_end_matches('*').parse::<f64>().map_err(|_| bad())? };
        return Ok(k * PI);
    }
    if let Some((num, den)) = s.split_once('/') {
        let den: f64 = den.parse().map_err(|_| bad())?;
        return Ok(parse_value(num)? / den);
    }
    s.parse().map_err(|_| bad())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScanStats {
    pub max: f64,
    pub mean: f64,
    pub count: usize,
    pub argmax: CoordPoint,
}

/// Worker count: the request (or the available parallelism), capped by
/// `TAUBNUT_WORKERS` when set.
pub fn worker_count(requested: Option<usize>) -> usize {
    let base = requested
        .filter(|&w| w > 0)
        .unwrap_or_else(|| std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1));
    match std::env::var(WORKERS_ENV).ok().and_then(|v| v.trim().parse::<usize>().ok()) {
        Some(cap) if cap > 0 => base.min(cap),
        _ => base,
    }
}

/// Max and mean of `residual` over the grid. The first failing point (in grid
/// order) aborts the scan with its error.
pub fn residual_scan<F>(residual: F, grid: &Grid, workers: Option<usize>) -> Result<ScanStats>
where
    F: Fn(&CoordPoint) -> Result<f64> + Sync,
{
    let points = grid.points();
    if points.is_empty() {
        return Err(LabError::EmptyGrid);
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(worker_count(workers))
        .build()
        .map_err(|e| LabError::Config(format!("thread pool: {e}")))?;
    let values: Vec<Result<f64>> = pool.install(|| points.par_iter().map(&residual).collect());
    let mut max = f64::NEG_INFINITY;
    let mut argmax = points[0];
    let mut sum = 0.0;
    for (p, v) in points.iter().zip(values) {
        let v = v?;
        if !v.is_finite() {
            return Err(LabError::NonFinite(p.r));
        }
        if v > max {
            max = v;
            argmax = *p;
        }
        sum += v;
    }
    Ok(ScanStats { max, mean: sum / points.len() as f64, count: points.len(), argmax })
}
