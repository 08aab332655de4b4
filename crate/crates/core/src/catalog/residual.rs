use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::gbranch::{Jet, WaveProfile};
use crate::reduction::{Equation, PdeSpec};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Axis {
    pub min: f64,
    pub max: f64,
    pub count: usize,
}

impl Axis {
    pub fn new(min: f64, max: f64, count: usize) -> Result<Self> {
        if count < 2 {
            return Err(Error::Usage(format!(
                "axis needs at least 2 points, got {count}"
            )));
        }
        if !(min < max) {
            return Err(Error::Usage(format!(
                "axis range must increase, got {min}..{max}"
            )));
        }
        Ok(Axis { min, max, count })
    }

    pub fn at(&self, i: usize) -> f64 {
        self.min + (self.max - self.min) * i as f64 / (self.count - 1) as f64
    }

    pub fn values(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.count).map(|i| self.at(i))
    }
}

/// Rectangular sampling grid over `x`, `t` and optionally `y`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Grid {
    pub x: Axis,
    pub t: Axis,
    pub y: Option<Axis>,
}

impl Grid {
    /// 64 x 64 over `x in [-10, 10]`, `t in [0, 4]`; KP adds 32 points of `y in [-5, 5]`.
    pub fn default_for(equation: Equation) -> Grid {
        Grid {
            x: Axis {
                min: -10.0,
                max: 10.0,
                count: 64,
            },
            t: Axis {
                min: 0.0,
                max: 4.0,
                count: 64,
            },
            y: (equation.spatial_dims() > 1).then_some(Axis {
                min: -5.0,
                max: 5.0,
                count: 32,
            }),
        }
    }

    /// `x=min:max:n[,t=..][,y=..]`, overriding the defaults for `equation`.
    pub fn parse(spec: &str, equation: Equation) -> Result<Grid> {
        let mut g = Grid::default_for(equation);
        for part in spec.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            let (name, range) = part
                .split_once('=')
                .ok_or_else(|| Error::Usage(format!("grid axis `{part}` is not name=min:max:n")))?;
            let f: Vec<&str> = range.split(':').collect();
            if f.len() != 3 {
                return Err(Error::Usage(format!(
                    "grid axis `{part}` is not name=min:max:n"
                )));
            }
            let num = |s: &str| {
                s.trim()
                    .parse::<f64>()
                    .map_err(|_| Error::Usage(format!("bad number `{s}` in grid")))
            };
            let count = f[2]
                .trim()
                .parse::<usize>()
                .map_err(|_| Error::Usage(format!("bad count `{}` in grid", f[2])))?;
            let axis = Axis::new(num(f[0])?, num(f[1])?, count)?;
            match name.trim() {
                "x" => g.x = axis,
                "t" => g.t = axis,
                "y" if equation.spatial_dims() > 1 => g.y = Some(axis),
                other => {
                    return Err(Error::Usage(format!(
                        "unknown grid axis `{other}` for {equation}"
                    )))
                }
            }
        }
        Ok(g)
    }

    pub fn len(&self) -> usize {
        self.x.count * self.t.count * self.y.map_or(1, |y| y.count)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Points ordered by `y`, then `x`, then `t` (innermost).
    pub fn points(&self) -> Vec<[f64; 3]> {
        let ys: Vec<f64> = self.y.map_or(vec![0.0], |a| a.values().collect());
        let mut out = Vec::with_capacity(self.len());
        for &y in &ys {
            for x in self.x.values() {
                for t in self.t.values() {
                    out.push([x, t, y]);
                }
            }
        }
        out
    }
}

/// The PDE operator with numeric coefficients.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PdeOperator {
    pub equation: Equation,
    /// `alpha` for Burgers and KdV.
    pub alpha: f64,
    /// `beta` for Burgers, `gamma` for KdV.
    pub dispersion: f64,
    pub sigma2: f64,
}

/// Derivatives the operators need, indexed by `(x, t, y)` orders.
const NEEDED: [[usize; 3]; 8] = [
    [0, 0, 0],
    [1, 0, 0],
    [0, 1, 0],
    [2, 0, 0],
    [3, 0, 0],
    [1, 1, 0],
    [4, 0, 0],
    [0, 0, 2],
];

impl PdeOperator {
    pub fn new(spec: &PdeSpec, bindings: &BTreeMap<String, f64>) -> Result<Self> {
        let get = |n: &str| {
            bindings
                .get(n)
                .copied()
                .ok_or_else(|| Error::Usage(format!("parameter `{n}` is not bound")))
        };
        Ok(match spec.equation {
            Equation::Burgers => PdeOperator {
                equation: spec.equation,
                alpha: get("alpha")?,
                dispersion: get("beta")?,
                sigma2: 0.0,
            },
            Equation::Kdv => PdeOperator {
                equation: spec.equation,
                alpha: get("alpha")?,
                dispersion: get("gamma")?,
                sigma2: 0.0,
            },
            Equation::Kp => PdeOperator {
                equation: spec.equation,
                alpha: 6.0,
                dispersion: 1.0,
                sigma2: spec.sigma2 as f64,
            },
        })
    }

    pub fn order(&self) -> usize {
        match self.equation {
            Equation::Burgers => 2,
            Equation::Kdv => 3,
            Equation::Kp => 4,
        }
    }

    /// Operator terms from `d[i]`, the derivative with orders `NEEDED[i]`.
    fn terms(&self, d: &[f64; 8]) -> Vec<f64> {
        let [u, ux, ut, uxx, uxxx, utx, uxxxx, uyy] = *d;
        match self.equation {
            Equation::Burgers => vec![ut, self.alpha * u * ux, self.dispersion * uxx],
            Equation::Kdv => vec![ut, self.alpha * u * ux, self.dispersion * uxxx],
            Equation::Kp => vec![
                utx,
                6.0 * ux * ux,
                6.0 * u * uxx,
                uxxxx,
                3.0 * self.sigma2 * uyy,
            ],
        }
    }
}

/// `|sum| / (1 + max |term|)`.
fn relative(terms: &[f64]) -> f64 {
    let sum: f64 = terms.iter().sum();
    let scale = terms.iter().fold(0.0f64, |m, t| m.max(t.abs()));
    sum.abs() / (1.0 + scale)
}

/// Jet derivatives at a point, or `None` at a pole.
fn jet_derivatives(op: &PdeOperator, u: &dyn WaveProfile, p: [f64; 3]) -> Result<Option<[f64; 8]>> {
    let n = op.order();
    let jet = match u.profile(u.xi(p), n) {
        Ok(j) => j,
        Err(Error::Pole { .. }) => return Ok(None),
        Err(e) => return Err(e),
    };
    let w = u.wave();
    let mut d = [0.0; 8];
    for (slot, ord) in d.iter_mut().zip(NEEDED) {
        let k: usize = ord.iter().sum();
        if k <= n {
            let scale: f64 = (0..3).map(|a| w[a].powi(ord[a] as i32)).product();
            *slot = scale * jet.derivative(k);
        }
    }
    Ok(Some(d))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResidualStats {
    /// `None` when some point is not real.
    pub max_residual: Option<f64>,
    pub argmax: Option<[f64; 3]>,
    pub points: usize,
    pub poles: usize,
    pub nonreal: usize,
}

/// Maximum over non-pole grid points of `|op u| / (1 + max |term|)`.
pub fn residual_max(
    op: &PdeOperator,
    u: &(dyn WaveProfile + Sync),
    grid: &Grid,
) -> Result<ResidualStats> {
    // evaluated in parallel, reduced in grid order
    let values: Vec<Option<f64>> = grid
        .points()
        .into_par_iter()
        .map(|p| Ok(jet_derivatives(op, u, p)?.map(|d| relative(&op.terms(&d)))))
        .collect::<Result<_>>()?;
    let mut best: Option<(f64, [f64; 3])> = None;
    let (mut points, mut poles, mut nonreal) = (0, 0, 0);
    for (p, r) in grid.points().into_iter().zip(values) {
        let Some(r) = r else {
            poles += 1;
            continue;
        };
        points += 1;
        if !r.is_finite() {
            nonreal += 1;
            continue;
        }
        if best.is_none_or(|(b, _)| r > b) {
            best = Some((r, p));
        }
    }
    if points == 0 {
        return Err(Error::EmptyGrid);
    }
    Ok(ResidualStats {
        max_residual: if nonreal > 0 { None } else { best.map(|b| b.0) },
        argmax: best.map(|b| b.1),
        points,
        poles,
        nonreal,
    })
}

const D1: [(i32, f64); 6] = [
    (-3, -1.0 / 60.0),
    (-2, 3.0 / 20.0),
    (-1, -0.75),
    (1, 0.75),
    (2, -3.0 / 20.0),
    (3, 1.0 / 60.0),
];
const D2: [(i32, f64); 7] = [
    (-3, 1.0 / 90.0),
    (-2, -3.0 / 20.0),
    (-1, 1.5),
    (0, -49.0 / 18.0),
    (1, 1.5),
    (2, -3.0 / 20.0),
    (3, 1.0 / 90.0),
];
const D3: [(i32, f64); 8] = [
    (-4, -7.0 / 240.0),
    (-3, 0.3),
    (-2, -169.0 / 120.0),
    (-1, 61.0 / 30.0),
    (1, -61.0 / 30.0),
    (2, 169.0 / 120.0),
    (3, -0.3),
    (4, 7.0 / 240.0),
];
const D4: [(i32, f64); 9] = [
    (-4, 7.0 / 240.0),
    (-3, -0.4),
    (-2, 169.0 / 60.0),
    (-1, -122.0 / 15.0),
    (0, 91.0 / 8.0),
    (1, -122.0 / 15.0),
    (2, 169.0 / 60.0),
    (3, -0.4),
    (4, 7.0 / 240.0),
];

fn stencil(order: usize) -> &'static [(i32, f64)] {
    match order {
        1 => &D1,
        2 => &D2,
        3 => &D3,
        _ => &D4,
    }
}

/// Check points closer than this to a pole (in `xi`) are not differenced:
/// rounding in the vanishing denominator swamps any stencil there.
pub const NEAR_POLE: f64 = 1e-3;

/// Distance scale for the difference step. The plain root test shrinks like
/// `d^(1 + p/k)` next to a pole of order `p` at distance `d`; ratios of
/// coefficients four orders apart track `d` itself.
fn step_radius(j: &Jet) -> f64 {
    let c = j.coeffs();
    let ratio = (c.len() / 2 + 1..c.len())
        .filter(|&k| c[k] != 0.0 && c[k - 4] != 0.0)
        .map(|k| (c[k - 4] / c[k]).abs().powf(0.25))
        .fold(f64::INFINITY, f64::min);
    ratio.max(j.radius_estimate())
}

/// Sixth-order central differences of point values for the derivatives in `NEEDED`.
fn fd_derivatives(op: &PdeOperator, u: &dyn WaveProfile, p: [f64; 3]) -> Result<Option<[f64; 8]>> {
    let w = u.wave();
    // step from the local convergence radius of the profile
    let rho = match u.profile(u.xi(p), 8) {
        Ok(j) => step_radius(&j),
        Err(Error::Pole { .. }) => return Ok(None),
        Err(e) => return Err(e),
    };
    if rho < NEAR_POLE {
        return Ok(None);
    }
    let h: [f64; 3] = std::array::from_fn(|a| {
        // truncation of a k-th derivative grows like (k+6)!/k! (h/rho)^6
        let base = (rho / 64.0).min(0.05);
        if w[a] == 0.0 {
            0.05
        } else {
            base / w[a].abs().max(1e-300)
        }
    });
    // offsets are added to xi(p) directly: forming xi at each shifted point
    // loses digits to cancellation when the wave coefficients are large
    let xi0 = u.xi(p);
    let val = |o: [f64; 3]| -> Result<Option<f64>> {
        let xi = xi0 + (w[0] * o[0] + w[1] * o[1] + w[2] * o[2]);
        match u.profile(xi, 0).map(|j| j.value()) {
            Ok(v) => Ok(Some(v)),
            Err(Error::Pole { .. }) => Ok(None),
            Err(e) => Err(e),
        }
    };
    let mut d = [0.0; 8];
    for (slot, ord) in d.iter_mut().zip(NEEDED) {
        let k: usize = ord.iter().sum();
        if k > op.order() {
            continue;
        }
        let axes: Vec<usize> = (0..3).filter(|&a| ord[a] > 0).collect();
        *slot = match axes.as_slice() {
            [] => match val([0.0; 3])? {
                Some(v) => v,
                None => return Ok(None),
            },
            [a] => {
                let a = *a;
                let mut s = 0.0;
                for &(i, c) in stencil(ord[a]) {
                    let mut o = [0.0; 3];
                    o[a] = i as f64 * h[a];
                    match val(o)? {
                        Some(v) => s += c * v,
                        None => return Ok(None),
                    }
                }
                s / h[a].powi(ord[a] as i32)
            }
            [a, b] => {
                let (a, b) = (*a, *b);
                let mut s = 0.0;
                for &(i, ci) in stencil(ord[a]) {
                    for &(j, cj) in stencil(ord[b]) {
                        let mut o = [0.0; 3];
                        o[a] = i as f64 * h[a];
                        o[b] = j as f64 * h[b];
                        match val(o)? {
                            Some(v) => s += ci * cj * v,
                            None => return Ok(None),
                        }
                    }
                }
                s / (h[a].powi(ord[a] as i32) * h[b].powi(ord[b] as i32))
            }
            _ => unreachable!("at most two axes in the operators"),
        };
    }
    Ok(Some(d))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FdCheck {
    pub points: usize,
    /// Check points at or next to a pole.
    pub skipped: usize,
    /// Largest `|op_fd - op_jet| / (1 + max |jet term|)`; `None` if nothing was comparable.
    pub max_delta: Option<f64>,
    /// Points where either evaluation is not real (both must agree on that).
    pub nonreal: usize,
    pub nonreal_mismatch: usize,
}

/// Recompute the residual by finite differences at the argmax point and at
/// up to `budget` evenly strided grid points.
pub fn fd_cross_check(
    op: &PdeOperator,
    u: &(dyn WaveProfile + Sync),
    grid: &Grid,
    argmax: Option<[f64; 3]>,
    budget: usize,
) -> Result<FdCheck> {
    let pts = grid.points();
    let stride = pts.len().div_ceil(budget.max(1)).max(1);
    let mut check: Vec<[f64; 3]> = argmax.into_iter().collect();
    check.extend(pts.iter().step_by(stride).copied());
    let mut out = FdCheck {
        points: 0,
        skipped: 0,
        max_delta: None,
        nonreal: 0,
        nonreal_mismatch: 0,
    };
    for p in check {
        let (Some(dj), Some(df)) = (jet_derivatives(op, u, p)?, fd_derivatives(op, u, p)?) else {
            out.skipped += 1;
            continue;
        };
        let tj = op.terms(&dj);
        let tf = op.terms(&df);
        let rj = relative(&tj);
        let rf = relative(&tf);
        out.points += 1;
        if !rj.is_finite() || !rf.is_finite() {
            out.nonreal += 1;
            if rj.is_finite() != rf.is_finite() {
                out.nonreal_mismatch += 1;
            }
            continue;
        }
        let scale = 1.0 + tj.iter().fold(0.0f64, |m, t| m.max(t.abs()));
        let delta = (tj.iter().sum::<f64>() - tf.iter().sum::<f64>()).abs() / scale;
        out.max_delta = Some(out.max_delta.map_or(delta, |m: f64| m.max(delta)));
    }
    Ok(out)
}
