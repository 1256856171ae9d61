//! Phase diagrams over two coupling axes.

use std::fmt::Write as _;

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use super::model::{ModelError, ModelSpec};
use super::solve::{
    global_minimizer, grid_resolution, hessian_eigenvalues, local_minimize, SolveOpts,
};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SweepError {
    #[error("sweep spec must name exactly two axes, got {0}")]
    AxisCount(usize),
    #[error("malformed sweep axis `{0}`; expected name=start:stop:step")]
    Malformed(String),
    #[error("sweep axis `{0}` has a non-positive step or an empty range")]
    EmptyRange(String),
    #[error(transparent)]
    Model(#[from] ModelError),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepAxis {
    pub name: String,
    pub values: Vec<f64>,
}

impl SweepAxis {
    /// Inclusive grid `start, start + step, …` up to `stop`.
    pub fn range(name: &str, start: f64, stop: f64, step: f64) -> Result<Self, SweepError> {
        if !(step > 0.0) || !start.is_finite() || !stop.is_finite() || stop < start {
            return Err(SweepError::EmptyRange(name.to_string()));
        }
        let n = ((stop - start) / step + 1e-9).floor() as usize + 1;
        Ok(SweepAxis {
            name: name.to_string(),
            values: (0..n).map(|i| start + step * i as f64).collect(),
        })
    }
}

/// Parses `"lam=0:2:0.01,delt=-1:1:0.01"`.
pub fn parse_sweep(spec: &str) -> Result<[SweepAxis; 2], SweepError> {
    let parts: Vec<&str> = spec
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .collect();
    if parts.len() != 2 {
        return Err(SweepError::AxisCount(parts.len()));
    }
    let axis = |s: &str| -> Result<SweepAxis, SweepError> {
        let bad = || SweepError::Malformed(s.to_string());
        let (name, range) = s.split_once('=').ok_or_else(bad)?;
        let nums: Vec<f64> = range
            .split(':')
            .map(|t| t.trim().parse::<f64>().map_err(|_| bad()))
            .collect::<Result<_, _>>()?;
        let [a, b, c] = nums[..] else {
            return Err(bad());
        };
        SweepAxis::range(name.trim(), a, b, c)
    };
    Ok([axis(parts[0])?, axis(parts[1])?])
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Phase {
    Normal,
    Paired,
    Failed,
}

impl Phase {
    pub fn as_str(&self) -> &'static str {
        match self {
            Phase::Normal => "normal",
            Phase::Paired => "paired",
            Phase::Failed => "failed",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PhaseCell {
    pub p1: f64,
    pub p2: f64,
    pub c: Vec<f64>,
    pub objective: f64,
    pub phase: Phase,
    pub first_order_edge: bool,
    pub second_order_edge: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PhaseOpts {
    pub solve: SolveOpts,
    /// `|c1|` above this is paired.
    pub label_tol: f64,
    /// Minimizer jumps larger than this many coarse-grid cells are first order.
    pub jump_cells: f64,
    pub box_override: Option<Vec<(f64, f64)>>,
}

impl Default for PhaseOpts {
    fn default() -> Self {
        PhaseOpts {
            solve: SolveOpts::default(),
            label_tol: 1e-6,
            jump_cells: 10.0,
            box_override: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PhaseSummary {
    pub axes: [String; 2],
    pub shape: [usize; 2],
    pub cells: usize,
    pub normal: usize,
    pub paired: usize,
    pub failed: usize,
    pub first_order_edges: usize,
    pub second_order_edges: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PhaseDiagram {
    pub axes: [SweepAxis; 2],
    /// Row-major: the second axis varies fastest.
    pub cells: Vec<PhaseCell>,
    #[serde(skip)]
    first_order_edges: usize,
    #[serde(skip)]
    second_order_edges: usize,
}

/// Edge classification between two adjacent solved cells.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Edge {
    None,
    FirstOrder,
    SecondOrder,
}

fn max_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

/// First order when the minimizer jumps by more than `threshold` (max norm)
/// and the two minima coexist as local minima on one side; second order when
/// only the label changes.
pub fn classify_edge(a: &PhaseCell, b: &PhaseCell, threshold: f64, coexist: bool) -> Edge {
    if a.phase == Phase::Failed || b.phase == Phase::Failed {
        return Edge::None;
    }
    if max_dist(&a.c, &b.c) > threshold && coexist {
        Edge::FirstOrder
    } else if a.phase != b.phase {
        Edge::SecondOrder
    } else {
        Edge::None
    }
}

fn cell_spec(base: &ModelSpec, axes: &[SweepAxis; 2], p1: f64, p2: f64) -> ModelSpec {
    let mut spec = *base;
    spec.set(&axes[0].name, p1).expect("axis checked");
    spec.set(&axes[1].name, p2).expect("axis checked");
    spec
}

/// Whether descent at `a`'s couplings from `b`'s minimizer stops at a distinct
/// local minimum, in either direction.
fn coexist(
    base: &ModelSpec,
    axes: &[SweepAxis; 2],
    a: &PhaseCell,
    b: &PhaseCell,
    bx: &[(f64, f64)],
    threshold: f64,
    opts: &SolveOpts,
) -> bool {
    let distinct = |own: &PhaseCell, other: &PhaseCell| {
        let spec = cell_spec(base, axes, own.p1, own.p2);
        let f = spec.as_objective();
        local_minimize(f, &other.c, bx, opts).is_some_and(|m| {
            let stable = hessian_eigenvalues(f, &m.c).iter().all(|e| *e > -1e-8);
            let mut c = m.c;
            c[0] = c[0].abs();
            stable && m.grad_norm < 1e-7 && max_dist(&c, &own.c) > 0.5 * threshold
        })
    };
    distinct(a, b) || distinct(b, a)
}

pub fn phase_diagram(
    base: &ModelSpec,
    axes: [SweepAxis; 2],
    opts: &PhaseOpts,
) -> Result<PhaseDiagram, SweepError> {
    for a in &axes {
        base.get(&a.name)?;
    }
    let bx = opts
        .box_override
        .clone()
        .unwrap_or_else(|| base.default_box());
    let (n1, n2) = (axes[0].values.len(), axes[1].values.len());
    let mut cells: Vec<PhaseCell> = (0..n1 * n2)
        .into_par_iter()
        .map(|k| {
            let (p1, p2) = (axes[0].values[k / n2], axes[1].values[k % n2]);
            let spec = cell_spec(base, &axes, p1, p2);
            let dim = spec.as_objective().dim();
            match global_minimizer(spec.as_objective(), &bx, &opts.solve) {
                Some(m) if m.objective.is_finite() => PhaseCell {
                    p1,
                    p2,
                    phase: if m.c[0].abs() > opts.label_tol {
                        Phase::Paired
                    } else {
                        Phase::Normal
                    },
                    c: m.c,
                    objective: m.objective,
                    first_order_edge: false,
                    second_order_edge: false,
                },
                _ => PhaseCell {
                    p1,
                    p2,
                    c: vec![f64::NAN; dim],
                    objective: f64::NAN,
                    phase: Phase::Failed,
                    first_order_edge: false,
                    second_order_edge: false,
                },
            }
        })
        .collect();
    let dim = base.as_objective().dim();
    let threshold = opts.jump_cells
        * grid_resolution(dim, &bx, &opts.solve)
            .into_iter()
            .fold(0.0, f64::max);
    let (mut first, mut second) = (0, 0);
    for i in 0..n1 {
        for j in 0..n2 {
            let k = i * n2 + j;
            let mut neighbours = vec![];
            if i + 1 < n1 {
                neighbours.push(k + n2);
            }
            if j + 1 < n2 {
                neighbours.push(k + 1);
            }
            for l in neighbours {
                let jump = max_dist(&cells[k].c, &cells[l].c) > threshold;
                let co = jump
                    && coexist(
                        base,
                        &axes,
                        &cells[k],
                        &cells[l],
                        &bx,
                        threshold,
                        &opts.solve,
                    );
                match classify_edge(&cells[k], &cells[l], threshold, co) {
                    Edge::FirstOrder => {
                        first += 1;
                        cells[k].first_order_edge = true;
                        cells[l].first_order_edge = true;
                    }
                    Edge::SecondOrder => {
                        second += 1;
                        cells[k].second_order_edge = true;
                        cells[l].second_order_edge = true;
                    }
                    Edge::None => {}
                }
            }
        }
    }
    Ok(PhaseDiagram {
        axes,
        cells,
        first_order_edges: first,
        second_order_edges: second,
    })
}

impl PhaseDiagram {
    pub fn cell(&self, i: usize, j: usize) -> &PhaseCell {
        &self.cells[i * self.axes[1].values.len() + j]
    }

    pub fn summary(&self) -> PhaseSummary {
        let count = |p: Phase| self.cells.iter().filter(|c| c.phase == p).count();
        PhaseSummary {
            axes: [self.axes[0].name.clone(), self.axes[1].name.clone()],
            shape: [self.axes[0].values.len(), self.axes[1].values.len()],
            cells: self.cells.len(),
            normal: count(Phase::Normal),
            paired: count(Phase::Paired),
            failed: count(Phase::Failed),
            first_order_edges: self.first_order_edges,
            second_order_edges: self.second_order_edges,
        }
    }

    /// CSV with one row per cell; `c2` is 0 for one-variable models.
    pub fn to_csv(&self) -> String {
        let mut s =
            String::from("p1,p2,c1,c2,objective,phase,first_order_edge,second_order_edge\n");
        for c in &self.cells {
            let c2 = c.c.get(1).copied().unwrap_or(0.0);
            let _ = writeln!(
                s,
                "{},{},{},{},{},{},{},{}",
                c.p1,
                c.p2,
                c.c[0],
                c2,
                c.objective,
                c.phase.as_str(),
                c.first_order_edge as u8,
                c.second_order_edge as u8
            );
        }
        s
    }
}
