//! Grids, value fields, and one-step backward evolution.
//!
//! All solvers advance value slices backward in time with the same explicit
//! monotone stencil: first space derivative one-sided against the drift
//! direction, second derivative central, boundary rows extended with zero
//! second derivative (linear extrapolation). Stability comes from CFL
//! substepping: a stored step `dt` is internally split into `m` substeps
//! with `dt/m` under the parabolic bound, see [`cfl_steps`].
//!
//! Three step flavors share the stencil:
//! [`hjb_step`] minimizes over the control grid per cell, [`linear_step`]
//! applies a fixed control row under a frozen scalar weight, and
//! [`semilinear_step`] applies a fixed control row with a source that may
//! read the current value (used for policy evaluation and recursive costs).

use crate::error::{Result, SolverError};
use crate::model::ProblemSpec;

// ---------------------------------------------------------------------------
// Grid and fields
// ---------------------------------------------------------------------------

/// Uniform rectangle `[x_min, x_max] × [t_start, t_end]` with `n_x` space
/// nodes and `n_t` time steps (`n_t + 1` stored rows).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Grid1D {
    x_min: f64,
    x_max: f64,
    n_x: usize,
    t_start: f64,
    t_end: f64,
    n_t: usize,
}

impl Grid1D {
    pub fn new(
        x_min: f64,
        x_max: f64,
        n_x: usize,
        t_start: f64,
        t_end: f64,
        n_t: usize,
    ) -> Result<Self> {
        if !(x_min < x_max) || !x_min.is_finite() || !x_max.is_finite() {
            return Err(SolverError::Domain(format!(
                "need x_min < x_max, got [{x_min}, {x_max}]"
            )));
        }
        if n_x < 3 {
            return Err(SolverError::Domain(format!(
                "need at least 3 space nodes, got {n_x}"
            )));
        }
        if n_t < 1 {
            return Err(SolverError::Domain("need at least one time step".into()));
        }
        if !(t_end > t_start) || !t_start.is_finite() || !t_end.is_finite() {
            return Err(SolverError::Domain(format!(
                "need t_start < t_end, got [{t_start}, {t_end}]"
            )));
        }
        Ok(Self { x_min, x_max, n_x, t_start, t_end, n_t })
    }

    pub fn x_min(&self) -> f64 {
        self.x_min
    }

    pub fn x_max(&self) -> f64 {
        self.x_max
    }

    pub fn t_start(&self) -> f64 {
        self.t_start
    }

    pub fn t_end(&self) -> f64 {
        self.t_end
    }

    pub fn n_x(&self) -> usize {
        self.n_x
    }

    pub fn n_t(&self) -> usize {
        self.n_t
    }

    /// Stored time rows, `n_t + 1`.
    pub fn rows(&self) -> usize {
        self.n_t + 1
    }

    pub fn dx(&self) -> f64 {
        (self.x_max - self.x_min) / (self.n_x - 1) as f64
    }

    pub fn dt(&self) -> f64 {
        (self.t_end - self.t_start) / self.n_t as f64
    }

    pub fn x(&self, i: usize) -> f64 {
        self.x_min + i as f64 * self.dx()
    }

    pub fn t(&self, k: usize) -> f64 {
        self.t_start + k as f64 * self.dt()
    }

    pub fn xs(&self) -> Vec<f64> {
        (0..self.n_x).map(|i| self.x(i)).collect()
    }

    /// Interior space indices (everything except the two extrapolated rows).
    pub fn interior(&self) -> std::ops::Range<usize> {
        1..self.n_x - 1
    }

    /// Central 60% of the space nodes. The boundary extrapolation confines
    /// its error to a layer near the edges; quantitative comparisons are
    /// made on this band.
    pub fn core_band(&self) -> std::ops::Range<usize> {
        let skirt = ((self.n_x as f64) * 0.2).ceil() as usize;
        let skirt = skirt.max(1).min((self.n_x - 1) / 2);
        skirt..self.n_x - skirt
    }

    /// Time row whose node equals `t` up to roundoff, if any.
    pub fn time_row(&self, t: f64) -> Option<usize> {
        let raw = (t - self.t_start) / self.dt();
        let k = raw.round();
        if k < 0.0 || k > self.n_t as f64 {
            return None;
        }
        let tol = 1e-9 * self.dt().max(1.0);
        if (t - (self.t_start + k * self.dt())).abs() <= tol {
            Some(k as usize)
        } else {
            None
        }
    }

    /// Nearest time row, clamped to the grid.
    pub fn nearest_time_row(&self, t: f64) -> usize {
        let raw = (t - self.t_start) / self.dt();
        raw.round().clamp(0.0, self.n_t as f64) as usize
    }

    /// Node-nested refinement: each halving multiplies the space/time
    /// resolution by `factor`, keeping every coarse node.
    pub fn refined(&self, factor: usize) -> Grid1D {
        Grid1D {
            x_min: self.x_min,
            x_max: self.x_max,
            n_x: (self.n_x - 1) * factor + 1,
            t_start: self.t_start,
            t_end: self.t_end,
            n_t: self.n_t * factor,
        }
    }
}

/// Values on a `Grid1D`, stored row-major: row `k` is the space slice at
/// time `t(k)`.
#[derive(Clone, Debug)]
pub struct ValueField {
    grid: Grid1D,
    values: Vec<f64>,
}

impl ValueField {
    pub fn constant(grid: Grid1D, c: f64) -> Self {
        let n = grid.rows() * grid.n_x();
        Self { grid, values: vec![c; n] }
    }

    pub fn grid(&self) -> &Grid1D {
        &self.grid
    }

    pub fn value(&self, k: usize, i: usize) -> f64 {
        self.values[k * self.grid.n_x() + i]
    }

    pub fn row(&self, k: usize) -> &[f64] {
        let n = self.grid.n_x();
        &self.values[k * n..(k + 1) * n]
    }

    pub fn row_mut(&mut self, k: usize) -> &mut [f64] {
        let n = self.grid.n_x();
        &mut self.values[k * n..(k + 1) * n]
    }

    pub fn set_row(&mut self, k: usize, slice: &[f64]) {
        self.row_mut(k).copy_from_slice(slice);
    }

    /// Bilinear interpolation inside the rectangle; clamped outside.
    pub fn value_at(&self, t: f64, x: f64) -> f64 {
        let g = &self.grid;
        let tf = ((t - g.t_start()) / g.dt()).clamp(0.0, g.n_t() as f64);
        let xf = ((x - g.x_min()) / g.dx()).clamp(0.0, (g.n_x() - 1) as f64);
        let k0 = (tf.floor() as usize).min(g.n_t().saturating_sub(1));
        let i0 = (xf.floor() as usize).min(g.n_x() - 2);
        let wt = tf - k0 as f64;
        let wx = xf - i0 as f64;
        let v00 = self.value(k0, i0);
        let v01 = self.value(k0, i0 + 1);
        let v10 = self.value(k0 + 1, i0);
        let v11 = self.value(k0 + 1, i0 + 1);
        (1.0 - wt) * ((1.0 - wx) * v00 + wx * v01) + wt * ((1.0 - wx) * v10 + wx * v11)
    }

    /// Sub-window `[t(k_from), t(k_to)]` as its own field.
    pub fn restrict(&self, k_from: usize, k_to: usize) -> Result<ValueField> {
        if k_from > k_to || k_to > self.grid.n_t() {
            return Err(SolverError::Domain(format!(
                "row range {k_from}..={k_to} outside 0..={}",
                self.grid.n_t()
            )));
        }
        let grid = Grid1D::new(
            self.grid.x_min(),
            self.grid.x_max(),
            self.grid.n_x(),
            self.grid.t(k_from),
            self.grid.t(k_to),
            k_to - k_from,
        )?;
        let n = self.grid.n_x();
        let values = self.values[k_from * n..(k_to + 1) * n].to_vec();
        Ok(ValueField { grid, values })
    }

    /// Largest |self − other| over the given space band, all rows. Grids
    /// must agree.
    pub fn sup_diff(&self, other: &ValueField, band: std::ops::Range<usize>) -> Result<f64> {
        if self.grid != other.grid {
            return Err(SolverError::GridMismatch(
                "sup_diff needs identical grids".into(),
            ));
        }
        let mut m: f64 = 0.0;
        for k in 0..self.grid.rows() {
            let a = self.row(k);
            let b = other.row(k);
            for i in band.clone() {
                m = m.max((a[i] - b[i]).abs());
            }
        }
        Ok(m)
    }
}

/// One row of selected controls.
pub type StrategySlice = Vec<f64>;

/// Tabulated feedback controls on a grid, plus the one-sided and central
/// differences each selection was made from. Storing the derivatives makes
/// the selection reproducible: rerunning the argmin on them must return the
/// stored control.
#[derive(Clone, Debug)]
pub struct StrategyTable {
    grid: Grid1D,
    controls: Vec<f64>,
    d_dn: Vec<f64>,
    d_up: Vec<f64>,
    d2: Vec<f64>,
}

impl StrategyTable {
    pub fn empty(grid: Grid1D) -> Self {
        let n = grid.rows() * grid.n_x();
        Self {
            grid,
            controls: vec![f64::NAN; n],
            d_dn: vec![f64::NAN; n],
            d_up: vec![f64::NAN; n],
            d2: vec![f64::NAN; n],
        }
    }

    pub fn grid(&self) -> &Grid1D {
        &self.grid
    }

    pub fn control(&self, k: usize, i: usize) -> f64 {
        self.controls[k * self.grid.n_x() + i]
    }

    pub fn row(&self, k: usize) -> &[f64] {
        let n = self.grid.n_x();
        &self.controls[k * n..(k + 1) * n]
    }

    pub fn derivatives(&self, k: usize, i: usize) -> (f64, f64, f64) {
        let j = k * self.grid.n_x() + i;
        (self.d_dn[j], self.d_up[j], self.d2[j])
    }

    pub fn set_row(&mut self, k: usize, sel: &Selection) {
        let n = self.grid.n_x();
        let r = k * n..(k + 1) * n;
        self.controls[r.clone()].copy_from_slice(&sel.controls);
        self.d_dn[r.clone()].copy_from_slice(&sel.d_dn);
        self.d_up[r.clone()].copy_from_slice(&sel.d_up);
        self.d2[r].copy_from_slice(&sel.d2);
    }

    /// Feedback lookup: nearest time row; in space, the two bracketing
    /// nodes' controls when they agree, otherwise the nearer node's.
    pub fn control_at(&self, t: f64, x: f64) -> f64 {
        let k = self.grid.nearest_time_row(t);
        let row = self.row(k);
        let xf = (x - self.grid.x_min()) / self.grid.dx();
        if xf <= 0.0 {
            return row[0];
        }
        let top = (self.grid.n_x() - 1) as f64;
        if xf >= top {
            return row[self.grid.n_x() - 1];
        }
        let i0 = xf.floor() as usize;
        let i1 = (i0 + 1).min(self.grid.n_x() - 1);
        if row[i0] == row[i1] {
            row[i0]
        } else if xf - i0 as f64 <= 0.5 {
            row[i0]
        } else {
            row[i1]
        }
    }

    /// Rerun the argmin on the stored derivatives under `weight_fn` and
    /// check it reproduces every stored control exactly.
    pub fn reselect_matches(&self, p: &ProblemSpec, weight_fn: &dyn Fn(f64, f64) -> f64) -> bool {
        for k in 0..self.grid.rows() {
            let t = self.grid.t(k);
            for i in 0..self.grid.n_x() {
                let (dn, up, d2) = self.derivatives(k, i);
                let w = weight_fn(t, self.grid.x(i));
                let (u, _) = scan_controls(p, t, self.grid.x(i), dn, up, d2, w);
                if u != self.control(k, i) {
                    return false;
                }
            }
        }
        true
    }

    /// Sub-window from row `k_from` on, as its own table.
    pub fn restrict_rows(&self, k_from: usize) -> Result<StrategyTable> {
        if k_from >= self.grid.n_t() {
            return Err(SolverError::Domain(format!(
                "row {k_from} leaves no steps in 0..{}",
                self.grid.n_t()
            )));
        }
        let grid = Grid1D::new(
            self.grid.x_min(),
            self.grid.x_max(),
            self.grid.n_x(),
            self.grid.t(k_from),
            self.grid.t(self.grid.n_t()),
            self.grid.n_t() - k_from,
        )?;
        let n = self.grid.n_x();
        let r = k_from * n..self.grid.rows() * n;
        Ok(StrategyTable {
            grid,
            controls: self.controls[r.clone()].to_vec(),
            d_dn: self.d_dn[r.clone()].to_vec(),
            d_up: self.d_up[r.clone()].to_vec(),
            d2: self.d2[r].to_vec(),
        })
    }
}

// ---------------------------------------------------------------------------
// Stencil
// ---------------------------------------------------------------------------

/// Candidate Hamiltonian for one control at one cell. The one-sided
/// difference is chosen by the drift sign, which keeps the explicit update
/// a nonnegative combination of neighbor values under the CFL bound.
#[inline]
fn candidate(
    p: &ProblemSpec,
    t: f64,
    x: f64,
    u: f64,
    dn: f64,
    up: f64,
    d2: f64,
    cost_term: f64,
) -> f64 {
    let b = p.drift(t, x, u);
    let grad = if b >= 0.0 { up } else { dn };
    let sig = p.diffusion(t, x, u);
    grad * b + 0.5 * sig * sig * d2 + cost_term
}

#[inline]
fn cell_derivs(w: &[f64], i: usize, dx: f64) -> (f64, f64, f64) {
    let dn = (w[i] - w[i - 1]) / dx;
    let up = (w[i + 1] - w[i]) / dx;
    let d2 = (w[i + 1] - 2.0 * w[i] + w[i - 1]) / (dx * dx);
    (dn, up, d2)
}

/// One-sided differences at a boundary cell under the zero-second-derivative
/// extension: the phantom neighbor lies on the line through the two edge
/// nodes, so both one-sided slopes coincide and the second difference is 0.
#[inline]
fn edge_derivs(w: &[f64], i: usize, n: usize, dx: f64) -> (f64, f64, f64) {
    let slope = if i == 0 {
        (w[1] - w[0]) / dx
    } else {
        (w[n - 1] - w[n - 2]) / dx
    };
    (slope, slope, 0.0)
}

#[inline]
fn scan_controls(
    p: &ProblemSpec,
    t: f64,
    x: f64,
    dn: f64,
    up: f64,
    d2: f64,
    weight: f64,
) -> (f64, f64) {
    let grid = p.control_grid();
    let mut best_u = grid[0];
    let mut best_h = candidate(p, t, x, best_u, dn, up, d2, weight * p.base_cost(t, x, best_u));
    for &u in &grid[1..] {
        let h = candidate(p, t, x, u, dn, up, d2, weight * p.base_cost(t, x, u));
        if h < best_h {
            best_h = h;
            best_u = u;
        }
    }
    (best_u, best_h)
}

fn check_finite(slice: &[f64], t: f64) -> Result<()> {
    for (i, &v) in slice.iter().enumerate() {
        if !v.is_finite() {
            return Err(SolverError::Stability { time: t, cell: i, value: v });
        }
    }
    Ok(())
}

fn extrapolate_edges(out: &mut [f64]) {
    let n = out.len();
    out[0] = 2.0 * out[1] - out[2];
    out[n - 1] = 2.0 * out[n - 2] - out[n - 3];
}

// ---------------------------------------------------------------------------
// CFL control
// ---------------------------------------------------------------------------

/// Parabolic stability bound `0.9·dx²/(max σ² + max |b|·dx)`, maxima over
/// every grid node and control.
pub fn cfl_bound(p: &ProblemSpec, grid: &Grid1D) -> f64 {
    let mut max_sig_sq: f64 = 0.0;
    let mut max_b: f64 = 0.0;
    for k in 0..grid.rows() {
        let t = grid.t(k);
        for i in 0..grid.n_x() {
            let x = grid.x(i);
            for &u in p.control_grid() {
                let s = p.diffusion(t, x, u);
                max_sig_sq = max_sig_sq.max(s * s);
                max_b = max_b.max(p.drift(t, x, u).abs());
            }
        }
    }
    0.9 * grid.dx() * grid.dx() / (max_sig_sq + max_b * grid.dx())
}

/// Smallest substep count `m ≥ 1` with `dt/m` under the stability bound.
/// Every stored step is internally split this way; the explicit update is
/// then a nonnegative-coefficient (monotone) scheme.
pub fn cfl_steps(p: &ProblemSpec, grid: &Grid1D) -> usize {
    let bound = cfl_bound(p, grid);
    if !bound.is_finite() || bound <= 0.0 {
        return 1;
    }
    ((grid.dt() / bound).ceil() as usize).max(1)
}

// ---------------------------------------------------------------------------
// Steps
// ---------------------------------------------------------------------------

/// Controls and selection derivatives produced by one optimizing step or a
/// standalone selection pass.
#[derive(Clone, Debug)]
pub struct Selection {
    pub controls: Vec<f64>,
    pub d_dn: Vec<f64>,
    pub d_up: Vec<f64>,
    pub d2: Vec<f64>,
}

/// Output of [`hjb_step`]: the advanced slice and the controls selected on
/// the final substep.
#[derive(Clone, Debug)]
pub struct StepOutput {
    pub values: Vec<f64>,
    pub selection: Selection,
}

/// Argmin pass over one slice without stepping: the controls a decision
/// maker at time `t` would pick from this slice's derivatives.
pub fn select_on_slice(
    p: &ProblemSpec,
    grid: &Grid1D,
    slice: &[f64],
    t: f64,
    weight_fn: &dyn Fn(f64, f64) -> f64,
) -> Selection {
    let n = grid.n_x();
    let dx = grid.dx();
    let mut sel = Selection {
        controls: vec![0.0; n],
        d_dn: vec![0.0; n],
        d_up: vec![0.0; n],
        d2: vec![0.0; n],
    };
    for i in 0..n {
        let (dn, up, d2) = if i == 0 || i == n - 1 {
            edge_derivs(slice, i, n, dx)
        } else {
            cell_derivs(slice, i, dx)
        };
        let x = grid.x(i);
        let (u, _) = scan_controls(p, t, x, dn, up, d2, weight_fn(t, x));
        sel.controls[i] = u;
        sel.d_dn[i] = dn;
        sel.d_up[i] = up;
        sel.d2[i] = d2;
    }
    sel
}

/// One optimized backward step from the slice at `t_k + dt` to `t_k`,
/// split into `substeps` explicit substeps with the control re-selected on
/// each. Obtain `substeps` from [`cfl_steps`]; fewer substeps than the
/// bound demands loses the monotone-stability guarantee.
pub fn hjb_step(
    p: &ProblemSpec,
    grid: &Grid1D,
    next_slice: &[f64],
    t_k: f64,
    weight_fn: &dyn Fn(f64, f64) -> f64,
    substeps: usize,
) -> Result<StepOutput> {
    let n = grid.n_x();
    if next_slice.len() != n {
        return Err(SolverError::GridMismatch(format!(
            "slice has {} entries, grid has {n} nodes",
            next_slice.len()
        )));
    }
    let m = substeps.max(1);
    let dt_sub = grid.dt() / m as f64;
    let dx = grid.dx();
    let mut w = next_slice.to_vec();
    let mut out = vec![0.0; n];
    let mut sel = Selection {
        controls: vec![0.0; n],
        d_dn: vec![0.0; n],
        d_up: vec![0.0; n],
        d2: vec![0.0; n],
    };
    for j in 0..m {
        let t_eval = t_k + dt_sub * (m - 1 - j) as f64;
        for i in 1..n - 1 {
            let (dn, up, d2) = cell_derivs(&w, i, dx);
            let x = grid.x(i);
            let (u, h) = scan_controls(p, t_eval, x, dn, up, d2, weight_fn(t_eval, x));
            out[i] = w[i] + dt_sub * h;
            sel.controls[i] = u;
            sel.d_dn[i] = dn;
            sel.d_up[i] = up;
            sel.d2[i] = d2;
        }
        extrapolate_edges(&mut out);
        // boundary controls from the extended one-sided slopes
        for &i in &[0, n - 1] {
            let (dn, up, d2) = edge_derivs(&w, i, n, dx);
            let x = grid.x(i);
            let (u, _) = scan_controls(p, t_eval, x, dn, up, d2, weight_fn(t_eval, x));
            sel.controls[i] = u;
            sel.d_dn[i] = dn;
            sel.d_up[i] = up;
            sel.d2[i] = d2;
        }
        check_finite(&out, t_eval)?;
        std::mem::swap(&mut w, &mut out);
    }
    Ok(StepOutput { values: w, selection: sel })
}

/// One fixed-policy backward step under a frozen scalar weight. Same
/// stencil and substepping as [`hjb_step`] with the scan replaced by the
/// given control row.
pub fn linear_step(
    p: &ProblemSpec,
    grid: &Grid1D,
    next_slice: &[f64],
    t_k: f64,
    control_slice: &[f64],
    weight: f64,
    substeps: usize,
) -> Result<Vec<f64>> {
    let n = grid.n_x();
    if next_slice.len() != n || control_slice.len() != n {
        return Err(SolverError::GridMismatch(format!(
            "slice lengths {}/{} do not match grid nodes {n}",
            next_slice.len(),
            control_slice.len()
        )));
    }
    for (i, &u) in control_slice.iter().enumerate() {
        if p.control_index(u).is_none() {
            return Err(SolverError::Domain(format!(
                "control {u} at cell {i} is not on the control grid"
            )));
        }
    }
    let m = substeps.max(1);
    let dt_sub = grid.dt() / m as f64;
    let dx = grid.dx();
    let mut w = next_slice.to_vec();
    let mut out = vec![0.0; n];
    for j in 0..m {
        let t_eval = t_k + dt_sub * (m - 1 - j) as f64;
        for i in 1..n - 1 {
            let (dn, up, d2) = cell_derivs(&w, i, dx);
            let x = grid.x(i);
            let u = control_slice[i];
            let h = candidate(p, t_eval, x, u, dn, up, d2, weight * p.base_cost(t_eval, x, u));
            out[i] = w[i] + dt_sub * h;
        }
        extrapolate_edges(&mut out);
        check_finite(&out, t_eval)?;
        std::mem::swap(&mut w, &mut out);
    }
    Ok(w)
}

/// One fixed-policy backward step whose source term may read the evolving
/// value: `source(t, x, u, y)` with `y` the current cell value. With
/// `source = weight(t)·g₀` this is policy evaluation under a time-varying
/// weight; recursive cost sweeps pass genuinely y-dependent sources.
pub fn semilinear_step(
    p: &ProblemSpec,
    grid: &Grid1D,
    next_slice: &[f64],
    t_k: f64,
    control_slice: &[f64],
    source: &dyn Fn(f64, f64, f64, f64) -> f64,
    substeps: usize,
) -> Result<Vec<f64>> {
    let n = grid.n_x();
    if next_slice.len() != n || control_slice.len() != n {
        return Err(SolverError::GridMismatch(format!(
            "slice lengths {}/{} do not match grid nodes {n}",
            next_slice.len(),
            control_slice.len()
        )));
    }
    let m = substeps.max(1);
    let dt_sub = grid.dt() / m as f64;
    let dx = grid.dx();
    let mut w = next_slice.to_vec();
    let mut out = vec![0.0; n];
    for j in 0..m {
        let t_eval = t_k + dt_sub * (m - 1 - j) as f64;
        for i in 1..n - 1 {
            let (dn, up, d2) = cell_derivs(&w, i, dx);
            let x = grid.x(i);
            let u = control_slice[i];
            let h = candidate(p, t_eval, x, u, dn, up, d2, source(t_eval, x, u, w[i]));
            out[i] = w[i] + dt_sub * h;
        }
        extrapolate_edges(&mut out);
        check_finite(&out, t_eval)?;
        std::mem::swap(&mut w, &mut out);
    }
    Ok(w)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::ProblemSpec;

    fn flat_problem(sigma: f64, b: f64) -> ProblemSpec {
        ProblemSpec::builder()
            .drift(move |_, _, _| b)
            .diffusion(move |_, _, _| sigma)
            .base_cost(|_, _, _| 0.0)
            .cost_bound(|_| 0.0, |_| 0.0)
            .controls(vec![0.0])
            .epsilon_floor(1e-6)
            .build()
            .unwrap()
    }

    #[test]
    fn grid_rejects_bad_shapes() {
        assert!(Grid1D::new(1.0, 0.0, 11, 0.0, 1.0, 10).is_err());
        assert!(Grid1D::new(0.0, 1.0, 2, 0.0, 1.0, 10).is_err());
        assert!(Grid1D::new(0.0, 1.0, 11, 1.0, 1.0, 10).is_err());
        assert!(Grid1D::new(0.0, 1.0, 11, 0.0, 1.0, 0).is_err());
    }

    #[test]
    fn cfl_examples() {
        // dx = 0.1 throughout; bound = 0.9 * 0.01 / sigma^2 with b = 0
        let p = flat_problem(1.0, 0.0);
        let g = Grid1D::new(0.0, 1.0, 11, 0.0, 0.001, 1).unwrap();
        assert_eq!(cfl_steps(&p, &g), 1);
        let g = Grid1D::new(0.0, 1.0, 11, 0.0, 0.02, 1).unwrap();
        assert_eq!(cfl_steps(&p, &g), 3, "0.02/3 <= 0.009 < 0.02/2");
        let p_half = flat_problem(0.5, 0.0);
        let g = Grid1D::new(0.0, 1.0, 11, 0.0, 0.03, 1).unwrap();
        assert_eq!(cfl_steps(&p_half, &g), 1, "dt already below the bound");
    }

    #[test]
    fn hjb_step_keeps_zero_fixed() {
        let p = ProblemSpec::builder()
            .drift(|_, x, u| 0.1 * x + u)
            .diffusion(|_, _, _| 1.0)
            .base_cost(|_, _, _| 0.0)
            .cost_bound(|_| 0.0, |_| 0.0)
            .controls(vec![-1.0, 0.0, 1.0])
            .epsilon_floor(0.25)
            .build()
            .unwrap();
        let g = Grid1D::new(-1.0, 1.0, 21, 0.0, 0.001, 1).unwrap();
        let next = vec![0.0; 21];
        let out = hjb_step(&p, &g, &next, 0.0, &|_, _| 1.0, cfl_steps(&p, &g)).unwrap();
        assert!(out.values.iter().all(|&v| v == 0.0), "zero must be a fixed point");
    }

    #[test]
    fn hjb_step_one_step_matches_time_integral() {
        // x,u-independent cost: flat slices stay flat and the step reduces
        // to one Euler increment of ∫ e^{-s} ds
        let p = ProblemSpec::builder()
            .drift(|_, _, _| 0.3)
            .diffusion(|_, _, _| 1.0)
            .base_cost(|s, _, _| (-s).exp())
            .cost_bound(|s| (-s).exp(), |t| (-t).exp())
            .controls(vec![0.0])
            .epsilon_floor(0.25)
            .build()
            .unwrap();
        let dt = 1e-3;
        let g = Grid1D::new(-1.0, 1.0, 21, 0.5, 0.5 + dt, 1).unwrap();
        let next = vec![0.0; 21];
        let out = hjb_step(&p, &g, &next, 0.5, &|_, _| 1.0, cfl_steps(&p, &g)).unwrap();
        let exact_increment = dt * (-0.5f64).exp();
        for (i, &v) in out.values.iter().enumerate() {
            assert!(
                (v - exact_increment).abs() < 1e-15,
                "cell {i}: flat update should be exactly dt*e^-t, got {v}"
            );
        }
        let integral = (-0.5f64).exp() - (-(0.5 + dt) as f64).exp();
        assert!(
            (out.values[10] - integral).abs() < 2.0 * dt * dt,
            "one-step value {} vs integral {integral} should differ by O(dt^2)",
            out.values[10]
        );
    }

    #[test]
    fn hjb_step_preserves_symmetry() {
        let p = ProblemSpec::builder()
            .drift(|_, _, u| u)
            .diffusion(|_, _, _| 1.0)
            .base_cost(|_, x, u| x.tanh().powi(2) + 0.1 * u * u)
            .cost_bound(|_| 1.1, |_| f64::INFINITY)
            .controls(vec![-1.0, 0.0, 1.0])
            .epsilon_floor(0.25)
            .build()
            .unwrap();
        let g = Grid1D::new(-1.0, 1.0, 41, 0.0, 0.01, 5).unwrap();
        let m = cfl_steps(&p, &g);
        let mut slice = vec![0.0; 41];
        for k in (0..5).rev() {
            slice = hjb_step(&p, &g, &slice, g.t(k), &|_, _| 1.0, m).unwrap().values;
        }
        let n = slice.len();
        for i in 0..n {
            assert!(
                (slice[i] - slice[n - 1 - i]).abs() < 1e-10,
                "slice not symmetric at {i}: {} vs {}",
                slice[i],
                slice[n - 1 - i]
            );
        }
    }

    #[test]
    fn linear_step_constants_are_harmonic() {
        let p = flat_problem(0.7, 0.0);
        let g = Grid1D::new(-1.0, 1.0, 11, 0.0, 0.002, 1).unwrap();
        let next = vec![3.7; 11];
        let ctrl = vec![0.0; 11];
        let out = linear_step(&p, &g, &next, 0.0, &ctrl, 0.0, cfl_steps(&p, &g)).unwrap();
        assert!(out.iter().all(|&v| v == 3.7), "constant slice must persist exactly");
    }

    #[test]
    fn linear_step_flat_source_one_step() {
        let p = ProblemSpec::builder()
            .drift(|_, _, _| 0.0)
            .diffusion(|_, _, _| 1.0)
            .base_cost(|_, _, _| 1.0)
            .cost_bound(|_| 1.0, |_| f64::INFINITY)
            .controls(vec![0.0])
            .epsilon_floor(0.25)
            .build()
            .unwrap();
        let dt = 5e-4;
        let g = Grid1D::new(-1.0, 1.0, 21, 0.0, dt, 1).unwrap();
        let out = linear_step(&p, &g, &vec![0.0; 21], 0.0, &vec![0.0; 21], 1.0, 1).unwrap();
        assert!(out.iter().all(|&v| v == dt), "flat unit source advances by exactly dt");
    }

    #[test]
    fn linear_step_reproduces_hjb_under_its_strategy() {
        let p = ProblemSpec::builder()
            .drift(|_, x, u| 0.2 * x.tanh() + 0.5 * u)
            .diffusion(|_, x, _| 1.0 + 0.1 * x.tanh())
            .base_cost(|_, x, u| (x - 0.3).tanh().powi(2) + 0.2 * u * u)
            .cost_bound(|_| 1.2, |_| f64::INFINITY)
            .controls(vec![-1.0, -0.5, 0.0, 0.5, 1.0])
            .epsilon_floor(0.25)
            .build()
            .unwrap();
        let g = Grid1D::new(-2.0, 2.0, 41, 0.0, 5e-4, 1).unwrap();
        assert_eq!(cfl_steps(&p, &g), 1, "test assumes a single substep");
        // a bumpy but smooth next-slice
        let next: Vec<f64> = (0..41).map(|i| ((i as f64) * 0.3).sin() * 0.2 + 0.5).collect();
        let out = hjb_step(&p, &g, &next, 0.0, &|_, _| 0.8, 1).unwrap();
        let lin = linear_step(&p, &g, &next, 0.0, &out.selection.controls, 0.8, 1).unwrap();
        assert_eq!(out.values, lin, "fixed-policy step under the argmin controls must agree bitwise");
    }

    #[test]
    fn linear_step_rejects_off_grid_controls() {
        let p = flat_problem(1.0, 0.0);
        let g = Grid1D::new(-1.0, 1.0, 11, 0.0, 0.001, 1).unwrap();
        let bad = vec![0.25; 11];
        assert!(matches!(
            linear_step(&p, &g, &vec![0.0; 11], 0.0, &bad, 1.0, 1),
            Err(SolverError::Domain(_))
        ));
    }

    #[test]
    fn blow_up_is_reported_with_cell() {
        let p = flat_problem(1.0, 0.0);
        let g = Grid1D::new(-1.0, 1.0, 11, 0.0, 0.001, 1).unwrap();
        let mut next = vec![0.0; 11];
        next[4] = f64::INFINITY;
        match hjb_step(&p, &g, &next, 0.0, &|_, _| 1.0, 1) {
            Err(SolverError::Stability { cell, .. }) => {
                assert!((3..=5).contains(&cell), "offending cell near the seeded infinity, got {cell}")
            }
            other => panic!("expected a stability error, got {other:?}"),
        }
    }

    #[test]
    fn strategy_lookup_interpolates_only_on_agreement() {
        let g = Grid1D::new(0.0, 1.0, 3, 0.0, 1.0, 1).unwrap();
        let mut table = StrategyTable::empty(g);
        let sel = Selection {
            controls: vec![-1.0, -1.0, 1.0],
            d_dn: vec![0.0; 3],
            d_up: vec![0.0; 3],
            d2: vec![0.0; 3],
        };
        table.set_row(0, &sel);
        table.set_row(1, &sel);
        // agreeing neighbors
        assert_eq!(table.control_at(0.0, 0.25), -1.0);
        // disagreeing neighbors: nearest node wins
        assert_eq!(table.control_at(0.0, 0.6), -1.0);
        assert_eq!(table.control_at(0.0, 0.9), 1.0);
        // clamped outside
        assert_eq!(table.control_at(0.0, -5.0), -1.0);
        assert_eq!(table.control_at(0.0, 5.0), 1.0);
    }
}
