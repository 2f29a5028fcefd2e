//! Two-phase revised simplex for linear programs with general variable
//! bounds, kept deliberately dense and deterministic.
//!
//! Every constraint row gets a slack column (`<=` gives `s >= 0`, `>=` gives
//! `s <= 0`, `=` pins `s = 0`), so the working system is always `Ax + s = b`.
//! Phase 1 starts from the slack basis and drives artificial columns (added
//! only for rows whose slack cannot absorb the initial residual) to zero;
//! phase 2 optimizes the true objective. The basis inverse is held as a dense
//! matrix, updated by the standard pivot row operations and refactorized
//! from scratch at fixed intervals.
//!
//! Pricing is Dantzig (most negative reduced cost, ties to the lowest column
//! index) with a permanent switch to Bland's rule after a long degenerate
//! stall, which restores the termination guarantee. Nonbasic variables sit on
//! a bound; the ratio test allows bound flips. There is no randomness and no
//! hashing anywhere, so pivot sequences are reproducible.

use alloc::string::String;
use alloc::string::ToString;
use alloc::vec;
use alloc::vec::Vec;

use crate::math;
use crate::milp::model::{MilpModel, Sense};

/// Feasibility tolerance: phase-1 residual acceptance, scaled by the rhs
/// magnitude.
pub(crate) const FEAS_TOL: f64 = 1e-7;
const DUAL_TOL: f64 = 1e-9;
const PIVOT_TOL: f64 = 1e-9;
const RATIO_TIE: f64 = 1e-9;
const DEGENERATE_STEP: f64 = 1e-11;
const STALL_LIMIT: u32 = 400;
const REFACTOR_EVERY: u32 = 500;

/// LP in computational form: structural columns from the model plus one
/// slack per row. Built once per model and shared by every branch-and-bound
/// node; per-node bound changes are passed to [`solve_lp`] as overrides.
pub(crate) struct LpForm {
    pub nstruct: usize,
    pub nrows: usize,
    /// Structural + slack columns, sparse by row.
    cols: Vec<Vec<(usize, f64)>>,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    /// Objective over all columns (slack entries are zero).
    obj: Vec<f64>,
    rhs: Vec<f64>,
}

impl LpForm {
    pub fn from_model(model: &MilpModel) -> LpForm {
        let nstruct = model.num_vars();
        let nrows = model.num_constraints();
        let ncols = nstruct + nrows;
        let mut cols: Vec<Vec<(usize, f64)>> = vec![Vec::new(); ncols];
        let mut lower = Vec::with_capacity(ncols);
        let mut upper = Vec::with_capacity(ncols);
        for v in model.vars() {
            lower.push(v.lower);
            upper.push(v.upper);
        }
        let mut rhs = Vec::with_capacity(nrows);
        for (i, c) in model.constraints().iter().enumerate() {
            for &(v, coef) in &c.terms {
                cols[v.index()].push((i, coef));
            }
            let slack = nstruct + i;
            cols[slack].push((i, 1.0));
            let (lo, hi) = match c.sense {
                Sense::Le => (0.0, f64::INFINITY),
                Sense::Ge => (f64::NEG_INFINITY, 0.0),
                Sense::Eq => (0.0, 0.0),
            };
            lower.push(lo);
            upper.push(hi);
            rhs.push(c.rhs);
        }
        let mut obj = vec![0.0; ncols];
        for &(v, coef) in model.objective() {
            obj[v.index()] = coef;
        }
        LpForm { nstruct, nrows, cols, lower, upper, obj, rhs }
    }

    pub fn ncols(&self) -> usize {
        self.nstruct + self.nrows
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
    IterLimit,
}

pub(crate) struct LpOutcome {
    pub status: LpStatus,
    pub objective: f64,
    /// Structural variable values (only meaningful for `Optimal`).
    pub x: Vec<f64>,
    pub iterations: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum VStat {
    Basic(usize),
    AtLower,
    AtUpper,
}

/// Solves the LP with per-column bound overrides (used to fix binaries in
/// branch and bound). `iter_limit` caps simplex pivots across both phases.
pub(crate) fn solve_lp(
    form: &LpForm,
    overrides: &[(usize, f64, f64)],
    iter_limit: u64,
) -> Result<LpOutcome, String> {
    let ncols = form.ncols();
    let nart = form.nrows;
    let total = ncols + nart;

    let mut lower = Vec::with_capacity(total);
    let mut upper = Vec::with_capacity(total);
    lower.extend_from_slice(&form.lower);
    upper.extend_from_slice(&form.upper);
    for &(col, lo, hi) in overrides {
        lower[col] = lo;
        upper[col] = hi;
    }
    // Artificial bounds start pinned; rows that need one open it up below.
    lower.extend(core::iter::repeat(0.0).take(nart));
    upper.extend(core::iter::repeat(0.0).take(nart));

    if lower.iter().zip(&upper).any(|(l, u)| l > u) {
        return Ok(LpOutcome {
            status: LpStatus::Infeasible,
            objective: f64::INFINITY,
            x: Vec::new(),
            iterations: 0,
        });
    }

    let mut x = vec![0.0; total];
    let mut vstat = vec![VStat::AtLower; total];
    // Nonbasic initial point: every structural column on a finite bound.
    for j in 0..form.nstruct {
        if lower[j].is_finite() {
            x[j] = lower[j];
            vstat[j] = VStat::AtLower;
        } else if upper[j].is_finite() {
            x[j] = upper[j];
            vstat[j] = VStat::AtUpper;
        } else {
            return Err("free structural variables are not supported".to_string());
        }
    }

    // Row residuals decide whether the slack can start basic or an
    // artificial has to cover the gap.
    let mut art_sign = vec![1.0f64; nart];
    let mut basis = Vec::with_capacity(form.nrows);
    let mut residual = form.rhs.clone();
    for j in 0..form.nstruct {
        if x[j] != 0.0 {
            for &(r, a) in &form.cols[j] {
                residual[r] -= a * x[j];
            }
        }
    }
    for i in 0..form.nrows {
        let slack = form.nstruct + i;
        let s = residual[i];
        if s >= lower[slack] && s <= upper[slack] {
            x[slack] = s;
            vstat[slack] = VStat::Basic(i);
            basis.push(slack);
        } else {
            // Clamp the slack to its nearest bound and cover the rest.
            let pinned = if s < lower[slack] { lower[slack] } else { upper[slack] };
            x[slack] = pinned;
            vstat[slack] = if pinned == lower[slack] { VStat::AtLower } else { VStat::AtUpper };
            let left = s - pinned;
            let art = ncols + i;
            art_sign[i] = if left >= 0.0 { 1.0 } else { -1.0 };
            lower[art] = 0.0;
            upper[art] = f64::INFINITY;
            x[art] = math::abs(left);
            vstat[art] = VStat::Basic(i);
            basis.push(art);
        }
    }

    // The starting basis is diagonal: +1 for slacks, ±1 for artificials, so
    // its inverse is the same diagonal.
    let mut binv = identity(form.nrows);
    for (i, &bj) in basis.iter().enumerate() {
        if bj >= ncols && art_sign[bj - ncols] < 0.0 {
            binv[i * form.nrows + i] = -1.0;
        }
    }

    let mut t = Tableau {
        form,
        lower,
        upper,
        x,
        vstat,
        basis,
        art_sign,
        binv,
        bland: false,
        stall: 0,
        pivots_since_refactor: 0,
        iterations: 0,
        iter_limit,
    };

    // Phase 1: minimize the artificial total.
    let needs_phase1 = (0..nart).any(|i| t.upper[ncols + i] > 0.0);
    if needs_phase1 {
        let mut cost = vec![0.0; total];
        for c in cost.iter_mut().skip(ncols) {
            *c = 1.0;
        }
        match t.optimize(&cost)? {
            LoopEnd::Optimal => {}
            LoopEnd::Unbounded => return Err("phase 1 reported an unbounded direction".to_string()),
            LoopEnd::IterLimit => {
                return Ok(LpOutcome {
                    status: LpStatus::IterLimit,
                    objective: f64::NAN,
                    x: Vec::new(),
                    iterations: t.iterations,
                })
            }
        }
        let infeas: f64 = (ncols..total).map(|j| t.x[j]).sum();
        let scale = 1.0 + form.rhs.iter().fold(0.0f64, |m, &b| m.max(math::abs(b)));
        if infeas > FEAS_TOL * scale {
            return Ok(LpOutcome {
                status: LpStatus::Infeasible,
                objective: f64::INFINITY,
                x: Vec::new(),
                iterations: t.iterations,
            });
        }
        // Pin every artificial; those still basic sit at (numerical) zero.
        for j in ncols..total {
            t.upper[j] = 0.0;
        }
        t.stall = 0;
        t.bland = false;
    }

    // Phase 2: the real objective.
    let mut cost = vec![0.0; total];
    cost[..ncols].copy_from_slice(&form.obj);
    let end = t.optimize(&cost)?;
    let status = match end {
        LoopEnd::Optimal => LpStatus::Optimal,
        LoopEnd::Unbounded => LpStatus::Unbounded,
        LoopEnd::IterLimit => LpStatus::IterLimit,
    };
    if status != LpStatus::Optimal {
        return Ok(LpOutcome {
            status,
            objective: if status == LpStatus::Unbounded { f64::NEG_INFINITY } else { f64::NAN },
            x: Vec::new(),
            iterations: t.iterations,
        });
    }
    let objective = (0..form.nstruct).map(|j| form.obj[j] * t.x[j]).sum();
    Ok(LpOutcome { status, objective, x: t.x[..form.nstruct].to_vec(), iterations: t.iterations })
}

enum LoopEnd {
    Optimal,
    Unbounded,
    IterLimit,
}

struct Tableau<'a> {
    form: &'a LpForm,
    lower: Vec<f64>,
    upper: Vec<f64>,
    x: Vec<f64>,
    vstat: Vec<VStat>,
    basis: Vec<usize>,
    art_sign: Vec<f64>,
    /// Dense basis inverse, row-major `nrows x nrows`.
    binv: Vec<f64>,
    bland: bool,
    stall: u32,
    pivots_since_refactor: u32,
    iterations: u64,
    iter_limit: u64,
}

fn identity(n: usize) -> Vec<f64> {
    let mut m = vec![0.0; n * n];
    for i in 0..n {
        m[i * n + i] = 1.0;
    }
    m
}

impl<'a> Tableau<'a> {
    fn ncols(&self) -> usize {
        self.form.ncols()
    }

    /// Sparse column `j`, artificials included.
    fn col(&self, j: usize) -> ColIter<'_> {
        if j < self.ncols() {
            ColIter::Sparse(self.form.cols[j].iter())
        } else {
            let row = j - self.ncols();
            ColIter::Unit(Some((row, self.art_sign[row])))
        }
    }

    fn optimize(&mut self, cost: &[f64]) -> Result<LoopEnd, String> {
        let m = self.form.nrows;
        let total = cost.len();
        loop {
            if self.iterations >= self.iter_limit {
                return Ok(LoopEnd::IterLimit);
            }
            // Duals for the current basis: y = (c_B)ᵀ B⁻¹.
            let mut y = vec![0.0; m];
            for (pos, &bj) in self.basis.iter().enumerate() {
                let cb = cost[bj];
                if cb != 0.0 {
                    let row = &self.binv[pos * m..(pos + 1) * m];
                    for (i, &b) in row.iter().enumerate() {
                        y[i] += cb * b;
                    }
                }
            }

            // Pricing.
            let mut entering: Option<(usize, f64, i8)> = None; // (col, |d|, dir)
            for j in 0..total {
                let (at_lower, fixed) = match self.vstat[j] {
                    VStat::Basic(_) => continue,
                    VStat::AtLower => (true, self.lower[j] >= self.upper[j]),
                    VStat::AtUpper => (false, self.lower[j] >= self.upper[j]),
                };
                if fixed {
                    continue;
                }
                let mut d = cost[j];
                for (r, a) in self.col(j) {
                    d -= y[r] * a;
                }
                let (eligible, dir) = if at_lower {
                    (d < -DUAL_TOL, 1i8)
                } else {
                    (d > DUAL_TOL, -1i8)
                };
                if !eligible {
                    continue;
                }
                if self.bland {
                    entering = Some((j, math::abs(d), dir));
                    break;
                }
                match entering {
                    Some((_, best, _)) if math::abs(d) <= best => {}
                    _ => entering = Some((j, math::abs(d), dir)),
                }
            }
            let Some((enter, _, dir)) = entering else {
                return Ok(LoopEnd::Optimal);
            };
            let dir = dir as f64;

            // Direction through the basis: w = B⁻¹ a_enter.
            let mut w = vec![0.0; m];
            for (r, a) in self.col(enter) {
                if a != 0.0 {
                    for i in 0..m {
                        w[i] += self.binv[i * m + r] * a;
                    }
                }
            }

            // Ratio test with bound flips.
            let flip_range = self.upper[enter] - self.lower[enter];
            let mut best = if flip_range.is_finite() { flip_range } else { f64::INFINITY };
            let mut leaving: Option<(usize, bool)> = None; // (basis pos, leaves at lower)
            let mut leaving_weight = 0.0f64;
            for (i, &wi) in w.iter().enumerate() {
                if math::abs(wi) <= PIVOT_TOL {
                    continue;
                }
                let k = self.basis[i];
                let d = dir * wi;
                let (ratio, to_lower) = if d > 0.0 {
                    if self.lower[k] == f64::NEG_INFINITY {
                        continue;
                    }
                    (((self.x[k] - self.lower[k]) / d).max(0.0), true)
                } else {
                    if self.upper[k] == f64::INFINITY {
                        continue;
                    }
                    (((self.upper[k] - self.x[k]) / -d).max(0.0), false)
                };
                let better = if ratio < best - RATIO_TIE {
                    true
                } else if ratio <= best + RATIO_TIE {
                    match leaving {
                        None => true, // beat the bound flip on a tie: keeps steps finite-ranged
                        Some((pos, _)) => {
                            if self.bland {
                                k < self.basis[pos]
                            } else {
                                math::abs(wi) > leaving_weight
                            }
                        }
                    }
                } else {
                    false
                };
                if better {
                    best = ratio.min(best);
                    leaving = Some((i, to_lower));
                    leaving_weight = math::abs(wi);
                }
            }

            if best.is_infinite() {
                return Ok(LoopEnd::Unbounded);
            }

            let theta = best;
            self.stall = if theta <= DEGENERATE_STEP { self.stall + 1 } else { 0 };
            if self.stall > STALL_LIMIT {
                self.bland = true;
            }
            self.iterations += 1;

            // Move the basic variables along the direction.
            if theta != 0.0 {
                for (i, &wi) in w.iter().enumerate() {
                    if wi != 0.0 {
                        let k = self.basis[i];
                        self.x[k] -= dir * theta * wi;
                    }
                }
            }

            match leaving {
                None => {
                    // Pure bound flip.
                    self.x[enter] = if dir > 0.0 { self.upper[enter] } else { self.lower[enter] };
                    self.vstat[enter] =
                        if dir > 0.0 { VStat::AtUpper } else { VStat::AtLower };
                }
                Some((r, to_lower)) => {
                    let old_val = match self.vstat[enter] {
                        VStat::AtLower => self.lower[enter],
                        VStat::AtUpper => self.upper[enter],
                        VStat::Basic(_) => unreachable!("entering column is nonbasic"),
                    };
                    let leave = self.basis[r];
                    self.x[enter] = old_val + dir * theta;
                    self.x[leave] = if to_lower { self.lower[leave] } else { self.upper[leave] };
                    self.vstat[leave] = if to_lower { VStat::AtLower } else { VStat::AtUpper };
                    self.vstat[enter] = VStat::Basic(r);
                    self.basis[r] = enter;
                    self.pivot_binv(r, &w)?;
                    self.pivots_since_refactor += 1;
                    if self.pivots_since_refactor >= REFACTOR_EVERY {
                        self.refactor()?;
                    }
                }
            }
        }
    }

    /// Standard product-form update after `basis[r]` changed: premultiply
    /// B⁻¹ by the eta matrix built from the entering direction `w`.
    fn pivot_binv(&mut self, r: usize, w: &[f64]) -> Result<(), String> {
        let m = self.form.nrows;
        let wr = w[r];
        if math::abs(wr) <= PIVOT_TOL / 10.0 {
            // The chosen pivot is numerically hopeless; rebuild and let the
            // caller's next iteration re-price.
            return self.refactor();
        }
        let inv = 1.0 / wr;
        for c in 0..m {
            self.binv[r * m + c] *= inv;
        }
        for i in 0..m {
            if i != r {
                let f = w[i];
                if f != 0.0 {
                    for c in 0..m {
                        self.binv[i * m + c] -= f * self.binv[r * m + c];
                    }
                }
            }
        }
        Ok(())
    }

    /// Rebuilds B⁻¹ from the basis columns by Gauss-Jordan elimination with
    /// partial pivoting, then recomputes the basic values from the nonbasic
    /// point to shed accumulated drift.
    fn refactor(&mut self) -> Result<(), String> {
        let m = self.form.nrows;
        self.pivots_since_refactor = 0;
        if m == 0 {
            return Ok(());
        }
        let mut a = vec![0.0; m * m];
        for (pos, &j) in self.basis.iter().enumerate() {
            for (r, v) in self.col(j) {
                a[r * m + pos] = v;
            }
        }
        let mut inv = identity(m);
        for col in 0..m {
            let mut piv = col;
            let mut best = math::abs(a[col * m + col]);
            for r in col + 1..m {
                let cand = math::abs(a[r * m + col]);
                if cand > best {
                    best = cand;
                    piv = r;
                }
            }
            if best <= 1e-12 {
                return Err("singular basis during refactorization".to_string());
            }
            if piv != col {
                for c in 0..m {
                    a.swap(col * m + c, piv * m + c);
                    inv.swap(col * m + c, piv * m + c);
                }
            }
            let d = a[col * m + col];
            for c in 0..m {
                a[col * m + c] /= d;
                inv[col * m + c] /= d;
            }
            for r in 0..m {
                if r != col {
                    let f = a[r * m + col];
                    if f != 0.0 {
                        for c in 0..m {
                            a[r * m + c] -= f * a[col * m + c];
                            inv[r * m + c] -= f * inv[col * m + c];
                        }
                    }
                }
            }
        }
        self.binv = inv;

        // x_B = B⁻¹ (b − Σ nonbasic a_j x_j)
        let mut rhs = self.form.rhs.clone();
        for j in 0..self.x.len() {
            if matches!(self.vstat[j], VStat::Basic(_)) || self.x[j] == 0.0 {
                continue;
            }
            for (r, v) in self.col(j) {
                rhs[r] -= v * self.x[j];
            }
        }
        for pos in 0..m {
            let mut val = 0.0;
            for r in 0..m {
                val += self.binv[pos * m + r] * rhs[r];
            }
            self.x[self.basis[pos]] = val;
        }
        Ok(())
    }
}

enum ColIter<'a> {
    Sparse(core::slice::Iter<'a, (usize, f64)>),
    Unit(Option<(usize, f64)>),
}

impl<'a> Iterator for ColIter<'a> {
    type Item = (usize, f64);
    fn next(&mut self) -> Option<(usize, f64)> {
        match self {
            ColIter::Sparse(it) => it.next().copied(),
            ColIter::Unit(v) => v.take(),
        }
    }
}
