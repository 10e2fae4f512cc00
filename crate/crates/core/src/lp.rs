//! Dense two-phase simplex.
//!
//! Problems here are small (tens of variables, a few hundred rows at most), so
//! the solver keeps a full tableau and favours determinism over speed: the
//! same input always takes the same pivot sequence and yields bit-identical
//! output.
//!
//! Variables are mapped to nonnegative tableau columns before solving. Free
//! variables, and boxed variables whose box straddles zero, are split into a
//! difference of two nonnegative columns; every other variable is shifted
//! onto a finite bound (the lower one when it exists). Finite bounds that are
//! not absorbed by the mapping become ordinary `≤` rows, which the tableau
//! origin always satisfies.
//!
//! Rows are equilibrated to unit max coefficient. Pricing uses Dantzig's
//! rule with a Harris ratio test; margin programs (`max t` s.t. `a·x ≥ t`)
//! have a heavily degenerate vertex at the origin, so after a run of
//! degenerate pivots the solver switches to Bland's rule until it escapes.

use thiserror::Error;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Relation {
    Le,
    Eq,
    Ge,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Constraint {
    pub coeffs: Vec<f64>,
    pub relation: Relation,
    pub rhs: f64,
}

/// `maximize objective·x` subject to linear rows and per-variable bounds.
#[derive(Clone, Debug, PartialEq)]
pub struct LinearProgram {
    objective: Vec<f64>,
    constraints: Vec<Constraint>,
    lower: Vec<f64>,
    upper: Vec<f64>,
}

impl LinearProgram {
    /// New program over `objective.len()` variables, each bounded below by 0.
    pub fn maximize(objective: Vec<f64>) -> Self {
        let n = objective.len();
        Self {
            objective,
            constraints: Vec::new(),
            lower: vec![0.0; n],
            upper: vec![f64::INFINITY; n],
        }
    }

    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }

    pub fn objective(&self) -> &[f64] {
        &self.objective
    }

    pub fn constraints(&self) -> &[Constraint] {
        &self.constraints
    }

    pub fn bounds(&self, var: usize) -> (f64, f64) {
        (self.lower[var], self.upper[var])
    }

    /// Sets bounds; use `f64::NEG_INFINITY`/`f64::INFINITY` for open sides.
    pub fn set_bounds(&mut self, var: usize, lower: f64, upper: f64) -> &mut Self {
        self.lower[var] = lower;
        self.upper[var] = upper;
        self
    }

    pub fn set_free(&mut self, var: usize) -> &mut Self {
        self.set_bounds(var, f64::NEG_INFINITY, f64::INFINITY)
    }

    pub fn add_constraint(&mut self, coeffs: Vec<f64>, relation: Relation, rhs: f64) -> &mut Self {
        self.constraints.push(Constraint { coeffs, relation, rhs });
        self
    }

    pub fn validate(&self) -> Result<(), LpError> {
        let n = self.num_vars();
        if self.objective.iter().any(|c| !c.is_finite()) {
            return Err(LpError::NonFinite);
        }
        for (row, c) in self.constraints.iter().enumerate() {
            if c.coeffs.len() != n {
                return Err(LpError::DimensionMismatch {
                    row,
                    expected: n,
                    found: c.coeffs.len(),
                });
            }
            if !c.rhs.is_finite() || c.coeffs.iter().any(|a| !a.is_finite()) {
                return Err(LpError::NonFinite);
            }
        }
        for var in 0..n {
            let (l, u) = (self.lower[var], self.upper[var]);
            if l.is_nan() || u.is_nan() || l > u || l == f64::INFINITY || u == f64::NEG_INFINITY {
                return Err(LpError::InvalidBounds { var, lower: l, upper: u });
            }
        }
        Ok(())
    }

    /// Largest violation of any row or bound by `x`.
    pub fn max_violation(&self, x: &[f64]) -> f64 {
        let mut worst: f64 = 0.0;
        for c in &self.constraints {
            let lhs: f64 = c.coeffs.iter().zip(x).map(|(a, v)| a * v).sum();
            let v = match c.relation {
                Relation::Le => lhs - c.rhs,
                Relation::Ge => c.rhs - lhs,
                Relation::Eq => (lhs - c.rhs).abs(),
            };
            worst = worst.max(v);
        }
        for (i, &xi) in x.iter().enumerate() {
            worst = worst.max(self.lower[i] - xi).max(xi - self.upper[i]);
        }
        worst
    }

    pub fn evaluate(&self, x: &[f64]) -> f64 {
        self.objective.iter().zip(x).map(|(c, v)| c * v).sum()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum LpOutcome {
    Optimal { solution: Vec<f64>, objective: f64 },
    /// Phase 1 ended with total artificial mass `residual > tol`.
    Infeasible { residual: f64 },
    Unbounded,
}

impl LpOutcome {
    pub fn is_optimal(&self) -> bool {
        matches!(self, LpOutcome::Optimal { .. })
    }
}

#[derive(Clone, Debug, Error, PartialEq)]
pub enum LpError {
    #[error("row {row} has {found} coefficients, expected {expected}")]
    DimensionMismatch { row: usize, expected: usize, found: usize },
    #[error("variable {var} has invalid bounds [{lower}, {upper}]")]
    InvalidBounds { var: usize, lower: f64, upper: f64 },
    #[error("non-finite coefficient in program")]
    NonFinite,
    #[error("pivot limit of {0} exceeded")]
    IterationLimit(usize),
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SolverOptions {
    /// Feasibility tolerance; phase-1 residual above this means infeasible.
    pub tol: f64,
    /// Smallest magnitude accepted as a pivot element.
    pub pivot_tol: f64,
    /// Reduced costs above this make a column eligible to enter.
    pub optimality_tol: f64,
    pub max_pivots: usize,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            tol: 1e-10,
            pivot_tol: 1e-9,
            optimality_tol: 1e-11,
            max_pivots: 50_000,
        }
    }
}

/// Consecutive degenerate pivots before switching to Bland's rule.
const BLAND_AFTER: usize = 50;

#[derive(Clone, Copy, Debug)]
enum Column {
    /// `x = offset + sign * col`
    Shift { col: usize, offset: f64, sign: f64 },
    /// `x = pos - neg`
    Split { pos: usize, neg: usize },
}

struct Tableau {
    rows: usize,
    width: usize,
    data: Vec<f64>,
    obj: Vec<f64>,
    basis: Vec<usize>,
    first_artificial: usize,
    pivots: usize,
}

impl Tableau {
    fn rhs_col(&self) -> usize {
        self.width - 1
    }

    fn at(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.width + j]
    }

    fn pivot(&mut self, r: usize, c: usize) {
        let w = self.width;
        let p = self.data[r * w + c];
        let row: Vec<(usize, f64)> = {
            let src = &mut self.data[r * w..(r + 1) * w];
            for v in src.iter_mut() {
                *v /= p;
            }
            src[c] = 1.0;
            src.iter().enumerate().filter(|(_, v)| **v != 0.0).map(|(j, v)| (j, *v)).collect()
        };
        for i in 0..self.rows {
            if i == r {
                continue;
            }
            let f = self.data[i * w + c];
            if f == 0.0 {
                continue;
            }
            let dst = &mut self.data[i * w..(i + 1) * w];
            for &(j, v) in &row {
                dst[j] -= f * v;
            }
            dst[c] = 0.0;
            if dst[w - 1] < 0.0 && dst[w - 1] > -1e-13 {
                dst[w - 1] = 0.0;
            }
        }
        let f = self.obj[c];
        if f != 0.0 {
            for &(j, v) in &row {
                self.obj[j] -= f * v;
            }
            self.obj[c] = 0.0;
        }
        self.basis[r] = c;
        self.pivots += 1;
    }

    /// Runs primal simplex iterations on the current objective row. Returns
    /// `false` when the objective is unbounded.
    ///
    /// Pricing is Dantzig's rule and the ratio test prefers the largest pivot
    /// among rows whose ratio is within `tol` of the minimum. After a run of
    /// degenerate pivots both choices fall back to Bland's rule until the
    /// objective moves again, which rules out cycling.
    fn iterate(&mut self, eligible: usize, opts: &SolverOptions) -> Result<bool, LpError> {
        let mut degenerate_run = 0;
        loop {
            let bland = degenerate_run >= BLAND_AFTER;
            let entering = if bland {
                (0..eligible).find(|&j| self.obj[j] > opts.optimality_tol)
            } else {
                (0..eligible)
                    .filter(|&j| self.obj[j] > opts.optimality_tol)
                    .fold(None, |best: Option<usize>, j| match best {
                        Some(b) if self.obj[b] >= self.obj[j] => Some(b),
                        _ => Some(j),
                    })
            };
            let Some(c) = entering else {
                return Ok(true);
            };
            let Some((r, step)) = self.ratio_test(c, bland, opts) else {
                return Ok(false);
            };
            if self.pivots >= opts.max_pivots {
                return Err(LpError::IterationLimit(opts.max_pivots));
            }
            degenerate_run = if step * self.obj[c] > opts.tol * 1e-3 { 0 } else { degenerate_run + 1 };
            self.pivot(r, c);
        }
    }

    /// Leaving row for entering column `c`, with the step length taken.
    fn ratio_test(&self, c: usize, bland: bool, opts: &SolverOptions) -> Option<(usize, f64)> {
        let rhs = self.rhs_col();
        let candidates = (0..self.rows).filter(|&i| self.at(i, c) > opts.pivot_tol);
        if bland {
            let mut leave: Option<(usize, f64)> = None;
            for i in candidates {
                let ratio = self.at(i, rhs).max(0.0) / self.at(i, c);
                leave = match leave {
                    Some((bi, br)) if br < ratio || (br == ratio && self.basis[bi] < self.basis[i]) => Some((bi, br)),
                    _ => Some((i, ratio)),
                };
            }
            return leave;
        }
        // Harris two-pass test: bound the step with relaxed right-hand sides,
        // then take the largest pivot that respects the bound.
        let bound = candidates
            .clone()
            .map(|i| (self.at(i, rhs).max(0.0) + opts.tol) / self.at(i, c))
            .fold(f64::INFINITY, f64::min);
        let mut leave: Option<(usize, f64)> = None;
        for i in candidates {
            let a = self.at(i, c);
            let ratio = self.at(i, rhs).max(0.0) / a;
            if ratio > bound {
                continue;
            }
            leave = match leave {
                Some((bi, br)) if self.at(bi, c) >= a => Some((bi, br)),
                _ => Some((i, ratio)),
            };
        }
        leave
    }

    /// Resets the objective row to reduced costs of `costs` under the current basis.
    fn price(&mut self, costs: &[f64]) {
        let w = self.width;
        self.obj = costs.to_vec();
        self.obj.push(0.0);
        for i in 0..self.rows {
            let cb = costs[self.basis[i]];
            if cb == 0.0 {
                continue;
            }
            for j in 0..w {
                self.obj[j] -= cb * self.data[i * w + j];
            }
        }
        for &b in &self.basis {
            self.obj[b] = 0.0;
        }
    }
}

/// Solves `lp`. Deterministic: identical input gives bit-identical output.
pub fn solve(lp: &LinearProgram, opts: &SolverOptions) -> Result<LpOutcome, LpError> {
    lp.validate()?;
    let n = lp.num_vars();

    // Map user variables onto nonnegative structural columns.
    let mut columns = Vec::with_capacity(n);
    let mut ncols = 0;
    let mut bound_rows: Vec<(Vec<(usize, f64)>, f64)> = Vec::new();
    for var in 0..n {
        let (l, u) = lp.bounds(var);
        let split = (l == f64::NEG_INFINITY && u == f64::INFINITY) || (l < 0.0 && u >= 0.0 && u.is_finite());
        if split {
            let (pos, neg) = (ncols, ncols + 1);
            ncols += 2;
            if u.is_finite() {
                bound_rows.push((vec![(pos, 1.0), (neg, -1.0)], u));
            }
            if l.is_finite() {
                bound_rows.push((vec![(pos, -1.0), (neg, 1.0)], -l));
            }
            columns.push(Column::Split { pos, neg });
        } else if l.is_finite() {
            let col = ncols;
            ncols += 1;
            if u.is_finite() {
                bound_rows.push((vec![(col, 1.0)], u - l));
            }
            columns.push(Column::Shift { col, offset: l, sign: 1.0 });
        } else {
            let col = ncols;
            ncols += 1;
            columns.push(Column::Shift { col, offset: u, sign: -1.0 });
        }
    }

    // Rows over structural columns, normalized to a nonnegative right-hand side.
    let mut rows: Vec<(Vec<f64>, Relation, f64)> = Vec::with_capacity(lp.constraints().len() + bound_rows.len());
    for c in lp.constraints() {
        let mut coeffs = vec![0.0; ncols];
        let mut rhs = c.rhs;
        for (var, &a) in c.coeffs.iter().enumerate() {
            if a == 0.0 {
                continue;
            }
            match columns[var] {
                Column::Shift { col, offset, sign } => {
                    coeffs[col] += a * sign;
                    rhs -= a * offset;
                }
                Column::Split { pos, neg } => {
                    coeffs[pos] += a;
                    coeffs[neg] -= a;
                }
            }
        }
        rows.push((coeffs, c.relation, rhs));
    }
    for (entries, rhs) in bound_rows {
        let mut coeffs = vec![0.0; ncols];
        for (col, a) in entries {
            coeffs[col] = a;
        }
        rows.push((coeffs, Relation::Le, rhs));
    }
    for (coeffs, rel, rhs) in rows.iter_mut() {
        // Equilibrate so that pivot tolerances are relative to the row scale.
        let scale = coeffs.iter().fold(0.0f64, |m, a| m.max(a.abs()));
        if scale > 0.0 {
            coeffs.iter_mut().for_each(|a| *a /= scale);
            *rhs /= scale;
        }
        let flip = *rhs < 0.0 || (*rhs == 0.0 && *rel == Relation::Ge);
        if flip {
            coeffs.iter_mut().for_each(|a| *a = -*a);
            *rhs = -*rhs;
            *rel = match rel {
                Relation::Le => Relation::Ge,
                Relation::Ge => Relation::Le,
                Relation::Eq => Relation::Eq,
            };
        }
    }

    let m = rows.len();
    let n_slack = rows.iter().filter(|r| r.1 != Relation::Eq).count();
    let n_art = rows.iter().filter(|r| r.1 != Relation::Le).count();
    let first_slack = ncols;
    let first_artificial = ncols + n_slack;
    let width = first_artificial + n_art + 1;

    let mut data = vec![0.0; m * width];
    let mut basis = vec![0; m];
    let (mut s, mut a) = (first_slack, first_artificial);
    for (i, (coeffs, rel, rhs)) in rows.iter().enumerate() {
        let row = &mut data[i * width..(i + 1) * width];
        row[..ncols].copy_from_slice(coeffs);
        row[width - 1] = *rhs;
        match rel {
            Relation::Le => {
                row[s] = 1.0;
                basis[i] = s;
                s += 1;
            }
            Relation::Ge => {
                row[s] = -1.0;
                s += 1;
                row[a] = 1.0;
                basis[i] = a;
                a += 1;
            }
            Relation::Eq => {
                row[a] = 1.0;
                basis[i] = a;
                a += 1;
            }
        }
    }

    let mut tab = Tableau {
        rows: m,
        width,
        data,
        obj: Vec::new(),
        basis,
        first_artificial,
        pivots: 0,
    };

    if n_art > 0 {
        let mut phase1 = vec![0.0; width - 1];
        for c in phase1.iter_mut().skip(first_artificial) {
            *c = -1.0;
        }
        tab.price(&phase1);
        tab.iterate(width - 1, opts)?;
        let residual: f64 = (0..m)
            .filter(|&i| tab.basis[i] >= first_artificial)
            .map(|i| tab.at(i, width - 1))
            .sum();
        if residual > opts.tol {
            return Ok(LpOutcome::Infeasible { residual });
        }
        // Drive zero-level artificials out of the basis where possible.
        for i in 0..m {
            if tab.basis[i] < tab.first_artificial {
                continue;
            }
            let col = (0..first_artificial).find(|&j| tab.at(i, j).abs() > opts.pivot_tol);
            if let Some(j) = col {
                tab.pivot(i, j);
            }
        }
    }

    let mut costs = vec![0.0; width - 1];
    for (var, &c) in lp.objective().iter().enumerate() {
        match columns[var] {
            Column::Shift { col, sign, .. } => costs[col] += c * sign,
            Column::Split { pos, neg } => {
                costs[pos] += c;
                costs[neg] -= c;
            }
        }
    }
    tab.price(&costs);
    if !tab.iterate(first_artificial, opts)? {
        return Ok(LpOutcome::Unbounded);
    }

    let mut values = vec![0.0; ncols];
    for i in 0..m {
        let b = tab.basis[i];
        if b < ncols {
            values[b] = tab.at(i, width - 1);
        }
    }
    let solution: Vec<f64> = columns
        .iter()
        .map(|col| match *col {
            Column::Shift { col, offset, sign } => offset + sign * values[col],
            Column::Split { pos, neg } => values[pos] - values[neg],
        })
        .collect();
    let objective = lp.evaluate(&solution);
    Ok(LpOutcome::Optimal { solution, objective })
}
