//! Dense linear program for cutting-plane loops.
//!
//! Primal problem over `y ∈ R^n`:
//!
//! ```text
//! minimize  c·y   subject to  a_k·y >= b_k (k = 1..K),  -κ <= y_i <= κ
//! ```
//!
//! It is solved through its dual, a standard-form program with `n` equality
//! rows and one column per cut plus two per box bound:
//!
//! ```text
//! maximize  Σ b_k λ_k - κ Σ (μ⁻_i + μ⁺_i)
//! subject to Σ λ_k a_k + μ⁻ - μ⁺ = c,  λ, μ >= 0
//! ```
//!
//! The box columns give an immediately feasible starting basis, and adding a
//! cut only appends a column, so the current basis stays feasible and every
//! re-solve is warm. The primal solution is the vector of simplex multipliers.

use nalgebra::DMatrix;

use crate::error::{Error, Result};

/// Reduced-gain threshold for optimality.
pub const OPTIMALITY_TOL: f64 = 1e-9;
const PIVOT_TOL: f64 = 1e-9;
const HARRIS_TOL: f64 = 1e-10;
const REFACTOR_EVERY: usize = 64;
const DEGENERATE_BEFORE_BLAND: usize = 200;
const MAX_ITERATIONS: usize = 200_000;
const BOX_WEIGHT_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Column {
    /// `μ⁻_i`, column `e_i`
    Lower(usize),
    /// `μ⁺_i`, column `-e_i`
    Upper(usize),
    Cut(usize),
}

#[derive(Clone, Debug)]
pub struct LpSolution {
    pub y: Vec<f64>,
    /// `c·y`
    pub objective: f64,
    pub iterations: usize,
    /// The box carries positive dual weight, so `objective` bounds only the
    /// boxed problem.
    pub at_bound: bool,
}

#[derive(Clone, Debug)]
pub struct CuttingPlaneLp {
    n: usize,
    cost: Vec<f64>,
    kappa: f64,
    cuts: Vec<f64>,
    rhs: Vec<f64>,
    norms: Vec<f64>,
    basis: Vec<Column>,
    cut_basic: Vec<bool>,
    lower_basic: Vec<bool>,
    upper_basic: Vec<bool>,
    binv: Vec<f64>,
    xb: Vec<f64>,
    since_refactor: usize,
}

impl CuttingPlaneLp {
    pub fn new(cost: Vec<f64>, kappa: f64) -> Result<Self> {
        if !(kappa > 0.0) || !kappa.is_finite() {
            return Err(Error::Config(format!("box bound {kappa} must be positive")));
        }
        if cost.iter().any(|c| !c.is_finite()) {
            return Err(Error::NonFinite);
        }
        let n = cost.len();
        let mut lp = CuttingPlaneLp {
            n,
            cost,
            kappa,
            cuts: Vec::new(),
            rhs: Vec::new(),
            norms: Vec::new(),
            basis: Vec::new(),
            cut_basic: Vec::new(),
            lower_basic: vec![false; n],
            upper_basic: vec![false; n],
            binv: Vec::new(),
            xb: Vec::new(),
            since_refactor: 0,
        };
        lp.reset_basis();
        Ok(lp)
    }

    fn reset_basis(&mut self) {
        let n = self.n;
        self.basis.clear();
        self.binv = vec![0.0; n * n];
        self.xb = vec![0.0; n];
        self.lower_basic.iter_mut().for_each(|b| *b = false);
        self.upper_basic.iter_mut().for_each(|b| *b = false);
        self.cut_basic.iter_mut().for_each(|b| *b = false);
        for i in 0..n {
            if self.cost[i] >= 0.0 {
                self.basis.push(Column::Lower(i));
                self.lower_basic[i] = true;
                self.binv[i * n + i] = 1.0;
                self.xb[i] = self.cost[i];
            } else {
                self.basis.push(Column::Upper(i));
                self.upper_basic[i] = true;
                self.binv[i * n + i] = -1.0;
                self.xb[i] = -self.cost[i];
            }
        }
        self.since_refactor = 0;
    }

    pub fn vars(&self) -> usize {
        self.n
    }

    pub fn cut_count(&self) -> usize {
        self.rhs.len()
    }

    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    pub fn set_kappa(&mut self, kappa: f64) {
        self.kappa = kappa;
    }

    /// Adds the constraint `a·y >= b`.
    pub fn add_cut(&mut self, a: &[f64], b: f64) -> Result<()> {
        if a.len() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                found: a.len(),
            });
        }
        if a.iter().any(|v| !v.is_finite()) || !b.is_finite() {
            return Err(Error::NonFinite);
        }
        let norm = a.iter().map(|v| v * v).sum::<f64>().sqrt().max(1e-12);
        self.cuts.extend_from_slice(a);
        self.rhs.push(b);
        self.norms.push(norm);
        self.cut_basic.push(false);
        Ok(())
    }

    fn cut(&self, k: usize) -> &[f64] {
        &self.cuts[k * self.n..(k + 1) * self.n]
    }

    fn gain(&self, c: Column) -> f64 {
        match c {
            Column::Lower(_) | Column::Upper(_) => -self.kappa,
            Column::Cut(k) => self.rhs[k],
        }
    }

    fn bland_rank(&self, c: Column) -> usize {
        match c {
            Column::Lower(i) => i,
            Column::Upper(i) => self.n + i,
            Column::Cut(k) => 2 * self.n + k,
        }
    }

    fn set_basic(&mut self, c: Column, v: bool) {
        match c {
            Column::Lower(i) => self.lower_basic[i] = v,
            Column::Upper(i) => self.upper_basic[i] = v,
            Column::Cut(k) => self.cut_basic[k] = v,
        }
    }

    fn column(&self, c: Column) -> Vec<f64> {
        let mut v = vec![0.0; self.n];
        match c {
            Column::Lower(i) => v[i] = 1.0,
            Column::Upper(i) => v[i] = -1.0,
            Column::Cut(k) => v.copy_from_slice(self.cut(k)),
        }
        v
    }

    /// `π = B^{-T} g_B`
    fn multipliers(&self) -> Vec<f64> {
        let n = self.n;
        let mut pi = vec![0.0; n];
        for (r, &c) in self.basis.iter().enumerate() {
            let g = self.gain(c);
            if g != 0.0 {
                let row = &self.binv[r * n..(r + 1) * n];
                for (p, b) in pi.iter_mut().zip(row) {
                    *p += g * b;
                }
            }
        }
        pi
    }

    /// `B^{-1} M_j`
    fn direction(&self, c: Column) -> Vec<f64> {
        let n = self.n;
        let mut alpha = vec![0.0; n];
        match c {
            Column::Lower(i) | Column::Upper(i) => {
                let s = if matches!(c, Column::Lower(_)) { 1.0 } else { -1.0 };
                for (r, a) in alpha.iter_mut().enumerate() {
                    *a = s * self.binv[r * n + i];
                }
            }
            Column::Cut(k) => {
                let col = self.cut(k);
                for (r, a) in alpha.iter_mut().enumerate() {
                    let row = &self.binv[r * n..(r + 1) * n];
                    *a = row.iter().zip(col).map(|(x, y)| x * y).sum();
                }
            }
        }
        alpha
    }

    fn refactor(&mut self) -> Result<bool> {
        let n = self.n;
        let mut b = DMatrix::<f64>::zeros(n, n);
        for (j, &c) in self.basis.iter().enumerate() {
            for (i, v) in self.column(c).into_iter().enumerate() {
                b[(i, j)] = v;
            }
        }
        let Some(inv) = b.lu().try_inverse() else {
            return Ok(false);
        };
        for r in 0..n {
            for c in 0..n {
                self.binv[r * n + c] = inv[(r, c)];
            }
        }
        for r in 0..n {
            let row = &self.binv[r * n..(r + 1) * n];
            self.xb[r] = row.iter().zip(&self.cost).map(|(x, y)| x * y).sum();
        }
        self.since_refactor = 0;
        Ok(self.xb.iter().all(|&x| x > -1e-7))
    }

    /// Best entering column by normalized reduced gain.
    fn price(&self, pi: &[f64], bland: bool) -> Option<(Column, f64)> {
        let mut best: Option<(Column, f64)> = None;
        let mut consider = |c: Column, score: f64| {
            if score > OPTIMALITY_TOL {
                let better = match best {
                    None => true,
                    Some((_, s)) => !bland && score > s,
                };
                if better {
                    best = Some((c, score));
                }
            }
        };
        for (i, p) in pi.iter().enumerate().take(self.n) {
            if !self.lower_basic[i] {
                consider(Column::Lower(i), -self.kappa - p);
            }
            if !self.upper_basic[i] {
                consider(Column::Upper(i), -self.kappa + p);
            }
        }
        for k in 0..self.rhs.len() {
            if self.cut_basic[k] {
                continue;
            }
            let dot: f64 = self.cut(k).iter().zip(pi).map(|(a, p)| a * p).sum();
            consider(Column::Cut(k), (self.rhs[k] - dot) / self.norms[k]);
        }
        best
    }

    /// Harris two-pass ratio test; returns the leaving row and step length.
    fn ratio(&self, alpha: &[f64], bland: bool) -> Option<(usize, f64)> {
        let mut bound = f64::INFINITY;
        for (r, &a) in alpha.iter().enumerate() {
            if a > PIVOT_TOL {
                bound = bound.min((self.xb[r].max(0.0) + HARRIS_TOL) / a);
            }
        }
        if !bound.is_finite() {
            return None;
        }
        let mut pick: Option<usize> = None;
        for (r, &a) in alpha.iter().enumerate() {
            if a > PIVOT_TOL && self.xb[r].max(0.0) / a <= bound {
                pick = match pick {
                    None => Some(r),
                    Some(p) if bland => {
                        if self.bland_rank(self.basis[r]) < self.bland_rank(self.basis[p]) {
                            Some(r)
                        } else {
                            Some(p)
                        }
                    }
                    Some(p) => Some(if a > alpha[p] { r } else { p }),
                };
            }
        }
        pick.map(|r| (r, (self.xb[r].max(0.0) / alpha[r]).max(0.0)))
    }

    fn pivot(&mut self, r: usize, entering: Column, alpha: &[f64], theta: f64) {
        let n = self.n;
        for (i, x) in self.xb.iter_mut().enumerate() {
            *x -= theta * alpha[i];
        }
        self.xb[r] = theta;
        let leaving = self.basis[r];
        self.set_basic(leaving, false);
        self.set_basic(entering, true);
        self.basis[r] = entering;

        let piv = alpha[r];
        let (before, rest) = self.binv.split_at_mut(r * n);
        let (prow, after) = rest.split_at_mut(n);
        for v in prow.iter_mut() {
            *v /= piv;
        }
        for (i, row) in before.chunks_mut(n).chain(after.chunks_mut(n)).enumerate() {
            let i = if i < r { i } else { i + 1 };
            let f = alpha[i];
            if f != 0.0 {
                for (x, p) in row.iter_mut().zip(prow.iter()) {
                    *x -= f * p;
                }
            }
        }
        self.since_refactor += 1;
    }

    /// Re-optimizes from the current basis.
    pub fn solve(&mut self) -> Result<LpSolution> {
        let mut iterations = 0;
        let mut degenerate = 0;
        let mut resets = 0;
        loop {
            if self.since_refactor >= REFACTOR_EVERY && !self.refactor()? {
                resets += 1;
                if resets > 3 {
                    return Err(Error::Lp("basis repeatedly lost feasibility".into()));
                }
                self.reset_basis();
            }
            let pi = self.multipliers();
            let bland = degenerate > DEGENERATE_BEFORE_BLAND;
            let Some((entering, _)) = self.price(&pi, bland) else {
                let objective = self.cost.iter().zip(&pi).map(|(c, y)| c * y).sum();
                let box_weight: f64 = self
                    .basis
                    .iter()
                    .zip(&self.xb)
                    .filter(|(c, _)| !matches!(c, Column::Cut(_)))
                    .map(|(_, x)| x.max(0.0))
                    .sum();
                let at_bound = box_weight > BOX_WEIGHT_TOL;
                return Ok(LpSolution {
                    y: pi,
                    objective,
                    iterations,
                    at_bound,
                });
            };
            let alpha = self.direction(entering);
            let Some((r, theta)) = self.ratio(&alpha, bland) else {
                // an unbounded dual means an empty primal, impossible while y = 0 is feasible
                return Err(Error::Lp("dual unbounded: primal constraints inconsistent".into()));
            };
            if theta <= 1e-14 {
                degenerate += 1;
            } else {
                degenerate = 0;
            }
            self.pivot(r, entering, &alpha, theta);
            iterations += 1;
            if iterations > MAX_ITERATIONS {
                return Err(Error::Lp(format!("no optimum after {MAX_ITERATIONS} pivots")));
            }
        }
    }
}
