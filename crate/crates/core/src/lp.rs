//! Exact rational linear programming.
//!
//! A dense two-phase simplex with Bland's rule on [`Rat`] entries. Sizes
//! here are desk scale (a handful of variables, tens of rows), so the
//! tableau recomputes reduced costs each iteration rather than maintaining
//! a factorization. Everything downstream that needs feasibility,
//! redundancy, implicit equalities, or coordinate bounds goes through this
//! module.

use crate::arith::{dot_rat, Rat};
use num::{One, Signed, Zero};

#[derive(Clone, Debug, PartialEq)]
pub enum LpOutcome {
    Infeasible,
    Unbounded,
    Optimal { x: Vec<Rat>, value: Rat },
}

/// maximize obj·x subject to ineqs (a·x ≤ b) and eqs (a·x = b), x free.
#[derive(Clone, Debug, Default)]
pub struct LpProblem {
    pub num_vars: usize,
    pub ineqs: Vec<(Vec<Rat>, Rat)>,
    pub eqs: Vec<(Vec<Rat>, Rat)>,
}

impl LpProblem {
    pub fn new(num_vars: usize) -> Self {
        LpProblem { num_vars, ineqs: Vec::new(), eqs: Vec::new() }
    }

    pub fn add_ineq(&mut self, coeffs: Vec<Rat>, rhs: Rat) {
        assert_eq!(coeffs.len(), self.num_vars);
        self.ineqs.push((coeffs, rhs));
    }

    pub fn add_eq(&mut self, coeffs: Vec<Rat>, rhs: Rat) {
        assert_eq!(coeffs.len(), self.num_vars);
        self.eqs.push((coeffs, rhs));
    }

    pub fn maximize(&self, obj: &[Rat]) -> LpOutcome {
        assert_eq!(obj.len(), self.num_vars);
        if self.num_vars == 0 {
            let ok = self.ineqs.iter().all(|(_, b)| !b.is_negative())
                && self.eqs.iter().all(|(_, b)| b.is_zero());
            return if ok {
                LpOutcome::Optimal { x: Vec::new(), value: Rat::zero() }
            } else {
                LpOutcome::Infeasible
            };
        }
        simplex(self, obj)
    }

    pub fn minimize(&self, obj: &[Rat]) -> LpOutcome {
        let neg: Vec<Rat> = obj.iter().map(|c| -c.clone()).collect();
        match self.maximize(&neg) {
            LpOutcome::Optimal { x, value } => LpOutcome::Optimal { x, value: -value },
            other => other,
        }
    }

    /// Any feasible point, or None.
    pub fn feasible_point(&self) -> Option<Vec<Rat>> {
        match self.maximize(&vec![Rat::zero(); self.num_vars]) {
            LpOutcome::Optimal { x, .. } => Some(x),
            _ => None,
        }
    }
}

/// Feasibility of a system with strict rows (a·x < b). Solved by
/// max t s.t. a·x + t ≤ b for the strict rows, t ≤ 1; feasible iff the
/// optimum is positive. Returns a witness satisfying every strict row
/// strictly.
pub fn strict_feasible_point(
    num_vars: usize,
    closed: &[(Vec<Rat>, Rat)],
    eqs: &[(Vec<Rat>, Rat)],
    strict: &[(Vec<Rat>, Rat)],
) -> Option<Vec<Rat>> {
    if strict.is_empty() {
        let mut lp = LpProblem::new(num_vars);
        for (a, b) in closed {
            lp.add_ineq(a.clone(), b.clone());
        }
        for (a, b) in eqs {
            lp.add_eq(a.clone(), b.clone());
        }
        return lp.feasible_point();
    }
    let mut lp = LpProblem::new(num_vars + 1);
    for (a, b) in closed {
        let mut row = a.clone();
        row.push(Rat::zero());
        lp.add_ineq(row, b.clone());
    }
    for (a, b) in eqs {
        let mut row = a.clone();
        row.push(Rat::zero());
        lp.add_eq(row, b.clone());
    }
    for (a, b) in strict {
        let mut row = a.clone();
        row.push(Rat::one());
        lp.add_ineq(row, b.clone());
    }
    let mut cap = vec![Rat::zero(); num_vars];
    cap.push(Rat::one());
    lp.add_ineq(cap.clone(), Rat::one()); // t ≤ 1
    match lp.maximize(&cap) {
        LpOutcome::Optimal { x, value } if value.is_positive() => {
            Some(x[..num_vars].to_vec())
        }
        _ => None,
    }
}

/// Indices of irredundant rows among `rows` (a·x ≤ b), relative to the
/// whole system plus optional equalities. A row is redundant when removing
/// it leaves its inequality implied.
pub fn irredundant_rows(
    num_vars: usize,
    rows: &[(Vec<Rat>, Rat)],
    eqs: &[(Vec<Rat>, Rat)],
) -> Vec<usize> {
    let mut keep: Vec<bool> = vec![true; rows.len()];
    for i in 0..rows.len() {
        let mut lp = LpProblem::new(num_vars);
        for (j, (a, b)) in rows.iter().enumerate() {
            if j == i || !keep[j] {
                continue;
            }
            lp.add_ineq(a.clone(), b.clone());
        }
        for (a, b) in eqs {
            lp.add_eq(a.clone(), b.clone());
        }
        let (ai, bi) = &rows[i];
        match lp.maximize(ai) {
            LpOutcome::Optimal { value, .. } => {
                if &value <= bi {
                    keep[i] = false;
                }
            }
            LpOutcome::Infeasible => {
                // the rest of the system is already empty; row i adds nothing
                keep[i] = false;
            }
            LpOutcome::Unbounded => {}
        }
    }
    (0..rows.len()).filter(|&i| keep[i]).collect()
}

/// Rows that hold with equality everywhere on the feasible set.
pub fn implicit_equality_rows(num_vars: usize, rows: &[(Vec<Rat>, Rat)]) -> Vec<usize> {
    let mut lp = LpProblem::new(num_vars);
    for (a, b) in rows {
        lp.add_ineq(a.clone(), b.clone());
    }
    let mut out = Vec::new();
    for (i, (a, b)) in rows.iter().enumerate() {
        // max slack b - a·x over the set; zero optimum ⇒ implicit equality
        let neg: Vec<Rat> = a.iter().map(|c| -c.clone()).collect();
        match lp.maximize(&neg) {
            LpOutcome::Optimal { value, .. } => {
                if -value == *b {
                    out.push(i);
                }
            }
            _ => {}
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq)]
pub enum Bound {
    Value(Rat),
    Unbounded,
}

/// Exact per-coordinate range of the feasible set; None when empty.
pub fn coordinate_bounds(
    num_vars: usize,
    rows: &[(Vec<Rat>, Rat)],
) -> Option<Vec<(Bound, Bound)>> {
    let mut lp = LpProblem::new(num_vars);
    for (a, b) in rows {
        lp.add_ineq(a.clone(), b.clone());
    }
    lp.feasible_point()?;
    let mut out = Vec::with_capacity(num_vars);
    for i in 0..num_vars {
        let mut obj = vec![Rat::zero(); num_vars];
        obj[i] = Rat::one();
        let hi = match lp.maximize(&obj) {
            LpOutcome::Optimal { value, .. } => Bound::Value(value),
            LpOutcome::Unbounded => Bound::Unbounded,
            LpOutcome::Infeasible => return None,
        };
        let lo = match lp.minimize(&obj) {
            LpOutcome::Optimal { value, .. } => Bound::Value(value),
            LpOutcome::Unbounded => Bound::Unbounded,
            LpOutcome::Infeasible => return None,
        };
        out.push((lo, hi));
    }
    Some(out)
}

// ---------------------------------------------------------------------------
// Simplex core
// ---------------------------------------------------------------------------

struct Tableau {
    a: Vec<Vec<Rat>>, // m × n
    b: Vec<Rat>,      // m, kept ≥ 0
    basis: Vec<usize>,
    n: usize,
}

impl Tableau {
    fn pivot(&mut self, r: usize, c: usize) {
        let piv = self.a[r][c].clone();
        for j in 0..self.n {
            self.a[r][j] = &self.a[r][j] / &piv;
        }
        self.b[r] = &self.b[r] / &piv;
        for i in 0..self.a.len() {
            if i == r || self.a[i][c].is_zero() {
                continue;
            }
            let f = self.a[i][c].clone();
            for j in 0..self.n {
                let d = &f * &self.a[r][j];
                self.a[i][j] -= d;
            }
            let d = &f * &self.b[r];
            self.b[i] -= d;
        }
        self.basis[r] = c;
    }

    /// Bland's rule; maximizes cost·x over the current feasible region.
    /// Returns false when unbounded.
    fn run(&mut self, cost: &[Rat]) -> bool {
        loop {
            // reduced costs: c_j - c_B · col_j
            let cb: Vec<Rat> = self.basis.iter().map(|&v| cost[v].clone()).collect();
            let mut entering = None;
            for j in 0..self.n {
                if self.basis.contains(&j) {
                    continue;
                }
                let mut rc = cost[j].clone();
                for i in 0..self.a.len() {
                    if cb[i].is_zero() || self.a[i][j].is_zero() {
                        continue;
                    }
                    rc -= &cb[i] * &self.a[i][j];
                }
                if rc.is_positive() {
                    entering = Some(j);
                    break; // smallest index: Bland
                }
            }
            let Some(c) = entering else { return true };
            let mut leave: Option<(usize, Rat)> = None;
            for i in 0..self.a.len() {
                if !self.a[i][c].is_positive() {
                    continue;
                }
                let ratio = &self.b[i] / &self.a[i][c];
                match &leave {
                    None => leave = Some((i, ratio)),
                    Some((bi, br)) => {
                        if ratio < *br || (ratio == *br && self.basis[i] < self.basis[*bi]) {
                            leave = Some((i, ratio));
                        }
                    }
                }
            }
            let Some((r, _)) = leave else { return false };
            self.pivot(r, c);
        }
    }
}

fn simplex(p: &LpProblem, obj: &[Rat]) -> LpOutcome {
    let n0 = p.num_vars;
    // x = u - w with u, w ≥ 0; slacks for inequalities; artificials per row.
    let m = p.ineqs.len() + p.eqs.len();
    let n_slack = p.ineqs.len();
    let n = 2 * n0 + n_slack + m;
    let mut a = vec![vec![Rat::zero(); n]; m];
    let mut b = vec![Rat::zero(); m];
    let mut basis = vec![0usize; m];

    let mut r = 0;
    for (k, (row, rhs)) in p.ineqs.iter().enumerate() {
        for j in 0..n0 {
            a[r][j] = row[j].clone();
            a[r][n0 + j] = -row[j].clone();
        }
        a[r][2 * n0 + k] = Rat::one();
        b[r] = rhs.clone();
        r += 1;
    }
    for (row, rhs) in &p.eqs {
        for j in 0..n0 {
            a[r][j] = row[j].clone();
            a[r][n0 + j] = -row[j].clone();
        }
        b[r] = rhs.clone();
        r += 1;
    }
    // normalize rhs ≥ 0, install artificial basis
    for i in 0..m {
        if b[i].is_negative() {
            for j in 0..n {
                a[i][j] = -a[i][j].clone();
            }
            b[i] = -b[i].clone();
        }
        let art = 2 * n0 + n_slack + i;
        a[i][art] = Rat::one();
        basis[i] = art;
    }

    let mut t = Tableau { a, b, basis, n };

    // Phase 1: drive artificials to zero.
    let mut cost1 = vec![Rat::zero(); n];
    for j in 2 * n0 + n_slack..n {
        cost1[j] = -Rat::one();
    }
    t.run(&cost1); // bounded by construction
    let phase1: Rat = t
        .basis
        .iter()
        .enumerate()
        .filter(|(_, &v)| v >= 2 * n0 + n_slack)
        .map(|(i, _)| t.b[i].clone())
        .sum();
    if !phase1.is_zero() {
        return LpOutcome::Infeasible;
    }
    // Pivot lingering artificials out; drop dependent rows.
    let art_start = 2 * n0 + n_slack;
    let mut drop_rows = Vec::new();
    for i in 0..t.a.len() {
        if t.basis[i] < art_start {
            continue;
        }
        let col = (0..art_start).find(|&j| !t.a[i][j].is_zero());
        match col {
            Some(c) => t.pivot(i, c),
            None => drop_rows.push(i),
        }
    }
    for &i in drop_rows.iter().rev() {
        t.a.remove(i);
        t.b.remove(i);
        t.basis.remove(i);
    }
    // Erase artificial columns so they never re-enter.
    for row in t.a.iter_mut() {
        for j in art_start..n {
            row[j] = Rat::zero();
        }
    }

    // Phase 2.
    let mut cost2 = vec![Rat::zero(); n];
    for j in 0..n0 {
        cost2[j] = obj[j].clone();
        cost2[n0 + j] = -obj[j].clone();
    }
    if !t.run(&cost2) {
        return LpOutcome::Unbounded;
    }
    let mut x = vec![Rat::zero(); n0];
    for (i, &v) in t.basis.iter().enumerate() {
        if v < n0 {
            x[v] += t.b[i].clone();
        } else if v < 2 * n0 {
            x[v - n0] -= t.b[i].clone();
        }
    }
    let value = dot_rat(obj, &x);
    LpOutcome::Optimal { x, value }
}
