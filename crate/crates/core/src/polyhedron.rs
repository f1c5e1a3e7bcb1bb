//! Parametric systems {x : A x ≤ b + B y} and the normalizations that put
//! them into the shape the counting pipeline needs: form conversion,
//! parameter-rank reduction, full-dimensionality, line elimination,
//! parametric bounding, and the per-chamber fiber-dimension reduction.

use crate::arith::{
    dot_rat, gcd_slice, hnf_row, int, int_vec_to_rat, invert_rat_matrix, invert_unimodular,
    kernel_basis_int, lcm_int, rank_rat, rat_floor, solve_rat_matrix, Int, IntMatrix, Rat,
    RatMatrix,
};
use crate::error::{Error, Result};
use crate::lp::{self, LpProblem};
use num::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SystemForm {
    Canonical,
    Standard,
}

/// (A, B, b) with the fiber P_y = {x : A x ≤ b + B y} in canonical form and
/// {x ≥ 0 : A x = b + B y} in standard form.
#[derive(Clone, Debug, PartialEq)]
pub struct ParametricSystem {
    pub form: SystemForm,
    /// A, m × n_x, integer.
    pub coeffs: IntMatrix,
    /// B, m × n_y, rational.
    pub param: RatMatrix,
    /// b, length m, rational.
    pub offset: Vec<Rat>,
}

impl ParametricSystem {
    pub fn canonical(coeffs: IntMatrix, param: RatMatrix, offset: Vec<Rat>) -> Self {
        assert_eq!(coeffs.rows, param.rows);
        assert_eq!(coeffs.rows, offset.len());
        ParametricSystem { form: SystemForm::Canonical, coeffs, param, offset }
    }

    pub fn standard(coeffs: IntMatrix, param: RatMatrix, offset: Vec<Rat>) -> Self {
        assert_eq!(coeffs.rows, param.rows);
        assert_eq!(coeffs.rows, offset.len());
        ParametricSystem { form: SystemForm::Standard, coeffs, param, offset }
    }

    pub fn m(&self) -> usize {
        self.coeffs.rows
    }

    pub fn n_x(&self) -> usize {
        self.coeffs.cols
    }

    pub fn n_y(&self) -> usize {
        self.param.cols
    }

    /// Inequality rows of the fiber at a fixed parameter point.
    pub fn fiber_rows(&self, y: &[Rat]) -> Vec<(Vec<Rat>, Rat)> {
        assert_eq!(self.form, SystemForm::Canonical);
        assert_eq!(y.len(), self.n_y());
        (0..self.m())
            .map(|i| {
                let rhs = &self.offset[i] + dot_rat(self.param.row(i), y);
                (int_vec_to_rat(self.coeffs.row(i)), rhs)
            })
            .collect()
    }

    /// Rows over the joint (x, y) space: A x − B y ≤ b.
    pub fn xy_rows(&self) -> Vec<(Vec<Rat>, Rat)> {
        assert_eq!(self.form, SystemForm::Canonical);
        (0..self.m())
            .map(|i| {
                let mut row = int_vec_to_rat(self.coeffs.row(i));
                row.extend(self.param.row(i).iter().map(|v| -v.clone()));
                (row, self.offset[i].clone())
            })
            .collect()
    }

    /// Right-hand side b + B y at a fixed y.
    pub fn rhs_at(&self, y: &[Rat]) -> Vec<Rat> {
        (0..self.m())
            .map(|i| &self.offset[i] + dot_rat(self.param.row(i), y))
            .collect()
    }
}

// ---------------------------------------------------------------------------
// Residual predicates and the normalization trace
// ---------------------------------------------------------------------------

/// A condition on the original parameter vector that survives a system
/// rewrite. `Consistency` failing means the real fiber is empty (query is
/// OUTSIDE); `Divisibility` failing means the fiber has no integer points
/// (count 0).
#[derive(Clone, Debug, PartialEq)]
pub enum Predicate {
    Consistency { coeffs: Vec<Rat>, offset: Rat },
    Divisibility { coeffs: Vec<Rat>, offset: Rat, modulus: Int },
}

impl Predicate {
    pub fn holds(&self, y: &[Rat]) -> bool {
        match self {
            Predicate::Consistency { coeffs, offset } => {
                (offset + dot_rat(coeffs, y)).is_zero()
            }
            Predicate::Divisibility { coeffs, offset, modulus } => {
                let v = (offset + dot_rat(coeffs, y)) / Rat::from_integer(modulus.clone());
                v.is_integer()
            }
        }
    }
}

/// Data to evaluate the bounding coordinate g(y) of Lemma-style parametric
/// bounding: g(y) = factor · max(a_max, ‖⌊b + B y⌋‖_∞)^{n_x}.
#[derive(Clone, Debug, PartialEq)]
pub struct GBound {
    pub factor: Int,
    pub a_max: Int,
    pub n_x: usize,
    /// Snapshot of (b, B) of the system the bounding row was appended to.
    pub offset: Vec<Rat>,
    pub param: RatMatrix,
}

impl GBound {
    pub fn eval(&self, y: &[Rat]) -> Rat {
        let mut norm = Int::zero();
        for i in 0..self.offset.len() {
            let v = rat_floor(&(&self.offset[i] + dot_rat(self.param.row(i), y))).abs();
            if v > norm {
                norm = v;
            }
        }
        let base = if self.a_max > norm { self.a_max.clone() } else { norm };
        let mut pow = Int::one();
        for _ in 0..self.n_x {
            pow *= &base;
        }
        Rat::from_integer(&self.factor * pow)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum TraceStep {
    /// y' = map · y after dropping linearly dependent parameter columns.
    ParamRankReduction { map: RatMatrix },
    /// Constraints α_i x_i ≥ 0 appended; answers become feasibility-valued.
    LineElimination { indices: Vec<usize>, signs: Vec<i8>, witness: Vec<Int> },
    /// Implicit-equality rows relaxed by ε; integer solution set unchanged.
    FullDimRelaxation { relaxed: Vec<(usize, Rat)> },
    /// Row cᵀx ≤ y_{n_y+1} appended; query gains the coordinate g(y).
    ParametricBounding { row: Vec<Int>, g: GBound, row_scalings: Vec<Int> },
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct NormalizationTrace {
    pub steps: Vec<TraceStep>,
    /// Residual predicates in terms of the ORIGINAL parameter vector.
    pub predicates: Vec<Predicate>,
    /// False once line elimination or bounding switched the pipeline to
    /// feasibility semantics (answers in {0, INFINITE}).
    pub count_preserving: bool,
}

impl NormalizationTrace {
    pub fn new() -> Self {
        NormalizationTrace { steps: Vec::new(), predicates: Vec::new(), count_preserving: true }
    }

    /// Map an original query point into the normalized system's parameter
    /// space.
    pub fn replay(&self, y: &[Rat]) -> Vec<Rat> {
        let mut cur = y.to_vec();
        for step in &self.steps {
            match step {
                TraceStep::ParamRankReduction { map } => {
                    cur = map.mul_vec(&cur);
                }
                TraceStep::ParametricBounding { g, .. } => {
                    let extra = g.eval(&cur);
                    cur.push(extra);
                }
                TraceStep::LineElimination { .. } | TraceStep::FullDimRelaxation { .. } => {}
            }
        }
        cur
    }
}

// ---------------------------------------------------------------------------
// standard → canonical
// ---------------------------------------------------------------------------

/// Column-style Hermite reduction: finds unimodular V with A·V = [L 0],
/// L k×k nonsingular lower-triangular, for a full-row-rank A (k × n).
fn hnf_columns(a: &IntMatrix) -> Result<(IntMatrix, IntMatrix)> {
    let (k, n) = (a.rows, a.cols);
    let mut m = a.clone();
    let mut v = IntMatrix::identity(n);
    for t in 0..k {
        loop {
            let piv = (t..n)
                .filter(|&j| !m[(t, j)].is_zero())
                .min_by_key(|&j| m[(t, j)].abs());
            let Some(p) = piv else {
                return Err(Error::Rank { required: k, found: t });
            };
            if p != t {
                for i in 0..k {
                    let tmp = m[(i, t)].clone();
                    m[(i, t)] = m[(i, p)].clone();
                    m[(i, p)] = tmp;
                }
                for i in 0..n {
                    let tmp = v[(i, t)].clone();
                    v[(i, t)] = v[(i, p)].clone();
                    v[(i, p)] = tmp;
                }
            }
            let mut done = true;
            for j in t + 1..n {
                if m[(t, j)].is_zero() {
                    continue;
                }
                let lam = -(&m[(t, j)] / &m[(t, t)]);
                for i in 0..k {
                    let d = &lam * &m[(i, t)];
                    m[(i, j)] += d;
                }
                for i in 0..n {
                    let d = &lam * &v[(i, t)];
                    v[(i, j)] += d;
                }
                if !m[(t, j)].is_zero() {
                    done = false;
                }
            }
            if done {
                break;
            }
        }
    }
    Ok((m, v))
}

/// Convert a standard-form system {x ≥ 0 : A x = b + B y} to canonical form
/// with n_x − rank(A) variables and n_x rows. The returned predicates carry
/// the consistency of dependent equality rows and the integrality of the
/// forced coordinates; both are conditions on the original y.
pub fn standard_to_canonical(sys: &ParametricSystem) -> Result<(ParametricSystem, Vec<Predicate>)> {
    if sys.form == SystemForm::Canonical {
        return Ok((sys.clone(), Vec::new()));
    }
    let n = sys.n_x();
    let mut predicates = Vec::new();

    // Row basis of A; dependent rows become consistency predicates.
    let a_rat = sys.coeffs.to_rat();
    let mut basis_rows: Vec<usize> = Vec::new();
    for i in 0..sys.m() {
        let mut stack = basis_rows.clone();
        stack.push(i);
        if rank_rat(&a_rat.select_rows(&stack)) == stack.len() {
            basis_rows.push(i);
        }
    }
    let k = basis_rows.len();
    if k < sys.m() {
        // express each dependent row as λ·(basis rows) and demand the same
        // combination of right-hand sides
        let a_basis = a_rat.select_rows(&basis_rows);
        // pick k independent columns of the basis block
        let mut piv_cols: Vec<usize> = Vec::new();
        for j in 0..n {
            let mut cols = piv_cols.clone();
            cols.push(j);
            let sub = RatMatrix::from_rows(
                basis_rows.iter().map(|&r| cols.iter().map(|&c| a_rat[(r, c)].clone()).collect()).collect(),
            );
            if rank_rat(&sub) == cols.len() {
                piv_cols.push(j);
            }
            if piv_cols.len() == k {
                break;
            }
        }
        let square = RatMatrix::from_rows(
            (0..k).map(|r| piv_cols.iter().map(|&c| a_basis[(r, c)].clone()).collect()).collect(),
        );
        let square_t = RatMatrix::from_rows(
            (0..k).map(|i| (0..k).map(|j| square[(j, i)].clone()).collect()).collect(),
        );
        for i in 0..sys.m() {
            if basis_rows.contains(&i) {
                continue;
            }
            let rhs: Vec<Rat> = piv_cols.iter().map(|&c| a_rat[(i, c)].clone()).collect();
            let lambda = solve_rat_matrix(&square_t, &rhs)?;
            // predicate: b_i + B_i y − λ·(b_R + B_R y) = 0
            let mut coeffs: Vec<Rat> = sys.param.row(i).to_vec();
            let mut offset = sys.offset[i].clone();
            for (t, &r) in basis_rows.iter().enumerate() {
                for j in 0..sys.n_y() {
                    let d = &lambda[t] * &sys.param[(r, j)];
                    coeffs[j] -= d;
                }
                offset -= &lambda[t] * &sys.offset[r];
            }
            if coeffs.iter().all(|c| c.is_zero()) && offset.is_zero() {
                continue; // identically consistent
            }
            predicates.push(Predicate::Consistency { coeffs, offset });
        }
    }

    let a_red = sys.coeffs.select_rows(&basis_rows);
    let b_red = sys.param.select_rows(&basis_rows);
    let off_red: Vec<Rat> = basis_rows.iter().map(|&i| sys.offset[i].clone()).collect();

    if k == 0 {
        // no equalities left: canonical is just x ≥ 0
        let mut rows = Vec::new();
        for i in 0..n {
            let mut r = vec![Int::zero(); n];
            r[i] = int(-1);
            rows.push(r);
        }
        let canon = ParametricSystem::canonical(
            IntMatrix::from_rows(rows),
            RatMatrix::zero(n, sys.n_y()),
            vec![Rat::zero(); n],
        );
        return Ok((canon, predicates));
    }

    // A_red·V = [L 0]; x = V x' with x'_{1:k} forced to L^{-1}(b + B y).
    let (l0, v) = hnf_columns(&a_red)?;
    let l = IntMatrix::from_rows((0..k).map(|i| l0.row(i)[..k].to_vec()).collect());
    let l_inv = invert_rat_matrix(&l.to_rat())?;
    let phi_param = l_inv.mul(&b_red); // k × n_y
    let phi_offset = l_inv.mul_vec(&off_red); // k

    for i in 0..k {
        predicates.push(Predicate::Divisibility {
            coeffs: phi_param.row(i).to_vec(),
            offset: phi_offset[i].clone(),
            modulus: Int::one(),
        });
    }

    // x ≥ 0 ⟺ −V₁ φ(y) − V₂ x'' ≤ 0
    let n_free = n - k;
    let mut a_rows: Vec<Vec<Int>> = Vec::with_capacity(n);
    let mut b_rows: Vec<Vec<Rat>> = Vec::with_capacity(n);
    let mut off: Vec<Rat> = Vec::with_capacity(n);
    for i in 0..n {
        a_rows.push((0..n_free).map(|j| -v[(i, k + j)].clone()).collect());
        let mut brow = vec![Rat::zero(); sys.n_y()];
        let mut o = Rat::zero();
        for t in 0..k {
            let v_it = Rat::from_integer(v[(i, t)].clone());
            for j in 0..sys.n_y() {
                brow[j] += &v_it * &phi_param[(t, j)];
            }
            o += &v_it * &phi_offset[t];
        }
        b_rows.push(brow);
        off.push(o);
    }
    let canon = ParametricSystem::canonical(
        IntMatrix::from_rows(a_rows),
        RatMatrix::from_rows(b_rows),
        off,
    );
    Ok((canon, predicates))
}

// ---------------------------------------------------------------------------
// rank(B) = n_y
// ---------------------------------------------------------------------------

/// Drop linearly dependent parameter columns. The returned map sends an
/// original query vector to the reduced one; None when B already has full
/// column rank.
pub fn reduce_parametric_rank(sys: &ParametricSystem) -> (ParametricSystem, Option<RatMatrix>) {
    assert_eq!(sys.form, SystemForm::Canonical);
    let mut cur = sys.clone();
    let mut total: Option<RatMatrix> = None;
    loop {
        let ny = cur.n_y();
        if ny == 0 || rank_rat(&cur.param) == ny {
            return (cur, total);
        }
        // find a column that depends on the preceding independent ones
        let mut indep: Vec<usize> = Vec::new();
        let mut dep = None;
        for j in 0..ny {
            let mut cols = indep.clone();
            cols.push(j);
            let sub = RatMatrix::from_rows(
                (0..cur.m()).map(|i| cols.iter().map(|&c| cur.param[(i, c)].clone()).collect()).collect(),
            );
            if rank_rat(&sub) == cols.len() {
                indep.push(j);
            } else {
                dep = Some(j);
                break;
            }
        }
        let j = dep.expect("rank deficit implies a dependent column");
        // B_j = Σ t_c · B_c over the independent columns before j
        let t = if indep.is_empty() {
            Vec::new() // zero column
        } else {
            // least-squares-free exact solve on independent rows
            let mut piv_rows: Vec<usize> = Vec::new();
            for i in 0..cur.m() {
                let mut rows = piv_rows.clone();
                rows.push(i);
                let sub = RatMatrix::from_rows(
                    rows.iter().map(|&r| indep.iter().map(|&c| cur.param[(r, c)].clone()).collect()).collect(),
                );
                if rank_rat(&sub) == rows.len() {
                    piv_rows.push(i);
                }
                if piv_rows.len() == indep.len() {
                    break;
                }
            }
            let square = RatMatrix::from_rows(
                piv_rows.iter().map(|&r| indep.iter().map(|&c| cur.param[(r, c)].clone()).collect()).collect(),
            );
            let rhs: Vec<Rat> = piv_rows.iter().map(|&r| cur.param[(r, j)].clone()).collect();
            solve_rat_matrix(&square, &rhs).expect("independent columns give a nonsingular block")
        };
        // y' = y with coordinate j folded into the independent ones
        let keep: Vec<usize> = (0..ny).filter(|&c| c != j).collect();
        let mut map = RatMatrix::zero(ny - 1, ny);
        for (new_i, &old) in keep.iter().enumerate() {
            map[(new_i, old)] = Rat::one();
            if let Some(pos) = indep.iter().position(|&c| c == old) {
                map[(new_i, j)] = t[pos].clone();
            }
        }
        let new_param = RatMatrix::from_rows(
            (0..cur.m())
                .map(|i| keep.iter().map(|&c| cur.param[(i, c)].clone()).collect())
                .collect(),
        );
        cur = ParametricSystem::canonical(cur.coeffs.clone(), new_param, cur.offset.clone());
        total = Some(match total {
            None => map,
            Some(prev) => map.mul(&prev),
        });
    }
}

// ---------------------------------------------------------------------------
// Full dimensionality
// ---------------------------------------------------------------------------

#[derive(Clone, Debug, PartialEq)]
pub enum FullDim {
    Empty,
    Unchanged(ParametricSystem),
    Relaxed(ParametricSystem, Vec<(usize, Rat)>),
}

/// Relax implicit-equality rows by a per-row ε > 0 small enough that the
/// set of integer (x, y) points is unchanged.
pub fn ensure_full_dim(sys: &ParametricSystem) -> Result<FullDim> {
    assert_eq!(sys.form, SystemForm::Canonical);
    let nvars = sys.n_x() + sys.n_y();
    let mut cur = sys.clone();
    let mut relaxed: Vec<(usize, Rat)> = Vec::new();
    loop {
        let rows = cur.xy_rows();
        let mut lpp = LpProblem::new(nvars);
        for (a, b) in &rows {
            lpp.add_ineq(a.clone(), b.clone());
        }
        if lpp.feasible_point().is_none() {
            return Ok(FullDim::Empty);
        }
        let implicit = lp::implicit_equality_rows(nvars, &rows);
        let Some(&j) = implicit.first() else {
            break;
        };
        // scale the functional (A_j | −B_j) to integer, gcd 1
        let mut den = Int::one();
        for v in sys_row_functional(&cur, j) {
            den = lcm_int(&den, v.denom());
        }
        let scaled: Vec<Int> = sys_row_functional(&cur, j)
            .iter()
            .map(|v| (v * Rat::from_integer(den.clone())).to_integer())
            .collect();
        let g = gcd_slice(&scaled);
        let scale = Rat::new(den.clone(), g.clone()); // multiply row by this
        let new_rhs = &cur.offset[j] * &scale;
        // ε keeping ⌊rhs + ε⌋ = ⌊rhs⌋ for the integer-valued lhs
        let eps = if new_rhs.is_integer() {
            Rat::new(Int::one(), int(2))
        } else {
            (Rat::from_integer(rat_floor(&new_rhs) + Int::one()) - &new_rhs)
                / Rat::from_integer(int(2))
        };
        let mut coeffs = cur.coeffs.rows_vec();
        let mut param = cur.param.rows_vec();
        let mut offset = cur.offset.clone();
        for v in coeffs[j].iter_mut() {
            let scaled = Rat::from_integer(v.clone()) * &scale;
            debug_assert!(scaled.is_integer());
            *v = scaled.to_integer();
        }
        for v in param[j].iter_mut() {
            *v = &*v * &scale;
        }
        offset[j] = &new_rhs + &eps;
        relaxed.push((j, eps));
        cur = ParametricSystem::canonical(
            IntMatrix::from_rows(coeffs),
            RatMatrix::from_rows(param),
            offset,
        );
    }
    if relaxed.is_empty() {
        Ok(FullDim::Unchanged(cur))
    } else {
        Ok(FullDim::Relaxed(cur, relaxed))
    }
}

fn sys_row_functional(sys: &ParametricSystem, i: usize) -> Vec<Rat> {
    let mut row = int_vec_to_rat(sys.coeffs.row(i));
    row.extend(sys.param.row(i).iter().map(|v| -v.clone()));
    row
}

// ---------------------------------------------------------------------------
// Line elimination
// ---------------------------------------------------------------------------

#[derive(Clone, Debug)]
pub struct LineElimination {
    pub system: ParametricSystem,
    pub indices: Vec<usize>,
    pub signs: Vec<i8>,
    pub witness: Vec<Int>,
}

/// Append constraints α_i x_i ≥ 0 killing the line space of A. None when
/// rank(A) = n_x already.
pub fn eliminate_lines(sys: &ParametricSystem) -> Result<Option<LineElimination>> {
    assert_eq!(sys.form, SystemForm::Canonical);
    let n = sys.n_x();
    let a_rat = sys.coeffs.to_rat();
    let r = rank_rat(&a_rat);
    if r == n {
        return Ok(None);
    }
    // minimal index set I with {e_i} extending the row space to R^n
    let mut indices = Vec::new();
    let mut stacked = sys.coeffs.rows_vec();
    let mut cur_rank = r;
    for i in 0..n {
        let mut e = vec![Int::zero(); n];
        e[i] = Int::one();
        let mut trial = stacked.clone();
        trial.push(e.clone());
        let new_rank = rank_rat(&IntMatrix::from_rows(trial.clone()).to_rat());
        if new_rank > cur_rank {
            indices.push(i);
            stacked.push(e);
            cur_rank = new_rank;
        }
        if cur_rank == n {
            break;
        }
    }
    // witness v in ker(A) with v_i ≠ 0 for all i ∈ I
    let basis = kernel_basis_int(&sys.coeffs);
    if basis.is_empty() {
        return Err(Error::Internal("rank deficit without kernel".into()));
    }
    let mut row_abs_sum = Int::zero();
    for i in 0..n {
        let s: Int = basis.iter().map(|v| v[i].abs()).sum();
        if s > row_abs_sum {
            row_abs_sum = s;
        }
    }
    let big = row_abs_sum + Int::one();
    let mut witness = vec![Int::zero(); n];
    let mut mult = Int::one();
    for v in &basis {
        for i in 0..n {
            witness[i] += &mult * &v[i];
        }
        mult *= &big;
    }
    for &i in &indices {
        if witness[i].is_zero() {
            return Err(Error::Internal("kernel witness vanished on a basis index".into()));
        }
    }
    let signs: Vec<i8> = indices.iter().map(|&i| if witness[i].is_positive() { 1 } else { -1 }).collect();

    let mut coeffs = sys.coeffs.rows_vec();
    let mut param = sys.param.rows_vec();
    let mut offset = sys.offset.clone();
    for (&i, &s) in indices.iter().zip(&signs) {
        let mut row = vec![Int::zero(); n];
        row[i] = int(-(s as i64));
        coeffs.push(row);
        param.push(vec![Rat::zero(); sys.n_y()]);
        offset.push(Rat::zero());
    }
    let system = ParametricSystem::canonical(
        IntMatrix::from_rows(coeffs),
        RatMatrix::from_rows(param),
        offset,
    );
    Ok(Some(LineElimination { system, indices, signs, witness }))
}

// ---------------------------------------------------------------------------
// Parametric bounding
// ---------------------------------------------------------------------------

/// Nonzero extreme ray of {x : A x ≤ 0} for a full-column-rank A, found by
/// the exhaustive basis ray scan; None when the recession cone is {0}.
pub fn recession_ray(a: &IntMatrix) -> Option<Vec<Int>> {
    let (m, n) = (a.rows, a.cols);
    if n == 0 {
        return None;
    }
    for subset in crate::arith::combinations(m, n.saturating_sub(1)) {
        let sub = a.select_rows(&subset);
        let dirs = if subset.is_empty() {
            if n == 1 {
                vec![vec![Int::one()]]
            } else {
                continue;
            }
        } else {
            if rank_rat(&sub.to_rat()) != n - 1 {
                continue;
            }
            kernel_basis_int(&sub)
        };
        for d in dirs {
            if d.iter().all(|v| v.is_zero()) {
                continue;
            }
            for cand in [d.clone(), d.iter().map(|v| -v.clone()).collect::<Vec<_>>()] {
                let img = a.mul_vec(&cand);
                if img.iter().all(|v| !v.is_positive()) {
                    return Some(cand);
                }
            }
        }
    }
    None
}

#[derive(Clone, Debug)]
pub struct ParametricBounding {
    pub system: ParametricSystem,
    pub g: GBound,
    pub appended_row: Vec<Int>,
    pub row_scalings: Vec<Int>,
}

/// Append cᵀx ≤ y_{n_y+1} making every fiber bounded. None when the
/// recession cone is already trivial. Rows are first scaled to clear the
/// denominators of B (recorded), matching the integral-B hypothesis.
pub fn bound_parametrically(sys: &ParametricSystem) -> Result<Option<ParametricBounding>> {
    assert_eq!(sys.form, SystemForm::Canonical);
    let n = sys.n_x();
    if rank_rat(&sys.coeffs.to_rat()) != n {
        return Err(Error::Rank { required: n, found: rank_rat(&sys.coeffs.to_rat()) });
    }
    if recession_ray(&sys.coeffs).is_none() {
        return Ok(None);
    }
    // clear denominators of B row-wise
    let mut coeffs = sys.coeffs.rows_vec();
    let mut param = sys.param.rows_vec();
    let mut offset = sys.offset.clone();
    let mut row_scalings = Vec::with_capacity(sys.m());
    for i in 0..sys.m() {
        let mut den = Int::one();
        for v in &param[i] {
            den = lcm_int(&den, v.denom());
        }
        if den != Int::one() {
            let s = Rat::from_integer(den.clone());
            for v in coeffs[i].iter_mut() {
                *v = &*v * &den;
            }
            for v in param[i].iter_mut() {
                *v = &*v * &s;
            }
            offset[i] = &offset[i] * &s;
        }
        row_scalings.push(den);
    }
    let scaled_a = IntMatrix::from_rows(coeffs.clone());
    // c = −(column sums of A_Bᵀ) for the first basis B
    let mut basis = None;
    for subset in crate::arith::combinations(sys.m(), n) {
        let sub = scaled_a.select_rows(&subset);
        if !crate::arith::determinant(&sub)?.is_zero() {
            basis = Some(subset);
            break;
        }
    }
    let basis = basis.ok_or(Error::Rank { required: n, found: 0 })?;
    let mut c = vec![Int::zero(); n];
    for &i in &basis {
        for j in 0..n {
            c[j] -= &scaled_a[(i, j)];
        }
    }
    let a_max = (0..scaled_a.rows)
        .flat_map(|i| scaled_a.row(i).iter().map(|v| v.abs()))
        .max()
        .unwrap_or_else(Int::zero);
    let c_norm1: Int = c.iter().map(|v| v.abs()).sum();
    let mut factor = Int::one();
    for _ in 0..n.div_ceil(2) {
        factor *= int(n as i64);
    }
    factor *= c_norm1;
    let g = GBound {
        factor,
        a_max,
        n_x: n,
        offset: offset.clone(),
        param: RatMatrix::from_rows(param.clone()),
    };
    // append the row with its fresh parameter column
    let ny = sys.n_y();
    for row in param.iter_mut() {
        row.push(Rat::zero());
    }
    coeffs.push(c.clone());
    let mut new_b_row = vec![Rat::zero(); ny];
    new_b_row.push(Rat::one());
    param.push(new_b_row);
    offset.push(Rat::zero());
    let system = ParametricSystem::canonical(
        IntMatrix::from_rows(coeffs),
        RatMatrix::from_rows(param),
        offset,
    );
    Ok(Some(ParametricBounding { system, g, appended_row: c, row_scalings }))
}

// ---------------------------------------------------------------------------
// Fiber-dimension reduction (per chamber)
// ---------------------------------------------------------------------------

#[derive(Clone, Debug)]
pub struct FiberReduction {
    pub system: ParametricSystem,
    pub predicate: Predicate,
    /// Row of the input system that was substituted out.
    pub row: usize,
}

/// One step of the fiber-dimension reduction at a chamber witness: finds an
/// implicit-equality row of P_w with nonzero x-part, substitutes one
/// variable out via the row HNF, and returns the reduced system together
/// with the divisibility predicate the substitution imposes on y.
pub fn reduce_fiber_dimension(sys: &ParametricSystem, witness: &[Rat]) -> Result<FiberReduction> {
    assert_eq!(sys.form, SystemForm::Canonical);
    let n = sys.n_x();
    if n == 0 {
        return Err(Error::Degenerate("no x variables left to reduce".into()));
    }
    let rows = sys.fiber_rows(witness);
    let implicit = lp::implicit_equality_rows(n, &rows);
    let j = implicit
        .iter()
        .copied()
        .find(|&i| sys.coeffs.row(i).iter().any(|v| !v.is_zero()))
        .ok_or_else(|| Error::Degenerate("fiber is full-dimensional at the witness".into()))?;

    let gamma = gcd_slice(sys.coeffs.row(j));
    let scaled_row: Vec<Int> = sys.coeffs.row(j).iter().map(|v| v / &gamma).collect();
    let predicate = Predicate::Divisibility {
        coeffs: sys.param.row(j).to_vec(),
        offset: sys.offset[j].clone(),
        modulus: gamma.clone(),
    };
    let (_h, q) = hnf_row(&scaled_row)?;
    let q_inv = invert_unimodular(&q)?;
    let m_full = sys.coeffs.mul(&q_inv);
    debug_assert!(m_full[(j, 0)] == gamma && (1..n).all(|t| m_full[(j, t)].is_zero()));

    let gamma_rat = Rat::from_integer(gamma);
    let phi_offset = &sys.offset[j] / &gamma_rat;
    let phi_param: Vec<Rat> = sys.param.row(j).iter().map(|v| v / &gamma_rat).collect();

    let mut coeffs = Vec::with_capacity(sys.m() - 1);
    let mut param = Vec::with_capacity(sys.m() - 1);
    let mut offset = Vec::with_capacity(sys.m() - 1);
    for i in 0..sys.m() {
        if i == j {
            continue;
        }
        let h_i = m_full[(i, 0)].clone();
        coeffs.push(m_full.row(i)[1..].to_vec());
        let h_rat = Rat::from_integer(h_i);
        param.push(
            (0..sys.n_y())
                .map(|t| &sys.param[(i, t)] - &h_rat * &phi_param[t])
                .collect::<Vec<Rat>>(),
        );
        offset.push(&sys.offset[i] - &h_rat * &phi_offset);
    }
    let system = ParametricSystem::canonical(
        IntMatrix::from_rows(coeffs),
        RatMatrix::from_rows(param),
        offset,
    );
    Ok(FiberReduction { system, predicate, row: j })
}

// ---------------------------------------------------------------------------
// Fourier–Motzkin projection
// ---------------------------------------------------------------------------

/// Eliminate the first `k` variables from a system of rational inequality
/// rows, removing redundant rows after each elimination step.
pub fn fourier_motzkin(rows: &[(Vec<Rat>, Rat)], k: usize) -> Vec<(Vec<Rat>, Rat)> {
    let mut cur: Vec<(Vec<Rat>, Rat)> = rows.to_vec();
    for _ in 0..k {
        let mut pos = Vec::new();
        let mut neg = Vec::new();
        let mut zero = Vec::new();
        for (a, b) in &cur {
            let lead = &a[0];
            if lead.is_positive() {
                pos.push((a.clone(), b.clone()));
            } else if lead.is_negative() {
                neg.push((a.clone(), b.clone()));
            } else {
                zero.push((a[1..].to_vec(), b.clone()));
            }
        }
        let mut next = zero;
        for (ap, bp) in &pos {
            for (an, bn) in &neg {
                // ap[0] > 0 > an[0]; combine to cancel the leading variable
                let cp = ap[0].clone();
                let cn = -an[0].clone();
                let row: Vec<Rat> = (1..ap.len())
                    .map(|j| &cn * &ap[j] + &cp * &an[j])
                    .collect();
                let rhs = &cn * bp + &cp * bn;
                next.push((row, rhs));
            }
        }
        // drop trivial rows, error out empty systems later via LP
        next.retain(|(a, b)| !(a.iter().all(|v| v.is_zero()) && !b.is_negative()));
        let nvars = cur[0].0.len() - 1;
        if !next.is_empty() && nvars > 0 {
            let keep = lp::irredundant_rows(nvars, &next, &[]);
            next = keep.into_iter().map(|i| next[i].clone()).collect();
        }
        cur = next;
        if cur.is_empty() {
            break;
        }
    }
    cur
}

/// H-description of Π(P) in y-space via Fourier–Motzkin.
pub fn project_to_parameters(sys: &ParametricSystem) -> Vec<(Vec<Rat>, Rat)> {
    fourier_motzkin(&sys.xy_rows(), sys.n_x())
}

// ---------------------------------------------------------------------------
// JSON system format
// ---------------------------------------------------------------------------

#[derive(Serialize, Deserialize)]
struct SystemDto {
    form: SystemForm,
    #[serde(rename = "A")]
    a: Vec<Vec<String>>,
    #[serde(rename = "B")]
    b_mat: Vec<Vec<String>>,
    b: Vec<String>,
}

pub fn parse_int(s: &str) -> Result<Int> {
    s.trim().parse::<Int>().map_err(|e| Error::Input(format!("bad integer '{s}': {e}")))
}

pub fn parse_rat(s: &str) -> Result<Rat> {
    let t = s.trim();
    match t.split_once('/') {
        Some((p, q)) => {
            let num = parse_int(p)?;
            let den = parse_int(q)?;
            if den.is_zero() {
                return Err(Error::Input(format!("zero denominator in '{s}'")));
            }
            Ok(Rat::new(num, den))
        }
        None => Ok(Rat::from_integer(parse_int(t)?)),
    }
}

pub fn rat_to_string(r: &Rat) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

impl ParametricSystem {
    pub fn to_json(&self) -> String {
        let dto = SystemDto {
            form: self.form,
            a: (0..self.m())
                .map(|i| self.coeffs.row(i).iter().map(|v| v.to_string()).collect())
                .collect(),
            b_mat: (0..self.m())
                .map(|i| self.param.row(i).iter().map(rat_to_string).collect())
                .collect(),
            b: self.offset.iter().map(rat_to_string).collect(),
        };
        serde_json::to_string_pretty(&dto).expect("system serialization")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let dto: SystemDto =
            serde_json::from_str(s).map_err(|e| Error::Input(format!("bad system JSON: {e}")))?;
        let m = dto.a.len();
        if m == 0 {
            return Err(Error::Input("system needs at least one row".into()));
        }
        if dto.b_mat.len() != m || dto.b.len() != m {
            return Err(Error::Input("A, B, b row counts differ".into()));
        }
        let coeffs = IntMatrix::from_rows(
            dto.a
                .iter()
                .map(|row| row.iter().map(|v| parse_int(v)).collect::<Result<Vec<_>>>())
                .collect::<Result<Vec<_>>>()?,
        );
        let n_y = dto.b_mat[0].len();
        if dto.b_mat.iter().any(|r| r.len() != n_y) {
            return Err(Error::Input("ragged B".into()));
        }
        let param = RatMatrix::from_rows(
            dto.b_mat
                .iter()
                .map(|row| row.iter().map(|v| parse_rat(v)).collect::<Result<Vec<_>>>())
                .collect::<Result<Vec<_>>>()?,
        );
        let offset = dto.b.iter().map(|v| parse_rat(v)).collect::<Result<Vec<_>>>()?;
        Ok(ParametricSystem { form: dto.form, coeffs, param, offset })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{rat, rat_int};
    use crate::counting::{brute_force_count, Count};
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    fn count_fiber(sys: &ParametricSystem, y: &[Rat]) -> Count {
        brute_force_count(&sys.coeffs, &sys.rhs_at(y), 1_000_000).unwrap()
    }

    fn count_with_predicates(sys: &ParametricSystem, preds: &[Predicate], y: &[Rat]) -> Count {
        for p in preds {
            if !p.holds(y) {
                return Count::Finite(int(0));
            }
        }
        count_fiber(sys, y)
    }

    fn std_segment() -> ParametricSystem {
        // x1 + x2 = y, x ≥ 0
        ParametricSystem::standard(
            IntMatrix::from_i64(&[&[1, 1]]),
            RatMatrix::from_rows(vec![vec![rat_int(1)]]),
            vec![rat_int(0)],
        )
    }

    #[test]
    fn standard_to_canonical_segment() {
        let (canon, preds) = standard_to_canonical(&std_segment()).unwrap();
        assert_eq!(canon.n_x(), 1);
        assert_eq!(canon.m(), 2);
        for t in 0..=5i64 {
            let y = vec![rat_int(t)];
            let got = count_with_predicates(&canon, &preds, &y);
            assert_eq!(got, Count::Finite(int(t + 1)), "count at y={t}");
        }
    }

    #[test]
    fn standard_to_canonical_identity_on_canonical() {
        let sys = ParametricSystem::canonical(
            IntMatrix::from_i64(&[&[1]]),
            RatMatrix::zero(1, 0),
            vec![rat_int(3)],
        );
        let (out, preds) = standard_to_canonical(&sys).unwrap();
        assert_eq!(out, sys);
        assert!(preds.is_empty());
    }

    #[test]
    fn standard_to_canonical_forced_integrality() {
        // {x ≥ 0 : 2x = y}: count is 1 iff y is a nonnegative even integer
        let sys = ParametricSystem::standard(
            IntMatrix::from_i64(&[&[2]]),
            RatMatrix::from_rows(vec![vec![rat_int(1)]]),
            vec![rat_int(0)],
        );
        let (canon, preds) = standard_to_canonical(&sys).unwrap();
        assert_eq!(canon.n_x(), 0);
        for t in 0..=6i64 {
            let y = vec![rat_int(t)];
            let expect = if t % 2 == 0 { 1 } else { 0 };
            assert_eq!(count_with_predicates(&canon, &preds, &y), Count::Finite(int(expect)));
        }
        assert_eq!(
            count_with_predicates(&canon, &preds, &[rat(1, 2)]),
            Count::Finite(int(0))
        );
    }

    #[test]
    fn standard_to_canonical_random_fibers() {
        let mut rng = StdRng::seed_from_u64(42);
        let mut done = 0;
        while done < 12 {
            let n_x = rng.gen_range(2..=4usize);
            let k = rng.gen_range(1..=2usize.min(n_x - 1));
            let coeffs = IntMatrix::from_rows(
                (0..k).map(|_| (0..n_x).map(|_| int(rng.gen_range(-2..=2))).collect()).collect(),
            );
            if rank_rat(&coeffs.to_rat()) != k {
                continue;
            }
            let param = RatMatrix::from_rows((0..k).map(|_| vec![rat_int(rng.gen_range(-1..=1))]).collect());
            let offset: Vec<Rat> = (0..k).map(|_| rat_int(rng.gen_range(-2..=2))).collect();
            let sys = ParametricSystem::standard(coeffs, param, offset);
            let (canon, preds) = standard_to_canonical(&sys).unwrap();
            let mut used = false;
            for t in -2..=7i64 {
                let y = vec![rat_int(t)];
                let expect = brute_force_standard(&sys, &y);
                if expect == Count::Infinite {
                    continue; // bounded-fiber comparison only
                }
                let got = count_with_predicates(&canon, &preds, &y);
                assert_eq!(got, expect, "fiber y={t} of {sys:?}");
                used = true;
            }
            if used {
                done += 1;
            }
        }
    }

    /// Standard form encoded as inequalities: x ≥ 0, Ax ≤ rhs, −Ax ≤ −rhs.
    fn brute_force_standard(sys: &ParametricSystem, y: &[Rat]) -> Count {
        let n = sys.n_x();
        let rhs = sys.rhs_at(y);
        let mut rows: Vec<Vec<Int>> = Vec::new();
        let mut b: Vec<Rat> = Vec::new();
        for i in 0..n {
            let mut r = vec![Int::zero(); n];
            r[i] = int(-1);
            rows.push(r);
            b.push(rat_int(0));
        }
        for i in 0..sys.m() {
            rows.push(sys.coeffs.row(i).to_vec());
            b.push(rhs[i].clone());
            rows.push(sys.coeffs.row(i).iter().map(|v| -v.clone()).collect());
            b.push(-rhs[i].clone());
        }
        brute_force_count(&IntMatrix::from_rows(rows), &b, 10_000_000).unwrap()
    }

    #[test]
    fn reduce_rank_duplicate_column() {
        // B columns identical: one drops, E agrees on a grid
        let sys = ParametricSystem::canonical(
            IntMatrix::from_i64(&[&[1], &[-1]]),
            RatMatrix::from_rows(vec![vec![rat_int(1), rat_int(1)], vec![rat_int(0), rat_int(0)]]),
            vec![rat_int(0), rat_int(0)],
        );
        let (red, map) = reduce_parametric_rank(&sys);
        assert_eq!(red.n_y(), 1);
        let map = map.unwrap();
        for a in -2..=2i64 {
            for b in -2..=2i64 {
                let y = vec![rat_int(a), rat_int(b)];
                let y_red = map.mul_vec(&y);
                assert_eq!(count_fiber(&sys, &y), count_fiber(&red, &y_red));
            }
        }
    }

    #[test]
    fn reduce_rank_full_rank_noop() {
        let sys = ParametricSystem::canonical(
            IntMatrix::from_i64(&[&[1], &[-1]]),
            RatMatrix::from_rows(vec![vec![rat_int(1)], vec![rat_int(0)]]),
            vec![rat_int(0), rat_int(0)],
        );
        let (red, map) = reduce_parametric_rank(&sys);
        assert_eq!(red, sys);
        assert!(map.is_none());
    }

    #[test]
    fn reduce_rank_zero_b() {
        let sys = ParametricSystem::canonical(
            IntMatrix::from_i64(&[&[1], &[-1]]),
            RatMatrix::zero(2, 1),
            vec![rat_int(2), rat_int(0)],
        );
        let (red, map) = reduce_parametric_rank(&sys);
        assert_eq!(red.n_y(), 0);
        assert!(map.is_some());
        assert_eq!(count_fiber(&red, &[]), Count::Finite(int(3)));
    }

    #[test]
    fn full_dim_point() {
        // {x ≤ 0, −x ≤ 0}: integer set stays {0}
        let sys = ParametricSystem::canonical(
            IntMatrix::from_i64(&[&[1], &[-1]]),
            RatMatrix::zero(2, 0),
            vec![rat_int(0), rat_int(0)],
        );
        match ensure_full_dim(&sys).unwrap() {
            FullDim::Relaxed(out, relaxed) => {
                assert!(!relaxed.is_empty());
                assert_eq!(count_fiber(&out, &[]), Count::Finite(int(1)));
            }
            other => panic!("expected relaxation, got {other:?}"),
        }
    }

    #[test]
    fn full_dim_noop() {
        let sys = ParametricSystem::canonical(
            IntMatrix::from_i64(&[&[1], &[-1]]),
            RatMatrix::zero(2, 0),
            vec![rat_int(1), rat_int(0)],
        );
        assert!(matches!(ensure_full_dim(&sys).unwrap(), FullDim::Unchanged(_)));
    }

    #[test]
    fn full_dim_random_forced_equality() {
        let mut rng = StdRng::seed_from_u64(9);
        let mut done = 0;
        while done < 10 {
            // build a system with a forced equality: a·x ≤ c and −a·x ≤ −c
            let n = rng.gen_range(1..=2usize);
            let a: Vec<i64> = (0..n).map(|_| rng.gen_range(-2..=2)).collect();
            if a.iter().all(|&v| v == 0) {
                continue;
            }
            let c = rng.gen_range(-2..=2i64);
            let mut rows = vec![a.clone(), a.iter().map(|v| -v).collect()];
            let mut off = vec![rat_int(c), rat_int(-c)];
            for i in 0..n {
                let mut r = vec![0i64; n];
                r[i] = 1;
                rows.push(r.clone());
                off.push(rat_int(3));
                r[i] = -1;
                rows.push(r);
                off.push(rat_int(3));
            }
            let sys = ParametricSystem::canonical(
                IntMatrix::from_rows(rows.iter().map(|r| r.iter().map(|&v| int(v)).collect()).collect()),
                RatMatrix::zero(rows.len(), 1),
                off,
            );
            match ensure_full_dim(&sys).unwrap() {
                FullDim::Relaxed(out, _) => {
                    for t in -2..=2i64 {
                        let y = vec![rat_int(t)];
                        assert_eq!(count_fiber(&out, &y), count_fiber(&sys, &y));
                    }
                }
                FullDim::Unchanged(_) => continue,
                FullDim::Empty => continue,
            }
            done += 1;
        }
    }

    #[test]
    fn eliminate_lines_basic() {
        // A = (1 0), one row in R^2: I = {x2 axis}
        let sys = ParametricSystem::canonical(
            IntMatrix::from_i64(&[&[1, 0]]),
            RatMatrix::zero(1, 0),
            vec![rat_int(2)],
        );
        let out = eliminate_lines(&sys).unwrap().unwrap();
        assert_eq!(out.indices, vec![1]);
        assert!(!out.witness[1].is_zero());
        // properties 2–4 on a box: projection preserved (trivial here),
        // no lines, integer-feasibility equivalence per fiber
        assert_eq!(rank_rat(&out.system.coeffs.to_rat()), 2);
        let orig_feasible = count_fiber_box(&sys, 6);
        let new_feasible = count_fiber_box(&out.system, 6);
        assert_eq!(orig_feasible > 0, new_feasible > 0);
    }

    fn count_fiber_box(sys: &ParametricSystem, r: i64) -> usize {
        let n = sys.n_x();
        let mut found = 0;
        let mut x = vec![-r; n];
        'outer: loop {
            let ok = (0..sys.m()).all(|i| {
                let lhs: Rat = (0..n)
                    .map(|j| Rat::from_integer(&sys.coeffs[(i, j)] * int(x[j])))
                    .sum();
                lhs <= sys.offset[i]
            });
            if ok {
                found += 1;
            }
            for j in 0..n {
                x[j] += 1;
                if x[j] <= r {
                    continue 'outer;
                }
                x[j] = -r;
            }
            break;
        }
        found
    }

    #[test]
    fn eliminate_lines_noop() {
        let sys = ParametricSystem::canonical(
            IntMatrix::from_i64(&[&[1], &[-1]]),
            RatMatrix::zero(2, 0),
            vec![rat_int(1), rat_int(0)],
        );
        assert!(eliminate_lines(&sys).unwrap().is_none());
    }

    #[test]
    fn eliminate_lines_zero_matrix() {
        let sys = ParametricSystem::canonical(
            IntMatrix::from_i64(&[&[0]]),
            RatMatrix::zero(1, 0),
            vec![rat_int(1)],
        );
        let out = eliminate_lines(&sys).unwrap().unwrap();
        assert_eq!(out.indices, vec![0]);
        assert_eq!(out.signs, vec![1]);
    }

    #[test]
    fn bounding_halfline() {
        // {x ≥ 0} in R¹, n_y = 0
        let sys = ParametricSystem::canonical(
            IntMatrix::from_i64(&[&[-1]]),
            RatMatrix::zero(1, 0),
            vec![rat_int(0)],
        );
        let out = bound_parametrically(&sys).unwrap().unwrap();
        assert_eq!(out.system.n_y(), 1);
        assert_eq!(out.system.m(), 2);
        // feasibility preserved at the g-augmented query
        let g = out.g.eval(&[]);
        assert!(g >= rat_int(0));
        assert!(matches!(count_fiber(&out.system, &[g]), Count::Finite(v) if v > int(0)));
    }

    #[test]
    fn bounding_noop_for_cube() {
        let sys = ParametricSystem::canonical(
            IntMatrix::from_i64(&[&[1], &[-1]]),
            RatMatrix::zero(2, 0),
            vec![rat_int(1), rat_int(0)],
        );
        assert!(bound_parametrically(&sys).unwrap().is_none());
    }

    #[test]
    fn bounding_knapsack_cone() {
        // {x ≥ 0, x1 + 2x2 = y} converts to a bounded canonical system, so
        // bounding is a no-op there; nonemptiness still matches brute force
        let std = ParametricSystem::standard(
            IntMatrix::from_i64(&[&[1, 2]]),
            RatMatrix::from_rows(vec![vec![rat_int(1)]]),
            vec![rat_int(0)],
        );
        let (canon, preds) = standard_to_canonical(&std).unwrap();
        assert!(bound_parametrically(&canon).unwrap().is_none());
        for t in 0..=12i64 {
            let y = vec![rat_int(t)];
            let got = if preds.iter().all(|p| p.holds(&y)) {
                count_fiber(&canon, &y)
            } else {
                Count::Finite(int(0))
            };
            assert_eq!(matches!(got, Count::Finite(v) if v > int(0)), t >= 0, "y = {t}");
        }

        // {x ≥ 0, x1 − 2x2 = y} keeps an unbounded direction: bounding
        // applies and preserves integer nonemptiness at y' = (y, g(y))
        let std2 = ParametricSystem::standard(
            IntMatrix::from_i64(&[&[1, -2]]),
            RatMatrix::from_rows(vec![vec![rat_int(1)]]),
            vec![rat_int(0)],
        );
        let (canon2, preds2) = standard_to_canonical(&std2).unwrap();
        let out = bound_parametrically(&canon2).unwrap().unwrap();
        assert_eq!(out.system.n_y(), 2);
        for t in -6..=6i64 {
            let y = vec![rat_int(t)];
            let mut yb = y.clone();
            yb.push(out.g.eval(&y));
            let got = if preds2.iter().all(|p| p.holds(&y)) {
                count_fiber(&out.system, &yb)
            } else {
                Count::Finite(int(0))
            };
            // x1 − 2x2 = t with x ≥ 0 has integer solutions for every t
            assert_eq!(matches!(got, Count::Finite(v) if v > int(0)), true, "y = {t}");
        }
    }

    #[test]
    fn fiber_reduction_forced_coordinate() {
        // {x1 = y, 0 ≤ x2 ≤ y}: substitute x1, counts y+1 preserved
        let sys = ParametricSystem::canonical(
            IntMatrix::from_i64(&[&[1, 0], &[-1, 0], &[0, 1], &[0, -1]]),
            RatMatrix::from_rows(vec![
                vec![rat_int(1)],
                vec![rat_int(-1)],
                vec![rat_int(1)],
                vec![rat_int(0)],
            ]),
            vec![rat_int(0); 4],
        );
        let red = reduce_fiber_dimension(&sys, &[rat_int(2)]).unwrap();
        assert_eq!(red.system.n_x(), 1);
        for t in 0..=5i64 {
            let y = vec![rat_int(t)];
            let expect = count_fiber(&sys, &y);
            let got = if red.predicate.holds(&y) {
                count_fiber(&red.system, &y)
            } else {
                Count::Finite(int(0))
            };
            assert_eq!(got, expect, "y = {t}");
        }
    }

    #[test]
    fn fiber_reduction_rejects_full_dim() {
        let sys = ParametricSystem::canonical(
            IntMatrix::from_i64(&[&[1], &[-1]]),
            RatMatrix::zero(2, 0),
            vec![rat_int(1), rat_int(0)],
        );
        assert!(reduce_fiber_dimension(&sys, &[]).is_err());
    }

    #[test]
    fn fiber_reduction_random_degenerate() {
        let mut rng = StdRng::seed_from_u64(23);
        let mut done = 0;
        while done < 10 {
            // x1 fixed to a random multiple relation, x2 boxed
            let g = rng.gen_range(1..=3i64);
            let c = rng.gen_range(-2..=2i64);
            let sys = ParametricSystem::canonical(
                IntMatrix::from_i64(&[&[g, 0], &[-g, 0], &[0, 1], &[0, -1]]),
                RatMatrix::from_rows(vec![
                    vec![rat_int(1)],
                    vec![rat_int(-1)],
                    vec![rat_int(0)],
                    vec![rat_int(0)],
                ]),
                vec![rat_int(c), rat_int(-c), rat_int(3), rat_int(0)],
            );
            // witness must be in the projection: g·x1 = c + y solvable over R always
            let w = vec![rat_int(rng.gen_range(-3..=3))];
            let red = reduce_fiber_dimension(&sys, &w).unwrap();
            for t in -4..=4i64 {
                let y = vec![rat_int(t)];
                let expect = count_fiber(&sys, &y);
                let got = if red.predicate.holds(&y) {
                    count_fiber(&red.system, &y)
                } else {
                    Count::Finite(int(0))
                };
                assert_eq!(got, expect);
            }
            done += 1;
        }
    }

    #[test]
    fn fm_projection_triangle() {
        // x ≥ 0, x ≤ y: projection is y ≥ 0
        let sys = ParametricSystem::canonical(
            IntMatrix::from_i64(&[&[-1], &[1]]),
            RatMatrix::from_rows(vec![vec![rat_int(0)], vec![rat_int(1)]]),
            vec![rat_int(0), rat_int(0)],
        );
        let proj = project_to_parameters(&sys);
        assert_eq!(proj.len(), 1);
        let (a, b) = &proj[0];
        // −y ≤ 0 up to positive scaling
        assert!(a[0].is_negative() && b.is_zero());
    }

    #[test]
    fn json_round_trip() {
        let sys = ParametricSystem::canonical(
            IntMatrix::from_i64(&[&[1, -2], &[0, 3]]),
            RatMatrix::from_rows(vec![vec![rat(1, 2)], vec![rat_int(-1)]]),
            vec![rat(3, 4), rat_int(5)],
        );
        let json = sys.to_json();
        let back = ParametricSystem::from_json(&json).unwrap();
        assert_eq!(back, sys);
    }
}
