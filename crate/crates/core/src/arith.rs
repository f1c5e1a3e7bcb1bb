//! Exact arbitrary-precision integer and rational linear algebra.
//!
//! Everything downstream (normal forms, vertex maps, generating-function
//! tables) is built on the two aliases [`Int`] and [`Rat`]; no floating
//! point appears anywhere in the crate.

use crate::error::{Error, Result};
use num::bigint::Sign;
use num::{BigInt, BigRational, Integer, One, Signed, Zero};

pub type Int = BigInt;
pub type Rat = BigRational;

pub fn int(v: i64) -> Int {
    Int::from(v)
}

pub fn rat(p: i64, q: i64) -> Rat {
    Rat::new(Int::from(p), Int::from(q))
}

pub fn rat_int(v: i64) -> Rat {
    Rat::from_integer(Int::from(v))
}

/// Exact floor of a rational number.
pub fn rat_floor(x: &Rat) -> Int {
    x.floor().to_integer()
}

/// Exact ceiling of a rational number.
pub fn rat_ceil(x: &Rat) -> Int {
    x.ceil().to_integer()
}

/// Fractional part x - floor(x), in [0, 1).
pub fn rat_fract(x: &Rat) -> Rat {
    x - Rat::from_integer(rat_floor(x))
}

pub fn lcm_int(a: &Int, b: &Int) -> Int {
    if a.is_zero() && b.is_zero() {
        Int::zero()
    } else {
        a.lcm(b)
    }
}

/// Smallest positive rational that is an integer multiple of both arguments.
pub fn lcm_rat(a: &Rat, b: &Rat) -> Rat {
    Rat::new(a.numer().lcm(b.numer()), a.denom().gcd(b.denom()))
}

/// gcd of a slice, zero for an all-zero slice.
pub fn gcd_slice(v: &[Int]) -> Int {
    let mut g = Int::zero();
    for x in v {
        g = g.gcd(x);
    }
    g
}

// ---------------------------------------------------------------------------
// Matrices
// ---------------------------------------------------------------------------

/// Dense integer matrix in row-major order.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct IntMatrix {
    pub rows: usize,
    pub cols: usize,
    data: Vec<Int>,
}

impl IntMatrix {
    pub fn zero(rows: usize, cols: usize) -> Self {
        IntMatrix { rows, cols, data: vec![Int::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zero(n, n);
        for i in 0..n {
            m[(i, i)] = Int::one();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<Int>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        IntMatrix { rows: r, cols: c, data: rows.into_iter().flatten().collect() }
    }

    pub fn from_i64(rows: &[&[i64]]) -> Self {
        Self::from_rows(rows.iter().map(|r| r.iter().map(|&v| int(v)).collect()).collect())
    }

    pub fn row(&self, i: usize) -> &[Int] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn col(&self, j: usize) -> Vec<Int> {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn transpose(&self) -> IntMatrix {
        let mut t = IntMatrix::zero(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)].clone();
            }
        }
        t
    }

    pub fn mul(&self, other: &IntMatrix) -> IntMatrix {
        assert_eq!(self.cols, other.rows, "dimension mismatch in mul");
        let mut out = IntMatrix::zero(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let prod = a * &other[(k, j)];
                    out[(i, j)] += prod;
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[Int]) -> Vec<Int> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|i| self.row(i).iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }

    /// Rows selected by `idx`, in the given order.
    pub fn select_rows(&self, idx: &[usize]) -> IntMatrix {
        IntMatrix::from_rows(idx.iter().map(|&i| self.row(i).to_vec()).collect())
    }

    pub fn to_rat(&self) -> RatMatrix {
        RatMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|x| Rat::from_integer(x.clone())).collect(),
        }
    }

    pub fn rows_vec(&self) -> Vec<Vec<Int>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }
}

impl std::ops::Index<(usize, usize)> for IntMatrix {
    type Output = Int;
    fn index(&self, (i, j): (usize, usize)) -> &Int {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for IntMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Int {
        &mut self.data[i * self.cols + j]
    }
}

impl std::fmt::Debug for IntMatrix {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "IntMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            writeln!(f, "  {:?}", self.row(i).iter().map(|x| x.to_string()).collect::<Vec<_>>())?;
        }
        write!(f, "]")
    }
}

/// Dense rational matrix in row-major order.
#[derive(Clone, PartialEq, Eq)]
pub struct RatMatrix {
    pub rows: usize,
    pub cols: usize,
    data: Vec<Rat>,
}

impl RatMatrix {
    pub fn zero(rows: usize, cols: usize) -> Self {
        RatMatrix { rows, cols, data: vec![Rat::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zero(n, n);
        for i in 0..n {
            m[(i, i)] = Rat::one();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<Rat>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        RatMatrix { rows: r, cols: c, data: rows.into_iter().flatten().collect() }
    }

    pub fn row(&self, i: usize) -> &[Rat] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn mul_vec(&self, v: &[Rat]) -> Vec<Rat> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|i| self.row(i).iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }

    pub fn mul(&self, other: &RatMatrix) -> RatMatrix {
        assert_eq!(self.cols, other.rows);
        let mut out = RatMatrix::zero(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                if self[(i, k)].is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let prod = &self[(i, k)] * &other[(k, j)];
                    out[(i, j)] += prod;
                }
            }
        }
        out
    }

    pub fn select_rows(&self, idx: &[usize]) -> RatMatrix {
        RatMatrix::from_rows(idx.iter().map(|&i| self.row(i).to_vec()).collect())
    }

    pub fn rows_vec(&self) -> Vec<Vec<Rat>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    /// lcm of the denominators of all entries (1 for an empty matrix).
    pub fn denominator_lcm(&self) -> Int {
        let mut l = Int::one();
        for x in &self.data {
            l = lcm_int(&l, x.denom());
        }
        l
    }
}

impl std::ops::Index<(usize, usize)> for RatMatrix {
    type Output = Rat;
    fn index(&self, (i, j): (usize, usize)) -> &Rat {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for RatMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Rat {
        &mut self.data[i * self.cols + j]
    }
}

impl std::fmt::Debug for RatMatrix {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "RatMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            writeln!(f, "  {:?}", self.row(i).iter().map(|x| x.to_string()).collect::<Vec<_>>())?;
        }
        write!(f, "]")
    }
}

pub fn dot_int(a: &[Int], b: &[Int]) -> Int {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn dot_rat(a: &[Rat], b: &[Rat]) -> Rat {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn int_vec_to_rat(v: &[Int]) -> Vec<Rat> {
    v.iter().map(|x| Rat::from_integer(x.clone())).collect()
}

// ---------------------------------------------------------------------------
// Determinant (fraction-free Bareiss elimination)
// ---------------------------------------------------------------------------

pub fn determinant(m: &IntMatrix) -> Result<Int> {
    if !m.is_square() {
        return Err(Error::Shape(format!("determinant needs a square matrix, got {}x{}", m.rows, m.cols)));
    }
    let n = m.rows;
    if n == 0 {
        return Ok(Int::one());
    }
    let mut a = m.clone();
    let mut sign = Int::one();
    let mut prev = Int::one();
    for k in 0..n - 1 {
        if a[(k, k)].is_zero() {
            let swap = (k + 1..n).find(|&i| !a[(i, k)].is_zero());
            match swap {
                Some(i) => {
                    for j in 0..n {
                        let tmp = a[(k, j)].clone();
                        a[(k, j)] = a[(i, j)].clone();
                        a[(i, j)] = tmp;
                    }
                    sign = -sign;
                }
                None => return Ok(Int::zero()),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let num = &a[(i, j)] * &a[(k, k)] - &a[(i, k)] * &a[(k, j)];
                a[(i, j)] = num / &prev; // exact by Bareiss' identity
            }
            a[(i, k)] = Int::zero();
        }
        prev = a[(k, k)].clone();
    }
    Ok(sign * a[(n - 1, n - 1)].clone())
}

// ---------------------------------------------------------------------------
// Row Hermite normal form (single-row specialization)
// ---------------------------------------------------------------------------

/// Decompose a nonzero row vector as v = H·Q with H = (g, 0, …, 0),
/// g = gcd(v) > 0, and Q unimodular. Returns (H, Q).
pub fn hnf_row(v: &[Int]) -> Result<(Vec<Int>, IntMatrix)> {
    let n = v.len();
    if n == 0 || v.iter().all(|x| x.is_zero()) {
        return Err(Error::Degenerate("hnf_row on zero vector".into()));
    }
    // Column operations on w drive it to (g, 0, …, 0); Q accumulates the
    // inverses of those operations from the left, so w0 = (w)·ops = H and
    // v = H·Q throughout.
    let mut w: Vec<Int> = v.to_vec();
    let mut q = IntMatrix::identity(n);

    // col j += lam * col i  on w  <=>  row i -= lam * row j  on Q
    let add_col = |w: &mut Vec<Int>, q: &mut IntMatrix, i: usize, j: usize, lam: &Int| {
        let delta = &w[i] * lam;
        w[j] += delta;
        for t in 0..n {
            let delta = lam * &q[(j, t)];
            q[(i, t)] -= delta;
        }
    };
    let swap_cols = |w: &mut Vec<Int>, q: &mut IntMatrix, i: usize, j: usize| {
        w.swap(i, j);
        for t in 0..n {
            let tmp = q[(i, t)].clone();
            q[(i, t)] = q[(j, t)].clone();
            q[(j, t)] = tmp;
        }
    };

    loop {
        // Move the smallest nonzero |entry| to position 0.
        let piv = (0..n)
            .filter(|&j| !w[j].is_zero())
            .min_by_key(|&j| w[j].abs())
            .expect("nonzero vector");
        if piv != 0 {
            swap_cols(&mut w, &mut q, piv, 0);
        }
        if w[0].is_negative() {
            // negate col 0 <=> negate row 0 of Q
            w[0] = -w[0].clone();
            for t in 0..n {
                q[(0, t)] = -q[(0, t)].clone();
            }
        }
        let mut done = true;
        for j in 1..n {
            if w[j].is_zero() {
                continue;
            }
            let lam = -(&w[j] / &w[0]);
            add_col(&mut w, &mut q, 0, j, &lam);
            if !w[j].is_zero() {
                done = false;
            }
        }
        if done {
            break;
        }
    }
    debug_assert!(w[1..].iter().all(|x| x.is_zero()));
    Ok((w, q))
}

// ---------------------------------------------------------------------------
// Smith normal form
// ---------------------------------------------------------------------------

/// S = P·A·Q with P, Q unimodular, S diagonal, S_{ii} ≥ 0 and
/// S_{ii} | S_{i+1,i+1}; zero diagonal entries trail.
#[derive(Clone, Debug)]
pub struct SmithForm {
    pub p: IntMatrix,
    pub s: IntMatrix,
    pub q: IntMatrix,
    /// S_{nn} (0 for the 0x0 matrix).
    pub sigma: Int,
}

pub fn smith_normal_form(a: &IntMatrix) -> Result<SmithForm> {
    if !a.is_square() {
        return Err(Error::Shape(format!("SNF needs a square matrix, got {}x{}", a.rows, a.cols)));
    }
    let n = a.rows;
    let mut s = a.clone();
    let mut p = IntMatrix::identity(n);
    let mut q = IntMatrix::identity(n);

    // row i += lam * row k (on S); mirror on P
    fn row_add(s: &mut IntMatrix, p: &mut IntMatrix, i: usize, k: usize, lam: &Int) {
        for j in 0..s.cols {
            let d = lam * &s[(k, j)];
            s[(i, j)] += d;
        }
        for j in 0..p.cols {
            let d = lam * &p[(k, j)];
            p[(i, j)] += d;
        }
    }
    fn col_add(s: &mut IntMatrix, q: &mut IntMatrix, j: usize, k: usize, lam: &Int) {
        for i in 0..s.rows {
            let d = lam * &s[(i, k)];
            s[(i, j)] += d;
        }
        for i in 0..q.rows {
            let d = lam * &q[(i, k)];
            q[(i, j)] += d;
        }
    }
    fn row_swap(s: &mut IntMatrix, p: &mut IntMatrix, i: usize, k: usize) {
        if i == k {
            return;
        }
        for j in 0..s.cols {
            let tmp = s[(i, j)].clone();
            s[(i, j)] = s[(k, j)].clone();
            s[(k, j)] = tmp;
        }
        for j in 0..p.cols {
            let tmp = p[(i, j)].clone();
            p[(i, j)] = p[(k, j)].clone();
            p[(k, j)] = tmp;
        }
    }
    fn col_swap(s: &mut IntMatrix, q: &mut IntMatrix, j: usize, k: usize) {
        if j == k {
            return;
        }
        for i in 0..s.rows {
            let tmp = s[(i, j)].clone();
            s[(i, j)] = s[(i, k)].clone();
            s[(i, k)] = tmp;
        }
        for i in 0..q.rows {
            let tmp = q[(i, j)].clone();
            q[(i, j)] = q[(i, k)].clone();
            q[(i, k)] = tmp;
        }
    }

    for t in 0..n {
        loop {
            // pivot: smallest nonzero |entry| in the trailing block
            let mut best: Option<(usize, usize)> = None;
            for i in t..n {
                for j in t..n {
                    if !s[(i, j)].is_zero()
                        && best.map_or(true, |(bi, bj)| s[(i, j)].abs() < s[(bi, bj)].abs())
                    {
                        best = Some((i, j));
                    }
                }
            }
            let (bi, bj) = match best {
                Some(x) => x,
                None => break, // trailing block all zero
            };
            row_swap(&mut s, &mut p, t, bi);
            col_swap(&mut s, &mut q, t, bj);

            let mut dirty = false;
            for i in t + 1..n {
                if !s[(i, t)].is_zero() {
                    let lam = -(&s[(i, t)] / &s[(t, t)]);
                    row_add(&mut s, &mut p, i, t, &lam);
                    if !s[(i, t)].is_zero() {
                        dirty = true;
                    }
                }
            }
            for j in t + 1..n {
                if !s[(t, j)].is_zero() {
                    let lam = -(&s[(t, j)] / &s[(t, t)]);
                    col_add(&mut s, &mut q, j, t, &lam);
                    if !s[(t, j)].is_zero() {
                        dirty = true;
                    }
                }
            }
            if dirty {
                continue;
            }
            // pivot must also divide the rest of the block for the chain
            let mut fold = None;
            'scan: for i in t + 1..n {
                for j in t + 1..n {
                    if !(&s[(i, j)] % &s[(t, t)]).is_zero() {
                        fold = Some(i);
                        break 'scan;
                    }
                }
            }
            match fold {
                Some(i) => {
                    // pull row i into row t and restart this pivot
                    row_add(&mut s, &mut p, t, i, &Int::one());
                }
                None => break,
            }
        }
        if s[(t, t)].is_negative() {
            for j in 0..n {
                s[(t, j)] = -s[(t, j)].clone();
            }
            for j in 0..n {
                p[(t, j)] = -p[(t, j)].clone();
            }
        }
    }

    // Zeros trail automatically: once a trailing block is all zero the loop
    // leaves the remaining diagonal entries at zero.
    let sigma = if n == 0 { Int::zero() } else { s[(n - 1, n - 1)].clone() };
    Ok(SmithForm { p, s, q, sigma })
}

impl SmithForm {
    pub fn diag(&self) -> Vec<Int> {
        (0..self.s.rows).map(|i| self.s[(i, i)].clone()).collect()
    }
}

// ---------------------------------------------------------------------------
// Adjugate and rational solves
// ---------------------------------------------------------------------------

/// (|det A|, adj(A)) for a nonsingular square A; A·adj(A) = det(A)·I.
pub fn adjugate_columns(a: &IntMatrix) -> Result<(Int, IntMatrix)> {
    if !a.is_square() {
        return Err(Error::Shape("adjugate needs a square matrix".into()));
    }
    let n = a.rows;
    let det = determinant(a)?;
    if det.is_zero() {
        return Err(Error::Singular);
    }
    // Solve A·h_j = det·e_j exactly over the rationals; entries are integers.
    let mut h = IntMatrix::zero(n, n);
    let det_rat = Rat::from_integer(det.clone());
    for j in 0..n {
        let mut e: Vec<Rat> = vec![Rat::zero(); n];
        e[j] = det_rat.clone();
        let col = solve_rational(a, &e)?;
        for i in 0..n {
            debug_assert!(col[i].is_integer());
            h[(i, j)] = col[i].to_integer();
        }
    }
    Ok((det.abs(), h))
}

/// Exact solution of A x = b for square nonsingular integer A.
pub fn solve_rational(a: &IntMatrix, b: &[Rat]) -> Result<Vec<Rat>> {
    if !a.is_square() {
        return Err(Error::Shape("solve needs a square matrix".into()));
    }
    if a.rows != b.len() {
        return Err(Error::Shape("rhs length mismatch".into()));
    }
    solve_rat_matrix(&a.to_rat(), b)
}

/// Gaussian elimination over the rationals; errors on singular systems.
pub fn solve_rat_matrix(a: &RatMatrix, b: &[Rat]) -> Result<Vec<Rat>> {
    let n = a.rows;
    assert_eq!(a.cols, n);
    let mut m = a.clone();
    let mut rhs = b.to_vec();
    for k in 0..n {
        let piv = (k..n).find(|&i| !m[(i, k)].is_zero()).ok_or(Error::Singular)?;
        if piv != k {
            for j in 0..n {
                let tmp = m[(k, j)].clone();
                m[(k, j)] = m[(piv, j)].clone();
                m[(piv, j)] = tmp;
            }
            rhs.swap(k, piv);
        }
        for i in k + 1..n {
            if m[(i, k)].is_zero() {
                continue;
            }
            let f = &m[(i, k)] / &m[(k, k)];
            for j in k..n {
                let d = &f * &m[(k, j)];
                m[(i, j)] -= d;
            }
            let d = &f * &rhs[k];
            rhs[i] -= d;
        }
    }
    let mut x = vec![Rat::zero(); n];
    for k in (0..n).rev() {
        let mut acc = rhs[k].clone();
        for j in k + 1..n {
            acc -= &m[(k, j)] * &x[j];
        }
        x[k] = acc / &m[(k, k)];
    }
    Ok(x)
}

/// Exact inverse of a rational square matrix.
pub fn invert_rat_matrix(a: &RatMatrix) -> Result<RatMatrix> {
    let n = a.rows;
    let mut out = RatMatrix::zero(n, n);
    for j in 0..n {
        let mut e = vec![Rat::zero(); n];
        e[j] = Rat::one();
        let col = solve_rat_matrix(a, &e)?;
        for i in 0..n {
            out[(i, j)] = col[i].clone();
        }
    }
    Ok(out)
}

/// Inverse of a unimodular integer matrix, exact and integer.
pub fn invert_unimodular(a: &IntMatrix) -> Result<IntMatrix> {
    let det = determinant(a)?;
    if det.abs() != Int::one() {
        return Err(Error::Shape("matrix is not unimodular".into()));
    }
    let (_, adj) = adjugate_columns(a)?;
    let n = a.rows;
    let mut out = adj;
    if det.is_negative() {
        for i in 0..n {
            for j in 0..n {
                out[(i, j)] = -out[(i, j)].clone();
            }
        }
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Rank and kernels (plumbing shared by the polyhedral stages)
// ---------------------------------------------------------------------------

pub fn rank_rat(a: &RatMatrix) -> usize {
    let mut m = a.clone();
    let (rows, cols) = (m.rows, m.cols);
    let mut rank = 0;
    let mut lead = 0;
    while rank < rows && lead < cols {
        let piv = (rank..rows).find(|&i| !m[(i, lead)].is_zero());
        match piv {
            None => {
                lead += 1;
                continue;
            }
            Some(p) => {
                for j in 0..cols {
                    let tmp = m[(rank, j)].clone();
                    m[(rank, j)] = m[(p, j)].clone();
                    m[(p, j)] = tmp;
                }
                for i in rank + 1..rows {
                    if m[(i, lead)].is_zero() {
                        continue;
                    }
                    let f = &m[(i, lead)] / &m[(rank, lead)];
                    for j in lead..cols {
                        let d = &f * &m[(rank, j)];
                        m[(i, j)] -= d;
                    }
                }
                rank += 1;
                lead += 1;
            }
        }
    }
    rank
}

pub fn rank_int(a: &IntMatrix) -> usize {
    rank_rat(&a.to_rat())
}

/// Integer basis of the right kernel {x : A x = 0}, columns returned as rows
/// of the output (each primitive: gcd 1).
pub fn kernel_basis_int(a: &IntMatrix) -> Vec<Vec<Int>> {
    let m = a.to_rat();
    let (rows, cols) = (m.rows, m.cols);
    // reduced row echelon form
    let mut r = m;
    let mut pivots: Vec<usize> = Vec::new();
    let mut rank = 0;
    for lead in 0..cols {
        if rank == rows {
            break;
        }
        let piv = (rank..rows).find(|&i| !r[(i, lead)].is_zero());
        let Some(p) = piv else { continue };
        for j in 0..cols {
            let tmp = r[(rank, j)].clone();
            r[(rank, j)] = r[(p, j)].clone();
            r[(p, j)] = tmp;
        }
        let f = r[(rank, lead)].clone();
        for j in 0..cols {
            r[(rank, j)] = &r[(rank, j)] / &f;
        }
        for i in 0..rows {
            if i != rank && !r[(i, lead)].is_zero() {
                let f = r[(i, lead)].clone();
                for j in 0..cols {
                    let d = &f * &r[(rank, j)];
                    r[(i, j)] -= d;
                }
            }
        }
        pivots.push(lead);
        rank += 1;
    }
    let free: Vec<usize> = (0..cols).filter(|j| !pivots.contains(j)).collect();
    let mut basis = Vec::new();
    for &f in &free {
        let mut v = vec![Rat::zero(); cols];
        v[f] = Rat::one();
        for (ri, &pj) in pivots.iter().enumerate() {
            v[pj] = -r[(ri, f)].clone();
        }
        // clear denominators, reduce to primitive
        let mut l = Int::one();
        for x in &v {
            l = lcm_int(&l, x.denom());
        }
        let mut iv: Vec<Int> = v.iter().map(|x| (x * Rat::from_integer(l.clone())).to_integer()).collect();
        let g = gcd_slice(&iv);
        if !g.is_zero() && g != Int::one() {
            for x in iv.iter_mut() {
                *x = &*x / &g;
            }
        }
        basis.push(iv);
    }
    basis
}

/// Reduce an integer vector to primitive form (gcd 1), preserving direction.
pub fn primitive(v: &[Int]) -> Vec<Int> {
    let g = gcd_slice(v);
    if g.is_zero() || g.is_one() {
        return v.to_vec();
    }
    v.iter().map(|x| x / &g).collect()
}

/// Canonical sign: first nonzero entry positive. Returns the sign applied.
pub fn canonical_sign(v: &mut [Int]) -> i8 {
    for x in v.iter() {
        match x.sign() {
            Sign::Plus => return 1,
            Sign::Minus => {
                for y in v.iter_mut() {
                    *y = -y.clone();
                }
                return -1;
            }
            Sign::NoSign => continue,
        }
    }
    1
}

/// All k-subsets of 0..n in lexicographic order.
pub fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    if k > n {
        return out;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        out.push(idx.clone());
        // advance
        let mut i = k;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if idx[i] != i + n - k {
                break;
            }
            if i == 0 {
                return out;
            }
        }
        idx[i] += 1;
        for j in i + 1..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    fn cofactor_det(m: &IntMatrix) -> Int {
        let n = m.rows;
        if n == 0 {
            return Int::one();
        }
        if n == 1 {
            return m[(0, 0)].clone();
        }
        let mut acc = Int::zero();
        for j in 0..n {
            if m[(0, j)].is_zero() {
                continue;
            }
            let minor_rows: Vec<Vec<Int>> = (1..n)
                .map(|i| (0..n).filter(|&c| c != j).map(|c| m[(i, c)].clone()).collect())
                .collect();
            let minor = IntMatrix::from_rows(minor_rows);
            let term = &m[(0, j)] * cofactor_det(&minor);
            if j % 2 == 0 {
                acc += term;
            } else {
                acc -= term;
            }
        }
        acc
    }

    fn random_matrix(rng: &mut StdRng, n: usize, lo: i64, hi: i64) -> IntMatrix {
        IntMatrix::from_rows(
            (0..n).map(|_| (0..n).map(|_| int(rng.gen_range(lo..=hi))).collect()).collect(),
        )
    }

    #[test]
    fn determinant_identity() {
        assert_eq!(determinant(&IntMatrix::identity(3)).unwrap(), int(1));
    }

    #[test]
    fn determinant_2x2() {
        let m = IntMatrix::from_i64(&[&[2, 4], &[6, 8]]);
        assert_eq!(determinant(&m).unwrap(), int(-8));
    }

    #[test]
    fn determinant_matches_cofactor_oracle() {
        let mut rng = StdRng::seed_from_u64(7);
        for _ in 0..50 {
            let m = random_matrix(&mut rng, 4, -5, 5);
            assert_eq!(determinant(&m).unwrap(), cofactor_det(&m));
        }
    }

    #[test]
    fn determinant_rejects_nonsquare() {
        let m = IntMatrix::from_i64(&[&[1, 2, 3], &[4, 5, 6]]);
        assert!(matches!(determinant(&m), Err(Error::Shape(_))));
    }

    #[test]
    fn hnf_row_unit() {
        let v = vec![int(1), int(0), int(0)];
        let (h, q) = hnf_row(&v).unwrap();
        assert_eq!(h, vec![int(1), int(0), int(0)]);
        assert_eq!(q, IntMatrix::identity(3));
    }

    #[test]
    fn hnf_row_gcd() {
        let v = vec![int(4), int(6)];
        let (h, q) = hnf_row(&v).unwrap();
        assert_eq!(h, vec![int(2), int(0)]);
        assert_eq!(determinant(&q).unwrap().abs(), int(1));
        // v = H·Q
        let hq: Vec<Int> = (0..2).map(|j| &h[0] * &q[(0, j)] + &h[1] * &q[(1, j)]).collect();
        assert_eq!(hq, v);
    }

    #[test]
    fn hnf_row_zero_errors() {
        assert!(hnf_row(&[int(0), int(0)]).is_err());
    }

    #[test]
    fn snf_identity() {
        let sf = smith_normal_form(&IntMatrix::identity(4)).unwrap();
        assert_eq!(sf.s, IntMatrix::identity(4));
        assert_eq!(sf.p.mul(&IntMatrix::identity(4)).mul(&sf.q), sf.s);
    }

    #[test]
    fn snf_2x2() {
        let a = IntMatrix::from_i64(&[&[2, 4], &[6, 8]]);
        let sf = smith_normal_form(&a).unwrap();
        assert_eq!(sf.diag(), vec![int(2), int(4)]);
        assert_eq!(sf.p.mul(&a).mul(&sf.q), sf.s);
    }

    #[test]
    fn snf_singular_diag() {
        let a = IntMatrix::from_i64(&[&[1, 0], &[0, 0]]);
        let sf = smith_normal_form(&a).unwrap();
        assert_eq!(sf.diag(), vec![int(1), int(0)]);
    }

    #[test]
    fn snf_reconstruction_and_chain() {
        let mut rng = StdRng::seed_from_u64(11);
        for _ in 0..60 {
            let n = rng.gen_range(1..=6);
            let a = random_matrix(&mut rng, n, -10, 10);
            let sf = smith_normal_form(&a).unwrap();
            assert_eq!(sf.p.mul(&a).mul(&sf.q), sf.s, "P·A·Q = S");
            assert_eq!(determinant(&sf.p).unwrap().abs(), int(1));
            assert_eq!(determinant(&sf.q).unwrap().abs(), int(1));
            let d = sf.diag();
            for i in 0..n - 1 {
                assert!(!d[i].is_negative());
                if d[i].is_zero() {
                    assert!(d[i + 1].is_zero(), "zeros trail");
                } else {
                    assert!((&d[i + 1] % &d[i]).is_zero(), "divisibility chain");
                }
            }
            let det = determinant(&a).unwrap();
            if !det.is_zero() {
                let prod: Int = d.iter().product();
                assert_eq!(prod, det.abs());
            }
        }
    }

    #[test]
    fn adjugate_examples() {
        let (d, h) = adjugate_columns(&IntMatrix::identity(3)).unwrap();
        assert_eq!(d, int(1));
        assert_eq!(h, IntMatrix::identity(3));

        let two_i = IntMatrix::from_i64(&[&[2, 0], &[0, 2]]);
        let (d, h) = adjugate_columns(&two_i).unwrap();
        assert_eq!(d, int(4));
        assert_eq!(h, IntMatrix::from_i64(&[&[2, 0], &[0, 2]]));

        let a = IntMatrix::from_i64(&[&[2, 1], &[1, 1]]);
        let (d, h) = adjugate_columns(&a).unwrap();
        assert_eq!(d, int(1));
        assert_eq!(h, IntMatrix::from_i64(&[&[1, -1], &[-1, 2]]));
    }

    #[test]
    fn adjugate_identity_property() {
        let mut rng = StdRng::seed_from_u64(3);
        for _ in 0..40 {
            let n = rng.gen_range(1..=4);
            let a = random_matrix(&mut rng, n, -6, 6);
            let det = determinant(&a).unwrap();
            if det.is_zero() {
                assert!(adjugate_columns(&a).is_err());
                continue;
            }
            let (_, h) = adjugate_columns(&a).unwrap();
            let prod = a.mul(&h);
            let mut expect = IntMatrix::zero(n, n);
            for i in 0..n {
                expect[(i, i)] = det.clone();
            }
            assert_eq!(prod, expect, "A·adj(A) = det(A)·I");
        }
    }

    #[test]
    fn solve_examples() {
        let b = vec![rat(1, 1), rat(2, 1)];
        assert_eq!(solve_rational(&IntMatrix::identity(2), &b).unwrap(), b);
        let two_i = IntMatrix::from_i64(&[&[2, 0], &[0, 2]]);
        let x = solve_rational(&two_i, &[rat(1, 1), rat(1, 1)]).unwrap();
        assert_eq!(x, vec![rat(1, 2), rat(1, 2)]);
    }

    #[test]
    fn solve_residual_zero() {
        let mut rng = StdRng::seed_from_u64(5);
        let mut done = 0;
        while done < 20 {
            let a = random_matrix(&mut rng, 3, -5, 5);
            if determinant(&a).unwrap().is_zero() {
                continue;
            }
            let b: Vec<Rat> = (0..3).map(|_| rat(rng.gen_range(-9..=9), rng.gen_range(1..=4))).collect();
            let x = solve_rational(&a, &b).unwrap();
            for i in 0..3 {
                let lhs: Rat = (0..3).map(|j| Rat::from_integer(a[(i, j)].clone()) * &x[j]).sum();
                assert_eq!(lhs, b[i]);
            }
            done += 1;
        }
    }

    #[test]
    fn kernel_basis_is_kernel() {
        let a = IntMatrix::from_i64(&[&[1, 2, 3]]);
        let basis = kernel_basis_int(&a);
        assert_eq!(basis.len(), 2);
        for v in &basis {
            assert_eq!(dot_int(a.row(0), v), int(0));
        }
    }

    #[test]
    fn combinations_count() {
        assert_eq!(combinations(5, 2).len(), 10);
        assert_eq!(combinations(3, 0), vec![Vec::<usize>::new()]);
        assert_eq!(combinations(2, 3).len(), 0);
    }

    proptest! {
        #[test]
        fn determinant_multiplicative(seed in 0u64..1000) {
            let mut rng = StdRng::seed_from_u64(seed);
            let n = rng.gen_range(1..=4usize);
            let a = random_matrix(&mut rng, n, -4, 4);
            let b = random_matrix(&mut rng, n, -4, 4);
            let lhs = determinant(&a.mul(&b)).unwrap();
            let rhs = determinant(&a).unwrap() * determinant(&b).unwrap();
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn hnf_row_reconstructs(v in proptest::collection::vec(-20i64..=20, 1..5)) {
            prop_assume!(v.iter().any(|&x| x != 0));
            let vi: Vec<Int> = v.iter().map(|&x| int(x)).collect();
            let (h, q) = hnf_row(&vi).unwrap();
            let g = gcd_slice(&vi);
            prop_assert_eq!(&h[0], &g);
            prop_assert!(h[1..].iter().all(|x| x.is_zero()));
            prop_assert_eq!(determinant(&q).unwrap().abs(), int(1));
            let n = vi.len();
            let hq: Vec<Int> = (0..n).map(|j| (0..n).map(|i| &h[i] * &q[(i, j)]).sum()).collect();
            prop_assert_eq!(hq, vi);
        }
    }
}
