//! The SNF group-recurrence engine: ε-coefficient numerator tables, Todd
//! polynomials, π̂ convolutions, and the per-piece constant-term tables
//! π_k that make each simplicial piece a periodic step-polynomial.
//!
//! Generating functions are never evaluated numerically: a numerator is a
//! sparse Laurent polynomial in u = e^{−τ/δ} (exponent → count), and the
//! constant term comes out of the Todd convolution over exact rationals.
//! The β_i = ⟨c, r_i h_i⟩ keep their signs; a negative β just means the
//! table's support extends to negative exponents, which is the same
//! rational function the sign-flip rewrite of 1/(1−u^{−a}) produces.

use crate::arith::{
    adjugate_columns, determinant, dot_int, dot_rat, rat_floor, smith_normal_form, solve_rational,
    Int, IntMatrix, Rat, RatMatrix, SmithForm,
};
use crate::error::{Error, Result};
use num::{Integer, One, Signed, ToPrimitive, Zero};
use std::collections::BTreeMap;

// ---------------------------------------------------------------------------
// Group data
// ---------------------------------------------------------------------------

/// The finite abelian group Z^n / S·Z^n of an SNF, with elements stored as
/// canonical residue vectors (0 ≤ g_i < S_ii).
#[derive(Clone, Debug)]
pub struct SmithGroup {
    pub diag: Vec<Int>,
    pub nontrivial: Vec<usize>,
    /// |G| = ∏ S_ii.
    pub order: Int,
}

impl SmithGroup {
    pub fn canonicalize(&self, v: &[Int]) -> Vec<Int> {
        v.iter().zip(&self.diag).map(|(x, s)| x.mod_floor(s)).collect()
    }

    pub fn add(&self, a: &[Int], b: &[Int]) -> Vec<Int> {
        a.iter()
            .zip(b)
            .zip(&self.diag)
            .map(|((x, y), s)| (x + y).mod_floor(s))
            .collect()
    }

    pub fn elements(&self) -> Vec<Vec<Int>> {
        let n = self.diag.len();
        let mut out = vec![vec![Int::zero(); n]];
        for (i, s) in self.diag.iter().enumerate() {
            let size = s.to_usize().expect("group coordinate beyond addressable size");
            if size <= 1 {
                continue;
            }
            let mut next = Vec::with_capacity(out.len() * size);
            for base in &out {
                for r in 0..size {
                    let mut e = base.clone();
                    e[i] = Int::from(r);
                    next.push(e);
                }
            }
            out = next;
        }
        out
    }
}

/// Group structure, generators g_i = P_{*i} mod S·Z^n and their orders r_i.
pub fn group_data(sf: &SmithForm) -> Result<(SmithGroup, Vec<Vec<Int>>, Vec<Int>)> {
    let n = sf.s.rows;
    let diag = sf.diag();
    if diag.iter().any(|d| d.is_zero()) {
        return Err(Error::Singular);
    }
    let order: Int = diag.iter().product();
    let nontrivial = (0..n).filter(|&i| diag[i] > Int::one()).collect();
    let group = SmithGroup { diag: diag.clone(), nontrivial, order };
    let mut gens = Vec::with_capacity(n);
    let mut orders = Vec::with_capacity(n);
    for i in 0..n {
        let g = group.canonicalize(&sf.p.col(i));
        // r_i = lcm над nontrivial coords of S_jj / gcd(S_jj, g_j)
        let mut r = Int::one();
        for j in 0..n {
            if diag[j] <= Int::one() {
                continue;
            }
            let q = &diag[j] / diag[j].gcd(&g[j]);
            r = r.lcm(&q);
        }
        gens.push(g);
        orders.push(r);
    }
    Ok((group, gens, orders))
}

// ---------------------------------------------------------------------------
// Numerator tables (Lemma-level ε coefficients)
// ---------------------------------------------------------------------------

/// Sparse Laurent polynomial in u: exponent → coefficient. Coefficients are
/// pattern counts, so i64 is ample at desk scale.
pub type Laurent = BTreeMap<i64, i64>;

fn laurent_add(dst: &mut Laurent, src: &Laurent, shift: i64, sign: i64) {
    for (&e, &c) in src {
        let entry = dst.entry(e + shift).or_insert(0);
        *entry += sign * c;
        if *entry == 0 {
            dst.remove(&(e + shift));
        }
    }
}

/// Level-n numerator coefficients ε_i(g) of ĝ_n(g; τ), one Laurent
/// polynomial per group element, plus the data (h_i, ⟨c,h_i⟩, orders,
/// β_i = ⟨c, r_i h_i⟩) the constant-term machinery needs.
#[derive(Clone, Debug)]
pub struct NumeratorTable {
    pub tables: BTreeMap<Vec<Int>, Laurent>,
    /// Columns h_i of δ·A^{-1}.
    pub h_cols: Vec<Vec<Int>>,
    /// ⟨c, h_i⟩, all nonzero.
    pub a_dots: Vec<Int>,
    /// β_i as integers: ⟨c, r_i h_i⟩ = r_i·⟨c, h_i⟩.
    pub betas_int: Vec<Int>,
    pub orders: Vec<Int>,
    pub delta: Int,
    pub sigma: Int,
    /// max_i |⟨c, h_i⟩|.
    pub chi: Int,
    pub smith: SmithForm,
    pub group: SmithGroup,
}

pub fn numerator_table(a_b: &IntMatrix, c: &[Int]) -> Result<NumeratorTable> {
    let n = a_b.rows;
    if n == 0 || !a_b.is_square() {
        return Err(Error::Shape("numerator table needs a nonempty square base".into()));
    }
    let det = determinant(a_b)?;
    if det.is_zero() {
        return Err(Error::Singular);
    }
    let delta = det.abs();
    let (_, adj) = adjugate_columns(a_b)?;
    // h_i = columns of δ·A^{-1} = sign(det)·adj(A)
    let neg = det.is_negative();
    let h_cols: Vec<Vec<Int>> = (0..n)
        .map(|j| {
            adj.col(j)
                .into_iter()
                .map(|v| if neg { -v } else { v })
                .collect()
        })
        .collect();
    let a_dots: Vec<Int> = h_cols.iter().map(|h| dot_int(c, h)).collect();
    if let Some(i) = a_dots.iter().position(|a| a.is_zero()) {
        return Err(Error::Genericity(format!("⟨c, h_{i}⟩ = 0")));
    }
    let chi = a_dots.iter().map(|a| a.abs()).max().expect("n ≥ 1");

    let sf = smith_normal_form(a_b)?;
    let (group, gens, orders) = group_data(&sf)?;
    let sigma = sf.sigma.clone();
    let betas_int: Vec<Int> = (0..n).map(|i| &orders[i] * &a_dots[i]).collect();

    let to_i64 = |v: &Int| -> Result<i64> {
        v.to_i64().ok_or_else(|| Error::Internal("exponent beyond i64 range".into()))
    };

    // Level recurrence over quotient-group cosets: a visited-set sweep walks
    // each coset q, q+g_k, …; ĥ_k(0) by the direct sum, later members by
    // ĥ_k(j) = u^{a_k}·ĥ_k(j−1) + (1 − u^{r_k·a_k})·ĥ_{k−1}(j).
    let elements = group.elements();
    let mut prev: BTreeMap<Vec<Int>, Laurent> = BTreeMap::new();
    prev.insert(vec![Int::zero(); n], BTreeMap::from([(0i64, 1i64)]));
    for k in 0..n {
        let a_k = to_i64(&a_dots[k])?;
        let r_k = orders[k].to_usize().ok_or_else(|| Error::Internal("order beyond usize".into()))?;
        let mut next: BTreeMap<Vec<Int>, Laurent> = BTreeMap::new();
        let mut visited: std::collections::BTreeSet<Vec<Int>> = std::collections::BTreeSet::new();
        for q in &elements {
            if visited.contains(q) {
                continue;
            }
            let mut coset = Vec::with_capacity(r_k);
            let mut cur = q.clone();
            for _ in 0..r_k {
                visited.insert(cur.clone());
                coset.push(cur.clone());
                cur = group.add(&cur, &gens[k]);
            }
            debug_assert_eq!(cur, *q, "coset walk must close after r_k steps");
            let mut hs: Vec<Laurent> = Vec::with_capacity(r_k);
            let mut h0 = Laurent::new();
            for i in 0..r_k {
                let idx = (r_k - i) % r_k;
                if let Some(p) = prev.get(&coset[idx]) {
                    laurent_add(&mut h0, p, i as i64 * a_k, 1);
                }
            }
            hs.push(h0);
            for j in 1..r_k {
                let mut h = Laurent::new();
                laurent_add(&mut h, &hs[j - 1], a_k, 1);
                if let Some(p) = prev.get(&coset[j]) {
                    laurent_add(&mut h, p, 0, 1);
                    laurent_add(&mut h, p, r_k as i64 * a_k, -1);
                }
                hs.push(h);
            }
            for (j, g) in coset.into_iter().enumerate() {
                let poly = std::mem::take(&mut hs[j]);
                if !poly.is_empty() {
                    next.insert(g, poly);
                }
            }
        }
        prev = next;
    }

    // Every group element is reachable (P unimodular ⟹ generators span G),
    // coefficients are pattern counts, and the support respects the stated
    // index bound n·σ·χ.
    let bound = Int::from(n as i64) * &sigma * &chi;
    let mut mass: Int = Int::zero();
    for g in &elements {
        let poly = prev
            .get(g)
            .ok_or_else(|| Error::Internal("group element with empty numerator".into()))?;
        for (&e, &cf) in poly {
            if cf < 0 {
                return Err(Error::Internal("negative ε coefficient".into()));
            }
            if Int::from(e).abs() > bound {
                return Err(Error::Internal("ε support beyond n·σ·χ".into()));
            }
            mass += Int::from(cf);
        }
    }
    let expect: Int = orders.iter().product();
    if mass != expect {
        return Err(Error::Internal("ε mass does not match ∏ r_i".into()));
    }

    Ok(NumeratorTable {
        tables: prev,
        h_cols,
        a_dots,
        betas_int,
        orders,
        delta,
        sigma,
        chi,
        smith: sf,
        group,
    })
}

// ---------------------------------------------------------------------------
// Todd polynomials
// ---------------------------------------------------------------------------

/// Values td_0..td_order with ∏ β_i τ/(1 − e^{−β_i τ}) = Σ_j τ^j·td_j(β),
/// computed by truncated power-series inversion and multiplication.
pub fn todd_polynomials(betas: &[Rat], order: usize) -> Vec<Rat> {
    // per-factor series x/(1−e^{−x}) = 1/(Σ_k (−1)^k x^k/(k+1)!)
    let mut d: Vec<Rat> = Vec::with_capacity(order + 1);
    let mut fact = Int::one();
    for k in 0..=order {
        fact *= Int::from((k + 1) as i64);
        let c = Rat::new(Int::one(), fact.clone());
        d.push(if k % 2 == 1 { -c } else { c });
    }
    let mut t = vec![Rat::zero(); order + 1];
    t[0] = Rat::one();
    for k in 1..=order {
        let mut acc = Rat::zero();
        for j in 1..=k {
            acc += &d[j] * &t[k - j];
        }
        t[k] = -acc;
    }
    let mut td = vec![Rat::zero(); order + 1];
    td[0] = Rat::one();
    for beta in betas {
        let mut factor = Vec::with_capacity(order + 1);
        let mut pw = Rat::one();
        for tk in t.iter().take(order + 1) {
            factor.push(tk * &pw);
            pw *= beta;
        }
        let mut out = vec![Rat::zero(); order + 1];
        for i in 0..=order {
            if td[i].is_zero() {
                continue;
            }
            for (j, fj) in factor.iter().enumerate().take(order + 1 - i) {
                out[i + j] += &td[i] * fj;
            }
        }
        td = out;
    }
    td
}

// ---------------------------------------------------------------------------
// π̂ convolution and the assembled periodic piece
// ---------------------------------------------------------------------------

/// π̂_k(g) = Σ_{j=0}^{k} td_{k−j}(β)·(1/(δ^j j!))·Σ_i ε_i(g)(−i)^j for
/// k = 0..n, per group element.
pub fn pi_hat_tables(
    tbl: &NumeratorTable,
    todd: &[Rat],
) -> BTreeMap<Vec<Int>, Vec<Rat>> {
    let n = tbl.h_cols.len();
    let mut out = BTreeMap::new();
    for (g, poly) in &tbl.tables {
        // moments m_j = Σ_i ε_i(g)·(−i)^j
        let mut moments: Vec<Int> = vec![Int::zero(); n + 1];
        for (&e, &cf) in poly {
            let mut pw = Int::one();
            let base = Int::from(-e);
            for m in moments.iter_mut() {
                *m += Int::from(cf) * &pw;
                pw *= &base;
            }
        }
        let mut denom = Rat::one(); // δ^j · j!
        let delta_rat = Rat::from_integer(tbl.delta.clone());
        let mut scaled: Vec<Rat> = Vec::with_capacity(n + 1);
        for (j, m) in moments.iter().enumerate() {
            if j > 0 {
                denom *= &delta_rat * Rat::from_integer(Int::from(j as i64));
            }
            scaled.push(Rat::from_integer(m.clone()) / &denom);
        }
        let pi_hat: Vec<Rat> = (0..=n)
            .map(|k| (0..=k).map(|j| &todd[k - j] * &scaled[j]).sum())
            .collect();
        out.insert(g.clone(), pi_hat);
    }
    out
}

/// One simplicial piece of the representation: the periodic tables
/// π_{B,k}, the vector c_B, and the affine-floor step map
/// T_B(y) = ⌊b_B + B_B y⌋.
#[derive(Clone, Debug, PartialEq)]
pub struct PeriodicPiece {
    /// Row indices of the base in the system the piece was built from.
    pub basis: Vec<usize>,
    pub p_mat: IntMatrix,
    pub s_diag: Vec<Int>,
    pub c_b: Vec<Rat>,
    pub betas: Vec<Rat>,
    pub delta: Int,
    /// g → [π_0(g), …, π_n(g)].
    pub tables: BTreeMap<Vec<Int>, Vec<Rat>>,
    pub step_offset: Vec<Rat>,
    pub step_param: RatMatrix,
}

impl PeriodicPiece {
    pub fn dim(&self) -> usize {
        self.s_diag.len()
    }

    /// T_B(y), exact rational floor per coordinate.
    pub fn step(&self, y: &[Rat]) -> Vec<Int> {
        (0..self.step_offset.len())
            .map(|i| rat_floor(&(&self.step_offset[i] + dot_rat(self.step_param.row(i), y))))
            .collect()
    }

    /// Canonical residue of P_B·t modulo S_B·Z^n.
    pub fn residue(&self, t: &[Int]) -> Vec<Int> {
        self.p_mat
            .mul_vec(t)
            .iter()
            .zip(&self.s_diag)
            .map(|(v, s)| v.mod_floor(s))
            .collect()
    }

    pub fn pi_at(&self, t: &[Int]) -> &[Rat] {
        let g = self.residue(t);
        self.tables.get(&g).expect("tables cover every residue")
    }

    /// Σ_k π_k(P t mod S)·⟨c_B, t⟩^k by Horner.
    pub fn eval_at_step(&self, t: &[Int]) -> Rat {
        let pis = self.pi_at(t);
        let x: Rat = self
            .c_b
            .iter()
            .zip(t)
            .map(|(c, v)| c * Rat::from_integer(v.clone()))
            .sum();
        let mut acc = Rat::zero();
        for pi in pis.iter().rev() {
            acc = acc * &x + pi;
        }
        acc
    }

    pub fn eval(&self, y: &[Rat]) -> Rat {
        self.eval_at_step(&self.step(y))
    }

    /// ∏ of the multi-period components = |det S_B| = δ.
    pub fn period_product(&self) -> Int {
        self.s_diag.iter().product()
    }
}

/// Build the π tables of a simplicial base: numerator table, Todd values,
/// π̂ convolutions, and π_k(g) = π̂_{n−k}(g)/(k!·β_1…β_n).
pub fn constant_term_piece(
    a_b: &IntMatrix,
    c: &[Int],
    basis: Vec<usize>,
    step_offset: Vec<Rat>,
    step_param: RatMatrix,
) -> Result<PeriodicPiece> {
    let core = piece_tables(a_b, c)?;
    Ok(PeriodicPiece {
        basis,
        p_mat: core.p_mat,
        s_diag: core.s_diag,
        c_b: core.c_b,
        betas: core.betas,
        delta: core.delta,
        tables: core.tables,
        step_offset,
        step_param,
    })
}

/// The step-map-independent part of a piece; cacheable by (A_B, c).
#[derive(Clone, Debug)]
pub struct PieceTables {
    pub p_mat: IntMatrix,
    pub s_diag: Vec<Int>,
    pub c_b: Vec<Rat>,
    pub betas: Vec<Rat>,
    pub delta: Int,
    pub tables: BTreeMap<Vec<Int>, Vec<Rat>>,
}

pub fn piece_tables(a_b: &IntMatrix, c: &[Int]) -> Result<PieceTables> {
    let n = a_b.rows;
    let tbl = numerator_table(a_b, c)?;
    let delta_rat = Rat::from_integer(tbl.delta.clone());
    let betas: Vec<Rat> = tbl
        .betas_int
        .iter()
        .map(|b| Rat::from_integer(b.clone()) / &delta_rat)
        .collect();
    let todd = todd_polynomials(&betas, n);
    let pihats = pi_hat_tables(&tbl, &todd);
    let beta_prod: Rat = betas.iter().product();
    let mut fact = Rat::one();
    let mut norms: Vec<Rat> = Vec::with_capacity(n + 1); // 1/(k!·∏β)
    for k in 0..=n {
        if k > 0 {
            fact *= Rat::from_integer(Int::from(k as i64));
        }
        norms.push((&fact * &beta_prod).recip());
    }
    let mut tables = BTreeMap::new();
    for (g, ph) in pihats {
        let pis: Vec<Rat> = (0..=n).map(|k| &ph[n - k] * &norms[k]).collect();
        tables.insert(g, pis);
    }
    // c_B = A_B^{-T} c
    let c_rat: Vec<Rat> = c.iter().map(|v| Rat::from_integer(v.clone())).collect();
    let c_b = solve_rational(&a_b.transpose(), &c_rat)?;
    Ok(PieceTables {
        p_mat: tbl.smith.p.clone(),
        s_diag: tbl.smith.diag(),
        c_b,
        betas,
        delta: tbl.delta,
        tables,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{int, rat, rat_int};
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    #[test]
    fn group_data_identity() {
        let sf = smith_normal_form(&IntMatrix::identity(3)).unwrap();
        let (g, _, orders) = group_data(&sf).unwrap();
        assert_eq!(g.order, int(1));
        assert!(orders.iter().all(|r| r.is_one()));
    }

    #[test]
    fn group_data_order_of_two_mod_four() {
        // S = diag(1,4), generator residue (0,2) has order 2
        let diag = vec![int(1), int(4)];
        let group = SmithGroup { diag: diag.clone(), nontrivial: vec![1], order: int(4) };
        let g = vec![int(0), int(2)];
        // direct formula
        let mut r = Int::one();
        for j in 0..2 {
            if diag[j] <= Int::one() {
                continue;
            }
            let q = &diag[j] / diag[j].gcd(&g[j]);
            r = r.lcm(&q);
        }
        assert_eq!(r, int(2));
        // oracle: repeated addition until identity
        let mut cur = g.clone();
        let mut count = 1;
        while cur.iter().any(|v| !v.is_zero()) {
            cur = group.add(&cur, &g);
            count += 1;
        }
        assert_eq!(count, 2);
    }

    #[test]
    fn group_data_orders_match_repeated_addition() {
        let mut rng = StdRng::seed_from_u64(31);
        let mut done = 0;
        while done < 20 {
            let a = IntMatrix::from_rows(
                (0..3).map(|_| (0..3).map(|_| int(rng.gen_range(-4..=4))).collect()).collect(),
            );
            if determinant(&a).unwrap().is_zero() {
                continue;
            }
            let sf = smith_normal_form(&a).unwrap();
            let (group, gens, orders) = group_data(&sf).unwrap();
            for (g, r) in gens.iter().zip(&orders) {
                let mut cur = g.clone();
                let mut count = Int::one();
                while cur.iter().any(|v| !v.is_zero()) {
                    cur = group.add(&cur, g);
                    count += Int::one();
                }
                assert_eq!(&count, r, "order of {g:?}");
                assert!(*r <= sf.sigma);
            }
            done += 1;
        }
    }

    #[test]
    fn numerator_identity_base() {
        let tbl = numerator_table(&IntMatrix::identity(2), &[int(1), int(1)]).unwrap();
        assert_eq!(tbl.tables.len(), 1);
        let poly = tbl.tables.values().next().unwrap();
        assert_eq!(poly, &BTreeMap::from([(0i64, 1i64)]));
        assert_eq!(tbl.betas_int, vec![int(1), int(1)]);
        assert_eq!(tbl.delta, int(1));
    }

    #[test]
    fn numerator_diag_example() {
        // A = diag(1,2), c = (1,1): G ≅ Z/2, numerators 1 and u
        let a = IntMatrix::from_i64(&[&[1, 0], &[0, 2]]);
        let tbl = numerator_table(&a, &[int(1), int(1)]).unwrap();
        assert_eq!(tbl.delta, int(2));
        let id = vec![int(0), int(0)];
        let other = vec![int(0), int(1)];
        assert_eq!(tbl.tables[&id], BTreeMap::from([(0i64, 1i64)]));
        assert_eq!(tbl.tables[&other], BTreeMap::from([(1i64, 1i64)]));
    }

    #[test]
    fn numerator_matches_series_oracle() {
        let mut rng = StdRng::seed_from_u64(77);
        let mut done = 0;
        while done < 12 {
            let n = rng.gen_range(1..=3usize);
            let a = IntMatrix::from_rows(
                (0..n).map(|_| (0..n).map(|_| int(rng.gen_range(-3..=3))).collect()).collect(),
            );
            let det = determinant(&a).unwrap();
            if det.is_zero() || det.abs() > int(8) {
                continue;
            }
            let z: Vec<Int> = (0..n).map(|_| int(rng.gen_range(1..=3))).collect();
            let c = a.transpose().mul_vec(&z);
            crate::selftest::assert_series_oracle(&a, &c).unwrap();
            done += 1;
        }
    }

    #[test]
    fn todd_low_degrees() {
        let betas = vec![rat(2, 3), rat(-1, 2), rat_int(4)];
        let td = todd_polynomials(&betas, 3);
        assert_eq!(td[0], Rat::one());
        let sum: Rat = betas.iter().sum();
        assert_eq!(td[1], sum / rat_int(2));
    }

    #[test]
    fn todd_matches_series_product() {
        // n = 2, β = (1,1): compare against the direct expansion of
        // (x/(1−e^{−x}))² to order 2: (1 + x/2 + x²/12)² = 1 + x + x²/(12/…)
        let td = todd_polynomials(&[rat_int(1), rat_int(1)], 2);
        // coefficients of x/(1−e^{−x}): 1, 1/2, 1/12
        let a = [rat_int(1), rat(1, 2), rat(1, 12)];
        let direct2 = &a[0] * &a[2] + &a[1] * &a[1] + &a[2] * &a[0];
        assert_eq!(td[1], rat_int(1));
        assert_eq!(td[2], direct2);
    }

    #[test]
    fn pi_hat_trivial_group_is_todd() {
        let tbl = numerator_table(&IntMatrix::identity(3), &[int(1), int(2), int(1)]).unwrap();
        let betas: Vec<Rat> = tbl.betas_int.iter().map(|b| Rat::from_integer(b.clone())).collect();
        let todd = todd_polynomials(&betas, 3);
        let ph = pi_hat_tables(&tbl, &todd);
        let v = ph.values().next().unwrap();
        assert_eq!(v, &todd);
    }

    #[test]
    fn pi_hat_matches_naive_double_sum() {
        let mut rng = StdRng::seed_from_u64(13);
        let mut done = 0;
        while done < 10 {
            let n = rng.gen_range(1..=3usize);
            let a = IntMatrix::from_rows(
                (0..n).map(|_| (0..n).map(|_| int(rng.gen_range(-3..=3))).collect()).collect(),
            );
            if determinant(&a).unwrap().is_zero() {
                continue;
            }
            let z: Vec<Int> = (0..n).map(|_| int(rng.gen_range(-2..=2))).collect();
            let c = a.transpose().mul_vec(&z);
            let Ok(tbl) = numerator_table(&a, &c) else { continue };
            let delta_rat = Rat::from_integer(tbl.delta.clone());
            let betas: Vec<Rat> =
                tbl.betas_int.iter().map(|b| Rat::from_integer(b.clone()) / &delta_rat).collect();
            let todd = todd_polynomials(&betas, n);
            let ph = pi_hat_tables(&tbl, &todd);
            for (g, poly) in &tbl.tables {
                for k in 0..=n {
                    // naive double loop
                    let mut acc = Rat::zero();
                    for j in 0..=k {
                        let mut inner = Rat::zero();
                        for (&e, &cf) in poly {
                            let mut pw = Rat::one();
                            for _ in 0..j {
                                pw *= Rat::from_integer(Int::from(-e));
                            }
                            inner += Rat::from_integer(Int::from(cf)) * pw;
                        }
                        let mut denom = Rat::one();
                        for t in 1..=j {
                            denom *= &delta_rat * Rat::from_integer(Int::from(t as i64));
                        }
                        acc += &todd[k - j] * inner / denom;
                    }
                    assert_eq!(ph[g][k], acc, "π̂_{k} at {g:?}");
                }
            }
            done += 1;
        }
    }

    #[test]
    fn piece_residue_canonicalization() {
        let a = IntMatrix::from_i64(&[&[1, 0], &[0, 3]]);
        let piece = constant_term_piece(
            &a,
            &[int(1), int(1)],
            vec![0, 1],
            vec![rat_int(0), rat_int(0)],
            RatMatrix::zero(2, 0),
        )
        .unwrap();
        // periodicity by construction: lookup canonicalizes x + S·t
        let t0 = vec![int(2), int(1)];
        let t_shift = vec![int(2) + int(5) * int(1), int(1) + int(5) * int(3)];
        assert_eq!(piece.residue(&t0), piece.residue(&t_shift));
        assert_eq!(piece.pi_at(&t0), piece.pi_at(&t_shift));
    }

    #[test]
    fn unimodular_piece_has_single_group_element() {
        let a = IntMatrix::from_i64(&[&[1, 1], &[0, 1]]);
        let piece = constant_term_piece(
            &a,
            &[int(2), int(1)],
            vec![0, 1],
            vec![rat_int(0), rat_int(0)],
            RatMatrix::zero(2, 0),
        )
        .unwrap();
        assert_eq!(piece.tables.len(), 1);
        assert_eq!(piece.period_product(), int(1));
    }
}
