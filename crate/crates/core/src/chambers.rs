//! Chamber decomposition of the parameter space: validity domains of the
//! bases, the arrangement of their facet hyperplanes restricted to Π(P),
//! parametric-vertex deduplication, and the sign-vector lookup structure.
//!
//! Chambers of every dimension are enumerated directly as sign-vector
//! cells of the arrangement; a cell is kept iff it lies inside Π(P)
//! (cells never straddle the projection because its boundary is covered
//! by validity-domain facets).

use crate::arith::{
    canonical_sign, determinant, dot_rat, gcd_slice, int_vec_to_rat, kernel_basis_int, lcm_int,
    rank_rat, solve_rational, Int, IntMatrix, Rat, RatMatrix,
};
use crate::error::{Error, Result};
use crate::lp::{self, LpOutcome, LpProblem};
use crate::polyhedron::{project_to_parameters, ParametricSystem};
use num::{Integer, One, Signed, Zero};
use std::collections::BTreeMap;

/// Affine map V_B(y) = T y + t of a base's parametric vertex.
#[derive(Clone, Debug, PartialEq)]
pub struct ParametricVertexMap {
    pub basis: Vec<usize>,
    pub t_mat: RatMatrix,
    pub t_vec: Vec<Rat>,
}

impl ParametricVertexMap {
    pub fn eval(&self, y: &[Rat]) -> Vec<Rat> {
        let mut out = self.t_mat.mul_vec(y);
        for (o, t) in out.iter_mut().zip(&self.t_vec) {
            *o += t;
        }
        out
    }
}

/// Integer-normalized affine functional a·y − rhs with canonical sign.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Hyperplane {
    pub coeffs: Vec<Int>,
    pub rhs: Int,
}

impl Hyperplane {
    pub fn eval(&self, y: &[Rat]) -> Rat {
        let c: Rat = self.coeffs.iter().zip(y).map(|(a, v)| Rat::from_integer(a.clone()) * v).sum();
        c - Rat::from_integer(self.rhs.clone())
    }

    pub fn sign_at(&self, y: &[Rat]) -> i8 {
        let v = self.eval(y);
        if v.is_zero() {
            0
        } else if v.is_positive() {
            1
        } else {
            -1
        }
    }

    fn from_row(coeffs: &[Rat], rhs: &Rat) -> Option<Hyperplane> {
        if coeffs.iter().all(|c| c.is_zero()) {
            return None;
        }
        let mut den = Int::one();
        for c in coeffs.iter().chain(std::iter::once(rhs)) {
            den = lcm_int(&den, c.denom());
        }
        let scale = Rat::from_integer(den);
        // (a | β) of the functional a·y − β, scaled integral and primitive
        let mut all: Vec<Int> = coeffs.iter().map(|c| (c * &scale).to_integer()).collect();
        all.push((rhs * &scale).to_integer());
        let g = gcd_slice(&all);
        if !g.is_zero() && !g.is_one() {
            for v in all.iter_mut() {
                *v = &*v / &g;
            }
        }
        // canonical sign: first nonzero coefficient of a positive (a ≠ 0,
        // so the decision never rests on β)
        canonical_sign(&mut all[..]);
        let rhs = all.pop().unwrap();
        Some(Hyperplane { coeffs: all, rhs })
    }
}

/// Build the canonical hyperplane of the inequality row a·y ≤ β, i.e. the
/// functional a·y − β.
fn hyperplane_of_row(coeffs: &[Rat], rhs: &Rat) -> Option<Hyperplane> {
    // functional is (coeffs | −rhs); from_row expects (coeffs, rhs)
    Hyperplane::from_row(coeffs, rhs)
}

#[derive(Clone, Debug)]
pub struct Chamber {
    pub dim: usize,
    pub sign_vector: Vec<i8>,
    /// Indices into the hyperplane list with sign 0.
    pub zero_set: Vec<usize>,
    /// Integer direction basis of the chamber's affine hull (dim vectors).
    pub hull_basis: Vec<Vec<Int>>,
    pub witness: Vec<Rat>,
    /// Deduplicated parametric vertex maps.
    pub maps: Vec<ParametricVertexMap>,
    pub chdenom_z: Int,
    pub chdenom_q: Rat,
}

impl Chamber {
    /// Closed H-description: equalities from the zero set, inequalities
    /// from the strict signs.
    pub fn h_description(&self, hyperplanes: &[Hyperplane]) -> (Vec<Hyperplane>, Vec<(Vec<Int>, Int)>) {
        let mut eqs = Vec::new();
        let mut ineqs = Vec::new();
        for (i, &s) in self.sign_vector.iter().enumerate() {
            let h = &hyperplanes[i];
            if s == 0 {
                eqs.push(h.clone());
            } else {
                // s·(a·y − rhs) ≥ 0 ⟺ (−s·a)·y ≤ −s·rhs
                let sc = Int::from(-(s as i64));
                ineqs.push((
                    h.coeffs.iter().map(|c| c * &sc).collect(),
                    &h.rhs * &sc,
                ));
            }
        }
        (eqs, ineqs)
    }

    /// Exact relative-interior membership: the sign vector matches.
    pub fn contains_relint(&self, hyperplanes: &[Hyperplane], y: &[Rat]) -> bool {
        self.sign_vector
            .iter()
            .enumerate()
            .all(|(i, &s)| hyperplanes[i].sign_at(y) == s)
    }

    /// Closure membership: zero rows stay zero, strict rows keep sign or
    /// vanish.
    pub fn contains_closure(&self, hyperplanes: &[Hyperplane], y: &[Rat]) -> bool {
        self.sign_vector.iter().enumerate().all(|(i, &s)| {
            let v = hyperplanes[i].sign_at(y);
            v == s || (s != 0 && v == 0)
        })
    }

    /// Deterministic relative-interior samples: the witness plus small
    /// exact offsets along the hull directions.
    pub fn sample_relint(&self, hyperplanes: &[Hyperplane], want: usize) -> Vec<Vec<Rat>> {
        let mut out = vec![self.witness.clone()];
        if self.dim == 0 {
            return out;
        }
        let mut dirs: Vec<Vec<Int>> = Vec::new();
        for v in &self.hull_basis {
            dirs.push(v.clone());
            dirs.push(v.iter().map(|x| -x.clone()).collect());
        }
        if self.hull_basis.len() >= 2 {
            let sum: Vec<Int> = (0..self.hull_basis[0].len())
                .map(|i| self.hull_basis.iter().map(|v| v[i].clone()).sum())
                .collect();
            dirs.push(sum);
        }
        for d in dirs {
            if out.len() >= want {
                break;
            }
            let dr = int_vec_to_rat(&d);
            // largest ε below every strict hyperplane's margin
            let mut eps = Rat::one();
            let mut ok = true;
            for (i, &s) in self.sign_vector.iter().enumerate() {
                let slope = dot_rat(&int_vec_to_rat(&hyperplanes[i].coeffs), &dr);
                if s == 0 {
                    if !slope.is_zero() {
                        ok = false;
                        break;
                    }
                    continue;
                }
                if slope.is_zero() {
                    continue;
                }
                let margin = hyperplanes[i].eval(&self.witness).abs()
                    / (slope.abs() * Rat::from_integer(Int::from(2)));
                if margin < eps {
                    eps = margin;
                }
            }
            if !ok || eps.is_zero() {
                continue;
            }
            let candidate: Vec<Rat> = self
                .witness
                .iter()
                .zip(&dr)
                .map(|(w, dv)| w + &eps * dv)
                .collect();
            if self.contains_relint(hyperplanes, &candidate) && !out.contains(&candidate) {
                out.push(candidate);
            }
        }
        out
    }
}

#[derive(Clone, Debug, Default)]
pub struct ChamberIndex {
    pub hyperplanes: Vec<Hyperplane>,
    pub by_sign: BTreeMap<Vec<i8>, usize>,
}

impl ChamberIndex {
    pub fn sign_vector(&self, y: &[Rat]) -> Vec<i8> {
        self.hyperplanes.iter().map(|h| h.sign_at(y)).collect()
    }

    /// Exact-match lookup; None means y ∉ Π(P).
    pub fn lookup(&self, y: &[Rat]) -> Option<usize> {
        self.by_sign.get(&self.sign_vector(y)).copied()
    }
}

#[derive(Clone, Debug)]
pub struct ChamberDecomposition {
    pub chambers: Vec<Chamber>,
    pub index: ChamberIndex,
    /// Π(P) as inequality rows in y (Fourier–Motzkin output).
    pub projection: Vec<(Vec<Rat>, Rat)>,
}

/// All nonsingular bases of A with their parametric vertex maps.
pub fn enumerate_bases(sys: &ParametricSystem) -> Result<Vec<ParametricVertexMap>> {
    let n = sys.n_x();
    let mut out = Vec::new();
    for subset in crate::arith::combinations(sys.m(), n) {
        let a_b = sys.coeffs.select_rows(&subset);
        if determinant(&a_b)?.is_zero() {
            continue;
        }
        // V_B(y) = A_B^{-1}(b_B + B_B y)
        let mut t_cols: Vec<Vec<Rat>> = Vec::with_capacity(sys.n_y());
        for j in 0..sys.n_y() {
            let col: Vec<Rat> = subset.iter().map(|&i| sys.param[(i, j)].clone()).collect();
            t_cols.push(solve_rational(&a_b, &col)?);
        }
        let t_vec = solve_rational(
            &a_b,
            &subset.iter().map(|&i| sys.offset[i].clone()).collect::<Vec<_>>(),
        )?;
        let t_mat = RatMatrix::from_rows(
            (0..n).map(|r| (0..sys.n_y()).map(|c| t_cols[c][r].clone()).collect()).collect(),
        );
        out.push(ParametricVertexMap { basis: subset, t_mat, t_vec });
    }
    Ok(out)
}

/// {y : A·V_B(y) ≤ b + B y} as integer-cleared inequality rows in y.
pub fn validity_domain(sys: &ParametricSystem, map: &ParametricVertexMap) -> Vec<(Vec<Rat>, Rat)> {
    let n = sys.n_x();
    let ny = sys.n_y();
    let mut rows = Vec::with_capacity(sys.m());
    for i in 0..sys.m() {
        // (A_i·T − B_i)·y ≤ b_i − A_i·t
        let a_i = int_vec_to_rat(sys.coeffs.row(i));
        let mut coeffs: Vec<Rat> = (0..ny)
            .map(|j| {
                (0..n).map(|k| &a_i[k] * &map.t_mat[(k, j)]).sum::<Rat>() - &sys.param[(i, j)]
            })
            .collect();
        let rhs = &sys.offset[i] - dot_rat(&a_i, &map.t_vec);
        // clear denominators row-wise
        let mut den = Int::one();
        for c in coeffs.iter().chain(std::iter::once(&rhs)) {
            den = lcm_int(&den, c.denom());
        }
        let s = Rat::from_integer(den);
        for c in coeffs.iter_mut() {
            *c = &*c * &s;
        }
        rows.push((coeffs, rhs * &s));
    }
    rows
}

struct Region {
    signs: Vec<i8>,
    witness: Vec<Rat>, // y-space, strict w.r.t. its nonzero signs
}

/// Closed-region LP over (x, y): the system rows plus the processed sign
/// constraints; maximizes s·h(y) capped at 1. Returns a y-point with
/// s·h(y) > 0 if one exists.
fn open_side_point(
    sys: &ParametricSystem,
    hyperplanes: &[Hyperplane],
    signs: &[i8],
    h: &Hyperplane,
    s: i8,
) -> Option<Vec<Rat>> {
    let nx = sys.n_x();
    let ny = sys.n_y();
    let nv = nx + ny;
    let mut lpp = LpProblem::new(nv);
    for (row, rhs) in sys.xy_rows() {
        lpp.add_ineq(row, rhs);
    }
    for (j, &sj) in signs.iter().enumerate() {
        let hj = &hyperplanes[j];
        let mut row = vec![Rat::zero(); nv];
        for (k, c) in hj.coeffs.iter().enumerate() {
            row[nx + k] = Rat::from_integer(c.clone());
        }
        let rhs = Rat::from_integer(hj.rhs.clone());
        if sj == 0 {
            lpp.add_eq(row, rhs);
        } else if sj > 0 {
            // a·y ≥ rhs
            lpp.add_ineq(row.iter().map(|v| -v.clone()).collect(), -rhs);
        } else {
            lpp.add_ineq(row, rhs);
        }
    }
    // objective s·(a·y − rhs), capped
    let mut obj = vec![Rat::zero(); nv];
    for (k, c) in h.coeffs.iter().enumerate() {
        obj[nx + k] = Rat::from_integer(c.clone()) * Rat::from_integer(Int::from(s as i64));
    }
    let cap_rhs = Rat::one() + Rat::from_integer(&h.rhs * Int::from(s as i64));
    lpp.add_ineq(obj.clone(), cap_rhs);
    match lpp.maximize(&obj) {
        LpOutcome::Optimal { x, value } => {
            let shifted = value - Rat::from_integer(&h.rhs * Int::from(s as i64));
            if shifted.is_positive() {
                Some(x[nx..].to_vec())
            } else {
                None
            }
        }
        _ => None,
    }
}

/// Strict LP for the h = 0 slice of a region.
fn zero_slice_point(
    sys: &ParametricSystem,
    hyperplanes: &[Hyperplane],
    signs: &[i8],
    h: &Hyperplane,
) -> Option<Vec<Rat>> {
    let nx = sys.n_x();
    let ny = sys.n_y();
    let nv = nx + ny;
    let closed = sys.xy_rows();
    let mut eqs = Vec::new();
    let mut strict = Vec::new();
    let lift = |hy: &Hyperplane| -> (Vec<Rat>, Rat) {
        let mut row = vec![Rat::zero(); nv];
        for (k, c) in hy.coeffs.iter().enumerate() {
            row[nx + k] = Rat::from_integer(c.clone());
        }
        (row, Rat::from_integer(hy.rhs.clone()))
    };
    for (j, &sj) in signs.iter().enumerate() {
        let (row, rhs) = lift(&hyperplanes[j]);
        if sj == 0 {
            eqs.push((row, rhs));
        } else if sj > 0 {
            // a·y > rhs ⟺ −a·y < −rhs
            strict.push((row.iter().map(|v| -v.clone()).collect(), -rhs));
        } else {
            strict.push((row, rhs));
        }
    }
    let (row, rhs) = lift(h);
    eqs.push((row, rhs));
    lp::strict_feasible_point(nv, &closed, &eqs, &strict).map(|p| p[nx..].to_vec())
}

fn segment_point(w: &[Rat], p: &[Rat], mu: &Rat) -> Vec<Rat> {
    w.iter().zip(p).map(|(a, b)| a + mu * &(b - a)).collect()
}

/// Witness for the s-side child: moves from the region witness toward a
/// closed-side point, staying strict on every previously strict sign.
fn side_witness(w: &[Rat], p: &[Rat], h: &Hyperplane, s: i8) -> Vec<Rat> {
    let hw = h.eval(w) * Rat::from_integer(Int::from(s as i64));
    let hp = h.eval(p) * Rat::from_integer(Int::from(s as i64));
    debug_assert!(hp.is_positive());
    if hw.is_positive() {
        return w.to_vec();
    }
    // crossing at μ* = −hw/(hp − hw) ∈ [0, 1); any μ ∈ (μ*, 1) works
    let mu_star = -&hw / (&hp - &hw);
    let mu = (&mu_star + Rat::one()) / Rat::from_integer(Int::from(2));
    segment_point(w, p, &mu)
}

/// Full chamber decomposition of a normalized canonical system.
pub fn build_chamber_decomposition(sys: &ParametricSystem) -> Result<ChamberDecomposition> {
    let nx = sys.n_x();
    let ny = sys.n_y();
    // feasibility of P itself
    let mut feas = LpProblem::new(nx + ny);
    for (row, rhs) in sys.xy_rows() {
        feas.add_ineq(row, rhs);
    }
    let Some(p0) = feas.feasible_point() else {
        return Ok(ChamberDecomposition {
            chambers: Vec::new(),
            index: ChamberIndex::default(),
            projection: Vec::new(),
        });
    };

    let maps = enumerate_bases(sys)?;
    if maps.is_empty() {
        return Err(Error::Rank { required: nx, found: rank_rat(&sys.coeffs.to_rat()) });
    }

    // facet hyperplanes of every validity domain
    let mut hyper_set: std::collections::BTreeSet<Hyperplane> = std::collections::BTreeSet::new();
    for map in &maps {
        let rows = validity_domain(sys, map);
        // drop identically-true rows; a identically-false row empties the domain
        let mut clean: Vec<(Vec<Rat>, Rat)> = Vec::new();
        let mut empty = false;
        for (a, b) in rows {
            if a.iter().all(|c| c.is_zero()) {
                if b.is_negative() {
                    empty = true;
                    break;
                }
                continue;
            }
            clean.push((a, b));
        }
        if empty || clean.is_empty() {
            if !empty {
                // whole parameter space: no facets to contribute
            }
            continue;
        }
        let mut lp_dom = LpProblem::new(ny);
        for (a, b) in &clean {
            lp_dom.add_ineq(a.clone(), b.clone());
        }
        if lp_dom.feasible_point().is_none() {
            continue; // empty validity domain: base never active
        }
        for &i in &lp::implicit_equality_rows(ny, &clean) {
            if let Some(h) = hyperplane_of_row(&clean[i].0, &clean[i].1) {
                hyper_set.insert(h);
            }
        }
        for i in lp::irredundant_rows(ny, &clean, &[]) {
            if let Some(h) = hyperplane_of_row(&clean[i].0, &clean[i].1) {
                hyper_set.insert(h);
            }
        }
    }

    // prefilter: keep hyperplanes that vanish somewhere on Π(P)
    let mut hyperplanes: Vec<Hyperplane> = Vec::new();
    for h in hyper_set {
        let mut lpp = LpProblem::new(nx + ny);
        for (row, rhs) in sys.xy_rows() {
            lpp.add_ineq(row, rhs);
        }
        let mut obj = vec![Rat::zero(); nx + ny];
        for (k, c) in h.coeffs.iter().enumerate() {
            obj[nx + k] = Rat::from_integer(c.clone());
        }
        let target = Rat::from_integer(h.rhs.clone());
        let reaches_low = match lpp.minimize(&obj) {
            LpOutcome::Optimal { value, .. } => value <= target,
            LpOutcome::Unbounded => true,
            LpOutcome::Infeasible => false,
        };
        let reaches_high = match lpp.maximize(&obj) {
            LpOutcome::Optimal { value, .. } => value >= target,
            LpOutcome::Unbounded => true,
            LpOutcome::Infeasible => false,
        };
        if reaches_low && reaches_high {
            hyperplanes.push(h);
        }
    }

    // incremental sign-vector cell enumeration restricted to Π(P)
    let mut regions = vec![Region { signs: Vec::new(), witness: p0[nx..].to_vec() }];
    for (hi, h) in hyperplanes.iter().enumerate() {
        let mut next = Vec::with_capacity(regions.len() * 2);
        for region in regions {
            let sw = h.sign_at(&region.witness);
            let mut children: Vec<(i8, Vec<Rat>)> = vec![(sw, region.witness.clone())];
            let mut side_points: BTreeMap<i8, Vec<Rat>> = BTreeMap::new();
            for s in [1i8, -1i8] {
                if s == sw {
                    continue;
                }
                if let Some(p) = open_side_point(sys, &hyperplanes[..hi], &region.signs, h, s) {
                    let w = side_witness(&region.witness, &p, h, s);
                    debug_assert_eq!(h.sign_at(&w), s);
                    side_points.insert(s, w.clone());
                    children.push((s, w));
                }
            }
            if sw != 0 {
                // the h = 0 slice: free when both open sides exist
                let zero_w = match (side_points.get(&1), side_points.get(&-1)) {
                    _ if sw == 1 && side_points.contains_key(&-1) => {
                        let p = &side_points[&-1];
                        Some(crossing_point(&region.witness, p, h))
                    }
                    _ if sw == -1 && side_points.contains_key(&1) => {
                        let p = &side_points[&1];
                        Some(crossing_point(&region.witness, p, h))
                    }
                    _ => zero_slice_point(sys, &hyperplanes[..hi], &region.signs, h),
                };
                if let Some(w) = zero_w {
                    debug_assert_eq!(h.sign_at(&w), 0);
                    children.push((0, w));
                }
            }
            for (s, w) in children {
                let mut signs = region.signs.clone();
                signs.push(s);
                next.push(Region { signs, witness: w });
            }
        }
        regions = next;
    }

    // assemble chambers
    let mut chambers = Vec::with_capacity(regions.len());
    for region in &regions {
        let zero_set: Vec<usize> =
            (0..hyperplanes.len()).filter(|&i| region.signs[i] == 0).collect();
        let hull_basis = if zero_set.is_empty() {
            (0..ny)
                .map(|i| {
                    let mut e = vec![Int::zero(); ny];
                    e[i] = Int::one();
                    e
                })
                .collect()
        } else if ny == 0 {
            Vec::new()
        } else {
            let normals = IntMatrix::from_rows(
                zero_set.iter().map(|&i| hyperplanes[i].coeffs.clone()).collect(),
            );
            kernel_basis_int(&normals)
        };
        let dim = hull_basis.len();
        // bases whose validity domain contains the cell
        let mut retained: BTreeMap<Vec<Rat>, ParametricVertexMap> = BTreeMap::new();
        for map in &maps {
            let v = map.eval(&region.witness);
            let rhs = sys.rhs_at(&region.witness);
            let feasible = (0..sys.m()).all(|i| {
                dot_rat(&int_vec_to_rat(sys.coeffs.row(i)), &v) <= rhs[i]
            });
            if !feasible {
                continue;
            }
            // dedup key: (T·hull_basis, value at witness)
            let mut key: Vec<Rat> = Vec::new();
            for d in &hull_basis {
                let dr = int_vec_to_rat(d);
                key.extend(map.t_mat.mul_vec(&dr));
            }
            key.extend(v.clone());
            retained.entry(key).or_insert_with(|| map.clone());
        }
        if retained.is_empty() {
            return Err(Error::Internal("cell of Π(P) with no feasible base".into()));
        }
        let maps_kept: Vec<ParametricVertexMap> = retained.into_values().collect();
        let (chdenom_z, chdenom_q) = chamber_denominators(&maps_kept);
        chambers.push(Chamber {
            dim,
            sign_vector: region.signs.clone(),
            zero_set,
            hull_basis,
            witness: region.witness.clone(),
            maps: maps_kept,
            chdenom_z,
            chdenom_q,
        });
    }
    chambers.sort_by(|a, b| a.sign_vector.cmp(&b.sign_vector));
    let by_sign: BTreeMap<Vec<i8>, usize> =
        chambers.iter().enumerate().map(|(i, c)| (c.sign_vector.clone(), i)).collect();
    if by_sign.len() != chambers.len() {
        return Err(Error::Internal("duplicate sign vectors among cells".into()));
    }
    let projection = project_to_parameters(sys);
    Ok(ChamberDecomposition {
        chambers,
        index: ChamberIndex { hyperplanes, by_sign },
        projection,
    })
}

fn crossing_point(w: &[Rat], p: &[Rat], h: &Hyperplane) -> Vec<Rat> {
    let hw = h.eval(w);
    let hp = h.eval(p);
    debug_assert!(hw.is_positive() != hp.is_positive());
    let mu = -&hw / (&hp - &hw);
    segment_point(w, p, &mu)
}

/// chdenom_Z = lcm of the denominators of all (T, t) entries;
/// chdenom_Q = that lcm divided by the gcd of the numerators over the
/// common denominator.
pub fn chamber_denominators(maps: &[ParametricVertexMap]) -> (Int, Rat) {
    let mut entries: Vec<Rat> = Vec::new();
    for m in maps {
        for i in 0..m.t_mat.rows {
            entries.extend(m.t_mat.row(i).iter().cloned());
        }
        entries.extend(m.t_vec.iter().cloned());
    }
    let mut l = Int::one();
    for e in &entries {
        l = lcm_int(&l, e.denom());
    }
    let mut g = Int::zero();
    for e in &entries {
        let n = (e * Rat::from_integer(l.clone())).to_integer();
        g = g.gcd(&n);
    }
    if g.is_zero() {
        return (Int::one(), Rat::one());
    }
    (l.clone(), Rat::new(l, g))
}

/// chamber_lookup: exact sign-vector match, None when y ∉ Π(P).
pub fn chamber_lookup<'a>(
    decomp: &'a ChamberDecomposition,
    y: &[Rat],
) -> Option<(usize, &'a Chamber)> {
    decomp.index.lookup(y).map(|i| (i, &decomp.chambers[i]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{int, rat, rat_int};

    fn segment_system() -> ParametricSystem {
        // P_y = {0 ≤ x ≤ y}
        ParametricSystem::canonical(
            IntMatrix::from_i64(&[&[-1], &[1]]),
            RatMatrix::from_rows(vec![vec![rat_int(0)], vec![rat_int(1)]]),
            vec![rat_int(0), rat_int(0)],
        )
    }

    #[test]
    fn validity_domain_segment() {
        let sys = segment_system();
        let maps = enumerate_bases(&sys).unwrap();
        // basis {x ≤ y}: V(y) = y, valid for y ≥ 0
        let upper = maps.iter().find(|m| m.basis == vec![1]).unwrap();
        let rows = validity_domain(&sys, upper);
        let mut lpp = LpProblem::new(1);
        for (a, b) in &rows {
            lpp.add_ineq(a.clone(), b.clone());
        }
        // contains y = 2, not y = −1
        assert!(rows.iter().all(|(a, b)| dot_rat(a, &[rat_int(2)]) <= *b));
        assert!(!rows.iter().all(|(a, b)| dot_rat(a, &[rat_int(-1)]) <= *b));
    }

    #[test]
    fn validity_domain_vertexhood_samples() {
        let sys = segment_system();
        let maps = enumerate_bases(&sys).unwrap();
        for map in &maps {
            let rows = validity_domain(&sys, map);
            for t in 0..=4i64 {
                let y = vec![rat_int(t)];
                let inside = rows.iter().all(|(a, b)| dot_rat(a, &y) <= *b);
                let v = map.eval(&y);
                let verts = crate::counting::enumerate_vertices_by_bases(
                    &sys.coeffs,
                    &sys.rhs_at(&y),
                )
                .unwrap();
                let is_vertex = verts.iter().any(|vb| vb.vertex == v);
                assert_eq!(inside, is_vertex, "base {:?} at y={t}", map.basis);
            }
        }
    }

    #[test]
    fn segment_chambers() {
        let sys = segment_system();
        let d = build_chamber_decomposition(&sys).unwrap();
        // {y = 0} (0-dim) and {y > 0} (1-dim)
        assert_eq!(d.chambers.len(), 2);
        let dims: Vec<usize> = d.chambers.iter().map(|c| c.dim).collect();
        assert!(dims.contains(&0) && dims.contains(&1));
        // lookup
        let (_, c) = chamber_lookup(&d, &[rat(7, 2)]).unwrap();
        assert_eq!(c.dim, 1);
        let (_, c0) = chamber_lookup(&d, &[rat_int(0)]).unwrap();
        assert_eq!(c0.dim, 0);
        assert!(chamber_lookup(&d, &[rat_int(-1)]).is_none());
        // the 0-dim chamber collapses both maps to one vertex value
        assert_eq!(c0.maps.len(), 1);
        assert_eq!(c.maps.len(), 2);
    }

    #[test]
    fn min_of_two_parameters_dedup() {
        // P_y = {0 ≤ x ≤ min(y1, y2)}
        let sys = ParametricSystem::canonical(
            IntMatrix::from_i64(&[&[-1], &[1], &[1]]),
            RatMatrix::from_rows(vec![
                vec![rat_int(0), rat_int(0)],
                vec![rat_int(1), rat_int(0)],
                vec![rat_int(0), rat_int(1)],
            ]),
            vec![rat_int(0); 3],
        );
        let d = build_chamber_decomposition(&sys).unwrap();
        // off-diagonal full-dim chambers keep 2 distinct maps; on the
        // diagonal the two upper maps collapse to one value, so 2 maps
        // remain after dedup (0 and the merged vertex)
        let diag_interior = chamber_lookup(&d, &[rat_int(2), rat_int(2)]).map(|(_, c)| c).unwrap();
        assert_eq!(diag_interior.dim, 1);
        assert_eq!(diag_interior.maps.len(), 2);
        let off = chamber_lookup(&d, &[rat_int(1), rat_int(3)]).map(|(_, c)| c).unwrap();
        assert_eq!(off.dim, 2);
        assert_eq!(off.maps.len(), 2);
        // every integer point of the quadrant lands in exactly one chamber
        for a in 0..=4i64 {
            for b in 0..=4i64 {
                let y = vec![rat_int(a), rat_int(b)];
                let hits = d
                    .chambers
                    .iter()
                    .filter(|c| c.contains_relint(&d.index.hyperplanes, &y))
                    .count();
                assert_eq!(hits, 1, "y = ({a},{b})");
            }
        }
        assert!(chamber_lookup(&d, &[rat_int(-1), rat_int(2)]).is_none());
    }

    #[test]
    fn vertex_correctness_on_samples() {
        let sys = ParametricSystem::canonical(
            IntMatrix::from_i64(&[&[-1, 0], &[0, -1], &[1, 1], &[1, -1]]),
            RatMatrix::from_rows(vec![
                vec![rat_int(0)],
                vec![rat_int(0)],
                vec![rat_int(1)],
                vec![rat_int(0)],
            ]),
            vec![rat_int(0), rat_int(0), rat_int(0), rat_int(2)],
        );
        let d = build_chamber_decomposition(&sys).unwrap();
        for c in &d.chambers {
            for y in c.sample_relint(&d.index.hyperplanes, 5) {
                let expect: std::collections::BTreeSet<Vec<Rat>> =
                    crate::counting::enumerate_vertices_by_bases(&sys.coeffs, &sys.rhs_at(&y))
                        .unwrap()
                        .into_iter()
                        .map(|v| v.vertex)
                        .collect();
                let got: std::collections::BTreeSet<Vec<Rat>> =
                    c.maps.iter().map(|m| m.eval(&y)).collect();
                assert_eq!(got, expect, "chamber {:?} at {:?}", c.sign_vector, y);
            }
        }
    }

    #[test]
    fn chdenom_ordering() {
        let sys = ParametricSystem::canonical(
            IntMatrix::from_i64(&[&[-1], &[2]]),
            RatMatrix::from_rows(vec![vec![rat_int(0)], vec![rat_int(1)]]),
            vec![rat_int(0), rat_int(0)],
        );
        let d = build_chamber_decomposition(&sys).unwrap();
        for c in &d.chambers {
            let q = &c.chdenom_q;
            let z = Rat::from_integer(c.chdenom_z.clone());
            assert!(*q <= z, "chdenom_Q ≤ chdenom_Z");
        }
        // the half-integer vertex forces chdenom_z = 2 on the positive chamber
        let (_, c) = chamber_lookup(&d, &[rat_int(3)]).unwrap();
        assert_eq!(c.chdenom_z, int(2));
    }

    #[test]
    fn lookup_random_membership() {
        use rand::Rng;
        let mut rng = rand::rngs::StdRng::seed_from_u64(4);
        use rand::SeedableRng;
        let sys = ParametricSystem::canonical(
            IntMatrix::from_i64(&[&[-1], &[1], &[1]]),
            RatMatrix::from_rows(vec![
                vec![rat_int(0), rat_int(0)],
                vec![rat_int(1), rat_int(0)],
                vec![rat_int(0), rat_int(1)],
            ]),
            vec![rat_int(0); 3],
        );
        let d = build_chamber_decomposition(&sys).unwrap();
        for _ in 0..300 {
            let y = vec![
                rat(rng.gen_range(-6..=12), rng.gen_range(1..=4)),
                rat(rng.gen_range(-6..=12), rng.gen_range(1..=4)),
            ];
            match chamber_lookup(&d, &y) {
                Some((_, c)) => {
                    assert!(c.contains_relint(&d.index.hyperplanes, &y));
                    assert!(y[0] >= rat_int(0) && y[1] >= rat_int(0));
                }
                None => {
                    assert!(y[0] < rat_int(0) || y[1] < rat_int(0), "{y:?} wrongly OUTSIDE");
                }
            }
        }
    }
}
