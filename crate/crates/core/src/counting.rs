//! Non-parametric exact counting of {x ∈ Z^n : A x ≤ b}: Brion's
//! decomposition over vertex tangent cones with the duality trick, plus
//! the independent brute-force oracle used throughout the test suites.

use crate::arith::{
    combinations, determinant, int_vec_to_rat, rank_rat, rat_floor, solve_rational, Int, IntMatrix,
    Rat, RatMatrix,
};
use crate::cones::{active_rows, edge_directions, pick_generic_c, triangulate_cone, EdgeDirectionSet};
use crate::error::{Error, Result};
use crate::group_gf::constant_term_piece;
use crate::lp::{self, Bound, LpProblem};
use crate::polyhedron::{eliminate_lines, recession_ray, ParametricSystem};
use num::{One, Signed, ToPrimitive, Zero};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Count {
    Finite(Int),
    Infinite,
}

impl std::fmt::Display for Count {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Count::Finite(v) => write!(f, "{v}"),
            Count::Infinite => write!(f, "INFINITE"),
        }
    }
}

/// A vertex of {x : A x ≤ b} with one witnessing basis and its full active
/// set.
#[derive(Clone, Debug)]
pub struct VertexBasis {
    pub basis: Vec<usize>,
    pub vertex: Vec<Rat>,
    pub active: Vec<usize>,
}

/// All distinct vertices by exhaustive basis scan. Empty polyhedra yield an
/// empty list.
pub fn enumerate_vertices_by_bases(a: &IntMatrix, b: &[Rat]) -> Result<Vec<VertexBasis>> {
    let (m, n) = (a.rows, a.cols);
    if rank_rat(&a.to_rat()) != n {
        return Err(Error::Rank { required: n, found: rank_rat(&a.to_rat()) });
    }
    let mut seen: std::collections::BTreeMap<Vec<Rat>, VertexBasis> = std::collections::BTreeMap::new();
    for subset in combinations(m, n) {
        let sub = a.select_rows(&subset);
        if determinant(&sub)?.is_zero() {
            continue;
        }
        let rhs: Vec<Rat> = subset.iter().map(|&i| b[i].clone()).collect();
        let v = solve_rational(&sub, &rhs)?;
        if seen.contains_key(&v) {
            continue;
        }
        match active_rows(a, b, &v) {
            Ok(active) => {
                seen.insert(v.clone(), VertexBasis { basis: subset, vertex: v, active });
            }
            Err(Error::NotAMember) => continue,
            Err(e) => return Err(e),
        }
    }
    Ok(seen.into_values().collect())
}

/// Exact |P ∩ Z^n| via Brion's theorem: triangulate each vertex's polar
/// cone, dualize the simplicial pieces back to square subsystems, and sum
/// the constant terms of their periodic step-polynomials. Lines and
/// unbounded recession directions are handled first (INFINITE iff the
/// recession cone is nonzero and P is nonempty).
pub fn count_fixed(a: &IntMatrix, b: &[Rat], seed: u64) -> Result<Count> {
    let n = a.cols;
    if n == 0 {
        let ok = b.iter().all(|v| !v.is_negative());
        return Ok(Count::Finite(if ok { Int::one() } else { Int::zero() }));
    }
    if rank_rat(&a.to_rat()) < n {
        // feasibility mode through line elimination
        let sys = ParametricSystem::canonical(a.clone(), RatMatrix::zero(a.rows, 0), b.to_vec());
        let elim = eliminate_lines(&sys)?.expect("rank deficit implies lines");
        let inner = count_fixed(&elim.system.coeffs, &elim.system.offset, seed)?;
        return Ok(match inner {
            Count::Finite(v) if v.is_zero() => Count::Finite(Int::zero()),
            _ => Count::Infinite,
        });
    }
    if recession_ray(a).is_some() {
        let mut lpp = LpProblem::new(n);
        for i in 0..a.rows {
            lpp.add_ineq(int_vec_to_rat(a.row(i)), b[i].clone());
        }
        return Ok(if lpp.feasible_point().is_some() { Count::Infinite } else { Count::Finite(Int::zero()) });
    }
    let vertices = enumerate_vertices_by_bases(a, b)?;
    if vertices.is_empty() {
        return Ok(Count::Finite(Int::zero()));
    }
    // triangulate each vertex cone; pool edge directions for one generic c
    let mut tris = Vec::with_capacity(vertices.len());
    let mut dirs = EdgeDirectionSet::default();
    for v in &vertices {
        let gens: Vec<Vec<Int>> = v.active.iter().map(|&i| a.row(i).to_vec()).collect();
        let tri = triangulate_cone(&gens)?;
        let d = edge_directions(&tri)?;
        for h in d.directions {
            if !dirs.directions.contains(&h) {
                dirs.directions.push(h);
            }
        }
        tris.push(tri);
    }
    let a_basis = first_basis(a)?;
    let (c, _chi) = pick_generic_c(&dirs, &a_basis, seed)?;

    let mut total = Rat::zero();
    for (v, tri) in vertices.iter().zip(&tris) {
        for piece in &tri.pieces {
            let rows: Vec<usize> = piece.generator_indices.iter().map(|&k| v.active[k]).collect();
            let a_bp = a.select_rows(&rows);
            let offs: Vec<Rat> = rows.iter().map(|&i| b[i].clone()).collect();
            let pp = constant_term_piece(&a_bp, &c, rows, offs, RatMatrix::zero(n, 0))?;
            total += pp.eval(&[]);
        }
    }
    if !total.is_integer() || total.is_negative() {
        return Err(Error::Internal(format!("Brion sum is not a nonnegative integer: {total}")));
    }
    Ok(Count::Finite(total.to_integer()))
}

pub(crate) fn first_basis(a: &IntMatrix) -> Result<IntMatrix> {
    let n = a.cols;
    for subset in combinations(a.rows, n) {
        let sub = a.select_rows(&subset);
        if !determinant(&sub)?.is_zero() {
            return Ok(sub);
        }
    }
    Err(Error::Rank { required: n, found: rank_rat(&a.to_rat()) })
}

/// Enumerate the integer points of the exact LP bounding box and count
/// membership. INFINITE when the recession cone is nonzero and P ≠ ∅.
pub fn brute_force_count(a: &IntMatrix, b: &[Rat], budget: u64) -> Result<Count> {
    let n = a.cols;
    if n == 0 {
        let ok = b.iter().all(|v| !v.is_negative());
        return Ok(Count::Finite(if ok { Int::one() } else { Int::zero() }));
    }
    let rows: Vec<(Vec<Rat>, Rat)> = (0..a.rows)
        .map(|i| (int_vec_to_rat(a.row(i)), b[i].clone()))
        .collect();
    let Some(bounds) = lp::coordinate_bounds(n, &rows) else {
        return Ok(Count::Finite(Int::zero()));
    };
    let mut lo = Vec::with_capacity(n);
    let mut hi = Vec::with_capacity(n);
    for (l, h) in &bounds {
        match (l, h) {
            (Bound::Value(l), Bound::Value(h)) => {
                lo.push(rat_floor(&-(-l.clone())).max(l.ceil().to_integer()));
                hi.push(rat_floor(h));
            }
            _ => return Ok(Count::Infinite), // unbounded coordinate, P nonempty
        }
    }
    let mut volume = Int::one();
    for i in 0..n {
        let w = &hi[i] - &lo[i] + Int::one();
        if w.is_negative() || w.is_zero() {
            return Ok(Count::Finite(Int::zero()));
        }
        volume *= w;
    }
    if volume > Int::from(budget) {
        return Err(Error::Budget { needed: volume.to_string(), budget });
    }
    // integer fast path: A x is integral, so A x ≤ b ⟺ A x ≤ ⌊b⌋
    let a_i64: Option<Vec<Vec<i64>>> = (0..a.rows)
        .map(|i| a.row(i).iter().map(|v| v.to_i64()).collect::<Option<Vec<i64>>>())
        .collect();
    let bf: Vec<Int> = b.iter().map(rat_floor).collect();
    let bf_i64: Option<Vec<i64>> = bf.iter().map(|v| v.to_i64()).collect();
    let lo_i64: Option<Vec<i64>> = lo.iter().map(|v| v.to_i64()).collect();
    let hi_i64: Option<Vec<i64>> = hi.iter().map(|v| v.to_i64()).collect();
    let count = match (a_i64, bf_i64, lo_i64, hi_i64) {
        (Some(ai), Some(bi), Some(loi), Some(hii)) => {
            let mut x = loi.clone();
            let mut count: u64 = 0;
            'outer: loop {
                let ok = (0..ai.len()).all(|r| {
                    let s: i128 = ai[r].iter().zip(&x).map(|(&c, &v)| c as i128 * v as i128).sum();
                    s <= bi[r] as i128
                });
                if ok {
                    count += 1;
                }
                for j in 0..n {
                    x[j] += 1;
                    if x[j] <= hii[j] {
                        continue 'outer;
                    }
                    x[j] = loi[j];
                }
                break;
            }
            Int::from(count)
        }
        _ => {
            let mut x = lo.clone();
            let mut count = Int::zero();
            'outer: loop {
                let ok = (0..a.rows).all(|r| {
                    let s: Int = a.row(r).iter().zip(&x).map(|(c, v)| c * v).sum();
                    s <= bf[r]
                });
                if ok {
                    count += Int::one();
                }
                for j in 0..n {
                    x[j] += Int::one();
                    if x[j] <= hi[j] {
                        continue 'outer;
                    }
                    x[j] = lo[j].clone();
                }
                break;
            }
            count
        }
    };
    Ok(Count::Finite(count))
}

/// Δ(A): maximum absolute value of rank-order minors.
pub fn delta_modularity(a: &IntMatrix) -> Result<Int> {
    let r = rank_rat(&a.to_rat());
    if r == 0 {
        return Ok(Int::zero());
    }
    let mut best = Int::zero();
    for rows in combinations(a.rows, r) {
        for cols in combinations(a.cols, r) {
            let block = IntMatrix::from_rows(
                rows.iter()
                    .map(|&ri| cols.iter().map(|&cj| a[(ri, cj)].clone()).collect())
                    .collect(),
            );
            let d = determinant(&block)?.abs();
            if d > best {
                best = d;
            }
        }
    }
    Ok(best)
}

/// Measured f-vector of a polyhedron given by inequality rows: f[k] counts
/// the k-dimensional faces. None when the row count leaves desk scale.
pub fn face_counts(nvars: usize, rows: &[(Vec<Rat>, Rat)]) -> Option<Vec<usize>> {
    if rows.len() > 12 {
        return None;
    }
    let mut lpp = LpProblem::new(nvars);
    for (a, b) in rows {
        lpp.add_ineq(a.clone(), b.clone());
    }
    lpp.feasible_point()?;
    let mut faces: std::collections::BTreeSet<Vec<usize>> = std::collections::BTreeSet::new();
    let mut dims: Vec<usize> = vec![0; nvars + 1];
    let m = rows.len();
    for mask in 0u32..(1 << m) {
        let forced: Vec<usize> = (0..m).filter(|&i| mask & (1 << i) != 0).collect();
        let mut lp_face = LpProblem::new(nvars);
        for (i, (a, b)) in rows.iter().enumerate() {
            if forced.contains(&i) {
                lp_face.add_eq(a.clone(), b.clone());
            } else {
                lp_face.add_ineq(a.clone(), b.clone());
            }
        }
        if lp_face.feasible_point().is_none() {
            continue;
        }
        // tight-set closure: rows at their bound everywhere on the face
        let mut closure = Vec::new();
        for (i, (ai, bi)) in rows.iter().enumerate() {
            if forced.contains(&i) {
                closure.push(i);
                continue;
            }
            match lp_face.maximize(ai) {
                lp::LpOutcome::Optimal { value, .. } if &value == bi => {
                    // max = bound; also check min = bound
                    match lp_face.minimize(ai) {
                        lp::LpOutcome::Optimal { value, .. } if &value == bi => closure.push(i),
                        _ => {}
                    }
                }
                _ => {}
            }
        }
        if !faces.insert(closure.clone()) {
            continue;
        }
        let normals = RatMatrix::from_rows(closure.iter().map(|&i| rows[i].0.clone()).collect());
        let dim = if closure.is_empty() { nvars } else { nvars - rank_rat(&normals) };
        dims[dim] += 1;
    }
    Some(dims)
}
