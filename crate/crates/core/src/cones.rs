//! Tangent/feasible cones, simplicial triangulation of cones generated by
//! matrix rows, edge-direction extraction, and generic-vector selection.

use crate::arith::{
    adjugate_columns, canonical_sign, determinant, dot_int, dot_rat, int, int_vec_to_rat,
    kernel_basis_int, primitive, rank_rat, solve_rational, Int, IntMatrix, Rat,
};
use crate::error::{Error, Result};
use num::{Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Indices of the rows active at v: J(v) = {j : A_j v = b_j}. v must lie in
/// {x : A x ≤ b}.
pub fn active_rows(a: &IntMatrix, b: &[Rat], v: &[Rat]) -> Result<Vec<usize>> {
    let mut out = Vec::new();
    for i in 0..a.rows {
        let lhs = dot_rat(&int_vec_to_rat(a.row(i)), v);
        if lhs > b[i] {
            return Err(Error::NotAMember);
        }
        if lhs == b[i] {
            out.push(i);
        }
    }
    Ok(out)
}

/// A simplicial sub-cone of a triangulation, identified by the generator
/// indices of its base.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SimplicialCone {
    pub generator_indices: Vec<usize>,
}

#[derive(Clone, Debug)]
pub struct Triangulation {
    pub generators: Vec<Vec<Int>>,
    pub pieces: Vec<SimplicialCone>,
}

impl Triangulation {
    pub fn size(&self) -> usize {
        self.pieces.len()
    }

    pub fn piece_matrix(&self, piece: &SimplicialCone) -> IntMatrix {
        IntMatrix::from_rows(
            piece.generator_indices.iter().map(|&i| self.generators[i].clone()).collect(),
        )
    }
}

/// Barycentric coordinates of x in the cone spanned by the rows of m.
fn cone_coords(m: &IntMatrix, x: &[Rat]) -> Option<Vec<Rat>> {
    // x = Σ λ_i g_i  ⟺  mᵀ λ = x
    solve_rational(&m.transpose(), x).ok()
}

fn inside_piece(m: &IntMatrix, x: &[Rat]) -> bool {
    match cone_coords(m, x) {
        Some(l) => l.iter().all(|v| !v.is_negative()),
        None => false,
    }
}

/// Placing (beneath-beyond) triangulation of the cone generated by the
/// given vectors. Every piece is a nonsingular subset of the input
/// generators; pieces intersect in common faces.
pub fn triangulate_cone(generators: &[Vec<Int>]) -> Result<Triangulation> {
    let q = generators.len();
    if q == 0 {
        return Err(Error::Rank { required: 1, found: 0 });
    }
    let n = generators[0].len();
    let full = IntMatrix::from_rows(generators.to_vec());
    let rank = rank_rat(&full.to_rat());
    if rank != n {
        return Err(Error::Rank { required: n, found: rank });
    }

    // Greedy initial base in index order.
    let mut base: Vec<usize> = Vec::new();
    for i in 0..q {
        let mut trial = base.clone();
        trial.push(i);
        let m = full.select_rows(&trial);
        if rank_rat(&m.to_rat()) == trial.len() {
            base.push(i);
        }
        if base.len() == n {
            break;
        }
    }
    let mut pieces: Vec<Vec<usize>> = vec![base.clone()];

    for g_idx in 0..q {
        if base.contains(&g_idx) {
            continue;
        }
        let g = int_vec_to_rat(&generators[g_idx]);
        if pieces.iter().any(|p| inside_piece(&full.select_rows(p), &g)) {
            continue;
        }
        // boundary facets: (n−1)-subsets appearing in exactly one piece
        let mut facet_count: std::collections::BTreeMap<Vec<usize>, (usize, usize)> =
            std::collections::BTreeMap::new();
        for (pi, p) in pieces.iter().enumerate() {
            for omit in 0..n {
                let mut f: Vec<usize> = p.clone();
                f.remove(omit);
                f.sort_unstable();
                let e = facet_count.entry(f).or_insert((0, pi));
                e.0 += 1;
                if e.0 == 1 {
                    e.1 = pi;
                }
            }
        }
        let mut new_pieces = Vec::new();
        for (facet, (count, owner)) in &facet_count {
            if *count != 1 {
                continue;
            }
            // hyperplane normal through the facet, oriented toward the owner
            let normal = facet_normal(&full, facet, n)?;
            let owner_piece = &pieces[*owner];
            let omitted = owner_piece.iter().find(|i| !facet.contains(i)).copied();
            let mut u = normal;
            if let Some(om) = omitted {
                let s = dot_int(&u, &generators[om]);
                if s.is_negative() {
                    for v in u.iter_mut() {
                        *v = -v.clone();
                    }
                } else if s.is_zero() {
                    return Err(Error::Internal("degenerate facet orientation".into()));
                }
            }
            // visible iff g is strictly on the far side
            if dot_int(&u, &generators[g_idx]).is_negative() {
                let mut p = facet.clone();
                p.push(g_idx);
                p.sort_unstable();
                debug_assert!(!determinant(&full.select_rows(&p))?.is_zero());
                new_pieces.push(p);
            }
        }
        if new_pieces.is_empty() {
            return Err(Error::Internal("generator outside the fan saw no boundary facet".into()));
        }
        pieces.extend(new_pieces);
    }

    Ok(Triangulation {
        generators: generators.to_vec(),
        pieces: pieces.into_iter().map(|p| SimplicialCone { generator_indices: p }).collect(),
    })
}

fn facet_normal(full: &IntMatrix, facet: &[usize], n: usize) -> Result<Vec<Int>> {
    if facet.is_empty() {
        // only reachable for n = 1: the facet is the apex
        if n != 1 {
            return Err(Error::Internal("empty facet in dimension > 1".into()));
        }
        return Ok(vec![Int::from(1)]);
    }
    let m = full.select_rows(facet);
    let kernel = kernel_basis_int(&m);
    if kernel.len() != 1 {
        return Err(Error::Internal("facet spans the wrong dimension".into()));
    }
    Ok(kernel.into_iter().next().unwrap())
}

/// Primitive edge directions of a triangulation: adjugate columns of each
/// piece, reduced to gcd 1 and deduplicated up to sign.
#[derive(Clone, Debug, Default)]
pub struct EdgeDirectionSet {
    pub directions: Vec<Vec<Int>>,
}

impl EdgeDirectionSet {
    pub fn insert_piece(&mut self, piece_matrix: &IntMatrix) -> Result<()> {
        let (_, adj) = adjugate_columns(piece_matrix)?;
        for j in 0..adj.cols {
            let mut h = primitive(&adj.col(j));
            canonical_sign(&mut h);
            if h.iter().all(|v| v.is_zero()) {
                return Err(Error::Internal("zero adjugate column".into()));
            }
            if !self.directions.contains(&h) {
                self.directions.push(h);
            }
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.directions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.directions.is_empty()
    }
}

pub fn edge_directions(tri: &Triangulation) -> Result<EdgeDirectionSet> {
    let mut set = EdgeDirectionSet::default();
    for piece in &tri.pieces {
        set.insert_piece(&tri.piece_matrix(piece))?;
    }
    Ok(set)
}

/// Pick an integer vector c with cᵀh ≠ 0 for every edge direction h.
///
/// Draws z with entries in [−|E|, |E|] (smaller ranges first, which keeps
/// the numerator supports short), assigns c = A_Bᵀ z, and keeps the valid
/// candidate with the smallest χ = max |cᵀh|; after the retry budget a
/// deterministic power-basis z is used, which provably separates. Returns
/// (c, χ).
pub fn pick_generic_c(
    dirs: &EdgeDirectionSet,
    a_basis: &IntMatrix,
    seed: u64,
) -> Result<(Vec<Int>, Int)> {
    let n = a_basis.rows;
    if n == 0 {
        return Ok((Vec::new(), Int::zero()));
    }
    if dirs.is_empty() {
        return Err(Error::Genericity("empty edge-direction set".into()));
    }
    let big_n = dirs.len() as i64;
    // images A_B·h; c·h = z·(A_B h)
    let images: Vec<Vec<Int>> = dirs.directions.iter().map(|h| a_basis.mul_vec(h)).collect();
    if images.iter().any(|a| a.iter().all(|v| v.is_zero())) {
        return Err(Error::Genericity("edge direction in the kernel of the base".into()));
    }
    let chi_of = |z: &[Int]| -> Option<Int> {
        let mut chi = Int::zero();
        for img in &images {
            let d = dot_int(z, img).abs();
            if d.is_zero() {
                return None;
            }
            if d > chi {
                chi = d;
            }
        }
        Some(chi)
    };

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best: Option<(Vec<Int>, Int)> = None;
    for attempt in 0..64 {
        let cap = (1 + attempt / 8).min(big_n.max(1));
        let z: Vec<Int> = (0..n).map(|_| int(rng.gen_range(-cap..=cap))).collect();
        if let Some(chi) = chi_of(&z) {
            if best.as_ref().map_or(true, |(_, c)| chi < *c) {
                best = Some((z, chi));
            }
        }
    }
    let (z, chi) = match best {
        Some(found) => found,
        None => {
            // z = (1, t, t², …) with t beyond every row sum of |A_B h|
            let mut t = Int::zero();
            for img in &images {
                let s: Int = img.iter().map(|v| v.abs()).sum();
                if s > t {
                    t = s;
                }
            }
            t += Int::from(1);
            let mut z = Vec::with_capacity(n);
            let mut pw = Int::from(1);
            for _ in 0..n {
                z.push(pw.clone());
                pw *= &t;
            }
            let chi = chi_of(&z)
                .ok_or_else(|| Error::Genericity("power-basis fallback failed".into()))?;
            (z, chi)
        }
    };
    let c = a_basis.transpose().mul_vec(&z);
    // exhaustive post-check is part of the contract
    for h in &dirs.directions {
        if dot_int(&c, h).is_zero() {
            return Err(Error::Internal("generic vector post-check failed".into()));
        }
    }
    Ok((c, chi))
}
