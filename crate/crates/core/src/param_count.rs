//! The piece-wise periodic step-polynomial representation of E(y):
//! per-chamber fiber reduction, Brion/duality piece construction, exact
//! query evaluation, Ehrhart quasi-polynomial coefficients, complete
//! integer coefficient tables, and the periodicity checks.

use crate::arith::{dot_rat, lcm_int, lcm_rat, rat_fract, Int, Rat};
use crate::chambers::{
    build_chamber_decomposition, Chamber, ChamberDecomposition,
};
use crate::cones::{edge_directions, pick_generic_c, triangulate_cone, EdgeDirectionSet};
use crate::counting::{
    delta_modularity, enumerate_vertices_by_bases, face_counts, first_basis, Count,
};
use crate::error::{Error, Result};
use crate::group_gf::{piece_tables, PeriodicPiece};
use crate::polyhedron::{
    bound_parametrically, eliminate_lines, reduce_fiber_dimension, reduce_parametric_rank,
    standard_to_canonical, NormalizationTrace, ParametricSystem, Predicate, TraceStep,
};
use num::{Integer, One, Signed, Zero};
use std::collections::BTreeMap;

/// Per-chamber payload: the fiber-reduction predicates and the periodic
/// pieces of the reduced system.
#[derive(Clone, Debug)]
pub struct ChamberData {
    pub predicates: Vec<Predicate>,
    pub pieces: Vec<PeriodicPiece>,
    /// True when the fiber reduced to zero x-variables: the chamber
    /// contributes 1 (subject to its predicates).
    pub constant: bool,
    pub c_local: Vec<Int>,
    pub reduced_nx: usize,
}

/// The queryable representation of E(y).
#[derive(Clone, Debug)]
pub struct Representation {
    pub original: ParametricSystem,
    /// Original converted to canonical form (identity when already so).
    pub canonical_original: ParametricSystem,
    pub trace: NormalizationTrace,
    pub normalized: ParametricSystem,
    pub decomposition: ChamberDecomposition,
    pub chamber_data: Vec<ChamberData>,
    pub c_global: Vec<Int>,
    pub chi: Int,
    /// max over chambers of the piece count (Σ over that chamber's vertex
    /// cones).
    pub mu_measured: usize,
    pub delta_measured: Int,
    pub f_vector: Option<Vec<usize>>,
    pub seed: u64,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Evaluation {
    Outside,
    Count(Count),
}

impl std::fmt::Display for Evaluation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Evaluation::Outside => write!(f, "OUTSIDE"),
            Evaluation::Count(c) => write!(f, "{c}"),
        }
    }
}

// ---------------------------------------------------------------------------
// Build
// ---------------------------------------------------------------------------

struct ChamberPrep {
    system: ParametricSystem,
    predicates: Vec<Predicate>,
    constant: bool,
    /// (vertex active set rows, triangulation piece row-index lists)
    piece_rows: Vec<Vec<usize>>,
    dirs: EdgeDirectionSet,
}

fn prepare_chamber(normalized: &ParametricSystem, chamber: &Chamber) -> Result<ChamberPrep> {
    let mut cur = normalized.clone();
    let mut predicates = Vec::new();
    let w = &chamber.witness;
    loop {
        if cur.n_x() == 0 {
            return Ok(ChamberPrep {
                system: cur,
                predicates,
                constant: true,
                piece_rows: Vec::new(),
                dirs: EdgeDirectionSet::default(),
            });
        }
        match reduce_fiber_dimension(&cur, w) {
            Ok(red) => {
                predicates.push(red.predicate.clone());
                cur = red.system;
            }
            Err(Error::Degenerate(_)) => break,
            Err(e) => return Err(e),
        }
    }
    // full-dimensional fiber: Brion over its vertices, dual triangulations
    let verts = enumerate_vertices_by_bases(&cur.coeffs, &cur.rhs_at(w))?;
    if verts.is_empty() {
        return Err(Error::Internal("chamber witness with empty fiber".into()));
    }
    let mut piece_rows = Vec::new();
    let mut dirs = EdgeDirectionSet::default();
    for v in &verts {
        let gens: Vec<Vec<Int>> = v.active.iter().map(|&i| cur.coeffs.row(i).to_vec()).collect();
        let tri = triangulate_cone(&gens)?;
        let local = edge_directions(&tri)?;
        for h in local.directions {
            if !dirs.directions.contains(&h) {
                dirs.directions.push(h);
            }
        }
        for piece in &tri.pieces {
            piece_rows.push(piece.generator_indices.iter().map(|&k| v.active[k]).collect());
        }
    }
    Ok(ChamberPrep { system: cur, predicates, constant: false, piece_rows, dirs })
}

fn build_pieces(
    prep: &ChamberPrep,
    c: &[Int],
    cache: &mut BTreeMap<(Vec<Vec<Int>>, Vec<Int>), crate::group_gf::PieceTables>,
) -> Result<Vec<PeriodicPiece>> {
    let sys = &prep.system;
    let mut pieces = Vec::with_capacity(prep.piece_rows.len());
    for rows in &prep.piece_rows {
        let a_bp = sys.coeffs.select_rows(rows);
        let offs: Vec<Rat> = rows.iter().map(|&i| sys.offset[i].clone()).collect();
        let par = sys.param.select_rows(rows);
        let key = (a_bp.rows_vec(), c.to_vec());
        let tables = match cache.get(&key) {
            Some(t) => t.clone(),
            None => {
                let t = piece_tables(&a_bp, c)?;
                cache.insert(key, t.clone());
                t
            }
        };
        pieces.push(PeriodicPiece {
            basis: rows.clone(),
            p_mat: tables.p_mat,
            s_diag: tables.s_diag,
            c_b: tables.c_b,
            betas: tables.betas,
            delta: tables.delta,
            tables: tables.tables,
            step_offset: offs,
            step_param: par,
        });
    }
    Ok(pieces)
}

/// Normalize a system for building: form conversion, rank(B) = n_y,
/// rank(A) = n_x via line elimination, bounded fibers via parametric
/// bounding. The trace records the query mapping and whether counts stay
/// exact or turn into feasibility answers.
pub fn normalize_for_build(
    sys: &ParametricSystem,
) -> Result<(ParametricSystem, ParametricSystem, NormalizationTrace)> {
    let mut trace = NormalizationTrace::new();
    let (canonical, preds) = standard_to_canonical(sys)?;
    trace.predicates = preds;
    let mut cur = canonical.clone();
    let (reduced, map) = reduce_parametric_rank(&cur);
    if let Some(map) = map {
        trace.steps.push(TraceStep::ParamRankReduction { map });
        cur = reduced;
    }
    if let Some(le) = eliminate_lines(&cur)? {
        trace.steps.push(TraceStep::LineElimination {
            indices: le.indices,
            signs: le.signs,
            witness: le.witness,
        });
        trace.count_preserving = false;
        cur = le.system;
    }
    if let Some(pb) = bound_parametrically(&cur)? {
        trace.steps.push(TraceStep::ParametricBounding {
            row: pb.appended_row,
            g: pb.g,
            row_scalings: pb.row_scalings,
        });
        trace.count_preserving = false;
        cur = pb.system;
    }
    Ok((canonical, cur, trace))
}

pub fn build_representation(sys: &ParametricSystem, seed: u64) -> Result<Representation> {
    build_representation_threaded(sys, seed, 1)
}

/// Build with a worker pool over the chamber preparation phase; results
/// are identical for any thread count.
pub fn build_representation_threaded(
    sys: &ParametricSystem,
    seed: u64,
    threads: usize,
) -> Result<Representation> {
    let (canonical_original, normalized, trace) = normalize_for_build(sys)?;
    let decomposition = build_chamber_decomposition(&normalized)?;

    let preps = if threads <= 1 || decomposition.chambers.len() < 2 {
        let mut out = Vec::with_capacity(decomposition.chambers.len());
        for chamber in &decomposition.chambers {
            out.push(prepare_chamber(&normalized, chamber)?);
        }
        out
    } else {
        let chambers = &decomposition.chambers;
        let normalized_ref = &normalized;
        let results: Vec<Result<ChamberPrep>> = std::thread::scope(|scope| {
            let mut handles = Vec::new();
            let chunk = chambers.len().div_ceil(threads);
            for part in chambers.chunks(chunk) {
                handles.push(scope.spawn(move || {
                    part.iter().map(|c| prepare_chamber(normalized_ref, c)).collect::<Vec<_>>()
                }));
            }
            handles.into_iter().flat_map(|h| h.join().expect("worker panicked")).collect()
        });
        results.into_iter().collect::<Result<Vec<_>>>()?
    };

    // one generic vector for every chamber that kept the full fiber space
    let nx = normalized.n_x();
    let mut global_dirs = EdgeDirectionSet::default();
    for prep in &preps {
        if prep.system.n_x() == nx {
            for h in &prep.dirs.directions {
                if !global_dirs.directions.contains(h) {
                    global_dirs.directions.push(h.clone());
                }
            }
        }
    }
    let (c_global, chi) = if global_dirs.is_empty() || nx == 0 {
        (vec![Int::one(); nx], Int::zero())
    } else {
        pick_generic_c(&global_dirs, &first_basis(&normalized.coeffs)?, seed)?
    };

    let mut cache = BTreeMap::new();
    let mut chamber_data = Vec::with_capacity(preps.len());
    for (idx, prep) in preps.iter().enumerate() {
        if prep.constant {
            chamber_data.push(ChamberData {
                predicates: prep.predicates.clone(),
                pieces: Vec::new(),
                constant: true,
                c_local: Vec::new(),
                reduced_nx: 0,
            });
            continue;
        }
        let c_local = if prep.system.n_x() == nx {
            c_global.clone()
        } else {
            let (c, _) =
                pick_generic_c(&prep.dirs, &first_basis(&prep.system.coeffs)?, seed.wrapping_add(idx as u64))?;
            c
        };
        let pieces = build_pieces(prep, &c_local, &mut cache)?;
        chamber_data.push(ChamberData {
            predicates: prep.predicates.clone(),
            pieces,
            constant: false,
            c_local,
            reduced_nx: prep.system.n_x(),
        });
    }

    let mu_measured = chamber_data.iter().map(|d| d.pieces.len()).max().unwrap_or(0);
    let delta_measured = delta_modularity(&normalized.coeffs)?;
    let f_vector = face_counts(normalized.n_x() + normalized.n_y(), &normalized.xy_rows());

    let repr = Representation {
        original: sys.clone(),
        canonical_original,
        trace,
        normalized,
        decomposition,
        chamber_data,
        c_global,
        chi,
        mu_measured,
        delta_measured,
        f_vector,
        seed,
    };
    // every chamber witness must evaluate to a nonnegative integer
    for (i, chamber) in repr.decomposition.chambers.iter().enumerate() {
        let v = repr.chamber_value(i, &chamber.witness)?;
        if !v.is_integer() || v.is_negative() {
            return Err(Error::Internal(format!(
                "chamber {i} witness value {v} is not a nonnegative integer"
            )));
        }
    }
    Ok(repr)
}

// ---------------------------------------------------------------------------
// Queries
// ---------------------------------------------------------------------------

impl Representation {
    /// Value of one chamber's periodic step-polynomial at a normalized
    /// query point (no trace replay, no predicate-OUTSIDE handling).
    pub fn chamber_value(&self, idx: usize, y_norm: &[Rat]) -> Result<Rat> {
        let data = &self.chamber_data[idx];
        for p in &data.predicates {
            if !p.holds(y_norm) {
                return Ok(Rat::zero());
            }
        }
        if data.constant {
            return Ok(Rat::one());
        }
        let mut acc = Rat::zero();
        for piece in &data.pieces {
            acc += piece.eval(y_norm);
        }
        Ok(acc)
    }

    /// Exact E(y) for a query in the ORIGINAL parameter space.
    pub fn evaluate(&self, y: &[Rat]) -> Result<Evaluation> {
        if y.len() != self.original.n_y() {
            return Err(Error::Input(format!(
                "query has {} coordinates, system has {} parameters",
                y.len(),
                self.original.n_y()
            )));
        }
        // residual predicates of the form conversion act on the original y
        let mut integrality_failed = false;
        for p in &self.trace.predicates {
            match p {
                Predicate::Consistency { .. } => {
                    if !p.holds(y) {
                        return Ok(Evaluation::Outside);
                    }
                }
                Predicate::Divisibility { .. } => {
                    if !p.holds(y) {
                        integrality_failed = true;
                    }
                }
            }
        }
        let y_norm = self.trace.replay(y);
        let looked = self.decomposition.index.lookup(&y_norm);
        let Some(idx) = looked else {
            // with parametric bounding the augmented fiber may be empty even
            // though the original fiber has real points (then E(y) = 0)
            if self.real_fiber_nonempty(y) {
                return Ok(Evaluation::Count(Count::Finite(Int::zero())));
            }
            return Ok(Evaluation::Outside);
        };
        if integrality_failed {
            return Ok(Evaluation::Count(Count::Finite(Int::zero())));
        }
        let v = self.chamber_value(idx, &y_norm)?;
        if !v.is_integer() || v.is_negative() {
            return Err(Error::Internal(format!("evaluation {v} is not a nonnegative integer")));
        }
        let v = v.to_integer();
        if self.trace.count_preserving {
            Ok(Evaluation::Count(Count::Finite(v)))
        } else if v.is_zero() {
            Ok(Evaluation::Count(Count::Finite(Int::zero())))
        } else {
            Ok(Evaluation::Count(Count::Infinite))
        }
    }

    fn real_fiber_nonempty(&self, y: &[Rat]) -> bool {
        let sys = &self.canonical_original;
        let mut lpp = crate::lp::LpProblem::new(sys.n_x());
        for (a, b) in sys.fiber_rows(y) {
            lpp.add_ineq(a, b);
        }
        lpp.feasible_point().is_some()
    }

    /// Chamber of the normalized point y, demanding relint membership.
    pub fn chamber_of(&self, y_norm: &[Rat]) -> Result<usize> {
        self.decomposition
            .index
            .lookup(y_norm)
            .ok_or_else(|| Error::Domain("query outside Π(P)".into()))
    }

    pub fn n_x_normalized(&self) -> usize {
        self.normalized.n_x()
    }

    pub fn n_y_normalized(&self) -> usize {
        self.normalized.n_y()
    }
}

// ---------------------------------------------------------------------------
// Ehrhart quasi-polynomial coefficients
// ---------------------------------------------------------------------------

/// ψ_B(y) = ⟨c_B, b_B − {b_B + B_B y}⟩ for one piece.
pub fn psi(piece: &PeriodicPiece, y: &[Rat]) -> Rat {
    (0..piece.step_offset.len())
        .map(|i| {
            let arg = &piece.step_offset[i] + dot_rat(piece.step_param.row(i), y);
            &piece.c_b[i] * (&piece.step_offset[i] - rat_fract(&arg))
        })
        .sum()
}

/// π̄_{B,k}(y) = Σ_{i=k}^{n} π_{B,i}(P_B T_B(y))·C(i,k)·ψ_B(y)^{i−k}.
fn pi_bar(piece: &PeriodicPiece, y: &[Rat], k: usize) -> Rat {
    let t = piece.step(y);
    let pis = piece.pi_at(&t);
    let n = piece.dim();
    let psi_v = psi(piece, y);
    let mut acc = Rat::zero();
    let mut psi_pow = Rat::one();
    for i in k..=n {
        acc += &pis[i] * binomial_rat(i, k) * &psi_pow;
        psi_pow *= &psi_v;
    }
    acc
}

fn binomial_rat(n: usize, k: usize) -> Rat {
    let mut acc = Rat::one();
    for t in 0..k {
        acc = acc * Rat::from_integer(Int::from((n - t) as i64))
            / Rat::from_integer(Int::from((t + 1) as i64));
    }
    acc
}

fn multinomial(k: usize, j: &[usize]) -> Rat {
    debug_assert_eq!(k, j.iter().sum::<usize>());
    let mut acc = Rat::one();
    for t in 2..=k {
        acc *= Rat::from_integer(Int::from(t as i64));
    }
    for &ji in j {
        for t in 2..=ji {
            acc /= Rat::from_integer(Int::from(t as i64));
        }
    }
    acc
}

/// All multi-indices over `vars` coordinates with |j|₁ ≤ degree, in a
/// deterministic order.
pub fn multi_indices(vars: usize, degree: usize) -> Vec<Vec<usize>> {
    let mut out = vec![vec![0; vars]];
    for _ in 0..degree {
        let mut grown: Vec<Vec<usize>> = Vec::new();
        for j in &out {
            for v in 0..vars {
                let mut next = j.clone();
                next[v] += 1;
                grown.push(next);
            }
        }
        out.extend(grown);
    }
    if vars == 0 {
        return vec![Vec::new()];
    }
    out.sort();
    out.dedup();
    out.sort_by_key(|j| (j.iter().sum::<usize>(), j.clone()));
    out
}

impl Representation {
    /// a_j(y): the coefficient of y^j of the chamber's quasi-polynomial,
    /// evaluated at y (a point of the NORMALIZED parameter space inside the
    /// chamber's relative interior). Includes the chamber's divisibility
    /// predicates, so Σ_j a_j(y)·y^j = E(y) identically on the relint.
    pub fn ehrhart_coefficient(&self, chamber: usize, j: &[usize], y_norm: &[Rat]) -> Result<Rat> {
        if !self.trace.count_preserving {
            return Err(Error::Unsupported(
                "Ehrhart coefficients are undefined for unbounded-fiber systems".into(),
            ));
        }
        let ch = &self.decomposition.chambers[chamber];
        if !ch.contains_relint(&self.decomposition.index.hyperplanes, y_norm) {
            return Err(Error::Domain("point outside the chamber's relative interior".into()));
        }
        if j.len() != self.normalized.n_y() {
            return Err(Error::Input("multi-index arity mismatch".into()));
        }
        let k: usize = j.iter().sum();
        if k > self.normalized.n_x() {
            return Err(Error::Input("multi-index degree above n_x".into()));
        }
        Ok(self.ehrhart_coefficient_unchecked(chamber, j, y_norm))
    }

    fn ehrhart_coefficient_unchecked(&self, chamber: usize, j: &[usize], y_norm: &[Rat]) -> Rat {
        let data = &self.chamber_data[chamber];
        for p in &data.predicates {
            if !p.holds(y_norm) {
                return Rat::zero();
            }
        }
        let k: usize = j.iter().sum();
        if data.constant {
            return if k == 0 { Rat::one() } else { Rat::zero() };
        }
        let mut acc = Rat::zero();
        for piece in &data.pieces {
            if k > piece.dim() {
                continue;
            }
            // (c_Bᵀ B_B)^j
            let mut factor = Rat::one();
            let mut skip = false;
            for (l, &jl) in j.iter().enumerate() {
                if jl == 0 {
                    continue;
                }
                let col: Rat = (0..piece.c_b.len())
                    .map(|r| &piece.c_b[r] * &piece.step_param[(r, l)])
                    .sum();
                if col.is_zero() {
                    skip = true;
                    break;
                }
                for _ in 0..jl {
                    factor *= &col;
                }
            }
            if skip {
                continue;
            }
            acc += multinomial(k, j) * pi_bar(piece, y_norm, k) * factor;
        }
        acc
    }

    /// Σ_j a_j(y)·y^j over all |j| ≤ n_x: must reproduce evaluate() on the
    /// chamber's relative interior.
    pub fn ehrhart_value(&self, chamber: usize, y_norm: &[Rat]) -> Result<Rat> {
        let mut acc = Rat::zero();
        for j in multi_indices(self.normalized.n_y(), self.normalized.n_x()) {
            let a = self.ehrhart_coefficient(chamber, &j, y_norm)?;
            if a.is_zero() {
                continue;
            }
            let mut mono = Rat::one();
            for (l, &jl) in j.iter().enumerate() {
                for _ in 0..jl {
                    mono *= &y_norm[l];
                }
            }
            acc += a * mono;
        }
        Ok(acc)
    }
}

/// A view of one chamber's quasi-polynomial: coefficient access plus the
/// ψ_B helper.
pub struct QuasiPolynomialView<'a> {
    pub repr: &'a Representation,
    pub chamber: usize,
}

impl<'a> QuasiPolynomialView<'a> {
    pub fn coefficient(&self, j: &[usize], y_norm: &[Rat]) -> Result<Rat> {
        self.repr.ehrhart_coefficient(self.chamber, j, y_norm)
    }

    pub fn psi(&self, piece: usize, y_norm: &[Rat]) -> Rat {
        psi(&self.repr.chamber_data[self.chamber].pieces[piece], y_norm)
    }
}

// ---------------------------------------------------------------------------
// Complete integer Ehrhart tables
// ---------------------------------------------------------------------------

#[derive(Clone, Debug)]
pub struct ChamberTable {
    pub modulus: Int,
    /// residue (mod chdenom_Z) → coefficient values in multi_indices order.
    pub entries: BTreeMap<Vec<Int>, Vec<Rat>>,
}

#[derive(Clone, Debug)]
pub struct CompleteEhrhart {
    pub indices: Vec<Vec<usize>>,
    pub per_chamber: Vec<ChamberTable>,
}

impl Representation {
    /// Precompute a_j values per chamber over the residues of
    /// chdenom_Z(Q)·Z^{n_y} realized inside the chamber's relative
    /// interior.
    pub fn complete_integer_ehrhart(&self) -> Result<CompleteEhrhart> {
        if !self.trace.count_preserving {
            return Err(Error::Unsupported(
                "complete tables are undefined for unbounded-fiber systems".into(),
            ));
        }
        let ny = self.normalized.n_y();
        let indices = multi_indices(ny, self.normalized.n_x());
        let mut per_chamber = Vec::with_capacity(self.decomposition.chambers.len());
        for (ci, chamber) in self.decomposition.chambers.iter().enumerate() {
            let modulus = chamber.chdenom_z.clone();
            let mut entries = BTreeMap::new();
            for y in integer_relint_points(chamber, &self.decomposition, &modulus) {
                let residue: Vec<Int> = y.iter().map(|v| num::Integer::mod_floor(v, &modulus)).collect();
                if entries.contains_key(&residue) {
                    continue;
                }
                let y_rat: Vec<Rat> = y.iter().map(|v| Rat::from_integer(v.clone())).collect();
                let coeffs: Vec<Rat> = indices
                    .iter()
                    .map(|j| self.ehrhart_coefficient_unchecked(ci, j, &y_rat))
                    .collect();
                entries.insert(residue, coeffs);
            }
            per_chamber.push(ChamberTable { modulus, entries });
        }
        Ok(CompleteEhrhart { indices, per_chamber })
    }

    /// Integer query through the complete tables: chamber lookup, residue
    /// lookup, polynomial evaluation. Falls back to direct coefficient
    /// evaluation for residues the precompute box did not realize.
    pub fn evaluate_integer_via_tables(
        &self,
        tables: &CompleteEhrhart,
        y: &[Int],
    ) -> Result<Evaluation> {
        let y_rat: Vec<Rat> = y.iter().map(|v| Rat::from_integer(v.clone())).collect();
        let Some(idx) = self.decomposition.index.lookup(&y_rat) else {
            return Ok(Evaluation::Outside);
        };
        let table = &tables.per_chamber[idx];
        let residue: Vec<Int> =
            y.iter().map(|v| num::Integer::mod_floor(v, &table.modulus)).collect();
        let coeffs: Vec<Rat> = match table.entries.get(&residue) {
            Some(c) => c.clone(),
            None => tables
                .indices
                .iter()
                .map(|j| self.ehrhart_coefficient_unchecked(idx, j, &y_rat))
                .collect(),
        };
        let mut acc = Rat::zero();
        for (j, a) in tables.indices.iter().zip(&coeffs) {
            if a.is_zero() {
                continue;
            }
            let mut mono = Rat::one();
            for (l, &jl) in j.iter().enumerate() {
                for _ in 0..jl {
                    mono *= &y_rat[l];
                }
            }
            acc += a * mono;
        }
        if !acc.is_integer() || acc.is_negative() {
            return Err(Error::Internal(format!("table evaluation {acc} not a nonnegative integer")));
        }
        Ok(Evaluation::Count(Count::Finite(acc.to_integer())))
    }
}

/// Integer points in the chamber's relative interior near its witness, one
/// candidate per residue class when the search box reaches them.
fn integer_relint_points(
    chamber: &Chamber,
    decomp: &ChamberDecomposition,
    modulus: &Int,
) -> Vec<Vec<Int>> {
    let ny = chamber.witness.len();
    if ny == 0 {
        return vec![Vec::new()];
    }
    let m = modulus.clone().max(Int::one());
    let radius_int: Int = &m * Int::from(2) + Int::from(4);
    let radius = num::ToPrimitive::to_i64(&radius_int).unwrap_or(8).min(24);
    let center: Vec<Int> = chamber.witness.iter().map(|w| w.round().to_integer()).collect();
    let mut found = Vec::new();
    let mut cur = vec![-radius; ny];
    'outer: loop {
        let y: Vec<Int> = center.iter().zip(&cur).map(|(c, &o)| c + Int::from(o)).collect();
        let y_rat: Vec<Rat> = y.iter().map(|v| Rat::from_integer(v.clone())).collect();
        if chamber.contains_relint(&decomp.index.hyperplanes, &y_rat) {
            found.push(y);
        }
        for j in 0..ny {
            cur[j] += 1;
            if cur[j] <= radius {
                continue 'outer;
            }
            cur[j] = -radius;
        }
        break;
    }
    found
}

// ---------------------------------------------------------------------------
// Periodicity checks
// ---------------------------------------------------------------------------

#[derive(Clone, Debug)]
pub struct PeriodicityReport {
    /// (multi-index, shift passed) for the q·(z−y) shift.
    pub lcm_shift: Vec<(Vec<usize>, bool)>,
    /// chdenom_Q·1 shifts actually tested (t, per-index results).
    pub chdenom_shifts: Vec<(i64, Vec<(Vec<usize>, bool)>)>,
    pub skipped_chdenom_samples: usize,
}

impl PeriodicityReport {
    pub fn all_pass(&self) -> bool {
        self.lcm_shift.iter().all(|(_, ok)| *ok)
            && self.chdenom_shifts.iter().all(|(_, v)| v.iter().all(|(_, ok)| *ok))
    }
}

/// The rational denominator of a fiber: smallest q > 0 with q·v integral
/// for every vertex v of P_y.
pub fn fiber_rational_denominator(sys: &ParametricSystem, y: &[Rat]) -> Result<Rat> {
    let verts = enumerate_vertices_by_bases(&sys.coeffs, &sys.rhs_at(y))?;
    let mut entries: Vec<Rat> = Vec::new();
    for v in verts {
        entries.extend(v.vertex);
    }
    let mut l = Int::one();
    for e in &entries {
        l = lcm_int(&l, e.denom());
    }
    let mut g = Int::zero();
    for e in &entries {
        g = g.gcd(&(e * Rat::from_integer(l.clone())).to_integer());
    }
    if g.is_zero() {
        return Ok(Rat::one());
    }
    Ok(Rat::new(l, g))
}

impl Representation {
    /// Verify a_j(y) = a_j(y + q(z−y)) for q = lcm(denom_Q(P_y),
    /// denom_Q(P_z)), and a_j invariance under chdenom_Q(Q)·1 shifts that
    /// keep the argument in the chamber.
    pub fn periodicity_check(
        &self,
        chamber: usize,
        y: &[Rat],
        z: &[Rat],
    ) -> Result<PeriodicityReport> {
        let ch = &self.decomposition.chambers[chamber];
        let hp = &self.decomposition.index.hyperplanes;
        if !ch.contains_relint(hp, z) {
            return Err(Error::Domain("z must lie in the chamber's relative interior".into()));
        }
        if !ch.contains_closure(hp, y) {
            return Err(Error::Domain("y must lie in the chamber".into()));
        }
        let q = lcm_rat(
            &fiber_rational_denominator(&self.normalized, y)?,
            &fiber_rational_denominator(&self.normalized, z)?,
        );
        let shifted: Vec<Rat> = y.iter().zip(z).map(|(a, b)| a + &q * &(b - a)).collect();
        let indices = multi_indices(self.normalized.n_y(), self.normalized.n_x());
        let mut lcm_shift = Vec::with_capacity(indices.len());
        for j in &indices {
            let lhs = self.ehrhart_coefficient_unchecked(chamber, j, y);
            let rhs = self.ehrhart_coefficient_unchecked(chamber, j, &shifted);
            lcm_shift.push((j.clone(), lhs == rhs));
        }
        // chdenom_Q·1 shifts
        let mut chdenom_shifts = Vec::new();
        let mut skipped = 0;
        for t in [1i64, -1, 2, 3] {
            let step = &ch.chdenom_q * Rat::from_integer(Int::from(t));
            let arg: Vec<Rat> = y.iter().map(|v| v + &step).collect();
            if !ch.contains_closure(hp, &arg) {
                skipped += 1;
                continue;
            }
            let mut per = Vec::with_capacity(indices.len());
            for j in &indices {
                let lhs = self.ehrhart_coefficient_unchecked(chamber, j, y);
                let rhs = self.ehrhart_coefficient_unchecked(chamber, j, &arg);
                per.push((j.clone(), lhs == rhs));
            }
            chdenom_shifts.push((t, per));
        }
        Ok(PeriodicityReport { lcm_shift, chdenom_shifts, skipped_chdenom_samples: skipped })
    }
}

// ---------------------------------------------------------------------------
// Tests
// ---------------------------------------------------------------------------
