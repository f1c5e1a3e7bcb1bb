//! Versioned JSON persistence of the full representation: chambers,
//! pieces, π tables (residue keys as arrays of integer strings), and the
//! normalization trace. Round-tripping is exact, so a reloaded
//! representation evaluates bit-for-bit like the in-process one.

use crate::arith::{Int, IntMatrix, Rat, RatMatrix};
use crate::chambers::{Chamber, ChamberDecomposition, ChamberIndex, Hyperplane, ParametricVertexMap};
use crate::error::{Error, Result};
use crate::group_gf::PeriodicPiece;
use crate::param_count::{ChamberData, Representation};
use crate::polyhedron::{
    parse_int, parse_rat, rat_to_string, GBound, NormalizationTrace, ParametricSystem, Predicate,
    SystemForm, TraceStep,
};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

pub const SCHEMA_VERSION: u32 = 1;

fn int_s(v: &Int) -> String {
    v.to_string()
}

fn ints(v: &[Int]) -> Vec<String> {
    v.iter().map(int_s).collect()
}

fn rats(v: &[Rat]) -> Vec<String> {
    v.iter().map(rat_to_string).collect()
}

fn int_mat(m: &IntMatrix) -> Vec<Vec<String>> {
    (0..m.rows).map(|i| ints(m.row(i))).collect()
}

fn rat_mat(m: &RatMatrix) -> Vec<Vec<String>> {
    (0..m.rows).map(|i| rats(m.row(i))).collect()
}

fn p_ints(v: &[String]) -> Result<Vec<Int>> {
    v.iter().map(|s| parse_int(s)).collect()
}

fn p_rats(v: &[String]) -> Result<Vec<Rat>> {
    v.iter().map(|s| parse_rat(s)).collect()
}

fn p_int_mat(m: &[Vec<String>], cols_hint: usize) -> Result<IntMatrix> {
    if m.is_empty() {
        return Ok(IntMatrix::zero(0, cols_hint));
    }
    Ok(IntMatrix::from_rows(m.iter().map(|r| p_ints(r)).collect::<Result<Vec<_>>>()?))
}

fn p_rat_mat(m: &[Vec<String>], cols_hint: usize) -> Result<RatMatrix> {
    if m.is_empty() {
        return Ok(RatMatrix::zero(0, cols_hint));
    }
    Ok(RatMatrix::from_rows(m.iter().map(|r| p_rats(r)).collect::<Result<Vec<_>>>()?))
}

#[derive(Serialize, Deserialize)]
struct SystemDto {
    form: SystemForm,
    a: Vec<Vec<String>>,
    b_mat: Vec<Vec<String>>,
    b: Vec<String>,
    n_x: usize,
    n_y: usize,
}

fn system_dto(s: &ParametricSystem) -> SystemDto {
    SystemDto {
        form: s.form,
        a: int_mat(&s.coeffs),
        b_mat: rat_mat(&s.param),
        b: rats(&s.offset),
        n_x: s.n_x(),
        n_y: s.n_y(),
    }
}

fn system_from(d: &SystemDto) -> Result<ParametricSystem> {
    Ok(ParametricSystem {
        form: d.form,
        coeffs: p_int_mat(&d.a, d.n_x)?,
        param: p_rat_mat(&d.b_mat, d.n_y)?,
        offset: p_rats(&d.b)?,
    })
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
enum PredicateDto {
    Consistency { coeffs: Vec<String>, offset: String },
    Divisibility { coeffs: Vec<String>, offset: String, modulus: String },
}

fn predicate_dto(p: &Predicate) -> PredicateDto {
    match p {
        Predicate::Consistency { coeffs, offset } => PredicateDto::Consistency {
            coeffs: rats(coeffs),
            offset: rat_to_string(offset),
        },
        Predicate::Divisibility { coeffs, offset, modulus } => PredicateDto::Divisibility {
            coeffs: rats(coeffs),
            offset: rat_to_string(offset),
            modulus: int_s(modulus),
        },
    }
}

fn predicate_from(d: &PredicateDto) -> Result<Predicate> {
    Ok(match d {
        PredicateDto::Consistency { coeffs, offset } => Predicate::Consistency {
            coeffs: p_rats(coeffs)?,
            offset: parse_rat(offset)?,
        },
        PredicateDto::Divisibility { coeffs, offset, modulus } => Predicate::Divisibility {
            coeffs: p_rats(coeffs)?,
            offset: parse_rat(offset)?,
            modulus: parse_int(modulus)?,
        },
    })
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
enum TraceStepDto {
    ParamRankReduction { map: Vec<Vec<String>>, cols: usize },
    LineElimination { indices: Vec<usize>, signs: Vec<i8>, witness: Vec<String> },
    FullDimRelaxation { relaxed: Vec<(usize, String)> },
    ParametricBounding {
        row: Vec<String>,
        factor: String,
        a_max: String,
        n_x: usize,
        g_offset: Vec<String>,
        g_param: Vec<Vec<String>>,
        g_cols: usize,
        row_scalings: Vec<String>,
    },
}

fn step_dto(s: &TraceStep) -> TraceStepDto {
    match s {
        TraceStep::ParamRankReduction { map } => {
            TraceStepDto::ParamRankReduction { map: rat_mat(map), cols: map.cols }
        }
        TraceStep::LineElimination { indices, signs, witness } => TraceStepDto::LineElimination {
            indices: indices.clone(),
            signs: signs.clone(),
            witness: ints(witness),
        },
        TraceStep::FullDimRelaxation { relaxed } => TraceStepDto::FullDimRelaxation {
            relaxed: relaxed.iter().map(|(i, e)| (*i, rat_to_string(e))).collect(),
        },
        TraceStep::ParametricBounding { row, g, row_scalings } => TraceStepDto::ParametricBounding {
            row: ints(row),
            factor: int_s(&g.factor),
            a_max: int_s(&g.a_max),
            n_x: g.n_x,
            g_offset: rats(&g.offset),
            g_param: rat_mat(&g.param),
            g_cols: g.param.cols,
            row_scalings: ints(row_scalings),
        },
    }
}

fn step_from(d: &TraceStepDto) -> Result<TraceStep> {
    Ok(match d {
        TraceStepDto::ParamRankReduction { map, cols } => {
            TraceStep::ParamRankReduction { map: p_rat_mat(map, *cols)? }
        }
        TraceStepDto::LineElimination { indices, signs, witness } => TraceStep::LineElimination {
            indices: indices.clone(),
            signs: signs.clone(),
            witness: p_ints(witness)?,
        },
        TraceStepDto::FullDimRelaxation { relaxed } => TraceStep::FullDimRelaxation {
            relaxed: relaxed
                .iter()
                .map(|(i, e)| Ok((*i, parse_rat(e)?)))
                .collect::<Result<Vec<_>>>()?,
        },
        TraceStepDto::ParametricBounding {
            row,
            factor,
            a_max,
            n_x,
            g_offset,
            g_param,
            g_cols,
            row_scalings,
        } => TraceStep::ParametricBounding {
            row: p_ints(row)?,
            g: GBound {
                factor: parse_int(factor)?,
                a_max: parse_int(a_max)?,
                n_x: *n_x,
                offset: p_rats(g_offset)?,
                param: p_rat_mat(g_param, *g_cols)?,
            },
            row_scalings: p_ints(row_scalings)?,
        },
    })
}

#[derive(Serialize, Deserialize)]
struct MapDto {
    basis: Vec<usize>,
    t_mat: Vec<Vec<String>>,
    t_vec: Vec<String>,
}

#[derive(Serialize, Deserialize)]
struct ChamberDto {
    dim: usize,
    sign_vector: Vec<i8>,
    zero_set: Vec<usize>,
    hull_basis: Vec<Vec<String>>,
    witness: Vec<String>,
    maps: Vec<MapDto>,
    chdenom_z: String,
    chdenom_q: String,
}

#[derive(Serialize, Deserialize)]
struct PieceDto {
    basis: Vec<usize>,
    p_mat: Vec<Vec<String>>,
    s_diag: Vec<String>,
    c_b: Vec<String>,
    betas: Vec<String>,
    delta: String,
    /// residue key (integer strings) → [π_0 … π_n]
    tables: Vec<(Vec<String>, Vec<String>)>,
    step_offset: Vec<String>,
    step_param: Vec<Vec<String>>,
}

#[derive(Serialize, Deserialize)]
struct ChamberDataDto {
    predicates: Vec<PredicateDto>,
    pieces: Vec<PieceDto>,
    constant: bool,
    c_local: Vec<String>,
    reduced_nx: usize,
}

#[derive(Serialize, Deserialize)]
struct HyperplaneDto {
    coeffs: Vec<String>,
    rhs: String,
}

#[derive(Serialize, Deserialize)]
struct ReprDto {
    schema: u32,
    seed: u64,
    original: SystemDto,
    canonical_original: SystemDto,
    normalized: SystemDto,
    trace_steps: Vec<TraceStepDto>,
    trace_predicates: Vec<PredicateDto>,
    count_preserving: bool,
    hyperplanes: Vec<HyperplaneDto>,
    chambers: Vec<ChamberDto>,
    chamber_data: Vec<ChamberDataDto>,
    projection: Vec<(Vec<String>, String)>,
    c_global: Vec<String>,
    chi: String,
    mu_measured: usize,
    delta_measured: String,
    f_vector: Option<Vec<usize>>,
}

pub fn to_json(repr: &Representation) -> String {
    let dto = ReprDto {
        schema: SCHEMA_VERSION,
        seed: repr.seed,
        original: system_dto(&repr.original),
        canonical_original: system_dto(&repr.canonical_original),
        normalized: system_dto(&repr.normalized),
        trace_steps: repr.trace.steps.iter().map(step_dto).collect(),
        trace_predicates: repr.trace.predicates.iter().map(predicate_dto).collect(),
        count_preserving: repr.trace.count_preserving,
        hyperplanes: repr
            .decomposition
            .index
            .hyperplanes
            .iter()
            .map(|h| HyperplaneDto { coeffs: ints(&h.coeffs), rhs: int_s(&h.rhs) })
            .collect(),
        chambers: repr
            .decomposition
            .chambers
            .iter()
            .map(|c| ChamberDto {
                dim: c.dim,
                sign_vector: c.sign_vector.clone(),
                zero_set: c.zero_set.clone(),
                hull_basis: c.hull_basis.iter().map(|v| ints(v)).collect(),
                witness: rats(&c.witness),
                maps: c
                    .maps
                    .iter()
                    .map(|m| MapDto {
                        basis: m.basis.clone(),
                        t_mat: rat_mat(&m.t_mat),
                        t_vec: rats(&m.t_vec),
                    })
                    .collect(),
                chdenom_z: int_s(&c.chdenom_z),
                chdenom_q: rat_to_string(&c.chdenom_q),
            })
            .collect(),
        chamber_data: repr
            .chamber_data
            .iter()
            .map(|d| ChamberDataDto {
                predicates: d.predicates.iter().map(predicate_dto).collect(),
                pieces: d
                    .pieces
                    .iter()
                    .map(|p| PieceDto {
                        basis: p.basis.clone(),
                        p_mat: int_mat(&p.p_mat),
                        s_diag: ints(&p.s_diag),
                        c_b: rats(&p.c_b),
                        betas: rats(&p.betas),
                        delta: int_s(&p.delta),
                        tables: p
                            .tables
                            .iter()
                            .map(|(g, pis)| (ints(g), rats(pis)))
                            .collect(),
                        step_offset: rats(&p.step_offset),
                        step_param: rat_mat(&p.step_param),
                    })
                    .collect(),
                constant: d.constant,
                c_local: ints(&d.c_local),
                reduced_nx: d.reduced_nx,
            })
            .collect(),
        projection: repr
            .decomposition
            .projection
            .iter()
            .map(|(a, b)| (rats(a), rat_to_string(b)))
            .collect(),
        c_global: ints(&repr.c_global),
        chi: int_s(&repr.chi),
        mu_measured: repr.mu_measured,
        delta_measured: int_s(&repr.delta_measured),
        f_vector: repr.f_vector.clone(),
    };
    serde_json::to_string_pretty(&dto).expect("representation serialization")
}

pub fn from_json(text: &str) -> Result<Representation> {
    let dto: ReprDto =
        serde_json::from_str(text).map_err(|e| Error::Input(format!("bad repr JSON: {e}")))?;
    if dto.schema != SCHEMA_VERSION {
        return Err(Error::Input(format!(
            "unsupported schema {} (expected {SCHEMA_VERSION})",
            dto.schema
        )));
    }
    let normalized = system_from(&dto.normalized)?;
    let ny = normalized.n_y();
    let hyperplanes: Vec<Hyperplane> = dto
        .hyperplanes
        .iter()
        .map(|h| Ok(Hyperplane { coeffs: p_ints(&h.coeffs)?, rhs: parse_int(&h.rhs)? }))
        .collect::<Result<Vec<_>>>()?;
    let chambers: Vec<Chamber> = dto
        .chambers
        .iter()
        .map(|c| {
            Ok(Chamber {
                dim: c.dim,
                sign_vector: c.sign_vector.clone(),
                zero_set: c.zero_set.clone(),
                hull_basis: c.hull_basis.iter().map(|v| p_ints(v)).collect::<Result<Vec<_>>>()?,
                witness: p_rats(&c.witness)?,
                maps: c
                    .maps
                    .iter()
                    .map(|m| {
                        Ok(ParametricVertexMap {
                            basis: m.basis.clone(),
                            t_mat: p_rat_mat(&m.t_mat, ny)?,
                            t_vec: p_rats(&m.t_vec)?,
                        })
                    })
                    .collect::<Result<Vec<_>>>()?,
                chdenom_z: parse_int(&c.chdenom_z)?,
                chdenom_q: parse_rat(&c.chdenom_q)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let by_sign: BTreeMap<Vec<i8>, usize> =
        chambers.iter().enumerate().map(|(i, c)| (c.sign_vector.clone(), i)).collect();
    let chamber_data: Vec<ChamberData> = dto
        .chamber_data
        .iter()
        .map(|d| {
            Ok(ChamberData {
                predicates: d.predicates.iter().map(predicate_from).collect::<Result<Vec<_>>>()?,
                pieces: d
                    .pieces
                    .iter()
                    .map(|p| {
                        let nloc = p.s_diag.len();
                        Ok(PeriodicPiece {
                            basis: p.basis.clone(),
                            p_mat: p_int_mat(&p.p_mat, nloc)?,
                            s_diag: p_ints(&p.s_diag)?,
                            c_b: p_rats(&p.c_b)?,
                            betas: p_rats(&p.betas)?,
                            delta: parse_int(&p.delta)?,
                            tables: p
                                .tables
                                .iter()
                                .map(|(g, pis)| Ok((p_ints(g)?, p_rats(pis)?)))
                                .collect::<Result<BTreeMap<_, _>>>()?,
                            step_offset: p_rats(&p.step_offset)?,
                            step_param: p_rat_mat(&p.step_param, ny)?,
                        })
                    })
                    .collect::<Result<Vec<_>>>()?,
                constant: d.constant,
                c_local: p_ints(&d.c_local)?,
                reduced_nx: d.reduced_nx,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let trace = NormalizationTrace {
        steps: dto.trace_steps.iter().map(step_from).collect::<Result<Vec<_>>>()?,
        predicates: dto
            .trace_predicates
            .iter()
            .map(predicate_from)
            .collect::<Result<Vec<_>>>()?,
        count_preserving: dto.count_preserving,
    };
    Ok(Representation {
        original: system_from(&dto.original)?,
        canonical_original: system_from(&dto.canonical_original)?,
        trace,
        normalized,
        decomposition: ChamberDecomposition {
            chambers,
            index: ChamberIndex { hyperplanes, by_sign },
            projection: dto
                .projection
                .iter()
                .map(|(a, b)| Ok((p_rats(a)?, parse_rat(b)?)))
                .collect::<Result<Vec<_>>>()?,
        },
        chamber_data,
        c_global: p_ints(&dto.c_global)?,
        chi: parse_int(&dto.chi)?,
        mu_measured: dto.mu_measured,
        delta_measured: parse_int(&dto.delta_measured)?,
        f_vector: dto.f_vector,
        seed: dto.seed,
    })
}

#[cfg(test)]
mod tests {
    use crate::arith::{rat, rat_int, IntMatrix, RatMatrix};
    use crate::param_count::build_representation;
    use crate::polyhedron::ParametricSystem;

    #[test]
    fn round_trip_evaluates_identically() {
        let sys = ParametricSystem::canonical(
            IntMatrix::from_i64(&[&[-2], &[2]]),
            RatMatrix::from_rows(vec![vec![rat_int(0)], vec![rat_int(1)]]),
            vec![rat_int(0), rat_int(0)],
        );
        let repr = build_representation(&sys, 0).unwrap();
        let json = super::to_json(&repr);
        let back = super::from_json(&json).unwrap();
        for y in [rat_int(0), rat_int(3), rat(7, 2), rat_int(-1), rat(13, 3)] {
            assert_eq!(repr.evaluate(&[y.clone()]).unwrap(), back.evaluate(&[y]).unwrap());
        }
        // byte-identical re-serialization
        assert_eq!(json, super::to_json(&back));
    }
}
