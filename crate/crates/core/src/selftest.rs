//! Instance generators and oracle-equivalence suites shared by the CLI
//! `selftest` subcommand, the integration tests, and the acceptance suite.

use crate::arith::{int, rank_rat, rat, Int, IntMatrix, Rat, RatMatrix};
use crate::counting::{brute_force_count, count_fixed, Count};
use crate::error::{Error, Result};
use crate::group_gf::{numerator_table, Laurent};
use crate::loopnest::{nest_to_polyhedron, parse_loopnest, simulate_nest, EXAMPLE_SOURCE};
use crate::param_count::{build_representation, Evaluation};
use crate::polyhedron::{recession_ray, ParametricSystem};
use num::{Signed, ToPrimitive, Zero};
use rand::rngs::StdRng;
use rand::Rng;
use std::collections::BTreeMap;

#[derive(Clone, Debug, Default)]
pub struct SuiteResult {
    pub name: String,
    pub total: usize,
    pub passed: usize,
    pub failures: Vec<String>,
}

impl SuiteResult {
    pub fn ok(&self) -> bool {
        self.passed == self.total
    }
}

impl std::fmt::Display for SuiteResult {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}: {}/{} passed", self.name, self.passed, self.total)?;
        for fail in &self.failures {
            write!(f, "\n  FAIL {fail}")?;
        }
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// Instance generators
// ---------------------------------------------------------------------------

pub fn random_fixed_instance(
    rng: &mut StdRng,
    n_max: usize,
    m_max: usize,
    lo: i64,
    hi: i64,
) -> (IntMatrix, Vec<Rat>) {
    let n = rng.gen_range(1..=n_max);
    let m = rng.gen_range(1..=m_max);
    let a = IntMatrix::from_rows(
        (0..m).map(|_| (0..n).map(|_| int(rng.gen_range(lo..=hi))).collect()).collect(),
    );
    let b: Vec<Rat> = (0..m).map(|_| Rat::from_integer(int(rng.gen_range(lo..=hi)))).collect();
    (a, b)
}

/// Random canonical system with bounded nonempty fibers and full-rank A
/// and B (resampled until the conditions hold).
pub fn random_parametric_instance(
    rng: &mut StdRng,
    nx_max: usize,
    ny_max: usize,
    m_max: usize,
    lo: i64,
    hi: i64,
) -> ParametricSystem {
    loop {
        let nx = rng.gen_range(1..=nx_max);
        let ny = rng.gen_range(1..=ny_max);
        let m_lo = (nx + 1).min(m_max);
        let m = rng.gen_range(m_lo..=m_max.max(m_lo));
        let a = IntMatrix::from_rows(
            (0..m).map(|_| (0..nx).map(|_| int(rng.gen_range(lo..=hi))).collect()).collect(),
        );
        if rank_rat(&a.to_rat()) != nx {
            continue;
        }
        if recession_ray(&a).is_some() {
            continue; // fibers must be bounded
        }
        let bm = RatMatrix::from_rows(
            (0..m)
                .map(|_| (0..ny).map(|_| Rat::from_integer(int(rng.gen_range(lo..=hi)))).collect())
                .collect(),
        );
        if rank_rat(&bm) != ny {
            continue;
        }
        let off: Vec<Rat> = (0..m).map(|_| Rat::from_integer(int(rng.gen_range(lo..=hi)))).collect();
        let sys = ParametricSystem::canonical(a, bm, off);
        // Π(P) must be nonempty
        let mut lpp = crate::lp::LpProblem::new(nx + ny);
        for (row, rhs) in sys.xy_rows() {
            lpp.add_ineq(row, rhs);
        }
        if lpp.feasible_point().is_none() {
            continue;
        }
        return sys;
    }
}

// ---------------------------------------------------------------------------
// Series oracle (Appendix-level check)
// ---------------------------------------------------------------------------

/// Verify that the numerator table of (A_B, c), expanded against its
/// denominator ∏(1 − u^{r_i·a_i}), reproduces the directly summed series
/// Σ_{y ∈ M_n(g)} u^{Σ a_i y_i} up to order 3·n·σ·χ for every group
/// element. Requires every ⟨c, h_i⟩ > 0 so the direct sum truncates.
pub fn assert_series_oracle(a_b: &IntMatrix, c: &[Int]) -> Result<()> {
    let tbl = numerator_table(a_b, c)?;
    let n = a_b.rows;
    if tbl.a_dots.iter().any(|a| !a.is_positive()) {
        return Err(Error::Input("series oracle needs ⟨c, h_i⟩ > 0".into()));
    }
    let cap_int = Int::from(3 * n as i64) * &tbl.sigma * &tbl.chi;
    let cap = cap_int
        .to_i64()
        .ok_or_else(|| Error::Internal("oracle cap beyond i64".into()))?;

    // direct summation of the series, bucketed by group element
    let (group, gens, _) = crate::group_gf::group_data(&tbl.smith)?;
    let a_i64: Vec<i64> = tbl
        .a_dots
        .iter()
        .map(|a| a.to_i64().expect("dot fits i64"))
        .collect();
    let mut direct: BTreeMap<Vec<Int>, Laurent> = BTreeMap::new();
    let zero_g = vec![Int::zero(); n];
    fn recurse(
        depth: usize,
        exp: i64,
        g: Vec<Int>,
        cap: i64,
        a: &[i64],
        gens: &[Vec<Int>],
        group: &crate::group_gf::SmithGroup,
        out: &mut BTreeMap<Vec<Int>, Laurent>,
    ) {
        if depth == a.len() {
            *out.entry(g).or_default().entry(exp).or_insert(0) += 1;
            return;
        }
        let mut cur_exp = exp;
        let mut cur_g = g;
        loop {
            recurse(depth + 1, cur_exp, cur_g.clone(), cap, a, gens, group, out);
            cur_exp += a[depth];
            if cur_exp > cap {
                break;
            }
            cur_g = group.add(&cur_g, &gens[depth]);
        }
    }
    recurse(0, 0, zero_g, cap, &a_i64, &gens, &group, &mut direct);

    // expansion of numerator / ∏(1 − u^{r_i a_i}), truncated at cap
    for (g, num_poly) in &tbl.tables {
        let mut expanded: Laurent = num_poly.clone();
        for i in 0..n {
            let step = tbl.betas_int[i].to_i64().expect("beta fits i64");
            debug_assert!(step > 0);
            let mut out: Laurent = BTreeMap::new();
            for (&e, &cf) in &expanded {
                let mut shift = 0i64;
                while e + shift <= cap {
                    *out.entry(e + shift).or_insert(0) += cf;
                    shift += step;
                }
            }
            out.retain(|_, v| *v != 0);
            expanded = out;
        }
        let empty = Laurent::new();
        let want = direct.get(g).unwrap_or(&empty);
        let want_trunc: Laurent =
            want.iter().filter(|(&e, _)| e <= cap).map(|(&e, &v)| (e, v)).collect();
        if expanded != want_trunc {
            return Err(Error::Internal(format!(
                "series mismatch for group element {g:?}: table {expanded:?} vs direct {want_trunc:?}"
            )));
        }
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Suites
// ---------------------------------------------------------------------------

/// count_fixed against brute force on random instances.
pub fn run_fixed_suite(trials: usize, seed: u64, budget: u64) -> SuiteResult {
    use rand::SeedableRng;
    let rng = &mut StdRng::seed_from_u64(seed);
    let mut out = SuiteResult { name: "fixed-count oracle".into(), total: trials, ..Default::default() };
    for t in 0..trials {
        let (a, b) = random_fixed_instance(rng, 3, 7, -4, 4);
        let fast = count_fixed(&a, &b, 0);
        let slow = brute_force_count(&a, &b, budget);
        match (fast, slow) {
            (Ok(f), Ok(s)) if f == s => out.passed += 1,
            (Ok(f), Ok(s)) => out.failures.push(format!("trial {t}: {f} vs {s} on {a:?} {b:?}")),
            (f, s) => out.failures.push(format!("trial {t}: {f:?} vs {s:?} on {a:?} {b:?}")),
        }
    }
    out
}

/// build + evaluate against per-fiber brute force at integer and rational
/// query points.
pub fn run_parametric_suite(trials: usize, seed: u64, budget: u64) -> SuiteResult {
    use rand::SeedableRng;
    let rng = &mut StdRng::seed_from_u64(seed);
    let mut out =
        SuiteResult { name: "parametric oracle".into(), total: trials, ..Default::default() };
    'trial: for t in 0..trials {
        let sys = random_parametric_instance(rng, 3, 2, 6, -3, 3);
        let repr = match build_representation(&sys, 0) {
            Ok(r) => r,
            Err(e) => {
                out.failures.push(format!("trial {t}: build failed: {e}"));
                continue;
            }
        };
        let ny = sys.n_y();
        let mut queries: Vec<Vec<Rat>> = Vec::new();
        let grid: Vec<i64> = vec![-2, 0, 1, 2, 3, 4, -4, 6, 5];
        for (k, &g) in grid.iter().enumerate() {
            let mut y = vec![Rat::from_integer(int(g)); ny];
            if ny > 1 {
                y[1] = Rat::from_integer(int(grid[(k + 3) % grid.len()]));
            }
            queries.push(y);
        }
        for frac in [rat(1, 2), rat(7, 3), rat(-3, 2), rat(5, 4)] {
            let mut y = vec![frac.clone(); ny];
            if ny > 1 {
                y[1] = rat(1, 3) + &frac;
            }
            queries.push(y);
        }
        for y in &queries {
            let expect = match brute_force_count(&sys.coeffs, &sys.rhs_at(y), budget) {
                Ok(c) => c,
                Err(e) => {
                    out.failures.push(format!("trial {t}: oracle budget: {e}"));
                    continue 'trial;
                }
            };
            let got = match repr.evaluate(y) {
                Ok(Evaluation::Outside) => Count::Finite(Int::zero()),
                Ok(Evaluation::Count(c)) => c,
                Err(e) => {
                    out.failures.push(format!("trial {t}: evaluate failed at {y:?}: {e}"));
                    continue 'trial;
                }
            };
            if got != expect {
                out.failures.push(format!("trial {t}: {got} vs {expect} at {y:?} on {sys:?}"));
                continue 'trial;
            }
        }
        out.passed += 1;
    }
    out
}

/// The bundled three-loop nest against its simulator on a parameter grid.
pub fn run_loopnest_suite(grid_max: i64) -> SuiteResult {
    let mut out = SuiteResult { name: "loop-nest oracle".into(), total: 1, ..Default::default() };
    let ast = match parse_loopnest(EXAMPLE_SOURCE) {
        Ok(a) => a,
        Err(e) => {
            out.failures.push(format!("parse: {e}"));
            return out;
        }
    };
    let sys = match nest_to_polyhedron(&ast) {
        Ok(s) => s,
        Err(e) => {
            out.failures.push(format!("compile: {e}"));
            return out;
        }
    };
    let repr = match build_representation(&sys, 0) {
        Ok(r) => r,
        Err(e) => {
            out.failures.push(format!("build: {e}"));
            return out;
        }
    };
    for n in 0..=grid_max {
        for m in 0..=grid_max {
            for p in 0..=grid_max {
                let y = vec![
                    Rat::from_integer(int(n)),
                    Rat::from_integer(int(m)),
                    Rat::from_integer(int(p)),
                ];
                let got = match repr.evaluate(&y) {
                    Ok(Evaluation::Outside) => Int::zero(),
                    Ok(Evaluation::Count(Count::Finite(v))) => v,
                    other => {
                        out.failures.push(format!("evaluate at ({n},{m},{p}): {other:?}"));
                        return out;
                    }
                };
                let sim = simulate_nest(&ast, &[n, m, p]);
                if got != sim {
                    out.failures.push(format!("({n},{m},{p}): pipeline {got} vs simulator {sim}"));
                    return out;
                }
            }
        }
    }
    out.passed = 1;
    out
}

/// Numerator tables against the directly summed series.
pub fn run_series_suite(trials: usize, seed: u64) -> SuiteResult {
    use rand::SeedableRng;
    let rng = &mut StdRng::seed_from_u64(seed);
    let mut out = SuiteResult { name: "series oracle".into(), total: trials, ..Default::default() };
    let mut done = 0;
    while done < trials {
        let n = rng.gen_range(1..=3usize);
        let a = IntMatrix::from_rows(
            (0..n).map(|_| (0..n).map(|_| int(rng.gen_range(-4..=4))).collect()).collect(),
        );
        let det = crate::arith::determinant(&a).unwrap();
        if det.is_zero() || det.abs() > int(10) {
            continue;
        }
        let z: Vec<Int> = (0..n).map(|_| int(rng.gen_range(1..=2))).collect();
        let c = a.transpose().mul_vec(&z);
        match assert_series_oracle(&a, &c) {
            Ok(()) => out.passed += 1,
            Err(e) => out.failures.push(format!("trial {done}: {e} on {a:?}")),
        }
        done += 1;
    }
    out
}
