//! A small affine loop-nest language and its compilation to a canonical
//! parametric system, plus a literal nest simulator used as the oracle.
//!
//! Grammar: nest := {"param" id}* {"for" id ":=" expr "to" expr ["do"]}+,
//! with affine expressions over parameters and strictly-outer iterators;
//! "*" by an integer literal, "/" by a positive integer literal. A single
//! trailing statement identifier is accepted and ignored.

use crate::arith::{lcm_int, rat_ceil, rat_floor, Int, IntMatrix, Rat, RatMatrix};
use crate::error::{Error, Result};
use crate::polyhedron::ParametricSystem;
use num::{One, Signed, ToPrimitive, Zero};
use std::collections::BTreeMap;

/// Three-level nest used by the docs, the self tests, and the examples
/// directory.
pub const EXAMPLE_SOURCE: &str = "\
param n
param m
param p
for i := 0 to n do
    for j := 0 to 1 + i + m/2 do
        for k := 0 to i - n + p - 1 do
            Statement
";

#[derive(Clone, Debug, PartialEq)]
pub struct AffineExpr {
    /// variable name → rational coefficient
    pub coeffs: BTreeMap<String, Rat>,
    pub constant: Rat,
}

impl AffineExpr {
    fn zero() -> Self {
        AffineExpr { coeffs: BTreeMap::new(), constant: Rat::zero() }
    }

    fn constant(v: Rat) -> Self {
        AffineExpr { coeffs: BTreeMap::new(), constant: v }
    }

    fn var(name: &str) -> Self {
        let mut coeffs = BTreeMap::new();
        coeffs.insert(name.to_string(), Rat::one());
        AffineExpr { coeffs, constant: Rat::zero() }
    }

    fn add(&self, other: &AffineExpr, sign: i8) -> AffineExpr {
        let mut out = self.clone();
        let s = Rat::from_integer(Int::from(sign as i64));
        for (k, v) in &other.coeffs {
            let e = out.coeffs.entry(k.clone()).or_insert_with(Rat::zero);
            *e += &s * v;
        }
        out.constant += &s * &other.constant;
        out.coeffs.retain(|_, v| !v.is_zero());
        out
    }

    fn scale(&self, f: &Rat) -> AffineExpr {
        AffineExpr {
            coeffs: self.coeffs.iter().map(|(k, v)| (k.clone(), v * f)).collect(),
            constant: &self.constant * f,
        }
    }

    fn is_constant(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn eval(&self, env: &BTreeMap<String, Rat>) -> Rat {
        let mut acc = self.constant.clone();
        for (k, v) in &self.coeffs {
            acc += v * env.get(k).expect("variable bound");
        }
        acc
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct LoopSpec {
    pub iterator: String,
    pub lower: AffineExpr,
    pub upper: AffineExpr,
    pub line: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LoopNestAst {
    pub parameters: Vec<String>,
    pub loops: Vec<LoopSpec>,
}

// ---------------------------------------------------------------------------
// Lexer / parser
// ---------------------------------------------------------------------------

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Ident(String),
    Num(Int),
    Assign,
    Plus,
    Minus,
    Star,
    Slash,
}

struct Lexer {
    toks: Vec<(Tok, usize, usize)>, // token, line, col
    pos: usize,
}

fn lex(text: &str) -> Result<Lexer> {
    let mut toks = Vec::new();
    for (ln, line) in text.lines().enumerate() {
        let bytes: Vec<char> = line.chars().collect();
        let mut i = 0;
        while i < bytes.len() {
            let c = bytes[i];
            let col = i + 1;
            if c.is_whitespace() {
                i += 1;
                continue;
            }
            if c.is_ascii_digit() {
                let start = i;
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                let s: String = bytes[start..i].iter().collect();
                toks.push((Tok::Num(s.parse().unwrap()), ln + 1, col));
                continue;
            }
            if c.is_alphabetic() || c == '_' {
                let start = i;
                while i < bytes.len() && (bytes[i].is_alphanumeric() || bytes[i] == '_') {
                    i += 1;
                }
                let s: String = bytes[start..i].iter().collect();
                toks.push((Tok::Ident(s), ln + 1, col));
                continue;
            }
            match c {
                ':' => {
                    if i + 1 < bytes.len() && bytes[i + 1] == '=' {
                        toks.push((Tok::Assign, ln + 1, col));
                        i += 2;
                        continue;
                    }
                    return Err(Error::Parse { line: ln + 1, col, msg: "expected ':='".into() });
                }
                '+' => toks.push((Tok::Plus, ln + 1, col)),
                '-' => toks.push((Tok::Minus, ln + 1, col)),
                '*' => toks.push((Tok::Star, ln + 1, col)),
                '/' => toks.push((Tok::Slash, ln + 1, col)),
                _ => {
                    return Err(Error::Parse {
                        line: ln + 1,
                        col,
                        msg: format!("unexpected character '{c}'"),
                    })
                }
            }
            i += 1;
        }
    }
    Ok(Lexer { toks, pos: 0 })
}

impl Lexer {
    fn peek(&self) -> Option<&(Tok, usize, usize)> {
        self.toks.get(self.pos)
    }

    fn next(&mut self) -> Option<(Tok, usize, usize)> {
        let t = self.toks.get(self.pos).cloned();
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn here(&self) -> (usize, usize) {
        self.toks
            .get(self.pos)
            .or_else(|| self.toks.last())
            .map(|(_, l, c)| (*l, *c))
            .unwrap_or((1, 1))
    }
}

fn parse_err<T>(lx: &Lexer, msg: &str) -> Result<T> {
    let (line, col) = lx.here();
    Err(Error::Parse { line, col, msg: msg.into() })
}

/// expr := term (("+"|"-") term)*
/// term := factor (("*" int) | ("/" posint))*
/// factor := int | ident | "-" factor
fn parse_expr(lx: &mut Lexer, known: &dyn Fn(&str) -> bool) -> Result<AffineExpr> {
    fn parse_factor(lx: &mut Lexer, known: &dyn Fn(&str) -> bool) -> Result<AffineExpr> {
        match lx.next() {
            Some((Tok::Num(v), _, _)) => Ok(AffineExpr::constant(Rat::from_integer(v))),
            Some((Tok::Ident(name), line, col)) => {
                if !known(&name) {
                    return Err(Error::Parse {
                        line,
                        col,
                        msg: format!("'{name}' is not a parameter or an outer iterator"),
                    });
                }
                Ok(AffineExpr::var(&name))
            }
            Some((Tok::Minus, _, _)) => {
                let inner = parse_factor(lx, known)?;
                Ok(AffineExpr::zero().add(&inner, -1))
            }
            _ => parse_err(lx, "expected an expression"),
        }
    }
    fn parse_term(lx: &mut Lexer, known: &dyn Fn(&str) -> bool) -> Result<AffineExpr> {
        let mut acc = parse_factor(lx, known)?;
        loop {
            match lx.peek() {
                Some((Tok::Star, _, _)) => {
                    lx.next();
                    let rhs = parse_factor(lx, known)?;
                    if rhs.is_constant() {
                        acc = acc.scale(&rhs.constant);
                    } else if acc.is_constant() {
                        acc = rhs.scale(&acc.constant);
                    } else {
                        return parse_err(lx, "'*' needs an integer literal on one side");
                    }
                }
                Some((Tok::Slash, _, _)) => {
                    lx.next();
                    let rhs = parse_factor(lx, known)?;
                    if !rhs.is_constant() || !rhs.constant.is_positive() {
                        return parse_err(lx, "'/' needs a positive integer literal");
                    }
                    acc = acc.scale(&rhs.constant.clone().recip());
                }
                _ => break,
            }
        }
        Ok(acc)
    }
    let mut acc = parse_term(lx, known)?;
    loop {
        match lx.peek() {
            Some((Tok::Plus, _, _)) => {
                lx.next();
                let t = parse_term(lx, known)?;
                acc = acc.add(&t, 1);
            }
            Some((Tok::Minus, _, _)) => {
                lx.next();
                let t = parse_term(lx, known)?;
                acc = acc.add(&t, -1);
            }
            _ => break,
        }
    }
    Ok(acc)
}

pub fn parse_loopnest(text: &str) -> Result<LoopNestAst> {
    let mut lx = lex(text)?;
    let mut parameters: Vec<String> = Vec::new();
    let mut loops: Vec<LoopSpec> = Vec::new();
    loop {
        match lx.peek().cloned() {
            Some((Tok::Ident(w), line, col)) if w == "param" => {
                lx.next();
                match lx.next() {
                    Some((Tok::Ident(name), _, _)) => {
                        if parameters.contains(&name) {
                            return Err(Error::Parse {
                                line,
                                col,
                                msg: format!("duplicate parameter '{name}'"),
                            });
                        }
                        parameters.push(name);
                    }
                    _ => return parse_err(&lx, "expected a parameter name"),
                }
            }
            Some((Tok::Ident(w), line, _)) if w == "for" => {
                lx.next();
                let name = match lx.next() {
                    Some((Tok::Ident(n), _, _)) => n,
                    _ => return parse_err(&lx, "expected an iterator name"),
                };
                if parameters.contains(&name) || loops.iter().any(|l| l.iterator == name) {
                    return parse_err(&lx, "iterator name already in use");
                }
                match lx.next() {
                    Some((Tok::Assign, _, _)) => {}
                    _ => return parse_err(&lx, "expected ':='"),
                }
                let outer: Vec<String> = loops.iter().map(|l| l.iterator.clone()).collect();
                let known = |s: &str| parameters.iter().any(|p| p == s) || outer.iter().any(|o| o == s);
                let lower = parse_expr(&mut lx, &known)?;
                match lx.next() {
                    Some((Tok::Ident(w), _, _)) if w == "to" => {}
                    _ => return parse_err(&lx, "expected 'to'"),
                }
                let upper = parse_expr(&mut lx, &known)?;
                if let Some((Tok::Ident(w), _, _)) = lx.peek() {
                    if w == "do" {
                        lx.next();
                    }
                }
                loops.push(LoopSpec { iterator: name, lower, upper, line });
            }
            Some((Tok::Ident(_), _, _)) if !loops.is_empty() => {
                // trailing statement name, ignored
                lx.next();
                if lx.peek().is_some() {
                    return parse_err(&lx, "only a single trailing statement is accepted");
                }
                break;
            }
            None => break,
            _ => return parse_err(&lx, "expected 'param', 'for', or end of input"),
        }
    }
    if loops.is_empty() {
        return parse_err(&lx, "a nest needs at least one loop");
    }
    Ok(LoopNestAst { parameters, loops })
}

// ---------------------------------------------------------------------------
// Compilation and simulation
// ---------------------------------------------------------------------------

/// Compile to {x : A x ≤ b + B y} with x = iterators and y = parameters;
/// each bound contributes one row, denominators cleared row-wise.
pub fn nest_to_polyhedron(ast: &LoopNestAst) -> Result<ParametricSystem> {
    let nx = ast.loops.len();
    let ny = ast.parameters.len();
    let iter_index: BTreeMap<&str, usize> =
        ast.loops.iter().enumerate().map(|(i, l)| (l.iterator.as_str(), i)).collect();
    let param_index: BTreeMap<&str, usize> =
        ast.parameters.iter().enumerate().map(|(i, p)| (p.as_str(), i)).collect();

    let mut a_rows: Vec<Vec<Int>> = Vec::with_capacity(2 * nx);
    let mut b_rows: Vec<Vec<Rat>> = Vec::with_capacity(2 * nx);
    let mut offs: Vec<Rat> = Vec::with_capacity(2 * nx);

    let mut push_row = |a: Vec<Rat>, b: Vec<Rat>, c: Rat| -> Result<()> {
        let mut den = Int::one();
        for v in a.iter().chain(b.iter()).chain(std::iter::once(&c)) {
            den = lcm_int(&den, v.denom());
        }
        let s = Rat::from_integer(den);
        a_rows.push(a.iter().map(|v| (v * &s).to_integer()).collect());
        b_rows.push(b.iter().map(|v| v * &s).collect());
        offs.push(c * &s);
        Ok(())
    };

    for (i, l) in ast.loops.iter().enumerate() {
        for (expr, is_lower) in [(&l.lower, true), (&l.upper, false)] {
            let mut ax = vec![Rat::zero(); nx];
            let mut by = vec![Rat::zero(); ny];
            for (name, coef) in &expr.coeffs {
                if let Some(&j) = iter_index.get(name.as_str()) {
                    if j >= i {
                        return Err(Error::Unsupported(format!(
                            "bound of '{}' references non-outer iterator '{name}'",
                            l.iterator
                        )));
                    }
                    // x-part of the bound
                    if is_lower {
                        ax[j] = coef.clone();
                    } else {
                        ax[j] = -coef.clone();
                    }
                } else if let Some(&p) = param_index.get(name.as_str()) {
                    if is_lower {
                        by[p] = -coef.clone();
                    } else {
                        by[p] = coef.clone();
                    }
                } else {
                    return Err(Error::Unsupported(format!("unbound name '{name}'")));
                }
            }
            if is_lower {
                // x_i ≥ e ⟺ (e_x − unit_i)·x ≤ −c0 − e_y·y
                ax[i] -= Rat::one();
                push_row(ax, by, -expr.constant.clone())?;
            } else {
                // x_i ≤ e ⟺ (unit_i − e_x)·x ≤ c0 + e_y·y
                ax[i] += Rat::one();
                push_row(ax, by, expr.constant.clone())?;
            }
        }
    }
    Ok(ParametricSystem::canonical(
        IntMatrix::from_rows(a_rows),
        RatMatrix::from_rows(b_rows),
        offs,
    ))
}

/// Literal nested iteration count at integer parameter values; empty
/// ranges contribute zero.
pub fn simulate_nest(ast: &LoopNestAst, y: &[i64]) -> Int {
    assert_eq!(y.len(), ast.parameters.len());
    let mut env: BTreeMap<String, Rat> = BTreeMap::new();
    for (p, &v) in ast.parameters.iter().zip(y) {
        env.insert(p.clone(), Rat::from_integer(Int::from(v)));
    }
    fn recurse(ast: &LoopNestAst, depth: usize, env: &mut BTreeMap<String, Rat>) -> Int {
        if depth == ast.loops.len() {
            return Int::one();
        }
        let l = &ast.loops[depth];
        let lo = rat_ceil(&l.lower.eval(env));
        let hi = rat_floor(&l.upper.eval(env));
        let mut acc = Int::zero();
        let (Some(lo), Some(hi)) = (lo.to_i64(), hi.to_i64()) else {
            panic!("iteration range beyond i64 at desk scale");
        };
        for v in lo..=hi {
            env.insert(l.iterator.clone(), Rat::from_integer(Int::from(v)));
            acc += recurse(ast, depth + 1, env);
        }
        env.remove(&l.iterator);
        acc
    }
    recurse(ast, 0, &mut env)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::int;

    #[test]
    fn parse_example_nest() {
        let ast = parse_loopnest(EXAMPLE_SOURCE).unwrap();
        assert_eq!(ast.parameters, vec!["n", "m", "p"]);
        let iters: Vec<&str> = ast.loops.iter().map(|l| l.iterator.as_str()).collect();
        assert_eq!(iters, vec!["i", "j", "k"]);
    }

    #[test]
    fn parse_single_loop() {
        let ast = parse_loopnest("param n\nfor i := 0 to n").unwrap();
        assert_eq!(ast.loops.len(), 1);
    }

    #[test]
    fn parse_missing_expression() {
        let err = parse_loopnest("param n\nfor i := to n").unwrap_err();
        match err {
            Error::Parse { line, .. } => assert_eq!(line, 2),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn compile_example_matches_displayed_matrices() {
        let ast = parse_loopnest(EXAMPLE_SOURCE).unwrap();
        let sys = nest_to_polyhedron(&ast).unwrap();
        let expect_a = IntMatrix::from_i64(&[
            &[-1, 0, 0],
            &[1, 0, 0],
            &[0, -1, 0],
            &[-2, 2, 0],
            &[0, 0, -1],
            &[-1, 0, 1],
        ]);
        let expect_b = IntMatrix::from_i64(&[
            &[0, 0, 0],
            &[1, 0, 0],
            &[0, 0, 0],
            &[0, 1, 0],
            &[0, 0, 0],
            &[-1, 0, 1],
        ]);
        let expect_off = vec![int(0), int(0), int(0), int(2), int(0), int(-1)];
        assert_eq!(sys.coeffs, expect_a);
        assert_eq!(sys.param, expect_b.to_rat());
        let offs: Vec<Int> = sys.offset.iter().map(|v| v.to_integer()).collect();
        assert_eq!(offs, expect_off);
    }

    #[test]
    fn compile_single_loop() {
        let ast = parse_loopnest("param n\nfor i := 0 to n").unwrap();
        let sys = nest_to_polyhedron(&ast).unwrap();
        assert_eq!(sys.coeffs, IntMatrix::from_i64(&[&[-1], &[1]]));
    }

    #[test]
    fn simulate_examples() {
        let one = parse_loopnest("param n\nfor i := 0 to n").unwrap();
        assert_eq!(simulate_nest(&one, &[4]), int(5));
        let ast = parse_loopnest(EXAMPLE_SOURCE).unwrap();
        assert_eq!(simulate_nest(&ast, &[0, 0, 1]), int(2));
    }

    #[test]
    fn coupled_bounds_match_simulation() {
        let src = "param n\nfor i := 0 to n do\nfor j := i to 2*i + 1";
        let ast = parse_loopnest(src).unwrap();
        let sys = nest_to_polyhedron(&ast).unwrap();
        for t in 0..=5i64 {
            let y = vec![crate::arith::rat_int(t)];
            let count =
                crate::counting::brute_force_count(&sys.coeffs, &sys.rhs_at(&y), 100_000).unwrap();
            let sim = simulate_nest(&ast, &[t]);
            assert_eq!(count, crate::counting::Count::Finite(sim), "t = {t}");
        }
    }
}
