//! Request dispatch and result formatting for the `superpull` binary.

use std::collections::HashMap;

use serde::Serialize;
use superpull::djops::{DOperatorContext, SMap};
use superpull::expr::{parse_index_list, parse_spoly, parse_superscalar, parse_target_poly, SymbolTable};
use superpull::grassmann::{GeneratorSet, MultiIndex, MAX_GENERATORS};
use superpull::oracle::{agrees, cross_check, first_disagreement, NumericGrassmann, SmoothFn};
use superpull::scalar::{to_f64, Function, Rational, SPolynomial, SuperScalar};
use superpull::supercalc::{
    berezin, exp_xi_apply, pullback_polynomial, pullback_taylor, reconstruct_xi, Superfield, XiField,
};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Parse(superpull::Error),
    #[error("context error: {0}")]
    Context(String),
    #[error("{0}")]
    Semantic(superpull::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Parse(_) => 2,
            CliError::Context(_) | CliError::Semantic(_) => 3,
        }
    }
}

impl From<superpull::Error> for CliError {
    fn from(e: superpull::Error) -> Self {
        match e {
            superpull::Error::Parse { .. } => CliError::Parse(e),
            superpull::Error::GeneratorOutOfRange { .. } => CliError::Context(e.to_string()),
            other => CliError::Semantic(other),
        }
    }
}

type CliResult<T> = Result<T, CliError>;

/// Generator counts and symbol declarations shared by every expression of a
/// request.
#[derive(Clone, Debug, Default)]
pub struct Context {
    pub q: usize,
    pub aux: usize,
    pub odd: Vec<String>,
    pub even: Vec<String>,
    /// `name` or `name:arity`.
    pub functions: Vec<String>,
}

#[derive(Clone, Debug)]
pub enum Command {
    Pullback { fields: Vec<String>, f: Option<String>, poly: Option<String> },
    ExpExpand { xi: Vec<String>, f: String },
    Reconstruct { fields: Vec<String> },
    Berezin { vars: String, expr: String },
    Dop { index: String, poly: String },
    IdealCheck { poly: String },
    ChainCheck { index: String, poly: String, y: Vec<String> },
    TqCheck { s: Vec<String> },
    Iso { poly: String },
    OracleCompare { fields: Vec<String>, f: String, bind: Vec<String> },
}

#[derive(Clone, Debug)]
pub struct Request {
    pub context: Context,
    pub command: Command,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FuncTerm {
    pub name: String,
    pub deriv: Vec<u32>,
    pub power: u32,
}

/// One normalized term.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Term {
    pub gens: Vec<usize>,
    pub odd: Vec<String>,
    pub even: Vec<(String, u32)>,
    pub funcs: Vec<FuncTerm>,
    pub coeff: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Section {
    pub label: String,
    pub text: String,
    pub terms: Vec<Term>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct Response {
    pub sections: Vec<Section>,
    pub verdict: Option<bool>,
    pub diagnostics: Vec<String>,
}

#[derive(Serialize)]
struct TermRecord<'a> {
    section: &'a str,
    #[serde(flatten)]
    term: &'a Term,
}

impl Response {
    /// Plain text: one `label: expression` line per section, then the verdict.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for s in &self.sections {
            if s.label.is_empty() {
                out.push_str(&s.text);
            } else {
                out.push_str(&format!("{}: {}", s.label, s.text));
            }
            out.push('\n');
        }
        if let Some(v) = self.verdict {
            out.push_str(&format!("{v}\n"));
        }
        out
    }

    /// JSON lines: one record per term, then a verdict record if any.
    pub fn to_json_lines(&self) -> String {
        let mut out = String::new();
        for s in &self.sections {
            for t in &s.terms {
                let rec = TermRecord { section: &s.label, term: t };
                out.push_str(&serde_json::to_string(&rec).expect("serializable"));
                out.push('\n');
            }
        }
        if let Some(v) = self.verdict {
            out.push_str(&serde_json::json!({ "verdict": v }).to_string());
            out.push('\n');
        }
        out
    }
}

fn super_section(label: &str, value: &SuperScalar, gens: GeneratorSet) -> Section {
    let terms = value
        .terms()
        .map(|(m, c)| Term {
            gens: m.gens.to_vec(),
            odd: m.odd.clone(),
            even: m.even.clone(),
            funcs: m
                .funcs
                .iter()
                .map(|(d, e)| FuncTerm { name: d.name.clone(), deriv: d.deriv.clone(), power: *e })
                .collect(),
            coeff: c.to_string(),
        })
        .collect();
    Section { label: label.to_string(), text: value.render(gens), terms }
}

fn rational_section(label: &str, value: &Rational, gens: GeneratorSet) -> Section {
    super_section(label, &SuperScalar::constant(value.clone()), gens)
}

fn numeric_section(label: &str, value: &NumericGrassmann, q: usize) -> Section {
    let mut parts = Vec::new();
    let mut terms = Vec::new();
    for (m, c) in value.terms() {
        let names: Vec<String> =
            m.indices().map(|i| if i <= q { format!("theta{i}") } else { format!("eta{}", i - q) }).collect();
        parts.push(if names.is_empty() { format!("{c:e}") } else { format!("{c:e}*{}", names.join("*")) });
        terms.push(Term { gens: m.to_vec(), odd: vec![], even: vec![], funcs: vec![], coeff: format!("{c:e}") });
    }
    let text = if parts.is_empty() { "0".to_string() } else { parts.join(" + ") };
    Section { label: label.to_string(), text, terms }
}

fn generator_set(ctx: &Context) -> CliResult<GeneratorSet> {
    GeneratorSet::new(ctx.q, ctx.aux)
        .ok_or_else(|| CliError::Context(format!("q + L = {} exceeds {MAX_GENERATORS}", ctx.q + ctx.aux)))
}

fn parse_function_decl(decl: &str) -> CliResult<(String, usize)> {
    match decl.split_once(':') {
        None => Ok((decl.trim().to_string(), 1)),
        Some((name, arity)) => {
            let arity = arity.trim().parse().map_err(|_| {
                CliError::Parse(superpull::Error::Parse { position: 0, message: format!("bad arity in `{decl}`") })
            })?;
            Ok((name.trim().to_string(), arity))
        }
    }
}

fn symbol_table(ctx: &Context, gens: GeneratorSet, extra: &[(String, usize)]) -> CliResult<SymbolTable> {
    let mut t = SymbolTable::new(gens);
    for n in &ctx.even {
        t.declare_even(n)?;
    }
    for n in &ctx.odd {
        t.declare_odd(n)?;
    }
    for d in &ctx.functions {
        let (name, arity) = parse_function_decl(d)?;
        t.declare_function(&name, arity)?;
    }
    for (name, arity) in extra {
        match t.function_arity(name) {
            Some(a) if a == *arity => {}
            Some(a) => {
                return Err(CliError::Context(format!("function `{name}` declared with arity {a}, used with {arity}")))
            }
            None => t.declare_function(name, *arity)?,
        }
    }
    Ok(t)
}

fn superfield(fields: &[String], table: &SymbolTable) -> CliResult<Superfield> {
    if fields.is_empty() {
        return Err(CliError::Context("no --field given".into()));
    }
    let comps = fields.iter().map(|s| parse_superscalar(s, table)).collect::<superpull::Result<Vec<_>>>()?;
    Ok(Superfield::new(comps)?)
}

fn parse_xi(entries: &[String], table: &SymbolTable) -> CliResult<XiField> {
    let mut parsed = Vec::new();
    for e in entries {
        let (key, rest) = e.split_once(':').ok_or_else(|| {
            CliError::Parse(superpull::Error::Parse {
                position: 0,
                message: format!("expected `indices: coeffs` in `{e}`"),
            })
        })?;
        let key = parse_index_list(key)?;
        let coeffs = rest.split('|').map(|c| parse_superscalar(c, table)).collect::<superpull::Result<Vec<_>>>()?;
        parsed.push((key, coeffs));
    }
    let dim = parsed.first().map_or(0, |(_, c)| c.len());
    if parsed.iter().any(|(_, c)| c.len() != dim) {
        return Err(CliError::Context("all --xi entries need the same number of coefficients".into()));
    }
    let mut xi = XiField::new(dim);
    for (k, c) in parsed {
        if !table.gens.admits(k) {
            return Err(CliError::Context(format!("index {k} outside the generator context")));
        }
        xi.insert(k, c)?;
    }
    Ok(xi)
}

fn even_index(s: &str, gens: GeneratorSet) -> CliResult<MultiIndex> {
    let i = parse_index_list(s)?;
    if !i.is_even() || !gens.admits(i) {
        return Err(CliError::Context(format!("{i} is not an even multi-index within q = {}", gens.q())));
    }
    Ok(i)
}

fn parse_bindings(bind: &[String], gens: GeneratorSet) -> CliResult<HashMap<String, NumericGrassmann>> {
    let plain = SymbolTable::new(gens);
    let mut out = HashMap::new();
    for b in bind {
        let (name, value) = b.split_once('=').ok_or_else(|| {
            CliError::Parse(superpull::Error::Parse { position: 0, message: format!("expected `name=value` in `{b}`") })
        })?;
        let v = parse_superscalar(value, &plain)?;
        let mut n = NumericGrassmann::zero();
        for (m, c) in v.terms() {
            n.add_term(m.gens, to_f64(c));
        }
        out.insert(name.trim().to_string(), n);
    }
    Ok(out)
}

pub fn run(request: &Request) -> CliResult<Response> {
    let ctx = &request.context;
    let gens = generator_set(ctx)?;
    let mut resp = Response::default();
    match &request.command {
        Command::Pullback { fields, f, poly } => {
            let extra: Vec<(String, usize)> = f.iter().map(|n| (n.clone(), fields.len())).collect();
            let table = symbol_table(ctx, gens, &extra)?;
            let sf = superfield(fields, &table)?;
            let result = match (f, poly) {
                (Some(name), None) => pullback_taylor(&Function::new(name, sf.dim()), &sf)?,
                (None, Some(p)) => pullback_polynomial(&parse_target_poly(p, sf.dim())?, &sf)?,
                _ => return Err(CliError::Context("pullback needs exactly one of --f or --poly".into())),
            };
            resp.sections.push(super_section("", &result, gens));
        }
        Command::ExpExpand { xi, f } => {
            let table = symbol_table(ctx, gens, &[])?;
            let xi = parse_xi(xi, &table)?;
            let result = exp_xi_apply(&xi, &Function::new(f, xi.dim().max(1)))?;
            resp.sections.push(super_section("", &result, gens));
        }
        Command::Reconstruct { fields } => {
            let table = symbol_table(ctx, gens, &[])?;
            let sf = superfield(fields, &table)?;
            let xi = reconstruct_xi(&sf)?;
            for (a, b) in sf.bodies().iter().enumerate() {
                resp.sections.push(super_section(&format!("body[{}]", a + 1), b, gens));
            }
            for (k, coeffs) in xi.iter() {
                for (a, c) in coeffs.iter().enumerate() {
                    resp.sections.push(super_section(&format!("xi{k}[{}]", a + 1), c, gens));
                }
            }
        }
        Command::Berezin { vars, expr } => {
            let table = symbol_table(ctx, gens, &[])?;
            let vars = parse_index_list(vars)?;
            if !gens.admits(vars) {
                return Err(CliError::Context(format!("variables {vars} outside the generator context")));
            }
            let a = parse_superscalar(expr, &table)?;
            resp.sections.push(super_section("", &berezin(&a, vars), gens));
        }
        Command::Dop { index, poly } => {
            let dctx = DOperatorContext::new(gens);
            let i = even_index(index, gens)?;
            let p = parse_spoly(poly, gens)?;
            resp.sections.push(rational_section("", &dctx.d_op(i, &p), gens));
        }
        Command::IdealCheck { poly } => {
            let dctx = DOperatorContext::new(gens);
            let p = parse_spoly(poly, gens)?;
            resp.verdict = Some(dctx.ideal_member(&p));
        }
        Command::ChainCheck { index, poly, y } => {
            let dctx = DOperatorContext::new(gens);
            let i = even_index(index, gens)?;
            let ys = y.iter().map(|s| parse_spoly(s, gens)).collect::<superpull::Result<Vec<SPolynomial>>>()?;
            let f = parse_target_poly(poly, ys.len())?;
            let (lhs, rhs) = dctx.chain_rule_check(&f, &ys, i)?;
            resp.sections.push(rational_section("lhs", &lhs, gens));
            resp.sections.push(rational_section("rhs", &rhs, gens));
            resp.verdict = Some(lhs == rhs);
        }
        Command::TqCheck { s } => {
            let dctx = DOperatorContext::new(gens);
            if s.len() != dctx.positive().len() {
                let order: Vec<String> = dctx.positive().iter().map(|i| i.to_string()).collect();
                return Err(CliError::Context(format!(
                    "expected {} components ordered as {}, found {}",
                    order.len(),
                    order.join(" "),
                    s.len()
                )));
            }
            let comps = s.iter().map(|c| parse_spoly(c, gens)).collect::<superpull::Result<Vec<_>>>()?;
            resp.verdict = Some(dctx.tq_member(&SMap::new(comps)));
        }
        Command::Iso { poly } => {
            let dctx = DOperatorContext::new(gens);
            let p = parse_spoly(poly, gens)?;
            resp.sections.push(super_section("", &dctx.iso_to_grassmann(&p), gens));
        }
        Command::OracleCompare { fields, f, bind } => {
            let table = symbol_table(ctx, gens, &[("f".to_string(), fields.len())])?;
            let sf = superfield(fields, &table)?;
            let smooth = SmoothFn::parse(f, sf.dim())?;
            let bindings = parse_bindings(bind, gens)?;
            let (symbolic, numeric) = cross_check(&sf, "f", &smooth, &bindings)?;
            resp.sections.push(numeric_section("symbolic", &symbolic, ctx.q));
            resp.sections.push(numeric_section("numeric", &numeric, ctx.q));
            let ok = agrees(&symbolic, &numeric);
            if let Some((m, a, b)) = first_disagreement(&symbolic, &numeric) {
                resp.diagnostics.push(format!("coefficient {m}: symbolic {a:e}, numeric {b:e}"));
            }
            resp.verdict = Some(ok);
        }
    }
    Ok(resp)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx(q: usize) -> Context {
        Context { q, ..Context::default() }
    }

    #[test]
    fn ideal_check_verdict() {
        let r = run(&Request {
            context: ctx(4),
            command: Command::IdealCheck { poly: "s{1,2}*s{3,4} - s{1,2,3,4}".into() },
        })
        .unwrap();
        assert_eq!(r.verdict, Some(true));
        assert_eq!(r.to_text(), "true\n");
    }

    #[test]
    fn error_classes() {
        let bad_parse = run(&Request { context: ctx(2), command: Command::Iso { poly: "s{1,2} +".into() } });
        assert_eq!(bad_parse.unwrap_err().exit_code(), 2);
        let bad_ctx = run(&Request { context: ctx(2), command: Command::TqCheck { s: vec!["s{1,2}".into(); 2] } });
        assert_eq!(bad_ctx.unwrap_err().exit_code(), 3);
        let odd = Context { odd: vec!["psi".into()], ..ctx(2) };
        let bad_sem = run(&Request { context: odd, command: Command::Reconstruct { fields: vec!["psi".into()] } });
        assert_eq!(bad_sem.unwrap_err().exit_code(), 3);
    }

    #[test]
    fn json_records_carry_terms() {
        let r = run(&Request { context: ctx(2), command: Command::Iso { poly: "2*s{1,2}".into() } }).unwrap();
        let line = r.to_json_lines();
        let v: serde_json::Value = serde_json::from_str(line.trim()).unwrap();
        assert_eq!(v["gens"], serde_json::json!([1, 2]));
        assert_eq!(v["coeff"], "2");
    }
}
