//! Language bias: which predicates may appear, how their arguments are
//! typed and directed, and the size limits of the hypothesis space.

use crate::error::{Error, Result};
use crate::kernel::{Clause, Term, Theory, Var};
use crate::library::DefKey;
use crate::parse::{parse_items, Ast};
use crate::symbol::Symbol;
use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Dir {
    In,
    Out,
}

/// A predicate by name and first-order arity.
pub type PredKey = (Symbol, usize);

#[derive(Clone, Debug, PartialEq)]
pub struct BiasSpec {
    pub head_pred: PredKey,
    pub body_preds: BTreeSet<PredKey>,
    pub types: BTreeMap<PredKey, Vec<Symbol>>,
    pub directions: BTreeMap<PredKey, Vec<Dir>>,
    pub max_vars: usize,
    pub max_body: usize,
    pub max_clauses: usize,
    pub enable_recursion: bool,
    pub enable_ho_recursion: bool,
    pub non_datalog: bool,
    pub allow_singletons: bool,
}

impl BiasSpec {
    pub fn new(head: &str, arity: usize) -> BiasSpec {
        BiasSpec {
            head_pred: (Symbol::intern(head), arity),
            body_preds: BTreeSet::new(),
            types: BTreeMap::new(),
            directions: BTreeMap::new(),
            max_vars: 6,
            max_body: 6,
            max_clauses: 1,
            enable_recursion: false,
            enable_ho_recursion: false,
            non_datalog: false,
            allow_singletons: false,
        }
    }

    pub fn with_body(mut self, name: &str, arity: usize) -> BiasSpec {
        self.body_preds.insert((Symbol::intern(name), arity));
        self
    }

    pub fn with_limits(mut self, vars: usize, body: usize, clauses: usize) -> BiasSpec {
        self.max_vars = vars;
        self.max_body = body;
        self.max_clauses = clauses;
        self
    }

    pub fn head_symbol(&self) -> Symbol {
        self.head_pred.0
    }

    /// Parses a bias file.
    pub fn parse(text: &str) -> Result<BiasSpec> {
        let mut head = None;
        let mut b = BiasSpec::new("_", 0);
        for item in parse_items(text)? {
            let err = |msg: String| Error::parse(item.line, item.col, msg);
            if !item.body.is_empty() {
                return Err(err("bias directives cannot have bodies".into()));
            }
            let name = item
                .head
                .name()
                .ok_or_else(|| err("expected a directive".into()))?;
            let args = item.head.args();
            let int_arg = || match args {
                [Ast::Int(n)] if *n > 0 => Ok(*n as usize),
                _ => Err(err(format!("{name} expects one positive integer"))),
            };
            let name_arity = || match args {
                [Ast::Name(n, e), Ast::Int(a)] if e.is_empty() && *a >= 0 => {
                    Ok((Symbol::intern(n), *a as usize))
                }
                _ => Err(err(format!("{name} expects (name, arity)"))),
            };
            let name_tuple = || match args {
                [Ast::Name(n, e), t] if e.is_empty() => {
                    let items = t
                        .tuple_items()
                        .into_iter()
                        .map(|x| match x {
                            Ast::Name(v, e) if e.is_empty() => Ok(v.clone()),
                            _ => Err(err(format!("{name}: expected a tuple of names"))),
                        })
                        .collect::<Result<Vec<_>>>()?;
                    Ok((Symbol::intern(n), items))
                }
                _ => Err(err(format!("{name} expects (name, (..))"))),
            };
            match name {
                "head_pred" => {
                    if head.is_some() {
                        return Err(err("head_pred declared twice".into()));
                    }
                    head = Some(name_arity()?);
                }
                "body_pred" => {
                    b.body_preds.insert(name_arity()?);
                }
                "type" => {
                    let (p, ts) = name_tuple()?;
                    let ts: Vec<Symbol> = ts.iter().map(|t| Symbol::intern(t)).collect();
                    let key = (p, ts.len());
                    if let Some(prev) = b.types.get(&key) {
                        if *prev != ts {
                            return Err(err(format!("conflicting types for {}/{}", p, ts.len())));
                        }
                    }
                    b.types.insert(key, ts);
                }
                "direction" => {
                    let (p, ds) = name_tuple()?;
                    let ds = ds
                        .iter()
                        .map(|d| match d.as_str() {
                            "in" => Ok(Dir::In),
                            "out" => Ok(Dir::Out),
                            other => Err(err(format!("unknown direction {other}"))),
                        })
                        .collect::<Result<Vec<_>>>()?;
                    let key = (p, ds.len());
                    if let Some(prev) = b.directions.get(&key) {
                        if *prev != ds {
                            return Err(err(format!("conflicting directions for {}/{}", p, ds.len())));
                        }
                    }
                    b.directions.insert(key, ds);
                }
                "max_vars" => b.max_vars = int_arg()?,
                "max_body" => b.max_body = int_arg()?,
                "max_clauses" | "max_clause" => b.max_clauses = int_arg()?,
                "enable_recursion" => b.enable_recursion = true,
                "enable_ho_recursion" => b.enable_ho_recursion = true,
                "non_datalog" => b.non_datalog = true,
                "allow_singletons" => b.allow_singletons = true,
                other => return Err(err(format!("unknown directive {other}"))),
            }
        }
        b.head_pred = head.ok_or_else(|| Error::Bias("head_pred is required".into()))?;
        b.check_arities()?;
        Ok(b)
    }

    /// A type or direction declared for a name that is declared as a
    /// predicate only at other arities is an arity mismatch.
    fn check_arities(&self) -> Result<()> {
        let mut declared: HashMap<Symbol, BTreeSet<usize>> = HashMap::new();
        for (n, a) in self.body_preds.iter().chain(std::iter::once(&self.head_pred)) {
            declared.entry(*n).or_default().insert(*a);
        }
        for (n, a) in self.types.keys().chain(self.directions.keys()) {
            if let Some(arities) = declared.get(n) {
                if !arities.contains(a) {
                    return Err(Error::Bias(format!(
                        "{n}: declaration has {a} arguments, predicate is declared with {:?}",
                        arities
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let (h, a) = self.head_pred;
        out.push_str(&format!("head_pred({h},{a}).\n"));
        for (n, a) in &self.body_preds {
            out.push_str(&format!("body_pred({n},{a}).\n"));
        }
        for ((n, _), ts) in &self.types {
            let ts: Vec<&str> = ts.iter().map(|t| t.as_str()).collect();
            out.push_str(&format!("type({n},({})).\n", ts.join(",")));
        }
        for ((n, _), ds) in &self.directions {
            let ds: Vec<&str> = ds
                .iter()
                .map(|d| if *d == Dir::In { "in" } else { "out" })
                .collect();
            out.push_str(&format!("direction({n},({})).\n", ds.join(",")));
        }
        out.push_str(&format!(
            "max_vars({}).\nmax_body({}).\nmax_clauses({}).\n",
            self.max_vars, self.max_body, self.max_clauses
        ));
        for (on, name) in [
            (self.enable_recursion, "enable_recursion"),
            (self.enable_ho_recursion, "enable_ho_recursion"),
            (self.non_datalog, "non_datalog"),
            (self.allow_singletons, "allow_singletons"),
        ] {
            if on {
                out.push_str(name);
                out.push_str(".\n");
            }
        }
        out
    }
}

/// How the symbols of a principal program relate to the library: instance
/// symbols stand for a definition, invented symbols fill one of its slots.
#[derive(Clone, Debug, Default)]
pub struct HoContext {
    pub instances: HashMap<Symbol, DefKey>,
    /// Invented symbol to the declaration key of its slot (`fold_p`, arity).
    pub invented: HashMap<Symbol, PredKey>,
}

impl HoContext {
    /// Key under which types and directions of `sym/arity` are declared.
    pub fn decl_key(&self, sym: Symbol, arity: usize) -> PredKey {
        if let Some(d) = self.instances.get(&sym) {
            return (d.name, d.fo);
        }
        if let Some(k) = self.invented.get(&sym) {
            return *k;
        }
        (sym, arity)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BiasViolation {
    /// Clause index, or `None` for program-level rules.
    pub clause: Option<usize>,
    pub rule: &'static str,
}

impl fmt::Display for BiasViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.clause {
            Some(i) => write!(f, "clause {i}: {}", self.rule),
            None => write!(f, "{}", self.rule),
        }
    }
}

fn var_of(t: &Term) -> Option<Var> {
    match t {
        Term::Var(v) => Some(*v),
        _ => None,
    }
}

/// A body order in which every `in` argument is bound when its literal is
/// reached, starting from the head's `in` arguments. Heads without declared
/// directions count as fully bound; an invented head uses the directions
/// declared for its slot, if any. Literals of predicates without declared
/// directions are unconstrained.
pub fn direction_order(c: &Clause, b: &BiasSpec, ctx: &HoContext) -> Option<Vec<usize>> {
    let mut bound: BTreeSet<Var> = BTreeSet::new();
    let head_sym = c.head.symbol()?;
    let head_key = ctx.decl_key(head_sym, c.head.args.len());
    match b.directions.get(&head_key) {
        Some(ds) => {
            for (t, d) in c.head.args.iter().zip(ds) {
                if *d == Dir::In {
                    let mut vs = Vec::new();
                    t.collect_vars(&mut vs);
                    bound.extend(vs);
                }
            }
        }
        _ => {
            bound.extend(c.head.args.iter().filter_map(var_of));
        }
    }
    let mut order = Vec::with_capacity(c.body.len());
    let mut done = vec![false; c.body.len()];
    while order.len() < c.body.len() {
        let mut progressed = false;
        for (i, l) in c.body.iter().enumerate() {
            if done[i] {
                continue;
            }
            let dirs = l
                .atom
                .symbol()
                .and_then(|s| b.directions.get(&ctx.decl_key(s, l.atom.args.len())));
            let ready = match dirs {
                Some(ds) if l.positive => l.atom.args.iter().zip(ds).all(|(t, d)| {
                    *d == Dir::Out || {
                        let mut vs = Vec::new();
                        t.collect_vars(&mut vs);
                        vs.iter().all(|v| bound.contains(v))
                    }
                }),
                // Negated literals must be fully bound.
                _ if !l.positive => {
                    let mut vs = Vec::new();
                    l.atom.collect_vars(&mut vs);
                    vs.iter().all(|v| bound.contains(v))
                }
                _ => true,
            };
            if ready {
                done[i] = true;
                order.push(i);
                if l.positive {
                    let mut vs = Vec::new();
                    l.atom.collect_vars(&mut vs);
                    bound.extend(vs);
                }
                progressed = true;
            }
        }
        if !progressed {
            return None;
        }
    }
    Some(order)
}

/// Checks the type assignment of one clause: every variable gets at most
/// one type across all typed positions it occupies.
pub fn types_consistent(c: &Clause, b: &BiasSpec, ctx: &HoContext) -> bool {
    let mut assigned: HashMap<Var, Symbol> = HashMap::new();
    let atoms = std::iter::once(&c.head).chain(c.body.iter().map(|l| &l.atom));
    for a in atoms {
        let Some(sym) = a.symbol() else { continue };
        let Some(ts) = b.types.get(&ctx.decl_key(sym, a.args.len())) else {
            continue;
        };
        for (t, ty) in a.args.iter().zip(ts) {
            if let Some(v) = var_of(t) {
                if let Some(prev) = assigned.insert(v, *ty) {
                    if prev != *ty {
                        return false;
                    }
                }
            }
        }
    }
    true
}

/// Checks a candidate principal program against the bias, collecting every
/// violation.
pub fn well_formed(t: &Theory, b: &BiasSpec) -> Vec<BiasViolation> {
    well_formed_with(t, b, &HoContext::default())
}

pub fn well_formed_with(t: &Theory, b: &BiasSpec, ctx: &HoContext) -> Vec<BiasViolation> {
    let mut out = Vec::new();
    if t.len() > b.max_clauses {
        out.push(BiasViolation {
            clause: None,
            rule: "max_clauses",
        });
    }
    let main = b.head_symbol();
    for (i, c) in t.clauses.iter().enumerate() {
        let mut bad = |rule| {
            out.push(BiasViolation {
                clause: Some(i),
                rule,
            })
        };
        if c.body.len() > b.max_body {
            bad("max_body");
        }
        if c.body.is_empty() {
            bad("empty_body");
        }
        let vars = c.vars();
        if vars.len() > b.max_vars {
            bad("max_vars");
        }
        let head_sym = c.head.symbol();
        let head_ok = match head_sym {
            Some(s) if s == main => c.head.args.len() == b.head_pred.1,
            Some(s) => ctx.invented.contains_key(&s),
            None => false,
        };
        if !head_ok || !c.head.ho_args.is_empty() {
            bad("head_declared");
        }
        for l in &c.body {
            let Some(s) = l.atom.symbol() else {
                bad("body_declared");
                continue;
            };
            let arity = l.atom.args.len();
            if s == main && arity == b.head_pred.1 {
                if !b.enable_recursion {
                    bad("recursion");
                }
            } else if let Some(d) = ctx.instances.get(&s) {
                if !b.body_preds.contains(&(d.name, d.fo)) {
                    bad("body_declared");
                }
            } else if ctx.invented.contains_key(&s) {
                if !b.enable_ho_recursion {
                    bad("ho_recursion");
                }
            } else if !b.body_preds.contains(&(s, arity)) || !l.atom.ho_args.is_empty() {
                bad("body_declared");
            }
        }
        if !types_consistent(c, b, ctx) {
            bad("types");
        }
        if direction_order(c, b, ctx).is_none() {
            bad("directions");
        }
        if !b.non_datalog {
            let mut body_vars = Vec::new();
            for l in &c.body {
                l.atom.collect_vars(&mut body_vars);
            }
            let mut head_vars = Vec::new();
            c.head.collect_vars(&mut head_vars);
            if head_vars.iter().any(|v| !body_vars.contains(v)) {
                bad("datalog");
            }
        }
        if !b.allow_singletons {
            let mut all = Vec::new();
            c.head.collect_vars(&mut all);
            for l in &c.body {
                l.atom.collect_vars(&mut all);
            }
            if vars.iter().any(|v| all.iter().filter(|w| *w == v).count() == 1) {
                bad("singleton");
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::parse_theory;

    #[test]
    fn parses_declarations() {
        let b = BiasSpec::parse(
            "head_pred(f,2). body_pred(head,2). type(head,(list,element)). direction(head,(in,out)).",
        )
        .unwrap();
        assert_eq!(b.body_preds.len(), 1);
        let key = (Symbol::intern("head"), 2);
        assert_eq!(b.types[&key].len(), 2);
        assert_eq!(b.directions[&key], vec![Dir::In, Dir::Out]);
    }

    #[test]
    fn empty_file_is_an_error() {
        assert!(BiasSpec::parse("").is_err());
    }

    #[test]
    fn conflicting_types_are_an_error() {
        let r = BiasSpec::parse("head_pred(f,1). type(f,(list)). type(f,(int)).");
        assert!(r.is_err());
        let r = BiasSpec::parse("head_pred(f,1). body_pred(g,2). type(g,(int)).");
        assert!(r.is_err());
    }

    #[test]
    fn unbound_input_is_a_direction_violation() {
        let b = BiasSpec::parse(
            "head_pred(p,2). body_pred(head,2). direction(p,(in,out)). direction(head,(in,out)).
             allow_singletons. non_datalog.",
        )
        .unwrap();
        let t = parse_theory("p(A,B) :- head(C,B).").unwrap();
        let v = well_formed(&t, &b);
        assert_eq!(v.len(), 1);
        assert_eq!(v[0].rule, "directions");
        let t = parse_theory("p(A,B) :- head(A,B).").unwrap();
        assert!(well_formed(&t, &b).is_empty());
    }

    #[test]
    fn limits_and_switches() {
        let b = BiasSpec::new("p", 1).with_body("q", 1).with_body("r", 2).with_limits(2, 1, 1);
        assert!(well_formed(&parse_theory("p(A) :- q(A).").unwrap(), &b).is_empty());
        let two = parse_theory("p(A) :- r(A,B).").unwrap();
        assert_eq!(well_formed(&two, &b)[0].rule, "singleton");
        let rec = parse_theory("p(A) :- p(A).").unwrap();
        assert_eq!(well_formed(&rec, &b)[0].rule, "recursion");
        let undeclared = parse_theory("p(A) :- s(A).").unwrap();
        assert_eq!(well_formed(&undeclared, &b)[0].rule, "body_declared");
    }
}
