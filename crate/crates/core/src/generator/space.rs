//! The instance catalog and the per-head clause universes.

use crate::bias::{direction_order, well_formed_with, BiasSpec, HoContext, PredKey};
use crate::kernel::canonical_clause;
use crate::kernel::{Atom, Clause, Literal, Pred, Term, Theory, Var};
use crate::library::{instance_symbol, slot_symbol, DefKey, HODefinition, Instance, Library};
use crate::symbol::Symbol;
use std::collections::{HashMap, HashSet};
use std::time::Instant;

/// One usable instance of a library definition; its higher-order arguments
/// are invented slot predicates.
#[derive(Clone, Debug)]
pub struct InstanceInfo {
    pub symbol: Symbol,
    pub instance: Instance,
    /// Slot symbols and their first-order arities, one per HO argument.
    pub slots: Vec<(Symbol, usize)>,
    /// Generic slot keys (`fold_p`, arity) the bias declares types under.
    pub generic: Vec<PredKey>,
    /// 1-based number in the symbol, shared by definitions of one name.
    pub k: usize,
    /// 1-based number among the instances of the same definition.
    pub nth: usize,
    pub def: DefKey,
}

#[derive(Clone, Debug, Default)]
pub struct Catalog {
    pub instances: Vec<InstanceInfo>,
    pub ctx: HoContext,
    by_symbol: HashMap<Symbol, usize>,
    slot_owner: HashMap<Symbol, (usize, usize)>,
}

/// First-order arity of each higher-order argument, read off the calls the
/// definition makes through it.
pub fn slot_arities(d: &HODefinition) -> Vec<Option<usize>> {
    let mut out = vec![None; d.ho_arity];
    for c in &d.clauses {
        for (i, p) in c.head.ho_args.iter().enumerate() {
            let Pred::Var(v) = p else { continue };
            for l in &c.body {
                if l.atom.pred == Pred::Var(*v) && out[i].is_none() {
                    out[i] = Some(l.atom.args.len());
                }
            }
        }
    }
    out
}

impl Catalog {
    pub fn build(bias: &BiasSpec, lib: &Library) -> Catalog {
        let mut cat = Catalog::default();
        let mut per_name: HashMap<Symbol, usize> = HashMap::new();
        for d in lib.definitions() {
            if !bias.body_preds.contains(&(d.name, d.fo_arity)) {
                continue;
            }
            let arities: Option<Vec<usize>> = slot_arities(d).into_iter().collect();
            let Some(arities) = arities else { continue };
            let copies = bias.max_clauses.saturating_sub(1) / d.ho_arity.max(1);
            let names = d.slot_names();
            for nth in 1..=copies {
                let k = {
                    let n = per_name.entry(d.name).or_insert(0);
                    *n += 1;
                    *n
                };
                let slots: Vec<(Symbol, usize)> = names
                    .iter()
                    .zip(&arities)
                    .map(|(s, a)| (slot_symbol(d.name, s, k), *a))
                    .collect();
                let generic: Vec<PredKey> = names
                    .iter()
                    .zip(&arities)
                    .map(|(s, a)| (Symbol::intern(&format!("{}_{s}", d.name)), *a))
                    .collect();
                let symbol = instance_symbol(d.name, k);
                let idx = cat.instances.len();
                cat.by_symbol.insert(symbol, idx);
                cat.ctx.instances.insert(symbol, d.key());
                for (j, ((s, _), g)) in slots.iter().zip(&generic).enumerate() {
                    cat.ctx.invented.insert(*s, *g);
                    cat.ctx.invented.insert(g.0, *g);
                    cat.slot_owner.insert(*s, (idx, j));
                }
                cat.instances.push(InstanceInfo {
                    symbol,
                    instance: Instance {
                        def: d.key(),
                        ho_args: slots.iter().map(|s| s.0).collect(),
                    },
                    slots,
                    generic,
                    k,
                    nth,
                    def: d.key(),
                });
            }
        }
        cat
    }

    pub fn instance_of(&self, sym: Symbol) -> Option<usize> {
        self.by_symbol.get(&sym).copied()
    }

    /// Instance and slot position owning a slot symbol.
    pub fn slot_owner(&self, sym: Symbol) -> Option<(usize, usize)> {
        self.slot_owner.get(&sym).copied()
    }

    /// The connector clauses of every catalogued instance.
    pub fn connectors(&self) -> Theory {
        self.instances
            .iter()
            .map(|i| i.instance.connector(i.symbol))
            .collect()
    }
}

/// A predicate that may appear in a clause body.
#[derive(Clone, Debug)]
struct LitSpec {
    symbol: Symbol,
    arity: usize,
    types: Option<Vec<Symbol>>,
}

/// A body literal packed as its vocabulary index followed by argument
/// variables; unused argument slots hold `NONE`.
type Packed = [u8; 8];

const NONE: u8 = u8::MAX;
const MAX_ARITY: usize = 7;

/// Canonical clauses for one head, grown one body length at a time.
pub struct Universe {
    pub head: Atom,
    vocab: Vec<LitSpec>,
    /// Types of the head variables.
    head_types: Vec<Option<Symbol>>,
    /// `raw[l]`: canonical type-consistent bodies with `l` literals, packed.
    raw: Vec<Vec<Box<[Packed]>>>,
    /// `valid[l]`: the clauses of `raw[l]` that pass the clause-level bias.
    pub valid: Vec<Vec<Clause>>,
}

fn types_of(bias: &BiasSpec, ctx: &HoContext, sym: Symbol, arity: usize) -> Option<Vec<Symbol>> {
    bias.types.get(&ctx.decl_key(sym, arity)).cloned()
}

impl Universe {
    /// `head_sym` is the main head or a generic slot symbol.
    pub fn new(head_sym: Symbol, arity: usize, bias: &BiasSpec, cat: &Catalog) -> Universe {
        let ctx = &cat.ctx;
        let head = Atom {
            pred: Pred::Sym(head_sym),
            ho_args: Vec::new(),
            args: (0..arity as u32).map(|i| Term::Var(Var(i))).collect(),
        };
        let main = bias.head_pred;
        let mut vocab = Vec::new();
        let lib_names: HashSet<PredKey> =
            cat.instances.iter().map(|i| (i.def.name, i.def.fo)).collect();
        for &(s, a) in &bias.body_preds {
            if lib_names.contains(&(s, a)) || (s, a) == main {
                continue;
            }
            vocab.push(LitSpec {
                symbol: s,
                arity: a,
                types: types_of(bias, ctx, s, a),
            });
        }
        for i in &cat.instances {
            vocab.push(LitSpec {
                symbol: i.symbol,
                arity: i.def.fo,
                types: types_of(bias, ctx, i.symbol, i.def.fo),
            });
        }
        if bias.enable_recursion {
            vocab.push(LitSpec {
                symbol: main.0,
                arity: main.1,
                types: types_of(bias, ctx, main.0, main.1),
            });
        }
        if bias.enable_ho_recursion {
            for i in &cat.instances {
                for &(s, a) in &i.slots {
                    vocab.push(LitSpec {
                        symbol: s,
                        arity: a,
                        types: types_of(bias, ctx, s, a),
                    });
                }
            }
        }
        vocab.retain(|v| v.arity <= MAX_ARITY);
        let head_types = match types_of(bias, ctx, head_sym, arity) {
            Some(ts) => ts.into_iter().map(Some).collect(),
            None => vec![None; arity],
        };
        let start = Clause::fact(head.clone());
        let mut u = Universe {
            head,
            vocab,
            head_types,
            raw: vec![vec![Box::from([])]],
            valid: vec![Vec::new()],
        };
        if clause_ok(&start, bias, ctx) {
            u.valid[0].push(start);
        }
        u
    }

    pub fn levels(&self) -> usize {
        self.raw.len()
    }

    /// Grows the universe until it holds clauses with `len` body literals.
    /// Returns false, leaving the last level unbuilt, if `deadline` passes
    /// or a level would exceed `RAW_LIMIT` clauses.
    pub fn grow_to(&mut self, len: usize, bias: &BiasSpec, ctx: &HoContext, deadline: Option<Instant>) -> bool {
        let h = self.head.args.len() as u8;
        let self_call = self
            .vocab
            .iter()
            .position(|v| Pred::Sym(v.symbol) == self.head.pred && v.arity == h as usize);
        while self.raw.len() <= len.min(bias.max_body) {
            let l = self.raw.len();
            let mut seen: HashSet<Box<[Packed]>> = HashSet::new();
            for (n, body) in self.raw[l - 1].iter().enumerate() {
                if n % 256 == 255 && (deadline.is_some_and(|d| Instant::now() >= d) || seen.len() > RAW_LIMIT) {
                    return false;
                }
                let typing = self.var_types(body);
                let nvars = typing.len() as u32;
                for (si, spec) in self.vocab.iter().enumerate() {
                    for args in arg_tuples(spec, nvars, bias.max_vars as u32, &typing) {
                        let mut lit = [NONE; 8];
                        lit[0] = si as u8;
                        for (slot, v) in lit[1..].iter_mut().zip(&args) {
                            *slot = *v as u8;
                        }
                        let is_head = self_call == Some(si) && args.iter().enumerate().all(|(i, v)| *v == i as u32);
                        if is_head || body.contains(&lit) {
                            continue;
                        }
                        let mut next = body.to_vec();
                        next.push(lit);
                        seen.insert(canonical_packed(next, h));
                    }
                }
            }
            let mut next: Vec<Box<[Packed]>> = seen.into_iter().collect();
            next.sort();
            let mut valid = Vec::new();
            for (n, b) in next.iter().enumerate() {
                if n % 4096 == 4095 && deadline.is_some_and(|d| Instant::now() >= d) {
                    return false;
                }
                if !quick_ok(b, h, bias) {
                    continue;
                }
                let c = self.unpack(b);
                if clause_ok(&c, bias, ctx) {
                    valid.push(canonical_clause(&c));
                }
            }
            self.raw.push(next);
            self.valid.push(valid);
        }
        true
    }

    fn unpack(&self, body: &[Packed]) -> Clause {
        let lits = body
            .iter()
            .map(|p| {
                let spec = &self.vocab[p[0] as usize];
                Literal::pos(Atom {
                    pred: Pred::Sym(spec.symbol),
                    ho_args: Vec::new(),
                    args: p[1..=spec.arity].iter().map(|v| Term::Var(Var(*v as u32))).collect(),
                })
            })
            .collect();
        Clause::new(self.head.clone(), lits)
    }

    /// Type of every variable of a body, indexed by variable; untyped
    /// variables map to `None`.
    fn var_types(&self, body: &[Packed]) -> Vec<Option<Symbol>> {
        let mut out = self.head_types.clone();
        for p in body {
            let spec = &self.vocab[p[0] as usize];
            for (i, v) in p[1..=spec.arity].iter().enumerate() {
                let v = *v as usize;
                if out.len() <= v {
                    out.resize(v + 1, None);
                }
                if out[v].is_none() {
                    out[v] = spec.types.as_ref().map(|t| t[i]);
                }
            }
        }
        out
    }
}

/// Most bodies one level may hold.
pub const RAW_LIMIT: usize = 4_000_000;

/// Least packed body over all renamings of the body-only variables
/// (numbered from `h` up), with literals sorted.
fn canonical_packed(body: Vec<Packed>, h: u8) -> Box<[Packed]> {
    let n = body
        .iter()
        .flat_map(|p| p[1..].iter().copied().filter(|v| *v != NONE))
        .max()
        .map_or(h, |m| (m + 1).max(h));
    let free = (n - h) as usize;
    let mut perm: Vec<u8> = (0..free as u8).collect();
    let mut best: Option<Vec<Packed>> = None;
    let mut cur = body.clone();
    loop {
        for (dst, src) in cur.iter_mut().zip(&body) {
            dst[0] = src[0];
            for (d, s) in dst[1..].iter_mut().zip(&src[1..]) {
                *d = if *s == NONE || *s < h { *s } else { h + perm[(*s - h) as usize] };
            }
        }
        cur.sort_unstable();
        if best.as_ref().is_none_or(|b| cur < *b) {
            best = Some(cur.clone());
        }
        if !next_perm(&mut perm) {
            break;
        }
    }
    best.unwrap_or(body).into_boxed_slice()
}

fn next_perm(p: &mut [u8]) -> bool {
    if p.len() < 2 {
        return false;
    }
    let mut i = p.len() - 1;
    while i > 0 && p[i - 1] >= p[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = p.len() - 1;
    while p[j] <= p[i - 1] {
        j -= 1;
    }
    p.swap(i - 1, j);
    p[i..].reverse();
    true
}

/// The singleton and datalog rules on a packed body: a cheap filter
/// rejecting only clauses `clause_ok` rejects too.
fn quick_ok(body: &[Packed], h: u8, bias: &BiasSpec) -> bool {
    let mut count = [0u8; 256];
    for p in body {
        for v in p[1..].iter().filter(|v| **v != NONE) {
            count[*v as usize] = count[*v as usize].saturating_add(1);
        }
    }
    if !bias.non_datalog && count[..h as usize].contains(&0) {
        return false;
    }
    if !bias.allow_singletons {
        let head_once = count[..h as usize].contains(&0);
        let body_once = count[h as usize..].contains(&1);
        if head_once || body_once {
            return false;
        }
    }
    true
}

fn clause_ok(c: &Clause, bias: &BiasSpec, ctx: &HoContext) -> bool {
    let t = Theory::new(vec![c.clone()]);
    well_formed_with(&t, bias, ctx).is_empty()
}

/// Injective argument tuples over the existing variables and fresh ones
/// introduced in order, respecting declared types.
fn arg_tuples(spec: &LitSpec, nvars: u32, max_vars: u32, typing: &[Option<Symbol>]) -> Vec<Vec<u32>> {
    fn go(
        spec: &LitSpec,
        pos: usize,
        cur: &mut Vec<u32>,
        next_new: u32,
        max_vars: u32,
        typing: &[Option<Symbol>],
        out: &mut Vec<Vec<u32>>,
    ) {
        if pos == spec.arity {
            out.push(cur.clone());
            return;
        }
        let want = spec.types.as_ref().map(|t| t[pos]);
        let fits = |v: u32, cur: &[u32]| -> bool {
            if let Some(w) = want {
                if let Some(Some(t)) = typing.get(v as usize) {
                    if *t != w {
                        return false;
                    }
                }
                // A variable repeated at two positions of one literal is
                // excluded anyway, so no intra-literal typing is needed.
            }
            !cur.contains(&v)
        };
        for v in 0..next_new {
            if fits(v, cur) {
                cur.push(v);
                go(spec, pos + 1, cur, next_new, max_vars, typing, out);
                cur.pop();
            }
        }
        if next_new < max_vars {
            cur.push(next_new);
            go(spec, pos + 1, cur, next_new + 1, max_vars, typing, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(spec, 0, &mut Vec::new(), nvars, max_vars, typing, &mut out);
    out
}

/// An execution order for a clause body: declared directions respected,
/// recursive calls and calls to invented predicates as late as possible.
pub fn exec_order(c: &Clause, bias: &BiasSpec, ctx: &HoContext) -> Option<Vec<usize>> {
    let late = |l: &Literal| {
        l.atom.symbol().is_some_and(|s| {
            s == bias.head_pred.0 || ctx.invented.contains_key(&s) || c.head.symbol() == Some(s)
        })
    };
    let mut perm: Vec<usize> = (0..c.body.len()).filter(|i| !late(&c.body[*i])).collect();
    perm.extend((0..c.body.len()).filter(|i| late(&c.body[*i])));
    let permuted = Clause::new(c.head.clone(), perm.iter().map(|i| c.body[*i].clone()).collect());
    let order = direction_order(&permuted, bias, ctx)?;
    Some(order.into_iter().map(|i| perm[i]).collect())
}
