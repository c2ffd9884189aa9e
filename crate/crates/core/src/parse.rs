//! Reader for the clause syntax used by task files.
//!
//! ```text
//! fold(#P,A,B,C) :- head(B,H), tail(B,T), #P(A,H,W), fold(#P,W,T,C).
//! f(A) :- \+ p(A), A = [x|T].
//! ```
//!
//! `#P` is a higher-order variable and `#_` an anonymous one. A higher-order
//! call may be written `#P(..)` or `call(#P,..)`. Leading `#`-arguments of an
//! atom are its higher-order arguments; leading symbol arguments are treated
//! as higher-order only when an [`HoSignature`] says so.

use crate::error::{Error, Result};
use crate::kernel::{Atom, Clause, HoVar, Literal, Pred, Term, Theory, Var};
use crate::symbol::Symbol;
use std::collections::HashMap;

/// Raw syntax tree, before variables are numbered.
#[derive(Clone, Debug, PartialEq)]
pub enum Ast {
    Var(String),
    HoVar(Option<String>),
    Int(i64),
    Name(String, Vec<Ast>),
    HoApp(Option<String>, Vec<Ast>),
    List(Vec<Ast>, Option<Box<Ast>>),
    Tuple(Vec<Ast>),
}

impl Ast {
    pub fn name(&self) -> Option<&str> {
        match self {
            Ast::Name(n, _) => Some(n),
            _ => None,
        }
    }

    pub fn args(&self) -> &[Ast] {
        match self {
            Ast::Name(_, a) | Ast::HoApp(_, a) | Ast::Tuple(a) => a,
            _ => &[],
        }
    }

    /// Flattens a parenthesized tuple; any other node is a one-element list.
    pub fn tuple_items(&self) -> Vec<&Ast> {
        match self {
            Ast::Tuple(items) => items.iter().collect(),
            other => vec![other],
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RawLiteral {
    pub positive: bool,
    pub atom: Ast,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Item {
    pub head: Ast,
    pub body: Vec<RawLiteral>,
    pub line: usize,
    pub col: usize,
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Name(String),
    Var(String),
    HoVar(Option<String>),
    Int(i64),
    Punct(&'static str),
}

struct Lexer<'a> {
    src: &'a [u8],
    pos: usize,
    line: usize,
    col: usize,
}

const PUNCT: &[&str] = &[
    ":-", "\\+", "\\=", ">=", "=<", "(", ")", "[", "]", "|", ",", ".", "=", "<", ">", "/",
];

impl<'a> Lexer<'a> {
    fn new(text: &'a str) -> Self {
        Lexer {
            src: text.as_bytes(),
            pos: 0,
            line: 1,
            col: 1,
        }
    }

    fn peek_byte(&self, off: usize) -> Option<u8> {
        self.src.get(self.pos + off).copied()
    }

    fn bump(&mut self) -> Option<u8> {
        let b = self.peek_byte(0)?;
        self.pos += 1;
        if b == b'\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        Some(b)
    }

    fn skip_trivia(&mut self) -> Result<()> {
        loop {
            match self.peek_byte(0) {
                Some(b) if b.is_ascii_whitespace() => {
                    self.bump();
                }
                Some(b'%') => {
                    while let Some(b) = self.bump() {
                        if b == b'\n' {
                            break;
                        }
                    }
                }
                Some(b'/') if self.peek_byte(1) == Some(b'*') => {
                    let (line, col) = (self.line, self.col);
                    self.bump();
                    self.bump();
                    loop {
                        match self.bump() {
                            Some(b'*') if self.peek_byte(0) == Some(b'/') => {
                                self.bump();
                                break;
                            }
                            Some(_) => {}
                            None => return Err(Error::parse(line, col, "unterminated comment")),
                        }
                    }
                }
                _ => return Ok(()),
            }
        }
    }

    fn ident(&mut self) -> String {
        let start = self.pos;
        while let Some(b) = self.peek_byte(0) {
            if b.is_ascii_alphanumeric() || b == b'_' {
                self.bump();
            } else {
                break;
            }
        }
        String::from_utf8_lossy(&self.src[start..self.pos]).into_owned()
    }

    fn next(&mut self, prev_allows_sign: bool) -> Result<Option<(Tok, usize, usize)>> {
        self.skip_trivia()?;
        let (line, col) = (self.line, self.col);
        let Some(b) = self.peek_byte(0) else {
            return Ok(None);
        };
        let tok = if b.is_ascii_lowercase() {
            Tok::Name(self.ident())
        } else if b.is_ascii_uppercase() || b == b'_' {
            Tok::Var(self.ident())
        } else if b == b'#' {
            self.bump();
            match self.peek_byte(0) {
                Some(c) if c.is_ascii_alphabetic() || c == b'_' => {
                    let name = self.ident();
                    Tok::HoVar(if name == "_" { None } else { Some(name) })
                }
                _ => return Err(Error::parse(line, col, "expected variable name after '#'")),
            }
        } else if b.is_ascii_digit()
            || (b == b'-' && prev_allows_sign && self.peek_byte(1).is_some_and(|c| c.is_ascii_digit()))
        {
            let start = self.pos;
            self.bump();
            while self.peek_byte(0).is_some_and(|c| c.is_ascii_digit()) {
                self.bump();
            }
            let text = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
            let v = text
                .parse::<i64>()
                .map_err(|e| Error::parse(line, col, e.to_string()))?;
            Tok::Int(v)
        } else if b == b'\'' {
            self.bump();
            let mut out = Vec::new();
            loop {
                match self.bump() {
                    Some(b'\\') => match self.bump() {
                        Some(c) => out.push(c),
                        None => break,
                    },
                    Some(b'\'') => break,
                    Some(c) => out.push(c),
                    None => return Err(Error::parse(line, col, "unterminated quoted atom")),
                }
            }
            Tok::Name(String::from_utf8_lossy(&out).into_owned())
        } else {
            let rest = &self.src[self.pos..];
            let Some(p) = PUNCT.iter().find(|p| rest.starts_with(p.as_bytes())) else {
                return Err(Error::parse(
                    line,
                    col,
                    format!("unexpected character '{}'", b as char),
                ));
            };
            for _ in 0..p.len() {
                self.bump();
            }
            Tok::Punct(p)
        };
        Ok(Some((tok, line, col)))
    }
}

struct Parser {
    toks: Vec<(Tok, usize, usize)>,
    pos: usize,
    eof: (usize, usize),
}

impl Parser {
    fn new(text: &str) -> Result<Parser> {
        let mut lx = Lexer::new(text);
        let mut toks: Vec<(Tok, usize, usize)> = Vec::new();
        loop {
            let allows_sign = match toks.last() {
                None => true,
                Some((Tok::Punct(p), _, _)) => *p != ")" && *p != "]",
                Some(_) => false,
            };
            match lx.next(allows_sign)? {
                Some(t) => toks.push(t),
                None => break,
            }
        }
        Ok(Parser {
            toks,
            pos: 0,
            eof: (lx.line, lx.col),
        })
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|t| &t.0)
    }

    fn here(&self) -> (usize, usize) {
        self.toks
            .get(self.pos)
            .map(|t| (t.1, t.2))
            .unwrap_or(self.eof)
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T> {
        let (l, c) = self.here();
        Err(Error::parse(l, c, msg))
    }

    fn is_punct(&self, p: &str) -> bool {
        matches!(self.peek(), Some(Tok::Punct(q)) if *q == p)
    }

    fn expect(&mut self, p: &str) -> Result<()> {
        if self.is_punct(p) {
            self.pos += 1;
            Ok(())
        } else {
            self.err(format!("expected '{p}'"))
        }
    }

    fn items(&mut self) -> Result<Vec<Item>> {
        let mut out = Vec::new();
        while self.peek().is_some() {
            out.push(self.item()?);
        }
        Ok(out)
    }

    fn item(&mut self) -> Result<Item> {
        let (line, col) = self.here();
        let head = self.term()?;
        let mut body = Vec::new();
        if self.is_punct(":-") {
            self.pos += 1;
            loop {
                body.push(self.literal()?);
                if self.is_punct(",") {
                    self.pos += 1;
                } else {
                    break;
                }
            }
        }
        self.expect(".")?;
        Ok(Item {
            head,
            body,
            line,
            col,
        })
    }

    fn literal(&mut self) -> Result<RawLiteral> {
        let positive = if self.is_punct("\\+") {
            self.pos += 1;
            false
        } else {
            true
        };
        let lhs = self.term()?;
        for op in ["=", "\\=", "<", ">", ">=", "=<"] {
            if self.is_punct(op) {
                self.pos += 1;
                let rhs = self.term()?;
                return Ok(RawLiteral {
                    positive,
                    atom: Ast::Name(op.to_string(), vec![lhs, rhs]),
                });
            }
        }
        Ok(RawLiteral {
            positive,
            atom: lhs,
        })
    }

    fn term(&mut self) -> Result<Ast> {
        let lhs = self.primary()?;
        if self.is_punct("/") {
            self.pos += 1;
            let rhs = self.primary()?;
            return Ok(Ast::Name("/".into(), vec![lhs, rhs]));
        }
        Ok(lhs)
    }

    fn arglist(&mut self) -> Result<Vec<Ast>> {
        self.expect("(")?;
        let mut args = vec![self.term()?];
        while self.is_punct(",") {
            self.pos += 1;
            args.push(self.term()?);
        }
        self.expect(")")?;
        Ok(args)
    }

    fn primary(&mut self) -> Result<Ast> {
        let Some((tok, _, _)) = self.toks.get(self.pos).cloned() else {
            return self.err("unexpected end of input");
        };
        self.pos += 1;
        match tok {
            Tok::Var(v) => Ok(Ast::Var(v)),
            Tok::Int(i) => Ok(Ast::Int(i)),
            Tok::HoVar(v) => {
                if self.is_punct("(") {
                    Ok(Ast::HoApp(v, self.arglist()?))
                } else {
                    Ok(Ast::HoVar(v))
                }
            }
            Tok::Name(n) => {
                if self.is_punct("(") {
                    Ok(Ast::Name(n, self.arglist()?))
                } else {
                    Ok(Ast::Name(n, Vec::new()))
                }
            }
            Tok::Punct("[") => {
                if self.is_punct("]") {
                    self.pos += 1;
                    return Ok(Ast::List(Vec::new(), None));
                }
                let mut items = vec![self.term()?];
                while self.is_punct(",") {
                    self.pos += 1;
                    items.push(self.term()?);
                }
                let tail = if self.is_punct("|") {
                    self.pos += 1;
                    Some(Box::new(self.term()?))
                } else {
                    None
                };
                self.expect("]")?;
                Ok(Ast::List(items, tail))
            }
            Tok::Punct("(") => {
                let mut items = vec![self.term()?];
                while self.is_punct(",") {
                    self.pos += 1;
                    items.push(self.term()?);
                }
                self.expect(")")?;
                Ok(if items.len() == 1 {
                    items.pop().unwrap()
                } else {
                    Ast::Tuple(items)
                })
            }
            Tok::Punct(p) => {
                self.pos -= 1;
                self.err(format!("unexpected '{p}'"))
            }
        }
    }
}

/// Parses text into raw items without interpreting them as clauses.
pub fn parse_items(text: &str) -> Result<Vec<Item>> {
    Parser::new(text)?.items()
}

/// Number of leading higher-order arguments for atoms whose symbol and total
/// arity appear in the map. A name may admit several splits (for example
/// `caseList` with three higher-order and two first-order arguments, or two
/// and three); the parser takes the largest one the argument list fits.
#[derive(Clone, Debug, Default)]
pub struct HoSignature {
    map: HashMap<(Symbol, usize), Vec<usize>>,
}

impl HoSignature {
    pub fn new() -> HoSignature {
        HoSignature::default()
    }

    pub fn insert(&mut self, name: Symbol, total_arity: usize, ho_arity: usize) {
        let e = self.map.entry((name, total_arity)).or_default();
        if !e.contains(&ho_arity) {
            e.push(ho_arity);
            e.sort_unstable_by(|a, b| b.cmp(a));
        }
    }

    pub fn ho_arities(&self, name: Symbol, total_arity: usize) -> &[usize] {
        self.map.get(&(name, total_arity)).map_or(&[], Vec::as_slice)
    }

    pub fn merge(&mut self, other: &HoSignature) {
        for ((n, a), ks) in &other.map {
            for k in ks {
                self.insert(*n, *a, *k);
            }
        }
    }
}

/// Per-clause variable naming state.
#[derive(Default)]
struct Scope {
    fo: HashMap<String, Var>,
    ho: HashMap<String, HoVar>,
    next_fo: u32,
    next_ho: u32,
}

impl Scope {
    fn fo(&mut self, name: &str) -> Var {
        if name == "_" {
            let v = Var(self.next_fo);
            self.next_fo += 1;
            return v;
        }
        if let Some(v) = self.fo.get(name) {
            return *v;
        }
        let v = Var(self.next_fo);
        self.next_fo += 1;
        self.fo.insert(name.to_string(), v);
        v
    }

    fn ho(&mut self, name: &Option<String>) -> HoVar {
        let fresh = |s: &mut Scope| {
            let v = HoVar(s.next_ho);
            s.next_ho += 1;
            v
        };
        match name {
            None => fresh(self),
            Some(n) => {
                if let Some(v) = self.ho.get(n) {
                    return *v;
                }
                let v = fresh(self);
                self.ho.insert(n.clone(), v);
                v
            }
        }
    }
}

pub struct Converter<'a> {
    sig: Option<&'a HoSignature>,
    line: usize,
    col: usize,
}

impl<'a> Converter<'a> {
    fn err<T>(&self, msg: impl Into<String>) -> Result<T> {
        Err(Error::parse(self.line, self.col, msg))
    }

    fn term(&self, ast: &Ast, sc: &mut Scope) -> Result<Term> {
        Ok(match ast {
            Ast::Var(v) => Term::Var(sc.fo(v)),
            Ast::Int(i) => Term::Int(*i),
            Ast::Name(n, args) if args.is_empty() => Term::Const(Symbol::intern(n)),
            Ast::Name(n, args) => Term::App(
                Symbol::intern(n),
                args.iter().map(|a| self.term(a, sc)).collect::<Result<_>>()?,
            ),
            Ast::List(items, tail) => {
                let elems = items
                    .iter()
                    .map(|a| self.term(a, sc))
                    .collect::<Result<Vec<_>>>()?;
                let mut acc = match tail {
                    Some(t) => self.term(t, sc)?,
                    None => Term::nil(),
                };
                for e in elems.into_iter().rev() {
                    acc = Term::cons(e, acc);
                }
                acc
            }
            Ast::Tuple(items) => Term::App(
                Symbol::intern(","),
                items.iter().map(|a| self.term(a, sc)).collect::<Result<_>>()?,
            ),
            Ast::HoVar(_) | Ast::HoApp(..) => {
                return self.err("higher-order variable in a first-order position")
            }
        })
    }

    fn split(&self, pred: Pred, args: &[Ast], sc: &mut Scope) -> Result<Atom> {
        let is_bare = |a: &Ast| matches!(a, Ast::HoVar(_)) || matches!(a, Ast::Name(_, x) if x.is_empty());
        let sig_ho = match pred {
            Pred::Sym(s) => match self.sig.map(|g| g.ho_arities(s, args.len())) {
                Some(opts) if !opts.is_empty() => {
                    let k = opts.iter().copied().find(|k| args[..*k].iter().all(is_bare));
                    match k {
                        Some(k) => Some(k),
                        None => return self.err(format!("{s}: arguments fit no higher-order split")),
                    }
                }
                _ => None,
            },
            Pred::Var(_) => None,
        };
        let mut ho_args = Vec::new();
        let mut rest = args;
        while let Some((first, tail)) = rest.split_first() {
            match first {
                Ast::HoVar(v) if sig_ho.is_none_or(|k| ho_args.len() < k) => {
                    ho_args.push(Pred::Var(sc.ho(v)))
                }
                Ast::Name(n, a) if a.is_empty() && sig_ho.is_some_and(|k| ho_args.len() < k) => {
                    ho_args.push(Pred::sym(n))
                }
                _ => break,
            }
            rest = tail;
        }
        let args = rest
            .iter()
            .map(|a| self.term(a, sc))
            .collect::<Result<Vec<_>>>()?;
        Ok(Atom {
            pred,
            ho_args,
            args,
        })
    }

    fn atom(&self, ast: &Ast, sc: &mut Scope) -> Result<Atom> {
        match ast {
            Ast::Name(n, args) if n == "call" && matches!(args.first(), Some(Ast::HoVar(_))) => {
                let Ast::HoVar(v) = &args[0] else { unreachable!() };
                let pred = Pred::Var(sc.ho(v));
                self.split(pred, &args[1..], sc)
            }
            Ast::Name(n, args) => self.split(Pred::sym(n), args, sc),
            Ast::HoApp(v, args) => {
                let pred = Pred::Var(sc.ho(v));
                self.split(pred, args, sc)
            }
            Ast::HoVar(v) => Ok(Atom {
                pred: Pred::Var(sc.ho(v)),
                ho_args: Vec::new(),
                args: Vec::new(),
            }),
            _ => self.err("expected an atom"),
        }
    }
}

/// Converts one raw item into a clause with variables numbered by first
/// occurrence (head first).
pub fn item_to_clause(item: &Item, sig: Option<&HoSignature>) -> Result<Clause> {
    let cv = Converter {
        sig,
        line: item.line,
        col: item.col,
    };
    let mut sc = Scope::default();
    let head = cv.atom(&item.head, &mut sc)?;
    let mut body = Vec::with_capacity(item.body.len());
    for l in &item.body {
        body.push(Literal {
            atom: cv.atom(&l.atom, &mut sc)?,
            positive: l.positive,
        });
    }
    Ok(Clause { head, body })
}

/// Converts a ground (or variable-bearing) raw atom outside any clause.
pub fn ast_to_atom(ast: &Ast, line: usize, col: usize) -> Result<Atom> {
    let cv = Converter {
        sig: None,
        line,
        col,
    };
    cv.atom(ast, &mut Scope::default())
}

pub fn parse_clause(text: &str) -> Result<Clause> {
    let items = parse_items(text)?;
    match items.as_slice() {
        [one] => item_to_clause(one, None),
        _ => Err(Error::parse(1, 1, format!("expected one clause, found {}", items.len()))),
    }
}

pub fn parse_theory(text: &str) -> Result<Theory> {
    parse_theory_with(text, None)
}

pub fn parse_theory_with(text: &str, sig: Option<&HoSignature>) -> Result<Theory> {
    parse_items(text)?
        .iter()
        .map(|it| item_to_clause(it, sig))
        .collect::<Result<Vec<_>>>()
        .map(Theory::new)
}

pub fn parse_atom(text: &str) -> Result<Atom> {
    let mut p = Parser::new(text)?;
    let lit = p.literal()?;
    if p.is_punct(".") {
        p.pos += 1;
    }
    if p.peek().is_some() {
        return p.err("trailing input after atom");
    }
    ast_to_atom(&lit.atom, 1, 1)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trips_display() {
        let src = "reverse(A,B) :- empty(C), fold(p,C,A,B).";
        let c = parse_clause(src).unwrap();
        assert_eq!(c.to_string(), src);
        assert!(c.head.ho_args.is_empty());
        assert!(c.body[1].atom.ho_args.is_empty());
    }

    #[test]
    fn signature_splits_symbol_arguments() {
        let mut sig = HoSignature::new();
        sig.insert(Symbol::intern("fold"), 4, 1);
        let t = parse_theory_with("reverse(A,B) :- empty(C), fold(p,C,A,B).", Some(&sig)).unwrap();
        let lit = &t.clauses[0].body[1].atom;
        assert_eq!(lit.ho_args, vec![Pred::sym("p")]);
        assert_eq!(lit.args.len(), 3);
    }

    #[test]
    fn higher_order_variables_and_calls() {
        let c = parse_clause("fold(#P,A,B,C) :- head(B,H), tail(B,T), call(#P,A,H,W), #P(W,T,C).").unwrap();
        assert_eq!(c.head.ho_args, vec![Pred::Var(HoVar(0))]);
        assert_eq!(c.body[2].atom.pred, Pred::Var(HoVar(0)));
        assert_eq!(c.body[3].atom.pred, Pred::Var(HoVar(0)));
        assert_eq!(c.to_string(), "fold(#P,A,B,C) :- head(B,D), tail(B,E), #P(A,D,F), #P(F,E,C).");
    }

    #[test]
    fn negation_lists_and_operators() {
        let c = parse_clause("f(A) :- \\+ p(A), A = [x,-3|T], 0 < 1.").unwrap();
        assert!(!c.body[0].positive);
        assert_eq!(c.to_string(), "f(A) :- \\+ p(A), A = [x,-3|B], 0 < 1.");
    }

    #[test]
    fn errors_carry_positions() {
        let err = parse_theory("p(A).\nq(A) :- r(A)").unwrap_err();
        match err {
            Error::Parse { line, .. } => assert_eq!(line, 2),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn comments_and_tuples() {
        let items = parse_items("% c\ntype(head,(list,element)). /* x */ max_vars(3).").unwrap();
        assert_eq!(items.len(), 2);
        assert_eq!(items[0].head.args()[1].tuple_items().len(), 2);
    }
}
