//! Deterministic built-in predicates. Each succeeds at most once; a call
//! with arguments of the wrong type simply fails.

use super::engine::{Cell, Engine};
use crate::symbol::Symbol;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum Builtin {
    Eq,
    Neq,
    Integer,
    Succ,
    PredOf,
    Zero,
    Less0,
    Geq,
    Lt,
    Gt,
    Ge,
    Le,
    Even,
    Odd,
    Max,
    Len,
    CharToInt,
    IntToChar,
}

pub(crate) fn builtin(sym: Symbol, arity: u32) -> Option<Builtin> {
    use Builtin::*;
    Some(match (sym.as_str(), arity) {
        ("=", 2) => Eq,
        ("\\=", 2) => Neq,
        ("integer", 1) => Integer,
        ("suc", 2) | ("succ", 2) => Succ,
        ("pred", 2) => PredOf,
        ("zero", 1) => Zero,
        ("less0", 1) => Less0,
        ("geq", 2) => Geq,
        ("<", 2) => Lt,
        (">", 2) => Gt,
        (">=", 2) => Ge,
        ("=<", 2) => Le,
        ("even", 1) => Even,
        ("odd", 1) => Odd,
        ("max", 3) => Max,
        ("len", 2) => Len,
        ("char_to_int", 2) => CharToInt,
        ("int_to_char", 2) => IntToChar,
        _ => return None,
    })
}

/// Names recognised as built-in predicates, with their arities.
pub fn builtin_names() -> &'static [(&'static str, usize)] {
    &[
        ("=", 2),
        ("\\=", 2),
        ("integer", 1),
        ("suc", 2),
        ("succ", 2),
        ("pred", 2),
        ("zero", 1),
        ("less0", 1),
        ("geq", 2),
        ("<", 2),
        (">", 2),
        (">=", 2),
        ("=<", 2),
        ("even", 1),
        ("odd", 1),
        ("max", 3),
        ("len", 2),
        ("char_to_int", 2),
        ("int_to_char", 2),
    ]
}

fn int(c: Cell) -> Option<i64> {
    match c {
        Cell::Int(i) => Some(i),
        _ => None,
    }
}

fn cmp(a: &[Cell], f: impl Fn(i64, i64) -> bool) -> bool {
    match (int(a[0]), int(a[1])) {
        (Some(x), Some(y)) => f(x, y),
        _ => false,
    }
}

impl Builtin {
    /// `args` are already dereferenced.
    pub(crate) fn run(self, e: &mut Engine<'_>, a: &[Cell]) -> bool {
        use Builtin::*;
        match self {
            Eq => e.unify(a[0], a[1]),
            Neq => {
                let t0 = e.term_of_cell(a[0]);
                let t1 = e.term_of_cell(a[1]);
                // Only decided on ground terms; otherwise unification could
                // succeed and the goal fails.
                t0.is_ground() && t1.is_ground() && t0 != t1
            }
            Integer => int(a[0]).is_some(),
            Succ => match (int(a[0]), int(a[1])) {
                (Some(x), _) if x >= 0 => e.bind_or_check_int(a[1], x + 1),
                (None, Some(y)) if y > 0 && matches!(a[0], Cell::Ref(_)) => {
                    e.bind_or_check_int(a[0], y - 1)
                }
                _ => false,
            },
            PredOf => match (int(a[0]), a[0]) {
                (Some(0), _) => e.bind_or_check_int(a[1], 0),
                (Some(x), _) if x > 0 => e.bind_or_check_int(a[1], x - 1),
                (None, Cell::Ref(_)) => match int(a[1]) {
                    Some(0) | None => {
                        e.bind_or_check_int(a[0], 0) && e.bind_or_check_int(a[1], 0)
                    }
                    Some(y) if y > 0 => e.bind_or_check_int(a[0], y + 1),
                    _ => false,
                },
                _ => false,
            },
            Zero => e.bind_or_check_int(a[0], 0),
            Less0 => int(a[0]).is_some_and(|x| x > 0),
            Geq => cmp(a, |x, y| x >= y),
            Lt => cmp(a, |x, y| x < y),
            Gt => cmp(a, |x, y| x > y),
            Ge => cmp(a, |x, y| x >= y),
            Le => cmp(a, |x, y| x <= y),
            Even => int(a[0]).is_some_and(|x| x % 2 == 0),
            Odd => int(a[0]).is_some_and(|x| x % 2 != 0),
            Max => match (int(a[0]), int(a[1])) {
                (Some(x), Some(y)) => e.bind_or_check_int(a[2], x.max(y)),
                _ => false,
            },
            Len => match e.list_len(a[0]) {
                Some(n) => e.bind_or_check_int(a[1], n),
                None => false,
            },
            CharToInt => match a[0] {
                Cell::Atom(s) => {
                    let mut cs = s.as_str().chars();
                    match (cs.next(), cs.next()) {
                        (Some(c), None) => e.bind_or_check_int(a[1], c as i64),
                        _ => false,
                    }
                }
                Cell::Ref(_) => match int(a[1]).and_then(char_of) {
                    Some(s) => e.bind_or_check_atom(a[0], s),
                    None => false,
                },
                _ => false,
            },
            IntToChar => match int(a[0]) {
                Some(i) => match char_of(i) {
                    Some(s) => e.bind_or_check_atom(a[1], s),
                    None => false,
                },
                None => match a[1] {
                    Cell::Atom(s) => {
                        let mut cs = s.as_str().chars();
                        match (cs.next(), cs.next()) {
                            (Some(c), None) if matches!(a[0], Cell::Ref(_)) => {
                                e.bind_or_check_int(a[0], c as i64)
                            }
                            _ => false,
                        }
                    }
                    _ => false,
                },
            },
        }
    }
}

fn char_of(i: i64) -> Option<Symbol> {
    if (0..128).contains(&i) {
        let c = char::from(i as u8);
        Some(Symbol::intern(&c.to_string()))
    } else {
        None
    }
}

#[cfg(test)]
mod tests {
    use crate::evaluator::{solve, Budget, Verdict};
    use crate::kernel::Theory;
    use crate::parse::parse_atom;

    fn holds(goal: &str) -> bool {
        solve(&Theory::default(), &parse_atom(goal).unwrap(), Budget::default()).unwrap()
            == Verdict::Entailed
    }

    #[test]
    fn arithmetic() {
        assert!(holds("succ(2,3)") && holds("suc(0,1)") && !holds("succ(3,3)"));
        assert!(holds("pred(0,0)") && holds("pred(5,4)"));
        assert!(holds("max(3,7,7)") && holds("even(4)") && holds("odd(3)"));
        assert!(holds("geq(3,3)") && !holds("geq(2,3)"));
        assert!(holds("len([a,b,c],3)") && !holds("len(a,1)"));
    }

    #[test]
    fn characters() {
        assert!(holds("char_to_int(a,97)") && holds("int_to_char(98,b)"));
    }

    #[test]
    fn disequality_needs_ground_terms() {
        assert!(holds("a \\= b") && !holds("a \\= a"));
    }
}
