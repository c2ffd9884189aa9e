use lff_core::kernel::{canonical_clause, Atom, Clause, Literal, Substitutable, Term, Theory};
use lff_core::parse::parse_clause;
use lff_core::subsumption::{clause_subsumes, theory_subsumes};
use proptest::prelude::*;

fn literal() -> impl Strategy<Value = Literal> {
    let v = || (0u32..4).prop_map(Term::var);
    prop_oneof![
        v().prop_map(|a| Literal::pos(Atom::new("p", vec![a]))),
        v().prop_map(|a| Literal::pos(Atom::new("q", vec![a]))),
        (v(), v()).prop_map(|(a, b)| Literal::pos(Atom::new("r", vec![a, b]))),
    ]
}

fn clause() -> impl Strategy<Value = Clause> {
    prop::collection::vec(literal(), 1..4).prop_map(|body| Clause::new(Atom::new("h", vec![Term::var(0)]), body))
}

fn maps_into(c1: &Clause, c2: &Clause) -> bool {
    match clause_subsumes(c1, c2) {
        None => true,
        Some(w) => {
            let m = c1.apply(w.substitution().unwrap());
            m.head == c2.head && m.body.iter().all(|l| c2.body.contains(l))
        }
    }
}

proptest! {
    #[test]
    fn reflexive(c in clause()) {
        prop_assert!(clause_subsumes(&c, &c).is_some());
    }

    #[test]
    fn witnesses_are_checked(c1 in clause(), c2 in clause()) {
        prop_assert!(maps_into(&c1, &c2));
    }

    #[test]
    fn dropping_literals_generalizes(c in clause(), keep in prop::collection::vec(any::<bool>(), 3)) {
        let body: Vec<Literal> = c.body.iter().zip(keep.iter().cycle()).filter(|(_, k)| **k).map(|(l, _)| l.clone()).collect();
        let g = Clause::new(c.head.clone(), body);
        prop_assert!(clause_subsumes(&g, &c).is_some());
    }

    #[test]
    fn transitive(a in clause(), b in clause(), c in clause()) {
        if clause_subsumes(&a, &b).is_some() && clause_subsumes(&b, &c).is_some() {
            prop_assert!(clause_subsumes(&a, &c).is_some());
        }
    }

    #[test]
    fn canonical_form_is_stable_and_equivalent(c in clause()) {
        let k = canonical_clause(&c);
        prop_assert_eq!(canonical_clause(&k), k.clone());
        prop_assert!(clause_subsumes(&k, &c).is_some());
        prop_assert!(clause_subsumes(&c, &k).is_some());
    }

    #[test]
    fn printing_round_trips(c in clause()) {
        let back = parse_clause(&c.to_string()).unwrap();
        prop_assert_eq!(canonical_clause(&back), canonical_clause(&c));
    }

    #[test]
    fn adding_clauses_generalizes(a in clause(), b in clause()) {
        let one = Theory::new(vec![a.clone()]);
        let two = Theory::new(vec![a, b]);
        // Every clause of `one` is in `two`, so `two` is the more general.
        prop_assert!(theory_subsumes(&two, &one).is_some());
    }
}
