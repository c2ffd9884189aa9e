"""Smoke test for the Python bindings. Run with pytest or directly."""

from pathlib import Path

import lff

CORPUS = Path(__file__).resolve().parent.parent / "corpus"


def test_parse_round_trip():
    assert lff.parse("p(X) :- q(X,Y), r(Y).") == ["p(A) :- q(A,B), r(B)."]


def test_subsume():
    assert lff.subsume("p(A) :- q(A).", "p(A) :- q(A), r(A).") is not None
    assert lff.subsume("p(A) :- q(A).", "p(A) :- r(A).") is None


def test_load_task():
    name, head, arity, pos, neg = lff.load_task(str(CORPUS / "allEven" / "ho"))
    assert (name, head, arity) == ("allEven", "allEven", 1)
    assert pos > 0 and neg > 0


def test_learn_all_even():
    r = lff.learn(str(CORPUS / "allEven" / "ho"), wallclock=60.0)
    assert r.status == "solved"
    assert r.literals == 4
    assert r.program


if __name__ == "__main__":
    for name, fn in list(globals().items()):
        if name.startswith("test_"):
            fn()
            print("ok", name)
