"""Smoke test for the bcidx extension module.

Build with `cargo build --release -p bcidx-python`, then copy
target/release/libbcidx.so to bcidx.so somewhere on PYTHONPATH.
"""

import pathlib
import sys

import bcidx

FIXTURES = pathlib.Path(__file__).resolve().parent.parent / "fixtures"


def read(name):
    return (FIXTURES / name).read_text()


def main():
    assert bcidx.normalize(read("redex.term")) == ["n.a"]

    for name in ["proof_base.bcp", "proof_example.bcp", "nsl.bcp", "cca_trans.bcp"]:
        v = bcidx.check(read(name))
        assert v.accepted and v.failure is None, (name, v)

    for path in sorted((FIXTURES / "mutations").glob("*.bcp")):
        src = path.read_text()
        expected = src.splitlines()[0].split("expect:")[1].strip()
        v = bcidx.check(src)
        assert not v and v.failure == expected, (path.name, v)

    proof = bcidx.search(read("goal_csintro.goal"), max_depth=6)
    assert proof is not None and bcidx.check(proof).accepted

    hints = [h for h in bcidx.candidates(read("goal_proof_example.goal")) if h.startswith("(eq ")]
    proof = bcidx.search(read("goal_proof_example.goal"), max_depth=14, hints=hints)
    assert proof is not None and bcidx.check(proof).accepted

    assert bcidx.search(read("goal_proof_example.goal"), max_depth=2) is None
    assert bcidx.length("n.a\n(pair n.a n.b)") == ["(+ (* 1 l_eta))", "(+ (* 2 l_eta) (* 1 l_pair))"]

    try:
        bcidx.check("(rule")
    except ValueError:
        pass
    else:
        raise AssertionError("malformed input accepted")

    print("python smoke test: ok")
    return 0


if __name__ == "__main__":
    sys.exit(main())
