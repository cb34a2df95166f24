#!/usr/bin/env python3
"""Smoke test for the dtasep_py extension module.

Build the extension first:

    cargo build --release -p dtasep-py

The script locates the cdylib under target/, loads it, and checks a handful
of known values against the library.
"""

import importlib.util
import math
import pathlib
import sys


def load_module():
    root = pathlib.Path(__file__).resolve().parents[1]
    names = ["libdtasep_py.so", "dtasep_py.so", "libdtasep_py.dylib", "dtasep_py.pyd"]
    candidates = [
        root / "target" / profile / name
        for profile in ("release", "debug")
        for name in names
    ]
    for path in candidates:
        if path.exists():
            spec = importlib.util.spec_from_file_location("dtasep_py", path)
            module = importlib.util.module_from_spec(spec)
            spec.loader.exec_module(module)
            return module
    sys.exit(
        "dtasep_py cdylib not found; run `cargo build --release -p dtasep-py` first"
    )


def main():
    m = load_module()

    # Tableau bijection on the worked 3x4 example.
    w = [[1, 0, 1, 1], [0, 1, 1, 0], [1, 1, 0, 1]]
    p, q = m.drsk_forward(w)
    assert p == [[1, 1, 3], [2, 2, 4], [3], [4]], p
    assert q == [[1, 2, 3], [1, 2, 3], [1], [3]], q
    assert m.drsk_inverse(p, q, 3, 4) == w
    assert m.left_edge(p) == [2, 2, 1, 1]

    # Schur polynomial s_(2,1)(x1, x2) = x1^2 x2 + x1 x2^2.
    x1, x2 = 0.5, 0.75
    expect = x1 * x1 * x2 + x1 * x2 * x2
    assert math.isclose(m.schur([2, 1], [x1, x2]), expect, rel_tol=1e-12)

    # One-particle exact law: P(jump) = pq / (1 + pq).
    law = dict((tuple(pos), prob) for pos, prob in m.transition_law([0], [0.5], [1.5], 1))
    pq = 0.5 * 1.5
    assert math.isclose(law[(1,)], pq / (1 + pq), rel_tol=1e-12)
    assert math.isclose(law[(0,)], 1 / (1 + pq), rel_tol=1e-12)

    # Multipoint probabilities: both kernel routes agree with the
    # exhaustive law.
    y, ps, qs, t = [1, -1], [0.25, 1 / 3], [1.5, 2.0], 2
    law = m.transition_law(y, ps, qs, t)
    query = [(1, 2), (2, 0)]
    oracle = sum(prob for pos, prob in law if pos[0] >= 2 and pos[1] >= 0)
    for route in ("biorthogonal", "hitting"):
        value = m.multipoint_probability(y, ps, qs, t, query, route)
        assert math.isclose(value, oracle, abs_tol=1e-10), (route, value, oracle)

    # Kernel entries: the two constructions agree pointwise.
    for (mm, xx, nn, xp) in [(1, 0, 2, -1), (2, 1, 1, 0), (2, -2, 2, 2)]:
        a = m.kernel_entry(y, ps, qs, t, mm, xx, nn, xp, "biorthogonal")
        b = m.kernel_entry(y, ps, qs, t, mm, xx, nn, xp, "hitting")
        assert math.isclose(a, b, abs_tol=1e-12), (mm, xx, nn, xp, a, b)

    # Seeded simulation is reproducible and respects exclusion.
    t1 = m.simulate_trajectory([2, 0, -1], [0.25, 1 / 3, 0.2], [1.5, 2.0, 3.0], 3, 7, 0)
    t2 = m.simulate_trajectory([2, 0, -1], [0.25, 1 / 3, 0.2], [1.5, 2.0, 3.0], 3, 7, 0)
    assert t1 == t2
    for state in t1:
        assert all(a > b for a, b in zip(state, state[1:]))

    print("dtasep_py smoke test: all checks passed")


if __name__ == "__main__":
    main()
