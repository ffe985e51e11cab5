"""Smoke test for the `extremal` extension module.

Build and run from the repository root:

    cargo build -p extremal-py --release
    cp target/release/libextremal.so python/extremal.so
    python3 python/smoke_test.py
"""

import json
import os
import sys
from fractions import Fraction as F

sys.path.insert(0, os.path.dirname(os.path.abspath(__file__)))

import extremal  # noqa: E402


def main():
    half, quarter = F(1, 2), F(1, 4)

    ind = extremal.Coupling([[quarter, quarter], [quarter, quarter]])
    v = ind.test_extreme()
    assert not v.extreme and v.null_dim == 1
    cert = v.certificate
    assert cert["verified"] and cert["epsilon"] == half
    assert cert["omega_plus"] == [[F(3, 8), F(1, 8)], [F(1, 8), F(3, 8)]]

    ident = extremal.Coupling([["1/2", 0], [0, "1/2"]])
    assert ident.test_extreme().extreme
    assert ident.is_graphic() == ("both", [0, 1])
    assert ident.marginals() == ([half, half], [half, half])

    swap = extremal.OrbitDecomposition(2, 2, [([1, 0], [1, 0])])
    assert (swap.m1, swap.m2, swap.m12, swap.group_order) == (1, 1, 2, 2)
    sym = extremal.Coupling([[quarter, quarter], [quarter, quarter]], orbits=swap)
    assert not sym.test_extreme().extreme

    verts = extremal.enumerate_extreme([half, half], [half, half], swap)
    assert len(verts) == 2

    b = extremal.verify_birkhoff(3)
    assert b["passed"] and b["count"] == 6

    base = extremal.base_coupling("1/3")
    assert base.matrix() == [[0, F(1, 3)], [F(1, 3), F(1, 3)]]
    t = extremal.truncated_coupling("1/3", 2)
    assert t.shape == (4, 4)
    assert t.test_extreme().extreme and t.is_graphic()[0] == "neither"
    assert t == base.extend_with_independent(["1/3", "2/3"])
    assert json.loads(t.to_instance_json())["x1_size"] == 4

    assert extremal.eval_fp(1 / 3, 0.0) == 0.0
    assert abs(extremal.eval_fp(1 / 3, 0.25) - 1 / 9) < 1e-12
    pairs = extremal.sample_pairs("1/3", 100, seed=7)
    assert len(pairs) == 100 and pairs == extremal.sample_pairs("1/3", 100, seed=7)
    assert all(0.0 <= x <= 1.0 and 0.0 <= y <= 1.0 for x, y in pairs)

    try:
        extremal.Coupling([["1/2", 0], [0, "1/2"]], mu1=["1/3", "2/3"])
    except ValueError as e:
        assert "row 0 sum mismatch" in str(e)
    else:
        raise AssertionError("invalid coupling accepted")

    print("smoke test passed")


if __name__ == "__main__":
    main()
