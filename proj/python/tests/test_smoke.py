"""Smoke tests for the python bindings; plain asserts, no test framework."""
import json
import sys

import _rectint as ri


def test_padic_kernel():
    s = ri.Session(7, 10)
    three = ri.from_int(s, 3)
    nine = ri.mul(s, three, three)
    assert nine.valuation == 0
    assert nine.digits[0] == 2 and nine.digits[1] == 1
    root = ri.hensel_lift(s, [-2, 0, 1], three, 0)  # t^2 - 2 near 3
    assert ri.mul(s, root, root).digits[0] == 2
    assert ri.member_pn(s, ri.from_int(s, 2), 2)
    assert not ri.member_pn(s, ri.from_int(s, 7), 2)


ABS_SPEC = json.dumps({
    "schema": "rectint/1",
    "params": [],
    "set": {
        "type": "cell",
        "base": {"type": "rectset", "k": 1, "lPrime": 1, "l": 0, "gamma": []},
        "n": 1,
        "lambda": {"zero": False, "val": 0, "digits": [1]},
        "center": None,
        "lower": {"coeff": {"ord": 0}, "exps": []},
        "upper": None,
    },
    "integrand": {
        "f": {"coeff": {"ord": 0}, "exps": [], "fiber": 1},
        "g": {"coeff": {"ord": 0}, "exps": [], "fiber": 0},
    },
})


def test_integrate_abs_value():
    out = json.loads(ri.integrate(ABS_SPEC, 3, 10, [1, 2]))
    values = {v["s"]: v["value"] for v in out["results"][0]["values"]}
    assert values[1] == "3/4"
    assert values[2] == "9/13"


def test_verify_and_oracle():
    rep = json.loads(ri.verify(ABS_SPEC, 3, 10, 8, [1]))
    assert rep["pass"], rep
    cmp = json.loads(ri.oracle_compare(ABS_SPEC, 3, 10, 2, 10))
    assert cmp["pass"], cmp


def test_rectify_artifacts():
    parts = json.loads(ri.rectify(ABS_SPEC, 3, 8))
    assert parts["schema"] == "rectint-parts/1"
    assert len(parts["parts"]) == 2  # one per unit angular class mod 3
    log = ri.audit(ABS_SPEC, 3, 8)
    assert "part 0" in log


if __name__ == "__main__":
    for name, fn in sorted(globals().items()):
        if name.startswith("test_") and callable(fn):
            fn()
            print(f"ok {name}")
    print("python smoke: all passed")
    sys.exit(0)
