"""Smoke test for the compiled extension: python python/smoke_test.py"""

import math

import bose_thermo_py as bt


def main():
    hs = bt.Potential.hard_core(1.0)
    assert abs(bt.scattering_length(hs) - 1.0) < 1e-9
    assert abs(bt.scattering_length(hs, method="variational", mesh=1024) - 1.0) < 1e-3
    assert bt.Potential.from_json(hs.to_json()).range == 1.0

    rep = bt.truncate(hs, 10.0)
    assert 0.0 < rep["a_tilde"] < rep["a"]
    assert rep["moment"] <= 20.0 * (1 + 1e-12)

    rc = bt.critical_density(1.0)
    assert abs(rc - (4 * math.pi) ** -1.5 * 2.612375348685488) < 1e-14
    assert bt.mu0(1.0, 0.5 * rc) < 0.0
    assert bt.mu0(1.0, 2.0 * rc) == 0.0
    point = bt.ideal_gas_point(1.0, 2.0 * rc)
    assert point["phase"] == "condensed"

    assert abs(bt.alpha_exponent(1e-12) - 2 / 2295) < 1e-11
    bound = bt.lower_bound(1e-4, 1.0, 1.0)
    assert bound["lower_bound"] == max(bound["high_t"]["value"], bound["low_t"]["value"])

    assert bt.hole_lemma(0.05, 1.0, math.pi / 4)["holds"]
    dyson = bt.dyson_check(box_l=16.0, grids=[16, 24], r=6.0, s=4.0)
    assert dyson["holds"]

    try:
        bt.mu0(-1.0, 1.0)
    except ValueError:
        pass
    else:
        raise AssertionError("negative beta accepted")

    print("smoke test passed")


if __name__ == "__main__":
    main()
