"""Smoke test for the slicefem_py extension module.

Build and install it first:

    pip install --no-build-isolation ./crates/python
"""

import math

import slicefem_py as sf


def main():
    names = [name for name, _ in sf.list_cases()]
    assert names == ["gw_nh", "gw_h", "straka", "mtn_nh", "mtn_h", "schar"], names

    # Exner pressure of the reference state is 1 by construction.
    rho = 1e5 / (287.0 * 300.0)
    assert abs(sf.exner(rho, 300.0) - 1.0) < 1e-12

    tc = sf.Testcase("gw_nh", ncols=20, nlayers=2, t_end=36.0)
    assert tc.num_steps() == 3
    print(tc)

    sim = sf.Simulation(tc)
    m0 = sim.total_mass()
    its = sim.advance(3)
    assert len(its) == 3 and sim.step == 3 and sim.time == 36.0
    assert abs(sim.total_mass() - m0) <= 1e-8 * m0
    assert all(newton <= 4 for newton, _ in its), its

    d = sim.diagnostics()
    assert 0.0 < max(abs(d["w_min"]), abs(d["w_max"])) < 1e-1, d

    f = sim.sample(41, 5)
    assert len(f["w"]) == 41 * 5
    assert all(math.isfinite(v) for v in f["pi"])

    st = sf.Testcase.straka(800.0)
    assert (st.ncols, st.nlayers, st.dt) == (64, 8, 4.0)

    try:
        sf.Testcase("nope")
    except ValueError:
        pass
    else:
        raise AssertionError("unknown testcase accepted")

    print("smoke test passed:", its, d)


if __name__ == "__main__":
    main()
