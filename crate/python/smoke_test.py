"""Smoke test for the Python bindings.

Build and install first, e.g. `maturin develop -m crates/python/Cargo.toml --release`.
"""

import math

import infomono


def close(a, b, tol=1e-9):
    return abs(a - b) <= tol


def h2(p):
    return -p * math.log2(p) - (1 - p) * math.log2(1 - p)


def main():
    noisy = infomono.JointPmf([2, 2], [0.45, 0.05, 0.05, 0.45])
    assert noisy.alphabet_sizes == [2, 2] and len(noisy) == 4
    assert close(infomono.entropy(noisy, [0]), 1.0)
    assert close(infomono.mutual_information(noisy, [0], [1]), 1 - h2(0.1))
    assert close(infomono.total_correlation(noisy), 1 - h2(0.1))

    gk = infomono.gacs_korner(noisy)
    assert close(gk["value"], 0.0)
    assert not infomono.is_resolvable(noisy)

    copy = infomono.JointPmf([2, 2], [0.5, 0.0, 0.0, 0.5])
    assert infomono.is_resolvable(copy)
    q = infomono.AuxChannel.deterministic([0, 0, 1, 1], 2)
    ineff = infomono.inefficiencies(copy, q)
    assert close(ineff["delta1"], 0.0) and close(ineff["delta2"], 0.0)
    assert infomono.region_point(copy, q) == [0.0, 0.0, 0.0]

    wyner = infomono.wyner(noisy, restarts=2, seed=1)
    assert wyner["value"] >= gk["value"]
    assert wyner["value"] <= 1.0 + 1e-9

    value, witness = infomono.support_function(noisy, [0, 0, 1], 4, restarts=2)
    assert value >= -1e-12 and witness.q_size == 4

    region = infomono.region(noisy, directions=5, restarts=2)
    assert region["dimension"] == 3 and region["contains_origin"] is False

    axes = infomono.intercepts(noisy)
    assert len(axes) == 3

    cert = infomono.scratch(copy, t=1)
    assert cert["realizable"]
    sim = infomono.simulate(cert, samples=20000, seed=3)
    assert sim["empirical_tv"] < 0.02

    indep = infomono.JointPmf.uniform([2, 2])
    report = infomono.feasible(indep, noisy, directions=5, restarts=2)
    assert report["verdict"] == "not_included"

    try:
        infomono.JointPmf([2], [0.7, 0.7])
    except infomono.InfomonoError:
        pass
    else:
        raise AssertionError("unnormalized pmf accepted")

    print("python smoke test: ok")


if __name__ == "__main__":
    main()
