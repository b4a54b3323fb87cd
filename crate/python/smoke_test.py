"""Smoke test for the harmonic_descent extension module.

Build and install first:
    maturin build --release -m crates/python/Cargo.toml -o dist
    pip install dist/harmonic_descent-*.whl
"""

import math

import harmonic_descent as hd


def close(a, b, tol):
    assert abs(a - b) <= tol, (a, b)


def main():
    zeta2 = math.pi ** 2 / 6

    close(hd.harmonic(4), 25 / 12, 1e-15)
    close(hd.zeta_int(2), zeta2, 1e-15)
    close(hd.dilog(1.0), zeta2, 1e-15)

    pmf = hd.decrement_pmf(4)
    for p, e in zip(pmf, [6 / 11, 3 / 11, 2 / 11]):
        close(p, e, 1e-15)

    close(hd.hit_probability_exact(4, 2), 7 / 11, 1e-15)
    close(hd.limit_formula(1), 6 / math.pi ** 2, 1e-15)

    rows = hd.convergence_table(1, [100, 1000])
    assert abs(rows[1][3]) < abs(rows[0][3])

    est, se = hd.hit_probability_mc(51, 3, 20000, seed=1)
    assert abs(est - hd.hit_probability_exact(51, 3)) <= 4 * se

    a = hd.simulate(50, hd.RngStream(7))
    assert a == hd.simulate(50, hd.RngStream(7))
    assert a[0] == 50 and a[-1] == 1
    assert all(x > y for x, y in zip(a, a[1:]))

    rng = hd.RngStream(3, 2)
    blocks = hd.sample_composition(30, rng)
    assert sum(blocks) == 30
    assert hd.occupancy_chain([2, 1]) == [3, 1, 0]
    assert sum(hd.balls_in_boxes(20, rng)) == 20
    close(hd.gp_decrement_prob(3, 1), 6 / 11, 1e-8)

    q, c = hd.hurwitz_moment(1)
    close(q, zeta2, 1e-8 * zeta2)
    q, c = hd.chi_laplace(2)
    close(q, c, 1e-8)
    close(hd.chi_tail(0.0), 1.0, 1e-14)
    close(hd.nu_tail(math.log(2)), math.log(2), 1e-15)

    over = hd.overshoot_mc(5.0, 1000, seed=4)
    assert min(over) >= 0.0

    for suite in ("kernel", "renewal", "composition"):
        ok, report = hd.run_verification(suite)
        assert ok, report

    try:
        hd.decrement_pmf(1)
    except ValueError:
        pass
    else:
        raise AssertionError("expected ValueError")

    print("smoke test passed")


if __name__ == "__main__":
    main()
