"""Smoke test for the valdist extension module.

Build and install first:
    maturin build --release -m crates/python/Cargo.toml
    pip install target/wheels/valdist-*.whl
"""

import cmath
import math

import valdist


def close(a, b, tol):
    assert abs(a - b) <= tol, f"{a} vs {b}"


def main():
    j, y, _, _ = valdist.bessel_eval(0.0, 1.0)
    close(j, 0.7651976865579666, 1e-12)
    close(y, 0.08825696421567696, 1e-12)

    half = valdist.Potential.inverse_square(0.5, a=1.0)
    f, _ = valdist.spectral_density(half, 4.0)
    close(f, 2.0 / math.pi, 1e-8)
    close(valdist.bessel_density(0.0, 1.0, 1.0), 0.34155, 5e-5)

    c = valdist.connection_coefficients(valdist.Potential.inverse_square(1.0), 2.25)
    close(4 * c["a"] * c["c"] - c["b"] ** 2, 4.0, 1e-6)

    a, b, cc = valdist.r0_coefficients(0.3, 2.0)
    close(4 * a * cc - b * b, 4.0, 1e-12)

    close(valdist.angle([(0.0, None)], 1j), math.pi / 2, 1e-14)

    free = valdist.Potential.zero()
    m = valdist.m_truncated(free, 200.0, 1 + 0.05j)
    assert m is not None and abs(m - 1j * cmath.sqrt(1 + 0.05j)) < 1e-3

    thetas = valdist.theta0_mod_pi(free, 2.0, valdist.BoundaryModel.free(), [3.0, 25.0])
    for x, t in zip([3.0, 25.0], thetas):
        close(t, math.fmod(math.sqrt(2.0) * x, math.pi), 1e-8)

    rows = valdist.theorem2_table(free, valdist.BoundaryModel.free(), [(0.0, None)], (1.0, 4.0), [50.0], 2000)
    close(rows[0][2], 1.5, 1e-6)
    close(rows[0][1], 1.5, 0.05)

    lhs, rhs = valdist.theorem1_gap([(1.0, 1.0)], [(0.0, 2.0)], (-1.0, 3.0), 0.1, 20000)
    assert lhs <= rhs + 1e-3

    try:
        valdist.Potential.inverse_square(-1.0)
    except ValueError:
        pass
    else:
        raise AssertionError("negative order accepted")

    print("smoke test passed")


if __name__ == "__main__":
    main()
