"""Smoke test for the ptgup extension module.

Build and run from the repository root:

    cargo build --release -p ptgup-python --features extension-module
    cp target/release/libptgup_py.so python/ptgup.so
    python3 python/smoke_test.py
"""

import cmath
import math

import ptgup


def close(a, b, tol):
    return abs(a - b) <= tol * max(1.0, abs(b))


def main():
    p = ptgup.ModelParams(mass=1.0, omega_x=1.0, omega_y=2.0, lam=0.0, beta=0.01)
    assert p.phase == "unbroken" and p.lambda_crit == 1.5
    assert close(ptgup.energy(p, (0, 0)), 1.5, 1e-15)
    assert close(ptgup.delta_energy(p, (0, 0)), 0.0475, 1e-14)

    broken = p.with_lambda(2.0)
    modes = ptgup.derive_modes(broken)
    assert modes.phase == "broken"
    assert close(modes.energy((0, 1)), modes.energy((1, 0)).conjugate(), 1e-12)
    r = modes.rotation
    # complex orthogonal: R^T R = 1
    assert close(r[0][0] ** 2 + r[1][0] ** 2, 1.0, 1e-12)
    assert abs(r[0][0] * r[0][1] + r[1][0] * r[1][1]) < 1e-12

    report = ptgup.correction(p.with_lambda(0.5), (0, 0))
    assert report["pt_preserved"] and len(report["terms"]) == 5

    try:
        ptgup.correction(p.with_lambda(1.5), (1, 0))
    except ptgup.DegeneracyError as err:
        assert "(0, 1)" in str(err)
    else:
        raise AssertionError("expected DegeneracyError at the exceptional point")

    try:
        ptgup.ModelParams(mass=-1.0)
    except ValueError:
        pass
    else:
        raise AssertionError("negative mass accepted")

    cmp = ptgup.compare_spectrum(p.with_lambda(1.0).with_beta(0.0), cutoff=20, nmax=3)
    assert cmp["max_abs_deviation"] < 1e-7, cmp["max_abs_deviation"]

    slope = ptgup.beta_slope(p.with_beta(0.0), (0, 0), cutoff=20)
    assert close(slope, 4.75, 1e-5), slope

    psi = ptgup.wavefunction(p, (0, 0), 0.0, 0.0)
    assert close(psi.real, math.sqrt(math.sqrt(2.0) / math.pi), 1e-12) and psi.imag == 0.0
    assert cmath.isfinite(ptgup.wavefunction(p, (1, 1), 0.3, -0.2, corrected=True))

    print("ptgup smoke test passed")


if __name__ == "__main__":
    main()
