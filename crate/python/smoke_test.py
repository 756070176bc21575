#!/usr/bin/env python3
"""Smoke test for the polefit Python extension.

Builds nothing itself: expects `cargo build -p polefit-py` (or --release) to
have produced target/{debug,release}/libpolefit.so. Copies the library next
to a temp directory under the import name `polefit` and runs a few
end-to-end checks.
"""
import math
import shutil
import sys
import tempfile
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent


def locate_library():
    candidates = []
    for profile in ("release", "debug"):
        for name in ("libpolefit.so", "libpolefit.dylib", "polefit.dll"):
            candidates.append(ROOT / "target" / profile / name)
    for c in candidates:
        if c.exists():
            return c
    sys.exit(
        "could not find the built extension; run `cargo build -p polefit-py` first"
    )


def main():
    lib = locate_library()
    tmp = Path(tempfile.mkdtemp(prefix="polefit_py_"))
    suffix = ".so" if lib.suffix in (".so", ".dylib") else ".pyd"
    shutil.copy(lib, tmp / f"polefit{suffix}")
    sys.path.insert(0, str(tmp))
    import polefit

    # fit 1/(z - 2) + 1/(z - 0.5) from 128 contour samples
    f = lambda z: 1 / (z - 2) + 1 / (z - 0.5)
    pts = polefit.contour_points(1.0, 64)
    values = [f(z) for z in pts]
    model = polefit.fit(values, rho=1.0, n1=5, m1=5, tol=1e-12, seed=7)
    (dp, dm) = model.degrees()
    assert dp == (1, 1) and dm == (1, 1), f"degrees {dp}, {dm}"

    poles = sorted((loc for (_, _, loc) in model.poles()), key=abs)
    assert abs(poles[0] - 0.5) < 1e-9, poles
    assert abs(poles[1] - 2.0) < 1e-9, poles

    z = 1.5 * complex(math.cos(0.7), math.sin(0.7))
    assert abs(model.eval(z) - f(z)) < 1e-9

    # round trip through JSON
    path = tmp / "model.json"
    model.save(str(path))
    loaded = polefit.Model.load(str(path))
    assert loaded.eval(z) == model.eval(z)

    # Laurent coefficients of 1/(z-2): c_0 = -1/2, c_1 = -1/4
    coeffs = polefit.laurent_coefficients([1 / (z - 2) for z in pts], 1.0)
    n = (len(coeffs) - 1) // 2
    assert abs(coeffs[n] - (-0.5)) < 1e-9
    assert abs(coeffs[n + 1] - (-0.25)) < 1e-9

    # PDE singularity tracking at t = 0 and t = 0.8
    pde_rows = polefit.pde_track([0.0, 0.8])
    for (t, w11, b11, tracks) in pde_rows:
        truth = abs(t - 0.25)
        for (_, s, err) in tracks:
            assert abs(abs(s.imag) - truth) < 1e-5, (t, s)
        if t == 0.0:
            assert all(err < 1e-7 for (_, _, err) in tracks)
        if t == 0.8:
            assert all(err < 1e-12 for (_, _, err) in tracks)

    u = polefit.pde_exact_solution(complex(0.0, 0.0), 0.0)
    assert abs(u.real - 1.80416233283756) < 1e-10

    print("polefit python smoke test: all checks passed")


if __name__ == "__main__":
    main()
