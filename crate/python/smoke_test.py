"""Smoke test for the `resonance` extension module.

Build it first, e.g. `maturin develop -m crates/python/Cargo.toml`, or
`cargo build --release -p resonance-py --features extension-module` and copy
target/release/libresonance.so to resonance.so on PYTHONPATH.
"""

import cmath
import math

import resonance


def main():
    p = resonance.ModelParams(1, 1.0, -1.0, 1e-3)
    assert resonance.classify_regime(p) == 1

    (res,) = [s for s in resonance.locate_singularities(p) if s.kind == "resonance"]
    assert res.sheet == -1 and res.method == "fixed_point"
    assert res.location.real > 0 and res.location.imag < 0
    assert abs(res.location - resonance.expansion(p)) < 1e-8
    assert abs(resonance.dispersion(p, res.location, sheet=-1)) < 1e-12

    z = complex(-0.3, 0.4)
    for sheet in (0, -1):
        r = resonance.sqrt_on_sheet(z, sheet)
        assert abs(r * r - z) < 1e-15
    assert resonance.sqrt_on_sheet(z, 0).imag >= 0

    h = resonance.hankel1_0(1j)
    assert abs(h - (-2j / math.pi) * 0.42102443824070833) < 1e-15

    cluster = resonance.locate_singularities(resonance.ModelParams(1, 0.0, 0.0, 1e-3))
    assert len(cluster) == 3
    assert all(abs(abs(s.location) - abs(cluster[0].location)) < 1e-9 for s in cluster)

    try:
        resonance.ModelParams(4, 1.0, 0.0, 0.1)
    except ValueError:
        pass
    else:
        raise AssertionError("d = 4 accepted")
    print("smoke test passed:", res, cmath.phase(res.location))


if __name__ == "__main__":
    main()
