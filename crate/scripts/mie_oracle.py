"""Reference Mie coefficients in extended precision.

Writes crates/cli/tests/data/mie_oracle.json with a_n, b_n for a
non-magnetic sphere in vacuum, computed from Riccati-Bessel functions
evaluated with mpmath at 40 digits.
"""

import json
import math
from pathlib import Path

import mpmath as mp

mp.mp.dps = 40

CASES = [
    (0.5, complex(1.33, 0.0)),
    (0.5, complex(1.5, 0.1)),
    (3.0, complex(1.33, 0.0)),
    (3.0, complex(1.5, 0.1)),
]


def lmax_for(x):
    return max(4, math.ceil(x + 4 * x ** (1 / 3) + 2))


def riccati(n, z, second=False):
    """psi_n(z) = z j_n(z), or xi_n(z) = z h1_n(z), and their derivatives."""
    z = mp.mpmathify(z)
    def f(order):
        j = mp.sqrt(mp.pi / (2 * z)) * mp.besselj(order + mp.mpf(1) / 2, z)
        if second:
            y = mp.sqrt(mp.pi / (2 * z)) * mp.bessely(order + mp.mpf(1) / 2, z)
            return z * (j + 1j * y)
        return z * j
    value = f(n)
    deriv = f(n - 1) - n * value / z
    return value, deriv


def coefficients(x, m):
    x = mp.mpf(x)
    m = mp.mpc(m.real, m.imag)
    out = []
    for n in range(1, lmax_for(float(x)) + 1):
        px, dpx = riccati(n, x)
        pmx, dpmx = riccati(n, m * x)
        xx, dxx = riccati(n, x, second=True)
        a = (m * pmx * dpx - px * dpmx) / (m * pmx * dxx - xx * dpmx)
        b = (pmx * dpx - m * px * dpmx) / (pmx * dxx - m * xx * dpmx)
        out.append({
            "l": n,
            "a": [float(mp.re(a)), float(mp.im(a))],
            "b": [float(mp.re(b)), float(mp.im(b))],
        })
    return out


def main():
    cases = []
    for x, m in CASES:
        cases.append({
            "size_parameter": x,
            "index": [m.real, m.imag],
            "lmax": lmax_for(x),
            "coefficients": coefficients(x, m),
        })
    path = Path(__file__).resolve().parent.parent / "crates/cli/tests/data/mie_oracle.json"
    path.write_text(json.dumps({"cases": cases}, indent=1) + "\n")
    print(f"wrote {path}")


if __name__ == "__main__":
    main()
