"""Reference values for the complex gamma function (40 significant digits).

Run with `python3 gamma_mpmath.py`; the printed values are frozen into the
unit tests of `specfun`.
"""
import mpmath as mp

mp.mp.dps = 40
POINTS = [1 + 1j * mp.pi, 0.5 + 4j, -2.5 + 1j, 10 + 20j, 3 - 45j,
          -9.3 + 0.7j, 49 + 3j, 0.25 - 0.1j, 2 + 50j]

for z in POINTS:
    g = mp.gamma(z)
    print(complex(z), mp.nstr(g.real, 20), mp.nstr(g.imag, 20))
