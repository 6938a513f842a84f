"""Independent reference values frozen into the C++ test suites.

Run: python3 tests/oracles/compute_oracles.py
Nothing here imports or calls the C++ code.
"""
import math
import numpy as np

G_LIT = 6.674e-11
G = 6.67430e-11
HBAR = 1.054571817e-34
KB = 1.380649e-23


def header(s):
    print(f"\n# {s}")


header("coupling K = 2 G m^2 / d^3 (m = 2.55 kg, d = 0.06 m, G = 6.674e-11)")
print(f"K = {2 * G_LIT * 2.55**2 / 0.06**3:.17g}")

header("final bound rhs G m^2 / (hbar d^3) (m = 2.55 kg, d = 0.06 m, CODATA G)")
print(f"rhs = {G * 2.55**2 / (HBAR * 0.06**3):.17g}")

header("two-mode squeezed vacuum r = 0.5: PPT min eigenvalue")
r = 0.5
c, s = math.cosh(2 * r), math.sinh(2 * r)
V = 0.5 * np.array([[c, s, 0, 0], [s, c, 0, 0], [0, 0, c, -s], [0, 0, -s, c]])
J = np.array([[0, 0, 1, 0], [0, 0, 0, 1], [-1, 0, 0, 0], [0, -1, 0, 0]], float)
L = np.diag([1, 1, 1, -1.0])
print(f"numeric  = {np.linalg.eigvalsh(V + 0.5j * L @ J @ L).min():.17g}")
print(f"analytic = {math.exp(-2 * r) / 2 - 0.5:.17g}")

header("reference design")
rho, R, beta, T, Q, Nn, rr = 2.26e4, 0.03, 1.0, 0.01, 2e10, 1.0, 0.01
Om = 2 * math.pi * 1e-4
m = 4 * math.pi / 3 * rho * R**3
wG = math.sqrt(G * rho)
GG = math.pi * wG**2 / (12 * beta**3 * Om)
Gth = KB * T / (HBAR * Q)
print(f"m = {m:.17g}")
print(f"omega_G = {wG:.17g}")
print(f"Gamma_G = {GG:.17g}")
print(f"Gamma_th = {Gth:.17g}")
print(f"Q_required(T=10mK) = {KB * T / (HBAR * GG):.17g}")
print(f"QoverT_required = {KB / (HBAR * GG):.17g}")
print(f"t_int = N^2/(r^2 (Gth+GG)) = {Nn**2 / (rr**2 * (Gth + GG)):.17g}")
print(f"1/(r Gamma_G) = {1 / (rr * GG):.17g}")
d = 2 * R * beta
print(f"bound --table1 rhs = {G * m**2 / (HBAR * d**3):.6e}")
