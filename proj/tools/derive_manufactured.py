#!/usr/bin/env python3
"""Symbolic derivation of the closed-form manufactured fields.

Regenerates include/olmfsi/manufactured_fields.hpp:

    python3 tools/derive_manufactured.py > include/olmfsi/manufactured_fields.hpp

Two problems are derived:

* strip FSI: a fluid layer (0,1)x(0,R) under a solid layer (0,1)x(R,R+Hs).
  The solid is displaced by H(x) e_y with H(x) = Hs*2x(1-x); the fluid is
  stretched by (x, y) -> (x, y(1 + H(x)/R)) and carries the Piola transform of
  a parabolic reference profile, written through its stream function so it is
  divergence free by construction. Pressure is 1 - x.
* trig Stokes: u = curl(sin^2(pi x) sin^2(pi y)), p = cos(pi x) cos(pi y).
"""
import sympy as sp

x, y = sp.symbols("x y", real=True)
R, Hs, U0, nu, mu, lam = sp.symbols("R Hs U0 nu mu lam", positive=True)


def code(expr):
    return sp.ccode(sp.simplify(expr))


def emit_fn(name, args, exprs, doc=None):
    lines = []
    if doc:
        lines.append(f"/// {doc}")
    if len(exprs) == 1:
        lines.append(f"inline double {name}({args}) {{")
        lines.append(f"  return {code(exprs[0])};")
    else:
        lines.append(f"inline std::array<double, {len(exprs)}> {name}({args}) {{")
        body = ",\n          ".join(code(e) for e in exprs)
        lines.append(f"  return {{{body}}};")
    lines.append("}")
    return "\n".join(lines)


def grad(v):
    return [[sp.diff(v[i], x), sp.diff(v[i], y)] for i in range(2)]


def div_rows(T):
    return [sp.diff(T[i][0], x) + sp.diff(T[i][1], y) for i in range(2)]


out = []

# ---------------------------------------------------------------- strip FSI
H = Hs * 2 * x * (1 - x)
s = 1 + H / R
Y = y / s
psi_ref = U0 * (R * Y**2 / 2 - Y**3 / 3)
u = [sp.diff(psi_ref, y), -sp.diff(psi_ref, x)]
gu = grad(u)
p = 1 - x
lap = [sp.diff(u[i], x, 2) + sp.diff(u[i], y, 2) for i in range(2)]
f = [-nu * lap[0] + sp.diff(p, x), -nu * lap[1] + sp.diff(p, y)]

fa = "double x, double y, double R, double Hs, double U0"
out.append(emit_fn("strip_fluid_velocity", fa, u))
out.append(emit_fn("strip_fluid_velocity_gradient", fa,
                   [gu[0][0], gu[0][1], gu[1][0], gu[1][1]],
                   "Row-major (du_x/dx, du_x/dy, du_y/dx, du_y/dy)."))
out.append(emit_fn("strip_fluid_pressure", "double x, double y", [p]))
out.append(emit_fn("strip_fluid_force", fa + ", double nu", f))

# solid: reference coordinates (x, y) = (X, Y)
us = [sp.Integer(0), H]
F = sp.Matrix([[1 + sp.diff(us[0], x), sp.diff(us[0], y)],
               [sp.diff(us[1], x), 1 + sp.diff(us[1], y)]])
E = (F.T * F - sp.eye(2)) / 2
S = 2 * mu * E + lam * E.trace() * sp.eye(2)
Pi = F * S
fs = [-(sp.diff(Pi[i, 0], x) + sp.diff(Pi[i, 1], y)) for i in range(2)]
eps = (F - sp.eye(2) + (F - sp.eye(2)).T) / 2
sig_lin = 2 * mu * eps + lam * eps.trace() * sp.eye(2)
fs_lin = [-(sp.diff(sig_lin[i, 0], x) + sp.diff(sig_lin[i, 1], y)) for i in range(2)]

sa = "double x, double y, double Hs"
out.append(emit_fn("strip_solid_displacement", sa, us))
out.append(emit_fn("strip_solid_displacement_gradient", sa,
                   [sp.diff(us[0], x), sp.diff(us[0], y), sp.diff(us[1], x), sp.diff(us[1], y)]))
out.append(emit_fn("strip_solid_force_stvk", sa + ", double mu, double lam", fs))
out.append(emit_fn("strip_solid_force_linear", sa + ", double mu, double lam", fs_lin))

# Auxiliary traction on the reference interface Y = R, solid outward normal (0,-1).
nhat = sp.Matrix([0, -1])
cofF = sp.Matrix([[F[1, 1], -F[1, 0]], [-F[0, 1], F[0, 0]]])
area_normal = cofF * nhat  # J F^{-T} nhat, depends only on tangential derivatives
at_iface = {y: R + H}
gu_i = sp.Matrix(gu).subs(at_iface)
p_i = p.subs(at_iface)
sig_full = nu * gu_i - p_i * sp.eye(2)
sig_sym = nu * (gu_i + gu_i.T) - p_i * sp.eye(2)
for tag, Pmat in (("stvk", Pi), ("linear", sig_lin)):
    Pi_i = Pmat.subs(y, R)
    for stag, sig in (("full", sig_full), ("sym", sig_sym)):
        ta = Pi_i * nhat - sig * area_normal
        out.append(emit_fn(f"strip_aux_traction_{tag}_{stag}",
                           "double x, double R, double Hs, double U0, double nu, double mu, double lam",
                           [ta[0], ta[1]]))

# ---------------------------------------------------------------- trig Stokes
psi = sp.sin(sp.pi * x) ** 2 * sp.sin(sp.pi * y) ** 2
ut = [sp.diff(psi, y), -sp.diff(psi, x)]
gut = grad(ut)
pt = sp.cos(sp.pi * x) * sp.cos(sp.pi * y)
lapt = [sp.diff(ut[i], x, 2) + sp.diff(ut[i], y, 2) for i in range(2)]
ft = [-nu * lapt[0] + sp.diff(pt, x), -nu * lapt[1] + sp.diff(pt, y)]
out.append(emit_fn("trig_velocity", "double x, double y", ut))
out.append(emit_fn("trig_velocity_gradient", "double x, double y",
                   [gut[0][0], gut[0][1], gut[1][0], gut[1][1]]))
out.append(emit_fn("trig_pressure", "double x, double y", [pt]))
out.append(emit_fn("trig_force", "double x, double y, double nu", ft))

print("""// Generated by tools/derive_manufactured.py. Do not edit by hand.
#pragma once

#include <array>
#include <cmath>

namespace olmfsi::manufactured {

using std::cos;
using std::pow;
using std::sin;
using std::sqrt;
constexpr double M_PI_VALUE = 3.14159265358979323846;
""")
print("\n\n".join(out).replace("M_PI", "M_PI_VALUE"))
print("\n}  // namespace olmfsi::manufactured")
