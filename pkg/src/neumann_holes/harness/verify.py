"""Property-verification suite.

Every suite is a function ``seed -> SuiteResult``.  ``verify_all`` runs them,
optionally under an injected mutation, and sorts the results by name so the
report does not depend on execution order.
"""
from __future__ import annotations

import contextlib
import math
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Sequence
from unittest import mock

import numpy as np

from .. import analytic, bessel, geometry, smalleig
from ..analytic import (BoxCosine, DiskRadial, box_gamma_levels, disk_gamma_radii, gamma_indicator,
                        predict_shift_2d, vanishing_order, volume_term)
from ..assembly import assemble_all, assemble_boundary_load, normal_derivative
from ..geometry import (DomainSpec, circle_hole, generate_mesh, mesh_problems, rectangle)
from ..torsion import (FourierHoleData, annulus_fourier_torsion, divergence_check,
                       exterior_ball_torsion, radial_exterior_ode_check, solve_interior_torsion,
                       solve_zero_mean_torsion, sup_characterization_bound)
from .classify import Region, classify_sign
from .emit import disk_figure, report_json, sweep_csv
from .fit import fit_leading_order

L4 = 2**0.25


@dataclass(frozen=True)
class SuiteResult:
    name: str
    passed: bool
    checks: int
    failures: int
    seed: int
    detail: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {"name": self.name, "passed": self.passed, "checks": self.checks,
                "failures": self.failures, "seed": self.seed, "detail": self.detail}


class _Tally:
    def __init__(self, name: str, seed: int):
        self.name, self.seed = name, seed
        self.checks = 0
        self.fail: List[str] = []
        self.detail: Dict[str, object] = {}

    def check(self, ok: bool, label: str) -> None:
        self.checks += 1
        if not ok:
            self.fail.append(label)

    def result(self) -> SuiteResult:
        d = dict(self.detail)
        if self.fail:
            d["failed"] = self.fail[:20]
        return SuiteResult(self.name, not self.fail, self.checks, len(self.fail), self.seed, d)


# ---------------------------------------------------------------------------
# closed-form suites
# ---------------------------------------------------------------------------


def _analytic_modes():
    return [
        BoxCosine((1.0, L4), (0, 1)), BoxCosine((1.0, L4), (1, 1)), BoxCosine((1.0, L4), (0, 2)),
        BoxCosine((1.0, L4, 3**0.25), (0, 0, 1)), BoxCosine((1.0, L4, 3**0.25), (1, 1, 1)),
        DiskRadial(2.0, 1), DiskRadial(2.0, 2), DiskRadial(1.0, 1, center=(0.3, -0.2)),
    ]


def _random_interior(phi, rng, count: int) -> np.ndarray:
    box = np.array(phi.bbox).reshape(-1, 2)
    out = []
    while len(out) < count:
        p = box[:, 0] + (box[:, 1] - box[:, 0]) * rng.random(len(box))
        if phi.contains(p[None, :])[0]:
            out.append(p)
    return np.array(out)


def suite_analytic_residuals(seed: int) -> SuiteResult:
    t = _Tally("analytic_residuals", seed)
    rng = np.random.default_rng(seed)
    for phi in _analytic_modes():
        x = _random_interior(phi, rng, 100)
        v = phi.value(x)
        sup = np.max(np.abs(v))
        res = np.abs(-phi.laplacian(x) + v - phi.lam * v)
        t.check(np.max(res) <= 1e-8 * phi.lam * sup, f"pde {phi}")
        # outer boundary normal derivative
        if isinstance(phi, DiskRadial):
            th = 2 * np.pi * rng.random(100)
            nrm = np.column_stack([np.cos(th), np.sin(th)])
            xb = np.asarray(phi.center) + phi.R * nrm
        else:
            box = np.array(phi.bbox).reshape(-1, 2)
            xb = box[:, 0] + (box[:, 1] - box[:, 0]) * rng.random((100, phi.dim))
            axis = rng.integers(0, phi.dim, 100)
            side = rng.integers(0, 2, 100)
            xb[np.arange(100), axis] = box[axis, side]
            nrm = np.zeros_like(xb)
            nrm[np.arange(100), axis] = np.where(side == 1, 1.0, -1.0)
        dn = np.einsum("ij,ij->i", phi.gradient(xb), nrm)
        t.check(np.max(np.abs(dn)) <= 1e-8 * max(1.0, sup), f"neumann {phi}")
    return t.result()


def suite_bessel(seed: int) -> SuiteResult:
    t = _Tally("bessel", seed)
    a1, a2 = bessel.j1_zero(1), bessel.j1_zero(2)
    t.check(f"{a1:.3f}" == "3.832" and abs(a1 - 3.831) < 1e-3, "alpha01 digits")
    t.check(f"{a2:.3f}" == "7.016", "alpha02 digits")
    for k in range(1, 6):
        t.check(abs(bessel.j1(bessel.j1_zero(k))) <= 1e-12, f"J1 residual {k}")
        t.check(abs(bessel.j0(bessel.j0_zero(k))) <= 1e-12, f"J0 residual {k}")
    # Wronskian-type identity J0' = -J1 by central differences
    z = np.linspace(0.5, 30, 50)
    d = (bessel.j0(z + 1e-5) - bessel.j0(z - 1e-5)) / 2e-5
    t.check(np.max(np.abs(d + bessel.j1(z))) < 1e-9, "J0' = -J1")
    t.detail.update(alpha01=a1, alpha02=a2)
    return t.result()


def suite_gamma_interface(seed: int) -> SuiteResult:
    """Box Γ planes and disk Γ circles against independent closed forms."""
    t = _Tally("gamma_interface", seed)
    box = BoxCosine((1.0, L4, 3**0.25), (0, 0, 1))
    c = 3**0.25 / math.pi
    want = [c * math.atan(math.sqrt(2 / 3)), c * (math.pi - math.atan(math.sqrt(2 / 3)))]
    got = box_gamma_levels(box)
    t.check(len(got) == 2 and max(abs(a - b) for a, b in zip(got, want)) <= 1e-12, "box planes")
    t.check(abs(box.lam - (math.pi**2 / math.sqrt(3) + 1)) <= 1e-12, "box eigenvalue")
    for k in (1, 2):
        phi = DiskRadial(2.0, k)
        radii = disk_gamma_radii(phi)
        for r in radii:
            h = float(gamma_indicator(phi, np.array([[r, 0.0]]))[0])
            t.check(abs(h) <= 1e-12, f"h(r*) mode {k}")
            z = phi.alpha * r / phi.R
            t.check(abs(2 * bessel.j1(z) ** 2 - bessel.j0(z) ** 2) <= 1e-12, f"2J1^2=J0^2 mode {k}")
        for m, r in enumerate(phi.nodal_radii(), start=1):
            t.check(abs(r - 2 * bessel.j0_zero(m) / phi.alpha) <= 1e-10, f"nodal radius {k},{m}")
        t.detail[f"disk_mode_{k}_gamma_radii"] = radii
    return t.result()


def suite_exterior_torsion(seed: int) -> SuiteResult:
    t = _Tally("exterior_torsion", seed)
    worst = 0.0
    for N in (3, 4, 5):
        for k in (1, 2, 3):
            chk = radial_exterior_ode_check(N, k)
            closed = exterior_ball_torsion(N, k, 1.0).tau
            rel = abs(chk.tau(1.0) - closed) / closed
            worst = max(worst, rel, chk.max_rel_deviation)
            t.check(rel <= 1e-8 and chk.max_rel_deviation <= 1e-8, f"N={N} k={k}")
    t.detail["max_rel_error"] = worst
    return t.result()


def suite_taylor(seed: int) -> SuiteResult:
    t = _Tally("taylor", seed)
    rng = np.random.default_rng(seed)
    # nodal points: the vanishing-order polynomial is harmonic
    cases = [(BoxCosine((1.0, L4), (0, 1)), (0.37, L4 / 2)), (BoxCosine((1.0, L4), (1, 1)), (0.5, L4 / 2)),
             (DiskRadial(2.0, 1), (2 * bessel.j0_zero(1) / bessel.j1_zero(1), 0.0))]
    for phi, x0 in cases:
        k, P = vanishing_order(phi, x0)
        t.check(P.harmonic_defect() <= 1e-10 * max(abs(v) for v in P.coeffs.values()), f"harmonic {phi}")
    # critical non-nodal point in the plane: ΔP2 = (1 - λ) φ(x0)
    for phi, x0 in [(BoxCosine((1.0, L4), (0, 2)), (0.4, L4 / 2)), (DiskRadial(2.0, 1), (0.0, 0.0))]:
        k, P = vanishing_order(phi, x0)
        lap = P.laplacian().get((0, 0), 0.0)
        t.check(k == 2 and abs(lap - (1 - phi.lam) * float(phi.value(np.array([x0]))[0])) <= 1e-10,
                f"laplacian P2 {phi}")
    # Taylor remainder decays like r^(k+1)
    phi = BoxCosine((1.0, L4), (1, 1))
    for x0 in [(0.5, 0.3), (0.5, L4 / 2), (0.31, 0.77)]:
        k, P = vanishing_order(phi, x0)
        table = phi.derivative_table(x0, k)
        base = float(phi.value(np.array([x0]))[0])
        polys = [analytic.TaylorPolynomial.from_table(x0, i, table) for i in range(1, k + 1)]
        d = rng.standard_normal(2)
        d /= np.linalg.norm(d)
        rs = np.logspace(-4, -2, 7)
        rem = [abs(float(phi.value((np.asarray(x0) + r * d)[None])[0]) - base
                   - sum(float(Pi((r * d)[None])[0]) for Pi in polys)) for r in rs]
        slope = float(np.polyfit(np.log(rs), np.log(rem), 1)[0])
        t.check(slope >= k + 0.9, f"taylor slope at {x0}: {slope:.3f}")
    return t.result()


def _split_prediction(phi, x0, eps: float = 1e-4) -> float:
    """Limit coefficient of -T - volume from the annulus closed form and quadrature."""
    k, P = vanishing_order(phi, x0)
    value = float(phi.value(np.array([x0]))[0])
    if k == 1 or value != 0.0 and abs(value) > 1e-9:
        g = phi.gradient(np.array([x0]))[0] if k == 1 else np.zeros(2)
        data = FourierHoleData(1, (0.0, g[0]), (g[1],)) if k == 1 else None
        T = annulus_fourier_torsion(eps, 1.0, data) if data is not None else 0.0
        power = 2
    else:
        data = FourierHoleData.from_polynomial(P.monomials(), k)
        T = annulus_fourier_torsion(eps, 1.0, data)
        power = 2 * k
    V = volume_term(phi, circle_hole(x0, eps), epsrel=1e-11)
    return (-T - V) / eps**power


def suite_shift_coefficient(seed: int) -> SuiteResult:
    """predict_shift_2d against the two-term split built from independent pieces."""
    t = _Tally("shift_coefficient", seed)
    rng = np.random.default_rng(seed)
    cases = [
        (BoxCosine((1.0, L4), (0, 1)), (0.5, L4 / 2)),   # nodal
        (BoxCosine((1.0, L4), (0, 2)), (0.5, L4 / 2)),   # critical non-nodal
        (BoxCosine((1.0, L4), (1, 1)), (0.5, L4 / 2)),   # saddle, k = 2
        (DiskRadial(2.0, 1), (0.0, 0.0)),                 # disk centre
    ]
    phi = BoxCosine((1.0, L4), (1, 1))
    for _ in range(4):
        cases.append((phi, (0.2 + 0.6 * rng.random(), 0.2 + 0.8 * rng.random())))
    worst = 0.0
    for phi, x0 in cases:
        pred = predict_shift_2d(phi, x0)
        split = _split_prediction(phi, x0)
        rel = abs(pred.coefficient - split) / max(abs(split), 1e-300)
        worst = max(worst, rel)
        t.check(rel <= 1e-6, f"{phi} at {x0}: {pred.coefficient} vs {split}")
    t.detail["max_rel_error"] = worst
    return t.result()


def suite_membership(seed: int) -> SuiteResult:
    """Nodal points classify as Ω⁻ and nonzero critical points as Ω⁺."""
    t = _Tally("membership", seed)
    rng = np.random.default_rng(seed)
    boxes = [BoxCosine((1.0, L4), (1, 1)), BoxCosine((1.0, L4), (2, 1)), BoxCosine((1.0, L4), (0, 3)),
             BoxCosine((1.0, L4, 3**0.25), (1, 0, 2))]
    disks = [DiskRadial(2.0, 2), DiskRadial(2.0, 3)]
    for _ in range(50):
        if rng.random() < 0.7:
            phi = boxes[rng.integers(len(boxes))]
            axis = int(rng.choice([i for i, v in enumerate(phi.n) if v]))
            x = np.array([s * (0.05 + 0.9 * rng.random()) for s in phi.sides])
            m = rng.integers(phi.n[axis])
            x[axis] = phi.sides[axis] * (m + 0.5) / phi.n[axis]
        else:
            phi = disks[rng.integers(len(disks))]
            r = phi.nodal_radii()[rng.integers(len(phi.nodal_radii()))]
            th = 2 * np.pi * rng.random()
            x = r * np.array([math.cos(th), math.sin(th)])
        t.check(classify_sign(x, phi) == Region.OMEGA_MINUS, f"nodal {x}")
    for _ in range(50):
        if rng.random() < 0.6:
            phi = boxes[rng.integers(len(boxes))]
            x = []
            for s, n in zip(phi.sides, phi.n):
                if n == 0:
                    x.append(s * (0.05 + 0.9 * rng.random()))
                else:
                    # interior extrema of cos(nπx/s) sit at multiples of s/n
                    x.append(s * rng.integers(1, n) / n if n > 1 else s * rng.integers(0, 2))
            x = np.array(x, dtype=float)
        else:
            phi = disks[rng.integers(len(disks))]
            m = int(rng.integers(0, phi.k))
            r = 0.0 if m == 0 else phi.R * bessel.j1_zero(m) / phi.alpha
            th = 2 * np.pi * rng.random()
            x = r * np.array([math.cos(th), math.sin(th)])
        t.check(classify_sign(x, phi) == Region.OMEGA_PLUS, f"critical {x}")
    return t.result()


def suite_smalleig(seed: int) -> SuiteResult:
    t = _Tally("smalleig", seed)
    rng = np.random.default_rng(seed)
    for _ in range(500):
        dim = int(rng.integers(2, 16))
        inst = smalleig.random_instance(rng, dim, float(10 ** rng.uniform(-6, -0.3)))
        rep = smalleig.verify_small_eig(inst)
        t.check(rep.pass1, "first bound")
        t.check(rep.pass2, "second bound")
    inst = smalleig.random_instance(np.random.default_rng(seed + 1), 10, 0.1)
    d, l1, l2 = smalleig.tightness_probe(inst, np.logspace(-1, -4, 7), seed)
    s1 = float(np.polyfit(np.log(d), np.log(l1), 1)[0])
    s2 = float(np.polyfit(np.log(d), np.log(l2), 1)[0])
    t.check(abs(s1 - 1) <= 0.1, f"slope1 {s1}")
    t.check(abs(s2 - 2) <= 0.1, f"slope2 {s2}")
    t.detail.update(instances=500, slope1=s1, slope2=s2)
    return t.result()


# ---------------------------------------------------------------------------
# finite-element suites
# ---------------------------------------------------------------------------


def _hole_mesh(eps: float = 0.1, center=(0.42, 0.55), h: float = 0.08, fill: bool = False, seed: int = 0):
    spec = DomainSpec(rectangle(0.0, 1.0, 0.0, L4), circle_hole(center, eps))
    return generate_mesh(spec, h, seed=seed, fill_hole=fill)


def suite_mesh_invariants(seed: int) -> SuiteResult:
    t = _Tally("mesh_invariants", seed)
    specs = [
        DomainSpec(rectangle(0.0, 1.0, 0.0, L4), circle_hole((0.42, 0.55), 0.05)),
        DomainSpec(geometry.Disk((0.0, 0.0), 1.0), circle_hole((0.0, 0.0), 0.1)),
        DomainSpec(rectangle(0.0, 1.0, 0.0, 1.0),
                   geometry.HoleSpec(geometry.Polygon(((1, 0), (0, 1), (-1, 0), (0, -1))), (0.5, 0.5), 0.08)),
    ]
    for spec in specs:
        mesh = generate_mesh(spec, 0.1, seed=seed)
        t.check(not mesh_problems(mesh), f"invariants {spec.outer}")
        t.check(abs(mesh.area() - spec.area) <= 0.02 * spec.area, "area")
        fine = geometry.refine_uniform(mesh)
        t.check(not mesh_problems(fine), "refined invariants")
    return t.result()


def suite_torsion_identity(seed: int) -> SuiteResult:
    """Divergence identity on the hole boundary and T = bᵀU = UᵀAU on every solve."""
    t = _Tally("torsion_identity", seed)
    worst = 0.0
    for order in (1, 2):
        mesh = _hole_mesh(seed=seed)
        space, K, M = assemble_all(mesh, order)
        # the chordal hole boundary carries exact curve normals, so the gap is O(h^2);
        # a reversed orientation gives about 2
        div = divergence_check(space)
        t.check(div <= 1e-2, f"divergence P{order}: {div:.3e}")
        phi = BoxCosine((1.0, L4), (1, 1))
        f = normal_derivative(phi.gradient)
        for sol in (solve_interior_torsion(space, K, M, f), solve_zero_mean_torsion(space, K, M, f)):
            worst = max(worst, sol.load_identity, sol.energy_identity)
            t.check(sol.load_identity <= 1e-10 and sol.energy_identity <= 1e-10, f"identities P{order}")
            t.check(sol.T > 0, "positive rigidity")
        # discrete load against the exact boundary integral of ∂_ν of a linear function
        b = assemble_boundary_load(space, normal_derivative(lambda x: np.tile([1.0, 0.0], (len(x), 1))))
        # ∫_{∂hole} (e1·ν) u ds = -∫_hole ∂x u dx for u = x (normal into the hole) = -|hole|
        u = space.interpolate(lambda x: x[:, 0])
        area = geometry.HoleSpec(geometry.Circle(), mesh.spec.hole.center, mesh.spec.hole.eps).area
        t.check(abs(b @ u + area) <= 0.02 * area, f"load sign P{order}")
    t.detail["max_identity_gap"] = worst
    return t.result()


def suite_sup_characterization(seed: int) -> SuiteResult:
    t = _Tally("sup_characterization", seed)
    rng = np.random.default_rng(seed)
    mesh = _hole_mesh(seed=seed)
    space, K, M = assemble_all(mesh, 1)
    f = normal_derivative(BoxCosine((1.0, L4), (0, 1)).gradient)
    sol = solve_interior_torsion(space, K, M, f)
    for i in range(100):
        if i % 2:
            u = rng.standard_normal(space.dof_count)
        else:
            c = rng.standard_normal(6)
            u = space.interpolate(lambda x: c[0] + c[1] * x[:, 0] + c[2] * x[:, 1] + c[3] * np.sin(3 * x[:, 0])
                                  + c[4] * np.cos(2 * x[:, 1]) + c[5] * x[:, 0] * x[:, 1])
        t.check(sup_characterization_bound(space, K, M, f, u, sol.b) <= sol.T * (1 + 1e-12), "random vector")
    att = sup_characterization_bound(space, K, M, f, np.asarray(sol.U), sol.b)
    t.check(abs(att - sol.T) <= 1e-10 * sol.T, "maximizer attains T")
    t.detail.update(T=sol.T, attained=att)
    return t.result()


def suite_torsion_monotonicity(seed: int) -> SuiteResult:
    """Rigidity decreases when the outer domain grows with the hole fixed."""
    t = _Tally("torsion_monotonicity", seed)
    rng = np.random.default_rng(seed)
    for j in (1, 2, 3):
        data = FourierHoleData(j, (0.0,) + tuple(rng.standard_normal(j)), tuple(rng.standard_normal(j)))
        for eps in (0.05, 0.1, 0.2):
            Ts = [annulus_fourier_torsion(eps, R, data) for R in (0.5, 1.0, 1.5, 2.0, 4.0)]
            t.check(all(a >= b for a, b in zip(Ts, Ts[1:])), f"closed form j={j} eps={eps}")
    # finite elements: disks of radius 0.5 and 1 around the same hole
    f = normal_derivative(lambda x: np.column_stack([1.0 + 0 * x[:, 0], 0.5 + x[:, 0]]))
    vals = []
    for R in (0.5, 1.0):
        mesh = generate_mesh(DomainSpec(geometry.Disk((0.0, 0.0), R), circle_hole((0.0, 0.0), 0.1)), R / 8,
                             seed=seed)
        space, K, M = assemble_all(mesh, 2)
        vals.append(solve_interior_torsion(space, K, M, f).T)
    t.check(vals[1] <= vals[0] * (1 + 1e-3), f"fem {vals}")
    t.detail["fem"] = vals
    return t.result()


def suite_smalleig_fem(seed: int) -> SuiteResult:
    t = _Tally("smalleig_fem", seed)
    for eps in (0.1, 0.05):
        mesh = _hole_mesh(eps=eps, center=(0.38, 0.33), h=0.06, fill=True, seed=seed)
        chk = smalleig.fem_lemma_from_mesh(mesh, 1)
        r = chk.report
        t.check(r.passed, f"bounds eps={eps}")
        t.check(chk.delta_identity <= 1e-8, f"delta identity eps={eps}")
        t.check(chk.delta_bound_holds, f"delta <= 2 lam ||U|| eps={eps}")
        t.check(r.lam_gap <= chk.main_bound, f"main bound eps={eps}")
    return t.result()


def suite_fit_synthetic(seed: int) -> SuiteResult:
    t = _Tally("fit_synthetic", seed)
    eps = np.array([0.1, 0.08, 0.06, 0.04, 0.03])
    f1 = fit_leading_order(eps, -3 * eps**2)
    t.check(abs(f1.exponent - 2) <= 1e-12 and abs(f1.coefficient + 3) <= 1e-12, "power")
    f2 = fit_leading_order(eps, -2 * eps**4 * np.abs(np.log(eps)), model="power_log")
    t.check(abs(f2.exponent - 4) <= 1e-6, "power_log")
    return t.result()


def suite_emit_determinism(seed: int) -> SuiteResult:
    t = _Tally("emit_determinism", seed)
    phi = DiskRadial(2.0, 1)
    a = disk_figure(phi, disk_gamma_radii(phi), phi.nodal_radii())
    b = disk_figure(phi, disk_gamma_radii(phi), phi.nodal_radii())
    t.check(a == b and "viewBox" in a, "svg")
    t.check(report_json({"x": 1.0}) == report_json({"x": 1.0}), "json")
    t.check(sweep_csv([]) == "eps,lambda_eps,delta_lambda,error_bar\n", "csv header")
    return t.result()


SUITES: Dict[str, Callable[[int], SuiteResult]] = {
    "analytic_residuals": suite_analytic_residuals,
    "bessel": suite_bessel,
    "emit_determinism": suite_emit_determinism,
    "exterior_torsion": suite_exterior_torsion,
    "fit_synthetic": suite_fit_synthetic,
    "gamma_interface": suite_gamma_interface,
    "membership": suite_membership,
    "mesh_invariants": suite_mesh_invariants,
    "smalleig": suite_smalleig,
    "smalleig_fem": suite_smalleig_fem,
    "sup_characterization": suite_sup_characterization,
    "taylor": suite_taylor,
    "shift_coefficient": suite_shift_coefficient,
    "torsion_identity": suite_torsion_identity,
    "torsion_monotonicity": suite_torsion_monotonicity,
}


@contextlib.contextmanager
def mutation(name: Optional[str]):
    """Inject a known defect for testing that the suites notice it."""
    if name is None:
        yield
    elif name == "normal_sign":
        with mock.patch.object(geometry, "_DOMAIN_NORMAL_SIGN", -geometry._DOMAIN_NORMAL_SIGN):
            yield
    elif name == "gamma_prefactor":
        with mock.patch.object(analytic, "gamma_prefactor", lambda N: N / (N - 2) if N > 2 else 3.0):
            yield
    else:
        raise ValueError(f"unknown mutation {name!r}")


MUTATIONS = ("normal_sign", "gamma_prefactor")


@dataclass(frozen=True)
class VerifyReport:
    seed: int
    results: tuple
    mutation: Optional[str] = None

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.results)

    @property
    def exit_code(self) -> int:
        return 0 if self.passed else 1

    def by_name(self, name: str) -> SuiteResult:
        return next(r for r in self.results if r.name == name)

    def to_dict(self) -> dict:
        return {"seed": self.seed, "mutation": self.mutation, "passed": self.passed,
                "suites": [r.to_dict() for r in self.results]}


def verify_all(seed: int = 0, suites: Optional[Sequence[str]] = None,
               inject: Optional[str] = None) -> VerifyReport:
    names = sorted(SUITES) if suites is None else sorted(suites)
    unknown = [n for n in names if n not in SUITES]
    if unknown:
        raise ValueError(f"unknown suites {unknown}")
    results = []
    with mutation(inject):
        for name in names:
            try:
                results.append(SUITES[name](seed))
            except Exception as exc:  # a crashing suite is a failing suite
                results.append(SuiteResult(name, False, 1, 1, seed, {"error": f"{type(exc).__name__}: {exc}"}))
    return VerifyReport(seed, tuple(sorted(results, key=lambda r: r.name)), inject)
