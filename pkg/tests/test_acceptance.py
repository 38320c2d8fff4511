"""Acceptance criteria, one test each.

Every test prints a single ``PASS criterion N: ...`` or ``FAIL criterion N: ...``
line before asserting; run with ``pytest tests/test_acceptance.py -s`` to see them.
"""
import csv
import math
from pathlib import Path

import numpy as np
import pytest

from neumann_holes import bessel
from neumann_holes.analytic import (BoxCosine, DiskRadial, box_gamma_levels, box_spectrum, disk_spectrum,
                                    gamma_indicator, predict_shift_2d, volume_term)
from neumann_holes.assembly import assemble_all, normal_derivative
from neumann_holes.eigensolve import richardson
from neumann_holes.geometry import Disk, DomainSpec, circle_hole, generate_mesh, rectangle, refine_uniform
from neumann_holes.harness.cli import main
from neumann_holes.harness.config import ExperimentConfig, load_config
from neumann_holes.harness.fit import fit_table, log_corrected_slope, loglog_slope
from neumann_holes.harness.sweep import analytic_eigenfunction, extrapolated_eigenvalue, mesh_family, run_sweep
from neumann_holes.smalleig import random_instance, tightness_probe, verify_small_eig
from neumann_holes.torsion import (FourierHoleData, annulus_fourier_torsion, exterior_ball_torsion,
                                   radial_exterior_ode_check, solve_interior_torsion, solve_zero_mean_torsion,
                                   sup_characterization_bound)

CONFIGS = Path(__file__).resolve().parents[1] / "configs"
L4, L3 = 2**0.25, 3**0.25

# torsion solves made anywhere in this module, checked together by criterion 8
TORSION_SOLVES = []


def report(n: int, ok: bool, summary: str) -> None:
    print(f"\n{'PASS' if ok else 'FAIL'} criterion {n}: {summary}")
    assert ok, summary


def rel(a: float, b: float) -> float:
    return abs(a - b) / abs(b)


def test_criterion_01_box_spectrum():
    modes = box_spectrum((1.0, L4, L3), 3)
    m = modes[1]
    want = math.pi**2 / math.sqrt(3) + 1
    planes = box_gamma_levels(BoxCosine((1.0, L4, L3), m.n))
    c = L3 / math.pi
    want_planes = [c * math.atan(math.sqrt(2 / 3)), c * (math.pi - math.atan(math.sqrt(2 / 3)))]
    err_lam = rel(m.lam, want)
    err_planes = max(abs(a - b) for a, b in zip(planes, want_planes))
    ok = m.n == (0, 0, 1) and err_lam <= 1e-12 and len(planes) == 2 and err_planes <= 1e-12
    report(1, ok, f"lambda_001={m.lam:.12f} (rel err {err_lam:.1e}), Gamma planes {planes} (err {err_planes:.1e})")


def test_criterion_02_bessel_roots():
    a1, a2 = (m.alpha for m in disk_spectrum(1.0, 2))
    res = max(abs(bessel.j1(a1)), abs(bessel.j1(a2)))
    # the printed values are truncations: 3.8317 -> "3.831", 7.0156 -> "7.016"
    ok = (math.floor(a1 * 1000) / 1000 == 3.831 and round(a2, 3) == 7.016 and f"{a1:.4f}" == "3.8317"
          and f"{a2:.4f}" == "7.0156" and res <= 1e-12)
    report(2, ok, f"alpha_01={a1:.10f}, alpha_02={a2:.10f}, max |J1(alpha)|={res:.1e}")


def test_criterion_03_exterior_ball_torsion():
    worst = 0.0
    Y2 = 1.7
    for N in (3, 4, 5):
        for k in (1, 2, 3):
            formula = k**2 / (N + k - 2) * Y2
            ode = radial_exterior_ode_check(N, k).tau(Y2)
            worst = max(worst, rel(ode, formula), rel(exterior_ball_torsion(N, k, Y2).tau, formula))
    report(3, worst <= 1e-8, f"max relative deviation of the radial ODE over 9 (N,k) pairs: {worst:.2e}")


def test_criterion_04_annulus_fourier_vs_fem():
    rng = np.random.default_rng(1)
    worst_err, worst_order, lines = 0.0, math.inf, []
    for j in (1, 2, 3):
        data = FourierHoleData(j, tuple(rng.standard_normal(j + 1)), tuple(rng.standard_normal(j)))
        for eps in (0.05, 0.1, 0.2):
            exact = annulus_fourier_torsion(eps, 1.0, data)
            mesh = generate_mesh(DomainSpec(Disk((0.0, 0.0), 1.0), circle_hole((0.0, 0.0), eps)), 0.1)
            errs = []
            for level in range(3):
                space, K, M = assemble_all(mesh, 1)
                sol = solve_zero_mean_torsion(space, K, M, data.trace((0.0, 0.0), eps))
                TORSION_SOLVES.append(sol)
                errs.append(abs(sol.T / exact - 1))
                if level < 2:
                    mesh = refine_uniform(mesh)
            order = math.log2(errs[1] / errs[2])
            worst_err, worst_order = max(worst_err, errs[-1]), min(worst_order, order)
            lines.append(f"j={j} eps={eps}: err {errs[-1]:.2e} order {order:.2f}")
    print("\n" + "\n".join(lines))
    report(4, worst_err <= 0.01 and worst_order >= 1.8,
           f"worst finest-level error {worst_err:.2e}, slowest observed order {worst_order:.2f}")


def _sweep_and_fit(name):
    cfg = load_config(CONFIGS / name)
    table = run_sweep(cfg)
    fit = fit_table(table, cfg.fit_model)
    pred = predict_shift_2d(analytic_eigenfunction(cfg), cfg.hole_center)
    dofs = max(lv.dofs for r in table.rows for lv in r.levels)
    return cfg, table, fit, pred, dofs


@pytest.mark.slow
def test_criterion_05_nodal_coefficient():
    cfg, table, fit, pred, dofs = _sweep_and_fit("nodal.toml")
    phi = analytic_eigenfunction(cfg)
    g2 = float(np.sum(phi.gradient(np.array([cfg.hole_center])) ** 2))
    want = -2 * math.pi * g2
    ok = (min(cfg.eps) >= 0.03 and max(cfg.eps) <= 0.08 and abs(fit.exponent - 2) <= 0.1
          and rel(fit.coefficient, want) <= 0.1 and rel(pred.coefficient, want) <= 1e-12
          and bool(np.all(table.delta < 0)) and dofs <= 2e5)
    report(5, ok, f"p={fit.exponent:.4f}, C={fit.coefficient:.4f} vs -2pi|grad phi|^2={want:.4f} "
                  f"(rel {rel(fit.coefficient, want):.2%}), max dofs {dofs}")


@pytest.mark.slow
def test_criterion_06_antinode_coefficient():
    cfg, table, fit, pred, dofs = _sweep_and_fit("antinode.toml")
    phi = analytic_eigenfunction(cfg)
    A = float(phi.value(np.array([cfg.hole_center]))[0])
    want = math.pi * (phi.lam - 1) * A**2
    grad = float(np.linalg.norm(phi.gradient(np.array([cfg.hole_center]))))
    ok = (grad <= 1e-12 and bool(np.all(table.delta > 0)) and abs(fit.exponent - 2) <= 0.1
          and rel(fit.coefficient, want) <= 0.1 and rel(pred.coefficient, want) <= 1e-12)
    report(6, ok, f"all {len(table.rows)} shifts positive: {bool(np.all(table.delta > 0))}, p={fit.exponent:.4f}, "
                  f"C={fit.coefficient:.4f} vs pi(lambda-1)phi^2={want:.4f} (rel {rel(fit.coefficient, want):.2%})")


@pytest.mark.slow
def test_criterion_07_term_split():
    eps, lines, worst = 0.05, [], 0.0
    for x0 in ((0.31, 0.43), (0.27, 0.81)):
        cfg = ExperimentConfig(rectangle(0, 1, 0, L4), x0, (0.05, 0.04, 0.03, 0.02), 1)
        phi = analytic_eigenfunction(cfg)
        grad = float(np.linalg.norm(phi.gradient(np.array([x0]))))
        assert abs(float(phi.value(np.array([x0]))[0])) > 0.1 and grad > 0.1  # generic point
        ext, _, _, _ = extrapolated_eigenvalue(cfg, eps)
        delta = ext - phi.lam
        Ts = []
        for mesh in mesh_family(cfg, eps):
            space, K, M = assemble_all(mesh, cfg.order)
            sol = solve_interior_torsion(space, K, M, normal_derivative(phi.gradient))
            TORSION_SOLVES.append(sol)
            Ts.append(sol.T)
        T, _, _ = richardson(Ts, cfg.extrapolation_order)
        predicted = -T - volume_term(phi, cfg.hole(eps))
        worst = max(worst, rel(predicted, delta))
        lines.append(f"x0={x0}: delta {delta:.6e}, -T-V {predicted:.6e}, rel {rel(predicted, delta):.2%}")
    print("\n" + "\n".join(lines))
    report(7, worst <= 0.1, f"worst relative gap between -T_FEM - volume_term and delta lambda: {worst:.2%}")


def test_criterion_08_identities_and_monotonicity():
    rng = np.random.default_rng(8)
    closed_ok = True
    for j in (1, 2, 3):
        data = FourierHoleData(j, (0.0,) + tuple(rng.standard_normal(j)), tuple(rng.standard_normal(j)))
        for eps in (0.05, 0.1, 0.2):
            Ts = [annulus_fourier_torsion(eps, R, data) for R in (0.5, 1.0, 1.5, 2.0, 4.0)]
            closed_ok &= all(a >= b for a, b in zip(Ts, Ts[1:]))
    # FEM: the same hole inside disks of radius 0.5 and 1, each extrapolated over 3 levels
    f = normal_derivative(lambda x: np.column_stack([1.0 + 0 * x[:, 0], 0.5 + x[:, 0]]))
    ext = []
    for R in (0.5, 1.0):
        mesh = generate_mesh(DomainSpec(Disk((0.0, 0.0), R), circle_hole((0.0, 0.0), 0.1)), R / 8)
        Ts = []
        for level in range(3):
            space, K, M = assemble_all(mesh, 2)
            sol = solve_interior_torsion(space, K, M, f)
            TORSION_SOLVES.append(sol)
            Ts.append(sol.T)
            if level < 2:
                mesh = refine_uniform(mesh)
        ext.append(richardson(Ts, 2)[:2])
    (T_small, e_small), (T_big, e_big) = ext
    fem_ok = T_big <= T_small + e_small + e_big
    gap = max(max(s.load_identity, s.energy_identity) for s in TORSION_SOLVES)
    report(8, closed_ok and fem_ok and gap <= 1e-10,
           f"T = int fU = |U|^2 on {len(TORSION_SOLVES)} solves (worst {gap:.1e}); closed-form ordering "
           f"{closed_ok}; FEM T(R=1)={T_big:.6e} <= T(R=0.5)={T_small:.6e}")


def test_criterion_09_sup_characterization():
    phi = BoxCosine((1.0, L4), (0, 1))
    f = normal_derivative(phi.gradient)
    rng = np.random.default_rng(9)
    exceed, worst_att = 0, 0.0
    for order, center in ((1, (0.33, 0.41)), (2, (0.62, 0.7))):
        mesh = generate_mesh(DomainSpec(rectangle(0, 1, 0, L4), circle_hole(center, 0.08)), 0.08)
        space, K, M = assemble_all(mesh, order)
        sol = solve_interior_torsion(space, K, M, f)
        TORSION_SOLVES.append(sol)
        for _ in range(100):
            u = rng.standard_normal(space.dof_count)
            exceed += sup_characterization_bound(space, K, M, f, u, sol.b) > sol.T * (1 + 1e-12)
        worst_att = max(worst_att, rel(sup_characterization_bound(space, K, M, f, sol.U, sol.b), sol.T))
    report(9, exceed == 0 and worst_att <= 1e-10,
           f"200 random vectors over 2 instances, {exceed} exceed T; maximizer attains T to {worst_att:.1e}")


def test_criterion_10_small_eigenvalue_lemma():
    rng = np.random.default_rng(2024)
    passed = sum(verify_small_eig(random_instance(rng, int(rng.integers(2, 16)),
                                                  float(10 ** rng.uniform(-6, -0.3)))).passed
                 for _ in range(500))
    inst = random_instance(np.random.default_rng(5), 10, 0.1)
    d, l1, l2 = tightness_probe(inst, np.logspace(-1, -4, 7), seed=3)
    s1, s2 = loglog_slope(d, l1), loglog_slope(d, l2)
    report(10, passed == 500 and abs(s1 - 1) <= 0.1 and abs(s2 - 2) <= 0.1,
           f"{passed}/500 instances satisfy both bounds; tightness slopes {s1:.3f}, {s2:.3f}")


def test_criterion_11_closed_form_scaling():
    eps = np.logspace(-3, -1, 9)
    R = 2.0
    rng = np.random.default_rng(11)
    lines, worst = [], 0.0
    for j in (1, 2, 3):
        centred = FourierHoleData(j, (0.0,) + tuple(rng.standard_normal(j)), tuple(rng.standard_normal(j)))
        mean = FourierHoleData(j, (1.3,) + (0.0,) * j, (0.0,) * j)
        s0 = loglog_slope(eps, [annulus_fourier_torsion(e, R, centred) for e in eps])
        s1 = log_corrected_slope(eps, [annulus_fourier_torsion(e, R, mean) for e in eps])
        worst = max(worst, abs(s0 - 2 * j), abs(s1 - 2 * j))
        lines.append(f"j={j}: slope {s0:.4f} (a0=0), log-corrected slope {s1:.4f} (a0!=0)")
    print("\n" + "\n".join(lines))
    report(11, worst <= 0.02, f"worst deviation from 2j over eps in [1e-3, 1e-1]: {worst:.4f}")


def test_criterion_12_disk_gamma_figure(tmp_path):
    assert main(["gamma", "--format", "csv", "--radius", "2", "--modes", "2", "--out", str(tmp_path)]) == 0
    assert main(["gamma", "--format", "svg", "--radius", "2", "--modes", "2", "--out", str(tmp_path)]) == 0
    rows = list(csv.DictReader(open(tmp_path / "disk_gamma.csv")))
    svgs_ok = all("<svg" in (tmp_path / f"disk_gamma_k{k}.svg").read_text() for k in (1, 2))
    worst_h, worst_nodal = 0.0, 0.0
    for k in (1, 2):
        phi = DiskRadial(2.0, k)
        gamma = [float(r["radius"]) for r in rows if r["k"] == str(k) and r["kind"] == "gamma"]
        nodal = [float(r["radius"]) for r in rows if r["k"] == str(k) and r["kind"] == "nodal"]
        h = gamma_indicator(phi, np.column_stack([gamma, np.zeros(len(gamma))]))
        worst_h = max(worst_h, float(np.max(np.abs(h))))
        # 2J1^2 = J0^2 at z = alpha r / R
        z = phi.alpha * np.array(gamma) / 2
        assert np.allclose(2 * bessel.j1(z) ** 2, bessel.j0(z) ** 2, atol=1e-12)
        worst_nodal = max(worst_nodal, abs(min(nodal) - 2 * bessel.j0_zero(1) / phi.alpha))
    report(12, svgs_ok and worst_h <= 1e-12 and worst_nodal <= 1e-10,
           f"SVG and CSV written; max |h(r*)|={worst_h:.1e}; nodal radius error {worst_nodal:.1e}")
