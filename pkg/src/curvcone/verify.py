"""Seeded certification suites: every algebraic claim becomes a check.

Five suites (algebra, cone, nullvector, flow, cutoff) draw seeded samples,
evaluate the corresponding identities or inequalities, and report one
record per claim: a worst observed value, the tolerance it must meet, and
replayable failure artifacts (substream index plus the offending operator
serialized as JSON).  Reports contain no timestamps and all randomness is
keyed by (seed, tag, index) substreams, so a fixed seed yields
byte-identical JSON across runs regardless of execution order.

Check kinds:
* ``residual`` passes when worst <= tol,
* ``slack``    passes when worst >= -tol,
* ``count``    passes when worst == 0 (number of violating samples).
"""

from __future__ import annotations

import json
import math

import numpy as np

from . import cone as cn
from . import cutoff as co
from . import decomposition as dc
from . import flow as fl
from . import sampling as smp
from . import wedge as wg

SUITE_NAMES = ("algebra", "cone", "nullvector", "flow", "cutoff")
PARAM_SETS = ((0.5, 1.5), (1.0, 2.0), (0.1, 1.1))

_MAX_FAILURES = 3


class _Check:
    def __init__(self, suite, check_id, claim, kind, tol, seed):
        self.record = {
            "suite": suite,
            "id": check_id,
            "claim": claim,
            "kind": kind,
            "tol": tol,
            "seed": seed,
            "samples": 0,
            "worst": None,
            "passed": True,
            "failures": [],
        }

    def add(self, value, index=None, operator=None, context=None):
        rec = self.record
        rec["samples"] += 1
        value = float(value)
        if rec["worst"] is None:
            rec["worst"] = value
        elif rec["kind"] == "residual":
            rec["worst"] = max(rec["worst"], value)
        elif rec["kind"] == "slack":
            rec["worst"] = min(rec["worst"], value)
        else:  # count: accumulate violations
            rec["worst"] = rec["worst"] + value
        bad = (
            value > rec["tol"]
            if rec["kind"] == "residual"
            else (value < -rec["tol"] if rec["kind"] == "slack" else value != 0.0)
        )
        if bad and len(rec["failures"]) < _MAX_FAILURES:
            failure = {"index": index, "value": value}
            if context:
                failure["context"] = context
            if operator is not None:
                failure["operator"] = wg.operator_to_json_dict(operator)
            rec["failures"].append(failure)

    def count(self, violated, index=None, operator=None, context=None):
        self.add(1.0 if violated else 0.0, index=index, operator=operator, context=context)

    def done(self):
        rec = self.record
        if rec["worst"] is None:
            rec["worst"] = 0.0
        if rec["kind"] == "residual":
            rec["passed"] = rec["worst"] <= rec["tol"]
        elif rec["kind"] == "slack":
            rec["passed"] = rec["worst"] >= -rec["tol"]
        else:
            rec["passed"] = rec["worst"] == 0.0
        return rec


def _params(eta_mu):
    return cn.ConeParams(*eta_mu)


def _tag(eta_mu):
    return f"eta{eta_mu[0]}-mu{eta_mu[1]}"


# ---------------------------------------------------------------------------
# algebra suite
# ---------------------------------------------------------------------------

def suite_algebra(seed: int, n: int) -> list[dict]:
    cfg = smp.SamplerConfig(seed=seed)
    i6 = np.eye(6)

    c_exact = _Check("algebra", "identity-sharp-exact", "I # I equals 2 I exactly", "residual", 0.0, seed)
    c_exact.add(wg.frobenius(wg.sharp(i6, i6) - 2.0 * i6))

    c_a1 = _Check("algebra", "sharp-with-identity", "R # I = Ric^id/2 - R on Bianchi operators", "residual", 1e-10, seed)
    c_dual = _Check("algebra", "sharp-dual-route", "structure-constant and coordinate #-squares agree", "residual", 1e-12, seed)
    c_blk = _Check("algebra", "block-sharp-identity", "R#R = 2(A#, B#; (B#)^T, C#) in the SD basis", "residual", 1e-10, seed)
    c_nrm = _Check("algebra", "traceless-ricci-norm", "|traceless Ricci| = 2 |B|", "residual", 1e-10, seed)
    c_wey = _Check("algebra", "weyl-star-commute", "Weyl part commutes with the Hodge star", "residual", 1e-12, seed)
    c_bar = _Check("algebra", "barrier-expansion", "Q(F R + f I) = F^2 Q(R) + f F Ric^id + 3 f^2 I", "residual", 1e-10, seed)
    c_jac = _Check("algebra", "lie-jacobi", "Jacobi identity of the 2-form bracket", "residual", 1e-12, seed)
    c_adi = _Check("algebra", "bracket-pairing", "<[u,v],w> is fully antisymmetric", "residual", 1e-12, seed)
    c_ray = _Check("algebra", "ricci-kn-on-rays", "(Ric^id)(z,z) = scal/2 on unit (anti)self-dual z", "residual", 1e-10, seed)
    star = dc.hodge_star()
    basis = dc.canonical_selfdual_basis()

    for i in range(n):
        m = smp.random_bianchi(cfg, index=i)
        nrm = wg.frobenius(m)
        lhs = wg.sharp(m, i6)
        rhs = 0.5 * wg.kulkarni_nomizu(wg.ricci(m), np.eye(4)) - m
        c_a1.add(wg.frobenius(lhs - rhs) / max(1.0, nrm**2), index=i, operator=m)
        c_blk.add(dc.block_sharp_identity(m) / max(1.0, nrm**2), index=i, operator=m)
        c_nrm.add(dc.norm_identity_check(m) / max(1.0, nrm), index=i, operator=m)
        wy = dc.weyl(m)
        c_wey.add(wg.frobenius(star @ wy - wy @ star) / max(1.0, nrm), index=i, operator=m)

        rng = smp.substream(seed, "algebra-misc", i)
        g = rng.standard_normal((6, 6))
        sym = 0.5 * (g + g.T)
        c_dual.add(
            wg.frobenius(wg.sharp(sym, sym) - wg.sharp_coord(sym)) / max(1.0, wg.frobenius(sym) ** 2),
            index=i, operator=sym,
        )

        mb = wg.project_bianchi(rng.uniform(-10.0, 10.0, size=(6, 6)))
        mb = 0.5 * (mb + mb.T)
        mb = wg.project_bianchi(mb)
        big, small = rng.uniform(-10.0, 10.0, size=2)
        c_bar.add(
            wg.barrier_q_expansion(mb, big, small) / (1.0 + wg.frobenius(mb) ** 2 + small**2),
            index=i, operator=mb, context=f"Phi={big!r}, phi={small!r}",
        )

        u, v, z = rng.standard_normal((3, 6))
        scale = max(1.0, float(np.linalg.norm(u) * np.linalg.norm(v) * np.linalg.norm(z)))
        jac = (
            wg.lie_bracket(u, wg.lie_bracket(v, z))
            + wg.lie_bracket(v, wg.lie_bracket(z, u))
            + wg.lie_bracket(z, wg.lie_bracket(u, v))
        )
        c_jac.add(float(np.linalg.norm(jac)) / scale, index=i)
        p1 = float(wg.lie_bracket(u, v) @ z)
        c_adi.add(max(abs(p1 + float(wg.lie_bracket(u, z) @ v)),
                      abs(p1 + float(wg.lie_bracket(v, u) @ z))) / scale, index=i)

        kn = wg.kulkarni_nomizu(wg.ricci(m), np.eye(4))
        w3 = rng.standard_normal(3)
        w3 /= np.linalg.norm(w3)
        zeta_p = w3 @ basis.plus
        zeta_m = w3 @ basis.minus
        half_scal = 0.5 * wg.scalar(m)
        c_ray.add(
            max(abs(float(zeta_p @ kn @ zeta_p) - half_scal),
                abs(float(zeta_m @ kn @ zeta_m) - half_scal)) / max(1.0, nrm),
            index=i, operator=m,
        )

    return [c.done() for c in (c_exact, c_a1, c_dual, c_blk, c_nrm, c_wey, c_bar, c_jac, c_adi, c_ray)]


# ---------------------------------------------------------------------------
# cone suite
# ---------------------------------------------------------------------------

def suite_cone(seed: int, n: int) -> list[dict]:
    cfg = smp.SamplerConfig(seed=seed)
    checks: list[dict] = []
    small = max(2, n // 10)
    i6 = np.eye(6)

    c = _Check("cone", "l-minus-identity", "l(-I) = 1", "residual", 1e-8, seed)
    c.add(abs(cn.lower_bound_l(-i6, cn.ConeParams(1.0, 2.0), tol=1e-9) - 1.0))
    checks.append(c.done())

    for eta_mu in PARAM_SETS:
        params = _params(eta_mu)
        tag = _tag(eta_mu)

        c_scale = _Check("cone", f"membership-scaling-{tag}", "is_member(c R) = is_member(R) for c > 0", "count", 0.0, seed)
        c_mono = _Check("cone", f"shift-monotonicity-{tag}", "alpha -> is_member(R + alpha I) is monotone", "count", 0.0, seed)
        c_rot = _Check("cone", f"rotation-invariance-{tag}", "membership and l are rotation invariant", "count", 0.0, seed)
        c_homl = _Check("cone", f"l-homogeneity-{tag}", "l(c R) = c l(R) for c in {0.1, 10}", "residual", 1e-6, seed)
        for i in range(small):
            m = smp.random_bianchi(cfg, index=1000 + i)
            base = cn.is_member(m, params)
            c_scale.count(
                any(cn.is_member(c_ * m, params) != base for c_ in (0.1, 10.0)),
                index=i, operator=m,
            )
            lv = cn.lower_bound_l(m, params, tol=1e-9)
            seen_member = False
            bad = False
            for alpha in np.linspace(0.0, 2.0 * lv + 1.0, 100):
                now = cn.is_member(m + alpha * i6, params)
                if seen_member and not now:
                    bad = True
                    break
                seen_member = seen_member or now
            c_mono.count(bad, index=i, operator=m)
            q = smp.random_rotation(smp.substream(seed, "cone-rot", i), 4)
            m2 = wg.rotate_operator(m, q)
            lv2 = cn.lower_bound_l(m2, params, tol=1e-12)
            lv1 = cn.lower_bound_l(m, params, tol=1e-12)
            c_rot.count(
                cn.is_member(m2, params) != base
                or abs(lv1 - lv2) > 1e-10 * max(1.0, wg.frobenius(m)) + 2e-12,
                index=i, operator=m,
            )
            for c_ in (0.1, 10.0):
                c_homl.add(
                    abs(cn.lower_bound_l(c_ * m, params, tol=1e-9) - c_ * lv)
                    / max(1.0, c_ * wg.frobenius(m)),
                    index=i, operator=m, context=f"c={c_}",
                )
        checks += [c.done() for c in (c_scale, c_mono, c_rot, c_homl)]

        c_mid = _Check("cone", f"member-midpoints-{tag}", "midpoints of member pairs are members", "count", 0.0, seed)
        c_wpic = _Check("cone", f"wpic-shadow-{tag}", "members have A1+A2 >= 0 and C1+C2 >= 0", "count", 0.0, seed)
        c_flag = _Check("cone", f"flag2-certificate-{tag}", "members: flag certificate >= 0 and sampled min >= certificate", "slack", 0.0, seed)
        c_upic = _Check("cone", f"uniform-pic-{tag}", "members: max(A3,B3,C3) <= Lambda min(A1+A2, C1+C2)", "slack", 0.0, seed)
        c_linb = _Check("cone", f"l-linear-bound-{tag}", "l(R) <= (1 + 2/eta) |R|", "slack", 0.0, seed)
        c_pinch = None
        if params.eta < 9.0 / 16.0:
            c_pinch = _Check("cone", f"ricci-pinch-{tag}", "members with eta < 9/16: Ric >= (1 - 4 sqrt(eta)/3) scal/4", "slack", 0.0, seed)
        for i in range(n):
            m = smp.random_member(cfg, params, index=i)
            nrm = wg.frobenius(m)
            tol = 1e-10 * max(1.0, nrm)
            if i < small:
                m2 = smp.random_member(cfg, params, index=n + i)
                c_mid.count(not cn.is_member(0.5 * (m + m2), params), index=i, operator=m)
            c_wpic.count(not cn.implies_wpic(m, params), index=i, operator=m)
            smin, cert = cn.two_nonneg_flag(m, 50, seed + i)
            c_flag.add((min(cert, smin - cert) + tol) / max(1.0, nrm), index=i, operator=m)
            c_upic.add((cn.uniform_pic_check(m, params) + tol) / max(1.0, nrm), index=i, operator=m)
            if c_pinch is not None:
                c_pinch.add((cn.ricci_pinch_check(m, params) + tol) / max(1.0, nrm), index=i, operator=m)
            mb = smp.random_bianchi(cfg, index=3000 + i)
            lb = cn.lower_bound_l(mb, params, tol=1e-9)
            c_linb.add(params.c_eta * wg.frobenius(mb) + 1e-6 - lb, index=i, operator=mb)
        checks += [c.done() for c in (c_mid, c_wpic, c_flag, c_upic)]
        if c_pinch is not None:
            checks.append(c_pinch.done())
        checks.append(c_linb.done())

        c_inf = _Check("cone", f"sampled-inf-dominates-{tag}", "frame sampling never beats the closed forms on members", "slack", 1e-10, seed)
        c_ext = _Check("cone", f"extremal-attains-{tag}", "extremal frames reproduce the closed forms", "residual", 1e-10, seed)
        for i in range(small):
            m = smp.random_member(cfg, params, index=5000 + i)
            est = cn.sampled_inf(m, params, 500, seed=seed + i)
            cf = cn.hat_f(m, params)
            scale2 = max(1.0, wg.frobenius(m) ** 2)
            c_inf.add(min((e - c_) / scale2 for e, c_ in zip(est, cf)), index=i, operator=m)
            bd = dc.decompose(m)
            fr1 = cn.frame_functionals(m, cn.extremal_frame(m, "F1", blocks=bd))
            fr2 = cn.frame_functionals(m, cn.extremal_frame(m, "F2", blocks=bd))
            c_ext.add(
                max(
                    abs(params.eta * fr1.x * fr1.y - fr1.z**2 - cf[0]),
                    abs(params.mu * fr2.x - fr2.w - cf[1]),
                    abs(params.mu * fr2.y - fr2.v - cf[2]),
                ) / scale2,
                index=i, operator=m,
            )
        checks += [c.done() for c in (c_inf, c_ext)]

    c01 = _Check("cone", "isotropic-ray-detection", "multiples of I: k I detected iff k >= 0", "count", 0.0, seed)
    for k in (-2.0, -0.5, 0.0, 0.5, 3.0):
        c01.count(cn.is_c01(k * i6, 1e-8) != (k >= 0.0), context=f"k={k}")
    pert = np.zeros((6, 6))
    pert[0, 0], pert[1, 1] = 1.0, -1.0  # Weyl direction in the SD basis sense
    c01.count(cn.is_c01(np.eye(6) + 1e-3 * pert, 1e-6), context="perturbed identity")
    checks.append(c01.done())

    c_zero = _Check("cone", "vanishing-xsum-nonmember", "nonzero operators with A1+A2 = 0 are never members", "count", 0.0, seed)
    for i in range(small):
        rng = smp.substream(seed, "xsum-zero", i)
        a3 = float(rng.uniform(0.5, 2.0))
        eigs_a = np.array([-a3 * 0.3, a3 * 0.3, a3])
        eigs_c = np.array([0.1, 0.2, 0.3])
        eigs_c = eigs_c + (eigs_a.sum() - eigs_c.sum()) / 3.0
        m = dc.reassemble(np.diag(eigs_a), np.zeros((3, 3)), np.diag(eigs_c))
        for eta_mu in PARAM_SETS:
            c_zero.count(cn.is_member(m, _params(eta_mu)), index=i, operator=m, context=_tag(eta_mu))
    checks.append(c_zero.done())

    return checks


# ---------------------------------------------------------------------------
# null-vector suite
# ---------------------------------------------------------------------------

def suite_nullvector(seed: int, n: int) -> list[dict]:
    cfg = smp.SamplerConfig(seed=seed)
    checks = []
    for eta_mu in PARAM_SETS:
        params = _params(eta_mu)
        tag = _tag(eta_mu)
        c_ham = _Check("nullvector", f"hamilton-x-bound-{tag}",
                       "X^Q >= A1^2 + A2^2 + 2(A1+A2)A3 + 2B1^2 at extremal frames", "slack", 1e-8, seed)
        for face in ("F1", "F2", "F3"):
            deg = cn.FACE_DEGREE[face] + 1
            c_nv = _Check("nullvector", f"null-vector-{face.lower()}-{tag}",
                          f"boundary face {face}: reaction inequality has nonnegative slack", "slack", 1e-8, seed)
            c_pre = _Check("nullvector", f"boundary-window-{face.lower()}-{tag}",
                           "boundary sampler lands on the face as a member", "count", 0.0, seed)
            for i in range(n):
                m, cert = smp.boundary_member(cfg, params, face, index=i)
                rep = cn.null_vector_verify(m, params, face)
                nrm = wg.frobenius(m)
                c_pre.count(not rep.precondition_ok, index=i, operator=m, context=rep.message)
                c_nv.add(rep.slack / max(1.0, nrm**deg), index=i, operator=m)
                c_ham.add(cn.hamilton_intermediate_slack(m) / max(1.0, nrm**2), index=i, operator=m)
            checks += [c_nv.done(), c_pre.done()]
        checks.append(c_ham.done())
    return checks


# ---------------------------------------------------------------------------
# flow suite
# ---------------------------------------------------------------------------

def suite_flow(seed: int, n: int) -> list[dict]:
    cfg = smp.SamplerConfig(seed=seed)
    checks = []
    small = max(2, n // 10)
    i6 = np.eye(6)

    c_exact = _Check("flow", "reaction-closed-form", "from I the flow matches 1/(1-6t) times I", "residual", 1e-8, seed)
    traj = fl.integrate(i6, fl.TrajectoryConfig(dt=1e-3, t_max=0.1, rtol=1e-10))
    for s in traj.samples:
        c_fac = 1.0 / (1.0 - 6.0 * s.t)
        c_exact.add(wg.frobenius(s.operator - c_fac * i6) / (c_fac * math.sqrt(6.0)))
    checks.append(c_exact.done())

    c_ord = _Check("flow", "rk4-order", "halving the fixed step cuts the error ~16x", "residual", 4.0, seed)
    errs = []
    for dt in (1e-2, 5e-3, 2.5e-3):
        t = fl.integrate(i6, fl.TrajectoryConfig(dt=dt, t_max=0.1, adaptive=False))
        errs.append(wg.frobenius(t.final.operator - (1.0 / 0.4) * i6))
    for r in (errs[0] / errs[1], errs[1] / errs[2]):
        c_ord.add(abs(r - 16.0), context="error ratio")
    checks.append(c_ord.done())

    c_scaleq = _Check("flow", "scaling-equivariance", "integrating c R to t matches c times (R to c t)", "residual", 1e-8, seed)
    for i in range(3):
        r0 = smp.random_member(cfg, cn.ConeParams(1.0, 2.0), index=9000 + i)
        t1 = fl.integrate(2.0 * r0, fl.TrajectoryConfig(dt=1e-4, t_max=0.01, rtol=1e-11))
        t2 = fl.integrate(r0, fl.TrajectoryConfig(dt=1e-4, t_max=0.02, rtol=1e-11))
        c_scaleq.add(
            wg.frobenius(t1.final.operator - 2.0 * t2.final.operator)
            / max(1.0, wg.frobenius(t1.final.operator)),
            index=i,
        )
    checks.append(c_scaleq.done())

    for eta_mu in PARAM_SETS:
        params = _params(eta_mu)
        tag = _tag(eta_mu)
        c_inv = _Check("flow", f"member-invariance-{tag}", "trajectories from members keep l at zero", "residual", 1e-6, seed)
        c_drift = _Check("flow", f"bianchi-drift-{tag}", "Bianchi residual stays at rounding level along trajectories", "residual", 1e-9, seed)
        c_tr = _Check("flow", f"trace-balance-{tag}", "tr A = tr C is maintained along trajectories", "residual", 1e-10, seed)
        for i in range(small):
            r0 = smp.random_member(cfg, params, index=7000 + i)
            t_max = min(0.05, 0.5 / wg.frobenius(r0))
            tr = fl.integrate(r0, fl.TrajectoryConfig(dt=1e-3, t_max=t_max, rtol=1e-8, blowup_norm=1e6))
            scale = max(1.0, max(wg.frobenius(s.operator) for s in tr.samples))
            c_inv.add(fl.invariance_monitor(tr, params) / scale, index=i, operator=r0)
            c_drift.add(max(s.bianchi for s in tr.samples) / scale, index=i, operator=r0)
            worst_tr = 0.0
            for s in tr.samples:
                a, _, c3 = dc._blocks_of(s.operator)
                worst_tr = max(worst_tr, abs(float(np.trace(a) - np.trace(c3))) / max(1.0, wg.frobenius(s.operator)))
            c_tr.add(worst_tr, index=i, operator=r0)
        checks += [c.done() for c in (c_inv, c_drift, c_tr)]

    c_lineq = _Check("flow", "l-reaction-inequality",
                     "D+ l <= (scal) l + 6 l^2 + 1e-3 (1+|R|^3) dt from non-member starts", "slack", 0.0, seed)
    params = cn.ConeParams(1.0, 2.0)
    for i in range(small):
        r0 = smp.random_nonmember(cfg, params, index=i)
        t_max = min(0.02, 0.3 / wg.frobenius(r0))
        tr = fl.integrate(r0, fl.TrajectoryConfig(dt=2e-4, t_max=t_max, adaptive=False))
        rep = fl.l_inequality_monitor(tr, params)
        c_lineq.add(rep.worst_slack, index=i, operator=r0)
    checks.append(c_lineq.done())

    return checks


# ---------------------------------------------------------------------------
# cutoff suite
# ---------------------------------------------------------------------------

def suite_cutoff(seed: int, n: int) -> list[dict]:
    del n  # the sweep is a fixed grid of parameter combinations
    c_grid = _Check("cutoff", "cutoff-grid-certification",
                    "all four cutoff conclusions hold at every grid point", "slack", 0.0, seed)
    for eps in (0.1, 0.5, 1.0):
        for sigma in (0.5, 1.0, 2.0):
            fn = co.CutoffFunction(co.CutoffSpec(eps=eps, sigma=sigma, r=1.0))
            rep = co.verify_cutoff(fn)
            worst = rep.worst()
            c_grid.add(worst.margin, context=f"eps={eps}, sigma={sigma}, bound={worst.name}")
    c_var = _Check("cutoff", "cutoff-variant-constant",
                   "squared-slope variant admits a finite constant C0 >= 1", "slack", 0.0, seed)
    rep = co.theorem_variant_check(co.CutoffSpec(eps=0.5, sigma=1.0, r=0.0))
    c_var.add(rep.c0 - 1.0, context=f"C0={rep.c0!r}")
    return [c_grid.done(), c_var.done()]


# ---------------------------------------------------------------------------
# runner
# ---------------------------------------------------------------------------

_SUITE_FUNCS = {
    "algebra": suite_algebra,
    "cone": suite_cone,
    "nullvector": suite_nullvector,
    "flow": suite_flow,
    "cutoff": suite_cutoff,
}


def run(suites, seed: int, samples: int) -> dict:
    """Run the named suites and return the machine-readable report."""
    if isinstance(suites, str):
        suites = SUITE_NAMES if suites == "all" else (suites,)
    checks = []
    for name in suites:
        if name not in _SUITE_FUNCS:
            raise ValueError(f"unknown suite {name!r}; choose from {SUITE_NAMES} or 'all'")
        checks.extend(_SUITE_FUNCS[name](seed, samples))
    return {
        "seed": seed,
        "samples": samples,
        "suites": list(suites),
        "all_passed": all(c["passed"] for c in checks),
        "checks": checks,
    }


def report_json(report: dict) -> str:
    return json.dumps(report, indent=2, sort_keys=True) + "\n"


def report_table(report: dict) -> str:
    lines = []
    width = max(len(c["id"]) for c in report["checks"]) if report["checks"] else 10
    for c in report["checks"]:
        status = "PASS" if c["passed"] else "FAIL"
        lines.append(
            f"{status}  {c['id']:<{width}}  worst={c['worst']:+.3e}  tol={c['tol']:.1e}"
            f"  n={c['samples']}  [{c['suite']}]"
        )
    total = len(report["checks"])
    good = sum(c["passed"] for c in report["checks"])
    lines.append(f"{good}/{total} checks passed (seed={report['seed']}, samples={report['samples']})")
    return "\n".join(lines) + "\n"
