"""Resolvent norms, pseudospectrum grids, and perturbation certificates.

Three sets are tracked on finite sections: the strict set (resolvent norm
above 1/eps), its closure relaxation (>=), and the level set (= 1/eps within
a relative band).  Two constructive routines produce rank-one certificates:
an eigenvalue-planting perturbation from a resolvent witness, and a
norm-c perturbation S with inf ||(T+S)x|| ~ 0 built either from a converging
minimizer or from a disjointified escaping family.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .coeffs import Coeffs
from . import spaces as sp
from . import operators as op
from .opnorm import OpnormConfig, DEFAULT_CFG, matrix_norm

SINGULAR_COND = 1e14


# ---------------------------------------------------------------------------
# resolvent norms and point classification
# ---------------------------------------------------------------------------

def _resolvent_section(T, z: complex, N: int) -> np.ndarray:
    M = op.truncate_matrix(T, N)
    return M - complex(z) * np.eye(N, dtype=complex)


def resolvent_norm(T, space, z: complex, N: int,
                   cfg: OpnormConfig = DEFAULT_CFG,
                   with_witness: bool = False):
    """||(T_N - zI)^{-1}|| as a subordinate norm; +inf when singular."""
    A = _resolvent_section(T, z, N)
    if np.linalg.cond(A) > SINGULAR_COND:
        return (math.inf, None) if with_witness else math.inf
    inv = np.linalg.inv(A)
    val, w, _ = matrix_norm(inv, space, space, cfg)
    return (val, w) if with_witness else val


def classify_point(T, space, z: complex, eps: float, N: int,
                   cfg: OpnormConfig = DEFAULT_CFG,
                   band: float = 1e-6) -> str:
    """strict | level | outside for the eps-pseudospectrum on the N-section.

    The level band is relative (exact equality is measure zero in floating
    point) and is checked before the strict comparison.
    """
    if eps <= 0:
        raise ValueError("eps must be positive")
    r = resolvent_norm(T, space, z, N, cfg)
    thr = 1.0 / eps
    if r == math.inf:
        return "strict"
    if abs(r - thr) <= band * thr:
        return "level"
    return "strict" if r > thr else "outside"


# ---------------------------------------------------------------------------
# grid scans
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PspecGrid:
    region: tuple          # (re_min, re_max, im_min, im_max)
    resolution: int        # cells per axis
    eps: float
    N: int
    res: tuple             # re axis values
    ims: tuple             # im axis values
    resnorms: tuple        # row-major, rows = fixed im starting at im_min
    classes: tuple         # same layout, tags strict | level | outside

    def cells(self):
        k = 0
        for im in self.ims:
            for re in self.res:
                yield complex(re, im), self.resnorms[k], self.classes[k]
                k += 1

    def to_csv(self) -> str:
        lines = ["re,im,resnorm,class"]
        for z, r, c in self.cells():
            rs = "inf" if r == math.inf else "%.12g" % r
            lines.append("%.12g,%.12g,%s,%s" % (z.real, z.imag, rs, c))
        return "\n".join(lines) + "\n"

    def to_json_obj(self):
        return {
            "schema_version": 1,
            "region": list(self.region),
            "resolution": self.resolution,
            "eps": self.eps,
            "N": self.N,
            "cells": [[z.real, z.imag,
                       None if r == math.inf else r, c]
                      for z, r, c in self.cells()],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_json_obj())


def grid_scan(T, space, region, resolution: int, eps: float, N: int,
              cfg: OpnormConfig = DEFAULT_CFG, band: float = 1e-6) -> PspecGrid:
    """Classify every cell center of a rectangular complex-plane grid."""
    if resolution < 2:
        raise ValueError("resolution must be at least 2 per axis")
    re0, re1, im0, im1 = region
    res_axis = np.linspace(re0, re1, resolution)
    im_axis = np.linspace(im0, im1, resolution)
    thr = 1.0 / eps
    resnorms = []
    classes = []
    for im in im_axis:
        for re in res_axis:
            r = resolvent_norm(T, space, complex(re, im), N, cfg)
            resnorms.append(r)
            if r == math.inf:
                classes.append("strict")
            elif abs(r - thr) <= band * thr:
                classes.append("level")
            elif r > thr:
                classes.append("strict")
            else:
                classes.append("outside")
    return PspecGrid(tuple(region), resolution, eps, N,
                     tuple(res_axis), tuple(im_axis),
                     tuple(resnorms), tuple(classes))


def strict_radius(grid: PspecGrid) -> float:
    """Largest |z| over strict cells: the disc-radius estimate of the scan."""
    radii = [abs(z) for z, _, c in grid.cells() if c == "strict"]
    return max(radii) if radii else 0.0


def rank_one_resolvent_law(z: complex) -> float:
    """|z|^{-1} + |z|^{-2}: the resolvent norm of the nilpotent rank-ones."""
    a = abs(z)
    return 1.0 / a + 1.0 / (a * a)


def rank_one_strict_radius(eps: float) -> float:
    """Radius of {|z|^{-1} + |z|^{-2} > 1/eps}: (eps + sqrt(4 eps + eps^2))/2."""
    return 0.5 * (eps + math.sqrt(4.0 * eps + eps * eps))


# ---------------------------------------------------------------------------
# eigenvalue-planting certificates
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PerturbationCert:
    A: op.OperatorSpec          # rank-one
    z: complex
    y: Coeffs                   # claimed eigenvector of T + A
    residual: float
    norm_A: float
    eps: float
    N: int

    def to_json_obj(self):
        return {
            "schema_version": 1,
            "A": op.operator_to_json_obj(self.A),
            "z": [self.z.real, self.z.imag],
            "y": self.y.to_json_obj(),
            "residual": self.residual,
            "norm_A": self.norm_A,
            "eps": self.eps,
            "N": self.N,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_json_obj())


def att1_perturbation(T, space, z: complex, eps: float, N: int,
                      cfg: OpnormConfig = DEFAULT_CFG) -> PerturbationCert:
    """Plant the eigenvalue z into T with a rank-one A of norm 1/c <= eps.

    With x a unit resolvent witness, c = ||(T-zI)^{-1}x||, y the normalized
    resolvent image and f a norming functional of y, the perturbation
    A u = -c^{-1} f(u) x satisfies (T+A)y = zy exactly.
    """
    c, x = resolvent_norm(T, space, z, N, cfg, with_witness=True)
    if c == math.inf:
        # z is an eigenvalue of the section already; A = 0 certifies it
        Msec = _resolvent_section(T, z, N)
        _, _, vh = np.linalg.svd(Msec)
        y = np.conj(vh[-1])
        y = y / sp.norm_array(space, y)
        resid = sp.norm_array(space, Msec @ y)
        return PerturbationCert(op.ScalarMul(0.0), complex(z),
                                Coeffs.from_array(y), float(resid), 0.0,
                                eps, N)
    if x is None or not np.any(x):
        raise RuntimeError("no resolvent witness found on this truncation")
    if 1.0 / c > eps + 1e-10:
        raise ValueError(
            "1/c = %.6g exceeds eps = %.6g: z outside the non-strict set "
            "on this truncation" % (1.0 / c, eps))
    A = _resolvent_section(T, z, N)
    y = np.linalg.solve(A, x) / c
    f = sp.norming_functional_array(space, y)
    pert = op.RankOne(Coeffs.from_array(f),
                      Coeffs.from_array(-x / c))
    # residual of (T + A)y = zy, evaluated on a section wide enough to hold Ty
    wide = N + 8
    yw = np.zeros(wide, dtype=complex)
    yw[:N] = y
    Tw = op.truncate_matrix(T, wide)
    fy = np.dot(f, y)
    img = Tw @ yw - (fy / c) * np.pad(x, (0, wide - N)) - complex(z) * yw
    resid = sp.norm_array(space, img)
    norm_A = sp.norm_array(sp.dual_space(space), f) * sp.norm_array(space, x) / c
    return PerturbationCert(pert, complex(z), Coeffs.from_array(y),
                            float(resid), float(norm_A), eps, N)


def verify_cert(T, space, cert: PerturbationCert, N: int | None = None) -> dict:
    """Re-verify a certificate with independent norm and residual evaluations."""
    N = cert.N if N is None else N
    wide = max(N, cert.y.dim_hint) + 8
    yw = cert.y.to_array(wide)
    Tw = op.truncate_matrix(T, wide) + op.truncate_matrix(cert.A, wide)
    resid = sp.norm_array(space, Tw @ yw - cert.z * yw)
    if isinstance(cert.A, op.RankOne):
        norm_A = (sp.norm_eval(sp.dual_space(space), cert.A.functional)
                  * sp.norm_eval(space, cert.A.vector))
    elif isinstance(cert.A, op.ScalarMul):
        norm_A = abs(cert.A.lam)
    else:
        norm_A, _, _ = matrix_norm(op.truncate_matrix(cert.A, wide),
                                   space, space)
    ok = resid < 1e-10 and norm_A <= cert.eps + 1e-10
    return {"ok": bool(ok), "residual": float(resid), "norm_A": float(norm_A)}


# ---------------------------------------------------------------------------
# norm-c singularizing perturbations
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Lp111Result:
    case: str                  # fixed | escaping | inconclusive
    S: op.OperatorSpec | None
    c: float
    new_inf: float | None
    trace: tuple               # ((N, c_N), ...) bottom-of-sphere values

    @property
    def emitted(self) -> bool:
        return self.S is not None


def _min_norm_witness(T, space, N: int, cfg: OpnormConfig):
    """(c_N, unit minimizer of ||T_N x||) via the inverse-section norm."""
    M = op.truncate_matrix(T, N)
    if np.linalg.cond(M) > SINGULAR_COND:
        return 0.0, None
    inv = np.linalg.inv(M)
    val, x, _ = matrix_norm(inv, space, space, cfg)
    if val <= 0 or x is None:
        return 0.0, None
    u = inv @ x
    u = u / sp.norm_array(space, u)
    return 1.0 / val, u


def lp111_perturbation(T, space, N: int, cfg: OpnormConfig = DEFAULT_CFG,
                       Ns=None, case_tol: float = 1e-4) -> Lp111Result:
    """Perturbation S with ||S|| = c = inf_{||x||=1} ||T_N x|| and
    inf ||(T+S)x|| ~ 0 on the truncation.

    Minimizers over growing sections decide the case: a Cauchy family gives
    the rank-one S = -phi(.) T x_hat; escaping minimizers (support centroid
    beyond N/2) give the block construction over a disjointified family.
    """
    if Ns is None:
        Ns = sorted({max(2, N // 8), max(3, N // 4), max(4, N // 2), N})
    trace = []
    witnesses = []
    for n in Ns:
        c_n, u_n = _min_norm_witness(T, space, n, cfg)
        if u_n is None:
            return Lp111Result("inconclusive", None, 0.0, None, tuple(trace))
        trace.append((n, c_n))
        # align the global phase on the largest coordinate
        k = int(np.argmax(np.abs(u_n)))
        witnesses.append(u_n * np.conj(u_n[k] / abs(u_n[k])))
    c = trace[-1][1]

    dists = []
    for wa, wb in zip(witnesses, witnesses[1:]):
        pad = np.zeros(len(wb), dtype=complex)
        pad[: len(wa)] = wa
        dists.append(sp.norm_array(space, pad - wb))
    centroids = [float((np.arange(len(w)) * np.abs(w) ** 2).sum()
                       / (np.abs(w) ** 2).sum()) for w in witnesses]

    if all(d < case_tol for d in dists[-2:]):
        xhat = witnesses[-1]
        phi = sp.norming_functional_array(space, xhat)
        Tx = op.truncate_matrix(T, len(xhat) + 8) @ np.pad(
            xhat, (0, 8))
        S = op.RankOne(Coeffs.from_array(phi), Coeffs.from_array(-Tx))
        new_inf = _perturbed_value(T, S, space, xhat)
        return Lp111Result("fixed", S, c, new_inf, tuple(trace))

    if all(cn >= 0.5 * n for cn, n in zip(centroids[-2:], Ns[-2:])):
        xs = [Coeffs.from_array(w) for w in witnesses]
        dj = sp.disjointify(xs, [1e-9] * len(xs), space=space)
        blocks = []
        for u in dj.vectors:
            nu = sp.norm_eval(space, u)
            if nu <= 0:
                continue
            u = (1.0 / nu) * u
            v = op.apply(T, u)
            blocks.append((u, v))
        # images must also be pairwise disjoint; thin the family if not
        vdj = sp.disjointify([v for _, v in blocks],
                             [1e-9] * len(blocks), space=space)
        if not vdj.ok and len(vdj.indices) >= 1:
            blocks = [blocks[i - 1] for i in vdj.indices]
        if not blocks:
            return Lp111Result("inconclusive", None, c, None, tuple(trace))
        cms = [sp.norm_eval(space, v) for _, v in blocks]
        c_used = min(cms)
        terms = []
        for (u, v), cm in zip(blocks, cms):
            phi = sp.norming_functional(space, u).restrict(u.support())
            terms.append(op.RankOne(phi, (-c_used / cm) * v))
        S = op.Sum(tuple(terms))
        k = int(np.argmin(cms))
        new_inf = _perturbed_value(T, S, space,
                                   blocks[k][0].to_array())
        return Lp111Result("escaping", S, c_used, new_inf, tuple(trace))

    return Lp111Result("inconclusive", None, c, None, tuple(trace))


def _perturbed_value(T, S, space, x: np.ndarray) -> float:
    wide = len(x) + 8
    M = op.truncate_matrix(T, wide) + op.truncate_matrix(S, wide)
    return float(sp.norm_array(space, M @ np.pad(x, (0, wide - len(x)))))


# ---------------------------------------------------------------------------
# strict vs closure membership on a grid
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Sigma0Report:
    eps: float
    N: int
    strict_count: int
    level_certified: tuple     # (z, norm_A) pairs
    level_uncertified: tuple   # (z, reason) pairs
    outside_count: int

    def to_json_obj(self):
        return {
            "schema_version": 1,
            "eps": self.eps,
            "N": self.N,
            "strict_count": self.strict_count,
            "outside_count": self.outside_count,
            "level_certified": [[z.real, z.imag, a]
                                for z, a in self.level_certified],
            "level_uncertified": [[z.real, z.imag, r]
                                  for z, r in self.level_uncertified],
        }


def sigma0_vs_sigma_check(T, space, eps: float, region, resolution: int,
                          N: int, cfg: OpnormConfig = DEFAULT_CFG,
                          band: float = 1e-3) -> Sigma0Report:
    """Attempt a planting certificate at every level-set cell.

    Strict cells need no certificate (strict membership is already
    perturbation-reachable with norms < eps); level cells are the boundary
    where attainment of the resolvent norm decides membership.
    """
    grid = grid_scan(T, space, region, resolution, eps, N, cfg, band)
    certified = []
    uncertified = []
    strict = outside = 0
    for z, r, cls in grid.cells():
        if cls == "strict":
            strict += 1
        elif cls == "outside":
            outside += 1
        else:
            try:
                cert = att1_perturbation(T, space, z, eps, N, cfg)
            except (ValueError, RuntimeError) as exc:
                uncertified.append((z, str(exc)))
                continue
            chk = verify_cert(T, space, cert)
            if chk["ok"]:
                certified.append((z, chk["norm_A"]))
            else:
                uncertified.append((z, "re-verification failed"))
    return Sigma0Report(eps, N, strict, tuple(certified),
                        tuple(uncertified), outside)
