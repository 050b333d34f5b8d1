"""Families of null lines on the quadric: shape operator, singular points,
integrability and stratification into lightlike hypersurfaces.

An isotropic congruence is an (n-1)-parameter family of null lines, each
spanned by two null, mutually conjugate homogeneous vectors A_0(u), A_1(u).
Unlike the hypersurface case the base point now moves transversally, so the
differential of A_1 decomposes over both the screen base forms and the
transversal form; the resulting shape operator need not be symmetric and its
characteristic roots may come in complex conjugate pairs.  The congruence is
normal (stratifies into lightlike hypersurfaces along the kernel of the
transversal form) exactly when the operator is symmetric, and then every
singular point is real.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from .conformal import AmbientModel, ProjectivePoint, lift_point, lift_tangent
from .errors import DegenerateBasisError, GeometryError, NonIntegrableError
from .frames import ConformalFrame, complete_isotropic_frame
from .hypersurface import LIGHTLIKE, causal_type_of_metric
from .linalg import char_roots, orthonormal_rows, solve

DEFAULT_STEP = 1e-4

#: defect below which a congruence counts as normal (integrable)
INTEGRABILITY_TOL = 1e-6


@dataclass(frozen=True)
class IsotropicCongruence:
    """An (n-1)-parameter family of null lines on the quadric.

    ``line`` maps a parameter vector to a pair of homogeneous vectors
    spanning the line; both must lie on the quadric and pair to zero.
    """

    n: int
    domain: tuple
    line: Callable[[np.ndarray], tuple]
    name: str = ""

    @property
    def params(self) -> int:
        return self.n - 1

    def line_at(self, u):
        a0, a1 = self.line(np.asarray(u, dtype=float))
        return np.asarray(a0, dtype=float), np.asarray(a1, dtype=float)

    def grid_axes(self, counts):
        counts = list(counts)
        if len(counts) != self.params:
            raise ValueError(f"need {self.params} grid counts")
        return [np.linspace(lo, hi, int(c)) for (lo, hi), c in zip(self.domain, counts)]

    @classmethod
    def from_null_lines(cls, n, domain, base_point, direction, name="",
                        model: Optional[AmbientModel] = None):
        """Build from Lorentzian data: a base point field p(u) and a null
        direction field l(u); the line through p with direction l lifts to
        the quadric line spanned by the images of p and of the direction."""
        if model is None:
            model = AmbientModel.standard(n)

        def line(u):
            p = np.asarray(base_point(u), dtype=float)
            l = np.asarray(direction(u), dtype=float)
            return lift_point(p, model), lift_tangent(p, l, model)

        return cls(n=n, domain=domain, line=line, name=name)

    def validate(self, u, model: Optional[AmbientModel] = None, tol: float = 1e-10):
        if model is None:
            model = AmbientModel.standard(self.n)
        a0, a1 = self.line_at(u)
        scale2 = max(float(a0 @ a0), float(a1 @ a1))
        checks = {
            "base_on_quadric": abs(model.quadratic(a0)) / scale2,
            "direction_on_quadric": abs(model.quadratic(a1)) / scale2,
            "conjugate": abs(model.product(a0, a1)) / scale2,
        }
        bad = {k: v for k, v in checks.items() if v > tol}
        if bad:
            raise GeometryError(f"not an isotropic line at u={np.asarray(u).tolist()}: {bad}")
        return checks


@dataclass(frozen=True)
class CongruenceAnalysis:
    """Shape operator of a congruence at one line, not necessarily symmetric."""

    u: np.ndarray
    shape_operator: np.ndarray
    transversal_shift: np.ndarray
    symmetry_defect: float
    roots: tuple
    frame: ConformalFrame
    transversal_form: np.ndarray  # coefficients of omega_0^n per direction
    diagnostics: dict = field(default_factory=dict)

    @property
    def screen_dim(self) -> int:
        return self.shape_operator.shape[0]


def congruence_affinor(
    cong: IsotropicCongruence,
    u,
    model: Optional[AmbientModel] = None,
    step: float = DEFAULT_STEP,
) -> CongruenceAnalysis:
    """Shape operator and transversal shift of the congruence at u.

    The screen and transversal components of the differentials of A_0 across
    the n-1 parameter directions form the basis-form matrix; expressing the
    screen components of dA_1 in that basis yields the operator.  A singular
    basis-form matrix means the family is not a congruence at u.
    """
    if model is None:
        model = AmbientModel.standard(cong.n)
    u = np.asarray(u, dtype=float)
    cong.validate(u, model=model)
    a0, a1 = cong.line_at(u)
    frame = complete_isotropic_frame(a0, a1, model)

    n = cong.n
    d = cong.params
    da0 = np.empty((d, n + 2))
    da1 = np.empty((d, n + 2))
    for a in range(d):
        e = np.zeros(d)
        e[a] = step
        p0, p1 = cong.line_at(u + e)
        m0, m1 = cong.line_at(u - e)
        da0[a] = (p0 - m0) / (2.0 * step)
        da1[a] = (p1 - m1) / (2.0 * step)

    comp0 = np.array([frame.components(da0[a]) for a in range(d)])
    comp1 = np.array([frame.components(da1[a]) for a in range(d)])
    c = comp0[:, 2:n]
    e_form = comp0[:, n]
    dd = comp1[:, 2:n]
    diagnostics = {
        "w0np1": float(np.abs(comp0[:, n + 1]).max()),
        "w1n": float(np.abs(comp1[:, n]).max()),
        "transversal_consistency": float(np.abs(comp1[:, n + 1] + e_form).max()),
    }

    basis = np.hstack([c, e_form[:, None]])
    try:
        unknowns = solve(basis, dd)
    except DegenerateBasisError as exc:
        raise DegenerateBasisError(
            f"basis forms are dependent at u={u.tolist()}; "
            "the family is not a congruence there"
        ) from exc
    lam = unknowns[: n - 2].T
    shift = unknowns[n - 2]
    defect = float(np.abs(lam - lam.T).max()) if lam.size else 0.0
    roots = tuple(char_roots(lam)) if lam.size else ()
    return CongruenceAnalysis(
        u=u.copy(),
        shape_operator=lam,
        transversal_shift=shift,
        symmetry_defect=defect,
        roots=roots,
        frame=frame,
        transversal_form=e_form,
        diagnostics=diagnostics,
    )


@dataclass(frozen=True)
class CongruenceSingularPoint:
    x: complex
    is_real: bool
    multiplicity: int
    point: Optional[ProjectivePoint]


def congruence_singular_points(an: CongruenceAnalysis) -> list:
    """All characteristic roots with multiplicity; real roots carry the
    singular point X = A_1 + x A_0 of the line, complex roots carry none."""
    out = []
    for root in an.roots:
        point = None
        if root.is_real:
            coords = an.frame.vector(1) + root.real_value * an.frame.vector(0)
            point = ProjectivePoint(coords)
        out.append(
            CongruenceSingularPoint(
                x=root.value,
                is_real=root.is_real,
                multiplicity=root.multiplicity,
                point=point,
            )
        )
    return out


def integrability_defect(
    cong: IsotropicCongruence,
    grid_counts: Sequence[int],
    model: Optional[AmbientModel] = None,
) -> float:
    """Largest symmetry defect of the shape operator over a parameter grid;
    near zero the congruence is normal and stratifies."""
    if model is None:
        model = AmbientModel.standard(cong.n)
    axes = cong.grid_axes(grid_counts)
    worst = 0.0
    for idx in np.ndindex(*[len(ax) for ax in axes]):
        u = np.array([axes[a][i] for a, i in enumerate(idx)])
        an = congruence_affinor(cong, u, model=model)
        worst = max(worst, an.symmetry_defect)
    return worst


@dataclass(frozen=True)
class LeafTrace:
    """A sampled leaf of the transversal distribution through a seed line."""

    seed: tuple
    parameters: tuple  # sampled parameter points
    lines: tuple  # (A_0, A_1) pairs matching parameters
    lightlike_fraction: float
    step: float
    truncated: bool = False  # a run stopped early at the domain boundary


def _transversal_kernel_basis(an: CongruenceAnalysis) -> np.ndarray:
    """Orthonormal basis of the parameter directions annihilated by the
    transversal form at the analyzed line."""
    e = an.transversal_form
    norm = math.sqrt(float(e @ e))
    if norm < 1e-12:
        raise DegenerateBasisError("transversal form vanishes; distribution undefined")
    e_hat = e / norm
    proj = np.eye(len(e)) - np.outer(e_hat, e_hat)
    basis = orthonormal_rows(proj)
    if basis.shape[0] != len(e) - 1:
        raise DegenerateBasisError("kernel of the transversal form has wrong dimension")
    return basis


def stratify(
    cong: IsotropicCongruence,
    seed,
    model: Optional[AmbientModel] = None,
    step: float = 1e-2,
    count: int = 40,
    tol: float = INTEGRABILITY_TOL,
    line_samples: Sequence[float] = (-0.5, 0.0, 0.5, 1.0),
) -> LeafTrace:
    """Integrate the leaf of the transversal distribution through ``seed``.

    Steps are projected onto the kernel of the transversal form at every
    integrator stage (classical fourth-order stepping).  The leaf is sampled
    on a lattice of kernel directions: a spine along the first direction and,
    for higher screen dimension, transversal runs from every spine point.
    The swept point set is classified against the lightlike criterion and
    the surviving fraction reported.
    """
    if model is None:
        model = AmbientModel.standard(cong.n)
    seed = np.asarray(seed, dtype=float)
    an0 = congruence_affinor(cong, seed, model=model)
    if an0.symmetry_defect > tol * (1.0 + float(np.abs(an0.shape_operator).max(initial=0.0))):
        raise NonIntegrableError(
            f"congruence is not integrable near the seed "
            f"(symmetry defect {an0.symmetry_defect:.3e})"
        )

    def kernel_dir(u, ref):
        an = congruence_affinor(cong, u, model=model)
        basis = _transversal_kernel_basis(an)
        d = basis.T @ (basis @ ref)
        norm = math.sqrt(float(d @ d))
        if norm < 1e-10:
            raise DegenerateBasisError("transport direction left the distribution kernel")
        return d / norm

    truncated = False

    def rk4_run(u0, ref0, steps):
        """March along the distribution, carrying the direction by projection."""
        nonlocal truncated
        out = []
        u = u0.copy()
        ref = ref0.copy()
        lo = np.array([d[0] for d in cong.domain])
        hi = np.array([d[1] for d in cong.domain])
        for _ in range(steps):
            k1 = kernel_dir(u, ref)
            k2 = kernel_dir(u + 0.5 * step * k1, k1)
            k3 = kernel_dir(u + 0.5 * step * k2, k2)
            k4 = kernel_dir(u + step * k3, k3)
            u = u + (step / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
            if np.any(u < lo - 1e-9) or np.any(u > hi + 1e-9):
                truncated = True
                break
            ref = k1
            out.append(u.copy())
        return out

    basis0 = _transversal_kernel_basis(an0)
    spine = [seed.copy()]
    spine = rk4_run(seed, -basis0[0], count)[::-1] + spine + rk4_run(seed, basis0[0], count)
    lattice = list(spine)
    if basis0.shape[0] > 1:
        cross = []
        for point in spine:
            an_p = congruence_affinor(cong, point, model=model)
            basis_p = _transversal_kernel_basis(an_p)
            for k in range(1, basis0.shape[0]):
                ref = basis_p.T @ (basis_p @ basis0[k])
                nrm = math.sqrt(float(ref @ ref))
                if nrm < 1e-10:
                    continue
                ref = ref / nrm
                cross += rk4_run(point, -ref, count) + rk4_run(point, ref, count)
        lattice += cross

    lines = tuple((*cong.line_at(p),) for p in lattice)

    # classify the swept point set: at each lattice point, the leaf's tangent
    # directions are the kernel of the transversal form, so the swept
    # hypersurface tangent space is spanned by the corresponding directional
    # derivatives of X(s) = A_0 + s A_1 together with the line direction A_1
    good = 0
    total = 0
    fd = step
    for p in lattice:
        try:
            an_p = congruence_affinor(cong, p, model=model)
            basis_p = _transversal_kernel_basis(an_p)
        except GeometryError:
            continue
        deriv0 = []
        deriv1 = []
        for w in basis_p:
            up, um = p + fd * w, p - fd * w
            a0p, a1p = cong.line_at(up)
            a0m, a1m = cong.line_at(um)
            deriv0.append((a0p - a0m) / (2 * fd))
            deriv1.append((a1p - a1m) / (2 * fd))
        a0_p, a1_p = cong.line_at(p)
        for s in line_samples:
            tangent = [d0 + s * d1 for d0, d1 in zip(deriv0, deriv1)]
            tangent.append(a1_p)
            jac = np.vstack(tangent)
            m = jac @ model.form.gram @ jac.T
            causal = causal_type_of_metric(0.5 * (m + m.T), tol=1e-4)
            total += 1
            if causal.kind == LIGHTLIKE:
                good += 1
    fraction = good / total if total else 0.0
    return LeafTrace(
        seed=tuple(float(x) for x in seed),
        parameters=tuple(tuple(float(x) for x in p) for p in lattice),
        lines=lines,
        lightlike_fraction=fraction,
        step=step,
        truncated=truncated,
    )
