"""Parametric hypersurfaces: jets, induced metric, causal classification.

A hypersurface is an immersion of an (n-1)-parameter box into n-dimensional
Lorentzian space (or directly into homogeneous coordinates on the quadric).
The causal character at a point is read off the inertia of the induced
metric J^T G J:

    spacelike   (n-1, 0, 0)
    timelike    (n-2, 1, 0)
    lightlike   (n-2, 0, 1)

anything else is reported as degenerate beyond the lightlike case.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from .conformal import AmbientModel
from .errors import DegenerateBasisError
from .linalg import jacobi_eigh

SPACELIKE = "spacelike"
TIMELIKE = "timelike"
LIGHTLIKE = "lightlike"
DEGENERATE = "degenerate_beyond_lightlike"

#: degeneracy threshold for analytic jets: smallest |eigenvalue| relative to largest
LIGHTLIKE_TOL_ANALYTIC = 1e-7

#: degeneracy threshold when jets come from finite differences
LIGHTLIKE_TOL_FD = 1e-4

#: central-difference steps for first- and second-order jets
FD_STEP_FIRST = 1e-5
FD_STEP_SECOND = 1e-3

WORKERS_ENV = "PSEUDOCONFORMAL_WORKERS"


@dataclass(frozen=True)
class Immersion:
    """Parametric hypersurface with jet evaluation.

    ``value`` maps a parameter vector of length n-1 to a point of the
    Lorentzian space (length n), or to homogeneous coordinates (length n+2)
    when ``homogeneous`` is set.  ``jacobian`` and ``hessian`` are optional
    analytic jets; finite differences fill in for whichever is missing.
    """

    n: int
    domain: tuple
    value: Callable[[np.ndarray], np.ndarray]
    jacobian: Optional[Callable[[np.ndarray], np.ndarray]] = None
    hessian: Optional[Callable[[np.ndarray], np.ndarray]] = None
    homogeneous: bool = False
    name: str = ""

    @property
    def params(self) -> int:
        return self.n - 1

    @property
    def target_dim(self) -> int:
        return self.n + 2 if self.homogeneous else self.n

    @property
    def analytic(self) -> bool:
        return self.jacobian is not None

    def point(self, u) -> np.ndarray:
        return np.asarray(self.value(np.asarray(u, dtype=float)), dtype=float)

    def jet1(self, u) -> np.ndarray:
        """First-order jet: target_dim x (n-1) Jacobian."""
        u = np.asarray(u, dtype=float)
        if self.jacobian is not None:
            j = np.asarray(self.jacobian(u), dtype=float)
        else:
            j = np.empty((self.target_dim, self.params))
            for a in range(self.params):
                e = np.zeros(self.params)
                e[a] = FD_STEP_FIRST
                j[:, a] = (self.point(u + e) - self.point(u - e)) / (2 * FD_STEP_FIRST)
        if j.shape != (self.target_dim, self.params):
            raise ValueError(f"jacobian has shape {j.shape}, expected {(self.target_dim, self.params)}")
        return j

    def jet2(self, u) -> np.ndarray:
        """Second-order jet: target_dim x (n-1) x (n-1) Hessian."""
        u = np.asarray(u, dtype=float)
        if self.hessian is not None:
            h = np.asarray(self.hessian(u), dtype=float)
            expected = (self.target_dim, self.params, self.params)
            if h.shape != expected:
                raise ValueError(f"hessian has shape {h.shape}, expected {expected}")
            return h
        d = self.params
        step = FD_STEP_SECOND
        h = np.empty((self.target_dim, d, d))
        f0 = self.point(u)
        for a in range(d):
            ea = np.zeros(d)
            ea[a] = step
            h[:, a, a] = (self.point(u + ea) - 2 * f0 + self.point(u - ea)) / step**2
            for b in range(a + 1, d):
                eb = np.zeros(d)
                eb[b] = step
                mixed = (
                    self.point(u + ea + eb)
                    - self.point(u + ea - eb)
                    - self.point(u - ea + eb)
                    + self.point(u - ea - eb)
                ) / (4 * step**2)
                h[:, a, b] = mixed
                h[:, b, a] = mixed
        return h

    def lightlike_tol(self) -> float:
        return LIGHTLIKE_TOL_ANALYTIC if self.analytic else LIGHTLIKE_TOL_FD

    def grid_axes(self, counts) -> list[np.ndarray]:
        """Per-axis sample values covering the domain box."""
        counts = list(counts)
        if len(counts) != self.params:
            raise ValueError(f"need {self.params} grid counts")
        return [
            np.linspace(lo, hi, int(c))
            for (lo, hi), c in zip(self.domain, counts)
        ]


@dataclass(frozen=True)
class CausalType:
    """Causal character of a hypersurface point plus the inertia behind it."""

    kind: str
    plus: int
    minus: int
    zero: int
    min_eig_ratio: float

    def as_tuple(self):
        return (self.plus, self.minus, self.zero)


def induced_metric(imm: Immersion, u, model: Optional[AmbientModel] = None) -> np.ndarray:
    """Pullback J^T G J of the ambient form; for homogeneous immersions G is
    the quadric's polar form, which induces the same conformal class."""
    j = imm.jet1(u)
    if imm.homogeneous:
        if model is None:
            model = AmbientModel.standard(imm.n)
        g = model.form.gram
    else:
        if model is None:
            model = AmbientModel.standard(imm.n)
        g = model.metric.gram
    m = j.T @ g @ j
    return 0.5 * (m + m.T)


def causal_type_of_metric(m, tol: float) -> CausalType:
    """Classify an induced-metric matrix by its eigenvalue inertia."""
    w, _ = jacobi_eigh(m)
    radius = max(float(np.abs(w).max()), 1e-300)
    plus = int((w > tol * radius).sum())
    minus = int((w < -tol * radius).sum())
    zero = m.shape[0] - plus - minus
    d = m.shape[0]
    ratio = float(np.abs(w).min() / radius)
    if (plus, minus, zero) == (d, 0, 0):
        kind = SPACELIKE
    elif (plus, minus, zero) == (d - 1, 1, 0):
        kind = TIMELIKE
    elif (plus, minus, zero) == (d - 1, 0, 1):
        kind = LIGHTLIKE
    else:
        kind = DEGENERATE
    return CausalType(kind=kind, plus=plus, minus=minus, zero=zero, min_eig_ratio=ratio)


def classify_point(imm: Immersion, u, tol: Optional[float] = None,
                   model: Optional[AmbientModel] = None) -> CausalType:
    """Causal character at a parameter point.

    Raises if the Jacobian is rank deficient there (not an immersion).
    """
    m = induced_metric(imm, u, model=model)
    j = imm.jet1(u)
    jtj = j.T @ j
    w, _ = jacobi_eigh(jtj)
    if w.min() <= 1e-12 * max(w.max(), 1e-300):
        raise DegenerateBasisError(f"jacobian is rank deficient at u={np.asarray(u).tolist()}")
    if tol is None:
        tol = imm.lightlike_tol()
    return causal_type_of_metric(m, tol)


def lightlike_kernel(imm: Immersion, u, model: Optional[AmbientModel] = None) -> np.ndarray:
    """Parameter-space kernel direction of the induced metric at a lightlike
    point, unit-normalized; its Jacobian image is the null generator."""
    m = induced_metric(imm, u, model=model)
    w, v = jacobi_eigh(m)
    return v[:, int(np.argmin(np.abs(w)))]


@dataclass(frozen=True)
class GridPoint:
    u: tuple
    index: tuple
    causal: CausalType


@dataclass(frozen=True)
class TransitionCell:
    """Grid edge whose endpoints change causal character across lightlike."""

    axis: int
    index_low: tuple
    u_low: tuple
    u_high: tuple
    kinds: tuple


@dataclass(frozen=True)
class ClassificationReport:
    points: list
    counts: dict
    transitions: list
    errors: list = field(default_factory=list)

    @property
    def pure(self) -> Optional[str]:
        kinds = [k for k, c in self.counts.items() if c > 0]
        return kinds[0] if len(kinds) == 1 else None

    @property
    def mixed(self) -> bool:
        return self.pure is None

    def fractions(self) -> dict:
        total = sum(self.counts.values())
        return {k: c / total for k, c in self.counts.items() if total}

    def to_csv_rows(self):
        rows = []
        for p in self.points:
            rows.append(
                list(p.u)
                + [p.causal.kind, p.causal.plus, p.causal.minus, p.causal.zero,
                   p.causal.min_eig_ratio]
            )
        return rows


def _classify_chunk(args):
    imm, model, tol, chunk = args
    out = []
    for index, u in chunk:
        try:
            causal = classify_point(imm, u, tol=tol, model=model)
            out.append((index, tuple(float(x) for x in u), causal, None))
        except Exception as exc:  # recorded, not fatal
            out.append((index, tuple(float(x) for x in u), None, str(exc)))
    return out


def survey(imm: Immersion, grid_counts: Sequence[int], tol: Optional[float] = None,
           model: Optional[AmbientModel] = None, workers: Optional[int] = None) -> ClassificationReport:
    """Classify every grid point and summarize pure vs mixed character.

    Results are assembled in grid order regardless of worker count, so the
    report is deterministic.  Worker count defaults to the
    PSEUDOCONFORMAL_WORKERS environment variable, else 1.
    """
    if model is None:
        model = AmbientModel.standard(imm.n)
    if tol is None:
        tol = imm.lightlike_tol()
    axes = imm.grid_axes(grid_counts)
    shape = tuple(len(ax) for ax in axes)
    indices = list(np.ndindex(*shape))
    points = [(idx, np.array([axes[a][i] for a, i in enumerate(idx)])) for idx in indices]

    if workers is None:
        workers = int(os.environ.get(WORKERS_ENV, "1"))
    if workers > 1:
        from multiprocessing import Pool

        chunks = [points[i::workers] for i in range(workers)]
        with Pool(workers) as pool:
            results = pool.map(_classify_chunk, [(imm, model, tol, ch) for ch in chunks])
        flat = [item for sub in results for item in sub]
        flat.sort(key=lambda item: item[0])
    else:
        flat = _classify_chunk((imm, model, tol, points))

    grid_points = []
    kinds_by_index = {}
    counts = {SPACELIKE: 0, TIMELIKE: 0, LIGHTLIKE: 0, DEGENERATE: 0}
    errors = []
    for index, u, causal, err in flat:
        if err is not None:
            errors.append((index, err))
            continue
        counts[causal.kind] += 1
        kinds_by_index[index] = causal.kind
        grid_points.append(GridPoint(u=u, index=index, causal=causal))

    transitions = []
    for idx in indices:
        k0 = kinds_by_index.get(idx)
        if k0 is None:
            continue
        for axis in range(len(shape)):
            nxt = list(idx)
            nxt[axis] += 1
            nxt = tuple(nxt)
            if nxt[axis] >= shape[axis]:
                continue
            k1 = kinds_by_index.get(nxt)
            if k1 is None or k1 == k0:
                continue
            crossing = {k0, k1} == {SPACELIKE, TIMELIKE} or LIGHTLIKE in (k0, k1)
            if crossing:
                u_low = tuple(float(axes[a][i]) for a, i in enumerate(idx))
                u_high = tuple(float(axes[a][i]) for a, i in enumerate(nxt))
                transitions.append(
                    TransitionCell(axis=axis, index_low=idx, u_low=u_low,
                                   u_high=u_high, kinds=(k0, k1))
                )
    return ClassificationReport(points=grid_points, counts=counts,
                                transitions=transitions, errors=errors)
