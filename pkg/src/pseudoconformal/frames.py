"""Adapted moving frames on the quadric and their connection forms.

A conformal frame is an ordered (n+2)-tuple of homogeneous vectors
A_0, ..., A_{n+1} with a prescribed Gram matrix under the ambient form.  Two
normalizations are used here:

* the null-adapted Gram, with two hyperbolic pairs (A_0, A_{n+1}) and
  (A_1, A_n) pairing to -1 and a positive definite screen block on
  A_2, ..., A_{n-1} (normalized to the identity);
* arbitrary constant-Gram frames, for which the compatibility relations
  between the connection matrix and the Gram matrix are checked numerically.

Connection forms are extracted from a frame field F(u) by central
differences of dF = omega F; the structure identity
d omega = omega ^ omega then holds up to O(h^2).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from .conformal import AmbientModel
from .errors import DegenerateBasisError, NotLightlikeError, NotOnQuadricError
from .linalg import inverse, jacobi_eigh, solve, solve_particular

#: Gram residual every adapted frame must meet
ADAPT_TOL = 1e-10

#: default finite-difference step on unit-scaled parameters
DEFAULT_STEP = 1e-4


def lightlike_gram(n: int) -> np.ndarray:
    """Target Gram matrix of a null-adapted frame with identity screen block:
    (A_0, A_{n+1}) = (A_1, A_n) = -1, (A_i, A_j) = delta_ij, rest zero."""
    g = np.zeros((n + 2, n + 2))
    g[0, n + 1] = g[n + 1, 0] = -1.0
    g[1, n] = g[n, 1] = -1.0
    for i in range(2, n):
        g[i, i] = 1.0
    return g


def spacelike_gram(n: int) -> np.ndarray:
    """Target Gram of a frame adapted to a spacelike hypersurface: identity
    screen on A_1..A_{n-1}, tangent element normalized to (A_n, A_n) = -1,
    hyperbolic pair (A_0, A_{n+1})."""
    g = np.zeros((n + 2, n + 2))
    g[0, n + 1] = g[n + 1, 0] = -1.0
    for i in range(1, n):
        g[i, i] = 1.0
    g[n, n] = -1.0
    return g


def timelike_gram(n: int) -> np.ndarray:
    """Target Gram of a frame adapted to a timelike hypersurface: the tangent
    element is normalized to (A_n, A_n) = +1 instead, and the Lorentz
    direction moves into the screen block."""
    g = np.zeros((n + 2, n + 2))
    g[0, n + 1] = g[n + 1, 0] = -1.0
    for i in range(1, n):
        g[i, i] = 1.0
    g[n - 1, n - 1] = -1.0
    g[n, n] = 1.0
    return g


@dataclass(frozen=True)
class ConformalFrame:
    """Frame vectors as rows of an (n+2) x (n+2) matrix plus a target Gram."""

    vectors: np.ndarray
    target_gram: np.ndarray
    model: AmbientModel

    def __post_init__(self):
        v = np.asarray(self.vectors, dtype=float).copy()
        t = np.asarray(self.target_gram, dtype=float).copy()
        v.flags.writeable = False
        t.flags.writeable = False
        object.__setattr__(self, "vectors", v)
        object.__setattr__(self, "target_gram", t)

    @property
    def n(self) -> int:
        return self.model.n

    def vector(self, xi: int) -> np.ndarray:
        return self.vectors[xi]

    def gram(self) -> np.ndarray:
        return self.vectors @ self.model.form.gram @ self.vectors.T

    def gram_residual(self) -> float:
        return float(np.abs(self.gram() - self.target_gram).max())

    def components(self, vector) -> np.ndarray:
        """Coefficients of a vector in this frame basis."""
        return solve(self.vectors.T, np.asarray(vector, dtype=float))

    def to_json(self) -> str:
        return json.dumps(
            {
                "vectors": [[float(c) for c in row] for row in self.vectors],
                "target_gram": [[float(c) for c in row] for row in self.target_gram],
            }
        )


def _sign_fix(v: np.ndarray) -> np.ndarray:
    """Flip the sign so the coordinate of largest magnitude is positive."""
    c = v[int(np.argmax(np.abs(v)))]
    return v if c >= 0 else -v


def _generator_sign_fix(v: np.ndarray, n: int) -> np.ndarray:
    """Sign rule for null generator lifts: make the time-slot coordinate
    positive.  A nonzero null direction always has a nonzero time component,
    so this rule never switches along a smooth generator field (a
    coordinate-based rule can flip inside a difference stencil wherever its
    chosen coordinate crosses zero)."""
    if abs(v[n]) > 1e-10 * float(np.abs(v).max()):
        return v if v[n] > 0 else -v
    return _sign_fix(v)


def build_screen(candidates, model: AmbientModel, count: int, tol: float = 1e-8):
    """Orthonormalize candidate vectors under the ambient form into ``count``
    unit spacelike screen vectors, pivoting toward large remaining norms.

    Candidates whose residual norm collapses (null directions left over from
    the radical of the candidate span) are discarded.
    """
    remaining = [np.asarray(c, dtype=float).copy() for c in candidates]
    scale = max(float(np.abs(np.asarray(remaining)).max()), 1e-300)
    screen = []
    while remaining and len(screen) < count:
        norms = [model.product(r, r) for r in remaining]
        best = max(norms)
        if best <= (tol * scale) ** 2:
            break
        # banded pivoting: take the first candidate within 10% of the best
        # norm, so exact ties (symmetric configurations) cannot make the
        # pivot flip between neighboring evaluation points
        i = next(k for k, nm in enumerate(norms) if nm >= 0.9 * best)
        s = remaining.pop(i) / math.sqrt(norms[i])
        screen.append(_sign_fix(s))
        remaining = [r - model.product(r, s) * s for r in remaining]
    if len(screen) < count:
        raise DegenerateBasisError(
            f"could not extract {count} spacelike screen vectors "
            f"(got {len(screen)})"
        )
    return np.array(screen)


def _null_partner(constraints_vectors, pairing_vector, model: AmbientModel):
    """Solve for a null vector orthogonal to each of ``constraints_vectors``
    and pairing to -1 with ``pairing_vector``.

    The linear conditions leave an affine line directed along the (null)
    pairing vector; the quadratic condition fixes the offset on that line.
    """
    g = model.form.gram
    rows = [g @ np.asarray(c, dtype=float) for c in constraints_vectors]
    rows.append(g @ np.asarray(pairing_vector, dtype=float))
    rhs = np.zeros(len(rows))
    rhs[-1] = -1.0
    w = solve_particular(np.array(rows), rhs)
    w = w + 0.5 * model.product(w, w) * np.asarray(pairing_vector, dtype=float)
    return w


def adapt_lightlike_frame(
    point,
    tangent_basis,
    model: AmbientModel,
    generator=None,
    generator_scale: float = 1.0,
    degenerate_tol: float = 1e-7,
) -> ConformalFrame:
    """Null-adapted frame at a point of a lightlike surface on the quadric.

    ``point`` is a homogeneous vector on the quadric, ``tangent_basis`` the
    n-1 derivative vectors spanning the embedded tangent space.  A_1 is taken
    along the null direction of the induced form (or along ``generator`` when
    supplied), the screen comes from orthonormalizing the remaining tangent
    directions, and A_n, A_{n+1} complete the two hyperbolic pairs.
    ``degenerate_tol`` is the relative eigenvalue threshold below which the
    induced form counts as degenerate; widen it for finite-difference jets.
    """
    a0 = np.asarray(point, dtype=float)
    basis = np.asarray(tangent_basis, dtype=float)
    n = model.n
    if basis.shape != (n - 1, n + 2):
        raise ValueError(f"tangent basis must have shape {(n - 1, n + 2)}")
    scale2 = float(a0 @ a0)
    if abs(model.quadratic(a0)) > 1e-8 * scale2:
        raise NotOnQuadricError("frame origin is not on the quadric")

    induced = np.array(
        [[model.product(basis[a], basis[b]) for b in range(n - 1)] for a in range(n - 1)]
    )
    w, v = jacobi_eigh(induced)
    radius = max(float(np.abs(w).max()), 1e-300)
    if radius <= 1e-14 * scale2:
        raise DegenerateBasisError("tangent basis is rank deficient")
    positive = int((w > degenerate_tol * radius).sum())
    null_count = int((np.abs(w) <= degenerate_tol * radius).sum())
    if positive != n - 2 or null_count != 1:
        raise NotLightlikeError(
            "tangent plane is not tangent to the isotropic cone here "
            f"(induced inertia {positive}+/{(n - 1) - positive - null_count}-/"
            f"{null_count}0)"
        )
    if generator is None:
        kernel = v[:, int(np.argmin(np.abs(w)))]
        a1 = basis.T @ kernel
    else:
        a1 = np.asarray(generator, dtype=float).copy()
        if abs(model.quadratic(a1)) > 1e-8 * float(a1 @ a1):
            raise NotLightlikeError("supplied generator direction is not null")
    a1 = _generator_sign_fix(a1 / math.sqrt(float(a1 @ a1)), n) * generator_scale

    screen = build_screen(basis, model, count=n - 2)
    a_n = _null_partner([a0, *screen], a1, model)
    a_np1 = _null_partner([a1, *screen, a_n], a0, model)

    vectors = np.vstack([a0, a1, screen, a_n, a_np1])
    frame = ConformalFrame(vectors=vectors, target_gram=lightlike_gram(n), model=model)
    residual = frame.gram_residual()
    if residual > ADAPT_TOL * max(1.0, scale2):
        raise DegenerateBasisError(
            f"frame adaptation failed (gram residual {residual:.3e})"
        )
    return frame


def complete_isotropic_frame(a0, a1, model: AmbientModel) -> ConformalFrame:
    """Null-adapted frame along a line of the quadric spanned by two given
    null, mutually orthogonal homogeneous vectors.

    When the line passes through the finite chart the screen is built from
    lifted spatial directions orthogonal to the line's null direction, which
    keeps the screen free of components along the ideal coordinate; for ideal
    lines it falls back to the orthogonal complement of the line, whose
    radical is the line itself.
    """
    a0 = np.asarray(a0, dtype=float)
    a1 = np.asarray(a1, dtype=float)
    n = model.n
    scale2 = max(float(a0 @ a0), float(a1 @ a1))
    for label, vec in (("first", a0), ("second", a1)):
        if abs(model.quadratic(vec)) > 1e-8 * scale2:
            raise NotOnQuadricError(f"{label} line vector is not on the quadric")
    if abs(model.product(a0, a1)) > 1e-8 * scale2:
        raise DegenerateBasisError("line vectors are not conjugate (line is not on the quadric)")

    candidates = _chart_screen_candidates(a0, a1, model)
    if candidates is None:
        g = model.form.gram
        conditions = np.vstack([g @ a0, g @ a1])
        candidates = _nullspace_basis(conditions)
    screen = build_screen(candidates, model, count=n - 2)
    a_n = _null_partner([a0, *screen], a1, model)
    a_np1 = _null_partner([a1, *screen, a_n], a0, model)
    vectors = np.vstack([a0, a1, screen, a_n, a_np1])
    frame = ConformalFrame(vectors=vectors, target_gram=lightlike_gram(n), model=model)
    if frame.gram_residual() > ADAPT_TOL * max(1.0, scale2):
        raise DegenerateBasisError(
            f"frame completion failed (gram residual {frame.gram_residual():.3e})"
        )
    return frame


def _nullspace_basis(a, tol: float = 1e-10):
    from .linalg import nullspace

    basis = nullspace(a, tol=tol)
    return [basis[:, j] for j in range(basis.shape[1])]


def _chart_screen_candidates(a0, a1, model: AmbientModel):
    """Lifted spatial screen candidates for a line meeting the finite chart.

    Reduces the second line vector to zero ideal coordinate, reads off the
    null spatial direction, and lifts a spanning set of directions orthogonal
    to it.  Returns None when the line is ideal (no usable chart gauge).
    """
    from .conformal import lift_tangent

    n = model.n
    if abs(a0[0]) <= 1e-8 * math.sqrt(float(a0 @ a0)):
        return None
    p = a0[1 : n + 1] / a0[0]
    a1p = a1 - (a1[0] / a0[0]) * a0
    l = a1p[1 : n + 1]
    if abs(l[-1]) <= 1e-12 * math.sqrt(float(l @ l)):
        return None
    g = model.metric.gram
    candidates = []
    for k in range(n - 1):
        e = np.zeros(n)
        e[k] = 1.0
        # make e orthogonal to the null direction by shifting along the time
        # axis, which never annihilates a nonzero null vector
        v = e.copy()
        v[-1] += float(e @ g @ l) / l[-1]
        candidates.append(lift_tangent(p, v, model))
    return candidates


@dataclass(frozen=True)
class ConnectionForms:
    """Connection matrices omega_xi^eta per parameter direction.

    ``omega[a]`` is the matrix applied when moving in parameter direction a;
    row index xi, column index eta, so that dA_xi = omega_xi^eta A_eta.
    """

    omega: np.ndarray
    step: float
    gram: np.ndarray
    n: int

    def direction(self, a: int) -> np.ndarray:
        return self.omega[a]

    def gram_relation_residual(self) -> float:
        """Max violation of omega G + G omega^T = 0 over all directions;
        covers every differentiated Gram normalization at once."""
        worst = 0.0
        for om in self.omega:
            worst = max(worst, float(np.abs(om @ self.gram + self.gram @ om.T).max()))
        return worst

    def named_relation_residuals(self) -> dict[str, float]:
        """Residuals of the individually named pairing relations.

        Keys follow the index layout of the frame: hyperbolic-pair relations
        for (A_0, A_{n+1}) always apply; the null-pair relations for
        (A_1, A_n) apply to lightlike-adapted frames.
        """
        n = self.n
        out: dict[str, float] = {}
        mx = lambda vals: float(np.abs(np.asarray(vals)).max())
        out["w[n+1,0]"] = mx([om[n + 1, 0] for om in self.omega])
        out["w[0,n+1]"] = mx([om[0, n + 1] for om in self.omega])
        out["w[0,0]+w[n+1,n+1]"] = mx(
            [om[0, 0] + om[n + 1, n + 1] for om in self.omega]
        )
        g_rs = self.gram[1 : n + 1, 1 : n + 1]
        res9 = []
        for om in self.omega:
            res9.append(om[1 : n + 1, n + 1] - g_rs @ om[0, 1 : n + 1])
            res9.append(om[1 : n + 1, 0] - g_rs @ om[n + 1, 1 : n + 1])
        out["w[r,n+1]-g_rs.w[0,s]"] = mx(np.concatenate([r.ravel() for r in res9[0::2]]))
        out["w[r,0]-g_rs.w[n+1,s]"] = mx(np.concatenate([r.ravel() for r in res9[1::2]]))
        gdot = []
        for om in self.omega:
            block = om[1 : n + 1, 1 : n + 1]
            gdot.append(g_rs @ block.T + block @ g_rs)
        out["dg_rs"] = mx(np.concatenate([g.ravel() for g in gdot]))
        return out

    def lightlike_relation_residuals(self) -> dict[str, float]:
        """Residuals of the relations specific to null-adapted frames,
        including the screen compatibility w[1,i] = g^{ij} w[j,n]."""
        n = self.n
        mx = lambda vals: float(np.abs(np.asarray(vals)).max())
        out: dict[str, float] = {}
        out["w[1,n]"] = mx([om[1, n] for om in self.omega])
        out["w[n,1]"] = mx([om[n, 1] for om in self.omega])
        out["w[1,1]+w[n,n]"] = mx([om[1, 1] + om[n, n] for om in self.omega])
        out["w[0,n]+w[1,n+1]"] = mx([om[0, n] + om[1, n + 1] for om in self.omega])
        out["w[0,1]+w[n,n+1]"] = mx([om[0, 1] + om[n, n + 1] for om in self.omega])
        g_ij = self.gram[2:n, 2:n]
        g_inv = inverse(g_ij) if n > 2 else np.eye(0)
        res = []
        for om in self.omega:
            res.append(om[1, 2:n] - g_inv @ om[2:n, n])
        out["w[1,i]-g^ij.w[j,n]"] = mx(np.concatenate(res)) if res else 0.0
        return out


def _frame_matrix(frame_or_matrix) -> np.ndarray:
    if isinstance(frame_or_matrix, ConformalFrame):
        return np.asarray(frame_or_matrix.vectors, dtype=float)
    return np.asarray(frame_or_matrix, dtype=float)


def connection_forms(frame_field, u, model_or_gram, step: float = DEFAULT_STEP):
    """Connection matrices of a frame field at u by central differences.

    ``frame_field`` maps a parameter vector to a ConformalFrame (or a raw
    frame matrix).  ``model_or_gram`` provides the target Gram used by the
    relation residual checks.
    """
    u = np.asarray(u, dtype=float)
    center = _frame_matrix(frame_field(u))
    dim = center.shape[0]
    n = dim - 2
    f_inv = inverse(center)
    omegas = np.empty((u.shape[0], dim, dim))
    for a in range(u.shape[0]):
        e = np.zeros_like(u)
        e[a] = step
        fp = _frame_matrix(frame_field(u + e))
        fm = _frame_matrix(frame_field(u - e))
        omegas[a] = ((fp - fm) / (2.0 * step)) @ f_inv
    if isinstance(model_or_gram, AmbientModel):
        gram = center @ model_or_gram.form.gram @ center.T
    else:
        gram = np.asarray(model_or_gram, dtype=float)
    return ConnectionForms(omega=omegas, step=step, gram=gram, n=n)


def structure_residual(frame_field, u, model_or_gram, step: float = DEFAULT_STEP) -> float:
    """Max norm of d omega - omega ^ omega over all direction pairs,
    evaluated by nested central differences; O(h^2) for smooth fields."""
    u = np.asarray(u, dtype=float)
    d = u.shape[0]
    if d < 2:
        raise ValueError("structure residual needs at least two parameters")

    def omega_at(v):
        return connection_forms(frame_field, v, model_or_gram, step=step).omega

    center = omega_at(u)
    plus = []
    minus = []
    for c in range(d):
        e = np.zeros(d)
        e[c] = step
        plus.append(omega_at(u + e))
        minus.append(omega_at(u - e))
    worst = 0.0
    for a in range(d):
        for b in range(a + 1, d):
            # d omega(e_a, e_b) = da omega_b - db omega_a
            da_ob = (plus[a][b] - minus[a][b]) / (2.0 * step)
            db_oa = (plus[b][a] - minus[b][a]) / (2.0 * step)
            bracket = center[a] @ center[b] - center[b] @ center[a]
            worst = max(worst, float(np.abs(da_ob - db_oa - bracket).max()))
    return worst
