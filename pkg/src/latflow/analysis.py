"""Trajectory analysis: PCA projection, exact cycle detection, linear readout.

PCA is deliberately small: power iteration with deflation on the sample
covariance, which is all a state-transition diagram needs at this scale.
Each component's sign is fixed so its largest-magnitude coordinate is
positive, making projections stable across runs.
"""

from dataclasses import dataclass

import numpy as np

from .errors import (
    ArgumentTooSmall,
    DimensionMismatch,
    NoConvergence,
    SingularSystem,
    TooFewRows,
)


@dataclass
class Trajectory2D:
    """Projected trajectory: one point per recorded step."""

    points: np.ndarray
    explained_variance: tuple

    def to_csv(self):
        k = self.points.shape[1]
        header = "step," + ",".join(f"pc{i + 1}" for i in range(k))
        lines = [header]
        for step, row in enumerate(self.points):
            lines.append(f"{step}," + ",".join(repr(float(v)) for v in row))
        return "\n".join(lines) + "\n"

    def save_csv(self, path):
        with open(path, "w") as f:
            f.write(self.to_csv())

    def to_svg(self):
        """Polyline plot with exact data coordinates; styling is minimal."""
        xs = self.points[:, 0]
        ys = self.points[:, 1]
        span_x = float(xs.max() - xs.min()) or 1.0
        span_y = float(ys.max() - ys.min()) or 1.0
        pad_x, pad_y = 0.05 * span_x, 0.05 * span_y
        view = (
            f"{float(xs.min()) - pad_x!r} {float(ys.min()) - pad_y!r} "
            f"{span_x + 2 * pad_x!r} {span_y + 2 * pad_y!r}"
        )
        pts = " ".join(f"{float(x)!r},{float(y)!r}" for x, y in self.points)
        return (
            f'<svg xmlns="http://www.w3.org/2000/svg" viewBox="{view}">\n'
            f'  <polyline fill="none" stroke="black" '
            f'stroke-width="{0.01 * max(span_x, span_y)!r}" points="{pts}"/>\n'
            f"</svg>\n"
        )

    def save_svg(self, path):
        with open(path, "w") as f:
            f.write(self.to_svg())


@dataclass
class CycleReport:
    """Transient length and cycle period; period 0 means no cycle was found
    within the recorded horizon (transient_length is 0 in that case)."""

    transient_length: int
    period: int


@dataclass
class ReadoutModel:
    """Linear readout weights (intercept last) and the training residual."""

    weights: np.ndarray
    training_residual: float

    def predict(self, states):
        states = np.atleast_2d(np.asarray(states, dtype=np.float64))
        return states @ self.weights[:-1] + self.weights[-1]


def principal_components(data, n_components, tol=1e-10, max_iters=10000,
                         restart_seed=0):
    """Top eigenpairs of the sample covariance of ``data`` rows.

    Covariance uses divisor (rows - 1).  Components come from power
    iteration, each deflated out of the covariance and re-orthogonalized
    against its predecessors; iteration stops when the vector moves less
    than ``tol`` between steps.  Returns (components, variances) with
    components stacked row-wise in decreasing variance order.
    """
    data = np.asarray(data, dtype=np.float64)
    rows, dim = data.shape
    if rows < 2:
        raise TooFewRows(f"need at least 2 rows, got {rows}")
    if not 1 <= n_components <= min(rows, dim):
        raise ArgumentTooSmall(
            f"cannot extract {n_components} components from {rows}x{dim} data"
        )
    centered = data - data.mean(axis=0)
    cov = centered.T @ centered / (rows - 1)
    components = []
    variances = []
    deflated = cov.copy()
    for _ in range(n_components):
        v = _dominant_eigvec(deflated, components, tol, max_iters, restart_seed)
        lam = max(float(v @ deflated @ v), 0.0)
        idx = int(np.argmax(np.abs(v)))
        if v[idx] < 0:
            v = -v
        components.append(v)
        variances.append(lam)
        deflated = deflated - lam * np.outer(v, v)
    return np.array(components), tuple(variances)


def _dominant_eigvec(matrix, prev, tol, max_iters, restart_seed):
    n = matrix.shape[0]
    basis = np.array(prev) if prev else None

    def project_out(v):
        if basis is not None:
            v = v - basis.T @ (basis @ v)
        return v

    def seeded_start():
        rng = np.random.default_rng(restart_seed)
        return project_out(rng.standard_normal(n))

    v = project_out(np.ones(n))
    norm = np.linalg.norm(v)
    restarted = norm < 1e-12
    if restarted:
        v = seeded_start()
        norm = np.linalg.norm(v)
    v /= norm
    for k in range(max_iters):
        w = project_out(matrix @ v)
        if k == 0 and not restarted and abs(float(v @ w)) < 1e-12:
            # The all-ones start can sit in the null space even when variance
            # remains (e.g. every row sums to the same value), so a flat first
            # step means retry from the seeded vector, not give up.
            v = seeded_start()
            v /= np.linalg.norm(v)
            restarted = True
            continue
        norm = np.linalg.norm(w)
        if norm < 1e-14:
            return v  # remaining variance is zero; v is as good as any
        w /= norm
        if np.linalg.norm(w - v) < tol:
            return w
        v = w
    raise NoConvergence(
        f"power iteration did not settle in {max_iters} iterations"
    )


def pca_project(history, n_components=2):
    """Project a state history onto its leading principal components."""
    components, variances = principal_components(history.states, n_components)
    centered = history.states - history.states.mean(axis=0)
    return Trajectory2D(points=centered @ components.T, explained_variance=variances)


def detect_cycle(history, tol=0.0):
    """Smallest (transient, period) closing the recorded trajectory.

    Finds the earliest pair of equal rows (exactly for tol=0, elementwise
    within tol otherwise) and verifies the repetition over the whole
    remaining record.  tol > 0 is for continuous systems and is inherently
    approximate.
    """
    states = history.states
    rows = len(states)
    if tol == 0.0:
        first_seen = {}
        for j in range(rows):
            key = states[j].tobytes()
            if key in first_seen:
                s, p = first_seen[key], j - first_seen[key]
                if _verify_cycle(states, s, p, tol):
                    return CycleReport(s, p)
            else:
                first_seen[key] = j
        return CycleReport(0, 0)
    for j in range(1, rows):
        for s in range(j):
            if np.all(np.abs(states[s] - states[j]) <= tol) and _verify_cycle(
                states, s, j - s, tol
            ):
                return CycleReport(s, j - s)
    return CycleReport(0, 0)


def _verify_cycle(states, s, p, tol):
    ahead = states[s + p :]
    base = states[s : s + len(ahead)]
    return np.all(np.abs(base - ahead) <= tol)


def train_linear_readout(history, targets, ridge):
    """Ridge-regularized least squares from states (plus intercept) to targets.

    Solves the normal equations with LAPACK's pivoted Gaussian elimination;
    the penalty applies to all weights, intercept included.
    """
    if ridge < 0:
        raise ArgumentTooSmall(f"ridge {ridge} is negative")
    states = history.states
    targets = np.asarray(targets, dtype=np.float64)
    if targets.ndim != 1 or len(targets) != len(states):
        raise DimensionMismatch(
            f"{len(targets)} targets for {len(states)} recorded states"
        )
    design = np.hstack([states, np.ones((len(states), 1))])
    gram = design.T @ design + ridge * np.eye(design.shape[1])
    try:
        weights = np.linalg.solve(gram, design.T @ targets)
    except np.linalg.LinAlgError as exc:
        raise SingularSystem(
            "normal equations are singular (degenerate history at ridge=0)"
        ) from exc
    residual = float(np.sum((design @ weights - targets) ** 2))
    return ReadoutModel(weights=weights, training_residual=residual)
