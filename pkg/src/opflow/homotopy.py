"""Explicit operator homotopies on a discretized unit-interval function space.

Functions on [0, 1] are represented by cell averages on a uniform grid of n
cells (midpoint nodes, equal quadrature weights summing to 1).  The shrink
and stretch isometries are assembled by exact integration of their dilation
kernels against this cell basis, so they act to second order on smooth data
and reduce to the identity exactly at their trivial parameter.

A uniform grid cannot carry a genuine isometry onto a shorter subinterval:
any matrix supported on a fraction of the coordinates has a kernel-sized
isometry defect in operator norm.  The meaningful discretization error is
therefore measured against a fixed band of smooth modes; ``isometry_defect``
and friends report that band-limited defect, which decays like C/n, and
``discretization_tolerance`` aggregates it into the single delta(n) that the
homotopy assertions carry.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .errors import BranchCutError, DegeneracyError, ValidationError
from .linalg import HermOp, MatrixLike, adjoint, as_hermop, as_matrix, func_calc, op_norm

SMOOTH_MODES = 12
INJECTIVITY_ATOL = 1e-10


@dataclass(frozen=True)
class GridSpace:
    """Uniform cell grid on [0, 1]: midpoint nodes, weights summing to 1."""

    n: int
    nodes: np.ndarray = field(repr=False)
    weights: np.ndarray = field(repr=False)

    def __post_init__(self):
        if self.n < 2:
            raise ValidationError("grid needs at least 2 points")
        w = np.asarray(self.weights, dtype=float)
        if np.any(w <= 0) or abs(float(w.sum()) - 1.0) > 1e-12:
            raise ValidationError("weights must be positive and sum to 1")

    @classmethod
    def make(cls, n: int) -> "GridSpace":
        nodes = (np.arange(n) + 0.5) / n
        weights = np.full(n, 1.0 / n)
        nodes.setflags(write=False)
        weights.setflags(write=False)
        return cls(n, nodes, weights)


def _cell_average_rows(intervals: list[tuple[float, float]], n: int) -> np.ndarray:
    """Row i integrates the cell basis over intervals[i] (clipped to [0,1])."""
    h = 1.0 / n
    M = np.zeros((len(intervals), n))
    for i, (lo, hi) in enumerate(intervals):
        lo, hi = max(lo, 0.0), min(hi, 1.0)
        if hi <= lo:
            continue
        j0 = max(int(np.floor(lo / h)), 0)
        j1 = min(int(np.ceil(hi / h)), n)
        for j in range(j0, j1):
            a, b = max(lo, j * h), min(hi, (j + 1) * h)
            if b > a:
                M[i, j] = b - a
    return M


def shrink_isometry(t: float, grid: GridSpace) -> np.ndarray:
    """Compression onto [0, t]: f |-> (1/sqrt t) f(s/t), cell-averaged.

    Exact identity at t = 1.  The range projection occupies the cells meeting
    [0, t], so its trace tracks t*n (exactly when 1/t is an integer).
    """
    if not 0.0 < t <= 1.0:
        raise ValidationError(f"shrink parameter must be in (0, 1], got {t}")
    n = grid.n
    if t == 1.0:
        return np.eye(n)
    h = 1.0 / n
    ivals = [(i * h / t, (i + 1) * h / t) for i in range(n)]
    return (np.sqrt(t) / h) * _cell_average_rows(ivals, n)


def stretch_isometry(t: float, grid: GridSpace) -> np.ndarray:
    """Compression onto [t, 1]: f |-> (1/sqrt(1-t)) f((s-t)/(1-t)), cell-averaged.

    Exact identity at t = 0; mirror image of ``shrink_isometry``.
    """
    if not 0.0 <= t < 1.0:
        raise ValidationError(f"stretch parameter must be in [0, 1), got {t}")
    n = grid.n
    if t == 0.0:
        return np.eye(n)
    h = 1.0 / n
    ivals = [((i * h - t) / (1.0 - t), ((i + 1) * h - t) / (1.0 - t)) for i in range(n)]
    return (np.sqrt(1.0 - t) / h) * _cell_average_rows(ivals, n)


def smooth_band(grid: GridSpace, modes: int = SMOOTH_MODES) -> np.ndarray:
    """Unit-norm columns sin(j pi x), j = 1..modes: the resolvable test family."""
    V = np.stack([np.sin((j + 1) * np.pi * grid.nodes) for j in range(modes)], axis=1)
    return V / np.linalg.norm(V, axis=0)


def isometry_defect(U: np.ndarray, grid: GridSpace, modes: int = SMOOTH_MODES) -> float:
    """Band-limited defect max_j ||(U*U - 1) phi_j||; decays like C/n."""
    U = as_matrix(U)
    V = smooth_band(grid, modes)
    R = (adjoint(U) @ U - np.eye(grid.n)) @ V
    return float(np.max(np.linalg.norm(R, axis=0)))


def completeness_defect(t: float, grid: GridSpace, modes: int = SMOOTH_MODES) -> float:
    """Band-limited defect of u_t u_t* + v_t v_t* = 1 (complementary ranges)."""
    U = shrink_isometry(t, grid)
    W = stretch_isometry(t, grid)
    M = U @ adjoint(U) + W @ adjoint(W) - np.eye(grid.n)
    R = M @ smooth_band(grid, modes)
    return float(np.max(np.linalg.norm(R, axis=0)))


def _min_singular(M: np.ndarray) -> float:
    s = np.linalg.svd(as_matrix(M), compute_uv=False)
    return float(s[-1]) if s.size else 0.0


def zk_contraction(t: float, a: MatrixLike, b: MatrixLike, grid: GridSpace) -> np.ndarray:
    """t u_t a u_t* + (1-t) v_t b v_t*: contraction of the injective compacts.

    Endpoints are returned bit-for-bit.  Both inputs must be injective
    (min singular value above 1e-10); the direct-sum structure of the two
    ranges keeps the interpolant injective up to discretization tolerance.
    """
    a, b = as_matrix(a), as_matrix(b)
    if a.shape[0] != grid.n or b.shape[0] != grid.n:
        raise ValidationError("operands must live on the grid space")
    if not 0.0 <= t <= 1.0:
        raise ValidationError(f"t must be in [0, 1], got {t}")
    for name, M in (("a", a), ("b", b)):
        smin = _min_singular(M)
        if smin < INJECTIVITY_ATOL:
            raise DegeneracyError(f"operand {name} is not injective: min singular value {smin:.3e}")
    if t == 0.0:
        return a.copy()
    if t == 1.0:
        return b.copy()
    U = shrink_isometry(t, grid)
    W = stretch_isometry(t, grid)
    return t * (U @ a @ adjoint(U)) + (1.0 - t) * (W @ b @ adjoint(W))


def rk_contraction(t: float, A: HermOp, B: HermOp, grid: GridSpace) -> HermOp:
    """(1/t) u_t A u_t* + 1/(1-t) v_t B v_t* on invertible Hermitian inputs.

    The endpoint conventions return A at t = 0 and B at t = 1.  Inverting
    intertwines this with ``zk_contraction`` of the inverses; the relation is
    exact where the grid aligns with the cut (see ``inversion_consistency``).
    """
    A, B = as_hermop(A), as_hermop(B)
    if A.dim != grid.n or B.dim != grid.n:
        raise ValidationError("operands must live on the grid space")
    if not 0.0 <= t <= 1.0:
        raise ValidationError(f"t must be in [0, 1], got {t}")
    if t == 0.0:
        return A
    if t == 1.0:
        return B
    for name, M in (("A", A), ("B", B)):
        smin = float(np.min(np.abs(M.eigenvalues)))
        if smin < INJECTIVITY_ATOL:
            raise DegeneracyError(f"operand {name} is singular: min |eigenvalue| {smin:.3e}")
    U = shrink_isometry(t, grid)
    W = stretch_isometry(t, grid)
    H = (U @ A.matrix @ adjoint(U)) / t + (W @ B.matrix @ adjoint(W)) / (1.0 - t)
    return HermOp((H + adjoint(H)) / 2.0)


def inversion_consistency(t: float, A: HermOp, B: HermOp, grid: GridSpace) -> float:
    """|| rk(t,A,B)^(-1) - zk(t, A^(-1), B^(-1)) || at an interior t."""
    A, B = as_hermop(A), as_hermop(B)
    H = rk_contraction(t, A, B, grid)
    Hinv = np.linalg.inv(H.matrix)
    ainv = func_calc(A, lambda x: 1.0 / x)
    binv = func_calc(B, lambda x: 1.0 / x)
    return op_norm(Hinv - zk_contraction(t, ainv, binv, grid))


def default_compact_factor(dim: int) -> HermOp:
    """Positive compact-profile factor diag(1/(j+1)) scaled to norm 0.9."""
    return HermOp(np.diag(0.9 / np.arange(1.0, dim + 1.0)))


def compactify_homotopy(t: float, A: HermOp, k: HermOp) -> HermOp:
    """C_t A C_t with C_t = ((1-t) + t k)^(-1): pushes A toward compact resolvent.

    ``k`` must be positive definite with norm < 1; then ||C_t^(-1)|| <= 1 for
    every t, so inverses never grow and spectral gaps around 0 survive the
    deformation.  t = 0 returns A unchanged.
    """
    if not 0.0 <= t <= 1.0:
        raise ValidationError(f"t must be in [0, 1], got {t}")
    A, k = as_hermop(A), as_hermop(k)
    if A.dim != k.dim:
        raise ValidationError(f"dimension mismatch: {A.dim} vs {k.dim}")
    wk = k.eigenvalues
    if float(wk[0]) <= 0.0:
        raise ValidationError(f"k must be positive definite, min eigenvalue {wk[0]!r}")
    if float(wk[-1]) >= 1.0:
        raise ValidationError(f"k must have norm < 1, got {wk[-1]!r}")
    if t == 0.0:
        return A
    C = func_calc(k, lambda lam: 1.0 / ((1.0 - t) + t * lam))
    H = C @ A.matrix @ C
    return HermOp((H + adjoint(H)) / 2.0)


def unitary_log_retraction(t: float, u: np.ndarray) -> np.ndarray:
    """exp(t log u) along the principal branch; contracts unitaries to 1.

    Defined for unitaries with no spectrum within 1e-8 of -1 (the branch
    point).  Eigenvalue arguments scale linearly in t, endpoints are exact,
    and the odd-unitary constraint J u J = u* is preserved for every t.
    """
    u = as_matrix(u)
    n = u.shape[0]
    defect = op_norm(adjoint(u) @ u - np.eye(n))
    if defect > 1e-10:
        raise ValidationError(f"input is not unitary: ||u*u - 1|| = {defect:.3e}")
    if not 0.0 <= t <= 1.0:
        raise ValidationError(f"t must be in [0, 1], got {t}")
    if t == 0.0:
        return np.eye(n, dtype=complex)
    if t == 1.0:
        return u.copy()
    T, Q = scipy.linalg.schur(u, output="complex")
    lam = np.diag(T)
    if float(np.min(np.abs(lam + 1.0))) < 1e-8:
        raise BranchCutError("unitary has an eigenvalue at the branch point -1")
    args = np.angle(lam)
    return (Q * np.exp(1j * t * args)) @ adjoint(Q)


def block_double(M: np.ndarray) -> np.ndarray:
    """M (+) M: the paired form that acts on graded doubled spaces."""
    M = as_matrix(M)
    return scipy.linalg.block_diag(M, M)


def discretization_tolerance(
    n: int,
    ts: tuple[float, ...] = (0.3, 0.5, 0.7),
    modes: int = SMOOTH_MODES,
) -> float:
    """delta(n): worst band-limited defect of the isometry pair at sampled t."""
    grid = GridSpace.make(n)
    worst = 0.0
    for t in ts:
        worst = max(
            worst,
            isometry_defect(shrink_isometry(t, grid), grid, modes),
            isometry_defect(stretch_isometry(t, grid), grid, modes),
            completeness_defect(t, grid, modes),
        )
    return worst


def compact_injective_sample(
    rng: np.random.Generator, n: int, *, mixed_signs: bool = False
) -> np.ndarray:
    """Random Hermitian with the compact eigenvalue profile 1/(j+1), injective."""
    X = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    Q = np.linalg.qr(X)[0]
    lam = 1.0 / np.arange(1.0, n + 1.0)
    if mixed_signs:
        lam = lam * rng.choice([-1.0, 1.0], size=n)
    return (Q * lam) @ adjoint(Q)


def zk_injectivity_margin(
    n: int,
    seed: int = 0,
    ts: tuple[float, ...] = (0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9),
) -> float:
    """Smallest singular value of the contraction over sampled t (seeded pair)."""
    rng = np.random.default_rng(seed)
    grid = GridSpace.make(n)
    a = compact_injective_sample(rng, n)
    b = compact_injective_sample(rng, n)
    return min(_min_singular(zk_contraction(t, a, b, grid)) for t in ts)


def odd_retraction_defect(
    dim: int,
    seed: int = 0,
    ts: tuple[float, ...] = (0.25, 0.5, 0.75),
) -> float:
    """Constraint defect of the log retraction on a seeded odd unitary.

    Builds u = exp(i H) with H an odd-embedded random matrix (so J u J = u*
    exactly and the spectrum stays clear of -1) and returns the worst
    ``odd_unitary_defect`` of the retraction over the sampled t.
    """
    if dim % 2 != 0:
        raise ValidationError("odd unitaries live on a doubled (even-dim) space")
    from .transforms import odd_embedding, odd_unitary_defect

    rng = np.random.default_rng(seed)
    half = dim // 2
    C = rng.standard_normal((half, half)) + 1j * rng.standard_normal((half, half))
    C *= 2.5 / np.linalg.norm(C, 2)  # keeps spec(H) inside (-pi, pi)
    H = odd_embedding(C)
    u = func_calc(H, lambda lam: np.exp(1j * lam))
    return max(odd_unitary_defect(unitary_log_retraction(t, u)) for t in ts)
