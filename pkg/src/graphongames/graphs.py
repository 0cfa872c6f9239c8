"""Interaction structures: adjacency matrices, graphons, sampling, spectra.

A graphon here is one of a few analytic kernels or a step kernel built from
a block-value matrix; both evaluate pointwise on [0,1]² and discretize to a
midpoint matrix. Step kernels are allowed to carry values outside [0,1]
(density-rescaled sampled graphs, kernel differences); the samplers check
that the kernel they are given is a proper graphon.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import substream
from .errors import ArgumentError, CapabilityError, NumericError, ShapeError

__all__ = [
    "InteractionMatrix",
    "Graphon",
    "SpectralDecomposition",
    "step_graphon",
    "apply_operator",
    "local_aggregate",
    "spectrum",
    "graphon_lambda1",
    "cut_norm",
    "op_norm_diff",
    "sample_weighted",
    "sample_simple",
    "sampling_bound",
    "group_eigenvalues",
]

_SYM_TOL = 1e-12


def _frozen(a):
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class InteractionMatrix:
    """Symmetric interaction weights with raw entries in [0,1].

    `scale` multiplies the entries wherever the matrix acts (1/κ for
    density-rescaled simple graphs), so the effective weights may exceed 1.
    """

    entries: np.ndarray
    scale: float = 1.0

    def __post_init__(self):
        e = _frozen(self.entries)
        object.__setattr__(self, "entries", e)
        if e.ndim != 2 or e.shape[0] != e.shape[1] or e.shape[0] < 1:
            raise ShapeError(f"adjacency must be square, got shape {e.shape}")
        if not np.all(np.isfinite(e)):
            raise ArgumentError("adjacency entries must be finite")
        if np.max(np.abs(e - e.T)) > _SYM_TOL:
            raise ArgumentError("adjacency matrix must be symmetric")
        if np.min(e) < -_SYM_TOL or np.max(e) > 1.0 + _SYM_TOL:
            raise ArgumentError("raw adjacency entries must lie in [0, 1]")
        if self.scale <= 0:
            raise ArgumentError("scale must be positive")

    @property
    def n(self):
        return self.entries.shape[0]

    def effective(self):
        """scale * entries, the weights the game actually uses."""
        return self.scale * self.entries

    def without_diagonal(self):
        e = self.entries.copy()
        np.fill_diagonal(e, 0.0)
        return InteractionMatrix(e, self.scale)


@dataclass(frozen=True)
class Graphon:
    """Symmetric measurable kernel on [0,1]².

    kind is one of 'constant' (level `value`), 'product' (x·y),
    'min' (min(x,y)), or 'step' (block values `blocks` on the uniform
    partition, covering stochastic block models). Analytic builtins are
    validated to have values in [0,1]; step kernels may carry any bounded
    symmetric values (scaled sampled graphs, differences).
    """

    kind: str
    value: float = 0.0
    blocks: np.ndarray | None = None

    def __post_init__(self):
        if self.kind not in ("constant", "product", "min", "step"):
            raise ArgumentError(f"unknown graphon kind {self.kind!r}")
        if self.kind == "constant" and not 0.0 <= self.value <= 1.0:
            raise ArgumentError("constant graphon level must be in [0, 1]")
        if self.kind == "step":
            b = _frozen(self.blocks)
            object.__setattr__(self, "blocks", b)
            if b.ndim != 2 or b.shape[0] != b.shape[1] or b.shape[0] < 1:
                raise ShapeError("step graphon needs a square block matrix")
            if np.max(np.abs(b - b.T)) > _SYM_TOL:
                raise ArgumentError("step graphon blocks must be symmetric")
        elif self.blocks is not None:
            raise ArgumentError("blocks only apply to the step kind")

    @staticmethod
    def constant(p):
        return Graphon("constant", value=float(p))

    @staticmethod
    def product():
        return Graphon("product")

    @staticmethod
    def min_kernel():
        return Graphon("min")

    @staticmethod
    def block_model(blocks):
        return Graphon("step", blocks=np.asarray(blocks, dtype=float))

    @property
    def n_blocks(self):
        return self.blocks.shape[0] if self.kind == "step" else None

    def is_proper(self):
        """True when values provably lie in [0,1] (sampling requires this)."""
        if self.kind == "step":
            return bool(np.min(self.blocks) >= -_SYM_TOL and np.max(self.blocks) <= 1 + _SYM_TOL)
        return True

    def __call__(self, x, y):
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        if self.kind == "constant":
            return np.full(np.broadcast_shapes(x.shape, y.shape), self.value)
        if self.kind == "product":
            return x * y
        if self.kind == "min":
            return np.minimum(x, y)
        k = self.blocks.shape[0]
        i = np.minimum((x * k).astype(int), k - 1)
        j = np.minimum((y * k).astype(int), k - 1)
        return self.blocks[i, j]

    def discretize(self, m):
        """Midpoint values W(x_i, x_j) on the uniform m-partition."""
        if m < 1:
            raise ArgumentError("resolution must be >= 1")
        mids = (np.arange(m) + 0.5) / m
        return self(mids[:, None], mids[None, :])


def step_graphon(matrix):
    """Step graphon of an interaction matrix: block values scale·entries."""
    return Graphon("step", blocks=matrix.effective())


def local_aggregate(matrix, profile):
    """Per-player aggregate zⁱ = (scale/N)·Σ_j G_ij aʲ, per scenario and step."""
    if matrix.n != profile.players:
        raise ShapeError(f"matrix has {matrix.n} players, profile {profile.players}")
    z = np.einsum("ij,jst->ist", matrix.effective(), profile.values) / matrix.n
    return profile.with_values(z)


def apply_operator(graphon, profile):
    """Kernel operator on a uniform-partition profile by the midpoint rule.

    z(x_i) = (1/N)Σ_j W(x_i, x_j) aʲ with x at block midpoints; exact for
    step graphons whose blocks align with the partition.
    """
    n = profile.players
    k = graphon.discretize(n)
    z = np.einsum("ij,jst->ist", k, profile.values) / n
    return profile.with_values(z)


@dataclass(frozen=True)
class SpectralDecomposition:
    """Full symmetric eigendecomposition, eigenvalues descending.

    Sign convention: the first nonzero component of each eigenvector is
    positive; exact eigenvalue ties are ordered lexicographically by
    eigenvector so repeated runs agree.
    """

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    source_n: int


def spectrum(matrix_or_array):
    """Eigendecomposition of a symmetric matrix (raw entries, unscaled)."""
    if isinstance(matrix_or_array, InteractionMatrix):
        g = np.asarray(matrix_or_array.entries, dtype=float)
    else:
        g = np.asarray(matrix_or_array, dtype=float)
        if g.ndim != 2 or g.shape[0] != g.shape[1]:
            raise ShapeError("spectrum needs a square matrix")
        if np.max(np.abs(g - g.T)) > 1e-10:
            raise ArgumentError("spectrum requires a symmetric matrix")
    w, v = np.linalg.eigh(g)
    order = np.argsort(-w, kind="stable")
    w = w[order]
    v = v[:, order]
    for k in range(v.shape[1]):
        col = v[:, k]
        nz = np.nonzero(np.abs(col) > 1e-12)[0]
        if nz.size and col[nz[0]] < 0:
            v[:, k] = -col
    k = 0
    n = w.size
    while k < n:
        j = k
        while j + 1 < n and w[j + 1] == w[k]:
            j += 1
        if j > k:
            block = v[:, k : j + 1]
            v[:, k : j + 1] = block[:, np.lexsort(block[::-1])]
        k = j + 1
    return SpectralDecomposition(_frozen(w), _frozen(v), n)


def group_eigenvalues(eigenvalues, tol=1e-9):
    """Group a descending eigenvalue sequence into (value, indices) classes,
    merging values equal within tol (the discretized multiplicity classes)."""
    groups = []
    for k, lam in enumerate(np.asarray(eigenvalues, dtype=float)):
        if groups and abs(groups[-1][0] - lam) <= tol:
            groups[-1][1].append(k)
        else:
            groups.append([float(lam), [k]])
    return [(lam, tuple(idx)) for lam, idx in groups]


def _dominant_eigenpair(k_matrix, rng, max_iters, tol, positive_start=False):
    """Power iteration returning (rayleigh, residual); raises on stagnation."""
    n = k_matrix.shape[0]
    x = np.abs(rng.standard_normal(n)) + 0.1 if positive_start else rng.standard_normal(n)
    x /= np.linalg.norm(x)
    lam, res = 0.0, np.inf
    for _ in range(max_iters):
        y = k_matrix @ x
        ny = float(np.linalg.norm(y))
        if ny == 0.0:
            return 0.0, 0.0
        x = y / ny
        lam = float(x @ (k_matrix @ x))
        res = float(np.linalg.norm(k_matrix @ x - lam * x))
        if res <= tol * max(1.0, abs(lam)):
            return lam, res
    raise NumericError(f"power iteration stalled at residual {res:.3e}", residual=res)


def graphon_lambda1(graphon, m=256, max_iters=20000, tol=1e-11):
    """Largest eigenvalue of the kernel operator, by power iteration on the
    m-point midpoint discretization scaled by 1/m.

    Built for proper graphons (nonnegative kernels), where the largest
    eigenvalue equals the spectral radius; iterating the squared operator
    stays convergent even on periodic (bipartite-like) kernels whose ±λ
    pair would make the plain iteration oscillate. The estimate lies in
    [0, 1] up to discretization error.
    """
    if m < 2:
        raise ArgumentError("resolution m must be >= 2")
    k = graphon.discretize(m) / m
    if np.min(k) < -1e-9:
        raise ArgumentError("lambda1 estimation expects a nonnegative kernel")
    if not np.any(k):
        return 0.0
    rng = substream(0, 11, m)
    lam2, _ = _dominant_eigenpair(k @ k, rng, max_iters, tol, positive_start=True)
    return float(np.sqrt(max(lam2, 0.0)))


def op_norm_diff(w1, w2, m=256, max_iters=20000, tol=1e-10):
    """Operator norm of the difference kernel at resolution m.

    Power iteration runs on the squared operator K², which is sign-safe for
    indefinite kernels (±λ pairs merge into one eigenspace of K²); the norm
    is the square root of its dominant eigenvalue.
    """
    if m < 2:
        raise ArgumentError("resolution m must be >= 2")
    k = (w1.discretize(m) - w2.discretize(m)) / m
    if not np.any(k):
        return 0.0
    k2 = k @ k
    rng = substream(0, 13, m)
    lam2, _ = _dominant_eigenpair(k2, rng, max_iters, tol)
    return float(np.sqrt(max(lam2, 0.0)))


def _step_blocks_and_weights(kernel):
    """Block values and widths of a step kernel; None for analytic kinds."""
    if isinstance(kernel, Graphon):
        if kernel.kind == "constant":
            return np.array([[kernel.value]]), np.array([1.0])
        if kernel.kind == "step":
            k = kernel.blocks.shape[0]
            return np.asarray(kernel.blocks, dtype=float), np.full(k, 1.0 / k)
        return None
    arr = np.asarray(kernel, dtype=float)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise ShapeError("step kernel must be a square block matrix")
    return arr, np.full(arr.shape[0], 1.0 / arr.shape[0])


def _cut_norm_exact_blocks(blocks, widths):
    """Exact cut norm of a step kernel by enumerating row subsets.

    For fixed S₁ the optimal S₂ keeps exactly the columns whose mass has one
    sign, so only the 2^k row subsets need enumerating.
    """
    k = blocks.shape[0]
    mass = blocks * np.outer(widths, widths)
    best = 0.0
    for bits in range(1, 1 << k):
        rows = [i for i in range(k) if bits >> i & 1]
        col = mass[rows].sum(axis=0)
        best = max(best, float(col[col > 0].sum()), float(-col[col < 0].sum()))
    return best


def _cut_norm_heuristic_blocks(blocks, widths, restarts, seed):
    """Alternating coordinate ascent over block indicator pairs; lower bound."""
    k = blocks.shape[0]
    mass = blocks * np.outer(widths, widths)
    rng = substream(seed, 17, k)
    best = 0.0
    for _ in range(restarts):
        for signed in (mass, -mass):
            s1 = rng.integers(0, 2, size=k).astype(bool)
            if not s1.any():
                s1[int(rng.integers(0, k))] = True
            value = 0.0
            for _ in range(200):
                col = signed[s1].sum(axis=0)
                s2 = col > 0
                row = signed[:, s2].sum(axis=1)
                s1_new = row > 0
                new_value = float(signed[np.ix_(s1_new, s2)].sum())
                s1 = s1_new
                if new_value <= value + 1e-15:
                    value = max(value, new_value)
                    break
                value = new_value
            best = max(best, value)
    return best


def cut_norm(kernel, mode="exact", max_exact_blocks=16, restarts=32, heuristic_resolution=64):
    """Cut norm sup over measurable S₁, S₂ of |∫∫_{S₁×S₂} W|.

    `kernel` is a Graphon or a raw square block-value array (equal-width
    blocks). For step kernels the supremum is attained on unions of blocks.
    Exact mode enumerates block subsets (limited to max_exact_blocks);
    heuristic mode runs restarted coordinate ascent and returns
    (value, "lower-bound"). Analytic kernels are discretized to
    heuristic_resolution blocks first.
    """
    step = _step_blocks_and_weights(kernel)
    if mode == "exact":
        if step is None:
            raise CapabilityError("exact cut norm requires a step kernel")
        blocks, widths = step
        if blocks.shape[0] > max_exact_blocks:
            raise CapabilityError(
                f"exact cut norm limited to {max_exact_blocks} blocks, got {blocks.shape[0]}"
            )
        return _cut_norm_exact_blocks(blocks, widths)
    if mode != "heuristic":
        raise ArgumentError(f"unknown cut norm mode {mode!r}")
    if step is None:
        m = heuristic_resolution
        blocks, widths = kernel.discretize(m), np.full(m, 1.0 / m)
    else:
        blocks, widths = step
    return _cut_norm_heuristic_blocks(blocks, widths, restarts, seed=0), "lower-bound"


def sample_weighted(graphon, n, seed):
    """Weighted sampling: sorted iid uniform latents, entries W(x_i, x_j).

    The diagonal keeps W(x_i, x_i); linear-quadratic game builders zero it
    separately. Returns (matrix, latent points).
    """
    if n < 1:
        raise ArgumentError("need n >= 1 nodes")
    if not graphon.is_proper():
        raise ArgumentError("sampling requires a graphon with values in [0, 1]")
    # the stream key omits n, so samples at different sizes share a common
    # uniform prefix (couples convergence ladders, cutting median noise)
    rng = substream(seed, 3)
    x = np.sort(rng.uniform(0.0, 1.0, size=n))
    entries = graphon(x[:, None], x[None, :])
    entries = np.clip((entries + entries.T) / 2.0, 0.0, 1.0)
    return InteractionMatrix(entries, scale=1.0), x


def sample_simple(graphon, n, kappa, seed):
    """Simple-graph sampling: Bernoulli(κ·W(x_i, x_j)) edges for i<j,
    symmetric, zero diagonal, scale κ⁻¹. Returns (matrix, latent points)."""
    if not 0.0 < kappa <= 1.0:
        raise ArgumentError(f"density parameter must be in (0, 1], got {kappa}")
    if n < 1:
        raise ArgumentError("need n >= 1 nodes")
    if not graphon.is_proper():
        raise ArgumentError("sampling requires a graphon with values in [0, 1]")
    rng = substream(seed, 5)
    x = np.sort(rng.uniform(0.0, 1.0, size=n))
    probs = np.clip(kappa * graphon(x[:, None], x[None, :]), 0.0, 1.0)
    u = rng.uniform(0.0, 1.0, size=(n, n))
    upper = np.triu(u < probs, k=1)
    entries = (upper | upper.T).astype(float)
    return InteractionMatrix(entries, scale=1.0 / kappa), x


def sampling_bound(n, delta, lipschitz_l, n_breaks, kappa=1.0):
    """High-probability operator-norm sampling bounds (ρ_N, ρ'_N).

    For a blockwise-Lipschitz graphon with constant L over a partition with
    K breakpoints:

        d_N  = 1/N + (8·log(N/δ)/(N+1))^0.5
        ρ_N  = 2·sqrt((L² − K²)·d_N² + K·d_N)
        ρ'_N = sqrt(4·κ⁻¹·log(2N/δ)/N) + ρ_N

    valid for δ in (N·e^{−N/5}, e^{−1}); ρ bounds the weighted-sampling
    error and ρ' the density-rescaled simple-graph error.
    """
    if n < 1:
        raise ArgumentError("n must be >= 1")
    lo, hi = n * np.exp(-n / 5.0), np.exp(-1.0)
    if not lo < delta < hi:
        raise ArgumentError(f"delta must lie in ({lo:.3e}, {hi:.3e}), got {delta}")
    if lipschitz_l < 0 or n_breaks < 0:
        raise ArgumentError("Lipschitz constant and breakpoint count must be nonnegative")
    if not 0.0 < kappa <= 1.0:
        raise ArgumentError("kappa must be in (0, 1]")
    d_n = 1.0 / n + np.sqrt(8.0 * np.log(n / delta) / (n + 1.0))
    inner = (lipschitz_l**2 - n_breaks**2) * d_n**2 + n_breaks * d_n
    if inner < 0:
        raise ArgumentError("sampling bound out of regime: negative radicand")
    rho = 2.0 * np.sqrt(inner)
    rho_prime = np.sqrt(4.0 * np.log(2.0 * n / delta) / (kappa * n)) + rho
    return float(rho), float(rho_prime)
