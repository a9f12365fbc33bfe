"""Dense operator algebra and Liouvillian solvers.

Conventions
-----------
Density matrices are vectorized by column stacking, ``vec(rho) =
rho.reshape(-1, order="F")``, so that ``vec(A X B) = (B^T kron A) vec(X)``.
Superoperators are square matrices acting on these vectors. Small systems are
held as dense ``numpy`` arrays; the composite atom-resonator generator is
assembled in ``scipy.sparse`` storage and every solve below works on dense
copies of its decoupled blocks.
"""

from __future__ import annotations

import os

import mpmath
import numpy as np
import scipy.linalg as sla
import scipy.sparse as sp
import scipy.sparse.linalg as spla
from scipy.sparse.csgraph import connected_components

#: default cap on the Hilbert-space dimension, overridable by environment
DEFAULT_MAX_DIM = 256
MAX_DIM_ENV = "QREFRIG_MAX_DIM"


class DimensionCapError(ValueError):
    """Raised when a Hilbert space exceeds the configured dimension cap."""


class DegenerateSteadyStateError(RuntimeError):
    """The Liouvillian has more than one stationary state."""

    def __init__(self, nullity, message=None):
        self.nullity = nullity
        super().__init__(message or f"steady state is not unique (nullity {nullity})")


class ConvergenceError(RuntimeError):
    """An iterative solve stopped above its residual target."""

    def __init__(self, residual, message=None):
        self.residual = residual
        super().__init__(message or f"no convergence, residual {residual:.3e}")


class IllConditionedError(RuntimeError):
    """A resolvent solve was too ill-conditioned to trust."""

    def __init__(self, condition, message=None):
        self.condition = condition
        super().__init__(message or f"resolvent condition number {condition:.3e}")


def max_dim():
    """Hilbert-dimension cap, read from ``QREFRIG_MAX_DIM`` if set."""
    value = os.environ.get(MAX_DIM_ENV)
    return int(value) if value else DEFAULT_MAX_DIM


def check_dim(dim):
    cap = max_dim()
    if dim > cap:
        raise DimensionCapError(
            f"Hilbert dimension {dim} exceeds the cap {cap} "
            f"(reduce the Fock truncation or raise {MAX_DIM_ENV})"
        )


# ---------------------------------------------------------------------------
# operators
# ---------------------------------------------------------------------------


def kron(a, b):
    """Tensor product ``a (x) b`` with index order ``[i mu, j nu]``."""
    a = np.asarray(a)
    b = np.asarray(b)
    check_dim(a.shape[0] * b.shape[0])
    return np.kron(a, b)


def transition(i, j, dim):
    """Matrix unit ``|i><j|``."""
    op = np.zeros((dim, dim), dtype=complex)
    op[i, j] = 1.0
    return op


def projector(i, dim):
    return transition(i, i, dim)


def destroy(fock_dim):
    """Truncated annihilation operator."""
    return np.diag(np.sqrt(np.arange(1, fock_dim)), 1).astype(complex)


def is_hermitian(op, atol=1e-12):
    op = np.asarray(op)
    return bool(np.allclose(op, op.conj().T, rtol=0.0, atol=atol))


def is_density_matrix(rho, trace_atol=1e-10, eig_atol=1e-9):
    rho = np.asarray(rho)
    if not is_hermitian(rho):
        return False
    if abs(np.trace(rho) - 1.0) > trace_atol:
        return False
    return bool(np.linalg.eigvalsh(0.5 * (rho + rho.conj().T)).min() >= -eig_atol)


def vec(rho):
    return np.asarray(rho).reshape(-1, order="F")


def unvec(v, dim=None):
    v = np.asarray(v)
    if dim is None:
        dim = int(round(np.sqrt(v.size)))
    return v.reshape(dim, dim, order="F")


def superop_dim(superop):
    """Hilbert dimension underlying a superoperator."""
    n = superop.shape[0]
    dim = int(round(np.sqrt(n)))
    if dim * dim != n or superop.shape[1] != n:
        raise ValueError(f"shape {superop.shape} is not a superoperator shape")
    return dim


def _identity(dim, sparse):
    return sp.identity(dim, dtype=complex, format="csr") if sparse else np.eye(dim)


def _kron(a, b, sparse):
    return sp.kron(a, b, format="csr") if sparse else np.kron(a, b)


def hamiltonian_superop(H, sparse=False):
    """Generator of ``-i[H, rho]``."""
    H = np.asarray(H, dtype=complex)
    dim = H.shape[0]
    eye = _identity(dim, sparse)
    return -1j * (_kron(eye, H, sparse) - _kron(H.T, eye, sparse))


def lindblad_dissipator(L, rate, sparse=False):
    """Superoperator of ``rate * (L rho L^+ - {L^+ L, rho}/2)``.

    Parameters
    ----------
    L : (d, d) array_like
        Jump operator.
    rate : float
        Non-negative rate; zero gives the zero superoperator.
    sparse : bool
        Return ``scipy.sparse`` CSR storage instead of a dense array.
    """
    if rate < 0:
        raise ValueError(f"dissipator rate must be non-negative, got {rate}")
    L = np.asarray(L, dtype=complex)
    dim = L.shape[0]
    eye = _identity(dim, sparse)
    LdL = L.conj().T @ L
    out = _kron(L.conj(), L, sparse) - 0.5 * _kron(eye, LdL, sparse) - 0.5 * _kron(LdL.T, eye, sparse)
    return rate * out


def liouvillian(H=None, jumps=(), dim=None, sparse=False):
    """Assemble ``-i[H, .] + sum_k D[L_k]`` from ``(L_k, rate_k)`` pairs."""
    if H is not None:
        dim = np.asarray(H).shape[0]
    elif jumps:
        dim = np.asarray(jumps[0][0]).shape[0]
    if dim is None:
        raise ValueError("cannot infer the Hilbert dimension")
    check_dim(dim)
    out = sp.csr_matrix((dim * dim, dim * dim), dtype=complex) if sparse else np.zeros((dim * dim,) * 2, complex)
    if H is not None:
        out = out + hamiltonian_superop(H, sparse)
    for L, rate in jumps:
        if rate:
            out = out + lindblad_dissipator(L, rate, sparse)
    return out


def apply(superop, rho):
    """Action of a superoperator on a matrix."""
    rho = np.asarray(rho)
    return unvec(superop @ vec(rho), rho.shape[0])


# ---------------------------------------------------------------------------
# block structure
# ---------------------------------------------------------------------------


def coupled_blocks(superop):
    """Index sets of the decoupled diagonal blocks of a superoperator.

    Two vectorized matrix elements share a block when the generator connects
    them in either direction. Solving each block separately is exact, and it
    is what keeps the composite problem small.
    """
    pattern = sp.csr_matrix(superop) if not sp.issparse(superop) else superop.tocsr()
    pattern = abs(pattern) + abs(pattern.T)
    n_comp, labels = connected_components(pattern, directed=False)
    order = np.argsort(labels, kind="stable")
    splits = np.flatnonzero(np.diff(labels[order])) + 1
    return [np.sort(block) for block in np.split(order, splits)]


def _dense_block(superop, idx):
    if sp.issparse(superop):
        return superop.tocsr()[idx][:, idx].toarray()
    return np.asarray(superop)[np.ix_(idx, idx)]


def _norm(superop):
    if sp.issparse(superop):
        return float(spla.norm(superop))
    return float(np.linalg.norm(superop))


def _to_mp(matrix):
    return mpmath.matrix([[mpmath.mpc(complex(x)) for x in row] for row in np.asarray(matrix)])


def _restore_trace(A, trace_w):
    """Re-impose ``vec(1)^+ L = 0`` on an ``mpmath`` block in place.

    Diagonal population entries are sums of many rates, and rounding them
    to double drops any rate far below the largest one. Recomputing each as
    minus the other population entries of its column restores exact trace
    preservation at the working precision; other columns get the residual
    folded into their first population entry.
    """
    rows = [i for i, w in enumerate(trace_w) if w]
    for j in range(A.cols):
        total = mpmath.fsum(A[i, j] for i in rows)
        if total == 0:
            continue
        if trace_w[j]:
            A[j, j] -= total
        else:
            target = next((i for i in rows if A[i, j] != 0), None)
            if target is not None:
                A[target, j] -= total
    return A


def _from_mp(vector):
    return np.array([complex(vector[i]) for i in range(vector.rows)])


# ---------------------------------------------------------------------------
# steady state
# ---------------------------------------------------------------------------


def _population_block(superop, dim):
    diag_idx = np.arange(dim) * (dim + 1)
    blocks = coupled_blocks(superop)
    hits = [b for b in blocks if np.isin(diag_idx, b).any()]
    if len(hits) > 1:
        raise DegenerateSteadyStateError(
            len(hits), f"populations split into {len(hits)} uncoupled blocks (nullity >= {len(hits)})"
        )
    return hits[0], diag_idx


def _nullity(block, dps=None, trace_w=None):
    if dps is None:
        s = np.linalg.svd(block, compute_uv=False)
        tol = s.max() * max(block.shape) * np.finfo(float).eps
        return int(np.sum(s <= tol))
    with mpmath.workdps(dps):
        A = _to_mp(block)
        if trace_w is not None:
            _restore_trace(A, trace_w)
        s = mpmath.svd_c(A, compute_uv=False)
        s = [abs(s[i]) for i in range(s.rows)]
        tol = max(s) * mpmath.mpf(10) ** (-(dps - 10))
        return sum(1 for x in s if x <= tol)


def _inverse_iteration(block, trace_w, maxiter=50, rtol=1e-10):
    n = block.shape[0]
    scale = np.linalg.norm(block, 1) or 1.0
    shift = 1e-14 * scale
    lu = sla.lu_factor(block - shift * np.eye(n), check_finite=False)
    rng = np.random.default_rng(0)
    x = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    target = rtol * np.linalg.norm(block)
    residual = np.inf
    for _ in range(maxiter):
        x = sla.lu_solve(lu, x, check_finite=False)
        tr = trace_w @ x
        if tr == 0 or not np.isfinite(tr):
            x = x / np.linalg.norm(x)
            continue
        x = x / tr
        residual = np.linalg.norm(block @ x)
        if residual <= target:
            return x, residual
    return x, residual


def _refine(block, trace_w, x, steps=4):
    """Iterative refinement of ``block x = 0, trace_w . x = 1``.

    The redundant balance row at the first population is swapped for the
    trace condition. Residuals are accumulated in ``longdouble`` while the
    corrections reuse one double-precision factorization; this removes the
    growth of the error with the largest rate in the generator.
    """
    pivot = int(np.flatnonzero(trace_w)[0])
    B = block.copy()
    B[pivot] = trace_w
    try:
        lu = sla.lu_factor(B, check_finite=False)
    except (ValueError, sla.LinAlgError):
        return x
    if not np.all(np.isfinite(lu[0])) or np.min(np.abs(np.diag(lu[0]))) == 0:
        return x
    B_ext = B.astype(np.clongdouble)
    rhs = np.zeros(B.shape[0], dtype=np.clongdouble)
    rhs[pivot] = 1
    xe = x.astype(np.clongdouble)
    for _ in range(steps):
        r = rhs - B_ext @ xe
        dx = sla.lu_solve(lu, r.astype(complex), check_finite=False)
        if not np.all(np.isfinite(dx)):
            break
        xe = xe + dx
        if np.max(np.abs(dx)) <= 1e-18 * np.max(np.abs(xe)):
            break
    return xe.astype(complex)


def steady_state(superop, dps=None, check_nullity=True, rtol=1e-10):
    """Unique trace-one stationary state of a Liouvillian.

    Only the block of the generator that carries the populations is solved.
    In double precision this is shifted inverse iteration with trace
    normalization, falling back to a full eigendecomposition when the
    iteration stalls, and polished by mixed-precision refinement. With ``dps`` set, the block is solved as a bordered
    linear system (one balance equation replaced by the trace condition) in
    ``mpmath`` at that many decimal digits; use this when stationary
    populations span many orders of magnitude.

    Raises
    ------
    DegenerateSteadyStateError
        If the null space has dimension two or more.
    ConvergenceError
        If the fixed-point residual stays above ``rtol * ||L||``.
    """
    dim = superop_dim(superop)
    block_idx, diag_idx = _population_block(superop, dim)
    block = _dense_block(superop, block_idx)
    trace_w = np.isin(block_idx, diag_idx).astype(complex)

    if check_nullity:
        k = _nullity(block, dps, trace_w)
        if k != 1:
            raise DegenerateSteadyStateError(k)

    if dps is None:
        x, residual = _inverse_iteration(block, trace_w, rtol=rtol)
        if residual > rtol * np.linalg.norm(block):
            if block.shape[0] > 4096:
                raise ConvergenceError(residual)
            vals, vecs = np.linalg.eig(block)
            x = vecs[:, np.argmin(np.abs(vals))]
            x = x / (trace_w @ x)
        x = _refine(block, trace_w, x)
    else:
        with mpmath.workdps(dps):
            A = _restore_trace(_to_mp(block), trace_w)
            pivot = int(np.flatnonzero(trace_w)[0])
            for j in range(A.cols):
                A[pivot, j] = mpmath.mpc(trace_w[j].real)
            rhs = mpmath.matrix(A.rows, 1)
            rhs[pivot] = 1
            x = _from_mp(mpmath.lu_solve(A, rhs))

    full = np.zeros(dim * dim, dtype=complex)
    full[block_idx] = x
    rho = unvec(full, dim)
    rho = 0.5 * (rho + rho.conj().T)
    rho = rho / np.trace(rho).real

    residual = np.linalg.norm(superop @ vec(rho))
    if residual > rtol * _norm(superop):
        raise ConvergenceError(residual)
    return rho


# ---------------------------------------------------------------------------
# dynamics and correlations
# ---------------------------------------------------------------------------


def evolve(superop, rho0, t):
    """``exp(t L)[rho0]`` by scaling-and-squaring (``scipy.linalg.expm``)."""
    if t < 0:
        raise ValueError("evolution time must be non-negative")
    rho0 = np.asarray(rho0, dtype=complex)
    if t == 0:
        return rho0.copy()
    dense = superop.toarray() if sp.issparse(superop) else np.asarray(superop)
    rho = unvec(sla.expm(t * dense) @ vec(rho0), rho0.shape[0])
    drift = abs(np.trace(rho) - np.trace(rho0))
    if drift > 1e-8:
        raise ConvergenceError(drift, f"trace drifted by {drift:.3e} during evolution")
    return rho


def propagator(superop, dt):
    dense = superop.toarray() if sp.issparse(superop) else np.asarray(superop)
    return sla.expm(dt * dense)


def correlation_integral(superop, rho_ss, X, Y, dps=None, cond_max=1e13):
    """Time integral ``int_0^inf <X(s) Y(0)>_ss ds`` of the decaying part.

    Evaluates ``tr{X (-L)^{-1}[Y rho_ss - rho_ss tr(Y rho_ss)]}``. The
    stationary mode is removed from the source exactly, and the resolvent is
    taken on the trace-free complement through the nonsingular matrix
    ``-L + vec(rho_ss) vec(1)^+``. Only blocks the source touches are solved.

    Raises
    ------
    IllConditionedError
        If a block's condition number exceeds ``cond_max`` (double precision
        only).
    """
    dim = superop_dim(superop)
    rho_ss = np.asarray(rho_ss, dtype=complex)
    X = np.asarray(X, dtype=complex)
    Y = np.asarray(Y, dtype=complex)

    source = Y @ rho_ss
    v = vec(source) - vec(rho_ss) * np.trace(source)
    if not np.any(v):
        return 0.0 + 0.0j
    r = vec(rho_ss)
    w = vec(np.eye(dim))

    result = np.zeros(dim * dim, dtype=complex)
    for idx in coupled_blocks(superop):
        vb = v[idx]
        if not np.any(vb):
            continue
        block = _dense_block(superop, idx)
        rank_one = np.outer(r[idx], w[idx].conj())
        if dps is None:
            M = -block + rank_one
            cond = np.linalg.cond(M)
            if not np.isfinite(cond) or cond > cond_max:
                raise IllConditionedError(cond)
            result[idx] = np.linalg.solve(M, vb)
        else:
            with mpmath.workdps(dps):
                M = -_restore_trace(_to_mp(block), w[idx]) + _to_mp(rank_one)
                result[idx] = _from_mp(mpmath.lu_solve(M, _to_mp(vb[:, None])))
    return complex(np.sum(X.T * unvec(result, dim)))
