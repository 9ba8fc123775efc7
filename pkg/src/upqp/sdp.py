"""Small dense semidefinite-program solver.

Solves the standard-form pair

    primal:  min ⟨C, X⟩   s.t.  ⟨A_i, X⟩ = b_i (i = 1..m),  X ⪰ 0
    dual:    max bᵀy      s.t.  Z = C − Σ_i y_i A_i ⪰ 0

with all data complex Hermitian, handled natively (no realification).  The
method is an infeasible-start primal-dual interior point with HKM search
directions and a Mehrotra predictor-corrector, step damping 0.98, at most 200
iterations.  ⟨A, B⟩ denotes Re Tr(A B).

Problems may declare a block-diagonal structure via ``block_dims``; the solver
then keeps every iterate block diagonal, which is exact whenever the objective
and all constraint matrices respect the same partition.  Dimensions up to a
few hundred per block are practical; the diamond-norm programs in this package
stay well below that.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .linalg import as_matrix, hermitian_part, is_hermitian

DATA_HERMITIAN_TOL = 1e-10
STEP_DAMPING = 0.98
MAX_ITERATIONS = 200
DEFAULT_TOL = 1e-7


class SdpFailure(RuntimeError):
    """Newton step could not be computed (ill-conditioned system)."""


@dataclass(frozen=True)
class SdpProblem:
    """min ⟨c, X⟩ subject to ⟨a_i, X⟩ = b_i and X ⪰ 0.

    ``block_dims``, when given, promises that ``c`` and every ``a_i`` are
    block diagonal with those sizes (in order); the promise is checked.
    """

    c: np.ndarray
    constraints: tuple[tuple[np.ndarray, float], ...]
    block_dims: tuple[int, ...] | None = None

    def __post_init__(self):
        c = as_matrix(self.c, "objective")
        if not is_hermitian(c, DATA_HERMITIAN_TOL):
            raise ValueError("objective matrix is not Hermitian")
        object.__setattr__(self, "c", c)
        n = c.shape[0]
        cons = []
        for idx, (a, b) in enumerate(self.constraints):
            a = as_matrix(a, f"constraint {idx}")
            if a.shape != (n, n):
                raise ValueError(f"constraint {idx} has shape {a.shape}, expected {(n, n)}")
            if not is_hermitian(a, DATA_HERMITIAN_TOL):
                raise ValueError(f"constraint {idx} is not Hermitian")
            cons.append((a, float(b)))
        object.__setattr__(self, "constraints", tuple(cons))
        if self.block_dims is not None:
            dims = tuple(int(k) for k in self.block_dims)
            if sum(dims) != n:
                raise ValueError(f"block dims {dims} do not sum to n = {n}")
            object.__setattr__(self, "block_dims", dims)
            self._check_block_structure()

    @property
    def n(self) -> int:
        return self.c.shape[0]

    @property
    def m(self) -> int:
        return len(self.constraints)

    def _check_block_structure(self):
        mask = np.ones((self.n, self.n), dtype=bool)
        off = 0
        for k in self.block_dims:
            mask[off : off + k, off : off + k] = False
            off += k
        mats = [self.c] + [a for a, _ in self.constraints]
        for mat in mats:
            if np.abs(mat[mask]).max(initial=0.0) > DATA_HERMITIAN_TOL:
                raise ValueError("declared block structure is violated by problem data")


@dataclass
class IterateRecord:
    iteration: int
    primal_obj: float
    dual_obj: float
    mu: float
    primal_residual: float
    dual_residual: float


@dataclass
class SdpSolution:
    value: float
    primal: np.ndarray
    dual: np.ndarray
    status: str  # optimal | max_iterations | numerical_failure
    iterations: int
    gap: float
    history: list[IterateRecord] = field(default_factory=list)

    @property
    def optimal(self) -> bool:
        return self.status == "optimal"


def _blocks(mat: np.ndarray, dims: tuple[int, ...]) -> list[np.ndarray]:
    out, off = [], 0
    for k in dims:
        out.append(np.ascontiguousarray(mat[off : off + k, off : off + k]))
        off += k
    return out


def _assemble(blocks: list[np.ndarray], n: int, dims: tuple[int, ...]) -> np.ndarray:
    full = np.zeros((n, n), dtype=complex)
    off = 0
    for blk, k in zip(blocks, dims):
        full[off : off + k, off : off + k] = blk
        off += k
    return full


def _chol_inverse(blocks: list[np.ndarray]) -> list[np.ndarray]:
    inv = []
    for s in blocks:
        l = np.linalg.cholesky(s)
        li = np.linalg.inv(l)
        inv.append(li.conj().T @ li)
    return inv


def _max_step(s_blocks: list[np.ndarray], ds_blocks: list[np.ndarray]) -> float:
    """Largest α with S + α ΔS ⪰ 0 (∞ as a large float when unconstrained)."""
    alpha = np.inf
    for s, ds in zip(s_blocks, ds_blocks):
        l = np.linalg.cholesky(s)
        li = np.linalg.inv(l)
        w = np.linalg.eigvalsh(hermitian_part(li @ ds @ li.conj().T))
        lam = w[0]
        if lam < -1e-14:
            alpha = min(alpha, -1.0 / lam)
    return alpha


def solve(problem: SdpProblem, tol: float = DEFAULT_TOL) -> SdpSolution:
    """Run the interior-point iteration until the primal-dual gap and both
    residuals drop below ``tol`` (relative), or the iteration budget runs out.

    On budget exhaustion the best iterate is returned with status
    ``max_iterations``; a failed Newton factorization raises ``SdpFailure``.
    """
    n, m = problem.n, problem.m
    dims = problem.block_dims or (n,)
    nblk = len(dims)
    c_blocks = _blocks(problem.c, dims)
    b = np.array([bi for _, bi in problem.constraints])

    # stacked constraint blocks: a_stack[blk] has shape (m, k, k)
    a_stack, a_flat = [], []
    for blk in range(nblk):
        stack = np.stack([_blocks(a, dims)[blk] for a, _ in problem.constraints])
        a_stack.append(stack)
        a_flat.append(stack.reshape(m, -1))

    def inner_all(h_blocks):
        """vector of ⟨A_i, H⟩ over i."""
        out = np.zeros(m)
        for blk in range(nblk):
            ht = h_blocks[blk].T.reshape(-1)
            out += (a_flat[blk] @ ht).real
        return out

    def combo(y):
        """Σ_i y_i A_i per block."""
        return [np.tensordot(y, a_stack[blk], axes=(0, 0)) for blk in range(nblk)]

    norm_b = max(1.0, float(np.abs(b).max(initial=0.0)))
    norm_c = max(1.0, float(np.linalg.norm(problem.c)))

    # infeasible start: multiples of the identity scaled to the data
    a_scale = max(float(np.linalg.norm(a)) for a, _ in problem.constraints) if m else 1.0
    xi = max(10.0, np.sqrt(n), n * float(np.abs(b).max(initial=0.0)) / (1.0 + a_scale))
    eta = max(10.0, np.sqrt(n), float(np.linalg.norm(problem.c)))
    x = [xi * np.eye(k, dtype=complex) for k in dims]
    z = [eta * np.eye(k, dtype=complex) for k in dims]
    y = np.zeros(m)
    # keep the initial dual objective below the initial primal objective so
    # weak duality holds along the whole recorded trajectory
    p0 = sum((cb * xb.T).sum().real for cb, xb in zip(c_blocks, x))
    if m and p0 < 0.0:
        y = b * (p0 / float(b @ b)) if float(b @ b) > 0.0 else y

    history: list[IterateRecord] = []
    status = "max_iterations"
    it = 0

    for it in range(1, MAX_ITERATIONS + 1):
        pobj = sum((cb * xb.T).sum().real for cb, xb in zip(c_blocks, x))
        dobj = float(b @ y)
        rp = b - inner_all(x)
        ya = combo(y)
        rd = [c_blocks[blk] - ya[blk] - z[blk] for blk in range(nblk)]
        mu = sum((xb * zb.T).sum().real for xb, zb in zip(x, z)) / n

        rp_norm = float(np.abs(rp).max(initial=0.0)) / norm_b
        rd_norm = float(np.sqrt(sum(np.linalg.norm(r) ** 2 for r in rd))) / norm_c
        gap = abs(pobj - dobj) / (1.0 + abs(pobj) + abs(dobj))
        history.append(IterateRecord(it - 1, pobj, dobj, mu, rp_norm, rd_norm))

        if max(rp_norm, rd_norm, gap) <= tol:
            status = "optimal"
            break

        try:
            zinv = _chol_inverse(z)
        except np.linalg.LinAlgError as exc:  # pragma: no cover - guarded by max_step
            raise SdpFailure(f"iterate left the cone at iteration {it}") from exc

        # Schur complement M_ij = Re Tr(A_i Zinv A_j X), symmetrized
        big_m = np.zeros((m, m))
        t_stack = []
        for blk in range(nblk):
            t = np.matmul(zinv[blk], np.matmul(a_stack[blk], x[blk]))
            t_stack.append(t)
            tt = t.transpose(0, 2, 1).reshape(m, -1)
            big_m += (a_flat[blk] @ tt.T).real
        big_m = (big_m + big_m.T) / 2.0

        jitter = 0.0
        base = np.trace(big_m).real / max(m, 1)
        for attempt in range(5):
            try:
                m_chol = np.linalg.cholesky(big_m + jitter * np.eye(m))
                break
            except np.linalg.LinAlgError:
                jitter = max(1e-14 * base, 10.0 * jitter, 1e-300)
                jitter *= 10.0 ** attempt
        else:
            raise SdpFailure("Schur complement is not positive definite")

        def schur_solve(rhs):
            u = np.linalg.solve(m_chol, rhs)
            return np.linalg.solve(m_chol.conj().T, u)

        def direction(sigma_mu, corr_blocks=None):
            # target = σμ Zinv − X − Zinv Rd X − Zinv ΔZaff ΔXaff  (corrector)
            target = []
            for blk in range(nblk):
                t = sigma_mu * zinv[blk] - x[blk] - zinv[blk] @ rd[blk] @ x[blk]
                if corr_blocks is not None:
                    t = t - corr_blocks[blk]
                target.append(t)
            rhs = rp - inner_all(target)
            dy = schur_solve(rhs)
            dz = [rd[blk] - np.tensordot(dy, a_stack[blk], axes=(0, 0)) for blk in range(nblk)]
            dx = []
            for blk in range(nblk):
                raw = target[blk] + np.tensordot(dy, t_stack[blk], axes=(0, 0))
                dx.append(hermitian_part(raw))
            return dx, dy, dz

        # predictor
        dx_aff, dy_aff, dz_aff = direction(0.0)
        ap_aff = min(1.0, _max_step(x, dx_aff))
        ad_aff = min(1.0, _max_step(z, dz_aff))
        mu_aff = sum(
            ((x[blk] + ap_aff * dx_aff[blk]) * (z[blk] + ad_aff * dz_aff[blk]).T).sum().real
            for blk in range(nblk)
        ) / n
        sigma = min(1.0, max((max(mu_aff, 0.0) / mu) ** 3, 1e-10))

        # corrector, reusing the factorized Schur complement
        corr = [zinv[blk] @ dz_aff[blk] @ dx_aff[blk] for blk in range(nblk)]
        dx, dy, dz = direction(sigma * mu, corr)

        ap = min(1.0, STEP_DAMPING * _max_step(x, dx))
        ad = min(1.0, STEP_DAMPING * _max_step(z, dz))
        x = [hermitian_part(x[blk] + ap * dx[blk]) for blk in range(nblk)]
        z = [hermitian_part(z[blk] + ad * dz[blk]) for blk in range(nblk)]
        y = y + ad * dy

    pobj = sum((cb * xb.T).sum().real for cb, xb in zip(c_blocks, x))
    dobj = float(b @ y)
    return SdpSolution(
        value=pobj,
        primal=_assemble(x, n, dims),
        dual=y,
        status=status,
        iterations=it,
        gap=abs(pobj - dobj) / (1.0 + abs(pobj) + abs(dobj)),
        history=history,
    )


# ----------------------------------------------------------------------------
# Hermitian constraint bases, used by SDP builders


def hermitian_basis(k: int) -> list[np.ndarray]:
    """Orthonormal (Frobenius) basis of k×k Hermitian matrices, k² elements.

    Ordering: diagonal units first, then real and imaginary off-diagonal
    pairs in row-major order.
    """
    basis = []
    for i in range(k):
        e = np.zeros((k, k), dtype=complex)
        e[i, i] = 1.0
        basis.append(e)
    inv_rt2 = 1.0 / np.sqrt(2.0)
    for i in range(k):
        for j in range(i + 1, k):
            e = np.zeros((k, k), dtype=complex)
            e[i, j] = inv_rt2
            e[j, i] = inv_rt2
            basis.append(e)
            f = np.zeros((k, k), dtype=complex)
            f[i, j] = -1j * inv_rt2
            f[j, i] = 1j * inv_rt2
            basis.append(f)
    return basis
