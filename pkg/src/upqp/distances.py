"""State and channel distance measures.

States get trace distance, (square-root) fidelity and the Fuchs–van de Graaf
sandwich.  Channels get the half diamond distance, computed either by a
semidefinite program over the Choi matrix of the difference or, for a pair of
unitary channels, by a closed form: the distance from the origin to the convex
hull of the eigenvalues of U†W fixes the optimal discrimination bias.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import linalg, sdp
from .linalg import as_matrix, hermitian_part, partial_trace
from .quantum import Channel, choi_matrix

STATE_TOL = 1e-8


@dataclass(frozen=True)
class DistanceReport:
    value: float
    method: str  # sdp | closed_form | sampled_lower_bound
    tol: float
    converged: bool = True
    iterations: int = 0


def _check_state(rho, name: str) -> np.ndarray:
    rho = as_matrix(rho, name)
    if rho.shape[0] != rho.shape[1]:
        raise ValueError(f"{name} must be square")
    if not linalg.is_hermitian(rho, STATE_TOL):
        raise ValueError(f"{name} is not Hermitian")
    w = np.linalg.eigvalsh(hermitian_part(rho))
    if w[0] < -STATE_TOL or abs(w.sum() - 1.0) > STATE_TOL:
        raise ValueError(f"{name} is not a density matrix (PSD, trace one)")
    return hermitian_part(rho)


def trace_distance(rho, sigma) -> float:
    """(1/2)‖ρ − σ‖₁ for density matrices."""
    rho = _check_state(rho, "rho")
    sigma = _check_state(sigma, "sigma")
    if rho.shape != sigma.shape:
        raise ValueError("states must share dimensions")
    w = np.linalg.eigvalsh(rho - sigma)
    return float(0.5 * np.sum(np.abs(w)))


def fidelity(rho, sigma) -> float:
    """Uhlmann fidelity F(ρ,σ) = ‖√ρ √σ‖₁ (square-root convention).

    For pure σ = |γ⟩⟨γ| this reduces to √⟨γ|ρ|γ⟩.
    """
    rho = _check_state(rho, "rho")
    sigma = _check_state(sigma, "sigma")
    if rho.shape != sigma.shape:
        raise ValueError("states must share dimensions")
    w, v = np.linalg.eigh(rho)
    sq = (v * np.sqrt(np.clip(w, 0.0, None))) @ v.conj().T
    inner = hermitian_part(sq @ sigma @ sq)
    ev = np.clip(np.linalg.eigvalsh(inner), 0.0, None)
    return float(np.sum(np.sqrt(ev)))


def fvdg_check(rho, sigma) -> tuple[float, float, float, bool]:
    """Fuchs–van de Graaf sandwich (1−F, trace distance, √(1−F²), holds)."""
    f = fidelity(rho, sigma)
    dist = trace_distance(rho, sigma)
    lower = 1.0 - f
    upper = float(np.sqrt(max(1.0 - f * f, 0.0)))
    holds = lower <= dist + 1e-9 and dist <= upper + 1e-9
    return lower, dist, upper, holds


def _hull_distance_to_origin(points: np.ndarray) -> float:
    """Distance from 0 to the convex hull of complex points.

    Uses the support-function duality dist = max_{|u|=1} min_k ⟨u, p_k⟩; the
    maximizer is normal to a hull edge or points at a vertex, so scanning
    those directions is exact.
    """
    pts = np.asarray(points, dtype=complex).reshape(-1)
    candidates = []
    for p in pts:
        if abs(p) > 1e-15:
            candidates.append(p / abs(p))
    for i in range(pts.size):
        for j in range(i + 1, pts.size):
            e = pts[j] - pts[i]
            if abs(e) > 1e-15:
                nrm = 1j * e / abs(e)
                candidates.append(nrm)
                candidates.append(-nrm)
    if not candidates:
        return 0.0
    best = max((np.conj(u) * pts).real.min() for u in candidates)
    return max(best, 0.0)


def unitary_diamond_distance(u, w) -> float:
    """Half diamond distance between unitary channels: √(1 − ν²) with ν the
    distance from the origin to the hull of the eigenvalues of U†W."""
    u = as_matrix(u, "u")
    w = as_matrix(w, "w")
    if not (linalg.is_unitary(u) and linalg.is_unitary(w)):
        raise ValueError("both inputs must be unitary")
    lam = np.linalg.eigvals(u.conj().T @ w)
    nu = _hull_distance_to_origin(lam)
    return float(np.sqrt(max(1.0 - nu * nu, 0.0)))


def diamond_sdp_problem(c1: Channel, c2: Channel) -> tuple[sdp.SdpProblem, int]:
    """Standard half-diamond-norm SDP for the difference of two channels.

    maximize ⟨J, W⟩ over 0 ⪯ W ⪯ Id_out ⊗ σ, σ a state, phrased in standard
    primal form with blocks (W, slack, σ).  The optimum equals
    (1/2)‖c1 − c2‖⋄ with the sign flipped (solver minimizes).
    """
    jdiff = choi_matrix(c1) - choi_matrix(c2)
    d_out, d_in = c1.d_out, c1.d_in
    big = d_out * d_in
    n = 2 * big + d_in

    c = np.zeros((n, n), dtype=complex)
    c[:big, :big] = -jdiff

    cons = []
    for h in sdp.hermitian_basis(big):
        a = np.zeros((n, n), dtype=complex)
        a[:big, :big] = h
        a[big : 2 * big, big : 2 * big] = h
        a[2 * big :, 2 * big :] = -partial_trace(h, (d_out, d_in), "B")
        cons.append((a, 0.0))
    tr = np.zeros((n, n), dtype=complex)
    tr[2 * big :, 2 * big :] = np.eye(d_in)
    cons.append((tr, 1.0))
    return sdp.SdpProblem(c, tuple(cons), block_dims=(big, big, d_in)), big


def diamond_distance(c1: Channel, c2: Channel, tol: float = 1e-7) -> DistanceReport:
    """(1/2)‖c1 − c2‖⋄ via the Choi-matrix SDP."""
    if (c1.d_in, c1.d_out) != (c2.d_in, c2.d_out):
        raise ValueError("channels must share input and output dimensions")
    problem, _ = diamond_sdp_problem(c1, c2)
    sol = sdp.solve(problem, tol)
    return DistanceReport(
        value=float(-sol.value),
        method="sdp",
        tol=tol,
        converged=sol.optimal,
        iterations=sol.iterations,
    )


def distinguish_probability(c1: Channel, c2: Channel, tol: float = 1e-7) -> float:
    """Optimal single-shot discrimination probability 1/2 + (1/4)‖c1 − c2‖⋄."""
    report = diamond_distance(c1, c2, tol)
    return 0.5 + 0.5 * report.value
