"""Random instance generators and brute-force oracles shared by the test modules."""

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from src.lti import StateSpace, induced_linf_norm, scale
from src.oco import FirGains
from src.robust import InterconnectionP, ScaleSearchResult, build_interconnection, optimize_scales, reconstruction_estimator


def random_stable_system(rng, n_s=None, n_in=1, n_out=1, rho=None, feedthrough=True) -> StateSpace:
    n_s = int(rng.integers(1, 5)) if n_s is None else n_s
    rho = rng.uniform(0.1, 0.95) if rho is None else rho
    A = rng.standard_normal((n_s, n_s))
    current = np.max(np.abs(np.linalg.eigvals(A)))
    A *= rho / current
    B = rng.standard_normal((n_s, n_in))
    C = rng.standard_normal((n_out, n_s))
    D = rng.standard_normal((n_out, n_in)) if feedthrough else np.zeros((n_out, n_in))
    return StateSpace(A, B, C, D)


def brute_force_linf_norm(sys: StateSpace, n: int = 100_000, chunk: int = 1000) -> float:
    """Row-wise l1 norm of the first n impulse-response samples, computed chunk by chunk."""
    rows = np.abs(sys.D).sum(axis=1)
    if sys.is_static or n <= 1:
        return float(rows.max())
    powers = np.empty((chunk, sys.n_s, sys.n_s))
    powers[0] = np.eye(sys.n_s)
    for k in range(1, chunk):
        powers[k] = sys.A @ powers[k - 1]
    step = sys.A @ powers[-1]  # A^chunk

    X = np.einsum("kij,jl->kil", powers, sys.B)  # A^k B, k = 0 .. chunk-1
    remaining = n - 1
    while remaining > 0:
        take = min(chunk, remaining)
        markov = np.einsum("ij,kjl->kil", sys.C, X[:take])
        rows += np.abs(markov).sum(axis=(0, 2))
        remaining -= take
        X = np.einsum("ij,kjl->kil", step, X)
        if not np.any(X):
            break
    return float(rows.max())


def read_summary(path: Path) -> dict:
    """summary.txt as a dict of strings."""
    entries = {}
    for line in path.read_text(encoding="utf-8").splitlines():
        key, sep, value = line.partition("=")
        if sep:
            entries[key.strip()] = value.strip()
    return entries


def random_gain_trace(rng, T: int, n_u: int, n_x: int, H: int, beta=None):
    trace = []
    for _ in range(T):
        M = rng.standard_normal((n_u, n_x * H))
        if beta is not None:
            M *= beta * rng.uniform(0.2, 1.0) / np.abs(M).sum(axis=1).max()
        trace.append(FirGains(M, H))
    return trace


def lsim(sys: StateSpace, u: np.ndarray) -> np.ndarray:
    """Zero-state response to u of shape (T, n_in)."""
    u = np.asarray(u, dtype=float).reshape(len(u), sys.n_in)
    x = np.zeros(sys.n_s)
    y = np.zeros((len(u), sys.n_out))
    for t in range(len(u)):
        y[t] = sys.C @ x + sys.D @ u[t]
        x = sys.A @ x + sys.B @ u[t]
    return y


@dataclass
class CertifiedInstance:
    plant: StateSpace
    K: np.ndarray
    P: InterconnectionP
    uncertainty: StateSpace
    delta: float
    beta: float
    scales: ScaleSearchResult


def certified_instance(rng, max_tries: int = 200) -> CertifiedInstance:
    """Random plant, stabilizing K, uncertainty ||Δ|| <= δ and β with scaled norm <= 0.99."""
    for _ in range(max_tries):
        n_x, n_u = int(rng.integers(1, 3)), int(rng.integers(1, 3))
        A = rng.standard_normal((n_x, n_x))
        A *= rng.uniform(0.2, 0.9) / np.max(np.abs(np.linalg.eigvals(A)))
        B = 0.5 * rng.standard_normal((n_x, n_u))
        K = 0.1 * rng.standard_normal((n_u, n_x))
        if np.max(np.abs(np.linalg.eigvals(A - B @ K))) >= 0.95:
            continue
        plant = StateSpace(A, B, np.eye(n_x), np.zeros((n_x, n_u)))
        P = build_interconnection(plant, K, reconstruction_estimator(A, B))

        delta, beta = rng.uniform(0.05, 0.5), rng.uniform(0.05, 0.5)
        for _ in range(30):
            scales = optimize_scales(P, delta, beta)
            if scales.scaled_norm <= 0.99:
                break
            delta, beta = 0.5 * delta, 0.5 * beta
        else:
            continue

        raw = random_stable_system(rng, n_in=n_u, n_out=n_u, rho=rng.uniform(0.1, 0.8))
        uncertainty = scale(raw, delta * rng.uniform(0.5, 1.0) / induced_linf_norm(raw).value)
        return CertifiedInstance(plant, K, P, uncertainty, delta, beta, scales)
    raise RuntimeError("no certified instance found")
