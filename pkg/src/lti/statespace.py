from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence, Tuple, Union

import numpy as np
from scipy import signal

from .errors import DimensionError, ImproperTransferFunctionError, NonFiniteError

ArrayLike = Union[float, Sequence[float], Sequence[Sequence[float]], np.ndarray]


def _frozen(arr: np.ndarray) -> np.ndarray:
    arr = np.array(arr, dtype=float, copy=True)
    arr.setflags(write=False)
    return arr


def _as_matrix(value: ArrayLike, rows: int, cols: int, name: str) -> np.ndarray:
    arr = np.asarray(value, dtype=float)
    if arr.size == 0:
        if rows * cols != 0:
            raise DimensionError(f"{name} is empty but expected shape ({rows}, {cols}).")
        return np.zeros((rows, cols))
    arr = np.atleast_2d(arr)
    if arr.shape != (rows, cols):
        raise DimensionError(f"{name} has shape {arr.shape}, expected ({rows}, {cols}).")
    return arr


# ────────────────────────────── StateSpace ──────────────────────────────
@dataclass(frozen=True, eq=False)
class StateSpace:
    """Discrete-time LTI realization x+ = A x + B u, y = C x + D u.

    Matrices are stored as read-only float arrays. A static gain has an empty
    (0 x 0) A matrix. Dimensions are inferred from the matrices; B and C decide
    the input/output counts when they are non-empty, D otherwise.
    """

    A: np.ndarray
    B: np.ndarray
    C: np.ndarray
    D: np.ndarray
    n_s: int = field(init=False)
    n_in: int = field(init=False)
    n_out: int = field(init=False)

    def __post_init__(self):
        a = np.asarray(self.A, dtype=float)
        n_s = 0 if a.size == 0 else np.atleast_2d(a).shape[0]
        b = np.asarray(self.B, dtype=float)
        c = np.asarray(self.C, dtype=float)
        d = np.atleast_2d(np.asarray(self.D, dtype=float))

        n_in = np.atleast_2d(b).shape[1] if b.size else d.shape[1]
        n_out = np.atleast_2d(c).shape[0] if c.size else d.shape[0]

        matrices = {
            "A": _as_matrix(a, n_s, n_s, "A"),
            "B": _as_matrix(b, n_s, n_in, "B"),
            "C": _as_matrix(c, n_out, n_s, "C"),
            "D": _as_matrix(d, n_out, n_in, "D"),
        }
        for name, mat in matrices.items():
            if not np.all(np.isfinite(mat)):
                raise NonFiniteError(f"{name} contains non-finite entries.")
            object.__setattr__(self, name, _frozen(mat))

        object.__setattr__(self, "n_s", n_s)
        object.__setattr__(self, "n_in", n_in)
        object.__setattr__(self, "n_out", n_out)

    @classmethod
    def static(cls, gain: ArrayLike) -> "StateSpace":
        d = np.atleast_2d(np.asarray(gain, dtype=float))
        return cls(np.zeros((0, 0)), np.zeros((0, d.shape[1])), np.zeros((d.shape[0], 0)), d)

    @property
    def is_static(self) -> bool:
        return self.n_s == 0

    def zero_state(self) -> "SystemState":
        return SystemState(np.zeros(self.n_s))

    def subsystem(self, rows: Union[slice, Sequence[int]], cols: Union[slice, Sequence[int]]) -> "StateSpace":
        """Select output rows and input columns, keeping the full state."""
        return StateSpace(self.A, self.B[:, cols], self.C[rows, :], self.D[rows, :][:, cols])

    def scaled_io(self, left: np.ndarray, right: np.ndarray) -> "StateSpace":
        """Return left @ G @ right for constant input/output matrices."""
        left = np.atleast_2d(left)
        right = np.atleast_2d(right)
        return StateSpace(self.A, self.B @ right, left @ self.C, left @ self.D @ right)

    def __repr__(self) -> str:
        return f"StateSpace(n_s={self.n_s}, n_in={self.n_in}, n_out={self.n_out})"


@dataclass(frozen=True)
class TransferFunctionSiso:
    """SISO rational function, coefficients in descending powers of z."""

    num: Tuple[float, ...]
    den: Tuple[float, ...]

    def __post_init__(self):
        num = np.trim_zeros(np.atleast_1d(np.asarray(self.num, dtype=float)), "f")
        den = np.atleast_1d(np.asarray(self.den, dtype=float))
        if den.size == 0 or den[0] == 0.0:
            raise ImproperTransferFunctionError("Leading denominator coefficient must be nonzero.")
        if num.size == 0:
            num = np.zeros(1)
        if num.size > den.size:
            raise ImproperTransferFunctionError(
                f"Transfer function is not proper: deg(num)={num.size - 1} > deg(den)={den.size - 1}."
            )
        object.__setattr__(self, "num", tuple(float(v) for v in num))
        object.__setattr__(self, "den", tuple(float(v) for v in den))

    @property
    def order(self) -> int:
        return len(self.den) - 1

    def evaluate(self, z: complex) -> complex:
        return complex(np.polyval(self.num, z) / np.polyval(self.den, z))


@dataclass
class SystemState:
    x: np.ndarray

    def __post_init__(self):
        self.x = np.atleast_1d(np.asarray(self.x, dtype=float))


# ────────────────────────────── Operations ──────────────────────────────
def tf_to_ss(tf: TransferFunctionSiso) -> StateSpace:
    """Controllable canonical realization of a proper SISO transfer function."""
    if len(tf.num) > len(tf.den):
        raise ImproperTransferFunctionError("Transfer function is not proper.")
    if tf.order == 0:
        return StateSpace.static([[tf.num[-1] / tf.den[0]]])
    A, B, C, D = signal.tf2ss(tf.num, tf.den)
    return StateSpace(A, B, C, D)


def ss_step(sys: StateSpace, state: SystemState, u: ArrayLike) -> Tuple[SystemState, np.ndarray]:
    x = np.asarray(state.x, dtype=float).reshape(-1)
    u = np.atleast_1d(np.asarray(u, dtype=float)).reshape(-1)
    if x.shape[0] != sys.n_s:
        raise DimensionError(f"State has length {x.shape[0]}, system has {sys.n_s} states.")
    if u.shape[0] != sys.n_in:
        raise DimensionError(f"Input has length {u.shape[0]}, system has {sys.n_in} inputs.")
    y = sys.C @ x + sys.D @ u
    return SystemState(sys.A @ x + sys.B @ u), y


def ss_sub(sys: StateSpace, delta_gain: float) -> StateSpace:
    """G - delta_gain * I, e.g. the uncertainty F - 1 of unmodeled actuator dynamics F."""
    if sys.n_in != sys.n_out:
        raise DimensionError(f"ss_sub needs a square system, got {sys.n_out}x{sys.n_in}.")
    return StateSpace(sys.A, sys.B, sys.C, sys.D - delta_gain * np.eye(sys.n_in))


def spectral_radius(sys: Union[StateSpace, np.ndarray]) -> float:
    A = sys.A if isinstance(sys, StateSpace) else np.atleast_2d(np.asarray(sys, dtype=float))
    if A.size == 0:
        return 0.0
    return float(np.max(np.abs(np.linalg.eigvals(A))))


def impulse_response(sys: StateSpace, n: int) -> np.ndarray:
    """First n Markov parameters, shape (n, n_out, n_in): D, CB, CAB, ..."""
    h = np.zeros((n, sys.n_out, sys.n_in))
    if n == 0:
        return h
    h[0] = sys.D
    X = sys.B.copy()
    for k in range(1, n):
        h[k] = sys.C @ X
        X = sys.A @ X
    return h


def series(first: StateSpace, second: StateSpace) -> StateSpace:
    """second ∘ first: the output of `first` drives `second`."""
    if first.n_out != second.n_in:
        raise DimensionError(f"Cannot connect {first.n_out} outputs into {second.n_in} inputs.")
    A = np.block(
        [
            [first.A, np.zeros((first.n_s, second.n_s))],
            [second.B @ first.C, second.A],
        ]
    )
    B = np.vstack([first.B, second.B @ first.D])
    C = np.hstack([second.D @ first.C, second.C])
    D = second.D @ first.D
    return StateSpace(A, B, C, D)


def scale(sys: StateSpace, c: float) -> StateSpace:
    return StateSpace(sys.A, sys.B, c * sys.C, c * sys.D)

