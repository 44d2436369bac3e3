"""Quaternions as pairs of complex numbers and as 2x2 complex matrices.

A quaternion is written ``q = a0 + j a1`` with ``a0, a1`` in C = span{1, i}.
Left multiplication by ``q`` on H = C^2 (columns ``(phi1, phi2)`` standing for
``phi1 + j phi2``) is the matrix::

    [[a0, -conj(a1)],
     [a1,  conj(a0)]]

and right multiplication by ``i`` is multiplication of the column by the
complex scalar ``i``.  Every complex linear endomorphism of (H, I) is thus a
plain 2x2 complex matrix, and the quaternionic linear ones are exactly the
matrices of the form above.

Scalar values use the :class:`Quaternion` dataclass.  Fields are numpy arrays:
quaternion fields are stored as stacks of 2x2 matrices (shape ``(..., 2, 2)``),
sections as stacks of columns (shape ``(..., 2)``).
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import BadIndex, NotImaginary, NotQuaternionic, ZeroVector

QUATERNIONIC_TOL = 1e-10
IMAGINARY_TOL = 1e-10


@dataclass(frozen=True)
class Quaternion:
    """``a0 + j a1`` with complex ``a0`` (the C-part) and ``a1`` (the jC-part)."""

    a0: complex = 0j
    a1: complex = 0j

    def __post_init__(self):
        object.__setattr__(self, "a0", complex(self.a0))
        object.__setattr__(self, "a1", complex(self.a1))
        if not (np.isfinite(self.a0) and np.isfinite(self.a1)):
            raise ValueError("quaternion components must be finite")

    @classmethod
    def from_real(cls, w, x, y, z):
        """Build ``w + x i + y j + z k``."""
        # k = j(-i), so the jC-part of y j + z k is y - i z
        return cls(complex(w, x), complex(y, -z))

    def real_components(self):
        return (self.a0.real, self.a0.imag, self.a1.real, -self.a1.imag)

    @property
    def real(self):
        return self.a0.real

    @property
    def imag(self):
        return Quaternion(1j * self.a0.imag, self.a1)

    def is_imaginary(self, tol=IMAGINARY_TOL):
        return abs(self.a0.real) <= tol * (1.0 + abs(self))

    def norm2(self):
        return abs(self.a0) ** 2 + abs(self.a1) ** 2

    def __abs__(self):
        return float(np.sqrt(self.norm2()))

    def conj(self):
        return Quaternion(self.a0.conjugate(), -self.a1)

    def inverse(self):
        n2 = self.norm2()
        if n2 == 0.0:
            raise ZeroDivisionError("zero quaternion has no inverse")
        c = self.conj()
        return Quaternion(c.a0 / n2, c.a1 / n2)

    def __add__(self, other):
        other = as_quaternion(other)
        return Quaternion(self.a0 + other.a0, self.a1 + other.a1)

    __radd__ = __add__

    def __neg__(self):
        return Quaternion(-self.a0, -self.a1)

    def __sub__(self, other):
        return self + (-as_quaternion(other))

    def __rsub__(self, other):
        return as_quaternion(other) - self

    def __mul__(self, other):
        return quat_mul(self, as_quaternion(other))

    def __rmul__(self, other):
        return quat_mul(as_quaternion(other), self)

    def __truediv__(self, other):
        return self * as_quaternion(other).inverse()

    def to_matrix(self):
        return quat_to_matrix(self)

    def to_column(self):
        return np.array([self.a0, self.a1], dtype=complex)

    def isclose(self, other, tol=1e-12):
        d = self - as_quaternion(other)
        return abs(d) <= tol


def as_quaternion(x):
    """Coerce reals and complex numbers (embedded as C in H) to Quaternion."""
    if isinstance(x, Quaternion):
        return x
    if isinstance(x, (int, float, complex, np.number)):
        return Quaternion(complex(x), 0j)
    raise TypeError(f"cannot interpret {type(x).__name__} as a quaternion")


ONE = Quaternion(1, 0)
QI = Quaternion(1j, 0)
QJ = Quaternion(0, 1)
QK = Quaternion(0, -1j)


def quat_mul(p, q):
    """Hamilton product, ``(a0 + j a1)(b0 + j b1)``."""
    a0, a1, b0, b1 = p.a0, p.a1, q.a0, q.a1
    return Quaternion(a0 * b0 - a1.conjugate() * b1, a1 * b0 + a0.conjugate() * b1)


def quat_to_matrix(q):
    return np.array(
        [[q.a0, -q.a1.conjugate()], [q.a1, q.a0.conjugate()]], dtype=complex
    )


def is_quaternionic(m, tol=QUATERNIONIC_TOL):
    m = np.asarray(m, dtype=complex)
    scale = 1.0 + np.max(np.abs(m), axis=(-2, -1))
    dev = np.maximum(
        np.abs(m[..., 1, 1] - np.conj(m[..., 0, 0])),
        np.abs(m[..., 0, 1] + np.conj(m[..., 1, 0])),
    )
    return dev <= tol * scale


def matrix_to_quat(m, tol=QUATERNIONIC_TOL):
    m = np.asarray(m, dtype=complex)
    if m.shape != (2, 2):
        raise ValueError(f"expected a 2x2 matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise ValueError("matrix entries must be finite")
    if not is_quaternionic(m, tol):
        raise NotQuaternionic("matrix is not of the form [[a, -conj(b)], [b, conj(a)]]")
    return Quaternion(m[0, 0], m[1, 0])


def inner_r3(v, w):
    """Euclidean product on Im H, ``<v, w> = -Re(v w)``."""
    if not v.is_imaginary() or not w.is_imaginary():
        raise NotImaginary("inner_r3 is defined on imaginary quaternions only")
    return -(v * w).real


_PAULI = {
    1: np.array([[0, 1], [1, 0]], dtype=complex),
    2: np.array([[0, -1j], [1j, 0]], dtype=complex),
    3: np.array([[1, 0], [0, -1]], dtype=complex),
}
E_MINUS = np.array([[0, 0], [1, 0]], dtype=complex)
E_PLUS = np.array([[0, 1], [0, 0]], dtype=complex)


def pauli(k):
    if k not in _PAULI:
        raise BadIndex(f"Pauli index must be 1, 2 or 3, got {k!r}")
    return _PAULI[k].copy()


def column_to_quat(w):
    w = np.asarray(w, dtype=complex)
    return Quaternion(w[0], w[1])


def line_to_sphere(w):
    """Unit imaginary N with ``N w = w i``: the point of S^2 whose +i
    eigenline is spanned by the column ``w``."""
    w = np.asarray(w, dtype=complex)
    if np.sqrt(np.sum(np.abs(w) ** 2)) <= 1e-12:
        raise ZeroVector("cannot take the line spanned by a zero vector")
    q = column_to_quat(w)
    return q * QI * q.inverse()


# ---------------------------------------------------------------------------
# vectorized helpers on stacks of 2x2 matrices / columns


def qmat(a0, a1):
    """Stack of quaternion matrices from arrays of C- and jC-parts."""
    a0 = np.asarray(a0, dtype=complex)
    a1 = np.asarray(a1, dtype=complex)
    a0, a1 = np.broadcast_arrays(a0, a1)
    out = np.empty(a0.shape + (2, 2), dtype=complex)
    out[..., 0, 0] = a0
    out[..., 0, 1] = -np.conj(a1)
    out[..., 1, 0] = a1
    out[..., 1, 1] = np.conj(a0)
    return out


def scalar_mat(c, shape=()):
    """Matrix of the complex number ``c`` viewed as a quaternion (diag(c, conj c))."""
    c = np.broadcast_to(np.asarray(c, dtype=complex), shape)
    return qmat(c, np.zeros_like(c))


def col_to_mat(phi):
    """Quaternion matrix whose first column is ``phi``."""
    phi = np.asarray(phi, dtype=complex)
    return qmat(phi[..., 0], phi[..., 1])


def mat_to_col(m):
    return np.asarray(m)[..., :, 0].copy()


def times_j(phi):
    """Column of ``phi j``; the second column of the matrix of ``phi``."""
    phi = np.asarray(phi, dtype=complex)
    return np.stack([-np.conj(phi[..., 1]), np.conj(phi[..., 0])], axis=-1)


def inv2(m):
    """Inverse of a stack of 2x2 matrices via the adjugate."""
    m = np.asarray(m, dtype=complex)
    det = m[..., 0, 0] * m[..., 1, 1] - m[..., 0, 1] * m[..., 1, 0]
    out = np.empty_like(m)
    out[..., 0, 0] = m[..., 1, 1]
    out[..., 1, 1] = m[..., 0, 0]
    out[..., 0, 1] = -m[..., 0, 1]
    out[..., 1, 0] = -m[..., 1, 0]
    return out / det[..., None, None]


def det2(m):
    m = np.asarray(m)
    return m[..., 0, 0] * m[..., 1, 1] - m[..., 0, 1] * m[..., 1, 0]


def qnorm(m):
    """Quaternion norm of a stack of quaternion matrices (|q|^2 = det)."""
    m = np.asarray(m)
    return np.sqrt(0.5 * np.sum(np.abs(m) ** 2, axis=(-2, -1)))


def mnorm(m):
    """Frobenius norm over the trailing two axes."""
    return np.sqrt(np.sum(np.abs(np.asarray(m)) ** 2, axis=(-2, -1)))


def real_part(m):
    """Real part of quaternion matrices: Re a0 = Re tr / 2."""
    m = np.asarray(m)
    return 0.5 * (m[..., 0, 0] + m[..., 1, 1]).real


def imag_part(m):
    m = np.asarray(m, dtype=complex)
    r = real_part(m)
    out = m.copy()
    out[..., 0, 0] -= r
    out[..., 1, 1] -= r
    return out


def to_r3(m):
    """Imaginary quaternion matrices -> (..., 3) real coordinates (i, j, k)."""
    m = np.asarray(m)
    a0 = m[..., 0, 0]
    a1 = m[..., 1, 0]
    return np.stack([a0.imag, a1.real, -a1.imag], axis=-1)


def from_r3(v):
    v = np.asarray(v, dtype=float)
    return qmat(1j * v[..., 0], v[..., 1] - 1j * v[..., 2])


def conjugate_by(q, n):
    """``q n q^{-1}`` for stacks of quaternion matrices."""
    return q @ n @ inv2(q)
