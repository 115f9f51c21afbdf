"""Scalar and matrix substrate shared by every engine.

Two backends live behind one :class:`Matrix` type:

* exact: entries in Q(i), stored as a pair of flint rational matrices
  (real part, imaginary part).  Ranks are taken on the 2n x 2m real
  realification, which is exact and fast.
* float: complex128 numpy arrays with a tolerance ``tol``; ranks use
  scaled partial pivoting with pivot threshold ``tol * max|entry|``.
"""
from __future__ import annotations

import cmath
import math
import re
from dataclasses import dataclass
from fractions import Fraction
from math import gcd
from typing import NamedTuple, Sequence, Union

import numpy as np
from flint import fmpq, fmpq_mat

from .config import DEFAULT
from .errors import (
    InputError,
    IrrationalRotationError,
    NotInvertibleError,
    NotQuasiUnitaryError,
    NotUnipotentError,
)

RotationNumber = Union[Fraction, float]
INFINITE_WITHIN_CAP = "infinite-within-cap"


# ---------------------------------------------------------------- scalars

def _to_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, fmpq):
        return Fraction(int(x.p), int(x.q))
    if isinstance(x, (int, np.integer)):
        return Fraction(int(x))
    if isinstance(x, str):
        return Fraction(x.strip())
    if isinstance(x, (float, np.floating)):
        return Fraction(str(float(x)))
    raise TypeError(f"cannot convert {x!r} to a rational")


def _to_fmpq(x: Fraction) -> fmpq:
    return fmpq(x.numerator, x.denominator)


@dataclass(frozen=True)
class GaussianRational:
    """Element re + im*i of Q(i)."""

    re: Fraction
    im: Fraction = Fraction(0)

    def __post_init__(self):
        object.__setattr__(self, "re", _to_fraction(self.re))
        object.__setattr__(self, "im", _to_fraction(self.im))

    @classmethod
    def coerce(cls, x) -> "GaussianRational":
        if isinstance(x, GaussianRational):
            return x
        if isinstance(x, (complex, np.complexfloating)):
            return cls(_to_fraction(x.real), _to_fraction(x.imag))
        if isinstance(x, str):
            return parse_scalar(x)
        return cls(_to_fraction(x))

    def __add__(self, o):
        o = GaussianRational.coerce(o)
        return GaussianRational(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __neg__(self):
        return GaussianRational(-self.re, -self.im)

    def __sub__(self, o):
        return self + (-GaussianRational.coerce(o))

    def __rsub__(self, o):
        return GaussianRational.coerce(o) - self

    def __mul__(self, o):
        o = GaussianRational.coerce(o)
        return GaussianRational(self.re * o.re - self.im * o.im, self.re * o.im + self.im * o.re)

    __rmul__ = __mul__

    def norm2(self) -> Fraction:
        return self.re * self.re + self.im * self.im

    def conjugate(self):
        return GaussianRational(self.re, -self.im)

    def __truediv__(self, o):
        o = GaussianRational.coerce(o)
        n = o.norm2()
        if n == 0:
            raise ZeroDivisionError("division by zero in Q(i)")
        p = self * o.conjugate()
        return GaussianRational(p.re / n, p.im / n)

    def __rtruediv__(self, o):
        return GaussianRational.coerce(o) / self

    def __eq__(self, o):
        try:
            o = GaussianRational.coerce(o)
        except TypeError:
            return NotImplemented
        return self.re == o.re and self.im == o.im

    def __hash__(self):
        return hash((self.re, self.im))

    def __bool__(self):
        return bool(self.re) or bool(self.im)

    def __complex__(self):
        return complex(float(self.re), float(self.im))

    def __str__(self):
        if self.im == 0:
            return str(self.re)
        sign = "-" if self.im < 0 else "+"
        return f"{self.re}{sign}{abs(self.im)} i"

    __repr__ = __str__


_SCALAR_RE = re.compile(
    r"""^\s*(?P<re>[+-]?\s*(?:\d+(?:\.\d*)?|\.\d+)(?:[eE][+-]?\d+)?(?:/\d+)?)?
        \s*(?:(?P<sign>[+-])\s*(?P<im>(?:\d+(?:\.\d*)?|\.\d+)(?:[eE][+-]?\d+)?(?:/\d+)?)?\s*\*?\s*i)?\s*$""",
    re.VERBOSE,
)


def parse_scalar(text) -> GaussianRational:
    """Parse "p/q", "p/q+r/s i", "1.5-2i", "i", "-i", or a JSON number, exactly."""
    if isinstance(text, GaussianRational):
        return text
    if isinstance(text, bool):
        raise InputError(f"not a scalar: {text!r}")
    if isinstance(text, (int, float, Fraction)):
        return GaussianRational(_to_fraction(text))
    if isinstance(text, (list, tuple)) and len(text) == 2:
        return GaussianRational(parse_scalar(text[0]).re, parse_scalar(text[1]).re)
    if not isinstance(text, str):
        raise InputError(f"not a scalar: {text!r}")
    s = text.strip()
    if s in ("i", "+i"):
        return GaussianRational(0, 1)
    if s == "-i":
        return GaussianRational(0, -1)
    m = _SCALAR_RE.match(s)
    if not m or (m.group("re") is None and m.group("sign") is None):
        # pure imaginary like "3i" or "1/2 i"
        m2 = re.match(r"^\s*([+-]?[\d./eE]+)\s*\*?\s*i\s*$", s)
        if m2:
            try:
                return GaussianRational(0, Fraction(m2.group(1)))
            except (ValueError, ZeroDivisionError):
                pass
        raise InputError(f"cannot parse scalar {text!r}")
    try:
        real = Fraction(m.group("re").replace(" ", "")) if m.group("re") else Fraction(0)
        if m.group("sign"):
            mag = Fraction(m.group("im")) if m.group("im") else Fraction(1)
            imag = mag if m.group("sign") == "+" else -mag
        else:
            imag = Fraction(0)
    except (ValueError, ZeroDivisionError) as exc:
        raise InputError(f"cannot parse scalar {text!r}") from exc
    return GaussianRational(real, imag)


def format_float(x: float) -> str:
    """Shortest text that parses back to the same double."""
    return repr(float(x))


def format_scalar(x) -> str:
    """Lossless text form: "p/q", "p/q+r/s i" for exact; shortest round-trip digits for floats."""
    if isinstance(x, GaussianRational):
        return str(x)
    z = complex(x)
    if z.imag == 0:
        return format_float(z.real)
    sign = "-" if z.imag < 0 or (z.imag == 0 and math.copysign(1, z.imag) < 0) else "+"
    return f"{format_float(z.real)}{sign}{format_float(abs(z.imag))} i"


# ---------------------------------------------------------------- exact helpers

def _qmat(rows: int, cols: int, entries=None) -> fmpq_mat:
    if entries is None:
        return fmpq_mat(rows, cols)
    return fmpq_mat(rows, cols, list(entries))


def _q_blocks(blocks: Sequence[Sequence[fmpq_mat]]) -> fmpq_mat:
    """Assemble a block matrix from a grid of fmpq_mat."""
    row_heights = [b[0].nrows() for b in blocks]
    col_widths = [b.ncols() for b in blocks[0]]
    out = []
    for bi, brow in enumerate(blocks):
        flats = [b.entries() for b in brow]
        for i in range(row_heights[bi]):
            for bj, b in enumerate(brow):
                w = col_widths[bj]
                out.extend(flats[bj][i * w:(i + 1) * w])
    return _qmat(sum(row_heights), sum(col_widths), out)


def _q_kron(x: fmpq_mat, y: fmpq_mat) -> fmpq_mat:
    r1, c1, r2, c2 = x.nrows(), x.ncols(), y.nrows(), y.ncols()
    xe, ye = x.entries(), y.entries()
    out = [0] * (r1 * r2 * c1 * c2)
    width = c1 * c2
    for i1 in range(r1):
        for j1 in range(c1):
            a = xe[i1 * c1 + j1]
            if a == 0:
                continue
            for i2 in range(r2):
                base = (i1 * r2 + i2) * width + j1 * c2
                row = ye[i2 * c2:(i2 + 1) * c2]
                for j2 in range(c2):
                    b = row[j2]
                    if b != 0:
                        out[base + j2] = a * b
    return _qmat(r1 * r2, c1 * c2, out)


def _q_is_zero(x: fmpq_mat) -> bool:
    return x == fmpq_mat(x.nrows(), x.ncols())


def _realify(re_: fmpq_mat, im_: fmpq_mat) -> fmpq_mat:
    return _q_blocks([[re_, -im_], [im_, re_]])


# ---------------------------------------------------------------- float helpers

def _float_rref(a: np.ndarray, tol: float):
    """Reduced row echelon form by scaled partial pivoting.

    Pivots whose magnitude is at most ``tol * max|a|`` count as zero.
    Returns (rref, pivot_columns).
    """
    a = np.array(a, dtype=complex, copy=True)
    rows, cols = a.shape
    if a.size == 0:
        return a, []
    scale = np.abs(a).max()
    if scale == 0:
        return a, []
    thresh = tol * scale
    row_scale = np.abs(a).max(axis=1)
    row_scale[row_scale == 0] = 1.0
    pivots = []
    r = 0
    for c in range(cols):
        if r >= rows:
            break
        col = np.abs(a[r:, c])
        if col.max() <= thresh:
            a[r:, c] = 0
            continue
        cand = col / row_scale[r:]
        cand[col <= thresh] = -1.0
        p = r + int(np.argmax(cand))
        if p != r:
            a[[r, p]] = a[[p, r]]
            row_scale[[r, p]] = row_scale[[p, r]]
        a[r] = a[r] / a[r, c]
        others = np.arange(rows) != r
        factors = a[others, c].copy()
        a[others] -= np.outer(factors, a[r])
        a[others, c] = 0
        pivots.append(c)
        r += 1
    a[r:] = 0
    return a, pivots


# ---------------------------------------------------------------- Matrix

class Matrix:
    """Immutable complex matrix over one of the two backends."""

    __slots__ = ("_re", "_im", "_a", "tol")

    def __init__(self, *, re_=None, im_=None, array=None, tol=DEFAULT.tol):
        self._re, self._im, self._a = re_, im_, None
        if array is not None:
            a = np.array(array, dtype=complex)
            if a.ndim != 2:
                raise ValueError("matrix data must be two-dimensional")
            a.setflags(write=False)
            self._a = a
        elif re_ is None:
            raise ValueError("no matrix data")
        elif im_ is None:
            self._im = _qmat(re_.nrows(), re_.ncols())
        self.tol = tol

    # construction ---------------------------------------------------------
    @classmethod
    def from_rows(cls, rows, exact: bool = True, tol: float = DEFAULT.tol) -> "Matrix":
        rows = [list(r) for r in rows]
        nr = len(rows)
        nc = len(rows[0]) if nr else 0
        if any(len(r) != nc for r in rows):
            raise InputError("ragged matrix rows")
        if exact:
            vals = [parse_scalar(x) if not isinstance(x, (complex, np.complexfloating)) else GaussianRational.coerce(x)
                    for r in rows for x in r]
            re_ = _qmat(nr, nc, [_to_fmpq(v.re) for v in vals])
            im_ = _qmat(nr, nc, [_to_fmpq(v.im) for v in vals])
            return cls(re_=re_, im_=im_, tol=tol)
        data = np.zeros((nr, nc), dtype=complex)
        for i, r in enumerate(rows):
            for j, x in enumerate(r):
                data[i, j] = x if isinstance(x, (int, float, complex, np.number)) else complex(parse_scalar(x))
        return cls(array=data, tol=tol)

    @classmethod
    def identity(cls, n: int, exact: bool = True, tol: float = DEFAULT.tol) -> "Matrix":
        if exact:
            re_ = _qmat(n, n)
            for i in range(n):
                re_[i, i] = 1
            return cls(re_=re_, tol=tol)
        return cls(array=np.eye(n, dtype=complex), tol=tol)

    @classmethod
    def zeros(cls, rows: int, cols: int, exact: bool = True, tol: float = DEFAULT.tol) -> "Matrix":
        if exact:
            return cls(re_=_qmat(rows, cols), tol=tol)
        return cls(array=np.zeros((rows, cols), dtype=complex), tol=tol)

    @classmethod
    def diag(cls, values, exact: bool = True, tol: float = DEFAULT.tol) -> "Matrix":
        values = list(values)
        n = len(values)
        zero = 0
        return cls.from_rows([[values[i] if i == j else zero for j in range(n)] for i in range(n)], exact, tol)

    def like_identity(self, n=None) -> "Matrix":
        return Matrix.identity(self.rows if n is None else n, self.exact, self.tol)

    def like_zeros(self, rows, cols) -> "Matrix":
        return Matrix.zeros(rows, cols, self.exact, self.tol)

    # basic properties ---------------------------------------------------------
    @property
    def exact(self) -> bool:
        return self._a is None

    @property
    def shape(self):
        if self.exact:
            return (self._re.nrows(), self._re.ncols())
        return self._a.shape

    @property
    def rows(self) -> int:
        return self.shape[0]

    @property
    def cols(self) -> int:
        return self.shape[1]

    def __getitem__(self, ij):
        i, j = ij
        if self.exact:
            return GaussianRational(_to_fraction(self._re[i, j]), _to_fraction(self._im[i, j]))
        return complex(self._a[i, j])

    def entries(self):
        """Row-major nested list of scalars."""
        r, c = self.shape
        if self.exact:
            re_e, im_e = self._re.entries(), self._im.entries()
            return [[GaussianRational(_to_fraction(re_e[i * c + j]), _to_fraction(im_e[i * c + j]))
                     for j in range(c)] for i in range(r)]
        return [[complex(self._a[i, j]) for j in range(c)] for i in range(r)]

    def to_numpy(self) -> np.ndarray:
        if not self.exact:
            return self._a
        r, c = self.shape
        re_e = np.array([float(Fraction(int(x.p), int(x.q))) for x in self._re.entries()], dtype=float)
        im_e = np.array([float(Fraction(int(x.p), int(x.q))) for x in self._im.entries()], dtype=float)
        return (re_e + 1j * im_e).reshape(r, c)

    def to_float(self) -> "Matrix":
        return self if not self.exact else Matrix(array=self.to_numpy(), tol=self.tol)

    def is_real(self) -> bool:
        if self.exact:
            return _q_is_zero(self._im)
        return bool(np.all(np.abs(self._a.imag) <= self.tol))

    # arithmetic ---------------------------------------------------------
    def _check(self, other):
        if not isinstance(other, Matrix):
            raise TypeError("expected Matrix")
        if other.exact != self.exact:
            raise TypeError("cannot mix exact and float matrices")

    def __add__(self, other):
        self._check(other)
        if self.shape != other.shape:
            raise ValueError("shape mismatch")
        if self.exact:
            return Matrix(re_=self._re + other._re, im_=self._im + other._im, tol=self.tol)
        return Matrix(array=self._a + other._a, tol=self.tol)

    def __neg__(self):
        if self.exact:
            return Matrix(re_=-self._re, im_=-self._im, tol=self.tol)
        return Matrix(array=-self._a, tol=self.tol)

    def __sub__(self, other):
        return self + (-other)

    def __matmul__(self, other):
        self._check(other)
        if self.cols != other.rows:
            raise ValueError(f"shape mismatch {self.shape} @ {other.shape}")
        if self.exact:
            a, b, c, d = self._re, self._im, other._re, other._im
            if _q_is_zero(b) and _q_is_zero(d):
                return Matrix(re_=a * c, tol=self.tol)
            return Matrix(re_=a * c - b * d, im_=a * d + b * c, tol=self.tol)
        return Matrix(array=self._a @ other._a, tol=self.tol)

    def scale(self, s) -> "Matrix":
        if self.exact:
            s = GaussianRational.coerce(s)
            sr, si = _to_fmpq(s.re), _to_fmpq(s.im)
            return Matrix(re_=self._re * sr - self._im * si, im_=self._re * si + self._im * sr, tol=self.tol)
        return Matrix(array=self._a * complex(s), tol=self.tol)

    def __mul__(self, s):
        if isinstance(s, Matrix):
            raise TypeError("use @ for matrix products")
        return self.scale(s)

    __rmul__ = __mul__

    @property
    def T(self) -> "Matrix":
        if self.exact:
            return Matrix(re_=self._re.transpose(), im_=self._im.transpose(), tol=self.tol)
        return Matrix(array=self._a.T, tol=self.tol)

    def conj_transpose(self) -> "Matrix":
        if self.exact:
            return Matrix(re_=self._re.transpose(), im_=-self._im.transpose(), tol=self.tol)
        return Matrix(array=self._a.conj().T, tol=self.tol)

    def kron(self, other: "Matrix") -> "Matrix":
        self._check(other)
        if self.exact:
            a, b, c, d = self._re, self._im, other._re, other._im
            b0, d0 = _q_is_zero(b), _q_is_zero(d)
            re_ = _q_kron(a, c)
            if not (b0 or d0):
                re_ = re_ - _q_kron(b, d)
            im_parts = []
            if not d0:
                im_parts.append(_q_kron(a, d))
            if not b0:
                im_parts.append(_q_kron(b, c))
            im_ = None
            for p in im_parts:
                im_ = p if im_ is None else im_ + p
            return Matrix(re_=re_, im_=im_, tol=self.tol)
        return Matrix(array=np.kron(self._a, other._a), tol=self.tol)

    def __pow__(self, k: int) -> "Matrix":
        if self.rows != self.cols:
            raise ValueError("power of a non-square matrix")
        if k < 0:
            return self.inverse() ** (-k)
        result = self.like_identity()
        base = self
        while k:
            if k & 1:
                result = result @ base
            base = base @ base
            k >>= 1
        return result

    def inverse(self) -> "Matrix":
        n = self.rows
        if n != self.cols:
            raise NotInvertibleError("non-square matrix")
        if self.exact:
            try:
                if _q_is_zero(self._im):
                    return Matrix(re_=self._re.inv(), tol=self.tol)
                big = _realify(self._re, self._im).inv()
            except ZeroDivisionError as exc:
                raise NotInvertibleError("matrix is singular") from exc
            e = big.entries()
            w = 2 * n
            re_ = _qmat(n, n, [e[i * w + j] for i in range(n) for j in range(n)])
            im_ = _qmat(n, n, [e[(n + i) * w + j] for i in range(n) for j in range(n)])
            return Matrix(re_=re_, im_=im_, tol=self.tol)
        if rank(self) < n:
            raise NotInvertibleError("matrix is singular")
        return Matrix(array=np.linalg.inv(self._a), tol=self.tol)

    def columns(self, idx) -> "Matrix":
        idx = list(idx)
        if self.exact:
            r, c = self.shape
            re_e, im_e = self._re.entries(), self._im.entries()
            return Matrix(re_=_qmat(r, len(idx), [re_e[i * c + j] for i in range(r) for j in idx]),
                          im_=_qmat(r, len(idx), [im_e[i * c + j] for i in range(r) for j in idx]), tol=self.tol)
        return Matrix(array=self._a[:, idx], tol=self.tol)

    def row_slice(self, idx) -> "Matrix":
        return self.T.columns(idx).T

    def column_list(self):
        return [self.columns([j]) for j in range(self.cols)]

    # comparisons ---------------------------------------------------------
    def max_abs(self) -> float:
        if self.exact:
            a = self.to_numpy()
        else:
            a = self._a
        return float(np.abs(a).max()) if a.size else 0.0

    def is_zero(self) -> bool:
        if self.exact:
            return _q_is_zero(self._re) and _q_is_zero(self._im)
        return self.max_abs() <= self.tol

    def equals(self, other: "Matrix") -> bool:
        if self.shape != other.shape:
            return False
        if self.exact and other.exact:
            return self._re == other._re and self._im == other._im
        return float(np.abs(self.to_numpy() - other.to_numpy()).max(initial=0.0)) <= self.tol

    def __eq__(self, other):
        if not isinstance(other, Matrix):
            return NotImplemented
        return self.equals(other)

    __hash__ = None

    def trace(self):
        if self.exact:
            t = GaussianRational(0)
            for i in range(min(self.shape)):
                t = t + self[i, i]
            return t
        return complex(np.trace(self._a))

    def __repr__(self):
        kind = "exact" if self.exact else "float"
        return f"Matrix<{kind} {self.rows}x{self.cols}>({self.entries()})"


def _common(mats: Sequence[Matrix]) -> list:
    """Mixed exact/float inputs are promoted to float."""
    mats = list(mats)
    if len({m.exact for m in mats}) > 1:
        mats = [m.to_float() for m in mats]
    return mats


def hstack(mats: Sequence[Matrix]) -> Matrix:
    mats = _common(mats)
    if len(mats) == 1:
        return mats[0]
    if mats[0].exact:
        return Matrix(re_=_q_blocks([[m._re for m in mats]]), im_=_q_blocks([[m._im for m in mats]]), tol=mats[0].tol)
    return Matrix(array=np.hstack([m._a for m in mats]), tol=mats[0].tol)


def vstack(mats: Sequence[Matrix]) -> Matrix:
    mats = _common(mats)
    if len(mats) == 1:
        return mats[0]
    if mats[0].exact:
        return Matrix(re_=_q_blocks([[m._re] for m in mats]), im_=_q_blocks([[m._im] for m in mats]), tol=mats[0].tol)
    return Matrix(array=np.vstack([m._a for m in mats]), tol=mats[0].tol)


def block_diag(mats: Sequence[Matrix]) -> Matrix:
    mats = list(mats)
    rows = []
    for i, m in enumerate(mats):
        row = [m if i == j else m.like_zeros(m.rows, mats[j].cols) for j in range(len(mats))]
        rows.append(hstack(row))
    return vstack(rows)


# ---------------------------------------------------------------- rank & kernels

def rank(m: Matrix) -> int:
    """Row-echelon rank. Float pivots at or below tol*max|entry| count as zero."""
    if m.rows == 0 or m.cols == 0:
        return 0
    if m.exact:
        # flint's rank is far faster on tall matrices than on wide ones
        if _q_is_zero(m._im):
            q = m._re
            return (q.transpose() if q.ncols() > q.nrows() else q).rank()
        q = _realify(m._re, m._im)
        return (q.transpose() if q.ncols() > q.nrows() else q).rank() // 2
    return len(_float_rref(m._a, m.tol)[1])


def _exact_complex_rref(rows):
    """Small complex RREF over Q(i) on a list of lists of GaussianRational."""
    a = [list(r) for r in rows]
    nr = len(a)
    nc = len(a[0]) if nr else 0
    piv = []
    r = 0
    for c in range(nc):
        p = next((i for i in range(r, nr) if a[i][c]), None)
        if p is None:
            continue
        a[r], a[p] = a[p], a[r]
        inv = GaussianRational(1) / a[r][c]
        a[r] = [x * inv for x in a[r]]
        for i in range(nr):
            if i != r and a[i][c]:
                f = a[i][c]
                a[i] = [x - f * y for x, y in zip(a[i], a[r])]
        piv.append(c)
        r += 1
        if r == nr:
            break
    return a[:r], piv


def _null_from_rref(rref_rows, piv, ncols, zero, one):
    free = [c for c in range(ncols) if c not in set(piv)]
    basis = []
    for f in free:
        v = [zero] * ncols
        v[f] = one
        for i, pc in enumerate(piv):
            v[pc] = -rref_rows[i][f]
        basis.append(v)
    return basis


def kernel_matrix(m: Matrix) -> Matrix:
    """Matrix whose columns form a basis of the null space of ``m``."""
    n = m.cols
    if m.exact:
        if n == 0:
            return m.like_zeros(0, 0)
        if _q_is_zero(m._im):
            rref, r = m._re.rref()
            e = rref.entries()
            piv = []
            for i in range(r):
                row = e[i * n:(i + 1) * n]
                piv.append(next(j for j, x in enumerate(row) if x != 0))
            rows = [e[i * n:(i + 1) * n] for i in range(r)]
            vecs = _null_from_rref(rows, piv, n, fmpq(0), fmpq(1))
            k = len(vecs)
            if k == 0:
                return m.like_zeros(n, 0)
            return Matrix(re_=_qmat(n, k, [vecs[j][i] for i in range(n) for j in range(k)]), tol=m.tol)
        # complex exact: real null space of the realification, then pick a Q(i)-basis
        big = _realify(m._re, m._im)
        rref, r = big.rref()
        w = 2 * n
        e = rref.entries()
        piv = []
        for i in range(r):
            row = e[i * w:(i + 1) * w]
            piv.append(next(j for j, x in enumerate(row) if x != 0))
        real_vecs = _null_from_rref([e[i * w:(i + 1) * w] for i in range(r)], piv, w, fmpq(0), fmpq(1))
        target = n - r // 2
        chosen = []
        for v in real_vecs:
            cand = [GaussianRational(_to_fraction(v[i]), _to_fraction(v[n + i])) for i in range(n)]
            trial = chosen + [cand]
            if rank(Matrix.from_rows(trial, exact=True, tol=m.tol)) == len(trial):
                chosen.append(cand)
            if len(chosen) == target:
                break
        if not chosen:
            return m.like_zeros(n, 0)
        # canonical form: rows of the RREF of the chosen basis
        canon, _ = _exact_complex_rref(chosen)
        return Matrix.from_rows(canon, exact=True, tol=m.tol).T
    rref, piv = _float_rref(m._a, m.tol)
    vecs = _null_from_rref(rref, piv, n, 0j, 1 + 0j)
    if not vecs:
        return m.like_zeros(n, 0)
    return Matrix(array=np.array(vecs, dtype=complex).T, tol=m.tol)


def kernel_basis(m: Matrix):
    """Basis of the null space as a list of column vectors; len == cols - rank."""
    return kernel_matrix(m).column_list()


def solve_linear(a: Matrix, b: Matrix):
    """Some x with a x = b (b a single column), or None when b is not in the image."""
    k = kernel_matrix(hstack([a, b]))
    last = a.cols
    for j in range(k.cols):
        c = k[last, j]
        nonzero = (c != 0) if a.exact else abs(c) > a.tol
        if nonzero:
            col = k.columns([j]).row_slice(range(a.cols))
            return col.scale(GaussianRational(-1) / c if a.exact else -1 / c)
    return None


def nullity(m: Matrix) -> int:
    return m.cols - rank(m)


def span_dim(vectors: Matrix) -> int:
    return rank(vectors)


def same_span(a: Matrix, b: Matrix) -> bool:
    ra, rb = rank(a), rank(b)
    return ra == rb and rank(hstack([a, b])) == ra


def contains_span(big: Matrix, small: Matrix) -> bool:
    """True iff the column span of ``small`` lies in the column span of ``big``."""
    if small.cols == 0:
        return True
    if big.cols == 0:
        return small.is_zero()
    return rank(hstack([big, small])) == rank(big)


# ---------------------------------------------------------------- order, logs, eigen

def is_invertible(m: Matrix) -> bool:
    return m.rows == m.cols and rank(m) == m.rows


def matrix_order(m: Matrix, cap: int = DEFAULT.order_cap):
    """Least k <= cap with m**k == I, else the sentinel ``INFINITE_WITHIN_CAP``."""
    if not is_invertible(m):
        raise NotInvertibleError("matrix_order needs an invertible matrix")
    ident = m.like_identity()
    p = m
    for k in range(1, cap + 1):
        if p.equals(ident):
            return k
        p = p @ m
    return INFINITE_WITHIN_CAP


def nilpotency_index(x: Matrix) -> int:
    """Least q with x**q == 0; raises if x is not nilpotent."""
    n = x.rows
    p = x.like_identity()
    for q in range(0, n + 1):
        if p.is_zero() or (not p.exact and p.max_abs() <= x.tol * max(1.0, x.max_abs()) ** max(q, 1)):
            return q
        p = p @ x
    from .errors import NotNilpotentError
    raise NotNilpotentError("matrix is not nilpotent")


def nilpotent_log(u: Matrix) -> Matrix:
    """log(u) for unipotent u via the finite series of log(I + (u - I))."""
    n = u.rows
    x = u - u.like_identity()
    xn = x ** n
    if not (xn.is_zero() if u.exact else xn.max_abs() <= u.tol * max(1.0, x.max_abs()) ** n):
        raise NotUnipotentError("u - I is not nilpotent")
    out = u.like_zeros(n, n)
    p = x
    for k in range(1, n):
        coeff = Fraction((-1) ** (k + 1), k)
        out = out + p.scale(coeff if u.exact else float(coeff))
        p = p @ x
    if not u.exact:
        out = Matrix(array=np.where(np.abs(out.to_numpy()) <= u.tol, 0, out.to_numpy()), tol=u.tol)
    return out


def nilpotent_exp(nmat: Matrix) -> Matrix:
    n = nmat.rows
    out = nmat.like_identity()
    p = nmat.like_identity()
    fact = 1
    for k in range(1, n + 1):
        p = p @ nmat
        fact *= k
        if p.is_zero():
            break
        out = out + p.scale(Fraction(1, fact) if nmat.exact else 1.0 / fact)
    return out


def normalize_rotation(x) -> RotationNumber:
    """Representative of x mod 1 in the half-open interval (-1, 0]."""
    if isinstance(x, (Fraction, int)):
        x = Fraction(x)
        r = x - math.ceil(x)
        return r
    x = float(x)
    r = x - math.ceil(x)
    return r


def _rationalize(alpha: float, cap: int, tol: float) -> RotationNumber:
    f = Fraction(alpha).limit_denominator(cap)
    if abs(float(f) - alpha) <= max(tol, 1e-12):
        return normalize_rotation(f)
    return normalize_rotation(alpha)


def rotation_to_root(alpha: RotationNumber) -> complex:
    return cmath.exp(2j * math.pi * float(alpha))


class EigenPart(NamedTuple):
    alpha: RotationNumber
    basis: Matrix  # columns span the generalized eigenspace
    blocks: tuple  # Jordan block sizes, decreasing
    exact_basis: bool


def _blocks_from_nullities(nulls):
    """Jordan block sizes from nullities of (m - l)**j, j = 0..q (nulls[0] == 0)."""
    counts_ge = [nulls[j] - nulls[j - 1] for j in range(1, len(nulls))]
    counts_ge.append(0)
    sizes = []
    for j in range(len(counts_ge) - 1):
        exactly = counts_ge[j] - counts_ge[j + 1]
        sizes.extend([j + 1] * exactly)
    return tuple(sorted(sizes, reverse=True))


def _float_clusters(vals: np.ndarray, tol: float):
    clusters = []
    for v in vals:
        for c in clusters:
            if abs(np.mean(c) - v) <= tol:
                c.append(v)
                break
        else:
            clusters.append([v])
    return [complex(np.mean(c)) for c in clusters], [len(c) for c in clusters]


def _cyclotomic_factor(d: int, k: int):
    """Gaussian-integer coefficients of the Q(i)-irreducible factor of Phi_d with root exp(2 pi i k/d)."""
    prim = [j for j in range(d) if gcd(j, d) == 1]
    if d % 4 == 0:
        prim = [j for j in prim if j % 4 == k % 4]
    coeffs = np.array([1.0 + 0j])
    for j in prim:
        coeffs = np.convolve(coeffs, np.array([1.0, -cmath.exp(2j * math.pi * j / d)]))
    out = []
    for c in coeffs:
        out.append(GaussianRational(int(round(c.real)), int(round(c.imag))))
    return out, prim  # highest degree first


def _poly_eval(coeffs, m: Matrix) -> Matrix:
    out = m.like_zeros(m.rows, m.cols)
    ident = m.like_identity()
    for c in coeffs:
        out = out @ m + ident.scale(c)
    return out


def _exact_rotations(m: "Matrix", cap: int) -> list:
    """Rotation numbers from the cyclotomic factors of the realified characteristic polynomial."""
    poly = _realify(m._re, m._im).charpoly()
    _, factors = poly.factor()
    out = []
    for f, _mult in factors:
        d = int(f.numer().is_cyclotomic())
        if d == 0:
            roots = np.roots([float(Fraction(int(c.p), int(c.q))) for c in reversed(f.coeffs())])
            if np.all(np.abs(np.abs(roots) - 1) <= 1e-9):
                raise IrrationalRotationError("irrational rotation unsupported in exact mode")
            raise NotQuasiUnitaryError(f"eigenvalue {roots[np.argmax(np.abs(np.abs(roots) - 1))]:.6g} "
                                       "is off the unit circle")
        if d > cap:
            raise IrrationalRotationError(f"eigenvalue order {d} exceeds the order cap {cap}")
        out += [normalize_rotation(Fraction(k, d)) for k in range(d) if gcd(k, d) == 1]
    return out


def _eig_float(m: Matrix, cap: int, cluster_tol: float):
    a = m.to_numpy()
    n = a.shape[0]
    vals = np.linalg.eigvals(a)
    centers, sizes = _float_clusters(vals, cluster_tol)
    parts = []
    total = 0
    for lam, size in zip(centers, sizes):
        if abs(abs(lam) - 1) > max(m.tol, 1e-9 * 10) and abs(abs(lam) - 1) > m.tol:
            raise NotQuasiUnitaryError(f"eigenvalue {lam:.6g} is off the unit circle")
        alpha = _rationalize(cmath.phase(lam) / (2 * math.pi), cap, m.tol)
        root = rotation_to_root(alpha) if isinstance(alpha, Fraction) else lam / abs(lam)
        shifted = Matrix(array=a - root * np.eye(n), tol=m.tol)
        nulls = [0]
        p = shifted.like_identity()
        for _ in range(size):
            p = p @ shifted
            nulls.append(nullity(p))
        if nulls[-1] != size:
            # fall back to the raw cluster centre
            shifted = Matrix(array=a - lam * np.eye(n), tol=max(m.tol, cluster_tol))
            nulls = [0]
            p = shifted.like_identity()
            for _ in range(size):
                p = p @ shifted
                nulls.append(nullity(p))
        basis = kernel_matrix(p)
        total += basis.cols
        parts.append(EigenPart(alpha, basis, _blocks_from_nullities(nulls), False))
    if total != n:
        raise NotQuasiUnitaryError("could not resolve the generalized eigenspaces within tolerance")
    return parts


def eig_unit_circle(m: Matrix, cap: int = DEFAULT.order_cap, cluster_tol: float = DEFAULT.cluster_tol):
    """Generalized eigenspace decomposition of a quasi-unitary matrix.

    Returns a list of :class:`EigenPart` sorted by rotation number, each
    alpha in (-1, 0] with exp(2 pi i alpha) the eigenvalue.  In exact mode
    the characteristic polynomial must be a product of cyclotomic factors;
    rotation numbers and Jordan data are then exact, and bases are exact
    whenever the eigenvalue lies in Q(i) (otherwise they are floating point
    and flagged by ``exact_basis=False``).
    """
    if m.rows != m.cols:
        raise ValueError("eig_unit_circle needs a square matrix")
    n = m.rows
    if n == 0:
        return []
    if not m.exact:
        return sorted(_eig_float(m, cap, cluster_tol), key=lambda p: float(p.alpha))
    # locate candidate roots numerically, confirm exactly
    parts = []
    seen = set()
    total = 0
    for alpha in _exact_rotations(m, cap):
        if not isinstance(alpha, Fraction):
            raise IrrationalRotationError("irrational rotation unsupported in exact mode")
        frac = alpha - math.floor(alpha)  # in [0, 1)
        d = frac.denominator
        k = frac.numerator
        if alpha in seen:
            continue
        coeffs, roots = _cyclotomic_factor(d, k)
        deg = len(roots)
        f_m = _poly_eval(coeffs, m)
        nulls = [0]
        p = m.like_identity()
        while True:
            p = p @ f_m
            nulls.append(nullity(p))
            if nulls[-1] == nulls[-2] or nulls[-1] == n:
                if nulls[-1] == nulls[-2]:
                    nulls.pop()
                break
        if nulls[-1] % deg:
            raise IrrationalRotationError("cyclotomic factor multiplicities are inconsistent")
        per_root = [x // deg for x in nulls]
        blocks = _blocks_from_nullities(per_root)
        mult = per_root[-1]
        for j in roots:
            a_j = normalize_rotation(Fraction(j, d))
            if a_j in seen:
                continue
            seen.add(a_j)
            if deg == 1:
                root = GaussianRational(int(round(cmath.exp(2j * math.pi * j / d).real)),
                                        int(round(cmath.exp(2j * math.pi * j / d).imag)))
                shifted = m - m.like_identity().scale(root)
                basis = kernel_matrix(shifted ** mult)
                exact_basis = True
            else:
                mf = m.to_float()
                shifted = Matrix(array=mf.to_numpy() - rotation_to_root(a_j) * np.eye(n), tol=m.tol)
                basis = kernel_matrix(shifted ** mult)
                exact_basis = False
            total += mult
            parts.append(EigenPart(a_j, basis, blocks, exact_basis))
    if total != n:
        raise IrrationalRotationError("characteristic polynomial is not a product of cyclotomic factors")
    return sorted(parts, key=lambda p: p.alpha)
