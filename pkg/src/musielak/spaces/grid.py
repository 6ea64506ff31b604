"""Uniform grids on ``[-R, R]^d`` and nodal grid functions."""

import struct
import threading
import weakref
from dataclasses import dataclass, field

import numpy as np

from ..exceptions import DomainError, GridMismatchError

MAGIC = b"MSKG"
BINARY_VERSION = 1
_HEADER = struct.Struct("<HdIdH")


@dataclass(frozen=True, eq=False)
class DomainGrid:
    """Truncated uniform grid with fractional order ``s``.

    Nodes are ordered row-major (last axis fastest); ``h = 2R / (n - 1)``.
    """

    d: int
    R: float
    n: int
    s: float
    _cache: dict = field(default_factory=dict, init=False, repr=False, compare=False)
    _lock: object = field(default_factory=threading.Lock, init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "d", int(self.d))
        object.__setattr__(self, "R", float(self.R))
        object.__setattr__(self, "n", int(self.n))
        object.__setattr__(self, "s", float(self.s))
        if not 1 <= self.d <= 3:
            raise DomainError(f"grid dimension must be 1, 2 or 3, got {self.d}")
        if self.n < 3:
            raise DomainError("need at least 3 nodes per axis")
        if not (np.isfinite(self.R) and self.R > 0):
            raise DomainError("half-width R must be positive")
        if not 0.0 < self.s < 1.0:
            raise DomainError("fractional order s must lie in (0, 1)")

    def __eq__(self, other):
        return isinstance(other, DomainGrid) and self.key == other.key

    def __hash__(self):
        return hash(self.key)

    @property
    def key(self):
        return (self.d, self.R, self.n, self.s)

    @property
    def h(self):
        return 2.0 * self.R / (self.n - 1)

    @property
    def N(self):
        return self.n ** self.d

    @property
    def cell(self):
        """Cell measure ``h^d``."""
        return self.h ** self.d

    @property
    def axis(self):
        return np.linspace(-self.R, self.R, self.n)

    @property
    def shape(self):
        return (self.n,) * self.d

    @property
    def nodes(self):
        """Node coordinates, shape ``(N, d)``; computed once."""
        return self.cached("nodes", self._make_nodes)

    def _make_nodes(self):
        mesh = np.meshgrid(*([self.axis] * self.d), indexing="ij")
        pts = np.stack([m.ravel() for m in mesh], axis=-1)
        pts.setflags(write=False)
        return pts

    @property
    def radii(self):
        return self.cached("radii", lambda: np.sqrt(np.sum(self.nodes * self.nodes, axis=-1)))

    def cached(self, key, factory):
        """Thread-safe memo for derived read-only data."""
        with self._lock:
            if key in self._cache:
                return self._cache[key]
        val = factory()
        with self._lock:
            return self._cache.setdefault(key, val)

    def family_cache(self, fam):
        """Per-family memo (held weakly so families can be collected)."""
        with self._lock:
            store = self._cache.setdefault("_families", weakref.WeakKeyDictionary())
            return store.setdefault(fam, {})

    def zeros(self):
        return GridFunction(self, np.zeros(self.N))

    def evaluate(self, f, radial=False):
        """Grid function with values ``f(nodes)``."""
        return GridFunction(self, np.asarray(f(self.nodes), dtype=float), radial=radial)

    def indicator(self, mask):
        mask = np.asarray(mask, dtype=bool)
        if mask.shape != (self.N,):
            raise GridMismatchError("mask length differs from node count")
        return GridFunction(self, mask.astype(float))


class GridFunction:
    """Nodal values of a function on a DomainGrid.

    ``radial`` marks values built from a radial profile; such values must
    agree at nodes with equal ``|x|``.
    """

    def __init__(self, grid, values, radial=False):
        values = np.array(values, dtype=float)
        if values.shape != (grid.N,):
            raise GridMismatchError(f"expected {grid.N} nodal values, got shape {values.shape}")
        if not np.all(np.isfinite(values)):
            raise DomainError("grid function values must be finite")
        values.setflags(write=False)
        self.grid = grid
        self.values = values
        self.radial = bool(radial)
        if self.radial:
            self._check_radial()

    def _check_radial(self, tol=1e-12):
        r = np.round(self.grid.radii / self.grid.h, 9)
        order = np.argsort(r, kind="stable")
        rs, vs = r[order], self.values[order]
        starts = np.flatnonzero(np.r_[True, rs[1:] != rs[:-1]])
        spread = np.maximum.reduceat(vs, starts) - np.minimum.reduceat(vs, starts)
        if np.max(spread) > tol * max(1.0, float(np.max(np.abs(vs)))):
            raise DomainError("radial flag set but values differ at equal |x|")

    @classmethod
    def from_profile(cls, grid, profile, r_samples=None):
        """Radial grid function ``u(x) = profile(|x|)``.

        ``profile`` is a callable of the radius, or sampled values at
        ``r_samples`` that are linearly interpolated.
        """
        r = grid.radii
        if callable(profile):
            vals = np.asarray(profile(r), dtype=float)
        else:
            vals = np.interp(r, np.asarray(r_samples, float), np.asarray(profile, float), right=0.0)
        return cls(grid, np.broadcast_to(vals, r.shape), radial=True)

    def __repr__(self):
        return f"GridFunction(d={self.grid.d}, n={self.grid.n}, max|u|={np.max(np.abs(self.values)):.4g})"

    def _other(self, other):
        if isinstance(other, GridFunction):
            if other.grid != self.grid:
                raise GridMismatchError("grid functions live on different grids")
            return other.values
        return other

    def __add__(self, other):
        return GridFunction(self.grid, self.values + self._other(other))

    __radd__ = __add__

    def __sub__(self, other):
        return GridFunction(self.grid, self.values - self._other(other))

    def __rsub__(self, other):
        return GridFunction(self.grid, self._other(other) - self.values)

    def __mul__(self, other):
        return GridFunction(self.grid, self.values * self._other(other),
                            radial=self.radial and np.ndim(other) == 0)

    __rmul__ = __mul__

    def __truediv__(self, other):
        return GridFunction(self.grid, self.values / other, radial=self.radial)

    def __neg__(self):
        return GridFunction(self.grid, -self.values, radial=self.radial)

    def is_zero(self):
        return not np.any(self.values)

    # -- IO ------------------------------------------------------------
    def to_csv(self, path, header_lines=()):
        """Plain-text container; ``header_lines`` become leading ``#`` comments."""
        g = self.grid
        with open(path, "w") as fh:
            for line in header_lines:
                fh.write(f"# {line}\n")
            fh.write("d,R,n,s\n")
            fh.write(f"{g.d},{g.R!r},{g.n},{g.s!r}\n")
            fh.writelines(f"{v!r}\n" for v in self.values.tolist())

    @classmethod
    def from_csv(cls, path, grid=None):
        with open(path) as fh:
            lines = [ln.strip() for ln in fh if ln.strip() and not ln.startswith("#")]
        if not lines or lines[0].replace(" ", "") != "d,R,n,s":
            raise DomainError(f"{path}: missing 'd,R,n,s' header")
        d, R, n, s = lines[1].split(",")
        file_grid = DomainGrid(int(d), float(R), int(n), float(s))
        _check_grid(file_grid, grid, path)
        return cls(grid or file_grid, [float(v) for v in lines[2:]])

    def to_binary(self, path):
        g = self.grid
        with open(path, "wb") as fh:
            fh.write(MAGIC)
            fh.write(struct.pack("<H", BINARY_VERSION))
            fh.write(_HEADER.pack(g.d, g.R, g.n, g.s, 1 if self.radial else 0))
            fh.write(self.values.astype("<f8").tobytes())

    @classmethod
    def from_binary(cls, path, grid=None):
        with open(path, "rb") as fh:
            blob = fh.read()
        if blob[:4] != MAGIC:
            raise DomainError(f"{path}: not an MSKG container")
        (version,) = struct.unpack_from("<H", blob, 4)
        if version != BINARY_VERSION:
            raise DomainError(f"{path}: unsupported container version {version}")
        d, R, n, s, flags = _HEADER.unpack_from(blob, 6)
        file_grid = DomainGrid(d, R, n, s)
        _check_grid(file_grid, grid, path)
        vals = np.frombuffer(blob, dtype="<f8", offset=6 + _HEADER.size)
        return cls(grid or file_grid, vals.astype(float), radial=bool(flags & 1))

    def save(self, path):
        if str(path).endswith(".csv"):
            self.to_csv(path)
        else:
            self.to_binary(path)

    @classmethod
    def load(cls, path, grid=None):
        with open(path, "rb") as fh:
            head = fh.read(4)
        if head == MAGIC:
            return cls.from_binary(path, grid)
        return cls.from_csv(path, grid)


def _check_grid(file_grid, grid, path):
    if grid is not None and grid != file_grid:
        raise GridMismatchError(f"{path}: file grid {file_grid.key} differs from expected {grid.key}")


def as_values(u, grid=None):
    """``(grid, values)`` from a GridFunction or a raw array."""
    if isinstance(u, GridFunction):
        if grid is not None and u.grid != grid:
            raise GridMismatchError("grid function lives on a different grid")
        return u.grid, u.values
    if grid is None:
        raise GridMismatchError("raw value arrays need an explicit grid")
    vals = np.asarray(u, dtype=float)
    if vals.shape[-1:] != (grid.N,):
        raise GridMismatchError(f"expected trailing axis {grid.N}, got shape {vals.shape}")
    return grid, vals
