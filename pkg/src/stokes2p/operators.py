"""Singular integral operator calculus on periodic interface profiles.

Three kernel families act on 2*pi-periodic densities phi, each indexed by
small integer tuples and parameterized by argument profiles:

* tangent family ``B``: products of quotients tanh(delta/2)/tan(s/2) over a
  denominator of the same build, against phi(xi - s)/tan(s/2) * tan(s/2)**p.
  For p = 0 the kernel carries an odd principal-value singularity at s = 0;
  for p >= 1 it is bounded.  The (0,0,0,0) member is the periodic Hilbert
  transform.
* difference family ``C``: the same structure with plain difference
  quotients delta/s and a 1/s singularity on the window (-pi, pi).
* regularized family ``A``: the pointwise difference of a tangent-family
  kernel (with 1/tan(s/2)**ell) and its difference-quotient counterpart
  (with 1/(s/2)**ell); the kernel is bounded by |s|**(2-ell).

The three satisfy, kernel by kernel,

    B[n,m,0,q] = A[n,m,ell=1,q] + C[n+q,m]

and the difference family obeys C[n,m] + C[n+2,m] = C[n,m-1] for m >= 1.

Quadrature.  Principal values use a midpoint rule with nodes straddling
s = 0 symmetrically (half a spacing off the collocation grid), so the
singularity is never sampled and odd singular parts cancel analytically.
For the tangent family the integrand is periodic and the rule converges
spectrally.  The 1/s kernels are not periodic, so the midpoint rule is only
second order for them; a symmetrized Gauss-Legendre rule is available
(``rule="gauss"``) when converged values rather than shared-node identities
are wanted.  Densities and arguments are sampled at xi_i - s_j by FFT phase
shifts, with a circulant gather fast path when the nodes are the half grid.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from numpy.polynomial.legendre import leggauss

from .core import InterfaceProfile, PeriodicGrid, TWO_PI

__all__ = [
    "OperatorSpec",
    "KernelWorkspace",
    "DiagonalOps",
    "hilbert_transform",
    "eval_B",
    "eval_C",
    "eval_A",
    "eval_B0",
    "composite_B",
    "frechet_B",
    "frechet_B0",
    "COMPOSITE_MEMBERS",
]


# ---------------------------------------------------------------------------
# quadrature rules and sampling
# ---------------------------------------------------------------------------

@lru_cache(maxsize=32)
def _midpoint_rule(m: int):
    h = TWO_PI / m
    s = -np.pi + (np.arange(m) + 0.5) * h
    w = np.full(m, h)
    s.flags.writeable = False
    w.flags.writeable = False
    return s, w


@lru_cache(maxsize=32)
def _gauss_rule(m_half: int):
    # Gauss-Legendre on (0, pi), mirrored to (-pi, 0): integrates the
    # symmetrized integrand, so odd singular parts cancel pairwise.
    x, w = leggauss(m_half)
    s_half = 0.5 * np.pi * (x + 1.0)
    w_half = 0.5 * np.pi * w
    s = np.concatenate([s_half, -s_half])
    w = np.concatenate([w_half, w_half])
    s.flags.writeable = False
    w.flags.writeable = False
    return s, w


@lru_cache(maxsize=32)
def _circulant_index(n: int) -> np.ndarray:
    # xi_i - s_j lands on the half grid: index (i - j - 1 + n/2) mod n
    i = np.arange(n)[:, None]
    j = np.arange(n)[None, :]
    idx = (i - j - 1 + n // 2) % n
    idx.flags.writeable = False
    return idx


class KernelWorkspace:
    """Quadrature nodes plus cached pairwise tables for one evaluation context.

    Holds, per argument function d, the sampling table d(xi_i - s_j) and the
    difference table d(xi_i) - d(xi_i - s_j), both of shape (N, M).
    """

    def __init__(self, grid: PeriodicGrid, rule: str = "midpoint", m_quad: int | None = None):
        self.grid = grid
        self.rule = rule
        n = grid.n_points
        if rule == "midpoint":
            m = m_quad or n
            self.nodes, self.weights = _midpoint_rule(m)
        elif rule == "gauss":
            m = m_quad or n // 2
            self.nodes, self.weights = _gauss_rule(m)
        else:
            raise ValueError(f"unknown quadrature rule {rule!r}")
        self.tan_half = np.tan(self.nodes / 2.0)
        self._circulant = (
            _circulant_index(n) if rule == "midpoint" and len(self.nodes) == n else None
        )
        self._samples: dict[int, tuple[np.ndarray, np.ndarray]] = {}
        self._deltas: dict[int, np.ndarray] = {}

    def sample(self, values: np.ndarray) -> np.ndarray:
        """Table T[i, j] = d(xi_i - s_j) for the interpolant of values."""
        key = id(values)
        hit = self._samples.get(key)
        if hit is not None and hit[0] is values:
            return hit[1]
        values = np.asarray(values, dtype=float)
        n = self.grid.n_points
        if self._circulant is not None:
            c = np.fft.fft(values)
            half = np.fft.ifft(c * np.exp(1j * self.grid.wavenumbers * (self.grid.spacing / 2))).real
            tab = half[self._circulant]
        else:
            c = np.fft.fft(values) / n
            phase = np.exp(-1j * np.outer(self.grid.wavenumbers, self.nodes))
            tab = np.fft.ifft(c[:, None] * phase * n, axis=0).real
        tab.flags.writeable = False
        self._samples[key] = (values, tab)
        return tab

    def delta(self, values: np.ndarray) -> np.ndarray:
        """Difference table D[i, j] = d(xi_i) - d(xi_i - s_j)."""
        key = id(values)
        hit = self._deltas.get(key)
        if hit is not None:
            return hit
        tab = np.asarray(values, dtype=float)[:, None] - self.sample(values)
        tab.flags.writeable = False
        self._deltas[key] = tab
        return tab

    def contract(self, kernel: np.ndarray, density_values: np.ndarray) -> np.ndarray:
        """sum_j kernel[i, j] * phi(xi_i - s_j) * w_j, fixed summation order."""
        return (kernel * self.sample(density_values)) @ self.weights


# ---------------------------------------------------------------------------
# operator specification
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class OperatorSpec:
    """Index tuple (n, m, p, q) plus the argument profiles of one operator.

    args_a fills the m denominator slots, args_b the n tangent-numerator
    slots, args_c the q difference-numerator slots.  The standing constraint
    p <= n + q + 1 keeps the kernel bounded at |s| = pi.
    """

    n: int
    m: int
    p: int = 0
    q: int = 0
    args_a: tuple = ()
    args_b: tuple = ()
    args_c: tuple = ()

    def __post_init__(self):
        for name, val in (("n", self.n), ("m", self.m), ("p", self.p), ("q", self.q)):
            if val < 0:
                raise ValueError(f"index {name} must be nonnegative, got {val}")
        if self.p > self.n + self.q + 1:
            raise ValueError(
                f"invalid spec: p={self.p} exceeds n+q+1={self.n + self.q + 1}"
            )
        if len(self.args_a) != self.m or len(self.args_b) != self.n or len(self.args_c) != self.q:
            raise ValueError("argument counts must match (m, n, q)")
        grids = {pr.grid for pr in self.args_a + self.args_b + self.args_c}
        if len(grids) > 1:
            raise ValueError("all argument profiles must share one grid")

    @classmethod
    def diagonal(cls, n: int, m: int, p: int, q: int, f: InterfaceProfile) -> "OperatorSpec":
        """All argument slots filled with the same profile f."""
        return cls(n, m, p, q, (f,) * m, (f,) * n, (f,) * q)

    @property
    def grid(self) -> PeriodicGrid | None:
        for pr in self.args_a + self.args_b + self.args_c:
            return pr.grid
        return None


def _density_values(density, grid: PeriodicGrid) -> np.ndarray:
    if isinstance(density, InterfaceProfile):
        if density.grid != grid:
            raise ValueError("density grid does not match argument grid")
        return density.values
    values = np.asarray(density, dtype=float)
    if values.shape != (grid.n_points,):
        raise ValueError("density length does not match grid")
    return values


def _resolve_grid(spec: OperatorSpec, density) -> PeriodicGrid:
    grid = spec.grid
    if grid is None:
        if isinstance(density, InterfaceProfile):
            return density.grid
        return PeriodicGrid(len(np.asarray(density)))
    return grid


# ---------------------------------------------------------------------------
# kernel assembly
# ---------------------------------------------------------------------------

def _tangent_kernel(ws, deltas_a, deltas_b, deltas_c, p):
    t = ws.tan_half
    num = 1.0
    for db in deltas_b:
        num = num * (np.tanh(db / 2.0) / t)
    for dc in deltas_c:
        num = num * ((dc / 2.0) / t)
    den = 1.0
    for da in deltas_a:
        den = den * (1.0 + (np.tanh(da / 2.0) / t) ** 2)
    shape = (ws.grid.n_points, len(ws.nodes))
    return np.broadcast_to(num / den, shape) / (2.0 * np.pi) * t ** (p - 1)


def _difference_kernel(ws, deltas_a, deltas_b):
    s = ws.nodes
    num = 1.0
    for db in deltas_b:
        num = num * (db / s)
    den = 1.0
    for da in deltas_a:
        den = den * (1.0 + (da / s) ** 2)
    shape = (ws.grid.n_points, len(ws.nodes))
    return np.broadcast_to(num / den, shape) / (np.pi * s)


def _regularized_kernel(ws, deltas_a, deltas_b, deltas_c, ell):
    t = ws.tan_half
    s = ws.nodes
    num_t, den_t = 1.0, 1.0
    for db in deltas_b:
        num_t = num_t * (np.tanh(db / 2.0) / t)
    for dc in deltas_c:
        num_t = num_t * ((dc / 2.0) / t)
    for da in deltas_a:
        den_t = den_t * (1.0 + (np.tanh(da / 2.0) / t) ** 2)
    num_s, den_s = 1.0, 1.0
    for d in deltas_b + deltas_c:
        num_s = num_s * (d / s)
    for da in deltas_a:
        den_s = den_s * (1.0 + (da / s) ** 2)
    shape = (ws.grid.n_points, len(ws.nodes))
    bracket = num_t / den_t / t**ell - num_s / den_s / (s / 2.0) ** ell
    return np.broadcast_to(bracket, shape) / (2.0 * np.pi)


def eval_B(spec: OperatorSpec, density, *, m_quad: int | None = None,
           workspace: KernelWorkspace | None = None) -> np.ndarray:
    """Nodal values of the tangent-family operator applied to the density."""
    grid = _resolve_grid(spec, density)
    ws = workspace or KernelWorkspace(grid, "midpoint", m_quad)
    da = [ws.delta(a.values) for a in spec.args_a]
    db = [ws.delta(b.values) for b in spec.args_b]
    dc = [ws.delta(c.values) for c in spec.args_c]
    K = _tangent_kernel(ws, da, db, dc, spec.p)
    return ws.contract(K, _density_values(density, grid))


def eval_C(spec: OperatorSpec, density, *, rule: str = "midpoint",
           m_quad: int | None = None,
           workspace: KernelWorkspace | None = None) -> np.ndarray:
    """Nodal values of the difference-family (1/s kernel) principal value.

    The default midpoint rule shares nodes with :func:`eval_B`, making the
    algebraic identities between the families exact at the discrete level;
    ``rule="gauss"`` gives converged continuum values instead.
    """
    grid = _resolve_grid(spec, density)
    ws = workspace or KernelWorkspace(grid, rule, m_quad)
    da = [ws.delta(a.values) for a in spec.args_a]
    db = [ws.delta(b.values) for b in spec.args_b]
    K = _difference_kernel(ws, da, db)
    return ws.contract(K, _density_values(density, grid))


def eval_A(spec: OperatorSpec, ell: int, density, *, rule: str = "midpoint",
           m_quad: int | None = None,
           workspace: KernelWorkspace | None = None) -> np.ndarray:
    """Nodal values of the regularized-difference operator (bounded kernel)."""
    if ell not in (1, 2):
        raise ValueError("ell must be 1 or 2")
    grid = _resolve_grid(spec, density)
    ws = workspace or KernelWorkspace(grid, rule, m_quad)
    da = [ws.delta(a.values) for a in spec.args_a]
    db = [ws.delta(b.values) for b in spec.args_b]
    dc = [ws.delta(c.values) for c in spec.args_c]
    K = _regularized_kernel(ws, da, db, dc, ell)
    return ws.contract(K, _density_values(density, grid))


# ---------------------------------------------------------------------------
# Fourier multiplier operators
# ---------------------------------------------------------------------------

def hilbert_transform(density, grid: PeriodicGrid | None = None) -> np.ndarray:
    """Periodic Hilbert transform via its multiplier -i*sign(k); mean to zero.

    The Nyquist mode is zeroed as well: its transform samples to zero on the
    collocation grid.
    """
    if isinstance(density, InterfaceProfile):
        grid = density.grid
        values = density.values
    else:
        values = np.asarray(density, dtype=float)
        if grid is None:
            grid = PeriodicGrid(len(values))
    n = grid.n_points
    c = np.fft.fft(values)
    mult = -1j * np.sign(grid.wavenumbers)
    mult[n // 2] = 0.0
    return np.fft.ifft(mult * c).real


def _log_sin_multiplier(n: int) -> np.ndarray:
    # multiplier of convolution with ln(sin^2(s/2))/(2*pi): -1/|k|, and
    # -ln 4 on the mean mode
    k = np.abs(np.fft.fftfreq(n, d=1.0 / n))
    mult = np.empty(n)
    mult[0] = -np.log(4.0)
    mult[1:] = -1.0 / k[1:]
    return mult


def eval_B0(f: InterfaceProfile, density, *, m_quad: int | None = None,
            workspace: KernelWorkspace | None = None) -> np.ndarray:
    """Logarithmic-kernel operator, split into an exact multiplier plus a
    smooth periodic remainder.

    The log kernel ln(sin^2(s/2) + sinh^2(delta f/2)) is written as
    ln(sin^2(s/2)) (applied spectrally) plus ln(1 + sinh^2(delta f/2)/sin^2(s/2)),
    which is bounded and handled by the half-grid midpoint rule.
    """
    grid = f.grid
    values = _density_values(density, grid)
    part1 = np.fft.ifft(_log_sin_multiplier(grid.n_points) * np.fft.fft(values)).real
    ws = workspace or KernelWorkspace(grid, "midpoint", m_quad)
    df = ws.delta(f.values)
    K = np.log1p(np.sinh(df / 2.0) ** 2 / np.sin(ws.nodes / 2.0) ** 2) / (2.0 * np.pi)
    return part1 + ws.contract(K, values)


# ---------------------------------------------------------------------------
# diagonal fast path and the named composites
# ---------------------------------------------------------------------------

# composite index -> list of (coefficient, (n, m, p, q)) of diagonal members
COMPOSITE_MEMBERS = {
    1: ((1, (0, 1, 0, 0)), (-1, (2, 1, 2, 0))),
    2: ((1, (1, 1, 0, 0)), (1, (1, 1, 2, 0))),
    3: ((1, (0, 2, 0, 1)), (1, (0, 2, 2, 1)), (-1, (2, 2, 0, 1)),
        (-2, (2, 2, 2, 1)), (-1, (2, 2, 4, 1)), (1, (4, 2, 2, 1)),
        (1, (4, 2, 4, 1))),
    4: ((1, (1, 2, 0, 1)), (1, (1, 2, 2, 1)), (-1, (3, 2, 2, 1)),
        (-1, (3, 2, 4, 1))),
    5: ((2, (0, 1, 1, 1)), (-2, (2, 1, 3, 1))),
    6: ((2, (1, 1, 1, 1)), (2, (1, 1, 3, 1))),
}


class DiagonalOps:
    """Shared-table evaluator for operators whose arguments all equal one f.

    Builds the difference table of f once and derives every member kernel
    from cached powers, so assembling the full evolution operator costs a
    handful of elementwise products per member.
    """

    def __init__(self, f: InterfaceProfile, *, m_quad: int | None = None):
        self.f = f
        self.ws = KernelWorkspace(f.grid, "midpoint", m_quad)
        self.df = self.ws.delta(f.values)
        t = self.ws.tan_half
        self._u = np.tanh(self.df / 2.0) / t          # tangent quotient
        self._v = (self.df / 2.0) / t                 # difference slot
        self._den = 1.0 + self._u**2
        self._u_pow = {0: 1.0}
        self._den_pow = {0: 1.0}
        self._t_pow = {}
        self._kernels: dict[tuple, np.ndarray] = {}

    def _upow(self, n):
        if n not in self._u_pow:
            self._u_pow[n] = self._upow(n - 1) * self._u
        return self._u_pow[n]

    def _denpow(self, m):
        if m not in self._den_pow:
            self._den_pow[m] = self._denpow(m - 1) * self._den
        return self._den_pow[m]

    def _tpow(self, p):
        if p not in self._t_pow:
            self._t_pow[p] = self.ws.tan_half ** p
        return self._t_pow[p]

    def kernel(self, n: int, m: int, p: int, q: int) -> np.ndarray:
        # boundedness at |s| = pi (p <= n + q + #extras + 1) is the caller's
        # contract; the bare table is finite at the quadrature nodes regardless
        key = (n, m, p, q)
        K = self._kernels.get(key)
        if K is None:
            K = self._upow(n) * self._tpow(p - 1) / (2.0 * np.pi)
            if q:
                K = K * (self._v if q == 1 else self._v**q)
            if m:
                K = K / self._denpow(m)
            self._kernels[key] = K
        return K

    def apply_member(self, n, m, p, q, density_values, extra_diffs=()) -> np.ndarray:
        """One member applied to a density; extra_diffs appends difference
        slots filled by functions other than f (used by the derivatives)."""
        if p > n + q + len(extra_diffs) + 1:
            raise ValueError("invalid member indices")
        K = self.kernel(n, m, p, q)
        for d in extra_diffs:
            K = K * ((self.ws.delta(np.asarray(d, dtype=float)) / 2.0) / self.ws.tan_half)
        return self.ws.contract(K, density_values)

    def b0(self, density_values) -> np.ndarray:
        return eval_B0(self.f, density_values, workspace=self.ws)

    def composite(self, index: int, density_values) -> np.ndarray:
        if index == 0:
            return self.b0(density_values)
        out = None
        for coef, (n, m, p, q) in COMPOSITE_MEMBERS[index]:
            term = coef * self.apply_member(n, m, p, q, density_values)
            out = term if out is None else out + term
        return out


def composite_B(index: int, f: InterfaceProfile, density, *,
                m_quad: int | None = None,
                ops: DiagonalOps | None = None) -> np.ndarray:
    """The named diagonal combinations; index 0 is the logarithmic operator."""
    if index not in range(0, 7):
        raise ValueError(f"composite index must be in 0..6, got {index}")
    ops = ops or DiagonalOps(f, m_quad=m_quad)
    return ops.composite(index, _density_values(density, f.grid))


# ---------------------------------------------------------------------------
# analytic directional derivatives in the interface argument
# ---------------------------------------------------------------------------

def frechet_B(spec, f0: InterfaceProfile, direction, *,
              directions: tuple = (), m_quad: int | None = None):
    """Derivative of the diagonal tangent-family operator in its profile.

    Returns the linear density-to-values map h -> (d/d f) B[n,m,p,q](f0)
    applied in the given direction.  ``directions`` carries the extra
    difference slots of an already-differentiated member (its length is the
    derivative order built up so far); validity then requires only
    p <= n + q + len(directions) + 1, so ``spec`` may be a bare (n, m, p, q)
    tuple for members whose p exceeds the underived bound.
    """
    n, m, p, q = (spec.n, spec.m, spec.p, spec.q) if isinstance(spec, OperatorSpec) \
        else spec
    k = len(directions)
    if p > n + q + k + 1:
        raise ValueError("invalid member indices for the requested derivative")
    ops = DiagonalOps(f0, m_quad=m_quad)
    dvec = np.asarray(direction.values if isinstance(direction, InterfaceProfile) else direction,
                      dtype=float)
    extras = tuple(np.asarray(d.values if isinstance(d, InterfaceProfile) else d, dtype=float)
                   for d in directions) + (dvec,)

    terms = []
    if n:
        terms += [(n, (n - 1, m, p, q)), (-n, (n + 1, m, p + 2, q))]
    if m:
        terms += [(2 * m, (n + 3, m + 1, p + 2, q)), (-2 * m, (n + 1, m + 1, p, q))]
    if q:
        terms += [(q, (n, m, p, q - 1))]

    def operator(density):
        values = _density_values(density, f0.grid)
        out = np.zeros(f0.grid.n_points)
        for coef, (nn, mm, pp, qq) in terms:
            out += coef * ops.apply_member(nn, mm, pp, qq, values, extra_diffs=extras)
        return out

    return operator


def frechet_B0(f0: InterfaceProfile, direction, *, m_quad: int | None = None):
    """Derivative of the logarithmic operator in its profile argument."""
    ops = DiagonalOps(f0, m_quad=m_quad)
    dvec = np.asarray(direction.values if isinstance(direction, InterfaceProfile) else direction,
                      dtype=float)

    def operator(density):
        values = _density_values(density, f0.grid)
        return 2.0 * (ops.apply_member(1, 1, 1, 0, values, extra_diffs=(dvec,))
                      + ops.apply_member(1, 1, 3, 0, values, extra_diffs=(dvec,)))

    return operator
