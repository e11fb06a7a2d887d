"""2x2 complex matrices: exp/log on sl(2,C), standard neighborhoods, sampling.

Matrices are plain ``numpy`` arrays of shape ``(2, 2)`` and dtype complex.
Tangent vectors in sl(2,C) are written in the basis ``H, E, F``::

    H = [[1, 0], [0, -1]],  E = [[0, 1], [0, 0]],  F = [[0, 0], [1, 0]]
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .errors import CertificationError, DegenerateElementError, DomainError

DEFAULT_DELTA = 1e-6
TRACELESS_TOL = 1e-10

I2 = np.eye(2, dtype=complex)
H = np.array([[1, 0], [0, -1]], dtype=complex)
E = np.array([[0, 1], [0, 0]], dtype=complex)
F = np.array([[0, 0], [1, 0]], dtype=complex)
BASIS = (H, E, F)

for _m in (I2, H, E, F):
    _m.setflags(write=False)


def frob(m) -> float:
    return float(np.linalg.norm(m))


def scale(m) -> float:
    """``max(1, ||m||_F)``; all tolerances are taken relative to this."""
    return max(1.0, frob(m))


def det2(m) -> complex:
    return m[0, 0] * m[1, 1] - m[0, 1] * m[1, 0]


def trace(m) -> complex:
    return m[0, 0] + m[1, 1]


def inv_sl2(g):
    """Inverse of a determinant-one matrix (the adjugate)."""
    return np.array([[g[1, 1], -g[0, 1]], [-g[1, 0], g[0, 0]]], dtype=complex)


def coords(m) -> np.ndarray:
    """Coordinates of the traceless part of ``m`` in the basis H, E, F."""
    return np.array([(m[0, 0] - m[1, 1]) / 2, m[0, 1], m[1, 0]], dtype=complex)


def from_coords(c) -> np.ndarray:
    return np.array([[c[0], c[1]], [c[2], -c[0]]], dtype=complex)


def adjoint(g) -> np.ndarray:
    """3x3 matrix of ``u -> g u g^-1`` on sl(2,C) in the basis H, E, F."""
    a, b, c, d = g[0, 0], g[0, 1], g[1, 0], g[1, 1]
    # columns are coords(g B g^-1) for B = H, E, F, using g^-1 = adj(g)
    return np.array(
        [
            [a * d + b * c, -a * c, b * d],
            [-2 * a * b, a * a, -b * b],
            [2 * c * d, -c * c, d * d],
        ],
        dtype=complex,
    )


def is_traceless(v, tol=TRACELESS_TOL) -> bool:
    return abs(trace(v)) <= tol * scale(v)


def _sinc_of_square(t: complex) -> complex:
    """sin(x)/x as a function of t = x^2 (entire, even)."""
    if abs(t) < 1e-6:
        return 1 - t / 6 + t * t / 120 - t ** 3 / 5040
    x = cmath.sqrt(t)
    return cmath.sin(x) / x


def _x_over_sin(x: complex) -> complex:
    t = x * x
    if abs(t) < 1e-6:
        return 1 + t / 6 + 7 * t * t / 360 + 31 * t ** 3 / 15120
    return x / cmath.sin(x)


def exp_mat(v) -> np.ndarray:
    """Exponential of a traceless 2x2 matrix.

    With ``theta^2 = det(v)`` one has ``v^2 = -theta^2 I`` and hence
    ``exp(v) = cos(theta) I + sin(theta)/theta v``.
    """
    v = np.asarray(v, dtype=complex)
    if v.shape != (2, 2):
        raise DomainError(f"expected a 2x2 matrix, got shape {v.shape}")
    if not is_traceless(v):
        raise DomainError(f"exp_mat needs a traceless matrix, trace = {trace(v):.3e}")
    t = det2(v)
    return cmath.cos(cmath.sqrt(t)) * I2 + _sinc_of_square(t) * v


def trace_defect(g) -> float:
    """Distance of trace(g) from -2."""
    return abs(trace(g) + 2)


def log_mat(g, delta: float = DEFAULT_DELTA) -> np.ndarray:
    """Principal logarithm of ``g`` in SL(2,C), valued in sl(2,C).

    ``trace(g) = 2 cos(theta)`` with ``theta = arccos(trace/2)`` taken on the
    principal branch (real part in ``[0, pi]``); then
    ``log g = theta/sin(theta) (g - cos(theta) I)``.
    """
    g = np.asarray(g, dtype=complex)
    dist = trace_defect(g)
    if dist <= delta:
        raise DegenerateElementError(dist, delta)
    c = trace(g) / 2
    theta = cmath.acos(c)
    return _x_over_sin(theta) * (g - c * I2)


def in_path_domain(z: complex, epsilon: float) -> bool:
    """Whether ``z`` lies in the open epsilon-neighborhood of [0, 1] in C."""
    z = complex(z)
    nearest = min(max(z.real, 0.0), 1.0)
    return abs(z - nearest) < epsilon


def sample_path_domain(rng: np.random.Generator, epsilon: float, size: int) -> np.ndarray:
    s = rng.uniform(0.0, 1.0, size)
    r = epsilon * np.sqrt(rng.uniform(0.0, 1.0, size)) * 0.999
    phi = rng.uniform(0.0, 2 * math.pi, size)
    return s + r * np.exp(1j * phi)


def random_traceless(rng: np.random.Generator, size: float = 1.0) -> np.ndarray:
    """Standard complex Gaussian coordinates in the basis H, E, F."""
    c = (rng.standard_normal(3) + 1j * rng.standard_normal(3)) / math.sqrt(2)
    return size * from_coords(c)


def sample_sl2(rng: np.random.Generator) -> np.ndarray:
    """exp of a traceless matrix with standard complex Gaussian coordinates."""
    return exp_mat(random_traceless(rng))


def _dexp_floor(v) -> float:
    """Smallest gain of the derivative of exp at ``v``.

    The eigenvalues of ``ad v`` are ``0, +-2i theta``; the derivative is
    ``exp(v) (1 - exp(-ad v)) / ad v`` and vanishes in some direction exactly
    when ``theta`` is a nonzero multiple of pi.
    """
    x = 2j * cmath.sqrt(det2(v))
    if abs(x) < 1e-8:
        return 1.0
    return min(abs((1 - cmath.exp(-x)) / x), abs((1 - cmath.exp(x)) / -x), 1.0)


@dataclass(frozen=True, eq=False)
class StandardNeighborhood:
    """A logarithm branch around ``base`` and the path domain P_epsilon."""

    base: np.ndarray
    log_base: np.ndarray
    epsilon: float
    delta: float = DEFAULT_DELTA
    shrinks: int = 0

    def contains(self, z: complex) -> bool:
        return in_path_domain(z, self.epsilon)

    def one_parameter(self, z: complex) -> np.ndarray:
        """``exp(z * log(base))``."""
        return exp_mat(complex(z) * self.log_base)

    def describe(self) -> dict:
        return {
            "epsilon": self.epsilon,
            "path_domain": f"open {self.epsilon:g}-neighborhood of [0,1] in C",
            "shrinks": self.shrinks,
        }


def _line_singularities_clear(v, epsilon: float) -> bool:
    """Exact check on the segment itself: ``exp`` is singular at ``z v`` iff
    ``z theta`` is a nonzero multiple of pi (odd multiples give -I)."""
    theta = cmath.sqrt(det2(v))
    if abs(theta) < 1e-12:
        return True
    kmax = int((1 + 2 * epsilon) * abs(theta) / math.pi) + 1
    for k in range(1, kmax + 1):
        for z in (k * math.pi / theta, -k * math.pi / theta):
            nearest = min(max(z.real, 0.0), 1.0)
            if abs(z - nearest) <= epsilon * (1 + 1e-6):
                return False
    return True


def _certify(v, g, epsilon, delta, rng, samples) -> bool:
    if not _line_singularities_clear(v, epsilon):
        return False
    sc = max(1.0, frob(v))
    minus_i = -I2
    # -I avoidance and local biholomorphicity on P * (perturbed log)
    zs = sample_path_domain(rng, epsilon, samples)
    for z in zs:
        w = random_traceless(rng)
        w /= max(frob(w), 1e-300)
        p = z * (v + epsilon * rng.uniform() * w)
        if frob(exp_mat(p) - minus_i) <= delta:
            return False
        if _dexp_floor(p) <= delta:
            return False
    # injectivity spot check on a grid in the epsilon-neighborhood of [0,1]*v
    grid = []
    for s in np.linspace(0.0, 1.0, 9):
        grid.append(s * v)
        w = random_traceless(rng)
        grid.append(s * v + 0.5 * epsilon * w / max(frob(w), 1e-300))
    images = [exp_mat(p) for p in grid]
    for i in range(len(grid)):
        for j in range(i + 1, len(grid)):
            apart = frob(grid[i] - grid[j])
            if apart > 1e-8 * sc and frob(images[i] - images[j]) <= 1e-12 * scale(images[i]):
                return False
    return frob(exp_mat(v) - g) <= 1e-9 * scale(g)


def standard_neighborhood(
    g,
    epsilon: float = 0.1,
    *,
    delta: float = DEFAULT_DELTA,
    rng: np.random.Generator | None = None,
    samples: int = 64,
    max_shrinks: int = 20,
) -> StandardNeighborhood:
    """Choose ``log g`` and shrink ``epsilon`` until the checks pass.

    On the segment ``P_epsilon * log g`` the singular parameters of ``exp``
    are excluded exactly; around it, -I avoidance, the derivative floor and
    injectivity are spot-checked on samples.

    Raises :class:`DegenerateElementError` near trace -2 and
    :class:`CertificationError` if 20 halvings do not suffice.
    """
    g = np.asarray(g, dtype=complex)
    v = log_mat(g, delta)
    if rng is None:
        rng = np.random.default_rng(0)
    eps = float(epsilon)
    for k in range(max_shrinks + 1):
        if _certify(v, g, eps, delta, rng, samples):
            g_ro = g.copy()
            v_ro = v.copy()
            g_ro.setflags(write=False)
            v_ro.setflags(write=False)
            return StandardNeighborhood(g_ro, v_ro, eps, delta, k)
        eps /= 2
    raise CertificationError(
        f"no standard neighborhood certified after {max_shrinks} shrinks (last epsilon {eps * 2:.3e})"
    )


def matrix_to_json(m) -> list[list[float]]:
    """Row-major list of ``[re, im]`` pairs."""
    return [[float(x.real), float(x.imag)] for x in np.asarray(m, dtype=complex).ravel()]


def matrix_from_json(data) -> np.ndarray:
    if len(data) != 4:
        raise ValueError("a 2x2 matrix needs four [re, im] entries")
    return np.array([complex(re, im) for re, im in data], dtype=complex).reshape(2, 2)
