"""Commuting matrix tuples as semigroup generator families.

A :class:`CommutingTuple` holds pairwise-commuting square complex
matrices ``A_1 .. A_k`` together with per-axis sector domains
``(a_j, b_j)``; the j-th semigroup is ``zeta -> Exp(zeta*A_j)`` on the
closed sector, with value I at zeta = 0.  The matrix exponential uses
scaling and squaring with the 13th-order diagonal rational approximant;
eigendecompositions appear only in growth-rate bookkeeping and test
oracles, never inside the exponential.

Tuples are immutable after validation and all operations are pure.
"""

import json
from dataclasses import dataclass

import numpy as np

from .geometry import ProductSector, _unit
from .quadrature import ray_integral, richardson

_PADE13_B = np.array([
    64764752532480000., 32382376266240000., 7771770303897600.,
    1187353796428800., 129060195264000., 10559470521600., 670442572800.,
    33522128640., 1323241920., 40840800., 960960., 16380., 182., 1.,
])
_THETA13 = 5.371920351148152


class CommutationError(ValueError):
    """Input matrices do not commute within tolerance."""


class SectorDomainError(ValueError):
    """Evaluation point outside the declared sector domain."""


class SingularFactorError(np.linalg.LinAlgError):
    """A resolvent factor is singular or nearly so."""

    def __init__(self, axis, distance):
        super().__init__(
            f"resolvent factor on axis {axis} is within {distance:.3e} of an eigenvalue")
        self.axis = axis
        self.distance = distance


class DivergenceError(ValueError):
    """An integral representation is divergent for the given parameters."""


def opnorm(a):
    """Operator 2-norm (largest singular value)."""
    return float(np.linalg.norm(np.asarray(a), 2))


def expm(a):
    """Matrix exponential by scaling and squaring, 13th-order diagonal Pade."""
    a = np.asarray(a, dtype=complex)
    n = a.shape[0]
    norm1 = np.linalg.norm(a, 1)
    squarings = 0
    if norm1 > _THETA13:
        squarings = int(np.ceil(np.log2(norm1 / _THETA13)))
        a = a / (2.0 ** squarings)
    b = _PADE13_B
    ident = np.eye(n, dtype=complex)
    a2 = a @ a
    a4 = a2 @ a2
    a6 = a4 @ a2
    u = a @ (a6 @ (b[13] * a6 + b[11] * a4 + b[9] * a2)
             + b[7] * a6 + b[5] * a4 + b[3] * a2 + b[1] * ident)
    v = a6 @ (b[12] * a6 + b[10] * a4 + b[8] * a2) \
        + b[6] * a6 + b[4] * a4 + b[2] * a2 + b[0] * ident
    f = np.linalg.solve(-u + v, u + v)
    for _ in range(squarings):
        f = f @ f
    return f


@dataclass(frozen=True)
class CommutingTuple:
    """Pairwise-commuting matrices with sector domains.

    Commutation is enforced at construction: the defect
    ``|A_i A_j - A_j A_i|`` must not exceed ``1e-10 * |A_i| * |A_j|`` in
    the operator norm, since the whole calculus silently degrades without
    commutativity.
    """

    matrices: tuple
    sectors: ProductSector

    def __init__(self, matrices, sectors):
        matrices = tuple(np.array(m, dtype=complex) for m in matrices)
        dim = matrices[0].shape[0]
        for m in matrices:
            if m.shape != (dim, dim):
                raise ValueError("all matrices must be square of equal dimension")
            m.setflags(write=False)
        if not isinstance(sectors, ProductSector):
            sectors = ProductSector(sectors)
        if sectors.k != len(matrices):
            raise ValueError("need one sector per matrix")
        norms = [max(opnorm(m), 1e-300) for m in matrices]
        for i in range(len(matrices)):
            for j in range(i + 1, len(matrices)):
                defect = opnorm(matrices[i] @ matrices[j] - matrices[j] @ matrices[i])
                if defect > 1e-10 * norms[i] * norms[j]:
                    raise CommutationError(
                        f"matrices {i} and {j} do not commute "
                        f"(relative defect {defect / (norms[i] * norms[j]):.3e})")
        object.__setattr__(self, "matrices", matrices)
        object.__setattr__(self, "sectors", sectors)

    @property
    def k(self):
        return len(self.matrices)

    @property
    def dim(self):
        return self.matrices[0].shape[0]

    def eigenvalues(self, j):
        return np.linalg.eigvals(self.matrices[j])

    def eig_basis(self, j):
        """Eigen data (used by oracles): eigenvalues, eigenvector matrix,
        and its condition number."""
        vals, vecs = np.linalg.eig(self.matrices[j])
        return vals, vecs, float(np.linalg.cond(vecs))

    def to_json(self):
        return {
            "k": self.k,
            "dim": self.dim,
            "A": [[[[v.real, v.imag] for v in row] for row in m] for m in self.matrices],
            "sectors": [[s.alpha, s.beta] for s in self.sectors.sectors],
        }

    @staticmethod
    def from_json(obj):
        if isinstance(obj, str):
            obj = json.loads(obj)
        mats = []
        for m in obj["A"]:
            mats.append(np.array([[complex(v[0], v[1]) for v in row] for row in m]))
        return CommutingTuple(mats, [tuple(s) for s in obj["sectors"]])


class GrowthProfile:
    """Spectral abscissas of the scaled semigroups.

    ``abscissa(j, omega, lam)`` is the growth rate of
    ``t -> |Exp(t * lam * exp(1j*omega) * A_j)|``, computed as
    ``max Re(lam * exp(1j*omega) * mu)`` over the eigenvalues ``mu``.
    """

    def __init__(self, tup):
        self.tup = tup
        self._eigs = [tup.eigenvalues(j) for j in range(tup.k)]

    def abscissa(self, j, omega, lam=1.0):
        return float(np.max((lam * _unit(omega) * self._eigs[j]).real))


def evaluate(tup, j, zeta):
    """Semigroup value ``Exp(zeta*A_j)``; ``zeta`` must be in the closed
    sector domain of axis j (0 gives the identity)."""
    zeta = complex(zeta)
    sec = tup.sectors.sectors[j]
    if zeta != 0 and not sec.contains(zeta, closed=True):
        raise SectorDomainError(
            f"zeta={zeta} outside the closed sector ({sec.alpha}, {sec.beta}) of axis {j}")
    if zeta == 0:
        return np.eye(tup.dim, dtype=complex)
    return expm(zeta * tup.matrices[j])


def resolvent_product(tup, lam, zeta):
    """Product of the per-axis resolvents ``(lam_j*A_j + zeta_j*I)^{-1}``,
    multiplied in axis order (the factors commute)."""
    lam = np.atleast_1d(np.asarray(lam, dtype=complex))
    zeta = np.atleast_1d(np.asarray(zeta, dtype=complex))
    ident = np.eye(tup.dim, dtype=complex)
    x = ident
    for j in reversed(range(tup.k)):
        if abs(lam[j]) > 1e-300:
            pole = -zeta[j] / lam[j]
            dist = float(np.min(np.abs(pole - tup.eigenvalues(j))))
            if dist <= 1e-10 * (1.0 + abs(pole)):
                raise SingularFactorError(j, dist)
        elif abs(zeta[j]) <= 1e-300:
            raise SingularFactorError(j, 0.0)
        x = np.linalg.solve(lam[j] * tup.matrices[j] + zeta[j] * ident, x)
    return x


def resolvent_via_laplace(tup, j, lam, zeta0=1.0, tol=1e-10):
    """Resolvent ``(lam*I - A_j)^{-1}`` by quadrature of the semigroup
    Laplace transform along the ray of direction ``zeta0``.

    Requires ``Re(lam*zeta0)`` above the spectral abscissa along the ray,
    otherwise the integrand diverges.
    """
    lam = complex(lam)
    zeta0 = complex(zeta0)
    zeta0 /= abs(zeta0)
    h = GrowthProfile(tup).abscissa(j, float(np.angle(zeta0)))
    margin = (lam * zeta0).real - h
    if margin <= 1e-9:
        raise DivergenceError(
            f"Re(lam*zeta0)={ (lam * zeta0).real :.6g} does not exceed the "
            f"spectral abscissa {h:.6g} along the ray")
    a = tup.matrices[j]

    def f(ts):
        return np.asarray([np.exp(-t * zeta0 * lam) * expm(t * zeta0 * a) for t in ts])

    res = ray_integral(f, 0.0, 1.0, tol=tol, decay=("exp", margin))
    return zeta0 * res.value


def laplace_norm_bound(tup, j, lam, zeta0=1.0, tol=1e-10):
    """Upper bound ``|zeta0| * int exp(-t*Re(lam*zeta0)) |Exp(t*zeta0*A_j)| dt``
    for the resolvent norm, by scalar ray quadrature."""
    lam = complex(lam)
    zeta0 = complex(zeta0)
    zeta0 /= abs(zeta0)
    h = GrowthProfile(tup).abscissa(j, float(np.angle(zeta0)))
    margin = (lam * zeta0).real - h
    if margin <= 1e-9:
        raise DivergenceError("norm-bound integral diverges for these parameters")
    a = tup.matrices[j]
    r = (lam * zeta0).real

    def f(ts):
        return np.asarray([np.exp(-t * r) * opnorm(expm(t * zeta0 * a)) for t in ts],
                          dtype=complex)

    res = ray_integral(f, 0.0, 1.0, tol=tol, decay=("exp", margin))
    return abs(res.value)


def generator_from_weighted_integrals(tup, j, lam, tol=1e-10):
    """Recover ``A_j`` from the weighted orbit integrals with weight
    ``v(t) = t*exp(-lam*t)``: returns ``-C @ B^{-1}`` where
    ``B = int v(t) T(t) dt`` and ``C = int v'(t) T(t) dt``.

    ``lam`` must exceed the spectral abscissa along the positive axis.
    """
    lam = float(lam)
    h = GrowthProfile(tup).abscissa(j, 0.0)
    if lam <= h + 1e-9:
        raise DivergenceError(f"lam={lam} must exceed the spectral abscissa {h:.6g}")
    a = tup.matrices[j]
    margin = lam - h

    def orbit(ts):
        return np.asarray([expm(t * a) for t in ts])

    b = ray_integral(lambda ts: np.asarray([t * np.exp(-lam * t) for t in ts])[:, None, None]
                     * orbit(ts), 0.0, 1.0, tol=tol, decay=("exp", margin)).value
    c = ray_integral(lambda ts: np.asarray([(1.0 - lam * t) * np.exp(-lam * t) for t in ts])
                     [:, None, None] * orbit(ts), 0.0, 1.0, tol=tol,
                     decay=("exp", margin)).value
    cond = np.linalg.cond(b)
    if not np.isfinite(cond) or cond > 1e12:
        raise np.linalg.LinAlgError(f"weighted integral B is numerically singular (cond={cond:.3e})")
    return -np.linalg.solve(b.T, c.T).T


def generator_from_difference_quotient(tup, j, u, ts=None):
    """Richardson-extrapolated limit of ``(T(t)u - u)/t``.

    Returns ``(v, residual)`` where ``v`` approximates ``A_j u`` and the
    residual is the Cauchy gap of the extrapolation table.
    """
    u = np.asarray(u, dtype=complex)
    if ts is None:
        ts = 2.0 ** -np.arange(3, 13)
    ts = np.asarray(ts, dtype=float)
    if np.any(ts <= 0) or np.any(np.diff(ts) >= 0):
        raise ValueError("t-sequence must be positive decreasing")
    a = tup.matrices[j]
    quotients = [(expm(t * a) @ u - u) / t for t in ts]
    ratio = ts[0] / ts[1]
    limit, residual = richardson(quotients, ratio=ratio)
    return np.asarray(limit), residual


def generator_holomorphic(tup, j, zeta0):
    """Generator via the holomorphic-orbit quotient ``T'(zeta0) T(zeta0)^{-1}``;
    independent of the interior point ``zeta0``."""
    zeta0 = complex(zeta0)
    sec = tup.sectors.sectors[j]
    if sec.is_ray:
        raise SectorDomainError("axis has an empty open sector; no holomorphic quotient")
    if not sec.contains(zeta0, closed=False):
        raise SectorDomainError(f"zeta0={zeta0} is not strictly inside the sector")
    a = tup.matrices[j]
    e = expm(zeta0 * a)
    return np.linalg.solve(e.T, (a @ e).T).T


IN_N0 = "in_N0"
IN_N_ONLY = "in_N_only"
OUTSIDE = "outside"


def _validate_lambda(tup, lam, ps):
    for j, (dom, sec) in enumerate(zip(tup.sectors.sectors, ps.sectors)):
        lj = lam[j]
        if dom.is_ray:
            if abs(sec.alpha - dom.alpha) > 1e-12 or not sec.is_ray:
                raise SectorDomainError(
                    f"axis {j}: sector angles must equal the degenerate domain angle")
            if abs(lj.imag) > 1e-9 * (1 + abs(lj)) or lj.real < -1e-12:
                raise SectorDomainError(f"axis {j}: lambda must be a nonnegative real")
        else:
            if not (dom.alpha < sec.alpha - 1e-12 and sec.beta < dom.beta - 1e-12):
                raise SectorDomainError(
                    f"axis {j}: need domain alpha < alpha <= beta < domain beta")
            if abs(lj) > 1e-300:
                lo = dom.alpha - sec.alpha
                hi = dom.beta - sec.beta
                ang = np.angle(lj)
                shifted = (ang - lo) % (2 * np.pi)
                if not (-1e-9 <= shifted <= (hi - lo) + 1e-9):
                    raise SectorDomainError(
                        f"axis {j}: arg(lambda)={ang:.6g} outside the window "
                        f"({lo:.6g}, {hi:.6g})")


def n_set_classify(tup, lam, ps, z, tol=1e-12):
    """Classify an anchor ``z`` against the weighted-orbit boundedness sets.

    The boundedness of ``exp(t*z_j*e^{i w}) * |T_j(t*lam_j*e^{i w})|``
    reduces to the two edge directions ``w in {alpha_j, beta_j}``; with
    spectral abscissas ``h`` the bounded set uses ``Re(z_j e^{iw}) <= -h``
    and the vanishing set uses strict inequality.
    """
    lam = np.atleast_1d(np.asarray(lam, dtype=complex))
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    _validate_lambda(tup, lam, ps)
    growth = GrowthProfile(tup)
    strict = True
    weak = True
    for j, sec in enumerate(ps.sectors):
        for omega in {sec.alpha, sec.beta}:
            h = growth.abscissa(j, omega, lam[j])
            val = (z[j] * _unit(omega)).real
            if not val <= -h + tol:
                weak = False
            if not val < -h - tol:
                strict = False
    if strict and weak:
        return IN_N0
    if weak:
        return IN_N_ONLY
    return OUTSIDE


def mult_semigroup_gap(t, s, grid=10_000, refine_tol=1e-13):
    """Brute-force ``sup_{0 < x <= 1} |x**t - x**s|`` for ``0 < t < s``.

    A coarse grid locates the maximizer, golden-section refinement
    polishes it.  The stationary-point closed form is
    :func:`mult_semigroup_gap_closed_form`.
    """
    if not (0 < t < s):
        raise ValueError("need 0 < t < s")
    xs = np.linspace(0.0, 1.0, grid + 1)[1:]
    vals = np.abs(xs ** t - xs ** s)
    i = int(np.argmax(vals))
    lo = xs[max(i - 1, 0)]
    hi = xs[min(i + 1, len(xs) - 1)]

    def g(x):
        return abs(x ** t - x ** s)

    invphi = (np.sqrt(5.0) - 1.0) / 2.0
    c = hi - invphi * (hi - lo)
    d = lo + invphi * (hi - lo)
    while hi - lo > refine_tol:
        if g(c) < g(d):
            lo = c
            c = d
            d = lo + invphi * (hi - lo)
        else:
            hi = d
            d = c
            c = hi - invphi * (hi - lo)
    xstar = 0.5 * (lo + hi)
    return max(g(xstar), vals[i])


def mult_semigroup_gap_closed_form(t, s):
    """Stationary-point value ``(s-t) * t^{t/(s-t)} / s^{s/(s-t)}``."""
    if not (0 < t < s):
        raise ValueError("need 0 < t < s")
    e = s - t
    return e * t ** (t / e) / s ** (s / e)


def shift_matrix(n, t):
    """Linear-interpolation discretization of ``f(x) -> f(x - t)`` on the
    uniform n-point grid over [0, 1] (zero below the support)."""
    if n < 2:
        raise ValueError("need n >= 2 grid points")
    m = np.zeros((n, n))
    xs = np.linspace(0.0, 1.0, n)
    for i, x in enumerate(xs):
        y = x - t
        if y < 0:
            continue
        pos = y * (n - 1)
        j0 = int(np.floor(pos))
        frac = pos - j0
        m[i, j0] += 1.0 - frac
        if j0 + 1 < n and frac > 0:
            m[i, j0 + 1] += frac
    return m


def quasinilpotent_gap(n, t):
    """Operator 2-norm of ``T(t) - T(2t)`` for the discretized nilpotent
    right-shift semigroup on the n-point grid over [0, 1]."""
    if n < 64:
        raise ValueError("need n >= 64")
    if t <= 0:
        raise ValueError("need t > 0")
    return opnorm(shift_matrix(n, t) - shift_matrix(n, 2 * t))


# ---------------------------------------------------------------------------
# deterministic random banks (seeded, shared by tests and CLI scenarios)
# ---------------------------------------------------------------------------


def random_sectorial_matrix(rng, dim, re_range=(-3.0, -0.5), im_range=(-1.0, 1.0),
                            basis_spread=0.3):
    """Random diagonalizable matrix with spectrum in ``Re < re_range[1]``."""
    vals = rng.uniform(*re_range, dim) + 1j * rng.uniform(*im_range, dim)
    v = np.eye(dim) + basis_spread * (rng.standard_normal((dim, dim))
                                      + 1j * rng.standard_normal((dim, dim)))
    return v @ np.diag(vals) @ np.linalg.inv(v)


def random_commuting_tuple(rng, k, dim, sector=( -np.pi / 4, np.pi / 4),
                           re_range=(-3.0, -0.5)):
    """Commuting diagonalizable tuple sharing one random eigenbasis."""
    v = np.eye(dim) + 0.3 * (rng.standard_normal((dim, dim))
                             + 1j * rng.standard_normal((dim, dim)))
    vinv = np.linalg.inv(v)
    mats = []
    for _ in range(k):
        vals = rng.uniform(*re_range, dim) + 1j * rng.uniform(-1.0, 1.0, dim)
        mats.append(v @ np.diag(vals) @ vinv)
    return CommutingTuple(mats, [sector] * k)
