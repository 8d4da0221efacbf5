"""Contour-integral calculus for commuting tuples on admissible regions.

The central operation realizes ``F`` at the scaled tuple
``(-lam_1 A_1, ..., -lam_k A_k)`` as a distinguished-boundary integral

    (-1)^k (2*pi*i)^{-k} * Int_{dU+eps} F(zeta) prod_j (lam_j A_j + zeta_j I)^{-1} dzeta

with the per-axis orientation from ``exp(1j*(-pi/2-alpha_j))*inf`` to
``exp(1j*(pi/2-beta_j))*inf``; the sign of the prefactor is pinned by the
scalar oracle ``F(-lam*mu)``.  Bounded functions are reached through a
squared-rational quotient, and quotient classes through a witness pair.

Everything is pure; contour evaluations inherit the deterministic
reduction of the quadrature layer.
"""

from dataclasses import dataclass

import numpy as np

from .geometry import AdmissibleRegion, AxisRegion, GeometryError, _unit, make_region
from .quadrature import (ContourQuadrature, adaptive_contour, initial_radius,
                         resolvent_contour_value, tensor_sum)
from .semigroups import (GrowthProfile, _validate_lambda, opnorm)
from .semigroups import IN_N0, n_set_classify


class AdmissibilityError(ValueError):
    """The region fails an admissibility requirement for the tuple."""


class DenseRangeError(np.linalg.LinAlgError):
    """The image of the auxiliary quotient function is numerically singular,
    against the dense-range expectation; reported instead of regularized."""


@dataclass(frozen=True)
class HoloFunction:
    """Holomorphic integrand with decay certificates.

    ``decay = (c, p)`` certifies ``|F(sigma)| <= c * prod (1+|sigma_j|)^-p``;
    ``exp_rate`` optionally certifies exponential decay along the contour
    directions.  ``witness`` carries the quotient pair for the Smirnov
    class: a bounded ``G`` claimed invertible-approximable with ``F*G``
    bounded.
    """

    fun: object
    klass: str = "H1"
    decay: tuple = None
    exp_rate: float = None
    witness: object = None
    label: str = "F"

    def __call__(self, pts):
        return np.asarray(self.fun(np.atleast_2d(np.asarray(pts, dtype=complex))),
                          dtype=complex)

    def at(self, point):
        return complex(self(np.asarray(point, dtype=complex)[None, :])[0])


def product_function(f, g, label=None):
    decay = None
    if f.decay is not None and g.decay is not None:
        decay = (f.decay[0] * g.decay[0], f.decay[1] + g.decay[1])
    elif g.decay is not None:
        decay = g.decay
    elif f.decay is not None:
        decay = f.decay
    rate = None
    for r in (f.exp_rate, g.exp_rate):
        if r is not None:
            rate = r if rate is None else max(rate, r)
    return HoloFunction(lambda pts: f(pts) * g(pts), "H1", decay, rate, None,
                        label or f"{f.label}*{g.label}")


def constant_function(k, value, label=None):
    return HoloFunction(lambda pts: np.full(pts.shape[0], complex(value)),
                        "Hinf", (abs(value) + 1e-300, 0.0), None, None,
                        label or f"const({value})")


def inverse_square(k, shifts, label=None):
    """``prod_j (zeta_j + s_j)^{-2}``; the workhorse decaying test function."""
    shifts = np.atleast_1d(np.asarray(shifts, dtype=complex))

    def fun(pts):
        out = np.ones(pts.shape[0], dtype=complex)
        for j in range(k):
            out = out / (pts[:, j] + shifts[j]) ** 2
        return out

    return HoloFunction(fun, "H1", (1.0, 2.0), None, None,
                        label or f"invsq({shifts.tolist()})")


def rotated_inverse_square(k, angles, shifts, label=None):
    """``prod_j (zeta_j e^{i theta_j} + s_j)^{-2}`` (poles pushed behind the
    rotated half-planes); used as the bounded-function quotient."""
    shifts = np.atleast_1d(np.asarray(shifts, dtype=complex))
    angles = np.atleast_1d(np.asarray(angles, dtype=float))

    def fun(pts):
        out = np.ones(pts.shape[0], dtype=complex)
        for j in range(k):
            out = out / (pts[:, j] * _unit(angles[j]) + shifts[j]) ** 2
        return out

    return HoloFunction(fun, "H1", (1.0, 2.0), None, None, label or "rot_invsq")


def exponential_function(k, nu, axis=0, shifts=None, label=None):
    """``exp(-nu*zeta_axis)`` optionally damped by ``prod (zeta_j+s_j)^{-1}``."""
    nu = complex(nu)

    def fun(pts):
        out = np.exp(-nu * pts[:, axis])
        if shifts is not None:
            for j in range(k):
                out = out / (pts[:, j] + shifts[j])
        return out

    p = 1.0 if shifts is not None else 0.0
    return HoloFunction(fun, "Hinf", (1.0, p), None, None,
                        label or f"exp(-{nu} z{axis})")


def monomial(k, axis=0):
    """``-zeta_axis``, the projection integrand of the quotient class."""

    def fun(pts):
        return -pts[:, axis]

    return HoloFunction(fun, "Smirnov", None, None, None, f"-z{axis}")


# ---------------------------------------------------------------------------
# admissibility
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class AdmissibilityReport:
    region_ok: bool
    anchor_class: str
    spectrum_inside: bool
    margins: tuple
    detail: str = ""

    @property
    def passed(self):
        return self.region_ok and self.anchor_class == IN_N0 and self.spectrum_inside


def check_admissible_for(region, tup, lam, tol=1e-9):
    """Report whether ``region`` is admissible for the scaled tuple: the
    region geometry is valid, its vertex anchors a vanishing weighted
    orbit, and ``-lam_j * spec(A_j)`` lies inside every axis with positive
    margin."""
    lam = np.atleast_1d(np.asarray(lam, dtype=complex))
    detail = []
    region_ok = True
    try:
        _validate_lambda(tup, lam, region.sectors)
    except Exception as exc:  # report-valued, never raises
        region_ok = False
        detail.append(str(exc))
    try:
        anchor_class = n_set_classify(tup, lam, region.sectors, region.vertex)
    except Exception as exc:
        anchor_class = "invalid"
        detail.append(str(exc))
    margins = []
    spectrum_inside = True
    for j in range(region.k):
        ax = region.axes[j]
        worst = np.inf
        for mu in tup.eigenvalues(j):
            point = -lam[j] * mu
            if ax.contains(point, closed=False, tol=tol):
                worst = min(worst, ax.boundary_distance(point))
            else:
                worst = min(worst, -ax.boundary_distance(point))
                spectrum_inside = False
        margins.append(float(worst))
    return AdmissibilityReport(region_ok, anchor_class, spectrum_inside,
                               tuple(margins), "; ".join(detail))


def shifted_region(region, eps):
    eps = np.atleast_1d(np.asarray(eps, dtype=complex))
    return AdmissibleRegion([
        AxisRegion(ax.alpha, ax.beta, ax.z + eps[j], ax.theta)
        for j, ax in enumerate(region.axes)
    ])


def default_region(tup, lam, sectors, margin=1.0):
    """Pure dual-cone region admissible for the scaled tuple: the vertex is
    pushed down the anti-bisector until the weighted orbit vanishes."""
    from .functionals import anchor_for

    if not hasattr(sectors, "sectors"):
        from .geometry import ProductSector

        sectors = ProductSector(sectors)
    z = anchor_for(tup, lam, sectors, None, strict=True, margin=margin)
    return make_region([s.alpha for s in sectors.sectors],
                       [s.beta for s in sectors.sectors], z)


# ---------------------------------------------------------------------------
# the calculus
# ---------------------------------------------------------------------------


def _radius_floor(region, eps, tup=None, lam=None):
    """Truncation must clear the shifted excisions and, when a tuple is
    given, the scaled spectra (the adaptive doubling would recover from a
    miss, but only within its round budget)."""
    floor = 0.0
    eps = np.atleast_1d(np.asarray(eps, dtype=complex))
    for j, ax in enumerate(region.axes):
        far = max(abs(ax.z + eps[j] + t) for t in ax.theta)
        floor = max(floor, 1.3 * far + 1.0)
    if tup is not None:
        lam = np.atleast_1d(np.asarray(lam, dtype=complex))
        for j in range(tup.k):
            floor = max(floor, 2.0 * float(np.max(np.abs(lam[j] * tup.eigenvalues(j)))) + 1.0)
    return floor


def _contour_radius(F, tup, lam, tol):
    if F.exp_rate is not None and F.exp_rate > 0:
        return initial_radius(("exp", F.exp_rate), tol)
    if F.decay is None:
        return 16.0
    c, p = F.decay
    # the resolvent product contributes one extra power per axis
    return initial_radius(("alg", max(c, 1.0), p + 1.0), tol)


def functional_calculus(F, tup, lam, region, eps, tol=1e-9, max_rounds=8):
    """Distinguished-boundary realization of ``F`` at the scaled tuple.

    Requires admissibility of both the region and its ``eps``-shift, and
    an integrable decay certificate on ``F``.  The result is independent
    of the admissible ``(region, eps)`` choice within twice the
    tolerance.
    """
    lam = np.atleast_1d(np.asarray(lam, dtype=complex))
    eps = np.atleast_1d(np.asarray(eps, dtype=complex))
    if F.decay is None and F.exp_rate is None:
        raise AdmissibilityError(f"{F.label} carries no decay certificate")
    if F.decay is not None and F.decay[1] < 2.0 - 1e-12 and not F.exp_rate:
        raise AdmissibilityError(
            f"{F.label} decay power {F.decay[1]} is below the integrable threshold 2")
    for tag, reg in (("region", region), ("shifted region", shifted_region(region, eps))):
        report = check_admissible_for(reg, tup, lam)
        if not report.passed:
            raise AdmissibilityError(
                f"{tag} is not admissible for the scaled tuple: "
                f"anchor={report.anchor_class}, spectrum_inside={report.spectrum_inside}, "
                f"margins={report.margins} {report.detail}")
    radius = max(_contour_radius(F, tup, lam, tol), _radius_floor(region, eps, tup, lam))
    cq = ContourQuadrature.from_region(region, eps, R=radius)
    pref = (-1.0) ** tup.k * (2j * np.pi) ** -tup.k
    res = adaptive_contour(
        lambda c: resolvent_contour_value(F, tup.matrices, lam, c),
        cq, tol, max_rounds)
    return pref * res.value


def _sample_points(region, n_boundary=40):
    pts = []
    for j, ax in enumerate(region.axes):
        radius = 4.0 * (abs(ax.z) + ax.excision_radius + 1.0)
        pts.append(ax.sample_boundary(radius, per_piece=max(4, n_boundary // 4)))
    grids = []
    mids = [_unit(-0.5 * (ax.alpha + ax.beta)) for ax in region.axes]
    for shift in (0.3, 1.0, 3.0, 10.0):
        row = []
        for j, ax in enumerate(region.axes):
            row.append(np.asarray(pts[j]) + shift * mids[j])
        m = min(len(r) for r in row)
        grids.append(np.stack([r[:m] for r in row], axis=1))
    return np.concatenate(grids, axis=0)


def sup_on_region(F, region):
    """Sample-based sup of ``|F|`` over the region (boundary-biased grid)."""
    pts = _sample_points(region)
    keep = np.array([region.contains(p) for p in pts])
    if not keep.any():
        raise GeometryError("no interior sample points found")
    vals = np.abs(F(pts[keep]))
    if not np.all(np.isfinite(vals)):
        raise AdmissibilityError(f"{F.label} is not finite on the region sample")
    return float(vals.max())


def _quotient_denominator(tup, lam, region):
    """Squared-rational ``G`` along the bisector angles with shifts
    ``1 + max(growth abscissa, vertex offset)``; its poles clear the region."""
    lam = np.atleast_1d(np.asarray(lam, dtype=complex))
    growth = GrowthProfile(tup)
    angles = []
    shifts = []
    for j, ax in enumerate(region.axes):
        theta = 0.5 * (ax.alpha + ax.beta)
        s = 1.0 + max(growth.abscissa(j, theta, lam[j]),
                      -(ax.z * _unit(theta)).real)
        angles.append(theta)
        shifts.append(s)
    g = rotated_inverse_square(region.k, angles, shifts, label="G_quotient")
    return g


def functional_calculus_hinf(F, tup, lam, region, tol=1e-9, eps=None, max_rounds=8):
    """Extension of the calculus to bounded ``F`` by the quotient
    ``R_F = calc(F*G) * calc(G)^{-1}`` with the squared-rational ``G``.

    Raises :class:`DenseRangeError` when the image of ``G`` is numerically
    singular instead of regularizing it."""
    sup_on_region(F, region)  # bounded-sample check
    lam = np.atleast_1d(np.asarray(lam, dtype=complex))
    if eps is None:
        eps = _default_eps(region)
    g = _quotient_denominator(tup, lam, region)
    m_fg = functional_calculus(product_function(F, g), tup, lam, region, eps,
                               tol, max_rounds)
    m_g = functional_calculus(g, tup, lam, region, eps, tol, max_rounds)
    cond = np.linalg.cond(m_g)
    if not np.isfinite(cond) or cond > 1e10:
        raise DenseRangeError(
            f"quotient image is numerically singular (cond={cond:.3e})")
    return np.linalg.solve(m_g.T, m_fg.T).T


def functional_calculus_smirnov(F, tup, lam, region, tol=1e-9, eps=None,
                                max_rounds=8):
    """Quotient-class extension through the witness pair carried by ``F``:
    ``R_F = hinf(F*Gw) * hinf(Gw)^{-1}``."""
    if F.witness is None:
        raise AdmissibilityError(f"{F.label} carries no witness pair")
    gw = F.witness
    fg = HoloFunction(lambda pts: F(pts) * gw(pts), "Hinf", gw.decay, gw.exp_rate,
                      None, f"{F.label}*{gw.label}")
    # the witness must keep the product bounded on a region sample
    sup_on_region(fg, region)
    m_fg = functional_calculus_hinf(fg, tup, lam, region, tol, eps, max_rounds)
    m_g = functional_calculus_hinf(gw, tup, lam, region, tol, eps, max_rounds)
    cond = np.linalg.cond(m_g)
    if not np.isfinite(cond) or cond > 1e10:
        raise DenseRangeError(
            f"witness image is numerically singular (cond={cond:.3e})")
    return np.linalg.solve(m_g.T, m_fg.T).T


def projection_witness(tup, lam, region, axis=0, margin=2.0):
    """Witness pair for the projection integrand ``-zeta_axis``: the
    squared-rational factor with shift ``margin + growth abscissa`` along
    the bisector of the given axis."""
    lam = np.atleast_1d(np.asarray(lam, dtype=complex))
    growth = GrowthProfile(tup)
    ax = region.axes[axis]
    theta = 0.5 * (ax.alpha + ax.beta)
    nu0 = margin + max(growth.abscissa(axis, theta, lam[axis]),
                       -(ax.z * _unit(theta)).real)

    def fun(pts):
        return 1.0 / (pts[:, axis] * _unit(theta) + nu0) ** 2

    return HoloFunction(fun, "Hinf", (1.0, 0.0), None, None,
                        label=f"proj_witness(nu0={nu0:.3g})")


def projection_function(tup, lam, region, axis=0):
    f = monomial(region.k, axis)
    return HoloFunction(f.fun, "Smirnov", None, None,
                        projection_witness(tup, lam, region, axis), f.label)


def _default_eps(region, scale=0.25):
    return np.array([scale * _unit(-0.5 * (ax.alpha + ax.beta)) for ax in region.axes])


# ---------------------------------------------------------------------------
# spectral mapping
# ---------------------------------------------------------------------------


class NonDiagonalizableError(np.linalg.LinAlgError):
    pass


def joint_eigensystem(tup, tol=1e-8):
    """Joint eigenbasis of a commuting diagonalizable tuple via a fixed
    generic linear combination."""
    coeffs = np.array([1.0 + 0.618 * j + 0.1j * (j + 1) for j in range(tup.k)])
    m = sum(c * a for c, a in zip(coeffs, tup.matrices))
    _, v = np.linalg.eig(m)
    cond = np.linalg.cond(v)
    if not np.isfinite(cond) or cond > 1e10:
        raise NonDiagonalizableError(f"combination eigenbasis has cond {cond:.3e}")
    vinv = np.linalg.inv(v)
    mus = []
    for a in tup.matrices:
        d = vinv @ a @ v
        off = opnorm(d - np.diag(np.diag(d)))
        if off > tol * max(opnorm(a), 1.0):
            raise NonDiagonalizableError(
                f"tuple is not jointly diagonalizable (offdiagonal {off:.3e})")
        mus.append(np.diag(d).copy())
    return mus, v, vinv


@dataclass(frozen=True)
class SpectralReport:
    max_eig_rel_err: float
    offdiagonal: float
    matrix_rel_err: float


def spectral_map_check(F, tup, lam, region, tol=1e-9, computed=None):
    """Compare the calculus against the eigendecomposition oracle
    ``V diag(F(-lam o mu)) V^{-1}`` for a diagonalizable tuple."""
    lam = np.atleast_1d(np.asarray(lam, dtype=complex))
    mus, v, vinv = joint_eigensystem(tup)
    pts = np.stack([-lam[j] * mus[j] for j in range(tup.k)], axis=1)
    fvals = F(pts)
    oracle = v @ np.diag(fvals) @ vinv
    if computed is None:
        computed = functional_calculus(F, tup, lam, region, _default_eps(region), tol)
    d = vinv @ computed @ v
    eig_err = float(np.max(np.abs(np.diag(d) - fvals) / np.maximum(np.abs(fvals), 1e-300)))
    off = opnorm(d - np.diag(np.diag(d)))
    mat_err = opnorm(computed - oracle) / max(opnorm(oracle), 1e-300)
    return SpectralReport(eig_err, off, float(mat_err))


# ---------------------------------------------------------------------------
# Hardy-type diagnostics
# ---------------------------------------------------------------------------


def boundary_abs_integral(F, region, eps, tol=1e-7, max_rounds=8):
    """``Int |F| |d sigma|`` over the shifted distinguished boundary."""
    radius = max(_abs_radius(F, tol), _radius_floor(region, eps))
    cq = ContourQuadrature.from_region(region, eps, R=radius)

    def value_of(c):
        def g(pts):
            return np.abs(F(pts)).astype(complex)

        abs_cq = _abs_weights(c)
        return tensor_sum(g, abs_cq)

    return abs(adaptive_contour(value_of, cq, tol, max_rounds).value)


def _abs_radius(F, tol):
    if F.exp_rate is not None and F.exp_rate > 0:
        return initial_radius(("exp", F.exp_rate), tol)
    if F.decay is None or F.decay[1] < 2.0 - 1e-12:
        raise AdmissibilityError("norm integral needs a decay certificate with p >= 2")
    return initial_radius(("alg", max(F.decay[0], 1.0), F.decay[1]), tol)


def _abs_weights(cq):
    from dataclasses import replace

    axes = tuple(
        type(ax)(ax.nodes, np.abs(ax.weights).astype(complex), ax.segments)
        for ax in cq.axes
    )
    return replace(cq, axes=axes)


def default_eps_grid(region, directions=8, moduli=None):
    """Dual-cone shift grid: per-axis directions swept uniformly inside the
    open dual sector, scaled by the given moduli."""
    moduli = 2.0 ** np.arange(-3, 3) if moduli is None else np.asarray(moduli, float)
    grid = []
    for i in range(directions):
        eps_dir = []
        for ax in region.axes:
            lo = -np.pi / 2 - ax.alpha
            hi = np.pi / 2 - ax.beta
            frac = (i + 1.0) / (directions + 1.0)
            eps_dir.append(_unit(lo + frac * (hi - lo)))
        for m in moduli:
            grid.append(m * np.asarray(eps_dir))
    return grid


def h1_norm(F, region, eps_grid=None, tol=1e-7):
    """Max of the boundary absolute integrals over the shift grid; a lower
    bound of the true sup, reported as such."""
    if eps_grid is None:
        eps_grid = default_eps_grid(region)
    best = 0.0
    for eps in eps_grid:
        best = max(best, boundary_abs_integral(F, region, eps, tol))
    return best


def pointwise_bound_check(F, region, samples, norm_lower=None, tol=1e-7):
    """Worst ratio ``|F(zeta)| * prod dist(zeta_j, dU_j) * (2 pi)^k / norm``
    over the samples; at most 1 + slack when the norm bound is sharp."""
    if norm_lower is None:
        norm_lower = h1_norm(F, region, tol=tol)
    k = region.k
    ratios = []
    for p in samples:
        p = np.atleast_1d(np.asarray(p, dtype=complex))
        if not region.contains(p):
            raise GeometryError(f"sample {p} is not inside the region")
        dist = 1.0
        for j in range(k):
            dist *= region.axes[j].boundary_distance(p[j])
        val = abs(complex(F(p[None, :])[0]))
        ratios.append(val * dist * (2 * np.pi) ** k / norm_lower)
    return max(ratios), ratios


# ---------------------------------------------------------------------------
# outerness diagnostics (grid evidence only, never a certificate)
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class WitnessSequence:
    fns: tuple


@dataclass(frozen=True)
class OuterReport:
    domination_ok: bool
    max_domination_violation: float
    converges: bool
    final_max_deviation: float
    min_witness_modulus: float

    @property
    def passed(self):
        return self.domination_ok and self.converges


def strongly_outer_check(F, witness, grid, boundary_grid=None, slack=1e-12,
                         decrease_slack=1.05):
    """Check the domination and quotient-convergence conditions of the
    witness sequence on the grid.

    This is grid evidence, not a proof: the report states consistency on
    the sampled points only.  The invertibility proxy is the minimum
    witness modulus on a boundary-approaching grid.
    """
    grid = np.asarray(grid)
    fvals = np.asarray(F(grid))
    max_viol = 0.0
    devs = []
    for fn in witness.fns:
        wvals = np.asarray(fn(grid))
        max_viol = max(max_viol, float(np.max(np.abs(fvals) - np.abs(wvals))))
        devs.append(np.abs(fvals / wvals - 1.0))
    domination_ok = max_viol <= slack * (1.0 + float(np.abs(fvals).max()))
    converges = True
    for a, b in zip(devs[:-1], devs[1:]):
        if np.any(b > a * decrease_slack + 1e-14):
            converges = False
    # demand clear progress toward 1, not an absolute threshold
    converges = converges and bool(
        np.max(devs[-1]) <= 0.5 * np.max(devs[0]) + 1e-14)
    bgrid = grid if boundary_grid is None else np.asarray(boundary_grid)
    minmod = min(float(np.min(np.abs(np.asarray(fn(bgrid))))) for fn in witness.fns)
    return OuterReport(domination_ok, max_viol, converges, float(np.max(devs[-1])),
                       minmod)


def outer_diagnostic_disk(f, r_grid=None, t_grid=None):
    """Circle means of ``log|f|`` per radius plus the boundary mean.

    For an outer-type function the radial means approach the boundary
    mean; a singular factor keeps them strictly below (diagnostic only).
    Raises when a zero of ``f`` is detected on the grid.
    """
    r_grid = np.linspace(0.05, 0.95, 10) if r_grid is None else np.asarray(r_grid, float)
    t_grid = (np.arange(720) + 0.5) * (2 * np.pi / 720) if t_grid is None \
        else np.asarray(t_grid, float)
    means = []
    for r in r_grid:
        vals = np.abs(f(r * np.exp(1j * t_grid)))
        if np.any(vals < 1e-300):
            raise ZeroDivisionError("zero of f detected on the sampling grid")
        means.append(float(np.mean(np.log(vals))))
    bvals = np.abs(f(np.exp(1j * t_grid)))
    if np.any(bvals < 1e-300):
        raise ZeroDivisionError("zero of f detected on the boundary grid")
    boundary_mean = float(np.mean(np.log(bvals)))
    return np.asarray(means), boundary_mean


def interior_cauchy_value(F, region, eps, point, tol=1e-9):
    """Reproduce ``F(point)`` from its boundary values on the shifted
    distinguished boundary (the interior reproduction identity)."""
    point = np.atleast_1d(np.asarray(point, dtype=complex))
    radius = max(_abs_radius(F, tol), _radius_floor(region, eps))
    cq = ContourQuadrature.from_region(region, eps, R=radius)

    def g(pts):
        out = F(pts)
        for j in range(region.k):
            out = out / (point[j] - pts[:, j])
        return out

    pref = (2j * np.pi) ** -region.k
    return pref * adaptive_contour(lambda c: tensor_sum(g, c), cq, tol).value


def boundary_contour_integral(F, region, eps, tol=1e-9):
    """Plain ``Int F(sigma) d sigma`` over the shifted boundary (vanishes
    for integrable holomorphic integrands)."""
    radius = max(_abs_radius(F, tol), _radius_floor(region, eps))
    cq = ContourQuadrature.from_region(region, eps, R=radius)
    return adaptive_contour(lambda c: tensor_sum(F, c), cq, tol).value


def resolvent_sup_on_contour(tup, lam, region, eps, R=64.0):
    """Sup of the resolvent-product norm over the (coarsely sampled)
    shifted boundary; the constant in the boundedness estimate."""
    lam = np.atleast_1d(np.asarray(lam, dtype=complex))
    cq = ContourQuadrature.from_region(region, eps, R=R, n_per_unit=2.0)
    sup = 1.0
    for j in range(tup.k):
        nodes = cq.axes[j].nodes
        from ._kernels import resolvent_stack

        stack = resolvent_stack(tup.matrices[j], lam[j], nodes)
        sup_axis = max(opnorm(stack[i]) for i in range(len(nodes)))
        sup = sup * sup_axis
    return sup
