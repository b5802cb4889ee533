"""Quasi-periodic paths in the classical groups and explicit local sections.

A path element is a finite product

    alpha(t) = exp(t xi_1) ... exp(t xi_m) gamma(t)

of one-parameter factors and a polynomial loop part.  Such paths satisfy the
quasi-periodicity alpha(t+1) alpha(t)^{-1} = const (checked at construction),
and project to the group by alpha -> alpha(1) alpha(0)^{-1}.  The section
constructors build, for a group element near a base point, a path element in
the fibre above it:

* un_section: the branch-log path exp(t log_s g) over the set where no
  eigenvalue of g sits on the cut -e^s;
* su_section: the same path corrected by a rank-one determinant twist so the
  whole path stays special unitary;
* so_section: for special orthogonal targets, a two-factor path built from a
  spectral split at real part r, a transported unitary structure J_h on the
  low block and the principal log of eps(h) = h exp(-pi J_h).

Membership of a path in the polynomial class is certified numerically: the
quotient of the path by the central-log path of its projection must be a
trigonometric polynomial of the predicted degree.
"""

import numpy as np

from .laurent import (
    MatrixLoop,
    SampledLoop,
    fourier_project,
    laurent_eval,
    polynomiality_residual,
)
from .spectral import (
    block_structure,
    central_log,
    check_skew,
    check_unitary,
    clustered_eig,
    exp_skew,
    log_branch,
    one_parameter_path,
    so_log,
    spectral_radius,
)

PERIODICITY_TOL = 1e-9
CONDITION_BOUND = 1e6
CERT_GUARD = 4


class PathElement:
    """Product of one-parameter exponential factors and an optional loop part."""

    def __init__(self, factors, loop=None, group="U", dim=None, check=True):
        factors = [check_skew(f) for f in factors]
        if dim is None:
            if factors:
                dim = factors[0].shape[0]
            elif loop is not None:
                dim = loop.dim
            else:
                raise ValueError("cannot infer dimension")
        for f in factors:
            if f.shape != (dim, dim):
                raise ValueError("factor dimension mismatch")
        if loop is not None and loop.dim != dim:
            raise ValueError("loop part dimension mismatch")
        if group not in ("U", "SU", "SO"):
            raise ValueError(f"unknown group tag {group!r}")
        self.dim = dim
        self.group = group
        self.factors = factors
        self.loop = loop
        if check:
            err = self.periodicity_defect()
            if err > PERIODICITY_TOL:
                raise ValueError(f"path is not quasi-periodic (defect {err:.3e})")

    def eval(self, ts):
        """Values alpha(t) at scalar or array times."""
        scalar = np.isscalar(ts) or np.asarray(ts).ndim == 0
        ts = np.atleast_1d(np.asarray(ts, dtype=float))
        out = np.broadcast_to(np.eye(self.dim, dtype=complex), (ts.size, self.dim, self.dim)).copy()
        for f in self.factors:
            out = np.einsum("tij,tjk->tik", out, one_parameter_path(f, ts))
        if self.loop is not None:
            out = np.einsum("tij,tjk->tik", out, laurent_eval(self.loop, ts))
        return out[0] if scalar else out

    def periodicity_defect(self, points=16):
        ts = np.arange(points) / points
        low = self.eval(ts)
        high = self.eval(ts + 1.0)
        const = high[0] @ np.linalg.inv(low[0])
        return float(np.max(np.linalg.norm(high - np.einsum("ij,tjk->tik", const, low), axis=(1, 2))))


def eval_path(p, t):
    return p.eval(t)


def project_path(p):
    """alpha(1) alpha(0)^{-1}; equals the product of exp(xi_i) for loop parts."""
    a0 = p.eval(0.0)
    a1 = p.eval(1.0)
    return a1 @ np.linalg.inv(a0)


def act_group(p, g, conjugate=False):
    """Left multiplication (or conjugation) of a path element by a group element.

    Both actions replace each factor by g xi g^{-1}; the loop part is carried
    to g gamma (resp. g gamma g^{-1}).  Under either action the projection
    transforms by conjugation.
    """
    g = check_unitary(g)
    g_inv = g.conj().T
    factors = [g @ f @ g_inv for f in p.factors]
    loop = p.loop
    if loop is None:
        loop = MatrixLoop(dim=p.dim, coeffs={0: np.eye(p.dim)})
    coeffs = {}
    for k, ak in loop.coeffs.items():
        coeffs[k] = g @ ak @ g_inv if conjugate else g @ ak
    return PathElement(factors, loop=MatrixLoop(dim=p.dim, coeffs=coeffs), group=p.group)


def path_group_residual(p, samples=256):
    """Max distance of path values from the tagged group over a sample grid."""
    vals = p.eval(np.arange(samples) / samples)
    eye = np.eye(p.dim)
    res = np.linalg.norm(np.einsum("tji,tjk->tik", vals.conj(), vals) - eye, axis=(1, 2))
    if p.group in ("SU", "SO"):
        res = res + np.abs(np.linalg.det(vals) - 1.0)
    if p.group == "SO":
        res = res + np.linalg.norm(vals.imag, axis=(1, 2))
    return float(res.max())


def _grid_for_degree(degree, grid):
    while degree >= grid // 4:
        grid *= 2
    return grid


def fiber_certificate(p, grid=1024):
    """Polynomiality certificate for a path element.

    Divides the path by the central-log path of its projection and measures
    how far the quotient loop is from a trigonometric polynomial of the
    predicted degree.  Returns (quotient MatrixLoop, residual, degree).
    """
    zeta = central_log(project_path(p))
    radii = [spectral_radius(zeta)] + [spectral_radius(f) for f in p.factors]
    degree = int(np.ceil(max(radii) / (2.0 * np.pi))) + CERT_GUARD
    if p.loop is not None:
        degree += p.loop.degree
    grid = _grid_for_degree(degree, grid)
    ts = np.arange(grid) / grid
    vals = np.einsum("tij,tjk->tik", one_parameter_path(-zeta, ts), p.eval(ts))
    sampled = SampledLoop(values=vals)
    quotient, _ = fourier_project(sampled, degree)
    return quotient, polynomiality_residual(sampled, degree), degree


def path_fiber_quotient(a, b, grid=1024):
    """Quotient loop t -> a(t)^{-1} b(t) of two paths in a common fibre.

    Requires matching projections (tolerance 1e-9).  Returns the Fourier
    projection of the quotient and its normalized residual; a small residual
    certifies that the two paths differ by a polynomial loop.
    """
    gap = np.linalg.norm(project_path(a) - project_path(b))
    if gap > PERIODICITY_TOL:
        raise ValueError(f"paths project to different group elements (gap {gap:.3e})")
    radii = [spectral_radius(f) for f in a.factors] + [spectral_radius(f) for f in b.factors]
    degree = int(np.ceil(sum(radii) / (2.0 * np.pi))) + CERT_GUARD
    for part in (a.loop, b.loop):
        if part is not None:
            degree += part.degree
    grid = _grid_for_degree(degree, grid)
    ts = np.arange(grid) / grid
    vals = np.linalg.solve(a.eval(ts), b.eval(ts))
    sampled = SampledLoop(values=vals)
    quotient, _ = fourier_project(sampled, degree)
    return quotient, polynomiality_residual(sampled, degree)


def _smoothstep(x, plateau=0.05):
    """C-infinity step: 0 for x <= plateau, 1 for x >= 1 - plateau."""
    x = np.asarray(x, dtype=float)
    u = np.clip((x - plateau) / (1.0 - 2.0 * plateau), 0.0, 1.0)

    def bump(v):
        out = np.zeros_like(v)
        pos = v > 0
        out[pos] = np.exp(-1.0 / v[pos])
        return out

    num = bump(u)
    den = num + bump(1.0 - u)
    return num / den


def smooth_section(g, h, grid=1024):
    """A smooth quasi-periodic path from the identity-based log path of g to h.

    First half: exp(2 rho(t) xi) with exp(xi) = g and rho a smooth surjection
    of [0, 1/2] onto itself, flat near its endpoints.  Second half: the
    exponential chart at g, g exp(2 rho(t - 1/2) log_0(g^{-1} h)).  The result
    passes through g at t = 1/2, reaches h at t = 1, and is flat (hence C^1)
    at both junctions.
    """
    g = np.asarray(g)
    h = np.asarray(h)
    real_case = np.max(np.abs(np.asarray(g, dtype=complex).imag)) < 1e-12 and np.max(np.abs(np.asarray(h, dtype=complex).imag)) < 1e-12
    if real_case:
        xi = so_log(np.asarray(g, dtype=float)).astype(complex)
    else:
        xi = central_log(g)
    step = check_unitary(g).conj().T @ h
    delta = log_branch(step, 0.0)  # rejects h outside the chart (eigenvalue at -1)
    if real_case:
        if np.max(np.abs(delta.imag)) > 1e-9:
            raise ValueError("chart log failed to be real for real inputs")
        delta = delta.real.astype(complex)
    ts = np.arange(grid) / grid
    first = ts < 0.5
    rho = 0.5 * _smoothstep(2.0 * np.where(first, ts, ts - 0.5))
    vals = np.empty((grid, g.shape[0], g.shape[0]), dtype=complex)
    vals[first] = one_parameter_path(xi, 2.0 * rho[first])
    vals[~first] = np.einsum("ij,tjk->tik", np.asarray(g, dtype=complex), one_parameter_path(delta, 2.0 * rho[~first]))
    return SampledLoop(values=vals)


def junction_mismatch(s):
    """Max one-sided derivative gap of a sampled path at t = 1/2 and the seam.

    Uses second-order one-sided finite differences; the periodic extension
    beyond t = 1 is alpha(1) alpha(0)^{-1} alpha(t - 1).
    """
    vals = s.values
    n_s = vals.shape[0]
    h = 1.0 / n_s
    mid = n_s // 2

    def left(i):
        return (3.0 * vals[i] - 4.0 * vals[i - 1] + vals[i - 2]) / (2.0 * h)

    def right(i):
        return (-3.0 * vals[i] + 4.0 * vals[(i + 1) % n_s] - vals[(i + 2) % n_s]) / (2.0 * h)

    gap_mid = np.linalg.norm(left(mid) - right(mid))
    # seam: alpha'(1-) against monodromy * alpha'(0+); the flat plateau makes
    # alpha(1) equal to the last sample
    deriv_right = vals[-1] @ np.linalg.inv(vals[0]) @ right(0)
    gap_seam = np.linalg.norm(left(n_s - 1) - deriv_right)
    return float(max(gap_mid, gap_seam))


def un_section(s, g):
    """Single-factor section exp(t log_s g) over the branch domain of s."""
    return PathElement([log_branch(g, s)], group="U")


def su_section(s, g, v):
    """Determinant-corrected section of the special unitary group.

    Factors are [log_s g, -(tr log_s g) v v*]; the second factor evaluates to
    the rank-one twist that multiplies v by det(exp(-t log_s g)), keeping the
    determinant of the whole path at 1.
    """
    g = check_unitary(g)
    if abs(np.linalg.det(g) - 1.0) > 1e-8:
        raise ValueError("input is not special unitary")
    v = np.asarray(v, dtype=complex).reshape(-1)
    if abs(np.linalg.norm(v) - 1.0) > 1e-10:
        raise ValueError("twist vector must be a unit vector")
    xi = log_branch(g, s)
    trace = np.trace(xi)
    k = trace / (2j * np.pi)
    if abs(k - round(k.real)) > 1e-6:
        raise ValueError("trace of the branch log is not in 2 pi i Z; not special unitary")
    twist = -trace * np.outer(v, v.conj())
    return PathElement([xi, twist], group="SU")


def so_spectral_split(h, r):
    """Orthogonal projectors onto the eigenvalue real-part split at abscissa r.

    Returns (projector_low, projector_high) for the sums of eigenspaces with
    Re(eigenvalue) < r and > r.  Both are real symmetric, h-invariant, and the
    low projector has even rank.
    """
    arr = np.asarray(h, dtype=float)
    check_unitary(arr)
    if not -1.0 <= r <= 1.0:
        raise ValueError("split abscissa must lie in [-1, 1]")
    decomp = clustered_eig(arr)
    if np.min(np.abs(decomp.values.real - r)) <= 1e-8:
        raise ValueError("an eigenvalue has real part at the split abscissa")
    n = arr.shape[0]
    low = np.zeros((n, n), dtype=complex)
    for cluster in decomp.clusters:
        if decomp.cluster_value(cluster).real < r:
            low += decomp.projector(cluster)
    if np.max(np.abs(low.imag)) > 1e-9:
        raise ValueError("low projector failed to be real")
    low = low.real
    rank = int(round(np.trace(low)))
    if rank % 2 != 0:
        raise ValueError("low block has odd rank; input is not special orthogonal")
    return low, np.eye(n) - low


def _range_basis(projector):
    """Canonically ordered real orthonormal basis of the range of a projector."""
    u, sing, _ = np.linalg.svd(projector)
    cols = u[:, sing > 0.5]
    if cols.shape[1] == 0:
        return cols
    from .spectral import _canonical_order

    return _canonical_order(cols)


def so_section(r, g, h, return_structure=False):
    """Two-factor section of the special orthogonal group around the base point g.

    The unitary structure on the low block of h is the polar transport of the
    canonical block structure on the low block of g; the path is
    exp(t log_0(eps(h))) exp(t pi J_h) with eps(h) = h exp(-pi J_h).
    """
    g = np.asarray(g, dtype=float)
    h = np.asarray(h, dtype=float)
    low_g, _ = so_spectral_split(g, r)
    low_h, _ = so_spectral_split(h, r)
    basis_g = _range_basis(low_g)
    rank_g, rank_h = basis_g.shape[1], int(round(np.trace(low_h)))
    if rank_g != rank_h:
        raise ValueError(f"low-block ranks differ ({rank_g} vs {rank_h}); h is outside the chart of g")
    n = g.shape[0]
    if rank_g == 0:
        j_h = np.zeros((n, n))
    else:
        mapped = low_h @ basis_g
        u, sing, vt = np.linalg.svd(mapped, full_matrices=False)
        if sing[-1] <= 0 or sing[0] / sing[-1] >= CONDITION_BOUND:
            raise ValueError("projection between low blocks is not an isomorphism")
        frame_h = u @ vt  # polar orthonormalisation of the transported frame
        j_h = frame_h @ block_structure(np.eye(rank_g)) @ frame_h.T
    eps = h @ (np.eye(n) - 2.0 * low_h)
    eps_decomp = clustered_eig(eps)
    if np.min(np.abs(eps_decomp.values + 1.0)) <= 1e-8:
        raise ValueError("eps(h) has eigenvalue -1; unitary-structure transport failed")
    principal = log_branch(eps, 0.0)
    if np.max(np.abs(principal.imag)) > 1e-9:
        raise ValueError("principal log of eps(h) failed to be real")
    element = PathElement([principal.real.astype(complex), np.pi * j_h], group="SO")
    if return_structure:
        return element, j_h
    return element
