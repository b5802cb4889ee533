"""Parallel transport, holonomy, Floquet data and polynomial fibre bases.

Three built-in geometries supply the connection coefficient A(t) of a loop in
a fixed orthonormal frame, so that parallel transport solves Phi' = A(t) Phi:

* ``flat-torus-T2``: tangent bundle of the flat torus; A = 0.
* ``round-sphere-S2``: tangent bundle of the round sphere along latitude
  circles at colatitude theta, frame (e_theta, e_phi); the Levi-Civita
  coefficient is the constant rotation generator -2 pi w cos(theta) J0 for
  winding w.  Rescaling the radius leaves transport unchanged.
* ``group-SU2``: the bi-invariant metric, loops t -> exp(2 pi w t X) along a
  unit direction X in the Lie algebra, left-invariant frame; transport is
  generated by -(pi w) ad_X.

Reparametrised loops use the pulled-back coefficient sigma'(t) A(sigma(t)).

The covariant derivative along the loop is D = d/dt - A(t).  The holonomy is
the frame matrix after one period; writing its eigenvalues e^{2 pi i s_j}
with exponents s_j in [-1/2, 1/2), the sections

    phi_{p,j}(t) = e^{2 pi i p t} Phi(t) e^{-2 pi i s_j t} w_j

are periodic and diagonalise the normalised operator (1/2 pi) D with
eigenvalues i (p - s_j).  The weighted pairing sums
cosh((p - s_j) ln r)^2 conj(a) b over coefficients.
"""

import numpy as np
from dataclasses import dataclass

from .laurent import SampledLoop, laurent_eval, polynomiality_residual
from .spectral import clustered_eig

MODEL_TAGS = ("flat-torus-T2", "round-sphere-S2", "group-SU2")
CONVERGENCE_TOL = 1e-6
J0 = np.array([[0.0, -1.0], [1.0, 0.0]])

# quaternion basis of the 2x2 skew-hermitian traceless matrices, orthonormal
# for <a, b> = -tr(ab)/2; the commutator is twice the cross product
SU2_BASIS = np.array(
    [
        [[0.0 + 0j, 1.0], [-1.0, 0.0]],
        [[0.0, 1j], [1j, 0.0]],
        [[1j, 0.0], [0.0, -1j]],
    ]
)


def _cross_matrix(u):
    return np.array(
        [
            [0.0, -u[2], u[1]],
            [u[2], 0.0, -u[0]],
            [-u[1], u[0], 0.0],
        ]
    )


class Reparam:
    """Lifted circle reparametrisation sigma with sigma(t+1) = sigma(t) +- 1.

    Kinds: "identity"; "rotation" (t + shift); "sine" (t + shift +
    amplitude sin 2 pi t, needs |amplitude| < 1/(2 pi) to stay monotone);
    "reflection" (shift - t, orientation-reversing).
    """

    def __init__(self, kind="identity", shift=0.0, amplitude=0.0):
        if kind not in ("identity", "rotation", "sine", "reflection"):
            raise ValueError(f"unknown reparametrisation kind {kind!r}")
        if kind == "sine" and abs(amplitude) * 2.0 * np.pi >= 1.0:
            raise ValueError("sine amplitude too large; map is not monotone")
        self.kind = kind
        self.shift = float(shift)
        self.amplitude = float(amplitude)

    def sigma(self, ts):
        ts = np.asarray(ts, dtype=float)
        if self.kind == "identity":
            return ts
        if self.kind == "rotation":
            return ts + self.shift
        if self.kind == "sine":
            return ts + self.shift + self.amplitude * np.sin(2.0 * np.pi * ts)
        return self.shift - ts

    def dsigma(self, ts):
        ts = np.asarray(ts, dtype=float)
        if self.kind == "sine":
            return 1.0 + 2.0 * np.pi * self.amplitude * np.cos(2.0 * np.pi * ts)
        if self.kind == "reflection":
            return -np.ones_like(ts)
        return np.ones_like(ts)

    @property
    def orientation(self):
        return -1 if self.kind == "reflection" else 1

    def compose(self, inner):
        """The map t -> self.sigma(inner.sigma(t))."""
        return _ComposedReparam(self, inner)


class _ComposedReparam(Reparam):
    def __init__(self, outer, inner):
        self.kind = "composed"
        self.outer = outer
        self.inner = inner

    def sigma(self, ts):
        return self.outer.sigma(self.inner.sigma(ts))

    def dsigma(self, ts):
        return self.outer.dsigma(self.inner.sigma(ts)) * self.inner.dsigma(ts)

    @property
    def orientation(self):
        return self.outer.orientation * self.inner.orientation


@dataclass(frozen=True)
class ConnectionModel:
    """One of the built-in geometries; supplies connection coefficients."""

    tag: str
    radius: float = 1.0

    def __post_init__(self):
        if self.tag not in MODEL_TAGS:
            raise ValueError(f"unknown model tag {self.tag!r}")
        if self.radius <= 0:
            raise ValueError("radius must be positive")

    def fibre_dim(self):
        return 3 if self.tag == "group-SU2" else 2

    def base_coefficient(self, loop):
        """The constant connection matrix of the unreparametrised loop."""
        if self.tag == "flat-torus-T2":
            return np.zeros((2, 2))
        if self.tag == "round-sphere-S2":
            return -2.0 * np.pi * loop.winding * np.cos(loop.theta) * J0
        u = np.asarray(loop.direction, dtype=float)
        u = u / np.linalg.norm(u)
        return -np.pi * loop.winding * 2.0 * _cross_matrix(u)

    def coefficients(self, loop, ts):
        """Batched A(t) including any reparametrisation pullback."""
        ts = np.atleast_1d(np.asarray(ts, dtype=float))
        base = self.base_coefficient(loop)
        if loop.reparam is None:
            return np.broadcast_to(base, (ts.size,) + base.shape).copy()
        scale = loop.reparam.dsigma(ts)
        return scale[:, None, None] * base[None, :, :]


@dataclass(frozen=True)
class BaseLoop:
    """Closed-form base loop parameters plus grid size.

    torus: winding is an integer pair (the loop itself never enters the
    transport equation since A = 0); sphere: colatitude theta in (0, pi) and
    integer winding; SU2: unit direction (3 reals) and integer winding.
    Integer windings make gamma(t+1) = gamma(t) exact by construction.
    """

    winding: object = 1
    theta: float = np.pi / 2
    direction: tuple = (0.0, 0.0, 1.0)
    grid: int = 4096
    reparam: object = None

    def with_reparam(self, rep):
        if self.reparam is not None:
            rep = self.reparam.compose(rep)
        return BaseLoop(self.winding, self.theta, self.direction, self.grid, rep)


def torus_model(winding=(1, 0), grid=4096, reparam=None):
    return ConnectionModel("flat-torus-T2"), BaseLoop(winding=winding, grid=grid, reparam=reparam)


def sphere_model(theta, winding=1, grid=4096, reparam=None):
    if not 0.0 < theta < np.pi:
        raise ValueError("colatitude must lie strictly between 0 and pi")
    return ConnectionModel("round-sphere-S2"), BaseLoop(winding=int(winding), theta=float(theta), grid=grid, reparam=reparam)


def su2_model(direction=(0.0, 0.0, 1.0), winding=1, grid=4096, reparam=None):
    return ConnectionModel("group-SU2"), BaseLoop(winding=int(winding), direction=tuple(direction), grid=grid, reparam=reparam)


def _rk4_propagators(model, loop, t0, h, steps):
    """One-step fourth-order propagators for Phi' = A(t) Phi on a uniform grid."""
    ts = t0 + h * np.arange(steps)
    a1 = model.coefficients(loop, ts)
    a2 = model.coefficients(loop, ts + 0.5 * h)
    a3 = model.coefficients(loop, ts + h)
    k1 = a1
    k2 = a2 + 0.5 * h * np.einsum("tij,tjk->tik", a2, k1)
    k3 = a2 + 0.5 * h * np.einsum("tij,tjk->tik", a2, k2)
    k4 = a3 + h * np.einsum("tij,tjk->tik", a3, k3)
    eye = np.eye(a1.shape[1])
    return eye + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def _chain_product(mats):
    """mats[-1] @ ... @ mats[0] by pairwise folding."""
    n = mats.shape[0]
    size = 1 << (n - 1).bit_length()
    if size != n:
        pad = np.broadcast_to(np.eye(mats.shape[1]), (size - n,) + mats.shape[1:])
        mats = np.concatenate([mats, pad])
    while mats.shape[0] > 1:
        mats = np.einsum("tij,tjk->tik", mats[1::2], mats[0::2])
    return mats[0]


def _integrate(model, loop, t0, t1, steps):
    h = (t1 - t0) / steps
    return _chain_product(_rk4_propagators(model, loop, t0, h, steps))


def transport(model, loop, t0=0.0, t1=1.0, steps=4096, check=True):
    """Parallel transport matrix from time t0 to t1 along the loop.

    Integrates at the requested step count and at twice it; a disagreement
    above 1e-6 is reported as a convergence failure.  Returns the finer
    result, checked orthogonal/unitary to 1e-8.
    """
    if steps < 64:
        raise ValueError("need at least 64 integration steps")
    coarse = _integrate(model, loop, t0, t1, steps)
    fine = _integrate(model, loop, t0, t1, 2 * steps)
    if check:
        defect = np.linalg.norm(coarse - fine)
        if defect > CONVERGENCE_TOL:
            raise RuntimeError(f"transport integration did not converge (step-doubling defect {defect:.3e})")
        unit = np.linalg.norm(fine.conj().T @ fine - np.eye(fine.shape[0]))
        if unit > 1e-8:
            raise RuntimeError(f"transport lost orthogonality ({unit:.3e})")
    return fine


def transport_defect(model, loop, t0=0.0, t1=1.0, steps=4096):
    """Step-doubling disagreement of the transport integrator."""
    return float(np.linalg.norm(_integrate(model, loop, t0, t1, steps) - _integrate(model, loop, t0, t1, 2 * steps)))


def holonomy(model, loop, steps=4096):
    """Transport once around the loop."""
    return transport(model, loop, 0.0, 1.0, steps)


def transport_frame(model, loop, steps=None):
    """Cumulative frame Phi(i/steps), i = 0..steps, with Phi(0) = I."""
    if steps is None:
        steps = loop.grid
    props = _rk4_propagators(model, loop, 0.0, 1.0 / steps, steps)
    n = props.shape[1]
    frame = np.empty((steps + 1, n, n))
    frame[0] = np.eye(n)
    for i in range(steps):
        frame[i + 1] = props[i] @ frame[i]
    return frame


@dataclass(frozen=True)
class MonodromyData:
    """Holonomy matrix, Floquet exponents/frame and the transported frame grid."""

    holonomy: np.ndarray
    exponents: np.ndarray
    frame: np.ndarray
    frame_path: object = None  # (grid, n, n) values Phi(i/grid), i < grid

    def __post_init__(self):
        g, w = self.holonomy, self.frame
        defect = np.linalg.norm(g @ w - w * np.exp(2j * np.pi * self.exponents)[None, :])
        if defect > 1e-8:
            raise ValueError(f"Floquet frame is not an eigenframe (defect {defect:.3e})")
        if self.frame_path is not None and np.linalg.norm(self.frame_path[0] - np.eye(g.shape[0])) > 1e-12:
            raise ValueError("transported frame must start at the identity")


def _window(x):
    """Reduce to [-1/2, 1/2); ties at 1/2 go to -1/2."""
    return np.mod(np.asarray(x, dtype=float) + 0.5, 1.0) - 0.5


def floquet(g, frame_path=None):
    """Floquet exponents s_j in [-1/2, 1/2) and eigenframe of a holonomy matrix.

    Eigenvalues are clustered as in the spectral helpers; columns are ordered
    by exponent.  Rejects matrices that are not unitary/orthogonal to 1e-8.
    """
    arr = np.asarray(g, dtype=complex)
    if np.linalg.norm(arr.conj().T @ arr - np.eye(arr.shape[0])) > 1e-8:
        raise ValueError("holonomy matrix is not orthogonal/unitary")
    decomp = clustered_eig(arr)
    n = arr.shape[0]
    exps = np.empty(n)
    for cluster in decomp.clusters:
        val = decomp.cluster_value(cluster)
        exps[list(cluster)] = _window(np.angle(val) / (2.0 * np.pi))
    order = np.lexsort((np.arange(n), exps))
    return MonodromyData(
        holonomy=arr,
        exponents=exps[order],
        frame=decomp.vectors[:, order],
        frame_path=frame_path,
    )


def monodromy(model, loop, steps=None):
    """Full pipeline: transported frame, holonomy and Floquet data.

    The holonomy is the end of the cumulative frame product, so the discrete
    quasi-periodicity Phi(t+1) = Phi(t) g is exact; convergence is checked
    against a step-doubled integration.
    """
    if steps is None:
        steps = loop.grid
    frame = transport_frame(model, loop, steps)
    g = frame[-1]
    fine = transport(model, loop, 0.0, 1.0, steps)
    if np.linalg.norm(g - fine) > CONVERGENCE_TOL:
        raise RuntimeError("frame integration disagrees with step-doubled transport")
    return floquet(g, frame_path=frame[:-1])


def _mode_pairs(mode_bound, exponents):
    """Flattened (p, s_j) arrays in basis order: index = (p + P) * n + j."""
    n = exponents.size
    p_col = np.repeat(np.arange(-mode_bound, mode_bound + 1), n)
    s_col = np.tile(exponents, 2 * mode_bound + 1)
    return p_col, s_col


@dataclass(frozen=True)
class FiberBasis:
    """Sampled eigen-section basis phi_{p,j} over one loop.

    values has shape (count, grid, n) with index (p + P) * n + j; pairs holds
    the matching (p, s_j) rows.
    """

    model: ConnectionModel
    loop: BaseLoop
    data: MonodromyData
    mode_bound: int
    values: np.ndarray
    pairs: np.ndarray

    @property
    def grid(self):
        return self.values.shape[1]

    @property
    def count(self):
        return self.values.shape[0]

    def gram(self):
        flat = self.values.reshape(self.count, -1)
        return flat.conj() @ flat.T / self.grid

    def section(self, coefficients):
        coefficients = np.asarray(coefficients, dtype=complex)
        if coefficients.shape != (self.count,):
            raise ValueError("coefficient vector has the wrong length")
        vals = np.tensordot(coefficients, self.values, axes=(0, 0))
        return FiberSection(coefficients=coefficients, values=vals)

    def project(self, values):
        vals = np.asarray(values, dtype=complex)
        if vals.shape != self.values.shape[1:]:
            raise ValueError("sampled section does not match the basis grid")
        return np.einsum("mtk,tk->m", self.values.conj(), vals) / self.grid

    def periodicity_residual(self):
        """Defect of the exact period identity, g w_j = e^{2 pi i s_j} w_j."""
        data = self.data
        shifted = data.holonomy @ data.frame - data.frame * np.exp(2j * np.pi * data.exponents)[None, :]
        return float(np.linalg.norm(shifted, axis=0).max())


@dataclass(frozen=True)
class FiberSection:
    """A section in coefficient form over a FiberBasis plus its sampled values."""

    coefficients: np.ndarray
    values: np.ndarray


def eigen_sections(model, loop, data, mode_bound):
    """The basis phi_{p,j}(t) = e^{2 pi i p t} Phi(t) e^{-2 pi i s_j t} w_j, |p| <= P."""
    if data.frame_path is None:
        raise ValueError("monodromy data carries no transported frame")
    frame_path = np.asarray(data.frame_path)
    grid = frame_path.shape[0]
    n = data.exponents.size
    ts = np.arange(grid) / grid
    mapped = np.einsum("tij,jk->tik", frame_path.astype(complex), data.frame)
    drift = np.exp(-2j * np.pi * np.outer(ts, data.exponents))
    core = mapped.transpose(0, 2, 1) * drift[:, :, None]
    # core[t, j, :] = e^{-2 pi i s_j t} Phi(t) w_j
    phases = np.exp(2j * np.pi * np.outer(np.arange(-mode_bound, mode_bound + 1), ts))
    values = np.einsum("pt,tjk->pjtk", phases, core).reshape((2 * mode_bound + 1) * n, grid, n)
    p_col, s_col = _mode_pairs(mode_bound, data.exponents)
    return FiberBasis(
        model=model,
        loop=loop,
        data=data,
        mode_bound=mode_bound,
        values=values,
        pairs=np.stack([p_col.astype(float), s_col], axis=1),
    )


def _fd4(values, grid, axis=0):
    """Fourth-order central difference along a periodic time axis."""
    return (
        -np.roll(values, -2, axis=axis)
        + 8.0 * np.roll(values, -1, axis=axis)
        - 8.0 * np.roll(values, 1, axis=axis)
        + np.roll(values, 2, axis=axis)
    ) * (grid / 12.0)


def covariant_derivative(model, loop, values):
    """D applied to a sampled section: finite-difference d/dt minus A(t)."""
    grid = values.shape[0]
    ts = np.arange(grid) / grid
    coeff = model.coefficients(loop, ts)
    return _fd4(values, grid) - np.einsum("tij,tj->ti", coeff, values)


def dhat_residuals(basis):
    """Relative defect of (1/2 pi) D phi = i (p - s_j) phi per basis section."""
    grid = basis.grid
    ts = np.arange(grid) / grid
    coeff = basis.model.coefficients(basis.loop, ts)
    deriv = _fd4(basis.values, grid, axis=1)
    dhat = (deriv - np.einsum("tij,mtj->mti", coeff, basis.values)) / (2.0 * np.pi)
    eigs = 1j * (basis.pairs[:, 0] - basis.pairs[:, 1])
    defect = dhat - eigs[:, None, None] * basis.values
    num = np.sqrt(np.mean(np.abs(defect) ** 2, axis=(1, 2)))
    den = np.sqrt(np.mean(np.abs(basis.values) ** 2, axis=(1, 2)))
    return num / den


def project_section(basis, values):
    """Coefficients of a sampled section with round-trip reconstruction error."""
    coeffs = basis.project(values)
    rebuilt = basis.section(coeffs)
    scale = np.sqrt(np.mean(np.abs(values) ** 2))
    err = np.sqrt(np.mean(np.abs(rebuilt.values - values) ** 2)) / max(scale, 1e-300)
    return FiberSection(coefficients=coeffs, values=np.asarray(values, dtype=complex)), float(err)


def loop_recognition_residual(basis, coefficients):
    """Defect of h b(t+1) = b(t) in the transported frame for a coefficient section.

    In transported-frame coordinates the section is
    b(t) = sum c_{p,j} e^{2 pi i p t} e^{-2 pi i s_j t} w_j, and applying the
    holonomy to b(t+1) must reproduce b(t).
    """
    data = basis.data
    grid = basis.grid
    ts = np.arange(grid) / grid
    coeffs = np.asarray(coefficients, dtype=complex).reshape(2 * basis.mode_bound + 1, -1)
    n = data.exponents.size
    modes = np.arange(-basis.mode_bound, basis.mode_bound + 1)

    def frame_coords(offset):
        phase = np.exp(2j * np.pi * np.outer(ts + offset, modes))  # (t, p)
        drift = np.exp(-2j * np.pi * np.outer(ts + offset, data.exponents))  # (t, j)
        weights = np.einsum("tp,pj,tj->tj", phase, coeffs, drift)
        return np.einsum("ij,tj->ti", data.frame, weights)

    b0 = frame_coords(0.0)
    b1 = np.einsum("ij,tj->ti", data.holonomy, frame_coords(1.0))
    scale = max(np.sqrt(np.mean(np.abs(b0) ** 2)), 1e-300)
    return float(np.sqrt(np.mean(np.abs(b1 - b0) ** 2)) / scale)


def cos_inner_product(a, b, data, r):
    """Weighted pairing sum_{p,j} cosh((p - s_j) ln r)^2 conj(a_{p,j}) b_{p,j}."""
    if r <= 1.0:
        raise ValueError("annulus parameter must exceed 1")
    ca = np.asarray(a.coefficients)
    cb = np.asarray(b.coefficients)
    if ca.shape != cb.shape:
        raise ValueError("sections live over different bases")
    n = data.exponents.size
    if ca.size % n or ((ca.size // n) % 2) == 0:
        raise ValueError("coefficient length does not match the exponent count")
    mode_bound = (ca.size // n - 1) // 2
    p_col, s_col = _mode_pairs(mode_bound, data.exponents)
    weights = np.cosh((p_col - s_col) * np.log(r)) ** 2
    return complex(np.sum(weights * ca.conj() * cb))


def cos_gram(basis, r, coefficients=None):
    """Gram matrix under the weighted pairing for sections given by coefficient rows.

    With no coefficient matrix this is the basis Gram, diagonal by design.
    """
    if r <= 1.0:
        raise ValueError("annulus parameter must exceed 1")
    weights = np.cosh((basis.pairs[:, 0] - basis.pairs[:, 1]) * np.log(r)) ** 2
    if coefficients is None:
        coefficients = np.eye(basis.count, dtype=complex)
    coefficients = np.asarray(coefficients, dtype=complex)
    return (coefficients.conj() * weights[None, :]) @ coefficients.T


def trig_interpolate(values, new_ts, block=512):
    """Evaluate the trigonometric interpolant of periodic samples at new times."""
    values = np.asarray(values, dtype=complex)
    n = values.shape[0]
    coeffs = np.fft.fft(values, axis=0) / n
    freqs = np.fft.fftfreq(n, d=1.0 / n)
    new_ts = np.asarray(new_ts, dtype=float)
    out = np.empty((new_ts.size,) + values.shape[1:], dtype=complex)
    flat = coeffs.reshape(n, -1)
    for start in range(0, new_ts.size, block):
        chunk = new_ts[start : start + block]
        phases = np.exp(2j * np.pi * np.outer(chunk, freqs))
        out[start : start + chunk.size] = (phases @ flat).reshape((chunk.size,) + values.shape[1:])
    return out


def condiff_residual(model, loop, rep, values):
    """Relative defect of the chain rule D_{gamma o sigma}(a o sigma) = ((D a) o sigma) sigma'."""
    ts = np.arange(values.shape[0]) / values.shape[0]
    dsig = rep.dsigma(ts)
    if rep.orientation < 0 or np.min(dsig) <= 0:
        raise ValueError("reparametrisation must be orientation-preserving and monotone")
    sig = rep.sigma(ts)
    pulled = trig_interpolate(values, np.mod(sig, 1.0))
    coeff_sigma = dsig[:, None, None] * model.coefficients(loop, sig)
    lhs = _fd4(pulled, ts.size) - np.einsum("tij,tj->ti", coeff_sigma, pulled)
    d_alpha = covariant_derivative(model, loop, np.asarray(values, dtype=complex))
    rhs = trig_interpolate(d_alpha, np.mod(sig, 1.0)) * dsig[:, None]
    scale = max(np.sqrt(np.mean(np.abs(values) ** 2)), 1e-300)
    return float(np.sqrt(np.mean(np.abs(lhs - rhs) ** 2)) / scale)


def section_degree(values, floor=1e-10):
    """Largest Fourier mode carrying relative mass above the floor."""
    arr = np.asarray(values, dtype=complex)
    n = arr.shape[0]
    coeffs = np.fft.fft(arr, axis=0) / n
    mass = np.sqrt(np.sum(np.abs(coeffs.reshape(n, -1)) ** 2, axis=1))
    total = np.linalg.norm(mass)
    if total == 0:
        return 0
    freqs = np.abs(np.fft.fftfreq(n, d=1.0 / n))
    keep = mass > floor * total
    return int(freqs[keep].max()) if keep.any() else 0


def reparam_actions(basis, rep):
    """Standard vs transport action of a reparametrisation on the fibre basis.

    The standard action composes each basis section with sigma and measures
    its distance from a trigonometric polynomial at the section's original
    degree; rotations and reflections preserve polynomiality, generic maps
    break it.  The transport action carries the coefficients unchanged to the
    basis over the reparametrised loop and only needs a periodicity check.
    """
    ts = np.arange(basis.grid) / basis.grid
    sig = np.mod(rep.sigma(ts), 1.0)
    stacked = np.moveaxis(basis.values, 0, 1).reshape(basis.grid, -1)
    pulled_all = trig_interpolate(stacked, sig).reshape(basis.grid, basis.count, -1)
    residuals = np.empty(basis.count)
    degrees = np.empty(basis.count, dtype=int)
    for idx in range(basis.count):
        degrees[idx] = section_degree(basis.values[idx])
        residuals[idx] = polynomiality_residual(SampledLoop(values=pulled_all[:, idx, :]), degrees[idx])
    moved = basis.loop.with_reparam(rep)
    data2 = monodromy(basis.model, moved, steps=basis.grid)
    basis2 = eigen_sections(basis.model, moved, data2, basis.mode_bound)
    transport_report = {
        "coefficient_drift": 0.0,
        "periodicity_residual": basis2.periodicity_residual(),
    }
    return {
        "standard_residuals": residuals,
        "degrees": degrees,
        "standard_max": float(residuals.max()),
        "standard_min": float(residuals.min()),
        "transport": transport_report,
    }


def subbundle_counterexample(gamma, beta, grid=4096, guard=4):
    """Residual report for the phase-twisted loop t -> e^{2 pi i gamma(t)} beta(t).

    gamma is a callable lift with integer winding; beta a scalar loop.  The
    twist of a polynomial loop stays polynomial exactly when gamma is linear;
    the report flags a counterexample when the residual at degree
    deg(beta) + guard exceeds 1e-3.
    """
    if beta.dim != 1:
        raise ValueError("the demonstration uses scalar loops")
    wind = gamma(1.0) - gamma(0.0)
    if abs(wind - round(wind)) > 1e-8:
        raise ValueError("gamma(t+1) - gamma(t) must be an integer")
    ts = np.arange(grid) / grid
    gvals = np.asarray([gamma(t) for t in ts], dtype=float)
    beta_vals = laurent_eval(beta, ts)[:, 0, 0]
    vals = np.exp(2j * np.pi * gvals) * beta_vals
    degree = beta.degree + guard + abs(int(round(wind)))
    residual = polynomiality_residual(SampledLoop(values=vals[:, None]), degree)
    return {
        "residual": float(residual),
        "degree": int(degree),
        "winding": int(round(wind)),
        "threshold": 1e-3,
        "is_counterexample": bool(residual > 1e-3),
    }


class _DirectSumModel:
    """Blockwise connection built from two (model, loop) pairs; test plumbing."""

    def __init__(self, first, second):
        self.first = first
        self.second = second
        self.tag = "direct-sum"

    def fibre_dim(self):
        return self.first[0].fibre_dim() + self.second[0].fibre_dim()

    def coefficients(self, loop, ts):
        ts = np.atleast_1d(np.asarray(ts, dtype=float))
        a = self.first[0].coefficients(self.first[1], ts)
        b = self.second[0].coefficients(self.second[1], ts)
        n, m = a.shape[1], b.shape[1]
        out = np.zeros((ts.size, n + m, n + m))
        out[:, :n, :n] = a
        out[:, n:, n:] = b
        return out


def _span_containment(inner, outer):
    """Max relative distance of the rows of `inner` from the row span of `outer`."""
    q, _ = np.linalg.qr(outer.T)
    proj = inner @ q.conj() @ q.T
    num = np.linalg.norm(inner - proj, axis=1)
    den = np.linalg.norm(inner, axis=1)
    return float(np.max(num / den))


def direct_sum_union_residual(theta=np.pi / 3, mode_bound=4, grid=2048):
    """Check that the fibre basis of a block-diagonal connection is the union
    of the blockwise bases: cross-Gram terms and mutual span containment."""
    tor_model, tor_loop = torus_model(grid=grid)
    sph_model, sph_loop = sphere_model(theta, grid=grid)
    combo_model = _DirectSumModel((tor_model, tor_loop), (sph_model, sph_loop))
    combo_loop = BaseLoop(grid=grid)
    data = monodromy(combo_model, combo_loop, steps=grid)
    full = eigen_sections(combo_model, combo_loop, data, mode_bound)

    basis_a = eigen_sections(tor_model, tor_loop, monodromy(tor_model, tor_loop, steps=grid), mode_bound)
    basis_b = eigen_sections(sph_model, sph_loop, monodromy(sph_model, sph_loop, steps=grid), mode_bound)
    na, nb = basis_a.values.shape[2], basis_b.values.shape[2]
    emb_a = np.zeros((basis_a.count, grid, na + nb), dtype=complex)
    emb_a[:, :, :na] = basis_a.values
    emb_b = np.zeros((basis_b.count, grid, na + nb), dtype=complex)
    emb_b[:, :, na:] = basis_b.values
    union = np.concatenate([emb_a, emb_b]).reshape(basis_a.count + basis_b.count, -1)
    cross = emb_a.reshape(basis_a.count, -1).conj() @ emb_b.reshape(basis_b.count, -1).T / grid
    span_gap = max(
        _span_containment(full.values.reshape(full.count, -1), union),
        _span_containment(union, full.values.reshape(full.count, -1)),
    )
    return {"cross_gram_max": float(np.abs(cross).max()), "span_gap": span_gap}


def complexification_residual(theta=np.pi / 6, mode_bound=4, grid=2048):
    """Check that the complex basis and its realification span the same space.

    Realifying and re-complexifying adjoins the conjugated sections; for the
    symmetric mode window both spans agree.
    """
    model, loop = sphere_model(theta, grid=grid)
    basis = eigen_sections(model, loop, monodromy(model, loop, steps=grid), mode_bound)
    flat = basis.values.reshape(basis.count, -1)
    conj = flat.conj()
    return max(_span_containment(conj, flat), _span_containment(flat, conj))
