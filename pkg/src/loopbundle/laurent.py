"""Finitely supported Fourier series with matrix coefficients.

A polynomial matrix loop is a map from the circle to complex n-by-n matrices of
the form

    a(t) = sum_k A_k exp(2 pi i k t),        finitely many A_k nonzero,

i.e. a Laurent polynomial in z = exp(2 pi i t) with matrix coefficients.  This
module holds the coefficient arithmetic (convolution product, pointwise
evaluation), membership residuals for the classical groups, and the FFT
projection used throughout the package to certify that a sampled loop is such
a trigonometric polynomial.

Conventions: mode indices are integers k, the sample grid has a power-of-two
size N_s, and samples live at t_i = i / N_s.  A loop tagged as real satisfies
A_{-k} = conj(A_k) entrywise, which is equivalent to a(t) being a real matrix
for every t.
"""

from dataclasses import dataclass, field as dataclass_field

import numpy as np

REAL_TAG_TOL = 1e-12
DEFAULT_GRID = 1024


def _as_coeff(dim, value):
    arr = np.asarray(value, dtype=complex)
    if arr.shape != (dim, dim):
        raise ValueError(f"coefficient shape {arr.shape} does not match dim {dim}")
    return arr


@dataclass(frozen=True)
class MatrixLoop:
    """Laurent polynomial loop with matrix coefficients.

    coeffs maps the integer mode k to the (dim, dim) complex coefficient A_k.
    field is "complex" or "real"; real-tagged loops must satisfy
    A_{-k} = conj(A_k) to 1e-12.
    """

    dim: int
    coeffs: dict
    field: str = "complex"

    def __post_init__(self):
        if self.dim < 1:
            raise ValueError("dim must be >= 1")
        if self.field not in ("real", "complex"):
            raise ValueError(f"unknown field tag {self.field!r}")
        clean = {}
        for k, value in self.coeffs.items():
            clean[int(k)] = _as_coeff(self.dim, value)
        object.__setattr__(self, "coeffs", clean)
        if self.field == "real":
            scale = max(1.0, self.norm())
            for k, value in clean.items():
                mate = clean.get(-k)
                mate = np.zeros((self.dim, self.dim)) if mate is None else mate
                if np.max(np.abs(mate - value.conj())) > REAL_TAG_TOL * scale:
                    raise ValueError("real-tagged loop violates A_{-k} = conj(A_k)")

    @property
    def degree(self):
        """Largest |k| with a nonzero coefficient (0 for the zero loop)."""
        live = [abs(k) for k, a in self.coeffs.items() if np.any(a != 0)]
        return max(live, default=0)

    def coeff(self, k):
        value = self.coeffs.get(int(k))
        if value is None:
            return np.zeros((self.dim, self.dim), dtype=complex)
        return value

    def norm(self):
        """l2 norm of the coefficient family, sqrt(sum_k ||A_k||_F^2)."""
        return float(np.sqrt(sum(np.sum(np.abs(a) ** 2) for a in self.coeffs.values())))

    def to_json_dict(self):
        entries = []
        for k in sorted(self.coeffs):
            a = self.coeffs[k]
            entries.append({"k": k, "re": a.real.tolist(), "im": a.imag.tolist()})
        return {"dim": self.dim, "field": self.field, "coeffs": entries}

    @classmethod
    def from_json_dict(cls, data):
        coeffs = {}
        for entry in data["coeffs"]:
            coeffs[int(entry["k"])] = np.asarray(entry["re"]) + 1j * np.asarray(entry["im"])
        return cls(dim=int(data["dim"]), coeffs=coeffs, field=data.get("field", "complex"))


@dataclass(frozen=True)
class SampledLoop:
    """Loop sampled on the uniform grid t_i = i / N_s, N_s a power of two.

    values has shape (N_s, dim, dim) for matrix loops or (N_s, dim) for
    vector-valued loops.
    """

    values: np.ndarray = dataclass_field(repr=False)

    def __post_init__(self):
        arr = np.asarray(self.values, dtype=complex)
        if arr.ndim not in (2, 3):
            raise ValueError("values must have shape (N_s, dim) or (N_s, dim, dim)")
        n_s = arr.shape[0]
        if n_s < 2 or (n_s & (n_s - 1)) != 0:
            raise ValueError(f"grid size {n_s} is not a power of two")
        if arr.ndim == 3 and arr.shape[1] != arr.shape[2]:
            raise ValueError("matrix samples must be square")
        object.__setattr__(self, "values", arr)

    @property
    def grid(self):
        return self.values.shape[0]

    @property
    def dim(self):
        return self.values.shape[1]

    @property
    def times(self):
        return np.arange(self.grid) / self.grid


def identity_loop(dim, field="real"):
    return MatrixLoop(dim=dim, coeffs={0: np.eye(dim)}, field=field)


def laurent_mul(a, b):
    """Convolution product of two matrix loops, (ab)_k = sum_j A_j B_{k-j}."""
    if a.dim != b.dim:
        raise ValueError(f"dimension mismatch {a.dim} != {b.dim}")
    out = {}
    for j, aj in a.coeffs.items():
        for m, bm in b.coeffs.items():
            k = j + m
            prod = aj @ bm
            if k in out:
                out[k] = out[k] + prod
            else:
                out[k] = prod
    tag = "real" if a.field == "real" and b.field == "real" else "complex"
    return MatrixLoop(dim=a.dim, coeffs=out, field=tag)


def laurent_eval(a, t):
    """Evaluate a(t) = sum_k A_k exp(2 pi i k t) at scalar or array t.

    Returns a complex matrix; real-tagged loops evaluate to matrices whose
    imaginary part is at round-off level.
    """
    ts = np.atleast_1d(np.asarray(t, dtype=float))
    if not a.coeffs:
        out = np.zeros((ts.size, a.dim, a.dim), dtype=complex)
    else:
        ks = np.array(sorted(a.coeffs), dtype=float)
        stack = np.stack([a.coeffs[int(k)] for k in ks])
        phases = np.exp(2j * np.pi * np.outer(ts, ks))
        out = np.einsum("mk,kij->mij", phases, stack)
    if np.isscalar(t) or np.asarray(t).ndim == 0:
        return out[0]
    return out


def sample_loop(a, grid=DEFAULT_GRID):
    """Sample a matrix loop on the uniform power-of-two grid."""
    return SampledLoop(values=laurent_eval(a, np.arange(grid) / grid))


def group_residual(a, group, samples=256):
    """Max distance of a(t) from the given matrix group over a sample grid.

    group is one of "U", "SU", "SO".  The residual is the Frobenius norm of
    a(t)* a(t) - I, plus |det a(t) - 1| for SU and SO, plus the norm of the
    imaginary part for SO.
    """
    if group not in ("U", "SU", "SO"):
        raise ValueError(f"unknown group {group!r}")
    ts = np.arange(samples) / samples
    vals = laurent_eval(a, ts)
    eye = np.eye(a.dim)
    gram = np.einsum("mji,mjk->mik", vals.conj(), vals)
    res = np.linalg.norm(gram - eye, axis=(1, 2))
    if group in ("SU", "SO"):
        res = res + np.abs(np.linalg.det(vals) - 1.0)
    if group == "SO":
        res = res + np.linalg.norm(vals.imag, axis=(1, 2))
    return float(res.max())


def fourier_coefficients(values, max_mode):
    """FFT coefficients c_k, |k| <= max_mode, of samples on the uniform grid.

    values has grid length along axis 0.  Returns (coeffs, tail, total) where
    coeffs has shape (2*max_mode + 1, ...) indexed by k = -max_mode..max_mode,
    tail = sqrt(sum_{|k| > max_mode} ||c_k||_F^2) and total is the full l2 mass.
    """
    arr = np.asarray(values, dtype=complex)
    n_s = arr.shape[0]
    if max_mode >= n_s // 2:
        raise ValueError(f"mode bound {max_mode} too large for grid {n_s}")
    spectrum = np.fft.fft(arr, axis=0) / n_s
    freqs = np.fft.fftfreq(n_s, d=1.0 / n_s).astype(int)
    order = np.argsort(freqs)
    spectrum = spectrum[order]
    freqs = freqs[order]
    axes = tuple(range(1, arr.ndim))
    mass = np.sqrt(np.sum(np.abs(spectrum) ** 2, axis=axes))
    keep = np.abs(freqs) <= max_mode
    tail = float(np.sqrt(np.sum(mass[~keep] ** 2)))
    total = float(np.sqrt(np.sum(mass**2)))
    window = spectrum[keep]
    return window, tail, total


def fourier_project(s, max_mode, coeff_floor=1e-14):
    """Project a sampled matrix loop onto modes |k| <= max_mode.

    Returns (MatrixLoop, residual) where residual is the l2 mass outside the
    window.  Exact (to round-off) for trigonometric polynomials of degree
    below half the grid size.
    """
    if s.values.ndim != 3:
        raise ValueError("fourier_project expects matrix samples")
    window, tail, total = fourier_coefficients(s.values, max_mode)
    floor = coeff_floor * max(total, 1.0)
    coeffs = {}
    for i, k in enumerate(range(-max_mode, max_mode + 1)):
        if np.max(np.abs(window[i])) > floor:
            coeffs[k] = window[i]
    tag = "real" if float(np.max(np.abs(s.values.imag), initial=0.0)) <= REAL_TAG_TOL * max(total, 1.0) else "complex"
    if tag == "real":
        # symmetrize so the real invariant holds exactly despite FFT round-off
        sym = {}
        for k, value in coeffs.items():
            mate = coeffs.get(-k, np.zeros_like(value))
            sym[k] = 0.5 * (value + mate.conj())
        coeffs = sym
    return MatrixLoop(dim=s.dim, coeffs=coeffs, field=tag), tail


def polynomiality_residual(s, max_mode):
    """Relative l2 mass of a sampled loop outside modes |k| <= max_mode.

    Accepts matrix- or vector-valued samples.  The bound must stay below a
    quarter of the grid size so that the tail window is meaningful; the zero
    loop has residual 0 by convention.
    """
    arr = s.values if isinstance(s, SampledLoop) else np.asarray(s, dtype=complex)
    n_s = arr.shape[0]
    if max_mode >= n_s // 4:
        raise ValueError(f"mode bound {max_mode} must be < grid/4 = {n_s // 4}")
    _, tail, total = fourier_coefficients(arr, max_mode)
    if total == 0.0:
        return 0.0
    return tail / total
