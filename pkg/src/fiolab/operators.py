"""Operator families on discrete fields: multipliers, pseudo-differential
operators, oscillatory integral operators, phase-and-amplitude integral
operators, and canonical transforms.

Every operator is exposed through :class:`OperatorHandle`, a linear map with
an ``apply`` and an ``apply_adjoint`` closure.  Adjoints are the exact
conjugate-transpose of the discrete quadrature with respect to the
``dx^n``-weighted inner product, never an analytic formula, so the pairing
identity ``<T u, v> = <u, T* v>`` holds to rounding error by construction.

Canonical transforms evaluate the input spectrum at the mapped frequency
points by exact trigonometric sums (band-limited interpolation).  Two
frequency-domain conventions apply throughout:

* unpaired Nyquist modes are zeroed on both sides of any nonsmooth
  frequency operation;
* mapped points that leave the representable frequency box produce zero
  output (the discrete field is modelled as band-limited, so the spectrum
  vanishes beyond the box rather than wrapping around).

Accuracy of a canonical transform is therefore limited by the field's
spectral tail, which is measured and recorded in the result metadata.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Callable, Literal

import numpy as np

from fiolab._dense import TrigTable, kernel_apply
from fiolab.lattice import (
    Field,
    Grid,
    SpectralField,
    forward_transform,
    inverse_transform,
    nyquist_mask,
    spectral_tail_fraction,
    zero_nyquist,
)
from fiolab.symbols import CanonicalMap, invert_map_batch

__all__ = [
    "OperatorHandle",
    "PhaseFunction",
    "Amplitude",
    "SpectralTailWarning",
    "apply_multiplier",
    "apply_canonical_transform",
    "apply_pseudo",
    "apply_oscillatory",
    "apply_fio",
    "identity_operator",
    "multiplier_operator",
    "multiplication_operator",
    "weight_operator",
    "canonical_transform_operator",
    "pseudo_operator",
    "oscillatory_operator",
    "fio_operator",
    "matrix_operator",
    "kernel_operator",
    "compose",
    "scale",
    "add",
    "evaluate_multiplier",
]

FULL_ARITY_MAX_POINTS = 128


class SpectralTailWarning(UserWarning):
    """Input field carries non-negligible energy in the outer frequency shell."""


@dataclass(frozen=True)
class OperatorHandle:
    """Linear map on fields with an exact discrete adjoint."""

    grid: Grid
    apply: Callable[[Field], Field]
    apply_adjoint: Callable[[Field], Field]
    label: str = "operator"


@dataclass(frozen=True)
class PhaseFunction:
    """Real phase ``phi(y, xi)`` with optional frequency gradient.

    ``evaluate`` takes stacked vectors ``y``, ``xi`` of shape (..., n) and
    returns real values of shape (...).
    """

    evaluate: Callable[[np.ndarray, np.ndarray], np.ndarray]
    grad_xi: Callable[[np.ndarray, np.ndarray], np.ndarray] | None = None
    label: str = "phase"


@dataclass(frozen=True)
class Amplitude:
    """Amplitude ``a(x, y, xi)`` tagged with its argument structure.

    The arity tag drives the factorized application paths; product arities
    keep their factors so the multiplication can be peeled off exactly.
    """

    arity: Literal["x_xi", "y_xi", "x_y_xi", "x_xi*y", "x*y_xi"]
    evaluate: Callable[[np.ndarray, np.ndarray, np.ndarray], np.ndarray]
    factor_main: Callable | None = None
    factor_scalar: Callable | None = None
    label: str = "amplitude"

    @staticmethod
    def of_x_xi(func, label="a(x,xi)"):
        return Amplitude("x_xi", lambda x, y, xi: func(x, xi), factor_main=func, label=label)

    @staticmethod
    def of_y_xi(func, label="a(y,xi)"):
        return Amplitude("y_xi", lambda x, y, xi: func(y, xi), factor_main=func, label=label)

    @staticmethod
    def full(func, label="a(x,y,xi)"):
        return Amplitude("x_y_xi", func, label=label)

    @staticmethod
    def product_x_xi(a1, a2, label="a1(x,xi)a2(y)"):
        return Amplitude(
            "x_xi*y", lambda x, y, xi: a1(x, xi) * a2(y),
            factor_main=a1, factor_scalar=a2, label=label,
        )

    @staticmethod
    def product_y_xi(a1, a2, label="a2(x)a1(y,xi)"):
        return Amplitude(
            "x*y_xi", lambda x, y, xi: a2(x) * a1(y, xi),
            factor_main=a1, factor_scalar=a2, label=label,
        )


# ---------------------------------------------------------------------------
# multipliers
# ---------------------------------------------------------------------------


def evaluate_multiplier(a, grid: Grid, value_at_zero=None) -> np.ndarray:
    """Sample a frequency multiplier on the grid (math order).

    ``a`` is a callable on stacked vectors or a precomputed array.  The zero
    frequency must either evaluate finitely or be supplied explicitly via
    ``value_at_zero`` (mandatory for homogeneous symbols with a singularity
    at the origin).  A non-finite value anywhere else is an error naming
    the offending frequency.
    """
    if callable(a):
        with np.errstate(all="ignore"):
            vals = np.asarray(a(grid.frequency_mesh()), dtype=np.complex128)
        if vals.shape != grid.shape:
            raise ValueError(f"multiplier returned shape {vals.shape}, expected {grid.shape}")
    else:
        vals = np.asarray(a, dtype=np.complex128).reshape(grid.shape).copy()
    zero_index = (grid.points_per_axis // 2,) * grid.dim
    if value_at_zero is not None:
        vals = np.array(vals)
        vals[zero_index] = value_at_zero
    bad = ~np.isfinite(vals)
    if np.any(bad):
        where = np.argwhere(bad)[0]
        freq = grid.frequency_mesh()[tuple(where)]
        raise ValueError(
            f"multiplier is not finite at frequency {freq.tolist()} "
            "(supply value_at_zero for homogeneous symbols)"
        )
    return vals


def apply_multiplier(a, u: Field, value_at_zero=None, zero_nyquist_mode: bool = False) -> Field:
    """Apply the Fourier multiplier ``u -> F^{-1}[a(xi) F u]``."""
    vals = evaluate_multiplier(a, u.grid, value_at_zero)
    spec = forward_transform(u).values * vals
    if zero_nyquist_mode:
        spec = zero_nyquist(spec, u.grid)
    return inverse_transform(SpectralField(u.grid, spec))


def multiplier_operator(
    grid: Grid, a, value_at_zero=None, zero_nyquist_mode: bool = False, label: str = "multiplier"
) -> OperatorHandle:
    vals = evaluate_multiplier(a, grid, value_at_zero)
    if zero_nyquist_mode:
        vals = zero_nyquist(vals, grid)

    def _apply(u: Field, table=vals) -> Field:
        spec = forward_transform(u).values * table
        return inverse_transform(SpectralField(grid, spec))

    def _adjoint(u: Field) -> Field:
        spec = forward_transform(u).values * np.conj(vals)
        return inverse_transform(SpectralField(grid, spec))

    return OperatorHandle(grid, _apply, _adjoint, label=label)


def multiplication_operator(grid: Grid, w, label: str = "multiplication") -> OperatorHandle:
    """Pointwise multiplication by a spatial weight (callable or array)."""
    if callable(w):
        vals = np.asarray(w(grid.spatial_mesh()), dtype=np.complex128)
    else:
        vals = np.asarray(w, dtype=np.complex128).reshape(grid.shape)

    def _apply(u: Field) -> Field:
        return Field(grid, u.values * vals)

    def _adjoint(u: Field) -> Field:
        return Field(grid, u.values * np.conj(vals))

    return OperatorHandle(grid, _apply, _adjoint, label=label)


def weight_operator(grid: Grid, m: float) -> OperatorHandle:
    """Multiplication by the bracket weight ``<x>^m``."""
    from fiolab.lattice import bracket

    vals = bracket(grid.spatial_mesh()) ** m
    return multiplication_operator(grid, vals, label=f"<x>^{m}")


def identity_operator(grid: Grid) -> OperatorHandle:
    return OperatorHandle(grid, lambda u: u, lambda u: u, label="identity")


# ---------------------------------------------------------------------------
# canonical transforms
# ---------------------------------------------------------------------------


def _canonical_targets(m: CanonicalMap, grid: Grid, direction: str) -> np.ndarray:
    freqs = grid.frequency_vectors()
    mags = np.linalg.norm(freqs, axis=-1)
    targets = np.zeros_like(freqs)
    nz = mags > 0
    if direction == "forward":
        targets[nz] = m.forward(freqs[nz])
    elif direction == "inverse":
        targets[nz] = invert_map_batch(m, freqs[nz])
    else:
        raise ValueError(f"direction must be 'forward' or 'inverse', got {direction!r}")
    return targets


class _CanonicalApplier:
    """Precomputed machinery for one (map, grid, direction) triple."""

    def __init__(self, m: CanonicalMap, grid: Grid, direction: str, tail_threshold: float):
        self.grid = grid
        self.tail_threshold = tail_threshold
        targets = _canonical_targets(m, grid, direction)
        xi_max = grid.dxi * grid.points_per_axis / 2.0
        in_box = np.all(np.abs(targets) < xi_max * (1.0 - 1e-13), axis=-1)
        in_box &= ~nyquist_mask(grid).reshape(-1)
        self.in_box = in_box
        self.table = TrigTable(grid, targets[in_box])
        self.out_of_box_count = int(np.sum(~in_box))

    def _tail(self, spec: np.ndarray) -> float:
        return spectral_tail_fraction(SpectralField(self.grid, spec))

    def apply(self, u: Field) -> Field:
        grid = self.grid
        spec_raw = forward_transform(u).values
        tail = self._tail(spec_raw)
        spec_in = zero_nyquist(spec_raw, grid)
        if tail > self.tail_threshold:
            warnings.warn(
                f"spectral tail fraction {tail:.3e} exceeds {self.tail_threshold:.1e}; "
                "canonical transform accuracy is limited by the tail",
                SpectralTailWarning,
                stacklevel=3,
            )
        filtered = inverse_transform(SpectralField(grid, spec_in))
        out_spec = np.zeros(grid.size, dtype=np.complex128)
        out_spec[self.in_box] = self.table.analysis(filtered.values)
        out = inverse_transform(SpectralField(grid, out_spec.reshape(grid.shape)))
        meta = {
            "spectral_tail": tail,
            "tail_warning": tail > self.tail_threshold,
            "out_of_box_modes": self.out_of_box_count,
        }
        return Field(grid, out.values, meta)

    def apply_adjoint(self, v: Field) -> Field:
        grid = self.grid
        spec = zero_nyquist(forward_transform(v).values, grid).reshape(-1)
        scattered = self.table.synthesis(spec[self.in_box])
        out_spec = zero_nyquist(forward_transform(Field(grid, scattered)).values, grid)
        return inverse_transform(SpectralField(grid, out_spec))


def apply_canonical_transform(
    m: CanonicalMap,
    u: Field,
    direction: Literal["forward", "inverse"] = "forward",
    tail_threshold: float = 1e-6,
) -> Field:
    """Canonical transform ``u -> F^{-1}[(F u)(psi(xi))]`` (or with psi^{-1}).

    The spectrum of ``u`` is evaluated at the mapped frequency points by
    exact trigonometric sums, at O(N^{2n}) cost.  The result metadata
    records the input spectral tail and the number of mapped points that
    left the frequency box.
    """
    return _CanonicalApplier(m, u.grid, direction, tail_threshold).apply(u)


def canonical_transform_operator(
    m: CanonicalMap,
    grid: Grid,
    direction: Literal["forward", "inverse"] = "forward",
    tail_threshold: float = np.inf,
) -> OperatorHandle:
    """Reusable canonical-transform handle with precomputed phase tables.

    The handle suppresses tail warnings by default (tail_threshold=inf)
    since norm estimation drives it with rough random fields on purpose.
    """
    applier = _CanonicalApplier(m, grid, direction, tail_threshold)
    return OperatorHandle(
        grid,
        applier.apply,
        applier.apply_adjoint,
        label=f"T[{m.label}]" if direction == "forward" else f"T^-1[{m.label}]",
    )


# ---------------------------------------------------------------------------
# pseudo-differential operators
# ---------------------------------------------------------------------------


def _pseudo_forward(a_func, grid: Grid, u: Field) -> Field:
    spec = forward_transform(u).values.reshape(-1)
    xs = grid.spatial_vectors()
    xis = grid.frequency_vectors()

    def block(sl):
        x_blk = xs[sl][:, np.newaxis, :]
        phase = np.exp(1j * (xs[sl] @ xis.T))
        return phase * np.asarray(a_func(x_blk, xis[np.newaxis, :, :]), dtype=np.complex128)

    vals = kernel_apply(block, spec, grid.spectral_weight, grid.size)
    return Field(grid, vals.reshape(grid.shape))


def _pseudo_adjoint(a_func, grid: Grid, v: Field) -> Field:
    vv = v.values.reshape(-1)
    xs = grid.spatial_vectors()
    xis = grid.frequency_vectors()

    def block(sl):
        x_blk = xs[sl][:, np.newaxis, :]
        phase = np.exp(1j * (xs[sl] @ xis.T))
        return phase * np.asarray(a_func(x_blk, xis[np.newaxis, :, :]), dtype=np.complex128)

    spec = kernel_apply(block, vv, grid.cell_volume, grid.size, adjoint=True)
    return inverse_transform(SpectralField(grid, spec.reshape(grid.shape)))


def apply_pseudo(a: Amplitude, u: Field) -> Field:
    """Pseudo-differential action ``(2pi)^{-n} sum_k e^{i x xi_k} a(x, xi_k) uhat_k dxi^n``."""
    if a.arity != "x_xi":
        raise ValueError(f"apply_pseudo needs an a(x,xi) amplitude, got arity {a.arity!r}")
    return _pseudo_forward(a.factor_main, u.grid, u)


def pseudo_operator(grid: Grid, a: Amplitude, label: str | None = None) -> OperatorHandle:
    if a.arity != "x_xi":
        raise ValueError(f"pseudo_operator needs an a(x,xi) amplitude, got arity {a.arity!r}")
    func = a.factor_main
    return OperatorHandle(
        grid,
        lambda u: _pseudo_forward(func, grid, u),
        lambda v: _pseudo_adjoint(func, grid, v),
        label=label or f"pseudo[{a.label}]",
    )


# ---------------------------------------------------------------------------
# oscillatory integral operators
# ---------------------------------------------------------------------------


def _oscillatory_kernel(phase, amp, out_points, in_points):
    def block(sl):
        o_blk = out_points[sl][:, np.newaxis, :]
        i_blk = in_points[np.newaxis, :, :]
        ker = np.exp(1j * np.asarray(phase(o_blk, i_blk), dtype=float))
        if amp is not None:
            ker = ker * np.asarray(amp(o_blk, i_blk), dtype=np.complex128)
        return ker

    return block


def apply_oscillatory(phase, amplitude, u: Field) -> Field:
    """Oscillatory quadrature ``sum_l exp(i phi(x_j, y_l)) a(x_j, y_l) u_l dy^n``.

    ``phase`` and ``amplitude`` are callables on stacked vectors (broadcast
    against each other); output lives on the same spatial grid.  Dense
    quadrature, intended for modest grids.
    """
    grid = u.grid
    pts = grid.spatial_vectors()
    block = _oscillatory_kernel(phase, amplitude, pts, pts)
    vals = kernel_apply(block, u.values, grid.cell_volume, grid.size)
    return Field(grid, vals.reshape(grid.shape))


def oscillatory_operator(grid: Grid, phase, amplitude, label: str = "oscillatory") -> OperatorHandle:
    pts = grid.spatial_vectors()
    block = _oscillatory_kernel(phase, amplitude, pts, pts)

    def _apply(u: Field) -> Field:
        vals = kernel_apply(block, u.values, grid.cell_volume, grid.size)
        return Field(grid, vals.reshape(grid.shape))

    def _adjoint(v: Field) -> Field:
        vals = kernel_apply(block, v.values, grid.cell_volume, grid.size, adjoint=True)
        return Field(grid, vals.reshape(grid.shape))

    return OperatorHandle(grid, _apply, _adjoint, label=label)


def _oscillatory_to_frequency(phase_fn, amp_fn, u: Field) -> np.ndarray:
    """Inner analysis operator of the factorized integral-operator paths.

    Computes ``I[xi_k] = sum_l exp(i phi(y_l, xi_k)) a(y_l, xi_k) u_l dy^n``
    with output on the frequency grid (math order).
    """
    grid = u.grid
    ys = grid.spatial_vectors()
    xis = grid.frequency_vectors()

    def block(sl):
        xi_blk = xis[sl][:, np.newaxis, :]
        y_blk = ys[np.newaxis, :, :]
        ker = np.exp(1j * np.asarray(phase_fn(y_blk, xi_blk), dtype=float))
        if amp_fn is not None:
            ker = ker * np.asarray(amp_fn(y_blk, xi_blk), dtype=np.complex128)
        return ker

    return kernel_apply(block, u.values, grid.cell_volume, grid.size).reshape(grid.shape)


def _oscillatory_from_frequency(phase_fn, amp_fn, spec: np.ndarray, grid: Grid) -> np.ndarray:
    """Adjoint of :func:`_oscillatory_to_frequency` (spectral weights)."""
    ys = grid.spatial_vectors()
    xis = grid.frequency_vectors()

    def block(sl):
        xi_blk = xis[sl][:, np.newaxis, :]
        y_blk = ys[np.newaxis, :, :]
        ker = np.exp(1j * np.asarray(phase_fn(y_blk, xi_blk), dtype=float))
        if amp_fn is not None:
            ker = ker * np.asarray(amp_fn(y_blk, xi_blk), dtype=np.complex128)
        return ker

    return kernel_apply(
        block, spec, grid.spectral_weight, grid.size, adjoint=True
    ).reshape(grid.shape)


# ---------------------------------------------------------------------------
# phase-and-amplitude integral operators (factorized application paths)
# ---------------------------------------------------------------------------


def _fio_full_arity(phase: PhaseFunction, amplitude: Amplitude, u: Field) -> Field:
    grid = u.grid
    if grid.dim != 1:
        raise ValueError("full-arity a(x,y,xi) integral operators are restricted to dim 1")
    if grid.points_per_axis > FULL_ARITY_MAX_POINTS:
        cost = grid.points_per_axis**3
        raise ValueError(
            f"full-arity path needs a dense {grid.points_per_axis}^3 = {cost} element sum; "
            f"refusing above N = {FULL_ARITY_MAX_POINTS}"
        )
    x = grid.spatial_vectors()
    xi = grid.frequency_vectors()
    phase_lk = np.exp(1j * phase.evaluate(x[:, np.newaxis, :], xi[np.newaxis, :, :]))
    amp = amplitude.evaluate(
        x[:, np.newaxis, np.newaxis, :],
        x[np.newaxis, :, np.newaxis, :],
        xi[np.newaxis, np.newaxis, :, :],
    )
    tmp = np.einsum("lk,jlk,l->jk", phase_lk, np.asarray(amp, dtype=np.complex128), u.values)
    osc = np.exp(1j * (x @ xi.T))
    out = np.einsum("jk,jk->j", osc, tmp) * grid.cell_volume * grid.dxi**grid.dim
    return Field(grid, out)


def apply_fio(phase: PhaseFunction, amplitude: Amplitude, u: Field) -> Field:
    """Integral operator ``int int e^{i(x.xi + phi(y,xi))} a u(y) dy dxi``.

    Dispatches on the amplitude arity:

    * ``a(x,xi)``: factorized as ``(2pi)^n a(X,D) F^{-1} I_phi`` where
      ``I_phi`` maps the field to frequency samples;
    * ``a(y,xi)``: factorized as ``(2pi)^n F^{-1} I_phi`` with the amplitude
      inside the analysis sum;
    * product arities peel the scalar factor off exactly;
    * full arity runs the dense triple sum (dim 1, small N only).
    """
    grid = u.grid
    two_pi_n = (2.0 * np.pi) ** grid.dim
    if amplitude.arity == "x_xi":
        inner = _oscillatory_to_frequency(phase.evaluate, None, u)
        w = inverse_transform(SpectralField(grid, inner))
        return _pseudo_forward(amplitude.factor_main, grid, w) * two_pi_n
    if amplitude.arity == "y_xi":
        inner = _oscillatory_to_frequency(phase.evaluate, amplitude.factor_main, u)
        return inverse_transform(SpectralField(grid, inner)) * two_pi_n
    if amplitude.arity == "x_xi*y":
        scaled = Field(grid, u.values * amplitude.factor_scalar(grid.spatial_mesh()))
        return apply_fio(phase, Amplitude.of_x_xi(amplitude.factor_main), scaled)
    if amplitude.arity == "x*y_xi":
        out = apply_fio(phase, Amplitude.of_y_xi(amplitude.factor_main), u)
        return Field(grid, out.values * amplitude.factor_scalar(grid.spatial_mesh()))
    return _fio_full_arity(phase, amplitude, u)


def fio_operator(grid: Grid, phase: PhaseFunction, amplitude: Amplitude) -> OperatorHandle:
    """Handle form of :func:`apply_fio` with the exact discrete adjoint."""
    two_pi_n = (2.0 * np.pi) ** grid.dim

    def _apply(u: Field) -> Field:
        return apply_fio(phase, amplitude, u)

    if amplitude.arity == "y_xi":

        def _adjoint(v: Field) -> Field:
            spec = forward_transform(v).values
            vals = _oscillatory_from_frequency(phase.evaluate, amplitude.factor_main, spec, grid)
            return Field(grid, vals * two_pi_n)

    elif amplitude.arity == "x_xi":

        def _adjoint(v: Field) -> Field:
            w = _pseudo_adjoint(amplitude.factor_main, grid, v)
            spec = forward_transform(w).values
            vals = _oscillatory_from_frequency(phase.evaluate, None, spec, grid)
            return Field(grid, vals * two_pi_n)

    else:

        def _adjoint(v: Field) -> Field:
            raise NotImplementedError(
                f"adjoint not implemented for amplitude arity {amplitude.arity!r}"
            )

    return OperatorHandle(grid, _apply, _adjoint, label=f"fio[{amplitude.label}]")


# ---------------------------------------------------------------------------
# handles for matrices and kernels (norm-estimation currency)
# ---------------------------------------------------------------------------


def matrix_operator(grid: Grid, matrix: np.ndarray, label: str = "matrix") -> OperatorHandle:
    """Plain coefficient-space matrix action (uniform grid weights cancel)."""
    m = np.asarray(matrix, dtype=np.complex128)
    if m.shape != (grid.size, grid.size):
        raise ValueError(f"matrix shape {m.shape} does not match grid size {grid.size}")
    mh = np.conj(m.T)
    return OperatorHandle(
        grid,
        lambda u: Field(grid, (m @ u.values.reshape(-1)).reshape(grid.shape)),
        lambda v: Field(grid, (mh @ v.values.reshape(-1)).reshape(grid.shape)),
        label=label,
    )


def kernel_operator(grid: Grid, kernel: np.ndarray, label: str = "kernel") -> OperatorHandle:
    """Integral-kernel action ``sum_l K[j,l] u_l dy^n`` with its adjoint."""
    k = np.asarray(kernel, dtype=np.complex128)
    if k.shape != (grid.size, grid.size):
        raise ValueError(f"kernel shape {k.shape} does not match grid size {grid.size}")
    kh = np.conj(k.T)
    vol = grid.cell_volume
    return OperatorHandle(
        grid,
        lambda u: Field(grid, (k @ u.values.reshape(-1)).reshape(grid.shape) * vol),
        lambda v: Field(grid, (kh @ v.values.reshape(-1)).reshape(grid.shape) * vol),
        label=label,
    )


# ---------------------------------------------------------------------------
# algebra on handles
# ---------------------------------------------------------------------------


def compose(*handles: OperatorHandle) -> OperatorHandle:
    """Composition ``handles[0] o handles[1] o ...`` (rightmost acts first)."""
    if not handles:
        raise ValueError("compose needs at least one handle")
    grid = handles[0].grid

    def _apply(u: Field) -> Field:
        for h in reversed(handles):
            u = h.apply(u)
        return u

    def _adjoint(v: Field) -> Field:
        for h in handles:
            v = h.apply_adjoint(v)
        return v

    return OperatorHandle(grid, _apply, _adjoint, label=" o ".join(h.label for h in handles))


def scale(c: complex, h: OperatorHandle) -> OperatorHandle:
    return OperatorHandle(
        h.grid,
        lambda u: h.apply(u) * c,
        lambda v: h.apply_adjoint(v) * np.conj(c),
        label=f"{c} * {h.label}",
    )


def add(*handles: OperatorHandle) -> OperatorHandle:
    if not handles:
        raise ValueError("add needs at least one handle")
    grid = handles[0].grid

    def _apply(u: Field) -> Field:
        acc = handles[0].apply(u)
        for h in handles[1:]:
            acc = acc + h.apply(u)
        return acc

    def _adjoint(v: Field) -> Field:
        acc = handles[0].apply_adjoint(v)
        for h in handles[1:]:
            acc = acc + h.apply_adjoint(v)
        return acc

    return OperatorHandle(grid, _apply, _adjoint, label=" + ".join(h.label for h in handles))
