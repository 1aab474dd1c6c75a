"""Homogeneous symbols, Gauss-map canonical phases, and hypothesis checks.

A degree-1 positively homogeneous symbol ``p`` is stored with analytic
gradient and Hessian callables so that the canonical frequency map

    psi(xi) = p(xi) * grad p(xi) / |grad p(xi)|

and its Jacobian can be evaluated in closed form.  The map sends the level
surface ``{p = 1}`` to the unit sphere along normals; its numerical inverse
is a Newton iteration reduced to the unit sphere by homogeneity.

Built-in families (Euclidean norm, anisotropic quadratic forms, smooth
directional perturbations) carry exact derivatives.  Symbols constructed
from a bare callable fall back to central finite differences and are marked
``uses_fd_derivatives`` so downstream reports can flag the reduced accuracy.

Callable convention: all symbol/map callables accept stacked vectors of
shape ``(..., n)`` and return shape ``(...)`` (or ``(..., n)`` / ``(..., n, n)``
for gradients / Hessians).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

__all__ = [
    "HomogeneousSymbol",
    "CanonicalMap",
    "SymbolClassSpec",
    "SymbolClassReport",
    "JacobianReport",
    "CurvatureReport",
    "MapInversionError",
    "euclidean_symbol",
    "quadratic_form_symbol",
    "perturbed_symbol",
    "symbol_from_callable",
    "symbol_from_config",
    "identity_map",
    "scaling_map",
    "linear_map",
    "gauss_phase",
    "invert_map",
    "invert_map_batch",
    "check_jacobian_bound",
    "check_curvature",
    "check_symbol_class",
    "sphere_points",
]


class MapInversionError(RuntimeError):
    """Newton inversion of a canonical map failed to converge."""


@dataclass(frozen=True)
class HomogeneousSymbol:
    """Positive, degree-1 homogeneous function with derivative access."""

    dim: int
    evaluate: Callable[[np.ndarray], np.ndarray]
    gradient: Callable[[np.ndarray], np.ndarray]
    hessian: Callable[[np.ndarray], np.ndarray]
    label: str = "symbol"
    uses_fd_derivatives: bool = False


@dataclass(frozen=True)
class CanonicalMap:
    """Homogeneous frequency diffeomorphism with Jacobian access.

    ``inverse`` may be None, in which case :func:`invert_map` runs a Newton
    iteration seeded by ``newton_seed`` (defaults to the direction itself).
    The map value at the origin is defined as 0 by the continuity limit.
    """

    dim: int
    forward: Callable[[np.ndarray], np.ndarray]
    jacobian: Callable[[np.ndarray], np.ndarray]
    inverse: Callable[[np.ndarray], np.ndarray] | None = None
    newton_seed: Callable[[np.ndarray], np.ndarray] | None = None
    label: str = "map"


# ---------------------------------------------------------------------------
# built-in symbol families
# ---------------------------------------------------------------------------


def euclidean_symbol(dim: int) -> HomogeneousSymbol:
    """The Euclidean norm ``p(xi) = |xi|``."""

    def ev(xi):
        xi = np.asarray(xi, dtype=float)
        return np.sqrt(np.sum(xi * xi, axis=-1))

    def grad(xi):
        xi = np.asarray(xi, dtype=float)
        r = ev(xi)[..., np.newaxis]
        return xi / r

    def hess(xi):
        xi = np.asarray(xi, dtype=float)
        r = ev(xi)
        eye = np.eye(dim)
        outer = xi[..., :, np.newaxis] * xi[..., np.newaxis, :]
        return eye / r[..., np.newaxis, np.newaxis] - outer / (r**3)[..., np.newaxis, np.newaxis]

    return HomogeneousSymbol(dim, ev, grad, hess, label="euclidean")


def quadratic_form_symbol(matrix: np.ndarray) -> HomogeneousSymbol:
    """Anisotropic norm ``p(xi) = sqrt(xi . A xi)`` for symmetric positive ``A``."""
    a = np.asarray(matrix, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError("quadratic form matrix must be square")
    if not np.allclose(a, a.T):
        raise ValueError("quadratic form matrix must be symmetric")
    eigvals = np.linalg.eigvalsh(a)
    if eigvals[0] <= 0:
        raise ValueError("quadratic form matrix must be positive definite")
    dim = a.shape[0]

    def ev(xi):
        xi = np.asarray(xi, dtype=float)
        return np.sqrt(np.einsum("...i,ij,...j->...", xi, a, xi))

    def grad(xi):
        xi = np.asarray(xi, dtype=float)
        p = ev(xi)[..., np.newaxis]
        return np.einsum("ij,...j->...i", a, xi) / p

    def hess(xi):
        xi = np.asarray(xi, dtype=float)
        p = ev(xi)
        axi = np.einsum("ij,...j->...i", a, xi)
        outer = axi[..., :, np.newaxis] * axi[..., np.newaxis, :]
        return a / p[..., np.newaxis, np.newaxis] - outer / (p**3)[..., np.newaxis, np.newaxis]

    return HomogeneousSymbol(dim, ev, grad, hess, label="quadratic_form")


def perturbed_symbol(
    base: HomogeneousSymbol, bump_amplitude: float, bump_direction
) -> HomogeneousSymbol:
    """Smooth directional perturbation ``p(xi) = base(xi) + eps (d.xi)^2 / |xi|``.

    The bump is degree-1 homogeneous and smooth away from the origin.  For
    small ``eps`` relative to the base symbol the result stays positive; a
    coarse positivity check on sphere samples rejects wild amplitudes.
    """
    d = np.asarray(bump_direction, dtype=float)
    if d.shape != (base.dim,):
        raise ValueError(f"bump direction must have shape ({base.dim},)")
    d = d / np.linalg.norm(d)
    eps = float(bump_amplitude)

    def ev(xi):
        xi = np.asarray(xi, dtype=float)
        r = np.sqrt(np.sum(xi * xi, axis=-1))
        s = np.einsum("...i,i->...", xi, d)
        return base.evaluate(xi) + eps * s * s / r

    def grad(xi):
        xi = np.asarray(xi, dtype=float)
        r = np.sqrt(np.sum(xi * xi, axis=-1))
        s = np.einsum("...i,i->...", xi, d)
        term = 2.0 * s[..., np.newaxis] * d / r[..., np.newaxis]
        term = term - (s * s / r**3)[..., np.newaxis] * xi
        return base.gradient(xi) + eps * term

    def hess(xi):
        xi = np.asarray(xi, dtype=float)
        r = np.sqrt(np.sum(xi * xi, axis=-1))
        s = np.einsum("...i,i->...", xi, d)
        r = r[..., np.newaxis, np.newaxis]
        s = s[..., np.newaxis, np.newaxis]
        dd = d[:, np.newaxis] * d[np.newaxis, :]
        dx = d[:, np.newaxis] * xi[..., np.newaxis, :] + xi[..., :, np.newaxis] * d[np.newaxis, :]
        xx = xi[..., :, np.newaxis] * xi[..., np.newaxis, :]
        eye = np.eye(base.dim)
        term = 2.0 * dd / r - 2.0 * s * dx / r**3 - s * s * eye / r**3 + 3.0 * s * s * xx / r**5
        return base.hessian(xi) + eps * term

    sym = HomogeneousSymbol(
        base.dim, ev, grad, hess, label=f"perturbed({base.label})",
        uses_fd_derivatives=base.uses_fd_derivatives,
    )
    samples = sphere_points(base.dim, 64)
    if np.min(sym.evaluate(samples)) <= 0:
        raise ValueError("perturbation amplitude destroys positivity of the symbol")
    return sym


def symbol_from_callable(
    func: Callable[[np.ndarray], np.ndarray], dim: int, label: str = "custom", fd_step: float = 1e-5
) -> HomogeneousSymbol:
    """Wrap a bare callable; derivatives fall back to central differences."""

    def grad(xi):
        xi = np.asarray(xi, dtype=float)
        out = np.empty(xi.shape)
        for a in range(dim):
            e = np.zeros(dim)
            e[a] = fd_step
            out[..., a] = (func(xi + e) - func(xi - e)) / (2.0 * fd_step)
        return out

    def hess(xi):
        xi = np.asarray(xi, dtype=float)
        out = np.empty(xi.shape + (dim,))
        for a in range(dim):
            e = np.zeros(dim)
            e[a] = fd_step
            out[..., a] = (grad(xi + e) - grad(xi - e)) / (2.0 * fd_step)
        return 0.5 * (out + np.swapaxes(out, -1, -2))

    return HomogeneousSymbol(dim, func, grad, hess, label=label, uses_fd_derivatives=True)


def symbol_from_config(config: dict, dim: int) -> HomogeneousSymbol:
    """Build a symbol from a name + parameters mapping (CLI front door)."""
    name = config.get("name")
    if name == "euclidean":
        return euclidean_symbol(dim)
    if name == "quadratic_form":
        if "diag" in config:
            matrix = np.diag(np.asarray(config["diag"], dtype=float))
        elif "matrix" in config:
            matrix = np.asarray(config["matrix"], dtype=float)
        else:
            raise ValueError("quadratic_form symbol needs 'diag' or 'matrix'")
        if matrix.shape != (dim, dim):
            raise ValueError(f"quadratic form matrix shape {matrix.shape} does not match dim {dim}")
        return quadratic_form_symbol(matrix)
    if name == "perturbed":
        base = symbol_from_config(config["base"], dim)
        return perturbed_symbol(base, config["bump_amplitude"], config["bump_direction"])
    raise ValueError(f"unknown symbol family: {name!r}")


# ---------------------------------------------------------------------------
# canonical maps
# ---------------------------------------------------------------------------


def identity_map(dim: int) -> CanonicalMap:
    eye = np.eye(dim)

    def fwd(xi):
        return np.asarray(xi, dtype=float).copy()

    def jac(xi):
        xi = np.asarray(xi, dtype=float)
        return np.broadcast_to(eye, xi.shape + (dim,)).copy()

    return CanonicalMap(dim, fwd, jac, inverse=fwd, label="identity")


def scaling_map(c: float, dim: int) -> CanonicalMap:
    if c <= 0:
        raise ValueError("scaling factor must be positive")
    return linear_map(c * np.eye(dim), label=f"scaling({c})")


def linear_map(matrix: np.ndarray, label: str = "linear") -> CanonicalMap:
    """Map ``xi -> A xi`` for an invertible matrix (rotations, dilations)."""
    a = np.asarray(matrix, dtype=float)
    dim = a.shape[0]
    a_inv = np.linalg.inv(a)

    def fwd(xi):
        return np.einsum("ij,...j->...i", a, np.asarray(xi, dtype=float))

    def inv(xi):
        return np.einsum("ij,...j->...i", a_inv, np.asarray(xi, dtype=float))

    def jac(xi):
        xi = np.asarray(xi, dtype=float)
        return np.broadcast_to(a, xi.shape[:-1] + (dim, dim)).copy()

    return CanonicalMap(dim, fwd, jac, inverse=inv, label=label)


def gauss_phase(p: HomogeneousSymbol, check_samples: int = 64) -> CanonicalMap:
    """Canonical map ``psi(xi) = p(xi) grad p(xi) / |grad p(xi)|``.

    The Jacobian is assembled analytically from the symbol's gradient and
    Hessian.  Construction fails if the gradient degenerates on sampled
    directions of the unit sphere.
    """
    dim = p.dim
    samples = sphere_points(dim, check_samples)
    gnorms = np.linalg.norm(p.gradient(samples), axis=-1)
    if np.min(gnorms) < 1e-8:
        worst = samples[int(np.argmin(gnorms))]
        raise ValueError(
            f"gradient of symbol '{p.label}' degenerates (|grad p| = {np.min(gnorms):.3e} "
            f"at direction {worst.tolist()})"
        )

    def fwd(xi):
        xi = np.asarray(xi, dtype=float)
        g = p.gradient(xi)
        gn = np.linalg.norm(g, axis=-1)[..., np.newaxis]
        return p.evaluate(xi)[..., np.newaxis] * g / gn

    def jac(xi):
        # d(p u)/dxi = u grad p^T + p (I - u u^T) H / |grad p|,  u = grad p/|grad p|
        xi = np.asarray(xi, dtype=float)
        g = p.gradient(xi)
        h = p.hessian(xi)
        gn = np.linalg.norm(g, axis=-1)
        u = g / gn[..., np.newaxis]
        proj = np.eye(dim) - u[..., :, np.newaxis] * u[..., np.newaxis, :]
        term1 = u[..., :, np.newaxis] * g[..., np.newaxis, :]
        term2 = (
            p.evaluate(xi)[..., np.newaxis, np.newaxis]
            * np.einsum("...ik,...kj->...ij", proj, h)
            / gn[..., np.newaxis, np.newaxis]
        )
        return term1 + term2

    def seed(direction):
        direction = np.asarray(direction, dtype=float)
        return direction / p.evaluate(direction)[..., np.newaxis]

    return CanonicalMap(dim, fwd, jac, inverse=None, newton_seed=seed, label=f"gauss({p.label})")


def invert_map(m: CanonicalMap, eta, tol: float = 1e-10, max_iter: int = 60) -> np.ndarray:
    """Solve ``psi(xi) = eta`` for a single frequency vector ``eta != 0``.

    Homogeneity reduces the problem to the unit sphere:
    ``psi^{-1}(eta) = |eta| psi^{-1}(eta/|eta|)``.
    """
    eta = np.asarray(eta, dtype=float)
    result = invert_map_batch(m, eta[np.newaxis, :], tol=tol, max_iter=max_iter)
    return result[0]


def invert_map_batch(
    m: CanonicalMap, eta: np.ndarray, tol: float = 1e-10, max_iter: int = 60
) -> np.ndarray:
    """Vectorized inverse of a canonical map at stacked points (M, n).

    Zero rows map to zero (continuity convention).  Raises
    :class:`MapInversionError` naming the worst direction on failure.
    """
    eta = np.asarray(eta, dtype=float)
    out = np.zeros_like(eta)
    mags = np.linalg.norm(eta, axis=-1)
    active = mags > 0
    if not np.any(active):
        return out
    direction = eta[active] / mags[active][..., np.newaxis]

    if m.inverse is not None:
        out[active] = m.inverse(direction) * mags[active][..., np.newaxis]
        return out

    if m.newton_seed is not None:
        xi = m.newton_seed(direction)
    else:
        xi = direction.copy()
    residual = m.forward(xi) - direction
    for _ in range(max_iter):
        err = np.linalg.norm(residual, axis=-1)
        todo = err > tol
        if not np.any(todo):
            break
        jac = m.jacobian(xi[todo])
        step = np.linalg.solve(jac, residual[todo][..., np.newaxis])[..., 0]
        xi[todo] = xi[todo] - step
        residual[todo] = m.forward(xi[todo]) - direction[todo]
    err = np.linalg.norm(residual, axis=-1)
    if np.any(err > tol):
        worst = int(np.argmax(err))
        raise MapInversionError(
            f"inversion of map '{m.label}' did not converge after {max_iter} iterations "
            f"(residual {err[worst]:.3e} at direction {direction[worst].tolist()})"
        )
    out[active] = xi * mags[active][..., np.newaxis]
    return out


# ---------------------------------------------------------------------------
# hypothesis checks
# ---------------------------------------------------------------------------


def sphere_points(dim: int, count: int) -> np.ndarray:
    """Deterministic quasi-uniform directions on the unit sphere, shape (M, n).

    dim 1 uses {-1, +1}; dim 2 uniform angles; dim 3 a Fibonacci lattice;
    higher dimensions fall back to seeded normalized Gaussians (deterministic
    for a given count).
    """
    if count < 1:
        raise ValueError("sample count must be >= 1")
    if dim == 1:
        pts = np.array([[1.0], [-1.0]])
        return pts[: max(count, 1)] if count < 2 else pts
    if dim == 2:
        theta = 2.0 * np.pi * np.arange(count) / count
        return np.stack([np.cos(theta), np.sin(theta)], axis=-1)
    if dim == 3:
        i = np.arange(count)
        z = 1.0 - (2.0 * i + 1.0) / count
        golden = np.pi * (3.0 - np.sqrt(5.0))
        phi = golden * i
        rho = np.sqrt(np.maximum(1.0 - z * z, 0.0))
        return np.stack([rho * np.cos(phi), rho * np.sin(phi), z], axis=-1)
    rng = np.random.default_rng(count)
    pts = rng.standard_normal((count, dim))
    return pts / np.linalg.norm(pts, axis=-1, keepdims=True)


@dataclass(frozen=True)
class JacobianReport:
    min_abs_det: float
    argmin_direction: tuple
    samples: int
    fd_derivatives: bool


def check_jacobian_bound(m: CanonicalMap, directions: int) -> JacobianReport:
    """Minimum ``|det d psi|`` over sampled unit-sphere directions.

    Degree-1 homogeneity of the map makes the Jacobian determinant
    homogeneous of degree 0, so sphere sampling covers all scales.
    """
    pts = sphere_points(m.dim, directions)
    dets = np.abs(np.linalg.det(m.jacobian(pts)))
    k = int(np.argmin(dets))
    return JacobianReport(
        min_abs_det=float(dets[k]),
        argmin_direction=tuple(pts[k].tolist()),
        samples=pts.shape[0],
        fd_derivatives=False,
    )


@dataclass(frozen=True)
class CurvatureReport:
    min_abs_curvature: float
    argmin_direction: tuple
    samples: int
    flat_flag: bool
    fd_derivatives: bool
    degenerate_directions: tuple = ()


def _level_set_curvature(p: HomogeneousSymbol, points: np.ndarray) -> np.ndarray:
    """Gaussian curvature of ``{p = p(point)}`` at stacked points (M, n)."""
    dim = p.dim
    if dim == 1:
        # the level set is a point; the empty shape operator has det 1
        return np.ones(points.shape[0])
    g = p.gradient(points)
    h = p.hessian(points)
    gn = np.linalg.norm(g, axis=-1)
    nu = g / gn[..., np.newaxis]
    curv = np.empty(points.shape[0])
    for i in range(points.shape[0]):
        # complete nu[i] to an orthonormal basis; columns 1: span the tangent space
        basis = np.linalg.qr(
            np.concatenate([nu[i][:, np.newaxis], np.eye(dim)], axis=1)
        )[0]
        tangent = basis[:, 1:dim]
        shape_op = tangent.T @ h[i] @ tangent / gn[i]
        curv[i] = np.linalg.det(shape_op)
    return curv


def check_curvature(
    p: HomogeneousSymbol, directions: int, flat_tolerance: float = 1e-3
) -> CurvatureReport:
    """Minimum |Gaussian curvature| of the unit level set over direction samples.

    Each sampled direction ``w`` is projected onto the level set as
    ``w / p(w)``; the curvature comes from the shape operator of the level
    set (tangential part of ``hess p / |grad p|``).
    """
    pts = sphere_points(p.dim, directions)
    gnorm = np.linalg.norm(p.gradient(pts), axis=-1)
    bad = gnorm < 1e-8
    degenerate = tuple(tuple(v) for v in pts[bad].tolist())
    good = pts[~bad]
    if good.shape[0] == 0:
        raise ValueError("gradient degenerates at every sampled direction")
    level_points = good / p.evaluate(good)[..., np.newaxis]
    curv = np.abs(_level_set_curvature(p, level_points))
    k = int(np.argmin(curv))
    return CurvatureReport(
        min_abs_curvature=float(curv[k]),
        argmin_direction=tuple(good[k].tolist()),
        samples=pts.shape[0],
        flat_flag=bool(curv[k] < flat_tolerance),
        fd_derivatives=p.uses_fd_derivatives,
        degenerate_directions=degenerate,
    )


# ---------------------------------------------------------------------------
# symbol class verification
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SymbolClassSpec:
    """Finite verification order and tolerance for a symbol class check.

    ``class_kind`` is ``"S00"`` (all mixed derivatives bounded by the
    tolerance) or ``"SG"`` with ``weight_orders = (m1, m2)``, where the
    derivative of orders (beta, gamma) is measured against the weight
    ``<y>^(m1-|beta|) <xi>^(m2-|gamma|)``.
    """

    class_kind: str
    max_order: int
    bound_tolerance: float
    weight_orders: tuple | None = None

    def __post_init__(self):
        if self.class_kind not in ("S00", "SG"):
            raise ValueError(f"unknown symbol class kind {self.class_kind!r}")
        if self.max_order < 1:
            raise ValueError("max_order must be >= 1")
        if self.bound_tolerance <= 0:
            raise ValueError("bound_tolerance must be positive")
        if self.class_kind == "SG" and self.weight_orders is None:
            raise ValueError("SG class requires weight_orders (m1, m2)")


@dataclass(frozen=True)
class SymbolClassReport:
    passes: bool
    worst_constant: float
    worst_orders: tuple  # (alpha, beta) multi-indices over x and xi axes
    worst_point: tuple  # (x, xi) coordinates
    max_order: int
    x_spacing: float
    xi_spacing: float


def _multi_indices(dim: int, total: int):
    """All multi-indices over ``dim`` axes with |alpha| == total."""
    if dim == 1:
        yield (total,)
        return
    for head in range(total + 1):
        for rest in _multi_indices(dim - 1, total - head):
            yield (head,) + rest


def check_symbol_class(
    a: Callable[[np.ndarray, np.ndarray], np.ndarray],
    spec: SymbolClassSpec,
    dim: int,
    x_half_width: float,
    xi_half_width: float,
    x_points: int = 65,
    xi_points: int = 33,
) -> SymbolClassReport:
    """Estimate mixed derivative bounds of an amplitude ``a(x, xi)``.

    The amplitude is sampled on a tensor grid over
    ``[-x_half_width, x_half_width]^n x [-xi_half_width, xi_half_width]^n``
    and every mixed derivative up to total order ``spec.max_order`` is
    estimated by iterated central differences; the supremum of
    ``|derivative| / weight`` over interior samples is the reported worst
    constant.  Passing means the worst constant stays at or below the
    tolerance.  The check is monotone in the order: higher orders only add
    multi-indices.
    """
    r = spec.max_order
    if x_points < 2 * r + 3 or xi_points < 2 * r + 3:
        raise ValueError(
            f"grid too coarse for derivative order {r}: need at least {2 * r + 3} "
            f"points per axis, got ({x_points}, {xi_points})"
        )
    x_axis = np.linspace(-x_half_width, x_half_width, x_points)
    xi_axis = np.linspace(-xi_half_width, xi_half_width, xi_points)
    hx = x_axis[1] - x_axis[0]
    hxi = xi_axis[1] - xi_axis[0]

    x_mesh = np.stack(np.meshgrid(*([x_axis] * dim), indexing="ij"), axis=-1)
    xi_mesh = np.stack(np.meshgrid(*([xi_axis] * dim), indexing="ij"), axis=-1)
    shape_x = x_mesh.shape[:-1]
    shape_xi = xi_mesh.shape[:-1]
    x_full = x_mesh.reshape(shape_x + (1,) * dim + (dim,))
    xi_full = xi_mesh.reshape((1,) * dim + shape_xi + (dim,))
    values = np.asarray(
        a(np.broadcast_to(x_full, shape_x + shape_xi + (dim,)),
          np.broadcast_to(xi_full, shape_x + shape_xi + (dim,))),
        dtype=np.complex128,
    )

    bx = np.sqrt(1.0 + np.sum(x_mesh**2, axis=-1))
    bxi = np.sqrt(1.0 + np.sum(xi_mesh**2, axis=-1))

    # interior window: trim r layers per axis so iterated central stencils
    # never touch one-sided boundary values
    interior = tuple([slice(r, -r)] * (2 * dim))

    worst = -1.0
    worst_orders = ((0,) * dim, (0,) * dim)
    worst_flat = 0
    for total in range(r + 1):
        for alpha_total in range(total + 1):
            beta_total = total - alpha_total
            for alpha in _multi_indices(dim, alpha_total):
                for beta in _multi_indices(dim, beta_total):
                    deriv = values
                    for axis, order in enumerate(alpha):
                        for _ in range(order):
                            deriv = np.gradient(deriv, hx, axis=axis, edge_order=2)
                    for axis, order in enumerate(beta):
                        for _ in range(order):
                            deriv = np.gradient(deriv, hxi, axis=dim + axis, edge_order=2)
                    if spec.class_kind == "S00":
                        weight = 1.0
                    else:
                        m1, m2 = spec.weight_orders
                        wx = bx ** (m1 - alpha_total)
                        wxi = bxi ** (m2 - beta_total)
                        weight = wx.reshape(shape_x + (1,) * dim) * wxi.reshape(
                            (1,) * dim + shape_xi
                        )
                    ratio = np.abs(deriv) / weight
                    ratio_int = ratio[interior]
                    k = int(np.argmax(ratio_int))
                    val = float(ratio_int.reshape(-1)[k])
                    if val > worst:
                        worst = val
                        worst_orders = (alpha, beta)
                        worst_flat = k
    inner_shape = tuple(s - 2 * r for s in shape_x) + tuple(s - 2 * r for s in shape_xi)
    idx = np.unravel_index(worst_flat, inner_shape)
    x_pt = tuple(float(x_axis[idx[i] + r]) for i in range(dim))
    xi_pt = tuple(float(xi_axis[idx[dim + i] + r]) for i in range(dim))
    return SymbolClassReport(
        passes=bool(worst <= spec.bound_tolerance),
        worst_constant=worst,
        worst_orders=worst_orders,
        worst_point=(x_pt, xi_pt),
        max_order=r,
        x_spacing=float(hx),
        xi_spacing=float(hxi),
    )
