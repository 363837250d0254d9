"""Model domains given by analytic defining functions.

Every family exposes its defining function ``rho`` (negative inside) together
with exact first and second derivatives.  Conventions used throughout the
package:

* points and vectors are complex arrays of shape ``(..., N)``;
* ``<z, w> = sum_j z_j * conj(w_j)``;
* the *gradient* of a real function f is the complex vector
  ``df/dx_j + i df/dy_j = 2 df/dconj(z_j)``, i.e. the real gradient written
  in complex coordinates;
* the *complex Hessian* is ``H[j, k] = d^2 f / dconj(z_j) dz_k`` so that the
  Levi form is ``v^* H v``;
* the *real Hessian* acts on realified vectors ``[Re v, Im v]``.
"""
from __future__ import annotations

import configparser
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import ClassVar

import numpy as np

from .errors import ConfigurationError, RegionError

# ---------------------------------------------------------------------------
# complex/real plumbing


def as_point(z, dimension: int | None = None) -> np.ndarray:
    arr = np.asarray(z, dtype=complex)
    if arr.ndim == 0:
        arr = arr.reshape(1)
    if dimension is not None and arr.shape[-1] != dimension:
        raise ConfigurationError(
            f"expected {dimension} complex coordinates, got {arr.shape[-1]}")
    if not np.all(np.isfinite(arr)):
        raise ConfigurationError("non-finite coordinates")
    return arr


def inner(z, w) -> np.ndarray:
    """Hermitian product <z, w> = sum z_j conj(w_j) over the last axis."""
    return np.sum(np.asarray(z) * np.conj(w), axis=-1)


def norm(z) -> np.ndarray:
    return np.sqrt(np.sum(np.abs(np.asarray(z)) ** 2, axis=-1))


def to_real(z) -> np.ndarray:
    z = np.asarray(z, dtype=complex)
    return np.concatenate([z.real, z.imag], axis=-1)


def to_complex(x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    n = x.shape[-1] // 2
    return x[..., :n] + 1j * x[..., n:]


def realify(m: np.ndarray) -> np.ndarray:
    """Real 2N x 2N matrix of a complex-linear map acting on [Re v, Im v]."""
    return np.block([[m.real, -m.imag], [m.imag, m.real]])


def unit(i: int, dimension: int) -> np.ndarray:
    e = np.zeros(dimension, dtype=complex)
    e[i] = 1.0
    return e


# ---------------------------------------------------------------------------
# families


@dataclass(frozen=True)
class DomainSpec:
    """Base class: a domain {rho < 0} in C^N with analytic rho."""

    dimension: int
    holder_exponent: float = field(default=1.0, kw_only=True)

    family: ClassVar[str] = "abstract"

    def __post_init__(self):
        if self.dimension < 1:
            raise ConfigurationError("dimension must be positive")
        if not 0.0 < self.holder_exponent <= 1.0:
            raise ConfigurationError("holder_exponent must lie in (0, 1]")

    # -- defining function -------------------------------------------------
    def rho(self, z):
        raise NotImplementedError

    def gradient(self, z):
        raise NotImplementedError

    def complex_hessian(self, z):
        raise NotImplementedError

    def real_hessian(self, z):
        raise NotImplementedError

    # -- metadata ----------------------------------------------------------
    @property
    def center(self) -> np.ndarray:
        """An interior point used to seed ray casts."""
        return np.zeros(self.dimension, dtype=complex)

    @property
    def enclosing_radius(self) -> float:
        """Radius of an origin-centred ball certified to contain the domain."""
        raise ConfigurationError(f"no enclosing ball configured for {self.family}")

    @property
    def enclosing_center(self) -> np.ndarray:
        return np.zeros(self.dimension, dtype=complex)

    @property
    def reach(self) -> float:
        """Boundary distance below which the closest point is unique."""
        return 0.0

    @property
    def working_radius(self) -> float | None:
        return None

    @property
    def is_convex(self) -> bool:
        return False

    def check_region(self, z) -> None:
        r = self.working_radius
        if r is not None and np.any(norm(z) > r * (1 + 1e-12)):
            raise RegionError(
                f"point outside the working region |z| <= {r} of {self.family}")

    def contains(self, z) -> bool:
        z = as_point(z, self.dimension)
        r = self.working_radius
        if r is not None and norm(z) >= r:
            return False
        return bool(self.rho(z) < 0)

    def describe(self) -> dict:
        return {"family": self.family, "dimension": self.dimension,
                "holder_exponent": self.holder_exponent}


@dataclass(frozen=True)
class UnitBall(DomainSpec):
    family: ClassVar[str] = "unit_ball"

    def rho(self, z):
        return np.sum(np.abs(z) ** 2, axis=-1) - 1.0

    def gradient(self, z):
        return 2.0 * np.asarray(z, dtype=complex)

    def complex_hessian(self, z):
        z = np.asarray(z)
        return np.broadcast_to(np.eye(self.dimension, dtype=complex),
                               z.shape[:-1] + (self.dimension, self.dimension)).copy()

    def real_hessian(self, z):
        z = np.asarray(z)
        n2 = 2 * self.dimension
        return np.broadcast_to(2.0 * np.eye(n2), z.shape[:-1] + (n2, n2)).copy()

    @property
    def enclosing_radius(self):
        return 1.0

    @property
    def reach(self):
        return 1.0

    @property
    def is_convex(self):
        return True


@dataclass(frozen=True)
class Ellipsoid(DomainSpec):
    """Complex ellipsoid sum_j a_j |z_j|^2 < 1."""

    coefficients: tuple = ()
    family: ClassVar[str] = "ellipsoid"

    def __post_init__(self):
        super().__post_init__()
        object.__setattr__(self, "coefficients", tuple(float(a) for a in self.coefficients))
        if len(self.coefficients) != self.dimension:
            raise ConfigurationError("ellipsoid needs one coefficient per coordinate")
        if min(self.coefficients) <= 0:
            raise ConfigurationError("ellipsoid coefficients must be positive")

    @property
    def a(self) -> np.ndarray:
        return np.array(self.coefficients)

    def rho(self, z):
        return np.sum(self.a * np.abs(z) ** 2, axis=-1) - 1.0

    def gradient(self, z):
        return 2.0 * self.a * np.asarray(z, dtype=complex)

    def complex_hessian(self, z):
        z = np.asarray(z)
        h = np.diag(self.a).astype(complex)
        return np.broadcast_to(h, z.shape[:-1] + h.shape).copy()

    def real_hessian(self, z):
        z = np.asarray(z)
        h = np.diag(np.concatenate([2 * self.a, 2 * self.a]))
        return np.broadcast_to(h, z.shape[:-1] + h.shape).copy()

    @property
    def linearization(self) -> np.ndarray:
        """Diagonal of the complex-linear map sending the ellipsoid onto the ball."""
        return np.sqrt(self.a)

    @property
    def enclosing_radius(self):
        return 1.0 / math.sqrt(min(self.coefficients))

    @property
    def reach(self):
        return math.sqrt(min(self.coefficients)) / max(self.coefficients)

    @property
    def is_convex(self):
        return True

    def describe(self):
        d = super().describe()
        d["coefficients"] = list(self.coefficients)
        return d


@dataclass(frozen=True)
class LocalModelS9(DomainSpec):
    """{Re(z1 - z2^2) + |z2|^2 < 0} intersected with |z| < cutoff.

    Frames are taken with respect to the surface {rho = 0}; the cutoff sphere
    only delimits the working region.
    """

    dimension: int = 2
    cutoff: float = 0.25
    family: ClassVar[str] = "local_model_s9"

    def __post_init__(self):
        super().__post_init__()
        if self.dimension != 2:
            raise ConfigurationError("the local model lives in C^2")
        if self.cutoff <= 0:
            raise ConfigurationError("cutoff must be positive")

    def rho(self, z):
        z = np.asarray(z, dtype=complex)
        z1, z2 = z[..., 0], z[..., 1]
        return (z1 - z2 ** 2).real + np.abs(z2) ** 2

    def gradient(self, z):
        z = np.asarray(z, dtype=complex)
        g = np.zeros_like(z)
        g[..., 0] = 1.0
        g[..., 1] = 4j * z[..., 1].imag
        return g

    def complex_hessian(self, z):
        z = np.asarray(z)
        h = np.diag([0.0, 1.0]).astype(complex)
        return np.broadcast_to(h, z.shape[:-1] + (2, 2)).copy()

    def real_hessian(self, z):
        z = np.asarray(z)
        h = np.zeros((4, 4))
        h[3, 3] = 4.0
        return np.broadcast_to(h, z.shape[:-1] + (4, 4)).copy()

    @property
    def center(self):
        return np.array([-self.cutoff / 2, 0.0], dtype=complex)

    @property
    def enclosing_radius(self):
        return self.cutoff

    @property
    def reach(self):
        return 0.2

    @property
    def working_radius(self):
        return self.cutoff

    def describe(self):
        d = super().describe()
        d["cutoff"] = self.cutoff
        return d


@dataclass(frozen=True)
class PerturbedBall(DomainSpec):
    """|z|^2 - 1 + amplitude * exp(-|z - c|^2 / width^2) < 0."""

    amplitude: float = 0.0
    bump_center: tuple = ()
    bump_width: float = 0.5
    family: ClassVar[str] = "perturbed_ball"

    def __post_init__(self):
        super().__post_init__()
        center = self.bump_center or tuple([1.0] + [0.0] * (self.dimension - 1))
        object.__setattr__(self, "bump_center", tuple(complex(c) for c in center))
        if len(self.bump_center) != self.dimension:
            raise ConfigurationError("bump center has the wrong dimension")
        if self.bump_width <= 0:
            raise ConfigurationError("bump width must be positive")
        # keeps rho star-shaped with nonvanishing gradient
        if abs(self.amplitude) > 0.25 * self.bump_width:
            raise ConfigurationError("perturbation amplitude too large for this width")

    @property
    def c(self):
        return np.array(self.bump_center)

    def _bump(self, z):
        d = np.asarray(z, dtype=complex) - self.c
        return np.exp(-np.sum(np.abs(d) ** 2, axis=-1) / self.bump_width ** 2), d

    def rho(self, z):
        b, _ = self._bump(z)
        return np.sum(np.abs(z) ** 2, axis=-1) - 1.0 + self.amplitude * b

    def gradient(self, z):
        b, d = self._bump(z)
        s2 = self.bump_width ** 2
        return 2.0 * np.asarray(z, dtype=complex) - 2.0 * self.amplitude * (b / s2)[..., None] * d

    def complex_hessian(self, z):
        b, d = self._bump(z)
        s2 = self.bump_width ** 2
        outer = d[..., :, None] * np.conj(d)[..., None, :]
        eye = np.eye(self.dimension)
        return eye + self.amplitude * (b / s2)[..., None, None] * (outer / s2 - eye)

    def real_hessian(self, z):
        b, d = self._bump(z)
        x = to_real(d)
        s2 = self.bump_width ** 2
        eye = np.eye(2 * self.dimension)
        outer = x[..., :, None] * x[..., None, :]
        return 2.0 * eye + self.amplitude * b[..., None, None] * (4.0 * outer / s2 ** 2 - 2.0 * eye / s2)

    @property
    def enclosing_radius(self):
        return math.sqrt(1.0 + max(0.0, -self.amplitude))

    @property
    def reach(self):
        return 0.5 / (1.0 + 8.0 * abs(self.amplitude) / self.bump_width ** 2)

    def describe(self):
        d = super().describe()
        d.update(amplitude=self.amplitude, bump_width=self.bump_width,
                 bump_center=[[c.real, c.imag] for c in self.bump_center])
        return d


@dataclass(frozen=True)
class MappedDomain(DomainSpec):
    """Image F(base) of a domain under a holomorphic automorphism F of C^N.

    ``mapping`` must provide ``forward``, ``inverse`` and ``inverse_jacobian``.
    The real Hessian is obtained by central differences of the exact gradient.
    """

    base: DomainSpec = None
    mapping: object = None
    family: ClassVar[str] = "mapped"

    def rho(self, z):
        return self.base.rho(self.mapping.inverse(z))

    def gradient(self, z):
        x = self.mapping.inverse(z)
        jac = self.mapping.inverse_jacobian(z)
        g = self.base.gradient(x)
        return np.einsum("...jk,...j->...k", np.conj(jac), g)

    def complex_hessian(self, z):
        x = self.mapping.inverse(z)
        jac = self.mapping.inverse_jacobian(z)
        h = self.base.complex_hessian(x)
        return np.conj(np.swapaxes(jac, -1, -2)) @ h @ jac

    def real_hessian(self, z, step=1e-6):
        z = np.asarray(z, dtype=complex)
        n2 = 2 * self.dimension
        x = to_real(z)
        cols = []
        for k in range(n2):
            e = np.zeros(n2)
            e[k] = step
            gp = to_real(self.gradient(to_complex(x + e)))
            gm = to_real(self.gradient(to_complex(x - e)))
            cols.append((gp - gm) / (2 * step))
        h = np.stack(cols, axis=-1)
        return 0.5 * (h + np.swapaxes(h, -1, -2))

    @property
    def center(self):
        return self.mapping.forward(self.base.center)

    @property
    def enclosing_radius(self):
        raise ConfigurationError("mapped domains carry no enclosing ball")

    @property
    def reach(self):
        return 0.0

    def check_region(self, z):
        self.base.check_region(self.mapping.inverse(z))

    def contains(self, z):
        return self.base.contains(self.mapping.inverse(as_point(z, self.dimension)))

    def describe(self):
        return {"family": self.family, "base": self.base.describe(),
                "mapping": type(self.mapping).__name__}


FAMILIES = {
    "unit_ball": UnitBall,
    "ball": UnitBall,
    "ellipsoid": Ellipsoid,
    "local_model_s9": LocalModelS9,
    "s9": LocalModelS9,
    "perturbed_ball": PerturbedBall,
}


# ---------------------------------------------------------------------------
# operations


def defining_value(domain: DomainSpec, z):
    """Value, gradient and complex Hessian of the defining function at ``z``."""
    z = as_point(z, domain.dimension)
    domain.check_region(z)
    return float(domain.rho(z)), domain.gradient(z), domain.complex_hessian(z)


# ---------------------------------------------------------------------------
# configuration


def parse_complex(token: str) -> complex:
    """Parse ``re:im`` or a bare real number."""
    token = token.strip()
    if not token:
        raise ConfigurationError("empty coordinate")
    try:
        if ":" in token:
            re_, im_ = token.split(":", 1)
            return complex(float(re_), float(im_))
        return complex(token.replace("i", "j")) if "i" in token or "j" in token else complex(float(token))
    except ValueError as exc:
        raise ConfigurationError(f"cannot parse coordinate {token!r}") from exc


def parse_vector(text: str) -> np.ndarray:
    return np.array([parse_complex(t) for t in text.split(",")], dtype=complex)


def domain_from_mapping(cfg: dict) -> DomainSpec:
    """Build a domain from a flat key/value mapping.

    Keys: ``family`` (unit_ball | ellipsoid | local_model_s9 | perturbed_ball),
    ``dimension``, ``coefficients`` (comma list), ``amplitude``,
    ``bump_center`` (comma list of re:im), ``bump_width``, ``cutoff``,
    ``holder_exponent``.
    """
    cfg = {k.strip().lower(): str(v).strip() for k, v in cfg.items()}
    name = cfg.get("family", "").lower()
    if name not in FAMILIES:
        raise ConfigurationError(f"unknown domain family {name!r}")
    cls = FAMILIES[name]
    kwargs = {}
    try:
        if "holder_exponent" in cfg:
            kwargs["holder_exponent"] = float(cfg["holder_exponent"])
        if cls is Ellipsoid:
            coeffs = tuple(float(t) for t in cfg["coefficients"].split(","))
            dim = int(cfg.get("dimension", len(coeffs)))
            return Ellipsoid(dim, coefficients=coeffs, **kwargs)
        if cls is LocalModelS9:
            if "cutoff" in cfg:
                kwargs["cutoff"] = float(cfg["cutoff"])
            return LocalModelS9(int(cfg.get("dimension", 2)), **kwargs)
        dim = int(cfg.get("dimension", 2))
        if cls is PerturbedBall:
            if "bump_center" in cfg:
                kwargs["bump_center"] = tuple(parse_vector(cfg["bump_center"]))
            return PerturbedBall(dim, amplitude=float(cfg.get("amplitude", 0.0)),
                                 bump_width=float(cfg.get("bump_width", 0.5)), **kwargs)
        return UnitBall(dim, **kwargs)
    except (KeyError, ValueError) as exc:
        raise ConfigurationError(f"bad domain configuration: {exc}") from exc


def load_domain(source: str) -> DomainSpec:
    """Load a domain from an INI-style file or an inline ``k=v;k=v`` string.

    Files may hold the keys at top level or inside a ``[domain]`` section.
    """
    path = Path(source)
    if path.is_file():
        text = path.read_text()
        parser = configparser.ConfigParser()
        if not text.lstrip().startswith("["):
            text = "[domain]\n" + text
        try:
            parser.read_string(text)
        except configparser.Error as exc:
            raise ConfigurationError(f"cannot parse {source}: {exc}") from exc
        if "domain" not in parser:
            raise ConfigurationError(f"{source} has no [domain] section")
        return domain_from_mapping(dict(parser["domain"]))
    if "=" in source:
        items = [kv.split("=", 1) for kv in source.split(";") if kv.strip()]
        return domain_from_mapping({k: v for k, v in items})
    raise ConfigurationError(f"configuration {source!r} is neither a file nor k=v pairs")
