"""Compact symmetry groups: generators, characters, Haar rules, stabilizers.

Supported catalog: planar rotations SO(2) acting on R^2, full rotations SO(3)
on R^3, axial rotations about e3 on R^3 ("cylinder"), and the finite cyclic
subgroups C_N of the planar rotations, which serve as an exactly summable
oracle.  Every group here acts by isometries of the configuration space, and
all characters are evaluated as class functions of a single angle.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.integrate import quad

from .errors import NonIntegerMultiplicityError, QuadratureError, StratumError

SO2 = "so2"
SO3 = "so3"
SO2_AXIAL = "so2_axial"
CYCLIC = "cyclic"

_KINDS = (SO2, SO3, SO2_AXIAL, CYCLIC)

# Stabilizer kinds
TRIVIAL = "trivial"
SO2_AXIS = "so2_axis"
FULL_GROUP = "full_group"


def _rotation_generator(d: int, i: int, j: int) -> np.ndarray:
    """Antisymmetric generator of rotations in the (i, j) plane, normalized
    so that <<A, A>> = Tr(A^T A) = 1."""
    a = np.zeros((d, d))
    a[i, j] = 1.0 / math.sqrt(2.0)
    a[j, i] = -1.0 / math.sqrt(2.0)
    return a


@dataclass(frozen=True)
class GroupModel:
    """A compact group of linear isometries of R^d.

    ``generators`` is a tuple of antisymmetric d x d matrices, orthonormal
    for the trace inner product <<A, B>> = Tr(A^T B).  For the cyclic groups
    the Lie algebra is trivial and the tuple is empty.
    """

    kind: str
    config_dim: int
    lie_dim: int
    generators: tuple
    order: int | None = None  # cyclic groups only

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise ValueError(f"unknown group kind {self.kind!r}")

    @property
    def is_finite(self) -> bool:
        return self.kind == CYCLIC

    def element(self, theta: float) -> np.ndarray:
        """Rotation by ``theta``: in-plane for the SO(2) kinds, about the
        vertical axis for SO(3) (a representative of the conjugacy class)."""
        c, s = math.cos(theta), math.sin(theta)
        block = np.array([[c, -s], [s, c]])
        if self.kind == SO2:
            return block
        if self.kind == CYCLIC:
            return block
        g = np.eye(3)
        g[:2, :2] = block
        return g

    def cyclic_element(self, j: int) -> np.ndarray:
        if self.kind != CYCLIC:
            raise ValueError("cyclic_element only defined for cyclic groups")
        return self.element(2.0 * math.pi * j / self.order)

    def random_element(self, rng: np.random.Generator) -> np.ndarray:
        """Haar-distributed random element."""
        if self.kind == CYCLIC:
            return self.cyclic_element(int(rng.integers(self.order)))
        if self.kind in (SO2, SO2_AXIAL):
            return self.element(rng.uniform(0.0, 2.0 * math.pi))
        # SO(3): uniform unit quaternion -> rotation matrix
        q = rng.normal(size=4)
        q /= np.linalg.norm(q)
        w, x, y, z = q
        return np.array(
            [
                [1 - 2 * (y * y + z * z), 2 * (x * y - w * z), 2 * (x * z + w * y)],
                [2 * (x * y + w * z), 1 - 2 * (x * x + z * z), 2 * (y * z - w * x)],
                [2 * (x * z - w * y), 2 * (y * z + w * x), 1 - 2 * (x * x + y * y)],
            ]
        )

    def class_parameter(self, g: np.ndarray) -> float:
        """Conjugacy-class angle of a group element.

        For the SO(2) kinds this is the signed rotation angle in [0, 2pi);
        for SO(3) the unsigned angle in [0, pi].
        """
        if self.kind == SO3:
            c = (np.trace(g) - 1.0) / 2.0
            return math.acos(min(1.0, max(-1.0, c)))
        theta = math.atan2(g[1, 0], g[0, 0])
        return theta % (2.0 * math.pi)


def make_group(key: str) -> GroupModel:
    """Build a catalog group from its config key.

    Keys: ``so2``, ``so3``, ``so2_axial``, ``cyclic:N``.
    """
    if key == SO2:
        return GroupModel(SO2, 2, 1, (_rotation_generator(2, 0, 1),))
    if key == SO2_AXIAL:
        return GroupModel(SO2_AXIAL, 3, 1, (_rotation_generator(3, 0, 1),))
    if key == SO3:
        gens = (
            _rotation_generator(3, 1, 2),
            _rotation_generator(3, 2, 0),
            _rotation_generator(3, 0, 1),
        )
        return GroupModel(SO3, 3, 3, gens)
    if key.startswith(CYCLIC):
        try:
            _, n = key.split(":")
            order = int(n)
        except ValueError as exc:
            raise ValueError(f"cyclic group key must look like 'cyclic:N', got {key!r}") from exc
        if order < 1:
            raise ValueError(f"cyclic group order must be >= 1, got {order}")
        return GroupModel(CYCLIC, 2, 0, (), order=order)
    raise ValueError(f"unknown group key {key!r}")


@dataclass(frozen=True)
class IrreducibleCharacter:
    """Irreducible character chi_n of a catalog group.

    The index n runs over Z for the SO(2) kinds, over N for SO(3), and over
    Z mod N for the cyclic groups.  ``degree`` is chi_n evaluated at the
    identity: 1 except for SO(3) where it is 2n + 1.
    """

    group: GroupModel
    index: int

    def __post_init__(self):
        if self.group.kind == SO3 and self.index < 0:
            raise ValueError("SO(3) characters are indexed by nonnegative integers")

    @property
    def degree(self) -> int:
        if self.group.kind == SO3:
            return 2 * self.index + 1
        return 1


def character_value(chi: IrreducibleCharacter, theta: float) -> complex:
    """Value of chi on the conjugacy class of angle theta.

    SO(2) kinds and cyclic: exp(i n theta).  SO(3): the Dirichlet kernel
    sum_{k=-n}^{n} exp(i k theta) evaluated as 1 + 2 sum cos(k theta), which
    is exact at theta = 0 (value 2n + 1) with no cancellation.
    """
    n = chi.index
    if chi.group.kind == SO3:
        k = np.arange(1, n + 1)
        return complex(1.0 + 2.0 * np.sum(np.cos(k * theta)))
    return complex(math.cos(n * theta), math.sin(n * theta))


def haar_average(group: GroupModel, f: Callable[[float], complex],
                 target: float = 1e-10) -> complex:
    """Integral of a class function against the normalized Haar measure.

    Uses the Weyl integration rule: uniform dtheta/2pi for the SO(2) kinds,
    (2/pi) sin^2(theta/2) dtheta on [0, pi] for SO(3), and the exact
    arithmetic mean for cyclic groups.
    """
    if group.kind == CYCLIC:
        vals = [f(2.0 * math.pi * j / group.order) for j in range(group.order)]
        return complex(np.sum(vals)) / group.order

    if group.kind == SO3:
        def weighted(theta, part):
            v = f(theta) * (2.0 / math.pi) * math.sin(theta / 2.0) ** 2
            return part(v)
        lo, hi = 0.0, math.pi
    else:
        def weighted(theta, part):
            return part(f(theta)) / (2.0 * math.pi)
        lo, hi = 0.0, 2.0 * math.pi

    out = 0.0 + 0.0j
    achieved = 0.0
    for part, unit in ((np.real, 1.0), (np.imag, 1j)):
        val, err = quad(lambda t: weighted(t, part), lo, hi,
                        epsabs=target, epsrel=0.0, limit=200)
        out += unit * val
        achieved = max(achieved, err)
    if achieved > 100.0 * target:
        raise QuadratureError(
            f"Haar quadrature achieved error {achieved:.2e} > target {target:.2e}",
            achieved_error=achieved,
        )
    return out


@dataclass(frozen=True)
class StabilizerModel:
    """Isotropy subgroup of a phase-space point, up to conjugacy."""

    kind: str  # TRIVIAL | SO2_AXIS | FULL_GROUP
    group: GroupModel  # ambient group


def stabilizer_of(group: GroupModel, z: np.ndarray, tol: float = 1e-12) -> StabilizerModel:
    """Stabilizer kind of z = (x, xi) under the symplectic action.

    Raises StratumError on the excluded strata where the reduction
    hypotheses fail: z = 0 for every group, and the axis stratum
    (x', xi') = 0 for the cylinder.
    """
    z = np.asarray(z, dtype=float)
    d = group.config_dim
    x, xi = z[:d], z[d:]
    if np.linalg.norm(z) <= tol:
        raise StratumError("stabilizer undefined on the excluded stratum z = 0")
    if group.kind in (SO2, CYCLIC):
        return StabilizerModel(TRIVIAL, group)
    if group.kind == SO2_AXIAL:
        if np.linalg.norm(x[:2]) <= tol and np.linalg.norm(xi[:2]) <= tol:
            raise StratumError(
                "cylinder axis stratum (x', xi') = 0: stabilizer jumps to the full group"
            )
        return StabilizerModel(TRIVIAL, group)
    # SO(3): on the zero momentum level (x, xi colinear) the stabilizer is the
    # rotation subgroup about the common axis; off it, only the identity fixes z.
    cross = np.cross(x, xi)
    if np.linalg.norm(cross) <= tol * max(1.0, np.linalg.norm(x) * np.linalg.norm(xi)):
        return StabilizerModel(SO2_AXIS, group)
    return StabilizerModel(TRIVIAL, group)


def trivial_multiplicity(chi: IrreducibleCharacter, stabilizer: StabilizerModel) -> int:
    """Number of trivial components in chi restricted to the stabilizer.

    Computed as the Haar average of conj(chi) over the stabilizer.  The
    pre-rounding residual must be below 1e-8, else the stabilizer kind or
    the quadrature is wrong and NonIntegerMultiplicityError is raised.
    """
    if stabilizer.kind == TRIVIAL:
        raw = complex(chi.degree)
    elif stabilizer.kind == SO2_AXIS:
        # circle subgroup of SO(3); chi restricted is theta -> chi(theta)
        circle = GroupModel(SO2, 2, 1, (_rotation_generator(2, 0, 1),))
        raw = haar_average(circle, lambda t: np.conj(character_value(chi, t)))
    elif stabilizer.kind == FULL_GROUP:
        raw = haar_average(chi.group, lambda t: np.conj(character_value(chi, t)))
    else:
        raise ValueError(f"unknown stabilizer kind {stabilizer.kind!r}")
    nearest = round(raw.real)
    residual = abs(raw - nearest)
    if residual >= 1e-8:
        raise NonIntegerMultiplicityError(
            f"multiplicity residual {residual:.2e} for chi_{chi.index} over {stabilizer.kind}"
        )
    if nearest < 0 or nearest > chi.degree:
        raise NonIntegerMultiplicityError(
            f"multiplicity {nearest} outside [0, d_chi={chi.degree}]"
        )
    return int(nearest)


def apply_symplectic(g: np.ndarray, z: np.ndarray) -> np.ndarray:
    """Symplectic action M(g)(x, xi) = (g x, g^{-T} xi) on phase points.

    The general linear formula is used; for the isometry catalog g^{-T} = g
    up to rounding, which the tests exercise as an invariant.
    """
    g = np.asarray(g, dtype=float)
    z = np.asarray(z, dtype=float)
    d = g.shape[0]
    x, xi = z[:d], z[d:]
    return np.concatenate([g @ x, np.linalg.solve(g.T, xi)])
