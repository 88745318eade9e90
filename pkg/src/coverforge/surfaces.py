"""Punctured-surface fundamental groups and their finite-group
representations.

A genus-g surface with n >= 1 punctures has free fundamental group of
rank r = 2g + n - 1 on generators (a_1, b_1, .., a_g, b_g, c_1, ..,
c_{n-1}); the last peripheral loop c_n is not free but is determined by
the surface relation

    [a_1, b_1] ... [a_g, b_g] = c_1 c_2 ... c_n,

with [x, y] = x y x^-1 y^-1.  A representation is stored as the tuple of
images of the free generators in that fixed order; everything about c_n
is derived.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import BadParameters
from .groups import (
    DEFAULT_ENUM_BUDGET,
    FiniteGroupHandle,
    GroupElement,
    element_order,
    subgroup_closure,
)


@dataclass(frozen=True)
class SurfaceSignature:
    """Genus and puncture count of a punctured surface with chi < 0."""

    g: int
    n: int

    def __post_init__(self):
        if self.g < 0 or self.n < 1:
            raise BadParameters("need genus >= 0 and at least one puncture")
        if self.euler >= 0:
            raise BadParameters(
                f"surface (g={self.g}, n={self.n}) has chi = {self.euler} >= 0"
            )

    @property
    def euler(self) -> int:
        return 2 - 2 * self.g - self.n

    @property
    def euler_closed(self) -> int:
        """Euler characteristic of the closed surface with punctures filled."""
        return 2 - 2 * self.g

    @property
    def free_rank(self) -> int:
        return 2 * self.g + self.n - 1

    @property
    def generator_names(self) -> tuple[str, ...]:
        names = []
        for i in range(1, self.g + 1):
            names.append(f"a{i}")
            names.append(f"b{i}")
        for i in range(1, self.n):
            names.append(f"c{i}")
        return tuple(names)


@dataclass(frozen=True)
class RepTuple:
    """Images of the free generators under a homomorphism to a finite group."""

    signature: SurfaceSignature
    target: FiniteGroupHandle
    images: tuple[GroupElement, ...]

    def __post_init__(self):
        if len(self.images) != self.signature.free_rank:
            raise BadParameters(
                f"expected {self.signature.free_rank} images, got {len(self.images)}"
            )
        for g in self.images:
            if not self.target.contains(g):
                raise BadParameters(f"image {g!r} is not in the target group")

    @property
    def images_by_name(self) -> dict[str, GroupElement]:
        return dict(zip(self.signature.generator_names, self.images))

    def handle_images(self) -> tuple[GroupElement, ...]:
        """Images of a_1, b_1, .., a_g, b_g."""
        return self.images[: 2 * self.signature.g]

    def free_peripheral_images(self) -> tuple[GroupElement, ...]:
        """Images of c_1, .., c_{n-1}."""
        return self.images[2 * self.signature.g :]

    def peripheral_images(self) -> tuple[GroupElement, ...]:
        """Images of all n peripheral loops, the derived c_n last."""
        return self.free_peripheral_images() + (derived_last_peripheral(self),)


@dataclass(frozen=True)
class PeripheralProfile:
    """Orders of the n peripheral images and their minimum."""

    orders: tuple[int, ...]

    @property
    def delta(self) -> int:
        return min(self.orders)


def derived_last_peripheral(rep: RepTuple) -> GroupElement:
    """The unique value of c_n making the surface relation hold:
    c_n = (c_1 .. c_{n-1})^-1 * prod_i [a_i, b_i]."""
    commutators = rep.target.identity()
    handles = rep.handle_images()
    for i in range(rep.signature.g):
        a, b = handles[2 * i], handles[2 * i + 1]
        commutators = commutators * (a * b * a.inverse() * b.inverse())
    prefix = rep.target.identity()
    for c in rep.free_peripheral_images():
        prefix = prefix * c
    return prefix.inverse() * commutators


def verify_relation(rep: RepTuple, claimed_cn: GroupElement) -> bool:
    """Does an explicitly stated last peripheral image match the derived one?"""
    return claimed_cn == derived_last_peripheral(rep)


def is_surjective(rep: RepTuple, budget: int = DEFAULT_ENUM_BUDGET) -> bool:
    closure = subgroup_closure(
        rep.images + (derived_last_peripheral(rep),), rep.target, budget
    )
    return closure.order == rep.target.order


def peripheral_profile(rep: RepTuple) -> PeripheralProfile:
    return PeripheralProfile(tuple(element_order(c) for c in rep.peripheral_images()))
