from __future__ import annotations

import pytest

from hbm.geometry.bodies import Ball, BodySpec, Ellipsoid
from hbm.geometry.fields import SupportField, sample_field
from hbm.sphere.grids import SphereGrid, build_circle_grid, build_icosphere


@pytest.fixture(scope="session")
def circle() -> SphereGrid:
    return build_circle_grid(512)


@pytest.fixture(scope="session")
def coarse_circle() -> SphereGrid:
    return build_circle_grid(64)


@pytest.fixture(scope="session")
def icosphere() -> SphereGrid:
    return build_icosphere(2)


@pytest.fixture(scope="session")
def disk() -> BodySpec:
    return Ball(dim=2)


@pytest.fixture(scope="session")
def ellipse() -> BodySpec:
    return Ellipsoid(semi_axes=(2.0, 1.0))


@pytest.fixture(scope="session")
def disk_field(disk: BodySpec, circle: SphereGrid) -> SupportField:
    return sample_field(disk, circle)


@pytest.fixture(scope="session")
def ellipse_field(ellipse: BodySpec, circle: SphereGrid) -> SupportField:
    return sample_field(ellipse, circle)
