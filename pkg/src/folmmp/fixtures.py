"""Small named fans used across tests, scripts and the CLI fixtures."""
from __future__ import annotations

from .foliation import ToricFoliation
from .polyhedral import Fan

ATIYAH_RAYS = ((0, 0, 1), (1, 0, 1), (1, 1, 1), (0, 1, 1))


def atiyah_delta1() -> Fan:
    """Triangulation of the cone over the unit square through the diagonal v1 v3."""
    return Fan(3, ATIYAH_RAYS, ((0, 1, 2), (0, 2, 3)), relative=True)


def atiyah_delta2() -> Fan:
    """The other triangulation, through the diagonal v2 v4."""
    return Fan(3, ATIYAH_RAYS, ((0, 1, 3), (1, 2, 3)), relative=True)


def atiyah_foliation() -> ToricFoliation:
    return ToricFoliation(3, (ATIYAH_RAYS[1], ATIYAH_RAYS[3]))


def p1xp1() -> Fan:
    return Fan(2, ((1, 0), (0, 1), (-1, 0), (0, -1)), ((0, 1), (1, 2), (2, 3), (3, 0)))


def p1xp1_foliation() -> ToricFoliation:
    return ToricFoliation(2, ((1, 0),))


def blowup_plane_cone() -> Fan:
    """cone(e1, e2) subdivided at e1 + e2."""
    return Fan(2, ((1, 0), (0, 1), (1, 1)), ((0, 2), (2, 1)), relative=True)
