"""Explicit CP^1 model of the sl(2,C) flag variety.

Points are unit homogeneous pairs [z0 : z1]; Borel subalgebras are line
stabilizers.  Covectors live in one of the two affine charts (z = z1/z0 or
w = z0/z1), always the chart owning the larger homogeneous coordinate, with
the cotangent transformation rule between them.

Derived formulas (in the chart coordinate z at [1 : z], covector xi dz):

* the vector field of A = [[a, b], [c, -a]] is (c - 2 a z - b z^2) d/dz,
  so the moment covector has Killing-dual carrier
  (xi / 4) [[-z, 1], [-z^2, z]] -- visibly nilpotent;
* the stabilizer torus of x in SU(2) is generated by i(2 v v* - 1); the
  transported Cartan parameter at x has carrier (lam / 8)(1 - 2 v v*),
  normalized so the parameter value is +lam at the base point [0 : 1]
  (the Borel spanned by the Cartan and the negative root space).

Complex/real cotangent identifications follow the factor-two relation
between the real pairing and twice the real part of the complex pairing;
concretely, membership of a covector in a conormal space is the vanishing
of the real part of its chart component against real tangent directions.

Real-part norms of functionals are Frobenius norms of the real component
of their Killing-dual carriers.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .algebra import (
    AlgebraElement,
    AlgebraError,
    build_algebra,
    element_from_matrix,
)

__all__ = [
    "FlagPoint",
    "CotangentPoint",
    "model_algebra",
    "flag_point",
    "cotangent_point",
    "group_action",
    "moment",
    "weight_at",
    "twisted_moment",
    "twisted_moment_inverse",
    "scale_cotangent",
    "OrbitImageReport",
    "orbit_image_check",
    "FiberReport",
    "fiber_structure_check",
    "ScalingReport",
    "cycle_scaling_limit",
]

_MODEL = build_algebra("sl_real", 2)


def model_algebra():
    """The sl(2,R) realization underlying the model."""
    return _MODEL


@dataclass(frozen=True)
class FlagPoint:
    """A point [z0 : z1], unit norm, phase-reduced, with its owning chart."""

    z0: complex
    z1: complex
    chart: int

    @property
    def vector(self) -> np.ndarray:
        return np.array([self.z0, self.z1])

    @property
    def affine(self) -> complex:
        return self.z1 / self.z0 if self.chart == 0 else self.z0 / self.z1

    def real_line_defect(self) -> float:
        """Distance from RP^1 as |Im(conj(z0) z1)| of the unit pair."""
        return abs(np.imag(np.conj(self.z0) * self.z1))


def flag_point(z0: complex, z1: complex) -> FlagPoint:
    v = np.array([z0, z1], dtype=complex)
    nrm = np.linalg.norm(v)
    if nrm < 1e-150:
        raise AlgebraError("flag point requires a nonzero homogeneous pair")
    v = v / nrm
    i = int(np.argmax(np.abs(v)))
    phase = v[i] / abs(v[i])
    v = v * np.conj(phase)
    chart = 0 if abs(v[0]) >= abs(v[1]) else 1
    return FlagPoint(z0=complex(v[0]), z1=complex(v[1]), chart=chart)


@dataclass(frozen=True)
class CotangentPoint:
    """A covector at a flag point, stored in the point's owning chart."""

    base: FlagPoint
    component: complex


def cotangent_point(base: FlagPoint, component: complex) -> CotangentPoint:
    return CotangentPoint(base=base, component=complex(component))


def scale_cotangent(zeta: CotangentPoint, s: float) -> CotangentPoint:
    return CotangentPoint(base=zeta.base, component=s * zeta.component)


def group_action(g: np.ndarray, x: FlagPoint) -> FlagPoint:
    w = np.asarray(g, dtype=complex) @ x.vector
    return flag_point(w[0], w[1])


def moment(zeta: CotangentPoint) -> AlgebraElement:
    """Pairing of the covector with vector fields, as a Killing-dual carrier.

    The image is nilpotent: trace and determinant of the carrier vanish.
    """
    c = zeta.component / 4.0
    t = zeta.base.affine
    if zeta.base.chart == 0:
        m = c * np.array([[-t, 1.0], [-t * t, t]])
    else:
        m = c * np.array([[t, -t * t], [1.0, -t]])
    return element_from_matrix(_MODEL, m)


def weight_at(x: FlagPoint, lam: complex) -> AlgebraElement:
    """Cartan parameter transported to x, extended by zero on root spaces.

    ``lam`` is the parameter's value on diag(1,-1).  Equivariant under the
    compact form: weight_at(u.x) = u weight_at(x) u^-1 for u in SU(2).
    """
    v = x.vector
    carrier = (lam / 8.0) * (np.eye(2) - 2.0 * np.outer(v, np.conj(v)))
    return element_from_matrix(_MODEL, carrier)


def twisted_moment(zeta: CotangentPoint, lam: complex) -> AlgebraElement:
    """Moment plus transported parameter; lands on the parameter's orbit."""
    return moment(zeta) + weight_at(zeta.base, lam)


def _orbit_invariant_defect(carrier: np.ndarray, lam: complex) -> float:
    target = -(lam / 8.0) ** 2
    scale = max(1.0, abs(target))
    return abs(np.linalg.det(carrier) - target) / scale


def twisted_moment_inverse(nu: AlgebraElement, lam: complex,
                           tol: float = 1e-8) -> CotangentPoint:
    """The unique covector mapping to a point of the parameter's orbit.

    The base is the carrier eigenline for eigenvalue -lam/8 (the base Borel
    convention); the fiber component is read off the chart pattern of the
    moment carrier.  Off-orbit inputs are rejected with the invariant
    mismatch.
    """
    t = nu.matrix
    defect = _orbit_invariant_defect(t, lam)
    if defect > tol:
        raise AlgebraError(
            f"point is off the parameter orbit: invariant mismatch {defect:.3e}"
        )
    ev, vecs = np.linalg.eig(t)
    idx = int(np.argmin(np.abs(ev + lam / 8.0)))
    x = flag_point(vecs[0, idx], vecs[1, idx])
    m = t - weight_at(x, lam).matrix
    if x.chart == 0:
        comp = 4.0 * m[0, 1]
    else:
        comp = 4.0 * m[1, 0]
    return CotangentPoint(base=x, component=complex(comp))


# ---------------------------------------------------------------------------
# Orbit-image, fiber and scaling-limit reports
# ---------------------------------------------------------------------------

def _real_part_norm(x: AlgebraElement) -> float:
    m = x.matrix
    return float(np.linalg.norm((m + np.conj(m)) / 2.0))


def _max_real_weight_norm(lam: complex, resolution: int = 72) -> float:
    worst = 0.0
    for theta in np.linspace(0.0, np.pi, resolution):
        for phi in np.linspace(0.0, 2.0 * np.pi, 2 * resolution, endpoint=False):
            x = flag_point(np.cos(theta / 2.0),
                           np.sin(theta / 2.0) * np.exp(1j * phi))
            worst = max(worst, _real_part_norm(weight_at(x, lam)))
    return worst


@dataclass(frozen=True, eq=False)
class OrbitImageReport:
    base_defects: np.ndarray       # distance of projected points from RP^1
    real_part_norms: np.ndarray    # |Re| of the moment along the orbit
    real_part_bound: float         # compact maximum of |Re| of the parameter

    @property
    def max_base_defect(self) -> float:
        return float(self.base_defects.max())

    @property
    def max_real_part(self) -> float:
        return float(self.real_part_norms.max())


def orbit_image_check(lam: complex,
                      samples: Sequence[AlgebraElement]) -> OrbitImageReport:
    """Project real-orbit points through the inverse twisted moment.

    All projected base points must land on RP^1 (the single closed real
    orbit), and the moment of each preimage must have real part below the
    compact maximum of the transported parameter's real part.
    """
    base, re_norm = [], []
    for nu in samples:
        zeta = twisted_moment_inverse(nu, lam)
        base.append(zeta.base.real_line_defect())
        re_norm.append(_real_part_norm(moment(zeta)))
    return OrbitImageReport(
        base_defects=np.array(base),
        real_part_norms=np.array(re_norm),
        real_part_bound=_max_real_weight_norm(lam),
    )


@dataclass(frozen=True, eq=False)
class FiberReport:
    t_values: tuple[float, ...]
    invariant_drift: np.ndarray    # orbit-membership defect of translated points
    base_drift: np.ndarray         # base-point movement through the inverse
    conormal_defect: np.ndarray    # |Re| of the fiber offset per unit size
    flag_dim: int
    orbit_dim: int
    conormal_dim: int


def fiber_structure_check(lam: complex, nu: AlgebraElement,
                          t_values: Sequence[float]) -> FiberReport:
    """Translate along the nilradical direction and probe the fiber.

    The translated points nu + i t I(n) stay on the orbit (a ruling of the
    hyperboloid), their preimages share the base point, and the covector
    offsets are purely conormal to RP^1 (vanishing real chart component).
    """
    zeta0 = twisted_moment_inverse(nu, lam)
    x0 = zeta0.base
    if x0.real_line_defect() > 1e-8:
        raise AlgebraError("fiber check requires a point over the real orbit")
    v = np.real(x0.vector)
    v = v / np.linalg.norm(v)
    nil = np.outer(v, np.array([v[1], -v[0]]))

    inv_drift, base_drift, conormal = [], [], []
    t_mat = nu.matrix
    for t in t_values:
        moved = element_from_matrix(_MODEL, t_mat + 1j * float(t) * nil)
        inv_drift.append(_orbit_invariant_defect(moved.matrix, lam))
        zeta_t = twisted_moment_inverse(moved, lam)
        base_drift.append(
            float(np.linalg.norm(zeta_t.base.vector - x0.vector))
        )
        offset = zeta_t.component - zeta0.component
        scale = max(1.0, abs(offset))
        conormal.append(abs(np.real(offset)) / scale)
    return FiberReport(
        t_values=tuple(float(t) for t in t_values),
        invariant_drift=np.array(inv_drift),
        base_drift=np.array(base_drift),
        conormal_defect=np.array(conormal),
        flag_dim=2,
        orbit_dim=1,
        conormal_dim=2 - 1,
    )


@dataclass(frozen=True, eq=False)
class ScalingReport:
    s_schedule: tuple[float, ...]
    base_defects: np.ndarray       # max distance of bases from RP^1, per s
    moment_defects: np.ndarray     # max |Re| of the scaled moment, per s
    identity_at_one: bool
    slope: float                   # log-log rate of the moment defect
    at_floor: bool                 # defects already at roundoff before scaling


_DEFECT_FLOOR = 1e-12


def cycle_scaling_limit(lam: complex, s_schedule: Sequence[float],
                        samples: Sequence[AlgebraElement]) -> ScalingReport:
    """Fiber-scale preimages of real-orbit points and measure conic defects.

    For each scale s the report records the distance of base points from
    RP^1 and the failure of the scaled moment to be purely imaginary.  The
    moment is fiberwise linear, so the second defect scales exactly with s;
    for this split orbit the unscaled set already sits inside the purely
    imaginary locus up to roundoff, which the ``at_floor`` flag records.
    """
    s_schedule = tuple(float(s) for s in s_schedule)
    if not s_schedule or s_schedule[0] > 1.0 or any(
        b >= a for a, b in zip(s_schedule, s_schedule[1:])
    ):
        raise AlgebraError("scale schedule must decrease within (0, 1]")
    zetas = [twisted_moment_inverse(nu, lam) for nu in samples]

    identity = all(
        scale_cotangent(z, 1.0).component == z.component
        and scale_cotangent(z, 1.0).base == z.base
        for z in zetas
    )
    base_defects, moment_defects = [], []
    for s in s_schedule:
        scaled = [scale_cotangent(z, s) for z in zetas]
        base_defects.append(max(z.base.real_line_defect() for z in scaled))
        moment_defects.append(
            max(_real_part_norm(moment(z)) for z in scaled)
        )
    base_defects = np.array(base_defects)
    moment_defects = np.array(moment_defects)
    at_floor = bool(moment_defects[0] < _DEFECT_FLOOR)

    positive = moment_defects > 1e-300
    if positive.sum() >= 2:
        ls = np.log(np.asarray(s_schedule)[positive])
        ld = np.log(moment_defects[positive])
        slope = float(np.polyfit(ls, ld, 1)[0])
    else:
        slope = float("nan")
    return ScalingReport(
        s_schedule=s_schedule,
        base_defects=base_defects,
        moment_defects=moment_defects,
        identity_at_one=identity,
        slope=slope,
        at_floor=at_floor,
    )
