"""Fixed-point evaluation of the orbit Fourier transform.

The value at a regular semisimple point is a sum over the fixed points of
the induced flag-variety vector field:

    sum over w of  d_w * exp(<X, w.weight>) / prod(alpha(X) over Borel roots)

Evaluation is routed through conjugation into the standard Cartan of the
realization (justified by Ad-invariance of the transform), which avoids any
flag-variety geometry in rank above one.  The reduction orders eigenvalues
canonically, so inputs from one adjoint orbit share a representative and
invariance holds by construction; in split mode the multiplicity pattern is
tied to that canonical chamber.

Conventions: the orbit parameter is purely imaginary, ``i`` times the
Killing dual of a real Cartan element.  The ``weight`` sequence supplied by
callers lists the coordinates of that Cartan element over the real Cartan
basis.  Exponentials therefore oscillate on the real form, and all term
arithmetic is complex.  Values of the transform vanish identically (by
construction, not numerically) on elements that cannot be conjugated into
the standard Cartan in split mode.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Mapping, Optional, Sequence

import numpy as np

from .algebra import (
    AlgebraElement,
    AlgebraError,
    AlgebraSpec,
    CartanDatum,
    IndeterminateRegularityError,
    cartan_coordinates,
    cartan_of,
    element,
    element_from_matrix,
    is_regular_semisimple,
    killing_form,
    reduce_to_cartan,
)
from .fixedpoints import (
    FixedPoint,
    MultiplicityAssignment,
    assign_multiplicities,
    closed_orbit_support,
    enumerate_fixed_points,
    is_regular_covector,
)

__all__ = [
    "DegenerateInputError",
    "OrbitSpec",
    "TermBreakdown",
    "EvalResult",
    "CasimirCheck",
    "InvarianceReport",
    "standard_cartan",
    "make_orbit",
    "fourier_value",
    "fourier_grid",
    "casimir_check",
    "invariance_checks",
    "random_group_element",
]

# Relative distance to a root hyperplane below which evaluation refuses to
# report a value (each individual term has a pole there).
WALL_TOL = 1e-8


class DegenerateInputError(AlgebraError):
    """Evaluation point too close to a root hyperplane."""


_STANDARD_CARTANS: dict[tuple[str, int], CartanDatum] = {}


def standard_cartan(spec: AlgebraSpec) -> CartanDatum:
    """The diagonal Cartan of the realization, with a canonical real basis.

    The real basis is the diagonal-difference family itself (times i for
    the compact form), in basis order, so weight coordinates have a stable
    meaning across runs.
    """
    key = (spec.family, spec.n)
    if key in _STANDARD_CARTANS:
        return _STANDARD_CARTANS[key]
    n = spec.n
    seed_diag = np.array([n - 1 - 2 * k for k in range(n)], dtype=float)
    if spec.family == "su":
        seed = element_from_matrix(spec, 1j * np.diag(seed_diag))
    else:
        seed = element_from_matrix(spec, np.diag(seed_diag))
    cart = cartan_of(seed)
    real_basis = tuple(
        element(spec, np.eye(spec.dim)[k]) for k in range(spec.rank)
    )
    cart = CartanDatum(
        algebra=cart.algebra,
        basis=cart.basis,
        real_basis=real_basis,
        roots=cart.roots,
        root_vectors=cart.root_vectors,
        positive=cart.positive,
        simple=cart.simple,
        weyl=cart.weyl,
        gram=cart.gram,
    )
    _STANDARD_CARTANS[key] = cart
    return cart


@dataclass(frozen=True, eq=False)
class OrbitSpec:
    """A regular orbit parameter with its Cartan and multiplicity mode."""

    algebra: AlgebraSpec
    cartan: CartanDatum
    weight: tuple[float, ...]          # coordinates of the dual Cartan element
    mode: str
    s0: int
    weight_values: np.ndarray          # i * lambda'(H_k): parameter on the basis
    fixed_points: tuple[FixedPoint, ...]
    assignment: MultiplicityAssignment
    user_multiplicities: Optional[Mapping[str, int]] = None

    @property
    def dual_element(self) -> AlgebraElement:
        out = None
        for c, h in zip(self.weight, self.cartan.real_basis):
            out = c * h if out is None else out + (c * h)
        return out

    def casimir_eigenvalue(self) -> complex:
        """B*(parameter, parameter); negative of the real dual's square."""
        z = self.dual_element
        return complex(-killing_form(z, z))


def _weight_values(cartan: CartanDatum, weight: Sequence[float]) -> np.ndarray:
    z = None
    for c, h in zip(weight, cartan.real_basis):
        z = c * h if z is None else z + (c * h)
    vals = np.array(
        [1j * killing_form(z, h) for h in cartan.basis], dtype=complex
    )
    return vals


def _dominant_weight(spec: AlgebraSpec, cartan: CartanDatum,
                     weight: tuple[float, ...]) -> tuple[float, ...]:
    """Weyl-canonical representative of the orbit parameter.

    The orbits of a parameter and of its Weyl images coincide, so the
    parameter is stored with its dual Cartan element in the canonical
    (descending-eigenvalue) chamber.  This pins the orientation convention
    behind the all-ones compact multiplicities and makes the transform
    manifestly Weyl-invariant in the parameter.
    """
    m = sum(
        c * cartan.real_basis[k].matrix for k, c in enumerate(weight)
    )
    diag = np.diagonal(m)
    if spec.family == "su":
        ordered = 1j * np.sort(diag.imag)[::-1]
    else:
        ordered = np.sort(diag.real)[::-1].astype(complex)
    dom = element_from_matrix(spec, np.diag(ordered))
    coords = dom.coords
    if np.iscomplexobj(coords) or np.max(np.abs(coords[spec.rank:])) > 1e-12:
        raise AlgebraError("failed to canonicalize the orbit parameter")
    return tuple(float(c) for c in coords[: spec.rank])


def make_orbit(spec: AlgebraSpec, weight: Sequence[float], mode: str = None,
               s0: int = 1,
               user_multiplicities: Optional[Mapping[str, int]] = None,
               ) -> OrbitSpec:
    """Validate the orbit parameter and precompute its fixed-point data."""
    if mode is None:
        mode = "compact" if spec.family == "su" else "maximally_split"
    if mode == "compact" and spec.family != "su":
        raise AlgebraError("compact mode requires the su family")
    if mode == "maximally_split" and spec.family != "sl_real":
        raise AlgebraError("maximally_split mode requires the sl_real family")

    weight = tuple(float(w) for w in weight)
    cart = standard_cartan(spec)
    if len(weight) != cart.rank:
        raise AlgebraError(
            f"weight needs {cart.rank} coordinates, got {len(weight)}"
        )
    if mode != "user_supplied":
        # User-supplied multiplicity labels refer to the chamber of the
        # parameter as given, so canonicalization applies only to the
        # automatic modes.
        weight = _dominant_weight(spec, cart, weight)
    values = _weight_values(cart, weight)
    if not is_regular_covector(cart, values):
        raise AlgebraError("orbit parameter is singular for the Cartan")

    fps = enumerate_fixed_points(cart, values)
    fps = closed_orbit_support(cart, fps, spec.family)
    assignment, fps = assign_multiplicities(
        fps, mode, sign=s0, user_values=user_multiplicities
    )
    return OrbitSpec(
        algebra=spec,
        cartan=cart,
        weight=weight,
        mode=mode,
        s0=int(s0),
        weight_values=values,
        fixed_points=fps,
        assignment=assignment,
        user_multiplicities=user_multiplicities,
    )


@dataclass(frozen=True, eq=False)
class TermBreakdown:
    label: str
    exponent: complex
    denominator: complex
    multiplicity: int
    value: complex


@dataclass(frozen=True, eq=False)
class EvalResult:
    """Value with per-fixed-point terms; the total is the label-ordered sum."""

    value: complex
    terms: tuple[TermBreakdown, ...]
    degenerate: bool
    conjugacy: str    # "cartan" or "outside"


_ZERO_OUTSIDE = "outside"


def _evaluate_at_cartan(orbit: OrbitSpec, t_coords: np.ndarray,
                        fixed_points: Sequence[FixedPoint]) -> EvalResult:
    terms = []
    total = 0.0 + 0.0j
    for fp in fixed_points:
        denom = 1.0 + 0.0j
        for r in fp.borel_roots:
            denom *= complex(np.dot(orbit.cartan.roots[r], t_coords))
        expo = complex(np.dot(fp.weight, t_coords))
        val = fp.multiplicity * np.exp(expo) / denom
        terms.append(
            TermBreakdown(
                label=fp.weyl.label,
                exponent=expo,
                denominator=denom,
                multiplicity=fp.multiplicity,
                value=complex(val),
            )
        )
        total += val
    return EvalResult(
        value=complex(total), terms=tuple(terms), degenerate=False,
        conjugacy="cartan",
    )


def fourier_value(orbit: OrbitSpec, x: AlgebraElement,
                  on_degenerate: str = "raise") -> EvalResult:
    """Evaluate the transform at a regular semisimple element.

    Raises DegenerateInputError near root hyperplanes unless
    ``on_degenerate="flag"``, in which case a degenerate result row is
    returned instead.
    """
    if not is_regular_semisimple(x):
        raise AlgebraError("evaluation point must be regular semisimple")
    reduction = reduce_to_cartan(x, orbit.cartan)
    if reduction is None:
        # Not conjugate into the split Cartan: the transform vanishes
        # identically on this conjugacy class.
        return EvalResult(
            value=0.0 + 0.0j, terms=(), degenerate=False, conjugacy=_ZERO_OUTSIDE
        )
    t = cartan_coordinates(orbit.cartan, reduction.reduced)
    root_vals = orbit.cartan.roots @ t
    scale = max(1.0, float(np.max(np.abs(root_vals))))
    if float(np.min(np.abs(root_vals))) < WALL_TOL * scale:
        if on_degenerate == "raise":
            raise DegenerateInputError(
                "evaluation point within tolerance of a root hyperplane"
            )
        return EvalResult(
            value=complex("nan"), terms=(), degenerate=True, conjugacy="cartan"
        )
    return _evaluate_at_cartan(orbit, t, orbit.fixed_points)


def fourier_grid(orbit: OrbitSpec, samples: Sequence[AlgebraElement],
                 threads: int = 1) -> tuple[EvalResult, ...]:
    """Evaluate a batch; degenerate or non-regular rows are flagged, not dropped.

    Output order matches input order regardless of thread count.
    """
    def one(x: AlgebraElement) -> EvalResult:
        try:
            return fourier_value(orbit, x, on_degenerate="flag")
        except (IndeterminateRegularityError, AlgebraError):
            return EvalResult(
                value=complex("nan"), terms=(), degenerate=True, conjugacy="cartan"
            )

    samples = list(samples)
    if threads <= 1 or len(samples) <= 1:
        return tuple(one(x) for x in samples)
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return tuple(pool.map(one, samples))


# ---------------------------------------------------------------------------
# Analytic property checks
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class CasimirCheck:
    residual: float
    relative: bool          # False when |F| was too small for a ratio
    eigenvalue: complex
    value: complex


def _orthogonal_directions(spec: AlgebraSpec) -> tuple[np.ndarray, np.ndarray]:
    """Killing-orthonormal coordinate directions and their signature signs."""
    evals, vecs = np.linalg.eigh(spec.killing)
    signs = np.sign(evals)
    dirs = vecs / np.sqrt(np.abs(evals))
    return dirs, signs


def casimir_check(orbit: OrbitSpec, x: AlgebraElement,
                  step: float = 1e-3) -> CasimirCheck:
    """Central-difference check of the second-order eigenvalue identity.

    Applies the flat quadratic invariant operator (Killing-orthonormal
    second derivatives weighted by signature) and compares with
    multiplication by the Casimir eigenvalue of the orbit parameter.
    """
    spec = orbit.algebra
    dirs, signs = _orthogonal_directions(spec)
    base = fourier_value(orbit, x).value
    acc = 0.0 + 0.0j
    for i in range(spec.dim):
        direction = dirs[:, i]
        xp = element(spec, x.coords + step * direction)
        xm = element(spec, x.coords - step * direction)
        fp = fourier_value(orbit, xp).value
        fm = fourier_value(orbit, xm).value
        acc += signs[i] * (fp - 2.0 * base + fm) / (step * step)
    eig = orbit.casimir_eigenvalue()
    err = abs(acc - eig * base)
    if abs(base) < 1e-12:
        return CasimirCheck(residual=float(err), relative=False,
                            eigenvalue=eig, value=base)
    return CasimirCheck(residual=float(err / abs(base)), relative=True,
                        eigenvalue=eig, value=base)


@dataclass(frozen=True, eq=False)
class InvarianceReport:
    ad_difference: float
    weyl_differences: Mapping[str, float]
    flagged: bool


def random_group_element(spec: AlgebraSpec, rng: np.random.Generator,
                         factors: int = 4, scale: float = 0.4) -> np.ndarray:
    """Random product of exponentials of basis elements, in the defining rep."""
    from scipy.linalg import expm

    g = np.eye(spec.n, dtype=complex)
    for _ in range(factors):
        i = int(rng.integers(0, spec.dim))
        c = scale * float(rng.standard_normal())
        g = g @ expm(c * spec.basis[i])
    return g


def invariance_checks(orbit: OrbitSpec, x: AlgebraElement,
                      g: np.ndarray) -> InvarianceReport:
    """|F(Ad(g)x) - F(x)| and, in compact mode, |F_(w.weight)(x) - F(x)|."""
    base = fourier_value(orbit, x).value
    gx = element_from_matrix(
        orbit.algebra, np.asarray(g) @ x.matrix @ np.linalg.inv(np.asarray(g))
    )
    flagged = False
    try:
        moved = fourier_value(orbit, gx).value
        ad_diff = abs(moved - base)
    except (DegenerateInputError, IndeterminateRegularityError):
        ad_diff = float("nan")
        flagged = True

    weyl_diffs: dict[str, float] = {}
    if orbit.mode == "compact":
        cart = orbit.cartan
        for w in cart.weyl:
            moved_weight = _weyl_moved_weight(orbit, w)
            moved_orbit = make_orbit(
                orbit.algebra, moved_weight, mode=orbit.mode, s0=orbit.s0
            )
            weyl_diffs[w.label] = abs(fourier_value(moved_orbit, x).value - base)
    return InvarianceReport(
        ad_difference=ad_diff, weyl_differences=weyl_diffs, flagged=flagged
    )


def _weyl_moved_weight(orbit: OrbitSpec, w) -> tuple[float, ...]:
    """Weight coordinates of the w-image of the orbit parameter."""
    cart = orbit.cartan
    values = w.apply(orbit.weight_values)
    coeff = np.linalg.solve(cart.gram.astype(complex), values / 1j)
    m = sum(c * h.matrix for c, h in zip(coeff, cart.basis))
    moved = element_from_matrix(orbit.algebra, m)
    return tuple(float(c) for c in np.real(moved.coords[: orbit.algebra.rank]))
