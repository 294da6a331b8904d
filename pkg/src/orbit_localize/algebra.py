"""Concrete semisimple real Lie algebras: su(n) and sl(n,R).

Matrix realizations, fixed once and for all:

* ``sl_real``: traceless real n x n matrices.  Basis: the diagonal
  differences ``h_k = E_kk - E_(k+1)(k+1)`` (k = 1..n-1) followed by the
  elementary off-diagonal matrices ``E_jk`` (j != k), pairs ordered
  lexicographically with the upper entry first.
* ``su``: traceless anti-Hermitian n x n matrices.  Basis: the imaginary
  diagonal differences ``i (E_kk - E_(k+1)(k+1))`` followed, for each pair
  j < k, by the real rotation ``E_jk - E_kj`` and the imaginary symmetric
  ``i (E_jk + E_kj)``.

Structure constants and the Killing matrix are derived from these matrices
at build time and validated (antisymmetry, Jacobi, invariance, the expected
signature).  Everything downstream -- brackets, ad matrices, Cartan data,
Weyl groups, Iwasawa decompositions, conjugation into a Cartan -- is
expressed against this fixed basis, so all coordinates are reproducible.

All public values are immutable after construction (arrays are marked
read-only) and every operation is a pure function.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

__all__ = [
    "AlgebraError",
    "IndeterminateRegularityError",
    "AlgebraSpec",
    "AlgebraElement",
    "CartanDatum",
    "WeylElement",
    "IwasawaDatum",
    "CartanReduction",
    "build_algebra",
    "element",
    "element_from_matrix",
    "bracket",
    "killing_form",
    "killing_dual",
    "killing_dual_inverse",
    "pair",
    "adjoint_matrix",
    "is_regular_semisimple",
    "cartan_of",
    "coroot",
    "iwasawa_decomposition",
    "reduce_to_cartan",
]

# Relative eigenvalue-separation tolerance used to decide regularity.
# Spectra separated by less than REGULAR_TOL are rejected; the band
# [REGULAR_TOL, 10*REGULAR_TOL) is refused as indeterminate instead of
# being silently classified.
REGULAR_TOL = 1e-8


class AlgebraError(ValueError):
    """Invalid construction or operation on algebra data."""


class IndeterminateRegularityError(AlgebraError):
    """Spectrum too close to degenerate to classify reliably."""


def _readonly(a: np.ndarray) -> np.ndarray:
    a = np.ascontiguousarray(a)
    a.setflags(write=False)
    return a


# ---------------------------------------------------------------------------
# Algebra specification
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class AlgebraSpec:
    """A fixed basis realization of su(n) or sl(n,R)."""

    family: str
    n: int
    dim: int
    rank: int
    labels: tuple[str, ...]
    basis: np.ndarray       # (dim, n, n) complex
    structure: np.ndarray   # (dim, dim, dim): [e_i, e_j] = sum_k c[i,j,k] e_k
    killing: np.ndarray     # (dim, dim) real symmetric
    _proj: np.ndarray = field(repr=False, default=None)  # matrix -> coords

    def __repr__(self) -> str:
        return f"AlgebraSpec({self.family}({self.n}), dim={self.dim})"


@dataclass(frozen=True, eq=False)
class AlgebraElement:
    """An element of the algebra (or its complexification) in coordinates."""

    algebra: AlgebraSpec
    coords: np.ndarray  # (dim,), float64 for g_R, complex128 for g

    @property
    def field_tag(self) -> str:
        return "complex" if np.iscomplexobj(self.coords) else "real"

    @property
    def matrix(self) -> np.ndarray:
        return np.tensordot(self.coords, self.algebra.basis, axes=(0, 0))

    def __add__(self, other: "AlgebraElement") -> "AlgebraElement":
        _check_same(self, other)
        return AlgebraElement(self.algebra, _readonly(self.coords + other.coords))

    def __sub__(self, other: "AlgebraElement") -> "AlgebraElement":
        _check_same(self, other)
        return AlgebraElement(self.algebra, _readonly(self.coords - other.coords))

    def __rmul__(self, scalar) -> "AlgebraElement":
        return AlgebraElement(self.algebra, _readonly(scalar * self.coords))

    def __neg__(self) -> "AlgebraElement":
        return AlgebraElement(self.algebra, _readonly(-self.coords))


def _check_same(x: AlgebraElement, y: AlgebraElement) -> None:
    if x.algebra is not y.algebra:
        if (x.algebra.family, x.algebra.n) != (y.algebra.family, y.algebra.n):
            raise AlgebraError("elements belong to different algebras")
    if x.coords.shape != y.coords.shape:
        raise AlgebraError("coordinate dimension mismatch")


def _basis_matrices(family: str, n: int) -> tuple[list[np.ndarray], list[str]]:
    mats: list[np.ndarray] = []
    labels: list[str] = []

    def e(j, k):
        m = np.zeros((n, n), dtype=complex)
        m[j, k] = 1.0
        return m

    if family == "sl_real":
        for k in range(n - 1):
            mats.append(e(k, k) - e(k + 1, k + 1))
            labels.append(f"h{k + 1}")
        for j in range(n):
            for k in range(n):
                if j != k:
                    mats.append(e(j, k))
                    labels.append(f"e{j + 1}{k + 1}")
    elif family == "su":
        for k in range(n - 1):
            mats.append(1j * (e(k, k) - e(k + 1, k + 1)))
            labels.append(f"d{k + 1}")
        for j in range(n):
            for k in range(j + 1, n):
                mats.append(e(j, k) - e(k, j))
                labels.append(f"s{j + 1}{k + 1}")
                mats.append(1j * (e(j, k) + e(k, j)))
                labels.append(f"a{j + 1}{k + 1}")
    else:
        raise AlgebraError(f"unsupported family: {family!r}")
    return mats, labels


def _matrix_to_coords(proj: np.ndarray, m: np.ndarray) -> np.ndarray:
    flat = np.concatenate([m.real.ravel(), m.imag.ravel()])
    return proj @ flat


def build_algebra(family: str, n: int) -> AlgebraSpec:
    """Construct and validate a realization of su(n) or sl(n,R)."""
    if family not in ("su", "sl_real"):
        raise AlgebraError(f"unsupported family: {family!r}")
    if n < 2:
        raise AlgebraError(f"rank parameter must satisfy n >= 2, got {n}")

    mats, labels = _basis_matrices(family, n)
    dim = len(mats)
    assert dim == n * n - 1

    # Real-linear projector onto the basis: coordinates are real for
    # real-form elements and extend complex-linearly on the complexification.
    flat = np.stack(
        [np.concatenate([m.real.ravel(), m.imag.ravel()]) for m in mats]
    )
    proj = np.linalg.pinv(flat.T)

    structure = np.zeros((dim, dim, dim))
    for i in range(dim):
        for j in range(i + 1, dim):
            c = _matrix_to_coords(proj, mats[i] @ mats[j] - mats[j] @ mats[i])
            structure[i, j] = c
            structure[j, i] = -c
    structure[np.abs(structure) < 1e-13] = 0.0

    # Killing matrix from the structure tensor: B_ij = tr(ad e_i ad e_j).
    killing = np.einsum("ilk,jkl->ij", structure, structure)
    killing[np.abs(killing) < 1e-10] = 0.0

    spec = AlgebraSpec(
        family=family,
        n=n,
        dim=dim,
        rank=n - 1,
        labels=tuple(labels),
        basis=_readonly(np.stack(mats)),
        structure=_readonly(structure),
        killing=_readonly(killing),
        _proj=_readonly(proj),
    )
    _validate_spec(spec)
    return spec


def _validate_spec(spec: AlgebraSpec) -> None:
    c, B = spec.structure, spec.killing
    if np.max(np.abs(c + np.swapaxes(c, 0, 1))) > 1e-12:
        raise AlgebraError("structure constants not antisymmetric")
    # Jacobi: sum over cyclic permutations of [[e_i,e_j],e_k] vanishes.
    jac = (
        np.einsum("ijm,mkl->ijkl", c, c)
        + np.einsum("jkm,mil->ijkl", c, c)
        + np.einsum("kim,mjl->ijkl", c, c)
    )
    if np.max(np.abs(jac)) > 1e-12:
        raise AlgebraError("Jacobi identity fails")
    if np.max(np.abs(B - B.T)) > 1e-12:
        raise AlgebraError("Killing matrix not symmetric")
    # Invariance: B([z,x],y) + B(x,[z,y]) = 0 on all basis triples.
    inv = np.einsum("zxm,my->zxy", c, B) + np.einsum("zym,xm->zxy", c, B)
    if np.max(np.abs(inv)) > 1e-10:
        raise AlgebraError("Killing form not invariant")
    eigs = np.linalg.eigvalsh(B)
    if spec.family == "su":
        if eigs.max() > -1e-9:
            raise AlgebraError("Killing form of su(n) must be negative definite")
    else:
        if np.min(np.abs(eigs)) < 1e-9 or eigs.max() < 0 or eigs.min() > 0:
            raise AlgebraError("Killing form of sl(n,R) must be indefinite nondegenerate")


# ---------------------------------------------------------------------------
# Elementary operations
# ---------------------------------------------------------------------------

def element(spec: AlgebraSpec, coords: Sequence) -> AlgebraElement:
    arr = np.asarray(coords)
    if arr.shape != (spec.dim,):
        raise AlgebraError(f"expected {spec.dim} coordinates, got shape {arr.shape}")
    if not np.iscomplexobj(arr):
        arr = arr.astype(float)
    return AlgebraElement(spec, _readonly(arr))


def element_from_matrix(spec: AlgebraSpec, m: np.ndarray) -> AlgebraElement:
    """Coordinates of a matrix lying in the algebra or its complexification."""
    m = np.asarray(m, dtype=complex)
    re = _matrix_to_coords(spec._proj, m)
    im = _matrix_to_coords(spec._proj, -1j * m)
    coords = re + 1j * im
    if np.max(np.abs(coords.imag)) < 1e-12:
        coords = coords.real
    recon = np.tensordot(coords, spec.basis, axes=(0, 0))
    if np.max(np.abs(recon - m)) > 1e-9 * max(1.0, np.max(np.abs(m))):
        raise AlgebraError("matrix does not lie in the algebra span")
    return AlgebraElement(spec, _readonly(coords))


def bracket(x: AlgebraElement, y: AlgebraElement) -> AlgebraElement:
    _check_same(x, y)
    c = x.algebra.structure
    out = np.einsum("i,j,ijk->k", x.coords, y.coords, c)
    return AlgebraElement(x.algebra, _readonly(out))


def killing_form(x: AlgebraElement, y: AlgebraElement):
    _check_same(x, y)
    val = x.coords @ x.algebra.killing @ y.coords
    return complex(val) if np.iscomplexobj(val) else float(val)


def killing_dual(x: AlgebraElement) -> AlgebraElement:
    """The covector B(x, .), stored through its defining vector."""
    return AlgebraElement(x.algebra, x.coords)


def killing_dual_inverse(xi: AlgebraElement) -> AlgebraElement:
    return AlgebraElement(xi.algebra, xi.coords)


def pair(xi: AlgebraElement, y: AlgebraElement):
    """Evaluate a covector (stored via killing_dual) on an element."""
    return killing_form(xi, y)


def adjoint_matrix(x: AlgebraElement) -> np.ndarray:
    """Matrix of ad(x) on the algebra basis: column j holds [x, e_j]."""
    return np.einsum("i,ijk->kj", x.coords, x.algebra.structure)


def _defining_eigenvalues(x: AlgebraElement) -> np.ndarray:
    """Eigenvalues of the defining matrix, canonically ordered.

    Order: descending real part, ties broken by descending imaginary part.
    For regular elements the order identifies the dominant chamber.
    """
    m = x.matrix
    if x.algebra.family == "su" and not np.iscomplexobj(x.coords):
        ev = -1j * np.linalg.eigvalsh(1j * m)
    else:
        ev = np.linalg.eigvals(m)
    order = np.lexsort((-ev.imag, -ev.real))
    return ev[order]


def is_regular_semisimple(x: AlgebraElement) -> bool:
    """Whether ad(x) is diagonalizable over C with kernel of dimension rank.

    For these matrix realizations the ad eigenvalues are the pairwise
    differences of defining-matrix eigenvalues, so the test reduces to
    eigenvalue distinctness.  Near-degenerate spectra (relative separation
    in [REGULAR_TOL, 10*REGULAR_TOL)) raise IndeterminateRegularityError.
    """
    scale = float(np.linalg.norm(x.matrix))
    if scale == 0.0:
        return False
    ev = _defining_eigenvalues(x)
    n = x.algebra.n
    sep = min(
        abs(ev[i] - ev[j]) for i in range(n) for j in range(i + 1, n)
    ) / scale
    if sep < REGULAR_TOL:
        return False
    if sep < 10 * REGULAR_TOL:
        raise IndeterminateRegularityError(
            f"eigenvalue separation {sep:.3e} within the indeterminate band"
        )
    return True


# ---------------------------------------------------------------------------
# Cartan subalgebras, roots, Weyl group
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class WeylElement:
    """A Weyl group element acting on covector value-vectors."""

    label: str
    word: tuple[int, ...]     # indices of simple reflections, left to right
    matrix: np.ndarray        # (rank, rank): xi |-> matrix @ xi
    determinant: float

    def apply(self, covector: np.ndarray) -> np.ndarray:
        return self.matrix @ covector


@dataclass(frozen=True, eq=False)
class CartanDatum:
    """A Cartan subalgebra with its roots, root vectors and Weyl group.

    Roots are stored as value-vectors on the complex Cartan basis
    (``roots[r, k] = alpha_r(basis[k])``); functionals on the Cartan use the
    same representation throughout.
    """

    algebra: AlgebraSpec
    basis: tuple[AlgebraElement, ...]
    real_basis: tuple[AlgebraElement, ...]
    roots: np.ndarray               # (n_roots, rank) real
    root_vectors: tuple[AlgebraElement, ...]
    positive: tuple[int, ...]
    simple: tuple[int, ...]
    weyl: tuple[WeylElement, ...]
    gram: np.ndarray                # B restricted to the Cartan basis

    @property
    def rank(self) -> int:
        return len(self.basis)

    def root_index(self, vec: np.ndarray) -> int:
        key = tuple(np.round(np.asarray(vec).real, 6))
        try:
            return self._root_table[key]
        except AttributeError:
            table = {
                tuple(np.round(self.roots[r], 6)): r
                for r in range(len(self.roots))
            }
            object.__setattr__(self, "_root_table", table)
            return self._root_table[key]

    def weyl_by_label(self, label: str) -> WeylElement:
        for w in self.weyl:
            if w.label == label:
                return w
        raise AlgebraError(f"unknown Weyl label {label!r}")


def coroot(cartan: CartanDatum, root_idx: int) -> np.ndarray:
    """Coefficients of the coroot H_alpha over the Cartan basis."""
    alpha = cartan.roots[root_idx]
    t = np.linalg.solve(cartan.gram, alpha)
    return 2.0 * t / (alpha @ t)


def _reflection_matrix(cartan_gram: np.ndarray, alpha: np.ndarray) -> np.ndarray:
    t = np.linalg.solve(cartan_gram, alpha)
    cv = 2.0 * t / (alpha @ t)
    return np.eye(len(alpha)) - np.outer(alpha, cv)


def _weyl_closure(gram: np.ndarray, roots: np.ndarray,
                  simple_idx: Sequence[int]) -> list[WeylElement]:
    """Breadth-first closure over simple reflections with canonical labels."""
    rank = gram.shape[0]
    gens = [_reflection_matrix(gram, roots[i]) for i in simple_idx]

    def key(m: np.ndarray):
        return tuple(np.round(m, 9).ravel())

    ident = np.eye(rank)
    seen = {key(ident): ("e", ())}
    frontier = [(ident, ())]
    out = [WeylElement("e", (), _readonly(ident), 1.0)]
    while frontier:
        nxt = []
        candidates = []
        for m, word in frontier:
            for gi, g in enumerate(gens):
                candidates.append((m @ g, word + (gi + 1,)))
        # lexicographic tie-break on the word keeps labels deterministic
        candidates.sort(key=lambda t: t[1])
        for m, word in candidates:
            k = key(m)
            if k in seen:
                continue
            label = "s" + "s".join(str(i) for i in word)
            seen[k] = (label, word)
            det = float(np.sign(np.linalg.det(m)))
            out.append(WeylElement(label, word, _readonly(m), det))
            nxt.append((m, word))
        frontier = nxt
    out.sort(key=lambda w: (len(w.word), w.word))
    return out


def _real_form_basis(spec: AlgebraSpec,
                     cartan_basis: list[AlgebraElement]) -> list[AlgebraElement]:
    """Basis of the real points t intersect g_R inside the complex span."""
    rank = len(cartan_basis)
    cols = np.stack([h.coords.astype(complex) for h in cartan_basis], axis=1)
    # Real combinations sum_j (a_j + i b_j) H_j with real coordinates:
    # stack real and imaginary parts and take the null space of the
    # imaginary component.
    m = np.concatenate([cols.real, -cols.imag], axis=1)  # real part map
    mi = np.concatenate([cols.imag, cols.real], axis=1)  # imag part map
    _, s, vh = np.linalg.svd(mi)
    null = vh[np.sum(s > 1e-9):].T  # (2*rank, rank) real coefficients
    out = []
    for j in range(null.shape[1]):
        ab = null[:, j]
        coords = m @ ab
        norm = np.linalg.norm(coords)
        if norm < 1e-12:
            continue
        out.append(element(spec, coords / norm))
    if len(out) != rank:
        raise AlgebraError("failed to extract a real basis of the Cartan")
    return out


def cartan_of(x: AlgebraElement) -> CartanDatum:
    """Cartan data of the unique Cartan subalgebra through a regular x.

    The basis is ``V (E_kk - E_(k+1)(k+1)) V^-1`` with V the (canonically
    ordered and phase-normalized) eigenvector matrix of the defining
    matrix of x; root vectors are the conjugated elementary matrices.
    """
    if not is_regular_semisimple(x):
        raise AlgebraError("cartan_of requires a regular semisimple element")
    spec = x.algebra
    n = spec.n
    m = x.matrix
    if spec.family == "su" and not np.iscomplexobj(x.coords):
        vals, vecs = np.linalg.eigh(1j * m)
        ev = -1j * vals
    else:
        ev, vecs = np.linalg.eig(m)
    order = np.lexsort((-ev.imag, -ev.real))
    ev, vecs = ev[order], vecs[:, order]
    # Deterministic phase: largest-modulus entry of each eigenvector real > 0.
    for k in range(n):
        i = int(np.argmax(np.abs(vecs[:, k])))
        ph = vecs[i, k] / abs(vecs[i, k])
        vecs[:, k] = vecs[:, k] / ph
    vinv = np.linalg.inv(vecs)

    def conj(mat):
        return vecs @ mat @ vinv

    def e(j, k):
        mm = np.zeros((n, n), dtype=complex)
        mm[j, k] = 1.0
        return mm

    basis = [element_from_matrix(spec, conj(e(k, k) - e(k + 1, k + 1)))
             for k in range(n - 1)]
    roots = []
    root_vectors = []
    for i in range(n):
        for j in range(n):
            if i == j:
                continue
            vec = np.zeros(n - 1)
            for k in range(n - 1):
                vec[k] = (1.0 if i == k else 0.0) - (1.0 if i == k + 1 else 0.0) \
                    - (1.0 if j == k else 0.0) + (1.0 if j == k + 1 else 0.0)
            roots.append(vec)
            root_vectors.append(element_from_matrix(spec, conj(e(i, j))))
    roots = np.array(roots)
    positive = tuple(
        r for r, (i, j) in enumerate(
            (i, j) for i in range(n) for j in range(n) if i != j)
        if i < j
    )
    # Simple positive roots: not a sum of two positive roots.
    pos_set = {tuple(np.round(roots[r], 6)) for r in positive}
    simple = tuple(
        r for r in positive
        if not any(
            tuple(np.round(roots[r] - roots[q], 6)) in pos_set
            for q in positive if q != r
        )
    )
    gram = np.zeros((n - 1, n - 1))
    for a in range(n - 1):
        for b in range(n - 1):
            gram[a, b] = np.real(
                basis[a].coords @ spec.killing @ basis[b].coords
            )
    weyl = _weyl_closure(gram, roots, simple)
    cart = CartanDatum(
        algebra=spec,
        basis=tuple(basis),
        real_basis=tuple(_real_form_basis(spec, basis)),
        roots=_readonly(roots),
        root_vectors=tuple(root_vectors),
        positive=positive,
        simple=simple,
        weyl=tuple(weyl),
        gram=_readonly(gram),
    )
    if len(cart.weyl) != math.factorial(n):
        raise AlgebraError(
            f"Weyl closure produced {len(cart.weyl)} elements, expected {math.factorial(n)}"
        )
    return cart


def cartan_coordinates(cartan: CartanDatum, x: AlgebraElement) -> np.ndarray:
    """Coordinates of an element of the Cartan over the complex basis."""
    cols = np.stack([h.coords.astype(complex) for h in cartan.basis], axis=1)
    t = np.linalg.lstsq(cols, x.coords.astype(complex), rcond=None)[0]
    recon = cols @ t
    if np.max(np.abs(recon - x.coords)) > 1e-8 * max(1.0, np.max(np.abs(x.coords))):
        raise AlgebraError("element does not lie in the Cartan subalgebra")
    return t


# ---------------------------------------------------------------------------
# Iwasawa decomposition
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class IwasawaDatum:
    """Cartan involution and the K/A/N (plus M) subspace data."""

    algebra: AlgebraSpec
    involution: np.ndarray                # (dim, dim) acting on coordinates
    k_basis: tuple[AlgebraElement, ...]
    p_basis: tuple[AlgebraElement, ...]
    a_basis: tuple[AlgebraElement, ...]
    m_basis: tuple[AlgebraElement, ...]
    n_basis: tuple[AlgebraElement, ...]
    restricted_roots: np.ndarray          # (n_res, dim a) values on a_basis
    restricted_positive: tuple[int, ...]


def iwasawa_decomposition(spec: AlgebraSpec) -> IwasawaDatum:
    """Iwasawa data for the realization.

    sl(n,R): theta(X) = -X^T; a = traceless diagonal, n = strictly lower
    triangular (the intersection with the negative restricted root spaces
    for the positive system e_i - e_j, i < j), k = antisymmetric.
    su(n): theta = id, k = g, a = n = 0, m = g.
    """
    n = spec.n

    def coords_of(m):
        return element_from_matrix(spec, m)

    def e(j, k):
        mm = np.zeros((n, n), dtype=complex)
        mm[j, k] = 1.0
        return mm

    if spec.family == "su":
        theta = np.eye(spec.dim)
        k_basis = tuple(element(spec, row) for row in np.eye(spec.dim))
        return IwasawaDatum(
            algebra=spec,
            involution=_readonly(theta),
            k_basis=k_basis,
            p_basis=(),
            a_basis=(),
            m_basis=k_basis,
            n_basis=(),
            restricted_roots=_readonly(np.zeros((0, 0))),
            restricted_positive=(),
        )

    # theta on coordinates from its action on basis matrices
    theta = np.zeros((spec.dim, spec.dim))
    for i in range(spec.dim):
        img = -spec.basis[i].T
        theta[:, i] = _matrix_to_coords(spec._proj, img)
    theta[np.abs(theta) < 1e-13] = 0.0

    k_basis = tuple(coords_of(e(i, j) - e(j, i))
                    for i in range(n) for j in range(i + 1, n))
    p_basis = tuple(
        [coords_of(e(k, k) - e(k + 1, k + 1)) for k in range(n - 1)]
        + [coords_of(e(i, j) + e(j, i)) for i in range(n) for j in range(i + 1, n)]
    )
    a_basis = tuple(coords_of(e(k, k) - e(k + 1, k + 1)) for k in range(n - 1))
    n_basis = tuple(coords_of(e(i, j))
                    for i in range(n) for j in range(n) if i > j)

    # Restricted roots: e_i - e_j as functionals on a, i != j.
    res = []
    pos = []
    idx = 0
    for i in range(n):
        for j in range(n):
            if i == j:
                continue
            vec = np.zeros(n - 1)
            for k in range(n - 1):
                vec[k] = (i == k) - (i == k + 1) - (j == k) + (j == k + 1)
            res.append(vec)
            if i < j:
                pos.append(idx)
            idx += 1
    return IwasawaDatum(
        algebra=spec,
        involution=_readonly(theta),
        k_basis=k_basis,
        p_basis=p_basis,
        a_basis=a_basis,
        m_basis=(),
        n_basis=n_basis,
        restricted_roots=_readonly(np.array(res)),
        restricted_positive=tuple(pos),
    )


# ---------------------------------------------------------------------------
# Conjugation into a Cartan subalgebra
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class CartanReduction:
    """Ad(g) x = reduced, with reduced in the target Cartan.

    ``reduced`` is chamber-canonical: its defining-matrix eigenvalues are in
    the canonical descending order, so repeated reductions of conjugate
    inputs agree.
    """

    group_element: np.ndarray   # defining-representation matrix, det 1
    reduced: AlgebraElement


def reduce_to_cartan(x: AlgebraElement,
                     target: CartanDatum) -> Optional[CartanReduction]:
    """Conjugate a regular element into the target (standard) Cartan.

    Returns None when no real conjugation exists (for sl(n,R) with the
    split Cartan: a non-real spectrum).  None is an ordinary outcome, not
    an error.
    """
    if not is_regular_semisimple(x):
        raise AlgebraError("reduce_to_cartan requires a regular semisimple element")
    spec = x.algebra
    n = spec.n
    m = x.matrix

    # Fast path: already diagonal in the canonical (dominant) order.
    diag = np.diagonal(m)
    if np.max(np.abs(m - np.diag(diag))) < 1e-14 * max(1.0, np.max(np.abs(m))):
        order = np.lexsort((-diag.imag, -diag.real))
        if np.array_equal(order, np.arange(n)):
            return CartanReduction(np.eye(n), x)

    if spec.family == "su":
        vals, vecs = np.linalg.eigh(1j * m)
        ev = -1j * vals
        order = np.lexsort((-ev.imag, -ev.real))
        ev, vecs = ev[order], vecs[:, order]
        det = np.linalg.det(vecs)
        vecs[:, 0] = vecs[:, 0] / det  # unit determinant, still unitary
        g = vecs.conj().T
        reduced = element_from_matrix(spec, np.diag(ev))
        return CartanReduction(_readonly(g), reduced)

    ev, vecs = np.linalg.eig(m)
    scale = max(1.0, float(np.max(np.abs(ev))))
    if np.max(np.abs(ev.imag)) > 1e-9 * scale:
        return None
    order = np.argsort(-ev.real)
    ev, vecs = ev[order].real, vecs[:, order]
    # Real spectrum of a real matrix: eigenvectors are real up to phase.
    v = np.zeros((n, n))
    for k in range(n):
        col = vecs[:, k]
        i = int(np.argmax(np.abs(col)))
        col = col / (col[i] / abs(col[i]))
        if np.max(np.abs(col.imag)) > 1e-8:
            return None
        v[:, k] = col.real / np.linalg.norm(col.real)
    det = np.linalg.det(v)
    if det < 0:
        v[:, 0] = -v[:, 0]
        det = -det
    v = v / det ** (1.0 / n)
    g = np.linalg.inv(v)
    reduced = element_from_matrix(spec, np.diag(ev))
    return CartanReduction(_readonly(g), reduced)
