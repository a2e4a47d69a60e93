"""Reproducing-kernel machinery over finite rational bases.

Gram matrices of prescaled basis elements are assembled by one of the
two quadrature backends, factored by a diagonally pivoted Cholesky with
a relative drop threshold, and wrapped in an evaluator that computes
the kernel sup-sum K(z) = sum |phi_i(z)|^2 over the induced orthonormal
family, together with the z z-bar second derivative of log K used for
the metric.  Evaluators serialize to JSON with lossless binary64
decimal strings so scans are reproducible byte for byte.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from .basis import BasisElement, PointSet, RationalCombination, power_log_eval
from .domain import CircularDomain, domain_from_dict, domain_to_dict
from .quadrature import quad2d_inner_product, spectral_gram, spectral_inner_product

__all__ = [
    "BackendMismatchError",
    "GramBuild",
    "KernelEvaluator",
    "inner_product",
    "gram_matrix",
    "kernel_lower_bound_single",
]

_DROP_TOL = 1e-12
_HERMITIAN_TOL = 1e-12
_RECONSTRUCT_TOL = 1e-10
_BACKEND_AGREE_TOL = 1e-6

FunctionLike = Union[BasisElement, RationalCombination]


class BackendMismatchError(RuntimeError):
    """The two quadrature backends disagree beyond tolerance."""

    def __init__(self, spectral: complex, quad2d: complex, rel: float):
        self.spectral = spectral
        self.quad2d = quad2d
        self.rel = rel
        super().__init__(
            f"backend disagreement {rel:.3e} relative: "
            f"spectral={spectral!r} quad2d={quad2d!r}"
        )


def _as_combination(f: FunctionLike) -> RationalCombination:
    if isinstance(f, BasisElement):
        return RationalCombination((f,), np.array([1.0 + 0j]))
    return f


def _pair_quad2d(f: FunctionLike, g: FunctionLike, d: CircularDomain, rel_tol: float) -> complex:
    fc = _as_combination(f)
    gc = _as_combination(g)
    total = 0j
    for ef, cf in zip(fc.elements, fc.coeffs):
        for eg, cg in zip(gc.elements, gc.coeffs):
            total += cf * np.conj(cg) * quad2d_inner_product(ef, eg, d, rel_tol)
    return complex(total)


def _pair_spectral(f: FunctionLike, g: FunctionLike, d: CircularDomain, rel_tol: float) -> complex:
    fc = _as_combination(f)
    gc = _as_combination(g)
    if len(fc.elements) == 1 and len(gc.elements) == 1:
        val = spectral_inner_product(fc.elements[0], gc.elements[0], d, rel_tol)
        return complex(fc.coeffs[0] * np.conj(gc.coeffs[0]) * val)
    elements = list(fc.elements) + list(gc.elements)
    gram, _ = spectral_gram(elements, d, rel_tol)
    nf = len(fc.elements)
    block = gram[:nf, nf:]
    return complex(fc.coeffs @ block @ np.conj(gc.coeffs))


def inner_product(
    f: FunctionLike,
    g: FunctionLike,
    d: CircularDomain,
    backend: str = "spectral",
    rel_tol: float = 1e-11,
) -> complex:
    """L2 inner product <f, g> over the domain.

    backend is one of "spectral", "quad2d", or "both"; with "both" the
    two routes are compared and a BackendMismatchError carrying both
    values is raised if they disagree beyond 1e-6 relative.
    """
    if backend == "spectral":
        return _pair_spectral(f, g, d, rel_tol)
    if backend == "quad2d":
        return _pair_quad2d(f, g, d, max(rel_tol, 1e-9))
    if backend == "both":
        a = _pair_spectral(f, g, d, rel_tol)
        b = _pair_quad2d(f, g, d, max(rel_tol, 1e-9))
        # the floor forgives entries that are zero up to quadrature noise
        # (e.g. cross pairs whose true value underflows); it never masks a
        # genuine relative disagreement between representable values
        scale = max(abs(a), abs(b), 1e-7)
        rel = abs(a - b) / scale
        if rel > _BACKEND_AGREE_TOL:
            raise BackendMismatchError(a, b, rel)
        return a
    raise ValueError(f"unknown backend {backend!r}")


def _pivoted_cholesky(
    gram: np.ndarray, drop_tol: float
) -> Tuple[np.ndarray, List[int], List[int]]:
    """Diagonally pivoted Cholesky; drops pivots below drop_tol relative.

    Returns (L, retained, dropped): L is lower triangular for the Gram
    block in retained order, retained/dropped are index lists into the
    original element order.
    """
    a = gram.copy().astype(np.complex128)
    n = a.shape[0]
    piv = list(range(n))
    initial_max = max(float(np.max(np.real(np.diag(a)))), 0.0)
    if initial_max <= 0.0:
        return np.zeros((0, 0), dtype=np.complex128), [], piv
    low = np.zeros_like(a)
    rank = n
    for k in range(n):
        diag = np.real(np.diag(a))[k:]
        j = int(np.argmax(diag)) + k
        if np.real(a[j, j]) <= drop_tol * initial_max:
            rank = k
            break
        if j != k:
            a[[k, j], :] = a[[j, k], :]
            a[:, [k, j]] = a[:, [j, k]]
            low[[k, j], :] = low[[j, k], :]
            piv[k], piv[j] = piv[j], piv[k]
        pivot = math.sqrt(float(np.real(a[k, k])))
        low[k, k] = pivot
        if k + 1 < n:
            col = a[k + 1 :, k] / pivot
            low[k + 1 :, k] = col
            a[k + 1 :, k + 1 :] -= np.outer(col, np.conj(col))
    return low[:rank, :rank], piv[:rank], sorted(piv[rank:])


@dataclass
class GramBuild:
    """A Gram matrix with its pivoted Cholesky factorization."""

    domain: CircularDomain
    elements: Tuple[BasisElement, ...]
    gram: np.ndarray
    chol: np.ndarray  # lower triangular, retained (pivot) order
    retained: Tuple[int, ...]
    dropped: Tuple[int, ...]
    hermitian_defect: float
    backend: str

    def check_invariants(self) -> None:
        if self.hermitian_defect > _HERMITIAN_TOL:
            raise AssertionError(
                f"gram hermitian defect {self.hermitian_defect:.3e} above tolerance"
            )
        idx = list(self.retained)
        block = self.gram[np.ix_(idx, idx)]
        approx = self.chol @ self.chol.conj().T
        scale = max(float(np.max(np.abs(block))), 1e-300)
        err = float(np.max(np.abs(approx - block))) / scale
        if err > _RECONSTRUCT_TOL:
            raise AssertionError(
                f"cholesky reconstruction error {err:.3e} above tolerance"
            )

    def evaluator(self) -> "KernelEvaluator":
        return KernelEvaluator(
            self.domain,
            tuple(self.elements[i] for i in self.retained),
            self.chol,
        )


def gram_matrix(
    elements: Sequence[BasisElement],
    d: CircularDomain,
    backend: str = "spectral",
    rel_tol: float = 1e-11,
    drop_tol: float = _DROP_TOL,
) -> GramBuild:
    """Assemble, symmetrize, and factor the Gram matrix of the elements."""
    elements = tuple(elements)
    if backend == "spectral":
        gram, defect = spectral_gram(elements, d, rel_tol)
    elif backend == "quad2d":
        n = len(elements)
        gram = np.zeros((n, n), dtype=np.complex128)
        for i in range(n):
            for j in range(i, n):
                val = quad2d_inner_product(elements[i], elements[j], d, max(rel_tol, 1e-9))
                gram[i, j] = val
                gram[j, i] = np.conj(val)
        defect = 0.0
        gram = 0.5 * (gram + gram.conj().T)
    else:
        raise ValueError(f"unknown backend {backend!r}")
    low, retained, dropped = _pivoted_cholesky(gram, drop_tol)
    build = GramBuild(
        domain=d,
        elements=elements,
        gram=gram,
        chol=low,
        retained=tuple(retained),
        dropped=tuple(dropped),
        hermitian_defect=defect,
        backend=backend,
    )
    build.check_invariants()
    return build


def _solve_lower(low: np.ndarray, rhs: np.ndarray) -> np.ndarray:
    from scipy.linalg import solve_triangular

    return solve_triangular(low, rhs, lower=True, check_finite=False)


class KernelEvaluator:
    """Evaluates the kernel sup-sum and its log-Hessian from a factorization.

    With Psi(z) the column of retained element values and L the Cholesky
    factor of their Gram matrix, Phi = L^{-1} Psi is orthonormal and

        K(z) = ||Phi(z)||^2,
        d_z d_zbar log K = (K * ||Phi'||^2 - |<Phi', Phi>|^2) / K^2.
    """

    def __init__(
        self,
        domain: CircularDomain,
        elements: Sequence[BasisElement],
        chol: np.ndarray,
    ):
        self.domain = domain
        self.elements = tuple(elements)
        self.chol = np.asarray(chol, dtype=np.complex128)
        if self.chol.shape != (len(self.elements), len(self.elements)):
            raise ValueError("factor shape does not match element count")

    def _values(self, pts: PointSet, mode: str) -> np.ndarray:
        rows = np.zeros((len(self.elements), len(pts)), dtype=np.complex128)
        for i, el in enumerate(self.elements):
            logmag, phase = power_log_eval(el, pts, mode)
            with np.errstate(over="ignore", under="ignore"):
                rows[i] = np.exp(logmag) * phase
        return rows

    def kernel_values(self, zs: np.ndarray) -> np.ndarray:
        """K(z) at each point (real array)."""
        zs = np.asarray(zs, dtype=np.complex128)
        pts = PointSet.from_complex(zs.ravel())
        phi = _solve_lower(self.chol, self._values(pts, "value"))
        out = np.sum(np.abs(phi) ** 2, axis=0)
        return out.reshape(zs.shape)

    def kernel_and_hessian(self, zs: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        """(K(z), d_z d_zbar log K(z)) at each point."""
        zs = np.asarray(zs, dtype=np.complex128)
        pts = PointSet.from_complex(zs.ravel())
        phi = _solve_lower(self.chol, self._values(pts, "value"))
        dphi = _solve_lower(self.chol, self._values(pts, "derivative"))
        k = np.sum(np.abs(phi) ** 2, axis=0)
        d2 = np.sum(np.abs(dphi) ** 2, axis=0)
        cross = np.sum(dphi * np.conj(phi), axis=0)
        # K = 0 yields nan/inf here; callers treat such points as
        # degenerate via the kernel column, so no warning is useful.
        with np.errstate(invalid="ignore", divide="ignore"):
            hess = (k * d2 - np.abs(cross) ** 2) / (k * k)
        return k.reshape(zs.shape), hess.reshape(zs.shape)

    def kernel(self, z: complex) -> float:
        return float(self.kernel_values(np.array([z]))[0])

    def log_hessian(self, z: complex) -> float:
        return float(self.kernel_and_hessian(np.array([z]))[1][0])

    # -- serialization ----------------------------------------------------

    def to_dict(self) -> dict:
        n = self.chol.shape[0]
        return {
            "schema": "bergman-evaluator-v1",
            "domain": domain_to_dict(self.domain),
            "elements": [el.descriptor() for el in self.elements],
            "chol": [
                [[repr(float(self.chol[i, j].real)), repr(float(self.chol[i, j].imag))] for j in range(n)]
                for i in range(n)
            ],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "KernelEvaluator":
        if data.get("schema") != "bergman-evaluator-v1":
            raise ValueError("unrecognized evaluator schema")
        domain = domain_from_dict(data["domain"])
        elements = tuple(BasisElement.from_descriptor(d) for d in data["elements"])
        n = len(elements)
        chol = np.zeros((n, n), dtype=np.complex128)
        for i, row in enumerate(data["chol"]):
            for j, (re, im) in enumerate(row):
                chol[i, j] = complex(float(re), float(im))
        return cls(domain, elements, chol)

    def dumps(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2) + "\n"

    @classmethod
    def loads(cls, text: str) -> "KernelEvaluator":
        return cls.from_dict(json.loads(text))


def kernel_lower_bound_single(
    d: CircularDomain, hole_index: int, z: complex
) -> float:
    """Kernel lower bound from the single tail h = (z - z_j)^{-1}.

    The domain sits inside the annulus r_j < |z - z_j| < 2 (holes are
    centered in the unit disc), so the squared norm of h is at most
    2 pi (log 2 - log r_j) and K(z) >= |h(z)|^2 / ||h||^2.
    """
    hole = d.holes[hole_index]
    dist2 = abs(z - hole.center) ** 2
    if dist2 == 0.0:
        raise ValueError("evaluation point coincides with the hole center")
    norm_sq = 2.0 * math.pi * (math.log(2.0) - hole.r.log)
    return 1.0 / (dist2 * norm_sq)


def annulus_kernel_reference(r: float, z: complex, cutoff: int = 50) -> float:
    """Kernel of the concentric annulus r < |z| < 1 by its Laurent series.

    The monomials z^k (k in Z, k != -1) and z^{-1} are orthogonal on the
    annulus, so the kernel is the sum of |z^k|^2 over their squared
    norms: (1/pi) sum_{k != -1} (k+1) |z|^{2k} / (1 - r^{2k+2}) plus the
    k = -1 term |z|^{-2} / (2 pi log(1/r)).  Truncated at |k| <= cutoff;
    used as an independent oracle for the Gram-based evaluator.
    """
    if not 0.0 < r < 1.0:
        raise ValueError("annulus requires 0 < r < 1")
    azs = abs(z) ** 2
    if not r * r < azs < 1.0:
        raise ValueError("point is outside the annulus")
    total = 1.0 / (azs * 2.0 * math.pi * math.log(1.0 / r))
    for k in range(-cutoff, cutoff + 1):
        if k == -1:
            continue
        total += (k + 1) * azs**k / (math.pi * (1.0 - r ** (2 * k + 2)))
    return total
