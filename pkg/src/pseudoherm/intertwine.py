"""Intertwining operators between isospectral systems and their canonical
factorization.

For matched eigenvalue clusters of two systems, L_n maps the n-th eigenvector
family of the first onto that of the second; L(alpha) = sum alpha_n L_n then
satisfies L H1 = H2 L for every coefficient choice. The canonical choice
(sqrt(|E|) on real clusters, E on the upper half of each conjugate pair, 1 on
the lower, with matched sign conventions in the metrics) upgrades the
intertwiner to a factorization H1 = L# L, H2 = L L#.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import NotIsospectral, NotPseudoHermitian
from .linalg import DEFAULT_TOLERANCE, ResidualCheck, Tolerance, as_matrix, spectral_norm
from .metric import EtaOperator, SignAssignment, canonical_eta, pseudo_adjoint
from .spectral import (
    KIND_REAL,
    KIND_UPPER,
    TAG_UNPAIRABLE,
    BiorthonormalSystem,
    classify_spectrum,
    reconstruct,
)

__all__ = [
    "MatchedCluster",
    "SpectralPairing",
    "Intertwiner",
    "Factorization",
    "match_spectra",
    "build_L",
    "canonical_factorization",
    "self_factorization",
    "verify_intertwining",
]


@dataclass(frozen=True)
class MatchedCluster:
    index1: int
    index2: int
    mu: int
    value: complex
    is_zero: bool


@dataclass(eq=False)
class SpectralPairing:
    """Cluster-level matching of two spectra within a shared tolerance.

    Nonzero clusters must match one-to-one with equal multiplicity; a zero
    cluster may be matched with truncated size mu = min(d1, d2) or left
    unmatched when only one side has one.
    """

    system1: BiorthonormalSystem
    system2: BiorthonormalSystem
    matches: tuple[MatchedCluster, ...]
    zero_unmatched1: int | None
    zero_unmatched2: int | None
    match_tol: float


@dataclass(eq=False)
class Intertwiner:
    matrix: np.ndarray
    alpha: tuple[complex, ...]
    pairing: SpectralPairing

    @property
    def source(self) -> BiorthonormalSystem:
        return self.pairing.system1

    @property
    def target(self) -> BiorthonormalSystem:
        return self.pairing.system2


@dataclass(eq=False)
class Factorization:
    """H1 = L# L and H2 = L L# with L# = eta1^-1 L^H eta2."""

    intertwiner: Intertwiner
    eta1: EtaOperator
    eta2: EtaOperator
    lsharp: np.ndarray
    residual_h1: float
    residual_h2: float
    threshold: float

    @property
    def matrix(self) -> np.ndarray:
        return self.intertwiner.matrix

    @property
    def passed(self) -> bool:
        return max(self.residual_h1, self.residual_h2) <= self.threshold

    def checks(self) -> tuple[ResidualCheck, ResidualCheck]:
        return (
            ResidualCheck("factorization_h1", self.residual_h1, self.threshold),
            ResidualCheck("factorization_h2", self.residual_h2, self.threshold),
        )


def match_spectra(
    sys1: BiorthonormalSystem,
    sys2: BiorthonormalSystem,
    tol: Tolerance = DEFAULT_TOLERANCE,
) -> SpectralPairing:
    """Match clusters of two systems by nearest eigenvalue.

    Raises NotIsospectral when a nonzero cluster is unmatched or multiplicities
    of matched nonzero clusters differ. Zero clusters are exempt.
    """
    mtol = max(sys1.cluster_tol, sys2.cluster_tol)

    def zero_index(sys: BiorthonormalSystem) -> int | None:
        for i, c in enumerate(sys.clusters):
            if abs(c.value) <= mtol:
                return i
        return None

    zero1, zero2 = zero_index(sys1), zero_index(sys2)
    nonzero1 = [i for i in range(len(sys1.clusters)) if i != zero1]
    nonzero2 = [i for i in range(len(sys2.clusters)) if i != zero2]

    matches: list[MatchedCluster] = []
    used: set[int] = set()
    for i in nonzero1:
        c1 = sys1.clusters[i]
        best, best_dist = None, mtol
        for j in nonzero2:
            if j in used:
                continue
            dist = abs(c1.value - sys2.clusters[j].value)
            if dist <= best_dist:
                best, best_dist = j, dist
        if best is None:
            raise NotIsospectral(
                f"eigenvalue {c1.value:.6g} of the first system has no match"
            )
        c2 = sys2.clusters[best]
        if c1.multiplicity != c2.multiplicity:
            raise NotIsospectral(
                f"eigenvalue {c1.value:.6g}: multiplicities differ "
                f"({c1.multiplicity} vs {c2.multiplicity})"
            )
        if c1.kind != c2.kind:
            raise NotIsospectral(
                f"eigenvalue {c1.value:.6g}: cluster labels differ "
                f"({c1.kind} vs {c2.kind})"
            )
        used.add(best)
        matches.append(
            MatchedCluster(
                index1=i,
                index2=best,
                mu=c1.multiplicity,
                value=c1.value,
                is_zero=False,
            )
        )
    leftover = [j for j in nonzero2 if j not in used]
    if leftover:
        value = sys2.clusters[leftover[0]].value
        raise NotIsospectral(
            f"eigenvalue {value:.6g} of the second system has no match"
        )

    zero_unmatched1 = zero_unmatched2 = None
    if zero1 is not None and zero2 is not None:
        c1, c2 = sys1.clusters[zero1], sys2.clusters[zero2]
        matches.append(
            MatchedCluster(
                index1=zero1,
                index2=zero2,
                mu=min(c1.multiplicity, c2.multiplicity),
                value=0.0,
                is_zero=True,
            )
        )
    else:
        zero_unmatched1, zero_unmatched2 = zero1, zero2

    matches.sort(key=lambda m: m.index1)
    return SpectralPairing(
        system1=sys1,
        system2=sys2,
        matches=tuple(matches),
        zero_unmatched1=zero_unmatched1,
        zero_unmatched2=zero_unmatched2,
        match_tol=mtol,
    )


def build_L(pairing: SpectralPairing, alpha) -> Intertwiner:
    """L(alpha) = sum of alpha_n * Psi2_n Phi1_n^H over matched clusters.

    Within a degenerate matched cluster the eigenvectors pair by column order;
    only the first mu columns enter when the zero cluster sizes differ.
    """
    alpha = tuple(complex(a) for a in alpha)
    if len(alpha) != len(pairing.matches):
        raise ValueError(
            f"expected {len(pairing.matches)} coefficients, got {len(alpha)}"
        )
    sys1, sys2 = pairing.system1, pairing.system2
    l = np.zeros((sys2.dim, sys1.dim), dtype=complex)
    for a, m in zip(alpha, pairing.matches):
        if a == 0:
            continue
        c1, c2 = sys1.clusters[m.index1], sys2.clusters[m.index2]
        psi2 = sys2.psi[:, c2.start : c2.start + m.mu]
        phi1 = sys1.phi[:, c1.start : c1.start + m.mu]
        l += a * (psi2 @ phi1.conj().T)
    return Intertwiner(matrix=l, alpha=alpha, pairing=pairing)


def _canonical_alpha(pairing: SpectralPairing) -> tuple[complex, ...]:
    sys1 = pairing.system1
    alpha: list[complex] = []
    for m in pairing.matches:
        kind = sys1.clusters[m.index1].kind
        if m.is_zero:
            alpha.append(0.0)
        elif kind == KIND_REAL:
            alpha.append(complex(np.sqrt(abs(m.value))))
        elif kind == KIND_UPPER:
            alpha.append(complex(m.value))
        else:
            alpha.append(1.0)
    return tuple(alpha)


def _canonical_signs(sys: BiorthonormalSystem, negative_flip: bool) -> SignAssignment:
    per = []
    for i in sys.real_cluster_indices():
        c = sys.clusters[i]
        is_zero = abs(c.value) <= sys.cluster_tol
        negative = negative_flip and not is_zero and c.value.real < 0
        sign = -1 if negative else 1
        per.append((i, (sign,) * c.multiplicity))
    return SignAssignment(tuple(per))


def canonical_factorization(
    sys1: BiorthonormalSystem,
    sys2: BiorthonormalSystem,
    tol: Tolerance = DEFAULT_TOLERANCE,
) -> Factorization:
    """Factor a matched pair: H1 = L# L, H2 = L L#.

    Sign convention: -1 on negative real clusters of the first system, +1
    everywhere else; coefficients sqrt(|E|) / E / 1 on real / upper / lower
    clusters and 0 on the zero cluster.
    """
    for sys in (sys1, sys2):
        if classify_spectrum(sys, tol).tag == TAG_UNPAIRABLE:
            raise NotPseudoHermitian(
                "factorization needs a real-or-conjugate-paired spectrum"
            )
    pairing = match_spectra(sys1, sys2, tol)
    alpha = _canonical_alpha(pairing)
    eta1 = canonical_eta(sys1, _canonical_signs(sys1, negative_flip=True))
    eta2 = canonical_eta(sys2, _canonical_signs(sys2, negative_flip=False))
    intertwiner = build_L(pairing, alpha)
    lsharp = pseudo_adjoint(intertwiner.matrix, eta1, eta2)

    h1, h2 = reconstruct(sys1), reconstruct(sys2)
    residual_h1 = spectral_norm(h1 - lsharp @ intertwiner.matrix)
    residual_h2 = spectral_norm(h2 - intertwiner.matrix @ lsharp)
    threshold = (
        tol.rtol
        * (1.0 + max(spectral_norm(h1), spectral_norm(h2)))
        * sys1.psi_cond
        * sys2.psi_cond
    )
    return Factorization(
        intertwiner=intertwiner,
        eta1=eta1,
        eta2=eta2,
        lsharp=lsharp,
        residual_h1=residual_h1,
        residual_h2=residual_h2,
        threshold=threshold,
    )


def self_factorization(
    sys: BiorthonormalSystem, tol: Tolerance = DEFAULT_TOLERANCE
) -> Factorization:
    """Factor a single matrix against itself: H = L# L."""
    return canonical_factorization(sys, sys, tol)


def verify_intertwining(
    l, h1, h2, tol: Tolerance = DEFAULT_TOLERANCE
) -> ResidualCheck:
    """Residual ||L H1 - H2 L||."""
    l = as_matrix(l)
    h1 = as_matrix(h1, square=True)
    h2 = as_matrix(h2, square=True)
    if l.shape != (h2.shape[0], h1.shape[0]):
        raise ValueError("intertwiner shape does not link the two matrices")
    value = spectral_norm(l @ h1 - h2 @ l)
    scale = max(spectral_norm(h1), spectral_norm(h2))
    threshold = tol.rtol * (1.0 + scale) * (1.0 + spectral_norm(l))
    return ResidualCheck("intertwining", value, threshold)
