"""Shared fixture algebras and small utilities for the test suite."""

from __future__ import annotations

import numpy as np

from manlab.algebras import (
    OperatorAlgebra,
    algebra_from_generators,
    compute_commutant,
    diagonal_masa,
    full_algebra,
    lattice_algebra,
    masa_from_unitary,
    structural_algebra,
    trivial_algebra,
)
from manlab.linalg import _haar_unitary_from_generator, swap_operator
from manlab.rng import RngStream

SX = np.array([[0, 1], [1, 0]], dtype=complex)
SY = np.array([[0, -1j], [1j, 0]], dtype=complex)
SZ = np.array([[1, 0], [0, -1]], dtype=complex)

HADAMARD = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)

# Columns are the four maximally entangled Bell vectors on C^2 (x) C^2.
BELL = np.array(
    [
        [1, 1, 0, 0],
        [0, 0, 1, 1],
        [0, 0, 1, -1],
        [1, -1, 0, 0],
    ],
    dtype=complex,
) / np.sqrt(2)


def random_unitary(d: int, seed: int) -> np.ndarray:
    return _haar_unitary_from_generator(d, RngStream(seed).generator(0))


def random_matrix(d: int, seed: int) -> np.ndarray:
    gen = RngStream(seed).generator(1)
    return gen.standard_normal((d, d)) + 1j * gen.standard_normal((d, d))


def fourier_basis(d: int) -> np.ndarray:
    omega = np.exp(2j * np.pi / d)
    return np.array([[omega ** (j * k) for k in range(d)] for j in range(d)]) / np.sqrt(d)


def symmetric_operator_algebra() -> OperatorAlgebra:
    """Commutant of {1, S} on (C^2)^(x 2): the symmetric operators."""
    swap = swap_operator([2], {0})
    return compute_commutant(algebra_from_generators([swap], 4))


def asymptotically_abelian_algebra(d: int) -> OperatorAlgebra:
    """(d-2) scalar blocks glued with one qubit block; NC = 3/(2d)."""
    return structural_algebra([(1, 1)] * (d - 2) + [(1, 2)])


def strip_structure(alg: OperatorAlgebra) -> OperatorAlgebra:
    """Same algebra, no cached decomposition or commutant hints."""
    return OperatorAlgebra(alg.d, np.array(alg.basis, copy=True))


def factor_m2x1() -> OperatorAlgebra:
    return lattice_algebra([2, 2], {0})


def factor_1xm2() -> OperatorAlgebra:
    return lattice_algebra([2, 2], {1})


def bell_masa() -> OperatorAlgebra:
    return masa_from_unitary(BELL)


def concordance_pairs() -> list[tuple[str, OperatorAlgebra, OperatorAlgebra]]:
    """A matrix of labelled fixture pairs spanning d in {2, 3, 4, 8}."""
    m2 = factor_m2x1()
    w4 = random_unitary(4, 11)
    w3 = random_unitary(3, 12)
    pairs = [
        ("full2:full2", full_algebra(2), full_algebra(2)),
        ("diag2:had2", diagonal_masa(2), masa_from_unitary(HADAMARD)),
        ("full2:diag2", full_algebra(2), diagonal_masa(2)),
        ("triv2:full2", trivial_algebra(2), full_algebra(2)),
        ("diag3:fourier3", diagonal_masa(3), masa_from_unitary(fourier_basis(3))),
        ("asym3:full3", asymptotically_abelian_algebra(3), full_algebra(3)),
        ("asym3:fourier3", asymptotically_abelian_algebra(3), masa_from_unitary(fourier_basis(3))),
        ("rot3:diag3", structural_algebra([(1, 1), (1, 2)], basis_change=w3), diagonal_masa(3)),
        ("m2x1:full4", m2, full_algebra(4)),
        ("m2x1:bell", m2, bell_masa()),
        ("m2x1:prod4", m2, diagonal_masa(4)),
        ("m2x1:1xm2", m2, factor_1xm2()),
        ("m2x1:m2x1", m2, factor_m2x1()),
        ("sym22:full4", symmetric_operator_algebra(), full_algebra(4)),
        ("sym22:m2x1", symmetric_operator_algebra(), m2),
        ("sym22:bell", symmetric_operator_algebra(), bell_masa()),
        ("asym4:m2x1", asymptotically_abelian_algebra(4), m2),
        ("bell:prod4", bell_masa(), diagonal_masa(4)),
        ("rot4:bell", structural_algebra([(1, 2), (2, 1)], basis_change=w4), bell_masa()),
        ("full4:bell", full_algebra(4), bell_masa()),
        ("lat0:lat01", lattice_algebra([2, 2, 2], {0}), lattice_algebra([2, 2, 2], {0, 1})),
        ("lat01:lat12", lattice_algebra([2, 2, 2], {0, 1}), lattice_algebra([2, 2, 2], {1, 2})),
        ("lat0:lat12", lattice_algebra([2, 2, 2], {0}), lattice_algebra([2, 2, 2], {1, 2})),
        ("lat012:lat1", lattice_algebra([2, 2, 2], {0, 1, 2}), lattice_algebra([2, 2, 2], {1})),
    ]
    return pairs
