"""
Published constellations available by name
"""

import itertools
from typing import Callable, Dict, List, Optional

import numpy as np

from ..linalg.matrix_core import CMatrix, project_to_unitary
from ..utils.exceptions import ValidationError
from .constellation import Constellation
from .structures import GeneratorStructure, expand

_GOLDEN = (1.0 + np.sqrt(5.0)) / 2.0


def _printed(rows: List[List[complex]]) -> CMatrix:
    """Matrices printed to a few decimals are brought back onto U(M)"""
    return project_to_unitary(np.array(rows, dtype=complex)).mat


def _cube_root_diagonal(k: int) -> CMatrix:
    w = np.exp(2j * np.pi * k / 3)
    return np.diag([w, np.conj(w)])


class ConstellationLibrary:
    """Builtin constellations and, where they have one, their generator structure"""

    @staticmethod
    def orthogonal121() -> Constellation:
        """Orthogonal design (sqrt(2)/2)[[a, b], [-conj(b), conj(a)]] with 11th roots of unity"""
        roots = np.exp(2j * np.pi * np.arange(11) / 11)
        elements = [
            np.sqrt(0.5) * np.array([[a, b], [-np.conj(b), np.conj(a)]])
            for a in roots for b in roots
        ]
        return Constellation.special(np.stack(elements))

    @staticmethod
    def sl2f5() -> Constellation:
        """
        SL(2, F5) as the binary icosahedral group in SU(2).

        Elements are the 120 unit icosians a + bi + cj + dk mapped to
        [[a + bi, c + di], [-c + di, a - bi]]: the 8 units, the 16
        half-integer units, and the 96 even permutations of (0, 1, 1/phi, phi)/2
        with all signs.
        """
        quats = []
        for pos in range(4):
            for sign in (1.0, -1.0):
                q = np.zeros(4)
                q[pos] = sign
                quats.append(q)
        for signs in itertools.product((0.5, -0.5), repeat=4):
            quats.append(np.array(signs))
        base = np.array([0.0, 1.0, 1.0 / _GOLDEN, _GOLDEN]) / 2.0
        for perm in itertools.permutations(range(4)):
            inversions = sum(1 for i in range(4) for j in range(i + 1, 4) if perm[i] > perm[j])
            if inversions % 2:
                continue
            for signs in itertools.product((1.0, -1.0), repeat=3):
                coords = base * np.array((1.0,) + signs)
                q = np.zeros(4)
                q[list(perm)] = coords
                quats.append(q)
        elements = [
            np.array([[a + 1j * b, c + 1j * d], [-c + 1j * d, a - 1j * b]])
            for a, b, c, d in quats
        ]
        return Constellation.special(np.stack(elements))

    @staticmethod
    def numderived121_structure() -> GeneratorStructure:
        """A^k B^l, k, l = 0..10, numerically derived for diversity sum"""
        a = _printed([[-0.9049 + 0.3265j, 0.1635 + 0.2188j],
                      [0.0364 + 0.2707j, -0.8748 + 0.4002j]])
        b = _printed([[-0.1596 + 0.9767j, -0.1038 + 0.0994j],
                      [0.0833 - 0.1171j, -0.9432 + 0.2995j]])
        return GeneratorStructure.powers_ab(a, b, 10, 10)

    @staticmethod
    def g214_structure() -> GeneratorStructure:
        """Group constellation G(21, 4): A = diag(eta, eta^4, eta^16), B^3 = eta^7 I"""
        eta = np.exp(2j * np.pi / 21)
        a = np.diag([eta, eta ** 4, eta ** 16])
        b = np.array([[0, 1, 0], [0, 0, 1], [eta ** 7, 0, 0]], dtype=complex)
        return GeneratorStructure.powers_ab(a, b, 20, 2)

    @staticmethod
    def g214improved_structure() -> GeneratorStructure:
        """G(21, 4) refined by annealing on the diversity product"""
        a = _printed([[0.9415 + 0.3155j, 0.0573 - 0.0222j, 0.0496 + 0.0882j],
                      [0.0160 - 0.0555j, 0.4005 + 0.9136j, 0.0326 - 0.0212j],
                      [0.0579 + 0.0855j, -0.0312 - 0.0099j, 0.1384 - 0.9844j]])
        b = _printed([[0.0175 + 0.0095j, 0.9997 + 0.0111j, 0.0079 + 0.0042j],
                      [0.0086 + 0.0100j, -0.0082 + 0.0040j, 0.9999 + 0.0036j],
                      [-0.4836 + 0.8750j, 0.0004 - 0.0198j, -0.0045 - 0.0126j]])
        return GeneratorStructure.powers_ab(a, b, 20, 2)

    @staticmethod
    def optimal3dim2_structure() -> GeneratorStructure:
        """{I, D, D^2} with D = diag(e^{2 pi i/3}, e^{-2 pi i/3})"""
        return GeneratorStructure.powers_a(_cube_root_diagonal(1), 2)

    @staticmethod
    def exact3dim2() -> Constellation:
        """Three elements optimized for the exact diversity function at 5 dB (M = N = 2)"""
        a1 = _printed([[-0.4530000 - 0.7804689j, 0.2197119 - 0.3706563j],
                       [-0.1733377 - 0.3944787j, -0.5439448 + 0.7200449j]])
        b1 = _printed([[-0.4475155 + 0.7358245j, -0.1243078 + 0.4927877j],
                       [0.1862253 + 0.4728766j, -0.5378253 - 0.6726454j]])
        return Constellation.special(np.stack([np.eye(2, dtype=complex), a1, b1]))

    @staticmethod
    def snr25dim2_structure() -> GeneratorStructure:
        """A^k B^l, k, l = 0..10, optimized on the Chernoff diversity function at 25 dB"""
        a = _printed([[-0.3018715 + 0.8863567j, 0.1337423 - 0.3245896j],
                      [-0.3487261 - 0.040441897j, -0.9215508 - 0.1658271j]])
        b = _printed([[-0.9599144 - 0.1577551j, 0.2074585 + 0.1031435j],
                      [-0.2074221 + 0.1032166j, -0.9598588 + 0.1580936j]])
        return GeneratorStructure.powers_ab(a, b, 10, 10)


_STRUCTURES: Dict[str, Callable[[], GeneratorStructure]] = {
    "numderived121": ConstellationLibrary.numderived121_structure,
    "g214": ConstellationLibrary.g214_structure,
    "g214improved": ConstellationLibrary.g214improved_structure,
    "optimal3dim2": ConstellationLibrary.optimal3dim2_structure,
    "snr25dim2": ConstellationLibrary.snr25dim2_structure,
}

_EXPLICIT: Dict[str, Callable[[], Constellation]] = {
    "orthogonal121": ConstellationLibrary.orthogonal121,
    "sl2f5": ConstellationLibrary.sl2f5,
    "exact3dim2": ConstellationLibrary.exact3dim2,
}

BUILTIN_NAMES = tuple(sorted(list(_STRUCTURES) + list(_EXPLICIT)))


def builtin(name: str) -> Constellation:
    """Published constellation by name"""
    if name in _STRUCTURES:
        return expand(_STRUCTURES[name]())
    if name in _EXPLICIT:
        return _EXPLICIT[name]()
    raise ValidationError(f"builtin: unknown name '{name}', available: {', '.join(BUILTIN_NAMES)}")


def builtin_structure(name: str) -> Optional[GeneratorStructure]:
    """Generator structure of a builtin, or None for explicit element lists"""
    if name not in BUILTIN_NAMES:
        raise ValidationError(f"builtin: unknown name '{name}', available: {', '.join(BUILTIN_NAMES)}")
    factory = _STRUCTURES.get(name)
    return factory() if factory else None


# Global library instance
constellation_library = ConstellationLibrary()
