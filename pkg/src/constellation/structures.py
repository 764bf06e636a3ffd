"""
Generator-structured constellations: word expansion and reduced distance targets
"""

from dataclasses import dataclass, replace
from enum import Enum
from functools import lru_cache
from typing import Dict, List, Sequence, Tuple

import numpy as np

from ..linalg.matrix_core import CMatrix, UnitaryMatrix
from ..utils.exceptions import ReductionUnavailableError, ValidationError
from .constellation import Constellation, ConstellationForm

# A word is a sequence of generator indices read left to right
Word = Tuple[int, ...]


class StructureKind(str, Enum):
    """Word structures over the generators A, B, C, ..."""
    POWERS_A = "ak"
    POWERS_AB = "akbl"
    POWERS_ABC = "akblcm"
    WORD_CHAIN_AB = "ab"
    WORD_CHAIN_ABC = "abc"
    DIAGONAL_POWERS_AB = "akbk"
    DIAGONAL_POWERS_ABC = "akbkck"
    PRODUCT_S1S2 = "s1s2"
    GENERAL_AKB = "akb-general"
    FREE = "free"


class ChainVariant(str, Enum):
    """Reading of the two-letter chain I, C, CD, ...: prefixes of CDCD... or the printed I, C, CD, DCD, CDCD"""
    PREFIX = "prefix"
    PRINTED = "printed"


class TargetKind(str, Enum):
    """Difference targets Psi - Psi' (special form) or Gram targets Phi* Phi' (general form)"""
    DIFFERENCE = "difference"
    GRAM = "gram"


_GENERATOR_COUNTS = {
    StructureKind.POWERS_A: 1,
    StructureKind.POWERS_AB: 2,
    StructureKind.POWERS_ABC: 3,
    StructureKind.WORD_CHAIN_AB: 2,
    StructureKind.WORD_CHAIN_ABC: 3,
    StructureKind.DIAGONAL_POWERS_AB: 2,
    StructureKind.DIAGONAL_POWERS_ABC: 3,
    StructureKind.GENERAL_AKB: 1,
}


@dataclass(frozen=True, eq=False)
class GeneratorStructure:
    """
    Constellation described by generators and a word structure.

    `p`, `q`, `r` are the exponent bounds of A, B, C. Chain and diagonal
    kinds use `p` as the chain length, GENERAL_AKB uses `p` as l.
    """

    kind: StructureKind
    generators: Tuple[CMatrix, ...]
    p: int = 0
    q: int = 0
    r: int = 0
    chain_variant: ChainVariant = ChainVariant.PREFIX
    factors: Tuple["GeneratorStructure", ...] = ()
    frame_columns: int = 0

    def __post_init__(self):
        for name in ("p", "q", "r"):
            if getattr(self, name) < 0:
                raise ValidationError(f"{name}: exponent bound must be nonnegative")
        gens = tuple(
            UnitaryMatrix.from_array(g, label=f"generators[{i}]").mat
            for i, g in enumerate(self.generators)
        )
        if not gens:
            raise ValidationError("generators: at least one generator is required")
        object.__setattr__(self, "generators", gens)

        expected = _GENERATOR_COUNTS.get(self.kind)
        if self.kind == StructureKind.PRODUCT_S1S2:
            if len(self.factors) != 2:
                raise ValidationError("factors: product structure needs exactly two factors")
            expected = sum(len(f.generators) for f in self.factors)
        if expected is not None and len(gens) != expected:
            raise ValidationError(f"generators: {self.kind.value} needs {expected}, got {len(gens)}")
        if len({g.shape for g in gens}) != 1:
            raise ValidationError("generators: all generators must share one dimension")
        if self.chain_variant == ChainVariant.PRINTED and self.kind != StructureKind.WORD_CHAIN_AB:
            raise ValidationError("chain_variant: printed reading applies to two-letter chains only")
        if self.kind == StructureKind.GENERAL_AKB:
            T = gens[0].shape[0]
            if not 1 <= self.frame_columns < T:
                raise ValidationError(f"frame_columns: need 1 <= M < T = {T}, got {self.frame_columns}")

    # --- construction helpers ---

    @classmethod
    def powers_a(cls, a: CMatrix, p: int) -> "GeneratorStructure":
        """{A^k : k = 0..p}"""
        return cls(StructureKind.POWERS_A, (a,), p=p)

    @classmethod
    def powers_ab(cls, a: CMatrix, b: CMatrix, p: int, q: int) -> "GeneratorStructure":
        """{A^k B^l : k = 0..p, l = 0..q}"""
        return cls(StructureKind.POWERS_AB, (a, b), p=p, q=q)

    @classmethod
    def powers_abc(cls, a: CMatrix, b: CMatrix, c: CMatrix, p: int, q: int, r: int) -> "GeneratorStructure":
        """{A^k B^l C^m}"""
        return cls(StructureKind.POWERS_ABC, (a, b, c), p=p, q=q, r=r)

    @classmethod
    def word_chain_ab(cls, a: CMatrix, b: CMatrix, length: int,
                      variant: ChainVariant = ChainVariant.PREFIX) -> "GeneratorStructure":
        """{I, A, AB, ABA, ...} up to words of the given length"""
        return cls(StructureKind.WORD_CHAIN_AB, (a, b), p=length, chain_variant=variant)

    @classmethod
    def word_chain_abc(cls, a: CMatrix, b: CMatrix, c: CMatrix, length: int) -> "GeneratorStructure":
        """{I, A, AB, ABC, ABCA, ...}"""
        return cls(StructureKind.WORD_CHAIN_ABC, (a, b, c), p=length)

    @classmethod
    def diagonal_powers_ab(cls, a: CMatrix, b: CMatrix, length: int) -> "GeneratorStructure":
        """{A^k B^k : k = 0..length}"""
        return cls(StructureKind.DIAGONAL_POWERS_AB, (a, b), p=length)

    @classmethod
    def diagonal_powers_abc(cls, a: CMatrix, b: CMatrix, c: CMatrix, length: int) -> "GeneratorStructure":
        """{A^k B^k C^k : k = 0..length}"""
        return cls(StructureKind.DIAGONAL_POWERS_ABC, (a, b, c), p=length)

    @classmethod
    def product(cls, s1: "GeneratorStructure", s2: "GeneratorStructure") -> "GeneratorStructure":
        """{s1 s2 : s1 in S1, s2 in S2}"""
        if s1.form != ConstellationForm.SPECIAL or s2.form != ConstellationForm.SPECIAL:
            raise ValidationError("factors: product structure needs special-form factors")
        return cls(StructureKind.PRODUCT_S1S2, s1.generators + s2.generators, factors=(s1, s2))

    @classmethod
    def cyclic_times_chain(cls, c: CMatrix, a: CMatrix, b: CMatrix,
                           p: int, length: int) -> "GeneratorStructure":
        """{C^k} x {I, A, AB, ABA, ...}"""
        return cls.product(cls.powers_a(c, p), cls.word_chain_ab(a, b, length))

    @classmethod
    def chain_times_chain(cls, a: CMatrix, b: CMatrix, c: CMatrix, d: CMatrix,
                          length1: int, length2: int,
                          variant: ChainVariant = ChainVariant.PRINTED) -> "GeneratorStructure":
        """{I, A, AB, ...} x {I, C, CD, DCD, CDCD, ...}"""
        return cls.product(cls.word_chain_ab(a, b, length1),
                           cls.word_chain_ab(c, d, length2, variant))

    @classmethod
    def general_akb(cls, a: CMatrix, l: int, frame_columns: int) -> "GeneratorStructure":
        """General-form {A^k B : k = 0..l} with A in U(T) and B the first M columns of I_T"""
        return cls(StructureKind.GENERAL_AKB, (a,), p=l, frame_columns=frame_columns)

    @classmethod
    def free(cls, elements: Sequence[CMatrix]) -> "GeneratorStructure":
        """Every element is its own generator"""
        return cls(StructureKind.FREE, tuple(elements))

    @classmethod
    def template(cls, kind: StructureKind, dim: int, p: int = 0, q: int = 0, r: int = 0,
                 T: int = 0, size: int = 0,
                 variant: ChainVariant = ChainVariant.PREFIX) -> "GeneratorStructure":
        """
        Structure of the given kind with identity generators, a starting
        point for optimizers that draw their own generator values.

        `dim` is M; GENERAL_AKB also needs the block length T, FREE the size.
        """
        kind = StructureKind(kind)
        if dim < 1:
            raise ValidationError(f"dim: must be positive, got {dim}")
        eye = np.eye(dim, dtype=complex)
        if kind == StructureKind.GENERAL_AKB:
            if T <= dim:
                raise ValidationError(f"T: general form needs T > M = {dim}, got {T}")
            return cls.general_akb(np.eye(T, dtype=complex), p, frame_columns=dim)
        if kind == StructureKind.FREE:
            if size < 2:
                raise ValidationError(f"size: free constellations need at least 2 elements, got {size}")
            return cls.free([eye] * size)
        if kind == StructureKind.PRODUCT_S1S2:
            raise ValidationError("structure: product structures are built from their two factors")
        count = _GENERATOR_COUNTS[kind]
        variant = variant if kind == StructureKind.WORD_CHAIN_AB else ChainVariant.PREFIX
        return cls(kind, (eye,) * count, p=p, q=q, r=r, chain_variant=variant)

    # --- shape ---

    @property
    def form(self) -> ConstellationForm:
        if self.kind == StructureKind.GENERAL_AKB:
            return ConstellationForm.GENERAL
        return ConstellationForm.SPECIAL

    @property
    def M(self) -> int:
        if self.kind == StructureKind.GENERAL_AKB:
            return self.frame_columns
        return self.generators[0].shape[0]

    @property
    def T(self) -> int:
        if self.kind == StructureKind.GENERAL_AKB:
            return self.generators[0].shape[0]
        return 2 * self.M

    def shape_key(self) -> tuple:
        """Hashable description of everything but the generator values"""
        return (self.kind.value, self.p, self.q, self.r, self.chain_variant.value,
                len(self.generators), tuple(f.shape_key() for f in self.factors))

    def size(self) -> int:
        """Expansion cardinality from the closed form of the kind"""
        return _size_for(self.shape_key())

    def words(self) -> List[Word]:
        """Element words in canonical order"""
        return list(_words_for(self.shape_key()))

    def supports_reduction(self) -> bool:
        return self.kind != StructureKind.FREE

    def with_generators(self, generators: Sequence[CMatrix]) -> "GeneratorStructure":
        """Same structure with new generator values"""
        generators = tuple(generators)
        if self.kind != StructureKind.PRODUCT_S1S2:
            return replace(self, generators=generators)
        split = len(self.factors[0].generators)
        f1 = self.factors[0].with_generators(generators[:split])
        f2 = self.factors[1].with_generators(generators[split:])
        return replace(self, generators=generators, factors=(f1, f2))

    def describe(self) -> str:
        """Short label such as akbl(p=10,q=10)"""
        if self.kind == StructureKind.PRODUCT_S1S2:
            return f"s1s2[{self.factors[0].describe()} x {self.factors[1].describe()}]"
        if self.kind == StructureKind.FREE:
            return f"free(L={len(self.generators)})"
        if self.kind == StructureKind.POWERS_AB:
            return f"{self.kind.value}(p={self.p},q={self.q})"
        if self.kind == StructureKind.POWERS_ABC:
            return f"{self.kind.value}(p={self.p},q={self.q},r={self.r})"
        return f"{self.kind.value}({self.p})"


# --- words ---

def _chain_word(letters: int, length: int) -> Word:
    return tuple(i % letters for i in range(length))


def _printed_chain_word(length: int) -> Word:
    # odd words from length 3 on start with the second letter: I, C, CD, DCD, CDCD, DCDCD, ...
    if length <= 2 or length % 2 == 0:
        return _chain_word(2, length)
    return (1,) + _chain_word(2, length - 1)


@lru_cache(maxsize=128)
def _words_for(key: tuple) -> Tuple[Word, ...]:
    kind, p, q, r, variant, n_gen, factor_keys = key
    kind = StructureKind(kind)
    if kind in (StructureKind.POWERS_A, StructureKind.GENERAL_AKB):
        return tuple((0,) * k for k in range(p + 1))
    if kind == StructureKind.POWERS_AB:
        return tuple((0,) * k + (1,) * l for k in range(p + 1) for l in range(q + 1))
    if kind == StructureKind.POWERS_ABC:
        return tuple((0,) * k + (1,) * l + (2,) * m
                     for k in range(p + 1) for l in range(q + 1) for m in range(r + 1))
    if kind == StructureKind.WORD_CHAIN_AB:
        if variant == ChainVariant.PRINTED.value:
            return tuple(_printed_chain_word(j) for j in range(p + 1))
        return tuple(_chain_word(2, j) for j in range(p + 1))
    if kind == StructureKind.WORD_CHAIN_ABC:
        return tuple(_chain_word(3, j) for j in range(p + 1))
    if kind == StructureKind.DIAGONAL_POWERS_AB:
        return tuple((0,) * k + (1,) * k for k in range(p + 1))
    if kind == StructureKind.DIAGONAL_POWERS_ABC:
        return tuple((0,) * k + (1,) * k + (2,) * k for k in range(p + 1))
    if kind == StructureKind.PRODUCT_S1S2:
        offset = factor_keys[0][5]
        return tuple(w1 + tuple(x + offset for x in w2)
                     for w1 in _words_for(factor_keys[0]) for w2 in _words_for(factor_keys[1]))
    return tuple((i,) for i in range(n_gen))


@lru_cache(maxsize=128)
def _size_for(key: tuple) -> int:
    kind, p, q, r, _, n_gen, factor_keys = key
    kind = StructureKind(kind)
    if kind == StructureKind.POWERS_AB:
        return (p + 1) * (q + 1)
    if kind == StructureKind.POWERS_ABC:
        return (p + 1) * (q + 1) * (r + 1)
    if kind == StructureKind.PRODUCT_S1S2:
        return _size_for(factor_keys[0]) * _size_for(factor_keys[1])
    if kind == StructureKind.FREE:
        return n_gen
    return p + 1


# --- evaluation ---

def _powers(g: CMatrix, n: int) -> CMatrix:
    out = np.empty((n + 1,) + g.shape, dtype=complex)
    out[0] = np.eye(g.shape[0])
    for k in range(1, n + 1):
        out[k] = out[k - 1] @ g
    return out


def _chain_products(generators: Sequence[CMatrix], start: int, length: int) -> CMatrix:
    """Cumulative products G[start] G[start+1] ... cycling through the generators"""
    letters = len(generators)
    out = np.empty((length + 1,) + generators[0].shape, dtype=complex)
    out[0] = np.eye(generators[0].shape[0])
    for j in range(1, length + 1):
        out[j] = out[j - 1] @ generators[(start + j - 1) % letters]
    return out


def _evaluate_words(words: Sequence[Word], generators: Sequence[CMatrix]) -> Dict[Word, CMatrix]:
    """Matrices of the given words, sharing prefix products"""
    table: Dict[Word, CMatrix] = {(): np.eye(generators[0].shape[0], dtype=complex)}
    for word in words:
        if word in table:
            continue
        cut = len(word) - 1
        while word[:cut] not in table:
            cut -= 1
        current = table[word[:cut]]
        for pos in range(cut, len(word)):
            current = current @ generators[word[pos]]
            table[word[:pos + 1]] = current
    return table


def element_matrices(g: GeneratorStructure) -> CMatrix:
    """Expanded elements (L, rows, M) in canonical word order"""
    gens = g.generators
    kind = g.kind
    if kind == StructureKind.POWERS_A:
        return _powers(gens[0], g.p)
    if kind == StructureKind.POWERS_AB:
        pa, pb = _powers(gens[0], g.p), _powers(gens[1], g.q)
        return (pa[:, None] @ pb[None, :]).reshape((-1,) + gens[0].shape)
    if kind == StructureKind.POWERS_ABC:
        pa, pb, pc = _powers(gens[0], g.p), _powers(gens[1], g.q), _powers(gens[2], g.r)
        return ((pa[:, None, None] @ pb[None, :, None]) @ pc[None, None, :]).reshape((-1,) + gens[0].shape)
    if kind == StructureKind.DIAGONAL_POWERS_AB:
        return _powers(gens[0], g.p) @ _powers(gens[1], g.p)
    if kind == StructureKind.DIAGONAL_POWERS_ABC:
        return _powers(gens[0], g.p) @ _powers(gens[1], g.p) @ _powers(gens[2], g.p)
    if kind in (StructureKind.WORD_CHAIN_AB, StructureKind.WORD_CHAIN_ABC):
        if g.chain_variant == ChainVariant.PREFIX:
            return _chain_products(gens, 0, g.p)
        words = g.words()
        table = _evaluate_words(words, gens)
        return np.stack([table[w] for w in words])
    if kind == StructureKind.PRODUCT_S1S2:
        e1 = element_matrices(g.factors[0])
        e2 = element_matrices(g.factors[1])
        return (e1[:, None] @ e2[None, :]).reshape((-1,) + gens[0].shape)
    if kind == StructureKind.GENERAL_AKB:
        return _powers(gens[0], g.p)[:, :, :g.frame_columns]
    return np.stack(gens)


def expand(g: GeneratorStructure) -> Constellation:
    """Explicit constellation listing every word once; duplicates are kept"""
    elements = element_matrices(g)
    if g.form == ConstellationForm.GENERAL:
        return Constellation.general(elements)
    return Constellation.special(elements)


# --- reduced targets ---

@dataclass(frozen=True, eq=False)
class TargetSet:
    """Matrices whose pairwise evaluations give the constellation's minimum distance"""
    kind: TargetKind
    matrices: CMatrix

    def __len__(self) -> int:
        return self.matrices.shape[0]


def _strip_common(w1: Word, w2: Word) -> Tuple[Word, Word]:
    """Drop the common prefix and suffix: W1 - W2 = P (W1' - W2') S with P, S unitary"""
    i = 0
    while i < len(w1) and i < len(w2) and w1[i] == w2[i]:
        i += 1
    a, b = w1[i:], w2[i:]
    j = 0
    while j < len(a) and j < len(b) and a[-1 - j] == b[-1 - j]:
        j += 1
    return a[:len(a) - j], b[:len(b) - j]


@lru_cache(maxsize=64)
def _stripped_word_pairs(key: tuple) -> Tuple[Tuple[Word, Word], ...]:
    words = _words_for(key)
    seen: Dict[Tuple[Word, Word], None] = {}
    for i in range(len(words)):
        for j in range(i + 1, len(words)):
            a, b = _strip_common(words[i], words[j])
            pair = (a, b) if (len(a), a) <= (len(b), b) else (b, a)
            seen.setdefault(pair, None)
    return tuple(seen)


@lru_cache(maxsize=64)
def _abc_plan(p: int, q: int, r: int) -> Tuple[np.ndarray, np.ndarray]:
    """
    Exponent triples (a, b, c) of the two terms of each reduced target
    A^a1 B^b1 C^c1 - A^a2 B^b2 C^c2 after cancelling common powers.
    """
    a_pairs = [(u, 0) for u in range(p + 1)] + [(0, u) for u in range(1, p + 1)]
    c_pairs = [(u, 0) for u in range(r + 1)] + [(0, u) for u in range(1, r + 1)]
    seen: Dict[Tuple[Tuple[int, int, int], Tuple[int, int, int]], None] = {}
    for a1, a2 in a_pairs:
        for c1, c2 in c_pairs:
            for l1 in range(q + 1):
                for l2 in range(q + 1):
                    if (a1, l1, c1) == (a2, l2, c2):
                        continue
                    b1, b2 = l1, l2
                    # B powers cancel on the left when A powers match, on the right when C powers match
                    if a1 == a2 or c1 == c2:
                        common = min(b1, b2)
                        b1, b2 = b1 - common, b2 - common
                    t1, t2 = (a1, b1, c1), (a2, b2, c2)
                    seen.setdefault((min(t1, t2), max(t1, t2)), None)
    plan = np.array(list(seen), dtype=int).reshape(-1, 2, 3)
    return plan[:, 0, :], plan[:, 1, :]


def reduced_targets(g: GeneratorStructure) -> TargetSet:
    """
    Canonical target list whose determinant / Frobenius evaluations give the
    minimum pairwise distance of expand(g) exactly.

    PowersAB yields {I - B^j} + {I - A^i} + {I - A^i B^j} + {A^i - B^j},
    2pq + p + q targets. GeneralAkB yields the Grams B* A^k B, k = -l..l, k != 0.
    """
    gens = g.generators
    kind = g.kind
    if kind == StructureKind.FREE:
        raise ReductionUnavailableError("free constellations have no reduced target set")
    eye = np.eye(gens[0].shape[0], dtype=complex)

    if kind == StructureKind.GENERAL_AKB:
        m = g.frame_columns
        pa = _powers(gens[0], g.p)[1:, :m, :m]
        negative = np.conj(np.swapaxes(pa, -1, -2))[::-1]
        return TargetSet(TargetKind.GRAM, np.concatenate([negative, pa]))

    if kind == StructureKind.POWERS_A:
        return TargetSet(TargetKind.DIFFERENCE, eye - _powers(gens[0], g.p)[1:])

    if kind == StructureKind.POWERS_AB:
        pa, pb = _powers(gens[0], g.p)[1:], _powers(gens[1], g.q)[1:]
        shape = (-1,) + eye.shape
        mats = np.concatenate([
            eye - pb,
            eye - pa,
            (eye - pa[:, None] @ pb[None, :]).reshape(shape),
            (pa[:, None] - pb[None, :]).reshape(shape),
        ])
        return TargetSet(TargetKind.DIFFERENCE, mats)

    if kind == StructureKind.POWERS_ABC:
        pa, pb, pc = _powers(gens[0], g.p), _powers(gens[1], g.q), _powers(gens[2], g.r)
        first, second = _abc_plan(g.p, g.q, g.r)
        term1 = pa[first[:, 0]] @ pb[first[:, 1]] @ pc[first[:, 2]]
        term2 = pa[second[:, 0]] @ pb[second[:, 1]] @ pc[second[:, 2]]
        return TargetSet(TargetKind.DIFFERENCE, term1 - term2)

    if kind == StructureKind.DIAGONAL_POWERS_AB:
        products = _powers(gens[0], g.p) @ _powers(gens[1], g.p)
        return TargetSet(TargetKind.DIFFERENCE, eye - products[1:])

    if kind == StructureKind.DIAGONAL_POWERS_ABC:
        n = g.p
        pa, pb, pc = _powers(gens[0], n), _powers(gens[1], n), _powers(gens[2], n)
        # A^k B^k C^k - A^j B^j C^j = A^j (A^d B^k C^d - B^j) C^j with k = j + d
        mats = [pa[d] @ pb[j + d] @ pc[d] - pb[j] for d in range(1, n + 1) for j in range(n - d + 1)]
        return TargetSet(TargetKind.DIFFERENCE, np.stack(mats) if mats else np.empty((0,) + eye.shape))

    if kind in (StructureKind.WORD_CHAIN_AB, StructureKind.WORD_CHAIN_ABC) \
            and g.chain_variant == ChainVariant.PREFIX:
        # w_j = w_i R where R is the run of letters i..j-1, determined by (i mod letters, j - i)
        letters = len(gens)
        blocks = [eye - _chain_products(gens, s, g.p - s)[1:] for s in range(min(letters, g.p))]
        return TargetSet(TargetKind.DIFFERENCE, np.concatenate(blocks) if blocks
                         else np.empty((0,) + eye.shape))

    pairs = _stripped_word_pairs(g.shape_key())
    table = _evaluate_words([w for pair in pairs for w in pair], gens)
    mats = np.stack([table[a] - table[b] for a, b in pairs]) if pairs else np.empty((0,) + eye.shape)
    return TargetSet(TargetKind.DIFFERENCE, mats)
