"""Single-photon states restricted to the Z and X bases.

Photons are tracked symbolically as ``(basis, bit)`` so that every state the
protocols can produce is one of |0>, |1>, |+>, |->. Global phases are dropped:
``sigma_x |-> = -|->`` is stored as ``|->``.
"""

from __future__ import annotations

import enum
import random
from dataclasses import dataclass
from typing import Sequence, TypeVar

__all__ = [
    "Basis",
    "Pauli",
    "Photon",
    "ZERO",
    "ONE",
    "PLUS",
    "MINUS",
    "prepare",
    "measure",
    "apply_pauli",
    "parse_photon",
    "Rng",
]

T = TypeVar("T")

_MASK32 = 0xFFFFFFFF


class Basis(enum.Enum):
    Z = "Z"
    X = "X"

    def other(self) -> "Basis":
        return Basis.X if self is Basis.Z else Basis.Z


class Pauli(enum.Enum):
    I = "I"  # noqa: E741
    X = "X"

    @classmethod
    def for_bit(cls, bit: int) -> "Pauli":
        """Encoding convention: I carries 0, sigma_x carries 1."""
        return cls.X if bit else cls.I


@dataclass(frozen=True)
class Photon:
    basis: Basis
    bit: int

    def __post_init__(self):
        if self.bit not in (0, 1):
            raise ValueError(f"bit must be 0 or 1, got {self.bit!r}")

    @property
    def label(self) -> str:
        if self.basis is Basis.Z:
            return str(self.bit)
        return "-" if self.bit else "+"

    def __str__(self) -> str:
        return f"|{self.label}>"

    def __repr__(self) -> str:
        return f"Photon({self})"


ZERO = Photon(Basis.Z, 0)
ONE = Photon(Basis.Z, 1)
PLUS = Photon(Basis.X, 0)
MINUS = Photon(Basis.X, 1)

_STATES = {(p.basis, p.bit): p for p in (ZERO, ONE, PLUS, MINUS)}
_LABELS = {p.label: p for p in (ZERO, ONE, PLUS, MINUS)}


def prepare(basis: Basis, bit: int) -> Photon:
    return _STATES[(basis, int(bit))]


def parse_photon(label: str) -> Photon:
    """Parse ``0``, ``1``, ``+``, ``-`` (optionally wrapped as ``|x>``)."""
    key = label.strip().removeprefix("|").removesuffix(">").removesuffix("⟩")
    try:
        return _LABELS[key]
    except KeyError:
        raise ValueError(f"unknown photon label {label!r}") from None


def measure(state: Photon, basis: Basis, rng: "Rng") -> tuple[int, Photon]:
    """Projective measurement in ``basis``.

    A matching basis reads the bit deterministically and leaves the state
    alone; a mismatched basis gives a fair coin (Born rule, |amplitude|^2 =
    1/2) and collapses onto the corresponding eigenstate.
    """
    if state.basis is basis:
        return state.bit, state
    outcome = rng.bit()
    return outcome, _STATES[(basis, outcome)]


def apply_pauli(state: Photon, op: Pauli) -> Photon:
    # sigma_x flips Z eigenstates and fixes X eigenstates (up to phase).
    if op is Pauli.I or state.basis is Basis.X:
        return state
    return _STATES[(Basis.Z, state.bit ^ 1)]


class Rng:
    """Seeded random source for one simulation run.

    The generator is MT19937 (CPython's ``random.Random``), seeded through
    ``init_by_array`` with a key of 32-bit words. Every draw is derived from
    whole 32-bit outputs so that a trace can be replayed by any MT19937
    implementation:

    * ``bit()``      -- top bit of one output.
    * ``below(n)``   -- rejection sampling on the top ``n.bit_length()`` bits
      of successive outputs.
    * ``permutation`` / ``sample`` -- Fisher-Yates driven by ``below``.

    Keys: ``Rng(seed)`` uses ``[seed & 0xffffffff, seed >> 32, 1]`` and
    ``Rng.for_trial(seed, t, k)`` uses ``[seed lo, seed hi, t, k, 2]``.
    ``draws`` counts consumed 32-bit outputs.
    """

    def __init__(self, seed: int = 0):
        seed = _check_seed(seed)
        self._init_key([seed & _MASK32, seed >> 32, 1])

    @classmethod
    def from_key(cls, key: Sequence[int]) -> "Rng":
        rng = cls.__new__(cls)
        rng._init_key(list(key))
        return rng

    @classmethod
    def for_trial(cls, seed: int, trial: int, attempt: int = 0) -> "Rng":
        seed = _check_seed(seed)
        if not (0 <= trial <= _MASK32 and 0 <= attempt <= _MASK32):
            raise ValueError("trial and attempt must fit in 32 bits")
        return cls.from_key([seed & _MASK32, seed >> 32, trial, attempt, 2])

    def _init_key(self, key: list[int]) -> None:
        if not key or any(not 0 <= w <= _MASK32 for w in key):
            raise ValueError("key words must be 32-bit unsigned integers")
        if key[-1] == 0:
            # CPython strips high zero words before init_by_array.
            raise ValueError("last key word must be non-zero")
        self.key = tuple(key)
        self._mt = random.Random(sum(w << (32 * i) for i, w in enumerate(key)))
        self.draws = 0

    def next_u32(self) -> int:
        self.draws += 1
        return self._mt.getrandbits(32)

    def bit(self) -> int:
        return self.next_u32() >> 31

    def bits(self, n: int) -> list[int]:
        return [self.bit() for _ in range(n)]

    def basis(self) -> Basis:
        return Basis.X if self.bit() else Basis.Z

    def below(self, n: int) -> int:
        """Uniform integer in ``[0, n)``."""
        if not 0 < n <= 1 << 32:
            raise ValueError(f"range must be in (0, 2**32], got {n}")
        if n == 1:
            return 0
        k = (n - 1).bit_length()
        while True:
            r = self.next_u32() >> (32 - k)
            if r < n:
                return r

    def permutation(self, n: int) -> list[int]:
        order = list(range(n))
        for i in range(n - 1, 0, -1):
            j = self.below(i + 1)
            order[i], order[j] = order[j], order[i]
        return order

    def sample(self, population: Sequence[T], k: int) -> list[T]:
        """``k`` distinct elements in draw order (partial Fisher-Yates)."""
        pool = list(population)
        n = len(pool)
        if not 0 <= k <= n:
            raise ValueError(f"cannot sample {k} from {n}")
        for i in range(k):
            j = i + self.below(n - i)
            pool[i], pool[j] = pool[j], pool[i]
        return pool[:k]


def _check_seed(seed: int) -> int:
    seed = int(seed)
    if not 0 <= seed < 1 << 64:
        raise ValueError(f"seed must be a 64-bit unsigned integer, got {seed}")
    return seed
