"""Half-period characteristics and their branch-point partition dictionary.

A characteristic is a pair of length-g bit vectors (eps, eps_prime) labelling
the half-period eps/2 + tau eps'/2.  On a hyperelliptic curve with branch
points e_1 < ... < e_{2g+1} and e_0 = infinity, every characteristic
corresponds to a splitting of the 2g+2 branch-point indices into two parts;
the correspondence is realised by the Abel images of the branch points over
Baker's homology basis:

    [eps_{2k}]   : eps' = delta_k, eps = 1^k 0^{g-k}      (k = 1..g)
    [eps_{2k-1}] : eps' = delta_k, eps = 1^{k-1} 0^{g-k+1}
    [eps_{2g+1}] : eps' = 0,       eps = 1^g
    [eps_0]      = 0

and [K] = sum_k [eps_{2k}] is the characteristic of the vector of Riemann
constants.  A partition is referred to by its smaller part; the index of
infinity is written 0 and omitted from the stored canonical form (it is
inferred whenever the stored cardinality has the wrong parity).

Parity convention: a characteristic is odd iff eps^t eps' is odd, so that
multiplicity-1 characteristics are odd and [K] at genus 2 is odd.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations
from typing import Iterable, Iterator, Sequence

Bits = tuple[int, ...]


@dataclass(frozen=True)
class HalfCharacteristic:
    """Characteristic [eps] displayed as the 2 x g matrix [eps' over eps]."""

    eps: Bits
    eps_prime: Bits

    def __post_init__(self):
        if len(self.eps) != len(self.eps_prime):
            raise ValueError("eps and eps' must have equal length")
        if any(b not in (0, 1) for b in self.eps + self.eps_prime):
            raise ValueError("characteristic entries must be bits")

    @property
    def genus(self) -> int:
        return len(self.eps)

    def __str__(self) -> str:
        top = "".join(map(str, self.eps_prime))
        bot = "".join(map(str, self.eps))
        return f"[{top}/{bot}]"

    def is_zero(self) -> bool:
        return not any(self.eps) and not any(self.eps_prime)


def char_from_string(text: str) -> HalfCharacteristic:
    """Parse "[e1'e2'.../e1e2...]" (top row eps', bottom row eps)."""
    body = text.strip().strip("[]")
    top, bot = body.split("/")
    return HalfCharacteristic(eps=tuple(map(int, bot)), eps_prime=tuple(map(int, top)))


def zero_char(g: int) -> HalfCharacteristic:
    return HalfCharacteristic((0,) * g, (0,) * g)


def char_sum(a: HalfCharacteristic, b: HalfCharacteristic) -> HalfCharacteristic:
    """Characteristic addition: entrywise XOR."""
    if a.genus != b.genus:
        raise ValueError("characteristics of different genus")
    return HalfCharacteristic(
        tuple(x ^ y for x, y in zip(a.eps, b.eps)),
        tuple(x ^ y for x, y in zip(a.eps_prime, b.eps_prime)),
    )


def branch_char(g: int, k: int) -> HalfCharacteristic:
    """Characteristic [eps_k] of branch point e_k; k = 0 is infinity (zero)."""
    if k == 0:
        return zero_char(g)
    if not 1 <= k <= 2 * g + 1:
        raise ValueError(f"branch index {k} out of range 0..{2 * g + 1}")
    if k == 2 * g + 1:
        return HalfCharacteristic(eps=(1,) * g, eps_prime=(0,) * g)
    j = (k + 1) // 2  # cut number
    eps_prime = tuple(1 if i == j else 0 for i in range(1, g + 1))
    ones = j if k % 2 == 0 else j - 1
    eps = tuple(1 if i <= ones else 0 for i in range(1, g + 1))
    return HalfCharacteristic(eps=eps, eps_prime=eps_prime)


def riemann_char(g: int) -> HalfCharacteristic:
    """Characteristic [K] of the vector of Riemann constants."""
    out = zero_char(g)
    for k in range(1, g + 1):
        out = char_sum(out, branch_char(g, 2 * k))
    return out


def parity(c: HalfCharacteristic) -> str:
    """'odd' iff eps^t eps' is odd, else 'even'."""
    return "odd" if sum(x * y for x, y in zip(c.eps, c.eps_prime)) % 2 else "even"


@dataclass(frozen=True)
class Partition:
    """Canonical branch-index partition, referred to by its smaller part.

    ``part`` stores finite indices only; infinity (index 0) is inferred when
    len(part) is not congruent to g+1 mod 2.  Use :meth:`from_set` to build
    one from an arbitrary index set.
    """

    genus: int
    part: tuple[int, ...]

    @classmethod
    def from_set(cls, g: int, indices: Iterable[int]) -> "Partition":
        s = set(indices)
        if not s <= set(range(2 * g + 2)):
            raise ValueError(f"indices {sorted(s)} out of range 0..{2 * g + 1}")
        # Complete with the infinity index when the parity demands it.
        if len(s) % 2 != (g + 1) % 2:
            s ^= {0}
        comp = set(range(2 * g + 2)) - s
        if len(s) > len(comp):
            s = comp
        elif len(s) == len(comp) and 0 not in s:  # m = 0, prefer the 0-part
            s = comp
        s.discard(0)
        return cls(genus=g, part=tuple(sorted(s)))

    def __post_init__(self):
        g = self.genus
        if self.part != tuple(sorted(set(self.part))):
            raise ValueError("part must be a sorted duplicate-free tuple")
        if self.part and not (1 <= self.part[0] and self.part[-1] <= 2 * g + 1):
            raise ValueError("part indices out of range")
        if len(self.full_part()) > g + 1:
            raise ValueError("part is not the smaller side of its partition")

    def full_part(self) -> tuple[int, ...]:
        """The part with the infinity index made explicit (as 0)."""
        g = self.genus
        if len(self.part) % 2 != (g + 1) % 2:
            return (0,) + self.part
        return self.part

    def multiplicity(self) -> int:
        return (self.genus + 1 - len(self.full_part())) // 2

    def char(self) -> HalfCharacteristic:
        return partition_char(self)

    def __str__(self) -> str:
        return "{" + ",".join(map(str, self.part)) + "}"


def partition_char(p: Partition) -> HalfCharacteristic:
    """[I] = sum_{i in I} [eps_i] + [K]; infinity contributes nothing."""
    return char_of_set(p.genus, p.part)


def char_of_set(g: int, indices: Iterable[int]) -> HalfCharacteristic:
    """Characteristic of the partition referred to by an arbitrary index set."""
    out = riemann_char(g)
    for i in indices:
        if i:
            out = char_sum(out, branch_char(g, i))
    return out


def multiplicity(p: Partition) -> int:
    return p.multiplicity()


def char_to_partition(g: int, c: HalfCharacteristic) -> Partition:
    """Invert :func:`partition_char`; total on all 2^{2g} characteristics."""
    if c.genus != g:
        raise ValueError("genus mismatch")
    target = char_sum(c, riemann_char(g))  # = sum over the part of [eps_i]
    # [eps_{2k}] has eps' = delta_k, so the even-index picks fix eps'.
    s: set[int] = set()
    for k in range(1, g + 1):
        if target.eps_prime[k - 1]:
            s ^= {2 * k}
    # [eps_{2k}] + [eps_{2k-1}] has eps' = 0, eps = delta_k: fix eps.
    acc = char_of_set(g, s)
    residual = char_sum(char_sum(acc, riemann_char(g)), target)
    for k in range(1, g + 1):
        if residual.eps[k - 1]:
            s ^= {2 * k, 2 * k - 1}
    p = Partition.from_set(g, s)
    assert partition_char(p) == c
    return p


def enumerate_partitions(g: int, m: int) -> Iterator[Partition]:
    """All canonical partitions of multiplicity m, in lexicographic order."""
    if not 0 <= m <= (g + 1) // 2:
        raise ValueError(f"multiplicity {m} out of range 0..{(g + 1) // 2}")
    idx = range(1, 2 * g + 2)
    if m == 0:
        for t in combinations(idx, g):
            yield Partition(genus=g, part=t)
        return
    # Stored sizes g+1-2m (infinity on the J side) and g-2m (infinity in part).
    for size in (g + 1 - 2 * m, g - 2 * m):
        if size < 0:
            continue
        for t in combinations(idx, size):
            yield Partition(genus=g, part=t)


@lru_cache(maxsize=None)
def count_by_multiplicity(g: int, m: int) -> int:
    if m == 0:
        return math.comb(2 * g + 1, g)
    return math.comb(2 * g + 2, g + 1 - 2 * m)


def set_order_less(a: Sequence[int], b: Sequence[int]) -> bool:
    """Order of index sets: compare highest indices first, 0 is smallest."""
    ta, tb = tuple(sorted(a, reverse=True)), tuple(sorted(b, reverse=True))
    if len(ta) != len(tb):
        raise ValueError("only sets of equal cardinality are comparable")
    return ta < tb
