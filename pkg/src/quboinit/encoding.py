"""Signed radix-2 encoding of integers onto binary variables.

A value is represented by one sign bit plus magnitude bits for the powers
2^0 .. 2^p, most significant on the left: ``[sign, 2^p, ..., 2^0]``.  The sign
bit carries a negative weight so a single weighted sum decodes the value, and
the same weights serve as coefficients when a matrix entry is expanded into
QUBO variables.
"""

from __future__ import annotations

from dataclasses import dataclass

TWOS_COMPLEMENT = "twos_complement"
ONES_COMPLEMENT = "ones_complement"


@dataclass(frozen=True)
class RadixScheme:
    """Bit layout for signed integers: powers 0..p plus one sign bit.

    twos_complement (default): sign weight -2^(p+1), range [-2^(p+1), 2^(p+1)-1].
    ones_complement: sign weight -2^(p+1)+1, range [-(2^(p+1)-1), 2^(p+1)-1]
    (zero has two encodings; the all-positive form is produced).
    """

    p: int
    sign_mode: str = TWOS_COMPLEMENT

    def __post_init__(self):
        if self.p < 0:
            raise ValueError(f"max power p must be non-negative, got {self.p}")
        if self.sign_mode not in (TWOS_COMPLEMENT, ONES_COMPLEMENT):
            raise ValueError(f"unknown sign mode {self.sign_mode!r}")

    @property
    def n_bits(self) -> int:
        return self.p + 2

    @property
    def sign_weight(self) -> int:
        base = -(1 << (self.p + 1))
        return base if self.sign_mode == TWOS_COMPLEMENT else base + 1

    @property
    def min_value(self) -> int:
        return self.sign_weight

    @property
    def max_value(self) -> int:
        return (1 << (self.p + 1)) - 1

    def contains(self, value: float) -> bool:
        return self.min_value <= value <= self.max_value


def encode_integer(value: int, scheme: RadixScheme) -> list[int]:
    """Bits ``[sign, 2^p, ..., 2^0]`` for an in-range integer."""
    value = int(value)
    if not scheme.contains(value):
        raise ValueError(
            f"value {value} outside representable range "
            f"[{scheme.min_value}, {scheme.max_value}]"
        )
    sign = 1 if value < 0 else 0
    remainder = value - sign * scheme.sign_weight
    bits = [sign]
    for power in range(scheme.p, -1, -1):
        bit = (remainder >> power) & 1
        bits.append(bit)
    return bits


def decode_bits(bits, scheme: RadixScheme) -> int:
    """Inverse of :func:`encode_integer` on the representable range."""
    bits = list(bits)
    if len(bits) != scheme.n_bits:
        raise ValueError(f"expected {scheme.n_bits} bits, got {len(bits)}")
    for bit in bits:
        if bit not in (0, 1):
            raise ValueError(f"bits must be 0 or 1, got {bit!r}")
    value = scheme.sign_weight * bits[0]
    for offset, power in enumerate(range(scheme.p, -1, -1)):
        value += (1 << power) * bits[1 + offset]
    return value


@dataclass(frozen=True)
class BitExpansion:
    """Weighted bit variables whose sum reconstructs one matrix entry.

    ``terms`` is ordered ``[sign, 2^p, ..., 2^0]``; exactly the sign term has a
    negative weight (two's complement).
    """

    terms: tuple[tuple[str, int], ...]

    def labels(self) -> tuple[str, ...]:
        return tuple(label for label, _ in self.terms)

    def decode(self, assignment) -> int:
        """Weighted sum of the assigned bits; equals decode_bits of those bits."""
        total = 0
        for label, weight in self.terms:
            total += weight * (1 if assignment[label] else 0)
        return total


def cell_label(namespace: str, row: int, col: int, power: int | None) -> str:
    """``<prefix>_<row>_<col>_b<power>``, or ``..._sign`` when power is None."""
    suffix = "sign" if power is None else f"b{power}"
    return f"{namespace}_{row}_{col}_{suffix}"


def expansion_for_cell(row: int, col: int, scheme: RadixScheme, namespace: str) -> BitExpansion:
    """Bit expansion of matrix entry (row, col), labels unique per cell and power."""
    terms = [(cell_label(namespace, row, col, None), scheme.sign_weight)]
    for power in range(scheme.p, -1, -1):
        terms.append((cell_label(namespace, row, col, power), 1 << power))
    return BitExpansion(tuple(terms))
