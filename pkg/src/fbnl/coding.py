"""Bit accounting for the message ``K``.

Codewords are strings over ``{"0", "1"}``. Both codecs are prefix-free
codes for the positive integers: unary writes ``k - 1`` zeros and a one;
Golomb with parameter ``m`` writes the quotient of ``k - 1`` by ``m`` in
unary and the remainder in truncated binary, so ``m = 1`` is unary.
All entropies are in bits.
"""

from __future__ import annotations

import math
from collections.abc import Mapping
from dataclasses import dataclass

from .rejection import geometric_pmf

TAIL_MASS = 1e-20
CODECS = ("unary", "golomb")


class MalformedCodeword(ValueError):
    pass


def geometric_entropy_bits(p: float) -> float:
    """Entropy of the geometric law ``(1-p)**(k-1) * p``:
    ``-log2 p - (1 - p)/p * log2(1 - p)``, and 0 at ``p = 1``.
    """
    if not 0.0 < p <= 1.0:
        raise ValueError(f"p must lie in (0, 1], got {p!r}")
    if p == 1.0:
        return 0.0
    return -math.log2(p) - (1.0 - p) / p * math.log2(1.0 - p)


def _check_symbol(k: int) -> int:
    if int(k) != k or k < 1:
        raise ValueError(f"symbols are positive integers, got {k!r}")
    return int(k)


def _check_bits(bits: str) -> str:
    if any(ch not in "01" for ch in bits):
        raise MalformedCodeword(f"codeword contains non-binary characters: {bits!r}")
    return bits


def _read_unary(bits: str, pos: int) -> tuple[int, int]:
    end = bits.find("1", pos)
    if end < 0:
        raise MalformedCodeword(f"unary run starting at bit {pos} never terminates")
    return end - pos, end + 1


def unary_encode(k: int) -> str:
    k = _check_symbol(k)
    return "0" * (k - 1) + "1"


def unary_decode(bits: str) -> int:
    bits = _check_bits(bits)
    zeros, end = _read_unary(bits, 0)
    if end != len(bits):
        raise MalformedCodeword(f"trailing bits after unary codeword: {bits!r}")
    return zeros + 1


def golomb_param(p: float) -> int:
    """Optimal Golomb parameter for a geometric source with success probability ``p``.

    Smallest ``m`` with ``(1-p)**m + (1-p)**(m+1) <= 1``.
    """
    if not 0.0 < p < 1.0:
        raise ValueError(f"p must lie in (0, 1), got {p!r}")
    q = 1.0 - p
    m = 1
    while q**m + q ** (m + 1) > 1.0:
        m += 1
    return m


def _truncated_binary_params(m: int) -> tuple[int, int]:
    b = (m - 1).bit_length()  # ceil(log2 m); 0 when m == 1
    return b, (1 << b) - m


def golomb_encode(k: int, m: int) -> str:
    k = _check_symbol(k)
    if int(m) != m or m < 1:
        raise ValueError(f"Golomb parameter must be a positive integer, got {m!r}")
    q, r = divmod(k - 1, m)
    out = "0" * q + "1"
    b, cutoff = _truncated_binary_params(m)
    if b == 0:
        return out
    if r < cutoff:  # only possible when b >= 2
        return out + format(r, f"0{b - 1}b")
    return out + format(r + cutoff, f"0{b}b")


def _golomb_read(bits: str, pos: int, m: int) -> tuple[int, int]:
    q, pos = _read_unary(bits, pos)
    b, cutoff = _truncated_binary_params(m)
    r = 0
    if b > 0:
        if b > 1:
            if pos + b - 1 > len(bits):
                raise MalformedCodeword("truncated Golomb remainder")
            r = int(bits[pos : pos + b - 1], 2)
            pos += b - 1
        if r >= cutoff:
            if pos + 1 > len(bits):
                raise MalformedCodeword("truncated Golomb remainder")
            r = 2 * r + int(bits[pos]) - cutoff
            pos += 1
    return q * m + r + 1, pos


def golomb_decode(bits: str, m: int) -> int:
    bits = _check_bits(bits)
    k, end = _golomb_read(bits, 0, m)
    if end != len(bits):
        raise MalformedCodeword(f"trailing bits after Golomb codeword: {bits!r}")
    return k


def golomb_decode_stream(bits: str, m: int) -> list[int]:
    """Decode a concatenation of Golomb codewords."""
    bits = _check_bits(bits)
    out, pos = [], 0
    while pos < len(bits):
        k, pos = _golomb_read(bits, pos, m)
        out.append(k)
    return out


def golomb_length(k: int, m: int) -> int:
    q, r = divmod(k - 1, m)
    b, cutoff = _truncated_binary_params(m)
    return q + 1 + (b - 1 if r < cutoff else b)


def code_length(k: int, codec: str, m: int = 1) -> int:
    if codec == "unary":
        return _check_symbol(k)
    if codec == "golomb":
        return golomb_length(_check_symbol(k), m)
    raise ValueError(f"unknown codec {codec!r}; choose from {CODECS}")


def codec_parameter(codec: str, p: float) -> int:
    """Golomb parameter tuned for ``p``; unary is Golomb with ``m = 1``."""
    if codec == "unary":
        return 1
    if codec == "golomb":
        return golomb_param(p)
    raise ValueError(f"unknown codec {codec!r}; choose from {CODECS}")


def expected_code_length_bits(p: float, codec: str) -> float:
    """Mean codeword length under ``geometric_pmf(p, .)``."""
    if not 0.0 < p < 1.0:
        raise ValueError(f"p must lie in (0, 1), got {p!r}")
    m = codec_parameter(codec, p)
    q = 1.0 - p
    terms = []
    k = 1
    # the tail from k on holds mass q**(k-1) and contributes at most
    # q**(k-1) * (len(k) + 1/p) bits; stop once that is below TAIL_MASS
    while q ** (k - 1) * (code_length(k, codec, m) + 1.0 / p) >= TAIL_MASS:
        terms.append(geometric_pmf(p, k) * code_length(k, codec, m))
        k += 1
    return math.fsum(terms)


def empirical_entropy_bits(counts: Mapping[int, int]) -> float:
    """Plug-in entropy ``-sum (n_k/N) log2 (n_k/N)`` of observed symbol counts."""
    total = sum(counts.values())
    if total <= 0:
        raise ValueError("empirical entropy needs at least one observation")
    h = math.fsum(-(n / total) * math.log2(n / total) for n in counts.values() if n > 0)
    return h + 0.0  # turn -0.0 into 0.0


@dataclass(frozen=True)
class CommunicationStats:
    counts: dict[int, int]
    empirical_entropy_bits: float
    mean_codec_bits: float
    mean_k: float
    p_hat: float
    codec: str
    codec_parameter: int

    @property
    def trials(self) -> int:
        return sum(self.counts.values())


def communication_stats(counts: Mapping[int, int], codec: str, p: float) -> CommunicationStats:
    """Summarize message counts; the codec is tuned for the analytic ``p``."""
    counts = {int(k): int(n) for k, n in sorted(counts.items()) if n > 0}
    total = sum(counts.values())
    if total <= 0:
        raise ValueError("no messages to summarize")
    m = codec_parameter(codec, p)
    sum_k = sum(k * n for k, n in counts.items())
    sum_bits = sum(code_length(k, codec, m) * n for k, n in counts.items())
    mean_k = sum_k / total
    return CommunicationStats(
        counts=counts,
        empirical_entropy_bits=empirical_entropy_bits(counts),
        mean_codec_bits=sum_bits / total,
        mean_k=mean_k,
        p_hat=1.0 / mean_k,
        codec=codec,
        codec_parameter=m,
    )
