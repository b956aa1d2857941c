"""
Exact univariate polynomials in lambda with arbitrary-precision integer coefficients
"""

from itertools import zip_longest
from typing import Iterable, Sequence, Tuple, Union

from src.core.errors import InexactDivisionError, InvalidArgumentError

Number = Union[int, float, complex]

# Below this many coefficients the schoolbook product is faster than packing
KRONECKER_CUTOFF = 48


def _trim(coeffs: Sequence[int]) -> Tuple[int, ...]:
    end = len(coeffs)
    while end and coeffs[end - 1] == 0:
        end -= 1
    return tuple(coeffs[:end])


def _pack(coeffs: Sequence[int], width: int) -> int:
    return int.from_bytes(b"".join(c.to_bytes(width, "little") for c in coeffs), "little")


def _kronecker(a: Sequence[int], b: Sequence[int]) -> Tuple[int, ...]:
    """Product of two nonnegative coefficient lists through one big-integer multiply"""
    bound = max(a) * max(b) * min(len(a), len(b))
    width = bound.bit_length() // 8 + 1
    product = _pack(a, width) * _pack(b, width)
    size = len(a) + len(b) - 1
    raw = product.to_bytes(size * width, "little")
    return tuple(int.from_bytes(raw[i * width:(i + 1) * width], "little") for i in range(size))


def _schoolbook(a: Sequence[int], b: Sequence[int]) -> Tuple[int, ...]:
    out = [0] * (len(a) + len(b) - 1)
    for i, ca in enumerate(a):
        if ca:
            for j, cb in enumerate(b):
                out[i + j] += ca * cb
    return tuple(out)


class Polynomial:
    """Immutable polynomial; index of a coefficient is the power of lambda"""

    __slots__ = ("_coeffs", "_hash")

    def __init__(self, coefficients: Iterable[int] = ()):
        coeffs = tuple(coefficients)
        for c in coeffs:
            if not isinstance(c, int):
                raise InvalidArgumentError(f"Polynomial coefficients must be integers, got {c!r}")
        self._coeffs = _trim(coeffs)
        self._hash = None

    @classmethod
    def zero(cls) -> "Polynomial":
        return cls()

    @classmethod
    def one(cls) -> "Polynomial":
        return cls((1,))

    @classmethod
    def monomial(cls, power: int, coefficient: int = 1) -> "Polynomial":
        if power < 0:
            raise InvalidArgumentError(f"Negative power {power}")
        return cls((0,) * power + (coefficient,))

    @property
    def coefficients(self) -> Tuple[int, ...]:
        return self._coeffs

    @property
    def degree(self) -> int:
        """Degree, -1 for the zero polynomial"""
        return len(self._coeffs) - 1

    def is_zero(self) -> bool:
        return not self._coeffs

    def __bool__(self):
        return bool(self._coeffs)

    def __len__(self):
        return len(self._coeffs)

    def __getitem__(self, power: int) -> int:
        if 0 <= power < len(self._coeffs):
            return self._coeffs[power]
        return 0

    def valuation(self) -> int:
        """Largest t with lambda^t dividing self (-1 for zero)"""
        for i, c in enumerate(self._coeffs):
            if c:
                return i
        return -1

    def is_nonnegative(self) -> bool:
        return all(c >= 0 for c in self._coeffs)

    # ---------------------------------------------------------- arithmetic

    def __add__(self, other: "Polynomial") -> "Polynomial":
        if isinstance(other, int):
            other = Polynomial((other,))
        if not isinstance(other, Polynomial):
            return NotImplemented
        return Polynomial(a + b for a, b in zip_longest(self._coeffs, other._coeffs, fillvalue=0))

    __radd__ = __add__

    def __neg__(self) -> "Polynomial":
        return Polynomial(-c for c in self._coeffs)

    def __sub__(self, other: "Polynomial") -> "Polynomial":
        if isinstance(other, int):
            other = Polynomial((other,))
        if not isinstance(other, Polynomial):
            return NotImplemented
        return self + (-other)

    def __mul__(self, other: Union["Polynomial", int]) -> "Polynomial":
        if isinstance(other, int):
            return Polynomial(c * other for c in self._coeffs)
        if not isinstance(other, Polynomial):
            return NotImplemented
        a, b = self._coeffs, other._coeffs
        if not a or not b:
            return Polynomial()
        if min(len(a), len(b)) >= KRONECKER_CUTOFF and min(a) >= 0 and min(b) >= 0:
            return Polynomial(_kronecker(a, b))
        return Polynomial(_schoolbook(a, b))

    __rmul__ = __mul__

    def shift(self, power: int) -> "Polynomial":
        """Multiply by lambda^power"""
        if power < 0:
            raise InvalidArgumentError(f"Negative shift {power}")
        if not self._coeffs:
            return self
        return Polynomial((0,) * power + self._coeffs)

    def divide_by_power(self, power: int) -> "Polynomial":
        """Exact division by lambda^power; any remainder raises InexactDivisionError"""
        if power < 0:
            raise InvalidArgumentError(f"Negative power {power}")
        if any(self._coeffs[:power]):
            raise InexactDivisionError(
                f"{self.to_text()} is not divisible by lambda^{power}"
            )
        return Polynomial(self._coeffs[power:])

    def derivative(self) -> "Polynomial":
        return Polynomial(i * c for i, c in enumerate(self._coeffs[1:], start=1))

    # ---------------------------------------------------------- evaluation

    def __call__(self, value: Number) -> Number:
        result = 0
        for c in reversed(self._coeffs):
            result = result * value + c
        return result

    evaluate = __call__

    # ---------------------------------------------------------- comparison

    def __eq__(self, other):
        if isinstance(other, int):
            return self._coeffs == _trim((other,))
        if not isinstance(other, Polynomial):
            return NotImplemented
        return self._coeffs == other._coeffs

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(self._coeffs)
        return self._hash

    # ---------------------------------------------------------- text format

    def to_text(self) -> str:
        """`poly deg d: c0 c1 ... cd` (zero polynomial has degree -1 and no coefficients)"""
        body = " ".join(str(c) for c in self._coeffs)
        return f"poly deg {self.degree}:" + (f" {body}" if body else "")

    @classmethod
    def from_text(cls, text: str) -> "Polynomial":
        head, _, body = text.strip().partition(":")
        parts = head.split()
        if len(parts) != 3 or parts[:2] != ["poly", "deg"]:
            raise InvalidArgumentError(f"Not a polynomial line: {text!r}")
        coeffs = tuple(int(tok) for tok in body.split())
        if len(coeffs) != int(parts[2]) + 1:
            raise InvalidArgumentError(f"Degree {parts[2]} does not match {len(coeffs)} coefficients")
        return cls(coeffs)

    def __repr__(self):
        if not self._coeffs:
            return "Polynomial(0)"
        terms = []
        for i, c in enumerate(self._coeffs):
            if c == 0:
                continue
            if i == 0:
                terms.append(str(c))
            else:
                mono = "λ" if i == 1 else f"λ^{i}"
                terms.append(mono if c == 1 else f"{c}{mono}")
        return "Polynomial(" + " + ".join(terms) + ")"


LAMBDA = Polynomial.monomial(1)


def poly_sum(polys: Iterable[Polynomial]) -> Polynomial:
    """Sum with a single trim at the end"""
    acc = []
    for p in polys:
        coeffs = p.coefficients
        if len(coeffs) > len(acc):
            acc.extend([0] * (len(coeffs) - len(acc)))
        for i, c in enumerate(coeffs):
            acc[i] += c
    return Polynomial(acc)


def poly_product(polys: Iterable[Polynomial]) -> Polynomial:
    result = Polynomial.one()
    for p in polys:
        result = result * p
        if not result:
            break
    return result
