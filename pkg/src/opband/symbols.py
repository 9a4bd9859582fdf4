"""Laurent polynomial symbols on the unit circle."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class LaurentPolynomial:
    """Finite sum  f(w) = sum_n a_n w^n  with integer offsets n.

    Stored as a sorted tuple of (offset, coefficient) pairs with zero
    coefficients dropped; the empty tuple is the zero symbol.
    """

    terms: tuple[tuple[int, complex], ...]

    def __post_init__(self):
        seen = {}
        for n, a in self.terms:
            n = int(n)
            a = complex(a)
            if n in seen:
                raise ValueError(f"duplicate offset {n}")
            if a != 0:
                seen[n] = a
        object.__setattr__(
            self, "terms", tuple(sorted(seen.items()))
        )

    @staticmethod
    def from_coeffs(coeffs: dict) -> "LaurentPolynomial":
        return LaurentPolynomial(tuple(coeffs.items()))

    @staticmethod
    def monomial(n: int, a: complex = 1.0) -> "LaurentPolynomial":
        return LaurentPolynomial(((n, a),))

    @property
    def coeffs(self) -> dict[int, complex]:
        return dict(self.terms)

    @property
    def degree(self) -> int:
        """Largest |offset| with a nonzero coefficient (0 for the zero symbol)."""
        if not self.terms:
            return 0
        return max(abs(n) for n, _ in self.terms)

    @property
    def offsets(self) -> np.ndarray:
        return np.asarray([n for n, _ in self.terms], dtype=np.int64)

    @property
    def values(self) -> np.ndarray:
        return np.asarray([a for _, a in self.terms], dtype=np.complex128)

    def __call__(self, w):
        w = np.asarray(w, dtype=np.complex128)
        if not self.terms:
            return np.zeros_like(w) if w.ndim else complex(0.0)
        acc = sum(a * w**n for n, a in self.terms)
        return acc if w.ndim else complex(acc)

    def on_grid(self, grid: int) -> np.ndarray:
        """Values on the uniform circle grid exp(2*pi*i*k/grid), k = 0..grid-1."""
        theta = 2.0 * np.pi * np.arange(grid) / grid
        if not self.terms:
            return np.zeros(grid, dtype=np.complex128)
        return np.exp(1j * np.outer(theta, self.offsets)) @ self.values

    def sup_circle(self, grid: int = 4096) -> float:
        return float(np.abs(self.on_grid(grid)).max(initial=0.0))

    def min_circle(self, grid: int = 4096) -> float:
        if not self.terms:
            return 0.0
        return float(np.abs(self.on_grid(grid)).min())

    def scaled(self, c: complex) -> "LaurentPolynomial":
        return LaurentPolynomial(tuple((n, c * a) for n, a in self.terms))

    def __add__(self, other: "LaurentPolynomial") -> "LaurentPolynomial":
        acc = dict(self.terms)
        for n, a in other.terms:
            acc[n] = acc.get(n, 0.0) + a
        return LaurentPolynomial(tuple(acc.items()))

    def __mul__(self, other: "LaurentPolynomial") -> "LaurentPolynomial":
        acc: dict[int, complex] = {}
        for n, a in self.terms:
            for m, b in other.terms:
                acc[n + m] = acc.get(n + m, 0.0) + a * b
        return LaurentPolynomial(tuple(acc.items()))

    def conjugate_symbol(self) -> "LaurentPolynomial":
        """Symbol of the adjoint Toeplitz matrix: offsets negated, conjugated."""
        return LaurentPolynomial(tuple((-n, np.conj(a)) for n, a in self.terms))

    def to_tokens(self) -> list[str]:
        return [f"{n}:{a.real:.17g},{a.imag:.17g}" for n, a in self.terms]

    @staticmethod
    def from_tokens(tokens) -> "LaurentPolynomial":
        """Parse 'n:re,im' tokens, e.g. ['-1:1,0', '1:0.5,-0.5']."""
        coeffs: dict[int, complex] = {}
        for tok in tokens:
            try:
                head, tail = tok.split(":")
                re_s, im_s = tail.split(",")
                n = int(head)
                a = complex(float(re_s), float(im_s))
            except ValueError as exc:
                raise ValueError(f"bad symbol token {tok!r}, want 'n:re,im'") from exc
            if n in coeffs:
                raise ValueError(f"duplicate offset {n} in symbol tokens")
            coeffs[n] = a
        return LaurentPolynomial.from_coeffs(coeffs)


def random_laurent(rng, degree: int, normalize_sup: bool = True,
                   grid: int = 4096) -> LaurentPolynomial:
    """Random symbol with full support on offsets -degree..degree.

    Coefficients are standard complex Gaussians; with normalize_sup the
    result is scaled to sup-norm 1 on the circle.
    """
    if degree < 0:
        raise ValueError("degree must be nonnegative")
    ns = range(-degree, degree + 1)
    coeffs = {
        n: complex(rng.standard_normal(), rng.standard_normal()) for n in ns
    }
    f = LaurentPolynomial.from_coeffs(coeffs)
    if normalize_sup:
        s = f.sup_circle(grid)
        if s == 0.0:
            raise ValueError("degenerate random symbol")
        f = f.scaled(1.0 / s)
    return f
