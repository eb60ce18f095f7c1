"""Sparse multivariate Laurent polynomials with integer coefficients, and sparse matrices over them."""

from __future__ import annotations

from typing import Iterable


class LaurentPoly:
    __slots__ = ("terms",)

    def __init__(self, terms: dict[tuple[int, ...], int] | None = None):
        self.terms = {e: c for e, c in (terms or {}).items() if c}

    @classmethod
    def monomial(cls, exponent: Iterable[int], coef: int = 1) -> "LaurentPoly":
        return cls({tuple(exponent): coef})

    @classmethod
    def one(cls, ell: int) -> "LaurentPoly":
        return cls({(0,) * ell: 1})

    def is_zero(self) -> bool:
        return not self.terms

    def is_monomial(self) -> bool:
        return len(self.terms) == 1 and next(iter(self.terms.values())) == 1

    def __add__(self, other: "LaurentPoly") -> "LaurentPoly":
        out = dict(self.terms)
        for e, c in other.terms.items():
            out[e] = out.get(e, 0) + c
        return LaurentPoly(out)

    def __neg__(self) -> "LaurentPoly":
        return LaurentPoly({e: -c for e, c in self.terms.items()})

    def __sub__(self, other: "LaurentPoly") -> "LaurentPoly":
        return self + (-other)

    def __mul__(self, other: "LaurentPoly") -> "LaurentPoly":
        out: dict[tuple[int, ...], int] = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                out[e] = out.get(e, 0) + c1 * c2
        return LaurentPoly(out)

    def conj(self) -> "LaurentPoly":
        # z -> z^{-1} on the torus; coefficients are real integers
        return LaurentPoly({tuple(-a for a in e): c for e, c in self.terms.items()})

    def __eq__(self, other) -> bool:
        return isinstance(other, LaurentPoly) and self.terms == other.terms

    def __hash__(self) -> int:
        return hash(frozenset(self.terms.items()))

    def __repr__(self) -> str:
        return f"LaurentPoly({self.terms})"

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for e in sorted(self.terms):
            c = self.terms[e]
            if not any(e):
                parts.append(str(c))
                continue
            mono = "z^(" + ",".join(str(a) for a in e) + ")"
            parts.append(mono if c == 1 else f"{c}*{mono}")
        return " + ".join(parts)


class SparseMatrix:
    """Square matrix over Laurent polynomials in ``ell`` variables, stored by nonzero entry."""

    __slots__ = ("n", "ell", "entries")

    def __init__(self, n: int, ell: int, entries: dict[tuple[int, int], LaurentPoly] | None = None):
        self.n = n
        self.ell = ell
        self.entries = {k: v for k, v in (entries or {}).items() if not v.is_zero()}

    @classmethod
    def identity(cls, n: int, ell: int) -> "SparseMatrix":
        return cls(n, ell, {(i, i): LaurentPoly.one(ell) for i in range(n)})

    @classmethod
    def zero(cls, n: int, ell: int) -> "SparseMatrix":
        return cls(n, ell)

    def __add__(self, other: "SparseMatrix") -> "SparseMatrix":
        out = dict(self.entries)
        for k, v in other.entries.items():
            out[k] = out[k] + v if k in out else v
        return SparseMatrix(self.n, self.ell, out)

    def __matmul__(self, other: "SparseMatrix") -> "SparseMatrix":
        rows: dict[int, list[tuple[int, LaurentPoly]]] = {}
        for (i, j), v in other.entries.items():
            rows.setdefault(i, []).append((j, v))
        out: dict[tuple[int, int], LaurentPoly] = {}
        for (i, t), a in self.entries.items():
            for j, b in rows.get(t, ()):
                prod = a * b
                out[(i, j)] = out[(i, j)] + prod if (i, j) in out else prod
        return SparseMatrix(self.n, self.ell, out)

    def adjoint(self) -> "SparseMatrix":
        return SparseMatrix(self.n, self.ell, {(j, i): v.conj() for (i, j), v in self.entries.items()})

    def __eq__(self, other) -> bool:
        return isinstance(other, SparseMatrix) and self.n == other.n and self.entries == other.entries

    def __hash__(self) -> int:
        return hash((self.n, frozenset(self.entries.items())))

    def render(self) -> list[str]:
        lines = []
        for i in range(self.n):
            lines.append("  ".join(str(self.entries.get((i, j), "0")) for j in range(self.n)))
        return lines
