"""Formal *-polynomials in named generators.

A :class:`WordExpr` is a finite complex linear combination of words.  A word
is a tuple of letters, and a letter is a pair ``(name, dagger)`` where
``dagger`` marks the adjoint of the generator.  The empty word stands for the
unit.  Every evaluator in the package (Fock vacuum, density-matrix states,
free products) consumes this one type.
"""

from __future__ import annotations

import numbers
from typing import Dict, Iterable, Iterator, Tuple

Letter = Tuple[str, bool]
Word = Tuple[Letter, ...]


def adjoint_word(word: Word) -> Word:
    return tuple((name, not dag) for name, dag in reversed(word))


def format_word(word: Word) -> str:
    if not word:
        return "1"
    return " ".join(name + ("*" if dag else "") for name, dag in word)


class WordExpr:
    """Complex linear combination of words in named generators.

    Parameters
    ----------
    terms : mapping or iterable of (word, coefficient), optional
        Initial terms.  Repeated words are summed and exact zeros dropped.

    Examples
    --------
    >>> a, b = WordExpr.gen("a"), WordExpr.gen("b")
    >>> x = 2 * a * b - b.adjoint()
    >>> x.degree
    2
    >>> str(x.adjoint())
    '-b + 2 b* a*'
    """

    __slots__ = ("_terms",)

    def __init__(self, terms=None):
        acc: Dict[Word, complex] = {}
        if terms is not None:
            items = terms.items() if isinstance(terms, dict) else terms
            for word, coef in items:
                word = tuple((str(n), bool(d)) for n, d in word)
                acc[word] = acc.get(word, 0) + complex(coef)
        self._terms = {w: c for w, c in acc.items() if c != 0}

    # constructors

    @classmethod
    def gen(cls, name: str, dagger: bool = False) -> "WordExpr":
        return cls({((name, dagger),): 1.0})

    @classmethod
    def scalar(cls, value) -> "WordExpr":
        return cls({(): value})

    @classmethod
    def one(cls) -> "WordExpr":
        return cls.scalar(1.0)

    @classmethod
    def from_word(cls, word: Iterable[Letter], coef=1.0) -> "WordExpr":
        return cls({tuple(word): coef})

    @classmethod
    def coerce(cls, other) -> "WordExpr":
        if isinstance(other, WordExpr):
            return other
        if isinstance(other, numbers.Number):
            return cls.scalar(other)
        raise TypeError(f"cannot interpret {type(other).__name__} as WordExpr")

    # inspection

    @property
    def terms(self) -> Dict[Word, complex]:
        return dict(self._terms)

    def items(self) -> Iterator[Tuple[Word, complex]]:
        return iter(self._terms.items())

    def __len__(self) -> int:
        return len(self._terms)

    def __iter__(self):
        return iter(self._terms.items())

    @property
    def degree(self) -> int:
        """Length of the longest word (0 for scalars and for zero)."""
        return max((len(w) for w in self._terms), default=0)

    @property
    def generators(self) -> set:
        return {name for w in self._terms for name, _ in w}

    def scalar_part(self) -> complex:
        return self._terms.get((), 0j)

    def is_zero(self) -> bool:
        return not self._terms

    # algebra

    def adjoint(self) -> "WordExpr":
        return WordExpr((adjoint_word(w), c.conjugate()) for w, c in self._terms.items())

    def __add__(self, other):
        try:
            other = WordExpr.coerce(other)
        except TypeError:
            return NotImplemented
        return WordExpr(list(self._terms.items()) + list(other._terms.items()))

    __radd__ = __add__

    def __neg__(self):
        return WordExpr((w, -c) for w, c in self._terms.items())

    def __sub__(self, other):
        try:
            other = WordExpr.coerce(other)
        except TypeError:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return WordExpr.coerce(other) - self

    def __mul__(self, other):
        if isinstance(other, numbers.Number):
            return WordExpr((w, c * other) for w, c in self._terms.items())
        if not isinstance(other, WordExpr):
            return NotImplemented
        out = []
        for w1, c1 in self._terms.items():
            for w2, c2 in other._terms.items():
                out.append((w1 + w2, c1 * c2))
        return WordExpr(out)

    def __rmul__(self, other):
        if isinstance(other, numbers.Number):
            return self * other
        return NotImplemented

    def __pow__(self, k: int):
        if k < 0:
            raise ValueError("negative powers are not defined")
        out = WordExpr.one()
        for _ in range(k):
            out = out * self
        return out

    def __eq__(self, other):
        if isinstance(other, numbers.Number):
            other = WordExpr.scalar(other)
        if not isinstance(other, WordExpr):
            return NotImplemented
        return self._terms == other._terms

    def __hash__(self):
        return hash(frozenset(self._terms.items()))

    def __repr__(self):
        return f"WordExpr({str(self)!r})"

    def __str__(self):
        if not self._terms:
            return "0"
        parts = []
        for word, c in sorted(self._terms.items(), key=lambda t: (len(t[0]), t[0])):
            coef = _format_coef(c)
            body = format_word(word)
            if not word:
                parts.append(coef if coef not in ("", "-") else coef + "1")
            else:
                parts.append(f"{coef} {body}".strip() if coef not in ("", "-") else coef + body)
        text = " + ".join(parts)
        return text.replace("+ -", "- ")


def _format_coef(c: complex) -> str:
    if c.imag == 0:
        r = c.real
        if r == 1:
            return ""
        if r == -1:
            return "-"
        return f"{r:g}"
    return f"({c.real:g}{c.imag:+g}j)"
