"""Sparse free (noncommutative) polynomials and their Hilbert-space geometry.

A free polynomial in d letters is stored as a map from words to complex
coefficients.  A word is a tuple of 1-based letter indices; the empty tuple
is the monomial 1.  Words form an orthonormal family for the inner product,
so the squared norm of a polynomial is the l2 sum of its coefficients, and
inner products of products factor degree-wise:

    <p*r, q*s> = <p, q> * <r, s>

for homogeneous p, q of one degree and r, s of another (multiplication is
word concatenation, so terms of distinct shapes never collide).
"""

from __future__ import annotations

import functools
from dataclasses import dataclass
from typing import Iterable, Iterator, Mapping

import numpy as np

# Coefficients below this magnitude are dropped after arithmetic; it keeps
# the sparse form canonical instead of accumulating rounding dust.
COEFF_EPS = 1e-14

Word = tuple  # tuple of 1-based letter indices; () is the monomial 1


class ParseError(ValueError):
    """Syntax error in polynomial text, with the offending position."""

    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (at position {position})")
        self.position = position


def word_degree(word: Word) -> int:
    return len(word)


def words_of_degree(alphabet_size: int, degree: int) -> Iterator[Word]:
    """All words of the given degree in lexicographic order."""
    if degree == 0:
        yield ()
        return
    indices = [1] * degree
    while True:
        yield tuple(indices)
        pos = degree - 1
        while pos >= 0 and indices[pos] == alphabet_size:
            indices[pos] = 1
            pos -= 1
        if pos < 0:
            return
        indices[pos] += 1


def word_index(word: Word, alphabet_size: int) -> int:
    """Position of a word within the lexicographic listing of its degree."""
    idx = 0
    for letter in word:
        idx = idx * alphabet_size + (letter - 1)
    return idx


def word_from_index(index: int, alphabet_size: int, degree: int) -> Word:
    letters = []
    for _ in range(degree):
        index, rem = divmod(index, alphabet_size)
        letters.append(rem + 1)
    return tuple(reversed(letters))


@functools.lru_cache(maxsize=None)
def _word_list(alphabet_size: int, degree: int) -> tuple:
    return tuple(words_of_degree(alphabet_size, degree))


class FreePoly:
    """A free polynomial in canonical sparse form.

    Instances are immutable by convention: no method mutates `terms`, and all
    arithmetic returns new objects, so values are safe to share across threads.
    """

    __slots__ = ("alphabet_size", "terms")

    def __init__(self, alphabet_size: int, terms: Mapping[Word, complex] | None = None):
        if alphabet_size < 1:
            raise ValueError(f"alphabet_size must be >= 1, got {alphabet_size}")
        canonical: dict[Word, complex] = {}
        if terms:
            for word, coeff in terms.items():
                word = tuple(word)
                for letter in word:
                    if not 1 <= letter <= alphabet_size:
                        raise ValueError(
                            f"letter index {letter} out of range [1..{alphabet_size}]"
                        )
                value = complex(coeff)
                if abs(value) >= COEFF_EPS:
                    canonical[word] = canonical.get(word, 0j) + value
            canonical = {w: c for w, c in canonical.items() if abs(c) >= COEFF_EPS}
        object.__setattr__(self, "alphabet_size", alphabet_size)
        object.__setattr__(self, "terms", canonical)

    def __setattr__(self, name, value):
        raise AttributeError("FreePoly is immutable")

    # -- constructors ------------------------------------------------------

    @classmethod
    def _from_canonical(cls, alphabet_size: int, terms: dict) -> FreePoly:
        """Internal fast path: words are already validated, only the
        small-coefficient sweep is applied."""
        poly = cls.__new__(cls)
        object.__setattr__(poly, "alphabet_size", alphabet_size)
        object.__setattr__(
            poly, "terms", {w: c for w, c in terms.items() if abs(c) >= COEFF_EPS}
        )
        return poly

    @classmethod
    def zero(cls, alphabet_size: int) -> FreePoly:
        return cls(alphabet_size)

    @classmethod
    def one(cls, alphabet_size: int) -> FreePoly:
        return cls(alphabet_size, {(): 1.0})

    @classmethod
    def letter(cls, alphabet_size: int, index: int) -> FreePoly:
        return cls(alphabet_size, {(index,): 1.0})

    @classmethod
    def monomial(cls, alphabet_size: int, word: Iterable[int], coeff: complex = 1.0) -> FreePoly:
        return cls(alphabet_size, {tuple(word): coeff})

    # -- basic queries -----------------------------------------------------

    @property
    def degree(self) -> float:
        """Max word degree; -inf for the zero polynomial."""
        if not self.terms:
            return float("-inf")
        return max(len(w) for w in self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    def is_homogeneous(self) -> bool:
        degrees = {len(w) for w in self.terms}
        return len(degrees) <= 1

    def component_degrees(self) -> list[int]:
        return sorted({len(w) for w in self.terms})

    def coefficient(self, word: Iterable[int]) -> complex:
        return self.terms.get(tuple(word), 0j)

    # -- arithmetic --------------------------------------------------------

    def _require_same_alphabet(self, other: FreePoly) -> None:
        if self.alphabet_size != other.alphabet_size:
            raise ValueError(
                f"alphabet mismatch: {self.alphabet_size} vs {other.alphabet_size}"
            )

    def __add__(self, other: FreePoly) -> FreePoly:
        self._require_same_alphabet(other)
        out = dict(self.terms)
        for word, coeff in other.terms.items():
            out[word] = out.get(word, 0j) + coeff
        return FreePoly._from_canonical(self.alphabet_size, out)

    def __sub__(self, other: FreePoly) -> FreePoly:
        self._require_same_alphabet(other)
        out = dict(self.terms)
        for word, coeff in other.terms.items():
            out[word] = out.get(word, 0j) - coeff
        return FreePoly._from_canonical(self.alphabet_size, out)

    def __neg__(self) -> FreePoly:
        return FreePoly._from_canonical(
            self.alphabet_size, {w: -c for w, c in self.terms.items()}
        )

    def __mul__(self, other):
        if isinstance(other, FreePoly):
            self._require_same_alphabet(other)
            out: dict[Word, complex] = {}
            for wa, ca in self.terms.items():
                for wb, cb in other.terms.items():
                    word = wa + wb
                    out[word] = out.get(word, 0j) + ca * cb
            return FreePoly._from_canonical(self.alphabet_size, out)
        return self.scale(other)

    def __rmul__(self, scalar) -> FreePoly:
        return self.scale(scalar)

    def scale(self, scalar: complex) -> FreePoly:
        scalar = complex(scalar)
        return FreePoly._from_canonical(
            self.alphabet_size, {w: scalar * c for w, c in self.terms.items()}
        )

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, FreePoly)
            and self.alphabet_size == other.alphabet_size
            and self.terms == other.terms
        )

    def __hash__(self):
        return hash((self.alphabet_size, frozenset(self.terms.items())))

    # -- Hilbert-space geometry --------------------------------------------

    def inner(self, other: FreePoly) -> complex:
        """Coefficient pairing, conjugate-linear in the second argument."""
        self._require_same_alphabet(other)
        small, big = (self.terms, other.terms)
        if len(big) < len(small):
            return np.conj(complex(other.inner(self)))
        return sum(
            (coeff * np.conj(big[word]) for word, coeff in small.items() if word in big),
            start=0j,
        )

    def norm(self) -> float:
        return float(np.sqrt(sum(abs(c) ** 2 for c in self.terms.values())))

    def homogeneous_component(self, degree: int) -> HomogeneousSlice:
        """Degree-n part as a dense coefficient vector (zeros when absent)."""
        if degree < 0:
            raise ValueError(f"degree must be >= 0, got {degree}")
        d = self.alphabet_size
        coeffs = np.zeros(d**degree, dtype=complex)
        for word, coeff in self.terms.items():
            if len(word) == degree:
                coeffs[word_index(word, d)] = coeff
        return HomogeneousSlice(self.alphabet_size, degree, coeffs)

    def homogeneous_part(self, degree: int) -> FreePoly:
        """Degree-n part kept in sparse form."""
        return FreePoly._from_canonical(
            self.alphabet_size,
            {w: c for w, c in self.terms.items() if len(w) == degree},
        )

    def __repr__(self) -> str:
        return f"FreePoly({self.alphabet_size}, {format_poly(self)!r})"

    def __str__(self) -> str:
        return format_poly(self)


@dataclass(frozen=True)
class HomogeneousSlice:
    """Dense coefficient vector of one homogeneous degree, in lexicographic
    word order; round-trips losslessly with the matching FreePoly component."""

    alphabet_size: int
    degree: int
    coeffs: np.ndarray

    def __post_init__(self):
        expected = self.alphabet_size**self.degree
        if self.coeffs.shape != (expected,):
            raise ValueError(
                f"slice of degree {self.degree} over {self.alphabet_size} letters "
                f"needs {expected} coefficients, got shape {self.coeffs.shape}"
            )

    def to_poly(self) -> FreePoly:
        words = _word_list(self.alphabet_size, self.degree)
        hits = np.nonzero(np.abs(self.coeffs) >= COEFF_EPS)[0]
        terms = {words[i]: complex(self.coeffs[i]) for i in hits}
        return FreePoly._from_canonical(self.alphabet_size, terms)


def dense_coefficients(p: FreePoly, degree: int) -> np.ndarray:
    """Shorthand for the dense degree-n coefficient vector of p."""
    return p.homogeneous_component(degree).coeffs


# -- text format -------------------------------------------------------------
#
# Grammar: terms separated by '+'/'-'; a term is '*'-separated factors, each a
# scalar (3, -1.5, 2i, or a parenthesized sum like (1+2i)), a variable x<k>
# with k >= 1, or a parenthesized subexpression.  '1' is the empty word.
# Whitespace is insignificant.

_DIGITS = "0123456789"


class _Tokenizer:
    def __init__(self, text: str, letter: str):
        self.text = text
        self.letter = letter
        self.pos = 0
        self.tokens: list[tuple[str, object, int]] = []
        self._scan()
        self.index = 0

    def _scan(self) -> None:
        text = self.text
        i = 0
        while i < len(text):
            ch = text[i]
            if ch.isspace():
                i += 1
                continue
            if ch in "+-*()":
                self.tokens.append((ch, ch, i))
                i += 1
                continue
            if ch in _DIGITS or ch == ".":
                start = i
                while i < len(text) and text[i] in _DIGITS:
                    i += 1
                if i < len(text) and text[i] == ".":
                    i += 1
                    while i < len(text) and text[i] in _DIGITS:
                        i += 1
                if i < len(text) and text[i] in "eE":
                    j = i + 1
                    if j < len(text) and text[j] in "+-":
                        j += 1
                    if j < len(text) and text[j] in _DIGITS:
                        i = j
                        while i < len(text) and text[i] in _DIGITS:
                            i += 1
                try:
                    value = float(text[start:i])
                except ValueError:
                    raise ParseError(f"bad number {text[start:i]!r}", start) from None
                if i < len(text) and text[i] == "i":
                    i += 1
                    self.tokens.append(("number", complex(0.0, value), start))
                else:
                    self.tokens.append(("number", complex(value, 0.0), start))
                continue
            if ch == "i":
                self.tokens.append(("number", 1j, i))
                i += 1
                continue
            if ch == self.letter:
                start = i
                i += 1
                digits = ""
                while i < len(text) and text[i] in _DIGITS:
                    digits += text[i]
                    i += 1
                if not digits:
                    raise ParseError(f"variable {self.letter!r} needs an index", start)
                self.tokens.append(("var", int(digits), start))
                continue
            raise ParseError(f"unexpected character {ch!r}", i)
        self.tokens.append(("end", None, len(text)))

    def peek(self) -> tuple[str, object, int]:
        return self.tokens[self.index]

    def next(self) -> tuple[str, object, int]:
        tok = self.tokens[self.index]
        self.index += 1
        return tok


class _Parser:
    def __init__(self, text: str, alphabet_size: int | None, letter: str):
        self.toks = _Tokenizer(text, letter)
        if alphabet_size is None:
            # Infer from the whole token stream so every intermediate value
            # is built over one common alphabet.
            seen = [int(v) for kind, v, _ in self.toks.tokens if kind == "var"]
            alphabet_size = max(seen, default=1)
            self._explicit = False
        else:
            self._explicit = True
        self.alphabet_size = max(alphabet_size, 1)

    def parse(self) -> FreePoly:
        poly = self._expr()
        kind, _, pos = self.toks.peek()
        if kind != "end":
            raise ParseError("unexpected trailing input", pos)
        return poly

    def _expr(self) -> FreePoly:
        sign = 1.0
        kind, _, _ = self.toks.peek()
        if kind in "+-":
            self.toks.next()
            sign = -1.0 if kind == "-" else 1.0
        poly = self._term().scale(sign)
        while True:
            kind, _, _ = self.toks.peek()
            if kind not in "+-":
                return poly
            self.toks.next()
            nxt = self._term()
            poly = poly - nxt if kind == "-" else poly + nxt

    def _term(self) -> FreePoly:
        poly = self._factor()
        while True:
            kind, _, _ = self.toks.peek()
            if kind != "*":
                return poly
            self.toks.next()
            poly = poly * self._factor()

    def _factor(self) -> FreePoly:
        kind, value, pos = self.toks.next()
        if kind == "number":
            return FreePoly(self.alphabet_size, {(): value})
        if kind == "var":
            index = int(value)
            if index < 1:
                raise ParseError(f"letter index {index} must be >= 1", pos)
            if index > self.alphabet_size:
                raise ParseError(
                    f"letter index {index} out of range [1..{self.alphabet_size}]", pos
                )
            return FreePoly(self.alphabet_size, {(index,): 1.0})
        if kind == "(":
            inner = self._expr()
            close, _, cpos = self.toks.next()
            if close != ")":
                raise ParseError("expected ')'", cpos)
            return inner
        raise ParseError("expected a scalar, variable, or '('", pos)


def parse_poly(text: str, alphabet_size: int | None = None, letter: str = "x") -> FreePoly:
    """Parse polynomial text; alphabet size is inferred from the largest
    letter index when not given explicitly."""
    return _Parser(text, alphabet_size, letter).parse()


def _format_real(value: float) -> str:
    if value == int(value) and abs(value) < 1e15:
        return str(int(value))
    return repr(value)


def _format_scalar(coeff: complex) -> tuple[str, str]:
    """Split a coefficient into a sign ('+'/'-') and an unsigned scalar text.

    Mixed complex values keep the sign inside parentheses so the printed form
    re-parses to the exact same complex number.
    """
    re, im = coeff.real, coeff.imag
    if im == 0.0:
        return ("-" if re < 0 else "+", _format_real(abs(re)))
    if re == 0.0:
        return ("-" if im < 0 else "+", _format_real(abs(im)) + "i")
    imag_sign = "-" if im < 0 else "+"
    return ("+", f"({_format_real(re)}{imag_sign}{_format_real(abs(im))}i)")


def format_poly(p: FreePoly, letter: str = "x") -> str:
    """Canonical text form; parse(format(p)) reproduces p exactly."""
    if not p.terms:
        return "0"
    pieces = []
    for word in sorted(p.terms, key=lambda w: (len(w), w)):
        sign, scalar = _format_scalar(p.terms[word])
        if word:
            body = "*".join(f"{letter}{k}" for k in word)
            if scalar != "1":
                body = f"{scalar}*{body}"
        else:
            body = scalar
        pieces.append((sign, body))
    first_sign, first_body = pieces[0]
    out = ("-" if first_sign == "-" else "") + first_body
    for sign, body in pieces[1:]:
        out += f" {sign} {body}"
    return out
