"""Factored alphabets, projections, and enumerable finite function classes.

Letters are plain tuples with one entry per coordinate of an owning
:class:`FactoredAlphabet`.  Everything here is immutable after construction
and safe to share across threads.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from functools import cached_property
from typing import Iterator

from .errors import ArityMismatchError, CapExceededError, UnknownLetterError

Value = str | int
Letter = tuple

DEFAULT_ENUMERATION_CAP = 1_000_000


@dataclass(frozen=True)
class Coordinate:
    """One named finite domain of a factored alphabet."""

    name: str
    values: tuple[Value, ...]

    def __post_init__(self):
        if not self.values:
            raise ValueError(f"coordinate {self.name!r} has an empty domain")
        if len(set(self.values)) != len(self.values):
            raise ValueError(f"coordinate {self.name!r} has duplicate values")

    @property
    def is_boolean(self) -> bool:
        return set(self.values) == {0, 1}


@dataclass(frozen=True)
class FactoredAlphabet:
    """An ordered product of named finite domains.

    The arity is the number of coordinates; a letter is a tuple holding one
    value per coordinate.
    """

    coords: tuple[Coordinate, ...]

    def __post_init__(self):
        if len(self.coords) < 1:
            raise ValueError("a factored alphabet needs at least one coordinate")
        names = [c.name for c in self.coords]
        if len(set(names)) != len(names):
            raise ValueError(f"duplicate coordinate names: {names}")

    @staticmethod
    def of(*coords: tuple[str, tuple | list]) -> "FactoredAlphabet":
        return FactoredAlphabet(tuple(Coordinate(n, tuple(vs)) for n, vs in coords))

    @staticmethod
    def single(name: str, values) -> "FactoredAlphabet":
        return FactoredAlphabet.of((name, tuple(values)))

    @property
    def arity(self) -> int:
        return len(self.coords)

    @property
    def n_letters(self) -> int:
        return math.prod(len(c.values) for c in self.coords)

    def letters(self) -> Iterator[Letter]:
        """All letters in canonical (product) order."""
        return itertools.product(*(c.values for c in self.coords))

    def check(self, letter, where="") -> Letter:
        if not isinstance(letter, tuple) or len(letter) != self.arity:
            actual = len(letter) if isinstance(letter, tuple) else type(letter).__name__
            raise ArityMismatchError(self.arity, actual, where)
        for i, (v, coord) in enumerate(zip(letter, self.coords)):
            if v not in coord.values:
                raise UnknownLetterError(v, position=i, where=where or coord.name)
        return letter

    def __contains__(self, letter) -> bool:
        try:
            self.check(letter)
        except (ArityMismatchError, UnknownLetterError):
            return False
        return True

    def project(self, indices) -> "FactoredAlphabet":
        """Sub-alphabet at the given 1-based coordinate indices."""
        idx = sorted(set(indices))
        if not idx:
            raise ValueError("cannot build an alphabet over zero coordinates")
        if idx[0] < 1 or idx[-1] > self.arity:
            raise ValueError(f"indices {idx} out of range [1, {self.arity}]")
        return FactoredAlphabet(tuple(self.coords[i - 1] for i in idx))

    def extend(self, name: str, values) -> "FactoredAlphabet":
        """New alphabet with one coordinate appended (cascade chaining)."""
        return FactoredAlphabet(self.coords + (Coordinate(name, tuple(values)),))


@dataclass(frozen=True)
class Projection:
    """Selection of coordinates J from tuples of a given arity.

    Indices are 1-based and kept sorted; applying the projection returns the
    selected values in ascending index order.
    """

    source_arity: int
    indices: tuple[int, ...]

    def __post_init__(self):
        idx = tuple(sorted(set(self.indices)))
        object.__setattr__(self, "indices", idx)
        if idx and (idx[0] < 1 or idx[-1] > self.source_arity):
            raise ValueError(
                f"projection indices {idx} out of range [1, {self.source_arity}]"
            )

    @property
    def degree(self) -> int:
        return len(self.indices)

    def __call__(self, letter: Letter) -> Letter:
        if not isinstance(letter, tuple) or len(letter) != self.source_arity:
            actual = len(letter) if isinstance(letter, tuple) else type(letter).__name__
            raise ArityMismatchError(self.source_arity, actual, "projection")
        return tuple(letter[i - 1] for i in self.indices)


def project(p: Projection, letter: Letter) -> Letter:
    return p(letter)


def projection_count(arity: int, degree: int) -> int:
    """Number of distinct projections of the given degree: binomial(a, m)."""
    if degree < 0 or degree > arity:
        raise ValueError(f"degree {degree} not in [0, {arity}]")
    return math.comb(arity, degree)


# ---------------------------------------------------------------------------
# Boolean view of letters, used by the monotone-DNF classes.
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class BooleanView:
    """Propositional encoding of the letters of a factored alphabet.

    A coordinate whose domain is {0, 1} contributes one variable named after
    the coordinate.  Any other coordinate is expanded one-hot, one variable
    per domain value, named ``coord=value``.
    """

    signature: FactoredAlphabet

    @cached_property
    def variables(self) -> tuple[str, ...]:
        names = []
        for coord in self.signature.coords:
            if coord.is_boolean:
                names.append(coord.name)
            else:
                names.extend(f"{coord.name}={v}" for v in coord.values)
        return tuple(names)

    @cached_property
    def _encoders(self):
        # per coordinate: ('bool', bit) or ('onehot', {value: bit})
        encs = []
        bit = 0
        for coord in self.signature.coords:
            if coord.is_boolean:
                encs.append(("bool", bit))
                bit += 1
            else:
                encs.append(("onehot", {v: bit + i for i, v in enumerate(coord.values)}))
                bit += len(coord.values)
        return tuple(encs)

    @property
    def n_variables(self) -> int:
        return len(self.variables)

    def encode(self, letter: Letter) -> int:
        self.signature.check(letter, "boolean view")
        mask = 0
        for v, enc in zip(letter, self._encoders):
            kind, data = enc
            if kind == "bool":
                if v:
                    mask |= 1 << data
            else:
                mask |= 1 << data[v]
        return mask

    def bit_of(self, variable_name: str) -> int:
        try:
            return self.variables.index(variable_name)
        except ValueError:
            raise UnknownLetterError(variable_name, where="boolean view variables")


# ---------------------------------------------------------------------------
# Concrete finite functions on letters.
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class TableFunction:
    """A total function on a finite signature, given by explicit entries."""

    signature: FactoredAlphabet
    entries: tuple[tuple[Letter, Value], ...]

    @cached_property
    def _table(self):
        return dict(self.entries)

    def __call__(self, letter: Letter) -> Value:
        self.signature.check(letter, "table function")
        return self._table[letter]

    @staticmethod
    def from_callable(signature: FactoredAlphabet, fn) -> "TableFunction":
        return TableFunction(
            signature, tuple((x, fn(x)) for x in signature.letters())
        )


@dataclass(frozen=True)
class MonotoneDnf:
    """A monotone DNF over the boolean view of a signature.

    Terms are bitmasks over the view's variables; the function is true on a
    letter when some term's variables are all on.  The empty term (mask 0)
    makes the function constantly true.
    """

    view: BooleanView
    terms: tuple[int, ...]
    on_true: Value = 1
    on_false: Value = 0

    def __call__(self, letter: Letter) -> Value:
        mask = self.view.encode(letter)
        hit = any(term & mask == term for term in self.terms)
        return self.on_true if hit else self.on_false

    def term_names(self) -> tuple[tuple[str, ...], ...]:
        names = self.view.variables
        return tuple(
            tuple(names[b] for b in range(len(names)) if term >> b & 1)
            for term in self.terms
        )


@dataclass(frozen=True)
class ThresholdConjunction:
    """Conjunction of per-coordinate lower bounds over integer domains.

    ``None`` means the coordinate is unconstrained.
    """

    signature: FactoredAlphabet
    thresholds: tuple[int | None, ...]
    on_true: Value = 1
    on_false: Value = 0

    def __call__(self, letter: Letter) -> Value:
        self.signature.check(letter, "threshold conjunction")
        ok = all(t is None or v >= t for v, t in zip(letter, self.thresholds))
        return self.on_true if ok else self.on_false


# ---------------------------------------------------------------------------
# Enumerable function classes.
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class TableClass:
    """All total functions from a signature into a fixed output alphabet."""

    kind = "table"
    signature: FactoredAlphabet
    outputs: tuple[Value, ...]

    def __post_init__(self):
        if not self.outputs or len(set(self.outputs)) != len(self.outputs):
            raise ValueError("outputs must be non-empty and duplicate-free")

    @property
    def cardinality(self) -> int:
        return len(self.outputs) ** self.signature.n_letters

    def function_at(self, index: int) -> TableFunction:
        if not 0 <= index < self.cardinality:
            raise IndexError(index)
        inputs = list(self.signature.letters())
        base = len(self.outputs)
        digits = []
        for _ in inputs:
            digits.append(index % base)
            index //= base
        # first input letter takes the most significant digit
        digits.reverse()
        return TableFunction(
            self.signature, tuple(zip(inputs, (self.outputs[d] for d in digits)))
        )

    def __iter__(self) -> Iterator[TableFunction]:
        inputs = tuple(self.signature.letters())
        for outs in itertools.product(self.outputs, repeat=len(inputs)):
            yield TableFunction(self.signature, tuple(zip(inputs, outs)))


def _incomparable_pair_count(n: int) -> int:
    """Unordered pairs of distinct non-empty subsets of [n], neither
    containing the other."""
    total = (2**n - 1) * (2**n - 2) // 2
    comparable = 3**n - 2 ** (n + 1) + 1
    return total - comparable


@dataclass(frozen=True)
class MonotoneDnfClass:
    """Monotone DNFs with at most ``max_terms`` terms over a signature's
    boolean view.

    Canonical form: the constant-true function is the single empty term; any
    other member is an antichain of 1..max_terms non-empty terms (no term
    contained in another).  Members are pairwise distinct as functions on the
    full boolean assignment space; on one-hot expanded coordinates only the
    one-hot patterns are realizable letters, so distinct members can coincide
    there.  Closed-form counting is implemented for max_terms in {1, 2}.
    """

    kind = "mono_dnf"
    signature: FactoredAlphabet
    max_terms: int
    outputs: tuple[Value, Value] = (1, 0)

    def __post_init__(self):
        if self.max_terms not in (1, 2):
            raise ValueError(
                "antichain counting beyond 2 terms is not supported; "
                f"got max_terms={self.max_terms}"
            )

    @cached_property
    def view(self) -> BooleanView:
        return BooleanView(self.signature)

    @property
    def n_variables(self) -> int:
        return self.view.n_variables

    @property
    def cardinality(self) -> int:
        n = self.n_variables
        count = 2**n  # constant true + single non-empty terms
        if self.max_terms == 2:
            count += _incomparable_pair_count(n)
        return count

    @staticmethod
    def _term_key(term: int) -> tuple[int, ...]:
        return tuple(b for b in range(term.bit_length()) if term >> b & 1)

    @cached_property
    def _single_terms(self) -> tuple[int, ...]:
        n = self.n_variables
        return tuple(sorted(range(1, 2**n), key=self._term_key))

    @cached_property
    def _term_pairs(self) -> tuple[tuple[int, int], ...]:
        singles = self._single_terms
        pairs = []
        for i, t1 in enumerate(singles):
            for t2 in singles[i + 1 :]:
                if t1 & t2 != t1 and t1 & t2 != t2:
                    pairs.append((t1, t2))
        return tuple(pairs)

    def _make(self, terms: tuple[int, ...]) -> MonotoneDnf:
        return MonotoneDnf(self.view, terms, self.outputs[0], self.outputs[1])

    def function_at(self, index: int) -> MonotoneDnf:
        if not 0 <= index < self.cardinality:
            raise IndexError(index)
        if index == 0:
            return self._make((0,))
        index -= 1
        singles = self._single_terms
        if index < len(singles):
            return self._make((singles[index],))
        return self._make(self._term_pairs[index - len(singles)])

    def from_term_names(self, term_names) -> MonotoneDnf:
        """Build a member from variable-name terms; [] means constant true."""
        terms = []
        for names in term_names:
            mask = 0
            for name in names:
                mask |= 1 << self.view.bit_of(name)
            terms.append(mask)
        if terms == [0]:
            return self._make((0,))
        if not terms or any(t == 0 for t in terms):
            raise ValueError("terms must be non-empty (lone [] means constant true)")
        if len(terms) > self.max_terms:
            raise ValueError(f"more than {self.max_terms} terms")
        if len(terms) == 2:
            a, b = terms
            if a & b in (a, b):
                raise ValueError("terms must form an antichain")
            terms = sorted(terms, key=self._term_key)
        return self._make(tuple(terms))

    def __iter__(self) -> Iterator[MonotoneDnf]:
        yield self._make((0,))
        for t in self._single_terms:
            yield self._make((t,))
        if self.max_terms == 2:
            for pair in self._term_pairs:
                yield self._make(pair)


@dataclass(frozen=True)
class ThresholdClass:
    """All threshold conjunctions over integer coordinates.

    Per coordinate the choices are "unconstrained" plus every domain value
    above the minimum; the at-least-minimum test is extensionally the same as
    unconstrained and is not listed twice, keeping members pairwise distinct.
    """

    kind = "threshold"
    signature: FactoredAlphabet
    outputs: tuple[Value, Value] = (1, 0)

    def __post_init__(self):
        for coord in self.signature.coords:
            if not all(isinstance(v, int) for v in coord.values):
                raise ValueError(
                    f"threshold class needs integer domains; {coord.name!r} is not"
                )

    @cached_property
    def _choices(self) -> tuple[tuple[int | None, ...], ...]:
        return tuple(
            (None,) + tuple(sorted(c.values)[1:]) for c in self.signature.coords
        )

    @property
    def cardinality(self) -> int:
        return math.prod(len(ch) for ch in self._choices)

    def function_at(self, index: int) -> ThresholdConjunction:
        if not 0 <= index < self.cardinality:
            raise IndexError(index)
        thresholds = []
        for choices in reversed(self._choices):
            thresholds.append(choices[index % len(choices)])
            index //= len(choices)
        thresholds.reverse()
        return ThresholdConjunction(
            self.signature, tuple(thresholds), self.outputs[0], self.outputs[1]
        )

    def __iter__(self) -> Iterator[ThresholdConjunction]:
        for thresholds in itertools.product(*self._choices):
            yield ThresholdConjunction(
                self.signature, thresholds, self.outputs[0], self.outputs[1]
            )


FiniteFunctionClass = TableClass | MonotoneDnfClass | ThresholdClass


def class_cardinality(cls: FiniteFunctionClass) -> int:
    return cls.cardinality


def enumerate_class(cls: FiniteFunctionClass, cap: int = DEFAULT_ENUMERATION_CAP):
    """Yield every member in canonical order; errors out instead of starting
    an enumeration that cannot finish under the cap."""
    size = cls.cardinality
    if size > cap:
        raise CapExceededError("function class enumeration", size, cap)
    return iter(cls)
