"""Compositional string functions: last-letter lifting, prefix maps, pops,
composition and cross products, with builders that express a component or a
whole cascade as one expression tree.

These trees are the independent oracle for the operational semantics: the
builders below evaluate to exactly the same outputs as running the induced
automaton or stepping the cascade, and the equivalence is checked by tests
rather than assumed.  Evaluation is plain structural recursion; trees are
immutable and evaluation is pure.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

from .automata import ComponentAutomaton, Semiautomaton
from .cascade import Cascade
from .errors import EmptyInputError


class StringFunction:
    def evaluate(self, value):
        raise NotImplementedError

    def __call__(self, value):
        return self.evaluate(value)


@dataclass(frozen=True)
class Lift(StringFunction):
    """A letter function applied to the last letter of a non-empty string."""

    fn: Callable

    def evaluate(self, s):
        if len(s) == 0:
            raise EmptyInputError("last-letter lift")
        return self.fn(s[-1])


@dataclass(frozen=True)
class LastLetter(StringFunction):
    """The identity letter function, lifted: returns the last letter."""

    def evaluate(self, s):
        if len(s) == 0:
            raise EmptyInputError("last-letter lift")
        return s[-1]


@dataclass(frozen=True)
class SemiautomatonFn(StringFunction):
    """String -> state reached from the initial state; empty string allowed
    and returns the initial state."""

    core: Semiautomaton

    def evaluate(self, s):
        return self.core.run(s)


@dataclass(frozen=True)
class PrefixMap(StringFunction):
    """One output per non-empty prefix, as a tuple of the same length."""

    inner: StringFunction

    def evaluate(self, s):
        return tuple(self.inner.evaluate(s[: i + 1]) for i in range(len(s)))


@dataclass(frozen=True)
class Pop(StringFunction):
    """Drop the last letter before applying the inner function.

    On a one-letter string the inner function is evaluated on the empty
    string, which is only meaningful for semiautomaton functions; anything
    else is rejected at construction time.
    """

    inner: SemiautomatonFn

    def __post_init__(self):
        if not isinstance(self.inner, SemiautomatonFn):
            raise TypeError("pop is only defined over semiautomaton functions")

    def evaluate(self, s):
        return self.inner.evaluate(s[:-1])


@dataclass(frozen=True)
class Compose(StringFunction):
    """Apply ``first``, then ``then`` (diagrammatic order)."""

    first: StringFunction
    then: StringFunction

    def evaluate(self, value):
        return self.then.evaluate(self.first.evaluate(value))


@dataclass(frozen=True)
class Cross(StringFunction):
    """Pair the results of two functions on the same input.

    With ``append=True`` the left result must be a tuple and the right result
    is appended to it as one more coordinate (the flat letter representation
    used between cascade components).
    """

    left: StringFunction
    right: StringFunction
    append: bool = False

    def evaluate(self, value):
        l = self.left.evaluate(value)
        r = self.right.evaluate(value)
        return l + (r,) if self.append else (l, r)


@dataclass(frozen=True)
class Apply(StringFunction):
    """A plain function applied to the (already composed) value."""

    fn: Callable

    def evaluate(self, value):
        return self.fn(value)


def component_function(comp: ComponentAutomaton) -> StringFunction:
    """Expression tree equal to running the component's induced automaton.

    The projected input stream is built letterwise; the core state is read
    before the last update and paired with the last projected letter for the
    output function.
    """
    projected_stream = PrefixMap(Lift(comp.dependencies))
    internal_stream = PrefixMap(Lift(comp.input_fn))
    state_before_last = Compose(internal_stream, Pop(SemiautomatonFn(comp.core)))
    paired = Cross(state_before_last, LastLetter())
    return Compose(
        Compose(projected_stream, paired),
        Apply(lambda qx: comp.theta(qx[0], qx[1])),
    )


def cascade_function(cascade: Cascade) -> StringFunction:
    """Expression tree equal to running the cascade.

    Each non-final component becomes a prefix-mapped stage that extends every
    letter with that component's output; the final component consumes the
    fully extended string.
    """
    comps = cascade.components
    tree: StringFunction = component_function(comps[-1])
    for comp in reversed(comps[:-1]):
        stage = PrefixMap(Cross(LastLetter(), component_function(comp), append=True))
        tree = Compose(stage, tree)
    return tree
