"""Prime building blocks: flip-flops and modular counters."""

from __future__ import annotations

from typing import NamedTuple

from .automata import Semiautomaton

FLIPFLOP_LETTERS = ("set", "reset", "read")
COUNTER_LETTERS = ("inc", "read")


def make_flipflop(with_reset: bool = True, initial: int = 0) -> Semiautomaton:
    """Two-state core storing one bit.  Without reset the bit is write-once
    and the internal alphabet is just {set, read}."""
    if initial not in (0, 1):
        raise ValueError("flip-flop initial state must be 0 or 1")
    letters = FLIPFLOP_LETTERS if with_reset else ("set", "read")
    transitions = {}
    for q in (0, 1):
        transitions[(q, "read")] = q
        transitions[(q, "set")] = 1
        if with_reset:
            transitions[(q, "reset")] = 0
    return Semiautomaton(letters, (0, 1), transitions, initial)


def make_counter(modulus: int, initial: int = 0) -> Semiautomaton:
    """Counter modulo ``modulus`` with letters {inc, read}; the wrap on inc
    stands for overflow of the finite memory."""
    if modulus < 2:
        raise ValueError(f"counter modulus must be at least 2, got {modulus}")
    states = tuple(range(modulus))
    if initial not in states:
        raise ValueError(f"initial state {initial} outside [0, {modulus - 1}]")
    transitions = {}
    for q in states:
        transitions[(q, "read")] = q
        transitions[(q, "inc")] = (q + 1) % modulus
    return Semiautomaton(COUNTER_LETTERS, states, transitions, initial)


def is_prime_counter(core: Semiautomaton) -> bool:
    """A counter is prime exactly when its modulus is a prime number."""
    n = len(core.states)
    if n < 2:
        return False
    d = 2
    while d * d <= n:
        if n % d == 0:
            return False
        d += 1
    return True


class IdentityCheck(NamedTuple):
    ok: bool
    violation: str | None


def validate_prime_identities(core: Semiautomaton, kind: str) -> IdentityCheck:
    """Exhaustively check the defining identities of a flip-flop or counter.

    kind: 'flipflop' (reset optional in the alphabet) or 'counter'.
    """
    if kind == "flipflop":
        if set(core.states) != {0, 1}:
            return IdentityCheck(False, f"states {core.states} are not {{0, 1}}")
        expected = {"read": lambda q: q, "set": lambda q: 1, "reset": lambda q: 0}
        if not set(core.alphabet) <= set(expected):
            return IdentityCheck(False, f"alphabet {core.alphabet} is not flip-flop-like")
        if "set" not in core.alphabet or "read" not in core.alphabet:
            return IdentityCheck(False, "flip-flop needs at least {set, read}")
        for q in core.states:
            for a in core.alphabet:
                want = expected[a](q)
                got = core.transitions[(q, a)]
                if got != want:
                    return IdentityCheck(
                        False, f"delta({q}, {a}) = {got}, expected {want}"
                    )
        return IdentityCheck(True, None)

    if kind == "counter":
        n = len(core.states)
        if set(core.states) != set(range(n)) or n < 2:
            return IdentityCheck(False, f"states {core.states} are not [0, n-1]")
        if set(core.alphabet) != set(COUNTER_LETTERS):
            return IdentityCheck(False, f"alphabet {core.alphabet} is not {{inc, read}}")
        for q in core.states:
            if core.transitions[(q, "read")] != q:
                return IdentityCheck(
                    False, f"delta({q}, read) = {core.transitions[(q, 'read')]}, expected {q}"
                )
            want = (q + 1) % n
            if core.transitions[(q, "inc")] != want:
                return IdentityCheck(
                    False, f"delta({q}, inc) = {core.transitions[(q, 'inc')]}, expected {want}"
                )
        return IdentityCheck(True, None)

    raise ValueError(f"unknown prime kind {kind!r}")
