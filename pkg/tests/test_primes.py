import pytest

from cascata.primes import (
    is_prime_counter,
    make_counter,
    make_flipflop,
    validate_prime_identities,
)


def test_flipflop_identities():
    ff = make_flipflop(with_reset=True)
    assert ff.transitions[(1, "reset")] == 0
    assert ff.transitions[(0, "read")] == 0
    assert ff.transitions[(0, "set")] == 1


def test_write_once_flipflop_keeps_the_bit():
    ff = make_flipflop(with_reset=False)
    assert "reset" not in ff.alphabet
    assert ff.run(("set",) + ("read",) * 5) == 1


def test_counter_wrap_and_full_cycle():
    c = make_counter(5)
    assert c.transitions[(4, "inc")] == 0
    assert c.run(("inc",) * 5) == 0


def test_counter_threshold_scenario_size():
    c = make_counter(16)
    assert c.run(("inc",) * 13) == 13


def test_make_counter_rejects_small_modulus():
    with pytest.raises(ValueError):
        make_counter(1)


def test_flipflop_rejects_bad_initial():
    with pytest.raises(ValueError):
        make_flipflop(initial=2)


@pytest.mark.parametrize("n,prime", [(2, True), (3, True), (5, True),
                                     (7, True), (16, False), (9, False)])
def test_is_prime_counter(n, prime):
    assert is_prime_counter(make_counter(n)) == prime


def test_constructors_pass_identity_validation():
    for with_reset in (True, False):
        for init in (0, 1):
            check = validate_prime_identities(make_flipflop(with_reset, init), "flipflop")
            assert check.ok, check.violation
    for n in (2, 3, 5, 7, 16):
        check = validate_prime_identities(make_counter(n), "counter")
        assert check.ok, check.violation


def test_validation_names_a_corrupted_transition():
    c = make_counter(7)
    broken = dict(c.transitions)
    broken[(3, "inc")] = 3
    from cascata.automata import Semiautomaton

    bad = Semiautomaton(c.alphabet, c.states, broken, c.initial)
    check = validate_prime_identities(bad, "counter")
    assert not check.ok
    assert "delta(3, inc)" in check.violation


def test_validation_rejects_unknown_kind():
    with pytest.raises(ValueError):
        validate_prime_identities(make_flipflop(), "group")


def test_counters_are_never_aperiodic():
    for n in (2, 3, 5, 16):
        assert not make_counter(n).is_aperiodic()
