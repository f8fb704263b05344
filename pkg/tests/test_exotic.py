import math
from itertools import product

import pytest

from betalab.errors import NoSingleEditFound, UsageError
from betalab.exotic import (
    FactorAutomaton,
    build_nested,
    nested_entropy_report,
    no_short_periodics,
    single_edit_repair,
)


def oracle_contains(word, patterns):
    return any(tuple(word[i:i + len(p)]) == tuple(p)
               for p in patterns for i in range(len(word) - len(p) + 1))


def test_factor_automaton_matches_oracle():
    patterns = [(1, 1, 1, 1), (0, 0, 0, 0), (0, 1, 0, 1, 0, 1)]
    auto = FactorAutomaton(patterns)
    for n in range(1, 10):
        for w in product((0, 1), repeat=n):
            assert auto.contains_forbidden(w) == oracle_contains(w, patterns)


def test_build_nested_level_1():
    shift = build_nested((4,))
    assert shift.forbidden_sets[0] == [(1, 1, 1, 1), (0, 0, 0, 0)]
    assert shift.admissible((0, 1, 0, 1, 0, 1))
    assert not shift.admissible((1, 1, 1, 1, 0))


def test_build_nested_level_2_forbidden_set():
    shift = build_nested((4, 6))
    powers = shift.forbidden_sets[1]
    assert len(powers) == 4  # all four length-2 words survive level 1
    assert (0, 1) * 6 in powers
    assert (1, 1) * 6 in powers


def test_build_nested_input_guards():
    with pytest.raises(UsageError):
        build_nested((2,))
    with pytest.raises(UsageError):
        build_nested((6, 4))


def test_nesting_chain_exhaustive():
    shift = build_nested((4, 6))
    for n in (6, 10, 14):
        level2 = set(shift.enumerate(n, 2))
        level1 = set(shift.enumerate(n, 1))
        assert level2 <= level1


def test_no_short_periodics_level_1():
    shift = build_nested((4,))
    rep = no_short_periodics(shift, 1)
    assert rep["all_excluded"]
    by_word = {r["period_word"]: r for r in rep["rows"]}
    assert by_word[(0,)]["breaking_factor"] == (0, 0, 0, 0)
    assert by_word[(1,)]["breaking_factor"] == (1, 1, 1, 1)


def test_no_short_periodics_level_2():
    shift = build_nested((4, 6))
    rep = no_short_periodics(shift, 2)
    assert rep["all_excluded"]
    assert len(rep["rows"]) == 2 + 4
    by_word = {r["period_word"]: r for r in rep["rows"]}
    assert by_word[(0, 1)]["breaking_factor"] == (0, 1) * 6


def test_single_edit_repair_constant_power():
    shift = build_nested((4, 6))
    rep = single_edit_repair((1, 1, 1, 1), shift, 1)
    assert rep["working_positions"] == 4
    assert not shift.automata[0].contains_forbidden(rep["repaired"])


def test_single_edit_repair_alternating_power():
    shift = build_nested((4, 6))
    rep = single_edit_repair((0, 1) * 6, shift, 2)
    assert rep["working_positions"] >= 12 * (1 - 2 / 4)
    assert rep["edit"] is not None


def test_single_edit_repair_abundance_on_all_powers():
    shift = build_nested((4, 6))
    for w in shift.forbidden_sets[0] + shift.forbidden_sets[1]:
        rep = single_edit_repair(w, shift, 2)
        assert rep["working_positions"] >= len(w) * (1 - 2 / 4), w


def test_single_edit_repair_identity_on_admissible():
    shift = build_nested((4, 6))
    rep = single_edit_repair((0, 1, 0, 1), shift, 2)
    assert rep["already_admissible"]
    assert rep["repaired"] == (0, 1, 0, 1)


def test_counts_match_brute_force():
    shift = build_nested((4, 6))
    forbidden = [(1, 1, 1, 1), (0, 0, 0, 0)]
    for n in (8, 12):
        brute = sum(1 for w in product((0, 1), repeat=n)
                    if not oracle_contains(w, forbidden))
        assert shift.automata[0].count_words(n) == brute
        assert len(shift.enumerate(n, 1)) == brute


def test_entropy_report_level_0_is_log_2():
    shift = build_nested((4, 6))
    rep = nested_entropy_report(shift, 2, 14)
    assert rep["rates"][0] == math.log(2)
    assert rep["rates"][1] < rep["rates"][0]
    assert rep["rates"][2] <= rep["rates"][1]
    for drop in rep["drops"]:
        assert drop["within"], drop


def test_entropy_drop_decreases_with_larger_powers():
    drops = []
    for N2 in (6, 8, 12):
        shift = build_nested((4, N2))
        rep = nested_entropy_report(shift, 2, 14)
        drops.append(rep["drops"][1]["drop"])
    assert drops[0] >= drops[1] >= drops[2]


def test_entropy_positivity_proxy():
    shift = build_nested((4, 6))
    rep = nested_entropy_report(shift, 2, 14)
    slack = 0.05
    eps_sum = sum(math.log(2) / 2 ** (i + 1) for i in (1, 2))
    assert rep["rates"][2] >= math.log(2) - eps_sum - slack
