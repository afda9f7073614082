"""
Tests for positive / negative selection, scoring and repertoire files.
"""

import random
from fractions import Fraction

import pytest

from wfsm_ais.errors import AlphabetError, FormatError, InvariantError, SelectionError
from wfsm_ais.matching import BiasTable, MatchingRule, all_strings, matched_set_size, matches
from wfsm_ais.metrics import tied_rank
from wfsm_ais.selection import (Mode, Polarity, dumps_repertoire, load_repertoire, loads_repertoire,
                                negative_select, positive_select, save_repertoire, score, score_batch)
from wfsm_ais.wfsm import enumerate_strings

ORACLE_RULES = [
    MatchingRule("wildcard", "01", 4),
    MatchingRule("wildcard", "abc", 2),
    MatchingRule("contiguous", "01", 5, 2),
    MatchingRule("contiguous", "012", 4, 3),
    MatchingRule("hamming", "01", 5, 1),
    MatchingRule("hamming", "012", 3, 1),
]


def language(rep):
    return dict(enumerate_strings(rep.machine, 10 ** 6))


def brute_force_score(rule, train, t, mode, polarity):
    """Score from the definitions, by enumerating every detector."""
    total = 0
    for d in all_strings(rule.detector_alphabet, rule.length):
        if not matches(rule, d, t):
            continue
        hits = sum(matches(rule, d, s) for s in train)
        if polarity is Polarity.POSITIVE and hits:
            total += hits if mode is Mode.WEIGHTED else 1
        elif polarity is Polarity.NEGATIVE and not hits:
            total += 1
    return total


def test_positive_selection_counts_multiplicity():
    rule = MatchingRule("hamming", "01", 2, 0)
    assert language(positive_select(["00", "00"], rule, Mode.WEIGHTED)) == {"00": 2}
    assert language(positive_select(["00", "00"], rule, Mode.UNWEIGHTED)) == {"00": 1}


def test_positive_selection_weights_equal_match_counts():
    rule = MatchingRule("contiguous", "01", 3, 2)
    train = ["000", "011"]
    weights = language(positive_select(train, rule, "weighted"))
    for d in all_strings("01", 3):
        assert weights.get(d, 0) == sum(matches(rule, d, s) for s in train)


def test_negative_selection_complement():
    rule = MatchingRule("hamming", "01", 2, 0)
    rep = negative_select(["00"], rule)
    assert language(rep) == {"01": 1, "10": 1, "11": 1}
    assert rep.polarity is Polarity.NEGATIVE


def test_negative_selection_with_bias():
    rule = MatchingRule("hamming", "01", 2, 0)
    bias = BiasTable.uniform(rule, {"1": Fraction(1, 2)})
    rep = negative_select(["00"], rule, bias, Mode.WEIGHTED)
    assert language(rep) == {"01": Fraction(1, 2), "10": Fraction(1, 2), "11": Fraction(1, 4)}
    unweighted = negative_select(["00"], rule, bias, Mode.UNWEIGHTED)
    assert language(unweighted) == {"01": 1, "10": 1, "11": 1}


def test_negative_selection_of_everything_is_empty():
    rule = MatchingRule("hamming", "01", 2, 0)
    rep = negative_select(all_strings("01", 2), rule)
    assert rep.machine.is_empty
    assert rep.size == 0
    assert score(rep, "01") == 0


def test_empty_training_sample():
    rule = MatchingRule("hamming", "01", 2, 0)
    with pytest.raises(SelectionError):
        positive_select([], rule)
    with pytest.raises(SelectionError):
        negative_select([], rule)


def test_malformed_training_string_names_position():
    rule = MatchingRule("hamming", "01", 2, 0)
    with pytest.raises(FormatError) as excinfo:
        positive_select(["00", "01", "012"], rule)
    assert excinfo.value.line == 3
    with pytest.raises(FormatError):
        positive_select(["0a"], rule)


def test_weighted_score_example():
    rule = MatchingRule("hamming", "01", 2, 1)
    rep = positive_select(["00", "00"], rule, Mode.WEIGHTED)
    assert score(rep, "00") == 6
    assert score(positive_select(["00", "00"], rule, Mode.UNWEIGHTED), "00") == 3


def test_score_rejects_malformed_test_string():
    rule = MatchingRule("hamming", "01", 2, 1)
    rep = positive_select(["00"], rule)
    with pytest.raises(AlphabetError):
        score(rep, "0x")


@pytest.mark.parametrize("rule", ORACLE_RULES, ids=str)
def test_scores_equal_brute_force(rule):
    rng = random.Random(rule.descriptor)
    universe = all_strings(rule.alphabet, rule.length)
    for _ in range(10):
        train = [rng.choice(universe) for _ in range(rng.randint(1, 4))]
        tests = [rng.choice(universe) for _ in range(3)]
        for mode in Mode:
            pos = positive_select(train, rule, mode)
            neg = negative_select(train, rule, mode=mode)
            for t in tests:
                assert score(pos, t) == brute_force_score(rule, train, t, mode, Polarity.POSITIVE)
                assert score(neg, t) == brute_force_score(rule, train, t, mode, Polarity.NEGATIVE)


@pytest.mark.parametrize("seed", range(3))
def test_positive_and_negative_scores_add_up(seed):
    rule = MatchingRule("contiguous", "01", 8, 5)
    universe = all_strings("01", 8)
    rng = random.Random(seed)
    train = rng.sample(universe, 20)
    pos = positive_select(train, rule, Mode.UNWEIGHTED)
    neg = negative_select(train, rule, mode=Mode.UNWEIGHTED)
    total = matched_set_size(rule)
    for t in universe:
        assert score(pos, t) + score(neg, t) == total


def test_score_batch():
    rule = MatchingRule("hamming", "01", 3, 1)
    rep = positive_select(["000", "001", "001"], rule)
    assert len(score_batch(rep, [])) == 0
    report = score_batch(rep, ["010", "010"])
    assert report.scores[0] == report.scores[1]
    tests = all_strings("01", 3)
    assert score_batch(rep, tests).scores == [score(rep, t) for t in tests]


def test_score_batch_in_worker_processes():
    rule = MatchingRule("hamming", "01", 3, 1)
    rep = positive_select(["000", "011"], rule)
    tests = all_strings("01", 3)
    assert score_batch(rep, tests, jobs=2).scores == score_batch(rep, tests).scores


def test_score_report_frame():
    rule = MatchingRule("hamming", "01", 2, 1)
    rep = positive_select(["00", "00"], rule)
    frame = score_batch(rep, ["00", "11"]).to_frame()
    assert list(frame.columns) == ["string", "score", "decimal"]
    assert frame["score"].tolist() == ["6/1", "4/1"]
    assert frame["decimal"].tolist() == ["6", "4"]


def test_repertoire_round_trip(tmp_path):
    rule = MatchingRule("wildcard", "ab", 3)
    rep = positive_select(["aab", "abb", "aab"], rule)
    assert loads_repertoire(dumps_repertoire(rep)) == rep
    path = tmp_path / "rep.wfsm"
    save_repertoire(rep, path)
    loaded = load_repertoire(path)
    assert loaded.rule == rule
    assert loaded.mode is Mode.WEIGHTED
    assert loaded.polarity is Polarity.POSITIVE
    assert score(loaded, "aab") == score(rep, "aab")


def test_repertoire_header_is_required():
    rule = MatchingRule("hamming", "01", 2, 0)
    text = dumps_repertoire(positive_select(["00"], rule))
    with pytest.raises(FormatError):
        loads_repertoire("\n".join(line for line in text.splitlines() if not line.startswith("# mode")))


def test_repertoire_rule_must_fit_machine():
    rule = MatchingRule("hamming", "01", 2, 0)
    text = dumps_repertoire(positive_select(["00"], rule))
    with pytest.raises(FormatError):
        loads_repertoire(text.replace("len=2", "len=3"))


def test_corrupted_repertoire():
    rule = MatchingRule("hamming", "01", 2, 0)
    text = dumps_repertoire(positive_select(["00", "01"], rule))
    corrupted = text.replace("final", "final 7\nfinal", 1)
    with pytest.raises((InvariantError, FormatError)):
        loads_repertoire(corrupted)


def test_weighted_positive_scores_add_over_training_sets():
    rule = MatchingRule("contiguous", "01", 5, 2)
    first, second = ["00000", "01010"], ["11100", "00000", "10001"]
    together = positive_select(first + second, rule, Mode.WEIGHTED)
    parts = positive_select(first, rule), positive_select(second, rule)
    for t in all_strings("01", 5):
        assert score(together, t) == score(parts[0], t) + score(parts[1], t)


def test_training_order_does_not_matter():
    rule = MatchingRule("hamming", "012", 3, 1)
    train = ["012", "210", "000", "012", "111"]
    for mode in Mode:
        assert positive_select(train, rule, mode).machine == positive_select(train[::-1], rule, mode).machine
        assert negative_select(train, rule, mode=mode).machine == negative_select(train[::-1], rule, mode=mode).machine


def test_weighted_scores_break_the_duality():
    rule = MatchingRule("contiguous", "01", 3, 2)
    train = ["000", "000", "011"]
    universe = all_strings("01", 3)
    pos = positive_select(train, rule, Mode.WEIGHTED)
    neg = negative_select(train, rule, mode=Mode.WEIGHTED)
    assert [score(pos, t) for t in universe] == [6, 4, 2, 3, 4, 4, 2, 2]
    assert [score(neg, t) for t in universe] == [0, 1, 1, 0, 1, 1, 1, 1]
    # positive selection calls 001 more normal than 011, negative selection calls it more anomalous
    assert score(pos, "001") > score(pos, "011")
    assert score(neg, "001") > score(neg, "011")
    assert tied_rank([score(pos, t) for t in universe]) != tied_rank([-score(neg, t) for t in universe])

    pos = positive_select(train, rule, Mode.UNWEIGHTED)
    neg = negative_select(train, rule, mode=Mode.UNWEIGHTED)
    assert [score(pos, t) for t in universe] == [3, 2, 2, 3, 2, 2, 2, 2]
    assert tied_rank([score(pos, t) for t in universe]) == tied_rank([-score(neg, t) for t in universe])


def full_grid_rules():
    for alphabet in ["01", "012"]:
        for length in range(1, 7):
            yield MatchingRule("wildcard", alphabet, length)
            for radius in range(1, length + 1):
                yield MatchingRule("contiguous", alphabet, length, radius)
            for radius in range(length + 1):
                yield MatchingRule("hamming", alphabet, length, radius)


@pytest.mark.slow
@pytest.mark.parametrize("rule", list(full_grid_rules()), ids=str)
def test_scores_equal_brute_force_on_full_grid(rule):
    rng = random.Random(rule.descriptor)
    universe = all_strings(rule.alphabet, rule.length)
    detector_set = all_strings(rule.detector_alphabet, rule.length)
    for _ in range(100):
        train = [rng.choice(universe) for _ in range(rng.randint(1, 3))]
        t = rng.choice(universe)
        hits = {d: sum(matches(rule, d, s) for s in train) for d in detector_set if matches(rule, d, t)}
        expected = {
            (Mode.WEIGHTED, Polarity.POSITIVE): sum(hits.values()),
            (Mode.UNWEIGHTED, Polarity.POSITIVE): sum(1 for h in hits.values() if h),
            (Mode.WEIGHTED, Polarity.NEGATIVE): sum(1 for h in hits.values() if not h),
            (Mode.UNWEIGHTED, Polarity.NEGATIVE): sum(1 for h in hits.values() if not h),
        }
        for mode in Mode:
            assert score(positive_select(train, rule, mode), t) == expected[mode, Polarity.POSITIVE]
            assert score(negative_select(train, rule, mode=mode), t) == expected[mode, Polarity.NEGATIVE]


@pytest.mark.parametrize("seed", [s if s < 3 else pytest.param(s, marks=pytest.mark.slow) for s in range(50)])
def test_unweighted_scores_add_up_for_random_training_sets(seed):
    rule = MatchingRule("contiguous", "01", 8, 5)
    universe = all_strings("01", 8)
    rng = random.Random(1000 + seed)
    train = [rng.choice(universe) for _ in range(rng.randint(1, 60))]
    pos = positive_select(train, rule, Mode.UNWEIGHTED)
    neg = negative_select(train, rule, mode=Mode.UNWEIGHTED)
    total = matched_set_size(rule)
    for t in rng.sample(universe, 40):
        assert score(pos, t) + score(neg, t) == total
