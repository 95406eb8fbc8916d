from itertools import product
import logging
import os
import tempfile
import unittest

import jiwer
import numpy as np
import pytest
from numpy.testing import assert_allclose, assert_array_equal

from asrscale.core import ParseError, UndefinedMetricError
from asrscale.metrics import (
    TestSetScore, UtterancePair, average_cer, corpus_cer, corpus_report,
    edit_distance, normalize_text, pairwise_edit_distance, read_transcripts,
    relative_reduction, round_half_up, score_transcripts
)
from asrscale.store import load_fixtures

ALPHABET = "abc"

# the AVG column as printed, in fixture row order
TABLE3_AVG = [
    20.86, 20.60, 18.41, 17.80,
    13.85, 12.12, 11.35, 11.31,
    15.78, 12.08, 11.64, 10.43,
    11.03, 10.46, 10.02, 9.86,
    9.32, 8.63, 8.35, 8.23,
    15.18, 12.28, 10.50, 10.41,
]


def all_strings(max_len: int):
    return ["".join(p) for n in range(max_len + 1) for p in product(ALPHABET, repeat=n)]


def one_edit_neighbours(s: str):
    for i in range(len(s)):
        yield s[:i] + s[i + 1:]
        for c in ALPHABET:
            if c != s[i]:
                yield s[:i] + c + s[i + 1:]
    for i in range(len(s) + 1):
        for c in ALPHABET:
            yield s[:i] + c + s[i:]


def exhaustive_distances(strings):
    """
    All-pairs shortest paths in the single-edit graph restricted to the
    given strings, one breadth-first level per matrix product
    """

    index = {s: i for i, s in enumerate(strings)}
    n = len(strings)
    adjacency = np.zeros((n, n), dtype=np.float32)
    for s, i in index.items():
        for t in one_edit_neighbours(s):
            if t in index:
                adjacency[i, index[t]] = 1.0

    distance = np.full((n, n), -1, dtype=np.int64)
    reached = np.eye(n, dtype=bool)
    distance[reached] = 0
    for level in range(1, max(len(s) for s in strings) + 1):
        grown = (reached.astype(np.float32) @ adjacency > 0) | reached
        distance[grown & ~reached] = level
        reached = grown

    return distance


def test_edit_distance_matches_exhaustive_search():
    strings = all_strings(6)
    assert len(strings) == 1093
    oracle = exhaustive_distances(strings)
    assert (oracle >= 0).all()

    for i, ref in enumerate(strings):
        got = pairwise_edit_distance([ref] * len(strings), strings)
        assert_array_equal(got, oracle[i], err_msg=f"reference {ref!r}")


@pytest.mark.parametrize("ref, hyp, expected", [
    ("abc", "abc", 0),
    ("", "ab", 2),
    ("ab", "", 2),
    ("kitten", "sitting", 3),
    ("今天天气很好", "今天天很好啊", 2),
])
def test_edit_distance_examples(ref, hyp, expected):
    assert edit_distance(ref, hyp) == expected
    assert edit_distance(hyp, ref) == expected


def test_edit_distance_properties():
    rng = np.random.default_rng(3)
    strings = ["".join(rng.choice(list("abcd"), size=int(rng.integers(0, 12)))) for _ in range(60)]
    for a in strings:
        for b in strings[:20]:
            d = edit_distance(a, b)
            assert abs(len(a) - len(b)) <= d <= max(len(a), len(b))
            assert (d == 0) == (a == b)
            for c in strings[:5]:
                assert d <= edit_distance(a, c) + edit_distance(c, b)


class TestCorpusCer(unittest.TestCase):
    def test_identical(self):
        self.assertEqual(corpus_cer([UtterancePair("abc", "abc"), UtterancePair("de", "de")]), 0.0)

    def test_one_substitution(self):
        self.assertEqual(corpus_cer([UtterancePair("abcd", "abed")]), 0.25)

    def test_pooled(self):
        assert_allclose(corpus_cer([UtterancePair("ab", "ab"), UtterancePair("abcd", "bcd")]), 1 / 6)

    def test_empty_reference(self):
        with self.assertRaises(UndefinedMetricError):
            UtterancePair("", "abc")
        with self.assertRaises(UndefinedMetricError):
            corpus_cer([UtterancePair("", "abc", allow_empty_reference=True)])

    def test_report(self):
        report = corpus_report([UtterancePair("abcd", "abed"), UtterancePair("xy", "x")])
        self.assertEqual((report.edits, report.reference_chars, report.utterances), (2, 6, 2))

    def test_order_invariant_and_matches_jiwer(self):
        rng = np.random.default_rng(4)
        chars = list("我们今天去北京天气很好")
        refs = ["".join(rng.choice(chars, size=int(rng.integers(1, 15)))) for _ in range(200)]
        hyps = ["".join(rng.choice(chars, size=int(rng.integers(1, 15)))) for _ in range(200)]
        pairs = [UtterancePair(r, h) for r, h in zip(refs, hyps)]

        value = corpus_cer(pairs)
        assert_allclose(value, corpus_cer(pairs[::-1]), rtol=1e-15)
        assert_allclose(value, jiwer.cer(refs, hyps), rtol=1e-12)


@pytest.mark.parametrize("scores, expected", [
    ((18.76, 16.84), 17.80),
    ((9.45, 7.00), 8.23),
    ((5.0,), 5.0),
])
def test_average_cer(scores, expected):
    value = average_cer([TestSetScore(f"set{i}", s) for i, s in enumerate(scores)])
    assert round_half_up(value, 2) == expected


def test_average_cer_is_not_rounded():
    assert average_cer([TestSetScore("a", 9.45), TestSetScore("b", 7.00)]) == 8.225


def test_average_of_equal_scores():
    assert average_cer([TestSetScore(str(i), 7.31) for i in range(5)]) == 7.31


def test_average_empty():
    with pytest.raises(UndefinedMetricError):
        average_cer([])


def test_table3_avg_column():
    records = load_fixtures(3)
    assert [round_half_up(average_cer(r.scores), 2) for r in records] == TABLE3_AVG


@pytest.mark.parametrize("value, decimals, expected", [
    (8.225, 2, 8.23),
    (10.425, 2, 10.43),
    (2.675, 2, 2.68),
    (0.49957, 3, 0.5),
    (-1.25, 1, -1.3),
])
def test_round_half_up(value, decimals, expected):
    assert round_half_up(value, decimals) == expected


@pytest.mark.parametrize("baseline, improved, expected", [
    (10.43, 8.23, 0.2109),
    (17.80, 8.23, 0.5376),
    (8.0, 8.0, 0.0),
    (8.0, 10.0, -0.25),
])
def test_relative_reduction(baseline, improved, expected):
    assert_allclose(relative_reduction(baseline, improved), expected, atol=1e-4)


def test_relative_reduction_needs_positive_baseline():
    with pytest.raises(UndefinedMetricError):
        relative_reduction(0.0, 1.0)


def test_negative_cer_rejected():
    with pytest.raises(ValueError):
        TestSetScore("TEST-NET", -0.1)


@pytest.mark.parametrize("text, keep, expected", [
    ("今天 天气\t很好\n", True, "今天天气很好"),
    ("ＡＢＣ　ｄ", True, "ABCd"),
    ("你好，世界！", True, "你好,世界!"),
    ("你好，世界！", False, "你好世界"),
    ("a b c", True, "abc"),
])
def test_normalize_text(text, keep, expected):
    assert normalize_text(text, keep) == expected


class TestTranscripts(unittest.TestCase):
    def setUp(self):
        self.dir = tempfile.TemporaryDirectory()
        self.addCleanup(self.dir.cleanup)

    def write(self, name: str, text: str) -> str:
        path = os.path.join(self.dir.name, name)
        with open(path, "w", encoding="utf-8") as f:
            f.write(text)
        return path

    def test_score(self):
        ref = read_transcripts(self.write("ref.tsv", "u1\t今天 天气\nu2\t很好\n"))
        hyp = read_transcripts(self.write("hyp.tsv", "u2\t很好\nu1\t今天天汽\n"))
        report = score_transcripts(ref, hyp)
        self.assertEqual((report.edits, report.reference_chars), (1, 6))

    def test_missing_tab(self):
        with self.assertRaises(ParseError) as ctx:
            read_transcripts(self.write("bad.tsv", "u1\tok\nu2 no tab here\n"))
        self.assertEqual(ctx.exception.line, 2)

    def test_duplicate_id(self):
        with self.assertRaises(ParseError) as ctx:
            read_transcripts(self.write("dup.tsv", "u1\ta\n\nu1\tb\n"))
        self.assertEqual(ctx.exception.line, 3)

    def test_unmatched_ids(self):
        ref = {"u1": "abc", "u2": "de"}
        hyp = {"u1": "abc"}
        with self.assertRaises(ParseError):
            score_transcripts(ref, hyp)
        with self.assertLogs("asrscale.metrics.cer", level=logging.WARNING):
            report = score_transcripts(ref, hyp, strict=False)
        self.assertEqual(report.reference_chars, 3)
