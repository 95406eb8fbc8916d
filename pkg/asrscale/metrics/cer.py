from dataclasses import dataclass
from decimal import ROUND_HALF_UP, Decimal
import logging
from pathlib import Path
from typing import Dict, Hashable, List, Optional, Sequence, Union

import numpy as np

import asrscale.config_manager as cm
from asrscale.core.errors import ParseError, UndefinedMetricError

from .normalize import normalize_text

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class UtterancePair:
    reference: str
    hypothesis: str
    allow_empty_reference: bool = False

    def __post_init__(self):
        if len(self.reference) == 0 and not self.allow_empty_reference:
            raise UndefinedMetricError("Empty reference; pass allow_empty_reference=True to score it")

    @staticmethod
    def from_text(reference: str, hypothesis: str, keep_punctuation: Optional[bool] = None,
                  allow_empty_reference: bool = False) -> "UtterancePair":
        return UtterancePair(normalize_text(reference, keep_punctuation),
                             normalize_text(hypothesis, keep_punctuation),
                             allow_empty_reference)


@dataclass(frozen=True)
class TestSetScore:
    set_name: str
    cer: float

    # not a test class, despite the name
    __test__ = False

    def __post_init__(self):
        if not self.cer >= 0:
            raise ValueError(f"CER for {self.set_name} must be non-negative, got {self.cer}")


def _encode(seqs: Sequence[Sequence[Hashable]], codes: Dict[Hashable, int], pad: int) -> np.ndarray:
    width: int = max((len(s) for s in seqs), default=0)
    out = np.full((len(seqs), width), pad, dtype=np.int64)
    for row, s in enumerate(seqs):
        if len(s):
            out[row, :len(s)] = [codes.setdefault(c, len(codes)) for c in s]

    return out


def pairwise_edit_distance(references: Sequence[Sequence[Hashable]],
                           hypotheses: Sequence[Sequence[Hashable]]) -> np.ndarray:
    """
    Levenshtein distances (unit insertion, deletion, substitution costs)
    for many pairs at once. The dynamic program runs row by row over all
    pairs together; within a row, insertions are resolved with a running
    minimum instead of a Python loop.

    :param references: the reference sequences
    :param hypotheses: the hypothesis sequences, same length as references
    :returns: an int64 array of distances
    """

    if len(references) != len(hypotheses):
        raise ValueError(f"Got {len(references)} references but {len(hypotheses)} hypotheses")

    n: int = len(references)
    if n == 0:
        return np.zeros(0, dtype=np.int64)

    codes: Dict[Hashable, int] = {}
    ref = _encode(references, codes, -1)
    hyp = _encode(hypotheses, codes, -2)

    ref_len = np.array([len(s) for s in references], dtype=np.int64)
    hyp_len = np.array([len(s) for s in hypotheses], dtype=np.int64)
    cols = np.arange(hyp.shape[1] + 1, dtype=np.int64)

    result = np.empty(n, dtype=np.int64)
    prev = np.broadcast_to(cols, (n, cols.size)).copy()

    done = ref_len == 0
    result[done] = hyp_len[done]

    for i in range(1, ref.shape[1] + 1):
        substitution = prev[:, :-1] + (ref[:, i - 1:i] != hyp)
        deletion = prev[:, 1:] + 1

        base = np.empty_like(prev)
        base[:, 0] = i
        base[:, 1:] = np.minimum(substitution, deletion)

        # cur[j] = min over k <= j of base[k] + (j - k)
        prev = np.minimum.accumulate(base - cols, axis=1) + cols

        finished = ref_len == i
        result[finished] = prev[finished, hyp_len[finished]]

    return result


def edit_distance(reference: Sequence[Hashable], hypothesis: Sequence[Hashable]) -> int:
    """
    Minimal number of single-character insertions, deletions and
    substitutions turning reference into hypothesis

    :param reference: the reference characters
    :param hypothesis: the hypothesis characters
    :returns: the distance
    """

    return int(pairwise_edit_distance([reference], [hypothesis])[0])


@dataclass(frozen=True)
class CerReport:
    cer: float
    edits: int
    reference_chars: int
    utterances: int


def corpus_report(pairs: Sequence[UtterancePair]) -> CerReport:
    reference_chars: int = sum(len(p.reference) for p in pairs)
    if reference_chars == 0:
        raise UndefinedMetricError("CER is undefined: total reference length is 0")

    distances = pairwise_edit_distance([p.reference for p in pairs], [p.hypothesis for p in pairs])
    edits: int = int(distances.sum())

    return CerReport(edits / reference_chars, edits, reference_chars, len(pairs))


def corpus_cer(pairs: Sequence[UtterancePair]) -> float:
    """
    Corpus-level CER: total edits over total reference characters

    :param pairs: the scored utterances, already normalized
    :returns: the CER as a fraction (not a percentage)
    """

    return corpus_report(pairs).cer


def average_cer(scores: Sequence[TestSetScore]) -> float:
    """
    Arithmetic mean of per-test-set CERs. The mean is taken over the decimal
    values as written, so 8.225 stays 8.225 for half-up display rounding.

    :param scores: one score per test set
    :returns: the unrounded mean, in percent
    """

    if len(scores) == 0:
        raise UndefinedMetricError("Cannot average an empty list of scores")

    total: Decimal = sum((Decimal(repr(float(s.cer))) for s in scores), Decimal(0))
    return float(total / len(scores))


def round_half_up(value: float, decimals: Optional[int] = None) -> float:
    """
    Round for display the way the result tables do: half away from zero on
    the shortest decimal representation of the value

    :param value: the value
    :param decimals: digits after the point, defaults to CER_DECIMALS
    :returns: the rounded value
    """

    if decimals is None:
        decimals = cm.get("CER_DECIMALS")

    quantum = Decimal(1).scaleb(-decimals)
    return float(Decimal(repr(float(value))).quantize(quantum, rounding=ROUND_HALF_UP))


def relative_reduction(baseline: float, improved: float) -> float:
    """
    Relative error reduction (CERR) of improved against baseline

    :param baseline: the baseline CER, must be positive
    :param improved: the compared CER
    :returns: (baseline - improved) / baseline, negative when improved is worse
    """

    if not baseline > 0:
        raise UndefinedMetricError(f"Relative reduction needs a positive baseline, got {baseline}")

    return (baseline - improved) / baseline


def read_transcripts(path: Union[str, Path]) -> Dict[str, str]:
    """
    Read a two-column UTF-8 TSV of utterance id and text

    :param path: the TSV file
    :returns: a dict from utterance id to text
    """

    transcripts: Dict[str, str] = {}
    with open(path, "r", encoding="utf-8") as f:
        for lineno, line in enumerate(f, start=1):
            line = line.rstrip("\r\n")
            if not line.strip():
                continue

            utt_id, sep, text = line.partition("\t")
            utt_id = utt_id.strip()
            # an id alone is an empty transcript; an id followed by spaces is a missing tab
            if not sep and len(utt_id.split()) > 1:
                raise ParseError("expected '<utterance id>\\t<text>'", lineno)
            if "\t" in text:
                raise ParseError("expected exactly two tab-separated columns", lineno)
            if utt_id in transcripts:
                raise ParseError(f"duplicate utterance id '{utt_id}'", lineno)
            transcripts[utt_id] = text

    return transcripts


def score_transcripts(references: Dict[str, str], hypotheses: Dict[str, str],
                      keep_punctuation: Optional[bool] = None, strict: bool = True) -> CerReport:
    """
    Join references and hypotheses on utterance id and score the corpus

    :param references: id -> reference text
    :param hypotheses: id -> hypothesis text
    :param keep_punctuation: passed to normalize_text
    :param strict: whether unmatched ids are an error; otherwise they are skipped with a warning
    :returns: the CerReport
    """

    missing: List[str] = sorted(set(references) - set(hypotheses))
    extra: List[str] = sorted(set(hypotheses) - set(references))
    if missing or extra:
        message: str = f"unmatched utterance ids: missing hypotheses {missing[:10]}, unknown hypotheses {extra[:10]}"
        if strict:
            raise ParseError(message)
        logger.warning(message)

    pairs: List[UtterancePair] = [
        UtterancePair.from_text(references[k], hypotheses[k], keep_punctuation, allow_empty_reference=True)
        for k in references if k in hypotheses
    ]

    return corpus_report(pairs)
