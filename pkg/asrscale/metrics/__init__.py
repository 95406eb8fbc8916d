from .normalize import normalize_text
from .cer import (
    CerReport, TestSetScore, UtterancePair, average_cer, corpus_cer,
    corpus_report, edit_distance, pairwise_edit_distance, read_transcripts,
    relative_reduction, round_half_up, score_transcripts
)
