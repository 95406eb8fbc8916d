from typing import Optional
import unicodedata

import jiwer

import asrscale.config_manager as cm

_strip_whitespace = jiwer.RemoveWhiteSpace(replace_by_space=False)
_strip_punctuation = jiwer.RemovePunctuation()


def normalize_text(text: str, keep_punctuation: Optional[bool] = None) -> str:
    """
    Prepare a transcript for character scoring: NFKC compatibility
    normalization, then removal of all whitespace and, optionally, of
    punctuation

    :param text: the raw transcript
    :param keep_punctuation: defaults to the KEEP_PUNCTUATION setting
    :returns: the normalized character string
    """

    if keep_punctuation is None:
        keep_punctuation = cm.get("KEEP_PUNCTUATION")

    # NFKC folds full-width and ideographic spaces into ASCII ones first
    normalized: str = unicodedata.normalize("NFKC", text)
    if not keep_punctuation:
        normalized = _strip_punctuation(normalized)

    # jiwer only knows ASCII whitespace; drop any remaining Unicode separators too
    normalized = _strip_whitespace(normalized)
    return "".join(c for c in normalized if not c.isspace())
