from dataclasses import dataclass
from decimal import Decimal
import math

from asrscale.core.stages import DatasetSpec

SECONDS_PER_HOUR: int = 3600


@dataclass(frozen=True)
class TokenCounts:
    encoder_tokens: int
    llm_speech_tokens: int
    llm_text_tokens: int

    @property
    def llm_tokens(self) -> int:
        return self.llm_speech_tokens + self.llm_text_tokens


def _exact(value: float) -> Decimal:
    # the shortest repr keeps 0.1 h as exactly 360 s
    return Decimal(repr(float(value)))


def token_budget(dataset: DatasetSpec) -> TokenCounts:
    """
    Count the tokens each part of the model sees while training on a dataset.
    Products are evaluated in decimal and floored, so results do not depend
    on binary rounding.

    :param dataset: the dataset spec
    :returns: the TokenCounts
    """

    seconds: Decimal = _exact(dataset.hours) * SECONDS_PER_HOUR * _exact(dataset.epochs)

    encoder_tokens: int = math.floor(seconds * _exact(dataset.frame_rate))
    text_tokens: int = math.floor(seconds * _exact(dataset.text_tokens_per_second))

    return TokenCounts(encoder_tokens=encoder_tokens,
                       llm_speech_tokens=encoder_tokens // int(dataset.downsample),
                       llm_text_tokens=text_tokens)
