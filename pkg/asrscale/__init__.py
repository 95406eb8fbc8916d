"""
Training-cost and scaling analysis for multi-stage LLM-based speech
recognition: FLOPs estimation, CER scoring, power-law fitting and strategy
comparison
"""

from asrscale import config_manager
from asrscale.core import *  # noqa: F401,F403
from asrscale.flops import *  # noqa: F401,F403
from asrscale.metrics import *  # noqa: F401,F403
from asrscale.fitting import *  # noqa: F401,F403
from asrscale.analysis import *  # noqa: F401,F403
from asrscale.store import *  # noqa: F401,F403
