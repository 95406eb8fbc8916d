# importing the library must not configure logging; run outside of pytest
# because pytest installs its own handlers on the root logger

import logging
from numpy.testing import assert_equal

import asrscale
import asrscale.cli
assert_equal(logging.root.level, 30)
assert_equal(logging.root.handlers, [])
