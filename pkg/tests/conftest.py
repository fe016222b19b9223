import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from cutrecon.circuit import parse_circuit  # noqa: E402
from cutrecon.harness import cascade_circuit  # noqa: E402

BELL = """\
qubits 2
h 0
cut 0 after 0
cx 0 1
"""

GHZ_CASCADE = """\
qubits 3
h 0
cx 0 1
cx 1 2
cut 0 after 0
cut 1 after 1
"""


@pytest.fixture
def bell():
    return parse_circuit(BELL)


@pytest.fixture
def ghz_cascade():
    return parse_circuit(GHZ_CASCADE)


def random_cascade(widths, seed, depth=None):
    return cascade_circuit(widths, depth, np.random.default_rng(seed))
