from __future__ import annotations

import numpy as np
import pytest

from chaincodes.chain import graph_complex, power
from chaincodes.codes import extract_code
from chaincodes.graphs import named_graph


@pytest.fixture(scope="session")
def torus():
    """cycle(3) squared over F_2: the 3x3 toric-code complex."""
    return power(graph_complex(named_graph("cycle(3)"), 2), 2)


@pytest.fixture(scope="session")
def torus_code(torus):
    return extract_code(torus, 1)


@pytest.fixture(scope="session")
def k4sq():
    return power(graph_complex(named_graph("k4"), 2), 2)


@pytest.fixture(scope="session")
def petersen_sq():
    return power(graph_complex(named_graph("petersen"), 2), 2)


def dense_rank(a, p: int) -> int:
    """Textbook Gaussian elimination mod p, written independently of the package."""
    a = np.array(a, dtype=np.int64) % p
    r = 0
    for c in range(a.shape[1]):
        piv = next((i for i in range(r, a.shape[0]) if a[i, c]), None)
        if piv is None:
            continue
        a[[r, piv]] = a[[piv, r]]
        a[r] = a[r] * pow(int(a[r, c]), -1, p) % p
        for i in range(a.shape[0]):
            if i != r and a[i, c]:
                a[i] = (a[i] - a[i, c] * a[r]) % p
        r += 1
    return r
