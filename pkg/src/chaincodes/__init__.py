"""Chain complexes over Z_q, the CSS codes they carry, and exact desk-size checks.

Modules: ``ringlin`` (sparse linear algebra), ``graphs``, ``chain``
(complexes and products), ``codes``, ``pauli``/``stabsim`` (Clifford
simulation), ``toric``, ``statmech`` and the ``cli``.
"""

from __future__ import annotations

from .chain import ChainComplex, betti, graph_complex, power, tensor_product
from .codes import CssCode, code_params, extract_code
from .graphs import Graph, named_graph
from .ringlin import SparseMat, rank_mod_p

__all__ = [
    "ChainComplex", "CssCode", "Graph", "SparseMat",
    "betti", "code_params", "extract_code", "graph_complex", "named_graph",
    "power", "rank_mod_p", "tensor_product",
]
