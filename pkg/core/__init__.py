"""
Core Module

Networks, classical flows and cuts, tensor contraction and rank. The
estimators live in core.qmf, core.entropy and core.qsat.
"""

from .errors import QMaxFlowError
from .netgraph import Network, parse_network, serialize_network
from .flow import max_flow, min_product_cut, quantum_min_cut
from .tensor import ComplexFloat, PrimeField, contract, random_assignment

__all__ = [
    'QMaxFlowError',
    'Network',
    'parse_network',
    'serialize_network',
    'max_flow',
    'min_product_cut',
    'quantum_min_cut',
    'ComplexFloat',
    'PrimeField',
    'contract',
    'random_assignment',
]
