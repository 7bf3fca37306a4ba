"""Error-and-erasure decoding of product and staircase codes.

Ternary-output channel quantization, BCH-family component codes with
bounded-distance and error-and-erasure decoders, density evolution on
(SC-)GLDPC ensembles, and Monte-Carlo simulation of iterative message
passing.
"""

__version__ = "0.1.0"
