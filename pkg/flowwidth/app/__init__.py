"""flowwidth: quantitative information-flow analysis of interactive transducers."""

__version__ = "0.1.0"
