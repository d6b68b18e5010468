"""LOCAL-model laboratory for list (arb)defective coloring in graphs of bounded neighborhood independence."""

__version__ = "0.1.0"
