"""Minimal-pair syntactic evaluation toolkit.

Generates condition-paired sentence datasets from paradigm grammars, applies
word-order perturbations to corpora while holding token counts fixed, scores
probability backends on grammaticality-preference criteria, and tracks
validation-perplexity learning curves.
"""

__version__ = "0.1.0"
