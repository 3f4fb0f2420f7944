"""Executable encodings of the case studies, with independent oracles.

Run every shipped case with ``python3 -m portrewrite.corpus.runner``.
"""
