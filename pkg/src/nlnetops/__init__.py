"""nlnetops: natural-language network management over property graphs.

A network copilot and benchmark harness: operator queries are turned into
programs by a language model, executed in a sandbox against graph state, and
judged against expert golden answers.
"""

__version__ = "0.1.0"
