"""Multilingual extraction pipeline and exploration service for document collections.

The package is organised as a chain: readers turn raw files into unified
documents (`ingest`), per-document annotators add typed spans (`segment`,
`langid`, `patterns`, `temporal`, `entities`, `keyterms`), an embedded index
persists and queries the results (`index`), and the network/graph layer plus
the HTTP service (`graphs`, `api`) drive the interactive exploration UI.
"""

__version__ = "0.1.0"
