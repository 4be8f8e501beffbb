"""PAC-private SQL over in-memory tables."""

from ._core import (
    DEFAULT_MI,
    Database,
    PacError,
    gen_values,
    mia_bound,
    mini_tpch_ddl,
    pac_hash,
)

__all__ = [
    "DEFAULT_MI",
    "Database",
    "PacError",
    "gen_values",
    "mia_bound",
    "mini_tpch_ddl",
    "pac_hash",
]
