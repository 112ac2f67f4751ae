"""Conversational machine-learning workbench.

English commands drive classic ML algorithms through a slot-filling
interpreter; every run is measured for duration and CO2 emissions, gated
on a footprint forecast, and documented with an explanation bundle of
plots, tables and LaTeX snippets.
"""

__version__ = "0.1.0"

from .interpreter import (
    Answer,
    CommandFrame,
    RegistryError,
    SlotRegistry,
    SlotRule,
    answer_boolean,
    answer_span,
    default_registry,
    interpret,
    load_registry,
    resolve_key,
    resolve_key_trace,
)
