"""Sketching protocol for exact small edit distance.

Two parties independently compress their strings into sketches of size
growing like k^3 (up to log factors); a referee recovers the exact edit
distance and an optimal edit script whenever ed(x, y) <= k, and otherwise
reports an error.
"""

from ._kernel import BACKEND
from .protocol import (
    ErrorReport,
    FullSketch,
    ProtocolParams,
    Result,
    Verdict,
    default_tau,
    encode_party,
    referee_decode,
)
from .strings import (
    Alphabet,
    EditOp,
    EditScript,
    InputString,
    InvalidScriptError,
    Matching,
    OpKind,
    apply_script,
    edit_distance,
    greedy_optimal_matching,
    read_string_file,
    write_string_file,
)

__version__ = "1.0.0"

__all__ = [
    "Alphabet",
    "BACKEND",
    "EditOp",
    "EditScript",
    "ErrorReport",
    "FullSketch",
    "InputString",
    "InvalidScriptError",
    "Matching",
    "OpKind",
    "ProtocolParams",
    "Result",
    "Verdict",
    "apply_script",
    "default_tau",
    "edit_distance",
    "encode_party",
    "greedy_optimal_matching",
    "read_string_file",
    "referee_decode",
    "write_string_file",
    "__version__",
]
