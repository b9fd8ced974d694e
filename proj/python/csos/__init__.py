"""Python access to the cyclic SOS engine.

`run` mirrors the command-line tool: it takes a subcommand and a config mapping
and returns the exit code together with the parsed report.
"""

import json

from ._csos import (  # noqa: F401
    REPORT_SCHEMA,
    SUBCOMMANDS,
    CsosError,
    bracket,
    partition_function,
    run_json,
    theta1,
)


def run(subcommand, config=None):
    code, text = run_json(subcommand, json.dumps(config or {}))
    return code, json.loads(text)


def as_complex(pair):
    """Reports store complex numbers as [re, im]."""
    return complex(pair[0], pair[1])
