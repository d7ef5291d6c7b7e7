import json
import os
import subprocess
import sys

import pytest

import musielak as mk


@pytest.fixture(scope="session")
def families():
    """The structural families exercised across the suite."""
    return {
        "p2": mk.variable_exponent(("constant", 2.0)),
        "p3": mk.variable_exponent(("constant", 3.0)),
        "cos": mk.variable_exponent(("cosine", 2.5, 0.4, 1.0)),
        "orlicz": mk.orlicz(q=2.0),
        "prod": mk.product(("cosine", 2.2, 0.2, 1.0)),
    }


@pytest.fixture(scope="session")
def corpus_spec():
    return mk.GridSpec((-3.05,), (1.05,), 257)


@pytest.fixture(scope="session")
def corpus(corpus_spec):
    """Compactly supported test functions on a common grid."""
    return {
        "tent": mk.sample(mk.tent(center=-1.0), corpus_spec),
        "tent_shift": mk.sample(mk.tent(center=-1.5, halfwidth=0.8),
                                corpus_spec),
        "bump": mk.sample(mk.bump(center=-1.0, radius=0.9), corpus_spec),
        "window": mk.sample(mk.windowed_constant(-1.5, -0.5, value=2.0),
                            corpus_spec),
    }


def run_cli(args, cwd=None):
    """Run the CLI in a subprocess; returns (exit_code, stdout, stderr)."""
    proc = subprocess.run(
        [sys.executable, "-m", "musielak.cli"] + [str(a) for a in args],
        capture_output=True, text=True, cwd=cwd,
    )
    return proc.returncode, proc.stdout, proc.stderr


def write_config(path, payload):
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh)
    return os.fspath(path)
