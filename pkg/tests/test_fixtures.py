import json
from pathlib import Path

import pytest

from modfactor.cli import main

FIXTURES = Path(__file__).parent / "fixtures"
MANIFEST = json.loads((FIXTURES / "manifest.json").read_text())
POSITIVE = [e for e in MANIFEST if e["exit"] == 0]
NEGATIVE = [e for e in MANIFEST if e["exit"] != 0]


def label(entry):
    return f"{entry['command']}:{Path(entry['file']).stem}"


def run(capsys, entry):
    code = main([entry["command"], str(FIXTURES / entry["file"])])
    return code, capsys.readouterr().out


def test_corpus_size():
    assert len({e["file"] for e in NEGATIVE}) >= 10
    assert all(e["file"].startswith("negative/") for e in NEGATIVE)
    assert all(e["file"].startswith("positive/") for e in POSITIVE)


@pytest.mark.parametrize("entry", NEGATIVE, ids=label)
def test_negative_fixture_fails(capsys, entry):
    code, out = run(capsys, entry)
    assert code == 1
    assert json.loads(out)["pass"] is False


@pytest.mark.parametrize("entry", POSITIVE, ids=label)
def test_positive_fixture_is_bit_stable(capsys, entry):
    first = run(capsys, entry)
    second = run(capsys, entry)
    assert first[0] == 0, first[1]
    assert first == second
