import pytest

from _corpus import JDM_A, JDM_C
from jdmchain.construct import construct_balanced
from jdmchain.enumeration import enumerate_balanced
from jdmchain.errors import FormatError
from jdmchain.formats import (
    format_jdm,
    format_realization,
    format_realizations,
    parse_jdm,
    parse_realization,
    parse_realizations,
)


def test_jdm_with_comments():
    text = "# instance\n1 2\n\n# rows\n0 2\n2 1\n"
    assert parse_jdm(text) == JDM_A


def test_jdm_round_trip():
    assert parse_jdm(format_jdm(JDM_C)) == JDM_C


@pytest.mark.parametrize(
    "text",
    ["", "1 2\n0 2\n", "1 2\n0 2\n2 x\n", "1 2\n0 2\n2 1\n5 5\n", "1 2\n0 1\n2 1\n", "2 1\n0 0\n0 0\n"],
)
def test_jdm_errors(text):
    with pytest.raises(FormatError):
        parse_jdm(text)


def test_realization_round_trip():
    G = construct_balanced(JDM_C)
    assert parse_realization(format_realization(G), G.degrees) == G
    # degrees inferred from the graph when not given
    assert parse_realization(format_realization(G)) == G


def test_many_round_trip():
    graphs = [s.realization for s in enumerate_balanced(JDM_C)]
    assert parse_realizations(format_realizations(graphs)) == graphs


def test_realization_text_layout():
    G = construct_balanced(JDM_A)
    lines = format_realization(G).splitlines()
    assert lines[:4] == ["v 0 0", "v 1 0", "v 2 1", "v 3 1"]
    assert all(ln.startswith("e ") for ln in lines[4:])


@pytest.mark.parametrize(
    "text",
    [
        "v 0 0\nv 2 0\n",
        "v 0 0\nv 1 0\ne 1 0\n",
        "v 0 0\nv 1 0\nx 0 1\n",
        "v 0 0\nv 1 z\n",
        "v 0 0\nv 1 0\ne 0 5\n",
    ],
)
def test_realization_errors(text):
    with pytest.raises(FormatError):
        parse_realization(text, (1,))


def test_expects_single_block():
    graphs = [s.realization for s in enumerate_balanced(JDM_A)]
    with pytest.raises(FormatError):
        parse_realization(format_realizations(graphs))
