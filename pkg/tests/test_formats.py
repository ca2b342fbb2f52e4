import pytest
from hypothesis import given
from hypothesis import strategies as st

from almost_stable import formats
from almost_stable.core import Matching
from almost_stable.errors import InvalidMatching, NonMutualPreference, ParseError
from almost_stable.stable import gale_shapley
from helpers import instance_from_seed, sample_instance

SAMPLE_TEXT = """\
# two applicants, two posts
instance 2 2
a 1 : 1 2
a 2 : 1   # only B1
b 1 : 2 1
b 2 : 1
"""


def test_parse_sample_instance():
    assert formats.parse_instance(SAMPLE_TEXT) == sample_instance()


def test_empty_lists_allowed():
    inst = formats.parse_instance("instance 1 1\na 1 :\nb 1 :\n")
    assert inst.m == 0


@pytest.mark.parametrize(
    "text",
    [
        "",
        "instances 1 1\na 1 : 1\nb 1 : 1\n",
        "instance 1\na 1 : 1\nb 1 : 1\n",
        "instance 1 1\na 1 : 1\n",
        "instance 1 1\na 1 : 1\na 1 : 1\nb 1 : 1\n",
        "instance 1 1\na 2 : 1\nb 1 : 1\n",
        "instance 1 1\na 1 : x\nb 1 : 1\n",
        "instance 1 1\nc 1 : 1\nb 1 : 1\n",
        "instance 1 1\na 1 1\nb 1 : 1\n",
    ],
)
def test_malformed_instances(text):
    with pytest.raises(ParseError):
        formats.parse_instance(text)


def test_non_mutual_file():
    with pytest.raises(NonMutualPreference):
        formats.parse_instance("instance 1 1\na 1 : 1\nb 1 :\n")


def test_matching_parse_and_errors():
    inst = sample_instance()
    assert formats.parse_matching(inst, "# stable\n2 1\n\n1 2\n") == Matching(inst, [(2, 1), (1, 2)])
    with pytest.raises(ParseError):
        formats.parse_matching(inst, "1 2 3\n")
    with pytest.raises(InvalidMatching):
        formats.parse_matching(inst, "2 2\n")


@given(st.integers(0, 2**32 - 1))
def test_round_trip(seed):
    inst = instance_from_seed(seed, 7, 5, 4)
    again = formats.parse_instance(formats.format_instance(inst))
    assert again == inst
    mu = gale_shapley(inst)
    assert formats.parse_matching(again, formats.format_matching(mu)) == mu


def test_file_helpers(tmp_path):
    inst = sample_instance()
    formats.write_instance(tmp_path / "x.asm", inst)
    assert formats.read_instance(tmp_path / "x.asm") == inst
    mu = gale_shapley(inst)
    formats.write_matching(tmp_path / "x.matching", mu)
    assert formats.read_matching(tmp_path / "x.matching", inst) == mu
