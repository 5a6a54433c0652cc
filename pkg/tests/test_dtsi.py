import pytest

from ssi.dtsi import dtsi_find, list_compatibles, parse_dtsi, parse_dtsi_text
from ssi.errors import DtsiNotFound, UnbalancedDelimiter

from conftest import EXAMPLE_DIR

FIXTURE = EXAMPLE_DIR / "bcm283x.dtsi"

CHOOSER_FIXTURE = """\
gpio: gpio@7e200000 {
	compatible = "brcm,bcm2835-gpio", "brcm,bcm2711-gpio", "brcm,bcm7211-gpio";
	reg = <0x7e200000 0xb4>;
};
"""


def write(tmp_path, text, name="t.dtsi"):
    p = tmp_path / name
    p.write_text(text)
    return p


def test_parse_fixture_finds_gpio_node():
    root = parse_dtsi(FIXTURE)
    nodes = [n for n in root.walk() if "brcm,bcm2835-gpio" in n.compatibles()]
    assert len(nodes) == 1
    node = nodes[0]
    assert node.label == "gpio"
    assert node.name == "gpio@7e200000"
    assert node.properties["reg"] == [0x7E200000, 0xB4]
    assert node.properties["gpio-controller"] is None  # boolean property


def test_empty_file(tmp_path):
    root = parse_dtsi(write(tmp_path, ""))
    assert root.children == []
    assert list_compatibles(write(tmp_path, "", "e.dtsi")) == []


def test_three_compatibles_all_retained(tmp_path):
    # Oracle: hand parse of the six-line chooser fixture; one node, three
    # compatible strings in written order.
    path = write(tmp_path, CHOOSER_FIXTURE)
    root = parse_dtsi(path)
    assert len(root.children) == 1
    assert root.children[0].compatibles() == [
        "brcm,bcm2835-gpio", "brcm,bcm2711-gpio", "brcm,bcm7211-gpio"]


def test_dtsi_find_fixture_values():
    assert dtsi_find(FIXTURE, "brcm,bcm2835-gpio") == (0x7E200000, 0xB4)
    assert dtsi_find(FIXTURE, "brcm,bcm2711-gpio") == (0x7E200000, 0xB4)


def test_dtsi_find_missing():
    with pytest.raises(DtsiNotFound):
        dtsi_find(FIXTURE, "brcm,no-such-device")


def test_reg_with_four_cells_takes_first_pair(tmp_path):
    # Oracle: manual cell split; with the default one-cell address and size,
    # reg = <1 2 3 4> yields base 1 and size 2.
    path = write(tmp_path, 'n { compatible = "x"; reg = <1 2 3 4>; };')
    assert dtsi_find(path, "x") == (1, 2)


def test_reg_honors_parent_cell_counts(tmp_path):
    path = write(tmp_path, """
parent {
	#address-cells = <2>;
	#size-cells = <1>;
	child {
		compatible = "wide";
		reg = <0x1 0x2 0x30>;
	};
};
""")
    assert dtsi_find(path, "wide") == ((0x1 << 32) | 0x2, 0x30)


def test_list_compatibles_order_and_dedup(tmp_path):
    path = write(tmp_path, """
a { compatible = "one", "two"; };
b { compatible = "two", "three"; };
""")
    assert list_compatibles(path) == ["one", "two", "three"]


def test_chooser_menu_order():
    assert list_compatibles(FIXTURE) == [
        "brcm,bcm2835-gpio", "brcm,bcm2711-gpio", "brcm,bcm7211-gpio"]


def test_unknown_constructs_skipped(tmp_path):
    path = write(tmp_path, """
/dts-v1/;
/include/ "other.dtsi"
n {
	compatible = "x";
	reg = <0x10 0x4>;
	interrupt-parent = <&gic>;
	some-bytes = [de ad];
};
""")
    assert dtsi_find(path, "x") == (0x10, 0x4)


def test_unbalanced_brace_raises():
    with pytest.raises(UnbalancedDelimiter):
        parse_dtsi_text('n { compatible = "x";')


def test_find_independent_of_siblings(tmp_path):
    lone = write(tmp_path, 'n { compatible = "x"; reg = <5 6>; };', "a.dtsi")
    crowded = write(tmp_path, """
other { compatible = "y"; reg = <1 1>; };
n { compatible = "x"; reg = <5 6>; };
more { reg = <9 9>; };
""", "b.dtsi")
    assert dtsi_find(lone, "x") == dtsi_find(crowded, "x") == (5, 6)


def test_comments_and_strings_with_braces(tmp_path):
    path = write(tmp_path, """
/* a comment with { braces } */
n {
	// line comment }
	compatible = "with { brace";
	reg = <1 2>;
};
""")
    assert dtsi_find(path, "with { brace") == (1, 2)
