"""Tests for sweep table output formats."""

import dataclasses
import json

import pytest

from producer_scrounger import (
    ConfigError,
    EssClassification,
    Linear,
    SweepTable,
    company_family,
    foraging_family,
    sweep,
)
from producer_scrounger.export import format_output, parse_output


@pytest.fixture(scope="module")
def table():
    # includes one Degenerate row at gamma0
    return sweep(company_family(2, 0.7, c=0.25, utility=Linear()), 0.0, 3.0, 0.01)


@pytest.fixture(scope="module")
def two_block_table():
    rows = []
    for s in (0.2, 0.4):
        block = sweep(foraging_family(4, s), 0.0, 2.0, 0.1)
        rows.extend(dataclasses.replace(row, second=s) for row in block)
    return SweepTable(rows=tuple(rows), metadata={"game": "foraging over s"}, second_name="s")


class TestFormatOutput:
    """Test rendering to text."""

    def test_csv_header_line(self, table):
        first, second = format_output(table, "csv").splitlines()[:2]
        assert first.startswith("# {")
        assert json.loads(first[2:])["game"] == table.metadata["game"]
        assert second == "gamma,p_star,pi_star,total_production,classification"

    def test_csv_degenerate_row_is_empty(self, table):
        lines = format_output(table, "csv").splitlines()
        assert any(line.endswith(",,,,Degenerate") for line in lines)

    def test_json_layout(self, table):
        data = json.loads(format_output(table, "json"))
        assert set(data) == {"metadata", "rows"}
        assert len(data["rows"]) == len(table)
        assert data["rows"][0]["classification"] == "AllScrounger"

    def test_markdown(self, table):
        text = format_output(table, "markdown")
        assert text.startswith(f"## {table.metadata['game']}")
        assert "| gamma" in text

    def test_second_axis_column(self, two_block_table):
        header = format_output(two_block_table, "csv").splitlines()[1]
        assert header == "gamma,s,p_star,pi_star,total_production,classification"

    def test_unknown_format(self, table):
        with pytest.raises(ConfigError, match="Unknown format"):
            format_output(table, "xml")


class TestParseOutput:
    """Test reading emitted tables back."""

    @pytest.mark.parametrize("fmt", ["csv", "json"])
    def test_exact_round_trip(self, table, fmt):
        parsed = parse_output(format_output(table, fmt), fmt)
        assert parsed.rows == table.rows
        assert parsed.metadata == json.loads(json.dumps(table.metadata))

    @pytest.mark.parametrize("fmt", ["csv", "json"])
    def test_second_axis_round_trip(self, two_block_table, fmt):
        parsed = parse_output(format_output(two_block_table, fmt), fmt)
        assert parsed.second_name == "s"
        assert parsed.rows == two_block_table.rows
        assert [len(b) for b in parsed.blocks()] == [21, 21]

    def test_degenerate_row_survives(self, table):
        parsed = parse_output(format_output(table, "csv"), "csv")
        degenerate = [r for r in parsed if r.classification is EssClassification.DEGENERATE]
        assert len(degenerate) == 1 and degenerate[0].p_star is None

    def test_csv_needs_metadata_line(self):
        with pytest.raises(ConfigError):
            parse_output("gamma,p_star\n0.0,1.0\n", "csv")

    def test_markdown_is_write_only(self, table):
        with pytest.raises(ConfigError):
            parse_output(format_output(table, "markdown"), "markdown")
