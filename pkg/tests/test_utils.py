import logging
import numpy as np
import pandas as pd
import pytest

from pdf_forge.core.exceptions import InvalidSampleError, SampleIOError
from pdf_forge.core.logging import get_logger, setup_logging
from pdf_forge.engine.scoring import sqr
from pdf_forge.utils.plotting import pdf_figure, sqr_figure
from pdf_forge.utils.sample_io import format_sample, format_table, parse_sample, read_sample


class TestParseSample:
    def test_one_value_per_line(self):
        assert parse_sample("1.5\n-2\n3e-3\n").values.tolist() == [1.5, -2.0, 0.003]

    def test_comments_and_blank_lines_are_skipped(self):
        assert parse_sample("# drawn by hand\n\n1\n  \n2\n").values.tolist() == [1.0, 2.0]

    def test_header_row_is_detected(self):
        assert parse_sample("value\n1\n2\n").values.tolist() == [1.0, 2.0]

    def test_first_numeric_column_of_a_csv(self):
        text = "id,value,weight\na,1.0,9\nb,2.0,8\n"
        assert parse_sample(text).values.tolist() == [1.0, 2.0]

    def test_named_column(self):
        text = "id,value,weight\na,1.0,9\nb,2.0,8\n"
        assert parse_sample(text, column="weight").values.tolist() == [9.0, 8.0]
        with pytest.raises(InvalidSampleError):
            parse_sample(text, column="height")

    def test_whitespace_columns(self):
        assert parse_sample("1 10\n2 20\n").values.tolist() == [1.0, 2.0]

    @pytest.mark.parametrize("bad, exit_code", [("abc", 2), ("nan", 4), ("inf", 4)])
    def test_bad_entries_report_their_index(self, bad, exit_code):
        with pytest.raises(InvalidSampleError) as info:
            parse_sample(f"1\n2\n{bad}\n4\n")
        assert info.value.index == 2
        assert info.value.exit_code == exit_code

    def test_empty_text(self):
        with pytest.raises(InvalidSampleError):
            parse_sample("# nothing here\n")


def test_read_sample_missing_file(tmp_path):
    with pytest.raises(SampleIOError) as info:
        read_sample(tmp_path / "absent.txt")
    assert info.value.exit_code == 3


def test_written_samples_reload_exactly(tmp_path):
    values = np.random.default_rng(4).standard_normal(5000)
    path = tmp_path / "sample.txt"
    path.write_text(format_sample(values))
    assert read_sample(path).values.tolist() == values.tolist()


def test_parsing_rounds_correctly():
    # the shortest repr of this double is misread by one ulp under pandas' fast float parser
    assert parse_sample("-0.17471729232577715\n").values[0] == -0.17471729232577715
    text = "id,value\na,-0.17471729232577715\nb,0.1\n"
    assert parse_sample(text).values.tolist() == [-0.17471729232577715, 0.1]


def test_format_table():
    text = format_table(pd.DataFrame({"v": [0.1, 1.0], "pdf": [1.0 / 3.0, 2.0]}))
    lines = text.splitlines()
    assert lines[0] == "v,pdf"
    assert lines[1] == "0.10000000000000001,0.33333333333333331"
    assert text.endswith("\n")


class TestPlotting:
    def test_pdf_figure_is_svg(self):
        v = np.linspace(-1.0, 1.0, 50)
        svg = pdf_figure(v, np.full(50, 0.5), spread=np.full(50, 0.05), true_pdf=np.full(50, 0.5))
        assert svg.lstrip().startswith("<?xml")
        assert "<svg" in svg

    def test_sqr_figure_is_svg(self):
        series = sqr(np.sort(np.random.default_rng(1).random(100)))
        assert "<svg" in sqr_figure(series)


def test_setup_logging_writes_to_a_file(tmp_path):
    root = logging.getLogger()
    saved_handlers, saved_level = list(root.handlers), root.level
    log_file = tmp_path / "logs" / "pdf_forge.log"
    try:
        setup_logging("DEBUG", log_file=str(log_file))
        get_logger("pdf_forge.test").debug("grid built")
        logging.getLogger("matplotlib").info("font cache rebuilt")
        for handler in root.handlers:
            handler.flush()
        text = log_file.read_text()
        assert "DEBUG" in text and "grid built" in text
        assert "font cache" not in text
    finally:
        for handler in root.handlers:
            handler.close()
        root.handlers[:] = saved_handlers
        root.setLevel(saved_level)
