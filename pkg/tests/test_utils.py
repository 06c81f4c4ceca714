import logging
import os
import tempfile
import unittest

import termcolor

from glc.logger_utils import ColourFormatter, paint
from glc.report import LAW_ROOT, to_json, to_xml, write_report_xml
from glc.utils import format_events, read_source, write_text


class TestUtils(unittest.TestCase):
    def setUp(self):
        self.tmp = tempfile.TemporaryDirectory()
        self.addCleanup(self.tmp.cleanup)

    def test_read_source(self):
        path = os.path.join(self.tmp.name, "main.gml")
        write_text(path, "ret *")
        self.assertEqual(read_source(path), "ret *")

    def test_read_missing_source(self):
        with self.assertRaises(OSError):
            read_source(os.path.join(self.tmp.name, "missing.gml"))

    def test_read_invalid_utf8(self):
        path = os.path.join(self.tmp.name, "broken.gml")
        with open(path, "wb") as fout:
            fout.write(b"ret \xff")
        with self.assertRaises(OSError):
            read_source(path)

    def test_write_text_creates_directories(self):
        path = os.path.join(self.tmp.name, "reports", "nested", "out.xml")
        write_text(path, "alpha")
        with open(path, "r", encoding="utf-8") as fin:
            self.assertEqual(fin.read(), "alpha")

    def test_format_events(self):
        self.assertEqual(format_events([2, 1, 0]), "[2, 1, 0]")
        self.assertEqual(format_events(()), "[]")

    def test_paint(self):
        self.assertEqual(paint("ok", "green", enabled=False), "ok")
        self.assertEqual(paint("ok", None, enabled=True), "ok")
        self.assertEqual(paint("ok", "mauve", enabled=True), "ok")
        painted = paint("ok", "green", enabled=True)
        self.assertEqual(painted, termcolor.colored("ok", "green", force_color=True))
        self.assertTrue(painted.startswith("\033[32m"))

    def test_paint_respects_environment(self):
        previous = os.environ.get("GLC_COLOR")
        os.environ["GLC_COLOR"] = "0"
        try:
            self.assertEqual(paint("ok", "green"), "ok")
        finally:
            if previous is None:
                del os.environ["GLC_COLOR"]
            else:
                os.environ["GLC_COLOR"] = previous

    def test_colour_disabled_by_environment(self):
        previous = os.environ.get("GLC_COLOR")
        os.environ["GLC_COLOR"] = "0"
        try:
            record = logging.LogRecord("glc", logging.ERROR, __file__, 1, "bad", (), None)
            self.assertEqual(ColourFormatter().format(record), "ERROR:glc: bad")
        finally:
            if previous is None:
                del os.environ["GLC_COLOR"]
            else:
                os.environ["GLC_COLOR"] = previous


class TestReport(unittest.TestCase):
    def setUp(self):
        self.document = {
            "instance": "powerset",
            "laws": [
                {"law": "fixpoint", "samples": 2, "exhaustive": True, "failed": 0, "failures": []}
            ],
            "note": None,
        }

    def test_json(self):
        self.assertIn('"instance": "powerset"', to_json(self.document))

    def test_xml(self):
        text = to_xml(self.document, LAW_ROOT)
        self.assertTrue(text.startswith("<LawReport>"))
        self.assertIn("<exhaustive>true</exhaustive>", text)
        self.assertNotIn("None", text)

    def test_write_xml(self):
        with tempfile.TemporaryDirectory() as tmp:
            path = os.path.join(tmp, "laws.xml")
            write_report_xml(path, self.document, LAW_ROOT)
            with open(path, "r", encoding="utf-8") as fin:
                self.assertIn("<law>fixpoint</law>", fin.read())


if __name__ == "__main__":
    unittest.main()
