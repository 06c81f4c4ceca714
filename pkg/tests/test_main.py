import contextlib
import io
import json
import os
import tempfile
import unittest

from glc.__main__ import EXIT_FAILURE, EXIT_OK, EXIT_USAGE, main

ASSETS = os.path.join(os.path.dirname(__file__), "assets")


def asset(name: str) -> str:
    return os.path.join(ASSETS, name)


def run(*argv):
    output = io.StringIO()
    with contextlib.redirect_stdout(output):
        code = main(list(argv))
    return code, output.getvalue()


class TestCheck(unittest.TestCase):
    def test_ok(self):
        code, output = run("check", asset("countdown.gml"), "--json")
        self.assertEqual(code, EXIT_OK)
        self.assertEqual(json.loads(output), {"ok": True, "type": "1", "diagnostics": []})

    def test_type_error(self):
        code, output = run("check", asset("guess_unguarded.gml"), "--json")
        self.assertEqual(code, EXIT_FAILURE)
        document = json.loads(output)
        self.assertFalse(document["ok"])
        self.assertEqual(document["diagnostics"][0]["code"], "GuardedRaise")
        self.assertGreater(document["diagnostics"][0]["line"], 0)

    def test_human_diagnostic(self):
        path = asset("guess_unguarded.gml")
        code, output = run("check", path)
        self.assertEqual(code, EXIT_FAILURE)
        self.assertTrue(output.startswith(f"{path}:"))
        self.assertIn("GuardedRaise", output)

    def test_missing_file(self):
        code, _ = run("check", asset("missing.gml"))
        self.assertEqual(code, EXIT_USAGE)

    def test_reserved_flag(self):
        code, _ = run("check", asset("countdown.gml"), "--lax-app-delta")
        self.assertEqual(code, EXIT_USAGE)


class TestRun(unittest.TestCase):
    def test_countdown(self):
        code, output = run("run", asset("countdown.gml"))
        self.assertEqual(code, EXIT_OK)
        self.assertEqual(output.splitlines(), ["put 2", "put 1", "put 0", "ret *"])

    def test_json(self):
        code, output = run("run", asset("countdown.gml"), "--json")
        self.assertEqual(code, EXIT_OK)
        document = json.loads(output)
        self.assertEqual(
            document["events"], [{"out": 2}, {"out": 1}, {"out": 0}, {"done": "*"}]
        )
        self.assertEqual(document["loopRounds"], 4)

    def test_fuel(self):
        code, output = run("run", asset("loop.gml"), "--fuel", "3")
        self.assertEqual(code, EXIT_OK)
        self.assertEqual(output.splitlines(), ["put 0", "put 0", "put 0", "pending"])

    def test_fuel_json(self):
        code, output = run("run", asset("loop.gml"), "--fuel", "3", "--json")
        self.assertEqual(code, EXIT_OK)
        self.assertEqual(
            json.loads(output)["events"],
            [{"out": 0}, {"out": 0}, {"out": 0}, {"pending": True}],
        )

    def test_negative_fuel(self):
        with self.assertRaises(SystemExit):
            run("run", asset("loop.gml"), "--fuel", "-1")

    def test_uninterpreted(self):
        code, _ = run("run", asset("guess.gml"))
        self.assertEqual(code, EXIT_FAILURE)


class TestDenote(unittest.TestCase):
    def test_countdown(self):
        code, output = run("denote", asset("countdown.gml"), "--json")
        self.assertEqual(code, EXIT_OK)
        self.assertEqual(
            json.loads(output),
            {"events": [{"out": 2}, {"out": 1}, {"out": 0}, {"done": "*"}]},
        )


class TestAdequacy(unittest.TestCase):
    def test_file(self):
        code, _ = run("adequacy", asset("countdown.gml"))
        self.assertEqual(code, EXIT_OK)

    def test_mutant(self):
        code, output = run(
            "adequacy", asset("countdown.gml"), "--mutant", "handleit-off-by-one", "--json"
        )
        self.assertEqual(code, EXIT_FAILURE)
        self.assertFalse(json.loads(output)["agreed"])

    def test_needs_input(self):
        code, _ = run("adequacy")
        self.assertEqual(code, EXIT_USAGE)
        code, _ = run("adequacy", asset("countdown.gml"), "--gen")
        self.assertEqual(code, EXIT_USAGE)

    def test_generated(self):
        with tempfile.TemporaryDirectory() as tmp:
            report = os.path.join(tmp, "report.xml")
            code, output = run(
                "adequacy", "--gen", "--count", "5", "--depth", "4", "--json",
                "--report-xml", report,
            )
            self.assertEqual(code, EXIT_OK)
            self.assertEqual(json.loads(output)["total"], 5)
            with open(report, "r", encoding="utf-8") as fin:
                self.assertIn("<AdequacyReport>", fin.read())


class TestLaws(unittest.TestCase):
    def test_single_law(self):
        code, output = run(
            "laws", "--instance", "powerset", "--count", "5", "--law", "fixpoint", "--json"
        )
        self.assertEqual(code, EXIT_OK)
        document = json.loads(output)
        self.assertEqual(document["instance"], "powerset")
        self.assertEqual([law["law"] for law in document["laws"]], ["fixpoint"])

    def test_text(self):
        code, output = run("laws", "--instance", "trace", "--count", "5", "--law", "oracle")
        self.assertEqual(code, EXIT_OK)
        self.assertIn("oracle: 5 instances (sampled), 0 failed", output)


class TestTopLevel(unittest.TestCase):
    def test_version(self):
        code, output = run("--version")
        self.assertEqual(code, EXIT_OK)
        self.assertTrue(output.startswith("glc "))

    def test_no_command(self):
        code, _ = run()
        self.assertEqual(code, EXIT_USAGE)


if __name__ == "__main__":
    unittest.main()
