#!/usr/bin/env python3
"""Runs every report-producing command path and validates the JSON output."""

import json
import os
import subprocess
import sys
import tempfile

import jsonschema


def main() -> int:
    cli, source_dir = sys.argv[1], sys.argv[2]
    with open(os.path.join(source_dir, "docs", "report.schema.json")) as f:
        schema = json.load(f)
    validator = jsonschema.Draft202012Validator(schema)
    jsonschema.Draft202012Validator.check_schema(schema)

    failures = 0
    checked = 0
    with tempfile.TemporaryDirectory() as tmp:
        subprocess.run([cli, "gen", "--seed", "7", "--count", "3", "--out", tmp, "--blocks", "4",
                        "--vertices", "10", "--block-size", "8"], check=True, capture_output=True)
        inputs = [os.path.join(source_dir, "samples", n) for n in ("loop.json", "line.json")]
        inputs += sorted(os.path.join(tmp, n) for n in os.listdir(tmp) if n.endswith(".json"))

        runs = []
        for path in inputs:
            for mode in ("ai-only", "ai+mc", "mc-only", "ai+mc-no-du"):
                for init in ("empty", "unknown"):
                    runs.append((["analyze", path, "--mode", mode, "--init", init, "--assoc", "2",
                                  "--sets", "1", "--block-size", "8"], {0}))
            runs.append((["verify", path, "--assoc", "2", "--sets", "1", "--block-size", "8"], {0}))
            runs.append((["analyze", path, "--timings", "--sets", "2", "--block-size", "8"], {0}))
        # A model-checking budget that is too small still yields a report, with errors.
        runs.append((["analyze", inputs[-1], "--mode", "mc-only", "--budget-mc", "1", "--sets", "1",
                      "--block-size", "8"], {3}))

        for args, codes in runs:
            out_path = os.path.join(tmp, "report.out")
            if os.path.exists(out_path):
                os.remove(out_path)
            proc = subprocess.run([cli, *args, "--out", out_path], capture_output=True, text=True)
            label = " ".join(args)
            if proc.returncode not in codes:
                print(f"FAIL exit {proc.returncode}: {label}\n{proc.stderr}")
                failures += 1
                continue
            if '"schema"' in proc.stderr or '"accesses"' in proc.stderr:
                print(f"FAIL report payload on stderr: {label}")
                failures += 1
            with open(out_path) as f:
                doc = json.load(f)
            errors = sorted(validator.iter_errors(doc), key=lambda e: list(e.path))
            for e in errors:
                print(f"FAIL {label}: {list(e.path)}: {e.message}")
            failures += bool(errors)
            if doc["stats"]["accesses"] != len(doc["accesses"]):
                print(f"FAIL access count mismatch: {label}")
                failures += 1
            if 3 in codes and not doc["errors"]:
                print(f"FAIL budget run without errors: {label}")
                failures += 1
            checked += 1
            broken = json.loads(json.dumps(doc))
            broken["accesses"].append({"id": "x->y:b0", "set": 0, "source": "x", "target": "y", "block": 0,
                                       "ordinal": 0, "verdict": "maybe"})
            if validator.is_valid(broken):
                print(f"FAIL schema accepts a malformed access: {label}")
                failures += 1

    print(f"validated {checked} reports, {failures} failures")
    return 1 if failures else 0


if __name__ == "__main__":
    sys.exit(main())
