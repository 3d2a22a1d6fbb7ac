#!/usr/bin/env python3
"""Validates reports from the CLI against docs/report-schema.json.

Usage: check_report_schema.py <leangreen binary> <schema> <config.json>...
Exits 77 (skip) when the jsonschema package is not installed.
"""
import json
import subprocess
import sys

try:
    import jsonschema
except ImportError:
    print("jsonschema not installed; skipping")
    sys.exit(77)


def main() -> int:
    cli, schema_path, configs = sys.argv[1], sys.argv[2], sys.argv[3:]
    with open(schema_path, encoding="utf-8") as f:
        schema = json.load(f)
    validator = jsonschema.Draft202012Validator(schema)
    failures = 0
    for config in configs:
        for args in (["--reps", "3"], ["--reps", "1"], ["--reps", "3", "--factors", "derived"]):
            out = subprocess.run([cli, "simulate", config, *args], check=True, capture_output=True, text=True)
            errors = list(validator.iter_errors(json.loads(out.stdout)))
            for e in errors:
                print(f"{config} {' '.join(args)}: {'/'.join(map(str, e.path))}: {e.message}")
            failures += len(errors)
    print(f"{failures} schema violations")
    return 1 if failures else 0


if __name__ == "__main__":
    sys.exit(main())
