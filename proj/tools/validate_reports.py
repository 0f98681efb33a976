#!/usr/bin/env python3
"""Validate every *.json report under the given directories against the v1 schema."""
import json
import pathlib
import sys

import jsonschema


def main(argv):
    if len(argv) < 3:
        print("usage: validate_reports.py SCHEMA DIR...", file=sys.stderr)
        return 2
    schema = json.loads(pathlib.Path(argv[1]).read_text())
    jsonschema.Draft7Validator.check_schema(schema)
    validator = jsonschema.Draft7Validator(schema)
    checked, bad = 0, 0
    for d in argv[2:]:
        for path in sorted(pathlib.Path(d).rglob("*.json")):
            doc = json.loads(path.read_text())
            errors = sorted(validator.iter_errors(doc), key=lambda e: list(e.path))
            checked += 1
            for e in errors:
                bad += 1
                print(f"{path}: {'/'.join(map(str, e.path))}: {e.message}")
    print(f"{checked} reports checked, {bad} violations")
    return 0 if checked > 0 and bad == 0 else 1


if __name__ == "__main__":
    sys.exit(main(sys.argv))
