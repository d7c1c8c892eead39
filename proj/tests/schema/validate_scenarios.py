"""Validates every shipped scenario against the JSON schema and checks that
a scenario with an unknown manifold is rejected."""
import json
import pathlib
import sys

import jsonschema

schema_path, scenario_dir = map(pathlib.Path, sys.argv[1:3])
schema = json.loads(schema_path.read_text())
validator = jsonschema.Draft202012Validator(schema)

failures = 0
for path in sorted(scenario_dir.glob("*.json")):
    errors = list(validator.iter_errors(json.loads(path.read_text())))
    for err in errors:
        print(f"{path.name}: {err.message}")
    failures += bool(errors)

bad = {"manifold": "sphere3", "algebroid": {"type": "tangent"}, "job": "classify"}
if validator.is_valid(bad):
    print("schema accepted manifold 'sphere3'")
    failures += 1

print(f"validated {len(list(scenario_dir.glob('*.json')))} scenarios, {failures} failures")
sys.exit(1 if failures else 0)
