# Copyright 2026 The Advisor Authors
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Validates recorded API responses against docs/api_schema.json."""

import json
import sys

import jsonschema


def main(schema_path, samples_path):
    with open(schema_path) as f:
        schema = json.load(f)
    with open(samples_path) as f:
        samples = json.load(f)
    jsonschema.Draft202012Validator.check_schema(schema)
    defs = schema["$defs"]

    def validator(name):
        return jsonschema.Draft202012Validator({"$ref": "#/$defs/" + name, "$defs": defs})

    failures = 0
    for s in samples:
        where = "%s %s (%d)" % (s["method"], s["path"], s["status"])
        is_error = s["status"] >= 400
        if is_error != (s["schema"] == "error"):
            print("FAIL %s: status does not match schema %s" % (where, s["schema"]))
            failures += 1
        for err in validator(s["schema"]).iter_errors(s["body"]):
            print("FAIL %s: %s at %s" % (where, err.message, list(err.absolute_path)))
            failures += 1

    # The schema must be able to reject something.
    broken = [
        ("turn", {"session_id": "s", "turn": 0}),
        ("health", {"status": "down"}),
        ("error", {"message": "x"}),
    ]
    for name, body in broken:
        if validator(name).is_valid(body):
            print("FAIL schema accepts a malformed %s body" % name)
            failures += 1

    kinds = sorted({s["schema"] for s in samples})
    print("%d samples, schemas %s, %d failures" % (len(samples), ", ".join(kinds), failures))
    return 1 if failures or not samples else 0


if __name__ == "__main__":
    if len(sys.argv) != 3:
        sys.exit("usage: validate_api.py SCHEMA SAMPLES")
    sys.exit(main(sys.argv[1], sys.argv[2]))
