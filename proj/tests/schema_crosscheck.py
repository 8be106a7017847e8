# Copyright 2026 The rigidity-lab Authors. All Rights Reserved.
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#    http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
# =========================================================================
"""Checks docs/config.schema.json with the reference jsonschema validator.

Runs the shared accept/reject cases that the C++ validator also runs, so the
two validators have to agree on every case and on the offending field.
"""

import json
import pathlib
import sys

import jsonschema


def pointer(parts):
    return "".join("/" + str(p).replace("~", "~0").replace("/", "~1") for p in parts)


def error_pointers(validator, doc):
    out = set()
    for err in validator.iter_errors(doc):
        path = list(err.absolute_path)
        if err.validator == "required":
            for name in err.validator_value:
                if name not in err.instance:
                    out.add(pointer(path + [name]))
        elif err.validator == "additionalProperties" and err.validator_value is False:
            known = set(err.schema.get("properties", {}))
            for name in err.instance:
                if name not in known:
                    out.add(pointer(path + [name]))
        else:
            out.add(pointer(path))
    return out


def patched(base, patch):
    doc = dict(base)
    for k, v in patch.items():
        if v is None:
            doc.pop(k, None)
        else:
            doc[k] = v
    return doc


def main(root):
    root = pathlib.Path(root)
    schema = json.loads((root / "docs" / "config.schema.json").read_text())
    jsonschema.Draft202012Validator.check_schema(schema)
    validator = jsonschema.Draft202012Validator(schema)
    failures = []

    cases = json.loads((root / "tests" / "data" / "schema_cases.json").read_text())
    for case in cases["valid"]:
        got = error_pointers(validator, patched(cases["base"], case["patch"]))
        if got:
            failures.append(f"{case['name']}: rejected at {sorted(got)}")
    for case in cases["invalid"]:
        got = error_pointers(validator, patched(cases["base"], case["patch"]))
        if case["pointer"] not in got:
            failures.append(f"{case['name']}: expected {case['pointer']}, got {sorted(got)}")

    presentation_schema = schema["properties"]["presentation"]
    for path in sorted((root / "configs").glob("*.json")):
        doc = json.loads(path.read_text())
        got = error_pointers(validator, doc)
        if isinstance(doc.get("presentation"), str):
            inline = json.loads((path.parent / doc["presentation"]).read_text())
            got |= {"/presentation" + p for p in error_pointers(jsonschema.Draft202012Validator(presentation_schema), inline)}
        if got:
            failures.append(f"{path.name}: rejected at {sorted(got)}")

    for f in failures:
        print("FAIL", f)
    print(f"{len(cases['valid']) + len(cases['invalid'])} cases, {len(failures)} failures")
    return 1 if failures else 0


if __name__ == "__main__":
    sys.exit(main(sys.argv[1]))
