#!/usr/bin/env python3
# Copyright 2026 The qcascade Authors
#
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
"""Runs every CLI subcommand on a small generated corpus and validates all
emitted JSON, plus the shared protocol fixtures, against schemas/."""

import argparse
import json
import pathlib
import random
import subprocess
import sys
import tempfile

import jsonschema
import referencing


def load_registry(schema_dir):
    resources = []
    for path in sorted(schema_dir.glob("*.schema.json")):
        resource = referencing.Resource.from_contents(json.loads(path.read_text()))
        resources.append((path.name, resource))
    return referencing.Registry().with_resources(resources)


class Checker:
    def __init__(self, schema_dir):
        self.registry = load_registry(schema_dir)
        self.counts = {}
        self.errors = []

    def validator(self, name):
        schema = self.registry.contents(name)
        cls = jsonschema.validators.validator_for(schema)
        return cls(schema, registry=self.registry)

    def check(self, name, instance, where):
        errors = list(self.validator(name).iter_errors(instance))
        self.counts[name] = self.counts.get(name, 0) + 1
        for e in errors[:3]:
            self.errors.append(f"{where}: {name}: {e.message}")

    def check_jsonl(self, name, path):
        lines = [l for l in path.read_text(encoding="utf-8").splitlines() if l.strip()]
        for i, line in enumerate(lines, 1):
            self.check(name, json.loads(line), f"{path}:{i}")
        return len(lines)

    def check_json(self, name, path):
        self.check(name, json.loads(path.read_text(encoding="utf-8")), str(path))


def run(cli, *args):
    proc = subprocess.run([cli, *args], capture_output=True, text=True)
    if proc.returncode != 0:
        sys.exit(f"{' '.join(args)} exited {proc.returncode}:\n{proc.stderr}")
    return proc.stdout


def word(rng):
    return "".join(rng.choice("abcdefghijklmnopqrstuvwxyz") for _ in range(rng.randint(3, 7)))


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--cli", required=True)
    ap.add_argument("--schemas", required=True, type=pathlib.Path)
    ap.add_argument("--fixtures", required=True, type=pathlib.Path)
    args = ap.parse_args()
    checker = Checker(args.schemas)

    with tempfile.TemporaryDirectory() as tmp:
        d = pathlib.Path(tmp)
        rng = random.Random(7)
        clean = sorted({f"{word(rng)} {word(rng)}" for _ in range(400)})
        (d / "clean.txt").write_text("\n".join(clean) + "\n")
        confusions = [{"char": "a", "confusions": ["e", "o"]},
                      {"char": "e", "confusions": ["a"]},
                      {"char": "i", "confusions": ["y", "e"]}]
        (d / "confusions.jsonl").write_text("".join(json.dumps(c) + "\n" for c in confusions))
        config = {
            "seed": 3,
            "parallelism": 2,
            "corpus": {"train": "data/train.jsonl", "test": "data/test.jsonl"},
            "gen_corpus": {
                "clean_queries": "clean.txt",
                "confusion_table": "confusions.jsonl",
                "error_rate": 0.7,
                "split": {"train": 0.7, "test": 0.3},
            },
            "correctors": {
                "small": {"type": "scripted", "script": "small.jsonl"},
                "llm": {"type": "scripted", "script": "llm.jsonl"},
            },
            "triggers": {"dim": 4096, "train": {"epochs": 10}},
            "policies": [
                {"kind": "random_routing", "p": 0.3},
                {"kind": "meta_routing"},
                {"kind": "hybrid"},
                {"kind": "random_cascading", "p": 0.3},
                {"kind": "margin_sampling", "tau": 0.5},
                {"kind": "trigger3"},
                {"name": "trigger3_oracle", "kind": "trigger3", "triggers": "oracle"},
            ],
        }
        cfg = d / "config.json"
        cfg.write_text(json.dumps(config, indent=2))
        c = ["--config", str(cfg)]

        run(args.cli, "gen-corpus", *c)
        pairs = []
        for split in ("train", "test"):
            path = d / "data" / f"{split}.jsonl"
            checker.check_jsonl("corpus_record.schema.json", path)
            pairs += [json.loads(l) for l in path.read_text().splitlines()]
        checker.check_jsonl("confusion_entry.schema.json", d / "confusions.jsonl")

        small, llm = [], []
        for p in pairs:
            u = rng.random()
            small.append({"id": p["id"], "behavior": "perfect" if u < 0.6 else "noop"})
            llm.append({"id": p["id"], "behavior": "perfect" if u < 0.8 else "noop"})
        (d / "small.jsonl").write_text("".join(json.dumps(s) + "\n" for s in small))
        (d / "llm.jsonl").write_text("".join(json.dumps(s) + "\n" for s in llm))

        run(args.cli, "extract-edits", "--input", str(d / "data/test.jsonl"),
            "--output", str(d / "test.m2"), "--level", "word")
        run(args.cli, "build-labels", *c)
        for name in ("ct", "lt", "ft"):
            checker.check_jsonl("label.schema.json", d / "out/labels" / f"{name}.jsonl")
        checker.check_jsonl("correction_record.schema.json", d / "out/labels/records.jsonl")

        run(args.cli, "train-trigger", *c)
        for path in sorted((d / "out/models").glob("*.json")):
            checker.check_json("model.schema.json", path)

        run(args.cli, "eval", *c, "--threshold-sweep", "0.3:0.7:0.2")
        for path in sorted((d / "out/traces").glob("*.jsonl")):
            checker.check_jsonl("trace.schema.json", path)
        for path in sorted((d / "out/reports").glob("*.json")):
            name = "report.schema.json" if path.name == "report.json" else "policy_report.schema.json"
            checker.check_json(name, path)
        run(args.cli, "compare", str(d / "out/reports/report.json"))

        score_in = d / "score.jsonl"
        score_in.write_text("".join(
            json.dumps({"source": p["source"], "hypothesis": p["source"], "reference": p["target"]}) + "\n"
            for p in pairs))
        run(args.cli, "score", "--input", str(score_in), "--output", str(d / "score.json"))
        checker.check_json("score_report.schema.json", d / "score.json")

    golden = json.loads((args.fixtures / "protocol" / "golden.json").read_text(encoding="utf-8"))
    for case in golden["cases"]:
        checker.check("correct_request.schema.json", case["request"], case["name"])
        if case["response"]["status"] != 200:
            continue
        try:
            body = json.loads(case["response"]["body"])
        except json.JSONDecodeError:
            body = None
        valid = body is not None and checker.validator("correct_response.schema.json").is_valid(body)
        if valid != (case["expect"] != "failure"):
            checker.errors.append(f"golden case {case['name']}: schema verdict {valid} disagrees with expect")

    for name, n in sorted(checker.counts.items()):
        print(f"{name}: {n} instances")
    if checker.errors:
        print("\n".join(checker.errors))
        return 1
    print("all emitted JSON conforms")
    return 0


if __name__ == "__main__":
    sys.exit(main())
