"""Checks that every subcommand emits a report valid against docs/report.schema.json."""
import json
import subprocess
import sys

import jsonschema

cli, schema_path = sys.argv[1], sys.argv[2]
schema = json.load(open(schema_path))
commands = [
    ["conv", "--a", "1,2", "--b", "3,4"],
    ["deriv", "norm", "--phi", "1/(n+1)"],
    ["deriv", "classify", "--mu", "n*2^(-(n-1))"],
    ["deriv", "apply", "--phi", "2^(-n)", "--f", "1,1"],
    ["deriv", "truncate", "--mu", "2^(1-n)", "--k", "3"],
    ["deriv", "witness", "--mu", "1", "--eps", "0.5"],
    ["cheese", "build"],
    ["cheese", "verify"],
    ["cheese", "demo"],
    ["bimodule", "check", "--derivation", "ddt"],
    ["bimodule", "rank1"],
    ["bimodule", "transfer"],
]
for args in commands:
    run = subprocess.run([cli] + args, capture_output=True, text=True, check=True)
    report = json.loads(run.stdout)
    jsonschema.validate(report, schema)
    assert report["command"] == " ".join(args[:2] if args[0] != "conv" else args[:1]), report["command"]
print(f"{len(commands)} reports valid")
