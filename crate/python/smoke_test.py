"""Smoke test for the pyfreepairs bindings and the CLI JSON schema.

Run with `python python/smoke_test.py` or `pytest python/smoke_test.py`
after `pip install --no-build-isolation -e crates/py`.
"""

import json
import os
import pathlib
import subprocess

import jsonschema
import pyfreepairs as fp

ROOT = pathlib.Path(__file__).resolve().parent.parent
SCHEMA = json.loads((ROOT / "schema" / "freepairs-output.schema.json").read_text())


def subschema(name):
    return {"$defs": SCHEMA["$defs"], "$ref": f"#/$defs/{name}"}


def binary():
    env = os.environ.get("FREEPAIRS_BIN")
    if env:
        return env
    for profile in ("release", "debug"):
        p = ROOT / "target" / profile / "freepairs"
        if p.exists():
            return str(p)
    raise RuntimeError("build the CLI first: cargo build -p freepairs")


def test_groups_and_units():
    s3 = fp.Group("S3")
    assert s3.order == 6 and s3.elements()[0] == "()"
    assert len(s3.bicyclic_units("beta")) == 6
    s4 = fp.Group("S4")
    assert len(s4.bicyclic_units("beta")) + 1 == 157
    u = s3.unit("beta:(1,2,3):(1,2)")
    assert u.kind == "beta" and not u.is_one()
    try:
        fp.Group("S9")
    except fp.FreepairsError:
        pass
    else:
        raise AssertionError("order cap not enforced")


def test_pair_verdicts():
    g = fp.Group("S3")
    u = g.unit("gamma:(1,2,3):(1,2)")
    v = g.unit("beta:(1,3,2):(1,3)")
    res = fp.verdict(u, v)
    assert res["verdict"] == "NotFreeCertified"
    assert res["trace"] == 1
    assert res["spectrum"]["integer_roots"] == [[0, 1], [3, 1]]
    jsonschema.validate(res["spectrum"], subschema("spectrum"))
    mp = fp.freeing_power(u, v)
    assert (mp["certified"], mp["possible_from"], mp["exact"]) == (2, 2, True)


def test_invariant_and_pingpong():
    res = fp.invariant(fp.Group("S3"), "M", jobs=2)
    assert res["exact_value"] == 2
    assert fp.invariant(fp.Group("C6"), "m")["exact_value"] == "infinity"
    a5 = fp.stau_a5()
    assert a5["pass"] and all(c["trivial"] for c in a5["stau"]["checks"])
    jsonschema.validate(a5["stau"], subschema("stau_report"))
    meta = fp.stau_metabelian(11, [1, 3, 9, 5, 4], 2, 10)
    assert meta["pass"]
    b = fp.bass_eval(5, 2, 4, 0)
    assert b["display"] == "1"
    jsonschema.validate(b, subschema("cyclotomic"))


def test_cli_json_matches_schema():
    jsonschema.Draft202012Validator.check_schema(SCHEMA)
    runs = [
        ["units", "enumerate", "--group", "S3", "--type", "gamma"],
        ["pair", "verdict", "--group", "S3", "--u", "gamma:(1,2,3):(1,2)", "--v", "beta:(1,3,2):(1,3)"],
        ["pair", "min-power", "--group", "S3", "--u", "gamma:(1,2,3):(1,2)", "--v", "beta:(1,3,2):(1,3)"],
        ["invariant", "--group", "S3", "--mode", "m"],
        ["manyfp", "--group", "S3", "--x", "(1,2,3)", "--h", "(1,2)", "--k", "(1,2)"],
        ["stau", "a5"],
        ["bass", "eval", "--d", "7", "--k", "3", "--m", "6", "--j", "2"],
    ]
    for args in runs:
        out = subprocess.run([binary(), "--format", "json", *args], capture_output=True, text=True)
        assert out.returncode == 0, (args, out.stderr)
        jsonschema.validate(json.loads(out.stdout), SCHEMA)


if __name__ == "__main__":
    for name, fn in list(globals().items()):
        if name.startswith("test_") and callable(fn):
            fn()
            print(f"ok {name}")
