"""Smoke test for the `bykov` extension module.

Build and install first, e.g.
    maturin build --release -m crates/python/Cargo.toml -o dist && pip install dist/bykov-*.whl
then run `python python/smoke_test.py` from the repository root. The audit
report written by the CLI is validated against the shipped JSON Schema when
the `bykov` binary is available (set BYKOV_BIN or build it with cargo).
"""

import json
import math
import os
import pathlib
import subprocess
import sys
import tempfile

import bykov

ROOT = pathlib.Path(__file__).resolve().parent.parent


def check(cond, message):
    if not cond:
        raise AssertionError(message)
    print(f"ok  {message}")


def model_and_maps():
    params = bykov.ModelParams.reference(1.0, 1e-3)
    check(params.constants() == (2.0, 3.0, 6.0, 3.0), "reference constants (2, 3, 6, 3)")
    pert = bykov.Perturbation.reference()
    m = bykov.ReturnMap(params, pert)

    # Closed form of the return map at lambda = 0.
    m0 = bykov.ReturnMap(params.with_lambda(0.0), pert)
    x, y = m0.apply(1.0, 0.3)
    xe = (1.0 - 3.0 * math.log(0.3)) % (2 * math.pi)
    check(abs(x - xe) < 1e-13 and abs(y - 0.3**6) < 1e-15, "lambda = 0 closed form")

    (a, b), (c, d) = m.jacobian(0.5, 0.1)
    check(abs((a * d - b * c) - m.det_factorized(0.5, 0.1)) < 1e-9 * abs(a * d - b * c), "jacobian determinant factorises")

    orbit = bykov.iterate(m, 1.0, 0.0, 100, 10)
    check(len(orbit) == 100, "iterate returns the stored points")

    try:
        bykov.ModelParams(0.5, 1.0, 1.0, 3.0, 1.0, 1.0, 0.0, 1e-3)
    except ValueError:
        check(True, "invalid eigenvalues raise ValueError")
    else:
        raise AssertionError("invalid eigenvalues accepted")
    return params, pert


def circle_family():
    check(bykov.CircleMapFamily.reference(0.3).critical_points() == [], "no critical points at K = 0.3")
    fam = bykov.CircleMapFamily.reference(5.0)
    crit = fam.critical_points()
    check(len(crit) == 2 and all(abs(h2) > 1e-8 for _, h2 in crit), "two nondegenerate critical points at K = 5")
    roots = fam.superstable_search(2)
    check(any(r["minimal_period"] == 2 for r in roots), "period-2 superstable parameter at K = 5")
    cert = fam.misiurewicz_check(0.0)
    check(all(v["pass"] for v in cert["verdicts"]), "Misiurewicz certificate at a = 0, K = 5")
    k = 3.0
    lam = bykov.lambda_a_n(k, 1.0, 4)
    check(abs(bykov.k_of_lambda(k, lam) - (8 * math.pi + 1.0)) < 1e-11, "k(lambda_(a,n)) = 2 pi n + a")


def audit_and_schema(params, pert):
    cfg = json.dumps({"h1": {"lambda_count": 2, "grid": 16, "injectivity_points": 2000}})
    report = bykov.audit(params.with_twisting_number(15.0), pert, cfg, 0)
    names = [v["condition"] for v in report["verdicts"]]
    check(names[0].startswith("H1") and names[-1].startswith("H7"), "audit verdicts ordered H1..H7")
    check(report["h4"]["verdict"]["pass"] and report["h5"]["proxy"] is True, "H4 finds a*, H5 flagged as proxy")

    schema = json.loads(bykov.REPORT_SCHEMA)
    binary = os.environ.get("BYKOV_BIN") or str(ROOT / "target" / "release" / "bykov")
    if not pathlib.Path(binary).exists():
        print(f"skip CLI schema validation: {binary} not built")
        return
    import jsonschema

    with tempfile.TemporaryDirectory() as tmp:
        subprocess.run(
            [binary, "audit", "--config", str(ROOT / "configs" / "reference.toml"), "--out", tmp],
            check=True,
        )
        doc = json.loads(pathlib.Path(tmp, "audit.json").read_text())
        jsonschema.validate(doc, schema)
        check(doc["kind"] == "audit" and doc["overall"] in ("pass", "fail", "inconclusive"), "CLI audit JSON matches the schema")


def main():
    params, pert = model_and_maps()
    circle_family()
    audit_and_schema(params, pert)
    print("smoke test passed")
    return 0


if __name__ == "__main__":
    sys.exit(main())
