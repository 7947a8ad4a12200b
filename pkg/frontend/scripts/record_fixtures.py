#!/usr/bin/env python3
"""Record byte-exact service responses as frontend test fixtures.

The UI parity tests assert that every number the panels render equals the
service response verbatim, so the fixtures must be the literal bytes the
service emits. Re-run after any engine change:

    python frontend/scripts/record_fixtures.py
"""

import pathlib
import sys

from fastapi.testclient import TestClient

from bayescal.presets import preset_document
from bayescal.service import create_app

OUT = pathlib.Path(__file__).resolve().parent.parent / "fixtures" / "responses"

PRESETS = ("fig1-neutral", "figs2-neutral", "figs3-neutral", "culprit-shock")
CURVE_GRID = [0.5, 0.6, 0.7, 0.772, 0.8, 0.9, 0.95, 0.975, 0.99]


def main() -> int:
    client = TestClient(create_app())
    OUT.mkdir(parents=True, exist_ok=True)

    for name in PRESETS:
        doc = preset_document(name)
        resp = client.post("/api/v1/oc", json=doc)
        resp.raise_for_status()
        (OUT / f"oc-{name}.json").write_bytes(resp.content)

        resp = client.post("/api/v1/curve",
                           json={"spec": doc, "c_grid": CURVE_GRID})
        resp.raise_for_status()
        (OUT / f"curve-{name}.json").write_bytes(resp.content)

    culprit = preset_document("culprit-shock")
    resp = client.post("/api/v1/calibrate", json={
        "spec": culprit,
        "targets": [{"metric": "pid", "level": 0.025},
                    {"metric": "ft1e", "level": 0.025}],
    })
    resp.raise_for_status()
    (OUT / "calibrate-culprit-shock.json").write_bytes(resp.content)

    for c, tag in ((0.975, "strict"), (0.772, "relaxed")):
        doc = dict(culprit)
        doc["rule"] = dict(culprit["rule"], c=c)
        resp = client.post("/api/v1/decide", json={
            "spec": doc, "observed": {"x_t": 172, "x_c": 194}})
        resp.raise_for_status()
        (OUT / f"decide-culprit-shock-{tag}.json").write_bytes(resp.content)

    print(f"fixtures written to {OUT}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
