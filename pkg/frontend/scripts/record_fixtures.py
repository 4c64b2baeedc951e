"""Record API responses used as frozen fixtures by the console tests.

Runs the real service in-process against a scratch store and saves the JSON
bodies under tests/fixtures/. Rerunning refreshes every fixture; ids and
simulated numbers are deterministic, timestamps are not (tests never compare
timestamps to anything outside the fixture itself).
"""

import json
import tempfile
from pathlib import Path

from fastapi.testclient import TestClient

from bop2te.service import create_app

FIXTURES = Path(__file__).resolve().parent.parent / "tests" / "fixtures"

SPEC4 = {
    "eta_e": 0.60,
    "eta_e_null": 0.30,
    "eta_t": 0.20,
    "eta_t_null": 0.40,
    "alpha_targets": [0.025, 0.10, 0.10],
    "schedule": [
        {"n": 9, "check_efficacy": False, "check_toxicity": True},
        {"n": 18, "check_efficacy": True, "check_toxicity": True},
        {"n": 36, "check_efficacy": True, "check_toxicity": True},
    ],
    "prior": "reference",
    "attenuation": 3.0,
    "design_phi": 1.0,
}

MULTIDOSE_SPEC = {
    "eta_e": 0.56,
    "eta_e_null": 0.24,
    "eta_t": 0.18,
    "eta_t_null": 0.42,
    "alpha_targets": [0.025, 0.10, 0.10],
    "schedule": [
        {"n": 12, "check_efficacy": True, "check_toxicity": True},
        {"n": 24, "check_efficacy": True, "check_toxicity": True},
    ],
    "prior": "null-centered",
}

PHI_GRID = [0.25, 0.5, 1, 2, 4, 10, 100]


def save(name: str, payload) -> None:
    FIXTURES.mkdir(parents=True, exist_ok=True)
    path = FIXTURES / name
    path.write_text(json.dumps(payload, indent=2) + "\n")
    print(f"wrote {path.relative_to(FIXTURES.parent.parent)}")


def main() -> None:
    with tempfile.TemporaryDirectory() as tmp:
        app = create_app(Path(tmp) / "store.jsonl")
        with TestClient(app) as client:
            created = client.post("/designs", json=SPEC4)
            assert created.status_code == 200, created.text
            doc = created.json()
            save("design-scenario4.json", doc)
            design_id = doc["id"]

            bare = client.post(f"/designs/{design_id}/oc", json={})
            assert bare.status_code == 200, bare.text
            save("oc-bare-scenario4.json", bare.json())

            oc = client.post(
                f"/designs/{design_id}/oc",
                json={"mc": {"replicates": 4000, "seed": 11}, "phi_grid": PHI_GRID},
            )
            assert oc.status_code == 200, oc.text
            save("oc-scenario4.json", oc.json())

            for name, body in [
                ("decision-nogo-futility.json", {"n": 18, "x_e": 5, "x_t": 5}),
                ("decision-go.json", {"n": 18, "x_e": 6, "x_t": 5}),
                ("decision-nogo-both.json", {"n": 36, "x_e": 14, "x_t": 12}),
            ]:
                posted = client.post(f"/designs/{design_id}/decisions", json=body)
                assert posted.status_code == 200, posted.text
                save(name, posted.json())

            log = client.get(f"/designs/{design_id}/decisions")
            assert log.status_code == 200, log.text
            save("decision-log.json", log.json())

            protocol = client.get(f"/designs/{design_id}/protocol")
            assert protocol.status_code == 200, protocol.text
            (FIXTURES / "protocol-scenario4.txt").write_text(protocol.text)
            print("wrote tests/fixtures/protocol-scenario4.txt")

            md_doc = client.post("/designs", json=MULTIDOSE_SPEC)
            assert md_doc.status_code == 200, md_doc.text
            save("design-multidose.json", md_doc.json())

            listing = client.get("/designs")
            assert listing.status_code == 200, listing.text
            save("designs-list.json", listing.json())

            md = client.post(
                "/simulations/multidose",
                json={
                    "arms": ["dose L", "dose H"],
                    "per_arm_design": md_doc.json()["spec"],
                    "boundaries": md_doc.json()["result"]["boundaries"],
                    "delta": 0.8,
                    "replicates": 3000,
                    "seed": 7,
                    "truth": [
                        {"pi_e": 0.30, "pi_t": 0.10},
                        {"pi_e": 0.60, "pi_t": 0.20},
                    ],
                },
            )
            assert md.status_code == 200, md.text
            save("multidose-scenario1.json", md.json())

            bad = dict(SPEC4, eta_e=0.30, eta_e_null=0.60)
            err = client.post("/designs", json=bad)
            assert err.status_code == 400, err.text
            save("error-eta.json", err.json())


if __name__ == "__main__":
    main()
