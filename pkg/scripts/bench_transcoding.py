#!/usr/bin/env python3
"""Measure transcoder costs on the captured approval envelopes.

Prints parse and serialize times per direction plus wire sizes.
Numbers are for this host only; nothing here is asserted by tests.
"""

from __future__ import annotations

import sys
import time
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

from muit.bridge import (
    canonical_to_json,
    canonical_to_soap,
    json_to_canonical,
    soap_to_canonical,
)

FIXTURES = Path(__file__).resolve().parents[1] / "tests" / "fixtures"
ROUNDS = 5000


def timed(label: str, fn, arg) -> None:
    fn(arg)
    start = time.perf_counter()
    for _ in range(ROUNDS):
        fn(arg)
    total = time.perf_counter() - start
    print(f"  {label:<22} {total / ROUNDS * 1e6:8.1f} us/op")


def main() -> None:
    for name in ("task_approval_request.xml", "task_approval_response.xml"):
        raw = (FIXTURES / name).read_bytes()
        envelope = soap_to_canonical(raw)
        soap_wire = canonical_to_soap(envelope)
        json_wire = canonical_to_json(envelope)
        ns = envelope.namespace
        print(f"{name}:")
        print(f"  soap bytes {len(soap_wire)}, json bytes {len(json_wire)}, "
              f"ratio {len(json_wire) / len(soap_wire):.4f}")
        timed("soap parse", soap_to_canonical, soap_wire)
        timed("json parse", lambda w: json_to_canonical(w, namespace=ns), json_wire)
        timed("soap serialize", canonical_to_soap, envelope)
        timed("json serialize", canonical_to_json, envelope)


if __name__ == "__main__":
    main()
