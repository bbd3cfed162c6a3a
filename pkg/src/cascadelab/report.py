"""Claim verdicts against the tolerance table, and aggregation across run manifests."""

from __future__ import annotations

import json
import math
from functools import lru_cache
from importlib import resources
from pathlib import Path

MANIFEST_NAME = "manifest.json"


@lru_cache(maxsize=1)
def tolerance_table() -> dict:
    text = resources.files("cascadelab").joinpath("data/tolerances.json").read_text()
    return json.loads(text)


def claim(claim_id: str, measured, reference=None, **extra) -> dict:
    """A measured value for a registered claim; ``reference`` overrides the table."""
    entry = tolerance_table()["claims"][claim_id]
    ref = entry["reference"] if reference is None else reference
    out = {"id": claim_id, "claim": entry["claim"], "measured": measured, "reference": ref}
    out.update(extra)
    return out


def verdict(c: dict) -> dict:
    entry = tolerance_table()["claims"][c["id"]]
    rule, tol = entry["rule"], entry["tolerance"]
    m, ref = c["measured"], c["reference"]
    row = {
        "claim_id": c["id"],
        "claim": c["claim"],
        "measured": m,
        "reference": ref,
        "rule": rule,
        "tolerance": tol,
    }
    if rule == "none" or m is None:
        row.update(consistent=None, verdict="unformalized (no formula to check)")
        return row
    if rule == "upper":
        ok = m <= tol
        text = f"measured {m:.6g} {'<=' if ok else '>'} {tol:.6g}"
    else:
        delta = abs(m - ref)
        bound = tol * abs(ref) if rule == "rel" else tol
        ok = delta <= bound
        text = f"|Δ|={delta:.2g} {'<=' if ok else '>'} {bound:.2g}"
    if isinstance(m, float) and not math.isfinite(m):
        ok = False
    row.update(consistent=bool(ok), verdict=f"{'consistent' if ok else 'inconsistent'} ({text})")
    return row


def find_manifests(directory) -> list[Path]:
    return sorted(p for p in Path(directory).rglob(MANIFEST_NAME) if p.is_file())


def discrepancy_report(directory) -> dict:
    """Collect claims from every run manifest below ``directory``."""
    directory = Path(directory)
    if not directory.is_dir():
        raise FileNotFoundError(f"{directory} is not a directory")
    manifests = []
    for path in find_manifests(directory):
        data = json.loads(path.read_text())
        if data.get("command") == "discrepancy-report":
            continue
        manifests.append((path, data))
    if not manifests:
        raise ValueError(f"no run manifests under {directory}")

    rows = []
    for path, data in manifests:
        for c in data.get("claims", []):
            row = verdict(c)
            row["source_run"] = str(path.parent.relative_to(directory))
            row["source_command"] = data.get("command")
            rows.append(row)
    rows.sort(key=lambda r: (r["claim_id"], r["source_run"]))
    return {
        "tolerance_table_version": tolerance_table()["version"],
        "manifests": [str(p.relative_to(directory)) for p, _ in manifests],
        "failed_runs": [str(p.parent.relative_to(directory)) for p, d in manifests if d.get("status") != "ok"],
        "rows": rows,
        "summary": {
            "checked": len(rows),
            "consistent": sum(r["consistent"] is True for r in rows),
            "inconsistent": sum(r["consistent"] is False for r in rows),
            "unformalized": sum(r["consistent"] is None for r in rows),
        },
    }
