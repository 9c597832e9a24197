#!/usr/bin/env python3
"""Regenerate models/gd-example.json (gradient descent, gamma = 1/L)
for the generic `lyacert solve` driver."""

import json
import pathlib

from lyacert.scenarios.gd import build_gd

GAMMA, L = 1.0, 1.0


def main() -> None:
    model, outcomes, spec = build_gd(GAMMA, L)
    doc = {
        "model": model.to_json_dict(),
        "outcomes": outcomes.to_json_dict(),
        "lyapunov": {
            "support": list(spec.support),
            "nonneg": [n.to_json_dict() for n in spec.nonneg_quantities],
            "decrease": spec.decrease.to_json_dict(),
            "mode": spec.mode.value,
        },
    }
    out = pathlib.Path(__file__).resolve().parent.parent / "models"
    out.mkdir(exist_ok=True)
    path = out / "gd-example.json"
    path.write_text(json.dumps(doc, indent=2) + "\n")
    print(f"wrote {path}")


if __name__ == "__main__":
    main()
