#!/usr/bin/env python3
"""Regenerates the JSON presentation/extension files under groups/."""

import json
import pathlib
import sys

sys.path.insert(0, str(pathlib.Path(__file__).resolve().parents[1] / "src"))

from nilsolve import catalog, extension, malcev  # noqa: E402


def main():
    out = pathlib.Path(__file__).resolve().parents[1] / "groups"
    out.mkdir(exist_ok=True)
    for name, build in catalog.GROUPS.items():
        doc = malcev.presentation_to_dict(build())
        (out / f"{name}.json").write_text(json.dumps(doc, indent=1, sort_keys=True) + "\n")
        print(f"wrote groups/{name}.json")
    for name, build in catalog.EXTENSIONS.items():
        doc = extension.extension_to_dict(build())
        (out / f"{name}.json").write_text(json.dumps(doc, indent=1, sort_keys=True) + "\n")
        print(f"wrote groups/{name}.json")


if __name__ == "__main__":
    main()
