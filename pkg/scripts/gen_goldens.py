#!/usr/bin/env python3
"""Regenerate the golden bundles under tests/golden/.

Run after an intentional compiler output change, then review the diff;
the byte-compare test pins everything else.
"""

from __future__ import annotations

import shutil
import sys
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent
sys.path.insert(0, str(ROOT / "src"))

from muit.codegen import CompileOptions, compile_bundle, write_bundle  # noqa: E402
from muit.dsl import analyze  # noqa: E402

if __name__ == "__main__":
    golden_root = ROOT / "tests" / "golden"
    for source in sorted((ROOT / "corpus").glob("*.muit")):
        result = analyze(source.read_text())
        assert result.ok, source
        bundle = compile_bundle(result.module, CompileOptions(app_name=source.stem))
        target = golden_root / source.stem
        if target.exists():
            shutil.rmtree(target)
        write_bundle(bundle, target)
        print(f"{source.stem}: {len(bundle.files)} files")
