"""Regenerate src/modinv/data/d2_phase_pattern.json from the Weyl-sum S matrices."""
import json
import sys

from modinv.spectra import write_phase_pattern

if __name__ == "__main__":
    doc = write_phase_pattern(sys.argv[1] if len(sys.argv) > 1 else None)
    print(json.dumps(doc["pattern"], indent=1))
