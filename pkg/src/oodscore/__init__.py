"""Zero-shot one-class OOD scoring over text-image embeddings.

Core modules: embeddings (vectors + OCEB store format), labelsets (in/out
class lists and prompt ensembles), scoring (the five OOD scores), mixture
(per-box scores and the spread score g), evaluation (tie-exact AUROC and
reports), synth (seeded generators for model-free testing), rng (the pinned
deterministic generator). The service subpackage wraps the core behind an
HTTP API; the CLI is a thin client of the same handlers.
"""

__version__ = "0.1.0"

FORMAT_VERSION = 1
