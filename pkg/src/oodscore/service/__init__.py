"""HTTP service wrapping the scoring core; the CLI shares its handlers."""
