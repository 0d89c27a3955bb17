"""Prints one [ACCEPTANCE] line per gate criterion after the run."""

_CRITERIA = {
    "test_identity_decomposition_10k_random_logit_pairs":
        "identity suite (10k cases, 1e-9)",
    "test_softmax_scores_match_naive_oracle_1000_cases":
        "softmax-oracle equivalence (1000 cases, 1e-12)",
    "test_auroc_bit_equal_to_pairwise_oracle_500_cases":
        "auroc exact-oracle equivalence (500 cases, bit-equal)",
    "test_invariance_shift_and_monotone_transform":
        "invariance suite (shift + monotone transform)",
    "test_synthetic_separability_seen_and_unseen":
        "synthetic separability (seen/unseen floors)",
    "test_mixture_spread_separates_where_single_scores_cannot":
        "mixture suite (g AUROC 1.0, singles <= 0.6)",
    "test_format_round_trip_and_cli_thread_stability":
        "format round-trip + thread stability",
}


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    del exitstatus, config
    verdicts = {}
    for outcome, verdict in (("failed", "FAIL"), ("error", "FAIL"),
                             ("passed", "PASS")):
        for rep in terminalreporter.stats.get(outcome, []):
            location = getattr(rep, "location", None)
            if location is None:
                continue
            test = location[2].split("[")[0]
            if test in _CRITERIA:
                verdicts.setdefault(test, verdict)
    if not verdicts:
        return
    terminalreporter.section("acceptance criteria")
    for test, label in _CRITERIA.items():
        if test in verdicts:
            terminalreporter.write_line(f"[ACCEPTANCE] {label}: {verdicts[test]}")
