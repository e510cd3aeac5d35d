"""Acceptance suite: one test per criterion, run at the contract budgets.

Each criterion maps to a registered claim; the claim runs once (module
scope) and the tests assert its verdict and runtime limit, printing one
PASS/FAIL line per criterion.

Known red: the closed-form criterion asserts exact entrywise equality
between the recomputed filter-twirl-normalize state and the printed
coefficient pair.  The recomputed twirl has tr(D) = 3(1-e) and
tr(D F) = -e, which forces alpha = (9-8e)/(72(1-e)), beta = 1/(24(1-e)),
while the printed pair is (6-5e)/(48(1-e)) and (2+e)/(48(1-e)) -- a pair no
filter of this family can produce (it would need tr(D F) = -3e/2 against
the same tr(D)).  The criterion is asserted as stated and fails honestly;
every qualitative property of the state (trace, psd, NPT, shadow PPT)
holds for both coefficient pairs and is covered by the next criterion.
"""

import pytest

from tsplab.claims import CLAIMS, ClaimContext, run_claim

_BY_NAME = {spec.claim: spec for spec in CLAIMS}

_CRITERIA = [
    ("criterion-01", "state-pipeline/closed-form"),
    ("criterion-02", "state-pipeline/state-checks"),
    ("criterion-03", "perturbation/not-psd"),
    ("criterion-04", "base-choi/structure"),
    ("criterion-05", "mpo-reduction/identity"),
    ("criterion-06", "mamu-counterexample/values"),
    ("criterion-07", "symmetrization/not-two-stable"),
    ("criterion-08", "star-convexity/instance"),
    ("criterion-09", "perturbed-power/block-positive"),
    ("criterion-10", "state-pipeline/real-eta"),
    ("criterion-11", "field/property-suite"),
    ("criterion-12", "psd/pivot-vs-minors"),
    ("criterion-13", "layers/suite"),
]


@pytest.fixture(scope="module")
def reports():
    ctx = ClaimContext(seed=7, restarts=1000, search_restarts=200, n_max=3)
    out = {}
    for label, name in _CRITERIA:
        report = run_claim(_BY_NAME[name], ctx)
        out[name] = report
        status = "PASS" if report.verdict == "pass" else report.verdict.upper()
        print(f"[{status}] {label} {name} ({report.runtime_ms} ms, "
              f"limit {report.time_limit_s:.0f} s)")
    return out


@pytest.mark.parametrize("label,name", _CRITERIA, ids=[c[0] for c in _CRITERIA])
def test_criterion(reports, label, name):
    report = reports[name]
    assert report.runtime_ms / 1000.0 < report.time_limit_s, (
        f"{label} exceeded its time limit: {report.runtime_ms} ms")
    assert report.verdict == "pass", (
        f"{label} ({name}) failed: {report.witness}")
