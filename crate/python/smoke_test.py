"""Smoke test for the `qss` extension module.

Build first:  pip install --no-build-isolation -e crates/python
Run:          python python/smoke_test.py
"""

import json
import math

import qss


def check(cond, what):
    if not cond:
        raise SystemExit(f"FAIL: {what}")
    print(f"ok: {what}")


check(qss.mod_inverse(3, 7) == 5, "mod_inverse(3, 7) == 5")
try:
    qss.mod_inverse(2, 4)
except qss.NotInvertibleError as exc:
    check("2" in str(exc), "mod_inverse(2, 4) raises NotInvertibleError")
else:
    raise SystemExit("FAIL: mod_inverse(2, 4) did not raise")

shares = qss.gen_shares(7, [3, 2, 5], [1, 2, 3])
check(qss.reconstruct_classical(shares, 7) == 3, "Shamir round trip over Z_7")

u = qss.LocalUnitary.qft_inv(4)
check(u.is_unitary(1e-12), "QFT^-1 is unitary")

ghz = qss.QuditRegister.ghz(4, 3)
check(all(abs(p - 0.25) < 1e-12 for p in ghz.marginal(1)), "GHZ marginal is uniform")

params = qss.ProtocolParams.direct(4, [3, 0, 0])
check(params.expected_secret() == 3, "direct params secret")
check(abs(qss.success_probability_exact(params) - 0.25) < 1e-12, "lone measurer succeeds with 1/d")

est, err = qss.success_probability_mc(params, 4000, 7)
check(abs(est - 0.25) <= 4 * err + 1e-9, f"MC estimate {est:.4f} near 1/4")

tr = qss.run_repaired_all_measure(qss.ProtocolParams.direct(5, [1, 2, 3]))
check(tr.succeeded() and tr.final_outcome == 1, "all-measure variant recovers the secret")
check(json.loads(tr.to_json())["variant"] == "repaired", "transcript JSON")

check(qss.run_product_counterfactual(2, 4) == 2, "unentangled counterfactual recovers S")

report = qss.reproduce_example_d4(trials=2000)
check(math.isclose(report.exact_p, 0.25, abs_tol=1e-12), "worked example exact P = 1/4")
check(report.verdict.startswith("comment confirmed"), "worked example verdict")

print("smoke test passed")
