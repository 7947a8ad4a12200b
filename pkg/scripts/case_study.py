#!/usr/bin/env python3
"""Run the CULPRIT-SHOCK reproduction and print the flagged table."""

import sys

from bayescal.case_study import run_case_study


def main() -> int:
    report = run_case_study()
    for check in (report.posterior_flat, report.posterior_matched):
        flag = "PASS" if check.passed else "FAIL"
        print(f"[{flag}] {check.name}: {check.value:.4f} "
              f"(reference {check.reference} +/- {check.tolerance})")
    for row in report.rows:
        flag = "PASS" if row.passed else "FAIL"
        decision = "SUCCESS" if row.decision_success else "FAIL"
        print(f"[{flag}] {row.label}: c*={row.result.c_star:.4f} decision={decision}")
        for check in row.checks:
            mark = "ok" if check.passed else "MISMATCH"
            print(f"    {check.name}: {check.value:.4f} vs {check.reference} {mark}")
    print(f"overall: {'PASS' if report.passed else 'FAIL'} "
          f"in {report.elapsed_seconds:.1f} s")
    return 0 if report.passed else 1


if __name__ == "__main__":
    sys.exit(main())
