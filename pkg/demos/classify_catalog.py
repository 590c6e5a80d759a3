"""Classify every catalog metric and tabulate the verdicts.

Each column is one predicate; h = holds on the sample, f = fails
(a single witness state above tolerance), and the last two columns show
the fitted flag-curvature constant where the metric has one.
"""

from finslerlab import SamplePlan, classify_metric, get_example, list_examples
from finslerlab.classify import PREDICATES


def main():
    plan = SamplePlan(count=12)
    short = {
        "riemannian": "riem", "berwald": "berw", "weakly_berwald": "wberw",
        "douglas": "doug", "dbar": "dbar", "gdw": "gdw",
        "r_quadratic": "rq", "pr_quadratic": "prq", "s_flat": "sflat",
        "constant_flag": "cflag",
    }
    header = "%-22s" % "metric" + "".join(
        "%6s" % short[p] for p in PREDICATES
    ) + "   lambda"
    print(header)
    print("-" * len(header))
    for name in list_examples():
        entry = get_example(name)
        report = classify_metric(entry.metric, entry.volume, plan)
        cells = ""
        for pred in PREDICATES:
            verdict = report.verdict(pred)
            cells += "%6s" % {"holds": "h", "fails": "f"}.get(verdict, "?")
        cf = report.predicates["constant_flag"]
        lam = (
            "%8.4f" % cf.details["lambda_hat"]
            if cf.verdict == "holds" else "       -"
        )
        print("%-22s%s %s" % (name, cells, lam))
        if report.hierarchy_violations:
            print("   !! hierarchy violations:", report.hierarchy_violations)


if __name__ == "__main__":
    main()
