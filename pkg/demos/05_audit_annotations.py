"""Aggregate rubric annotations and compute inter-rater agreement.

Run with: python3 demos/05_audit_annotations.py
"""

from procslip.rubric import RubricAnnotation, audit, procedure_logic_score


def main():
    print("confidence-weighted procedure-logic score for votes "
          "(yes,3), (yes,3), (no,2):",
          procedure_logic_score([(1, 3), (1, 3), (0, 2)]))

    annotations = []
    likert = {"s1": [4, 4, 3], "s2": [2, 3, 2], "s3": [5, 4, 5]}
    for sid, votes in likert.items():
        for rater, value in zip(("r1", "r2", "r3"), votes):
            annotations.append(RubricAnnotation(sid, rater, "human_plausibility", value))
            annotations.append(RubricAnnotation(sid, rater, "error_validity", 1))
            annotations.append(RubricAnnotation(
                sid, rater, "procedure_logic", int(value >= 4),
                confidence=2))

    report = audit(annotations)
    print()
    print(report.table())


if __name__ == "__main__":
    main()
