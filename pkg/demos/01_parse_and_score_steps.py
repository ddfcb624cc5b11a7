"""Parse step representations, score their complexity, and build role priors.

Run with: python3 demos/01_parse_and_score_steps.py
"""

from procslip.semrep import RoleImpactMap, build_role_priors, complexity, parse

EXAMPLES = [
    "UNBOX(Agent: you, Object: covid_test_package)",
    "EXTRACT(Agent: you, Object: test_swab, Origin: from(nostril(of(her))))",
    "COVER(Agent: you, Object: test_vial, Instrument: lid)",
    "ADD(Agent: you, Object: coffee_grounds, Origin: bowl, "
    "Destination: filter(Location: in(french_press)))",
]


def main():
    reps = [parse(text) for text in EXAMPLES]

    print("== parsed representations ==")
    for rep in reps:
        print(f"{rep.predicate:8s} roles={list(rep.roles)}  complexity={complexity(rep):.0f}")

    print("\n== role priors from this tiny corpus ==")
    table = build_role_priors(reps)
    for pred in sorted(table.shares):
        shares = ", ".join(f"{r}={v:.2f}" for r, v in sorted(table.roles_for(pred).items()))
        print(f"{pred:8s} {shares}")

    print("\n== impact levels ==")
    impact_map = RoleImpactMap()
    for role in ("Object", "Origin", "Instrument", "Manner", "Agent"):
        status = "excluded" if role in impact_map.excluded else impact_map.impact(role)
        print(f"{role:12s} {status}")


if __name__ == "__main__":
    main()
