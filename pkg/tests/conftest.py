import pytest

from procslip.corpusio import Procedure, Step
from procslip.semrep import parse

# Canonical single-line representation examples covering flat roles, nested
# functors, embedded clauses, and role-value pairs inside functors.
REPRESENTATION_EXAMPLES = [
    "INSERT(Agent: you, Object: test_swab, Destination: into(nostril(of(her))))",
    "ADD(Agent: you, Object: coffee_grounds, Origin: bowl, "
    "Destination: filter(Location: in(french_press)))",
    "ADD(Agent: you, Object: cut(onions), Coobject: egg(Location: in(mixing_bowl)))",
    "UNBOX(Agent: you, Object: covid_test_package)",
    "EXTRACT(Agent: you, Object: test_swab, Origin: from(nostril(of(her))))",
    "INSERT(Agent: you, Object: collection_swab, Destination: in(pack(of(it))), "
    "Purpose: disposal)",
    "COVER(Agent: you, Object: test_vial, Instrument: lid)",
    "BACKPEDAL(Agent: you, Object: chain, Manner: slowly, Temporal: WHILE("
    "APPLY(Agent: you, Object: chain_lube, Coobject: to(each_individual_roller(of(chain))))))",
    "CUT(Agent: you, Object: sushi_roll, Result: smaller_pieces, Location: on(cutting_board))",
]


def make_simple_procedure(texts, durations=None, essential=None, proc_id="p0"):
    durations = durations or [10.0] * len(texts)
    essential = essential or [True] * len(texts)
    steps = []
    clock = 0.0
    for i, text in enumerate(texts):
        steps.append(Step(index=i, step_id=str(i), text=text, duration=durations[i],
                          start=clock, end=clock + durations[i],
                          essential=essential[i], semrep_id=str(i)))
        clock += durations[i]
    return Procedure(proc_id, "task", "scenario", steps)


@pytest.fixture
def five_step_procedure():
    texts = [
        "Get the bowl from the shelf",
        "Wash the bowl with water",
        "Chop the onion with the knife",
        "Add the onion to the bowl",
        "Mix everything with a spoon",
    ]
    return make_simple_procedure(texts)


@pytest.fixture
def five_step_semreps():
    reps = [
        "GET(Agent: you, Object: bowl, Origin: shelf)",
        "WASH(Agent: you, Object: bowl, Instrument: water)",
        "CHOP(Agent: you, Object: onion, Instrument: knife)",
        "ADD(Agent: you, Object: onion, Destination: bowl)",
        "MIX(Agent: you, Object: everything, Instrument: spoon)",
    ]
    return {i: parse(r) for i, r in enumerate(reps)}
