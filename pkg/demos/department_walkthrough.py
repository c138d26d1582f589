"""Walk through the department scenarios one row at a time.

Run with ``python3 demos/department_walkthrough.py``.
"""

from deceptiplan.alteration import format_cost
from deceptiplan.builtins import DEPARTMENT_ROWS, builtin_instance
from deceptiplan.ilp import solve
from deceptiplan.verifier import is_deceptive


def main():
    for row, (_, _, notes) in DEPARTMENT_ROWS.items():
        inst = builtin_instance(f"department-row{row}")
        print(f"row {row}: {notes}")
        honest = is_deceptive(inst, {y: y for y in inst.events})
        if honest.deceptive:
            print("  the unaltered sensors already hide the deviation")
        else:
            seen = " ".join("{" + ",".join(x.elements()) + "}" for x in honest.observed)
            print(f"  unaltered, the walk {' '.join(honest.walk)} gives itself away as {seen}")
        result = solve(inst)
        if not result.feasible:
            print(f"  no alteration works: {result.certificate}\n")
            continue
        changes = result.alteration.changes()
        print(f"  cheapest alteration costs {format_cost(result.cost)}")
        for y, t in changes.items():
            print(f"    {y} reports as {t}")
        assert is_deceptive(inst, result.alteration).deceptive
        print()


if __name__ == "__main__":
    main()
